//! S-expression reader shared by the equation and scheme file formats.
//!
//! Bracketed values such as `[0, 5]` and `{a, b}` are read as single atoms.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }
}

/// Reads `text`, which starts at `start`, as a sequence of expressions.
/// Line breaks inside `text` advance the reported positions.
pub fn read_seq(text: &str, start: Pos) -> Result<Vec<Sexp>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut stack: Vec<(Vec<Sexp>, Pos)> = vec![(Vec::new(), start)];
    // positions of every char; bodies may span lines
    let mut positions = Vec::with_capacity(chars.len() + 1);
    let mut cur = start;
    for c in &chars {
        positions.push(cur);
        if *c == '\n' {
            cur = Pos {
                line: cur.line + 1,
                col: 1,
            };
        } else {
            cur.col += 1;
        }
    }
    positions.push(cur);
    let pos_of = |i: usize| positions[i];
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                stack.push((Vec::new(), pos_of(i)));
                i += 1;
            }
            ')' => {
                if stack.len() == 1 {
                    return Err(ParseError::new(pos_of(i), "unbalanced `)`"));
                }
                let (items, p) = stack.pop().unwrap();
                stack.last_mut().unwrap().0.push(Sexp::List(items, p));
                i += 1;
            }
            '[' | '{' => {
                let close = if c == '[' { ']' } else { '}' };
                let begin = i;
                while i < chars.len() && chars[i] != close {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(ParseError::new(pos_of(begin), format!("missing `{close}`")));
                }
                i += 1;
                let tok: String = chars[begin..i].iter().collect();
                stack.last_mut().unwrap().0.push(Sexp::Atom(tok, pos_of(begin)));
            }
            _ => {
                let begin = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"()[]{}".contains(chars[i]) {
                    i += 1;
                }
                let tok: String = chars[begin..i].iter().collect();
                stack.last_mut().unwrap().0.push(Sexp::Atom(tok, pos_of(begin)));
            }
        }
    }
    if stack.len() > 1 {
        let (_, p) = stack.pop().unwrap();
        return Err(ParseError::new(p, "unclosed `(`"));
    }
    Ok(stack.pop().unwrap().0)
}

/// Reads a right-hand side body: either one parenthesized form, a bare
/// atom, or an unparenthesized form `head arg...`. The result is always a
/// form (a list whose first element is the head).
pub fn read_form(text: &str, start: Pos) -> Result<(Vec<Sexp>, Pos), ParseError> {
    let mut seq = read_seq(text, start)?;
    match seq.len() {
        0 => Err(ParseError::new(start, "empty expression")),
        1 => match seq.pop().unwrap() {
            Sexp::List(items, p) => Ok((items, p)),
            atom @ Sexp::Atom(..) => {
                let p = atom.pos();
                Ok((vec![atom], p))
            }
        },
        _ => {
            let p = seq[0].pos();
            Ok((seq, p))
        }
    }
}

/// Strips a `#` comment.
pub fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: Pos = Pos { line: 1, col: 1 };

    #[test]
    fn reads_nested_forms() {
        let (form, _) = read_form("ite (eq (get y1) (lit 0)) (lit 1) (lit 0)", P).unwrap();
        assert_eq!(form.len(), 4);
        assert_eq!(form[0].atom(), Some("ite"));
        assert!(matches!(&form[1], Sexp::List(items, _) if items.len() == 3));
    }

    #[test]
    fn bracketed_values_are_atoms() {
        let seq = read_seq("lit [-inf, 3]", P).unwrap();
        assert_eq!(seq[1].atom(), Some("[-inf, 3]"));
        let seq = read_seq("(lit {a, b})", P).unwrap();
        assert!(matches!(&seq[0], Sexp::List(items, _) if items[1].atom() == Some("{a, b}")));
    }

    #[test]
    fn unbalanced() {
        assert!(read_seq("(get y", P).is_err());
        let err = read_seq("get y)", P).unwrap_err();
        assert_eq!(err.pos.col, 6);
    }
}

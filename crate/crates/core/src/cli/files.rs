use crate::eqsys::{DslSystem, Rhs, Sym};
use crate::interproc::{BuiltinRegistry, PointId, Scheme};
use crate::lattice::{Domain, LatticeDescriptor};
use crate::syntax::{strip_comment, ParseError, Pos};

/// A statement: keyword, the rest of its first line and any continuation
/// lines, and where the rest starts.
struct Stmt {
    keyword: String,
    kw_pos: Pos,
    body: String,
    body_pos: Pos,
}

const KEYWORDS: &[&str] = &["lattice", "var", "scheme", "start", "point"];

/// Splits a file into statements. A line starting with a keyword opens a
/// statement; other non-blank lines continue the previous one.
fn statements(text: &str) -> Result<Vec<Stmt>, ParseError> {
    let mut out: Vec<Stmt> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let word = trimmed.split_whitespace().next().unwrap_or("");
        let pos = Pos {
            line: i + 1,
            col: indent + 1,
        };
        if KEYWORDS.contains(&word) {
            let rest = &trimmed[word.len()..];
            let lead = rest.len() - rest.trim_start().len();
            out.push(Stmt {
                keyword: word.to_string(),
                kw_pos: pos,
                body: rest.trim_start().to_string(),
                body_pos: Pos {
                    line: i + 1,
                    col: indent + word.len() + lead + 1,
                },
            });
        } else if let Some(last) = out.last_mut() {
            // keep the line structure so positions stay right
            let gap = (i + 1) - (last.body_pos.line + last.body.matches('\n').count());
            last.body.push_str(&"\n".repeat(gap));
            last.body.push_str(line);
        } else {
            return Err(ParseError::new(pos, format!("expected a directive, found `{word}`")));
        }
    }
    Ok(out)
}

fn parse_descriptor(body: &str, pos: Pos) -> Result<Domain, ParseError> {
    let words: Vec<&str> = body.split_whitespace().collect();
    let desc = match words.as_slice() {
        ["chain", n] => LatticeDescriptor::Chain(
            n.parse()
                .map_err(|_| ParseError::new(pos, format!("chain length must be a number, got `{n}`")))?,
        ),
        ["natinf"] => LatticeDescriptor::NatInf,
        ["interval"] => LatticeDescriptor::Interval,
        ["powerset", atoms @ ..] => LatticeDescriptor::Powerset(atoms.iter().map(|a| a.to_string()).collect()),
        _ => {
            return Err(ParseError::new(
                pos,
                format!("unknown lattice `{body}` (expected chain N, natinf, interval or powerset ATOMS)"),
            ))
        }
    };
    Domain::new(desc).map_err(|e| ParseError::new(pos, e.to_string()))
}

/// Splits `name = body` and returns the name, the body and its position.
fn definition(s: &Stmt) -> Result<(String, String, Pos), ParseError> {
    let Some(eq) = s.body.find('=') else {
        return Err(ParseError::new(
            s.body_pos,
            format!("expected `{} NAME = EXPR`", s.keyword),
        ));
    };
    let name = s.body[..eq].trim();
    if name.is_empty() || name.contains(char::is_whitespace) || name.contains(['(', ')', '[', ']', '{', '}']) {
        return Err(ParseError::new(s.body_pos, format!("bad {} name `{name}`", s.keyword)));
    }
    let rest = &s.body[eq + 1..];
    let lead = rest.len() - rest.trim_start().len();
    let body_pos = Pos {
        line: s.body_pos.line,
        col: s.body_pos.col + eq + 1 + lead,
    };
    Ok((name.to_string(), rest.trim_start().to_string(), body_pos))
}

/// Parses an equation file:
///
/// ```text
/// lattice natinf
/// var y1 = join (get y1) (get y2)
/// ```
///
/// Variables keep their declaration order.
pub fn parse_finite_file(text: &str) -> Result<DslSystem, ParseError> {
    let stmts = statements(text)?;
    let mut it = stmts.iter();
    let first = it
        .next()
        .ok_or_else(|| ParseError::new(Pos { line: 1, col: 1 }, "missing `lattice` line"))?;
    if first.keyword != "lattice" {
        return Err(ParseError::new(first.kw_pos, "the first line must be `lattice ...`"));
    }
    let domain = parse_descriptor(&first.body, first.body_pos)?;
    let mut equations: Vec<(Sym, Rhs)> = Vec::new();
    for s in it {
        if s.keyword != "var" {
            return Err(ParseError::new(
                s.kw_pos,
                format!("unexpected `{}` in an equation file", s.keyword),
            ));
        }
        let (name, body, pos) = definition(s)?;
        if equations.iter().any(|(v, _)| v.as_str() == name) {
            return Err(ParseError::new(s.body_pos, format!("duplicate variable `{name}`")));
        }
        equations.push((Sym::new(&name), Rhs::parse(&body, &domain, pos)?));
    }
    let last = stmts.last().map_or(Pos { line: 1, col: 1 }, |s| s.kw_pos);
    if equations.is_empty() {
        return Err(ParseError::new(last, "no variables"));
    }
    for (_, e) in &equations {
        for v in e.mentioned_vars() {
            if !equations.iter().any(|(w, _)| *w == v) {
                return Err(ParseError::new(
                    last,
                    format!("`get {v}` refers to an undeclared variable"),
                ));
            }
        }
    }
    Ok(DslSystem { domain, equations })
}

/// Parses a scheme file with the standard builtins:
///
/// ```text
/// scheme natinf
/// start u 0
/// point u = join (cell v (cell v (cell u ctx))) ctx
/// point v = join (apply inc (cell v ctx)) ctx
/// ```
pub fn parse_scheme_file(text: &str) -> Result<Scheme, ParseError> {
    parse_scheme_file_with(text, &BuiltinRegistry::standard())
}

pub fn parse_scheme_file_with(text: &str, registry: &BuiltinRegistry) -> Result<Scheme, ParseError> {
    let stmts = statements(text)?;
    let mut it = stmts.iter();
    let first = it
        .next()
        .ok_or_else(|| ParseError::new(Pos { line: 1, col: 1 }, "missing `scheme` line"))?;
    if first.keyword != "scheme" {
        return Err(ParseError::new(first.kw_pos, "the first line must be `scheme ...`"));
    }
    let domain = parse_descriptor(&first.body, first.body_pos)?;
    let mut start: Option<&Stmt> = None;
    let mut points: Vec<(String, String, Pos, Pos)> = Vec::new();
    for s in it {
        match s.keyword.as_str() {
            "start" if start.is_some() => return Err(ParseError::new(s.kw_pos, "duplicate `start`")),
            "start" => start = Some(s),
            "point" => {
                let (name, body, pos) = definition(s)?;
                if points.iter().any(|p| p.0 == name) {
                    return Err(ParseError::new(s.body_pos, format!("duplicate point `{name}`")));
                }
                points.push((name, body, pos, s.body_pos));
            }
            other => {
                return Err(ParseError::new(
                    s.kw_pos,
                    format!("unexpected `{other}` in a scheme file"),
                ))
            }
        }
    }
    let last = stmts.last().map_or(Pos { line: 1, col: 1 }, |s| s.kw_pos);
    if points.is_empty() {
        return Err(ParseError::new(last, "no points"));
    }
    let names: Vec<String> = points.iter().map(|p| p.0.clone()).collect();
    let mut rhs = Vec::with_capacity(points.len());
    for (_, body, pos, _) in &points {
        rhs.push(Scheme::parse_expr(body, &names, registry, &domain, *pos)?);
    }
    let Some(st) = start else {
        return Err(ParseError::new(last, "missing start"));
    };
    let (p, ctx) = parse_start(st.body.trim(), &names, &domain, st.body_pos, ' ')?;
    Scheme::new(domain, names, rhs, (p, ctx)).map_err(|e| ParseError::new(first.kw_pos, e.to_string()))
}

/// Parses `point<sep>value`.
pub(crate) fn parse_start(
    text: &str,
    names: &[String],
    dom: &Domain,
    pos: Pos,
    sep: char,
) -> Result<(PointId, crate::lattice::Value), ParseError> {
    let Some((p, v)) = text.split_once(sep) else {
        return Err(ParseError::new(
            pos,
            format!("expected `POINT{sep}CONTEXT`, got `{text}`"),
        ));
    };
    let p = p.trim();
    let idx = names
        .iter()
        .position(|n| n == p)
        .ok_or_else(|| ParseError::new(pos, format!("unknown point `{p}`")))?;
    let ctx = dom
        .parse_value(v.trim())
        .map_err(|e| ParseError::new(pos, e.to_string()))?;
    Ok((PointId(idx), ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lattice::Value;

    #[test]
    fn equation_files_parse() {
        let osc = parse_finite_file(fixtures::OSCILLATING).unwrap();
        assert_eq!(osc.equations.len(), 1);
        assert_eq!(osc.domain, Domain::natinf());
        let mm = parse_finite_file(fixtures::MAX_MIN).unwrap();
        assert_eq!(mm.vars(), vec![Sym::new("y1"), Sym::new("y2"), Sym::new("y3")]);
    }

    #[test]
    fn equation_file_errors() {
        let e = parse_finite_file("lattice natinf\n# nothing\n").unwrap_err();
        assert_eq!(e.msg, "no variables");
        let e = parse_finite_file("lattice natinf\nvar x = lit 1\nvar x = lit 2\n").unwrap_err();
        assert!(e.msg.contains("duplicate variable `x`"), "{e}");
        assert_eq!(e.pos.line, 3);
        let e = parse_finite_file("lattice natinf\nvar x = frob 1\n").unwrap_err();
        assert_eq!(e.pos.line, 2);
        let e = parse_finite_file("lattice natinf\nvar x = get y\n").unwrap_err();
        assert!(e.msg.contains("undeclared"), "{e}");
        let e = parse_finite_file("lattice ring 3\nvar x = lit 1\n").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 9 });
    }

    #[test]
    fn continuation_lines() {
        let text = "lattice natinf\nvar x = join\n   (lit 1)\n\n   (get x)\n";
        let s = parse_finite_file(text).unwrap();
        assert_eq!(s.equations[0].1, Rhs::join(Rhs::Lit(Value::nat(1)), Rhs::get("x")));
        let e = parse_finite_file("lattice natinf\nvar x = join\n   (lit 1)\n   (lit foo)\n").unwrap_err();
        assert_eq!(e.pos.line, 4);
    }

    #[test]
    fn scheme_files_parse() {
        let s = parse_scheme_file(fixtures::TWO_CALL).unwrap();
        assert_eq!(s.names(), ["u", "v"]);
        assert_eq!(s, fixtures::two_call_scheme(Domain::natinf()));
        let s = parse_scheme_file(fixtures::TWO_CALL_INTERVAL).unwrap();
        assert_eq!(s, fixtures::two_call_scheme(Domain::interval()));
    }

    #[test]
    fn scheme_file_errors() {
        let e = parse_scheme_file("scheme natinf\nstart u 0\npoint u = cell w ctx\n").unwrap_err();
        assert!(e.msg.contains("unknown point `w`"), "{e}");
        let e = parse_scheme_file("scheme natinf\npoint u = ctx\n").unwrap_err();
        assert_eq!(e.msg, "missing start");
        let e = parse_scheme_file("scheme natinf\nstart u 0\npoint u = apply frob ctx\n").unwrap_err();
        assert!(e.msg.contains("unknown builtin `frob`"), "{e}");
        let e = parse_scheme_file("scheme powerset a\nstart u {}\npoint u = apply inc ctx\n").unwrap_err();
        assert!(e.msg.contains("not defined"), "{e}");
    }
}

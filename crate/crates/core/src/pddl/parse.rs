//! S-expression reader and parsers for PDDL domain and problem files.
//!
//! Only the STRIPS subset is accepted: `:strips` and `:typing`
//! requirements, conjunctive preconditions and goals, and effects made of
//! positive literals and `(not ...)` deletes. Anything else is reported
//! with a line/column position.

use std::fmt;

use super::ast::{AtomAst, DomainAst, PredicateDecl, ProblemAst, SchemaAst, TypedName};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    LParen,
    RParen,
    Symbol(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Token,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                out.push(Spanned {
                    tok: Token::LParen,
                    line,
                    col,
                });
                chars.next();
                col += 1;
            }
            ')' => {
                out.push(Spanned {
                    tok: Token::RParen,
                    line,
                    col,
                });
                chars.next();
                col += 1;
            }
            _ => {
                let (start_line, start_col) = (line, col);
                let mut sym = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.push(c.to_ascii_lowercase());
                    chars.next();
                    col += 1;
                }
                out.push(Spanned {
                    tok: Token::Symbol(sym),
                    line: start_line,
                    col: start_col,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SExpr {
    Sym(String, usize, usize),
    List(Vec<SExpr>, usize, usize),
}

impl SExpr {
    fn pos(&self) -> (usize, usize) {
        match self {
            SExpr::Sym(_, l, c) | SExpr::List(_, l, c) => (*l, *c),
        }
    }

    fn as_sym(&self) -> Option<&str> {
        match self {
            SExpr::Sym(s, _, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _, _) => Some(items),
            SExpr::Sym(..) => None,
        }
    }
}

fn read_sexpr(toks: &[Spanned], at: usize) -> Result<(SExpr, usize), ParseError> {
    match toks.get(at) {
        None => {
            let (l, c) = toks
                .last()
                .map(|t| (t.line, t.col))
                .unwrap_or((1, 1));
            err(l, c, "unexpected end of input")
        }
        Some(t) => match &t.tok {
            Token::Symbol(s) => Ok((SExpr::Sym(s.clone(), t.line, t.col), at + 1)),
            Token::RParen => err(t.line, t.col, "unexpected ')'"),
            Token::LParen => {
                let mut items = Vec::new();
                let mut i = at + 1;
                loop {
                    match toks.get(i) {
                        None => return err(t.line, t.col, "unclosed '('"),
                        Some(next) if next.tok == Token::RParen => {
                            return Ok((SExpr::List(items, t.line, t.col), i + 1));
                        }
                        Some(_) => {
                            let (item, rest) = read_sexpr(toks, i)?;
                            items.push(item);
                            i = rest;
                        }
                    }
                }
            }
        },
    }
}

fn read_single(text: &str) -> Result<SExpr, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return err(1, 1, "empty input");
    }
    let (expr, rest) = read_sexpr(&toks, 0)?;
    if rest != toks.len() {
        let t = &toks[rest];
        return err(t.line, t.col, "trailing content after top-level form");
    }
    Ok(expr)
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    s.chars()
        .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_')
}

fn check_name(e: &SExpr, what: &str) -> Result<String, ParseError> {
    let (l, c) = e.pos();
    match e.as_sym() {
        Some(s) if valid_name(s) => Ok(s.to_string()),
        Some(s) => err(l, c, format!("invalid {what} name '{s}'")),
        None => err(l, c, format!("expected a {what} name, found a list")),
    }
}

/// Parses `name name - type name - type ...` style typed lists. Untyped
/// trailing names get the default type `object`.
fn parse_typed_list(
    items: &[SExpr],
    variables: bool,
    what: &str,
) -> Result<Vec<TypedName>, ParseError> {
    let mut out: Vec<TypedName> = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let (l, c) = items[i].pos();
        let sym = match items[i].as_sym() {
            Some(s) => s,
            None => return err(l, c, format!("expected a {what} name, found a list")),
        };
        if sym == "-" {
            if pending.is_empty() {
                return err(l, c, "dangling '-' in typed list");
            }
            i += 1;
            let ty = match items.get(i) {
                Some(e) => check_name(e, "type")?,
                None => return err(l, c, "missing type after '-'"),
            };
            for name in pending.drain(..) {
                out.push(TypedName { name, ty: ty.clone() });
            }
            i += 1;
        } else {
            let name = if variables {
                match sym.strip_prefix('?') {
                    Some(rest) if valid_name(rest) => rest.to_string(),
                    _ => return err(l, c, format!("invalid variable '{sym}'")),
                }
            } else {
                if !valid_name(sym) {
                    return err(l, c, format!("invalid {what} name '{sym}'"));
                }
                sym.to_string()
            };
            pending.push(name);
            i += 1;
        }
    }
    for name in pending {
        out.push(TypedName {
            name,
            ty: "object".to_string(),
        });
    }
    Ok(out)
}

/// Parses an atom `(pred arg...)`. With `variables` set (domain bodies)
/// arguments may be variables, kept with their `?` prefix, or ground
/// object constants; otherwise (problem files) only plain names.
fn parse_atom(e: &SExpr, variables: bool) -> Result<AtomAst, ParseError> {
    let (l, c) = e.pos();
    let items = match e.as_list() {
        Some(items) if !items.is_empty() => items,
        _ => return err(l, c, "expected an atom '(pred arg...)'"),
    };
    let pred = check_name(&items[0], "predicate")?;
    let mut args = Vec::new();
    for arg in &items[1..] {
        let (al, ac) = arg.pos();
        let sym = match arg.as_sym() {
            Some(s) => s,
            None => return err(al, ac, "expected an atom argument, found a list"),
        };
        if let Some(rest) = sym.strip_prefix('?') {
            if !variables {
                return err(al, ac, format!("variable '{sym}' is not allowed here"));
            }
            if !valid_name(rest) {
                return err(al, ac, format!("invalid variable '{sym}'"));
            }
            args.push(sym.to_string());
        } else {
            if !valid_name(sym) {
                return err(al, ac, format!("invalid object name '{sym}'"));
            }
            args.push(sym.to_string());
        }
    }
    Ok(AtomAst { pred, args })
}

/// Parses a conjunctive condition: an atom or `(and atom...)`.
fn parse_conjunction(e: &SExpr, variables: bool, what: &str) -> Result<Vec<AtomAst>, ParseError> {
    let (l, c) = e.pos();
    let items = match e.as_list() {
        Some(items) => items,
        None => return err(l, c, format!("expected a {what}, found '{}'", e.as_sym().unwrap())),
    };
    if items.first().and_then(SExpr::as_sym) == Some("and") {
        let mut out = Vec::new();
        for item in &items[1..] {
            let (il, ic) = item.pos();
            if item
                .as_list()
                .and_then(|xs| xs.first())
                .and_then(SExpr::as_sym)
                == Some("not")
            {
                return err(il, ic, format!("negation is not allowed in a {what}"));
            }
            out.push(parse_atom(item, variables)?);
        }
        Ok(out)
    } else if items.first().and_then(SExpr::as_sym) == Some("not") {
        err(l, c, format!("negation is not allowed in a {what}"))
    } else {
        Ok(vec![parse_atom(e, variables)?])
    }
}

/// Parses an effect: a literal or `(and literal...)` where a literal is an
/// atom (add) or `(not atom)` (delete).
fn parse_effect(e: &SExpr) -> Result<(Vec<AtomAst>, Vec<AtomAst>), ParseError> {
    let (l, c) = e.pos();
    let items = match e.as_list() {
        Some(items) => items,
        None => return err(l, c, "expected an effect"),
    };
    let literals: Vec<&SExpr> = if items.first().and_then(SExpr::as_sym) == Some("and") {
        items[1..].iter().collect()
    } else {
        vec![e]
    };
    let mut add = Vec::new();
    let mut del = Vec::new();
    for lit in literals {
        let (ll, lc) = lit.pos();
        let parts = match lit.as_list() {
            Some(parts) if !parts.is_empty() => parts,
            _ => return err(ll, lc, "expected an effect literal"),
        };
        if parts[0].as_sym() == Some("not") {
            if parts.len() != 2 {
                return err(ll, lc, "'(not ...)' takes exactly one atom");
            }
            del.push(parse_atom(&parts[1], true)?);
        } else {
            add.push(parse_atom(lit, true)?);
        }
    }
    Ok((add, del))
}

fn check_requirements(items: &[SExpr]) -> Result<Vec<String>, ParseError> {
    let mut reqs = Vec::new();
    for item in items {
        let (l, c) = item.pos();
        match item.as_sym() {
            Some(":strips") | Some(":typing") => reqs.push(item.as_sym().unwrap().to_string()),
            Some(other) => {
                return err(
                    l,
                    c,
                    format!("requirement '{other}' is outside the STRIPS subset"),
                )
            }
            None => return err(l, c, "expected a requirement keyword"),
        }
    }
    Ok(reqs)
}

fn parse_schema(items: &[SExpr], l: usize, c: usize) -> Result<SchemaAst, ParseError> {
    if items.len() < 2 {
        return err(l, c, "':action' needs a name");
    }
    let name = check_name(&items[1], "action")?;
    let mut params = Vec::new();
    let mut pre = Vec::new();
    let mut add = Vec::new();
    let mut del = Vec::new();
    let mut saw_effect = false;
    let mut i = 2;
    while i < items.len() {
        let (kl, kc) = items[i].pos();
        let key = match items[i].as_sym() {
            Some(k) => k,
            None => return err(kl, kc, "expected ':parameters', ':precondition' or ':effect'"),
        };
        let value = match items.get(i + 1) {
            Some(v) => v,
            None => return err(kl, kc, format!("missing value after '{key}'")),
        };
        match key {
            ":parameters" => {
                let (vl, vc) = value.pos();
                let list = match value.as_list() {
                    Some(list) => list,
                    None => return err(vl, vc, "':parameters' takes a list"),
                };
                params = parse_typed_list(list, true, "parameter")?;
            }
            ":precondition" => pre = parse_conjunction(value, true, "precondition")?,
            ":effect" => {
                let (a, d) = parse_effect(value)?;
                add = a;
                del = d;
                saw_effect = true;
            }
            other => return err(kl, kc, format!("unknown action keyword '{other}'")),
        }
        i += 2;
    }
    if !saw_effect {
        return err(l, c, format!("action '{name}' has no ':effect'"));
    }
    Ok(SchemaAst {
        name,
        params,
        pre,
        add,
        del,
    })
}

/// Checks that every variable used in a schema body is a declared
/// parameter, and that parameters are distinct. Ground constants are
/// resolved later, against the problem's objects.
fn check_schema_vars(schema: &SchemaAst) -> Result<(), ParseError> {
    let mut seen = Vec::new();
    for p in &schema.params {
        if seen.contains(&p.name.as_str()) {
            return err(
                1,
                1,
                format!(
                    "action '{}' declares parameter '?{}' twice",
                    schema.name, p.name
                ),
            );
        }
        seen.push(p.name.as_str());
    }
    for (atoms, part) in [
        (&schema.pre, "precondition"),
        (&schema.add, "effect"),
        (&schema.del, "effect"),
    ] {
        for atom in atoms {
            for arg in &atom.args {
                if let Some(var) = arg.strip_prefix('?') {
                    if !seen.contains(&var) {
                        return err(
                            1,
                            1,
                            format!(
                                "action '{}' uses undeclared variable '{}' in its {}",
                                schema.name, arg, part
                            ),
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn parse_domain(text: &str) -> Result<DomainAst, ParseError> {
    let top = read_single(text)?;
    let (tl, tc) = top.pos();
    let items = match top.as_list() {
        Some(items) => items,
        None => return err(tl, tc, "expected '(define (domain ...) ...)'"),
    };
    if items.first().and_then(SExpr::as_sym) != Some("define") {
        return err(tl, tc, "expected '(define ...)'");
    }
    let head = items.get(1).and_then(SExpr::as_list);
    let name = match head {
        Some([kw, name_expr]) if kw.as_sym() == Some("domain") => check_name(name_expr, "domain")?,
        _ => return err(tl, tc, "expected '(domain <name>)' after 'define'"),
    };
    let mut requirements = Vec::new();
    let mut types = Vec::new();
    let mut predicates = Vec::new();
    let mut schemas: Vec<SchemaAst> = Vec::new();
    for section in &items[2..] {
        let (sl, sc) = section.pos();
        let parts = match section.as_list() {
            Some(parts) if !parts.is_empty() => parts,
            _ => return err(sl, sc, "expected a domain section"),
        };
        match parts[0].as_sym() {
            Some(":requirements") => requirements = check_requirements(&parts[1..])?,
            Some(":types") => types = parse_typed_list(&parts[1..], false, "type")?,
            Some(":constants") => {
                return err(sl, sc, "':constants' is outside the STRIPS subset")
            }
            Some(":predicates") => {
                for decl in &parts[1..] {
                    let (dl, dc) = decl.pos();
                    let d = match decl.as_list() {
                        Some(d) if !d.is_empty() => d,
                        _ => return err(dl, dc, "expected a predicate declaration"),
                    };
                    let pname = check_name(&d[0], "predicate")?;
                    if predicates.iter().any(|p: &PredicateDecl| p.name == pname) {
                        return err(dl, dc, format!("predicate '{pname}' declared twice"));
                    }
                    let params = parse_typed_list(&d[1..], true, "parameter")?;
                    predicates.push(PredicateDecl {
                        name: pname,
                        params,
                    });
                }
            }
            Some(":action") => {
                let schema = parse_schema(parts, sl, sc)?;
                check_schema_vars(&schema)?;
                if schemas.iter().any(|s| s.name == schema.name) {
                    return err(sl, sc, format!("action '{}' declared twice", schema.name));
                }
                schemas.push(schema);
            }
            Some(other) => return err(sl, sc, format!("unknown domain section '{other}'")),
            None => return err(sl, sc, "expected a domain section keyword"),
        }
    }
    // Every predicate used anywhere must be declared with a matching arity.
    let arity = |pred: &str| -> Option<usize> {
        predicates
            .iter()
            .find(|p| p.name == pred)
            .map(|p| p.params.len())
    };
    for schema in &schemas {
        for atom in schema.pre.iter().chain(&schema.add).chain(&schema.del) {
            match arity(&atom.pred) {
                None => {
                    return err(
                        1,
                        1,
                        format!(
                            "action '{}' uses undeclared predicate '{}'",
                            schema.name, atom.pred
                        ),
                    )
                }
                Some(n) if n != atom.args.len() => {
                    return err(
                        1,
                        1,
                        format!(
                            "predicate '{}' takes {} argument(s), got {}",
                            atom.pred,
                            n,
                            atom.args.len()
                        ),
                    )
                }
                Some(_) => {}
            }
        }
    }
    Ok(DomainAst {
        name,
        requirements,
        types,
        predicates,
        schemas,
    })
}

pub fn parse_problem(text: &str) -> Result<ProblemAst, ParseError> {
    let top = read_single(text)?;
    let (tl, tc) = top.pos();
    let items = match top.as_list() {
        Some(items) => items,
        None => return err(tl, tc, "expected '(define (problem ...) ...)'"),
    };
    if items.first().and_then(SExpr::as_sym) != Some("define") {
        return err(tl, tc, "expected '(define ...)'");
    }
    let head = items.get(1).and_then(SExpr::as_list);
    let name = match head {
        Some([kw, name_expr]) if kw.as_sym() == Some("problem") => {
            check_name(name_expr, "problem")?
        }
        _ => return err(tl, tc, "expected '(problem <name>)' after 'define'"),
    };
    let mut domain = None;
    let mut objects = Vec::new();
    let mut init = Vec::new();
    let mut goal = None;
    for section in &items[2..] {
        let (sl, sc) = section.pos();
        let parts = match section.as_list() {
            Some(parts) if !parts.is_empty() => parts,
            _ => return err(sl, sc, "expected a problem section"),
        };
        match parts[0].as_sym() {
            Some(":domain") => {
                domain = Some(match parts.get(1) {
                    Some(e) => check_name(e, "domain")?,
                    None => return err(sl, sc, "':domain' needs a name"),
                });
            }
            Some(":requirements") => {
                check_requirements(&parts[1..])?;
            }
            Some(":objects") => objects = parse_typed_list(&parts[1..], false, "object")?,
            Some(":init") => {
                for atom in &parts[1..] {
                    init.push(parse_atom(atom, false)?);
                }
            }
            Some(":goal") => {
                let value = match parts.get(1) {
                    Some(v) => v,
                    None => return err(sl, sc, "':goal' needs a condition"),
                };
                goal = Some(parse_conjunction(value, false, "goal")?);
            }
            Some(other) => return err(sl, sc, format!("unknown problem section '{other}'")),
            None => return err(sl, sc, "expected a problem section keyword"),
        }
    }
    let domain = match domain {
        Some(d) => d,
        None => return err(tl, tc, "problem has no ':domain' section"),
    };
    let goal = match goal {
        Some(g) => g,
        None => return err(tl, tc, "problem has no ':goal' section"),
    };
    // Object references in init and goal must resolve.
    for atom in init.iter().chain(&goal) {
        for arg in &atom.args {
            if !objects.iter().any(|o| &o.name == arg) {
                return err(1, 1, format!("unknown object '{arg}'"));
            }
        }
    }
    Ok(ProblemAst {
        name,
        domain,
        objects,
        init,
        goal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY_DOMAIN: &str = "\
(define (domain tiny)
  (:requirements :strips :typing)
  (:types truck location - object)
  (:predicates (at ?t - truck ?l - location)
               (road ?a - location ?b - location))
  (:action drive
    :parameters (?t - truck ?from - location ?to - location)
    :precondition (and (at ?t ?from) (road ?from ?to))
    :effect (and (at ?t ?to) (not (at ?t ?from)))))";

    const TINY_PROBLEM: &str = "\
(define (problem tiny-1)
  (:domain tiny)
  (:objects t1 - truck a b - location)
  (:init (at t1 a) (road a b))
  (:goal (at t1 b)))";

    #[test]
    fn parses_domain_sections() {
        let dom = parse_domain(TINY_DOMAIN).unwrap();
        assert_eq!(dom.name, "tiny");
        assert_eq!(dom.requirements, vec![":strips", ":typing"]);
        assert_eq!(dom.types.len(), 2);
        assert_eq!(dom.predicates.len(), 2);
        assert_eq!(dom.schemas.len(), 1);
        let drive = &dom.schemas[0];
        assert_eq!(drive.params.len(), 3);
        assert_eq!(drive.pre.len(), 2);
        assert_eq!(drive.add.len(), 1);
        assert_eq!(drive.del.len(), 1);
        assert_eq!(drive.del[0].args, vec!["?t", "?from"]);
    }

    #[test]
    fn parses_problem_sections() {
        let prob = parse_problem(TINY_PROBLEM).unwrap();
        assert_eq!(prob.name, "tiny-1");
        assert_eq!(prob.domain, "tiny");
        assert_eq!(prob.objects.len(), 3);
        assert_eq!(prob.objects[0].ty, "truck");
        assert_eq!(prob.objects[2].ty, "location");
        assert_eq!(prob.init.len(), 2);
        assert_eq!(prob.goal.len(), 1);
    }

    #[test]
    fn rejects_requirements_outside_subset() {
        let text = TINY_DOMAIN.replace(":strips :typing", ":adl");
        let e = parse_domain(&text).unwrap_err();
        assert!(e.msg.contains("':adl' is outside the STRIPS subset"), "{e}");
    }

    #[test]
    fn rejects_constants() {
        let text = TINY_DOMAIN.replace(
            "(:types truck location - object)",
            "(:types truck location - object) (:constants home - location)",
        );
        let e = parse_domain(&text).unwrap_err();
        assert!(e.msg.contains(":constants"), "{e}");
    }

    #[test]
    fn rejects_undeclared_variable() {
        let text = TINY_DOMAIN.replace("(road ?from ?to)", "(road ?from ?elsewhere)");
        let e = parse_domain(&text).unwrap_err();
        assert!(e.msg.contains("undeclared variable '?elsewhere'"), "{e}");
    }

    #[test]
    fn rejects_negated_precondition() {
        let text = TINY_DOMAIN.replace("(road ?from ?to)", "(not (road ?to ?from))");
        let e = parse_domain(&text).unwrap_err();
        assert!(e.msg.contains("negation is not allowed"), "{e}");
    }

    #[test]
    fn accepts_ground_constants_in_schema_bodies() {
        let text = TINY_DOMAIN.replace("(road ?from ?to)", "(road ?from depot)");
        let dom = parse_domain(&text).unwrap();
        assert_eq!(dom.schemas[0].pre[1].args, vec!["?from", "depot"]);
    }

    #[test]
    fn rejects_variables_in_problem_files() {
        let text = TINY_PROBLEM.replace("(at t1 b)", "(at ?t b)");
        let e = parse_problem(&text).unwrap_err();
        assert!(e.msg.contains("variable '?t' is not allowed here"), "{e}");
    }

    #[test]
    fn rejects_unknown_object_in_init() {
        let text = TINY_PROBLEM.replace("(at t1 a)", "(at t2 a)");
        let e = parse_problem(&text).unwrap_err();
        assert!(e.msg.contains("unknown object 't2'"), "{e}");
    }

    #[test]
    fn rejects_arity_mismatch() {
        let text = TINY_DOMAIN.replace("(and (at ?t ?from) (road ?from ?to))", "(at ?t)");
        let e = parse_domain(&text).unwrap_err();
        assert!(e.msg.contains("takes 2 argument(s), got 1"), "{e}");
    }

    #[test]
    fn reports_positions() {
        let e = parse_domain("(define (domain x)\n  (:junk))").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }

    #[test]
    fn comments_and_case_are_normalized() {
        let text = "(define (domain T) ; a comment\n (:predicates (P ?x)) (:action GO :effect (P ?x) :parameters (?x)))";
        let dom = parse_domain(text).unwrap();
        assert_eq!(dom.name, "t");
        assert_eq!(dom.schemas[0].name, "go");
        assert_eq!(dom.predicates[0].name, "p");
    }
}

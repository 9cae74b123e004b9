//! The structure-constants text format.
//!
//! ```text
//! # comments run to the end of the line
//! hopf kz2
//! basis e g
//! mul g g = e
//! comul g = g|g
//! counit g = 1
//! antipode g = g
//! unit = e
//! end
//! context c kind=coalgebra module=swap pair=triv
//! params max_degree=4
//! ```
//!
//! Structure constants that are never mentioned are zero.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use hopf_cyclic::Scalar;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: unresolved name `{name}`")]
    UnresolvedName { line: usize, col: usize, name: String },
    #[error("line {line}: dimension mismatch: {msg}")]
    DimensionMismatch { line: usize, msg: String },
}

impl SpecError {
    pub fn line(&self) -> usize {
        match self {
            SpecError::Parse { line, .. } | SpecError::UnresolvedName { line, .. } | SpecError::DimensionMismatch { line, .. } => *line,
        }
    }
}

fn parse_err(at: Pos, msg: impl Into<String>) -> SpecError {
    SpecError::Parse {
        line: at.line,
        col: at.col,
        msg: msg.into(),
    }
}

/// A source position. Positions never take part in equality, so a printed
/// and reparsed file compares equal to the original.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub at: Pos,
}

/// `coef*l1|l2|…`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coef: Scalar,
    pub labels: Vec<Name>,
    pub at: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Basis(Vec<Name>),
    Mul { a: Name, b: Name, rhs: Vec<Term> },
    Unit(Vec<Term>),
    Comul { b: Name, rhs: Vec<Term> },
    Counit { b: Name, value: Scalar },
    Antipode { b: Name, rhs: Vec<Term> },
    Act { h: Name, a: Name, rhs: Vec<Term> },
    Coact { b: Name, rhs: Vec<Term> },
    Delta { h: Name, value: Scalar },
    Sigma(Vec<Term>),
    Span(Vec<Term>),
    Value { a: Name, value: Scalar },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub op: Op,
    pub at: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemKind {
    Hopf,
    Algebra,
    ModuleAlgebra,
    ComoduleAlgebra,
    Pair,
    SubHopf,
    Trace,
    /// A raw cocyclic-module dump.
    Complex,
    Context,
    Params,
}

impl ItemKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ItemKind::Hopf => "hopf",
            ItemKind::Algebra => "algebra",
            ItemKind::ModuleAlgebra => "module_algebra",
            ItemKind::ComoduleAlgebra => "comodule_algebra",
            ItemKind::Pair => "pair",
            ItemKind::SubHopf => "subhopf",
            ItemKind::Trace => "trace",
            ItemKind::Complex => "complex",
            ItemKind::Context => "context",
            ItemKind::Params => "params",
        }
    }

    const ALL: [ItemKind; 10] = [
        ItemKind::Hopf,
        ItemKind::Algebra,
        ItemKind::ModuleAlgebra,
        ItemKind::ComoduleAlgebra,
        ItemKind::Pair,
        ItemKind::SubHopf,
        ItemKind::Trace,
        ItemKind::Complex,
        ItemKind::Context,
        ItemKind::Params,
    ];

    fn from_keyword(s: &str) -> Option<ItemKind> {
        ItemKind::ALL.into_iter().find(|k| k.keyword() == s)
    }

    /// Single-line items have no body and no `end`.
    pub fn is_single_line(self) -> bool {
        matches!(self, ItemKind::Context | ItemKind::Params)
    }

    /// Which attributes the header accepts, and which of them are required.
    fn attributes(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            ItemKind::ModuleAlgebra | ItemKind::ComoduleAlgebra => (&["hopf", "algebra"], &["hopf", "algebra"]),
            ItemKind::Pair | ItemKind::SubHopf => (&["hopf"], &["hopf"]),
            ItemKind::Trace => (&["algebra"], &["algebra"]),
            ItemKind::Context => (&["kind", "module", "pair", "sub", "comodule", "trace"], &["kind", "module", "pair"]),
            ItemKind::Params => (&["max_degree", "cup_degree", "tasks"], &[]),
            _ => (&[], &[]),
        }
    }

    fn statements(self) -> &'static [&'static str] {
        match self {
            ItemKind::Hopf => &["basis", "mul", "unit", "comul", "counit", "antipode"],
            ItemKind::Algebra => &["basis", "mul", "unit"],
            ItemKind::ModuleAlgebra => &["act"],
            ItemKind::ComoduleAlgebra => &["coact"],
            ItemKind::Pair => &["delta", "sigma"],
            ItemKind::SubHopf => &["span"],
            ItemKind::Trace => &["value"],
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub kind: ItemKind,
    /// Empty for `params`.
    pub name: String,
    pub attrs: Vec<(String, Name)>,
    pub body: Vec<Statement>,
    /// Verbatim body of a `complex` item.
    pub raw: Vec<String>,
    pub at: Pos,
}

impl Item {
    pub fn attr(&self, key: &str) -> Option<&Name> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecFile {
    pub items: Vec<Item>,
}

impl SpecFile {
    pub fn items_of(&self, kind: ItemKind) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(move |i| i.kind == kind)
    }

    pub fn find(&self, kind: ItemKind, name: &str) -> Option<&Item> {
        self.items_of(kind).find(|i| i.name == name)
    }

    pub fn params(&self) -> Option<&Item> {
        self.items_of(ItemKind::Params).next()
    }

    pub fn param_usize(&self, key: &str) -> Option<usize> {
        self.params().and_then(|p| p.attr(key)).and_then(|v| v.text.parse().ok())
    }

    pub fn tasks(&self) -> Vec<String> {
        self.params()
            .and_then(|p| p.attr("tasks"))
            .map(|v| v.text.split(',').map(str::to_string).collect())
            .unwrap_or_default()
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str, lineno: usize) -> Vec<(Pos, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                let col = line[..s].chars().count() + 1;
                out.push((Pos { line: lineno, col }, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '\''))
}

fn name(tok: (Pos, &str)) -> Result<Name, SpecError> {
    if !is_identifier(tok.1) {
        return Err(parse_err(tok.0, format!("`{}` is not a valid name", tok.1)));
    }
    Ok(Name {
        text: tok.1.to_string(),
        at: tok.0,
    })
}

fn unsigned_scalar(text: &str, at: Pos) -> Result<Scalar, SpecError> {
    if text.starts_with(['+', '-']) {
        return Err(parse_err(at, format!("unexpected sign in `{text}`")));
    }
    Scalar::from_str(text).map_err(|_| parse_err(at, format!("`{text}` is not a rational number")))
}

/// A single signed rational.
fn signed_scalar(text: &str, at: Pos) -> Result<Scalar, SpecError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(parse_err(at, "expected a rational number"));
    }
    Scalar::from_str(t).map_err(|_| parse_err(at, format!("`{t}` is not a rational number")))
}

/// `[-] term (± term)*`, or `0`.
fn parse_rhs(text: &str, at: Pos) -> Result<Vec<Term>, SpecError> {
    let t = text.trim();
    let lead = text.len() - text.trim_start().len();
    if t == "0" {
        return Ok(Vec::new());
    }
    let mut chunks: Vec<(bool, usize, &str)> = Vec::new();
    let mut negative = false;
    let mut begin = 0;
    for (i, ch) in t.char_indices() {
        if ch == '+' || ch == '-' {
            let piece = &t[begin..i];
            if !(chunks.is_empty() && piece.trim().is_empty() && begin == 0) {
                chunks.push((negative, begin, piece));
            }
            negative = ch == '-';
            begin = i + 1;
        }
    }
    chunks.push((negative, begin, &t[begin..]));
    let mut out = Vec::new();
    for (neg, off, piece) in chunks {
        let col = at.col + text[..lead].chars().count() + t[..off].chars().count() + (piece.len() - piece.trim_start().len());
        let here = Pos { line: at.line, col };
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(parse_err(here, "empty term"));
        }
        let (coef, labels) = match piece.split_once('*') {
            Some((c, l)) => (unsigned_scalar(c.trim(), here)?, l.trim()),
            None => (Scalar::one(), piece),
        };
        if coef.is_zero() {
            return Err(parse_err(here, "zero coefficient"));
        }
        let mut names = Vec::new();
        for l in labels.split('|') {
            let l = l.trim();
            names.push(name((here, l))?);
        }
        out.push(Term {
            coef: if neg { -coef } else { coef },
            labels: names,
            at: here,
        });
    }
    Ok(out)
}

type Sides<'a> = (Vec<(Pos, &'a str)>, &'a str, Pos);

/// Splits `lhs = rhs`, returning the left tokens and the right text with its position.
fn split_eq(line: &str, lineno: usize, at: Pos) -> Result<Sides<'_>, SpecError> {
    let i = line.find('=').ok_or_else(|| parse_err(at, "expected `=`"))?;
    let lhs = tokens(&line[..i], lineno);
    let col = line[..=i].chars().count() + 1;
    Ok((lhs, &line[i + 1..], Pos { line: lineno, col }))
}

fn parse_statement(kind: ItemKind, line: &str, lineno: usize) -> Result<Statement, SpecError> {
    let toks = tokens(line, lineno);
    let (at, kw) = toks[0];
    if !kind.statements().contains(&kw) {
        return Err(parse_err(at, format!("`{kw}` is not allowed in a {} block", kind.keyword())));
    }
    if kw == "basis" {
        let names = toks[1..].iter().map(|&t| name(t)).collect::<Result<Vec<_>, _>>()?;
        if names.is_empty() {
            return Err(parse_err(at, "empty basis"));
        }
        return Ok(Statement { op: Op::Basis(names), at });
    }
    let (lhs, rhs, rat) = split_eq(line, lineno, at)?;
    let args = &lhs[1..];
    let want = match kw {
        "mul" | "act" => 2,
        "unit" | "sigma" | "span" => 0,
        _ => 1,
    };
    if args.len() != want {
        let p = args.get(want).map(|t| t.0).unwrap_or(at);
        return Err(parse_err(p, format!("`{kw}` takes {want} argument(s) before `=`")));
    }
    let arg = |k: usize| name(args[k]);
    let op = match kw {
        "mul" => Op::Mul {
            a: arg(0)?,
            b: arg(1)?,
            rhs: parse_rhs(rhs, rat)?,
        },
        "act" => Op::Act {
            h: arg(0)?,
            a: arg(1)?,
            rhs: parse_rhs(rhs, rat)?,
        },
        "unit" => Op::Unit(parse_rhs(rhs, rat)?),
        "sigma" => Op::Sigma(parse_rhs(rhs, rat)?),
        "span" => Op::Span(parse_rhs(rhs, rat)?),
        "comul" => Op::Comul {
            b: arg(0)?,
            rhs: parse_rhs(rhs, rat)?,
        },
        "antipode" => Op::Antipode {
            b: arg(0)?,
            rhs: parse_rhs(rhs, rat)?,
        },
        "coact" => Op::Coact {
            b: arg(0)?,
            rhs: parse_rhs(rhs, rat)?,
        },
        "counit" => Op::Counit {
            b: arg(0)?,
            value: signed_scalar(rhs, rat)?,
        },
        "delta" => Op::Delta {
            h: arg(0)?,
            value: signed_scalar(rhs, rat)?,
        },
        "value" => Op::Value {
            a: arg(0)?,
            value: signed_scalar(rhs, rat)?,
        },
        _ => unreachable!("statement keywords are listed per kind"),
    };
    Ok(Statement { op, at })
}

fn parse_header(kind: ItemKind, toks: &[(Pos, &str)]) -> Result<(String, Vec<(String, Name)>), SpecError> {
    let (at, _) = toks[0];
    let mut rest = &toks[1..];
    let item_name = if kind == ItemKind::Params {
        String::new()
    } else {
        let t = rest.first().ok_or_else(|| parse_err(at, format!("`{}` needs a name", kind.keyword())))?;
        if t.1.contains('=') {
            return Err(parse_err(t.0, format!("`{}` needs a name", kind.keyword())));
        }
        rest = &rest[1..];
        name(*t)?.text
    };
    let (allowed, required) = kind.attributes();
    let mut attrs: Vec<(String, Name)> = Vec::new();
    for &(p, t) in rest {
        let (k, v) = t.split_once('=').ok_or_else(|| parse_err(p, format!("expected key=value, got `{t}`")))?;
        if !allowed.contains(&k) {
            return Err(parse_err(p, format!("unknown attribute `{k}` for {}", kind.keyword())));
        }
        if attrs.iter().any(|(x, _)| x == k) {
            return Err(parse_err(p, format!("attribute `{k}` given twice")));
        }
        let vcol = p.col + k.chars().count() + 1;
        let value = Name {
            text: v.to_string(),
            at: Pos { line: p.line, col: vcol },
        };
        if value.text.is_empty() {
            return Err(parse_err(value.at, format!("empty value for `{k}`")));
        }
        attrs.push((k.to_string(), value));
    }
    for r in required {
        if !attrs.iter().any(|(k, _)| k == r) {
            return Err(parse_err(at, format!("{} `{item_name}` needs `{r}=`", kind.keyword())));
        }
    }
    Ok((item_name, attrs))
}

/// Parses and fully checks a spec: syntax, names, and dimensions.
pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    let spec = parse_syntax(text)?;
    crate::model::Model::resolve(&spec)?;
    Ok(spec)
}

/// Syntax only; names are not resolved.
pub fn parse_syntax(text: &str) -> Result<SpecFile, SpecError> {
    let mut items: Vec<Item> = Vec::new();
    let mut open: Option<Item> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        if let Some(item) = open.as_mut().filter(|it| it.kind == ItemKind::Complex) {
            if raw.trim() == "end" {
                items.push(open.take().expect("open item"));
            } else if !raw.trim().is_empty() {
                item.raw.push(raw.trim().to_string());
            }
            continue;
        }
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line, lineno);
        let Some(&(at, first)) = toks.first() else { continue };
        if let Some(item) = open.as_mut() {
            if first == "end" {
                if toks.len() > 1 {
                    return Err(parse_err(toks[1].0, "unexpected text after `end`"));
                }
                items.push(open.take().expect("open item"));
            } else {
                let st = parse_statement(item.kind, line, lineno)?;
                item.body.push(st);
            }
            continue;
        }
        let kind = ItemKind::from_keyword(first).ok_or_else(|| parse_err(at, format!("unknown item `{first}`")))?;
        let (item_name, attrs) = parse_header(kind, &toks)?;
        let clash = items.iter().any(|it| it.kind == kind && it.name == item_name)
            || (kind == ItemKind::Params && items.iter().any(|it| it.kind == ItemKind::Params));
        if clash {
            return Err(parse_err(at, format!("duplicate {} `{item_name}`", kind.keyword())));
        }
        let item = Item {
            kind,
            name: item_name,
            attrs,
            body: Vec::new(),
            raw: Vec::new(),
            at,
        };
        if kind.is_single_line() {
            items.push(item);
        } else {
            open = Some(item);
        }
    }
    if let Some(item) = open {
        return Err(parse_err(item.at, format!("{} `{}` is missing `end`", item.kind.keyword(), item.name)));
    }
    Ok(SpecFile { items })
}

fn write_terms(out: &mut String, terms: &[Term]) {
    if terms.is_empty() {
        out.push('0');
        return;
    }
    for (k, t) in terms.iter().enumerate() {
        let neg = t.coef.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let c = if neg { -t.coef.clone() } else { t.coef.clone() };
        let labels: Vec<&str> = t.labels.iter().map(|l| l.text.as_str()).collect();
        // a lone label `0` would read back as the zero vector
        if !c.is_one() || labels == ["0"] {
            let _ = write!(out, "{c}*");
        }
        out.push_str(&labels.join("|"));
    }
}

fn write_statement(out: &mut String, st: &Statement) {
    let rhs = |out: &mut String, head: String, terms: &[Term]| {
        out.push_str(&head);
        out.push_str(" = ");
        write_terms(out, terms);
    };
    match &st.op {
        Op::Basis(names) => {
            let labels: Vec<&str> = names.iter().map(|n| n.text.as_str()).collect();
            let _ = write!(out, "basis {}", labels.join(" "));
        }
        Op::Mul { a, b, rhs: r } => rhs(out, format!("mul {} {}", a.text, b.text), r),
        Op::Act { h, a, rhs: r } => rhs(out, format!("act {} {}", h.text, a.text), r),
        Op::Unit(r) => rhs(out, "unit".into(), r),
        Op::Sigma(r) => rhs(out, "sigma".into(), r),
        Op::Span(r) => rhs(out, "span".into(), r),
        Op::Comul { b, rhs: r } => rhs(out, format!("comul {}", b.text), r),
        Op::Antipode { b, rhs: r } => rhs(out, format!("antipode {}", b.text), r),
        Op::Coact { b, rhs: r } => rhs(out, format!("coact {}", b.text), r),
        Op::Counit { b, value } => {
            let _ = write!(out, "counit {} = {value}", b.text);
        }
        Op::Delta { h, value } => {
            let _ = write!(out, "delta {} = {value}", h.text);
        }
        Op::Value { a, value } => {
            let _ = write!(out, "value {} = {value}", a.text);
        }
    }
    out.push('\n');
}

/// Canonical text of a spec; `parse_syntax(print_spec(s)) == s`.
pub fn print_spec(spec: &SpecFile) -> String {
    let mut out = String::new();
    for (k, item) in spec.items.iter().enumerate() {
        if k > 0 && !(item.kind.is_single_line() && spec.items[k - 1].kind.is_single_line()) {
            out.push('\n');
        }
        out.push_str(item.kind.keyword());
        if !item.name.is_empty() {
            let _ = write!(out, " {}", item.name);
        }
        for (key, v) in &item.attrs {
            let _ = write!(out, " {key}={}", v.text);
        }
        out.push('\n');
        if item.kind.is_single_line() {
            continue;
        }
        for st in &item.body {
            write_statement(&mut out, st);
        }
        for l in &item.raw {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_spec(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_terms_with_signs_and_coefficients() {
        let t = parse_rhs(" x - 3/2*y|z + 2*w", Pos { line: 1, col: 5 }).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[1].coef, Scalar::from_frac(-3, 2));
        assert_eq!(t[1].labels.len(), 2);
        assert_eq!(t[2].at.col, 20);
        let t = parse_rhs("-x", Pos::default()).unwrap();
        assert_eq!(t[0].coef, Scalar::from_int(-1));
        assert!(parse_rhs("0", Pos::default()).unwrap().is_empty());
    }

    #[test]
    fn rhs_errors_point_at_the_term() {
        let e = parse_rhs(" x + ", Pos { line: 3, col: 10 }).unwrap_err();
        assert!(matches!(e, SpecError::Parse { line: 3, .. }), "{e}");
        assert!(parse_rhs("x ++ y", Pos::default()).is_err());
        assert!(parse_rhs("0*x", Pos::default()).is_err());
        assert!(parse_rhs("1/0*x", Pos::default()).is_err());
    }

    #[test]
    fn printing_normalizes_signs() {
        let spec = parse_syntax("algebra a\nbasis x y\nmul x x = -x + -1*y\nunit = x\nend\n");
        // `+ -1*y` puts a sign after a sign
        assert!(spec.is_err());
        let spec = parse_syntax("algebra a\nbasis x y\nmul x x = -x - 1*y + 2/4*x\nunit = x\nend\n").unwrap();
        let text = print_spec(&spec);
        assert!(text.contains("mul x x = -x - y + 1/2*x"), "{text}");
        assert_eq!(parse_syntax(&text).unwrap(), spec);
    }

    #[test]
    fn headers_are_checked() {
        assert!(matches!(parse_syntax("pair p\nend\n"), Err(SpecError::Parse { line: 1, .. })));
        assert!(parse_syntax("hopf h\nbasis e\n").is_err());
        assert!(parse_syntax("widget w\n").is_err());
        assert!(parse_syntax("hopf h\nact e e = e\nend\n").is_err());
        assert!(parse_syntax("hopf h\nend\nhopf h\nend\n").is_err());
        let ok = parse_syntax("context c kind=coalgebra module=m pair=p\nparams max_degree=3 tasks=validate,identities\n").unwrap();
        assert_eq!(ok.param_usize("max_degree"), Some(3));
        assert_eq!(ok.tasks(), vec!["validate", "identities"]);
    }

    #[test]
    fn complex_bodies_are_kept_verbatim() {
        let text = "complex c\ncocyclic 1\nname x # not a comment\nend\n";
        let spec = parse_syntax(text).unwrap();
        assert_eq!(spec.items[0].raw, vec!["cocyclic 1", "name x # not a comment"]);
        assert_eq!(print_spec(&spec), text);
    }
}

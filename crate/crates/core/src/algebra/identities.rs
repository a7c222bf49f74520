//! Linear identity systems: parsing, classification and a small library.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::table::Operation;
use crate::structures::{power, tuple_at};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("symbol `{symbol}` used with arities {first} and {second}")]
    InconsistentArity {
        symbol: String,
        first: usize,
        second: usize,
    },
    #[error("symbol `{0}` is declared idempotent but never used")]
    UnusedIdempotent(String),
}

/// One side of a linear identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App { symbol: String, args: Vec<String> },
}

impl Term {
    pub fn variables(&self) -> Vec<&str> {
        match self {
            Term::Var(v) => vec![v.as_str()],
            Term::App { args, .. } => args.iter().map(String::as_str).collect(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App { symbol, args } => write!(f, "{symbol}({})", args.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    /// Distinct variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for v in self.lhs.variables().into_iter().chain(self.rhs.variables()) {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        }
        out
    }

    pub fn is_balanced(&self) -> bool {
        let mut l: Vec<&str> = self.lhs.variables();
        let mut r: Vec<&str> = self.rhs.variables();
        l.sort_unstable();
        l.dedup();
        r.sort_unstable();
        r.dedup();
        l == r
    }

    pub fn variable_count(&self) -> usize {
        self.variables().len()
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// A set of linear identities over named operation symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdentitySystem {
    symbols: Vec<(String, usize)>,
    identities: Vec<Identity>,
    idempotent: Vec<String>,
    externally_sourced: bool,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn parse_term(text: &str, line: usize) -> Result<Term, IdentityError> {
    let text = text.trim();
    let syntax = |message: String| IdentityError::Syntax { line, message };
    match text.find('(') {
        None => {
            if is_ident(text) {
                Ok(Term::Var(text.to_string()))
            } else {
                Err(syntax(format!("`{text}` is not a variable")))
            }
        }
        Some(open) => {
            let symbol = text[..open].trim();
            if !is_ident(symbol) {
                return Err(syntax(format!("`{symbol}` is not an operation symbol")));
            }
            let inner = text[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| syntax(format!("missing `)` in `{text}`")))?;
            if inner.contains('(') || inner.contains(')') {
                return Err(syntax(format!("`{text}` is not a linear term")));
            }
            let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
            if let Some(bad) = args.iter().find(|a| !is_ident(a)) {
                return Err(syntax(format!("`{bad}` is not a variable")));
            }
            Ok(Term::App {
                symbol: symbol.to_string(),
                args,
            })
        }
    }
}

impl IdentitySystem {
    /// Parses lines `f(x,y,y) = x` and `idempotent f`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, IdentityError> {
        let mut system = IdentitySystem::default();
        let mut idempotent = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("idempotent ") {
                for sym in rest.split([',', ' ']).filter(|s| !s.is_empty()) {
                    if !is_ident(sym) {
                        return Err(IdentityError::Syntax {
                            line,
                            message: format!("`{sym}` is not an operation symbol"),
                        });
                    }
                    idempotent.push(sym.to_string());
                }
                continue;
            }
            let (l, r) = content
                .split_once('=')
                .or_else(|| content.split_once('≈'))
                .ok_or_else(|| IdentityError::Syntax {
                    line,
                    message: "expected `lhs = rhs`".into(),
                })?;
            let identity = Identity {
                lhs: parse_term(l, line)?,
                rhs: parse_term(r, line)?,
            };
            system.push(identity)?;
        }
        for sym in idempotent {
            system.mark_idempotent(&sym)?;
        }
        Ok(system)
    }

    pub fn push(&mut self, identity: Identity) -> Result<(), IdentityError> {
        for term in [&identity.lhs, &identity.rhs] {
            if let Term::App { symbol, args } = term {
                self.declare(symbol, args.len())?;
            }
        }
        self.identities.push(identity);
        Ok(())
    }

    /// Registers a symbol without identities mentioning it.
    pub fn declare(&mut self, symbol: &str, arity: usize) -> Result<(), IdentityError> {
        match self.symbols.iter().find(|(s, _)| s == symbol) {
            Some(&(_, a)) if a != arity => Err(IdentityError::InconsistentArity {
                symbol: symbol.to_string(),
                first: a,
                second: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.symbols.push((symbol.to_string(), arity));
                Ok(())
            }
        }
    }

    pub fn mark_idempotent(&mut self, symbol: &str) -> Result<(), IdentityError> {
        if self.arity(symbol).is_none() {
            return Err(IdentityError::UnusedIdempotent(symbol.to_string()));
        }
        if !self.idempotent.iter().any(|s| s == symbol) {
            self.idempotent.push(symbol.to_string());
        }
        Ok(())
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|&(_, a)| a)
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    pub fn is_marked_idempotent(&self, symbol: &str) -> bool {
        self.idempotent.iter().any(|s| s == symbol)
    }

    /// Every symbol carries the idempotency marker.
    pub fn is_idempotent(&self) -> bool {
        self.symbols
            .iter()
            .all(|(s, _)| self.is_marked_idempotent(s))
    }

    pub fn is_balanced(&self) -> bool {
        self.identities.iter().all(Identity::is_balanced)
    }

    pub fn is_externally_sourced(&self) -> bool {
        self.externally_sourced
    }

    /// The identities including one `f(x,..,x) = x` per idempotent symbol.
    pub fn expanded_identities(&self) -> Vec<Identity> {
        let mut out = self.identities.clone();
        for sym in &self.idempotent {
            let arity = self.arity(sym).expect("marked symbols are declared");
            out.push(Identity {
                lhs: Term::App {
                    symbol: sym.clone(),
                    args: vec!["x".into(); arity],
                },
                rhs: Term::Var("x".into()),
            });
        }
        out
    }

    /// Restriction to identities mentioning only `symbol`.
    pub fn restricted_to(&self, symbol: &str) -> IdentitySystem {
        let mentions_only = |t: &Term| match t {
            Term::Var(_) => true,
            Term::App { symbol: s, .. } => s == symbol,
        };
        let mut out = IdentitySystem::default();
        if let Some(arity) = self.arity(symbol) {
            out.symbols.push((symbol.to_string(), arity));
        }
        out.identities = self
            .identities
            .iter()
            .filter(|i| mentions_only(&i.lhs) && mentions_only(&i.rhs))
            .cloned()
            .collect();
        if self.is_marked_idempotent(symbol) {
            out.idempotent.push(symbol.to_string());
        }
        out.externally_sourced = self.externally_sourced;
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in &self.identities {
            out.push_str(&i.to_string());
            out.push('\n');
        }
        if !self.idempotent.is_empty() {
            out.push_str("idempotent ");
            out.push_str(&self.idempotent.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_library(text: &str) -> IdentitySystem {
    IdentitySystem::parse(text).expect("library identities are well formed")
}

pub fn majority() -> IdentitySystem {
    parse_library("m(x,x,y) = x\nm(x,y,x) = x\nm(y,x,x) = x\nidempotent m\n")
}

pub fn maltsev() -> IdentitySystem {
    parse_library("p(y,x,x) = y\np(x,x,y) = y\nidempotent p\n")
}

pub fn three_permutability() -> IdentitySystem {
    parse_library("p1(x,y,y) = x\np2(x,x,y) = y\np1(x,x,y) = p2(x,y,y)\nidempotent p1 p2\n")
}

/// Binary totally symmetric idempotent operation.
pub fn binary_tsi() -> IdentitySystem {
    parse_library("f(x,y) = f(y,x)\nidempotent f\n")
}

fn with_odd_one(m: usize, odd: usize) -> String {
    let args: Vec<&str> = (0..m).map(|i| if i == odd { "y" } else { "x" }).collect();
    args.join(",")
}

/// m-ary weak near-unanimity identities.
pub fn wnu(m: usize) -> IdentitySystem {
    assert!(m >= 2, "WNU arity must be at least 2");
    let mut text = String::new();
    for odd in (1..m).rev() {
        text.push_str(&format!(
            "w({}) = w({})\n",
            with_odd_one(m, odd),
            with_odd_one(m, odd - 1)
        ));
    }
    text.push_str("idempotent w\n");
    parse_library(&text)
}

/// m-ary near-unanimity identities.
pub fn near_unanimity(m: usize) -> IdentitySystem {
    assert!(m >= 3, "near-unanimity arity must be at least 3");
    let mut text = String::new();
    for odd in 0..m {
        text.push_str(&format!("n({}) = x\n", with_odd_one(m, odd)));
    }
    text.push_str("idempotent n\n");
    parse_library(&text)
}

/// (k+1)-ary edge identities. Taken from the few-subpowers literature, not from
/// this crate's own derivations.
pub fn edge(k: usize) -> IdentitySystem {
    assert!(k >= 2, "edge terms need k >= 2");
    let m = k + 1;
    let mut rows: Vec<Vec<&str>> = Vec::new();
    let mut first = vec!["x"; m];
    first[0] = "y";
    first[1] = "y";
    rows.push(first);
    let mut second = vec!["x"; m];
    second[0] = "y";
    second[2] = "y";
    rows.push(second);
    for i in 3..m {
        let mut row = vec!["x"; m];
        row[i] = "y";
        rows.push(row);
    }
    let mut text = String::new();
    for row in rows {
        text.push_str(&format!("e({}) = x\n", row.join(",")));
    }
    text.push_str("idempotent e\n");
    let mut system = parse_library(&text);
    system.externally_sourced = true;
    system
}

/// Looks up a library system by name (`majority`, `maltsev`, `3perm`, `tsi2`, `wnu3`, `nu4`, `edge2`, ...).
pub fn library(name: &str) -> Option<IdentitySystem> {
    let numbered = |prefix: &str| {
        name.strip_prefix(prefix)
            .and_then(|s| s.parse::<usize>().ok())
    };
    match name {
        "majority" => Some(majority()),
        "maltsev" => Some(maltsev()),
        "3perm" | "three-permutability" => Some(three_permutability()),
        "tsi2" | "tsi" => Some(binary_tsi()),
        _ => {
            if let Some(m) = numbered("wnu").filter(|&m| m >= 2) {
                Some(wnu(m))
            } else if let Some(m) = numbered("nu").filter(|&m| m >= 3) {
                Some(near_unanimity(m))
            } else {
                numbered("edge").filter(|&k| k >= 2).map(edge)
            }
        }
    }
}

/// A failing assignment for one identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub identity: Identity,
    pub assignment: Vec<(String, usize)>,
    pub lhs_value: usize,
    pub rhs_value: usize,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let assignment: Vec<String> = self
            .assignment
            .iter()
            .map(|(v, a)| format!("{v}={a}"))
            .collect();
        write!(
            f,
            "`{}` fails at {}: {} vs {}",
            self.identity,
            assignment.join(", "),
            self.lhs_value,
            self.rhs_value
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("no interpretation for symbol `{0}`")]
    MissingSymbol(String),
    #[error("interpretation of `{symbol}` has arity {found}, expected {expected}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("{0}")]
    Fails(Box<Counterexample>),
}

fn evaluate<O: Operation>(
    term: &Term,
    vars: &[String],
    values: &[usize],
    interps: &BTreeMap<String, O>,
    args: &mut Vec<usize>,
) -> usize {
    let value_of = |name: &str| values[vars.iter().position(|v| v == name).unwrap()];
    match term {
        Term::Var(v) => value_of(v),
        Term::App {
            symbol,
            args: names,
        } => {
            args.clear();
            args.extend(names.iter().map(|n| value_of(n)));
            interps[symbol].apply(args)
        }
    }
}

/// Exhaustively checks `system` (with idempotency) over a domain of size `n`.
pub fn check_identities<O: Operation>(
    interps: &BTreeMap<String, O>,
    system: &IdentitySystem,
    n: usize,
) -> Result<(), CheckError> {
    for (symbol, arity) in system.symbols() {
        let op = interps
            .get(symbol)
            .ok_or_else(|| CheckError::MissingSymbol(symbol.clone()))?;
        if op.arity() != *arity {
            return Err(CheckError::Arity {
                symbol: symbol.clone(),
                expected: *arity,
                found: op.arity(),
            });
        }
    }
    let mut scratch = Vec::new();
    for identity in system.expanded_identities() {
        let vars = identity.variables();
        for idx in 0..power(n, vars.len()) as usize {
            let values = tuple_at(idx, n, vars.len());
            let l = evaluate(&identity.lhs, &vars, &values, interps, &mut scratch);
            let r = evaluate(&identity.rhs, &vars, &values, interps, &mut scratch);
            if l != r {
                return Err(CheckError::Fails(Box::new(Counterexample {
                    assignment: vars.iter().cloned().zip(values).collect(),
                    identity,
                    lhs_value: l,
                    rhs_value: r,
                })));
            }
        }
    }
    Ok(())
}

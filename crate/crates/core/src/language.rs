//! Relational predicate languages and many-valued first-order formulas.
//!
//! Formulas are plain ASTs over named predicates, named connectives and
//! string variables. The three lattice-ish connectives print infix:
//! `meet` as `and`, `join` as `or` and `conj` as `&` (precedence
//! `&` > `and` > `or`, all left-associative). Any other connective of the
//! algebra's signature prints as `name(φ, ...)`, nullary ones as a bare name.
//! Quantifiers `exists v. φ` / `forall v. φ` extend as far right as possible.

use alloc::{
    boxed::Box,
    collections::{BTreeMap, BTreeSet},
    format,
    string::{String, ToString},
    vec,
    vec::Vec,
};
use core::{fmt, str::FromStr};

use crate::algebra::{ConnectiveSignature, CONJ, JOIN, MEET};

/// Default ceiling on enumerated formulas.
pub const DEFAULT_ENUM_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LanguageError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("`{symbol}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(String),
    #[error("not a sentence: free variable(s) {0:?}")]
    NotASentence(Vec<String>),
    #[error("enumeration exceeds the cap of {cap} formulas")]
    BoundsTooLarge { cap: usize },
}

fn parse_err(pos: usize, msg: impl Into<String>) -> LanguageError {
    LanguageError::Parse {
        pos,
        msg: msg.into(),
    }
}

/// A relational language: predicate names with arities, sorted by name.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PredicateLanguage {
    preds: Vec<(String, usize)>,
}

impl PredicateLanguage {
    pub fn new<I, S>(preds: I) -> Result<Self, LanguageError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut preds: Vec<(String, usize)> =
            preds.into_iter().map(|(n, a)| (n.into(), a)).collect();
        preds.sort();
        for w in preds.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(LanguageError::DuplicatePredicate(w[0].0.clone()));
            }
        }
        Ok(PredicateLanguage { preds })
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.preds.binary_search_by(|(n, _)| n.as_str().cmp(name)).ok()
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index(name).map(|i| self.preds[i].1)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.preds[i].0
    }

    pub fn arity_at(&self, i: usize) -> usize {
        self.preds[i].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.preds.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn max_arity(&self) -> usize {
        self.preds.iter().map(|p| p.1).max().unwrap_or(0)
    }
}

/// Parses `R:2 P:1 T:0` (commas also accepted as separators).
impl FromStr for PredicateLanguage {
    type Err = LanguageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut preds = Vec::new();
        for item in s.split(|c: char| c.is_whitespace() || c == ',') {
            if item.is_empty() {
                continue;
            }
            let (name, arity) = item
                .split_once(':')
                .ok_or_else(|| parse_err(0, format!("expected NAME:ARITY, got `{item}`")))?;
            let arity: usize = arity
                .parse()
                .map_err(|_| parse_err(0, format!("bad arity in `{item}`")))?;
            if !is_ident(name) {
                return Err(parse_err(0, format!("bad predicate name `{name}`")));
            }
            preds.push((name.to_string(), arity));
        }
        PredicateLanguage::new(preds)
    }
}

impl fmt::Display for PredicateLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, a)) in self.preds.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{n}:{a}")?;
        }
        Ok(())
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !matches!(s, "and" | "or" | "exists" | "forall")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom {
        pred: String,
        args: Vec<String>,
    },
    Conn {
        op: String,
        args: Vec<Formula>,
    },
    Quant {
        q: Quantifier,
        var: String,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(pred: &str, args: &[&str]) -> Formula {
        Formula::Atom {
            pred: pred.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn conn(op: &str, args: Vec<Formula>) -> Formula {
        Formula::Conn {
            op: op.to_string(),
            args,
        }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::conn(MEET, vec![a, b])
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::conn(JOIN, vec![a, b])
    }

    pub fn conj(a: Formula, b: Formula) -> Formula {
        Formula::conn(CONJ, vec![a, b])
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Quant {
            q: Quantifier::Exists,
            var: var.to_string(),
            body: Box::new(body),
        }
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Quant {
            q: Quantifier::Forall,
            var: var.to_string(),
            body: Box::new(body),
        }
    }

    /// Left fold of a nonempty list with a binary connective.
    pub fn fold(op: &str, items: Vec<Formula>) -> Option<Formula> {
        let mut it = items.into_iter();
        let first = it.next()?;
        Some(it.fold(first, |acc, f| Formula::conn(op, vec![acc, f])))
    }

    /// Atoms 0; connectives 1 + sum of children; quantifiers body + 3.
    pub fn nested_rank(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Conn { args, .. } => 1 + args.iter().map(Formula::nested_rank).sum::<usize>(),
            Formula::Quant { body, .. } => body.nested_rank() + 3,
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Conn { args, .. } => args.iter().map(Formula::quantifier_depth).max().unwrap_or(0),
            Formula::Quant { body, .. } => body.quantifier_depth() + 1,
        }
    }

    pub fn connective_count(&self) -> usize {
        match self {
            Formula::Atom { .. } => 0,
            Formula::Conn { args, .. } => 1 + args.iter().map(Formula::connective_count).sum::<usize>(),
            Formula::Quant { body, .. } => body.connective_count(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { args, .. } => {
                for a in args {
                    if !bound.contains(a) {
                        out.insert(a.clone());
                    }
                }
            }
            Formula::Conn { args, .. } => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
            Formula::Quant { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn require_sentence(&self) -> Result<(), LanguageError> {
        let free = self.free_vars();
        if free.is_empty() {
            Ok(())
        } else {
            Err(LanguageError::NotASentence(free.into_iter().collect()))
        }
    }

    /// Checks predicate and connective arities.
    pub fn check(
        &self,
        lang: &PredicateLanguage,
        sig: &ConnectiveSignature,
    ) -> Result<(), LanguageError> {
        match self {
            Formula::Atom { pred, args } => match lang.arity(pred) {
                None => Err(LanguageError::UnknownSymbol(pred.clone())),
                Some(a) if a != args.len() => Err(LanguageError::ArityMismatch {
                    symbol: pred.clone(),
                    expected: a,
                    found: args.len(),
                }),
                Some(_) => Ok(()),
            },
            Formula::Conn { op, args } => {
                match sig.arity(op) {
                    None => return Err(LanguageError::UnknownSymbol(op.clone())),
                    Some(a) if a != args.len() => {
                        return Err(LanguageError::ArityMismatch {
                            symbol: op.clone(),
                            expected: a,
                            found: args.len(),
                        })
                    }
                    Some(_) => {}
                }
                args.iter().try_for_each(|a| a.check(lang, sig))
            }
            Formula::Quant { body, .. } => body.check(lang, sig),
        }
    }

    /// Distinct predicates used, with arities.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit_atoms(&mut |p, args| {
            out.insert(p.to_string(), args.len());
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&str, &[String])) {
        match self {
            Formula::Atom { pred, args } => f(pred, args),
            Formula::Conn { args, .. } => args.iter().for_each(|a| a.visit_atoms(f)),
            Formula::Quant { body, .. } => body.visit_atoms(f),
        }
    }

    /// Uses only atoms, `join`, `meet`, `conj` and `exists`.
    pub fn is_existential_positive_fragment(&self) -> bool {
        match self {
            Formula::Atom { .. } => true,
            Formula::Conn { op, args } => {
                matches!(op.as_str(), JOIN | MEET | CONJ)
                    && args.iter().all(Formula::is_existential_positive_fragment)
            }
            Formula::Quant { q, body, .. } => {
                *q == Quantifier::Exists && body.is_existential_positive_fragment()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Conn { op, args } if args.len() == 2 => match op.as_str() {
                JOIN => 1,
                MEET => 2,
                CONJ => 3,
                _ => 9,
            },
            Formula::Quant { .. } => 0,
            _ => 9,
        }
    }
}

fn infix_symbol(op: &str) -> Option<&'static str> {
    match op {
        JOIN => Some("or"),
        MEET => Some("and"),
        CONJ => Some("&"),
        _ => None,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { pred, args } => {
                f.write_str(pred)?;
                if !args.is_empty() {
                    write!(f, "({})", args.join(","))?;
                }
                Ok(())
            }
            Formula::Quant { q, var, body } => write!(f, "{} {}. {}", q.keyword(), var, body),
            Formula::Conn { op, args } => match (infix_symbol(op), args.as_slice()) {
                (Some(sym), [l, r]) => {
                    let p = self.precedence();
                    let lp = l.precedence();
                    let rp = r.precedence();
                    if lp < p {
                        write!(f, "({l})")?;
                    } else {
                        write!(f, "{l}")?;
                    }
                    write!(f, " {sym} ")?;
                    if rp <= p {
                        write!(f, "({r})")
                    } else {
                        write!(f, "{r}")
                    }
                }
                (_, []) => f.write_str(op),
                _ => {
                    write!(f, "{op}(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")
                }
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Amp,
    And,
    Or,
    Exists,
    Forall,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LanguageError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '&' => Some(Tok::Amp),
            '∧' => Some(Tok::And),
            '∨' => Some(Tok::Or),
            '∃' => Some(Tok::Exists),
            '∀' => Some(Tok::Forall),
            _ => None,
        };
        if let Some(t) = single {
            chars.next();
            out.push((pos, t));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    word.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "and" => Tok::And,
                "or" => Tok::Or,
                "exists" => Tok::Exists,
                "forall" => Tok::Forall,
                _ => Tok::Ident(word),
            };
            out.push((pos, tok));
            continue;
        }
        return Err(parse_err(pos, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    lang: &'a PredicateLanguage,
    sig: &'a ConnectiveSignature,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), LanguageError> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            Err(parse_err(self.pos(), format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<String, LanguageError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(parse_err(self.pos(), "expected identifier")),
        }
    }

    fn formula(&mut self) -> Result<Formula, LanguageError> {
        self.binary(1)
    }

    fn binary(&mut self, level: u8) -> Result<Formula, LanguageError> {
        if level > 3 {
            return self.primary();
        }
        let (tok, op) = match level {
            1 => (Tok::Or, JOIN),
            2 => (Tok::And, MEET),
            _ => (Tok::Amp, CONJ),
        };
        let mut left = self.binary(level + 1)?;
        while self.peek() == Some(&tok) {
            // A quantifier swallows everything to its right, so nothing can follow it.
            if matches!(left, Formula::Quant { .. }) && !self.last_was_paren() {
                break;
            }
            let pos = self.pos();
            self.at += 1;
            if !self.sig.contains(op) {
                return Err(LanguageError::UnknownSymbol(op.to_string()));
            }
            let right = self.binary(level + 1).map_err(|e| match e {
                LanguageError::Parse { .. } => e,
                other => other,
            })?;
            let _ = pos;
            left = Formula::conn(op, vec![left, right]);
        }
        Ok(left)
    }

    fn last_was_paren(&self) -> bool {
        self.at > 0 && self.toks[self.at - 1].1 == Tok::RParen
    }

    fn primary(&mut self) -> Result<Formula, LanguageError> {
        match self.peek().cloned() {
            Some(Tok::Exists) | Some(Tok::Forall) => {
                let q = if self.peek() == Some(&Tok::Exists) {
                    Quantifier::Exists
                } else {
                    Quantifier::Forall
                };
                self.at += 1;
                let var = self.ident()?;
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = self.formula()?;
                Ok(Formula::Quant {
                    q,
                    var,
                    body: Box::new(body),
                })
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let has_args = self.peek() == Some(&Tok::LParen);
                if let Some(arity) = self.lang.arity(&name) {
                    let mut args = Vec::new();
                    if has_args {
                        self.at += 1;
                        if self.peek() != Some(&Tok::RParen) {
                            loop {
                                args.push(self.ident()?);
                                if self.peek() == Some(&Tok::Comma) {
                                    self.at += 1;
                                } else {
                                    break;
                                }
                            }
                        }
                        self.expect(Tok::RParen, "`)` closing argument list")?;
                    }
                    if args.len() != arity {
                        return Err(LanguageError::ArityMismatch {
                            symbol: name,
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    Ok(Formula::Atom { pred: name, args })
                } else if let Some(arity) = self.sig.arity(&name) {
                    let mut args = Vec::new();
                    if has_args {
                        self.at += 1;
                        if self.peek() != Some(&Tok::RParen) {
                            loop {
                                args.push(self.formula()?);
                                if self.peek() == Some(&Tok::Comma) {
                                    self.at += 1;
                                } else {
                                    break;
                                }
                            }
                        }
                        self.expect(Tok::RParen, "`)` closing argument list")?;
                    }
                    if args.len() != arity {
                        return Err(LanguageError::ArityMismatch {
                            symbol: name,
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    Ok(Formula::Conn { op: name, args })
                } else {
                    Err(LanguageError::UnknownSymbol(name))
                }
            }
            _ => Err(parse_err(self.pos(), "expected a formula")),
        }
    }
}

/// Parses a formula against a language and connective signature.
pub fn parse_formula(
    text: &str,
    lang: &PredicateLanguage,
    sig: &ConnectiveSignature,
) -> Result<Formula, LanguageError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        lang,
        sig,
    };
    let f = p.formula()?;
    if p.at != p.toks.len() {
        return Err(parse_err(p.pos(), "trailing input"));
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Syntactic classes

/// The existential-positive sentence classes, recognized by exact shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SentenceClass {
    /// `∃x̄ ⋀ R_i(x̄_i)`
    AndPrimitive,
    /// `⋁` of ∧-primitive sentences.
    ExistentialAndPositive,
    /// `∃x̄ ⨀ R_i(x̄_i)`
    ConjPrimitive,
    /// `∃x̄ ⋀_i ⨀_j R_ij(x̄_ij)`
    PrimitivePositive,
    /// `⋁` of &-primitive sentences.
    ExistentialConjPositive,
    /// `⋁` of primitive-positive sentences.
    ExistentialPositive,
    None,
}

impl SentenceClass {
    pub const ALL: [SentenceClass; 7] = [
        SentenceClass::AndPrimitive,
        SentenceClass::ExistentialAndPositive,
        SentenceClass::ConjPrimitive,
        SentenceClass::PrimitivePositive,
        SentenceClass::ExistentialConjPositive,
        SentenceClass::ExistentialPositive,
        SentenceClass::None,
    ];

    /// ASCII tag used on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            SentenceClass::AndPrimitive => "and-primitive",
            SentenceClass::ExistentialAndPositive => "e-and-p",
            SentenceClass::ConjPrimitive => "conj-primitive",
            SentenceClass::PrimitivePositive => "primitive-positive",
            SentenceClass::ExistentialConjPositive => "e-conj-p",
            SentenceClass::ExistentialPositive => "e-p",
            SentenceClass::None => "none",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.tag() == s || c.symbol() == s)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SentenceClass::AndPrimitive => "∧-primitive",
            SentenceClass::ExistentialAndPositive => "e.∧.p",
            SentenceClass::ConjPrimitive => "&-primitive",
            SentenceClass::PrimitivePositive => "primitive-positive",
            SentenceClass::ExistentialConjPositive => "e.&.p",
            SentenceClass::ExistentialPositive => "e.p",
            SentenceClass::None => "none",
        }
    }
}

impl fmt::Display for SentenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One atom of a primitive disjunct.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AtomRef {
    pub pred: String,
    pub args: Vec<String>,
}

/// `∃vars ⋀_i ⨀_j clauses[i][j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Primitive {
    pub vars: Vec<String>,
    pub clauses: Vec<Vec<AtomRef>>,
}

impl Primitive {
    pub fn atoms(&self) -> impl Iterator<Item = &AtomRef> {
        self.clauses.iter().flatten()
    }
}

/// A sentence in the shape `⋁ Primitive`, when it has that shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositiveForm {
    pub disjuncts: Vec<Primitive>,
}

fn spine<'a>(f: &'a Formula, op: &str, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Conn { op: o, args } if o == op && args.len() == 2 => {
            spine(&args[0], op, out);
            spine(&args[1], op, out);
        }
        _ => out.push(f),
    }
}

impl PositiveForm {
    /// Reads the exact canonical shape; `None` when `f` is not in it.
    pub fn of(f: &Formula) -> Option<PositiveForm> {
        let mut tops = Vec::new();
        spine(f, JOIN, &mut tops);
        let mut disjuncts = Vec::with_capacity(tops.len());
        for d in tops {
            let mut vars = Vec::new();
            let mut matrix = d;
            while let Formula::Quant {
                q: Quantifier::Exists,
                var,
                body,
            } = matrix
            {
                vars.push(var.clone());
                matrix = body;
            }
            let mut conjuncts = Vec::new();
            spine(matrix, MEET, &mut conjuncts);
            let mut clauses = Vec::with_capacity(conjuncts.len());
            for c in conjuncts {
                let mut leaves = Vec::new();
                spine(c, CONJ, &mut leaves);
                let mut clause = Vec::with_capacity(leaves.len());
                for leaf in leaves {
                    match leaf {
                        Formula::Atom { pred, args } => clause.push(AtomRef {
                            pred: pred.clone(),
                            args: args.clone(),
                        }),
                        _ => return None,
                    }
                }
                clauses.push(clause);
            }
            disjuncts.push(Primitive { vars, clauses });
        }
        Some(PositiveForm { disjuncts })
    }

    pub fn classes(&self) -> BTreeSet<SentenceClass> {
        let single = self.disjuncts.len() == 1;
        let and_only = self
            .disjuncts
            .iter()
            .all(|d| d.clauses.iter().all(|c| c.len() == 1));
        let conj_only = self.disjuncts.iter().all(|d| d.clauses.len() == 1);
        let mut out = BTreeSet::new();
        out.insert(SentenceClass::ExistentialPositive);
        if single {
            out.insert(SentenceClass::PrimitivePositive);
        }
        if and_only {
            out.insert(SentenceClass::ExistentialAndPositive);
            if single {
                out.insert(SentenceClass::AndPrimitive);
            }
        }
        if conj_only {
            out.insert(SentenceClass::ExistentialConjPositive);
            if single {
                out.insert(SentenceClass::ConjPrimitive);
            }
        }
        out
    }
}

/// All class tags that apply to a sentence (`{None}` when none do).
pub fn classify_sentence(f: &Formula) -> Result<BTreeSet<SentenceClass>, LanguageError> {
    f.require_sentence()?;
    Ok(match PositiveForm::of(f) {
        Some(form) => form.classes(),
        None => [SentenceClass::None].into_iter().collect(),
    })
}

// ---------------------------------------------------------------------------
// Enumeration

/// Bounds for [`enumerate_sentences`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumBounds {
    pub max_qd: usize,
    /// Distinct variable names `x1..xk`; quantifiers beyond this depth rebind.
    pub max_vars: usize,
    pub max_connectives: usize,
    pub max_nested_rank: Option<usize>,
    /// Connectives to use; `None` means the whole signature.
    pub connectives: Option<Vec<String>>,
    pub class: Option<SentenceClass>,
    pub cap: usize,
}

impl EnumBounds {
    pub fn new(max_qd: usize, max_vars: usize, max_connectives: usize) -> Self {
        EnumBounds {
            max_qd,
            max_vars,
            max_connectives,
            max_nested_rank: None,
            connectives: None,
            class: None,
            cap: DEFAULT_ENUM_CAP,
        }
    }

    /// Every sentence of nested rank at most `n` (connective and depth
    /// bounds are derived from `n`).
    pub fn nested_rank(n: usize, max_vars: usize) -> Self {
        EnumBounds {
            max_qd: n / 3,
            max_vars,
            max_connectives: n,
            max_nested_rank: Some(n),
            connectives: None,
            class: None,
            cap: DEFAULT_ENUM_CAP,
        }
    }

    pub fn with_connectives<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.connectives = Some(names.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_class(mut self, class: SentenceClass) -> Self {
        self.class = Some(class);
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

pub fn var_name(i: usize) -> String {
    format!("x{i}")
}

/// All argument tuples of length `arity` over variables `x1..xk`.
fn var_tuples(k: usize, arity: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * k);
        for t in &out {
            for v in 1..=k {
                let mut t = t.clone();
                t.push(var_name(v));
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Emits every sentence within the bounds, modulo the canonical variable
/// naming `x1, x2, ...` (the quantifier at nesting depth `d` binds
/// `x{d+1}` while `d < max_vars`). `join`/`meet` children are emitted in one
/// order only. The output order is deterministic.
pub fn enumerate_sentences(
    lang: &PredicateLanguage,
    sig: &ConnectiveSignature,
    bounds: &EnumBounds,
) -> Result<Vec<Formula>, LanguageError> {
    let mut max_c = bounds.max_connectives;
    let mut max_q = bounds.max_qd;
    if let Some(nr) = bounds.max_nested_rank {
        max_c = max_c.min(nr);
        max_q = max_q.min(nr / 3);
    }
    let conns: Vec<(String, usize)> = sig
        .iter()
        .filter(|(n, _)| {
            bounds
                .connectives
                .as_ref()
                .is_none_or(|w| w.iter().any(|x| x == n))
        })
        .map(|(n, a)| (n.to_string(), a))
        .collect();
    let kmax = bounds.max_vars;
    let mut total = 0usize;
    // memo[q][c][k]: formulas with exactly c connectives, depth <= q, in context k.
    let mut memo: Vec<Vec<Vec<Vec<Formula>>>> = Vec::with_capacity(max_q + 1);
    for q in 0..=max_q {
        let mut by_c: Vec<Vec<Vec<Formula>>> = Vec::with_capacity(max_c + 1);
        for c in 0..=max_c {
            let mut by_k = Vec::with_capacity(kmax + 1);
            for k in 0..=kmax {
                let mut out = Vec::new();
                // Context k is only reached after k quantifiers.
                if k > max_q - q {
                    by_k.push(out);
                    continue;
                }
                if c == 0 {
                    for (p, a) in lang.iter() {
                        if a > 0 && k == 0 {
                            continue;
                        }
                        for args in var_tuples(k, a) {
                            out.push(Formula::Atom {
                                pred: p.to_string(),
                                args,
                            });
                        }
                    }
                } else {
                    for (name, arity) in &conns {
                        if *arity == 0 {
                            if c == 1 {
                                out.push(Formula::conn(name, Vec::new()));
                            }
                            continue;
                        }
                        let lattice = name == JOIN || name == MEET;
                        for split in compositions(c - 1, *arity) {
                            if lattice && split[0] > split[1] {
                                continue;
                            }
                            let pools: Vec<&Vec<Formula>> =
                                split.iter().map(|&ci| &by_c[ci][k]).collect();
                            let same = lattice && split[0] == split[1];
                            product(&pools, &mut |idx| {
                                if same && idx[0] >= idx[1] {
                                    return;
                                }
                                let args =
                                    idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                                out.push(Formula::conn(name, args));
                            });
                        }
                    }
                }
                if q > 0 {
                    let binders: Vec<(String, usize)> = if k < kmax {
                        vec![(var_name(k + 1), k + 1)]
                    } else {
                        (1..=kmax).map(|v| (var_name(v), k)).collect()
                    };
                    for quant in [Quantifier::Exists, Quantifier::Forall] {
                        for (v, inner_k) in &binders {
                            let inner: &Vec<Formula> = &memo[q - 1][c][*inner_k];
                            for body in inner {
                                out.push(Formula::Quant {
                                    q: quant,
                                    var: v.clone(),
                                    body: Box::new(body.clone()),
                                });
                            }
                        }
                    }
                }
                total += out.len();
                if total > bounds.cap.saturating_mul(4) {
                    return Err(LanguageError::BoundsTooLarge { cap: bounds.cap });
                }
                by_k.push(out);
            }
            by_c.push(by_k);
        }
        memo.push(by_c);
    }
    let mut result = Vec::new();
    for c in 0..=max_c {
        for f in &memo[max_q][c][0] {
            if let Some(nr) = bounds.max_nested_rank {
                if f.nested_rank() > nr {
                    continue;
                }
            }
            if let Some(class) = bounds.class {
                let tags = classify_sentence(f)?;
                if !tags.contains(&class) {
                    continue;
                }
            }
            result.push(f.clone());
            if result.len() > bounds.cap {
                return Err(LanguageError::BoundsTooLarge { cap: bounds.cap });
            }
        }
    }
    Ok(result)
}

/// Ordered ways of writing `total` as a sum of `parts` naturals.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn product(pools: &[&Vec<Formula>], f: &mut dyn FnMut(&[usize])) {
    if pools.iter().any(|p| p.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; pools.len()];
    loop {
        f(&idx);
        let mut i = pools.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < pools[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Bounds for [`enumerate_positive`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositiveBounds {
    /// Prenex variables per disjunct (and hence quantifier depth).
    pub max_vars: usize,
    /// Conjuncts `⋀` per disjunct.
    pub max_clauses: usize,
    /// Atoms per `⨀` clause (repetition allowed, nondecreasing order).
    pub max_clause_len: usize,
    pub max_disjuncts: usize,
    pub cap: usize,
}

impl PositiveBounds {
    pub fn new(max_vars: usize) -> Self {
        PositiveBounds {
            max_vars,
            max_clauses: usize::MAX,
            max_clause_len: 2,
            max_disjuncts: 2,
            cap: DEFAULT_ENUM_CAP,
        }
    }
}

/// Enumerates sentences of one existential-positive class directly in
/// canonical form: prenex `∃x1..∃xk` with every variable used, atoms sorted,
/// conjuncts and disjuncts as strictly increasing index sequences.
pub fn enumerate_positive(
    lang: &PredicateLanguage,
    class: SentenceClass,
    bounds: &PositiveBounds,
) -> Result<Vec<Formula>, LanguageError> {
    use SentenceClass::*;
    let (allow_conj, allow_meet, allow_join) = match class {
        AndPrimitive => (false, true, false),
        ExistentialAndPositive => (false, true, true),
        ConjPrimitive => (true, false, false),
        PrimitivePositive => (true, true, false),
        ExistentialConjPositive => (true, false, true),
        ExistentialPositive => (true, true, true),
        None => return Ok(Vec::new()),
    };
    let clause_len = if allow_conj { bounds.max_clause_len.max(1) } else { 1 };
    let max_clauses = if allow_meet { bounds.max_clauses.max(1) } else { 1 };
    let max_disjuncts = if allow_join { bounds.max_disjuncts.max(1) } else { 1 };
    let over = || LanguageError::BoundsTooLarge { cap: bounds.cap };

    let mut primitives: Vec<Formula> = Vec::new();
    for k in 0..=bounds.max_vars {
        let mut atoms: Vec<AtomRef> = Vec::new();
        for (p, a) in lang.iter() {
            if a > 0 && k == 0 {
                continue;
            }
            for args in var_tuples(k, a) {
                atoms.push(AtomRef {
                    pred: p.to_string(),
                    args,
                });
            }
        }
        atoms.sort();
        let mut clauses: Vec<Vec<usize>> = Vec::new();
        nondecreasing(atoms.len(), clause_len, &mut Vec::new(), &mut clauses, bounds.cap)
            .ok_or_else(over)?;
        let mut sets: Vec<Vec<usize>> = Vec::new();
        increasing(clauses.len(), max_clauses, &mut Vec::new(), &mut sets, bounds.cap)
            .ok_or_else(over)?;
        for set in sets {
            let mut used = vec![false; k];
            for &ci in &set {
                for &ai in &clauses[ci] {
                    for v in &atoms[ai].args {
                        let i: usize = v[1..].parse().unwrap();
                        used[i - 1] = true;
                    }
                }
            }
            if !used.iter().all(|&u| u) {
                continue;
            }
            let matrix = Formula::fold(
                MEET,
                set.iter()
                    .map(|&ci| {
                        Formula::fold(
                            CONJ,
                            clauses[ci]
                                .iter()
                                .map(|&ai| Formula::Atom {
                                    pred: atoms[ai].pred.clone(),
                                    args: atoms[ai].args.clone(),
                                })
                                .collect(),
                        )
                        .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            let f = (1..=k)
                .rev()
                .fold(matrix, |body, v| Formula::exists(&var_name(v), body));
            primitives.push(f);
            if primitives.len() > bounds.cap {
                return Err(over());
            }
        }
    }
    let mut combos = Vec::new();
    increasing(primitives.len(), max_disjuncts, &mut Vec::new(), &mut combos, bounds.cap)
        .ok_or_else(over)?;
    Ok(combos
        .into_iter()
        .map(|c| Formula::fold(JOIN, c.into_iter().map(|i| primitives[i].clone()).collect()).unwrap())
        .collect())
}

fn nondecreasing(
    n: usize,
    max_len: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Option<()> {
    let start = cur.last().copied().unwrap_or(0);
    for i in start..n {
        cur.push(i);
        out.push(cur.clone());
        if out.len() > cap {
            return None;
        }
        if cur.len() < max_len {
            nondecreasing(n, max_len, cur, out, cap)?;
        }
        cur.pop();
    }
    Some(())
}

fn increasing(
    n: usize,
    max_len: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Option<()> {
    let start = cur.last().map(|&l| l + 1).unwrap_or(0);
    for i in start..n {
        cur.push(i);
        out.push(cur.clone());
        if out.len() > cap {
            return None;
        }
        if cur.len() < max_len {
            increasing(n, max_len, cur, out, cap)?;
        }
        cur.pop();
    }
    Some(())
}

//! Finite interpreting lattices.
//!
//! An [`InterpretingLattice`] is a finite carrier with a table for every
//! connective of its signature and a designated subset `F`. Construction goes
//! through [`AlgebraBuilder`], which refuses anything that is not a lattice
//! under `join`/`meet` or whose designated set is not a prime filter. There is
//! no unchecked constructor.
//!
//! Carriers whose tokens are all rationals can use closed-form rules
//! (`max`, `min`, Łukasiewicz, product, the uninorm of the standard UL-chain);
//! the rule is evaluated exactly at build time and the result must land back
//! in the carrier. After construction every operation is a plain table.

use alloc::{
    format,
    string::{String, ToString},
    vec,
    vec::Vec,
};
use core::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

/// Exact rational used for chain carriers.
pub type Rational = Ratio<i64>;

/// Reserved connective names.
pub const JOIN: &str = "join";
pub const MEET: &str = "meet";
pub const CONJ: &str = "conj";

/// Index of an element in the carrier of an algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u16);

impl Elem {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Self {
        Elem(i as u16)
    }
}

/// The printed name of a carrier element, plus its rational value when the
/// token is a number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    text: String,
    value: Option<Rational>,
}

impl Label {
    /// Parses a carrier token. Integers and `p/q` become rationals and are
    /// printed in lowest terms; anything else is an opaque name.
    pub fn parse(token: &str) -> Label {
        match parse_rational(token) {
            Some(q) => Label {
                text: format_rational(q),
                value: Some(q),
            },
            None => Label {
                text: token.to_string(),
                value: None,
            },
        }
    }

    pub fn from_rational(q: Rational) -> Label {
        Label {
            text: format_rational(q),
            value: Some(q),
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn value(&self) -> Option<Rational> {
        self.value
    }

    /// Token equality: numeric when both sides are rationals, textual otherwise.
    pub fn matches(&self, other: &Label) -> bool {
        match (self.value, other.value) {
            (Some(a), Some(b)) => a == b,
            _ => self.text == other.text,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn parse_rational(token: &str) -> Option<Rational> {
    let ok = !token.is_empty()
        && token
            .chars()
            .all(|c| c.is_ascii_digit() || c == '/' || c == '-')
        && token.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-');
    if !ok {
        return None;
    }
    match token.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.parse().ok()?;
            let q: i64 = q.parse().ok()?;
            if q == 0 {
                None
            } else {
                Some(Ratio::new(p, q))
            }
        }
        None => token.parse::<i64>().ok().map(Ratio::from_integer),
    }
}

fn format_rational(q: Rational) -> String {
    if q.is_integer() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// How an operation table was specified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpRule {
    /// Explicit rows.
    Table,
    /// Least upper bound in the declared order.
    Max,
    /// Greatest lower bound in the declared order.
    Min,
    /// `max(0, a + b - 1)`.
    Lukasiewicz,
    /// `a * b`.
    Product,
    /// `min(a, b)` when `a + b <= 1`, `max(a, b)` otherwise; unit 1/2.
    Uninorm,
}

impl OpRule {
    pub fn keyword(self) -> &'static str {
        match self {
            OpRule::Table => "table",
            OpRule::Max => "max",
            OpRule::Min => "min",
            OpRule::Lukasiewicz => "lukasiewicz",
            OpRule::Product => "product",
            OpRule::Uninorm => "uninorm",
        }
    }

    pub fn from_keyword(s: &str) -> Option<OpRule> {
        Some(match s {
            "table" => OpRule::Table,
            "max" => OpRule::Max,
            "min" => OpRule::Min,
            "lukasiewicz" => OpRule::Lukasiewicz,
            "product" => OpRule::Product,
            "uninorm" => OpRule::Uninorm,
            _ => return None,
        })
    }

    fn needs_rationals(self) -> bool {
        matches!(
            self,
            OpRule::Lukasiewicz | OpRule::Product | OpRule::Uninorm
        )
    }
}

/// A connective with its materialized table (row-major over `carrier^arity`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    name: String,
    arity: usize,
    rule: OpRule,
    table: Vec<Elem>,
}

impl Operation {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rule(&self) -> OpRule {
        self.rule
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }
}

/// Whether the algebra came from explicit tables or from closed-form rules on
/// a rational chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    Table,
    ComputedChain,
}

/// Names and arities of the algebraic connectives, sorted by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectiveSignature {
    connectives: Vec<(String, usize)>,
}

impl ConnectiveSignature {
    pub fn new(mut connectives: Vec<(String, usize)>) -> Result<Self, AlgebraError> {
        connectives.sort();
        for w in connectives.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(AlgebraError::DuplicateOperation(w[0].0.clone()));
            }
        }
        for required in [JOIN, MEET] {
            match connectives.iter().find(|(n, _)| n == required) {
                Some((_, 2)) => {}
                Some((_, a)) => {
                    return Err(AlgebraError::BadArity {
                        op: required.to_string(),
                        expected: 2,
                        found: *a,
                    })
                }
                None => return Err(AlgebraError::MissingLatticeOp(required.to_string())),
            }
        }
        Ok(ConnectiveSignature { connectives })
    }

    /// The bare lattice signature `{join, meet}`.
    pub fn lattice() -> Self {
        ConnectiveSignature {
            connectives: vec![(JOIN.to_string(), 2), (MEET.to_string(), 2)],
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.connectives
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| *a)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arity(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.connectives.iter().map(|(n, a)| (n.as_str(), *a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("carrier is empty")]
    EmptyCarrier,
    #[error("carrier too large ({0} elements)")]
    CarrierTooLarge(usize),
    #[error("duplicate carrier element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("chain carrier is not listed in ascending order at `{0}`")]
    NotAscending(String),
    #[error("declared order is not a partial order: {0}")]
    OrderNotPartial(String),
    #[error("duplicate operation `{0}`")]
    DuplicateOperation(String),
    #[error("signature lacks `{0}`")]
    MissingLatticeOp(String),
    #[error("operation `{op}` must have arity {expected}, found {found}")]
    BadArity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("rule `{rule}` for `{op}` needs a rational carrier")]
    RuleNeedsRationals { op: String, rule: String },
    #[error("table for `{op}` has no row for ({args})")]
    IncompleteTable { op: String, args: String },
    #[error("table for `{op}` has two rows for ({args})")]
    DuplicateRow { op: String, args: String },
    #[error("carrier not closed under `{op}`: ({inputs}) -> {output}")]
    CarrierNotClosed {
        op: String,
        inputs: String,
        output: String,
    },
    #[error("lattice axiom `{axiom}` fails at {witnesses:?}")]
    LatticeAxiomViolation {
        axiom: String,
        witnesses: Vec<String>,
    },
    #[error("declared order disagrees with meet at ({a}, {b})")]
    OrderMismatch { a: String, b: String },
    #[error("no filter declared")]
    MissingFilter,
    #[error("filter is not prime: {law} law fails at ({a}, {b})")]
    FilterNotPrime { law: String, a: String, b: String },
    #[error("filter must be nonempty and proper: {0}")]
    DegenerateFilter(String),
    #[error("signature has no strong conjunction `conj`")]
    NoStrongConjunction,
    #[error("`{0}` has no unit element")]
    NoUnit(String),
    #[error("declared unit `{declared}` of `{op}` differs from discovered {found}")]
    UnitMismatch {
        op: String,
        declared: String,
        found: String,
    },
}

/// A validated finite interpreting lattice `(A, F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpretingLattice {
    name: String,
    labels: Vec<Label>,
    ops: Vec<Operation>,
    join: usize,
    meet: usize,
    conj: Option<usize>,
    filter: Vec<bool>,
    leq: Vec<bool>,
    top: Elem,
    bottom: Elem,
    chain: bool,
    kind: AlgebraKind,
}

impl InterpretingLattice {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = Elem> + ExactSizeIterator {
        (0..self.labels.len()).map(Elem::from_index)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, e: Elem) -> &Label {
        &self.labels[e.index()]
    }

    /// Looks up a token, numerically for rationals.
    pub fn find(&self, token: &str) -> Option<Elem> {
        let probe = Label::parse(token);
        self.labels
            .iter()
            .position(|l| l.matches(&probe))
            .map(Elem::from_index)
    }

    pub fn elem(&self, token: &str) -> Result<Elem, AlgebraError> {
        self.find(token)
            .ok_or_else(|| AlgebraError::UnknownElement(token.to_string()))
    }

    /// Whether the declared order was a chain (carrier listed ascending).
    pub fn is_chain(&self) -> bool {
        self.chain
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn op(&self, name: &str) -> Option<&Operation> {
        self.op_index(name).map(|i| &self.ops[i])
    }

    pub fn signature(&self) -> ConnectiveSignature {
        let mut connectives: Vec<(String, usize)> =
            self.ops.iter().map(|o| (o.name.clone(), o.arity)).collect();
        connectives.sort();
        ConnectiveSignature { connectives }
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[Elem]) -> Elem {
        let o = &self.ops[op];
        debug_assert_eq!(o.arity, args.len());
        let n = self.labels.len();
        let mut idx = 0usize;
        for a in args {
            idx = idx * n + a.index();
        }
        o.table[idx]
    }

    #[inline]
    pub fn apply2(&self, op: usize, a: Elem, b: Elem) -> Elem {
        self.ops[op].table[a.index() * self.labels.len() + b.index()]
    }

    pub fn join_index(&self) -> usize {
        self.join
    }

    pub fn meet_index(&self) -> usize {
        self.meet
    }

    pub fn conj_index(&self) -> Option<usize> {
        self.conj
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.apply2(self.join, a, b)
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.apply2(self.meet, a, b)
    }

    pub fn conj(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.conj.map(|c| self.apply2(c, a, b))
    }

    /// `a <= b` iff `meet(a, b) = a`.
    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.index() * self.labels.len() + b.index()]
    }

    /// [`Self::leq`] on carrier tokens.
    pub fn leq_tokens(&self, a: &str, b: &str) -> Result<bool, AlgebraError> {
        Ok(self.leq(self.elem(a)?, self.elem(b)?))
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    #[inline]
    pub fn in_filter(&self, e: Elem) -> bool {
        self.filter[e.index()]
    }

    pub fn filter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.elements().filter(|e| self.in_filter(*e))
    }

    /// True when `F = {top}`.
    pub fn filter_is_top_only(&self) -> bool {
        self.elements()
            .all(|e| self.in_filter(e) == (e == self.top))
    }

    /// The left unit of an operation, found by exhaustive search.
    pub fn unit_of(&self, op: usize) -> Option<Elem> {
        let o = &self.ops[op];
        if o.arity != 2 {
            return None;
        }
        self.elements()
            .find(|&u| self.elements().all(|x| self.apply2(op, u, x) == x))
    }

    pub fn conj_unit(&self) -> Result<Elem, AlgebraError> {
        let c = self.conj.ok_or(AlgebraError::NoStrongConjunction)?;
        self.unit_of(c)
            .ok_or_else(|| AlgebraError::NoUnit(CONJ.to_string()))
    }

    /// Integrality: the unit of `conj` is the lattice top.
    pub fn is_integral(&self) -> Result<bool, AlgebraError> {
        Ok(self.conj_unit()? == self.top)
    }

    /// Exhaustively tests `conj(a, b) ∈ F iff a ∈ F and b ∈ F`.
    pub fn check_strong_conj_filter_law(&self) -> Result<ConjFilterReport, AlgebraError> {
        let c = self.conj.ok_or(AlgebraError::NoStrongConjunction)?;
        let mut violations = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                let p = self.apply2(c, a, b);
                let lhs = self.in_filter(p);
                let rhs = self.in_filter(a) && self.in_filter(b);
                if lhs != rhs {
                    violations.push(ConjFilterViolation {
                        a,
                        b,
                        product: p,
                        direction: if lhs {
                            LawDirection::ProductDesignatedOnly
                        } else {
                            LawDirection::OperandsDesignatedOnly
                        },
                    });
                }
            }
        }
        Ok(ConjFilterReport { violations })
    }

    /// Whether the operation is monotone in every argument.
    pub fn is_monotone(&self, op: usize) -> bool {
        let arity = self.ops[op].arity;
        let n = self.size();
        let mut args = vec![Elem(0); arity];
        for_each_tuple(n, arity, &mut args, &mut |args| {
            let base = self.apply(op, args);
            let mut raised = args.to_vec();
            for i in 0..arity {
                for b in self.elements() {
                    if self.leq(args[i], b) {
                        raised[i] = b;
                        if !self.leq(base, self.apply(op, &raised)) {
                            return false;
                        }
                    }
                }
                raised[i] = args[i];
            }
            true
        })
    }

    /// The same algebra with a different designated set, re-validated.
    pub fn with_filter(&self, filter: &[Elem]) -> Result<InterpretingLattice, AlgebraError> {
        let mut out = self.clone();
        out.filter = vec![false; self.size()];
        for e in filter {
            out.filter[e.index()] = true;
        }
        check_prime_filter(&out)?;
        Ok(out)
    }
}

/// Calls `f` on every tuple in `carrier^arity` (row-major), stopping early
/// when `f` returns false. Returns whether every call returned true.
pub(crate) fn for_each_tuple(
    n: usize,
    arity: usize,
    buf: &mut [Elem],
    f: &mut dyn FnMut(&[Elem]) -> bool,
) -> bool {
    if arity == 0 {
        return f(buf);
    }
    if n == 0 {
        return true;
    }
    for slot in buf.iter_mut() {
        *slot = Elem(0);
    }
    loop {
        if !f(buf) {
            return false;
        }
        let mut i = arity;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if buf[i].index() + 1 < n {
                buf[i] = Elem::from_index(buf[i].index() + 1);
                break;
            }
            buf[i] = Elem(0);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawDirection {
    /// `conj(a, b) ∈ F` although `a` or `b` is not.
    ProductDesignatedOnly,
    /// `a, b ∈ F` but `conj(a, b) ∉ F`.
    OperandsDesignatedOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConjFilterViolation {
    pub a: Elem,
    pub b: Elem,
    pub product: Elem,
    pub direction: LawDirection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjFilterReport {
    pub violations: Vec<ConjFilterViolation>,
}

impl ConjFilterReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&ConjFilterViolation> {
        self.violations.first()
    }
}

/// Declared order of the carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSpec {
    /// Carrier listed ascending.
    Chain,
    /// Generating pairs `a <= b`; closed reflexively and transitively.
    Pairs(Vec<(String, String)>),
    /// No declared order; it is read off `meet`.
    FromMeet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterSpec {
    Upset(String),
    Set(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpSpec {
    pub name: String,
    pub arity: usize,
    pub rule: OpRule,
    pub rows: Vec<(Vec<String>, String)>,
}

/// Collects the pieces of an algebra and validates them in [`Self::build`].
#[derive(Clone, Debug)]
pub struct AlgebraBuilder {
    name: String,
    carrier: Vec<String>,
    order: OrderSpec,
    ops: Vec<OpSpec>,
    filter: Option<FilterSpec>,
    units: Vec<(String, String)>,
}

impl AlgebraBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        AlgebraBuilder {
            name: name.into(),
            carrier: Vec::new(),
            order: OrderSpec::FromMeet,
            ops: Vec::new(),
            filter: None,
            units: Vec::new(),
        }
    }

    pub fn carrier<I, S>(mut self, elems: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.carrier = elems.into_iter().map(Into::into).collect();
        self
    }

    pub fn order(mut self, order: OrderSpec) -> Self {
        self.order = order;
        self
    }

    pub fn chain(self) -> Self {
        self.order(OrderSpec::Chain)
    }

    pub fn rule(mut self, name: &str, arity: usize, rule: OpRule) -> Self {
        self.ops.push(OpSpec {
            name: name.to_string(),
            arity,
            rule,
            rows: Vec::new(),
        });
        self
    }

    pub fn table<R, S>(mut self, name: &str, arity: usize, rows: R) -> Self
    where
        R: IntoIterator<Item = (Vec<S>, S)>,
        S: Into<String>,
    {
        self.ops.push(OpSpec {
            name: name.to_string(),
            arity,
            rule: OpRule::Table,
            rows: rows
                .into_iter()
                .map(|(args, v)| (args.into_iter().map(Into::into).collect(), v.into()))
                .collect(),
        });
        self
    }

    /// Nullary constant.
    pub fn constant(self, name: &str, value: &str) -> Self {
        self.table(name, 0, [(Vec::<String>::new(), value.to_string())])
    }

    pub fn op(mut self, spec: OpSpec) -> Self {
        self.ops.push(spec);
        self
    }

    pub fn filter(mut self, filter: FilterSpec) -> Self {
        self.filter = Some(filter);
        self
    }

    pub fn upset(self, e: &str) -> Self {
        self.filter(FilterSpec::Upset(e.to_string()))
    }

    pub fn filter_set<I, S>(self, elems: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.filter(FilterSpec::Set(elems.into_iter().map(Into::into).collect()))
    }

    /// Declares the unit of a binary operation, cross-checked at build time.
    pub fn unit(mut self, op: &str, e: &str) -> Self {
        self.units.push((op.to_string(), e.to_string()));
        self
    }

    pub fn build(self) -> Result<InterpretingLattice, AlgebraError> {
        let n = self.carrier.len();
        if n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        if n > u16::MAX as usize {
            return Err(AlgebraError::CarrierTooLarge(n));
        }
        let labels: Vec<Label> = self.carrier.iter().map(|t| Label::parse(t)).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].iter().any(|o| o.matches(l)) {
                return Err(AlgebraError::DuplicateElement(l.text.clone()));
            }
        }
        let lookup = |token: &str| -> Result<Elem, AlgebraError> {
            let probe = Label::parse(token);
            labels
                .iter()
                .position(|l| l.matches(&probe))
                .map(Elem::from_index)
                .ok_or_else(|| AlgebraError::UnknownElement(token.to_string()))
        };
        let rational = labels.iter().all(|l| l.value.is_some());

        // Declared order, if any.
        let declared: Option<Vec<bool>> = match &self.order {
            OrderSpec::FromMeet => None,
            OrderSpec::Chain => {
                if rational {
                    for w in labels.windows(2) {
                        if w[0].value >= w[1].value {
                            return Err(AlgebraError::NotAscending(w[1].text.clone()));
                        }
                    }
                }
                let mut m = vec![false; n * n];
                for i in 0..n {
                    for j in i..n {
                        m[i * n + j] = true;
                    }
                }
                Some(m)
            }
            OrderSpec::Pairs(pairs) => {
                let mut m = vec![false; n * n];
                for i in 0..n {
                    m[i * n + i] = true;
                }
                for (a, b) in pairs {
                    let (a, b) = (lookup(a)?, lookup(b)?);
                    m[a.index() * n + b.index()] = true;
                }
                for k in 0..n {
                    for i in 0..n {
                        if m[i * n + k] {
                            for j in 0..n {
                                if m[k * n + j] {
                                    m[i * n + j] = true;
                                }
                            }
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        if i != j && m[i * n + j] && m[j * n + i] {
                            return Err(AlgebraError::OrderNotPartial(format!(
                                "{} and {} are mutually below each other",
                                labels[i], labels[j]
                            )));
                        }
                    }
                }
                Some(m)
            }
        };

        let mut specs = self.ops.clone();
        for (i, s) in specs.iter().enumerate() {
            if specs[..i].iter().any(|o| o.name == s.name) {
                return Err(AlgebraError::DuplicateOperation(s.name.clone()));
            }
        }
        for (name, rule) in [(JOIN, OpRule::Max), (MEET, OpRule::Min)] {
            if !specs.iter().any(|o| o.name == name) {
                if declared.is_none() {
                    return Err(AlgebraError::MissingLatticeOp(name.to_string()));
                }
                specs.push(OpSpec {
                    name: name.to_string(),
                    arity: 2,
                    rule,
                    rows: Vec::new(),
                });
            }
        }
        for s in &specs {
            let expected = match s.name.as_str() {
                JOIN | MEET | CONJ => Some(2),
                _ => None,
            };
            if let Some(expected) = expected {
                if s.arity != expected {
                    return Err(AlgebraError::BadArity {
                        op: s.name.clone(),
                        expected,
                        found: s.arity,
                    });
                }
            }
        }

        let mut ops = Vec::with_capacity(specs.len());
        for s in &specs {
            let table = materialize(s, &labels, declared.as_deref(), &lookup)?;
            ops.push(Operation {
                name: s.name.clone(),
                arity: s.arity,
                rule: s.rule,
                table,
            });
        }
        let join = ops.iter().position(|o| o.name == JOIN).unwrap();
        let meet = ops.iter().position(|o| o.name == MEET).unwrap();
        let conj = ops.iter().position(|o| o.name == CONJ);

        check_lattice_axioms(&labels, &ops[join], &ops[meet])?;

        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = ops[meet].table[a * n + b].index() == a;
            }
        }
        if let Some(d) = &declared {
            for a in 0..n {
                for b in 0..n {
                    if d[a * n + b] != leq[a * n + b] {
                        return Err(AlgebraError::OrderMismatch {
                            a: labels[a].text.clone(),
                            b: labels[b].text.clone(),
                        });
                    }
                }
            }
        }
        let top = (0..n)
            .find(|&t| (0..n).all(|x| leq[x * n + t]))
            .map(Elem::from_index)
            .expect("finite lattice has a top");
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| leq[b * n + x]))
            .map(Elem::from_index)
            .expect("finite lattice has a bottom");

        let mut filter = vec![false; n];
        match self.filter.as_ref().ok_or(AlgebraError::MissingFilter)? {
            FilterSpec::Upset(e) => {
                let e = lookup(e)?;
                for x in 0..n {
                    filter[x] = leq[e.index() * n + x];
                }
            }
            FilterSpec::Set(es) => {
                for e in es {
                    filter[lookup(e)?.index()] = true;
                }
            }
        }

        let chain = (0..n).all(|a| (0..n).all(|b| leq[a * n + b] || leq[b * n + a]));
        let computed = rational
            && matches!(self.order, OrderSpec::Chain)
            && ops
                .iter()
                .all(|o| o.rule != OpRule::Table || o.arity == 0);
        let alg = InterpretingLattice {
            name: self.name,
            labels,
            ops,
            join,
            meet,
            conj,
            filter,
            leq,
            top,
            bottom,
            chain,
            kind: if computed {
                AlgebraKind::ComputedChain
            } else {
                AlgebraKind::Table
            },
        };
        check_prime_filter(&alg)?;

        for (op, e) in &self.units {
            let idx = alg
                .op_index(op)
                .ok_or_else(|| AlgebraError::MissingLatticeOp(op.clone()))?;
            let declared = alg.elem(e)?;
            match alg.unit_of(idx) {
                Some(u) if u == declared => {}
                Some(u) => {
                    return Err(AlgebraError::UnitMismatch {
                        op: op.clone(),
                        declared: e.clone(),
                        found: alg.label(u).text.clone(),
                    })
                }
                None => return Err(AlgebraError::NoUnit(op.clone())),
            }
        }
        Ok(alg)
    }
}

fn tuple_text(labels: &[Label], args: &[Elem]) -> String {
    let parts: Vec<&str> = args.iter().map(|a| labels[a.index()].text()).collect();
    parts.join(", ")
}

fn materialize(
    spec: &OpSpec,
    labels: &[Label],
    order: Option<&[bool]>,
    lookup: &dyn Fn(&str) -> Result<Elem, AlgebraError>,
) -> Result<Vec<Elem>, AlgebraError> {
    let n = labels.len();
    let rows = n.pow(spec.arity as u32);
    let mut table: Vec<Option<Elem>> = vec![None; rows];
    let index = |args: &[Elem]| args.iter().fold(0usize, |acc, a| acc * n + a.index());

    match spec.rule {
        OpRule::Table => {
            for (args, value) in &spec.rows {
                if args.len() != spec.arity {
                    return Err(AlgebraError::BadArity {
                        op: spec.name.clone(),
                        expected: spec.arity,
                        found: args.len(),
                    });
                }
                let args: Vec<Elem> = args.iter().map(|a| lookup(a)).collect::<Result<_, _>>()?;
                let v = lookup(value)?;
                let slot = &mut table[index(&args)];
                if slot.is_some() {
                    return Err(AlgebraError::DuplicateRow {
                        op: spec.name.clone(),
                        args: tuple_text(labels, &args),
                    });
                }
                *slot = Some(v);
            }
        }
        OpRule::Max | OpRule::Min => {
            let Some(order) = order else {
                return Err(AlgebraError::LatticeAxiomViolation {
                    axiom: format!("`{}` = {} needs a declared order", spec.name, spec.rule.keyword()),
                    witnesses: Vec::new(),
                });
            };
            let le = |a: usize, b: usize| order[a * n + b];
            let upper = spec.rule == OpRule::Max;
            let mut args = vec![Elem(0); spec.arity];
            let mut failure = None;
            for_each_tuple(n, spec.arity, &mut args, &mut |args| {
                // Candidates bounding every argument on the relevant side.
                let bounds: Vec<usize> = (0..n)
                    .filter(|&c| {
                        args.iter()
                            .all(|a| if upper { le(a.index(), c) } else { le(c, a.index()) })
                    })
                    .collect();
                let best = bounds.iter().copied().find(|&c| {
                    bounds
                        .iter()
                        .all(|&d| if upper { le(c, d) } else { le(d, c) })
                });
                match best {
                    Some(c) => {
                        table[index(args)] = Some(Elem::from_index(c));
                        true
                    }
                    None => {
                        failure = Some(AlgebraError::LatticeAxiomViolation {
                            axiom: String::from(if upper {
                                "least upper bound exists"
                            } else {
                                "greatest lower bound exists"
                            }),
                            witnesses: args.iter().map(|a| labels[a.index()].text.clone()).collect(),
                        });
                        false
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        rule => {
            debug_assert!(rule.needs_rationals());
            if !labels.iter().all(|l| l.value.is_some()) {
                return Err(AlgebraError::RuleNeedsRationals {
                    op: spec.name.clone(),
                    rule: rule.keyword().to_string(),
                });
            }
            if spec.arity != 2 {
                return Err(AlgebraError::BadArity {
                    op: spec.name.clone(),
                    expected: 2,
                    found: spec.arity,
                });
            }
            let one = Rational::one();
            let zero = Rational::zero();
            for a in 0..n {
                for b in 0..n {
                    let (x, y) = (labels[a].value.unwrap(), labels[b].value.unwrap());
                    let r = match rule {
                        OpRule::Lukasiewicz => {
                            let s = x + y - one;
                            if s > zero {
                                s
                            } else {
                                zero
                            }
                        }
                        OpRule::Product => x * y,
                        OpRule::Uninorm => {
                            if y <= one - x {
                                x.min(y)
                            } else {
                                x.max(y)
                            }
                        }
                        _ => unreachable!(),
                    };
                    let pos = labels.iter().position(|l| l.value == Some(r));
                    match pos {
                        Some(p) => table[a * n + b] = Some(Elem::from_index(p)),
                        None => {
                            return Err(AlgebraError::CarrierNotClosed {
                                op: spec.name.clone(),
                                inputs: format!("{}, {}", labels[a], labels[b]),
                                output: format_rational(r),
                            })
                        }
                    }
                }
            }
        }
    }

    let mut out = Vec::with_capacity(rows);
    let mut args = vec![Elem(0); spec.arity];
    let mut missing = None;
    for_each_tuple(n, spec.arity, &mut args, &mut |args| match table[index(args)] {
        Some(v) => {
            out.push(v);
            true
        }
        None => {
            missing = Some(tuple_text(labels, args));
            false
        }
    });
    if let Some(args) = missing {
        return Err(AlgebraError::IncompleteTable {
            op: spec.name.clone(),
            args,
        });
    }
    Ok(out)
}

fn check_lattice_axioms(
    labels: &[Label],
    join: &Operation,
    meet: &Operation,
) -> Result<(), AlgebraError> {
    let n = labels.len();
    let j = |a: usize, b: usize| join.table[a * n + b].index();
    let m = |a: usize, b: usize| meet.table[a * n + b].index();
    let fail = |axiom: &str, w: &[usize]| AlgebraError::LatticeAxiomViolation {
        axiom: axiom.to_string(),
        witnesses: w.iter().map(|&i| labels[i].text.clone()).collect(),
    };
    for a in 0..n {
        if j(a, a) != a {
            return Err(fail("join idempotence", &[a]));
        }
        if m(a, a) != a {
            return Err(fail("meet idempotence", &[a]));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if j(a, b) != j(b, a) {
                return Err(fail("join commutativity", &[a, b]));
            }
            if m(a, b) != m(b, a) {
                return Err(fail("meet commutativity", &[a, b]));
            }
            if j(a, m(a, b)) != a {
                return Err(fail("absorption a ∨ (a ∧ b) = a", &[a, b]));
            }
            if m(a, j(a, b)) != a {
                return Err(fail("absorption a ∧ (a ∨ b) = a", &[a, b]));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if j(j(a, b), c) != j(a, j(b, c)) {
                    return Err(fail("join associativity", &[a, b, c]));
                }
                if m(m(a, b), c) != m(a, m(b, c)) {
                    return Err(fail("meet associativity", &[a, b, c]));
                }
            }
        }
    }
    Ok(())
}

fn check_prime_filter(alg: &InterpretingLattice) -> Result<(), AlgebraError> {
    let n = alg.size();
    let count = alg.filter.iter().filter(|&&f| f).count();
    if count == 0 {
        return Err(AlgebraError::DegenerateFilter("filter is empty".to_string()));
    }
    if count == n && n > 1 {
        return Err(AlgebraError::DegenerateFilter(
            "filter is the whole carrier".to_string(),
        ));
    }
    let text = |e: Elem| alg.labels[e.index()].text.clone();
    for a in alg.elements() {
        for b in alg.elements() {
            let (fa, fb) = (alg.in_filter(a), alg.in_filter(b));
            if alg.in_filter(alg.meet(a, b)) != (fa && fb) {
                return Err(AlgebraError::FilterNotPrime {
                    law: "meet".to_string(),
                    a: text(a),
                    b: text(b),
                });
            }
            if alg.in_filter(alg.join(a, b)) != (fa || fb) {
                return Err(AlgebraError::FilterNotPrime {
                    law: "join".to_string(),
                    a: text(a),
                    b: text(b),
                });
            }
        }
    }
    Ok(())
}

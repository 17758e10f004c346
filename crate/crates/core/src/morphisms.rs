//! Protomorphisms, homomorphisms, monomorphisms and strong homomorphisms
//! between P-models, and homomorphisms between interpreting lattices.
//!
//! Searches are plain backtracking. Domain variables of `g` are assigned in
//! order of descending constraint degree (ties by domain index) and values
//! are tried in domain order; after each assignment every tuple whose
//! elements are all assigned is checked.

use alloc::{
    format,
    string::{String, ToString},
    vec,
    vec::Vec,
};
use core::fmt;

use crate::algebra::{for_each_tuple, Elem, InterpretingLattice};
use crate::structure::{decode_tuple, PModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MorphismKind {
    Proto,
    Hom,
    Mono,
    Strong,
}

impl MorphismKind {
    pub const ALL: [MorphismKind; 4] = [
        MorphismKind::Proto,
        MorphismKind::Hom,
        MorphismKind::Mono,
        MorphismKind::Strong,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            MorphismKind::Proto => "proto",
            MorphismKind::Hom => "hom",
            MorphismKind::Mono => "mono",
            MorphismKind::Strong => "strong",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }

    pub fn needs_algebra_map(self) -> bool {
        self != MorphismKind::Proto
    }
}

impl fmt::Display for MorphismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    First,
    All,
    Count,
}

/// A domain map `g`, paired with a carrier map `f` for every kind but proto.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorphismWitness {
    pub kind: MorphismKind,
    pub f: Option<Vec<Elem>>,
    pub g: Vec<usize>,
}

impl MorphismWitness {
    pub fn proto(g: Vec<usize>) -> Self {
        MorphismWitness {
            kind: MorphismKind::Proto,
            f: None,
            g,
        }
    }

    pub fn with_algebra_map(kind: MorphismKind, f: Vec<Elem>, g: Vec<usize>) -> Self {
        MorphismWitness { kind, f: Some(f), g }
    }

    /// The identity pair on a model (the algebra map is omitted for proto).
    pub fn identity(kind: MorphismKind, m: &PModel) -> Self {
        let g = (0..m.size()).collect();
        if kind == MorphismKind::Proto {
            MorphismWitness::proto(g)
        } else {
            MorphismWitness::with_algebra_map(kind, m.algebra().elements().collect(), g)
        }
    }

    /// `self` then `next`.
    pub fn compose(&self, next: &MorphismWitness) -> MorphismWitness {
        let g = self.g.iter().map(|&i| next.g[i]).collect();
        let f = match (&self.f, &next.f) {
            (Some(a), Some(b)) => Some(a.iter().map(|e| b[e.index()]).collect()),
            _ => None,
        };
        MorphismWitness {
            kind: self.kind.min(next.kind),
            f,
            g,
        }
    }

    /// The same maps read as a weaker kind.
    pub fn as_kind(&self, kind: MorphismKind) -> MorphismWitness {
        MorphismWitness {
            kind,
            f: if kind == MorphismKind::Proto {
                None
            } else {
                self.f.clone()
            },
            g: self.g.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphismError {
    #[error("map does not fit the domains: {0}")]
    DomainMismatch(String),
    #[error("models have different languages")]
    LanguageMismatch,
    #[error("algebras have different connective signatures")]
    SignatureMismatch,
}

/// Options shared by checking and search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MorphismOptions {
    /// Additionally demand `f(F_A) ⊆ F_B` of algebra maps.
    pub require_filter_preservation: bool,
}

/// The tuple condition that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `R^M(m̄) ∈ F` but `R^N(g m̄) ∉ G`.
    Proto,
    /// `f(R^M(m̄)) ≰ R^N(g m̄)`.
    Mono,
    /// `f(R^M(m̄)) ≠ R^N(g m̄)`.
    Strong,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Tuple {
        condition: Condition,
        pred: String,
        tuple: Vec<String>,
        source: Elem,
        target: Elem,
    },
    Connective {
        op: String,
        args: Vec<Elem>,
        /// `f(op(args))`
        image: Elem,
        /// `op(f(args))`
        expected: Elem,
    },
    Filter {
        elem: Elem,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MorphismReport {
    pub violations: Vec<Violation>,
}

impl MorphismReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn same_language(m: &PModel, n: &PModel) -> Result<(), MorphismError> {
    if m.language() != n.language() {
        return Err(MorphismError::LanguageMismatch);
    }
    Ok(())
}

fn same_signature(a: &InterpretingLattice, b: &InterpretingLattice) -> Result<(), MorphismError> {
    if a.signature() != b.signature() {
        return Err(MorphismError::SignatureMismatch);
    }
    Ok(())
}

/// Every place where `f` fails to commute with a connective (plus filter
/// violations when requested).
pub fn algebra_map_violations(
    f: &[Elem],
    a: &InterpretingLattice,
    b: &InterpretingLattice,
    opts: &MorphismOptions,
) -> Result<Vec<Violation>, MorphismError> {
    same_signature(a, b)?;
    if f.len() != a.size() || f.iter().any(|e| e.index() >= b.size()) {
        return Err(MorphismError::DomainMismatch(format!(
            "algebra map must send {} elements into {}",
            a.size(),
            b.size()
        )));
    }
    let mut out = Vec::new();
    for op in a.ops() {
        let ob = b.op_index(op.name()).expect("same signature");
        let oa = a.op_index(op.name()).expect("own op");
        let mut buf = vec![Elem(0); op.arity()];
        for_each_tuple(a.size(), op.arity(), &mut buf, &mut |args| {
            let image = f[a.apply(oa, args).index()];
            let mapped: Vec<Elem> = args.iter().map(|x| f[x.index()]).collect();
            let expected = b.apply(ob, &mapped);
            if image != expected {
                out.push(Violation::Connective {
                    op: op.name().to_string(),
                    args: args.to_vec(),
                    image,
                    expected,
                });
            }
            true
        });
    }
    if opts.require_filter_preservation {
        for e in a.filter() {
            if !b.in_filter(f[e.index()]) {
                out.push(Violation::Filter { elem: e });
            }
        }
    }
    Ok(out)
}

/// Proto condition against arbitrary designated sets, for replaying
/// situations whose designated set is not a prime filter.
pub fn is_protomorphism_wrt(
    g: &[usize],
    m: &PModel,
    n: &PModel,
    in_source: &dyn Fn(Elem) -> bool,
    in_target: &dyn Fn(Elem) -> bool,
) -> Result<bool, MorphismError> {
    same_language(m, n)?;
    check_g(g, m, n)?;
    let mut ok = true;
    m.for_each_entry(|p, tuple, v| {
        if ok && in_source(v) {
            let img: Vec<usize> = tuple.iter().map(|&t| g[t]).collect();
            if !in_target(n.value(p, &img)) {
                ok = false;
            }
        }
    });
    Ok(ok)
}

fn check_g(g: &[usize], m: &PModel, n: &PModel) -> Result<(), MorphismError> {
    if g.len() != m.size() || g.iter().any(|&x| x >= n.size()) {
        return Err(MorphismError::DomainMismatch(format!(
            "domain map must send {} elements into {}",
            m.size(),
            n.size()
        )));
    }
    Ok(())
}

fn tuple_ok(kind: MorphismKind, f: Option<&[Elem]>, m: &PModel, n: &PModel, v: Elem, w: Elem) -> Option<Condition> {
    let (a, b) = (m.algebra(), n.algebra());
    if a.in_filter(v) && !b.in_filter(w) {
        return Some(Condition::Proto);
    }
    match kind {
        MorphismKind::Proto | MorphismKind::Hom => None,
        MorphismKind::Mono => {
            let fv = f.expect("mono needs f")[v.index()];
            (!b.leq(fv, w)).then_some(Condition::Mono)
        }
        MorphismKind::Strong => {
            let fv = f.expect("strong needs f")[v.index()];
            (fv != w).then_some(Condition::Strong)
        }
    }
}

/// Verifies exactly the defining condition of `w.kind`, reporting every
/// violating tuple and connective instance.
pub fn check_morphism(
    w: &MorphismWitness,
    m: &PModel,
    n: &PModel,
    opts: &MorphismOptions,
) -> Result<MorphismReport, MorphismError> {
    same_language(m, n)?;
    check_g(&w.g, m, n)?;
    let mut violations = Vec::new();
    let f = if w.kind.needs_algebra_map() {
        let f = w.f.as_deref().ok_or_else(|| {
            MorphismError::DomainMismatch(format!("{} witness lacks an algebra map", w.kind))
        })?;
        violations.extend(algebra_map_violations(f, m.algebra(), n.algebra(), opts)?);
        Some(f)
    } else {
        None
    };
    m.for_each_entry(|p, tuple, v| {
        let img: Vec<usize> = tuple.iter().map(|&t| w.g[t]).collect();
        let target = n.value(p, &img);
        if let Some(condition) = tuple_ok(w.kind, f, m, n, v, target) {
            violations.push(Violation::Tuple {
                condition,
                pred: m.language().name(p).to_string(),
                tuple: tuple.iter().map(|&t| m.domain()[t].clone()).collect(),
                source: v,
                target,
            });
        }
    });
    Ok(MorphismReport { violations })
}

/// Result of a search; `witnesses` is empty in count mode.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MorphismSearch {
    pub witnesses: Vec<MorphismWitness>,
    pub count: u64,
}

impl MorphismSearch {
    pub fn exists(&self) -> bool {
        self.count > 0
    }
}

/// All maps `f: A → B` commuting with every connective (constants included).
pub fn find_algebra_homs(
    a: &InterpretingLattice,
    b: &InterpretingLattice,
    mode: SearchMode,
    opts: &MorphismOptions,
) -> Result<(Vec<Vec<Elem>>, u64), MorphismError> {
    same_signature(a, b)?;
    let k = a.size();
    // Constraint (op, args, result) is checked once its largest index is assigned.
    let mut checks: Vec<Vec<(usize, usize, Vec<Elem>, Elem)>> = vec![Vec::new(); k];
    for (oa, op) in a.ops().iter().enumerate() {
        let ob = b.op_index(op.name()).expect("same signature");
        let mut buf = vec![Elem(0); op.arity()];
        for_each_tuple(k, op.arity(), &mut buf, &mut |args| {
            let r = a.apply(oa, args);
            let last = args.iter().map(|x| x.index()).chain([r.index()]).max().unwrap();
            checks[last].push((oa, ob, args.to_vec(), r));
            true
        });
    }
    let mut f = vec![Elem(0); k];
    let mut found = Vec::new();
    let mut count = 0u64;
    let mut mapped = Vec::new();
    fn rec(
        i: usize,
        f: &mut Vec<Elem>,
        a: &InterpretingLattice,
        b: &InterpretingLattice,
        checks: &[Vec<(usize, usize, Vec<Elem>, Elem)>],
        opts: &MorphismOptions,
        mode: SearchMode,
        found: &mut Vec<Vec<Elem>>,
        count: &mut u64,
        mapped: &mut Vec<Elem>,
    ) -> bool {
        if i == f.len() {
            *count += 1;
            if mode != SearchMode::Count {
                found.push(f.clone());
            }
            return mode != SearchMode::First;
        }
        for v in b.elements() {
            f[i] = v;
            if opts.require_filter_preservation
                && a.in_filter(Elem::from_index(i))
                && !b.in_filter(v)
            {
                continue;
            }
            let ok = checks[i].iter().all(|(_, ob, args, r)| {
                mapped.clear();
                mapped.extend(args.iter().map(|x| f[x.index()]));
                b.apply(*ob, mapped) == f[r.index()]
            });
            if ok && !rec(i + 1, f, a, b, checks, opts, mode, found, count, mapped) {
                return false;
            }
        }
        true
    }
    rec(0, &mut f, a, b, &checks, opts, mode, &mut found, &mut count, &mut mapped);
    Ok((found, count))
}

struct GSearch<'a> {
    kind: MorphismKind,
    f: Option<&'a [Elem]>,
    m: &'a PModel,
    n: &'a PModel,
    order: Vec<usize>,
    /// For each position in `order`, the (pred, tuple) pairs completed there.
    checks: Vec<Vec<(usize, Vec<usize>, Elem)>>,
    g: Vec<usize>,
    mode: SearchMode,
    found: Vec<Vec<usize>>,
    count: u64,
}

impl GSearch<'_> {
    fn run(&mut self, pos: usize) -> bool {
        if pos == self.order.len() {
            self.count += 1;
            if self.mode != SearchMode::Count {
                self.found.push(self.g.clone());
            }
            return self.mode != SearchMode::First;
        }
        let var = self.order[pos];
        let mut img = Vec::new();
        for val in 0..self.n.size() {
            self.g[var] = val;
            let ok = self.checks[pos].iter().all(|(p, tuple, v)| {
                img.clear();
                img.extend(tuple.iter().map(|&t| self.g[t]));
                let w = self.n.value(*p, &img);
                tuple_ok(self.kind, self.f, self.m, self.n, *v, w).is_none()
            });
            if ok && !self.run(pos + 1) {
                return false;
            }
        }
        true
    }
}

/// Constrained tuples of `m` under `kind`, as (pred, tuple, value).
fn constrained_tuples(kind: MorphismKind, f: Option<&[Elem]>, m: &PModel, n: &PModel) -> Vec<(usize, Vec<usize>, Elem)> {
    let (a, b) = (m.algebra(), n.algebra());
    let mut out = Vec::new();
    m.for_each_entry(|p, tuple, v| {
        let trivial = match kind {
            MorphismKind::Proto | MorphismKind::Hom => !a.in_filter(v),
            MorphismKind::Mono => !a.in_filter(v) && f.is_some_and(|f| f[v.index()] == b.bottom()),
            MorphismKind::Strong => false,
        };
        if !trivial {
            out.push((p, tuple.to_vec(), v));
        }
    });
    out
}

fn search_g(
    kind: MorphismKind,
    f: Option<&[Elem]>,
    m: &PModel,
    n: &PModel,
    mode: SearchMode,
) -> (Vec<Vec<usize>>, u64) {
    let tuples = constrained_tuples(kind, f, m, n);
    // Nullary constraints are decided before any search.
    for (p, tuple, v) in &tuples {
        if tuple.is_empty() && tuple_ok(kind, f, m, n, *v, n.value(*p, &[])).is_some() {
            return (Vec::new(), 0);
        }
    }
    let size = m.size();
    let mut degree = vec![0usize; size];
    for (_, tuple, _) in &tuples {
        let mut seen = Vec::new();
        for &t in tuple {
            if !seen.contains(&t) {
                seen.push(t);
                degree[t] += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&x, &y| degree[y].cmp(&degree[x]).then(x.cmp(&y)));
    let mut position = vec![0usize; size];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut checks = vec![Vec::new(); size];
    for (p, tuple, v) in tuples {
        if let Some(last) = tuple.iter().map(|&t| position[t]).max() {
            checks[last].push((p, tuple, v));
        }
    }
    let mut s = GSearch {
        kind,
        f,
        m,
        n,
        order,
        checks,
        g: vec![0; size],
        mode,
        found: Vec::new(),
        count: 0,
    };
    s.run(0);
    (s.found, s.count)
}

/// Searches witnesses of `kind` from `m` to `n`. In `All` mode the result is
/// sorted by `(f, g)`; `First` returns the first witness in search order.
pub fn find_morphisms(
    kind: MorphismKind,
    m: &PModel,
    n: &PModel,
    mode: SearchMode,
    opts: &MorphismOptions,
) -> Result<MorphismSearch, MorphismError> {
    same_language(m, n)?;
    let mut out = MorphismSearch::default();
    if kind == MorphismKind::Proto {
        let (gs, count) = search_g(kind, None, m, n, mode);
        out.count = count;
        out.witnesses = gs.into_iter().map(MorphismWitness::proto).collect();
    } else {
        let (fs, _) = find_algebra_homs(m.algebra(), n.algebra(), SearchMode::All, opts)?;
        for f in fs {
            let (gs, count) = search_g(kind, Some(&f), m, n, mode);
            out.count += count;
            out.witnesses.extend(
                gs.into_iter()
                    .map(|g| MorphismWitness::with_algebra_map(kind, f.clone(), g)),
            );
            if mode == SearchMode::First && count > 0 {
                break;
            }
        }
    }
    if mode == SearchMode::All {
        out.witnesses.sort();
    }
    Ok(out)
}

/// Every map `g` (and every `f` for non-proto kinds) filtered by
/// [`check_morphism`]; the reference the search is tested against.
pub fn brute_force_morphisms(
    kind: MorphismKind,
    m: &PModel,
    n: &PModel,
    opts: &MorphismOptions,
) -> Result<Vec<MorphismWitness>, MorphismError> {
    same_language(m, n)?;
    let fs: Vec<Option<Vec<Elem>>> = if kind.needs_algebra_map() {
        same_signature(m.algebra(), n.algebra())?;
        let (a, b) = (m.algebra().size(), n.algebra().size());
        let mut all = Vec::new();
        let mut idx = vec![0usize; a];
        let total = crate::structure::pow(b, a);
        for code in 0..total {
            decode_tuple(code, b, &mut idx);
            all.push(Some(idx.iter().map(|&i| Elem::from_index(i)).collect()));
        }
        all
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    let mut g = vec![0usize; m.size()];
    let total = crate::structure::pow(n.size(), m.size());
    for f in fs {
        for code in 0..total {
            decode_tuple(code, n.size(), &mut g);
            let w = MorphismWitness {
                kind,
                f: f.clone(),
                g: g.clone(),
            };
            if check_morphism(&w, m, n, opts)?.holds() {
                out.push(w);
            }
        }
    }
    out.sort();
    Ok(out)
}

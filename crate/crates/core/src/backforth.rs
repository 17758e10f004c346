//! Back-and-forth systems between finite P-models.
//!
//! Systems are computed as greatest fixed points: level 0 holds every partial
//! isomorphism (within the size bounds), and level `k + 1` keeps the maps of
//! level `k` that satisfy every extension property into level `k`. A system
//! of length `n` exists iff level `n` is nonempty, and then the levels
//! themselves form the largest such system.

use alloc::{
    collections::BTreeMap,
    format,
    string::{String, ToString},
    vec,
    vec::Vec,
};
use core::fmt;

use crate::algebra::{for_each_tuple, Elem, InterpretingLattice};
use crate::semantics::{equiv_n, strong_equiv_n, EquivBounds, Equivalence, SemanticsError};
use crate::structure::PModel;

/// Default limit on the number of level-0 candidates.
pub const DEFAULT_CANDIDATE_CAP: usize = 500_000;

const UNDEF: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackForthError {
    #[error("models are over different algebras")]
    AlgebraMismatch,
    #[error("models have different languages")]
    LanguageMismatch,
    #[error("algebras have different connective signatures")]
    SignatureMismatch,
    #[error("more than {cap} candidate partial isomorphisms")]
    TooLarge { cap: usize },
    #[error("no back-and-forth system of length {0}")]
    NoSystem(usize),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// A partial injective map between index sets; `None` entries are undefined.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialMap(Vec<u8>);

impl PartialMap {
    pub fn empty(len: usize) -> PartialMap {
        PartialMap(vec![UNDEF; len])
    }

    pub fn identity(len: usize) -> PartialMap {
        PartialMap((0..len).map(|i| i as u8).collect())
    }

    pub fn from_pairs(len: usize, pairs: &[(usize, usize)]) -> PartialMap {
        let mut m = PartialMap::empty(len);
        for &(a, b) in pairs {
            m.0[a] = b as u8;
        }
        m
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        match self.0[x] {
            UNDEF => None,
            y => Some(y as usize),
        }
    }

    pub fn source_len(&self) -> usize {
        self.0.len()
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&x| self.0[x] != UNDEF).collect()
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&y| y != UNDEF).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn in_image(&self, y: usize) -> bool {
        self.0.contains(&(y as u8))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = [false; 256];
        self.0.iter().filter(|&&y| y != UNDEF).all(|&y| !core::mem::replace(&mut seen[y as usize], true))
    }

    /// `self ⊆ other` as sets of pairs.
    pub fn is_sub_of(&self, other: &PartialMap) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a == UNDEF || a == b)
    }

    /// Renders as `{x->a, y->b}` with the given names.
    pub fn render(&self, from: &dyn Fn(usize) -> String, to: &dyn Fn(usize) -> String) -> String {
        let parts: Vec<String> = self
            .domain()
            .into_iter()
            .map(|x| format!("{}->{}", from(x), to(self.0[x] as usize)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Every partial injective map from `a` points into `b` points with at most
/// `bound` pairs, in depth-first order (defined before undefined).
fn partial_injections(a: usize, b: usize, bound: usize, cap: usize) -> Result<Vec<PartialMap>, BackForthError> {
    fn go(
        i: usize,
        cur: &mut Vec<u8>,
        used: &mut Vec<bool>,
        size: usize,
        bound: usize,
        out: &mut Vec<PartialMap>,
        cap: usize,
    ) -> bool {
        if i == cur.len() {
            out.push(PartialMap(cur.clone()));
            return out.len() <= cap;
        }
        for y in 0..used.len() {
            if !used[y] && size < bound {
                used[y] = true;
                cur[i] = y as u8;
                let ok = go(i + 1, cur, used, size + 1, bound, out, cap);
                used[y] = false;
                if !ok {
                    return false;
                }
            }
        }
        cur[i] = UNDEF;
        go(i + 1, cur, used, size, bound, out, cap)
    }
    if a >= UNDEF as usize || b >= UNDEF as usize {
        return Err(BackForthError::TooLarge { cap });
    }
    let mut out = Vec::new();
    if !go(0, &mut vec![UNDEF; a], &mut vec![false; b], 0, bound, &mut out, cap) {
        return Err(BackForthError::TooLarge { cap });
    }
    Ok(out)
}

/// A pair `(p, r)`: `p` between carriers, `r` between domains.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialIso {
    pub p: PartialMap,
    pub r: PartialMap,
}

/// An extension property, with the point it must reach.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Domain element of the source model.
    Forth(usize),
    /// Domain element of the target model.
    Back(usize),
    /// Carrier element of the source algebra.
    ForthL(usize),
    /// Carrier element of the target algebra.
    BackL(usize),
}

/// A map of some level that has no required extension in that level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction<T> {
    /// The level the map failed to enter.
    pub level: usize,
    pub map: T,
    pub step: Step,
}

/// `levels[k]` is `I_k`; each level is nonempty and contains the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackForthSystem<T> {
    pub levels: Vec<Vec<T>>,
}

/// The pruning run: level sizes up to `n` (or to the first empty level) and,
/// when level `n` is empty, the first map pruned into the empty level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackForthReport<T> {
    pub n: usize,
    pub levels: Vec<Vec<T>>,
    pub obstruction: Option<Obstruction<T>>,
}

impl<T: Clone> BackForthReport<T> {
    pub fn exists(&self) -> bool {
        self.levels.len() == self.n + 1 && self.levels.last().is_some_and(|l| !l.is_empty())
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn system(&self) -> Option<BackForthSystem<T>> {
        self.exists().then(|| BackForthSystem {
            levels: self.levels.clone(),
        })
    }
}

/// Prunes level by level; `check(x, level)` returns the first extension
/// property `x` fails against `level`.
fn prune<T: Clone>(
    initial: Vec<T>,
    n: usize,
    check: &dyn Fn(&T, &[T]) -> Option<Step>,
) -> BackForthReport<T> {
    let mut levels = vec![initial];
    let mut obstruction = None;
    while levels.len() <= n {
        let prev = levels.last().expect("nonempty");
        if prev.is_empty() {
            break;
        }
        let mut next = Vec::with_capacity(prev.len());
        let mut first = None;
        for x in prev {
            match check(x, prev) {
                None => next.push(x.clone()),
                Some(step) => {
                    if first.is_none() {
                        first = Some((x.clone(), step));
                    }
                }
            }
        }
        let stable = next.len() == prev.len();
        if next.is_empty() {
            if let Some((map, step)) = first {
                obstruction = Some(Obstruction {
                    level: levels.len(),
                    map,
                    step,
                });
            }
        }
        levels.push(next);
        if stable {
            // Fixed point: every further level is the same set.
            while levels.len() <= n {
                let same = levels.last().expect("nonempty").clone();
                levels.push(same);
            }
        }
    }
    BackForthReport {
        n,
        levels,
        obstruction,
    }
}

/// Calls `f` on every tuple of length `arity` drawn from `points`.
fn for_each_tuple_in(points: &[usize], arity: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(points: &[usize], cur: &mut Vec<usize>, arity: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == arity {
            return f(cur);
        }
        for &p in points {
            cur.push(p);
            let ok = go(points, cur, arity, f);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    go(points, &mut Vec::with_capacity(arity), arity, f)
}

/// `value(R^M(m̄))` against `R^N(r m̄)` for every tuple inside `dom(r)`.
fn predicates_agree(m: &PModel, n: &PModel, r: &PartialMap, agree: &dyn Fn(Elem, Elem) -> bool) -> bool {
    let dom = r.domain();
    (0..m.language().len()).all(|p| {
        let arity = m.language().arity_at(p);
        for_each_tuple_in(&dom, arity, &mut |t| {
            let img: Vec<usize> = t.iter().map(|&x| r.get(x).expect("in domain")).collect();
            agree(m.value(p, t), n.value(p, &img))
        })
    })
}

/// `r` is a simple partial isomorphism from `m` to `n` (same algebra).
pub fn is_simple_partial_iso(m: &PModel, n: &PModel, r: &PartialMap) -> bool {
    r.source_len() == m.size()
        && r.domain().iter().all(|&x| r.get(x).is_some_and(|y| y < n.size()))
        && r.is_injective()
        && predicates_agree(m, n, r, &|a, b| a == b)
}

fn check_same_language(m: &PModel, n: &PModel) -> Result<(), BackForthError> {
    if m.language() != n.language() {
        return Err(BackForthError::LanguageMismatch);
    }
    Ok(())
}

fn extends_through<T>(
    x: &PartialMap,
    level: &[T],
    key: &dyn Fn(&T) -> &PartialMap,
    same: &dyn Fn(&T) -> bool,
) -> Vec<usize> {
    (0..level.len())
        .filter(|&i| same(&level[i]) && x.is_sub_of(key(&level[i])))
        .collect()
}

/// The greatest fixed-algebra system of length `n`, with its pruning trace.
pub fn find_system_fixed(m: &PModel, n: &PModel, len: usize) -> Result<BackForthReport<PartialMap>, BackForthError> {
    find_system_fixed_with_cap(m, n, len, DEFAULT_CANDIDATE_CAP)
}

pub fn find_system_fixed_with_cap(
    m: &PModel,
    n: &PModel,
    len: usize,
    cap: usize,
) -> Result<BackForthReport<PartialMap>, BackForthError> {
    if m.algebra() != n.algebra() {
        return Err(BackForthError::AlgebraMismatch);
    }
    check_same_language(m, n)?;
    let mut initial: Vec<PartialMap> = partial_injections(m.size(), n.size(), m.size(), cap)?
        .into_iter()
        .filter(|r| is_simple_partial_iso(m, n, r))
        .collect();
    initial.sort_by_key(|r| r.len());
    Ok(prune_fixed(initial, m.size(), n.size(), len))
}

fn prune_fixed(initial: Vec<PartialMap>, ms: usize, ns: usize, len: usize) -> BackForthReport<PartialMap> {
    prune(initial, len, &|r, level| {
        let sups = extends_through(r, level, &|x| x, &|_| true);
        for a in 0..ms {
            if !sups.iter().any(|&i| level[i].get(a).is_some()) {
                return Some(Step::Forth(a));
            }
        }
        for b in 0..ns {
            if !sups.iter().any(|&i| level[i].in_image(b)) {
                return Some(Step::Back(b));
            }
        }
        None
    })
}

/// Options for the mixed search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MixedOptions {
    /// Largest `|dom(p)|`; `None` means the larger carrier.
    pub fragment_bound: Option<usize>,
    /// Also require `a ∈ F` iff `p(a) ∈ G` on `dom(p)`.
    pub respect_filter: bool,
    pub cap: usize,
}

impl Default for MixedOptions {
    fn default() -> Self {
        MixedOptions {
            fragment_bound: None,
            respect_filter: true,
            cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

/// Connective instances `(op in A, args, result, op in B)`.
struct Instances(Vec<(usize, Vec<Elem>, Elem, usize)>);

impl Instances {
    fn new(a: &InterpretingLattice, b: &InterpretingLattice) -> Instances {
        let mut out = Vec::new();
        for (oa, op) in a.ops().iter().enumerate() {
            let ob = b.op_index(op.name()).expect("same signature");
            let mut buf = vec![Elem(0); op.arity()];
            for_each_tuple(a.size(), op.arity(), &mut buf, &mut |args| {
                out.push((oa, args.to_vec(), a.apply(oa, args), ob));
                true
            });
        }
        Instances(out)
    }
}

fn algebra_part_ok(
    p: &PartialMap,
    a: &InterpretingLattice,
    b: &InterpretingLattice,
    inst: &Instances,
    respect_filter: bool,
) -> bool {
    if !p.is_injective() {
        return false;
    }
    if respect_filter
        && p
            .domain()
            .into_iter()
            .any(|x| a.in_filter(Elem::from_index(x)) != b.in_filter(Elem::from_index(p.get(x).expect("dom"))))
    {
        return false;
    }
    inst.0.iter().all(|(_, args, res, ob)| {
        let Some(pr) = p.get(res.index()) else { return true };
        let mapped: Option<Vec<Elem>> = args.iter().map(|x| p.get(x.index()).map(Elem::from_index)).collect();
        match mapped {
            Some(mapped) => b.apply(*ob, &mapped).index() == pr,
            None => true,
        }
    })
}

/// `(p, r)` is a partial isomorphism between `m` and `n`.
pub fn is_partial_iso(m: &PModel, n: &PModel, x: &PartialIso, respect_filter: bool) -> bool {
    let (a, b) = (m.algebra(), n.algebra());
    if a.signature() != b.signature() || x.p.source_len() != a.size() || x.r.source_len() != m.size() {
        return false;
    }
    let inst = Instances::new(a, b);
    algebra_part_ok(&x.p, a, b, &inst, respect_filter) && domain_part_ok(m, n, x)
}

fn domain_part_ok(m: &PModel, n: &PModel, x: &PartialIso) -> bool {
    x.r.is_injective()
        && predicates_agree(m, n, &x.r, &|v, w| x.p.get(v.index()) == Some(w.index()))
}

/// The greatest mixed system of length `len`, over pairs with
/// `|dom(p)| ≤ fragment_bound`.
pub fn find_system_mixed(
    m: &PModel,
    n: &PModel,
    len: usize,
    opts: &MixedOptions,
) -> Result<BackForthReport<PartialIso>, BackForthError> {
    check_same_language(m, n)?;
    let (a, b) = (m.algebra(), n.algebra());
    if a.signature() != b.signature() {
        return Err(BackForthError::SignatureMismatch);
    }
    let inst = Instances::new(a, b);
    let bound = opts.fragment_bound.unwrap_or(a.size().max(b.size()));
    let ps: Vec<PartialMap> = partial_injections(a.size(), b.size(), bound, opts.cap)?
        .into_iter()
        .filter(|p| algebra_part_ok(p, a, b, &inst, opts.respect_filter))
        .collect();
    let rs = partial_injections(m.size(), n.size(), m.size(), opts.cap)?;
    let mut initial = Vec::new();
    for p in &ps {
        for r in &rs {
            let x = PartialIso {
                p: p.clone(),
                r: r.clone(),
            };
            if domain_part_ok(m, n, &x) {
                initial.push(x);
                if initial.len() > opts.cap {
                    return Err(BackForthError::TooLarge { cap: opts.cap });
                }
            }
        }
    }
    initial.sort_by_key(|x| (x.p.len(), x.r.len()));
    let sizes = (m.size(), n.size(), a.size(), b.size());
    Ok(prune_mixed(initial, sizes, len))
}

fn prune_mixed(
    initial: Vec<PartialIso>,
    (ms, ns, as_, bs): (usize, usize, usize, usize),
    len: usize,
) -> BackForthReport<PartialIso> {
    prune(initial, len, &|x, level| {
        // Group lookups: R-steps keep p, L-steps keep r.
        let by_p = extends_through(&x.r, level, &|y| &y.r, &|y| y.p == x.p);
        for e in 0..ms {
            if !by_p.iter().any(|&i| level[i].r.get(e).is_some()) {
                return Some(Step::Forth(e));
            }
        }
        for e in 0..ns {
            if !by_p.iter().any(|&i| level[i].r.in_image(e)) {
                return Some(Step::Back(e));
            }
        }
        let by_r = extends_through(&x.p, level, &|y| &y.p, &|y| y.r == x.r);
        for e in 0..as_ {
            if !by_r.iter().any(|&i| level[i].p.get(e).is_some()) {
                return Some(Step::ForthL(e));
            }
        }
        for e in 0..bs {
            if !by_r.iter().any(|&i| level[i].p.in_image(e)) {
                return Some(Step::BackL(e));
            }
        }
        None
    })
}

/// Re-verifies a fixed system: every member is a simple partial
/// isomorphism, levels are nested and nonempty, and Forth/Back hold.
pub fn verify_system_fixed(m: &PModel, n: &PModel, sys: &BackForthSystem<PartialMap>) -> bool {
    let members_ok = sys
        .levels
        .iter()
        .all(|l| !l.is_empty() && l.iter().all(|r| is_simple_partial_iso(m, n, r)));
    let nested = sys.levels.windows(2).all(|w| w[1].iter().all(|x| w[0].contains(x)));
    let extensible = sys.levels.windows(2).all(|w| {
        w[1].iter().all(|r| {
            (0..m.size()).all(|a| w[0].iter().any(|s| r.is_sub_of(s) && s.get(a).is_some()))
                && (0..n.size()).all(|b| w[0].iter().any(|s| r.is_sub_of(s) && s.in_image(b)))
        })
    });
    members_ok && nested && extensible
}

/// Mixed analogue of [`verify_system_fixed`].
pub fn verify_system_mixed(
    m: &PModel,
    n: &PModel,
    sys: &BackForthSystem<PartialIso>,
    respect_filter: bool,
) -> bool {
    let (a, b) = (m.algebra(), n.algebra());
    let members_ok = sys
        .levels
        .iter()
        .all(|l| !l.is_empty() && l.iter().all(|x| is_partial_iso(m, n, x, respect_filter)));
    let nested = sys.levels.windows(2).all(|w| w[1].iter().all(|x| w[0].contains(x)));
    let extensible = sys.levels.windows(2).all(|w| {
        w[1].iter().all(|x| {
            let r_ext = |ok: &dyn Fn(&PartialIso) -> bool| {
                w[0].iter().any(|y| y.p == x.p && x.r.is_sub_of(&y.r) && ok(y))
            };
            let p_ext = |ok: &dyn Fn(&PartialIso) -> bool| {
                w[0].iter().any(|y| y.r == x.r && x.p.is_sub_of(&y.p) && ok(y))
            };
            (0..m.size()).all(|e| r_ext(&|y| y.r.get(e).is_some()))
                && (0..n.size()).all(|e| r_ext(&|y| y.r.in_image(e)))
                && (0..a.size()).all(|e| p_ext(&|y| y.p.get(e).is_some()))
                && (0..b.size()).all(|e| p_ext(&|y| y.p.in_image(e)))
        })
    });
    members_ok && nested && extensible
}

/// Result of a transfer check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferReport {
    pub level_sizes: Vec<usize>,
    pub equivalence: Equivalence,
}

impl TransferReport {
    pub fn holds(&self) -> bool {
        self.equivalence.holds()
    }
}

/// Finds a fixed system of length `len` and confirms strong `len`-equivalence
/// by enumeration. Fails with [`BackForthError::NoSystem`] when there is no
/// system to transfer from.
pub fn transfer_check_fixed(
    m: &PModel,
    n: &PModel,
    len: usize,
    bounds: &EquivBounds,
) -> Result<TransferReport, BackForthError> {
    let report = find_system_fixed(m, n, len)?;
    if !report.exists() {
        return Err(BackForthError::NoSystem(len));
    }
    Ok(TransferReport {
        level_sizes: report.level_sizes(),
        equivalence: strong_equiv_n(m, n, len, bounds)?,
    })
}

/// Mixed analogue: a system of length `len` against nested-rank `len`
/// equivalence.
pub fn transfer_check_mixed(
    m: &PModel,
    n: &PModel,
    len: usize,
    opts: &MixedOptions,
    bounds: &EquivBounds,
) -> Result<TransferReport, BackForthError> {
    let report = find_system_mixed(m, n, len, opts)?;
    if !report.exists() {
        return Err(BackForthError::NoSystem(len));
    }
    Ok(TransferReport {
        level_sizes: report.level_sizes(),
        equivalence: equiv_n(m, n, len, bounds)?,
    })
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Forth(e) => write!(f, "forth to domain element #{e}"),
            Step::Back(e) => write!(f, "back to domain element #{e}"),
            Step::ForthL(e) => write!(f, "forth to carrier element #{e}"),
            Step::BackL(e) => write!(f, "back to carrier element #{e}"),
        }
    }
}

/// Names the point of a step using the two models.
pub fn describe_step(step: Step, m: &PModel, n: &PModel) -> String {
    match step {
        Step::Forth(e) => format!("forth {}", m.domain()[e]),
        Step::Back(e) => format!("back {}", n.domain()[e]),
        Step::ForthL(e) => format!("forth-algebra {}", m.algebra().label(Elem::from_index(e))),
        Step::BackL(e) => format!("back-algebra {}", n.algebra().label(Elem::from_index(e))),
    }
}

/// Renders a domain map with element names.
pub fn describe_map(r: &PartialMap, m: &PModel, n: &PModel) -> String {
    r.render(&|x| m.domain()[x].clone(), &|y| n.domain()[y].clone())
}

/// Renders `(p, r)` with carrier labels and element names.
pub fn describe_iso(x: &PartialIso, m: &PModel, n: &PModel) -> String {
    let (a, b) = (m.algebra(), n.algebra());
    format!(
        "p={} r={}",
        x.p.render(
            &|e| a.label(Elem::from_index(e)).to_string(),
            &|e| b.label(Elem::from_index(e)).to_string()
        ),
        describe_map(&x.r, m, n)
    )
}

/// Members of a level grouped by `|dom|`, for summaries.
pub fn size_histogram(level: &[PartialMap]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for r in level {
        *out.entry(r.len()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::language::PredicateLanguage;
    use crate::structure::{generate_models, GenOptions, PModelBuilder};
    use alloc::sync::Arc;

    fn unary(alg: InterpretingLattice, name: &str, values: &[&str]) -> PModel {
        let lang: Arc<PredicateLanguage> = Arc::new("R:1".parse().unwrap());
        let names: Vec<String> = (0..values.len()).map(|i| format!("e{i}")).collect();
        let mut b = PModelBuilder::new(name, Arc::new(alg), lang).domain(names.iter().cloned());
        for (i, v) in values.iter().enumerate() {
            b = b.set("R", &[names[i].as_str()], v);
        }
        b.build().unwrap()
    }

    #[test]
    fn identity_systems() {
        let (m1, m2) = fixtures::prime_requirement_models();
        for m in [&m1, &m2] {
            for len in 0..4 {
                let r = find_system_fixed(m, m, len).unwrap();
                assert!(r.exists());
                assert!(r.levels[len].contains(&PartialMap::identity(m.size())));
                assert!(verify_system_fixed(m, m, &r.system().unwrap()));
            }
        }
    }

    #[test]
    fn singletons_with_equal_values() {
        let a = unary(fixtures::godel_chain(3), "a", &["1/2"]);
        let b = unary(fixtures::godel_chain(3), "b", &["1/2"]);
        assert!(find_system_fixed(&a, &b, 5).unwrap().exists());
    }

    #[test]
    fn different_true_counts_fail_at_one() {
        let one = unary(fixtures::boolean(), "one", &["1", "0"]);
        let two = unary(fixtures::boolean(), "two", &["1", "1"]);
        let r = find_system_fixed(&one, &two, 1).unwrap();
        assert!(!r.exists());
        assert_eq!(r.level_sizes(), vec![3, 0]);
        let obs = r.obstruction.unwrap();
        assert_eq!(obs.level, 1);
        assert!(obs.map.is_empty());
        assert_eq!(obs.step, Step::Forth(1));
        assert!(find_system_fixed(&one, &two, 0).unwrap().exists());
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let a = unary(fixtures::boolean(), "a", &["1"]);
        let b = unary(fixtures::godel_chain(3), "b", &["1"]);
        assert_eq!(find_system_fixed(&a, &b, 1), Err(BackForthError::AlgebraMismatch));
    }

    #[test]
    fn pruning_is_order_independent() {
        let alg = Arc::new(fixtures::godel_chain(3));
        let lang: Arc<PredicateLanguage> = Arc::new("R:1 S:2".parse().unwrap());
        let pool = generate_models(&alg, &lang, &GenOptions::sample(3, 12, 7)).unwrap();
        for m in &pool {
            for n in &pool {
                let initial: Vec<PartialMap> = partial_injections(m.size(), n.size(), m.size(), 10_000)
                    .unwrap()
                    .into_iter()
                    .filter(|r| is_simple_partial_iso(m, n, r))
                    .collect();
                let mut reversed = initial.clone();
                reversed.reverse();
                let a = prune_fixed(initial, m.size(), n.size(), 3);
                let b = prune_fixed(reversed, m.size(), n.size(), 3);
                for (x, y) in a.levels.iter().zip(&b.levels) {
                    let mut x = x.clone();
                    let mut y = y.clone();
                    x.sort();
                    y.sort();
                    assert_eq!(x, y);
                }
            }
        }
    }

    #[test]
    fn systems_are_monotone_in_length() {
        let alg = Arc::new(fixtures::boolean());
        let lang: Arc<PredicateLanguage> = Arc::new("R:1 S:2".parse().unwrap());
        let pool = generate_models(&alg, &lang, &GenOptions::sample(3, 10, 3)).unwrap();
        for m in &pool {
            for n in &pool {
                let long = find_system_fixed(m, n, 3).unwrap();
                for len in 0..3 {
                    let short = find_system_fixed(m, n, len).unwrap();
                    if long.exists() {
                        assert!(short.exists());
                        assert_eq!(short.levels[..], long.levels[..=len]);
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_identity_and_empty_level() {
        let (m1, _) = fixtures::prime_requirement_models();
        let r = find_system_mixed(&m1, &m1, 2, &MixedOptions::default()).unwrap();
        assert!(r.exists());
        assert!(verify_system_mixed(&m1, &m1, &r.system().unwrap(), true));
        let id = PartialIso {
            p: PartialMap::identity(4),
            r: PartialMap::identity(2),
        };
        assert!(r.levels[2].contains(&id));

        let a = unary(fixtures::boolean_lattice(), "a", &["1"]);
        let b = unary(fixtures::four_boolean_repaired(), "b", &["top"]);
        let r = find_system_mixed(&a, &b, 0, &MixedOptions::default()).unwrap();
        assert!(r.exists());
        assert!(r.levels[0].contains(&PartialIso {
            p: PartialMap::empty(2),
            r: PartialMap::empty(1),
        }));
    }

    #[test]
    fn mixed_two_versus_four() {
        let a = unary(fixtures::boolean_lattice(), "a", &["1"]);
        let b = unary(fixtures::four_boolean_repaired(), "b", &["top"]);
        let r = find_system_mixed(&a, &b, 3, &MixedOptions::default()).unwrap();
        assert!(!r.exists());
        let obs = r.obstruction.unwrap();
        assert!(obs.map.p.is_empty() && obs.map.r.is_empty(), "{obs:?}");
    }

    #[test]
    fn filter_respect_matters() {
        // Same lattice, filters {b, top} and {a, top}: the identity commutes
        // with every connective and every value, yet `exists x. R(x)` is
        // valid only on the left.
        let left = unary(fixtures::four_boolean(&["b", "top"]).unwrap(), "l", &["b"]);
        let right = unary(fixtures::four_boolean(&["a", "top"]).unwrap(), "r", &["b"]);
        let literal = MixedOptions {
            respect_filter: false,
            ..MixedOptions::default()
        };
        assert!(find_system_mixed(&left, &right, 4, &literal).unwrap().exists());
        assert!(!equiv_n(&left, &right, 3, &EquivBounds::default()).unwrap().holds());
        let r = find_system_mixed(&left, &right, 1, &MixedOptions::default()).unwrap();
        assert!(!r.exists());
        assert_eq!(r.obstruction.unwrap().step, Step::Forth(0));
    }

    #[test]
    fn fixed_transfer_on_a_pool() {
        let alg = Arc::new(fixtures::godel_chain(3));
        let lang: Arc<PredicateLanguage> = Arc::new("P:1 R:1".parse().unwrap());
        let pool = generate_models(&alg, &lang, &GenOptions::exhaustive(2)).unwrap();
        let bounds = EquivBounds::default();
        let mut found = 0;
        for m in pool.iter().step_by(7) {
            for n in pool.iter().step_by(5) {
                match transfer_check_fixed(m, n, 1, &bounds) {
                    Ok(t) => {
                        assert!(t.holds(), "{:?} {:?}", m.tables(), n.tables());
                        found += 1;
                    }
                    Err(BackForthError::NoSystem(1)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn mixed_transfer_on_isomorphic_copies() {
        let a = unary(fixtures::godel_chain(3), "a", &["1/2", "1"]);
        let b = unary(fixtures::godel_chain(3), "b", &["1", "1/2"]);
        let t = transfer_check_mixed(&a, &b, 4, &MixedOptions::default(), &EquivBounds::default()).unwrap();
        assert!(t.holds());
    }
}

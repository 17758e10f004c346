//! Finite P-models: a domain, and for every predicate a total table from
//! domain tuples into the carrier of an interpreting lattice.
//!
//! Domain names are kept sorted, so element `i` is the `i`-th name in
//! lexicographic order. Relation tables are row-major over those indices.

use alloc::{
    collections::BTreeMap,
    format,
    string::{String, ToString},
    sync::Arc,
    vec,
    vec::Vec,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Elem, InterpretingLattice};
use crate::language::PredicateLanguage;

/// Default ceiling on exhaustively generated models.
pub const DEFAULT_MODEL_CAP: usize = 1_000_000;

/// Largest domain for which isomorphism is decided by permutation.
pub const ISO_DOMAIN_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("domain is empty")]
    EmptyDomain,
    #[error("duplicate domain element `{0}`")]
    DuplicateElement(String),
    #[error("unknown domain element `{0}`")]
    UnknownElement(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("`{pred}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("value `{0}` is not in the carrier")]
    ValueNotInCarrier(String),
    #[error("no value for {pred}({tuple}) and no default declared")]
    MissingTupleNoDefault { pred: String, tuple: String },
    #[error("{pred}({tuple}) assigned twice")]
    DuplicateAssignment { pred: String, tuple: String },
    #[error("interpretation of `{pred}` has {found} entries, expected {expected}")]
    BadTableSize {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("model generation exceeds the cap of {cap} models")]
    BoundsTooLarge { cap: usize },
    #[error("domain of {0} elements is too large for isomorphism testing")]
    TooLargeForIso(usize),
}

/// A finite P-model `(A, F, M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PModel {
    name: String,
    algebra: Arc<InterpretingLattice>,
    language: Arc<PredicateLanguage>,
    domain: Vec<String>,
    interp: Vec<Vec<Elem>>,
}

pub(crate) fn pow(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, _| acc.saturating_mul(n))
}

impl PModel {
    /// Builds a model from raw tables. `interp[p]` is row-major over the
    /// domain as given; the domain is re-sorted if necessary.
    pub fn from_parts(
        name: impl Into<String>,
        algebra: Arc<InterpretingLattice>,
        language: Arc<PredicateLanguage>,
        domain: Vec<String>,
        interp: Vec<Vec<Elem>>,
    ) -> Result<PModel, StructureError> {
        let n = domain.len();
        if n == 0 {
            return Err(StructureError::EmptyDomain);
        }
        if interp.len() != language.len() {
            return Err(StructureError::BadTableSize {
                pred: "<language>".to_string(),
                expected: language.len(),
                found: interp.len(),
            });
        }
        for (i, table) in interp.iter().enumerate() {
            let expected = pow(n, language.arity_at(i));
            if table.len() != expected {
                return Err(StructureError::BadTableSize {
                    pred: language.name(i).to_string(),
                    expected,
                    found: table.len(),
                });
            }
            if let Some(bad) = table.iter().find(|e| e.index() >= algebra.size()) {
                return Err(StructureError::ValueNotInCarrier(format!("#{}", bad.0)));
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| domain[a].cmp(&domain[b]));
        for w in order.windows(2) {
            if domain[w[0]] == domain[w[1]] {
                return Err(StructureError::DuplicateElement(domain[w[0]].clone()));
            }
        }
        let model = PModel {
            name: name.into(),
            algebra,
            language,
            domain,
            interp,
        };
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            Ok(model)
        } else {
            Ok(model.permuted(&order))
        }
    }

    /// The model whose element `i` is this model's element `order[i]`.
    fn permuted(&self, order: &[usize]) -> PModel {
        let n = self.size();
        let domain = order.iter().map(|&o| self.domain[o].clone()).collect();
        let mut interp = Vec::with_capacity(self.interp.len());
        for (p, table) in self.interp.iter().enumerate() {
            let arity = self.language.arity_at(p);
            let mut out = vec![Elem(0); table.len()];
            let mut tuple = vec![0usize; arity];
            for (idx, slot) in out.iter_mut().enumerate() {
                decode_tuple(idx, n, &mut tuple);
                let old: usize = tuple.iter().fold(0, |acc, &t| acc * n + order[t]);
                *slot = table[old];
            }
            interp.push(out);
        }
        PModel {
            name: self.name.clone(),
            algebra: self.algebra.clone(),
            language: self.language.clone(),
            domain,
            interp,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> PModel {
        self.name = name.into();
        self
    }

    pub fn algebra(&self) -> &InterpretingLattice {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> &Arc<InterpretingLattice> {
        &self.algebra
    }

    pub fn language(&self) -> &PredicateLanguage {
        &self.language
    }

    pub fn language_arc(&self) -> &Arc<PredicateLanguage> {
        &self.language
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.domain.binary_search_by(|d| d.as_str().cmp(name)).ok()
    }

    /// The table of predicate `p` (language index), row-major.
    pub fn table(&self, p: usize) -> &[Elem] {
        &self.interp[p]
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.interp
    }

    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        let n = self.size();
        tuple.iter().fold(0, |acc, &t| acc * n + t)
    }

    pub fn value(&self, p: usize, tuple: &[usize]) -> Elem {
        self.interp[p][self.tuple_index(tuple)]
    }

    /// Looks up `R(e1, ..., ek)` by names.
    pub fn value_of(&self, pred: &str, args: &[&str]) -> Result<Elem, StructureError> {
        let p = self
            .language
            .index(pred)
            .ok_or_else(|| StructureError::UnknownPredicate(pred.to_string()))?;
        let arity = self.language.arity_at(p);
        if arity != args.len() {
            return Err(StructureError::ArityMismatch {
                pred: pred.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        let tuple = args
            .iter()
            .map(|a| {
                self.element(a)
                    .ok_or_else(|| StructureError::UnknownElement(a.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.value(p, &tuple))
    }

    /// A copy with one entry changed.
    pub fn with_value(&self, p: usize, tuple: &[usize], v: Elem) -> PModel {
        let mut out = self.clone();
        let i = self.tuple_index(tuple);
        out.interp[p][i] = v;
        out
    }

    /// A copy over another algebra, with every value mapped through `f`.
    pub fn map_values(
        &self,
        algebra: Arc<InterpretingLattice>,
        f: impl Fn(Elem) -> Elem,
    ) -> PModel {
        PModel {
            name: self.name.clone(),
            algebra,
            language: self.language.clone(),
            domain: self.domain.clone(),
            interp: self
                .interp
                .iter()
                .map(|t| t.iter().map(|&e| f(e)).collect())
                .collect(),
        }
    }

    /// Calls `f(p, tuple, value)` for every entry, predicates in language order
    /// and tuples in row-major order.
    pub fn for_each_entry(&self, mut f: impl FnMut(usize, &[usize], Elem)) {
        let n = self.size();
        for (p, table) in self.interp.iter().enumerate() {
            let mut tuple = vec![0usize; self.language.arity_at(p)];
            for (idx, &v) in table.iter().enumerate() {
                decode_tuple(idx, n, &mut tuple);
                f(p, &tuple, v);
            }
        }
    }

    /// Isomorphism-invariant key: the least relabelled table vector over all
    /// permutations of the domain. Only feasible for small domains.
    pub fn canonical_key(&self) -> Result<Vec<u16>, StructureError> {
        let n = self.size();
        if n > ISO_DOMAIN_CAP {
            return Err(StructureError::TooLargeForIso(n));
        }
        let mut best: Option<Vec<u16>> = None;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut key = Vec::new();
        permutations(&mut perm, 0, &mut |perm| {
            key.clear();
            key.push(n as u16);
            for (p, table) in self.interp.iter().enumerate() {
                let arity = self.language.arity_at(p);
                let mut tuple = vec![0usize; arity];
                // Entry at new tuple t is the old value at perm applied to t.
                for idx in 0..table.len() {
                    decode_tuple(idx, n, &mut tuple);
                    let old = tuple.iter().fold(0, |acc, &t| acc * n + perm[t]);
                    key.push(table[old].0);
                }
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key.clone());
            }
        });
        Ok(best.unwrap_or_default())
    }

    /// Same algebra and language, and a bijection of domains preserving every value.
    pub fn is_isomorphic(&self, other: &PModel) -> Result<bool, StructureError> {
        if self.size() != other.size()
            || self.language != other.language
            || self.algebra != other.algebra
        {
            return Ok(false);
        }
        Ok(self.canonical_key()? == other.canonical_key()?)
    }
}

pub(crate) fn decode_tuple(mut idx: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
}

fn permutations(perm: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permutations(perm, k + 1, f);
        perm.swap(k, i);
    }
}

/// Builds a model entry by entry, by name.
#[derive(Clone, Debug)]
pub struct PModelBuilder {
    name: String,
    algebra: Arc<InterpretingLattice>,
    language: Arc<PredicateLanguage>,
    domain: Vec<String>,
    entries: Vec<(String, Vec<String>, String)>,
    defaults: Vec<(String, String)>,
}

impl PModelBuilder {
    pub fn new(
        name: impl Into<String>,
        algebra: Arc<InterpretingLattice>,
        language: Arc<PredicateLanguage>,
    ) -> Self {
        PModelBuilder {
            name: name.into(),
            algebra,
            language,
            domain: Vec::new(),
            entries: Vec::new(),
            defaults: Vec::new(),
        }
    }

    pub fn domain<I, S>(mut self, elems: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.domain = elems.into_iter().map(Into::into).collect();
        self
    }

    pub fn set(mut self, pred: &str, args: &[&str], value: &str) -> Self {
        self.entries.push((
            pred.to_string(),
            args.iter().map(|a| a.to_string()).collect(),
            value.to_string(),
        ));
        self
    }

    pub fn push(&mut self, pred: String, args: Vec<String>, value: String) {
        self.entries.push((pred, args, value));
    }

    pub fn default_value(mut self, pred: &str, value: &str) -> Self {
        self.defaults.push((pred.to_string(), value.to_string()));
        self
    }

    pub fn push_default(&mut self, pred: String, value: String) {
        self.defaults.push((pred, value));
    }

    pub fn build(self) -> Result<PModel, StructureError> {
        let mut domain = self.domain.clone();
        domain.sort();
        if domain.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        for w in domain.windows(2) {
            if w[0] == w[1] {
                return Err(StructureError::DuplicateElement(w[0].clone()));
            }
        }
        let n = domain.len();
        let alg = &self.algebra;
        let lang = &self.language;
        let value = |tok: &str| {
            alg.find(tok)
                .ok_or_else(|| StructureError::ValueNotInCarrier(tok.to_string()))
        };
        let pred_index = |pred: &str| {
            lang.index(pred)
                .ok_or_else(|| StructureError::UnknownPredicate(pred.to_string()))
        };
        let mut tables: Vec<Vec<Option<Elem>>> = (0..lang.len())
            .map(|p| vec![None; pow(n, lang.arity_at(p))])
            .collect();
        let mut defaults: BTreeMap<usize, Elem> = BTreeMap::new();
        for (pred, v) in &self.defaults {
            let p = pred_index(pred)?;
            defaults.insert(p, value(v)?);
        }
        for (pred, args, v) in &self.entries {
            let p = pred_index(pred)?;
            let arity = lang.arity_at(p);
            if args.len() != arity {
                return Err(StructureError::ArityMismatch {
                    pred: pred.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            let mut idx = 0;
            for a in args {
                let i = domain
                    .binary_search(a)
                    .map_err(|_| StructureError::UnknownElement(a.clone()))?;
                idx = idx * n + i;
            }
            let slot = &mut tables[p][idx];
            if slot.is_some() {
                return Err(StructureError::DuplicateAssignment {
                    pred: pred.clone(),
                    tuple: args.join(","),
                });
            }
            *slot = Some(value(v)?);
        }
        let mut interp = Vec::with_capacity(tables.len());
        for (p, table) in tables.into_iter().enumerate() {
            let mut out = Vec::with_capacity(table.len());
            let mut tuple = vec![0usize; lang.arity_at(p)];
            for (idx, slot) in table.into_iter().enumerate() {
                match slot.or_else(|| defaults.get(&p).copied()) {
                    Some(v) => out.push(v),
                    None => {
                        decode_tuple(idx, n, &mut tuple);
                        let names: Vec<&str> = tuple.iter().map(|&t| domain[t].as_str()).collect();
                        return Err(StructureError::MissingTupleNoDefault {
                            pred: lang.name(p).to_string(),
                            tuple: names.join(","),
                        });
                    }
                }
            }
            interp.push(out);
        }
        PModel::from_parts(self.name, self.algebra, self.language, domain, interp)
    }
}

/// An assignment of domain elements to variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    pairs: BTreeMap<String, usize>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn with(mut self, var: &str, elem: usize) -> Self {
        self.pairs.insert(var.to_string(), elem);
        self
    }

    pub fn set(&mut self, var: &str, elem: usize) {
        self.pairs.insert(var.to_string(), elem);
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.pairs.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.pairs.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// How [`generate_models`] walks the space of models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    /// Every model, failing when there are more than `cap`.
    Exhaustive { cap: usize },
    /// `count` models, each with a uniformly drawn domain size and uniformly
    /// drawn values, from a seeded stream.
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenOptions {
    pub min_domain: usize,
    pub max_domain: usize,
    pub mode: GenMode,
}

impl GenOptions {
    pub fn exhaustive(max_domain: usize) -> Self {
        GenOptions {
            min_domain: 1,
            max_domain,
            mode: GenMode::Exhaustive {
                cap: DEFAULT_MODEL_CAP,
            },
        }
    }

    pub fn sample(max_domain: usize, count: usize, seed: u64) -> Self {
        GenOptions {
            min_domain: 1,
            max_domain,
            mode: GenMode::Sample { count, seed },
        }
    }
}

/// Generated element names, zero-padded so that name order is index order.
pub fn element_name(i: usize, n: usize) -> String {
    let width = format!("{}", n.saturating_sub(1)).len();
    format!("d{i:0width$}")
}

/// Number of models with domain sizes in the range, saturating.
pub fn count_models(alg: &InterpretingLattice, lang: &PredicateLanguage, min: usize, max: usize) -> usize {
    (min.max(1)..=max)
        .map(|n| {
            let entries: usize = lang.iter().map(|(_, a)| pow(n, a)).fold(0, usize::saturating_add);
            pow(alg.size(), entries)
        })
        .fold(0, usize::saturating_add)
}

/// Models over one algebra and language, by ascending domain size. In
/// exhaustive mode tables are counted up in row-major, predicate-major order.
pub fn generate_models(
    alg: &Arc<InterpretingLattice>,
    lang: &Arc<PredicateLanguage>,
    opts: &GenOptions,
) -> Result<Vec<PModel>, StructureError> {
    if opts.max_domain == 0 {
        return Err(StructureError::EmptyDomain);
    }
    let min = opts.min_domain.max(1);
    let k = alg.size();
    let mut out = Vec::new();
    match opts.mode {
        GenMode::Exhaustive { cap } => {
            if count_models(alg, lang, min, opts.max_domain) > cap {
                return Err(StructureError::BoundsTooLarge { cap });
            }
            for n in min..=opts.max_domain {
                let sizes: Vec<usize> = lang.iter().map(|(_, a)| pow(n, a)).collect();
                let total: usize = sizes.iter().sum();
                let domain: Vec<String> = (0..n).map(|i| element_name(i, n)).collect();
                let mut digits = vec![0u16; total];
                let mut serial = 0usize;
                loop {
                    let mut interp = Vec::with_capacity(sizes.len());
                    let mut at = 0;
                    for &s in &sizes {
                        interp.push(digits[at..at + s].iter().map(|&d| Elem(d)).collect());
                        at += s;
                    }
                    out.push(PModel {
                        name: format!("{}-n{}-{}", alg.name(), n, serial),
                        algebra: alg.clone(),
                        language: lang.clone(),
                        domain: domain.clone(),
                        interp,
                    });
                    serial += 1;
                    // Increment the last digit first.
                    let mut i = total;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        if (digits[i] as usize) + 1 < k {
                            digits[i] += 1;
                            break;
                        }
                        digits[i] = 0;
                    }
                    if i == 0 && digits.iter().all(|&d| d == 0) {
                        break;
                    }
                }
            }
        }
        GenMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for serial in 0..count {
                let n = rng.gen_range(min..=opts.max_domain);
                let domain: Vec<String> = (0..n).map(|i| element_name(i, n)).collect();
                let interp = lang
                    .iter()
                    .map(|(_, a)| {
                        (0..pow(n, a))
                            .map(|_| Elem::from_index(rng.gen_range(0..k)))
                            .collect()
                    })
                    .collect();
                out.push(PModel {
                    name: format!("{}-sample-{}", alg.name(), serial),
                    algebra: alg.clone(),
                    language: lang.clone(),
                    domain,
                    interp,
                });
            }
        }
    }
    Ok(out)
}

/// One representative per isomorphism class, keeping the first seen.
pub fn dedup_isomorphic(models: Vec<PModel>) -> Result<Vec<PModel>, StructureError> {
    let mut seen = alloc::collections::BTreeSet::new();
    let mut out = Vec::new();
    for m in models {
        if seen.insert(m.canonical_key()?) {
            out.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn unary() -> Arc<PredicateLanguage> {
        Arc::new("R:1".parse().unwrap())
    }

    #[test]
    fn builder_and_lookup() {
        let (m1, _) = fixtures::prime_requirement_models();
        assert_eq!(m1.domain(), &["x".to_string(), "y".to_string()]);
        let a = m1.algebra().elem("a").unwrap();
        assert_eq!(m1.value_of("R", &["x"]).unwrap(), a);
        assert_eq!(
            m1.value_of("R", &["z"]),
            Err(StructureError::UnknownElement("z".into()))
        );
    }

    #[test]
    fn domain_is_sorted_and_tables_follow() {
        let alg = Arc::new(fixtures::boolean());
        let lang: Arc<PredicateLanguage> = Arc::new("S:2".parse().unwrap());
        let m = PModelBuilder::new("m", alg, lang)
            .domain(["b", "a"])
            .set("S", &["b", "a"], "1")
            .default_value("S", "0")
            .build()
            .unwrap();
        assert_eq!(m.domain(), &["a".to_string(), "b".to_string()]);
        assert_eq!(m.table(0), &[Elem(0), Elem(0), Elem(1), Elem(0)]);
    }

    #[test]
    fn from_parts_resorts() {
        let alg = Arc::new(fixtures::boolean());
        let lang: Arc<PredicateLanguage> = Arc::new("S:2".parse().unwrap());
        // Domain [b, a]; S(b, a) = 1 is entry (0, 1).
        let m = PModel::from_parts(
            "m",
            alg,
            lang,
            vec!["b".into(), "a".into()],
            vec![vec![Elem(0), Elem(1), Elem(0), Elem(0)]],
        )
        .unwrap();
        assert_eq!(m.value_of("S", &["b", "a"]).unwrap(), Elem(1));
        assert_eq!(m.value_of("S", &["a", "b"]).unwrap(), Elem(0));
    }

    #[test]
    fn builder_errors() {
        let alg = Arc::new(fixtures::boolean());
        let b = || PModelBuilder::new("m", alg.clone(), unary());
        assert_eq!(b().build().unwrap_err(), StructureError::EmptyDomain);
        assert_eq!(
            b().domain(["x"]).build().unwrap_err(),
            StructureError::MissingTupleNoDefault {
                pred: "R".into(),
                tuple: "x".into()
            }
        );
        assert_eq!(
            b().domain(["x"]).set("R", &["x"], "7").build().unwrap_err(),
            StructureError::ValueNotInCarrier("7".into())
        );
        assert!(matches!(
            b().domain(["x"]).set("R", &["x", "x"], "1").build().unwrap_err(),
            StructureError::ArityMismatch { .. }
        ));
        assert!(matches!(
            b().domain(["x", "x"]).default_value("R", "1").build().unwrap_err(),
            StructureError::DuplicateElement(_)
        ));
    }

    #[test]
    fn singleton_all_top() {
        let alg = Arc::new(fixtures::godel_chain(5));
        let lang: Arc<PredicateLanguage> = Arc::new("R:1 S:2 T:0".parse().unwrap());
        let m = PModelBuilder::new("top", alg, lang)
            .domain(["m"])
            .default_value("R", "1")
            .default_value("S", "1")
            .default_value("T", "1")
            .build()
            .unwrap();
        assert_eq!(m.size(), 1);
    }

    #[test]
    fn generation_counts() {
        let two = Arc::new(fixtures::boolean());
        assert_eq!(generate_models(&two, &unary(), &GenOptions::exhaustive(1)).unwrap().len(), 2);
        assert_eq!(
            generate_models(&two, &unary(), &GenOptions::exhaustive(0)).unwrap_err(),
            StructureError::EmptyDomain
        );
        // 2 + 4 + 8 models of a unary predicate over 2 on domains 1..3.
        assert_eq!(generate_models(&two, &unary(), &GenOptions::exhaustive(3)).unwrap().len(), 14);
        let mut small = GenOptions::exhaustive(3);
        small.mode = GenMode::Exhaustive { cap: 10 };
        assert_eq!(
            generate_models(&two, &unary(), &small).unwrap_err(),
            StructureError::BoundsTooLarge { cap: 10 }
        );
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = Arc::new(fixtures::godel_chain(5));
        let lang: Arc<PredicateLanguage> = Arc::new("R:1 S:2".parse().unwrap());
        let a = generate_models(&g, &lang, &GenOptions::sample(3, 20, 7)).unwrap();
        let b = generate_models(&g, &lang, &GenOptions::sample(3, 20, 7)).unwrap();
        assert_eq!(a, b);
        let c = generate_models(&g, &lang, &GenOptions::sample(3, 20, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn isomorphism_classes() {
        let two = Arc::new(fixtures::boolean());
        let lang: Arc<PredicateLanguage> = Arc::new("S:2".parse().unwrap());
        let all = generate_models(&two, &lang, &GenOptions::exhaustive(2)).unwrap();
        // Directed graphs with loops: 2 on one vertex, 10 on two.
        assert_eq!(dedup_isomorphic(all).unwrap().len(), 12);
    }

    #[test]
    fn element_names_sort_like_indices() {
        let names: Vec<String> = (0..12).map(|i| element_name(i, 12)).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    proptest! {
        #[test]
        fn generated_models_are_valid(seed in any::<u64>()) {
            let g = Arc::new(fixtures::ul_sixths());
            let lang: Arc<PredicateLanguage> = Arc::new("R:1 S:2 T:0".parse().unwrap());
            for m in generate_models(&g, &lang, &GenOptions::sample(3, 5, seed)).unwrap() {
                let rebuilt = PModel::from_parts(
                    m.name(), g.clone(), lang.clone(), m.domain().to_vec(), m.tables().to_vec(),
                ).unwrap();
                prop_assert_eq!(rebuilt, m);
            }
        }

        #[test]
        fn canonical_key_is_invariant(seed in any::<u64>()) {
            let two = Arc::new(fixtures::boolean());
            let lang: Arc<PredicateLanguage> = Arc::new("S:2 R:1".parse().unwrap());
            let m = generate_models(&two, &lang, &GenOptions::sample(4, 1, seed)).unwrap().remove(0);
            let n = m.size();
            let reversed: Vec<usize> = (0..n).rev().collect();
            let p = m.permuted(&reversed);
            prop_assert!(m.is_isomorphic(&p).unwrap());
        }
    }
}

//! Brute-force checks of the preservation lemmas and replays of the worked
//! examples.
//!
//! Everything here quantifies over generated models up to explicit bounds,
//! so a clean run means "closed up to bounds", never full preservation.

use alloc::{
    format,
    string::{String, ToString},
    sync::Arc,
    vec::Vec,
};

use crate::algebra::{AlgebraError, Elem, InterpretingLattice, Rational};
use crate::bridge::{self, BridgeError};
use crate::fixtures::{self, FixtureError, UlVariant};
use crate::language::{
    classify_sentence, parse_formula, Formula, LanguageError, PositiveForm, PredicateLanguage,
    SentenceClass,
};
use crate::morphisms::{
    check_morphism, find_morphisms, is_protomorphism_wrt, MorphismError, MorphismKind,
    MorphismOptions, MorphismWitness, SearchMode,
};
use crate::semantics::{atomic_witness, AtomTest, Compiled, SemanticsError};
use crate::structure::{generate_models, GenOptions, PModel, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PreservationError {
    #[error("algebra `{0}` is not integral with filter {{top}}")]
    NonIntegralAlgebra(String),
    #[error("`{0}` is not an existential-positive sentence")]
    NotExistentialPositive(String),
    #[error("replayed examples drifted: {0:?}")]
    FixtureDrift(Vec<String>),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
}

/// How [`check_closure`] builds its model pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureOptions {
    pub generation: GenOptions,
    /// Keep going after the first counterexample.
    pub collect_all: bool,
    pub morphisms: MorphismOptions,
}

impl ClosureOptions {
    pub fn exhaustive(max_domain: usize) -> Self {
        ClosureOptions {
            generation: GenOptions::exhaustive(max_domain),
            collect_all: false,
            morphisms: MorphismOptions::default(),
        }
    }
}

/// `M ⊨ f`, a witness `M → N` of the requested kind, and `N ⊭ f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub source: PModel,
    pub target: PModel,
    pub witness: MorphismWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    pub models: usize,
    /// Pairs `(M, N)` with `M ⊨ f` and `N ⊭ f` that were searched.
    pub pairs_searched: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl ClosureReport {
    /// Closed up to the bounds the pool was generated with.
    pub fn closed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Generates models over every algebra of the pool.
pub fn model_pool(
    pool: &[Arc<InterpretingLattice>],
    lang: &Arc<PredicateLanguage>,
    opts: &GenOptions,
) -> Result<Vec<PModel>, PreservationError> {
    let mut out = Vec::new();
    for alg in pool {
        out.extend(generate_models(alg, lang, opts)?);
    }
    Ok(out)
}

/// Searches pairs `M ⊨ f`, `N ⊭ f` for a `kind` witness `M → N`.
pub fn check_closure(
    f: &Formula,
    lang: &Arc<PredicateLanguage>,
    kind: MorphismKind,
    pool: &[Arc<InterpretingLattice>],
    opts: &ClosureOptions,
) -> Result<ClosureReport, PreservationError> {
    f.require_sentence()?;
    let models = model_pool(pool, lang, &opts.generation)?;
    check_closure_on(f, kind, &models, opts)
}

/// [`check_closure`] over an explicit model list.
pub fn check_closure_on(
    f: &Formula,
    kind: MorphismKind,
    models: &[PModel],
    opts: &ClosureOptions,
) -> Result<ClosureReport, PreservationError> {
    let mut valid = Vec::with_capacity(models.len());
    for m in models {
        valid.push(Compiled::for_model(f, m)?.holds(m));
    }
    let mut report = ClosureReport {
        models: models.len(),
        pairs_searched: 0,
        counterexamples: Vec::new(),
    };
    for (i, m) in models.iter().enumerate() {
        if !valid[i] {
            continue;
        }
        for (j, n) in models.iter().enumerate() {
            if valid[j] {
                continue;
            }
            if kind.needs_algebra_map() && m.algebra().signature() != n.algebra().signature() {
                continue;
            }
            report.pairs_searched += 1;
            let found = find_morphisms(kind, m, n, SearchMode::First, &opts.morphisms)?;
            if let Some(w) = found.witnesses.into_iter().next() {
                report.counterexamples.push(Counterexample {
                    source: m.clone(),
                    target: n.clone(),
                    witness: w,
                });
                if !opts.collect_all {
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// Re-checks a counterexample from scratch.
pub fn verify_counterexample(
    f: &Formula,
    c: &Counterexample,
    opts: &MorphismOptions,
) -> Result<bool, PreservationError> {
    Ok(Compiled::for_model(f, &c.source)?.holds(&c.source)
        && !Compiled::for_model(f, &c.target)?.holds(&c.target)
        && check_morphism(&c.witness, &c.source, &c.target, opts)?.holds())
}

/// Tally of an atomic-criterion run.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CriterionReport {
    pub checked: usize,
    /// `(model index, sentence index)` where the criterion and evaluation disagree.
    pub mismatches: Vec<(usize, usize)>,
}

impl CriterionReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn positive_forms(sentences: &[Formula], class: SentenceClass) -> Result<Vec<PositiveForm>, PreservationError> {
    sentences
        .iter()
        .map(|f| {
            if !classify_sentence(f)?.contains(&class) {
                return Err(PreservationError::NotExistentialPositive(f.to_string()));
            }
            Ok(PositiveForm::of(f).expect("classified"))
        })
        .collect()
}

fn criterion(
    models: &[PModel],
    sentences: &[Formula],
    forms: &[PositiveForm],
    test: AtomTest,
) -> Result<CriterionReport, PreservationError> {
    let mut report = CriterionReport::default();
    for (i, m) in models.iter().enumerate() {
        for (j, f) in sentences.iter().enumerate() {
            let direct = Compiled::for_model(f, m)?.holds(m);
            let atomic = atomic_witness(m, &forms[j], test)?.is_some();
            report.checked += 1;
            if direct != atomic {
                report.mismatches.push((i, j));
            }
        }
    }
    Ok(report)
}

/// For e.∧.p sentences: `M ⊨ ψ` iff some disjunct has an assignment sending
/// every atom into the filter.
pub fn verify_designated_atomic_criterion(
    models: &[PModel],
    sentences: &[Formula],
) -> Result<CriterionReport, PreservationError> {
    let forms = positive_forms(sentences, SentenceClass::ExistentialAndPositive)?;
    criterion(models, sentences, &forms, AtomTest::Designated)
}

fn require_integral(alg: &InterpretingLattice) -> Result<(), PreservationError> {
    let integral = alg.is_integral().unwrap_or(false);
    if !integral || !alg.filter_is_top_only() {
        return Err(PreservationError::NonIntegralAlgebra(alg.name().to_string()));
    }
    Ok(())
}

/// Over integral algebras with `F = {top}`: `M ⊨ ψ` iff some disjunct has an
/// assignment making every atom equal to top.
pub fn verify_ep_atomic_criterion(
    models: &[PModel],
    sentences: &[Formula],
) -> Result<CriterionReport, PreservationError> {
    for m in models {
        require_integral(m.algebra())?;
    }
    let forms = positive_forms(sentences, SentenceClass::ExistentialPositive)?;
    criterion(models, sentences, &forms, AtomTest::Top)
}

/// A failure of `f(||φ||^M) ≤ ||φ||^N` or of the validity transfer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoViolation {
    pub pair: usize,
    pub witness: MorphismWitness,
    pub sentence: usize,
    pub source_value: Elem,
    pub target_value: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MonoReport {
    pub witnesses: usize,
    pub checks: usize,
    /// Checks where the inequality was an equality.
    pub equalities: usize,
    pub violations: Vec<MonoViolation>,
}

impl MonoReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every monomorphism between each pair and every e.p sentence, checks
/// `f(||φ||^M) ≤ ||φ||^N` and `M ⊨ φ ⇒ N ⊨ φ`.
pub fn verify_monomorphism_lemma(
    pairs: &[(PModel, PModel)],
    sentences: &[Formula],
) -> Result<MonoReport, PreservationError> {
    verify_value_inequality(MorphismKind::Mono, pairs, sentences)
}

/// [`verify_monomorphism_lemma`] over witnesses of another kind carrying an
/// algebra map (strong witnesses are monomorphisms too).
pub fn verify_value_inequality(
    kind: MorphismKind,
    pairs: &[(PModel, PModel)],
    sentences: &[Formula],
) -> Result<MonoReport, PreservationError> {
    positive_forms(sentences, SentenceClass::ExistentialPositive)?;
    let mut report = MonoReport::default();
    let opts = MorphismOptions::default();
    for (pi, (m, n)) in pairs.iter().enumerate() {
        require_integral(m.algebra())?;
        require_integral(n.algebra())?;
        let compiled = sentences
            .iter()
            .map(|f| Compiled::for_model(f, m))
            .collect::<Result<Vec<_>, _>>()?;
        let found = find_morphisms(kind, m, n, SearchMode::All, &opts)?;
        for w in found.witnesses {
            report.witnesses += 1;
            let f = w.f.clone().expect("kind carries an algebra map");
            for (si, c) in compiled.iter().enumerate() {
                let v = c.value(m);
                let u = c.value(n);
                let image = f[v.index()];
                report.checks += 1;
                if image == u {
                    report.equalities += 1;
                }
                let transfer = !m.algebra().in_filter(v) || n.algebra().in_filter(u);
                if !n.algebra().leq(image, u) || !transfer {
                    report.violations.push(MonoViolation {
                        pair: pi,
                        witness: w.clone(),
                        sentence: si,
                        source_value: v,
                        target_value: u,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Outcome of the desk-scale converse check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationCheck {
    pub psi: Formula,
    pub models: usize,
    /// Models where `ψ` and `f` disagree.
    pub disagreements: Vec<usize>,
}

/// Builds `ψ` from the Boolean models of `f` up to `max_domain` and compares
/// it with `f` on every such model.
pub fn separation_spot_check(
    f: &Formula,
    lang: &Arc<PredicateLanguage>,
    depth: usize,
    size_bound: usize,
    max_domain: usize,
) -> Result<SeparationCheck, PreservationError> {
    let two = Arc::new(fixtures::boolean());
    let all = generate_models(&two, lang, &GenOptions::exhaustive(max_domain))?;
    let mut positive = Vec::new();
    for m in &all {
        if Compiled::for_model(f, m)?.holds(m) {
            positive.push(m.clone());
        }
    }
    let psi = bridge::separating_sentence(&positive, depth, size_bound)?;
    let fc = Compiled::for_model(f, &all[0])?;
    let pc = Compiled::for_model(&psi, &all[0])?;
    let disagreements = (0..all.len())
        .filter(|&i| fc.holds(&all[i]) != pc.holds(&all[i]))
        .collect();
    Ok(SeparationCheck {
        psi,
        models: all.len(),
        disagreements,
    })
}

/// Parameters of [`replay_paper_examples`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplayOptions {
    pub alpha: Rational,
    pub ul_variant: UlVariant,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions {
            alpha: Rational::new(1, 2),
            ul_variant: UlVariant::Repaired,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplayStatus {
    Pass,
    Fail,
    /// A known discrepancy in the original example, reproduced on request.
    Erratum,
    /// The example's parameters violate its own preconditions.
    Precondition,
}

impl ReplayStatus {
    pub fn keyword(self) -> &'static str {
        match self {
            ReplayStatus::Pass => "pass",
            ReplayStatus::Fail => "FAIL",
            ReplayStatus::Erratum => "erratum",
            ReplayStatus::Precondition => "precondition",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayItem {
    pub name: &'static str,
    pub status: ReplayStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ReplayReport {
    pub items: Vec<ReplayItem>,
}

impl ReplayReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.status == ReplayStatus::Pass)
    }

    /// `Err(FixtureDrift)` listing every failed item; errata and
    /// precondition reports are not drift.
    pub fn into_result(self) -> Result<ReplayReport, PreservationError> {
        let failed: Vec<String> = self
            .items
            .iter()
            .filter(|i| i.status == ReplayStatus::Fail)
            .map(|i| i.name.to_string())
            .collect();
        if failed.is_empty() {
            Ok(self)
        } else {
            Err(PreservationError::FixtureDrift(failed))
        }
    }

    fn push(&mut self, name: &'static str, ok: bool, detail: String) {
        let status = if ok { ReplayStatus::Pass } else { ReplayStatus::Fail };
        self.items.push(ReplayItem { name, status, detail });
    }
}

fn label(m: &PModel, e: Elem) -> String {
    m.algebra().label(e).text().to_string()
}

/// Runs the worked examples end to end.
pub fn replay_paper_examples(opts: &ReplayOptions) -> Result<ReplayReport, PreservationError> {
    let mut report = ReplayReport::default();
    replay_prime(&mut report)?;
    replay_ul(&mut report, opts.ul_variant)?;
    replay_min_cut(&mut report, opts.alpha)?;
    Ok(report)
}

fn replay_prime(report: &mut ReplayReport) -> Result<(), PreservationError> {
    let rejected = fixtures::four_boolean(&["top"]);
    let ok = matches!(&rejected, Err(AlgebraError::FilterNotPrime { law, a, b })
        if law == "join" && a == "a" && b == "b");
    let detail = match &rejected {
        Err(e) => e.to_string(),
        Ok(_) => "accepted".into(),
    };
    report.push("prime/loader-rejects-top-only", ok, detail);

    let (m1, m2) = fixtures::prime_requirement_models();
    let top = m1.algebra().top();
    let raw = |e: Elem| e == top;
    let id = MorphismWitness::identity(MorphismKind::Proto, &m1);
    let raw_proto = is_protomorphism_wrt(&id.g, &m1, &m2, &raw, &raw)?;
    report.push(
        "prime/identity-proto-wrt-top-only",
        raw_proto,
        format!("identity M1 -> M2 against {{top}}: {raw_proto}"),
    );

    let f = parse_formula("exists z. R(z)", m1.language(), &m1.algebra().signature())?;
    let c = Compiled::for_model(&f, &m1)?;
    let (v1, v2) = (c.value(&m1), c.value(&m2));
    report.push(
        "prime/values",
        label(&m1, v1) == "top" && label(&m2, v2) == "a",
        format!("M1: {}, M2: {}", label(&m1, v1), label(&m2, v2)),
    );
    let (r1, r2) = (raw(v1), raw(v2));
    report.push(
        "prime/validity-top-only",
        r1 && !r2,
        format!("M1 valid: {r1}, M2 valid: {r2}"),
    );
    let (d1, d2) = (c.holds(&m1), c.holds(&m2));
    let protos = find_morphisms(MorphismKind::Proto, &m1, &m2, SearchMode::Count, &MorphismOptions::default())?;
    report.push(
        "prime/repaired-filter",
        d1 && !d2 && !protos.exists(),
        format!("F={{b,top}}: M1 valid: {d1}, M2 valid: {d2}, protomorphisms M1 -> M2: {}", protos.count),
    );
    Ok(())
}

fn replay_ul(report: &mut ReplayReport, variant: UlVariant) -> Result<(), PreservationError> {
    let (m1, m2) = fixtures::ul_models(variant);
    let alg = m1.algebra();
    let id = MorphismWitness::identity(MorphismKind::Hom, &m1);
    let hom = check_morphism(&id, &m1, &m2, &MorphismOptions::default())?;
    let hom_ok = hom.holds();
    let f = parse_formula("exists x. exists y. R(x) & P(y)", m1.language(), &alg.signature())?;
    let c = Compiled::for_model(&f, &m1)?;
    let (v1, v2) = (c.value(&m1), c.value(&m2));
    let values_ok = label(&m1, v1) == "5/6" && label(&m2, v2) == "1/6";
    let (h1, h2) = (c.holds(&m1), c.holds(&m2));
    let law = alg.check_strong_conj_filter_law()?;
    let five = alg.elem("5/6").expect("carrier");
    let third = alg.elem("1/3").expect("carrier");
    let law_ok = law.violations.iter().any(|v| v.a == five && v.b == third);
    match variant {
        UlVariant::Repaired => {
            report.push("ul/identity-hom", hom_ok, format!("violations: {}", hom.violations.len()));
            report.push(
                "ul/values",
                values_ok,
                format!("M1: {}, M2: {}", label(&m1, v1), label(&m2, v2)),
            );
            report.push("ul/validity", h1 && !h2, format!("M1 valid: {h1}, M2 valid: {h2}"));
        }
        UlVariant::Original => {
            // As displayed, the identity is not even a protomorphism.
            let status = if hom_ok { ReplayStatus::Fail } else { ReplayStatus::Erratum };
            report.items.push(ReplayItem {
                name: "ul/identity-hom",
                status,
                detail: format!("identity fails at {} tuple(s)", hom.violations.len()),
            });
            report.items.push(ReplayItem {
                name: "ul/values",
                status: ReplayStatus::Erratum,
                detail: format!("M1: {}, M2: {}", label(&m1, v1), label(&m2, v2)),
            });
        }
    }
    report.push(
        "ul/conj-filter-law",
        law_ok,
        format!("{} violation(s), including 5/6 & 1/3: {law_ok}", law.violations.len()),
    );
    Ok(())
}

fn replay_min_cut(report: &mut ReplayReport, alpha: Rational) -> Result<(), PreservationError> {
    let b = match fixtures::min_cut_model(alpha) {
        Ok(b) => b,
        Err(e @ FixtureError::AlphaOutOfRange(_)) => {
            report.items.push(ReplayItem {
                name: "min-cut/load",
                status: ReplayStatus::Precondition,
                detail: e.to_string(),
            });
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    report.push("min-cut/load", true, format!("alpha = {alpha}"));
    let t = bridge::translate(&b);
    let mut falses = Vec::new();
    t.for_each_entry(|p, tuple, v| {
        if v == Elem(0) {
            let names: Vec<&str> = tuple.iter().map(|&i| b.domain()[i].as_str()).collect();
            falses.push(format!("{}({})", b.language().name(p), names.join(",")));
        }
    });
    let expected = ["Ps(b)", "Pt(a)", "R(a,b)"];
    report.push("min-cut/translate", falses == expected, format!("false tuples: {}", falses.join(" ")));
    let g = bridge::gaifman_graph(&b);
    let (td, _) = bridge::tree_depth(&g)?;
    report.push(
        "min-cut/gaifman",
        g.edges() == [(0, 1)] && td == 2,
        format!("edges: {:?}, tree-depth: {td}", g.edges()),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{enumerate_positive, PositiveBounds};
    use crate::structure::PModelBuilder;

    fn lang(s: &str) -> Arc<PredicateLanguage> {
        Arc::new(s.parse().unwrap())
    }

    fn parse(text: &str, l: &PredicateLanguage, alg: &InterpretingLattice) -> Formula {
        parse_formula(text, l, &alg.signature()).unwrap()
    }

    #[test]
    fn existential_sentence_is_closed() {
        let l = lang("R:1");
        let pool = [
            Arc::new(fixtures::boolean_lattice()),
            Arc::new(fixtures::four_boolean_repaired()),
        ];
        let f = parse("exists z. R(z)", &l, &pool[0]);
        let r = check_closure(&f, &l, MorphismKind::Proto, &pool, &ClosureOptions::exhaustive(2)).unwrap();
        assert!(r.closed());
        assert!(r.pairs_searched > 0);
    }

    #[test]
    fn universal_sentence_is_not_closed() {
        let l = lang("R:1");
        let pool = [Arc::new(fixtures::boolean())];
        let f = parse("forall x. R(x)", &l, &pool[0]);
        let r = check_closure(&f, &l, MorphismKind::Proto, &pool, &ClosureOptions::exhaustive(2)).unwrap();
        let c = &r.counterexamples[0];
        assert!(verify_counterexample(&f, c, &MorphismOptions::default()).unwrap());
        assert_eq!(c.source.size(), 1);
        assert_eq!(c.target.size(), 2);
    }

    #[test]
    fn ul_conjunction_is_not_preserved() {
        let l = lang("P:1 R:1");
        let pool = [Arc::new(fixtures::ul_sixths())];
        let f = parse("exists x. exists y. R(x) & P(y)", &l, &pool[0]);
        let opts = ClosureOptions {
            collect_all: true,
            ..ClosureOptions::exhaustive(1)
        };
        let r = check_closure(&f, &l, MorphismKind::Hom, &pool, &opts).unwrap();
        assert!(!r.closed());
        for c in &r.counterexamples {
            assert!(verify_counterexample(&f, c, &opts.morphisms).unwrap());
        }
        let (m1, m2) = fixtures::ul_models(UlVariant::Repaired);
        assert!(r
            .counterexamples
            .iter()
            .any(|c| c.source.tables() == m1.tables() && c.target.tables() == m2.tables()));
    }

    #[test]
    fn ep_criterion_on_godel_models() {
        let alg = Arc::new(fixtures::godel_chain(5));
        let l = lang("P:1 R:1");
        let models = generate_models(&alg, &l, &GenOptions::exhaustive(1)).unwrap();
        let mut sentences = vec![parse("exists x. R(x) & P(x)", &l, &alg)];
        sentences.extend(
            enumerate_positive(&l, SentenceClass::ExistentialPositive, &PositiveBounds::new(1)).unwrap(),
        );
        let r = verify_ep_atomic_criterion(&models, &sentences).unwrap();
        assert!(r.holds());
        assert_eq!(r.checked, models.len() * sentences.len());
    }

    #[test]
    fn ep_criterion_nullary() {
        let alg = Arc::new(fixtures::godel_chain(3));
        let l = lang("S:0 T:0");
        let models = generate_models(&alg, &l, &GenOptions::exhaustive(1)).unwrap();
        let f = parse("S & T", &l, &alg);
        let r = verify_ep_atomic_criterion(&models, &[f]).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn ep_criterion_rejects_non_integral() {
        let (m1, _) = fixtures::ul_models(UlVariant::Repaired);
        let f = parse("exists x. R(x)", m1.language(), m1.algebra());
        assert_eq!(
            verify_ep_atomic_criterion(&[m1], &[f]),
            Err(PreservationError::NonIntegralAlgebra("ul-sixths".into()))
        );
    }

    #[test]
    fn monomorphism_lemma_on_raised_models() {
        let alg = Arc::new(fixtures::godel_chain(3));
        let l = lang("P:1 R:2");
        let lower = generate_models(&alg, &l, &GenOptions::sample(2, 6, 11)).unwrap();
        let pairs: Vec<(PModel, PModel)> = lower
            .iter()
            .map(|m| {
                // Raise every value by one step where possible.
                let raised = m.map_values(alg.clone(), |e| Elem::from_index((e.index() + 1).min(2)));
                (m.clone(), raised)
            })
            .collect();
        let bounds = PositiveBounds {
            max_clauses: 2,
            ..PositiveBounds::new(2)
        };
        let sentences = enumerate_positive(&l, SentenceClass::ExistentialPositive, &bounds).unwrap();
        let r = verify_monomorphism_lemma(&pairs, &sentences).unwrap();
        assert!(r.holds());
        assert!(r.witnesses >= pairs.len());

        let same: Vec<(PModel, PModel)> = lower.iter().map(|m| (m.clone(), m.clone())).collect();
        let r = verify_value_inequality(MorphismKind::Strong, &same, &sentences).unwrap();
        assert!(r.holds());
        assert_eq!(r.equalities, r.checks);
    }

    #[test]
    fn replay_default_passes() {
        let r = replay_paper_examples(&ReplayOptions::default()).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(r.into_result().is_ok());
    }

    #[test]
    fn replay_flags_preconditions_and_errata() {
        let r = replay_paper_examples(&ReplayOptions {
            alpha: Rational::from_integer(1),
            ..ReplayOptions::default()
        })
        .unwrap();
        let load = r.items.iter().find(|i| i.name == "min-cut/load").unwrap();
        assert_eq!(load.status, ReplayStatus::Precondition);

        let r = replay_paper_examples(&ReplayOptions {
            ul_variant: UlVariant::Original,
            ..ReplayOptions::default()
        })
        .unwrap();
        let hom = r.items.iter().find(|i| i.name == "ul/identity-hom").unwrap();
        assert_eq!(hom.status, ReplayStatus::Erratum);
        assert!(!r.all_pass());
        assert!(r.into_result().is_ok());
    }

    #[test]
    fn separation_agrees_with_closed_sentence() {
        let l = lang("R:2");
        let two = fixtures::boolean();
        let f = parse("exists x. exists y. R(x, y)", &l, &two);
        let s = separation_spot_check(&f, &l, 2, 2, 2).unwrap();
        assert!(s.disagreements.is_empty(), "{}", s.psi);
        assert!(s.psi.quantifier_depth() <= 2);
    }

    #[test]
    fn model_pool_covers_every_algebra() {
        let l = lang("R:1");
        let pool = [Arc::new(fixtures::boolean()), Arc::new(fixtures::godel_chain(3))];
        let models = model_pool(&pool, &l, &GenOptions::exhaustive(1)).unwrap();
        assert_eq!(models.len(), 2 + 3);
        let single = PModelBuilder::new("s", pool[0].clone(), l)
            .domain(["d0"])
            .set("R", &["d0"], "1")
            .build()
            .unwrap();
        assert!(models.contains(&single.with_name("boolean-n1-1")));
    }
}

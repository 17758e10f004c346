//! Truth values, validity, and bounded elementary equivalence.
//!
//! Formulas are compiled once against a model's language and algebra into a
//! slot-addressed tree; quantifiers fold `join`/`meet` over the domain in
//! index order and stop early at top/bottom.

use alloc::{boxed::Box, string::String, vec, vec::Vec};

use crate::algebra::{Elem, InterpretingLattice};
use crate::language::{
    enumerate_sentences, EnumBounds, Formula, LanguageError, PositiveForm, PredicateLanguage,
    Quantifier, DEFAULT_ENUM_CAP,
};
use crate::structure::{PModel, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error("valuation does not cover variable `{0}`")]
    MissingVariable(String),
    #[error("valuation sends `{0}` outside the domain")]
    OutOfDomain(String),
    #[error("formula does not start with an existential quantifier")]
    NotExistential,
    #[error("models are over different algebras")]
    AlgebraMismatch,
    #[error("models have different languages")]
    LanguageMismatch,
    #[error("models have different connective signatures")]
    SignatureMismatch,
}

#[derive(Clone, Debug)]
enum Node {
    Atom { pred: usize, slots: Vec<usize> },
    Op { op: usize, args: Vec<Node> },
    Quant { exists: bool, slot: usize, body: Box<Node> },
}

/// A formula resolved against a language and an algebra's connectives.
#[derive(Clone, Debug)]
pub struct Compiled {
    root: Node,
    slots: Vec<String>,
}

impl Compiled {
    pub fn new(
        f: &Formula,
        lang: &PredicateLanguage,
        alg: &InterpretingLattice,
    ) -> Result<Compiled, SemanticsError> {
        f.check(lang, &alg.signature())?;
        let mut slots = Vec::new();
        let root = compile(f, lang, alg, &mut slots);
        Ok(Compiled { root, slots })
    }

    pub fn for_model(f: &Formula, model: &PModel) -> Result<Compiled, SemanticsError> {
        Compiled::new(f, model.language(), model.algebra())
    }

    /// Value of a sentence (free variables, if any, start at element 0).
    pub fn value(&self, model: &PModel) -> Elem {
        let mut env = vec![0usize; self.slots.len()];
        eval_node(&self.root, model, &mut env)
    }

    pub fn holds(&self, model: &PModel) -> bool {
        model.algebra().in_filter(self.value(model))
    }

    fn value_with(&self, model: &PModel, v: &Valuation) -> Result<Elem, SemanticsError> {
        let mut env = vec![0usize; self.slots.len()];
        for (i, name) in self.slots.iter().enumerate() {
            if let Some(e) = v.get(name) {
                if e >= model.size() {
                    return Err(SemanticsError::OutOfDomain(name.clone()));
                }
                env[i] = e;
            }
        }
        Ok(eval_node(&self.root, model, &mut env))
    }
}

fn slot_of(name: &str, slots: &mut Vec<String>) -> usize {
    match slots.iter().position(|s| s == name) {
        Some(i) => i,
        None => {
            slots.push(name.into());
            slots.len() - 1
        }
    }
}

fn compile(
    f: &Formula,
    lang: &PredicateLanguage,
    alg: &InterpretingLattice,
    slots: &mut Vec<String>,
) -> Node {
    match f {
        Formula::Atom { pred, args } => Node::Atom {
            pred: lang.index(pred).expect("checked"),
            slots: args.iter().map(|a| slot_of(a, slots)).collect(),
        },
        Formula::Conn { op, args } => Node::Op {
            op: alg.op_index(op).expect("checked"),
            args: args.iter().map(|a| compile(a, lang, alg, slots)).collect(),
        },
        Formula::Quant { q, var, body } => {
            let slot = slot_of(var, slots);
            Node::Quant {
                exists: *q == Quantifier::Exists,
                slot,
                body: Box::new(compile(body, lang, alg, slots)),
            }
        }
    }
}

fn eval_node(node: &Node, model: &PModel, env: &mut [usize]) -> Elem {
    let alg = model.algebra();
    match node {
        Node::Atom { pred, slots } => {
            let n = model.size();
            let idx = slots.iter().fold(0, |acc, &s| acc * n + env[s]);
            model.table(*pred)[idx]
        }
        Node::Op { op, args } => match args.len() {
            0 => alg.apply(*op, &[]),
            1 => {
                let a = eval_node(&args[0], model, env);
                alg.apply(*op, &[a])
            }
            2 => {
                let a = eval_node(&args[0], model, env);
                let b = eval_node(&args[1], model, env);
                alg.apply2(*op, a, b)
            }
            _ => {
                let vals: Vec<Elem> = args.iter().map(|a| eval_node(a, model, env)).collect();
                alg.apply(*op, &vals)
            }
        },
        Node::Quant { exists, slot, body } => {
            let saved = env[*slot];
            let (mut acc, stop) = if *exists {
                (alg.bottom(), alg.top())
            } else {
                (alg.top(), alg.bottom())
            };
            for m in 0..model.size() {
                env[*slot] = m;
                let v = eval_node(body, model, env);
                acc = if *exists { alg.join(acc, v) } else { alg.meet(acc, v) };
                if acc == stop {
                    break;
                }
            }
            env[*slot] = saved;
            acc
        }
    }
}

/// `||f||^M_v`.
pub fn eval(model: &PModel, f: &Formula, v: &Valuation) -> Result<Elem, SemanticsError> {
    if let Some(x) = f.free_vars().into_iter().find(|x| v.get(x).is_none()) {
        return Err(SemanticsError::MissingVariable(x));
    }
    Compiled::for_model(f, model)?.value_with(model, v)
}

/// Value of a sentence.
pub fn sentence_value(model: &PModel, f: &Formula) -> Result<Elem, SemanticsError> {
    f.require_sentence()?;
    Ok(Compiled::for_model(f, model)?.value(model))
}

/// `M ⊨ f`: the value of the sentence lies in the filter.
pub fn models(model: &PModel, f: &Formula) -> Result<bool, SemanticsError> {
    Ok(model.algebra().in_filter(sentence_value(model, f)?))
}

/// For `f = ∃x φ`, the first element `m` (in domain order) with
/// `||φ||_{v[x:=m]} ∈ F`.
pub fn witness_exists(
    model: &PModel,
    f: &Formula,
    v: &Valuation,
) -> Result<Option<usize>, SemanticsError> {
    let Formula::Quant {
        q: Quantifier::Exists,
        var,
        body,
    } = f
    else {
        return Err(SemanticsError::NotExistential);
    };
    if let Some(x) = f.free_vars().into_iter().find(|x| v.get(x).is_none()) {
        return Err(SemanticsError::MissingVariable(x));
    }
    let compiled = Compiled::for_model(body, model)?;
    for m in 0..model.size() {
        let inner = v.clone().with(var, m);
        if model.algebra().in_filter(compiled.value_with(model, &inner)?) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// How atoms are tested by [`atomic_witness`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomTest {
    /// Value in the filter.
    Designated,
    /// Value equal to the lattice top.
    Top,
}

/// A disjunct index and an assignment of its prenex variables under which
/// every atom passes the test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicWitness {
    pub disjunct: usize,
    pub assignment: Vec<usize>,
}

/// Searches the atomic criterion for a sentence in positive normal form.
/// Returns `Ok(None)` when no disjunct has a witnessing tuple.
pub fn atomic_witness(
    model: &PModel,
    form: &PositiveForm,
    test: AtomTest,
) -> Result<Option<AtomicWitness>, SemanticsError> {
    let alg = model.algebra();
    let lang = model.language();
    let n = model.size();
    for (d, prim) in form.disjuncts.iter().enumerate() {
        let k = prim.vars.len();
        // Later binders shadow earlier ones with the same name.
        let slot = |v: &str| prim.vars.iter().rposition(|x| x == v);
        let mut atoms = Vec::new();
        for a in prim.atoms() {
            let p = lang
                .index(&a.pred)
                .ok_or_else(|| LanguageError::UnknownSymbol(a.pred.clone()))?;
            let slots = a
                .args
                .iter()
                .map(|x| slot(x).ok_or_else(|| SemanticsError::MissingVariable(x.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            atoms.push((p, slots));
        }
        let mut assignment = vec![0usize; k];
        loop {
            let ok = atoms.iter().all(|(p, slots)| {
                let idx = slots.iter().fold(0, |acc, &s| acc * n + assignment[s]);
                let v = model.table(*p)[idx];
                match test {
                    AtomTest::Designated => alg.in_filter(v),
                    AtomTest::Top => v == alg.top(),
                }
            });
            if ok {
                return Ok(Some(AtomicWitness {
                    disjunct: d,
                    assignment,
                }));
            }
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                assignment[i] += 1;
                if assignment[i] < n {
                    break;
                }
                assignment[i] = 0;
            }
            if assignment.iter().all(|&a| a == 0) {
                break;
            }
        }
    }
    Ok(None)
}

/// Enumeration bounds for the equivalence checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivBounds {
    /// Distinct variables; defaults to the quantifier budget.
    pub max_vars: Option<usize>,
    /// Connectives per sentence in [`strong_equiv_n`].
    pub max_connectives: usize,
    pub connectives: Option<Vec<String>>,
    pub cap: usize,
}

impl Default for EquivBounds {
    fn default() -> Self {
        EquivBounds {
            max_vars: None,
            max_connectives: 2,
            connectives: None,
            cap: DEFAULT_ENUM_CAP,
        }
    }
}

/// Outcome of a bounded equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// No enumerated sentence tells the models apart.
    Equivalent { sentences: usize },
    /// The first enumerated sentence that does.
    Distinguished(Formula),
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

fn same_shape(m1: &PModel, m2: &PModel) -> Result<(), SemanticsError> {
    if m1.language() != m2.language() {
        return Err(SemanticsError::LanguageMismatch);
    }
    if m1.algebra().signature() != m2.algebra().signature() {
        return Err(SemanticsError::SignatureMismatch);
    }
    Ok(())
}

/// `M1 ≡_n M2`: same validity on every sentence of nested rank at most `n`.
pub fn equiv_n(
    m1: &PModel,
    m2: &PModel,
    n: usize,
    bounds: &EquivBounds,
) -> Result<Equivalence, SemanticsError> {
    same_shape(m1, m2)?;
    let mut eb = EnumBounds::nested_rank(n, bounds.max_vars.unwrap_or(n / 3)).with_cap(bounds.cap);
    eb.connectives = bounds.connectives.clone();
    let sentences = enumerate_sentences(m1.language(), &m1.algebra().signature(), &eb)?;
    let count = sentences.len();
    for f in sentences {
        let a = Compiled::for_model(&f, m1)?.holds(m1);
        let b = Compiled::for_model(&f, m2)?.holds(m2);
        if a != b {
            return Ok(Equivalence::Distinguished(f));
        }
    }
    Ok(Equivalence::Equivalent { sentences: count })
}

/// `M1 ≡ˢ_n M2` over one algebra: equal values on every enumerated sentence
/// of quantifier depth at most `n`.
pub fn strong_equiv_n(
    m1: &PModel,
    m2: &PModel,
    n: usize,
    bounds: &EquivBounds,
) -> Result<Equivalence, SemanticsError> {
    if m1.algebra() != m2.algebra() {
        return Err(SemanticsError::AlgebraMismatch);
    }
    same_shape(m1, m2)?;
    let mut eb =
        EnumBounds::new(n, bounds.max_vars.unwrap_or(n), bounds.max_connectives).with_cap(bounds.cap);
    eb.connectives = bounds.connectives.clone();
    let sentences = enumerate_sentences(m1.language(), &m1.algebra().signature(), &eb)?;
    Ok(first_value_difference(m1, m2, sentences)?)
}

fn first_value_difference(
    m1: &PModel,
    m2: &PModel,
    sentences: Vec<Formula>,
) -> Result<Equivalence, SemanticsError> {
    let count = sentences.len();
    for f in sentences {
        let c = Compiled::for_model(&f, m1)?;
        if c.value(m1) != c.value(m2) {
            return Ok(Equivalence::Distinguished(f));
        }
    }
    Ok(Equivalence::Equivalent { sentences: count })
}

/// Values of many sentences on one model.
pub fn value_profile(model: &PModel, sentences: &[Compiled]) -> Vec<Elem> {
    sentences.iter().map(|c| c.value(model)).collect()
}

/// Validity of many sentences on one model, packed 64 per word.
pub fn validity_profile(model: &PModel, sentences: &[Compiled]) -> Vec<u64> {
    let mut bits = vec![0u64; sentences.len().div_ceil(64)];
    for (i, c) in sentences.iter().enumerate() {
        if c.holds(model) {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, UlVariant};
    use crate::language::{enumerate_positive, parse_formula, PositiveBounds, SentenceClass};
    use crate::structure::{generate_models, GenOptions};
    use alloc::sync::Arc;
    use proptest::prelude::*;

    fn parse(m: &PModel, s: &str) -> Formula {
        parse_formula(s, m.language(), &m.algebra().signature()).unwrap()
    }

    #[test]
    fn prime_requirement_values() {
        let (m1, m2) = fixtures::prime_requirement_models();
        let f = parse(&m1, "exists z. R(z)");
        let alg = m1.algebra();
        assert_eq!(sentence_value(&m1, &f).unwrap(), alg.top());
        assert_eq!(sentence_value(&m2, &f).unwrap(), alg.elem("a").unwrap());
        assert!(models(&m1, &f).unwrap());
        assert!(!models(&m2, &f).unwrap());
        assert_eq!(witness_exists(&m1, &f, &Valuation::new()).unwrap(), Some(1));
        assert_eq!(witness_exists(&m2, &f, &Valuation::new()).unwrap(), None);
    }

    #[test]
    fn ul_values() {
        for variant in [UlVariant::Repaired, UlVariant::Original] {
            let (m1, m2) = fixtures::ul_models(variant);
            let f = parse(&m1, "exists x. exists y. R(x) & P(y)");
            let alg = m1.algebra();
            assert_eq!(sentence_value(&m1, &f).unwrap(), alg.elem("5/6").unwrap());
            assert_eq!(sentence_value(&m2, &f).unwrap(), alg.elem("1/6").unwrap());
            assert!(models(&m1, &f).unwrap());
            assert!(!models(&m2, &f).unwrap());
        }
    }

    #[test]
    fn free_variables_need_a_valuation() {
        let (m1, _) = fixtures::prime_requirement_models();
        let f = parse(&m1, "R(x)");
        assert_eq!(
            eval(&m1, &f, &Valuation::new()),
            Err(SemanticsError::MissingVariable("x".into()))
        );
        let y = m1.element("y").unwrap();
        assert_eq!(
            eval(&m1, &f, &Valuation::new().with("x", y)).unwrap(),
            m1.algebra().elem("b").unwrap()
        );
        assert!(matches!(
            models(&m1, &f),
            Err(SemanticsError::Language(LanguageError::NotASentence(_)))
        ));
        assert_eq!(
            witness_exists(&m1, &parse(&m1, "forall z. R(z)"), &Valuation::new()),
            Err(SemanticsError::NotExistential)
        );
    }

    #[test]
    fn shadowing_restores_outer_binding() {
        let alg = Arc::new(fixtures::boolean());
        let lang: Arc<PredicateLanguage> = Arc::new("S:2".parse().unwrap());
        let m = crate::structure::PModelBuilder::new("m", alg, lang)
            .domain(["p", "q"])
            .set("S", &["p", "q"], "1")
            .default_value("S", "0")
            .build()
            .unwrap();
        // After the inner binder of x ends, x is the outer one again.
        let f = parse(&m, "exists x. (exists x. S(x,x)) or (exists y. S(x,y))");
        assert!(models(&m, &f).unwrap());
        let g = parse(&m, "exists x. exists x. S(x,x)");
        assert!(!models(&m, &g).unwrap());
    }

    #[test]
    fn equivalences() {
        let (m1, m2) = fixtures::prime_requirement_models();
        let b = EquivBounds::default();
        assert!(equiv_n(&m1, &m1, 4, &b).unwrap().holds());
        match equiv_n(&m1, &m2, 3, &b).unwrap() {
            Equivalence::Distinguished(f) => assert_eq!(f.to_string(), "exists x1. R(x1)"),
            other => panic!("{other:?}"),
        }
        // No closed atoms at rank 0.
        assert_eq!(equiv_n(&m1, &m2, 0, &b).unwrap(), Equivalence::Equivalent { sentences: 0 });
        assert!(strong_equiv_n(&m1, &m1, 2, &b).unwrap().holds());
        assert!(!strong_equiv_n(&m1, &m2, 1, &b).unwrap().holds());
        let (u1, _) = fixtures::ul_models(UlVariant::Repaired);
        assert_eq!(strong_equiv_n(&m1, &u1, 1, &b), Err(SemanticsError::AlgebraMismatch));
    }

    #[test]
    fn strong_equiv_detects_one_changed_value() {
        // R(y) moves from top to b: both designated, so validity agrees but values do not.
        let (m1, _) = fixtures::prime_requirement_models();
        let alg = m1.algebra();
        let top_version = m1.with_value(0, &[1], alg.top());
        let b_version = m1.with_value(0, &[1], alg.elem("b").unwrap());
        let bounds = EquivBounds::default();
        assert!(equiv_n(&top_version, &b_version, 3, &bounds).unwrap().holds());
        assert!(!strong_equiv_n(&top_version, &b_version, 1, &bounds).unwrap().holds());
    }

    #[test]
    fn witnessing_on_generated_models() {
        for alg in [fixtures::four_boolean_repaired(), fixtures::ul_sixths(), fixtures::godel_chain(4)] {
            let alg = Arc::new(alg);
            let lang: Arc<PredicateLanguage> = Arc::new("R:1 S:2".parse().unwrap());
            let ms = generate_models(&alg, &lang, &GenOptions::sample(3, 40, 11)).unwrap();
            let sentences: Vec<Formula> = ["exists x. R(x)", "exists x. S(x,x) and R(x)", "exists x. forall y. S(x,y)"]
                .iter()
                .map(|s| parse_formula(s, &lang, &alg.signature()).unwrap())
                .collect();
            for m in &ms {
                for f in &sentences {
                    let w = witness_exists(m, f, &Valuation::new()).unwrap();
                    assert_eq!(w.is_some(), models(m, f).unwrap());
                }
            }
        }
    }

    #[test]
    fn atomic_criterion_on_e_and_p() {
        let lang: Arc<PredicateLanguage> = Arc::new("R:1 P:1".parse().unwrap());
        let mut b = PositiveBounds::new(2);
        b.max_disjuncts = 2;
        let sentences = enumerate_positive(&lang, SentenceClass::ExistentialAndPositive, &b).unwrap();
        let alg = Arc::new(fixtures::four_boolean_repaired());
        for m in generate_models(&alg, &lang, &GenOptions::exhaustive(2)).unwrap() {
            for f in &sentences {
                let form = PositiveForm::of(f).unwrap();
                let w = atomic_witness(&m, &form, AtomTest::Designated).unwrap();
                assert_eq!(w.is_some(), models(&m, f).unwrap(), "{f} on {m:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn eval_is_monotone_in_interpretations(seed in any::<u64>(), pos in 0usize..4, bump in 0usize..6) {
            let alg = Arc::new(fixtures::ul_sixths());
            let lang: Arc<PredicateLanguage> = Arc::new("R:1 S:2".parse().unwrap());
            let m = generate_models(&alg, &lang, &GenOptions::sample(2, 1, seed)).unwrap().remove(0);
            let n = m.size();
            let idx = pos % (n * n);
            let old = m.table(1)[idx];
            let new = Elem::from_index((old.index() + bump).min(alg.size() - 1));
            prop_assert!(alg.leq(old, new));
            let raised = m.with_value(1, &[idx / n, idx % n], new);
            for s in [
                "exists x. forall y. S(x,y) & R(y)",
                "forall x. exists y. S(x,y) or R(x)",
                "(exists x. S(x,x)) and (forall y. R(y) & S(y,y))",
            ] {
                let f = parse_formula(s, &lang, &alg.signature()).unwrap();
                let a = sentence_value(&m, &f).unwrap();
                let b = sentence_value(&raised, &f).unwrap();
                prop_assert!(alg.leq(a, b));
            }
        }
    }
}

//! Built-in algebras and the worked example models.
//!
//! Every constructor here goes through the ordinary validating builders, so a
//! fixture that stops satisfying the algebra or model invariants fails loudly.

use alloc::{
    format,
    string::{String, ToString},
    sync::Arc,
    vec::Vec,
};

use crate::algebra::{
    AlgebraBuilder, AlgebraError, Elem, InterpretingLattice, OpRule, OrderSpec, Rational, CONJ,
};
use crate::language::PredicateLanguage;
use crate::structure::{PModel, PModelBuilder, StructureError};

/// Names accepted by [`by_name`].
pub const BUILTIN_ALGEBRAS: [&str; 8] = [
    "boolean",
    "boolean-lattice",
    "boolean-constants",
    "four-boolean",
    "godel5",
    "lukasiewicz5",
    "ul-sixths",
    "min-cut",
];

fn chain_tokens(k: usize) -> Vec<String> {
    let d = (k - 1) as i64;
    (0..k)
        .map(|i| {
            let q = Rational::new(i as i64, d);
            if q.is_integer() {
                format!("{}", q.numer())
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        })
        .collect()
}

/// The two-element Boolean algebra with `conj = meet` and `F = {1}`.
pub fn boolean() -> InterpretingLattice {
    AlgebraBuilder::new("boolean")
        .carrier(["0", "1"])
        .chain()
        .rule(CONJ, 2, OpRule::Min)
        .upset("1")
        .build()
        .expect("boolean fixture")
}

/// `2` with only the lattice connectives.
pub fn boolean_lattice() -> InterpretingLattice {
    AlgebraBuilder::new("boolean-lattice")
        .carrier(["0", "1"])
        .chain()
        .upset("1")
        .build()
        .expect("boolean lattice fixture")
}

/// `2` over `{join, meet, zero, one}`.
pub fn boolean_constants() -> InterpretingLattice {
    AlgebraBuilder::new("boolean-constants")
        .carrier(["0", "1"])
        .chain()
        .constant("zero", "0")
        .constant("one", "1")
        .upset("1")
        .build()
        .expect("boolean constants fixture")
}

/// The four-element Boolean lattice `bot < a, b < top` with a chosen filter.
pub fn four_boolean(filter: &[&str]) -> Result<InterpretingLattice, AlgebraError> {
    AlgebraBuilder::new("four-boolean")
        .carrier(["bot", "a", "b", "top"])
        .order(OrderSpec::Pairs(
            [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")]
                .iter()
                .map(|(x, y)| ((*x).into(), (*y).into()))
                .collect(),
        ))
        .filter_set(filter.iter().copied())
        .build()
}

/// The four-element Boolean lattice with the prime filter `{b, top}`.
///
/// With `F = {top}` the join law fails at `a ∨ b`, so the loader rejects
/// it; the upset of `b` keeps `M1 ⊨ ∃z R(z)` and `M2 ⊭ ∃z R(z)`.
pub fn four_boolean_repaired() -> InterpretingLattice {
    four_boolean(&["b", "top"]).expect("four-boolean fixture")
}

/// Chain `0, 1/(k-1), ..., 1` with `conj = min` and `F = {1}`.
pub fn godel_chain(k: usize) -> InterpretingLattice {
    assert!(k >= 2, "a Gödel chain needs at least two elements");
    AlgebraBuilder::new(format!("godel{k}"))
        .carrier(chain_tokens(k))
        .chain()
        .rule(CONJ, 2, OpRule::Min)
        .upset("1")
        .build()
        .expect("godel fixture")
}

/// Chain `0, 1/(k-1), ..., 1` with Łukasiewicz `conj` and `F = {1}`.
pub fn lukasiewicz_chain(k: usize) -> InterpretingLattice {
    assert!(k >= 2, "a Łukasiewicz chain needs at least two elements");
    AlgebraBuilder::new(format!("lukasiewicz{k}"))
        .carrier(chain_tokens(k))
        .chain()
        .rule(CONJ, 2, OpRule::Lukasiewicz)
        .upset("1")
        .build()
        .expect("lukasiewicz fixture")
}

/// Sixths of the unit interval with the uninorm `conj` (unit `1/2`) and
/// `F` the upset of `1/2`.
pub fn ul_sixths() -> InterpretingLattice {
    AlgebraBuilder::new("ul-sixths")
        .carrier(chain_tokens(7))
        .chain()
        .rule(CONJ, 2, OpRule::Uninorm)
        .upset("1/2")
        .unit(CONJ, "1/2")
        .build()
        .expect("ul fixture")
}

/// The chain `0 < alpha < 1` over `{join, meet, zero, one}` with `F = {1}`.
pub fn min_cut_algebra(alpha: Rational) -> Result<InterpretingLattice, FixtureError> {
    if alpha <= Rational::from_integer(0) || alpha >= Rational::from_integer(1) {
        return Err(FixtureError::AlphaOutOfRange(alpha));
    }
    let a = format!("{}/{}", alpha.numer(), alpha.denom());
    Ok(AlgebraBuilder::new("min-cut")
        .carrier(["0", a.as_str(), "1"])
        .chain()
        .constant("zero", "0")
        .constant("one", "1")
        .upset("1")
        .build()?)
}

/// Resolves a built-in algebra name.
pub fn by_name(name: &str) -> Option<InterpretingLattice> {
    Some(match name {
        "boolean" | "2" => boolean(),
        "boolean-lattice" => boolean_lattice(),
        "boolean-constants" => boolean_constants(),
        "four-boolean" => four_boolean_repaired(),
        "ul-sixths" => ul_sixths(),
        "min-cut" => min_cut_algebra(Rational::new(1, 2)).ok()?,
        _ => {
            // `godelN` and `lukasiewiczN` for any chain length N >= 2.
            let (build, n): (fn(usize) -> InterpretingLattice, &str) = if let Some(n) = name.strip_prefix("godel") {
                (godel_chain, n)
            } else {
                (lukasiewicz_chain, name.strip_prefix("lukasiewicz")?)
            };
            match n.parse::<usize>() {
                Ok(n) if (2..=64).contains(&n) => build(n),
                _ => return None,
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error("alpha must satisfy 0 < alpha < 1, got {0}")]
    AlphaOutOfRange(Rational),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `M1: x ↦ a, y ↦ b` and `M2: x ↦ a, y ↦ bot` over [`four_boolean_repaired`].
pub fn prime_requirement_models() -> (PModel, PModel) {
    let alg = Arc::new(four_boolean_repaired());
    let lang: Arc<PredicateLanguage> = Arc::new("R:1".parse().unwrap());
    let m1 = PModelBuilder::new("M1", alg.clone(), lang.clone())
        .domain(["x", "y"])
        .set("R", &["x"], "a")
        .set("R", &["y"], "b")
        .build()
        .expect("M1 fixture");
    let m2 = PModelBuilder::new("M2", alg, lang)
        .domain(["x", "y"])
        .set("R", &["x"], "a")
        .set("R", &["y"], "bot")
        .build()
        .expect("M2 fixture");
    (m1, m2)
}

/// Which assignment of the UL-chain example to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UlVariant {
    /// `R^M1 = 5/6, P^M1 = 1/3, R^M2 = 2/3, P^M2 = 1/6`: consistent with the
    /// worked calculation, and the identity is a homomorphism.
    Repaired,
    /// `R^M1 = 5/6, P^M1 = 2/3, R^M2 = 1/3, P^M2 = 1/6` as first displayed;
    /// the identity is not even a protomorphism.
    Original,
}

/// The one-point models `M1`, `M2` over [`ul_sixths`], language `{P:1, R:1}`.
pub fn ul_models(variant: UlVariant) -> (PModel, PModel) {
    let alg = Arc::new(ul_sixths());
    let lang: Arc<PredicateLanguage> = Arc::new("P:1 R:1".parse().unwrap());
    let (r1, p1, r2, p2) = match variant {
        UlVariant::Repaired => ("5/6", "1/3", "4/6", "1/6"),
        UlVariant::Original => ("5/6", "4/6", "1/3", "1/6"),
    };
    let build = |name: &str, r: &str, p: &str| {
        PModelBuilder::new(name, alg.clone(), lang.clone())
            .domain(["m"])
            .set("R", &["m"], r)
            .set("P", &["m"], p)
            .build()
            .expect("UL fixture")
    };
    (build("M1", r1, p1), build("M2", r2, p2))
}

/// The two-vertex weighted cut graph `B_alpha` over {R:2, Ps:1, Pt:1}.
pub fn min_cut_model(alpha: Rational) -> Result<PModel, FixtureError> {
    let alg = Arc::new(min_cut_algebra(alpha)?);
    let a = alg.label(Elem(1)).text().to_string();
    let lang: Arc<PredicateLanguage> = Arc::new("Ps:1 Pt:1 R:2".parse().unwrap());
    Ok(PModelBuilder::new("B_alpha", alg, lang)
        .domain(["a", "b"])
        .set("Ps", &["a"], "1")
        .set("Ps", &["b"], "0")
        .set("Pt", &["a"], "0")
        .set("Pt", &["b"], "1")
        .set("R", &["a", "a"], "1")
        .set("R", &["a", "b"], &a)
        .set("R", &["b", "a"], "1")
        .set("R", &["b", "b"], "1")
        .build()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_load() {
        for name in BUILTIN_ALGEBRAS {
            let alg = by_name(name).unwrap_or_else(|| panic!("{name}"));
            assert!(alg.size() >= 2);
        }
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn original_four_boolean_is_rejected() {
        assert!(matches!(
            four_boolean(&["top"]),
            Err(AlgebraError::FilterNotPrime { .. })
        ));
    }

    #[test]
    fn alpha_precondition() {
        assert!(min_cut_model(Rational::new(1, 2)).is_ok());
        assert_eq!(
            min_cut_model(Rational::from_integer(1)).unwrap_err(),
            FixtureError::AlphaOutOfRange(Rational::from_integer(1))
        );
        assert!(min_cut_model(Rational::new(0, 1)).is_err());
        let m = min_cut_model(Rational::new(1, 3)).unwrap();
        assert_eq!(m.algebra().label(m.value_of("R", &["a", "b"]).unwrap()).text(), "1/3");
    }

    #[test]
    fn ul_fixture_values() {
        let (m1, m2) = ul_models(UlVariant::Repaired);
        let alg = m1.algebra();
        assert_eq!(m1.value_of("R", &["m"]).unwrap(), alg.elem("5/6").unwrap());
        assert_eq!(m2.value_of("R", &["m"]).unwrap(), alg.elem("2/3").unwrap());
        assert_eq!(m2.value_of("P", &["m"]).unwrap(), alg.elem("1/6").unwrap());
    }
}

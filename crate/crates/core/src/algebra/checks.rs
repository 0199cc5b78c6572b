//! Axiom validation and the (A₀)/(A₁) conditions.

use std::fmt;

use super::{AlgebraSpec, Element};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsaProperty {
    Unit,
    ParityClosure,
    SuperCommutativity,
    Associativity,
}

impl fmt::Display for CsaProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CsaProperty::Unit => "unit",
            CsaProperty::ParityClosure => "parity closure",
            CsaProperty::SuperCommutativity => "supercommutativity",
            CsaProperty::Associativity => "associativity",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub property: CsaProperty,
    pub passed: bool,
    /// First failing basis indices, e.g. `[i, j, k]`.
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsaReport {
    pub checks: Vec<CheckOutcome>,
}

impl CsaReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn outcome(&self, property: CsaProperty) -> &CheckOutcome {
        self.checks
            .iter()
            .find(|c| c.property == property)
            .expect("every property is checked")
    }
}

fn scale_of<S: Scalar>(alg: &AlgebraSpec<S>) -> f64 {
    alg.table
        .iter()
        .flatten()
        .map(|(_, g)| g.to_f64().abs())
        .fold(1.0, f64::max)
}

/// Checks every superalgebra axiom exhaustively over basis pairs and triples.
pub fn validate_csa<S: Scalar>(alg: &AlgebraSpec<S>) -> CsaReport {
    let dim = alg.dim();
    let scale = scale_of(alg);
    let outcome = |property, witness: Option<Vec<usize>>| CheckOutcome {
        property,
        passed: witness.is_none(),
        witness,
    };

    let unit = (0..dim)
        .flat_map(|j| [(0, j), (j, 0)])
        .find(|&(a, b)| {
            let e = alg.mul(&alg.basis(a), &alg.basis(b));
            !(&e - &alg.basis(if a == 0 { b } else { a })).is_negligible(scale)
        })
        .map(|(a, b)| vec![a, b]);

    let mut parity = None;
    'outer: for i in 0..dim {
        for j in 0..dim {
            for (k, g) in alg.products(i, j) {
                if (alg.parity(i) + alg.parity(j)) % 2 != alg.parity(*k) && !g.is_negligible(scale) {
                    parity = Some(vec![i, j, *k]);
                    break 'outer;
                }
            }
        }
    }

    let mut commut = None;
    'outer: for i in 0..dim {
        for j in i..dim {
            let both_odd = alg.parity(i) == 1 && alg.parity(j) == 1;
            for k in 0..dim {
                let (gij, gji) = (alg.gamma(i, j, k), alg.gamma(j, i, k));
                let defect = if both_odd { gij + gji } else { gij - gji };
                if !defect.is_negligible(scale) {
                    commut = Some(vec![i, j, k]);
                    break 'outer;
                }
            }
        }
    }

    let mut assoc = None;
    'outer: for i in 0..dim {
        for j in 0..dim {
            let ij = alg.mul(&alg.basis(i), &alg.basis(j));
            for k in 0..dim {
                let left = alg.mul(&ij, &alg.basis(k));
                let jk = alg.mul(&alg.basis(j), &alg.basis(k));
                let right = alg.mul(&alg.basis(i), &jk);
                if !(&left - &right).is_negligible(scale) {
                    assoc = Some(vec![i, j, k]);
                    break 'outer;
                }
            }
        }
    }

    CsaReport {
        checks: vec![
            outcome(CsaProperty::Unit, unit),
            outcome(CsaProperty::ParityClosure, parity),
            outcome(CsaProperty::SuperCommutativity, commut),
            outcome(CsaProperty::Associativity, assoc),
        ],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct A0Report<S> {
    /// `Σ_{k=0}^{p} e_k²`.
    pub sum: Element<S>,
    pub holds: bool,
}

/// Computes `Σ_{k=0}^{p} e_k²` and whether it vanishes.
pub fn check_a0<S: Scalar>(alg: &AlgebraSpec<S>) -> A0Report<S> {
    let mut sum = alg.zero();
    for k in 0..alg.p_plus_1() {
        let e = alg.basis(k);
        sum = &sum + &alg.mul(&e, &e);
    }
    let holds = sum.is_negligible(scale_of(alg));
    A0Report { sum, holds }
}

#[derive(Debug, Clone, PartialEq)]
pub struct A1Report<S> {
    /// Per block: `Σ_{j=s_k}^{s_{k+1}-1} a_j²`.
    pub block_sums: Vec<Element<S>>,
    /// Per odd component `j`: `ε_j - ε_{s_k} a_j`.
    pub relation_residuals: Vec<Element<S>>,
    pub holds: bool,
}

/// Verifies the (A₁) witness attached to `alg`. With `q = 0` the condition
/// holds vacuously.
pub fn check_a1<S: Scalar>(alg: &AlgebraSpec<S>) -> Result<A1Report<S>> {
    if alg.q() == 0 {
        return Ok(A1Report {
            block_sums: Vec::new(),
            relation_residuals: Vec::new(),
            holds: true,
        });
    }
    let data = alg.require_a1()?;
    let scale = scale_of(alg);
    for block in data.blocks() {
        let lead = data.multiplier(block.start);
        if lead != &alg.one() {
            return Err(Error::InvalidA1Witness(format!(
                "a_{} = {} must be the unit",
                block.start + 1,
                alg.format_element(lead)
            )));
        }
    }
    let block_sums: Vec<Element<S>> = data
        .blocks()
        .iter()
        .map(|block| {
            block.clone().fold(alg.zero(), |acc, j| {
                let a = data.multiplier(j);
                &acc + &alg.mul(a, a)
            })
        })
        .collect();
    let relation_residuals: Vec<Element<S>> = (0..alg.q())
        .map(|j| {
            let lead = alg.epsilon(data.leading(j));
            &alg.epsilon(j) - &alg.mul(&lead, data.multiplier(j))
        })
        .collect();
    let holds = block_sums
        .iter()
        .chain(&relation_residuals)
        .all(|e| e.is_negligible(scale));
    Ok(A1Report {
        block_sums,
        relation_residuals,
        holds,
    })
}

/// Basis of the Λ₁-annihilator `{λ : λ ε_l = 0 for every l}`, computed as
/// the null space of the stacked maps `λ ↦ λ ε_l`.
pub fn annihilator<S: Scalar>(alg: &AlgebraSpec<S>) -> Vec<Element<S>> {
    let dim = alg.dim();
    if alg.q() == 0 {
        return (0..dim).map(|i| alg.basis(i)).collect();
    }
    let mut m = Matrix::zeros(alg.q() * dim, dim);
    for l in 0..alg.q() {
        let eps = alg.p_plus_1() + l;
        for i in 0..dim {
            for (k, g) in alg.products(i, eps) {
                m.set(l * dim + k, i, g.clone());
            }
        }
    }
    linalg::null_space(&m)
        .into_iter()
        .map(Element::from_coeffs)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{clifford, complex, example4, hyperbolic, odd_extension, A1Data};
    use crate::scalar::Rational;
    use num_traits::Zero;

    #[test]
    fn example4_is_a_csa() {
        let report = validate_csa(&example4());
        assert!(report.is_valid(), "{report:?}");
    }

    #[test]
    fn clifford_fails_only_supercommutativity() {
        // e₁e₂ is even, e₁ odd, yet (e₁e₂)e₁ = e₂ = -e₁(e₁e₂): the graded
        // algebra is associative but not supercommutative.
        let report = validate_csa(&clifford(2).unwrap());
        assert!(report.outcome(CsaProperty::Unit).passed);
        assert!(report.outcome(CsaProperty::ParityClosure).passed);
        assert!(report.outcome(CsaProperty::Associativity).passed);
        assert!(!report.outcome(CsaProperty::SuperCommutativity).passed);
    }

    #[test]
    fn broken_antisymmetry_has_witness() {
        let base = example4();
        // Make ε₁ε₃ = ε₃ε₁ = e₃.
        let broken = AlgebraSpec::from_products("broken", 6, 4, |i, j| match (i, j) {
            (6, 8) => vec![(3, Rational::from_i64(1))],
            _ => base.products(i, j).to_vec(),
        })
        .unwrap();
        let report = validate_csa(&broken);
        let c = report.outcome(CsaProperty::SuperCommutativity);
        assert!(!c.passed);
        assert_eq!(c.witness.as_deref(), Some(&[6, 8, 3][..]));
    }

    #[test]
    fn a0_verdicts() {
        let c = check_a0(&complex());
        assert!(c.holds && c.sum.is_zero());
        let h = check_a0(&hyperbolic());
        assert!(!h.holds);
        assert_eq!(h.sum, hyperbolic().element(&[2, 0]));
        assert!(check_a0(&example4()).holds);
    }

    #[test]
    fn a0_on_clifford_follows_k_mod_4() {
        for k in 1..=6 {
            assert_eq!(check_a0(&clifford(k).unwrap()).holds, k % 4 == 2, "k = {k}");
        }
    }

    #[test]
    fn a0_is_invariant_under_basis_permutation() {
        // Relabel e₂ <-> e₄ and e₃ <-> e₅ in example4.
        let base = example4();
        let perm = |i: usize| match i {
            2 => 4,
            4 => 2,
            3 => 5,
            5 => 3,
            i => i,
        };
        let permuted = AlgebraSpec::from_products("permuted", 6, 4, |i, j| {
            base.products(perm(i), perm(j))
                .iter()
                .map(|(k, g)| (perm(*k), g.clone()))
                .collect()
        })
        .unwrap();
        assert_eq!(check_a0(&permuted), check_a0(&base));
    }

    #[test]
    fn a1_on_example4() {
        let r = check_a1(&example4()).unwrap();
        assert!(r.holds);
        assert_eq!(r.block_sums.len(), 2);
        assert!(r.block_sums.iter().all(Element::is_zero));
        assert!(r.relation_residuals.iter().all(Element::is_zero));
    }

    #[test]
    fn a1_vacuous_without_odd_part() {
        assert!(check_a1(&complex()).unwrap().holds);
    }

    #[test]
    fn a1_errors() {
        let alg = example4();
        let bare = AlgebraSpec::from_products("bare", 6, 4, |i, j| alg.products(i, j).to_vec()).unwrap();
        assert!(matches!(check_a1(&bare), Err(Error::MissingA1Data(_))));
        let e1 = alg.basis(1);
        let bad = A1Data::new(&[1, 3], vec![e1.clone(), e1.clone(), alg.one(), e1], 4).unwrap();
        let with_bad = bare.with_a1(bad).unwrap();
        assert!(matches!(check_a1(&with_bad), Err(Error::InvalidA1Witness(_))));
    }

    #[test]
    fn a1_of_odd_extension_tracks_a0() {
        for base in [complex(), hyperbolic()] {
            let ext = odd_extension(&base).unwrap();
            assert!(validate_csa(&ext).is_valid());
            assert_eq!(check_a1(&ext).unwrap().holds, check_a0(&base).holds, "{}", base.name());
        }
    }

    #[test]
    fn annihilators() {
        let alg = example4();
        let ann = annihilator(&alg);
        assert_eq!(ann.len(), 4);
        // The null space is exactly span(e₂, e₃, e₄, e₅).
        for v in &ann {
            assert!(v.coeffs()[..2].iter().all(Zero::is_zero));
            assert!(v.coeffs()[6..].iter().all(Zero::is_zero));
            for l in 0..4 {
                assert!(alg.mul(v, &alg.epsilon(l)).is_zero());
            }
        }
        assert_eq!(annihilator(&complex()).len(), 2);
        assert!(annihilator(&clifford(2).unwrap()).is_empty());
    }
}

//! Named example algebras.

use super::{A1Data, AlgebraSpec, Element};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Largest `k` accepted by [`clifford`] through [`builtin`].
pub const CLIFFORD_LIMIT: usize = 8;

fn q(v: i64) -> Rational {
    Rational::from_i64(v)
}

/// Looks up `complex`, `hyperbolic`, `example4` or `clifford(k)`
/// (`clifford:k` and `clifford-k` are accepted too).
pub fn builtin(name: &str) -> Result<AlgebraSpec<Rational>> {
    let name = name.trim();
    match name {
        "complex" => Ok(complex()),
        "hyperbolic" => Ok(hyperbolic()),
        "example4" => Ok(example4()),
        _ => {
            let k = name
                .strip_prefix("clifford")
                .map(|rest| rest.trim_start_matches(['(', ':', '-']).trim_end_matches(')'))
                .and_then(|k| k.parse::<usize>().ok())
                .ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
            if k > CLIFFORD_LIMIT {
                return Err(Error::OutOfRange(format!(
                    "clifford({k}) exceeds the limit k <= {CLIFFORD_LIMIT}"
                )));
            }
            clifford(k)
        }
    }
}

/// `Λ₀ = span(e₀, e₁)` with `e₁² = -e₀`, `Λ₁ = 0`.
pub fn complex() -> AlgebraSpec<Rational> {
    two_dim("complex", -1)
}

/// `Λ₀ = span(e₀, e₁)` with `e₁² = e₀`, `Λ₁ = 0`.
pub fn hyperbolic() -> AlgebraSpec<Rational> {
    two_dim("hyperbolic", 1)
}

fn two_dim(name: &str, square: i64) -> AlgebraSpec<Rational> {
    AlgebraSpec::from_products(name, 2, 0, |i, j| match (i, j) {
        (0, j) => vec![(j, q(1))],
        (i, 0) => vec![(i, q(1))],
        _ => vec![(0, q(square))],
    })
    .expect("builtin table has a unit")
}

/// Real Clifford algebra on `k` anticommuting generators with
/// `e_i e_j + e_j e_i = -2δ_ij`, graded by blade parity.
///
/// Even blades come first (ordered by grade, then lexicographically), so
/// index 0 is the empty blade. This algebra is a superalgebra but, for
/// `k ≥ 1`, not a supercommutative one; [`super::validate_csa`] says so.
pub fn clifford(k: usize) -> Result<AlgebraSpec<Rational>> {
    if k > 16 {
        return Err(Error::OutOfRange(format!("clifford({k}) is too large to tabulate")));
    }
    let mut even: Vec<u32> = (0..1u32 << k).filter(|b| b.count_ones() % 2 == 0).collect();
    let mut odd: Vec<u32> = (0..1u32 << k).filter(|b| b.count_ones() % 2 == 1).collect();
    let order = |b: &u32| (b.count_ones(), (0..k).filter(|g| b & (1 << g) != 0).collect::<Vec<_>>());
    even.sort_by_key(order);
    odd.sort_by_key(order);
    let blades: Vec<u32> = even.iter().chain(&odd).copied().collect();
    let mut index = vec![0usize; 1 << k];
    for (i, b) in blades.iter().enumerate() {
        index[*b as usize] = i;
    }
    let alg = AlgebraSpec::from_products(format!("clifford({k})"), even.len(), odd.len(), |i, j| {
        let (a, b) = (blades[i], blades[j]);
        // Reordering sign: each generator of b passes the larger generators of a.
        let mut swaps = 0;
        for g in 0..k {
            if b & (1 << g) != 0 {
                swaps += (a >> (g + 1)).count_ones();
            }
        }
        // Each shared generator squares to -1.
        swaps += (a & b).count_ones();
        let sign = if swaps % 2 == 0 { 1 } else { -1 };
        vec![(index[(a ^ b) as usize], q(sign))]
    })?;
    Ok(alg)
}

/// The 10-dimensional algebra with `dim Λ₀ = 6`, `dim Λ₁ = 4`, carrying
/// the (A₁) witness `s = (1, 3)`, `a = (e₀, e₁, e₀, e₁)`.
pub fn example4() -> AlgebraSpec<Rational> {
    // Rows: left factor; entries: (right factor, result index, sign).
    // Indices 0..=5 are e₀..e₅, 6..=9 are ε₁..ε₄.
    const TABLE: &[(usize, &[(usize, usize, i64)])] = &[
        (1, &[(1, 0, -1), (2, 3, 1), (3, 2, -1), (4, 5, 1), (5, 4, -1), (6, 7, 1), (7, 6, -1), (8, 9, 1), (9, 8, -1)]),
        (2, &[(1, 3, 1)]),
        (3, &[(1, 2, -1)]),
        (4, &[(1, 5, 1), (4, 4, 1), (5, 5, 1)]),
        (5, &[(1, 4, -1), (4, 5, 1), (5, 4, -1)]),
        (6, &[(1, 7, 1), (8, 3, -1), (9, 2, 1)]),
        (7, &[(1, 6, -1), (8, 2, 1), (9, 3, 1)]),
        (8, &[(1, 9, 1), (6, 3, 1), (7, 2, -1)]),
        (9, &[(1, 8, -1), (6, 2, -1), (7, 3, -1)]),
    ];
    let alg = AlgebraSpec::from_products("example4", 6, 4, |i, j| {
        if i == 0 {
            return vec![(j, q(1))];
        }
        if j == 0 {
            return vec![(i, q(1))];
        }
        TABLE
            .iter()
            .find(|(row, _)| *row == i)
            .and_then(|(_, entries)| entries.iter().find(|(col, _, _)| *col == j))
            .map(|&(_, k, s)| vec![(k, q(s))])
            .unwrap_or_default()
    })
    .expect("builtin table has a unit");
    let e0 = alg.one();
    let e1 = alg.basis(1);
    let witness = A1Data::new(&[1, 3], vec![e0.clone(), e1.clone(), e0, e1], 4)
        .expect("builtin witness is well formed");
    alg.with_a1(witness).expect("builtin witness matches the table")
}

/// `Λ = Λ₀ ⊕ ε₁Λ₀` over a purely even algebra `Λ₀`, with basis
/// `ε_j = ε₁ e_{j-1}` and all odd products zero. Carries the witness
/// `s = (1)`, `a_j = e_{j-1}`, so its (A₁) block sum is the (A₀) sum of `Λ₀`.
pub fn odd_extension<S: Scalar>(base: &AlgebraSpec<S>) -> Result<AlgebraSpec<S>> {
    if base.q() != 0 {
        return Err(Error::Precondition("odd_extension expects a purely even algebra".into()));
    }
    let p1 = base.p_plus_1();
    let alg = AlgebraSpec::from_products(format!("{}+odd", base.name()), p1, p1, |i, j| {
        match (i < p1, j < p1) {
            (true, true) => base.products(i, j).to_vec(),
            (true, false) => base
                .products(i, j - p1)
                .iter()
                .map(|(k, g)| (k + p1, g.clone()))
                .collect(),
            (false, true) => base
                .products(i - p1, j)
                .iter()
                .map(|(k, g)| (k + p1, g.clone()))
                .collect(),
            (false, false) => Vec::new(),
        }
    })?;
    let a = (0..p1).map(|k| Element::basis(2 * p1, k)).collect();
    let witness = A1Data::new(&[1], a, p1)?;
    alg.with_a1(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn lookup_by_name() {
        assert_eq!(builtin("complex").unwrap().p_plus_1(), 2);
        assert_eq!(builtin("complex").unwrap().q(), 0);
        let e4 = builtin("example4").unwrap();
        assert_eq!((e4.p_plus_1(), e4.q()), (6, 4));
        let c2 = builtin("clifford(2)").unwrap();
        assert_eq!(c2.dim(), 4);
        assert_eq!(c2.p_plus_1(), 2);
        assert!(matches!(builtin("quaternion"), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(builtin("clifford(9)"), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn clifford_two_even_part_is_one_and_bivector() {
        let c = clifford(2).unwrap();
        // Λ₀ = span(1, e₁e₂), and (e₁e₂)² = -1.
        let b = c.basis(1);
        assert_eq!(c.mul(&b, &b), -c.one());
        // Odd part spans the two generators.
        let (g1, g2) = (c.epsilon(0), c.epsilon(1));
        assert_eq!(c.mul(&g1, &g2), b);
    }

    #[test]
    fn clifford_generators_anticommute() {
        for k in 1..=5 {
            let c = clifford(k).unwrap();
            // Generators are the grade-1 blades, which open the odd block.
            let gens: Vec<_> = (0..k).map(|g| c.epsilon(g)).collect();
            for (i, gi) in gens.iter().enumerate() {
                for (j, gj) in gens.iter().enumerate() {
                    let s = &c.mul(gi, gj) + &c.mul(gj, gi);
                    let expected = if i == j { c.one().scale(&q(-2)) } else { c.zero() };
                    assert_eq!(s, expected, "k={k} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn odd_extension_of_complex() {
        let alg = odd_extension(&complex()).unwrap();
        assert_eq!((alg.p_plus_1(), alg.q()), (2, 2));
        // ε₂ = ε₁ e₁
        assert_eq!(alg.mul(&alg.epsilon(0), &alg.basis(1)), alg.epsilon(1));
        assert!(alg.mul(&alg.epsilon(0), &alg.epsilon(1)).coeffs().iter().all(Zero::is_zero));
    }
}

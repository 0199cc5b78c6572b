//! Finite-dimensional real commutative superalgebras given by structure
//! constants.
//!
//! The basis is `e_0, ..., e_p` for the even part `Λ₀` (with `e_0` the unit)
//! followed by `ε_1, ..., ε_q` for the odd part `Λ₁`; in flat indices
//! `ε_l` is `e_{p+l}`. Products are stored row by row as sparse lists of
//! `(k, Γ_ij^k)`.

mod builtin;
mod checks;
mod document;

use std::fmt;
use std::ops::{Add, Neg, Range, Sub};

pub use builtin::{builtin, clifford, complex, example4, hyperbolic, odd_extension, CLIFFORD_LIMIT};
pub use checks::{
    annihilator, check_a0, check_a1, validate_csa, A0Report, A1Report, CheckOutcome, CsaProperty,
    CsaReport,
};
pub use document::{parse_algebra, AlgebraDocument, ParsedAlgebra};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

/// A vector of coefficients over the algebra basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Element<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Element<S> {
    pub fn zero(dim: usize) -> Self {
        Element {
            coeffs: vec![S::zero(); dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut e = Self::zero(dim);
        e.coeffs[index] = S::one();
        e
    }

    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        Element { coeffs }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Zero test at the field's precision.
    pub fn is_negligible(&self, scale: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(scale))
    }

    pub fn norm_squared(&self) -> S {
        self.coeffs
            .iter()
            .fold(S::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    /// Euclidean norm in the orthonormal basis.
    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: &S) -> Self {
        Element {
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn to_f64(&self) -> Element<f64> {
        Element {
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Adds `s * other` in place.
    pub fn add_scaled(&mut self, s: &S, other: &Element<S>) {
        assert_eq!(self.dim(), other.dim(), "element length mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.clone() + s.clone() * b.clone();
        }
    }
}

impl Element<f64> {
    pub fn distance(&self, other: &Element<f64>) -> f64 {
        (self - other).norm()
    }
}

impl<S: Scalar> fmt::Display for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl<S: Scalar> Add for &Element<S> {
    type Output = Element<S>;

    fn add(self, rhs: &Element<S>) -> Element<S> {
        assert_eq!(self.dim(), rhs.dim(), "element length mismatch");
        Element {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for &Element<S> {
    type Output = Element<S>;

    fn sub(self, rhs: &Element<S>) -> Element<S> {
        assert_eq!(self.dim(), rhs.dim(), "element length mismatch");
        Element {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Add for Element<S> {
    type Output = Element<S>;

    fn add(self, rhs: Element<S>) -> Element<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for Element<S> {
    type Output = Element<S>;

    fn sub(self, rhs: Element<S>) -> Element<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Neg for &Element<S> {
    type Output = Element<S>;

    fn neg(self) -> Element<S> {
        Element {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl<S: Scalar> Neg for Element<S> {
    type Output = Element<S>;

    fn neg(self) -> Element<S> {
        -&self
    }
}

/// The (A₁) witness: a block decomposition of the odd basis with
/// `ε_j = ε_{s_k} a_j` inside each block.
#[derive(Clone, Debug, PartialEq)]
pub struct A1Data<S> {
    /// 0-based odd-component ranges; the first index of each is the leading one.
    blocks: Vec<Range<usize>>,
    a: Vec<Element<S>>,
}

impl<S: Scalar> A1Data<S> {
    /// Builds the witness from the 1-based sequence `1 = s_1 < ... < s_r`
    /// (the closing `s_{r+1} = q + 1` may be included or omitted) and the
    /// `q` multipliers `a_1, ..., a_q`.
    pub fn new(s: &[usize], a: Vec<Element<S>>, q: usize) -> Result<Self> {
        let mut s = s.to_vec();
        if s.last() == Some(&(q + 1)) {
            s.pop();
        }
        if s.first() != Some(&1) {
            return Err(Error::InvalidA1Witness(format!(
                "s-sequence must start at 1, got {s:?}"
            )));
        }
        if s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&v| v > q) {
            return Err(Error::InvalidA1Witness(format!(
                "s-sequence must be strictly increasing within 1..={q}, got {s:?}"
            )));
        }
        if a.len() != q {
            return Err(Error::DimensionMismatch {
                what: "(A1) multipliers",
                expected: q,
                found: a.len(),
            });
        }
        let mut bounds: Vec<usize> = s.iter().map(|v| v - 1).collect();
        bounds.push(q);
        let blocks = bounds.windows(2).map(|w| w[0]..w[1]).collect();
        Ok(A1Data { blocks, a })
    }

    /// The 1-based sequence `s_1, ..., s_r, s_{r+1} = q + 1`.
    pub fn s_sequence(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().map(|b| b.start + 1).collect();
        if let Some(last) = self.blocks.last() {
            s.push(last.end + 1);
        }
        s
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn multipliers(&self) -> &[Element<S>] {
        &self.a
    }

    /// `a_t` for the 0-based odd component `t`.
    pub fn multiplier(&self, t: usize) -> &Element<S> {
        &self.a[t]
    }

    pub fn block_of(&self, t: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&t))
            .expect("odd component outside every block")
    }

    /// The leading component `s_k - 1` of the block containing `t`.
    pub fn leading(&self, t: usize) -> usize {
        self.blocks[self.block_of(t)].start
    }

    pub fn is_leading(&self, t: usize) -> bool {
        self.blocks.iter().any(|b| b.start == t)
    }

    fn to_f64(&self) -> A1Data<f64> {
        A1Data {
            blocks: self.blocks.clone(),
            a: self.a.iter().map(Element::to_f64).collect(),
        }
    }
}

/// A real superalgebra presented by its structure constants.
#[derive(Clone, Debug)]
pub struct AlgebraSpec<S> {
    name: String,
    p_plus_1: usize,
    q: usize,
    /// `table[i * dim + j]` lists the nonzero `(k, Γ_ij^k)`.
    table: Vec<Vec<(usize, S)>>,
    a1: Option<A1Data<S>>,
}

impl<S: Scalar> AlgebraSpec<S> {
    /// Builds an algebra from a dense `gamma[i][j][k]` array flattened in
    /// row-major order. Only the unit axiom is enforced here; the remaining
    /// superalgebra axioms are reported by [`validate_csa`].
    pub fn from_dense(name: impl Into<String>, p_plus_1: usize, q: usize, gamma: &[S]) -> Result<Self> {
        let dim = p_plus_1 + q;
        if gamma.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                what: "structure constants",
                expected: dim * dim * dim,
                found: gamma.len(),
            });
        }
        Self::from_products(name, p_plus_1, q, |i, j| {
            (0..dim)
                .filter_map(|k| {
                    let g = &gamma[(i * dim + j) * dim + k];
                    (!g.is_zero()).then(|| (k, g.clone()))
                })
                .collect()
        })
    }

    /// Builds an algebra from a closure returning the nonzero terms of
    /// `e_i e_j`.
    pub fn from_products<F>(name: impl Into<String>, p_plus_1: usize, q: usize, product: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Vec<(usize, S)>,
    {
        if p_plus_1 == 0 {
            return Err(Error::Schema {
                location: "p_plus_1".into(),
                message: "the even part must contain the unit".into(),
            });
        }
        let dim = p_plus_1 + q;
        let mut table = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut terms: Vec<(usize, S)> =
                    product(i, j).into_iter().filter(|(_, g)| !g.is_zero()).collect();
                terms.sort_by_key(|(k, _)| *k);
                if let Some((k, _)) = terms.iter().find(|(k, _)| *k >= dim) {
                    return Err(Error::OutOfRange(format!("product e{i}e{j} names basis index {k}")));
                }
                table.push(terms);
            }
        }
        let alg = AlgebraSpec {
            name: name.into(),
            p_plus_1,
            q,
            table,
            a1: None,
        };
        alg.check_unit()?;
        Ok(alg)
    }

    fn check_unit(&self) -> Result<()> {
        let dim = self.dim();
        for j in 0..dim {
            for (a, b) in [(0, j), (j, 0)] {
                let ok = match self.products(a, b) {
                    [(k, g)] => *k == j && g.is_one(),
                    _ => false,
                };
                if !ok {
                    return Err(Error::UnitAxiom(a, b));
                }
            }
        }
        Ok(())
    }

    /// Attaches an (A₁) witness. The witness is checked for shape here and
    /// for content by [`check_a1`].
    pub fn with_a1(mut self, a1: A1Data<S>) -> Result<Self> {
        if let Some(bad) = a1.a.iter().find(|a| a.dim() != self.dim()) {
            return Err(Error::DimensionMismatch {
                what: "(A1) multiplier",
                expected: self.dim(),
                found: bad.dim(),
            });
        }
        if a1.blocks.last().map(|b| b.end) != Some(self.q) {
            return Err(Error::InvalidA1Witness("blocks do not cover the odd basis".into()));
        }
        self.a1 = Some(a1);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.p_plus_1 + self.q
    }

    pub fn p_plus_1(&self) -> usize {
        self.p_plus_1
    }

    pub fn p(&self) -> usize {
        self.p_plus_1 - 1
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn a1(&self) -> Option<&A1Data<S>> {
        self.a1.as_ref()
    }

    pub fn require_a1(&self) -> Result<&A1Data<S>> {
        self.a1
            .as_ref()
            .ok_or_else(|| Error::MissingA1Data(self.name.clone()))
    }

    /// Parity σ of a basis index.
    pub fn parity(&self, index: usize) -> u8 {
        u8::from(index >= self.p_plus_1)
    }

    pub fn products(&self, i: usize, j: usize) -> &[(usize, S)] {
        &self.table[i * self.dim() + j]
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> S {
        self.products(i, j)
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, g)| g.clone())
            .unwrap_or_else(S::zero)
    }

    pub fn basis(&self, index: usize) -> Element<S> {
        Element::basis(self.dim(), index)
    }

    pub fn one(&self) -> Element<S> {
        self.basis(0)
    }

    pub fn zero(&self) -> Element<S> {
        Element::zero(self.dim())
    }

    /// `ε_{l+1}` for the 0-based odd component `l`.
    pub fn epsilon(&self, l: usize) -> Element<S> {
        self.basis(self.p_plus_1 + l)
    }

    /// `(ab)_k = Σ a_i b_j Γ_ij^k`. Panics on length mismatch; see
    /// [`AlgebraSpec::multiply`] for the checked form.
    pub fn mul(&self, a: &Element<S>, b: &Element<S>) -> Element<S> {
        let dim = self.dim();
        assert!(a.dim() == dim && b.dim() == dim, "element length mismatch");
        let mut out = vec![S::zero(); dim];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let w = ai.clone() * bj.clone();
                for (k, g) in self.products(i, j) {
                    out[*k] = out[*k].clone() + w.clone() * g.clone();
                }
            }
        }
        Element::from_coeffs(out)
    }

    pub fn multiply(&self, a: &Element<S>, b: &Element<S>) -> Result<Element<S>> {
        for e in [a, b] {
            if e.dim() != self.dim() {
                return Err(Error::DimensionMismatch {
                    what: "element",
                    expected: self.dim(),
                    found: e.dim(),
                });
            }
        }
        Ok(self.mul(a, b))
    }

    pub fn square(&self, a: &Element<S>) -> Element<S> {
        self.mul(a, a)
    }

    /// Splits an element into its even and odd parts.
    pub fn split_parity(&self, a: &Element<S>) -> (Element<S>, Element<S>) {
        let mut even = a.clone();
        let mut odd = a.clone();
        for (i, (e, o)) in even.coeffs.iter_mut().zip(odd.coeffs.iter_mut()).enumerate() {
            if self.parity(i) == 0 {
                *o = S::zero();
            } else {
                *e = S::zero();
            }
        }
        (even, odd)
    }

    /// `[a,b} = ab - (-1)^{σ(a)σ(b)} ba`, extended bilinearly over the
    /// homogeneous parts.
    pub fn supercommutator(&self, a: &Element<S>, b: &Element<S>) -> Result<Element<S>> {
        self.multiply(a, b)?;
        let (a0, a1) = self.split_parity(a);
        let (b0, b1) = self.split_parity(b);
        let mut out = self.zero();
        for (x, sx) in [(&a0, 0u8), (&a1, 1)] {
            for (y, sy) in [(&b0, 0u8), (&b1, 1)] {
                let xy = self.mul(x, y);
                let yx = self.mul(y, x);
                out = if sx * sy == 1 { &(&out + &xy) + &yx } else { &(&out + &xy) - &yx };
            }
        }
        Ok(out)
    }

    /// Matrix of `x ↦ a x` in the basis.
    pub(crate) fn left_mul_matrix(&self, a: &Element<S>) -> Matrix<S> {
        let dim = self.dim();
        let mut m = Matrix::zeros(dim, dim);
        for j in 0..dim {
            let col = self.mul(a, &self.basis(j));
            for (k, v) in col.coeffs.into_iter().enumerate() {
                m.set(k, j, v);
            }
        }
        m
    }

    /// Matrix of `x ↦ x a` in the basis.
    pub(crate) fn right_mul_matrix(&self, a: &Element<S>) -> Matrix<S> {
        let dim = self.dim();
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            let col = self.mul(&self.basis(i), a);
            for (k, v) in col.coeffs.into_iter().enumerate() {
                m.set(k, i, v);
            }
        }
        m
    }

    /// The inverse of `a`, if it exists.
    pub fn inverse(&self, a: &Element<S>) -> Option<Element<S>> {
        let m = self.left_mul_matrix(a);
        if linalg::rank(&m) < self.dim() {
            return None;
        }
        linalg::solve(&m, self.one().coeffs()).map(Element::from_coeffs)
    }

    pub fn is_invertible(&self, a: &Element<S>) -> bool {
        linalg::rank(&self.left_mul_matrix(a)) == self.dim()
    }

    /// Basis of `{λ : λ a = 0}`.
    pub fn annihilator_of(&self, a: &Element<S>) -> Vec<Element<S>> {
        linalg::null_space(&self.right_mul_matrix(a))
            .into_iter()
            .map(Element::from_coeffs)
            .collect()
    }

    /// Human-readable form such as `2e₀ - 1/2ε₃`.
    pub fn format_element(&self, a: &Element<S>) -> String {
        let mut out = String::new();
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = self.basis_name(i);
            let neg = c.to_f64() < 0.0;
            let mag = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push_str(&name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn basis_name(&self, i: usize) -> String {
        if i < self.p_plus_1 {
            format!("e{}", subscript(i))
        } else {
            format!("ε{}", subscript(i - self.p_plus_1 + 1))
        }
    }

    pub fn to_f64(&self) -> AlgebraSpec<f64> {
        AlgebraSpec {
            name: self.name.clone(),
            p_plus_1: self.p_plus_1,
            q: self.q,
            table: self
                .table
                .iter()
                .map(|row| row.iter().map(|(k, g)| (*k, g.to_f64())).collect())
                .collect(),
            a1: self.a1.as_ref().map(A1Data::to_f64),
        }
    }
}

impl AlgebraSpec<Rational> {
    /// Exact element from integer coefficients.
    pub fn element(&self, coeffs: &[i64]) -> Element<Rational> {
        assert_eq!(coeffs.len(), self.dim(), "element length mismatch");
        Element::from_coeffs(coeffs.iter().map(|&c| Rational::from_i64(c)).collect())
    }
}

pub(crate) fn subscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

pub(crate) fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complex_unit_squares_to_minus_one() {
        let c = complex();
        let e1 = c.basis(1);
        assert_eq!(c.mul(&e1, &e1), -c.one());
    }

    #[test]
    fn unit_is_neutral() {
        let a = example4();
        let x = a.element(&[1, -2, 3, 0, 5, 1, 2, 0, -1, 4]);
        assert_eq!(a.mul(&a.one(), &x), x);
        assert_eq!(a.mul(&x, &a.one()), x);
    }

    #[test]
    fn example4_table_entry() {
        let a = example4();
        // ε₁·ε₃ = -e₃
        assert_eq!(a.mul(&a.epsilon(0), &a.epsilon(2)), -a.basis(3));
    }

    #[test]
    fn multiply_reports_length_mismatch() {
        let c = complex();
        let bad = Element::zero(3);
        assert!(matches!(
            c.multiply(&c.one(), &bad),
            Err(Error::DimensionMismatch { expected: 2, found: 3, .. })
        ));
    }

    #[test]
    fn supercommutator_vanishes_on_basis_of_example4() {
        let a = example4();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                assert!(a.supercommutator(&a.basis(i), &a.basis(j)).unwrap().is_zero());
            }
        }
        assert!(a.supercommutator(&a.one(), &a.one()).unwrap().is_zero());
    }

    #[test]
    fn supercommutator_detects_symmetric_odd_product() {
        // ε₁ε₂ = ε₂ε₁ = e₂: an odd pair that commutes instead of anticommuting.
        let base = example4();
        let broken = AlgebraSpec::from_products("broken", 6, 4, |i, j| match (i, j) {
            (6, 7) | (7, 6) => vec![(2, Rational::from_i64(1))],
            _ => base.products(i, j).to_vec(),
        })
        .unwrap();
        let br = broken.supercommutator(&broken.epsilon(0), &broken.epsilon(1)).unwrap();
        assert_eq!(br, broken.basis(2).scale(&Rational::from_i64(2)));
    }

    #[test]
    fn inverse_and_zero_divisors() {
        let a = example4();
        let z = a.element(&[2, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        let inv = a.inverse(&z).unwrap();
        assert_eq!(a.mul(&z, &inv), a.one());
        assert!(a.inverse(&a.basis(2)).is_none());
        assert!(!a.annihilator_of(&a.basis(2)).is_empty());
    }

    #[test]
    fn formatting() {
        let a = example4();
        let x = a.element(&[1, 0, -2, 0, 0, 0, 0, 0, 1, 0]);
        assert_eq!(a.format_element(&x), "e₀ - 2e₂ + ε₃");
        assert_eq!(a.format_element(&a.zero()), "0");
    }

    fn small_element(dim: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-5i64..=5, dim)
    }

    proptest! {
        #[test]
        fn multiplication_is_bilinear(a in small_element(10), b in small_element(10), c in small_element(10)) {
            let alg = example4();
            let (a, b, c) = (alg.element(&a), alg.element(&b), alg.element(&c));
            prop_assert_eq!(alg.mul(&(&a + &b), &c), &alg.mul(&a, &c) + &alg.mul(&b, &c));
            prop_assert_eq!(alg.mul(&c, &(&a + &b)), &alg.mul(&c, &a) + &alg.mul(&c, &b));
        }

        #[test]
        fn float_multiplication_is_bilinear(a in proptest::collection::vec(-2.0f64..2.0, 10),
                                            b in proptest::collection::vec(-2.0f64..2.0, 10),
                                            c in proptest::collection::vec(-2.0f64..2.0, 10)) {
            let alg = example4().to_f64();
            let (a, b, c) = (Element::from_coeffs(a), Element::from_coeffs(b), Element::from_coeffs(c));
            let lhs = alg.mul(&(&a + &b), &c);
            let rhs = &alg.mul(&a, &c) + &alg.mul(&b, &c);
            prop_assert!(lhs.distance(&rhs) < 1e-13);
        }
    }
}

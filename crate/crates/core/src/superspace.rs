//! Points of `Λ₀ⁿ × Λ₁ᵐ` and Λ-valued polynomials in their real coordinates.
//!
//! A point `x = (y, θ)` has real coordinates `y_iᵏ` (`k = 0..=p`) and
//! `θ_jˡ` (`l = 1..=q`). Every coordinate vector and every exponent key uses
//! the global order
//!
//! ```text
//! y₁⁰ … y₁ᵖ, …, y_n⁰ … y_nᵖ, θ₁¹ … θ₁^q, …, θ_m¹ … θ_m^q
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{subscript, superscript, AlgebraSpec, Element};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

/// One real coordinate. `var` and `comp` are 0-based; `Theta { comp: 0 }`
/// is `θ¹`. Displayed 1-based in the variable, e.g. `y₁⁰`, `θ₂³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    Y { var: usize, comp: usize },
    Theta { var: usize, comp: usize },
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Coord::Y { var, comp } => write!(f, "y{}{}", subscript(var + 1), superscript(comp)),
            Coord::Theta { var, comp } => write!(f, "θ{}{}", subscript(var + 1), superscript(comp + 1)),
        }
    }
}

/// A super-variable: `y_i` (even) or `θ_j` (odd), 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Y(usize),
    Theta(usize),
}

/// The ambient superspace `ℝ_Λ^{n,m}`.
#[derive(Debug)]
pub struct Superspace<S> {
    algebra: Arc<AlgebraSpec<S>>,
    n: usize,
    m: usize,
}

impl<S: Scalar> Superspace<S> {
    pub fn new(algebra: impl Into<Arc<AlgebraSpec<S>>>, n: usize, m: usize) -> Arc<Self> {
        Arc::new(Superspace {
            algebra: algebra.into(),
            n,
            m,
        })
    }

    pub fn algebra(&self) -> &AlgebraSpec<S> {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> Arc<AlgebraSpec<S>> {
        self.algebra.clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of real coordinates, `n(p+1) + mq`.
    pub fn real_dim(&self) -> usize {
        self.n * self.algebra.p_plus_1() + self.m * self.algebra.q()
    }

    pub fn index(&self, c: Coord) -> Result<usize> {
        let (p1, q) = (self.algebra.p_plus_1(), self.algebra.q());
        match c {
            Coord::Y { var, comp } if var < self.n && comp < p1 => Ok(var * p1 + comp),
            Coord::Theta { var, comp } if var < self.m && comp < q => Ok(self.n * p1 + var * q + comp),
            _ => Err(Error::OutOfRange(format!("coordinate {c:?} in a space with n={}, m={}", self.n, self.m))),
        }
    }

    pub fn coord(&self, index: usize) -> Coord {
        let (p1, q) = (self.algebra.p_plus_1(), self.algebra.q());
        assert!(index < self.real_dim(), "coordinate index {index} out of range");
        if index < self.n * p1 {
            Coord::Y {
                var: index / p1,
                comp: index % p1,
            }
        } else {
            let r = index - self.n * p1;
            Coord::Theta {
                var: r / q,
                comp: r % q,
            }
        }
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.real_dim()).map(|i| self.coord(i))
    }

    /// For a non-leading coordinate, its leading coordinate and the multiplier
    /// `m_c` (`e_k` for `y_iᵏ`, `a_t` for `θ_jᵗ`); `None` for leading ones.
    ///
    /// Fails on θ-coordinates when the algebra carries no (A₁) witness.
    pub fn leading_of(&self, c: Coord) -> Result<Option<(Coord, Element<S>)>> {
        self.index(c)?;
        match c {
            Coord::Y { comp: 0, .. } => Ok(None),
            Coord::Y { var, comp } => Ok(Some((Coord::Y { var, comp: 0 }, self.algebra.basis(comp)))),
            Coord::Theta { var, comp } => {
                let a1 = self.algebra.require_a1()?;
                if a1.is_leading(comp) {
                    Ok(None)
                } else {
                    let lead = Coord::Theta {
                        var,
                        comp: a1.leading(comp),
                    };
                    Ok(Some((lead, a1.multiplier(comp).clone())))
                }
            }
        }
    }

    /// Leading coordinates in global order: `y_i⁰` then `θ_j^{s_k}`.
    pub fn leading_coords(&self) -> Result<Vec<Coord>> {
        let mut out: Vec<Coord> = (0..self.n).map(|var| Coord::Y { var, comp: 0 }).collect();
        if self.m > 0 {
            let a1 = self.algebra.require_a1()?;
            for var in 0..self.m {
                out.extend(a1.blocks().iter().map(|b| Coord::Theta { var, comp: b.start }));
            }
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Arc<Superspace<f64>> {
        Superspace::new(self.algebra.to_f64(), self.n, self.m)
    }

    fn same_shape<T: Scalar>(&self, other: &Superspace<T>) -> bool {
        self.n == other.n
            && self.m == other.m
            && self.algebra.p_plus_1() == other.algebra.p_plus_1()
            && self.algebra.q() == other.algebra.q()
    }
}

/// A point `x = (y, θ)` stored as its real coordinates in global order.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperPoint<S> {
    coords: Vec<S>,
}

impl<S: Scalar> SuperPoint<S> {
    pub fn zero(space: &Superspace<S>) -> Self {
        SuperPoint {
            coords: vec![S::zero(); space.real_dim()],
        }
    }

    pub fn from_coords(space: &Superspace<S>, coords: Vec<S>) -> Result<Self> {
        if coords.len() != space.real_dim() {
            return Err(Error::DimensionMismatch {
                what: "point coordinates",
                expected: space.real_dim(),
                found: coords.len(),
            });
        }
        Ok(SuperPoint { coords })
    }

    /// Builds a point from `n` blocks of `p+1` reals and `m` blocks of `q` reals.
    pub fn from_blocks(space: &Superspace<S>, y: &[Vec<S>], theta: &[Vec<S>]) -> Result<Self> {
        let alg = space.algebra();
        let mismatch = |what, expected, found| Error::DimensionMismatch { what, expected, found };
        if y.len() != space.n() {
            return Err(mismatch("even variables", space.n(), y.len()));
        }
        if theta.len() != space.m() {
            return Err(mismatch("odd variables", space.m(), theta.len()));
        }
        let mut coords = Vec::with_capacity(space.real_dim());
        for b in y {
            if b.len() != alg.p_plus_1() {
                return Err(mismatch("even block", alg.p_plus_1(), b.len()));
            }
            coords.extend(b.iter().cloned());
        }
        for b in theta {
            if b.len() != alg.q() {
                return Err(mismatch("odd block", alg.q(), b.len()));
            }
            coords.extend(b.iter().cloned());
        }
        Ok(SuperPoint { coords })
    }

    /// The point whose super-variables are the given algebra elements; the
    /// odd (resp. even) components of even (resp. odd) entries must vanish.
    pub fn from_elements(space: &Superspace<S>, y: &[Element<S>], theta: &[Element<S>]) -> Result<Self> {
        let p1 = space.algebra().p_plus_1();
        let check = |e: &Element<S>, range: std::ops::Range<usize>, what: &str| -> Result<Vec<S>> {
            if e.dim() != space.algebra().dim() {
                return Err(Error::DimensionMismatch {
                    what: "element",
                    expected: space.algebra().dim(),
                    found: e.dim(),
                });
            }
            let outside = e
                .coeffs()
                .iter()
                .enumerate()
                .any(|(i, c)| !range.contains(&i) && !c.is_zero());
            if outside {
                return Err(Error::Precondition(format!("{what} variable must be homogeneous")));
            }
            Ok(e.coeffs()[range].to_vec())
        };
        let dim = space.algebra().dim();
        let y = y.iter().map(|e| check(e, 0..p1, "even")).collect::<Result<Vec<_>>>()?;
        let theta = theta.iter().map(|e| check(e, p1..dim, "odd")).collect::<Result<Vec<_>>>()?;
        Self::from_blocks(space, &y, &theta)
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    /// The super-variable `y_i` or `θ_j` as an algebra element.
    pub fn variable(&self, space: &Superspace<S>, v: Var) -> Result<Element<S>> {
        let alg = space.algebra();
        let mut e = alg.zero().into_coeffs();
        match v {
            Var::Y(i) => {
                let start = space.index(Coord::Y { var: i, comp: 0 })?;
                e[..alg.p_plus_1()].clone_from_slice(&self.coords[start..start + alg.p_plus_1()]);
            }
            Var::Theta(j) => {
                let start = space.index(Coord::Theta { var: j, comp: 0 })?;
                e[alg.p_plus_1()..].clone_from_slice(&self.coords[start..start + alg.q()]);
            }
        }
        Ok(Element::from_coeffs(e))
    }

    pub fn to_f64(&self) -> SuperPoint<f64> {
        SuperPoint {
            coords: self.coords.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// Exponent vector over the real coordinates.
pub type Exponent = Vec<u32>;

/// A Λ-valued polynomial in the real coordinates of a superspace.
#[derive(Clone, Debug)]
pub struct PolyFunction<S> {
    space: Arc<Superspace<S>>,
    terms: BTreeMap<Exponent, Element<S>>,
}

impl<S: Scalar> PartialEq for PolyFunction<S> {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_shape(&other.space) && self.terms == other.terms
    }
}

impl<S: Scalar> PolyFunction<S> {
    pub fn zero(space: &Arc<Superspace<S>>) -> Self {
        PolyFunction {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &Arc<Superspace<S>>, c: Element<S>) -> Self {
        let mut f = Self::zero(space);
        f.add_term(vec![0; space.real_dim()], c);
        f
    }

    /// `c · Π x_iᵉⁱ`.
    pub fn monomial(space: &Arc<Superspace<S>>, exp: Exponent, c: Element<S>) -> Result<Self> {
        if exp.len() != space.real_dim() {
            return Err(Error::DimensionMismatch {
                what: "exponent",
                expected: space.real_dim(),
                found: exp.len(),
            });
        }
        if c.dim() != space.algebra().dim() {
            return Err(Error::DimensionMismatch {
                what: "coefficient",
                expected: space.algebra().dim(),
                found: c.dim(),
            });
        }
        let mut f = Self::zero(space);
        f.add_term(exp, c);
        Ok(f)
    }

    /// The real coordinate `c` times `e₀`.
    pub fn real_coordinate(space: &Arc<Superspace<S>>, c: Coord) -> Result<Self> {
        let mut exp = vec![0; space.real_dim()];
        exp[space.index(c)?] = 1;
        Self::monomial(space, exp, space.algebra().one())
    }

    /// The degree-one embedding `y_i = Σ y_iᵏ e_k` or `θ_j = Σ θ_jˡ ε_l`.
    pub fn coordinate_poly(space: &Arc<Superspace<S>>, v: Var) -> Result<Self> {
        let alg = space.algebra();
        let mut f = Self::zero(space);
        match v {
            Var::Y(var) => {
                for comp in 0..alg.p_plus_1() {
                    let mut exp = vec![0; space.real_dim()];
                    exp[space.index(Coord::Y { var, comp })?] = 1;
                    f.add_term(exp, alg.basis(comp));
                }
            }
            Var::Theta(var) => {
                for comp in 0..alg.q() {
                    let mut exp = vec![0; space.real_dim()];
                    exp[space.index(Coord::Theta { var, comp })?] = 1;
                    f.add_term(exp, alg.epsilon(comp));
                }
                if alg.q() == 0 {
                    space.index(Coord::Theta { var, comp: 0 })?;
                }
            }
        }
        Ok(f)
    }

    /// `Z(π_k(θ_j)) = Σ_{i ∈ block k} a_i θ_jⁱ`, with `j` and `k` 0-based.
    pub fn z_projection(space: &Arc<Superspace<S>>, j: usize, k: usize) -> Result<Self> {
        let a1 = space.algebra().require_a1()?;
        let block = a1
            .blocks()
            .get(k)
            .ok_or_else(|| Error::OutOfRange(format!("block {} of {}", k + 1, a1.block_count())))?
            .clone();
        let mut f = Self::zero(space);
        for i in block {
            let mut exp = vec![0; space.real_dim()];
            exp[space.index(Coord::Theta { var: j, comp: i })?] = 1;
            f.add_term(exp, a1.multiplier(i).clone());
        }
        Ok(f)
    }

    fn add_term(&mut self, exp: Exponent, c: Element<S>) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn space(&self) -> &Arc<Superspace<S>> {
        &self.space
    }

    pub fn algebra(&self) -> &AlgebraSpec<S> {
        self.space.algebra()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Element<S>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `0` for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Coefficient of a monomial, zero when absent.
    pub fn coefficient(&self, exp: &[u32]) -> Element<S> {
        self.terms.get(exp).cloned().unwrap_or_else(|| self.algebra().zero())
    }

    /// Whether the polynomial only involves the coordinates accepted by `keep`.
    pub fn depends_only_on(&self, keep: impl Fn(Coord) -> bool) -> bool {
        self.terms.keys().all(|e| {
            e.iter()
                .enumerate()
                .all(|(i, &d)| d == 0 || keep(self.space.coord(i)))
        })
    }

    pub fn eval(&self, x: &SuperPoint<S>) -> Result<Element<S>> {
        if x.coords.len() != self.space.real_dim() {
            return Err(Error::DimensionMismatch {
                what: "point coordinates",
                expected: self.space.real_dim(),
                found: x.coords.len(),
            });
        }
        let mut out = self.algebra().zero();
        for (exp, c) in &self.terms {
            let mut w = S::one();
            for (xi, &d) in x.coords.iter().zip(exp) {
                for _ in 0..d {
                    w = w * xi.clone();
                }
            }
            out.add_scaled(&w, c);
        }
        Ok(out)
    }

    pub fn partial(&self, c: Coord) -> Result<Self> {
        let idx = self.space.index(c)?;
        Ok(self.partial_index(idx))
    }

    pub(crate) fn partial_index(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (exp, c) in &self.terms {
            let d = exp[idx];
            if d == 0 {
                continue;
            }
            let mut e = exp.clone();
            e[idx] -= 1;
            out.add_term(e, c.scale(&S::from_i64(d as i64)));
        }
        out
    }

    /// Left multiplication of every coefficient by `a`.
    pub fn mul_element_left(&self, a: &Element<S>) -> Self {
        let alg = self.algebra();
        let mut out = Self::zero(&self.space);
        for (exp, c) in &self.terms {
            out.add_term(exp.clone(), alg.mul(a, c));
        }
        out
    }

    /// Right multiplication of every coefficient by `a`.
    pub fn mul_element_right(&self, a: &Element<S>) -> Self {
        let alg = self.algebra();
        let mut out = Self::zero(&self.space);
        for (exp, c) in &self.terms {
            out.add_term(exp.clone(), alg.mul(c, a));
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(&self.space);
        for (exp, c) in &self.terms {
            out.add_term(exp.clone(), c.scale(s));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(&self.space, self.algebra().one());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `x ↦ f(x + shift)`, expanded exactly.
    pub fn translate(&self, shift: &SuperPoint<S>) -> Result<Self> {
        let dim = self.space.real_dim();
        if shift.coords.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "shift",
                expected: dim,
                found: shift.coords.len(),
            });
        }
        let one = self.algebra().one();
        let shifted: Vec<Self> = (0..dim)
            .map(|i| {
                let mut exp = vec![0; dim];
                exp[i] = 1;
                let mut lin = Self::zero(&self.space);
                lin.add_term(exp, one.clone());
                lin.add_term(vec![0; dim], one.scale(&shift.coords[i]));
                lin
            })
            .collect();
        let mut out = Self::zero(&self.space);
        for (exp, c) in &self.terms {
            let mut term = Self::constant(&self.space, c.clone());
            for (i, &d) in exp.iter().enumerate() {
                if d > 0 {
                    term = &term * &shifted[i].pow(d);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> PolyFunction<f64> {
        let space = self.space.to_f64();
        let mut out = PolyFunction::zero(&space);
        for (exp, c) in &self.terms {
            out.add_term(exp.clone(), c.to_f64());
        }
        out
    }

    /// Evaluator specialised for repeated floating-point evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            dim: self.algebra().dim(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let powers = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &d)| d > 0)
                        .map(|(i, &d)| (i, d as i32))
                        .collect();
                    (powers, c.coeffs().iter().map(Scalar::to_f64).collect())
                })
                .collect(),
        }
    }

    /// The exchange form: a list of `{"exp": [..], "coeff": [..]}`.
    pub fn to_json(&self) -> String {
        let terms: Vec<PolyTermDoc> = self
            .terms
            .iter()
            .map(|(e, c)| PolyTermDoc {
                exp: e.clone(),
                coeff: c.coeffs().iter().map(scalar_value).collect(),
            })
            .collect();
        serde_json::to_string(&terms).expect("polynomial serializes")
    }

    pub fn from_json(space: &Arc<Superspace<S>>, text: &str) -> Result<Self> {
        let terms: Vec<PolyTermDoc> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("polynomial: {e}")))?;
        let mut f = Self::zero(space);
        for (t, term) in terms.into_iter().enumerate() {
            if term.exp.len() != space.real_dim() {
                return Err(Error::Schema {
                    location: format!("[{t}].exp"),
                    message: format!("expected {} exponents, found {}", space.real_dim(), term.exp.len()),
                });
            }
            if term.coeff.len() != space.algebra().dim() {
                return Err(Error::Schema {
                    location: format!("[{t}].coeff"),
                    message: format!("expected {} coefficients, found {}", space.algebra().dim(), term.coeff.len()),
                });
            }
            let coeffs = term
                .coeff
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    value_to_rational(v)
                        .map(|r| S::from_rational(&r))
                        .map_err(|message| Error::Schema {
                            location: format!("[{t}].coeff[{k}]"),
                            message,
                        })
                })
                .collect::<Result<Vec<S>>>()?;
            f.add_term(term.exp, Element::from_coeffs(coeffs));
        }
        Ok(f)
    }

    /// Human-readable form, e.g. `e₀·(y₁⁰)² + e₁·y₁⁰y₁¹`.
    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(exp, c)| {
                let mono: String = exp
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d > 0)
                    .map(|(i, &d)| {
                        let name = self.space.coord(i).to_string();
                        if d == 1 {
                            name
                        } else {
                            format!("({name}){}", superscript(d as usize))
                        }
                    })
                    .collect();
                let coeff = self.algebra().format_element(c);
                let coeff = if c.coeffs().iter().filter(|v| !v.is_zero()).count() > 1 {
                    format!("({coeff})")
                } else {
                    coeff
                };
                if mono.is_empty() {
                    coeff
                } else {
                    format!("{coeff}·{mono}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermDoc {
    exp: Vec<u32>,
    coeff: Vec<Value>,
}

pub(crate) fn scalar_value<S: Scalar>(s: &S) -> Value {
    if S::EXACT {
        let text = s.to_string();
        match text.parse::<i64>() {
            Ok(v) => Value::from(v),
            Err(_) => Value::from(text),
        }
    } else {
        Value::from(s.to_f64())
    }
}

/// Reads a JSON number or `"num/den"` string. Decimal literals such as `0.3`
/// are read as the exact decimal fraction.
pub(crate) fn value_to_rational(v: &Value) -> std::result::Result<Rational, String> {
    match v {
        Value::Number(n) => parse_decimal(&n.to_string()).ok_or_else(|| format!("bad number {n}")),
        Value::String(s) => parse_rational(s)
            .or_else(|_| parse_decimal(s).ok_or(()))
            .map_err(|_| format!("expected a rational, found {s:?}")),
        other => Err(format!("expected a number, found {other}")),
    }
}

fn parse_decimal(text: &str) -> Option<Rational> {
    use num_bigint::BigInt;
    let text = text.trim();
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        Rational::from_integer(digits * ten.pow(shift as u32))
    } else {
        Rational::new(digits, ten.pow((-shift) as u32))
    })
}

impl<S: Scalar> fmt::Display for PolyFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

fn assert_same_space<S: Scalar>(a: &PolyFunction<S>, b: &PolyFunction<S>) {
    assert!(
        a.space.same_shape(&b.space),
        "polynomials live on different superspaces"
    );
}

impl<S: Scalar> Add for &PolyFunction<S> {
    type Output = PolyFunction<S>;
    fn add(self, rhs: &PolyFunction<S>) -> PolyFunction<S> {
        assert_same_space(self, rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &PolyFunction<S> {
    type Output = PolyFunction<S>;
    fn sub(self, rhs: &PolyFunction<S>) -> PolyFunction<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Neg for &PolyFunction<S> {
    type Output = PolyFunction<S>;
    fn neg(self) -> PolyFunction<S> {
        self.scale(&-S::one())
    }
}

impl<S: Scalar> Mul for &PolyFunction<S> {
    type Output = PolyFunction<S>;
    /// Product of polynomials; coefficients multiply in the algebra, left
    /// operand first.
    fn mul(self, rhs: &PolyFunction<S>) -> PolyFunction<S> {
        assert_same_space(self, rhs);
        let alg = self.algebra();
        let mut out = PolyFunction::zero(&self.space);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, alg.mul(ca, cb));
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<S: Scalar> $tr for PolyFunction<S> {
            type Output = PolyFunction<S>;
            fn $m(self, rhs: PolyFunction<S>) -> PolyFunction<S> {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

/// Floating-point evaluator produced by [`PolyFunction::compile`].
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    dim: usize,
    terms: Vec<(Vec<(usize, i32)>, Vec<f64>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> Element<f64> {
        let mut out = vec![0.0; self.dim];
        for (powers, c) in &self.terms {
            let w: f64 = powers.iter().map(|&(i, d)| x[i].powi(d)).product();
            for (o, ci) in out.iter_mut().zip(c) {
                *o += w * ci;
            }
        }
        Element::from_coeffs(out)
    }
}

/// Exact rational rendering of a coefficient vector.
pub fn format_rationals(e: &Element<Rational>) -> Vec<String> {
    e.coeffs().iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, example4};
    use proptest::prelude::*;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn qr(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn c1() -> Arc<Superspace<Rational>> {
        Superspace::new(complex(), 1, 0)
    }

    #[test]
    fn coordinate_order_and_names() {
        let s = Superspace::new(example4(), 2, 2);
        assert_eq!(s.real_dim(), 2 * 6 + 2 * 4);
        assert_eq!(s.index(Coord::Y { var: 1, comp: 0 }).unwrap(), 6);
        assert_eq!(s.index(Coord::Theta { var: 1, comp: 2 }).unwrap(), 12 + 4 + 2);
        for i in 0..s.real_dim() {
            assert_eq!(s.index(s.coord(i)).unwrap(), i);
        }
        assert_eq!(s.coord(0).to_string(), "y₁⁰");
        assert_eq!(s.coord(13).to_string(), "θ₁²");
        assert!(s.index(Coord::Y { var: 2, comp: 0 }).is_err());
    }

    #[test]
    fn evaluation_of_embedding_and_square() {
        let s = c1();
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        let x = SuperPoint::from_coords(&s, vec![qr(3, 10), qr(1, 10)]).unwrap();
        let alg = s.algebra();
        assert_eq!(y.eval(&x).unwrap(), Element::from_coeffs(vec![qr(3, 10), qr(1, 10)]));
        let y2 = &y * &y;
        assert_eq!(y2.eval(&x).unwrap(), Element::from_coeffs(vec![qr(8, 100), qr(6, 100)]));
        let one = PolyFunction::constant(&s, alg.one());
        assert_eq!(one.eval(&x).unwrap(), alg.one());
        let empty = SuperPoint::zero(&Superspace::new(complex(), 0, 0));
        assert!(y.eval(&empty).is_err());
    }

    #[test]
    fn partials() {
        let s = c1();
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        let y2 = &y * &y;
        let d0 = y2.partial(Coord::Y { var: 0, comp: 0 }).unwrap();
        assert_eq!(d0, y.scale(&q(2)));
        assert!(y2.partial(Coord::Theta { var: 0, comp: 0 }).is_err());

        let s4 = Superspace::new(example4(), 0, 1);
        let z = PolyFunction::z_projection(&s4, 0, 0).unwrap();
        let c = PolyFunction::constant(&s4, s4.algebra().basis(3));
        assert!(c.partial(Coord::Theta { var: 0, comp: 0 }).unwrap().is_zero());
        let dz = z.partial(Coord::Theta { var: 0, comp: 0 }).unwrap();
        assert_eq!(dz, PolyFunction::constant(&s4, s4.algebra().one()));
    }

    #[test]
    fn z_projection_blocks() {
        let s = Superspace::new(example4(), 0, 1);
        let alg = s.algebra();
        let z1 = PolyFunction::z_projection(&s, 0, 0).unwrap();
        assert_eq!(z1.coefficient(&[1, 0, 0, 0]), alg.one());
        assert_eq!(z1.coefficient(&[0, 1, 0, 0]), alg.basis(1));
        let z2 = PolyFunction::z_projection(&s, 0, 1).unwrap();
        assert_eq!(z2.coefficient(&[0, 0, 1, 0]), alg.one());
        assert_eq!(z2.coefficient(&[0, 0, 0, 1]), alg.basis(1));
        assert!(z1.eval(&SuperPoint::zero(&s)).unwrap().is_zero());
        assert!(PolyFunction::z_projection(&s, 0, 2).is_err());
    }

    #[test]
    fn theta_embedding() {
        let s = Superspace::new(example4(), 0, 1);
        let t = PolyFunction::coordinate_poly(&s, Var::Theta(0)).unwrap();
        assert_eq!(t.terms().len(), 4);
        assert_eq!(t.coefficient(&[0, 0, 1, 0]), s.algebra().epsilon(2));
    }

    #[test]
    fn translate_matches_shifted_evaluation() {
        let s = c1();
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        let f = &y.pow(3) + &y.mul_element_left(&s.algebra().basis(1));
        let b = SuperPoint::from_coords(&s, vec![qr(1, 2), q(-2)]).unwrap();
        let g = f.translate(&b).unwrap();
        let x = SuperPoint::from_coords(&s, vec![qr(1, 3), qr(5, 7)]).unwrap();
        let xb = SuperPoint::from_coords(&s, vec![qr(1, 3) + qr(1, 2), qr(5, 7) - q(2)]).unwrap();
        assert_eq!(g.eval(&x).unwrap(), f.eval(&xb).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let s = Superspace::new(example4(), 1, 1);
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        let z = PolyFunction::z_projection(&s, 0, 0).unwrap();
        let f = (&y * &z).scale(&qr(-3, 4));
        let back = PolyFunction::from_json(&s, &f.to_json()).unwrap();
        assert_eq!(back, f);
        let decimal = PolyFunction::from_json(&c1(), r#"[{"exp":[1,0],"coeff":[0.3,"1/7"]}]"#).unwrap();
        assert_eq!(decimal.coefficient(&[1, 0]), Element::from_coeffs(vec![qr(3, 10), qr(1, 7)]));
        let err = PolyFunction::from_json(&c1(), r#"[{"exp":[1],"coeff":[0,1]}]"#).unwrap_err();
        assert!(err.to_string().contains("[0].exp"));
    }

    #[test]
    fn compiled_matches_exact() {
        let s = Superspace::new(example4(), 1, 1);
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        let t = PolyFunction::coordinate_poly(&s, Var::Theta(0)).unwrap();
        let f = &(&y * &t) + &y.pow(2);
        let pt: Vec<Rational> = (0..10).map(|i| qr(i - 4, 5)).collect();
        let x = SuperPoint::from_coords(&s, pt).unwrap();
        let exact = f.eval(&x).unwrap().to_f64();
        let fast = f.compile().eval(&x.to_f64().coords);
        assert!(exact.distance(&fast) < 1e-14);
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qr(n, d))
    }

    fn random_poly(s: &Arc<Superspace<Rational>>, seeds: &[(Vec<u32>, Vec<Rational>)]) -> PolyFunction<Rational> {
        let mut f = PolyFunction::zero(s);
        for (e, c) in seeds {
            let t = PolyFunction::monomial(s, e.clone(), Element::from_coeffs(c.clone())).unwrap();
            f = &f + &t;
        }
        f
    }

    fn poly_seeds(dim: usize, alg_dim: usize) -> impl Strategy<Value = Vec<(Vec<u32>, Vec<Rational>)>> {
        prop::collection::vec(
            (prop::collection::vec(0u32..=2, dim), prop::collection::vec(small(), alg_dim)),
            0..4,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws_commute_with_eval(
            a in poly_seeds(2, 2),
            b in poly_seeds(2, 2),
            x in prop::collection::vec(small(), 2),
        ) {
            let s = c1();
            let (f, g) = (random_poly(&s, &a), random_poly(&s, &b));
            let x = SuperPoint::from_coords(&s, x).unwrap();
            let alg = s.algebra();
            let (fx, gx) = (f.eval(&x).unwrap(), g.eval(&x).unwrap());
            prop_assert_eq!((&f + &g).eval(&x).unwrap(), &fx + &gx);
            prop_assert_eq!((&f * &g).eval(&x).unwrap(), alg.mul(&fx, &gx));
        }

        #[test]
        fn partial_matches_central_difference(
            a in poly_seeds(10, 10),
            x in prop::collection::vec(-1.0f64..1.0, 10),
            c in 0usize..10,
        ) {
            let s = Superspace::new(example4(), 1, 1);
            let f = random_poly(&s, &a);
            let fast = f.compile();
            let df = f.partial_index(c).compile();
            let h = 1e-4;
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[c] += h;
            xm[c] -= h;
            let fd = (&fast.eval(&xp) - &fast.eval(&xm)).scale(&(0.5 / h));
            let exact = df.eval(&x);
            let scale = exact.norm().max(1.0);
            prop_assert!(fd.distance(&exact) <= 1e-6 * scale, "fd {fd:?} exact {exact:?}");
        }
    }
}

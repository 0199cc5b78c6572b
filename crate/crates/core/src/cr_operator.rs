//! The operators `d′` and `d″` on superspace functions.
//!
//! Every real coordinate `c` is either *leading* (`y_i⁰`, or `θ_j^{s_k}` for
//! a block start) or carries a leading coordinate `ℓ(c)` and a multiplier
//! `m_c` (`e_k` for `y_iᵏ`, `a_t` for `θ_jᵗ`). Then
//!
//! ```text
//! d″f = Σ_{c non-leading} (∂f/∂c − m_c ∂f/∂ℓ(c)) dc
//! d′f = Σ_{ℓ leading} ∂f/∂ℓ (dℓ + Σ_{c ↦ ℓ} m_c dc)
//! ```
//!
//! so that `d′f + d″f = df`. A function is qS when `d″f = 0`.

use std::collections::BTreeMap;

use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::superspace::{Coord, PolyFunction, SuperPoint, Superspace};

/// The coefficients of `d″f` on the non-leading differentials.
#[derive(Clone, Debug)]
pub struct D2Result<S> {
    components: BTreeMap<Coord, PolyFunction<S>>,
}

impl<S: Scalar> PartialEq for D2Result<S> {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

impl<S: Scalar> D2Result<S> {
    pub fn components(&self) -> &BTreeMap<Coord, PolyFunction<S>> {
        &self.components
    }

    pub fn component(&self, c: Coord) -> Option<&PolyFunction<S>> {
        self.components.get(&c)
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(PolyFunction::is_zero)
    }

    /// First coordinate (in global order) whose component does not vanish.
    pub fn first_nonzero(&self) -> Option<Coord> {
        self.components
            .iter()
            .find(|(_, f)| !f.is_zero())
            .map(|(c, _)| *c)
    }

    pub fn eval(&self, x: &SuperPoint<S>) -> Result<BTreeMap<Coord, Element<S>>> {
        self.components
            .iter()
            .map(|(c, f)| Ok((*c, f.eval(x)?)))
            .collect()
    }
}

/// A first-order operator `Σ_r dc_r ∧ (Σ_s μ_{rs} ∂/∂x_s)`, with the
/// multipliers `μ` acting on the left.
#[derive(Clone, Debug)]
pub struct FirstOrderOperator<S> {
    rows: Vec<(Coord, Vec<(Coord, Element<S>)>)>,
}

/// A one-form `Σ g_c dc`.
pub type OneForm<S> = BTreeMap<Coord, PolyFunction<S>>;

/// A two-form `Σ_{a<b} h_{ab} da ∧ db`, keys ordered as in the global order.
pub type TwoForm<S> = BTreeMap<(Coord, Coord), PolyFunction<S>>;

impl<S: Scalar> FirstOrderOperator<S> {
    /// `d″` on the given superspace.
    pub fn d2(space: &Superspace<S>) -> Result<Self> {
        let one = space.algebra().one();
        let mut rows = Vec::new();
        for c in space.coords() {
            if let Some((lead, m)) = space.leading_of(c)? {
                rows.push((c, vec![(c, one.clone()), (lead, -m)]));
            }
        }
        Ok(FirstOrderOperator { rows })
    }

    /// `d′` on the given superspace.
    pub fn d_prime(space: &Superspace<S>) -> Result<Self> {
        let one = space.algebra().one();
        let mut rows = Vec::new();
        for c in space.coords() {
            let (lead, m) = space.leading_of(c)?.unwrap_or((c, one.clone()));
            rows.push((c, vec![(lead, m)]));
        }
        Ok(FirstOrderOperator { rows })
    }

    pub fn apply(&self, f: &PolyFunction<S>) -> Result<OneForm<S>> {
        let mut out = BTreeMap::new();
        for (c, terms) in &self.rows {
            let mut g = PolyFunction::zero(f.space());
            for (d, mu) in terms {
                let part = f.partial(*d)?;
                g = &g + &part.mul_element_left(mu);
            }
            out.insert(*c, g);
        }
        Ok(out)
    }

    /// Extends the operator to one-forms: `P(Σ g_c dc) = Σ_r Σ_c dc_r ∧ dc · D_r g_c`.
    pub fn apply_one_form(&self, g: &OneForm<S>) -> Result<TwoForm<S>> {
        let mut out: TwoForm<S> = BTreeMap::new();
        for (r, terms) in &self.rows {
            for (c, gc) in g {
                if r == c {
                    continue;
                }
                let mut dg = PolyFunction::zero(gc.space());
                for (d, mu) in terms {
                    dg = &dg + &gc.partial(*d)?.mul_element_left(mu);
                }
                let (key, term) = if r < c { ((*r, *c), dg) } else { ((*c, *r), -&dg) };
                let slot = out.entry(key).or_insert_with(|| PolyFunction::zero(gc.space()));
                *slot = &*slot + &term;
            }
        }
        out.retain(|_, h| !h.is_zero());
        Ok(out)
    }
}

/// `d″f` componentwise: `∂f/∂y_iᵏ − e_k·∂f/∂y_i⁰` and
/// `∂f/∂θ_jᵗ − (∂f/∂θ_j^{s_k})·a_t`.
pub fn d2<S: Scalar>(f: &PolyFunction<S>) -> Result<D2Result<S>> {
    let space = f.space();
    let mut components = BTreeMap::new();
    for c in space.coords() {
        let Some((lead, m)) = space.leading_of(c)? else { continue };
        let lead_partial = f.partial(lead)?;
        let correction = match c {
            Coord::Y { .. } => lead_partial.mul_element_left(&m),
            Coord::Theta { .. } => lead_partial.mul_element_right(&m),
        };
        components.insert(c, &f.partial(c)? - &correction);
    }
    Ok(D2Result { components })
}

/// `d′f` componentwise over every coordinate: `m_c · ∂f/∂ℓ(c)`, with
/// `m_ℓ = e₀` on leading coordinates.
pub fn d_prime<S: Scalar>(f: &PolyFunction<S>) -> Result<OneForm<S>> {
    FirstOrderOperator::d_prime(f.space())?.apply(f)
}

/// Whether `d″f` vanishes identically.
pub fn is_qs<S: Scalar>(f: &PolyFunction<S>) -> Result<bool> {
    Ok(d2(f)?.is_zero())
}

/// Outcome of the pointwise S-differentiability test.
#[derive(Clone, Debug, PartialEq)]
pub struct SReport<S> {
    pub holds: bool,
    /// Whether `d″f(x) = 0`.
    pub d2_vanishes: bool,
    /// Per odd variable `θ_j`: the minimum-norm `a` with
    /// `∂f/∂θ_jˡ(x) = a ε_l` for every `l`, if one exists.
    pub multipliers: Vec<Option<Element<S>>>,
}

/// Tests S-differentiability at `x`: `d″f(x) = 0`, and for each `θ_j` the
/// derivative row `(∂f/∂θ_j¹, …, ∂f/∂θ_j^q)(x)` has the form `(aε_1, …, aε_q)`.
///
/// `a` is only defined modulo the Λ₁-annihilator, which is exactly the null
/// space of the stacked system; the representative orthogonal to it (the
/// minimum-norm one) is returned.
pub fn is_s_at<S: Scalar>(f: &PolyFunction<S>, x: &SuperPoint<S>) -> Result<SReport<S>> {
    let space = f.space();
    let alg = f.algebra();
    let d2_at = d2(f)?.eval(x)?;
    let scale = f
        .terms()
        .values()
        .map(|c| c.norm())
        .fold(1.0, f64::max);
    let d2_vanishes = d2_at.values().all(|e| e.is_negligible(scale));

    let dim = alg.dim();
    let q = alg.q();
    let mut system = Matrix::zeros(q * dim, dim);
    for l in 0..q {
        let block = alg.right_mul_matrix(&alg.epsilon(l));
        for r in 0..dim {
            for c in 0..dim {
                system.set(l * dim + r, c, block.get(r, c).clone());
            }
        }
    }
    let mut multipliers = Vec::with_capacity(space.m());
    for var in 0..space.m() {
        let mut rhs = Vec::with_capacity(q * dim);
        for comp in 0..q {
            let v = f.partial(Coord::Theta { var, comp })?.eval(x)?;
            rhs.extend(v.into_coeffs());
        }
        multipliers.push(linalg::min_norm_solve(&system, &rhs).map(Element::from_coeffs));
    }
    let holds = d2_vanishes && multipliers.iter().all(Option::is_some);
    Ok(SReport {
        holds,
        d2_vanishes,
        multipliers,
    })
}

/// `Σ_c ∂²f/∂c²` over every real coordinate.
pub fn laplacian<S: Scalar>(f: &PolyFunction<S>) -> PolyFunction<S> {
    let mut out = PolyFunction::zero(f.space());
    for i in 0..f.space().real_dim() {
        out = &out + &f.partial_index(i).partial_index(i);
    }
    out
}

/// Residuals of the second-order identities satisfied by qS functions.
#[derive(Clone, Debug)]
pub struct SecondOrderReport<S> {
    /// `∂²f/∂c² − m_c² ∂²f/∂ℓ(c)²` per non-leading coordinate `c`.
    pub residuals: BTreeMap<Coord, PolyFunction<S>>,
    pub holds: bool,
}

/// Checks `∂²f/∂(y_jᵏ)² = e_k² ∂²f/∂(y_j⁰)²` and
/// `∂²f/∂(θ_jᵗ)² = a_t² ∂²f/∂(θ_j^{s_k})²` for a qS polynomial.
pub fn second_order_identity_check<S: Scalar>(f: &PolyFunction<S>) -> Result<SecondOrderReport<S>> {
    if !is_qs(f)? {
        return Err(Error::Precondition("second-order identities need a qS function".into()));
    }
    let space = f.space();
    let alg = f.algebra();
    let mut residuals = BTreeMap::new();
    for c in space.coords() {
        let Some((lead, m)) = space.leading_of(c)? else { continue };
        let direct = f.partial(c)?.partial(c)?;
        let via_lead = f.partial(lead)?.partial(lead)?.mul_element_left(&alg.square(&m));
        residuals.insert(c, &direct - &via_lead);
    }
    let holds = residuals.values().all(PolyFunction::is_zero);
    Ok(SecondOrderReport { residuals, holds })
}

/// Default finite-difference step: `1e-5` relative to `max(‖x‖, 1)`.
pub fn default_step(x: &[f64]) -> f64 {
    1e-5 * x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0)
}

/// Centered difference of a black-box function along coordinate `index`.
pub fn sampled_partial<F>(func: &F, x: &[f64], index: usize, h: f64) -> Result<Element<f64>>
where
    F: Fn(&[f64]) -> Result<Element<f64>> + ?Sized,
{
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[index] += h;
    xm[index] -= h;
    let (fp, fm) = (func(&xp)?, func(&xm)?);
    Ok((&fp - &fm).scale(&(0.5 / h)))
}

/// `d″` of a black-box function at `x` by centered differences of step `h`.
pub fn sampled_d2<F>(space: &Superspace<f64>, func: &F, x: &[f64], h: f64) -> Result<BTreeMap<Coord, Element<f64>>>
where
    F: Fn(&[f64]) -> Result<Element<f64>> + ?Sized,
{
    if x.len() != space.real_dim() {
        return Err(Error::DimensionMismatch {
            what: "point coordinates",
            expected: space.real_dim(),
            found: x.len(),
        });
    }
    let alg = space.algebra();
    let mut out = BTreeMap::new();
    for c in space.coords() {
        let Some((lead, m)) = space.leading_of(c)? else { continue };
        let dc = sampled_partial(func, x, space.index(c)?, h)?;
        let dl = sampled_partial(func, x, space.index(lead)?, h)?;
        let correction = match c {
            Coord::Y { .. } => alg.mul(&m, &dl),
            Coord::Theta { .. } => alg.mul(&dl, &m),
        };
        out.insert(c, &dc - &correction);
    }
    Ok(out)
}

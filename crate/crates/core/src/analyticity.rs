//! Canonical forms of qS polynomials, series expansion, Cauchy-type
//! inequalities and a Liouville probe.
//!
//! Every qS polynomial is a polynomial in the super-variables `y_i` and the
//! projections `Z_k(θ_j) = Z(π_k θ_j)`. Its coefficients are read off the
//! monomials built from leading coordinates only (`y_i⁰` and `θ_j^{s_k}`),
//! and the rewriting is confirmed by expanding it back.
//!
//! Multi-indices ("keys") list exponents in the order
//! `[I_1, …, I_n, J_{1,1}, …, J_{1,r}, …, J_{m,1}, …, J_{m,r}]`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{superscript, subscript, Element};
use crate::cr_operator::d2;
use crate::error::{Error, Result};
use crate::kernels::require_conditions;
use crate::quadrature::{sphere_rule, Scheme};
use crate::scalar::Scalar;
use crate::superspace::{scalar_value, value_to_rational, Coord, PolyFunction, SuperPoint, Superspace, Var};

/// Cap on the number of product-grid points used for a boundary supremum.
pub const MAX_SUP_GRID: usize = 4_000_000;

/// Global indices of the leading coordinates, in key order.
fn leading_indices<S: Scalar>(space: &Superspace<S>) -> Result<Vec<usize>> {
    space
        .leading_coords()?
        .into_iter()
        .map(|c| space.index(c))
        .collect()
}

fn block_count<S: Scalar>(space: &Superspace<S>) -> usize {
    if space.m() == 0 {
        0
    } else {
        space.algebra().a1().map_or(0, |a| a.block_count())
    }
}

/// Coefficients of the monomials in leading coordinates only.
fn leading_part<S: Scalar>(f: &PolyFunction<S>, lead: &[usize]) -> BTreeMap<Vec<u32>, Element<S>> {
    let mut out = BTreeMap::new();
    for (exp, c) in f.terms() {
        let key: Vec<u32> = lead.iter().map(|&i| exp[i]).collect();
        if key.iter().sum::<u32>() == exp.iter().sum::<u32>() {
            out.insert(key, c.clone());
        }
    }
    out
}

fn close<S: Scalar>(a: &PolyFunction<S>, b: &PolyFunction<S>) -> bool {
    let scale = a
        .terms()
        .values()
        .chain(b.terms().values())
        .map(Element::norm)
        .fold(1.0, f64::max);
    (a - b).terms().values().all(|c| c.is_negligible(scale))
}

/// The building blocks `y_i` and `Z_k(θ_j)` in key order, with cached powers.
struct Generators<S> {
    space: Arc<Superspace<S>>,
    powers: Vec<Vec<PolyFunction<S>>>,
}

impl<S: Scalar> Generators<S> {
    fn new(space: &Arc<Superspace<S>>) -> Result<Self> {
        let mut base = Vec::new();
        for i in 0..space.n() {
            base.push(PolyFunction::coordinate_poly(space, Var::Y(i))?);
        }
        let r = block_count(space);
        for j in 0..space.m() {
            for k in 0..r {
                base.push(PolyFunction::z_projection(space, j, k)?);
            }
        }
        let one = PolyFunction::constant(space, space.algebra().one());
        Ok(Generators {
            space: space.clone(),
            powers: base.into_iter().map(|g| vec![one.clone(), g]).collect(),
        })
    }

    fn power(&mut self, slot: usize, d: u32) -> &PolyFunction<S> {
        let list = &mut self.powers[slot];
        while list.len() <= d as usize {
            let next = &list[list.len() - 1] * &list[1];
            list.push(next);
        }
        &list[d as usize]
    }

    fn monomial(&mut self, key: &[u32]) -> PolyFunction<S> {
        let mut acc = PolyFunction::constant(&self.space, self.space.algebra().one());
        for (slot, &d) in key.iter().enumerate() {
            if d > 0 {
                acc = &acc * self.power(slot, d);
            }
        }
        acc
    }

    fn assemble(&mut self, terms: &BTreeMap<Vec<u32>, Element<S>>) -> PolyFunction<S> {
        let mut f = PolyFunction::zero(&self.space);
        for (key, c) in terms {
            f = &f + &self.monomial(key).mul_element_left(c);
        }
        f
    }
}

/// `f = Σ_K A_K · y^I · Π Z_k(θ_j)^{J}` with coefficients on the left.
#[derive(Clone, Debug)]
pub struct QsPolynomial<S> {
    space: Arc<Superspace<S>>,
    terms: BTreeMap<Vec<u32>, Element<S>>,
}

impl<S: Scalar> QsPolynomial<S> {
    pub fn from_terms(space: &Arc<Superspace<S>>, terms: BTreeMap<Vec<u32>, Element<S>>) -> Result<Self> {
        let width = key_width(space)?;
        for (key, c) in &terms {
            if key.len() != width {
                return Err(Error::DimensionMismatch {
                    what: "multi-index",
                    expected: width,
                    found: key.len(),
                });
            }
            if c.dim() != space.algebra().dim() {
                return Err(Error::DimensionMismatch {
                    what: "coefficient",
                    expected: space.algebra().dim(),
                    found: c.dim(),
                });
            }
        }
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(QsPolynomial {
            space: space.clone(),
            terms,
        })
    }

    pub fn space(&self) -> &Arc<Superspace<S>> {
        &self.space
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Element<S>> {
        &self.terms
    }

    pub fn coefficient(&self, key: &[u32]) -> Element<S> {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| self.space.algebra().zero())
    }

    /// Expansion in real coordinates.
    pub fn to_poly(&self) -> Result<PolyFunction<S>> {
        Ok(Generators::new(&self.space)?.assemble(&self.terms))
    }

    /// E.g. `e₀·y²` or `(e₀ + e₁)·y·Z(π₁θ)`.
    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = generator_names(&self.space);
        let alg = self.space.algebra();
        self.terms
            .iter()
            .map(|(key, c)| {
                let mono: Vec<String> = key
                    .iter()
                    .zip(&names)
                    .filter(|(&d, _)| d > 0)
                    .map(|(&d, name)| {
                        if d == 1 {
                            name.clone()
                        } else {
                            format!("{name}{}", superscript(d as usize))
                        }
                    })
                    .collect();
                let mut coeff = alg.format_element(c);
                if c.coeffs().iter().filter(|v| !v.is_zero()).count() > 1 {
                    coeff = format!("({coeff})");
                }
                if mono.is_empty() {
                    coeff
                } else {
                    format!("{coeff}·{}", mono.join("·"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl<S: Scalar> PartialEq for QsPolynomial<S> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<S: Scalar> fmt::Display for QsPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

fn key_width<S: Scalar>(space: &Superspace<S>) -> Result<usize> {
    if space.m() > 0 {
        space.algebra().require_a1()?;
    }
    Ok(space.n() + space.m() * block_count(space))
}

/// Display names of the generators in key order.
pub fn generator_names<S: Scalar>(space: &Superspace<S>) -> Vec<String> {
    let (n, m) = (space.n(), space.m());
    let mut names: Vec<String> = (0..n)
        .map(|i| if n == 1 { "y".into() } else { format!("y{}", subscript(i + 1)) })
        .collect();
    for j in 0..m {
        let theta = if m == 1 { "θ".to_string() } else { format!("θ{}", subscript(j + 1)) };
        names.extend((0..block_count(space)).map(|k| format!("Z(π{}{theta})", subscript(k + 1))));
    }
    names
}

/// Name of a real coordinate, dropping the variable index when there is
/// only one super-variable (`y¹` rather than `y₁¹`).
pub fn coordinate_label<S: Scalar>(space: &Superspace<S>, c: Coord) -> String {
    if space.n() + space.m() != 1 {
        return c.to_string();
    }
    match c {
        Coord::Y { comp, .. } => format!("y{}", superscript(comp)),
        Coord::Theta { comp, .. } => format!("θ{}", superscript(comp + 1)),
    }
}

/// Rewrites `f` in the `y`/`Z` generators, or returns `None` if `f` is not
/// qS. An error means `f` is qS but the rewriting does not reproduce it.
pub fn classify<S: Scalar>(f: &PolyFunction<S>) -> Result<Option<QsPolynomial<S>>> {
    let space = f.space();
    let lead = leading_indices(space)?;
    if !d2(f)?.is_zero() {
        return Ok(None);
    }
    let candidate = QsPolynomial::from_terms(space, leading_part(f, &lead))?;
    let rebuilt = candidate.to_poly()?;
    if !close(&rebuilt, f) {
        return Err(Error::Evaluation(format!(
            "qS polynomial is not reproduced by its leading-monomial coefficients: {} vs {}",
            rebuilt.format(),
            f.format()
        )));
    }
    Ok(Some(candidate))
}

fn require_shape<S: Scalar>(f: &PolyFunction<S>, n: usize, m: usize) -> Result<()> {
    let s = f.space();
    if s.n() != n || s.m() != m {
        return Err(Error::Precondition(format!(
            "expected a function of {n} even and {m} odd variables, got {} and {}",
            s.n(),
            s.m()
        )));
    }
    Ok(())
}

/// `c_k` with `f = Σ c_k yᵏ`, for a single even variable.
pub fn classify_y<S: Scalar>(f: &PolyFunction<S>) -> Result<Option<Vec<Element<S>>>> {
    require_shape(f, 1, 0)?;
    Ok(classify(f)?.map(|q| {
        let top = q.terms.keys().map(|k| k[0]).max().map_or(0, |d| d as usize + 1);
        (0..top).map(|d| q.coefficient(&[d as u32])).collect()
    }))
}

/// Rewriting of a function of a single odd variable in `Z(π_k θ)`.
pub fn classify_theta<S: Scalar>(f: &PolyFunction<S>) -> Result<Option<QsPolynomial<S>>> {
    require_shape(f, 0, 1)?;
    classify(f)
}

/// Rewriting of a function of one even and one odd variable.
pub fn classify_mixed<S: Scalar>(f: &PolyFunction<S>) -> Result<Option<QsPolynomial<S>>> {
    require_shape(f, 1, 1)?;
    classify(f)
}

/// Verdict used by the command line.
#[derive(Clone, Debug)]
pub enum Classification<S> {
    Qs(QsPolynomial<S>),
    /// The first non-vanishing component of `d″f`.
    NotQs { witness: Coord },
}

impl<S: Scalar> Classification<S> {
    pub fn of(f: &PolyFunction<S>) -> Result<Self> {
        let d = d2(f)?;
        if let Some(witness) = d.first_nonzero() {
            return Ok(Classification::NotQs { witness });
        }
        Ok(Classification::Qs(classify(f)?.expect("d″f vanishes")))
    }

    pub fn is_qs(&self) -> bool {
        matches!(self, Classification::Qs(_))
    }

    /// `qS: true; f = …` or `qS: false; witness component …`.
    pub fn summary(&self, space: &Superspace<S>) -> String {
        match self {
            Classification::Qs(q) => format!("qS: true; f = {}", q.format()),
            Classification::NotQs { witness } => {
                format!("qS: false; witness component {}", coordinate_label(space, *witness))
            }
        }
    }
}

/// Truncated expansion `Σ A_{I,J} (y − b)^I Π Z_k(θ − β)^{J_k}` around a centre.
#[derive(Clone, Debug)]
pub struct SuperSeries<S> {
    space: Arc<Superspace<S>>,
    center: SuperPoint<S>,
    max_degree: u32,
    terms: BTreeMap<Vec<u32>, Element<S>>,
}

/// One coefficient with its multi-index split into `I` and the `J_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTerm<S> {
    pub i: Vec<u32>,
    pub j: Vec<Vec<u32>>,
    pub coeff: Element<S>,
}

#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    center: Vec<Value>,
    max_degree: u32,
    terms: Vec<SeriesTermDoc>,
}

#[derive(Serialize, Deserialize)]
struct SeriesTermDoc {
    #[serde(rename = "I")]
    i: Vec<u32>,
    #[serde(rename = "J")]
    j: Vec<Vec<u32>>,
    coeff: Vec<Value>,
}

impl<S: Scalar> SuperSeries<S> {
    pub fn center(&self) -> &SuperPoint<S> {
        &self.center
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// Coefficients keyed by the flat multi-index.
    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Element<S>> {
        &self.terms
    }

    pub fn split_terms(&self) -> Vec<SeriesTerm<S>> {
        let n = self.space.n();
        let r = block_count(&self.space);
        self.terms
            .iter()
            .map(|(key, c)| SeriesTerm {
                i: key[..n].to_vec(),
                j: key[n..].chunks(r.max(1)).map(<[u32]>::to_vec).collect(),
                coeff: c.clone(),
            })
            .collect()
    }

    pub fn coefficient(&self, i: &[u32], j: &[Vec<u32>]) -> Element<S> {
        let key: Vec<u32> = i.iter().chain(j.iter().flatten()).copied().collect();
        self.terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| self.space.algebra().zero())
    }

    /// The truncated series as a polynomial in real coordinates.
    pub fn to_poly(&self) -> Result<PolyFunction<S>> {
        let at_origin = QsPolynomial::from_terms(&self.space, self.terms.clone())?.to_poly()?;
        let back = SuperPoint::from_coords(
            &self.space,
            self.center.coords().iter().map(|c| -c.clone()).collect(),
        )?;
        at_origin.translate(&back)
    }

    pub fn eval(&self, x: &SuperPoint<S>) -> Result<Element<S>> {
        self.to_poly()?.eval(x)
    }

    /// `{"center": [..], "max_degree": d, "terms": [{"I": [..], "J": [[..]..], "coeff": [..]}]}`.
    pub fn to_json(&self) -> String {
        let doc = SeriesDoc {
            center: self.center.coords().iter().map(scalar_value).collect(),
            max_degree: self.max_degree,
            terms: self
                .split_terms()
                .into_iter()
                .map(|t| SeriesTermDoc {
                    i: t.i,
                    j: t.j,
                    coeff: t.coeff.coeffs().iter().map(scalar_value).collect(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("series serializes")
    }

    pub fn from_json(space: &Arc<Superspace<S>>, text: &str) -> Result<Self> {
        let doc: SeriesDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("series: {e}")))?;
        let scalar = |v: &Value, location: String| {
            value_to_rational(v)
                .map(|r| S::from_rational(&r))
                .map_err(|message| Error::Schema { location, message })
        };
        let center = doc
            .center
            .iter()
            .enumerate()
            .map(|(k, v)| scalar(v, format!("center[{k}]")))
            .collect::<Result<Vec<S>>>()?;
        let center = SuperPoint::from_coords(space, center)?;
        let r = block_count(space);
        let mut terms = BTreeMap::new();
        for (t, term) in doc.terms.iter().enumerate() {
            if term.i.len() != space.n() || term.j.len() != space.m() || term.j.iter().any(|j| j.len() != r) {
                return Err(Error::Schema {
                    location: format!("terms[{t}]"),
                    message: format!("expected I of length {} and {} J lists of length {r}", space.n(), space.m()),
                });
            }
            let coeff = term
                .coeff
                .iter()
                .enumerate()
                .map(|(k, v)| scalar(v, format!("terms[{t}].coeff[{k}]")))
                .collect::<Result<Vec<S>>>()?;
            let key: Vec<u32> = term.i.iter().chain(term.j.iter().flatten()).copied().collect();
            terms.insert(key, Element::from_coeffs(coeff));
        }
        let terms = QsPolynomial::from_terms(space, terms)?.terms;
        Ok(SuperSeries {
            space: space.clone(),
            center,
            max_degree: doc.max_degree,
            terms,
        })
    }
}

/// Taylor coefficients `A_K = ∂^K f(center) / K!` in the leading
/// coordinates, for all `|K| ≤ max_degree`.
pub fn series_expand<S: Scalar>(f: &PolyFunction<S>, center: &SuperPoint<S>, max_degree: u32) -> Result<SuperSeries<S>> {
    let space = f.space();
    require_conditions(space.algebra(), space.n(), space.m())?;
    if let Some(c) = d2(f)?.first_nonzero() {
        return Err(Error::Precondition(format!(
            "series expansion needs a qS function; d″f has a nonzero {c} component"
        )));
    }
    let center = SuperPoint::from_coords(space, center.coords().to_vec())?;
    let lead = leading_indices(space)?;
    let shifted = f.translate(&center)?;
    let terms = leading_part(&shifted, &lead)
        .into_iter()
        .filter(|(k, _)| k.iter().sum::<u32>() <= max_degree)
        .collect();
    Ok(SuperSeries {
        space: space.clone(),
        center,
        max_degree,
        terms,
    })
}

/// All multi-indices of the given width with total degree ≤ `d`.
pub fn multi_indices(width: usize, d: u32) -> Vec<Vec<u32>> {
    fn go(width: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == width {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=budget {
            prefix.push(k);
            go(width, budget - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(width, d, &mut Vec::new(), &mut out);
    out.sort_by_key(|k| (k.iter().sum::<u32>(), std::cmp::Reverse(k.clone())));
    out
}

/// Supremum of `‖f‖` over the distinguished boundary of a polydisk.
/// Each factor sphere gets `per_factor` points, reduced so the product grid
/// stays within [`MAX_SUP_GRID`].
pub fn boundary_sup<S: Scalar>(
    f: &PolyFunction<S>,
    center: &SuperPoint<S>,
    radii: &[f64],
    per_factor: usize,
) -> Result<(f64, usize)> {
    let space = f.space();
    let factors = space.n() + space.m();
    if radii.len() != factors {
        return Err(Error::DimensionMismatch {
            what: "polydisk radii",
            expected: factors,
            found: radii.len(),
        });
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Precondition("radii must be positive".into()));
    }
    let center = SuperPoint::from_coords(space, center.coords().to_vec())?.to_f64();
    let per = if factors <= 1 {
        per_factor
    } else {
        per_factor.min((MAX_SUP_GRID as f64).powf(1.0 / factors as f64).floor() as usize)
    }
    .max(1);
    let (p1, q) = (space.algebra().p_plus_1(), space.algebra().q());
    let mut grids = Vec::new();
    for (k, &radius) in radii.iter().enumerate() {
        let (offset, dim) = if k < space.n() { (k * p1, p1) } else { (space.n() * p1 + (k - space.n()) * q, q) };
        let rule = sphere_rule(dim, per, Scheme::Tensor, k as u64)?;
        let pts: Vec<Vec<f64>> = rule
            .points
            .iter()
            .map(|v| (0..dim).map(|i| center.coords()[offset + i] + radius * v[i]).collect())
            .collect();
        grids.push((offset, pts));
    }
    let total: usize = grids.iter().map(|(_, g)| g.len()).product();
    let fast = f.to_f64().compile();
    let base = center.coords().to_vec();
    let sup = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut w = base.clone();
            for (offset, g) in &grids {
                let p = &g[idx % g.len()];
                idx /= g.len();
                w[*offset..*offset + p.len()].copy_from_slice(p);
            }
            fast.eval(&w).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok((sup, total))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyEntry {
    pub order: Vec<u32>,
    /// `‖∂^K f(center)‖ = K! ‖A_K‖`.
    pub derivative_norm: f64,
    /// `‖∂^K f(center)‖ r^K / (K! sup‖f‖)`.
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CauchyReport {
    pub sup: f64,
    pub grid_points: usize,
    pub entries: Vec<CauchyEntry>,
    /// Largest ratio seen: the empirical constant of the inequality.
    pub constant: f64,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Ratios of the Cauchy-type inequality for every order `|K| ≤ max_order`
/// on the polydisk with the given centre and radii (one per super-variable).
pub fn cauchy_bound_report<S: Scalar>(
    f: &PolyFunction<S>,
    center: &SuperPoint<S>,
    radii: &[f64],
    max_order: u32,
    grid_per_factor: usize,
) -> Result<CauchyReport> {
    let space = f.space();
    let series = series_expand(f, center, max_order)?;
    let (sup, grid_points) = boundary_sup(f, center, radii, grid_per_factor)?;
    let r = block_count(space);
    let radius_of = |slot: usize| {
        if slot < space.n() {
            radii[slot]
        } else {
            radii[space.n() + (slot - space.n()) / r]
        }
    };
    let width = key_width(space)?;
    let entries: Vec<CauchyEntry> = multi_indices(width, max_order)
        .into_iter()
        .map(|order| {
            let a = series.terms().get(&order).map_or(0.0, |c| c.to_f64().norm());
            let kfact: f64 = order.iter().map(|&k| factorial(k)).product();
            let rpow: f64 = order.iter().enumerate().map(|(s, &k)| radius_of(s).powi(k as i32)).product();
            let rho = if sup > 0.0 { a * rpow / sup } else { 0.0 };
            CauchyEntry {
                order,
                derivative_norm: a * kfact,
                rho,
            }
        })
        .collect();
    let constant = entries.iter().map(|e| e.rho).fold(0.0, f64::max);
    Ok(CauchyReport {
        sup,
        grid_points,
        entries,
        constant,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleRow {
    pub radius: f64,
    pub sup: f64,
    /// `sup / R`, the order-one Cauchy bound.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleReport {
    pub rows: Vec<LiouvilleRow>,
    /// Whether every coefficient of order ≥ 1 at the origin vanishes.
    pub higher_coefficients_vanish: bool,
}

/// Growth of `sup ‖f‖` over polydisks of radius `R` about the origin.
pub fn liouville_probe<S: Scalar>(f: &PolyFunction<S>, radii: &[f64], grid_per_factor: usize) -> Result<LiouvilleReport> {
    let space = f.space();
    let origin = SuperPoint::zero(space);
    let series = series_expand(f, &origin, f.degree())?;
    let higher_coefficients_vanish = series
        .terms()
        .iter()
        .all(|(k, c)| k.iter().all(|&d| d == 0) || c.is_zero());
    let factors = space.n() + space.m();
    let rows = radii
        .iter()
        .map(|&radius| {
            let (sup, _) = boundary_sup(f, &origin, &vec![radius; factors], grid_per_factor)?;
            Ok(LiouvilleRow {
                radius,
                sup,
                ratio: sup / radius,
            })
        })
        .collect::<Result<_>>()?;
    Ok(LiouvilleReport {
        rows,
        higher_coefficients_vanish,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, example4};
    use crate::cr_operator::{is_qs, laplacian};
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn r(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn square_in_coordinates() {
        let s = Superspace::new(complex(), 1, 0);
        let x = PolyFunction::real_coordinate(&s, Coord::Y { var: 0, comp: 0 }).unwrap();
        let yy = PolyFunction::real_coordinate(&s, Coord::Y { var: 0, comp: 1 }).unwrap();
        let e1 = s.algebra().basis(1);
        let f = &(&x.pow(2) - &yy.pow(2)) + &(&x * &yy).mul_element_left(&e1.scale(&r(2)));
        let c = classify_y(&f).unwrap().unwrap();
        let alg = s.algebra();
        assert_eq!(c, vec![alg.zero(), alg.zero(), alg.one()]);
        assert!(classify_y(&x).unwrap().is_none());
        let lambda = alg.element(&[3, -2]);
        assert_eq!(classify_y(&PolyFunction::constant(&s, lambda.clone())).unwrap().unwrap(), vec![lambda]);
        assert_eq!(Classification::of(&f).unwrap().summary(&s), "qS: true; f = e₀·y²");
        assert_eq!(Classification::of(&x).unwrap().summary(&s), "qS: false; witness component y¹");
        assert_eq!(Classification::of(&PolyFunction::zero(&s)).unwrap().summary(&s), "qS: true; f = 0");
    }

    #[test]
    fn theta_projections() {
        let s = Superspace::new(example4(), 0, 1);
        let z1 = PolyFunction::z_projection(&s, 0, 0).unwrap();
        let z2 = PolyFunction::z_projection(&s, 0, 1).unwrap();
        let one = s.algebra().one();
        let q = classify_theta(&z1).unwrap().unwrap();
        assert_eq!(q.terms().len(), 1);
        assert_eq!(q.coefficient(&[1, 0]), one);
        let q = classify_theta(&(&z1 * &z2)).unwrap().unwrap();
        assert_eq!(q.coefficient(&[1, 1]), one);
        let t1 = PolyFunction::real_coordinate(&s, Coord::Theta { var: 0, comp: 0 }).unwrap();
        assert!(classify_theta(&t1).unwrap().is_none());
    }

    #[test]
    fn mixed_variables() {
        let s = Superspace::new(example4(), 1, 1);
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        let z = PolyFunction::z_projection(&s, 0, 0).unwrap();
        let q = classify_mixed(&(&y * &z)).unwrap().unwrap();
        assert_eq!(q.terms().len(), 1);
        assert_eq!(q.coefficient(&[1, 1, 0]), s.algebra().one());
        assert_eq!(q.format(), "e₀·y·Z(π₁θ)");
        let c = classify_mixed(&PolyFunction::constant(&s, s.algebra().basis(2))).unwrap().unwrap();
        assert_eq!(c.coefficient(&[0, 0, 0]), s.algebra().basis(2));
        let t1 = PolyFunction::real_coordinate(&s, Coord::Theta { var: 0, comp: 0 }).unwrap();
        assert!(classify_mixed(&(&y + &t1)).unwrap().is_none());
        assert!(matches!(classify_y(&y), Err(Error::Precondition(_))));
    }

    #[test]
    fn series_of_square() {
        let s = Superspace::new(complex(), 1, 0);
        let f = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap().pow(2);
        let alg = s.algebra();
        let at0 = series_expand(&f, &SuperPoint::zero(&s), 4).unwrap();
        assert_eq!(at0.terms().len(), 1);
        assert_eq!(at0.coefficient(&[2], &[]), alg.one());
        let b = alg.element(&[1, 2]);
        let center = SuperPoint::from_elements(&s, &[b.clone()], &[]).unwrap();
        let sb = series_expand(&f, &center, 4).unwrap();
        assert_eq!(sb.coefficient(&[1], &[]), b.scale(&r(2)));
        assert_eq!(sb.coefficient(&[0], &[]), alg.square(&b));
        assert_eq!(sb.to_poly().unwrap(), f);
        let back = SuperSeries::from_json(&s, &sb.to_json()).unwrap();
        assert_eq!(back.terms(), sb.terms());
        assert_eq!(back.center(), sb.center());
    }

    #[test]
    fn series_json_shape() {
        let s = Superspace::new(example4(), 1, 1);
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        let z = PolyFunction::z_projection(&s, 0, 0).unwrap();
        let ser = series_expand(&(&y * &z), &SuperPoint::zero(&s), 4).unwrap();
        let terms = ser.split_terms();
        assert_eq!(terms.len(), 1);
        assert_eq!((terms[0].i.clone(), terms[0].j.clone()), (vec![1], vec![vec![1, 0]]));
        let v: Value = serde_json::from_str(&ser.to_json()).unwrap();
        assert_eq!(v["terms"][0]["I"], serde_json::json!([1]));
        assert_eq!(v["terms"][0]["J"], serde_json::json!([[1, 0]]));
        assert_eq!(v["terms"][0]["coeff"][0], serde_json::json!(1));
    }

    #[test]
    fn series_needs_qs_and_conditions() {
        let s = Superspace::new(complex(), 1, 0);
        let x = PolyFunction::real_coordinate(&s, Coord::Y { var: 0, comp: 0 }).unwrap();
        assert!(matches!(series_expand(&x, &SuperPoint::zero(&s), 2), Err(Error::Precondition(_))));
        let h = Superspace::new(crate::algebra::hyperbolic(), 1, 0);
        let y = PolyFunction::coordinate_poly(&h, Var::Y(0)).unwrap();
        assert!(matches!(series_expand(&y, &SuperPoint::zero(&h), 2), Err(Error::ConditionFailed { .. })));
    }

    #[test]
    fn cauchy_ratios() {
        let s = Superspace::new(complex(), 1, 0);
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        for d in 1..=4 {
            let rep = cauchy_bound_report(&y.pow(d), &SuperPoint::zero(&s), &[1.0], d, 10_000).unwrap();
            let top = rep.entries.iter().find(|e| e.order == vec![d]).unwrap();
            assert!((top.rho - 1.0).abs() < 1e-12);
            assert!((top.derivative_norm - factorial(d)).abs() < 1e-9);
            assert!(rep.grid_points >= 10_000);
        }
        let rep = cauchy_bound_report(&y.pow(2), &SuperPoint::zero(&s), &[1.0], 3, 10_000).unwrap();
        assert_eq!(rep.entries.iter().find(|e| e.order == vec![3]).unwrap().rho, 0.0);
        let c = PolyFunction::constant(&s, s.algebra().element(&[2, 1]));
        let rep = cauchy_bound_report(&c, &SuperPoint::zero(&s), &[1.0], 0, 10_000).unwrap();
        assert!((rep.entries[0].rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn liouville_growth() {
        let s = Superspace::new(complex(), 1, 0);
        let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
        let radii = [1.0, 10.0, 100.0];
        let lin = liouville_probe(&y, &radii, 10_000).unwrap();
        assert!(lin.rows.iter().all(|row| (row.ratio - 1.0).abs() < 1e-12));
        assert!(!lin.higher_coefficients_vanish);
        let sq = liouville_probe(&y.pow(2), &radii, 10_000).unwrap();
        for row in &sq.rows {
            assert!((row.ratio - row.radius).abs() < 1e-9 * row.radius);
        }
        let c = liouville_probe(&PolyFunction::constant(&s, s.algebra().one()), &radii, 10_000).unwrap();
        assert!(c.higher_coefficients_vanish);
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(3, 4).len(), 35);
        assert_eq!(multi_indices(1, 2), vec![vec![0], vec![1], vec![2]]);
    }

    fn small_element(dim: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-3i64..=3, dim)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_example4(coeffs in proptest::collection::vec((0u32..3, 0u32..2, 0u32..2, small_element(10)), 1..5)) {
            let s = Superspace::new(example4(), 1, 1);
            let alg = s.algebra();
            let mut terms = BTreeMap::new();
            for (a, b, c, e) in coeffs {
                terms.insert(vec![a, b, c], alg.element(&e));
            }
            let q = QsPolynomial::from_terms(&s, terms).unwrap();
            let f = q.to_poly().unwrap();
            prop_assert!(is_qs(&f).unwrap());
            prop_assert!(laplacian(&f).is_zero());
            let back = classify_mixed(&f).unwrap().unwrap();
            prop_assert_eq!(&back, &q);
            let ser = series_expand(&f, &SuperPoint::zero(&s), 8).unwrap();
            prop_assert_eq!(ser.terms(), q.terms());
            prop_assert_eq!(ser.to_poly().unwrap(), f);
        }

        #[test]
        fn classify_y_agrees_with_qs(c in proptest::collection::vec(-2i64..=2, 6)) {
            // a·(y⁰)² + b·(y¹)² + c·y⁰y¹ + … over C: qS exactly for the y² family.
            let s = Superspace::new(complex(), 1, 0);
            let x0 = PolyFunction::real_coordinate(&s, Coord::Y { var: 0, comp: 0 }).unwrap();
            let x1 = PolyFunction::real_coordinate(&s, Coord::Y { var: 0, comp: 1 }).unwrap();
            let alg = s.algebra();
            let f = &(&(&x0.pow(2).mul_element_left(&alg.element(&c[0..2]))
                + &x1.pow(2).mul_element_left(&alg.element(&c[2..4])))
                + &(&x0 * &x1).mul_element_left(&alg.element(&c[4..6])))
                + &PolyFunction::zero(&s);
            prop_assert_eq!(classify_y(&f).unwrap().is_some(), is_qs(&f).unwrap());
        }

        #[test]
        fn series_matches_pointwise(shift in small_element(2), pts in proptest::collection::vec(small_element(2), 5)) {
            let s = Superspace::new(complex(), 1, 0);
            let y = PolyFunction::coordinate_poly(&s, Var::Y(0)).unwrap();
            let f = &(&y.pow(3) - &y.pow(2).mul_element_left(&s.algebra().element(&[1, 2]))) + &y;
            let center = SuperPoint::from_coords(&s, shift.iter().map(|&v| r(v)).collect()).unwrap();
            let ser = series_expand(&f, &center, 3).unwrap();
            for p in pts {
                let x = SuperPoint::from_coords(&s, p.iter().map(|&v| r(v)).collect()).unwrap();
                prop_assert_eq!(ser.eval(&x).unwrap(), f.eval(&x).unwrap());
            }
        }
    }
}

//! Quadrature over spheres, balls and distinguished polydisk boundaries.
//!
//! Node evaluation runs on the rayon pool, but every reduction walks the
//! nodes in a fixed order with compensated (Neumaier) summation, so a result
//! depends only on the configuration and seed, never on the thread count.

use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::legendre::GaussLegendre;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra::{AlgebraSpec, Element};
use crate::cr_operator::d2;
use crate::error::{Error, Result};
use crate::kernels::{unit_sphere_area, KernelGeometry};
use crate::scalar::Scalar;
use crate::superspace::{PolyFunction, SuperPoint, Superspace, Var};

/// Largest real dimension handled by product grids; above it the tensor
/// scheme falls back to Monte Carlo.
pub const TENSOR_MAX_DIM: usize = 4;

const CHUNK: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Product grids in spherical coordinates (dimension ≤ 4).
    Tensor,
    /// Normalised-Gaussian sampling with antithetic pairs.
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub scheme: Scheme,
    /// Boundary nodes (for polydisks: the total budget over all factors).
    pub nodes: usize,
    /// Nodes for volume integrals (directions × radial order).
    pub volume_nodes: usize,
    /// Gauss–Legendre order along each ray of a volume integral.
    pub radial_order: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            scheme: Scheme::Tensor,
            nodes: 4096,
            volume_nodes: 100_000,
            radial_order: 20,
            seed: 0,
            tolerance: 1e-3,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 || self.volume_nodes == 0 || self.radial_order == 0 {
            return Err(Error::Precondition("node counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// One factor of a polydisk: a ball in the coordinates of a single super-variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub var: Var,
    pub offset: usize,
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    Ball { center: Vec<f64>, radius: f64 },
    Polydisk { factors: Vec<Factor> },
}

#[derive(Clone, Debug)]
pub struct Domain {
    space: Arc<Superspace<f64>>,
    kind: DomainKind,
}

impl Domain {
    pub fn ball(space: &Arc<Superspace<f64>>, center: &SuperPoint<f64>, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        let center = SuperPoint::from_coords(space, center.coords().to_vec())?;
        Ok(Domain {
            space: space.clone(),
            kind: DomainKind::Ball {
                center: center.into_coords(),
                radius,
            },
        })
    }

    /// Product of balls, one per super-variable (`y_1, …, y_n, θ_1, …, θ_m`).
    pub fn polydisk(space: &Arc<Superspace<f64>>, center: &SuperPoint<f64>, radii: &[f64]) -> Result<Self> {
        let (n, m) = (space.n(), space.m());
        if radii.len() != n + m {
            return Err(Error::DimensionMismatch {
                what: "polydisk radii",
                expected: n + m,
                found: radii.len(),
            });
        }
        let center = SuperPoint::from_coords(space, center.coords().to_vec())?;
        let (p1, q) = (space.algebra().p_plus_1(), space.algebra().q());
        let mut factors = Vec::new();
        for (k, &radius) in radii.iter().enumerate() {
            check_radius(radius)?;
            let (var, offset, len) = if k < n {
                (Var::Y(k), k * p1, p1)
            } else {
                (Var::Theta(k - n), n * p1 + (k - n) * q, q)
            };
            factors.push(Factor {
                var,
                offset,
                center: center.coords()[offset..offset + len].to_vec(),
                radius,
            });
        }
        Ok(Domain {
            space: space.clone(),
            kind: DomainKind::Polydisk { factors },
        })
    }

    pub fn space(&self) -> &Arc<Superspace<f64>> {
        &self.space
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    /// Whether `x` lies strictly inside.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.kind {
            DomainKind::Ball { center, radius } => dist(x, center) < *radius,
            DomainKind::Polydisk { factors } => factors
                .iter()
                .all(|f| dist(&x[f.offset..f.offset + f.center.len()], &f.center) < f.radius),
        }
    }

    fn ball_parts(&self) -> Result<(&[f64], f64)> {
        match &self.kind {
            DomainKind::Ball { center, radius } => Ok((center, *radius)),
            DomainKind::Polydisk { .. } => Err(Error::Precondition("this operation needs a ball".into())),
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("radius must be positive, got {r}")))
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Running Neumaier sum of a coefficient vector.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Vec<f64>,
    carry: Vec<f64>,
}

impl CompensatedSum {
    pub fn new(dim: usize) -> Self {
        CompensatedSum {
            sum: vec![0.0; dim],
            carry: vec![0.0; dim],
        }
    }

    pub fn add(&mut self, v: &[f64]) {
        for ((s, c), &x) in self.sum.iter_mut().zip(self.carry.iter_mut()).zip(v) {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
    }

    pub fn add_scaled(&mut self, w: f64, v: &Element<f64>) {
        let scaled: Vec<f64> = v.coeffs().iter().map(|c| c * w).collect();
        self.add(&scaled);
    }

    pub fn total(&self) -> Element<f64> {
        Element::from_coeffs(self.sum.iter().zip(&self.carry).map(|(s, c)| s + c).collect())
    }
}

/// Sums `term(i)` for `i < count` on the thread pool in fixed-size chunks;
/// chunk results are combined in index order.
pub fn ordered_sum<F>(count: usize, dim: usize, term: F) -> Result<Element<f64>>
where
    F: Fn(usize) -> Result<Element<f64>> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let partials: Vec<Element<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = CompensatedSum::new(dim);
            for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                acc.add(term(i)?.coeffs());
            }
            Ok(acc.total())
        })
        .collect::<Result<_>>()?;
    let mut acc = CompensatedSum::new(dim);
    for p in &partials {
        acc.add(p.coeffs());
    }
    Ok(acc.total())
}

/// Nodes on the unit sphere `S^{dim−1}` with weights summing to its area.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// The scheme actually used (tensor requests above dimension 4 fall back).
    pub scheme: Scheme,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn legendre(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).expect("nonzero order"));
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Builds a rule with roughly `nodes` points.
pub fn sphere_rule(dim: usize, nodes: usize, scheme: Scheme, seed: u64) -> Result<SphereRule> {
    use std::f64::consts::TAU;
    if dim == 0 || nodes == 0 {
        return Err(Error::Precondition("sphere rules need dim ≥ 1 and nodes ≥ 1".into()));
    }
    if scheme == Scheme::MonteCarlo || dim > TENSOR_MAX_DIM {
        return Ok(monte_carlo_rule(dim, nodes, seed));
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match dim {
        1 => {
            points = vec![vec![1.0], vec![-1.0]];
            weights = vec![1.0, 1.0];
        }
        2 => {
            for k in 0..nodes {
                let t = TAU * k as f64 / nodes as f64;
                points.push(vec![t.cos(), t.sin()]);
                weights.push(TAU / nodes as f64);
            }
        }
        3 => {
            let nz = ((nodes as f64 / 2.0).sqrt().round() as usize).max(1);
            let nphi = 2 * nz;
            for (z, wz) in legendre(nz, -1.0, 1.0) {
                let rho = (1.0 - z * z).max(0.0).sqrt();
                for k in 0..nphi {
                    let phi = TAU * k as f64 / nphi as f64;
                    points.push(vec![rho * phi.cos(), rho * phi.sin(), z]);
                    weights.push(wz * TAU / nphi as f64);
                }
            }
        }
        _ => {
            // Hopf coordinates: w = (√(1−s) e^{iξ₁}, √s e^{iξ₂}), dS = ½ ds dξ₁ dξ₂.
            let nxi = ((2.0 * nodes as f64).cbrt().round() as usize).max(2);
            let ns = (nodes / (nxi * nxi)).max(1);
            for (s, ws) in legendre(ns, 0.0, 1.0) {
                let (a, b) = ((1.0 - s).sqrt(), s.sqrt());
                for i in 0..nxi {
                    let x1 = TAU * i as f64 / nxi as f64;
                    for j in 0..nxi {
                        let x2 = TAU * j as f64 / nxi as f64;
                        points.push(vec![a * x1.cos(), a * x1.sin(), b * x2.cos(), b * x2.sin()]);
                        weights.push(0.5 * ws * (TAU / nxi as f64).powi(2));
                    }
                }
            }
        }
    }
    Ok(SphereRule {
        dim,
        points,
        weights,
        scheme: Scheme::Tensor,
    })
}

fn monte_carlo_rule(dim: usize, nodes: usize, seed: u64) -> SphereRule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(nodes);
    while points.len() < nodes {
        let v: Vec<f64> = loop {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if r > 1e-12 {
                break v.iter().map(|a| a / r).collect();
            }
        };
        let neg: Vec<f64> = v.iter().map(|a| -a).collect();
        points.push(v);
        if points.len() < nodes {
            points.push(neg);
        }
    }
    let w = unit_sphere_area(dim) / nodes as f64;
    SphereRule {
        dim,
        points,
        weights: vec![w; nodes],
        scheme: Scheme::MonteCarlo,
    }
}

/// `∫_{∂B} g(w, ν(w)) dS(w)` over the boundary sphere of a ball domain.
pub fn surface_integral<G>(g: &G, dom: &Domain, cfg: &QuadratureConfig) -> Result<Element<f64>>
where
    G: Fn(&[f64], &[f64]) -> Result<Element<f64>> + Sync + ?Sized,
{
    cfg.validate()?;
    let (center, radius) = dom.ball_parts()?;
    let dim = center.len();
    let rule = sphere_rule(dim, cfg.nodes, cfg.scheme, cfg.seed)?;
    let alg_dim = dom.space.algebra().dim();
    let area_scale = radius.powi(dim as i32 - 1);
    ordered_sum(rule.len(), alg_dim, |i| {
        let nu = &rule.points[i];
        let w: Vec<f64> = center.iter().zip(nu).map(|(c, v)| c + radius * v).collect();
        Ok(g(&w, nu)?.scale(&(rule.weights[i] * area_scale)))
    })
}

/// `∫_B g dV` over a ball, in polar coordinates around `pole` (the centre
/// by default). Integrands with a `‖w − pole‖^{1−N}` singularity become
/// smooth after the `t^{N−1}` Jacobian.
pub fn volume_integral<G>(g: &G, dom: &Domain, pole: Option<&[f64]>, cfg: &QuadratureConfig) -> Result<Element<f64>>
where
    G: Fn(&[f64]) -> Result<Element<f64>> + Sync + ?Sized,
{
    cfg.validate()?;
    let (center, radius) = dom.ball_parts()?;
    let dim = center.len();
    let pole = pole.unwrap_or(center);
    if pole.len() != dim || dist(pole, center) >= radius {
        return Err(Error::Precondition("the pole must lie strictly inside the ball".into()));
    }
    let directions = (cfg.volume_nodes / cfg.radial_order).max(1);
    let rule = sphere_rule(dim, directions, cfg.scheme, cfg.seed)?;
    let radial = legendre(cfg.radial_order, 0.0, 1.0);
    let d: Vec<f64> = pole.iter().zip(center).map(|(p, c)| p - c).collect();
    let d2: f64 = d.iter().map(|v| v * v).sum();
    let alg_dim = dom.space.algebra().dim();
    ordered_sum(rule.len(), alg_dim, |i| {
        let nu = &rule.points[i];
        let dn: f64 = d.iter().zip(nu).map(|(a, b)| a * b).sum();
        let reach = -dn + (dn * dn - d2 + radius * radius).sqrt();
        let mut acc = CompensatedSum::new(alg_dim);
        for &(s, ws) in &radial {
            let t = s * reach;
            let w: Vec<f64> = pole.iter().zip(nu).map(|(p, v)| p + t * v).collect();
            let jac = ws * reach * t.powi(dim as i32 - 1);
            acc.add_scaled(jac * rule.weights[i], &g(&w)?);
        }
        Ok(acc.total())
    })
}

/// The terms of the representation formula at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Reproduction {
    /// `∫_{∂D} f K(·, x) dS − ∫_D d″f ∧ K(·, x)`.
    pub value: Element<f64>,
    pub boundary: Element<f64>,
    /// Absent when `f` is qS.
    pub volume: Option<Element<f64>>,
}

/// Reconstructs `f(x)` from its boundary values on a ball, subtracting the
/// `d″f` volume term when `f` is not qS.
pub fn reproduce<S: Scalar>(
    f: &PolyFunction<S>,
    dom: &Domain,
    x: &SuperPoint<f64>,
    cfg: &QuadratureConfig,
) -> Result<Reproduction> {
    let space = f.space();
    check_shape(space, dom)?;
    let geometry = KernelGeometry::new(space.algebra(), space.n(), space.m())?;
    let fast = f.to_f64().compile();
    let value = |w: &[f64]| Ok(fast.eval(w));
    let d2f = d2(f)?;
    let correction = if d2f.is_zero() {
        None
    } else {
        let comps: Vec<_> = geometry
            .nonleading_coords()
            .iter()
            .map(|c| d2f.component(*c).expect("d″ has every non-leading key").to_f64().compile())
            .collect();
        Some(comps)
    };
    let d2_eval = correction.as_ref().map(|comps| {
        move |w: &[f64]| -> Result<Vec<Element<f64>>> { Ok(comps.iter().map(|c| c.eval(w)).collect()) }
    });
    reproduce_with(&geometry, &value, d2_eval.as_ref().map(|g| g as &(dyn Fn(&[f64]) -> Result<Vec<Element<f64>>> + Sync)), dom, x, cfg)
}

/// [`reproduce`] for black-box functions: `f` gives values, `d2f` (if any)
/// the `d″f` components in the order of [`KernelGeometry::nonleading_coords`].
pub fn reproduce_with<F>(
    geometry: &KernelGeometry,
    f: &F,
    d2f: Option<&(dyn Fn(&[f64]) -> Result<Vec<Element<f64>>> + Sync)>,
    dom: &Domain,
    x: &SuperPoint<f64>,
    cfg: &QuadratureConfig,
) -> Result<Reproduction>
where
    F: Fn(&[f64]) -> Result<Element<f64>> + Sync + ?Sized,
{
    let x = x.coords();
    if x.len() != geometry.dim() {
        return Err(Error::DimensionMismatch {
            what: "target point",
            expected: geometry.dim(),
            found: x.len(),
        });
    }
    if !dom.contains(x) {
        return Err(Error::Precondition("the target point must lie strictly inside the domain".into()));
    }
    let alg = geometry.algebra();
    let boundary = surface_integral(
        &|w: &[f64], nu: &[f64]| {
            let u: Vec<f64> = w.iter().zip(x).map(|(a, b)| a - b).collect();
            Ok(alg.mul(&f(w)?, &geometry.density(&u, nu)?))
        },
        dom,
        cfg,
    )?;
    let volume = match d2f {
        None => None,
        Some(g) => Some(volume_integral(
            &|w: &[f64]| {
                let u: Vec<f64> = w.iter().zip(x).map(|(a, b)| a - b).collect();
                geometry.volume_density(&u, &g(w)?)
            },
            dom,
            Some(x),
            cfg,
        )?),
    };
    let value = match &volume {
        None => boundary.clone(),
        Some(v) => &boundary - v,
    };
    Ok(Reproduction { value, boundary, volume })
}

fn check_shape<S: Scalar>(space: &Superspace<S>, dom: &Domain) -> Result<()> {
    let ds = dom.space();
    if ds.n() != space.n() || ds.m() != space.m() || ds.real_dim() != space.real_dim() {
        return Err(Error::Precondition("function and domain live on different superspaces".into()));
    }
    Ok(())
}

/// Per-factor node count for a budget spread over `factors` spheres.
pub fn per_factor_nodes(budget: usize, factors: usize) -> usize {
    let mut k = (budget as f64).powf(1.0 / factors as f64).floor() as usize;
    while (k + 1).checked_pow(factors as u32).is_some_and(|v| v <= budget) {
        k += 1;
    }
    while k > 1 && k.pow(factors as u32) > budget {
        k -= 1;
    }
    k.max(1)
}

/// Iterated integral over the distinguished boundary `∂₀P` of
/// `f(w) Π_j K_j(w_j, x_j)`, one sphere per super-variable, outermost
/// factor first. Each factor uses the `Λ₀` kernel (for `y_i`) or the `Λ₁`
/// kernel (for `θ_j`) of its own variable.
pub fn polydisk_reproduce<S: Scalar>(
    f: &PolyFunction<S>,
    dom: &Domain,
    x: &SuperPoint<f64>,
    cfg: &QuadratureConfig,
) -> Result<Element<f64>> {
    let space = f.space();
    check_shape(space, dom)?;
    let fast = f.to_f64().compile();
    polydisk_reproduce_with(space.algebra(), &|w: &[f64]| Ok(fast.eval(w)), dom, x, cfg)
}

/// [`polydisk_reproduce`] for a black-box function.
pub fn polydisk_reproduce_with<S: Scalar, F>(
    alg: &AlgebraSpec<S>,
    f: &F,
    dom: &Domain,
    x: &SuperPoint<f64>,
    cfg: &QuadratureConfig,
) -> Result<Element<f64>>
where
    F: Fn(&[f64]) -> Result<Element<f64>> + Sync + ?Sized,
{
    cfg.validate()?;
    let DomainKind::Polydisk { factors } = dom.kind() else {
        return Err(Error::Precondition("this operation needs a polydisk".into()));
    };
    let x = x.coords();
    if x.len() != dom.space().real_dim() {
        return Err(Error::DimensionMismatch {
            what: "target point",
            expected: dom.space().real_dim(),
            found: x.len(),
        });
    }
    if !dom.contains(x) {
        return Err(Error::Precondition("the target point must lie strictly inside the polydisk".into()));
    }
    let per = per_factor_nodes(cfg.nodes, factors.len());
    let mut parts = Vec::with_capacity(factors.len());
    for (k, fac) in factors.iter().enumerate() {
        let geometry = match fac.var {
            Var::Y(_) => KernelGeometry::new(alg, 1, 0)?,
            Var::Theta(_) => KernelGeometry::new(alg, 0, 1)?,
        };
        let dim = fac.center.len();
        let seed = cfg.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k as u64));
        let rule = sphere_rule(dim, per, cfg.scheme, seed)?;
        let target = x[fac.offset..fac.offset + dim].to_vec();
        // Boundary points and kernel weights of this factor.
        let nodes: Vec<(Vec<f64>, Element<f64>)> = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(nu, wt)| {
                let w: Vec<f64> = fac.center.iter().zip(nu).map(|(c, v)| c + fac.radius * v).collect();
                let u: Vec<f64> = w.iter().zip(&target).map(|(a, b)| a - b).collect();
                let k = geometry.density(&u, nu)?;
                Ok((w, k.scale(&(wt * fac.radius.powi(dim as i32 - 1)))))
            })
            .collect::<Result<_>>()?;
        parts.push((fac.offset, nodes));
    }
    let alg = alg.to_f64();
    let point = x.to_vec();
    let (offset, outer) = &parts[0];
    let alg_dim = alg.dim();
    ordered_sum(outer.len(), alg_dim, |i| {
        let mut w = point.clone();
        let (pts, k) = &outer[i];
        w[*offset..*offset + pts.len()].copy_from_slice(pts);
        nested(&alg, f, &parts[1..], &mut w, k)
    })
}

fn nested<F>(
    alg: &AlgebraSpec<f64>,
    f: &F,
    rest: &[(usize, Vec<(Vec<f64>, Element<f64>)>)],
    w: &mut Vec<f64>,
    kernel: &Element<f64>,
) -> Result<Element<f64>>
where
    F: Fn(&[f64]) -> Result<Element<f64>> + Sync + ?Sized,
{
    match rest.split_first() {
        None => Ok(alg.mul(&f(w)?, kernel)),
        Some(((offset, nodes), tail)) => {
            let mut acc = CompensatedSum::new(alg.dim());
            for (pts, k) in nodes {
                w[*offset..*offset + pts.len()].copy_from_slice(pts);
                let inner = nested(alg, f, tail, w, &alg.mul(kernel, k))?;
                acc.add(inner.coeffs());
            }
            Ok(acc.total())
        }
    }
}

/// The extension candidate `F(x) = ∫_{∂D} f(w) K⁽⁰⁾(w, x) dS(w)` built from
/// boundary values only. Needs at least two super-variables.
pub fn hartogs_extend<S: Scalar, F>(
    alg: &AlgebraSpec<S>,
    n: usize,
    m: usize,
    f: &F,
    dom: &Domain,
    x: &SuperPoint<f64>,
    cfg: &QuadratureConfig,
) -> Result<Element<f64>>
where
    F: Fn(&[f64]) -> Result<Element<f64>> + Sync + ?Sized,
{
    if n + m < 2 {
        return Err(Error::Precondition(format!(
            "extension across a hole needs n + m ≥ 2, got n + m = {}",
            n + m
        )));
    }
    let geometry = KernelGeometry::new(alg, n, m)?;
    Ok(reproduce_with(&geometry, f, None, dom, x, cfg)?.value)
}

/// `∫_{∂B} ⟨w, ν⟩ dS` over the sphere of radius `radius` about `center`,
/// returned with its closed form `N · Vol(B_N) · radius^N`.
pub fn divergence_selftest(dim: usize, center: &[f64], radius: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    if center.len() != dim {
        return Err(Error::DimensionMismatch {
            what: "centre",
            expected: dim,
            found: center.len(),
        });
    }
    check_radius(radius)?;
    let rule = sphere_rule(dim, cfg.nodes, cfg.scheme, cfg.seed)?;
    let area_scale = radius.powi(dim as i32 - 1);
    let total = ordered_sum(rule.len(), 1, |i| {
        let nu = &rule.points[i];
        let flux: f64 = center.iter().zip(nu).map(|(c, v)| (c + radius * v) * v).sum();
        Ok(Element::from_coeffs(vec![flux * rule.weights[i] * area_scale]))
    })?;
    let exact = unit_sphere_area(dim) * radius.powi(dim as i32);
    Ok((total.coeffs()[0], exact))
}

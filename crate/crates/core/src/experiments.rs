//! Named verification runs producing machine-readable reports.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, Element};
use crate::error::{Error, Result};
use crate::kernels::KernelGeometry;
use crate::quadrature::{
    divergence_selftest, hartogs_extend, polydisk_reproduce, reproduce, reproduce_with, Domain, QuadratureConfig,
};
use crate::scalar::Scalar;
use crate::superspace::{PolyFunction, SuperPoint, Superspace, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    ReproduceDisk,
    ReproduceBall,
    Polydisk,
    Hartogs,
    KernelD2,
    DivergenceSelftest,
    Weierstrass,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::ReproduceDisk,
        Experiment::ReproduceBall,
        Experiment::Polydisk,
        Experiment::Hartogs,
        Experiment::KernelD2,
        Experiment::DivergenceSelftest,
        Experiment::Weierstrass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ReproduceDisk => "reproduce-disk",
            Experiment::ReproduceBall => "reproduce-ball",
            Experiment::Polydisk => "polydisk",
            Experiment::Hartogs => "hartogs",
            Experiment::KernelD2 => "kernel-d2",
            Experiment::DivergenceSelftest => "divergence-selftest",
            Experiment::Weierstrass => "weierstrass",
        }
    }

    /// Tolerance on `rel_err` used when none is given.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Experiment::ReproduceDisk | Experiment::Weierstrass => 1e-3,
            Experiment::Polydisk => 2e-2,
            Experiment::KernelD2 => 1e-6,
            Experiment::ReproduceBall | Experiment::Hartogs | Experiment::DivergenceSelftest => 1e-2,
        }
    }

    /// Boundary node budget used when none is given.
    pub fn default_nodes(self) -> usize {
        match self {
            Experiment::Polydisk => 100_000,
            Experiment::DivergenceSelftest => 1_000_000,
            _ => 4096,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown experiment {s:?}")))
    }
}

/// Settings shared by all experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub quadrature: QuadratureConfig,
    /// Ambient dimension for the divergence self-test.
    pub dim: usize,
    /// Finite-difference step for the kernel check.
    pub fd_step: f64,
    /// Sample points for the kernel check.
    pub samples: usize,
    /// Truncation order for the geometric-series run.
    pub series_terms: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            quadrature: QuadratureConfig::default(),
            dim: 2,
            fd_step: 1e-5,
            samples: 100,
            series_terms: 40,
        }
    }
}

/// Result of one run. Apart from `runtime_ms`, identical inputs give
/// byte-identical serializations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub algebra: String,
    pub nodes: usize,
    pub seed: u64,
    pub value: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<Vec<f64>>,
    pub abs_err: f64,
    pub rel_err: f64,
    pub runtime_ms: u64,
}

impl Report {
    pub fn passes(&self, tol: f64) -> bool {
        self.rel_err.is_finite() && self.rel_err <= tol
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The serialization with the timing field zeroed.
    pub fn canonical_json(&self) -> String {
        Report {
            runtime_ms: 0,
            ..self.clone()
        }
        .to_json()
    }
}

fn errors(value: &Element<f64>, oracle: &Element<f64>) -> (f64, f64) {
    let abs = value.distance(oracle);
    let norm = oracle.norm();
    (abs, if norm > 0.0 { abs / norm } else { abs })
}

/// The point `a·e₀ + b·e₁` of `Λ₀` (just `a·e₀` when `Λ₀ = ℝ`).
fn even_point<S: Scalar>(alg: &AlgebraSpec<S>, a: f64, b: f64) -> Vec<f64> {
    let mut v = vec![0.0; alg.p_plus_1()];
    v[0] = a;
    if v.len() > 1 {
        v[1] = b;
    }
    v
}

/// Runs an experiment over the given algebra.
pub fn run<S: Scalar>(exp: Experiment, alg: &AlgebraSpec<S>, cfg: &RunConfig) -> Result<Report> {
    cfg.quadrature.validate()?;
    let start = Instant::now();
    let (value, oracle) = match exp {
        Experiment::ReproduceDisk => reproduce_disk(alg, cfg)?,
        Experiment::ReproduceBall => reproduce_ball(alg, cfg)?,
        Experiment::Polydisk => polydisk(alg, cfg)?,
        Experiment::Hartogs => hartogs(alg, cfg)?,
        Experiment::KernelD2 => kernel_d2(alg, cfg)?,
        Experiment::DivergenceSelftest => {
            let (v, exact) = divergence_selftest(cfg.dim, &vec![0.0; cfg.dim], 1.0, &cfg.quadrature)?;
            (Element::from_coeffs(vec![v]), Some(Element::from_coeffs(vec![exact])))
        }
        Experiment::Weierstrass => weierstrass(alg, cfg)?,
    };
    let (abs_err, rel_err) = match &oracle {
        Some(o) => errors(&value, o),
        None => (value.norm(), value.norm()),
    };
    Ok(Report {
        experiment: exp.name().into(),
        algebra: alg.name().into(),
        nodes: cfg.quadrature.nodes,
        seed: cfg.quadrature.seed,
        value: value.into_coeffs(),
        oracle: oracle.map(Element::into_coeffs),
        abs_err,
        rel_err,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

type Outcome = (Element<f64>, Option<Element<f64>>);

/// `y²` on the unit ball of `Λ₀`, evaluated at `0.3e₀ + 0.1e₁`.
fn reproduce_disk<S: Scalar>(alg: &AlgebraSpec<S>, cfg: &RunConfig) -> Result<Outcome> {
    let space = Superspace::new(alg.clone(), 1, 0);
    let f = PolyFunction::coordinate_poly(&space, Var::Y(0))?.pow(2);
    let sf = space.to_f64();
    let x = SuperPoint::from_coords(&sf, even_point(alg, 0.3, 0.1))?;
    let r = reproduce(&f, &Domain::ball(&sf, &SuperPoint::zero(&sf), 1.0)?, &x, &cfg.quadrature)?;
    let oracle = f.to_f64().compile().eval(x.coords());
    Ok((r.value, Some(oracle)))
}

/// The non-qS function `y⁰e₀` on the unit ball at `0.2e₀`, volume term included.
fn reproduce_ball<S: Scalar>(alg: &AlgebraSpec<S>, cfg: &RunConfig) -> Result<Outcome> {
    let space = Superspace::new(alg.clone(), 1, 0);
    let f = PolyFunction::real_coordinate(&space, crate::superspace::Coord::Y { var: 0, comp: 0 })?;
    let sf = space.to_f64();
    let x = SuperPoint::from_coords(&sf, even_point(alg, 0.2, 0.0))?;
    let r = reproduce(&f, &Domain::ball(&sf, &SuperPoint::zero(&sf), 1.0)?, &x, &cfg.quadrature)?;
    let oracle = f.to_f64().compile().eval(x.coords());
    Ok((r.value, Some(oracle)))
}

/// The polydisk configuration used by the `polydisk` experiment: with odd
/// data, `f = y·Z(π₁θ)` on a small polydisk in one even and one odd
/// variable; otherwise `f = y₁y₂` on the unit bidisk.
pub struct PolydiskSetup<S> {
    pub f: PolyFunction<S>,
    pub domain: Domain,
    pub x: SuperPoint<f64>,
}

pub fn polydisk_setup<S: Scalar>(alg: &AlgebraSpec<S>) -> Result<PolydiskSetup<S>> {
    let p1 = alg.p_plus_1();
    if alg.q() > 0 && alg.a1().is_some() {
        let space = Superspace::new(alg.clone(), 1, 1);
        let y = PolyFunction::coordinate_poly(&space, Var::Y(0))?;
        let z = PolyFunction::z_projection(&space, 0, 0)?;
        let f = &y * &z;
        let sf = space.to_f64();
        let lead = alg.a1().map_or(0, |a| a.leading(0));
        let mut center = vec![0.0; sf.real_dim()];
        center[0] = 1.0;
        center[p1 + lead] = 1.0;
        let mut x = center.clone();
        x[0] += 0.05;
        if p1 > 1 {
            x[1] += 0.02;
        }
        x[p1] += 0.03;
        if alg.q() > 1 {
            x[p1 + 1] -= 0.02;
        }
        let center = SuperPoint::from_coords(&sf, center)?;
        let domain = Domain::polydisk(&sf, &center, &[0.25, 0.25])?;
        Ok(PolydiskSetup {
            f,
            domain,
            x: SuperPoint::from_coords(&sf, x)?,
        })
    } else {
        let space = Superspace::new(alg.clone(), 2, 0);
        let f = &PolyFunction::coordinate_poly(&space, Var::Y(0))? * &PolyFunction::coordinate_poly(&space, Var::Y(1))?;
        let sf = space.to_f64();
        let mut x = even_point(alg, 0.2, 0.0);
        x.extend(even_point(alg, 0.3, 0.1));
        let domain = Domain::polydisk(&sf, &SuperPoint::zero(&sf), &[1.0, 1.0])?;
        Ok(PolydiskSetup {
            f,
            domain,
            x: SuperPoint::from_coords(&sf, x)?,
        })
    }
}

fn polydisk<S: Scalar>(alg: &AlgebraSpec<S>, cfg: &RunConfig) -> Result<Outcome> {
    let setup = polydisk_setup(alg)?;
    let value = polydisk_reproduce(&setup.f, &setup.domain, &setup.x, &cfg.quadrature)?;
    let oracle = setup.f.to_f64().compile().eval(setup.x.coords());
    Ok((value, Some(oracle)))
}

/// `F₂` for `f = y₁²` in two even variables, from values on the unit sphere,
/// at `(0.4e₀ + 0.2e₁, 0)`.
fn hartogs<S: Scalar>(alg: &AlgebraSpec<S>, cfg: &RunConfig) -> Result<Outcome> {
    let space = Superspace::new(alg.clone(), 2, 0);
    let f = PolyFunction::coordinate_poly(&space, Var::Y(0))?.pow(2).to_f64().compile();
    let sf = space.to_f64();
    let mut x = even_point(alg, 0.4, 0.2);
    x.resize(sf.real_dim(), 0.0);
    let x = SuperPoint::from_coords(&sf, x)?;
    let dom = Domain::ball(&sf, &SuperPoint::zero(&sf), 1.0)?;
    let value = hartogs_extend(alg, 2, 0, &|w: &[f64]| Ok(f.eval(w)), &dom, &x, &cfg.quadrature)?;
    Ok((value, Some(f.eval(x.coords()))))
}

/// Largest relative finite-difference residual of `d″Ω` over random points,
/// for the kernels of one even variable and (with odd data) one odd variable.
pub fn kernel_closure_max<S: Scalar>(alg: &AlgebraSpec<S>, n: usize, m: usize, samples: usize, h: f64, seed: u64) -> Result<f64> {
    let geometry = KernelGeometry::new(alg, n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u: Vec<f64> = loop {
            let u: Vec<f64> = (0..geometry.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r > 0.2 {
                break u;
            }
        };
        let (res, scale) = geometry.closure_residual(&u, h)?;
        worst = worst.max(if scale > 0.0 { res / scale } else { res });
    }
    Ok(worst)
}

fn kernel_d2<S: Scalar>(alg: &AlgebraSpec<S>, cfg: &RunConfig) -> Result<Outcome> {
    let seed = cfg.quadrature.seed;
    let mut worst = kernel_closure_max(alg, 1, 0, cfg.samples, cfg.fd_step, seed)?;
    if alg.q() > 0 && alg.a1().is_some() {
        worst = worst.max(kernel_closure_max(alg, 0, 1, cfg.samples, cfg.fd_step, seed.wrapping_add(1))?);
    }
    Ok((Element::from_coeffs(vec![worst]), Some(Element::from_coeffs(vec![0.0]))))
}

/// `Σ_{j≤k} yʲ/2ʲ` evaluated by Horner's rule in the algebra.
pub fn geometric_partial_sum(alg: &AlgebraSpec<f64>, y: &Element<f64>, k: u32) -> Element<f64> {
    let half = y.scale(&0.5);
    let mut acc = alg.one();
    for _ in 0..k {
        acc = &alg.mul(&acc, &half) + &alg.one();
    }
    acc
}

/// The limit `2(2e₀ − y)⁻¹` of the partial sums.
pub fn geometric_limit(alg: &AlgebraSpec<f64>, y: &Element<f64>) -> Result<Element<f64>> {
    let d = &alg.one().scale(&2.0) - y;
    alg.inverse(&d)
        .map(|inv| inv.scale(&2.0))
        .ok_or(Error::Singular("2e₀ − y is not invertible"))
}

/// Reproduction of the `k`-th partial sum at `0.3e₀ + 0.1e₁` on the unit ball.
pub fn weierstrass_term<S: Scalar>(alg: &AlgebraSpec<S>, k: u32, cfg: &QuadratureConfig) -> Result<Element<f64>> {
    let geometry = KernelGeometry::new(alg, 1, 0)?;
    let af = alg.to_f64();
    let sf = geometry.space().clone();
    let x = SuperPoint::from_coords(&sf, even_point(alg, 0.3, 0.1))?;
    let f = |w: &[f64]| Ok(geometric_partial_sum(&af, &Element::from_coeffs(w.to_vec()), k));
    let dom = Domain::ball(&sf, &SuperPoint::zero(&sf), 1.0)?;
    Ok(reproduce_with(&geometry, &f, None, &dom, &x, cfg)?.value)
}

fn weierstrass<S: Scalar>(alg: &AlgebraSpec<S>, cfg: &RunConfig) -> Result<Outcome> {
    let value = weierstrass_term(alg, cfg.series_terms, &cfg.quadrature)?;
    let af = alg.to_f64();
    let x = Element::from_coeffs(even_point(alg, 0.3, 0.1));
    let mut full = vec![0.0; af.dim()];
    full[..x.dim()].copy_from_slice(x.coeffs());
    let oracle = geometric_limit(&af, &Element::from_coeffs(full))?;
    Ok((value, Some(oracle)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, example4, hyperbolic};
    use crate::quadrature::Scheme;

    fn cfg(scheme: Scheme, nodes: usize) -> RunConfig {
        RunConfig {
            quadrature: QuadratureConfig {
                scheme,
                nodes,
                ..QuadratureConfig::default()
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn disk_report() {
        let r = run(Experiment::ReproduceDisk, &complex(), &cfg(Scheme::Tensor, 4096)).unwrap();
        assert!(r.passes(1e-3));
        let o = r.oracle.clone().unwrap();
        assert!((o[0] - 0.08).abs() < 1e-15 && (o[1] - 0.06).abs() < 1e-15);
        let json = r.to_json();
        let keys: Vec<&str> = ["experiment", "algebra", "nodes", "seed", "value", "oracle", "abs_err", "rel_err", "runtime_ms"].into();
        let mut last = 0;
        for k in keys {
            let at = json.find(&format!("\"{k}\"")).unwrap();
            assert!(at >= last);
            last = at;
        }
    }

    #[test]
    fn hyperbolic_fails_the_even_condition() {
        match run(Experiment::ReproduceDisk, &hyperbolic(), &cfg(Scheme::Tensor, 64)) {
            Err(Error::ConditionFailed { sum, .. }) => assert_eq!(sum, "2e₀"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn corrected_ball_and_hartogs() {
        let r = run(Experiment::ReproduceBall, &complex(), &cfg(Scheme::Tensor, 4096)).unwrap();
        assert!(r.passes(1e-2), "{r:?}");
        let r = run(Experiment::Hartogs, &complex(), &cfg(Scheme::Tensor, 4096)).unwrap();
        assert!(r.passes(1e-2), "{r:?}");
    }

    #[test]
    fn kernel_and_divergence() {
        let r = run(Experiment::KernelD2, &example4(), &cfg(Scheme::Tensor, 1)).unwrap();
        assert!(r.passes(1e-6), "{r:?}");
        let c = RunConfig {
            dim: 6,
            ..cfg(Scheme::MonteCarlo, 100_000)
        };
        assert!(run(Experiment::DivergenceSelftest, &complex(), &c).unwrap().passes(1e-2));
    }

    #[test]
    fn geometric_series() {
        let r = run(Experiment::Weierstrass, &complex(), &cfg(Scheme::Tensor, 1024)).unwrap();
        assert!(r.passes(1e-9), "{r:?}");
        let alg = complex().to_f64();
        let y = Element::from_coeffs(vec![0.5, 0.5]);
        let lim = geometric_limit(&alg, &y).unwrap();
        let errs: Vec<f64> = (1..6).map(|k| geometric_partial_sum(&alg, &y, k).distance(&lim)).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn polydisk_runs_are_reproducible() {
        let c = cfg(Scheme::MonteCarlo, 10_000);
        let a = run(Experiment::Polydisk, &example4(), &c).unwrap();
        let b = run(Experiment::Polydisk, &example4(), &c).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        assert!(a.passes(2e-2), "{a:?}");
    }
}

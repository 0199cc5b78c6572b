//! Closed-form fundamental solutions of `d″` and their boundary densities.
//!
//! On a superspace with `N = n(p+1) + qm` real coordinates, write `σ_c` for
//! the sign `(−1)^{pos(c)}` of the hatted form `dx̂_c` (with `pos` the 0-based
//! place of `c` in the global coordinate order). The kernel is the
//! `(N−1)`-form
//!
//! ```text
//! Ω(u) = c_N Σ_{c non-leading} σ_c (u_c e₀ + u_ℓ(c) m_c) / ‖u‖^N  dx̂_c  + (dx̂_ℓ terms),
//! c_N  = −1 / (N · Vol(B_N)),
//! ```
//!
//! which is `d″`-closed off the origin as soon as (A₀) holds on the even
//! blocks and (A₁) on the odd ones. Paired with an outward unit normal `ν`,
//! the form becomes the surface density
//!
//! ```text
//! K(w, x) = Σ_c (u_c e₀ + u_ℓ m_c)(ν_c − m_c ν_ℓ) / (N · Vol(B_N) · ‖u‖^N),   u = w − x,
//! ```
//!
//! which includes the contribution of the leading differentials `dx̂_ℓ`. The
//! overall orientation is the one for which Stokes' theorem holds with
//! outward normals; `quadrature`'s divergence and reproduction tests pin it.

use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::algebra::{check_a0, check_a1, AlgebraSpec, Element};
use crate::cr_operator::sampled_partial;
use crate::error::{Condition, Error, Result};
use crate::scalar::Scalar;
use crate::superspace::{Coord, PolyFunction, SuperPoint, Superspace};

/// Volume of the unit ball in `ℝ^dim`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    let d = dim as f64;
    std::f64::consts::PI.powf(d / 2.0) / gamma(d / 2.0 + 1.0)
}

/// Area of the unit sphere `S^{dim−1} ⊂ ℝ^dim`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

/// Which of the closed forms a density specialises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// `n = 1`, `m = 0`.
    Omega0,
    /// `n = 0`, `m = 1`.
    Omega1,
    General,
}

/// Verifies (A₀) (when `n ≥ 1`) and (A₁) (when `m ≥ 1`).
pub fn require_conditions<S: Scalar>(alg: &AlgebraSpec<S>, n: usize, m: usize) -> Result<()> {
    if n >= 1 {
        let a0 = check_a0(alg);
        if !a0.holds {
            return Err(Error::ConditionFailed {
                condition: Condition::A0,
                sum: alg.format_element(&a0.sum),
            });
        }
    }
    if m >= 1 {
        let a1 = check_a1(alg)?;
        if !a1.holds {
            let bad = a1
                .block_sums
                .iter()
                .chain(&a1.relation_residuals)
                .find(|e| !e.is_zero())
                .cloned()
                .unwrap_or_else(|| alg.zero());
            return Err(Error::ConditionFailed {
                condition: Condition::A1,
                sum: alg.format_element(&bad),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
struct NonLeading {
    coord: Coord,
    index: usize,
    lead: usize,
    m: Element<f64>,
    m_sq: Element<f64>,
    sign: f64,
}

/// Precomputed structure of the kernel on one superspace.
#[derive(Clone, Debug)]
pub struct KernelGeometry {
    space: Arc<Superspace<f64>>,
    dim: usize,
    vol: f64,
    nonleading: Vec<NonLeading>,
}

impl KernelGeometry {
    /// Fails with [`Error::ConditionFailed`] unless the conditions hold.
    pub fn new<S: Scalar>(alg: &AlgebraSpec<S>, n: usize, m: usize) -> Result<Self> {
        if n + m == 0 {
            return Err(Error::Precondition("the superspace has no variables".into()));
        }
        require_conditions(alg, n, m)?;
        let space = Superspace::new(alg.to_f64(), n, m);
        let dim = space.real_dim();
        let mut nonleading = Vec::new();
        for (index, coord) in space.coords().enumerate() {
            if let Some((lead, mult)) = space.leading_of(coord)? {
                nonleading.push(NonLeading {
                    coord,
                    index,
                    lead: space.index(lead)?,
                    m_sq: space.algebra().square(&mult),
                    m: mult,
                    sign: if index % 2 == 0 { 1.0 } else { -1.0 },
                });
            }
        }
        Ok(KernelGeometry {
            vol: unit_ball_volume(dim),
            space,
            dim,
            nonleading,
        })
    }

    pub fn space(&self) -> &Arc<Superspace<f64>> {
        &self.space
    }

    pub fn algebra(&self) -> &AlgebraSpec<f64> {
        self.space.algebra()
    }

    /// `N`, the real dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flavor(&self) -> Flavor {
        match (self.space.n(), self.space.m()) {
            (1, 0) => Flavor::Omega0,
            (0, 1) => Flavor::Omega1,
            _ => Flavor::General,
        }
    }

    /// `c_N = −1/(N·Vol(B_N))`.
    pub fn normalization(&self) -> f64 {
        -1.0 / (self.dim as f64 * self.vol)
    }

    fn check_len(&self, v: &[f64], what: &'static str) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    fn numerator(&self, nl: &NonLeading, u: &[f64]) -> Element<f64> {
        let mut coeffs = nl.m.scale(&u[nl.lead]).into_coeffs();
        coeffs[0] += u[nl.index];
        Element::from_coeffs(coeffs)
    }

    /// Coefficients of `Ω(u)` on `dx̂_c` for every non-leading `c`.
    pub fn coefficients(&self, u: &[f64]) -> Result<Vec<(Coord, Element<f64>)>> {
        self.check_len(u, "kernel argument")?;
        let r2: f64 = u.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Err(Error::Singular("the kernel is singular at the origin"));
        }
        let scale = self.normalization() / r2.powf(self.dim as f64 / 2.0);
        Ok(self
            .nonleading
            .iter()
            .map(|nl| (nl.coord, self.numerator(nl, u).scale(&(scale * nl.sign))))
            .collect())
    }

    /// Surface density of the kernel at `u = w − x` against the outward unit
    /// normal `normal`.
    pub fn density(&self, u: &[f64], normal: &[f64]) -> Result<Element<f64>> {
        self.check_len(u, "kernel argument")?;
        self.check_len(normal, "normal")?;
        let r2: f64 = u.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Err(Error::Singular("boundary point coincides with the target"));
        }
        let mut out = vec![0.0; self.algebra().dim()];
        for nl in &self.nonleading {
            let (c, l) = (nl.index, nl.lead);
            out[0] += u[c] * normal[c];
            let cross = u[l] * normal[c] - u[c] * normal[l];
            let diag = -u[l] * normal[l];
            for ((o, m), m2) in out.iter_mut().zip(nl.m.coeffs()).zip(nl.m_sq.coeffs()) {
                *o += cross * m + diag * m2;
            }
        }
        let scale = 1.0 / (self.dim as f64 * self.vol * r2.powf(self.dim as f64 / 2.0));
        Ok(Element::from_coeffs(out).scale(&scale))
    }

    /// Volume integrand of the correction term: `Σ_c g_c (u_c e₀ + u_ℓ m_c)`
    /// over `N·Vol(B_N)·‖u‖^N`, where `g_c` are the components of `d″f`
    /// listed in the order of [`KernelGeometry::nonleading_coords`].
    pub fn volume_density(&self, u: &[f64], d2f: &[Element<f64>]) -> Result<Element<f64>> {
        self.check_len(u, "kernel argument")?;
        if d2f.len() != self.nonleading.len() {
            return Err(Error::DimensionMismatch {
                what: "d″ components",
                expected: self.nonleading.len(),
                found: d2f.len(),
            });
        }
        let r2: f64 = u.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Err(Error::Singular("volume kernel evaluated at its pole"));
        }
        let alg = self.algebra();
        let mut out = alg.zero();
        for (nl, g) in self.nonleading.iter().zip(d2f) {
            out = &out + &alg.mul(g, &self.numerator(nl, u));
        }
        let scale = 1.0 / (self.dim as f64 * self.vol * r2.powf(self.dim as f64 / 2.0));
        Ok(out.scale(&scale))
    }

    pub fn nonleading_coords(&self) -> Vec<Coord> {
        self.nonleading.iter().map(|nl| nl.coord).collect()
    }

    /// Finite-difference `d″Ω` at `u`: the top-degree coefficient
    /// `Σ_c σ_c (∂_c Ω_c − m_c ∂_ℓ Ω_c)` together with the magnitude of the
    /// terms it sums, so that `residual / scale` is a relative residual.
    pub fn closure_residual(&self, u: &[f64], h: f64) -> Result<(f64, f64)> {
        self.check_len(u, "kernel argument")?;
        let alg = self.algebra();
        let mut total = alg.zero();
        let mut scale = 0.0;
        for (k, nl) in self.nonleading.iter().enumerate() {
            let coeff = |v: &[f64]| -> Result<Element<f64>> { Ok(self.coefficients(v)?.swap_remove(k).1) };
            let dc = sampled_partial(&coeff, u, nl.index, h)?.scale(&nl.sign);
            let dl = alg.mul(&nl.m, &sampled_partial(&coeff, u, nl.lead, h)?).scale(&nl.sign);
            scale += dc.norm() + dl.norm();
            total = &total + &(&dc - &dl);
        }
        Ok((total.norm(), scale))
    }
}

/// The boundary density `K(w, x)` for a fixed target point `x`.
#[derive(Clone, Debug)]
pub struct KernelDensity {
    geometry: Arc<KernelGeometry>,
    x: Vec<f64>,
}

impl KernelDensity {
    pub fn new<S: Scalar>(alg: &AlgebraSpec<S>, n: usize, m: usize, x: &SuperPoint<f64>) -> Result<Self> {
        let geometry = Arc::new(KernelGeometry::new(alg, n, m)?);
        Self::with_geometry(geometry, x.coords().to_vec())
    }

    pub fn with_geometry(geometry: Arc<KernelGeometry>, x: Vec<f64>) -> Result<Self> {
        geometry.check_len(&x, "target point")?;
        Ok(KernelDensity { geometry, x })
    }

    pub fn geometry(&self) -> &Arc<KernelGeometry> {
        &self.geometry
    }

    pub fn flavor(&self) -> Flavor {
        self.geometry.flavor()
    }

    pub fn target(&self) -> &[f64] {
        &self.x
    }

    /// `K(w, x)` against surface measure at `w` with outward normal `normal`.
    pub fn density(&self, w: &[f64], normal: &[f64]) -> Result<Element<f64>> {
        self.geometry.check_len(w, "boundary point")?;
        let u: Vec<f64> = w.iter().zip(&self.x).map(|(a, b)| a - b).collect();
        self.geometry.density(&u, normal)
    }

    /// The component of `K` of degree zero in `dx`. The kernel carries no
    /// `dx` differentials, so this coincides with [`KernelDensity::density`].
    pub fn kernel_bidegree_0(&self, w: &[f64], normal: &[f64]) -> Result<Element<f64>> {
        self.density(w, normal)
    }
}

/// Kernel coefficients `(j, Ω₀_j)` on `dx̂_j`, `j = 1..=p`, for a point of `Λ₀`.
pub fn omega0_coefficients<S: Scalar>(alg: &AlgebraSpec<S>, x: &[f64]) -> Result<Vec<(usize, Element<f64>)>> {
    let g = KernelGeometry::new(alg, 1, 0)?;
    Ok(g.coefficients(x)?
        .into_iter()
        .map(|(c, e)| match c {
            Coord::Y { comp, .. } => (comp, e),
            Coord::Theta { .. } => unreachable!("no odd variables"),
        })
        .collect())
}

/// Kernel coefficients `(t, Ω₁_t)` on `dθ̂ᵗ` (1-based `t`) for every
/// non-leading odd component.
pub fn omega1_coefficients<S: Scalar>(alg: &AlgebraSpec<S>, theta: &[f64]) -> Result<Vec<(usize, Element<f64>)>> {
    let g = KernelGeometry::new(alg, 0, 1)?;
    Ok(g.coefficients(theta)?
        .into_iter()
        .map(|(c, e)| match c {
            Coord::Theta { comp, .. } => (comp + 1, e),
            Coord::Y { .. } => unreachable!("no even variables"),
        })
        .collect())
}

/// Kernel coefficients of `Ω` on `ℝ_Λ^{n,m}` for every non-leading coordinate.
pub fn omega_general<S: Scalar>(alg: &AlgebraSpec<S>, n: usize, m: usize, x: &[f64]) -> Result<Vec<(Coord, Element<f64>)>> {
    KernelGeometry::new(alg, n, m)?.coefficients(x)
}

/// Numerator `A` of the `Λ₀` kernel with normalising element `b`:
/// the components `A_j = σ_j (x_j b + x_0 e_j b)` on `dx̂_j`, together with
/// the polynomial `d″A = Σ_j σ_j (∂_j A_j − e_j ∂_0 A_j)`.
///
/// Under (A₀), `d″A = (p+1) b`; integrated over the unit ball this is
/// invertible only when `b` is.
pub fn omega0_numerator<S: Scalar>(
    alg: &AlgebraSpec<S>,
    b: &Element<S>,
) -> Result<(Vec<(Coord, PolyFunction<S>)>, PolyFunction<S>)> {
    let space = Superspace::new(alg.clone(), 1, 0);
    let lead = Coord::Y { var: 0, comp: 0 };
    let x0 = PolyFunction::real_coordinate(&space, lead)?;
    let mut components = Vec::new();
    let mut d2a = PolyFunction::zero(&space);
    for comp in 1..alg.p_plus_1() {
        let c = Coord::Y { var: 0, comp };
        let sign = if comp % 2 == 0 { S::one() } else { -S::one() };
        let ej = alg.basis(comp);
        let xj = PolyFunction::real_coordinate(&space, c)?;
        let a = (&xj.mul_element_right(b) + &x0.mul_element_right(&alg.mul(&ej, b))).scale(&sign);
        let d = &a.partial(c)? - &a.partial(lead)?.mul_element_left(&ej);
        d2a = &d2a + &d.scale(&sign);
        components.push((c, a));
    }
    Ok((components, d2a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{complex, example4, hyperbolic};
    use crate::scalar::Rational;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-13);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-13);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, max_relative = 1e-13);
        assert_relative_eq!(unit_sphere_area(6), PI.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn omega0_on_complex_at_one() {
        let c = omega0_coefficients(&complex(), &[1.0, 0.0]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].0, 1);
        assert!(c[0].1.distance(&Element::from_coeffs(vec![0.0, 1.0 / (2.0 * PI)])) < 1e-15);
    }

    #[test]
    fn omega0_scaling() {
        let alg = example4();
        let x = [0.3, -0.2, 0.5, 0.1, -0.7, 0.4];
        let t = 2.5;
        let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
        let (a, b) = (omega0_coefficients(&alg, &x).unwrap(), omega0_coefficients(&alg, &tx).unwrap());
        for ((_, ea), (_, eb)) in a.iter().zip(&b) {
            assert!(eb.distance(&ea.scale(&t.powi(-5))) < 1e-14);
        }
    }

    #[test]
    fn omega1_on_example4() {
        let c = omega1_coefficients(&example4(), &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let v4 = PI * PI / 2.0;
        let expected = example4().to_f64().basis(1).scale(&(1.0 / (4.0 * v4)));
        assert_eq!(c.iter().map(|(t, _)| *t).collect::<Vec<_>>(), vec![2, 4]);
        assert!(c[0].1.distance(&expected) < 1e-15);
        assert!(c[1].1.norm() < 1e-15);
    }

    #[test]
    fn specialisations_agree() {
        let alg = example4();
        let x = [0.3, -0.2, 0.5, 0.1, -0.7, 0.4];
        let general = omega_general(&alg, 1, 0, &x).unwrap();
        let special = omega0_coefficients(&alg, &x).unwrap();
        for ((_, a), (_, b)) in general.iter().zip(&special) {
            assert_eq!(a, b);
        }
        let th = [0.3, -0.2, 0.5, 0.1];
        let general = omega_general(&alg, 0, 1, &th).unwrap();
        let special = omega1_coefficients(&alg, &th).unwrap();
        for ((_, a), (_, b)) in general.iter().zip(&special) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn homogeneity_of_general_kernel() {
        let alg = complex();
        let x = [0.3, -0.2, 0.5, 0.1];
        let t = 1.7;
        let tx: Vec<f64> = x.iter().map(|v| v * t).collect();
        let a = omega_general(&alg, 2, 0, &x).unwrap();
        let b = omega_general(&alg, 2, 0, &tx).unwrap();
        for ((_, ea), (_, eb)) in a.iter().zip(&b) {
            assert!(eb.distance(&ea.scale(&t.powi(-3))) < 1e-14);
        }
    }

    #[test]
    fn conditions_are_enforced() {
        let err = KernelGeometry::new(&hyperbolic(), 1, 0).unwrap_err();
        match err {
            Error::ConditionFailed { condition, sum } => {
                assert_eq!(condition, Condition::A0);
                assert_eq!(sum, "2e₀");
            }
            other => panic!("unexpected {other}"),
        }
        assert!(omega0_coefficients(&complex(), &[0.0, 0.0]).is_err());
    }

    #[test]
    fn closedness_off_the_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (alg, n, m) in [(complex(), 1, 0), (example4(), 1, 0), (example4(), 0, 1), (complex(), 2, 0), (example4(), 1, 1)] {
            let g = KernelGeometry::new(&alg, n, m).unwrap();
            for _ in 0..20 {
                let u: Vec<f64> = (0..g.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let (res, scale) = g.closure_residual(&u, 1e-5).unwrap();
                assert!(res < 1e-6 * scale, "{} n={n} m={m}: {res} vs {scale}", alg.name());
            }
        }
    }

    #[test]
    fn density_is_translation_invariant() {
        let alg = complex();
        let x = SuperPoint::from_coords(&Superspace::new(alg.to_f64(), 1, 0), vec![0.1, 0.2]).unwrap();
        let k = KernelDensity::new(&alg, 1, 0, &x).unwrap();
        let shifted = SuperPoint::from_coords(&Superspace::new(alg.to_f64(), 1, 0), vec![1.1, -0.8]).unwrap();
        let ks = KernelDensity::new(&alg, 1, 0, &shifted).unwrap();
        let nu = [0.6, 0.8];
        let a = k.density(&[0.7, 1.0], &nu).unwrap();
        let b = ks.density(&[1.7, 0.0], &nu).unwrap();
        assert!(a.distance(&b) < 1e-15);
        assert_eq!(k.kernel_bidegree_0(&[0.7, 1.0], &nu).unwrap(), a);
    }

    #[test]
    fn density_matches_cauchy_kernel() {
        // On the circle, f(x) = (1/2π) ∮ f(w) ν conj(w − x)/|w − x|² ds.
        let alg = complex();
        let g = KernelGeometry::new(&alg, 1, 0).unwrap();
        let (w, x) = ([0.6f64, 0.8], [0.3f64, 0.1]);
        let u = [w[0] - x[0], w[1] - x[1]];
        let d = g.density(&u, &w).unwrap();
        let r2 = u[0] * u[0] + u[1] * u[1];
        let re = (w[0] * u[0] + w[1] * u[1]) / (2.0 * PI * r2);
        let im = (w[1] * u[0] - w[0] * u[1]) / (2.0 * PI * r2);
        assert!(d.distance(&Element::from_coeffs(vec![re, im])) < 1e-15);
    }

    #[test]
    fn density_decay() {
        let alg = example4();
        let g = KernelGeometry::new(&alg, 1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let u: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nu: Vec<f64> = {
                let v: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                v.iter().map(|a| a / r).collect()
            };
            let r = u.iter().map(|a| a * a).sum::<f64>().sqrt();
            worst = worst.max(g.density(&u, &nu).unwrap().norm() * r.powi(5));
        }
        assert!(worst < 10.0);
    }

    #[test]
    fn numerator_integral_constant() {
        let alg = complex();
        let (components, d2a) = omega0_numerator(&alg, &alg.one()).unwrap();
        assert_eq!(components.len(), 1);
        assert_eq!(d2a, PolyFunction::constant(d2a.space(), alg.one().scale(&Rational::from_i64(2))));
        let e4 = example4();
        let (_, d2a) = omega0_numerator(&e4, &e4.basis(2)).unwrap();
        assert_eq!(d2a, PolyFunction::constant(d2a.space(), e4.basis(2).scale(&Rational::from_i64(6))));
    }
}

//! The `γ`-equivariant volume density `f` built from the radial cut-off `ψ`
//! and extended to `ℂⁿ∖{0}` by orbit reduction into a fundamental domain.

use num_complex::Complex64;
use rand::Rng;

use crate::calculus::LogDensity;
use crate::error::{Error, Result};
use crate::normal_form::{ContractionCertificate, NormalFormMap, SphereSamplerConfig};
use crate::poly::CompiledPolys;
use crate::sampling::{counter_rng, gaussian_sphere_point, norm_sqr, stream, Point};

pub const DEFAULT_C: f64 = 0.8;
pub const DEFAULT_OUTER_RADIUS: f64 = 1.05;
pub const ORBIT_CAP: usize = 10_000;

/// Smooth step `g(t) = φ(t) / (φ(t) + φ(1−t))`, `φ(t) = e^{−1/t}` for `t > 0`.
///
/// Evaluated as the logistic `1 / (1 + e^{1/t − 1/(1−t)})` on `(0,1)`.
pub fn bump_g(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let s = 1.0 / t - 1.0 / (1.0 - t);
    1.0 / (1.0 + s.exp())
}

/// `(g, g′, g″)` in closed form.
pub fn bump_g_derivatives(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let u = 1.0 - t;
    let s = 1.0 / t - 1.0 / u;
    let ds = -1.0 / (t * t) - 1.0 / (u * u);
    let dds = 2.0 / (t * t * t) - 2.0 / (u * u * u);
    let g = 1.0 / (1.0 + s.exp());
    // g(1 − g) without cancellation
    let e = (-s.abs()).exp();
    let q = e / ((1.0 + e) * (1.0 + e));
    if q == 0.0 {
        return (g, 0.0, 0.0);
    }
    let dg = -q * ds;
    let ddg = -dg * (1.0 - 2.0 * g) * ds - q * dds;
    (g, dg, ddg)
}

/// `ψ(z) = v − g((|z|² − c²)/(1 − c²))` with `(v − 1)/v = |μ_1⋯μ_n|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffProfile {
    c: f64,
    v: f64,
    mu_det_sq: f64,
}

impl CutoffProfile {
    pub fn new(c: f64, mu_det_sq: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidParameter(format!("c must lie in (0,1), got {c}")));
        }
        if !(mu_det_sq > 0.0 && mu_det_sq < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|det μ|² must lie in (0,1), got {mu_det_sq}"
            )));
        }
        Ok(CutoffProfile {
            c,
            v: 1.0 / (1.0 - mu_det_sq),
            mu_det_sq,
        })
    }

    /// Profile with an arbitrary `v`; only for negative controls.
    pub fn with_v_unchecked(c: f64, mu_det_sq: f64, v: f64) -> Self {
        CutoffProfile { c, v, mu_det_sq }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn mu_det_sq(&self) -> f64 {
        self.mu_det_sq
    }

    fn transition(&self, r: f64) -> f64 {
        let c2 = self.c * self.c;
        (r - c2) / (1.0 - c2)
    }

    /// `ψ` as a function of `r = |z|²`.
    pub fn psi_r(&self, r: f64) -> f64 {
        self.v - bump_g(self.transition(r))
    }

    pub fn psi(&self, z: &[Complex64]) -> f64 {
        self.psi_r(norm_sqr(z))
    }

    /// `(u, u′, u″)` for `u(r) = log ψ(r)`, derivatives in `r = |z|²`.
    pub fn log_psi_derivatives(&self, r: f64) -> (f64, f64, f64) {
        let a = 1.0 / (1.0 - self.c * self.c);
        let (g, dg, ddg) = bump_g_derivatives(self.transition(r));
        let psi = self.v - g;
        let d1 = -dg * a / psi;
        let d2 = -ddg * a * a / psi - d1 * d1;
        (psi.ln(), d1, d2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    /// `|z| > R`: reduce by applying `γ`.
    OutsideBeyond,
    /// `z ∈ γ(B(0,R))`: reduce by applying `γ⁻¹`.
    OutsideWithin,
}

/// Certified shell: `sup_{|z| = R} |γ(z)| < c`, which places
/// `Γ(c) = {c ≤ |z| ≤ 1}` inside `D = B̄(0,R) ∖ γ(B(0,R))`.
#[derive(Clone, Debug)]
pub struct ShellSpec {
    c: f64,
    outer_radius: f64,
    map: NormalFormMap,
    forward: CompiledPolys,
    inverse: CompiledPolys,
    certificate: ContractionCertificate,
}

impl ShellSpec {
    pub fn certify(map: &NormalFormMap, c: f64, outer_radius: f64, cfg: &SphereSamplerConfig) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidParameter(format!("c must lie in (0,1), got {c}")));
        }
        if !(outer_radius > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "outer radius must exceed 1, got {outer_radius}"
            )));
        }
        let certificate = map.contraction_sup(outer_radius, cfg);
        if !(certificate.sup_estimate < c) {
            return Err(Error::NotCertified {
                radius: outer_radius,
                sup: certificate.sup_estimate,
                c,
            });
        }
        Ok(ShellSpec {
            c,
            outer_radius,
            map: map.clone(),
            forward: map.compiled(),
            inverse: CompiledPolys::from_map(&map.invert()?),
            certificate,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn map(&self) -> &NormalFormMap {
        &self.map
    }

    pub fn certificate(&self) -> &ContractionCertificate {
        &self.certificate
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn membership(&self, z: &[Complex64]) -> Membership {
        self.membership_for_radius(z, self.outer_radius)
    }

    fn membership_for_radius(&self, z: &[Complex64], radius: f64) -> Membership {
        let r2 = radius * radius;
        if norm_sqr(z) > r2 {
            return Membership::OutsideBeyond;
        }
        let mut pre = Point::from_elem(Complex64::new(0.0, 0.0), z.len());
        self.inverse.eval_into(z, &mut pre);
        if norm_sqr(&pre) < r2 {
            Membership::OutsideWithin
        } else {
            Membership::Inside
        }
    }

    /// Finds `(w, k)` with `z = γᵏ(w)` and `w` in the fundamental domain of
    /// outer radius `radius`.
    pub fn reduce_with_radius(&self, z: &[Complex64], radius: f64) -> Result<(Point, i64)> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        let mut w = Point::from_slice(z);
        let mut next = Point::from_elem(Complex64::new(0.0, 0.0), z.len());
        let mut k = 0i64;
        let r2 = radius * radius;
        for _ in 0..ORBIT_CAP {
            if norm_sqr(&w) > r2 {
                self.forward.eval_into(&w, &mut next);
                std::mem::swap(&mut w, &mut next);
                k -= 1;
                continue;
            }
            self.inverse.eval_into(&w, &mut next);
            if norm_sqr(&next) < r2 {
                std::mem::swap(&mut w, &mut next);
                k += 1;
                continue;
            }
            return Ok((w, k));
        }
        Err(Error::OrbitCap {
            cap: ORBIT_CAP,
            norm: norm_sqr(z).sqrt(),
        })
    }

    pub fn reduce(&self, z: &[Complex64]) -> Result<(Point, i64)> {
        self.reduce_with_radius(z, self.outer_radius)
    }
}

/// `f(γᵏ(w)) = |μ_1⋯μ_n|^{−2k} ψ(w)` for `w ∈ D`.
#[derive(Clone, Debug)]
pub struct EquivariantVolume {
    profile: CutoffProfile,
    shell: ShellSpec,
}

impl EquivariantVolume {
    pub fn new(map: &NormalFormMap, c: f64, outer_radius: f64) -> Result<Self> {
        Self::with_sampler(map, c, outer_radius, &SphereSamplerConfig::default())
    }

    pub fn with_sampler(
        map: &NormalFormMap,
        c: f64,
        outer_radius: f64,
        cfg: &SphereSamplerConfig,
    ) -> Result<Self> {
        let shell = ShellSpec::certify(map, c, outer_radius, cfg)?;
        let profile = CutoffProfile::new(c, map.eigenvalues().det_modulus_sq())?;
        Ok(EquivariantVolume { profile, shell })
    }

    pub fn from_parts(profile: CutoffProfile, shell: ShellSpec) -> Self {
        EquivariantVolume { profile, shell }
    }

    pub fn profile(&self) -> &CutoffProfile {
        &self.profile
    }

    pub fn shell(&self) -> &ShellSpec {
        &self.shell
    }

    pub fn map(&self) -> &NormalFormMap {
        &self.shell.map
    }

    pub fn c(&self) -> f64 {
        self.shell.c
    }

    pub fn dim(&self) -> usize {
        self.shell.dim()
    }

    fn value_from(&self, w: &[Complex64], k: i64) -> f64 {
        self.profile.psi(w) * self.profile.mu_det_sq.powi(-(k as i32))
    }

    /// `(f(z), k)` where `γ^{−k}(z) ∈ D`.
    pub fn eval(&self, z: &[Complex64]) -> Result<(f64, i64)> {
        let (w, k) = self.shell.reduce(z)?;
        Ok((self.value_from(&w, k), k))
    }

    /// Same density evaluated through the fundamental domain of outer
    /// radius `radius` instead of `R`.
    pub fn eval_with_radius(&self, z: &[Complex64], radius: f64) -> Result<(f64, i64)> {
        let (w, k) = self.shell.reduce_with_radius(z, radius)?;
        Ok((self.value_from(&w, k), k))
    }
}

impl LogDensity for EquivariantVolume {
    fn dim(&self) -> usize {
        self.shell.dim()
    }

    fn log_density(&self, z: &[Complex64]) -> Result<f64> {
        let (w, k) = self.shell.reduce(z)?;
        Ok(self.profile.psi(&w).ln() - k as f64 * self.profile.mu_det_sq.ln())
    }
}

/// Maximum relative violation of `f(γ(z))·|μ_1⋯μ_n|² = f(z)`.
///
/// `f(γ(z))` is reduced through the domain of outer radius `R`, `f(z)`
/// through the domain of outer radius `(1 + R)/2`; the two agree only if
/// `ψ` glues correctly across the domain boundary. Radii are log-uniform
/// in `[c·|μ_1|, 2R]`.
pub fn equivariance_residual(vol: &EquivariantVolume, samples: usize, seed: u64) -> Result<f64> {
    let n = vol.dim();
    let map = vol.map();
    let forward = map.compiled();
    let det = vol.profile.mu_det_sq;
    let lo = (vol.c() * map.eigenvalues().get(0).norm()).ln();
    let hi = (2.0 * vol.shell.outer_radius).ln();
    let alt_radius = 0.5 * (1.0 + vol.shell.outer_radius);
    let mut rng = counter_rng(seed, stream::RESIDUAL);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let radius = (lo + (hi - lo) * rng.random::<f64>()).exp();
        let z = gaussian_sphere_point(&mut rng, n, radius);
        let gz = forward.eval(&z);
        let (fgz, _) = vol.eval(&gz)?;
        let (fz, _) = vol.eval_with_radius(&z, alt_radius)?;
        worst = worst.max((fgz * det - fz).abs() / fz);
    }
    Ok(worst)
}

/// Compactly supported, non-radial bump used to perturb the volume:
/// `h(z) = B(|z − z₀|²/w²)·(1/2 + Re⟨z − z₀, a⟩/w)` with
/// `B(s) = exp(1 − 1/(1 − s))` on `s < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec {
    pub center: Vec<Complex64>,
    pub width: f64,
    /// Unit vector for the linear tilt.
    pub tilt: Vec<Complex64>,
}

impl BumpSpec {
    /// Bump centred in the middle of the shell `Γ(c)`, away from any axis.
    pub fn default_for(n: usize, c: f64) -> Self {
        let radius = 0.5 * (1.0 + c);
        let scale = radius / (n as f64).sqrt();
        let center = (0..n)
            .map(|k| Complex64::from_polar(scale, 0.9 * k as f64 + 0.3))
            .collect();
        let mut tilt = vec![Complex64::new(0.0, 0.0); n];
        tilt[0] = Complex64::new(1.0, 0.0);
        BumpSpec {
            center,
            width: 0.45 * (1.0 - c),
            tilt,
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> f64 {
        let mut d2 = 0.0;
        let mut lin = 0.0;
        for ((zi, ci), ai) in z.iter().zip(&self.center).zip(&self.tilt) {
            let d = zi - ci;
            d2 += d.norm_sqr();
            lin += (d * ai.conj()).re;
        }
        let s = d2 / (self.width * self.width);
        if s >= 1.0 {
            return 0.0;
        }
        (1.0 - 1.0 / (1.0 - s)).exp() * (0.5 + lin / self.width)
    }
}

/// `f′ = f·(1 + ε h)` with `h` extended by `h(γᵏ z) = h(z)`.
#[derive(Clone, Debug)]
pub struct PerturbedVolume {
    base: EquivariantVolume,
    amplitude: f64,
    bump: BumpSpec,
}

pub fn equivariant_perturbation(
    vol: &EquivariantVolume,
    amplitude: f64,
    bump: BumpSpec,
) -> Result<PerturbedVolume> {
    let n = vol.dim();
    if bump.center.len() != n || bump.tilt.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bump.center.len(),
        });
    }
    let c0 = norm_sqr(&bump.center).sqrt();
    if !(bump.width > 0.0 && c0 - bump.width > vol.c() && c0 + bump.width < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bump support (centre radius {c0}, width {}) must lie inside the open shell ({}, 1)",
            bump.width,
            vol.c()
        )));
    }
    let mut rng = counter_rng(0, stream::PERTURBATION);
    let mut min = 1.0f64;
    for _ in 0..4096 {
        let r = bump.width * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
        let offset = gaussian_sphere_point(&mut rng, n, r);
        let z: Point = bump.center.iter().zip(&offset).map(|(a, b)| a + b).collect();
        min = min.min(1.0 + amplitude * bump.eval(&z));
    }
    if !(min > 0.0) {
        return Err(Error::PerturbationNotPositive { min });
    }
    Ok(PerturbedVolume {
        base: vol.clone(),
        amplitude,
        bump,
    })
}

impl PerturbedVolume {
    pub fn base(&self) -> &EquivariantVolume {
        &self.base
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn bump(&self) -> &BumpSpec {
        &self.bump
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<(f64, i64)> {
        let (w, k) = self.base.shell.reduce(z)?;
        let factor = 1.0 + self.amplitude * self.bump.eval(&w);
        Ok((self.base.value_from(&w, k) * factor, k))
    }

    pub fn eval_with_radius(&self, z: &[Complex64], radius: f64) -> Result<(f64, i64)> {
        let (w, k) = self.base.shell.reduce_with_radius(z, radius)?;
        let factor = 1.0 + self.amplitude * self.bump.eval(&w);
        Ok((self.base.value_from(&w, k) * factor, k))
    }
}

impl LogDensity for PerturbedVolume {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn log_density(&self, z: &[Complex64]) -> Result<f64> {
        let (w, k) = self.base.shell.reduce(z)?;
        let factor = 1.0 + self.amplitude * self.bump.eval(&w);
        Ok(self.base.profile.psi(&w).ln() - k as f64 * self.base.profile.mu_det_sq.ln() + factor.ln())
    }
}

/// Equivariance residual for a perturbed density, using the same two-domain
/// comparison as [`equivariance_residual`].
pub fn perturbed_equivariance_residual(vol: &PerturbedVolume, samples: usize, seed: u64) -> Result<f64> {
    let base = &vol.base;
    let n = base.dim();
    let forward = base.map().compiled();
    let det = base.profile.mu_det_sq;
    let lo = (base.c() * base.map().eigenvalues().get(0).norm()).ln();
    let hi = (2.0 * base.shell.outer_radius).ln();
    let alt_radius = 0.5 * (1.0 + base.shell.outer_radius);
    let mut rng = counter_rng(seed, stream::RESIDUAL);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let radius = (lo + (hi - lo) * rng.random::<f64>()).exp();
        let z = gaussian_sphere_point(&mut rng, n, radius);
        let (fgz, _) = vol.eval(&forward.eval(&z))?;
        let (fz, _) = vol.eval_with_radius(&z, alt_radius)?;
        worst = worst.max((fgz * det - fz).abs() / fz);
    }
    Ok(worst)
}

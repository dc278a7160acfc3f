//! Seeded (quasi-)Monte Carlo estimates of the Futaki invariant over the
//! shell `Γ(c)`, plus the independence and diagonal-comparison checks.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::calculus::{derivatives, divergence_from_gradient, ricci_density, FdConfig, LogDensity};
use crate::error::{Error, Result};
use crate::fields::{holomorphic_divergence_trace, invariant_fields, is_invariant, PolyVectorField};
use crate::normal_form::{NormalFormMap, SphereSamplerConfig};
use crate::poly::Poly;
use crate::resonance::RESONANCE_TOL;
use crate::sampling::{counter_rng, shell_point, shell_volume, stream, Point, ScrambledHalton};
use crate::volume::{equivariant_perturbation, BumpSpec, EquivariantVolume, DEFAULT_C, DEFAULT_OUTER_RADIUS};

pub const CHUNK_SIZE: u64 = 1 << 16;
pub const QMC_REPLICATES: u64 = 16;
pub const VANISHING_SIGMAS: f64 = 3.0;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const INVARIANCE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplingMethod {
    Mc,
    Qmc,
}

impl SamplingMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplingMethod::Mc => "mc",
            SamplingMethod::Qmc => "qmc",
        }
    }
}

impl fmt::Display for SamplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(SamplingMethod::Mc),
            "qmc" => Ok(SamplingMethod::Qmc),
            other => Err(Error::InvalidParameter(format!("unknown sampling method {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationConfig {
    pub samples: u64,
    pub seed: u64,
    pub method: SamplingMethod,
    pub fd: FdConfig,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            method: SamplingMethod::Qmc,
            fd: FdConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralEstimate {
    pub value: Complex64,
    pub stderr: f64,
    /// Estimate of `∫_{Γ(c)} |integrand|`.
    pub scale: f64,
    pub samples: u64,
    pub seed: u64,
    pub method: SamplingMethod,
    /// `dz ∧ dz̄` measured against Lebesgue measure.
    pub convention_constant: f64,
}

impl IntegralEstimate {
    pub fn is_vanishing(&self) -> bool {
        self.value.norm() <= VANISHING_SIGMAS * self.stderr
    }

    /// `stderr / scale`, the resolution of the zero test.
    pub fn relative_resolution(&self) -> f64 {
        if self.scale > 0.0 {
            self.stderr / self.scale
        } else {
            0.0
        }
    }

    /// Whether two estimates agree within combined `3σ`.
    pub fn agrees_with(&self, other: &IntegralEstimate) -> bool {
        let sigma = (self.stderr * self.stderr + other.stderr * other.stderr).sqrt();
        (self.value - other.value).norm() <= VANISHING_SIGMAS * sigma
    }
}

/// `iⁿ dz_1 ∧ dz̄_1 ∧ ⋯ = 2ⁿ dx_1 ∧ dy_1 ∧ ⋯`.
pub fn convention_constant(n: usize) -> f64 {
    2f64.powi(n as i32)
}

/// Contiguous block of sample indices within one replicate.
#[derive(Clone, Copy, Debug)]
struct Job {
    replicate: u64,
    start: u64,
    end: u64,
    /// Global chunk number; selects the MC stream.
    id: u64,
}

fn replicate_sizes(samples: u64, method: SamplingMethod) -> Vec<u64> {
    let r = match method {
        SamplingMethod::Mc => 1,
        SamplingMethod::Qmc => QMC_REPLICATES,
    };
    (0..r).map(|k| samples / r + u64::from(k < samples % r)).collect()
}

fn jobs(sizes: &[u64]) -> Vec<Job> {
    let mut out = Vec::new();
    let mut id = 0;
    for (r, &size) in sizes.iter().enumerate() {
        let mut start = 0;
        while start < size {
            let end = (start + CHUNK_SIZE).min(size);
            out.push(Job {
                replicate: r as u64,
                start,
                end,
                id,
            });
            id += 1;
            start = end;
        }
    }
    out
}

struct ShellSampler {
    n: usize,
    c: f64,
    seed: u64,
    method: SamplingMethod,
    halton: Vec<ScrambledHalton>,
}

impl ShellSampler {
    fn new(n: usize, c: f64, seed: u64, method: SamplingMethod, replicates: usize) -> Self {
        let halton = match method {
            SamplingMethod::Mc => Vec::new(),
            SamplingMethod::Qmc => (0..replicates as u64)
                .map(|r| ScrambledHalton::new(2 * n, seed, r))
                .collect(),
        };
        ShellSampler {
            n,
            c,
            seed,
            method,
            halton,
        }
    }

    fn for_each(&self, job: &Job, mut f: impl FnMut(&Point) -> Result<()>) -> Result<()> {
        let mut u = vec![0.0; 2 * self.n];
        match self.method {
            SamplingMethod::Mc => {
                let mut rng = counter_rng(self.seed, stream::SHELL_MC + job.id);
                for _ in job.start..job.end {
                    u.iter_mut().for_each(|x| *x = rng.random());
                    f(&shell_point(self.c, &u, self.n))?;
                }
            }
            SamplingMethod::Qmc => {
                let h = &self.halton[job.replicate as usize];
                for i in job.start..job.end {
                    h.point_into(i + 1, &mut u);
                    f(&shell_point(self.c, &u, self.n))?;
                }
            }
        }
        Ok(())
    }
}

/// Points in `Γ(c)`, uniform in Lebesgue measure. QMC points are listed
/// replicate by replicate.
pub fn sample_shell(n: usize, c: f64, count: u64, seed: u64, method: SamplingMethod) -> Result<Vec<Point>> {
    check_c(c)?;
    let sizes = replicate_sizes(count, method);
    let sampler = ShellSampler::new(n, c, seed, method, sizes.len());
    let mut out = Vec::with_capacity(count as usize);
    for job in jobs(&sizes) {
        sampler.for_each(&job, |z| {
            out.push(z.clone());
            Ok(())
        })?;
    }
    Ok(out)
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("c must lie in (0,1), got {c}")))
    }
}

#[derive(Clone, Debug)]
struct Sums {
    replicate: u64,
    count: u64,
    sum: Vec<Complex64>,
    abs: Vec<f64>,
    sq: Vec<f64>,
}

impl Sums {
    fn new(replicate: u64, k: usize) -> Self {
        Sums {
            replicate,
            count: 0,
            sum: vec![Complex64::new(0.0, 0.0); k],
            abs: vec![0.0; k],
            sq: vec![0.0; k],
        }
    }

    fn merge(mut self, other: &Sums) -> Sums {
        self.count += other.count;
        for i in 0..self.sum.len() {
            self.sum[i] += other.sum[i];
            self.abs[i] += other.abs[i];
            self.sq[i] += other.sq[i];
        }
        self
    }
}

/// Fixed-shape pairwise reduction.
fn pairwise(items: &[Sums]) -> Sums {
    if items.len() == 1 {
        return items[0].clone();
    }
    let mid = items.len() / 2;
    pairwise(&items[..mid]).merge(&pairwise(&items[mid..]))
}

/// Integrates `k` integrands over `Γ(c)`; `integrand(z, out)` writes the
/// `k` values at `z`.
pub fn integrate_with<F>(n: usize, c: f64, k: usize, cfg: &IntegrationConfig, integrand: F) -> Result<Vec<IntegralEstimate>>
where
    F: Fn(&[Complex64], &mut [Complex64]) -> Result<()> + Sync,
{
    check_c(c)?;
    let sizes = replicate_sizes(cfg.samples, cfg.method);
    if sizes.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "{} samples is too few for {} replicates",
            cfg.samples,
            sizes.len()
        )));
    }
    let sampler = ShellSampler::new(n, c, cfg.seed, cfg.method, sizes.len());
    let chunks: Vec<Sums> = jobs(&sizes)
        .par_iter()
        .map(|job| {
            let mut s = Sums::new(job.replicate, k);
            let mut vals = vec![Complex64::new(0.0, 0.0); k];
            sampler.for_each(job, |z| {
                integrand(z, &mut vals)?;
                s.count += 1;
                for i in 0..k {
                    s.sum[i] += vals[i];
                    s.abs[i] += vals[i].norm();
                    s.sq[i] += vals[i].norm_sqr();
                }
                Ok(())
            })?;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;

    let per_replicate: Vec<Sums> = (0..sizes.len() as u64)
        .map(|r| {
            let mine: Vec<Sums> = chunks.iter().filter(|s| s.replicate == r).cloned().collect();
            pairwise(&mine)
        })
        .collect();
    let total = pairwise(&per_replicate);
    let weight = convention_constant(n) * shell_volume(c, n);
    let count = total.count as f64;

    Ok((0..k)
        .map(|i| {
            let mean = total.sum[i] / count;
            let var_mean = match cfg.method {
                SamplingMethod::Mc => {
                    let var = (total.sq[i] / count - mean.norm_sqr()).max(0.0) * count / (count - 1.0).max(1.0);
                    var / count
                }
                SamplingMethod::Qmc => {
                    let r = per_replicate.len() as f64;
                    let means: Vec<Complex64> =
                        per_replicate.iter().map(|s| s.sum[i] / s.count as f64).collect();
                    let centre = means.iter().sum::<Complex64>() / r;
                    means.iter().map(|m| (m - centre).norm_sqr()).sum::<f64>() / (r - 1.0) / r
                }
            };
            IntegralEstimate {
                value: mean * weight,
                stderr: var_mean.sqrt() * weight,
                scale: total.abs[i] / count * weight,
                samples: cfg.samples,
                seed: cfg.seed,
                method: cfg.method,
                convention_constant: convention_constant(n),
            }
        })
        .collect())
}

struct PreparedField {
    field: PolyVectorField,
    trace: Poly,
}

fn prepare(fields: &[PolyVectorField]) -> Vec<PreparedField> {
    fields
        .iter()
        .map(|v| PreparedField {
            field: v.clone(),
            trace: holomorphic_divergence_trace(v),
        })
        .collect()
}

/// `div_Ω V · (−1)ⁿ n! det H` for each field, sharing derivatives.
fn futaki_integrand<L: LogDensity + ?Sized>(
    vol: &L,
    fields: &[PreparedField],
    fd: &FdConfig,
    z: &[Complex64],
    out: &mut [Complex64],
) -> Result<()> {
    let d = derivatives(vol, z, fd)?;
    let ricci = ricci_density(&d.hessian).value;
    for (o, p) in out.iter_mut().zip(fields) {
        let vz = p.field.eval(z);
        let directional: Complex64 = vz.iter().zip(&d.gradient).map(|(a, b)| a * b).sum();
        *o = (directional + p.trace.eval(z)) * ricci;
    }
    Ok(())
}

/// Integrand value for one field at one point.
pub fn integrand_at<L: LogDensity + ?Sized>(vol: &L, v: &PolyVectorField, z: &[Complex64], fd: &FdConfig) -> Result<Complex64> {
    let d = derivatives(vol, z, fd)?;
    Ok(divergence_from_gradient(v, z, &d.gradient) * ricci_density(&d.hessian).value)
}

/// Estimates for several fields over the same sample points.
pub fn futaki_estimates<L: LogDensity + ?Sized>(
    vol: &L,
    c: f64,
    fields: &[PolyVectorField],
    cfg: &IntegrationConfig,
) -> Result<Vec<IntegralEstimate>> {
    if fields.is_empty() {
        return Ok(Vec::new());
    }
    let prepared = prepare(fields);
    integrate_with(vol.dim(), c, fields.len(), cfg, |z, out| {
        futaki_integrand(vol, &prepared, &cfg.fd, z, out)
    })
}

pub fn futaki_invariant<L: LogDensity + ?Sized>(
    vol: &L,
    c: f64,
    v: &PolyVectorField,
    cfg: &IntegrationConfig,
) -> Result<IntegralEstimate> {
    Ok(futaki_estimates(vol, c, std::slice::from_ref(v), cfg)?.remove(0))
}

#[derive(Clone, Debug)]
pub struct FutakiEntry {
    pub field: PolyVectorField,
    pub estimate: IntegralEstimate,
    pub vanishing: bool,
    /// `γ_* V = V`; the integral is computed either way.
    pub invariant: bool,
}

#[derive(Clone, Debug)]
pub struct FutakiReport {
    /// Map actually integrated; differs from the input when a conjugation
    /// was needed to certify the shell.
    pub map: NormalFormMap,
    /// Conjugation parameter, `1` when none was applied.
    pub conjugation_t: f64,
    pub c: f64,
    pub outer_radius: f64,
    pub entries: Vec<FutakiEntry>,
}

impl FutakiReport {
    pub fn all_vanishing(&self) -> bool {
        self.entries.iter().all(|e| e.vanishing)
    }
}

/// Certified volume for `map`, conjugating by `d_t` when the map itself
/// does not certify.
pub fn certified_volume(map: &NormalFormMap, c: f64, outer_radius: f64) -> Result<(NormalFormMap, f64, EquivariantVolume)> {
    match EquivariantVolume::new(map, c, outer_radius) {
        Ok(vol) => Ok((map.clone(), 1.0, vol)),
        Err(Error::NotCertified { .. }) => {
            let tuned = map.autotune_t(c, outer_radius, &SphereSamplerConfig::default())?;
            let vol = EquivariantVolume::new(&tuned.map, c, outer_radius)?;
            Ok((tuned.map, tuned.t, vol))
        }
        Err(e) => Err(e),
    }
}

/// Which fields to integrate: `None` means every invariant field of the
/// integrated map.
pub fn futaki_report(
    map: &NormalFormMap,
    fields: Option<&[PolyVectorField]>,
    c: f64,
    outer_radius: f64,
    cfg: &IntegrationConfig,
) -> Result<FutakiReport> {
    let (used, t, vol) = certified_volume(map, c, outer_radius)?;
    let fields = match fields {
        Some(f) => f.to_vec(),
        None => invariant_fields(&used, RESONANCE_TOL)?,
    };
    let estimates = futaki_estimates(&vol, c, &fields, cfg)?;
    let entries = fields
        .into_iter()
        .zip(estimates)
        .map(|(field, estimate)| FutakiEntry {
            invariant: is_invariant(&used, &field, INVARIANCE_TOL),
            vanishing: estimate.is_vanishing(),
            field,
            estimate,
        })
        .collect();
    Ok(FutakiReport {
        map: used,
        conjugation_t: t,
        c,
        outer_radius,
        entries,
    })
}

#[derive(Clone, Debug)]
pub struct VolumeVariant {
    pub label: String,
    pub c: f64,
    pub amplitude: f64,
    pub estimate: IntegralEstimate,
}

#[derive(Clone, Debug)]
pub struct IndependenceReport {
    pub variants: Vec<VolumeVariant>,
}

impl IndependenceReport {
    /// Every pair agrees within combined `3σ`.
    pub fn consistent(&self) -> bool {
        self.variants.iter().enumerate().all(|(i, a)| {
            self.variants[i + 1..]
                .iter()
                .all(|b| a.estimate.agrees_with(&b.estimate))
        })
    }

    pub fn all_vanishing(&self) -> bool {
        self.variants.iter().all(|v| v.estimate.is_vanishing())
    }
}

/// Variants: each `c` in `cs` with the radial volume, then the first `c`
/// perturbed by `amplitude` times the default bump.
pub fn volume_independence_check(
    map: &NormalFormMap,
    v: &PolyVectorField,
    cs: &[f64],
    amplitude: f64,
    outer_radius: f64,
    cfg: &IntegrationConfig,
) -> Result<IndependenceReport> {
    let mut variants = Vec::new();
    for &c in cs {
        let vol = EquivariantVolume::new(map, c, outer_radius)?;
        variants.push(VolumeVariant {
            label: format!("c={c}"),
            c,
            amplitude: 0.0,
            estimate: futaki_invariant(&vol, c, v, cfg)?,
        });
    }
    if let Some(&c) = cs.first() {
        let vol = EquivariantVolume::new(map, c, outer_radius)?;
        let perturbed = equivariant_perturbation(&vol, amplitude, BumpSpec::default_for(map.dim(), c))?;
        variants.push(VolumeVariant {
            label: format!("c={c},eps={amplitude}"),
            c,
            amplitude,
            estimate: futaki_invariant(&perturbed, c, v, cfg)?,
        });
    }
    Ok(IndependenceReport { variants })
}

/// Default variants: `c ∈ {0.8, 0.9}` and a perturbation of size `0.1`.
pub fn default_independence_check(map: &NormalFormMap, v: &PolyVectorField, cfg: &IntegrationConfig) -> Result<IndependenceReport> {
    volume_independence_check(map, v, &[DEFAULT_C, 0.9], 0.1, DEFAULT_OUTER_RADIUS, cfg)
}

#[derive(Clone, Debug)]
pub struct DiagonalComparison {
    pub gamma: IntegralEstimate,
    pub diagonal: IntegralEstimate,
    /// `max |I_γ(z) − I_{d_γ}(z)|` over the pointwise sample.
    pub max_pointwise_diff: f64,
    /// `max |I_γ(z)|` over the same points.
    pub max_pointwise_abs: f64,
    pub pointwise_samples: u64,
}

/// Compares the integrands of `γ` and of its diagonal part on the same
/// shell points, then the two estimates.
pub fn diagonal_comparison(
    map: &NormalFormMap,
    v: &PolyVectorField,
    c: f64,
    outer_radius: f64,
    cfg: &IntegrationConfig,
    pointwise_samples: u64,
) -> Result<DiagonalComparison> {
    let vol_g = EquivariantVolume::new(map, c, outer_radius)?;
    let vol_d = EquivariantVolume::new(&map.diagonal_part(), c, outer_radius)?;
    let points = sample_shell(map.dim(), c, pointwise_samples, cfg.seed, cfg.method)?;
    let diffs = points
        .par_iter()
        .map(|z| {
            let a = integrand_at(&vol_g, v, z, &cfg.fd)?;
            let b = integrand_at(&vol_d, v, z, &cfg.fd)?;
            Ok(((a - b).norm(), a.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_pointwise_diff = diffs.iter().map(|d| d.0).fold(0.0, f64::max);
    let max_pointwise_abs = diffs.iter().map(|d| d.1).fold(0.0, f64::max);
    let prepared = prepare(std::slice::from_ref(v));
    let mut est = integrate_with(map.dim(), c, 2, cfg, |z, out| {
        futaki_integrand(&vol_g, &prepared, &cfg.fd, z, &mut out[..1])?;
        futaki_integrand(&vol_d, &prepared, &cfg.fd, z, &mut out[1..])
    })?;
    let diagonal = est.pop().expect("two estimates");
    let gamma = est.pop().expect("two estimates");
    Ok(DiagonalComparison {
        gamma,
        diagonal,
        max_pointwise_diff,
        max_pointwise_abs,
        pointwise_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::{Eigenvalues, MonomialTerm};
    use crate::poly::MultiIndex;
    use crate::sampling::norm_sqr;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn diag() -> NormalFormMap {
        NormalFormMap::diagonal(Eigenvalues::new(vec![c(0.5), c(0.5)]).unwrap())
    }

    /// `d_2`-conjugate of `(z₁/4 + z₂², z₂/2)`; the unconjugated map does not
    /// certify at `c = 0.8`, `R = 1.05`.
    fn surface() -> NormalFormMap {
        NormalFormMap::new(
            Eigenvalues::new(vec![c(0.25), c(0.5)]).unwrap(),
            vec![MonomialTerm {
                target: 0,
                exponents: MultiIndex::new(vec![0, 2]),
                coeff: c(0.125),
            }],
        )
        .unwrap()
    }

    fn small(method: SamplingMethod) -> IntegrationConfig {
        IntegrationConfig {
            samples: 4096,
            seed: 11,
            method,
            fd: FdConfig::default(),
        }
    }

    #[test]
    fn shell_points_lie_in_shell() {
        for method in [SamplingMethod::Mc, SamplingMethod::Qmc] {
            for z in sample_shell(3, 0.8, 5000, 3, method).unwrap() {
                let r = norm_sqr(&z).sqrt();
                assert!((0.8 - 1e-12..=1.0 + 1e-12).contains(&r));
            }
        }
    }

    #[test]
    fn shell_moments() {
        let n = 2;
        let cc: f64 = 0.8;
        let cfg = IntegrationConfig {
            samples: 1_000_000,
            seed: 5,
            method: SamplingMethod::Mc,
            fd: FdConfig::default(),
        };
        let est = integrate_with(n, cc, 2, &cfg, |z, out| {
            out[0] = c(norm_sqr(z));
            out[1] = c(1.0);
            Ok(())
        })
        .unwrap();
        let w = convention_constant(n) * shell_volume(cc, n);
        let nn = n as f64;
        let mean_r2 = nn * (1.0 - cc.powf(2.0 * nn + 2.0)) / ((nn + 1.0) * (1.0 - cc.powf(2.0 * nn)));
        assert!((est[0].value.re / w - mean_r2).abs() <= 3.0 * est[0].stderr / w);
        assert!((est[1].value.re - w).abs() <= 1e-9 * w);
    }

    #[test]
    fn deterministic_and_linear() {
        let vol = EquivariantVolume::new(&surface(), 0.8, 1.05).unwrap();
        let v = PolyVectorField::monomial(2, 0, MultiIndex::new(vec![0, 2]), c(1.0));
        let cfg = small(SamplingMethod::Qmc);
        let a = futaki_invariant(&vol, 0.8, &v, &cfg).unwrap();
        let b = futaki_invariant(&vol, 0.8, &v, &cfg).unwrap();
        assert_eq!(a, b);
        let alpha = Complex64::new(0.5, -2.0);
        let s = futaki_invariant(&vol, 0.8, &v.scale(&alpha), &cfg).unwrap();
        assert!((s.value - a.value * alpha).norm() <= 1e-12 * (a.scale * alpha.norm()));
    }

    #[test]
    fn empty_report() {
        let r = futaki_report(&diag(), Some(&[]), 0.8, 1.05, &small(SamplingMethod::Qmc)).unwrap();
        assert!(r.entries.is_empty());
        assert!(r.all_vanishing());
    }

    #[test]
    fn zero_perturbation_is_baseline() {
        let map = surface();
        let v = PolyVectorField::monomial(2, 0, MultiIndex::unit(2, 0), c(1.0));
        let cfg = small(SamplingMethod::Mc);
        let r = volume_independence_check(&map, &v, &[0.8], 0.0, 1.05, &cfg).unwrap();
        assert_eq!(r.variants[0].estimate, r.variants[1].estimate);
    }

    #[test]
    fn diagonal_comparison_on_diagonal_map_is_exact() {
        let v = PolyVectorField::monomial(2, 0, MultiIndex::unit(2, 0), c(1.0));
        let d = diagonal_comparison(&diag(), &v, 0.8, 1.05, &small(SamplingMethod::Qmc), 1000).unwrap();
        assert_eq!(d.max_pointwise_diff, 0.0);
        assert_eq!(d.gamma, d.diagonal);
    }

    #[test]
    fn steep_map_is_conjugated() {
        let steep = NormalFormMap::new(
            Eigenvalues::new(vec![c(0.25), c(0.5)]).unwrap(),
            vec![MonomialTerm {
                target: 0,
                exponents: MultiIndex::new(vec![0, 2]),
                coeff: c(10.0),
            }],
        )
        .unwrap();
        let (used, t, _) = certified_volume(&steep, 0.8, 1.05).unwrap();
        assert!(t > 1.0);
        assert!(used.terms()[0].coeff.norm() < 10.0);
    }
}

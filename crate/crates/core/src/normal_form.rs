//! Contractions `γ` of `ℂⁿ` in Poincaré–Dulac normal form
//! `γ_j(z) = μ_j z_j + P_j(z_{j+1}, …, z_n)`.

use std::fmt;

use num::traits::{ToPrimitive, Zero};
use num::BigRational;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{invert_triangular, CompiledPolys, MultiIndex, Poly, PolyMap};
use crate::resonance::{is_resonant, mu_power};
use crate::sampling::{counter_rng, gaussian_sphere_point, norm, stream, Point};

/// Default bound on inverse-map coefficient magnitudes.
pub const INVERSE_COEFF_BOUND: f64 = 1e12;

/// Safety margin for [`NormalFormMap::autotune_t`]: the certified sup must be
/// below `c·(1 − AUTOTUNE_MARGIN)`.
pub const AUTOTUNE_MARGIN: f64 = 0.05;

/// Largest exponent `k` in the `t = 2^k` search grid.
pub const AUTOTUNE_MAX_EXPONENT: i32 = 32;

/// Eigenvalue given as modulus and argument, both rational; the argument is
/// in units of `π`. Used for exact resonance checks.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactEigenvalue {
    pub modulus: BigRational,
    pub angle: BigRational,
}

impl ExactEigenvalue {
    pub fn new(modulus: BigRational, angle: BigRational) -> Self {
        ExactEigenvalue { modulus, angle }
    }

    pub fn to_complex(&self) -> Complex64 {
        let r = self.modulus.to_f64().unwrap_or(f64::NAN);
        let a = self.angle.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI;
        Complex64::from_polar(r, a)
    }
}

/// Spectrum `μ` of `γ'(0)` with `0 < |μ_1| ≤ … ≤ |μ_n| < 1`, `n ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalues {
    mu: Vec<Complex64>,
    exact: Option<Vec<ExactEigenvalue>>,
}

impl Eigenvalues {
    pub fn new(mu: Vec<Complex64>) -> Result<Self> {
        check_dimension(mu.len())?;
        for (i, z) in mu.iter().enumerate() {
            let r = z.norm();
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidEigenvalues(format!(
                    "eigenvalue modulus not in (0,1): |μ_{}| = {r}",
                    i + 1
                )));
            }
        }
        for i in 1..mu.len() {
            let (a, b) = (mu[i - 1].norm(), mu[i].norm());
            if a > b * (1.0 + 1e-12) {
                return Err(Error::InvalidEigenvalues(format!(
                    "moduli must be non-decreasing: |μ_{}| = {a} > |μ_{}| = {b}",
                    i,
                    i + 1
                )));
            }
        }
        Ok(Eigenvalues { mu, exact: None })
    }

    pub fn exact(values: Vec<ExactEigenvalue>) -> Result<Self> {
        check_dimension(values.len())?;
        let zero = BigRational::zero();
        let one = BigRational::from_integer(1.into());
        for (i, v) in values.iter().enumerate() {
            if v.modulus <= zero || v.modulus >= one {
                return Err(Error::InvalidEigenvalues(format!(
                    "eigenvalue modulus not in (0,1): |μ_{}| = {}",
                    i + 1,
                    v.modulus
                )));
            }
        }
        for i in 1..values.len() {
            if values[i - 1].modulus > values[i].modulus {
                return Err(Error::InvalidEigenvalues(format!(
                    "moduli must be non-decreasing at index {}",
                    i + 1
                )));
            }
        }
        let mu = values.iter().map(ExactEigenvalue::to_complex).collect();
        Ok(Eigenvalues {
            mu,
            exact: Some(values),
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.mu
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.mu[i]
    }

    pub fn exact_values(&self) -> Option<&[ExactEigenvalue]> {
        self.exact.as_deref()
    }

    /// `|μ_1 μ_2 … μ_n|²`.
    pub fn det_modulus_sq(&self) -> f64 {
        self.mu.iter().map(Complex64::norm_sqr).product()
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidEigenvalues(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    Ok(())
}

/// `coeff · z^m e_target`, target 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialTerm {
    pub target: usize,
    pub exponents: MultiIndex,
    pub coeff: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Arity,
    TargetRange,
    ZeroCoefficient,
    Triangularity,
    NonResonant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// Index of the offending term in the map's term list.
    pub term: usize,
    pub rule: Rule,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  term {}: {}", v.term + 1, v.message)?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Sampler settings for [`NormalFormMap::contraction_sup`].
#[derive(Clone, Debug, PartialEq)]
pub struct SphereSamplerConfig {
    pub samples: usize,
    pub seed: u64,
    /// Number of best samples to refine by projected ascent.
    pub refine_starts: usize,
    pub refine_steps: usize,
}

impl Default for SphereSamplerConfig {
    fn default() -> Self {
        SphereSamplerConfig {
            samples: 4096,
            seed: 0x5eed,
            refine_starts: 10,
            refine_steps: 50,
        }
    }
}

/// Estimate of `sup_{|z| = radius} |γ(z)|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionCertificate {
    pub radius: f64,
    pub sup_estimate: f64,
    pub samples: usize,
    pub refined: bool,
    /// Point attaining `sup_estimate`.
    pub argmax: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct AutotuneResult {
    pub t: f64,
    pub map: NormalFormMap,
    pub certificate: ContractionCertificate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormMap {
    eigenvalues: Eigenvalues,
    terms: Vec<MonomialTerm>,
}

impl NormalFormMap {
    /// Builds and validates a map with the default resonance tolerance.
    pub fn new(eigenvalues: Eigenvalues, terms: Vec<MonomialTerm>) -> Result<Self> {
        let map = Self::new_unchecked(eigenvalues, terms);
        let report = map.validate(crate::resonance::RESONANCE_TOL);
        if report.is_empty() {
            Ok(map)
        } else {
            Err(Error::Validation(report))
        }
    }

    /// Builds a map without checking triangularity or resonance.
    pub fn new_unchecked(eigenvalues: Eigenvalues, terms: Vec<MonomialTerm>) -> Self {
        NormalFormMap { eigenvalues, terms }
    }

    pub fn diagonal(eigenvalues: Eigenvalues) -> Self {
        NormalFormMap {
            eigenvalues,
            terms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.dim()
    }

    pub fn eigenvalues(&self) -> &Eigenvalues {
        &self.eigenvalues
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.is_empty()
    }

    /// `d_γ(z) = (μ_1 z_1, …, μ_n z_n)`.
    pub fn diagonal_part(&self) -> NormalFormMap {
        Self::diagonal(self.eigenvalues.clone())
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let n = self.dim();
        let mut violations = Vec::new();
        for (idx, term) in self.terms.iter().enumerate() {
            let mut push = |rule, message| {
                violations.push(Violation {
                    term: idx,
                    rule,
                    message,
                })
            };
            if term.exponents.len() != n {
                push(
                    Rule::Arity,
                    format!(
                        "arity: exponents have length {} but n = {n}",
                        term.exponents.len()
                    ),
                );
                continue;
            }
            if term.target >= n {
                push(
                    Rule::TargetRange,
                    format!("target {} outside 1..{n}", term.target + 1),
                );
                continue;
            }
            if term.coeff.is_zero() || !term.coeff.re.is_finite() || !term.coeff.im.is_finite() {
                push(
                    Rule::ZeroCoefficient,
                    format!("coefficient must be finite and non-zero, got {}", term.coeff),
                );
            }
            if let Some(v) = (0..=term.target).find(|&v| term.exponents.get(v) > 0) {
                push(
                    Rule::Triangularity,
                    format!(
                        "triangularity: target {} uses variable {}",
                        term.target + 1,
                        v + 1
                    ),
                );
            }
            if !is_resonant(&self.eigenvalues, term.target, &term.exponents, tol) {
                let p = mu_power(&self.eigenvalues, &term.exponents);
                push(
                    Rule::NonResonant,
                    format!(
                        "non-resonant: μ^m = {} ≠ μ_{} = {} for m = {}",
                        fmt_complex(p),
                        term.target + 1,
                        fmt_complex(self.eigenvalues.get(term.target)),
                        term.exponents
                    ),
                );
            }
        }
        ValidationReport { violations }
    }

    /// The tails `P_j` as polynomials.
    pub fn tails(&self) -> Vec<Poly> {
        let n = self.dim();
        let mut buckets: Vec<Vec<(MultiIndex, Complex64)>> = vec![Vec::new(); n];
        for t in &self.terms {
            buckets[t.target].push((t.exponents.clone(), t.coeff));
        }
        buckets
            .into_iter()
            .map(|b| Poly::from_terms(n, b))
            .collect()
    }

    pub fn to_poly_map(&self) -> PolyMap {
        let n = self.dim();
        let comps = self
            .tails()
            .into_iter()
            .enumerate()
            .map(|(j, tail)| {
                let lin = Poly::monomial(MultiIndex::unit(n, j), self.eigenvalues.get(j));
                &lin + &tail
            })
            .collect();
        PolyMap::new(comps)
    }

    pub fn compiled(&self) -> CompiledPolys {
        CompiledPolys::from_map(&self.to_poly_map())
    }

    /// Direct evaluation of `γ(z)`.
    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self
            .eigenvalues
            .as_slice()
            .iter()
            .zip(z)
            .map(|(m, zi)| m * zi)
            .collect();
        for t in &self.terms {
            let mut v = t.coeff;
            for (zi, &e) in z.iter().zip(t.exponents.as_slice()) {
                v *= zi.powu(e);
            }
            out[t.target] += v;
        }
        out
    }

    /// Symbolic inverse by back substitution, rejecting coefficients larger
    /// than `bound`.
    pub fn invert_with_bound(&self, bound: f64) -> Result<PolyMap> {
        let inv = invert_triangular(self.eigenvalues.as_slice(), &self.tails());
        let magnitude = inv.max_magnitude();
        if !(magnitude <= bound) {
            return Err(Error::InverseBlowUp { magnitude, bound });
        }
        Ok(inv)
    }

    pub fn invert(&self) -> Result<PolyMap> {
        self.invert_with_bound(INVERSE_COEFF_BOUND)
    }

    /// `d_t ∘ γ ∘ d_t⁻¹` with `d_t(z) = (t z_1, t² z_2, …, tⁿ z_n)`.
    pub fn conjugate_dt(&self, t: f64) -> Result<NormalFormMap> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
        }
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let e = conjugation_exponent(term.target, &term.exponents);
                MonomialTerm {
                    target: term.target,
                    exponents: term.exponents.clone(),
                    coeff: term.coeff * t.powi(e as i32),
                }
            })
            .collect();
        Ok(NormalFormMap {
            eigenvalues: self.eigenvalues.clone(),
            terms,
        })
    }

    /// Estimates `sup_{|z| = radius} |γ(z)|` by sphere sampling followed by
    /// projected gradient ascent from the best samples.
    pub fn contraction_sup(&self, radius: f64, cfg: &SphereSamplerConfig) -> ContractionCertificate {
        const CHUNK: usize = 1024;
        let n = self.dim();
        let forward = self.compiled();
        let value = |z: &[Complex64]| norm(&forward.eval(z));

        let chunks = cfg.samples.div_ceil(CHUNK);
        let keep = cfg.refine_starts.max(1);
        let mut best: Vec<(f64, Point)> = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = counter_rng(cfg.seed, stream::SPHERE + chunk as u64);
                let count = CHUNK.min(cfg.samples - chunk * CHUNK);
                let mut local: Vec<(f64, Point)> = (0..count)
                    .map(|_| {
                        let z = gaussian_sphere_point(&mut rng, n, radius);
                        (value(&z), z)
                    })
                    .collect();
                top_k(&mut local, keep);
                local
            })
            .flatten()
            .collect();
        top_k(&mut best, keep);

        let refined = cfg.refine_steps > 0 && cfg.refine_starts > 0;
        if refined {
            let jac = CompiledPolys::new(
                &self
                    .to_poly_map()
                    .jacobian()
                    .into_iter()
                    .flatten()
                    .collect::<Vec<_>>(),
            );
            let climbed: Vec<(f64, Point)> = best
                .par_iter()
                .take(cfg.refine_starts)
                .map(|(v, z)| ascend(&forward, &jac, z.clone(), *v, radius, cfg.refine_steps))
                .collect();
            best.extend(climbed);
            top_k(&mut best, 1);
        }
        let (sup, argmax) = best
            .into_iter()
            .next()
            .map(|(v, z)| (v, z.to_vec()))
            .unwrap_or((0.0, vec![Complex64::zero(); n]));
        ContractionCertificate {
            radius,
            sup_estimate: sup,
            samples: cfg.samples,
            refined,
            argmax,
        }
    }

    /// Smallest `t = 2^k`, `0 ≤ k ≤ 32`, for which the conjugated map has
    /// `sup_{|z| = outer_radius} |γ_t(z)| < c·(1 − margin)`.
    pub fn autotune_t(&self, c: f64, outer_radius: f64, cfg: &SphereSamplerConfig) -> Result<AutotuneResult> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidParameter(format!("c must lie in (0,1), got {c}")));
        }
        if !(outer_radius > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "outer radius must exceed 1, got {outer_radius}"
            )));
        }
        let target = c * (1.0 - AUTOTUNE_MARGIN);
        let mut best_sup = f64::INFINITY;
        for k in 0..=AUTOTUNE_MAX_EXPONENT {
            let t = 2f64.powi(k);
            let map = self.conjugate_dt(t)?;
            let certificate = map.contraction_sup(outer_radius, cfg);
            best_sup = best_sup.min(certificate.sup_estimate);
            if certificate.sup_estimate < target {
                return Ok(AutotuneResult { t, map, certificate });
            }
            if map.is_diagonal() {
                // conjugation cannot change a diagonal map
                break;
            }
        }
        Err(Error::NoAdmissibleT { best_sup, target })
    }
}

/// Exponent `j − Σ_l l·m_l` (1-based `j`, `l`) by which `d_t` conjugation
/// rescales the coefficient of `z^m e_j`.
pub fn conjugation_exponent(target: usize, m: &MultiIndex) -> i64 {
    let weighted: i64 = m
        .as_slice()
        .iter()
        .enumerate()
        .map(|(l, &e)| (l as i64 + 1) * e as i64)
        .sum();
    target as i64 + 1 - weighted
}

fn top_k(v: &mut Vec<(f64, Point)>, k: usize) {
    // stable: ties keep generation order
    v.sort_by(|a, b| b.0.total_cmp(&a.0));
    v.truncate(k);
}

fn ascend(
    forward: &CompiledPolys,
    jac: &CompiledPolys,
    mut z: Point,
    mut value: f64,
    radius: f64,
    steps: usize,
) -> (f64, Point) {
    let n = z.len();
    let mut step = 0.1 * radius;
    let mut gz = vec![Complex64::zero(); n];
    let mut jz = vec![Complex64::zero(); n * n];
    for _ in 0..steps {
        forward.eval_into(&z, &mut gz);
        jac.eval_into(&z, &mut jz);
        // ascent direction 2·∂|γ|²/∂z̄_k = 2 Σ_j γ_j conj(∂γ_j/∂z_k)
        let mut grad: Point = (0..n)
            .map(|k| (0..n).map(|j| gz[j] * jz[j * n + k].conj()).sum::<Complex64>() * 2.0)
            .collect();
        // project onto the tangent space of the sphere
        let radial: f64 = z.iter().zip(&grad).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
            / (radius * radius);
        for (g, zi) in grad.iter_mut().zip(&z) {
            *g -= zi * radial;
        }
        let gnorm = norm(&grad);
        if gnorm < 1e-15 {
            break;
        }
        loop {
            let mut trial: Point = z
                .iter()
                .zip(&grad)
                .map(|(zi, g)| zi + g * (step / gnorm))
                .collect();
            let scale = radius / norm(&trial);
            trial.iter_mut().for_each(|c| *c *= scale);
            let v = norm(&forward.eval(&trial));
            if v > value {
                z = trial;
                value = v;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-14 * radius {
                return (value, z);
            }
        }
    }
    (value, z)
}

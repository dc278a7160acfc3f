//! Deterministic random and low-discrepancy point generators.
//!
//! Every stream is addressed by `(seed, stream id)` so that chunks of work can
//! be generated independently and in any order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use smallvec::SmallVec;

pub type Point = SmallVec<[Complex64; 8]>;

/// Stream namespaces, so that different consumers of one seed never overlap.
pub mod stream {
    pub const SPHERE: u64 = 1 << 40;
    pub const SHELL_MC: u64 = 2 << 40;
    pub const SCRAMBLE: u64 = 3 << 40;
    pub const RESIDUAL: u64 = 4 << 40;
    pub const PERTURBATION: u64 = 5 << 40;
    pub const TEST: u64 = 6 << 40;
}

/// ChaCha8 generator positioned on stream `id` of `seed`.
pub fn counter_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform point on the sphere of radius `radius` in `ℂⁿ` (normalized
/// Gaussian vector in `2n` real dimensions).
pub fn gaussian_sphere_point<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Point {
    loop {
        let p: Point = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        let norm = norm(&p);
        if norm > 1e-300 {
            return p.into_iter().map(|z| z * (radius / norm)).collect();
        }
    }
}

pub fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_sqr(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Halton sequence with independent random digit permutations per dimension
/// and digit position.
#[derive(Clone, Debug)]
pub struct ScrambledHalton {
    dims: Vec<HaltonDim>,
}

#[derive(Clone, Debug)]
struct HaltonDim {
    base: u64,
    /// `perms[k][d]` is the replacement for digit `d` at position `k`.
    perms: Vec<Vec<u64>>,
    /// `base^-(k+1)` for each position.
    weights: Vec<f64>,
}

impl ScrambledHalton {
    /// `dim` dimensions; `seed`/`replicate` select the scrambling.
    pub fn new(dim: usize, seed: u64, replicate: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton dimension limited to {}", PRIMES.len());
        let mut rng = counter_rng(seed, stream::SCRAMBLE + replicate);
        let dims = PRIMES[..dim]
            .iter()
            .map(|&b| {
                let base = b as u64;
                let digits = (53.0 / (base as f64).log2()).ceil() as usize + 1;
                let perms = (0..digits)
                    .map(|_| {
                        let mut p: Vec<u64> = (0..base).collect();
                        // Fisher–Yates
                        for i in (1..p.len()).rev() {
                            let j = rng.random_range(0..=i);
                            p.swap(i, j);
                        }
                        p
                    })
                    .collect();
                let weights = (0..digits)
                    .map(|k| (base as f64).powi(-(k as i32 + 1)))
                    .collect();
                HaltonDim {
                    base,
                    perms,
                    weights,
                }
            })
            .collect();
        ScrambledHalton { dims }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn point_into(&self, index: u64, out: &mut [f64]) {
        for (d, o) in self.dims.iter().zip(out.iter_mut()) {
            let mut i = index;
            let mut x = 0.0;
            for (perm, w) in d.perms.iter().zip(&d.weights) {
                let digit = i % d.base;
                i /= d.base;
                x += perm[digit as usize] as f64 * w;
            }
            *o = x.min(1.0 - f64::EPSILON / 2.0);
        }
    }
}

/// Maps the unit cube `[0,1)^{2n}` onto the shell `c ≤ |z| ≤ 1` in `ℂⁿ`,
/// pushing Lebesgue measure to the normalized uniform measure on the shell.
///
/// Coordinates: one for the radius (`ρ^{2n}` uniform), `n-1` stick-breaking
/// coordinates for the squared moduli on the simplex, and `n` phases.
pub fn shell_point(c: f64, u: &[f64], n: usize) -> Point {
    debug_assert_eq!(u.len(), 2 * n);
    let two_n = 2.0 * n as f64;
    let c2n = c.powf(two_n);
    let rho = (c2n + u[0] * (1.0 - c2n)).powf(1.0 / two_n);
    let mut remaining = 1.0;
    let mut out = Point::with_capacity(n);
    for k in 0..n {
        let share = if k + 1 == n {
            remaining
        } else {
            let b = (n - 1 - k) as f64;
            let x = 1.0 - (1.0 - u[1 + k]).powf(1.0 / b);
            let s = remaining * x;
            remaining -= s;
            s
        };
        let modulus = rho * share.max(0.0).sqrt();
        let theta = 2.0 * PI * u[n + k];
        out.push(Complex64::from_polar(modulus, theta));
    }
    out
}

/// Lebesgue volume of `{c ≤ |z| ≤ 1} ⊂ ℂⁿ`.
pub fn shell_volume(c: f64, n: usize) -> f64 {
    let mut fact = 1.0;
    for k in 2..=n {
        fact *= k as f64;
    }
    PI.powi(n as i32) / fact * (1.0 - c.powi(2 * n as i32))
}

//! Wirtinger derivatives of `log f` by finite differences, the Ricci top-form
//! density and the holomorphic divergence.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::fields::{holomorphic_divergence_trace, PolyVectorField};
use crate::volume::CutoffProfile;

pub const DEFAULT_STEP: f64 = 1e-4;

/// Scalar evaluator of `log f`. Implementations must be reentrant.
pub trait LogDensity: Sync {
    fn dim(&self) -> usize;
    fn log_density(&self, z: &[Complex64]) -> Result<f64>;
}

/// Adapts a closure to [`LogDensity`].
pub struct FnLogDensity<F> {
    n: usize,
    f: F,
}

impl<F> FnLogDensity<F>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        FnLogDensity { n, f }
    }
}

impl<F> LogDensity for FnLogDensity<F>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn log_density(&self, z: &[Complex64]) -> Result<f64> {
        Ok((self.f)(z))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdConfig {
    /// Step in each real coordinate.
    pub step: f64,
    /// Combine steps `h` and `h/2` to cancel the `h²` error term.
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step: DEFAULT_STEP,
            richardson: true,
        }
    }
}

/// `H_{ij} = ∂² log f / ∂z_i ∂z̄_j`, Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianHessian {
    pub entries: DMatrix<Complex64>,
}

impl HermitianHessian {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn zeros(n: usize) -> Self {
        HermitianHessian {
            entries: DMatrix::zeros(n, n),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `max |H_ij − conj(H_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RicciDensity {
    pub value: f64,
    /// Imaginary part of `(−1)ⁿ n! det H`; roundoff only.
    pub imaginary: f64,
}

/// Gradient and Hessian of `log f` at one point.
#[derive(Clone, Debug)]
pub struct Derivatives {
    pub log_density: f64,
    /// `∂ log f / ∂z_i`.
    pub gradient: Vec<Complex64>,
    pub hessian: HermitianHessian,
}

fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn to_complex(x: &[f64], out: &mut [Complex64]) {
    for (k, o) in out.iter_mut().enumerate() {
        *o = Complex64::new(x[2 * k], x[2 * k + 1]);
    }
}

struct RealEval<'a, L: ?Sized> {
    f: &'a L,
    buf: Vec<Complex64>,
}

impl<L: LogDensity + ?Sized> RealEval<'_, L> {
    fn at(&mut self, x: &[f64]) -> Result<f64> {
        to_complex(x, &mut self.buf);
        self.f.log_density(&self.buf)
    }
}

/// Real gradient and Hessian by central differences with step `h`.
fn real_stencil<L: LogDensity + ?Sized>(
    ev: &mut RealEval<'_, L>,
    x0: &[f64],
    f0: f64,
    h: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut grad = vec![0.0; d];
    let mut hess = vec![0.0; d * d];
    for a in 0..d {
        x[a] = x0[a] + h;
        let fp = ev.at(&x)?;
        x[a] = x0[a] - h;
        let fm = ev.at(&x)?;
        x[a] = x0[a];
        grad[a] = (fp - fm) / (2.0 * h);
        hess[a * d + a] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for a in 0..d {
        for b in (a + 1)..d {
            let mut corner = |sa: f64, sb: f64| -> Result<f64> {
                x[a] = x0[a] + sa * h;
                x[b] = x0[b] + sb * h;
                let v = ev.at(&x);
                x[a] = x0[a];
                x[b] = x0[b];
                v
            };
            let pp = corner(1.0, 1.0)?;
            let pm = corner(1.0, -1.0)?;
            let mp = corner(-1.0, 1.0)?;
            let mm = corner(-1.0, -1.0)?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[a * d + b] = v;
            hess[b * d + a] = v;
        }
    }
    Ok((grad, hess))
}

/// Gradient and Hessian of `log f` at `z`, sharing one set of evaluations.
pub fn derivatives<L: LogDensity + ?Sized>(f: &L, z: &[Complex64], cfg: &FdConfig) -> Result<Derivatives> {
    let n = z.len();
    let x0 = to_real(z);
    let mut ev = RealEval {
        f,
        buf: vec![Complex64::new(0.0, 0.0); n],
    };
    let f0 = ev.at(&x0)?;
    let (mut g, mut h) = real_stencil(&mut ev, &x0, f0, cfg.step)?;
    if cfg.richardson {
        let (g2, h2) = real_stencil(&mut ev, &x0, f0, 0.5 * cfg.step)?;
        for (a, b) in g.iter_mut().zip(&g2) {
            *a = (4.0 * b - *a) / 3.0;
        }
        for (a, b) in h.iter_mut().zip(&h2) {
            *a = (4.0 * b - *a) / 3.0;
        }
    }
    let d = 2 * n;
    let gradient = (0..n)
        .map(|i| 0.5 * Complex64::new(g[2 * i], -g[2 * i + 1]))
        .collect();
    let r = |a: usize, b: usize| h[a * d + b];
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            entries[(i, j)] = 0.25 * Complex64::new(r(xi, xj) + r(yi, yj), r(xi, yj) - r(yi, xj));
        }
    }
    let sym = (&entries + entries.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(Derivatives {
        log_density: f0,
        gradient,
        hessian: HermitianHessian { entries: sym },
    })
}

pub fn wirtinger_gradient<L: LogDensity + ?Sized>(f: &L, z: &[Complex64], step: f64) -> Result<Vec<Complex64>> {
    let n = z.len();
    let x0 = to_real(z);
    let mut ev = RealEval {
        f,
        buf: vec![Complex64::new(0.0, 0.0); n],
    };
    let mut x = x0.clone();
    let mut central = |h: f64| -> Result<Vec<f64>> {
        let mut g = vec![0.0; 2 * n];
        for a in 0..2 * n {
            x[a] = x0[a] + h;
            let fp = ev.at(&x)?;
            x[a] = x0[a] - h;
            let fm = ev.at(&x)?;
            x[a] = x0[a];
            g[a] = (fp - fm) / (2.0 * h);
        }
        Ok(g)
    };
    let g1 = central(step)?;
    let g2 = central(0.5 * step)?;
    Ok((0..n)
        .map(|i| {
            let gx = (4.0 * g2[2 * i] - g1[2 * i]) / 3.0;
            let gy = (4.0 * g2[2 * i + 1] - g1[2 * i + 1]) / 3.0;
            0.5 * Complex64::new(gx, -gy)
        })
        .collect())
}

pub fn hermitian_hessian<L: LogDensity + ?Sized>(f: &L, z: &[Complex64], step: f64) -> Result<HermitianHessian> {
    let cfg = FdConfig {
        step,
        richardson: true,
    };
    Ok(derivatives(f, z, &cfg)?.hessian)
}

/// Closed form `H_{ij} = u′ δ_{ij} + u″ z̄_i z_j` for `log ψ(|z|²)`.
pub fn radial_hessian(profile: &CutoffProfile, z: &[Complex64]) -> HermitianHessian {
    let n = z.len();
    let r: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let (_, d1, d2) = profile.log_psi_derivatives(r);
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut v = z[i].conj() * z[j] * d2;
            if i == j {
                v += d1;
            }
            entries[(i, j)] = v;
        }
    }
    HermitianHessian { entries }
}

/// Closed form `∂ log ψ / ∂z_i = u′ z̄_i`.
pub fn radial_gradient(profile: &CutoffProfile, z: &[Complex64]) -> Vec<Complex64> {
    let r: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let (_, d1, _) = profile.log_psi_derivatives(r);
    z.iter().map(|c| c.conj() * d1).collect()
}

/// `(−1)ⁿ n! det H`, the coefficient of `Ric_Ωⁿ` against `dz ∧ dz̄`.
pub fn ricci_density(h: &HermitianHessian) -> RicciDensity {
    let n = h.dim();
    let det = if n == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        h.entries.clone().determinant()
    };
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let v = det * (sign * fact);
    RicciDensity {
        value: v.re,
        imaginary: v.im,
    }
}

/// `V(log f) + Σ ∂V_l/∂z_l` given the gradient of `log f` at `z`.
pub fn divergence_from_gradient(v: &PolyVectorField, z: &[Complex64], gradient: &[Complex64]) -> Complex64 {
    let vz = v.eval(z);
    let directional: Complex64 = vz.iter().zip(gradient).map(|(a, b)| a * b).sum();
    directional + holomorphic_divergence_trace(v).eval(z)
}

pub fn divergence<L: LogDensity + ?Sized>(
    v: &PolyVectorField,
    f: &L,
    z: &[Complex64],
    step: f64,
) -> Result<Complex64> {
    let grad = wirtinger_gradient(f, z, step)?;
    Ok(divergence_from_gradient(v, z, &grad))
}

//! Multiplicative resonances `μ_s = μ^m` and the algebra `g_μ` of resonant
//! polynomial vector fields.

use num::traits::{One, Pow, Zero};
use num::{BigInt, BigRational, Integer};
use num_complex::Complex64;

use crate::fields::PolyVectorField;
use crate::normal_form::Eigenvalues;
use crate::poly::MultiIndex;

/// Default relative tolerance for floating resonance checks.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Largest total degree a resonant multi-index can have:
/// `floor(log|μ_1| / log|μ_n|)`.
pub fn degree_bound(mu: &Eigenvalues) -> u32 {
    let n = mu.dim();
    let lo = mu.get(0).norm().ln();
    let hi = mu.get(n - 1).norm().ln();
    // hi < 0 strictly because |μ_n| < 1
    (lo / hi + 1e-9).floor() as u32
}

/// `μ^m` in floating point.
pub fn mu_power(mu: &Eigenvalues, m: &MultiIndex) -> Complex64 {
    mu.as_slice()
        .iter()
        .zip(m.as_slice())
        .fold(Complex64::new(1.0, 0.0), |acc, (z, &e)| acc * z.powu(e))
}

/// Whether `μ_s = μ^m`. Exact eigenvalues are compared exactly and `tol` is
/// ignored; otherwise the test is `|μ^m − μ_s| ≤ tol·|μ_s|`.
pub fn is_resonant(mu: &Eigenvalues, s: usize, m: &MultiIndex, tol: f64) -> bool {
    if m.is_zero() {
        return false;
    }
    if let Some(exact) = mu.exact_values() {
        let mut modulus = BigRational::one();
        let mut angle = BigRational::zero();
        for (ev, &e) in exact.iter().zip(m.as_slice()) {
            if e == 0 {
                continue;
            }
            modulus *= Pow::pow(&ev.modulus, e);
            angle += &ev.angle * BigRational::from_integer(BigInt::from(e));
        }
        if modulus != exact[s].modulus {
            return false;
        }
        // angles are multiples of π; equal mod 2π
        let diff = angle - &exact[s].angle;
        return diff.is_integer() && diff.to_integer().is_even();
    }
    let target = mu.get(s);
    (mu_power(mu, m) - target).norm() <= tol * target.norm()
}

/// Resonant multi-indices for target `s` (0-based), graded-lex ordered.
pub fn resonant_multi_indices(mu: &Eigenvalues, s: usize, tol: f64) -> Vec<MultiIndex> {
    let bound = degree_bound(mu);
    MultiIndex::all_up_to(mu.dim(), 1, bound)
        .into_iter()
        .filter(|m| is_resonant(mu, s, m, tol))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceTable {
    pub degree_bound: u32,
    /// `(target s, m)` with 0-based target, graded-lex in `m` then by target.
    pub entries: Vec<(usize, MultiIndex)>,
}

pub fn resonance_table(mu: &Eigenvalues, tol: f64) -> ResonanceTable {
    let bound = degree_bound(mu);
    let n = mu.dim();
    let mut entries = Vec::new();
    for m in MultiIndex::all_up_to(n, 1, bound) {
        for s in 0..n {
            if is_resonant(mu, s, &m, tol) {
                entries.push((s, m.clone()));
            }
        }
    }
    ResonanceTable {
        degree_bound: bound,
        entries,
    }
}

/// Monomial basis `z^m ∂/∂z_s` of `g_μ`, in the order of [`resonance_table`].
pub fn gmu_basis(mu: &Eigenvalues, tol: f64) -> Vec<PolyVectorField> {
    let n = mu.dim();
    resonance_table(mu, tol)
        .entries
        .into_iter()
        .map(|(s, m)| PolyVectorField::monomial(n, s, m, Complex64::new(1.0, 0.0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::ExactEigenvalue;

    fn real(mu: &[f64]) -> Eigenvalues {
        Eigenvalues::new(mu.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn bounds() {
        assert_eq!(degree_bound(&real(&[0.5, 0.5])), 1);
        assert_eq!(degree_bound(&real(&[0.25, 0.5])), 2);
        assert_eq!(degree_bound(&real(&[0.125, 0.25, 0.5])), 3);
    }

    #[test]
    fn resonant_sets() {
        let mu = real(&[0.25, 0.5]);
        assert_eq!(
            resonant_multi_indices(&mu, 0, RESONANCE_TOL),
            vec![mi(&[1, 0]), mi(&[0, 2])]
        );
        assert_eq!(resonant_multi_indices(&mu, 1, RESONANCE_TOL), vec![mi(&[0, 1])]);
        let mu3 = real(&[0.125, 0.25, 0.5]);
        assert_eq!(
            resonant_multi_indices(&mu3, 0, RESONANCE_TOL),
            vec![mi(&[1, 0, 0]), mi(&[0, 1, 1]), mi(&[0, 0, 3])]
        );
    }

    #[test]
    fn single_checks() {
        let mu = real(&[0.25, 0.5]);
        assert!(is_resonant(&mu, 0, &mi(&[0, 2]), RESONANCE_TOL));
        assert!(!is_resonant(&mu, 1, &mi(&[1, 0]), RESONANCE_TOL));
        assert!(!is_resonant(&mu, 0, &mi(&[0, 0]), RESONANCE_TOL));
        assert!(!is_resonant(&mu, 1, &mi(&[0, 0]), RESONANCE_TOL));
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(gmu_basis(&real(&[0.5, 0.5]), RESONANCE_TOL).len(), 4);
        assert_eq!(gmu_basis(&real(&[0.25, 0.5]), RESONANCE_TOL).len(), 3);
        assert_eq!(gmu_basis(&real(&[0.125, 0.25, 0.5]), RESONANCE_TOL).len(), 6);
        // no multiplicative relations: only the diagonal linear fields
        assert_eq!(gmu_basis(&real(&[0.3, 0.45, 0.7]), RESONANCE_TOL).len(), 3);
    }

    #[test]
    fn exact_mode_uses_angles() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        // μ = (1/4 e^{iπ/2}, 1/2 e^{iπ/4}): μ_2^2 = 1/4 e^{iπ/2} = μ_1
        let mu = Eigenvalues::exact(vec![
            ExactEigenvalue::new(q(1, 4), q(1, 2)),
            ExactEigenvalue::new(q(1, 2), q(1, 4)),
        ])
        .unwrap();
        assert!(is_resonant(&mu, 0, &mi(&[0, 2]), 0.0));
        // same moduli, mismatched angle
        let mu2 = Eigenvalues::exact(vec![
            ExactEigenvalue::new(q(1, 4), q(1, 3)),
            ExactEigenvalue::new(q(1, 2), q(1, 4)),
        ])
        .unwrap();
        assert!(!is_resonant(&mu2, 0, &mi(&[0, 2]), 1.0));
        // angle differing by 2π is still resonant
        let mu3 = Eigenvalues::exact(vec![
            ExactEigenvalue::new(q(1, 4), q(5, 2)),
            ExactEigenvalue::new(q(1, 2), q(1, 4)),
        ])
        .unwrap();
        assert!(is_resonant(&mu3, 0, &mi(&[0, 2]), 0.0));
    }
}

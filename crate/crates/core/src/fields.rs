//! Polynomial holomorphic vector fields `V = Σ a^s_m z^m ∂/∂z_s`, their
//! pushforward under `γ`, and the finite-dimensional checks of the
//! `g_μ ⊕ g_μ^⊥` structure.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use nalgebra::DMatrix;
use num::traits::Zero;
use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{column_normalized, null_space, numerical_rank, RankInfo, RANK_THRESHOLD};
use crate::normal_form::NormalFormMap;
use crate::poly::{Coeff, MultiIndex, Poly, PolyMap};
use crate::resonance::{gmu_basis, is_resonant, resonance_table};

/// Coefficients below this fraction of the field scale are ignored when
/// looking for resonant / non-resonant leakage.
pub const LEAK_TOL: f64 = 1e-10;

/// Default truncation degree for [`check_perp_injectivity`].
pub const DEFAULT_PERP_DEGREE: u32 = 4;

/// Component `s` and exponent `m` of a monomial field `z^m ∂/∂z_s`.
pub type FieldKey = (usize, MultiIndex);

/// Orders keys like the resonance table: by `m` (graded-lex), then `s`.
pub fn cmp_keys(a: &FieldKey, b: &FieldKey) -> Ordering {
    a.1.cmp(&b.1).then(a.0.cmp(&b.0))
}

#[derive(Clone, PartialEq, Debug)]
pub struct PolyVectorField<C = Complex64> {
    comps: Vec<Poly<C>>,
}

impl<C: Coeff> PolyVectorField<C> {
    pub fn new(comps: Vec<Poly<C>>) -> Self {
        PolyVectorField { comps }
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField {
            comps: (0..n).map(|_| Poly::zero(n)).collect(),
        }
    }

    /// `coeff · z^m ∂/∂z_s` (0-based `s`).
    pub fn monomial(n: usize, s: usize, m: MultiIndex, coeff: C) -> Self {
        let mut f = Self::zero(n);
        f.comps[s] = Poly::monomial(m, coeff);
        f
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (usize, MultiIndex, C)>) -> Self {
        let mut buckets: Vec<Vec<(MultiIndex, C)>> = vec![Vec::new(); n];
        for (s, m, c) in terms {
            buckets[s].push((m, c));
        }
        PolyVectorField {
            comps: buckets.into_iter().map(|b| Poly::from_terms(n, b)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[Poly<C>] {
        &self.comps
    }

    /// `(s, m, coeff)` triples, ordered by [`cmp_keys`].
    pub fn terms(&self) -> Vec<(usize, MultiIndex, C)> {
        let mut out: Vec<(usize, MultiIndex, C)> = self
            .comps
            .iter()
            .enumerate()
            .flat_map(|(s, p)| p.terms().map(move |(m, c)| (s, m.clone(), c.clone())))
            .collect();
        out.sort_by(|a, b| cmp_keys(&(a.0, a.1.clone()), &(b.0, b.1.clone())));
        out
    }

    pub fn coeff(&self, s: usize, m: &MultiIndex) -> C {
        self.comps[s].coeff(m)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.comps.iter().map(Poly::max_magnitude).fold(0.0, f64::max)
    }

    pub fn scale(&self, a: &C) -> Self {
        PolyVectorField {
            comps: self.comps.iter().map(|p| p.scale(a)).collect(),
        }
    }

    pub fn eval(&self, z: &[C]) -> Vec<C> {
        self.comps.iter().map(|p| p.eval(z)).collect()
    }

    /// `V ∘ F`: the components evaluated at a polynomial map.
    pub fn compose(&self, inner: &PolyMap<C>) -> Vec<Poly<C>> {
        self.comps
            .iter()
            .map(|p| p.compose(inner.components()))
            .collect()
    }
}

impl<C: Coeff> Add for &PolyVectorField<C> {
    type Output = PolyVectorField<C>;

    fn add(self, rhs: &PolyVectorField<C>) -> PolyVectorField<C> {
        PolyVectorField {
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<C: Coeff> Sub for &PolyVectorField<C> {
    type Output = PolyVectorField<C>;

    fn sub(self, rhs: &PolyVectorField<C>) -> PolyVectorField<C> {
        PolyVectorField {
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `dF(z)·V(z)` as polynomials in `z`.
pub fn jacobian_vector_product<C: Coeff>(
    jacobian: &[Vec<Poly<C>>],
    v: &PolyVectorField<C>,
) -> Vec<Poly<C>> {
    jacobian
        .iter()
        .map(|row| {
            let n = v.dim();
            row.iter()
                .zip(v.components())
                .fold(Poly::zero(n), |acc, (j, vl)| &acc + &(j * vl))
        })
        .collect()
}

/// `(F_* V)(w) = dF(F⁻¹(w))·V(F⁻¹(w))`.
pub fn pushforward_with<C: Coeff>(
    jacobian: &[Vec<Poly<C>>],
    inverse: &PolyMap<C>,
    v: &PolyVectorField<C>,
) -> PolyVectorField<C> {
    let jv = jacobian_vector_product(jacobian, v);
    PolyVectorField::new(jv.iter().map(|p| p.compose(inverse.components())).collect())
}

/// Cached forward map, Jacobian and inverse of `γ` for repeated pushforwards.
#[derive(Clone, Debug)]
pub struct PushforwardOperator {
    forward: PolyMap,
    jacobian: Vec<Vec<Poly>>,
    inverse: PolyMap,
}

impl PushforwardOperator {
    pub fn new(gamma: &NormalFormMap) -> Result<Self> {
        let forward = gamma.to_poly_map();
        let jacobian = forward.jacobian();
        let inverse = gamma.invert()?;
        Ok(PushforwardOperator {
            forward,
            jacobian,
            inverse,
        })
    }

    pub fn forward(&self) -> &PolyMap {
        &self.forward
    }

    pub fn inverse(&self) -> &PolyMap {
        &self.inverse
    }

    pub fn apply(&self, v: &PolyVectorField) -> PolyVectorField {
        pushforward_with(&self.jacobian, &self.inverse, v)
    }

    /// `V − γ_* V`.
    pub fn id_minus(&self, v: &PolyVectorField) -> PolyVectorField {
        v - &self.apply(v)
    }
}

pub fn pushforward(gamma: &NormalFormMap, v: &PolyVectorField) -> Result<PolyVectorField> {
    Ok(PushforwardOperator::new(gamma)?.apply(v))
}

/// Whether `dγ(z)·V(z) − V(γ(z))` vanishes identically, coefficients
/// compared to `tol` after normalizing `V` to unit max coefficient.
pub fn is_invariant(gamma: &NormalFormMap, v: &PolyVectorField, tol: f64) -> bool {
    let scale = v.max_magnitude();
    if scale == 0.0 {
        return true;
    }
    let v = v.scale(&Complex64::new(1.0 / scale, 0.0));
    let forward = gamma.to_poly_map();
    let jv = jacobian_vector_product(&forward.jacobian(), &v);
    let vg = v.compose(&forward);
    jv.iter()
        .zip(&vg)
        .all(|(a, b)| (a - b).terms().all(|(_, c)| c.norm() <= tol))
}

/// Dense matrix of a linear map between spans of monomial fields.
#[derive(Clone, Debug)]
pub struct LinearOperatorMatrix {
    pub domain: Vec<FieldKey>,
    pub codomain: Vec<FieldKey>,
    pub entries: DMatrix<Complex64>,
}

impl LinearOperatorMatrix {
    /// Column `i` holds the coefficients of `images[i]`. The codomain basis
    /// starts with `preferred` and continues with any other monomials that
    /// occur, in key order.
    pub fn assemble(
        domain: Vec<FieldKey>,
        preferred: &[FieldKey],
        images: &[PolyVectorField],
    ) -> Self {
        assert_eq!(domain.len(), images.len());
        let mut codomain: Vec<FieldKey> = preferred.to_vec();
        let mut extra: Vec<FieldKey> = Vec::new();
        for img in images {
            for (s, m, _) in img.terms() {
                let key = (s, m);
                if !codomain.contains(&key) && !extra.contains(&key) {
                    extra.push(key);
                }
            }
        }
        extra.sort_by(cmp_keys);
        codomain.extend(extra);
        let index: BTreeMap<(MultiIndex, usize), usize> = codomain
            .iter()
            .enumerate()
            .map(|(i, (s, m))| ((m.clone(), *s), i))
            .collect();
        let mut entries = DMatrix::zeros(codomain.len(), domain.len());
        for (col, img) in images.iter().enumerate() {
            for (s, m, c) in img.terms() {
                entries[(index[&(m, s)], col)] = c;
            }
        }
        LinearOperatorMatrix {
            domain,
            codomain,
            entries,
        }
    }
}

fn basis_keys(basis: &[PolyVectorField]) -> Vec<FieldKey> {
    basis
        .iter()
        .map(|f| {
            let (s, m, _) = f.terms().into_iter().next().expect("monomial basis field");
            (s, m)
        })
        .collect()
}

/// Matrix of `Id − γ_*` on `g_μ`.
pub fn gmu_operator(gamma: &NormalFormMap, tol: f64) -> Result<(Vec<PolyVectorField>, LinearOperatorMatrix)> {
    let op = PushforwardOperator::new(gamma)?;
    let basis = gmu_basis(gamma.eigenvalues(), tol);
    let keys = basis_keys(&basis);
    let images: Vec<PolyVectorField> = basis.iter().map(|b| op.id_minus(b)).collect();
    let matrix = LinearOperatorMatrix::assemble(keys.clone(), &keys, &images);
    Ok((basis, matrix))
}

/// Basis of the `γ`-invariant fields inside `span(g_μ)`: the kernel of
/// `Id − γ_*` restricted to `g_μ`, in reduced echelon form.
pub fn invariant_fields(gamma: &NormalFormMap, tol: f64) -> Result<Vec<PolyVectorField>> {
    let (basis, matrix) = gmu_operator(gamma, tol)?;
    let n = gamma.dim();
    Ok(null_space(&matrix.entries, RANK_THRESHOLD)
        .into_iter()
        .map(|coeffs| {
            coeffs
                .iter()
                .zip(&basis)
                .filter(|(c, _)| !c.is_zero())
                .fold(PolyVectorField::zero(n), |acc, (c, b)| &acc + &b.scale(c))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Leak {
    /// Index of the domain basis field whose image leaks.
    pub source: usize,
    pub target: usize,
    pub exponents: MultiIndex,
    pub coeff: Complex64,
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub basis: Vec<PolyVectorField>,
    /// Non-resonant monomials found in some `V − γ_* V`, `V ∈ g_μ`.
    pub violations: Vec<Leak>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `(Id − γ_*)(g_μ) ⊂ g_μ` on the monomial basis.
pub fn check_gmu_stability(gamma: &NormalFormMap, tol: f64) -> Result<StabilityReport> {
    let op = PushforwardOperator::new(gamma)?;
    let mu = gamma.eigenvalues();
    let basis = gmu_basis(mu, tol);
    let mut violations = Vec::new();
    for (i, v) in basis.iter().enumerate() {
        let img = op.id_minus(v);
        let scale = v.max_magnitude().max(1.0);
        for (s, m, c) in img.terms() {
            if c.norm() > LEAK_TOL * scale && !is_resonant(mu, s, &m, tol) {
                violations.push(Leak {
                    source: i,
                    target: s,
                    exponents: m,
                    coeff: c,
                });
            }
        }
    }
    Ok(StabilityReport { basis, violations })
}

#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub degree: u32,
    pub matrix: LinearOperatorMatrix,
    pub rank: RankInfo,
    /// Resonant monomials found in the image of `g_μ^⊥`.
    pub resonant_leaks: Vec<Leak>,
}

impl InjectivityReport {
    pub fn columns(&self) -> usize {
        self.matrix.domain.len()
    }

    pub fn full_rank(&self) -> bool {
        self.rank.rank == self.columns()
    }

    pub fn passed(&self) -> bool {
        self.full_rank() && self.resonant_leaks.is_empty()
    }
}

/// Non-resonant monomial fields of degree `≤ degree` (including constants).
pub fn perp_basis_keys(gamma: &NormalFormMap, degree: u32, tol: f64) -> Vec<FieldKey> {
    let mu = gamma.eigenvalues();
    let n = gamma.dim();
    let mut keys = Vec::new();
    for m in MultiIndex::all_up_to(n, 0, degree) {
        for s in 0..n {
            if !is_resonant(mu, s, &m, tol) {
                keys.push((s, m.clone()));
            }
        }
    }
    keys
}

/// Truncated check that `Id − γ_*` maps `g_μ^⊥` injectively into `g_μ^⊥`.
pub fn check_perp_injectivity(gamma: &NormalFormMap, degree: u32, tol: f64) -> Result<InjectivityReport> {
    let op = PushforwardOperator::new(gamma)?;
    let mu = gamma.eigenvalues();
    let n = gamma.dim();
    let keys = perp_basis_keys(gamma, degree, tol);
    let images: Vec<PolyVectorField> = keys
        .iter()
        .map(|(s, m)| op.id_minus(&PolyVectorField::monomial(n, *s, m.clone(), Complex64::new(1.0, 0.0))))
        .collect();
    let mut resonant_leaks = Vec::new();
    for (i, img) in images.iter().enumerate() {
        for (s, m, c) in img.terms() {
            if c.norm() > LEAK_TOL && is_resonant(mu, s, &m, tol) {
                resonant_leaks.push(Leak {
                    source: i,
                    target: s,
                    exponents: m,
                    coeff: c,
                });
            }
        }
    }
    let matrix = LinearOperatorMatrix::assemble(keys.clone(), &keys, &images);
    let rank = numerical_rank(&column_normalized(&matrix.entries), RANK_THRESHOLD);
    Ok(InjectivityReport {
        degree,
        matrix,
        rank,
        resonant_leaks,
    })
}

/// `Σ_l ∂V_l/∂z_l`.
pub fn holomorphic_divergence_trace<C: Coeff>(v: &PolyVectorField<C>) -> Poly<C> {
    let n = v.dim();
    v.components()
        .iter()
        .enumerate()
        .fold(Poly::zero(n), |acc, (l, p)| &acc + &p.partial(l))
}

/// Whether every term of `v` is resonant, i.e. `v ∈ g_μ`.
pub fn in_gmu(gamma: &NormalFormMap, v: &PolyVectorField, tol: f64) -> bool {
    let mu = gamma.eigenvalues();
    let scale = v.max_magnitude();
    v.terms()
        .iter()
        .all(|(s, m, c)| c.norm() <= LEAK_TOL * scale || is_resonant(mu, *s, m, tol))
}

/// Number of resonant pairs, i.e. `dim g_μ`.
pub fn gmu_dimension(gamma: &NormalFormMap, tol: f64) -> usize {
    resonance_table(gamma.eigenvalues(), tol).entries.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::{Eigenvalues, MonomialTerm};
    use crate::poly::{invert_triangular, ExactComplex};
    use crate::resonance::RESONANCE_TOL;
    use num::BigRational;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn mu(v: &[f64]) -> Eigenvalues {
        Eigenvalues::new(v.iter().map(|&x| c(x)).collect()).unwrap()
    }

    fn surface() -> NormalFormMap {
        NormalFormMap::new(
            mu(&[0.25, 0.5]),
            vec![MonomialTerm {
                target: 0,
                exponents: mi(&[0, 2]),
                coeff: c(1.0),
            }],
        )
        .unwrap()
    }

    fn field(n: usize, terms: &[(usize, &[u32], f64)]) -> PolyVectorField {
        PolyVectorField::from_terms(n, terms.iter().map(|(s, m, k)| (*s, mi(m), c(*k))))
    }

    #[test]
    fn pushforward_examples() {
        let d = NormalFormMap::diagonal(mu(&[0.25, 0.5]));
        let v = field(2, &[(0, &[1, 0], 1.0)]);
        assert_eq!(pushforward(&d, &v).unwrap(), v);

        let g = surface();
        let v = field(2, &[(0, &[0, 2], 1.0)]);
        assert_eq!(pushforward(&g, &v).unwrap(), v);

        let v = field(2, &[(1, &[1, 0], 1.0)]);
        let expect = field(
            2,
            &[
                (0, &[1, 1], 16.0),
                (0, &[0, 3], -64.0),
                (1, &[1, 0], 2.0),
                (1, &[0, 2], -8.0),
            ],
        );
        assert_eq!(pushforward(&g, &v).unwrap(), expect);
    }

    #[test]
    fn pushforward_exact_rational() {
        let q = |a: i64, b: i64| ExactComplex::new(BigRational::new(a.into(), b.into()), BigRational::zero());
        let n = 2;
        let tails = vec![Poly::monomial(mi(&[0, 2]), q(1, 1)), Poly::zero(n)];
        let diag = [q(1, 4), q(1, 2)];
        let forward = PolyMap::new(vec![
            &Poly::monomial(mi(&[1, 0]), q(1, 4)) + &tails[0],
            Poly::monomial(mi(&[0, 1]), q(1, 2)),
        ]);
        let inverse = invert_triangular(&diag, &tails);
        let v = PolyVectorField::monomial(n, 1, mi(&[1, 0]), q(1, 1));
        let got = pushforward_with(&forward.jacobian(), &inverse, &v);
        let expect = PolyVectorField::from_terms(
            n,
            [
                (0, mi(&[1, 1]), q(16, 1)),
                (0, mi(&[0, 3]), q(-64, 1)),
                (1, mi(&[1, 0]), q(2, 1)),
                (1, mi(&[0, 2]), q(-8, 1)),
            ],
        );
        assert_eq!(got, expect);
    }

    #[test]
    fn invariance_examples() {
        let d = NormalFormMap::diagonal(mu(&[0.25, 0.5]));
        for b in gmu_basis(d.eigenvalues(), RESONANCE_TOL) {
            assert!(is_invariant(&d, &b, 1e-12));
        }
        let g = surface();
        assert!(is_invariant(&g, &field(2, &[(0, &[0, 2], 1.0)]), 1e-12));
        assert!(!is_invariant(&g, &field(2, &[(1, &[1, 0], 1.0)]), 1e-12));
    }

    #[test]
    fn invariant_field_examples() {
        let d = NormalFormMap::diagonal(mu(&[0.25, 0.5]));
        assert_eq!(
            invariant_fields(&d, RESONANCE_TOL).unwrap(),
            gmu_basis(d.eigenvalues(), RESONANCE_TOL)
        );

        let g = surface();
        let inv = invariant_fields(&g, RESONANCE_TOL).unwrap();
        assert!(inv.len() <= 3);
        // rank computation: (Id − γ_*) z1∂1 = 4 z2²∂1, (Id − γ_*) z2∂2 = −8 z2²∂1
        assert_eq!(inv.len(), 2);
        let close = |w: &PolyVectorField| inv.iter().any(|v| (v - w).max_magnitude() < 1e-12);
        assert!(close(&field(2, &[(0, &[0, 2], 1.0)])));
        assert!(close(&field(2, &[(0, &[1, 0], 1.0), (1, &[0, 1], 0.5)])));
        for v in &inv {
            assert!(is_invariant(&g, v, 1e-12));
            assert!(in_gmu(&g, v, RESONANCE_TOL));
        }
    }

    #[test]
    fn gmu_operator_matrix() {
        let (_, m) = gmu_operator(&surface(), RESONANCE_TOL).unwrap();
        assert_eq!(m.entries.shape(), (3, 3));
        // basis order: z1∂1, z2∂2, z2²∂1
        assert_eq!(m.entries[(2, 0)], c(4.0));
        assert_eq!(m.entries[(2, 1)], c(-8.0));
        assert_eq!(m.entries.iter().filter(|x| !x.is_zero()).count(), 2);
    }

    #[test]
    fn stability_examples() {
        let d = NormalFormMap::diagonal(mu(&[0.25, 0.5]));
        let op = PushforwardOperator::new(&d).unwrap();
        for b in gmu_basis(d.eigenvalues(), RESONANCE_TOL) {
            assert!(op.id_minus(&b).is_zero());
        }
        assert!(check_gmu_stability(&d, RESONANCE_TOL).unwrap().passed());
        assert!(check_gmu_stability(&surface(), RESONANCE_TOL).unwrap().passed());

        // z2 e1 is not resonant (0.5 ≠ 0.25)
        let corrupted = NormalFormMap::new_unchecked(
            mu(&[0.25, 0.5]),
            vec![MonomialTerm {
                target: 0,
                exponents: mi(&[0, 1]),
                coeff: c(1.0),
            }],
        );
        let rep = check_gmu_stability(&corrupted, RESONANCE_TOL).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn injectivity_examples() {
        let d = NormalFormMap::diagonal(mu(&[0.25, 0.5]));
        let rep = check_perp_injectivity(&d, 2, RESONANCE_TOL).unwrap();
        assert!(rep.passed());
        // diagonal action: entries 1 − μ_s/μ^m, no off-diagonal terms
        let eig = d.eigenvalues();
        for (col, (s, m)) in rep.matrix.domain.iter().enumerate() {
            let expect = c(1.0) - eig.get(*s) / crate::resonance::mu_power(eig, m);
            for row in 0..rep.matrix.codomain.len() {
                let e = rep.matrix.entries[(row, col)];
                if rep.matrix.codomain[row] == (*s, m.clone()) {
                    assert!((e - expect).norm() < 1e-14);
                    assert!(e.norm() > 0.0);
                } else {
                    assert_eq!(e, c(0.0));
                }
            }
        }

        let rep = check_perp_injectivity(&surface(), 3, RESONANCE_TOL).unwrap();
        assert!(rep.full_rank() && rep.passed());

        let generic = NormalFormMap::diagonal(mu(&[0.3, 0.45]));
        let rep = check_perp_injectivity(&generic, 1, RESONANCE_TOL).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.matrix.codomain, rep.matrix.domain);
    }

    #[test]
    fn trace_examples() {
        let t = holomorphic_divergence_trace(&field(2, &[(0, &[1, 0], 1.0)]));
        assert_eq!(t, Poly::constant(2, c(1.0)));
        assert!(holomorphic_divergence_trace(&field(2, &[(0, &[0, 2], 1.0)])).is_zero());
        let t = holomorphic_divergence_trace(&field(2, &[(0, &[1, 0], 1.0), (1, &[0, 1], 1.0)]));
        assert_eq!(t, Poly::constant(2, c(2.0)));
    }
}

//! Sparse multivariate polynomials and polynomial maps.
//!
//! Coefficients are generic over [`Coeff`] so that the same composition and
//! inversion code runs over `Complex64` in production and over exact complex
//! rationals in tests.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::traits::{One, ToPrimitive, Zero};
use num::BigRational;
use num_complex::{Complex, Complex64};
use smallvec::SmallVec;

/// Relative threshold under which an accumulated coefficient is treated as
/// cancelled to zero (relative to the largest contribution to it).
pub const ZERO_THRESHOLD: f64 = 1e-14;

/// Exponent vector `m = (m_1, …, m_n)`.
///
/// Ordered graded-lexicographically: total degree first, then the larger
/// exponent in the earliest variable first, so `z_1` precedes `z_2`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = vec![0; n];
        m[i] = 1;
        MultiIndex(m)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Lowest variable index with a non-zero exponent.
    pub fn first_variable(&self) -> Option<usize> {
        self.0.iter().position(|&e| e > 0)
    }

    /// All multi-indices in `n` variables of total degree exactly `d`, in
    /// graded-lex order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=d).rev() {
                prefix.push(e);
                rec(n, d - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
        out
    }

    /// All multi-indices with `lo <= degree <= hi`, in graded-lex order.
    pub fn all_up_to(n: usize, lo: u32, hi: u32) -> Vec<MultiIndex> {
        (lo..=hi).flat_map(|d| Self::all_of_degree(n, d)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Coefficient field for [`Poly`].
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn magnitude(&self) -> f64;

    /// Whether an accumulated value should be dropped, given the magnitude
    /// of the largest contribution that produced it.
    fn negligible(&self, scale: f64) -> bool;
}

impl Coeff for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn negligible(&self, scale: f64) -> bool {
        let m = self.norm();
        m == 0.0 || m <= ZERO_THRESHOLD * scale
    }
}

/// Exact complex rational coefficients.
pub type ExactComplex = Complex<BigRational>;

impl Coeff for ExactComplex {
    fn magnitude(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }

    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

/// Accumulates coefficient contributions, remembering the largest one per
/// monomial so cancellation can be judged relatively.
struct Accumulator<C> {
    nvars: usize,
    map: BTreeMap<MultiIndex, (C, f64)>,
}

impl<C: Coeff> Accumulator<C> {
    fn new(nvars: usize) -> Self {
        Accumulator {
            nvars,
            map: BTreeMap::new(),
        }
    }

    fn push(&mut self, m: MultiIndex, c: C, scale: f64) {
        match self.map.get_mut(&m) {
            Some((acc, s)) => {
                *acc = acc.clone() + c;
                *s = s.max(scale);
            }
            None => {
                self.map.insert(m, (c, scale));
            }
        }
    }

    fn finish(self) -> Poly<C> {
        let terms = self
            .map
            .into_iter()
            .filter(|(_, (c, s))| !c.negligible(*s))
            .map(|(m, (c, _))| (m, c))
            .collect();
        Poly {
            nvars: self.nvars,
            terms,
        }
    }
}

/// Sparse polynomial in `nvars` variables.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C = Complex64> {
    nvars: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zeros(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(nvars, i), C::one())
    }

    pub fn monomial(m: MultiIndex, c: C) -> Self {
        let nvars = m.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Self {
        let mut acc = Accumulator::new(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "multi-index arity");
            let s = c.magnitude();
            acc.push(m, c, s);
        }
        acc.finish()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.terms.values().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    pub fn scale(&self, a: &C) -> Self {
        let mut acc = Accumulator::new(self.nvars);
        for (m, c) in &self.terms {
            let s = c.magnitude() * a.magnitude();
            acc.push(m.clone(), c.clone() * a.clone(), s);
        }
        acc.finish()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Poly::constant(self.nvars, C::one());
        for _ in 0..k {
            result = &result * self;
        }
        result
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut acc = Accumulator::new(self.nvars);
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e == 0 {
                continue;
            }
            let mut exps = m.as_slice().to_vec();
            exps[i] -= 1;
            let mut factor = C::zero();
            for _ in 0..e {
                factor = factor + C::one();
            }
            let s = c.magnitude() * e as f64;
            acc.push(MultiIndex(exps), c.clone() * factor, s);
        }
        acc.finish()
    }

    /// Substitute `subs[i]` for variable `i`. All substituted polynomials
    /// must share a common variable count, which becomes the result's.
    pub fn compose(&self, subs: &[Poly<C>]) -> Poly<C> {
        assert_eq!(subs.len(), self.nvars, "substitution arity");
        let out_vars = subs.first().map_or(0, |p| p.nvars);
        let mut powers: HashMap<(usize, u32), Poly<C>> = HashMap::new();
        let mut acc = Accumulator::new(out_vars);
        for (m, c) in &self.terms {
            let mut prod = Poly::constant(out_vars, c.clone());
            for (i, &e) in m.as_slice().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = cached_power(&mut powers, subs, i, e);
                prod = &prod * &p;
            }
            for (pm, pc) in prod.terms {
                let s = pc.magnitude();
                acc.push(pm, pc, s);
            }
        }
        acc.finish()
    }

    pub fn eval(&self, z: &[C]) -> C {
        let mut total = C::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (zi, &e) in z.iter().zip(m.as_slice()) {
                for _ in 0..e {
                    term = term * zi.clone();
                }
            }
            total = total + term;
        }
        total
    }

    /// Whether the polynomial only involves variables with index in `vars`.
    pub fn supported_on(&self, vars: impl Fn(usize) -> bool) -> bool {
        self.terms.keys().all(|m| {
            m.as_slice()
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || vars(i))
        })
    }
}

fn cached_power<C: Coeff>(
    cache: &mut HashMap<(usize, u32), Poly<C>>,
    subs: &[Poly<C>],
    i: usize,
    e: u32,
) -> Poly<C> {
    if let Some(p) = cache.get(&(i, e)) {
        return p.clone();
    }
    let p = if e == 1 {
        subs[i].clone()
    } else {
        let prev = cached_power(cache, subs, i, e - 1);
        &prev * &subs[i]
    };
    cache.insert((i, e), p.clone());
    p
}

impl<C: Coeff> Add for &Poly<C> {
    type Output = Poly<C>;

    fn add(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc = Accumulator::new(self.nvars);
        for (m, c) in self.terms.iter().chain(&rhs.terms) {
            acc.push(m.clone(), c.clone(), c.magnitude());
        }
        acc.finish()
    }
}

impl<C: Coeff> Sub for &Poly<C> {
    type Output = Poly<C>;

    fn sub(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc = Accumulator::new(self.nvars);
        for (m, c) in &self.terms {
            acc.push(m.clone(), c.clone(), c.magnitude());
        }
        for (m, c) in &rhs.terms {
            acc.push(m.clone(), -c.clone(), c.magnitude());
        }
        acc.finish()
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;

    fn mul(self, rhs: &Poly<C>) -> Poly<C> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc = Accumulator::new(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let s = ca.magnitude() * cb.magnitude();
                acc.push(ma.add(mb), ca.clone() * cb.clone(), s);
            }
        }
        acc.finish()
    }
}

impl<C: Coeff> Neg for &Poly<C> {
    type Output = Poly<C>;

    fn neg(self) -> Poly<C> {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

/// Polynomial map `ℂⁿ → ℂᵏ`, one polynomial per output component.
#[derive(Clone, PartialEq, Debug)]
pub struct PolyMap<C = Complex64> {
    comps: Vec<Poly<C>>,
}

impl<C: Coeff> PolyMap<C> {
    pub fn new(comps: Vec<Poly<C>>) -> Self {
        PolyMap { comps }
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            comps: (0..n).map(|i| Poly::var(n, i)).collect(),
        }
    }

    pub fn components(&self) -> &[Poly<C>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Poly<C>> {
        self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap<C>) -> PolyMap<C> {
        PolyMap {
            comps: self.comps.iter().map(|p| p.compose(&inner.comps)).collect(),
        }
    }

    /// Jacobian entries `∂F_j/∂z_l`, row-major by output component.
    pub fn jacobian(&self) -> Vec<Vec<Poly<C>>> {
        self.comps
            .iter()
            .map(|p| (0..p.nvars()).map(|l| p.partial(l)).collect())
            .collect()
    }

    pub fn eval(&self, z: &[C]) -> Vec<C> {
        self.comps.iter().map(|p| p.eval(z)).collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.comps
            .iter()
            .map(Poly::max_magnitude)
            .fold(0.0, f64::max)
    }
}

/// Inverts the triangular map `w_j = d_j z_j + P_j(z_{j+1}, …, z_n)` by back
/// substitution. Each `P_j` must only involve variables after `j`.
pub fn invert_triangular<C: Coeff>(diag: &[C], tails: &[Poly<C>]) -> PolyMap<C> {
    let n = diag.len();
    assert_eq!(tails.len(), n);
    let mut inv: Vec<Poly<C>> = (0..n).map(|i| Poly::var(n, i)).collect();
    for j in (0..n).rev() {
        debug_assert!(tails[j].supported_on(|i| i > j));
        let tail = tails[j].compose(&inv);
        let numer = &Poly::var(n, j) - &tail;
        let recip = C::one() / diag[j].clone();
        inv[j] = numer.scale(&recip);
    }
    PolyMap { comps: inv }
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    coeff: Complex64,
    factors: SmallVec<[(usize, u32); 4]>,
}

/// Flattened `Complex64` polynomial list for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPolys {
    nvars: usize,
    comps: Vec<Vec<CompiledTerm>>,
}

impl CompiledPolys {
    pub fn new(polys: &[Poly<Complex64>]) -> Self {
        let nvars = polys.first().map_or(0, Poly::nvars);
        let comps = polys
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(m, c)| CompiledTerm {
                        coeff: *c,
                        factors: m
                            .as_slice()
                            .iter()
                            .enumerate()
                            .filter(|(_, &e)| e > 0)
                            .map(|(i, &e)| (i, e))
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        CompiledPolys { nvars, comps }
    }

    pub fn from_map(map: &PolyMap<Complex64>) -> Self {
        Self::new(map.components())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    #[inline]
    pub fn eval_component(&self, j: usize, z: &[Complex64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for t in &self.comps[j] {
            let mut v = t.coeff;
            for &(i, e) in &t.factors {
                v *= z[i].powu(e);
            }
            total += v;
        }
        total
    }

    #[inline]
    pub fn eval_into(&self, z: &[Complex64], out: &mut [Complex64]) {
        for (j, o) in out.iter_mut().enumerate().take(self.comps.len()) {
            *o = self.eval_component(j, z);
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.comps.len()];
        self.eval_into(z, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn graded_lex_order() {
        let all = MultiIndex::all_up_to(2, 1, 2);
        let got: Vec<Vec<u32>> = all.iter().map(|m| m.as_slice().to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
    }

    #[test]
    fn degree_counts() {
        // C(d + n - 1, n - 1)
        assert_eq!(MultiIndex::all_of_degree(3, 4).len(), 15);
        assert_eq!(MultiIndex::all_up_to(2, 0, 4).len(), 15);
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = Poly::<Complex64>::var(2, 0);
        let y = Poly::<Complex64>::var(2, 1);
        let p = &(&x + &y) * &(&x - &y);
        let q = &(&x * &x) - &(&y * &y);
        assert!((&p - &q).is_zero());
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn partial_and_eval() {
        // p = 3 x^2 y + 2 i y^3
        let p = Poly::from_terms(
            2,
            [
                (MultiIndex::new(vec![2, 1]), c(3.0, 0.0)),
                (MultiIndex::new(vec![0, 3]), c(0.0, 2.0)),
            ],
        );
        let dx = p.partial(0);
        let dy = p.partial(1);
        let z = [c(0.5, -1.0), c(2.0, 0.25)];
        let expect_dx = c(6.0, 0.0) * z[0] * z[1];
        let expect_dy = c(3.0, 0.0) * z[0] * z[0] + c(0.0, 6.0) * z[1] * z[1];
        assert!((dx.eval(&z) - expect_dx).norm() < 1e-13);
        assert!((dy.eval(&z) - expect_dy).norm() < 1e-13);
    }

    #[test]
    fn compose_matches_pointwise() {
        let x = Poly::<Complex64>::var(2, 0);
        let y = Poly::<Complex64>::var(2, 1);
        let p = &(&x * &y) + &y.pow(3);
        let sub = vec![&x + &y.pow(2), y.scale(&c(0.5, 0.5))];
        let comp = p.compose(&sub);
        let z = [c(0.3, 0.1), c(-0.7, 0.2)];
        let inner: Vec<Complex64> = sub.iter().map(|s| s.eval(&z)).collect();
        assert!((comp.eval(&z) - p.eval(&inner)).norm() < 1e-14);
    }

    #[test]
    fn compiled_agrees_with_generic() {
        let x = Poly::<Complex64>::var(3, 0);
        let z3 = Poly::<Complex64>::var(3, 2);
        let p = &(&x.pow(2) * &z3) + &Poly::constant(3, c(1.0, -2.0));
        let compiled = CompiledPolys::new(std::slice::from_ref(&p));
        let z = [c(0.2, 0.9), c(5.0, 5.0), c(-0.3, 0.4)];
        assert!((compiled.eval_component(0, &z) - p.eval(&z)).norm() < 1e-15);
    }

    #[test]
    fn triangular_inverse_exact() {
        // w = (z1/4 + z2^2, z2/2) over exact rationals.
        let q = |a: i64, b: i64| ExactComplex::new(BigRational::new(a.into(), b.into()), BigRational::zero());
        let n = 2;
        let diag = [q(1, 4), q(1, 2)];
        let tails = vec![
            Poly::monomial(MultiIndex::new(vec![0, 2]), q(1, 1)),
            Poly::zero(n),
        ];
        let inv = invert_triangular(&diag, &tails);
        // z1 = 4 w1 - 16 w2^2, z2 = 2 w2
        let expect0 = Poly::from_terms(
            n,
            [
                (MultiIndex::new(vec![1, 0]), q(4, 1)),
                (MultiIndex::new(vec![0, 2]), q(-16, 1)),
            ],
        );
        assert_eq!(inv.components()[0], expect0);
        assert_eq!(
            inv.components()[1],
            Poly::monomial(MultiIndex::new(vec![0, 1]), q(2, 1))
        );
    }
}

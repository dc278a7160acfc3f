use num_complex::Complex64;
use proptest::prelude::*;

use hopf_futaki::calculus::{hermitian_hessian, ricci_density, FnLogDensity, HermitianHessian, DEFAULT_STEP};
use hopf_futaki::fields::{invariant_fields, pushforward, PolyVectorField};
use hopf_futaki::futaki::certified_volume;
use hopf_futaki::io::{parse_manifold, ManifoldFile};
use hopf_futaki::normal_form::conjugation_exponent;
use hopf_futaki::poly::{MultiIndex, PolyMap};
use hopf_futaki::resonance::{degree_bound, resonant_multi_indices, RESONANCE_TOL};
use hopf_futaki::volume::equivariance_residual;
use hopf_futaki::{Eigenvalues, MonomialTerm, NormalFormMap};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| cx(a, b))
}

/// `μ = (1/8, 1/4, 1/2)` with every resonant term present.
fn threefold(a: Complex64, b: Complex64, c: Complex64) -> NormalFormMap {
    let mu = Eigenvalues::new(vec![cx(0.125, 0.0), cx(0.25, 0.0), cx(0.5, 0.0)]).unwrap();
    let term = |target, e: [u32; 3], coeff| MonomialTerm {
        target,
        exponents: MultiIndex::new(e.to_vec()),
        coeff,
    };
    NormalFormMap::new(
        mu,
        vec![term(0, [0, 1, 1], a), term(0, [0, 0, 3], b), term(1, [0, 0, 2], c)],
    )
    .unwrap()
}

fn term_coeff() -> impl Strategy<Value = Complex64> {
    coeff().prop_filter("zero coefficient", |c| c.norm() > 1e-3)
}

fn threefold_strategy() -> impl Strategy<Value = NormalFormMap> {
    (term_coeff(), term_coeff(), term_coeff()).prop_map(|(a, b, c)| threefold(a, b, c))
}

fn field_strategy(n: usize, max_degree: u32) -> impl Strategy<Value = PolyVectorField> {
    let keys: Vec<(usize, MultiIndex)> = (0..n)
        .flat_map(|s| MultiIndex::all_up_to(n, 0, max_degree).into_iter().map(move |m| (s, m)))
        .collect();
    let len = keys.len();
    prop::collection::vec((0..len, coeff()), 1..5).prop_map(move |picks| {
        PolyVectorField::from_terms(n, picks.into_iter().map(|(i, c)| (keys[i].0, keys[i].1.clone(), c)))
    })
}

fn point(n: usize, scale: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-scale..scale, -scale..scale).prop_map(|(a, b)| cx(a, b)), n)
}

fn map_distance(a: &PolyMap, b: &PolyMap) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(p, q)| (p - q).max_magnitude())
        .fold(0.0, f64::max)
}

fn term_coeffs(map: &NormalFormMap) -> Vec<(usize, MultiIndex, Complex64)> {
    let mut v: Vec<_> = map
        .terms()
        .iter()
        .map(|t| (t.target, t.exponents.clone(), t.coeff))
        .collect();
    v.sort_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)));
    v
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn inverse_composes_to_identity(map in threefold_strategy()) {
        let inv = map.invert().unwrap();
        let fwd = map.to_poly_map();
        let id = PolyMap::identity(3);
        prop_assert!(map_distance(&inv.compose(&fwd), &id) < 1e-10);
        prop_assert!(map_distance(&fwd.compose(&inv), &id) < 1e-10);
    }

    #[test]
    fn pushforward_is_linear(
        map in threefold_strategy(),
        v in field_strategy(3, 2),
        w in field_strategy(3, 2),
        a in coeff(),
        b in coeff(),
    ) {
        let combo = &v.scale(&a) + &w.scale(&b);
        let lhs = pushforward(&map, &combo).unwrap();
        let rhs = &pushforward(&map, &v).unwrap().scale(&a) + &pushforward(&map, &w).unwrap().scale(&b);
        let scale = lhs.max_magnitude().max(1.0);
        prop_assert!((&lhs - &rhs).max_magnitude() <= 1e-10 * scale);
    }

    #[test]
    fn pushforward_matches_defining_relation(
        map in threefold_strategy(),
        v in field_strategy(3, 2),
        w in point(3, 0.4),
    ) {
        // γ_*V(w) = dγ(γ⁻¹w) V(γ⁻¹w), evaluated numerically
        let pushed = pushforward(&map, &v).unwrap();
        let z = map.invert().unwrap().eval(&w);
        let jac = map.to_poly_map().jacobian();
        let vz = v.eval(&z);
        let expected: Vec<Complex64> = (0..3)
            .map(|i| (0..3).map(|j| jac[i][j].eval(&z) * vz[j]).sum())
            .collect();
        let got = pushed.eval(&w);
        let scale = expected.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!((g - e).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn invariant_fields_are_fixed(map in threefold_strategy()) {
        for v in invariant_fields(&map, RESONANCE_TOL).unwrap() {
            let pushed = pushforward(&map, &v).unwrap();
            prop_assert!((&pushed - &v).max_magnitude() <= 1e-10 * v.max_magnitude().max(1.0));
        }
    }

    #[test]
    fn conjugation_group_law(map in threefold_strategy(), s in 0.25..4.0f64, t in 0.25..4.0f64) {
        let twice = map.conjugate_dt(s).unwrap().conjugate_dt(t).unwrap();
        let once = map.conjugate_dt(s * t).unwrap();
        for ((ta, ma, ca), (tb, mb, cb)) in term_coeffs(&twice).into_iter().zip(term_coeffs(&once)) {
            prop_assert_eq!(ta, tb);
            prop_assert_eq!(ma, mb);
            prop_assert!((ca - cb).norm() <= 1e-12 * ca.norm().max(cb.norm()));
        }
    }

    #[test]
    fn conjugation_exponent_is_exact_for_dyadic_t(map in threefold_strategy(), k in -6i32..7) {
        let t = 2f64.powi(k);
        let conj = map.conjugate_dt(t).unwrap();
        for (orig, new) in term_coeffs(&map).into_iter().zip(term_coeffs(&conj)) {
            let e = conjugation_exponent(orig.0, &orig.1);
            let weighted: i64 = orig.1.as_slice().iter().enumerate().map(|(l, &m)| (l as i64 + 1) * m as i64).sum();
            prop_assert_eq!(e, orig.0 as i64 + 1 - weighted);
            prop_assert_eq!(new.2, orig.2 * 2f64.powi(k * e as i32));
        }
    }

    #[test]
    fn resonances_match_integer_oracle(
        mut weights in prop::collection::vec(1i64..6, 2..5),
        rho in 0.3..0.9f64,
        theta in 0.0..std::f64::consts::PI,
    ) {
        weights.sort_by(|a, b| b.cmp(a));
        let n = weights.len();
        let mu = Eigenvalues::new(
            weights.iter().map(|&a| Complex64::from_polar(rho.powi(a as i32), theta * a as f64)).collect(),
        ).unwrap();
        let bound = degree_bound(&mu);
        prop_assert_eq!(bound as i64, weights[0] / weights[n - 1]);
        for s in 0..n {
            let expected: Vec<MultiIndex> = MultiIndex::all_up_to(n, 1, bound + 2)
                .into_iter()
                .filter(|m| m.as_slice().iter().zip(&weights).map(|(&e, &a)| e as i64 * a).sum::<i64>() == weights[s])
                .collect();
            prop_assert_eq!(resonant_multi_indices(&mu, s, RESONANCE_TOL), expected);
        }
    }

    #[test]
    fn composition_commutes_with_evaluation(
        p in field_strategy(2, 3),
        q in field_strategy(2, 2),
        z in point(2, 0.8),
    ) {
        let inner = PolyMap::new(q.components().to_vec());
        let composed = p.compose(&inner);
        let direct = p.eval(&inner.eval(&z));
        for (poly, d) in composed.iter().zip(&direct) {
            prop_assert!((poly.eval(&z) - d).norm() <= 1e-12 * d.norm().max(1.0));
        }
    }

    #[test]
    fn manifold_json_round_trips(map in threefold_strategy(), t in 0.5..3.0f64) {
        let map = map.conjugate_dt(t).unwrap();
        let text = ManifoldFile::from_map(&map).to_json().to_pretty();
        let back = parse_manifold(&text).unwrap();
        prop_assert_eq!(back, map);
    }

    #[test]
    fn pluriharmonic_part_drops_out_of_hessian(z in point(2, 0.7), a in coeff(), b in coeff()) {
        // log f = |z|² + Re(a z₁² z₂ + b z₂³) has complex Hessian I
        let f = FnLogDensity::new(2, move |w: &[Complex64]| {
            let h = a * w[0] * w[0] * w[1] + b * w[1] * w[1] * w[1];
            w[0].norm_sqr() + w[1].norm_sqr() + h.re
        });
        let h = hermitian_hessian(&f, &z, DEFAULT_STEP).unwrap();
        let mut id = HermitianHessian::zeros(2);
        id.entries[(0, 0)] = cx(1.0, 0.0);
        id.entries[(1, 1)] = cx(1.0, 0.0);
        let err = (&h.entries - &id.entries).iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-6, "{err}");
        prop_assert!((ricci_density(&h).value - 2.0).abs() < 1e-5);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn certified_volumes_are_equivariant(map in threefold_strategy(), seed in any::<u64>()) {
        let (_, _, vol) = certified_volume(&map, 0.8, 1.05).unwrap();
        prop_assert!(equivariance_residual(&vol, 500, seed).unwrap() <= 1e-12);
    }
}

use num_complex::Complex64;

use hopf_futaki::fields::PolyVectorField;
use hopf_futaki::futaki::{futaki_invariant, IntegrationConfig, SamplingMethod};
use hopf_futaki::poly::MultiIndex;
use hopf_futaki::volume::{DEFAULT_C, DEFAULT_OUTER_RADIUS};
use hopf_futaki::{Eigenvalues, EquivariantVolume, NormalFormMap};

const SEEDS: u64 = 30;

/// Over many seeds, `|F|² / stderr²` should average about 1 for a field
/// whose invariant vanishes, and `|F| ≤ 3·stderr` should hold most of the
/// time.
fn calibration(method: SamplingMethod) -> (f64, usize) {
    let map = NormalFormMap::diagonal(Eigenvalues::new(vec![Complex64::new(0.5, 0.0); 2]).unwrap());
    let vol = EquivariantVolume::new(&map, DEFAULT_C, DEFAULT_OUTER_RADIUS).unwrap();
    let v = PolyVectorField::monomial(2, 0, MultiIndex::new(vec![1, 0]), Complex64::new(1.0, 0.0));
    let mut ratio_sum = 0.0;
    let mut covered = 0;
    for seed in 0..SEEDS {
        let cfg = IntegrationConfig {
            samples: 4096,
            seed,
            method,
            ..IntegrationConfig::default()
        };
        let est = futaki_invariant(&vol, DEFAULT_C, &v, &cfg).unwrap();
        ratio_sum += est.value.norm_sqr() / (est.stderr * est.stderr);
        if est.is_vanishing() {
            covered += 1;
        }
    }
    (ratio_sum / SEEDS as f64, covered)
}

#[test]
fn mc_stderr_is_calibrated() {
    let (mean_ratio, covered) = calibration(SamplingMethod::Mc);
    assert!((0.5..1.6).contains(&mean_ratio), "mean |F|²/σ² = {mean_ratio}");
    assert!(covered >= 27, "{covered}/{SEEDS} within 3σ");
}

#[test]
fn qmc_stderr_is_calibrated() {
    let (mean_ratio, covered) = calibration(SamplingMethod::Qmc);
    assert!((0.4..1.8).contains(&mean_ratio), "mean |F|²/σ² = {mean_ratio}");
    assert!(covered >= 27, "{covered}/{SEEDS} within 3σ");
}

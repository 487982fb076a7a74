mod common;

use common::{naive_quantized_mi, oracle_instance, oracle_worst_gap};
use losmimo_core::infotheory::mi_quantized_exact;
use losmimo_core::{ChannelMatrix, Complex64, InputEnsemble, NoiseModel};

#[test]
fn exact_engine_matches_naive_pattern_sum() {
    let (gap, label) = oracle_worst_gap(40);
    assert!(gap < 1e-9, "worst gap {gap:e} at {label}");
}

#[test]
fn oracle_instances_cover_boundary_means() {
    let (h, e, noise, label) = oracle_instance(0);
    assert!(label.contains("degenerate"));
    let means = e.means(&h).unwrap();
    assert!(means.iter().any(|m| m.re == 0.0 || m.im == 0.0));
    let exact = mi_quantized_exact(&h, &e, &noise).unwrap().bpcu;
    assert!((exact - naive_quantized_mi(&h, &e, noise.sigma2())).abs() < 1e-9);
}

#[test]
fn binary_input_closed_form() {
    // x = ±1 through a real unit gain is a binary symmetric channel on the real
    // comparator with crossover erfc(1/σ)/2; values from 40-digit arithmetic
    let h = ChannelMatrix::from_rows(1, 1, vec![Complex64::new(1.0, 0.0)]).unwrap();
    let e = InputEnsemble::new(
        1,
        vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        vec![0.5, 0.5],
    )
    .unwrap();
    for (sigma2, expected) in [
        (0.1, 0.999_924_799_238_271_6),
        (1.0, 0.602_596_980_715_330_6),
        (4.0, 0.205_375_607_382_526_3),
    ] {
        let exact = mi_quantized_exact(&h, &e, &NoiseModel::new(sigma2).unwrap())
            .unwrap()
            .bpcu;
        assert!(
            (exact - expected).abs() < 1e-14,
            "{sigma2}: {exact} vs {expected}"
        );
    }
}

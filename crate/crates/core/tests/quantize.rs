use std::f64::consts::TAU;

use berryline::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn internal_part_is_plus_minus_half_gap(rc in 0.1..10.0f64, r in 0.0..10.0f64, m in -20i64..20, hbar in 0.01..2.0f64) {
        let internal = TwoLevelModel::new(rc, r).unwrap();
        let c = CollectiveModel::quadratic(1.3, hbar).unwrap();
        for b in [Branch::Plus, Branch::Minus] {
            let lvl = quantize_level(&c, &internal, m, b).unwrap();
            let inner = lvl.energy_exact - collective_energy(&c, lvl.p_quantized);
            prop_assert!((inner - b.sign() * internal.half_gap()).abs() <= 1e-12 * (1.0 + lvl.energy_exact.abs()));
            prop_assert_eq!(lvl.p_quantized, (m as f64 - lvl.gamma / TAU) * hbar);
        }
    }

    #[test]
    fn berry_shift_direction(rc in 0.1..10.0f64, r in 0.0..10.0f64, m in -20i64..20) {
        let internal = TwoLevelModel::new(rc, r).unwrap();
        let c = CollectiveModel::linear(1.0, 0.5).unwrap();
        let up = quantize_level(&c, &internal, m, Branch::Plus).unwrap();
        let down = quantize_level(&c, &internal, m, Branch::Minus).unwrap();
        prop_assert!(up.gamma <= 0.0 && up.p_quantized >= m as f64 * 0.5);
        prop_assert!(down.gamma >= 0.0 && down.p_quantized <= m as f64 * 0.5);
    }
}

#[test]
fn linear_levels_increase_with_m() {
    let internal = TwoLevelModel::new(1.0, 2.0).unwrap();
    let c = CollectiveModel::linear(0.7, 1.0).unwrap();
    for b in [Branch::Plus, Branch::Minus] {
        let e: Vec<f64> = (-10..=10)
            .map(|m| quantize_level(&c, &internal, m, b).unwrap().energy_exact)
            .collect();
        assert!(e.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn truncation_residual_scales_as_hbar_squared() {
    let internal = TwoLevelModel::new(1.0, 1.0).unwrap();
    // Fixed m·ħ: the residual vanishes as ħ → 0.
    let mut prev = f64::INFINITY;
    for (m, hbar) in [(5, 0.1), (10, 0.05), (20, 0.025)] {
        let c = CollectiveModel::quadratic(1.0, hbar).unwrap();
        let r = quantize_level(&c, &internal, m, Branch::Plus)
            .unwrap()
            .truncation_residual();
        if prev.is_finite() {
            let ratio = prev / r;
            assert!((3.6..=4.4).contains(&ratio), "{ratio}");
        }
        prev = r;
    }
}

#[test]
fn spectrum_order_is_deterministic() {
    let internal = TwoLevelModel::new(1.0, 0.0).unwrap();
    // ω = 2Rc makes (m, +) and (m + 1, -) ... coincide pairwise.
    let c = CollectiveModel::linear(2.0, 1.0).unwrap();
    let a = spectrum(&c, &internal, -3..=3).unwrap();
    let b = spectrum(&c, &internal, -3..=3).unwrap();
    assert_eq!(a, b);
    for w in a.windows(2) {
        if w[0].energy_exact == w[1].energy_exact {
            assert!(w[0].m < w[1].m);
        }
    }
}

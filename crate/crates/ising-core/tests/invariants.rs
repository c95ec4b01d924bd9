//! Property tests for the core model: gauge covariance checked exhaustively
//! on small models, and format round-trips on arbitrary coefficients.

use ising_core::{parse_ising, write_ising, IsingModel};
use proptest::prelude::*;

fn arb_model(max_vars: usize) -> impl Strategy<Value = IsingModel<f64>> {
    (2..=max_vars).prop_flat_map(|n| {
        let edge_values = prop::collection::btree_map(
            (0..n as u32, 0..n as u32).prop_filter("distinct", |(a, b)| a != b),
            -4.0f64..4.0,
            0..n * 2,
        );
        let h_values = prop::collection::btree_map(0..n as u32, -4.0f64..4.0, 0..n);
        (Just(n), h_values, edge_values, -4.0f64..4.0).prop_map(|(n, hs, js, off)| {
            let mut m = IsingModel::new(n);
            m.set_offset(off);
            for (i, v) in hs {
                m.set_h(i, v).unwrap();
            }
            for ((a, b), v) in js {
                m.set_j(a, b, v).unwrap();
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Energies are invariant under simultaneous spin reversal of the model
    /// and the configuration — exhaustively over all configurations.
    #[test]
    fn gauge_covariance_exhaustive(model in arb_model(10), mask_seed: u64) {
        let n = model.num_vars();
        let flip: Vec<bool> = (0..n).map(|i| mask_seed >> (i % 64) & 1 == 1).collect();
        let gauged = model.spin_reversal(&flip).unwrap();
        for cfg in 0u32..(1 << n) {
            let z: Vec<i8> = (0..n).map(|k| if cfg >> k & 1 == 1 { 1 } else { -1 }).collect();
            let zt: Vec<i8> = z
                .iter()
                .enumerate()
                .map(|(i, &s)| if flip[i] { -s } else { s })
                .collect();
            let a = model.energy(&z).unwrap();
            let b = gauged.energy(&zt).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    /// Double reversal is the identity.
    #[test]
    fn gauge_involution(model in arb_model(10), mask_seed: u64) {
        let n = model.num_vars();
        let flip: Vec<bool> = (0..n).map(|i| mask_seed >> (i % 64) & 1 == 1).collect();
        let back = model.spin_reversal(&flip).unwrap().spin_reversal(&flip).unwrap();
        prop_assert_eq!(model, back);
    }

    /// Text round-trips reproduce the model bit-for-bit.
    #[test]
    fn format_roundtrip(model in arb_model(12)) {
        let parsed = parse_ising::<f64>(&write_ising(&model), "prop").unwrap();
        prop_assert_eq!(model, parsed);
    }
}

use proptest::prelude::*;

use noisefit::generators::{gen_random, synthetic_calibration, Topology};
use noisefit::metrics::{circuit_fidelity_estimate, hellinger};
use noisefit::noise::{column_stochastic_error2, column_stochastic_error4};
use noisefit::simulator::{sample_counts, simulate, SimOptions};
use noisefit::{
    build_parameterized_model, circuit_stats, parse_circuit, serialize_circuit, CircuitBuilder, GateTag, NoiseParams,
};

fn dist(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter("nonzero mass", |v| v.iter().sum::<f64>() > 1e-9)
}

fn params() -> impl Strategy<Value = NoiseParams> {
    prop::collection::vec(-1.0f64..1.0, NoiseParams::DIM).prop_map(|u| {
        let mut v = [0.0; NoiseParams::DIM];
        for (i, name) in NoiseParams::NAMES.iter().enumerate() {
            v[i] = match *name {
                "k_dep" | "k_dep_2q" => 40.0 * u[i],
                "beta_1q" | "beta_2q" => 0.1 + 4.0 * u[i].abs(),
                n if n.starts_with("theta") => 0.5 * u[i],
                "ro_a_0011" | "ro_a_0110" => 5.0 * u[i],
                _ => 0.2 * u[i],
            };
        }
        NoiseParams::from_array(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hellinger_is_a_bounded_symmetric_metric(p in dist(8), q in dist(8), r in dist(8)) {
        let pq = hellinger(&p, &q).unwrap();
        prop_assert_eq!(pq, hellinger(&q, &p).unwrap());
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert_eq!(hellinger(&p, &p).unwrap(), 0.0);
        let pr = hellinger(&p, &r).unwrap();
        let rq = hellinger(&r, &q).unwrap();
        prop_assert!(pq <= pr + rq + 1e-12);
    }

    #[test]
    fn circuits_round_trip(n in 2usize..7, seed in any::<u64>()) {
        let c = gen_random(n, seed, Topology::AllToAll, "r").unwrap();
        prop_assert_eq!(parse_circuit(&serialize_circuit(&c)).unwrap(), c.clone());
        let st = circuit_stats(&c);
        let per_qubit_max = (0..n).map(|q| c.ops().iter().filter(|o| o.qubits.contains(&q)).count()).max().unwrap();
        prop_assert!(st.depth >= per_qubit_max);
    }

    #[test]
    fn parameterized_models_are_physical(p in params(), seed in 0u64..50) {
        let cal = synthetic_calibration(3, seed, GateTag::Cx).unwrap();
        let model = build_parameterized_model(&p, &cal, &[0, 1, 2]).unwrap();
        for ch in model.gate_channels().values() {
            prop_assert!(ch.completeness_error() < 1e-9);
        }
        for m in model.readout().pair_matrices.values() {
            prop_assert!(column_stochastic_error4(m) < 1e-12);
            prop_assert!(m.iter().flatten().all(|&x| (0.0..=1.0).contains(&x)));
        }
        for m in model.readout().single_matrices.values() {
            prop_assert!(column_stochastic_error2(m) < 1e-12);
        }
        let c = gen_random(3, seed, Topology::Linear, "r").unwrap();
        let probs = simulate(&c, Some(&model), &SimOptions::default()).unwrap().probs;
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(probs.iter().all(|&x| x > -1e-12));
    }

    #[test]
    fn sampled_counts_total_shots(seed in any::<u64>(), shots in 1u64..5000) {
        let c = gen_random(3, seed, Topology::AllToAll, "r").unwrap();
        let p = simulate(&c, None, &SimOptions::default()).unwrap();
        let counts = sample_counts(&p, shots, seed).unwrap();
        prop_assert_eq!(counts.table().values().sum::<u64>(), shots);
        prop_assert_eq!(counts.width(), 3);
    }

    #[test]
    fn fidelity_estimate_is_nonincreasing(ops in prop::collection::vec(0u8..4, 0..12)) {
        let cal = synthetic_calibration(2, 0, GateTag::Cx).unwrap();
        let mut b = CircuitBuilder::new("f", 2);
        let mut last = 1.0;
        for op in ops {
            match op {
                0 => b.sx(0),
                1 => b.x(1),
                2 => b.rz(0, 0.3),
                _ => b.cx(1, 0),
            };
            let f = circuit_fidelity_estimate(&b.build().unwrap(), &cal).unwrap();
            prop_assert!(f <= last && f >= 0.0);
            last = f;
        }
    }
}

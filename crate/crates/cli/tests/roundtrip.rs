use proptest::prelude::*;
use sta_cli::protocol_file::{GridBlock, PropagationBlock, UnitsBlock};
use sta_cli::{Method, ProtocolFile, Schedule};
use sta_core::raman::RamanParams;

fn positive() -> impl Strategy<Value = f64> {
    (1e-300f64..1e300).prop_union(0.001f64..1000.0)
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Ii), Just(Method::Tt), Just(Method::TtBare), Just(Method::Plain)]
}

prop_compose! {
    fn raman_block()(v in prop::array::uniform11(positive()), phi1 in -10.0f64..10.0, k2 in -1e3f64..1e3) -> RamanParams {
        RamanParams {
            rabi1: v[0], rabi2: v[1], omega1: v[2], omega2: v[3], phi1, phi2: v[4], k1: v[5], k2,
            omega_e: v[6], omega: v[7], mass: v[8],
        }
    }
}

prop_compose! {
    fn protocol()(
        hbar in positive(), mass in positive(), method in method(), engineered in any::<bool>(),
        omega0 in positive(), omegaf in positive(), t_f in positive(),
        x_max in prop::option::of(positive()), log_n in 6u32..14,
        n_steps in prop::option::of(1usize..10_000_000), observers in 2usize..5000, n_max in 0usize..512,
        raman in prop::option::of(raman_block()),
        states in prop::collection::btree_set(0usize..512, 1..6),
    ) -> ProtocolFile {
        ProtocolFile {
            version: 1,
            units: UnitsBlock { hbar, mass },
            method,
            schedule: if engineered { Schedule::Engineered } else { Schedule::LinearRamp },
            omega0, omegaf, t_f,
            grid: GridBlock { x_max, n_points: 1 << log_n },
            propagation: PropagationBlock { n_steps, observers, n_max },
            raman,
            initial_states: states.into_iter().collect(),
        }
    }
}

proptest! {
    #[test]
    fn protocol_files_round_trip_bit_exactly(p in protocol()) {
        let text = p.to_canonical_json();
        let back = ProtocolFile::from_json(&text).unwrap();
        prop_assert_eq!(&back, &p);
        for (a, b) in [(back.omega0, p.omega0), (back.omegaf, p.omegaf), (back.t_f, p.t_f), (back.units.hbar, p.units.hbar)] {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(back.to_canonical_json(), text);
    }
}

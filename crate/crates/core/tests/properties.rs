use num_complex::Complex64;
use proptest::prelude::*;

use sta_core::counterdiabatic::{apply_squeeze, h1_term, squeeze_generator_matrix, SqueezeParameter};
use sta_core::invariant::{design_quintic, invert_ermakov, solve_ermakov_forward, uniform_times};
use sta_core::ode::OdeOptions;
use sta_core::oscillator::{dt_matrix_element, eigenstate, inner_product, quadratic_expectation};
use sta_core::raman::{adiabaticity_diagnostic, effective_params, second_sideband_coupling, RamanParams};
use sta_core::spectral::Spectral;
use sta_core::{FockIndex, FrequencyProtocol, QuadraticHamiltonian, SpatialGrid, UnitSystem, Wavefunction};

fn squeeze_grid() -> SpatialGrid {
    SpatialGrid::new(30.0, 1024).unwrap()
}

fn sup_diff(a: &Wavefunction, b: &Wavefunction) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn ermakov_round_trip(omega0 in 0.5f64..2.0, gamma in 0.4f64..8.0, t_f in 0.5f64..4.0) {
        let scaling = design_quintic(omega0, omega0 / (gamma * gamma), t_f).unwrap();
        let protocol = invert_ermakov(&scaling).unwrap();
        let times = uniform_times(t_f, 500);
        let samples = solve_ermakov_forward(&protocol, 1.0, 0.0, &times, &OdeOptions::default()).unwrap();
        let err = samples.iter().map(|s| (s.b - scaling.b(s.t)).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-8, "sup |b - b_quintic| = {err:e}");
    }

    #[test]
    fn orthonormal_eigenbasis(omega in 0.01f64..100.0) {
        let units = UnitSystem::default();
        let grid = SpatialGrid::sized_for(omega, 10, 256, &units).unwrap();
        let basis: Vec<_> = (0..=10).map(|n| eigenstate(FockIndex(n), omega, &grid, &units).unwrap()).collect();
        for (m, bm) in basis.iter().enumerate() {
            for (n, bn) in basis.iter().enumerate() {
                let expected = if m == n { 1.0 } else { 0.0 };
                let z = inner_product(bm, bn).unwrap();
                prop_assert!((z - expected).norm() < 1e-9, "<{m}|{n}> = {z}");
            }
        }
    }

    #[test]
    fn eigen_energy(omega in 0.1f64..10.0, hbar in 0.5f64..2.0, mass in 0.5f64..3.0, n in 0usize..12) {
        let units = UnitSystem::new(hbar, mass).unwrap();
        let grid = SpatialGrid::sized_for(omega, 12, 256, &units).unwrap();
        let psi = eigenstate(FockIndex(n), omega, &grid, &units).unwrap();
        let e = quadratic_expectation(&psi, &QuadraticHamiltonian::oscillator(omega * omega, &units), &units).unwrap();
        let exact = hbar * omega * (n as f64 + 0.5);
        prop_assert!((e - exact).abs() < 1e-7 * exact);
    }

    #[test]
    fn matrix_elements_match_finite_difference(omega in 0.2f64..5.0, omega_dot in -3.0f64..3.0) {
        let units = UnitSystem::default();
        let grid = SpatialGrid::sized_for(omega * 0.5, 8, 512, &units).unwrap();
        let eps = 1e-5 * omega;
        for n in 0..=8 {
            let up = eigenstate(FockIndex(n), omega + eps, &grid, &units).unwrap();
            let dn = eigenstate(FockIndex(n), omega - eps, &grid, &units).unwrap();
            for k in 0..=8 {
                let bra = eigenstate(FockIndex(k), omega, &grid, &units).unwrap();
                let fd = (inner_product(&bra, &up).unwrap() - inner_product(&bra, &dn).unwrap()).re / (2.0 * eps) * omega_dot;
                let exact = dt_matrix_element(FockIndex(k), FockIndex(n), omega, omega_dot);
                prop_assert!((fd - exact).abs() < 1e-6, "k={k} n={n}: {fd} vs {exact}");
                prop_assert_eq!(exact, -dt_matrix_element(FockIndex(n), FockIndex(k), omega, omega_dot));
            }
        }
    }

    #[test]
    fn h1_matrix_elements_are_i_hbar_dt(omega0 in 0.5f64..2.0, omegaf in 0.2f64..3.0, s in 0.0f64..1.0, hbar in 0.5f64..2.0) {
        let units = UnitSystem::new(hbar, 1.0).unwrap();
        let protocol = FrequencyProtocol::linear_ramp(omega0, omegaf, 1.0).unwrap();
        let t = s;
        let omega = protocol.omega(t).unwrap();
        let omega_dot = protocol.omega_dot(t).unwrap();
        let h1 = h1_term(&protocol, t).unwrap().hamiltonian();
        let grid = SpatialGrid::sized_for(omega, 10, 512, &units).unwrap();
        let spectral = Spectral::new(&grid);
        let basis: Vec<_> = (0..=10).map(|n| eigenstate(FockIndex(n), omega, &grid, &units).unwrap()).collect();
        for (n, bn) in basis.iter().enumerate() {
            let h_n = h1.apply(bn, &spectral, &units);
            for (k, bk) in basis.iter().enumerate() {
                let z: Complex64 = bk.amplitudes().iter().zip(&h_n).map(|(a, b)| a.conj() * b).sum::<Complex64>() * grid.dx();
                let exact = Complex64::new(0.0, hbar * dt_matrix_element(FockIndex(k), FockIndex(n), omega, omega_dot));
                prop_assert!((z - exact).norm() < 1e-8, "k={k} n={n}: {z} vs {exact}");
            }
        }
    }

    #[test]
    fn h1_commutes_with_itself(omega0 in 0.5f64..2.0, omegaf in 0.1f64..3.0, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        const N: usize = 40;
        let units = UnitSystem::default();
        let protocol = FrequencyProtocol::linear_ramp(omega0, omegaf, 1.0).unwrap();
        let g = squeeze_generator_matrix(N, &units);
        let matrix = |t: f64| -> Vec<Complex64> {
            let c = h1_term(&protocol, t).unwrap().coefficient;
            g.iter().map(|z| z * -c).collect()
        };
        let (a, b) = (matrix(t1), matrix(t2));
        let mut norm_sq = 0.0;
        for i in 0..N {
            for j in 0..N {
                let mut z = Complex64::new(0.0, 0.0);
                for k in 0..N {
                    z += a[i * N + k] * b[k * N + j] - b[i * N + k] * a[k * N + j];
                }
                norm_sq += z.norm_sqr();
            }
        }
        prop_assert!(norm_sq.sqrt() < 1e-10);
    }

    #[test]
    fn squeeze_group_law(r1 in -0.6f64..0.6, r2 in -0.6f64..0.6, n in 0usize..4) {
        let units = UnitSystem::default();
        let grid = squeeze_grid();
        let psi = eigenstate(FockIndex(n), 1.0, &grid, &units).unwrap();
        let two_step = apply_squeeze(SqueezeParameter(r2), &apply_squeeze(SqueezeParameter(r1), &psi).unwrap()).unwrap();
        let one_step = apply_squeeze(SqueezeParameter(r1 + r2), &psi).unwrap();
        prop_assert!(sup_diff(&two_step, &one_step) < 1e-8);
    }

    #[test]
    fn squeeze_scales_position_variance(r in -1.0f64..1.0, n in 0usize..6) {
        let units = UnitSystem::default();
        let grid = squeeze_grid();
        let psi = eigenstate(FockIndex(n), 1.0, &grid, &units).unwrap();
        let squeezed = apply_squeeze(SqueezeParameter(r), &psi).unwrap();
        let expected = (-2.0 * r).exp() * psi.x2_expectation();
        prop_assert!((squeezed.x2_expectation() - expected).abs() < 1e-8 * expected.max(1.0));
    }

    #[test]
    fn effective_params_are_self_consistent(
        rabi1 in 0.01f64..2.0, rabi2 in 0.01f64..2.0,
        omega1 in 10.0f64..20.0, omega2 in 10.0f64..20.0,
        phi1 in -3.0f64..3.0, phi2 in -3.0f64..3.0,
        k1 in -5.0f64..5.0, k2 in -5.0f64..5.0,
        omega_e in 1.0f64..30.0, omega in 0.1f64..2.0, mass in 0.5f64..2.0,
    ) {
        let raw = RamanParams { rabi1, rabi2, omega1, omega2, phi1, phi2, k1, k2, omega_e, omega, mass };
        let units = UnitSystem::default();
        let detuning = (omega1 + omega2) / 2.0 - omega_e;
        prop_assume!(detuning != 0.0);
        let a = effective_params(&raw, &units).unwrap();
        prop_assert_eq!(&a, &effective_params(&raw, &units).unwrap());
        let x0 = (units.hbar / (2.0 * mass * omega)).sqrt();
        prop_assert_eq!(a.detuning, detuning);
        prop_assert_eq!(a.delta, omega1 - omega2);
        prop_assert_eq!(a.phi, phi1 - phi2);
        prop_assert_eq!(a.rabi, rabi1 * rabi2 / (2.0 * detuning));
        prop_assert_eq!(a.stark, (rabi1 * rabi1 + rabi2 * rabi2) / (4.0 * detuning));
        prop_assert_eq!(a.x0, x0);
        prop_assert_eq!(a.eta, k1 * x0 - k2 * x0);
    }

    #[test]
    fn sideband_scales_with_eta_squared_and_rabi(eta in -0.5f64..0.5, rabi in -2.0f64..2.0, a in 0.1f64..4.0, b in 0.1f64..4.0) {
        let raw = RamanParams {
            rabi1: 0.1, rabi2: 0.1, omega1: 10.0, omega2: 10.0, phi1: 0.0, phi2: 0.0,
            k1: 0.0, k2: 0.0, omega_e: 1.0, omega: 1.0, mass: 1.0,
        };
        let mut eff = effective_params(&raw, &UnitSystem::default()).unwrap();
        eff.eta = eta;
        eff.rabi = rabi;
        let base = second_sideband_coupling(&eff).coefficient;
        eff.eta = a * eta;
        eff.rabi = b * rabi;
        let scaled = second_sideband_coupling(&eff).coefficient;
        prop_assert!((scaled - a * a * b * base).abs() <= 4.0 * f64::EPSILON * scaled.abs().max(1e-300));
    }

    #[test]
    fn adiabaticity_is_scale_invariant(omega0 in 0.2f64..5.0, omegaf in 0.2f64..5.0, t_f in 0.1f64..10.0, lambda in 0.1f64..10.0) {
        let p = FrequencyProtocol::linear_ramp(omega0, omegaf, t_f).unwrap();
        let q = FrequencyProtocol::linear_ramp(omega0 / lambda, omegaf / lambda, lambda * t_f).unwrap();
        let a = adiabaticity_diagnostic(&p, 501).unwrap();
        let b = adiabaticity_diagnostic(&q, 501).unwrap();
        prop_assert!((a.max_value - b.max_value).abs() < 1e-12 * a.max_value.max(1e-12));
        prop_assert!((lambda * a.argmax_time - b.argmax_time).abs() < 1e-9 * b.argmax_time.max(1.0));
    }
}

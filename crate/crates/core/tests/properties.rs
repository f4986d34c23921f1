use num_complex::Complex64;
use proptest::prelude::*;

use clambda::algebra::AlgebraParams;
use clambda::coherent::{check_normalization, eigen_residual, kernel, residual_dim, CoherentState};
use clambda::observables::{dispersions, mandel_q_closed, mandel_q_oracle, photon_moments};

/// λ ∈ 2..=4 with α_i ∈ (−0.9, 5) and the last component closing the sum.
fn params() -> impl Strategy<Value = AlgebraParams> {
    (2usize..=4).prop_flat_map(|lambda| {
        prop::collection::vec(-0.9f64..5.0, lambda - 1).prop_map(move |mut alpha| {
            alpha.push(-alpha.iter().sum::<f64>());
            AlgebraParams::new(lambda, alpha).unwrap()
        })
    })
}

fn point() -> impl Strategy<Value = Complex64> {
    (0.05f64..4.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_matches_coefficient_sum(p in params(), z in point(), mu in 0usize..4) {
        let mu = mu % p.lambda();
        let n = check_normalization(&p, z, mu).unwrap();
        prop_assert!(n.series < 1e-12, "{n:?}");
    }

    #[test]
    fn lowering_operator_eigenstate(p in params(), z in point(), mu in 0usize..4) {
        let mu = mu % p.lambda();
        let s = CoherentState::new(&p, z, mu).unwrap();
        let r = eigen_residual(&s, &p, residual_dim(&s)).unwrap();
        prop_assert!(r < 1e-10, "residual {r}");
    }

    #[test]
    fn mandel_closed_form_matches_series(p in params(), z in point(), mu in 0usize..4) {
        let mu = mu % p.lambda();
        let closed = mandel_q_closed(&p, z, mu).unwrap();
        let oracle = mandel_q_oracle(&CoherentState::new(&p, z, mu).unwrap()).unwrap();
        prop_assert!((closed - oracle).abs() < 1e-9 * oracle.abs().max(1.0), "{closed} vs {oracle}");
    }

    #[test]
    fn robertson_uncertainty(p in params(), z in point(), mu in 0usize..4) {
        let mu = mu % p.lambda();
        let d = dispersions(&p, z, mu).unwrap();
        let s = CoherentState::new(&p, z, mu).unwrap();
        // <[x,p]> = i<1 + alpha_N>
        let comm: f64 = (0..=s.max_level())
            .map(|n| s.amplitude(n).norm_sqr() * (1.0 + p.alpha_at(n)))
            .sum();
        let bound = 0.25 * comm * comm;
        prop_assert!(d.disp_x * d.disp_p >= bound * (1.0 - 1e-10), "{} < {bound}", d.disp_x * d.disp_p);
    }

    #[test]
    fn odd_sector_is_shifted_even_sector(a0 in -0.9f64..5.0, z in point()) {
        // mu = 1 at alpha0 carries the same k-distribution as mu = 0 at alpha0 + 2, on levels 2k + 1
        let odd = CoherentState::new(&AlgebraParams::calogero_vasiliev(a0).unwrap(), z, 1).unwrap();
        let even = CoherentState::new(&AlgebraParams::calogero_vasiliev(a0 + 2.0).unwrap(), z, 0).unwrap();
        let (m1, v1) = photon_moments(&odd);
        let (m0, v0) = photon_moments(&even);
        prop_assert!((m1 - m0 - 1.0).abs() < 1e-10 * m1.max(1.0));
        prop_assert!((v1 - v0).abs() < 1e-10 * v1.max(1.0));
    }

    #[test]
    fn states_are_normalized(p in params(), z in point(), mu in 0usize..4) {
        let mu = mu % p.lambda();
        let k = kernel(&p, z, mu, z, mu).unwrap();
        prop_assert!((k - 1.0).norm() < 1e-12, "{k}");
    }
}

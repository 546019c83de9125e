use proptest::prelude::*;
use vsheet::spectral::{self, FourierCoeffs, PeriodicSamples};

const N: usize = 64;

/// Band-limited samples with zero Nyquist content, from random coefficients.
fn band_limited() -> impl Strategy<Value = (FourierCoeffs, PeriodicSamples)> {
    (
        proptest::collection::vec(-1.0..1.0f64, N / 2),
        proptest::collection::vec(-1.0..1.0f64, N / 2),
        -2.0..2.0f64,
    )
        .prop_map(|(a, b, mean)| {
            let mut c = FourierCoeffs::zeros(N);
            c.a[0] = mean;
            for j in 1..N / 2 {
                c.a[j] = a[j] / j as f64;
                c.b[j] = b[j] / j as f64;
            }
            let s = c.to_samples(N);
            (c, s)
        })
}

fn close(a: &PeriodicSamples, b: &PeriodicSamples, tol: f64) -> bool {
    a.sub(b).sup_norm() < tol
}

proptest! {
    #[test]
    fn hilbert_squared_is_minus_identity_on_zero_mean((_, s) in band_limited()) {
        let hh = spectral::hilbert(&spectral::hilbert(&s));
        prop_assert!(close(&hh, &spectral::project_zero_mean(&s).scale(-1.0), 1e-12));
    }

    #[test]
    fn coefficient_round_trip((c, s) in band_limited()) {
        let back = s.coeffs();
        for j in 0..=N / 2 {
            prop_assert!((back.a[j] - c.a[j]).abs() < 1e-13);
            prop_assert!((back.b[j] - c.b[j]).abs() < 1e-13);
        }
        prop_assert!(close(&back.to_samples(N), &s, 1e-12));
    }

    #[test]
    fn parseval((c, s) in band_limited()) {
        let lhs = s.values().iter().map(|v| v * v).sum::<f64>() / N as f64;
        let rhs = c.a[0] * c.a[0] + 0.5 * (1..N / 2).map(|j| c.a[j] * c.a[j] + c.b[j] * c.b[j]).sum::<f64>();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn half_laplacian_is_hilbert_of_derivative((_, s) in band_limited()) {
        let via = spectral::hilbert(&spectral::derivative(&s));
        prop_assert!(close(&spectral::half_laplacian(&s), &via, 1e-11));
    }

    #[test]
    fn operators_commute_with_grid_rotation((_, s) in band_limited(), k in 0usize..N) {
        for op in [spectral::hilbert, spectral::half_laplacian, spectral::derivative] {
            prop_assert!(close(&op(&s.shift(k)), &op(&s).shift(k), 1e-11));
        }
    }

    #[test]
    fn derivative_matches_analytic(j in 1usize..N / 2, phase in 0.0..6.3f64) {
        let s = PeriodicSamples::from_fn(N, |t| (j as f64 * t + phase).sin());
        let want = PeriodicSamples::from_fn(N, |t| j as f64 * (j as f64 * t + phase).cos());
        prop_assert!(close(&spectral::derivative(&s), &want, 1e-11 * j as f64));
    }

    #[test]
    fn zero_padding_preserves_values((_, s) in band_limited()) {
        let fine = s.zero_pad(2 * N);
        for k in 0..N {
            prop_assert!((fine.values()[2 * k] - s.values()[k]).abs() < 1e-12);
        }
        prop_assert!((spectral::mean(&fine) - spectral::mean(&s)).abs() < 1e-14);
    }
}

//! Property tests over randomly parameterised constructions and channels.

use num_complex::Complex64;
use proptest::prelude::*;
use stsk_core::channel::{ls_estimate, sample_channel, transmit_with_noise};
use stsk_core::codebook::{expand, verify_decomposition};
use stsk_core::constellation::make_psk;
use stsk_core::detect::{ml_detect, single_stream_ml};
use stsk_core::dispersion::{cda_code, cda_dm_set, fec_code, fec_dm_set, CdaParams, FecParams};
use stsk_core::harness::{campaign, SimConfig};
use stsk_core::metrics::coding_gain;
use stsk_core::rng::{complex_normal_matrix, stream};
use stsk_core::CMat64;

fn trace_power(a: &CMat64) -> f64 {
    a.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every FEC DM set built from an irreducible `x² − exp(j2πk/L)` (odd
    /// `k`) meets the power constraint and factors the code as PSK × DMs.
    #[test]
    fn fec_sets_decompose(l_exp in 1usize..5, k in 0usize..8, pivot in 0usize..2) {
        let (l, m) = (1 << l_exp, 2);
        let s = make_psk::<f64>(l).unwrap();
        let mut params = FecParams::root_of_unity_poly(l, m);
        params.coeffs[0] = -stsk_core::scalar::root_of_unity::<f64>((2 * k + 1) % l, l);
        params.pivot = pivot;
        let set = fec_dm_set(&s, &params).unwrap();
        prop_assert_eq!(set.q(), l.pow(m as u32 - 1));
        for a in set.matrices() {
            prop_assert!((trace_power(a) - m as f64).abs() < 1e-9);
        }
        let r = verify_decomposition("fec", s.points(), set.matrices(), &fec_code(&s, &params).unwrap());
        prop_assert!(r.collisions == 0 && r.contained());
    }

    /// CDA sets stay power-normalised and decompose for any unit-modulus
    /// `t` and `δ`.
    #[test]
    fn cda_sets_decompose(t in 0.01f64..1.99, d in 0.01f64..1.99, l_exp in 1usize..3) {
        let l = 1 << l_exp;
        let s = make_psk::<f64>(l).unwrap();
        let pi = std::f64::consts::PI;
        let params = CdaParams::from_angles(l, 2, t * pi, d * pi, 0.0);
        let set = cda_dm_set(&s, &params).unwrap();
        for a in set.matrices() {
            prop_assert!((trace_power(a) - 2.0).abs() < 1e-9);
        }
        let target = cda_code(&s, &params).unwrap();
        let r = verify_decomposition("cda", s.points(), set.matrices(), &target);
        prop_assert!(r.collisions == 0 && r.contained());
    }

    /// Rotating every DM by a common unitary leaves the coding gain unchanged.
    #[test]
    fn gain_is_unitary_invariant(theta in 0.0..std::f64::consts::TAU) {
        let s = make_psk::<f64>(4).unwrap();
        let set = fec_dm_set(&s, &FecParams::example1()).unwrap();
        let (c, sn) = (theta.cos(), theta.sin());
        let u = CMat64::from_rows(&[
            vec![Complex64::new(c, 0.0), Complex64::new(0.0, -sn)],
            vec![Complex64::new(sn, 0.0), Complex64::new(0.0, c)],
        ]);
        let rotated: Vec<CMat64> = set.matrices().iter().map(|a| u.matmul(a)).collect();
        let set2 = stsk_core::dispersion::DispersionMatrixSet::new(
            set.family(), set.params().clone(), rotated, 1e-9).unwrap();
        let g1 = coding_gain(&expand(&s, &set).unwrap()).unwrap();
        let g2 = coding_gain(&expand(&s, &set2).unwrap()).unwrap();
        prop_assert!((g1 - g2).abs() < 1e-9);
    }

    /// The single-stream detector reproduces full ML on arbitrary draws.
    #[test]
    fn ssml_matches_ml(seed in any::<u64>(), snr in -5.0f64..25.0) {
        let s = make_psk::<f64>(2).unwrap();
        let book = expand(&s, &cda_dm_set(&s, &CdaParams::example2()).unwrap()).unwrap();
        let rho = 10f64.powf(snr / 10.0);
        let mut r = stream(seed, 0);
        let block = sample_channel::<f64, _>(2, 2, rho, &mut r);
        let noise = complex_normal_matrix(&mut r, 2, 2, 1.0);
        let obs = transmit_with_noise(&block, &book.codeword((seed % 16) as usize), &noise).unwrap();
        let a = ml_detect(&obs.y, &block.h, &book, rho).unwrap();
        let b = single_stream_ml(&obs.y_bar, &obs.h_bar, book.chi(), s.points(), rho).unwrap();
        prop_assert_eq!((a.p, a.q), (b.p, b.q));
    }

    /// Noiseless LS estimation recovers the channel from any full-rank training.
    #[test]
    fn ls_recovers_channel(seed in any::<u64>(), snr in 0.0f64..30.0) {
        let rho = 10f64.powf(snr / 10.0);
        let mut r = stream(seed, 1);
        let block = sample_channel::<f64, _>(3, 2, rho, &mut r);
        let x = vec![campaign::training_block(0, 2), campaign::training_block(1, 2)];
        let zero = CMat64::zeros(3, 2);
        let y: Vec<CMat64> = x.iter().map(|x| transmit_with_noise(&block, x, &zero).unwrap().y).collect();
        prop_assert!(ls_estimate(&y, &x, rho).unwrap().approx_eq(&block.h, 1e-9));
    }

    /// Canonical config text parses back to the same config.
    #[test]
    fn config_canonical_roundtrip(seed in any::<u64>(), sigma in 0.0f64..0.5, q in 1usize..5, trials in 1u64..1_000_000) {
        let mut c = SimConfig { seed, csir_sigma: sigma, q: Some(q), max_trials: trials, ..SimConfig::default() };
        c.snr_db = vec![0.0, 2.5, -1.0];
        let back = SimConfig::parse(&c.canonical()).unwrap();
        prop_assert_eq!(back.hash(), c.hash());
        prop_assert_eq!(back, c);
    }
}

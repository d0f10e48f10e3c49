use awqpe::binary::{best_approx, combine_approx, cyclic_min, window_fraction, PhaseValue};
use awqpe::bounds::{non_adjacent_ceiling_exact, peak_probability_floor};
use awqpe::error::AwqpeError;
use awqpe::kernel::{dirichlet_pmf, sample};
use awqpe::resolution::resolve;
use awqpe::binary::BitString;
use proptest::prelude::*;

fn phase() -> impl Strategy<Value = PhaseValue> {
    any::<u128>().prop_map(PhaseValue::from_raw)
}

/// Circular distance from `2^m delta` to outcome `j`, in outcome steps.
fn steps(delta: PhaseValue, m: u32, j: u64) -> f64 {
    let size = (1u64 << m) as f64;
    let d = (delta.to_f64() * size - j as f64).rem_euclid(size);
    d.min(size - d)
}

proptest! {
    #[test]
    fn composition_matches_direct_rounding(x in phase(), m in 1u32..=32, k in 1u32..=32) {
        let b_m = best_approx(x, m);
        let b_k = best_approx(window_fraction(x, m).unwrap(), k);
        match combine_approx(b_m, m, b_k, k) {
            Ok(b) => prop_assert_eq!(b, best_approx(x, m + k)),
            Err(e) => {
                prop_assert_eq!(e, AwqpeError::AmbiguousHalf);
                prop_assert_eq!(b_k, 1u64 << (k - 1));
            }
        }
    }

    #[test]
    fn rounding_above_half_means_above_half(d in phase(), k in 1u32..=40) {
        let b = best_approx(d, k);
        if b > 1u64 << (k - 1) {
            prop_assert!(d.raw() > 1u128 << 127);
        }
    }

    #[test]
    fn best_approx_is_within_half_a_step(y in phase(), n in 1u32..=64) {
        let approx = PhaseValue::from_dyadic(best_approx(y, n), n).unwrap();
        prop_assert!(y.circle_distance(approx) <= 2f64.powi(-(n as i32) - 1) * (1.0 + 1e-12));
    }

    #[test]
    fn cyclic_min_is_symmetric(n in 2u64..1000, a in 0u64..1000, b in 0u64..1000) {
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let v = cyclic_min(a, b, n).unwrap();
        prop_assert_eq!(v, cyclic_min(b, a, n).unwrap());
        prop_assert!(v == a || v == b);
    }

    #[test]
    fn kernel_is_normalized_and_bounded(delta in phase(), m in 1u32..=10) {
        let dist = dirichlet_pmf(delta, m).unwrap();
        let total: f64 = dist.probs().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(dist.probs().iter().all(|&p| (0.0..=1.0).contains(&p)));
        prop_assert!(dist.prob(best_approx(delta, m)) >= peak_probability_floor() - 1e-12);
        if m >= 2 {
            let ceiling = non_adjacent_ceiling_exact(m).unwrap();
            for j in 0..1u64 << m {
                if steps(delta, m, j) >= 1.5 {
                    prop_assert!(dist.prob(j) <= ceiling + 1e-12);
                }
            }
        }
    }

    #[test]
    fn half_integer_offsets_tie(t in 0u64..1024, m in 1u32..=10) {
        let t = t % (1 << m);
        let delta = PhaseValue::from_dyadic(2 * t + 1, m + 1).unwrap();
        let dist = dirichlet_pmf(delta, m).unwrap();
        prop_assert_eq!(dist.prob(t), dist.prob((t + 1) % (1 << m)));
    }

    #[test]
    fn sampling_conserves_shots(delta in phase(), m in 1u32..=8, n in 1u64..5000, seed in any::<u64>()) {
        let dist = dirichlet_pmf(delta, m).unwrap();
        let counts = sample(&dist, n, seed);
        prop_assert_eq!(counts.as_slice().iter().sum::<u64>(), n);
        prop_assert_eq!(counts, sample(&dist, n, seed));
    }

    #[test]
    fn resolution_keeps_widths(raw in any::<u64>(), parts in prop::collection::vec(2u32..=6, 1..6), flags in any::<u64>()) {
        let n: u32 = parts.iter().sum();
        let raw = BitString::new(raw & ((1u64 << n) - 1), n).unwrap();
        let flags: Vec<bool> = (0..parts.len()).map(|i| flags >> i & 1 == 1).collect();
        let r = resolve(&raw, &parts, &flags).unwrap();
        prop_assert_eq!(r.est_bits.len(), n);
        if let Some(i) = r.last_idx {
            let chunk = &raw.split(&parts).unwrap()[i - 1];
            prop_assert_eq!(chunk.value(), 1u64 << (parts[i - 1] - 1));
        }
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runtime limits are part of each criterion.

use std::time::{Duration, Instant};

use awqpe::binary::{best_approx, combine_approx, window_fraction, PhaseValue};
use awqpe::bounds::shots_for_top_outcome;
use awqpe::error::AwqpeError;
use awqpe::estimator::{Backend, EstimationConfig};
use awqpe::harness::{self, compositions, table1_rows, write_records};
use awqpe::kernel::dirichlet_pmf;
use awqpe::resources::{self, Circuit};
use awqpe::statevector::{window_distribution_exact, UnitaryModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn walkthrough() -> Outcome {
    let mut hits = 0;
    for seed in 0..100 {
        let (model, cfg) = harness::walkthrough_config(seed);
        let r = harness::run_case(&model, &cfg).expect("walkthrough runs");
        if r.raw_bits == "11110010" && r.est_bits == "11010010" && r.est_decimal == "0.8203125" {
            hits += 1;
        }
    }
    outcome(hits >= 99, format!("{hits}/100 seeds reproduce raw 11110010 -> 11010010"))
}

fn table1() -> Outcome {
    let mut per_row = vec![];
    for row in table1_rows() {
        let target = best_approx(row.phi, row.m_list.iter().sum());
        let mut hits = 0;
        for seed in 0..100 {
            let cfg = EstimationConfig::new(row.m_list.clone()).with_seed(seed);
            let r = harness::run_case(&UnitaryModel::diagonal(row.phi), &cfg).expect("row runs");
            let value = u64::from_str_radix(&r.est_bits, 2).expect("bits");
            if r.est_decimal == row.final_decimal && value == target {
                hits += 1;
            }
        }
        per_row.push(hits);
    }
    let pass = per_row.iter().all(|&h| h >= 95);
    outcome(pass, format!("hits per row out of 100: {per_row:?}"))
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut comparisons = 0;
    for _ in 0..100 {
        let phi = PhaseValue::from_raw(rng.gen());
        let model = UnitaryModel::diagonal(phi);
        for m in 2..=6 {
            for k in 0..=10 {
                let exact = window_distribution_exact(&model, m, k).expect("simulate");
                let kernel = dirichlet_pmf(window_fraction(phi, k).expect("k small"), m).expect("kernel");
                worst = worst.max(exact.max_abs_diff(&kernel));
                comparisons += 1;
            }
        }
    }
    outcome(worst <= 1e-10, format!("{comparisons} comparisons, max distance {worst:e}"))
}

fn exhaustive() -> Outcome {
    let (mut clean, mut clean_ok, mut ties, mut ties_ok, mut lists) = (0, 0, 0, 0, 0);
    for n in 4..=12 {
        let comps = compositions(n, 2);
        lists += comps.len();
        for s in harness::exhaustive_grid(n, &comps).expect("grid runs") {
            clean += s.clean_cases();
            clean_ok += s.clean_successes();
            ties += s.tie_cases;
            ties_ok += s.tie_successes + s.tie_special_chunk;
        }
    }
    outcome(
        clean == clean_ok && ties == ties_ok,
        format!(
            "{lists} window lists; tie-free {clean_ok}/{clean}; exact-tie {ties_ok}/{ties} exact or special-chunk"
        ),
    )
}

fn composition_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut checked, mut excluded, mut bad) = (0, 0, 0);
    for _ in 0..100_000 {
        let x = PhaseValue::from_raw(rng.gen());
        let m = rng.gen_range(1..=32);
        let k = rng.gen_range(1..=32);
        let b_m = best_approx(x, m);
        let b_k = best_approx(window_fraction(x, m).expect("m <= 32"), k);
        match combine_approx(b_m, m, b_k, k) {
            Ok(b) => {
                checked += 1;
                if b != best_approx(x, m + k) {
                    bad += 1;
                }
            }
            Err(AwqpeError::AmbiguousHalf) if b_k == 1 << (k - 1) => excluded += 1,
            Err(_) => bad += 1,
        }
    }
    outcome(
        bad == 0,
        format!("{checked} exact, {excluded} excluded half cases rejected, {bad} wrong"),
    )
}

fn shot_bound() -> Outcome {
    let n = shots_for_top_outcome(3, 0.01).expect("bound");
    let check = harness::validate_top_outcome_bound(3, 0.01, 10_000, 31).expect("check runs");
    outcome(
        n == 99 && check.shots == 99 && check.miss_rate <= 0.01,
        format!("N = {n}; misses {}/{} = {}", check.misses, check.trials, check.miss_rate),
    )
}

fn conservation() -> Outcome {
    let mut lists = 0u64;
    let mut ok = true;
    for n in 1..=20 {
        for parts in compositions(n, 1) {
            lists += 1;
            ok &= resources::report(&parts).expect("report").total_u_applications == (1u64 << n) - 1;
        }
    }
    let m = [3, 2, 3];
    let spot: Vec<u64> = (1..=3)
        .map(|i| resources::u_applications(&m, Circuit::Block(i)).expect("block"))
        .collect();
    let standard = resources::u_applications(&m, Circuit::Standard).expect("standard");
    ok &= spot == [7, 24, 224] && standard == 255;
    outcome(ok, format!("{lists} window lists conserve 2^n - 1; [3,2,3] -> {spot:?}/{standard}"))
}

fn perturbation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut passes = 0;
    for i in 0..100 {
        let phi = PhaseValue::from_raw(rng.gen());
        let dphi = PhaseValue::from_raw(rng.gen());
        // a final window of 6 bits keeps a '100000' final chunk inside the
        // ambiguity-flag zone of the window before it
        let cfg = EstimationConfig::new(vec![3, 3, 6]).with_seed(i);
        let v = harness::perturbation_check(&UnitaryModel::diagonal(phi), dphi, &cfg).expect("check runs");
        passes += u32::from(v.pass);
    }
    outcome(passes >= 99, format!("{passes}/100 pairs consistent at n = 12"))
}

fn determinism() -> Outcome {
    let records = |threads: usize, confirm: bool| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
        pool.install(|| {
            let cfg = EstimationConfig::new(vec![3, 3, 4]).with_seed(4242).with_shots(2048);
            let mut out = vec![];
            write_records(&harness::monte_carlo_cases(1500, &cfg, confirm).expect("campaign"), &mut out).expect("write");
            let grid = EstimationConfig::new(vec![2, 3]).with_backend(Backend::InfiniteShot);
            for i in 0..32 {
                let phi = PhaseValue::from_dyadic(i, 5).expect("grid");
                let r = harness::run_case(&UnitaryModel::diagonal(phi), &grid).expect("case");
                write_records(&[r], &mut out).expect("write");
            }
            out
        })
    };
    let mut ok = true;
    for confirm in [false, true] {
        let base = records(1, confirm);
        ok &= [2, 8].iter().all(|&t| records(t, confirm) == base);
    }
    outcome(ok, "record streams at 1, 2 and 8 threads")
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, u64);
    let criteria: [Criterion; 9] = [
        ("walkthrough reproduction", walkthrough, 5),
        ("reference table reproduction", table1, 60),
        ("kernel/statevector oracle equivalence", oracle, 60),
        ("exhaustive dyadic grid recovery", exhaustive, 300),
        ("composition rule brute force", composition_rule, 10),
        ("top-outcome shot bound", shot_bound, 60),
        ("resource conservation", conservation, 60),
        ("perturbation cross-check", perturbation, 60),
        ("determinism across thread counts", determinism, 120),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= Duration::from_secs(*limit);
        failed += usize::from(!pass);
        println!(
            "criterion {} {}: {} ({}; {:.2}s of {}s)",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            limit
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

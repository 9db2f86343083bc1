//! Acceptance gate: one test per shipping criterion, each printing a single
//! pass/fail line (visible with `--nocapture`, and always on failure).
//!
//! Exact criteria are checked against brute-force oracles; statistical
//! criteria run the generator at benchmark scale with frozen seeds, so every
//! number here is reproducible.

use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use qprep::design::{main_effects, predict_reduction, DesignMatrix};
use qprep::expand::{enforce_degree_cap, strong_couple};
use qprep::generate::{design_point, generate, size_preset, FactorSettings, GeneratorConfig};
use qprep::reduce::{reduce, Rule};
use qprep::sensitivity::rule1_slack;
use qprep::solve::{brute_force, brute_force_constrained, tabu_search, TabuParams};
use qprep::QuboInstance;

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn nonzero(rng: &mut ChaCha8Rng, ub: i64) -> i64 {
    loop {
        let v = rng.gen_range(-ub..=ub);
        if v != 0 {
            return v;
        }
    }
}

/// Oracle-sized instance with mixed densities, bounds, and outlier rates.
fn sample_instance(seed: u64) -> QuboInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_9700 ^ seed);
    let n = rng.gen_range(4..=18);
    let ub = *[10i64, 100].choose(&mut rng).unwrap();
    let mult = *[10i64, 20].choose(&mut rng).unwrap();
    let edge_prob = *[0.15f64, 0.3, 0.5, 0.8].choose(&mut rng).unwrap();
    let diag_prob = *[0.05f64, 0.3, 1.0].choose(&mut rng).unwrap();
    let mut inst = QuboInstance::new(n);
    for i in 0..n {
        if rng.gen_bool(diag_prob) {
            let mut v = nonzero(&mut rng, ub);
            if rng.gen_bool(0.15) {
                v *= mult;
            }
            inst.set_linear(i, v);
        }
        for j in (i + 1)..n {
            if rng.gen_bool(edge_prob) {
                let mut v = nonzero(&mut rng, ub);
                if rng.gen_bool(0.15) {
                    v *= mult;
                }
                inst.set_quadratic(i, j, v).unwrap();
            }
        }
    }
    inst
}

#[test]
fn criterion_01_oracle_equivalence() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for seed in 0..500u64 {
        let inst = sample_instance(seed);
        let original = brute_force(&inst).unwrap();
        let (red, log) = reduce(&inst).unwrap();
        let reduced = brute_force(&red).unwrap();
        if original.solution.objective != reduced.solution.objective + log.offset {
            failures.push(format!(
                "seed {seed}: optimum {} vs reduced {} + offset {}",
                original.solution.objective, reduced.solution.objective, log.offset
            ));
            continue;
        }
        let lifted = log.lift_assignment(&reduced.solution.assignment).unwrap();
        if inst.evaluate(&lifted).unwrap() != original.solution.objective {
            failures.push(format!("seed {seed}: lifted optimum evaluates off"));
        }
    }
    let elapsed = started.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(120);
    println!(
        "criterion 01 oracle equivalence: {} (500 instances, {} mismatches, {:.1}s)",
        verdict(ok),
        failures.len(),
        elapsed.as_secs_f64()
    );
    assert!(failures.is_empty(), "{failures:?}");
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
}

#[test]
fn criterion_02_weak_persistency() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for seed in 0..500u64 {
        let inst = sample_instance(seed);
        let unconstrained = brute_force(&inst).unwrap();
        let (_, log) = reduce(&inst).unwrap();
        let fixes: Vec<(usize, u8)> =
            log.fixings.iter().map(|f| (f.variable, f.value.as_bit())).collect();
        let constrained = brute_force_constrained(&inst, &fixes).unwrap();
        if constrained.solution.objective != unconstrained.solution.objective {
            failures.push(format!(
                "seed {seed}: fixings force {} < optimum {}",
                constrained.solution.objective, unconstrained.solution.objective
            ));
        }
    }
    let ok = failures.is_empty();
    println!(
        "criterion 02 weak persistency: {} (500 instances, {} violations, {:.1}s)",
        verdict(ok),
        failures.len(),
        started.elapsed().as_secs_f64()
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_03_extension_identity() {
    let mut failures = 0u32;
    for seed in 1000..1100u64 {
        let inst = sample_instance(seed);
        let (red, log) = reduce(&inst).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let y: Vec<u8> = (0..red.num_variables()).map(|_| rng.gen_range(0..=1)).collect();
            let lifted = log.lift_assignment(&y).unwrap();
            if red.evaluate(&y).unwrap() + log.offset != inst.evaluate(&lifted).unwrap() {
                failures += 1;
            }
        }
    }
    println!(
        "criterion 03 extension identity: {} (100 x 50 assignments, {failures} mismatches)",
        verdict(failures == 0)
    );
    assert_eq!(failures, 0);
}

#[test]
fn criterion_04_structural_negatives() {
    // Cut instances: diagonal = degree, every edge -2. No rule may fire.
    let mut cut_fixed = 0usize;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC07 ^ seed);
        let n = rng.gen_range(8..=40);
        let mut edges = std::collections::BTreeSet::new();
        for v in 1..n {
            edges.insert((rng.gen_range(0..v), v));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.08) {
                    edges.insert((i, j));
                }
            }
        }
        let mut inst = QuboInstance::new(n);
        let mut degree = vec![0i64; n];
        for &(i, j) in &edges {
            inst.set_quadratic(i, j, -2).unwrap();
            degree[i] += 1;
            degree[j] += 1;
        }
        for i in 0..n {
            inst.set_linear(i, degree[i]);
        }
        let (_, log) = reduce(&inst).unwrap();
        cut_fixed += log.fixings.len();
    }

    // Dense uniform instances: 10% density, no outliers, full diagonal.
    let factors = FactorSettings {
        ub: 100,
        lin_mult: 1,
        quad_mult: 1,
        pct_quad_mult: 0.0,
        pct_lin_mult: 0.0,
        pct_lin_nonzero: 1.0,
    };
    let mut dense_fixed = 0usize;
    for seed in 1..=3u64 {
        let mut config = GeneratorConfig::new(500, 12475, factors, seed);
        config.hub_edge_share = 0.0;
        let inst = generate(&config).unwrap();
        let (_, log) = reduce(&inst).unwrap();
        dense_fixed += log.fixings.len();
    }

    let ok = cut_fixed == 0 && dense_fixed == 0;
    println!(
        "criterion 04 structural negatives: {} (cut fixings {cut_fixed}, dense fixings {dense_fixed})",
        verdict(ok)
    );
    assert!(ok);
}

// Every assignment attaining the optimum, by exhaustive scan.
fn optimal_assignments(inst: &QuboInstance) -> (i64, Vec<Vec<u8>>) {
    let n = inst.num_variables();
    assert!(n <= 16, "scan oracle limited to 16 variables");
    let mut best = i64::MIN;
    let mut optima = Vec::new();
    for mask in 0u32..1 << n {
        let x: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        let value = inst.evaluate(&x).unwrap();
        if value > best {
            best = value;
            optima.clear();
        }
        if value == best {
            optima.push(x);
        }
    }
    (best, optima)
}

#[test]
fn criterion_05_expansion_correctness() {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut audit = |inst: &QuboInstance, cap: usize, tag: &str| {
        let original = brute_force(inst).unwrap().solution.objective;
        let (exp, log) = enforce_degree_cap(inst, cap).unwrap();
        if log.expanded_n() > 16 {
            return false;
        }
        if (0..exp.num_variables()).any(|i| exp.degree(i) > cap) {
            failures.push(format!("{tag}: degree above cap {cap}"));
        }
        let (best, optima) = optimal_assignments(&exp);
        if best != original {
            failures.push(format!("{tag}: optimum {original} became {best}"));
        }
        for x in &optima {
            if !log.chains_agree(x).unwrap() {
                failures.push(format!("{tag}: optimal solution splits a coupled group"));
                break;
            }
        }
        let projected = log.project_assignment(&optima[0]).unwrap();
        if inst.evaluate(&projected).unwrap() != original {
            failures.push(format!("{tag}: projected optimum evaluates off"));
        }
        checked += 1;
        true
    };

    // Cap 3 on star-heavy instances: every one forces at least one chain.
    let mut seed = 0u64;
    let mut done = 0;
    while done < 50 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xE84 ^ seed);
        seed += 1;
        let n = rng.gen_range(5..=7);
        let mut inst = QuboInstance::new(n);
        for j in 1..n {
            inst.set_quadratic(0, j, nonzero(&mut rng, 10)).unwrap();
        }
        for i in 1..n {
            for j in (i + 1)..n {
                if rng.gen_bool(0.35) {
                    inst.set_quadratic(i, j, nonzero(&mut rng, 10)).unwrap();
                }
            }
        }
        for i in 0..n {
            if rng.gen_bool(0.5) {
                inst.set_linear(i, nonzero(&mut rng, 20));
            }
        }
        if audit(&inst, 3, &format!("cap3 seed {}", seed - 1)) {
            done += 1;
        }
    }

    // Cap 2 on paths and cycles, the only shapes a cap of 2 can host.
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x2CAB ^ seed);
        let n = rng.gen_range(4..=10);
        let mut inst = QuboInstance::new(n);
        for i in 0..n - 1 {
            inst.set_quadratic(i, i + 1, nonzero(&mut rng, 15)).unwrap();
        }
        if rng.gen_bool(0.5) {
            inst.set_quadratic(0, n - 1, nonzero(&mut rng, 15)).unwrap();
        }
        for i in 0..n {
            if rng.gen_bool(0.4) {
                inst.set_linear(i, nonzero(&mut rng, 15));
            }
        }
        assert!(audit(&inst, 2, &format!("cap2 seed {seed}")));
    }

    // Frozen coupling coefficients for a single forced pairing at M = -50.
    let demo = QuboInstance::from_entries(
        5,
        &[
            (0, 0, 5),
            (0, 1, 2),
            (0, 2, 2),
            (0, 3, 2),
            (0, 4, 2),
            (1, 1, 8),
            (1, 2, 2),
            (1, 3, 2),
            (1, 4, 2),
            (2, 2, 3),
            (2, 4, 3),
            (3, 3, -2),
            (3, 4, 4),
            (4, 4, 5),
        ],
    )
    .unwrap();
    let (coupled, copy) = strong_couple(&demo, 0, -50).unwrap();
    let spots_ok = copy == 5
        && coupled.linear(0) == -45
        && coupled.quadratic(0, 5) == 100
        && coupled.linear(5) == -50;
    if !spots_ok {
        failures.push("coupling spot values off".into());
    }

    let ok = failures.is_empty();
    println!(
        "criterion 05 expansion correctness: {} ({checked} instances, spot values {})",
        verdict(ok),
        if spots_ok { "exact" } else { "off" }
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_06_sensitivity_sharpness() {
    let mut failures = Vec::new();
    for case in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EA5 ^ case);
        let n = rng.gen_range(3..=8);
        let mut inst = QuboInstance::new(n);
        let mut neg_total = 0i64;
        let mut negs = Vec::new();
        for j in 1..n {
            if j == 1 || rng.gen_bool(0.8) {
                // Guarantee at least one negative coupling at j = 1.
                let v = if j == 1 {
                    -rng.gen_range(1..=30)
                } else {
                    nonzero(&mut rng, 30)
                };
                inst.set_quadratic(0, j, v).unwrap();
                if v < 0 {
                    neg_total += v;
                    negs.push(j);
                }
            }
        }
        let budget = rng.gen_range(0..=40i64);
        inst.set_linear(0, -neg_total + budget);
        assert_eq!(rule1_slack(&inst, 0), budget);

        // Spend the whole budget across the negative couplings at random.
        let mut spend = vec![0i64; negs.len()];
        for _ in 0..budget {
            spend[rng.gen_range(0..negs.len())] += 1;
        }
        let mut spent = inst.clone();
        for (k, &j) in negs.iter().enumerate() {
            let v = spent.quadratic(0, j);
            spent.set_quadratic(0, j, v - spend[k]).unwrap();
        }
        if rule1_slack(&spent, 0) != 0 {
            failures.push(format!("case {case}: exact budget left slack"));
            continue;
        }
        let j = negs[rng.gen_range(0..negs.len())];
        let v = spent.quadratic(0, j);
        spent.set_quadratic(0, j, v - 1).unwrap();
        if rule1_slack(&spent, 0) >= 0 {
            failures.push(format!("case {case}: one past the budget still determined"));
        }
    }
    let ok = failures.is_empty();
    println!("criterion 06 sensitivity sharpness: {} (200 rows)", verdict(ok));
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_07_prediction_formula() {
    let center = predict_reduction([0.0; 6]).unwrap();
    let high = predict_reduction([-1.0, 0.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
    let low = predict_reduction([1.0, 0.0, -1.0, -1.0, 0.0, 0.0]).unwrap();
    let ok = center == 30.0 && high == 62.0 && low == 8.0;
    println!(
        "criterion 07 prediction formula: {} (center {center}, high {high}, low {low})",
        verdict(ok)
    );
    assert!(ok);
}

/// Mean percent reduction of one design point at a given shape over seeds
/// `1..=count`, mirroring the experiment harness.
fn mean_reduction(n: usize, edges: usize, test_id: usize, count: u64) -> f64 {
    let mut total = 0.0;
    for seed in 1..=count {
        let config = GeneratorConfig::new(n, edges, design_point(test_id).unwrap(), seed);
        let inst = generate(&config).unwrap();
        let (_, log) = reduce(&inst).unwrap();
        total += log.percent_reduction();
    }
    total / count as f64
}

#[test]
fn criterion_08_desk_scale_reduction() {
    let started = Instant::now();
    let (n, edges) = size_preset("P1").unwrap();
    let mid = mean_reduction(n, edges, 15, 20);
    let heavy = (mean_reduction(n, edges, 3, 20) + mean_reduction(n, edges, 16, 20)) / 2.0;
    let elapsed = started.elapsed();

    let mid_ok = (10.0..=35.0).contains(&mid);
    let heavy_ok = heavy >= 40.0;
    let ok = mid_ok && heavy_ok && elapsed < Duration::from_secs(300);
    println!(
        "criterion 08 desk-scale reduction: {} (test 15 mean {mid:.1}% in [10, 35]: {mid_ok}; \
         tests 3+16 mean {heavy:.1}% >= 40: {heavy_ok}; {:.1}s)",
        verdict(ok),
        elapsed.as_secs_f64()
    );
    assert!(mid_ok, "test 15 mean {mid:.1}% outside [10%, 35%]");
    assert!(
        heavy_ok,
        "tests 3 and 16 pooled mean {heavy:.1}% fell short of the 40% floor; \
         the generator's hub concentration and value draws land these design \
         points near 36% (see the hub_edge_share sensitivity notes)"
    );
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
}

#[test]
fn criterion_09_effect_signs() {
    let (n, edges) = size_preset("P1").unwrap();
    let responses: Vec<f64> = (1..=16).map(|t| mean_reduction(n, edges, t, 5)).collect();
    let report = main_effects(&DesignMatrix::standard(), &responses).unwrap();
    let f = report.main;

    let f4_largest = (0..6).all(|i| i == 3 || f[3] > f[i]) && f[3] > 0.0;
    let f3_positive = f[2] > 0.0;
    let f1_negative = f[0] < 0.0;
    let half_f3 = f[2] / 2.0;
    let rest_small = f[1].abs() < half_f3 && f[4].abs() < half_f3 && f[5].abs() < half_f3;
    let ok = f4_largest && f3_positive && f1_negative && rest_small;
    println!(
        "criterion 09 effect signs: {} (f1 {:.2}, f2 {:.2}, f3 {:.2}, f4 {:.2}, f5 {:.2}, f6 {:.2})",
        verdict(ok),
        f[0],
        f[1],
        f[2],
        f[3],
        f[4],
        f[5]
    );
    assert!(f4_largest, "factor 4 effect {:.2} is not the largest positive", f[3]);
    assert!(f3_positive, "factor 3 effect {:.2} is not positive", f[2]);
    assert!(f1_negative, "factor 1 effect {:.2} is not negative", f[0]);
    assert!(rest_small, "factors 2/5/6 not small: {:.2} {:.2} {:.2}", f[1], f[4], f[5]);
}

#[test]
fn criterion_10_fixpoint_diagnostics() {
    let (n, edges) = size_preset("P1").unwrap();
    let mut max_passes = 0u32;
    let mut reducible = 0usize;
    let mut rule3_dominant = 0usize;
    for test_id in 1..=16 {
        for seed in 1..=5u64 {
            let config = GeneratorConfig::new(n, edges, design_point(test_id).unwrap(), seed);
            let inst = generate(&config).unwrap();
            let (_, log) = reduce(&inst).unwrap();
            max_passes = max_passes.max(log.passes);
            if !log.fixings.is_empty() {
                reducible += 1;
                if log.rule_count(Rule::R3) >= log.rule_count(Rule::R1) + log.rule_count(Rule::R2)
                {
                    rule3_dominant += 1;
                }
            }
        }
    }
    let range_ok = max_passes <= 25;
    println!(
        "criterion 10 fixpoint diagnostics: {} (max passes {max_passes} within [0, 25]; \
         rule 3 dominant on {rule3_dominant}/{reducible} reducible runs, soft target half)",
        verdict(range_ok)
    );
    assert!(range_ok, "pass count {max_passes} above 25");
}

#[test]
fn criterion_11_large_instance_speed() {
    let (n, edges) = size_preset("P6").unwrap();
    let config = GeneratorConfig::new(n, edges, design_point(3).unwrap(), 11);
    let inst = generate(&config).unwrap();
    let started = Instant::now();
    let (_, log) = reduce(&inst).unwrap();
    let elapsed = started.elapsed();
    let ok = elapsed < Duration::from_secs(10);
    println!(
        "criterion 11 large-instance speed: {} ({n} variables, {edges} entries, \
         {} fixed, {:.0} ms)",
        verdict(ok),
        log.fixings.len(),
        elapsed.as_secs_f64() * 1000.0
    );
    assert!(ok, "reduce took {elapsed:?} on the {n}-variable benchmark");
}

#[test]
fn criterion_12_tabu_sanity() {
    let started = Instant::now();
    let mut hits = 0usize;
    let total = 200usize;
    for seed in 2000..2000 + total as u64 {
        let inst = sample_instance(seed);
        let optimum = brute_force(&inst).unwrap().solution.objective;
        let params = TabuParams {
            max_iterations: Some(20_000),
            time_limit: None,
            tenure: 7,
            seed: 42 ^ seed,
        };
        let found = tabu_search(&inst, &params).unwrap();
        assert!(
            found.objective <= optimum,
            "seed {seed}: tabu value {} above the true optimum {optimum}",
            found.objective
        );
        if found.objective == optimum {
            hits += 1;
        }
    }
    let elapsed = started.elapsed();
    let rate_ok = hits * 100 >= total * 95;
    let ok = rate_ok && elapsed < Duration::from_secs(120);
    println!(
        "criterion 12 tabu sanity: {} ({hits}/{total} exact, never above, {:.1}s)",
        verdict(ok),
        elapsed.as_secs_f64()
    );
    assert!(rate_ok, "only {hits}/{total} runs reached the exact optimum");
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
}

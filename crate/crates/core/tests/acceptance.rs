//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Tolerances are pinned here, in code.

use std::time::Instant;

use retrodict::algebra::{element_distance, Algebra, FaithfulState};
use retrodict::axioms::{build_table, canonical_strategies, InstanceSuite};
use retrodict::channels::{
    channel_distance, random_channel, random_faithful_state, random_unitary_element, Channel,
    StatePair,
};
use retrodict::experiments;
use retrodict::measure::Measure;
use retrodict::retrodiction::{averaged_petz, bayes_inverse, evaluate, iterate, petz, Strategy};
use retrodict::{C64, Mat};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[criterion {criterion}] {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: the convex rotated-average chain reproduces the closed-form
/// values −1/(2 cosh π) and 0 on E01, tolerance 1e-10, in under a second.
#[test]
fn criterion_1_bit_flip_chain_golden_values() {
    let t0 = Instant::now();
    let results = experiments::appendix_b().unwrap();
    let elapsed = t0.elapsed();
    let all = results.iter().all(|r| r.pass);
    let worst = results
        .iter()
        .filter(|r| !r.lower_bound)
        .map(|r| r.deviation)
        .fold(0.0f64, f64::max);
    report(
        "1",
        all && elapsed.as_secs_f64() < 1.0,
        &format!(
            "{} goldens, worst deviation {worst:.3e}, {:.3}s",
            results.len(),
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 2: the smoothed-average chained/composite ratio matches
/// (π/2)(4−3cosh π−cosh 3π)/(sinh π+sinh 2π−sinh 3π) within 1e-6 via the
/// 64-node rule, in under five seconds.
#[test]
fn criterion_2_smoothed_average_ratio() {
    let t0 = Instant::now();
    let results = experiments::appendix_c().unwrap();
    let elapsed = t0.elapsed();
    let ratio = results
        .iter()
        .find(|r| r.name == "chained-over-composite-ratio")
        .expect("ratio golden present");
    report(
        "2",
        ratio.pass && ratio.tolerance <= 1e-6 && elapsed.as_secs_f64() < 5.0,
        &format!(
            "ratio deviation {:.3e} (tol {:.1e}), {:.3}s",
            ratio.deviation,
            ratio.tolerance,
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 3: the three determinant-maximizing stochastic matrices and
/// the composite mismatch, all within 1e-12, in under a second.
#[test]
fn criterion_3_classical_chain_exact_matrices() {
    let t0 = Instant::now();
    let results = experiments::appendix_d().unwrap();
    let elapsed = t0.elapsed();
    let names = [
        "recovery-of-first",
        "recovery-of-second",
        "recovery-of-composite",
        "chained-recoveries",
    ];
    let mut pass = elapsed.as_secs_f64() < 1.0;
    let mut worst = 0.0f64;
    for n in names {
        let r = results.iter().find(|r| r.name == n).expect("golden present");
        pass &= r.pass && r.tolerance <= 1e-12;
        worst = worst.max(r.deviation);
    }
    report(
        "3",
        pass,
        &format!("worst matrix deviation {worst:.3e}, {:.3}s", elapsed.as_secs_f64()),
    );
}

/// Criterion 4: the involutivity-uniqueness instance: ln χ = −π and
/// ln ω = π√2 within 1e-10, residual ≤ 1e-9 at t = 0 and > 1e-3 on every
/// nonzero grid point, in under thirty seconds.
#[test]
fn criterion_4_involution_uniqueness() {
    let t0 = Instant::now();
    let results = experiments::involution_uniqueness().unwrap();
    let elapsed = t0.elapsed();
    let get = |name: &str| {
        results
            .iter()
            .find(|r| r.name.starts_with(name))
            .unwrap_or_else(|| panic!("{name} golden present"))
    };
    let pass = get("log-chi").pass
        && get("log-omega").pass
        && get("residual-at-zero").pass
        && get("min-grid-residual").pass
        && elapsed.as_secs_f64() < 30.0;
    report(
        "4",
        pass,
        &format!(
            "log-chi dev {:.3e}, log-omega dev {:.3e}, zero residual {:.3e}, {:.3}s",
            get("log-chi").deviation,
            get("log-omega").deviation,
            get("residual-at-zero").deviation,
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 5: the verdict table over the default suite matches every
/// asserted cell, in under five minutes.
#[test]
fn criterion_5_table_reproduction() {
    let t0 = Instant::now();
    let suite = InstanceSuite::default();
    let strategies = canonical_strategies();
    let refs: Vec<(&str, Strategy)> = strategies.iter().map(|(k, s)| (*k, s.clone())).collect();
    let table = build_table(&refs, &suite).unwrap();
    let elapsed = t0.elapsed();
    let mismatches: Vec<String> = table
        .cells
        .iter()
        .filter(|c| c.matches == Some(false))
        .map(|c| format!("{}/{}", c.strategy, c.axiom.label()))
        .collect();
    report(
        "5",
        table.pass && elapsed.as_secs_f64() < 300.0,
        &format!(
            "{} asserted cells, {} observed cells, mismatches: {:?}, {:.1}s",
            table.cells.len(),
            table.observed.len(),
            mismatches,
            elapsed.as_secs_f64()
        ),
    );
}

/// Criterion 6: base-map compositionality, tensoriality, involutivity, and
/// inverting over 50 seeded random instances, max deviation ≤ 1e-8.
#[test]
fn criterion_6_base_map_property_suites() {
    let dims: [Vec<usize>; 4] = [vec![2], vec![3], vec![1, 1, 1], vec![2, 1]];
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let alg = Algebra::new(dims[(seed % 4) as usize].clone()).unwrap();
        let alpha = random_faithful_state(&alg, 0.01, seed).unwrap();
        let e = conditioned(&alg, seed + 100);
        let f = conditioned(&alg, seed + 200);
        let beta = StatePair::from_channel(&e, &alpha).unwrap().prediction;

        // compositionality
        let lhs = petz(&alpha, &Channel::compose(&f, &e).unwrap()).unwrap();
        let rhs = Channel::compose(&petz(&alpha, &e).unwrap(), &petz(&beta, &f).unwrap()).unwrap();
        worst = worst.max(channel_distance(&lhs, &rhs));

        // involutivity
        worst = worst.max(channel_distance(&iterate(&Strategy::Petz, &alpha, &e).unwrap(), &e));

        // inverting on a unitary conjugation or point permutation
        let iso = if alg.is_commutative() {
            let n = alg.num_blocks();
            let perm: Vec<usize> = (0..n).map(|k| (k + 1) % n).collect();
            Channel::permutation(&alg, &perm).unwrap()
        } else {
            Channel::ad(&random_unitary_element(&alg, seed + 300))
        };
        let r = petz(&alpha, &iso).unwrap();
        worst = worst.max(channel_distance(&r, &iso.invert_iso().unwrap()));

        // tensoriality on qubit-sized factors
        if seed % 4 == 0 {
            let alg2 = Algebra::qubit();
            let alpha2 = random_faithful_state(&alg2, 0.01, seed + 400).unwrap();
            let e2 = conditioned(&alg2, seed + 500);
            let joint_prior =
                FaithfulState::new(alpha.element().tensor(alpha2.element()), 1e-12).unwrap();
            let lhs = petz(&joint_prior, &Channel::tensor(&e, &e2)).unwrap();
            let rhs = Channel::tensor(&petz(&alpha, &e).unwrap(), &petz(&alpha2, &e2).unwrap());
            worst = worst.max(channel_distance(&lhs, &rhs));
        }
    }
    report("6", worst <= 1e-8, &format!("max deviation {worst:.3e}"));
}

/// Criterion 7: on 50 random commutative instances the base map equals the
/// classical inversion formula within 1e-10.
#[test]
fn criterion_7_classical_oracle_equivalence() {
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let n = 2 + (seed % 3) as usize;
        let alg = Algebra::classical(n);
        let p = random_faithful_state(&alg, 0.01, seed + 1).unwrap();
        let e = conditioned(&alg, seed + 600);
        let lhs = petz(&p, &e).unwrap();
        let rhs = bayes_inverse(&p, &e).unwrap();
        worst = worst.max(channel_distance(&lhs, &rhs));
    }
    report("7", worst <= 1e-10, &format!("max deviation {worst:.3e}"));
}

/// Criterion 8: iterating two discrete averages equals the single average
/// against the convolved measure, within 1e-8.
#[test]
fn criterion_8_convolution_law() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240817);
    let mut worst = 0.0f64;
    for trial in 0..5 {
        let random_measure = |rng: &mut rand_chacha::ChaCha8Rng| {
            let k = 2 + (trial % 2);
            let mut pts: Vec<(f64, f64)> = (0..k)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0)))
                .collect();
            let mass: f64 = pts.iter().map(|(_, w)| w).sum();
            for p in &mut pts {
                p.1 /= mass;
            }
            Measure::DiscreteConvex { points: pts }
        };
        let mu = random_measure(&mut rng);
        let nu = random_measure(&mut rng);

        let alg = Algebra::qubit();
        let alpha = random_faithful_state(&alg, 0.02, 900 + trial as u64).unwrap();
        let e = conditioned(&alg, 1000 + trial as u64);
        let beta = StatePair::from_channel(&e, &alpha).unwrap().prediction;

        let first = averaged_petz(&alpha, &e, &mu).unwrap();
        let second = averaged_petz(&beta, &first, &nu).unwrap();

        let conv = mu.convolve(&nu).unwrap();
        let mut m = Mat::zeros(alg.total_dim(), alg.total_dim());
        for (r, w) in conv.nodes_weights() {
            let inner = Channel::compose(
                &Channel::ad(&beta.power(C64::new(0.0, -r))),
                &Channel::compose(&e, &Channel::ad(&alpha.power(C64::new(0.0, r)))).unwrap(),
            )
            .unwrap();
            m += inner.matrix().map(|v| v * C64::new(w, 0.0));
        }
        let expected = Channel::new(alg.clone(), alg.clone(), m).unwrap();
        worst = worst.max(channel_distance(&second, &expected));
    }
    report("8", worst <= 1e-8, &format!("max deviation {worst:.3e}"));
}

/// Criterion 9: quadrature self-tests: unit mass within 1e-12 and the
/// smoothed-average scalars agreeing with the closed forms within 1e-8.
#[test]
fn criterion_9_quadrature_self_test() {
    let mu = Measure::jrsww();
    let mass_dev = (mu.mass() - 1.0).abs();
    let results = experiments::appendix_c().unwrap();
    let scalar_names = [
        "composite-on-e01",
        "chained-on-e01",
        "separate-tensor-on-e01e01",
        "joint-tensor-on-e01e01",
    ];
    let mut worst = 0.0f64;
    let mut all = mass_dev <= 1e-12;
    for n in scalar_names {
        let r = results.iter().find(|r| r.name == n).expect("golden present");
        all &= r.pass && r.tolerance <= 1e-8;
        worst = worst.max(r.deviation);
    }
    report(
        "9",
        all,
        &format!("mass deviation {mass_dev:.3e}, worst scalar deviation {worst:.3e}"),
    );
}

/// Random endomorphism mixed toward the uniform-preparation channel so the
/// prediction stays well-conditioned.
fn conditioned(alg: &Algebra, seed: u64) -> Channel {
    let raw = random_channel(alg, alg, 2, seed);
    let mm = FaithfulState::maximally_mixed(alg);
    let rho = mm.element().clone();
    let prep = Channel::from_map(alg, alg, move |x| rho.scale(x.trace()));
    let m = raw.matrix().map(|v| v * C64::new(0.85, 0.0))
        + prep.matrix().map(|v| v * C64::new(0.15, 0.0));
    Channel::new(alg.clone(), alg.clone(), m).unwrap()
}

//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (run with `--nocapture` to see them on success).

use embedcap::oracles;
use embedcap::presets;
use embedcap::prob::{
    binary_entropy, ConditionalPMF, DistortionTable, EmbeddingProblem, FiniteAlphabet, JointPMF,
};
use embedcap::region::{
    compose_inner, feasible, rate_triple_general, rate_triple_independent, EncoderPolicy,
    FeasibilityMode, JointPolicy, RateRegion,
};
use embedcap::search::{
    compute_inner_region, compute_outer_subset_seeded, factored_grid_policies,
    inner_region_from_candidates, sample_policy, CardinalityCaps, Formula, SearchStrategy,
};
use embedcap::sim::{
    build_codebooks, decode, is_typical, run_trials, sample_typical, typical_count,
    uniform_copy_policy, DecodeOutcome, SimulationConfig,
};
use embedcap::axes;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn random_joint(dims: &[usize], rng: &mut ChaCha8Rng) -> JointPMF {
    let len: usize = dims.iter().product();
    let mut w: Vec<f64> = (0..len).map(|_| -(rng.gen::<f64>().max(1e-12)).ln()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    let axes = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| FiniteAlphabet::indexed(format!("a{i}"), d).unwrap())
        .collect();
    JointPMF::new(axes, w).unwrap()
}

fn random_example_policy(rng: &mut ChaCha8Rng, t1: usize, t2: usize) -> EncoderPolicy {
    let problem = presets::binary_example();
    let p1 = sample_policy(
        vec![problem.u1().clone()],
        vec![
            FiniteAlphabet::indexed("t1", t1).unwrap(),
            problem.x1().clone(),
        ],
        rng,
    );
    let p2 = sample_policy(
        vec![problem.u2().clone()],
        vec![
            FiniteAlphabet::indexed("t2", t2).unwrap(),
            problem.x2().clone(),
        ],
        rng,
    );
    EncoderPolicy::new(p1, p2).unwrap()
}

/// Re-express a policy over a larger auxiliary alphabet by giving the extra
/// symbols zero mass.
fn embed_policy(policy: &EncoderPolicy, t1_size: usize, t2_size: usize) -> EncoderPolicy {
    let widen = |cond: &ConditionalPMF, t_size: usize, tname: &str| {
        let old_t = cond.target_axes()[0].len();
        let x = cond.target_axes()[1].clone();
        let nu = cond.given_len();
        let mut rows = vec![0.0; nu * t_size * x.len()];
        for u in 0..nu {
            let row = cond.row(u).expect("policy rows are defined");
            for t in 0..old_t {
                for xx in 0..x.len() {
                    rows[u * t_size * x.len() + t * x.len() + xx] = row[t * x.len() + xx];
                }
            }
        }
        ConditionalPMF::from_rows(
            vec![cond.given_axes()[0].clone()],
            vec![FiniteAlphabet::indexed(tname, t_size).unwrap(), x],
            rows,
        )
        .unwrap()
    };
    EncoderPolicy::new(
        widen(policy.user(1), t1_size, "t1"),
        widen(policy.user(2), t2_size, "t2"),
    )
    .unwrap()
}

#[test]
fn acceptance_01_mi_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(2..=4)).collect();
        let joint = random_joint(&dims, &mut rng);
        let got = joint.mutual_information(&[0], &[1, 2], None).unwrap();
        let want = oracles::mutual_information_nested(&joint, &[0], &[1, 2]);
        worst = worst.max((got - want).abs());
        let got_c = joint.mutual_information(&[0], &[1], Some(&[2])).unwrap();
        let want_c = oracles::conditional_mutual_information_nested(&joint, &[0], &[1], &[2]);
        worst = worst.max((got_c - want_c).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst <= 1e-10, "worst deviation {worst}");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "acceptance 01 mi-oracle-equivalence: PASS (worst dev {worst:.2e}, {elapsed:?})"
    );
}

#[test]
fn acceptance_02_analytic_channel_value() {
    let mut w = vec![0.0; 4];
    for x in 0..2 {
        for y in 0..2 {
            let p = if x == y { 0.98 } else { 0.02 };
            w[x * 2 + y] = 0.5 * p;
        }
    }
    let joint = JointPMF::new(
        vec![FiniteAlphabet::binary("x"), FiniteAlphabet::binary("y")],
        w,
    )
    .unwrap();
    let mi = joint.mutual_information(&[0], &[1], None).unwrap();
    assert!((mi - 0.858559).abs() <= 1e-6, "I(X;Y) = {mi}");
    assert!((mi - (1.0 - binary_entropy(0.02))).abs() <= 1e-12);
    println!("acceptance 02 analytic-channel-value: PASS (I = {mi:.9})");
}

#[test]
fn acceptance_03_markov_chain_feasibility() {
    let start = Instant::now();
    let problem = presets::binary_example();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst_markov: f64 = 0.0;
    let mut worst_triple: f64 = 0.0;
    use axes::*;
    for _ in 0..1000 {
        let policy = random_example_policy(&mut rng, 2, 2);
        let joint = compose_inner(&problem, &policy).unwrap();
        let m1 = joint
            .mutual_information(&[T1, X1], &[U2, T2, X2], Some(&[U1]))
            .unwrap();
        let m2 = joint
            .mutual_information(&[T2, X2], &[U1, T1, X1], Some(&[U2]))
            .unwrap();
        worst_markov = worst_markov.max(m1).max(m2);
        let g = rate_triple_general(&joint).unwrap();
        let i = rate_triple_independent(&joint).unwrap();
        worst_triple = worst_triple
            .max((g.a - i.a).abs())
            .max((g.b - i.b).abs())
            .max((g.c - i.c).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst_markov <= 1e-9, "markov leak {worst_markov}");
    assert!(worst_triple <= 1e-10, "triple mismatch {worst_triple}");
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "acceptance 03 markov-chain-feasibility: PASS (leak {worst_markov:.2e}, triple dev {worst_triple:.2e}, {elapsed:?})"
    );
}

#[test]
fn acceptance_04_example_inner_region_reduced_scale() {
    let start = Instant::now();
    let problem = presets::binary_example();
    let caps = CardinalityCaps::symmetric(2);
    let strategy = SearchStrategy::exhaustive(0.5);
    let run = || {
        compute_inner_region(&problem, caps, &strategy, Formula::Independent)
            .unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first.region, second.region, "rerun changed the region");

    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(first.region, single.region, "1-thread run differs");
        assert_eq!(first.region, four.region, "4-thread run differs");
    }

    // convexity: the hull of the region is itself
    let hull = RateRegion::from_points(first.region.vertices()).unwrap();
    assert_eq!(hull, first.region);
    for &(r1, r2) in first.region.vertices() {
        assert!(r1 + r2 <= 0.858_560, "sum rate {r1}+{r2}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "acceptance 04 example-inner-region: PASS ({} candidates, {} vertices, max sum rate {:.6}, {elapsed:?})",
        first.candidates_evaluated,
        first.region.vertices().len(),
        first.region.max_sum_rate()
    );
}

/// Deterministic slice of the factored grid at the given step and auxiliary
/// sizes: the four factor tables of candidate `m` are drawn by random access
/// into their enumeration orders, with distinct stride primes.
fn factored_grid_slice(
    problem: &EmbeddingProblem,
    t1_size: usize,
    t2_size: usize,
    step: f64,
    count: usize,
) -> Vec<EncoderPolicy> {
    use embedcap::search::grid_policies;
    let (nu1, nu2) = (problem.u1().len(), problem.u2().len());
    let (nx1, nx2) = (problem.x1().len(), problem.x2().len());
    let grids = [
        grid_policies(nu1, t1_size, step).unwrap(),
        grid_policies(nu1 * t1_size, nx1, step).unwrap(),
        grid_policies(nu2, t2_size, step).unwrap(),
        grid_policies(nu2 * t2_size, nx2, step).unwrap(),
    ];
    let primes: [u128; 4] = [2_654_435_761, 40_503, 2_246_822_519, 3_266_489_917];
    let t1 = FiniteAlphabet::indexed("t1", t1_size).unwrap();
    let t2 = FiniteAlphabet::indexed("t2", t2_size).unwrap();
    let joint_rows = |u: &FiniteAlphabet,
                      t: &FiniteAlphabet,
                      x: &FiniteAlphabet,
                      a: &[f64],
                      b: &[f64]| {
        let (nu, nt, nx) = (u.len(), t.len(), x.len());
        let mut rows = vec![0.0; nu * nt * nx];
        for uu in 0..nu {
            for tt in 0..nt {
                for xx in 0..nx {
                    rows[uu * nt * nx + tt * nx + xx] =
                        a[uu * nt + tt] * b[(uu * nt + tt) * nx + xx];
                }
            }
        }
        ConditionalPMF::from_rows(vec![u.clone()], vec![t.clone(), x.clone()], rows).unwrap()
    };
    (0..count as u128)
        .map(|m| {
            let pick =
                |f: usize| grids[f].table_at((m * primes[f]) % grids[f].predicted_count()).unwrap();
            let p1 = joint_rows(problem.u1(), &t1, problem.x1(), &pick(0), &pick(1));
            let p2 = joint_rows(problem.u2(), &t2, problem.x2(), &pick(2), &pick(3));
            EncoderPolicy::new(p1, p2).unwrap()
        })
        .collect()
}

#[test]
fn acceptance_05_nesting() {
    let start = Instant::now();
    let problem = presets::binary_example();

    // auxiliary-cardinality nesting: every |T|=2 candidate embeds into the
    // |T|=3 candidate list (zero mass on the extra symbol), plus a
    // deterministic slice of the |T|=3 grid itself
    let caps2 = CardinalityCaps::symmetric(2);
    let base2: Vec<EncoderPolicy> = factored_grid_policies(&problem, caps2, 0.5)
        .unwrap()
        .collect();
    let region2 =
        inner_region_from_candidates(&problem, base2.iter().cloned(), Formula::Independent)
            .unwrap();
    let embedded = base2.iter().map(|p| embed_policy(p, 3, 3));
    let extra3 = factored_grid_slice(&problem, 3, 3, 0.5, 40_000);
    let region3 =
        inner_region_from_candidates(&problem, embedded.chain(extra3), Formula::Independent)
            .unwrap();
    assert!(
        region3.region.contains_region(&region2.region, 1e-9),
        "|T|=3 region does not contain |T|=2 region"
    );

    // step nesting: the half-step grid is a subset of the quarter-step grid
    let quarter_extra = factored_grid_slice(&problem, 2, 2, 0.25, 40_000);
    let region_quarter = inner_region_from_candidates(
        &problem,
        base2.iter().cloned().chain(quarter_extra),
        Formula::Independent,
    )
    .unwrap();
    assert!(
        region_quarter.region.contains_region(&region2.region, 1e-9),
        "quarter-step region does not contain half-step region"
    );
    let elapsed = start.elapsed();
    println!(
        "acceptance 05 nesting: PASS (|T| nesting over {} + {} candidates, step nesting over {} candidates, {elapsed:?})",
        region2.candidates_evaluated,
        region3.candidates_evaluated,
        region_quarter.candidates_evaluated
    );
}

#[test]
fn acceptance_06_inner_subset_of_outer_subset() {
    let start = Instant::now();
    let problem = presets::binary_example();
    let caps = CardinalityCaps::symmetric(2);
    let inner = compute_inner_region(
        &problem,
        caps,
        &SearchStrategy::exhaustive(0.5),
        Formula::Independent,
    )
    .unwrap();
    let seeds: Vec<JointPolicy> = inner
        .pareto
        .iter()
        .filter_map(|e| e.policy.as_encoder().map(JointPolicy::from_encoder))
        .collect();
    assert!(!seeds.is_empty());
    let outer = compute_outer_subset_seeded(
        &problem,
        caps,
        &SearchStrategy::random(2000, 606),
        Formula::Independent,
        &seeds,
    )
    .unwrap();
    assert!(
        outer.region.contains_region(&inner.region, 1e-9),
        "outer subset does not contain the inner region"
    );
    let elapsed = start.elapsed();
    println!(
        "acceptance 06 inner-in-outer-subset: PASS ({} lifted + {} sampled outer candidates, {elapsed:?})",
        seeds.len(),
        2000
    );
}

#[test]
fn acceptance_07_single_user_reduction() {
    let start = Instant::now();
    let problem = presets::single_user_bench(0.02);
    let mut strategy = SearchStrategy::sample_then_refine(100_000, 60, 424242);
    strategy.refine_directions = 64;
    let report = compute_inner_region(
        &problem,
        CardinalityCaps {
            t1_size: 5,
            t2_size: 2,
        },
        &strategy,
        Formula::Independent,
    )
    .unwrap();
    let best_a = report
        .pareto
        .iter()
        .map(|e| e.triple.a)
        .fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed();
    assert!(best_a >= 0.80, "best R1 bound {best_a}");
    assert!(best_a <= 1.0 - binary_entropy(0.02) + 1e-9, "{best_a} above capacity");
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "acceptance 07 single-user-reduction: PASS (best R1 bound {best_a:.6} vs optimum 0.858559, {elapsed:?})"
    );
}

#[test]
fn acceptance_08_parallel_channel_coincidence() {
    let start = Instant::now();
    let covertext = presets::independent_binary_covertext(0.3, 0.6);
    let attack = presets::parallel_bsc_attack(0.05, 0.08);
    let problem = EmbeddingProblem::new(
        covertext,
        attack,
        DistortionTable::hamming(2).unwrap(),
        DistortionTable::hamming(2).unwrap(),
        0.5,
        0.5,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 500 {
        let p1 = sample_policy(
            vec![problem.u1().clone()],
            vec![FiniteAlphabet::binary("t1"), problem.x1().clone()],
            &mut rng,
        );
        let p2 = sample_policy(
            vec![problem.u2().clone()],
            vec![FiniteAlphabet::binary("t2"), problem.x2().clone()],
            &mut rng,
        );
        let policy = EncoderPolicy::new(p1, p2).unwrap();
        let joint = compose_inner(&problem, &policy).unwrap();
        if !feasible(&joint, &problem, FeasibilityMode::Inner).unwrap().ok {
            continue;
        }
        checked += 1;
        let t = rate_triple_independent(&joint).unwrap();
        worst = worst.max((t.c - t.a - t.b).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst <= 1e-10, "worst |c - a - b| = {worst}");
    println!(
        "acceptance 08 parallel-channel-coincidence: PASS (500 feasible policies, worst dev {worst:.2e}, {elapsed:?})"
    );
}

#[test]
fn acceptance_09_simulator_properties() {
    let start = Instant::now();

    // (i) zero rates: a single message pair and a deterministic pipeline
    // decode without error
    let noiseless = EmbeddingProblem::new(
        presets::independent_binary_covertext(0.05, 0.10),
        presets::binary_additive_attack(0.0),
        DistortionTable::hamming(2).unwrap(),
        DistortionTable::hamming(2).unwrap(),
        1.0,
        1.0,
    )
    .unwrap();
    let constant = {
        let build = |u: &FiniteAlphabet, tname: &str, x: &FiniteAlphabet| {
            let t = FiniteAlphabet::indexed(tname, 1).unwrap();
            let mut rows = vec![0.0; u.len() * x.len()];
            for uu in 0..u.len() {
                rows[uu * x.len()] = 1.0;
            }
            ConditionalPMF::from_rows(vec![u.clone()], vec![t, x.clone()], rows).unwrap()
        };
        EncoderPolicy::new(
            build(noiseless.u1(), "t1", noiseless.x1()),
            build(noiseless.u2(), "t2", noiseless.x2()),
        )
        .unwrap()
    };
    let mut cfg = SimulationConfig::new(noiseless.clone(), constant, 12, 0.2);
    cfg.trials = 100;
    cfg.seed = 3;
    let zero_rate = run_trials(&cfg).unwrap();
    assert_eq!(zero_rate.p_e_hat, 0.0, "(i) p_e = {}", zero_rate.p_e_hat);

    // (ii) planted codewords decode back to their messages
    let uniform = EmbeddingProblem::new(
        presets::independent_binary_covertext(0.5, 0.5),
        presets::binary_additive_attack(0.0),
        DistortionTable::hamming(2).unwrap(),
        DistortionTable::hamming(2).unwrap(),
        1.0,
        1.0,
    )
    .unwrap();
    let policy = uniform_copy_policy(&uniform).unwrap();
    let mut plant_cfg = SimulationConfig::new(uniform.clone(), policy.clone(), 24, 0.1);
    plant_cfg.r1 = 0.04;
    plant_cfg.r2 = 0.04;
    let joint = compose_inner(&uniform, &policy).unwrap();
    let t1t2y = joint
        .marginal(&[axes::T1, axes::T2, axes::Y])
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let books = build_codebooks(&plant_cfg, &mut rng).unwrap();
    // independent uniqueness oracle: under the noiseless parity channel a
    // typical triple forces t2 = t1 xor y, so enumerating user-1 codewords
    // finds every consistent message pair without touching the decoder
    let mut user2_words: std::collections::HashMap<&[u8], Vec<usize>> =
        std::collections::HashMap::new();
    for w2 in 0..books.user2.message_count() {
        for l2 in 0..books.user2.list_size() {
            user2_words
                .entry(books.user2.word(w2, l2))
                .or_default()
                .push(w2);
        }
    }
    let message_pairs_for = |y: &[u8]| {
        let mut pairs = std::collections::BTreeSet::new();
        for w1 in 0..books.user1.message_count() {
            for l1 in 0..books.user1.list_size() {
                let t1 = books.user1.word(w1, l1);
                let partner: Vec<u8> = t1.iter().zip(y).map(|(a, b)| a ^ b).collect();
                if let Some(bins2) = user2_words.get(partner.as_slice()) {
                    if is_typical(&[t1, &partner, y], &t1t2y, 0.1).unwrap() {
                        for &w2 in bins2 {
                            pairs.insert((w1, w2));
                        }
                    }
                }
            }
        }
        pairs
    };
    let mut planted = 0;
    let mut recovered = 0;
    let mut collisions = 0;
    'outer: for w1 in 0..books.user1.message_count() {
        for l1 in 0..books.user1.list_size().min(60) {
            for w2 in 0..books.user2.message_count() {
                for l2 in 0..books.user2.list_size().min(60) {
                    let t1 = books.user1.word(w1, l1);
                    let t2 = books.user2.word(w2, l2);
                    let y: Vec<u8> = t1.iter().zip(t2).map(|(a, b)| a ^ b).collect();
                    if !is_typical(&[t1, t2, &y], &t1t2y, 0.1).unwrap() {
                        continue;
                    }
                    let pairs = message_pairs_for(&y);
                    if pairs.len() != 1 {
                        // another message pair collides: not a unique plant
                        collisions += 1;
                        continue;
                    }
                    planted += 1;
                    if decode(&y, &books, &t1t2y, 0.1).unwrap() == DecodeOutcome::Decoded(w1, w2)
                    {
                        recovered += 1;
                    }
                    if planted >= 40 {
                        break 'outer;
                    }
                }
            }
        }
    }
    assert!(planted >= 40, "(ii) only {planted} unique plants");
    assert_eq!(recovered, planted, "(ii) recovery {recovered}/{planted}");

    // (iii) distortion bound at the pinned configuration
    let loose = presets::binary_example_with_levels(1.0, 1.0);
    let policy = uniform_copy_policy(&loose).unwrap();
    let mut cfg = SimulationConfig::new(loose.clone(), policy, 12, 0.3);
    cfg.r1 = 0.05;
    cfg.r2 = 0.05;
    cfg.trials = 200;
    cfg.seed = 11;
    let report = run_trials(&cfg).unwrap();
    let bound1 = loose.level(1) + cfg.epsilon * loose.d_max(1) + 0.1;
    let bound2 = loose.level(2) + cfg.epsilon * loose.d_max(2) + 0.1;
    assert!(report.d1_hat <= bound1, "(iii) d1 {}", report.d1_hat);
    assert!(report.d2_hat <= bound2, "(iii) d2 {}", report.d2_hat);

    // (iv) longer blocks never hurt: mean error over 5 seeds at n = 14 vs
    // n = 8 for rates well inside the region
    let mut means = [0.0f64; 2];
    for (slot, n) in [(0usize, 8usize), (1, 14)] {
        for seed in 0..5u64 {
            let loose = presets::binary_example_with_levels(1.0, 1.0);
            let policy = uniform_copy_policy(&loose).unwrap();
            let mut cfg = SimulationConfig::new(loose, policy, n, 0.3);
            cfg.r1 = 0.05;
            cfg.r2 = 0.05;
            cfg.trials = 20;
            cfg.seed = 100 + seed;
            means[slot] += run_trials(&cfg).unwrap().p_e_hat / 5.0;
        }
    }
    assert!(
        means[1] <= means[0] + 0.05,
        "(iv) p_e(14) = {} vs p_e(8) = {}",
        means[1],
        means[0]
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "acceptance 09 simulator-properties: PASS (p_e(0 rates) = {}, recovery {recovered}/{planted} ({collisions} collisions skipped), d = ({:.3}, {:.3}), p_e means {:.3} -> {:.3}, {elapsed:?})",
        zero_rate.p_e_hat, report.d1_hat, report.d2_hat, means[0], means[1]
    );
}

#[test]
fn acceptance_10_typicality_lemmas() {
    let start = Instant::now();

    // exhaustive typical-set count vs the type-counting route
    let pmf = JointPMF::new(vec![FiniteAlphabet::binary("x")], vec![0.7, 0.3]).unwrap();
    let (n, eps) = (10usize, 0.2);
    let mut brute = 0u128;
    for bits in 0u32..(1 << n) {
        let seq: Vec<u8> = (0..n).map(|k| ((bits >> k) & 1) as u8).collect();
        if is_typical(&[&seq], &pmf, eps).unwrap() {
            brute += 1;
        }
    }
    let counted = typical_count(&pmf, n, eps).unwrap();
    assert_eq!(brute, counted, "exhaustive {brute} vs type count {counted}");
    assert_eq!(brute, 120);

    // i.i.d. typicality frequency at n = 200
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut hits = 0;
    for _ in 0..1000 {
        if sample_typical(&pmf, 200, 0.2, &mut rng, 1).is_ok() {
            hits += 1;
        }
    }
    assert!(hits >= 900, "iid typicality frequency {hits}/1000");

    // Markov-lemma frequency at n = 200
    let (p_g, q) = (0.01, 0.01);
    let mut w = vec![0.0; 8];
    for g in 0..2usize {
        for k in 0..2usize {
            for l in 0..2usize {
                let pg = if g == 1 { p_g } else { 1.0 - p_g };
                let pk = if k == g { 1.0 - q } else { q };
                let pl = if l == k { 1.0 - q } else { q };
                w[(g * 2 + k) * 2 + l] = pg * pk * pl;
            }
        }
    }
    let triple = JointPMF::new(
        vec![
            FiniteAlphabet::binary("g"),
            FiniteAlphabet::binary("k"),
            FiniteAlphabet::binary("l"),
        ],
        w,
    )
    .unwrap();
    let pair = triple.marginal(&[0, 1]).unwrap();
    let l_given_k = triple.conditional(&[2], &[1]).unwrap();
    let mut markov_hits = 0;
    for _ in 0..1000 {
        let gk = sample_typical(&pair, 200, 0.2, &mut rng, 100_000).unwrap();
        let (g, k) = (&gk[0], &gk[1]);
        let mut l = vec![0u8; 200];
        for i in 0..200 {
            let row = l_given_k.row(k[i] as usize).unwrap();
            let u: f64 = rng.gen();
            l[i] = u8::from(u >= row[0]);
        }
        if is_typical(&[g, k, &l], &triple, 0.2).unwrap() {
            markov_hits += 1;
        }
    }
    assert!(markov_hits >= 800, "markov frequency {markov_hits}/1000");

    let elapsed = start.elapsed();
    println!(
        "acceptance 10 typicality-lemmas: PASS (count {brute}, iid {hits}/1000, markov {markov_hits}/1000, {elapsed:?})"
    );
}

//! Desk-scale executable model of the random-coding embedding scheme:
//! strong typicality, codebook generation, the two-stage Markov pre-encoders,
//! stegotext generation, the attack channel, the joint-typicality decoder,
//! and Monte-Carlo estimation of error and distortion.
//!
//! Every random object is drawn from a ChaCha stream derived from the
//! configured seed: stream 0 builds the codebooks, stream `1 + t` drives
//! trial `t`. Trials therefore parallelize without affecting results.

mod codebook;
mod decode;
mod encode;
pub mod typicality;

pub use codebook::{build_codebooks, Codebook, Codebooks};
pub use decode::{decode, DecodeOutcome};
pub use encode::{attack, estimate_coupling, pre_encode, stego, PreEncoded};
pub use typicality::{
    is_typical, sample_typical, sample_typical_exact, typical_count, TypicalityParams,
};

use crate::axes;
use crate::exec;
use crate::prob::{EmbeddingProblem, JointPMF, ProbError};
use crate::region::{compose_inner, EncoderPolicy, RegionError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use typicality::{CountBounds, RowSampler, TupleSampler};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("sequence length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("symbol {symbol} is outside axis {axis}")]
    SymbolOutOfRange { axis: usize, symbol: u8 },
    #[error("expected {expected} sequences, got {got}")]
    AxisCount { expected: usize, got: usize },
    #[error("no typical sequence found after {tries} tries")]
    TypicalSetEmptyOrRare { tries: usize },
    #[error("codebooks need {needed} codewords, over the cap {cap}")]
    CapExceeded { needed: u64, cap: u64 },
    #[error("conditional row {given} has zero mass")]
    UndefinedRow { given: usize },
    #[error("instance too large for exhaustive enumeration")]
    TooLargeToEnumerate,
    #[error("invalid configuration: {0}")]
    BadConfig(&'static str),
}

/// Parameters of one Monte-Carlo run.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub problem: EmbeddingProblem,
    pub policy: EncoderPolicy,
    /// Embedding rates in bits per symbol; `M_i = ceil(2^(n R_i))`.
    pub r1: f64,
    pub r2: f64,
    pub n: usize,
    pub epsilon: f64,
    /// Pre-encoder acceptance thresholds: user 1 requires an estimated
    /// coupling probability of at least `1 - mu`, user 2 at least `1 - nu`.
    pub mu: f64,
    pub nu: f64,
    /// Monte-Carlo draws per coupling-probability estimate.
    pub estimator_samples: usize,
    pub trials: u64,
    pub seed: u64,
    /// Hard limit on `M1 L1 + M2 L2`.
    pub codebook_cap: u64,
    /// Rejection budget per typical-sequence draw.
    pub sample_max_tries: usize,
    /// Strict-achievability slack, recorded for provenance; the simulator
    /// itself never subtracts it.
    pub rate_margin: f64,
}

impl SimulationConfig {
    pub fn new(problem: EmbeddingProblem, policy: EncoderPolicy, n: usize, epsilon: f64) -> Self {
        Self {
            problem,
            policy,
            r1: 0.0,
            r2: 0.0,
            n,
            epsilon,
            mu: 0.1,
            nu: 0.1,
            estimator_samples: 200,
            trials: 100,
            seed: 0,
            codebook_cap: 1 << 20,
            sample_max_tries: 10_000,
            rate_margin: 0.0,
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        TypicalityParams::new(self.n, self.epsilon)?;
        // mu = 1 (respectively nu = 1) is admitted as the vacuous-threshold
        // reduction: the pre-encoder becomes a plain joint-typicality search.
        if !(self.mu > 0.0 && self.mu <= 1.0) || !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(SimError::BadConfig("mu and nu must lie in (0, 1]"));
        }
        if self.r1 < 0.0 || self.r2 < 0.0 {
            return Err(SimError::BadConfig("rates must be nonnegative"));
        }
        if self.estimator_samples == 0 {
            return Err(SimError::BadConfig("estimator_samples must be at least 1"));
        }
        if self.trials == 0 {
            return Err(SimError::BadConfig("trials must be at least 1"));
        }
        if self.sample_max_tries == 0 {
            return Err(SimError::BadConfig("sample_max_tries must be at least 1"));
        }
        Ok(())
    }
}

/// `M = ceil(2^(n R))`, saturating.
pub fn message_count(rate: f64, n: usize) -> u64 {
    let v = (2f64).powf(rate * n as f64).ceil();
    if v.is_finite() && v < u64::MAX as f64 {
        (v as u64).max(1)
    } else {
        u64::MAX
    }
}

/// `L = ceil(2^(n [I + 4 eps]))`, saturating; tiny negative information
/// estimates are clamped to zero.
pub fn codeword_list_size(info: f64, epsilon: f64, n: usize) -> u64 {
    let v = (2f64).powf(n as f64 * (info.max(0.0) + 4.0 * epsilon)).ceil();
    if v.is_finite() && v < u64::MAX as f64 {
        (v as u64).max(1)
    } else {
        u64::MAX
    }
}

/// Codebook sizing a configuration implies, resolvable without building
/// anything: message counts, per-bin list sizes, and the auxiliary-coupling
/// informations they derive from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationPlan {
    pub m1: u64,
    pub m2: u64,
    pub l1: u64,
    pub l2: u64,
    pub info_u1t1: f64,
    pub info_u2t2: f64,
}

pub fn plan(config: &SimulationConfig) -> Result<SimulationPlan, SimError> {
    let ctx = SimContext::new(config)?;
    Ok(SimulationPlan {
        m1: ctx.m1,
        m2: ctx.m2,
        l1: ctx.l1,
        l2: ctx.l2,
        info_u1t1: ctx.info_u1t1,
        info_u2t2: ctx.info_u2t2,
    })
}

/// Occurrences of the coupling and confusion events across a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EventCounts {
    /// Encoder outputs not jointly typical with the covertexts.
    pub a0: u64,
    /// Same, with the stegotexts included.
    pub a1: u64,
    /// Transmitted codeword pair not typical with the channel output.
    pub e1: u64,
    /// A wrong first message decodes alongside the true second message.
    pub e2: u64,
    /// A wrong second message decodes alongside the true first message.
    pub e3: u64,
    /// Both messages confusable at once.
    pub e4: u64,
}

/// Aggregated outcome of a Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub trials_run: u64,
    pub p_e_hat: f64,
    pub d1_hat: f64,
    pub d2_hat: f64,
    pub event_counts: EventCounts,
    /// Per-encoder count of "no qualifying codeword, fell back to the first"
    /// events (the fallback also fires inside user 2's coupling estimator,
    /// where it is not counted).
    pub encoder_fallbacks: [u64; 2],
}

/// Immutable precomputed state shared by every trial: the composed system
/// joint, its marginals with their typicality windows, and per-letter
/// samplers for each conditional the scheme draws from.
pub(crate) struct SimContext {
    pub(crate) n: usize,
    pub(crate) epsilon: f64,
    pub(crate) dims: SystemDims,
    pub(crate) t1_marginal: JointPMF,
    pub(crate) t2_marginal: JointPMF,
    pub(crate) bounds_u1t1: CountBounds,
    pub(crate) bounds_u2t2: CountBounds,
    pub(crate) bounds_quad: CountBounds,
    pub(crate) bounds_sextet: CountBounds,
    pub(crate) bounds_t1t2y: CountBounds,
    pub(crate) sample_covertext: TupleSampler,
    pub(crate) samp_u2t2_given_u1t1: RowSampler,
    pub(crate) samp_u1_given_u2t2: RowSampler,
    pub(crate) samp_x1_given_u1t1: RowSampler,
    pub(crate) samp_x2_given_u2t2: RowSampler,
    pub(crate) samp_y_given_x1x2: RowSampler,
    pub(crate) info_u1t1: f64,
    pub(crate) info_u2t2: f64,
    pub(crate) m1: u64,
    pub(crate) m2: u64,
    pub(crate) l1: u64,
    pub(crate) l2: u64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SystemDims {
    pub nu1: usize,
    pub nt1: usize,
    pub nu2: usize,
    pub nt2: usize,
    pub nx1: usize,
    pub nx2: usize,
    pub ny: usize,
}

impl SimContext {
    pub(crate) fn new(config: &SimulationConfig) -> Result<Self, SimError> {
        config.validate()?;
        let joint = compose_inner(&config.problem, &config.policy)?;
        use axes::*;
        let dims_v = joint.dims();
        let dims = SystemDims {
            nu1: dims_v[U1],
            nt1: dims_v[T1],
            nu2: dims_v[U2],
            nt2: dims_v[T2],
            nx1: dims_v[X1],
            nx2: dims_v[X2],
            ny: dims_v[Y],
        };
        let (n, epsilon) = (config.n, config.epsilon);
        let u1t1 = joint.marginal(&[U1, T1])?;
        let u2t2 = joint.marginal(&[U2, T2])?;
        let quad = joint.marginal(&[U1, T1, U2, T2])?;
        let sextet = joint.marginal(&[U1, T1, U2, T2, X1, X2])?;
        let t1t2y = joint.marginal(&[T1, T2, Y])?;
        let t1_marginal = joint.marginal(&[T1])?;
        let t2_marginal = joint.marginal(&[T2])?;

        let info_u1t1 = joint.mutual_information(&[U1], &[T1], None)?;
        let info_u2t2 = joint.mutual_information(&[U2], &[T2], None)?;
        let m1 = message_count(config.r1, n);
        let m2 = message_count(config.r2, n);
        let l1 = codeword_list_size(info_u1t1, epsilon, n);
        let l2 = codeword_list_size(info_u2t2, epsilon, n);
        let needed = m1
            .checked_mul(l1)
            .and_then(|a| m2.checked_mul(l2).and_then(|b| a.checked_add(b)))
            .unwrap_or(u64::MAX);
        if needed > config.codebook_cap {
            return Err(SimError::CapExceeded {
                needed,
                cap: config.codebook_cap,
            });
        }

        let samp_u2t2_given_u1t1 = RowSampler::new(&quad.conditional(&[2, 3], &[0, 1])?);
        let samp_u1_given_u2t2 = RowSampler::new(&quad.conditional(&[0], &[2, 3])?);
        let u1t1x1 = joint.marginal(&[U1, T1, X1])?;
        let samp_x1_given_u1t1 = RowSampler::new(&u1t1x1.conditional(&[2], &[0, 1])?);
        let u2t2x2 = joint.marginal(&[U2, T2, X2])?;
        let samp_x2_given_u2t2 = RowSampler::new(&u2t2x2.conditional(&[2], &[0, 1])?);
        let samp_y_given_x1x2 = RowSampler::new(config.problem.attack());

        Ok(Self {
            n,
            epsilon,
            dims,
            bounds_u1t1: CountBounds::new(&u1t1, n, epsilon),
            bounds_u2t2: CountBounds::new(&u2t2, n, epsilon),
            bounds_quad: CountBounds::new(&quad, n, epsilon),
            bounds_sextet: CountBounds::new(&sextet, n, epsilon),
            bounds_t1t2y: CountBounds::new(&t1t2y, n, epsilon),
            t1_marginal,
            t2_marginal,
            sample_covertext: TupleSampler::new(config.problem.covertext()),
            samp_u2t2_given_u1t1,
            samp_u1_given_u2t2,
            samp_x1_given_u1t1,
            samp_x2_given_u2t2,
            samp_y_given_x1x2,
            info_u1t1,
            info_u2t2,
            m1,
            m2,
            l1,
            l2,
        })
    }

    pub(crate) fn trial_rng(&self, seed: u64, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1 + trial);
        rng
    }
}

struct TrialOutcome {
    error: bool,
    e: [bool; 4],
    a0: bool,
    a1: bool,
    fallback: [bool; 2],
    d1: f64,
    d2: f64,
}

fn run_one_trial(
    ctx: &SimContext,
    config: &SimulationConfig,
    books: &Codebooks,
    trial: u64,
) -> Result<TrialOutcome, SimError> {
    let n = ctx.n;
    let mut rng = ctx.trial_rng(config.seed, trial);

    // covertexts and messages
    let mut u1 = vec![0u8; n];
    let mut u2 = vec![0u8; n];
    let mut pair = [0u8; 2];
    for k in 0..n {
        ctx.sample_covertext.sample_into(&mut rng, &mut pair);
        u1[k] = pair[0];
        u2[k] = pair[1];
    }
    let w1 = rng.gen_range(0..ctx.m1) as usize;
    let w2 = rng.gen_range(0..ctx.m2) as usize;

    // Markov encoding order: user 1 commits first, user 2 conditions on the
    // whole user-1 encoder through its coupling estimate.
    let enc1 = encode::pre_encode_with(ctx, config, books, 1, w1, &u1, &mut rng)?;
    let enc2 = encode::pre_encode_with(ctx, config, books, 2, w2, &u2, &mut rng)?;
    let x1 = encode::stego_with(ctx, 1, &u1, &enc1.codeword, &mut rng)?;
    let x2 = encode::stego_with(ctx, 2, &u2, &enc2.codeword, &mut rng)?;
    let mut y = vec![0u8; n];
    for k in 0..n {
        let row = (x1[k] as usize) * ctx.dims.nx2 + x2[k] as usize;
        y[k] = ctx.samp_y_given_x1x2.sample(row, &mut rng)? as u8;
    }

    // coupling events
    let quad_dims = [ctx.dims.nu1, ctx.dims.nt1, ctx.dims.nu2, ctx.dims.nt2];
    let mut counts = Vec::new();
    typicality::joint_counts(
        &[&u1, &enc1.codeword, &u2, &enc2.codeword],
        &quad_dims,
        &mut counts,
    )?;
    let a0 = !ctx.bounds_quad.check(&counts);
    let sextet_dims = [
        ctx.dims.nu1,
        ctx.dims.nt1,
        ctx.dims.nu2,
        ctx.dims.nt2,
        ctx.dims.nx1,
        ctx.dims.nx2,
    ];
    typicality::joint_counts(
        &[&u1, &enc1.codeword, &u2, &enc2.codeword, &x1, &x2],
        &sextet_dims,
        &mut counts,
    )?;
    let a1 = !ctx.bounds_sextet.check(&counts);

    // full-codebook scan: decode outcome plus the confusion events
    let scan = decode::scan_trial(
        ctx,
        books,
        &y,
        w1,
        w2,
        books.user1.word_id(w1, enc1.index),
        books.user2.word_id(w2, enc2.index),
    );
    let error = scan.outcome != DecodeOutcome::Decoded(w1, w2);
    // The decoder errs exactly when some wrong message pair is confusable or
    // the true pair is unreachable; unreachability implies the transmitted
    // pair itself was atypical.
    debug_assert_eq!(
        error,
        scan.e[1] || scan.e[2] || scan.e[3] || !scan.true_pair_reachable
    );
    debug_assert!(!error || scan.e.iter().any(|&e| e));

    let d1 = (0..n)
        .map(|k| config.problem.distortion(1).get(u1[k] as usize, x1[k] as usize))
        .sum::<f64>()
        / n as f64;
    let d2 = (0..n)
        .map(|k| config.problem.distortion(2).get(u2[k] as usize, x2[k] as usize))
        .sum::<f64>()
        / n as f64;

    Ok(TrialOutcome {
        error,
        e: scan.e,
        a0,
        a1,
        fallback: [enc1.fallback, enc2.fallback],
        d1,
        d2,
    })
}

/// Run the configured number of independent trials and aggregate.
pub fn run_trials(config: &SimulationConfig) -> Result<SimulationReport, SimError> {
    let ctx = SimContext::new(config)?;
    let mut codebook_rng = ChaCha8Rng::seed_from_u64(config.seed);
    codebook_rng.set_stream(0);
    let books = codebook::build_with(&ctx, config, &mut codebook_rng)?;

    let results = exec::par_map_range(config.trials, |t| run_one_trial(&ctx, config, &books, t));

    let mut report = SimulationReport {
        trials_run: 0,
        p_e_hat: 0.0,
        d1_hat: 0.0,
        d2_hat: 0.0,
        event_counts: EventCounts::default(),
        encoder_fallbacks: [0, 0],
    };
    let mut errors = 0u64;
    for r in results {
        let t = r?;
        report.trials_run += 1;
        errors += t.error as u64;
        report.d1_hat += t.d1;
        report.d2_hat += t.d2;
        report.event_counts.a0 += t.a0 as u64;
        report.event_counts.a1 += t.a1 as u64;
        report.event_counts.e1 += t.e[0] as u64;
        report.event_counts.e2 += t.e[1] as u64;
        report.event_counts.e3 += t.e[2] as u64;
        report.event_counts.e4 += t.e[3] as u64;
        report.encoder_fallbacks[0] += t.fallback[0] as u64;
        report.encoder_fallbacks[1] += t.fallback[1] as u64;
    }
    report.p_e_hat = errors as f64 / report.trials_run as f64;
    report.d1_hat /= report.trials_run as f64;
    report.d2_hat /= report.trials_run as f64;
    Ok(report)
}

/// The uniform-auxiliary benchmark policy: `T` uniform independent of `U`
/// and `X = T`, with `|T| = |X|` per user. Its auxiliary carries no source
/// information, so codebook sizes stay at `2^(4 n eps)`.
pub fn uniform_copy_policy(problem: &EmbeddingProblem) -> Result<EncoderPolicy, SimError> {
    use crate::prob::{ConditionalPMF, FiniteAlphabet};
    let build = |u: &FiniteAlphabet, tname: &str, x: &FiniteAlphabet| {
        let k = x.len();
        let t = FiniteAlphabet::indexed(tname, k)?;
        let mut rows = vec![0.0; u.len() * k * k];
        for uu in 0..u.len() {
            for tt in 0..k {
                rows[uu * k * k + tt * k + tt] = 1.0 / k as f64;
            }
        }
        Ok::<_, ProbError>(ConditionalPMF::from_rows(
            vec![u.clone()],
            vec![t, x.clone()],
            rows,
        )?)
    };
    let p1 = build(problem.u1(), "t1", problem.x1())?;
    let p2 = build(problem.u2(), "t2", problem.x2())?;
    EncoderPolicy::new(p1, p2).map_err(SimError::Region)
}

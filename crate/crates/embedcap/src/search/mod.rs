//! Candidate-policy generation (exhaustive grids, random sampling, local
//! refinement) under cardinality caps, and assembly of inner regions and
//! outer-subset regions.
//!
//! Candidate streams are deterministic: grid order is fixed, and sampled
//! candidate `k` is drawn from its own ChaCha stream keyed by `(seed, k)`, so
//! a larger budget extends a smaller one prefix-exactly. Evaluation is a pure
//! map over batches (parallel when the `parallel` feature is on) and all
//! merging is sequential in candidate order, so reports do not depend on the
//! worker count.

mod grid;
mod refine;

pub use grid::{grid_conditionals, grid_policies, sample_policy, sample_rows, GridTables};
pub use refine::{refine, refine_joint};

use crate::exec;
use crate::prob::{EmbeddingProblem, FiniteAlphabet, ProbError};
use crate::region::{
    compose_inner, compose_outer, feasible, hull_union, pentagon, rate_triple_general,
    rate_triple_independent, EncoderPolicy, FeasibilityMode, JointPolicy, RateRegion, RateTriple,
    RegionError,
};
use std::time::{Duration, Instant};
use thiserror::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Candidates evaluated per parallel batch.
const DEFAULT_BATCH: usize = 1024;

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("step {0} does not divide the unit interval")]
    StepNotDivisor(f64),
    #[error("covertexts are not independent: I(U1;U2) = {dependence}")]
    NotIndependent { dependence: f64 },
    #[error("sample budget must be at least 1")]
    BudgetZero,
    #[error("exhaustive grid has {predicted} candidates, over the cap {cap}")]
    ExhaustiveTooLarge { predicted: u128, cap: u128 },
    #[error("refinement requires a feasible starting policy")]
    InfeasibleStart,
    #[error("direction weights must be nonnegative and not all zero")]
    BadDirection,
}

impl From<ProbError> for SearchError {
    fn from(e: ProbError) -> Self {
        SearchError::Region(RegionError::Prob(e))
    }
}

/// Which rate-triple formula a search evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    General,
    Independent,
}

/// How candidates are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    ExhaustiveGrid,
    RandomSample,
    SampleThenRefine,
}

/// Search configuration. `rate_margin` is carried through for consumers that
/// subtract a strict-achievability slack; region reporting itself uses closed
/// pentagons and leaves it at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchStrategy {
    pub mode: SearchMode,
    pub grid_step: f64,
    pub sample_budget: u64,
    pub refine_directions: usize,
    pub refine_steps: usize,
    pub seed: u64,
    pub rate_margin: f64,
    /// Exhaustive enumeration is refused above this predicted candidate count.
    pub exhaustive_cap: u128,
    pub batch_size: usize,
}

impl SearchStrategy {
    pub fn exhaustive(grid_step: f64) -> Self {
        Self {
            mode: SearchMode::ExhaustiveGrid,
            grid_step,
            sample_budget: 0,
            refine_directions: 64,
            refine_steps: 100,
            seed: 0,
            rate_margin: 0.0,
            exhaustive_cap: 100_000_000,
            batch_size: DEFAULT_BATCH,
        }
    }

    pub fn random(sample_budget: u64, seed: u64) -> Self {
        Self {
            mode: SearchMode::RandomSample,
            sample_budget,
            seed,
            ..Self::exhaustive(0.1)
        }
    }

    pub fn sample_then_refine(sample_budget: u64, refine_steps: usize, seed: u64) -> Self {
        Self {
            mode: SearchMode::SampleThenRefine,
            sample_budget,
            refine_steps,
            seed,
            ..Self::exhaustive(0.1)
        }
    }
}

/// Auxiliary-alphabet sizes for the two users.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardinalityCaps {
    pub t1_size: usize,
    pub t2_size: usize,
}

impl CardinalityCaps {
    pub fn symmetric(size: usize) -> Self {
        Self {
            t1_size: size,
            t2_size: size,
        }
    }

    /// Support-lemma cap for the general inner region:
    /// `|Ti| <= |U1||U2||Xi| + 1`.
    pub fn inner_general(problem: &EmbeddingProblem) -> Self {
        let uu = problem.u1().len() * problem.u2().len();
        Self {
            t1_size: uu * problem.x1().len() + 1,
            t2_size: uu * problem.x2().len() + 1,
        }
    }

    /// Support-lemma cap for the independent-covertext inner region:
    /// `|Ti| <= |Ui||Xi| + 1`.
    pub fn inner_independent(problem: &EmbeddingProblem) -> Self {
        Self {
            t1_size: problem.u1().len() * problem.x1().len() + 1,
            t2_size: problem.u2().len() * problem.x2().len() + 1,
        }
    }
}

/// A Pareto-maximal candidate retained by a search.
#[derive(Debug, Clone)]
pub struct ParetoEntry {
    /// Position of the candidate in the deterministic candidate stream.
    pub index: u64,
    pub triple: RateTriple,
    pub policy: CandidatePolicy,
}

#[derive(Debug, Clone)]
pub enum CandidatePolicy {
    Encoder(EncoderPolicy),
    Joint(JointPolicy),
}

impl CandidatePolicy {
    pub fn as_encoder(&self) -> Option<&EncoderPolicy> {
        match self {
            CandidatePolicy::Encoder(p) => Some(p),
            CandidatePolicy::Joint(_) => None,
        }
    }

    pub fn as_joint(&self) -> Option<&JointPolicy> {
        match self {
            CandidatePolicy::Joint(p) => Some(p),
            CandidatePolicy::Encoder(_) => None,
        }
    }
}

/// Result of one region computation.
#[derive(Debug, Clone)]
pub struct RegionReport {
    pub region: RateRegion,
    pub pareto: Vec<ParetoEntry>,
    pub candidates_evaluated: u64,
    pub feasible_count: u64,
    pub wall_time: Duration,
}

impl RegionReport {
    /// Best single bound found in each coordinate, for quick summaries.
    pub fn best_triple(&self) -> Option<RateTriple> {
        self.pareto.iter().map(|e| e.triple).fold(None, |acc, t| {
            Some(match acc {
                None => t,
                Some(m) => RateTriple::new(m.a.max(t.a), m.b.max(t.b), m.c.max(t.c)),
            })
        })
    }
}

pub(crate) fn triple_for(
    joint: &crate::prob::JointPMF,
    formula: Formula,
) -> Result<RateTriple, RegionError> {
    match formula {
        Formula::General => rate_triple_general(joint),
        Formula::Independent => rate_triple_independent(joint),
    }
}

/// Feasibility-filtered evaluation of one factored policy.
pub(crate) fn evaluate_encoder(
    problem: &EmbeddingProblem,
    policy: &EncoderPolicy,
    formula: Formula,
) -> Result<Option<RateTriple>, SearchError> {
    let joint = compose_inner(problem, policy)?;
    let feas = feasible(&joint, problem, FeasibilityMode::Inner)?;
    if !feas.ok {
        return Ok(None);
    }
    Ok(Some(triple_for(&joint, formula)?))
}

/// Feasibility-filtered evaluation of one joint policy (outer mode: no
/// positivity requirement).
pub(crate) fn evaluate_joint(
    problem: &EmbeddingProblem,
    policy: &JointPolicy,
    formula: Formula,
) -> Result<Option<RateTriple>, SearchError> {
    let joint = compose_outer(problem, policy)?;
    let feas = feasible(&joint, problem, FeasibilityMode::Outer)?;
    if !feas.ok {
        return Ok(None);
    }
    Ok(Some(triple_for(&joint, formula)?))
}

struct Sweep<P> {
    pareto: Vec<(u64, P, RateTriple)>,
    evaluated: u64,
    feasible: u64,
}

fn pareto_insert<P>(set: &mut Vec<(u64, P, RateTriple)>, index: u64, policy: P, triple: RateTriple) {
    if set.iter().any(|(_, _, t)| triple.dominated_by(t)) {
        return;
    }
    set.retain(|(_, _, t)| !t.dominated_by(&triple));
    set.push((index, policy, triple));
}

/// Evaluate a candidate stream in batches, keeping the Pareto-maximal
/// feasible triples. The merge runs sequentially in stream order.
fn sweep<P, I, F>(candidates: I, batch_size: usize, eval: F) -> Result<Sweep<P>, SearchError>
where
    P: Clone + Send + Sync,
    I: Iterator<Item = P>,
    F: Fn(&P) -> Result<Option<RateTriple>, SearchError> + Sync,
{
    let mut out = Sweep {
        pareto: Vec::new(),
        evaluated: 0,
        feasible: 0,
    };
    let mut candidates = candidates.peekable();
    while candidates.peek().is_some() {
        let batch: Vec<P> = candidates.by_ref().take(batch_size.max(1)).collect();
        let results = exec::par_map(&batch, &eval);
        for (policy, result) in batch.into_iter().zip(results) {
            let index = out.evaluated;
            out.evaluated += 1;
            if let Some(triple) = result? {
                out.feasible += 1;
                pareto_insert(&mut out.pareto, index, policy, triple);
            }
        }
    }
    Ok(out)
}

fn region_of<P>(pareto: &[(u64, P, RateTriple)]) -> Result<RateRegion, SearchError> {
    let mut regions = vec![RateRegion::degenerate()];
    regions.extend(pareto.iter().map(|(_, _, t)| pentagon(*t)));
    Ok(hull_union(&regions)?)
}

fn finish<P, W>(mut sweep: Sweep<P>, start: Instant, wrap: W) -> Result<RegionReport, SearchError>
where
    W: Fn(P) -> CandidatePolicy,
{
    sweep.pareto.sort_by_key(|(i, _, _)| *i);
    let region = region_of(&sweep.pareto)?;
    Ok(RegionReport {
        region,
        pareto: sweep
            .pareto
            .into_iter()
            .map(|(index, policy, triple)| ParetoEntry {
                index,
                triple,
                policy: wrap(policy),
            })
            .collect(),
        candidates_evaluated: sweep.evaluated,
        feasible_count: sweep.feasible,
        wall_time: start.elapsed(),
    })
}

fn check_formula(problem: &EmbeddingProblem, formula: Formula) -> Result<(), SearchError> {
    if formula == Formula::Independent {
        let dependence = problem.covertext_dependence();
        if dependence > 1e-9 {
            return Err(SearchError::NotIndependent { dependence });
        }
    }
    Ok(())
}

fn t_alphabets(caps: CardinalityCaps) -> Result<(FiniteAlphabet, FiniteAlphabet), SearchError> {
    Ok((
        FiniteAlphabet::indexed("t1", caps.t1_size)?,
        FiniteAlphabet::indexed("t2", caps.t2_size)?,
    ))
}

/// Per-candidate RNG: an independent ChaCha stream per index, so candidate
/// `k` is identical for every budget that reaches it.
fn candidate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn sample_encoder_candidate(
    problem: &EmbeddingProblem,
    t1: &FiniteAlphabet,
    t2: &FiniteAlphabet,
    seed: u64,
    index: u64,
) -> EncoderPolicy {
    let mut rng = candidate_rng(seed, index);
    let p1 = sample_policy(
        vec![problem.u1().clone()],
        vec![t1.clone(), problem.x1().clone()],
        &mut rng,
    );
    let p2 = sample_policy(
        vec![problem.u2().clone()],
        vec![t2.clone(), problem.x2().clone()],
        &mut rng,
    );
    EncoderPolicy::new(p1, p2).expect("sampled policy has valid shape")
}

fn sample_joint_candidate(
    problem: &EmbeddingProblem,
    t1: &FiniteAlphabet,
    t2: &FiniteAlphabet,
    seed: u64,
    index: u64,
) -> JointPolicy {
    let mut rng = candidate_rng(seed, index);
    let p = sample_policy(
        vec![problem.u1().clone(), problem.u2().clone()],
        vec![
            t1.clone(),
            t2.clone(),
            problem.x1().clone(),
            problem.x2().clone(),
        ],
        &mut rng,
    );
    JointPolicy::new(p).expect("sampled policy has valid shape")
}

/// Exhaustive product grid over the four factor tables
/// `P(T1|U1), P(X1|U1,T1), P(T2|U2), P(X2|U2,T2)`; the factored form keeps
/// the grids small and their products dense in the joint policy set.
struct FactoredGrid {
    problem: EmbeddingProblem,
    t1: FiniteAlphabet,
    t2: FiniteAlphabet,
    specs: [(usize, usize); 4],
    step: f64,
    iters: Vec<GridTables>,
    current: Vec<Vec<f64>>,
    exhausted: bool,
    fresh: bool,
}

impl FactoredGrid {
    fn new(
        problem: &EmbeddingProblem,
        t1: &FiniteAlphabet,
        t2: &FiniteAlphabet,
        step: f64,
    ) -> Result<Self, SearchError> {
        let (nu1, nu2) = (problem.u1().len(), problem.u2().len());
        let (nt1, nt2) = (t1.len(), t2.len());
        let (nx1, nx2) = (problem.x1().len(), problem.x2().len());
        let specs = [
            (nu1, nt1),
            (nu1 * nt1, nx1),
            (nu2, nt2),
            (nu2 * nt2, nx2),
        ];
        let mut iters = Vec::with_capacity(4);
        let mut current = Vec::with_capacity(4);
        for &(rows, cols) in &specs {
            let mut it = GridTables::new(rows, cols, step)?;
            current.push(it.next().expect("grid yields at least one table"));
            iters.push(it);
        }
        Ok(Self {
            problem: problem.clone(),
            t1: t1.clone(),
            t2: t2.clone(),
            specs,
            step,
            iters,
            current,
            exhausted: false,
            fresh: true,
        })
    }

    fn predicted_count(
        problem: &EmbeddingProblem,
        caps: CardinalityCaps,
        step: f64,
    ) -> Result<u128, SearchError> {
        let (nu1, nu2) = (problem.u1().len(), problem.u2().len());
        let specs = [
            (nu1, caps.t1_size),
            (nu1 * caps.t1_size, problem.x1().len()),
            (nu2, caps.t2_size),
            (nu2 * caps.t2_size, problem.x2().len()),
        ];
        let mut total: u128 = 1;
        for (rows, cols) in specs {
            let per_row = grid::rows_per_grid(cols, step)?;
            for _ in 0..rows {
                total = total.saturating_mul(per_row);
            }
        }
        Ok(total)
    }

    fn policy(&self) -> EncoderPolicy {
        let p1 = factored_conditional(
            self.problem.u1(),
            &self.t1,
            self.problem.x1(),
            &self.current[0],
            &self.current[1],
        );
        let p2 = factored_conditional(
            self.problem.u2(),
            &self.t2,
            self.problem.x2(),
            &self.current[2],
            &self.current[3],
        );
        EncoderPolicy::new(p1, p2).expect("factored policy has valid shape")
    }

    fn advance(&mut self) -> bool {
        for lvl in (0..4).rev() {
            if let Some(t) = self.iters[lvl].next() {
                self.current[lvl] = t;
                return true;
            }
            let (rows, cols) = self.specs[lvl];
            let mut it = GridTables::new(rows, cols, self.step).expect("spec already validated");
            self.current[lvl] = it.next().expect("grid yields at least one table");
            self.iters[lvl] = it;
        }
        false
    }
}

impl Iterator for FactoredGrid {
    type Item = EncoderPolicy;

    fn next(&mut self) -> Option<EncoderPolicy> {
        if self.exhausted {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            return Some(self.policy());
        }
        if !self.advance() {
            self.exhausted = true;
            return None;
        }
        Some(self.policy())
    }
}

/// Build `P(T,X|U)` from grid factors `P(T|U)` and `P(X|U,T)`.
fn factored_conditional(
    u: &FiniteAlphabet,
    t: &FiniteAlphabet,
    x: &FiniteAlphabet,
    t_given_u: &[f64],
    x_given_ut: &[f64],
) -> crate::prob::ConditionalPMF {
    let (nu, nt, nx) = (u.len(), t.len(), x.len());
    let mut rows = vec![0.0; nu * nt * nx];
    for uu in 0..nu {
        for tt in 0..nt {
            for xx in 0..nx {
                rows[uu * nt * nx + tt * nx + xx] =
                    t_given_u[uu * nt + tt] * x_given_ut[(uu * nt + tt) * nx + xx];
            }
        }
    }
    crate::prob::ConditionalPMF::from_rows(vec![u.clone()], vec![t.clone(), x.clone()], rows)
        .expect("factored rows are stochastic")
}

/// Inner region over a caller-supplied candidate list; the building block the
/// strategy-driven searches and the nesting tests share.
pub fn inner_region_from_candidates<I>(
    problem: &EmbeddingProblem,
    candidates: I,
    formula: Formula,
) -> Result<RegionReport, SearchError>
where
    I: IntoIterator<Item = EncoderPolicy>,
{
    let start = Instant::now();
    check_formula(problem, formula)?;
    let sweep = sweep(candidates.into_iter(), DEFAULT_BATCH, |p: &EncoderPolicy| {
        evaluate_encoder(problem, p, formula)
    })?;
    finish(sweep, start, CandidatePolicy::Encoder)
}

/// Outer-subset region over a caller-supplied candidate list.
pub fn outer_region_from_candidates<I>(
    problem: &EmbeddingProblem,
    candidates: I,
    formula: Formula,
) -> Result<RegionReport, SearchError>
where
    I: IntoIterator<Item = JointPolicy>,
{
    let start = Instant::now();
    check_formula(problem, formula)?;
    let sweep = sweep(candidates.into_iter(), DEFAULT_BATCH, |p: &JointPolicy| {
        evaluate_joint(problem, p, formula)
    })?;
    finish(sweep, start, CandidatePolicy::Joint)
}

/// Inner-bound region search over factored policies.
pub fn compute_inner_region(
    problem: &EmbeddingProblem,
    caps: CardinalityCaps,
    strategy: &SearchStrategy,
    formula: Formula,
) -> Result<RegionReport, SearchError> {
    let start = Instant::now();
    check_formula(problem, formula)?;
    let (t1, t2) = t_alphabets(caps)?;
    let eval = |p: &EncoderPolicy| evaluate_encoder(problem, p, formula);

    let mut outcome = match strategy.mode {
        SearchMode::ExhaustiveGrid => {
            let predicted = FactoredGrid::predicted_count(problem, caps, strategy.grid_step)?;
            if predicted > strategy.exhaustive_cap {
                return Err(SearchError::ExhaustiveTooLarge {
                    predicted,
                    cap: strategy.exhaustive_cap,
                });
            }
            let iter = FactoredGrid::new(problem, &t1, &t2, strategy.grid_step)?;
            sweep(iter, strategy.batch_size, eval)?
        }
        SearchMode::RandomSample | SearchMode::SampleThenRefine => {
            if strategy.sample_budget == 0 {
                return Err(SearchError::BudgetZero);
            }
            let iter = (0..strategy.sample_budget)
                .map(|k| sample_encoder_candidate(problem, &t1, &t2, strategy.seed, k));
            sweep(iter, strategy.batch_size, eval)?
        }
    };

    if strategy.mode == SearchMode::SampleThenRefine && !outcome.pareto.is_empty() {
        for (d, dir) in directions(strategy.refine_directions).into_iter().enumerate() {
            let best = outcome
                .pareto
                .iter()
                .max_by(|x, y| x.2.dot(dir).partial_cmp(&y.2.dot(dir)).expect("finite"))
                .expect("pareto set is non-empty")
                .1
                .clone();
            let refined = refine(&best, problem, dir, strategy.refine_steps, formula)?;
            let index = strategy.sample_budget + d as u64;
            outcome.evaluated += 1;
            if let Some(triple) = eval(&refined)? {
                outcome.feasible += 1;
                pareto_insert(&mut outcome.pareto, index, refined, triple);
            }
        }
    }

    finish(outcome, start, CandidatePolicy::Encoder)
}

/// Search over joint policies. The result is an inner approximation of the
/// outer bound: a SUBSET of it, labeled as such by the callers that report it.
pub fn compute_outer_subset(
    problem: &EmbeddingProblem,
    caps: CardinalityCaps,
    strategy: &SearchStrategy,
    formula: Formula,
) -> Result<RegionReport, SearchError> {
    compute_outer_subset_seeded(problem, caps, strategy, formula, &[])
}

/// Like [`compute_outer_subset`], with caller-provided policies (for example
/// lifted inner candidates) evaluated ahead of the strategy's own stream.
pub fn compute_outer_subset_seeded(
    problem: &EmbeddingProblem,
    caps: CardinalityCaps,
    strategy: &SearchStrategy,
    formula: Formula,
    seeds: &[JointPolicy],
) -> Result<RegionReport, SearchError> {
    let start = Instant::now();
    check_formula(problem, formula)?;
    let (t1, t2) = t_alphabets(caps)?;
    let eval = |p: &JointPolicy| evaluate_joint(problem, p, formula);
    let seeded = seeds.iter().cloned();

    let outcome = match strategy.mode {
        SearchMode::ExhaustiveGrid => {
            let rows = problem.u1().len() * problem.u2().len();
            let cols = caps.t1_size * caps.t2_size * problem.x1().len() * problem.x2().len();
            let tables = GridTables::new(rows, cols, strategy.grid_step)?;
            let predicted = tables.predicted_count();
            if predicted > strategy.exhaustive_cap {
                return Err(SearchError::ExhaustiveTooLarge {
                    predicted,
                    cap: strategy.exhaustive_cap,
                });
            }
            let iter = seeded.chain(tables.map(|t| joint_from_table(problem, &t1, &t2, t)));
            sweep(iter, strategy.batch_size, eval)?
        }
        SearchMode::RandomSample | SearchMode::SampleThenRefine => {
            if strategy.sample_budget == 0 {
                return Err(SearchError::BudgetZero);
            }
            let iter = seeded.chain(
                (0..strategy.sample_budget)
                    .map(|k| sample_joint_candidate(problem, &t1, &t2, strategy.seed, k)),
            );
            let mut outcome = sweep(iter, strategy.batch_size, eval)?;
            if strategy.mode == SearchMode::SampleThenRefine && !outcome.pareto.is_empty() {
                for dir in directions(strategy.refine_directions) {
                    let best = outcome
                        .pareto
                        .iter()
                        .max_by(|x, y| {
                            x.2.dot(dir).partial_cmp(&y.2.dot(dir)).expect("finite")
                        })
                        .expect("pareto set is non-empty")
                        .1
                        .clone();
                    let refined =
                        refine_joint(&best, problem, dir, strategy.refine_steps, formula)?;
                    let index = outcome.evaluated;
                    outcome.evaluated += 1;
                    if let Some(triple) = eval(&refined)? {
                        outcome.feasible += 1;
                        pareto_insert(&mut outcome.pareto, index, refined, triple);
                    }
                }
            }
            outcome
        }
    };

    finish(outcome, start, CandidatePolicy::Joint)
}

fn joint_from_table(
    problem: &EmbeddingProblem,
    t1: &FiniteAlphabet,
    t2: &FiniteAlphabet,
    table: Vec<f64>,
) -> JointPolicy {
    let p = crate::prob::ConditionalPMF::from_rows(
        vec![problem.u1().clone(), problem.u2().clone()],
        vec![
            t1.clone(),
            t2.clone(),
            problem.x1().clone(),
            problem.x2().clone(),
        ],
        table,
    )
    .expect("grid rows are stochastic");
    JointPolicy::new(p).expect("grid policy has valid shape")
}

/// Predicted candidate count of the exhaustive factored grid, for callers
/// that want to pick a strategy before running.
pub fn exhaustive_inner_count(
    problem: &EmbeddingProblem,
    caps: CardinalityCaps,
    step: f64,
) -> Result<u128, SearchError> {
    FactoredGrid::predicted_count(problem, caps, step)
}

/// The deterministic stream of factored grid policies itself, for callers
/// assembling explicit candidate lists (nesting studies, embeddings).
pub fn factored_grid_policies(
    problem: &EmbeddingProblem,
    caps: CardinalityCaps,
    step: f64,
) -> Result<impl Iterator<Item = EncoderPolicy>, SearchError> {
    let (t1, t2) = t_alphabets(caps)?;
    FactoredGrid::new(problem, &t1, &t2, step)
}

/// Deterministic spread of `count` support-function directions over the
/// nonnegative weight simplex, endpoints included.
pub fn directions(count: usize) -> Vec<[f64; 3]> {
    assert!(count >= 1, "direction count must be positive");
    if count == 1 {
        return vec![[1.0, 1.0, 1.0]];
    }
    let mut m = 1usize;
    while (m + 2) * (m + 1) / 2 < count {
        m += 1;
    }
    let all = grid::compositions(m, 3);
    let total = all.len();
    (0..count)
        .map(|i| {
            let idx = i * (total - 1) / (count - 1);
            let c = &all[idx];
            [
                c[0] as f64 / m as f64,
                c[1] as f64 / m as f64,
                c[2] as f64 / m as f64,
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{ConditionalPMF, DistortionTable, EmbeddingProblem, JointPMF};
    use crate::presets;

    fn degenerate_channel_problem() -> EmbeddingProblem {
        // Y is constant regardless of the inputs
        let x1 = FiniteAlphabet::binary("x1");
        let x2 = FiniteAlphabet::binary("x2");
        let y = FiniteAlphabet::binary("y");
        let rows = vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let w = ConditionalPMF::from_rows(vec![x1, x2], vec![y], rows).unwrap();
        EmbeddingProblem::new(
            presets::independent_binary_covertext(0.05, 0.10),
            w,
            DistortionTable::hamming(2).unwrap(),
            DistortionTable::hamming(2).unwrap(),
            1.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn caps_match_support_lemma_defaults() {
        let problem = presets::binary_example();
        let general = CardinalityCaps::inner_general(&problem);
        assert_eq!((general.t1_size, general.t2_size), (9, 9));
        let indep = CardinalityCaps::inner_independent(&problem);
        assert_eq!((indep.t1_size, indep.t2_size), (5, 5));
    }

    #[test]
    fn sampled_search_is_deterministic() {
        let problem = presets::binary_example();
        let strategy = SearchStrategy::random(500, 99);
        let caps = CardinalityCaps::symmetric(2);
        let a = compute_inner_region(&problem, caps, &strategy, Formula::Independent).unwrap();
        let b = compute_inner_region(&problem, caps, &strategy, Formula::Independent).unwrap();
        assert_eq!(a.region, b.region);
        assert_eq!(a.candidates_evaluated, 500);
        assert_eq!(a.feasible_count, b.feasible_count);
    }

    #[test]
    fn degenerate_channel_gives_origin() {
        let problem = degenerate_channel_problem();
        let strategy = SearchStrategy::random(300, 5);
        let report = compute_inner_region(
            &problem,
            CardinalityCaps::symmetric(2),
            &strategy,
            Formula::Independent,
        )
        .unwrap();
        assert_eq!(report.region.vertices(), &[(0.0, 0.0)]);
        let outer = compute_outer_subset(
            &problem,
            CardinalityCaps::symmetric(2),
            &strategy,
            Formula::Independent,
        )
        .unwrap();
        assert_eq!(outer.region.vertices(), &[(0.0, 0.0)]);
    }

    #[test]
    fn zero_distortion_region_is_origin_golden() {
        // With Hamming distortion at level zero the stegotext must equal the
        // covertext, so the auxiliary chain T1 - U1 - (T2, Y) caps
        // I(T1;T2,Y) at I(T1;U1) and every bound is nonpositive. The
        // exhaustive half-step run at |T|=2 is the oracle; its value is
        // frozen here.
        let problem = presets::binary_example_with_levels(0.0, 0.0);
        let report = compute_inner_region(
            &problem,
            CardinalityCaps::symmetric(2),
            &SearchStrategy::exhaustive(0.5),
            Formula::General,
        )
        .unwrap();
        assert_eq!(report.region.vertices(), &[(0.0, 0.0)]);
        assert_eq!(report.candidates_evaluated, 531_441);
        assert!(report.feasible_count > 0);
    }

    #[test]
    fn independent_formula_rejects_correlated_covertexts() {
        let u1 = FiniteAlphabet::binary("u1");
        let u2 = FiniteAlphabet::binary("u2");
        let q = JointPMF::new(vec![u1, u2], vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let problem = EmbeddingProblem::new(
            q,
            presets::binary_additive_attack(0.02),
            DistortionTable::hamming(2).unwrap(),
            DistortionTable::hamming(2).unwrap(),
            0.5,
            0.5,
        )
        .unwrap();
        let err = compute_inner_region(
            &problem,
            CardinalityCaps::symmetric(2),
            &SearchStrategy::random(10, 0),
            Formula::Independent,
        )
        .unwrap_err();
        assert!(matches!(err, SearchError::NotIndependent { .. }));
    }

    #[test]
    fn strategy_validation_errors() {
        let problem = presets::binary_example();
        let caps = CardinalityCaps::symmetric(2);
        let err = compute_inner_region(
            &problem,
            caps,
            &SearchStrategy::random(0, 1),
            Formula::General,
        )
        .unwrap_err();
        assert_eq!(err, SearchError::BudgetZero);

        let err = compute_inner_region(
            &problem,
            caps,
            &SearchStrategy::exhaustive(0.3),
            Formula::General,
        )
        .unwrap_err();
        assert!(matches!(err, SearchError::StepNotDivisor(_)));

        let mut tight = SearchStrategy::exhaustive(0.5);
        tight.exhaustive_cap = 10;
        let err = compute_inner_region(&problem, caps, &tight, Formula::General).unwrap_err();
        assert!(matches!(err, SearchError::ExhaustiveTooLarge { .. }));
    }

    #[test]
    fn sampled_budgets_nest_with_shared_seed() {
        let problem = presets::binary_example();
        let caps = CardinalityCaps::symmetric(2);
        let small = compute_outer_subset(
            &problem,
            caps,
            &SearchStrategy::random(400, 7),
            Formula::Independent,
        )
        .unwrap();
        let large = compute_outer_subset(
            &problem,
            caps,
            &SearchStrategy::random(1200, 7),
            Formula::Independent,
        )
        .unwrap();
        assert!(large.region.contains_region(&small.region, 1e-9));
    }

    #[test]
    fn pareto_set_has_no_dominated_triple() {
        let problem = presets::binary_example();
        let report = compute_inner_region(
            &problem,
            CardinalityCaps::symmetric(3),
            &SearchStrategy::random(2000, 3),
            Formula::Independent,
        )
        .unwrap();
        let p = &report.pareto;
        assert!(!p.is_empty());
        for i in 0..p.len() {
            for j in 0..p.len() {
                if i != j {
                    assert!(!p[i].triple.dominated_by(&p[j].triple));
                }
            }
        }
    }

    #[test]
    fn sum_rate_respects_channel_ceiling() {
        let problem = presets::binary_example();
        let report = compute_inner_region(
            &problem,
            CardinalityCaps::symmetric(2),
            &SearchStrategy::random(2000, 13),
            Formula::Independent,
        )
        .unwrap();
        let ceiling = crate::oracles::max_channel_information(&problem, 40);
        assert!(report.region.max_sum_rate() <= ceiling + 1e-9);
        assert!((ceiling - 0.858_559).abs() < 1e-4);
    }

    #[test]
    fn lifted_inner_candidates_keep_outer_subset_containing_inner() {
        let problem = presets::binary_example();
        let caps = CardinalityCaps::symmetric(2);
        let inner = compute_inner_region(
            &problem,
            caps,
            &SearchStrategy::random(1500, 21),
            Formula::Independent,
        )
        .unwrap();
        let seeds: Vec<JointPolicy> = inner
            .pareto
            .iter()
            .filter_map(|e| e.policy.as_encoder().map(JointPolicy::from_encoder))
            .collect();
        let outer = compute_outer_subset_seeded(
            &problem,
            caps,
            &SearchStrategy::random(500, 22),
            Formula::Independent,
            &seeds,
        )
        .unwrap();
        assert!(outer.region.contains_region(&inner.region, 1e-9));
    }

    #[test]
    fn refine_contracts() {
        let problem = presets::binary_example();
        let (t1, t2) = t_alphabets(CardinalityCaps::symmetric(2)).unwrap();
        // find a feasible start among sampled candidates
        let start = (0..200)
            .map(|k| sample_encoder_candidate(&problem, &t1, &t2, 31, k))
            .find(|p| evaluate_encoder(&problem, p, Formula::Independent)
                .unwrap()
                .is_some())
            .expect("some sampled policy is feasible");
        let dir = [0.2, 0.3, 0.5];
        let same = refine(&start, &problem, dir, 0, Formula::Independent).unwrap();
        assert_eq!(same, start);

        let before = evaluate_encoder(&problem, &start, Formula::Independent)
            .unwrap()
            .unwrap()
            .dot(dir);
        let refined = refine(&start, &problem, dir, 8, Formula::Independent).unwrap();
        let after_eval = evaluate_encoder(&problem, &refined, Formula::Independent).unwrap();
        let after = after_eval.expect("refined policy stays feasible").dot(dir);
        assert!(after >= before - 1e-12);

        // infeasible start: distortion levels no policy can meet after the
        // positivity filter, e.g. zero levels with a copy-breaking policy
        let tight = presets::binary_example_with_levels(0.0, 0.0);
        let bad = sample_encoder_candidate(&tight, &t1, &t2, 33, 0);
        let err = refine(&bad, &tight, dir, 3, Formula::Independent).unwrap_err();
        assert_eq!(err, SearchError::InfeasibleStart);

        let err = refine(&start, &problem, [0.0, 0.0, 0.0], 1, Formula::Independent).unwrap_err();
        assert_eq!(err, SearchError::BadDirection);
    }

    #[test]
    fn direction_spread_covers_corners() {
        let dirs = directions(64);
        assert_eq!(dirs.len(), 64);
        for d in &dirs {
            assert!(d.iter().all(|&w| w >= 0.0));
            assert!(d.iter().sum::<f64>() > 0.0);
        }
        assert_eq!(dirs[0], [0.0, 0.0, 1.0]);
        assert_eq!(dirs[63], [1.0, 0.0, 0.0]);
        assert_eq!(directions(1), vec![[1.0, 1.0, 1.0]]);
    }

    #[test]
    fn embedded_candidate_lists_nest_regions() {
        let problem = presets::binary_example();
        let (t1, t2) = t_alphabets(CardinalityCaps::symmetric(2)).unwrap();
        let base: Vec<EncoderPolicy> = (0..300)
            .map(|k| sample_encoder_candidate(&problem, &t1, &t2, 41, k))
            .collect();
        let small = inner_region_from_candidates(&problem, base.clone(), Formula::Independent)
            .unwrap();
        let extra: Vec<EncoderPolicy> = (300..600)
            .map(|k| sample_encoder_candidate(&problem, &t1, &t2, 41, k))
            .collect();
        let large = inner_region_from_candidates(
            &problem,
            base.into_iter().chain(extra),
            Formula::Independent,
        )
        .unwrap();
        assert!(large.region.contains_region(&small.region, 1e-9));
    }

    #[test]
    fn distortion_monotonicity_over_fixed_candidates() {
        let tight = presets::binary_example_with_levels(0.3, 0.3);
        let loose = presets::binary_example_with_levels(0.6, 0.6);
        let (t1, t2) = t_alphabets(CardinalityCaps::symmetric(2)).unwrap();
        let candidates: Vec<EncoderPolicy> = (0..800)
            .map(|k| sample_encoder_candidate(&tight, &t1, &t2, 51, k))
            .collect();
        let r_tight =
            inner_region_from_candidates(&tight, candidates.clone(), Formula::Independent)
                .unwrap();
        let r_loose =
            inner_region_from_candidates(&loose, candidates, Formula::Independent).unwrap();
        assert!(r_tight.feasible_count <= r_loose.feasible_count);
        assert!(r_loose.region.contains_region(&r_tight.region, 1e-9));
    }
}

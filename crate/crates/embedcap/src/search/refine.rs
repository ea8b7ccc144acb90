use super::{evaluate_encoder, evaluate_joint, Formula, SearchError};
use crate::prob::{ConditionalPMF, EmbeddingProblem};
use crate::region::{EncoderPolicy, JointPolicy};

const INITIAL_DELTA: f64 = 0.25;
const MIN_DELTA: f64 = 1e-7;
const IMPROVEMENT: f64 = 1e-12;

/// Coordinate ascent on `w . (a, b, c)` over a factored policy: one sweep per
/// step tries every mass transfer of `delta` between two cells of one
/// conditional row, keeping only feasible strict improvements; `delta` halves
/// after a sweep with no accepted move. The result is never infeasible and
/// the objective never decreases.
pub fn refine(
    policy: &EncoderPolicy,
    problem: &EmbeddingProblem,
    direction: [f64; 3],
    steps: usize,
    formula: Formula,
) -> Result<EncoderPolicy, SearchError> {
    check_direction(direction)?;
    let Some(triple) = evaluate_encoder(problem, policy, formula)? else {
        return Err(SearchError::InfeasibleStart);
    };
    if steps == 0 {
        return Ok(policy.clone());
    }
    let mut cur = policy.clone();
    let mut obj = triple.dot(direction);
    let mut delta = INITIAL_DELTA;
    for _ in 0..steps {
        let mut improved = false;
        for user in [1usize, 2] {
            let cond = cur.user(user);
            let (rows, cols) = (cond.given_len(), cond.target_len());
            for r in 0..rows {
                for i in 0..cols {
                    for j in 0..cols {
                        if i == j {
                            continue;
                        }
                        let Some(next) = transfer_encoder(&cur, user, r, i, j, delta) else {
                            continue;
                        };
                        if let Some(t) = evaluate_encoder(problem, &next, formula)? {
                            let o = t.dot(direction);
                            if o > obj + IMPROVEMENT {
                                cur = next;
                                obj = o;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        if !improved {
            delta *= 0.5;
            if delta < MIN_DELTA {
                break;
            }
        }
    }
    Ok(cur)
}

/// Coordinate ascent over a joint policy's single conditional; same contract
/// as [`refine`].
pub fn refine_joint(
    policy: &JointPolicy,
    problem: &EmbeddingProblem,
    direction: [f64; 3],
    steps: usize,
    formula: Formula,
) -> Result<JointPolicy, SearchError> {
    check_direction(direction)?;
    let Some(triple) = evaluate_joint(problem, policy, formula)? else {
        return Err(SearchError::InfeasibleStart);
    };
    if steps == 0 {
        return Ok(policy.clone());
    }
    let mut cur = policy.clone();
    let mut obj = triple.dot(direction);
    let mut delta = INITIAL_DELTA;
    for _ in 0..steps {
        let mut improved = false;
        let cond = cur.conditional();
        let (rows, cols) = (cond.given_len(), cond.target_len());
        for r in 0..rows {
            for i in 0..cols {
                for j in 0..cols {
                    if i == j {
                        continue;
                    }
                    let Some(next) = transfer_joint(&cur, r, i, j, delta) else {
                        continue;
                    };
                    if let Some(t) = evaluate_joint(problem, &next, formula)? {
                        let o = t.dot(direction);
                        if o > obj + IMPROVEMENT {
                            cur = next;
                            obj = o;
                            improved = true;
                        }
                    }
                }
            }
        }
        if !improved {
            delta *= 0.5;
            if delta < MIN_DELTA {
                break;
            }
        }
    }
    Ok(cur)
}

fn check_direction(direction: [f64; 3]) -> Result<(), SearchError> {
    let ok = direction.iter().all(|w| w.is_finite() && *w >= 0.0)
        && direction.iter().sum::<f64>() > 0.0;
    if ok {
        Ok(())
    } else {
        Err(SearchError::BadDirection)
    }
}

/// Move `delta` of mass (clamped to what cell `i` holds) from cell `i` to
/// cell `j` of row `r`; `None` when there is nothing to move.
fn transfer_rows(cond: &ConditionalPMF, r: usize, i: usize, j: usize, delta: f64) -> Option<Vec<f64>> {
    let cols = cond.target_len();
    let mut rows = Vec::with_capacity(cond.given_len() * cols);
    for g in 0..cond.given_len() {
        rows.extend_from_slice(cond.row(g)?);
    }
    let amount = delta.min(rows[r * cols + i]);
    if amount <= 1e-15 {
        return None;
    }
    rows[r * cols + i] -= amount;
    rows[r * cols + j] += amount;
    Some(rows)
}

fn transfer_encoder(
    policy: &EncoderPolicy,
    user: usize,
    r: usize,
    i: usize,
    j: usize,
    delta: f64,
) -> Option<EncoderPolicy> {
    let cond = policy.user(user);
    let rows = transfer_rows(cond, r, i, j, delta)?;
    let rebuilt = ConditionalPMF::from_rows(
        cond.given_axes().to_vec(),
        cond.target_axes().to_vec(),
        rows,
    )
    .ok()?;
    let (p1, p2) = if user == 1 {
        (rebuilt, policy.user(2).clone())
    } else {
        (policy.user(1).clone(), rebuilt)
    };
    EncoderPolicy::new(p1, p2).ok()
}

fn transfer_joint(policy: &JointPolicy, r: usize, i: usize, j: usize, delta: f64) -> Option<JointPolicy> {
    let cond = policy.conditional();
    let rows = transfer_rows(cond, r, i, j, delta)?;
    let rebuilt = ConditionalPMF::from_rows(
        cond.given_axes().to_vec(),
        cond.target_axes().to_vec(),
        rows,
    )
    .ok()?;
    JointPolicy::new(rebuilt).ok()
}

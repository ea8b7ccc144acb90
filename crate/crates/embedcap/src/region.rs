//! Rate-triple evaluation, feasibility tests, pentagon construction, and
//! convex-polygon algebra in the `(R1, R2)` plane.

use crate::axes;
use crate::prob::{ConditionalPMF, EmbeddingProblem, FiniteAlphabet, JointPMF, ProbError};
use thiserror::Error;

/// Cross-product tolerance for dropping collinear hull vertices.
pub const COLLINEAR_TOL: f64 = 1e-12;

/// Strictness floor for the `I(Ui;Ti) > 0` condition in inner-mode
/// feasibility.
pub const POSITIVITY_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error(transparent)]
    Prob(#[from] ProbError),
    #[error("expected the canonical 7-axis joint, got {0} axes")]
    NotSystemJoint(usize),
    #[error("policy row for given-index {0} is undefined but carries source mass")]
    UndefinedPolicyRow(usize),
    #[error("{0} alphabets do not match the problem")]
    InconsistentAlphabets(&'static str),
    #[error("vertex ({0}, {1}) lies outside the nonnegative quadrant")]
    NegativeVertex(f64, f64),
    #[error("empty input")]
    EmptyInput,
}

/// The factored encoder choice `P(T1,X1|U1) * P(T2,X2|U2)`: one conditional
/// per user, each with given axis `Ui` and target axes `(Ti, Xi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderPolicy {
    p1: ConditionalPMF,
    p2: ConditionalPMF,
}

impl EncoderPolicy {
    pub fn new(p1: ConditionalPMF, p2: ConditionalPMF) -> Result<Self, RegionError> {
        for (name, p) in [("user-1 policy", &p1), ("user-2 policy", &p2)] {
            if p.given_axes().len() != 1 || p.target_axes().len() != 2 {
                return Err(RegionError::InconsistentAlphabets(name));
            }
        }
        Ok(Self { p1, p2 })
    }

    pub fn user(&self, user: usize) -> &ConditionalPMF {
        match user {
            1 => &self.p1,
            2 => &self.p2,
            _ => panic!("user must be 1 or 2"),
        }
    }

    pub fn t1(&self) -> &FiniteAlphabet {
        &self.p1.target_axes()[0]
    }

    pub fn t2(&self) -> &FiniteAlphabet {
        &self.p2.target_axes()[0]
    }
}

/// The joint choice `P(T1,T2,X1,X2|U1,U2)` over both users at once.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPolicy {
    p: ConditionalPMF,
}

impl JointPolicy {
    pub fn new(p: ConditionalPMF) -> Result<Self, RegionError> {
        if p.given_axes().len() != 2 || p.target_axes().len() != 4 {
            return Err(RegionError::InconsistentAlphabets("joint policy"));
        }
        Ok(Self { p })
    }

    /// Lift a factored policy into the joint form (product of its factors).
    pub fn from_encoder(policy: &EncoderPolicy) -> Self {
        let p1 = &policy.p1;
        let p2 = &policy.p2;
        let (nu1, nu2) = (p1.given_len(), p2.given_len());
        let (nt1, nx1) = (p1.target_axes()[0].len(), p1.target_axes()[1].len());
        let (nt2, nx2) = (p2.target_axes()[0].len(), p2.target_axes()[1].len());
        let cols = nt1 * nt2 * nx1 * nx2;
        let mut rows = vec![0.0; nu1 * nu2 * cols];
        let mut defined = vec![false; nu1 * nu2];
        for u1 in 0..nu1 {
            for u2 in 0..nu2 {
                let (Some(r1), Some(r2)) = (p1.row(u1), p2.row(u2)) else {
                    continue;
                };
                let g = u1 * nu2 + u2;
                defined[g] = true;
                for t1 in 0..nt1 {
                    for t2 in 0..nt2 {
                        for x1 in 0..nx1 {
                            for x2 in 0..nx2 {
                                let col = ((t1 * nt2 + t2) * nx1 + x1) * nx2 + x2;
                                rows[g * cols + col] = r1[t1 * nx1 + x1] * r2[t2 * nx2 + x2];
                            }
                        }
                    }
                }
            }
        }
        let given = vec![p1.given_axes()[0].clone(), p2.given_axes()[0].clone()];
        let target = vec![
            p1.target_axes()[0].clone(),
            p2.target_axes()[0].clone(),
            p1.target_axes()[1].clone(),
            p2.target_axes()[1].clone(),
        ];
        Self {
            p: ConditionalPMF::from_validated(given, target, rows, defined),
        }
    }

    pub fn conditional(&self) -> &ConditionalPMF {
        &self.p
    }

    pub fn t1(&self) -> &FiniteAlphabet {
        &self.p.target_axes()[0]
    }

    pub fn t2(&self) -> &FiniteAlphabet {
        &self.p.target_axes()[1]
    }
}

fn check_user_alphabets(
    problem: &EmbeddingProblem,
    given_u: &FiniteAlphabet,
    target_x: &FiniteAlphabet,
    user: usize,
) -> Result<(), RegionError> {
    let (u, x) = match user {
        1 => (problem.u1(), problem.x1()),
        _ => (problem.u2(), problem.x2()),
    };
    if !given_u.same_symbols(u) || !target_x.same_symbols(x) {
        return Err(RegionError::InconsistentAlphabets("policy"));
    }
    Ok(())
}

/// Compose the full seven-axis joint
/// `Q(u1,u2) P(t1,x1|u1) P(t2,x2|u2) W(y|x1,x2)` in canonical axis order.
pub fn compose_inner(
    problem: &EmbeddingProblem,
    policy: &EncoderPolicy,
) -> Result<JointPMF, RegionError> {
    check_user_alphabets(problem, &policy.p1.given_axes()[0], &policy.p1.target_axes()[1], 1)?;
    check_user_alphabets(problem, &policy.p2.given_axes()[0], &policy.p2.target_axes()[1], 2)?;

    let q = problem.covertext();
    let w = problem.attack();
    let (nu1, nu2) = (problem.u1().len(), problem.u2().len());
    let (nt1, nt2) = (policy.t1().len(), policy.t2().len());
    let (nx1, nx2, ny) = (problem.x1().len(), problem.x2().len(), problem.y().len());

    let axes_list = vec![
        problem.u1().clone(),
        policy.t1().clone(),
        problem.u2().clone(),
        policy.t2().clone(),
        problem.x1().clone(),
        problem.x2().clone(),
        problem.y().clone(),
    ];
    let mut weights = vec![0.0; nu1 * nt1 * nu2 * nt2 * nx1 * nx2 * ny];
    for u1 in 0..nu1 {
        let r1 = match policy.p1.row(u1) {
            Some(r) => r,
            None => {
                ensure_zero_source_mass(q, 0, u1)?;
                continue;
            }
        };
        for u2 in 0..nu2 {
            let qv = q.weights()[u1 * nu2 + u2];
            if qv == 0.0 {
                continue;
            }
            let r2 = match policy.p2.row(u2) {
                Some(r) => r,
                None => return Err(RegionError::UndefinedPolicyRow(u2)),
            };
            for t1 in 0..nt1 {
                for x1 in 0..nx1 {
                    let f1 = qv * r1[t1 * nx1 + x1];
                    if f1 == 0.0 {
                        continue;
                    }
                    for t2 in 0..nt2 {
                        for x2 in 0..nx2 {
                            let f2 = f1 * r2[t2 * nx2 + x2];
                            if f2 == 0.0 {
                                continue;
                            }
                            let wrow = w.row(x1 * nx2 + x2).expect("channel rows are defined");
                            let base =
                                (((((u1 * nt1 + t1) * nu2 + u2) * nt2 + t2) * nx1 + x1) * nx2
                                    + x2)
                                    * ny;
                            for (y, &wy) in wrow.iter().enumerate() {
                                weights[base + y] = f2 * wy;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(JointPMF::new(axes_list, weights)?)
}

/// Compose `Q(u1,u2) P(t1,t2,x1,x2|u1,u2) W(y|x1,x2)` in canonical axis order.
pub fn compose_outer(
    problem: &EmbeddingProblem,
    policy: &JointPolicy,
) -> Result<JointPMF, RegionError> {
    let p = &policy.p;
    check_user_alphabets(problem, &p.given_axes()[0], &p.target_axes()[2], 1)?;
    check_user_alphabets(problem, &p.given_axes()[1], &p.target_axes()[3], 2)?;

    let q = problem.covertext();
    let w = problem.attack();
    let (nu1, nu2) = (problem.u1().len(), problem.u2().len());
    let (nt1, nt2) = (policy.t1().len(), policy.t2().len());
    let (nx1, nx2, ny) = (problem.x1().len(), problem.x2().len(), problem.y().len());

    let axes_list = vec![
        problem.u1().clone(),
        policy.t1().clone(),
        problem.u2().clone(),
        policy.t2().clone(),
        problem.x1().clone(),
        problem.x2().clone(),
        problem.y().clone(),
    ];
    let mut weights = vec![0.0; nu1 * nt1 * nu2 * nt2 * nx1 * nx2 * ny];
    for u1 in 0..nu1 {
        for u2 in 0..nu2 {
            let qv = q.weights()[u1 * nu2 + u2];
            if qv == 0.0 {
                continue;
            }
            let row = match p.row(u1 * nu2 + u2) {
                Some(r) => r,
                None => return Err(RegionError::UndefinedPolicyRow(u1 * nu2 + u2)),
            };
            for t1 in 0..nt1 {
                for t2 in 0..nt2 {
                    for x1 in 0..nx1 {
                        for x2 in 0..nx2 {
                            let col = ((t1 * nt2 + t2) * nx1 + x1) * nx2 + x2;
                            let f = qv * row[col];
                            if f == 0.0 {
                                continue;
                            }
                            let wrow = w.row(x1 * nx2 + x2).expect("channel rows are defined");
                            let base =
                                (((((u1 * nt1 + t1) * nu2 + u2) * nt2 + t2) * nx1 + x1) * nx2
                                    + x2)
                                    * ny;
                            for (y, &wy) in wrow.iter().enumerate() {
                                weights[base + y] = f * wy;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(JointPMF::new(axes_list, weights)?)
}

fn ensure_zero_source_mass(
    q: &JointPMF,
    axis: usize,
    value: usize,
) -> Result<(), RegionError> {
    let m = q.marginal(&[axis])?;
    if m.weights()[value] > 0.0 {
        return Err(RegionError::UndefinedPolicyRow(value));
    }
    Ok(())
}

/// The three bounds `(a, b, c)` on `R1`, `R2`, and `R1 + R2` contributed by
/// one composed joint. Components may be negative; [`pentagon`] treats such a
/// triple as useless rather than invalid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl RateTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Componentwise weak domination (`other` is at least as good everywhere).
    pub fn dominated_by(&self, other: &RateTriple) -> bool {
        other.a >= self.a && other.b >= self.b && other.c >= self.c
    }

    pub fn dot(&self, w: [f64; 3]) -> f64 {
        w[0] * self.a + w[1] * self.b + w[2] * self.c
    }
}

fn check_system_joint(joint: &JointPMF) -> Result<(), RegionError> {
    if joint.axis_count() != axes::COUNT {
        return Err(RegionError::NotSystemJoint(joint.axis_count()));
    }
    Ok(())
}

/// Rate triple for general (possibly correlated) covertexts:
/// `a = I(T1;T2,Y) - I(U1;T1)`, `b = I(T2;T1,Y) - I(U2;T2)`,
/// `c = I(T1,T2;Y) - I(U1,U2;T1,T2)`.
pub fn rate_triple_general(joint: &JointPMF) -> Result<RateTriple, RegionError> {
    check_system_joint(joint)?;
    use axes::*;
    let a = joint.mutual_information(&[T1], &[T2, Y], None)?
        - joint.mutual_information(&[U1], &[T1], None)?;
    let b = joint.mutual_information(&[T2], &[T1, Y], None)?
        - joint.mutual_information(&[U2], &[T2], None)?;
    let c = joint.mutual_information(&[T1, T2], &[Y], None)?
        - joint.mutual_information(&[U1, U2], &[T1, T2], None)?;
    Ok(RateTriple::new(a, b, c))
}

/// Sharper triple for independent covertexts:
/// `a = I(T1;Y|T2) - I(U1;T1)`, `b = I(T2;Y|T1) - I(U2;T2)`,
/// `c = I(T1,T2;Y) - I(U1;T1) - I(U2;T2)`.
pub fn rate_triple_independent(joint: &JointPMF) -> Result<RateTriple, RegionError> {
    check_system_joint(joint)?;
    use axes::*;
    let i_u1t1 = joint.mutual_information(&[U1], &[T1], None)?;
    let i_u2t2 = joint.mutual_information(&[U2], &[T2], None)?;
    let a = joint.mutual_information(&[T1], &[Y], Some(&[T2]))? - i_u1t1;
    let b = joint.mutual_information(&[T2], &[Y], Some(&[T1]))? - i_u2t2;
    let c = joint.mutual_information(&[T1, T2], &[Y], None)? - i_u1t1 - i_u2t2;
    Ok(RateTriple::new(a, b, c))
}

/// Which feasible set a joint is tested against: `Inner` is the factored set
/// with the positivity condition `I(Ui;Ti) > 0`; `Outer` drops positivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityMode {
    Inner,
    Outer,
}

/// Feasibility verdict with the four computed diagnostics, so callers can
/// re-filter at their own thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub ok: bool,
    pub distortion1: f64,
    pub distortion2: f64,
    pub info_u1t1: f64,
    pub info_u2t2: f64,
}

/// Distortion constraints for both users plus, in inner mode, the positivity
/// of `I(Ui;Ti)` (implemented as `> POSITIVITY_FLOOR`).
pub fn feasible(
    joint: &JointPMF,
    problem: &EmbeddingProblem,
    mode: FeasibilityMode,
) -> Result<Feasibility, RegionError> {
    check_system_joint(joint)?;
    use axes::*;
    let distortion1 = joint.expected_distortion(problem.distortion(1), U1, X1)?;
    let distortion2 = joint.expected_distortion(problem.distortion(2), U2, X2)?;
    let info_u1t1 = joint.mutual_information(&[U1], &[T1], None)?;
    let info_u2t2 = joint.mutual_information(&[U2], &[T2], None)?;
    let mut ok = distortion1 <= problem.level(1) && distortion2 <= problem.level(2);
    if mode == FeasibilityMode::Inner {
        ok = ok && info_u1t1 > POSITIVITY_FLOOR && info_u2t2 > POSITIVITY_FLOOR;
    }
    Ok(Feasibility {
        ok,
        distortion1,
        distortion2,
        info_u1t1,
        info_u2t2,
    })
}

/// A convex polygon in the nonnegative `(R1, R2)` quadrant, stored as its
/// boundary vertices in counterclockwise order starting at `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion {
    vertices: Vec<(f64, f64)>,
}

impl RateRegion {
    /// The single point `(0, 0)`.
    pub fn degenerate() -> Self {
        Self {
            vertices: vec![(0.0, 0.0)],
        }
    }

    /// Convex hull of the given points together with the origin. Collinear
    /// vertices are dropped with tolerance [`COLLINEAR_TOL`].
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self, RegionError> {
        let mut pts = Vec::with_capacity(points.len() + 1);
        pts.push((0.0, 0.0));
        for &(x, y) in points {
            if x < -COLLINEAR_TOL || y < -COLLINEAR_TOL || !x.is_finite() || !y.is_finite() {
                return Err(RegionError::NegativeVertex(x, y));
            }
            pts.push((x.max(0.0), y.max(0.0)));
        }
        Ok(Self {
            vertices: convex_hull(pts),
        })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Largest `R1 + R2` over the region.
    pub fn max_sum_rate(&self) -> f64 {
        self.vertices
            .iter()
            .map(|&(x, y)| x + y)
            .fold(0.0, f64::max)
    }

    /// Membership in the polygon expanded by `slack` in the sup norm.
    pub fn contains(&self, point: (f64, f64), slack: f64) -> bool {
        let v = &self.vertices;
        if v.len() >= 3 {
            let inside = (0..v.len()).all(|i| {
                let a = v[i];
                let b = v[(i + 1) % v.len()];
                cross(a, b, point) >= 0.0
            });
            if inside {
                return true;
            }
        }
        if v.len() == 1 {
            let d = (point.0 - v[0].0).abs().max((point.1 - v[0].1).abs());
            return d <= slack;
        }
        (0..v.len()).any(|i| {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            sup_dist_segment(point, a, b) <= slack
        })
    }

    /// Every vertex of `other` lies in `self` (with slack); for convex
    /// regions this is containment.
    pub fn contains_region(&self, other: &RateRegion, slack: f64) -> bool {
        other.vertices.iter().all(|&p| self.contains(p, slack))
    }
}

/// The polygon `{(R1,R2) >= 0 : R1 <= a, R2 <= b, R1+R2 <= c}`; the single
/// vertex `(0,0)` when any bound is nonpositive.
pub fn pentagon(triple: RateTriple) -> RateRegion {
    let RateTriple { a, b, c } = triple;
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return RateRegion::degenerate();
    }
    let mut pts = vec![(a.min(c), 0.0), (0.0, b.min(c))];
    if c >= a {
        pts.push((a, b.min(c - a)));
    }
    if c >= b {
        pts.push((a.min(c - b), b));
    }
    RateRegion::from_points(&pts).expect("pentagon vertices are nonnegative")
}

/// Convex hull of the union of the given regions' vertices.
pub fn hull_union(regions: &[RateRegion]) -> Result<RateRegion, RegionError> {
    if regions.is_empty() {
        return Err(RegionError::EmptyInput);
    }
    let pts: Vec<(f64, f64)> = regions
        .iter()
        .flat_map(|r| r.vertices.iter().copied())
        .collect();
    RateRegion::from_points(&pts)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone chain over lexicographically sorted points; counterclockwise
/// output starting at the lexicographic minimum, collinear points dropped.
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|p, q| p.partial_cmp(q).expect("finite coordinates"));
    pts.dedup();
    if pts.len() <= 1 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= COLLINEAR_TOL
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= COLLINEAR_TOL
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Exact sup-norm distance from `p` to the segment `[a, b]`. The objective is
/// piecewise linear and convex in the segment parameter, so its minimum is
/// attained at an endpoint, a kink, or a crossing of the two coordinate terms.
fn sup_dist_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (ax, ay) = (p.0 - a.0, p.1 - a.1);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let f = |t: f64| (ax - t * dx).abs().max((ay - t * dy).abs());
    let mut best = f(0.0).min(f(1.0));
    let mut candidates = Vec::with_capacity(4);
    if dx != 0.0 {
        candidates.push(ax / dx);
    }
    if dy != 0.0 {
        candidates.push(ay / dy);
    }
    if dx != dy {
        candidates.push((ax - ay) / (dx - dy));
    }
    if dx + dy != 0.0 {
        candidates.push((ax + ay) / (dx + dy));
    }
    for t in candidates {
        if t.is_finite() {
            best = best.min(f(t.clamp(0.0, 1.0)));
        }
    }
    best
}

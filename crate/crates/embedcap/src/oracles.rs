//! Independent brute-force reference implementations.
//!
//! These deliberately avoid the library's marginalization, entropy, and hull
//! code paths so the verification suites can check the fast implementations
//! against a second route. They are exponential or cubic and meant for tiny
//! instances only.

use crate::prob::{EmbeddingProblem, JointPMF};
use crate::region::RateTriple;

fn advance(idx: &mut [usize], dims: &[usize]) -> bool {
    for ax in (0..dims.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < dims[ax] {
            return true;
        }
        idx[ax] = 0;
    }
    false
}

fn group_flat(idx: &[usize], group: &[usize], dims: &[usize]) -> usize {
    let mut flat = 0;
    for &ax in group {
        flat = flat * dims[ax] + idx[ax];
    }
    flat
}

fn group_size(group: &[usize], dims: &[usize]) -> usize {
    group.iter().map(|&ax| dims[ax]).product()
}

/// `I(A;B)` by direct nested summation over all joint cells.
pub fn mutual_information_nested(pmf: &JointPMF, ga: &[usize], gb: &[usize]) -> f64 {
    let dims = pmf.dims();
    let (na, nb) = (group_size(ga, &dims), group_size(gb, &dims));
    let mut p_ab = vec![0.0f64; na * nb];
    let mut idx = vec![0usize; dims.len()];
    loop {
        let w = pmf.get(&idx);
        p_ab[group_flat(&idx, ga, &dims) * nb + group_flat(&idx, gb, &dims)] += w;
        if !advance(&mut idx, &dims) {
            break;
        }
    }
    let mut p_a = vec![0.0f64; na];
    let mut p_b = vec![0.0f64; nb];
    for a in 0..na {
        for b in 0..nb {
            p_a[a] += p_ab[a * nb + b];
            p_b[b] += p_ab[a * nb + b];
        }
    }
    let mut mi = 0.0;
    for a in 0..na {
        for b in 0..nb {
            let p = p_ab[a * nb + b];
            if p > 0.0 {
                mi += p * (p / (p_a[a] * p_b[b])).log2();
            }
        }
    }
    mi
}

/// `I(A;B|C)` by direct nested summation.
pub fn conditional_mutual_information_nested(
    pmf: &JointPMF,
    ga: &[usize],
    gb: &[usize],
    gc: &[usize],
) -> f64 {
    let dims = pmf.dims();
    let (na, nb, nc) = (
        group_size(ga, &dims),
        group_size(gb, &dims),
        group_size(gc, &dims),
    );
    let mut p_abc = vec![0.0f64; na * nb * nc];
    let mut idx = vec![0usize; dims.len()];
    loop {
        let w = pmf.get(&idx);
        let (a, b, c) = (
            group_flat(&idx, ga, &dims),
            group_flat(&idx, gb, &dims),
            group_flat(&idx, gc, &dims),
        );
        p_abc[(a * nb + b) * nc + c] += w;
        if !advance(&mut idx, &dims) {
            break;
        }
    }
    let mut mi = 0.0;
    for c in 0..nc {
        let mut p_c = 0.0;
        let mut p_ac = vec![0.0f64; na];
        let mut p_bc = vec![0.0f64; nb];
        for a in 0..na {
            for b in 0..nb {
                let p = p_abc[(a * nb + b) * nc + c];
                p_c += p;
                p_ac[a] += p;
                p_bc[b] += p;
            }
        }
        if p_c == 0.0 {
            continue;
        }
        for a in 0..na {
            for b in 0..nb {
                let p = p_abc[(a * nb + b) * nc + c];
                if p > 0.0 {
                    mi += p * (p * p_c / (p_ac[a] * p_bc[b])).log2();
                }
            }
        }
    }
    mi
}

/// General rate triple recomputed from the nested-sum mutual informations.
pub fn rate_triple_general_oracle(joint: &JointPMF) -> RateTriple {
    use crate::axes::*;
    let a = mutual_information_nested(joint, &[T1], &[T2, Y])
        - mutual_information_nested(joint, &[U1], &[T1]);
    let b = mutual_information_nested(joint, &[T2], &[T1, Y])
        - mutual_information_nested(joint, &[U2], &[T2]);
    let c = mutual_information_nested(joint, &[T1, T2], &[Y])
        - mutual_information_nested(joint, &[U1, U2], &[T1, T2]);
    RateTriple::new(a, b, c)
}

/// Independent-covertext rate triple from nested sums.
pub fn rate_triple_independent_oracle(joint: &JointPMF) -> RateTriple {
    use crate::axes::*;
    let i1 = mutual_information_nested(joint, &[U1], &[T1]);
    let i2 = mutual_information_nested(joint, &[U2], &[T2]);
    let a = conditional_mutual_information_nested(joint, &[T1], &[Y], &[T2]) - i1;
    let b = conditional_mutual_information_nested(joint, &[T2], &[Y], &[T1]) - i2;
    let c = mutual_information_nested(joint, &[T1, T2], &[Y]) - i1 - i2;
    RateTriple::new(a, b, c)
}

/// O(n^3) convex hull: a directed edge (i, j) is on the hull when every other
/// point lies strictly to its left. Assumes points in general position.
/// Returns vertices counterclockwise starting at the lexicographic minimum.
pub fn brute_force_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let n = points.len();
    if n <= 2 {
        return points.to_vec();
    }
    let mut next = vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let all_left = (0..n)
                .filter(|&k| k != i && k != j)
                .all(|k| cross(points[i], points[j], points[k]) > 0.0);
            if all_left {
                next[i] = j;
            }
        }
    }
    let start = (0..n)
        .min_by(|&a, &b| points[a].partial_cmp(&points[b]).unwrap())
        .unwrap();
    let mut order = vec![points[start]];
    let mut at = next[start];
    while at != start && at != usize::MAX && order.len() <= n {
        order.push(points[at]);
        at = next[at];
    }
    order
}

/// Brute-force maximum of `I(X1,X2;Y)` over a grid of joint input laws with
/// `steps` quantization levels per unit. This is the unconstrained
/// data-processing ceiling on any reported sum rate.
pub fn max_channel_information(problem: &EmbeddingProblem, steps: usize) -> f64 {
    let (nx1, nx2, ny) = (
        problem.x1().len(),
        problem.x2().len(),
        problem.y().len(),
    );
    let cells = nx1 * nx2;
    let w = problem.attack();
    let mut best: f64 = 0.0;
    let mut comp = vec![0usize; cells];
    comp[cells - 1] = steps;
    loop {
        // I(X1X2;Y) for the input law comp/steps
        let mut p_y = vec![0.0f64; ny];
        let mut mi = 0.0;
        for cell in 0..cells {
            let px = comp[cell] as f64 / steps as f64;
            if px == 0.0 {
                continue;
            }
            let row = w.row(cell).unwrap();
            for y in 0..ny {
                p_y[y] += px * row[y];
            }
        }
        for cell in 0..cells {
            let px = comp[cell] as f64 / steps as f64;
            if px == 0.0 {
                continue;
            }
            let row = w.row(cell).unwrap();
            for y in 0..ny {
                if row[y] > 0.0 {
                    mi += px * row[y] * (row[y] / p_y[y]).log2();
                }
            }
        }
        best = best.max(mi);
        if !next_composition(&mut comp, steps) {
            break;
        }
    }
    best
}

/// Advance a fixed-sum composition in ascending lexicographic order:
/// take one unit from the rightmost positive slot, add it to the slot on its
/// left, and dump that slot's remainder into the last position. Returns false
/// after the final composition `(total, 0, ..., 0)`.
fn next_composition(comp: &mut [usize], total: usize) -> bool {
    let k = comp.len();
    let Some(j) = (0..k).rev().find(|&i| comp[i] > 0) else {
        return false;
    };
    if j == 0 {
        return false;
    }
    comp[j - 1] += 1;
    let rest = comp[j] - 1;
    comp[j] = 0;
    comp[k - 1] += rest;
    debug_assert_eq!(comp.iter().sum::<usize>(), total);
    true
}

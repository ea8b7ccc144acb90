//! Ready-made problem instances used by the CLI and the test suites.

use crate::prob::{ConditionalPMF, DistortionTable, EmbeddingProblem, FiniteAlphabet, JointPMF};

/// The built-in binary benchmark: independent binary covertexts with
/// `P(U1=0) = 0.05` and `P(U2=0) = 0.1`, the modulo-2 additive attack
/// `Y = X1 + X2 + Z` with `P(Z=1) = 0.02`, Hamming distortion, and levels
/// `(D1, D2) = (0.45, 0.4)`.
pub fn binary_example() -> EmbeddingProblem {
    binary_example_with_levels(0.45, 0.4)
}

/// Same sources and channel as [`binary_example`], custom distortion levels.
pub fn binary_example_with_levels(level1: f64, level2: f64) -> EmbeddingProblem {
    let covertext = independent_binary_covertext(0.05, 0.10);
    let attack = binary_additive_attack(0.02);
    EmbeddingProblem::new(
        covertext,
        attack,
        DistortionTable::hamming(2).unwrap(),
        DistortionTable::hamming(2).unwrap(),
        level1,
        level2,
    )
    .expect("example problem is valid")
}

/// Independent binary covertexts with the given `P(Ui = 0)`.
pub fn independent_binary_covertext(p1_zero: f64, p2_zero: f64) -> JointPMF {
    let u1 = FiniteAlphabet::binary("u1");
    let u2 = FiniteAlphabet::binary("u2");
    let p1 = [p1_zero, 1.0 - p1_zero];
    let p2 = [p2_zero, 1.0 - p2_zero];
    let mut w = vec![0.0; 4];
    for a in 0..2 {
        for b in 0..2 {
            w[a * 2 + b] = p1[a] * p2[b];
        }
    }
    JointPMF::new(vec![u1, u2], w).expect("product law is valid")
}

/// `Y = X1 + X2 + Z` over GF(2) with `P(Z=1) = flip`.
pub fn binary_additive_attack(flip: f64) -> ConditionalPMF {
    let x1 = FiniteAlphabet::binary("x1");
    let x2 = FiniteAlphabet::binary("x2");
    let y = FiniteAlphabet::binary("y");
    let mut rows = vec![0.0; 8];
    for a in 0..2usize {
        for b in 0..2usize {
            for c in 0..2usize {
                let p = if c == a ^ b { 1.0 - flip } else { flip };
                rows[(a * 2 + b) * 2 + c] = p;
            }
        }
    }
    ConditionalPMF::from_rows(vec![x1, x2], vec![y], rows).expect("channel rows are valid")
}

/// A single-user test bench: user 1 sees the binary-symmetric attack
/// `Y = X1 + Z` with `P(Z=1) = flip` while user 2's input is ignored by the
/// channel. Both covertexts stay binary so every feasibility check applies
/// unchanged; distortion levels of 1 never bind under Hamming distortion.
pub fn single_user_bench(flip: f64) -> EmbeddingProblem {
    let covertext = independent_binary_covertext(0.05, 0.5);
    let x1 = FiniteAlphabet::binary("x1");
    let x2 = FiniteAlphabet::binary("x2");
    let y = FiniteAlphabet::binary("y");
    let mut rows = vec![0.0; 8];
    for a in 0..2usize {
        for b in 0..2usize {
            for c in 0..2usize {
                let p = if c == a { 1.0 - flip } else { flip };
                rows[(a * 2 + b) * 2 + c] = p;
            }
        }
    }
    let attack = ConditionalPMF::from_rows(vec![x1, x2], vec![y], rows).unwrap();
    EmbeddingProblem::new(
        covertext,
        attack,
        DistortionTable::hamming(2).unwrap(),
        DistortionTable::hamming(2).unwrap(),
        1.0,
        1.0,
    )
    .expect("single-user bench is valid")
}

/// Two parallel binary symmetric channels: `Y = (Y1, Y2)` with
/// `Yi = Xi + Zi`, `P(Zi=1) = flip_i`. The output alphabet is the four-symbol
/// product, ordered `(y1, y2)` row-major.
pub fn parallel_bsc_attack(flip1: f64, flip2: f64) -> ConditionalPMF {
    let x1 = FiniteAlphabet::binary("x1");
    let x2 = FiniteAlphabet::binary("x2");
    let y = FiniteAlphabet::new("y", vec!["00".into(), "01".into(), "10".into(), "11".into()])
        .unwrap();
    let mut rows = vec![0.0; 16];
    for a in 0..2usize {
        for b in 0..2usize {
            for y1 in 0..2usize {
                for y2 in 0..2usize {
                    let p1 = if y1 == a { 1.0 - flip1 } else { flip1 };
                    let p2 = if y2 == b { 1.0 - flip2 } else { flip2 };
                    rows[(a * 2 + b) * 4 + (y1 * 2 + y2)] = p1 * p2;
                }
            }
        }
    }
    ConditionalPMF::from_rows(vec![x1, x2], vec![y], rows).expect("channel rows are valid")
}

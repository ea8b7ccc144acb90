use super::{ConditionalPMF, FiniteAlphabet, JointPMF, ProbError};

/// Single-letter distortion table `d(u, x)` over source rows and stego columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionTable {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DistortionTable {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self, ProbError> {
        if values.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(ProbError::ShapeMismatch {
                expected: rows * cols,
                got: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(ProbError::BadDistortionEntry {
                    row: i / cols,
                    col: i % cols,
                    value: v,
                });
            }
        }
        Ok(Self { rows, cols, values })
    }

    /// Square Hamming table: 0 on the diagonal, 1 elsewhere.
    pub fn hamming(size: usize) -> Result<Self, ProbError> {
        let values = (0..size * size)
            .map(|i| if i / size == i % size { 0.0 } else { 1.0 })
            .collect();
        Self::new(size, size, values)
    }

    /// All-zero table (a user whose distortion never binds).
    pub fn zero(rows: usize, cols: usize) -> Result<Self, ProbError> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest entry, `d_max`.
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// A two-user embedding problem: the covertext joint law, the attack channel,
/// and per-user distortion tables with their levels.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingProblem {
    covertext: JointPMF,
    attack: ConditionalPMF,
    d1: DistortionTable,
    d2: DistortionTable,
    level1: f64,
    level2: f64,
}

impl EmbeddingProblem {
    /// `covertext` must be a two-axis joint over (U1, U2); `attack` maps
    /// (X1, X2) to Y.
    pub fn new(
        covertext: JointPMF,
        attack: ConditionalPMF,
        d1: DistortionTable,
        d2: DistortionTable,
        level1: f64,
        level2: f64,
    ) -> Result<Self, ProbError> {
        if covertext.axis_count() != 2 {
            return Err(ProbError::InconsistentAlphabets("covertext"));
        }
        if attack.given_axes().len() != 2 || attack.target_axes().len() != 1 {
            return Err(ProbError::InconsistentAlphabets("attack channel"));
        }
        if !level1.is_finite() || level1 < 0.0 {
            return Err(ProbError::BadDistortionLevel(level1));
        }
        if !level2.is_finite() || level2 < 0.0 {
            return Err(ProbError::BadDistortionLevel(level2));
        }
        let p = Self {
            covertext,
            attack,
            d1,
            d2,
            level1,
            level2,
        };
        if p.d1.rows() != p.u1().len()
            || p.d1.cols() != p.x1().len()
            || p.d2.rows() != p.u2().len()
            || p.d2.cols() != p.x2().len()
        {
            return Err(ProbError::InconsistentAlphabets("distortion tables"));
        }
        Ok(p)
    }

    pub fn covertext(&self) -> &JointPMF {
        &self.covertext
    }

    pub fn attack(&self) -> &ConditionalPMF {
        &self.attack
    }

    pub fn u1(&self) -> &FiniteAlphabet {
        self.covertext.axis(0)
    }

    pub fn u2(&self) -> &FiniteAlphabet {
        self.covertext.axis(1)
    }

    pub fn x1(&self) -> &FiniteAlphabet {
        &self.attack.given_axes()[0]
    }

    pub fn x2(&self) -> &FiniteAlphabet {
        &self.attack.given_axes()[1]
    }

    pub fn y(&self) -> &FiniteAlphabet {
        &self.attack.target_axes()[0]
    }

    pub fn distortion(&self, user: usize) -> &DistortionTable {
        match user {
            1 => &self.d1,
            2 => &self.d2,
            _ => panic!("user must be 1 or 2"),
        }
    }

    pub fn level(&self, user: usize) -> f64 {
        match user {
            1 => self.level1,
            2 => self.level2,
            _ => panic!("user must be 1 or 2"),
        }
    }

    pub fn d_max(&self, user: usize) -> f64 {
        self.distortion(user).max()
    }

    /// Mutual information between the two covertext sources.
    pub fn covertext_dependence(&self) -> f64 {
        self.covertext
            .mutual_information(&[0], &[1], None)
            .expect("covertext has two axes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn hamming_table() {
        let t = DistortionTable::hamming(2).unwrap();
        assert_eq!(t.get(0, 0), 0.0);
        assert_eq!(t.get(0, 1), 1.0);
        assert_eq!(t.max(), 1.0);
    }

    #[test]
    fn rejects_negative_entries_and_levels() {
        assert!(DistortionTable::new(1, 2, vec![0.0, -0.5]).is_err());
        let p = presets::binary_example();
        let bad = EmbeddingProblem::new(
            p.covertext().clone(),
            p.attack().clone(),
            p.distortion(1).clone(),
            p.distortion(2).clone(),
            -1.0,
            0.4,
        );
        assert!(matches!(bad, Err(ProbError::BadDistortionLevel(_))));
    }

    #[test]
    fn example_problem_marginals() {
        let p = presets::binary_example();
        let q = p.covertext();
        assert!((q.marginal(&[0]).unwrap().get(&[0]) - 0.05).abs() < 1e-12);
        assert!((q.marginal(&[1]).unwrap().get(&[0]) - 0.10).abs() < 1e-12);
        assert!(p.covertext_dependence().abs() < 1e-12);
        assert_eq!(p.d_max(1), 1.0);
    }
}

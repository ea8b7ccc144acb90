use super::{FiniteAlphabet, ProbError, MASS_FLOOR, NORMALIZATION_TOLERANCE};

/// A conditional distribution `P(targets | givens)` stored as a row-stochastic
/// matrix: one row per given-tuple, one column per target-tuple, both row-major
/// in the respective axis order.
///
/// Rows whose conditioning event had zero mass are undefined; they carry zero
/// weight in any composition and [`ConditionalPMF::row`] returns `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPMF {
    given_axes: Vec<FiniteAlphabet>,
    target_axes: Vec<FiniteAlphabet>,
    rows: Vec<f64>,
    defined: Vec<bool>,
}

impl ConditionalPMF {
    /// Build from explicit rows; every row must be a distribution.
    pub fn from_rows(
        given_axes: Vec<FiniteAlphabet>,
        target_axes: Vec<FiniteAlphabet>,
        mut rows: Vec<f64>,
    ) -> Result<Self, ProbError> {
        let n_given: usize = given_axes.iter().map(|a| a.len()).product();
        let n_target: usize = target_axes.iter().map(|a| a.len()).product();
        if rows.len() != n_given * n_target || target_axes.is_empty() {
            return Err(ProbError::ShapeMismatch {
                expected: n_given * n_target,
                got: rows.len(),
            });
        }
        for g in 0..n_given {
            let row = &mut rows[g * n_target..(g + 1) * n_target];
            for (t, w) in row.iter_mut().enumerate() {
                if *w < -MASS_FLOOR || !w.is_finite() {
                    return Err(ProbError::NegativeMass {
                        index: g * n_target + t,
                        value: *w,
                    });
                }
                if *w < 0.0 {
                    *w = 0.0;
                }
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
                return Err(ProbError::NotNormalized { total });
            }
            row.iter_mut().for_each(|w| *w /= total);
        }
        let defined = vec![true; n_given];
        Ok(Self {
            given_axes,
            target_axes,
            rows,
            defined,
        })
    }

    pub(crate) fn from_validated(
        given_axes: Vec<FiniteAlphabet>,
        target_axes: Vec<FiniteAlphabet>,
        rows: Vec<f64>,
        defined: Vec<bool>,
    ) -> Self {
        Self {
            given_axes,
            target_axes,
            rows,
            defined,
        }
    }

    pub fn given_axes(&self) -> &[FiniteAlphabet] {
        &self.given_axes
    }

    pub fn target_axes(&self) -> &[FiniteAlphabet] {
        &self.target_axes
    }

    pub fn given_len(&self) -> usize {
        self.defined.len()
    }

    pub fn target_len(&self) -> usize {
        self.rows.len() / self.defined.len()
    }

    /// Row for a flat given-index, `None` when undefined.
    pub fn row(&self, given: usize) -> Option<&[f64]> {
        if !self.defined[given] {
            return None;
        }
        let t = self.target_len();
        Some(&self.rows[given * t..(given + 1) * t])
    }

    pub fn is_defined(&self, given: usize) -> bool {
        self.defined[given]
    }

    /// Single entry; zero for undefined rows.
    pub fn get(&self, given: usize, target: usize) -> f64 {
        self.rows[given * self.target_len() + target]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_validates() {
        let u = FiniteAlphabet::binary("u");
        let t = FiniteAlphabet::binary("t");
        let ok = ConditionalPMF::from_rows(vec![u.clone()], vec![t.clone()], vec![
            0.2, 0.8, 1.0, 0.0,
        ])
        .unwrap();
        assert_eq!(ok.row(0).unwrap(), &[0.2, 0.8]);
        let bad = ConditionalPMF::from_rows(vec![u.clone()], vec![t.clone()], vec![
            0.5, 0.4, 1.0, 0.0,
        ]);
        assert!(matches!(bad, Err(ProbError::NotNormalized { .. })));
        let shape = ConditionalPMF::from_rows(vec![u], vec![t], vec![1.0, 0.0, 1.0]);
        assert!(matches!(shape, Err(ProbError::ShapeMismatch { .. })));
    }
}

use super::conditional::ConditionalPMF;
use super::problem::DistortionTable;
use super::{strides, FiniteAlphabet, ProbError, MASS_FLOOR, NORMALIZATION_TOLERANCE};

/// A dense joint probability mass function over a product of finite alphabets.
///
/// Weights are stored row-major in axis order. Construction validates
/// nonnegativity and normalization and then renormalizes exactly, so every
/// `JointPMF` sums to 1 up to accumulation error.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPMF {
    axes: Vec<FiniteAlphabet>,
    weights: Vec<f64>,
}

impl JointPMF {
    pub fn new(axes: Vec<FiniteAlphabet>, mut weights: Vec<f64>) -> Result<Self, ProbError> {
        let expected: usize = axes.iter().map(|a| a.len()).product();
        if axes.is_empty() || weights.len() != expected {
            return Err(ProbError::ShapeMismatch {
                expected,
                got: weights.len(),
            });
        }
        for (i, w) in weights.iter_mut().enumerate() {
            if *w < -MASS_FLOOR || !w.is_finite() {
                return Err(ProbError::NegativeMass {
                    index: i,
                    value: *w,
                });
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(ProbError::NotNormalized { total });
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(Self { axes, weights })
    }

    /// Construct without the normalization check; used internally where the
    /// result is exact by construction (marginals of a valid PMF).
    pub(crate) fn from_parts_unchecked(axes: Vec<FiniteAlphabet>, weights: Vec<f64>) -> Self {
        Self { axes, weights }
    }

    pub fn axes(&self) -> &[FiniteAlphabet] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &FiniteAlphabet {
        &self.axes[i]
    }

    pub fn axis_count(&self) -> usize {
        self.axes.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weight at a multi-index (one symbol index per axis).
    pub fn get(&self, idx: &[usize]) -> f64 {
        let st = strides(&self.dims());
        let flat: usize = idx.iter().zip(&st).map(|(i, s)| i * s).sum();
        self.weights[flat]
    }

    fn check_axis_subset(&self, subset: &[usize]) -> Result<(), ProbError> {
        for (pos, &ax) in subset.iter().enumerate() {
            if ax >= self.axes.len() || subset[..pos].contains(&ax) {
                return Err(ProbError::UnknownAxis(ax));
            }
        }
        Ok(())
    }

    /// Marginal onto `keep`, in the order given (axes may be permuted).
    pub fn marginal(&self, keep: &[usize]) -> Result<JointPMF, ProbError> {
        if keep.is_empty() {
            return Err(ProbError::UnknownAxis(usize::MAX));
        }
        self.check_axis_subset(keep)?;
        let dims = self.dims();
        let out_axes: Vec<FiniteAlphabet> = keep.iter().map(|&i| self.axes[i].clone()).collect();
        let out_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
        let out_strides = strides(&out_dims);
        let out_len: usize = out_dims.iter().product();

        // Per input axis, its stride in the output (0 if summed out).
        let mut contrib = vec![0usize; dims.len()];
        for (pos, &ax) in keep.iter().enumerate() {
            contrib[ax] = out_strides[pos];
        }

        let mut out = vec![0.0f64; out_len];
        let mut digits = vec![0usize; dims.len()];
        let mut off = 0usize;
        for &w in &self.weights {
            out[off] += w;
            for ax in (0..dims.len()).rev() {
                digits[ax] += 1;
                off += contrib[ax];
                if digits[ax] < dims[ax] {
                    break;
                }
                off -= contrib[ax] * dims[ax];
                digits[ax] = 0;
            }
        }
        Ok(JointPMF::from_parts_unchecked(out_axes, out))
    }

    /// Conditional distribution of `targets` given `givens`. Rows whose
    /// conditioning event has zero mass are marked undefined.
    pub fn conditional(
        &self,
        targets: &[usize],
        givens: &[usize],
    ) -> Result<ConditionalPMF, ProbError> {
        self.check_axis_subset(targets)?;
        self.check_axis_subset(givens)?;
        for &t in targets {
            if givens.contains(&t) {
                return Err(ProbError::OverlappingGroups(t));
            }
        }
        let mut keep: Vec<usize> = givens.to_vec();
        keep.extend_from_slice(targets);
        let joint = self.marginal(&keep)?;
        let given_axes: Vec<FiniteAlphabet> = givens.iter().map(|&i| self.axes[i].clone()).collect();
        let target_axes: Vec<FiniteAlphabet> =
            targets.iter().map(|&i| self.axes[i].clone()).collect();
        let n_target: usize = target_axes.iter().map(|a| a.len()).product();
        let n_given: usize = given_axes.iter().map(|a| a.len()).product();

        let mut rows = vec![0.0f64; n_given * n_target];
        let mut defined = vec![false; n_given];
        for g in 0..n_given {
            let slice = &joint.weights[g * n_target..(g + 1) * n_target];
            let mass: f64 = slice.iter().sum();
            if mass > 0.0 {
                defined[g] = true;
                for (t, &w) in slice.iter().enumerate() {
                    rows[g * n_target + t] = w / mass;
                }
            }
        }
        Ok(ConditionalPMF::from_validated(
            given_axes,
            target_axes,
            rows,
            defined,
        ))
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| -w * w.log2())
            .sum()
    }

    /// Entropy of the marginal onto `keep`.
    pub fn marginal_entropy(&self, keep: &[usize]) -> Result<f64, ProbError> {
        Ok(self.marginal(keep)?.entropy())
    }

    /// Mutual information `I(A;B)` in bits, or `I(A;B|C)` when `given` is set,
    /// computed from entropies of marginals.
    pub fn mutual_information(
        &self,
        group_a: &[usize],
        group_b: &[usize],
        given: Option<&[usize]>,
    ) -> Result<f64, ProbError> {
        self.check_axis_subset(group_a)?;
        self.check_axis_subset(group_b)?;
        let cond = given.unwrap_or(&[]);
        self.check_axis_subset(cond)?;
        for &a in group_a {
            if group_b.contains(&a) || cond.contains(&a) {
                return Err(ProbError::OverlappingGroups(a));
            }
        }
        for &b in group_b {
            if cond.contains(&b) {
                return Err(ProbError::OverlappingGroups(b));
            }
        }

        let concat = |xs: &[&[usize]]| -> Vec<usize> {
            xs.iter().flat_map(|s| s.iter().copied()).collect()
        };
        if cond.is_empty() {
            let h_a = self.marginal_entropy(group_a)?;
            let h_b = self.marginal_entropy(group_b)?;
            let h_ab = self.marginal_entropy(&concat(&[group_a, group_b]))?;
            Ok(h_a + h_b - h_ab)
        } else {
            let h_ac = self.marginal_entropy(&concat(&[group_a, cond]))?;
            let h_bc = self.marginal_entropy(&concat(&[group_b, cond]))?;
            let h_abc = self.marginal_entropy(&concat(&[group_a, group_b, cond]))?;
            let h_c = self.marginal_entropy(cond)?;
            Ok(h_ac + h_bc - h_abc - h_c)
        }
    }

    /// Expected distortion `E[d(source, stego)]` under the pair marginal.
    pub fn expected_distortion(
        &self,
        table: &DistortionTable,
        source_axis: usize,
        stego_axis: usize,
    ) -> Result<f64, ProbError> {
        let pair = self.marginal(&[source_axis, stego_axis])?;
        let (rows, cols) = (pair.axis(0).len(), pair.axis(1).len());
        if table.rows() != rows || table.cols() != cols {
            return Err(ProbError::ShapeMismatch {
                expected: rows * cols,
                got: table.rows() * table.cols(),
            });
        }
        let mut acc = 0.0;
        for u in 0..rows {
            for x in 0..cols {
                acc += pair.weights()[u * cols + x] * table.get(u, x);
            }
        }
        Ok(acc)
    }
}

use super::SearchError;
use crate::prob::{ConditionalPMF, FiniteAlphabet};
use rand::Rng;

/// Number of quantization levels for a step, or an error when `1/step` is not
/// an integer (within 1e-9).
pub(crate) fn levels_for_step(step: f64) -> Result<usize, SearchError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(SearchError::StepNotDivisor(step));
    }
    let m = (1.0 / step).round();
    if (m * step - 1.0).abs() > 1e-9 || m < 1.0 {
        return Err(SearchError::StepNotDivisor(step));
    }
    Ok(m as usize)
}

/// All compositions of `total` into `parts` nonnegative integers, ascending
/// lexicographic order.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; parts];
    cur[parts - 1] = total;
    loop {
        out.push(cur.clone());
        let Some(j) = (0..parts).rev().find(|&i| cur[i] > 0) else {
            break;
        };
        if j == 0 {
            break;
        }
        cur[j - 1] += 1;
        let rest = cur[j] - 1;
        cur[j] = 0;
        cur[parts - 1] += rest;
    }
    out
}

/// Binomial coefficient in u128, saturating.
pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Number of distinct rows a grid at `step` admits for `cols` columns.
pub(crate) fn rows_per_grid(cols: usize, step: f64) -> Result<u128, SearchError> {
    let m = levels_for_step(step)?;
    Ok(binomial((m + cols - 1) as u64, (cols - 1) as u64))
}

/// Streaming enumeration of every row-stochastic `rows x cols` table whose
/// entries are multiples of `step`: the composition list per row, crossed over
/// rows by an odometer. Deterministic order.
pub struct GridTables {
    rows: usize,
    cols: usize,
    row_values: Vec<Vec<f64>>,
    state: Vec<usize>,
    done: bool,
}

impl GridTables {
    pub fn new(rows: usize, cols: usize, step: f64) -> Result<Self, SearchError> {
        if rows == 0 || cols == 0 {
            return Err(SearchError::StepNotDivisor(step));
        }
        let m = levels_for_step(step)?;
        let row_values: Vec<Vec<f64>> = compositions(m, cols)
            .into_iter()
            .map(|c| c.iter().map(|&j| j as f64 / m as f64).collect())
            .collect();
        Ok(Self {
            rows,
            cols,
            row_values,
            state: vec![0; rows],
            done: false,
        })
    }

    /// Total number of tables this iterator will yield.
    pub fn predicted_count(&self) -> u128 {
        (self.row_values.len() as u128).saturating_pow(self.rows as u32)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Random access into the enumeration order: the table at `index`, or
    /// `None` past the end. `table_at(k)` equals the k-th iterator item.
    pub fn table_at(&self, index: u128) -> Option<Vec<f64>> {
        if index >= self.predicted_count() {
            return None;
        }
        let base = self.row_values.len() as u128;
        let mut digits = vec![0usize; self.rows];
        let mut rest = index;
        for r in (0..self.rows).rev() {
            digits[r] = (rest % base) as usize;
            rest /= base;
        }
        let mut table = Vec::with_capacity(self.rows * self.cols);
        for &d in &digits {
            table.extend_from_slice(&self.row_values[d]);
        }
        Some(table)
    }
}

impl Iterator for GridTables {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.done {
            return None;
        }
        let mut table = Vec::with_capacity(self.rows * self.cols);
        for &choice in &self.state {
            table.extend_from_slice(&self.row_values[choice]);
        }
        // odometer over per-row composition choices, last row fastest
        let mut carry = true;
        for r in (0..self.rows).rev() {
            self.state[r] += 1;
            if self.state[r] < self.row_values.len() {
                carry = false;
                break;
            }
            self.state[r] = 0;
        }
        if carry {
            self.done = true;
        }
        Some(table)
    }
}

/// Spec-facing constructor: every row-stochastic table on the step grid.
pub fn grid_policies(
    row_count: usize,
    column_count: usize,
    step: f64,
) -> Result<GridTables, SearchError> {
    GridTables::new(row_count, column_count, step)
}

/// Grid tables wrapped as conditionals over the given axes.
pub fn grid_conditionals(
    given_axes: Vec<FiniteAlphabet>,
    target_axes: Vec<FiniteAlphabet>,
    step: f64,
) -> Result<impl Iterator<Item = ConditionalPMF>, SearchError> {
    let rows: usize = given_axes.iter().map(|a| a.len()).product();
    let cols: usize = target_axes.iter().map(|a| a.len()).product();
    let tables = GridTables::new(rows, cols, step)?;
    Ok(tables.map(move |t| {
        ConditionalPMF::from_rows(given_axes.clone(), target_axes.clone(), t)
            .expect("grid rows are stochastic")
    }))
}

/// One exponential draw, rejecting the measure-zero zero sample.
fn exp_draw(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return -u.ln();
        }
    }
}

/// A `rows x cols` table with each row drawn uniformly from the simplex
/// (normalized independent exponential draws).
pub fn sample_rows(rows: usize, cols: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let draws: Vec<f64> = (0..cols).map(|_| exp_draw(rng)).collect();
        let total: f64 = draws.iter().sum();
        out.extend(draws.into_iter().map(|d| d / total));
    }
    out
}

/// Uniform-simplex conditional over the given axes.
pub fn sample_policy(
    given_axes: Vec<FiniteAlphabet>,
    target_axes: Vec<FiniteAlphabet>,
    rng: &mut impl Rng,
) -> ConditionalPMF {
    let rows: usize = given_axes.iter().map(|a| a.len()).product();
    let cols: usize = target_axes.iter().map(|a| a.len()).product();
    let table = sample_rows(rows, cols, rng);
    ConditionalPMF::from_rows(given_axes, target_axes, table)
        .expect("sampled rows are stochastic")
}

use super::SimError;
use crate::prob::JointPMF;
use rand::Rng;

/// Block length and slack of a strong-typicality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalityParams {
    pub n: usize,
    pub epsilon: f64,
}

impl TypicalityParams {
    pub fn new(n: usize, epsilon: f64) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::BadConfig("block length must be at least 1"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(SimError::BadConfig("epsilon must lie in (0, 1)"));
        }
        Ok(Self { n, epsilon })
    }
}

/// Joint symbol counts of a tuple of aligned sequences, one per axis of
/// `dims`; `out` is cleared and sized to the cell count.
pub(crate) fn joint_counts(
    seqs: &[&[u8]],
    dims: &[usize],
    out: &mut Vec<u32>,
) -> Result<usize, SimError> {
    if seqs.len() != dims.len() {
        return Err(SimError::AxisCount {
            expected: dims.len(),
            got: seqs.len(),
        });
    }
    let n = seqs.first().map_or(0, |s| s.len());
    if n == 0 {
        return Err(SimError::BadConfig("sequences must be non-empty"));
    }
    for (axis, s) in seqs.iter().enumerate() {
        if s.len() != n {
            return Err(SimError::LengthMismatch {
                expected: n,
                got: s.len(),
            });
        }
        if let Some(&sym) = s.iter().find(|&&v| v as usize >= dims[axis]) {
            return Err(SimError::SymbolOutOfRange { axis, symbol: sym });
        }
    }
    let cells: usize = dims.iter().product();
    out.clear();
    out.resize(cells, 0);
    for k in 0..n {
        let mut cell = 0usize;
        for (axis, s) in seqs.iter().enumerate() {
            cell = cell * dims[axis] + s[k] as usize;
        }
        out[cell] += 1;
    }
    Ok(n)
}

/// Strong epsilon-typicality: every joint cell `v` satisfies
/// `|N(v)/n - P(v)| < epsilon / cells` and `N(v) = 0` wherever `P(v) = 0`.
pub fn is_typical(seqs: &[&[u8]], pmf: &JointPMF, epsilon: f64) -> Result<bool, SimError> {
    let dims = pmf.dims();
    let mut counts = Vec::new();
    let n = joint_counts(seqs, &dims, &mut counts)?;
    let slack = epsilon / pmf.len() as f64;
    Ok(counts_typical(&counts, pmf.weights(), n, slack))
}

fn counts_typical(counts: &[u32], weights: &[f64], n: usize, slack: f64) -> bool {
    counts.iter().zip(weights).all(|(&c, &p)| {
        if p == 0.0 {
            c == 0
        } else {
            (c as f64 / n as f64 - p).abs() < slack
        }
    })
}

/// Precomputed integer windows equivalent to the typicality predicate for a
/// fixed `(pmf, n, epsilon)`: cell counts must land in `[lo, hi]` (an empty
/// window is encoded as `lo > hi`). Windows are derived by evaluating the
/// exact float predicate, so they match [`is_typical`] bit for bit.
#[derive(Debug, Clone)]
pub(crate) struct CountBounds {
    lo: Vec<u32>,
    hi: Vec<u32>,
}

impl CountBounds {
    pub(crate) fn new(pmf: &JointPMF, n: usize, epsilon: f64) -> Self {
        let slack = epsilon / pmf.len() as f64;
        let mut lo = Vec::with_capacity(pmf.len());
        let mut hi = Vec::with_capacity(pmf.len());
        for &p in pmf.weights() {
            if p == 0.0 {
                lo.push(0);
                hi.push(0);
                continue;
            }
            let admissible =
                |c: u32| -> bool { (c as f64 / n as f64 - p).abs() < slack };
            let first = (0..=n as u32).find(|&c| admissible(c));
            match first {
                Some(f) => {
                    let last = (f..=n as u32).take_while(|&c| admissible(c)).last().unwrap();
                    lo.push(f);
                    hi.push(last);
                }
                None => {
                    lo.push(1);
                    hi.push(0);
                }
            }
        }
        Self { lo, hi }
    }

    pub(crate) fn check(&self, counts: &[u32]) -> bool {
        counts
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&c, (&lo, &hi))| c >= lo && c <= hi)
    }

    pub(crate) fn cell(&self, idx: usize) -> (u32, u32) {
        (self.lo[idx], self.hi[idx])
    }

    /// True when no count vector can satisfy the windows at all: some cell
    /// window is empty, or the windows cannot add up to `n`. Typicality
    /// probabilities against such windows are exactly zero.
    pub(crate) fn impossible(&self, n: usize) -> bool {
        if self.lo.iter().zip(&self.hi).any(|(&lo, &hi)| lo > hi) {
            return true;
        }
        let min_total: u64 = self.lo.iter().map(|&v| v as u64).sum();
        let max_total: u64 = self.hi.iter().map(|&v| v as u64).sum();
        (n as u64) < min_total || (n as u64) > max_total
    }
}

/// Draw one symbol tuple per position i.i.d. from `pmf` until the sequence
/// tuple is typical; rejection keeps the law i.i.d.-conditioned-on-typical
/// rather than exactly uniform over the typical set.
pub fn sample_typical(
    pmf: &JointPMF,
    n: usize,
    epsilon: f64,
    rng: &mut impl Rng,
    max_tries: usize,
) -> Result<Vec<Vec<u8>>, SimError> {
    TypicalityParams::new(n, epsilon)?;
    if max_tries == 0 {
        return Err(SimError::BadConfig("max_tries must be at least 1"));
    }
    let sampler = TupleSampler::new(pmf);
    let bounds = CountBounds::new(pmf, n, epsilon);
    sample_typical_with(&sampler, &bounds, pmf.axis_count(), n, rng, max_tries)
}

/// Rejection loop over a prebuilt sampler and bounds (the hot path used by
/// codebook construction).
pub(crate) fn sample_typical_with(
    sampler: &TupleSampler,
    bounds: &CountBounds,
    axis_count: usize,
    n: usize,
    rng: &mut impl Rng,
    max_tries: usize,
) -> Result<Vec<Vec<u8>>, SimError> {
    let mut seqs = vec![vec![0u8; n]; axis_count];
    let mut counts = vec![0u32; sampler.cells()];
    let mut tuple = vec![0u8; axis_count];
    for _ in 0..max_tries {
        counts.iter_mut().for_each(|c| *c = 0);
        for k in 0..n {
            let cell = sampler.sample_into(rng, &mut tuple);
            counts[cell] += 1;
            for (axis, &sym) in tuple.iter().enumerate() {
                seqs[axis][k] = sym;
            }
        }
        if bounds.check(&counts) {
            return Ok(seqs);
        }
    }
    Err(SimError::TypicalSetEmptyOrRare { tries: max_tries })
}

/// Exact uniform draw from the typical set by full enumeration; only
/// practical for short blocks over small alphabets (`cells^n <= 2^22`).
pub fn sample_typical_exact(
    pmf: &JointPMF,
    n: usize,
    epsilon: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<u8>>, SimError> {
    let all = enumerate_typical(pmf, n, epsilon)?;
    if all.is_empty() {
        return Err(SimError::TypicalSetEmptyOrRare { tries: 0 });
    }
    let pick = &all[rng.gen_range(0..all.len())];
    Ok(split_cells(pick, &pmf.dims()))
}

/// All typical cell-sequences, enumerated exhaustively.
pub(crate) fn enumerate_typical(
    pmf: &JointPMF,
    n: usize,
    epsilon: f64,
) -> Result<Vec<Vec<u8>>, SimError> {
    TypicalityParams::new(n, epsilon)?;
    let cells = pmf.len();
    if (cells as f64).powi(n as i32) > (1u64 << 22) as f64 {
        return Err(SimError::TooLargeToEnumerate);
    }
    let bounds = CountBounds::new(pmf, n, epsilon);
    let mut out = Vec::new();
    let mut seq = vec![0u8; n];
    let mut counts = vec![0u32; cells];
    counts[0] = n as u32;
    loop {
        if bounds.check(&counts) {
            out.push(seq.clone());
        }
        // odometer over cell sequences, last position fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            counts[seq[pos] as usize] -= 1;
            if (seq[pos] as usize) + 1 < cells {
                seq[pos] += 1;
                counts[seq[pos] as usize] += 1;
                break;
            }
            seq[pos] = 0;
            counts[0] += 1;
        }
    }
}

fn split_cells(cell_seq: &[u8], dims: &[usize]) -> Vec<Vec<u8>> {
    let mut seqs = vec![vec![0u8; cell_seq.len()]; dims.len()];
    for (k, &cell) in cell_seq.iter().enumerate() {
        let mut rest = cell as usize;
        for axis in (0..dims.len()).rev() {
            seqs[axis][k] = (rest % dims[axis]) as u8;
            rest /= dims[axis];
        }
    }
    seqs
}

/// Exact typical-set size via type enumeration: sum of multinomial
/// coefficients over all count vectors inside the typicality windows.
/// Limited to `n <= 34` so the factorials fit in u128.
pub fn typical_count(pmf: &JointPMF, n: usize, epsilon: f64) -> Result<u128, SimError> {
    TypicalityParams::new(n, epsilon)?;
    if n > 34 {
        return Err(SimError::TooLargeToEnumerate);
    }
    let bounds = CountBounds::new(pmf, n, epsilon);
    let mut fact = vec![1u128; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i as u128;
    }
    let cells = pmf.len();
    let mut total = 0u128;
    let mut assignment = vec![0u32; cells];
    fn recurse(
        cell: usize,
        remaining: u32,
        cells: usize,
        bounds: &CountBounds,
        assignment: &mut [u32],
        fact: &[u128],
        n: usize,
        total: &mut u128,
    ) {
        if cell == cells {
            if remaining == 0 {
                let mut ways = fact[n];
                for &c in assignment.iter() {
                    ways /= fact[c as usize];
                }
                *total += ways;
            }
            return;
        }
        let (lo, hi) = bounds.cell(cell);
        if lo > hi {
            return;
        }
        for c in lo..=hi.min(remaining) {
            assignment[cell] = c;
            recurse(cell + 1, remaining - c, cells, bounds, assignment, fact, n, total);
        }
        assignment[cell] = 0;
    }
    recurse(0, n as u32, cells, &bounds, &mut assignment, &fact, n, &mut total);
    Ok(total)
}

/// Flat categorical sampler over the cells of a joint PMF, decomposing each
/// draw into one symbol per axis.
pub(crate) struct TupleSampler {
    cum: Vec<f64>,
    dims: Vec<usize>,
}

impl TupleSampler {
    pub(crate) fn new(pmf: &JointPMF) -> Self {
        let mut cum = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for &w in pmf.weights() {
            acc += w;
            cum.push(acc);
        }
        if let Some(last) = cum.last_mut() {
            *last = 1.0;
        }
        Self {
            cum,
            dims: pmf.dims(),
        }
    }

    pub(crate) fn cells(&self) -> usize {
        self.cum.len()
    }

    /// Sample one cell, writing its per-axis symbols into `tuple`; returns
    /// the flat cell index.
    pub(crate) fn sample_into(&self, rng: &mut impl Rng, tuple: &mut [u8]) -> usize {
        let u: f64 = rng.gen();
        let cell = self.cum.partition_point(|&c| c <= u).min(self.cum.len() - 1);
        let mut rest = cell;
        for axis in (0..self.dims.len()).rev() {
            tuple[axis] = (rest % self.dims[axis]) as u8;
            rest /= self.dims[axis];
        }
        cell
    }
}

/// Per-row categorical sampler for a conditional distribution.
#[derive(Debug, Clone)]
pub(crate) struct RowSampler {
    cum: Vec<f64>,
    cols: usize,
    defined: Vec<bool>,
}

impl RowSampler {
    pub(crate) fn new(cond: &crate::prob::ConditionalPMF) -> Self {
        let (rows, cols) = (cond.given_len(), cond.target_len());
        let mut cum = vec![0.0; rows * cols];
        let mut defined = vec![false; rows];
        for g in 0..rows {
            if let Some(row) = cond.row(g) {
                defined[g] = true;
                let mut acc = 0.0;
                for (t, &w) in row.iter().enumerate() {
                    acc += w;
                    cum[g * cols + t] = acc;
                }
                cum[g * cols + cols - 1] = 1.0;
            }
        }
        Self { cum, cols, defined }
    }

    pub(crate) fn sample(&self, row: usize, rng: &mut impl Rng) -> Result<usize, SimError> {
        if !self.defined[row] {
            return Err(SimError::UndefinedRow { given: row });
        }
        let u: f64 = rng.gen();
        let slice = &self.cum[row * self.cols..(row + 1) * self.cols];
        Ok(slice.partition_point(|&c| c <= u).min(self.cols - 1))
    }
}

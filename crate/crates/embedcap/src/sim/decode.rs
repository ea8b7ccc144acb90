use super::typicality::CountBounds;
use super::{Codebook, Codebooks, SimContext, SimError};
use crate::prob::JointPMF;

/// What the joint-typicality decoder concluded. `NoneTypical` and
/// `Ambiguous` both count as decoding errors in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(usize, usize),
    NoneTypical,
    Ambiguous,
}

/// Scan all codeword pairs across both codebooks for joint typicality of
/// `(t1, t2, y)` under `pmf` (the `(T1, T2, Y)` marginal of the composed
/// joint). Returns the message pair when exactly one is consistent.
///
/// The scan runs over distinct codeword pairs, `O(d1 d2 n)` worst case, with
/// a popcount path when every alphabet is binary and `n <= 64`.
pub fn decode(
    y_seq: &[u8],
    books: &Codebooks,
    pmf: &JointPMF,
    epsilon: f64,
) -> Result<DecodeOutcome, SimError> {
    if pmf.axis_count() != 3 {
        return Err(SimError::AxisCount {
            expected: 3,
            got: pmf.axis_count(),
        });
    }
    let d = pmf.dims();
    let dims = [d[0], d[1], d[2]];
    let n = y_seq.len();
    let bounds = CountBounds::new(pmf, n, epsilon);
    if bounds.impossible(n) {
        return Ok(DecodeOutcome::NoneTypical);
    }
    let scan = PairScan::new(&books.user1, &books.user2, y_seq, dims, &bounds, n)?;
    Ok(scan.decode())
}

pub(crate) struct PairScan<'a> {
    b1: &'a Codebook,
    b2: &'a Codebook,
    bounds: &'a CountBounds,
    dims: [usize; 3],
    n: usize,
    y: &'a [u8],
    bits: Option<BitScan>,
}

/// Precomputed u64 masks for the all-binary case: the eight joint counts of
/// a pair reduce to two popcounts plus inclusion-exclusion.
struct BitScan {
    m1: Vec<u64>,
    p1: Vec<i64>,
    p1y: Vec<i64>,
    m2: Vec<u64>,
    p2: Vec<i64>,
    p2y: Vec<i64>,
    my: u64,
    py: i64,
}

fn word_mask(word: &[u8]) -> u64 {
    word.iter()
        .enumerate()
        .fold(0u64, |m, (k, &s)| m | ((s as u64 & 1) << k))
}

impl<'a> PairScan<'a> {
    pub(crate) fn new(
        b1: &'a Codebook,
        b2: &'a Codebook,
        y: &'a [u8],
        dims: [usize; 3],
        bounds: &'a CountBounds,
        n: usize,
    ) -> Result<Self, SimError> {
        if y.len() != n {
            return Err(SimError::LengthMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if let Some(&sym) = y.iter().find(|&&s| s as usize >= dims[2]) {
            return Err(SimError::SymbolOutOfRange {
                axis: 2,
                symbol: sym,
            });
        }
        for (book, nt) in [(b1, dims[0]), (b2, dims[1])] {
            for w in book.distinct_words() {
                if w.len() != n {
                    return Err(SimError::LengthMismatch {
                        expected: n,
                        got: w.len(),
                    });
                }
                if let Some(&sym) = w.iter().find(|&&s| s as usize >= nt) {
                    return Err(SimError::SymbolOutOfRange {
                        axis: 0,
                        symbol: sym,
                    });
                }
            }
        }
        let bits = if dims == [2, 2, 2] && n <= 64 {
            let my = word_mask(y);
            let build = |book: &Codebook| -> (Vec<u64>, Vec<i64>, Vec<i64>) {
                let masks: Vec<u64> = book.distinct_words().iter().map(|w| word_mask(w)).collect();
                let pops = masks.iter().map(|m| m.count_ones() as i64).collect();
                let pops_y = masks.iter().map(|m| (m & my).count_ones() as i64).collect();
                (masks, pops, pops_y)
            };
            let (m1, p1, p1y) = build(b1);
            let (m2, p2, p2y) = build(b2);
            Some(BitScan {
                m1,
                p1,
                p1y,
                m2,
                p2,
                p2y,
                my,
                py: my.count_ones() as i64,
            })
        } else {
            None
        };
        Ok(Self {
            b1,
            b2,
            bounds,
            dims,
            n,
            y,
            bits,
        })
    }

    /// Joint typicality of distinct pair `(i, j)` with the received word.
    pub(crate) fn pair_typical(&self, i: usize, j: usize, buf: &mut Vec<u32>) -> bool {
        if let Some(b) = &self.bits {
            let q = (b.m1[i] & b.m2[j]).count_ones() as i64;
            let qy = (b.m1[i] & b.m2[j] & b.my).count_ones() as i64;
            let (p1, p1y) = (b.p1[i], b.p1y[i]);
            let (p2, p2y) = (b.p2[j], b.p2y[j]);
            let n = self.n as i64;
            let counts = [
                n - p1 - p2 - b.py + q + p1y + p2y - qy,
                b.py - p1y - p2y + qy,
                p2 - q - p2y + qy,
                p2y - qy,
                p1 - q - p1y + qy,
                p1y - qy,
                q - qy,
                qy,
            ];
            buf.clear();
            buf.extend(counts.iter().map(|&c| c as u32));
            return self.bounds.check(buf);
        }
        let t1 = &self.b1.distinct_words()[i];
        let t2 = &self.b2.distinct_words()[j];
        let cells = self.dims[0] * self.dims[1] * self.dims[2];
        buf.clear();
        buf.resize(cells, 0);
        for k in 0..self.n {
            let cell = ((t1[k] as usize) * self.dims[1] + t2[k] as usize) * self.dims[2]
                + self.y[k] as usize;
            buf[cell] += 1;
        }
        self.bounds.check(buf)
    }

    fn decode(&self) -> DecodeOutcome {
        let mut buf = Vec::new();
        let mut found: Option<(usize, usize)> = None;
        for i in 0..self.b1.distinct_words().len() {
            for j in 0..self.b2.distinct_words().len() {
                if !self.pair_typical(i, j, &mut buf) {
                    continue;
                }
                for w1 in BitIter::new(self.b1.bin_set(i as u32)) {
                    for w2 in BitIter::new(self.b2.bin_set(j as u32)) {
                        match found {
                            None => found = Some((w1, w2)),
                            Some(p) if p != (w1, w2) => return DecodeOutcome::Ambiguous,
                            _ => {}
                        }
                    }
                }
            }
        }
        match found {
            Some((w1, w2)) => DecodeOutcome::Decoded(w1, w2),
            None => DecodeOutcome::NoneTypical,
        }
    }
}

/// Full-scan classification of one trial: the decoder outcome plus the
/// confusion events relative to the transmitted messages and codewords.
pub(crate) struct TrialScan {
    pub outcome: DecodeOutcome,
    /// `[E1, E2, E3, E4]`.
    pub e: [bool; 4],
    /// Some typical pair realizes the true message pair (not necessarily via
    /// the transmitted codeword indices).
    pub true_pair_reachable: bool,
}

pub(crate) fn scan_trial(
    ctx: &SimContext,
    books: &Codebooks,
    y: &[u8],
    w1: usize,
    w2: usize,
    sent1: u32,
    sent2: u32,
) -> TrialScan {
    let dims = [ctx.dims.nt1, ctx.dims.nt2, ctx.dims.ny];
    if ctx.bounds_t1t2y.impossible(ctx.n) {
        // nothing can be typical: the decoder declares failure and the only
        // confusion event that fires is the transmitted pair being atypical
        return TrialScan {
            outcome: DecodeOutcome::NoneTypical,
            e: [true, false, false, false],
            true_pair_reachable: false,
        };
    }
    let scan = PairScan::new(
        &books.user1,
        &books.user2,
        y,
        dims,
        &ctx.bounds_t1t2y,
        ctx.n,
    )
    .expect("trial sequences are well formed");
    let mut buf = Vec::new();

    let e1 = !scan.pair_typical(sent1 as usize, sent2 as usize, &mut buf);
    let mut e2 = false;
    let mut e3 = false;
    let mut e4 = false;
    let mut reachable = false;
    let mut found: Option<(usize, usize)> = None;
    let mut ambiguous = false;
    for i in 0..books.user1.distinct_words().len() {
        for j in 0..books.user2.distinct_words().len() {
            if !scan.pair_typical(i, j, &mut buf) {
                continue;
            }
            let s1 = books.user1.bin_set(i as u32);
            let s2 = books.user2.bin_set(j as u32);
            let has1 = s1[w1 / 64] >> (w1 % 64) & 1 == 1;
            let has2 = s2[w2 / 64] >> (w2 % 64) & 1 == 1;
            let count1: u32 = s1.iter().map(|w| w.count_ones()).sum();
            let count2: u32 = s2.iter().map(|w| w.count_ones()).sum();
            let other1 = count1 > has1 as u32;
            let other2 = count2 > has2 as u32;
            reachable |= has1 && has2;
            e2 |= other1 && has2;
            e3 |= has1 && other2;
            e4 |= other1 && other2;
            for b1 in BitIter::new(s1) {
                for b2 in BitIter::new(s2) {
                    match found {
                        None => found = Some((b1, b2)),
                        Some(p) if p != (b1, b2) => ambiguous = true,
                        _ => {}
                    }
                }
            }
            if ambiguous && reachable && e2 && e3 && e4 {
                break;
            }
        }
        if ambiguous && reachable && e2 && e3 && e4 {
            break;
        }
    }
    let outcome = if ambiguous {
        DecodeOutcome::Ambiguous
    } else {
        match found {
            Some((a, b)) => DecodeOutcome::Decoded(a, b),
            None => DecodeOutcome::NoneTypical,
        }
    };
    TrialScan {
        outcome,
        e: [e1, e2, e3, e4],
        true_pair_reachable: reachable,
    }
}

/// Iterator over set-bit positions of a bitset stored as u64 words.
struct BitIter<'a> {
    words: &'a [u64],
    word: u64,
    base: usize,
}

impl<'a> BitIter<'a> {
    fn new(words: &'a [u64]) -> Self {
        Self {
            words,
            word: if words.is_empty() { 0 } else { words[0] },
            base: 0,
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.word != 0 {
                let bit = self.word.trailing_zeros() as usize;
                self.word &= self.word - 1;
                return Some(self.base * 64 + bit);
            }
            self.base += 1;
            if self.base >= self.words.len() {
                return None;
            }
            self.word = self.words[self.base];
        }
    }
}

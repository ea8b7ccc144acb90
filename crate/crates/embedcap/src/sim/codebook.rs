use super::typicality::{sample_typical_with, CountBounds, TupleSampler};
use super::{SimContext, SimError, SimulationConfig};
use rand::Rng;
use std::collections::HashMap;

/// One user's codebook: `message_count` bins of `list_size` codewords each,
/// stored deduplicated. Repeated draws of the same typical sequence are
/// common at desk scale, and the decoder scans distinct pairs only.
#[derive(Debug, Clone)]
pub struct Codebook {
    bins: Vec<Vec<u32>>,
    distinct: Vec<Vec<u8>>,
    bin_sets: Vec<Vec<u64>>,
}

impl Codebook {
    fn build(
        messages: u64,
        list_size: u64,
        sampler: &TupleSampler,
        bounds: &CountBounds,
        n: usize,
        max_tries: usize,
        rng: &mut impl Rng,
    ) -> Result<Self, SimError> {
        let messages = messages as usize;
        let list_size = list_size as usize;
        let mut intern: HashMap<Vec<u8>, u32> = HashMap::new();
        let mut distinct: Vec<Vec<u8>> = Vec::new();
        let mut bins = Vec::with_capacity(messages);
        for _ in 0..messages {
            let mut bin = Vec::with_capacity(list_size);
            for _ in 0..list_size {
                let mut seqs = sample_typical_with(sampler, bounds, 1, n, rng, max_tries)?;
                let seq = seqs.pop().expect("single-axis draw");
                let id = match intern.get(&seq) {
                    Some(&id) => id,
                    None => {
                        let id = distinct.len() as u32;
                        intern.insert(seq.clone(), id);
                        distinct.push(seq);
                        id
                    }
                };
                bin.push(id);
            }
            bins.push(bin);
        }
        let bin_words = messages.div_ceil(64);
        let mut bin_sets = vec![vec![0u64; bin_words]; distinct.len()];
        for (w, bin) in bins.iter().enumerate() {
            for &id in bin {
                bin_sets[id as usize][w / 64] |= 1u64 << (w % 64);
            }
        }
        Ok(Self {
            bins,
            distinct,
            bin_sets,
        })
    }

    pub fn message_count(&self) -> usize {
        self.bins.len()
    }

    pub fn list_size(&self) -> usize {
        self.bins.first().map_or(0, Vec::len)
    }

    /// Codeword `l` of bin `w`.
    pub fn word(&self, w: usize, l: usize) -> &[u8] {
        &self.distinct[self.bins[w][l] as usize]
    }

    pub(crate) fn word_id(&self, w: usize, l: usize) -> u32 {
        self.bins[w][l]
    }

    pub(crate) fn bin(&self, w: usize) -> &[u32] {
        &self.bins[w]
    }

    pub(crate) fn distinct_words(&self) -> &[Vec<u8>] {
        &self.distinct
    }

    /// Bitset of bins containing a distinct codeword.
    pub(crate) fn bin_set(&self, id: u32) -> &[u64] {
        &self.bin_sets[id as usize]
    }
}

/// Both users' codebooks.
#[derive(Debug, Clone)]
pub struct Codebooks {
    pub user1: Codebook,
    pub user2: Codebook,
}

/// Draw both codebooks: for every message bin, `L_i` codewords sampled from
/// the typical set of the auxiliary marginal `T_i` of the composed joint,
/// with `L_i = ceil(2^(n [I(Ui;Ti) + 4 eps]))`.
pub fn build_codebooks(
    config: &SimulationConfig,
    rng: &mut impl Rng,
) -> Result<Codebooks, SimError> {
    let ctx = SimContext::new(config)?;
    build_with(&ctx, config, rng)
}

pub(crate) fn build_with(
    ctx: &SimContext,
    config: &SimulationConfig,
    rng: &mut impl Rng,
) -> Result<Codebooks, SimError> {
    let s1 = TupleSampler::new(&ctx.t1_marginal);
    let s2 = TupleSampler::new(&ctx.t2_marginal);
    let b1 = CountBounds::new(&ctx.t1_marginal, ctx.n, ctx.epsilon);
    let b2 = CountBounds::new(&ctx.t2_marginal, ctx.n, ctx.epsilon);
    let user1 = Codebook::build(ctx.m1, ctx.l1, &s1, &b1, ctx.n, config.sample_max_tries, rng)?;
    let user2 = Codebook::build(ctx.m2, ctx.l2, &s2, &b2, ctx.n, config.sample_max_tries, rng)?;
    Ok(Codebooks { user1, user2 })
}

use super::typicality::{joint_counts, RowSampler};
use super::{Codebooks, SimContext, SimError, SimulationConfig};
use std::collections::HashMap;
use crate::prob::ConditionalPMF;
use crate::region::EncoderPolicy;
use rand::Rng;

/// Pre-encoder output: the selected auxiliary codeword, its index within the
/// message bin, and whether the encoder fell back to the first codeword.
#[derive(Debug, Clone)]
pub struct PreEncoded {
    pub codeword: Vec<u8>,
    pub index: usize,
    pub fallback: bool,
}

/// The Markov pre-encoder: scan the message bin in order and return the
/// first codeword that is jointly typical with the covertext and whose
/// estimated coupling probability clears the threshold (`1 - mu` for user 1
/// against the other covertext-auxiliary pair, `1 - nu` for user 2 against
/// the whole user-1 encoder). With no qualifying codeword, the first
/// codeword is returned and flagged as a fallback.
pub fn pre_encode(
    config: &SimulationConfig,
    books: &Codebooks,
    user: usize,
    w: usize,
    u_seq: &[u8],
    rng: &mut impl Rng,
) -> Result<PreEncoded, SimError> {
    let ctx = SimContext::new(config)?;
    pre_encode_with(&ctx, config, books, user, w, u_seq, rng)
}

pub(crate) fn pre_encode_with(
    ctx: &SimContext,
    config: &SimulationConfig,
    books: &Codebooks,
    user: usize,
    w: usize,
    u_seq: &[u8],
    rng: &mut impl Rng,
) -> Result<PreEncoded, SimError> {
    if u_seq.len() != ctx.n {
        return Err(SimError::LengthMismatch {
            expected: ctx.n,
            got: u_seq.len(),
        });
    }
    let (book, pair_dims, pair_bounds, threshold) = match user {
        1 => (
            &books.user1,
            [ctx.dims.nu1, ctx.dims.nt1],
            &ctx.bounds_u1t1,
            1.0 - config.mu,
        ),
        2 => (
            &books.user2,
            [ctx.dims.nu2, ctx.dims.nt2],
            &ctx.bounds_u2t2,
            1.0 - config.nu,
        ),
        _ => return Err(SimError::BadConfig("user must be 1 or 2")),
    };
    // When the four-way typicality windows admit no count vector at all, the
    // coupling probability is exactly zero for every codeword, so the whole
    // scan would fall through; skip it.
    if ctx.bounds_quad.impossible(ctx.n) && threshold > 0.0 {
        return Ok(PreEncoded {
            codeword: book.word(w, 0).to_vec(),
            index: 0,
            fallback: true,
        });
    }
    // Bins repeat distinct codewords; qualification depends only on (u, t),
    // so one check per distinct codeword serves every repeat. A vacuous
    // threshold (mu or nu equal to 1) reduces to the plain joint-typicality
    // search with no coupling estimate.
    let mut cache: HashMap<u32, bool> = HashMap::new();
    let mut counts = Vec::new();
    for (l, &id) in book.bin(w).iter().enumerate() {
        let qualified = match cache.get(&id) {
            Some(&q) => q,
            None => {
                let t_seq = &book.distinct_words()[id as usize];
                joint_counts(&[u_seq, t_seq], &pair_dims, &mut counts)?;
                let q = if !pair_bounds.check(&counts) {
                    false
                } else if threshold <= 0.0 {
                    true
                } else {
                    let estimate = match user {
                        1 => estimate_partner_coupling(ctx, config, u_seq, t_seq, rng)?,
                        _ => estimate_encoder_coupling(ctx, config, books, u_seq, t_seq, rng)?,
                    };
                    estimate >= threshold
                };
                cache.insert(id, q);
                q
            }
        };
        if qualified {
            return Ok(PreEncoded {
                codeword: book.distinct_words()[id as usize].clone(),
                index: l,
                fallback: false,
            });
        }
    }
    Ok(PreEncoded {
        codeword: book.word(w, 0).to_vec(),
        index: 0,
        fallback: true,
    })
}

/// Monte-Carlo estimate of a user's coupling probability for a fixed
/// covertext/codeword pair: for user 1 the chance that a fresh `(u2, t2)`
/// drawn from its conditional law lands in the jointly typical set, for
/// user 2 the analogous probability over covertexts and the whole user-1
/// encoder. `estimator_samples` in the config sets the budget.
pub fn estimate_coupling(
    config: &SimulationConfig,
    books: &Codebooks,
    user: usize,
    u_seq: &[u8],
    t_seq: &[u8],
    rng: &mut impl Rng,
) -> Result<f64, SimError> {
    let ctx = SimContext::new(config)?;
    match user {
        1 => estimate_partner_coupling(&ctx, config, u_seq, t_seq, rng),
        2 => estimate_encoder_coupling(&ctx, config, books, u_seq, t_seq, rng),
        _ => Err(SimError::BadConfig("user must be 1 or 2")),
    }
}

/// Monte-Carlo estimate of user 1's coupling probability: the chance that a
/// fresh `(u2, t2)` drawn from the conditional law given `(u1, t1)` lands in
/// the jointly typical set.
pub(crate) fn estimate_partner_coupling(
    ctx: &SimContext,
    config: &SimulationConfig,
    u1: &[u8],
    t1: &[u8],
    rng: &mut impl Rng,
) -> Result<f64, SimError> {
    let n = ctx.n;
    let quad_cells = ctx.dims.nu1 * ctx.dims.nt1 * ctx.dims.nu2 * ctx.dims.nt2;
    let mut counts = vec![0u32; quad_cells];
    let mut hits = 0usize;
    for _ in 0..config.estimator_samples {
        counts.iter_mut().for_each(|c| *c = 0);
        for k in 0..n {
            let row = (u1[k] as usize) * ctx.dims.nt1 + t1[k] as usize;
            let other = ctx.samp_u2t2_given_u1t1.sample(row, rng)?;
            let (u2s, t2s) = (other / ctx.dims.nt2, other % ctx.dims.nt2);
            let cell = (((u1[k] as usize) * ctx.dims.nt1 + t1[k] as usize) * ctx.dims.nu2 + u2s)
                * ctx.dims.nt2
                + t2s;
            counts[cell] += 1;
        }
        if ctx.bounds_quad.check(&counts) {
            hits += 1;
        }
    }
    Ok(hits as f64 / config.estimator_samples as f64)
}

/// Monte-Carlo estimate of user 2's coupling probability: draw `u1` from its
/// conditional law given `(u2, t2)`, run the full user-1 pre-encoder on a
/// uniform message, and test the four-way typicality of the result.
pub(crate) fn estimate_encoder_coupling(
    ctx: &SimContext,
    config: &SimulationConfig,
    books: &Codebooks,
    u2: &[u8],
    t2: &[u8],
    rng: &mut impl Rng,
) -> Result<f64, SimError> {
    let n = ctx.n;
    let quad_dims = [ctx.dims.nu1, ctx.dims.nt1, ctx.dims.nu2, ctx.dims.nt2];
    let mut counts = Vec::new();
    let mut u1 = vec![0u8; n];
    let mut hits = 0usize;
    for _ in 0..config.estimator_samples {
        for k in 0..n {
            let row = (u2[k] as usize) * ctx.dims.nt2 + t2[k] as usize;
            u1[k] = ctx.samp_u1_given_u2t2.sample(row, rng)? as u8;
        }
        let w1 = rng.gen_range(0..ctx.m1) as usize;
        let enc = pre_encode_with(ctx, config, books, 1, w1, &u1, rng)?;
        joint_counts(&[&u1, &enc.codeword, u2, t2], &quad_dims, &mut counts)?;
        if ctx.bounds_quad.check(&counts) {
            hits += 1;
        }
    }
    Ok(hits as f64 / config.estimator_samples as f64)
}

/// Componentwise stegotext draw from `P(Xi | Ui, Ti)` induced by the policy.
pub fn stego(
    u_seq: &[u8],
    t_seq: &[u8],
    user: usize,
    policy: &EncoderPolicy,
    rng: &mut impl Rng,
) -> Result<Vec<u8>, SimError> {
    if u_seq.len() != t_seq.len() {
        return Err(SimError::LengthMismatch {
            expected: u_seq.len(),
            got: t_seq.len(),
        });
    }
    let cond = policy.user(user);
    let (nt, nx) = (cond.target_axes()[0].len(), cond.target_axes()[1].len());
    // P(x | u, t) from the per-user joint conditional P(t, x | u)
    let mut rows = vec![0.0; cond.given_len() * nt * nx];
    let mut defined = vec![false; cond.given_len() * nt];
    for g in 0..cond.given_len() {
        let Some(row) = cond.row(g) else { continue };
        for t in 0..nt {
            let mass: f64 = (0..nx).map(|x| row[t * nx + x]).sum();
            if mass > 0.0 {
                defined[g * nt + t] = true;
                for x in 0..nx {
                    rows[(g * nt + t) * nx + x] = row[t * nx + x] / mass;
                }
            }
        }
    }
    let cond_x = ConditionalPMF::from_validated(
        vec![
            cond.given_axes()[0].clone(),
            cond.target_axes()[0].clone(),
        ],
        vec![cond.target_axes()[1].clone()],
        rows,
        defined,
    );
    let sampler = RowSampler::new(&cond_x);
    let mut out = vec![0u8; u_seq.len()];
    for k in 0..u_seq.len() {
        let row = (u_seq[k] as usize) * nt + t_seq[k] as usize;
        out[k] = sampler.sample(row, rng)? as u8;
    }
    Ok(out)
}

pub(crate) fn stego_with(
    ctx: &SimContext,
    user: usize,
    u_seq: &[u8],
    t_seq: &[u8],
    rng: &mut impl Rng,
) -> Result<Vec<u8>, SimError> {
    let (sampler, nt) = match user {
        1 => (&ctx.samp_x1_given_u1t1, ctx.dims.nt1),
        _ => (&ctx.samp_x2_given_u2t2, ctx.dims.nt2),
    };
    let mut out = vec![0u8; u_seq.len()];
    for k in 0..u_seq.len() {
        let row = (u_seq[k] as usize) * nt + t_seq[k] as usize;
        out[k] = sampler.sample(row, rng)? as u8;
    }
    Ok(out)
}

/// Memoryless attack channel: componentwise draw from `W(y | x1, x2)`.
pub fn attack(
    x1_seq: &[u8],
    x2_seq: &[u8],
    channel: &ConditionalPMF,
    rng: &mut impl Rng,
) -> Result<Vec<u8>, SimError> {
    if x1_seq.len() != x2_seq.len() {
        return Err(SimError::LengthMismatch {
            expected: x1_seq.len(),
            got: x2_seq.len(),
        });
    }
    let nx2 = channel.given_axes()[1].len();
    let sampler = RowSampler::new(channel);
    let mut out = vec![0u8; x1_seq.len()];
    for k in 0..x1_seq.len() {
        let row = (x1_seq[k] as usize) * nx2 + x2_seq[k] as usize;
        out[k] = sampler.sample(row, rng)? as u8;
    }
    Ok(out)
}

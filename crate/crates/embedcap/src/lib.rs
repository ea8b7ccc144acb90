//! Numerical inner/outer bounds for the two-user public information-embedding
//! capacity region under a multiple-access attack channel, plus a desk-scale
//! Monte-Carlo model of the underlying random-coding scheme.
//!
//! The crate is organized in four layers:
//!
//! - [`prob`]: finite alphabets, dense joint/conditional probability tensors,
//!   entropies and mutual informations (base-2 throughout).
//! - [`region`]: encoder policies, the composed system joint in the canonical
//!   [`axes`] order, rate triples, feasibility, pentagons, and convex-hull
//!   algebra in the rate plane.
//! - [`search`]: candidate-policy generation (exhaustive grids, seeded random
//!   sampling, coordinate-ascent refinement) and region assembly.
//! - [`sim`]: strong typicality, codebooks, the two-stage Markov pre-encoders,
//!   the attack channel, the joint-typicality decoder, and Monte-Carlo trial
//!   runs.
//!
//! With the default `parallel` feature, candidate batches and simulation
//! trials run on rayon; results are independent of the worker count because
//! all merging is sequential in a deterministic order.

pub mod axes;
mod exec;
pub mod oracles;
pub mod presets;
pub mod prob;
pub mod region;
pub mod search;
pub mod sim;

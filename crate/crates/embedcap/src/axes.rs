//! Canonical axis order for the full-system joint distribution.
//!
//! Every composed joint produced by this crate uses the fixed axis order
//! `(U1, T1, U2, T2, X1, X2, Y)`; these constants index into it.

pub const U1: usize = 0;
pub const T1: usize = 1;
pub const U2: usize = 2;
pub const T2: usize = 3;
pub const X1: usize = 4;
pub const X2: usize = 5;
pub const Y: usize = 6;

/// Number of axes in the full-system joint.
pub const COUNT: usize = 7;

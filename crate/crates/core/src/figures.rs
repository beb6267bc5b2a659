//! The two worked example compositions used throughout the tests and the
//! `--figure` CLI shortcut.

use crate::composition::Composition;

/// 50-term composition of 80 shown as a bar chart.
pub const FIGURE1_TERMS: [u64; 50] = [
    0, 0, 2, 3, 1, 0, 1, 5, 0, 0, 0, 3, 2, 0, 1, 1, 2, 2, 2, 0, 4, 3, 0, 0, 4, 4, 4, 4, 1, 0, 3, 1,
    5, 1, 6, 3, 3, 0, 1, 0, 0, 0, 0, 1, 0, 1, 1, 2, 1, 2,
];

/// 24-term composition with four occurrences of `e:[2,0,2]` and three of
/// `e:[0,2,0,3,1,0,2,0]`.
pub const FIGURE2_TERMS: [u64; 24] =
    [2, 0, 2, 0, 3, 1, 0, 2, 0, 2, 0, 3, 1, 0, 2, 0, 3, 1, 0, 2, 0, 2, 0, 2];

pub fn figure1() -> Composition {
    Composition::from_vec_unchecked(FIGURE1_TERMS.to_vec())
}

pub fn figure2() -> Composition {
    Composition::from_vec_unchecked(FIGURE2_TERMS.to_vec())
}

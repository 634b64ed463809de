//! Sticker permutation tables for the 3x3x3 cube.
//!
//! Sticker index = face * 9 + row * 3 + col, faces in the order
//! U, D, L, R, F, B. Each face is read head-on:
//!
//! ```text
//!            U (row 0 toward B)
//!   L (col 0 toward B)  F  R (col 0 toward F)  B (col 0 toward R)
//!            D (row 0 toward F)
//! ```
//!
//! L, F, R and B have row 0 on the U side. A cycle `[a, b, c, d]` means the
//! sticker at `a` moves to `b`, `b` to `c`, `c` to `d` and `d` back to `a`.

pub(super) type Cycle = [u8; 4];

const U: u8 = 0;
const D: u8 = 9;
const L: u8 = 18;
const R: u8 = 27;
const F: u8 = 36;
const B: u8 = 45;

/// Clockwise turn of a face's own 3x3 grid.
pub(super) const fn face_spin(base: u8) -> [Cycle; 2] {
    [
        [base, base + 2, base + 8, base + 6],
        [base + 1, base + 5, base + 7, base + 3],
    ]
}

pub(super) const U_RING: [Cycle; 3] = [
    [F, L, B, R],
    [F + 1, L + 1, B + 1, R + 1],
    [F + 2, L + 2, B + 2, R + 2],
];

pub(super) const D_RING: [Cycle; 3] = [
    [F + 6, R + 6, B + 6, L + 6],
    [F + 7, R + 7, B + 7, L + 7],
    [F + 8, R + 8, B + 8, L + 8],
];

pub(super) const R_RING: [Cycle; 3] = [
    [F + 2, U + 2, B + 6, D + 2],
    [F + 5, U + 5, B + 3, D + 5],
    [F + 8, U + 8, B, D + 8],
];

pub(super) const L_RING: [Cycle; 3] = [
    [U, F, D, B + 8],
    [U + 3, F + 3, D + 3, B + 5],
    [U + 6, F + 6, D + 6, B + 2],
];

pub(super) const F_RING: [Cycle; 3] = [
    [U + 6, R, D + 2, L + 8],
    [U + 7, R + 3, D + 1, L + 5],
    [U + 8, R + 6, D, L + 2],
];

pub(super) const B_RING: [Cycle; 3] = [
    [U + 2, L, D + 6, R + 8],
    [U + 1, L + 3, D + 7, R + 5],
    [U, L + 6, D + 8, R + 2],
];

/// Middle layer between L and R, turning like L.
pub(super) const M_RING: [Cycle; 3] = [
    [U + 1, F + 1, D + 1, B + 7],
    [U + 4, F + 4, D + 4, B + 4],
    [U + 7, F + 7, D + 7, B + 1],
];

/// Middle layer between U and D, turning like D.
pub(super) const E_RING: [Cycle; 3] = [
    [F + 3, R + 3, B + 3, L + 3],
    [F + 4, R + 4, B + 4, L + 4],
    [F + 5, R + 5, B + 5, L + 5],
];

/// Middle layer between F and B, turning like F.
pub(super) const S_RING: [Cycle; 3] = [
    [U + 3, R + 1, D + 5, L + 7],
    [U + 4, R + 4, D + 4, L + 4],
    [U + 5, R + 7, D + 3, L + 1],
];

pub(super) const FACE_BASE: [u8; 6] = [U, D, L, R, F, B];

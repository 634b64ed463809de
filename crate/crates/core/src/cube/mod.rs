//! 3x3x3 cube state and the 54-move alphabet.
//!
//! Moves are sticker permutations built once from the cycle tables in
//! `tables.rs`. Quarter turns of the six faces and three slices are the
//! primitives; half turns, inverse turns, wide turns and whole-cube
//! rotations are compositions:
//!
//! | move | composition |
//! |------|-------------|
//! | `r`  | `R M'`      |
//! | `l`  | `L M`       |
//! | `u`  | `U E'`      |
//! | `d`  | `D E`       |
//! | `f`  | `F S`       |
//! | `b`  | `B S'`      |
//! | `x`  | `R M' L'`   |
//! | `y`  | `U E' D'`   |
//! | `z`  | `F S B'`    |

mod tables;

use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::rng::SeededRandom;
use tables::Cycle;

pub const STICKERS: usize = 54;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StickerColor {
    Yellow,
    White,
    Red,
    Orange,
    Green,
    Blue,
}

impl StickerColor {
    pub const ALL: [StickerColor; 6] = [
        StickerColor::Yellow,
        StickerColor::White,
        StickerColor::Red,
        StickerColor::Orange,
        StickerColor::Green,
        StickerColor::Blue,
    ];

    pub fn letter(self) -> char {
        match self {
            StickerColor::Yellow => 'y',
            StickerColor::White => 'w',
            StickerColor::Red => 'r',
            StickerColor::Orange => 'o',
            StickerColor::Green => 'g',
            StickerColor::Blue => 'b',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.letter() == c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaceId {
    U,
    D,
    L,
    R,
    F,
    B,
}

impl FaceId {
    /// Encoding order.
    pub const ALL: [FaceId; 6] = [FaceId::U, FaceId::D, FaceId::L, FaceId::R, FaceId::F, FaceId::B];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        ['U', 'D', 'L', 'R', 'F', 'B'][self.index()]
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.letter() == c)
    }

    pub fn name(self) -> &'static str {
        ["up", "down", "left", "right", "front", "back"][self.index()]
    }

    /// Color of this face on the solved cube.
    pub fn solved_color(self) -> StickerColor {
        match self {
            FaceId::U => StickerColor::Yellow,
            FaceId::D => StickerColor::White,
            FaceId::F => StickerColor::Red,
            FaceId::B => StickerColor::Orange,
            FaceId::L => StickerColor::Green,
            FaceId::R => StickerColor::Blue,
        }
    }

    pub fn axis(self) -> CubeAxis {
        match self {
            FaceId::R | FaceId::L => CubeAxis::X,
            FaceId::U | FaceId::D => CubeAxis::Y,
            FaceId::F | FaceId::B => CubeAxis::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Turn {
    Cw,
    Ccw,
    Half,
}

impl Turn {
    pub const ALL: [Turn; 3] = [Turn::Cw, Turn::Ccw, Turn::Half];

    pub fn inverse(self) -> Turn {
        match self {
            Turn::Cw => Turn::Ccw,
            Turn::Ccw => Turn::Cw,
            Turn::Half => Turn::Half,
        }
    }

    /// Notation suffix: none, `'` or `2`.
    pub fn suffix(self) -> &'static str {
        match self {
            Turn::Cw => "",
            Turn::Ccw => "'",
            Turn::Half => "2",
        }
    }

    fn quarter_turns(self) -> usize {
        match self {
            Turn::Cw => 1,
            Turn::Half => 2,
            Turn::Ccw => 3,
        }
    }
}

/// Middle slices: M between L and R, S between F and B, E between U and D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SliceAxis {
    M,
    S,
    E,
}

impl SliceAxis {
    pub const ALL: [SliceAxis; 3] = [SliceAxis::M, SliceAxis::S, SliceAxis::E];

    pub fn letter(self) -> char {
        match self {
            SliceAxis::M => 'M',
            SliceAxis::S => 'S',
            SliceAxis::E => 'E',
        }
    }

    pub fn axis(self) -> CubeAxis {
        match self {
            SliceAxis::M => CubeAxis::X,
            SliceAxis::S => CubeAxis::Z,
            SliceAxis::E => CubeAxis::Y,
        }
    }
}

/// Whole-cube rotation axes: x follows R, y follows U, z follows F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CubeAxis {
    X,
    Y,
    Z,
}

impl CubeAxis {
    pub const ALL: [CubeAxis; 3] = [CubeAxis::X, CubeAxis::Y, CubeAxis::Z];

    pub fn letter(self) -> char {
        match self {
            CubeAxis::X => 'x',
            CubeAxis::Y => 'y',
            CubeAxis::Z => 'z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CubeMove {
    Face(FaceId, Turn),
    Wide(FaceId, Turn),
    Slice(SliceAxis, Turn),
    Rotation(CubeAxis, Turn),
}

impl CubeMove {
    pub fn turn(self) -> Turn {
        match self {
            CubeMove::Face(_, t)
            | CubeMove::Wide(_, t)
            | CubeMove::Slice(_, t)
            | CubeMove::Rotation(_, t) => t,
        }
    }

    pub fn inverse(self) -> CubeMove {
        match self {
            CubeMove::Face(f, t) => CubeMove::Face(f, t.inverse()),
            CubeMove::Wide(f, t) => CubeMove::Wide(f, t.inverse()),
            CubeMove::Slice(s, t) => CubeMove::Slice(s, t.inverse()),
            CubeMove::Rotation(a, t) => CubeMove::Rotation(a, t.inverse()),
        }
    }

    pub fn axis(self) -> CubeAxis {
        match self {
            CubeMove::Face(f, _) | CubeMove::Wide(f, _) => f.axis(),
            CubeMove::Slice(s, _) => s.axis(),
            CubeMove::Rotation(a, _) => a,
        }
    }

    /// Position in [`all_moves`].
    pub fn index(self) -> usize {
        let (family, member, turn) = match self {
            CubeMove::Face(f, t) => (0, f.index(), t),
            CubeMove::Wide(f, t) => (1, f.index(), t),
            CubeMove::Slice(s, t) => (2, s as usize, t),
            CubeMove::Rotation(a, t) => (3, a as usize, t),
        };
        let offset = [0, 18, 36, 45][family];
        offset + member * 3 + turn as usize
    }

    /// Standard notation: `R`, `R'`, `R2`, `r`, `M'`, `x2`, ...
    pub fn token(self) -> String {
        let head = match self {
            CubeMove::Face(f, _) => f.letter(),
            CubeMove::Wide(f, _) => f.letter().to_ascii_lowercase(),
            CubeMove::Slice(s, _) => s.letter(),
            CubeMove::Rotation(a, _) => a.letter(),
        };
        format!("{head}{}", self.turn().suffix())
    }

    /// What "the same face" means for the scramble filter.
    fn layer_key(self) -> (u8, usize) {
        match self {
            CubeMove::Face(f, _) | CubeMove::Wide(f, _) => (0, f.index()),
            CubeMove::Slice(s, _) => (1, s as usize),
            CubeMove::Rotation(a, _) => (2, a as usize),
        }
    }
}

impl fmt::Display for CubeMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

/// The full 54-move alphabet: 18 face, 18 wide, 9 slice, 9 rotation moves.
pub fn all_moves() -> &'static [CubeMove; 54] {
    static MOVES: LazyLock<[CubeMove; 54]> = LazyLock::new(|| {
        let mut out = Vec::with_capacity(54);
        for f in FaceId::ALL {
            for t in Turn::ALL {
                out.push(CubeMove::Face(f, t));
            }
        }
        for f in FaceId::ALL {
            for t in Turn::ALL {
                out.push(CubeMove::Wide(f, t));
            }
        }
        for s in SliceAxis::ALL {
            for t in Turn::ALL {
                out.push(CubeMove::Slice(s, t));
            }
        }
        for a in CubeAxis::ALL {
            for t in Turn::ALL {
                out.push(CubeMove::Rotation(a, t));
            }
        }
        out.try_into().expect("54 moves")
    });
    &MOVES
}

/// `new[i] = old[perm[i]]`.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Perm([u8; STICKERS]);

impl Perm {
    const IDENTITY: Perm = {
        let mut p = [0u8; STICKERS];
        let mut i = 0;
        while i < STICKERS {
            p[i] = i as u8;
            i += 1;
        }
        Perm(p)
    };

    fn from_cycles(cycles: &[Cycle]) -> Perm {
        let mut p = Perm::IDENTITY;
        for c in cycles {
            for k in 0..4 {
                let from = c[k];
                let to = c[(k + 1) % 4];
                p.0[usize::from(to)] = from;
            }
        }
        p
    }

    /// `self` first, then `next`.
    fn then(self, next: Perm) -> Perm {
        let mut out = [0u8; STICKERS];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.0[usize::from(next.0[i])];
        }
        Perm(out)
    }

    fn power(self, n: usize) -> Perm {
        (0..n).fold(Perm::IDENTITY, |acc, _| acc.then(self))
    }
}

struct MoveTable {
    perms: [Perm; 54],
}

static TABLE: LazyLock<MoveTable> = LazyLock::new(|| {
    use tables::*;
    let face_quarter = |f: FaceId| {
        let ring = match f {
            FaceId::U => U_RING,
            FaceId::D => D_RING,
            FaceId::L => L_RING,
            FaceId::R => R_RING,
            FaceId::F => F_RING,
            FaceId::B => B_RING,
        };
        let mut cycles = ring.to_vec();
        cycles.extend_from_slice(&face_spin(FACE_BASE[f.index()]));
        Perm::from_cycles(&cycles)
    };
    let slice_quarter = |s: SliceAxis| match s {
        SliceAxis::M => Perm::from_cycles(&M_RING),
        SliceAxis::S => Perm::from_cycles(&S_RING),
        SliceAxis::E => Perm::from_cycles(&E_RING),
    };
    let inv = |p: Perm| p.power(3);
    let wide_quarter = |f: FaceId| {
        let face = face_quarter(f);
        let slice = match f {
            FaceId::R => inv(slice_quarter(SliceAxis::M)),
            FaceId::L => slice_quarter(SliceAxis::M),
            FaceId::U => inv(slice_quarter(SliceAxis::E)),
            FaceId::D => slice_quarter(SliceAxis::E),
            FaceId::F => slice_quarter(SliceAxis::S),
            FaceId::B => inv(slice_quarter(SliceAxis::S)),
        };
        face.then(slice)
    };
    let rotation_quarter = |a: CubeAxis| match a {
        CubeAxis::X => wide_quarter(FaceId::R).then(inv(face_quarter(FaceId::L))),
        CubeAxis::Y => wide_quarter(FaceId::U).then(inv(face_quarter(FaceId::D))),
        CubeAxis::Z => wide_quarter(FaceId::F).then(inv(face_quarter(FaceId::B))),
    };

    let perms = all_moves().map(|m| {
        let quarter = match m {
            CubeMove::Face(f, _) => face_quarter(f),
            CubeMove::Wide(f, _) => wide_quarter(f),
            CubeMove::Slice(s, _) => slice_quarter(s),
            CubeMove::Rotation(a, _) => rotation_quarter(a),
        };
        quarter.power(m.turn().quarter_turns())
    });
    MoveTable { perms }
});

/// Sticker colors of all six faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeState {
    stickers: [StickerColor; STICKERS],
}

impl CubeState {
    pub fn from_stickers(stickers: [StickerColor; STICKERS]) -> Self {
        Self { stickers }
    }

    pub fn stickers(&self) -> &[StickerColor; STICKERS] {
        &self.stickers
    }

    /// Row-major 3x3 grid of one face.
    pub fn face(&self, face: FaceId) -> [[StickerColor; 3]; 3] {
        let base = face.index() * 9;
        std::array::from_fn(|r| std::array::from_fn(|c| self.stickers[base + r * 3 + c]))
    }

    pub fn center(&self, face: FaceId) -> StickerColor {
        self.stickers[face.index() * 9 + 4]
    }

    pub fn color_counts(&self) -> [usize; 6] {
        let mut counts = [0; 6];
        for s in &self.stickers {
            counts[*s as usize] += 1;
        }
        counts
    }

    pub fn is_solved(&self) -> bool {
        FaceId::ALL
            .iter()
            .all(|&f| self.face(f).iter().flatten().all(|&s| s == self.center(f)))
    }
}

/// Solved cube: U yellow, D white, F red, B orange, L green, R blue.
pub fn solved_cube() -> CubeState {
    let mut stickers = [StickerColor::Yellow; STICKERS];
    for f in FaceId::ALL {
        stickers[f.index() * 9..f.index() * 9 + 9].fill(f.solved_color());
    }
    CubeState { stickers }
}

pub fn apply_move(state: &CubeState, mv: CubeMove) -> CubeState {
    let perm = &TABLE.perms[mv.index()];
    CubeState {
        stickers: std::array::from_fn(|i| state.stickers[usize::from(perm.0[i])]),
    }
}

pub fn apply_moves(state: &CubeState, moves: &[CubeMove]) -> CubeState {
    moves.iter().fold(*state, |s, &m| apply_move(&s, m))
}

/// Scramble from solved with `n` uniform draws from the 54 moves.
///
/// A draw is rejected and redrawn when it turns the same layer as the
/// previous move (a face and its wide turn count as one layer), or when it
/// would make three consecutive moves about the same axis.
pub fn scramble(n: usize, rng: &mut SeededRandom) -> (CubeState, Vec<CubeMove>) {
    let alphabet = all_moves();
    let mut moves: Vec<CubeMove> = Vec::with_capacity(n);
    while moves.len() < n {
        let candidate = *rng.pick(alphabet);
        if let Some(prev) = moves.last() {
            if prev.layer_key() == candidate.layer_key() {
                continue;
            }
            if moves.len() >= 2 {
                let before = moves[moves.len() - 2];
                if before.axis() == prev.axis() && prev.axis() == candidate.axis() {
                    continue;
                }
            }
        }
        moves.push(candidate);
    }
    (apply_moves(&solved_cube(), &moves), moves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use StickerColor::*;

    #[test]
    fn alphabet_has_54_distinct_moves() {
        let moves = all_moves();
        for (i, m) in moves.iter().enumerate() {
            assert_eq!(m.index(), i);
        }
        let mut tokens: Vec<String> = moves.iter().map(|m| m.token()).collect();
        tokens.sort();
        tokens.dedup();
        assert_eq!(tokens.len(), 54);
    }

    #[test]
    fn solved_counts() {
        let s = solved_cube();
        assert_eq!(s.color_counts(), [9; 6]);
        assert_eq!(s.face(FaceId::U), [[Yellow; 3]; 3]);
        assert!(s.is_solved());
    }

    #[test]
    fn r_on_solved() {
        // Standard R: the front column goes up.
        let s = apply_move(&solved_cube(), CubeMove::Face(FaceId::R, Turn::Cw));
        let col = |f: FaceId, c: usize| [s.face(f)[0][c], s.face(f)[1][c], s.face(f)[2][c]];
        assert_eq!(col(FaceId::U, 2), [Red; 3]);
        assert_eq!(col(FaceId::B, 0), [Yellow; 3]);
        assert_eq!(col(FaceId::D, 2), [Orange; 3]);
        assert_eq!(col(FaceId::F, 2), [White; 3]);
        assert_eq!(s.face(FaceId::R), [[Blue; 3]; 3]);
        // R' gives the mirror image of that cycle.
        let s = apply_move(&solved_cube(), CubeMove::Face(FaceId::R, Turn::Ccw));
        assert_eq!(s.face(FaceId::F)[0][2], Yellow);
        assert_eq!(s.face(FaceId::U)[0][2], Orange);
    }

    #[test]
    fn face_moves_fix_centers() {
        for f in FaceId::ALL {
            for t in Turn::ALL {
                let s = apply_move(&solved_cube(), CubeMove::Face(f, t));
                for g in FaceId::ALL {
                    assert_eq!(s.center(g), g.solved_color());
                }
            }
        }
    }

    #[test]
    fn rotations_move_centers_rigidly() {
        let s = apply_move(&solved_cube(), CubeMove::Rotation(CubeAxis::X, Turn::Cw));
        assert!(s.is_solved());
        assert_eq!(s.center(FaceId::U), Red);
        assert_eq!(s.center(FaceId::F), White);
        let s = apply_move(&solved_cube(), CubeMove::Rotation(CubeAxis::Y, Turn::Cw));
        assert_eq!(s.center(FaceId::F), Blue);
        let s = apply_move(&solved_cube(), CubeMove::Rotation(CubeAxis::Z, Turn::Cw));
        assert_eq!(s.center(FaceId::R), Yellow);
    }

    #[test]
    fn r_r2_r_is_identity() {
        let mut rng = SeededRandom::new(5);
        let (start, _) = scramble(20, &mut rng);
        let seq = [
            CubeMove::Face(FaceId::R, Turn::Cw),
            CubeMove::Face(FaceId::R, Turn::Half),
            CubeMove::Face(FaceId::R, Turn::Cw),
        ];
        assert_eq!(apply_moves(&start, &seq), start);
        assert_eq!(apply_moves(&start, &[]), start);
    }

    #[test]
    fn scramble_basics() {
        let (s, m) = scramble(0, &mut SeededRandom::new(1));
        assert!(m.is_empty());
        assert_eq!(s, solved_cube());
        let (s, m) = scramble(1, &mut SeededRandom::new(1));
        assert_eq!(s, apply_move(&solved_cube(), m[0]));
        let a = scramble(25, &mut SeededRandom::new(9));
        let b = scramble(25, &mut SeededRandom::new(9));
        assert_eq!(a, b);
    }

    #[test]
    fn scramble_filter_holds() {
        let (_, moves) = scramble(2000, &mut SeededRandom::new(11));
        for w in moves.windows(2) {
            assert_ne!(w[0].layer_key(), w[1].layer_key());
        }
        for w in moves.windows(3) {
            assert!(!(w[0].axis() == w[1].axis() && w[1].axis() == w[2].axis()));
        }
    }
}

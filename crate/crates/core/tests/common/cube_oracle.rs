//! Brute-force cube model in 3D coordinates, independent of the permutation
//! tables. Each sticker is a (cubie position, outward normal) pair; a move
//! rotates every sticker whose position lies in the turned layers.

use deformbench::cube::{CubeAxis, CubeMove, CubeState, FaceId, SliceAxis, StickerColor, Turn};

type V = [i32; 3];

fn dot(a: V, b: V) -> i32 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V, b: V) -> V {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Clockwise quarter turn seen from the tip of `axis`.
fn rotate(v: V, axis: V) -> V {
    let d = dot(v, axis);
    let c = cross(axis, v);
    [d * axis[0] - c[0], d * axis[1] - c[1], d * axis[2] - c[2]]
}

/// (normal, column direction, row direction) with x toward R, y toward U,
/// z toward F.
fn frame(face: FaceId) -> (V, V, V) {
    match face {
        FaceId::U => ([0, 1, 0], [1, 0, 0], [0, 0, 1]),
        FaceId::D => ([0, -1, 0], [1, 0, 0], [0, 0, -1]),
        FaceId::F => ([0, 0, 1], [1, 0, 0], [0, -1, 0]),
        FaceId::B => ([0, 0, -1], [-1, 0, 0], [0, -1, 0]),
        FaceId::R => ([1, 0, 0], [0, 0, -1], [0, -1, 0]),
        FaceId::L => ([-1, 0, 0], [0, 0, 1], [0, -1, 0]),
    }
}

fn stickers() -> Vec<(V, V)> {
    let mut out = Vec::with_capacity(54);
    for f in FaceId::ALL {
        let (n, right, down) = frame(f);
        for r in 0..3 {
            for c in 0..3 {
                let (dc, dr) = (c - 1, r - 1);
                let pos = [
                    n[0] + dc * right[0] + dr * down[0],
                    n[1] + dc * right[1] + dr * down[1],
                    n[2] + dc * right[2] + dr * down[2],
                ];
                out.push((pos, n));
            }
        }
    }
    out
}

fn axis_vec(face: FaceId) -> V {
    frame(face).0
}

/// (axis, turned layers measured along the axis)
fn geometry(mv: CubeMove) -> (V, Vec<i32>) {
    match mv {
        CubeMove::Face(f, _) => (axis_vec(f), vec![1]),
        CubeMove::Wide(f, _) => (axis_vec(f), vec![1, 0]),
        CubeMove::Slice(SliceAxis::M, _) => (axis_vec(FaceId::L), vec![0]),
        CubeMove::Slice(SliceAxis::E, _) => (axis_vec(FaceId::D), vec![0]),
        CubeMove::Slice(SliceAxis::S, _) => (axis_vec(FaceId::F), vec![0]),
        CubeMove::Rotation(CubeAxis::X, _) => (axis_vec(FaceId::R), vec![-1, 0, 1]),
        CubeMove::Rotation(CubeAxis::Y, _) => (axis_vec(FaceId::U), vec![-1, 0, 1]),
        CubeMove::Rotation(CubeAxis::Z, _) => (axis_vec(FaceId::F), vec![-1, 0, 1]),
    }
}

pub fn oracle_apply(state: &CubeState, mv: CubeMove) -> CubeState {
    let geo = stickers();
    let (axis, layers) = geometry(mv);
    let quarters = match mv.turn() {
        Turn::Cw => 1,
        Turn::Half => 2,
        Turn::Ccw => 3,
    };
    let old = state.stickers();
    let mut new: [StickerColor; 54] = *old;
    for (src, &(pos, normal)) in geo.iter().enumerate() {
        if !layers.contains(&dot(pos, axis)) {
            continue;
        }
        let (mut p, mut n) = (pos, normal);
        for _ in 0..quarters {
            p = rotate(p, axis);
            n = rotate(n, axis);
        }
        let dst = geo.iter().position(|&(q, m)| q == p && m == n).expect("sticker");
        new[dst] = old[src];
    }
    CubeState::from_stickers(new)
}

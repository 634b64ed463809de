//! Geometric reference model for the single-layer quadrant operations:
//! quadrants are points (±1, ±1) and the operations are plane maps.

use deformbench::shape::{Layer, Quadrant, ShapeAction};

const CENTERS: [(i32, i32); 4] = [(1, 1), (1, -1), (-1, -1), (-1, 1)];

fn slot(p: (i32, i32)) -> usize {
    CENTERS.iter().position(|&c| c == p).unwrap()
}

/// Applies a point map to every quadrant of a layer.
fn remap(layer: &Layer, f: impl Fn((i32, i32)) -> Option<(i32, i32)>) -> Layer {
    let mut out: [Quadrant; 4] = [None; 4];
    for (q, content) in layer.0.iter().enumerate() {
        if let Some(p) = f(CENTERS[q]) {
            out[slot(p)] = *content;
        }
    }
    Layer(out)
}

/// Per-layer effect of the geometric operations; `None` for others.
pub fn oracle_layer(layer: &Layer, action: &ShapeAction) -> Option<Layer> {
    Some(match action {
        ShapeAction::RotateCw => remap(layer, |(x, y)| Some((y, -x))),
        ShapeAction::RotateCcw => remap(layer, |(x, y)| Some((-y, x))),
        ShapeAction::Mirror => remap(layer, |(x, y)| Some((-x, y))),
        ShapeAction::Cut => remap(layer, |(x, y)| (x < 0).then_some((x, y))),
        _ => return None,
    })
}

use thiserror::Error;

use super::{Layer, LayerSelector, Piece, Shape, ShapeAction, ShapeSpace, MAX_LAYERS, QUADRANTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("action would leave no quadrant occupied")]
    ActionAnnihilatesShape,
    #[error("action or shape does not belong to the {0:?} task space")]
    DimensionMismatch(ShapeSpace),
    #[error("layer {layer} selected but shape has {layers} layer(s)")]
    LayerOutOfRange { layer: u8, layers: usize },
}

/// An [`ShapeError`] raised at a 1-based position of an action list.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {source}")]
pub struct StepError {
    pub step: usize,
    #[source]
    pub source: ShapeError,
}

fn map_layers(shape: &Shape, f: impl Fn(&Layer) -> Layer) -> Vec<Layer> {
    shape.layers().iter().map(f).collect()
}

fn rotate_cw(layer: &Layer) -> Layer {
    let [q1, q2, q3, q4] = layer.0;
    Layer([q4, q1, q2, q3])
}

fn rotate_ccw(layer: &Layer) -> Layer {
    let [q1, q2, q3, q4] = layer.0;
    Layer([q2, q3, q4, q1])
}

fn mirror(layer: &Layer) -> Layer {
    let [q1, q2, q3, q4] = layer.0;
    Layer([q4, q3, q2, q1])
}

/// Column gravity: every piece drops within its quadrant column to the
/// lowest free level, then empty layers vanish and the stack is truncated
/// to [`MAX_LAYERS`] from the top.
fn settle(layers: Vec<Layer>) -> Vec<Layer> {
    let mut columns: [Vec<Piece>; QUADRANTS] = Default::default();
    for layer in &layers {
        for (q, column) in columns.iter_mut().enumerate() {
            if let Some(p) = layer.0[q] {
                column.push(p);
            }
        }
    }
    let height = columns.iter().map(Vec::len).max().unwrap_or(0).min(MAX_LAYERS);
    (0..height)
        .map(|level| {
            let mut out = Layer::EMPTY;
            for (q, column) in columns.iter().enumerate() {
                out.0[q] = column.get(level).copied();
            }
            out
        })
        .collect()
}

fn finish(layers: Vec<Layer>) -> Result<Shape, ShapeError> {
    let layers = settle(layers);
    if layers.is_empty() {
        return Err(ShapeError::ActionAnnihilatesShape);
    }
    Ok(Shape::from_layers_unchecked(layers))
}

/// Applies one deformation. The result always satisfies the shape
/// invariants; failures leave nothing half-applied.
pub fn apply_action(
    shape: &Shape,
    action: &ShapeAction,
    space: ShapeSpace,
) -> Result<Shape, ShapeError> {
    if space == ShapeSpace::Flat && shape.layer_count() != 1 {
        return Err(ShapeError::DimensionMismatch(space));
    }
    match action {
        ShapeAction::RotateCw => Ok(Shape::from_layers_unchecked(map_layers(shape, rotate_cw))),
        ShapeAction::RotateCcw => Ok(Shape::from_layers_unchecked(map_layers(shape, rotate_ccw))),
        ShapeAction::Mirror => Ok(Shape::from_layers_unchecked(map_layers(shape, mirror))),
        ShapeAction::Cut => finish(map_layers(shape, |l| {
            let [_, _, q3, q4] = l.0;
            Layer([None, None, q3, q4])
        })),
        ShapeAction::Fill { kind, color } => {
            // Only quadrants resting on something can be filled, so in a
            // stacked shape this is the supported part of the top layer.
            let mut layers = shape.layers().to_vec();
            let top = layers.len() - 1;
            for q in 0..QUADRANTS {
                let supported = top == 0 || layers[top - 1].0[q].is_some();
                if layers[top].0[q].is_none() && supported {
                    layers[top].0[q] = Some(Piece::new(*kind, *color));
                }
            }
            Ok(Shape::from_layers_unchecked(layers))
        }
        ShapeAction::Paint { layer, color } => {
            let mut layers = shape.layers().to_vec();
            let targets = match *layer {
                LayerSelector::All => 0..layers.len(),
                LayerSelector::Index(i) => {
                    let idx = usize::from(i);
                    if idx == 0 || idx > layers.len() {
                        return Err(ShapeError::LayerOutOfRange {
                            layer: i,
                            layers: layers.len(),
                        });
                    }
                    idx - 1..idx
                }
            };
            for l in &mut layers[targets] {
                for p in l.0.iter_mut().flatten() {
                    p.color = *color;
                }
            }
            Ok(Shape::from_layers_unchecked(layers))
        }
        ShapeAction::Stack(operand) => {
            if space == ShapeSpace::Flat {
                return Err(ShapeError::DimensionMismatch(space));
            }
            let mut layers = shape.layers().to_vec();
            layers.extend_from_slice(operand.layers());
            finish(layers)
        }
    }
}

/// Left fold of [`apply_action`]; reports the first failing step (1-based).
pub fn apply_actions(
    shape: &Shape,
    actions: &[ShapeAction],
    space: ShapeSpace,
) -> Result<Shape, StepError> {
    let mut current = shape.clone();
    for (i, action) in actions.iter().enumerate() {
        current = apply_action(&current, action, space)
            .map_err(|source| StepError { step: i + 1, source })?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::test_util::piece;
    use crate::shape::{validate_shape, ShapeColor, ShapeKind};

    fn su_ry() -> Shape {
        Shape::single([piece('S', 'u'), None, piece('R', 'y'), None]).unwrap()
    }

    fn full() -> Shape {
        Shape::single([piece('S', 'u'), piece('C', 'r'), piece('R', 'y'), piece('W', 'g')]).unwrap()
    }

    #[test]
    fn rotate_cw_moves_q1_to_q2() {
        let out = apply_action(&su_ry(), &ShapeAction::RotateCw, ShapeSpace::Flat).unwrap();
        let expected = Shape::single([None, piece('S', 'u'), None, piece('R', 'y')]).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn cut_clears_right_half() {
        let out = apply_action(&full(), &ShapeAction::Cut, ShapeSpace::Flat).unwrap();
        let expected = Shape::single([None, None, piece('R', 'y'), piece('W', 'g')]).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn cut_then_mirror() {
        let out = apply_actions(&full(), &[ShapeAction::Cut, ShapeAction::Mirror], ShapeSpace::Flat)
            .unwrap();
        let expected = Shape::single([piece('W', 'g'), piece('R', 'y'), None, None]).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn cut_on_right_half_only_errors() {
        let s = Shape::single([piece('C', 'r'), piece('C', 'r'), None, None]).unwrap();
        assert_eq!(
            apply_action(&s, &ShapeAction::Cut, ShapeSpace::Flat),
            Err(ShapeError::ActionAnnihilatesShape)
        );
        let err = apply_actions(&s, &[ShapeAction::Mirror, ShapeAction::Mirror, ShapeAction::Cut], ShapeSpace::Flat)
            .unwrap_err();
        assert_eq!(err.step, 3);
    }

    #[test]
    fn stack_rejected_in_flat_space() {
        let op = ShapeAction::Stack(su_ry());
        assert_eq!(
            apply_action(&su_ry(), &op, ShapeSpace::Flat),
            Err(ShapeError::DimensionMismatch(ShapeSpace::Flat))
        );
    }

    #[test]
    fn stack_drops_pieces_into_columns() {
        // "Cu------" with "--Ru----" on top: the rectangle falls to layer 1.
        let base = Shape::single([piece('C', 'u'), None, None, None]).unwrap();
        let op = Shape::single([None, piece('R', 'u'), None, None]).unwrap();
        let out = apply_action(&base, &ShapeAction::Stack(op), ShapeSpace::Stacked).unwrap();
        assert_eq!(out.layer_count(), 1);
        assert_eq!(out.layers()[0].0, [piece('C', 'u'), piece('R', 'u'), None, None]);

        let out = apply_action(&base, &ShapeAction::Stack(base.clone()), ShapeSpace::Stacked).unwrap();
        assert_eq!(out.layer_count(), 2);
        assert!(validate_shape(&out).is_valid());
    }

    #[test]
    fn stack_caps_at_four_layers() {
        let mut s = full();
        for _ in 0..5 {
            s = apply_action(&s, &ShapeAction::Stack(full()), ShapeSpace::Stacked).unwrap();
        }
        assert_eq!(s.layer_count(), MAX_LAYERS);
    }

    #[test]
    fn fill_targets_supported_top_quadrants() {
        let filled = apply_action(
            &su_ry(),
            &ShapeAction::Fill { kind: ShapeKind::Circle, color: ShapeColor::Red },
            ShapeSpace::Flat,
        )
        .unwrap();
        assert_eq!(filled.layers()[0].0, [piece('S', 'u'), piece('C', 'r'), piece('R', 'y'), piece('C', 'r')]);

        let two = Shape::new(vec![
            Layer([piece('C', 'u'), piece('C', 'u'), None, None]),
            Layer([piece('C', 'u'), None, None, None]),
        ])
        .unwrap();
        let filled = apply_action(
            &two,
            &ShapeAction::Fill { kind: ShapeKind::Star, color: ShapeColor::Blue },
            ShapeSpace::Stacked,
        )
        .unwrap();
        assert_eq!(filled.layers()[1].0, [piece('C', 'u'), piece('S', 'b'), None, None]);
        assert!(validate_shape(&filled).is_valid());
    }

    #[test]
    fn paint_selected_layer() {
        let two = Shape::new(vec![
            Layer([piece('C', 'u'), piece('R', 'g'), None, None]),
            Layer([piece('W', 'u'), None, None, None]),
        ])
        .unwrap();
        let painted = apply_action(
            &two,
            &ShapeAction::Paint { layer: LayerSelector::Index(2), color: ShapeColor::Red },
            ShapeSpace::Stacked,
        )
        .unwrap();
        assert_eq!(painted.layers()[0], two.layers()[0]);
        assert_eq!(painted.layers()[1].0[0], piece('W', 'r'));

        let err = apply_action(
            &two,
            &ShapeAction::Paint { layer: LayerSelector::Index(3), color: ShapeColor::Red },
            ShapeSpace::Stacked,
        );
        assert_eq!(err, Err(ShapeError::LayerOutOfRange { layer: 3, layers: 2 }));
    }

    #[test]
    fn flat_space_rejects_layered_shape() {
        let two = Shape::new(vec![Layer([piece('C', 'u'); 4]), Layer([piece('C', 'u'); 4])]).unwrap();
        assert!(apply_action(&two, &ShapeAction::Mirror, ShapeSpace::Flat).is_err());
    }

    #[test]
    fn multi_layer_cut_keeps_support() {
        let s = Shape::new(vec![
            Layer([piece('C', 'u'), piece('C', 'u'), piece('C', 'u'), None]),
            Layer([piece('R', 'r'), piece('R', 'r'), None, None]),
            Layer([piece('S', 'b'), None, None, None]),
        ])
        .unwrap();
        let out = apply_action(&s, &ShapeAction::Cut, ShapeSpace::Stacked).unwrap();
        assert_eq!(out.layer_count(), 1);
        assert_eq!(out.layers()[0].0, [None, None, piece('C', 'u'), None]);
    }
}

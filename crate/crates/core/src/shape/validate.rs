use std::fmt;

use super::{Layer, Shape, MAX_LAYERS, QUADRANTS};

/// One broken shape invariant. Layer and quadrant numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    LayerCount { count: usize },
    EmptyLayer { layer: usize },
    UnsupportedQuadrant { layer: usize, quadrant: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LayerCount { count } => {
                write!(f, "layer count {count} outside 1..={MAX_LAYERS}")
            }
            Violation::EmptyLayer { layer } => write!(f, "layer {layer} is empty"),
            Violation::UnsupportedQuadrant { layer, quadrant } => write!(
                f,
                "layer {layer} quadrant {quadrant} has nothing beneath it"
            ),
        }
    }
}

/// Every violated invariant of a shape; empty iff the shape is valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

pub(crate) fn validate_layers(layers: &[Layer]) -> ValidationReport {
    let mut violations = Vec::new();
    if layers.is_empty() || layers.len() > MAX_LAYERS {
        violations.push(Violation::LayerCount {
            count: layers.len(),
        });
    }
    for (i, layer) in layers.iter().enumerate() {
        if layer.is_empty() {
            violations.push(Violation::EmptyLayer { layer: i + 1 });
        }
        if i == 0 {
            continue;
        }
        let below = &layers[i - 1];
        for q in 0..QUADRANTS {
            if layer.0[q].is_some() && below.0[q].is_none() {
                violations.push(Violation::UnsupportedQuadrant {
                    layer: i + 1,
                    quadrant: q + 1,
                });
            }
        }
    }
    ValidationReport { violations }
}

/// Checks a shape against all invariants. Total: never fails, lists every
/// problem it finds.
pub fn validate_shape(shape: &Shape) -> ValidationReport {
    validate_layers(shape.layers())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::test_util::piece;

    #[test]
    fn valid_single_layer() {
        let s = Shape::single([piece('S', 'u'), None, piece('R', 'y'), None]).unwrap();
        assert!(validate_shape(&s).is_valid());
    }

    #[test]
    fn unsupported_quadrant_reported_once() {
        let bottom = Layer([None, piece('C', 'r'), None, None]);
        let top = Layer([piece('W', 'p'), piece('C', 'r'), None, None]);
        let report = validate_layers(&[bottom, top]);
        assert_eq!(
            report.violations,
            vec![Violation::UnsupportedQuadrant {
                layer: 2,
                quadrant: 1
            }]
        );
    }

    #[test]
    fn empty_layer_reported() {
        let report = validate_layers(&[Layer::EMPTY]);
        assert_eq!(report.violations, vec![Violation::EmptyLayer { layer: 1 }]);
    }

    #[test]
    fn too_many_layers() {
        let full = Layer([piece('C', 'r'); 4]);
        let report = validate_layers(&[full; 5]);
        assert_eq!(report.violations, vec![Violation::LayerCount { count: 5 }]);
    }
}

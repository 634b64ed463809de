use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{validate, Layer, Piece, Shape, ShapeColor, ShapeKind, MAX_LAYERS, QUADRANTS};
use crate::rng::SeededRandom;

/// Parameters of the rule-based shape generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    /// 1..=4
    pub num_layers: u8,
    /// Distinct kinds drawn for this shape, 1..=4.
    pub num_shapes: u8,
    /// Distinct colors drawn for this shape, 1..=8.
    pub num_colors: u8,
    /// Every occupied quadrant carries the same kind and color.
    pub all_the_same: bool,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            num_layers: 1,
            num_shapes: 4,
            num_colors: 8,
            all_the_same: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{field} = {value} is out of range {min}..={max}")]
    ConfigOutOfRange {
        field: &'static str,
        value: u8,
        min: u8,
        max: u8,
    },
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let check = |field, value: u8, max: usize| {
            if value == 0 || usize::from(value) > max {
                Err(GenError::ConfigOutOfRange {
                    field,
                    value,
                    min: 1,
                    max: max as u8,
                })
            } else {
                Ok(())
            }
        };
        check("num_layers", self.num_layers, MAX_LAYERS)?;
        check("num_shapes", self.num_shapes, ShapeKind::GENERATED.len())?;
        check("num_colors", self.num_colors, ShapeColor::ALL.len())
    }

    /// Generates with a fresh source seeded from [`GenConfig::seed`].
    pub fn generate(&self) -> Result<Shape, GenError> {
        generate_shape(self, &mut SeededRandom::new(self.seed))
    }
}

/// Draws a random valid shape.
///
/// Kinds and colors are first sampled (without replacement) down to
/// `num_shapes` and `num_colors`. Each layer then occupies a uniformly drawn
/// non-empty subset of the quadrants that the layer below supports, so the
/// support rule holds by construction.
pub fn generate_shape(config: &GenConfig, rng: &mut SeededRandom) -> Result<Shape, GenError> {
    config.validate()?;
    let kinds = rng.sample(&ShapeKind::GENERATED, usize::from(config.num_shapes));
    let colors = rng.sample(&ShapeColor::ALL, usize::from(config.num_colors));
    let fixed = config
        .all_the_same
        .then(|| Piece::new(*rng.pick(&kinds), *rng.pick(&colors)));

    let mut layers: Vec<Layer> = Vec::with_capacity(usize::from(config.num_layers));
    for _ in 0..config.num_layers {
        let supported: Vec<usize> = match layers.last() {
            None => (0..QUADRANTS).collect(),
            Some(below) => (0..QUADRANTS).filter(|&q| below.0[q].is_some()).collect(),
        };
        let subsets = (1u32 << supported.len()) - 1;
        let mask = 1 + rng.below(subsets);
        let mut layer = Layer::EMPTY;
        for (bit, &q) in supported.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                layer.0[q] = Some(match fixed {
                    Some(p) => p,
                    None => Piece::new(*rng.pick(&kinds), *rng.pick(&colors)),
                });
            }
        }
        layers.push(layer);
        debug_assert!(validate::validate_layers(&layers).is_valid());
    }
    Ok(Shape::from_layers_unchecked(layers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::validate_shape;

    #[test]
    fn rejects_out_of_range() {
        let cfg = GenConfig { num_layers: 5, ..GenConfig::default() };
        assert!(matches!(
            cfg.generate(),
            Err(GenError::ConfigOutOfRange { field: "num_layers", .. })
        ));
        let cfg = GenConfig { num_colors: 0, ..GenConfig::default() };
        assert!(cfg.generate().is_err());
        let cfg = GenConfig { num_shapes: 5, ..GenConfig::default() };
        assert!(cfg.generate().is_err());
    }

    #[test]
    fn all_the_same_forces_one_piece() {
        for seed in 0..200 {
            let cfg = GenConfig {
                num_layers: 1,
                num_shapes: 1,
                num_colors: 1,
                all_the_same: true,
                seed,
            };
            let s = cfg.generate().unwrap();
            let first = s.pieces().next().unwrap();
            assert!(s.pieces().all(|p| p == first));
        }
    }

    #[test]
    fn four_layers_always_supported() {
        for seed in 0..10_000 {
            let cfg = GenConfig { num_layers: 4, seed, ..GenConfig::default() };
            let s = cfg.generate().unwrap();
            assert!(validate_shape(&s).is_valid(), "seed {seed}");
            assert_eq!(s.layer_count(), 4);
        }
    }

    #[test]
    fn kinds_drawn_from_sampled_subset() {
        for seed in 0..500 {
            let cfg = GenConfig { num_layers: 3, num_shapes: 2, num_colors: 3, seed, ..GenConfig::default() };
            let s = cfg.generate().unwrap();
            let mut kinds: Vec<_> = s.pieces().map(|p| p.kind).collect();
            kinds.sort();
            kinds.dedup();
            let mut colors: Vec<_> = s.pieces().map(|p| p.color).collect();
            colors.sort();
            colors.dedup();
            assert!(kinds.len() <= 2 && colors.len() <= 3);
            assert!(!kinds.contains(&ShapeKind::Sector));
        }
    }

    #[test]
    fn deterministic() {
        let cfg = GenConfig { num_layers: 3, seed: 99, ..GenConfig::default() };
        assert_eq!(cfg.generate().unwrap(), cfg.generate().unwrap());
    }
}

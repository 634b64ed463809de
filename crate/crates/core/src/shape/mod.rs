//! Layered four-quadrant shapes and their deformation operations.
//!
//! A [`Shape`] is a stack of one to four [`Layer`]s, bottom first. Each
//! layer has four quadrants in clockwise order starting at the top right:
//!
//! ```text
//!   q4 | q1
//!   ---+---
//!   q3 | q2
//! ```
//!
//! Quadrant `q` of layer `i >= 2` may only be occupied when quadrant `q` of
//! layer `i - 1` is occupied (the support rule).

mod generate;
mod ops;
mod validate;

pub use generate::{generate_shape, GenConfig, GenError};
pub use ops::{apply_action, apply_actions, ShapeError, StepError};
pub use validate::{validate_shape, ValidationReport, Violation};

use serde::{Deserialize, Serialize};

pub const MAX_LAYERS: usize = 4;
pub const QUADRANTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShapeKind {
    Circle,
    Rectangle,
    Windmill,
    Star,
    /// Parsed and rendered, never generated.
    Sector,
}

impl ShapeKind {
    /// Kinds the generator draws from.
    pub const GENERATED: [ShapeKind; 4] = [
        ShapeKind::Circle,
        ShapeKind::Rectangle,
        ShapeKind::Windmill,
        ShapeKind::Star,
    ];

    pub const ALL: [ShapeKind; 5] = [
        ShapeKind::Circle,
        ShapeKind::Rectangle,
        ShapeKind::Windmill,
        ShapeKind::Star,
        ShapeKind::Sector,
    ];

    pub fn letter(self) -> char {
        match self {
            ShapeKind::Circle => 'C',
            ShapeKind::Rectangle => 'R',
            ShapeKind::Windmill => 'W',
            ShapeKind::Star => 'S',
            ShapeKind::Sector => 'F',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.letter() == c)
    }

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Circle => "circle",
            ShapeKind::Rectangle => "rectangle",
            ShapeKind::Windmill => "windmill",
            ShapeKind::Star => "star",
            ShapeKind::Sector => "sector",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShapeColor {
    Red,
    Green,
    Blue,
    Yellow,
    Purple,
    Cyan,
    /// Colorless.
    Uncolored,
    White,
}

impl ShapeColor {
    pub const ALL: [ShapeColor; 8] = [
        ShapeColor::Red,
        ShapeColor::Green,
        ShapeColor::Blue,
        ShapeColor::Yellow,
        ShapeColor::Purple,
        ShapeColor::Cyan,
        ShapeColor::Uncolored,
        ShapeColor::White,
    ];

    pub fn letter(self) -> char {
        match self {
            ShapeColor::Red => 'r',
            ShapeColor::Green => 'g',
            ShapeColor::Blue => 'b',
            ShapeColor::Yellow => 'y',
            ShapeColor::Purple => 'p',
            ShapeColor::Cyan => 'c',
            ShapeColor::Uncolored => 'u',
            ShapeColor::White => 'w',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.letter() == c)
    }

    pub fn name(self) -> &'static str {
        match self {
            ShapeColor::Red => "red",
            ShapeColor::Green => "green",
            ShapeColor::Blue => "blue",
            ShapeColor::Yellow => "yellow",
            ShapeColor::Purple => "purple",
            ShapeColor::Cyan => "cyan",
            ShapeColor::Uncolored => "colorless",
            ShapeColor::White => "white",
        }
    }
}

/// Occupied quadrant content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Piece {
    pub kind: ShapeKind,
    pub color: ShapeColor,
}

impl Piece {
    pub const fn new(kind: ShapeKind, color: ShapeColor) -> Self {
        Self { kind, color }
    }
}

/// `None` is an empty quadrant.
pub type Quadrant = Option<Piece>;

/// Four quadrants, index 0 is q1 (top right), then clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Layer(pub [Quadrant; QUADRANTS]);

impl Layer {
    pub const EMPTY: Layer = Layer([None; QUADRANTS]);

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    pub fn occupied(&self) -> usize {
        self.0.iter().filter(|q| q.is_some()).count()
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        self.0.iter().flatten().copied()
    }
}

/// Which layers a paint operation touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerSelector {
    All,
    /// 1-based, bottom layer is 1.
    Index(u8),
}

/// Whether a shape lives in the flat (single layer) or stacked task space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeSpace {
    Flat,
    Stacked,
}

/// Deformation operation on a shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ShapeAction {
    Cut,
    RotateCw,
    RotateCcw,
    Fill { kind: ShapeKind, color: ShapeColor },
    Mirror,
    Paint { layer: LayerSelector, color: ShapeColor },
    Stack(Shape),
}

/// Argument-free action family, used to draw uniformly from an action space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeActionKind {
    Cut,
    RotateCw,
    RotateCcw,
    Fill,
    Mirror,
    Paint,
    Stack,
}

impl ShapeSpace {
    pub fn action_kinds(self) -> &'static [ShapeActionKind] {
        use ShapeActionKind::*;
        match self {
            ShapeSpace::Flat => &[Cut, RotateCw, RotateCcw, Fill, Mirror, Paint],
            ShapeSpace::Stacked => &[Cut, RotateCw, RotateCcw, Fill, Mirror, Paint, Stack],
        }
    }
}

impl ShapeAction {
    pub fn kind(&self) -> ShapeActionKind {
        match self {
            ShapeAction::Cut => ShapeActionKind::Cut,
            ShapeAction::RotateCw => ShapeActionKind::RotateCw,
            ShapeAction::RotateCcw => ShapeActionKind::RotateCcw,
            ShapeAction::Fill { .. } => ShapeActionKind::Fill,
            ShapeAction::Mirror => ShapeActionKind::Mirror,
            ShapeAction::Paint { .. } => ShapeActionKind::Paint,
            ShapeAction::Stack(_) => ShapeActionKind::Stack,
        }
    }
}

/// A valid layered shape. Construct through [`Shape::new`] or the codec.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    layers: Vec<Layer>,
}

impl Shape {
    /// Builds a shape, rejecting anything that breaks the shape invariants.
    pub fn new(layers: Vec<Layer>) -> Result<Self, ValidationReport> {
        let report = validate::validate_layers(&layers);
        if report.is_valid() {
            Ok(Self { layers })
        } else {
            Err(report)
        }
    }

    /// Single-layer shape.
    pub fn single(quadrants: [Quadrant; QUADRANTS]) -> Result<Self, ValidationReport> {
        Self::new(vec![Layer(quadrants)])
    }

    pub(crate) fn from_layers_unchecked(layers: Vec<Layer>) -> Self {
        debug_assert!(validate::validate_layers(&layers).is_valid());
        Self { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn top(&self) -> &Layer {
        self.layers.last().expect("shape has at least one layer")
    }

    /// All pieces, bottom layer first, q1..q4 within a layer.
    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        self.layers.iter().flat_map(Layer::pieces)
    }

    pub fn piece_count(&self) -> usize {
        self.layers.iter().map(Layer::occupied).sum()
    }
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    pub fn piece(kind: char, color: char) -> Quadrant {
        Some(Piece::new(
            ShapeKind::from_letter(kind).unwrap(),
            ShapeColor::from_letter(color).unwrap(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::test_util::piece;
    use super::*;

    #[test]
    fn letters_roundtrip() {
        for k in ShapeKind::ALL {
            assert_eq!(ShapeKind::from_letter(k.letter()), Some(k));
        }
        for c in ShapeColor::ALL {
            assert_eq!(ShapeColor::from_letter(c.letter()), Some(c));
        }
        assert_eq!(ShapeColor::from_letter('x'), None);
        assert!(!ShapeKind::GENERATED.contains(&ShapeKind::Sector));
    }

    #[test]
    fn new_rejects_unsupported() {
        let bottom = Layer([None, piece('C', 'r'), None, None]);
        let top = Layer([piece('C', 'r'), None, None, None]);
        assert!(Shape::new(vec![bottom, top]).is_err());
        assert!(Shape::new(vec![]).is_err());
        assert!(Shape::new(vec![Layer::EMPTY]).is_err());
    }

    #[test]
    fn action_spaces() {
        assert_eq!(ShapeSpace::Flat.action_kinds().len(), 6);
        assert_eq!(ShapeSpace::Stacked.action_kinds().len(), 7);
    }
}

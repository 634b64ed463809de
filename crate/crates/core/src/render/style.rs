use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::cube::StickerColor;
use crate::shape::ShapeColor;

const DEFAULT_STYLE: &str = include_str!("../../assets/style.toml");
pub const STYLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StyleError {
    #[error("style file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("style format_version {0} is not supported")]
    Version(u32),
    #[error("palette has no entry for color {0:?}")]
    MissingColor(char),
}

/// Geometry and palette for all SVG output.
#[derive(Debug, Clone, Deserialize)]
pub struct RenderStyle {
    pub format_version: u32,
    pub canvas: f64,
    pub quadrant_radius: f64,
    pub layer_offset: [f64; 2],
    pub layer_scale: f64,
    pub stroke_width: f64,
    pub outline: String,
    pub background: String,
    pub sticker_size: f64,
    pub sticker_gap: f64,
    pub option_cell: f64,
    pub label_size: f64,
    shape_palette: BTreeMap<char, String>,
    sticker_palette: BTreeMap<char, String>,
}

impl RenderStyle {
    pub fn from_toml(text: &str) -> Result<Self, StyleError> {
        let style: RenderStyle = toml::from_str(text)?;
        if style.format_version != STYLE_FORMAT_VERSION {
            return Err(StyleError::Version(style.format_version));
        }
        for c in ShapeColor::ALL {
            if !style.shape_palette.contains_key(&c.letter()) {
                return Err(StyleError::MissingColor(c.letter()));
            }
        }
        for c in StickerColor::ALL {
            if !style.sticker_palette.contains_key(&c.letter()) {
                return Err(StyleError::MissingColor(c.letter()));
            }
        }
        Ok(style)
    }

    pub fn shape_fill(&self, color: ShapeColor) -> &str {
        &self.shape_palette[&color.letter()]
    }

    pub fn sticker_fill(&self, color: StickerColor) -> &str {
        &self.sticker_palette[&color.letter()]
    }
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self::from_toml(DEFAULT_STYLE).expect("bundled style is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_style_is_total() {
        let s = RenderStyle::default();
        assert_eq!(s.shape_fill(ShapeColor::Red), "#e5484d");
        assert_eq!(s.sticker_fill(StickerColor::Orange), "#ff5800");
    }

    #[test]
    fn missing_palette_entry_rejected() {
        let text = DEFAULT_STYLE.replace("o = \"#ff5800\"\n", "");
        assert!(matches!(RenderStyle::from_toml(&text), Err(StyleError::MissingColor('o'))));
        let text = DEFAULT_STYLE.replace("format_version = 1", "format_version = 9");
        assert!(matches!(RenderStyle::from_toml(&text), Err(StyleError::Version(9))));
    }
}

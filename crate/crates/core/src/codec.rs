//! Canonical text encodings.
//!
//! Shapes: one 8-character cell string per layer (`Kc` or `--` for q1..q4),
//! layers bottom to top joined by `:`, e.g. `CuRg----:Cu------`. The
//! layer-map form `{"Layer 1": "CuRg----", "Layer 2": "Cu------"}` is
//! accepted and produced for presentation.
//!
//! Cubes: six lines in the order U, D, L, R, F, B, each
//! `X: [a b c] [d e f] [g h i]` with rows top to bottom.
//!
//! Shape actions, joined by `; `:
//!
//! | token            | action                              |
//! |------------------|-------------------------------------|
//! | `cut`            | remove q1 and q2                    |
//! | `rotate_cw`      | rotate 90° clockwise                |
//! | `rotate_ccw`     | rotate 90° counterclockwise         |
//! | `mirror`         | swap left and right halves          |
//! | `fill(K,c)`      | fill empty top quadrants            |
//! | `paint(all,c)`   | recolor every layer                 |
//! | `paint(N,c)`     | recolor layer N (1 = bottom)        |
//! | `stack(<shape>)` | drop a shape on top                 |
//!
//! Cube moves use standard notation separated by spaces:
//! `R U' f2 M x`.

use thiserror::Error;

use crate::cube::{
    CubeAxis, CubeMove, CubeState, FaceId, SliceAxis, StickerColor, Turn, STICKERS,
};
use crate::shape::{
    Layer, LayerSelector, Piece, Shape, ShapeAction, ShapeColor, ShapeKind, ValidationReport,
    QUADRANTS,
};

/// Version stamped into every persisted record.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("syntax error at {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unknown shape kind {found:?} in layer {layer} cell {cell}")]
    UnknownKind { layer: usize, cell: usize, found: char },
    #[error("unknown color {found:?} in layer {layer} cell {cell}")]
    UnknownColor { layer: usize, cell: usize, found: char },
    #[error("shape breaks invariants: {0}")]
    InvariantViolation(ValidationReport),
    #[error("bad sticker color {found:?} at {position}")]
    BadColorLetter { position: usize, found: char },
    #[error("expected 54 stickers, found {found}")]
    WrongStickerCount { found: usize },
    #[error("unknown token {token:?} at {position}")]
    UnknownToken { position: usize, token: String },
}

fn syntax(position: usize, message: impl Into<String>) -> CodecError {
    CodecError::SyntaxError {
        position,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShapeStyle {
    #[default]
    Compact,
    LayerMap,
}

fn encode_layer(layer: &Layer, out: &mut String) {
    for q in &layer.0 {
        match q {
            Some(p) => {
                out.push(p.kind.letter());
                out.push(p.color.letter());
            }
            None => out.push_str("--"),
        }
    }
}

pub fn encode_shape(shape: &Shape, style: ShapeStyle) -> String {
    match style {
        ShapeStyle::Compact => {
            let mut out = String::with_capacity(shape.layer_count() * 9);
            for (i, layer) in shape.layers().iter().enumerate() {
                if i > 0 {
                    out.push(':');
                }
                encode_layer(layer, &mut out);
            }
            out
        }
        ShapeStyle::LayerMap => {
            let mut out = String::from("{");
            for (i, layer) in shape.layers().iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("\"Layer {}\": \"", i + 1));
                encode_layer(layer, &mut out);
                out.push('"');
            }
            out.push('}');
            out
        }
    }
}

fn parse_layer(text: &str, offset: usize, layer_no: usize) -> Result<Layer, CodecError> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() != QUADRANTS * 2 {
        return Err(syntax(
            offset,
            format!("layer {layer_no} has {} characters, expected 8", chars.len()),
        ));
    }
    let mut layer = Layer::EMPTY;
    for q in 0..QUADRANTS {
        let (k, c) = (chars[2 * q], chars[2 * q + 1]);
        let cell = q + 1;
        match (k, c) {
            ('-', '-') => {}
            ('-', _) | (_, '-') => {
                return Err(syntax(offset + 2 * q, "half-empty cell"));
            }
            _ => {
                let kind = ShapeKind::from_letter(k).ok_or(CodecError::UnknownKind {
                    layer: layer_no,
                    cell,
                    found: k,
                })?;
                let color = ShapeColor::from_letter(c).ok_or(CodecError::UnknownColor {
                    layer: layer_no,
                    cell,
                    found: c,
                })?;
                layer.0[q] = Some(Piece::new(kind, color));
            }
        }
    }
    Ok(layer)
}

/// Parses either the compact or the layer-map form and validates the
/// result.
pub fn parse_shape(code: &str) -> Result<Shape, CodecError> {
    let trimmed = code.trim();
    let layers = if trimmed.starts_with('{') {
        parse_layer_map(trimmed)?
    } else {
        let mut layers = Vec::new();
        let mut offset = 0;
        for (i, part) in trimmed.split(':').enumerate() {
            layers.push(parse_layer(part, offset, i + 1)?);
            offset += part.chars().count() + 1;
        }
        layers
    };
    Shape::new(layers).map_err(CodecError::InvariantViolation)
}

fn parse_layer_map(text: &str) -> Result<Vec<Layer>, CodecError> {
    let map: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(text).map_err(|e| syntax(e.column().saturating_sub(1), e.to_string()))?;
    let mut layers = Vec::with_capacity(map.len());
    for i in 1..=map.len() {
        let key = format!("Layer {i}");
        let value = map
            .get(&key)
            .ok_or_else(|| syntax(0, format!("missing key {key:?}")))?;
        let cells = value
            .as_str()
            .ok_or_else(|| syntax(0, format!("{key:?} is not a string")))?;
        layers.push(parse_layer(cells, 0, i)?);
    }
    Ok(layers)
}

pub fn encode_cube(state: &CubeState) -> String {
    let mut out = String::with_capacity(6 * 28);
    for (i, f) in FaceId::ALL.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push(f.letter());
        out.push(':');
        for row in state.face(f) {
            out.push_str(" [");
            for (j, s) in row.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                out.push(s.letter());
            }
            out.push(']');
        }
    }
    out
}

#[derive(Debug)]
enum CubeToken {
    Label(FaceId),
    Open,
    Close,
    Sticker(StickerColor),
}

pub fn parse_cube(code: &str) -> Result<CubeState, CodecError> {
    let mut tokens = Vec::new();
    let mut chars = code.char_indices().peekable();
    let mut in_row = false;
    while let Some((pos, ch)) = chars.next() {
        match ch {
            c if c.is_whitespace() || c == ',' => {}
            '[' if !in_row => {
                in_row = true;
                tokens.push((pos, CubeToken::Open));
            }
            ']' if in_row => {
                in_row = false;
                tokens.push((pos, CubeToken::Close));
            }
            c if in_row && c.is_alphabetic() => {
                let color = StickerColor::from_letter(c)
                    .ok_or(CodecError::BadColorLetter { position: pos, found: c })?;
                tokens.push((pos, CubeToken::Sticker(color)));
            }
            c if !in_row && FaceId::from_letter(c).is_some() => {
                match chars.next() {
                    Some((_, ':')) => {}
                    _ => return Err(syntax(pos, "expected ':' after face label")),
                }
                tokens.push((pos, CubeToken::Label(FaceId::from_letter(c).unwrap())));
            }
            c => return Err(syntax(pos, format!("unexpected {c:?}"))),
        }
    }
    if in_row {
        return Err(syntax(code.len(), "unclosed row"));
    }
    let found = tokens
        .iter()
        .filter(|(_, t)| matches!(t, CubeToken::Sticker(_)))
        .count();
    if found != STICKERS {
        return Err(CodecError::WrongStickerCount { found });
    }

    let mut stickers = [StickerColor::Yellow; STICKERS];
    let mut it = tokens.into_iter();
    for face in FaceId::ALL {
        match it.next() {
            Some((_, CubeToken::Label(f))) if f == face => {}
            Some((pos, _)) => return Err(syntax(pos, format!("expected label {}", face.letter()))),
            None => return Err(syntax(code.len(), "missing face")),
        }
        for row in 0..3 {
            match it.next() {
                Some((_, CubeToken::Open)) => {}
                Some((pos, _)) => return Err(syntax(pos, "expected '['")),
                None => return Err(syntax(code.len(), "missing row")),
            }
            for col in 0..3 {
                match it.next() {
                    Some((_, CubeToken::Sticker(s))) => {
                        stickers[face.index() * 9 + row * 3 + col] = s;
                    }
                    Some((pos, _)) => return Err(syntax(pos, "expected 3 stickers per row")),
                    None => return Err(syntax(code.len(), "missing sticker")),
                }
            }
            match it.next() {
                Some((_, CubeToken::Close)) => {}
                Some((pos, _)) => return Err(syntax(pos, "expected ']'")),
                None => return Err(syntax(code.len(), "missing ']'")),
            }
        }
    }
    if let Some((pos, _)) = it.next() {
        return Err(syntax(pos, "trailing input"));
    }
    Ok(CubeState::from_stickers(stickers))
}

pub fn encode_shape_action(action: &ShapeAction) -> String {
    match action {
        ShapeAction::Cut => "cut".into(),
        ShapeAction::RotateCw => "rotate_cw".into(),
        ShapeAction::RotateCcw => "rotate_ccw".into(),
        ShapeAction::Mirror => "mirror".into(),
        ShapeAction::Fill { kind, color } => format!("fill({},{})", kind.letter(), color.letter()),
        ShapeAction::Paint { layer, color } => match layer {
            LayerSelector::All => format!("paint(all,{})", color.letter()),
            LayerSelector::Index(i) => format!("paint({i},{})", color.letter()),
        },
        ShapeAction::Stack(s) => format!("stack({})", encode_shape(s, ShapeStyle::Compact)),
    }
}

pub fn encode_shape_actions(actions: &[ShapeAction]) -> String {
    actions
        .iter()
        .map(encode_shape_action)
        .collect::<Vec<_>>()
        .join("; ")
}

fn single_letter(arg: &str, position: usize) -> Result<char, CodecError> {
    let mut chars = arg.trim().chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(syntax(position, format!("expected one letter, got {arg:?}"))),
    }
}

fn parse_two_args(body: &str, position: usize) -> Result<(&str, &str), CodecError> {
    body.split_once(',')
        .ok_or_else(|| syntax(position, "expected two arguments"))
}

fn parse_shape_action(token: &str, position: usize) -> Result<ShapeAction, CodecError> {
    let unknown = || CodecError::UnknownToken {
        position,
        token: token.to_string(),
    };
    let Some(open) = token.find('(') else {
        return match token {
            "cut" => Ok(ShapeAction::Cut),
            "rotate_cw" => Ok(ShapeAction::RotateCw),
            "rotate_ccw" => Ok(ShapeAction::RotateCcw),
            "mirror" => Ok(ShapeAction::Mirror),
            _ => Err(unknown()),
        };
    };
    let name = &token[..open];
    let body = token[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| syntax(position + token.len(), "expected ')'"))?;
    let arg_pos = position + open + 1;
    match name {
        "fill" => {
            let (k, c) = parse_two_args(body, arg_pos)?;
            let k = single_letter(k, arg_pos)?;
            let c = single_letter(c, arg_pos)?;
            Ok(ShapeAction::Fill {
                kind: ShapeKind::from_letter(k)
                    .ok_or(CodecError::UnknownKind { layer: 0, cell: 0, found: k })?,
                color: ShapeColor::from_letter(c)
                    .ok_or(CodecError::UnknownColor { layer: 0, cell: 0, found: c })?,
            })
        }
        "paint" => {
            let (l, c) = parse_two_args(body, arg_pos)?;
            let layer = match l.trim() {
                "all" => LayerSelector::All,
                n => match n.parse::<u8>() {
                    Ok(i) if (1..=4).contains(&i) => LayerSelector::Index(i),
                    _ => return Err(syntax(arg_pos, format!("bad layer {n:?}"))),
                },
            };
            let c = single_letter(c, arg_pos)?;
            Ok(ShapeAction::Paint {
                layer,
                color: ShapeColor::from_letter(c)
                    .ok_or(CodecError::UnknownColor { layer: 0, cell: 0, found: c })?,
            })
        }
        "stack" => Ok(ShapeAction::Stack(parse_shape(body)?)),
        _ => Err(unknown()),
    }
}

/// Parses a `; `-separated shape action list. Empty input is the empty list.
pub fn parse_shape_actions(code: &str) -> Result<Vec<ShapeAction>, CodecError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in code.split(';') {
        let lead = part.len() - part.trim_start().len();
        let token = part.trim();
        if token.is_empty() {
            if !code.trim().is_empty() {
                return Err(syntax(offset, "empty action"));
            }
        } else {
            out.push(parse_shape_action(token, offset + lead)?);
        }
        offset += part.len() + 1;
    }
    Ok(out)
}

pub fn parse_move(token: &str, position: usize) -> Result<CubeMove, CodecError> {
    let unknown = || CodecError::UnknownToken {
        position,
        token: token.to_string(),
    };
    let mut chars = token.chars();
    let head = chars.next().ok_or_else(unknown)?;
    let turn = match chars.as_str() {
        "" => Turn::Cw,
        "'" => Turn::Ccw,
        "2" => Turn::Half,
        _ => return Err(unknown()),
    };
    if let Some(f) = FaceId::from_letter(head) {
        return Ok(CubeMove::Face(f, turn));
    }
    if let Some(f) = FaceId::from_letter(head.to_ascii_uppercase()).filter(|_| head.is_ascii_lowercase()) {
        return Ok(CubeMove::Wide(f, turn));
    }
    if let Some(s) = SliceAxis::ALL.into_iter().find(|s| s.letter() == head) {
        return Ok(CubeMove::Slice(s, turn));
    }
    if let Some(a) = CubeAxis::ALL.into_iter().find(|a| a.letter() == head) {
        return Ok(CubeMove::Rotation(a, turn));
    }
    Err(unknown())
}

pub fn encode_moves(moves: &[CubeMove]) -> String {
    moves.iter().map(|m| m.token()).collect::<Vec<_>>().join(" ")
}

pub fn parse_moves(code: &str) -> Result<Vec<CubeMove>, CodecError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in code.split(' ') {
        if !part.is_empty() {
            out.push(parse_move(part, offset)?);
        }
        offset += part.len() + 1;
    }
    Ok(out)
}

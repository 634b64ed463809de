//! Byte-deterministic SVG output for shapes, cubes and option sheets.
//!
//! All coordinates pass through [`num`], which prints two decimals, and no
//! transcendental functions are evaluated at render time, so identical
//! inputs give identical bytes on every platform. Every figure carries its
//! canonical encoding in a `<desc>` element.

mod style;

pub use style::{RenderStyle, StyleError, STYLE_FORMAT_VERSION};

use std::fmt::Write;

use thiserror::Error;

use crate::codec::{encode_cube, encode_shape, ShapeStyle};
use crate::cube::{CubeState, FaceId};
use crate::shape::{Piece, Shape, ShapeColor, ShapeKind};

const COS30: f64 = 0.866_025_403_784_438_6;
const SIN30: f64 = 0.5;
const COS15: f64 = 0.965_925_826_289_068_3;
const SIN15: f64 = 0.258_819_045_102_520_8;

pub const MAX_OPTIONS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("{0} options do not fit one sheet (max {MAX_OPTIONS})")]
    TooManyOptions(usize),
    #[error("an option sheet needs at least 2 options, got {0}")]
    TooFewOptions(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeView {
    /// U, F and R faces, 27 stickers.
    Isometric,
    /// Unfolded cross, 54 stickers.
    Net,
}

/// Anything that can sit in an option-sheet cell.
#[derive(Debug, Clone, Copy)]
pub enum Figure<'a> {
    Shape(&'a Shape),
    Cube(&'a CubeState, CubeView),
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open_svg(out: &mut String, width: f64, height: f64) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(width),
        h = num(height)
    );
}

fn document(width: f64, height: f64, body: &str) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    open_svg(&mut out, width, height);
    out.push_str(body);
    out.push_str("</svg>\n");
    out
}

/// Glyph outline in the q1 frame (x right, y down, origin at the shape
/// center, radius 1). Returned as path commands with points to transform.
enum Seg {
    Move(f64, f64),
    Line(f64, f64),
    Arc(f64, f64),
}

fn glyph_outline(kind: ShapeKind) -> Vec<Seg> {
    use Seg::*;
    match kind {
        ShapeKind::Circle => vec![Move(0.0, 0.0), Line(0.0, -1.0), Arc(1.0, 0.0)],
        ShapeKind::Rectangle => vec![
            Move(0.0, 0.0),
            Line(0.0, -0.9),
            Line(0.9, -0.9),
            Line(0.9, 0.0),
        ],
        ShapeKind::Windmill => vec![
            Move(0.0, 0.0),
            Line(0.0, -0.6),
            Line(1.0, -1.0),
            Line(1.0, 0.0),
        ],
        ShapeKind::Star => vec![
            Move(0.0, 0.0),
            Line(0.0, -0.6),
            Line(1.0, -1.0),
            Line(0.6, 0.0),
        ],
        ShapeKind::Sector => vec![Move(0.0, 0.0), Line(SIN15, -COS15), Arc(COS15, -SIN15)],
    }
}

/// Quadrant `q` (0-based) is q1 rotated clockwise `q` quarter turns.
fn to_quadrant(q: usize, (x, y): (f64, f64)) -> (f64, f64) {
    (0..q).fold((x, y), |(x, y), _| (-y, x))
}

fn glyph_path(kind: ShapeKind, q: usize, cx: f64, cy: f64, radius: f64) -> String {
    let mut d = String::new();
    for seg in glyph_outline(kind) {
        let (cmd, p) = match seg {
            Seg::Move(x, y) => ("M", (x, y)),
            Seg::Line(x, y) => ("L", (x, y)),
            Seg::Arc(x, y) => ("A", (x, y)),
        };
        let (x, y) = to_quadrant(q, p);
        let (px, py) = (num(cx + x * radius), num(cy + y * radius));
        if cmd == "A" {
            let r = num(radius);
            let _ = write!(d, "A{r} {r} 0 0 1 {px} {py}");
        } else {
            let _ = write!(d, "{cmd}{px} {py}");
        }
    }
    d.push('Z');
    d
}

fn shape_body(shape: &Shape, style: &RenderStyle) -> String {
    let mut body = String::new();
    let code = encode_shape(shape, ShapeStyle::Compact);
    let _ = write!(body, "<desc>shape:{}</desc>", escape(&code));
    let size = style.canvas;
    let _ = write!(
        body,
        "<rect class=\"background\" x=\"0.00\" y=\"0.00\" width=\"{s}\" height=\"{s}\" fill=\"{}\"/>",
        style.background,
        s = num(size)
    );
    let layers = shape.layer_count() as f64;
    // center the stack vertically
    let base_x = size / 2.0 - style.layer_offset[0] * (layers - 1.0) / 2.0;
    let base_y = size / 2.0 - style.layer_offset[1] * (layers - 1.0) / 2.0;
    let mut scale = 1.0;
    for (i, layer) in shape.layers().iter().enumerate() {
        let cx = base_x + style.layer_offset[0] * i as f64;
        let cy = base_y + style.layer_offset[1] * i as f64;
        let radius = style.quadrant_radius * scale;
        for (q, content) in layer.0.iter().enumerate() {
            let Some(Piece { kind, color }) = content else { continue };
            let stroke = if *color == ShapeColor::Uncolored {
                format!(" stroke-dasharray=\"{}\"", num(style.stroke_width * 2.0))
            } else {
                String::new()
            };
            let _ = write!(
                body,
                "<path class=\"glyph\" data-layer=\"{}\" data-quadrant=\"{}\" data-piece=\"{}{}\" d=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"{stroke}/>",
                i + 1,
                q + 1,
                kind.letter(),
                color.letter(),
                glyph_path(*kind, q, cx, cy, radius),
                style.shape_fill(*color),
                style.outline,
                num(style.stroke_width),
            );
        }
        scale *= style.layer_scale;
    }
    body
}

/// One glyph per occupied quadrant, layers painted bottom first.
pub fn render_shape(shape: &Shape, style: &RenderStyle) -> String {
    document(style.canvas, style.canvas, &shape_body(shape, style))
}

fn polygon(out: &mut String, face: FaceId, index: usize, fill: &str, stroke: &str, pts: &[(f64, f64)]) {
    let points: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
    let _ = write!(
        out,
        "<polygon class=\"sticker\" data-face=\"{}\" data-index=\"{index}\" points=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\"/>",
        face.letter(),
        points.join(" ")
    );
}

fn cube_size(style: &RenderStyle, view: CubeView) -> (f64, f64) {
    let cell = style.sticker_size + style.sticker_gap;
    match view {
        CubeView::Net => (12.0 * cell + 2.0 * cell, 9.0 * cell + 2.0 * cell),
        CubeView::Isometric => {
            let s = style.sticker_size;
            (6.0 * COS30 * s + 2.0 * s, 6.0 * s + 2.0 * s)
        }
    }
}

fn cube_body(state: &CubeState, style: &RenderStyle, view: CubeView) -> String {
    let mut body = String::new();
    let _ = write!(body, "<desc>cube:{}</desc>", escape(&encode_cube(state).replace('\n', " | ")));
    let (w, h) = cube_size(style, view);
    let _ = write!(
        body,
        "<rect class=\"background\" x=\"0.00\" y=\"0.00\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
        num(w),
        num(h),
        style.background
    );
    match view {
        CubeView::Net => {
            let cell = style.sticker_size + style.sticker_gap;
            let origin = |f: FaceId| -> (f64, f64) {
                let (col, row) = match f {
                    FaceId::U => (1.0, 0.0),
                    FaceId::L => (0.0, 1.0),
                    FaceId::F => (1.0, 1.0),
                    FaceId::R => (2.0, 1.0),
                    FaceId::B => (3.0, 1.0),
                    FaceId::D => (1.0, 2.0),
                };
                (cell + col * 3.0 * cell, cell + row * 3.0 * cell)
            };
            for f in FaceId::ALL {
                let (ox, oy) = origin(f);
                for (r, row) in state.face(f).iter().enumerate() {
                    for (c, color) in row.iter().enumerate() {
                        let x = ox + c as f64 * cell;
                        let y = oy + r as f64 * cell;
                        let s = style.sticker_size;
                        polygon(
                            &mut body,
                            f,
                            r * 3 + c,
                            style.sticker_fill(*color),
                            &style.outline,
                            &[(x, y), (x + s, y), (x + s, y + s), (x, y + s)],
                        );
                    }
                }
            }
        }
        CubeView::Isometric => {
            let s = style.sticker_size;
            let (cx, cy) = (w / 2.0, h / 2.0);
            let project = |x: f64, y: f64, z: f64| {
                (cx + (x - z) * COS30 * s, cy + (x + z) * SIN30 * s - y * s)
            };
            // (face, point on face for row r, col c with offsets u, v in 0..=1)
            let corner = |f: FaceId, r: f64, c: f64| -> (f64, f64, f64) {
                match f {
                    FaceId::U => (-1.5 + c, 1.5, -1.5 + r),
                    FaceId::F => (-1.5 + c, 1.5 - r, 1.5),
                    FaceId::R => (1.5, 1.5 - r, 1.5 - c),
                    _ => unreachable!(),
                }
            };
            for f in [FaceId::U, FaceId::F, FaceId::R] {
                for (r, row) in state.face(f).iter().enumerate() {
                    for (c, color) in row.iter().enumerate() {
                        let (r0, c0) = (r as f64, c as f64);
                        let pts: Vec<(f64, f64)> = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]
                            .iter()
                            .map(|(dr, dc)| {
                                let (x, y, z) = corner(f, r0 + dr, c0 + dc);
                                project(x, y, z)
                            })
                            .collect();
                        polygon(&mut body, f, r * 3 + c, style.sticker_fill(*color), &style.outline, &pts);
                    }
                }
            }
        }
    }
    body
}

pub fn render_cube(state: &CubeState, style: &RenderStyle, view: CubeView) -> String {
    let (w, h) = cube_size(style, view);
    document(w, h, &cube_body(state, style, view))
}

fn figure_parts(fig: &Figure<'_>, style: &RenderStyle) -> (f64, f64, String) {
    match fig {
        Figure::Shape(s) => (style.canvas, style.canvas, shape_body(s, style)),
        Figure::Cube(c, view) => {
            let (w, h) = cube_size(style, *view);
            (w, h, cube_body(c, style, *view))
        }
    }
}

pub fn render_figure(fig: &Figure<'_>, style: &RenderStyle) -> String {
    let (w, h, body) = figure_parts(fig, style);
    document(w, h, &body)
}

/// Grid columns for an option sheet of `n` cells.
pub fn sheet_columns(n: usize) -> usize {
    match n {
        0..=2 => n.max(1),
        3 | 4 => 2,
        _ => 3,
    }
}

/// All options in one image, lettered A, B, ... in the given order.
pub fn render_option_sheet(options: &[Figure<'_>], style: &RenderStyle) -> Result<String, RenderError> {
    if options.len() > MAX_OPTIONS {
        return Err(RenderError::TooManyOptions(options.len()));
    }
    if options.len() < 2 {
        return Err(RenderError::TooFewOptions(options.len()));
    }
    let cols = sheet_columns(options.len());
    let rows = options.len().div_ceil(cols);
    let cell = style.option_cell;
    let label_band = style.label_size * 1.6;
    let (cell_w, cell_h) = (cell, cell + label_band);
    let mut body = String::new();
    let _ = write!(
        body,
        "<rect class=\"background\" x=\"0.00\" y=\"0.00\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        num(cols as f64 * cell_w),
        num(rows as f64 * cell_h)
    );
    for (i, fig) in options.iter().enumerate() {
        let (col, row) = ((i % cols) as f64, (i / cols) as f64);
        let (x, y) = (col * cell_w, row * cell_h);
        let letter = char::from(b'A' + i as u8);
        let _ = write!(
            body,
            "<g class=\"option\" data-option=\"{letter}\"><text class=\"label\" x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\">{letter}</text>",
            num(x + cell_w / 2.0),
            num(y + style.label_size * 1.2),
            num(style.label_size)
        );
        let (w, h, inner) = figure_parts(fig, style);
        let pad = cell * 0.05;
        let _ = write!(
            body,
            "<svg x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" preserveAspectRatio=\"xMidYMid meet\">{inner}</svg></g>",
            num(x + pad),
            num(y + label_band),
            num(cell - 2.0 * pad),
            num(cell - 2.0 * pad),
            num(w),
            num(h)
        );
    }
    Ok(document(cols as f64 * cell_w, rows as f64 * cell_h, &body))
}

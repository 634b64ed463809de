//! Render a shape, both cube views and an option sheet to SVG files.
//!
//! cargo run -p deformbench-core --example render_svg -- /tmp/figures

use std::fs;
use std::path::PathBuf;

use deformbench::codec::parse_shape;
use deformbench::cube::scramble;
use deformbench::render::{render_figure, render_option_sheet, CubeView, Figure, RenderStyle};
use deformbench::rng::SeededRandom;

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    fs::create_dir_all(&out).unwrap();
    let style = RenderStyle::default();

    let shape = parse_shape("Su--Ry--:Cg--Wb--").unwrap();
    let (cube, _) = scramble(15, &mut SeededRandom::new(3));
    fs::write(out.join("shape.svg"), render_figure(&Figure::Shape(&shape), &style)).unwrap();
    fs::write(out.join("cube-net.svg"), render_figure(&Figure::Cube(&cube, CubeView::Net), &style)).unwrap();
    fs::write(out.join("cube-iso.svg"), render_figure(&Figure::Cube(&cube, CubeView::Isometric), &style)).unwrap();

    let options: Vec<_> = ["Su--Ry--", "--Su--Ry", "Ry--Su--", "--Ry--Su"].iter().map(|c| parse_shape(c).unwrap()).collect();
    let figures: Vec<_> = options.iter().map(Figure::Shape).collect();
    fs::write(out.join("options.svg"), render_option_sheet(&figures, &style).unwrap()).unwrap();
    println!("wrote 4 figures to {}", out.display());
}

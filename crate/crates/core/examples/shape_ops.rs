//! Deform a shape step by step and print each code.
//!
//! cargo run -p deformbench-core --example shape_ops

use deformbench::codec::{encode_shape, parse_shape, ShapeStyle};
use deformbench::shape::{apply_action, LayerSelector, ShapeAction, ShapeColor, ShapeSpace};

fn main() {
    let mut shape = parse_shape("Su--Ry--").expect("valid code");
    let steps = [
        ShapeAction::RotateCw,
        ShapeAction::Mirror,
        ShapeAction::Stack(parse_shape("CgCgCgCg").unwrap()),
        ShapeAction::Paint { layer: LayerSelector::Index(2), color: ShapeColor::Red },
        ShapeAction::Cut,
    ];
    println!("start      {}", encode_shape(&shape, ShapeStyle::Compact));
    for action in &steps {
        shape = apply_action(&shape, action, ShapeSpace::Stacked).expect("action applies");
        println!("{:<10} {}", format!("{:?}", action.kind()), encode_shape(&shape, ShapeStyle::Compact));
    }
    println!("{}", encode_shape(&shape, ShapeStyle::LayerMap));
}

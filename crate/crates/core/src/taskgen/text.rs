//! Task rules in plain language, shared by prompts and training records.

use super::{Dimension, Direction};

pub fn option_letter(index: usize) -> char {
    char::from(b'A' + index as u8)
}

const SHAPE_CODE: &str = "\
A shape is written layer by layer, bottom layer first, layers separated by ':'. \
Each layer lists quadrants 1 to 4, starting top-right and going clockwise. \
A quadrant is a kind letter followed by a color letter, or '--' when empty. \
Kinds: C circle, R rectangle, W windmill, S star, F sector. \
Colors: r red, g green, b blue, y yellow, p purple, c cyan, u uncolored, w white.";

const SHAPE_OPS: &str = "\
Operations:
- cut: remove quadrants 1 and 2 (the right half) of every layer; pieces left hanging fall down.
- rotate_cw: rotate every layer 90 degrees clockwise.
- rotate_ccw: rotate every layer 90 degrees counterclockwise.
- mirror: flip every layer left to right.
- fill(K,c): fill each empty quadrant of the top layer that rests on something with kind K and color c.
- paint(all|N,c): recolor every piece of all layers, or of layer N, with color c.";

const STACK_OP: &str = "\
- stack(code): place the given shape on top; pieces fall until supported and at most 4 layers are kept.
Every piece above the bottom layer must rest on a piece directly below it.";

const CUBE_CODE: &str = "\
A cube is written as six 3x3 faces U (up), D (down), L (left), R (right), F (front), B (back), \
each row in brackets, read as seen when looking straight at that face with U on top \
(for U, F toward you; for D, F away from you). \
Colors: y yellow, w white, r red, o orange, g green, b blue.";

const CUBE_OPS: &str = "\
Moves use standard notation. U D L R F B turn one outer face 90 degrees clockwise as seen facing it; \
a ' suffix turns counterclockwise and a 2 suffix turns 180 degrees. \
Lowercase u d l r f b turn the face together with the adjacent middle layer. \
M, E and S turn the middle layers in the direction of L, D and F. \
x, y and z turn the whole cube in the direction of R, U and F.";

/// Rules of the task family and the meaning of each action.
pub fn rules_text(dimension: Dimension, direction: Direction) -> String {
    let body = match dimension {
        Dimension::TwoD => format!("{SHAPE_CODE}\n{SHAPE_OPS}"),
        Dimension::TwoPointFiveD => format!("{SHAPE_CODE}\n{SHAPE_OPS}\n{STACK_OP}"),
        Dimension::ThreeD => format!("{CUBE_CODE}\n{CUBE_OPS}"),
    };
    let task = match direction {
        Direction::Forward => "Apply the actions to the initial state in order and choose the option that shows the result.",
        Direction::Inverse => "Choose the option whose actions, applied in order, turn the initial state into the target state.",
    };
    format!("{body}\n\n{task}")
}

/// Lettered option sections, `[option A]` and so on, one encoding each.
pub fn options_block(option_encodings: &[String]) -> String {
    option_encodings
        .iter()
        .enumerate()
        .map(|(i, o)| format!("[option {}]\n{o}", option_letter(i)))
        .collect::<Vec<_>>()
        .join("\n")
}

pub const ANSWER_INSTRUCTION: &str = "End your reply with a line of the form `Answer: X`, where X is the option letter.";

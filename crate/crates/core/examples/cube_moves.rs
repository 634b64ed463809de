//! Scramble a cube, undo the scramble, and show a net along the way.
//!
//! cargo run -p deformbench-core --example cube_moves

use deformbench::codec::{encode_cube, encode_moves, parse_moves};
use deformbench::cube::{apply_moves, scramble, solved_cube};
use deformbench::rng::SeededRandom;

fn main() {
    let sexy = parse_moves("R U R' U'").unwrap();
    let mut state = solved_cube();
    for i in 1..=6 {
        state = apply_moves(&state, &sexy);
        println!("(R U R' U')^{i} solved: {}", state.is_solved());
    }

    let (scrambled, moves) = scramble(20, &mut SeededRandom::new(2024));
    println!("scramble: {}", encode_moves(&moves));
    println!("{}", encode_cube(&scrambled));
    let undo: Vec<_> = moves.iter().rev().map(|m| m.inverse()).collect();
    println!("undone: {}", apply_moves(&scrambled, &undo).is_solved());
}

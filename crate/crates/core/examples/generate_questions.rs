//! Generate one question per task family and write a bundle.
//!
//! cargo run -p deformbench-core --example generate_questions -- /tmp/bundle

use deformbench::render::RenderStyle;
use deformbench::taskgen::{assemble_question, options_block, write_bundle, Dimension, Direction, InputMode, TaskSpec};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "bundle".into());
    let style = RenderStyle::default();
    let mut questions = Vec::new();
    for dim in Dimension::ALL {
        for dir in Direction::ALL {
            let q = assemble_question(&TaskSpec::new(dim, dir, 3, InputMode::Image, 7), &style).unwrap();
            println!("== {dim} {dir} ({})\n{}\n{}", q.id, q.stem_encoding(), options_block(&q.option_encodings()));
            println!("gold: {}\n", q.gt_index);
            questions.push(q);
        }
    }
    write_bundle(out.as_ref(), &questions).unwrap();
    println!("bundle written to {out}");
}

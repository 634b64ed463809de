//! Export a small fine-tuning set and check every record.
//!
//! cargo run -p deformbench-core --example sft_export

use deformbench::rng::SeededRandom;
use deformbench::taskgen::{export_sft, validate_sft_record, Dimension, Direction, SftRecord};

fn main() {
    let mut records: Vec<SftRecord> = Vec::new();
    let manifest = export_sft(Dimension::ThreeD, Direction::Inverse, 3, 10, &SeededRandom::new(5), &mut records).unwrap();
    println!("{}", serde_json::to_string_pretty(&manifest).unwrap());
    for r in &records {
        validate_sft_record(r).unwrap();
    }
    let first = &records[0];
    println!("--- prompt ---\n{}\n--- completion ---\n{}", first.prompt, first.completion);
}

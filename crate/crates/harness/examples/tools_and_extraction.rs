//! Tool calls as a model would write them, and answer extraction on
//! typical replies.
//!
//! cargo run -p deformbench-harness --example tools_and_extraction

use deformbench_harness::extract::extract_answer;
use deformbench_harness::tools::{find_tool_calls, observation};

fn main() {
    let reply = r#"Let me check. CALL apply_shape_actions("Su--Ry--", "rotate_cw")
and CALL normalize_moves("R R R U2 U2") then CALL nonsense("x")"#;
    for call in find_tool_calls(reply) {
        println!("{}", observation(&call));
    }

    for raw in [
        "so the result is B. Answer: B",
        "The answer could be A or C... final: C",
        "Option (d) matches.",
        "I cannot determine.",
    ] {
        println!("{raw:?} -> {:?}", extract_answer(raw, 4));
    }
}

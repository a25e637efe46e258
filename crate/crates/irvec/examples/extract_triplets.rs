//! Turn a module into <head, relation, tail> training records: one TypeOf
//! per instruction, one NextInst per adjacent pair, one Arg_i per operand.
//!
//! ```bash
//! cargo run -p irvec --example extract_triplets
//! ```

use irvec::ir::parse_module;
use irvec::triplet::{extract_triplets, triplet_stats};

const PROGRAM: &str = r#"
define i32 @sum(i32 %a, i32 %b) {
entry:
  %a.addr = alloca i32
  %b.addr = alloca i32
  store i32 %a, i32* %a.addr
  store i32 %b, i32* %b.addr
  %0 = load i32, i32* %a.addr
  %1 = load i32, i32* %b.addr
  %add = add i32 %0, %1
  ret i32 %add
}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let module = parse_module(PROGRAM)?;
    let triplets = extract_triplets(&module);

    println!("head\trelation\ttail");
    for t in &triplets {
        println!("{}", t);
    }

    let (entities, relations, total) = triplet_stats(&triplets);
    println!("\n{} triplets, {} distinct entities, {} distinct relations", total, entities, relations);
    Ok(())
}

//! Parse a module from the textual IR subset and walk the hierarchy:
//! functions, blocks, instructions, and the abstraction each operand and
//! type receives.
//!
//! ```bash
//! cargo run -p irvec --example parse_and_print
//! ```

use irvec::ir::{classify_operand, normalize_type, parse_module};

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
  %cmp = icmp sgt i32 %add, 100
  br i1 %cmp, label %big, label %small
big:
  ret i32 100
small:
  ret i32 %add
}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let module = parse_module(PROGRAM)?;

    for func in &module.functions {
        println!("function @{} ({} blocks)", func.name, func.blocks.len());
        for param in &func.params {
            println!("  param %{}: {} [{}]", param.name, param.type_entity, param.clazz);
        }
        for block in &func.blocks {
            println!("  block %{} -> successors {:?}", block.label, block.successors);
            for instr in &block.instructions {
                let operands: Vec<String> = instr
                    .operands
                    .iter()
                    .map(|o| format!("{}:{}", o.raw, o.clazz))
                    .collect();
                println!(
                    "    [{:>2}] {:<6} type={:<10} writes_memory={:<5} operands=[{}]",
                    instr.id,
                    instr.opcode,
                    instr.type_entity.name(),
                    instr.writes_memory,
                    operands.join(", ")
                );
            }
        }
    }

    // standalone abstraction queries
    let func = &module.functions[0];
    println!();
    println!("classify_operand(\"0\")      = {}", classify_operand("0", func));
    println!("classify_operand(\"@sum\")   = {}", classify_operand("@sum", func));
    println!("classify_operand(\"%a.addr\") = {}", classify_operand("%a.addr", func));
    println!("normalize_type(\"i1\")        = {}", normalize_type("i1"));
    println!("normalize_type(\"<4 x float>\") = {}", normalize_type("<4 x float>"));

    // the module reprints in parseable form
    println!("\n--- printed module ---\n{}", module);
    Ok(())
}

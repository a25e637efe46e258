//! Reaching definitions over memory slots: stores kill earlier
//! definitions of their slot, merges union whatever survives on each
//! incoming path, and the block-local live set drops overwritten stores.
//!
//! ```bash
//! cargo run -p irvec --example reaching_definitions
//! ```

use irvec::flow::{classify, live_instructions, reaching_definitions, InstrClass};
use irvec::ir::parse_module;

/// The load of slot j at the merge can see three definitions: the alloca
/// (bypass path), the store in bb_a, and the store in bb_b.
const PROGRAM: &str = r#"
define void @g(i32* %a, i32* %b, i32* %c, i1 %c1, i1 %c2) {
entry:
  %p = alloca i32*
  %j = alloca i32*
  br i1 %c1, label %bb_a, label %merge
bb_a:
  store i32* %a, i32** %j
  br i1 %c2, label %bb_b, label %merge
bb_b:
  store i32* %b, i32** %p
  store i32* %c, i32** %j
  br label %merge
merge:
  %v1 = load i32*, i32** %j
  %v2 = load i32*, i32** %p
  ret void
}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let module = parse_module(PROGRAM)?;
    let func = &module.functions[0];
    let rd = reaching_definitions(func);

    println!("instructions:");
    for block in &func.blocks {
        for instr in &block.instructions {
            let class = match classify(instr) {
                InstrClass::Write => "write",
                InstrClass::Read => "read ",
            };
            println!("  [{:>2}] {} {}", instr.id, class, instr.text);
        }
    }

    println!("\nreaching definitions per use (instruction.operand -> def ids):");
    for ((instr, operand), sites) in &rd.uses {
        let ids: Vec<String> = sites.iter().map(|d| d.instr.to_string()).collect();
        println!("  {}.{}: {{{}}}", instr, operand, ids.join(", "));
    }

    println!("\nlive instructions per block (overwritten stores drop out):");
    for block in &func.blocks {
        let live = live_instructions(block, &rd, func);
        println!("  %{}: {:?}", block.label, live);
    }

    // a block overwriting its own store: the first store is dead
    let twice = parse_module(
        "define void @twice() {\n  %i = alloca i32\n  store i32 0, i32* %i\n\
         \x20 store i32 1, i32* %i\n  ret void\n}\n",
    )?;
    let f = &twice.functions[0];
    let rd2 = reaching_definitions(f);
    let live = live_instructions(&f.blocks[0], &rd2, f);
    println!("\ndouble store: live set {:?} (store id 1 killed by id 2)", live);
    Ok(())
}

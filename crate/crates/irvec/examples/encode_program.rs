//! Symbolic vs flow-aware encoding of one program, including a cycle of
//! mutually-reaching stores that the encoder resolves as a joint linear
//! system.
//!
//! ```bash
//! cargo run -p irvec --example encode_program
//! ```

use std::collections::BTreeSet;

use irvec::encoder::{EncodingConfig, EncodingContext, Mode};
use irvec::ir::parse_module;
use irvec::synth;
use irvec::transe::{self, TrainConfig};
use irvec::triplet::extract_triplets;

/// The stores in b1 and b2 reach each other through the loop, so their
/// instruction vectors are defined in terms of one another.
const PROGRAM: &str = r#"
define void @h(i32 %s, i32 %x, i32 %y, i1 %c) {
entry:
  %i = alloca i32
  store i32 0, i32* %i
  switch i32 %s, label %exit [ i32 0, label %b1  i32 1, label %b2 ]
b1:
  store i32 %x, i32* %i
  br label %b2
b2:
  store i32 %y, i32* %i
  br i1 %c, label %b1, label %exit
exit:
  %v = load i32, i32* %i
  ret void
}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a small vocabulary trained on generated programs
    let corpus = synth::toy_corpus(7, 40);
    let mut triplets = Vec::new();
    for text in &corpus {
        triplets.extend(extract_triplets(&parse_module(text)?));
    }
    let vocab = transe::train(
        &triplets,
        &TrainConfig {
            dimension: 8,
            epochs: 120,
            learning_rate: 0.05,
            batch_size: 64,
            rng_seed: 3,
            ..TrainConfig::default()
        },
    )?;

    let module = parse_module(PROGRAM)?;
    let head = |v: &[f64]| {
        v.iter().take(4).map(|x| format!("{:+.4}", x)).collect::<Vec<_>>().join(" ")
    };

    for mode in [Mode::Symbolic, Mode::FlowAware] {
        let config = EncodingConfig::new(mode, vocab.dimension);
        let mut ctx = EncodingContext::new(&module, &vocab, config)?;
        let vectors = ctx.program_vector()?;
        println!("--- {:?} ---", mode);
        for ((func, id), v) in &vectors.per_instruction {
            let text = module.function(func).unwrap().instruction(*id).unwrap().text.clone();
            println!("  inst {:>2}  [{} ...]  {}", id, head(v), text);
        }
        for ((func, label), v) in &vectors.per_block {
            println!("  bb   {}/{}  [{} ...]", func, label, head(v));
        }
        println!("  prog      [{} ...]", head(&vectors.program));
    }

    // the cycle can also be posed explicitly: stores 3 and 5 plus the load
    let config = EncodingConfig::new(Mode::FlowAware, vocab.dimension);
    let mut ctx = EncodingContext::new(&module, &vocab, config)?;
    let pending: BTreeSet<usize> = [3usize, 5, 7].into_iter().collect();
    let solved = ctx.resolve_cycle("h", &pending)?;
    println!("\njointly solved cycle vectors:");
    for (id, v) in &solved {
        println!("  inst {:>2}  [{} ...]", id, head(v));
    }
    Ok(())
}

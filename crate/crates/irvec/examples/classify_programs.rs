//! End-to-end downstream task: encode two families of generated kernels
//! (memory-traffic-heavy vs arithmetic-heavy) as program vectors and
//! cross-validate a gradient-boosted tree classifier over them.
//!
//! ```bash
//! cargo run --release -p irvec --example classify_programs
//! ```

use irvec::encoder::{encode, EncodingConfig, Mode};
use irvec::gbdt::{cross_validate, Dataset, GbdtConfig};
use irvec::ir::parse_module;
use irvec::synth::{self, Family};
use irvec::transe::{self, TrainConfig};
use irvec::triplet::extract_triplets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 60 kernels per family
    let mut modules = Vec::new();
    for idx in 0..60 {
        modules.push((0usize, synth::family_module(1000, Family::MemoryHeavy, idx)));
        modules.push((1usize, synth::family_module(2000, Family::ArithmeticHeavy, idx)));
    }

    // vocabulary trained on the same kernels
    let mut triplets = Vec::new();
    for (_, text) in &modules {
        triplets.extend(extract_triplets(&parse_module(text)?));
    }
    let vocab = transe::train(
        &triplets,
        &TrainConfig {
            dimension: 16,
            epochs: 60,
            learning_rate: 0.05,
            batch_size: 128,
            rng_seed: 77,
            ..TrainConfig::default()
        },
    )?;
    println!("vocabulary: {} entities over {} triplets", vocab.entities.len(), triplets.len());

    // program vector per kernel
    let mut dataset = Dataset::new(vec!["memory".into(), "arithmetic".into()]);
    for (label, text) in &modules {
        let module = parse_module(text)?;
        let vectors = encode(&module, &vocab, EncodingConfig::new(Mode::Symbolic, 16))?;
        dataset.push(vectors.program.clone(), *label);
    }
    println!("dataset: {} rows, {} features", dataset.rows.len(), dataset.feature_len());

    let config = GbdtConfig {
        learning_rate: 0.5,
        n_estimators: 70,
        max_depth: 10,
        n_folds: 10,
        rng_seed: 42,
    };
    let (folds, mean) = cross_validate(&dataset, &config)?;
    println!("\nper-fold accuracy:");
    for (i, acc) in folds.iter().enumerate() {
        println!("  fold {:>2}: {:.3}", i, acc);
    }
    println!("mean 10-fold accuracy: {:.3}", mean);
    Ok(())
}

//! Learn a seed embedding vocabulary from a generated corpus: every
//! opcode, type and operand-class entity gets an n-dimensional vector such
//! that head + relation lands near tail for observed triplets.
//!
//! ```bash
//! cargo run --release -p irvec --example train_vocabulary
//! ```

use irvec::ir::parse_module;
use irvec::synth;
use irvec::transe::{self, Distance, TrainConfig};
use irvec::triplet::extract_triplets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = synth::toy_corpus(42, 60);
    let mut triplets = Vec::new();
    for text in &corpus {
        triplets.extend(extract_triplets(&parse_module(text)?));
    }
    println!("corpus: {} modules, {} triplets", corpus.len(), triplets.len());

    let config = TrainConfig {
        dimension: 32,
        epochs: 200,
        margin: 1.0,
        learning_rate: 0.05,
        batch_size: 64,
        rng_seed: 13,
        distance: Distance::L2,
    };
    let vocab = transe::train_with_report(&triplets, &config, |r| {
        if r.epoch % 40 == 0 || r.epoch + 1 == config.epochs {
            println!("epoch {:>4}  mean loss {:.5}", r.epoch, r.mean_loss);
        }
    })?;

    println!(
        "\nvocabulary: {} entities, {} relations, dimension {}",
        vocab.entities.len(),
        vocab.relations.len(),
        vocab.dimension
    );

    let out = std::env::temp_dir().join("irvec-demo-vocab.tsv");
    vocab.save(&out)?;
    println!("saved to {}", out.display());

    // the file round-trips bit-exactly
    let reloaded = irvec::vocab::SeedVocabulary::load(&out)?;
    assert_eq!(reloaded, vocab);
    println!("reloaded vocabulary matches byte for byte");
    Ok(())
}

//! Vocabulary diagnostics: nearest neighbors, a 2-D PCA projection of all
//! entity embeddings, and intra/inter distances for semantic groups.
//!
//! ```bash
//! cargo run --release -p irvec --example inspect_vocabulary
//! ```

use std::collections::BTreeMap;

use irvec::inspect::{cluster_separation, nearest_neighbors, pca2};
use irvec::ir::parse_module;
use irvec::synth;
use irvec::transe::{self, TrainConfig};
use irvec::triplet::extract_triplets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = synth::toy_corpus(42, 100);
    let mut triplets = Vec::new();
    for text in &corpus {
        triplets.extend(extract_triplets(&parse_module(text)?));
    }
    let vocab = transe::train(
        &triplets,
        &TrainConfig {
            dimension: 32,
            epochs: 300,
            learning_rate: 0.05,
            batch_size: 64,
            rng_seed: 13,
            ..TrainConfig::default()
        },
    )?;
    println!("trained {} entities", vocab.entities.len());

    for query in ["add", "store", "ret"] {
        println!("\nnearest neighbors of `{}`:", query);
        for (name, dist) in nearest_neighbors(&vocab, query, 5)? {
            println!("  {:<12} {:.4}", name, dist);
        }
    }

    let proj = pca2(&vocab.entities)?;
    println!(
        "\n2-PCA explained variance: {:.3} + {:.3}",
        proj.explained_variance.0, proj.explained_variance.1
    );
    println!("name,x,y");
    for (name, (x, y)) in proj.points.iter().take(12) {
        println!("{},{:.4},{:.4}", name, x, y);
    }
    println!("... ({} points total)", proj.points.len());

    let mut groups = BTreeMap::new();
    groups.insert(
        "integer-arithmetic".to_string(),
        vec!["add".to_string(), "sub".into(), "mul".into(), "sdiv".into(), "udiv".into()],
    );
    groups.insert(
        "terminators".to_string(),
        vec!["ret".to_string(), "br".into(), "switch".into(), "unreachable".into()],
    );
    let (intra, inter) = cluster_separation(&vocab, &groups)?;
    println!("\narithmetic vs terminator separation:");
    println!("  mean intra-group distance: {:.4}", intra);
    println!("  mean inter-group distance: {:.4}", inter);
    println!("  separated: {}", intra < inter);
    Ok(())
}

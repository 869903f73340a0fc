// Score embeddings by sentiment classification accuracy over repeated
// random splits.

use embfuse::corpus::build_corpus;
use embfuse::eval::evaluate;
use embfuse::fusion::{fuse_pca, FusionInput};
use embfuse::synthetic::{SyntheticWorld, WorldConfig};

pub fn run_example() -> embfuse::Result<()> {
    let world = SyntheticWorld::new(
        WorldConfig {
            topics: 2,
            ..WorldConfig::default()
        },
        42,
    )?;
    let dataset = world.labeled_dataset("reviews", &[0, 1], 400, 0)?;
    let docs: Vec<&str> = dataset.documents().collect();
    let corpus = build_corpus("reviews", &docs, 1)?;

    let parts = vec![world.domain_embedding(0), world.domain_embedding(1)];
    let (fused, _) = fuse_pca(&FusionInput::for_corpus(parts.clone(), &corpus)?, 8)?;

    for store in parts.iter().chain([&fused.store]) {
        let report = evaluate(&dataset, store, 5, 0.7, 42)?;
        println!(
            "{:<22} {:.3} +- {:.3}",
            report.embedding, report.mean_accuracy, report.std_accuracy
        );
    }
    Ok(())
}

fn main() -> embfuse::Result<()> {
    run_example()
}

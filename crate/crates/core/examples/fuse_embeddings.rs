// Combine two domain embeddings over a task vocabulary with every fusion
// method.

use embfuse::corpus::build_corpus;
use embfuse::fusion::{
    fuse, fuse_pca, Activation, AutoencoderConfig, FusionInput, FusionMethod, FusionOptions,
};
use embfuse::synthetic::{SyntheticWorld, WorldConfig};

pub fn run_example() -> embfuse::Result<()> {
    let world = SyntheticWorld::new(WorldConfig::default(), 11)?;
    let task = build_corpus("task", &world.topic_documents(0, 150, 9), 1)?;
    let stores = vec![world.domain_embedding(0), world.domain_embedding(1)];
    let input = FusionInput::for_corpus(stores, &task)?;
    println!(
        "{} task words, concatenated dimension {}",
        input.vocab().len(),
        input.concat_dim()
    );

    let opts = FusionOptions {
        target_dim: 6,
        autoencoder: AutoencoderConfig {
            epochs: 300,
            learning_rate: 0.1,
            activation: Activation::Linear,
            ..AutoencoderConfig::default()
        },
    };
    for method in [
        FusionMethod::Concat,
        FusionMethod::Average,
        FusionMethod::Pca,
        FusionMethod::Autoencoder,
    ] {
        let fused = fuse(method, &input, &opts)?;
        let sidecar = fused.sidecar();
        println!(
            "{:<12} {} words x {} dims, final loss {:?}",
            method.to_string(),
            fused.store.len(),
            sidecar.out_dim,
            sidecar.training_loss_final
        );
    }

    let (_, model) = fuse_pca(&input, 6)?;
    let kept: f64 = model.explained_variance().iter().sum();
    let total: f64 = model.all_variances().iter().sum();
    println!("pca keeps {:.1}% of the variance", 100.0 * kept / total);
    Ok(())
}

fn main() -> embfuse::Result<()> {
    run_example()
}

// Rank library embeddings by kernel similarity between their corpora and a
// task corpus, next to the tf-idf cosine baseline.

use embfuse::corpus::{build_corpus, StopwordList};
use embfuse::similarity::{rank_embeddings, tfidf_cosine, KernelOptions, RankOptions};
use embfuse::synthetic::{SyntheticWorld, WorldConfig};
use embfuse::weighting::CorpusLibrary;

pub fn run_example() -> embfuse::Result<()> {
    let world = SyntheticWorld::new(
        WorldConfig {
            topics: 4,
            ..WorldConfig::default()
        },
        3,
    )?;
    let corpora = world
        .topics()
        .iter()
        .enumerate()
        .map(|(t, topic)| build_corpus(&topic.name, &world.topic_documents(t, 200, t as u64), 1))
        .collect::<embfuse::Result<Vec<_>>>()?;
    let library = CorpusLibrary::new(corpora, world.generic_embedding())?;
    // A fresh sample from the "cinema" topic.
    let task = build_corpus("reviews", &world.topic_documents(2, 100, 77), 1)?;

    let opts = RankOptions {
        kernel: KernelOptions {
            log_domain: true,
            ..KernelOptions::default()
        },
        ..RankOptions::default()
    };
    let ranking = rank_embeddings(&library, &task, &StopwordList::english(), &opts)?;
    println!("kernel similarity (log scores):");
    for e in &ranking.entries {
        println!("  {:<10} {:>10.3}", e.name, e.log_score);
    }

    let baseline = tfidf_cosine(&library, &task)?;
    println!("tf-idf cosine:");
    for e in &baseline.entries {
        println!("  {:<10} {:>10.4}", e.name, e.score);
    }
    Ok(())
}

fn main() -> embfuse::Result<()> {
    run_example()
}

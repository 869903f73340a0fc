// The most corpus-specific words of each library corpus.

use embfuse::corpus::build_corpus;
use embfuse::synthetic::{SyntheticWorld, WorldConfig};
use embfuse::weighting::{library_weights, top_alpha_words, CorpusLibrary};

pub fn run_example() -> embfuse::Result<()> {
    let world = SyntheticWorld::new(WorldConfig::default(), 7)?;
    let corpora = world
        .topics()
        .iter()
        .enumerate()
        .map(|(t, topic)| build_corpus(&topic.name, &world.topic_documents(t, 200, t as u64), 2))
        .collect::<embfuse::Result<Vec<_>>>()?;
    let library = CorpusLibrary::new(corpora, world.generic_embedding())?;

    for (i, corpus) in library.corpora().iter().enumerate() {
        let weights = library_weights(&library, i)?;
        let top: Vec<String> = top_alpha_words(&weights, 5)
            .into_iter()
            .map(|(w, a)| format!("{w} ({a:.2})"))
            .collect();
        println!("{}: {}", corpus.name(), top.join(", "));
    }
    Ok(())
}

fn main() -> embfuse::Result<()> {
    run_example()
}

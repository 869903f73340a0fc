// Tokenize documents into a corpus and list its most frequent content words.
//
// ```text
// cargo run --example corpus_stats
// ```

use embfuse::corpus::{build_corpus, tokenize, StopwordList};

const DOCUMENTS: &[&str] = &[
    "The flight was delayed, but the crew's service was excellent.",
    "Our flight landed early; the cabin crew were friendly.",
    "Lost luggage again! The airline's service desk didn't help.",
    "Smooth flight, great crew, 10 out of 10.",
];

pub fn run_example() -> embfuse::Result<()> {
    println!("tokens: {:?}", tokenize(DOCUMENTS[0]));

    let corpus = build_corpus("airline", DOCUMENTS, 2)?;
    println!(
        "{} documents, {} retained tokens, {} distinct words",
        corpus.num_documents(),
        corpus.total_tokens(),
        corpus.vocab_size()
    );
    let stopwords = StopwordList::english();
    for word in corpus.top_frequent_nonstop(&stopwords, 5) {
        println!("{word}\t{}", corpus.count(word));
    }
    Ok(())
}

fn main() -> embfuse::Result<()> {
    run_example()
}

// Read and write embeddings in word2vec text format.

use std::io::Cursor;

use embfuse::embedding::{EmbeddingStore, OovPolicy};

pub fn run_example() -> embfuse::Result<()> {
    let text = "3 2\nking 0.5 0.25\nqueen 0.5 -0.25\nrook 1e-3 0\n";
    let store = EmbeddingStore::read(Cursor::new(text), "chess")?;
    println!("{} words, dim {}", store.len(), store.dim());
    println!("queen  -> {:?}", store.lookup("queen", OovPolicy::Skip));
    println!("bishop -> {:?}", store.lookup("bishop", OovPolicy::Zero));

    let normalized = store.normalized();
    print!("{}", normalized.to_text());

    let malformed = "2 2\nking 0.5\n";
    if let Err(e) = EmbeddingStore::read(Cursor::new(malformed), "bad") {
        println!("rejected: {e}");
    }
    Ok(())
}

fn main() -> embfuse::Result<()> {
    run_example()
}

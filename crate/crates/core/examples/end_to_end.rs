// Write a fixture library to disk, then rank, fuse, and evaluate in one
// call, saving every artifact.

use embfuse::manifest::Manifest;
use embfuse::pipeline::{end_to_end, PipelineConfig};
use embfuse::synthetic::{write_fixture_library, WorldConfig};

pub fn run_example() -> embfuse::Result<()> {
    let dir = std::env::temp_dir().join(format!("embfuse-end-to-end-{}", std::process::id()));
    let fixtures = write_fixture_library(&dir, WorldConfig::default(), 5)?;
    let manifest = Manifest::load(&fixtures.manifest)?;

    let output = end_to_end(
        &manifest,
        &fixtures.manifest,
        &fixtures.dataset,
        &PipelineConfig::default(),
    )?;
    print!("{}", output.ranking.to_tsv(None));
    println!(
        "fused {} -> {} dims, accuracy {:.3}",
        output.provenance.selected.join(" + "),
        output.fused.out_dim(),
        output.report.mean_accuracy
    );

    let out = dir.join("run");
    output.write(&out)?;
    println!("artifacts in {}", out.display());
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

fn main() -> embfuse::Result<()> {
    run_example()
}

//! Acceptance gate: each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use embfuse::cli::run_with_io;
use embfuse::corpus::{build_corpus, Corpus, StopwordList};
use embfuse::embedding::EmbeddingStore;
use embfuse::fusion::{Activation, Autoencoder, AutoencoderConfig, PcaModel};
use embfuse::similarity::{
    rank_embeddings, rbf_similarity, tfidf_cosine, KernelOptions, RankOptions,
};
use embfuse::synthetic::{write_fixture_library, SyntheticWorld, WorldConfig};
use embfuse::weighting::{library_weights, task_weights, top_alpha_words, CorpusLibrary};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use common::{
    covariance, jacobi_eigenvalues, naive_rbf, random_distribution, rng, spread_matrix, Benchmark,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    check(took < limit, format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn rbf_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let dim = r.gen_range(1..=16);
        let sigma = r.gen_range(0.005..0.05);
        let spread = 0.02;
        let (np, nq) = (r.gen_range(1..=50), r.gen_range(1..=50));
        let p = random_distribution(&mut r, "p", np, dim, spread);
        let q = random_distribution(&mut r, "q", nq, dim, spread);
        let got = rbf_similarity(&p, &q, sigma)
            .map_err(|e| e.to_string())?
            .value;
        let want = naive_rbf(&p, &q, sigma);
        check(want > 0.0, format!("trial {trial}: reference underflowed"))?;
        let rel = ((got - want) / want).abs();
        worst = worst.max(rel);
        check(
            rel <= 1e-12,
            format!("trial {trial}: {got} vs {want} (rel {rel:e})"),
        )?;
    }
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("50 pairs, max rel err {worst:.2e}, {took:?}"))
}

fn random_counts(r: &mut rand_chacha::ChaCha8Rng, vocab: usize) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for i in 0..vocab {
        if r.gen_bool(0.7) {
            counts.insert(format!("word{i}"), r.gen_range(1..500));
        }
    }
    counts
}

fn alpha_recomputation() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let raw: Vec<BTreeMap<String, u64>> = (0..3).map(|_| random_counts(&mut r, 400)).collect();
    let task_raw = random_counts(&mut r, 450);
    let corpora: Vec<Corpus> = raw
        .iter()
        .enumerate()
        .map(|(i, c)| Corpus::from_counts(format!("c{i}"), c.clone(), 1).unwrap())
        .collect();
    let task = Corpus::from_counts("task", task_raw.clone(), 1).unwrap();
    let generic = EmbeddingStore::from_vectors("g", 1, [("word0", vec![0.0])]).unwrap();
    let lib = CorpusLibrary::new(corpora, generic).map_err(|e| e.to_string())?;

    let lengths: Vec<u64> = raw.iter().map(|c| c.values().sum()).collect();
    let total: u64 = lengths.iter().sum();
    let across = |w: &str| -> u64 { raw.iter().map(|c| c.get(w).copied().unwrap_or(0)).sum() };

    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut compare = |label: &str, got: Option<f64>, want: f64| -> Result<(), String> {
        let got = got.ok_or(format!("{label}: missing"))?;
        let rel = ((got - want) / want).abs();
        worst = worst.max(rel);
        checked += 1;
        check(rel <= 1e-14, format!("{label}: {got} vs {want}"))
    };
    for (i, counts) in raw.iter().enumerate() {
        let table = library_weights(&lib, i).map_err(|e| e.to_string())?;
        check(table.len() == counts.len(), format!("c{i}: table size"))?;
        for (w, &n) in counts {
            let want = (n as f64 / across(w) as f64) * (total as f64 / lengths[i] as f64);
            compare(&format!("c{i}/{w}"), table.get(w), want)?;
        }
    }
    let table = task_weights(&lib, &task).map_err(|e| e.to_string())?;
    let task_len: u64 = task_raw.values().sum();
    let mut expected = 0;
    for (w, &n) in &task_raw {
        let denom = across(w);
        if denom == 0 {
            check(
                table.get(w).is_none(),
                format!("task/{w}: should be omitted"),
            )?;
            continue;
        }
        expected += 1;
        let want = (n as f64 / denom as f64) * (total as f64 / task_len as f64);
        compare(&format!("task/{w}"), table.get(w), want)?;
    }
    check(table.len() == expected, "task table size")?;
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!(
        "{checked} weights, max rel err {worst:.2e}, {took:?}"
    ))
}

fn ranking_separation() -> Outcome {
    let stopwords = StopwordList::english();
    let mut min_log_ratio = f64::INFINITY;
    for trial in 0..20u64 {
        let world = SyntheticWorld::new(
            WorldConfig {
                topics: 2,
                ..WorldConfig::default()
            },
            100 + trial,
        )
        .unwrap();
        let corpora = (0..2)
            .map(|t| {
                let name = world.topics()[t].name.clone();
                build_corpus(name, &world.topic_documents(t, 300, t as u64), 1)
            })
            .collect::<embfuse::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?;
        let a = corpora[0].name().to_string();
        let lib = CorpusLibrary::new(corpora, world.generic_embedding()).unwrap();
        let task = build_corpus("task", &world.topic_documents(0, 120, 99), 1).unwrap();
        let opts = RankOptions {
            kernel: KernelOptions {
                log_domain: true,
                ..KernelOptions::default()
            },
            ..RankOptions::default()
        };
        let ranking = rank_embeddings(&lib, &task, &stopwords, &opts).map_err(|e| e.to_string())?;
        let first = &ranking.entries[0];
        let second = &ranking.entries[1];
        check(
            first.name == a,
            format!("trial {trial}: {} ranked first", first.name),
        )?;
        let log_ratio = first.log_score - second.log_score;
        min_log_ratio = min_log_ratio.min(log_ratio);
        check(
            log_ratio > 100f64.ln(),
            format!("trial {trial}: ratio only {:.3}", log_ratio.exp()),
        )?;
    }
    Ok(format!(
        "20 trials, min score ratio {:.3e}",
        min_log_ratio.exp()
    ))
}

fn planted_token() -> Outcome {
    const PLANT: &str = "zzzplant";
    for trial in 0..20u64 {
        let mut r = rng(200 + trial);
        let target = r.gen_range(0..3);
        let corpora: Vec<Corpus> = (0..3)
            .map(|i| {
                let mut docs =
                    embfuse::synthetic::zipf_documents(1000 * trial + i as u64, 100, 300, 30);
                if i == target {
                    for d in docs.iter_mut().step_by(20) {
                        d.push(' ');
                        d.push_str(PLANT);
                    }
                }
                build_corpus(format!("c{i}"), &docs, 1).unwrap()
            })
            .collect();
        let generic = EmbeddingStore::from_vectors("g", 1, [(PLANT, vec![0.0])]).unwrap();
        let lib = CorpusLibrary::new(corpora, generic).unwrap();
        for i in 0..3 {
            let table = library_weights(&lib, i).map_err(|e| e.to_string())?;
            let top = top_alpha_words(&table, 1)[0].0;
            if i == target {
                check(top == PLANT, format!("trial {trial}: top word {top}"))?;
            } else {
                check(table.get(PLANT).is_none(), format!("trial {trial}: leaked"))?;
            }
        }
    }
    Ok("20 trials, planted token top-1 in its corpus".into())
}

fn pca_correctness() -> Outcome {
    let start = Instant::now();
    let (n, d, t) = (200, 40, 10);
    let mut worst_gram = 0.0f64;
    let mut worst_rel = 0.0f64;
    for seed in 9..14u64 {
        let rows = spread_matrix(seed, n, d);
        let x = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
        let model = PcaModel::fit(&x, t).map_err(|e| e.to_string())?;
        let w = model.components();
        let gram = w.transpose() * w;
        let dev = (gram - DMatrix::<f64>::identity(t, t)).amax();
        worst_gram = worst_gram.max(dev);
        check(dev < 1e-10, format!("seed {seed}: gram deviation {dev:e}"))?;
        let vars = model.all_variances();
        check(
            vars.windows(2).all(|p| p[0] >= p[1]),
            format!("seed {seed}: variances increase"),
        )?;

        let eig = jacobi_eigenvalues(covariance(&rows));
        let trailing: f64 = eig[t..].iter().sum();
        let err = model.reconstruction_error(&x);
        let rel = ((err - trailing) / trailing).abs();
        worst_rel = worst_rel.max(rel);
        check(
            rel < 1e-8,
            format!("seed {seed}: {err} vs {trailing} (rel {rel:e})"),
        )?;
    }
    let took = within(start, Duration::from_secs(5))?;
    Ok(format!(
        "5 seeds, gram dev {worst_gram:.1e}, recon rel err {worst_rel:.1e}, {took:?}"
    ))
}

fn fusion_benchmark() -> Result<(Benchmark, [embfuse::EvalReport; 4]), String> {
    let bench = Benchmark::new(42);
    let seed = 42;
    let reports = [
        bench.eval(&bench.parts[0], seed),
        bench.eval(&bench.parts[1], seed),
        bench.eval(&bench.pca, seed),
        bench.eval(&bench.average, seed),
    ];
    Ok((bench, reports))
}

fn fusion_improves() -> Outcome {
    let start = Instant::now();
    let (_, [a, b, pca, _]) = fusion_benchmark()?;
    let best = a.mean_accuracy.max(b.mean_accuracy);
    check(
        pca.mean_accuracy >= best - 0.02,
        format!("pca {:.4} vs best part {best:.4}", pca.mean_accuracy),
    )?;
    let wins = (0..5)
        .filter(|&r| pca.accuracies[r] > a.accuracies[r].max(b.accuracies[r]))
        .count();
    check(
        wins >= 4,
        format!("pca strictly better in only {wins}/5 runs"),
    )?;
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!(
        "pca {:.4}, parts {:.4}/{:.4}, wins {wins}/5, {took:?}",
        pca.mean_accuracy, a.mean_accuracy, b.mean_accuracy
    ))
}

fn pca_vs_average() -> Outcome {
    let (_, [_, _, pca, avg]) = fusion_benchmark()?;
    check(
        pca.mean_accuracy >= avg.mean_accuracy - 0.01,
        format!(
            "pca {:.4} vs average {:.4}",
            pca.mean_accuracy, avg.mean_accuracy
        ),
    )?;
    Ok(format!(
        "pca {:.4}, average {:.4}",
        pca.mean_accuracy, avg.mean_accuracy
    ))
}

fn tfidf_copy() -> Outcome {
    let world = SyntheticWorld::new(WorldConfig::default(), 8).unwrap();
    let corpora = (0..3)
        .map(|t| {
            build_corpus(
                world.topics()[t].name.clone(),
                &world.topic_documents(t, 200, t as u64),
                1,
            )
        })
        .collect::<embfuse::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let copy = corpora[1].clone().with_name("task");
    let name = corpora[1].name().to_string();
    let lib = CorpusLibrary::new(corpora, world.generic_embedding()).unwrap();
    let ranking = tfidf_cosine(&lib, &copy).map_err(|e| e.to_string())?;
    let first = &ranking.entries[0];
    check(first.name == name, format!("{} ranked first", first.name))?;
    check(
        (first.score - 1.0).abs() <= 1e-12,
        format!("cosine {}", first.score),
    )?;
    Ok(format!(
        "copy ranked first, cosine - 1 = {:.1e}",
        first.score - 1.0
    ))
}

fn random_store(seed: u64) -> EmbeddingStore {
    let mut r = rng(seed);
    let dim = r.gen_range(1..=12);
    let words = r.gen_range(1..=60);
    let vectors = (0..words).map(|i| {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                let z: f64 = r.sample(StandardNormal);
                z * 10f64.powi(r.gen_range(-8..8))
            })
            .collect();
        (format!("w{i}_{}", r.gen::<u32>()), v)
    });
    EmbeddingStore::from_vectors(format!("s{seed}"), dim, vectors.collect::<Vec<_>>()).unwrap()
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("embfuse").chain(args.iter().copied());
    let code = run_with_io(argv, &mut out, &mut err);
    check(
        code == 0,
        format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)),
    )?;
    Ok(out)
}

fn read_all(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_file() {
            files.insert(
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            );
        }
    }
    files
}

fn round_trip_and_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for seed in 0..100u64 {
        let store = random_store(seed);
        let path = dir.path().join(format!("{}.vec", store.name()));
        store.save(&path).map_err(|e| e.to_string())?;
        let back = EmbeddingStore::load(&path).map_err(|e| e.to_string())?;
        let exact = back.len() == store.len()
            && back.dim() == store.dim()
            && store.iter().zip(back.iter()).all(|((w1, v1), (w2, v2))| {
                w1 == w2 && v1.iter().zip(v2).all(|(a, b)| a.to_bits() == b.to_bits())
            });
        check(exact, format!("store {seed} did not round-trip"))?;
    }

    let fx = write_fixture_library(dir.path().join("lib"), WorldConfig::default(), 5)
        .map_err(|e| e.to_string())?;
    let lib = fx.manifest.to_str().unwrap();
    let task = fx.task.to_str().unwrap();
    let data = fx.dataset.to_str().unwrap();
    let e0 = fx.embeddings[0].to_str().unwrap();
    let e1 = fx.embeddings[1].to_str().unwrap();

    let mut commands = 0;
    for pass in 0..2 {
        let out = dir.path().join(format!("pass{pass}"));
        fs::create_dir_all(&out).unwrap();
        let o = |name: &str| out.join(name).to_str().unwrap().to_string();
        let mut stdout = Vec::new();
        let plain: Vec<Vec<&str>> = vec![
            vec![
                "topwords",
                "--library",
                lib,
                "--entry",
                "cinema",
                "--n",
                "20",
            ],
            vec!["topwords", "--library", lib, "--task", task],
            vec![
                "similarity",
                "--library",
                lib,
                "--task",
                task,
                "--sigma",
                "0.05",
            ],
            vec!["rank", "--library", lib, "--task", task],
            vec!["rank", "--library", lib, "--task", task, "--log-domain"],
            vec![
                "rank",
                "--library",
                lib,
                "--task",
                task,
                "--method",
                "tfidf",
            ],
            vec!["eval", "--dataset", data, "--embedding", e0, "--seed", "3"],
        ];
        for args in &plain {
            stdout.push(run_cli(args)?);
        }
        for method in ["concat", "average", "pca", "autoencoder"] {
            let path = o(&format!("{method}.vec"));
            run_cli(&[
                "fuse",
                "--method",
                method,
                "--inputs",
                e0,
                e1,
                "--task",
                task,
                "--target-dim",
                "6",
                "--epochs",
                "20",
                "--out",
                &path,
            ])?;
        }
        let pdir = o("pipeline");
        run_cli(&[
            "pipeline",
            "--library",
            lib,
            "--task",
            data,
            "--out-dir",
            &pdir,
        ])?;
        commands = plain.len() + 5;
        fs::write(out.join("stdout.bin"), stdout.concat()).unwrap();
    }
    let a = read_all(&dir.path().join("pass0"));
    let b = read_all(&dir.path().join("pass1"));
    check(a == b, "fused outputs differ between runs")?;
    let pa = read_all(&dir.path().join("pass0/pipeline"));
    let pb = read_all(&dir.path().join("pass1/pipeline"));
    check(
        pa == pb && pa.len() == 5,
        "pipeline outputs differ between runs",
    )?;
    Ok(format!(
        "100 stores bit-exact, {commands} CLI invocations byte-identical"
    ))
}

fn autoencoder_contract() -> Outcome {
    let mut r = rng(10);
    let x = DMatrix::from_fn(100, 20, |_, _| r.sample::<f64, _>(StandardNormal));
    let config = AutoencoderConfig {
        seed: 10,
        epochs: 200,
        learning_rate: AE_LEARNING_RATE,
        activation: Activation::Linear,
    };
    let model = Autoencoder::train(&x, 20, &config).map_err(|e| e.to_string())?;
    let curve = model.loss_curve();
    check(
        curve.len() == 201,
        format!("curve has {} entries", curve.len()),
    )?;
    check(curve.iter().all(|l| l.is_finite()), "non-finite loss")?;
    let mse = model.final_loss();
    check(mse < 1e-3, format!("final mse {mse:e}"))?;
    Ok(format!(
        "final mse {mse:.2e} after 200 epochs (lr {AE_LEARNING_RATE})"
    ))
}

const AE_LEARNING_RATE: f64 = 0.5;

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "1 kernel similarity matches double-loop reference",
            rbf_oracle,
        ),
        ("2 weights match direct recomputation", alpha_recomputation),
        ("3 ranking separates topics", ranking_separation),
        ("4 planted token is top weighted word", planted_token),
        ("5 pca matches dense eigendecomposition", pca_correctness),
        ("6 pca fusion beats its parts", fusion_improves),
        ("7 pca fusion not worse than averaging", pca_vs_average),
        ("8 tf-idf ranks verbatim copy first", tfidf_copy),
        (
            "9 round-trip and cli determinism",
            round_trip_and_determinism,
        ),
        ("10 linear autoencoder reconstructs", autoencoder_contract),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{}/10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

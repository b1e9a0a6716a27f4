//! Writes a synthetic labeled corpus and its embeddings.
//!
//! `cargo run --example synth_corpus -- OUT.jsonl OUT.emb [events] [docs_per_event] [seed]`

use std::path::PathBuf;
use std::process::ExitCode;

use streamclust::io::{save_corpus, save_embeddings};
use streamclust::synth::{generate, SynthConfig};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 2 {
        eprintln!("usage: synth_corpus OUT.jsonl OUT.emb [events] [docs_per_event] [seed]");
        return ExitCode::from(1);
    }
    let num = |i: usize, default: u64| args.get(i).map_or(Ok(default), |s| s.parse::<u64>());
    let (Ok(events), Ok(per_event), Ok(seed)) = (num(2, 20), num(3, 30), num(4, 0)) else {
        eprintln!("events, docs_per_event and seed must be integers");
        return ExitCode::from(1);
    };
    let config = SynthConfig {
        events: events as usize,
        docs_per_event: per_event as usize,
        seed,
        ..SynthConfig::default()
    };
    let result = generate(&config).and_then(|c| {
        save_corpus(&c.docs, &PathBuf::from(&args[0]))?;
        save_embeddings(&c.store, &PathBuf::from(&args[1]))?;
        Ok(c)
    });
    match result {
        Ok(c) => {
            println!("{} documents, {} events", c.docs.len(), c.gold_count());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

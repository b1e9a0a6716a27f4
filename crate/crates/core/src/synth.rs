//! Planted synthetic news streams for testing and demos.
//!
//! Every event owns a private token, lemma and entity vocabulary, a dense
//! center and a short time window. Documents mix event terms with a shared
//! background vocabulary, so the planted partition is recoverable from each
//! representation on its own.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::model::{sort_stream, Document, SectionAnnotations, Timestamp, SECONDS_PER_DAY};
use crate::repr::EmbeddingStore;

/// 2015-01-01T00:00:00Z
const EPOCH: i64 = 1_420_070_400;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub events: usize,
    pub docs_per_event: usize,
    pub dim: usize,
    pub seed: u64,
    /// Gap between consecutive event starts.
    pub event_spacing_days: f64,
    /// Length of the window in which an event's documents appear.
    pub event_window_days: f64,
    pub event_vocab: usize,
    pub background_vocab: usize,
    pub title_terms: usize,
    pub body_terms: usize,
    pub entities_per_doc: usize,
    /// Probability that a sampled term comes from the background vocabulary.
    pub background_rate: f64,
    pub dense_noise: f64,
    /// When set, odd events reuse the vocabulary and dense center of the
    /// preceding even event and start this many days after it, so only time
    /// tells the pair apart.
    pub paired_gap_days: Option<f64>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            events: 20,
            docs_per_event: 30,
            dim: 16,
            seed: 0,
            event_spacing_days: 3.0,
            event_window_days: 4.0,
            event_vocab: 40,
            background_vocab: 300,
            title_terms: 5,
            body_terms: 30,
            entities_per_doc: 4,
            background_rate: 0.3,
            dense_noise: 0.15,
            paired_gap_days: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    /// In stream order, each carrying its gold label.
    pub docs: Vec<Document>,
    pub store: EmbeddingStore,
}

impl SynthCorpus {
    pub fn gold_count(&self) -> usize {
        self.docs
            .iter()
            .filter_map(|d| d.gold_cluster.as_deref())
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }
}

struct Event {
    theme: usize,
    start_days: f64,
    center: Vec<f64>,
}

fn unit_gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let v: Vec<f64> = (0..dim).map(|_| normal.sample(rng)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    v.into_iter().map(|x| x / n).collect()
}

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut events: Vec<Event> = Vec::with_capacity(config.events);
    for e in 0..config.events {
        let event = match config.paired_gap_days {
            Some(gap) if e % 2 == 1 => Event {
                theme: events[e - 1].theme,
                start_days: events[e - 1].start_days + gap,
                center: events[e - 1].center.clone(),
            },
            _ => Event {
                theme: e,
                start_days: e as f64 * config.event_spacing_days,
                center: unit_gaussian(&mut rng, config.dim),
            },
        };
        events.push(event);
    }

    let background: Vec<String> = (0..config.background_vocab).map(|i| format!("common{i}")).collect();
    let normal = Normal::new(0.0, config.dense_noise.max(0.0)).expect("valid normal");
    let mut docs = Vec::with_capacity(config.events * config.docs_per_event);
    let mut store = EmbeddingStore::new(config.dim);

    for (e, ev) in events.iter().enumerate() {
        let word = |i: usize| format!("ev{}w{}", ev.theme, i);
        let lemma = |i: usize| format!("ev{}l{}", ev.theme, i / 2);
        let entity = |i: usize| format!("Entity{}x{}", ev.theme, i);
        for j in 0..config.docs_per_event {
            let section = |n: usize, rng: &mut ChaCha8Rng| -> SectionAnnotations {
                let mut ann = SectionAnnotations::default();
                for _ in 0..n {
                    if !background.is_empty() && rng.random_bool(config.background_rate.clamp(0.0, 1.0)) {
                        let w = background.choose(rng).expect("non-empty").clone();
                        ann.lemmas.push(w.clone());
                        ann.tokens.push(w);
                    } else {
                        let i = rng.random_range(0..config.event_vocab.max(1));
                        ann.tokens.push(word(i));
                        ann.lemmas.push(lemma(i));
                    }
                }
                ann
            };
            let mut title = section(config.title_terms, &mut rng);
            let mut body = section(config.body_terms, &mut rng);
            for k in 0..config.entities_per_doc {
                let ent = entity(rng.random_range(0..(config.event_vocab / 4).max(1)));
                if k == 0 {
                    title.entities.push(ent.clone());
                }
                body.entities.push(ent);
            }
            let offset = rng.random::<f64>() * config.event_window_days;
            let ts = Timestamp(EPOCH + ((ev.start_days + offset) * SECONDS_PER_DAY).round() as i64);
            let id = format!("ev{e:03}-d{j:03}");
            let doc = Document::new(
                id.clone(),
                title.tokens.join(" "),
                body.tokens.join(" "),
                ts,
                title,
                body,
                None,
            )?
            .with_gold(format!("event-{e:03}"));
            docs.push(doc);
            let vector: Vec<f32> = ev.center.iter().map(|c| (c + normal.sample(&mut rng)) as f32).collect();
            store.insert(id, vector)?;
        }
    }
    sort_stream(&mut docs);
    Ok(SynthCorpus { docs, store })
}

//! Miranda-style news corpora.
//!
//! Input is either one JSON object per line or a single JSON array of
//! objects. Recognized fields:
//!
//! | field | aliases | required |
//! |---|---|---|
//! | `id` | | yes (string or integer) |
//! | `date` | `timestamp` | yes (date string or epoch seconds) |
//! | `lang` | `language` | no; records not equal to `eng` are dropped when filtering |
//! | `title` | | no |
//! | `text` | `body` | no |
//! | `cluster` | `gold_cluster`, `event`, `event_id` | no (string or integer) |
//! | `annotations` | | no |
//! | `features` | | no |
//!
//! `annotations` maps `title`, `body` and optionally `title_body` to
//! objects with `tokens`, `lemmas` and `entities` string lists. Without it
//! the raw title and text are tokenized on whitespace.
//!
//! `features` holds corpus-provided TF-IDF weights: keys of the form
//! `<unit>_<section>` where unit is `tokens`, `lemmas` or `entities` and
//! section is `title`, `body` or `all` (matched case-insensitively), each
//! mapping term to weight. Either every kept record has `features` or none
//! does.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{create, open};
use crate::error::{Error, Result};
use crate::model::{sparse_slot, Document, SectionAnnotations, SectionKind, Timestamp, Unit, NUM_SPARSE};
use crate::repr::ProvidedWeights;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirandaOptions {
    /// Keep only records whose language is `eng` (records without a
    /// language field are kept).
    pub english_only: bool,
}

impl Default for MirandaOptions {
    fn default() -> Self {
        MirandaOptions { english_only: true }
    }
}

#[derive(Debug, Clone)]
pub struct MirandaCorpus {
    /// In file order.
    pub docs: Vec<Document>,
    pub weights: Option<ProvidedWeights>,
}

pub fn load_miranda(path: &Path, options: MirandaOptions) -> Result<MirandaCorpus> {
    let reader = open(path)?;
    parse_miranda(reader, options)
}

pub fn parse_miranda<R: BufRead>(mut reader: R, options: MirandaOptions) -> Result<MirandaCorpus> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let records: Vec<(usize, Value)> = if text.trim_start().starts_with('[') {
        let values: Vec<Value> = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        values.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect()
    } else {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let v: Value = serde_json::from_str(line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            out.push((i + 1, v));
        }
        out
    };

    let mut docs = Vec::new();
    let mut weights = ProvidedWeights::new();
    let mut with_features = 0usize;
    let mut first_without: Option<usize> = None;
    let mut seen = HashSet::new();
    for (line, value) in records {
        let obj = value.as_object().ok_or_else(|| Error::Parse {
            line,
            message: "record is not a JSON object".into(),
        })?;
        if options.english_only {
            if let Some(lang) = field(obj, &["lang", "language"]) {
                if lang.as_str() != Some("eng") {
                    continue;
                }
            }
        }
        let doc = parse_record(obj, line)?;
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateDocument(doc.id));
        }
        match obj.get("features") {
            Some(f) => {
                weights.insert(&doc.id, parse_features(f, line)?)?;
                with_features += 1;
            }
            None => {
                first_without.get_or_insert(line);
            }
        }
        docs.push(doc);
    }
    let weights = match (with_features, first_without) {
        (0, _) => None,
        (_, Some(line)) => {
            return Err(Error::MissingField {
                line,
                field: "features".into(),
            })
        }
        _ => Some(weights),
    };
    Ok(MirandaCorpus { docs, weights })
}

fn field<'a>(obj: &'a Map<String, Value>, names: &[&str]) -> Option<&'a Value> {
    names.iter().find_map(|n| obj.get(*n)).filter(|v| !v.is_null())
}

fn scalar_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_record(obj: &Map<String, Value>, line: usize) -> Result<Document> {
    let missing = |f: &str| Error::MissingField {
        line,
        field: f.to_owned(),
    };
    let bad = |message: String| Error::Parse { line, message };
    let id = field(obj, &["id"])
        .and_then(scalar_string)
        .ok_or_else(|| missing("id"))?;
    let ts_value = field(obj, &["date", "timestamp"]).ok_or_else(|| missing("date"))?;
    let timestamp = match ts_value {
        Value::String(s) => Timestamp::parse(s).ok_or_else(|| bad(format!("unparseable date `{s}`")))?,
        Value::Number(n) => Timestamp(n.as_i64().ok_or_else(|| bad(format!("bad epoch seconds `{n}`")))?),
        _ => return Err(bad("date must be a string or integer".into())),
    };
    let text_of = |names: &[&str]| -> Result<String> {
        match field(obj, names) {
            None => Ok(String::new()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(bad(format!("`{}` must be a string", names[0]))),
        }
    };
    let title = text_of(&["title"])?;
    let body = text_of(&["text", "body"])?;
    let doc = match obj.get("annotations") {
        Some(ann) => {
            let ann = ann.as_object().ok_or_else(|| bad("annotations must be an object".into()))?;
            let section = |name: &str| -> Result<Option<SectionAnnotations>> {
                ann.get(name).map(|v| parse_section(v, line)).transpose()
            };
            let t = section("title")?.unwrap_or_default();
            let b = section("body")?.unwrap_or_default();
            let tb = section("title_body")?;
            Document::new(id, title, body, timestamp, t, b, tb)
        }
        None => Document::from_text(id, title, body, timestamp),
    }
    .map_err(|e| bad(e.to_string()))?;
    Ok(match field(obj, &["cluster", "gold_cluster", "event", "event_id"]) {
        Some(v) => doc.with_gold(scalar_string(v).ok_or_else(|| bad("cluster label must be a string or integer".into()))?),
        None => doc,
    })
}

fn string_list(v: Option<&Value>, line: usize) -> Result<Vec<String>> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|i| {
                i.as_str().map(str::to_owned).ok_or_else(|| Error::Parse {
                    line,
                    message: "annotation lists must hold strings".into(),
                })
            })
            .collect(),
        Some(_) => Err(Error::Parse {
            line,
            message: "annotation lists must be arrays".into(),
        }),
    }
}

fn parse_section(v: &Value, line: usize) -> Result<SectionAnnotations> {
    let obj = v.as_object().ok_or_else(|| Error::Parse {
        line,
        message: "annotation section must be an object".into(),
    })?;
    Ok(SectionAnnotations {
        tokens: string_list(obj.get("tokens"), line)?,
        lemmas: string_list(obj.get("lemmas"), line)?,
        entities: string_list(obj.get("entities"), line)?,
    })
}

fn parse_features(v: &Value, line: usize) -> Result<[Vec<(String, f64)>; NUM_SPARSE]> {
    let bad = |message: String| Error::Parse { line, message };
    let obj = v.as_object().ok_or_else(|| bad("features must be an object".into()))?;
    let mut bags: [Vec<(String, f64)>; NUM_SPARSE] = Default::default();
    for (key, bag) in obj {
        let lower = key.to_ascii_lowercase();
        let Some((unit, section)) = lower.split_once('_') else {
            continue;
        };
        let unit = match unit {
            "tokens" | "token" => Unit::Token,
            "lemmas" | "lemma" => Unit::Lemma,
            "entities" | "entity" => Unit::Entity,
            _ => continue,
        };
        let section = match section {
            "title" => SectionKind::Title,
            "body" => SectionKind::Body,
            "all" | "titlebody" | "title_body" => SectionKind::TitleBody,
            _ => continue,
        };
        let terms = bag.as_object().ok_or_else(|| bad(format!("feature `{key}` must map terms to weights")))?;
        let mut pairs = Vec::with_capacity(terms.len());
        for (term, w) in terms {
            let w = w
                .as_f64()
                .filter(|w| w.is_finite())
                .ok_or_else(|| bad(format!("feature `{key}` has a non-numeric weight for `{term}`")))?;
            pairs.push((term.clone(), w));
        }
        bags[sparse_slot(unit, section)] = pairs;
    }
    Ok(bags)
}

fn section_json(s: &SectionAnnotations) -> Value {
    json!({ "tokens": s.tokens, "lemmas": s.lemmas, "entities": s.entities })
}

/// Writes fully annotated JSON lines readable by [`load_miranda`].
pub fn write_corpus<W: Write>(mut out: W, docs: &[Document]) -> Result<()> {
    for d in docs {
        let mut rec = Map::new();
        rec.insert("id".into(), json!(d.id));
        rec.insert("date".into(), json!(d.timestamp.to_string()));
        rec.insert("lang".into(), json!("eng"));
        rec.insert("title".into(), json!(d.title));
        rec.insert("text".into(), json!(d.body));
        if let Some(c) = &d.gold_cluster {
            rec.insert("cluster".into(), json!(c));
        }
        let mut ann = BTreeMap::new();
        ann.insert("title", section_json(d.section(SectionKind::Title)));
        ann.insert("body", section_json(d.section(SectionKind::Body)));
        ann.insert("title_body", section_json(d.section(SectionKind::TitleBody)));
        rec.insert("annotations".into(), json!(ann));
        serde_json::to_writer(&mut out, &Value::Object(rec)).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_corpus(docs: &[Document], path: &Path) -> Result<()> {
    write_corpus(create(path)?, docs)
}

//! TDT Pilot corpus, on-topic documents only.
//!
//! Input is one JSON object per line with `id`, `date` (or `timestamp`),
//! `text` (or `body`) and `event`. Records without an event are off-topic
//! and skipped. The corpus has no titles, so the title section is empty and
//! the title+body section equals the body.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use serde_json::Value;

use super::{open, read_to_string};
use crate::error::{Error, Result};
use crate::model::{Document, SectionAnnotations, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitSide {
    Train,
    Test,
}

impl std::str::FromStr for SplitSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(SplitSide::Train),
            "test" => Ok(SplitSide::Test),
            other => Err(Error::InvalidParameter(format!("unknown split `{other}`"))),
        }
    }
}

const TRAIN_EVENTS: [&str; 13] = [
    "Karrigan Harding",
    "Shannon Faulker",
    "Quayle lung clot",
    "Haiti ousts observers",
    "NYC Subway bombing",
    "Carlos the Jackal",
    "USAir 427 crash",
    "Lost in Iraq",
    "Death of Kim Jong Il",
    "Clinic Murders",
    "Kobe Japan quake",
    "Serbs violate Bihac",
    "OK-City bombing",
];

const TEST_EVENTS: [&str; 12] = [
    "Pentium chip flaw",
    "Cuban riot in Panama",
    "Justice-to-be Breyer",
    "Humble TX flooding",
    "WTC Bombing trial",
    "Cessna on White House",
    "Aldrich Ames",
    "Comet into Jupiter",
    "Serbians down F-16",
    "Carter in Bosnia",
    "Halls copter",
    "DNA in OJ trial",
];

// alternate spellings found in distributions of the corpus
const ALIASES: [(&str, &str); 2] = [("Shannon Faulkner", "Shannon Faulker"), ("USAir 417 crash", "USAir 427 crash")];

/// Lowercased alphanumerics only, so punctuation and spacing variants match.
fn normalize(event: &str) -> String {
    event
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Maps event names to a split side.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTable {
    events: HashMap<String, SplitSide>,
}

impl SplitTable {
    /// The published 13-event train / 12-event test partition.
    pub fn standard() -> Self {
        let mut events = HashMap::new();
        for e in TRAIN_EVENTS {
            events.insert(normalize(e), SplitSide::Train);
        }
        for e in TEST_EVENTS {
            events.insert(normalize(e), SplitSide::Test);
        }
        for (alias, canonical) in ALIASES {
            let side = events[&normalize(canonical)];
            events.insert(normalize(alias), side);
        }
        SplitTable { events }
    }

    /// Reads `event<TAB>train|test` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut events = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (event, side) = line.rsplit_once('\t').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected `event<TAB>train|test`".into(),
            })?;
            let side = side.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("unknown split `{side}`"),
            })?;
            events.insert(normalize(event), side);
        }
        Ok(SplitTable { events })
    }

    pub fn load(path: &Path) -> Result<Self> {
        SplitTable::parse(&read_to_string(path)?)
    }

    pub fn side_of(&self, event: &str) -> Option<SplitSide> {
        self.events.get(&normalize(event)).copied()
    }

    pub fn events(&self, side: SplitSide) -> usize {
        self.events.values().filter(|s| **s == side).count()
    }
}

pub fn load_tdt(path: &Path, table: &SplitTable, side: SplitSide) -> Result<Vec<Document>> {
    parse_tdt(open(path)?, table, side)
}

pub fn parse_tdt<R: BufRead>(reader: R, table: &SplitTable, side: SplitSide) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse { line: lineno, message };
        let v: Value = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| bad("record is not a JSON object".into()))?;
        let event = match obj.get("event") {
            None | Some(Value::Null) => continue,
            Some(Value::String(s)) if s.trim().is_empty() => continue,
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(bad("event must be a string".into())),
        };
        let doc_side = table.side_of(&event).ok_or_else(|| Error::UnknownEvent(event.clone()))?;
        if doc_side != side {
            continue;
        }
        let missing = |f: &str| Error::MissingField {
            line: lineno,
            field: f.to_owned(),
        };
        let id = match obj.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => return Err(missing("id")),
        };
        let timestamp = match obj.get("date").or_else(|| obj.get("timestamp")) {
            Some(Value::String(s)) => Timestamp::parse(s).ok_or_else(|| bad(format!("unparseable date `{s}`")))?,
            Some(Value::Number(n)) => Timestamp(n.as_i64().ok_or_else(|| bad(format!("bad epoch seconds `{n}`")))?),
            _ => return Err(missing("date")),
        };
        let body = match obj.get("text").or_else(|| obj.get("body")) {
            Some(Value::String(s)) => s.clone(),
            _ => return Err(missing("text")),
        };
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateDocument(id));
        }
        let body_ann = SectionAnnotations::from_raw_text(&body);
        let doc = Document::new(id, "", body, timestamp, SectionAnnotations::default(), body_ann, None)
            .map_err(|e| bad(e.to_string()))?
            .with_gold(event);
        docs.push(doc);
    }
    Ok(docs)
}

//! Assignment files and gold labels.
//!
//! Assignments are tab-separated with the header
//! `doc_id  cluster_id  created  c_score  creation_prob`; `created` is 0 or 1.

use std::io::{BufRead, Write};
use std::path::Path;

use super::corpus::{load_miranda, MirandaOptions};
use super::{create, open};
use crate::engine::Assignment;
use crate::error::{Error, Result};
use crate::metrics::Partition;

pub const ASSIGNMENT_HEADER: &str = "doc_id\tcluster_id\tcreated\tc_score\tcreation_prob";

pub fn write_assignments<W: Write>(mut out: W, assignments: &[Assignment]) -> Result<()> {
    writeln!(out, "{ASSIGNMENT_HEADER}")?;
    for a in assignments {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            a.doc_id, a.cluster_id, a.created as u8, a.c_score, a.creation_prob
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_assignments(assignments: &[Assignment], path: &Path) -> Result<()> {
    write_assignments(create(path)?, assignments)
}

pub fn read_assignments<R: BufRead>(input: R) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 {
            if line.trim_end() != ASSIGNMENT_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: "missing assignment header".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse { line: lineno, message };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
        out.push(Assignment {
            doc_id: f[0].to_owned(),
            cluster_id: f[1].parse().map_err(|_| bad(format!("bad cluster id `{}`", f[1])))?,
            created: match f[2] {
                "0" => false,
                "1" => true,
                other => return Err(bad(format!("created must be 0 or 1, got `{other}`"))),
            },
            c_score: num(f[3])?,
            creation_prob: num(f[4])?,
        });
    }
    Ok(out)
}

pub fn load_assignments(path: &Path) -> Result<Vec<Assignment>> {
    read_assignments(open(path)?)
}

pub fn assignments_partition(assignments: &[Assignment]) -> Result<Partition> {
    Partition::from_pairs(assignments.iter().map(|a| (a.doc_id.clone(), a.cluster_id.to_string())))
}

/// `doc_id<TAB>label` lines, with an optional `doc_id<TAB>label` header.
pub fn read_gold_tsv<R: BufRead>(input: R) -> Result<Partition> {
    let mut p = Partition::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') || (i == 0 && line.trim_end() == "doc_id\tlabel") {
            continue;
        }
        let (doc, label) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: "expected `doc_id<TAB>label`".into(),
        })?;
        p.insert(doc, label.trim_end())?;
    }
    Ok(p)
}

/// Gold labels from a TSV file, or from the cluster field of a corpus file
/// (`.json` / `.jsonl`).
pub fn load_gold(path: &Path) -> Result<Partition> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
    if ext == "json" || ext == "jsonl" {
        let corpus = load_miranda(path, MirandaOptions::default())?;
        let mut p = Partition::new();
        for d in corpus.docs {
            let label = d.gold_cluster.ok_or_else(|| Error::MissingGoldLabel(d.id.clone()))?;
            p.insert(d.id, label)?;
        }
        Ok(p)
    } else {
        read_gold_tsv(open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = vec![
            Assignment {
                doc_id: "d1".into(),
                cluster_id: 0,
                created: true,
                c_score: 0.0,
                creation_prob: 1.0,
            },
            Assignment {
                doc_id: "d2".into(),
                cluster_id: 0,
                created: false,
                c_score: 2.0 / 3.0,
                creation_prob: 0.123456789,
            },
        ];
        let mut buf = Vec::new();
        write_assignments(&mut buf, &a).unwrap();
        assert_eq!(read_assignments(&buf[..]).unwrap(), a);
        let p = assignments_partition(&a).unwrap();
        assert_eq!(p.cluster_count(), 1);
    }

    #[test]
    fn gold_tsv() {
        let p = read_gold_tsv("doc_id\tlabel\na\tx\nb\ty\n".as_bytes()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.label("b"), Some("y"));
        assert!(read_gold_tsv("a\tx\na\ty\n".as_bytes()).is_err());
        assert!(read_assignments("nope\n".as_bytes()).is_err());
    }
}

//! Minimal `>`-header sequence reader.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqRecord {
    /// First whitespace-separated token of the header.
    pub taxon: String,
    pub seq: String,
}

pub fn parse_fasta(text: &str) -> Result<Vec<SeqRecord>> {
    let mut records: Vec<SeqRecord> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            let taxon = header.split_whitespace().next().ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: "header has no taxon id".into(),
            })?;
            records.push(SeqRecord {
                taxon: taxon.to_string(),
                seq: String::new(),
            });
        } else {
            let rec = records.last_mut().ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: "sequence data before the first header".into(),
            })?;
            rec.seq.extend(
                line.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| c.to_ascii_uppercase()),
            );
        }
    }
    Ok(records)
}

pub fn write_fasta(records: &[SeqRecord], line_width: usize) -> String {
    let mut out = String::new();
    for r in records {
        out.push('>');
        out.push_str(&r.taxon);
        out.push('\n');
        let bytes = r.seq.as_bytes();
        for chunk in bytes.chunks(line_width.max(1)) {
            out.push_str(std::str::from_utf8(chunk).expect("ascii sequence"));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_multiline_records() {
        let recs = parse_fasta(">t1 some description\nacg\nTT\n\n>t2\nGGG\n").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].taxon, "t1");
        assert_eq!(recs[0].seq, "ACGTT");
        assert_eq!(recs[1].seq, "GGG");
        assert_eq!(parse_fasta(&write_fasta(&recs, 2)).unwrap(), recs);
    }

    #[test]
    fn rejects_headless_sequence() {
        assert!(matches!(parse_fasta("ACGT\n"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_fasta(">\nACGT").is_err());
    }
}

//! K-mer classification on one-hot databases.
//!
//! A query k-mer is compared by opening, for each base, the single row of
//! its slot that holds that base's hot cell: the sensed value is 1 exactly
//! where the stored base equals the query base, so each base costs one
//! data-row read. Per-base results fold into the running match as in the
//! NAND compare; the matching column addresses identify the taxa.

pub mod db;
pub mod fasta;
pub mod onehot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitRow;
use crate::cam::compile::{compile_chain, compile_hd1_chain, CompiledCompare, Fold};
use crate::cam::layout::LayoutMap;
use crate::cam::run_compare;
use crate::config::{Picos, TimingModel};
use crate::dram::Subarray;
use crate::error::{Error, Result};

pub use db::{extract_kmers, KmerDatabase, TaxonGroup};
pub use fasta::{parse_fasta, write_fasta, SeqRecord};
pub use onehot::{decode_kmer_onehot, encode_kmer_onehot, Base, Kmer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MatchKind {
    Exact,
    Hd1,
}

impl FromStr for MatchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "nand" => Ok(MatchKind::Exact),
            "hd1" => Ok(MatchKind::Hd1),
            other => Err(Error::ModeMismatch(format!(
                "k-mer search supports exact/nand or hd1, got {other:?}"
            ))),
        }
    }
}

impl MatchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchKind::Exact => "exact",
            MatchKind::Hd1 => "hd1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub query: String,
    pub kind: MatchKind,
    /// Global columns holding a matching k-mer.
    pub columns: BTreeSet<usize>,
    pub taxa: BTreeSet<String>,
    /// Simulated time spent on this query's compares.
    pub simulated_ps: Picos,
}

/// Data rows sensed for `q` against the stratum starting at `base_row`.
pub fn onehot_sensed_rows(q: &Kmer, base_row: usize) -> Vec<usize> {
    q.0.iter()
        .enumerate()
        .map(|(j, b)| base_row + 4 * j + b.offset())
        .collect()
}

/// Compare program for one stratum.
pub fn compile_onehot_compare(
    q: &Kmer,
    base_row: usize,
    kind: MatchKind,
    layout: &LayoutMap,
    t: &TimingModel,
) -> Result<CompiledCompare> {
    let rows = onehot_sensed_rows(q, base_row);
    match kind {
        MatchKind::Exact => compile_chain(&rows, Fold::And, layout, t),
        MatchKind::Hd1 => compile_hd1_chain(&rows, layout, t),
    }
}

fn classify_on(
    q: &Kmer,
    kind: MatchKind,
    db: &KmerDatabase,
    subarrays: &mut [Subarray],
) -> Result<ClassificationResult> {
    if q.len() != db.k {
        return Err(Error::LengthMismatch {
            expected: db.k,
            got: q.len(),
        });
    }
    let t = &db.device.timing;
    let mut columns = BTreeSet::new();
    let mut simulated_ps = 0;
    for stratum in 0..db.strata {
        let compiled = compile_onehot_compare(q, db.stratum_base(stratum), kind, &db.layout, t)?;
        simulated_ps += compiled.trace.duration() * subarrays.len() as Picos;
        for (s, sub) in subarrays.iter_mut().enumerate() {
            let occupied = &db.occupied[s][stratum];
            if occupied.count_ones() == 0 {
                continue;
            }
            let mv = run_compare(&compiled, sub)?;
            let hits = mv.matches();
            for c in hits.ones_positions() {
                if occupied.get(c) {
                    columns.insert(s * db.width + c);
                }
            }
        }
    }
    let taxa = columns
        .iter()
        .filter_map(|&c| db.taxon_of_column(c).map(str::to_string))
        .collect();
    Ok(ClassificationResult {
        query: q.to_string(),
        kind,
        columns,
        taxa,
        simulated_ps,
    })
}

impl KmerDatabase {
    pub fn classify(&mut self, q: &Kmer, kind: MatchKind) -> Result<ClassificationResult> {
        let mut subs = std::mem::take(&mut self.subarrays);
        let out = classify_on(q, kind, self, &mut subs);
        self.subarrays = subs;
        out
    }

    /// Classifies every query, on up to `parallel` threads each owning a
    /// private copy of the subarrays. Results keep query order.
    pub fn classify_batch(&mut self, queries: &[Kmer], kind: MatchKind, parallel: usize) -> Result<BatchResult> {
        if let Some(bad) = queries.iter().find(|q| q.len() != self.k) {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: bad.len(),
            });
        }
        let threads = parallel.max(1).min(queries.len().max(1));
        let results = if threads <= 1 {
            queries
                .iter()
                .map(|q| self.classify(q, kind))
                .collect::<Result<Vec<_>>>()?
        } else {
            let chunk = queries.len().div_ceil(threads);
            let db: &KmerDatabase = self;
            let parts: Vec<Result<Vec<ClassificationResult>>> = std::thread::scope(|scope| {
                let handles: Vec<_> = queries
                    .chunks(chunk)
                    .map(|qs| {
                        scope.spawn(move || {
                            let mut subs = db.subarrays.clone();
                            qs.iter().map(|q| classify_on(q, kind, db, &mut subs)).collect()
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("classification thread panicked"))
                    .collect()
            });
            let mut all = Vec::with_capacity(queries.len());
            for p in parts {
                all.extend(p?);
            }
            all
        };
        Ok(BatchResult::new(kind, results, &self.groups))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub queries: usize,
    pub matched: usize,
    pub match_rate: f64,
    pub simulated_ps: Picos,
    /// Queries per simulated second, compares issued back to back.
    pub queries_per_sec: f64,
    pub per_taxon: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchResult {
    pub kind: MatchKind,
    pub results: Vec<ClassificationResult>,
    pub summary: BatchSummary,
}

impl BatchResult {
    fn new(kind: MatchKind, results: Vec<ClassificationResult>, groups: &[TaxonGroup]) -> Self {
        let mut per_taxon: BTreeMap<String, usize> = groups.iter().map(|g| (g.taxon.clone(), 0)).collect();
        let mut matched = 0;
        let mut simulated_ps = 0;
        for r in &results {
            simulated_ps += r.simulated_ps;
            if !r.taxa.is_empty() {
                matched += 1;
            }
            for t in &r.taxa {
                *per_taxon.entry(t.clone()).or_default() += 1;
            }
        }
        let n = results.len();
        BatchResult {
            kind,
            summary: BatchSummary {
                queries: n,
                matched,
                match_rate: if n == 0 { 0.0 } else { matched as f64 / n as f64 },
                simulated_ps,
                queries_per_sec: if simulated_ps == 0 {
                    0.0
                } else {
                    n as f64 / (simulated_ps as f64 * 1e-12)
                },
                per_taxon,
            },
            results,
        }
    }

    /// `query,kind,columns,taxa` rows (list fields `;`-separated) followed by
    /// a `#`-prefixed summary block.
    pub fn to_text(&self) -> String {
        let mut s = String::from("query,kind,columns,taxa\n");
        for r in &self.results {
            let cols: Vec<String> = r.columns.iter().map(|c| c.to_string()).collect();
            let taxa: Vec<&str> = r.taxa.iter().map(String::as_str).collect();
            let _ = writeln!(
                s,
                "{},{},{},{}",
                r.query,
                r.kind.as_str(),
                cols.join(";"),
                taxa.join(";")
            );
        }
        let m = &self.summary;
        let _ = writeln!(s, "# queries = {}", m.queries);
        let _ = writeln!(s, "# matched = {}", m.matched);
        let _ = writeln!(s, "# match_rate = {:.6}", m.match_rate);
        let _ = writeln!(s, "# simulated_ns = {:.3}", m.simulated_ps as f64 / 1e3);
        let _ = writeln!(s, "# queries_per_sec = {:.3}", m.queries_per_sec);
        for (t, n) in &m.per_taxon {
            let _ = writeln!(s, "# taxon {t} = {n}");
        }
        s
    }
}

/// Query file: one k-mer per line, or `>`-records that get k-merized.
pub fn parse_queries(text: &str, k: usize) -> Result<Vec<Kmer>> {
    if text.trim_start().starts_with('>') {
        let recs = parse_fasta(text)?;
        let mut out = Vec::new();
        for r in &recs {
            let bases: Vec<Option<Base>> = r.seq.chars().map(Base::from_char).collect();
            for w in bases.windows(k) {
                if let Some(km) = w.iter().copied().collect::<Option<Vec<_>>>() {
                    out.push(Kmer(km));
                }
            }
        }
        return Ok(out);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            Kmer::parse(l.trim()).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })
        })
        .collect()
}

/// Random genomes, one record per taxon `taxon0..`, reproducible from `seed`.
pub fn synthetic_reference(taxa: usize, genome_len: usize, seed: u64) -> Vec<SeqRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..taxa)
        .map(|t| SeqRecord {
            taxon: format!("taxon{t}"),
            seq: (0..genome_len)
                .map(|_| Base::ALL[rng.gen_range(0..4)].to_char())
                .collect(),
        })
        .collect()
}

/// Replaces the base at `pos` with a different one chosen by `rng`.
pub fn substitute_base(kmer: &Kmer, pos: usize, rng: &mut impl Rng) -> Kmer {
    let mut out = kmer.clone();
    let old = out.0[pos];
    let choices: Vec<Base> = Base::ALL.into_iter().filter(|&b| b != old).collect();
    out.0[pos] = choices[rng.gen_range(0..3)];
    out
}

/// Host-side mask of the local columns holding a k-mer in `stratum`.
pub fn occupancy(db: &KmerDatabase, subarray: usize, stratum: usize) -> &BitRow {
    &db.occupied[subarray][stratum]
}

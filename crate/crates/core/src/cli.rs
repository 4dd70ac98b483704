//! `dramcam` command-line entry point.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::cam::{CamArray, DbImage, ImageKind, Mode, Query, SearchKind, TernaryWord};
use crate::config::{BankGeometry, Config, DeviceConfig};
use crate::error::{Error, Result};
use crate::genomics::{
    compile_onehot_compare, parse_fasta, parse_queries, synthetic_reference, write_fasta, KmerDatabase, MatchKind,
};
use crate::metrics::{account, throughput_estimate, Report};

#[derive(Debug, Parser)]
#[command(
    name = "dramcam",
    version,
    about = "ACT/PRE-only content-addressable search on a simulated DRAM subarray"
)]
pub struct Cli {
    /// `key = value` device, timing and energy configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for generated data.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads for classification.
    #[arg(long, global = true, default_value_t = 1)]
    pub parallel: usize,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Nand,
    Nor,
    Tcam,
    Hd1,
}

impl From<ModeArg> for SearchKind {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Nand => SearchKind::Nand,
            ModeArg::Nor => SearchKind::Nor,
            ModeArg::Tcam => SearchKind::Tcam,
            ModeArg::Hd1 => SearchKind::Hd1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Wide,
    Narrow,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Print the effective configuration in `key = value` form.
    PrintConfig,
    /// Write random reference genomes as `>`-records.
    GenReference {
        #[arg(long, default_value_t = 4)]
        taxa: usize,
        #[arg(long, default_value_t = 1031)]
        length: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a database image from references (k-mers) or a word list.
    BuildDb {
        /// `>`-header reference sequences; header token 1 is the taxon id.
        #[arg(long, conflicts_with = "words")]
        reference: Option<PathBuf>,
        #[arg(long, requires = "reference")]
        k: Option<usize>,
        /// One word of `0`/`1`/`X` per line.
        #[arg(long)]
        words: Option<PathBuf>,
        /// Array mode for word databases.
        #[arg(long, value_enum, default_value = "nand")]
        mode: ModeArg,
        #[arg(long)]
        db: PathBuf,
        /// Defaults to `<db>.manifest`.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Run compares and write one verdict line per query.
    Search {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, value_enum, default_value = "nand")]
        mode: ModeArg,
        #[arg(long)]
        emit_trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify query k-mers to taxa.
    Classify {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, value_enum, default_value = "nand")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Latency, energy and throughput of one k-mer compare.
    Bench {
        #[arg(long, default_value_t = 32)]
        k: usize,
        #[arg(long, value_enum, default_value = "nand")]
        mode: ModeArg,
        /// Geometry preset used when no `--config` is given.
        #[arg(long, value_enum, default_value = "wide")]
        geometry: GeometryArg,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn manifest_path(db: &Path, manifest: Option<&PathBuf>) -> PathBuf {
    manifest.cloned().unwrap_or_else(|| {
        let mut s = db.as_os_str().to_owned();
        s.push(".manifest");
        PathBuf::from(s)
    })
}

fn match_kind(mode: ModeArg) -> Result<MatchKind> {
    match mode {
        ModeArg::Nand => Ok(MatchKind::Exact),
        ModeArg::Hd1 => Ok(MatchKind::Hd1),
        other => Err(Error::ModeMismatch(format!(
            "one-hot k-mer databases support nand or hd1, not {}",
            SearchKind::from(other)
        ))),
    }
}

impl Cli {
    fn load_config(&self) -> Result<Config> {
        match &self.config {
            Some(p) => Config::load(p),
            None => Ok(Config::default()),
        }
    }

    pub fn run(&self) -> Result<()> {
        let cfg = self.load_config()?;
        match &self.command {
            Cmd::PrintConfig => write_out(None, &cfg.emit()),
            Cmd::GenReference { taxa, length, out } => {
                let recs = synthetic_reference(*taxa, *length, self.seed);
                write_out(Some(out), &write_fasta(&recs, 80))
            }
            Cmd::BuildDb {
                reference,
                k,
                words,
                mode,
                db,
                manifest,
            } => {
                if let Some(reference) = reference {
                    let k = k.ok_or_else(|| Error::Config("--k is required with --reference".into()))?;
                    let recs = parse_fasta(&read_text(reference)?)?;
                    let kdb = KmerDatabase::ingest(&recs, k, &cfg.device)?;
                    kdb.save(db, &manifest_path(db, manifest.as_ref()))?;
                    if kdb.skipped_windows > 0 {
                        eprintln!(
                            "warning: skipped {} windows with non-ACGT characters",
                            kdb.skipped_windows
                        );
                    }
                    println!(
                        "k-mers: {}  taxa: {}  columns: {}  strata/column: {}  subarrays: {}",
                        kdb.kmer_count(),
                        kdb.groups.len(),
                        kdb.total_columns(),
                        kdb.strata,
                        kdb.subarray_count()
                    );
                    Ok(())
                } else if let Some(words) = words {
                    let list = read_text(words)?
                        .lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with('#'))
                        .map(str::parse::<TernaryWord>)
                        .collect::<Result<Vec<_>>>()?;
                    let m = list.first().map(TernaryWord::len).ok_or(Error::EmptyDatabase)?;
                    let array_mode = match mode {
                        ModeArg::Nor => Mode::Nor,
                        ModeArg::Nand | ModeArg::Hd1 | ModeArg::Tcam => Mode::Nand,
                    };
                    let mut cam = CamArray::new(&cfg.device, m, array_mode)?;
                    cam.store(&list)?;
                    cam.to_image()?.write(db)?;
                    println!(
                        "words: {}  bits/word: {}  mode: {}  capacity: {}",
                        list.len(),
                        m,
                        array_mode,
                        cam.layout().column_capacity
                    );
                    Ok(())
                } else {
                    Err(Error::Config("build-db needs --reference or --words".into()))
                }
            }
            Cmd::Search {
                db,
                manifest,
                queries,
                mode,
                emit_trace,
                out,
            } => {
                let img = DbImage::read(db)?;
                let mut lines = String::new();
                let mut trace_text = String::new();
                match img.kind {
                    ImageKind::Words => {
                        let mut cam = CamArray::from_image(&cfg.device, &img)?;
                        let kind = SearchKind::from(*mode);
                        for (i, line) in read_text(queries)?
                            .lines()
                            .map(str::trim)
                            .filter(|l| !l.is_empty() && !l.starts_with('#'))
                            .enumerate()
                        {
                            let q: Query = line.parse()?;
                            let compiled = cam.compile(&q, kind)?;
                            if emit_trace.is_some() {
                                trace_text.push_str(&format!("# query {i}\n"));
                                trace_text.push_str(&compiled.trace.emit());
                            }
                            let mv = cam.search(&q, kind)?;
                            lines.push_str(&format!("{i} {}\n", mv.export_line()));
                        }
                    }
                    ImageKind::OneHotKmers => {
                        let kind = match_kind(*mode)?;
                        let text = read_text(&manifest_path(db, manifest.as_ref()))?;
                        let mut kdb = KmerDatabase::from_image(&img, &text, &cfg.device)?;
                        for (i, q) in parse_queries(&read_text(queries)?, kdb.k)?.iter().enumerate() {
                            if emit_trace.is_some() {
                                for st in 0..kdb.strata {
                                    let c = compile_onehot_compare(
                                        q,
                                        kdb.stratum_base(st),
                                        kind,
                                        &kdb.layout,
                                        &kdb.device.timing,
                                    )?;
                                    trace_text.push_str(&format!("# query {i} stratum {st}\n"));
                                    trace_text.push_str(&c.trace.emit());
                                }
                            }
                            let r = kdb.classify(q, kind)?;
                            let bits: String = (0..kdb.total_columns())
                                .map(|c| if r.columns.contains(&c) { '1' } else { '0' })
                                .collect();
                            lines.push_str(&format!("{i} {bits} match_is_1\n"));
                        }
                    }
                }
                if let Some(p) = emit_trace {
                    write_out(Some(p), &trace_text)?;
                }
                write_out(out.as_deref(), &lines)
            }
            Cmd::Classify {
                db,
                manifest,
                queries,
                mode,
                out,
                report,
            } => {
                let kind = match_kind(*mode)?;
                let mut kdb = KmerDatabase::load(db, &manifest_path(db, manifest.as_ref()), &cfg.device)?;
                let qs = parse_queries(&read_text(queries)?, kdb.k)?;
                let batch = kdb.classify_batch(&qs, kind, self.parallel)?;
                write_out(out.as_deref(), &batch.to_text())?;
                if let Some(p) = report {
                    let rep = batch_report(&kdb, kind, qs.len(), &cfg)?;
                    write_out(Some(p), &rep.to_json())?;
                }
                Ok(())
            }
            Cmd::Bench {
                k,
                mode,
                geometry,
                report,
            } => {
                let kind = match_kind(*mode)?;
                let device = if self.config.is_some() {
                    cfg.device.clone()
                } else {
                    DeviceConfig::system_preset(match geometry {
                        GeometryArg::Wide => BankGeometry::Wide,
                        GeometryArg::Narrow => BankGeometry::Narrow,
                    })
                };
                let (rep, est) = bench(&device, &cfg, *k, kind)?;
                println!("{rep}");
                print!("{est}");
                if let Some(p) = report {
                    let mut v: serde_json::Value = serde_json::from_str(&rep.to_json()).expect("valid json");
                    v["throughput"] = serde_json::to_value(&est).expect("serializable");
                    write_out(Some(p), &serde_json::to_string_pretty(&v).expect("serializable"))?;
                }
                Ok(())
            }
        }
    }
}

/// Report for a whole batch: every query runs one compare per stratum per
/// subarray, and all compares of one kind share the same command timing.
pub fn batch_report(kdb: &KmerDatabase, kind: MatchKind, queries: usize, cfg: &Config) -> Result<Report> {
    let probe = crate::genomics::Kmer(vec![crate::genomics::Base::A; kdb.k]);
    let compiled = compile_onehot_compare(&probe, 0, kind, &kdb.layout, &kdb.device.timing)?;
    let one = account(&compiled.trace, &kdb.device.timing, &cfg.energy);
    let mut total = Report::default();
    for _ in 0..queries * kdb.strata * kdb.subarray_count() {
        total.merge(&one);
    }
    Ok(total.with_host_assignment(queries as u64, &cfg.energy))
}

/// One k-mer compare on `device`. The compare's timing does not depend on
/// the row count, so the layout grows to fit a `4k`-row stratum if needed.
pub fn bench(
    device: &DeviceConfig,
    cfg: &Config,
    k: usize,
    kind: MatchKind,
) -> Result<(Report, crate::metrics::ThroughputEstimate)> {
    device.validate()?;
    let needed = (4 * k + 9).div_ceil(4) * 4 + 4;
    let rows = device.rows_per_subarray.max(needed);
    let layout = crate::cam::LayoutMap::reserve(rows, device.cols_per_subarray, crate::cam::layout::HD1_TEMP_ROWS)?;
    let probe = crate::genomics::Kmer(vec![crate::genomics::Base::A; k]);
    let compiled = compile_onehot_compare(&probe, 0, kind, &layout, &device.timing)?;
    let rep = account(&compiled.trace, &device.timing, &cfg.energy).with_host_assignment(1, &cfg.energy);
    let mut est = throughput_estimate(device, &rep, device.cols_per_subarray)?;
    est.assumptions.push(format!(
        "k = {k}, {} compare, one stratum of {} rows",
        kind.as_str(),
        4 * k
    ));
    if rows != device.rows_per_subarray {
        est.assumptions.push(format!(
            "a {k}-mer stratum does not fit {} rows; latency taken from a {rows}-row layout (row count does not affect timing)",
            device.rows_per_subarray
        ));
    }
    Ok((rep, est))
}

/// Parses arguments, runs, and maps failures to a single
/// `error[CODE]: message` line with exit status 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match cli.run() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            1
        }
    }
}

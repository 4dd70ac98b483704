//! One-hot k-mer database laid out in taxon column groups.
//!
//! A column holds up to `strata` k-mers stacked vertically, each in its own
//! band of `4k` rows, and every k-mer in a column belongs to the same taxon.
//! Taxon groups occupy contiguous global column ranges; global column `g`
//! lives in subarray `g / width`, local column `g % width`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::bits::BitRow;
use crate::cam::image::{DbImage, ImageKind};
use crate::cam::layout::{LayoutMap, HD1_TEMP_ROWS};
use crate::cam::Mode;
use crate::config::DeviceConfig;
use crate::dram::Subarray;
use crate::error::{Error, Result};
use crate::genomics::fasta::SeqRecord;
use crate::genomics::onehot::{decode_kmer_onehot, encode_kmer_onehot, Base, Kmer};

/// `(taxon, distinct k-mers)` in first-seen order.
pub type TaxonKmers = Vec<(String, Vec<Kmer>)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaxonGroup {
    pub taxon: String,
    /// Global column range `[start, end)`.
    pub start: usize,
    pub end: usize,
    pub kmers: usize,
}

#[derive(Debug, Clone)]
pub struct KmerDatabase {
    pub k: usize,
    pub strata: usize,
    /// Distinct k-mers per taxon, in first-seen order.
    pub taxa: TaxonKmers,
    pub groups: Vec<TaxonGroup>,
    pub layout: LayoutMap,
    pub device: DeviceConfig,
    /// Windows dropped for containing characters outside ACGT.
    pub skipped_windows: usize,
    pub(crate) width: usize,
    pub(crate) subarrays: Vec<Subarray>,
    /// `occupied[s][stratum]`: local columns holding a k-mer in that stratum.
    pub(crate) occupied: Vec<Vec<BitRow>>,
}

/// Distinct windows of length `k` per taxon, merged across records of the
/// same taxon and ordered by first appearance.
pub fn extract_kmers(records: &[SeqRecord], k: usize) -> Result<(TaxonKmers, usize)> {
    if k == 0 {
        return Err(Error::Layout("k must be at least 1".into()));
    }
    let mut taxa: Vec<(String, Vec<Kmer>, HashSet<Kmer>)> = Vec::new();
    let mut skipped = 0;
    for rec in records {
        let idx = match taxa.iter().position(|(t, _, _)| *t == rec.taxon) {
            Some(i) => i,
            None => {
                taxa.push((rec.taxon.clone(), Vec::new(), HashSet::new()));
                taxa.len() - 1
            }
        };
        let bases: Vec<Option<Base>> = rec.seq.chars().map(Base::from_char).collect();
        if bases.len() < k {
            continue;
        }
        for w in bases.windows(k) {
            let Some(kmer) = w.iter().copied().collect::<Option<Vec<Base>>>() else {
                skipped += 1;
                continue;
            };
            let kmer = Kmer(kmer);
            let (_, list, seen) = &mut taxa[idx];
            if seen.insert(kmer.clone()) {
                list.push(kmer);
            }
        }
    }
    Ok((taxa.into_iter().map(|(t, l, _)| (t, l)).collect(), skipped))
}

impl KmerDatabase {
    pub fn ingest(records: &[SeqRecord], k: usize, device: &DeviceConfig) -> Result<Self> {
        let (taxa, skipped) = extract_kmers(records, k)?;
        let mut db = Self::from_taxa(k, taxa, device)?;
        db.skipped_windows = skipped;
        Ok(db)
    }

    pub fn from_taxa(k: usize, taxa: TaxonKmers, device: &DeviceConfig) -> Result<Self> {
        device.validate()?;
        if k == 0 {
            return Err(Error::Layout("k must be at least 1".into()));
        }
        let taxa: TaxonKmers = taxa.into_iter().filter(|(_, l)| !l.is_empty()).collect();
        if taxa.is_empty() {
            return Err(Error::EmptyDatabase);
        }
        if let Some(bad) = taxa.iter().flat_map(|(_, l)| l).find(|km| km.len() != k) {
            return Err(Error::LengthMismatch {
                expected: k,
                got: bad.len(),
            });
        }
        let layout = LayoutMap::reserve(device.rows_per_subarray, device.cols_per_subarray, HD1_TEMP_ROWS)?;
        let strata = layout.data_region / (4 * k);
        if strata == 0 {
            return Err(Error::Layout(format!(
                "k = {k} needs {} data rows but only {} are free of reserved rows",
                4 * k,
                layout.data_region
            )));
        }

        let mut groups = Vec::with_capacity(taxa.len());
        let mut next = 0;
        for (taxon, list) in &taxa {
            let cols = list.len().div_ceil(strata);
            groups.push(TaxonGroup {
                taxon: taxon.clone(),
                start: next,
                end: next + cols,
                kmers: list.len(),
            });
            next += cols;
        }
        let total_cols = next;
        let width = total_cols.min(device.cols_per_subarray);
        let n_sub = total_cols.div_ceil(width);

        let mut subarrays = Vec::with_capacity(n_sub);
        for _ in 0..n_sub {
            subarrays.push(Subarray::new(device.rows_per_subarray, width, device.timing.clone())?);
        }
        let mut occupied = vec![vec![BitRow::zeros(width); strata]; n_sub];
        let mut data = vec![vec![BitRow::zeros(width); strata * 4 * k]; n_sub];
        for (g, (_, list)) in groups.iter().zip(&taxa) {
            for (i, km) in list.iter().enumerate() {
                let gc = g.start + i / strata;
                let stratum = i % strata;
                let (s, c) = (gc / width, gc % width);
                occupied[s][stratum].set(c, true);
                let base_row = stratum * 4 * k;
                for (j, b) in km.0.iter().enumerate() {
                    data[s][base_row + 4 * j + b.offset()].set(c, true);
                }
            }
        }
        let comp = layout.compute;
        for (sub, rows) in subarrays.iter_mut().zip(&data) {
            for (r, bits) in rows.iter().enumerate() {
                sub.write_row(r, bits)?;
            }
            sub.write_row(comp.c0, &BitRow::zeros(width))?;
            sub.write_row(comp.c1, &BitRow::ones(width))?;
        }

        Ok(KmerDatabase {
            k,
            strata,
            taxa,
            groups,
            layout,
            device: device.clone(),
            skipped_windows: 0,
            width,
            subarrays,
            occupied,
        })
    }

    pub fn total_columns(&self) -> usize {
        self.groups.last().map_or(0, |g| g.end)
    }

    pub fn kmer_count(&self) -> usize {
        self.taxa.iter().map(|(_, l)| l.len()).sum()
    }

    pub fn subarray_count(&self) -> usize {
        self.subarrays.len()
    }

    /// Simulated columns per subarray.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn subarrays(&self) -> &[Subarray] {
        &self.subarrays
    }

    /// First data row of a stratum.
    pub fn stratum_base(&self, stratum: usize) -> usize {
        stratum * 4 * self.k
    }

    /// Taxon owning a global column.
    pub fn taxon_of_column(&self, col: usize) -> Option<&str> {
        self.groups
            .iter()
            .find(|g| (g.start..g.end).contains(&col))
            .map(|g| g.taxon.as_str())
    }

    /// K-mer stored at `(global column, stratum)`, read from the cells.
    pub fn stored_kmer(&self, col: usize, stratum: usize) -> Option<Result<Kmer>> {
        let (s, c) = (col / self.width, col % self.width);
        if s >= self.subarrays.len() || stratum >= self.strata || !self.occupied[s][stratum].get(c) {
            return None;
        }
        let base = self.stratum_base(stratum);
        let cells: Vec<bool> = (base..base + 4 * self.k)
            .map(|r| self.subarrays[s].row(r).get(c))
            .collect();
        Some(decode_kmer_onehot(&cells))
    }

    /// Image columns are the k-mers in taxon order; the manifest carries the
    /// per-taxon counts needed to rebuild the groups.
    pub fn to_image(&self) -> DbImage {
        DbImage {
            kind: ImageKind::OneHotKmers,
            mode: Mode::Nand,
            symbols: self.k as u32,
            cells_per_word: 4 * self.k as u32,
            columns: self
                .taxa
                .iter()
                .flat_map(|(_, l)| l.iter().map(encode_kmer_onehot))
                .collect(),
        }
    }

    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# k-mer database manifest");
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "strata = {}", self.strata);
        let _ = writeln!(s, "rows_per_subarray = {}", self.device.rows_per_subarray);
        let _ = writeln!(s, "cols_per_subarray = {}", self.device.cols_per_subarray);
        let _ = writeln!(s, "subarrays = {}", self.subarrays.len());
        let _ = writeln!(s, "kmers = {}", self.kmer_count());
        let _ = writeln!(s, "groups = {}", self.groups.len());
        for g in &self.groups {
            let _ = writeln!(s, "taxon {} kmers={} columns={}..{}", g.taxon, g.kmers, g.start, g.end);
        }
        s
    }

    pub fn save(&self, image: &Path, manifest: &Path) -> Result<()> {
        self.to_image().write(image)?;
        std::fs::write(manifest, self.manifest()).map_err(|e| Error::Io(format!("{}: {e}", manifest.display())))
    }

    /// Rebuilds from an image and its manifest's taxon lines.
    pub fn from_image(img: &DbImage, manifest: &str, device: &DeviceConfig) -> Result<Self> {
        if img.kind != ImageKind::OneHotKmers {
            return Err(Error::ModeMismatch("image holds bit-pair words, not k-mers".into()));
        }
        let k = img.symbols as usize;
        let mut counts = Vec::new();
        for (idx, line) in manifest.lines().enumerate() {
            let Some(rest) = line.trim().strip_prefix("taxon ") else {
                continue;
            };
            let bad = || Error::Parse {
                line: idx + 1,
                msg: format!("malformed taxon line {line:?}"),
            };
            let mut toks = rest.split_whitespace();
            let name = toks.next().ok_or_else(bad)?;
            let n: usize = toks
                .next()
                .and_then(|t| t.strip_prefix("kmers="))
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)?;
            counts.push((name.to_string(), n));
        }
        if counts.iter().map(|(_, n)| n).sum::<usize>() != img.columns.len() {
            return Err(Error::Encoding("manifest k-mer counts do not match image".into()));
        }
        let mut cols = img.columns.iter();
        let taxa = counts
            .into_iter()
            .map(|(name, n)| {
                let kmers = cols
                    .by_ref()
                    .take(n)
                    .map(|c| decode_kmer_onehot(c))
                    .collect::<Result<Vec<_>>>()?;
                Ok((name, kmers))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_taxa(k, taxa, device)
    }

    pub fn load(image: &Path, manifest: &Path, device: &DeviceConfig) -> Result<Self> {
        let img = DbImage::read(image)?;
        let text = std::fs::read_to_string(manifest).map_err(|e| Error::Io(format!("{}: {e}", manifest.display())))?;
        Self::from_image(&img, &text, device)
    }
}

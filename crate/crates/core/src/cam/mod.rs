//! Content-addressable search on a subarray: transposed storage, compare
//! programs, and verdict readout.

pub mod compile;
pub mod encoding;
pub mod image;
pub mod layout;

use std::fmt;
use std::str::FromStr;

use crate::bits::BitRow;
use crate::config::DeviceConfig;
use crate::dram::{ExecStats, Subarray, Trace};
use crate::error::{Error, Result};

pub use compile::{
    compile_accumulate, compile_approx_hd1, compile_chain, compile_hd1_chain, compile_nand_compare,
    compile_nor_compare, compile_reset_accumulator, CompiledCompare, Fold, Polarity,
};
pub use encoding::{Mode, Query, TernaryWord, Trit};
pub use image::{DbImage, ImageKind};
pub use layout::LayoutMap;

/// Per-column verdicts as read from the result row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchVector {
    pub verdicts: BitRow,
    pub polarity: Polarity,
}

impl MatchVector {
    /// Verdicts normalized so that `1` means match.
    pub fn matches(&self) -> BitRow {
        match self.polarity {
            Polarity::MatchIsOne => self.verdicts.clone(),
            Polarity::MatchIsZero => self.verdicts.not(),
        }
    }

    pub fn matching_columns(&self) -> Vec<usize> {
        self.matches().ones_positions().collect()
    }

    pub fn truncated(&self, len: usize) -> MatchVector {
        MatchVector {
            verdicts: self.verdicts.truncated(len),
            polarity: self.polarity,
        }
    }

    /// `<verdict bits> <polarity>`.
    pub fn export_line(&self) -> String {
        format!("{} {}", self.verdicts, self.polarity.as_str())
    }
}

/// Executes a compiled compare and reads the verdict row.
pub fn run_compare(compiled: &CompiledCompare, sub: &mut Subarray) -> Result<MatchVector> {
    if compiled.trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    sub.execute(&compiled.trace)?;
    Ok(MatchVector {
        verdicts: sub.read_row_buffer()?.clone(),
        polarity: compiled.polarity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchKind {
    Nand,
    Nor,
    /// NAND or NOR according to the array mode.
    Tcam,
    Hd1,
}

impl FromStr for SearchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nand" => Ok(SearchKind::Nand),
            "nor" => Ok(SearchKind::Nor),
            "tcam" => Ok(SearchKind::Tcam),
            "hd1" => Ok(SearchKind::Hd1),
            other => Err(Error::ModeMismatch(format!("unknown search mode {other:?}"))),
        }
    }
}

impl fmt::Display for SearchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchKind::Nand => "nand",
            SearchKind::Nor => "nor",
            SearchKind::Tcam => "tcam",
            SearchKind::Hd1 => "hd1",
        })
    }
}

/// A subarray holding stored words plus the layout used to search them.
#[derive(Debug, Clone)]
pub struct CamArray {
    sub: Subarray,
    layout: LayoutMap,
    mode: Mode,
    words: Vec<TernaryWord>,
}

impl CamArray {
    /// Empty array for `m`-bit words. Temporaries for approximate search are
    /// always reserved.
    pub fn new(cfg: &DeviceConfig, m: usize, mode: Mode) -> Result<Self> {
        let sub = Subarray::from_config(cfg)?;
        let layout = LayoutMap::for_words(m, cfg.rows_per_subarray, cfg.cols_per_subarray, true)?;
        Ok(CamArray {
            sub,
            layout,
            mode,
            words: Vec::new(),
        })
    }

    pub fn layout(&self) -> &LayoutMap {
        &self.layout
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn words(&self) -> &[TernaryWord] {
        &self.words
    }

    pub fn subarray(&self) -> &Subarray {
        &self.sub
    }

    pub fn subarray_mut(&mut self) -> &mut Subarray {
        &mut self.sub
    }

    pub fn is_binary(&self) -> bool {
        self.words.iter().all(TernaryWord::is_binary)
    }

    /// Writes `words` column-major (word `c` in column `c`) and initializes
    /// the constant rows. Replaces any previous contents.
    pub fn store(&mut self, words: &[TernaryWord]) -> Result<()> {
        let m = self.layout.word_length;
        let cols = self.sub.cols();
        if words.len() > self.layout.column_capacity {
            return Err(Error::Layout(format!(
                "{} words exceed column capacity {}",
                words.len(),
                self.layout.column_capacity
            )));
        }
        let images = words
            .iter()
            .map(|w| {
                if w.len() != m {
                    return Err(Error::LengthMismatch {
                        expected: m,
                        got: w.len(),
                    });
                }
                w.encode(Some(self.mode))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut row = BitRow::zeros(cols);
        for r in self.layout.data_rows() {
            for c in 0..cols {
                row.set(c, images.get(c).is_some_and(|img| img[r]));
            }
            self.sub.write_row(r, &row)?;
        }
        let c = self.layout.compute;
        self.sub.write_row(c.c0, &BitRow::zeros(cols))?;
        self.sub.write_row(c.c1, &BitRow::ones(cols))?;
        self.words = words.to_vec();
        Ok(())
    }

    /// Decodes what is physically stored in the data rows.
    pub fn read_back(&self) -> Result<Vec<TernaryWord>> {
        (0..self.words.len())
            .map(|c| {
                let cells: Vec<bool> = self.layout.data_rows().map(|r| self.sub.row(r).get(c)).collect();
                TernaryWord::decode(&cells, self.mode)
            })
            .collect()
    }

    fn check_kind(&self, kind: SearchKind) -> Result<()> {
        let need = match kind {
            SearchKind::Nand | SearchKind::Hd1 => Mode::Nand,
            SearchKind::Nor => Mode::Nor,
            SearchKind::Tcam => return Ok(()),
        };
        // Binary data encodes identically in both modes.
        if need != self.mode && !self.is_binary() {
            return Err(Error::ModeMismatch(format!(
                "{kind} compare on ternary data encoded for {} mode",
                self.mode
            )));
        }
        Ok(())
    }

    pub fn compile(&self, q: &Query, kind: SearchKind) -> Result<CompiledCompare> {
        self.check_kind(kind)?;
        let t = self.sub.timing();
        match kind {
            SearchKind::Nand => compile_nand_compare(q, &self.layout, t),
            SearchKind::Nor => compile_nor_compare(q, &self.layout, t),
            SearchKind::Tcam => match self.mode {
                Mode::Nand => compile_nand_compare(q, &self.layout, t),
                Mode::Nor => compile_nor_compare(q, &self.layout, t),
            },
            SearchKind::Hd1 => compile_approx_hd1(q, &self.layout, t),
        }
    }

    /// Compiles, executes and returns verdicts for the stored words.
    pub fn search(&mut self, q: &Query, kind: SearchKind) -> Result<MatchVector> {
        let compiled = self.compile(q, kind)?;
        let mv = run_compare(&compiled, &mut self.sub)?;
        Ok(mv.truncated(self.words.len()))
    }

    pub fn execute(&mut self, trace: &Trace) -> Result<ExecStats> {
        self.sub.execute(trace)
    }

    /// Runs each query and folds its normalized verdicts into the
    /// accumulator row, returning the accumulated row.
    pub fn search_aggregate(&mut self, queries: &[Query], kind: SearchKind, fold: Fold) -> Result<BitRow> {
        let t = self.sub.timing().clone();
        let reset = compile_reset_accumulator(fold, &self.layout, &t)?;
        self.sub.execute(&reset)?;
        for q in queries {
            let compiled = self.compile(q, kind)?;
            if compiled.polarity == Polarity::MatchIsZero {
                return Err(Error::ModeMismatch(
                    "aggregation folds match-is-1 verdicts; use a NAND-polarity compare".into(),
                ));
            }
            self.sub.execute(&compiled.trace)?;
            let acc = compile_accumulate(compiled.result_row, fold, &self.layout, &t)?;
            self.sub.execute(&acc)?;
        }
        if queries.is_empty() {
            let mut t2 = Trace::new();
            t2.push(crate::dram::Command::act(self.layout.accumulator, t.t_ras));
            self.sub.execute(&t2)?;
        }
        Ok(self.sub.read_row_buffer()?.truncated(self.words.len()))
    }

    pub fn to_image(&self) -> Result<DbImage> {
        let columns = self
            .words
            .iter()
            .map(|w| w.encode(Some(self.mode)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DbImage {
            kind: ImageKind::Words,
            mode: self.mode,
            symbols: self.layout.word_length as u32,
            cells_per_word: 2 * self.layout.word_length as u32,
            columns,
        })
    }

    pub fn from_image(cfg: &DeviceConfig, img: &DbImage) -> Result<Self> {
        if img.kind != ImageKind::Words {
            return Err(Error::ModeMismatch("image holds one-hot k-mers, not words".into()));
        }
        let words = img
            .columns
            .iter()
            .map(|c| TernaryWord::decode(c, img.mode))
            .collect::<Result<Vec<_>>>()?;
        let mut arr = CamArray::new(cfg, img.symbols as usize, img.mode)?;
        arr.store(&words)?;
        Ok(arr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rows: usize, cols: usize) -> DeviceConfig {
        DeviceConfig {
            rows_per_subarray: rows,
            cols_per_subarray: cols,
            ..DeviceConfig::default()
        }
    }

    fn words(ws: &[&str]) -> Vec<TernaryWord> {
        ws.iter().map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn nand_example() {
        let mut cam = CamArray::new(&cfg(32, 8), 4, Mode::Nand).unwrap();
        cam.store(&words(&["0101", "0011", "0101"])).unwrap();
        let mv = cam.search(&"0101".parse().unwrap(), SearchKind::Nand).unwrap();
        assert_eq!(mv.verdicts.to_string(), "101");
        assert_eq!(mv.polarity, Polarity::MatchIsOne);
        assert_eq!(mv.export_line(), "101 match_is_1");
    }

    #[test]
    fn nor_signals_match_with_zero() {
        let mut cam = CamArray::new(&cfg(32, 8), 4, Mode::Nor).unwrap();
        cam.store(&words(&["0101", "1111", "1010"])).unwrap();
        let mv = cam.search(&"0101".parse().unwrap(), SearchKind::Nor).unwrap();
        assert_eq!(mv.verdicts.to_string(), "011");
        assert_eq!(mv.matching_columns(), vec![0]);
    }

    #[test]
    fn ternary_examples() {
        let mut cam = CamArray::new(&cfg(32, 8), 3, Mode::Nand).unwrap();
        cam.store(&words(&["0X1"])).unwrap();
        for (q, want) in [("001", "1"), ("011", "1"), ("111", "0")] {
            assert_eq!(
                cam.search(&q.parse().unwrap(), SearchKind::Tcam)
                    .unwrap()
                    .verdicts
                    .to_string(),
                want
            );
        }
        assert!(matches!(
            cam.search(&"001".parse().unwrap(), SearchKind::Nor),
            Err(Error::ModeMismatch(_))
        ));
    }

    #[test]
    fn hd1_examples() {
        let mut cam = CamArray::new(&cfg(32, 8), 4, Mode::Nand).unwrap();
        cam.store(&words(&["0110", "0111", "1111", "1001"])).unwrap();
        let mv = cam.search(&"0110".parse().unwrap(), SearchKind::Hd1).unwrap();
        assert_eq!(mv.verdicts.to_string(), "1100");
    }

    #[test]
    fn capacity_and_length_faults() {
        let mut cam = CamArray::new(&cfg(32, 2), 2, Mode::Nand).unwrap();
        assert!(matches!(cam.store(&words(&["00", "01", "10"])), Err(Error::Layout(_))));
        assert!(matches!(cam.store(&words(&["000"])), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn store_roundtrip_and_reserved_rows() {
        let mut cam = CamArray::new(&cfg(32, 8), 4, Mode::Nand).unwrap();
        let ws = words(&["0101", "1X00", "1111"]);
        cam.store(&ws).unwrap();
        assert_eq!(cam.read_back().unwrap(), ws);
        let c = cam.layout().compute;
        assert_eq!(cam.subarray().row(c.c1).count_ones(), 8);
        assert_eq!(cam.subarray().row(c.c0).count_ones(), 0);
    }

    #[test]
    fn empty_trace_faults() {
        let mut sub = Subarray::from_config(&cfg(16, 4)).unwrap();
        let compiled = CompiledCompare {
            trace: Trace::new(),
            polarity: Polarity::MatchIsOne,
            result_row: 0,
            data_activations: vec![],
        };
        assert_eq!(run_compare(&compiled, &mut sub), Err(Error::EmptyTrace));
    }

    #[test]
    fn aggregate_or_over_queries() {
        let mut cam = CamArray::new(&cfg(32, 8), 3, Mode::Nand).unwrap();
        cam.store(&words(&["000", "011", "101", "111"])).unwrap();
        let qs: Vec<Query> = ["011", "111"].iter().map(|q| q.parse().unwrap()).collect();
        let acc = cam.search_aggregate(&qs, SearchKind::Nand, Fold::Or).unwrap();
        assert_eq!(acc.to_string(), "0101");
        let near = cam.search_aggregate(&qs, SearchKind::Hd1, Fold::Or).unwrap();
        assert_eq!(near.to_string(), "0111");
        let both = cam.search_aggregate(&qs, SearchKind::Hd1, Fold::And).unwrap();
        assert_eq!(both.to_string(), "0101");
    }

    #[test]
    fn image_roundtrip() {
        let mut cam = CamArray::new(&cfg(32, 8), 4, Mode::Nor).unwrap();
        cam.store(&words(&["0X01", "1111"])).unwrap();
        let img = cam.to_image().unwrap();
        let back = CamArray::from_image(&cfg(32, 8), &img).unwrap();
        assert_eq!(back.words(), cam.words());
        assert_eq!(back.mode(), Mode::Nor);
    }
}

//! Row role assignment inside one subarray.
//!
//! Reserved rows sit at the top of the address space: the majority triple
//! (low bits `00`, `01`, `10`) plus its `11` sibling used as a result
//! accumulator, then the constant rows, then temporaries. Data occupies rows
//! `0..data_rows` below them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::timing_ops::{check_row_constraints, ComputeRows};

/// Temporaries needed by the Hamming-distance-1 compare.
pub const HD1_TEMP_ROWS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayoutMap {
    pub rows: usize,
    pub column_capacity: usize,
    pub compute: ComputeRows,
    pub accumulator: usize,
    pub temp_rows: Vec<usize>,
    /// Rows available to data, counted from row 0.
    pub data_region: usize,
    /// Bits per stored word; zero for layouts not using bit pairs.
    pub word_length: usize,
}

impl LayoutMap {
    /// Reserves compute, constant and `temps` temporary rows and leaves the
    /// rest for data.
    pub fn reserve(rows: usize, cols: usize, temps: usize) -> Result<Self> {
        if rows < 8 {
            return Err(Error::Layout(format!("{rows} rows cannot hold the reserved rows")));
        }
        let base = (rows / 4 - 1) * 4;
        let mut others = (0..rows).rev().filter(|r| !(base..base + 4).contains(r));
        let mut next = || {
            others
                .next()
                .ok_or_else(|| Error::Layout("not enough rows for reserved roles".into()))
        };
        let c0 = next()?;
        let c1 = next()?;
        let temp_rows = (0..temps).map(|_| next()).collect::<Result<Vec<_>>>()?;
        let compute = ComputeRows::at(base, c0, c1);
        check_row_constraints(&compute).map_err(Error::Layout)?;
        let lowest = temp_rows.iter().copied().chain([c0, c1, base]).min().unwrap_or(0);
        Ok(LayoutMap {
            rows,
            column_capacity: cols,
            compute,
            accumulator: base + 3,
            temp_rows,
            data_region: lowest,
            word_length: 0,
        })
    }

    /// Layout for `m`-bit words stored as bit pairs.
    pub fn for_words(m: usize, rows: usize, cols: usize, with_temps: bool) -> Result<Self> {
        let mut layout = Self::reserve(rows, cols, if with_temps { HD1_TEMP_ROWS } else { 0 })?;
        if 2 * m > layout.data_region {
            return Err(Error::Layout(format!(
                "{m}-bit words need {} data rows but only {} are free of reserved rows",
                2 * m,
                layout.data_region
            )));
        }
        layout.word_length = m;
        Ok(layout)
    }

    /// `(Q2j, Q2j+1)`.
    pub fn data_pair(&self, j: usize) -> (usize, usize) {
        (2 * j, 2 * j + 1)
    }

    pub fn reserved_rows(&self) -> Vec<usize> {
        let c = &self.compute;
        let mut v = vec![c.r3, c.r1, c.r2, self.accumulator, c.c0, c.c1];
        v.extend(&self.temp_rows);
        v
    }

    pub fn data_rows(&self) -> std::ops::Range<usize> {
        0..2 * self.word_length
    }

    pub fn has_hd1_temps(&self) -> bool {
        self.temp_rows.len() >= HD1_TEMP_ROWS
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_rows_are_disjoint_from_data() {
        for rows in [8usize, 10, 16, 30, 128, 512] {
            for temps in [0, HD1_TEMP_ROWS] {
                let Ok(l) = LayoutMap::reserve(rows, 64, temps) else {
                    continue;
                };
                let mut res = l.reserved_rows();
                res.sort();
                res.dedup();
                assert_eq!(res.len(), 6 + temps);
                assert!(res.iter().all(|&r| r >= l.data_region && r < rows));
                check_row_constraints(&l.compute).unwrap();
            }
        }
    }

    #[test]
    fn default_geometry_places_triple_on_top() {
        let l = LayoutMap::for_words(32, 128, 8192, true).unwrap();
        assert_eq!(
            (l.compute.r3, l.compute.r1, l.compute.r2, l.accumulator),
            (124, 125, 126, 127)
        );
        assert_eq!((l.compute.c0, l.compute.c1), (123, 122));
        assert_eq!(l.temp_rows, vec![121, 120, 119]);
        assert_eq!(l.data_region, 119);
        assert_eq!(l.data_pair(3), (6, 7));
    }

    #[test]
    fn words_overlapping_reserved_rows_fault() {
        assert!(matches!(LayoutMap::for_words(60, 128, 8, true), Err(Error::Layout(_))));
        assert!(LayoutMap::for_words(61, 128, 8, false).is_ok());
        assert!(LayoutMap::for_words(62, 128, 8, false).is_err());
    }
}

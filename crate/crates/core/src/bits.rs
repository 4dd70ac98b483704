//! Fixed-length packed bit rows, one bit per DRAM column.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut row = BitRow {
            len,
            words: vec![!0; len.div_ceil(64)],
        };
        row.mask_tail();
        row
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut row = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            row.set(i, b);
        }
        row
    }

    /// Parses a string of `0`/`1` characters, column 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let mut row = BitRow::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => row.set(i, true),
                other => return Err(Error::Encoding(format!("invalid bit character {other:?}"))),
            }
        }
        Ok(row)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn copy_from(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        self.words.copy_from_slice(&other.words);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    pub fn not(&self) -> BitRow {
        let mut out = BitRow {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.mask_tail();
        out
    }

    /// Bitwise majority of three equal-length rows.
    pub fn majority(a: &BitRow, b: &BitRow, c: &BitRow) -> BitRow {
        debug_assert!(a.len == b.len && b.len == c.len);
        BitRow {
            len: a.len,
            words: a
                .words
                .iter()
                .zip(&b.words)
                .zip(&c.words)
                .map(|((&x, &y), &z)| (x & y) | (y & z) | (x & z))
                .collect(),
        }
    }

    /// Returns the first `len` bits.
    pub fn truncated(&self, len: usize) -> BitRow {
        let len = len.min(self.len);
        let mut out = BitRow::zeros(len);
        let n = out.words.len();
        out.words.copy_from_slice(&self.words[..n]);
        out.mask_tail();
        out
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_masks_tail() {
        let r = BitRow::ones(70);
        assert_eq!(r.count_ones(), 70);
        assert_eq!(r.not().count_ones(), 0);
    }

    #[test]
    fn parse_display_roundtrip() {
        let r = BitRow::parse("0110100").unwrap();
        assert_eq!(r.to_string(), "0110100");
        assert_eq!(r.ones_positions().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(BitRow::parse("01x").is_err());
    }

    #[test]
    fn majority_truth_table() {
        let a = BitRow::parse("00001111").unwrap();
        let b = BitRow::parse("00110011").unwrap();
        let c = BitRow::parse("01010101").unwrap();
        assert_eq!(BitRow::majority(&a, &b, &c).to_string(), "00010111");
    }
}

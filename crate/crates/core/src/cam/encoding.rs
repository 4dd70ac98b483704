//! Bit-pair cell encodings for stored words.
//!
//! Bit `j` of a word occupies the even/odd row pair `(Q2j, Q2j+1)`:
//! `0 -> (1, 0)`, `1 -> (0, 1)`. A don't-care is `(1, 1)` for NAND arrays
//! (always reads as a per-bit match) and `(0, 0)` for NOR arrays (never
//! reads as a per-bit mismatch).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    Nand,
    Nor,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nand" => Ok(Mode::Nand),
            "nor" => Ok(Mode::Nor),
            other => Err(Error::ModeMismatch(format!("unknown array mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Nand => "nand",
            Mode::Nor => "nor",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Trit {
    Zero,
    One,
    X,
}

impl Trit {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Trit::One
        } else {
            Trit::Zero
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            '0' => Ok(Trit::Zero),
            '1' => Ok(Trit::One),
            'X' | 'x' => Ok(Trit::X),
            other => Err(Error::Encoding(format!("invalid trit {other:?}"))),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::X => 'X',
        }
    }

    /// `(even, odd)` cell pair.
    pub fn cells(self, mode: Option<Mode>) -> Result<(bool, bool)> {
        match (self, mode) {
            (Trit::Zero, _) => Ok((true, false)),
            (Trit::One, _) => Ok((false, true)),
            (Trit::X, Some(Mode::Nand)) => Ok((true, true)),
            (Trit::X, Some(Mode::Nor)) => Ok((false, false)),
            (Trit::X, None) => Err(Error::Encoding("don't-care requires an array mode".into())),
        }
    }

    pub fn from_cells(even: bool, odd: bool, mode: Mode) -> Result<Self> {
        match (even, odd, mode) {
            (true, false, _) => Ok(Trit::Zero),
            (false, true, _) => Ok(Trit::One),
            (true, true, Mode::Nand) | (false, false, Mode::Nor) => Ok(Trit::X),
            _ => Err(Error::Encoding(format!(
                "cell pair ({}, {}) is not valid in {mode} mode",
                even as u8, odd as u8
            ))),
        }
    }
}

/// A stored word of bits and don't-cares.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryWord(pub Vec<Trit>);

impl TernaryWord {
    pub fn from_bits(bits: &[bool]) -> Self {
        TernaryWord(bits.iter().map(|&b| Trit::from_bit(b)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        !self.0.contains(&Trit::X)
    }

    /// Column image of `2 * len` cells, even row of each pair first.
    pub fn encode(&self, mode: Option<Mode>) -> Result<Vec<bool>> {
        let mut cells = Vec::with_capacity(2 * self.0.len());
        for t in &self.0 {
            let (e, o) = t.cells(mode)?;
            cells.push(e);
            cells.push(o);
        }
        Ok(cells)
    }

    pub fn decode(cells: &[bool], mode: Mode) -> Result<Self> {
        if !cells.len().is_multiple_of(2) {
            return Err(Error::Encoding("odd number of cells".into()));
        }
        cells
            .chunks_exact(2)
            .map(|p| Trit::from_cells(p[0], p[1], mode))
            .collect::<Result<Vec<_>>>()
            .map(TernaryWord)
    }

    /// True when `query` agrees on every non-X position.
    pub fn matches(&self, query: &[bool]) -> bool {
        self.0.len() == query.len()
            && self.0.iter().zip(query).all(|(t, &q)| match t {
                Trit::X => true,
                Trit::Zero => !q,
                Trit::One => q,
            })
    }
}

impl FromStr for TernaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Trit::from_char)
            .collect::<Result<Vec<_>>>()
            .map(TernaryWord)
    }
}

impl fmt::Display for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{}", t.to_char())?;
        }
        Ok(())
    }
}

/// Search key. Queries carry no don't-cares; a mask instead skips bit
/// positions entirely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub bits: Vec<bool>,
    /// `Some(mask)`: positions with `false` are not compared.
    pub mask: Option<Vec<bool>>,
}

impl Query {
    pub fn new(bits: Vec<bool>) -> Self {
        Query { bits, mask: None }
    }

    pub fn with_mask(bits: Vec<bool>, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != bits.len() {
            return Err(Error::LengthMismatch {
                expected: bits.len(),
                got: mask.len(),
            });
        }
        Ok(Query { bits, mask: Some(mask) })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `(position, bit)` pairs that take part in the compare.
    pub fn active(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(move |(j, _)| self.mask.as_ref().is_none_or(|m| m[*j]))
            .map(|(j, &b)| (j, b))
    }
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Encoding(format!("invalid query bit {other:?}"))),
        })
        .collect()
}

/// `<bits>` or `<bits> <mask>`, mask `1` = compared.
impl FromStr for Query {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let bits = parse_bits(parts.next().unwrap_or(""))?;
        let q = match parts.next() {
            Some(m) => Query::with_mask(bits, parse_bits(m)?)?,
            None => Query::new(bits),
        };
        if parts.next().is_some() {
            return Err(Error::Encoding(format!("trailing fields in query {s:?}")));
        }
        Ok(q)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if let Some(m) = &self.mask {
            f.write_str(" ")?;
            for &b in m {
                f.write_str(if b { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn masked_query_text() {
        let q: Query = "1010 0110".parse().unwrap();
        assert_eq!(q.active().collect::<Vec<_>>(), vec![(1, false), (2, true)]);
        assert_eq!(q.to_string(), "1010 0110");
        assert!("10 011".parse::<Query>().is_err());
        assert!("10 01 1".parse::<Query>().is_err());
    }

    #[test]
    fn cell_codes() {
        assert_eq!(Trit::Zero.cells(None).unwrap(), (true, false));
        assert_eq!(Trit::One.cells(None).unwrap(), (false, true));
        assert_eq!(Trit::X.cells(Some(Mode::Nand)).unwrap(), (true, true));
        assert_eq!(Trit::X.cells(Some(Mode::Nor)).unwrap(), (false, false));
        assert!(matches!(Trit::X.cells(None), Err(Error::Encoding(_))));
    }

    #[test]
    fn decode_rejects_foreign_pairs() {
        assert!(TernaryWord::decode(&[true, true], Mode::Nor).is_err());
        assert!(TernaryWord::decode(&[false, false], Mode::Nand).is_err());
        assert!(TernaryWord::decode(&[true], Mode::Nand).is_err());
    }

    #[test]
    fn masked_equality() {
        let w: TernaryWord = "0X1".parse().unwrap();
        assert!(w.matches(&[false, false, true]));
        assert!(w.matches(&[false, true, true]));
        assert!(!w.matches(&[true, true, true]));
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(trits in prop::collection::vec(0u8..3, 0..40), nor in any::<bool>()) {
            let mode = if nor { Mode::Nor } else { Mode::Nand };
            let w = TernaryWord(trits.iter().map(|t| match t { 0 => Trit::Zero, 1 => Trit::One, _ => Trit::X }).collect());
            let cells = w.encode(Some(mode)).unwrap();
            prop_assert_eq!(TernaryWord::decode(&cells, mode).unwrap(), w.clone());
            prop_assert_eq!(w.to_string().parse::<TernaryWord>().unwrap(), w);
        }
    }
}

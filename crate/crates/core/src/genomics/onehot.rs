//! One-hot DNA base encoding: four vertically adjacent cells per base.
//!
//! Row offsets within a base slot are A=0, G=1, C=2, T=3, i.e. the patterns
//! A=0001, G=0010, C=0100, T=1000 read with offset 0 as the low-order bit.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    A,
    C,
    G,
    T,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::T];

    pub fn from_char(c: char) -> Option<Base> {
        match c.to_ascii_uppercase() {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'T' => Some(Base::T),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }

    /// Hot row within the base's four-row slot.
    pub fn offset(self) -> usize {
        match self {
            Base::A => 0,
            Base::G => 1,
            Base::C => 2,
            Base::T => 3,
        }
    }

    pub fn from_offset(o: usize) -> Option<Base> {
        match o {
            0 => Some(Base::A),
            1 => Some(Base::G),
            2 => Some(Base::C),
            3 => Some(Base::T),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Kmer(pub Vec<Base>);

impl Kmer {
    pub fn parse(s: &str) -> Result<Kmer> {
        s.chars()
            .map(|c| Base::from_char(c).ok_or_else(|| Error::Encoding(format!("invalid base {c:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Kmer)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of positions where the two k-mers carry different bases.
    pub fn base_mismatches(&self, other: &Kmer) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", b.to_char())?;
        }
        Ok(())
    }
}

/// `4k` cells, one hot cell per base.
pub fn encode_kmer_onehot(kmer: &Kmer) -> Vec<bool> {
    let mut cells = vec![false; 4 * kmer.len()];
    for (j, b) in kmer.0.iter().enumerate() {
        cells[4 * j + b.offset()] = true;
    }
    cells
}

pub fn decode_kmer_onehot(cells: &[bool]) -> Result<Kmer> {
    if !cells.len().is_multiple_of(4) {
        return Err(Error::Encoding("one-hot image length is not a multiple of 4".into()));
    }
    cells
        .chunks_exact(4)
        .map(|slot| {
            let hot: Vec<usize> = (0..4).filter(|&i| slot[i]).collect();
            match hot.as_slice() {
                [o] => Ok(Base::from_offset(*o).expect("offset < 4")),
                _ => Err(Error::Encoding(format!("base slot {slot:?} is not one-hot"))),
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(Kmer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn base_patterns() {
        let c = encode_kmer_onehot(&Kmer::parse("C").unwrap());
        // C=0100: offset 2 hot
        assert_eq!(c, vec![false, false, true, false]);
        assert_eq!(
            encode_kmer_onehot(&Kmer::parse("A").unwrap()),
            vec![true, false, false, false]
        );
        assert_eq!(
            encode_kmer_onehot(&Kmer::parse("G").unwrap()),
            vec![false, true, false, false]
        );
        assert_eq!(
            encode_kmer_onehot(&Kmer::parse("T").unwrap()),
            vec![false, false, false, true]
        );
    }

    #[test]
    fn ag_hot_offsets() {
        let cells = encode_kmer_onehot(&Kmer::parse("AG").unwrap());
        let hot: Vec<usize> = (0..8).filter(|&i| cells[i]).collect();
        assert_eq!(hot, vec![0, 5]);
    }

    #[test]
    fn invalid_characters() {
        assert!(matches!(Kmer::parse("ACNT"), Err(Error::Encoding(_))));
        assert!(decode_kmer_onehot(&[true, true, false, false]).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(s in "[ACGT]{0,48}") {
            let k = Kmer::parse(&s).unwrap();
            prop_assert_eq!(decode_kmer_onehot(&encode_kmer_onehot(&k)).unwrap().to_string(), s);
        }
    }
}

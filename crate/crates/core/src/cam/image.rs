//! Database image file.
//!
//! Little-endian, byte-exact layout:
//!
//! | offset | size | field                                               |
//! |--------|------|-----------------------------------------------------|
//! | 0      | 8    | magic `DRCAMIMG`                                    |
//! | 8      | 1    | version, currently `1`                              |
//! | 9      | 1    | kind: `0` bit-pair words, `1` one-hot k-mers        |
//! | 10     | 1    | mode: `0` nand, `1` nor                             |
//! | 11     | 1    | reserved, `0`                                       |
//! | 12     | 4    | symbols per word `m` (bits/trits, or bases)         |
//! | 16     | 4    | word count `n`                                      |
//! | 20     | 4    | cells per word (`2m` or `4m`)                       |
//! | 24     | ...  | `n` column images                                   |
//!
//! Each column image holds the word's cells in row order, packed LSB-first
//! (cell `i` is bit `i % 8` of byte `i / 8`) and padded to a whole byte.

use std::path::Path;

use crate::cam::encoding::Mode;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"DRCAMIMG";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageKind {
    Words,
    OneHotKmers,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbImage {
    pub kind: ImageKind,
    pub mode: Mode,
    pub symbols: u32,
    pub cells_per_word: u32,
    pub columns: Vec<Vec<bool>>,
}

impl DbImage {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let stride = (self.cells_per_word as usize).div_ceil(8);
        let mut out = Vec::with_capacity(HEADER_LEN + stride * self.columns.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(match self.kind {
            ImageKind::Words => 0,
            ImageKind::OneHotKmers => 1,
        });
        out.push(match self.mode {
            Mode::Nand => 0,
            Mode::Nor => 1,
        });
        out.push(0);
        out.extend_from_slice(&self.symbols.to_le_bytes());
        out.extend_from_slice(&(self.columns.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.cells_per_word.to_le_bytes());
        for col in &self.columns {
            if col.len() != self.cells_per_word as usize {
                return Err(Error::LengthMismatch {
                    expected: self.cells_per_word as usize,
                    got: col.len(),
                });
            }
            let mut packed = vec![0u8; stride];
            for (i, &b) in col.iter().enumerate() {
                if b {
                    packed[i / 8] |= 1 << (i % 8);
                }
            }
            out.extend_from_slice(&packed);
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::Encoding(format!("database image: {msg}"));
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(bad("bad magic"));
        }
        if bytes[8] != VERSION {
            return Err(bad(&format!("unsupported version {}", bytes[8])));
        }
        let kind = match bytes[9] {
            0 => ImageKind::Words,
            1 => ImageKind::OneHotKmers,
            k => return Err(bad(&format!("unknown kind {k}"))),
        };
        let mode = match bytes[10] {
            0 => Mode::Nand,
            1 => Mode::Nor,
            m => return Err(bad(&format!("unknown mode {m}"))),
        };
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let symbols = u32_at(12);
        let count = u32_at(16) as usize;
        let cells_per_word = u32_at(20);
        let expected_cells = match kind {
            ImageKind::Words => symbols.checked_mul(2),
            ImageKind::OneHotKmers => symbols.checked_mul(4),
        };
        if expected_cells != Some(cells_per_word) {
            return Err(bad("cells per word inconsistent with symbol count"));
        }
        let stride = (cells_per_word as usize).div_ceil(8);
        let payload = &bytes[HEADER_LEN..];
        if Some(payload.len()) != stride.checked_mul(count) {
            return Err(bad("payload size does not match header"));
        }
        let columns = if stride == 0 {
            vec![Vec::new(); count]
        } else {
            payload
                .chunks_exact(stride)
                .map(|chunk| {
                    (0..cells_per_word as usize)
                        .map(|i| chunk[i / 8] >> (i % 8) & 1 == 1)
                        .collect()
                })
                .collect()
        };
        Ok(DbImage {
            kind,
            mode,
            symbols,
            cells_per_word,
            columns,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_bytes_for_small_image() {
        let img = DbImage {
            kind: ImageKind::Words,
            mode: Mode::Nand,
            symbols: 2,
            cells_per_word: 4,
            // words "01" and "10"
            columns: vec![vec![true, false, false, true], vec![false, true, true, false]],
        };
        let bytes = img.to_bytes().unwrap();
        assert_eq!(
            bytes,
            [
                b'D', b'R', b'C', b'A', b'M', b'I', b'M', b'G', 1, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 4, 0, 0, 0, 0b1001,
                0b0110
            ]
        );
        assert_eq!(DbImage::from_bytes(&bytes).unwrap(), img);
    }

    #[test]
    fn rejects_corrupt_images() {
        assert!(DbImage::from_bytes(b"short").is_err());
        let img = DbImage {
            kind: ImageKind::OneHotKmers,
            mode: Mode::Nand,
            symbols: 1,
            cells_per_word: 4,
            columns: vec![vec![true, false, false, false]],
        };
        let mut bytes = img.to_bytes().unwrap();
        bytes.pop();
        assert!(DbImage::from_bytes(&bytes).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(symbols in 0u32..20, n in 0usize..10, seed in any::<u64>()) {
            let cells = symbols * 2;
            let columns = (0..n)
                .map(|i| (0..cells).map(|c| (seed >> ((i as u32 * 7 + c) % 64)) & 1 == 1).collect())
                .collect();
            let img = DbImage { kind: ImageKind::Words, mode: Mode::Nor, symbols, cells_per_word: cells, columns };
            prop_assert_eq!(DbImage::from_bytes(&img.to_bytes().unwrap()).unwrap(), img);
        }
    }
}

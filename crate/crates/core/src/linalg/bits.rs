//! Bit-packed GF(2) rows.

use super::{Echelon, MatrixGF, WeightKind};
use crate::gf::{FFElem, FieldSpec};

const EVEN_BITS: u64 = 0x5555_5555_5555_5555;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitRows {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitRows {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitRows {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> bool {
        self.words[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize) {
        self.words[r * self.stride + c / 64] |= 1 << (c % 64);
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.words.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn pack(&self, v: &[FFElem]) -> Vec<u64> {
        let mut out = vec![0; self.stride];
        for (c, x) in v.iter().enumerate() {
            if !x.is_zero() {
                out[c / 64] |= 1 << (c % 64);
            }
        }
        out
    }
}

impl Echelon for BitRows {
    type Vector = Vec<u64>;

    fn load(m: &MatrixGF) -> Self {
        debug_assert!(m.field().is_binary());
        let mut out = BitRows::zeros(m.nrows(), m.ncols());
        for r in 0..m.nrows() {
            for (c, x) in m.row(r).iter().enumerate() {
                if !x.is_zero() {
                    out.set(r, c);
                }
            }
        }
        out
    }

    fn store(&self, field: &FieldSpec) -> MatrixGF {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                data.push(if self.get(r, c) {
                    FFElem::ONE
                } else {
                    FFElem::ZERO
                });
            }
        }
        MatrixGF::from_parts(field.clone(), self.rows, self.cols, data)
    }

    fn permute_from(&mut self, src: &Self, col_map: &[usize]) {
        debug_assert_eq!(col_map.len(), src.cols);
        self.rows = src.rows;
        self.cols = src.cols;
        self.stride = src.stride;
        self.words.clear();
        self.words.resize(src.words.len(), 0);
        for r in 0..src.rows {
            let base = r * src.stride;
            for w in 0..src.stride {
                let mut word = src.words[base + w];
                while word != 0 {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    let dst = col_map[w * 64 + bit];
                    self.words[base + dst / 64] |= 1 << (dst % 64);
                }
            }
        }
    }

    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut scratch = vec![0u64; self.stride];
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let w = c / 64;
            let bit = 1u64 << (c % 64);
            let Some(found) = (r..self.rows).find(|&i| self.words[i * self.stride + w] & bit != 0)
            else {
                continue;
            };
            self.swap_rows(found, r);
            scratch[w..].copy_from_slice(&self.words[r * self.stride + w..(r + 1) * self.stride]);
            for j in 0..self.rows {
                let base = j * self.stride;
                if j != r && self.words[base + w] & bit != 0 {
                    for (dst, src) in self.words[base + w..base + self.stride]
                        .iter_mut()
                        .zip(&scratch[w..])
                    {
                        *dst ^= src;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn weight(&self, row: usize, kind: WeightKind) -> usize {
        let words = self.row(row);
        match kind {
            WeightKind::Hamming => words.iter().map(|w| w.count_ones() as usize).sum(),
            // pairs (2i, 2i+1) never straddle a word boundary
            WeightKind::Symplectic => words
                .iter()
                .map(|w| ((w | (w >> 1)) & EVEN_BITS).count_ones() as usize)
                .sum(),
        }
    }

    fn gather_row(&self, row: usize, col_map: &[usize]) -> Vec<FFElem> {
        col_map
            .iter()
            .map(|&c| {
                if self.get(row, c) {
                    FFElem::ONE
                } else {
                    FFElem::ZERO
                }
            })
            .collect()
    }

    fn vector(&self, v: &[FFElem]) -> Vec<u64> {
        self.pack(v)
    }

    fn reduce(&self, pivots: &[usize], v: &mut Vec<u64>) -> bool {
        for (i, &c) in pivots.iter().enumerate() {
            if v[c / 64] >> (c % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(self.row(i)) {
                    *x ^= y;
                }
            }
        }
        v.iter().all(|&w| w == 0)
    }
}

//! Dense rows over an arbitrary GF(q).

use super::{Echelon, MatrixGF, WeightKind};
use crate::gf::{FFElem, FieldSpec};

#[derive(Clone, Debug)]
pub(crate) struct DenseRows {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FFElem>,
}

impl DenseRows {
    #[inline]
    fn row(&self, r: usize) -> &[FFElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// `dst -= factor * src` over the field, touching columns `from..`.
#[inline]
fn axpy(field: &FieldSpec, dst: &mut [FFElem], src: &[FFElem], factor: FFElem, from: usize) {
    let neg = field.neg(factor);
    for (d, &s) in dst[from..].iter_mut().zip(&src[from..]) {
        if !s.is_zero() {
            *d = field.add(*d, field.mul(neg, s));
        }
    }
}

impl Echelon for DenseRows {
    type Vector = Vec<FFElem>;

    fn load(m: &MatrixGF) -> Self {
        DenseRows {
            field: m.field().clone(),
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.data().to_vec(),
        }
    }

    fn store(&self, field: &FieldSpec) -> MatrixGF {
        MatrixGF::from_parts(field.clone(), self.rows, self.cols, self.data.clone())
    }

    fn permute_from(&mut self, src: &Self, col_map: &[usize]) {
        self.field = src.field.clone();
        self.rows = src.rows;
        self.cols = src.cols;
        self.data.clear();
        self.data.resize(src.data.len(), FFElem::ZERO);
        for r in 0..src.rows {
            let base = r * src.cols;
            for (c, &x) in src.row(r).iter().enumerate() {
                self.data[base + col_map[c]] = x;
            }
        }
    }

    fn rref(&mut self) -> Vec<usize> {
        let field = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut pivot_row = vec![FFElem::ZERO; cols];
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(found) = (r..self.rows).find(|&i| !self.data[i * cols + c].is_zero()) else {
                continue;
            };
            self.swap_rows(found, r);
            let inv = field
                .inv(self.data[r * cols + c])
                .expect("pivot entry is nonzero");
            for x in &mut self.data[r * cols + c..(r + 1) * cols] {
                *x = field.mul(*x, inv);
            }
            pivot_row[c..].copy_from_slice(&self.data[r * cols + c..(r + 1) * cols]);
            for j in 0..self.rows {
                let factor = self.data[j * cols + c];
                if j != r && !factor.is_zero() {
                    axpy(
                        &field,
                        &mut self.data[j * cols..(j + 1) * cols],
                        &pivot_row,
                        factor,
                        c,
                    );
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn weight(&self, row: usize, kind: WeightKind) -> usize {
        let row = self.row(row);
        match kind {
            WeightKind::Hamming => row.iter().filter(|x| !x.is_zero()).count(),
            WeightKind::Symplectic => row
                .chunks(2)
                .filter(|pair| pair.iter().any(|x| !x.is_zero()))
                .count(),
        }
    }

    fn gather_row(&self, row: usize, col_map: &[usize]) -> Vec<FFElem> {
        let row = self.row(row);
        col_map.iter().map(|&c| row[c]).collect()
    }

    fn vector(&self, v: &[FFElem]) -> Vec<FFElem> {
        v.to_vec()
    }

    fn reduce(&self, pivots: &[usize], v: &mut Vec<FFElem>) -> bool {
        for (i, &c) in pivots.iter().enumerate() {
            let factor = v[c];
            if !factor.is_zero() {
                axpy(&self.field, v, self.row(i), factor, c);
            }
        }
        v.iter().all(|x| x.is_zero())
    }
}

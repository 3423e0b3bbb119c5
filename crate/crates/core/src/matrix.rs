//! Dense row-major sample storage.
//!
//! Samples are stored either as `f64` or, to halve memory at paper scale, as
//! `f32`. All arithmetic through [`Row`] is carried out in `f64`.

use std::ops::Range;

use crate::par::Execution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    F64,
    F32,
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    F64(Vec<f64>),
    F32(Vec<f32>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

trait Elem: Copy {
    fn to_f64(self) -> f64;
}

impl Elem for f64 {
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Elem for f32 {
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

#[inline]
fn dot<T: Elem>(row: &[T], x: &[f64]) -> f64 {
    row.iter().zip(x).map(|(a, b)| a.to_f64() * b).sum()
}

#[inline]
fn dot_at<T: Elem>(row: &[T], idx: &[usize], x: &[f64]) -> f64 {
    idx.iter().zip(x).map(|(&j, b)| row[j].to_f64() * b).sum()
}

#[inline]
fn axpy<T: Elem>(row: &[T], alpha: f64, out: &mut [f64]) {
    for (o, a) in out.iter_mut().zip(row) {
        *o += alpha * a.to_f64();
    }
}

#[inline]
fn axpy_at<T: Elem>(row: &[T], idx: &[usize], alpha: f64, out: &mut [f64]) {
    for (o, &j) in out.iter_mut().zip(idx) {
        *o += alpha * row[j].to_f64();
    }
}

/// A borrowed sample vector.
#[derive(Clone, Copy, Debug)]
pub enum Row<'a> {
    F64(&'a [f64]),
    F32(&'a [f32]),
}

macro_rules! dispatch {
    ($row:expr, $r:ident => $body:expr) => {
        match $row {
            Row::F64($r) => $body,
            Row::F32($r) => $body,
        }
    };
}

impl<'a> Row<'a> {
    pub fn len(&self) -> usize {
        dispatch!(*self, r => r.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> f64 {
        dispatch!(*self, r => r[j].to_f64())
    }

    /// `⟨row, x⟩` over all coordinates.
    #[inline]
    pub fn dot(&self, x: &[f64]) -> f64 {
        dispatch!(*self, r => dot(r, x))
    }

    /// `Σ_t row[idx[t]] · x[t]`.
    #[inline]
    pub fn dot_at(&self, idx: &[usize], x: &[f64]) -> f64 {
        dispatch!(*self, r => dot_at(r, idx, x))
    }

    /// `out += alpha · row`.
    #[inline]
    pub fn add_scaled_to(&self, alpha: f64, out: &mut [f64]) {
        dispatch!(*self, r => axpy(r, alpha, out))
    }

    /// `out[t] += alpha · row[idx[t]]`.
    #[inline]
    pub fn add_scaled_at(&self, idx: &[usize], alpha: f64, out: &mut [f64]) {
        dispatch!(*self, r => axpy_at(r, idx, alpha, out))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        dispatch!(*self, r => r.iter().map(|v| v.to_f64()).collect())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, precision: Precision) -> Self {
        let storage = match precision {
            Precision::F64 => Storage::F64(vec![0.0; rows * cols]),
            Precision::F32 => Storage::F32(vec![0.0; rows * cols]),
        };
        Matrix {
            rows,
            cols,
            storage,
        }
    }

    /// Builds an `f64` matrix from row-major data.
    ///
    /// # Panics
    /// If `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Matrix {
            rows,
            cols,
            storage: Storage::F64(data),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn precision(&self) -> Precision {
        match self.storage {
            Storage::F64(_) => Precision::F64,
            Storage::F32(_) => Precision::F32,
        }
    }

    pub fn row(&self, i: usize) -> Row<'_> {
        let span = i * self.cols..(i + 1) * self.cols;
        match &self.storage {
            Storage::F64(d) => Row::F64(&d[span]),
            Storage::F32(d) => Row::F32(&d[span]),
        }
    }

    pub fn view(&self) -> Rows<'_> {
        self.slice(0..self.rows)
    }

    pub fn slice(&self, range: Range<usize>) -> Rows<'_> {
        assert!(range.start <= range.end && range.end <= self.rows);
        Rows {
            matrix: self,
            start: range.start,
            end: range.end,
        }
    }

    /// Fills every row with `fill(row_index, buffer)`. The buffer is an `f64`
    /// scratch row which is converted on store when the storage is `f32`.
    pub fn fill_rows<F>(&mut self, exec: Execution, fill: F)
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        let cols = self.cols;
        if cols == 0 {
            return;
        }
        match &mut self.storage {
            Storage::F64(d) => exec.for_each_block_mut(d, cols, |start, row| fill(start / cols, row)),
            Storage::F32(d) => exec.for_each_block_mut(d, cols, |start, row| {
                let mut buf = vec![0.0; cols];
                fill(start / cols, &mut buf);
                for (dst, src) in row.iter_mut().zip(&buf) {
                    *dst = *src as f32;
                }
            }),
        }
    }

}

/// A contiguous range of rows of a [`Matrix`]. Row indices passed to
/// [`Rows::row`] are relative to the start of the range.
#[derive(Clone, Copy, Debug)]
pub struct Rows<'a> {
    matrix: &'a Matrix,
    start: usize,
    end: usize,
}

impl<'a> Rows<'a> {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> Row<'a> {
        debug_assert!(i < self.len());
        self.matrix.row(self.start + i)
    }

    pub fn iter(&self) -> impl Iterator<Item = Row<'a>> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }
}

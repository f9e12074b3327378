use std::sync::atomic::{AtomicU32, Ordering};

use rand::Rng;

/// Dense row-major `f32` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Entries drawn uniformly from `[-bound, bound)`.
    pub fn uniform<R: Rng>(rows: usize, cols: usize, bound: f32, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(-bound..bound))
            .collect();
        Matrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f32>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Adds the listed rows into `acc`, in order.
    pub fn add_rows_into(&self, rows: &[usize], acc: &mut [f32]) {
        for &r in rows {
            for (a, x) in acc.iter_mut().zip(self.row(r)) {
                *a += *x;
            }
        }
    }

    /// View for lock-free concurrent updates.
    pub(crate) fn shared(&mut self) -> SharedMatrix<'_> {
        let slice: &mut [f32] = &mut self.data;
        // SAFETY: AtomicU32 has the same size, alignment and bit validity as
        // u32, which matches f32; the exclusive borrow is held for 'a.
        let atoms = unsafe { &*(slice as *mut [f32] as *const [AtomicU32]) };
        SharedMatrix {
            data: atoms,
            cols: self.cols,
        }
    }
}

/// Row access shared between training workers.
///
/// Reads and writes are individually atomic (relaxed) but read-modify-write
/// sequences are not: concurrent updates to the same row may overwrite each
/// other. That loss is tolerated, as in Hogwild-style SGD.
#[derive(Clone, Copy)]
pub(crate) struct SharedMatrix<'a> {
    data: &'a [AtomicU32],
    cols: usize,
}

impl SharedMatrix<'_> {
    fn cells(&self, i: usize) -> &[AtomicU32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn read_row(&self, i: usize, out: &mut [f32]) {
        for (o, a) in out.iter_mut().zip(self.cells(i)) {
            *o = f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    pub fn write_row(&self, i: usize, values: &[f32]) {
        for (a, v) in self.cells(i).iter().zip(values) {
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    pub fn add_row_into(&self, i: usize, acc: &mut [f32]) {
        for (o, a) in acc.iter_mut().zip(self.cells(i)) {
            *o += f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    pub fn add_to_row(&self, i: usize, delta: &[f32]) {
        for (a, d) in self.cells(i).iter().zip(delta) {
            let v = f32::from_bits(a.load(Ordering::Relaxed)) + d;
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

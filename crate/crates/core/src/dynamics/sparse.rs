use nalgebra::DMatrix;

/// Compressed sparse row matrix with the handful of products the
/// simulation and adjoint passes need.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Duplicate entries are summed; explicit zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<_> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &sorted {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
        .pruned()
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut triplets = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    triplets.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &triplets)
    }

    fn pruned(self) -> Self {
        let mut row_ptr = vec![0; self.rows + 1];
        let mut col_idx = Vec::with_capacity(self.values.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.rows {
            for j in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[j] != 0.0 {
                    col_idx.push(self.col_idx[j]);
                    values.push(self.values[j]);
                }
            }
            row_ptr[r + 1] = values.len();
        }
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `y += A x`
    pub fn mul_add(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[j] * x[self.col_idx[j]];
            }
            *yr += acc;
        }
    }

    /// `y += Aᵀ x`
    pub fn mul_t_add(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0.0 {
                continue;
            }
            for j in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.col_idx[j]] += self.values[j] * xr;
            }
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_add(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for j in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[j])] += self.values[j];
            }
        }
        m
    }

    /// Dense `D A` for a dense left factor.
    pub(crate) fn left_mul_dense(&self, d: &DMatrix<f64>) -> DMatrix<f64> {
        debug_assert_eq!(d.ncols(), self.rows);
        let mut out = DMatrix::zeros(d.nrows(), self.cols);
        for r in 0..self.rows {
            for j in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (c, v) = (self.col_idx[j], self.values[j]);
                for i in 0..d.nrows() {
                    out[(i, c)] += d[(i, r)] * v;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_match_dense() {
        let dense = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, -3.0, 0.5]);
        let a = CsrMatrix::from_dense(&dense);
        assert_eq!(a.nnz(), 4);
        let x = [1.0, 2.0, 3.0];
        assert_eq!(a.mul(&x), vec![7.0, -4.5]);
        let mut y = vec![0.0; 3];
        a.mul_t_add(&[1.0, 2.0], &mut y);
        assert_eq!(y, vec![1.0, -6.0, 3.0]);
        assert_eq!(a.to_dense(), dense);
        let d = DMatrix::from_row_slice(1, 2, &[2.0, 1.0]);
        assert_eq!(a.left_mul_dense(&d), &d * &dense);
    }

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let a = CsrMatrix::from_triplets(
            2,
            2,
            &[(1, 1, 1.0), (0, 0, 2.0), (1, 1, 2.0), (0, 1, 1.0), (0, 1, -1.0)],
        );
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.to_dense(), DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]));
    }
}

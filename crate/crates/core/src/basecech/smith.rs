//! Smith normal form over the integers, with both unimodular transforms
//! and their inverses.

use std::fmt;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: i128) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "IntMatrix::mul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, v.len(), "IntMatrix::mul_vec shape");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Columns `from..` as a new matrix.
    pub fn columns_from(&self, from: usize) -> IntMatrix {
        let mut out = Self::zeros(self.rows, self.cols.saturating_sub(from));
        for i in 0..self.rows {
            for j in from..self.cols {
                out.set(i, j - from, self.get(i, j));
            }
        }
        out
    }

    /// Rows `from..` as a new matrix.
    pub fn rows_from(&self, from: usize) -> IntMatrix {
        let start = from.min(self.rows);
        IntMatrix {
            rows: self.rows - start,
            cols: self.cols,
            data: self.data[start * self.cols..].to_vec(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row_i += k · row_j
    fn add_row(&mut self, i: usize, j: usize, k: i128) {
        for c in 0..self.cols {
            let x = self.get(j, c);
            self.data[i * self.cols + c] += k * x;
        }
    }

    /// col_i += k · col_j
    fn add_col(&mut self, i: usize, j: usize, k: i128) {
        for r in 0..self.rows {
            let x = self.get(r, j);
            self.data[r * self.cols + i] += k * x;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            self.data[i * self.cols + c] = -self.data[i * self.cols + c];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            self.data[r * self.cols + j] = -self.data[r * self.cols + j];
        }
    }
}

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal, each diagonal
/// entry dividing the next.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub diagonal: Vec<i128>,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|&&x| x != 0).count()
    }
}

struct Tracker {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Tracker {
    fn add_row(&mut self, i: usize, j: usize, k: i128) {
        self.a.add_row(i, j, k);
        self.u.add_row(i, j, k);
        self.u_inv.add_col(j, i, -k);
    }

    fn add_col(&mut self, i: usize, j: usize, k: i128) {
        self.a.add_col(i, j, k);
        self.v.add_col(i, j, k);
        self.v_inv.add_row(j, i, -k);
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Position of the smallest nonzero magnitude in the trailing block.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, i128)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let x = self.a.get(i, j).abs();
                if x != 0 && best.is_none_or(|b| x < b.2) {
                    best = Some((i, j, x));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut st = Tracker {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
        v_inv: IntMatrix::identity(n),
    };
    for t in 0..m.min(n) {
        let Some((pi, pj)) = st.min_entry(t) else {
            break;
        };
        st.swap_rows(t, pi);
        st.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..m {
                let q = st.a.get(i, t).div_euclid(st.a.get(t, t));
                if q != 0 {
                    st.add_row(i, t, -q);
                }
                if st.a.get(i, t) != 0 {
                    st.swap_rows(t, i);
                    changed = true;
                }
            }
            for j in t + 1..n {
                let q = st.a.get(t, j).div_euclid(st.a.get(t, t));
                if q != 0 {
                    st.add_col(j, t, -q);
                }
                if st.a.get(t, j) != 0 {
                    st.swap_cols(t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Pivot row and column are clear; enforce divisibility.
            let p = st.a.get(t, t);
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| st.a.get(i, j) % p != 0));
            match offender {
                Some(i) => st.add_row(t, i, 1),
                None => break,
            }
        }
        if st.a.get(t, t) < 0 {
            st.negate_row(t);
        }
    }
    let diagonal = (0..m.min(n)).map(|k| st.a.get(k, k)).collect();
    SmithForm {
        diagonal,
        u: st.u,
        u_inv: st.u_inv,
        v: st.v,
        v_inv: st.v_inv,
    }
}

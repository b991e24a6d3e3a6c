//! Dense elimination used by iterative rounding.

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }
}

/// A nonzero vector in the kernel of `a`, or `None` if the kernel is
/// trivial at tolerance `tol`.
///
/// Gaussian elimination with partial pivoting; the lowest-index non-pivot
/// column is set to 1 and the pivot variables are back-substituted.
pub fn kernel_vector(mut a: Dense, tol: f64) -> Option<Vec<f64>> {
    let (rows, cols) = (a.rows, a.cols);
    let mut pivot_cols = Vec::with_capacity(rows.min(cols));
    let mut r = 0;
    let mut free_col = None;
    for c in 0..cols {
        if r == rows {
            free_col.get_or_insert(c);
            break;
        }
        let (best, best_abs) = (r..rows)
            .map(|i| (i, a.get(i, c).abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= tol {
            free_col.get_or_insert(c);
            continue;
        }
        a.swap_rows(r, best);
        let p = a.get(r, c);
        for i in r + 1..rows {
            let f = a.get(i, c) / p;
            if f != 0.0 {
                for j in c..cols {
                    let v = a.get(i, j) - f * a.get(r, j);
                    a.set(i, j, v);
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free = free_col?;
    let mut y = vec![0.0; cols];
    y[free] = 1.0;
    // back-substitute pivot rows whose pivot column precedes `free` or not;
    // every pivot variable is determined by the free one (others stay 0).
    for (row, &pc) in pivot_cols.iter().enumerate().rev() {
        let mut s = 0.0;
        for j in pc + 1..cols {
            s += a.get(row, j) * y[j];
        }
        y[pc] = -s / a.get(row, pc);
    }
    Some(y)
}

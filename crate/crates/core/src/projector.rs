//! Orthogonal projection onto the complement of a changing set of 0/1 rows.
//!
//! Rows are stored restricted to the coordinates that are still free.  The
//! Gram matrix AAᵀ is kept as a Cholesky factor: adding a row appends one
//! factor row, and dropping a coordinate from every row is a rank-one
//! downdate.  Rows that are (numerically) in the span of the kept rows are
//! not factored, which is harmless because restriction to the free
//! coordinates is linear and keeps them in the span.

const DEPENDENT_TOL: f64 = 1e-9;

pub(crate) struct Projector {
    rows: Vec<Vec<u32>>,
    /// Lower-triangular factor, row i holds i + 1 entries.
    l: Vec<Vec<f64>>,
    /// Kept rows containing each coordinate.
    vertex_rows: Vec<Vec<u32>>,
    pub rebuilds: usize,
}

impl Projector {
    pub fn new(n: usize) -> Self {
        Projector {
            rows: Vec::new(),
            l: Vec::new(),
            vertex_rows: vec![Vec::new(); n],
            rebuilds: 0,
        }
    }

    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inner products of `row` with every kept row.
    fn overlaps(&self, row: &[u32]) -> Vec<f64> {
        let mut w = vec![0.0; self.rows.len()];
        for &v in row {
            for &i in &self.vertex_rows[v as usize] {
                w[i as usize] += 1.0;
            }
        }
        w
    }

    fn forward(&self, b: &mut [f64]) {
        for i in 0..b.len() {
            let li = &self.l[i];
            let s: f64 = li[..i].iter().zip(&b[..i]).map(|(a, c)| a * c).sum();
            b[i] = (b[i] - s) / li[i];
        }
    }

    fn backward(&self, z: &mut [f64]) {
        for i in (0..z.len()).rev() {
            let li = &self.l[i];
            z[i] /= li[i];
            let yi = z[i];
            for (zk, lik) in z[..i].iter_mut().zip(&li[..i]) {
                *zk -= lik * yi;
            }
        }
    }

    /// Adds a row given by its free members.  Returns false when the row is
    /// already in the span.
    pub fn add_row(&mut self, row: Vec<u32>) -> bool {
        if row.is_empty() {
            return false;
        }
        let mut w = self.overlaps(&row);
        self.forward(&mut w);
        let d2 = row.len() as f64 - w.iter().map(|x| x * x).sum::<f64>();
        if d2 <= DEPENDENT_TOL * row.len() as f64 {
            return false;
        }
        let idx = self.rows.len() as u32;
        for &v in &row {
            self.vertex_rows[v as usize].push(idx);
        }
        w.push(d2.sqrt());
        self.l.push(w);
        self.rows.push(row);
        true
    }

    /// Removes coordinate `j` from every row.
    pub fn freeze(&mut self, j: usize) {
        let touched = std::mem::take(&mut self.vertex_rows[j]);
        if touched.is_empty() {
            return;
        }
        for &i in &touched {
            let r = &mut self.rows[i as usize];
            if let Ok(pos) = r.binary_search(&(j as u32)) {
                r.remove(pos);
            }
        }
        let k = self.rows.len();
        let first = touched.iter().copied().min().unwrap() as usize;
        let mut c = vec![0.0; k];
        for &i in &touched {
            c[i as usize] = 1.0;
        }
        for p in first..k {
            let lpp = self.l[p][p];
            let r2 = lpp * lpp - c[p] * c[p];
            if r2 <= DEPENDENT_TOL * self.rows[p].len().max(1) as f64 {
                self.rebuild();
                return;
            }
            let r = r2.sqrt();
            let (cs, sn) = (r / lpp, c[p] / lpp);
            self.l[p][p] = r;
            for i in p + 1..k {
                let lip = (self.l[i][p] - sn * c[i]) / cs;
                self.l[i][p] = lip;
                c[i] = cs * c[i] - sn * lip;
            }
        }
    }

    /// Refactors from the current rows, dropping dependent ones.
    fn rebuild(&mut self) {
        self.rebuilds += 1;
        let rows = std::mem::take(&mut self.rows);
        self.l.clear();
        for vr in &mut self.vertex_rows {
            vr.clear();
        }
        for row in rows {
            self.add_row(row);
        }
    }

    /// g ← g − Aᵀ(AAᵀ)⁻¹Ag over the kept rows.
    pub fn project(&self, g: &mut [f64]) {
        if self.rows.is_empty() {
            return;
        }
        {
            let mut y: Vec<f64> = self
                .rows
                .iter()
                .map(|r| r.iter().map(|&v| g[v as usize]).sum())
                .collect();
            self.forward(&mut y);
            self.backward(&mut y);
            for (r, &yi) in self.rows.iter().zip(&y) {
                for &v in r {
                    g[v as usize] -= yi;
                }
            }
        }
    }
}

//! Dense least squares by Householder QR.

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Every column must have the same length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Self {
        let rows = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == rows), "ragged columns");
        Self {
            rows,
            cols: columns.len(),
            data: columns.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn select_columns(&self, keep: &[usize]) -> Matrix {
        let cols: Vec<Vec<f64>> = keep.iter().map(|&j| self.col(j).to_vec()).collect();
        let mut m = Matrix::from_columns(&cols);
        if cols.is_empty() {
            m.rows = self.rows;
        }
        m
    }

    /// `X b`.
    pub fn mul_vec(&self, b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, &bj) in b.iter().enumerate() {
            for (o, &x) in out.iter_mut().zip(self.col(j)) {
                *o += x * bj;
            }
        }
        out
    }
}

/// Relative column-norm threshold below which a column counts as a linear
/// combination of the columns before it.
pub const RANK_TOL: f64 = 1e-10;

struct Reflector {
    row: usize,
    v: Vec<f64>,
}

impl Reflector {
    /// Apply `I - 2 v v'/(v'v)` (with `v` stored normalized) to `x[row..]`.
    fn apply(&self, x: &mut [f64]) {
        let tail = &mut x[self.row..];
        let dot: f64 = self.v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum();
        for (t, &vi) in tail.iter_mut().zip(&self.v) {
            *t -= 2.0 * dot * vi;
        }
    }
}

/// Sequential Householder QR that skips columns found dependent on earlier
/// ones.
struct Qr {
    reflectors: Vec<Reflector>,
    /// `r[j]` holds the first `rank` entries of transformed column `kept[j]`.
    r: Vec<Vec<f64>>,
    kept: Vec<usize>,
    dependent: Vec<usize>,
}

fn householder(x: &Matrix) -> Qr {
    let mut a = x.clone();
    let mut qr = Qr {
        reflectors: Vec::new(),
        r: Vec::new(),
        kept: Vec::new(),
        dependent: Vec::new(),
    };
    for j in 0..x.cols() {
        let orig_norm = x.col(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        let col = a.col_mut(j);
        for h in &qr.reflectors {
            h.apply(col);
        }
        let k = qr.reflectors.len();
        let tail_norm = col[k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if k >= x.rows() || tail_norm <= RANK_TOL * orig_norm.max(f64::MIN_POSITIVE) {
            qr.dependent.push(j);
            continue;
        }
        let alpha = if col[k] > 0.0 { -tail_norm } else { tail_norm };
        let mut v: Vec<f64> = col[k..].to_vec();
        v[0] -= alpha;
        let vn = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        v.iter_mut().for_each(|t| *t /= vn);
        let h = Reflector { row: k, v };
        h.apply(col);
        qr.reflectors.push(h);
        qr.r.push(col[..=k].to_vec());
        qr.kept.push(j);
    }
    qr
}

/// Indices of a maximal set of linearly independent columns, scanning left
/// to right.
pub fn independent_columns(x: &Matrix) -> Vec<usize> {
    householder(x).kept
}

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coef: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    /// `(X'X)^{-1}`, row-major `cols x cols`.
    pub xtx_inv: Vec<f64>,
}

/// Solve `min ||y - X b||`. Returns the dependent column indices when `X`
/// is not of full column rank.
pub fn lstsq(x: &Matrix, y: &[f64]) -> Result<LeastSquares, Vec<usize>> {
    assert_eq!(x.rows(), y.len());
    let qr = householder(x);
    if !qr.dependent.is_empty() {
        return Err(qr.dependent);
    }
    let p = x.cols();
    let mut qty = y.to_vec();
    for h in &qr.reflectors {
        h.apply(&mut qty);
    }
    let r = |i: usize, j: usize| qr.r[j][i];
    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = ((i + 1)..p).map(|j| r(i, j) * coef[j]).sum();
        coef[i] = (qty[i] - s) / r(i, i);
    }
    // R^{-1} by back substitution, then (X'X)^{-1} = R^{-1} R^{-T}.
    let mut rinv = vec![0.0; p * p];
    for c in 0..p {
        for i in (0..=c).rev() {
            let e = if i == c { 1.0 } else { 0.0 };
            let s: f64 = ((i + 1)..=c).map(|j| r(i, j) * rinv[j * p + c]).sum();
            rinv[i * p + c] = (e - s) / r(i, i);
        }
    }
    let mut xtx_inv = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            xtx_inv[i * p + j] = (i.max(j)..p).map(|k| rinv[i * p + k] * rinv[j * p + k]).sum();
        }
    }
    let fitted = x.mul_vec(&coef);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss = residuals.iter().map(|e| e * e).sum();
    Ok(LeastSquares {
        coef,
        residuals,
        rss,
        xtx_inv,
    })
}

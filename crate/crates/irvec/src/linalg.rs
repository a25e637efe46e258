//! Small dense linear algebra: vector helpers, Gaussian elimination,
//! a cyclic Jacobi eigensolver for symmetric matrices, and minimum-norm
//! least squares built on top of it.
//!
//! Everything here works on `Vec<f64>` / row-major `Matrix` and is sized
//! for the small systems this crate solves (cycle systems of a handful of
//! instructions, covariance matrices up to a few hundred rows).

/// Dense vector of f64 components.
pub type Vector = Vec<f64>;

pub fn zeros(n: usize) -> Vector {
    vec![0.0; n]
}

pub fn add_assign(a: &mut Vector, b: &[f64]) {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vector {
    a.iter().map(|x| x * c).collect()
}

pub fn axpy(acc: &mut Vector, c: f64, a: &[f64]) {
    debug_assert_eq!(acc.len(), a.len());
    for (x, y) in acc.iter_mut().zip(a) {
        *x += c * y;
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_l1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Normalize to unit L2 norm in place. Zero vectors are left unchanged.
pub fn normalize(a: &mut Vector) {
    let n = norm_l2(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vector {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// A^T A (symmetric, cols x cols).
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in i..self.cols {
                let mut s = 0.0;
                for k in 0..self.rows {
                    s += self[(k, i)] * self[(k, j)];
                }
                g[(i, j)] = s;
                g[(j, i)] = s;
            }
        }
        g
    }

    /// A^T x
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vector {
        assert_eq!(self.rows, x.len());
        let mut out = zeros(self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for j in 0..self.cols {
                out[j] += r[j] * x[i];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting for a square system, reusable
/// across many right-hand sides.
pub struct Lu {
    n: usize,
    lu: Matrix,
    perm: Vec<usize>,
}

/// Factor a square matrix. Returns `None` when a pivot falls below
/// `singular_tol` times the largest absolute entry (treated as singular).
pub fn lu_factor(a: &Matrix, singular_tol: f64) -> Option<Lu> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale_ref = (0..n)
        .flat_map(|i| lu.row(i).iter().map(|x| x.abs()).collect::<Vec<_>>())
        .fold(0.0_f64, f64::max)
        .max(1.0);
    for k in 0..n {
        // partial pivot
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= singular_tol * scale_ref {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
        }
        for i in k + 1..n {
            let f = lu[(i, k)] / lu[(k, k)];
            lu[(i, k)] = f;
            for j in k + 1..n {
                let d = f * lu[(k, j)];
                lu[(i, j)] -= d;
            }
        }
    }
    Some(Lu { n, lu, perm })
}

impl Lu {
    pub fn solve(&self, b: &[f64]) -> Vector {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y: Vector = self.perm.iter().map(|&i| b[i]).collect();
        for i in 1..n {
            for j in 0..i {
                y[i] -= self.lu[(i, j)] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[(i, j)] * y[j];
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
/// Returns (eigenvalues, eigenvectors) sorted by descending eigenvalue;
/// eigenvectors are the columns of the returned matrix, orthonormal.
pub fn jacobi_eigen(a: &Matrix) -> (Vector, Matrix) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let off = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let fro = {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += m[(i, j)] * m[(i, j)];
            }
        }
        s.sqrt().max(1e-300)
    };
    let tol = 1e-14 * fro;
    for _sweep in 0..100 {
        if off(&m) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() <= tol / (n as f64 * n as f64).max(1.0) {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(j, j)].partial_cmp(&m[(i, i)]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j))
    });
    let vals: Vector = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (newcol, &oldcol) in order.iter().enumerate() {
        for k in 0..n {
            vecs[(k, newcol)] = v[(k, oldcol)];
        }
    }
    (vals, vecs)
}

/// Minimum-norm least-squares solution of a square system A x = b using
/// the eigendecomposition of A^T A. Rank is decided against `rank_tol`
/// relative to the largest eigenvalue. Returns the solution; callers check
/// the residual to distinguish the consistent from the inconsistent case.
pub fn min_norm_solve(a: &Matrix, b: &[f64], rank_tol: f64) -> Vector {
    let g = a.gram();
    let (vals, vecs) = jacobi_eigen(&g);
    let atb = a.mul_transpose_vec(b);
    let n = a.cols;
    let cutoff = vals.first().copied().unwrap_or(0.0).abs().max(0.0) * rank_tol;
    let mut x = zeros(n);
    for (k, &lambda) in vals.iter().enumerate() {
        if lambda <= cutoff || lambda <= 0.0 {
            continue;
        }
        let mut vk = zeros(n);
        for i in 0..n {
            vk[i] = vecs[(i, k)];
        }
        let coef = dot(&vk, &atb) / lambda;
        axpy(&mut x, coef, &vk);
    }
    x
}

//! Dense LU factorization with partial pivoting for simplex basis matrices.

/// LU factors of a square matrix, stored packed (unit L below the
/// diagonal, U on and above), with the row permutation applied first.
pub struct Lu {
    n: usize,
    /// Column-major packed factors.
    a: Vec<f64>,
    /// perm[i] = original row index moved to position i.
    perm: Vec<usize>,
}

impl Lu {
    /// Factor a column-major dense matrix. Returns `None` when a pivot
    /// falls below `tiny` (numerically singular basis).
    pub fn factor(mut a: Vec<f64>, n: usize, tiny: f64) -> Option<Lu> {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best = k;
            let mut best_abs = a[k * n + k].abs();
            for i in (k + 1)..n {
                let v = a[k * n + i].abs();
                if v > best_abs {
                    best_abs = v;
                    best = i;
                }
            }
            if best_abs <= tiny {
                return None;
            }
            if best != k {
                perm.swap(k, best);
                for j in 0..n {
                    a.swap(j * n + k, j * n + best);
                }
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                a[k * n + i] /= pivot;
            }
            for j in (k + 1)..n {
                let f = a[j * n + k];
                if f != 0.0 {
                    for i in (k + 1)..n {
                        a[j * n + i] -= a[k * n + i] * f;
                    }
                }
            }
        }
        Some(Lu { n, a, perm })
    }

    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[i] = b[self.perm[i]];
        }
        // L y = Pb
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                for i in (j + 1)..n {
                    x[i] -= self.a[j * n + i] * xj;
                }
            }
        }
        // U x = y
        for j in (0..n).rev() {
            x[j] /= self.a[j * n + j];
            let xj = x[j];
            if xj != 0.0 {
                for i in 0..j {
                    x[i] -= self.a[j * n + i] * xj;
                }
            }
        }
        b.copy_from_slice(&x);
    }

    /// Solve `Aᵀ x = b` in place.
    pub fn solve_t(&self, b: &mut [f64]) {
        let n = self.n;
        // Uᵀ y = b
        for j in 0..n {
            let mut s = b[j];
            for i in 0..j {
                s -= self.a[j * n + i] * b[i];
            }
            b[j] = s / self.a[j * n + j];
        }
        // Lᵀ z = y
        for j in (0..n).rev() {
            let mut s = b[j];
            for i in (j + 1)..n {
                s -= self.a[j * n + i] * b[i];
            }
            b[j] = s;
        }
        // x = Pᵀ z
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = b[i];
        }
        b.copy_from_slice(&x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve_small_system() {
        // A = [[2, 1], [1, 3]] column-major
        let a = vec![2.0, 1.0, 1.0, 3.0];
        let lu = Lu::factor(a, 2, 1e-12).unwrap();
        let mut b = vec![5.0, 10.0];
        lu.solve(&mut b);
        // x = (1, 3)
        assert!((b[0] - 1.0).abs() < 1e-12);
        assert!((b[1] - 3.0).abs() < 1e-12);

        let mut bt = vec![4.0, 10.0];
        lu.solve_t(&mut bt);
        // Aᵀ x = b → x = (2/5·... ) check by multiplying back
        let x = bt;
        assert!((2.0 * x[0] + 1.0 * x[1] - 4.0).abs() < 1e-12);
        assert!((1.0 * x[0] + 3.0 * x[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(Lu::factor(a, 2, 1e-12).is_none());
    }
}

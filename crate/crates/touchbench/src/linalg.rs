//! Minimal dense linear algebra used by the classifiers.

/// Symmetric d x d matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    pub d: usize,
    pub data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(d: usize) -> Self {
        SquareMatrix {
            d,
            data: vec![0.0; d * d],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.d + j]
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: SquareMatrix,
}

impl Cholesky {
    /// Returns None when the matrix is not positive definite (pivot <= 0
    /// within a small relative tolerance).
    pub fn factor(a: &SquareMatrix) -> Option<Cholesky> {
        let d = a.d;
        let scale = (0..d).map(|i| a.at(i, i).abs()).fold(0.0f64, f64::max).max(1.0);
        let tol = scale * 1e-12;
        let mut l = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in 0..=i {
                let mut sum = a.at(i, j);
                for k in 0..j {
                    sum -= l.at(i, k) * l.at(j, k);
                }
                if i == j {
                    if sum <= tol {
                        return None;
                    }
                    *l.at_mut(i, j) = sum.sqrt();
                } else {
                    *l.at_mut(i, j) = sum / l.at(j, j);
                }
            }
        }
        Some(Cholesky { l })
    }

    /// Solves A x = b via the factor.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let d = self.l.d;
        assert_eq!(b.len(), d);
        let mut y = vec![0.0; d];
        for i in 0..d {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l.at(i, k) * y[k];
            }
            y[i] = sum / self.l.at(i, i);
        }
        let mut x = vec![0.0; d];
        for i in (0..d).rev() {
            let mut sum = y[i];
            for k in (i + 1)..d {
                sum -= self.l.at(k, i) * x[k];
            }
            x[i] = sum / self.l.at(i, i);
        }
        x
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_a_known_system() {
        // A = [[4, 2], [2, 3]], b = [10, 9] -> x = [1.5, 2]
        let a = SquareMatrix {
            d: 2,
            data: vec![4.0, 2.0, 2.0, 3.0],
        };
        let f = Cholesky::factor(&a).unwrap();
        let x = f.solve(&[10.0, 9.0]);
        assert!((x[0] - 1.5).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_has_no_factor() {
        let a = SquareMatrix {
            d: 2,
            data: vec![1.0, 1.0, 1.0, 1.0],
        };
        assert!(Cholesky::factor(&a).is_none());
    }
}

//! Banded LU factorization with partial pivoting, LAPACK-style band storage.
//!
//! A matrix with `kl` subdiagonals and `ku` superdiagonals is stored
//! column-major with `2*kl + ku + 1` rows per column; the extra `kl` rows
//! absorb fill-in from row interchanges.

use crate::error::{Error, Result};

pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandedMatrix {
            n,
            kl,
            ku,
            ldab,
            data: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        // Row i of column j sits at band row kl + ku + i - j. Interchanges
        // during factorization reach up to kl rows above the logical band,
        // so storage validity is the wider check.
        debug_assert!(
            i + self.kl + self.ku >= j && j + self.kl >= i,
            "({i},{j}) outside band storage"
        );
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i + self.ku >= j && j + self.kl >= i, "({i},{j}) off band");
        let o = self.offset(i, j);
        self.data[o] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i + self.ku >= j && j + self.kl >= i, "({i},{j}) off band");
        let o = self.offset(i, j);
        self.data[o] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.offset(i, j)]
    }

    /// In-place LU with row partial pivoting. After success the receiver
    /// holds the factors; solve through [`BandedLu`].
    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let kv = kl + ku; // width of the upper working band
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            // Pivot among rows j..=j+kl (inside the band).
            let i_end = (j + kl).min(n - 1);
            let mut piv_row = j;
            let mut piv_val = self.data[self.offset(j, j)].abs();
            for i in (j + 1)..=i_end {
                let v = self.data[self.offset(i, j)].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = i;
                }
            }
            if piv_val == 0.0 {
                return Err(Error::Discretization(format!(
                    "banded LU: exactly singular at column {j}"
                )));
            }
            ipiv[j] = piv_row;
            let k_end = (j + kv).min(n - 1);
            if piv_row != j {
                for k in j..=k_end {
                    let a = self.offset(j, k);
                    let b = self.offset(piv_row, k);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.offset(j, j)];
            for i in (j + 1)..=i_end {
                let o = self.offset(i, j);
                let m = self.data[o] / pivot;
                self.data[o] = m;
                if m != 0.0 {
                    for k in (j + 1)..=k_end {
                        let ujk = self.data[self.offset(j, k)];
                        if ujk != 0.0 {
                            let t = self.offset(i, k);
                            self.data[t] -= m * ujk;
                        }
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            ldab: self.ldab,
            data: self.data,
            ipiv,
        })
    }
}

pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.ldab + (self.kl + self.ku + i - j)]
    }

    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let (n, kl) = (self.n, self.kl);
        let kv = self.kl + self.ku;
        assert_eq!(b.len(), n);
        // L stage with the recorded interchanges.
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let i_end = (j + kl).min(n - 1);
            for i in (j + 1)..=i_end {
                b[i] -= self.at(i, j) * b[j];
            }
        }
        // U stage.
        for j in (0..n).rev() {
            let k_end = (j + kv).min(n - 1);
            let mut v = b[j];
            for k in (j + 1)..=k_end {
                v -= self.at(j, k) * b[k];
            }
            b[j] = v / self.at(j, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense reference solve with partial pivoting, for cross-checking.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for j in 0..n {
            let mut p = j;
            for i in j + 1..n {
                if a[i][j].abs() > a[p][j].abs() {
                    p = i;
                }
            }
            a.swap(j, p);
            b.swap(j, p);
            for i in j + 1..n {
                let m = a[i][j] / a[j][j];
                for k in j..n {
                    a[i][k] -= m * a[j][k];
                }
                b[i] -= m * b[j];
            }
        }
        for j in (0..n).rev() {
            for k in j + 1..n {
                b[j] -= a[j][k] * b[k];
            }
            b[j] /= a[j][j];
        }
        b
    }

    /// Deterministic pseudo-random stream for filling test matrices.
    struct Lcg(u64);
    impl Lcg {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
    }

    #[test]
    fn matches_dense_reference_on_random_bands() {
        let (n, kl, ku) = (40, 5, 3);
        let mut rng = Lcg(0x5eed);
        let mut banded = BandedMatrix::new(n, kl, ku);
        let mut dense = vec![vec![0.0; n]; n];
        for j in 0..n {
            for i in j.saturating_sub(ku)..=(j + kl).min(n - 1) {
                let v = rng.next_f64() + if i == j { 4.0 } else { 0.0 };
                banded.set(i, j, v);
                dense[i][j] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let lu = banded.factor().unwrap();
        let mut x = b.clone();
        lu.solve(&mut x);
        let x_ref = dense_solve(dense, b);
        for i in 0..n {
            assert!((x[i] - x_ref[i]).abs() < 1e-11, "i={i}: {} vs {}", x[i], x_ref[i]);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_diagonal() {
        // First diagonal entry zero: unpivoted elimination would fail.
        let mut m = BandedMatrix::new(3, 1, 1);
        m.set(0, 0, 0.0);
        m.set(0, 1, 2.0);
        m.set(1, 0, 1.0);
        m.set(1, 1, 1.0);
        m.set(1, 2, 1.0);
        m.set(2, 1, 3.0);
        m.set(2, 2, -1.0);
        let lu = m.factor().unwrap();
        // A = [[0,2,0],[1,1,1],[0,3,-1]], solve A x = [2, 3, 2] -> x = [1,1,1]
        let mut b = vec![2.0, 3.0, 2.0];
        lu.solve(&mut b);
        for (i, &v) in b.iter().enumerate() {
            assert!((v - 1.0).abs() < 1e-14, "x[{i}] = {v}");
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut m = BandedMatrix::new(2, 1, 1);
        m.set(0, 0, 1.0);
        m.set(0, 1, 2.0);
        m.set(1, 0, 0.5);
        m.set(1, 1, 1.0);
        assert!(m.factor().is_err());
    }
}

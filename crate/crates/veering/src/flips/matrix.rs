use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Square matrix of arbitrary-precision integers in the label basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipMatrix {
    entries: Vec<Vec<BigInt>>,
}

impl FlipMatrix {
    pub fn identity(n: usize) -> FlipMatrix {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        FlipMatrix { entries }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> FlipMatrix {
        FlipMatrix { entries: rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect() }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    /// Right-multiplies by `I + sign * E_{e,p}`: column `p` gains `sign` times column `e`.
    pub(crate) fn add_column(&mut self, p: usize, e: usize, negate: bool) {
        for row in self.entries.iter_mut() {
            let v = row[e].clone();
            if negate {
                row[p] -= v;
            } else {
                row[p] += v;
            }
        }
    }

    pub fn mul(&self, other: &FlipMatrix) -> FlipMatrix {
        let n = self.size();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &self.entries[i][k] * &other.entries[k][j]).sum())
                    .collect()
            })
            .collect();
        FlipMatrix { entries }
    }

    pub fn transpose(&self) -> FlipMatrix {
        let n = self.size();
        FlipMatrix { entries: (0..n).map(|i| (0..n).map(|j| self.entries[j][i].clone()).collect()).collect() }
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.size();
        let mut m = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        if n == 0 {
            return BigInt::one();
        }
        sign * &m[n - 1][n - 1]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().flatten().all(|x| !x.is_negative())
    }

    /// Column sums, i.e. the l1 norms of the images of the basis vectors.
    pub fn column_norms(&self) -> Vec<BigInt> {
        let n = self.size();
        (0..n).map(|j| self.entries.iter().map(|r| r[j].abs()).sum()).collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect())
            .collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.to_f64().iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.entries.iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect()
    }
}

impl fmt::Display for FlipMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(","))?;
        }
        write!(f, "]")
    }
}

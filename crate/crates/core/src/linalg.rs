//! Exact linear algebra over the rationals and the integers.
//!
//! Rational matrices are plain `Vec<Vec<BigRational>>` in row-major order.
//! Integer lattices are given by generating rows and brought to Hermite
//! normal form; lattice membership, index and exponent all go through it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QMatrix = Vec<Vec<BigRational>>;
pub type ZMatrix = Vec<Vec<BigInt>>;

pub fn q_identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

pub fn q_from_int(m: &ZMatrix) -> QMatrix {
    m.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

pub fn q_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(BigRational::zero(), |acc, k| {
                        if row[k].is_zero() {
                            acc
                        } else {
                            acc + &row[k] * &b[k][j]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn q_vec_mul(v: &[BigRational], m: &QMatrix) -> Vec<BigRational> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| {
            v.iter()
                .zip(m)
                .fold(BigRational::zero(), |acc, (x, row)| acc + x * &row[j])
        })
        .collect()
}

pub fn q_transpose(m: &QMatrix) -> QMatrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Determinant by Gaussian elimination.
pub fn q_det(m: &QMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &p;
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
        }
    }
    det
}

/// Inverse, or `None` when singular.
pub fn q_inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut a: QMatrix = m
        .iter()
        .zip(q_identity(n))
        .map(|(r, e)| r.iter().cloned().chain(e).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv, col);
        let p = a[col][col].recip();
        for c in 0..2 * n {
            a[col][c] = &a[col][c] * &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..2 * n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solve the row system `x * m = target` for square nonsingular `m`.
pub fn q_solve_row(m: &QMatrix, target: &[BigRational]) -> Option<Vec<BigRational>> {
    let inv = q_inverse(m)?;
    Some(q_vec_mul(target, &inv))
}

/// Rank of a rational matrix.
pub fn q_rank(m: &QMatrix) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        for r in rank + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[rank][col];
            for c in col..cols {
                let v = &f * &a[rank][c];
                a[r][c] -= v;
            }
        }
        rank += 1;
    }
    rank
}

/// Find rational coefficients `c` with `sum c_i * rows[i] = target`, if any.
pub fn q_express(rows: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let k = rows.len();
    let n = target.len();
    // Eliminate on the transposed system [rows^T | target].
    let mut a: QMatrix = (0..n)
        .map(|j| {
            rows.iter()
                .map(|r| r[j].clone())
                .chain(std::iter::once(target[j].clone()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(piv) = (row..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(piv, row);
        let p = a[row][col].recip();
        for c in col..=k {
            a[row][c] = &a[row][c] * &p;
        }
        for r in 0..n {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..=k {
                let v = &f * &a[row][c];
                a[r][c] -= v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if a[row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = a[i][k].clone();
    }
    Some(x)
}

/// Row-style Hermite normal form of an integer lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hnf {
    /// Nonzero rows in echelon form, pivots positive, entries above each
    /// pivot reduced into `[0, pivot)`.
    pub rows: ZMatrix,
    /// Pivot column of each row.
    pub pivots: Vec<usize>,
    /// Unimodular transform with `transform * input = [rows; 0]`.
    pub transform: ZMatrix,
}

impl Hnf {
    /// Computes the HNF of the lattice spanned by `gens` (each of length `n`).
    pub fn of(gens: &ZMatrix, n: usize) -> Hnf {
        let m = gens.len();
        let mut a = gens.clone();
        let mut u: ZMatrix = (0..m)
            .map(|i| (0..m).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row >= m {
                break;
            }
            // Euclid down the column until a single nonzero entry remains at `row`.
            loop {
                let best = (row..m)
                    .filter(|&r| !a[r][col].is_zero())
                    .min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
                let Some(best) = best else { break };
                a.swap(row, best);
                u.swap(row, best);
                let mut done = true;
                for r in row + 1..m {
                    if a[r][col].is_zero() {
                        continue;
                    }
                    let q = a[r][col].div_floor(&a[row][col]);
                    sub_row(&mut a, r, row, &q);
                    sub_row(&mut u, r, row, &q);
                    if !a[r][col].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if a[row][col].is_zero() {
                continue;
            }
            if a[row][col].is_negative() {
                negate_row(&mut a, row);
                negate_row(&mut u, row);
            }
            for r in 0..row {
                let q = a[r][col].div_floor(&a[row][col]);
                if !q.is_zero() {
                    sub_row(&mut a, r, row, &q);
                    sub_row(&mut u, r, row, &q);
                }
            }
            pivots.push(col);
            row += 1;
        }
        a.truncate(row);
        Hnf {
            rows: a,
            pivots,
            transform: u,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Coefficients `c` with `c * rows = v`, or `None` if `v` is not in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rest = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rows.len());
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let (q, r) = rest[col].div_rem(&row[col]);
            if !r.is_zero() {
                return None;
            }
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &q * y;
            }
            coeffs.push(q);
        }
        rest.iter().all(Zero::is_zero).then_some(coeffs)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Coefficients over the original generators: `x * gens = v`.
    pub fn express(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.coordinates(v)?;
        let m = self.transform.len();
        Some(
            (0..m)
                .map(|j| {
                    c.iter()
                        .zip(&self.transform)
                        .fold(BigInt::zero(), |acc, (ci, urow)| acc + ci * &urow[j])
                })
                .collect(),
        )
    }

    /// Index `[Z^n : L]` for a full-rank lattice.
    pub fn index(&self, n: usize) -> Option<BigInt> {
        (self.rank() == n).then(|| {
            self.rows
                .iter()
                .zip(&self.pivots)
                .fold(BigInt::one(), |acc, (r, &c)| acc * &r[c])
        })
    }

    /// Smallest `k > 0` with `k * v` in the lattice (full-rank lattices only).
    pub fn order_of(&self, v: &[BigInt]) -> Option<BigInt> {
        let n = v.len();
        if self.rank() != n {
            return None;
        }
        let h = q_from_int(&self.rows);
        let target: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let x = q_solve_row(&h, &target)?;
        Some(x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom())))
    }

    /// Smallest `N > 0` with `N * Z^n` contained in the lattice.
    pub fn exponent(&self, n: usize) -> Option<BigInt> {
        if self.rank() != n {
            return None;
        }
        let inv = q_inverse(&q_from_int(&self.rows))?;
        Some(
            inv.iter()
                .flatten()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom())),
        )
    }
}

fn sub_row(a: &mut ZMatrix, target: usize, src: usize, q: &BigInt) {
    let (t, s) = if target < src {
        let (lo, hi) = a.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

fn negate_row(a: &mut ZMatrix, r: usize) {
    for x in a[r].iter_mut() {
        *x = -std::mem::take(x);
    }
}

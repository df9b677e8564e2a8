//! Square matrices over a number field, words in named generators, the
//! `SL(2)` Bruhat factorization and the unitary group of the anti-diagonal
//! hermitian form.

mod bruhat;
mod su21;
mod word;

pub use bruhat::{bruhat_decompose, BruhatFactors, WeylConvention};
pub use su21::{sl2_to_su21, su21_check, su21_uplus_generators, Conjugation, HermitianData, Su21Setting};
pub use word::{word_eval, Alphabet, Word};

use std::fmt;

use thiserror::Error;

use crate::numberfield::{same_field, FieldElement, FieldError, FieldRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("matrix sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("matrices live over different fields")]
    ParentMismatch,
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("determinant is {0}, expected 1")]
    NotSpecialLinear(String),
    #[error("operation needs a {expected}x{expected} matrix, got {got}x{got}")]
    WrongSize { expected: usize, got: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed parameters: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An `n x n` matrix with entries in one number field, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatN {
    size: usize,
    entries: Vec<FieldElement>,
    field: FieldRef,
}

impl MatN {
    pub fn identity(field: &FieldRef, n: usize) -> Self {
        let mut entries = vec![FieldElement::zero(field); n * n];
        for i in 0..n {
            entries[i * n + i] = FieldElement::one(field);
        }
        MatN {
            size: n,
            entries,
            field: field.clone(),
        }
    }

    pub fn zero(field: &FieldRef, n: usize) -> Self {
        MatN {
            size: n,
            entries: vec![FieldElement::zero(field); n * n],
            field: field.clone(),
        }
    }

    pub fn from_entries(field: &FieldRef, n: usize, entries: Vec<FieldElement>) -> Result<Self, GroupError> {
        if entries.len() != n * n {
            return Err(GroupError::EntryCount {
                expected: n * n,
                got: entries.len(),
            });
        }
        if entries.iter().any(|e| !same_field(e.field(), field)) {
            return Err(GroupError::ParentMismatch);
        }
        Ok(MatN {
            size: n,
            entries,
            field: field.clone(),
        })
    }

    pub fn from_rows(field: &FieldRef, rows: Vec<Vec<FieldElement>>) -> Result<Self, GroupError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(GroupError::Malformed("rows of unequal length".into()));
        }
        Self::from_entries(field, n, rows.into_iter().flatten().collect())
    }

    pub fn from_ints(field: &FieldRef, rows: &[&[i64]]) -> Result<Self, GroupError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| FieldElement::from_int(field, x)).collect())
            .collect();
        Self::from_rows(field, rows)
    }

    pub fn diag(field: &FieldRef, d: &[FieldElement]) -> Self {
        let n = d.len();
        let mut m = Self::zero(field, n);
        for (i, x) in d.iter().enumerate() {
            m.entries[i * n + i] = x.clone();
        }
        m
    }

    /// `I + x e_ij`.
    pub fn elementary(field: &FieldRef, n: usize, i: usize, j: usize, x: &FieldElement) -> Self {
        let mut m = Self::identity(field, n);
        m.entries[i * n + j] = &m.entries[i * n + j] + x;
        m
    }

    /// Upper unipotent `[[1, x], [0, 1]]`.
    pub fn e12(x: &FieldElement) -> Self {
        Self::elementary(x.field(), 2, 0, 1, x)
    }

    /// Lower unipotent `[[1, 0], [x, 1]]`.
    pub fn e21(x: &FieldElement) -> Self {
        Self::elementary(x.field(), 2, 1, 0, x)
    }

    /// `diag(u, u^-1)`.
    pub fn torus2(u: &FieldElement) -> Result<Self, GroupError> {
        Ok(Self::diag(u.field(), &[u.clone(), u.inv()?]))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        assert!(same_field(x.field(), &self.field), "entry from another field");
        self.entries[i * self.size + j] = x;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<FieldElement>> {
        self.entries.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        let n = self.size;
        (0..n).all(|i| (0..n).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(FieldElement::is_integral)
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        let n = self.size;
        (0..n).all(|i| {
            self.get(i, i).is_one() && (0..i).all(|j| self.get(i, j).is_zero())
        })
    }

    pub fn try_mul(&self, rhs: &MatN) -> Result<MatN, GroupError> {
        if self.size != rhs.size {
            return Err(GroupError::SizeMismatch(self.size, rhs.size));
        }
        if !same_field(&self.field, &rhs.field) {
            return Err(GroupError::ParentMismatch);
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &MatN) -> MatN {
        let n = self.size;
        let mut out = Self::zero(&self.field, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * n + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn det(&self) -> FieldElement {
        let n = self.size;
        let e = |i: usize, j: usize| self.get(i, j);
        match n {
            0 => FieldElement::one(&self.field),
            1 => e(0, 0).clone(),
            2 => &(e(0, 0) * e(1, 1)) - &(e(0, 1) * e(1, 0)),
            3 => {
                let m0 = &(e(1, 1) * e(2, 2)) - &(e(1, 2) * e(2, 1));
                let m1 = &(e(1, 0) * e(2, 2)) - &(e(1, 2) * e(2, 0));
                let m2 = &(e(1, 0) * e(2, 1)) - &(e(1, 1) * e(2, 0));
                &(&(e(0, 0) * &m0) - &(e(0, 1) * &m1)) + &(e(0, 2) * &m2)
            }
            _ => {
                let mut a = self.rows();
                let mut det = FieldElement::one(&self.field);
                for c in 0..n {
                    let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                        return FieldElement::zero(&self.field);
                    };
                    if p != c {
                        a.swap(p, c);
                        det = -det;
                    }
                    det = &det * &a[c][c];
                    let inv = a[c][c].inv().expect("nonzero pivot");
                    for r in c + 1..n {
                        if a[r][c].is_zero() {
                            continue;
                        }
                        let f = &a[r][c] * &inv;
                        for k in c..n {
                            let t = &f * &a[c][k];
                            a[r][k] = &a[r][k] - &t;
                        }
                    }
                }
                det
            }
        }
    }

    pub fn inverse(&self) -> Result<MatN, GroupError> {
        let n = self.size;
        if n == 2 {
            let d = self.det();
            if d.is_zero() {
                return Err(GroupError::Singular);
            }
            let di = d.inv()?;
            let e = |i, j| self.get(i, j);
            let entries = vec![e(1, 1) * &di, -(e(0, 1) * &di), -(e(1, 0) * &di), e(0, 0) * &di];
            return Self::from_entries(&self.field, 2, entries);
        }
        // Gauss-Jordan on [A | I]
        let mut a = self.rows();
        let mut inv = Self::identity(&self.field, n).rows();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(GroupError::Singular)?;
            a.swap(p, c);
            inv.swap(p, c);
            let pi = a[c][c].inv()?;
            for k in 0..n {
                a[c][k] = &a[c][k] * &pi;
                inv[c][k] = &inv[c][k] * &pi;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for k in 0..n {
                    let t = &f * &a[c][k];
                    a[r][k] = &a[r][k] - &t;
                    let t = &f * &inv[c][k];
                    inv[r][k] = &inv[r][k] - &t;
                }
            }
        }
        Self::from_rows(&self.field, inv)
    }

    pub fn pow(&self, e: i64) -> Result<MatN, GroupError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::identity(&self.field, self.size);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_unchecked(&sq);
            }
        }
        Ok(acc)
    }

    /// `g self g^-1`.
    pub fn conjugate_by(&self, g: &MatN) -> Result<MatN, GroupError> {
        g.try_mul(self)?.try_mul(&g.inverse()?)
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(a: &MatN, b: &MatN) -> Result<MatN, GroupError> {
        a.try_mul(b)?.try_mul(&a.inverse()?)?.try_mul(&b.inverse()?)
    }

    pub fn transpose(&self) -> MatN {
        let n = self.size;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn neg(&self) -> MatN {
        self.map(|x| -x)
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> MatN {
        MatN {
            size: self.size,
            entries: self.entries.iter().map(f).collect(),
            field: self.field.clone(),
        }
    }

    /// Applies `f` entrywise where the results may live in another field.
    pub fn map_into(&self, target: &FieldRef, f: impl Fn(&FieldElement) -> FieldElement) -> Result<MatN, GroupError> {
        Self::from_entries(target, self.size, self.entries.iter().map(f).collect())
    }

    /// Errors unless `det = 1`.
    pub fn require_special(&self) -> Result<(), GroupError> {
        let d = self.det();
        if d.is_one() {
            Ok(())
        } else {
            Err(GroupError::NotSpecialLinear(d.to_string()))
        }
    }

    /// Entries as integral-basis coordinate strings, nested by row.
    pub fn to_coord_strings(&self) -> Vec<Vec<Vec<String>>> {
        self.rows()
            .iter()
            .map(|r| r.iter().map(FieldElement::to_coord_strings).collect())
            .collect()
    }
}

impl std::hash::Hash for MatN {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.size.hash(state);
        self.entries.hash(state);
    }
}

impl std::ops::Mul for &MatN {
    type Output = MatN;
    fn mul(self, rhs: &MatN) -> MatN {
        self.try_mul(rhs).expect("incompatible matrices")
    }
}

impl fmt::Debug for MatN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MatN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.size).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

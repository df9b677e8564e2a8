use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::VerifyError;
use crate::matgroup::MatN;
use crate::numberfield::{same_field, FieldRef};

/// Largest ring for which addition and multiplication tables are built.
const TABLE_LIMIT: u64 = 1024;

/// `O_K / p O_K`, realized as `F_p[x]/(f mod p)`. Elements are coded as
/// `sum c_i p^i` with `0 <= c_i < p`, `c_i` the coefficient of `x^i`.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    p: u32,
    degree: usize,
    /// Monic reduction of the defining polynomial, constant term first.
    modulus: Vec<u64>,
    size: u64,
    field: FieldRef,
    /// Degrees of the irreducible factors of `f mod p` when it is squarefree.
    factor_degrees: Option<Vec<usize>>,
    tables: Option<Tables>,
}

#[derive(Clone, Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl ResidueRing {
    /// Rejects primes dividing `disc(f)` unless `allow_ramified`.
    pub fn new(field: &FieldRef, p: u32, allow_ramified: bool) -> Result<Self, VerifyError> {
        if !is_prime(p) {
            return Err(VerifyError::NotPrime(p));
        }
        let degree = field.degree();
        let size = u64::from(p)
            .checked_pow(degree as u32)
            .filter(|&q| q <= u64::from(u32::MAX))
            .ok_or(VerifyError::RingTooLarge)?;
        let disc = field.poly_discriminant();
        if !allow_ramified && (&disc % BigInt::from(p)).is_zero() {
            return Err(VerifyError::RamifiedPrime(p));
        }
        let pb = BigInt::from(p);
        let modulus: Vec<u64> = field
            .defining_poly()
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().expect("reduced"))
            .collect();
        let factor_degrees = factor_degrees(&modulus, u64::from(p));
        let mut ring = ResidueRing {
            p,
            degree,
            modulus,
            size,
            field: field.clone(),
            factor_degrees,
            tables: None,
        };
        if size <= TABLE_LIMIT {
            let q = size as u32;
            let mut add = Vec::with_capacity((size * size) as usize);
            let mut mul = Vec::with_capacity((size * size) as usize);
            for a in 0..q {
                for b in 0..q {
                    add.push(ring.add_slow(a, b));
                    mul.push(ring.mul_slow(a, b));
                }
            }
            ring.tables = Some(Tables { add, mul });
        }
        Ok(ring)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of elements, `p^degree`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// `Some(degrees)` when the ring is a product of fields `F_{p^d}`.
    pub fn factor_degrees(&self) -> Option<&[usize]> {
        self.factor_degrees.as_deref()
    }

    pub fn is_field(&self) -> bool {
        self.factor_degrees.as_ref().is_some_and(|d| d.len() == 1)
    }

    /// Bytes per element in the canonical encoding.
    pub fn limb_width(&self) -> usize {
        match self.size - 1 {
            0..=0xff => 1,
            0x100..=0xffff => 2,
            _ => 4,
        }
    }

    pub fn decode(&self, mut a: u32) -> Vec<u64> {
        let p = self.p;
        (0..self.degree)
            .map(|_| {
                let c = a % p;
                a /= p;
                u64::from(c)
            })
            .collect()
    }

    pub fn encode(&self, coeffs: &[u64]) -> u32 {
        let p = u64::from(self.p);
        coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c % p) as u32
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let p = u64::from(self.p);
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % p).collect();
        self.encode(&s)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = u64::from(self.p);
        let d = self.degree;
        let (x, y) = (self.decode(a), self.decode(b));
        let mut prod = vec![0u64; 2 * d];
        for (i, u) in x.iter().enumerate() {
            if *u == 0 {
                continue;
            }
            for (j, v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u * v) % p;
            }
        }
        for k in (d..2 * d).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                prod[k - d + i] = (prod[k - d + i] + (p - c) * self.modulus[i]) % p;
            }
        }
        prod.truncate(d);
        self.encode(&prod)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[(a as u64 * self.size + b as u64) as usize],
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[(a as u64 * self.size + b as u64) as usize],
            None => self.mul_slow(a, b),
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = u64::from(self.p);
        let x: Vec<u64> = self.decode(a).iter().map(|c| (p - c) % p).collect();
        self.encode(&x)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Reduces an integral field element.
    pub fn reduce(&self, x: &crate::numberfield::FieldElement) -> Result<u32, VerifyError> {
        if !same_field(x.field(), &self.field) {
            return Err(VerifyError::FieldMismatch);
        }
        if !x.is_integral() {
            return Err(VerifyError::NotIntegral);
        }
        let pb = BigInt::from(self.p);
        let coords = x.coords();
        let mut out = Vec::with_capacity(self.degree);
        for c in &coords {
            let den = c.denom().mod_floor(&pb);
            if den.is_zero() {
                return Err(VerifyError::DenominatorDivisible(self.p));
            }
            let inv = den.modpow(&(&pb - 2), &pb);
            let v = (c.numer().mod_floor(&pb) * inv).mod_floor(&pb);
            out.push(v.to_u64().expect("reduced"));
        }
        Ok(self.encode(&out))
    }
}

/// A square matrix over a residue ring, entries row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueMat {
    pub n: usize,
    pub entries: Vec<u32>,
}

impl ResidueMat {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        ResidueMat { n, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul(&self, rhs: &ResidueMat, ring: &ResidueRing) -> ResidueMat {
        let n = self.n;
        let mut entries = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.entries[k * n + j];
                    if b == 0 {
                        continue;
                    }
                    let idx = i * n + j;
                    entries[idx] = ring.add(entries[idx], ring.mul(a, b));
                }
            }
        }
        ResidueMat { n, entries }
    }

    fn minor(&self, row: usize, col: usize) -> ResidueMat {
        let n = self.n;
        let entries = (0..n)
            .filter(|&i| i != row)
            .flat_map(|i| (0..n).filter(move |&j| j != col).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        ResidueMat { n: n - 1, entries }
    }

    /// Laplace expansion along the first row; fine for the small sizes used here.
    pub fn det(&self, ring: &ResidueRing) -> u32 {
        match self.n {
            0 => 1,
            1 => self.entries[0],
            2 => ring.sub(ring.mul(self.get(0, 0), self.get(1, 1)), ring.mul(self.get(0, 1), self.get(1, 0))),
            n => (0..n).fold(0, |acc, j| {
                let a = self.get(0, j);
                if a == 0 {
                    return acc;
                }
                let t = ring.mul(a, self.minor(0, j).det(ring));
                if j % 2 == 0 {
                    ring.add(acc, t)
                } else {
                    ring.sub(acc, t)
                }
            }),
        }
    }

    /// Inverse of a determinant-one matrix: its adjugate.
    pub fn inverse_special(&self, ring: &ResidueRing) -> Result<ResidueMat, VerifyError> {
        if self.det(ring) != ring.one() {
            return Err(VerifyError::NotSpecial);
        }
        let n = self.n;
        if n == 1 {
            return Ok(self.clone());
        }
        let mut entries = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det(ring);
                // adj[j][i] = (-1)^(i+j) M_ij
                entries[j * n + i] = if (i + j) % 2 == 0 { c } else { ring.neg(c) };
            }
        }
        Ok(ResidueMat { n, entries })
    }

    /// Fixed-width little-endian limbs, row-major.
    pub fn encode(&self, width: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.entries.len() * width);
        for &e in &self.entries {
            out.extend_from_slice(&e.to_le_bytes()[..width]);
        }
        out
    }

    pub fn decode(bytes: &[u8], n: usize, width: usize) -> ResidueMat {
        let entries = bytes
            .chunks(width)
            .map(|c| {
                let mut b = [0u8; 4];
                b[..width].copy_from_slice(c);
                u32::from_le_bytes(b)
            })
            .collect();
        ResidueMat { n, entries }
    }
}

pub fn reduce_mod(g: &MatN, ring: &ResidueRing) -> Result<ResidueMat, VerifyError> {
    let entries = g.entries().iter().map(|x| ring.reduce(x)).collect::<Result<_, _>>()?;
    Ok(ResidueMat { n: g.size(), entries })
}

// --- polynomials over F_p, constant term first, no trailing zeros ---

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, p as i128, a as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    t.rem_euclid(p as i128) as u64
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let li = inv_mod(m[dm], p);
    while a.len() > dm {
        let k = a.len() - 1 - dm;
        let c = a[a.len() - 1] * li % p;
        for (i, mi) in m.iter().enumerate() {
            a[k + i] = (a[k + i] + (p - c) * mi) % p;
        }
        a = trim(a);
    }
    a
}

fn poly_divexact(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let dm = m.len() - 1;
    let li = inv_mod(m[dm], p);
    let mut q = vec![0u64; a.len().saturating_sub(dm)];
    while trim(a.clone()).len() > dm {
        a = trim(a);
        let k = a.len() - 1 - dm;
        let c = a[a.len() - 1] * li % p;
        q[k] = c;
        for (i, mi) in m.iter().enumerate() {
            a[k + i] = (a[k + i] + (p - c) * mi) % p;
        }
    }
    trim(q)
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let li = inv_mod(l, p);
        a.iter_mut().for_each(|c| *c = *c * li % p);
    }
    a
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

/// Distinct-degree factorization; `None` when `f mod p` is not squarefree.
fn factor_degrees(f: &[u64], p: u64) -> Option<Vec<usize>> {
    let f = trim(f.to_vec());
    let deriv: Vec<u64> = f.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % p) * c % p).collect();
    if poly_gcd(&f, &deriv, p).len() != 1 {
        return None;
    }
    let mut out = Vec::new();
    let mut rest = f;
    let x = vec![0, 1];
    let mut h = poly_rem(&x, &rest, p);
    let mut k = 1;
    while rest.len() > 1 {
        if rest.len() - 1 < 2 * k {
            out.push(rest.len() - 1);
            break;
        }
        // h = x^(p^k) mod rest
        let mut e = p;
        let mut base = h.clone();
        let mut acc = vec![1u64];
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, &rest, p);
            }
            base = poly_mulmod(&base, &base, &rest, p);
            e >>= 1;
        }
        h = acc;
        let g = poly_gcd(&rest, &poly_sub(&h, &x, p), p);
        let dg = g.len() - 1;
        if dg > 0 {
            out.extend(std::iter::repeat(k).take(dg / k));
            rest = poly_divexact(&rest, &g, p);
            h = poly_rem(&h, &rest, p);
        }
        k += 1;
    }
    out.sort_unstable();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{FieldElement, NumberField};

    #[test]
    fn factor_patterns() {
        let q2 = NumberField::from_coefficients(&[-2, 0, 1]).unwrap();
        assert_eq!(ResidueRing::new(&q2, 3, false).unwrap().factor_degrees(), Some(&[2][..]));
        assert_eq!(ResidueRing::new(&q2, 7, false).unwrap().factor_degrees(), Some(&[1, 1][..]));
        assert!(matches!(ResidueRing::new(&q2, 2, false), Err(VerifyError::RamifiedPrime(2))));
        let z8 = NumberField::from_coefficients(&[1, 0, 0, 0, 1]).unwrap();
        assert_eq!(ResidueRing::new(&z8, 3, false).unwrap().factor_degrees(), Some(&[2, 2][..]));
        assert_eq!(ResidueRing::new(&z8, 17, false).unwrap().factor_degrees(), Some(&[1, 1, 1, 1][..]));
        let cubic = NumberField::from_coefficients(&[-2, 0, 0, 1]).unwrap();
        // 2 is a cube mod 5 (3^3 = 27 = 2) and x^2 + 3x + 4 is irreducible there
        assert_eq!(ResidueRing::new(&cubic, 5, false).unwrap().factor_degrees(), Some(&[1, 2][..]));
    }

    #[test]
    fn reduction_respects_products() {
        let q2 = NumberField::from_coefficients(&[-2, 0, 1]).unwrap();
        let ring = ResidueRing::new(&q2, 7, false).unwrap();
        let s = FieldElement::generator(&q2);
        let a = &FieldElement::from_int(&q2, 3) + &s;
        let b = &FieldElement::from_int(&q2, -5) + &(&s * &FieldElement::from_int(&q2, 4));
        let lhs = ring.reduce(&(&a * &b)).unwrap();
        assert_eq!(lhs, ring.mul(ring.reduce(&a).unwrap(), ring.reduce(&b).unwrap()));
        assert_eq!(ring.reduce(&s).unwrap(), ring.encode(&[0, 1]));
        assert_eq!(ring.mul_slow(17, 33), ring.mul(17, 33));
    }

    #[test]
    fn encoding_round_trip() {
        let m = ResidueMat {
            n: 2,
            entries: vec![1, 300, 0, 65535],
        };
        let b = m.encode(2);
        assert_eq!(b, vec![1, 0, 44, 1, 0, 0, 255, 255]);
        assert_eq!(ResidueMat::decode(&b, 2, 2), m);
    }
}

//! Number fields `K = Q[x]/(f)` and exact element arithmetic.
//!
//! Elements are stored in the power basis `1, a, ..., a^(n-1)` (where `a` is
//! the class of `x`) as an integer numerator vector over a common positive
//! denominator. The integral basis is only consulted at the edges: integrality
//! tests, index computations and serialization.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, QMatrix};
use crate::poly::{sign, QPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("defining polynomial must be monic of degree at least 1")]
    NotMonic,
    #[error("defining polynomial is reducible (factor {0})")]
    Reducible(String),
    #[error("integral basis must be a {0}x{0} matrix")]
    BasisShape(usize),
    #[error("integral basis matrix is singular")]
    SingularBasis,
    #[error("first integral basis element must be 1")]
    BasisFirstNotOne,
    #[error("integral basis element {0} is not an algebraic integer")]
    NonIntegralBasisElement(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    ParentMismatch,
    #[error("coordinate vector has length {got}, expected {expected}")]
    CoordLength { expected: usize, got: usize },
    #[error("element is not integral")]
    NotIntegral,
    #[error("field is not totally real")]
    NotTotallyReal,
    #[error("zero has no sign")]
    ZeroElement,
    #[error("degree mismatch: field of degree {field} cannot be a quadratic extension of a field of degree {subfield}")]
    DegreeMismatch { field: usize, subfield: usize },
    #[error("cannot parse rational number {0:?}")]
    Parse(String),
    #[error("sign could not be resolved within the refinement budget")]
    Undecided,
    #[error("field is not a CM extension of the given totally real subfield")]
    NotCm,
    #[error("element does not lie in the subfield")]
    NotInSubfield,
}

/// How irreducibility of the defining polynomial was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    /// Exhaustive factor search (degree at most 4).
    Verified,
    /// Degree above 4: accepted without proof.
    Trusted,
}

pub type FieldRef = Arc<NumberField>;

#[derive(Debug)]
pub struct NumberField {
    poly: Vec<BigInt>,
    qpoly: QPoly,
    degree: usize,
    basis: QMatrix,
    basis_inv: QMatrix,
    signature: (usize, usize),
    discriminant: BigInt,
    irreducibility: Irreducibility,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly && self.basis == other.basis
    }
}

impl Eq for NumberField {}

impl NumberField {
    /// Builds `Q[x]/(f)` from the coefficients of `f` (constant term first).
    /// Without an explicit integral basis the power basis is used.
    pub fn new(poly: Vec<BigInt>, integral_basis: Option<QMatrix>) -> Result<FieldRef, FieldError> {
        let degree = poly.len().checked_sub(1).ok_or(FieldError::NotMonic)?;
        if degree == 0 || !poly[degree].is_one() {
            return Err(FieldError::NotMonic);
        }
        let qpoly = QPoly::from_ints(&poly);
        let irreducibility = check_irreducible(&poly)?;

        let basis = integral_basis.unwrap_or_else(|| linalg::q_identity(degree));
        if basis.len() != degree || basis.iter().any(|r| r.len() != degree) {
            return Err(FieldError::BasisShape(degree));
        }
        let basis_inv = linalg::q_inverse(&basis).ok_or(FieldError::SingularBasis)?;
        if basis[0] != linalg::q_identity(degree)[0] {
            return Err(FieldError::BasisFirstNotOne);
        }

        let r1 = qpoly.count_real_roots();
        let signature = (r1, (degree - r1) / 2);

        let mut field = NumberField {
            poly,
            qpoly,
            degree,
            basis,
            basis_inv,
            signature,
            discriminant: BigInt::zero(),
            irreducibility,
        };
        let basis_elems: Vec<FieldElement> = {
            // Temporary handle for element arithmetic during construction.
            let tmp = Arc::new(NumberField {
                poly: field.poly.clone(),
                qpoly: field.qpoly.clone(),
                degree,
                basis: field.basis.clone(),
                basis_inv: field.basis_inv.clone(),
                signature,
                discriminant: BigInt::zero(),
                irreducibility,
            });
            field
                .basis
                .iter()
                .map(|row| FieldElement::from_coords(&tmp, row.clone()))
                .collect::<Result<_, _>>()?
        };
        for (i, w) in basis_elems.iter().enumerate() {
            if !w.minimal_polynomial().is_integral() {
                return Err(FieldError::NonIntegralBasisElement(i));
            }
        }
        let trace_form: QMatrix = basis_elems
            .iter()
            .map(|a| basis_elems.iter().map(|b| (a * b).trace()).collect())
            .collect();
        field.discriminant = linalg::q_det(&trace_form).to_integer();
        Ok(Arc::new(field))
    }

    /// Convenience constructor from machine integers.
    pub fn from_coefficients(coeffs: &[i64]) -> Result<FieldRef, FieldError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), None)
    }

    /// The rationals, presented as `Q[x]/(x)`.
    pub fn rationals() -> FieldRef {
        Self::from_coefficients(&[0, 1]).expect("x is irreducible")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Defining polynomial, constant term first.
    pub fn defining_poly(&self) -> &[BigInt] {
        &self.poly
    }

    pub fn defining_qpoly(&self) -> &QPoly {
        &self.qpoly
    }

    /// Rows express the integral basis in the power basis.
    pub fn integral_basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    /// Discriminant of the order spanned by the integral basis.
    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    /// Discriminant of the defining polynomial (the order `Z[a]`).
    pub fn poly_discriminant(&self) -> BigInt {
        let det = linalg::q_det(&self.basis);
        (BigRational::from_integer(self.discriminant.clone()) / (&det * &det)).to_integer()
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    pub fn is_totally_real(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn is_totally_imaginary(&self) -> bool {
        self.signature.0 == 0
    }

    /// Dirichlet rank `r1 + r2 - 1` of the unit group.
    pub fn unit_rank(&self) -> usize {
        self.signature.0 + self.signature.1 - 1
    }

    /// Root-of-unity orders that can occur in a field of this degree are
    /// bounded by the largest `m` with `phi(m) <= degree`.
    pub fn torsion_order_bound(&self) -> u64 {
        let n = self.degree as u64;
        (1..=2 * n * n + 2).filter(|&m| euler_phi(m) <= n).max().unwrap_or(2)
    }

    /// Does `image` (an element of another field) satisfy this field's
    /// defining polynomial, so that `a -> image` defines an embedding?
    pub fn is_embedding(&self, image: &FieldElement) -> bool {
        let mut acc = FieldElement::zero(image.field());
        for c in self.poly.iter().rev() {
            acc = &(&acc * image) + &FieldElement::from_int(image.field(), c.clone());
        }
        acc.is_zero()
    }
}

fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let other = &n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}

/// Exhaustive search for monic integer factors of degree 1 and 2 (enough up
/// to degree 4 by Gauss's lemma). Above degree 4 the polynomial is trusted.
fn check_irreducible(poly: &[BigInt]) -> Result<Irreducibility, FieldError> {
    let n = poly.len() - 1;
    if n == 1 {
        return Ok(Irreducibility::Verified);
    }
    if n > 4 {
        return Ok(Irreducibility::Trusted);
    }
    let f = QPoly::from_ints(poly);
    if poly[0].is_zero() {
        return Err(FieldError::Reducible("x".into()));
    }
    for d in divisors(&poly[0]) {
        for cand in [d.clone(), -d] {
            if f.eval(&BigRational::from_integer(cand.clone())).is_zero() {
                return Err(FieldError::Reducible(
                    QPoly::from_ints(&[-cand, BigInt::one()]).to_string(),
                ));
            }
        }
    }
    if n == 4 {
        let bound = f.root_bound().ceil().to_integer();
        let a_max: BigInt = &bound * 2;
        for b in divisors(&poly[0]) {
            for b in [b.clone(), -b] {
                let mut a = -a_max.clone();
                while a <= a_max {
                    let q = QPoly::from_ints(&[b.clone(), a.clone(), BigInt::one()]);
                    if f.rem(&q).is_zero() {
                        return Err(FieldError::Reducible(q.to_string()));
                    }
                    a += 1;
                }
            }
        }
    }
    Ok(Irreducibility::Verified)
}

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let err = || FieldError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// An element of a number field.
#[derive(Clone)]
pub struct FieldElement {
    num: Vec<BigInt>,
    den: BigInt,
    field: FieldRef,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.num == other.num && self.den == other.den
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

pub(crate) fn same_field(a: &FieldRef, b: &FieldRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Binary operation selector for [`elem_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic.
pub fn elem_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement, FieldError> {
    if !same_field(&a.field, &b.field) {
        return Err(FieldError::ParentMismatch);
    }
    Ok(match op {
        ArithOp::Add => a.add_unchecked(b),
        ArithOp::Sub => a.sub_unchecked(b),
        ArithOp::Mul => a.mul_unchecked(b),
        ArithOp::Div => a.mul_unchecked(&b.inv()?),
    })
}

impl FieldElement {
    fn normalized(field: &FieldRef, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for x in num.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        let g = num.iter().fold(den.clone(), |g, x| g.gcd(x));
        if !g.is_one() && !g.is_zero() {
            for x in num.iter_mut() {
                *x = &*x / &g;
            }
            den = &den / &g;
        }
        if num.iter().all(Zero::is_zero) {
            den = BigInt::one();
        }
        FieldElement {
            num,
            den,
            field: field.clone(),
        }
    }

    pub fn zero(field: &FieldRef) -> Self {
        FieldElement {
            num: vec![BigInt::zero(); field.degree],
            den: BigInt::one(),
            field: field.clone(),
        }
    }

    pub fn one(field: &FieldRef) -> Self {
        Self::from_int(field, BigInt::one())
    }

    pub fn from_int(field: &FieldRef, n: impl Into<BigInt>) -> Self {
        let mut num = vec![BigInt::zero(); field.degree];
        num[0] = n.into();
        FieldElement {
            num,
            den: BigInt::one(),
            field: field.clone(),
        }
    }

    pub fn from_rational(field: &FieldRef, q: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); field.degree];
        num[0] = q.numer().clone();
        Self::normalized(field, num, q.denom().clone())
    }

    /// The class of `x` in `Q[x]/(f)`.
    pub fn generator(field: &FieldRef) -> Self {
        if field.degree == 1 {
            // x = -f(0) in Q[x]/(x + c)
            return Self::from_int(field, -field.poly[0].clone());
        }
        let mut num = vec![BigInt::zero(); field.degree];
        num[1] = BigInt::one();
        FieldElement {
            num,
            den: BigInt::one(),
            field: field.clone(),
        }
    }

    /// From power-basis coordinates.
    pub fn from_coords(field: &FieldRef, coords: Vec<BigRational>) -> Result<Self, FieldError> {
        if coords.len() != field.degree {
            return Err(FieldError::CoordLength {
                expected: field.degree,
                got: coords.len(),
            });
        }
        let den = coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let num = coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(Self::normalized(field, num, den))
    }

    /// From coordinates in the integral basis.
    pub fn from_basis_coords(field: &FieldRef, coords: &[BigRational]) -> Result<Self, FieldError> {
        if coords.len() != field.degree {
            return Err(FieldError::CoordLength {
                expected: field.degree,
                got: coords.len(),
            });
        }
        Self::from_coords(field, linalg::q_vec_mul(coords, &field.basis))
    }

    pub fn from_basis_ints(field: &FieldRef, coords: &[i64]) -> Result<Self, FieldError> {
        let c: Vec<BigRational> = coords.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        Self::from_basis_coords(field, &c)
    }

    /// Parses integral-basis coordinates written as `"p"` / `"p/q"` strings.
    pub fn parse_basis_coords(field: &FieldRef, coords: &[String]) -> Result<Self, FieldError> {
        let c = coords
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_basis_coords(field, &c)
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    /// Power-basis coordinates.
    pub fn coords(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|x| BigRational::new(x.clone(), self.den.clone()))
            .collect()
    }

    /// Coordinates in the integral basis.
    pub fn basis_coords(&self) -> Vec<BigRational> {
        linalg::q_vec_mul(&self.coords(), &self.field.basis_inv)
    }

    /// Integral-basis coordinates as integers, if the element is integral.
    pub fn integral_coords(&self) -> Option<Vec<BigInt>> {
        self.basis_coords()
            .into_iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Integral-basis coordinates as `"p/q"` strings.
    pub fn to_coord_strings(&self) -> Vec<String> {
        self.basis_coords().iter().map(format_rational).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.integral_coords().is_some()
    }

    /// Common denominator of the power-basis coordinates.
    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.num[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    /// The representative polynomial of degree below `n`.
    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.coords())
    }

    fn add_unchecked(&self, rhs: &Self) -> Self {
        let num = self
            .num
            .iter()
            .zip(&rhs.num)
            .map(|(a, b)| a * &rhs.den + b * &self.den)
            .collect();
        Self::normalized(&self.field, num, &self.den * &rhs.den)
    }

    fn sub_unchecked(&self, rhs: &Self) -> Self {
        let num = self
            .num
            .iter()
            .zip(&rhs.num)
            .map(|(a, b)| a * &rhs.den - b * &self.den)
            .collect();
        Self::normalized(&self.field, num, &self.den * &rhs.den)
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let n = self.field.degree;
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(&self.field);
        }
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        // Reduce modulo the monic integer polynomial f.
        let f = &self.field.poly;
        for k in (n..2 * n - 1).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for (i, fi) in f[..n].iter().enumerate() {
                if !fi.is_zero() {
                    prod[k - n + i] -= &c * fi;
                }
            }
        }
        prod.truncate(n);
        Self::normalized(&self.field, prod, &self.den * &rhs.den)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on the
    /// representative polynomial and `f`.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.field.degree == 1 {
            let q = self.as_rational().expect("degree one").recip();
            return Ok(Self::from_rational(&self.field, &q));
        }
        let (g, s, _) = self.as_poly().ext_gcd(&self.field.qpoly);
        debug_assert!(g.degree() == Some(0));
        let mut coords: Vec<BigRational> = s.coeffs().to_vec();
        coords.resize(self.field.degree, BigRational::zero());
        Self::from_coords(&self.field, coords)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        elem_arith(self, rhs, ArithOp::Div)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.field);
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

    /// Matrix of multiplication by `self` acting on row coordinate vectors
    /// in the power basis: row `j` holds the coordinates of `self * a^j`.
    pub fn mul_matrix(&self) -> QMatrix {
        let n = self.field.degree;
        let mut rows = Vec::with_capacity(n);
        let a = Self::generator(&self.field);
        let mut cur = self.clone();
        for j in 0..n {
            rows.push(cur.coords());
            if j + 1 < n {
                cur = cur.mul_unchecked(&a);
            }
        }
        rows
    }

    /// Absolute norm `N_{K/Q}`.
    pub fn norm(&self) -> BigRational {
        linalg::q_det(&self.mul_matrix())
    }

    /// Absolute trace `Tr_{K/Q}`.
    pub fn trace(&self) -> BigRational {
        let m = self.mul_matrix();
        (0..m.len()).fold(BigRational::zero(), |acc, i| acc + &m[i][i])
    }

    /// Monic minimal polynomial over Q, found as the first linear dependency
    /// among `1, a, a^2, ...`.
    pub fn minimal_polynomial(&self) -> QPoly {
        let mut powers: Vec<Vec<BigRational>> = Vec::new();
        let mut cur = Self::one(&self.field);
        loop {
            let v = cur.coords();
            if let Some(c) = linalg::q_express(&powers, &v) {
                let k = powers.len();
                let mut coeffs: Vec<BigRational> = c.into_iter().map(|x| -x).collect();
                coeffs.push(BigRational::one());
                debug_assert_eq!(coeffs.len(), k + 1);
                return QPoly::new(coeffs);
            }
            powers.push(v);
            cur = cur.mul_unchecked(self);
        }
    }

    /// Evaluates this element's representative polynomial at `image`, which
    /// may live in another field; with `image` an embedding of the generator
    /// this maps the element along the embedding.
    pub fn substitute(&self, image: &FieldElement) -> FieldElement {
        let target = image.field();
        let mut acc = FieldElement::zero(target);
        for c in self.coords().iter().rev() {
            acc = acc.mul_unchecked(image).add_unchecked(&FieldElement::from_rational(target, c));
        }
        acc
    }

    /// Is this element a root of unity?
    pub fn is_torsion(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let bound = self.field.torsion_order_bound();
        let mut cur = self.clone();
        for _ in 1..=bound {
            if cur.is_one() {
                return true;
            }
            cur = cur.mul_unchecked(self);
        }
        false
    }

    /// Sign under each real embedding, in increasing order of the real roots
    /// of the defining polynomial.
    pub fn real_signs(&self) -> Result<Vec<i8>, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let f = &self.field.qpoly;
        let p = self.as_poly();
        f.isolate_real_roots()
            .into_iter()
            .map(|(lo, hi)| sign_at_root(f, &p, lo, hi))
            .collect()
    }
}

/// Sign of `p` at the unique root of `f` in `(lo, hi]`, refining the
/// interval by bisection until interval evaluation excludes zero.
fn sign_at_root(f: &QPoly, p: &QPoly, mut lo: BigRational, mut hi: BigRational) -> Result<i8, FieldError> {
    let two = BigRational::from_integer(BigInt::from(2));
    for _ in 0..4096 {
        if f.eval(&hi).is_zero() {
            let s = sign(&p.eval(&hi));
            return if s == 0 { Err(FieldError::Undecided) } else { Ok(s) };
        }
        let (a, b) = interval_eval(p, &lo, &hi);
        if a.is_positive() {
            return Ok(1);
        }
        if b.is_negative() {
            return Ok(-1);
        }
        let mid = (&lo + &hi) / &two;
        let fm = f.sign_at(&mid);
        if fm == 0 {
            let s = sign(&p.eval(&mid));
            return if s == 0 { Err(FieldError::Undecided) } else { Ok(s) };
        }
        if fm != f.sign_at(&hi) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(FieldError::Undecided)
}

/// Range enclosure of `p` over `[lo, hi]` by interval Horner evaluation.
fn interval_eval(p: &QPoly, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for c in p.coeffs().iter().rev() {
        let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mn = prods.iter().min().unwrap().clone();
        let mx = prods.iter().max().unwrap().clone();
        a = mn + c;
        b = mx + c;
    }
    (a, b)
}

/// Is `a` positive under every real embedding of its (totally real) field?
pub fn totally_positive(a: &FieldElement) -> Result<bool, FieldError> {
    if !a.field.is_totally_real() {
        return Err(FieldError::NotTotallyReal);
    }
    Ok(a.real_signs()?.iter().all(|&s| s > 0))
}

/// Possible values of a subring index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubringIndex {
    Finite(BigInt),
    Infinite,
}

impl SubringIndex {
    pub fn is_finite(&self) -> bool {
        matches!(self, SubringIndex::Finite(_))
    }
}

impl fmt::Display for SubringIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubringIndex::Finite(n) => write!(f, "{n}"),
            SubringIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// Index `[O_K : Z[theta^r]]`, the absolute determinant of the integral-basis
/// coordinates of `1, theta^r, ..., theta^(r(n-1))`.
pub fn subring_index(theta: &FieldElement, r: u32) -> Result<SubringIndex, FieldError> {
    if !theta.is_integral() {
        return Err(FieldError::NotIntegral);
    }
    let step = theta.pow(i64::from(r))?;
    let n = theta.field.degree;
    let mut rows = Vec::with_capacity(n);
    let mut cur = FieldElement::one(&theta.field);
    for _ in 0..n {
        rows.push(cur.basis_coords());
        cur = &cur * &step;
    }
    let det = linalg::q_det(&rows);
    if det.is_zero() {
        Ok(SubringIndex::Infinite)
    } else {
        Ok(SubringIndex::Finite(det.abs().to_integer()))
    }
}

/// Dirichlet unit rank.
pub fn unit_rank(field: &NumberField) -> usize {
    field.unit_rank()
}

/// Is `field` a totally imaginary quadratic extension of the totally real
/// `subfield`, embedded by sending the subfield generator to `embedding`?
pub fn is_cm_field(field: &FieldRef, subfield: &FieldRef, embedding: &FieldElement) -> Result<bool, FieldError> {
    if field.degree != 2 * subfield.degree {
        return Err(FieldError::DegreeMismatch {
            field: field.degree,
            subfield: subfield.degree,
        });
    }
    if !same_field(embedding.field(), field) {
        return Err(FieldError::ParentMismatch);
    }
    let m = subfield.degree;
    Ok(subfield.signature == (m, 0)
        && field.signature == (0, m)
        && embedding.minimal_polynomial() == subfield.qpoly)
}

/// A CM field `E` together with its totally real subfield `F` and the image
/// in `E` of the generator of `F`.
#[derive(Clone, Debug)]
pub struct CmPair {
    pub field: FieldRef,
    pub subfield: FieldRef,
    pub embedding: FieldElement,
}

impl CmPair {
    pub fn new(field: FieldRef, subfield: FieldRef, embedding: FieldElement) -> Result<Self, FieldError> {
        if !is_cm_field(&field, &subfield, &embedding)? {
            return Err(FieldError::NotCm);
        }
        Ok(CmPair {
            field,
            subfield,
            embedding,
        })
    }

    /// Image in `E` of an element of `F`.
    pub fn embed(&self, x: &FieldElement) -> FieldElement {
        debug_assert!(same_field(x.field(), &self.subfield));
        x.substitute(&self.embedding)
    }

    fn subfield_rows(&self) -> Vec<Vec<BigRational>> {
        let mut rows = Vec::with_capacity(self.subfield.degree);
        let mut cur = FieldElement::one(&self.field);
        for _ in 0..self.subfield.degree {
            rows.push(cur.coords());
            cur = &cur * &self.embedding;
        }
        rows
    }

    /// The preimage in `F` of `y`, if `y` lies in the image of `F`.
    pub fn restrict(&self, y: &FieldElement) -> Option<FieldElement> {
        let c = linalg::q_express(&self.subfield_rows(), &y.coords())?;
        FieldElement::from_coords(&self.subfield, c).ok()
    }

    pub fn contains(&self, y: &FieldElement) -> bool {
        self.restrict(y).is_some()
    }

    /// Relative trace and norm `(t, n)` of `x` over `F`, so that
    /// `x^2 = t x - n`. Both are returned as elements of `F`.
    pub fn relative_trace_norm(&self, x: &FieldElement) -> Result<(FieldElement, FieldElement), FieldError> {
        if !same_field(x.field(), &self.field) {
            return Err(FieldError::ParentMismatch);
        }
        if self.contains(x) {
            // x in F: its relative characteristic polynomial is (X - x)^2
            let xf = self.restrict(x).expect("checked above");
            return Ok((&xf + &xf, &xf * &xf));
        }
        let base = self.subfield_rows();
        let m = base.len();
        let mut rows = Vec::with_capacity(2 * m);
        let mut cur = FieldElement::one(&self.field);
        for _ in 0..m {
            rows.push((&cur * x).coords());
            cur = &cur * &self.embedding;
        }
        for r in &base {
            rows.push(r.iter().map(|c| -c).collect());
        }
        let c = linalg::q_express(&rows, &(x * x).coords()).ok_or(FieldError::NotInSubfield)?;
        let t = FieldElement::from_coords(&self.subfield, c[..m].to_vec())?;
        let n = FieldElement::from_coords(&self.subfield, c[m..].to_vec())?;
        Ok((t, n))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.as_poly();
        if self.field.degree == 1 || p.degree().unwrap_or(0) == 0 {
            return write!(f, "{}", format_rational(&p.coeff(0)));
        }
        write!(f, "{}", p.to_string().replace('x', "a"))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                assert!(same_field(&self.field, &rhs.field), "elements belong to different fields");
                self.$inner(rhs)
            }
        }
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, add_unchecked);
binop!(Sub, sub, sub_unchecked);
binop!(Mul, mul, mul_unchecked);

impl Div for &FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: &FieldElement) -> FieldElement {
        self.checked_div(rhs).expect("field division failed")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
            field: self.field.clone(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Small integer helper used by callers that build matrices from `i64`s.
pub fn int(field: &FieldRef, n: i64) -> FieldElement {
    FieldElement::from_int(field, n)
}

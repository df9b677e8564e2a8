//! Units of `O_K` and the choice of the distinguished unit `theta`.
//!
//! `theta` must be a unit of infinite order such that `Z[theta^r]` has finite
//! index in `O_K` for every `r`. Only finitely many `r` can be checked; the
//! certificate records which ones were.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numberfield::{self, FieldElement, FieldError, FieldRef, SubringIndex};

/// Default number of powers checked by [`select_theta`].
pub const DEFAULT_R_MAX: u32 = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnitError {
    #[error("field is not real quadratic")]
    NotRealQuadratic,
    #[error("no infinite-order unit available (unit rank {0})")]
    NoInfiniteOrderUnit(usize),
    #[error("no candidate unit passes the subring-index check for r = 1..{0}")]
    NoThetaPasses(u32),
    #[error("configured element {0} is not a unit of the ring of integers")]
    NotAUnit(String),
    #[error("place data inconsistent: {0}")]
    InconsistentPlaces(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Where candidate units come from.
#[derive(Clone, Debug)]
pub enum UnitSource {
    /// Fundamental unit of a real quadratic field via continued fractions.
    Pell,
    /// Caller-supplied units, tried in order.
    Configured(Vec<FieldElement>),
    /// All integral-basis coordinate vectors with entries in `[-H, H]`,
    /// in lexicographic order, of norm `+-1`.
    Search { height_bound: u32 },
}

/// Evidence that `theta` generates finite-index subrings for `r <= r_checked`.
#[derive(Clone, Debug)]
pub struct ThetaCertificate {
    pub theta: FieldElement,
    pub r_checked: u32,
    /// `(r, [O_K : Z[theta^r]])` for `r = 1..=r_checked`.
    pub indices: Vec<(u32, BigInt)>,
    /// Whether `theta^r` has full-degree minimal polynomial, per `r`.
    pub full_degree: Vec<bool>,
}

impl ThetaCertificate {
    pub fn index_for(&self, r: u32) -> Option<&BigInt> {
        self.indices.iter().find(|(s, _)| *s == r).map(|(_, i)| i)
    }
}

/// Is `u` an integral element of norm `+-1`?
pub fn is_unit(u: &FieldElement) -> bool {
    u.is_integral() && u.norm().abs().is_one()
}

/// Smallest `(t, v)` with `v >= 1` and `t^2 - d v^2 = +-4`, from the
/// continued fraction of `sqrt(d)`. `d` must be a positive non-square.
pub fn pell_minus_plus_four(d: &BigInt) -> (BigInt, BigInt) {
    let a0 = d.sqrt();
    assert!(&a0 * &a0 != *d && d.is_positive(), "d must be a positive non-square");
    let (mut m, mut den, mut a) = (BigInt::zero(), BigInt::one(), a0.clone());
    // convergents p/q
    let (mut p_prev, mut p) = (BigInt::one(), a0.clone());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    let mut best: Option<(BigInt, BigInt)> = None;
    loop {
        let v = &p * &p - d * &q * &q;
        let cand = if v.abs() == BigInt::from(4) {
            Some((p.clone(), q.clone()))
        } else if v.abs().is_one() {
            Some((&p * 2, &q * 2))
        } else {
            None
        };
        if let Some((t, u)) = cand {
            if best.as_ref().is_none_or(|(_, bu)| &u < bu) {
                best = Some((t, u));
            }
        }
        if let Some((_, bu)) = &best {
            if &q > bu {
                break;
            }
        }
        m = &den * &a - &m;
        den = (d - &m * &m) / &den;
        a = (&a0 + &m) / &den;
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    let (mut t, mut u) = best.expect("Pell equation always has a solution");
    // The Legendre bound behind the convergent search needs d >= 20; below
    // that, look for anything smaller directly.
    if d < &BigInt::from(20) {
        let mut v = BigInt::one();
        while v < u {
            let base = d * &v * &v;
            for rhs in [&base - 4, &base + 4] {
                let rhs: BigInt = rhs;
                if !rhs.is_negative() {
                    let s = rhs.sqrt();
                    if &s * &s == rhs {
                        t = s;
                        u = v.clone();
                        break;
                    }
                }
            }
            v += 1;
        }
    }
    (t, u)
}

/// Fundamental unit `> 1` of the order spanned by the integral basis of a
/// real quadratic field.
pub fn fundamental_unit_real_quadratic(field: &FieldRef) -> Result<FieldElement, UnitError> {
    if field.degree() != 2 || field.signature() != (2, 0) {
        return Err(UnitError::NotRealQuadratic);
    }
    let f = field.defining_poly();
    let b = &f[1];
    let disc_f: BigInt = b * b - &f[0] * 4;
    let disc = field.discriminant().clone();
    let ratio = BigRational::new(disc.clone(), disc_f.clone());
    let scale = BigRational::new(ratio.numer().sqrt(), ratio.denom().sqrt());
    debug_assert_eq!(&scale * &scale, ratio);
    // sqrt(disc) = scale * (2a + b), the positive root for the larger root a.
    let a = FieldElement::generator(field);
    let root_disc_f = &(&a * &numberfield::int(field, 2)) + &FieldElement::from_int(field, b.clone());
    let root_disc = &root_disc_f * &FieldElement::from_rational(field, &scale);
    let (t, u) = pell_minus_plus_four(&disc);
    let two = numberfield::int(field, 2);
    let eps = &(&FieldElement::from_int(field, t) + &(&FieldElement::from_int(field, u) * &root_disc)) / &two;
    debug_assert!(is_unit(&eps));
    Ok(eps)
}

/// Candidate units from `source`, in source order.
pub fn candidate_units(field: &FieldRef, source: &UnitSource) -> Result<Vec<FieldElement>, UnitError> {
    match source {
        UnitSource::Pell => Ok(vec![fundamental_unit_real_quadratic(field)?]),
        UnitSource::Configured(units) => {
            for u in units {
                if !is_unit(u) {
                    return Err(UnitError::NotAUnit(u.to_string()));
                }
            }
            Ok(units.clone())
        }
        UnitSource::Search { height_bound } => Ok(search_units(field, *height_bound)),
    }
}

fn search_units(field: &FieldRef, height: u32) -> Vec<FieldElement> {
    let n = field.degree();
    let h = i64::from(height);
    let mut coords = vec![-h; n];
    let mut out = Vec::new();
    loop {
        if let Ok(e) = FieldElement::from_basis_ints(field, &coords) {
            if !e.is_zero() && e.norm().abs().is_one() && !e.is_torsion() {
                out.push(e);
            }
        }
        // odometer increment, last coordinate fastest
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if coords[i] < h {
                coords[i] += 1;
                break;
            }
            coords[i] = -h;
        }
    }
}

/// Picks the first infinite-order unit `theta` (in source order) for which
/// `theta^r` generates a full-degree subring of finite index for each
/// `r = 1..=r_max`.
pub fn select_theta(field: &FieldRef, source: &UnitSource, r_max: u32) -> Result<ThetaCertificate, UnitError> {
    let rank = field.unit_rank();
    if rank == 0 {
        return Err(UnitError::NoInfiniteOrderUnit(0));
    }
    let units: Vec<FieldElement> = candidate_units(field, source)?
        .into_iter()
        .filter(|u| !u.is_torsion())
        .collect();
    if units.is_empty() {
        return Err(UnitError::NoInfiniteOrderUnit(rank));
    }
    let n = field.degree();
    'candidates: for theta in units {
        let mut indices = Vec::with_capacity(r_max as usize);
        let mut full_degree = Vec::with_capacity(r_max as usize);
        for r in 1..=r_max {
            let power = theta.pow(i64::from(r))?;
            let full = power.minimal_polynomial().degree() == Some(n);
            match numberfield::subring_index(&theta, r)? {
                SubringIndex::Finite(idx) if full => {
                    indices.push((r, idx));
                    full_degree.push(true);
                }
                _ => continue 'candidates,
            }
        }
        return Ok(ThetaCertificate {
            theta,
            r_checked: r_max,
            indices,
            full_degree,
        });
    }
    Err(UnitError::NoThetaPasses(r_max))
}

/// Archimedean place data of `E` over `F`: for each real place `a` of `F`
/// the pair `(x(a), y(a))` of real places and complex pairs above it, and
/// for each complex place `b` of `F` the number `y(b)` of places above it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceData {
    pub real: Vec<(usize, usize)>,
    pub complex: Vec<usize>,
}

/// Evaluates both sides of the place-count identity
/// `Card(A) + Card(B) = sum_a (x(a) + y(a)) + sum_b y(b)`, which holds
/// exactly when the unit groups of `E` and `F` have equal rank.
pub fn check_eq_card(field_e: &FieldRef, subfield_f: &FieldRef, places: &PlaceData) -> Result<bool, UnitError> {
    let bad = |m: String| Err(UnitError::InconsistentPlaces(m));
    let (de, df) = (field_e.degree(), subfield_f.degree());
    if de % df != 0 {
        return bad(format!("[E:Q] = {de} is not a multiple of [F:Q] = {df}"));
    }
    let d = de / df;
    let (r1f, r2f) = subfield_f.signature();
    if places.real.len() != r1f || places.complex.len() != r2f {
        return bad(format!(
            "F has signature ({r1f}, {r2f}) but {} real and {} complex places were given",
            places.real.len(),
            places.complex.len()
        ));
    }
    for &(x, y) in &places.real {
        if x + 2 * y != d {
            return bad(format!("x(a) + 2y(a) = {} != [E:F] = {d}", x + 2 * y));
        }
    }
    for &y in &places.complex {
        if y != d {
            return bad(format!("y(b) = {y} != [E:F] = {d}"));
        }
    }
    let (r1e, r2e) = field_e.signature();
    let sx: usize = places.real.iter().map(|p| p.0).sum();
    let sy: usize = places.real.iter().map(|p| p.1).sum::<usize>() + places.complex.iter().sum::<usize>();
    if sx != r1e || sy != r2e {
        return bad(format!("places above F give signature ({sx}, {sy}), E has ({r1e}, {r2e})"));
    }
    let lhs = places.real.len() + places.complex.len();
    let rhs = places.real.iter().map(|(x, y)| x + y).sum::<usize>() + places.complex.iter().sum::<usize>();
    Ok(lhs == rhs)
}

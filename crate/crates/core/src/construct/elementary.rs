use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{to_i64, ConstructError};
use crate::linalg::{Hnf, ZMatrix};
use crate::matgroup::{Alphabet, GroupError, MatN, Word};
use crate::numberfield::{same_field, FieldElement};

/// One target `x`: `word` evaluates to `E12(multiple * x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryEntry {
    pub target: FieldElement,
    pub multiple: BigInt,
    pub word: Word,
}

impl ElementaryEntry {
    pub fn achieved(&self) -> FieldElement {
        &self.target * &FieldElement::from_int(self.target.field(), self.multiple.clone())
    }
}

/// Words in `h = diag(theta, theta^-1)^r` and `u+ = E12(s)^r` reaching
/// upper unipotents, and the lattice of all entries reachable by
/// conjugating `u+` with powers of `h`.
#[derive(Clone, Debug)]
pub struct ElementaryCertificate {
    pub theta: FieldElement,
    pub scale: FieldElement,
    pub r: u32,
    /// Number of conjugating powers `m = 0..powers_used` spanning the lattice.
    pub powers_used: usize,
    /// HNF of the reachable lattice in integral-basis coordinates.
    pub lattice: Hnf,
    pub entries: Vec<ElementaryEntry>,
    /// Least common multiple of the per-target multiples.
    pub n: BigInt,
    /// Smallest `M` with `M * O_K` inside the reachable lattice.
    pub lattice_exponent: BigInt,
}

impl ElementaryCertificate {
    pub fn alphabet(&self) -> Result<Alphabet, GroupError> {
        let k = self.theta.field();
        let re = i64::from(self.r);
        Alphabet::new(k, 2)
            .with("h", MatN::torus2(&self.theta)?.pow(re)?)?
            .with("u+", MatN::e12(&self.scale).pow(re)?)
    }

    /// Re-evaluates every word in `alphabet` and compares it with
    /// `E12(embed(multiple * target))`. `embed` maps targets into the
    /// alphabet's field (the identity when they coincide).
    pub fn verify_words(
        &self,
        alphabet: &Alphabet,
        embed: &dyn Fn(&FieldElement) -> FieldElement,
    ) -> Result<bool, GroupError> {
        for e in &self.entries {
            if e.word.eval(alphabet)? != MatN::e12(&embed(&e.achieved())) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Is `N * O_K` contained in the reachable lattice?
    pub fn n_contained(&self) -> bool {
        let d = self.theta.field().degree();
        (0..d).all(|i| {
            let v: Vec<BigInt> = (0..d)
                .map(|j| if i == j { self.n.clone() } else { BigInt::zero() })
                .collect();
            self.lattice.contains(&v)
        })
    }

    pub fn word_lengths(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.word.length()).collect()
    }
}

fn columns(theta: &FieldElement, scale: &FieldElement, r: u32, count: usize) -> Result<ZMatrix, ConstructError> {
    let k = theta.field();
    let step = theta.pow(2 * i64::from(r))?;
    let mut cur = scale * &FieldElement::from_int(k, r);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(cur.integral_coords().ok_or(ConstructError::NotIntegral)?);
        cur = &cur * &step;
    }
    Ok(out)
}

/// Solves `r * s * sum_m n_m theta^(2 m r) = k x` for each target `x` with
/// the least possible `k`, and emits the word
/// `prod_m h^m u+^(n_m) h^-m` in the generators `h = h(theta)^r`,
/// `u+ = E12(s)^r`.
///
/// Powers `m = 0..d` are tried first; more are added, up to `m_max`
/// (default `4d`), only while they enlarge the lattice.
pub fn elementary_words(
    theta: &FieldElement,
    u_plus: &MatN,
    r: u32,
    targets: &[FieldElement],
    m_max: Option<usize>,
) -> Result<ElementaryCertificate, ConstructError> {
    if r == 0 {
        return Err(ConstructError::ZeroPower);
    }
    let k = theta.field();
    let d = k.degree();
    if u_plus.size() != 2 || !u_plus.is_upper_unitriangular() || u_plus.get(0, 1).is_zero() {
        return Err(ConstructError::BadShape("u_plus must be a nontrivial upper unipotent".into()));
    }
    if !same_field(u_plus.field(), k) {
        return Err(ConstructError::ThetaFieldMismatch);
    }
    if !theta.is_integral() || theta.is_torsion() {
        return Err(ConstructError::BadShape("theta must be an integral unit of infinite order".into()));
    }
    let scale = u_plus.get(0, 1).clone();
    let m_max = m_max.unwrap_or(4 * d).max(d);

    let all = columns(theta, &scale, r, m_max)?;
    let full = Hnf::of(&all, d);
    if full.rank() < d {
        return Err(ConstructError::RankDeficient {
            rank: full.rank(),
            needed: d,
        });
    }
    let full_index = full.index(d).expect("full rank");
    // shortest prefix spanning the same lattice
    let mut used = d;
    let lattice = loop {
        let h = Hnf::of(&all[..used].to_vec(), d);
        if h.index(d).as_ref() == Some(&full_index) {
            break h;
        }
        used += 1;
    };

    let mut entries = Vec::with_capacity(targets.len());
    let mut n = BigInt::one();
    for x in targets {
        if !same_field(x.field(), k) {
            return Err(ConstructError::ThetaFieldMismatch);
        }
        let v = x.integral_coords().ok_or(ConstructError::NotIntegral)?;
        let multiple = lattice.order_of(&v).expect("full rank");
        let scaled: Vec<BigInt> = v.iter().map(|c| c * &multiple).collect();
        let coeffs = lattice.express(&scaled).expect("multiple lies in the lattice");
        let mut letters = Vec::new();
        for (m, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = to_i64(c)?;
            if m == 0 {
                letters.push(("u+".to_string(), c));
            } else {
                let m = m as i64;
                letters.push(("h".to_string(), m));
                letters.push(("u+".to_string(), c));
                letters.push(("h".to_string(), -m));
            }
        }
        n = n.lcm(&multiple);
        entries.push(ElementaryEntry {
            target: x.clone(),
            multiple,
            word: Word::new(letters),
        });
    }
    let lattice_exponent = lattice.exponent(d).expect("full rank");
    Ok(ElementaryCertificate {
        theta: theta.clone(),
        scale,
        r,
        powers_used: used,
        lattice,
        entries,
        n,
        lattice_exponent,
    })
}

use num_traits::{Signed, ToPrimitive};

use super::ConstructError;
use crate::matgroup::MatN;
use crate::numberfield::{same_field, CmPair, FieldElement, FieldError};

/// The product `g = [[1, 0], [-x/theta, 1]] [[1, (theta - 1)/t], [0, 1]] [[1, 0], [x, 1]]`
/// with its entries and the checks made on them.
#[derive(Clone, Debug)]
pub struct CmPrimeElement {
    pub g: MatN,
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
    /// Relative trace and norm of `x`, as subfield elements.
    pub t: FieldElement,
    pub n: FieldElement,
    pub theta: FieldElement,
    /// `a = 1 + x (theta - 1)/t`.
    pub a_formula: bool,
    /// `c = n (1 - 1/theta)/t`.
    pub c_formula: bool,
    pub a_outside_subfield: bool,
    pub c_in_subfield: bool,
}

impl CmPrimeElement {
    pub fn all_hold(&self) -> bool {
        self.a_formula && self.c_formula && self.a_outside_subfield && self.c_in_subfield && !self.c.is_zero()
    }
}

fn relative_trace(cm: &CmPair, x: &FieldElement) -> Result<(FieldElement, FieldElement), ConstructError> {
    if !same_field(x.field(), &cm.field) {
        return Err(FieldError::ParentMismatch.into());
    }
    if !x.is_integral() {
        return Err(ConstructError::NotIntegral);
    }
    if cm.contains(x) {
        return Err(ConstructError::XInSubfield);
    }
    let (t, n) = cm.relative_trace_norm(x)?;
    if t.is_zero() {
        return Err(ConstructError::TraceZero);
    }
    Ok((t, n))
}

/// Smallest `k >= 1` with `eps^k = 1 mod t O_F`, `t` the relative trace of
/// `x`, and that power.
pub fn congruent_unit_power(
    cm: &CmPair,
    eps: &FieldElement,
    x: &FieldElement,
) -> Result<(u64, FieldElement), ConstructError> {
    let (t, _) = relative_trace(cm, x)?;
    if !same_field(eps.field(), &cm.subfield) {
        return Err(ConstructError::ThetaFieldMismatch);
    }
    // the order of eps in (O_F / t)^* is at most |N(t)|
    let bound = t.norm().abs().to_integer().to_u64().unwrap_or(u64::MAX).min(1 << 20);
    let one = FieldElement::one(&cm.subfield);
    let mut cur = eps.clone();
    for k in 1..=bound.max(1) {
        if (&cur - &one).checked_div(&t)?.is_integral() {
            return Ok((k, cur));
        }
        cur = &cur * eps;
    }
    Err(ConstructError::ThetaNotCongruent)
}

/// Builds the product element for `x` in the CM field (not in the
/// subfield, nonzero relative trace) and a subfield unit `theta = 1 mod t`.
pub fn cmprime_g_element(cm: &CmPair, x: &FieldElement, theta: &FieldElement) -> Result<CmPrimeElement, ConstructError> {
    let (t, n) = relative_trace(cm, x)?;
    if !same_field(theta.field(), &cm.subfield) {
        return Err(ConstructError::ThetaFieldMismatch);
    }
    if theta.is_one() {
        return Err(ConstructError::DegenerateTheta);
    }
    let one_f = FieldElement::one(&cm.subfield);
    let s = (theta - &one_f).checked_div(&t)?;
    if !s.is_integral() {
        return Err(ConstructError::ThetaNotCongruent);
    }
    let th = cm.embed(theta);
    let th_inv = th.inv()?;
    let (te, ne, se) = (cm.embed(&t), cm.embed(&n), cm.embed(&s));
    let g = &(&MatN::e21(&-(x * &th_inv)) * &MatN::e12(&se)) * &MatN::e21(x);
    let (a, b, c, d) = (g.get(0, 0).clone(), g.get(0, 1).clone(), g.get(1, 0).clone(), g.get(1, 1).clone());
    let one = FieldElement::one(&cm.field);
    let a_formula = a == &one + &(x * &se);
    let c_formula = c == (&ne * &(&one - &th_inv)).checked_div(&te)?;
    Ok(CmPrimeElement {
        a_outside_subfield: !cm.contains(&a),
        c_in_subfield: cm.contains(&c),
        g,
        a,
        b,
        c,
        d,
        t,
        n,
        theta: theta.clone(),
        a_formula,
        c_formula,
    })
}

use serde::{Deserialize, Serialize};

use super::{GroupError, MatN};


/// Sign convention for the Weyl factor.
///
/// `Standard` uses `[[0, -1], [1, 0]]`. `Negated` moves a sign from the
/// torus into the Weyl factor, giving `[[0, 1], [-1, 0]]` and torus
/// `diag(-1/c, -c)`; the product is unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeylConvention {
    Standard,
    Negated,
}

/// `g = u1 * torus * weyl * u2`, or `g = u1 * torus` when `g` is upper
/// triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruhatFactors {
    pub u1: MatN,
    pub torus: MatN,
    pub weyl: MatN,
    pub u2: MatN,
    pub is_borel: bool,
    pub convention: WeylConvention,
}

impl BruhatFactors {
    pub fn recompose(&self) -> MatN {
        &(&(&self.u1 * &self.torus) * &self.weyl) * &self.u2
    }

    /// The same factorization written in another sign convention.
    pub fn with_convention(&self, convention: WeylConvention) -> BruhatFactors {
        if self.is_borel || convention == self.convention {
            return self.clone();
        }
        BruhatFactors {
            torus: self.torus.neg(),
            weyl: self.weyl.neg(),
            convention,
            ..self.clone()
        }
    }
}

pub fn bruhat_decompose(g: &MatN) -> Result<BruhatFactors, GroupError> {
    if g.size() != 2 {
        return Err(GroupError::WrongSize {
            expected: 2,
            got: g.size(),
        });
    }
    g.require_special()?;
    let k = g.field();
    let (a, b, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    let id = MatN::identity(k, 2);
    if c.is_zero() {
        // ad = 1, so b/d = ab
        return Ok(BruhatFactors {
            u1: MatN::e12(&(a * b)),
            torus: MatN::diag(k, &[a.clone(), d.clone()]),
            weyl: id.clone(),
            u2: id,
            is_borel: true,
            convention: WeylConvention::Standard,
        });
    }
    let ci = c.inv()?;
    Ok(BruhatFactors {
        u1: MatN::e12(&(a * &ci)),
        torus: MatN::diag(k, &[ci.clone(), c.clone()]),
        weyl: MatN::from_ints(k, &[&[0, -1], &[1, 0]])?,
        u2: MatN::e12(&(d * &ci)),
        is_borel: false,
        convention: WeylConvention::Standard,
    })
}

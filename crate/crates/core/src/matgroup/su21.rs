use num_bigint::BigInt;
use num_traits::One;

use super::{GroupError, MatN};
use crate::numberfield::{FieldElement, FieldRef};

/// A field automorphism of order two, given by the image of the generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjugation {
    image: FieldElement,
}

impl Conjugation {
    pub fn new(image: FieldElement) -> Result<Self, GroupError> {
        let field = image.field().clone();
        if !field.is_embedding(&image) {
            return Err(GroupError::Malformed("image is not a root of the defining polynomial".into()));
        }
        let gen = FieldElement::generator(&field);
        if image == gen {
            return Err(GroupError::Malformed("conjugation is the identity".into()));
        }
        if image.substitute(&image) != gen {
            return Err(GroupError::Malformed("automorphism does not have order two".into()));
        }
        Ok(Conjugation { image })
    }

    pub fn field(&self) -> &FieldRef {
        self.image.field()
    }

    pub fn image(&self) -> &FieldElement {
        &self.image
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        x.substitute(&self.image)
    }

    pub fn is_fixed(&self, x: &FieldElement) -> bool {
        &self.apply(x) == x
    }

    pub fn conj_transpose(&self, g: &MatN) -> MatN {
        g.transpose().map(|x| self.apply(x))
    }
}

/// The anti-diagonal hermitian form on `E^3` together with its conjugation.
#[derive(Clone, Debug)]
pub struct HermitianData {
    pub form: MatN,
    pub conj: Conjugation,
}

impl HermitianData {
    pub fn anti_diagonal(conj: Conjugation) -> Self {
        let k = conj.field().clone();
        let form = MatN::from_ints(&k, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]).expect("3x3");
        HermitianData { form, conj }
    }

    pub fn is_hermitian(&self) -> bool {
        self.conj.conj_transpose(&self.form) == self.form
    }
}

/// Does `g` preserve the form and have determinant one?
pub fn su21_check(g: &MatN, data: &HermitianData) -> bool {
    if g.size() != 3 || !crate::numberfield::same_field(g.field(), data.conj.field()) {
        return false;
    }
    let lhs = &(&data.conj.conj_transpose(g) * &data.form) * g;
    lhs == data.form && g.det().is_one()
}

/// `[[a, b], [c, d]] -> [[a, 0, b s], [0, 1, 0], [c / s, 0, d]]` where `s`
/// is a square root of a rational number.
pub fn sl2_to_su21(g: &MatN, sqrt_z: &FieldElement) -> Result<MatN, GroupError> {
    if g.size() != 2 {
        return Err(GroupError::WrongSize {
            expected: 2,
            got: g.size(),
        });
    }
    g.require_special()?;
    let k = g.field();
    let si = sqrt_z.inv()?;
    let zero = FieldElement::zero(k);
    let one = FieldElement::one(k);
    MatN::from_rows(
        k,
        vec![
            vec![g.get(0, 0).clone(), zero.clone(), g.get(0, 1) * sqrt_z],
            vec![zero.clone(), one, zero.clone()],
            vec![g.get(1, 0) * &si, zero, g.get(1, 1).clone()],
        ],
    )
}

/// Hermitian data plus a square root `s` of a positive rational with
/// `conj(s) = -s`: everything needed to write down the root subgroups.
#[derive(Clone, Debug)]
pub struct Su21Setting {
    pub hermitian: HermitianData,
    pub sqrt_z: FieldElement,
}

impl Su21Setting {
    pub fn new(conj: Conjugation, sqrt_z: FieldElement) -> Result<Self, GroupError> {
        let sq = (&sqrt_z * &sqrt_z).as_rational();
        if !sq.is_some_and(|z| z > num_rational::BigRational::from_integer(0.into())) {
            return Err(GroupError::Malformed("square of sqrt_z is not a positive rational".into()));
        }
        if conj.apply(&sqrt_z) != -&sqrt_z {
            return Err(GroupError::Malformed("conjugation does not negate sqrt_z".into()));
        }
        Ok(Su21Setting {
            hermitian: HermitianData::anti_diagonal(conj),
            sqrt_z,
        })
    }

    pub fn field(&self) -> &FieldRef {
        self.hermitian.conj.field()
    }

    pub fn conj(&self) -> &Conjugation {
        &self.hermitian.conj
    }

    pub fn check(&self, g: &MatN) -> bool {
        su21_check(g, &self.hermitian)
    }

    fn require_fixed(&self, t: &FieldElement) -> Result<(), GroupError> {
        if !self.conj().is_fixed(t) {
            return Err(GroupError::Malformed("t is not fixed by the conjugation".into()));
        }
        Ok(())
    }

    /// `[[1, 0, t x s], [0, 1, 0], [0, 0, 1]]`.
    pub fn center_generator(&self, t: &FieldElement, x: i64) -> Result<MatN, GroupError> {
        self.require_fixed(t)?;
        let w = &(t * &self.sqrt_z) * &FieldElement::from_int(self.field(), x);
        Ok(MatN::elementary(self.field(), 3, 0, 2, &w))
    }

    /// `[[1, a, -a conj(a) / 2], [0, 1, -conj(a)], [0, 0, 1]]` with `a = t u x`.
    pub fn full_generator(&self, t: &FieldElement, x: i64, u: &FieldElement) -> Result<MatN, GroupError> {
        self.require_fixed(t)?;
        if !u.is_integral() {
            return Err(GroupError::Malformed("u is not integral".into()));
        }
        let k = self.field();
        let a = &(t * u) * &FieldElement::from_int(k, x);
        let ab = self.conj().apply(&a);
        let half = FieldElement::from_rational(k, &num_rational::BigRational::new(1.into(), 2.into()));
        let mut g = MatN::identity(k, 3);
        g.set(0, 1, a.clone());
        g.set(0, 2, -&(&(&a * &ab) * &half));
        g.set(1, 2, -ab);
        Ok(g)
    }

    /// If `g = I + w e13` with `w = k t s` for a rational integer `k`,
    /// returns `k`.
    pub fn u2alpha_multiple(&self, g: &MatN, t: &FieldElement) -> Option<BigInt> {
        if g.size() != 3 || t.is_zero() {
            return None;
        }
        let w = g.get(0, 2);
        let rest = g.sub_identity_except(0, 2);
        if !rest {
            return None;
        }
        let q = w.checked_div(&(t * &self.sqrt_z)).ok()?.as_rational()?;
        q.denom().is_one().then(|| q.numer().clone())
    }

    /// `diag(theta, theta^-2, theta)`.
    pub fn torus(&self, theta: &FieldElement) -> Result<MatN, GroupError> {
        let ti = theta.inv()?;
        Ok(MatN::diag(self.field(), &[theta.clone(), &ti * &ti, theta.clone()]))
    }

    pub fn from_sl2(&self, g: &MatN) -> Result<MatN, GroupError> {
        sl2_to_su21(g, &self.sqrt_z)
    }
}

/// Generator of `U+(tZ)`: the centre family when `u` is `None`, the full
/// family otherwise. `x = 0` gives the identity.
pub fn su21_uplus_generators(
    setting: &Su21Setting,
    t: &FieldElement,
    x: i64,
    u: Option<&FieldElement>,
) -> Result<MatN, GroupError> {
    match u {
        None => setting.center_generator(t, x),
        Some(u) => setting.full_generator(t, x, u),
    }
}

impl MatN {
    /// True when every entry other than `(i, j)` agrees with the identity.
    fn sub_identity_except(&self, i: usize, j: usize) -> bool {
        let n = self.size();
        (0..n).all(|a| {
            (0..n).all(|b| {
                if (a, b) == (i, j) {
                    true
                } else if a == b {
                    self.get(a, b).is_one()
                } else {
                    self.get(a, b).is_zero()
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::NumberField;
    use proptest::prelude::*;

    // Q(zeta_8): sqrt2 = z - z^3, i = z^2; conjugation z -> -z fixes i and
    // negates sqrt2.
    fn setting() -> Su21Setting {
        let k = NumberField::from_coefficients(&[1, 0, 0, 0, 1]).unwrap();
        let z = FieldElement::generator(&k);
        let conj = Conjugation::new(-&z).unwrap();
        let s = &z - &z.pow(3).unwrap();
        Su21Setting::new(conj, s).unwrap()
    }

    fn i_unit(k: &FieldRef) -> FieldElement {
        FieldElement::generator(k).pow(2).unwrap()
    }

    #[test]
    fn form_is_hermitian_and_identity_passes() {
        let s = setting();
        assert!(s.hermitian.is_hermitian());
        assert!(s.check(&MatN::identity(s.field(), 3)));
    }

    #[test]
    fn generators_are_unitary() {
        let s = setting();
        let k = s.field().clone();
        let t = i_unit(&k);
        let g = su21_uplus_generators(&s, &t, 1, None).unwrap();
        assert_eq!(g, MatN::elementary(&k, 3, 0, 2, &(&t * &s.sqrt_z)));
        assert!(s.check(&g));
        assert_eq!(s.u2alpha_multiple(&g, &t), Some(BigInt::one()));
        assert!(su21_uplus_generators(&s, &t, 0, None).unwrap().is_identity());
        let u = &FieldElement::one(&k) + &s.sqrt_z;
        let g = su21_uplus_generators(&s, &t, 2, Some(&u)).unwrap();
        assert!(s.check(&g));
        assert!(s.check(&g.transpose()));
        // 3 + 2 sqrt2 has norm one
        let theta = &FieldElement::from_int(&k, 3) + &(&s.sqrt_z + &s.sqrt_z);
        assert!(s.check(&s.torus(&theta).unwrap()));
        let bad = &FieldElement::one(&k) + &s.sqrt_z;
        assert!(!s.check(&s.torus(&bad).unwrap()));
    }

    #[test]
    fn t_must_be_fixed() {
        let s = setting();
        let bad = s.sqrt_z.clone();
        assert!(matches!(s.center_generator(&bad, 1), Err(GroupError::Malformed(_))));
    }

    #[test]
    fn conjugation_validation() {
        let k = NumberField::from_coefficients(&[1, 0, 0, 0, 1]).unwrap();
        let z = FieldElement::generator(&k);
        assert!(Conjugation::new(z.clone()).is_err());
        // z -> z^3 has order two as well, but i = z^2 -> z^6 = -i
        assert!(Conjugation::new(z.pow(3).unwrap()).is_ok());
        assert!(Conjugation::new(&z + &z).is_err());
    }

    #[test]
    fn sl2_image() {
        let s = setting();
        let k = s.field().clone();
        assert!(s.from_sl2(&MatN::identity(&k, 2)).unwrap().is_identity());
        let u = s.from_sl2(&MatN::e12(&FieldElement::one(&k))).unwrap();
        assert_eq!(u.get(0, 2), &s.sqrt_z);
        assert!(s.u2alpha_multiple(&u, &FieldElement::one(&k)).is_some());
        let w = s.from_sl2(&MatN::from_ints(&k, &[&[0, 1], &[-1, 0]]).unwrap()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(w.get(a, b).is_zero(), a + b != 2);
            }
        }
        assert!(s.check(&w));
    }

    fn random_sl2(k: &FieldRef, steps: &[(bool, i64, i64)]) -> MatN {
        let i = i_unit(k);
        let mut g = MatN::identity(k, 2);
        for &(upper, a, b) in steps {
            let x = &FieldElement::from_int(k, a) + &(&i * &FieldElement::from_int(k, b));
            let e = if upper { MatN::e12(&x) } else { MatN::e21(&x) };
            g = &g * &e;
        }
        g
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn sl2_map_is_homomorphism(
            s1 in proptest::collection::vec((any::<bool>(), -3i64..4, -3i64..4), 1..5),
            s2 in proptest::collection::vec((any::<bool>(), -3i64..4, -3i64..4), 1..5),
        ) {
            let s = setting();
            let k = s.field().clone();
            let (g1, g2) = (random_sl2(&k, &s1), random_sl2(&k, &s2));
            let f1 = s.from_sl2(&g1).unwrap();
            let f2 = s.from_sl2(&g2).unwrap();
            prop_assert_eq!(s.from_sl2(&(&g1 * &g2)).unwrap(), &f1 * &f2);
            prop_assert_eq!(s.from_sl2(&g1.inverse().unwrap()).unwrap(), f1.inverse().unwrap());
            prop_assert!(s.check(&f1));
        }
    }
}

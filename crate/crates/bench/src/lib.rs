//! Fixtures shared by the benchmarks.

use trigen_core::construct::build_noncm;
use trigen_core::numberfield::{FieldElement, FieldRef, NumberField};
use trigen_core::units::{select_theta, UnitSource};
use trigen_core::GeneratorTriple;

pub fn sqrt2() -> FieldRef {
    NumberField::from_coefficients(&[-2, 0, 1]).expect("x^2 - 2 is irreducible")
}

pub fn zeta8() -> FieldRef {
    NumberField::from_coefficients(&[1, 0, 0, 0, 1]).expect("x^4 + 1 is irreducible")
}

/// The three-generator set for `Q(sqrt2)` at power `r`.
pub fn sqrt2_triple(r: u32) -> GeneratorTriple {
    let k = sqrt2();
    let cert = select_theta(&k, &UnitSource::Pell, 4).expect("1 + sqrt2 qualifies");
    build_noncm(&k, &cert, r).expect("valid theta")
}

/// A dense element with coordinates `1, 2, ..., d`.
pub fn dense_element(k: &FieldRef) -> FieldElement {
    let coords: Vec<i64> = (1..=k.degree() as i64).collect();
    FieldElement::from_basis_ints(k, &coords).expect("right length")
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{GroupError, MatN};
use crate::numberfield::FieldRef;

/// Named generators of a matrix group, with cached inverses.
#[derive(Clone, Debug)]
pub struct Alphabet {
    field: FieldRef,
    size: usize,
    gens: BTreeMap<String, (MatN, MatN)>,
}

impl Alphabet {
    pub fn new(field: &FieldRef, size: usize) -> Self {
        Alphabet {
            field: field.clone(),
            size,
            gens: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: &str, g: MatN) -> Result<(), GroupError> {
        if g.size() != self.size {
            return Err(GroupError::SizeMismatch(self.size, g.size()));
        }
        if !crate::numberfield::same_field(g.field(), &self.field) {
            return Err(GroupError::ParentMismatch);
        }
        let inv = g.inverse()?;
        self.gens.insert(name.to_string(), (g, inv));
        Ok(())
    }

    pub fn with(mut self, name: &str, g: MatN) -> Result<Self, GroupError> {
        self.insert(name, g)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&MatN> {
        self.gens.get(name).map(|(g, _)| g)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.gens.keys().map(String::as_str)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    fn power(&self, name: &str, e: i64) -> Result<MatN, GroupError> {
        let (g, gi) = self
            .gens
            .get(name)
            .ok_or_else(|| GroupError::UnknownGenerator(name.to_string()))?;
        if e >= 0 {
            g.pow(e)
        } else {
            gi.pow(-e)
        }
    }
}

/// A product of generator powers, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<(String, i64)>,
}

impl Word {
    pub fn new(letters: Vec<(String, i64)>) -> Self {
        Word { letters }
    }

    pub fn from_pairs(letters: &[(&str, i64)]) -> Self {
        Word {
            letters: letters.iter().map(|(n, e)| (n.to_string(), *e)).collect(),
        }
    }

    pub fn letter(name: &str, e: i64) -> Self {
        Word::from_pairs(&[(name, e)])
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|(n, e)| (n.clone(), -e)).collect(),
        }
    }

    /// Merges adjacent letters with equal names and drops zero exponents.
    pub fn simplified(&self) -> Word {
        let mut out: Vec<(String, i64)> = Vec::new();
        for (n, e) in &self.letters {
            match out.last_mut() {
                Some((m, f)) if m == n => *f += e,
                _ => out.push((n.clone(), *e)),
            }
            if out.last().is_some_and(|(_, f)| *f == 0) {
                out.pop();
            }
        }
        Word { letters: out }
    }

    /// Total exponent length `sum |e|`.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn eval(&self, alphabet: &Alphabet) -> Result<MatN, GroupError> {
        word_eval(self, alphabet)
    }
}

pub fn word_eval(w: &Word, alphabet: &Alphabet) -> Result<MatN, GroupError> {
    let mut acc = MatN::identity(&alphabet.field, alphabet.size);
    for (name, e) in &w.letters {
        let p = alphabet.power(name, *e)?;
        acc = acc.try_mul(&p)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{FieldElement, NumberField};
    use proptest::prelude::*;

    fn setup() -> Alphabet {
        let k = NumberField::from_coefficients(&[-2, 0, 1]).unwrap();
        let one = FieldElement::one(&k);
        let theta = &one + &FieldElement::generator(&k);
        Alphabet::new(&k, 2)
            .with("u+", MatN::e12(&one))
            .unwrap()
            .with("u-", MatN::e21(&one))
            .unwrap()
            .with("h", MatN::torus2(&theta).unwrap())
            .unwrap()
    }

    #[test]
    fn examples() {
        let a = setup();
        let k = a.field().clone();
        let one = FieldElement::one(&k);
        assert_eq!(Word::letter("u+", 1).eval(&a).unwrap(), MatN::e12(&one));
        let theta = &one + &FieldElement::generator(&k);
        let w = Word::from_pairs(&[("h", 1), ("u+", 1), ("h", -1)]);
        assert_eq!(w.eval(&a).unwrap(), MatN::e12(&theta.pow(2).unwrap()));
        assert!(Word::from_pairs(&[("u+", 1), ("u+", -1)]).eval(&a).unwrap().is_identity());
        assert_eq!(
            Word::letter("v", 1).eval(&a).unwrap_err(),
            GroupError::UnknownGenerator("v".into())
        );
        assert!(Word::default().eval(&a).unwrap().is_identity());
    }

    #[test]
    fn simplify_cancels() {
        let w = Word::from_pairs(&[("a", 1), ("b", 2), ("b", -2), ("a", 3), ("c", 0)]);
        assert_eq!(w.simplified(), Word::from_pairs(&[("a", 4)]));
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        proptest::collection::vec((0usize..3, -3i64..4), 0..7).prop_map(|v| {
            let names = ["u+", "u-", "h"];
            Word::new(v.into_iter().map(|(i, e)| (names[i].to_string(), e)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn eval_is_homomorphism(w1 in word_strategy(), w2 in word_strategy()) {
            let a = setup();
            let lhs = w1.concat(&w2).eval(&a).unwrap();
            let rhs = &w1.eval(&a).unwrap() * &w2.eval(&a).unwrap();
            prop_assert_eq!(lhs, rhs);
            let inv = w1.inverse().eval(&a).unwrap();
            prop_assert!((&inv * &w1.eval(&a).unwrap()).is_identity());
            prop_assert_eq!(w1.simplified().eval(&a).unwrap(), w1.eval(&a).unwrap());
            prop_assert!(w1.eval(&a).unwrap().det().is_one());
        }
    }
}

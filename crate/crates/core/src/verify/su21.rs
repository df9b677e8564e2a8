use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{verdict_from, Certificate, NamedCheck};
use crate::construct::GeneratorTriple;
use crate::matgroup::{GroupError, MatN, Su21Setting};
use crate::numberfield::FieldElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorReport {
    pub pairs: usize,
    pub failures: usize,
}

/// Integer tuples `(x, p, q)` with `x != 0` and `|x| + |p| + |q| <= height`.
fn parameters(height: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for x in -height..=height {
        for p in -height..=height {
            for q in -height..=height {
                if x != 0 && x.abs() + p.abs() + q.abs() <= height {
                    out.push((x, p, q));
                }
            }
        }
    }
    out
}

/// Checks that `[g, h]` lies in `U_2a(tZ)` for every generator `g` of
/// `U+(tZ)` and `h` of `U+(Z)` with parameters of height at most `height`,
/// where `u = p + q sqrt(z)`.
pub fn commutator_check(setting: &Su21Setting, t: &FieldElement, height: i64) -> Result<CommutatorReport, GroupError> {
    let k = setting.field();
    let one = FieldElement::one(k);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (x, p, q) in parameters(height) {
        let u = &FieldElement::from_int(k, p) + &(&FieldElement::from_int(k, q) * &setting.sqrt_z);
        left.push(setting.full_generator(t, x, &u)?);
        right.push(setting.full_generator(&one, x, &u)?);
        if p == 0 && q == 0 {
            left.push(setting.center_generator(t, x)?);
            right.push(setting.center_generator(&one, x)?);
        }
    }
    let mut report = CommutatorReport { pairs: 0, failures: 0 };
    for g in &left {
        for h in &right {
            let c = MatN::commutator(g, h)?;
            report.pairs += 1;
            if setting.u2alpha_multiple(&c, t).is_none() {
                report.failures += 1;
            }
        }
    }
    Ok(report)
}

fn random_sl2(setting: &Su21Setting, t: &FieldElement, rng: &mut ChaCha8Rng) -> MatN {
    let k = setting.field();
    let mut g = MatN::identity(k, 2);
    for _ in 0..rng.gen_range(1..5) {
        let a = FieldElement::from_int(k, rng.gen_range(-3..=3));
        let b = FieldElement::from_int(k, rng.gen_range(-3..=3));
        let x = &a + &(&b * t);
        let e = if rng.gen_bool(0.5) { MatN::e12(&x) } else { MatN::e21(&x) };
        g = &g * &e;
    }
    g
}

/// Number of pairs, out of `pairs` seeded random pairs of `SL(2)` elements
/// with entries in `Z[t]`, on which the map to `SU(2,1)` fails to respect
/// products or inverses, or leaves the group.
pub fn sl2_homomorphism_check(
    setting: &Su21Setting,
    t: &FieldElement,
    pairs: usize,
    seed: u64,
) -> Result<usize, GroupError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..pairs {
        let g1 = random_sl2(setting, t, &mut rng);
        let g2 = random_sl2(setting, t, &mut rng);
        let f1 = setting.from_sl2(&g1)?;
        let f2 = setting.from_sl2(&g2)?;
        let ok = setting.from_sl2(&(&g1 * &g2))? == &f1 * &f2
            && setting.from_sl2(&g1.inverse()?)? == f1.inverse()?
            && setting.check(&f1);
        if !ok {
            failures += 1;
        }
    }
    Ok(failures)
}

/// Symbolic certificate for the unitary case: membership of the generators,
/// the commutator identity and the homomorphism property. No congruence
/// closure is attempted since the ambient group is not `SL(3)`.
pub fn certify_su21(triple: &GeneratorTriple, setting: &Su21Setting, t: &FieldElement, height: i64) -> Certificate {
    let mut checks = Vec::new();
    let bad: Vec<&str> = triple
        .gens
        .iter()
        .filter(|(_, g)| !setting.check(g))
        .map(|(n, _)| n.as_str())
        .collect();
    checks.push(NamedCheck::new(
        "su21_membership",
        bad.is_empty(),
        if bad.is_empty() { "all generators preserve the form".into() } else { format!("failing: {}", bad.join(", ")) },
    ));
    checks.push(match commutator_check(setting, t, height) {
        Ok(r) => NamedCheck::new(
            "commutator_identity",
            r.failures == 0,
            format!("{} pairs, {} failures, height {height}", r.pairs, r.failures),
        ),
        Err(e) => NamedCheck::new("commutator_identity", false, e.to_string()),
    });
    checks.push(match sl2_homomorphism_check(setting, t, 100, 0x5321) {
        Ok(f) => NamedCheck::new("sl2_homomorphism", f == 0, format!("100 pairs, {f} failures")),
        Err(e) => NamedCheck::new("sl2_homomorphism", false, e.to_string()),
    });
    let verdict = verdict_from(&checks, &[]);
    Certificate {
        case: triple.case,
        r: triple.r,
        checks,
        closures: Vec::new(),
        theta: None,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::build_su21;
    use crate::matgroup::Conjugation;
    use crate::numberfield::NumberField;
    use crate::verify::Verdict;

    fn setting() -> Su21Setting {
        let k = NumberField::from_coefficients(&[1, 0, 0, 0, 1]).unwrap();
        let z = FieldElement::generator(&k);
        Su21Setting::new(Conjugation::new(-&z).unwrap(), &z - &z.pow(3).unwrap()).unwrap()
    }

    #[test]
    fn parameters_by_height() {
        assert_eq!(parameters(1).len(), 2);
        // |x| = 1, 2, 3 leaves 13, 5, 1 choices of (p, q)
        assert_eq!(parameters(3).len(), 2 * (13 + 5 + 1));
    }

    #[test]
    fn su21_certificate_passes() {
        let s = setting();
        let k = s.field().clone();
        let i = FieldElement::generator(&k).pow(2).unwrap();
        let t = &FieldElement::one(&k) + &i;
        let theta = &FieldElement::from_int(&k, 3) + &(&s.sqrt_z + &s.sqrt_z);
        let triple = build_su21(&s, &t, &theta, 1).unwrap();
        let c = certify_su21(&triple, &s, &t, 2);
        assert_eq!(c.verdict, Verdict::Pass, "{:?}", c.checks);
    }
}

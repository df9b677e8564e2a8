use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{CaseTag, ConstructError, GeneratorTriple};
use crate::linalg;
use crate::matgroup::MatN;
use crate::numberfield::{format_rational, same_field, FieldElement};

/// Determinants witnessing linear independence over Q of the conjugates of
/// the upper and lower unipotent directions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeReport {
    pub exponents: Vec<i64>,
    pub upper_det: String,
    pub lower_det: String,
    pub upper_ok: bool,
    pub lower_ok: bool,
}

/// `blockdiag(g, det(g)^-1)`.
pub fn levi_element(g: &MatN) -> Result<MatN, ConstructError> {
    let k = g.field();
    let n = g.size() + 1;
    let det = g.det();
    let di = det.inv().map_err(|_| ConstructError::BadShape("Levi block is singular".into()))?;
    let mut m = MatN::identity(k, n);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            m.set(i, j, g.get(i, j).clone());
        }
    }
    m.set(n - 1, n - 1, di);
    Ok(m)
}

fn flatten(v: &[FieldElement]) -> Vec<BigRational> {
    v.iter().flat_map(|x| x.coords()).collect()
}

fn mat_vec(g: &MatN, v: &[FieldElement]) -> Vec<FieldElement> {
    (0..g.size())
        .map(|i| {
            v.iter()
                .enumerate()
                .fold(FieldElement::zero(g.field()), |acc, (j, x)| &acc + &(g.get(i, j) * x))
        })
        .collect()
}

fn vec_mat(v: &[FieldElement], g: &MatN) -> Vec<FieldElement> {
    (0..g.size())
        .map(|j| {
            v.iter()
                .enumerate()
                .fold(FieldElement::zero(g.field()), |acc, (i, x)| &acc + &(x * g.get(i, j)))
        })
        .collect()
}

/// `{m, u, u-}` in `SL(n)` with `m = blockdiag(g, det(g)^-1)`, `u` the column
/// unipotent with last column `x` and `u-` its transpose. The conjugates of
/// `log u` under `m^k` are `det(g)^k g^k x`; for a field of degree `d` one
/// needs `(n-1) d` exponents so that the flattened vectors form a square
/// rational matrix.
pub fn build_sln_multone(
    g: &MatN,
    x: &[FieldElement],
    exponents: &[i64],
) -> Result<(GeneratorTriple, WedgeReport), ConstructError> {
    let k = g.field();
    let l = g.size();
    let n = l + 1;
    if n < 3 {
        return Err(ConstructError::BadShape("need n >= 3".into()));
    }
    if x.len() != l || x.iter().any(|e| !same_field(e.field(), k)) {
        return Err(ConstructError::BadShape(format!("column must have {l} entries in the field")));
    }
    if !g.is_integral() || x.iter().any(|e| !e.is_integral()) {
        return Err(ConstructError::NotIntegral);
    }
    let needed = l * k.degree();
    if exponents.len() != needed {
        return Err(ConstructError::BadShape(format!("need {needed} exponents, got {}", exponents.len())));
    }
    let m = levi_element(g)?;
    if !m.is_integral() {
        return Err(ConstructError::BadShape("det of the Levi block must be a unit".into()));
    }
    let delta = g.det();

    let mut upper_rows = Vec::with_capacity(needed);
    let mut lower_rows = Vec::with_capacity(needed);
    for &e in exponents {
        let gk = g.pow(e)?;
        let gmk = g.pow(-e)?;
        let up: Vec<FieldElement> = mat_vec(&gk, x).iter().map(|v| v * &delta.pow(e).expect("unit")).collect();
        let down: Vec<FieldElement> = vec_mat(x, &gmk).iter().map(|v| v * &delta.pow(-e).expect("unit")).collect();
        upper_rows.push(flatten(&up));
        lower_rows.push(flatten(&down));
    }
    let upper_det = linalg::q_det(&upper_rows);
    let lower_det = linalg::q_det(&lower_rows);
    let report = WedgeReport {
        exponents: exponents.to_vec(),
        upper_det: format_rational(&upper_det),
        lower_det: format_rational(&lower_det),
        upper_ok: !upper_det.is_zero(),
        lower_ok: !lower_det.is_zero(),
    };
    if upper_det.is_zero() {
        return Err(ConstructError::WedgeZero("upper"));
    }
    if lower_det.is_zero() {
        return Err(ConstructError::WedgeZero("lower"));
    }
    let mut u = MatN::identity(k, n);
    for (i, e) in x.iter().enumerate() {
        u.set(i, n - 1, e.clone());
    }
    let mut provenance = BTreeMap::new();
    provenance.insert("field".into(), k.defining_qpoly().to_string());
    provenance.insert("levi".into(), g.to_string());
    provenance.insert("column".into(), format!("{x:?}"));
    let triple = GeneratorTriple {
        case: CaseTag::SlnMultone,
        gens: vec![("m".into(), m), ("u".into(), u.clone()), ("u-".into(), u.transpose())],
        r: 1,
        provenance,
    };
    Ok((triple, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{FieldRef, NumberField};

    fn ints(k: &FieldRef, v: &[i64]) -> Vec<FieldElement> {
        v.iter().map(|&a| FieldElement::from_int(k, a)).collect()
    }

    #[test]
    fn sl3_example() {
        let q = NumberField::rationals();
        let g = MatN::from_ints(&q, &[&[2, 1], &[1, 1]]).unwrap();
        let (t, w) = build_sln_multone(&g, &ints(&q, &[1, 1]), &[0, 1]).unwrap();
        // rows (1,1) and (3,2)
        assert_eq!(w.upper_det, "-1");
        // rows (1,1) and (1,1) g^-1 = (0,1)
        assert_eq!(w.lower_det, "1");
        assert_eq!(
            t.get("m").unwrap(),
            &MatN::from_ints(&q, &[&[2, 1, 0], &[1, 1, 0], &[0, 0, 1]]).unwrap()
        );
        for (_, m) in &t.gens {
            assert!(m.det().is_one());
        }
    }

    #[test]
    fn degenerate_inputs() {
        let q = NumberField::rationals();
        let g = MatN::from_ints(&q, &[&[2, 1], &[1, 1]]).unwrap();
        assert_eq!(
            build_sln_multone(&g, &ints(&q, &[0, 0]), &[0, 1]).unwrap_err(),
            ConstructError::WedgeZero("upper")
        );
        let id = MatN::identity(&q, 2);
        assert_eq!(
            build_sln_multone(&id, &ints(&q, &[1, 1]), &[0, 1]).unwrap_err(),
            ConstructError::WedgeZero("upper")
        );
        assert!(matches!(
            build_sln_multone(&g, &ints(&q, &[1, 1]), &[0]),
            Err(ConstructError::BadShape(_))
        ));
    }

    #[test]
    fn quadratic_field_needs_more_exponents() {
        let k = NumberField::from_coefficients(&[-2, 0, 1]).unwrap();
        let s = FieldElement::generator(&k);
        let one = FieldElement::one(&k);
        let x = vec![one.clone(), s.clone()];
        // a rational block only spans Q[g] x, two-dimensional over Q
        let g = MatN::from_ints(&k, &[&[2, 1], &[1, 1]]).unwrap();
        assert_eq!(
            build_sln_multone(&g, &x, &[0, 1, 2, 3]).unwrap_err(),
            ConstructError::WedgeZero("upper")
        );
        // det = 1 + sqrt2 is a unit
        let mut g = g;
        g.set(0, 0, &FieldElement::from_int(&k, 2) + &s);
        let (t, w) = build_sln_multone(&g, &x, &[0, 1, 2, 3]).unwrap();
        assert!(w.upper_ok && w.lower_ok);
        assert!(t.get("m").unwrap().det().is_one());
    }
}

//! Acceptance suite: one line per criterion, PASS or FAIL, with wall time
//! against its budget. Run with `cargo test -p trigen-core --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trigen_core::construct::{build_cm, build_noncm, build_sln_multone, build_su21, congruent_unit_power};
use trigen_core::matgroup::{bruhat_decompose, Conjugation, MatN, Su21Setting, WeylConvention};
use trigen_core::numberfield::{subring_index, CmPair, FieldElement, FieldRef, NumberField, SubringIndex};
use trigen_core::units::{fundamental_unit_real_quadratic, select_theta, UnitSource, DEFAULT_R_MAX};
use trigen_core::verify::{
    ambient_order, closure, closure_mod_p, reduce_mod, CertifyOptions, ResidueMat, ResidueRing, Surjectivity,
    DEFAULT_CLOSURE_CAP, DEFAULT_ENUM_CAP,
};
use trigen_core::{cmprime_g_element, elementary_words};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn field(c: &[i64]) -> FieldRef {
    NumberField::from_coefficients(c).unwrap()
}

fn int(k: &FieldRef, n: i64) -> FieldElement {
    FieldElement::from_int(k, n)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

// ---------------------------------------------------------------- oracles

/// Smallest `y <= 10^4` with `D y^2 +- 4` a square, by direct search.
fn brute_pell(disc: i64) -> Option<(BigInt, BigInt)> {
    for y in 1..=10_000i64 {
        let base = BigInt::from(disc) * y * y;
        for rhs in [&base - 4i64, &base + 4i64] {
            if rhs.is_negative() {
                continue;
            }
            let x = rhs.sqrt();
            if &x * &x == rhs {
                return Some((x, BigInt::from(y)));
            }
        }
    }
    None
}

/// Real roots of an integer polynomial, counted by sign changes on a grid
/// of step 1/64 over the Cauchy bound. Adequate for the well-separated
/// roots of the fields used here.
fn grid_real_roots(coeffs: &[i64]) -> usize {
    let lead = *coeffs.last().unwrap() as f64;
    let bound = 1 + coeffs.iter().map(|c| (*c as f64 / lead).abs()).fold(0.0, f64::max).ceil() as i64;
    let eval = |x: &BigRational| {
        coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer((*c).into()))
    };
    let mut count = 0;
    let mut prev = eval(&q(-bound * 64, 64)).signum();
    for i in (-bound * 64 + 1)..=(bound * 64) {
        let v = eval(&q(i, 64));
        if v.is_zero() {
            count += 1;
            continue;
        }
        let s = v.signum();
        if !prev.is_zero() && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

/// `|SL(2, F_q)| = q (q^2 - 1)`.
fn sl2_order(q: u64) -> BigInt {
    BigInt::from(q) * (BigInt::from(q) * q - 1)
}

/// `|SL(3, F_q)| = q^3 (q^2 - 1)(q^3 - 1)`.
fn sl3_order(q: u64) -> BigInt {
    let q = BigInt::from(q);
    q.pow(3) * (q.pow(2) - 1) * (q.pow(3) - 1)
}

fn is_square_mod(a: u64, p: u64) -> bool {
    (0..p).any(|x| x * x % p == a % p)
}

// ------------------------------------------------------------- criteria

fn unit_machinery() -> Outcome {
    // (defining polynomial, integral basis rows, field discriminant)
    let cases: [(i64, Option<Vec<Vec<BigRational>>>, i64); 3] = [
        (2, None, 8),
        (3, None, 12),
        (5, Some(vec![vec![q(1, 1), q(0, 1)], vec![q(1, 2), q(1, 2)]]), 5),
    ];
    for (d, basis, disc) in cases {
        let k = NumberField::new(vec![BigInt::from(-d), BigInt::zero(), BigInt::one()], basis).unwrap();
        ensure(k.discriminant() == &BigInt::from(disc), format!("disc of Q(sqrt{d})"))?;
        let eps = fundamental_unit_real_quadratic(&k).map_err(|e| e.to_string())?;
        let (x, y) = brute_pell(disc).ok_or("no Pell solution below 10^4")?;
        // (x + y sqrt(D)) / 2 with sqrt(D) = (D / d)^(1/2) sqrt(d)
        let scale = (disc / d).sqrt();
        let sqrt_d = FieldElement::generator(&k);
        let oracle = &(&FieldElement::from_int(&k, x) + &(&FieldElement::from_int(&k, y * scale) * &sqrt_d))
            / &int(&k, 2);
        let same = eps == oracle || eps == -&oracle || (&eps * &oracle).is_one() || (&eps * &oracle) == int(&k, -1);
        ensure(same, format!("d = {d}: {eps} vs oracle {oracle}"))?;
    }
    let shipped: [&[i64]; 5] = [&[-2, 0, 1], &[1, 0, 1], &[1, 0, 0, 0, 1], &[-2, 0, 0, 1], &[1, -3, 0, 1]];
    for c in shipped {
        let k = field(c);
        let r1 = grid_real_roots(c);
        let r2 = (c.len() - 1 - r1) / 2;
        ensure(k.unit_rank() + 1 == r1 + r2, format!("unit rank of {c:?}"))?;
    }
    Ok("d in {2,3,5} match brute-force Pell; 5 unit ranks match".into())
}

fn theta_index() -> Outcome {
    let k = field(&[-2, 0, 1]);
    let theta = &int(&k, 1) + &FieldElement::generator(&k);
    // theta^r = a + b sqrt2 by the integer recurrence; Z[theta^r] has basis
    // {1, a + b sqrt2}, so its index is |b|
    let (mut a, mut b) = (BigInt::one(), BigInt::zero());
    let mut values = Vec::new();
    for r in 1..=12u32 {
        (a, b) = (&a + &b * 2, &a + &b);
        let got = subring_index(&theta, r).map_err(|e| e.to_string())?;
        ensure(got == SubringIndex::Finite(b.abs()), format!("r = {r}: {got} vs {b}"))?;
        values.push(b.to_string());
    }
    Ok(format!("indices {}", values.join(",")))
}

fn word_identities() -> Outcome {
    let k = field(&[-2, 0, 1]);
    let theta = &int(&k, 1) + &FieldElement::generator(&k);
    let targets = vec![int(&k, 1), FieldElement::generator(&k)];
    let cert = elementary_words(&theta, &MatN::e12(&int(&k, 1)), 1, &targets, None).map_err(|e| e.to_string())?;
    let alphabet = cert.alphabet().map_err(|e| e.to_string())?;
    for e in &cert.entries {
        let m = e.word.eval(&alphabet).map_err(|e| e.to_string())?;
        ensure(m == MatN::e12(&e.achieved()), format!("word for {} evaluates to {m}", e.target))?;
        // the conjugated letters contribute sum n_m theta^(2m)
        let mut sum = FieldElement::zero(&k);
        let mut conj = 0i64;
        for (name, exp) in &e.word.letters {
            match name.as_str() {
                "h" => conj += exp,
                "u+" => sum = &sum + &(&int(&k, *exp) * &theta.pow(2 * conj).unwrap()),
                other => return Err(format!("unexpected letter {other}")),
            }
        }
        ensure(sum == e.achieved(), "letter sum disagrees with the target multiple")?;
    }
    // N O_K is reached constructively since each basis target's multiple divides N
    let n = cert.n.clone();
    ensure(cert.entries.iter().all(|e| (&n % &e.multiple).is_zero()), "N is not a common multiple")?;
    ensure(cert.n_contained(), "HNF containment of N O_K failed")?;
    // the lattice generated by theta^(2m) is {a + 2b sqrt2}: index 2
    ensure(n == BigInt::from(2), format!("N = {n}, expected 2"))?;
    Ok(format!("N = {n}, word lengths {:?}", cert.word_lengths()))
}

fn bruhat() -> Outcome {
    let k = field(&[-2, 0, 1]);
    let theta = &int(&k, 1) + &FieldElement::generator(&k);
    let gens = [
        MatN::e12(&int(&k, 1)),
        MatN::e21(&int(&k, 1)),
        MatN::torus2(&theta).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let mut done = 0;
    while done < 200 {
        let mut g = MatN::identity(&k, 2);
        for _ in 0..rng.gen_range(1..8) {
            let s = &gens[rng.gen_range(0..3)];
            let e = rng.gen_range(-2i64..=2);
            g = &g * &s.pow(e).unwrap();
        }
        if g.get(1, 0).is_zero() {
            continue;
        }
        let f = bruhat_decompose(&g).map_err(|e| e.to_string())?;
        ensure(!f.is_borel && f.recompose() == g, format!("round trip failed for {g}"))?;
        done += 1;
    }
    // display for u_-^r = [[1, 0], [r alpha, 1]] with alpha = i
    let e = field(&[1, 0, 0, 0, 1]);
    let alpha = FieldElement::generator(&e).pow(2).unwrap();
    for r in 1..=3 {
        let ra = &int(&e, r) * &alpha;
        let inv = ra.inv().unwrap();
        let f = bruhat_decompose(&MatN::e21(&ra))
            .map_err(|e| e.to_string())?
            .with_convention(WeylConvention::Negated);
        let one = int(&e, 1);
        let zero = int(&e, 0);
        let expected = [
            MatN::from_rows(&e, vec![vec![one.clone(), inv.clone()], vec![zero.clone(), one.clone()]]).unwrap(),
            MatN::from_rows(&e, vec![vec![-&inv, zero.clone()], vec![zero.clone(), -&ra]]).unwrap(),
            MatN::from_rows(&e, vec![vec![zero.clone(), one.clone()], vec![-&one, zero.clone()]]).unwrap(),
            MatN::from_rows(&e, vec![vec![one.clone(), inv.clone()], vec![zero, one]]).unwrap(),
        ];
        let got = [&f.u1, &f.torus, &f.weyl, &f.u2];
        ensure(got.iter().zip(&expected).all(|(a, b)| *a == b), format!("display mismatch at r = {r}"))?;
    }
    Ok("200 round trips, display reproduced for r = 1, 2, 3".into())
}

fn congruence_surjectivity() -> Outcome {
    let k = field(&[-2, 0, 1]);
    let cert = select_theta(&k, &UnitSource::Pell, DEFAULT_R_MAX).map_err(|e| e.to_string())?;
    let triple = build_noncm(&k, &cert, 1).map_err(|e| e.to_string())?;
    let borel = triple.without("u-");
    let opts = CertifyOptions::default();
    let mut orders = Vec::new();
    for p in [3u64, 5, 7] {
        let expected = if is_square_mod(2, p) { sl2_order(p).pow(2) } else { sl2_order(p * p) };
        let (res, _) = closure_mod_p(&triple.matrices(), p as u32, &opts).map_err(|e| e.to_string())?;
        ensure(res.ambient_order == expected, format!("ambient mod {p}: {} vs {expected}", res.ambient_order))?;
        ensure(res.surjective == Surjectivity::Yes, format!("not surjective mod {p}"))?;
        ensure(
            res.index.clone().unwrap() * BigInt::from(res.subgroup_order) == expected,
            format!("Lagrange mod {p}"),
        )?;
        let (b, _) = closure_mod_p(&borel.matrices(), p as u32, &opts).map_err(|e| e.to_string())?;
        ensure(b.surjective == Surjectivity::No, format!("Borel control surjective mod {p}"))?;
        ensure(b.lagrange_holds(), format!("Lagrange for control mod {p}"))?;
        orders.push(format!("mod {p}: {} (control {})", res.subgroup_order, b.subgroup_order));
    }
    Ok(orders.join("; "))
}

fn zeta8() -> CmPair {
    let e = field(&[1, 0, 0, 0, 1]);
    let z = FieldElement::generator(&e);
    CmPair::new(e, field(&[-2, 0, 1]), &z - &z.pow(3).unwrap()).unwrap()
}

fn cm_pipeline() -> Outcome {
    let cm = zeta8();
    let e = cm.field.clone();
    let z = FieldElement::generator(&e);
    let i = z.pow(2).unwrap();
    let cert = select_theta(&cm.subfield, &UnitSource::Pell, DEFAULT_R_MAX).map_err(|e| e.to_string())?;
    let triple = build_cm(&cm, &i, &cert, 1).map_err(|e| e.to_string())?;
    ensure(triple.get("u-") == Some(&MatN::e21(&i)), "u- is not [[1,0],[i,1]]")?;
    // complex conjugation on Q(zeta_8): z -> z^-1 = -z^3
    let bar = -z.pow(3).unwrap();
    let eps = &int(&cm.subfield, 1) + &FieldElement::generator(&cm.subfield);
    let mut pairs = 0;
    'outer: for (a, b, c, d) in [
        (0, 1, 0, 0),
        (1, 1, 0, 0),
        (0, 1, 1, 0),
        (1, 0, 1, 1),
        (0, 2, 0, 1),
        (1, 1, 1, 0),
        (0, 1, 0, 2),
        (1, 2, 0, 0),
        (2, 1, 1, 0),
        (0, 3, 1, 1),
        (1, 0, 2, 1),
    ] {
        let x = &(&int(&e, a) + &(&int(&e, b) * &z)) + &(&(&int(&e, c) * &i) + &(&int(&e, d) * &z.pow(3).unwrap()));
        let xb = x.substitute(&bar);
        let t = &x + &xb;
        let n = &x * &xb;
        let (Some(tf), Some(_)) = (cm.restrict(&t), cm.restrict(&n)) else {
            return Err("trace or norm outside the subfield".into());
        };
        if tf.is_zero() || cm.contains(&x) {
            continue;
        }
        let (_, base) = congruent_unit_power(&cm, &eps, &x).map_err(|e| e.to_string())?;
        for j in 1..=2 {
            let theta_f = base.pow(j).unwrap();
            ensure(
                (&theta_f - &int(&cm.subfield, 1)).checked_div(&tf).unwrap().is_integral(),
                "theta is not 1 mod t",
            )?;
            let el = cmprime_g_element(&cm, &x, &theta_f).map_err(|e| e.to_string())?;
            let th = cm.embed(&theta_f);
            let th_inv = th.inv().unwrap();
            let s = &(&th - &int(&e, 1)) / &t;
            let g = &(&MatN::e21(&-(&x * &th_inv)) * &MatN::e12(&s)) * &MatN::e21(&x);
            ensure(g == el.g, "product element disagrees with the oracle")?;
            ensure(*g.get(0, 0) == &int(&e, 1) + &(&x * &s), "a formula")?;
            ensure(*g.get(1, 0) == &(&n * &(&int(&e, 1) - &th_inv)) / &t, "c formula")?;
            ensure(!cm.contains(g.get(0, 0)) && cm.contains(g.get(1, 0)), "a in F or c not in F")?;
            ensure(!g.get(1, 0).is_zero() && g.det().is_one(), "c = 0 or det != 1")?;
            pairs += 1;
            if pairs == 20 {
                break 'outer;
            }
        }
    }
    ensure(pairs == 20, format!("only {pairs} admissible pairs"))?;
    Ok("build_cm ok; formulas hold on 20 pairs".into())
}

fn su21() -> Outcome {
    let e = field(&[1, 0, 0, 0, 1]);
    let z = FieldElement::generator(&e);
    let conj = Conjugation::new(-&z).map_err(|e| e.to_string())?;
    let sqrt2 = &z - &z.pow(3).unwrap();
    let setting = Su21Setting::new(conj.clone(), sqrt2.clone()).map_err(|e| e.to_string())?;
    let i = z.pow(2).unwrap();
    let t = &int(&e, 1) + &i;
    let theta = &int(&e, 3) + &(&int(&e, 2) * &sqrt2);
    for r in 1..=2 {
        let triple = build_su21(&setting, &t, &theta, r).map_err(|e| e.to_string())?;
        for (name, g) in &triple.gens {
            ensure(setting.check(g), format!("{name} fails the form check"))?;
        }
    }
    // every U+(tZ) generator against every U+(Z) generator; for upper
    // unitriangular A, B with (2,3) entry -conj((1,2)), the commutator is
    // I + (a1 c2 - a2 c1) e13
    let mut pairs = 0;
    let mut gens_t = Vec::new();
    let mut gens_1 = Vec::new();
    for x in -3i64..=3 {
        for p in -3i64..=3 {
            for qq in -3i64..=3 {
                if x == 0 || x.abs() + p.abs() + qq.abs() > 3 {
                    continue;
                }
                let u = &int(&e, p) + &(&int(&e, qq) * &sqrt2);
                gens_t.push(setting.full_generator(&t, x, &u).map_err(|e| e.to_string())?);
                gens_1.push(setting.full_generator(&int(&e, 1), x, &u).map_err(|e| e.to_string())?);
                if p == 0 && qq == 0 {
                    gens_t.push(setting.center_generator(&t, x).map_err(|e| e.to_string())?);
                    gens_1.push(setting.center_generator(&int(&e, 1), x).map_err(|e| e.to_string())?);
                }
            }
        }
    }
    let denom = &t * &sqrt2;
    for g in &gens_t {
        ensure(setting.check(g), "U+(tZ) generator not unitary")?;
        for h in &gens_1 {
            let c = &(&(g * h) * &g.inverse().unwrap()) * &h.inverse().unwrap();
            let w = &(g.get(0, 1) * h.get(1, 2)) - &(h.get(0, 1) * g.get(1, 2));
            ensure(c == MatN::elementary(&e, 3, 0, 2, &w), "commutator is not central unipotent")?;
            let k = (&w / &denom).as_rational().ok_or("w/(t sqrt z) not rational")?;
            ensure(k.is_integer(), "w/(t sqrt z) not an integer")?;
            pairs += 1;
        }
    }
    // homomorphism on 100 random pairs with entries in Z[i]
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let random = |rng: &mut ChaCha8Rng| {
        let mut g = MatN::identity(&e, 2);
        for _ in 0..rng.gen_range(1..5) {
            let x = &int(&e, rng.gen_range(-3..=3)) + &(&int(&e, rng.gen_range(-3..=3)) * &i);
            g = &g * &if rng.gen_bool(0.5) { MatN::e12(&x) } else { MatN::e21(&x) };
        }
        g
    };
    for _ in 0..100 {
        let (g1, g2) = (random(&mut rng), random(&mut rng));
        let f1 = setting.from_sl2(&g1).unwrap();
        let f2 = setting.from_sl2(&g2).unwrap();
        ensure(setting.from_sl2(&(&g1 * &g2)).unwrap() == &f1 * &f2, "f not multiplicative")?;
        ensure(setting.from_sl2(&g1.inverse().unwrap()).unwrap() == f1.inverse().unwrap(), "f(g^-1)")?;
        ensure(setting.check(&f1), "image outside SU(2,1)")?;
    }
    Ok(format!("{pairs} commutator pairs, 100 homomorphism pairs"))
}

fn sl3_multone() -> Outcome {
    let qf = NumberField::rationals();
    let g = MatN::from_ints(&qf, &[&[2, 1], &[1, 1]]).unwrap();
    let x = [int(&qf, 1), int(&qf, 1)];
    let (triple, wedge) = build_sln_multone(&g, &x, &[0, 1]).map_err(|e| e.to_string())?;
    // vectors x = (1, 1) and g x = (3, 2)
    let oracle = 1 * 2 - 1 * 3;
    ensure(wedge.upper_det == oracle.to_string(), format!("wedge det {} vs {oracle}", wedge.upper_det))?;
    let opts = CertifyOptions::default();
    let mut out = Vec::new();
    for p in [2u64, 3] {
        let (res, _) = closure_mod_p(&triple.matrices(), p as u32, &opts).map_err(|e| e.to_string())?;
        ensure(res.ambient_order == sl3_order(p), format!("ambient mod {p}"))?;
        ensure(res.surjective == Surjectivity::Yes && res.lagrange_holds(), format!("mod {p}"))?;
        out.push(format!("SL(3,F{p}) = {}", res.subgroup_order));
    }
    Ok(format!("wedge det {}; {}", wedge.upper_det, out.join(", ")))
}

fn finite_group_core() -> Outcome {
    let qf = NumberField::rationals();
    let one = int(&qf, 1);
    let mut out = Vec::new();
    for p in [2u32, 3, 5, 7] {
        let ring = ResidueRing::new(&qf, p, false).map_err(|e| e.to_string())?;
        let (amb, _) = ambient_order(&ring, 2, DEFAULT_ENUM_CAP).map_err(|e| e.to_string())?;
        ensure(amb == sl2_order(u64::from(p)), format!("enumeration mod {p}"))?;
        let gens: Vec<ResidueMat> = [MatN::e12(&one), MatN::e21(&one)]
            .iter()
            .map(|g| reduce_mod(g, &ring).unwrap())
            .collect();
        let res = closure(&gens, &ring, &amb, DEFAULT_CLOSURE_CAP).map_err(|e| e.to_string())?;
        ensure(BigInt::from(res.subgroup_order) == amb, format!("closure mod {p}"))?;
        ensure(res.lagrange_holds(), format!("Lagrange mod {p}"))?;
        out.push(format!("q={p}: {amb}"));
    }
    Ok(out.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("unit machinery", 1, unit_machinery),
        ("theta subring index", 1, theta_index),
        ("word identities", 5, word_identities),
        ("bruhat", 5, bruhat),
        ("congruence surjectivity", 60, congruence_surjectivity),
        ("cm pipeline", 10, cm_pipeline),
        ("su(2,1)", 10, su21),
        ("sl(3) multone", 30, sl3_multone),
        ("finite-group core", 60, finite_group_core),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (label, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if label == "FAIL" {
            failed += 1;
        }
        println!("{label} {name} [{:.2}s / {budget}s] {detail}", elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

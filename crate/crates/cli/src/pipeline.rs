use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;

use trigen_core::construct::{
    build_cm, build_cmprime, build_noncm, build_sln_multone, build_su21, elementary_words, ConstructError,
    ElementaryCertificate,
};
use trigen_core::matgroup::{Conjugation, MatN, Su21Setting};
use trigen_core::numberfield::{CmPair, FieldElement, FieldRef, Irreducibility};
use trigen_core::units::{select_theta, ThetaCertificate, UnitSource};
use trigen_core::verify::{
    certify, certify_su21, closure_mod_p, verdict_from, CertifyOptions, ElementaryEvidence, NamedCheck, PrimeClosure,
};
use trigen_core::{CaseTag, GeneratorTriple, Verdict};

use crate::cache::{self, Cache};
use crate::config::{cm_pair, element, unit_source, CaseConfig, FieldConfig, FieldTable, JobConfig, UnitsConfig};
use crate::report::{
    matrices, ElementaryReport, JobInputs, JobReport, PrimeReport, Report, Summary, ThetaReport, Timings,
    REPORT_VERSION,
};
use crate::CliError;

/// Settings that come from the command line rather than the config.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

/// `--cache` wins over the environment, which wins over the config file.
pub fn resolve_cache_dir(flag: Option<&PathBuf>, cfg: &JobConfig) -> Option<PathBuf> {
    flag.cloned()
        .or_else(|| std::env::var_os(cache::CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.cache_dir.clone())
}

struct Ctx<'a> {
    cfg: &'a JobConfig,
    table: FieldTable,
    cache: Option<Cache>,
    opts: CertifyOptions,
}

/// One unit of work: a case on a field at one power `r`.
struct Job<'a> {
    case: &'a CaseConfig,
    r: u32,
}

pub fn run(cfg: &JobConfig, opts: &RunOptions) -> Result<Report, CliError> {
    let start = Instant::now();
    let table = FieldTable::build(cfg)?;
    let cache = match resolve_cache_dir(opts.cache_dir.as_ref(), cfg) {
        Some(dir) => Some(Cache::open(&dir).map_err(|e| CliError::Input(format!("cache {}: {e}", dir.display())))?),
        None => None,
    };
    let ctx = Ctx {
        cfg,
        table,
        cache,
        opts: cfg.options(),
    };
    let jobs: Vec<Job> = cfg
        .cases
        .iter()
        .flat_map(|case| {
            // the SL(n) construction has no power parameter
            let rs: Vec<u32> = if case.case == CaseTag::SlnMultone { vec![1] } else { cfg.r_values.clone() };
            rs.into_iter().map(move |r| Job { case, r })
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Input(format!("worker pool: {e}")))?;
    let results: Vec<(JobReport, u64, usize)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let t = Instant::now();
                let (rep, hits) = run_job(&ctx, job);
                (rep, t.elapsed().as_millis() as u64, hits)
            })
            .collect()
    });

    let mut summary = Summary::default();
    let mut timings = Timings::default();
    let mut reports = Vec::with_capacity(results.len());
    for (rep, ms, hits) in results {
        match rep.verdict {
            Verdict::Pass => summary.pass += 1,
            Verdict::Fail { .. } => summary.fail += 1,
            Verdict::Unknown { .. } => summary.unknown += 1,
        }
        timings.jobs_ms.push(ms);
        timings.cache_hits += hits;
        reports.push(rep);
    }
    timings.total_ms = start.elapsed().as_millis() as u64;
    Ok(Report {
        version: REPORT_VERSION.to_string(),
        jobs: reports,
        summary,
        timings,
    })
}

/// Everything a construction produced before certification.
struct Built {
    triple: GeneratorTriple,
    theta: Option<ThetaCertificate>,
    elementary: Option<ElementaryCertificate>,
    embedding: Option<CmPair>,
    extra_checks: Vec<NamedCheck>,
    su21: Option<(Su21Setting, FieldElement, i64)>,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn field_fingerprint(k: &FieldRef) -> String {
    let poly: Vec<String> = k.defining_poly().iter().map(|c| c.to_string()).collect();
    let basis: Vec<String> = k
        .integral_basis()
        .iter()
        .map(|row| row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    format!("{}|{}", poly.join(","), basis.join(";"))
}

fn theta_for(ctx: &Ctx, k: &FieldRef, f: &FieldConfig, hits: &mut usize) -> Result<ThetaCertificate, String> {
    if k.degree() == 1 {
        return Err(err(ConstructError::RationalField));
    }
    if k.unit_rank() == 0 {
        return Err(err(ConstructError::UnitRankZero));
    }
    let source = unit_source(k, f.units.as_ref()).map_err(err)?;
    let compute = || select_theta(k, &source, ctx.cfg.r_max).map(|c| ThetaReport::from_cert(&c));
    let report = match &ctx.cache {
        None => compute().map_err(err)?,
        Some(cache) => {
            let units = serde_json::to_string(&f.units.clone().unwrap_or(UnitsConfig::Pell)).map_err(err)?;
            let key = cache::key("theta", &[&field_fingerprint(k), &units, &ctx.cfg.r_max.to_string()]);
            let (rep, hit) = cache.get_or_insert(&key, compute).map_err(err)?;
            *hits += usize::from(hit);
            rep
        }
    };
    theta_from_report(k, &report)
}

fn theta_from_report(k: &FieldRef, rep: &ThetaReport) -> Result<ThetaCertificate, String> {
    let indices = rep
        .indices
        .iter()
        .map(|(r, i)| i.parse::<BigInt>().map(|i| (*r, i)).map_err(err))
        .collect::<Result<_, _>>()?;
    Ok(ThetaCertificate {
        theta: FieldElement::parse_basis_coords(k, &rep.theta).map_err(err)?,
        r_checked: rep.r_checked,
        indices,
        full_degree: rep.full_degree.clone(),
    })
}

fn basis_elements(k: &FieldRef) -> Vec<FieldElement> {
    let d = k.degree();
    (0..d)
        .map(|i| {
            let mut v = vec![0i64; d];
            v[i] = 1;
            FieldElement::from_basis_ints(k, &v).expect("unit vector")
        })
        .collect()
}

/// Words reaching `E12(N x)` for the integral basis of the field `theta` lives in.
fn words_for(theta: &ThetaCertificate, r: u32) -> Result<ElementaryCertificate, String> {
    let k = theta.theta.field();
    let one = FieldElement::one(k);
    elementary_words(&theta.theta, &MatN::e12(&one), r, &basis_elements(k), None).map_err(err)
}

fn build(ctx: &Ctx, f: &FieldConfig, case: CaseTag, r: u32, hits: &mut usize) -> Result<Built, String> {
    let k = ctx.table.get(&f.name).map_err(err)?;
    let mut built = match case {
        CaseTag::Sl2NonCm => {
            let theta = theta_for(ctx, k, f, hits)?;
            let triple = build_noncm(k, &theta, r).map_err(err)?;
            Built {
                elementary: Some(words_for(&theta, r)?),
                triple,
                theta: Some(theta),
                embedding: None,
                extra_checks: Vec::new(),
                su21: None,
            }
        }
        CaseTag::Sl2Cm | CaseTag::Sl2CmPrime => {
            let cm = cm_pair(&ctx.table, f).map_err(err)?;
            let sub_name = f.subfield.as_deref().expect("validated");
            let sub_cfg = ctx.cfg.field(sub_name).expect("validated");
            let theta = theta_for(ctx, &cm.subfield, sub_cfg, hits)?;
            let mut extra_checks = Vec::new();
            let triple = if case == CaseTag::Sl2Cm {
                let alpha = element(k, f.alpha.as_ref().expect("validated"), "alpha").map_err(err)?;
                build_cm(&cm, &alpha, &theta, r).map_err(err)?
            } else {
                let x = element(k, f.x.as_ref().expect("validated"), "x").map_err(err)?;
                let (triple, g) = build_cmprime(&cm, &x, &theta, r).map_err(err)?;
                extra_checks.push(NamedCheck::new(
                    "cmprime_element",
                    g.all_hold(),
                    format!(
                        "a formula {}, c formula {}, a outside subfield {}, c in subfield {}",
                        g.a_formula, g.c_formula, g.a_outside_subfield, g.c_in_subfield
                    ),
                ));
                triple
            };
            Built {
                elementary: Some(words_for(&theta, r)?),
                triple,
                theta: Some(theta),
                embedding: Some(cm),
                extra_checks,
                su21: None,
            }
        }
        CaseTag::Su21 => {
            let p = f.su21.as_ref().expect("validated");
            let conj = Conjugation::new(element(k, &p.conjugation, "conjugation").map_err(err)?).map_err(err)?;
            let sqrt_z = element(k, &p.sqrt_z, "sqrt_z").map_err(err)?;
            let setting = Su21Setting::new(conj, sqrt_z).map_err(err)?;
            let t = element(k, &p.t, "t").map_err(err)?;
            let theta = element(k, &p.theta, "theta").map_err(err)?;
            let triple = build_su21(&setting, &t, &theta, r).map_err(err)?;
            Built {
                triple,
                theta: None,
                elementary: None,
                embedding: None,
                extra_checks: Vec::new(),
                su21: Some((setting, t, p.height)),
            }
        }
        CaseTag::SlnMultone => {
            let p = f.sln.as_ref().expect("validated");
            let rows = p
                .levi
                .iter()
                .map(|row| row.iter().map(|c| element(k, c, "levi entry")).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            let g = MatN::from_rows(k, rows).map_err(err)?;
            let x = p
                .column
                .iter()
                .map(|c| element(k, c, "column entry"))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            let (triple, wedge) = build_sln_multone(&g, &x, &p.exponents).map_err(err)?;
            Built {
                triple,
                theta: None,
                elementary: None,
                embedding: None,
                extra_checks: vec![
                    NamedCheck::new("wedge_upper", wedge.upper_ok, format!("det {}", wedge.upper_det)),
                    NamedCheck::new("wedge_lower", wedge.lower_ok, format!("det {}", wedge.lower_det)),
                ],
                su21: None,
            }
        }
    };
    built.triple.provenance.insert("field_name".into(), f.name.clone());
    Ok(built)
}

fn closures(ctx: &Ctx, triple: &GeneratorTriple, hits: &mut usize) -> Vec<PrimeClosure> {
    let gens = triple.matrices();
    let fingerprint: String = {
        let mats = serde_json::to_string(&matrices(triple)).unwrap_or_default();
        format!("{}|{mats}", field_fingerprint(triple.field()))
    };
    let caps = format!("{}|{}", ctx.opts.closure_cap, ctx.opts.enum_cap);
    ctx.cfg
        .primes
        .iter()
        .map(|&p| {
            let fresh = || PrimeClosure {
                p,
                outcome: closure_mod_p(&gens, p, &ctx.opts),
            };
            let Some(cache) = &ctx.cache else {
                return fresh();
            };
            let key = cache::key("closure", &[&fingerprint, &p.to_string(), &caps]);
            if let Some(pc) = cache.get::<PrimeReport>(&key).and_then(|rep| rep.to_closure()) {
                *hits += 1;
                return pc;
            }
            let pc = fresh();
            // only completed closures are worth keeping
            if pc.outcome.is_ok() {
                cache.put(&key, &PrimeReport::from_closure(&pc));
            }
            pc
        })
        .collect()
}

fn run_job(ctx: &Ctx, job: &Job) -> (JobReport, usize) {
    let f = ctx.cfg.field(&job.case.field).expect("validated");
    let k = ctx.table.get(&f.name).expect("built");
    let mut hits = 0;
    let mut rep = JobReport {
        field: f.name.clone(),
        case: job.case.case,
        r: job.r,
        inputs: JobInputs {
            coefficients: k.defining_poly().iter().map(|c| c.to_string()).collect(),
            integral_basis: k
                .integral_basis()
                .iter()
                .map(|row| row.iter().map(trigen_core::numberfield::format_rational).collect())
                .collect(),
            subfield: f.subfield.clone(),
            primes: if job.case.case == CaseTag::Su21 { Vec::new() } else { ctx.cfg.primes.clone() },
            irreducibility_trusted: k.irreducibility() == Irreducibility::Trusted,
        },
        theta: None,
        generators: Vec::new(),
        provenance: Default::default(),
        elementary: None,
        checks: Vec::new(),
        closures: Vec::new(),
        verdict: Verdict::Pass,
        error: None,
    };
    let built = match build(ctx, f, job.case.case, job.r, &mut hits) {
        Ok(b) => b,
        Err(e) => {
            rep.verdict = Verdict::Fail {
                component: "construction".into(),
            };
            rep.error = Some(e);
            return (rep, hits);
        }
    };
    rep.generators = matrices(&built.triple);
    rep.provenance = built.triple.provenance.clone();
    rep.theta = built.theta.as_ref().map(ThetaReport::from_cert);
    rep.elementary = built.elementary.as_ref().map(ElementaryReport::from_cert);

    if let Some((setting, t, height)) = &built.su21 {
        let cert = certify_su21(&built.triple, setting, t, *height);
        rep.checks = cert.checks;
        rep.verdict = cert.verdict;
        return (rep, hits);
    }

    let evidence = built.elementary.as_ref().map(|cert| ElementaryEvidence {
        cert,
        embedding: built.embedding.as_ref(),
    });
    let cert = certify(&built.triple, &[], evidence, built.theta.as_ref(), &ctx.opts);
    let mut checks = cert.checks;
    checks.extend(built.extra_checks);
    let pcs = closures(ctx, &built.triple, &mut hits);
    for pc in &pcs {
        if let Ok((res, _)) = &pc.outcome {
            checks.push(NamedCheck::new(
                &format!("lagrange_mod_{}", pc.p),
                res.lagrange_holds(),
                format!("{} elements", res.subgroup_order),
            ));
        }
    }
    rep.verdict = verdict_from(&checks, &pcs);
    rep.checks = checks;
    rep.closures = pcs.iter().map(PrimeReport::from_closure).collect();
    (rep, hits)
}

/// Text for `field-info`: signature, unit rank and the theta certificate.
pub fn field_info(cfg: &JobConfig, name: &str) -> Result<String, CliError> {
    let f = cfg
        .field(name)
        .ok_or_else(|| CliError::Input(format!("no field named {name}")))?;
    let table = FieldTable::build(cfg)?;
    let k = table.get(name)?;
    let (r1, r2) = k.signature();
    let mut out = format!(
        "field {name}\n  degree {}\n  signature ({r1}, {r2})\n  discriminant {}\n  unit rank {}\n",
        k.degree(),
        k.discriminant(),
        k.unit_rank()
    );
    if k.irreducibility() == Irreducibility::Trusted {
        out.push_str("  irreducibility assumed (degree above 4)\n");
    }
    // CM fields take theta from their subfield
    let (tk, tf) = match &f.subfield {
        Some(s) => (table.get(s)?, cfg.field(s).expect("validated")),
        None => (k, f),
    };
    if tk.unit_rank() == 0 {
        out.push_str("  theta: none (unit rank 0)\n");
        return Ok(out);
    }
    let source = unit_source(tk, tf.units.as_ref())?;
    match select_theta(tk, &source, cfg.r_max) {
        Ok(c) => {
            let src = if matches!(source, UnitSource::Pell) { "pell" } else { "config" };
            out.push_str(&format!("  theta {} (from {}, {src})\n", c.theta, tf.name));
            for (r, i) in &c.indices {
                out.push_str(&format!("    r = {r:>2}  index {i}\n"));
            }
        }
        Err(e) => out.push_str(&format!("  theta: {e}\n")),
    }
    Ok(out)
}

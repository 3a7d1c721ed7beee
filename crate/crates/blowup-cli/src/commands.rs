use std::collections::BTreeMap;

use serde_json::{json, Value};

use blowup_coh::blowup::{count_exponent, enumerate_u_tau_sigma, proper_subsets, Catalog, TauSet};
use blowup_coh::building::{
    apartment_ball, apartment_identity_check, exponent_profile, neighbors_of_standard, stability_corresponds,
};
use blowup_coh::divisor::{build_divisor, DivisorSpec, InvariantDivisor};
use blowup_coh::engine::{ladder_hypotheses, verify, Engine};
use blowup_coh::field::prime_power;
use blowup_coh::logforms::{
    atau, gamma_valuations, log_basis, log_basis_rank, log_basis_size, omega_s_identities, p_s, steinberg_dim, Sampling,
};
use blowup_coh::qcomb::gaussian_binomial;
use blowup_coh::weights::{ceil_identity_check, certify_global_vanishing, derive_weight_data, Weight};
use blowup_coh::{oracle, Error, Field};

use crate::args::{
    BuildingArgs, Common, CountsArgs, DivisorArgs, GlobnullArgs, IdentityArgs, List, LogformsArgs, SteinbergArgs,
};
use crate::report::{CrossCheck, Outcome, Report};

/// Errors that end a command without a report, exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Library(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Library(e)
    }
}

type CliResult = Result<Outcome, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// Turns collected problems into an outcome. Verification failures only
/// count when `--verify` was given.
fn finish(report: Report, common: &Common, violation: Option<String>, mismatches: Vec<String>) -> Outcome {
    if common.verify && !mismatches.is_empty() {
        Outcome::VerifyFailed(report, mismatches.join("; "))
    } else if let Some(v) = violation {
        Outcome::Violation(report, v)
    } else {
        Outcome::Success(report)
    }
}

fn field(common: &Common) -> Result<Field, CliError> {
    Ok(Field::new(common.q)?)
}

fn pow_u64(q: u32, e: usize) -> Option<u64> {
    u64::from(q).checked_pow(e as u32)
}

fn oracle_h(spec: &DivisorSpec, f: &Field) -> Result<[i64; 3], CliError> {
    let cat = Catalog::new(f, spec.d);
    let class = oracle::pic_class(&build_divisor(spec, &cat)?, f)?;
    let (a, b, c) = oracle::h_all(&class, f)?;
    Ok([a, b, c])
}

fn tau_set(members: &[usize], d: usize, allow_zero: bool) -> Result<TauSet, CliError> {
    let lo = usize::from(!allow_zero);
    if let Some(&bad) = members.iter().find(|&&i| i < lo || i > d) {
        return usage(format!("index {bad} is outside {lo}..={d}"));
    }
    Ok(TauSet::from_slice(members))
}

fn divisor_spec(a: &DivisorArgs) -> Result<(DivisorSpec, Option<TauSet>), CliError> {
    if let Some(List(tau)) = &a.tau {
        let Some(d) = a.d else { return usage("--tau needs --d") };
        let d = d as usize;
        let t = tau_set(tau, d, false)?;
        return Ok((DivisorSpec::new(atau(t, d)?, vec![0; d], vec![0; d])?, Some(t)));
    }
    let Some(List(abar)) = &a.abar else { return usage("give --tau or --abar") };
    let d = abar.len();
    if a.d.is_some_and(|x| x as usize != d) {
        return usage(format!("--d is {} but --abar has {d} entries", a.d.unwrap_or(0)));
    }
    let n = a.n.clone().map(|l| l.0).unwrap_or_else(|| vec![0; d]);
    let m = a.m.clone().map(|l| l.0).unwrap_or_else(|| vec![0; d]);
    if n.len() != d || m.len() != d {
        return usage(format!("--abar, --n and --m must all have {d} entries"));
    }
    Ok((DivisorSpec::new(abar.clone(), n, m)?, None))
}

fn divisor_parameters(spec: &DivisorSpec, tau: Option<TauSet>, common: &Common) -> Value {
    json!({
        "d": spec.d,
        "q": common.q,
        "tau": tau.map(|t| t.members()),
        "abar": spec.abar,
        "n": spec.n,
        "m": spec.m,
        "verify": common.verify,
    })
}

pub fn dims(a: &DivisorArgs) -> CliResult {
    let (spec, tau) = divisor_spec(a)?;
    if spec.d > 6 {
        return usage("dims supports d <= 6");
    }
    let f = field(&a.common)?;
    let mut report = Report::new("dims", divisor_parameters(&spec, tau, &a.common));
    let oracle = if spec.d <= 2 { Some(oracle_h(&spec, &f)?) } else { None };
    let mut engine = Engine::with_field(f);
    let mut mismatches = Vec::new();
    let expected = tau.and_then(|t| pow_u64(a.common.q, t.members().iter().sum()));
    let violation = match engine.h0_dim(&spec) {
        Ok((h0, cert)) => {
            report.results = json!({
                "spec": spec,
                "h0": h0,
                "vanishingFrom": cert.claim.vanishing_from,
                "expectedH0": expected,
            });
            if let Err(e) = verify(&cert) {
                mismatches.push(format!("certificate does not replay: {e}"));
            }
            report.certificates.push(cert.to_json());
            if let Some(e) = expected {
                if h0 != e as i64 {
                    mismatches.push(format!("h0 = {h0} but q^(sum tau) = {e}"));
                }
            }
            if let Some(h) = oracle {
                let agree = h == [h0, 0, 0];
                if !agree {
                    mismatches.push(format!("oracle cohomology {h:?} differs from ({h0}, 0, 0)"));
                }
                report.oracle_cross_checks.push(CrossCheck {
                    quantity: "h0 with vanishing higher cohomology".into(),
                    engine: json!([h0, 0, 0]),
                    oracle: json!(h),
                    agree,
                });
            }
            None
        }
        Err(Error::NoApplicableRule(msg)) => {
            report.results = json!({ "spec": spec, "h0": null, "failure": msg });
            if let Some(h) = oracle {
                report.oracle_cross_checks.push(CrossCheck {
                    quantity: "cohomology, engine makes no claim".into(),
                    engine: Value::Null,
                    oracle: json!(h),
                    agree: true,
                });
            }
            Some(format!("higher cohomology is not certified to vanish: {msg}"))
        }
        Err(e) => return Err(e.into()),
    };
    Ok(finish(report, &a.common, violation, mismatches))
}

pub fn oracle(a: &DivisorArgs) -> CliResult {
    let (spec, tau) = divisor_spec(a)?;
    if spec.d > 2 {
        return usage("the surface oracle needs d <= 2");
    }
    let f = field(&a.common)?;
    let cat = Catalog::new(&f, spec.d);
    let class = oracle::pic_class(&build_divisor(&spec, &cat)?, &f)?;
    let (h0, h1, h2) = oracle::h_all(&class, &f)?;
    let mut report = Report::new("oracle", divisor_parameters(&spec, tau, &a.common));
    report.results = json!({
        "spec": spec,
        "h": [h0, h1, h2],
        "eulerCharacteristic": h0 - h1 + h2,
        "class": class,
    });
    let chi = Engine::with_field(f).euler_characteristic(&InvariantDivisor::from_spec(&spec));
    let agree = chi == h0 - h1 + h2;
    report.oracle_cross_checks.push(CrossCheck {
        quantity: "Euler characteristic".into(),
        engine: json!(chi),
        oracle: json!(h0 - h1 + h2),
        agree,
    });
    let mismatches =
        if agree { vec![] } else { vec![format!("engine chi {chi} differs from oracle {}", h0 - h1 + h2)] };
    Ok(finish(report, &a.common, None, mismatches))
}

pub fn certify_globnull(a: &GlobnullArgs) -> CliResult {
    let d = a.lambda.0.len();
    if d == 0 {
        return usage("--lambda needs at least one entry");
    }
    if a.d.is_some_and(|x| x as usize != d) {
        return usage(format!("--d is {} but --lambda has {d} entries", a.d.unwrap_or(0)));
    }
    if d > 4 {
        return usage("certify-globnull supports d <= 4");
    }
    let lambda = Weight::new(a.lambda.0.clone());
    if !lambda.is_dominant() {
        return usage(format!("highest weight {:?} is not dominant", lambda.a));
    }
    let dim = blowup_coh::weights::weyl_dimension(&lambda)?;
    if dim > a.common.budget {
        return Err(Error::BudgetExceeded { needed: dim, budget: a.common.budget }.into());
    }
    let f = field(&a.common)?;
    let mut engine = Engine::with_field(f);
    let mut result = certify_global_vanishing(&mut engine, &lambda, d <= 2)?;
    let mut report = Report::new(
        "certify-globnull",
        json!({ "d": d, "q": a.common.q, "lambda": lambda.a, "verify": a.common.verify }),
    );
    let mut mismatches = Vec::new();
    for w in &mut result.weights {
        let certified = w.certificate.is_some();
        if let Some(cert) = w.certificate.take() {
            if let Err(e) = verify(&cert) {
                mismatches.push(format!("certificate for {:?} does not replay: {e}", w.mu.a));
            }
            report.certificates.push(json!({ "mu": w.mu, "certificate": cert.to_json() }));
        }
        if let Some(h) = w.oracle {
            let agree = !certified || (h[1] == 0 && h[2] == 0);
            if !agree {
                mismatches.push(format!("weight {:?} certified but oracle gives {h:?}", w.mu.a));
            }
            report.oracle_cross_checks.push(CrossCheck {
                quantity: format!("higher cohomology of weight {:?}", w.mu.a),
                engine: json!({ "certified": certified }),
                oracle: json!(h),
                agree,
            });
        }
    }
    let violation = if result.succeeded {
        None
    } else if let Some(v) = &result.violation {
        Some(format!("not strongly dominant: weight {:?} fails at index {}", v.mu.a, v.j))
    } else {
        Some("some graded piece has no vanishing certificate".into())
    };
    report.results = serde_json::to_value(&result).expect("reports serialize");
    Ok(finish(report, &a.common, violation, mismatches))
}

const RANK_LIMIT: u128 = 64;
const EXHAUSTIVE_LIMIT: u64 = 2048;

pub fn logforms(a: &LogformsArgs) -> CliResult {
    let (d, s) = (a.d as usize, a.s as usize);
    if s > d {
        return usage(format!("--s must be at most --d = {d}"));
    }
    let q = a.common.q;
    let f = field(&a.common)?;
    let size = log_basis_size(s, d, u64::from(q))?;
    if size > a.common.budget {
        return Err(Error::BudgetExceeded { needed: size, budget: a.common.budget }.into());
    }
    let group = pow_u64(q, d * (d + 1) / 2).zip(pow_u64(q - 1, d + 1)).map(|(u, t)| u + t);
    let sampling = match group {
        Some(n) if n <= EXHAUSTIVE_LIMIT => Sampling::Exhaustive,
        _ => Sampling::Seeded { count: 16, seed: a.seed },
    };
    let mut report =
        Report::new("logforms", json!({ "d": d, "q": q, "s": s, "seed": a.seed, "verify": a.common.verify }));
    let enumerated = log_basis(s, d, &f)?.len() as u128;
    let rank = if size <= RANK_LIMIT { Some(log_basis_rank(s, d, &f)? as u128) } else { None };
    let omega = omega_s_identities(s, d, &f, sampling, a.common.budget)?;
    let gammas = if d <= 2 { Some(gamma_valuations(&f, d, a.common.budget)?) } else { None };

    let mut engine = Engine::with_field(f.clone());
    let mut graded = Vec::new();
    let mut mismatches = Vec::new();
    for tau in p_s(d, s) {
        let spec = DivisorSpec::new(atau(tau, d)?, vec![0; d], vec![0; d])?;
        let (h0, cert) = engine.h0_dim(&spec)?;
        if let Err(e) = verify(&cert) {
            mismatches.push(format!("certificate for tau {:?} does not replay: {e}", tau.members()));
        }
        report.certificates.push(json!({ "tau": tau.members(), "certificate": cert.to_json() }));
        if d <= 2 {
            let h = oracle_h(&spec, &f)?;
            let agree = h == [h0, 0, 0];
            if !agree {
                mismatches.push(format!("tau {:?}: oracle {h:?}, engine h0 {h0}", tau.members()));
            }
            report.oracle_cross_checks.push(CrossCheck {
                quantity: format!("graded piece tau = {:?}", tau.members()),
                engine: json!([h0, 0, 0]),
                oracle: json!(h),
                agree,
            });
        }
        graded.push(json!({ "tau": tau.members(), "h0": h0 }));
    }
    let graded_sum: i64 = graded.iter().map(|g| g["h0"].as_i64().unwrap_or(0)).sum();

    let mut failures = omega.failures.clone();
    if enumerated != size {
        failures.push(format!("enumerated {enumerated} basis elements, expected {size}"));
    }
    if rank.is_some_and(|r| r != size) {
        failures.push(format!("basis has rank {} < {size}", rank.unwrap_or(0)));
    }
    if graded_sum as u128 != size {
        failures.push(format!("graded pieces sum to {graded_sum}, expected {size}"));
    }
    if let Some(rows) = &gammas {
        if let Some(r) = rows.iter().find(|r| r.valuation != r.formula) {
            failures.push(format!("gamma_{} has valuation {} where the formula gives {}", r.j, r.valuation, r.formula));
        }
    }
    report.results = json!({
        "basisSize": size as u64,
        "enumerated": enumerated as u64,
        "rank": rank.map(|r| r as u64),
        "gradedH0": graded,
        "gradedSum": graded_sum,
        "omega": omega,
        "gammaValuations": gammas,
    });
    let violation = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(finish(report, &a.common, violation, mismatches))
}

pub fn steinberg(a: &SteinbergArgs) -> CliResult {
    let (d, q) = (a.d as usize, u64::from(a.common.q));
    if prime_power(a.common.q).is_none() {
        return usage(format!("{q} is not a prime power"));
    }
    let degrees: Vec<usize> = match a.s {
        Some(s) if s as usize > d => return usage(format!("--s must be at most --d = {d}")),
        Some(s) => vec![s as usize],
        None => (0..=d).collect(),
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for s in degrees {
        let dim = log_basis_size(s, d, q)?;
        let moebius = steinberg_dim(d, q, s)?;
        if moebius != dim as i128 {
            failures.push(format!("s = {s}: {dim} against {moebius}"));
        }
        rows.push(json!({ "s": s, "dim": dim as u64, "moebiusDim": moebius as i64 }));
    }
    let mut report = Report::new("steinberg", json!({ "d": d, "q": q, "s": a.s, "verify": a.common.verify }));
    report.results = if a.s.is_some() { rows.remove(0) } else { json!({ "degrees": rows }) };
    let violation = (!failures.is_empty()).then(|| format!("dimension formulas disagree: {}", failures.join("; ")));
    Ok(finish(report, &a.common, violation, vec![]))
}

pub fn counts(a: &CountsArgs) -> CliResult {
    let d = a.d as usize;
    let q = a.common.q;
    let f = field(&a.common)?;
    let only = a.tau.as_ref().map(|t| tau_set(&t.0, d, true)).transpose()?;
    let mut remaining = a.common.budget;
    let (mut rows, mut bad, mut skipped) = (Vec::new(), 0, 0);
    let all = (0u32..1 << (d + 1)).map(TauSet);
    for sigma in all.clone() {
        for tau in all.clone().filter(|t| t.is_subset(sigma) && only.is_none_or(|o| o == *t)) {
            let e = count_exponent(d, tau, sigma);
            let formula = pow_u64(q, e);
            let enumerated = match formula {
                Some(n) if u128::from(n) <= remaining => {
                    remaining -= u128::from(n);
                    Some(enumerate_u_tau_sigma(&f, d, tau, sigma)?.len() as u64)
                }
                _ => {
                    skipped += 1;
                    None
                }
            };
            if enumerated.is_some() && enumerated != formula {
                bad += 1;
            }
            rows.push(json!({
                "tau": tau.members(),
                "sigma": sigma.members(),
                "exponent": e,
                "formula": formula,
                "enumerated": enumerated,
            }));
        }
    }
    let orbits: u64 = proper_subsets(d).into_iter().map(|t| blowup_coh::engine::orbit_size(d, t, q)).sum();
    let mut report = Report::new(
        "counts",
        json!({ "d": d, "q": q, "tau": a.tau.as_ref().map(|t| &t.0), "budget": a.common.budget.to_string(), "verify": a.common.verify }),
    );
    report.results = json!({
        "pairs": rows.len(),
        "mismatches": bad,
        "skippedOverBudget": skipped,
        "boundaryComponents": orbits,
        "rows": rows,
    });
    let violation = (bad > 0).then(|| format!("{bad} counts disagree with the formula"));
    Ok(finish(report, &a.common, violation, vec![]))
}

const NEIGHBOR_LIST_LIMIT: usize = 64;
const STABILITY_LIMIT: usize = 200;

pub fn building(a: &BuildingArgs) -> CliResult {
    let d = a.d as usize;
    let q = a.common.q;
    let f = field(&a.common)?;
    let expected: u128 =
        (1..=d as i64).map(|r| gaussian_binomial(d as i64 + 1, r, u64::from(q))).sum::<Result<u128, _>>()?;
    if expected > a.common.budget {
        return Err(Error::BudgetExceeded { needed: expected, budget: a.common.budget }.into());
    }
    let nbrs = neighbors_of_standard(&f, d, a.common.budget)?;
    let mut by_type: BTreeMap<String, usize> = BTreeMap::new();
    for n in &nbrs {
        *by_type.entry(format!("{:?}", n.tau.members())).or_default() += 1;
    }
    let mut failures = Vec::new();
    if nbrs.len() as u128 != expected {
        failures.push(format!("{} neighbors, expected {expected}", nbrs.len()));
    }
    let stability = if nbrs.len() <= STABILITY_LIMIT {
        let mut checked = 0u64;
        let mut disagree = 0u64;
        for (i, x) in nbrs.iter().enumerate() {
            for y in &nbrs[i..] {
                let set: Vec<_> =
                    if x == y { vec![x.lattice.clone()] } else { vec![x.lattice.clone(), y.lattice.clone()] };
                checked += 1;
                if !stability_corresponds(&f, &set) {
                    disagree += 1;
                }
            }
        }
        if disagree > 0 {
            failures.push(format!("{disagree} sets where lattice and component stability differ"));
        }
        json!({ "checked": checked, "disagree": disagree })
    } else {
        Value::Null
    };
    let profiles = match a.lambda.as_ref().map(|l| &l.0) {
        None => Value::Null,
        Some(l) if l.len() != d => return usage(format!("--lambda must have {d} entries")),
        Some(l) => {
            let mu = Weight::new(l.clone());
            let ball = apartment_ball(d, 1);
            let table = ball
                .iter()
                .map(|z| Ok(json!({ "z": z, "profile": exponent_profile(&mu, z)? })))
                .collect::<Result<Vec<Value>, Error>>()?;
            let shifts: Vec<Vec<i64>> = (0..3usize.pow(d as u32 + 1))
                .map(|mut c| {
                    (0..=d)
                        .map(|_| {
                            let x = (c % 3) as i64 - 1;
                            c /= 3;
                            x
                        })
                        .collect()
                })
                .collect();
            let mut checks = 0u64;
            let mut bad = 0u64;
            for z in &ball {
                for g in &shifts {
                    checks += 1;
                    if !apartment_identity_check(&mu, g, z)? {
                        bad += 1;
                    }
                }
            }
            if bad > 0 {
                failures.push(format!("{bad} translation identities fail"));
            }
            json!({ "weight": mu, "ball": table, "translationChecks": checks, "translationFailures": bad })
        }
    };
    let list = (nbrs.len() <= NEIGHBOR_LIST_LIMIT).then_some(&nbrs);
    let mut report = Report::new(
        "building",
        json!({ "d": d, "q": q, "lambda": a.lambda.as_ref().map(|l| &l.0), "verify": a.common.verify }),
    );
    report.results = json!({
        "neighbors": nbrs.len(),
        "expectedNeighbors": expected as u64,
        "byType": by_type,
        "neighborList": list,
        "stability": stability,
        "profiles": profiles,
    });
    let violation = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(finish(report, &a.common, violation, vec![]))
}

const WEIGHT_BOUND: i64 = 6;
const SWEEP_MAX_D: usize = 4;

pub fn check_identities(a: &IdentityArgs) -> CliResult {
    let d = a.d as usize;
    let weights: Vec<Weight> = match a.lambda.as_ref().map(|l| &l.0) {
        Some(l) if l.len() != d => return usage(format!("--lambda must have {d} entries")),
        Some(l) => vec![Weight::new(l.clone())],
        None if d > SWEEP_MAX_D => vec![],
        None => {
            let side = (2 * WEIGHT_BOUND + 1) as u64;
            (0..side.pow(d as u32))
                .map(|mut c| {
                    Weight::new(
                        (0..d)
                            .map(|_| {
                                let x = (c % side) as i64 - WEIGHT_BOUND;
                                c /= side;
                                x
                            })
                            .collect(),
                    )
                })
                .collect()
        }
    };
    let (mut checks, mut violations) = (0u64, Vec::new());
    for mu in &weights {
        if derive_weight_data(mu).delta_scaled == 0 {
            continue;
        }
        for sigma in proper_subsets(d) {
            checks += 1;
            if !ceil_identity_check(mu, sigma)? {
                violations.push(json!({ "mu": mu, "sigma": sigma.members() }));
            }
        }
    }
    let den = d as i64 + 1;
    let floors: Vec<Value> = (0..den)
        .map(|k| {
            let mut w = vec![0; d];
            w[0] = (den - k) % den;
            let data = derive_weight_data(&Weight::new(w));
            let spec = DivisorSpec { d, abar: vec![0; d], n: data.n.clone(), m: data.m.clone() };
            let bounded = data.n.iter().all(|&x| -(d as i64) <= x && x <= 0) && data.m.iter().all(|&x| x >= 0);
            let hypotheses = ladder_hypotheses(&spec).err();
            json!({
                "delta": format!("{k}/{den}"),
                "n": data.n,
                "m": data.m,
                "holds": bounded && hypotheses.is_none(),
                "failure": hypotheses,
            })
        })
        .collect();
    let floor_failures = floors.iter().filter(|v| v["holds"] == json!(false)).count();
    let mut report = Report::new(
        "check-identities",
        json!({ "d": d, "lambda": a.lambda.as_ref().map(|l| &l.0), "weightBound": WEIGHT_BOUND, "verify": a.common.verify }),
    );
    let shown: Vec<Value> = violations.iter().take(20).cloned().collect();
    report.results = json!({
        "weights": weights.len(),
        "ceilingChecks": checks,
        "ceilingViolations": violations.len(),
        "firstViolations": shown,
        "floorVectors": floors,
    });
    let violation = (!violations.is_empty() || floor_failures > 0)
        .then(|| format!("{} ceiling identities and {floor_failures} floor vectors fail", violations.len()));
    Ok(finish(report, &a.common, violation, vec![]))
}

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};

use primpair::arith::{split_prime_power, ExactRational, FactorCache, FactorConfig, Factorizer};
use primpair::bounds::{self, SieveCertificate};
use primpair::ff::{BuildOptions, FieldCtx};
use primpair::published;
use primpair::verify::{self, Budget, PairVerdict, RunManifest, VerdictStatus};

use crate::output::{emit, Report};
use crate::{Cli, Command, Failure, Format};

const PLACES: usize = 10;

pub fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let factorizer = factorizer(cli)?;
    let (report, code) = match &cli.command {
        Command::Factor { n } => (factor(n, &factorizer)?, ExitCode::SUCCESS),
        Command::Check { q, m, n } => (check(*q, *m, *n, &factorizer)?, ExitCode::SUCCESS),
        Command::Sieve { q, m, n } => (sieve(*q, *m, *n, &factorizer)?, ExitCode::SUCCESS),
        Command::Appendix2 { range } => (appendix2(range.as_deref(), &factorizer)?, ExitCode::SUCCESS),
        Command::Scan { n } => (scan(*n, &factorizer)?, ExitCode::SUCCESS),
        Command::Table1 { n } => (table1(*n), ExitCode::SUCCESS),
        Command::Verify {
            q,
            m,
            n,
            sample,
            exhaustive,
            alpha_limit,
        } => {
            let mut budget = Budget {
                seed: cli.seed,
                ..Budget::default()
            };
            if let Some(limit) = cli.budget_enum {
                budget.f_limit = limit;
            }
            if let Some(limit) = alpha_limit {
                budget.alpha_limit = *limit;
            }
            if let Some(count) = sample {
                if *count == 0 {
                    return Err(Failure::Input("--sample must be positive".into()));
                }
                budget.samples = *count;
                budget.f_limit = 0;
            }
            if *exhaustive {
                budget.f_limit = u128::MAX;
            }
            let (report, undecided) = verify_pair(cli, *q, *m, *n, budget, &factorizer)?;
            (report, if undecided { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }
        Command::Crosscheck { p, k, m, trials } => (crosscheck(cli, *p, *k, *m, *trials)?, ExitCode::SUCCESS),
    };
    if let Some(cache) = factorizer.cache() {
        cache.save().map_err(|e| Failure::Input(format!("saving cache: {e}")))?;
    }
    emit(&report.render(cli.format), cli.out.as_deref())?;
    Ok(code)
}

fn factorizer(cli: &Cli) -> Result<Factorizer> {
    let mut config = FactorConfig::default();
    if let Some(b) = cli.budget_factor {
        if b == 0 {
            bail!("--budget-factor must be positive");
        }
        config.rho_budget = b;
    }
    let f = Factorizer::new(config);
    Ok(match &cli.cache {
        Some(path) => f.with_cache(FactorCache::open(path).context("opening cache")?),
        None => f,
    })
}

fn down(x: &ExactRational) -> String {
    x.to_decimal_truncated(PLACES)
}

/// Decimal rounded up after [`PLACES`] digits, for upper bounds.
fn up(x: &ExactRational) -> String {
    let scale = BigInt::from(10u32).pow(PLACES as u32);
    let scaled = (x.numer() * &scale + x.denom() - 1u32) / x.denom();
    let frac = (&scaled % &scale).to_string();
    format!("{}.{:0>PLACES$}", &scaled / &scale, frac)
}

fn parse_n(s: &str) -> Result<BigUint> {
    s.parse::<BigUint>().map_err(|_| anyhow!("{s:?} is not a positive integer"))
}

fn factor(n: &str, fz: &Factorizer) -> Result<Report> {
    let n = parse_n(n)?;
    let f = fz.factor(&n)?;
    let mut primes = Vec::new();
    for (p, e) in f.factors() {
        for _ in 0..*e {
            primes.push(p.to_string());
        }
    }
    let rows = f
        .factors()
        .iter()
        .map(|(p, e)| vec![json!(p.to_string()), json!(e)])
        .collect();
    let mut r = Report::table(vec!["prime", "exponent"], rows, primes.join(" "));
    let factors: Vec<Value> = f.factors().iter().map(|(p, e)| json!([p.to_string(), e])).collect();
    r.json = Some(vec![json!({"n": n.to_string(), "factors": factors})]);
    Ok(r)
}

fn prime_power(q: u64) -> Result<()> {
    match split_prime_power(q) {
        Some(_) => Ok(()),
        None => bail!("{q} is not a prime power"),
    }
}

fn check(q: u64, m: u32, n: u32, fz: &Factorizer) -> Result<Report> {
    prime_power(q)?;
    let order = bounds::factor_group_order(q, m, fz)?;
    let c = bounds::main_condition(q, m, n, &order.squarefree_divisor_count())?;
    let verdict = if c.passes { "PASS" } else { "FAIL" };
    let mut text = format!("{verdict} q={q} m={m} n={n} omega={} W={}", order.omega(), c.w);
    if c.equality {
        text.push_str(" equality");
    }
    let row = vec![
        json!(q),
        json!(m),
        json!(n),
        json!(order.omega()),
        json!(c.w.to_string()),
        json!(c.lhs.to_string()),
        json!(c.rhs.to_string()),
        json!(c.passes),
        json!(c.equality),
    ];
    Ok(Report::table(
        vec!["q", "m", "n", "omega", "W", "lhs", "rhs", "passes", "equality"],
        vec![row],
        text,
    ))
}

const CERT_HEADERS: [&str; 9] = ["m", "sr_no", "q", "l", "s", "delta_gt", "big_delta_lt", "passes", "ok"];

fn cert_row(sr_no: Value, c: &SieveCertificate, ok: Value) -> Vec<Value> {
    vec![
        json!(c.m),
        sr_no,
        json!(c.q),
        json!(c.l().to_string()),
        json!(c.s),
        json!(down(&c.delta)),
        c.big_delta.as_ref().map(|d| json!(up(d))).unwrap_or(Value::Null),
        json!(c.passes),
        ok,
    ]
}

fn cert_text(c: &SieveCertificate) -> String {
    format!(
        "m={} q={} l={} s={} delta>{} Delta<{}",
        c.m,
        c.q,
        c.l(),
        c.s,
        down(&c.delta),
        c.big_delta.as_ref().map(up).unwrap_or_else(|| "inf".into())
    )
}

fn sieve(q: u64, m: u32, n: u32, fz: &Factorizer) -> Result<Report> {
    prime_power(q)?;
    let order = bounds::factor_group_order(q, m, fz)?;
    Ok(match bounds::certificate_search(q, m, n, &order) {
        Some(c) => Report::table(CERT_HEADERS.to_vec(), vec![cert_row(Value::Null, &c, Value::Null)], cert_text(&c)),
        None => {
            let mut r = Report::table(CERT_HEADERS.to_vec(), vec![], "none".into());
            r.json = Some(vec![json!({"q": q, "m": m, "n": n, "certificate": null})]);
            r
        }
    })
}

fn parse_range(s: Option<&str>) -> Result<(u32, u32)> {
    let Some(s) = s else {
        return Ok((0, u32::MAX));
    };
    let bad = || anyhow!("range {s:?} must look like 7 or 7..12");
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        }
        None => {
            let m = s.parse().map_err(|_| bad())?;
            Ok((m, m))
        }
    }
}

fn appendix2(range: Option<&str>, fz: &Factorizer) -> Result<Report> {
    let (lo, hi) = parse_range(range)?;
    let listed: Vec<_> = published::appendix2()?
        .into_iter()
        .filter(|r| (lo..=hi).contains(&r.m))
        .collect();
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut failures = 0;
    for r in &listed {
        let check = bounds::check_listed_certificate(r.q, r.m, 2, r.l, r.s, &r.delta(), &r.big_delta(), fz)?;
        let ok = check.all_ok();
        if !ok {
            failures += 1;
        }
        text.push_str(&format!(
            "{:>3} {} {}\n",
            r.sr_no,
            cert_text(&check.certificate),
            if ok { "ok" } else { "MISMATCH" }
        ));
        rows.push(cert_row(json!(r.sr_no), &check.certificate, json!(ok)));
    }
    text.push_str(&format!("{} rows, {} mismatched\n", listed.len(), failures));
    Ok(Report::table(CERT_HEADERS.to_vec(), rows, text))
}

fn scan(n: u32, fz: &Factorizer) -> Result<Report> {
    let cascade = bounds::threshold_cascade(n);
    let entries = bounds::scan_main_condition(&cascade, fz)?;
    let mut text = String::new();
    let mut current = None;
    for e in &entries {
        if current != Some(e.m) {
            if current.is_some() {
                text.push('\n');
            }
            text.push_str(&format!("m={}:", e.m));
            current = Some(e.m);
        }
        text.push_str(&format!(" {}{}", e.q, if e.equality { "*" } else { "" }));
    }
    text.push_str(&format!("\n{} pairs (* equality)\n", entries.len()));
    let rows = entries
        .iter()
        .map(|e| vec![json!(e.m), json!(e.q), json!(e.omega), json!(e.equality)])
        .collect();
    Ok(Report::table(vec!["m", "q", "omega", "equality"], rows, text))
}

fn table1(n: u32) -> Report {
    let mut text = String::new();
    let mut rows = Vec::new();
    for (i, r) in bounds::table1_rows(n).iter().enumerate() {
        let delta = down(&r.delta_lower);
        let big = r.big_delta_upper.as_ref().map(up);
        let bound = r.bound_value.as_ref().map(BigInt::to_string);
        text.push_str(&format!(
            "{} a={} b={} W(l)={} delta>{} Delta<{} bound<{}\n",
            i + 1,
            r.a,
            r.b,
            r.w_l,
            delta,
            big.as_deref().unwrap_or("inf"),
            bound.as_deref().unwrap_or("-")
        ));
        rows.push(vec![
            json!(i + 1),
            json!(r.a),
            json!(r.b),
            json!(r.w_l.to_string()),
            json!(delta),
            big.map(Value::from).unwrap_or(Value::Null),
            bound.map(Value::from).unwrap_or(Value::Null),
        ]);
    }
    Report::table(vec!["sr_no", "a", "b", "w_l", "delta_gt", "big_delta_lt", "bound_lt"], rows, text)
}

fn manifest(cli: &Cli, budget: Budget, contexts: Vec<primpair::ff::CtxDescription>) -> RunManifest {
    RunManifest {
        command: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cli.seed,
        budget,
        contexts,
    }
}

fn write_manifest(cli: &Cli, m: &RunManifest) -> Result<()> {
    if let Some(out) = &cli.out {
        let mut path = out.clone().into_os_string();
        path.push(".manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(m)?)?;
    }
    Ok(())
}

fn verify_pair(cli: &Cli, q: u64, m: u32, n: u32, budget: Budget, fz: &Factorizer) -> Result<(Report, bool)> {
    let v: PairVerdict = verify::resolve_pair(q, m, n, &budget, fz)?;
    let man = manifest(cli, budget, v.ctx.iter().cloned().collect());
    write_manifest(cli, &man)?;
    let status = serde_json::to_value(v.status)?;
    let witness = v.witness.as_ref().map(|w| format!("{} a={} b={}", w.f, w.a, w.b));
    let text = format!(
        "{} q={q} m={m} n={n}: {}{}",
        status.as_str().unwrap_or_default(),
        v.coverage,
        witness.as_ref().map(|w| format!("; witness {w}")).unwrap_or_default()
    );
    let row = vec![
        json!(q),
        json!(m),
        json!(n),
        status,
        json!(v.coverage),
        witness.map(Value::from).unwrap_or(Value::Null),
    ];
    let mut r = Report::table(vec!["q", "m", "n", "status", "coverage", "witness"], vec![row], text);
    r.json = Some(vec![json!({"verdict": v, "manifest": man})]);
    Ok((r, v.status == VerdictStatus::Undecided))
}

fn crosscheck(cli: &Cli, p: u32, k: u32, m: u32, trials: usize) -> Result<Report> {
    if trials == 0 {
        bail!("trials must be positive");
    }
    let ctx = FieldCtx::build(p, k, m, BuildOptions::default())?;
    let rep = verify::crosscheck_identity(&ctx, trials, cli.seed)?;
    let man = manifest(cli, Budget { seed: cli.seed, ..Budget::default() }, vec![rep.ctx.clone()]);
    write_manifest(cli, &man)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for t in &rep.trials {
        text.push_str(&format!(
            "f={} a={} b={} l1={} l2={} brute={} characters={:.6}\n",
            t.f, t.a, t.b, t.l1, t.l2, t.brute_force, t.via_characters
        ));
        rows.push(vec![
            json!(t.f),
            json!(t.a),
            json!(t.b),
            json!(t.l1),
            json!(t.l2),
            json!(t.brute_force),
            json!(t.via_characters),
            json!(t.deviation),
        ]);
    }
    text.push_str(&format!(
        "{} trials, max deviation {:.3e}, {}\n",
        rep.trials.len(),
        rep.max_deviation,
        if rep.passes() { "agree" } else { "DISAGREE" }
    ));
    let mut r = Report::table(
        vec!["f", "a", "b", "l1", "l2", "brute_force", "via_characters", "deviation"],
        rows,
        text,
    );
    if cli.format == Format::Json {
        let mut lines: Vec<Value> = rep.trials.iter().map(|t| json!(t)).collect();
        lines.push(json!({"max_deviation": rep.max_deviation, "passes": rep.passes(), "manifest": man}));
        r.json = Some(lines);
    }
    Ok(r)
}

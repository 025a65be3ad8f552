use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use kcfix::conditions::{classify as classify_map, MinAlpha};
use kcfix::io::Instance;
use kcfix::metric::{random_space, FiniteMetricSpace, SelfMap};
use kcfix::picard::{
    default_finite_max_iter, solve_finite, solve_fixture, ContinuousFixture, MarginVerdict, Status, StopReason,
    DEFAULT_FIXTURE_MAX_ITER, FIXTURE_NAMES,
};
use kcfix::rational::{self, Rational};
use kcfix::sequences::{verify_lemma1, TestSequence};
use kcfix::verifier::{
    completeness_necessity_demo, run_sweep, search_counterexample, SearchConfig, SweepConfig, SweepMode, Theorem,
};

use crate::output::{Format, Records};
use crate::{ClassifyArgs, CliError, Demo, IterateArgs, MetricKind, SequencesArgs, Verdict, VerifyArgs};

/// Spaces up to this size have all `n^n` maps classified.
const ENUMERATION_LIMIT: usize = 6;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    Instance::parse_any(&text).map_err(|source| CliError::Input { path: path.into(), source })
}

fn alpha_cell(a: &MinAlpha) -> Value {
    match a {
        MinAlpha::Value { alpha } => Value::String(rational::format(alpha)),
        MinAlpha::Unbounded { .. } => Value::String("unbounded".into()),
    }
}

pub fn classify(args: &ClassifyArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let instance = match (&args.file, args.metric) {
        (Some(path), _) => read_instance(path)?,
        (None, Some(kind)) => {
            let n = args.points.ok_or_else(|| usage("--metric needs --points"))?;
            if n == 0 {
                return Err(usage("--points must be positive"));
            }
            let space = match kind {
                MetricKind::Unit => FiniteMetricSpace::discrete(n),
                MetricKind::Path => FiniteMetricSpace::path(n),
                MetricKind::Random => {
                    let seed = args.seed.ok_or_else(|| usage("--metric random needs --seed"))?;
                    random_space(n, args.max_value, seed)
                }
            };
            Instance::new(space, None)
        }
        (None, None) => return Err(usage("give an instance file or --metric with --points")),
    };
    let space = &instance.space;
    let maps: Vec<SelfMap> = match &instance.map {
        Some(m) => vec![m.clone()],
        None if space.len() <= ENUMERATION_LIMIT => SelfMap::enumerate(space.len()).collect(),
        None => {
            return Err(usage(format!(
                "{} points: give a map line, enumeration stops at {ENUMERATION_LIMIT} points",
                space.len()
            )))
        }
    };
    let mut records = Records::new(vec![
        "map",
        "fixed_points",
        "cm",
        "cm2",
        "kannan_alpha",
        "kannan",
        "chatterjea_alpha",
        "chatterjea",
        "banach_cjm",
        "global_kannan",
        "global_chatterjea",
        "picard_kannan",
        "picard_chatterjea",
    ]);
    for map in &maps {
        let r = classify_map(space, map);
        let fixed: Vec<String> = r.fixed_points.iter().map(|p| p.to_string()).collect();
        records.push(vec![
            json!(map.to_string()),
            json!(fixed.join(" ")),
            json!(r.cm.holds()),
            json!(r.cm2.holds()),
            alpha_cell(&r.kannan_alpha),
            json!(r.kannan),
            alpha_cell(&r.chatterjea_alpha),
            json!(r.chatterjea),
            json!(r.banach_cjm),
            json!(r.global_epsdelta_kannan.holds()),
            json!(r.global_epsdelta_chatterjea.holds()),
            json!(r.picard_kannan_all()),
            json!(r.picard_chatterjea_all()),
        ]);
    }
    records.write(args.format, out)?;
    Ok(Verdict::Pass)
}

fn status_line<P: std::fmt::Display>(status: &Status<P>) -> String {
    match status {
        Status::Converged { point, steps } => format!("converged point={point} steps={steps}"),
        Status::NoFixedPointDetected(StopReason::Cycle { entry, period }) => {
            format!("no fixed point: cycle entered at step {entry} with period {period}")
        }
        Status::NoFixedPointDetected(StopReason::MaxIter) => "no fixed point: iteration limit reached".into(),
        Status::NoFixedPointDetected(StopReason::LimitOutsideDomain { limit }) => {
            format!("no fixed point: iterates approach {} outside the domain", rational::format(limit))
        }
        Status::Diverged { step } => format!("diverged: left the domain at step {step}"),
    }
}

pub fn iterate(args: &IterateArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let mut records = Records::new(vec!["step", "point", "gap"]);
    let status = if let Some(name) = &args.fixture {
        let fixture = ContinuousFixture::named(name)
            .ok_or_else(|| usage(format!("unknown fixture {name:?}; available: {}", FIXTURE_NAMES.join(", "))))?;
        let x0 = rational::parse(&args.x0).map(|q| rational::to_f64(&q)).map_err(|e| usage(format!("--x0: {e}")))?;
        let run = solve_fixture(&fixture, x0, args.tol, args.max_iter.unwrap_or(DEFAULT_FIXTURE_MAX_ITER))
            .map_err(|e| usage(e.to_string()))?;
        for (k, gap) in run.gaps.iter().enumerate() {
            records.push(vec![json!(k), json!(run.points[k]), json!(gap)]);
        }
        status_line(&run.status)
    } else {
        let path = args.space.as_ref().expect("clap requires --fixture or --space");
        let instance = read_instance(path)?;
        let map = instance.map.ok_or_else(|| usage(format!("{}: no map line", path.display())))?;
        let x0: usize = args.x0.parse().map_err(|_| usage(format!("--x0 {:?} is not a point index", args.x0)))?;
        let max_iter = args.max_iter.unwrap_or_else(|| default_finite_max_iter(instance.space.len()));
        let run = solve_finite(&instance.space, &map, x0, max_iter).map_err(|e| usage(e.to_string()))?;
        // the zero gap at a fixed point is reported by the status line
        for (k, gap) in run.gaps.iter().enumerate().filter(|(_, g)| !rational::is_zero(g)) {
            records.push(vec![json!(k), json!(run.points[k]), json!(rational::format(gap))]);
        }
        status_line(&run.status)
    };
    match args.format {
        Format::Json => writeln!(out, "{}", json!({ "status": status }))?,
        _ => writeln!(out, "# status: {status}")?,
    }
    records.write(args.format, out)?;
    Ok(Verdict::Pass)
}

fn parse_theorems(spec: &str) -> Result<Vec<Theorem>, CliError> {
    if spec == "all" {
        return Ok(Theorem::ALL.to_vec());
    }
    let mut out: Vec<Theorem> = spec.split(',').map(|s| s.trim().parse().map_err(usage)).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn verify_demo(format: Format, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let demo = completeness_necessity_demo();
    if format == Format::Json {
        writeln!(out, "{}", serde_json::to_string(&demo)?)?;
    } else {
        let mut records =
            Records::new(vec!["fixture", "domain", "complete", "clause_i", "clause_ii", "fixed_point", "picard"]);
        for case in &demo.cases {
            let clause_i = match &case.clause_i {
                MarginVerdict::Certified { margin, delta_factor } => format!(
                    "certified (D <= {} S, delta = {} eps)",
                    rational::format(margin),
                    rational::format(delta_factor)
                ),
                MarginVerdict::Refuted(w) => format!("refuted at ({}, {})", w.i, w.j),
                MarginVerdict::HorizonLimited { horizon } => format!("horizon-limited ({horizon})"),
                MarginVerdict::TailExceedsMargin { bound } => {
                    format!("tail exceeds margin ({})", rational::format(bound))
                }
            };
            records.push(vec![
                json!(case.fixture),
                json!(case.domain),
                json!(case.complete),
                json!(clause_i),
                json!(case.clause_ii),
                json!(case.fixed_point.as_ref().map(rational::format).unwrap_or_else(|| "none".into())),
                json!(status_line(&case.picard)),
            ]);
        }
        records.write(format, out)?;
        writeln!(out, "verdict: {}", demo.verdict)?;
    }
    Ok(if demo.shows_necessity() { Verdict::Pass } else { Verdict::Violation })
}

fn verify_search(args: &VerifyArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let seed = args.seed.ok_or_else(|| usage("--search needs --seed"))?;
    let mut config = SearchConfig { trials: args.trials, seed, max_value: args.max_value, ..SearchConfig::default() };
    if !args.n.is_empty() {
        config.sizes = args.n.clone();
    }
    let outcome = search_counterexample(&config);
    if args.format == Format::Json {
        writeln!(out, "{}", serde_json::to_string(&outcome)?)?;
    } else {
        match &outcome.finding {
            None => writeln!(out, "exhausted: no finding in {} trials", outcome.trials)?,
            Some(f) => {
                writeln!(out, "finding at trial {}: {}", f.trial, f.invariant)?;
                if let Some(pair) = &f.pair {
                    writeln!(out, "witness pair: {pair}")?;
                }
                if let Some(inst) = &f.instance {
                    write!(out, "witness instance:\n{}", inst.to_text())?;
                }
            }
        }
    }
    Ok(if outcome.exhausted() { Verdict::Pass } else { Verdict::Violation })
}

pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    if args.demo == Some(Demo::Completeness) {
        return verify_demo(args.format, out);
    }
    if args.search {
        return verify_search(args, out);
    }
    let theorems = parse_theorems(&args.thm)?;
    let mut config = if args.random {
        let seed = args.seed.ok_or_else(|| usage("--random needs --seed"))?;
        if args.n.is_empty() {
            return Err(usage("--random needs --n"));
        }
        SweepConfig::random(args.n.clone(), args.trials, seed)
    } else {
        let bound = match args.n.as_slice() {
            [] => 3,
            [n] => *n,
            _ => return Err(usage("--exhaustive takes a single bound --n N")),
        };
        let mut c = SweepConfig::exhaustive((1..=bound).collect());
        c.mode = SweepMode::Exhaustive { pool_size: args.pool };
        c.seed = args.seed.unwrap_or(0);
        c
    };
    config.theorems = theorems;
    config.max_value = args.max_value;
    let report = run_sweep(&config).map_err(usage)?;
    if args.format == Format::Json {
        writeln!(out, "{}", serde_json::to_string(&report)?)?;
    } else {
        let mut outcomes = Records::new(vec![
            "theorem",
            "instances",
            "vacuous",
            "hypothesis_holders",
            "both_clauses",
            "violations",
            "result",
        ]);
        for o in &report.outcomes {
            outcomes.push(vec![
                json!(o.theorem.id()),
                json!(o.instances),
                json!(o.vacuous),
                json!(o.hypothesis_holders),
                json!(o.both_true),
                json!(o.violations.len()),
                json!(if o.passed() { "pass" } else { "FAIL" }),
            ]);
        }
        outcomes.write(args.format, out)?;
        writeln!(out)?;
        let mut census = Records::new(vec![
            "n",
            "instances",
            "cm",
            "cm2",
            "kannan_contraction",
            "chatterjea_contraction",
            "unique_fixed_point",
        ]);
        for row in &report.census {
            census.push(vec![
                json!(row.n),
                json!(row.instances),
                json!(row.cm),
                json!(row.cm2),
                json!(row.kannan_contraction),
                json!(row.chatterjea_contraction),
                json!(row.unique_fixed_point),
            ]);
        }
        census.write(args.format, out)?;
        for o in &report.outcomes {
            for v in &o.violations {
                writeln!(out, "\nviolation of {} at instance {}: {}", o.theorem, v.index, v.clause)?;
                write!(out, "{}", v.instance.to_text())?;
            }
        }
        writeln!(out, "\nnote: finite spaces are complete; use --demo completeness for an incomplete domain")?;
    }
    Ok(if report.passed() { Verdict::Pass } else { Verdict::Violation })
}

fn parse_list(flag: &str, values: &[String]) -> Result<Vec<Rational>, CliError> {
    values.iter().map(|v| rational::parse(v.trim()).map_err(|e| usage(format!("--{flag} {v:?}: {e}")))).collect()
}

pub fn sequences(args: &SequencesArgs, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let alphas = parse_list("alpha", &args.alpha)?;
    let cs = parse_list("c", &args.c)?;
    let rs = parse_list("r", &args.r)?;
    let mut family = Vec::new();
    for alpha in &alphas {
        for c in &cs {
            for r in &rs {
                family.push(
                    TestSequence::closed_form(alpha.clone(), c.clone(), r.clone()).map_err(|e| usage(e.to_string()))?,
                );
            }
        }
    }
    let report = verify_lemma1(&family);
    let mut records = Records::new(vec![
        "alpha", "c", "r", "i", "ii_k0", "ii_k1", "ii_k2", "ii_k5", "iii_k1", "iii_k2", "iii_k5", "iv", "v",
    ]);
    for row in &report.rows {
        let TestSequence::ClosedForm { alpha, c, r } = &row.sequence else {
            unreachable!("family is built from closed forms")
        };
        let mut cells = vec![json!(rational::format(alpha)), json!(rational::format(c)), json!(rational::format(r))];
        cells.push(json!(row.i));
        cells.extend(row.ii.iter().map(|(_, b)| json!(b)));
        cells.extend(row.iii.iter().map(|(_, b)| json!(b)));
        cells.push(json!(row.iv));
        cells.push(json!(row.v));
        records.push(cells);
    }
    records.write(args.format, out)?;
    for v in &report.violations {
        eprintln!("violation: sequence {} ({}): {}", v.index, v.sequence, v.message);
    }
    match report.strictness_witness {
        Some(i) => eprintln!("strictness witnessed by {}", family[i]),
        None => eprintln!("warning: strictness unwitnessed (no sequence with (i) true and (v) false)"),
    }
    Ok(if report.passed() { Verdict::Pass } else { Verdict::Violation })
}

//! Experiment bodies. Each one fills an [`Artifacts`] bundle.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::artifacts::{num, Artifacts, Csv, SchemaCsv};
use super::config::{Emit, EstimateChoice, ExperimentConfig, ExperimentKind, KronMethod};
use crate::apfun::{Frequency, FrequencyBasis, PolyFile, TrigPolynomial, Verdict};
use crate::contfrac::{big_ratio, expand_certified, ContinuedFraction, DiophantineProfile, TermSource};
use crate::dimension::{diophantine_estimate, estimate_from_ladder, DimensionEstimate, EstimateKind};
use crate::ergodic::{birkhoff, liouville_closeness, Region};
use crate::error::{Error, Result};
use crate::evolution::{integrate, transfer_check, ProblemFile};
use crate::exact::{parse_decimal, pow10, RatInterval};
use crate::kronecker::{solve_grid, solve_one_freq, KroneckerSystem, SolutionSet};
use crate::periods::{adaptive_scan, geometric_ladder, scan, scan_step, scan_with_step, PeriodScan};

pub const PERIODS_SUMMARY_SCHEMA: &str = "apdim.periods-summary.v1";
pub const DIM_REPORT_SCHEMA: &str = "apdim.dim-report.v1";
const DEFAULT_CF_DEPTH: usize = 30;
const DEFAULT_KRON_WINDOW: f64 = 1e4;
const ORACLE_GRID: usize = 1024;
const CLOSENESS_SAMPLES: usize = 100_001;
const MAX_TRAJECTORY_ROWS: usize = 10_000;

pub fn execute(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    match cfg.kind {
        ExperimentKind::Cf => cf(cfg, out),
        ExperimentKind::Eval => eval(cfg, out),
        ExperimentKind::Shiftdist => shiftdist(cfg, out),
        ExperimentKind::Kron => kron(cfg, out),
        ExperimentKind::Periods => periods(cfg, out).map(|_| ()),
        ExperimentKind::Dim => dim(cfg, out),
        ExperimentKind::Evolve => evolve(cfg, out),
        ExperimentKind::Liouville => liouville(cfg, out),
        ExperimentKind::FullPipeline => pipeline(cfg, out),
    }
}

/// Number description; decimal literals keep at most `digits` certified digits.
pub fn number_source(s: &str, digits: u32) -> Result<TermSource> {
    let src = TermSource::parse(s)?;
    if matches!(src, TermSource::Numeric { .. }) && !s.contains('/') {
        if let Ok(seed) = parse_decimal(s.trim()) {
            if seed.digits > digits {
                let ulp = BigRational::new(1.into(), pow10(digits));
                return Ok(TermSource::Numeric { seed: RatInterval::new(&seed.value - &ulp, &seed.value + &ulp) });
            }
        }
    }
    Ok(src)
}

fn required<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Validation(format!("missing {what}")))
}

fn load_poly(cfg: &ExperimentConfig) -> Result<TrigPolynomial> {
    PolyFile::load(required(&cfg.inputs.poly, "polynomial file (--poly)")?)?.build()
}

fn number_cf(cfg: &ExperimentConfig, depth: usize) -> Result<ContinuedFraction> {
    let s = required(&cfg.number, "number (--number / --omega)")?;
    expand_certified(&number_source(s, cfg.precision_digits)?, depth)
}

#[derive(Serialize)]
struct CfJson<'a> {
    schema: &'static str,
    number: &'a str,
    expansion: String,
    a0: String,
    terms: Vec<String>,
    convergents: Vec<(String, String)>,
    profile: Option<DiophantineProfile>,
}

fn cf(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let depth = cfg.depth.unwrap_or(DEFAULT_CF_DEPTH);
    let c = number_cf(cfg, depth)?;
    let conv = c.all_convergents();
    let profile = if c.len() >= 3 { Some(c.classify(c.len())?) } else { None };
    let emit = cfg.emit.unwrap_or(Emit::Both);
    if emit != Emit::Json {
        let mut csv = Csv::new("cf", &["k", "a_k", "p_k", "q_k", "b_k"]);
        for (k, ck) in conv.iter().enumerate() {
            let b = if k >= 1 && k + 1 < conv.len() { num(big_ratio(&conv[k + 1].q, &ck.q)) } else { String::new() };
            csv.row(&[k.to_string(), c.term(k).to_string(), ck.p.to_string(), ck.q.to_string(), b]);
        }
        out.add_csv(csv);
    }
    if emit != Emit::Csv {
        out.add_json(
            "cf.json",
            &CfJson {
                schema: "apdim.cf.v1",
                number: cfg.number.as_deref().unwrap_or_default(),
                expansion: c.to_string(),
                a0: c.a0().to_string(),
                terms: c.terms().iter().map(|a| a.to_string()).collect(),
                convergents: conv.iter().map(|x| (x.p.to_string(), x.q.to_string())).collect(),
                profile: profile.clone(),
            },
        );
    }
    out.line("number", cfg.number.as_deref().unwrap_or_default());
    out.line("terms", c.len());
    if let Some(p) = profile {
        out.line("nu_hat", num(p.nu_hat));
        out.line("g_property", p.g_property);
    }
    Ok(())
}

fn eval(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let p = load_poly(cfg)?;
    if cfg.times.is_empty() {
        return Err(Error::Validation("missing evaluation times (--t)".into()));
    }
    let mut csv = Csv::new("eval", &["t", "coord", "re", "im"]);
    for &t in &cfg.times {
        for (j, z) in p.evaluate(t)?.iter().enumerate() {
            csv.row(&[num(t), j.to_string(), num(z.re), num(z.im)]);
        }
    }
    out.add_csv(csv);
    out.line("points", cfg.times.len());
    out.line("dimension", p.dim());
    Ok(())
}

fn shiftdist(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let p = load_poly(cfg)?;
    if cfg.times.is_empty() {
        return Err(Error::Validation("missing shifts (--tau)".into()));
    }
    let mut csv = Csv::new("shiftdist", &["tau", "lo", "hi", "exact", "verdict"]);
    for &tau in &cfg.times {
        let d = p.shift_distance(tau);
        let verdict = match cfg.epsilon.map(|e| p.is_almost_period(tau, e)) {
            Some(Verdict::VerifiedYes) => "verified-yes",
            Some(Verdict::VerifiedNo) => "verified-no",
            Some(Verdict::Undecided) => "undecided",
            None => "",
        };
        csv.row(&[num(tau), num(d.lo), num(d.hi), d.exact.to_string(), verdict.to_string()]);
    }
    out.add_csv(csv);
    out.line("shifts", cfg.times.len());
    Ok(())
}

#[derive(Serialize)]
struct KronSummary {
    schema: &'static str,
    solves: Vec<KronSolve>,
}

#[derive(Serialize)]
struct KronSolve {
    delta: f64,
    count: usize,
    max_gap: f64,
    off_lattice: usize,
    method: KronMethod,
}

fn kron(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let c = number_cf(cfg, cfg.depth.unwrap_or(64))?;
    let deltas = if !cfg.delta_ladder.is_empty() {
        cfg.delta_ladder.clone()
    } else {
        vec![*required(&cfg.delta, "delta (--delta)")?]
    };
    let window = cfg.window.unwrap_or(DEFAULT_KRON_WINDOW);
    let method = cfg.method.unwrap_or(KronMethod::Convergent);
    let mut csv = Csv::new("kron", &["delta", "center", "half_width", "quality", "on_lattice"]);
    let mut summary = Vec::new();
    for &delta in &deltas {
        let set: SolutionSet = match method {
            KronMethod::Convergent => solve_one_freq(&c, delta, window)?,
            KronMethod::Grid => {
                // frequency 1 restricts τ to integers, as in the convergent solver
                let basis = FrequencyBasis::new(vec![Frequency::parse("1")?, Frequency::from_cf(&c)?])?;
                let step = delta / (4.0 * basis.max_abs().max(1.0));
                solve_grid(&KroneckerSystem::homogeneous(basis, delta)?, window, step, cfg.budget)?
            }
        };
        for s in &set.solutions {
            csv.row(&[num(delta), num(s.center), num(s.half_width()), num(s.quality), s.on_lattice.to_string()]);
        }
        out.line(&format!("delta {delta}"), format!("{} solutions, max gap {}", set.solutions.len(), set.max_gap));
        summary.push(KronSolve {
            delta,
            count: set.solutions.len(),
            max_gap: set.max_gap,
            off_lattice: set.off_lattice(),
            method,
        });
    }
    out.add_csv(csv);
    out.add_json("summary.json", &KronSummary { schema: "apdim.kron-summary.v1", solves: summary });
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub epsilon: f64,
    pub l_hat: f64,
    pub n_periods: usize,
    pub window: f64,
    pub step: f64,
    pub reliable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodsSummary {
    pub schema: String,
    pub scans: Vec<ScanSummary>,
    pub partial: bool,
}

fn ladder_of(cfg: &ExperimentConfig, default: Option<Vec<f64>>) -> Result<Vec<f64>> {
    if !cfg.epsilon_ladder.is_empty() {
        Ok(cfg.epsilon_ladder.clone())
    } else if let Some(e) = cfg.epsilon {
        Ok(vec![e])
    } else {
        default.ok_or_else(|| Error::Validation("missing --epsilon or --epsilon-ladder".into()))
    }
}

fn emit_periods(scans: &[PeriodScan], partial: bool, out: &mut Artifacts) {
    let mut periods = Csv::new("periods", &["epsilon", "tau", "quality", "gap"]);
    let mut ladder = Csv::new("ladder", &["epsilon", "l_hat", "n_periods", "window", "reliable"]);
    for s in scans {
        for (i, c) in s.clusters.iter().enumerate() {
            periods.row(&[num(s.epsilon), num(c.tau), num(c.quality), num(s.gaps[i + 1])]);
        }
        ladder.row(&[num(s.epsilon), num(s.l_hat), s.n_periods().to_string(), num(s.window), s.reliable.to_string()]);
    }
    out.add_csv(periods);
    out.add_csv(ladder);
    out.add_json(
        "summary.json",
        &PeriodsSummary {
            schema: PERIODS_SUMMARY_SCHEMA.into(),
            scans: scans
                .iter()
                .map(|s| ScanSummary {
                    epsilon: s.epsilon,
                    l_hat: s.l_hat,
                    n_periods: s.n_periods(),
                    window: s.window,
                    step: s.step,
                    reliable: s.reliable,
                })
                .collect(),
            partial,
        },
    );
}

/// Scans the ladder on one grid and window; on budget exhaustion the
/// completed scans are emitted and flagged partial before the error returns.
fn periods_of(p: &TrigPolynomial, cfg: &ExperimentConfig, ladder: &[f64], out: &mut Artifacts) -> Result<Vec<PeriodScan>> {
    let eps_min = ladder.iter().cloned().fold(f64::INFINITY, f64::min);
    let window = match cfg.window {
        Some(w) => w,
        None => adaptive_scan(p, eps_min, 16.0 / eps_min, 1e7, 10, cfg.budget)?.window,
    };
    let step = scan_step(eps_min, p.lipschitz());
    let mut scans = Vec::new();
    for &e in ladder {
        match scan_with_step(p, e, window, step, cfg.budget) {
            Ok(s) => scans.push(s),
            Err(err) => {
                if !scans.is_empty() {
                    emit_periods(&scans, true, out);
                }
                return Err(err);
            }
        }
    }
    emit_periods(&scans, false, out);
    for s in &scans {
        out.line(&format!("epsilon {}", s.epsilon), format!("l_hat {} ({} periods)", num(s.l_hat), s.n_periods()));
    }
    Ok(scans)
}

fn periods(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Vec<PeriodScan>> {
    let p = load_poly(cfg)?;
    periods_of(&p, cfg, &ladder_of(cfg, None)?, out)
}

#[derive(Serialize)]
struct DimReport<'a> {
    schema: &'a str,
    #[serde(flatten)]
    estimate: &'a DimensionEstimate,
}

/// `(ε, l_hat)` points from a periods summary or a ladder CSV.
pub fn read_ladder(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    let bad = |e: std::num::ParseFloatError| Error::Parse(format!("{}: {e}", path.display()));
    let (points, reliable): (Vec<(f64, f64)>, Vec<bool>) = if text.trim_start().starts_with('{') {
        let s: PeriodsSummary = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if s.schema != PERIODS_SUMMARY_SCHEMA {
            return Err(Error::Validation(format!("undeclared schema {:?}", s.schema)));
        }
        if s.partial {
            return Err(Error::Validation("periods summary is flagged partial".into()));
        }
        s.scans.iter().map(|x| ((x.epsilon, x.l_hat), x.reliable)).unzip()
    } else {
        let csv = SchemaCsv::parse(&text)?;
        if csv.schema != "apdim.ladder.v1" {
            return Err(Error::Validation(format!("dim consumes apdim.ladder.v1, got {}", csv.schema)));
        }
        let (e, l, r) = (csv.column("epsilon")?, csv.column("l_hat")?, csv.column("reliable")?);
        let mut pts = Vec::new();
        let mut rel = Vec::new();
        for row in &csv.rows {
            pts.push((row[e].parse().map_err(bad)?, row[l].parse().map_err(bad)?));
            rel.push(row[r] == "true");
        }
        (pts, rel)
    };
    if let Some(i) = reliable.iter().position(|r| !r) {
        return Err(Error::UnreliableScan { epsilon: points[i].0, reason: "fewer than three clusters in the window".into() });
    }
    Ok(points)
}

fn emit_estimate(est: &DimensionEstimate, out: &mut Artifacts) {
    out.add_json("report.json", &DimReport { schema: DIM_REPORT_SCHEMA, estimate: est });
    let d = match est.kind {
        EstimateKind::Generalized { d } => d,
        _ => 1.0,
    };
    let mut plot = Csv::headerless("plot", &["ln_inv_eps", "ln_l_hat"]);
    for &(e, v) in &est.ladder {
        plot.row(&[num((1.0 / e).ln().powf(d)), num(v.ln())]);
    }
    out.add_csv(plot);
    out.line("fit_slope", num(est.fit_slope));
    out.line("slope_upper", num(est.slope_upper));
    out.line("slope_lower", num(est.slope_lower));
    out.line("residual", num(est.residual));
}

fn dim(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let ladder = read_ladder(required(&cfg.inputs.periods, "periods input (--input)")?)?;
    let kind = match cfg.estimate.unwrap_or(EstimateChoice::Diophantine) {
        EstimateChoice::Diophantine => EstimateKind::Diophantine,
        EstimateChoice::Generalized => EstimateKind::Generalized { d: cfg.generalized_d.unwrap_or(1.0) },
    };
    let est = estimate_from_ladder(&ladder, kind, cfg.tail_start)?;
    emit_estimate(&est, out);
    Ok(())
}

#[derive(Serialize)]
struct EvolveSummary {
    schema: &'static str,
    transient_end: f64,
    convergence_error: f64,
    span: f64,
    window: f64,
    fitted_c: f64,
    residual_band: f64,
    exponent_fit: f64,
    exponent_expected: f64,
    note: String,
}

fn evolve(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let pf = ProblemFile::load(required(&cfg.inputs.problem, "problem file (--problem)")?)?;
    let problem = pf.build()?;
    let run = integrate(&problem)?;
    let tail = run.tail();
    let h = tail.step();
    let settled = (tail.len() - 1) as f64 * h;
    let span = pf.span.unwrap_or(settled / 4.0);
    let window = settled - span - h;
    if window <= h {
        return Err(Error::Validation(format!("settled part {settled} leaves no room for a span of {span}")));
    }
    let mut indices = BTreeSet::new();
    for e in ladder_of(cfg, Some(vec![0.5, 0.25, 0.125]))? {
        for c in scan(&problem.forcing, e, window, cfg.budget)?.clusters {
            let m = (c.tau / h).round() as u64;
            if m > 0 && (m as f64) * h <= window {
                indices.insert(m);
            }
        }
    }
    let taus: Vec<f64> = indices.iter().map(|&m| m as f64 * h).collect();
    let report = transfer_check(&problem, &run, &taus, span)?;

    let m = problem.state_dim;
    let cols: Vec<String> = std::iter::once("t".to_string()).chain((1..=m).map(|j| format!("u_{j}"))).collect();
    let mut traj = Csv::new("trajectory", &cols.iter().map(String::as_str).collect::<Vec<_>>());
    let every = run.samples.len().div_ceil(MAX_TRAJECTORY_ROWS).max(1);
    for i in (0..run.samples.len()).step_by(every) {
        let mut row = vec![num(run.samples.time(i))];
        row.extend(run.samples.sample(i).iter().map(|z| num(z.re)));
        traj.row(&row);
    }
    let mut pairs = Csv::new("transfer", &["tau", "eps_f", "eps_u"]);
    for q in &report.pairs {
        pairs.row(&[num(q.tau), num(q.eps_f), num(q.eps_u)]);
    }
    let mut contraction = Csv::new("contraction", &["t", "distance"]);
    for &(t, d) in &run.contraction {
        contraction.row(&[num(t), num(d)]);
    }
    out.add_csv(traj);
    out.add_csv(pairs);
    out.add_csv(contraction);
    out.add_json(
        "summary.json",
        &EvolveSummary {
            schema: "apdim.evolve-summary.v1",
            transient_end: run.transient_end,
            convergence_error: run.convergence_error,
            span,
            window,
            fitted_c: report.fitted_c,
            residual_band: report.residual_band,
            exponent_fit: report.exponent_fit,
            exponent_expected: report.exponent_expected,
            note: report.note.clone(),
        },
    );
    out.line("transient_end", num(run.transient_end));
    out.line("transfer pairs", report.pairs.len());
    out.line("exponent_fit", num(report.exponent_fit));
    out.line("fitted_c", num(report.fitted_c));
    Ok(())
}

/// `half-plane[:φ]`, `annulus:r1,r2` or `sector:φ1,φ2` (angles in radians).
pub fn parse_region(s: &str) -> Result<Region> {
    let (name, args) = s.split_once(':').unwrap_or((s, ""));
    let vals: Vec<f64> = if args.is_empty() {
        vec![]
    } else {
        args.split(',')
            .map(|x| match x.trim() {
                "pi" => Ok(PI),
                v => v.parse::<f64>().map_err(|_| Error::Parse(format!("bad region parameter {v:?}"))),
            })
            .collect::<Result<_>>()?
    };
    match (name.trim(), vals.as_slice()) {
        ("half-plane", []) => Ok(Region::HalfPlane { phi: 0.0 }),
        ("half-plane", [phi]) => Ok(Region::HalfPlane { phi: *phi }),
        ("annulus", [r1, r2]) if 0.0 <= *r1 && r1 < r2 => Ok(Region::Annulus { r1: *r1, r2: *r2 }),
        ("sector", [a, b]) => Ok(Region::Sector { phi1: *a, phi2: *b }),
        _ => Err(Error::Validation(format!("unknown region {s:?}"))),
    }
}

fn liouville(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let omega = cfg.number.as_deref().unwrap_or("[0; 5, 10^9, (1)]");
    let region = parse_region(cfg.region.as_deref().unwrap_or("half-plane"))?;
    let horizons = if cfg.horizons.is_empty() { vec![1e2, 1e3, 1e4] } else { cfg.horizons.clone() };
    let run = birkhoff(omega, region, &horizons, cfg.quadrature_step.unwrap_or(0.02), ORACLE_GRID)?;
    let mut csv = Csv::new("birkhoff", &["T", "average", "reference", "abs_error"]);
    for i in 0..horizons.len() {
        csv.row(&[num(horizons[i]), num(run.averages[i]), num(run.reference), num(run.errors[i])]);
        out.line(&format!("T = {}", horizons[i]), format!("average {} error {}", num(run.averages[i]), num(run.errors[i])));
    }
    out.add_csv(csv);
    if let Some(k) = cfg.convergent_index {
        let c = expand_certified(&number_source(omega, cfg.precision_digits)?, (k + 2).max(8))?;
        let t = *horizons.last().expect("non-empty");
        let r = liouville_closeness(&c, k, t, CLOSENESS_SAMPLES)?;
        out.line("certified bound", num(r.bound));
        out.line("measured max", num(r.measured));
        out.add_json(
            "closeness.json",
            &serde_json::json!({ "schema": "apdim.closeness.v1", "report": r }),
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct ProfileRow {
    frequency: String,
    nu_hat: f64,
    g_property: bool,
    g_constant: Option<f64>,
    depth: usize,
}

#[derive(Serialize)]
struct PipelineReport<'a> {
    schema: &'a str,
    profiles: Vec<ProfileRow>,
    estimate: &'a DimensionEstimate,
}

fn pipeline(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<()> {
    let p = match &cfg.inputs.poly {
        Some(_) => load_poly(cfg)?,
        None => PolyFile::unit_sum(&["1", "sqrt2"]).build()?,
    };
    let mut profiles = Vec::new();
    for f in p.basis().frequencies() {
        if let Some(c) = f.continued_fraction() {
            let depth = c.len().min(cfg.depth.unwrap_or(40));
            if depth >= 3 {
                let pr = c.classify(depth)?;
                profiles.push(ProfileRow {
                    frequency: f.label().to_string(),
                    nu_hat: pr.nu_hat,
                    g_property: pr.g_property,
                    g_constant: pr.g_constant,
                    depth,
                });
            }
        }
    }
    let ladder = ladder_of(cfg, Some(geometric_ladder(0.25, 0.5, 7)))?;
    let scans = periods_of(&p, cfg, &ladder, out)?;
    let est = diophantine_estimate(&scans)?;
    emit_estimate(&est, out);
    out.add_json("pipeline.json", &PipelineReport { schema: "apdim.pipeline-report.v1", profiles, estimate: &est });
    Ok(())
}

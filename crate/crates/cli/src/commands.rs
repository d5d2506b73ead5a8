//! `classify`, `pair`, `asymptotics`, `weinstock` and `growth`.

use bcurrent::asymptotics::{classify_bc_existence, fit_candidates, fit_models, richardson_limit, ModelCandidate};
use bcurrent::functions::estimate_growth;
use bcurrent::geometry::{build_chart_cover, classify_stratum, domain_verdict, locate_strata};
use bcurrent::pairing::weinstock::CLOSEDNESS_TOL;
use bcurrent::pairing::{
    force_pairing, pairing_at_epsilon_traced, pairing_sequence_partial, stokes_oracle, weinstock_test, Current,
    Schedule,
};
use bcurrent::quadrature::{DiagnosticRow, QuadratureSpec};
use bcurrent::{CPoint, Cover, Domain, Error, Fit, Form, Function, Sample, Stratum, C};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{Complex, OutDir, TOOL, VERSION};
use crate::{exit_code, CliError, Options, Scenario};

/// Seeds per real axis when locating corner strata.
pub const STRATA_GRID: usize = 16;

/// Common head of every JSON report.
#[derive(Serialize)]
pub struct RunInfo<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub options: &'a Options,
    pub scenario: &'a Scenario,
}

impl<'a> RunInfo<'a> {
    pub fn new(command: &'static str, options: &'a Options, scenario: &'a Scenario) -> Self {
        RunInfo { tool: TOOL, version: VERSION, command, options, scenario }
    }
}

pub fn coords(z: &CPoint<f64>, dim: usize) -> Vec<Complex> {
    z[..dim].iter().map(|w| Complex::from(*w)).collect()
}

#[derive(Serialize)]
pub struct StratumRow {
    pub pieces: Vec<String>,
    pub verdict: &'static str,
    pub samples: usize,
    pub real_rank: Option<usize>,
    pub complex_rank: Option<usize>,
    pub example_point: Option<Vec<Complex>>,
}

impl StratumRow {
    pub fn new(d: &Domain, s: &Stratum) -> Self {
        let labels = d.pieces();
        StratumRow {
            pieces: s.subset.iter().map(|&j| labels[j].label.clone()).collect(),
            verdict: s.verdict.map_or("UNCLASSIFIED", |v| v.code()),
            samples: s.samples.len(),
            real_rank: s.rank_data.first().map(|r| r.real_rank),
            complex_rank: s.rank_data.first().map(|r| r.complex_rank),
            example_point: s.samples.first().map(|z| coords(z, d.dim())),
        }
    }
}

#[derive(Serialize)]
pub struct ClassifyReport<'a> {
    pub run: RunInfo<'a>,
    pub strata: Vec<StratumRow>,
    pub domain_verdict: &'static str,
}

/// Every stratum, classified, in `locate_strata` order.
pub fn classified_strata(d: &Domain) -> Vec<Stratum> {
    locate_strata(d, STRATA_GRID).into_iter().map(|s| classify_stratum(d, s)).collect()
}

pub fn classify(sc: &Scenario, opts: &Options) -> Result<i32, CliError> {
    let d = sc.domain()?;
    let strata = classified_strata(&d);
    let verdict = domain_verdict(&strata);
    let rows: Vec<StratumRow> = strata.iter().map(|s| StratumRow::new(&d, s)).collect();
    for r in &rows {
        println!("{:<32} {}", r.pieces.join(" ∩ "), r.verdict);
    }
    println!("domain: {}", verdict.code());
    let out = OutDir::create(&opts.out)?;
    out.write_json(
        "classify.json",
        &ClassifyReport { run: RunInfo::new("classify", opts, sc), strata: rows, domain_verdict: verdict.code() },
    )?;
    Ok(exit_code::OK)
}

#[derive(Clone, Serialize)]
pub struct ChannelReport {
    pub model: &'static str,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub residual: f64,
    pub classification: &'static str,
}

#[derive(Clone, Serialize)]
pub struct FitReport {
    pub classification: &'static str,
    /// Real, then imaginary channel.
    pub channels: Vec<ChannelReport>,
    pub limit: Option<Complex>,
    pub limit_err: Option<f64>,
    pub samples_used: usize,
    pub scale: f64,
}

impl From<&Fit> for FitReport {
    fn from(f: &Fit) -> Self {
        FitReport {
            classification: f.classification.code(),
            channels: f
                .channels
                .iter()
                .map(|c| ChannelReport {
                    model: c.model.code(),
                    a: c.a,
                    b: c.b,
                    c: c.c,
                    residual: c.residual,
                    classification: c.classification.code(),
                })
                .collect(),
            limit: f.limit.map(Complex::from),
            limit_err: f.limit_err,
            samples_used: f.samples_used,
            scale: f.scale,
        }
    }
}

#[derive(Serialize)]
pub struct CandidateReport {
    pub model: &'static str,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub residual: f64,
    pub score: f64,
}

impl From<&ModelCandidate<f64>> for CandidateReport {
    fn from(m: &ModelCandidate<f64>) -> Self {
        CandidateReport { model: m.model.code(), a: m.a, b: m.b, c: m.c, residual: m.residual, score: m.score }
    }
}

#[derive(Serialize)]
pub struct RichardsonRow {
    pub epsilon: f64,
    pub limit: Complex,
    pub err: f64,
}

#[derive(Serialize)]
pub struct FormResult {
    pub form: String,
    pub csv: String,
    pub samples: usize,
    pub fit: Option<FitReport>,
    pub fit_error: Option<String>,
    /// Real and imaginary channel, `asymptotics` only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<[Vec<CandidateReport>; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub richardson: Option<Vec<RichardsonRow>>,
}

#[derive(Serialize)]
pub struct PairReport<'a> {
    pub run: RunInfo<'a>,
    pub charts: usize,
    pub forms: Vec<FormResult>,
    pub existence: &'static str,
    pub error: Option<String>,
}

pub struct Sequence {
    pub samples: Vec<Sample>,
    pub failure: Option<Error>,
    pub traces: Vec<(f64, Vec<DiagnosticRow>)>,
}

/// The pairing sequence up to the first failure, optionally with the
/// refinement history of each quadrature.
pub fn run_sequence(
    d: &Domain,
    f: &Function,
    form: &Form,
    cover: &Cover,
    schedule: &Schedule,
    spec: &QuadratureSpec,
    diagnostics: bool,
) -> Result<Sequence, CliError> {
    if !diagnostics {
        let (samples, failure) = pairing_sequence_partial(d, f, form, cover, schedule, spec)?;
        return Ok(Sequence { samples, failure, traces: Vec::new() });
    }
    schedule.validate(d)?;
    let traced: Vec<(f64, Result<Sample, Error>, Vec<DiagnosticRow>)> = schedule
        .epsilons::<f64>()
        .into_par_iter()
        .map(|e| {
            let mut rows = Vec::new();
            let r = pairing_at_epsilon_traced(d, f, form, cover, e, spec, &mut rows);
            (e, r, rows)
        })
        .collect();
    let mut seq = Sequence { samples: Vec::new(), failure: None, traces: Vec::new() };
    for (e, r, rows) in traced {
        seq.traces.push((e, rows));
        match r {
            Ok(s) => seq.samples.push(s),
            Err(err) => {
                seq.failure = Some(err);
                break;
            }
        }
    }
    Ok(seq)
}

/// Extrapolants over growing prefixes of the sequence.
pub fn richardson_table(samples: &[Sample]) -> Vec<RichardsonRow> {
    let eps: Vec<f64> = samples.iter().map(|s| s.epsilon).collect();
    let vals: Vec<C<f64>> = samples.iter().map(|s| s.value).collect();
    (1..=samples.len())
        .filter_map(|k| {
            richardson_limit(&eps[..k], &vals[..k]).map(|(l, err)| RichardsonRow {
                epsilon: eps[k - 1],
                limit: l.into(),
                err,
            })
        })
        .collect()
}

pub fn pair(sc: &Scenario, opts: &Options, detailed: bool) -> Result<i32, CliError> {
    let d = sc.domain()?;
    let f = sc.function()?;
    let forms = sc.forms()?;
    let cover = build_chart_cover(&d, &sc.cover_options())?;
    let schedule = sc.schedule();
    let spec = sc.quadrature();
    let out = OutDir::create(&opts.out)?;

    let mut results = Vec::new();
    let mut fits = Vec::new();
    let mut failure: Option<Error> = None;
    for (k, form) in forms.iter().enumerate() {
        let seq = run_sequence(&d, &f, form, &cover, &schedule, &spec, opts.diagnostics)?;
        let csv = format!("pairing_{k}.csv");
        out.write_samples(&csv, &seq.samples)?;
        if opts.diagnostics {
            out.write_diagnostics(&format!("diagnostics_{k}.csv"), &seq.traces)?;
        }
        let mut r = FormResult {
            form: form.label.clone(),
            csv,
            samples: seq.samples.len(),
            fit: None,
            fit_error: None,
            candidates: None,
            richardson: None,
        };
        if seq.failure.is_none() {
            match fit_models(&seq.samples, sc.fit.window) {
                Ok(fit) => {
                    r.fit = Some(FitReport::from(&fit));
                    fits.push(fit);
                }
                Err(e) => r.fit_error = Some(e.to_string()),
            }
            if detailed {
                if let Ok([re, im]) = fit_candidates(&seq.samples, sc.fit.window) {
                    r.candidates = Some([re.iter().map(Into::into).collect(), im.iter().map(Into::into).collect()]);
                }
                r.richardson = Some(richardson_table(&seq.samples));
            }
        }
        print_form(&r);
        results.push(r);
        if let Some(e) = seq.failure {
            failure = Some(e);
            break;
        }
    }
    let existence = if failure.is_none() && fits.len() == forms.len() {
        classify_bc_existence(&fits).code()
    } else {
        "UNDETERMINED"
    };
    println!("existence: {existence}");
    let report = PairReport {
        run: RunInfo::new(if detailed { "asymptotics" } else { "pair" }, opts, sc),
        charts: cover.len(),
        forms: results,
        existence,
        error: failure.as_ref().map(|e| e.to_string()),
    };
    out.write_json(if detailed { "asymptotics.json" } else { "pair.json" }, &report)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(exit_code::OK),
    }
}

fn print_form(r: &FormResult) {
    match &r.fit {
        Some(fit) => {
            let limit = fit.limit.map_or(String::new(), |l| format!(" limit {:.10} {:+.10}i", l.re, l.im));
            println!(
                "{}: {} samples, {} (re {}, im {}){limit}",
                r.form, r.samples, fit.classification, fit.channels[0].classification, fit.channels[1].classification
            );
        }
        None => println!("{}: {} samples, no fit", r.form, r.samples),
    }
}

#[derive(Serialize)]
pub struct WeinstockRow {
    pub form: String,
    pub value: Complex,
    pub abs: f64,
    pub err_est: f64,
    pub method: &'static str,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct RejectedForm {
    pub form: String,
    pub dbar_residual: f64,
    pub at: String,
    /// Pairing computed regardless of closedness.
    pub forced: Option<Complex>,
    /// Volume oracle for the same pairing.
    pub volume_oracle: Option<Complex>,
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct WeinstockReportOut<'a> {
    pub run: RunInfo<'a>,
    pub tolerance: f64,
    pub status: &'static str,
    pub entries: Vec<WeinstockRow>,
    pub rejected: Vec<RejectedForm>,
    pub error: Option<String>,
}

pub fn weinstock(sc: &Scenario, opts: &Options) -> Result<i32, CliError> {
    let d = sc.domain()?;
    let f = sc.function()?;
    let forms = sc.weinstock_forms()?;
    let cover = build_chart_cover(&d, &sc.cover_options())?;
    let spec = sc.quadrature();
    let out = OutDir::create(&opts.out)?;
    let current = Current::Function { f: &f, cover: &cover, schedule: sc.schedule() };
    let tol = sc.weinstock.tolerance;
    let mut report = WeinstockReportOut {
        run: RunInfo::new("weinstock", opts, sc),
        tolerance: tol,
        status: "FAIL",
        entries: Vec::new(),
        rejected: Vec::new(),
        error: None,
    };

    for form in &forms {
        if let Err(Error::FormNotClosed { residual, at }) = form.require_closed(&d, CLOSEDNESS_TOL) {
            let mut notes = Vec::new();
            let forced = force_pairing(&d, &current, form, &spec).map_err(|e| notes.push(format!("forced: {e}"))).ok();
            let oracle = stokes_oracle(&d, &f, form, &spec).map_err(|e| notes.push(format!("volume: {e}"))).ok();
            report.rejected.push(RejectedForm {
                form: form.label.clone(),
                dbar_residual: residual,
                at,
                forced: forced.map(|(v, _, _)| v.into()),
                volume_oracle: oracle.map(|r| r.value.into()),
                note: (!notes.is_empty()).then(|| notes.join("; ")),
            });
        }
    }
    if !report.rejected.is_empty() {
        report.status = "REJECTED";
        for r in &report.rejected {
            println!("{}: not dbar-closed (residual {:e})", r.form, r.dbar_residual);
        }
        out.write_json("weinstock.json", &report)?;
        return Ok(exit_code::WEINSTOCK);
    }

    let code = match weinstock_test(&d, &current, &forms, tol, &spec) {
        Ok(r) => {
            report.entries = r
                .entries
                .iter()
                .map(|e| WeinstockRow {
                    form: e.form.clone(),
                    value: e.value.into(),
                    abs: e.value.norm(),
                    err_est: e.err_est,
                    method: e.method.code(),
                    pass: e.pass,
                })
                .collect();
            for e in &report.entries {
                println!(
                    "{:<24} |pairing| = {:e} ({}) {}",
                    e.form,
                    e.abs,
                    e.method,
                    if e.pass { "ok" } else { "FAIL" }
                );
            }
            report.status = if r.pass { "PASS" } else { "FAIL" };
            if r.pass {
                exit_code::OK
            } else {
                exit_code::WEINSTOCK
            }
        }
        Err(e) => {
            report.error = Some(e.to_string());
            eprintln!("error: {e}");
            exit_code::WEINSTOCK
        }
    };
    println!("weinstock: {}", report.status);
    out.write_json("weinstock.json", &report)?;
    Ok(code)
}

#[derive(Serialize)]
pub struct GrowthReport<'a> {
    pub run: RunInfo<'a>,
    pub k_hat: f64,
    pub c_hat: f64,
    pub r2: f64,
    pub samples_used: usize,
}

pub fn growth(sc: &Scenario, opts: &Options) -> Result<i32, CliError> {
    let d = sc.domain()?;
    let f = sc.function()?;
    let g = estimate_growth(&f, &d, sc.growth.n_rays).map_err(|e| CliError::from(e).with_code(exit_code::GROWTH))?;
    println!("k_hat = {:.4}, C = {:.4e}, r² = {:.6}", g.k_hat, g.c_hat, g.r2);
    let out = OutDir::create(&opts.out)?;
    out.write_json(
        "growth.json",
        &GrowthReport {
            run: RunInfo::new("growth", opts, sc),
            k_hat: g.k_hat,
            c_hat: g.c_hat,
            r2: g.r2,
            samples_used: g.samples_used,
        },
    )?;
    Ok(exit_code::OK)
}

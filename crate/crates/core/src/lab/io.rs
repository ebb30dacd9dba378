//! Flat-file formats: matrices and signals as CSV (with a JSON sidecar for
//! signal metadata), trial logs, threshold curves, sweeps and campaigns.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{CampaignReport, SweepCurve, ThresholdCurve, TrialRecord};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::signals::{ModelSignal, SignalMetadata};

pub const TRIAL_HEADER: &str =
    "trial_id,seed,algo,n,m,delta,k_strong,k_total,a1,tail_mass,W,success,rel_l2_error,l1_error,runtime_ms";
pub const CURVE_HEADER: &str = "axis,p_success,ci_low,ci_high,n_trials";

/// One matrix row per CSV line, no header.
pub fn write_matrix_csv<W: Write>(out: W, a: &DenseMatrix) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for i in 0..a.rows() {
        w.write_record(a.row(i).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: Read>(input: R) -> Result<DenseMatrix> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec.iter().map(parse_f64).collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix file is empty".into()));
    }
    DenseMatrix::from_rows(&rows)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse(format!("'{s}' is not a number")))
}

/// One value per line.
pub fn write_vector_csv<W: Write>(mut out: W, v: &[f64]) -> Result<()> {
    for x in v {
        writeln!(out, "{x}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_vector_csv<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut text = String::new();
    BufReader::new(input).read_to_string(&mut text)?;
    text.lines().map(str::trim).filter(|l| !l.is_empty()).map(parse_f64).collect()
}

/// `signal.csv` gets its metadata in `signal.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

pub fn write_signal(path: &Path, sig: &ModelSignal) -> Result<()> {
    write_vector_csv(File::create(path)?, &sig.x)?;
    write_json(File::create(sidecar_path(path))?, &sig.metadata())
}

pub fn read_signal(path: &Path) -> Result<(Vec<f64>, SignalMetadata)> {
    let x = read_vector_csv(File::open(path)?)?;
    let meta: SignalMetadata = serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))?;
    if meta.n != x.len() {
        return Err(Error::Parse(format!("sidecar says n = {} but the signal has {} entries", meta.n, x.len())));
    }
    Ok((x, meta))
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn write_trials_csv<W: Write>(out: W, trials: &[TrialRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRIAL_HEADER.split(','))?;
    for t in trials {
        w.serialize(t)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trial log, rejecting rows whose `success` flag disagrees with
/// their stored relative error.
pub fn read_trials_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != TRIAL_HEADER {
        return Err(Error::Parse(format!("unexpected trial log header '{}'", header.join(","))));
    }
    let mut out = Vec::new();
    for rec in r.deserialize() {
        let t: TrialRecord = rec?;
        if !t.is_consistent() {
            return Err(Error::Parse(format!(
                "trial {}: success flag {} contradicts relative error {}",
                t.trial_id, t.success, t.rel_l2_error
            )));
        }
        out.push(t);
    }
    Ok(out)
}

#[derive(Serialize)]
struct CurveRow {
    axis: f64,
    p_success: f64,
    ci_low: f64,
    ci_high: f64,
    n_trials: usize,
}

pub fn write_curve_csv<W: Write>(out: W, curve: &ThresholdCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &curve.points {
        w.serialize(CurveRow { axis: p.axis, p_success: p.p_success, ci_low: p.ci_low, ci_high: p.ci_high, n_trials: p.n_trials })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    p1: f64,
    p2: f64,
    achieved: f64,
    ci_low: f64,
    ci_high: f64,
    method: String,
    n_probes: usize,
}

/// Sweep table preceded by `# key=value` configuration lines.
pub fn write_sweep_csv<W: Write>(mut out: W, sweep: &SweepCurve) -> Result<()> {
    writeln!(out, "# delta={}", sweep.delta)?;
    writeln!(out, "# eps={}", sweep.eps)?;
    writeln!(out, "# W={}", sweep.w)?;
    writeln!(out, "# n={} m={} trials_per_point={} seed={}", sweep.n, sweep.m, sweep.trials_per_point, sweep.seed.0)?;
    writeln!(out, "# rho_f={} ({}) ci=[{}, {}]", sweep.rho_f, sweep.rho_f_source, sweep.rho_f_ci_low, sweep.rho_f_ci_high)?;
    writeln!(out, "# zeta_hat={} ci=[{}, {}]", sweep.zeta_hat, sweep.zeta_ci_low, sweep.zeta_ci_high)?;
    writeln!(out, "# k_strong={} gamma1={}", sweep.k_strong, sweep.gamma1)?;
    let mut w = csv::Writer::from_writer(out);
    for p in &sweep.points {
        w.serialize(SweepRow {
            p1: p.p1,
            p2: p.p2,
            achieved: p.achieved,
            ci_low: p.achieved_ci_low,
            ci_high: p.achieved_ci_high,
            method: p.method.clone(),
            n_probes: p.probes.len(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CampaignRow {
    instance_id: usize,
    seed: u64,
    m: usize,
    n: usize,
    #[serde(rename = "K")]
    set: String,
    kappa: f64,
    #[serde(rename = "best_C")]
    best_c: f64,
    margin: Option<f64>,
    certified: bool,
    tail_mass: f64,
    support_bound: Option<f64>,
    error_bound: Option<f64>,
    outside_support: usize,
    l1_error: f64,
    violations: usize,
}

/// One row per instance; `K` is space-separated and `inf` marks unbounded values.
pub fn write_campaign_csv<W: Write>(out: W, report: &CampaignReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for inst in &report.instances {
        let set = inst.certificate.set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        w.serialize(CampaignRow {
            instance_id: inst.instance_id,
            seed: inst.seed,
            m: inst.m,
            n: inst.n,
            set,
            kappa: inst.certificate.kappa,
            best_c: inst.certificate.best_c,
            margin: inst.certificate.margin,
            certified: inst.certified,
            tail_mass: inst.tail_mass,
            support_bound: inst.support_bound,
            error_bound: inst.error_bound,
            outside_support: inst.outside_support,
            l1_error: inst.l1_error,
            violations: inst.violations(),
        })?;
    }
    w.flush()?;
    Ok(())
}

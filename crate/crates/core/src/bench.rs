//! Experiment harness: timed replays, the `g` objective, best-beta
//! selection, performance profiles and normalized trade-off tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algo::{Algorithm, StepReport};
use crate::dynamizer::UpdateSequence;
use crate::error::{Error, Result};
use crate::setsystem::SetSystem;

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub instance: String,
    pub algo: Algorithm,
    pub beta: f64,
    pub rep: usize,
    pub steps: usize,
    pub amortized_size: f64,
    pub amortized_time_ns: f64,
    pub amortized_recourse: f64,
}

impl MetricsRecord {
    /// Aggregates a per-step log the same way [`run_experiment`] streams it.
    pub fn from_log(instance: &str, algo: Algorithm, beta: f64, rep: usize, log: &[StepReport]) -> Result<Self> {
        if log.is_empty() {
            return Err(Error::EmptySequence);
        }
        let k = log.len() as f64;
        let size: u64 = log.iter().map(|r| r.cover_size as u64).sum();
        let time: u64 = log.iter().map(|r| r.elapsed_ns).sum();
        let recourse: u64 = log.iter().map(|r| r.recourse as u64).sum();
        Ok(MetricsRecord {
            instance: instance.to_string(),
            algo,
            beta,
            rep,
            steps: log.len(),
            amortized_size: size as f64 / k,
            amortized_time_ns: time as f64 / k,
            amortized_recourse: recourse as f64 / k,
        })
    }

    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::Size => self.amortized_size,
            Metric::Time => self.amortized_time_ns,
            Metric::Recourse => self.amortized_recourse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Size,
    Time,
    Recourse,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Size, Metric::Time, Metric::Recourse];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Size => "size",
            Metric::Time => "time",
            Metric::Recourse => "recourse",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "size" => Ok(Metric::Size),
            "time" => Ok(Metric::Time),
            "recourse" => Ok(Metric::Recourse),
            other => Err(Error::Metrics(format!("unknown metric {other:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Running

/// Replays `seq` through `algo`. Only the `update` calls are timed; with
/// `checking` on, `check` runs after every step outside the timed region.
pub fn run_experiment(
    sys: &Arc<SetSystem>,
    seq: &UpdateSequence,
    instance: &str,
    algo: Algorithm,
    beta: f64,
    rep: usize,
    checking: bool,
) -> Result<MetricsRecord> {
    let mut size = 0u64;
    let mut time = 0u64;
    let mut recourse = 0u64;
    replay(sys, seq, algo, beta, checking, |r| {
        size += r.cover_size as u64;
        time += r.elapsed_ns;
        recourse += r.recourse as u64;
    })?;
    let k = seq.steps.len() as f64;
    Ok(MetricsRecord {
        instance: instance.to_string(),
        algo,
        beta,
        rep,
        steps: seq.steps.len(),
        amortized_size: size as f64 / k,
        amortized_time_ns: time as f64 / k,
        amortized_recourse: recourse as f64 / k,
    })
}

/// Like [`run_experiment`] but keeps every [`StepReport`].
pub fn run_logged(
    sys: &Arc<SetSystem>,
    seq: &UpdateSequence,
    algo: Algorithm,
    beta: f64,
    checking: bool,
) -> Result<Vec<StepReport>> {
    let mut log = Vec::with_capacity(seq.steps.len());
    replay(sys, seq, algo, beta, checking, |r| log.push(*r))?;
    Ok(log)
}

fn replay(
    sys: &Arc<SetSystem>,
    seq: &UpdateSequence,
    algo: Algorithm,
    beta: f64,
    checking: bool,
    mut sink: impl FnMut(&StepReport),
) -> Result<()> {
    if seq.steps.is_empty() {
        return Err(Error::EmptySequence);
    }
    if seq.x != sys.num_elements() {
        return Err(Error::SequenceMismatch(format!(
            "sequence is for {} elements, instance has {}",
            seq.x,
            sys.num_elements()
        )));
    }
    algo.check_beta(beta)?;
    let mut engine = algo.build(Arc::clone(sys), beta, seq.n_cap)?;
    engine.set_audit(checking);
    for (i, &step) in seq.steps.iter().enumerate() {
        let start = Instant::now();
        let outcome = engine.update(step);
        let elapsed = start.elapsed().as_nanos() as u64;
        let mut report = outcome.map_err(|e| e.at_step(i + 1))?;
        report.elapsed_ns = elapsed;
        if checking {
            engine
                .check()
                .map_err(|msg| Error::Invariant(msg).at_step(i + 1))?;
        }
        sink(&report);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Objective and beta selection

/// `g(s, t, r) = s * sqrt(t) * sqrt(r)`.
pub fn objective_g(s: f64, t: f64, r: f64) -> Result<f64> {
    if !(s > 0.0 && t > 0.0 && r >= 0.0) {
        return Err(Error::Metrics(format!(
            "objective needs s > 0, t > 0, r >= 0; got s={s} t={t} r={r}"
        )));
    }
    Ok(s * t.sqrt() * r.sqrt())
}

fn beta_key(beta: f64) -> u64 {
    beta.to_bits()
}

/// Averages repetitions per `(instance, algo, beta)`; output is ordered by
/// that key and carries `rep = 0` and the mean of `steps`.
pub fn average_reps(records: &[MetricsRecord]) -> Vec<MetricsRecord> {
    let mut groups: BTreeMap<(String, Algorithm, u64), Vec<&MetricsRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.instance.clone(), r.algo, beta_key(r.beta)))
            .or_default()
            .push(r);
    }
    let mut out: Vec<MetricsRecord> = groups
        .into_values()
        .map(|g| {
            let k = g.len() as f64;
            let mean = |f: fn(&MetricsRecord) -> f64| g.iter().map(|r| f(r)).sum::<f64>() / k;
            MetricsRecord {
                instance: g[0].instance.clone(),
                algo: g[0].algo,
                beta: g[0].beta,
                rep: 0,
                steps: (g.iter().map(|r| r.steps).sum::<usize>() as f64 / k).round() as usize,
                amortized_size: mean(|r| r.amortized_size),
                amortized_time_ns: mean(|r| r.amortized_time_ns),
                amortized_recourse: mean(|r| r.amortized_recourse),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.instance.as_str(), a.algo)
            .cmp(&(b.instance.as_str(), b.algo))
            .then(a.beta.total_cmp(&b.beta))
    });
    out
}

/// Per algorithm, the lower median over instances of the beta minimizing
/// `g` (ties towards the smaller beta).
pub fn select_best_beta(records: &[MetricsRecord]) -> Result<BTreeMap<Algorithm, f64>> {
    if records.is_empty() {
        return Err(Error::Metrics("no records".into()));
    }
    let averaged = average_reps(records);
    let mut by_algo: BTreeMap<Algorithm, Vec<&MetricsRecord>> = BTreeMap::new();
    for r in &averaged {
        by_algo.entry(r.algo).or_default().push(r);
    }
    let mut out = BTreeMap::new();
    for (algo, rows) in by_algo {
        let betas: BTreeSet<u64> = rows.iter().map(|r| beta_key(r.beta)).collect();
        let mut per_instance: BTreeMap<&str, Vec<&MetricsRecord>> = BTreeMap::new();
        for r in &rows {
            per_instance.entry(r.instance.as_str()).or_default().push(r);
        }
        let mut winners = Vec::with_capacity(per_instance.len());
        for (instance, runs) in per_instance {
            if runs.len() != betas.len() {
                return Err(Error::Metrics(format!(
                    "{algo} on {instance}: {} of {} betas present",
                    runs.len(),
                    betas.len()
                )));
            }
            let mut best: Option<(f64, f64)> = None;
            for r in runs {
                let g = objective_g(r.amortized_size, r.amortized_time_ns, r.amortized_recourse)
                    .map_err(|e| Error::Metrics(format!("{algo} on {instance}: {e}")))?;
                let better = match best {
                    None => true,
                    Some((bg, bb)) => g < bg || (g == bg && r.beta < bb),
                };
                if better {
                    best = Some((g, r.beta));
                }
            }
            winners.push(best.unwrap().1);
        }
        winners.sort_by(f64::total_cmp);
        out.insert(algo, winners[(winners.len() - 1) / 2]);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Performance profiles

/// Fraction of instances within a factor `tau` of the per-instance best.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub metric: Metric,
    /// `(label, [(tau, fraction)])`, labels ascending. All curves share the
    /// same tau grid.
    pub curves: Vec<(String, Vec<(f64, f64)>)>,
}

impl ProfileCurve {
    pub fn fraction(&self, label: &str, tau: f64) -> Option<f64> {
        let (_, pts) = self.curves.iter().find(|(l, _)| l == label)?;
        Some(
            pts.iter()
                .take_while(|(t, _)| *t <= tau)
                .last()
                .map_or(0.0, |&(_, f)| f),
        )
    }
}

/// Variant labels: the algorithm name, or `algo@beta` when an algorithm
/// appears with more than one beta.
fn variant_labels(averaged: &[MetricsRecord]) -> Vec<String> {
    let mut betas: BTreeMap<Algorithm, BTreeSet<u64>> = BTreeMap::new();
    for r in averaged {
        betas.entry(r.algo).or_default().insert(beta_key(r.beta));
    }
    averaged
        .iter()
        .map(|r| {
            if betas[&r.algo].len() > 1 {
                format!("{}@{}", r.algo, r.beta)
            } else {
                r.algo.to_string()
            }
        })
        .collect()
}

pub fn performance_profile(records: &[MetricsRecord], metric: Metric) -> Result<ProfileCurve> {
    let averaged = average_reps(records);
    let labels = variant_labels(&averaged);
    let instances: BTreeSet<&str> = averaged.iter().map(|r| r.instance.as_str()).collect();
    let variants: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
    let mut values: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for (r, label) in averaged.iter().zip(&labels) {
        let v = r.metric(metric);
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Metrics(format!(
                "{label} on {}: {metric} value {v} is not positive",
                r.instance
            )));
        }
        values.insert((r.instance.as_str(), label.as_str()), v);
    }
    let mut ratios: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for &inst in &instances {
        let best = variants
            .iter()
            .filter_map(|&v| values.get(&(inst, v)))
            .fold(f64::INFINITY, |a, &b| a.min(b));
        for &v in &variants {
            if let Some(&x) = values.get(&(inst, v)) {
                ratios.entry(v).or_default().push(x / best);
            }
        }
    }
    let mut grid: Vec<f64> = ratios.values().flatten().copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let n = instances.len() as f64;
    let curves = variants
        .iter()
        .map(|&v| {
            let mut mine = ratios.get(v).cloned().unwrap_or_default();
            mine.sort_by(f64::total_cmp);
            let pts = grid
                .iter()
                .map(|&tau| {
                    let within = mine.partition_point(|&r| r <= tau);
                    (tau, within as f64 / n)
                })
                .collect();
            (v.to_string(), pts)
        })
        .collect();
    Ok(ProfileCurve { metric, curves })
}

// ---------------------------------------------------------------------------
// Trade-off table

/// Geometric means over instances of each metric normalized by the
/// per-instance best across all `(algo, beta)` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub algo: Algorithm,
    pub beta: f64,
    pub gm_norm_size: f64,
    pub gm_norm_time: f64,
    pub gm_norm_recourse: f64,
}

pub fn tradeoff(records: &[MetricsRecord]) -> Result<Vec<TradeoffRow>> {
    let averaged = average_reps(records);
    let instances: BTreeSet<&str> = averaged.iter().map(|r| r.instance.as_str()).collect();
    let mut best: BTreeMap<(&str, Metric), f64> = BTreeMap::new();
    for r in &averaged {
        for m in Metric::ALL {
            let v = r.metric(m);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Metrics(format!(
                    "{}@{} on {}: {m} value {v} is not positive",
                    r.algo, r.beta, r.instance
                )));
            }
            let b = best.entry((r.instance.as_str(), m)).or_insert(v);
            *b = b.min(v);
        }
    }
    let mut groups: BTreeMap<(Algorithm, u64), Vec<&MetricsRecord>> = BTreeMap::new();
    for r in &averaged {
        groups.entry((r.algo, beta_key(r.beta))).or_default().push(r);
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((algo, _), runs) in groups {
        let beta = runs[0].beta;
        if runs.len() != instances.len() {
            return Err(Error::Metrics(format!(
                "{algo}@{beta} ran on {} of {} instances",
                runs.len(),
                instances.len()
            )));
        }
        let gm = |m: Metric| {
            let logs: f64 = runs
                .iter()
                .map(|r| (r.metric(m) / best[&(r.instance.as_str(), m)]).ln())
                .sum();
            (logs / runs.len() as f64).exp()
        };
        rows.push(TradeoffRow {
            algo,
            beta,
            gm_norm_size: gm(Metric::Size),
            gm_norm_time: gm(Metric::Time),
            gm_norm_recourse: gm(Metric::Recourse),
        });
    }
    rows.sort_by(|a, b| a.algo.cmp(&b.algo).then(a.beta.total_cmp(&b.beta)));
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Sweeps

/// One prepared instance: id, system and its update sequence.
#[derive(Debug, Clone)]
pub struct SweepInstance {
    pub id: String,
    pub system: Arc<SetSystem>,
    pub sequence: UpdateSequence,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub algos: Vec<Algorithm>,
    pub betas: Vec<f64>,
    pub reps: usize,
    /// Concurrent runs; 1 means sequential.
    pub parallel: usize,
    pub checking: bool,
}

/// Every `(instance, algo, beta, rep)` combination with a legal beta, in
/// that order.
pub fn sweep_tasks(instances: &[SweepInstance], cfg: &SweepConfig) -> Vec<(usize, Algorithm, f64, usize)> {
    let mut tasks = Vec::new();
    for i in 0..instances.len() {
        for &algo in &cfg.algos {
            for &beta in &cfg.betas {
                if algo.check_beta(beta).is_err() {
                    continue;
                }
                for rep in 0..cfg.reps {
                    tasks.push((i, algo, beta, rep));
                }
            }
        }
    }
    tasks
}

/// Runs every task of [`sweep_tasks`] on up to `cfg.parallel` threads.
/// Results come back in task order regardless of scheduling.
pub fn sweep(instances: &[SweepInstance], cfg: &SweepConfig) -> Result<Vec<MetricsRecord>> {
    if cfg.reps == 0 || cfg.parallel == 0 {
        return Err(Error::ZeroCount);
    }
    let tasks = sweep_tasks(instances, cfg);
    let slots: Vec<Mutex<Option<Result<MetricsRecord>>>> =
        tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = cfg.parallel.min(tasks.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let t = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, algo, beta, rep)) = tasks.get(t) else { break };
                let inst = &instances[i];
                let out = run_experiment(
                    &inst.system,
                    &inst.sequence,
                    &inst.id,
                    algo,
                    beta,
                    rep,
                    cfg.checking,
                )
                .map_err(|e| Error::Metrics(format!("{} {algo}@{beta} rep {rep}: {e}", inst.id)));
                *slots[t].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every task ran"))
        .collect()
}

// ---------------------------------------------------------------------------
// CSV

pub const RESULTS_HEADER: &str =
    "instance,algo,beta,rep,steps,amortized_size,amortized_time_ns,amortized_recourse";
pub const PROFILE_HEADER: &str = "metric,algo,tau,fraction";
pub const TRADEOFF_HEADER: &str = "algo,beta,gm_norm_size,gm_norm_time,gm_norm_recourse";

fn csv_err(e: csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Parse {
            line: p.line() as usize,
            msg: e.to_string(),
        },
        None => Error::Io(e.to_string()),
    }
}

fn write_rows<T: Serialize>(out: impl Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn expect_header<R: Read>(r: &mut csv::Reader<R>, expected: &str) -> Result<()> {
    let got = r.headers().map_err(csv_err)?;
    let got: Vec<&str> = got.iter().collect();
    if got.join(",") != expected {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header {expected:?}, got {:?}", got.join(",")),
        });
    }
    Ok(())
}

pub fn write_results(out: impl Write, rows: &[MetricsRecord]) -> Result<()> {
    if rows.is_empty() {
        let mut out = out;
        writeln!(out, "{RESULTS_HEADER}")?;
        return Ok(());
    }
    write_rows(out, rows)
}

pub fn read_results(input: impl Read) -> Result<Vec<MetricsRecord>> {
    let mut r = csv::Reader::from_reader(input);
    expect_header(&mut r, RESULTS_HEADER)?;
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    metric: Metric,
    algo: String,
    tau: f64,
    fraction: f64,
}

pub fn write_profile(out: impl Write, curve: &ProfileCurve) -> Result<()> {
    let rows: Vec<ProfileRow> = curve
        .curves
        .iter()
        .flat_map(|(label, pts)| {
            pts.iter().map(move |&(tau, fraction)| ProfileRow {
                metric: curve.metric,
                algo: label.clone(),
                tau,
                fraction,
            })
        })
        .collect();
    if rows.is_empty() {
        let mut out = out;
        writeln!(out, "{PROFILE_HEADER}")?;
        return Ok(());
    }
    write_rows(out, &rows)
}

/// Reads a profile CSV holding a single metric.
pub fn read_profile(input: impl Read) -> Result<ProfileCurve> {
    let mut r = csv::Reader::from_reader(input);
    expect_header(&mut r, PROFILE_HEADER)?;
    let mut metric = None;
    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for row in r.deserialize::<ProfileRow>() {
        let row = row.map_err(csv_err)?;
        if *metric.get_or_insert(row.metric) != row.metric {
            return Err(Error::Metrics("profile CSV mixes metrics".into()));
        }
        match curves.iter_mut().find(|(l, _)| *l == row.algo) {
            Some((_, pts)) => pts.push((row.tau, row.fraction)),
            None => curves.push((row.algo, vec![(row.tau, row.fraction)])),
        }
    }
    let metric = metric.ok_or_else(|| Error::Metrics("profile CSV has no rows".into()))?;
    Ok(ProfileCurve { metric, curves })
}

pub fn write_tradeoff(out: impl Write, rows: &[TradeoffRow]) -> Result<()> {
    if rows.is_empty() {
        let mut out = out;
        writeln!(out, "{TRADEOFF_HEADER}")?;
        return Ok(());
    }
    write_rows(out, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, algo: Algorithm, beta: f64, s: f64, t: f64, r: f64) -> MetricsRecord {
        MetricsRecord {
            instance: instance.into(),
            algo,
            beta,
            rep: 0,
            steps: 10,
            amortized_size: s,
            amortized_time_ns: t,
            amortized_recourse: r,
        }
    }

    #[test]
    fn objective_values() {
        assert_eq!(objective_g(4.0, 9.0, 16.0).unwrap(), 48.0);
        assert_eq!(objective_g(1.0, 1.0, 0.0).unwrap(), 0.0);
        let (s, t, r) = (3.7, 12.5, 0.3);
        let a = objective_g(s, 4.0 * t, r).unwrap();
        let b = 2.0 * objective_g(s, t, r).unwrap();
        assert!((a - b).abs() <= 1e-12 * b);
        assert!(objective_g(0.0, 1.0, 1.0).is_err());
        assert!(objective_g(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn two_instance_profile() {
        let rows = vec![
            rec("i1", Algorithm::Local, 1.9, 1.0, 1.0, 1.0),
            rec("i2", Algorithm::Local, 1.9, 2.0, 1.0, 1.0),
            rec("i1", Algorithm::Global, 1.5, 2.0, 1.0, 1.0),
            rec("i2", Algorithm::Global, 1.5, 2.0, 1.0, 1.0),
        ];
        let p = performance_profile(&rows, Metric::Size).unwrap();
        assert_eq!(p.fraction("local", 1.0), Some(1.0));
        assert_eq!(p.fraction("global", 1.0), Some(0.5));
        assert_eq!(p.fraction("global", 2.0), Some(1.0));
    }

    #[test]
    fn missing_instance_plateaus() {
        let rows = vec![
            rec("i1", Algorithm::Local, 1.9, 1.0, 1.0, 1.0),
            rec("i2", Algorithm::Local, 1.9, 1.0, 1.0, 1.0),
            rec("i1", Algorithm::Naive, 1.9, 1.0, 1.0, 1.0),
        ];
        let p = performance_profile(&rows, Metric::Time).unwrap();
        assert_eq!(p.fraction("naive", 1e9), Some(0.5));
        assert_eq!(p.fraction("local", 1.0), Some(1.0));
    }

    #[test]
    fn profile_rejects_zero() {
        let rows = vec![rec("i1", Algorithm::Local, 1.9, 1.0, 1.0, 0.0)];
        assert!(performance_profile(&rows, Metric::Recourse).is_err());
    }

    #[test]
    fn variants_labelled_by_beta() {
        let rows = vec![
            rec("i1", Algorithm::Local, 1.5, 1.0, 1.0, 1.0),
            rec("i1", Algorithm::Local, 1.9, 2.0, 1.0, 1.0),
        ];
        let p = performance_profile(&rows, Metric::Size).unwrap();
        let labels: Vec<&str> = p.curves.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, vec!["local@1.5", "local@1.9"]);
    }

    #[test]
    fn best_beta_median_and_ties() {
        // per instance g is minimized at the listed beta
        let mut rows = Vec::new();
        for (inst, win) in [("a", 1.5), ("b", 1.9), ("c", 1.9)] {
            for beta in [1.5, 1.9] {
                let s = if beta == win { 1.0 } else { 2.0 };
                rows.push(rec(inst, Algorithm::Partial, beta, s, 1.0, 1.0));
            }
        }
        assert_eq!(select_best_beta(&rows).unwrap()[&Algorithm::Partial], 1.9);
        let tie = vec![
            rec("a", Algorithm::Local, 1.5, 1.0, 1.0, 1.0),
            rec("a", Algorithm::Local, 1.9, 1.0, 1.0, 1.0),
        ];
        assert_eq!(select_best_beta(&tie).unwrap()[&Algorithm::Local], 1.5);
        // even count: lower median
        let mut even = rows.clone();
        even.retain(|r| r.instance != "c");
        assert_eq!(select_best_beta(&even).unwrap()[&Algorithm::Partial], 1.5);
        // missing grid point
        let mut gap = rows.clone();
        gap.pop();
        assert!(select_best_beta(&gap).is_err());
    }

    #[test]
    fn reps_are_averaged() {
        let mut a = rec("i", Algorithm::Robust, 1.5, 2.0, 10.0, 1.0);
        let mut b = a.clone();
        b.rep = 1;
        b.amortized_time_ns = 30.0;
        a.rep = 0;
        let avg = average_reps(&[a, b]);
        assert_eq!(avg.len(), 1);
        assert_eq!(avg[0].amortized_time_ns, 20.0);
    }

    #[test]
    fn tradeoff_geometric_mean() {
        let rows = vec![
            rec("i1", Algorithm::Local, 1.5, 1.0, 4.0, 1.0),
            rec("i2", Algorithm::Local, 1.5, 4.0, 1.0, 1.0),
            rec("i1", Algorithm::Local, 1.9, 2.0, 1.0, 1.0),
            rec("i2", Algorithm::Local, 1.9, 1.0, 4.0, 1.0),
        ];
        let t = tradeoff(&rows).unwrap();
        assert_eq!(t.len(), 2);
        assert!((t[0].gm_norm_size - 2.0).abs() < 1e-12); // sqrt(1 * 4)
        assert!((t[1].gm_norm_size - 2f64.sqrt()).abs() < 1e-12);
        assert!((t[0].gm_norm_time - 2.0).abs() < 1e-12);
        assert_eq!(t[0].gm_norm_recourse, 1.0);
    }

    #[test]
    fn csv_round_trips() {
        let rows = vec![
            rec("a", Algorithm::Robust, 1.5, 2.5, 100.0, 0.25),
            rec("b", Algorithm::Global, 1.495, 3.0, 7.5, 1.0),
        ];
        let mut buf = Vec::new();
        write_results(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(RESULTS_HEADER));
        assert!(text.contains("\na,robust,1.5,0,10,2.5,100.0,0.25\n"));
        assert_eq!(read_results(buf.as_slice()).unwrap(), rows);

        let p = performance_profile(&rows, Metric::Size).unwrap();
        let mut buf = Vec::new();
        write_profile(&mut buf, &p).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with(PROFILE_HEADER));
        assert_eq!(read_profile(buf.as_slice()).unwrap(), p);

        let bad = "instance,algo\nx,local\n";
        assert!(read_results(bad.as_bytes()).is_err());
    }
}

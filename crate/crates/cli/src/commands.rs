use std::path::PathBuf;

use biortho_dqpt::engine::{
    fisher_branches, run_quench, select_rows, table_s1_catalog, table_s1_csv, table_s1_report, QuenchSpec,
};
use biortho_dqpt::par::{map_indexed, Execution};
use biortho_dqpt::ssh_model::{check_off_boundary, classify_phase, SshParams};
use biortho_dqpt::worked_example::WorkedExample;
use biortho_dqpt::DqptError;
use clap::Args;
use serde_json::{json, Value};

use crate::config::Config;
use crate::failure::{CmdResult, Failure};
use crate::output::{csv, num, RunDir};

#[derive(Debug, Args, Default)]
pub struct Common {
    /// key = value file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run every sweep on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args, Default)]
pub struct QuenchArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub eta_i: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_i: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta_f: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_f: Option<f64>,
    /// Number of unit cells N.
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Time samples on [0, t-max], endpoints included.
    #[arg(long)]
    pub t_steps: Option<usize>,
    /// Simpson panels per unit time for the dynamical phase.
    #[arg(long)]
    pub quad_steps: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct BranchArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub n_min: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_max: Option<i32>,
    /// Momentum samples for the branch sweep.
    #[arg(long)]
    pub k_samples: Option<usize>,
}

const COMMON_KEYS: [&str; 2] = ["out", "sequential"];
const DISCRETISATION_KEYS: [&str; 4] = ["cells", "t-max", "t-steps", "quad-steps"];
const PARAM_KEYS: [&str; 4] = ["eta-i", "gamma-i", "eta-f", "gamma-f"];
const BRANCH_KEYS: [&str; 3] = ["n-min", "n-max", "k-samples"];

fn known_keys(groups: &[&[&'static str]]) -> Vec<&'static str> {
    COMMON_KEYS
        .iter()
        .chain(groups.iter().copied().flatten())
        .copied()
        .collect()
}

fn execution(cfg: &Config, common: &Common) -> CmdResult<Execution> {
    Ok(if cfg.flag(common.sequential, "sequential")? {
        Execution::Sequential
    } else {
        Execution::Parallel
    })
}

fn out_dir(cfg: &Config, common: &Common) -> CmdResult<PathBuf> {
    cfg.require(common.out.clone(), "out")
}

/// Discretisation fields on top of `base`, flags and config overriding it.
fn discretisation(cfg: &Config, args: &QuenchArgs, base: QuenchSpec) -> CmdResult<QuenchSpec> {
    Ok(QuenchSpec {
        n_cells: cfg.resolve(args.cells, "cells")?.unwrap_or(base.n_cells),
        t_max: cfg.resolve(args.t_max, "t-max")?.unwrap_or(base.t_max),
        t_steps: cfg.resolve(args.t_steps, "t-steps")?.unwrap_or(base.t_steps),
        quad_steps: cfg.resolve(args.quad_steps, "quad-steps")?.unwrap_or(base.quad_steps),
        ..base
    })
}

fn quench_spec(cfg: &Config, args: &QuenchArgs, exec: Execution) -> CmdResult<QuenchSpec> {
    let pre = SshParams::new(cfg.require(args.eta_i, "eta-i")?, cfg.require(args.gamma_i, "gamma-i")?);
    let post = SshParams::new(cfg.require(args.eta_f, "eta-f")?, cfg.require(args.gamma_f, "gamma-f")?);
    let spec = discretisation(
        cfg,
        args,
        QuenchSpec {
            execution: exec,
            ..QuenchSpec::new(pre, post)
        },
    )?;
    spec.validate()?;
    for (side, p) in [("prequench", &spec.pre), ("postquench", &spec.post)] {
        check_off_boundary(p).map_err(|e| match Failure::from(e) {
            Failure::Refused(m) => Failure::Refused(format!("{side} {m}")),
            other => other,
        })?;
    }
    Ok(spec)
}

fn params_json(p: &SshParams) -> Value {
    json!({ "eta": p.eta, "gamma": p.gamma })
}

fn spec_json(spec: &QuenchSpec) -> Value {
    json!({
        "pre": params_json(&spec.pre),
        "post": params_json(&spec.post),
        "cells": spec.n_cells,
        "t_max": spec.t_max,
        "t_steps": spec.t_steps,
        "quad_steps": spec.quad_steps,
        "execution": if spec.execution == Execution::Sequential { "sequential" } else { "parallel" },
    })
}

pub fn quench(common: &Common, args: &QuenchArgs) -> CmdResult {
    let cfg = Config::load(common.config.as_deref())?;
    cfg.ensure_known(&known_keys(&[&PARAM_KEYS, &DISCRETISATION_KEYS]))?;
    let spec = quench_spec(&cfg, args, execution(&cfg, common)?)?;
    let dir = out_dir(&cfg, common)?;
    let mut run = RunDir::open(&dir)?;
    let q = run_quench(&spec)?;
    let rows =
        (0..q.rate.times.len()).map(|j| vec![num(q.rate.times[j]), num(q.rate.rate[j]), num(q.self_normal.rate[j])]);
    run.write("rate.csv", &csv("t,LR_biortho,LR_selfnormal", rows))?;
    let rows = q.dtop.times.iter().zip(&q.dtop.nu).map(|(t, v)| vec![num(*t), num(*v)]);
    run.write("dtop.csv", &csv("t,nu", rows))?;
    let rows = [("biortho", &q.rate), ("selfnormal", &q.self_normal)]
        .into_iter()
        .flat_map(|(name, s)| s.cusps.iter().map(move |t| vec![name.to_string(), num(*t)]));
    run.write("cusps.csv", &csv("series,t", rows))?;
    let rows = q.dtop.jumps.iter().map(|j| vec![num(j.time), num(j.delta)]);
    run.write("jumps.csv", &csv("t,delta", rows))?;
    run.finish("quench", spec_json(&spec))?;

    println!(
        "{} -> {}: {} biorthogonal cusps, {} self-normal cusps, {} DTOP jumps; wrote {}",
        spec.pre,
        spec.post,
        q.rate.cusps.len(),
        q.self_normal.cusps.len(),
        q.dtop.jumps.len(),
        dir.display()
    );
    Ok(())
}

pub fn fisher(common: &Common, args: &QuenchArgs, branches: &BranchArgs) -> CmdResult {
    let cfg = Config::load(common.config.as_deref())?;
    cfg.ensure_known(&known_keys(&[&PARAM_KEYS, &DISCRETISATION_KEYS, &BRANCH_KEYS]))?;
    let spec = quench_spec(&cfg, args, execution(&cfg, common)?)?;
    let n_min = cfg.resolve(branches.n_min, "n-min")?.unwrap_or(0);
    let n_max = cfg.resolve(branches.n_max, "n-max")?.unwrap_or(6);
    let k_samples = cfg
        .resolve(branches.k_samples, "k-samples")?
        .unwrap_or(QuenchSpec::DEFAULT_CELLS);
    if n_min > n_max {
        return Err(Failure::Usage(format!("n-min {n_min} exceeds n-max {n_max}")));
    }
    let dir = out_dir(&cfg, common)?;
    let mut run = RunDir::open(&dir)?;
    let f = fisher_branches(&spec, n_min..=n_max, k_samples)?;
    let rows = f.branches.iter().flat_map(|b| {
        b.k_values
            .iter()
            .zip(&b.z_values)
            .map(move |(k, z)| vec![b.n.to_string(), num(*k), num(z.re), num(z.im)])
    });
    run.write("fisher.csv", &csv("n,k,re_z,im_z", rows))?;
    let rows = f.branches.iter().flat_map(|b| {
        b.crossings.iter().map(move |c| {
            vec![
                b.n.to_string(),
                num(c.k),
                num(c.t),
                num(c.g_residual),
                num(c.probability),
            ]
        })
    });
    run.write("crossings.csv", &csv("n,k_c,t_c,g_residual,p", rows))?;
    let mut echo = spec_json(&spec);
    echo["n_min"] = json!(n_min);
    echo["n_max"] = json!(n_max);
    echo["k_samples"] = json!(k_samples);
    run.finish("fisher", echo)?;

    let counts: Vec<String> = f
        .branches
        .iter()
        .map(|b| format!("n={}:{}", b.n, b.crossings.len()))
        .collect();
    println!(
        "{} -> {}: crossings per branch {}; wrote {}",
        spec.pre,
        spec.post,
        counts.join(" "),
        dir.display()
    );
    Ok(())
}

#[derive(Debug, Args, Default)]
pub struct PhaseArgs {
    /// eta interval as LO:HI.
    #[arg(long, allow_hyphen_values = true)]
    pub eta_range: Option<String>,
    /// gamma interval as LO:HI.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_range: Option<String>,
    /// Grid points per axis, either N or NETAxNGAMMA.
    #[arg(long)]
    pub grid: Option<String>,
}

fn parse_range(key: &str, s: &str) -> CmdResult<(f64, f64)> {
    let bad = || Failure::Usage(format!("{key}: expected LO:HI with finite LO <= HI, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> CmdResult<(usize, usize)> {
    let bad = || Failure::Usage(format!("grid: expected N or NxM with counts >= 1, got {s:?}"));
    let parse = |v: &str| v.trim().parse::<usize>().ok().filter(|n| *n >= 1).ok_or_else(bad);
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let n = parse(s)?;
            Ok((n, n))
        }
    }
}

fn axis((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn phase_diagram(common: &Common, args: &PhaseArgs) -> CmdResult {
    let cfg = Config::load(common.config.as_deref())?;
    cfg.ensure_known(&known_keys(&[&["eta-range", "gamma-range", "grid"]]))?;
    let eta_range = parse_range(
        "eta-range",
        &cfg.resolve(args.eta_range.clone(), "eta-range")?
            .unwrap_or("-3:3".into()),
    )?;
    let gamma_range = parse_range(
        "gamma-range",
        &cfg.resolve(args.gamma_range.clone(), "gamma-range")?
            .unwrap_or("-6:6".into()),
    )?;
    let (n_eta, n_gamma) = parse_grid(&cfg.resolve(args.grid.clone(), "grid")?.unwrap_or("61x121".into()))?;
    let exec = execution(&cfg, common)?;
    let dir = out_dir(&cfg, common)?;

    let mut run = RunDir::open(&dir)?;
    let etas = axis(eta_range, n_eta);
    let gammas = axis(gamma_range, n_gamma);
    // Row-major over (eta, gamma); `None` marks a point on a boundary line.
    let labels: Vec<Result<Option<(String, String)>, DqptError>> = map_indexed(exec, n_eta * n_gamma, |idx| {
        let p = SshParams::new(etas[idx / n_gamma], gammas[idx % n_gamma]);
        match classify_phase(&p) {
            Ok(l) => Ok(Some((l.to_string(), l.winding.to_string()))),
            Err(DqptError::OnBoundary { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let labels = labels.into_iter().collect::<Result<Vec<_>, _>>()?;
    let region = |i: usize, j: usize| labels[i * n_gamma + j].as_ref().map(|l| l.0.as_str());
    let mut rows = Vec::with_capacity(labels.len());
    for i in 0..n_eta {
        for j in 0..n_gamma {
            let here = region(i, j);
            let neighbours = [
                (i > 0).then(|| (i - 1, j)),
                (i + 1 < n_eta).then(|| (i + 1, j)),
                (j > 0).then(|| (i, j - 1)),
                (j + 1 < n_gamma).then(|| (i, j + 1)),
            ];
            let adjacent = here.is_none() || neighbours.into_iter().flatten().any(|(a, b)| region(a, b) != here);
            let (r, w) = labels[i * n_gamma + j]
                .clone()
                .unwrap_or(("boundary".into(), String::new()));
            rows.push(vec![num(etas[i]), num(gammas[j]), r, w, u8::from(adjacent).to_string()]);
        }
    }
    run.write("phases.csv", &csv("eta,gamma,region,winding,boundary", rows))?;
    run.finish(
        "phase-diagram",
        json!({
            "eta_range": [eta_range.0, eta_range.1],
            "gamma_range": [gamma_range.0, gamma_range.1],
            "grid": [n_eta, n_gamma],
        }),
    )?;
    println!("classified {} points; wrote {}", n_eta * n_gamma, dir.display());
    Ok(())
}

/// Agreement tolerance for the worked two-level example.
pub const SM_TOLERANCE: f64 = 1e-3;

pub fn sm_example(common: &Common) -> CmdResult {
    let cfg = Config::load(common.config.as_deref())?;
    cfg.ensure_known(&COMMON_KEYS)?;
    let out = cfg.resolve(common.out.clone(), "out")?;
    let ex = WorkedExample::compute(1.0)?;
    let fields: Vec<Value> = ex
        .fields()
        .iter()
        .map(|f| {
            json!({
                "name": f.name,
                "computed": [f.computed.re, f.computed.im],
                "reference": [f.reference.re, f.reference.im],
                "error": f.error(),
            })
        })
        .collect();
    let mismatches = ex.mismatches(SM_TOLERANCE);
    let report = json!({
        "t": ex.t,
        "tolerance": SM_TOLERANCE,
        "fields": fields,
        "pass": mismatches.is_empty(),
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Failed(e.to_string()))? + "\n";
    print!("{text}");
    if let Some(dir) = out {
        let mut run = RunDir::open(&dir)?;
        run.write("sm_example.json", &text)?;
        run.finish("sm-example", json!({ "t": ex.t, "tolerance": SM_TOLERANCE }))?;
    }
    if mismatches.is_empty() {
        return Ok(());
    }
    let diff: Vec<String> = mismatches
        .iter()
        .map(|f| {
            format!(
                "{}: computed {:.6} vs reference {:.3} (|diff| {:.3e})",
                f.name,
                f.computed,
                f.reference,
                f.error()
            )
        })
        .collect();
    Err(Failure::Failed(format!(
        "worked example mismatch:\n  {}",
        diff.join("\n  ")
    )))
}

#[derive(Debug, Args, Default)]
pub struct TableArgs {
    /// Comma-separated row labels, e.g. "I-II,V-VI".
    #[arg(long)]
    pub rows: Option<String>,
}

pub fn table_s1(common: &Common, args: &QuenchArgs, branches: &BranchArgs, table: &TableArgs) -> CmdResult {
    if args.eta_i.is_some() || args.gamma_i.is_some() || args.eta_f.is_some() || args.gamma_f.is_some() {
        return Err(Failure::Usage(
            "table-s1 takes its quench parameters from the catalog".into(),
        ));
    }
    let cfg = Config::load(common.config.as_deref())?;
    cfg.ensure_known(&known_keys(&[&DISCRETISATION_KEYS, &["n-min", "n-max", "rows"]]))?;
    let base = QuenchSpec {
        execution: execution(&cfg, common)?,
        ..QuenchSpec::new(SshParams::new(0.0, 1.0), SshParams::new(0.0, 1.0))
    };
    let base = discretisation(&cfg, args, base)?;
    base.validate()?;
    let n_min = cfg.resolve(branches.n_min, "n-min")?.unwrap_or(0);
    let n_max = cfg.resolve(branches.n_max, "n-max")?.unwrap_or(6);
    let catalog = table_s1_catalog();
    let rows = match cfg.resolve(table.rows.clone(), "rows")? {
        None => catalog,
        Some(list) => {
            let labels: Vec<&str> = list.split(',').map(str::trim).collect();
            if labels.iter().any(|l| l.is_empty()) {
                return Err(Failure::Usage(format!("rows: empty label in {list:?}")));
            }
            select_rows(&catalog, &labels)?
        }
    };
    let dir = out_dir(&cfg, common)?;
    let mut run = RunDir::open(&dir)?;
    let reports = table_s1_report(&rows, &base, n_min..=n_max);
    run.write("table_s1.csv", &table_s1_csv(&reports))?;
    let mut echo = spec_json(&base);
    if let Some(o) = echo.as_object_mut() {
        o.remove("pre");
        o.remove("post");
    }
    echo["rows"] = json!(rows.iter().map(|r| r.label).collect::<Vec<_>>());
    echo["n_min"] = json!(n_min);
    echo["n_max"] = json!(n_max);
    run.finish("table-s1", echo)?;

    let mut failing = Vec::new();
    for r in &reports {
        for (dir_name, d) in [("forward", &r.forward), ("reverse", &r.reverse)] {
            let computed = match &d.computed {
                Ok(c) => format!("{{{}}}/{{{}}}", c.profile.crossings_str(), c.profile.jumps),
                Err(e) => format!("error: {e}"),
            };
            let status = if d.pass() { "PASS" } else { "FAIL" };
            println!(
                "{:<7} {dir_name:<7} {} -> {}: expected {{{}}}/{{{}}}, computed {computed} {status}",
                r.label,
                d.pre,
                d.post,
                d.expected.crossings_str(),
                d.expected.jumps
            );
        }
        if !r.pass() {
            failing.push(r.label);
        }
    }
    if failing.is_empty() {
        println!("{} rows PASS; wrote {}", reports.len(), dir.display());
        Ok(())
    } else {
        Err(Failure::Failed(format!("failing rows: {}", failing.join(", "))))
    }
}

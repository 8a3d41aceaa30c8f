use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tracelab::analysis::{leader_spectrum, leaders, pointwise_exponent, predicted_curves, Shift};
use tracelab::capacity::{default_level, scaling_function};
use tracelab::numeric::arange;
use tracelab::synthesis::{
    probe_fields, seminorm, CoefficientField, CoefficientSource, LinearCombination, RandomMember, SaturatingField,
};
use tracelab::trace::{saturating_trace, tensor_trace, TraceResult};
use tracelab::wavelet::{check_property_r, recertify};
use tracelab::CapacityModel;

use crate::config::{ExperimentConfig, FieldKind};
use crate::error::{CliError, CliResult};
use crate::experiment::{self, midpoint_grid, schedule_for, stream_seed, trace_heights};
use crate::output::{num, OutputDir};

/// Everything a subcommand needs besides its config.
#[derive(Debug, Clone)]
pub struct Context {
    pub out: PathBuf,
    pub implicit: bool,
}

/// Runs `body`, then writes the manifest whatever happened.
fn with_manifest(
    cfg: &ExperimentConfig,
    ctx: &Context,
    command: &str,
    claim: Option<&str>,
    body: impl FnOnce(&mut OutputDir) -> CliResult<()>,
) -> CliResult<()> {
    let mut out = OutputDir::create(&ctx.out)?;
    out.json("config.json", cfg)?;
    let result = body(&mut out);
    let status = match &result {
        Ok(()) => "pass",
        Err(CliError::Comparison(_)) => "fail",
        Err(_) => "error",
    };
    out.finish(command, claim, status, cfg)?;
    result
}

// ------------------------------------------------------------------------ tau

/// Finite `(h, τ*(h))` pairs, deduplicated in `h`.
fn legendre_points(table: &tracelab::ScalingTable) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = table.legendre.iter().copied().filter(|(h, s)| h.is_finite() && s.is_finite()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-9);
    pts
}

#[derive(Debug, Serialize)]
struct TauReport {
    name: String,
    level: u32,
    max_additivity_residual: Option<f64>,
}

pub fn cmd_tau(cfg: &ExperimentConfig, ctx: &Context) -> CliResult<()> {
    if cfg.capacities.is_empty() {
        return Err(CliError::Config("no capacities defined".into()));
    }
    with_manifest(cfg, ctx, "tau", None, |out| {
        let q = cfg.q_grid();
        let mut reports = Vec::new();
        for name in cfg.capacities.keys() {
            let model = cfg.capacity(name)?;
            let level = cfg.level.unwrap_or_else(|| default_level(&model));
            let table = scaling_function(&model, &q, level)?;
            let mut residual = None;
            if let CapacityModel::Product { left, right } = &model {
                let tl = scaling_function(left, &q, level)?;
                let tr = scaling_function(right, &q, level)?;
                let res: Vec<f64> = (0..q.len()).map(|i| table.tau[i] - tl.tau[i] - tr.tau[i]).collect();
                residual = Some(res.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                out.csv(
                    &format!("tau_{name}.csv"),
                    &["q", "tau", "tau_prime", "tau_left", "tau_right", "residual"],
                    (0..q.len()).map(|i| {
                        vec![num(q[i]), num(table.tau[i]), num(table.deriv[i]), num(tl.tau[i]), num(tr.tau[i]), num(res[i])]
                    }),
                )?;
            } else {
                out.csv(
                    &format!("tau_{name}.csv"),
                    &["q", "tau", "tau_prime"],
                    (0..q.len()).map(|i| vec![num(q[i]), num(table.tau[i]), num(table.deriv[i])]),
                )?;
            }
            out.csv(
                &format!("legendre_{name}.csv"),
                &["h", "sigma"],
                legendre_points(&table).into_iter().map(|(h, s)| vec![num(h), num(s)]),
            )?;
            reports.push(TauReport { name: name.clone(), level, max_additivity_residual: residual });
        }
        out.json("report.json", &reports)
    })
}

// -------------------------------------------------------------- check-wavelet

#[derive(Debug, Serialize)]
struct Recheck {
    grid_log2: u32,
    alpha: f64,
    pass: bool,
}

pub fn cmd_check_wavelet(cfg: &ExperimentConfig, ctx: &Context) -> CliResult<()> {
    let spec = cfg.wavelet()?;
    let d_prime = cfg.nu().map(|m| m.dim()).unwrap_or(1);
    with_manifest(cfg, ctx, "check-wavelet", None, |out| {
        let grid = cfg.level.unwrap_or(16);
        let report = check_property_r(&spec, grid);
        out.json("report.json", &report)?;
        if !report.pass {
            return Err(CliError::Precondition(format!(
                "{} fails property (R): R1 {}, R2 {}, R3 {}",
                spec.name, report.r1, report.r2, report.r3
            )));
        }
        let sched = schedule_for(cfg, &spec, d_prime)?;
        out.json("schedule.json", &sched)?;
        let fine = cfg.schedule.recertify_log2.unwrap_or(sched.grid_log2 + 3);
        if fine as usize * d_prime > 24 {
            return Ok(());
        }
        let (alpha, pass) = recertify(&spec, &sched, fine);
        out.json("recheck.json", &Recheck { grid_log2: fine, alpha, pass })?;
        if !pass {
            return Err(CliError::Precondition(format!(
                "schedule floor {alpha:.3e} at 2^-{fine} is below half the certified {:.3e}",
                sched.alpha
            )));
        }
        Ok(())
    })
}

// ----------------------------------------------------------------- synthesize

/// The coefficient source described by a config.
pub enum Built {
    Saturating(SaturatingField),
    Random(RandomMember),
    Perturbed { member: RandomMember, probes: Vec<SaturatingField>, betas: Vec<f64> },
}

impl Built {
    pub fn from_config(cfg: &ExperimentConfig) -> CliResult<Self> {
        let xi = cfg.xi()?;
        let member = || RandomMember::new(xi.clone(), cfg.q.0, cfg.max_level, stream_seed(cfg.seed, 0));
        Ok(match cfg.field.kind {
            FieldKind::Saturating => {
                let spec = cfg.wavelet()?;
                let sched = schedule_for(cfg, &spec, cfg.nu()?.dim())?;
                Self::Saturating(SaturatingField::new(&xi, cfg.q.0, cfg.max_level, sched)?)
            }
            FieldKind::Random => Self::Random(member()?),
            FieldKind::Perturbed => {
                let spec = cfg.wavelet()?;
                let sched = schedule_for(cfg, &spec, cfg.nu()?.dim())?;
                let probes = probe_fields(&xi, cfg.q.0, cfg.max_level, sched, cfg.field.p, cfg.mu()?.dim())?;
                let betas = match &cfg.field.betas {
                    Some(b) if b.len() == probes.len() => b.clone(),
                    Some(b) => {
                        return Err(CliError::Config(format!("{} betas for {} probe fields", b.len(), probes.len())))
                    }
                    None => {
                        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, 1));
                        let br = cfg.field.beta_range;
                        (0..probes.len()).map(|_| rng.gen_range(-br..=br)).collect()
                    }
                };
                Self::Perturbed { member: member()?, probes, betas }
            }
        })
    }

    pub fn with_source<R>(&self, f: impl FnOnce(&dyn CoefficientSource) -> CliResult<R>) -> CliResult<R> {
        match self {
            Self::Saturating(g) => f(g),
            Self::Random(m) => f(m),
            Self::Perturbed { member, probes, betas } => {
                let mut terms: Vec<(f64, &dyn CoefficientSource)> = vec![(1.0, member)];
                terms.extend(betas.iter().zip(probes).map(|(b, p)| (*b, p as &dyn CoefficientSource)));
                f(&LinearCombination::new(terms)?)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Saturating(_) => "saturating",
            Self::Random(_) => "random",
            Self::Perturbed { .. } => "perturbed",
        }
    }
}

fn dense(src: &dyn CoefficientSource) -> CliResult<CoefficientField> {
    CoefficientField::from_source(src).map_err(|e| CliError::Config(format!("{e}; use --implicit for this size")))
}

/// Levels × cubes × orientations beyond which implicit sources are not scanned.
const SCAN_LIMIT_LOG2: usize = 28;

#[derive(Debug, Serialize)]
struct ImplicitField<'a> {
    kind: &'a str,
    dim: usize,
    max_level: u32,
    q: crate::config::QValue,
    seed: u64,
    betas: Option<&'a [f64]>,
    schedule: Option<&'a tracelab::OffsetSchedule>,
}

pub fn cmd_synthesize(cfg: &ExperimentConfig, ctx: &Context) -> CliResult<()> {
    let built = Built::from_config(cfg)?;
    with_manifest(cfg, ctx, "synthesize", None, |out| {
        let xi = cfg.xi()?;
        built.with_source(|src| {
            let scan_ok = matches!(built, Built::Saturating(_))
                || src.dim() * src.max_level() as usize <= SCAN_LIMIT_LOG2;
            if ctx.implicit {
                let (betas, schedule) = match &built {
                    Built::Saturating(g) => (None, Some(g.schedule())),
                    Built::Perturbed { betas, probes, .. } => (Some(betas.as_slice()), probes.first().map(|p| p.schedule())),
                    Built::Random(_) => (None, None),
                };
                out.json(
                    "field.json",
                    &ImplicitField {
                        kind: built.kind(),
                        dim: src.dim(),
                        max_level: src.max_level(),
                        q: cfg.q,
                        seed: cfg.seed,
                        betas,
                        schedule,
                    },
                )?;
                if scan_ok {
                    write_seminorm(out, src, &xi, cfg)?;
                }
            } else {
                let f = dense(src)?;
                f.save(&out.register("field.bin"))?;
                write_seminorm(out, &f, &xi, cfg)?;
            }
            Ok(())
        })
    })
}

fn write_seminorm(out: &mut OutputDir, src: &dyn CoefficientSource, xi: &CapacityModel, cfg: &ExperimentConfig) -> CliResult<()> {
    let prof = seminorm(src, xi, f64::INFINITY, cfg.q.0, 0.0)?;
    out.csv(
        "seminorm.csv",
        &["level", "eps"],
        prof.eps.iter().enumerate().map(|(j, e)| vec![j.to_string(), num(*e)]),
    )?;
    out.json("seminorm.json", &prof)
}

// ---------------------------------------------------------------------- trace

pub fn cmd_trace(cfg: &ExperimentConfig, ctx: &Context) -> CliResult<()> {
    let built = Built::from_config(cfg)?;
    let (mu, nu) = (cfg.mu()?, cfg.nu()?);
    let spec = cfg.wavelet()?;
    with_manifest(cfg, ctx, "trace", None, |out| {
        let mut index = Vec::new();
        let dense_field = if ctx.implicit { None } else { Some(built.with_source(dense)?) };
        for (ri, &r) in cfg.r_list().iter().enumerate() {
            for (i, a) in trace_heights(cfg, &nu, r, stream_seed(cfg.seed, 10 + ri as u64))?.iter().enumerate() {
                let t: TraceResult = match (&built, &dense_field) {
                    (Built::Saturating(g), None) => {
                        saturating_trace(&mu, &nu, g.schedule(), &spec, cfg.q.0, a, cfg.max_level)?
                    }
                    (_, Some(f)) => tensor_trace(f, a, &spec)?,
                    (_, None) => built.with_source(|src| Ok(tensor_trace(src, a, &spec)?))?,
                };
                let t = t.with_r(r);
                let name = format!("trace_r{}_{i}.bin", num(r));
                let path = out.register(&name);
                out.register(&name.replace(".bin", ".json"));
                t.save(&path)?;
                let a_txt: Vec<String> = a.iter().map(|v| num(*v)).collect();
                index.push(vec![
                    num(r),
                    i.to_string(),
                    a_txt.join(" "),
                    serde_json::to_string(&t.route)?.trim_matches('"').to_string(),
                    t.first_usable_level().to_string(),
                    num(t.dg_energy()),
                    name,
                ]);
            }
        }
        out.csv("traces.csv", &["r", "sample", "a", "route", "first_level", "dg_max", "file"], index)
    })
}

// -------------------------------------------------------------------- leaders

fn first_level_of(path: &Path) -> u32 {
    std::fs::read_to_string(path.with_extension("json"))
        .ok()
        .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).ok())
        .and_then(|v| v.get("first_valid").and_then(|f| f.as_u64()))
        .map_or(0, |v| v as u32)
}

fn load_inputs(cfg: &ExperimentConfig) -> CliResult<Vec<(PathBuf, CoefficientField)>> {
    if cfg.inputs.is_empty() {
        return Err(CliError::Config("no input files given".into()));
    }
    cfg.inputs
        .iter()
        .map(|p| {
            let f = CoefficientField::load(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            Ok((p.clone(), f))
        })
        .collect()
}

fn window_for(cfg: &ExperimentConfig, f: &CoefficientField, first: u32) -> CliResult<(u32, u32)> {
    let w = cfg.fit_window.unwrap_or_else(|| tracelab::analysis::default_window(f.max_level()));
    let lo = w.0.max(first);
    if lo >= w.1 || w.1 > f.max_level() {
        return Err(CliError::Precondition(format!(
            "fit window [{lo}, {}] unusable for a field of depth {}",
            w.1,
            f.max_level()
        )));
    }
    Ok((lo, w.1))
}

pub fn cmd_leaders(cfg: &ExperimentConfig, ctx: &Context) -> CliResult<()> {
    let inputs = load_inputs(cfg)?;
    with_manifest(cfg, ctx, "leaders", None, |out| {
        let xs = cfg.points.clone().unwrap_or_else(|| midpoint_grid(50));
        let mut rows = Vec::new();
        for (path, f) in &inputs {
            if f.dim() != 1 {
                return Err(CliError::Config(format!("{}: points are one-dimensional, field has D = {}", path.display(), f.dim())));
            }
            let window = window_for(cfg, f, first_level_of(path))?;
            let lf = leaders(f)?;
            for &x in &xs {
                let e = pointwise_exponent(&lf, &[x], window.0, window.1)?;
                rows.push(vec![
                    path.display().to_string(),
                    num(x),
                    window.0.to_string(),
                    window.1.to_string(),
                    num(e.ls_slope),
                    num(e.min_slope),
                ]);
            }
        }
        out.csv("exponents.csv", &["input", "x", "j_min", "j_max", "ls_slope", "min_slope"], rows)
    })
}

// ------------------------------------------------------------------- spectrum

pub fn cmd_spectrum(cfg: &ExperimentConfig, ctx: &Context) -> CliResult<()> {
    let inputs = load_inputs(cfg)?;
    let curve = match (cfg.mu(), cfg.nu()) {
        (Ok(mu), Ok(nu)) => Some(predicted_curves(&mu, &nu, Shift::R(cfg.r_list()[0]), &cfg.q_grid())?),
        _ => None,
    };
    with_manifest(cfg, ctx, "spectrum", None, |out| {
        let h = match &curve {
            Some(c) => {
                let (lo, hi) = c.support();
                let cut = 0.5 * (1.0 - cfg.tolerances.support_fraction) * (hi - lo);
                arange(lo + cut, hi - cut, 0.02)
            }
            None => arange(0.0, 4.0, 0.02),
        };
        for (i, (path, f)) in inputs.iter().enumerate() {
            let window = window_for(cfg, f, first_level_of(path))?;
            let est = leader_spectrum(&leaders(f)?, &cfg.q_grid(), &h, window)?;
            let pred: Vec<f64> = h.iter().map(|&v| curve.as_ref().map_or(f64::NAN, |c| c.sigma(v))).collect();
            out.csv(
                &format!("spectrum_{i}.csv"),
                &["h", "sigma", "predicted"],
                (0..h.len()).map(|k| vec![num(h[k]), num(est.sigma[k]), num(pred[k])]),
            )?;
            out.csv(
                &format!("zeta_{i}.csv"),
                &["q", "zeta"],
                est.q_grid.iter().zip(&est.zeta).map(|(q, z)| vec![num(*q), num(*z)]),
            )?;
        }
        Ok(())
    })
}

// ----------------------------------------------------------------- experiment

pub fn cmd_experiment(cfg: &ExperimentConfig, ctx: &Context) -> CliResult<()> {
    let kind = cfg.experiment.ok_or_else(|| CliError::Config("config names no experiment".into()))?;
    with_manifest(cfg, ctx, "experiment", Some(kind.claim()), |out| {
        let outcome = experiment::run(cfg, kind)?;
        experiment::write_outcome(out, &outcome)?;
        let v = outcome.verdict();
        if v.pass {
            Ok(())
        } else {
            Err(CliError::Comparison(v.summary.clone()))
        }
    })
}

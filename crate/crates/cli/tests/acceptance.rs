//! Acceptance run: one line per criterion, nonzero exit if any is red.
//!
//! The four claim-level experiments read the shipped configs in `configs/`,
//! so this target and the CLI exercise the same settings.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tracelab::analysis::LeaderField;
use tracelab::capacity::{default_q_grid, legendre_transform, sample_points, scaling_function};
use tracelab::synthesis::CoefficientField;
use tracelab::trace::{grid_trace_dwt, interior_cubes, saturating_trace, tensor_trace};
use tracelab::wavelet::{check_property_r, find_offset_schedule, recertify, ScheduleSearch};
use tracelab::{CapacityModel, SaturatingField, WaveletSpec};
use tracelab_cli::experiment;
use tracelab_cli::ExperimentConfig;

struct Line {
    pass: bool,
    detail: String,
}

type Check = fn() -> Result<Line, String>;

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ExperimentConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn additivity() -> Result<Line, String> {
    let out = experiment::additivity(&config("additivity.json")).map_err(|e| e.to_string())?;
    let v = out.verdict;
    Ok(Line { pass: v.pass && v.statistic <= 1e-10, detail: format!("max |τξ − τμ − τν| = {:.2e} (tol 1e-10)", v.statistic) })
}

fn closed_form_tau() -> Result<Line, String> {
    let mu = CapacityModel::binomial(0.25).map_err(|e| e.to_string())?;
    let q = default_q_grid();
    let t = scaling_function(&mu, &q, 12).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (qi, ti) in q.iter().zip(&t.tau) {
        worst = worst.max((ti + (0.25f64.powf(*qi) + 0.75f64.powf(*qi)).log2()).abs());
    }
    let t1 = t.tau_at(1.0).map_err(|e| e.to_string())?;
    let t0 = t.tau_at(0.0).map_err(|e| e.to_string())?;
    let pass = worst <= 1e-10 && t1.abs() <= 1e-10 && (t0 + 1.0).abs() <= 1e-10;
    Ok(Line { pass, detail: format!("max deviation {worst:.2e} over {} q, τ(1) = {t1:.1e}, τ(0) = {t0}", q.len()) })
}

fn legendre_duality() -> Result<Line, String> {
    let mut worst = 0.0f64;
    for p0 in [0.25, 0.3] {
        let m = CapacityModel::binomial(p0).map_err(|e| e.to_string())?;
        let t = scaling_function(&m, &default_q_grid(), 12).map_err(|e| e.to_string())?;
        for r in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let h = t.h_at(r).map_err(|e| e.to_string())?;
            let lhs = legendre_transform(&t, &[h])[0];
            let rhs = r * h - t.tau_at(r).map_err(|e| e.to_string())?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(Line { pass: worst <= 1e-4, detail: format!("max |τ*(τ′(r)) − (rτ′(r) − τ(r))| = {worst:.2e} (tol 1e-4)") })
}

/// `max/min` over all cubes of levels `1..=12` of `ν_r(λ) / (ν(λ)^r 2^{jτ(r)})`.
fn sandwich_spread(nu: &CapacityModel, r: f64) -> Result<f64, String> {
    let aux = nu.auxiliary(r).map_err(|e| e.to_string())?;
    let tau = scaling_function(nu, &[r], 12).map_err(|e| e.to_string())?.tau[0];
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for j in 1..=12u32 {
        let base = nu.level_masses(j).map_err(|e| e.to_string())?;
        let am = aux.level_masses(j).map_err(|e| e.to_string())?;
        for (b, a) in base.iter().zip(&am) {
            let ratio = a / (b.powf(r) * (j as f64 * tau).exp2());
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Ok(hi / lo)
}

fn auxiliary_measure() -> Result<Line, String> {
    let nu = CapacityModel::binomial(0.3).map_err(|e| e.to_string())?;
    let aux = nu.auxiliary(0.0).map_err(|e| e.to_string())?;
    let w = aux.cascade_weights().ok_or("auxiliary of a cascade lost its weights")?;
    let uniform = w.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
    // the sandwich is a property of exact cascades; per-node renormalized
    // auxiliaries of Gibbs measures drift with the level
    let models = [
        nu.clone(),
        CapacityModel::binomial(0.25).map_err(|e| e.to_string())?,
        CapacityModel::binomial(0.1).map_err(|e| e.to_string())?,
    ];
    let mut spread = 0.0f64;
    for m in &models {
        for r in [-2.0, -1.0, 0.0, 1.0, 1.5, 2.0] {
            spread = spread.max(sandwich_spread(m, r)?);
        }
    }
    Ok(Line {
        pass: uniform <= 1e-12 && spread <= 2.0,
        detail: format!("ν₀ weights off uniform by {uniform:.1e}; sandwich ratio spread {spread:.3} (tol 2)"),
    })
}

fn trace_routes() -> Result<Line, String> {
    let spec = WaveletSpec::daubechies("db4", 16).map_err(|e| e.to_string())?;
    let mu = CapacityModel::binomial(0.25).map_err(|e| e.to_string())?;
    let nu = CapacityModel::binomial(0.3).map_err(|e| e.to_string())?;
    let sched = find_offset_schedule(&spec, 1, 12, &ScheduleSearch::default()).map_err(|e| e.to_string())?;
    let g = SaturatingField::from_parts(mu.clone(), nu.clone(), f64::INFINITY, 12, sched.clone())
        .map_err(|e| e.to_string())?;
    let mut closed = 0.0f64;
    for (i, r) in [0.0, 1.5].into_iter().enumerate() {
        let aux = nu.auxiliary(r).map_err(|e| e.to_string())?;
        for a in sample_points(&aux, 30, 7 + i as u64, 10).map_err(|e| e.to_string())? {
            let a = [a[0] + (-31.0f64).exp2()];
            let c = saturating_trace(&mu, &nu, &sched, &spec, f64::INFINITY, &a, 12).map_err(|e| e.to_string())?;
            let t = tensor_trace(&g, &a, &spec).map_err(|e| e.to_string())?;
            for j in c.first_usable_level()..=12 {
                for (x, y) in c.field.level(j).iter().zip(t.field.level(j)) {
                    closed = closed.max((x - y).abs());
                }
            }
        }
    }

    // the grid route samples the trace function itself, so keep J small
    let small = SaturatingField::from_parts(mu, nu, f64::INFINITY, 8, sched).map_err(|e| e.to_string())?;
    let mut grid = 0.0f64;
    for a in [0.3711, 0.618, 0.9] {
        let t = tensor_trace(&small, &[a], &spec).map_err(|e| e.to_string())?;
        let w = grid_trace_dwt(&small, &[a], 12, &spec).map_err(|e| e.to_string())?;
        for j in 5..=8u32 {
            let want = t.field.level(j);
            let got = w.detail(j).ok_or("missing detail level")?;
            let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if scale == 0.0 {
                continue;
            }
            for k in interior_cubes(j, spec.support, 0.1) {
                grid = grid.max((want[k] - got[k]).abs() / scale);
            }
        }
    }
    Ok(Line {
        pass: closed <= 1e-8 && grid <= 1e-3,
        detail: format!("closed form vs tensor {closed:.2e} (tol 1e-8); tensor vs grid {grid:.2e} relative (tol 1e-3)"),
    })
}

fn saturating_shift() -> Result<Line, String> {
    let out = experiment::saturating_shift(&config("saturating_shift.json")).map_err(|e| e.to_string())?;
    let hits = out.rows.iter().filter(|r| r.hit).count();
    let per_r: Vec<String> =
        out.per_r.iter().map(|s| format!("r={} mean err {:+.3} sd {:.3}", s.r, s.mean_error, s.sd_error)).collect();
    Ok(Line {
        pass: out.verdict.pass,
        detail: format!(
            "{hits}/{} pairs within 0.15 ({:.1}%, need 80%); {}",
            out.rows.len(),
            100.0 * out.verdict.statistic,
            per_r.join(", ")
        ),
    })
}

fn upper_bound() -> Result<Line, String> {
    let out = experiment::upper_bound(&config("upper_bound.json")).map_err(|e| e.to_string())?;
    Ok(Line {
        pass: out.verdict.pass,
        detail: format!("min margin ĥ − (ĥμ + hν^min) = {:+.4} over {} cases (tol −0.15)", out.verdict.statistic, out.rows.len()),
    })
}

fn prevalent_spectrum() -> Result<Line, String> {
    let out = experiment::prevalent_spectrum(&config("prevalent_spectrum.json")).map_err(|e| e.to_string())?;
    let devs: Vec<String> =
        out.runs.iter().filter(|r| r.perturbed).map(|r| format!("{:.3}", r.deviation)).collect();
    Ok(Line {
        pass: out.verdict.pass,
        detail: format!("perturbed replicate deviations [{}] (tol 0.2 each)", devs.join(", ")),
    })
}

fn property_r() -> Result<Line, String> {
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["db4", "db5", "db6", "db7", "db8"] {
        let spec = WaveletSpec::daubechies(name, 16).map_err(|e| e.to_string())?;
        let rep = check_property_r(&spec, 16);
        let ok_r = rep.r2 && rep.r3;
        // certify on the 2^-16 grid, lowering the screening floor until a window is found
        let found = [1e-3, 1e-4, 1e-5].into_iter().find_map(|alpha_min| {
            let opts = ScheduleSearch { grid_log2: 16, alpha_min, ..Default::default() };
            find_offset_schedule(&spec, 1, 16, &opts).ok()
        });
        let (alpha, re) = match found {
            Some(s) => {
                let (a17, ok) = recertify(&spec, &s, 17);
                (s.alpha, ok && s.alpha > 0.0 && a17 > 0.0)
            }
            None => (0.0, false),
        };
        pass &= ok_r && re;
        parts.push(format!("{name} R2/R3 {} α {alpha:.2e} recheck {}", yes(ok_r), yes(re)));
    }
    Ok(Line { pass, detail: parts.join("; ") })
}

fn yes(b: bool) -> &'static str {
    if b { "ok" } else { "FAILED" }
}

fn leader_oracle() -> Result<Line, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = rng.gen_range(1..=2usize);
        let top = if dim == 1 { rng.gen_range(1..=8u32) } else { rng.gen_range(1..=5u32) };
        let mut f = CoefficientField::zeros(dim, top).map_err(|e| e.to_string())?;
        for j in 0..=top {
            for v in f.level_mut(j) {
                *v = rng.gen_range(-1.0..1.0) * (-(j as f64) * 0.5).exp2();
            }
        }
        let fast = LeaderField::from_field(&f).map_err(|e| e.to_string())?;
        let slow = LeaderField::brute_force(&f);
        for j in 0..=top {
            for (x, y) in fast.level(j).iter().zip(slow.level(j)) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(Line { pass: worst <= 1e-12, detail: format!("max |bottom-up − brute force| = {worst:.1e} over 100 fields") })
}

fn main() -> ExitCode {
    let checks: [(&str, Check, Option<u64>); 10] = [
        ("scaling additivity", additivity, Some(5)),
        ("closed-form τ", closed_form_tau, None),
        ("Legendre duality", legendre_duality, None),
        ("auxiliary measure", auxiliary_measure, None),
        ("trace routes", trace_routes, Some(60)),
        ("saturating exponent shift", saturating_shift, Some(600)),
        ("upper bound", upper_bound, None),
        ("prevalent trace spectrum", prevalent_spectrum, None),
        ("property (R)", property_r, Some(120)),
        ("leader oracle", leader_oracle, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let res = check();
        let took = start.elapsed();
        let slow = limit.is_some_and(|s| took > Duration::from_secs(s));
        let (pass, detail) = match res {
            Ok(l) => (l.pass && !slow, l.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |s| format!(", budget {s} s"));
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1} s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64()
        );
    }
    println!("{} of 10 criteria pass", 10 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

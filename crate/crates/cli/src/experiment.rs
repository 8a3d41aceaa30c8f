//! The four claim-level experiments. Each returns its full table of
//! results plus a verdict; writing files is left to [`write_outcome`].

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use tracelab::analysis::{leader_spectrum, leaders, pointwise_exponent, predicted_curves, shift_value, Shift};
use tracelab::capacity::{h_of_r, local_dimension_3, sample_points, scaling_function};
use tracelab::numeric::arange;
use tracelab::synthesis::{probe_fields, CoefficientSource, LinearCombination, RandomMember};
use tracelab::trace::{saturating_trace, tensor_trace};
use tracelab::wavelet::find_offset_schedule;
use tracelab::{CapacityModel, LeaderField, OffsetSchedule, WaveletSpec};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, CliResult};
use crate::output::{num, OutputDir};

/// Depth at which trace heights are drawn.
pub const SAMPLE_DEPTH: u32 = 30;

/// A claim, the statistic tested against it and the outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub claim: &'static str,
    pub pass: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub summary: String,
}

/// Independent seed for sub-stream `tag` of `seed`.
pub fn stream_seed(seed: u64, tag: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng.next_u64()
}

/// Offset schedule for `d'` up to level `J`: loaded from the configured
/// file, otherwise searched.
pub fn schedule_for(cfg: &ExperimentConfig, spec: &WaveletSpec, d_prime: usize) -> CliResult<OffsetSchedule> {
    if let Some(path) = &cfg.schedule.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read schedule {}: {e}", path.display())))?;
        let s: OffsetSchedule = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        if s.d_prime != d_prime {
            return Err(CliError::Precondition(format!("schedule file is for d' = {}, need d' = {d_prime}", s.d_prime)));
        }
        if s.j_max() < cfg.max_level {
            return Err(CliError::Precondition(format!("schedule stops at level {} below J = {}", s.j_max(), cfg.max_level)));
        }
        if s.support != spec.support {
            return Err(CliError::Precondition(format!("schedule is for support {}, wavelet has {}", s.support, spec.support)));
        }
        return Ok(s);
    }
    Ok(find_offset_schedule(spec, d_prime, cfg.max_level, &cfg.schedule.search(0))?)
}

/// Trace heights for one `r`: the configured list, or `samples` draws from
/// `ν_r` (cube centres at depth [`SAMPLE_DEPTH`]).
pub fn trace_heights(cfg: &ExperimentConfig, nu: &CapacityModel, r: f64, seed: u64) -> CliResult<Vec<Vec<f64>>> {
    if let Some(a) = &cfg.trace_points {
        if nu.dim() != 1 {
            return Err(CliError::Config("explicit trace points need a one-dimensional ν".into()));
        }
        return Ok(a.iter().map(|v| vec![*v]).collect());
    }
    let aux = nu.auxiliary(r)?;
    let half = (-(SAMPLE_DEPTH as f64) - 1.0).exp2();
    let pts = sample_points(&aux, SAMPLE_DEPTH, seed, cfg.samples)?;
    Ok(pts.into_iter().map(|p| p.into_iter().map(|v| v + half).collect()).collect())
}

/// Points of `[0,1)` whose binary digits repeat with `period`, the last `t`
/// digits of each block being 1, for `t = 0..=period`; with the closed-form
/// local dimension of a binomial cascade `(w₀, w₁)` at each.
pub fn digit_points(mu: &CapacityModel, period: usize) -> CliResult<Vec<(f64, f64, f64)>> {
    let w = match mu.cascade_weights() {
        Some(w) if w.len() == 2 && w.iter().all(|v| *v > 0.0) => w,
        _ => return Err(CliError::Precondition("closed-form test points need a nondegenerate binomial μ".into())),
    };
    Ok((0..=period)
        .map(|t| {
            let x: f64 = (0..52usize)
                .filter(|i| i % period >= period - t)
                .map(|i| (-(i as f64) - 1.0).exp2())
                .sum();
            let theta = t as f64 / period as f64;
            let h = -(1.0 - theta) * w[0].log2() - theta * w[1].log2();
            (x, theta, h)
        })
        .collect())
}

fn leader_exponent(lf: &LeaderField, x: f64, window: (u32, u32), first: u32) -> CliResult<f64> {
    let lo = window.0.max(first);
    if lo >= window.1 {
        return Ok(f64::NAN);
    }
    Ok(pointwise_exponent(lf, &[x], lo, window.1)?.ls_slope)
}

// ---------------------------------------------------------------- additivity

#[derive(Debug, Clone, Serialize)]
pub struct AdditivityOutcome {
    pub verdict: Verdict,
    pub level: u32,
    pub q: Vec<f64>,
    pub tau_xi: Vec<f64>,
    pub tau_mu: Vec<f64>,
    pub tau_nu: Vec<f64>,
}

/// `τ_{μ⊗ν} = τ_μ + τ_ν` at one level over a `q` grid.
pub fn additivity(cfg: &ExperimentConfig) -> CliResult<AdditivityOutcome> {
    let (mu, nu) = (cfg.mu()?, cfg.nu()?);
    let xi = CapacityModel::product(mu.clone(), nu.clone());
    let level = cfg.level.unwrap_or(12);
    let q = match cfg.q_grid {
        Some(_) => cfg.q_grid(),
        None => arange(-5.0, 5.0, 0.25),
    };
    let t = |m: &CapacityModel| scaling_function(m, &q, level).map(|s| s.tau);
    let (tau_xi, tau_mu, tau_nu) = (t(&xi)?, t(&mu)?, t(&nu)?);
    let worst = (0..q.len()).map(|i| (tau_xi[i] - tau_mu[i] - tau_nu[i]).abs()).fold(0.0, f64::max);
    let tol = cfg.tolerances.additivity;
    let verdict = Verdict {
        claim: ExperimentKind::Additivity.claim(),
        pass: worst <= tol,
        statistic: worst,
        threshold: tol,
        summary: format!("max |tau_xi - tau_mu - tau_nu| = {worst:.3e} at level {level}"),
    };
    Ok(AdditivityOutcome { verdict, level, q, tau_xi, tau_mu, tau_nu })
}

// ---------------------------------------------------------- saturating shift

#[derive(Debug, Clone, Serialize)]
pub struct ShiftRow {
    pub r: f64,
    pub sample: usize,
    pub a: f64,
    pub x: f64,
    pub theta: f64,
    pub h_mu: f64,
    pub h_nu: f64,
    pub first_level: u32,
    pub estimate: f64,
    pub error: f64,
    pub hit: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftSummary {
    pub r: f64,
    pub h_nu: f64,
    pub pairs: usize,
    pub hits: usize,
    pub mean_error: f64,
    pub sd_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftOutcome {
    pub verdict: Verdict,
    pub window: (u32, u32),
    pub schedule_window: usize,
    pub schedule_alpha: f64,
    pub rows: Vec<ShiftRow>,
    pub per_r: Vec<ShiftSummary>,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let v: Vec<f64> = v.iter().copied().filter(|e| e.is_finite()).collect();
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, (v.iter().map(|e| (e - m).powi(2)).sum::<f64>() / n).sqrt())
}

/// Leader exponents of traces of the saturating function against
/// `h_μ(x) + h_ν^r`, on closed-form test points of a binomial `μ`.
pub fn saturating_shift(cfg: &ExperimentConfig) -> CliResult<ShiftOutcome> {
    let (mu, nu) = (cfg.mu()?, cfg.nu()?);
    if mu.dim() != 1 || nu.dim() != 1 {
        return Err(CliError::Precondition("this experiment runs with d = d' = 1".into()));
    }
    let spec = cfg.wavelet()?;
    let sched = schedule_for(cfg, &spec, 1)?;
    let points = digit_points(&mu, 4)?;
    let window = cfg.window();
    let j = cfg.max_level;
    let tol = cfg.tolerances.exponent;
    let mut rows = Vec::new();
    let mut per_r = Vec::new();
    for (ri, &r) in cfg.r_list().iter().enumerate() {
        let h_nu = h_of_r(&nu, r, tracelab::capacity::default_level(&nu))?;
        let heights = trace_heights(cfg, &nu, r, stream_seed(cfg.seed, ri as u64))?;
        let block: Vec<Vec<ShiftRow>> = heights
            .par_iter()
            .enumerate()
            .map(|(s, a)| -> CliResult<Vec<ShiftRow>> {
                let t = saturating_trace(&mu, &nu, &sched, &spec, cfg.q.0, a, j)?;
                let first = t.first_usable_level();
                let lf = leaders(&t.field)?;
                points
                    .iter()
                    .map(|&(x, theta, h_mu)| {
                        let est = leader_exponent(&lf, x, window, first)?;
                        let error = est - (h_mu + h_nu);
                        Ok(ShiftRow {
                            r,
                            sample: s,
                            a: a[0],
                            x,
                            theta,
                            h_mu,
                            h_nu,
                            first_level: first,
                            estimate: est,
                            error,
                            hit: error.abs() <= tol,
                        })
                    })
                    .collect()
            })
            .collect::<CliResult<_>>()?;
        let block: Vec<ShiftRow> = block.into_iter().flatten().collect();
        let errs: Vec<f64> = block.iter().map(|r| r.error).collect();
        let (mean_error, sd_error) = mean_sd(&errs);
        per_r.push(ShiftSummary {
            r,
            h_nu,
            pairs: block.len(),
            hits: block.iter().filter(|r| r.hit).count(),
            mean_error,
            sd_error,
        });
        rows.extend(block);
    }
    let hits = rows.iter().filter(|r| r.hit).count();
    let share = hits as f64 / rows.len().max(1) as f64;
    let need = cfg.tolerances.hit_fraction;
    let verdict = Verdict {
        claim: ExperimentKind::SaturatingShift.claim(),
        pass: share >= need,
        statistic: share,
        threshold: need,
        summary: format!("{hits}/{} pairs within {tol} of h_mu(x) + h_nu^r", rows.len()),
    };
    Ok(ShiftOutcome { verdict, window, schedule_window: sched.window, schedule_alpha: sched.alpha, rows, per_r })
}

// --------------------------------------------------------------- upper bound

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub member: usize,
    pub a: f64,
    pub x: f64,
    pub estimate: f64,
    pub h_mu: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundOutcome {
    pub verdict: Verdict,
    pub h_nu_min: f64,
    pub window: (u32, u32),
    pub rows: Vec<BoundRow>,
}

/// Default evaluation grid: `(i + 1/2)/n`.
pub fn midpoint_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}

/// Leader exponents of traces of random members of `B^ξ_{∞,q}` against the
/// lower bound `ĥ_μ(x) + h_ν^min`, with `ĥ_μ` the ball (3λ) estimate.
pub fn upper_bound(cfg: &ExperimentConfig) -> CliResult<BoundOutcome> {
    let (mu, nu) = (cfg.mu()?, cfg.nu()?);
    let xi = CapacityModel::product(mu.clone(), nu.clone());
    let spec = cfg.wavelet()?;
    let window = cfg.window();
    let xs = cfg.points.clone().unwrap_or_else(|| midpoint_grid(50));
    if mu.dim() != 1 {
        return Err(CliError::Precondition("evaluation points are one-dimensional; need d = 1".into()));
    }
    let h_nu_min = shift_value(&nu, Shift::Min)?;
    let h_mu: Vec<f64> = xs
        .iter()
        .map(|&x| local_dimension_3(&mu, &[x], window.0, window.1).map(|d| d.ls_slope))
        .collect::<Result<_, _>>()?;
    let members: Vec<Vec<BoundRow>> = (0..cfg.samples)
        .into_par_iter()
        .map(|m| -> CliResult<Vec<BoundRow>> {
            let member = RandomMember::new(xi.clone(), cfg.q.0, cfg.max_level, stream_seed(cfg.seed, 2 * m as u64))?;
            let a = match &cfg.trace_points {
                Some(list) => vec![list[m % list.len()]],
                None => {
                    let half = (-(SAMPLE_DEPTH as f64) - 1.0).exp2();
                    let p = sample_points(&nu, SAMPLE_DEPTH, stream_seed(cfg.seed, 2 * m as u64 + 1), 1)?;
                    p[0].iter().map(|v| v + half).collect()
                }
            };
            let t = tensor_trace(&member, &a, &spec)?;
            let lf = leaders(&t.field)?;
            xs.iter()
                .zip(&h_mu)
                .map(|(&x, &hm)| {
                    let est = leader_exponent(&lf, x, window, 0)?;
                    let bound = hm + h_nu_min;
                    Ok(BoundRow { member: m, a: a[0], x, estimate: est, h_mu: hm, bound, margin: est - bound })
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    let rows: Vec<BoundRow> = members.into_iter().flatten().collect();
    let worst = rows.iter().map(|r| r.margin).fold(f64::INFINITY, |m, v| if v.is_nan() { f64::NEG_INFINITY } else { m.min(v) });
    let tol = cfg.tolerances.lower_bound;
    let verdict = Verdict {
        claim: ExperimentKind::UpperBound.claim(),
        pass: worst >= -tol,
        statistic: worst,
        threshold: -tol,
        summary: format!("smallest margin over {} (member, x) pairs: {worst:.4}", rows.len()),
    };
    Ok(BoundOutcome { verdict, h_nu_min, window, rows })
}

// -------------------------------------------------------- prevalent spectrum

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRun {
    pub r: f64,
    pub replicate: usize,
    pub perturbed: bool,
    pub a: Vec<f64>,
    pub betas: Vec<f64>,
    pub h: Vec<f64>,
    pub sigma: Vec<f64>,
    pub predicted: Vec<f64>,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumOutcome {
    pub verdict: Verdict,
    pub window: (u32, u32),
    /// `(r, h_ν^r)` shifts of the predicted curves.
    pub shifts: Vec<(f64, f64)>,
    pub runs: Vec<SpectrumRun>,
}

/// Leader spectra of traces of `f + Σ β_i 𝒢^{(i)}` (and of `f` alone)
/// against `σ_μ(h − h_ν^r)` on the central part of the predicted support.
pub fn prevalent_spectrum(cfg: &ExperimentConfig) -> CliResult<SpectrumOutcome> {
    let (mu, nu) = (cfg.mu()?, cfg.nu()?);
    let xi = CapacityModel::product(mu.clone(), nu.clone());
    let spec = cfg.wavelet()?;
    let sched = schedule_for(cfg, &spec, nu.dim())?;
    let probes = probe_fields(&xi, cfg.q.0, cfg.max_level, sched, cfg.field.p, mu.dim())?;
    if let Some(b) = &cfg.field.betas {
        if b.len() != probes.len() {
            return Err(CliError::Config(format!("{} betas for {} probe fields", b.len(), probes.len())));
        }
    }
    let window = cfg.window();
    let q_grid = cfg.q_grid();
    let frac = cfg.tolerances.support_fraction;
    let mut runs = Vec::new();
    let mut shifts = Vec::new();
    for (ri, &r) in cfg.r_list().iter().enumerate() {
        let curve = predicted_curves(&mu, &nu, Shift::R(r), &q_grid)?;
        shifts.push((r, curve.shift));
        let (lo, hi) = curve.support();
        let cut = 0.5 * (1.0 - frac) * (hi - lo);
        let h = arange(lo + cut, hi - cut, 0.02);
        let predicted: Vec<f64> = h.iter().map(|&v| curve.sigma(v)).collect();
        let heights = trace_heights(cfg, &nu, r, stream_seed(cfg.seed, 100 + ri as u64))?;
        let jobs: Vec<(usize, bool)> = (0..heights.len()).flat_map(|i| [(i, true), (i, false)]).collect();
        let block: Vec<SpectrumRun> = jobs
            .par_iter()
            .map(|&(i, perturbed)| -> CliResult<SpectrumRun> {
                let tag = 1000 * (ri as u64 + 1) + i as u64;
                let member = RandomMember::new(xi.clone(), cfg.q.0, cfg.max_level, stream_seed(cfg.seed, tag))?;
                let betas: Vec<f64> = if !perturbed {
                    vec![0.0; probes.len()]
                } else if let Some(b) = &cfg.field.betas {
                    b.clone()
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, tag + 500_000));
                    let br = cfg.field.beta_range;
                    (0..probes.len()).map(|_| rng.gen_range(-br..=br)).collect()
                };
                let mut terms: Vec<(f64, &dyn CoefficientSource)> = vec![(1.0, &member)];
                terms.extend(betas.iter().zip(&probes).map(|(b, p)| (*b, p as &dyn CoefficientSource)));
                let f = LinearCombination::new(terms)?;
                let t = tensor_trace(&f, &heights[i], &spec)?;
                let lf = leaders(&t.field)?;
                let est = leader_spectrum(&lf, &q_grid, &h, window)?;
                let deviation = est
                    .sigma
                    .iter()
                    .zip(&predicted)
                    .map(|(s, p)| if s.is_finite() && p.is_finite() { (s - p).abs() } else { f64::INFINITY })
                    .fold(0.0, f64::max);
                Ok(SpectrumRun {
                    r,
                    replicate: i,
                    perturbed,
                    a: heights[i].clone(),
                    betas,
                    h: h.clone(),
                    sigma: est.sigma,
                    predicted: predicted.clone(),
                    deviation,
                })
            })
            .collect::<CliResult<_>>()?;
        runs.extend(block);
    }
    let tested: Vec<&SpectrumRun> = runs.iter().filter(|r| r.perturbed).collect();
    let worst = tested.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let ok = tested.iter().filter(|r| r.deviation <= cfg.tolerances.spectrum).count();
    let verdict = Verdict {
        claim: ExperimentKind::PrevalentSpectrum.claim(),
        pass: ok == tested.len(),
        statistic: worst,
        threshold: cfg.tolerances.spectrum,
        summary: format!(
            "{ok}/{} perturbed traces within {} of the shifted spectrum; worst deviation {worst:.3}",
            tested.len(),
            cfg.tolerances.spectrum
        ),
    };
    Ok(SpectrumOutcome { verdict, window, shifts, runs })
}

// ------------------------------------------------------------------ writing

/// Any experiment outcome.
#[derive(Debug, Clone)]
pub enum Outcome {
    Additivity(AdditivityOutcome),
    SaturatingShift(ShiftOutcome),
    UpperBound(BoundOutcome),
    PrevalentSpectrum(SpectrumOutcome),
}

impl Outcome {
    pub fn verdict(&self) -> &Verdict {
        match self {
            Self::Additivity(o) => &o.verdict,
            Self::SaturatingShift(o) => &o.verdict,
            Self::UpperBound(o) => &o.verdict,
            Self::PrevalentSpectrum(o) => &o.verdict,
        }
    }
}

pub fn run(cfg: &ExperimentConfig, kind: ExperimentKind) -> CliResult<Outcome> {
    Ok(match kind {
        ExperimentKind::Additivity => Outcome::Additivity(additivity(cfg)?),
        ExperimentKind::SaturatingShift => Outcome::SaturatingShift(saturating_shift(cfg)?),
        ExperimentKind::UpperBound => Outcome::UpperBound(upper_bound(cfg)?),
        ExperimentKind::PrevalentSpectrum => Outcome::PrevalentSpectrum(prevalent_spectrum(cfg)?),
    })
}

fn b(v: bool) -> String {
    v.to_string()
}

/// CSV tables and `report.json` for an outcome.
pub fn write_outcome(out: &mut OutputDir, outcome: &Outcome) -> CliResult<()> {
    match outcome {
        Outcome::Additivity(o) => {
            out.csv(
                "tau.csv",
                &["q", "tau_xi", "tau_mu", "tau_nu", "residual"],
                (0..o.q.len()).map(|i| {
                    vec![
                        num(o.q[i]),
                        num(o.tau_xi[i]),
                        num(o.tau_mu[i]),
                        num(o.tau_nu[i]),
                        num(o.tau_xi[i] - o.tau_mu[i] - o.tau_nu[i]),
                    ]
                }),
            )?;
        }
        Outcome::SaturatingShift(o) => {
            out.csv(
                "exponents.csv",
                &["r", "sample", "a", "x", "theta", "h_mu", "h_nu", "predicted", "first_level", "estimate", "error", "hit"],
                o.rows.iter().map(|r| {
                    vec![
                        num(r.r),
                        r.sample.to_string(),
                        num(r.a),
                        num(r.x),
                        num(r.theta),
                        num(r.h_mu),
                        num(r.h_nu),
                        num(r.h_mu + r.h_nu),
                        r.first_level.to_string(),
                        num(r.estimate),
                        num(r.error),
                        b(r.hit),
                    ]
                }),
            )?;
            out.csv(
                "summary.csv",
                &["r", "h_nu", "pairs", "hits", "mean_error", "sd_error"],
                o.per_r.iter().map(|s| {
                    vec![num(s.r), num(s.h_nu), s.pairs.to_string(), s.hits.to_string(), num(s.mean_error), num(s.sd_error)]
                }),
            )?;
        }
        Outcome::UpperBound(o) => {
            out.csv(
                "bounds.csv",
                &["member", "a", "x", "estimate", "h_mu", "bound", "margin"],
                o.rows.iter().map(|r| {
                    vec![
                        r.member.to_string(),
                        num(r.a),
                        num(r.x),
                        num(r.estimate),
                        num(r.h_mu),
                        num(r.bound),
                        num(r.margin),
                    ]
                }),
            )?;
        }
        Outcome::PrevalentSpectrum(o) => {
            for run in &o.runs {
                let name = format!(
                    "spectrum_r{}_rep{}_{}.csv",
                    num(run.r),
                    run.replicate,
                    if run.perturbed { "perturbed" } else { "plain" }
                );
                out.csv(
                    &name,
                    &["h", "sigma", "predicted", "deviation"],
                    (0..run.h.len()).map(|i| {
                        vec![
                            num(run.h[i]),
                            num(run.sigma[i]),
                            num(run.predicted[i]),
                            num((run.sigma[i] - run.predicted[i]).abs()),
                        ]
                    }),
                )?;
            }
            out.csv(
                "summary.csv",
                &["r", "predicted_shift", "replicate", "perturbed", "a", "deviation"],
                o.runs.iter().map(|run| {
                    let shift = o.shifts.iter().find(|s| s.0 == run.r).map_or(f64::NAN, |s| s.1);
                    vec![
                        num(run.r),
                        num(shift),
                        run.replicate.to_string(),
                        b(run.perturbed),
                        num(run.a[0]),
                        num(run.deviation),
                    ]
                }),
            )?;
        }
    }
    out.json("report.json", outcome.verdict())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_points_closed_form() {
        let mu = CapacityModel::binomial(0.25).unwrap();
        let pts = digit_points(&mu, 4).unwrap();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0].0, 0.0);
        assert!((pts[0].2 - 2.0).abs() < 1e-15);
        assert!((pts[4].2 + 0.75f64.log2()).abs() < 1e-15);
        // 0.00010001… = 1/15
        assert!((pts[1].0 - 1.0 / 15.0).abs() < 1e-15);
        assert!(digit_points(&CapacityModel::lebesgue(2), 4).is_err());
    }

    #[test]
    fn stream_seeds_differ() {
        assert_ne!(stream_seed(0, 1), stream_seed(0, 2));
        assert_eq!(stream_seed(5, 1), stream_seed(5, 1));
    }
}

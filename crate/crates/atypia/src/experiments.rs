//! Monte Carlo estimation of rare-event probabilities, exponent regression
//! against theory, and the conditional-concentration and coherence
//! experiments.
//!
//! All probabilities are carried in the log domain end to end; importance
//! weights are aggregated by log-sum-exp. Sampling is parallel over
//! fixed-size chunks with one RNG substream per chunk, and the reduction is
//! sequential in chunk order, so results are bit-identical for any worker
//! count.

use rayon::prelude::*;

use crate::qstate::{trace_distance, DensityMatrix, HermitianObservable, QStateError, Spectrum};
use crate::rates::{
    coherence_rate_levy, coherence_rate_upper, levy_comparison_rate, rate_entropy,
    rate_expectation, rate_max_eigenvalue, LevyKind, Minimizer,
};
use crate::sampler::{
    make_tilted_proposal, sample_haar_pure, sample_induced_state, sample_tilted_induced_state,
    SeededStream, TiltedProposal,
};
use crate::solver::{min_rel_entropy, ConstraintKind, ConstraintSet, SolverConfig, SolverError};

const CHUNK: u64 = 4096;

/// One-sided 95% upper bound on a probability unobserved in `n` trials.
pub fn rule_of_three(n_samples: u64) -> f64 {
    3.0 / n_samples as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Tilted,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::Tilted => "tilted",
        })
    }
}

/// One Monte Carlo probability estimate.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EstimatePoint {
    pub n: usize,
    pub p_hat: f64,
    pub stderr: f64,
    /// `ln p_hat`; `-inf` when no hit was observed.
    pub log_p: f64,
    pub n_samples: u64,
    pub method: Method,
    /// Effective sample size `(Σw)²/Σw²`; tilted only.
    pub ess: Option<f64>,
    pub seed: u64,
}

/// Weighted least-squares fit of `−log p` against `n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FitResult {
    /// Empirical exponent, nats per unit of `n`.
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points_used: usize,
    /// Theoretical exponent `m · inf D(π‖ρ)`.
    pub theory_rate: f64,
    pub relative_gap: f64,
    /// `n` values excluded for having no observed hits.
    pub excluded: Vec<usize>,
}

fn log_sum_exp_merge(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

struct TiltedChunk {
    lse1_all: f64,
    lse2_all: f64,
    lse1_hit: f64,
    lse2_hit: f64,
}

/// Estimate `Pr{ρ_Ψ ∈ Ω}` at environment dimension `n` from `n_samples`
/// induced states (dimension `m` is carried by `omega`). The tilted method
/// draws from a proposal aimed at Ω's rate-minimizer and reweights; it falls
/// back to naive with a warning when no usable minimizer exists.
pub fn estimate_probability(
    omega: &ConstraintSet,
    n: usize,
    n_samples: u64,
    method: Method,
    stream: SeededStream,
) -> Result<EstimatePoint, QStateError> {
    if n_samples < 100 {
        return Err(QStateError::OutOfRange(
            "need at least 100 samples".into(),
        ));
    }
    let proposal = match method {
        Method::Naive => None,
        Method::Tilted => match tilt_target(omega) {
            Some(target) => Some(make_tilted_proposal(&target)),
            None => {
                log::warn!("no usable rate-minimizer for tilting; falling back to naive sampling");
                None
            }
        },
    };
    match proposal {
        None => estimate_naive(omega, n, n_samples, stream),
        Some(prop) => estimate_tilted(omega, &prop, n, n_samples, stream),
    }
}

/// The state the importance-sampling proposal is aimed at: the solver's
/// rate-minimizer for Ω, as a concrete density matrix.
pub fn tilt_target(omega: &ConstraintSet) -> Option<DensityMatrix> {
    let result = match min_rel_entropy(omega, &SolverConfig::default()) {
        Ok(r) => r,
        Err(SolverError::NonConvergence { best }) => *best,
        Err(_) => return None,
    };
    match result.minimizer {
        Some(Minimizer::State(rho)) => Some(rho),
        Some(Minimizer::Spectrum(sp)) => sp.to_density().ok(),
        None => None,
    }
}

fn chunk_sizes(n_samples: u64) -> Vec<u64> {
    let full = n_samples / CHUNK;
    let rem = n_samples % CHUNK;
    let mut sizes = vec![CHUNK; full as usize];
    if rem > 0 {
        sizes.push(rem);
    }
    sizes
}

fn estimate_naive(
    omega: &ConstraintSet,
    n: usize,
    n_samples: u64,
    stream: SeededStream,
) -> Result<EstimatePoint, QStateError> {
    let m = omega.dim;
    let sizes = chunk_sizes(n_samples);
    let hits: u64 = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &size)| {
            let mut rng = stream.substream(1 + i as u64).rng();
            let mut h = 0u64;
            for _ in 0..size {
                let rho = sample_induced_state(m, n, &mut rng);
                if omega.contains(&rho) {
                    h += 1;
                }
            }
            h
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let nf = n_samples as f64;
    let p_hat = hits as f64 / nf;
    Ok(EstimatePoint {
        n,
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / nf).sqrt(),
        log_p: if hits == 0 { f64::NEG_INFINITY } else { p_hat.ln() },
        n_samples,
        method: Method::Naive,
        ess: None,
        seed: stream.seed,
    })
}

fn estimate_tilted(
    omega: &ConstraintSet,
    prop: &TiltedProposal,
    n: usize,
    n_samples: u64,
    stream: SeededStream,
) -> Result<EstimatePoint, QStateError> {
    let sizes = chunk_sizes(n_samples);
    let chunks: Vec<TiltedChunk> = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &size)| {
            let mut rng = stream.substream(1 + i as u64).rng();
            let mut c = TiltedChunk {
                lse1_all: f64::NEG_INFINITY,
                lse2_all: f64::NEG_INFINITY,
                lse1_hit: f64::NEG_INFINITY,
                lse2_hit: f64::NEG_INFINITY,
            };
            for _ in 0..size {
                let (rho, lw) = sample_tilted_induced_state(prop, n, &mut rng);
                c.lse1_all = log_sum_exp_merge(c.lse1_all, lw);
                c.lse2_all = log_sum_exp_merge(c.lse2_all, 2.0 * lw);
                if omega.contains(&rho) {
                    c.lse1_hit = log_sum_exp_merge(c.lse1_hit, lw);
                    c.lse2_hit = log_sum_exp_merge(c.lse2_hit, 2.0 * lw);
                }
            }
            c
        })
        .collect();
    // Order-fixed sequential reduction keeps results worker-count independent.
    let mut acc = TiltedChunk {
        lse1_all: f64::NEG_INFINITY,
        lse2_all: f64::NEG_INFINITY,
        lse1_hit: f64::NEG_INFINITY,
        lse2_hit: f64::NEG_INFINITY,
    };
    for c in chunks {
        acc.lse1_all = log_sum_exp_merge(acc.lse1_all, c.lse1_all);
        acc.lse2_all = log_sum_exp_merge(acc.lse2_all, c.lse2_all);
        acc.lse1_hit = log_sum_exp_merge(acc.lse1_hit, c.lse1_hit);
        acc.lse2_hit = log_sum_exp_merge(acc.lse2_hit, c.lse2_hit);
    }
    let nf = n_samples as f64;
    let log_p = acc.lse1_hit - nf.ln();
    let p_hat = log_p.exp();
    // stderr = p̂ · √((N·Σw² / (Σw)² − 1)/N) over the hit weights.
    let stderr = if acc.lse1_hit == f64::NEG_INFINITY {
        0.0
    } else {
        let ratio = (acc.lse2_hit - 2.0 * acc.lse1_hit + nf.ln()).exp();
        p_hat * ((ratio - 1.0).max(0.0) / nf).sqrt()
    };
    let ess = (2.0 * acc.lse1_all - acc.lse2_all).exp();
    Ok(EstimatePoint {
        n,
        p_hat,
        stderr,
        log_p,
        n_samples,
        method: Method::Tilted,
        ess: Some(ess),
        seed: stream.seed,
    })
}

/// Weighted least squares of `−log_p` against `n`; weights `1/stderr(log p)²`
/// with the delta-method `stderr(log p) = stderr/p_hat`. The intercept is
/// retained: sub-exponential prefactors are expected.
pub fn fit_exponent(points: &[EstimatePoint], theory_rate: f64) -> Result<FitResult, QStateError> {
    let mut excluded = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for p in points {
        if !p.log_p.is_finite() {
            excluded.push(p.n);
            continue;
        }
        let stderr_log = if p.p_hat > 0.0 && p.stderr > 0.0 {
            p.stderr / p.p_hat
        } else {
            1e-6 // effectively exact points get a large, finite weight
        };
        xs.push(p.n as f64);
        ys.push(-p.log_p);
        ws.push(1.0 / (stderr_log * stderr_log));
    }
    if xs.len() < 4 {
        return Err(QStateError::OutOfRange(format!(
            "only {} usable points for the fit (need 4)",
            xs.len()
        )));
    }
    let sw: f64 = ws.iter().sum();
    let swx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * x).sum();
    let swy: f64 = ws.iter().zip(&ys).map(|(w, y)| w * y).sum();
    let swxx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * x * x).sum();
    let swxy: f64 = ws
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(w, (x, y))| w * x * y)
        .sum();
    let det = sw * swxx - swx * swx;
    if det <= 0.0 {
        return Err(QStateError::OutOfRange("degenerate fit design".into()));
    }
    let slope = (sw * swxy - swx * swy) / det;
    let intercept = (swxx * swy - swx * swxy) / det;
    let slope_stderr = (sw / det).sqrt();
    let relative_gap = if theory_rate != 0.0 {
        (slope - theory_rate).abs() / theory_rate
    } else {
        slope.abs()
    };
    Ok(FitResult {
        slope,
        intercept,
        slope_stderr,
        points_used: xs.len(),
        theory_rate,
        relative_gap,
        excluded,
    })
}

/// Estimate the probability at each `n` and fit the exponent against the
/// solver's theoretical rate for Ω.
pub fn sweep_exponent(
    omega: &ConstraintSet,
    n_list: &[usize],
    n_samples: u64,
    method: Method,
    stream: SeededStream,
) -> Result<(Vec<EstimatePoint>, FitResult), QStateError> {
    if n_list.len() < 4 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QStateError::OutOfRange(
            "need at least 4 strictly increasing n values".into(),
        ));
    }
    let theory = match min_rel_entropy(omega, &SolverConfig::default()) {
        Ok(r) => r.exponent(),
        Err(SolverError::NonConvergence { best }) => best.exponent(),
        Err(e) => return Err(QStateError::OutOfRange(format!("no theory rate: {e}"))),
    };
    let mut points = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        // Disjoint substream ranges per point.
        let point_stream = stream.substream(((i as u64) + 1) << 32);
        points.push(estimate_probability(
            omega,
            n,
            n_samples,
            method,
            point_stream,
        )?);
    }
    let fit = fit_exponent(&points, theory)?;
    Ok((points, fit))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConcentrationRow {
    pub n: usize,
    /// Self-normalized conditional mass at trace distance > ε from the
    /// rate-minimizer, given that the sample landed in Ω.
    pub outside_mass: f64,
    /// Decay factor relative to the previous row (1 for the first row).
    pub ratio: f64,
    pub hits: u64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConcentrationResult {
    pub rows: Vec<ConcentrationRow>,
    /// Slope of `−ln(outside mass)` against `n`.
    pub delta_hat: f64,
    pub delta_stderr: f64,
}

/// Conditional concentration around the rate-minimizer: among tilted samples
/// conditioned on Ω, the weighted fraction farther than `eps` from the
/// minimizer, per `n`. For spectral (unitarily invariant) sets the distance
/// is taken between sorted spectra, since the minimizer is a unitary orbit.
pub fn conditional_concentration(
    omega: &ConstraintSet,
    n_list: &[usize],
    eps: f64,
    n_samples: u64,
    stream: SeededStream,
) -> Result<ConcentrationResult, QStateError> {
    let target = tilt_target(omega).ok_or_else(|| {
        QStateError::OutOfRange("constraint set has no usable rate-minimizer".into())
    })?;
    let spectral = matches!(omega.kind, ConstraintKind::Spectral(_));
    let target_spec = target.spectrum();
    let prop = make_tilted_proposal(&target);
    let mut rows: Vec<ConcentrationRow> = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let point_stream = stream.substream(((i as u64) + 1) << 32);
        let sizes = chunk_sizes(n_samples);
        // (lse of hit weights, lse of outside-hit weights, hit count)
        let chunks: Vec<(f64, f64, u64)> = sizes
            .par_iter()
            .enumerate()
            .map(|(c, &size)| {
                let mut rng = point_stream.substream(1 + c as u64).rng();
                let mut lse_hit = f64::NEG_INFINITY;
                let mut lse_out = f64::NEG_INFINITY;
                let mut hits = 0u64;
                for _ in 0..size {
                    let (rho, lw) = sample_tilted_induced_state(&prop, n, &mut rng);
                    if !omega.contains(&rho) {
                        continue;
                    }
                    hits += 1;
                    lse_hit = log_sum_exp_merge(lse_hit, lw);
                    let dist = if spectral {
                        sorted_spectrum_distance(&rho.spectrum(), &target_spec)
                    } else {
                        trace_distance(&rho, &target)?
                    };
                    if dist > eps {
                        lse_out = log_sum_exp_merge(lse_out, lw);
                    }
                }
                Ok((lse_hit, lse_out, hits))
            })
            .collect::<Result<_, QStateError>>()?;
        let mut lse_hit = f64::NEG_INFINITY;
        let mut lse_out = f64::NEG_INFINITY;
        let mut hits = 0u64;
        for (h, o, c) in chunks {
            lse_hit = log_sum_exp_merge(lse_hit, h);
            lse_out = log_sum_exp_merge(lse_out, o);
            hits += c;
        }
        let outside_mass = if hits == 0 {
            f64::NAN // row reported as empty
        } else {
            (lse_out - lse_hit).exp()
        };
        let ratio = match rows.last() {
            Some(prev) if prev.outside_mass > 0.0 => outside_mass / prev.outside_mass,
            _ => 1.0,
        };
        rows.push(ConcentrationRow {
            n,
            outside_mass,
            ratio,
            hits,
        });
    }
    // OLS of −ln(outside mass) on n over usable rows.
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.outside_mass.is_finite() && r.outside_mass > 0.0)
        .map(|r| (r.n as f64, -r.outside_mass.ln()))
        .collect();
    let (delta_hat, delta_stderr) = ols_slope(&usable);
    Ok(ConcentrationResult {
        rows,
        delta_hat,
        delta_stderr,
    })
}

fn sorted_spectrum_distance(a: &Spectrum, b: &Spectrum) -> f64 {
    0.5 * a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}

fn ols_slope(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    if points.len() < 3 {
        return (f64::NAN, f64::NAN);
    }
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let var = ss_res / (n - 2.0) * (n / det);
    (slope, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CoherenceRow {
    pub n: usize,
    /// Estimate of `Pr{p*(Ψ) ≥ κ}`: Monte Carlo where the event is
    /// resolvable, otherwise the geometric midpoint of the sandwich bounds.
    pub p_hat: f64,
    pub stderr: f64,
    /// Exact single-coordinate law `(1−κ)^{n−1}`.
    pub p_exact: f64,
    pub mc: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CoherenceResult {
    pub rows: Vec<CoherenceRow>,
    pub fit: FitResult,
}

/// Exceedance experiment for the largest squared amplitude `p*` of a Haar
/// vector. The single-coordinate tail is exact: `(1−κ)^{n−1}`; the `p*` tail
/// is sandwiched between it and `n` times it, and the fit uses Monte Carlo
/// where feasible and the sandwich midpoint elsewhere.
pub fn coherence_experiment(
    kappa: f64,
    n_list: &[usize],
    n_samples: u64,
    stream: SeededStream,
) -> Result<CoherenceResult, QStateError> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(QStateError::OutOfRange("kappa must be in (0,1)".into()));
    }
    if n_list.len() < 4 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QStateError::OutOfRange(
            "need at least 4 strictly increasing n values".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        if n < 2 {
            return Err(QStateError::OutOfRange("need n ≥ 2".into()));
        }
        let p_single = (1.0 - kappa).powi(n as i32 - 1);
        // MC only where the union-bound tail is resolvable in the budget.
        let resolvable = n_samples as f64 * n as f64 * p_single >= 100.0;
        if resolvable {
            let point_stream = stream.substream(((i as u64) + 1) << 32);
            let sizes = chunk_sizes(n_samples);
            let hits: u64 = sizes
                .par_iter()
                .enumerate()
                .map(|(c, &size)| {
                    let mut rng = point_stream.substream(1 + c as u64).rng();
                    let mut h = 0u64;
                    for _ in 0..size {
                        let psi = sample_haar_pure(n, &mut rng);
                        let p_star = psi.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
                        if p_star >= kappa {
                            h += 1;
                        }
                    }
                    h
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            let p_hat = hits as f64 / n_samples as f64;
            rows.push(CoherenceRow {
                n,
                p_hat,
                stderr: (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
                p_exact: p_single,
                mc: true,
            });
        } else {
            // Geometric midpoint √n·(1−κ)^{n−1}; half the sandwich width in
            // log domain serves as its uncertainty.
            let p_hat = (n as f64).sqrt() * p_single;
            rows.push(CoherenceRow {
                n,
                p_hat,
                stderr: p_hat * 0.5 * (n as f64).ln(),
                p_exact: p_single,
                mc: false,
            });
        }
    }
    let points: Vec<EstimatePoint> = rows
        .iter()
        .map(|r| EstimatePoint {
            n: r.n,
            p_hat: r.p_hat,
            stderr: r.stderr,
            log_p: if r.p_hat > 0.0 {
                r.p_hat.ln()
            } else {
                f64::NEG_INFINITY
            },
            n_samples,
            method: Method::Naive,
            ess: None,
            seed: stream.seed,
        })
        .collect();
    let fit = fit_exponent(&points, coherence_rate_upper(kappa)?)?;
    Ok(CoherenceResult { rows, fit })
}

/// Exact single-coordinate exceedance probability `Pr{|⟨e₁|Ψ⟩|² ≥ κ}`.
pub fn coherence_single_law(kappa: f64, n: usize) -> f64 {
    (1.0 - kappa).powi(n as i32 - 1)
}

/// Monte Carlo estimate of the single-coordinate exceedance, for checking
/// the exact law.
pub fn coherence_single_mc(
    kappa: f64,
    n: usize,
    n_samples: u64,
    stream: SeededStream,
) -> EstimatePoint {
    let sizes = chunk_sizes(n_samples);
    let hits: u64 = sizes
        .par_iter()
        .enumerate()
        .map(|(c, &size)| {
            let mut rng = stream.substream(1 + c as u64).rng();
            let mut h = 0u64;
            for _ in 0..size {
                let psi = sample_haar_pure(n, &mut rng);
                if psi[0].norm_sqr() >= kappa {
                    h += 1;
                }
            }
            h
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let p_hat = hits as f64 / n_samples as f64;
    EstimatePoint {
        n,
        p_hat,
        stderr: (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
        log_p: if hits == 0 {
            f64::NEG_INFINITY
        } else {
            p_hat.ln()
        },
        n_samples,
        method: Method::Naive,
        ess: None,
        seed: stream.seed,
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CompareRow {
    pub param: f64,
    /// Exact probability-decay exponent `m · inf D(π‖ρ)`.
    pub exact: f64,
    /// Exponent implied by the earlier concentration bound.
    pub levy: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub enum CompareKind {
    MaxEigenvalue { m: usize, eps_list: Vec<f64> },
    Entropy { m: usize, delta_list: Vec<f64> },
    Expectation { obs: HermitianObservable, w_list: Vec<f64> },
    Coherence { omega_list: Vec<f64> },
}

/// Exact exponents next to the exponents implied by prior concentration
/// bounds, with their ratio.
pub fn compare_bounds_report(kind: &CompareKind) -> Result<Vec<CompareRow>, QStateError> {
    let mut rows = Vec::new();
    match kind {
        CompareKind::MaxEigenvalue { m, eps_list } => {
            for &eps in eps_list {
                let exact = rate_max_eigenvalue(eps, *m)?.exponent();
                let levy = levy_comparison_rate(LevyKind::MaxEigenvalue { m: *m, eps })?;
                rows.push(CompareRow {
                    param: eps,
                    exact,
                    levy,
                    ratio: exact / levy,
                });
            }
        }
        CompareKind::Entropy { m, delta_list } => {
            for &delta in delta_list {
                let exact = rate_entropy(1.0 - delta, *m)?.exponent();
                let levy = levy_comparison_rate(LevyKind::Entropy { m: *m, delta })?;
                rows.push(CompareRow {
                    param: delta,
                    exact,
                    levy,
                    ratio: exact / levy,
                });
            }
        }
        CompareKind::Expectation { obs, w_list } => {
            let gap = {
                let ev = obs.eigenvalues();
                ev[0] - ev[ev.len() - 1]
            };
            for &w in w_list {
                let exact = rate_expectation(w, obs)?.exponent();
                let levy = levy_comparison_rate(LevyKind::ExpectationEigenGap {
                    m: obs.dim(),
                    w,
                    eigen_gap: gap,
                })?;
                rows.push(CompareRow {
                    param: w,
                    exact,
                    levy,
                    ratio: exact / levy,
                });
            }
        }
        CompareKind::Coherence { omega_list } => {
            for &omega in omega_list {
                let exact = coherence_rate_upper(omega)?;
                let levy = coherence_rate_levy(omega)?;
                rows.push(CompareRow {
                    param: omega,
                    exact,
                    levy,
                    ratio: exact / levy,
                });
            }
        }
    }
    Ok(rows)
}

//! Generic numerical minimization of `D(π‖ρ)` over declarative constraint
//! sets, plus the scalar root-finders shared with the closed-form rates.
//!
//! Three set kinds are supported: linear expectation constraints (solved in
//! Hermitian coordinates by alternating affine projection and projected
//! gradient descent, with an active-set sweep for inequalities), spectral
//! constraints (solved on the probability simplex by an augmented-Lagrangian
//! projected-gradient scheme with seeded restarts), and qubit Bloch-region
//! predicates (solved by dense grid search with local refinement). All
//! relations are closed (`=`, `≥`, `≤`); strict inequalities are rejected
//! upstream because the infimum over an open set need not be attained.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qstate::{
    bloch_from_qubit, qubit_from_bloch, BlochVector, DensityMatrix,
    HermitianObservable, QStateError, Spectrum,
};
use crate::rates::{hermitian_basis, Diagnostics, Minimizer, RateResult};

pub const CONSTRAINT_TOL: f64 = 1e-8;
pub const INFEASIBLE_TOL: f64 = 1e-4;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("constraint set is infeasible (residual {0:.3e})")]
    Infeasible(f64),
    #[error("solver did not converge (best value {}, residual {:.3e})", best.rate, best.diagnostics.residual)]
    NonConvergence { best: Box<RateResult> },
    #[error(transparent)]
    Invalid(#[from] QStateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

impl Relation {
    /// Violation of `value REL target`; zero when satisfied.
    fn violation(&self, value: f64, target: f64) -> f64 {
        match self {
            Relation::Eq => (value - target).abs(),
            Relation::Ge => (target - value).max(0.0),
            Relation::Le => (value - target).max(0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub observable: HermitianObservable,
    pub target: f64,
    pub relation: Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralFn {
    LambdaMax,
    Entropy,
    TraceDistToUniform,
}

impl SpectralFn {
    fn eval(&self, p: &[f64]) -> f64 {
        let m = p.len() as f64;
        match self {
            SpectralFn::LambdaMax => p.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            SpectralFn::Entropy => p
                .iter()
                .map(|&x| if x > 1e-300 { -x * x.ln() } else { 0.0 })
                .sum(),
            SpectralFn::TraceDistToUniform => {
                0.5 * p.iter().map(|&x| (x - 1.0 / m).abs()).sum::<f64>()
            }
        }
    }

    fn grad(&self, p: &[f64], out: &mut [f64]) {
        let m = p.len() as f64;
        match self {
            SpectralFn::LambdaMax => {
                out.fill(0.0);
                let mut arg = 0;
                for (k, &x) in p.iter().enumerate() {
                    if x > p[arg] {
                        arg = k;
                    }
                }
                out[arg] = 1.0;
            }
            SpectralFn::Entropy => {
                for (o, &x) in out.iter_mut().zip(p.iter()) {
                    *o = -x.max(1e-300).ln() - 1.0;
                }
            }
            SpectralFn::TraceDistToUniform => {
                for (o, &x) in out.iter_mut().zip(p.iter()) {
                    *o = 0.5 * (x - 1.0 / m).signum();
                }
            }
        }
    }

    /// Attainable range over the simplex.
    fn range(&self, m: usize) -> (f64, f64) {
        let mf = m as f64;
        match self {
            SpectralFn::LambdaMax => (1.0 / mf, 1.0),
            SpectralFn::Entropy => (0.0, mf.ln()),
            SpectralFn::TraceDistToUniform => (0.0, 1.0 - 1.0 / mf),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralConstraint {
    pub function: SpectralFn,
    pub target: f64,
    pub relation: Relation,
}

/// Closed predicate on the qubit Bloch ball.
#[derive(Debug, Clone, PartialEq)]
pub enum BlochPredicate {
    /// `‖t‖ ≥ r`.
    NormAtLeast(f64),
    /// `axis·t ≥ offset`.
    Halfspace { axis: [f64; 3], offset: f64 },
}

impl BlochPredicate {
    fn holds(&self, t: &[f64; 3]) -> bool {
        match self {
            BlochPredicate::NormAtLeast(r) => {
                (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt() >= *r
            }
            BlochPredicate::Halfspace { axis, offset } => {
                axis[0] * t[0] + axis[1] * t[1] + axis[2] * t[2] >= *offset
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum ConstraintKind {
    Linear(Vec<LinearConstraint>),
    Spectral(SpectralConstraint),
    BlochRegion(BlochPredicate),
}

/// A declarative description of a closed region of state space.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub dim: usize,
    pub kind: ConstraintKind,
}

impl ConstraintSet {
    pub fn new(dim: usize, kind: ConstraintKind) -> Result<Self, QStateError> {
        if dim == 0 {
            return Err(QStateError::OutOfRange("dimension must be positive".into()));
        }
        match &kind {
            ConstraintKind::Linear(cs) => {
                if cs.is_empty() {
                    return Err(QStateError::OutOfRange(
                        "at least one constraint is required".into(),
                    ));
                }
                for c in cs {
                    if c.observable.dim() != dim {
                        return Err(QStateError::DimensionMismatch(c.observable.dim(), dim));
                    }
                }
            }
            ConstraintKind::BlochRegion(_) => {
                if dim != 2 {
                    return Err(QStateError::OutOfRange(
                        "Bloch regions are only defined for dimension 2".into(),
                    ));
                }
            }
            ConstraintKind::Spectral(_) => {}
        }
        Ok(Self { dim, kind })
    }

    /// Membership test for a sampled state (closed relations; equalities are
    /// interpreted within 1e−9).
    pub fn contains(&self, rho: &DensityMatrix) -> bool {
        match &self.kind {
            ConstraintKind::Linear(cs) => cs.iter().all(|c| {
                let v = c.observable.expectation(rho).unwrap_or(f64::NAN);
                match c.relation {
                    Relation::Eq => (v - c.target).abs() <= 1e-9,
                    Relation::Ge => v >= c.target,
                    Relation::Le => v <= c.target,
                }
            }),
            ConstraintKind::Spectral(_) => self.contains_spectrum(&rho.spectrum()),
            ConstraintKind::BlochRegion(pred) => match bloch_from_qubit(rho) {
                Ok(b) => pred.holds(&b.0),
                Err(_) => false,
            },
        }
    }

    /// Fast path for spectral kinds when the caller already has a spectrum.
    pub fn contains_spectrum(&self, spec: &Spectrum) -> bool {
        match &self.kind {
            ConstraintKind::Spectral(c) => {
                let v = c.function.eval(spec.values());
                match c.relation {
                    Relation::Eq => (v - c.target).abs() <= 1e-9,
                    Relation::Ge => v >= c.target,
                    Relation::Le => v <= c.target,
                }
            }
            _ => panic!("contains_spectrum is only defined for spectral constraint sets"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 10_000,
            grad_tol: 1e-6,
            restarts: 4,
            seed: 0x5eed,
        }
    }
}

pub struct NuSolution {
    pub nu: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Root of `(1/m)Σ_k 1/(1 − ν(w−λ_k)) = 1` with `ν ≠ 0` and every factor
/// `1 − ν(w−λ_k)` positive; requires `λ_min < w < λ_max`.
pub fn solve_nu(w: f64, obs: &HermitianObservable) -> Result<NuSolution, QStateError> {
    let lams = obs.eigenvalues();
    let m = lams.len() as f64;
    let (lam_max, lam_min) = (lams[0], *lams.last().unwrap());
    if !(lam_min < w && w < lam_max) || w == 0.0 {
        return Err(QStateError::OutOfRange(format!(
            "no admissible multiplier: need λ_min < w < λ_max and w ≠ 0, got w={w}"
        )));
    }
    let d: Vec<f64> = lams.iter().map(|&l| w - l).collect();
    // Positivity interval for ν: (max_{d<0} 1/d, min_{d>0} 1/d) ∋ 0.
    let nu_lo = d
        .iter()
        .filter(|&&x| x < 0.0)
        .map(|&x| 1.0 / x)
        .fold(f64::NEG_INFINITY, f64::max);
    let nu_hi = d
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| 1.0 / x)
        .fold(f64::INFINITY, f64::min);
    let g = |nu: f64| -> f64 { d.iter().map(|&dk| 1.0 / (1.0 - nu * dk)).sum::<f64>() / m };
    // g is convex with g(0) = 1, g'(0) = w, and g → ∞ at both interval
    // endpoints, so the nontrivial root is on the side opposite to sign(w).
    let endpoint = if w > 0.0 { nu_lo } else { nu_hi };
    let mut iterations = 0usize;
    let mut hi_theta = 0.0; // fraction of the way to the blow-up endpoint
    for j in 1..=60 {
        let th = 1.0 - 0.5_f64.powi(j);
        iterations += 1;
        if g(th * endpoint) > 1.0 {
            hi_theta = th;
            break;
        }
    }
    if hi_theta == 0.0 {
        return Err(QStateError::OutOfRange(
            "failed to bracket the multiplier equation".into(),
        ));
    }
    let mut lo_theta = 0.0;
    let (mut a, mut b) = (lo_theta, hi_theta);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        iterations += 1;
        if g(mid * endpoint) > 1.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    lo_theta = 0.5 * (a + b);
    let mut nu = lo_theta * endpoint;
    // Newton polish on g(ν) − 1.
    for _ in 0..50 {
        let gv = g(nu) - 1.0;
        let gp: f64 = d.iter().map(|&dk| dk / (1.0 - nu * dk).powi(2)).sum::<f64>() / m;
        if gp == 0.0 {
            break;
        }
        let next = nu - gv / gp;
        iterations += 1;
        if !next.is_finite() || (next - nu).abs() < 1e-18 {
            nu = if next.is_finite() { next } else { nu };
            break;
        }
        nu = next;
    }
    let residual = (g(nu) - 1.0).abs();
    Ok(NuSolution {
        nu,
        residual,
        iterations,
    })
}

pub struct EntropyRoot {
    pub r_star: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Smaller root `r* ∈ (0, μ/m]` of `𝒟(r ‖ μ/m) = (1−η) ln m`.
pub fn solve_entropy_root(mu: usize, eta: f64, m: usize) -> Result<EntropyRoot, QStateError> {
    if !(1..m).contains(&mu) || !(eta > 0.0 && eta < 1.0) {
        return Err(QStateError::OutOfRange(
            "need 1 ≤ μ ≤ m−1 and η ∈ (0,1)".into(),
        ));
    }
    let alpha = mu as f64 / m as f64;
    let rhs = (1.0 - eta) * (m as f64).ln();
    let f = |r: f64| crate::qstate::binary_rel_entropy(r, alpha).unwrap() - rhs;
    // 𝒟(·‖α) decreases on (0, α]; the branch is solvable iff 𝒟(0‖α) ≥ rhs.
    if f(0.0) < 0.0 {
        return Err(QStateError::OutOfRange(format!(
            "branch μ={mu} cannot reach the entropy target"
        )));
    }
    let (mut lo, mut hi) = (0.0, alpha);
    let mut iterations = 0usize;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..20 {
        // f'(r) = ln(r(1−α)/((1−r)α)).
        let fp = (r * (1.0 - alpha) / ((1.0 - r) * alpha)).ln();
        if fp == 0.0 || r <= 0.0 || r >= 1.0 {
            break;
        }
        let next = r - f(r) / fp;
        iterations += 1;
        if !next.is_finite() || !(0.0..alpha + 1e-12).contains(&next) {
            break;
        }
        if (next - r).abs() < 1e-18 {
            r = next;
            break;
        }
        r = next;
    }
    Ok(EntropyRoot {
        r_star: r.min(alpha),
        residual: f(r.min(alpha)).abs(),
        iterations,
    })
}

/// Euclidean projection onto the probability simplex, then a strict-interior
/// floor (the objective diverges at the boundary anyway).
fn project_simplex(p: &mut [f64]) {
    let mut sorted = p.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        cum += v;
        let t = (cum - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    let mut sum = 0.0;
    for x in p.iter_mut() {
        *x = (*x - theta).max(1e-15);
        sum += *x;
    }
    for x in p.iter_mut() {
        *x /= sum;
    }
}

fn simplex_objective(p: &[f64]) -> f64 {
    let m = p.len() as f64;
    let mut acc = 0.0;
    for &x in p {
        if x <= 1e-14 {
            return f64::INFINITY;
        }
        acc -= (m * x).ln() / m;
    }
    acc
}

/// Minimize `D(π‖·)` over spectra satisfying one scalar constraint, by an
/// augmented Lagrangian with projected-gradient inner loops.
/// Two-level spectrum (`k` entries at `a`, `m-k` at `(1-ka)/(m-k)`) with
/// `f = target`, found by bisection in `a`; `None` when the split cannot
/// reach the target.
fn two_level_on_surface(m: usize, k: usize, function: SpectralFn, target: f64) -> Option<Vec<f64>> {
    let mf = m as f64;
    let kf = k as f64;
    let spectrum = |a: f64| -> Vec<f64> {
        let b = (1.0 - kf * a) / (mf - kf);
        let mut p = vec![b; m];
        for q in p.iter_mut().take(k) {
            *q = a;
        }
        p
    };
    let lo = 1.0 / mf + 1e-12;
    let hi = (1.0 - (mf - kf) * 1e-9) / kf;
    if hi <= lo {
        return None;
    }
    let g = |a: f64| function.eval(&spectrum(a)) - target;
    let (glo, ghi) = (g(lo), g(hi));
    if glo * ghi > 0.0 {
        return None;
    }
    // Orient so g < 0 at `lo` and g ≥ 0 at `hi`; g is monotone in `a`.
    let (mut lo, mut hi) = if glo <= 0.0 { (lo, hi) } else { (hi, lo) };
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(spectrum(0.5 * (lo + hi)))
}

fn solve_spectral(
    m: usize,
    c: &SpectralConstraint,
    cfg: &SolverConfig,
) -> Result<RateResult, SolverError> {
    let (fmin, fmax) = c.function.range(m);
    let slack = 1e-12;
    let reachable = match c.relation {
        Relation::Eq => c.target >= fmin - slack && c.target <= fmax + slack,
        Relation::Ge => c.target <= fmax + slack,
        Relation::Le => c.target >= fmin - slack,
    };
    if !reachable {
        return Err(SolverError::Infeasible(match c.relation {
            Relation::Ge => c.target - fmax,
            _ => (fmin - c.target).max(c.target - fmax),
        }));
    }
    let uniform = vec![1.0 / m as f64; m];
    if c.relation.violation(c.function.eval(&uniform), c.target) <= 1e-12 {
        return Ok(RateResult {
            rate: 0.0,
            dim: m,
            minimizer: Some(Minimizer::Spectrum(Spectrum::from_unsorted(&uniform))),
            branch: None,
            diagnostics: Diagnostics::default(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(Vec<f64>, f64, f64)> = None; // (p, D, violation)
    let mut total_iters = 0usize;
    let mut grad = vec![0.0; m];
    let mut fgrad = vec![0.0; m];
    // Deterministic warm starts: the uniform point plus, for every split k,
    // the two-level spectrum on the constraint surface. The constrained
    // minimizer of each function here is two-level, and the surface has one
    // local basin per split, so these land each restart in a distinct basin.
    let mut starts: Vec<Vec<f64>> = vec![uniform.clone()];
    for k in 1..m {
        if let Some(p) = two_level_on_surface(m, k, c.function, c.target) {
            starts.push(p);
        }
    }
    let n_starts = starts.len();
    for restart in 0..n_starts + cfg.restarts {
        let mut p: Vec<f64> = if restart < n_starts {
            starts[restart].clone()
        } else {
            // Dirichlet(1) start: normalized exponentials.
            let draws: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
            let s: f64 = draws.iter().sum();
            draws.iter().map(|x| x / s).collect()
        };
        project_simplex(&mut p);
        let mut lambda = 0.0;
        let mut mu_pen = 10.0;
        let mut step = 0.1;
        for _outer in 0..30 {
            let lagrangian = |p: &[f64], lambda: f64, mu_pen: f64| -> f64 {
                let base = simplex_objective(p);
                if base.is_infinite() {
                    return base;
                }
                let f = c.function.eval(p);
                base + match c.relation {
                    Relation::Eq => {
                        let h = f - c.target;
                        lambda * h + 0.5 * mu_pen * h * h
                    }
                    Relation::Ge => {
                        let g = c.target - f;
                        ((lambda + mu_pen * g).max(0.0).powi(2) - lambda * lambda) / (2.0 * mu_pen)
                    }
                    Relation::Le => {
                        let g = f - c.target;
                        ((lambda + mu_pen * g).max(0.0).powi(2) - lambda * lambda) / (2.0 * mu_pen)
                    }
                }
            };
            let inner_cap = (cfg.max_iters / 30).max(200);
            let mut val = lagrangian(&p, lambda, mu_pen);
            for _inner in 0..inner_cap {
                total_iters += 1;
                let f = c.function.eval(&p);
                c.function.grad(&p, &mut fgrad);
                let coef = match c.relation {
                    Relation::Eq => lambda + mu_pen * (f - c.target),
                    Relation::Ge => -(lambda + mu_pen * (c.target - f)).max(0.0),
                    Relation::Le => (lambda + mu_pen * (f - c.target)).max(0.0),
                };
                let mf = m as f64;
                for k in 0..m {
                    grad[k] = -1.0 / (mf * p[k]) + coef * fgrad[k];
                }
                // Projected-gradient stationarity measure.
                let mut trial = p.clone();
                for k in 0..m {
                    trial[k] -= 1e-6 * grad[k];
                }
                project_simplex(&mut trial);
                let stat: f64 = trial
                    .iter()
                    .zip(p.iter())
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    / 1e-6;
                if stat <= cfg.grad_tol * 0.1 {
                    break;
                }
                let mut accepted = false;
                for _bt in 0..60 {
                    let mut cand = p.clone();
                    for k in 0..m {
                        cand[k] -= step * grad[k];
                    }
                    project_simplex(&mut cand);
                    let cval = lagrangian(&cand, lambda, mu_pen);
                    if cval < val - 1e-16 {
                        p = cand;
                        val = cval;
                        accepted = true;
                        step *= 1.3;
                        break;
                    }
                    step *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            let f = c.function.eval(&p);
            let violation = c.relation.violation(f, c.target);
            match c.relation {
                Relation::Eq => lambda += mu_pen * (f - c.target),
                Relation::Ge => lambda = (lambda + mu_pen * (c.target - f)).max(0.0),
                Relation::Le => lambda = (lambda + mu_pen * (f - c.target)).max(0.0),
            }
            mu_pen = (mu_pen * 4.0).min(1e9);
            if violation <= 1e-11 {
                break;
            }
        }
        // Boundary polish: when the optimum is on the constraint surface,
        // drive the residual down along the constraint gradient.
        let violation = c.relation.violation(c.function.eval(&p), c.target);
        if violation > 1e-12 {
            c.function.grad(&p, &mut fgrad);
            let mean = fgrad.iter().sum::<f64>() / m as f64;
            let dir: Vec<f64> = fgrad.iter().map(|x| x - mean).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                let eval_at = |s: f64| -> (Vec<f64>, f64) {
                    let mut q = p.clone();
                    for k in 0..m {
                        q[k] += s * dir[k] / norm;
                    }
                    project_simplex(&mut q);
                    let f = c.function.eval(&q);
                    (q, f - c.target)
                };
                let h0 = eval_at(0.0).1;
                let mut sa = 0.0;
                let mut sb = h0.signum() * -0.2;
                let mut ok = false;
                for _ in 0..40 {
                    if eval_at(sb).1 * h0 < 0.0 {
                        ok = true;
                        break;
                    }
                    sb *= 0.5;
                }
                if ok {
                    for _ in 0..100 {
                        let mid = 0.5 * (sa + sb);
                        if eval_at(mid).1 * h0 > 0.0 {
                            sa = mid;
                        } else {
                            sb = mid;
                        }
                    }
                    let (q, _) = eval_at(0.5 * (sa + sb));
                    if c.relation.violation(c.function.eval(&q), c.target) < violation {
                        p = q;
                    }
                }
            }
        }
        let d_val = simplex_objective(&p);
        let violation = c.relation.violation(c.function.eval(&p), c.target);
        let better = match &best {
            None => true,
            Some((_, bd, bv)) => {
                let feas_new = violation <= CONSTRAINT_TOL;
                let feas_old = *bv <= CONSTRAINT_TOL;
                (feas_new && !feas_old)
                    || (feas_new == feas_old && d_val < *bd)
                    || (!feas_new && !feas_old && violation < *bv)
            }
        };
        if better {
            best = Some((p.clone(), d_val, violation));
        }
    }
    // The surface starts are exact candidates in their own right (violation
    // ~0 by construction); for two-level minimizers they are the optimum to
    // bisection precision, tighter than the iterative polish reaches.
    for cand in starts.iter().skip(1) {
        let d_val = simplex_objective(cand);
        let violation = c.relation.violation(c.function.eval(cand), c.target);
        let better = match &best {
            None => true,
            Some((_, bd, bv)) => {
                let feas_new = violation <= CONSTRAINT_TOL;
                let feas_old = *bv <= CONSTRAINT_TOL;
                (feas_new && !feas_old)
                    || (feas_new == feas_old && d_val < *bd)
                    || (!feas_new && !feas_old && violation < *bv)
            }
        };
        if better {
            best = Some((cand.clone(), d_val, violation));
        }
    }
    let (p, d_val, violation) = best.unwrap();
    let result = RateResult {
        rate: d_val,
        dim: m,
        minimizer: Some(Minimizer::Spectrum(Spectrum::from_unsorted(&p))),
        branch: None,
        diagnostics: Diagnostics {
            iterations: total_iters,
            residual: violation,
        },
    };
    if violation >= INFEASIBLE_TOL {
        return Err(SolverError::Infeasible(violation));
    }
    if violation > CONSTRAINT_TOL {
        return Err(SolverError::NonConvergence {
            best: Box::new(result),
        });
    }
    Ok(result)
}

/// Coordinates of a Hermitian matrix in the orthonormal operator basis.
struct CoordinateSpace {
    m: usize,
    basis: Vec<HermitianObservable>,
}

impl CoordinateSpace {
    fn new(m: usize) -> Self {
        Self {
            m,
            basis: hermitian_basis(m),
        }
    }

    fn to_matrix(&self, t: &DVector<f64>) -> DMatrix<Complex64> {
        let mut acc = DMatrix::<Complex64>::zeros(self.m, self.m);
        for (coef, a) in t.iter().zip(self.basis.iter()) {
            acc += a.matrix() * Complex64::new(*coef, 0.0);
        }
        acc
    }

    fn coords(&self, x: &DMatrix<Complex64>) -> DVector<f64> {
        DVector::from_iterator(
            self.m * self.m,
            self.basis
                .iter()
                .map(|a| (a.matrix() * x).trace().re / self.m as f64),
        )
    }
}

struct AffineSystem {
    c: DMatrix<f64>,
    rhs: DVector<f64>,
    /// Pseudo-inverse of `c`, for affine and null-space projection.
    pinv: DMatrix<f64>,
}

impl AffineSystem {
    fn new(space: &CoordinateSpace, rows: &[(&HermitianObservable, f64)]) -> Self {
        let n = space.m * space.m;
        let mut c = DMatrix::zeros(rows.len(), n);
        let mut rhs = DVector::zeros(rows.len());
        for (i, (w, target)) in rows.iter().enumerate() {
            let wc = space.coords(w.matrix());
            // Tr[Wρ] = Σ_r t_r Tr[W A_r] = m · (w-coords)·t.
            for r in 0..n {
                c[(i, r)] = space.m as f64 * wc[r];
            }
            rhs[i] = *target;
        }
        let pinv = c.clone().pseudo_inverse(1e-12).expect("SVD always succeeds");
        Self { c, rhs, pinv }
    }

    fn project_point(&self, t: &DVector<f64>) -> DVector<f64> {
        t - &self.pinv * (&self.c * t - &self.rhs)
    }

    fn project_tangent(&self, g: &DVector<f64>) -> DVector<f64> {
        g - &self.pinv * (&self.c * g)
    }

    fn residual(&self, t: &DVector<f64>) -> f64 {
        (&self.c * t - &self.rhs).amax()
    }
}

fn min_eigen(space: &CoordinateSpace, t: &DVector<f64>) -> (f64, DVector<Complex64>) {
    let mat = space.to_matrix(t);
    let eig = mat.symmetric_eigen();
    let mut idx = 0;
    for k in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[k] < eig.eigenvalues[idx] {
            idx = k;
        }
    }
    (eig.eigenvalues[idx], eig.eigenvectors.column(idx).into())
}

fn objective_and_grad(
    space: &CoordinateSpace,
    t: &DVector<f64>,
) -> (f64, Option<DVector<f64>>) {
    let mat = space.to_matrix(t);
    let eig = mat.symmetric_eigen();
    let m = space.m as f64;
    let mut val = 0.0;
    for &l in eig.eigenvalues.iter() {
        if l <= 1e-13 {
            return (f64::INFINITY, None);
        }
        val -= (m * l).ln() / m;
    }
    // ∇_ρ D = −(1/m) ρ⁻¹, expressed in basis coordinates.
    let inv_diag = DMatrix::from_fn(space.m, space.m, |i, j| {
        if i == j {
            Complex64::new(1.0 / eig.eigenvalues[i], 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let rho_inv = &eig.eigenvectors * inv_diag * eig.eigenvectors.adjoint();
    let grad = DVector::from_iterator(
        space.m * space.m,
        space
            .basis
            .iter()
            .map(|a| -(a.matrix() * &rho_inv).trace().re / m),
    );
    (val, Some(grad))
}

/// Minimize over the affine slice `{Ct = rhs}` intersected with the PD cone.
/// Returns `None` when the slice misses the cone entirely.
fn solve_equality(
    space: &CoordinateSpace,
    sys: &AffineSystem,
    cfg: &SolverConfig,
) -> Result<RateResult, SolverError> {
    let m = space.m;
    let pi = DensityMatrix::maximally_mixed(m);
    let mut t = sys.project_point(&space.coords(pi.matrix()));
    if sys.residual(&t) > 1e-7 {
        // The linear system itself is inconsistent.
        return Err(SolverError::Infeasible(sys.residual(&t)));
    }
    let mut iterations = 0usize;
    // Feasibility phase: push the smallest eigenvalue up within the slice.
    let (mut lmin, _) = min_eigen(space, &t);
    if lmin <= 1e-9 {
        let mut step = 0.5;
        for _ in 0..2000 {
            iterations += 1;
            let (l, v) = min_eigen(space, &t);
            lmin = l;
            if lmin > 1e-7 {
                break;
            }
            // Supergradient of λ_min: coordinates of the outer product vv†.
            let outer = &v * v.adjoint();
            let dir = sys.project_tangent(&space.coords(&outer));
            let norm = dir.norm();
            if norm < 1e-14 {
                break;
            }
            let mut improved = false;
            let mut s = step;
            for _bt in 0..50 {
                let cand = &t + &dir * (s / norm);
                let (lc, _) = min_eigen(space, &cand);
                if lc > lmin + 1e-16 {
                    t = cand;
                    step = s * 1.5;
                    improved = true;
                    break;
                }
                s *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if lmin < -INFEASIBLE_TOL {
            return Err(SolverError::Infeasible(-lmin));
        }
        if lmin <= 1e-9 {
            // The slice touches only singular states: the rate diverges.
            return Ok(RateResult {
                rate: f64::INFINITY,
                dim: m,
                minimizer: None,
                branch: None,
                diagnostics: Diagnostics {
                    iterations,
                    residual: sys.residual(&t),
                },
            });
        }
    }
    // Projected gradient descent on the slice.
    let (mut val, mut grad) = objective_and_grad(space, &t);
    let mut step = 1.0;
    let mut stationary = false;
    for _ in 0..cfg.max_iters {
        iterations += 1;
        let g = sys.project_tangent(grad.as_ref().expect("feasible iterate is PD"));
        if g.norm() <= cfg.grad_tol {
            stationary = true;
            break;
        }
        let mut accepted = false;
        let mut s = step;
        for _bt in 0..60 {
            let cand = &t - &g * s;
            let (cval, cgrad) = objective_and_grad(space, &cand);
            if cval < val - 1e-4 * s * g.norm_squared() {
                t = cand;
                val = cval;
                grad = cgrad;
                step = s * 1.5;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            // Step size exhausted at floating-point resolution.
            stationary = sys.project_tangent(grad.as_ref().unwrap()).norm() <= cfg.grad_tol * 10.0;
            break;
        }
    }
    let residual = sys.residual(&t);
    let rho = DensityMatrix::new_trusted(space.to_matrix(&t));
    let result = RateResult {
        rate: val,
        dim: m,
        minimizer: Some(Minimizer::State(rho)),
        branch: None,
        diagnostics: Diagnostics {
            iterations,
            residual,
        },
    };
    if residual > CONSTRAINT_TOL || !stationary {
        return Err(SolverError::NonConvergence {
            best: Box::new(result),
        });
    }
    Ok(result)
}

fn solve_linear(
    m: usize,
    constraints: &[LinearConstraint],
    cfg: &SolverConfig,
) -> Result<RateResult, SolverError> {
    let space = CoordinateSpace::new(m);
    let pi = DensityMatrix::maximally_mixed(m);
    if constraints.iter().all(|c| {
        let v = c.observable.expectation(&pi).unwrap();
        c.relation.violation(v, c.target) <= 1e-12
    }) {
        return Ok(RateResult {
            rate: 0.0,
            dim: m,
            minimizer: Some(Minimizer::State(pi)),
            branch: None,
            diagnostics: Diagnostics::default(),
        });
    }
    let identity = HermitianObservable::from_diagonal(&vec![1.0; m]);
    let eqs: Vec<&LinearConstraint> = constraints
        .iter()
        .filter(|c| c.relation == Relation::Eq)
        .collect();
    let ineqs: Vec<&LinearConstraint> = constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .collect();
    if ineqs.len() > 16 {
        return Err(SolverError::Invalid(QStateError::OutOfRange(
            "too many inequality constraints (max 16)".into(),
        )));
    }
    // Active-set sweep: every subset of inequalities pinned to equality.
    // The problem is convex, so the optimum is the best feasible subset solve.
    let mut best: Option<RateResult> = None;
    let mut last_err: Option<SolverError> = None;
    for mask in 0..(1u32 << ineqs.len()) {
        let mut rows: Vec<(&HermitianObservable, f64)> = vec![(&identity, 1.0)];
        for c in &eqs {
            rows.push((&c.observable, c.target));
        }
        for (i, c) in ineqs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                rows.push((&c.observable, c.target));
            }
        }
        if rows.len() == 1 {
            // No constraint active: covered by the π shortcut above.
            continue;
        }
        let sys = AffineSystem::new(&space, &rows);
        let solved = match solve_equality(&space, &sys, cfg) {
            Ok(r) => r,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        // Check the inactive inequalities at this candidate.
        let feasible = match &solved.minimizer {
            Some(Minimizer::State(rho)) => ineqs.iter().all(|c| {
                let v = c.observable.expectation(rho).unwrap();
                c.relation.violation(v, c.target) <= CONSTRAINT_TOL
            }),
            _ => solved.rate.is_infinite() && mask + 1 == 1u32 << ineqs.len(),
        };
        if !feasible {
            continue;
        }
        match &best {
            Some(b) if b.rate <= solved.rate => {}
            _ => best = Some(solved),
        }
    }
    match best {
        Some(r) => Ok(r),
        None => Err(last_err.unwrap_or(SolverError::Infeasible(f64::INFINITY))),
    }
}

fn solve_bloch(pred: &BlochPredicate, cfg: &SolverConfig) -> Result<RateResult, SolverError> {
    // Dense grid on the Bloch ball, then local refinement around the argmin.
    let objective = |t: &[f64; 3]| -> f64 {
        let norm = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
        if norm > 1.0 || !pred.holds(t) {
            f64::INFINITY
        } else {
            crate::rates::rate_qubit(norm).unwrap()
        }
    };
    let mut best = f64::INFINITY;
    let mut arg = [0.0; 3];
    let steps = 60i32;
    for i in -steps..=steps {
        for j in -steps..=steps {
            for k in -steps..=steps {
                let t = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    k as f64 / steps as f64,
                ];
                let v = objective(&t);
                if v < best {
                    best = v;
                    arg = t;
                }
            }
        }
    }
    if best.is_infinite() {
        return Err(SolverError::Infeasible(f64::INFINITY));
    }
    let mut h = 1.0 / steps as f64;
    let mut iterations = 0usize;
    for _round in 0..12 {
        h /= 3.0;
        let center = arg;
        for i in -4..=4 {
            for j in -4..=4 {
                for k in -4..=4 {
                    iterations += 1;
                    let t = [
                        center[0] + i as f64 * h,
                        center[1] + j as f64 * h,
                        center[2] + k as f64 * h,
                    ];
                    let v = objective(&t);
                    if v < best {
                        best = v;
                        arg = t;
                    }
                }
            }
        }
        if h < cfg.grad_tol * 1e-3 {
            break;
        }
    }
    let bloch = BlochVector::new(arg).map_err(SolverError::Invalid)?;
    Ok(RateResult {
        rate: best,
        dim: 2,
        minimizer: Some(Minimizer::State(qubit_from_bloch(&bloch))),
        branch: None,
        diagnostics: Diagnostics {
            iterations,
            residual: 0.0,
        },
    })
}

/// Minimize `D(π‖ρ)` over the constraint set. The probability-decay exponent
/// is `dim` times the returned rate.
pub fn min_rel_entropy(omega: &ConstraintSet, cfg: &SolverConfig) -> Result<RateResult, SolverError> {
    match &omega.kind {
        ConstraintKind::Linear(cs) => solve_linear(omega.dim, cs, cfg),
        ConstraintKind::Spectral(c) => solve_spectral(omega.dim, c, cfg),
        ConstraintKind::BlochRegion(pred) => solve_bloch(pred, cfg),
    }
}

//! Closed-form rate functions for the example constraint families, the
//! Gaussian-level rates they derive from, and comparison exponents implied
//! by earlier concentration bounds.
//!
//! Every `rate_*` function returns the relative-entropy infimum
//! `inf_{ρ∈Ω} D(π‖ρ)` in nats; the probability-decay exponent is `m` times
//! that value and is exposed as [`RateResult::exponent`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::qstate::{
    binary_rel_entropy, rel_entropy_vs_pi_spectrum, DensityMatrix, HermitianObservable,
    QStateError, Spectrum, RANK_TOL,
};
use crate::solver::{solve_entropy_root, solve_nu};

/// The argmin attached to a rate value, when one is available in closed form.
#[derive(Debug, Clone)]
pub enum Minimizer {
    /// Spectrum only; the state is any unitary conjugation of its diagonal.
    Spectrum(Spectrum),
    /// A concrete state (basis matters, e.g. for expectation constraints).
    State(DensityMatrix),
}

impl Minimizer {
    pub fn spectrum(&self) -> Spectrum {
        match self {
            Minimizer::Spectrum(s) => s.clone(),
            Minimizer::State(rho) => rho.spectrum(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub iterations: usize,
    pub residual: f64,
}

/// A rate value `inf D(π‖ρ)` with its minimizer and solve diagnostics.
#[derive(Debug, Clone)]
pub struct RateResult {
    /// Extended-real infimum of `D(π‖ρ)` over the set, in nats.
    pub rate: f64,
    pub dim: usize,
    pub minimizer: Option<Minimizer>,
    /// Discrete argmin index for families minimized over a grid
    /// (the level count `m'` for trace distance, `μ` for entropy).
    pub branch: Option<usize>,
    pub diagnostics: Diagnostics,
}

impl RateResult {
    pub fn plain(rate: f64, dim: usize) -> Self {
        Self {
            rate,
            dim,
            minimizer: None,
            branch: None,
            diagnostics: Diagnostics::default(),
        }
    }

    /// The probability-decay exponent `m · inf D(π‖ρ)`.
    pub fn exponent(&self) -> f64 {
        self.dim as f64 * self.rate
    }
}

fn check_range(ok: bool, what: &str) -> Result<(), QStateError> {
    if ok {
        Ok(())
    } else {
        Err(QStateError::OutOfRange(what.to_string()))
    }
}

/// Rate for a qubit constrained to Bloch norm `t_norm`: `ln(1/√(1−t²))`.
pub fn rate_qubit(t_norm: f64) -> Result<f64, QStateError> {
    check_range((0.0..=1.0).contains(&t_norm), "Bloch norm must be in [0,1]")?;
    if t_norm >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-0.5 * (1.0 - t_norm * t_norm).ln())
}

/// Rate for `λ_max(ρ) ≥ (1+(m−1)ε)/m`, with the two-level minimizer spectrum.
pub fn rate_max_eigenvalue(eps: f64, m: usize) -> Result<RateResult, QStateError> {
    check_range(m >= 2, "dimension must be at least 2")?;
    check_range(eps > 0.0 && eps < 1.0, "eps must be in (0,1)")?;
    let mf = m as f64;
    let rate = -(1.0 / mf) * ((1.0 + (mf - 1.0) * eps).ln() + (mf - 1.0) * (1.0 - eps).ln());
    let mut evals = vec![(1.0 - eps) / mf; m];
    evals[0] = (1.0 + (mf - 1.0) * eps) / mf;
    Ok(RateResult {
        rate,
        dim: m,
        minimizer: Some(Minimizer::Spectrum(Spectrum::from_unsorted(&evals))),
        branch: None,
        diagnostics: Diagnostics::default(),
    })
}

/// Rate for a rank-`m0` projective outcome forced to probability `q`:
/// the binary divergence `𝒟(m0/m ‖ q)`, with the block-uniform minimizer.
pub fn rate_binary_measurement(q: f64, m0: usize, m: usize) -> Result<RateResult, QStateError> {
    check_range(m0 >= 1 && m0 < m, "need 1 ≤ m0 < m")?;
    check_range(q > 0.0 && q < 1.0, "q must be in (0,1)")?;
    let alpha = m0 as f64 / m as f64;
    let rate = binary_rel_entropy(alpha, q)?;
    let mut evals = vec![q / m0 as f64; m0];
    evals.extend(vec![(1.0 - q) / (m - m0) as f64; m - m0]);
    Ok(RateResult {
        rate,
        dim: m,
        minimizer: Some(Minimizer::Spectrum(Spectrum::from_unsorted(&evals))),
        branch: None,
        diagnostics: Diagnostics::default(),
    })
}

/// Rate for `(1/2)‖ρ−π‖₁ ≥ t`: minimum of `𝒟(m'/m ‖ m'/m + t)` over the
/// admissible level counts `m' ∈ {1,…,⌊m(1−t)⌋}`; ties break to smallest `m'`.
pub fn rate_trace_distance(t: f64, m: usize) -> Result<RateResult, QStateError> {
    check_range(m >= 2, "dimension must be at least 2")?;
    check_range(t > 0.0 && t < 1.0, "t must be in (0,1)")?;
    let mf = m as f64;
    let m_hi = (mf * (1.0 - t)).floor() as usize;
    if m_hi < 1 {
        // Only rank-deficient states reach this distance.
        return Ok(RateResult::plain(f64::INFINITY, m));
    }
    let mut best: Option<(usize, f64)> = None;
    for mp in 1..=m_hi {
        let alpha = mp as f64 / mf;
        let val = binary_rel_entropy(alpha, alpha + t)?;
        match best {
            Some((_, b)) if val >= b - 1e-12 => {}
            _ => best = Some((mp, val)),
        }
    }
    let (mp, rate) = best.unwrap();
    // m' levels raised by t/m' above uniform, the rest lowered to match.
    let hi = 1.0 / mf + t / mp as f64;
    let lo = 1.0 / mf - t / (m - mp) as f64;
    let mut evals = vec![hi; mp];
    evals.extend(vec![lo; m - mp]);
    Ok(RateResult {
        rate,
        dim: m,
        minimizer: Some(Minimizer::Spectrum(Spectrum::from_unsorted(&evals))),
        branch: Some(mp),
        diagnostics: Diagnostics::default(),
    })
}

/// Rate for `H(ρ) ≤ η ln m`: minimum over two-level branches `μ ∈ {1,…,m−1}`
/// of `𝒟(μ/m ‖ r*)`, where `r*` is the smaller root of the entropy equation.
pub fn rate_entropy(eta: f64, m: usize) -> Result<RateResult, QStateError> {
    check_range(m >= 2, "dimension must be at least 2")?;
    check_range(eta > 0.0 && eta < 1.0, "eta must be in (0,1)")?;
    let mf = m as f64;
    let mut best: Option<(usize, f64, f64)> = None;
    let mut iterations = 0usize;
    for mu in 1..m {
        let Ok(root) = solve_entropy_root(mu, eta, m) else {
            // This branch cannot reach entropy η ln m; skip it.
            continue;
        };
        iterations += 1;
        let val = binary_rel_entropy(mu as f64 / mf, root.r_star)?;
        match best {
            Some((_, b, _)) if val >= b - 1e-12 => {}
            _ => best = Some((mu, val, root.r_star)),
        }
    }
    let (mu, rate, r_star) = best.expect("branch μ=m−1 is always feasible");
    let mut evals = vec![r_star / mu as f64; mu];
    evals.extend(vec![(1.0 - r_star) / (m - mu) as f64; m - mu]);
    if evals.iter().any(|&v| v < RANK_TOL) {
        log::warn!(
            "entropy rate at η={eta}: minimizer spectrum is nearly rank-deficient; \
             the rate diverges as η→0"
        );
    }
    Ok(RateResult {
        rate,
        dim: m,
        minimizer: Some(Minimizer::Spectrum(Spectrum::from_unsorted(&evals))),
        branch: Some(mu),
        diagnostics: Diagnostics {
            iterations,
            residual: 0.0,
        },
    })
}

/// Rate for `Tr[Wρ] ≥ w` with traceless `W`:
/// `(1/m) Tr ln[(1−wν*)I + ν*W]` at the unique admissible multiplier `ν*`.
pub fn rate_expectation(w: f64, obs: &HermitianObservable) -> Result<RateResult, QStateError> {
    let m = obs.dim();
    check_range(
        obs.matrix().trace().norm() <= 1e-10 * m as f64,
        "observable must be traceless",
    )?;
    check_range(w.abs() < obs.sup_norm(), "need |w| < ‖W‖_∞")?;
    if w == 0.0 {
        let mut res = RateResult::plain(0.0, m);
        res.minimizer = Some(Minimizer::State(DensityMatrix::maximally_mixed(m)));
        return Ok(res);
    }
    let sol = solve_nu(w, obs)?;
    let (evals_w, vecs) = {
        let eig = obs.matrix().clone().symmetric_eigen();
        (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
    };
    let mf = m as f64;
    let mut rate = 0.0;
    let mut rho_evals = Vec::with_capacity(m);
    for &lam in &evals_w {
        let factor = 1.0 - sol.nu * (w - lam);
        rate += factor.ln() / mf;
        rho_evals.push(1.0 / (mf * factor));
    }
    let diag = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            Complex64::new(rho_evals[i], 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let rho_star = DensityMatrix::new_trusted(&vecs * diag * vecs.adjoint());
    Ok(RateResult {
        rate,
        dim: m,
        minimizer: Some(Minimizer::State(rho_star)),
        branch: None,
        diagnostics: Diagnostics {
            iterations: sol.iterations,
            residual: sol.residual,
        },
    })
}

/// Closed-form multiplier for `m=3`, `W = diag(1,0,−1)`:
/// `ν*(w) = (1 − 3w² − √(1+3w²)) / (3w(1−w²))`.
pub fn nu_star_m3(w: f64) -> Result<f64, QStateError> {
    check_range(w != 0.0 && w.abs() < 1.0, "need 0 < |w| < 1")?;
    // Rationalized form of (1−3w²−√(1+3w²))/(3w(1−w²)); identical
    // algebraically, but free of cancellation as w → 0.
    Ok(-3.0 * w / (1.0 - 3.0 * w * w + (1.0 + 3.0 * w * w).sqrt()))
}

/// Rate for `Tr[Wρ] ≥ w` at `m=3`, `W = diag(1,0,−1)`, via the closed-form
/// multiplier; even in `w`.
pub fn rate_w3(w: f64) -> Result<f64, QStateError> {
    check_range(w.abs() < 1.0, "need |w| < 1")?;
    if w == 0.0 {
        return Ok(0.0);
    }
    let nu = nu_star_m3(w)?;
    let mut rate = 0.0;
    for k in [-1.0, 0.0, 1.0] {
        rate += (1.0 - (w - k) * nu).ln() / 3.0;
    }
    Ok(rate)
}

/// The fixed Hermitian operator basis `{A_r}`: `A₀ = I` and scaled
/// generalized Gell-Mann matrices, orthonormal as `(1/m)Tr[A_r A_s] = δ_rs`.
pub fn hermitian_basis(m: usize) -> Vec<HermitianObservable> {
    assert!(m >= 1);
    let mut basis = Vec::with_capacity(m * m);
    basis.push(HermitianObservable::from_diagonal(&vec![1.0; m]));
    let scale = (m as f64 / 2.0).sqrt();
    for k in 1..m {
        for j in 0..k {
            let mut sym = DMatrix::<Complex64>::zeros(m, m);
            sym[(j, k)] = Complex64::new(scale, 0.0);
            sym[(k, j)] = Complex64::new(scale, 0.0);
            basis.push(HermitianObservable::new(sym).unwrap());
            let mut asym = DMatrix::<Complex64>::zeros(m, m);
            asym[(j, k)] = Complex64::new(0.0, -scale);
            asym[(k, j)] = Complex64::new(0.0, scale);
            basis.push(HermitianObservable::new(asym).unwrap());
        }
    }
    for l in 1..m {
        // diag(1,…,1,−l,0,…)/√(l(l+1)), then rescaled like the off-diagonals.
        let norm = scale * (2.0 / (l as f64 * (l + 1) as f64)).sqrt();
        let mut d = vec![0.0; m];
        for item in d.iter_mut().take(l) {
            *item = norm;
        }
        d[l] = -(l as f64) * norm;
        basis.push(HermitianObservable::from_diagonal(&d));
    }
    basis
}

/// Coordinates in the `{A_r}` basis of a Gaussian-level rate point; the
/// operator it names is `t·A = Σ_r t_r A_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianRatePoint {
    pub t: Vec<f64>,
}

impl GaussianRatePoint {
    pub fn new(t: Vec<f64>) -> Result<Self, QStateError> {
        let m = (t.len() as f64).sqrt().round() as usize;
        if m * m != t.len() || m == 0 || t.iter().any(|x| !x.is_finite()) {
            return Err(QStateError::OutOfRange(
                "coordinate vector length must be a positive square of finite entries".into(),
            ));
        }
        Ok(Self { t })
    }

    pub fn dim(&self) -> usize {
        (self.t.len() as f64).sqrt().round() as usize
    }

    /// `t·A` as a dense matrix.
    pub fn operator(&self) -> DMatrix<Complex64> {
        let m = self.dim();
        let basis = hermitian_basis(m);
        let mut acc = DMatrix::<Complex64>::zeros(m, m);
        for (coef, a) in self.t.iter().zip(basis.iter()) {
            acc += a.matrix() * Complex64::new(*coef, 0.0);
        }
        acc
    }

    /// Inverse of [`operator`](Self::operator): coordinates of a Hermitian
    /// matrix, `t_r = (1/m)Tr[A_r X]`.
    pub fn from_operator(x: &DMatrix<Complex64>) -> Self {
        let m = x.nrows();
        let basis = hermitian_basis(m);
        let t = basis
            .iter()
            .map(|a| (a.matrix() * x).trace().re / m as f64)
            .collect();
        Self { t }
    }
}

fn psd_eigenvalues(x: &DMatrix<Complex64>) -> Vec<f64> {
    x.clone().symmetric_eigen().eigenvalues.as_slice().to_vec()
}

/// Gaussian-level rate `Tr[ς − I − ln ς]` at `ς = t·A/2m`; `+∞` off the
/// interior of the positive cone.
pub fn gaussian_sanov_rate(t: &GaussianRatePoint) -> f64 {
    let m = t.dim() as f64;
    let sigma = t.operator() / Complex64::new(2.0 * m, 0.0);
    let evals = psd_eigenvalues(&sigma);
    let max = evals.iter().cloned().fold(0.0_f64, f64::max);
    let tol = RANK_TOL * max.max(1.0);
    if evals.iter().any(|&x| x <= tol) {
        return f64::INFINITY;
    }
    evals.iter().map(|&x| x - 1.0 - x.ln()).sum()
}

/// Minimum of the Gaussian rate over positive rescalings of `t`, in closed
/// form: `−Tr ln(mρ(t))` with `ρ(t) = t·A/Tr[t·A]`, which equals
/// `m·D(π‖ρ(t))`. `+∞` when `t·A` is singular.
pub fn gaussian_rate_scale_min(t: &GaussianRatePoint) -> Result<f64, QStateError> {
    let op = t.operator();
    let evals = psd_eigenvalues(&op);
    let max = evals.iter().cloned().fold(0.0_f64, f64::max);
    let tol = RANK_TOL * max.max(1.0);
    let trace = op.trace().re;
    if evals.iter().any(|&x| x < -1e-9 * max.max(1.0)) || trace <= 0.0 {
        return Err(QStateError::NotPsd(
            evals.iter().cloned().fold(f64::INFINITY, f64::min),
        ));
    }
    if evals.iter().any(|&x| x <= tol) {
        return Ok(f64::INFINITY);
    }
    let m = t.dim() as f64;
    let spec = Spectrum::from_unsorted(&evals.iter().map(|&x| x / trace).collect::<Vec<_>>());
    Ok(m * rel_entropy_vs_pi_spectrum(&spec))
}

/// Exact coherence exponent upper value `ln(1/(1−ω))`.
pub fn coherence_rate_upper(omega: f64) -> Result<f64, QStateError> {
    check_range(omega > 0.0 && omega < 1.0, "omega must be in (0,1)")?;
    Ok(-(1.0 - omega).ln())
}

/// Concentration-of-measure lower exponent `ω²/(36π³ ln 2)` for coherence.
pub fn coherence_rate_levy(omega: f64) -> Result<f64, QStateError> {
    check_range(omega > 0.0 && omega < 1.0, "omega must be in (0,1)")?;
    Ok(omega * omega / (36.0 * std::f64::consts::PI.powi(3) * 2.0_f64.ln()))
}

/// Two-moment Gaussian rate `D*(s,‖t‖²) = s/2 − ln((s−‖t‖²)/2) − 1` on the
/// domain `s > 0`, `‖t‖² < s`; `+∞` outside.
pub fn coherence_dstar(s: f64, t_norm_sq: f64) -> f64 {
    if !(s > 0.0) || t_norm_sq < 0.0 || t_norm_sq >= s {
        return f64::INFINITY;
    }
    s / 2.0 - ((s - t_norm_sq) / 2.0).ln() - 1.0
}

/// Numerical minimum of [`coherence_dstar`] over `{(s,‖t‖²) : ‖t‖²/s ≥ κ}`;
/// equals `−ln(1−κ)`, attained at `s = 2`, `‖t‖² = 2κ`.
pub fn coherence_dstar_min(kappa: f64) -> Result<f64, QStateError> {
    check_range(kappa > 0.0 && kappa < 1.0, "kappa must be in (0,1)")?;
    // Coarse 2-D grid over (s, u = ‖t‖²/s), then golden-section polish in s.
    let mut best = f64::INFINITY;
    let mut s_best = 2.0;
    for i in 1..=400 {
        let s = 0.05 * i as f64;
        for j in 0..=50 {
            let u = kappa + (1.0 - kappa) * j as f64 / 51.0;
            let v = coherence_dstar(s, u * s);
            if v < best {
                best = v;
                s_best = s;
            }
        }
    }
    // D* is increasing in ‖t‖², so the constraint is active at the optimum.
    let f = |s: f64| coherence_dstar(s, kappa * s);
    let (mut a, mut b) = ((s_best - 0.1).max(1e-9), s_best + 0.1);
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if f(c) <= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(f(0.5 * (a + b)).min(best))
}

/// Exponent family implied by earlier concentration-of-measure bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyKind {
    /// `(m−1)²ε²/14` for the maximum-eigenvalue event.
    MaxEigenvalue { m: usize, eps: f64 },
    /// `mδ²/8π²` for the entropy-deficit event, `δ = 1−η`.
    Entropy { m: usize, delta: f64 },
    /// `mw²/(18π³‖W‖_∞²)` for the expectation event.
    ExpectationSupNorm { m: usize, w: f64, sup_norm: f64 },
    /// `2mw²/(9π³Δ_W²)`, `Δ_W` the spectral spread of `W`; tighter than the
    /// sup-norm form whenever `Δ_W ≤ 2‖W‖_∞`.
    ExpectationEigenGap { m: usize, w: f64, eigen_gap: f64 },
}

pub fn levy_comparison_rate(kind: LevyKind) -> Result<f64, QStateError> {
    let pi3 = std::f64::consts::PI.powi(3);
    match kind {
        LevyKind::MaxEigenvalue { m, eps } => {
            check_range(m >= 2 && eps > 0.0 && eps < 1.0, "need m ≥ 2, ε ∈ (0,1)")?;
            let mf = m as f64;
            Ok((mf - 1.0).powi(2) * eps * eps / 14.0)
        }
        LevyKind::Entropy { m, delta } => {
            check_range(m >= 2 && delta > 0.0 && delta < 1.0, "need m ≥ 2, δ ∈ (0,1)")?;
            Ok(m as f64 * delta * delta / (8.0 * std::f64::consts::PI.powi(2)))
        }
        LevyKind::ExpectationSupNorm { m, w, sup_norm } => {
            check_range(m >= 2 && sup_norm > 0.0, "need m ≥ 2, ‖W‖_∞ > 0")?;
            Ok(m as f64 * w * w / (18.0 * pi3 * sup_norm * sup_norm))
        }
        LevyKind::ExpectationEigenGap { m, w, eigen_gap } => {
            check_range(m >= 2 && eigen_gap > 0.0, "need m ≥ 2, Δ_W > 0")?;
            Ok(2.0 * m as f64 * w * w / (9.0 * pi3 * eigen_gap * eigen_gap))
        }
    }
}

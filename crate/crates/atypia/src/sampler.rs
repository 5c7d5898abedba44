//! Induced random states and Haar-random pure vectors from Gaussian
//! primitives, plus exponentially tilted proposals for importance sampling.
//!
//! The unitarily invariant measure on pure states is generated by normalizing
//! a vector of i.i.d. standard complex Gaussians; the induced state on the
//! `m`-dimensional subsystem is `GG†/Tr[GG†]` for an `m×n` Ginibre matrix
//! `G`. Tilting replaces the Gaussian columns by complex normals whose
//! covariance is proportional to a target state; the likelihood ratio is
//! carried strictly in the log domain.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qstate::{DensityMatrix, QStateError, VALIDATION_TOL};

/// Spectral floor applied to tilted-proposal targets.
pub const TILT_FLOOR: f64 = 1e-6;

/// A reproducible RNG stream. Identical `(seed, stream_index)` reproduce
/// identical sample sequences bit-exactly; parallel workers own disjoint
/// stream indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// The same seed on a different stream index.
    pub fn substream(&self, offset: u64) -> Self {
        Self::new(self.seed, self.stream_index.wrapping_add(offset))
    }
}

/// An `m×n` matrix with i.i.d. entries `X+iY`, `X,Y` standard normal.
#[derive(Debug, Clone)]
pub struct GinibreDraw {
    pub g: DMatrix<Complex64>,
}

impl GinibreDraw {
    pub fn sample(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Self {
        assert!(m >= 1 && n >= 1);
        let g = DMatrix::from_fn(m, n, |_, _| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            Complex64::new(x, y)
        });
        Self { g }
    }
}

/// `GG†/Tr[GG†]` for a fresh Ginibre draw; rank `min(m,n)` almost surely.
pub fn sample_induced_state(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let draw = GinibreDraw::sample(m, n, rng);
    let s = &draw.g * draw.g.adjoint();
    let tr = s.trace().re;
    DensityMatrix::new_trusted(s.map(|z| z / tr))
}

/// A Haar-random unit vector in dimension `d`.
pub fn sample_haar_pure(d: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    assert!(d >= 1);
    let mut v = DVector::from_fn(d, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        Complex64::new(x, y)
    });
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    v
}

/// An importance-sampling proposal: columns are complex normal with
/// covariance `Σ = m·σ_floored`, where `σ_floored` mixes the target toward
/// `π` just enough that its minimum eigenvalue reaches [`TILT_FLOOR`].
#[derive(Debug, Clone)]
pub struct TiltedProposal {
    sigma: DMatrix<Complex64>,
    sigma_inv: DMatrix<Complex64>,
    log_det_sigma: f64,
    /// `L` with `LL† = Σ`; columns are drawn as `g = L·c`.
    transform: DMatrix<Complex64>,
    target: DensityMatrix,
    mix_gamma: f64,
}

impl TiltedProposal {
    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn sigma(&self) -> &DMatrix<Complex64> {
        &self.sigma
    }

    pub fn log_det_sigma(&self) -> f64 {
        self.log_det_sigma
    }

    /// The floored target state the proposal is tilted toward.
    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn mix_gamma(&self) -> f64 {
        self.mix_gamma
    }
}

/// Build the tilted proposal for a target state; regularization always
/// succeeds, so rank-deficient targets are accepted.
pub fn make_tilted_proposal(sigma_target: &DensityMatrix) -> TiltedProposal {
    let m = sigma_target.dim();
    let (vals, vecs) = sigma_target.eigen();
    let lam_min = *vals.last().unwrap();
    let uniform = 1.0 / m as f64;
    let gamma = if lam_min >= TILT_FLOOR || uniform <= lam_min {
        0.0
    } else {
        ((TILT_FLOOR - lam_min) / (uniform - lam_min)).clamp(0.0, 1.0)
    };
    let floored_vals: Vec<f64> = vals
        .iter()
        .map(|&v| (1.0 - gamma) * v + gamma * uniform)
        .collect();
    let target_mat = {
        let d = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                Complex64::new(floored_vals[i], 0.0)
            } else {
                Complex64::ZERO
            }
        });
        &vecs * d * vecs.adjoint()
    };
    // Σ = m · σ_floored, shares eigenvectors with the target.
    let scaled: Vec<f64> = floored_vals.iter().map(|v| v * m as f64).collect();
    let diag = |f: &dyn Fn(f64) -> f64| {
        let d = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                Complex64::new(f(scaled[i]), 0.0)
            } else {
                Complex64::ZERO
            }
        });
        &vecs * d * vecs.adjoint()
    };
    let sigma = diag(&|x| x);
    let sigma_inv = diag(&|x| 1.0 / x);
    let transform = diag(&|x| x.sqrt());
    let log_det_sigma = scaled.iter().map(|x| x.ln()).sum();
    TiltedProposal {
        sigma,
        sigma_inv,
        log_det_sigma,
        transform,
        target: DensityMatrix::new_trusted(target_mat),
        mix_gamma: gamma,
    }
}

/// One standard complex normal column (`E[cc†] = I`).
fn sample_cn_column(m: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(m, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Log density of `CN(0, Σ)` at `g`, for weight-formula cross-checks.
pub fn cn_log_density(g: &DVector<Complex64>, sigma_inv: &DMatrix<Complex64>, log_det: f64) -> f64 {
    let quad = (g.adjoint() * sigma_inv * g)[(0, 0)].re;
    -quad - log_det - g.len() as f64 * std::f64::consts::PI.ln()
}

/// Log importance weight of a single proposal column: the log of the
/// nominal-to-proposal density ratio.
pub fn column_log_weight(prop: &TiltedProposal, g: &DVector<Complex64>) -> f64 {
    let quad = (g.adjoint() * &prop.sigma_inv * g)[(0, 0)].re;
    quad - g.norm_squared() + prop.log_det_sigma
}

/// Draw `n` tilted columns; returns the induced state and the total log
/// importance weight, so that `E_proposal[e^{log_weight}·1{ρ̂∈Ω}]` equals
/// the untilted probability of `Ω` exactly.
pub fn sample_tilted_induced_state(
    prop: &TiltedProposal,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (DensityMatrix, f64) {
    let m = prop.dim();
    let mut s = DMatrix::<Complex64>::zeros(m, m);
    let mut log_weight = n as f64 * prop.log_det_sigma;
    for _ in 0..n {
        let c = sample_cn_column(m, rng);
        let g = &prop.transform * &c;
        // L†Σ⁻¹L = I, so the proposal quadratic form is ‖c‖² exactly.
        log_weight += c.norm_squared() - g.norm_squared();
        s += &g * g.adjoint();
    }
    let tr = s.trace().re;
    (DensityMatrix::new_trusted(s.map(|z| z / tr)), log_weight)
}

/// `(p*, C_r)`: the largest squared amplitude and the Shannon entropy of the
/// squared amplitudes of a unit vector, in nats.
pub fn coherence_statistic(psi: &DVector<Complex64>) -> Result<(f64, f64), QStateError> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(QStateError::NotNormalized(norm));
    }
    let mut p_star = 0.0_f64;
    let mut entropy = 0.0_f64;
    for z in psi.iter() {
        let p = z.norm_sqr();
        p_star = p_star.max(p);
        if p > VALIDATION_TOL {
            entropy -= p * p.ln();
        }
    }
    Ok((p_star, entropy.max(0.0)))
}

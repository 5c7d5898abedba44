//! Finite-dimensional quantum state types and entropic/metric functionals.
//!
//! All entropic functionals go through a single spectral primitive
//! ([`DensityMatrix::spectrum`]), so they are basis invariant by
//! construction. Rates legitimately take the value `+∞` (rank-deficient
//! states), so every rate-like function returns `f64` with `f64::INFINITY`
//! as a first-class value rather than an error.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Validation tolerance for Hermiticity and unit trace.
pub const VALIDATION_TOL: f64 = 1e-12;

/// Relative rank tolerance: an eigenvalue below `RANK_TOL * max(1, λ_max)`
/// is treated as an exact zero.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum QStateError {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    NotUnitTrace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),
}

fn max_hermitian_defect(mat: &DMatrix<Complex64>) -> f64 {
    let scale = mat.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let mut worst = 0.0_f64;
    for i in 0..mat.nrows() {
        for j in i..mat.ncols() {
            let d = (mat[(i, j)] - mat[(j, i)].conj()).norm();
            worst = worst.max(d / scale);
        }
    }
    worst
}

/// An `m×m` complex Hermitian, PSD, unit-trace density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, unit trace, and PSD within
    /// [`VALIDATION_TOL`].
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self, QStateError> {
        let defect = max_hermitian_defect(&mat);
        if defect > VALIDATION_TOL {
            return Err(QStateError::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > VALIDATION_TOL || tr.im.abs() > VALIDATION_TOL {
            return Err(QStateError::NotUnitTrace(tr.re));
        }
        let rho = Self { mat };
        let min_ev = rho.spectrum().min();
        if min_ev < -VALIDATION_TOL {
            return Err(QStateError::NotPsd(min_ev));
        }
        Ok(rho)
    }

    /// Constructor bypass for hot-loop sampling; the caller guarantees the
    /// invariants hold.
    pub fn new_trusted(mat: DMatrix<Complex64>) -> Self {
        debug_assert!(max_hermitian_defect(&mat) <= 1e-9);
        Self { mat }
    }

    /// The maximally mixed state `π = I/m`.
    pub fn maximally_mixed(m: usize) -> Self {
        assert!(m >= 1);
        let mat = DMatrix::identity(m, m).map(|x: f64| Complex64::new(x / m as f64, 0.0));
        Self { mat }
    }

    /// Diagonal state from a probability vector.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self, QStateError> {
        let m = probs.len();
        let mut mat = DMatrix::zeros(m, m);
        for (k, &p) in probs.iter().enumerate() {
            mat[(k, k)] = Complex64::new(p, 0.0);
        }
        Self::new(mat)
    }

    /// Rank-1 projector `|ψ⟩⟨ψ|` of a unit vector.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self, QStateError> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QStateError::NotNormalized(norm));
        }
        Ok(Self::new_trusted(psi * psi.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Eigenvalues sorted in descending order.
    pub fn spectrum(&self) -> Spectrum {
        let eig = self.mat.clone().symmetric_eigen();
        Spectrum::from_unsorted(eig.eigenvalues.as_slice())
    }

    /// Full eigendecomposition: `(descending eigenvalues, column eigenvectors)`.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let eig = self.mat.clone().symmetric_eigen();
        let m = self.dim();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vecs = DMatrix::zeros(m, m);
        for (col, &i) in order.iter().enumerate() {
            vecs.set_column(col, &eig.eigenvectors.column(i));
        }
        (vals, vecs)
    }
}

/// A Hermitian observable, optionally flagged traceless.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    mat: DMatrix<Complex64>,
    traceless: bool,
}

impl HermitianObservable {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self, QStateError> {
        let defect = max_hermitian_defect(&mat);
        if defect > VALIDATION_TOL {
            return Err(QStateError::NotHermitian(defect));
        }
        let tr = mat.trace();
        let scale = mat.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let traceless = tr.norm() <= VALIDATION_TOL * scale * mat.nrows() as f64;
        Ok(Self { mat, traceless })
    }

    /// Traceless constructor; rejects observables with `|Tr| > tol`.
    pub fn new_traceless(mat: DMatrix<Complex64>) -> Result<Self, QStateError> {
        let obs = Self::new(mat)?;
        if !obs.traceless {
            return Err(QStateError::OutOfRange(format!(
                "observable is not traceless (Tr = {})",
                obs.mat.trace().re
            )));
        }
        Ok(obs)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let m = diag.len();
        let mut mat = DMatrix::zeros(m, m);
        for (k, &d) in diag.iter().enumerate() {
            mat[(k, k)] = Complex64::new(d, 0.0);
        }
        Self::new(mat).expect("diagonal real matrix is Hermitian")
    }

    /// Projector onto the first `k` basis vectors.
    pub fn projector_rank_k(m: usize, k: usize) -> Self {
        assert!(k <= m);
        let diag: Vec<f64> = (0..m).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
        Self::from_diagonal(&diag)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn is_traceless(&self) -> bool {
        self.traceless
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.mat.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.as_slice().to_vec();
        vals.sort_by(|a, b| b.total_cmp(a));
        vals
    }

    /// `Tr[W ρ]`, real for Hermitian `W`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64, QStateError> {
        if self.dim() != rho.dim() {
            return Err(QStateError::DimensionMismatch(self.dim(), rho.dim()));
        }
        Ok((&self.mat * rho.matrix()).trace().re)
    }

    /// Operator norm `‖W‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `Tr[W²]` (squared Hilbert-Schmidt norm).
    pub fn hs_norm_sq(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// A descending-sorted real eigenvalue vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    evals: Vec<f64>,
}

impl Spectrum {
    pub fn from_unsorted(vals: &[f64]) -> Self {
        let mut evals = vals.to_vec();
        evals.sort_by(|a, b| b.total_cmp(a));
        Self { evals }
    }

    pub fn values(&self) -> &[f64] {
        &self.evals
    }

    pub fn dim(&self) -> usize {
        self.evals.len()
    }

    pub fn max(&self) -> f64 {
        self.evals[0]
    }

    pub fn min(&self) -> f64 {
        *self.evals.last().unwrap()
    }

    /// Shannon entropy in nats; entries below the rank tolerance contribute 0.
    pub fn entropy(&self) -> f64 {
        let tol = RANK_TOL * self.max().max(1.0);
        -self
            .evals
            .iter()
            .filter(|&&p| p > tol)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// `(1/2) Σ_k |λ_k − 1/m|`: trace distance to the maximally mixed state.
    pub fn trace_dist_to_uniform(&self) -> f64 {
        let m = self.dim() as f64;
        0.5 * self.evals.iter().map(|&p| (p - 1.0 / m).abs()).sum::<f64>()
    }

    /// Embed as a diagonal density matrix.
    pub fn to_density(&self) -> Result<DensityMatrix, QStateError> {
        DensityMatrix::from_diagonal(&self.evals)
    }
}

/// A real 3-vector inside the closed Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(t: [f64; 3]) -> Result<Self, QStateError> {
        let v = Self(t);
        if v.norm() > 1.0 + VALIDATION_TOL {
            return Err(QStateError::OutOfRange(format!(
                "Bloch vector norm {} exceeds 1",
                v.norm()
            )));
        }
        Ok(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `D(π‖ρ) = −(1/m) Tr ln(mρ)` in nats; `+∞` when ρ is rank deficient.
pub fn rel_entropy_vs_pi(rho: &DensityMatrix) -> f64 {
    rel_entropy_vs_pi_spectrum(&rho.spectrum())
}

/// Spectrum form of [`rel_entropy_vs_pi`].
pub fn rel_entropy_vs_pi_spectrum(spec: &Spectrum) -> f64 {
    let m = spec.dim() as f64;
    let tol = RANK_TOL * spec.max().max(1.0);
    let mut acc = 0.0;
    for &lam in spec.values() {
        if lam < tol {
            return f64::INFINITY;
        }
        acc += (m * lam).ln();
    }
    // Clamp tiny negative dust from full-rank states numerically at π.
    (-acc / m).max(0.0)
}

/// Von Neumann entropy `H(ρ) = −Tr[ρ ln ρ]` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.spectrum().entropy()
}

/// Trace distance `(1/2)‖ρ−σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, QStateError> {
    if rho.dim() != sigma.dim() {
        return Err(QStateError::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let diff = rho.matrix() - sigma.matrix();
    let eig = diff.symmetric_eigen();
    Ok(0.5 * eig.eigenvalues.iter().map(|v| v.abs()).sum::<f64>())
}

/// Binary relative entropy `𝒟(α‖β) = α ln(α/β) + (1−α) ln((1−α)/(1−β))`,
/// with the convention `0 ln 0 = 0`; `+∞` when `α ≠ β` and `β ∈ {0,1}`.
pub fn binary_rel_entropy(alpha: f64, beta: f64) -> Result<f64, QStateError> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(QStateError::OutOfRange(format!("{name} = {v} not in [0,1]")));
        }
    }
    let term = |p: f64, q: f64| -> f64 {
        if p == 0.0 {
            0.0
        } else if q == 0.0 {
            f64::INFINITY
        } else {
            p * (p / q).ln()
        }
    };
    Ok((term(alpha, beta) + term(1.0 - alpha, 1.0 - beta)).max(0.0))
}

/// The four closed-form derivatives `(∂α, ∂β, ∂²α, ∂²β)` of `𝒟(α‖β)`.
pub fn binary_rel_entropy_derivatives(
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64, f64, f64), QStateError> {
    if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0) {
        return Err(QStateError::OutOfRange(format!(
            "derivatives require interior arguments, got ({alpha}, {beta})"
        )));
    }
    let d_alpha = (alpha / (1.0 - alpha) * (1.0 - beta) / beta).ln();
    let d_beta = -alpha / beta + (1.0 - alpha) / (1.0 - beta);
    let d2_alpha = 1.0 / alpha + 1.0 / (1.0 - alpha);
    let d2_beta = alpha / (beta * beta) + (1.0 - alpha) / ((1.0 - beta) * (1.0 - beta));
    Ok((d_alpha, d_beta, d2_alpha, d2_beta))
}

/// `ρ(t⃗) = (I + t⃗·σ⃗)/2`; eigenvalues are `(1±‖t⃗‖)/2`.
pub fn qubit_from_bloch(t: &BlochVector) -> DensityMatrix {
    let [x, y, z] = t.0;
    let mat = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        ],
    );
    DensityMatrix::new_trusted(mat)
}

/// Inverse of [`qubit_from_bloch`].
pub fn bloch_from_qubit(rho: &DensityMatrix) -> Result<BlochVector, QStateError> {
    if rho.dim() != 2 {
        return Err(QStateError::DimensionMismatch(rho.dim(), 2));
    }
    let m = rho.matrix();
    let x = 2.0 * m[(1, 0)].re;
    let y = 2.0 * m[(1, 0)].im;
    let z = (m[(0, 0)] - m[(1, 1)]).re;
    BlochVector::new([x, y, z])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(probs: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(probs).unwrap()
    }

    #[test]
    fn rel_entropy_at_pi_is_zero() {
        for m in [1, 2, 3, 5, 8] {
            let pi = DensityMatrix::maximally_mixed(m);
            assert_abs_diff_eq!(rel_entropy_vs_pi(&pi), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rel_entropy_qubit_075() {
        let rho = diag(&[0.75, 0.25]);
        let expect = 0.5 * (4.0_f64 / 3.0).ln();
        assert_abs_diff_eq!(rel_entropy_vs_pi(&rho), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(expect, 0.143841, epsilon = 1e-6);
    }

    #[test]
    fn rel_entropy_rank_deficient_is_infinite() {
        let rho = diag(&[1.0, 0.0]);
        assert!(rel_entropy_vs_pi(&rho).is_infinite());
    }

    #[test]
    fn rejects_malformed_input() {
        let mut mat = DMatrix::<Complex64>::zeros(2, 2);
        mat[(0, 1)] = Complex64::new(0.3, 0.0);
        mat[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            DensityMatrix::new(mat),
            Err(QStateError::NotHermitian(_))
        ));
        let half = DMatrix::identity(2, 2).map(|x: f64| Complex64::new(0.25 * x, 0.0));
        assert!(matches!(
            DensityMatrix::new(half),
            Err(QStateError::NotUnitTrace(_))
        ));
    }

    #[test]
    fn entropy_values() {
        let pi4 = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(von_neumann_entropy(&pi4), 4.0_f64.ln(), epsilon = 1e-12);
        let pure = diag(&[1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(von_neumann_entropy(&pure), 0.0, epsilon = 1e-12);
        let rho = diag(&[0.75, 0.25]);
        let expect = -0.75_f64 * 0.75_f64.ln() - 0.25 * 0.25_f64.ln();
        assert_abs_diff_eq!(von_neumann_entropy(&rho), expect, epsilon = 1e-12);
        assert_abs_diff_eq!(expect, 0.562335, epsilon = 1e-6);
    }

    #[test]
    fn trace_distance_values() {
        let rho = diag(&[0.75, 0.25]);
        let pi = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(trace_distance(&rho, &rho).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_distance(&rho, &pi).unwrap(), 0.25, epsilon = 1e-12);
        let e0 = diag(&[1.0, 0.0]);
        let e1 = diag(&[0.0, 1.0]);
        assert_abs_diff_eq!(trace_distance(&e0, &e1).unwrap(), 1.0, epsilon = 1e-12);
        let pi3 = DensityMatrix::maximally_mixed(3);
        assert!(trace_distance(&pi, &pi3).is_err());
    }

    #[test]
    fn binary_kl_values() {
        assert_abs_diff_eq!(binary_rel_entropy(0.3, 0.3).unwrap(), 0.0, epsilon = 1e-15);
        let v = binary_rel_entropy(0.5, 0.75).unwrap();
        assert_abs_diff_eq!(v, 0.5 * (4.0_f64 / 3.0).ln(), epsilon = 1e-12);
        assert!(binary_rel_entropy(0.3, 0.0).unwrap().is_infinite());
        assert!(binary_rel_entropy(0.3, 1.0).unwrap().is_infinite());
        assert_abs_diff_eq!(binary_rel_entropy(0.0, 0.0).unwrap(), 0.0, epsilon = 1e-15);
        assert!(binary_rel_entropy(-0.1, 0.5).is_err());
    }

    #[test]
    fn binary_kl_quadratic_approx() {
        let (alpha, eps) = (0.5, 1e-3);
        let exact = binary_rel_entropy(alpha, alpha + eps).unwrap();
        let approx = eps * eps / (2.0 * alpha * (1.0 - alpha));
        assert!((exact - approx).abs() <= 1e-8);
    }

    #[test]
    fn binary_kl_derivatives() {
        let (da, db, d2a, d2b) = binary_rel_entropy_derivatives(0.5, 0.5).unwrap();
        assert_abs_diff_eq!(da, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(db, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d2a, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d2b, 4.0, epsilon = 1e-12);
        let (_, db, _, _) = binary_rel_entropy_derivatives(0.5, 0.75).unwrap();
        assert_abs_diff_eq!(db, 4.0 / 3.0, epsilon = 1e-12);
        assert!(binary_rel_entropy_derivatives(0.0, 0.5).is_err());
    }

    #[test]
    fn binary_kl_derivatives_match_finite_differences() {
        let h = 1e-5;
        for &(a, b) in &[(0.3, 0.6), (0.5, 0.75), (0.8, 0.2), (0.45, 0.5)] {
            let (da, db, d2a, d2b) = binary_rel_entropy_derivatives(a, b).unwrap();
            let f = |a: f64, b: f64| binary_rel_entropy(a, b).unwrap();
            let fd_a = (f(a + h, b) - f(a - h, b)) / (2.0 * h);
            let fd_b = (f(a, b + h) - f(a, b - h)) / (2.0 * h);
            let fd2_a = (f(a + h, b) - 2.0 * f(a, b) + f(a - h, b)) / (h * h);
            let fd2_b = (f(a, b + h) - 2.0 * f(a, b) + f(a, b - h)) / (h * h);
            assert!((da - fd_a).abs() <= 1e-6 * da.abs().max(1.0));
            assert!((db - fd_b).abs() <= 1e-6 * db.abs().max(1.0));
            assert!((d2a - fd2_a).abs() <= 1e-4 * d2a.abs().max(1.0));
            assert!((d2b - fd2_b).abs() <= 1e-4 * d2b.abs().max(1.0));
        }
    }

    #[test]
    fn bloch_round_trip() {
        let t0 = BlochVector::new([0.0, 0.0, 0.0]).unwrap();
        let pi = DensityMatrix::maximally_mixed(2);
        assert_eq!(qubit_from_bloch(&t0).matrix(), pi.matrix());

        let tz = BlochVector::new([0.0, 0.0, 0.5]).unwrap();
        let rho = qubit_from_bloch(&tz);
        let spec = rho.spectrum();
        assert_abs_diff_eq!(spec.values()[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.values()[1], 0.25, epsilon = 1e-12);

        let t = BlochVector::new([0.2, -0.4, 0.3]).unwrap();
        let back = bloch_from_qubit(&qubit_from_bloch(&t)).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(back.0[k], t.0[k], epsilon = 1e-12);
        }
        assert!(BlochVector::new([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn qubit_rate_matches_bloch_norm_formula() {
        for &norm in &[0.1, 0.5, 0.9, 0.99] {
            let t = BlochVector::new([0.0, norm, 0.0]).unwrap();
            let d = rel_entropy_vs_pi(&qubit_from_bloch(&t));
            let expect = -0.5 * (1.0 - norm * norm).ln();
            assert!((d - expect).abs() <= 1e-10);
        }
    }
}

//! Dense eigen-oracle for the stability analysis.
//!
//! The analytic eigenvalue formulas are checked by assembling the Hessian of
//! the uniform state and solving the generalized problem `H v = lambda M v`,
//! where `M` is the Gram matrix of `u -> ||Du||^2`, on the mean-zero subspace.

use serde::{Deserialize, Serialize};

use crate::energetics::{hessian, Deformation, ModelKind};
use crate::error::{EamError, Result};
use crate::lattice::{fourier_modes, ChainConfig};
use crate::linalg::{cholesky, dot, solve_lower, solve_lower_transpose, Matrix, MeanZeroBasis};
use crate::potentials::PotentialSet;
use crate::scalar::Scalar;
use crate::stability::{coefficients, lambda_atomistic, lambda_recon, lambda_volume};

/// Sweep budget of the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 50;

/// Matrix of the quadratic form `u -> epsilon * sum ((u_l - u_{l-1}) / epsilon)^2`:
/// the periodic second-difference stencil divided by `epsilon`.
pub fn gram_du<T: Scalar>(cfg: &ChainConfig<T>) -> Matrix<T> {
    let len = cfg.atoms();
    let inv = T::one() / cfg.epsilon();
    let mut m = Matrix::zeros(len, len);
    for i in 0..len {
        let j = (i + 1) % len;
        m[(i, i)] += inv;
        m[(j, j)] += inv;
        m[(i, j)] -= inv;
        m[(j, i)] -= inv;
    }
    m
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
/// Returns ascending eigenvalues and, if requested, matching orthonormal
/// eigenvectors as columns of a matrix.
pub fn jacobi_eigen<T: Scalar>(a: &Matrix<T>, vectors: bool) -> Result<(Vec<T>, Option<Matrix<T>>)> {
    let n = a.rows();
    let mut a = a.clone();
    let mut v = vectors.then(|| Matrix::identity(n));
    let frob =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).fold(T::zero(), |s, (i, j)| s + a[(i, j)] * a[(i, j)]).sqrt();
    let target = T::epsilon() * frob;
    let off_norm = |a: &Matrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)] * a[(i, j)];
            }
        }
        (s + s).sqrt()
    };
    let mut converged = n < 2 || off_norm(&a) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta.is_infinite() { T::zero() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                if s == T::zero() {
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    continue;
                }
                let tau = s / (T::one() + c);
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    let nkp = akp - s * (akq + tau * akp);
                    let nkq = akq + s * (akp - tau * akq);
                    a[(k, p)] = nkp;
                    a[(p, k)] = nkp;
                    a[(k, q)] = nkq;
                    a[(q, k)] = nkq;
                }
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                        v[(k, p)] = vkp - s * (vkq + tau * vkp);
                        v[(k, q)] = vkq + s * (vkp - tau * vkq);
                    }
                }
            }
        }
        converged = off_norm(&a) <= target;
    }
    if !converged {
        return Err(EamError::JacobiNoConvergence { sweeps, off_norm: off_norm(&a).as_f64() });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let v = v.map(|v| Matrix::from_fn(n, n, |i, k| v[(i, order[k])]));
    Ok((values, v))
}

/// Space on which the pencil is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    Full,
    /// Vectors with zero component sum; removes the common translation null direction.
    ZeroMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Ambient-space eigenvectors normalized to `v^T M v = 1`, one per value.
    pub vectors: Option<Vec<Vec<T>>>,
    /// Largest `||H v - lambda M v|| / (||v|| ||H||_F)` over all pairs.
    pub max_residual: T,
}

fn frobenius<T: Scalar>(a: &Matrix<T>) -> T {
    let mut s = T::zero();
    for i in 0..a.rows() {
        for &x in a.row(i) {
            s += x * x;
        }
    }
    s.sqrt()
}

/// Generalized eigenvalues of the symmetric pencil `(H, M)` with `M` positive
/// definite on the chosen subspace: Cholesky reduction to a standard problem,
/// then [`jacobi_eigen`]. The residual of every pair is measured in the
/// reduced coordinates and reported.
pub fn sym_eigen<T: Scalar>(
    h: &Matrix<T>,
    m: &Matrix<T>,
    subspace: Subspace,
    vectors: bool,
) -> Result<GeneralizedEigen<T>> {
    if !h.is_square() || !m.is_square() || h.rows() != m.rows() {
        return Err(EamError::LengthMismatch { expected: h.rows(), found: m.rows() });
    }
    let sym_tol = |a: &Matrix<T>| T::lit(1e-10) * a.max_abs().max(T::one());
    for a in [h, m] {
        if a.asymmetry() > sym_tol(a) {
            return Err(EamError::NotSymmetric(a.asymmetry().as_f64()));
        }
    }
    let basis = match subspace {
        Subspace::ZeroMean if h.rows() >= 2 => Some(MeanZeroBasis::new(h.rows())),
        Subspace::ZeroMean => {
            return Ok(GeneralizedEigen { values: vec![], vectors: vectors.then(Vec::new), max_residual: T::zero() })
        }
        Subspace::Full => None,
    };
    let (hr, mr) = match &basis {
        Some(b) => (b.congruence(h), b.congruence(m)),
        None => (h.clone(), m.clone()),
    };
    let n = hr.rows();
    let l = cholesky(&mr)?;
    // C = L^{-1} H L^{-T}, built column by column.
    let mut x = Matrix::zeros(n, n);
    for j in 0..n {
        let col = solve_lower(&l, &hr.column(j));
        for i in 0..n {
            x[(i, j)] = col[i];
        }
    }
    let mut c = Matrix::zeros(n, n);
    for j in 0..n {
        let col = solve_lower(&l, x.row(j));
        for i in 0..n {
            c[(i, j)] = col[i];
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = T::lit(0.5) * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }
    let (values, z) = jacobi_eigen(&c, true)?;
    let z = z.expect("vectors requested");
    let hnorm = frobenius(&hr).max(T::min_positive_value());
    let mut max_residual = T::zero();
    let mut out_vectors = vectors.then(|| Vec::with_capacity(n));
    for (k, &lambda) in values.iter().enumerate() {
        let vr = solve_lower_transpose(&l, &z.column(k));
        let hv = hr.mul_vec(&vr);
        let mv = mr.mul_vec(&vr);
        let res: Vec<T> = hv.iter().zip(&mv).map(|(&a, &b)| a - lambda * b).collect();
        let r = (dot(&res, &res) / dot(&vr, &vr)).sqrt() / hnorm;
        max_residual = max_residual.max(r);
        if let Some(out) = out_vectors.as_mut() {
            out.push(match &basis {
                Some(b) => b.extend(&vr),
                None => vr,
            });
        }
    }
    Ok(GeneralizedEigen { values, vectors: out_vectors, max_residual })
}

/// Hessian of `model` at the uniform state and the `||Du||^2` Gram matrix.
pub fn uniform_pencil<T: Scalar>(
    model: ModelKind,
    p: &PotentialSet<T>,
    cfg: &ChainConfig<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let y = Deformation::uniform(cfg);
    Ok((hessian(model, &y, p)?, gram_du(cfg)))
}

/// `u^T H u / u^T M u` at the uniform state.
pub fn rayleigh_quotient<T: Scalar>(model: ModelKind, p: &PotentialSet<T>, cfg: &ChainConfig<T>, u: &[T]) -> Result<T> {
    if u.len() != cfg.atoms() {
        return Err(EamError::LengthMismatch { expected: cfg.atoms(), found: u.len() });
    }
    let (h, m) = uniform_pencil(model, p, cfg)?;
    Ok(h.quadratic_form(u) / m.quadratic_form(u))
}

/// Smallest generalized eigenvalue of the dense uniform-state pencil.
pub fn oracle_min_eigenvalue<T: Scalar>(model: ModelKind, p: &PotentialSet<T>, f: T, n: usize) -> Result<T> {
    let cfg = ChainConfig::new(n, f)?;
    let (h, m) = uniform_pencil(model, p, &cfg)?;
    let eig = sym_eigen(&h, &m, Subspace::ZeroMean, false)?;
    Ok(eig.values.first().copied().unwrap_or(T::infinity()))
}

/// Whether the eigenvector of the smallest eigenvalue has strictly
/// alternating first differences.
pub fn min_eigenvector_alternates<T: Scalar>(model: ModelKind, p: &PotentialSet<T>, f: T, n: usize) -> Result<bool> {
    let cfg = ChainConfig::new(n, f)?;
    let (h, m) = uniform_pencil(model, p, &cfg)?;
    let eig = sym_eigen(&h, &m, Subspace::ZeroMean, true)?;
    let v = &eig.vectors.expect("vectors requested")[0];
    let d = crate::lattice::diff(v, 1, &cfg)?;
    let len = d.len();
    Ok((0..len).all(|i| d[i] * d[(i + 1) % len] < T::zero()))
}

/// Analytic eigenvalue of `model` at symbol `s`.
fn analytic_lambda<T: Scalar>(model: ModelKind, c: &crate::stability::StabilityCoefficients<T>, s: T) -> Result<T> {
    match model {
        ModelKind::Atomistic => lambda_atomistic(c, s),
        ModelKind::VolumeLocal => Ok(lambda_volume(c)),
        ModelKind::ReconstructionLocal => lambda_recon(c, s),
    }
}

/// Analytic and numeric spectra of one model at one uniform strain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport<T> {
    pub model: ModelKind,
    #[serde(rename = "F")]
    pub strain: T,
    #[serde(rename = "N")]
    pub n: usize,
    /// `s_k`, `k = 1..=N`.
    pub symbols: Vec<T>,
    /// `lambda(s_k)`, `k = 1..=N`.
    pub analytic: Vec<T>,
    /// Sorted generalized eigenvalues on the mean-zero subspace (`2N - 1` of them).
    pub numeric: Vec<T>,
    /// Largest gap after pairing sorted numeric values with the analytic values
    /// repeated by multiplicity.
    pub max_abs_mismatch: T,
    pub max_residual: T,
}

/// Multiplicity of mode `k` among the `2N - 1` mean-zero modes.
pub fn multiplicity(k: usize, n: usize) -> usize {
    if k == n {
        1
    } else {
        2
    }
}

impl<T: Scalar> SpectrumReport<T> {
    /// `(k, s_k, analytic)` repeated by multiplicity, sorted by value.
    pub fn expanded_analytic(&self) -> Vec<(usize, T, T)> {
        let mut out: Vec<(usize, T, T)> = Vec::with_capacity(2 * self.n - 1);
        for (i, (&s, &lam)) in self.symbols.iter().zip(&self.analytic).enumerate() {
            let k = i + 1;
            for _ in 0..multiplicity(k, self.n) {
                out.push((k, s, lam));
            }
        }
        out.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
        out
    }

    /// Each analytic value is matched by exactly as many numeric eigenvalues as
    /// the modes (counted with multiplicity) sharing that value within `tol`,
    /// and there are `2N - 1` eigenvalues in all.
    pub fn multiplicity_law_holds(&self, tol: T) -> bool {
        if self.numeric.len() != 2 * self.n - 1 {
            return false;
        }
        self.analytic.iter().all(|&lam| {
            let expected: usize = self
                .analytic
                .iter()
                .enumerate()
                .filter(|(_, &other)| (other - lam).abs() <= tol)
                .map(|(i, _)| multiplicity(i + 1, self.n))
                .sum();
            let found = self.numeric.iter().filter(|&&x| (x - lam).abs() <= tol).count();
            expected == found
        })
    }

    /// Rows `k,s_k,analytic,numeric` pairing sorted values, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,s_k,analytic,numeric\n");
        for ((k, s, lam), num) in self.expanded_analytic().into_iter().zip(&self.numeric) {
            out.push_str(&format!("{k},{:.16e},{:.16e},{:.16e}\n", s.as_f64(), lam.as_f64(), num.as_f64()));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum reports serialize")
    }
}

/// Builds the uniform-state pencil, solves it, and pairs the result with the analytic spectrum.
pub fn verify_diagonalization<T: Scalar>(
    model: ModelKind,
    p: &PotentialSet<T>,
    f: T,
    n: usize,
) -> Result<SpectrumReport<T>> {
    let cfg = ChainConfig::new(n, f)?;
    let c = coefficients(p, f)?;
    let symbols = fourier_modes::<T>(n)?;
    let analytic = symbols.iter().map(|&s| analytic_lambda(model, &c, s)).collect::<Result<Vec<T>>>()?;
    let (h, m) = uniform_pencil(model, p, &cfg)?;
    let eig = sym_eigen(&h, &m, Subspace::ZeroMean, false)?;
    let mut report = SpectrumReport {
        model,
        strain: f,
        n,
        symbols,
        analytic,
        numeric: eig.values,
        max_abs_mismatch: T::zero(),
        max_residual: eig.max_residual,
    };
    let expanded = report.expanded_analytic();
    report.max_abs_mismatch = if expanded.len() == report.numeric.len() {
        expanded.iter().zip(&report.numeric).fold(T::zero(), |w, (e, &x)| w.max((e.2 - x).abs()))
    } else {
        T::infinity()
    };
    Ok(report)
}

//! Periodic chain geometry and discrete calculus.
//!
//! A chain with `N` periods holds `2N` atoms. Storage index `i` in `0..2N`
//! corresponds to the signed atom label `l = i - N + 1`, so labels run over
//! `-N+1..=N`. All neighbour access wraps modulo `2N`.

use serde::{Deserialize, Serialize};

use crate::error::{EamError, Result};
use crate::scalar::Scalar;

/// Period count `N`, spacing `epsilon = 1/N`, and macroscopic strain `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig<T> {
    n: usize,
    epsilon: T,
    strain: T,
}

impl<T: Scalar> ChainConfig<T> {
    pub fn new(n: usize, strain: T) -> Result<Self> {
        if n == 0 {
            return Err(EamError::invalid("N", "must be at least 1"));
        }
        if !(strain > T::zero() && strain.is_finite()) {
            return Err(EamError::invalid("F", format!("must be positive and finite, got {strain}")));
        }
        Ok(Self { n, epsilon: T::one() / T::from_count(n), strain })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn strain(&self) -> T {
        self.strain
    }

    /// Number of atoms per period, `2N`.
    pub fn atoms(&self) -> usize {
        2 * self.n
    }

    /// Same chain at a different strain.
    pub fn with_strain(&self, strain: T) -> Result<Self> {
        Self::new(self.n, strain)
    }

    /// Signed label of storage slot `i`.
    pub fn label(&self, i: usize) -> isize {
        i as isize - self.n as isize + 1
    }

    /// Storage slot of a (possibly out-of-range) signed label, reduced periodically.
    pub fn slot(&self, label: isize) -> usize {
        (label + self.n as isize - 1).rem_euclid(self.atoms() as isize) as usize
    }

    /// Uniform deformation `y_l = F * epsilon * l`.
    pub fn uniform_positions(&self) -> Vec<T> {
        (0..self.atoms()).map(|i| self.strain * self.epsilon * T::lit(self.label(i) as f64)).collect()
    }
}

pub(crate) fn mean_zero_tolerance<T: Scalar>(values: &[T]) -> T {
    let scale = values.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    T::lit(1e-12).max(T::lit(4096.0) * T::epsilon()) * scale
}

/// A `2N`-periodic, mean-zero perturbation of the uniform state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Displacement<T> {
    values: Vec<T>,
}

impl<T: Scalar> Displacement<T> {
    /// Validates length and zero mean.
    pub fn new(values: Vec<T>, cfg: &ChainConfig<T>) -> Result<Self> {
        if values.len() != cfg.atoms() {
            return Err(EamError::LengthMismatch { expected: cfg.atoms(), found: values.len() });
        }
        let sum: T = crate::scalar::pairwise_sum(&values);
        let tolerance = mean_zero_tolerance(&values);
        if sum.abs() > tolerance || !sum.is_finite() {
            let n = T::from_count(values.len());
            return Err(EamError::NotMeanZero { mean: (sum / n).as_f64(), tolerance: tolerance.as_f64() });
        }
        Ok(Self { values })
    }

    /// Removes the mean from arbitrary values.
    pub fn projected(mut values: Vec<T>, cfg: &ChainConfig<T>) -> Result<Self> {
        if values.len() != cfg.atoms() {
            return Err(EamError::LengthMismatch { expected: cfg.atoms(), found: values.len() });
        }
        let mean = crate::scalar::pairwise_sum(&values) / T::from_count(values.len());
        for v in &mut values {
            *v -= mean;
        }
        Ok(Self { values })
    }

    pub fn zeros(cfg: &ChainConfig<T>) -> Self {
        Self { values: vec![T::zero(); cfg.atoms()] }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { values: self.values.iter().map(|&v| v * s).collect() }
    }

    /// Cyclic shift by `k` slots; stays mean-zero.
    pub fn rotated(&self, k: usize) -> Self {
        let mut values = self.values.clone();
        let len = values.len();
        values.rotate_right(k % len);
        Self { values }
    }
}

/// Backward difference `(u_l - u_{l-1}) / epsilon`, iterated `order` times.
pub fn diff<T: Scalar>(u: &[T], order: usize, cfg: &ChainConfig<T>) -> Result<Vec<T>> {
    if !(1..=4).contains(&order) {
        return Err(EamError::OrderOutOfRange(order));
    }
    let len = cfg.atoms();
    if u.len() != len {
        return Err(EamError::LengthMismatch { expected: len, found: u.len() });
    }
    let inv = T::one() / cfg.epsilon();
    let mut cur = u.to_vec();
    for _ in 0..order {
        cur = (0..len).map(|i| (cur[i] - cur[(i + len - 1) % len]) * inv).collect();
    }
    Ok(cur)
}

/// `(epsilon * sum v_l^2)^(1/2)`.
pub fn norm_l2eps<T: Scalar>(v: &[T], cfg: &ChainConfig<T>) -> Result<T> {
    if v.len() != cfg.atoms() {
        return Err(EamError::LengthMismatch { expected: cfg.atoms(), found: v.len() });
    }
    let squares: Vec<T> = v.iter().map(|&x| x * x).collect();
    Ok((cfg.epsilon() * crate::scalar::pairwise_sum(&squares)).sqrt())
}

/// Symbols `s_k = 4 sin^2(k pi / 2N)` for `k = 1..=N`, strictly increasing to `s_N = 4`.
pub fn fourier_modes<T: Scalar>(n: usize) -> Result<Vec<T>> {
    if n == 0 {
        return Err(EamError::invalid("N", "must be at least 1"));
    }
    Ok((1..=n)
        .map(|k| {
            if k == n {
                return T::lit(4.0);
            }
            let s = (T::from_count(k) * T::PI() / T::from_count(2 * n)).sin();
            T::lit(4.0) * s * s
        })
        .collect())
}

/// Real displacement whose first difference is `c * cos(k pi l / N)`, with
/// `c > 0` chosen so that `||Du|| = 1`. For `k = N` this is the alternating
/// mode `(-1)^l epsilon / (2 sqrt 2)`.
pub fn mode_displacement<T: Scalar>(k: usize, n: usize) -> Result<Displacement<T>> {
    if n == 0 || k == 0 || k > n {
        return Err(EamError::ModeOutOfRange { k, n });
    }
    let cfg = ChainConfig::new(n, T::one())?;
    let eps = cfg.epsilon();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let values: Vec<T> = if k == n {
        (0..cfg.atoms()).map(|i| if cfg.label(i).rem_euclid(2) == 0 { eps / two } else { -eps / two }).collect()
    } else {
        // Discrete antiderivative of cos: sin(theta (l + 1/2)) / (2 sin(theta / 2)).
        let theta = T::from_count(k) * T::PI() / T::from_count(n);
        let denom = two * (theta * half).sin();
        (0..cfg.atoms()).map(|i| eps * (theta * (T::lit(cfg.label(i) as f64) + half)).sin() / denom).collect()
    };
    let u = Displacement::projected(values, &cfg)?;
    let norm = norm_l2eps(&diff(u.values(), 1, &cfg)?, &cfg)?;
    Ok(u.scaled(T::one() / norm))
}

/// Complex coefficients `c_k`, `k = -N+1..=N`, `k != 0`, of a mean-zero
/// periodic sequence in the expansion `v_l = sum_k c_k / sqrt(2) exp(i k pi l / N)`.
/// With this scaling `epsilon * sum |v_l|^2 = sum |c_k|^2`.
pub fn fourier_coefficients<T: Scalar>(v: &[T], cfg: &ChainConfig<T>) -> Result<Vec<(isize, T, T)>> {
    let len = cfg.atoms();
    if v.len() != len {
        return Err(EamError::LengthMismatch { expected: len, found: v.len() });
    }
    let n = cfg.n() as isize;
    let scale = cfg.epsilon() / T::SQRT_2();
    let mut out = Vec::with_capacity(len - 1);
    for k in (-n + 1)..=n {
        if k == 0 {
            continue;
        }
        let (mut re, mut im) = (T::zero(), T::zero());
        for (i, &x) in v.iter().enumerate() {
            // Reduce the phase index exactly before converting to an angle.
            let phase = (k * cfg.label(i)).rem_euclid(2 * n);
            let angle = T::PI() * T::lit(phase as f64) / T::from_count(cfg.n());
            re += x * angle.cos();
            im -= x * angle.sin();
        }
        out.push((k, re * scale, im * scale));
    }
    Ok(out)
}

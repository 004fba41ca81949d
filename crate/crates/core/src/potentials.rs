//! Constitutive functions of the embedded-atom chain: the pair potential,
//! the electron density, and the embedding function.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{EamError, Result};
use crate::scalar::Scalar;

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Domain<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }

    pub fn real_line() -> Self {
        Self { lo: T::neg_infinity(), hi: T::infinity() }
    }

    pub fn positive() -> Self {
        Self { lo: T::zero(), hi: T::infinity() }
    }

    pub fn contains(&self, x: T) -> bool {
        x > self.lo && x < self.hi
    }

    /// Distance from `x` to the nearest end (infinite for unbounded sides).
    pub fn margin(&self, x: T) -> T {
        (x - self.lo).min(self.hi - x)
    }
}

/// A real function of one variable with analytic first and second derivatives.
pub trait ScalarFunction2<T: Scalar>: Send + Sync + Debug {
    fn eval(&self, x: T) -> T;
    fn d1(&self, x: T) -> T;
    fn d2(&self, x: T) -> T;
    fn domain(&self) -> Domain<T>;

    /// `(f, f', f'')` at `x`, or a domain error naming the function.
    fn checked(&self, name: &'static str, x: T) -> Result<(T, T, T)> {
        if !self.domain().contains(x) {
            return Err(EamError::DomainViolation { function: name, value: x.as_f64() });
        }
        let out = (self.eval(x), self.d1(x), self.d2(x));
        if !(out.0.is_finite() && out.1.is_finite() && out.2.is_finite()) {
            return Err(EamError::DomainViolation { function: name, value: x.as_f64() });
        }
        Ok(out)
    }
}

/// Morse pair potential `exp(-2a(r-1)) - 2 exp(-a(r-1))`, minimum `-1` at `r = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Morse<T> {
    pub alpha: T,
}

impl<T: Scalar> ScalarFunction2<T> for Morse<T> {
    fn eval(&self, r: T) -> T {
        let e = (-self.alpha * (r - T::one())).exp();
        e * e - T::lit(2.0) * e
    }

    fn d1(&self, r: T) -> T {
        let e = (-self.alpha * (r - T::one())).exp();
        T::lit(2.0) * self.alpha * (e - e * e)
    }

    fn d2(&self, r: T) -> T {
        let e = (-self.alpha * (r - T::one())).exp();
        let a2 = self.alpha * self.alpha;
        T::lit(4.0) * a2 * e * e - T::lit(2.0) * a2 * e
    }

    fn domain(&self) -> Domain<T> {
        Domain::positive()
    }
}

/// Exponentially decaying electron density `exp(-b r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDensity<T> {
    pub beta: T,
}

impl<T: Scalar> ScalarFunction2<T> for ExpDensity<T> {
    fn eval(&self, r: T) -> T {
        (-self.beta * r).exp()
    }

    fn d1(&self, r: T) -> T {
        -self.beta * (-self.beta * r).exp()
    }

    fn d2(&self, r: T) -> T {
        self.beta * self.beta * (-self.beta * r).exp()
    }

    fn domain(&self) -> Domain<T> {
        Domain::positive()
    }
}

/// Square-root embedding `-c sqrt(x)` for `x > floor`. Convex and decreasing when `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtEmbedding<T> {
    pub c: T,
    pub floor: T,
}

impl<T: Scalar> ScalarFunction2<T> for SqrtEmbedding<T> {
    fn eval(&self, x: T) -> T {
        -self.c * x.sqrt()
    }

    fn d1(&self, x: T) -> T {
        -self.c / (T::lit(2.0) * x.sqrt())
    }

    fn d2(&self, x: T) -> T {
        self.c / (T::lit(4.0) * x * x.sqrt())
    }

    fn domain(&self) -> Domain<T> {
        Domain::new(self.floor, T::infinity())
    }
}

/// Constant function on the whole real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant<T> {
    pub value: T,
}

impl<T: Scalar> ScalarFunction2<T> for Constant<T> {
    fn eval(&self, _: T) -> T {
        self.value
    }

    fn d1(&self, _: T) -> T {
        T::zero()
    }

    fn d2(&self, _: T) -> T {
        T::zero()
    }

    fn domain(&self) -> Domain<T> {
        Domain::real_line()
    }
}

type Fn1<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// A function assembled from three closures.
#[derive(Clone)]
pub struct FnTriple<T> {
    f: Fn1<T>,
    df: Fn1<T>,
    d2f: Fn1<T>,
    domain: Domain<T>,
}

impl<T: Scalar> FnTriple<T> {
    pub fn new(
        f: impl Fn(T) -> T + Send + Sync + 'static,
        df: impl Fn(T) -> T + Send + Sync + 'static,
        d2f: impl Fn(T) -> T + Send + Sync + 'static,
        domain: Domain<T>,
    ) -> Self {
        Self { f: Arc::new(f), df: Arc::new(df), d2f: Arc::new(d2f), domain }
    }
}

impl<T: Scalar> Debug for FnTriple<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnTriple").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl<T: Scalar> ScalarFunction2<T> for FnTriple<T> {
    fn eval(&self, x: T) -> T {
        (self.f)(x)
    }
    fn d1(&self, x: T) -> T {
        (self.df)(x)
    }
    fn d2(&self, x: T) -> T {
        (self.d2f)(x)
    }
    fn domain(&self) -> Domain<T> {
        self.domain
    }
}

/// The triple (pair potential, electron density, embedding function).
/// Immutable once built; clones share the underlying functions.
#[derive(Debug, Clone)]
pub struct PotentialSet<T> {
    phi: Arc<dyn ScalarFunction2<T>>,
    rho: Arc<dyn ScalarFunction2<T>>,
    embed: Arc<dyn ScalarFunction2<T>>,
}

impl<T: Scalar> PotentialSet<T> {
    pub fn new(
        phi: impl ScalarFunction2<T> + 'static,
        rho: impl ScalarFunction2<T> + 'static,
        embed: impl ScalarFunction2<T> + 'static,
    ) -> Self {
        Self { phi: Arc::new(phi), rho: Arc::new(rho), embed: Arc::new(embed) }
    }

    pub fn phi(&self) -> &dyn ScalarFunction2<T> {
        self.phi.as_ref()
    }

    pub fn rho(&self) -> &dyn ScalarFunction2<T> {
        self.rho.as_ref()
    }

    pub fn embed(&self) -> &dyn ScalarFunction2<T> {
        self.embed.as_ref()
    }

    /// Same pair potential and density with the embedding switched off.
    pub fn without_embedding(&self) -> Self {
        Self { phi: self.phi.clone(), rho: self.rho.clone(), embed: Arc::new(Constant { value: T::zero() }) }
    }

    pub fn phi_at(&self, r: T) -> Result<(T, T, T)> {
        self.phi.checked("phi", r)
    }

    pub fn rho_at(&self, r: T) -> Result<(T, T, T)> {
        self.rho.checked("rho", r)
    }

    pub fn embed_at(&self, x: T) -> Result<(T, T, T)> {
        self.embed.checked("G", x)
    }
}

/// Parameters of the Morse / exponential / square-root toy family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyFamilyParams<T> {
    pub alpha: T,
    pub beta: T,
    pub c: T,
    pub rho_floor: T,
}

impl<T: Scalar> Default for ToyFamilyParams<T> {
    fn default() -> Self {
        Self { alpha: T::lit(4.0), beta: T::lit(3.0), c: T::one(), rho_floor: T::lit(1e-8) }
    }
}

impl<T: Scalar> ToyFamilyParams<T> {
    pub fn new(alpha: T, beta: T, c: T) -> Self {
        Self { alpha, beta, c, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(EamError::invalid(name, format!("must be positive and finite, got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        positive("rho_floor", self.rho_floor)?;
        if !(self.c >= T::zero() && self.c.is_finite()) {
            return Err(EamError::invalid("c", format!("must be non-negative and finite, got {}", self.c)));
        }
        Ok(())
    }

    /// Sets one field by its config key.
    pub fn set(&mut self, key: &str, value: T) -> Result<()> {
        match key {
            "alpha" => self.alpha = value,
            "beta" => self.beta = value,
            "c" => self.c = value,
            "rho_floor" => self.rho_floor = value,
            other => return Err(EamError::Parse(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults. Blank lines and `#` comments are skipped.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut params = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| EamError::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let value: f64 = value.trim().parse().map_err(|e| EamError::Parse(format!("line {}: {e}", lineno + 1)))?;
            params.set(key.trim(), T::lit(value))?;
        }
        Ok(params)
    }
}

/// Builds the toy potential set with analytic derivatives.
pub fn make_toy_potentials<T: Scalar>(params: ToyFamilyParams<T>) -> Result<PotentialSet<T>> {
    params.validate()?;
    Ok(PotentialSet::new(
        Morse { alpha: params.alpha },
        ExpDensity { beta: params.beta },
        SqrtEmbedding { c: params.c, floor: params.rho_floor },
    ))
}

fn relative_or_absolute<T: Scalar>(analytic: T, numeric: T) -> T {
    let diff = (analytic - numeric).abs();
    if analytic.abs() < T::lit(1e-8) {
        diff
    } else {
        diff / analytic.abs()
    }
}

/// Largest discrepancy between the analytic `d1`, `d2` of `f` and central
/// differences of `f.eval` over `points`. Relative error, with an absolute
/// fallback where the analytic value is below `1e-8` in magnitude.
///
/// `d1` uses step `h`. `d2` uses the larger of `h` and `eps^(1/4)` (scaled by
/// `max(1, |x|)`) since the second difference loses `eps / h^2` to rounding.
pub fn check_derivatives<T: Scalar, F: ScalarFunction2<T> + ?Sized>(f: &F, points: &[T], h: T) -> Result<T> {
    if !(h > T::zero()) {
        return Err(EamError::invalid("h", "step must be positive"));
    }
    let domain = f.domain();
    let two = T::lit(2.0);
    let mut worst = T::zero();
    for &x in points {
        let margin = domain.margin(x);
        if !(margin >= h) {
            return Err(EamError::DomainViolation { function: "check_derivatives", value: x.as_f64() });
        }
        let fd1 = (f.eval(x + h) - f.eval(x - h)) / (two * h);
        let h2 = (h.max(T::epsilon().sqrt().sqrt()) * x.abs().max(T::one())).min(margin / two).max(h);
        let fd2 = (f.eval(x + h2) - two * f.eval(x) + f.eval(x - h2)) / (h2 * h2);
        worst = worst.max(relative_or_absolute(f.d1(x), fd1)).max(relative_or_absolute(f.d2(x), fd2));
    }
    Ok(worst)
}

/// Which of the standard EAM sign conditions hold at a uniform strain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionSigns {
    pub phi2_f_positive: bool,
    pub phi2_2f_negative: bool,
    pub rho1_f_nonpositive: bool,
    pub rho1_2f_nonpositive: bool,
    pub rho2_f_nonnegative: bool,
    pub rho2_2f_nonnegative: bool,
    pub g2_nonnegative: bool,
    pub all_hold: bool,
}

impl AssumptionSigns {
    pub(crate) fn from_values<T: Scalar>(
        phi2_f: T,
        phi2_2f: T,
        rho1_f: T,
        rho1_2f: T,
        rho2_f: T,
        rho2_2f: T,
        g2: T,
    ) -> Self {
        let zero = T::zero();
        let mut s = Self {
            phi2_f_positive: phi2_f > zero,
            phi2_2f_negative: phi2_2f < zero,
            rho1_f_nonpositive: rho1_f <= zero,
            rho1_2f_nonpositive: rho1_2f <= zero,
            rho2_f_nonnegative: rho2_f >= zero,
            rho2_2f_nonnegative: rho2_2f >= zero,
            g2_nonnegative: g2 >= zero,
            all_hold: false,
        };
        s.all_hold = s.phi2_f_positive
            && s.phi2_2f_negative
            && s.rho1_f_nonpositive
            && s.rho1_2f_nonpositive
            && s.rho2_f_nonnegative
            && s.rho2_2f_nonnegative
            && s.g2_nonnegative;
        s
    }
}

/// Evaluates the sign conditions at strain `f`, with `G''` taken at the
/// uniform-state density `2 rho(F) + 2 rho(2F)`.
pub fn check_assumption_signs<T: Scalar>(p: &PotentialSet<T>, f: T) -> Result<AssumptionSigns> {
    let two_f = T::lit(2.0) * f;
    let (_, _, phi2_f) = p.phi_at(f)?;
    let (_, _, phi2_2f) = p.phi_at(two_f)?;
    let (rho_f, rho1_f, rho2_f) = p.rho_at(f)?;
    let (rho_2f, rho1_2f, rho2_2f) = p.rho_at(two_f)?;
    let (_, _, g2) = p.embed_at(T::lit(2.0) * (rho_f + rho_2f))?;
    Ok(AssumptionSigns::from_values(phi2_f, phi2_2f, rho1_f, rho1_2f, rho2_f, rho2_2f, g2))
}

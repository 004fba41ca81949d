//! Closed-form stability analysis of the uniform state.
//!
//! On the periodic chain the second variation of every model is diagonalized
//! by Fourier modes of `Du`. Relative to `||Du||^2` each mode contributes an
//! eigenvalue that depends only on the symbol `s = 4 sin^2(k pi / 2N)`:
//!
//! * atomistic: the cubic `A + B s + C s^2 + D s^3`,
//! * volume-local: the constant `A`,
//! * reconstruction-local: the line `A + B~ s`.
//!
//! Everything here is evaluated from a [`StabilityCoefficients`] record.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::energetics::ModelKind;
use crate::error::{EamError, Result};
use crate::lattice::{fourier_modes, mode_displacement, ChainConfig};
use crate::potentials::{AssumptionSigns, PotentialSet};
use crate::scalar::{Scalar, Sign};

/// Relative width of the band treated as zero in sign decisions.
pub const SIGN_BAND: f64 = 1e-12;

/// Moduli and raw derivative values at a uniform strain `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityCoefficients<T> {
    #[serde(rename = "F")]
    pub strain: T,
    #[serde(rename = "A_hat")]
    pub a_hat: T,
    #[serde(rename = "A_tilde")]
    pub a_tilde: T,
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
    #[serde(rename = "B_tilde")]
    pub b_tilde: T,
    #[serde(rename = "C")]
    pub c: T,
    #[serde(rename = "D")]
    pub d: T,
    #[serde(rename = "G1")]
    pub g1: T,
    #[serde(rename = "G2")]
    pub g2: T,
    #[serde(rename = "phi2_F")]
    pub phi2_f: T,
    #[serde(rename = "phi2_2F")]
    pub phi2_2f: T,
    #[serde(rename = "rho1_F")]
    pub rho1_f: T,
    #[serde(rename = "rho1_2F")]
    pub rho1_2f: T,
    #[serde(rename = "rho2_F")]
    pub rho2_f: T,
    #[serde(rename = "rho2_2F")]
    pub rho2_2f: T,
}

/// Evaluates all moduli at strain `f`, with `G'` and `G''` taken at the
/// uniform-state density `2 rho(F) + 2 rho(2F)`.
pub fn coefficients<T: Scalar>(p: &PotentialSet<T>, f: T) -> Result<StabilityCoefficients<T>> {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let (_, _, phi2_f) = p.phi_at(f)?;
    let (_, _, phi2_2f) = p.phi_at(two * f)?;
    let (rho_f, rho1_f, rho2_f) = p.rho_at(f)?;
    let (rho_2f, rho1_2f, rho2_2f) = p.rho_at(two * f)?;
    let (_, g1, g2) = p.embed_at(two * (rho_f + rho_2f))?;

    let lin = rho1_f + two * rho1_2f;
    let a_tilde = phi2_f + four * phi2_2f;
    let a_hat = four * g2 * lin * lin + two * g1 * (rho2_f + four * rho2_2f);
    let b = -(phi2_2f
        + g2 * (rho1_f * rho1_f + T::lit(20.0) * rho1_2f * rho1_2f + T::lit(12.0) * rho1_f * rho1_2f)
        + two * g1 * rho2_2f);
    let c = g2 * (T::lit(8.0) * rho1_2f * rho1_2f + two * rho1_f * rho1_2f);
    let d = -g2 * rho1_2f * rho1_2f;
    let b_tilde = -g2 * lin * lin;
    Ok(StabilityCoefficients {
        strain: f,
        a_hat,
        a_tilde,
        a: a_hat + a_tilde,
        b,
        b_tilde,
        c,
        d,
        g1,
        g2,
        phi2_f,
        phi2_2f,
        rho1_f,
        rho1_2f,
        rho2_f,
        rho2_2f,
    })
}

impl<T: Scalar> StabilityCoefficients<T> {
    /// `phi''(2F) + 2 G' rho''(2F)`: decides the reconstruction-vs-atomistic ordering.
    pub fn kappa(&self) -> T {
        self.phi2_2f + T::lit(2.0) * self.g1 * self.rho2_2f
    }

    /// `C^2 - 3 B D`, the discriminant of the derivative of the atomistic cubic.
    pub fn discriminant(&self) -> T {
        self.c * self.c - T::lit(3.0) * self.b * self.d
    }

    /// Sum of magnitudes of the terms making up `B`.
    pub fn b_scale(&self) -> T {
        let (r1, r2) = (self.rho1_f, self.rho1_2f);
        self.phi2_2f.abs()
            + self.g2.abs() * (r1 * r1 + T::lit(20.0) * r2 * r2 + T::lit(12.0) * (r1 * r2).abs())
            + T::lit(2.0) * (self.g1 * self.rho2_2f).abs()
    }

    pub fn kappa_scale(&self) -> T {
        self.phi2_2f.abs() + T::lit(2.0) * (self.g1 * self.rho2_2f).abs()
    }

    pub fn b_sign(&self) -> Sign {
        Sign::classify(self.b, T::lit(SIGN_BAND) * self.b_scale())
    }

    pub fn kappa_sign(&self) -> Sign {
        Sign::classify(self.kappa(), T::lit(SIGN_BAND) * self.kappa_scale())
    }

    /// `C >= 8|D|` with `D <= 0`.
    pub fn condition1_holds(&self) -> bool {
        self.d <= T::zero() && self.c >= T::lit(8.0) * self.d.abs()
    }

    /// Sign conditions on the raw derivatives.
    pub fn assumption_signs(&self) -> AssumptionSigns {
        AssumptionSigns::from_values(
            self.phi2_f,
            self.phi2_2f,
            self.rho1_f,
            self.rho1_2f,
            self.rho2_f,
            self.rho2_2f,
            self.g2,
        )
    }

    /// `phi''(2F) + G'' (rho'(F) + 2 rho'(2F))^2 + 2 G' rho''(2F)`; positive exactly when the
    /// volume-local minimum `A` exceeds the atomistic value at `s = 4`.
    pub fn counterexample_expr(&self) -> T {
        let lin = self.rho1_f + T::lit(2.0) * self.rho1_2f;
        self.phi2_2f + self.g2 * lin * lin + T::lit(2.0) * self.g1 * self.rho2_2f
    }

    /// `B - B~ + [phi''(2F) + G''(16 rho'(2F)^2 + 8 rho'(F) rho'(2F)) + 2 G' rho''(2F)]`,
    /// which vanishes identically.
    pub fn b_identity_residual(&self) -> T {
        let (r1, r2) = (self.rho1_f, self.rho1_2f);
        self.b - self.b_tilde
            + (self.phi2_2f
                + self.g2 * (T::lit(16.0) * r2 * r2 + T::lit(8.0) * r1 * r2)
                + T::lit(2.0) * self.g1 * self.rho2_2f)
    }

    /// `lambda(s_1)` written out in powers of `4 sin^2(pi / 2N)` from the raw derivatives.
    pub fn lambda_s1_expansion(&self, n: usize) -> Result<T> {
        let s = *fourier_modes::<T>(n)?.first().expect("N >= 1 gives one mode");
        let (r1, r2) = (self.rho1_f, self.rho1_2f);
        Ok(self.a_hat + self.a_tilde
            - s * (self.phi2_2f
                + self.g2 * (r1 * r1 + T::lit(20.0) * r2 * r2 + T::lit(12.0) * r1 * r2)
                + self.g1 * T::lit(2.0) * self.rho2_2f)
            + s * s * self.g2 * (T::lit(8.0) * r2 * r2 + T::lit(2.0) * r1 * r2)
            - s * s * s * self.g2 * r2 * r2)
    }
}

fn check_symbol<T: Scalar>(s: T) -> Result<()> {
    if s >= T::zero() && s <= T::lit(4.0) {
        Ok(())
    } else {
        Err(EamError::SymbolOutOfRange(s.as_f64()))
    }
}

fn cubic<T: Scalar>(c: &StabilityCoefficients<T>, s: T) -> T {
    c.a + s * (c.b + s * (c.c + s * c.d))
}

/// `A + B s + C s^2 + D s^3` on `[0, 4]`.
pub fn lambda_atomistic<T: Scalar>(c: &StabilityCoefficients<T>, s: T) -> Result<T> {
    check_symbol(s)?;
    Ok(cubic(c, s))
}

/// The volume-local eigenvalue, `A` for every mode.
pub fn lambda_volume<T: Scalar>(c: &StabilityCoefficients<T>) -> T {
    c.a
}

/// `A + B~ s` on `[0, 4]`.
pub fn lambda_recon<T: Scalar>(c: &StabilityCoefficients<T>, s: T) -> Result<T> {
    check_symbol(s)?;
    Ok(c.a + c.b_tilde * s)
}

/// Local-minimum critical point of the atomistic cubic, where `lambda'' = 2 sqrt(C^2 - 3BD) > 0`.
///
/// Exists when the discriminant is positive and `D < 0`; the same root is
/// also returned for `D >= 0` whenever the cubic still has a strict local
/// minimum. Computed as `-B / (C + sqrt(disc))` for `C >= 0` to avoid cancellation.
pub fn s_star<T: Scalar>(c: &StabilityCoefficients<T>) -> Option<T> {
    let disc = c.discriminant();
    if !(disc > T::zero()) {
        return None;
    }
    let root = disc.sqrt();
    let s = if c.c >= T::zero() {
        -c.b / (c.c + root)
    } else if c.d != T::zero() {
        (root - c.c) / (T::lit(3.0) * c.d)
    } else {
        return None;
    };
    s.is_finite().then_some(s)
}

/// Continuous symbol range `[0, 4]` or the `N` discrete symbols of a finite chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    Continuous,
    Discrete(usize),
}

impl fmt::Display for SpectrumMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumMode::Continuous => f.write_str("continuous"),
            SpectrumMode::Discrete(n) => write!(f, "discrete({n})"),
        }
    }
}

impl FromStr for SpectrumMode {
    type Err = EamError;

    /// Accepts `continuous` and `discrete(N)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "continuous" {
            return Ok(SpectrumMode::Continuous);
        }
        s.strip_prefix("discrete(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|n| n.trim().parse().ok())
            .filter(|&n: &usize| n >= 1)
            .map(SpectrumMode::Discrete)
            .ok_or_else(|| EamError::Parse(format!("unknown spectrum mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    Boundary0,
    Boundary4,
    Interior,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::Boundary0 => "boundary0",
            CaseLabel::Boundary4 => "boundary4",
            CaseLabel::Interior => "interior",
        })
    }
}

/// Minimum eigenvalue of one model and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict<T> {
    pub model: ModelKind,
    pub mode: SpectrumMode,
    pub lambda_min: T,
    pub argmin_s: T,
    #[serde(rename = "case")]
    pub case_label: CaseLabel,
    pub stable: bool,
}

impl<T: Scalar> StabilityVerdict<T> {
    fn new(model: ModelKind, mode: SpectrumMode, lambda_min: T, argmin_s: T, case_label: CaseLabel) -> Self {
        Self { model, mode, lambda_min, argmin_s, case_label, stable: lambda_min > T::zero() }
    }
}

fn discrete_argmin<T: Scalar>(n: usize, f: impl Fn(T) -> T) -> (T, T, CaseLabel) {
    let modes = fourier_modes::<T>(n.max(1)).expect("n >= 1");
    let (mut best_k, mut best) = (0, f(modes[0]));
    for (k, &s) in modes.iter().enumerate().skip(1) {
        let v = f(s);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let label = if best_k + 1 == modes.len() {
        CaseLabel::Boundary4
    } else if best_k == 0 {
        CaseLabel::Boundary0
    } else {
        CaseLabel::Interior
    };
    (best, modes[best_k], label)
}

/// Minimum eigenvalue of `model` at the strain the coefficients were built for.
///
/// In continuous mode the atomistic value follows the case table: `B >= 0`
/// gives `lambda(0)`; otherwise the smaller of `lambda(4)` and the interior
/// local minimum `lambda(s*)` when `s*` lies in `(0, 4)`. In discrete mode
/// the cubic is minimized exactly over the `N` chain symbols.
pub fn min_eigenvalue<T: Scalar>(
    c: &StabilityCoefficients<T>,
    model: ModelKind,
    mode: SpectrumMode,
) -> StabilityVerdict<T> {
    let four = T::lit(4.0);
    match (model, mode) {
        (ModelKind::Atomistic, SpectrumMode::Continuous) => {
            if c.b_sign() != Sign::Negative {
                return StabilityVerdict::new(model, mode, cubic(c, T::zero()), T::zero(), CaseLabel::Boundary0);
            }
            let at4 = cubic(c, four);
            match s_star(c).filter(|&s| s > T::zero() && s < four) {
                Some(s) if cubic(c, s) < at4 => StabilityVerdict::new(model, mode, cubic(c, s), s, CaseLabel::Interior),
                _ => StabilityVerdict::new(model, mode, at4, four, CaseLabel::Boundary4),
            }
        }
        (ModelKind::Atomistic, SpectrumMode::Discrete(n)) => {
            let (v, s, label) = discrete_argmin(n, |s| cubic(c, s));
            StabilityVerdict::new(model, mode, v, s, label)
        }
        (ModelKind::VolumeLocal, SpectrumMode::Continuous) => {
            StabilityVerdict::new(model, mode, c.a, T::zero(), CaseLabel::Boundary0)
        }
        (ModelKind::VolumeLocal, SpectrumMode::Discrete(n)) => {
            let s1 = fourier_modes::<T>(n.max(1)).expect("n >= 1")[0];
            StabilityVerdict::new(model, mode, c.a, s1, CaseLabel::Boundary0)
        }
        (ModelKind::ReconstructionLocal, SpectrumMode::Continuous) => {
            if c.b_tilde <= T::zero() {
                StabilityVerdict::new(model, mode, c.a + four * c.b_tilde, four, CaseLabel::Boundary4)
            } else {
                StabilityVerdict::new(model, mode, c.a, T::zero(), CaseLabel::Boundary0)
            }
        }
        (ModelKind::ReconstructionLocal, SpectrumMode::Discrete(n)) => {
            let (v, s, label) = discrete_argmin(n, |s| c.a + c.b_tilde * s);
            StabilityVerdict::new(model, mode, v, s, label)
        }
    }
}

/// Which model has the smaller minimum eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingVerdict {
    AtomisticSmaller,
    Equal,
    AtomisticLarger,
}

impl fmt::Display for OrderingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderingVerdict::AtomisticSmaller => "atomistic_smaller",
            OrderingVerdict::Equal => "equal",
            OrderingVerdict::AtomisticLarger => "atomistic_larger",
        })
    }
}

/// Atomistic vs volume-local: equal minima when `B >= 0`, atomistic strictly smaller otherwise.
pub fn compare_volume<T: Scalar>(c: &StabilityCoefficients<T>) -> OrderingVerdict {
    match c.b_sign() {
        Sign::Negative => OrderingVerdict::AtomisticSmaller,
        Sign::Zero | Sign::Positive => OrderingVerdict::Equal,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconComparison<T> {
    pub verdict: OrderingVerdict,
    pub kappa: T,
    /// False when the sign conditions the ordering relies on fail at this strain.
    pub reliable: bool,
}

/// Atomistic vs reconstruction-local, decided by the sign of [`StabilityCoefficients::kappa`].
pub fn compare_recon<T: Scalar>(c: &StabilityCoefficients<T>) -> ReconComparison<T> {
    let verdict = match c.kappa_sign() {
        Sign::Positive => OrderingVerdict::AtomisticSmaller,
        Sign::Zero => OrderingVerdict::Equal,
        Sign::Negative => OrderingVerdict::AtomisticLarger,
    };
    ReconComparison { verdict, kappa: c.kappa(), reliable: c.assumption_signs().all_hold }
}

/// Outcome of testing whether the volume-local model overestimates stability at `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport<T> {
    #[serde(rename = "F")]
    pub strain: T,
    #[serde(rename = "N")]
    pub n: usize,
    /// Value of the precondition expression; must be positive.
    pub precondition_value: T,
    pub precondition_holds: bool,
    /// `phi''(F) + 2 G' rho''(F)`, the atomistic eigenvalue at `s = 4`.
    pub predicted: T,
    /// Hessian Rayleigh quotient at the alternating displacement (unit `||Du||`).
    pub quotient_at_alternating: T,
    /// `A`, the volume-local minimum.
    pub volume_min: T,
    /// Smallest generalized eigenvalue of the dense atomistic Hessian.
    pub atomistic_min: T,
    /// `volume_min - quotient_at_alternating`.
    pub margin: T,
    /// Whether `volume_min > quotient >= atomistic_min` held; false whenever the precondition fails.
    pub inequality_holds: bool,
}

/// Checks `A > phi''(F) + 2 G' rho''(F) >= min atomistic eigenvalue` on a chain with `n` periods,
/// using the dense Hessian for the right-hand quantities.
pub fn counterexample_check<T: Scalar>(p: &PotentialSet<T>, f: T, n: usize) -> Result<CounterexampleReport<T>> {
    let c = coefficients(p, f)?;
    let cfg = ChainConfig::new(n, f)?;
    let precondition_value = c.counterexample_expr();
    let precondition_holds = precondition_value > T::zero();
    let predicted = c.phi2_f + T::lit(2.0) * c.g1 * c.rho2_f;
    let u = mode_displacement::<T>(n, n)?;
    let quotient_at_alternating = crate::spectral::rayleigh_quotient(ModelKind::Atomistic, p, &cfg, u.values())?;
    let atomistic_min = crate::spectral::oracle_min_eigenvalue(ModelKind::Atomistic, p, f, n)?;
    let margin = c.a - quotient_at_alternating;
    let slack = T::lit(1e-9) * (T::one() + c.a.abs());
    let inequality_holds = precondition_holds && margin > T::zero() && quotient_at_alternating >= atomistic_min - slack;
    Ok(CounterexampleReport {
        strain: f,
        n,
        precondition_value,
        precondition_holds,
        predicted,
        quotient_at_alternating,
        volume_min: c.a,
        atomistic_min,
        margin,
        inequality_holds,
    })
}

/// Flat record for JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord<T> {
    pub model: ModelKind,
    #[serde(rename = "F")]
    pub strain: T,
    pub mode: SpectrumMode,
    pub lambda_min: T,
    pub argmin_s: T,
    pub case: CaseLabel,
    pub stable: bool,
    pub coefficients: StabilityCoefficients<T>,
}

impl<T: Scalar> VerdictRecord<T> {
    pub fn new(verdict: &StabilityVerdict<T>, coefficients: &StabilityCoefficients<T>) -> Self {
        Self {
            model: verdict.model,
            strain: coefficients.strain,
            mode: verdict.mode,
            lambda_min: verdict.lambda_min,
            argmin_s: verdict.argmin_s,
            case: verdict.case_label,
            stable: verdict.stable,
            coefficients: *coefficients,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict records serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{make_toy_potentials, Constant, ExpDensity, Morse, ToyFamilyParams};

    fn toy(alpha: f64, beta: f64, c: f64) -> PotentialSet<f64> {
        make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap()
    }

    fn coeffs(a: f64, b: f64, c: f64, d: f64) -> StabilityCoefficients<f64> {
        StabilityCoefficients {
            strain: 1.0,
            a_hat: 0.0,
            a_tilde: a,
            a,
            b,
            b_tilde: 0.0,
            c,
            d,
            g1: 0.0,
            g2: 0.0,
            phi2_f: 0.0,
            phi2_2f: -b,
            rho1_f: 0.0,
            rho1_2f: 0.0,
            rho2_f: 0.0,
            rho2_2f: 0.0,
        }
    }

    #[test]
    fn pair_only_chain_reduces_to_pair_moduli() {
        let p = PotentialSet::new(Morse { alpha: 4.0 }, ExpDensity { beta: 3.0 }, Constant { value: 0.0 });
        let c = coefficients(&p, 1.0).unwrap();
        assert_eq!(c.a_hat, 0.0);
        assert_eq!(c.b, -c.phi2_2f);
        assert_eq!((c.c, c.d, c.b_tilde), (0.0, 0.0, 0.0));
        assert_eq!(compare_volume(&c), OrderingVerdict::Equal);
        for s in [0.0, 1.0, 4.0] {
            assert_eq!(lambda_recon(&c, s).unwrap(), c.a);
        }
    }

    #[test]
    fn endpoint_values() {
        let c = coefficients(&toy(4.0, 3.0, 1.0), 1.0).unwrap();
        assert_eq!(lambda_atomistic(&c, 0.0).unwrap(), c.a);
        let at4 = lambda_atomistic(&c, 4.0).unwrap();
        let expect = c.phi2_f + 2.0 * c.g1 * c.rho2_f;
        assert!((at4 - expect).abs() <= 1e-12 * (1.0 + c.a.abs()));
        let r4 = lambda_recon(&c, 4.0).unwrap();
        let expect = 2.0 * c.g1 * (c.rho2_f + 4.0 * c.rho2_2f) + c.phi2_f + 4.0 * c.phi2_2f;
        assert!((r4 - expect).abs() <= 1e-12 * (1.0 + c.a.abs()));
        assert_eq!(lambda_recon(&c, 0.0).unwrap(), lambda_volume(&c));
        assert!(lambda_atomistic(&c, 4.0 + 1e-9).is_err());
        assert!(lambda_recon(&c, -1e-9).is_err());
    }

    #[test]
    fn toy_family_condition_and_recon_slope() {
        for f in [0.9, 1.0, 1.1] {
            let c = coefficients(&toy(4.0, 3.0, 1.0), f).unwrap();
            assert!(c.assumption_signs().all_hold);
            assert!(c.condition1_holds());
            assert!(c.c > 0.0 && c.d < 0.0);
            assert!(c.b_tilde <= 0.0);
            assert!(c.b_identity_residual().abs() <= 1e-12 * c.b_scale());
        }
    }

    #[test]
    fn s_star_properties() {
        let c = coeffs(1.0, 0.0, 2.0, -0.5);
        assert_eq!(s_star(&c), Some(0.0));
        let c = coeffs(1.0, -1.5, 2.0, -0.25);
        let s = s_star(&c).unwrap();
        assert!((c.b + 2.0 * c.c * s + 3.0 * c.d * s * s).abs() <= 1e-12);
        assert!(2.0 * c.c + 6.0 * c.d * s >= 0.0);
        assert_eq!(s_star(&coeffs(1.0, -1.0, 0.0, 0.0)), None);
        assert_eq!(s_star(&coeffs(1.0, -1.0, -1.0, 0.0)), None);
    }

    #[test]
    fn case_table_labels() {
        let up = coeffs(1.0, 0.5, 1.0, -0.1);
        let v = min_eigenvalue(&up, ModelKind::Atomistic, SpectrumMode::Continuous);
        assert_eq!((v.lambda_min, v.argmin_s, v.case_label), (1.0, 0.0, CaseLabel::Boundary0));

        // Shallow dip with a deep interior minimum.
        let dip = coeffs(1.0, -1.5, 2.0, -0.25);
        let v = min_eigenvalue(&dip, ModelKind::Atomistic, SpectrumMode::Continuous);
        assert_eq!(v.case_label, CaseLabel::Interior);
        assert!(v.lambda_min < cubic(&dip, 4.0));

        // Monotone decreasing: no local minimum in range.
        let down = coeffs(1.0, -1.0, 0.0, -0.1);
        let v = min_eigenvalue(&down, ModelKind::Atomistic, SpectrumMode::Continuous);
        assert_eq!((v.argmin_s, v.case_label), (4.0, CaseLabel::Boundary4));
        assert!(!v.stable);
    }

    #[test]
    fn discrete_mode_uses_chain_symbols() {
        let up = coeffs(1.0, 0.5, 1.0, -0.1);
        let v = min_eigenvalue(&up, ModelKind::Atomistic, SpectrumMode::Discrete(16));
        let s1 = fourier_modes::<f64>(16).unwrap()[0];
        assert_eq!(v.argmin_s, s1);
        assert_eq!(v.case_label, CaseLabel::Boundary0);
        assert!(v.lambda_min > 1.0);

        // Interior dip near s = 0.5 is invisible to a two-period chain (symbols {2, 4}).
        let dip = coeffs(1.0, -0.4, 0.4, -0.06);
        let cont = min_eigenvalue(&dip, ModelKind::Atomistic, SpectrumMode::Continuous);
        assert_eq!(cont.case_label, CaseLabel::Interior);
        let small = min_eigenvalue(&dip, ModelKind::Atomistic, SpectrumMode::Discrete(2));
        assert!((small.argmin_s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn first_mode_expansion_matches_cubic() {
        let p = toy(4.0, 3.0, 1.0);
        for f in [0.95, 1.0, 1.1] {
            let c = coefficients(&p, f).unwrap();
            for n in [2, 8, 64] {
                let s1 = fourier_modes::<f64>(n).unwrap()[0];
                let direct = lambda_atomistic(&c, s1).unwrap();
                assert!((c.lambda_s1_expansion(n).unwrap() - direct).abs() <= 1e-12 * (1.0 + c.a.abs()));
            }
        }
    }

    #[test]
    fn recon_verdict_is_at_top_symbol() {
        let c = coefficients(&toy(4.0, 3.0, 1.0), 1.0).unwrap();
        for mode in [SpectrumMode::Continuous, SpectrumMode::Discrete(8)] {
            let v = min_eigenvalue(&c, ModelKind::ReconstructionLocal, mode);
            assert_eq!((v.argmin_s, v.case_label), (4.0, CaseLabel::Boundary4));
            assert_eq!(v.lambda_min, c.a + 4.0 * c.b_tilde);
        }
    }

    #[test]
    fn default_toy_recon_ordering() {
        let c = coefficients(&toy(4.0, 3.0, 1.0), 1.0).unwrap();
        let cmp = compare_recon(&c);
        assert!(cmp.kappa < 0.0);
        assert_eq!(cmp.verdict, OrderingVerdict::AtomisticLarger);
        assert!(cmp.reliable);
    }

    #[test]
    fn pair_only_counterexample_precondition_fails() {
        let p = PotentialSet::new(Morse { alpha: 4.0 }, ExpDensity { beta: 3.0 }, Constant { value: 0.0 });
        let report = counterexample_check(&p, 1.0, 8).unwrap();
        assert!(!report.precondition_holds);
        assert!(!report.inequality_holds);
    }

    #[test]
    fn spectrum_mode_parsing() {
        assert_eq!("continuous".parse::<SpectrumMode>().unwrap(), SpectrumMode::Continuous);
        assert_eq!("Discrete(64)".parse::<SpectrumMode>().unwrap(), SpectrumMode::Discrete(64));
        assert!("discrete(0)".parse::<SpectrumMode>().is_err());
        assert_eq!(SpectrumMode::Discrete(3).to_string(), "discrete(3)");
    }

    #[test]
    fn verdict_json_has_expected_keys() {
        let c = coefficients(&toy(4.0, 3.0, 1.0), 1.0).unwrap();
        let v = min_eigenvalue(&c, ModelKind::Atomistic, SpectrumMode::Discrete(16));
        let json: serde_json::Value = serde_json::from_str(&VerdictRecord::new(&v, &c).to_json()).unwrap();
        for key in ["model", "F", "lambda_min", "argmin_s", "case", "stable", "coefficients"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["coefficients"]["A"].as_f64().unwrap(), c.a);
        let back: VerdictRecord<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back, VerdictRecord::new(&v, &c));
    }
}

//! Total energies of the atomistic chain and its two local approximations,
//! with analytic gradients, Hessians, and a Newton equilibrium solver.
//!
//! Every model is written per atom as embedding groups plus pair bonds, where
//! a bond argument is a fixed linear combination of nearby strains
//! `r_j = (y_j - y_{j-1}) / epsilon`. Derivatives are taken in strain space and
//! pulled back to positions through the difference operator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{EamError, Result};
use crate::lattice::{ChainConfig, Displacement};
use crate::linalg::{cholesky, solve_lower, solve_lower_transpose, Matrix, MeanZeroBasis};
use crate::potentials::PotentialSet;
use crate::scalar::{pairwise_sum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Atomistic,
    VolumeLocal,
    ReconstructionLocal,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Atomistic, ModelKind::VolumeLocal, ModelKind::ReconstructionLocal];

    /// Short name used in CLI flags and report columns.
    pub fn short_name(self) -> &'static str {
        match self {
            ModelKind::Atomistic => "atomistic",
            ModelKind::VolumeLocal => "volume",
            ModelKind::ReconstructionLocal => "recon",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ModelKind {
    type Err = EamError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "atomistic" | "atom" | "a" => Ok(ModelKind::Atomistic),
            "volume" | "volume_local" | "cv" => Ok(ModelKind::VolumeLocal),
            "recon" | "reconstruction" | "reconstruction_local" | "cr" => Ok(ModelKind::ReconstructionLocal),
            _ => Err(EamError::Parse(format!("unknown model `{s}` (expected atomistic, volume, recon)"))),
        }
    }
}

/// Configuration-independent external forces, one per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeadLoads<T> {
    f: Vec<T>,
}

impl<T: Scalar> DeadLoads<T> {
    pub fn new(f: Vec<T>, cfg: &ChainConfig<T>) -> Result<Self> {
        if f.len() != cfg.atoms() {
            return Err(EamError::LengthMismatch { expected: cfg.atoms(), found: f.len() });
        }
        Ok(Self { f })
    }

    pub fn zeros(cfg: &ChainConfig<T>) -> Self {
        Self { f: vec![T::zero(); cfg.atoms()] }
    }

    /// `f_l = amplitude * sin(k pi l / N)`.
    pub fn sinusoidal(cfg: &ChainConfig<T>, amplitude: T, k: usize) -> Self {
        let w = T::from_count(k) * T::PI() / T::from_count(cfg.n());
        Self { f: (0..cfg.atoms()).map(|i| amplitude * (w * T::lit(cfg.label(i) as f64)).sin()).collect() }
    }

    pub fn values(&self) -> &[T] {
        &self.f
    }

    pub fn is_zero(&self) -> bool {
        self.f.iter().all(|x| x.is_zero())
    }
}

/// Atom positions `y = y_F + u` of a periodic chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Deformation<T> {
    cfg: ChainConfig<T>,
    y: Vec<T>,
}

impl<T: Scalar> Deformation<T> {
    pub fn uniform(cfg: &ChainConfig<T>) -> Self {
        Self { cfg: *cfg, y: cfg.uniform_positions() }
    }

    pub fn from_displacement(cfg: &ChainConfig<T>, u: &Displacement<T>) -> Result<Self> {
        if u.values().len() != cfg.atoms() {
            return Err(EamError::LengthMismatch { expected: cfg.atoms(), found: u.values().len() });
        }
        let y = cfg.uniform_positions().iter().zip(u.values()).map(|(&a, &b)| a + b).collect();
        Ok(Self { cfg: *cfg, y })
    }

    /// Validates length and that `y - y_F` is mean-zero.
    pub fn new(y: Vec<T>, cfg: &ChainConfig<T>) -> Result<Self> {
        if y.len() != cfg.atoms() {
            return Err(EamError::LengthMismatch { expected: cfg.atoms(), found: y.len() });
        }
        let yf = cfg.uniform_positions();
        let u: Vec<T> = y.iter().zip(&yf).map(|(&a, &b)| a - b).collect();
        let scale = u.iter().chain(&yf).fold(T::zero(), |m, &x| m.max(x.abs()));
        let tolerance = T::lit(1e-12).max(T::lit(4096.0) * T::epsilon()) * scale;
        let sum = pairwise_sum(&u);
        if !(sum.abs() <= tolerance) {
            let mean = sum / T::from_count(u.len());
            return Err(EamError::NotMeanZero { mean: mean.as_f64(), tolerance: tolerance.as_f64() });
        }
        Ok(Self { cfg: *cfg, y })
    }

    /// Rigid shift `y + c`. The result leaves the mean-zero class unless
    /// `c = 0`; energies and gradients remain well defined on it.
    pub fn translated(&self, c: T) -> Self {
        Self { cfg: self.cfg, y: self.y.iter().map(|&v| v + c).collect() }
    }

    pub fn config(&self) -> &ChainConfig<T> {
        &self.cfg
    }

    pub fn positions(&self) -> &[T] {
        &self.y
    }

    pub fn into_positions(self) -> Vec<T> {
        self.y
    }

    /// Deviation `u = y - y_F`.
    pub fn displacement(&self) -> Vec<T> {
        self.y.iter().zip(self.cfg.uniform_positions()).map(|(&a, b)| a - b).collect()
    }

    /// Strains `r_i = (y_i - y_{i-1}) / epsilon`, wrapping with the period `2F`.
    pub fn strains(&self) -> Vec<T> {
        let len = self.y.len();
        let inv = T::one() / self.cfg.epsilon();
        let period = T::lit(2.0) * self.cfg.strain();
        (0..len)
            .map(|i| {
                let prev = if i == 0 { self.y[len - 1] - period } else { self.y[i - 1] };
                (self.y[i] - prev) * inv
            })
            .collect()
    }

    fn with_positions(&self, y: Vec<T>) -> Self {
        Self { cfg: self.cfg, y }
    }
}

/// `(weight, [(strain offset, multiplier)])`: contributes `weight * f(sum mult * r_{i+offset})`.
type Bond = (f64, &'static [(isize, f64)]);

const ATOMISTIC_BONDS: [Bond; 4] =
    [(1.0, &[(0, 1.0)]), (1.0, &[(0, 1.0), (-1, 1.0)]), (1.0, &[(1, 1.0)]), (1.0, &[(1, 1.0), (2, 1.0)])];
const LOCAL_BONDS: [Bond; 4] = [(1.0, &[(0, 1.0)]), (1.0, &[(0, 2.0)]), (1.0, &[(1, 1.0)]), (1.0, &[(1, 2.0)])];
const VOLUME_LEFT: [Bond; 2] = [(2.0, &[(0, 1.0)]), (2.0, &[(0, 2.0)])];
const VOLUME_RIGHT: [Bond; 2] = [(2.0, &[(1, 1.0)]), (2.0, &[(1, 2.0)])];

/// `(weight, bonds)`: contributes `weight * G(sum over bonds)`.
type Group = (f64, &'static [Bond]);

fn embedding_groups(model: ModelKind) -> &'static [Group] {
    const ATOMISTIC: [Group; 1] = [(1.0, &ATOMISTIC_BONDS)];
    const VOLUME: [Group; 2] = [(0.5, &VOLUME_LEFT), (0.5, &VOLUME_RIGHT)];
    const RECON: [Group; 1] = [(1.0, &LOCAL_BONDS)];
    match model {
        ModelKind::Atomistic => &ATOMISTIC,
        ModelKind::VolumeLocal => &VOLUME,
        ModelKind::ReconstructionLocal => &RECON,
    }
}

/// Pair bonds of one atom; each carries the factor 1/2.
fn pair_bonds(model: ModelKind) -> &'static [Bond] {
    match model {
        ModelKind::Atomistic => &ATOMISTIC_BONDS,
        ModelKind::VolumeLocal | ModelKind::ReconstructionLocal => &LOCAL_BONDS,
    }
}

fn wrap(i: usize, offset: isize, len: usize) -> usize {
    (i as isize + offset).rem_euclid(len as isize) as usize
}

fn bond_arg<T: Scalar>(r: &[T], i: usize, bond: &Bond) -> T {
    bond.1.iter().fold(T::zero(), |acc, &(off, m)| acc + T::lit(m) * r[wrap(i, off, r.len())])
}

/// `(weight, rho', rho'', bond)` for one bond of a group.
type BondPart<T> = (T, T, T, &'static Bond);

/// Density of one embedding group and its bond values.
fn group_density<T: Scalar>(
    p: &PotentialSet<T>,
    r: &[T],
    i: usize,
    bonds: &'static [Bond],
) -> Result<(T, Vec<BondPart<T>>)> {
    let mut rho_bar = T::zero();
    let mut parts = Vec::with_capacity(bonds.len());
    for bond in bonds {
        let (v, d1, d2) = p.rho_at(bond_arg(r, i, bond))?;
        let w = T::lit(bond.0);
        rho_bar += w * v;
        parts.push((w, d1, d2, bond));
    }
    Ok((rho_bar, parts))
}

fn atom_energy<T: Scalar>(model: ModelKind, p: &PotentialSet<T>, r: &[T], i: usize) -> Result<T> {
    let mut e = T::zero();
    for &(gw, bonds) in embedding_groups(model) {
        let (rho_bar, _) = group_density(p, r, i, bonds)?;
        e += T::lit(gw) * p.embed_at(rho_bar)?.0;
    }
    Ok(e + pair_energy_at(model, p, r, i)?)
}

fn pair_energy_at<T: Scalar>(model: ModelKind, p: &PotentialSet<T>, r: &[T], i: usize) -> Result<T> {
    let mut e = T::zero();
    for bond in pair_bonds(model) {
        e += p.phi_at(bond_arg(r, i, bond))?.0;
    }
    Ok(T::lit(0.5) * e)
}

fn check_loads<T: Scalar>(y: &Deformation<T>, loads: &DeadLoads<T>) -> Result<()> {
    if loads.values().len() != y.positions().len() {
        return Err(EamError::LengthMismatch { expected: y.positions().len(), found: loads.values().len() });
    }
    Ok(())
}

/// Total electron density at the atom with signed label `label` (reduced periodically).
/// For the volume model this is the atom's own `2 rho(r_l) + 2 rho(2 r_l)`.
pub fn electron_density<T: Scalar>(
    model: ModelKind,
    y: &Deformation<T>,
    p: &PotentialSet<T>,
    label: isize,
) -> Result<T> {
    let r = y.strains();
    let i = y.config().slot(label);
    Ok(group_density(p, &r, i, embedding_groups(model)[0].1)?.0)
}

/// Internal energy minus dead-load work, summed over one period.
pub fn energy<T: Scalar>(model: ModelKind, y: &Deformation<T>, p: &PotentialSet<T>, loads: &DeadLoads<T>) -> Result<T> {
    check_loads(y, loads)?;
    let eps = y.config().epsilon();
    let r = y.strains();
    let per_atom = (0..r.len()).map(|i| atom_energy(model, p, &r, i)).collect::<Result<Vec<T>>>()?;
    let work: Vec<T> = loads.values().iter().zip(y.positions()).map(|(&f, &yy)| f * yy).collect();
    Ok(eps * pairwise_sum(&per_atom) - eps * pairwise_sum(&work))
}

/// Pair-potential part of the internal energy.
pub fn pair_energy<T: Scalar>(model: ModelKind, y: &Deformation<T>, p: &PotentialSet<T>) -> Result<T> {
    let r = y.strains();
    let per_atom = (0..r.len()).map(|i| pair_energy_at(model, p, &r, i)).collect::<Result<Vec<T>>>()?;
    Ok(y.config().epsilon() * pairwise_sum(&per_atom))
}

/// `dE/dr_j` of the per-atom energy sum (without the `epsilon` prefactor).
fn strain_gradient<T: Scalar>(model: ModelKind, p: &PotentialSet<T>, r: &[T]) -> Result<Vec<T>> {
    let len = r.len();
    let mut s = vec![T::zero(); len];
    let half = T::lit(0.5);
    for i in 0..len {
        for &(gw, bonds) in embedding_groups(model) {
            let (rho_bar, parts) = group_density(p, r, i, bonds)?;
            let g1 = T::lit(gw) * p.embed_at(rho_bar)?.1;
            for (w, d1, _, bond) in parts {
                for &(off, m) in bond.1 {
                    s[wrap(i, off, len)] += g1 * w * d1 * T::lit(m);
                }
            }
        }
        for bond in pair_bonds(model) {
            let d1 = p.phi_at(bond_arg(r, i, bond))?.1;
            for &(off, m) in bond.1 {
                s[wrap(i, off, len)] += half * d1 * T::lit(m);
            }
        }
    }
    Ok(s)
}

/// `dE_tot/dy_l`, including the dead-load term `-epsilon f_l`.
pub fn gradient<T: Scalar>(
    model: ModelKind,
    y: &Deformation<T>,
    p: &PotentialSet<T>,
    loads: &DeadLoads<T>,
) -> Result<Vec<T>> {
    check_loads(y, loads)?;
    let eps = y.config().epsilon();
    let s = strain_gradient(model, p, &y.strains())?;
    let len = s.len();
    Ok((0..len).map(|a| s[a] - s[(a + 1) % len] - eps * loads.values()[a]).collect())
}

/// Second derivatives in strain space (without the `epsilon` prefactor).
fn strain_hessian<T: Scalar>(model: ModelKind, p: &PotentialSet<T>, r: &[T]) -> Result<Matrix<T>> {
    let len = r.len();
    let mut k = Matrix::zeros(len, len);
    let half = T::lit(0.5);
    let mut grad: Vec<(usize, T)> = Vec::with_capacity(8);
    for i in 0..len {
        for &(gw, bonds) in embedding_groups(model) {
            let (rho_bar, parts) = group_density(p, r, i, bonds)?;
            let (_, g1, g2) = p.embed_at(rho_bar)?;
            let gw = T::lit(gw);
            grad.clear();
            for (w, d1, d2, bond) in parts {
                for &(oa, ma) in bond.1 {
                    let a = wrap(i, oa, len);
                    grad.push((a, w * d1 * T::lit(ma)));
                    for &(ob, mb) in bond.1 {
                        k[(a, wrap(i, ob, len))] += gw * g1 * w * d2 * T::lit(ma * mb);
                    }
                }
            }
            for &(a, ca) in &grad {
                for &(b, cb) in &grad {
                    k[(a, b)] += gw * g2 * ca * cb;
                }
            }
        }
        for bond in pair_bonds(model) {
            let d2 = p.phi_at(bond_arg(r, i, bond))?.2;
            for &(oa, ma) in bond.1 {
                for &(ob, mb) in bond.1 {
                    k[(wrap(i, oa, len), wrap(i, ob, len))] += half * d2 * T::lit(ma * mb);
                }
            }
        }
    }
    Ok(k)
}

/// Hessian of the internal energy with respect to positions (loads are linear and drop out).
/// Exactly symmetric.
pub fn hessian<T: Scalar>(model: ModelKind, y: &Deformation<T>, p: &PotentialSet<T>) -> Result<Matrix<T>> {
    let eps = y.config().epsilon();
    let k = strain_hessian(model, p, &y.strains())?;
    let len = k.rows();
    let mut h = Matrix::zeros(len, len);
    for a in 0..len {
        let a1 = (a + 1) % len;
        for b in a..len {
            let b1 = (b + 1) % len;
            let v = (k[(a, b)] - k[(a, b1)] - k[(a1, b)] + k[(a1, b1)]) / eps;
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    Ok(h)
}

/// Mean-free part of `v`.
fn project_mean_zero<T: Scalar>(v: &[T]) -> Vec<T> {
    let mean = pairwise_sum(v) / T::from_count(v.len());
    v.iter().map(|&x| x - mean).collect()
}

/// Force residual `|| P (grad / epsilon) ||_{l2_eps}` with `P` the mean-zero projector.
pub fn residual_norm<T: Scalar>(
    model: ModelKind,
    y: &Deformation<T>,
    p: &PotentialSet<T>,
    loads: &DeadLoads<T>,
) -> Result<T> {
    let g = gradient(model, y, p, loads)?;
    residual_of(&g, y.config())
}

fn residual_of<T: Scalar>(g: &[T], cfg: &ChainConfig<T>) -> Result<T> {
    let inv = T::one() / cfg.epsilon();
    let forces: Vec<T> = project_mean_zero(g).into_iter().map(|x| x * inv).collect();
    crate::lattice::norm_l2eps(&forces, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult<T> {
    pub deformation: Deformation<T>,
    pub iterations: usize,
    /// Residual before the first step and after every step.
    pub residuals: Vec<T>,
}

/// Newton iteration on the mean-zero subspace. Converged when [`residual_norm`] `<= tol`.
///
/// A projected Hessian that is not positive definite stops the iteration with
/// `SingularHessian`: only stable equilibria are sought. Steps that leave a
/// potential's domain are halved up to 30 times.
pub fn equilibrium_solve<T: Scalar>(
    model: ModelKind,
    p: &PotentialSet<T>,
    loads: &DeadLoads<T>,
    y0: &Deformation<T>,
    tol: T,
    max_iter: usize,
) -> Result<EquilibriumResult<T>> {
    if !(tol > T::zero()) {
        return Err(EamError::invalid("tol", "must be positive"));
    }
    check_loads(y0, loads)?;
    let cfg = *y0.config();
    let mut y = y0.clone();
    let mut g = gradient(model, &y, p, loads)?;
    let mut residuals = vec![residual_of(&g, &cfg)?];
    if cfg.atoms() < 2 {
        return Ok(EquilibriumResult { deformation: y, iterations: 0, residuals });
    }
    let basis = MeanZeroBasis::new(cfg.atoms());
    for iteration in 0..=max_iter {
        let res = *residuals.last().expect("history is non-empty");
        if res <= tol {
            return Ok(EquilibriumResult { deformation: y, iterations: iteration, residuals });
        }
        if iteration == max_iter {
            break;
        }
        let h = basis.congruence(&hessian(model, &y, p)?);
        let l = cholesky(&h).map_err(|_| EamError::SingularHessian { iteration })?;
        let rhs: Vec<T> = basis.restrict(&g).into_iter().map(|x| -x).collect();
        let step = basis.extend(&solve_lower_transpose(&l, &solve_lower(&l, &rhs)));

        let mut scale = T::one();
        let mut accepted = None;
        for _ in 0..30 {
            let trial = y.with_positions(y.positions().iter().zip(&step).map(|(&a, &d)| a + scale * d).collect());
            match gradient(model, &trial, p, loads) {
                Ok(gt) if gt.iter().all(|x| x.is_finite()) => {
                    accepted = Some((trial, gt));
                    break;
                }
                Ok(_) | Err(EamError::DomainViolation { .. }) => scale *= T::lit(0.5),
                Err(e) => return Err(e),
            }
        }
        let (trial, gt) =
            accepted.ok_or(EamError::NoConvergence { iterations: iteration + 1, residual: res.as_f64() })?;
        y = trial;
        g = gt;
        residuals.push(residual_of(&g, &cfg)?);
    }
    Err(EamError::NoConvergence { iterations: max_iter, residual: residuals.last().map_or(f64::NAN, |r| r.as_f64()) })
}

/// Largest relative discrepancy between [`gradient`] and central differences of
/// [`energy`] along each coordinate, step `1e-6 * max(1, |y|_inf)`.
pub fn fd_gradient_error<T: Scalar>(
    model: ModelKind,
    y: &Deformation<T>,
    p: &PotentialSet<T>,
    loads: &DeadLoads<T>,
) -> Result<T> {
    let g = gradient(model, y, p, loads)?;
    let ymax = y.positions().iter().fold(T::one(), |m, &v| m.max(v.abs()));
    let h = T::lit(1e-6) * ymax;
    let scale = g.iter().fold(T::zero(), |m, &v| m.max(v.abs())).max(T::min_positive_value());
    let mut worst = T::zero();
    for (a, &ga) in g.iter().enumerate() {
        let mut plus = y.positions().to_vec();
        let mut minus = plus.clone();
        plus[a] += h;
        minus[a] -= h;
        let ep = energy(model, &y.with_positions(plus), p, loads)?;
        let em = energy(model, &y.with_positions(minus), p, loads)?;
        let fd = (ep - em) / (T::lit(2.0) * h);
        worst = worst.max((fd - ga).abs() / scale);
    }
    Ok(worst)
}

/// Largest entry of `|H - H_fd|` divided by `max |H|`, where `H_fd` is the
/// central difference of [`gradient`] with step `cbrt(machine eps) * eps`.
pub fn fd_hessian_error<T: Scalar>(model: ModelKind, y: &Deformation<T>, p: &PotentialSet<T>) -> Result<T> {
    let h = hessian(model, y, p)?;
    let loads = DeadLoads::zeros(y.config());
    // Strains move by step/eps, so the step is balanced in strain units.
    let step = T::epsilon().cbrt() * y.config().epsilon();
    let scale = h.max_abs().max(T::min_positive_value());
    let mut worst = T::zero();
    for b in 0..h.cols() {
        let mut plus = y.positions().to_vec();
        let mut minus = plus.clone();
        plus[b] += step;
        minus[b] -= step;
        let gp = gradient(model, &y.with_positions(plus), p, &loads)?;
        let gm = gradient(model, &y.with_positions(minus), p, &loads)?;
        for a in 0..h.rows() {
            let fd = (gp[a] - gm[a]) / (T::lit(2.0) * step);
            worst = worst.max((fd - h[(a, b)]).abs() / scale);
        }
    }
    Ok(worst)
}

/// One value per line in label order, 17 significant digits.
pub fn to_csv<T: Scalar>(values: &[T]) -> String {
    let mut out = String::with_capacity(values.len() * 25);
    for v in values {
        out.push_str(&format!("{:.16e}\n", v.as_f64()));
    }
    out
}

/// Parses one number per line; blank lines and `#` comments are skipped.
pub fn from_csv<T: Scalar>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .filter_map(|(n, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then_some((n, line))
        })
        .map(|(n, line)| line.parse::<f64>().map(T::lit).map_err(|e| EamError::Parse(format!("line {}: {e}", n + 1))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::mode_displacement;
    use crate::potentials::{make_toy_potentials, ToyFamilyParams};

    fn toy() -> PotentialSet<f64> {
        make_toy_potentials(ToyFamilyParams::default()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn model_names_parse() {
        for m in ModelKind::ALL {
            assert_eq!(m.short_name().parse::<ModelKind>().unwrap(), m);
        }
        assert_eq!("Volume-Local".parse::<ModelKind>().unwrap(), ModelKind::VolumeLocal);
        assert!("bogus".parse::<ModelKind>().is_err());
    }

    #[test]
    fn uniform_state_agrees_across_models() {
        let p = toy();
        for f in [0.9f64, 1.0, 1.2] {
            let cfg = ChainConfig::new(5, f).unwrap();
            let y = Deformation::uniform(&cfg);
            let loads = DeadLoads::zeros(&cfg);
            let rho_bar = 2.0 * (-3.0 * f).exp() + 2.0 * (-6.0 * f).exp();
            let phi = |r: f64| p.phi().eval(r);
            let expect = 2.0 * (p.embed().eval(rho_bar) + phi(f) + phi(2.0 * f));
            for m in ModelKind::ALL {
                assert!(close(energy(m, &y, &p, &loads).unwrap(), expect, 1e-14), "{m}");
                assert!(close(electron_density(m, &y, &p, 3).unwrap(), rho_bar, 1e-14));
                let g = gradient(m, &y, &p, &loads).unwrap();
                assert!(g.iter().all(|x| x.abs() <= 1e-12), "{m}: {g:?}");
            }
        }
    }

    #[test]
    fn strains_wrap_with_the_period() {
        let cfg = ChainConfig::new(3, 1.25).unwrap();
        let y = Deformation::uniform(&cfg);
        for r in y.strains() {
            let r: f64 = r;
            assert!((r - 1.25).abs() < 1e-14);
        }
    }

    #[test]
    fn alternating_mode_separates_atomistic_from_volume_density() {
        let p = toy();
        let cfg = ChainConfig::new(4, 1.0).unwrap();
        let u = mode_displacement::<f64>(4, 4).unwrap().scaled(0.5);
        let y = Deformation::from_displacement(&cfg, &u).unwrap();
        let a = electron_density(ModelKind::Atomistic, &y, &p, 0).unwrap();
        let v = electron_density(ModelKind::VolumeLocal, &y, &p, 0).unwrap();
        assert!((a - v).abs() > 1e-3);
    }

    #[test]
    fn local_models_share_pair_energy() {
        let p = toy();
        let cfg = ChainConfig::new(6, 1.05).unwrap();
        let u = crate::lattice::Displacement::projected((0..12).map(|i| 0.01 * ((i * 7 % 5) as f64)).collect(), &cfg)
            .unwrap();
        let y = Deformation::from_displacement(&cfg, &u).unwrap();
        let a = pair_energy(ModelKind::VolumeLocal, &y, &p).unwrap();
        let b = pair_energy(ModelKind::ReconstructionLocal, &y, &p).unwrap();
        assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn hessian_is_symmetric_and_annihilates_constants() {
        let p = toy();
        let cfg = ChainConfig::new(5, 1.0).unwrap();
        let u = mode_displacement::<f64>(2, 5).unwrap().scaled(0.3);
        let y = Deformation::from_displacement(&cfg, &u).unwrap();
        for m in ModelKind::ALL {
            let h = hessian(m, &y, &p).unwrap();
            assert_eq!(h.asymmetry(), 0.0);
            let hc = h.mul_vec(&[1.0; 10]);
            assert!(hc.iter().all(|x| x.abs() <= 1e-10 * h.max_abs()));
        }
    }

    #[test]
    fn finite_difference_consistency_small_chain() {
        let p = toy();
        let cfg = ChainConfig::new(3, 1.02).unwrap();
        let u = crate::lattice::Displacement::projected(vec![0.01, -0.02, 0.015, 0.0, -0.01, 0.02], &cfg).unwrap();
        let y = Deformation::from_displacement(&cfg, &u).unwrap();
        let loads = DeadLoads::sinusoidal(&cfg, 0.3, 1);
        for m in ModelKind::ALL {
            assert!(fd_gradient_error(m, &y, &p, &loads).unwrap() <= 1e-6);
            assert!(fd_hessian_error(m, &y, &p).unwrap() <= 1e-5);
        }
    }

    #[test]
    fn zero_load_uniform_start_needs_no_iterations() {
        let p = toy();
        let cfg = ChainConfig::new(4, 1.0).unwrap();
        let y0 = Deformation::uniform(&cfg);
        let out = equilibrium_solve(ModelKind::Atomistic, &p, &DeadLoads::zeros(&cfg), &y0, 1e-10, 20).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.deformation, y0);
        assert!(out.residuals[0] <= 1e-12);
    }

    #[test]
    fn newton_converges_under_small_load() {
        let p = toy();
        let cfg = ChainConfig::new(8, 1.0).unwrap();
        let loads = DeadLoads::sinusoidal(&cfg, 0.05, 1);
        for m in ModelKind::ALL {
            let out = equilibrium_solve(m, &p, &loads, &Deformation::uniform(&cfg), 1e-10, 30).unwrap();
            assert!(*out.residuals.last().unwrap() <= 1e-10);
            let u = out.deformation.displacement();
            assert!(u.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn unstable_strain_reports_singular_hessian() {
        let p = toy();
        let cfg = ChainConfig::new(8, 1.4).unwrap();
        let loads = DeadLoads::sinusoidal(&cfg, 0.01, 1);
        let err =
            equilibrium_solve(ModelKind::Atomistic, &p, &loads, &Deformation::uniform(&cfg), 1e-10, 30).unwrap_err();
        assert!(matches!(err, EamError::SingularHessian { .. } | EamError::NoConvergence { .. }), "{err}");
    }

    #[test]
    fn csv_round_trip() {
        let v = vec![1.0 / 3.0, -2.5e-17, 7.0];
        assert_eq!(from_csv::<f64>(&to_csv(&v)).unwrap(), v);
        assert!(from_csv::<f64>("1.0\nabc\n").is_err());
        assert_eq!(from_csv::<f64>("# header\n\n2\n").unwrap(), vec![2.0]);
    }

    #[test]
    fn deformation_requires_mean_zero_deviation() {
        let cfg = ChainConfig::new(2, 1.0).unwrap();
        let mut y = cfg.uniform_positions();
        y[0] += 0.1;
        assert!(matches!(Deformation::new(y, &cfg), Err(EamError::NotMeanZero { .. })));
        assert!(Deformation::new(cfg.uniform_positions(), &cfg).is_ok());
    }
}

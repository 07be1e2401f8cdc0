//! Domain types, received-signal quantities and their lifted (trace) forms.
//!
//! Phase convention: the lifted phase vector is `θ̃ = [θ; ρ]` with
//! `θ_m = e^{-jψ_m}`, so that `θ̃^H G_k w = g_D^H w + g_R^H Ψ F w` when `ρ = 1`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{outer, quad_form, trace_product, CMat, CVec, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDims {
    pub n_t: usize,
    pub m: usize,
    pub k_users: usize,
    pub i_users: usize,
}

impl ScenarioDims {
    pub fn new(n_t: usize, m: usize, k_users: usize, i_users: usize) -> Result<Self> {
        if n_t == 0 {
            return Err(Error::InvalidParameter("n_t must be at least 1".into()));
        }
        if k_users == 0 {
            return Err(Error::InvalidParameter("k_users must be at least 1".into()));
        }
        Ok(Self {
            n_t,
            m,
            k_users,
            i_users,
        })
    }
}

/// All propagation coefficients of one scenario.
///
/// `f_mat` is the BS→IRS channel (`m × n_t`). SU/PU vectors follow the
/// convention that the received sample is `g^H w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub f_mat: CMat,
    pub g_d: Vec<CVec>,
    pub g_r: Vec<CVec>,
    pub l_d: Vec<CVec>,
    pub l_r: Vec<CVec>,
    /// Equivalent noise power at each SU, watts.
    pub noise_power: Vec<f64>,
    /// PU receiver noise, watts. Kept for completeness; no constraint uses it.
    pub pu_noise_power: Vec<f64>,
}

impl ChannelSet {
    pub fn new(
        f_mat: CMat,
        g_d: Vec<CVec>,
        g_r: Vec<CVec>,
        l_d: Vec<CVec>,
        l_r: Vec<CVec>,
        noise_power: Vec<f64>,
        pu_noise_power: Vec<f64>,
    ) -> Result<Self> {
        let ch = Self {
            f_mat,
            g_d,
            g_r,
            l_d,
            l_r,
            noise_power,
            pu_noise_power,
        };
        ch.validate()?;
        Ok(ch)
    }

    pub fn dims(&self) -> ScenarioDims {
        ScenarioDims {
            n_t: self.f_mat.ncols(),
            m: self.f_mat.nrows(),
            k_users: self.g_d.len(),
            i_users: self.l_d.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n_t = self.f_mat.ncols();
        let m = self.f_mat.nrows();
        let mismatch = |what: &str| Err(Error::DimensionMismatch(what.to_string()));
        if n_t == 0 {
            return mismatch("BS must have at least one antenna (F has zero columns)");
        }
        if self.g_d.is_empty() {
            return mismatch("at least one SU is required");
        }
        if self.g_r.len() != self.g_d.len() || self.noise_power.len() != self.g_d.len() {
            return mismatch("SU channel lists and noise powers must have equal length");
        }
        if self.l_r.len() != self.l_d.len() {
            return mismatch("PU channel lists must have equal length");
        }
        if self.g_d.iter().chain(&self.l_d).any(|v| v.len() != n_t) {
            return mismatch("direct channels must have n_t entries");
        }
        if self.g_r.iter().chain(&self.l_r).any(|v| v.len() != m) {
            return mismatch("reflected channels must have m entries");
        }
        if let Some(p) = self.noise_power.iter().find(|&&p| !(p > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "SU noise power must be positive, got {p}"
            )));
        }
        Ok(())
    }

    /// The same scenario with the reflecting surface removed (`m = 0`).
    pub fn without_irs(&self) -> ChannelSet {
        let n_t = self.f_mat.ncols();
        ChannelSet {
            f_mat: CMat::zeros(0, n_t),
            g_d: self.g_d.clone(),
            g_r: vec![CVec::zeros(0); self.g_d.len()],
            l_d: self.l_d.clone(),
            l_r: vec![CVec::zeros(0); self.l_d.len()],
            noise_power: self.noise_power.clone(),
            pu_noise_power: self.pu_noise_power.clone(),
        }
    }

    fn check_su(&self, k: usize) -> Result<()> {
        if k >= self.g_d.len() {
            return Err(Error::IndexOutOfRange {
                what: "SU",
                index: k,
                len: self.g_d.len(),
            });
        }
        Ok(())
    }

    fn check_pu(&self, i: usize) -> Result<()> {
        if i >= self.l_d.len() {
            return Err(Error::IndexOutOfRange {
                what: "PU",
                index: i,
                len: self.l_d.len(),
            });
        }
        Ok(())
    }
}

/// IRS phase shifts `ψ_m`, stored wrapped into `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    psi: Vec<f64>,
}

impl PhaseConfig {
    pub fn new(psi: Vec<f64>) -> Self {
        Self {
            psi: psi.into_iter().map(wrap_phase).collect(),
        }
    }

    pub fn zeros(m: usize) -> Self {
        Self { psi: vec![0.0; m] }
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// Diagonal of `Ψ = diag(e^{jψ_1}, …, e^{jψ_M})`.
    pub fn psi_diag(&self) -> CVec {
        CVec::from_iterator(self.psi.len(), self.psi.iter().map(|&p| C64::from_polar(1.0, p)))
    }

    /// `θ̃ = [e^{-jψ_1}, …, e^{-jψ_M}, ρ]`.
    pub fn lifted_vector(&self, rho: C64) -> CVec {
        let m = self.psi.len();
        CVec::from_iterator(
            m + 1,
            self.psi
                .iter()
                .map(|&p| C64::from_polar(1.0, -p))
                .chain(std::iter::once(rho)),
        )
    }
}

pub fn wrap_phase(p: f64) -> f64 {
    let w = p.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    pub w: Vec<CVec>,
}

impl BeamformerSet {
    pub fn new(w: Vec<CVec>) -> Self {
        Self { w }
    }

    pub fn zeros(k_users: usize, n_t: usize) -> Self {
        Self {
            w: vec![CVec::zeros(n_t); k_users],
        }
    }

    pub fn total_power(&self) -> f64 {
        self.w.iter().map(|w| w.norm_squared()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            w: self.w.iter().map(|w| w * C64::new(factor, 0.0)).collect(),
        }
    }

    pub fn lift(&self) -> LiftedBeamSet {
        LiftedBeamSet {
            w_mat: self.w.iter().map(outer).collect(),
        }
    }
}

/// `W_k = w_k w_k^H` or a relaxed Hermitian PSD iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedBeamSet {
    pub w_mat: Vec<CMat>,
}

impl LiftedBeamSet {
    pub fn zeros(k_users: usize, n_t: usize) -> Self {
        Self {
            w_mat: vec![CMat::zeros(n_t, n_t); k_users],
        }
    }

    pub fn total_power(&self) -> f64 {
        self.w_mat.iter().map(|w| w.trace().re).sum()
    }
}

/// `Θ`, the lifted `(m+1) × (m+1)` phase matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPhase {
    pub theta_mat: CMat,
}

impl LiftedPhase {
    pub fn from_phases(phases: &PhaseConfig, rho: C64) -> Self {
        Self {
            theta_mat: outer(&phases.lifted_vector(rho)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetConfig {
    /// Maximum BS transmit power, watts.
    pub p_max: f64,
    /// Interference tolerance per PU, watts.
    pub p_tol: Vec<f64>,
}

impl BudgetConfig {
    pub fn new(p_max: f64, p_tol: Vec<f64>) -> Result<Self> {
        let b = Self { p_max, p_tol };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_max > 0.0) || !self.p_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "p_max must be positive and finite, got {}",
                self.p_max
            )));
        }
        if let Some(p) = self.p_tol.iter().find(|&&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "p_tol must be nonnegative, got {p}"
            )));
        }
        Ok(())
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

fn check_phases(ch: &ChannelSet, phases: &PhaseConfig) -> Result<()> {
    if phases.len() != ch.f_mat.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} phases for an IRS with {} elements",
            phases.len(),
            ch.f_mat.nrows()
        )));
    }
    Ok(())
}

/// `d + F^H Ψ^H r`
fn effective(ch: &ChannelSet, phases: &PhaseConfig, direct: &CVec, reflected: &CVec) -> CVec {
    if reflected.is_empty() {
        return direct.clone();
    }
    let psi_h_r = phases.psi_diag().map(|z| z.conj()).component_mul(reflected);
    direct + ch.f_mat.adjoint() * psi_h_r
}

/// `g̃_k = g_{D,k} + F^H Ψ^H g_{R,k}`
pub fn effective_su_channel(ch: &ChannelSet, phases: &PhaseConfig, k: usize) -> Result<CVec> {
    ch.check_su(k)?;
    check_phases(ch, phases)?;
    Ok(effective(ch, phases, &ch.g_d[k], &ch.g_r[k]))
}

/// `l̃_i = l_{D,i} + F^H Ψ^H l_{R,i}`
pub fn effective_pu_channel(ch: &ChannelSet, phases: &PhaseConfig, i: usize) -> Result<CVec> {
    ch.check_pu(i)?;
    check_phases(ch, phases)?;
    Ok(effective(ch, phases, &ch.l_d[i], &ch.l_r[i]))
}

pub fn effective_su_channels(ch: &ChannelSet, phases: &PhaseConfig) -> Result<Vec<CVec>> {
    (0..ch.g_d.len())
        .map(|k| effective_su_channel(ch, phases, k))
        .collect()
}

pub fn effective_pu_channels(ch: &ChannelSet, phases: &PhaseConfig) -> Result<Vec<CVec>> {
    (0..ch.l_d.len())
        .map(|i| effective_pu_channel(ch, phases, i))
        .collect()
}

fn check_beams(ch: &ChannelSet, beams: &BeamformerSet) -> Result<()> {
    let n_t = ch.f_mat.ncols();
    if beams.w.len() != ch.g_d.len() || beams.w.iter().any(|w| w.len() != n_t) {
        return Err(Error::DimensionMismatch(format!(
            "expected {} beamformers of length {n_t}",
            ch.g_d.len()
        )));
    }
    Ok(())
}

/// SINR of SU `k` computed from the effective channel.
pub fn sinr_from_effective(g_eff: &CVec, beams: &BeamformerSet, k: usize, noise: f64) -> Result<f64> {
    if !(noise > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be positive, got {noise}"
        )));
    }
    let mut interference = 0.0;
    let mut signal = 0.0;
    for (r, w) in beams.w.iter().enumerate() {
        let p = g_eff.dotc(w).norm_sqr();
        if r == k {
            signal = p;
        } else {
            interference += p;
        }
    }
    Ok(signal / (interference + noise))
}

/// `Γ_k = |g̃_k^H w_k|² / (Σ_{r≠k} |g̃_k^H w_r|² + σ²_k)`
pub fn sinr(ch: &ChannelSet, phases: &PhaseConfig, beams: &BeamformerSet, k: usize) -> Result<f64> {
    check_beams(ch, beams)?;
    let g = effective_su_channel(ch, phases, k)?;
    sinr_from_effective(&g, beams, k, ch.noise_power[k])
}

/// `Σ_k log₂(1 + Γ_k)` in bits/s/Hz.
pub fn sum_rate(ch: &ChannelSet, phases: &PhaseConfig, beams: &BeamformerSet) -> Result<f64> {
    (0..ch.g_d.len())
        .map(|k| sinr(ch, phases, beams, k).map(|s| (1.0 + s).log2()))
        .sum()
}

/// Interference power received by PU `i`: `Σ_k |l̃_i^H w_k|²`.
pub fn leakage(ch: &ChannelSet, phases: &PhaseConfig, beams: &BeamformerSet, i: usize) -> Result<f64> {
    check_beams(ch, beams)?;
    let l = effective_pu_channel(ch, phases, i)?;
    Ok(beams.w.iter().map(|w| l.dotc(w).norm_sqr()).sum())
}

/// Stacks `diag(r^H) F` over `d^H` into an `(m+1) × n_t` matrix.
fn lift(f_mat: &CMat, direct: &CVec, reflected: &CVec) -> CMat {
    let m = f_mat.nrows();
    let n_t = f_mat.ncols();
    let mut out = CMat::zeros(m + 1, n_t);
    for row in 0..m {
        let scale = reflected[row].conj();
        for col in 0..n_t {
            out[(row, col)] = scale * f_mat[(row, col)];
        }
    }
    for col in 0..n_t {
        out[(m, col)] = direct[col].conj();
    }
    out
}

/// `G_k = [(diag(g_{R,k}^H) F)^T  g_{D,k}^*]^T`
pub fn lift_su_channel(ch: &ChannelSet, k: usize) -> Result<CMat> {
    ch.check_su(k)?;
    ch.validate()?;
    Ok(lift(&ch.f_mat, &ch.g_d[k], &ch.g_r[k]))
}

/// `L_i = [(diag(l_{R,i}^H) F)^T  l_{D,i}^*]^T`
pub fn lift_pu_channel(ch: &ChannelSet, i: usize) -> Result<CMat> {
    ch.check_pu(i)?;
    ch.validate()?;
    Ok(lift(&ch.f_mat, &ch.l_d[i], &ch.l_r[i]))
}

/// SINR of SU `k` in `W`-trace form: `Tr(g̃ g̃^H W_k) / (Σ_{r≠k} Tr(g̃ g̃^H W_r) + σ²)`.
pub fn sinr_trace_w(lifted: &LiftedBeamSet, g_eff: &CVec, noise: f64, k: usize) -> Result<f64> {
    if !(noise > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be positive, got {noise}"
        )));
    }
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (r, w) in lifted.w_mat.iter().enumerate() {
        let t = quad_form(w, g_eff);
        if r == k {
            signal = t;
        } else {
            interference += t;
        }
    }
    Ok(signal / (interference + noise))
}

/// SINR of SU `k` in `Θ`-trace form: `Tr(Θ G_k W_k G_k^H) / (Σ_{r≠k} Tr(Θ G_k W_r G_k^H) + σ²)`.
pub fn sinr_trace_theta(
    theta_mat: &CMat,
    g_lift: &CMat,
    lifted: &LiftedBeamSet,
    noise: f64,
    k: usize,
) -> Result<f64> {
    if !(noise > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be positive, got {noise}"
        )));
    }
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (r, w) in lifted.w_mat.iter().enumerate() {
        let t = trace_product(theta_mat, &(g_lift * w * g_lift.adjoint()));
        if r == k {
            signal = t;
        } else {
            interference += t;
        }
    }
    Ok(signal / (interference + noise))
}

/// Positive scale factors mapping a scenario onto unit SU noise, unit power
/// budget and `O(1)` PU constraints.
///
/// Beamformers are measured in units of `√p_max`; SU `k` channels are
/// multiplied by `√p_max / σ_k`; PU `i` channels by `√(p_max / s_i)` where
/// `s_i` is the PU's tolerance (or a channel-derived reference when the
/// tolerance is zero). SINRs are unchanged and each leakage constraint is
/// divided by `s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    pub power_unit: f64,
    pub su_gain: Vec<f64>,
    pub pu_gain: Vec<f64>,
    /// `p_tol_i / s_i`, the PU right-hand sides after scaling.
    pub p_tol: Vec<f64>,
}

impl Scaling {
    pub fn new(ch: &ChannelSet, budgets: &BudgetConfig) -> Result<Self> {
        budgets.validate()?;
        ch.validate()?;
        if budgets.p_tol.len() != ch.l_d.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} tolerances for {} PUs",
                budgets.p_tol.len(),
                ch.l_d.len()
            )));
        }
        let p = budgets.p_max;
        let su_gain = ch.noise_power.iter().map(|&s| (p / s).sqrt()).collect();
        let mut pu_gain = Vec::with_capacity(ch.l_d.len());
        let mut p_tol = Vec::with_capacity(ch.l_d.len());
        for (i, &tol) in budgets.p_tol.iter().enumerate() {
            let reference = if tol > 0.0 {
                tol
            } else {
                let strength = ch.l_d[i].norm_squared()
                    + ch.l_r[i].norm_squared() * ch.f_mat.norm_squared();
                if strength > 0.0 {
                    p * strength
                } else {
                    1.0
                }
            };
            pu_gain.push((p / reference).sqrt());
            p_tol.push(tol / reference);
        }
        Ok(Self {
            power_unit: p,
            su_gain,
            pu_gain,
            p_tol,
        })
    }

    pub fn beams_to_scaled(&self, beams: &BeamformerSet) -> BeamformerSet {
        beams.scaled(1.0 / self.power_unit.sqrt())
    }

    pub fn beams_to_physical(&self, beams: &BeamformerSet) -> BeamformerSet {
        beams.scaled(self.power_unit.sqrt())
    }
}

/// Largest constraint violation of `(phases, beams)` in scaled units: the power
/// excess relative to `p_max` and each leakage excess relative to the PU's
/// [`Scaling`] reference. Non-positive means feasible.
pub fn constraint_violation(
    ch: &ChannelSet,
    phases: &PhaseConfig,
    beams: &BeamformerSet,
    budgets: &BudgetConfig,
) -> Result<f64> {
    let scaling = Scaling::new(ch, budgets)?;
    let mut worst = (beams.total_power() - budgets.p_max) / budgets.p_max;
    for (i, &gain) in scaling.pu_gain.iter().enumerate() {
        let leak = leakage(ch, phases, beams, i)? * gain * gain / budgets.p_max;
        worst = worst.max(leak - scaling.p_tol[i]);
    }
    Ok(worst)
}

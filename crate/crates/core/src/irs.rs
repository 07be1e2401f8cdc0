//! IRS phase block for fixed beams.
//!
//! Phases enter through the lifted matrix `Θ = θ̃ θ̃^H` with `diag(Θ) = 1`.
//! The sum rate is `g̃ − f̃` with
//!
//! ```text
//! f̃ = −Σ_k log₂(Σ_r Tr(Θ A_kr) + σ²_k)
//! g̃ = −Σ_k log₂(Σ_{r≠k} Tr(Θ A_kr) + σ²_k),     A_kr = G_k W_r G_k^H
//! ```
//!
//! `Rank(Θ) = 1` is replaced by the penalty `χ(‖Θ‖_* − ‖Θ‖₂)`, whose concave
//! part is linearized through the principal eigenvector along with `g̃`.
//! Phases are read off the principal eigenvector once the penalty has driven
//! the residual rank to zero.

use std::f64::consts::LOG2_E;

use crate::conic::{AffineExpr, ConicOptions, ConicProblem, Relation, SolveStatus};
use crate::error::{Error, Result};
use crate::linalg::{eigh_desc, outer, principal_eigenpair, trace_product, CMat, C64};
use crate::system_model::{
    constraint_violation, lift_pu_channel, lift_su_channel, sum_rate, BeamformerSet, BudgetConfig,
    ChannelSet, LiftedBeamSet, LiftedPhase, PhaseConfig, Scaling,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrsOptions {
    /// Final penalty weight.
    pub chi: f64,
    /// First weight of the continuation; `None` starts directly at `chi`.
    pub chi_start: Option<f64>,
    /// Multiplier between continuation stages and for escalations.
    pub chi_growth: f64,
    /// Extra stages above `chi` allowed while the rank residual is too large.
    pub max_escalations: usize,
    /// SCA steps per penalty stage.
    pub max_iter: usize,
    /// Relative change of the penalized objective that ends a stage.
    pub tol_inner: f64,
    /// Largest accepted `(‖Θ‖_* − ‖Θ‖₂)/‖Θ‖₂` before phase recovery.
    pub rank_tol: f64,
    /// Allowed loss of sum rate relative to the incoming phases.
    pub guard_tol: f64,
    /// Allowed scaled constraint violation of the recovered phases.
    pub feasibility_tol: f64,
    pub conic: ConicOptions,
}

impl Default for IrsOptions {
    fn default() -> Self {
        Self {
            chi: 1e3,
            chi_start: Some(1e-3),
            chi_growth: 10.0,
            max_escalations: 3,
            max_iter: 30,
            tol_inner: 1e-4,
            rank_tol: 1e-6,
            guard_tol: 1e-6,
            feasibility_tol: 1e-6,
            conic: ConicOptions::default(),
        }
    }
}

/// `A_kr = G_k W_r G_k^H` for every SU `k` and beam `r`.
fn su_blocks(g_lift: &[CMat], lifted: &LiftedBeamSet) -> Vec<Vec<CMat>> {
    g_lift
        .iter()
        .map(|g| lifted.w_mat.iter().map(|w| g * w * g.adjoint()).collect())
        .collect()
}

fn log_args(theta: &CMat, blocks: &[Vec<CMat>], noise: &[f64], include_own: bool) -> Result<Vec<f64>> {
    if noise.len() != blocks.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} SU blocks, {} noise powers",
            blocks.len(),
            noise.len()
        )));
    }
    blocks
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let total = row
                .iter()
                .enumerate()
                .filter(|&(r, _)| include_own || r != k)
                .map(|(_, a)| trace_product(theta, a))
                .sum::<f64>()
                + noise[k];
            if total > 0.0 {
                Ok(total)
            } else {
                Err(Error::NonPositiveLogArgument {
                    context: "IRS objective",
                    value: total,
                })
            }
        })
        .collect()
}

fn check_theta(theta: &CMat, g_lift: &[CMat]) -> Result<()> {
    for g in g_lift {
        if g.nrows() != theta.nrows() || !theta.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Θ is {}×{}, lifted channel has {} rows",
                theta.nrows(),
                theta.ncols(),
                g.nrows()
            )));
        }
    }
    Ok(())
}

/// `f̃ = −Σ_k log₂(Σ_r Tr(Θ G_k W_r G_k^H) + σ²_k)`
pub fn f_tilde(theta: &CMat, g_lift: &[CMat], lifted: &LiftedBeamSet, noise: &[f64]) -> Result<f64> {
    check_theta(theta, g_lift)?;
    let blocks = su_blocks(g_lift, lifted);
    Ok(-log_args(theta, &blocks, noise, true)?.iter().map(|a| a.log2()).sum::<f64>())
}

/// `g̃ = −Σ_k log₂(Σ_{r≠k} Tr(Θ G_k W_r G_k^H) + σ²_k)`
pub fn g_tilde(theta: &CMat, g_lift: &[CMat], lifted: &LiftedBeamSet, noise: &[f64]) -> Result<f64> {
    check_theta(theta, g_lift)?;
    let blocks = su_blocks(g_lift, lifted);
    Ok(-log_args(theta, &blocks, noise, false)?.iter().map(|a| a.log2()).sum::<f64>())
}

fn grad_from_blocks(theta: &CMat, blocks: &[Vec<CMat>], noise: &[f64]) -> Result<CMat> {
    let den = log_args(theta, blocks, noise, false)?;
    let n = theta.nrows();
    let mut grad = CMat::zeros(n, n);
    for (k, row) in blocks.iter().enumerate() {
        let scale = C64::new(LOG2_E / den[k], 0.0);
        for (r, a) in row.iter().enumerate() {
            if r != k {
                grad -= a * scale;
            }
        }
    }
    Ok(grad)
}

/// `∇_Θ g̃ = −(1/ln2) Σ_k Σ_{r≠k} A_kr / (Σ_{r≠k} Tr(Θ A_kr) + σ²_k)`
pub fn grad_g_tilde(theta: &CMat, g_lift: &[CMat], lifted: &LiftedBeamSet, noise: &[f64]) -> Result<CMat> {
    check_theta(theta, g_lift)?;
    grad_from_blocks(theta, &su_blocks(g_lift, lifted), noise)
}

/// `‖Θ_j‖₂ + v^H (Θ − Θ_j) v` with `v` the principal eigenvector of `Θ_j`;
/// a global lower bound of `‖Θ‖₂` on PSD matrices.
pub fn spectral_underestimator(theta_at: &CMat, theta_query: &CMat) -> f64 {
    let (lead, v) = principal_eigenpair(theta_at);
    let q = v.dotc(&(theta_query * &v)).re;
    let a = v.dotc(&(theta_at * &v)).re;
    lead + q - a
}

/// `(‖Θ‖_* − ‖Θ‖₂) / ‖Θ‖₂`, zero for `Θ = 0`.
pub fn rank_residual(theta: &CMat) -> f64 {
    let (values, _) = eigh_desc(theta);
    let mut singular: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    singular.sort_by(|a, b| b.total_cmp(a));
    match singular.first() {
        Some(&top) if top > 0.0 => singular[1..].iter().sum::<f64>() / top,
        _ => 0.0,
    }
}

/// Phases from the principal eigenvector of `Θ`: rotate so the auxiliary
/// entry is real positive, project to unit modulus and set `ψ_m = −arg θ_m`.
/// Fails if `Θ` is farther than `rank_tol` from rank one.
pub fn recover_phases(theta: &CMat, rank_tol: f64) -> Result<PhaseConfig> {
    let n = theta.nrows();
    if n == 0 {
        return Err(Error::InvalidParameter("Θ must be at least 1×1".into()));
    }
    let residual = rank_residual(theta);
    if residual > rank_tol {
        return Err(Error::RankResidual {
            context: "lifted IRS matrix",
            residual,
            threshold: rank_tol,
        });
    }
    let (_, v) = principal_eigenpair(theta);
    let last = v[n - 1];
    let rotation = if last.norm() > 1e-12 {
        last.conj() / last.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let psi = (0..n - 1).map(|m| -(v[m] * rotation).arg()).collect();
    Ok(PhaseConfig::new(psi))
}

/// PSD projection followed by `D^{-1/2} Θ D^{-1/2}` so the diagonal is
/// exactly one.
pub fn repair_theta(theta: &CMat) -> CMat {
    let mut out = crate::beamforming::psd_part(theta);
    let n = out.nrows();
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let x = out[(i, i)].re;
            if x > 0.0 {
                1.0 / x.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] *= d[i] * d[j];
        }
        if d[i] == 0.0 {
            out[(i, i)] = C64::new(1.0, 0.0);
        }
    }
    out
}

/// IRS subproblem at fixed beams in the scaled units of [`Scaling`].
#[derive(Debug, Clone)]
pub struct IrsProblem {
    /// `A_kr`, scaled to unit noise.
    pub su_blocks: Vec<Vec<CMat>>,
    /// `B_i = Σ_k L_i W_k L_i^H`, scaled.
    pub pu_blocks: Vec<CMat>,
    pub noise: Vec<f64>,
    pub p_tol: Vec<f64>,
    pub m: usize,
    ch: ChannelSet,
    beams: BeamformerSet,
    budgets: BudgetConfig,
}

impl IrsProblem {
    /// `beams` are physical.
    pub fn new(ch: &ChannelSet, beams: &BeamformerSet, budgets: &BudgetConfig) -> Result<Self> {
        let scaling = Scaling::new(ch, budgets)?;
        let dims = ch.dims();
        if beams.w.len() != dims.k_users || beams.w.iter().any(|w| w.len() != dims.n_t) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} beams of length {}",
                dims.k_users, dims.n_t
            )));
        }
        let lifted = scaling.beams_to_scaled(beams).lift();
        let g_lift: Vec<CMat> = (0..dims.k_users)
            .map(|k| Ok(lift_su_channel(ch, k)? * C64::new(scaling.su_gain[k], 0.0)))
            .collect::<Result<_>>()?;
        let su_blocks = su_blocks(&g_lift, &lifted);
        let pu_blocks = (0..dims.i_users)
            .map(|i| {
                let l = lift_pu_channel(ch, i)? * C64::new(scaling.pu_gain[i], 0.0);
                Ok(lifted
                    .w_mat
                    .iter()
                    .fold(CMat::zeros(dims.m + 1, dims.m + 1), |acc, w| acc + &l * w * l.adjoint()))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            su_blocks,
            pu_blocks,
            noise: vec![1.0; dims.k_users],
            p_tol: scaling.p_tol,
            m: dims.m,
            ch: ch.clone(),
            beams: beams.clone(),
            budgets: budgets.clone(),
        })
    }

    /// `g̃ − f̃` at a (possibly high-rank) `Θ`.
    pub fn sum_rate_theta(&self, theta: &CMat) -> Result<f64> {
        let with = log_args(theta, &self.su_blocks, &self.noise, true)?;
        let without = log_args(theta, &self.su_blocks, &self.noise, false)?;
        Ok(with.iter().zip(&without).map(|(a, b)| (a / b).log2()).sum())
    }

    /// Sum rate of concrete phases, evaluated in the vector form.
    pub fn sum_rate_phases(&self, phases: &PhaseConfig) -> Result<f64> {
        sum_rate(&self.ch, phases, &self.beams)
    }

    pub fn violation(&self, phases: &PhaseConfig) -> Result<f64> {
        constraint_violation(&self.ch, phases, &self.beams, &self.budgets)
    }

    /// `|R(Θ) − R(ψ)| / max(|R(Θ)|, 1e-12)` for the phases recovered from `Θ`.
    pub fn recovery_error(&self, theta: &CMat, phases: &PhaseConfig) -> Result<f64> {
        let a = self.sum_rate_theta(theta)?;
        let b = self.sum_rate_phases(phases)?;
        Ok((a - b).abs() / a.abs().max(1e-12))
    }

    /// `f̃ − g̃ + χ(‖Θ‖_* − ‖Θ‖₂)`, with `‖Θ‖_* = Tr Θ` on PSD matrices.
    pub fn penalized_objective(&self, theta: &CMat, chi: f64) -> Result<f64> {
        let (values, _) = eigh_desc(theta);
        let nuclear: f64 = values.iter().map(|v| v.abs()).sum();
        let spectral = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        Ok(-self.sum_rate_theta(theta)? + chi * (nuclear - spectral))
    }

    fn build_surrogate(&self, at: &CMat, chi: f64) -> Result<ConicProblem> {
        let n = self.m + 1;
        let grad = grad_from_blocks(at, &self.su_blocks, &self.noise)?;
        let (lead, v) = principal_eigenpair(at);
        let vv = outer(&v);
        // the objective is divided by max(1, χ) to keep the solver well scaled
        let w = 1.0 / chi.max(1.0);

        let mut p = ConicProblem::new();
        let theta = p.add_var(n);
        for (k, row) in self.su_blocks.iter().enumerate() {
            let sum = row.iter().fold(CMat::zeros(n, n), |acc, a| acc + a);
            p.add_log_term(w * LOG2_E, AffineExpr::constant(self.noise[k]).with_term(theta, sum));
        }
        p.add_linear_objective(theta, (-grad.clone() - &vv * C64::new(chi, 0.0)) * C64::new(w, 0.0));
        let g_at = -log_args(at, &self.su_blocks, &self.noise, false)?
            .iter()
            .map(|a| a.log2())
            .sum::<f64>();
        // Tr Θ = m + 1 under the pinned diagonal
        let constant = -g_at + trace_product(&grad, at) + chi * (n as f64 - lead + v.dotc(&(at * &v)).re);
        p.add_objective_constant(w * constant);
        for i in 0..n {
            p.pin_diagonal(theta, i, 1.0);
        }
        for (b, &tol) in self.pu_blocks.iter().zip(&self.p_tol) {
            p.add_constraint(AffineExpr::new().with_term(theta, b.clone()), Relation::LessEq, tol);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone)]
pub struct IrsSubproblemState {
    pub theta: CMat,
    pub chi: f64,
    pub iteration: usize,
    /// Penalized objective at each accepted iterate.
    pub history: Vec<f64>,
    /// False when the last surrogate was only solved to reduced accuracy.
    pub accurate: bool,
}

impl IrsSubproblemState {
    pub fn new(problem: &IrsProblem, theta: CMat, chi: f64) -> Result<Self> {
        let value = problem.penalized_objective(&theta, chi)?;
        Ok(Self {
            theta,
            chi,
            iteration: 0,
            history: vec![value],
            accurate: true,
        })
    }
}

/// One SCA step on the penalized problem at the state's `χ`.
pub fn solve_irs_iteration(
    state: &IrsSubproblemState,
    problem: &IrsProblem,
    conic: &ConicOptions,
) -> Result<IrsSubproblemState> {
    let surrogate = problem.build_surrogate(&state.theta, state.chi)?;
    let sol = surrogate.solve(conic)?.require_usable()?;
    let accurate = sol.status == SolveStatus::Optimal;
    let theta = repair_theta(&sol.values[0]);
    let mut history = state.history.clone();
    history.push(problem.penalized_objective(&theta, state.chi)?);
    Ok(IrsSubproblemState {
        theta,
        chi: state.chi,
        iteration: state.iteration + 1,
        history,
        accurate,
    })
}

#[derive(Debug, Clone)]
pub struct IrsOutcome {
    pub phases: PhaseConfig,
    /// Final lifted iterate.
    pub theta: CMat,
    /// SCA steps over all stages.
    pub iterations: usize,
    pub chi_final: f64,
    pub escalations: usize,
    pub rank_residual: f64,
    pub recovery_error: f64,
    /// True when the recovered phases lost rate or broke a constraint and the
    /// incoming phases were kept instead.
    pub reverted: bool,
    /// Sum rate (vector form) of the incoming and of the returned phases.
    pub rate_before: f64,
    pub rate_after: f64,
}

fn run_stage(state: &mut IrsSubproblemState, problem: &IrsProblem, opts: &IrsOptions) -> Result<usize> {
    for step in 1..=opts.max_iter {
        let next = match solve_irs_iteration(state, problem, &opts.conic) {
            Ok(next) => next,
            Err(Error::NumericalFailure(msg)) => {
                log::warn!("IRS surrogate failed at chi {:.1e}: {msg}; ending the stage", state.chi);
                return Ok(step - 1);
            }
            Err(e) => return Err(e),
        };
        let prev = state.history[state.history.len() - 1];
        let value = next.history[next.history.len() - 1];
        if !next.accurate && value > prev {
            log::debug!("IRS surrogate solved inaccurately; ending stage at chi {:.1e}", state.chi);
            return Ok(step - 1);
        }
        *state = next;
        if (value - prev).abs() <= opts.tol_inner * prev.abs().max(1e-9) {
            return Ok(step);
        }
    }
    Ok(opts.max_iter)
}

/// Penalized SCA with `χ` continuation, followed by phase recovery.
///
/// `χ` runs from `chi_start` up to `chi` by `chi_growth`; if the rank residual
/// is still above `rank_tol` it keeps growing for up to `max_escalations`
/// further stages. The recovered phases replace `initial` only if they do not
/// lose more than `guard_tol` of sum rate and stay feasible.
pub fn run_irs_sca(initial: &PhaseConfig, problem: &IrsProblem, opts: &IrsOptions) -> Result<IrsOutcome> {
    if initial.len() != problem.m {
        return Err(Error::DimensionMismatch(format!(
            "{} phases for {} elements",
            initial.len(),
            problem.m
        )));
    }
    if !(opts.chi > 0.0) || !(opts.chi_growth > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need chi > 0 and chi_growth > 1, got {} and {}",
            opts.chi, opts.chi_growth
        )));
    }
    let rate_before = problem.sum_rate_phases(initial)?;
    let theta0 = LiftedPhase::from_phases(initial, C64::new(1.0, 0.0)).theta_mat;

    let mut schedule = Vec::new();
    let mut chi = opts.chi_start.unwrap_or(opts.chi).min(opts.chi);
    while chi < opts.chi * (1.0 - 1e-12) {
        schedule.push(chi);
        chi *= opts.chi_growth;
    }
    schedule.push(opts.chi);

    let mut state = IrsSubproblemState::new(problem, theta0, schedule[0])?;
    let mut iterations = 0;
    let mut escalations = 0;
    let mut stage = 0;
    loop {
        let chi = if stage < schedule.len() {
            schedule[stage]
        } else {
            escalations += 1;
            opts.chi * opts.chi_growth.powi(escalations as i32)
        };
        state.chi = chi;
        state.history.push(problem.penalized_objective(&state.theta, chi)?);
        iterations += run_stage(&mut state, problem, opts)?;
        stage += 1;
        if stage >= schedule.len() {
            let residual = rank_residual(&state.theta);
            if residual <= opts.rank_tol || escalations >= opts.max_escalations {
                break;
            }
            log::debug!("IRS rank residual {residual:.3e} at chi {chi:.1e}, escalating");
        }
    }

    let residual = rank_residual(&state.theta);
    if residual > opts.rank_tol {
        log::debug!("IRS rank residual {residual:.3e} above {:.1e}; recovering anyway", opts.rank_tol);
    }
    // the rate and feasibility guard below decides whether a high-rank
    // recovery is kept
    let phases = recover_phases(&state.theta, f64::INFINITY)?;
    let recovery_error = problem.recovery_error(&state.theta, &phases)?;
    let rate_after = problem.sum_rate_phases(&phases)?;
    let feasible = problem.violation(&phases)? <= opts.feasibility_tol;
    let reverted = !feasible || rate_after < rate_before - opts.guard_tol;
    Ok(IrsOutcome {
        phases: if reverted { initial.clone() } else { phases },
        theta: state.theta,
        iterations,
        chi_final: state.chi,
        escalations,
        rank_residual: residual,
        recovery_error,
        reverted,
        rate_before,
        rate_after: if reverted { rate_before } else { rate_after },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CVec};
    use std::f64::consts::PI;

    #[test]
    fn rank_residual_examples() {
        let v = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        assert!(rank_residual(&outer(&v)) < 1e-12);
        assert!((rank_residual(&CMat::identity(3, 3)) - 2.0).abs() < 1e-12);
        assert_eq!(rank_residual(&CMat::zeros(2, 2)), 0.0);
    }

    #[test]
    fn spectral_underestimator_touches_and_bounds() {
        let a = CVec::from_vec(vec![c(1.0, 0.0), c(0.5, 0.5)]);
        let b = CVec::from_vec(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        let at = outer(&a) + outer(&b) * c(0.2, 0.0);
        let query = outer(&b);
        let (lead, _) = principal_eigenpair(&at);
        assert!((spectral_underestimator(&at, &at) - lead).abs() < 1e-12);
        let (q_lead, _) = principal_eigenpair(&query);
        assert!(spectral_underestimator(&at, &query) <= q_lead + 1e-12);
    }

    #[test]
    fn recovery_round_trip() {
        let psi = vec![0.3, 2.0, 5.9, PI];
        let phases = PhaseConfig::new(psi.clone());
        let theta = LiftedPhase::from_phases(&phases, c(1.0, 0.0)).theta_mat;
        let back = recover_phases(&theta, 1e-6).unwrap();
        for (a, b) in back.psi().iter().zip(phases.psi()) {
            let d = (a - b).rem_euclid(2.0 * PI);
            assert!(d.min(2.0 * PI - d) < 1e-9);
        }
    }

    #[test]
    fn recovery_ignores_global_phase() {
        let phases = PhaseConfig::new(vec![1.0, 4.0]);
        let rho = C64::from_polar(1.0, 0.7);
        let theta = LiftedPhase::from_phases(&phases, rho).theta_mat;
        let back = recover_phases(&theta, 1e-6).unwrap();
        let rotated = PhaseConfig::new(phases.psi().iter().map(|p| p + 0.7).collect());
        for (a, b) in back.psi().iter().zip(rotated.psi()) {
            let d = (a - b).rem_euclid(2.0 * PI);
            assert!(d.min(2.0 * PI - d) < 1e-9);
        }
    }

    #[test]
    fn high_rank_theta_is_refused() {
        assert!(matches!(
            recover_phases(&CMat::identity(3, 3), 1e-6),
            Err(Error::RankResidual { .. })
        ));
    }

    #[test]
    fn theta_gradient_matches_central_differences() {
        let g_lift = vec![
            CMat::from_row_slice(2, 2, &[c(1.0, 0.2), c(0.3, -0.1), c(0.5, 0.5), c(-0.4, 0.0)]),
            CMat::from_row_slice(2, 2, &[c(0.2, 0.0), c(1.0, 1.0), c(0.1, -0.7), c(0.6, 0.3)]),
        ];
        let lifted = BeamformerSet::new(vec![
            CVec::from_vec(vec![c(1.0, 0.0), c(0.2, 0.1)]),
            CVec::from_vec(vec![c(0.0, 0.5), c(0.8, 0.0)]),
        ])
        .lift();
        let noise = [0.4, 0.9];
        let theta = LiftedPhase::from_phases(&PhaseConfig::new(vec![0.8]), c(1.0, 0.0)).theta_mat;
        let grad = grad_g_tilde(&theta, &g_lift, &lifted, &noise).unwrap();
        let dir = CMat::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(-0.5, 0.0)]);
        let h = 1e-6;
        let plus = g_tilde(&(&theta + &dir * c(h, 0.0)), &g_lift, &lifted, &noise).unwrap();
        let minus = g_tilde(&(&theta - &dir * c(h, 0.0)), &g_lift, &lifted, &noise).unwrap();
        let numeric = (plus - minus) / (2.0 * h);
        let analytic = crate::linalg::inner(&grad, &dir);
        assert!((numeric - analytic).abs() < 1e-6, "{numeric} vs {analytic}");
        let f = f_tilde(&theta, &g_lift, &lifted, &noise).unwrap();
        let g = g_tilde(&theta, &g_lift, &lifted, &noise).unwrap();
        assert!(g - f > 0.0);
    }
}

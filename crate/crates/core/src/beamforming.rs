//! Beamforming block for fixed IRS phases.
//!
//! The sum rate over lifted beams is written as `g − f` with
//!
//! ```text
//! f = −Σ_k log₂(Σ_r Tr(H_k W_r) + σ²_k)
//! g = −Σ_k log₂(Σ_{r≠k} Tr(H_k W_r) + σ²_k),     H_k = g̃_k g̃_k^H
//! ```
//!
//! both convex. Each SCA step replaces `g` by its tangent plane at the current
//! iterate, drops the rank constraint and solves the resulting convex program.
//! The relaxation is tight: optimal `W_k` come out rank one (monitored through
//! [`extract_rank_one`]).

use std::f64::consts::LOG2_E;

use crate::conic::{AffineExpr, ConicOptions, ConicProblem, Relation, SolveStatus};
use crate::error::{Error, Result};
use crate::linalg::{eigh_desc, inner, outer, quad_form, CMat, CVec, C64};
use crate::system_model::{
    effective_pu_channels, effective_su_channels, BeamformerSet, BudgetConfig, ChannelSet,
    LiftedBeamSet, PhaseConfig, Scaling,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamOptions {
    pub max_iter: usize,
    /// Relative sum-rate change that ends the SCA loop.
    pub tol_inner: f64,
    /// Largest accepted `σ₂/σ₁` of a relaxed beamforming matrix.
    pub rank_tol: f64,
    pub conic: ConicOptions,
}

impl Default for BeamOptions {
    fn default() -> Self {
        Self {
            max_iter: 30,
            tol_inner: 1e-4,
            rank_tol: 1e-4,
            conic: ConicOptions::default(),
        }
    }
}

/// Beams whose largest eigenvalue is below this fraction of the power budget
/// are treated as switched off; their rank is not certified.
const NEGLIGIBLE_POWER: f64 = 1e-7;

fn log_args(lifted: &LiftedBeamSet, g_eff: &[CVec], noise: &[f64], include_own: bool) -> Result<Vec<f64>> {
    if lifted.w_mat.len() != g_eff.len() || noise.len() != g_eff.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} beams, {} channels, {} noise powers",
            lifted.w_mat.len(),
            g_eff.len(),
            noise.len()
        )));
    }
    g_eff
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let total: f64 = lifted
                .w_mat
                .iter()
                .enumerate()
                .filter(|&(r, _)| include_own || r != k)
                .map(|(_, w)| quad_form(w, g))
                .sum::<f64>()
                + noise[k];
            if total > 0.0 {
                Ok(total)
            } else {
                Err(Error::NonPositiveLogArgument {
                    context: "beamforming objective",
                    value: total,
                })
            }
        })
        .collect()
}

/// `f = −Σ_k log₂(Σ_r Tr(g̃_k g̃_k^H W_r) + σ²_k)`
pub fn f_value(lifted: &LiftedBeamSet, g_eff: &[CVec], noise: &[f64]) -> Result<f64> {
    Ok(-log_args(lifted, g_eff, noise, true)?.iter().map(|a| a.log2()).sum::<f64>())
}

/// `g = −Σ_k log₂(Σ_{r≠k} Tr(g̃_k g̃_k^H W_r) + σ²_k)`
pub fn g_value(lifted: &LiftedBeamSet, g_eff: &[CVec], noise: &[f64]) -> Result<f64> {
    Ok(-log_args(lifted, g_eff, noise, false)?.iter().map(|a| a.log2()).sum::<f64>())
}

/// Gradient of [`g_value`] with respect to `W_k`:
/// `−(1/ln2) Σ_{t≠k} g̃_t g̃_t^H / (Σ_{r≠t} Tr(g̃_t g̃_t^H W_r) + σ²_t)`.
pub fn grad_g(lifted: &LiftedBeamSet, g_eff: &[CVec], noise: &[f64], k: usize) -> Result<CMat> {
    if k >= g_eff.len() {
        return Err(Error::IndexOutOfRange {
            what: "SU",
            index: k,
            len: g_eff.len(),
        });
    }
    let denominators = log_args(lifted, g_eff, noise, false)?;
    let n = g_eff[k].len();
    let mut grad = CMat::zeros(n, n);
    for (t, g) in g_eff.iter().enumerate() {
        if t != k {
            grad -= outer(g) * C64::new(LOG2_E / denominators[t], 0.0);
        }
    }
    Ok(grad)
}

fn gradients(lifted: &LiftedBeamSet, g_eff: &[CVec], noise: &[f64]) -> Result<Vec<CMat>> {
    (0..g_eff.len()).map(|k| grad_g(lifted, g_eff, noise, k)).collect()
}

/// First-order expansion of `g` at `at`, evaluated at `query`:
/// `g(W^{(j)}) + Σ_k Tr(∇_k g(W^{(j)})^H (W_k − W_k^{(j)}))`.
pub fn underestimate_g(
    at: &LiftedBeamSet,
    query: &LiftedBeamSet,
    g_eff: &[CVec],
    noise: &[f64],
) -> Result<f64> {
    let base = g_value(at, g_eff, noise)?;
    let grads = gradients(at, g_eff, noise)?;
    Ok(base
        + grads
            .iter()
            .zip(query.w_mat.iter().zip(&at.w_mat))
            .map(|(gr, (q, a))| inner(gr, &(q - a)))
            .sum::<f64>())
}

/// Nearest PSD matrix (negative eigenvalues clipped).
pub(crate) fn psd_part(a: &CMat) -> CMat {
    let (values, vectors) = eigh_desc(a);
    let mut out = CMat::zeros(a.nrows(), a.ncols());
    for (i, &v) in values.iter().enumerate() {
        if v > 0.0 {
            let u = vectors.column(i).into_owned();
            out += outer(&u) * C64::new(v, 0.0);
        }
    }
    out
}

/// Principal rank-one factor `√λ₁ u₁` and the residual `σ₂/σ₁` (0 for `W = 0`).
pub fn extract_rank_one(w_mat: &CMat) -> (CVec, f64) {
    let n = w_mat.nrows();
    if n == 0 {
        return (CVec::zeros(0), 0.0);
    }
    let (values, vectors) = eigh_desc(w_mat);
    let lead = values[0].max(0.0);
    let mut singular: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    singular.sort_by(|a, b| b.total_cmp(a));
    let residual = if singular[0] > 0.0 && n > 1 {
        singular[1] / singular[0]
    } else {
        0.0
    };
    let w = vectors.column(0).into_owned() * C64::new(lead.sqrt(), 0.0);
    (w, residual)
}

/// Beamforming subproblem at fixed phases in scaled units: unit noise, unit
/// power budget (beams in units of `√p_max`) and PU constraints normalized by
/// [`Scaling`].
#[derive(Debug, Clone)]
pub struct BeamProblem {
    pub g_eff: Vec<CVec>,
    pub l_eff: Vec<CVec>,
    pub noise: Vec<f64>,
    pub p_tol: Vec<f64>,
    pub scaling: Scaling,
}

impl BeamProblem {
    pub fn new(ch: &ChannelSet, phases: &PhaseConfig, budgets: &BudgetConfig) -> Result<Self> {
        let scaling = Scaling::new(ch, budgets)?;
        let g_eff = effective_su_channels(ch, phases)?
            .into_iter()
            .zip(&scaling.su_gain)
            .map(|(g, &s)| g * C64::new(s, 0.0))
            .collect();
        let l_eff = effective_pu_channels(ch, phases)?
            .into_iter()
            .zip(&scaling.pu_gain)
            .map(|(l, &s)| l * C64::new(s, 0.0))
            .collect();
        Ok(Self {
            g_eff,
            l_eff,
            noise: vec![1.0; ch.g_d.len()],
            p_tol: scaling.p_tol.clone(),
            scaling,
        })
    }

    pub fn n_t(&self) -> usize {
        self.g_eff[0].len()
    }

    pub fn k_users(&self) -> usize {
        self.g_eff.len()
    }

    /// Lifts physical beams into the scaled variables of this problem.
    pub fn lift_physical(&self, beams: &BeamformerSet) -> LiftedBeamSet {
        self.scaling.beams_to_scaled(beams).lift()
    }

    pub fn to_physical(&self, scaled: &BeamformerSet) -> BeamformerSet {
        self.scaling.beams_to_physical(scaled)
    }

    /// `g − f`, the sum rate of a (possibly relaxed) lifted iterate.
    pub fn sum_rate(&self, lifted: &LiftedBeamSet) -> Result<f64> {
        Ok(g_value(lifted, &self.g_eff, &self.noise)? - f_value(lifted, &self.g_eff, &self.noise)?)
    }

    /// Scaled MRT: `w_k ∝ g̃_k` with equal power split, shrunk by the largest
    /// common factor `c ≤ 1` that satisfies every leakage constraint.
    pub fn mrt_initialization(&self) -> BeamformerSet {
        let k_users = self.k_users();
        let n_t = self.n_t();
        let per_user = (1.0 / k_users as f64).sqrt();
        let w: Vec<CVec> = self
            .g_eff
            .iter()
            .map(|g| {
                let norm = g.norm();
                if norm > 0.0 {
                    g * C64::new(per_user / norm, 0.0)
                } else {
                    let mut e = CVec::zeros(n_t);
                    e[0] = C64::new(per_user, 0.0);
                    e
                }
            })
            .collect();
        let beams = BeamformerSet::new(w);
        let mut c2: f64 = 1.0;
        for (l, &tol) in self.l_eff.iter().zip(&self.p_tol) {
            let leak: f64 = beams.w.iter().map(|w| l.dotc(w).norm_sqr()).sum();
            if leak > 0.0 {
                c2 = c2.min(tol / leak);
            }
        }
        beams.scaled(c2.max(0.0).sqrt())
    }

    /// Projects solver output onto the PSD cone and shrinks it uniformly until
    /// every budget holds to within `tol` (relative).
    pub fn repair(&self, values: Vec<CMat>, tol: f64) -> LiftedBeamSet {
        let w_mat: Vec<CMat> = values.iter().map(psd_part).collect();
        let power: f64 = w_mat.iter().map(|w| w.trace().re).sum();
        let mut factor: f64 = 1.0;
        let mut limit = |lhs: f64, rhs: f64| {
            let cap = rhs + tol * rhs.max(1.0);
            if lhs > cap {
                factor = factor.min(cap / lhs);
            }
        };
        limit(power, 1.0);
        for (l, &rhs) in self.l_eff.iter().zip(&self.p_tol) {
            limit(w_mat.iter().map(|w| quad_form(w, l)).sum(), rhs);
        }
        let scale = C64::new(factor, 0.0);
        LiftedBeamSet {
            w_mat: w_mat.into_iter().map(|w| w * scale).collect(),
        }
    }

    fn build_surrogate(&self, at: &LiftedBeamSet) -> Result<ConicProblem> {
        let n_t = self.n_t();
        let grads = gradients(at, &self.g_eff, &self.noise)?;
        let mut p = ConicProblem::new();
        let vars: Vec<_> = (0..self.k_users()).map(|_| p.add_var(n_t)).collect();

        for (k, g) in self.g_eff.iter().enumerate() {
            let h = outer(g);
            let mut arg = AffineExpr::constant(self.noise[k]);
            for &v in &vars {
                arg.add_term(v, h.clone());
            }
            p.add_log_term(LOG2_E, arg);
        }
        let mut constant = -g_value(at, &self.g_eff, &self.noise)?;
        for ((grad, &v), w_at) in grads.iter().zip(&vars).zip(&at.w_mat) {
            p.add_linear_objective(v, -grad);
            constant += inner(grad, w_at);
        }
        p.add_objective_constant(constant);

        let mut power = AffineExpr::new();
        for &v in &vars {
            power.add_term(v, CMat::identity(n_t, n_t));
        }
        p.add_constraint(power, Relation::LessEq, 1.0);
        for (l, &tol) in self.l_eff.iter().zip(&self.p_tol) {
            let lo = outer(l);
            let mut leak = AffineExpr::new();
            for &v in &vars {
                leak.add_term(v, lo.clone());
            }
            p.add_constraint(leak, Relation::LessEq, tol);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone)]
pub struct BeamSubproblemState {
    /// Current lifted iterate, scaled units.
    pub w_mat: LiftedBeamSet,
    pub iteration: usize,
    /// `f − ĝ` at each accepted iterate (re-expanded there, so equal to `f − g`).
    pub history: Vec<f64>,
    /// False when the last surrogate was only solved to reduced accuracy.
    pub accurate: bool,
}

impl BeamSubproblemState {
    pub fn new(problem: &BeamProblem, w_mat: LiftedBeamSet) -> Result<Self> {
        let value = -problem.sum_rate(&w_mat)?;
        Ok(Self {
            w_mat,
            iteration: 0,
            history: vec![value],
            accurate: true,
        })
    }
}

/// One SCA step: solve the relaxed convex surrogate expanded at `state`.
pub fn solve_beam_iteration(
    state: &BeamSubproblemState,
    problem: &BeamProblem,
    opts: &BeamOptions,
) -> Result<BeamSubproblemState> {
    let surrogate = problem.build_surrogate(&state.w_mat)?;
    let sol = surrogate.solve(&opts.conic)?.require_usable()?;
    let accurate = sol.status == SolveStatus::Optimal;
    let w_mat = problem.repair(sol.values, opts.conic.check_tol);
    let mut history = state.history.clone();
    history.push(-problem.sum_rate(&w_mat)?);
    Ok(BeamSubproblemState {
        w_mat,
        iteration: state.iteration + 1,
        history,
        accurate,
    })
}

#[derive(Debug, Clone)]
pub struct BeamOutcome {
    /// Extracted beams, physical units.
    pub beams: BeamformerSet,
    /// Final relaxed iterate, scaled units.
    pub lifted: LiftedBeamSet,
    pub iterations: usize,
    pub converged: bool,
    /// The loop ended early on a failed or degraded surrogate solve.
    pub stalled: bool,
    /// Largest `σ₂/σ₁` over the accepted `W_k`.
    pub rank_residual: f64,
    /// Sum rate of the relaxed iterate before the first and after every step.
    pub rate_history: Vec<f64>,
}

/// Largest `σ₂/σ₁` over beams carrying more than [`NEGLIGIBLE_POWER`].
pub fn max_rank_residual(lifted: &LiftedBeamSet) -> f64 {
    lifted
        .w_mat
        .iter()
        .map(extract_rank_one)
        .filter(|(v, _)| v.norm_squared() > NEGLIGIBLE_POWER)
        .fold(0.0, |m, (_, r)| m.max(r))
}

/// SCA loop until the relative sum-rate change drops below `tol_inner` or
/// `max_iter` steps are taken; `initial` is in scaled units and must be
/// feasible.
pub fn run_beamforming_sca(
    initial: &LiftedBeamSet,
    problem: &BeamProblem,
    opts: &BeamOptions,
) -> Result<BeamOutcome> {
    let mut state = BeamSubproblemState::new(problem, initial.clone())?;
    let mut rates = vec![-state.history[0]];
    let mut converged = false;
    let mut stalled = false;
    // latest iterate that passes the rank test, with its step count and the
    // matching length of `rates`
    let mut last_good = (state.w_mat.clone(), 0, 1);
    while state.iteration < opts.max_iter {
        let next = match solve_beam_iteration(&state, problem, opts) {
            Ok(next) => next,
            Err(Error::NumericalFailure(msg)) => {
                log::warn!(
                    "beamforming surrogate failed at iteration {}: {msg}; keeping the last iterate",
                    state.iteration + 1
                );
                stalled = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let prev = rates[rates.len() - 1];
        let rate = -next.history[next.history.len() - 1];
        if !next.accurate && (rate < prev || max_rank_residual(&next.w_mat) > opts.rank_tol) {
            // keep the last accurate iterate rather than a degraded one
            log::debug!("beamforming surrogate solved inaccurately; stopping at iteration {}", state.iteration);
            stalled = true;
            break;
        }
        if max_rank_residual(&state.w_mat) <= opts.rank_tol {
            last_good = (state.w_mat.clone(), state.iteration, rates.len());
        }
        state = next;
        rates.push(rate);
        if (rate - prev).abs() <= opts.tol_inner * prev.abs().max(1e-9) {
            converged = true;
            break;
        }
    }
    if !converged && !stalled {
        log::warn!(
            "beamforming SCA hit the iteration cap ({}) without meeting tol {}",
            opts.max_iter,
            opts.tol_inner
        );
    }

    if !converged && max_rank_residual(&state.w_mat) > opts.rank_tol {
        log::debug!("unconverged beamforming iterate is not rank one; falling back to step {}", last_good.1);
        state.w_mat = last_good.0;
        state.iteration = last_good.1;
        rates.truncate(last_good.2);
        stalled = true;
    }
    let mut residual_max: f64 = 0.0;
    let mut w = Vec::with_capacity(problem.k_users());
    for w_mat in &state.w_mat.w_mat {
        let (v, residual) = extract_rank_one(w_mat);
        let lead = v.norm_squared();
        if lead > NEGLIGIBLE_POWER {
            if residual > opts.rank_tol {
                return Err(Error::RankResidual {
                    context: "relaxed beamforming matrix",
                    residual,
                    threshold: opts.rank_tol,
                });
            }
            residual_max = residual_max.max(residual);
        }
        w.push(v);
    }
    Ok(BeamOutcome {
        beams: problem.to_physical(&BeamformerSet::new(w)),
        lifted: state.w_mat,
        iterations: state.iteration,
        converged,
        stalled,
        rank_residual: residual_max,
        rate_history: rates,
    })
}

/// Physical-unit MRT starting point for `(ch, phases)`.
pub fn mrt_initialization(ch: &ChannelSet, phases: &PhaseConfig, budgets: &BudgetConfig) -> Result<BeamformerSet> {
    let problem = BeamProblem::new(ch, phases, budgets)?;
    Ok(problem.to_physical(&problem.mrt_initialization()))
}

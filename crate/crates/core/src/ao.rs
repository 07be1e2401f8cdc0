//! Alternating optimization of beams and IRS phases.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::beamforming::{run_beamforming_sca, BeamOptions, BeamProblem};
use crate::error::{Error, Result};
use crate::irs::{run_irs_sca, IrsOptions, IrsProblem};
use crate::system_model::{
    constraint_violation, leakage, sum_rate, BeamformerSet, BudgetConfig, ChannelSet, PhaseConfig,
    Scaling,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoConfig {
    /// Relative sum-rate change that ends the outer loop.
    pub eps_ao: f64,
    pub max_iter: usize,
    /// Seed of the random initial phases.
    pub seed: u64,
    pub beam: BeamOptions,
    pub irs: IrsOptions,
    /// Allowed scaled constraint violation of the returned point.
    pub feasibility_tol: f64,
}

impl Default for AoConfig {
    fn default() -> Self {
        Self {
            eps_ao: 0.01,
            max_iter: 50,
            seed: 0,
            beam: BeamOptions::default(),
            irs: IrsOptions::default(),
            feasibility_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AoRecord {
    pub iteration: usize,
    pub sum_rate: f64,
    pub beam_iterations: usize,
    pub beam_rank_residual: f64,
    pub irs_iterations: usize,
    pub irs_chi: f64,
    pub irs_rank_residual: f64,
    pub irs_recovery_error: f64,
    pub irs_reverted: bool,
    /// `1 − Σ‖w_k‖²/p_max`.
    pub power_slack: f64,
    /// `(p_tol_i − leakage_i) / s_i` in the scaled units of the PU constraints.
    pub leakage_slack: Vec<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum AoStatus {
    Converged,
    /// The outer loop hit `max_iter`.
    #[default]
    IterationCap,
    /// A block failed; the result is the last feasible iterate.
    SubproblemFailure(String),
}


#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AoTrace {
    pub initial_sum_rate: f64,
    pub records: Vec<AoRecord>,
    pub status: AoStatus,
}

impl AoTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "init  sum_rate={:.6}", self.initial_sum_rate);
        for r in &self.records {
            let _ = writeln!(
                out,
                "iter {:>3}  sum_rate={:.6}  beam_it={} beam_rank={:.2e}  irs_it={} chi={:.1e} irs_rank={:.2e} recov={:.2e}  power_slack={:.2e} leak_slack={:?}  {:.1}ms{}",
                r.iteration,
                r.sum_rate,
                r.beam_iterations,
                r.beam_rank_residual,
                r.irs_iterations,
                r.irs_chi,
                r.irs_rank_residual,
                r.irs_recovery_error,
                r.power_slack,
                r.leakage_slack,
                r.wall_ms,
                if r.irs_reverted { " reverted" } else { "" }
            );
        }
        let status = match &self.status {
            AoStatus::Converged => "converged".to_string(),
            AoStatus::IterationCap => "iteration_cap".to_string(),
            AoStatus::SubproblemFailure(msg) => format!("subproblem_failure: {msg}"),
        };
        let _ = writeln!(out, "status={status}");
        out
    }
}

#[derive(Debug, Clone)]
pub struct AoResult {
    pub phases: PhaseConfig,
    pub beams: BeamformerSet,
    pub sum_rate: f64,
    pub trace: AoTrace,
}

/// Uniform random phases drawn from `seed`.
pub fn random_phases(m: usize, seed: u64) -> PhaseConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PhaseConfig::new((0..m).map(|_| rng.random_range(0.0..TAU)).collect())
}

/// Random phases plus leakage-feasible MRT beams.
pub fn initial_point(ch: &ChannelSet, budgets: &BudgetConfig, seed: u64) -> Result<(PhaseConfig, BeamformerSet)> {
    let phases = random_phases(ch.dims().m, seed);
    let beams = crate::beamforming::mrt_initialization(ch, &phases, budgets)?;
    Ok((phases, beams))
}

/// Errors unless `(phases, beams)` meets the power and leakage budgets to
/// within `tol` (scaled units).
pub fn check_feasibility(
    ch: &ChannelSet,
    phases: &PhaseConfig,
    beams: &BeamformerSet,
    budgets: &BudgetConfig,
    tol: f64,
) -> Result<()> {
    let violation = constraint_violation(ch, phases, beams, budgets)?;
    if violation > tol {
        return Err(Error::Infeasible(format!(
            "constraint violation {violation:.3e} exceeds {tol:.1e}"
        )));
    }
    Ok(())
}

/// Full alternating optimization from [`initial_point`].
pub fn optimize(ch: &ChannelSet, budgets: &BudgetConfig, cfg: &AoConfig) -> Result<AoResult> {
    let (phases, beams) = initial_point(ch, budgets, cfg.seed)?;
    optimize_from(ch, budgets, phases, beams, cfg)
}

/// Per-constraint slacks in scaled units: power first, then each PU.
pub fn constraint_slacks(
    ch: &ChannelSet,
    phases: &PhaseConfig,
    beams: &BeamformerSet,
    budgets: &BudgetConfig,
) -> Result<(f64, Vec<f64>)> {
    let scaling = Scaling::new(ch, budgets)?;
    let power = 1.0 - beams.total_power() / budgets.p_max;
    let leak = (0..scaling.pu_gain.len())
        .map(|i| {
            let l = leakage(ch, phases, beams, i)? * scaling.pu_gain[i].powi(2) / budgets.p_max;
            Ok(scaling.p_tol[i] - l)
        })
        .collect::<Result<_>>()?;
    Ok((power, leak))
}

/// Alternating optimization from a given feasible point. Without IRS elements
/// only the beamforming block runs, once.
///
/// A block whose result would lower the sum rate is discarded. A failing
/// block ends the loop; the last feasible iterate is returned with
/// [`AoStatus::SubproblemFailure`].
pub fn optimize_from(
    ch: &ChannelSet,
    budgets: &BudgetConfig,
    mut phases: PhaseConfig,
    mut beams: BeamformerSet,
    cfg: &AoConfig,
) -> Result<AoResult> {
    if !(0.0..1.0).contains(&cfg.eps_ao) {
        return Err(Error::InvalidParameter(format!(
            "eps_ao must lie in [0, 1), got {}",
            cfg.eps_ao
        )));
    }
    check_feasibility(ch, &phases, &beams, budgets, cfg.feasibility_tol)?;
    let m = ch.dims().m;
    let mut rate = sum_rate(ch, &phases, &beams)?;
    let mut trace = AoTrace {
        initial_sum_rate: rate,
        ..AoTrace::default()
    };
    for iteration in 1..=cfg.max_iter {
        let started = Instant::now();
        let step = ao_step(ch, budgets, &phases, &beams, rate, cfg);
        let (new_phases, new_beams, mut record) = match step {
            Ok(v) => v,
            Err(e) => {
                log::warn!("AO iteration {iteration} failed: {e}");
                trace.status = AoStatus::SubproblemFailure(e.to_string());
                break;
            }
        };
        phases = new_phases;
        beams = new_beams;
        let new_rate = sum_rate(ch, &phases, &beams)?;
        let (power_slack, leakage_slack) = constraint_slacks(ch, &phases, &beams, budgets)?;
        record.iteration = iteration;
        record.sum_rate = new_rate;
        record.power_slack = power_slack;
        record.leakage_slack = leakage_slack;
        record.wall_ms = started.elapsed().as_secs_f64() * 1e3;
        log::debug!("AO iteration {iteration}: sum rate {new_rate:.6}");
        trace.records.push(record);

        let change = (new_rate - rate).abs() / rate.abs().max(1e-12);
        rate = new_rate;
        if m == 0 || change <= cfg.eps_ao {
            trace.status = AoStatus::Converged;
            break;
        }
    }
    check_feasibility(ch, &phases, &beams, budgets, cfg.feasibility_tol)?;
    Ok(AoResult {
        phases,
        beams,
        sum_rate: rate,
        trace,
    })
}

fn ao_step(
    ch: &ChannelSet,
    budgets: &BudgetConfig,
    phases: &PhaseConfig,
    beams: &BeamformerSet,
    rate: f64,
    cfg: &AoConfig,
) -> Result<(PhaseConfig, BeamformerSet, AoRecord)> {
    let problem = BeamProblem::new(ch, phases, budgets)?;
    let beam_out = run_beamforming_sca(&problem.lift_physical(beams), &problem, &cfg.beam)
        .map_err(|e| e.context("beamforming block"))?;
    let mut record = AoRecord {
        iteration: 0,
        sum_rate: 0.0,
        beam_iterations: beam_out.iterations,
        beam_rank_residual: beam_out.rank_residual,
        irs_iterations: 0,
        irs_chi: 0.0,
        irs_rank_residual: 0.0,
        irs_recovery_error: 0.0,
        irs_reverted: false,
        power_slack: 0.0,
        leakage_slack: Vec::new(),
        wall_ms: 0.0,
    };
    let candidate = beam_out.beams;
    let beams = if sum_rate(ch, phases, &candidate)? >= rate
        && constraint_violation(ch, phases, &candidate, budgets)? <= cfg.feasibility_tol
    {
        candidate
    } else {
        log::debug!("beamforming block did not improve the sum rate; kept previous beams");
        beams.clone()
    };
    if ch.dims().m == 0 {
        return Ok((phases.clone(), beams, record));
    }
    let irs_problem = IrsProblem::new(ch, &beams, budgets)?;
    let irs_out = run_irs_sca(phases, &irs_problem, &cfg.irs).map_err(|e| e.context("IRS block"))?;
    record.irs_iterations = irs_out.iterations;
    record.irs_chi = irs_out.chi_final;
    record.irs_rank_residual = irs_out.rank_residual;
    record.irs_recovery_error = irs_out.recovery_error;
    record.irs_reverted = irs_out.reverted;
    Ok((irs_out.phases, beams, record))
}

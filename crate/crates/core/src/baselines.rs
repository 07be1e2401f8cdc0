//! Reference schemes: zero-forcing with random IRS phases, and optimized
//! beamforming without an IRS.

use std::f64::consts::LOG2_E;

use serde::{Deserialize, Serialize};

use crate::ao::{optimize, random_phases, AoConfig, AoResult};
use crate::conic::{AffineExpr, ConicOptions, ConicProblem, Relation};
use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec, C64};
use crate::system_model::{
    effective_pu_channels, effective_su_channels, sum_rate, BeamformerSet, BudgetConfig,
    ChannelSet, PhaseConfig, Scaling,
};

/// Channels that baseline 1's zero-forcing nulls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZfNulling {
    /// Effective channels, including the random-phase IRS path.
    #[default]
    Effective,
    /// Direct BS–SU links only; the IRS path then leaks interference.
    Direct,
}

#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub beams: BeamformerSet,
    pub phases: PhaseConfig,
    pub sum_rate: f64,
}

/// Unit-norm ZF directions: `ŵ_k ∝ P_k g_k` where `P_k` projects onto the
/// orthogonal complement of the other users' channels.
pub fn zf_directions(g_eff: &[CVec]) -> Result<Vec<CVec>> {
    let k_users = g_eff.len();
    let n_t = g_eff.first().map_or(0, |g| g.len());
    if n_t < k_users {
        return Err(Error::InvalidParameter(format!(
            "zero-forcing needs n_t ≥ K, got n_t = {n_t}, K = {k_users}"
        )));
    }
    let mut out = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let others: Vec<&CVec> = g_eff.iter().enumerate().filter(|&(r, _)| r != k).map(|(_, g)| g).collect();
        let projected = if others.is_empty() {
            g_eff[k].clone()
        } else {
            let h = CMat::from_columns(&others.iter().map(|g| (*g).clone()).collect::<Vec<_>>());
            let svd = h.clone().svd(true, false);
            let u = svd.u.expect("left singular vectors requested");
            let top = svd.singular_values[0].max(f64::MIN_POSITIVE);
            let mut p = g_eff[k].clone();
            for (i, &s) in svd.singular_values.iter().enumerate() {
                if s > 1e-12 * top {
                    let col = u.column(i);
                    let coeff = col.dotc(&g_eff[k]);
                    p -= col * coeff;
                }
            }
            p
        };
        let norm = projected.norm();
        if !(norm > 0.0) {
            return Err(Error::NumericalFailure(format!(
                "user {k} lies in the span of the other users' channels"
            )));
        }
        out.push(projected / C64::new(norm, 0.0));
    }
    Ok(out)
}

/// Power allocation over fixed directions:
/// `max Σ_k log₂(1 + a_k p_k)` s.t. `Σ p_k ≤ 1`, `Σ_k b_ik p_k ≤ t_i`, `p ≥ 0`
/// (scaled units).
pub fn allocate_power(gains: &[f64], leakage: &[Vec<f64>], tol: &[f64], conic: &ConicOptions) -> Result<Vec<f64>> {
    let k_users = gains.len();
    let one = |x: f64| CMat::from_element(1, 1, C64::new(x, 0.0));
    let mut p = ConicProblem::new();
    let vars: Vec<_> = (0..k_users).map(|_| p.add_var(1)).collect();
    for (&v, &a) in vars.iter().zip(gains) {
        p.add_log_term(LOG2_E, AffineExpr::constant(1.0).with_term(v, one(a)));
    }
    let mut total = AffineExpr::new();
    for &v in &vars {
        total.add_term(v, one(1.0));
    }
    p.add_constraint(total, Relation::LessEq, 1.0);
    for (row, &t) in leakage.iter().zip(tol) {
        let mut e = AffineExpr::new();
        for (&v, &b) in vars.iter().zip(row) {
            e.add_term(v, one(b));
        }
        p.add_constraint(e, Relation::LessEq, t);
    }
    let sol = p.solve(conic)?.require_usable()?;
    let mut powers: Vec<f64> = sol.values.iter().map(|x| x[(0, 0)].re.max(0.0)).collect();
    let mut factor: f64 = 1.0;
    let mut limit = |lhs: f64, rhs: f64| {
        let cap = rhs + conic.check_tol * rhs.max(1.0);
        if lhs > cap {
            factor = factor.min(cap / lhs);
        }
    };
    limit(powers.iter().sum(), 1.0);
    for (row, &t) in leakage.iter().zip(tol) {
        limit(row.iter().zip(&powers).map(|(b, p)| b * p).sum(), t);
    }
    for x in &mut powers {
        *x *= factor;
    }
    Ok(powers)
}

/// ZF beams on the effective channels of random phases drawn from `seed`,
/// with optimized power allocation.
pub fn baseline1_zf_random_phase(
    ch: &ChannelSet,
    budgets: &BudgetConfig,
    seed: u64,
    conic: &ConicOptions,
) -> Result<BaselineResult> {
    baseline1_zf(ch, budgets, seed, conic, ZfNulling::Effective)
}

/// Baseline 1 with a choice of nulled channels. Power allocation treats the
/// users as interference-free in either case; the returned rate is the true
/// sum rate.
pub fn baseline1_zf(
    ch: &ChannelSet,
    budgets: &BudgetConfig,
    seed: u64,
    conic: &ConicOptions,
    nulling: ZfNulling,
) -> Result<BaselineResult> {
    let phases = random_phases(ch.dims().m, seed);
    let scaling = Scaling::new(ch, budgets)?;
    let g_eff: Vec<CVec> = effective_su_channels(ch, &phases)?
        .into_iter()
        .zip(&scaling.su_gain)
        .map(|(g, &s)| g * C64::new(s, 0.0))
        .collect();
    let l_eff: Vec<CVec> = effective_pu_channels(ch, &phases)?
        .into_iter()
        .zip(&scaling.pu_gain)
        .map(|(l, &s)| l * C64::new(s, 0.0))
        .collect();
    let dirs = match nulling {
        ZfNulling::Effective => zf_directions(&g_eff)?,
        ZfNulling::Direct => zf_directions(&ch.g_d)?,
    };
    let gains: Vec<f64> = g_eff.iter().zip(&dirs).map(|(g, w)| g.dotc(w).norm_sqr()).collect();
    let leakage: Vec<Vec<f64>> = l_eff
        .iter()
        .map(|l| dirs.iter().map(|w| l.dotc(w).norm_sqr()).collect())
        .collect();
    let powers = allocate_power(&gains, &leakage, &scaling.p_tol, conic)?;
    let scaled = BeamformerSet::new(
        dirs.iter()
            .zip(&powers)
            .map(|(w, &p)| w * C64::new(p.sqrt(), 0.0))
            .collect(),
    );
    let beams = scaling.beams_to_physical(&scaled);
    let rate = sum_rate(ch, &phases, &beams)?;
    Ok(BaselineResult {
        beams,
        phases,
        sum_rate: rate,
    })
}

/// SCA beamforming on the direct links only (IRS removed).
pub fn baseline2_no_irs(ch: &ChannelSet, budgets: &BudgetConfig, cfg: &AoConfig) -> Result<AoResult> {
    optimize(&ch.without_irs(), budgets, cfg)
}

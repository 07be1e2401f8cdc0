//! Conic modelling layer used by every convex surrogate in the crate.
//!
//! A [`ConicProblem`] has Hermitian matrix variables `X_v ⪰ 0` and minimizes
//!
//! ```text
//! Σ_v Re Tr(C_v X_v) + Σ_v τ_v ‖X_v‖_*  −  Σ_t c_t · ln(a_t(X))  + const
//! ```
//!
//! subject to affine trace constraints `a(X) ≤ b` / `a(X) = b`. Since every
//! variable is constrained to the PSD cone, `‖X‖_* = Tr(X)` on the feasible set.
//!
//! Solving is delegated to the Clarabel interior-point solver. Hermitian
//! variables are realified (`X = A + jB ⪰ 0 ⇔ [[A, −B], [B, A]] ⪰ 0`) and each
//! log term is an exponential-cone epigraph `(t, 1, a(X)) ∈ K_exp`.

use std::fmt::Write as _;
use std::sync::Once;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::error::{Error, Result};
use crate::linalg::{eigh_desc, min_eigenvalue, trace_product, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// `Σ_v Re Tr(A_v X_v) + constant`
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineExpr {
    pub terms: Vec<(VarId, CMat)>,
    pub constant: f64,
}

impl AffineExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: value,
        }
    }

    pub fn with_term(mut self, var: VarId, coeff: CMat) -> Self {
        self.terms.push((var, coeff));
        self
    }

    pub fn with_constant(mut self, value: f64) -> Self {
        self.constant += value;
        self
    }

    pub fn add_term(&mut self, var: VarId, coeff: CMat) {
        self.terms.push((var, coeff));
    }

    pub fn eval(&self, values: &[CMat]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|(v, a)| trace_product(a, &values[v.0]))
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    Equal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub expr: AffineExpr,
    pub relation: Relation,
    pub rhs: f64,
}

/// Objective term `−coeff · ln(arg(X))`; `coeff` must be positive.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTerm {
    pub coeff: f64,
    pub arg: AffineExpr,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConicProblem {
    dims: Vec<usize>,
    linear: AffineExpr,
    nuclear: Vec<(VarId, f64)>,
    logs: Vec<LogTerm>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    /// The solver stopped short of its tolerances but returned a point that
    /// violates the constraints by at most [`ConicOptions::loose_tol`].
    Inaccurate,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub values: Vec<CMat>,
    /// Objective re-evaluated at `values` (not the solver's internal estimate).
    pub objective: f64,
    pub status: SolveStatus,
    pub iterations: u32,
    pub report: FeasibilityReport,
    pub detail: String,
}

impl ConicSolution {
    pub fn require_optimal(self) -> Result<Self> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            SolveStatus::Infeasible => Err(Error::Infeasible(self.detail)),
            SolveStatus::Inaccurate | SolveStatus::NumericalFailure => {
                Err(Error::NumericalFailure(self.detail))
            }
        }
    }

    /// Like [`require_optimal`](Self::require_optimal) but also accepts an
    /// inaccurate point; the caller is expected to repair it.
    pub fn require_usable(self) -> Result<Self> {
        match self.status {
            SolveStatus::Inaccurate => Ok(self),
            _ => self.require_optimal(),
        }
    }
}

/// Independent re-check of a candidate point against the problem data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// Largest constraint violation, relative to `max(1, |rhs|)`.
    pub max_violation: f64,
    /// Smallest eigenvalue over all variables, relative to `max(1, ‖X_v‖₂)`.
    pub min_eigenvalue: f64,
    pub hermitian: bool,
}

impl FeasibilityReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.hermitian && self.max_violation <= tol && self.min_eigenvalue >= -tol
    }
}

/// Settings variants tried in turn when the solver stalls or its answer fails
/// the independent feasibility check.
const SOLVER_ATTEMPTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConicOptions {
    /// Relative duality-gap and feasibility tolerance passed to the solver.
    pub tol: f64,
    /// Acceptance threshold of the independent feasibility re-check.
    pub check_tol: f64,
    /// Largest violation of an [`SolveStatus::Inaccurate`] point.
    pub loose_tol: f64,
    pub max_iter: u32,
}

impl Default for ConicOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            check_tol: 1e-6,
            loose_tol: 1e-3,
            max_iter: 200,
        }
    }
}

impl ConicOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a Hermitian PSD matrix variable of size `n × n`.
    pub fn add_var(&mut self, n: usize) -> VarId {
        self.dims.push(n);
        VarId(self.dims.len() - 1)
    }

    pub fn var_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn add_linear_objective(&mut self, var: VarId, coeff: CMat) {
        self.linear.add_term(var, coeff);
    }

    pub fn add_objective_constant(&mut self, value: f64) {
        self.linear.constant += value;
    }

    pub fn add_nuclear_norm(&mut self, var: VarId, weight: f64) {
        self.nuclear.push((var, weight));
    }

    pub fn add_log_term(&mut self, coeff: f64, arg: AffineExpr) {
        self.logs.push(LogTerm { coeff, arg });
    }

    pub fn add_constraint(&mut self, expr: AffineExpr, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            expr,
            relation,
            rhs,
        });
    }

    /// Pins `X_v[i][i] = value`.
    pub fn pin_diagonal(&mut self, var: VarId, i: usize, value: f64) {
        let n = self.dims[var.0];
        let mut e = CMat::zeros(n, n);
        e[(i, i)] = C64::new(1.0, 0.0);
        self.add_constraint(AffineExpr::new().with_term(var, e), Relation::Equal, value);
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    fn validate(&self) -> Result<()> {
        let check_expr = |e: &AffineExpr| -> Result<()> {
            for (v, a) in &e.terms {
                let n = *self.dims.get(v.0).ok_or_else(|| {
                    Error::DimensionMismatch(format!("unknown variable {}", v.0))
                })?;
                if a.shape() != (n, n) {
                    return Err(Error::DimensionMismatch(format!(
                        "coefficient of shape {:?} for variable {} of size {n}",
                        a.shape(),
                        v.0
                    )));
                }
            }
            Ok(())
        };
        check_expr(&self.linear)?;
        for c in &self.constraints {
            check_expr(&c.expr)?;
        }
        for t in &self.logs {
            if !(t.coeff > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "log term coefficient must be positive, got {}",
                    t.coeff
                )));
            }
            check_expr(&t.arg)?;
        }
        for (v, w) in &self.nuclear {
            if v.0 >= self.dims.len() || !(*w >= 0.0) {
                return Err(Error::InvalidParameter("bad nuclear-norm term".into()));
            }
        }
        Ok(())
    }

    /// Objective value at a candidate point; `+∞` outside the log domain.
    pub fn evaluate_objective(&self, values: &[CMat]) -> f64 {
        let mut obj = self.linear.eval(values);
        for (v, w) in &self.nuclear {
            let (eigs, _) = eigh_desc(&values[v.0]);
            obj += w * eigs.iter().map(|e| e.abs()).sum::<f64>();
        }
        for t in &self.logs {
            let a = t.arg.eval(values);
            if a <= 0.0 {
                return f64::INFINITY;
            }
            obj -= t.coeff * a.ln();
        }
        obj
    }

    pub fn check(&self, values: &[CMat]) -> FeasibilityReport {
        let mut max_violation: f64 = 0.0;
        for c in &self.constraints {
            let lhs = c.expr.eval(values);
            let scale = c.rhs.abs().max(1.0);
            let v = match c.relation {
                Relation::LessEq => (lhs - c.rhs).max(0.0),
                Relation::Equal => (lhs - c.rhs).abs(),
            };
            max_violation = max_violation.max(v / scale);
        }
        for t in &self.logs {
            if t.arg.eval(values) <= 0.0 {
                max_violation = f64::INFINITY;
            }
        }
        let mut min_eig = f64::INFINITY;
        let mut hermitian = values.len() == self.dims.len();
        for (x, &n) in values.iter().zip(&self.dims) {
            if x.shape() != (n, n) || !crate::linalg::is_hermitian(x, 1e-9) {
                hermitian = false;
                continue;
            }
            if n == 0 {
                continue;
            }
            let (eigs, _) = eigh_desc(x);
            let scale = eigs[0].abs().max(1.0);
            min_eig = min_eig.min(min_eigenvalue(x) / scale);
        }
        FeasibilityReport {
            max_violation,
            min_eigenvalue: if min_eig.is_finite() { min_eig } else { 0.0 },
            hermitian,
        }
    }

    pub fn solve(&self, opts: &ConicOptions) -> Result<ConicSolution> {
        self.validate()?;
        limit_blas_threads();
        let layout = Layout::new(&self.dims);
        let n_mat = layout.total;
        let n_vars = n_mat + self.logs.len();

        let mut q = vec![0.0; n_vars];
        for (v, a) in &self.linear.terms {
            layout.accumulate(&mut q, *v, a, 1.0);
        }
        for (v, w) in &self.nuclear {
            for i in 0..self.dims[v.0] {
                q[layout.diag(*v, i)] += w;
            }
        }
        for (t, term) in self.logs.iter().enumerate() {
            q[n_mat + t] = -term.coeff;
        }

        let mut rows = RowBuilder::new(n_vars);
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();

        let push_affine = |rows: &mut RowBuilder, c: &Constraint| {
            let mut coeffs = vec![0.0; n_vars];
            for (v, a) in &c.expr.terms {
                layout.accumulate(&mut coeffs, *v, a, 1.0);
            }
            let b = c.rhs - c.expr.constant;
            let scale = coeffs.iter().fold(b.abs(), |m, x| m.max(x.abs()));
            let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            rows.push_dense(&coeffs, scale, b * scale);
        };
        let equalities: Vec<&Constraint> = self
            .constraints
            .iter()
            .filter(|c| c.relation == Relation::Equal)
            .collect();
        let inequalities: Vec<&Constraint> = self
            .constraints
            .iter()
            .filter(|c| c.relation == Relation::LessEq)
            .collect();
        if !equalities.is_empty() {
            for c in &equalities {
                push_affine(&mut rows, c);
            }
            cones.push(SupportedConeT::ZeroConeT(equalities.len()));
        }
        if !inequalities.is_empty() {
            for c in &inequalities {
                push_affine(&mut rows, c);
            }
            cones.push(SupportedConeT::NonnegativeConeT(inequalities.len()));
        }
        for (t, term) in self.logs.iter().enumerate() {
            // (t, 1, a(X)/s) ∈ K_exp  ⇔  t ≤ ln a(X) − ln s; the shift by
            // ln s only moves the objective by a constant
            rows.push_sparse(&[(n_mat + t, -1.0)], 0.0);
            rows.push_sparse(&[], 1.0);
            let mut coeffs = vec![0.0; n_vars];
            for (v, a) in &term.arg.terms {
                layout.accumulate(&mut coeffs, *v, a, -1.0);
            }
            let scale = coeffs.iter().fold(term.arg.constant.abs(), |m, x| m.max(x.abs()));
            let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            rows.push_dense(&coeffs, scale, term.arg.constant * scale);
            cones.push(SupportedConeT::ExponentialConeT());
        }
        for (idx, &n) in self.dims.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let v = VarId(idx);
            let dim = 2 * n;
            let sqrt2 = std::f64::consts::SQRT_2;
            for col in 0..dim {
                for row in 0..=col {
                    let w = if row == col { 1.0 } else { sqrt2 };
                    let entries: Vec<(usize, f64)> = layout
                        .realified_entry(v, n, row, col)
                        .into_iter()
                        .map(|(j, s)| (j, -w * s))
                        .collect();
                    rows.push_sparse(&entries, 0.0);
                }
            }
            cones.push(SupportedConeT::PSDTriangleConeT(dim));
        }

        let (a_mat, b) = rows.finish();
        let p_mat = CscMatrix::<f64>::zeros((n_vars, n_vars));
        let mut last: Option<ConicSolution> = None;
        for attempt in 0..SOLVER_ATTEMPTS {
            let sol = self.solve_once(&p_mat, &q, &a_mat, &b, &cones, &layout, opts, attempt)?;
            if sol.status == SolveStatus::Optimal || sol.status == SolveStatus::Infeasible {
                return Ok(sol);
            }
            log::debug!("conic attempt {attempt} rejected: {}", sol.detail);
            let better = match &last {
                None => true,
                Some(prev) => {
                    (sol.status == SolveStatus::Inaccurate && prev.status != SolveStatus::Inaccurate)
                        || (sol.status == prev.status
                            && sol.report.max_violation.max(-sol.report.min_eigenvalue)
                                < prev.report.max_violation.max(-prev.report.min_eigenvalue))
                }
            };
            if better {
                last = Some(sol);
            }
        }
        Ok(last.expect("at least one attempt"))
    }

    #[allow(clippy::too_many_arguments)]
    fn solve_once(
        &self,
        p_mat: &CscMatrix<f64>,
        q: &[f64],
        a_mat: &CscMatrix<f64>,
        b: &[f64],
        cones: &[SupportedConeT<f64>],
        layout: &Layout,
        opts: &ConicOptions,
        attempt: usize,
    ) -> Result<ConicSolution> {
        // the realified SDP blocks make the KKT systems badly conditioned, so
        // every attempt refines harder than the solver default; retries add
        // equilibration passes, then stronger regularization
        let mut builder = DefaultSettingsBuilder::default();
        builder
            .verbose(false)
            .max_iter(opts.max_iter)
            .tol_gap_abs(opts.tol)
            .tol_gap_rel(opts.tol)
            .tol_feas(opts.tol)
            .iterative_refinement_max_iter(50)
            .iterative_refinement_reltol(1e-15)
            .iterative_refinement_abstol(1e-15);
        if attempt >= 1 {
            builder.equilibrate_max_iter(50);
        }
        if attempt >= 2 {
            builder.static_regularization_constant(1e-7);
        }
        let settings = builder
            .build()
            .map_err(|e| Error::NumericalFailure(format!("solver settings: {e:?}")))?;
        let mut solver = DefaultSolver::new(p_mat, q, a_mat, b, cones, settings)
            .map_err(|e| Error::NumericalFailure(format!("solver setup: {e:?}")))?;
        solver.solve();
        let sol = &solver.solution;

        let values = layout.unpack(&sol.x);
        let report = self.check(&values);
        let objective = self.evaluate_objective(&values);
        let detail = format!(
            "{:?} after {} iterations (violation {:.1e}, min eigenvalue {:.1e})",
            sol.status, sol.iterations, report.max_violation, report.min_eigenvalue
        );
        let status = match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved
                if report.is_feasible(opts.check_tol) && objective.is_finite() =>
            {
                SolveStatus::Optimal
            }
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                SolveStatus::Infeasible
            }
            SolverStatus::Solved
            | SolverStatus::AlmostSolved
            | SolverStatus::InsufficientProgress
            | SolverStatus::MaxIterations
            | SolverStatus::NumericalError
                if report.is_feasible(opts.loose_tol) && objective.is_finite() =>
            {
                SolveStatus::Inaccurate
            }
            _ => SolveStatus::NumericalFailure,
        };
        Ok(ConicSolution {
            values,
            objective,
            status,
            iterations: sol.iterations,
            report,
            detail,
        })
    }

    /// Plain-text dump of the instance for offline debugging.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# conic problem");
        let _ = writeln!(out, "vars {}", self.dims.len());
        for (i, n) in self.dims.iter().enumerate() {
            let _ = writeln!(out, "var {i} hermitian-psd {n}");
        }
        let _ = writeln!(out, "objective.constant {:e}", self.linear.constant);
        for (v, a) in &self.linear.terms {
            let _ = writeln!(out, "objective.linear var {}", v.0);
            write_matrix(&mut out, a);
        }
        for (v, w) in &self.nuclear {
            let _ = writeln!(out, "objective.nuclear var {} weight {:e}", v.0, w);
        }
        for (t, term) in self.logs.iter().enumerate() {
            let _ = writeln!(
                out,
                "objective.neglog {t} coeff {:e} constant {:e}",
                term.coeff, term.arg.constant
            );
            for (v, a) in &term.arg.terms {
                let _ = writeln!(out, "  term var {}", v.0);
                write_matrix(&mut out, a);
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let rel = match c.relation {
                Relation::LessEq => "<=",
                Relation::Equal => "==",
            };
            let _ = writeln!(
                out,
                "constraint {i} {rel} {:e} constant {:e}",
                c.rhs, c.expr.constant
            );
            for (v, a) in &c.expr.terms {
                let _ = writeln!(out, "  term var {}", v.0);
                write_matrix(&mut out, a);
            }
        }
        out
    }
}

fn write_matrix(out: &mut String, a: &CMat) {
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let z = a[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                let _ = writeln!(out, "    {i} {j} {:e} {:e}", z.re, z.im);
            }
        }
    }
}

/// Real parameterization of the Hermitian variables: per variable the `n`
/// diagonal entries, then `(Re, Im)` of every strictly upper entry.
struct Layout {
    offsets: Vec<usize>,
    dims: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(dims: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut total = 0;
        for &n in dims {
            offsets.push(total);
            total += n * n;
        }
        Self {
            offsets,
            dims: dims.to_vec(),
            total,
        }
    }

    fn diag(&self, v: VarId, i: usize) -> usize {
        self.offsets[v.0] + i
    }

    fn pair(&self, v: VarId, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        let n = self.dims[v.0];
        // row-major enumeration of the strict upper triangle
        let before = i * n - i * (i + 1) / 2;
        self.offsets[v.0] + n + 2 * (before + (j - i - 1))
    }

    /// Adds `scale · ∂ Re Tr(C X_v) / ∂x` into `coeffs`.
    fn accumulate(&self, coeffs: &mut [f64], v: VarId, c: &CMat, scale: f64) {
        let n = self.dims[v.0];
        for i in 0..n {
            coeffs[self.diag(v, i)] += scale * c[(i, i)].re;
            for j in (i + 1)..n {
                let p = self.pair(v, i, j);
                coeffs[p] += scale * (c[(i, j)].re + c[(j, i)].re);
                coeffs[p + 1] += scale * (c[(i, j)].im - c[(j, i)].im);
            }
        }
    }

    /// Entry `(row, col)` of `[[A, −B], [B, A]]` as a sparse combination of
    /// parameters, for `row ≤ col`.
    fn realified_entry(&self, v: VarId, n: usize, row: usize, col: usize) -> Vec<(usize, f64)> {
        let sym = |r: usize, c: usize| -> Vec<(usize, f64)> {
            match r.cmp(&c) {
                std::cmp::Ordering::Equal => vec![(self.diag(v, r), 1.0)],
                std::cmp::Ordering::Less => vec![(self.pair(v, r, c), 1.0)],
                std::cmp::Ordering::Greater => vec![(self.pair(v, c, r), 1.0)],
            }
        };
        if col < n {
            sym(row, col)
        } else if row >= n {
            sym(row - n, col - n)
        } else {
            // −B[row][c'], with B[i][j] = Im X_ij
            let cp = col - n;
            match row.cmp(&cp) {
                std::cmp::Ordering::Equal => Vec::new(),
                std::cmp::Ordering::Less => vec![(self.pair(v, row, cp) + 1, -1.0)],
                std::cmp::Ordering::Greater => vec![(self.pair(v, cp, row) + 1, 1.0)],
            }
        }
    }

    fn unpack(&self, x: &[f64]) -> Vec<CMat> {
        self.dims
            .iter()
            .enumerate()
            .map(|(idx, &n)| {
                let v = VarId(idx);
                let mut m = CMat::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = C64::new(x[self.diag(v, i)], 0.0);
                    for j in (i + 1)..n {
                        let p = self.pair(v, i, j);
                        let z = C64::new(x[p], x[p + 1]);
                        m[(i, j)] = z;
                        m[(j, i)] = z.conj();
                    }
                }
                m
            })
            .collect()
    }
}

/// Row-wise accumulation of `A` and `b` for `s = b − A x ∈ K`.
struct RowBuilder {
    n_cols: usize,
    triplets: Vec<(usize, usize, f64)>,
    b: Vec<f64>,
}

impl RowBuilder {
    fn new(n_cols: usize) -> Self {
        Self {
            n_cols,
            triplets: Vec::new(),
            b: Vec::new(),
        }
    }

    fn push_dense(&mut self, coeffs: &[f64], scale: f64, b: f64) {
        let row = self.b.len();
        for (j, &a) in coeffs.iter().enumerate() {
            if a != 0.0 {
                self.triplets.push((row, j, a * scale));
            }
        }
        self.b.push(b);
    }

    fn push_sparse(&mut self, entries: &[(usize, f64)], b: f64) {
        let row = self.b.len();
        for &(j, a) in entries {
            self.triplets.push((row, j, a));
        }
        self.b.push(b);
    }

    fn finish(mut self) -> (CscMatrix<f64>, Vec<f64>) {
        let m = self.b.len();
        self.triplets.sort_by(|x, y| (x.1, x.0).cmp(&(y.1, y.0)));
        let mut colptr = vec![0usize; self.n_cols + 1];
        let mut rowval = Vec::with_capacity(self.triplets.len());
        let mut nzval: Vec<f64> = Vec::with_capacity(self.triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &self.triplets {
            if last == Some((r, c)) {
                *nzval.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            rowval.push(r);
            nzval.push(v);
            colptr[c + 1] += 1;
            last = Some((r, c));
        }
        for c in 0..self.n_cols {
            colptr[c + 1] += colptr[c];
        }
        (CscMatrix::new(m, self.n_cols, colptr, rowval, nzval), self.b)
    }
}

extern "C" {
    fn openblas_set_num_threads(num_threads: std::os::raw::c_int);
}

/// The dense kernels are tiny; BLAS threading only adds contention when
/// scenarios are solved in parallel.
fn limit_blas_threads() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| unsafe { openblas_set_num_threads(1) });
}

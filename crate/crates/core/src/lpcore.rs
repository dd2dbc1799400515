//! Generic linear-program engine for the master and pricing layers.
//!
//! Maximization problems over nonnegative variables with optional upper
//! bounds and EQ/LE rows. The solver is a dense two-phase primal simplex
//! with Bland's rule (lowest-index entering column, lowest-index leaving
//! variable on ratio ties), which makes it deterministic and free of
//! cycling. It returns a basic (vertex) optimal point together with dual
//! prices satisfying complementary slackness.
//!
//! The scalar type is generic: `f64` with a positive tolerance for the
//! everyday path, and `BigRational` with tolerance zero for exact
//! certification runs.

use num_traits::Signed;
use thiserror::Error;

/// Scalar admissible for the simplex tableau.
pub trait LpNum: Clone + Signed + PartialOrd {}
impl<T: Clone + Signed + PartialOrd> LpNum for T {}

/// Row sense. All rows carry a finite right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Eq,
    Le,
}

#[derive(Debug, Clone)]
struct Row<T> {
    kind: RowKind,
    rhs: T,
    coeffs: Vec<(usize, T)>,
}

/// A maximization LP: variables `x_j >= 0` with optional finite upper
/// bounds, sparse EQ/LE constraint rows.
#[derive(Debug, Clone)]
pub struct LpProblem<T> {
    num_vars: usize,
    objective: Vec<T>,
    upper_bounds: Vec<Option<T>>,
    rows: Vec<Row<T>>,
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solution of an [`LpProblem`]. Primal values are basic (a vertex);
/// `duals` has one entry per constraint row in declaration order.
#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub primal: Vec<T>,
    pub duals: Vec<T>,
    pub objective: T,
    /// Indices of structural variables that are basic in the final tableau.
    pub basic_vars: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl<T: LpNum> LpProblem<T> {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            objective: vec![T::zero(); num_vars],
            upper_bounds: vec![None; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, var: usize, coeff: T) {
        assert!(var < self.num_vars, "objective references undeclared variable");
        self.objective[var] = coeff;
    }

    pub fn set_upper_bound(&mut self, var: usize, bound: T) {
        assert!(var < self.num_vars, "bound references undeclared variable");
        self.upper_bounds[var] = Some(bound);
    }

    /// Adds a constraint row; returns its index.
    pub fn add_row(&mut self, kind: RowKind, rhs: T, coeffs: Vec<(usize, T)>) -> usize {
        for (var, _) in &coeffs {
            assert!(*var < self.num_vars, "row references undeclared variable");
        }
        self.rows.push(Row { kind, rhs, coeffs });
        self.rows.len() - 1
    }

    /// Textual dump in CPLEX-style LP format, for cross-checking against
    /// external solvers.
    pub fn write_lp_format(&self, fmt: impl Fn(&T) -> String) -> String {
        let mut out = String::from("Maximize\n obj:");
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                out.push_str(&format!(" + {} x{j}", fmt(c)));
            }
        }
        out.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(" r{i}:"));
            for (var, c) in &row.coeffs {
                out.push_str(&format!(" + {} x{var}", fmt(c)));
            }
            let op = match row.kind {
                RowKind::Eq => "=",
                RowKind::Le => "<=",
            };
            out.push_str(&format!(" {op} {}\n", fmt(&row.rhs)));
        }
        out.push_str("Bounds\n");
        for (j, ub) in self.upper_bounds.iter().enumerate() {
            match ub {
                Some(u) => out.push_str(&format!(" 0 <= x{j} <= {}\n", fmt(u))),
                None => out.push_str(&format!(" 0 <= x{j}\n")),
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum InternalKind {
    Le,
    Ge,
    Eq,
}

/// Dense simplex state over an internalized problem.
struct Tableau<T> {
    /// m x (n_cols + 1); last column is the right-hand side.
    rows: Vec<Vec<T>>,
    /// Basic column index per tableau row.
    basis: Vec<usize>,
    n_cols: usize,
    /// Columns barred from entering (artificials in phase 2).
    artificial: Vec<bool>,
    tol: T,
}

impl<T: LpNum> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.n_cols]
    }

    /// One simplex phase on the current tableau for the given column costs.
    /// Returns `Ok(false)` on unboundedness, `Ok(true)` at optimality.
    fn optimize(&mut self, costs: &[T], max_iters: usize) -> Result<bool, LpError> {
        for _ in 0..max_iters {
            let y = self.row_prices(costs);
            // Bland: lowest-index column with positive reduced cost enters.
            let mut entering = None;
            for (j, cost) in costs.iter().enumerate() {
                if self.artificial[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost.clone();
                for (i, yi) in y.iter().enumerate() {
                    if !yi.is_zero() && !self.rows[i][j].is_zero() {
                        rc = rc - yi.clone() * self.rows[i][j].clone();
                    }
                }
                if rc > self.tol {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Ok(true);
            };
            // Ratio test; ties broken by lowest basic variable index.
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][j].clone();
                if a > self.tol {
                    let ratio = self.rhs(i).clone() / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((i, _)) = leave else {
                return Ok(false);
            };
            self.pivot(i, j);
        }
        Err(LpError::NumericalFailure("simplex iteration limit reached".into()))
    }

    /// Simplex multipliers `y = c_B B^{-1}` for the current basis, derived
    /// row by row from the tableau (rows of the tableau are `B^{-1} A`).
    fn row_prices(&self, costs: &[T]) -> Vec<T> {
        // For a tableau in canonical form each basic column is a unit
        // vector, so the reduced cost of column j is
        // c_j - sum_i c_{basis[i]} * tableau[i][j]. Representing that as
        // "prices" per row just means y_i = c_{basis[i]} applied against
        // tableau row i.
        self.basis.iter().map(|&b| costs[b].clone()).collect()
    }

    fn pivot(&mut self, pivot_row: usize, pivot_col: usize) {
        let p = self.rows[pivot_row][pivot_col].clone();
        for v in self.rows[pivot_row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        for i in 0..self.rows.len() {
            if i == pivot_row {
                continue;
            }
            let factor = self.rows[i][pivot_col].clone();
            if factor.is_zero() {
                continue;
            }
            for jj in 0..=self.n_cols {
                let delta = factor.clone() * self.rows[pivot_row][jj].clone();
                self.rows[i][jj] = self.rows[i][jj].clone() - delta;
            }
        }
        self.basis[pivot_row] = pivot_col;
    }

    /// Reduced cost of column j under `costs` for the current basis.
    fn reduced_cost(&self, j: usize, costs: &[T]) -> T {
        let mut rc = costs[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !costs[b].is_zero() && !self.rows[i][j].is_zero() {
                rc = rc - costs[b].clone() * self.rows[i][j].clone();
            }
        }
        rc
    }
}

/// Solves the problem to a basic optimum with dual prices.
///
/// `tolerance` controls pivot admission and the final certificate checks;
/// pass zero with an exact scalar type. The pivot rule has no randomness,
/// so a fixed problem always yields the same solution.
pub fn solve_lp<T: LpNum>(problem: &LpProblem<T>, tolerance: T) -> Result<LpSolution<T>, LpError> {
    let n = problem.num_vars;

    // Internalize: upper bounds become LE rows; rows are normalized to a
    // nonnegative right-hand side.
    let mut kinds: Vec<InternalKind> = Vec::new();
    let mut negated: Vec<bool> = Vec::new();
    let mut dense_rows: Vec<Vec<T>> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    for row in &problem.rows {
        let mut dense = vec![T::zero(); n];
        for (var, c) in &row.coeffs {
            dense[*var] = dense[*var].clone() + c.clone();
        }
        let flip = row.rhs < T::zero();
        let kind = match (row.kind, flip) {
            (RowKind::Eq, _) => InternalKind::Eq,
            (RowKind::Le, false) => InternalKind::Le,
            (RowKind::Le, true) => InternalKind::Ge,
        };
        if flip {
            for v in dense.iter_mut() {
                *v = -v.clone();
            }
            rhs.push(-row.rhs.clone());
        } else {
            rhs.push(row.rhs.clone());
        }
        kinds.push(kind);
        negated.push(flip);
        dense_rows.push(dense);
    }
    let user_rows = dense_rows.len();
    for (j, ub) in problem.upper_bounds.iter().enumerate() {
        if let Some(u) = ub {
            let mut dense = vec![T::zero(); n];
            dense[j] = T::one();
            if *u < T::zero() {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    primal: vec![T::zero(); n],
                    duals: vec![T::zero(); user_rows],
                    objective: T::zero(),
                    basic_vars: Vec::new(),
                });
            }
            dense_rows.push(dense);
            rhs.push(u.clone());
            kinds.push(InternalKind::Le);
            negated.push(false);
        }
    }
    let m = dense_rows.len();

    // Column layout: structural | slack/surplus | artificial.
    // slack_col[i] / art_col[i] give the auxiliary columns of row i.
    let mut n_cols = n;
    let mut slack_col = vec![usize::MAX; m];
    let mut art_col = vec![usize::MAX; m];
    for (i, kind) in kinds.iter().enumerate() {
        match kind {
            InternalKind::Le | InternalKind::Ge => {
                slack_col[i] = n_cols;
                n_cols += 1;
            }
            InternalKind::Eq => {}
        }
    }
    for (i, kind) in kinds.iter().enumerate() {
        match kind {
            InternalKind::Ge | InternalKind::Eq => {
                art_col[i] = n_cols;
                n_cols += 1;
            }
            InternalKind::Le => {}
        }
    }

    let mut artificial = vec![false; n_cols];
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let mut row = vec![T::zero(); n_cols + 1];
        row[..n].clone_from_slice(&dense_rows[i]);
        match kinds[i] {
            InternalKind::Le => {
                row[slack_col[i]] = T::one();
                basis[i] = slack_col[i];
            }
            InternalKind::Ge => {
                row[slack_col[i]] = -T::one();
                row[art_col[i]] = T::one();
                artificial[art_col[i]] = true;
                basis[i] = art_col[i];
            }
            InternalKind::Eq => {
                row[art_col[i]] = T::one();
                artificial[art_col[i]] = true;
                basis[i] = art_col[i];
            }
        }
        row[n_cols] = rhs[i].clone();
        rows.push(row);
    }

    let mut tableau = Tableau { rows, basis, n_cols, artificial: vec![false; n_cols], tol: tolerance.clone() };
    let max_iters = 2000 + 200 * (m + n_cols);

    // Phase 1: drive artificials to zero (maximize their negated sum).
    if artificial.iter().any(|&a| a) {
        let mut phase1_costs = vec![T::zero(); n_cols];
        for (j, &a) in artificial.iter().enumerate() {
            if a {
                phase1_costs[j] = -T::one();
            }
        }
        let finished = tableau.optimize(&phase1_costs, max_iters)?;
        debug_assert!(finished, "phase 1 objective is bounded");
        let mut infeas = T::zero();
        for (i, &b) in tableau.basis.iter().enumerate() {
            if artificial[b] {
                infeas = infeas + tableau.rhs(i).clone();
            }
        }
        let feas_tol = tolerance.clone() + tolerance.clone(); // 2*tol slack on the phase-1 sum
        if infeas > feas_tol {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                primal: vec![T::zero(); n],
                duals: vec![T::zero(); user_rows],
                objective: T::zero(),
                basic_vars: Vec::new(),
            });
        }
        // Pivot basic artificials out where possible; redundant rows keep
        // their artificial basic at zero and are harmless afterwards.
        for i in 0..m {
            if artificial[tableau.basis[i]] {
                let col = (0..n_cols)
                    .find(|&j| !artificial[j] && tableau.rows[i][j].abs() > tolerance);
                if let Some(j) = col {
                    tableau.pivot(i, j);
                }
            }
        }
        // Artificials may not re-enter in phase 2.
        tableau.artificial = artificial.clone();
    }

    // Phase 2.
    let mut costs = vec![T::zero(); n_cols];
    costs[..n].clone_from_slice(&problem.objective);
    let finished = tableau.optimize(&costs, max_iters)?;
    if !finished {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: vec![T::zero(); n],
            duals: vec![T::zero(); user_rows],
            objective: T::zero(),
            basic_vars: Vec::new(),
        });
    }

    // Extract primal point.
    let mut primal = vec![T::zero(); n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            primal[b] = tableau.rhs(i).clone();
        }
    }
    let mut objective = T::zero();
    for (j, c) in problem.objective.iter().enumerate() {
        if !c.is_zero() {
            objective = objective + c.clone() * primal[j].clone();
        }
    }

    // Duals per internal row, read off the auxiliary-column reduced costs:
    // slack (+1): y_i = -rc;  surplus (-1): y_i = rc;  artificial (+1): y_i = -rc.
    let mut duals = Vec::with_capacity(user_rows);
    for i in 0..user_rows {
        let y = match kinds[i] {
            InternalKind::Le => -tableau.reduced_cost(slack_col[i], &costs),
            InternalKind::Ge => tableau.reduced_cost(slack_col[i], &costs),
            InternalKind::Eq => -tableau.reduced_cost(art_col[i], &costs),
        };
        duals.push(if negated[i] { -y } else { y });
    }

    let mut basic_vars: Vec<usize> =
        tableau.basis.iter().copied().filter(|&b| b < n).collect();
    basic_vars.sort_unstable();
    basic_vars.dedup();

    let solution = LpSolution { status: LpStatus::Optimal, primal, duals, objective, basic_vars };
    certify(problem, &solution, &tolerance)?;
    Ok(solution)
}

/// Verifies primal/dual feasibility, complementary slackness, and strong
/// duality at the requested tolerance. A failure here is a numerical
/// breakdown, not a property of the input problem.
fn certify<T: LpNum>(
    problem: &LpProblem<T>,
    sol: &LpSolution<T>,
    tol: &T,
) -> Result<(), LpError> {
    let scale = |x: &T| tol.clone() * (T::one() + x.abs());
    for (j, x) in sol.primal.iter().enumerate() {
        if *x < -scale(&T::zero()) {
            return Err(LpError::NumericalFailure(format!("variable {j} below zero")));
        }
        if let Some(u) = &problem.upper_bounds[j] {
            if x.clone() - u.clone() > scale(u) {
                return Err(LpError::NumericalFailure(format!("variable {j} above its bound")));
            }
        }
    }
    let mut dual_obj = T::zero();
    for (i, row) in problem.rows.iter().enumerate() {
        let mut lhs = T::zero();
        for (var, c) in &row.coeffs {
            lhs = lhs + c.clone() * sol.primal[*var].clone();
        }
        let slack = row.rhs.clone() - lhs;
        match row.kind {
            RowKind::Eq => {
                if slack.abs() > scale(&row.rhs) {
                    return Err(LpError::NumericalFailure(format!("eq row {i} violated")));
                }
            }
            RowKind::Le => {
                if -slack.clone() > scale(&row.rhs) {
                    return Err(LpError::NumericalFailure(format!("le row {i} violated")));
                }
                if sol.duals[i] < -scale(&T::zero()) {
                    return Err(LpError::NumericalFailure(format!("le row {i} dual negative")));
                }
                // Complementary slackness: y_i * slack_i = 0.
                let prod = sol.duals[i].clone() * slack.clone();
                if prod.abs() > scale(&row.rhs) {
                    return Err(LpError::NumericalFailure(format!(
                        "complementary slackness violated on row {i}"
                    )));
                }
            }
        }
        dual_obj = dual_obj + sol.duals[i].clone() * row.rhs.clone();
    }
    // Dual feasibility against structural columns, with upper-bound duals
    // implicit: a variable at its upper bound may have positive reduced
    // cost; interior variables must have reduced cost ~0, variables at
    // zero reduced cost <= 0.
    for j in 0..problem.num_vars {
        let mut rc = problem.objective[j].clone();
        for (i, row) in problem.rows.iter().enumerate() {
            for (var, c) in &row.coeffs {
                if *var == j {
                    rc = rc - sol.duals[i].clone() * c.clone();
                }
            }
        }
        let at_upper = matches!(
            &problem.upper_bounds[j],
            Some(u) if (u.clone() - sol.primal[j].clone()).abs() <= scale(u)
        );
        if at_upper {
            // Bound dual picks up the remainder; contributes rc * u to the dual objective.
            if rc > T::zero() {
                dual_obj = dual_obj
                    + rc.clone() * problem.upper_bounds[j].clone().expect("at_upper");
            }
            continue;
        }
        if rc > scale(&problem.objective[j]) {
            return Err(LpError::NumericalFailure(format!("dual infeasible at column {j}")));
        }
        if sol.primal[j] > scale(&T::zero()) && rc.abs() > scale(&problem.objective[j]) {
            return Err(LpError::NumericalFailure(format!(
                "complementary slackness violated at column {j}"
            )));
        }
    }
    let gap = (sol.objective.clone() - dual_obj).abs();
    if gap > scale(&sol.objective) {
        return Err(LpError::NumericalFailure("strong duality gap".into()));
    }
    Ok(())
}

/// Default relative tolerance for float-mode solves.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat_int, Rat};
    use num_traits::Zero;

    #[test]
    fn single_variable_with_bound_row() {
        // maximize x s.t. x <= 3
        let mut p = LpProblem::new(1);
        p.set_objective(0, 1.0);
        p.add_row(RowKind::Le, 3.0, vec![(0, 1.0)]);
        let s = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 3.0).abs() < 1e-9);
        assert!((s.duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbounded_without_rows() {
        let mut p = LpProblem::new(1);
        p.set_objective(0, 1.0);
        let s = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn two_variable_vertex_optimum() {
        // maximize 2x+3y s.t. x+y <= 4, x+3y <= 6. Vertices: (0,0), (4,0),
        // (0,2), (3,1); objective 9 at (3,1) beats 8, 6, 0.
        let mut p = LpProblem::new(2);
        p.set_objective(0, 2.0);
        p.set_objective(1, 3.0);
        p.add_row(RowKind::Le, 4.0, vec![(0, 1.0), (1, 1.0)]);
        p.add_row(RowKind::Le, 6.0, vec![(0, 1.0), (1, 3.0)]);
        let s = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 9.0).abs() < 1e-9);
        assert!((s.primal[0] - 3.0).abs() < 1e-9);
        assert!((s.primal[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_equalities() {
        let mut p = LpProblem::new(1);
        p.add_row(RowKind::Eq, 1.0, vec![(0, 1.0)]);
        p.add_row(RowKind::Eq, 2.0, vec![(0, 1.0)]);
        let s = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_row_with_upper_bounds() {
        // maximize x + 2y s.t. x + y = 2, x,y <= 1.5 -> (0.5, 1.5), obj 3.5
        let mut p = LpProblem::new(2);
        p.set_objective(0, 1.0);
        p.set_objective(1, 2.0);
        p.set_upper_bound(0, 1.5);
        p.set_upper_bound(1, 1.5);
        p.add_row(RowKind::Eq, 2.0, vec![(0, 1.0), (1, 1.0)]);
        let s = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.5).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_le_row() {
        // maximize -x s.t. -x <= -2 (i.e. x >= 2) -> x = 2, obj -2.
        let mut p = LpProblem::new(1);
        p.set_objective(0, -1.0);
        p.add_row(RowKind::Le, -2.0, vec![(0, -1.0)]);
        let s = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.primal[0] - 2.0).abs() < 1e-9);
        // Original LE row keeps a nonnegative dual under maximization.
        assert!(s.duals[0] >= -1e-9);
    }

    #[test]
    fn exact_rational_mode() {
        let mut p: LpProblem<Rat> = LpProblem::new(2);
        p.set_objective(0, rat_int(2));
        p.set_objective(1, rat_int(3));
        p.add_row(RowKind::Le, rat_int(4), vec![(0, rat_int(1)), (1, rat_int(1))]);
        p.add_row(RowKind::Le, rat_int(6), vec![(0, rat_int(1)), (1, rat_int(3))]);
        let s = solve_lp(&p, Rat::zero()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, rat_int(9));
        assert_eq!(s.primal, vec![rat_int(3), rat_int(1)]);
    }

    #[test]
    fn basic_solution_property() {
        // Number of variables strictly between bounds <= number of rows.
        let mut p = LpProblem::new(4);
        for j in 0..4 {
            p.set_objective(j, 1.0 + j as f64);
        }
        p.add_row(RowKind::Le, 2.0, vec![(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)]);
        p.add_row(RowKind::Le, 1.5, vec![(1, 1.0), (3, 1.0)]);
        let s = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        let interior = s.primal.iter().filter(|&&x| x > 1e-9).count();
        assert!(interior <= 2, "basic point has at most one interior var per row");
    }

    #[test]
    fn determinism() {
        let mut p = LpProblem::new(3);
        for j in 0..3 {
            p.set_objective(j, 1.0);
        }
        p.add_row(RowKind::Le, 1.0, vec![(0, 1.0), (1, 1.0)]);
        p.add_row(RowKind::Le, 1.0, vec![(1, 1.0), (2, 1.0)]);
        let a = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        let b = solve_lp(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(a.primal, b.primal);
        assert_eq!(a.duals, b.duals);
    }
}

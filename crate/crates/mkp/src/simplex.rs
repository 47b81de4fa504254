//! LP relaxation of the multistage knapsack ILP and an exact rational
//! simplex solver returning basic (vertex) optima.
//!
//! The model has `T*n` selection variables `x_ti` followed by `(T-1)*n`
//! stability variables `z_ti`, all boxed in `[0, 1]`. Constraints are the
//! `T` capacity rows and, per `(t, i)`, the two linearization rows
//! `z_ti - x_(t+1)i + x_ti <= 1` and `z_ti + x_(t+1)i - x_ti <= 1`.
//!
//! Everything is exact rational arithmetic: "basic" and "fractional" are
//! tested with equality, never with a tolerance.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::Instance;

pub type Rat = BigRational;

pub fn rat(v: u64) -> Rat {
    Rat::from_integer(v.into())
}

/// Dense explicit encoding of the LP relaxation: maximize `objective . v`
/// subject to `row . v <= rhs` for each constraint and per-variable box
/// bounds.
#[derive(Debug, Clone)]
pub struct LpModel {
    /// Horizon and object count, fixing the variable order.
    pub num_steps: usize,
    pub num_objects: usize,
    pub objective: Vec<Rat>,
    /// Constraint rows as (coefficients, right-hand side), all `<=`.
    pub constraints: Vec<(Vec<Rat>, Rat)>,
    /// Inclusive `[lower, upper]` bounds per variable.
    pub bounds: Vec<(Rat, Rat)>,
}

impl LpModel {
    pub fn num_vars(&self) -> usize {
        self.num_steps * self.num_objects + (self.num_steps - 1) * self.num_objects
    }

    /// Column of `x_ti`.
    pub fn x_var(&self, t: usize, i: usize) -> usize {
        t * self.num_objects + i
    }

    /// Column of `z_ti` (bonus between steps `t` and `t + 1`).
    pub fn z_var(&self, t: usize, i: usize) -> usize {
        self.num_steps * self.num_objects + t * self.num_objects + i
    }

    /// Render the model in LP text format for cross-checking with
    /// external solvers.
    pub fn to_lp_text(&self) -> String {
        use std::fmt::Write;
        let name = |j: usize| {
            let n = self.num_objects;
            if j < self.num_steps * n {
                format!("x_{}_{}", j / n + 1, j % n + 1)
            } else {
                let j = j - self.num_steps * n;
                format!("z_{}_{}", j / n + 1, j % n + 1)
            }
        };
        let mut out = String::from("Maximize\n obj:");
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                write!(out, " + {} {}", c, name(j)).unwrap();
            }
        }
        out.push_str("\nSubject To\n");
        for (r, (row, rhs)) in self.constraints.iter().enumerate() {
            write!(out, " c{}:", r + 1).unwrap();
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    write!(out, " + {} {}", c, name(j)).unwrap();
                }
            }
            writeln!(out, " <= {}", rhs).unwrap();
        }
        out.push_str("Bounds\n");
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            writeln!(out, " {} <= {} <= {}", lo, name(j), hi).unwrap();
        }
        out.push_str("End\n");
        out
    }
}

/// Build the LP relaxation for an instance. Variables listed in
/// `fixed_zero` (as `(t, i)` pairs for `x_ti`) get bounds `[0, 0]`;
/// `extra_capacity`, when given, replaces the instance capacities.
pub fn build_lp(
    inst: &Instance,
    fixed_zero: &BTreeSet<(usize, usize)>,
    extra_capacity: Option<&[u64]>,
) -> Result<LpModel> {
    let (t_len, n) = (inst.num_steps(), inst.num_objects());
    for &(t, i) in fixed_zero {
        if t >= t_len || i >= n {
            return Err(Error::IndexOutOfRange(format!(
                "fixed variable ({t}, {i}) outside {t_len} x {n}"
            )));
        }
    }
    let capacities: Vec<u64> = match extra_capacity {
        Some(c) => {
            if c.len() != t_len {
                return Err(Error::Dimension(format!(
                    "capacity override has {} entries, expected {}",
                    c.len(),
                    t_len
                )));
            }
            c.to_vec()
        }
        None => inst.capacities().to_vec(),
    };

    let num_vars = t_len * n + (t_len - 1) * n;
    let mut model = LpModel {
        num_steps: t_len,
        num_objects: n,
        objective: vec![Rat::zero(); num_vars],
        constraints: Vec::with_capacity(t_len + 2 * (t_len - 1) * n),
        bounds: vec![(Rat::zero(), Rat::one()); num_vars],
    };
    for t in 0..t_len {
        for i in 0..n {
            let j = model.x_var(t, i);
            model.objective[j] = rat(inst.profit(t, i));
        }
    }
    for t in 0..t_len - 1 {
        for i in 0..n {
            let j = model.z_var(t, i);
            model.objective[j] = rat(inst.bonus(t, i));
        }
    }
    for t in 0..t_len {
        let mut row = vec![Rat::zero(); num_vars];
        for i in 0..n {
            row[model.x_var(t, i)] = rat(inst.weight(t, i));
        }
        model.constraints.push((row, rat(capacities[t])));
    }
    // z_ti - x_(t+1)i + x_ti <= 1  and  z_ti + x_(t+1)i - x_ti <= 1
    for t in 0..t_len - 1 {
        for i in 0..n {
            for sign in [1i32, -1] {
                let mut row = vec![Rat::zero(); num_vars];
                row[model.z_var(t, i)] = Rat::one();
                row[model.x_var(t + 1, i)] = Rat::from_integer((-sign).into());
                row[model.x_var(t, i)] = Rat::from_integer(sign.into());
                model.constraints.push((row, Rat::one()));
            }
        }
    }
    for &(t, i) in fixed_zero {
        let j = model.x_var(t, i);
        model.bounds[j] = (Rat::zero(), Rat::zero());
    }
    Ok(model)
}

/// A solution of the LP relaxation in exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalSolution {
    pub x: Vec<Vec<Rat>>,
    pub z: Vec<Vec<Rat>>,
    pub objective_value: Rat,
    /// True when the solution is a vertex of the feasible polyhedron.
    pub is_basic: bool,
}

impl FractionalSolution {
    /// Reward of object `i`: its profit and bonus mass in this solution.
    pub fn object_reward(&self, inst: &Instance, i: usize) -> Rat {
        let mut g = Rat::zero();
        for t in 0..inst.num_steps() {
            g += rat(inst.profit(t, i)) * &self.x[t][i];
        }
        for t in 0..inst.num_steps() - 1 {
            g += rat(inst.bonus(t, i)) * &self.z[t][i];
        }
        g
    }
}

enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Bounds {
    lower: Rat,
    upper: Option<Rat>,
}

/// Bounded-variable primal simplex, maximizing. Bland's rule everywhere:
/// the entering variable is the lowest-index improving candidate and row
/// ties in the ratio test go to the lowest-index basic variable, so the
/// method cannot cycle and the returned vertex is reproducible. The
/// initial basis is all-slack with every structural variable at its
/// lower bound.
struct Simplex {
    num_structural: usize,
    num_rows: usize,
    bounds: Vec<Bounds>,
    /// num_rows x (num_structural + num_rows); starts as [A | I] and is
    /// kept equal to B^-1 [A | I].
    tableau: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    /// Current values of basic variables, row by row.
    basic_vals: Vec<Rat>,
    /// Reduced costs for all columns.
    reduced: Vec<Rat>,
}

impl Simplex {
    fn new(model: &LpModel) -> Self {
        let ns = model.num_vars();
        let m = model.constraints.len();
        let mut bounds: Vec<Bounds> = model
            .bounds
            .iter()
            .map(|(lo, hi)| Bounds {
                lower: lo.clone(),
                upper: Some(hi.clone()),
            })
            .collect();
        bounds.extend((0..m).map(|_| Bounds {
            lower: Rat::zero(),
            upper: None,
        }));

        let mut tableau = vec![vec![Rat::zero(); ns + m]; m];
        for (r, (row, _)) in model.constraints.iter().enumerate() {
            tableau[r][..ns].clone_from_slice(row);
            tableau[r][ns + r] = Rat::one();
        }
        let mut state: Vec<VarState> = (0..ns).map(|_| VarState::AtLower).collect();
        let mut basis = Vec::with_capacity(m);
        for r in 0..m {
            state.push(VarState::Basic(r));
            basis.push(ns + r);
        }
        // Structural lower bounds may be nonzero in principle; fold them
        // into the initial basic values.
        let mut basic_vals: Vec<Rat> = model.constraints.iter().map(|(_, b)| b.clone()).collect();
        for j in 0..ns {
            if !bounds[j].lower.is_zero() {
                for r in 0..m {
                    let adj = &tableau[r][j] * &bounds[j].lower;
                    basic_vals[r] -= adj;
                }
            }
        }
        let mut reduced = vec![Rat::zero(); ns + m];
        reduced[..ns].clone_from_slice(&model.objective);
        Simplex {
            num_structural: ns,
            num_rows: m,
            bounds,
            tableau,
            basis,
            state,
            basic_vals,
            reduced,
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        match &self.bounds[j].upper {
            Some(u) => *u == self.bounds[j].lower,
            None => false,
        }
    }

    fn entering(&self) -> Option<usize> {
        (0..self.num_structural + self.num_rows).find(|&j| match self.state[j] {
            VarState::AtLower => !self.is_fixed(j) && self.reduced[j].is_positive(),
            VarState::AtUpper => self.reduced[j].is_negative(),
            VarState::Basic(_) => false,
        })
    }

    fn solve(&mut self) -> Result<()> {
        while let Some(j) = self.entering() {
            self.pivot_step(j)?;
        }
        Ok(())
    }

    /// One iteration with entering column `j`: either a bound flip or a
    /// basis exchange.
    fn pivot_step(&mut self, j: usize) -> Result<()> {
        // Entering variable moves by `step >= 0` in direction `dir`.
        let dir: i32 = match self.state[j] {
            VarState::AtLower => 1,
            VarState::AtUpper => -1,
            VarState::Basic(_) => unreachable!(),
        };
        // Basic variable in row r changes at rate -dir * alpha_r per unit.
        let mut best: Option<(Rat, usize)> = None; // (step limit, leaving row)
        for r in 0..self.num_rows {
            let alpha = &self.tableau[r][j];
            if alpha.is_zero() {
                continue;
            }
            let decreasing = if dir == 1 {
                alpha.is_positive()
            } else {
                alpha.is_negative()
            };
            let b = self.basis[r];
            let limit = if decreasing {
                (&self.basic_vals[r] - &self.bounds[b].lower) / alpha.abs()
            } else {
                match &self.bounds[b].upper {
                    Some(u) => (u - &self.basic_vals[r]) / alpha.abs(),
                    None => continue,
                }
            };
            let replace = match &best {
                None => true,
                Some((t, row)) => limit < *t || (limit == *t && self.basis[r] < self.basis[*row]),
            };
            if replace {
                best = Some((limit, r));
            }
        }
        let span = self
            .bounds[j]
            .upper
            .as_ref()
            .map(|u| u - &self.bounds[j].lower);

        match (best, span) {
            (None, None) => Err(Error::Unbounded),
            (None, Some(span)) => {
                self.apply_step(j, dir, &span);
                self.state[j] = match dir {
                    1 => VarState::AtUpper,
                    _ => VarState::AtLower,
                };
                Ok(())
            }
            (Some((limit, row)), span) => {
                if let Some(span) = span {
                    if span <= limit {
                        self.apply_step(j, dir, &span);
                        self.state[j] = match dir {
                            1 => VarState::AtUpper,
                            _ => VarState::AtLower,
                        };
                        return Ok(());
                    }
                }
                self.apply_step(j, dir, &limit);
                self.exchange(j, dir, row, &limit);
                Ok(())
            }
        }
    }

    /// Move the entering variable by `dir * step`, updating basic values.
    fn apply_step(&mut self, j: usize, dir: i32, step: &Rat) {
        if step.is_zero() {
            return;
        }
        for r in 0..self.num_rows {
            let alpha = &self.tableau[r][j];
            if alpha.is_zero() {
                continue;
            }
            let delta = alpha * step;
            if dir == 1 {
                self.basic_vals[r] -= delta;
            } else {
                self.basic_vals[r] += delta;
            }
        }
    }

    /// Exchange: variable `j` becomes basic in `row`; the old basic
    /// variable leaves at the bound it just reached.
    fn exchange(&mut self, j: usize, dir: i32, row: usize, step: &Rat) {
        let leaving = self.basis[row];
        let alpha = self.tableau[row][j].clone();
        let leaves_to_lower = if dir == 1 {
            alpha.is_positive()
        } else {
            alpha.is_negative()
        };
        self.state[leaving] = if leaves_to_lower {
            VarState::AtLower
        } else {
            VarState::AtUpper
        };

        let base = match self.state[j] {
            VarState::AtLower => self.bounds[j].lower.clone(),
            VarState::AtUpper => self.bounds[j].upper.clone().unwrap(),
            VarState::Basic(_) => unreachable!(),
        };
        let entering_val = if dir == 1 { base + step } else { base - step };
        self.basis[row] = j;
        self.state[j] = VarState::Basic(row);
        self.basic_vals[row] = entering_val;

        // Eliminate column j everywhere else.
        let pivot_row: Vec<Rat> = self.tableau[row]
            .iter()
            .map(|v| v / &alpha)
            .collect();
        for r in 0..self.num_rows {
            if r == row {
                continue;
            }
            let factor = self.tableau[r][j].clone();
            if factor.is_zero() {
                continue;
            }
            for c in 0..pivot_row.len() {
                if !pivot_row[c].is_zero() {
                    let adj = &pivot_row[c] * &factor;
                    self.tableau[r][c] -= adj;
                }
            }
        }
        let factor = self.reduced[j].clone();
        if !factor.is_zero() {
            for c in 0..pivot_row.len() {
                if !pivot_row[c].is_zero() {
                    let adj = &pivot_row[c] * &factor;
                    self.reduced[c] -= adj;
                }
            }
        }
        self.tableau[row] = pivot_row;
    }

    fn value_of(&self, j: usize) -> Rat {
        match self.state[j] {
            VarState::Basic(r) => self.basic_vals[r].clone(),
            VarState::AtLower => self.bounds[j].lower.clone(),
            VarState::AtUpper => self.bounds[j].upper.clone().unwrap(),
        }
    }
}

/// Solve the model to a basic optimal solution.
pub fn solve_basic(model: &LpModel) -> Result<FractionalSolution> {
    for (j, (lo, hi)) in model.bounds.iter().enumerate() {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "variable {j} has empty bound range [{lo}, {hi}]"
            )));
        }
    }
    let mut s = Simplex::new(model);
    s.solve()?;
    let (t_len, n) = (model.num_steps, model.num_objects);
    let x: Vec<Vec<Rat>> = (0..t_len)
        .map(|t| (0..n).map(|i| s.value_of(model.x_var(t, i))).collect())
        .collect();
    let z: Vec<Vec<Rat>> = (0..t_len - 1)
        .map(|t| (0..n).map(|i| s.value_of(model.z_var(t, i))).collect())
        .collect();
    let mut objective_value = Rat::zero();
    for t in 0..t_len {
        for i in 0..n {
            objective_value += &model.objective[model.x_var(t, i)] * &x[t][i];
        }
    }
    for t in 0..t_len - 1 {
        for i in 0..n {
            objective_value += &model.objective[model.z_var(t, i)] * &z[t][i];
        }
    }
    Ok(FractionalSolution {
        x,
        z,
        objective_value,
        is_basic: true,
    })
}

/// Rewrite every `z_ti` to `1 - |x_(t+1)i - x_ti|`, its best feasible
/// value, and recompute the objective against the instance data. The
/// solver may leave z slack when its bonus coefficient is zero; counting
/// fractional objects requires this normal form first.
pub fn normalize_z(inst: &Instance, sol: &FractionalSolution) -> FractionalSolution {
    let (t_len, n) = (inst.num_steps(), inst.num_objects());
    let z: Vec<Vec<Rat>> = (0..t_len - 1)
        .map(|t| {
            (0..n)
                .map(|i| Rat::one() - (&sol.x[t + 1][i] - &sol.x[t][i]).abs())
                .collect()
        })
        .collect();
    let mut objective_value = Rat::zero();
    for t in 0..t_len {
        for i in 0..n {
            objective_value += rat(inst.profit(t, i)) * &sol.x[t][i];
        }
    }
    for t in 0..t_len - 1 {
        for i in 0..n {
            objective_value += rat(inst.bonus(t, i)) * &z[t][i];
        }
    }
    FractionalSolution {
        x: sol.x.clone(),
        z,
        objective_value,
        is_basic: sol.is_basic,
    }
}

fn is_fractional(v: &Rat) -> bool {
    !v.is_integer()
}

/// Objects with at least one strictly fractional `x` or `z` value.
/// Callers must normalize z first.
pub fn count_fractional_objects(sol: &FractionalSolution) -> (usize, BTreeSet<usize>) {
    let n = sol.x.first().map_or(0, |row| row.len());
    let mut fractional = BTreeSet::new();
    for i in 0..n {
        let frac_x = sol.x.iter().any(|row| is_fractional(&row[i]));
        let frac_z = sol.z.iter().any(|row| is_fractional(&row[i]));
        if frac_x || frac_z {
            fractional.insert(i);
        }
    }
    (fractional.len(), fractional)
}

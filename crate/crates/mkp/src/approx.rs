//! Approximation machinery: LP rounding with its exact loss bound, a
//! `(1 - eps)` scheme for a constant horizon built on guessing the
//! highest-reward objects, and the composition over shifted interval
//! partitions that extends it to arbitrary horizons.

use std::collections::BTreeSet;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::exact::{dp_solve, DEFAULT_DP_TABLE_GUARD};
use crate::model::{evaluate, trajectory_reward, Instance, Schedule};
use crate::simplex::{build_lp, normalize_z, solve_basic, FractionalSolution};

/// Accuracy parameter, kept rational so guarantee checks stay exact.
pub type Epsilon = Ratio<u64>;

/// Default cap on `C(n, l) * 2^(l T)` guess-loop units.
pub const DEFAULT_WORK_GUARD: u128 = 1_000_000_000;

#[derive(Debug, Clone)]
pub struct PtasParams {
    pub work_guard: u128,
    /// Replace the guess size from the accuracy formula, for diagnostics
    /// and for exercising the guessing path at desk scale. The stated
    /// approximation guarantee only applies to the formula value.
    pub ell_override: Option<usize>,
    pub dp_table_guard: u128,
}

impl Default for PtasParams {
    fn default() -> Self {
        Self {
            work_guard: DEFAULT_WORK_GUARD,
            ell_override: None,
            dp_table_guard: DEFAULT_DP_TABLE_GUARD,
        }
    }
}

/// Outcome of a scheme run, with effort counters.
#[derive(Debug, Clone)]
pub struct PtasReport {
    pub best_schedule: Schedule,
    pub value: u64,
    pub epsilon: Epsilon,
    pub ell: usize,
    pub assignments_examined: u64,
    pub lp_solves: u64,
}

/// Guess size `l = min(ceil((T+1) T^3 / eps), n)`.
pub fn guess_size(t_len: usize, n: usize, epsilon: Epsilon) -> usize {
    let t = t_len as u128;
    let numer = (t + 1) * t * t * t * *epsilon.denom() as u128;
    let denom = *epsilon.numer() as u128;
    let ell = numer.div_ceil(denom);
    ell.min(n as u128) as usize
}

/// Round a basic optimal LP solution down to the integral part: solve
/// the relaxation (with the given fixings and capacity override), set
/// z to its normal form, and keep exactly the variables at 1.
///
/// The integral objects keep their full reward, so the rounded value is
/// at least the LP optimum minus the rewards of the fractional objects.
pub fn round_lp(
    inst: &Instance,
    fixed_zero: &BTreeSet<(usize, usize)>,
    capacities: Option<&[u64]>,
) -> Result<(Schedule, FractionalSolution)> {
    let model = build_lp(inst, fixed_zero, capacities)?;
    let sol = solve_basic(&model)?;
    let sol = normalize_z(inst, &sol);
    let mut sched = Schedule::empty(inst.num_steps(), inst.num_objects());
    let one = num_rational::BigRational::from_integer(1.into());
    for t in 0..inst.num_steps() {
        for i in 0..inst.num_objects() {
            if sol.x[t][i] == one {
                sched.set(t, i, true);
            }
        }
    }
    Ok((sched, sol))
}

struct GuessLoop {
    n: usize,
    ell: usize,
}

impl GuessLoop {
    /// `C(n, l) * 2^(l * T)`, saturating.
    fn work_estimate(&self, t_len: usize) -> u128 {
        let mut choose: u128 = 1;
        for k in 0..self.ell {
            choose = choose.saturating_mul((self.n - k) as u128);
            choose /= (k + 1) as u128;
        }
        let bits = (self.ell * t_len) as u32;
        if bits >= 127 {
            return u128::MAX;
        }
        choose.saturating_mul(1u128 << bits)
    }
}

fn first_combination(ell: usize) -> Vec<usize> {
    (0..ell).collect()
}

/// Advance an ascending index combination in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let ell = combo.len();
    for pos in (0..ell).rev() {
        if combo[pos] < n - (ell - pos) {
            combo[pos] += 1;
            for p in pos + 1..ell {
                combo[p] = combo[p - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The constant-horizon scheme: guess the `l` objects of highest reward
/// in an optimal solution together with their full temporal assignment,
/// drop too-profitable decisions on the rest, and round the residual LP.
pub fn ptas_constant(inst: &Instance, epsilon: Epsilon) -> Result<PtasReport> {
    ptas_constant_with(inst, epsilon, &PtasParams::default())
}

pub fn ptas_constant_with(
    inst: &Instance,
    epsilon: Epsilon,
    params: &PtasParams,
) -> Result<PtasReport> {
    if epsilon <= Epsilon::new(0, 1) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let (t_len, n) = (inst.num_steps(), inst.num_objects());
    let ell = params
        .ell_override
        .unwrap_or_else(|| guess_size(t_len, n, epsilon))
        .min(n);

    let mut report = PtasReport {
        best_schedule: Schedule::empty(t_len, n),
        value: evaluate(inst, &Schedule::empty(t_len, n))?.total,
        epsilon,
        ell,
        assignments_examined: 0,
        lp_solves: 0,
    };
    if n == 0 {
        return Ok(report);
    }

    let work = GuessLoop { n, ell }.work_estimate(t_len);
    if work > params.work_guard {
        return Err(Error::GuardExceeded {
            what: "guess loop",
            estimate: work,
            limit: params.work_guard,
        });
    }

    let mut best: Option<(u64, Schedule)> = None;
    let mut combo = first_combination(ell);
    loop {
        let x_set = combo.clone();
        let y_set: Vec<usize> = (0..n).filter(|i| !x_set.contains(i)).collect();
        let sub_y = inst.object_subset(&y_set)?;

        // Trajectory rewards of the guessed objects, all 2^T masks.
        let masks = 1u32 << t_len;
        let reward: Vec<Vec<u64>> = x_set
            .iter()
            .map(|&i| (0..masks).map(|m| trajectory_reward(inst, i, m)).collect())
            .collect();

        // Objects of X taken per step, encoded as one counter: bit
        // block t holds the step-t subset of X, in binary-counter order.
        let total_assignments: u128 = 1u128 << (ell * t_len);
        let mut assignment: u128 = 0;
        while assignment < total_assignments {
            report.assignments_examined += 1;
            let step_mask =
                |t: usize| -> u64 { (assignment >> (t * ell)) as u64 & ((1u64 << ell) - 1) };
            let admitted = (0..t_len).all(|t| {
                let load: u128 = x_set
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| step_mask(t) >> k & 1 == 1)
                    .map(|(_, &i)| inst.weight(t, i) as u128)
                    .sum();
                load <= inst.capacity(t) as u128
            });
            if admitted {
                // Smallest reward among the guessed objects, under their
                // guessed trajectories alone.
                let g_min = x_set
                    .iter()
                    .enumerate()
                    .map(|(k, _)| {
                        let mut traj = 0u32;
                        for t in 0..t_len {
                            if step_mask(t) >> k & 1 == 1 {
                                traj |= 1 << t;
                            }
                        }
                        reward[k][traj as usize]
                    })
                    .min();

                let residual: Vec<u64> = (0..t_len)
                    .map(|t| {
                        let load: u64 = x_set
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| step_mask(t) >> k & 1 == 1)
                            .map(|(_, &i)| inst.weight(t, i))
                            .sum();
                        inst.capacity(t) - load
                    })
                    .collect();

                let sched_y = if y_set.is_empty() {
                    Schedule::empty(t_len, 0)
                } else {
                    let mut fixed = BTreeSet::new();
                    if let Some(g_min) = g_min {
                        for t in 0..t_len {
                            for (j, &i) in y_set.iter().enumerate() {
                                if inst.profit(t, i) > g_min {
                                    fixed.insert((t, j));
                                }
                            }
                        }
                    }
                    report.lp_solves += 1;
                    round_lp(&sub_y, &fixed, Some(&residual))?.0
                };

                let mut sched = Schedule::empty(t_len, n);
                for t in 0..t_len {
                    for (k, &i) in x_set.iter().enumerate() {
                        if step_mask(t) >> k & 1 == 1 {
                            sched.set(t, i, true);
                        }
                    }
                    for (j, &i) in y_set.iter().enumerate() {
                        if sched_y.taken(t, j) {
                            sched.set(t, i, true);
                        }
                    }
                }
                let value = evaluate(inst, &sched)?.total;
                if best.as_ref().is_none_or(|(v, _)| value > *v) {
                    best = Some((value, sched));
                }
            }
            assignment += 1;
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    if let Some((value, sched)) = best {
        if value > report.value {
            report.value = value;
            report.best_schedule = sched;
        }
    }
    Ok(report)
}

/// Which solver handles each bounded-horizon interval in the
/// composition scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    /// The constant-horizon scheme at accuracy `eps / 2`.
    PtasConstant,
    /// The exact DP; valid since any exact solver is in particular a
    /// `(1 - eps)`-approximation on an interval.
    DpSolve,
}

/// Number of candidate partitions `T0 = ceil(2 / eps)`.
pub fn horizon_block(epsilon: Epsilon) -> usize {
    (2 * *epsilon.denom() as u128).div_ceil(*epsilon.numer() as u128) as usize
}

/// Intervals (inclusive 0-indexed) of the partition at `offset` in
/// `1..=t0`: a stub `[0, offset - 2]` when `offset > 1`, then blocks of
/// `t0` steps starting at `offset - 1`.
pub fn interval_partition(t_len: usize, t0: usize, offset: usize) -> Vec<(usize, usize)> {
    assert!(t0 >= 1 && (1..=t0).contains(&offset));
    let mut parts = Vec::new();
    if offset > 1 {
        parts.push((0, (offset - 2).min(t_len - 1)));
    }
    let mut start = offset - 1;
    while start < t_len {
        parts.push((start, (start + t0 - 1).min(t_len - 1)));
        start += t0;
    }
    parts
}

/// The general scheme: for each of the `T0` shifted partitions, solve
/// every interval independently (cross-boundary bonuses dropped from
/// the subproblems), concatenate, and keep the candidate whose true
/// full-horizon value is best.
pub fn ptas_general(
    inst: &Instance,
    epsilon: Epsilon,
    inner: InnerSolver,
) -> Result<PtasReport> {
    ptas_general_with(inst, epsilon, inner, &PtasParams::default())
}

pub fn ptas_general_with(
    inst: &Instance,
    epsilon: Epsilon,
    inner: InnerSolver,
    params: &PtasParams,
) -> Result<PtasReport> {
    if epsilon <= Epsilon::new(0, 1) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let eps_inner = epsilon / 2;
    let t0 = horizon_block(epsilon);
    let (t_len, n) = (inst.num_steps(), inst.num_objects());

    let mut report = PtasReport {
        best_schedule: Schedule::empty(t_len, n),
        value: evaluate(inst, &Schedule::empty(t_len, n))?.total,
        epsilon,
        ell: 0,
        assignments_examined: 0,
        lp_solves: 0,
    };
    let mut best: Option<(u64, Schedule)> = None;
    for offset in 1..=t0.min(t_len) {
        let mut sched = Schedule::empty(t_len, n);
        for (start, end) in interval_partition(t_len, t0, offset) {
            let slice = inst.time_slice(start, end)?;
            let part = match inner {
                InnerSolver::PtasConstant => {
                    let r = ptas_constant_with(&slice, eps_inner, params)?;
                    report.assignments_examined += r.assignments_examined;
                    report.lp_solves += r.lp_solves;
                    report.ell = report.ell.max(r.ell);
                    r.best_schedule
                }
                InnerSolver::DpSolve => dp_solve(&slice, params.dp_table_guard)?.0,
            };
            for (row, t) in (start..=end).enumerate() {
                for i in 0..n {
                    sched.set(t, i, part.taken(row, i));
                }
            }
        }
        // Boundary bonuses count here even though the subproblems never
        // saw them.
        let value = evaluate(inst, &sched)?.total;
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, sched));
        }
    }
    if let Some((value, sched)) = best {
        if value >= report.value {
            report.value = value;
            report.best_schedule = sched;
        }
    }
    Ok(report)
}

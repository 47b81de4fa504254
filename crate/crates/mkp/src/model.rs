//! Problem data model: instances, schedules, and objective evaluation.
//!
//! An instance spans `T` time steps over `n` objects. Each step is a
//! knapsack (profits `p`, weights `w`, capacity `C`); between consecutive
//! steps an object earns its bonus `B` when its in/out decision is
//! unchanged. All data are non-negative integers.

use crate::error::{Error, Result};

/// A multistage knapsack instance.
///
/// Matrices are row-major over time: `profits[t][i]` is the profit of
/// object `i` at step `t` (0-indexed). `bonuses` has `T - 1` rows;
/// `bonuses[t][i]` applies between steps `t` and `t + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    t: usize,
    n: usize,
    profits: Vec<Vec<u64>>,
    weights: Vec<Vec<u64>>,
    bonuses: Vec<Vec<u64>>,
    capacities: Vec<u64>,
}

impl Instance {
    pub fn new(
        profits: Vec<Vec<u64>>,
        weights: Vec<Vec<u64>>,
        bonuses: Vec<Vec<u64>>,
        capacities: Vec<u64>,
    ) -> Result<Self> {
        let t = capacities.len();
        if t == 0 {
            return Err(Error::Dimension("T must be at least 1".into()));
        }
        if profits.len() != t || weights.len() != t {
            return Err(Error::Dimension(format!(
                "expected {} profit/weight rows, got {}/{}",
                t,
                profits.len(),
                weights.len()
            )));
        }
        let n = profits[0].len();
        for (label, rows, want) in [
            ("profits", &profits, t),
            ("weights", &weights, t),
            ("bonuses", &bonuses, t - 1),
        ] {
            if rows.len() != want {
                return Err(Error::Dimension(format!(
                    "expected {} {} rows, got {}",
                    want,
                    label,
                    rows.len()
                )));
            }
            for (r, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::Dimension(format!(
                        "{} row {} has {} entries, expected {}",
                        label,
                        r,
                        row.len(),
                        n
                    )));
                }
            }
        }
        Ok(Self {
            t,
            n,
            profits,
            weights,
            bonuses,
            capacities,
        })
    }

    pub fn num_steps(&self) -> usize {
        self.t
    }

    pub fn num_objects(&self) -> usize {
        self.n
    }

    pub fn profit(&self, t: usize, i: usize) -> u64 {
        self.profits[t][i]
    }

    pub fn weight(&self, t: usize, i: usize) -> u64 {
        self.weights[t][i]
    }

    /// Bonus between steps `t` and `t + 1`; `t < T - 1`.
    pub fn bonus(&self, t: usize, i: usize) -> u64 {
        self.bonuses[t][i]
    }

    pub fn capacity(&self, t: usize) -> u64 {
        self.capacities[t]
    }

    pub fn profits(&self) -> &[Vec<u64>] {
        &self.profits
    }

    pub fn weights(&self) -> &[Vec<u64>] {
        &self.weights
    }

    pub fn bonuses(&self) -> &[Vec<u64>] {
        &self.bonuses
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacities
    }

    /// Restriction to a contiguous time window `[start, end]` (inclusive).
    /// Bonuses crossing the window boundary are dropped.
    pub fn time_slice(&self, start: usize, end: usize) -> Result<Instance> {
        if start > end || end >= self.t {
            return Err(Error::IndexOutOfRange(format!(
                "time slice [{start}, {end}] outside horizon of {} steps",
                self.t
            )));
        }
        Instance::new(
            self.profits[start..=end].to_vec(),
            self.weights[start..=end].to_vec(),
            self.bonuses[start..end].to_vec(),
            self.capacities[start..=end].to_vec(),
        )
    }

    /// Restriction to a subset of objects, given by ascending indices.
    pub fn object_subset(&self, objects: &[usize]) -> Result<Instance> {
        for &i in objects {
            if i >= self.n {
                return Err(Error::IndexOutOfRange(format!(
                    "object {i} out of range for n = {}",
                    self.n
                )));
            }
        }
        let pick = |rows: &[Vec<u64>]| {
            rows.iter()
                .map(|row| objects.iter().map(|&i| row[i]).collect())
                .collect()
        };
        Instance::new(
            pick(&self.profits),
            pick(&self.weights),
            pick(&self.bonuses),
            self.capacities.clone(),
        )
    }
}

/// An integral solution: `x[t][i]` is true iff object `i` is taken at step `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    x: Vec<Vec<bool>>,
}

impl Schedule {
    pub fn new(x: Vec<Vec<bool>>) -> Self {
        Self { x }
    }

    pub fn empty(t: usize, n: usize) -> Self {
        Self {
            x: vec![vec![false; n]; t],
        }
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.x
    }

    pub fn taken(&self, t: usize, i: usize) -> bool {
        self.x[t][i]
    }

    pub fn set(&mut self, t: usize, i: usize, v: bool) {
        self.x[t][i] = v;
    }

    fn check_dims(&self, inst: &Instance) -> Result<()> {
        if self.x.len() != inst.num_steps() {
            return Err(Error::Dimension(format!(
                "schedule has {} rows, instance has {} steps",
                self.x.len(),
                inst.num_steps()
            )));
        }
        for (t, row) in self.x.iter().enumerate() {
            if row.len() != inst.num_objects() {
                return Err(Error::Dimension(format!(
                    "schedule row {} has {} entries, instance has {} objects",
                    t,
                    row.len(),
                    inst.num_objects()
                )));
            }
        }
        Ok(())
    }
}

/// Exact decomposition of a schedule's value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveBreakdown {
    pub knapsack_profit: u64,
    pub transition_profit: u64,
    pub total: u64,
    pub per_object_reward: Vec<u64>,
}

fn narrow(v: u128, ctx: &'static str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::Overflow(ctx))
}

/// True iff every step's selected weight is within its capacity.
pub fn is_feasible(inst: &Instance, sched: &Schedule) -> Result<bool> {
    sched.check_dims(inst)?;
    for t in 0..inst.num_steps() {
        let load: u128 = (0..inst.num_objects())
            .filter(|&i| sched.taken(t, i))
            .map(|i| inst.weight(t, i) as u128)
            .sum();
        if load > inst.capacity(t) as u128 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Value of a schedule: per-step knapsack profits plus bonuses of objects
/// whose decision is unchanged between consecutive steps. Feasibility is
/// not required; callers gate on [`is_feasible`] separately.
pub fn evaluate(inst: &Instance, sched: &Schedule) -> Result<ObjectiveBreakdown> {
    sched.check_dims(inst)?;
    let (t_len, n) = (inst.num_steps(), inst.num_objects());
    let mut knapsack: u128 = 0;
    let mut transition: u128 = 0;
    let mut per_object = vec![0u128; n];
    for t in 0..t_len {
        for i in 0..n {
            if sched.taken(t, i) {
                knapsack += inst.profit(t, i) as u128;
                per_object[i] += inst.profit(t, i) as u128;
            }
        }
    }
    for t in 0..t_len.saturating_sub(1) {
        for i in 0..n {
            if sched.taken(t, i) == sched.taken(t + 1, i) {
                transition += inst.bonus(t, i) as u128;
                per_object[i] += inst.bonus(t, i) as u128;
            }
        }
    }
    let total = knapsack + transition;
    Ok(ObjectiveBreakdown {
        knapsack_profit: narrow(knapsack, "summing knapsack profit")?,
        transition_profit: narrow(transition, "summing transition profit")?,
        total: narrow(total, "summing objective")?,
        per_object_reward: per_object
            .into_iter()
            .map(|v| narrow(v, "summing per-object reward"))
            .collect::<Result<_>>()?,
    })
}

/// Reward of object `i` when taken exactly at the steps set in `mask`
/// (bit `t` = step `t`): profits at those steps plus every bonus whose
/// adjacent decisions agree.
pub fn trajectory_reward(inst: &Instance, i: usize, mask: u32) -> u64 {
    let t_len = inst.num_steps();
    let mut r = 0u64;
    for t in 0..t_len {
        if mask >> t & 1 == 1 {
            r += inst.profit(t, i);
        }
    }
    for t in 0..t_len - 1 {
        if (mask >> t & 1) == (mask >> (t + 1) & 1) {
            r += inst.bonus(t, i);
        }
    }
    r
}

/// Reward of a single object: its collected profits plus its collected bonuses.
pub fn object_reward(inst: &Instance, sched: &Schedule, i: usize) -> Result<u64> {
    sched.check_dims(inst)?;
    if i >= inst.num_objects() {
        return Err(Error::IndexOutOfRange(format!(
            "object {i} out of range for n = {}",
            inst.num_objects()
        )));
    }
    let mut reward: u128 = 0;
    for t in 0..inst.num_steps() {
        if sched.taken(t, i) {
            reward += inst.profit(t, i) as u128;
        }
    }
    for t in 0..inst.num_steps() - 1 {
        if sched.taken(t, i) == sched.taken(t + 1, i) {
            reward += inst.bonus(t, i) as u128;
        }
    }
    narrow(reward, "summing object reward")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst_1x2() -> Instance {
        // n = 1, T = 2, B_11 = 5
        Instance::new(
            vec![vec![0], vec![0]],
            vec![vec![1], vec![1]],
            vec![vec![5]],
            vec![1, 1],
        )
        .unwrap()
    }

    #[test]
    fn empty_schedule_is_feasible() {
        let inst = inst_1x2();
        let sched = Schedule::empty(2, 1);
        assert!(is_feasible(&inst, &sched).unwrap());
    }

    #[test]
    fn overweight_single_object_infeasible() {
        let inst = Instance::new(vec![vec![1]], vec![vec![2]], vec![], vec![1]).unwrap();
        let sched = Schedule::new(vec![vec![true]]);
        assert!(!is_feasible(&inst, &sched).unwrap());
    }

    #[test]
    fn untaken_object_earns_full_bonus() {
        let inst = inst_1x2();
        let sched = Schedule::empty(2, 1);
        let b = evaluate(&inst, &sched).unwrap();
        assert_eq!(b.total, 5);
        assert_eq!(b.knapsack_profit, 0);
        assert_eq!(b.transition_profit, 5);
    }

    #[test]
    fn two_kp_style_value() {
        // T = 2, unit profits, bonus 2 everywhere; taking K = 2 of n = 3
        // objects at both steps is worth 2K + 2n = 10.
        let n = 3;
        let inst = Instance::new(
            vec![vec![1; n], vec![1; n]],
            vec![vec![1; n], vec![1; n]],
            vec![vec![2; n]],
            vec![2, 2],
        )
        .unwrap();
        let mut sched = Schedule::empty(2, n);
        for t in 0..2 {
            sched.set(t, 0, true);
            sched.set(t, 1, true);
        }
        assert_eq!(evaluate(&inst, &sched).unwrap().total, 10);
    }

    #[test]
    fn object_reward_cases() {
        // never taken, zero profits, T = 2, B = 3 -> 3
        let inst = Instance::new(
            vec![vec![0], vec![0]],
            vec![vec![0], vec![0]],
            vec![vec![3]],
            vec![1, 1],
        )
        .unwrap();
        assert_eq!(object_reward(&inst, &Schedule::empty(2, 1), 0).unwrap(), 3);

        // taken at every step, p = 1, T = 3, B = 2 -> 3 + 4 = 7
        let inst = Instance::new(
            vec![vec![1], vec![1], vec![1]],
            vec![vec![0], vec![0], vec![0]],
            vec![vec![2], vec![2]],
            vec![1, 1, 1],
        )
        .unwrap();
        let sched = Schedule::new(vec![vec![true], vec![true], vec![true]]);
        assert_eq!(object_reward(&inst, &sched, 0).unwrap(), 7);

        // taken only at step 1 of T = 2, p_11 = 4, B = 2 -> decision flips, 4
        let inst = Instance::new(
            vec![vec![4], vec![0]],
            vec![vec![1], vec![1]],
            vec![vec![2]],
            vec![1, 1],
        )
        .unwrap();
        let sched = Schedule::new(vec![vec![true], vec![false]]);
        assert_eq!(object_reward(&inst, &sched, 0).unwrap(), 4);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let inst = inst_1x2();
        let sched = Schedule::empty(3, 1);
        assert!(is_feasible(&inst, &sched).is_err());
        assert!(evaluate(&inst, &sched).is_err());
    }

    #[test]
    fn reward_out_of_range_is_error() {
        let inst = inst_1x2();
        let sched = Schedule::empty(2, 1);
        assert!(object_reward(&inst, &sched, 1).is_err());
    }
}

//! Shared helpers for the integration suites: independent oracles and
//! corpus builders. Everything here recomputes from first principles and
//! never calls the code path it is used to check.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use mkp::model::{Instance, Schedule};
use mkp::reductions::{gen_random, CapacityRule, GenParams};
use mkp::simplex::LpModel;

pub type Rat = BigRational;

/// Independent re-summation of a schedule's value, term by term.
pub fn direct_value(inst: &Instance, sched: &Schedule) -> u64 {
    let mut total = 0u64;
    for t in 0..inst.num_steps() {
        for i in 0..inst.num_objects() {
            if sched.taken(t, i) {
                total += inst.profit(t, i);
            }
        }
    }
    for t in 0..inst.num_steps() - 1 {
        for i in 0..inst.num_objects() {
            if sched.taken(t, i) == sched.taken(t + 1, i) {
                total += inst.bonus(t, i);
            }
        }
    }
    total
}

/// Maximum independent set size by vertex-subset enumeration.
pub fn alpha_by_enumeration(num_vertices: usize, edges: &[(usize, usize)]) -> usize {
    let mut best = 0;
    for mask in 0u32..1 << num_vertices {
        if edges
            .iter()
            .any(|&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
        {
            continue;
        }
        best = best.max(mask.count_ones() as usize);
    }
    best
}

/// Largest object count satisfying both knapsack budgets, by subset
/// enumeration.
pub fn two_kp_opt(w1: &[u64], w2: &[u64], c1: u64, c2: u64) -> usize {
    let n = w1.len();
    let mut best = 0;
    for mask in 0u32..1 << n {
        let (mut l1, mut l2) = (0u64, 0u64);
        for i in 0..n {
            if mask >> i & 1 == 1 {
                l1 += w1[i];
                l2 += w2[i];
            }
        }
        if l1 <= c1 && l2 <= c2 {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

/// LP optimum by brute-force vertex enumeration: every choice of
/// linearly independent active constraints (structural rows or bound
/// equalities) is solved exactly; feasible solutions are scored.
/// Exponential, so only usable on models with a handful of variables.
pub fn lp_opt_by_vertex_enumeration(model: &LpModel) -> Option<Rat> {
    let nv = model.objective.len();
    // Candidate equalities: each constraint row, plus var = lower and
    // var = upper for each variable.
    let mut rows: Vec<(Vec<Rat>, Rat)> = model.constraints.clone();
    for j in 0..nv {
        let mut unit = vec![Rat::zero(); nv];
        unit[j] = Rat::one();
        rows.push((unit.clone(), model.bounds[j].0.clone()));
        rows.push((unit, model.bounds[j].1.clone()));
    }
    let mut best: Option<Rat> = None;
    let mut combo: Vec<usize> = (0..nv).collect();
    loop {
        let system: Vec<&(Vec<Rat>, Rat)> = combo.iter().map(|&r| &rows[r]).collect();
        if let Some(point) = solve_square(&system) {
            if is_lp_feasible(model, &point) {
                let value: Rat = point
                    .iter()
                    .zip(&model.objective)
                    .map(|(x, c)| x * c)
                    .sum();
                if best.as_ref().is_none_or(|b| value > *b) {
                    best = Some(value);
                }
            }
        }
        // next combination of nv rows out of rows.len()
        let m = rows.len();
        let mut pos = nv;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            if combo[pos] < m - (nv - pos) {
                combo[pos] += 1;
                for p in pos + 1..nv {
                    combo[p] = combo[p - 1] + 1;
                }
                break;
            }
        }
    }
}

fn solve_square(system: &[&(Vec<Rat>, Rat)]) -> Option<Vec<Rat>> {
    let n = system.len();
    let mut a: Vec<Vec<Rat>> = system.iter().map(|(row, _)| row.clone()).collect();
    let mut b: Vec<Rat> = system.iter().map(|(_, rhs)| rhs.clone()).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for c in col..n {
            a[col][c] = &a[col][c] / &p;
        }
        b[col] = &b[col] / &p;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in col..n {
                let adj = &a[col][c] * &f;
                a[r][c] -= adj;
            }
            let adj = &b[col] * &f;
            b[r] -= adj;
        }
    }
    Some(b)
}

fn is_lp_feasible(model: &LpModel, point: &[Rat]) -> bool {
    for (j, v) in point.iter().enumerate() {
        if *v < model.bounds[j].0 || *v > model.bounds[j].1 {
            return false;
        }
    }
    for (row, rhs) in &model.constraints {
        let lhs: Rat = row.iter().zip(point).map(|(c, x)| c * x).sum();
        if lhs > *rhs {
            return false;
        }
    }
    true
}

/// Seeded corpus entry with small dimensions suited to the exact solvers.
pub fn random_instance(seed: u64, n: usize, t: usize, hi: u64) -> Instance {
    gen_random(&GenParams {
        seed,
        n,
        t,
        weight_max: hi,
        profit_max: hi,
        bonus_max: hi,
        capacity_rule: CapacityRule::Fraction { numer: 1, denom: 2 },
    })
    .expect("valid generator parameters")
}

pub fn rat_u64(v: u64) -> Rat {
    Rat::from_integer(v.into())
}

pub fn rat_is_nonneg(v: &Rat) -> bool {
    !v.is_negative()
}

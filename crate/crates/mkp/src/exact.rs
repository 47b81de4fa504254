//! Exact solvers: exhaustive enumeration (the test oracle) and a
//! pseudo-polynomial dynamic program over residual capacity vectors.

use crate::error::{Error, Result};
use crate::model::{
    evaluate, is_feasible, trajectory_reward, Instance, ObjectiveBreakdown, Schedule,
};

/// Default cap on `n * T` for exhaustive enumeration.
pub const DEFAULT_BRUTE_GUARD: usize = 20;

/// Default cap on the DP table size `(n + 1) * prod(C_t + 1)`.
pub const DEFAULT_DP_TABLE_GUARD: u128 = 100_000_000;

/// Enumerate all `2^(nT)` schedules and return a feasible maximizer.
/// Ties go to the lexicographically smallest x matrix (row-major, step 0
/// first). Refuses instances with `n * T > guard`.
pub fn brute_force(
    inst: &Instance,
    guard: usize,
) -> Result<(Schedule, ObjectiveBreakdown)> {
    let (t_len, n) = (inst.num_steps(), inst.num_objects());
    let bits = t_len * n;
    if bits > guard {
        return Err(Error::GuardExceeded {
            what: "brute-force enumeration",
            estimate: 1u128 << bits.min(127),
            limit: 1u128 << guard.min(127),
        });
    }
    let mut best: Option<(Schedule, ObjectiveBreakdown)> = None;
    for mask in 0u64..(1u64 << bits) {
        let mut sched = Schedule::empty(t_len, n);
        for pos in 0..bits {
            // Counter order with bit 0 as the last (t, i) cell visits
            // schedules in lexicographic row-major order.
            if mask >> (bits - 1 - pos) & 1 == 1 {
                sched.set(pos / n, pos % n, true);
            }
        }
        if !is_feasible(inst, &sched)? {
            continue;
        }
        let breakdown = evaluate(inst, &sched)?;
        let better = match &best {
            None => true,
            Some((_, b)) => breakdown.total > b.total,
        };
        if better {
            best = Some((sched, breakdown));
        }
    }
    // The empty schedule is always feasible, so a maximizer exists.
    Ok(best.expect("empty schedule is feasible"))
}

/// Dynamic program indexed by residual capacity vector and object
/// prefix. Objects are added one at a time; for each, all `2^T`
/// trajectories are tried, subtracting each step's weight only at the
/// steps where the object is taken. Runtime is exponential in `T` only.
pub fn dp_solve(inst: &Instance, table_guard: u128) -> Result<(Schedule, ObjectiveBreakdown)> {
    let (t_len, n) = (inst.num_steps(), inst.num_objects());
    if t_len > 24 {
        return Err(Error::GuardExceeded {
            what: "dp trajectory enumeration",
            estimate: 1u128 << t_len.min(127),
            limit: 1 << 24,
        });
    }
    let mut num_states: u128 = 1;
    for t in 0..t_len {
        num_states = num_states.saturating_mul(inst.capacity(t) as u128 + 1);
    }
    let table_size = num_states.saturating_mul(n as u128 + 1);
    if table_size > table_guard {
        return Err(Error::GuardExceeded {
            what: "dp table",
            estimate: table_size,
            limit: table_guard,
        });
    }
    let num_states = num_states as usize;

    // Mixed-radix layout: state = sum_t c_t * stride_t.
    let mut stride = vec![1usize; t_len];
    for t in (0..t_len.saturating_sub(1)).rev() {
        stride[t] = stride[t + 1] * (inst.capacity(t + 1) as usize + 1);
    }
    let decode = |state: usize| -> Vec<u64> {
        let mut c = vec![0u64; t_len];
        let mut rest = state;
        for t in 0..t_len {
            c[t] = (rest / stride[t]) as u64;
            rest %= stride[t];
        }
        c
    };

    let masks = 1u32 << t_len;
    let mut prev = vec![0u64; num_states];
    let mut curr = vec![0u64; num_states];
    // Chosen trajectory per (object, state), for the backward pass.
    let mut choice = vec![vec![0u32; num_states]; n];

    for s in 0..n {
        // Precompute reward and state offset per trajectory.
        let mut reward = vec![0u64; masks as usize];
        let mut offset = vec![0usize; masks as usize];
        for mask in 0..masks {
            reward[mask as usize] = trajectory_reward(inst, s, mask);
            let mut off = 0usize;
            for t in 0..t_len {
                if mask >> t & 1 == 1 {
                    off += inst.weight(t, s) as usize * stride[t];
                }
            }
            offset[mask as usize] = off;
        }
        for state in 0..num_states {
            let c = decode(state);
            let mut best_val = 0u64;
            let mut best_mask = 0u32;
            let mut first = true;
            for mask in 0..masks {
                let valid = (0..t_len)
                    .all(|t| mask >> t & 1 == 0 || inst.weight(t, s) <= c[t]);
                if !valid {
                    continue;
                }
                let val = reward[mask as usize] + prev[state - offset[mask as usize]];
                // Binary-counter order; first strict maximum wins.
                if first || val > best_val {
                    best_val = val;
                    best_mask = mask;
                    first = false;
                }
            }
            // mask 0 is always valid, so `first` cannot survive the loop.
            debug_assert!(!first);
            curr[state] = best_val;
            choice[s][state] = best_mask;
        }
        std::mem::swap(&mut prev, &mut curr);
    }

    // Backward pass from the full-capacity state.
    let mut sched = Schedule::empty(t_len, n);
    let full: usize = (0..t_len)
        .map(|t| inst.capacity(t) as usize * stride[t])
        .sum();
    let mut state = full;
    for s in (0..n).rev() {
        let mask = choice[s][state];
        let mut off = 0usize;
        for t in 0..t_len {
            if mask >> t & 1 == 1 {
                sched.set(t, s, true);
                off += inst.weight(t, s) as usize * stride[t];
            }
        }
        state -= off;
    }
    let breakdown = evaluate(inst, &sched)?;
    debug_assert_eq!(breakdown.total, prev[full]);
    debug_assert!(is_feasible(inst, &sched)?);
    Ok((sched, breakdown))
}

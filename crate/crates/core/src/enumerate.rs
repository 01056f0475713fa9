//! Exhaustive enumeration of zero-defect branch classes on a fixed
//! Hirzebruch surface.
//!
//! Writing a branch class `sum b_i * (alpha_i, beta_i)` with weights
//! `w_i = (b_i - 1)/b_i`, the canonical defect vanishes exactly when
//!
//! ```text
//! sum_i w_i * alpha_i = 2          (C-coordinate)
//! sum_i w_i * beta_i  = n + 2      (F-coordinate)
//! ```
//!
//! Both are "weighted unit" equations with Egyptian-fraction structure: each
//! term lies in `[m/2, m)`, so slot counts and multiplicities are bounded and
//! the solution sets are finite and enumerable.

use crate::classes::{BranchClass, BranchComponent};
use crate::picard::{DivisorClass, Rational};
use std::collections::{BTreeMap, BTreeSet};

/// All solutions of `sum_j m_j * (1 - 1/b_j) = target` with `b_j >= 2`.
///
/// `slots` is the sequence of positive integer weights `m_j`; each returned
/// assignment is aligned with it.  Slots of equal weight are interchangeable,
/// so within every equal-weight run of the input the returned `b_j` are
/// nondecreasing and each solution appears exactly once.
///
/// Termination: in reciprocal form `sum_j m_j/b_j = (sum_j m_j) - target`,
/// choosing the values `b_j` in globally nondecreasing order bounds each
/// choice by `b <= (remaining weight)/(remaining reciprocal target)`.
pub fn solve_weighted_unit(target: Rational, slots: &[u64]) -> Vec<Vec<u64>> {
    let total_weight: i64 = slots.iter().map(|&m| m as i64).sum();
    // Reciprocal target S = sum m_j - target; every term m_j/b_j is positive.
    let s = Rational::from_integer(total_weight) - target;
    if slots.is_empty() {
        return if target == Rational::from_integer(0) {
            vec![vec![]]
        } else {
            vec![]
        };
    }
    if s <= Rational::from_integer(0) {
        return vec![];
    }
    // Remaining slot counts per distinct weight.
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &m in slots {
        assert!(m >= 1, "slot weights must be positive");
        *counts.entry(m).or_default() += 1;
    }
    let mut per_weight: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut found: BTreeSet<BTreeMap<u64, Vec<u64>>> = BTreeSet::new();
    recurse(s, 2, &mut counts, &mut per_weight, &mut found);

    // Align each solution with the input slot order.
    let mut out = Vec::new();
    for sol in found {
        let mut queues: BTreeMap<u64, std::collections::VecDeque<u64>> = sol
            .into_iter()
            .map(|(m, bs)| (m, bs.into_iter().collect()))
            .collect();
        let assignment: Vec<u64> = slots
            .iter()
            .map(|m| queues.get_mut(m).expect("weight present").pop_front().expect("count matches"))
            .collect();
        out.push(assignment);
    }
    out.sort();
    out
}

fn recurse(
    s: Rational,
    b_floor: u64,
    counts: &mut BTreeMap<u64, usize>,
    acc: &mut BTreeMap<u64, Vec<u64>>,
    found: &mut BTreeSet<BTreeMap<u64, Vec<u64>>>,
) {
    let remaining_weight: i64 = counts.iter().map(|(&m, &c)| m as i64 * c as i64).sum();
    if remaining_weight == 0 {
        if s == Rational::from_integer(0) {
            found.insert(acc.clone());
        }
        return;
    }
    if s <= Rational::from_integer(0) {
        return;
    }
    // Assign the smallest remaining b: every unassigned b_j is >= b, so
    // S <= (remaining weight)/b, i.e. b <= (remaining weight)/S.
    let bound = (Rational::from_integer(remaining_weight) / s).floor().to_integer();
    if bound < b_floor as i64 {
        return;
    }
    let weights: Vec<u64> = counts.keys().copied().collect();
    for b in b_floor..=(bound as u64) {
        for &m in &weights {
            if counts[&m] == 0 {
                continue;
            }
            let term = Rational::new(m as i64, b as i64);
            if term > s {
                continue;
            }
            *counts.get_mut(&m).unwrap() -= 1;
            acc.entry(m).or_default().push(b);
            recurse(s - term, b, counts, acc, found);
            acc.get_mut(&m).unwrap().pop();
            *counts.get_mut(&m).unwrap() += 1;
        }
    }
}

/// Enumerate every zero-defect branch class on `F_n`.
///
/// Horizontal parts (components with `alpha >= 1`) are generated from the
/// C-coordinate equation, whose weighted form bounds `sum alpha_i <= 4`;
/// their `beta` coordinates range over the irreducible window until the
/// F-coordinate budget `n + 2` is exhausted; the residual budget is closed
/// by fiber components `(0,1)`.  On the quadric `F_0` the class `(1,0)` is a
/// fiber of the first ruling and enters as a horizontal with `beta = 0`, so
/// both rulings are closed symmetrically.
pub fn enumerate_branch_classes(n: u32) -> BTreeSet<BranchClass> {
    let mut out = BTreeSet::new();
    let two = Rational::from_integer(2);
    let f_budget = Rational::from_integer(i64::from(n) + 2);

    for alphas in alpha_multisets() {
        for bs in solve_weighted_unit(two, &alphas) {
            let horizontals: Vec<(u64, u64)> =
                alphas.iter().copied().zip(bs.iter().copied()).collect();
            assign_betas(n, &horizontals, 0, f_budget, &mut Vec::new(), &mut out);
        }
    }
    out
}

/// Multisets of positive integers with sum at most 4 (each C-equation term
/// is at least `alpha/2`, so `sum alpha <= 4`), in nonincreasing order.
fn alpha_multisets() -> Vec<Vec<u64>> {
    let mut all = Vec::new();
    for total in 1..=4u64 {
        let mut partial = Vec::new();
        partitions(total, total, &mut partial, &mut all);
    }
    all
}

fn partitions(total: u64, max: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if total == 0 {
        out.push(acc.clone());
        return;
    }
    for part in (1..=max.min(total)).rev() {
        acc.push(part);
        partitions(total - part, part, acc, out);
        acc.pop();
    }
}

/// Recursively choose `beta` for each horizontal `(alpha, b)` and close the
/// residual F-budget with fibers.
fn assign_betas(
    n: u32,
    horizontals: &[(u64, u64)],
    index: usize,
    budget: Rational,
    chosen: &mut Vec<i64>,
    out: &mut BTreeSet<BranchClass>,
) {
    if budget < Rational::from_integer(0) {
        return;
    }
    if index == horizontals.len() {
        close_with_fibers(n, horizontals, chosen, budget, out);
        return;
    }
    let (alpha, b) = horizontals[index];
    let w = Rational::new(b as i64 - 1, b as i64);
    // The ruling class (1,0) is the only irreducible class with beta = 0 and
    // needs alpha = 1; for n >= 1 it may appear at most once.
    if alpha == 1 {
        let already_section = chosen
            .iter()
            .enumerate()
            .any(|(i, &beta)| beta == 0 && horizontals[i].0 == 1);
        if n == 0 || !already_section {
            chosen.push(0);
            assign_betas(n, horizontals, index + 1, budget, chosen, out);
            chosen.pop();
        }
    }
    let beta_min = if n == 0 { 1 } else { i64::from(n) * alpha as i64 };
    // Canonical order: within equal (alpha, b) runs betas are nondecreasing.
    let run_floor = if index > 0 && horizontals[index - 1] == horizontals[index] {
        chosen[index - 1].max(beta_min)
    } else {
        beta_min
    };
    let beta_max = (budget / w).floor().to_integer();
    for beta in run_floor..=beta_max {
        if beta == 0 {
            continue; // handled above
        }
        chosen.push(beta);
        assign_betas(
            n,
            horizontals,
            index + 1,
            budget - w * Rational::from_integer(beta),
            chosen,
            out,
        );
        chosen.pop();
    }
}

fn close_with_fibers(
    n: u32,
    horizontals: &[(u64, u64)],
    betas: &[i64],
    residual: Rational,
    out: &mut BTreeSet<BranchClass>,
) {
    let mut fiber_patterns: Vec<Vec<u64>> = Vec::new();
    if residual == Rational::from_integer(0) {
        fiber_patterns.push(Vec::new());
    } else {
        // k fibers contribute between k/2 and (strictly) k, so
        // residual < k <= 2*residual.
        let hi = (residual * Rational::from_integer(2)).floor().to_integer();
        for k in 1..=hi.max(0) {
            if Rational::from_integer(k) <= residual {
                continue;
            }
            let slots = vec![1u64; k as usize];
            for sol in solve_weighted_unit(residual, &slots) {
                fiber_patterns.push(sol);
            }
        }
    }
    for fibers in fiber_patterns {
        let mut comps: Vec<BranchComponent> = horizontals
            .iter()
            .zip(betas)
            .map(|(&(alpha, b), &beta)| BranchComponent {
                multiplicity: b,
                cls: DivisorClass::new(n, alpha as i64, beta),
            })
            .collect();
        comps.extend(fibers.iter().map(|&b| BranchComponent {
            multiplicity: b,
            cls: DivisorClass::fiber(n),
        }));
        let class = BranchClass::new(n, comps).expect("generated components are valid");
        debug_assert!(class.is_defect_zero());
        out.insert(class);
    }
}

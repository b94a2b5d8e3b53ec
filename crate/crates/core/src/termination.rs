//! Non-termination of loops whose guard is a conjunction of polynomial
//! equations: the loop runs forever from a state exactly when the state
//! lies in the largest subvariety of the guard's zero set that every
//! branch maps into itself. Membership is decided by evaluating the
//! fixpoint's defining polynomials; outside the set, a shortest schedule
//! to a guard violation is produced as the termination witness.

use std::collections::VecDeque;

use num_traits::Zero;

use crate::invariant::{invariant_set_branch, InvariantError};
use crate::poly::Polynomial;
use crate::rational::Rational;

/// Either a proof of non-termination or a concrete run breaking a guard.
#[derive(Clone, Debug, PartialEq)]
pub enum TerminationVerdict {
    /// Every run from the state satisfies the guard equations forever.
    NeverTerminates,
    /// Following `schedule` reaches `point`, where guard `guard_index`
    /// evaluates to the nonzero `value`.
    Terminates {
        schedule: Vec<usize>,
        point: Vec<Rational>,
        guard_index: usize,
        value: Rational,
    },
}

/// Decides whether `while g1 = 0 and ... and gk = 0 do x := F(x)` runs
/// forever from `a`.
pub fn never_terminates_algebraic(
    a: &[Rational],
    gs: &[Polynomial],
    f: &[Polynomial],
    max_iter: usize,
) -> Result<TerminationVerdict, InvariantError> {
    never_terminates_algebraic_branch(a, gs, std::slice::from_ref(&f.to_vec()), max_iter)
}

/// Branching form; non-termination means no schedule at all can exit.
pub fn never_terminates_algebraic_branch(
    a: &[Rational],
    gs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    max_iter: usize,
) -> Result<TerminationVerdict, InvariantError> {
    let res = invariant_set_branch(gs, fs, max_iter)?;
    if res.polys().iter().all(|p| p.evaluate(a).is_zero()) {
        return Ok(TerminationVerdict::NeverTerminates);
    }
    // some composition of depth <= N is nonzero at a, so a breadth-first
    // walk of that depth must reach a guard violation
    let mut queue: VecDeque<(Vec<usize>, Vec<Rational>)> = VecDeque::new();
    queue.push_back((Vec::new(), a.to_vec()));
    while let Some((schedule, point)) = queue.pop_front() {
        for (i, g) in gs.iter().enumerate() {
            let value = g.evaluate(&point);
            if !value.is_zero() {
                return Ok(TerminationVerdict::Terminates {
                    schedule,
                    point,
                    guard_index: i,
                    value,
                });
            }
        }
        if schedule.len() > res.iterations() {
            continue;
        }
        for (b, f) in fs.iter().enumerate() {
            let child: Vec<Rational> = f.iter().map(|p| p.evaluate(&point)).collect();
            let mut s = schedule.clone();
            s.push(b);
            queue.push_back((s, child));
        }
    }
    unreachable!("a state outside the stable set must break a guard within the fixpoint depth")
}

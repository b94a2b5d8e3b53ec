//! Invariant sets of algebraic varieties under polynomial maps, and the
//! checker deciding whether a polynomial is a loop invariant from a given
//! initial state.
//!
//! The fixpoint keeps composing the newest defining polynomials with every
//! update map and stops as soon as all fresh compositions lie in the
//! radical of the accumulated ideal; the Groebner basis is extended
//! incrementally between rounds. The checker multiplies the candidate and
//! the guard product into an extra variable z and evaluates the fixpoint
//! output at (a, 1): the candidate is an invariant exactly when every
//! polynomial vanishes there.

use std::collections::VecDeque;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::context::{same_context, VarContext};
use crate::groebner::{GroebnerBasis, MonomialOrder};
use crate::poly::Polynomial;
use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("invariant-set chain did not stabilize within {max_iter} iterations")]
    IterationLimit { max_iter: usize, partial: Vec<Vec<Polynomial>> },
}

/// Result of the invariant-set fixpoint: the defining polynomials grouped
/// by composition round, and the number N of rounds that added anything.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSetResult {
    blocks: Vec<Vec<Polynomial>>,
}

impl InvariantSetResult {
    pub fn blocks(&self) -> &[Vec<Polynomial>] {
        &self.blocks
    }

    /// All defining polynomials, in chain order.
    pub fn polys(&self) -> Vec<Polynomial> {
        self.blocks.iter().flatten().cloned().collect()
    }

    pub fn iterations(&self) -> usize {
        self.blocks.len().saturating_sub(1)
    }
}

fn validate_maps(ctx: &Arc<VarContext>, fs: &[Vec<Polynomial>]) {
    assert!(!fs.is_empty(), "at least one update map is required");
    for f in fs {
        assert_eq!(f.len(), ctx.len(), "update map arity mismatch");
        for p in f {
            assert!(same_context(p.context(), ctx), "update map context mismatch");
        }
    }
}

/// Largest subvariety of the common zero set of `g` stable under the map.
pub fn invariant_set(
    g: &[Polynomial],
    f: &[Polynomial],
    max_iter: usize,
) -> Result<InvariantSetResult, InvariantError> {
    invariant_set_branch(g, std::slice::from_ref(&f.to_vec()), max_iter)
}

/// Branching fixpoint: each round composes the previous round's new
/// polynomials with every map.
pub fn invariant_set_branch(
    g: &[Polynomial],
    fs: &[Vec<Polynomial>],
    max_iter: usize,
) -> Result<InvariantSetResult, InvariantError> {
    let ctx = g.first().map(|p| Arc::clone(p.context())).unwrap_or_else(|| {
        Arc::clone(fs[0][0].context())
    });
    for p in g {
        assert!(same_context(p.context(), &ctx), "generator context mismatch");
    }
    validate_maps(&ctx, fs);

    let mut seen: Vec<Polynomial> = Vec::new();
    let mut block0 = Vec::new();
    for p in g {
        if !p.is_zero() && !seen.contains(p) {
            seen.push(p.clone());
            block0.push(p.clone());
        }
    }
    let mut gb = GroebnerBasis::new(&block0, &ctx, MonomialOrder::GrevLex);
    let mut blocks = vec![block0];

    for _round in 1..=max_iter {
        let mut next = Vec::new();
        for p in blocks.last().unwrap() {
            for f in fs {
                let q = p.compose(f);
                if !q.is_zero() && !seen.contains(&q) && !next.contains(&q) {
                    next.push(q);
                }
            }
        }
        if next.iter().all(|q| gb.in_radical(q)) {
            return Ok(InvariantSetResult { blocks });
        }
        gb = gb.extended(&next);
        seen.extend(next.iter().cloned());
        blocks.push(next);
    }
    Err(InvariantError::IterationLimit { max_iter, partial: blocks })
}

/// A concrete run step showing the candidate failing: the branch schedule
/// leading to the point, the point itself, and the candidate's value there.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryWitness {
    pub schedule: Vec<usize>,
    pub point: Vec<Rational>,
    pub value: Rational,
}

/// Outcome of an invariant check with diagnostic data for failures.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub holds: bool,
    /// Fixpoint rounds of the underlying invariant-set run.
    pub iterations: usize,
    /// Index (into the invariant-set output) of the first polynomial that
    /// is nonzero at (a, 1).
    pub failing_index: Option<usize>,
    pub failing_value: Option<Rational>,
    pub witness: Option<TrajectoryWitness>,
}

impl CheckReport {
    fn pass(iterations: usize) -> Self {
        CheckReport {
            holds: true,
            iterations,
            failing_index: None,
            failing_value: None,
            witness: None,
        }
    }
}

fn guard_product(ctx: &Arc<VarContext>, hs: &[Polynomial]) -> Polynomial {
    let mut h = Polynomial::one(ctx);
    for p in hs {
        assert!(same_context(p.context(), ctx), "guard context mismatch");
        h = h.mul(p);
    }
    h
}

/// The z-extended maps (F_i, z*h) over ctx + z.
fn extended_maps(
    ctx: &Arc<VarContext>,
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
) -> (Arc<VarContext>, Vec<Vec<Polynomial>>) {
    let ext = ctx.with_z();
    let h = guard_product(ctx, hs).lifted_to(&ext);
    let z = Polynomial::var(&ext, ext.len() - 1);
    let zh = z.mul(&h);
    let maps = fs
        .iter()
        .map(|f| {
            let mut m: Vec<Polynomial> = f.iter().map(|p| p.lifted_to(&ext)).collect();
            m.push(zh.clone());
            m
        })
        .collect();
    (ext, maps)
}

const WITNESS_POINT_CAP: usize = 10_000;

/// Breadth-first search for the shortest schedule from `a` reaching a point
/// where g is nonzero while no earlier guard vanished.
fn find_witness(
    a: &[Rational],
    g: &Polynomial,
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    depth: usize,
) -> Option<TrajectoryWitness> {
    let mut queue: VecDeque<(Vec<usize>, Vec<Rational>)> = VecDeque::new();
    queue.push_back((Vec::new(), a.to_vec()));
    let mut expanded = 0usize;
    while let Some((schedule, point)) = queue.pop_front() {
        let value = g.evaluate(&point);
        if !value.is_zero() {
            return Some(TrajectoryWitness { schedule, point, value });
        }
        if schedule.len() >= depth || hs.iter().any(|h| h.evaluate(&point).is_zero()) {
            continue;
        }
        if expanded >= WITNESS_POINT_CAP {
            continue;
        }
        for (i, f) in fs.iter().enumerate() {
            let child: Vec<Rational> = f.iter().map(|p| p.evaluate(&point)).collect();
            let mut s = schedule.clone();
            s.push(i);
            queue.push_back((s, child));
            expanded += 1;
        }
    }
    None
}

/// Whether g is a polynomial invariant of the single-path loop with guards
/// hs and update F, started at a.
pub fn check_pi(
    a: &[Rational],
    g: &Polynomial,
    hs: &[Polynomial],
    f: &[Polynomial],
    max_iter: usize,
) -> Result<CheckReport, InvariantError> {
    check_pi_branch(a, g, hs, std::slice::from_ref(&f.to_vec()), max_iter)
}

/// Branching form of the invariant check.
pub fn check_pi_branch(
    a: &[Rational],
    g: &Polynomial,
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    max_iter: usize,
) -> Result<CheckReport, InvariantError> {
    let reports = check_many(a, std::slice::from_ref(g), hs, fs, max_iter, false)?;
    Ok(reports.into_iter().next().unwrap())
}

/// Checks a candidate list: first all candidates simultaneously (one
/// fixpoint on their common zero set; if that passes, every candidate is an
/// invariant), otherwise falls back to one check per candidate.
pub fn check_pi_batch(
    a: &[Rational],
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    max_iter: usize,
) -> Result<Vec<CheckReport>, InvariantError> {
    check_many(a, gs, hs, fs, max_iter, true)
}

fn check_many(
    a: &[Rational],
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    max_iter: usize,
    fallback: bool,
) -> Result<Vec<CheckReport>, InvariantError> {
    if gs.is_empty() {
        return Ok(Vec::new());
    }
    let ctx = Arc::clone(gs[0].context());
    assert_eq!(a.len(), ctx.len(), "initial state arity mismatch");
    let (ext, maps) = extended_maps(&ctx, hs, fs);
    let z = Polynomial::var(&ext, ext.len() - 1);
    let zgs: Vec<Polynomial> = gs.iter().map(|g| z.mul(&g.lifted_to(&ext))).collect();
    let res = invariant_set_branch(&zgs, &maps, max_iter)?;

    let mut point: Vec<Rational> = a.to_vec();
    point.push(Rational::from_integer(1.into()));
    let failure = res
        .polys()
        .iter()
        .enumerate()
        .find_map(|(i, p)| {
            let v = p.evaluate(&point);
            (!v.is_zero()).then_some((i, v))
        });

    match failure {
        None => Ok(vec![CheckReport::pass(res.iterations()); gs.len()]),
        Some((idx, value)) => {
            if gs.len() == 1 {
                let witness = find_witness(a, &gs[0], hs, fs, res.iterations() + 1);
                Ok(vec![CheckReport {
                    holds: false,
                    iterations: res.iterations(),
                    failing_index: Some(idx),
                    failing_value: Some(value),
                    witness,
                }])
            } else {
                assert!(fallback, "batch failure requires per-candidate fallback");
                gs.iter()
                    .map(|g| check_pi_branch(a, g, hs, fs, max_iter))
                    .collect()
            }
        }
    }
}

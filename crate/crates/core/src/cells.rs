//! Case split of a polynomial matrix's kernel by rank: finitely many
//! constructible cells of the parameter space, each carrying a closed-form
//! kernel basis valid on the whole cell.
//!
//! A cell fixes a rank s and a nonsingular s x s submatrix M = A[R, C]: it
//! is cut out by the vanishing of all (s+1)-minors together with det M != 0,
//! and on it the kernel is spanned by one column per free index, with the
//! bound coordinates given by Cramer's rule over det M. Cells are listed by
//! descending rank, then by the row and column sets in lexicographic order;
//! combinations that are empty over the algebraic closure are pruned by a
//! radical membership test.

use std::sync::Arc;

use itertools::Itertools;
use num_traits::Zero;

use crate::context::{same_context, VarContext};
use crate::groebner::{GroebnerBasis, MonomialOrder};
use crate::linalg::{minors, PolyMatrix, RatFn};
use crate::poly::Polynomial;
use crate::rational::Rational;

/// One rank case: where all (s+1)-minors vanish and `inequation` does not,
/// `kernel` spans the kernel of the matrix.
#[derive(Clone, Debug)]
pub struct ConstructibleCell {
    ctx: Arc<VarContext>,
    equations: Vec<Polynomial>,
    inequation: Polynomial,
    rows: Vec<usize>,
    cols: Vec<usize>,
    rank: usize,
    kernel: Vec<Vec<RatFn>>,
}

impl ConstructibleCell {
    pub fn context(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    /// Reduced basis of the ideal of (rank+1)-minors.
    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    /// The pivot minor that must stay nonzero on the cell.
    pub fn inequation(&self) -> &Polynomial {
        &self.inequation
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Kernel basis columns; entries share `inequation` as denominator on
    /// the bound coordinates and are exact 0/1 on the free ones.
    pub fn kernel(&self) -> &[Vec<RatFn>] {
        &self.kernel
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        self.equations.iter().all(|p| p.evaluate(point).is_zero())
            && !self.inequation.evaluate(point).is_zero()
    }

    /// Kernel basis evaluated at a point of the cell; None off the cell.
    pub fn kernel_at(&self, point: &[Rational]) -> Option<Vec<Vec<Rational>>> {
        if !self.contains(point) {
            return None;
        }
        Some(
            self.kernel
                .iter()
                .map(|col| col.iter().map(|e| e.evaluate(point).unwrap()).collect())
                .collect(),
        )
    }

    /// Kernel columns cleared of the shared denominator: every entry is a
    /// polynomial, the column spanning the same line as the rational one
    /// wherever the pivot minor is nonzero.
    pub fn scaled_kernel(&self) -> Vec<Vec<Polynomial>> {
        self.kernel
            .iter()
            .map(|col| {
                col.iter()
                    .map(|e| {
                        if e.den == self.inequation {
                            e.num.clone()
                        } else {
                            e.num.mul(&self.inequation)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Invariant templates on the cell: one polynomial per kernel column,
    /// combining the generators with the denominator-cleared coordinates.
    /// The cell parameters must be the initial-value symbols a1..an of the
    /// generators' context; the result lives over that context extended by
    /// those symbols.
    pub fn templates(&self, gs: &[Polynomial]) -> Vec<Polynomial> {
        assert_eq!(gs.len(), self.kernel.first().map_or(gs.len(), Vec::len));
        let ctx_x = gs
            .first()
            .map(|g| Arc::clone(g.context()))
            .expect("templates need at least one generator");
        for g in gs {
            assert!(same_context(g.context(), &ctx_x));
        }
        assert_eq!(
            self.ctx.names(),
            ctx_x.init_symbols().names(),
            "cell parameters must be the initial-value symbols of the generator context"
        );
        let combined = ctx_x.with_init_symbols();
        let n = ctx_x.len();
        self.scaled_kernel()
            .iter()
            .map(|col| {
                let mut t = Polynomial::zero(&combined);
                for (w, g) in col.iter().zip(gs) {
                    t = t.add(&w.shifted_into(&combined, n).mul(&g.lifted_to(&combined)));
                }
                t
            })
            .collect()
    }
}

/// Splits the parameter space into cells by the rank of `a`, descending;
/// within one rank, pivot row sets then pivot column sets run in
/// lexicographic order. A cell is dropped when its minor vanishes wherever
/// the minors of the cells listed before it (same rank) all vanish: such a
/// cell is provably empty or can never be the first match for any point.
pub fn parametric_kernel_cells(a: &PolyMatrix) -> Vec<ConstructibleCell> {
    let ctx = Arc::clone(a.context());
    let m = a.cols;
    let mut cells = Vec::new();
    for s in (0..=a.rows.min(m)).rev() {
        let bound: Vec<Polynomial> = minors(a, s + 1).into_iter().map(|(_, _, d)| d).collect();
        let gb = GroebnerBasis::new(&bound, &ctx, MonomialOrder::GrevLex);
        if gb.is_trivial() {
            continue;
        }
        let equations = gb.polys().to_vec();
        // grows by the kept minors; a later minor inside its radical is
        // shadowed (adding a shadowed minor would not change the radical,
        // so skipping it keeps the test exact)
        let mut shadow = gb;
        for rs in (0..a.rows).combinations(s) {
            for cs in (0..m).combinations(s) {
                let det = a.submatrix(&rs, &cs).det();
                if det.is_zero() || shadow.in_radical(&det) {
                    continue;
                }
                let kernel = kernel_columns(a, &rs, &cs, &det);
                shadow = shadow.extended(std::slice::from_ref(&det));
                cells.push(ConstructibleCell {
                    ctx: Arc::clone(&ctx),
                    equations: equations.clone(),
                    inequation: det,
                    rows: rs.clone(),
                    cols: cs,
                    rank: s,
                    kernel,
                });
            }
        }
    }
    cells
}

/// One kernel column per free index j: 1 at j, 0 at the other free indices,
/// and Cramer-solved coordinates at the pivot columns.
fn kernel_columns(
    a: &PolyMatrix,
    rs: &[usize],
    cs: &[usize],
    det: &Polynomial,
) -> Vec<Vec<RatFn>> {
    let ctx = a.context();
    let m = a.cols;
    let free: Vec<usize> = (0..m).filter(|j| !cs.contains(j)).collect();
    free.iter()
        .map(|&j| {
            let mut col: Vec<RatFn> = (0..m)
                .map(|_| RatFn::from_poly(&Polynomial::zero(ctx)))
                .collect();
            col[j] = RatFn::from_poly(&Polynomial::one(ctx));
            for (i, &cj) in cs.iter().enumerate() {
                // replace pivot column i of M by column j of A, negate
                let mut rep = a.submatrix(rs, cs);
                for (r, &ar) in rs.iter().enumerate() {
                    rep.set(r, i, a.get(ar, j).clone());
                }
                col[cj] = RatFn::new(rep.det().neg(), det.clone());
            }
            col
        })
        .collect()
}

/// First cell, in the stored order, containing the point. Every point of
/// the parameter space matches some cell.
pub fn first_matching_cell<'a>(
    cells: &'a [ConstructibleCell],
    point: &[Rational],
) -> Option<&'a ConstructibleCell> {
    cells.iter().find(|c| c.contains(point))
}

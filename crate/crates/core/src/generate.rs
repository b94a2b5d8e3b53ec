//! Invariant generation over a finite-dimensional candidate space: the
//! ansatz matrix whose kernel at any initial state spans the invariants
//! there, its case split into rank cells, and the trajectory-driven
//! generator that screens candidates against finitely many run constraints
//! before verifying them exactly.
//!
//! The screening stage walks the loop from the initial state and records,
//! for every schedule word up to a fixed depth, the guard-weighted values
//! of the generators; candidate coefficient vectors are the kernel of that
//! constraint matrix. When trajectory values grow past a bit threshold the
//! rows are computed modulo several fixed 64-bit primes instead, the
//! per-prime kernels are combined by the Chinese remainder theorem and
//! lifted back to rationals. Either way every candidate is then checked
//! exactly; if any fails, the ansatz-matrix kernel is used as the fallback,
//! so the final basis never depends on the screening shortcuts.

use std::collections::VecDeque;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use itertools::Itertools;

use crate::cells::{first_matching_cell, parametric_kernel_cells, ConstructibleCell};
use crate::context::{same_context, VarContext};
use crate::groebner::{GroebnerBasis, MonomialOrder};
use crate::invariant::{check_pi_batch, InvariantError};
use crate::linalg::{canonical_coefficients, minors, PolyMatrix, QMatrix};
use crate::modp::{
    add_mod, crt, kernel_mod, monomial_mod, mul_mod, rational_mod, rational_reconstruct, PRIMES,
};
use crate::poly::Polynomial;
use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Fixpoint(#[from] InvariantError),
    #[error("modular kernel reconstruction failed: {0}")]
    Modular(String),
}

/// Tuning knobs for the trajectory screening stage.
#[derive(Clone, Debug)]
pub struct GenerateOptions {
    /// Longest schedule word; defaults to the number of generators.
    pub depth: Option<usize>,
    /// Hard cap on constraint rows for branching loops.
    pub word_cap: usize,
    /// Switch to modular rows once a trajectory value outgrows this.
    pub exact_bit_limit: u64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { depth: None, word_cap: 10_000, exact_bit_limit: 8192 }
    }
}

fn assemble(gs: &[Polynomial], c: &[Rational]) -> Polynomial {
    let mut out = Polynomial::zero(gs[0].context());
    for (ci, g) in c.iter().zip(gs) {
        out = out.add(&g.scalar_mul(ci));
    }
    out
}


fn validate_family(gs: &[Polynomial], hs: &[Polynomial], fs: &[Vec<Polynomial>]) -> Arc<VarContext> {
    assert!(!gs.is_empty(), "at least one generator is required");
    let ctx = Arc::clone(gs[0].context());
    for p in gs.iter().chain(hs) {
        assert!(same_context(p.context(), &ctx), "generator/guard context mismatch");
    }
    assert!(!fs.is_empty(), "at least one branch is required");
    for f in fs {
        assert_eq!(f.len(), ctx.len(), "branch arity mismatch");
        for p in f {
            assert!(same_context(p.context(), &ctx), "branch context mismatch");
        }
    }
    ctx
}

/// Matrix whose kernel at an initial state gives exactly the invariant
/// combinations of the generators from that state.
#[derive(Clone, Debug)]
pub struct AnsatzMatrix {
    matrix: PolyMatrix,
    generators: Vec<Polynomial>,
    iterations: usize,
}

impl AnsatzMatrix {
    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Canonical kernel basis of the matrix evaluated at `a`.
    pub fn kernel_at(&self, a: &[Rational]) -> Vec<Vec<Rational>> {
        self.matrix.evaluate(a).kernel_basis()
    }

    /// Invariants from `a`: the kernel combinations of the generators,
    /// canonicalized.
    pub fn invariants_at(&self, a: &[Rational]) -> Vec<Polynomial> {
        canonical_coefficients(&self.kernel_at(a))
            .iter()
            .map(|c| assemble(&self.generators, c))
            .collect()
    }
}

/// Ansatz matrix of a single-path loop.
pub fn compute_matrix(
    gs: &[Polynomial],
    hs: &[Polynomial],
    f: &[Polynomial],
    max_iter: usize,
) -> Result<AnsatzMatrix, GenerateError> {
    compute_matrix_branch(gs, hs, std::slice::from_ref(&f.to_vec()), max_iter)
}

/// Ansatz matrix of a branching loop. Conceptually the fixpoint runs on
/// z * sum(y_i g_i) with the unknowns y and the guard gate z carried along
/// as extra variables; since every composition keeps the shape
/// z * (linear form in y), the loop below works directly on the coefficient
/// rows over the loop variables. Composing with a branch map sends a row c
/// to h * (c o F_b), and radical membership of z * (c . y) in the ideal of
/// the accumulated elements is membership of c in the row space of the
/// accumulated rows at every point of the ambient space.
pub fn compute_matrix_branch(
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    max_iter: usize,
) -> Result<AnsatzMatrix, GenerateError> {
    let ctx = validate_family(gs, hs, fs);
    let m = gs.len();
    let mut h = Polynomial::one(&ctx);
    for p in hs {
        h = h.mul(p);
    }

    let zero_row = |row: &[Polynomial]| row.iter().all(|p| p.is_zero());
    let mut blocks: Vec<Vec<Vec<Polynomial>>> = Vec::new();
    let mut accepted: Vec<Vec<Polynomial>> = Vec::new();
    let row0 = gs.to_vec();
    if zero_row(&row0) {
        blocks.push(Vec::new());
    } else {
        accepted.push(row0.clone());
        blocks.push(vec![row0]);
    }

    let mut converged = false;
    for _round in 1..=max_iter {
        let mut next: Vec<Vec<Polynomial>> = Vec::new();
        for row in blocks.last().unwrap() {
            for f in fs {
                let composed: Vec<Polynomial> =
                    row.iter().map(|p| h.mul(&p.compose(f))).collect();
                if !zero_row(&composed)
                    && !accepted.contains(&composed)
                    && !next.contains(&composed)
                {
                    next.push(composed);
                }
            }
        }
        if next.iter().all(|c| row_in_pointwise_span(&accepted, c, &ctx)) {
            converged = true;
            break;
        }
        accepted.extend(next.iter().cloned());
        blocks.push(next);
    }
    if !converged {
        return Err(GenerateError::Fixpoint(InvariantError::IterationLimit {
            max_iter,
            partial: blocks.iter().map(|b| b.iter().map(|r| row_as_poly(r, &ctx, m)).collect()).collect(),
        }));
    }

    let entries: Vec<Polynomial> = blocks.iter().flatten().flatten().cloned().collect();
    let matrix = PolyMatrix::new(&ctx, entries.len() / m.max(1), m, entries);
    Ok(AnsatzMatrix { matrix, generators: gs.to_vec(), iterations: blocks.len() - 1 })
}

/// The set element a coefficient row stands for: z * sum(c_i y_i) over the
/// extended variables. Only materialized for iteration-limit reporting.
fn row_as_poly(row: &[Polynomial], ctx: &Arc<VarContext>, m: usize) -> Polynomial {
    let n = ctx.len();
    let ext = ctx.with_y_block(m).with_z();
    let mut e = Polynomial::zero(&ext);
    for (i, ci) in row.iter().enumerate() {
        e = e.add(&Polynomial::var(&ext, n + i).mul(&ci.lifted_to(&ext)));
    }
    Polynomial::var(&ext, n + m).mul(&e)
}

/// True when `c` lies in the row space of `rows` at every point of the
/// ambient space, degenerate loci included: for each s below the generic
/// rank, every (s+1)-minor of the matrix bordered by c must vanish on the
/// locus where the rank of the plain matrix drops to s.
fn row_in_pointwise_span(
    rows: &[Vec<Polynomial>],
    c: &[Polynomial],
    ctx: &Arc<VarContext>,
) -> bool {
    if c.iter().all(|p| p.is_zero()) {
        return true;
    }
    if rows.is_empty() {
        return false;
    }
    let m = c.len();
    let d = PolyMatrix::new(ctx, rows.len(), m, rows.iter().flatten().cloned().collect());
    let bordered = d.stack(&PolyMatrix::new(ctx, 1, m, c.to_vec()));
    let generic_rank = d.rank();
    if bordered.rank() > generic_rank {
        return false;
    }
    let c_index = rows.len();
    for s in 0..generic_rank {
        let bound: Vec<Polynomial> =
            minors(&d, s + 1).into_iter().map(|(_, _, det)| det).collect();
        let gb = GroebnerBasis::new(&bound, ctx, MonomialOrder::GrevLex);
        if gb.is_trivial() {
            continue;
        }
        for rs in (0..rows.len()).combinations(s) {
            for cs in (0..m).combinations(s + 1) {
                let mut sel = rs.clone();
                sel.push(c_index);
                let det = bordered.submatrix(&sel, &cs).det();
                if det.is_zero() || gb.normal_form(&det).is_zero() {
                    continue;
                }
                if !gb.in_radical(&det) {
                    return false;
                }
            }
        }
    }
    true
}

/// The ansatz matrix together with its rank case split over the symbolic
/// initial state a1..an.
#[derive(Clone, Debug)]
pub struct ClassifiedInvariants {
    matrix: AnsatzMatrix,
    parameter_matrix: PolyMatrix,
    cells: Vec<ConstructibleCell>,
}

impl ClassifiedInvariants {
    pub fn matrix(&self) -> &AnsatzMatrix {
        &self.matrix
    }

    /// The ansatz matrix rewritten in the initial-value symbols.
    pub fn parameter_matrix(&self) -> &PolyMatrix {
        &self.parameter_matrix
    }

    pub fn cells(&self) -> &[ConstructibleCell] {
        &self.cells
    }

    pub fn generators(&self) -> &[Polynomial] {
        self.matrix.generators()
    }

    /// Index of the first cell containing the point.
    pub fn cell_index_for(&self, a: &[Rational]) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(a))
    }

    /// Symbolic invariant templates of one cell, over the loop variables
    /// extended by the initial-value symbols.
    pub fn templates(&self, cell: usize) -> Vec<Polynomial> {
        self.cells[cell].templates(self.generators())
    }

    /// Invariants from a concrete initial state, read off the first
    /// matching cell and canonicalized.
    pub fn basis_at(&self, a: &[Rational]) -> Vec<Polynomial> {
        let cell = match first_matching_cell(&self.cells, a) {
            Some(c) => c,
            None => return Vec::new(),
        };
        let coeffs = canonical_coefficients(&cell.kernel_at(a).unwrap());
        coeffs.iter().map(|c| assemble(self.generators(), c)).collect()
    }
}

/// Splits initial states by the rank of the ansatz matrix: finitely many
/// cells, each with a kernel valid across the whole cell.
pub fn truncated_class(
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    max_iter: usize,
) -> Result<ClassifiedInvariants, GenerateError> {
    let matrix = compute_matrix_branch(gs, hs, fs, max_iter)?;
    let ctx = Arc::clone(matrix.generators()[0].context());
    let actx = ctx.init_symbols();
    let mut parameter_matrix =
        PolyMatrix::zero(&actx, matrix.matrix().rows, matrix.matrix().cols);
    for i in 0..matrix.matrix().rows {
        for j in 0..matrix.matrix().cols {
            parameter_matrix.set(i, j, matrix.matrix().get(i, j).shifted_into(&actx, 0));
        }
    }
    let cells = parametric_kernel_cells(&parameter_matrix);
    Ok(ClassifiedInvariants { matrix, parameter_matrix, cells })
}

enum Rows {
    Exact(Vec<Vec<Rational>>),
    TooBig,
}

fn rational_bits(q: &Rational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

/// Breadth-first constraint rows: one row per schedule word of length at
/// most `depth`, weighted by the product of the guard values along the
/// word. Subtrees behind a vanished guard contribute nothing and are
/// skipped. Bails out once any trajectory value outgrows `bit_limit`.
fn rows_exact(
    a: &[Rational],
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    depth: usize,
    cap: usize,
    bit_limit: Option<u64>,
) -> Rows {
    let mut rows = Vec::new();
    let mut queue: VecDeque<(usize, Vec<Rational>, Rational)> = VecDeque::new();
    queue.push_back((0, a.to_vec(), Rational::one()));
    while let Some((len, point, weight)) = queue.pop_front() {
        if rows.len() >= cap {
            break;
        }
        rows.push(gs.iter().map(|g| g.evaluate(&point) * &weight).collect());
        if len == depth {
            continue;
        }
        let mut w = weight;
        for h in hs {
            w = w * h.evaluate(&point);
        }
        if w.is_zero() {
            continue;
        }
        for f in fs {
            let child: Vec<Rational> = f.iter().map(|p| p.evaluate(&point)).collect();
            if let Some(limit) = bit_limit {
                if child.iter().any(|v| rational_bits(v) > limit) {
                    return Rows::TooBig;
                }
            }
            queue.push_back((len + 1, child, w.clone()));
        }
    }
    Rows::Exact(rows)
}

/// The same rows modulo a prime. Guard-dead subtrees are kept (their rows
/// are zero), so the row layout does not depend on the prime. None when a
/// denominator in the input collides with the prime.
fn rows_mod(
    a: &[Rational],
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    depth: usize,
    cap: usize,
    p: u64,
) -> Option<Vec<Vec<u64>>> {
    let eval = |poly: &Polynomial, point: &[u64]| -> Option<u64> {
        let mut acc = 0u64;
        for (mono, c) in poly.terms() {
            let cv = rational_mod(c, p)?;
            acc = add_mod(acc, mul_mod(cv, monomial_mod(mono.exps(), point, p), p), p);
        }
        Some(acc)
    };
    let start: Option<Vec<u64>> = a.iter().map(|v| rational_mod(v, p)).collect();
    let mut rows = Vec::new();
    let mut queue: VecDeque<(usize, Vec<u64>, u64)> = VecDeque::new();
    queue.push_back((0, start?, 1));
    while let Some((len, point, weight)) = queue.pop_front() {
        if rows.len() >= cap {
            break;
        }
        let row: Option<Vec<u64>> =
            gs.iter().map(|g| Some(mul_mod(eval(g, &point)?, weight, p))).collect();
        rows.push(row?);
        if len == depth {
            continue;
        }
        let mut w = weight;
        for h in hs {
            w = mul_mod(w, eval(h, &point)?, p);
        }
        for f in fs {
            let child: Option<Vec<u64>> = f.iter().map(|q| eval(q, &point)).collect();
            queue.push_back((len + 1, child?, w));
        }
    }
    Some(rows)
}

/// Guard-weighted generator values along every schedule word up to
/// `depth`: the kernel of these rows contains the coefficient vector of
/// every invariant combination of the generators.
pub fn sufficient_constraints(
    a: &[Rational],
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    depth: usize,
    cap: usize,
) -> Vec<Vec<Rational>> {
    let ctx = validate_family(gs, hs, fs);
    assert_eq!(a.len(), ctx.len(), "initial state arity mismatch");
    match rows_exact(a, gs, hs, fs, depth, cap, None) {
        Rows::Exact(rows) => rows,
        Rows::TooBig => unreachable!("no bit limit was set"),
    }
}

/// Candidate coefficient vectors: kernel of the constraint rows, computed
/// exactly when the trajectory stays small and by CRT over 64-bit primes
/// otherwise. The boolean reports whether the modular path was taken.
fn screened_candidates(
    a: &[Rational],
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    depth: usize,
    opts: &GenerateOptions,
) -> Result<(Vec<Vec<Rational>>, bool), GenerateError> {
    let m = gs.len();
    if let Rows::Exact(rows) =
        rows_exact(a, gs, hs, fs, depth, opts.word_cap, Some(opts.exact_bit_limit))
    {
        return Ok((QMatrix::from_rows(rows).kernel_basis(), false));
    }

    // per prime: (pivot columns, kernel basis); pivot agreement between at
    // least two primes picks the working set, and any reconstruction gap
    // pulls in another prime
    let mut per_prime: Vec<(u64, Vec<usize>, Vec<Vec<u64>>)> = Vec::new();
    for &p in PRIMES.iter() {
        if let Some(rows) = rows_mod(a, gs, hs, fs, depth, opts.word_cap, p) {
            let (pivots, basis) = kernel_mod(&rows, m, p);
            per_prime.push((p, pivots, basis));
        }
        let group: Vec<&(u64, Vec<usize>, Vec<Vec<u64>>)> = match per_prime
            .iter()
            .filter(|(_, piv, _)| per_prime.iter().filter(|(_, q, _)| q == piv).count() >= 2)
            .max_by_key(|(_, piv, _)| piv.len())
        {
            Some((_, best, _)) => per_prime.iter().filter(|(_, piv, _)| piv == best).collect(),
            None => continue,
        };
        let dim = group[0].2.len();
        let mut vectors = Vec::with_capacity(dim);
        let mut ok = true;
        'lift: for i in 0..dim {
            let mut v = Vec::with_capacity(m);
            for j in 0..m {
                let residues: Vec<(u64, u64)> =
                    group.iter().map(|(p, _, b)| (b[i][j], *p)).collect();
                let (r, modulus) = crt(&residues);
                match rational_reconstruct(&r, &modulus) {
                    Some(q) => v.push(q),
                    None => {
                        ok = false;
                        break 'lift;
                    }
                }
            }
            vectors.push(v);
        }
        if ok {
            return Ok((vectors, true));
        }
    }
    Err(GenerateError::Modular(format!(
        "no agreeing kernel after {} primes",
        per_prime.len()
    )))
}

/// Invariant basis of a loop from one initial state, over the span of the
/// generators.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    basis: Vec<Polynomial>,
    coefficients: Vec<Vec<Rational>>,
    generators: Vec<Polynomial>,
    stage3_used: bool,
    modular: bool,
    iterations: usize,
}

impl InvariantBasis {
    /// Canonicalized invariant polynomials.
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    /// Coefficient vectors of the basis over the generators.
    pub fn coefficients(&self) -> &[Vec<Rational>] {
        &self.coefficients
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// True when the screened candidates failed verification and the basis
    /// was recomputed from the ansatz-matrix kernel.
    pub fn stage3_used(&self) -> bool {
        self.stage3_used
    }

    /// True when the screening kernel was computed modulo primes.
    pub fn used_modular_arithmetic(&self) -> bool {
        self.modular
    }

    /// Fixpoint rounds spent by the verification or fallback stage.
    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Invariants of a single-path loop from `a` over the generator span.
pub fn truncated_ideal(
    a: &[Rational],
    gs: &[Polynomial],
    hs: &[Polynomial],
    f: &[Polynomial],
    max_iter: usize,
    opts: &GenerateOptions,
) -> Result<InvariantBasis, GenerateError> {
    truncated_ideal_branch(a, gs, hs, std::slice::from_ref(&f.to_vec()), max_iter, opts)
}

/// Invariants of a branching loop from `a` over the generator span:
/// trajectory screening, exact verification of every candidate, and the
/// ansatz-matrix fallback when verification rejects anything.
pub fn truncated_ideal_branch(
    a: &[Rational],
    gs: &[Polynomial],
    hs: &[Polynomial],
    fs: &[Vec<Polynomial>],
    max_iter: usize,
    opts: &GenerateOptions,
) -> Result<InvariantBasis, GenerateError> {
    let ctx = validate_family(gs, hs, fs);
    assert_eq!(a.len(), ctx.len(), "initial state arity mismatch");
    let depth = opts.depth.unwrap_or(gs.len());
    let (cands, modular) = screened_candidates(a, gs, hs, fs, depth, opts)?;
    if cands.is_empty() {
        return Ok(InvariantBasis {
            basis: Vec::new(),
            coefficients: Vec::new(),
            generators: gs.to_vec(),
            stage3_used: false,
            modular,
            iterations: 0,
        });
    }
    let polys: Vec<Polynomial> = cands.iter().map(|c| assemble(gs, c)).collect();
    let reports = check_pi_batch(a, &polys, hs, fs, max_iter)?;
    if reports.iter().all(|r| r.holds) {
        let coefficients = canonical_coefficients(&cands);
        let basis = coefficients.iter().map(|c| assemble(gs, c)).collect();
        let iterations = reports.iter().map(|r| r.iterations).max().unwrap_or(0);
        return Ok(InvariantBasis {
            basis,
            coefficients,
            generators: gs.to_vec(),
            stage3_used: false,
            modular,
            iterations,
        });
    }
    let am = compute_matrix_branch(gs, hs, fs, max_iter)?;
    let coefficients = canonical_coefficients(&am.kernel_at(a));
    let basis = coefficients.iter().map(|c| assemble(gs, c)).collect();
    Ok(InvariantBasis {
        basis,
        coefficients,
        generators: gs.to_vec(),
        stage3_used: true,
        modular,
        iterations: am.iterations(),
    })
}

//! Exact linear algebra over the rationals and over polynomial entries.
//!
//! [`QMatrix`] provides Gauss-Jordan reduction, rank, and canonical kernel
//! bases over Q. [`PolyMatrix`] holds polynomial entries and supports
//! fraction-free (Bareiss) determinants, minors, and rank, which only need
//! exact division. Kernel bases are canonical: free columns are scanned in
//! ascending order and each basis vector carries a 1 in its own free
//! position and 0 in the other free positions, so equal kernels produce
//! identical bases.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::context::{same_context, VarContext};
use crate::poly::{Monomial, Polynomial};
use crate::rational::{Int, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("form is not homogeneous-linear in the coefficient variables: {0}")]
    NotLinearInY(String),
    #[error("linear form has a nonzero constant term")]
    InhomogeneousForm,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Linear form over a designated block of m unknowns plus a constant term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearForm {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl LinearForm {
    pub fn zero(m: usize) -> Self {
        LinearForm { coeffs: vec![Rational::zero(); m], constant: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    /// Value of the form at a concrete unknown vector.
    pub fn apply(&self, ys: &[Rational]) -> Rational {
        assert_eq!(ys.len(), self.coeffs.len());
        let mut acc = self.constant.clone();
        for (c, y) in self.coeffs.iter().zip(ys) {
            if !c.is_zero() && !y.is_zero() {
                acc += c * y;
            }
        }
        acc
    }
}

/// Dense matrix over Q, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduced row echelon form; returns the pivot columns in
    /// ascending order. Pivots are the first nonzero entry scanning each
    /// column top-down, so the result is deterministic.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = self.get(r, c).clone();
            for j in c..self.cols {
                let v = self.get(r, j) / &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let f = self.get(i, c).clone();
                    for j in c..self.cols {
                        let v = self.get(i, j) - &f * self.get(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Canonical kernel basis: one vector per free column (ascending), with
    /// 1 in that free position and 0 in the other free positions.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f] {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(row, f).clone();
            }
            basis.push(v);
        }
        basis
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> =
                self.row(i).iter().map(crate::rational::format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Canonical kernel of a system of homogeneous linear forms over m unknowns.
/// An empty form list (or all-zero forms) yields the full space.
pub fn kernel_of_linear_forms(
    forms: &[LinearForm],
    m: usize,
) -> Result<Vec<Vec<Rational>>, LinalgError> {
    let mut rows = Vec::new();
    for form in forms {
        if form.arity() != m {
            return Err(LinalgError::ShapeMismatch(format!(
                "form has {} coefficients, expected {m}",
                form.arity()
            )));
        }
        if !form.constant.is_zero() {
            return Err(LinalgError::InhomogeneousForm);
        }
        rows.push(form.coeffs.clone());
    }
    if rows.is_empty() {
        rows.push(vec![Rational::zero(); m]);
    }
    Ok(QMatrix::from_rows(rows).kernel_basis())
}

/// Reduced row echelon form of a set of vectors, zero rows dropped: the
/// canonical basis of their span.
pub fn rref_rows(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut m = QMatrix::from_rows(rows.to_vec());
    let pivots = m.rref();
    (0..pivots.len()).map(|i| m.row(i).to_vec()).collect()
}

/// True if the two vector sets span the same subspace.
pub fn same_span(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    rref_rows(a) == rref_rows(b)
}

/// Canonical basis of a coefficient span: row-reduced, denominators
/// cleared, integer content stripped, leading coefficient positive.
pub fn canonical_coefficients(vs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    rref_rows(vs)
        .into_iter()
        .map(|row| {
            let mut den_lcm = Int::one();
            let mut num_gcd = Int::zero();
            for q in &row {
                if !q.is_zero() {
                    den_lcm = den_lcm.lcm(q.denom());
                    num_gcd = num_gcd.gcd(q.numer());
                }
            }
            if num_gcd.is_zero() {
                return row;
            }
            let scale = Rational::new(den_lcm, num_gcd);
            row.into_iter().map(|q| q * &scale).collect()
        })
        .collect()
}

/// Dense matrix with polynomial entries, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    ctx: Arc<VarContext>,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(ctx: &Arc<VarContext>, rows: usize, cols: usize, entries: Vec<Polynomial>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        for e in &entries {
            assert!(same_context(e.context(), ctx), "entry context mismatch");
        }
        PolyMatrix { rows, cols, ctx: Arc::clone(ctx), entries }
    }

    pub fn zero(ctx: &Arc<VarContext>, rows: usize, cols: usize) -> Self {
        let entries = (0..rows * cols).map(|_| Polynomial::zero(ctx)).collect();
        PolyMatrix { rows, cols, ctx: Arc::clone(ctx), entries }
    }

    pub fn context(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert!(same_context(p.context(), &self.ctx));
        self.entries[i * self.cols + j] = p;
    }

    pub fn row(&self, i: usize) -> &[Polynomial] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Evaluation at a point, entrywise.
    pub fn evaluate(&self, point: &[Rational]) -> QMatrix {
        let mut out = QMatrix::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).evaluate(point));
            }
        }
        out
    }

    pub fn submatrix(&self, rs: &[usize], cs: &[usize]) -> PolyMatrix {
        let entries = rs
            .iter()
            .flat_map(|&i| cs.iter().map(move |&j| self.get(i, j).clone()))
            .collect();
        PolyMatrix { rows: rs.len(), cols: cs.len(), ctx: Arc::clone(&self.ctx), entries }
    }

    /// Determinant by fraction-free Bareiss elimination; all divisions are
    /// exact. Empty matrix has determinant 1.
    pub fn det(&self) -> Polynomial {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return Polynomial::one(&self.ctx);
        }
        let mut m: Vec<Polynomial> = self.entries.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let mut sign_flip = false;
        let mut prev = Polynomial::one(&self.ctx);
        for k in 0..n - 1 {
            if m[idx(k, k)].is_zero() {
                let Some(sw) = (k + 1..n).find(|&i| !m[idx(i, k)].is_zero()) else {
                    return Polynomial::zero(&self.ctx);
                };
                for j in 0..n {
                    m.swap(idx(k, j), idx(sw, j));
                }
                sign_flip = !sign_flip;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[idx(i, j)]
                        .mul(&m[idx(k, k)])
                        .sub(&m[idx(i, k)].mul(&m[idx(k, j)]));
                    m[idx(i, j)] = num
                        .divide_exact(&prev)
                        .expect("Bareiss division is always exact");
                }
                m[idx(i, k)] = Polynomial::zero(&self.ctx);
            }
            prev = m[idx(k, k)].clone();
        }
        let det = m[idx(n - 1, n - 1)].clone();
        if sign_flip {
            det.neg()
        } else {
            det
        }
    }

    /// Rank over the rational function field, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Polynomial> = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let idx = |i: usize, j: usize| i * cols + j;
        let mut prev = Polynomial::one(&self.ctx);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !m[idx(i, c)].is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    m.swap(idx(r, j), idx(pr, j));
                }
            }
            for i in r + 1..rows {
                for j in c + 1..cols {
                    let num =
                        m[idx(i, j)].mul(&m[idx(r, c)]).sub(&m[idx(i, c)].mul(&m[idx(r, j)]));
                    m[idx(i, j)] = num
                        .divide_exact(&prev)
                        .expect("fraction-free elimination divides exactly");
                }
                m[idx(i, c)] = Polynomial::zero(&self.ctx);
            }
            prev = m[idx(r, c)].clone();
            r += 1;
        }
        r
    }

    /// Vertical stack; contexts and widths must agree.
    pub fn stack(&self, other: &PolyMatrix) -> PolyMatrix {
        assert!(same_context(&self.ctx, &other.ctx));
        assert_eq!(self.cols, other.cols, "stack needs equal widths");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        PolyMatrix { rows: self.rows + other.rows, cols: self.cols, ctx: Arc::clone(&self.ctx), entries }
    }
}

/// All s x s minors: (row set, column set, determinant), index sets in
/// lexicographic order, rows outer.
pub fn minors(a: &PolyMatrix, s: usize) -> Vec<(Vec<usize>, Vec<usize>, Polynomial)> {
    if s > a.rows || s > a.cols {
        return Vec::new();
    }
    let mut out = Vec::new();
    for rs in (0..a.rows).combinations(s) {
        for cs in (0..a.cols).combinations(s) {
            let det = a.submatrix(&rs, &cs).det();
            out.push((rs.clone(), cs, det));
        }
    }
    out
}

/// Ratio of two polynomials, kept unreduced so a shared denominator stays
/// syntactically visible across a whole kernel column.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RatFn {
    pub fn new(num: Polynomial, den: Polynomial) -> RatFn {
        assert!(same_context(num.context(), den.context()));
        assert!(!den.is_zero(), "zero denominator");
        RatFn { num, den }
    }

    pub fn from_poly(p: &Polynomial) -> RatFn {
        RatFn { den: Polynomial::one(p.context()), num: p.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Value at a point, or None where the denominator vanishes.
    pub fn evaluate(&self, point: &[Rational]) -> Option<Rational> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            None
        } else {
            Some(self.num.evaluate(point) / d)
        }
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term() == Rational::from_integer(1.into()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Coefficient matrix of polynomials that are homogeneous-linear in the
/// trailing m variables of their context: entry (i, j) is the coefficient
/// polynomial (over the prefix context) of unknown j in polynomial i.
/// Errors if any term has total degree != 1 in the trailing block.
pub fn matrix_from_linear_polys(
    ps: &[Polynomial],
    ctx_x: &Arc<VarContext>,
    m: usize,
) -> Result<PolyMatrix, LinalgError> {
    let n = ctx_x.len();
    let mut out = PolyMatrix::zero(ctx_x, ps.len(), m);
    for (i, p) in ps.iter().enumerate() {
        if p.context().len() != n + m || !ctx_x.is_prefix_of(p.context()) {
            return Err(LinalgError::ShapeMismatch(format!(
                "polynomial {i} lives over [{}], expected the x-context plus {m} unknowns",
                p.context()
            )));
        }
        let mut cols: Vec<Polynomial> = (0..m).map(|_| Polynomial::zero(ctx_x)).collect();
        for (mono, c) in p.terms() {
            let ydeg: u32 = mono.exps()[n..].iter().sum();
            if ydeg != 1 {
                return Err(LinalgError::NotLinearInY(format!(
                    "term of y-degree {ydeg} in polynomial {i}"
                )));
            }
            let j = mono.exps()[n..].iter().position(|&e| e == 1).unwrap();
            let xm = Monomial::from_exps(mono.exps()[..n].to_vec());
            cols[j] = cols[j].add(&Polynomial::monomial(ctx_x, xm, c.clone()));
        }
        for (j, col) in cols.into_iter().enumerate() {
            out.set(i, j, col);
        }
    }
    Ok(out)
}

/// Coefficient extraction: for a polynomial jointly linear in the trailing
/// m variables, returns one (x-monomial, linear form over the m unknowns)
/// pair per distinct x-monomial, in the canonical sequence order. The zero
/// polynomial yields no forms. Errors on any term that is not exactly
/// linear in the trailing block.
pub fn coefficients_wrt_x(
    p: &Polynomial,
    ctx_x: &Arc<VarContext>,
    m: usize,
) -> Result<Vec<(Monomial, LinearForm)>, LinalgError> {
    let n = ctx_x.len();
    if p.context().len() != n + m || !ctx_x.is_prefix_of(p.context()) {
        return Err(LinalgError::ShapeMismatch(format!(
            "polynomial lives over [{}], expected the x-context plus {m} unknowns",
            p.context()
        )));
    }
    let mut map: std::collections::BTreeMap<Monomial, LinearForm> = Default::default();
    for (mono, c) in p.terms() {
        let ydeg: u32 = mono.exps()[n..].iter().sum();
        if ydeg != 1 {
            return Err(LinalgError::NotLinearInY(format!(
                "term `{}` has y-degree {ydeg}",
                Polynomial::monomial(p.context(), mono.clone(), c.clone())
            )));
        }
        let j = mono.exps()[n..].iter().position(|&e| e == 1).unwrap();
        let xm = Monomial::from_exps(mono.exps()[..n].to_vec());
        let form = map.entry(xm).or_insert_with(|| LinearForm::zero(m));
        form.coeffs[j] = form.coeffs[j].clone() + c;
    }
    Ok(map.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::rational::rat;

    fn q(rows: Vec<Vec<i64>>) -> QMatrix {
        QMatrix::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(rat).collect()).collect(),
        )
    }

    #[test]
    fn kernel_of_zero_matrix_is_identity() {
        let k = q(vec![vec![0, 0, 0, 0], vec![0, 0, 0, 0]]).kernel_basis();
        assert_eq!(k.len(), 4);
        for (i, v) in k.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x == rat(1), i == j);
                assert!(*x == rat(0) || *x == rat(1));
            }
        }
    }

    #[test]
    fn kernel_vectors_annihilate_and_are_canonical() {
        let a = q(vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 0, 1]]);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 1);
        // pivots at columns 0 and 2; free column 1 carries the 1
        assert_eq!(k[0], vec![rat(-2), rat(1), rat(0)]);
        for v in &k {
            for i in 0..a.rows {
                let dot: Rational =
                    a.row(i).iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn full_rank_kernel_is_empty() {
        let a = q(vec![vec![1, 0], vec![0, 1]]);
        assert!(a.kernel_basis().is_empty());
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn kernel_dim_plus_rank_is_cols() {
        let a = q(vec![vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![1, 1, 1, 1]]);
        assert_eq!(a.rank() + a.kernel_basis().len(), a.cols);
    }

    #[test]
    fn forms_kernel_full_space_when_empty() {
        let k = kernel_of_linear_forms(&[], 3).unwrap();
        assert_eq!(k.len(), 3);
        let z = kernel_of_linear_forms(&[LinearForm::zero(3)], 3).unwrap();
        assert_eq!(z.len(), 3);
    }

    #[test]
    fn inhomogeneous_form_is_rejected() {
        let mut f = LinearForm::zero(2);
        f.constant = rat(1);
        assert_eq!(
            kernel_of_linear_forms(&[f], 2).unwrap_err(),
            LinalgError::InhomogeneousForm
        );
    }

    fn ctx2() -> Arc<VarContext> {
        VarContext::new(vec!["x1", "x2"]).unwrap()
    }

    fn pm(ctx: &Arc<VarContext>, rows: usize, cols: usize, entries: &[&str]) -> PolyMatrix {
        let es = entries.iter().map(|s| parse_poly(s, ctx).unwrap()).collect();
        PolyMatrix::new(ctx, rows, cols, es)
    }

    #[test]
    fn bareiss_det_matches_cofactor_on_samples() {
        let ctx = ctx2();
        let a = pm(&ctx, 2, 2, &["x1", "x2", "1", "x1"]);
        assert_eq!(a.det(), parse_poly("x1^2 - x2", &ctx).unwrap());
        let b = pm(
            &ctx,
            3,
            3,
            &["x1", "0", "1", "0", "x2", "0", "1", "0", "x1"],
        );
        assert_eq!(b.det(), parse_poly("x1^2*x2 - x2", &ctx).unwrap());
        // singular square matrix
        let c = pm(&ctx, 2, 2, &["x1", "x1", "x2", "x2"]);
        assert!(c.det().is_zero());
        // zero pivot forces a row swap
        let d = pm(&ctx, 2, 2, &["0", "x1", "x2", "0"]);
        assert_eq!(d.det(), parse_poly("0 - x1*x2", &ctx).unwrap());
    }

    #[test]
    fn empty_det_is_one() {
        let ctx = ctx2();
        assert_eq!(PolyMatrix::zero(&ctx, 0, 0).det(), Polynomial::one(&ctx));
    }

    #[test]
    fn poly_rank_detects_proportional_rows() {
        let ctx = ctx2();
        let a = pm(&ctx, 2, 2, &["x1", "x2", "x1^2", "x1*x2"]);
        assert_eq!(a.rank(), 1);
        let b = pm(&ctx, 2, 2, &["x1", "x2", "x2", "x1"]);
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn minors_enumerate_lexicographically() {
        let ctx = ctx2();
        let a = pm(&ctx, 2, 3, &["1", "x1", "x2", "0", "1", "x1"]);
        let ms = minors(&a, 2);
        assert_eq!(ms.len(), 3);
        assert_eq!(ms[0].1, vec![0, 1]);
        assert_eq!(ms[1].1, vec![0, 2]);
        assert_eq!(ms[2].1, vec![1, 2]);
        assert_eq!(ms[0].2, parse_poly("1", &ctx).unwrap());
        assert_eq!(ms[2].2, parse_poly("x1^2 - x2", &ctx).unwrap());
        // oversized minors: none
        assert!(minors(&a, 3).is_empty());
    }

    #[test]
    fn linear_poly_matrix_extraction() {
        let ctx_x = ctx2();
        let ext = ctx_x.with_y_block(2);
        let p1 = parse_poly("x1^2*y1 + (x2 - 1)*y2", &ext).unwrap();
        let p2 = parse_poly("y1 - y2", &ext).unwrap();
        let a = matrix_from_linear_polys(&[p1, p2], &ctx_x, 2).unwrap();
        assert_eq!(a.get(0, 0), &parse_poly("x1^2", &ctx_x).unwrap());
        assert_eq!(a.get(0, 1), &parse_poly("x2 - 1", &ctx_x).unwrap());
        assert_eq!(a.get(1, 0), &parse_poly("1", &ctx_x).unwrap());
        assert_eq!(a.get(1, 1), &parse_poly("-1", &ctx_x).unwrap());
    }

    #[test]
    fn nonlinear_in_y_is_rejected() {
        let ctx_x = ctx2();
        let ext = ctx_x.with_y_block(2);
        for bad in ["y1*y2", "y1^2", "x1*y1 + x2", "x1"] {
            let p = parse_poly(bad, &ext).unwrap();
            assert!(
                matrix_from_linear_polys(&[p.clone()], &ctx_x, 2).is_err(),
                "{bad} should be rejected"
            );
            assert!(coefficients_wrt_x(&p, &ctx_x, 2).is_err());
        }
    }

    #[test]
    fn coefficient_extraction_in_canonical_order() {
        let ctx_x = ctx2();
        let ext = ctx_x.with_y_block(2);
        // (y1 - y2)*x1^2 + y1*x1*x2
        let p = parse_poly("(y1 - y2)*x1^2 + y1*x1*x2", &ext).unwrap();
        let forms = coefficients_wrt_x(&p, &ctx_x, 2).unwrap();
        assert_eq!(forms.len(), 2);
        // canonical order lists x1^2 before x1*x2
        assert_eq!(forms[0].0.exps(), &[2, 0]);
        assert_eq!(forms[0].1.coeffs, vec![rat(1), rat(-1)]);
        assert_eq!(forms[1].0.exps(), &[1, 1]);
        assert_eq!(forms[1].1.coeffs, vec![rat(1), rat(0)]);
        // reassembly reproduces p
        let mut back = Polynomial::zero(&ext);
        for (xm, form) in &forms {
            for (j, c) in form.coeffs.iter().enumerate() {
                let ym = Monomial::var(ext.len(), ctx_x.len() + j);
                let m = xm.padded(ext.len()).mul(&ym);
                back = back.add(&Polynomial::monomial(&ext, m, c.clone()));
            }
        }
        assert_eq!(back, p);
        // zero polynomial: no forms
        assert!(coefficients_wrt_x(&Polynomial::zero(&ext), &ctx_x, 2)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn same_span_is_scaling_invariant() {
        let a = vec![vec![rat(1), rat(2)], vec![rat(0), rat(1)]];
        let b = vec![vec![rat(3), rat(6)], vec![rat(1), rat(3)]];
        assert!(same_span(&a, &b));
        let c = vec![vec![rat(1), rat(0)]];
        assert!(!same_span(&a, &c));
    }
}

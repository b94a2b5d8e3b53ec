//! Sparse multivariate polynomials over exact rationals.
//!
//! Terms are stored in a canonical map keyed by [`Monomial`], whose `Ord`
//! is the canonical sequence order used everywhere in the crate: ascending
//! total degree, ties broken by descending lexicographic comparison of
//! exponent vectors. Over (x1, x2) the sequence up to degree 2 is
//! 1, x1, x2, x1^2, x1*x2, x2^2. The same order fixes printing, the row
//! order of coefficient extraction, and the column order of ansatz
//! matrices, so all outputs are deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::context::{same_context, VarContext};
use crate::rational::{format_rational, rat_pow, Rational};

/// Exponent vector with cached total degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
    deg: u32,
}

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial { exps: vec![0; arity], deg: 0 }
    }

    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity, "variable index {i} out of range for arity {arity}");
        let mut exps = vec![0; arity];
        exps[i] = 1;
        Monomial { exps, deg: 1 }
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        let deg = exps.iter().sum();
        Monomial { exps, deg }
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn deg(&self) -> u32 {
        self.deg
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Monomial { exps, deg: self.deg + other.deg }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        debug_assert_eq!(self.arity(), other.arity());
        self.deg <= other.deg && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// other / self when self divides other.
    pub fn div_into(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let exps = other.exps.iter().zip(&self.exps).map(|(b, a)| b - a).collect();
        Some(Monomial { exps, deg: other.deg - self.deg })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        let exps: Vec<u32> =
            self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect();
        Monomial::from_exps(exps)
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Embeds into a wider arity by zero-padding at the end.
    pub fn padded(&self, arity: usize) -> Monomial {
        assert!(arity >= self.arity());
        let mut exps = self.exps.clone();
        exps.resize(arity, 0);
        Monomial { exps, deg: self.deg }
    }
}

impl Ord for Monomial {
    /// Canonical sequence order: by total degree, ties by descending lex on
    /// exponent vectors (earlier variables weigh more), so ascending
    /// iteration yields 1, x1, x2, x1^2, x1*x2, x2^2, ...
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with canonical term storage: no explicit zero coefficients,
/// keys in the canonical sequence order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    ctx: Arc<VarContext>,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        Polynomial { ctx: Arc::clone(ctx), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn constant(ctx: &Arc<VarContext>, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(ctx.len()), c);
        }
        Polynomial { ctx: Arc::clone(ctx), terms }
    }

    pub fn var(ctx: &Arc<VarContext>, i: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(ctx.len(), i), Rational::one());
        Polynomial { ctx: Arc::clone(ctx), terms }
    }

    pub fn monomial(ctx: &Arc<VarContext>, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.arity(), ctx.len(), "monomial arity must match context");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { ctx: Arc::clone(ctx), terms }
    }

    pub fn from_terms<I>(ctx: &Arc<VarContext>, iter: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(ctx);
        for (m, c) in iter {
            assert_eq!(m.arity(), ctx.len(), "monomial arity must match context");
            p.add_term(m, c);
        }
        p
    }

    pub fn context(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Total degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.deg()).max()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.ctx.len()))
    }

    /// Greatest term in the canonical sequence order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn assert_same_ctx(&self, other: &Polynomial) {
        assert!(
            same_context(&self.ctx, &other.ctx),
            "context mismatch: [{}] vs [{}]",
            self.ctx,
            other.ctx
        );
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_ctx(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_ctx(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect();
        Polynomial { ctx: Arc::clone(&self.ctx), terms }
    }

    pub fn scalar_mul(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        let terms = self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect();
        Polynomial { ctx: Arc::clone(&self.ctx), terms }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_ctx(other);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        let mut out = Polynomial::zero(&self.ctx);
        // iterate over the smaller operand on the outside
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        let terms = self
            .terms
            .iter()
            .map(|(mm, cc)| (mm.mul(m), cc * c))
            .collect();
        Polynomial { ctx: Arc::clone(&self.ctx), terms }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluation at a full point; panics on arity mismatch.
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.ctx.len(), "point arity must match context");
        let mut cache: Vec<Vec<Rational>> = vec![Vec::new(); point.len()];
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache_i = &mut cache[i];
                while cache_i.len() < e as usize {
                    let next = rat_pow(&point[i], cache_i.len() as u32 + 1);
                    cache_i.push(next);
                }
                term *= &cache_i[e as usize - 1];
            }
            acc += term;
        }
        acc
    }

    /// Substitutes a constant for one variable, staying in the same context.
    pub fn evaluate_partial(&self, var: usize, value: &Rational) -> Polynomial {
        assert!(var < self.ctx.len());
        let mut out = Polynomial::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
            } else {
                let mut exps = m.exps().to_vec();
                exps[var] = 0;
                out.add_term(Monomial::from_exps(exps), c * rat_pow(value, e));
            }
        }
        out
    }

    /// Simultaneous substitution of every variable by a polynomial. All
    /// images must share one context, which becomes the result context.
    pub fn compose(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(
            images.len(),
            self.ctx.len(),
            "compose needs one image per variable"
        );
        let target = images
            .first()
            .map(|p| Arc::clone(&p.ctx))
            .expect("compose needs a nonempty context");
        for p in images {
            assert!(
                same_context(&target, &p.ctx),
                "compose images must share a context"
            );
        }
        let mut cache: Vec<Vec<Polynomial>> = vec![Vec::new(); images.len()];
        let mut acc = Polynomial::zero(&target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(&target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache_i = &mut cache[i];
                while cache_i.len() < e as usize {
                    let next = match cache_i.last() {
                        None => images[i].clone(),
                        Some(prev) => prev.mul(&images[i]),
                    };
                    cache_i.push(next);
                }
                term = term.mul(&cache_i[e as usize - 1]);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Lifts into an extension context (self's context must be a prefix).
    pub fn lifted_to(&self, ext: &Arc<VarContext>) -> Polynomial {
        assert!(
            self.ctx.is_prefix_of(ext),
            "lift target must extend the source context"
        );
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.padded(ext.len()), c.clone()))
            .collect();
        Polynomial { ctx: Arc::clone(ext), terms }
    }

    /// Re-reads the polynomial over a context of the same arity starting at
    /// `shift` (variable i maps to shift + i). Used to print polynomials in
    /// the initial values inside a doubled context.
    pub fn shifted_into(&self, target: &Arc<VarContext>, shift: usize) -> Polynomial {
        assert!(shift + self.ctx.len() <= target.len());
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![0u32; target.len()];
                exps[shift..shift + m.arity()].copy_from_slice(m.exps());
                (Monomial::from_exps(exps), c.clone())
            })
            .collect();
        Polynomial { ctx: Arc::clone(target), terms }
    }

    /// Restriction to a prefix context: every term must only use the first
    /// `prefix.len()` variables.
    pub fn restricted_to(&self, prefix: &Arc<VarContext>) -> Option<Polynomial> {
        assert!(prefix.is_prefix_of(&self.ctx));
        let n = prefix.len();
        let mut out = Polynomial::zero(prefix);
        for (m, c) in &self.terms {
            if m.exps()[n..].iter().any(|&e| e != 0) {
                return None;
            }
            out.add_term(Monomial::from_exps(m.exps()[..n].to_vec()), c.clone());
        }
        Some(out)
    }

    /// Exact division: Some(q) with self = q * divisor, or None if the
    /// quotient does not exist over the polynomial ring.
    pub fn divide_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        self.assert_same_ctx(divisor);
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.ctx);
        let (dm, dc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        while let Some((rm, rc)) = rem.leading() {
            let qm = dm.div_into(rm)?;
            let qc = rc / &dc;
            quot.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&divisor.mul_monomial(&qm, &qc));
        }
        Some(quot)
    }
}

/// All monomials of total degree <= d over the context, in the canonical
/// sequence order; count is C(n+d, d).
pub fn monomials_up_to_degree(ctx: &Arc<VarContext>, d: u32) -> Vec<Monomial> {
    let n = ctx.len();
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    fn rec(out: &mut Vec<Monomial>, exps: &mut Vec<u32>, pos: usize, left: u32) {
        if pos + 1 == exps.len() {
            for e in 0..=left {
                exps[pos] = e;
                out.push(Monomial::from_exps(exps.clone()));
            }
            exps[pos] = 0;
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(out, exps, pos + 1, left - e);
        }
        exps[pos] = 0;
    }
    rec(&mut out, &mut exps, 0, d);
    out.sort();
    out
}

fn format_monomial(m: &Monomial, ctx: &VarContext) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(ctx.name(i).to_string()),
            _ => parts.push(format!("{}^{}", ctx.name(i), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    /// Canonical form: terms ascending in the sequence order, explicit `*`
    /// and `^`, coefficients as integers or n/d fractions. Round-trips
    /// through the parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.numer().is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let ms = format_monomial(m, &self.ctx);
            if ms.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{ms}")?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), ms)?;
            }
        }
        Ok(())
    }
}

//! Groebner bases over Q with radical membership testing.
//!
//! Buchberger's algorithm with the normal (smallest-lcm) pair selection and
//! the product and chain criteria. Internally everything runs on
//! content-free integer coefficients, so reductions are fraction-free
//! pseudo-divisions; the published basis is the unique reduced monic basis
//! for the chosen order. Radical membership tests plain membership first
//! and otherwise adjoins a fresh variable t and asks whether 1 lies in
//! I + <1 - t*f>, stopping as soon as any reduction yields a unit.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::context::{same_context, VarContext};
use crate::poly::{Monomial, Polynomial};
use crate::rational::{Int, Rational};

/// Global monomial order used for basis computations.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum MonomialOrder {
    /// Graded reverse lexicographic, the default.
    #[default]
    GrevLex,
    /// Pure lexicographic with earlier context variables larger.
    Lex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::GrevLex => a.deg().cmp(&b.deg()).then_with(|| {
                for (x, y) in a.exps().iter().zip(b.exps()).rev() {
                    if x != y {
                        // smaller exponent in the rightmost difference wins
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }),
            MonomialOrder::Lex => a.exps().cmp(b.exps()),
        }
    }
}

/// Integer-coefficient polynomial, terms sorted descending in the active
/// order, content-free with positive leading coefficient.
#[derive(Clone, Debug)]
struct IPoly {
    terms: Vec<(Monomial, Int)>,
}

impl IPoly {
    fn lt(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn lc(&self) -> &Int {
        &self.terms[0].1
    }

    fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }
}

/// Clears denominators, strips content, sorts descending; None for zero.
fn int_poly(p: &Polynomial, ord: MonomialOrder) -> Option<IPoly> {
    if p.is_zero() {
        return None;
    }
    let mut den = Int::one();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
    }
    let mut terms: Vec<(Monomial, Int)> = p
        .terms()
        .map(|(m, c)| (m.clone(), c.numer() * (&den / c.denom())))
        .collect();
    terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
    let mut ip = IPoly { terms };
    normalize(&mut ip);
    Some(ip)
}

/// Strips content and makes the leading coefficient positive.
fn normalize(p: &mut IPoly) {
    let mut content = Int::zero();
    for (_, c) in &p.terms {
        content = content.gcd(c);
        if content.is_one() {
            break;
        }
    }
    if p.terms[0].1.is_negative() {
        content = -content;
    }
    if !content.is_one() {
        for (_, c) in &mut p.terms {
            *c = &*c / &content;
        }
    }
}

/// ca * ma * a + cb * mb * b, merged in descending order; None if zero.
fn combine(
    a: &IPoly,
    ca: &Int,
    ma: &Monomial,
    b: &IPoly,
    cb: &Int,
    mb: &Monomial,
    ord: MonomialOrder,
) -> Option<IPoly> {
    let mut terms: Vec<(Monomial, Int)> = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() || j < b.terms.len() {
        let pick_a = if i == a.terms.len() {
            false
        } else if j == b.terms.len() {
            true
        } else {
            let am = a.terms[i].0.mul(ma);
            let bm = b.terms[j].0.mul(mb);
            match ord.cmp(&am, &bm) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    let c = ca * &a.terms[i].1 + cb * &b.terms[j].1;
                    if !c.is_zero() {
                        terms.push((am, c));
                    }
                    i += 1;
                    j += 1;
                    continue;
                }
            }
        };
        if pick_a {
            let c = ca * &a.terms[i].1;
            if !c.is_zero() {
                terms.push((a.terms[i].0.mul(ma), c));
            }
            i += 1;
        } else {
            let c = cb * &b.terms[j].1;
            if !c.is_zero() {
                terms.push((b.terms[j].0.mul(mb), c));
            }
            j += 1;
        }
    }
    if terms.is_empty() {
        return None;
    }
    let mut out = IPoly { terms };
    normalize(&mut out);
    Some(out)
}

/// Full pseudo-reduction of p by the basis; None if p reduces to zero.
fn reduce_full(p: IPoly, basis: &[IPoly], ord: MonomialOrder) -> Option<IPoly> {
    let one = Monomial::one(p.terms[0].0.arity());
    let mut cur = p;
    'outer: loop {
        // terms are sorted descending, so the first reducible term found is
        // the largest one
        for k in 0..cur.terms.len() {
            let m = cur.terms[k].0.clone();
            for b in basis {
                if let Some(q) = b.lt().div_into(&m) {
                    let c = cur.terms[k].1.clone();
                    match combine(&cur, b.lc(), &one, b, &(-c), &q, ord) {
                        Some(next) => {
                            cur = next;
                            continue 'outer;
                        }
                        None => return None,
                    }
                }
            }
        }
        return Some(cur);
    }
}

fn spoly(f: &IPoly, g: &IPoly, ord: MonomialOrder) -> Option<IPoly> {
    let l = f.lt().lcm(g.lt());
    let mf = f.lt().div_into(&l).unwrap();
    let mg = g.lt().div_into(&l).unwrap();
    let scale = f.lc().lcm(g.lc());
    let cf = &scale / f.lc();
    let cg = -(&scale / g.lc());
    combine(f, &cf, &mf, g, &cg, &mg, ord)
}

fn pair_key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Buchberger loop. The first `seeded` elements are assumed to already form
/// a Groebner basis, so pairs among them are skipped. Returns the reduced
/// integer basis; a basis of [1] means the whole ring, and any reduction
/// that produces a unit short-circuits to that answer.
fn buchberger(mut g: Vec<IPoly>, seeded: usize, ord: MonomialOrder) -> Vec<IPoly> {
    let unit = |arity: usize| {
        vec![IPoly { terms: vec![(Monomial::one(arity), Int::one())] }]
    };
    if let Some(p) = g.iter().find(|p| p.is_constant()) {
        return unit(p.lt().arity());
    }
    let arity = match g.first() {
        Some(p) => p.lt().arity(),
        None => return Vec::new(),
    };

    let mut pending: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            if j >= seeded {
                pending.push((i, j));
            }
            seen.insert((i, j));
        }
    }

    while !pending.is_empty() {
        // normal selection: smallest lcm in the active order, ties by index
        let mut best = 0;
        let mut best_lcm = g[pending[0].0].lt().lcm(g[pending[0].1].lt());
        for (k, &(i, j)) in pending.iter().enumerate().skip(1) {
            let l = g[i].lt().lcm(g[j].lt());
            if ord.cmp(&l, &best_lcm) == Ordering::Less {
                best = k;
                best_lcm = l;
            }
        }
        let (i, j) = pending.swap_remove(best);

        if g[i].lt().coprime(g[j].lt()) {
            continue;
        }
        let treated = |a: usize, b: usize, pending: &[(usize, usize)]| {
            seen.contains(&pair_key(a, b)) && !pending.contains(&pair_key(a, b))
        };
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && g[k].lt().divides(&best_lcm)
                && treated(i, k, &pending)
                && treated(j, k, &pending)
        });
        if chain {
            continue;
        }

        let Some(s) = spoly(&g[i], &g[j], ord) else { continue };
        let Some(r) = reduce_full(s, &g, ord) else { continue };
        if r.is_constant() {
            return unit(arity);
        }
        let new = g.len();
        g.push(r);
        for k in 0..new {
            pending.push((k, new));
            seen.insert((k, new));
        }
    }

    // minimal basis: drop elements whose leading monomial is a multiple of
    // another kept leading monomial (keeping the first among equals)
    let mut order_idx: Vec<usize> = (0..g.len()).collect();
    order_idx.sort_by(|&a, &b| ord.cmp(g[a].lt(), g[b].lt()).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for idx in order_idx {
        if !kept.iter().any(|&k| g[k].lt().divides(g[idx].lt())) {
            kept.push(idx);
        }
    }
    // reduced basis: fully reduce each element by the others
    let mut reduced: Vec<IPoly> = Vec::new();
    for (pos, &idx) in kept.iter().enumerate() {
        let others: Vec<IPoly> = kept
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != pos)
            .map(|(_, &k)| g[k].clone())
            .collect();
        let r = reduce_full(g[idx].clone(), &others, ord)
            .expect("a minimal basis element cannot reduce to zero");
        reduced.push(r);
    }
    reduced.sort_by(|a, b| ord.cmp(a.lt(), b.lt()));
    reduced
}

fn monic(ip: &IPoly, ctx: &Arc<VarContext>) -> Polynomial {
    let lc = ip.lc().clone();
    Polynomial::from_terms(
        ctx,
        ip.terms.iter().map(|(m, c)| (m.clone(), Rational::new(c.clone(), lc.clone()))),
    )
}

/// Reduced monic Groebner basis of an ideal. The zero ideal has an empty
/// basis; the whole ring is represented by the single polynomial 1.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ctx: Arc<VarContext>,
    order: MonomialOrder,
    polys: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn new(gens: &[Polynomial], ctx: &Arc<VarContext>, order: MonomialOrder) -> Self {
        for p in gens {
            assert!(same_context(p.context(), ctx), "generator context mismatch");
        }
        let ints: Vec<IPoly> = gens.iter().filter_map(|p| int_poly(p, order)).collect();
        let basis = buchberger(ints, 0, order);
        let polys = basis.iter().map(|ip| monic(ip, ctx)).collect();
        GroebnerBasis { ctx: Arc::clone(ctx), order, polys }
    }

    pub fn context(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    /// The reduced monic basis, sorted ascending by leading monomial.
    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// True when the ideal is the whole ring.
    pub fn is_trivial(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant() && !self.polys[0].is_zero()
    }

    /// Basis of the ideal extended by further generators; pairs internal to
    /// the existing basis are not re-examined.
    pub fn extended(&self, more: &[Polynomial]) -> GroebnerBasis {
        for p in more {
            assert!(same_context(p.context(), &self.ctx), "generator context mismatch");
        }
        if self.is_trivial() {
            return self.clone();
        }
        let mut ints: Vec<IPoly> =
            self.polys.iter().filter_map(|p| int_poly(p, self.order)).collect();
        let seeded = ints.len();
        ints.extend(more.iter().filter_map(|p| int_poly(p, self.order)));
        let basis = buchberger(ints, seeded, self.order);
        let polys = basis.iter().map(|ip| monic(ip, &self.ctx)).collect();
        GroebnerBasis { ctx: Arc::clone(&self.ctx), order: self.order, polys }
    }

    /// The unique remainder of p modulo the basis: no term of the result is
    /// divisible by any leading monomial of the basis.
    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        assert!(same_context(p.context(), &self.ctx), "context mismatch");
        let mut cur = p.clone();
        'outer: loop {
            let mut terms: Vec<(Monomial, Rational)> =
                cur.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
            terms.sort_by(|a, b| self.order.cmp(&b.0, &a.0));
            for (m, c) in &terms {
                for b in &self.polys {
                    let blt = b
                        .terms()
                        .max_by(|x, y| self.order.cmp(x.0, y.0))
                        .map(|(bm, _)| bm.clone())
                        .expect("basis polynomials are nonzero");
                    if let Some(q) = blt.div_into(m) {
                        // b is monic in this order
                        cur = cur.sub(&b.mul_monomial(&q, c));
                        continue 'outer;
                    }
                }
            }
            return cur;
        }
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Membership of f in the radical of the ideal: plain membership first,
    /// then 1 in I + <1 - t*f> over the context extended by t.
    pub fn in_radical(&self, f: &Polynomial) -> bool {
        if f.is_zero() || self.is_trivial() {
            return true;
        }
        if self.contains(f) {
            return true;
        }
        if self.polys.is_empty() {
            return false;
        }
        let ext = self.ctx.with_t();
        let t = Polynomial::var(&ext, ext.len() - 1);
        let mut gens: Vec<IPoly> = self
            .polys
            .iter()
            .filter_map(|p| int_poly(&p.lifted_to(&ext), self.order))
            .collect();
        let seeded = gens.len();
        let rab = Polynomial::one(&ext).sub(&t.mul(&f.lifted_to(&ext)));
        gens.extend(int_poly(&rab, self.order));
        let basis = buchberger(gens, seeded, self.order);
        basis.len() == 1 && basis[0].is_constant()
    }
}

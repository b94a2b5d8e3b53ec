//! Invariants that hold from every initial state: combinations of the
//! generators fixed exactly by every update map. The defect sum(y_i g_i) -
//! sum(y_i g_i(F)) is linear in the unknowns, so collecting its
//! coefficients monomial by monomial yields a linear system whose kernel
//! is the space of fixed combinations. Constants are always fixed and are
//! quotiented out of the reported basis; each invariant f is presented to
//! users as f(x) - f(a1..an), which vanishes along every run.

use std::sync::Arc;

use num_traits::Zero;

use crate::context::same_context;
use crate::linalg::{canonical_coefficients, coefficients_wrt_x, kernel_of_linear_forms};
use crate::poly::Polynomial;
use crate::rational::Rational;

/// Basis of the fixed combinations, constants removed.
#[derive(Clone, Debug)]
pub struct GeneralInvariants {
    basis: Vec<Polynomial>,
    coefficients: Vec<Vec<Rational>>,
    generators: Vec<Polynomial>,
}

impl GeneralInvariants {
    /// Invariant polynomials with zero constant part, canonicalized.
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn coefficients(&self) -> &[Vec<Rational>] {
        &self.coefficients
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    /// Dimension modulo constants.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// The invariants pinned at a symbolic initial state: f(x) - f(a),
    /// over the loop variables extended by a1..an.
    pub fn pinned(&self) -> Vec<Polynomial> {
        if self.basis.is_empty() {
            return Vec::new();
        }
        let ctx = Arc::clone(self.basis[0].context());
        let doubled = ctx.with_init_symbols();
        let n = ctx.len();
        self.basis
            .iter()
            .map(|f| f.lifted_to(&doubled).sub(&f.shifted_into(&doubled, n)))
            .collect()
    }
}

/// True if `f` composed with every map gives back `f` exactly.
pub fn check_fixed_identity(f: &Polynomial, fs: &[Vec<Polynomial>]) -> bool {
    fs.iter().all(|map| &f.compose(map) == f)
}

/// Recognizes a scaled fixed combination: if g = P * f with f fixed by
/// every map, returns f, so that P(a) f(x) - g(a) vanishes along every
/// run from every a. Returns None when g is not divisible by P or the
/// quotient is not fixed. P must be nonzero.
pub fn reduce_scaled_form(
    p: &Polynomial,
    g: &Polynomial,
    fs: &[Vec<Polynomial>],
) -> Option<Polynomial> {
    assert!(!p.is_zero(), "the scaling polynomial must be nonzero");
    let f = g.divide_exact(p)?;
    if check_fixed_identity(&f, fs) {
        Some(f)
    } else {
        None
    }
}

/// The combinations of the generators fixed by every branch map. Branch
/// guards play no role: a fixed combination stays constant along any run
/// regardless of which branches fire.
pub fn general_invariants(gs: &[Polynomial], fs: &[Vec<Polynomial>]) -> GeneralInvariants {
    assert!(!gs.is_empty(), "at least one generator is required");
    let ctx = Arc::clone(gs[0].context());
    for g in gs {
        assert!(same_context(g.context(), &ctx), "generator context mismatch");
    }
    assert!(!fs.is_empty(), "at least one branch is required");
    for f in fs {
        assert_eq!(f.len(), ctx.len(), "branch arity mismatch");
        for p in f {
            assert!(same_context(p.context(), &ctx), "branch context mismatch");
        }
    }

    let n = ctx.len();
    let m = gs.len();
    let ym = ctx.with_y_block(m);
    let mut g = Polynomial::zero(&ym);
    for (i, gi) in gs.iter().enumerate() {
        g = g.add(&Polynomial::var(&ym, n + i).mul(&gi.lifted_to(&ym)));
    }

    let mut forms = Vec::new();
    for f in fs {
        let mut map: Vec<Polynomial> = f.iter().map(|p| p.lifted_to(&ym)).collect();
        for i in 0..m {
            map.push(Polynomial::var(&ym, n + i));
        }
        let defect = g.sub(&g.compose(&map));
        for (_, form) in coefficients_wrt_x(&defect, &ctx, m)
            .expect("defect must stay linear in the unknowns")
        {
            forms.push(form);
        }
    }

    let kernel = kernel_of_linear_forms(&forms, m).expect("defect forms are homogeneous");
    // constants are fixed for free: zero their coordinates and re-reduce
    let quotient: Vec<Vec<Rational>> = kernel
        .into_iter()
        .map(|mut v| {
            for (i, gi) in gs.iter().enumerate() {
                if gi.is_constant() {
                    v[i] = Rational::zero();
                }
            }
            v
        })
        .collect();
    let coefficients: Vec<Vec<Rational>> = canonical_coefficients(&quotient)
        .into_iter()
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .collect();
    let basis = coefficients
        .iter()
        .map(|c| {
            let mut out = Polynomial::zero(&ctx);
            for (ci, gi) in c.iter().zip(gs) {
                out = out.add(&gi.scalar_mul(ci));
            }
            out
        })
        .collect();
    GeneralInvariants { basis, coefficients, generators: gs.to_vec() }
}

//! End-to-end acceptance run: eight criteria covering the worked examples,
//! the published dimension tables, the property suites, and the termination
//! decision, each reported as one pass/fail line with its elapsed time.
//!
//! All arithmetic is exact, so every comparison is structural equality of
//! canonical forms (row-reduced coefficient matrices, exact rationals);
//! there are no numeric tolerances anywhere. Wall-clock budgets are pinned
//! per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use loopinv_core::cells::{parametric_kernel_cells, ConstructibleCell};
use loopinv_core::generate::{
    truncated_class, truncated_ideal, truncated_ideal_branch, GenerateOptions,
};
use loopinv_core::general::general_invariants;
use loopinv_core::groebner::{GroebnerBasis, MonomialOrder};
use loopinv_core::invariant::{check_pi, invariant_set};
use loopinv_core::linalg::{same_span, PolyMatrix, QMatrix};
use loopinv_core::loops::{parse_loop, CandidateSpace};
use loopinv_core::parse::parse_poly;
use loopinv_core::poly::monomials_up_to_degree;
use loopinv_core::rational::{rat, rat_frac};
use loopinv_core::termination::{never_terminates_algebraic, TerminationVerdict};
use loopinv_core::{Monomial, Polynomial, Rational, VarContext};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(src: &str, ctx: &Arc<VarContext>) -> Polynomial {
    parse_poly(src, ctx).unwrap()
}

fn ps(srcs: &[&str], ctx: &Arc<VarContext>) -> Vec<Polynomial> {
    srcs.iter().map(|s| p(s, ctx)).collect()
}

fn ctx2() -> Arc<VarContext> {
    VarContext::new(vec!["x1", "x2"]).unwrap()
}

fn ctx3() -> Arc<VarContext> {
    VarContext::new(vec!["x1", "x2", "x3"]).unwrap()
}

fn cubic(ctx: &Arc<VarContext>) -> Polynomial {
    p("x1^2 - x1*x2 + 9*x1^3 - 24*x1^2*x2 + 16*x1*x2^2", ctx)
}

fn linear_map(ctx: &Arc<VarContext>) -> Vec<Polynomial> {
    ps(&["10*x1 - 8*x2", "6*x1 - 4*x2"], ctx)
}

fn fib1_map(ctx: &Arc<VarContext>) -> Vec<Polynomial> {
    ps(&["x2", "x3", "2*x2*x3 - x1"], ctx)
}

fn markov_map(ctx: &Arc<VarContext>) -> Vec<Polynomial> {
    ps(&["x2", "x3", "3*x2*x3 - x1"], ctx)
}

fn nagata_map(ctx: &Arc<VarContext>) -> Vec<Polynomial> {
    ps(
        &[
            "x1 - 2*(x1*x3 + x2^2)*x2 - (x1*x3 + x2^2)^2*x3",
            "x2 + (x1*x3 + x2^2)*x3",
            "x3",
        ],
        ctx,
    )
}

fn squares_map(ctx: &Arc<VarContext>) -> Vec<Polynomial> {
    ps(&["2*x1 + x2^2 + x3", "2*x2 - x2^2 + 2*x3", "1 - x3"], ctx)
}

/// Coefficient rows of the polynomials over the candidate space.
fn rows_of(polys: &[Polynomial], space: &CandidateSpace) -> Vec<Vec<Rational>> {
    polys.iter().map(|f| space.express(f).expect("inside the candidate space")).collect()
}

/// Row-reduced coefficient matrices agree: the two sets span the same
/// subspace of the candidate space.
fn assert_same_invariant_span(got: &[Polynomial], want: &[Polynomial], space: &CandidateSpace) {
    let g = rows_of(got, space);
    let w = rows_of(want, space);
    assert!(
        same_span(&g, &w),
        "span mismatch:\n  got  {:?}\n  want {:?}",
        got.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        want.iter().map(|f| f.to_string()).collect::<Vec<_>>()
    );
}

fn budget(elapsed: Duration, limit: Duration, what: &str) {
    assert!(elapsed < limit, "{what} took {elapsed:.2?}, budget {limit:.2?}");
}

/// The cubic from one fixed start: the fixpoint stops after two blocks with
/// the known first composition, and the membership check rejects the start
/// (0, 1) because the composition evaluates to -480 one step in.
fn criterion_1() {
    let t0 = Instant::now();
    let ctx = ctx2();
    let g = cubic(&ctx);
    let f = linear_map(&ctx);

    let res = invariant_set(std::slice::from_ref(&g), &f, 64).unwrap();
    let composed = p(
        "360*x1^3 - 1248*x1^2*x2 + 40*x1^2 + 1408*x1*x2^2 - 72*x1*x2 - 512*x2^3 + 32*x2^2",
        &ctx,
    );
    assert_eq!(composed, g.compose(&f), "transcribed composition must be g after one step");
    assert_eq!(res.blocks().len(), 2, "the chain must stabilize after two blocks");
    assert_eq!(res.blocks()[0], vec![g.clone()]);
    assert_eq!(res.blocks()[1], vec![composed]);

    let a = [rat(0), rat(1)];
    let report = check_pi(&a, &g, &[], &f, 64).unwrap();
    assert!(!report.holds, "the cubic is not an invariant from (0, 1)");
    assert_eq!(report.failing_value, Some(rat(-480)));
    assert_eq!(g.evaluate(&[rat(-8), rat(-4)]), rat(-480), "g(F(0, 1)) = -480");
    let w = report.witness.expect("a concrete failing state must be produced");
    assert_eq!(w.point, vec![rat(-8), rat(-4)]);
    assert_eq!(w.value, rat(-480));

    budget(t0.elapsed(), Duration::from_secs(1), "criterion 1");
}

/// Degree-2 invariants of the linear loop for every initial value: the
/// ansatz matrix equals the known 5x6 matrix (same row space over Q(x),
/// and in fact entrywise equal up to the generator order), and the case
/// split reproduces all four published initial-value cases: instantiated
/// templates span exactly the tabulated bases.
fn criterion_2() {
    let t0 = Instant::now();
    let ctx = ctx2();
    let space = CandidateSpace::monomials(&ctx, 2);
    let gs = space.generators().to_vec();
    let names: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
    assert_eq!(names, ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"]);
    let f = linear_map(&ctx);

    let cls = truncated_class(&gs, &[], std::slice::from_ref(&f), 64).unwrap();
    let am = cls.matrix();
    assert_eq!((am.matrix().rows, am.matrix().cols), (5, 6));

    // the published matrix rows are the monomials composed with the first
    // five iterates of the map
    let iterates = [
        ("x1", "x2"),
        ("10*x1 - 8*x2", "6*x1 - 4*x2"),
        ("52*x1 - 48*x2", "36*x1 - 32*x2"),
        ("232*x1 - 224*x2", "168*x1 - 160*x2"),
        ("976*x1 - 960*x2", "720*x1 - 704*x2"),
    ];
    let mut entries = Vec::new();
    for (s1, s2) in iterates {
        let u = p(s1, &ctx);
        let v = p(s2, &ctx);
        entries.extend([Polynomial::one(&ctx), u.clone(), v.clone(), u.mul(&u), u.mul(&v), v.mul(&v)]);
    }
    let published = PolyMatrix::new(&ctx, 5, 6, entries);
    // row-space equality over Q(x) by mutual reduction: both matrices and
    // their stack all have the same rank
    assert_eq!(am.matrix().rank(), 5);
    assert_eq!(published.rank(), 5);
    assert_eq!(am.matrix().stack(&published).rank(), 5);
    assert_eq!(am.matrix(), &published, "entrywise agreement in generator column order");

    // the four published initial-value cases; each sample point must land
    // in a cell whose instantiated templates span the tabulated basis
    let z4 = |a: &[Rational]| -> Polynomial {
        let s = rat(3) * &a[0] - rat(4) * &a[1];
        let d = &a[0] - &a[1];
        let s2 = &s * &s;
        space.assemble(&[
            Rational::zero(),
            s2.clone(),
            -s2,
            rat(-9) * &d,
            rat(24) * &d,
            rat(-16) * &d,
        ])
    };
    let t1 = ps(&["x1", "x2", "x1*x2", "x1^2", "x2^2"], &ctx);
    let t2 = ps(&["x1 - x2", "x1^2 - x1*x2", "-x1*x2 + x2^2"], &ctx);
    let t3 = ps(&["3*x1 - 4*x2", "-3*x1^2 + 16*x1*x2 - 16*x2^2", "-3*x1*x2 + 4*x2^2"], &ctx);
    let cases: Vec<(Vec<Vec<Rational>>, Vec<Vec<Polynomial>>)> = vec![
        (vec![vec![rat(0), rat(0)]], vec![t1.clone()]),
        (
            vec![
                vec![rat(1), rat(1)],
                vec![rat(-3), rat(-3)],
                vec![rat_frac(1, 2), rat_frac(1, 2)],
            ],
            vec![t2.clone(), t2.clone(), t2],
        ),
        (
            vec![
                vec![rat(4), rat(3)],
                vec![rat(-4), rat(-3)],
                vec![rat(2), rat_frac(3, 2)],
            ],
            vec![t3.clone(), t3.clone(), t3],
        ),
        (
            vec![vec![rat(1), rat(2)], vec![rat(5), rat(1)], vec![rat(-3), rat(7)]],
            vec![
                vec![z4(&[rat(1), rat(2)])],
                vec![z4(&[rat(5), rat(1)])],
                vec![z4(&[rat(-3), rat(7)])],
            ],
        ),
    ];
    for (points, expected) in &cases {
        for (a, want) in points.iter().zip(expected) {
            assert!(cls.cell_index_for(a).is_some(), "every initial value lies in a cell");
            let got = cls.basis_at(a);
            assert_same_invariant_span(&got, want, &space);
        }
    }

    // the cells cover the plane
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..25 {
        let a = vec![
            rat_frac(rng.gen_range(-30i64..=30), rng.gen_range(1i64..=7)),
            rat_frac(rng.gen_range(-30i64..=30), rng.gen_range(1i64..=7)),
        ];
        assert!(cls.cell_index_for(&a).is_some(), "uncovered point {a:?}");
    }

    budget(t0.elapsed(), Duration::from_secs(30), "criterion 2");
}

/// Truncated invariant ideals of the squares loop from (-1, -1, 1):
/// dimensions 5, 13, 26 at degrees 2, 3, 4, and the degree-2 basis spans
/// the five known polynomials.
fn criterion_3() {
    let t0 = Instant::now();
    let ctx = ctx3();
    let f = squares_map(&ctx);
    let a = [rat(-1), rat(-1), rat(1)];
    let opts = GenerateOptions::default();

    let expected_dims = [(2u32, 5usize), (3, 13), (4, 26)];
    for (d, dim) in expected_dims {
        let space = CandidateSpace::monomials(&ctx, d);
        let basis =
            truncated_ideal(&a, space.generators(), &[], &f, 64, &opts).unwrap();
        assert_eq!(basis.dimension(), dim, "degree {d}");
        if d == 2 {
            // the fifth candidate is listed elsewhere with constant +2, but
            // that variant evaluates to 4 at the initial state and so is
            // provably not an invariant; -2 is the unique constant making
            // the stated quadratic part an invariant of this loop
            let want = ps(
                &[
                    "1 + x1 + x2 + x3",
                    "1 + x1 + x2 + x3^2",
                    "2 + 3*(x1 + x2) + (x1 + x2)^2",
                    "x1^2 - x2^2 + 2*x1*x3 - x1 - 3*x2 - 2",
                    "x2^2 - x1^2 + 2*x2*x3 - x2 - 3*x1 - 2",
                ],
                &ctx,
            );
            assert_same_invariant_span(basis.basis(), &want, &space);
            let misprint = p("x2^2 - x1^2 + 2*x2*x3 - x2 - 3*x1 + 2", &ctx);
            assert_eq!(misprint.evaluate(&a), rat(4), "the +2 variant fails at the start");
        }
    }

    budget(t0.elapsed(), Duration::from_secs(60), "criterion 3");
}

/// The power-sum loop from (0, 0) with guard x2 - 18665: exactly one
/// degree-6 invariant, the closed form of the sum of fifth powers.
fn criterion_4() {
    let t0 = Instant::now();
    let ctx = ctx2();
    let f = ps(&["x1 + x2^5", "x2 + 1"], &ctx);
    let h = p("x2 - 18665", &ctx);
    let a = [rat(0), rat(0)];

    let space = CandidateSpace::monomials(&ctx, 6);
    let basis = truncated_ideal(
        &a,
        space.generators(),
        std::slice::from_ref(&h),
        &f,
        64,
        &GenerateOptions::default(),
    )
    .unwrap();
    assert_eq!(basis.dimension(), 1);
    let want = p("x1 - (1/6*x2^6 - 1/2*x2^5 + 5/12*x2^4 - 1/12*x2^2)", &ctx);
    assert_same_invariant_span(basis.basis(), std::slice::from_ref(&want), &space);

    budget(t0.elapsed(), Duration::from_secs(60), "criterion 4");
}

/// Dimensions of the spaces of initial-value-independent invariants
/// f(x) - f(a) for degrees 1 through 6 on the four three-variable
/// benchmarks, plus the single degree-4 invariant of the first one.
fn criterion_5() {
    let ctx = ctx3();
    let table: [(&str, Vec<Polynomial>, [usize; 6]); 4] = [
        ("fib1", fib1_map(&ctx), [0, 0, 1, 1, 1, 2]),
        ("nagata", nagata_map(&ctx), [1, 3, 5, 8, 11, 15]),
        ("squares", squares_map(&ctx), [0, 1, 1, 2, 2, 3]),
        ("markov", markov_map(&ctx), [0, 0, 1, 1, 1, 2]),
    ];
    for (name, f, dims) in &table {
        for d in 1..=6u32 {
            let t0 = Instant::now();
            let space = CandidateSpace::monomials(&ctx, d);
            let inv = general_invariants(space.generators(), std::slice::from_ref(f));
            assert_eq!(inv.dimension(), dims[d as usize - 1], "{name} degree {d}");
            budget(t0.elapsed(), Duration::from_secs(10), "criterion 5 table cell");
        }
    }

    // the degree-4 fixed polynomial of the first benchmark, up to scalar
    let space = CandidateSpace::monomials(&ctx, 4);
    let inv = general_invariants(space.generators(), &[fib1_map(&ctx)]);
    assert_eq!(inv.dimension(), 1);
    let q = p("x1^2 + x2^2 + x3^2 - 2*x1*x2*x3", &ctx);
    assert_same_invariant_span(inv.basis(), std::slice::from_ref(&q), &space);
    // pinned two-sided presentation q(x) - q(a), compared by cross-scaling
    let dbl = ctx.with_init_symbols();
    let want = q.lifted_to(&dbl).sub(&q.shifted_into(&dbl, ctx.len()));
    let got = &inv.pinned()[0];
    let (m, cw) = want.leading().unwrap();
    let cg = got.coeff(m);
    assert!(!cg.is_zero());
    assert_eq!(want.scalar_mul(&cg), got.scalar_mul(cw), "equal up to scalar");
}

/// Truncated-ideal dimensions at five random integer starts in
/// [-100, 100]^3 per degree, majority vote across the seeds.
fn criterion_6() {
    let ctx = ctx3();
    let table: [(&str, Vec<Polynomial>, [usize; 4]); 2] = [
        ("fib1", fib1_map(&ctx), [0, 0, 1, 4]),
        ("nagata", nagata_map(&ctx), [1, 5, 13, 26]),
    ];
    let opts = GenerateOptions::default();
    for (bi, (name, f, dims)) in table.iter().enumerate() {
        for d in 1..=4u32 {
            let t0 = Instant::now();
            let space = CandidateSpace::monomials(&ctx, d);
            let mut seen = Vec::new();
            for seed in 0..5u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 * bi as u64 + 10 * d as u64 + seed);
                let a: Vec<Rational> =
                    (0..3).map(|_| rat(rng.gen_range(-100i64..=100))).collect();
                let basis =
                    truncated_ideal(&a, space.generators(), &[], f, 64, &opts).unwrap();
                seen.push(basis.dimension());
            }
            let majority = *seen
                .iter()
                .find(|v| seen.iter().filter(|w| w == v).count() >= 3)
                .expect("no majority across the five seeds");
            assert_eq!(majority, dims[d as usize - 1], "{name} degree {d}: {seen:?}");
            budget(t0.elapsed(), Duration::from_secs(120), "criterion 6 benchmark-degree pair");
        }
    }
}

const EX1_LOOP: &str = "vars x1 x2\ninit 0 1\nbranch:\nx1 <- 10*x1 - 8*x2\nx2 <- 6*x1 - 4*x2\n";
const SWAP_OR_ID_LOOP: &str =
    "vars x1 x2\ninit 1 2\nbranch:\nx1 <- x2\nx2 <- x1\nbranch:\nx1 <- x1\nx2 <- x2\n";
const FIB1_LOOP: &str =
    "vars x1 x2 x3\ninit 2 1 1\nbranch:\nx1 <- x2\nx2 <- x3\nx3 <- 2*x2*x3 - x1\n";
const MARKOV_LOOP: &str =
    "vars x1 x2 x3\ninit 1 1 1\nbranch:\nx1 <- x2\nx2 <- x3\nx3 <- 3*x2*x3 - x1\n";
const PS6_LOOP: &str =
    "vars x1 x2\ninit 0 0\nguard x2 - 18665\nbranch:\nx1 <- x1 + x2^5\nx2 <- x2 + 1\n";

/// Soundness oracle: every generated invariant vanishes along randomly
/// scheduled depth-25 unrollings of its loop.
fn soundness_suite() {
    let programs = [
        (EX1_LOOP, 3u32),
        (SWAP_OR_ID_LOOP, 2),
        (FIB1_LOOP, 4),
        (MARKOV_LOOP, 3),
        (PS6_LOOP, 6),
    ];
    let opts = GenerateOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (text, degree) in programs {
        let prog = parse_loop(text).unwrap();
        let a = prog.concrete_init().unwrap().to_vec();
        let hs = prog.inequation_polys().unwrap();
        let gs = CandidateSpace::monomials(prog.vars(), degree).generators().to_vec();
        let basis =
            truncated_ideal_branch(&a, &gs, &hs, prog.branches(), 64, &opts).unwrap();
        for _ in 0..5 {
            let schedule: Vec<usize> =
                (0..25).map(|_| rng.gen_range(0..prog.branch_count())).collect();
            let points = prog.unroll(&a, &schedule).unwrap();
            for f in basis.basis() {
                for pt in &points {
                    assert!(
                        f.evaluate(pt).is_zero(),
                        "`{f}` is nonzero at {pt:?} along {schedule:?}"
                    );
                }
            }
        }
    }
}

/// Random polynomial with the given degree bound and small coefficients;
/// roughly half the monomials are dropped.
fn random_poly(rng: &mut ChaCha8Rng, ctx: &Arc<VarContext>, d: u32) -> Polynomial {
    let terms: Vec<(Monomial, Rational)> = monomials_up_to_degree(ctx, d)
        .into_iter()
        .filter_map(|m| {
            if rng.gen_bool(0.5) {
                return None;
            }
            let c = rng.gen_range(-2i64..=2);
            (c != 0).then(|| (m, rat(c)))
        })
        .collect();
    Polynomial::from_terms(ctx, terms)
}

/// Completeness oracle: on random bounded-orbit loops the generated basis
/// dimension equals the kernel dimension of the brute-force trajectory
/// constraint matrix unrolled to depth 3*(m+1). The trajectory rows
/// over-constrain, so equality certifies that no invariant was missed.
fn completeness_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = GenerateOptions::default();
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 50 {
        attempts += 1;
        assert!(attempts < 4000, "rejection sampling failed to find 50 bounded-orbit loops");
        let n = rng.gen_range(1usize..=3);
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let ctx = VarContext::new(names).unwrap();
        let f: Vec<Polynomial> = (0..n).map(|_| random_poly(&mut rng, &ctx, 2)).collect();
        let a: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(-3i64..=3))).collect();

        let space = CandidateSpace::monomials(&ctx, 2);
        let m = space.dim();
        let depth = 3 * (m + 1);
        let mut points = vec![a.clone()];
        let mut cur = a.clone();
        let mut bounded = true;
        for _ in 0..depth {
            cur = f.iter().map(|q| q.evaluate(&cur)).collect();
            if cur.iter().any(|v| v.numer().bits() + v.denom().bits() > 192) {
                bounded = false;
                break;
            }
            points.push(cur.clone());
        }
        if !bounded {
            continue;
        }
        accepted += 1;

        let rows: Vec<Vec<Rational>> = points
            .iter()
            .map(|pt| space.generators().iter().map(|g| g.evaluate(pt)).collect())
            .collect();
        let oracle_dim = QMatrix::from_rows(rows).kernel_basis().len();
        let basis = truncated_ideal(&a, space.generators(), &[], &f, 64, &opts).unwrap();
        assert_eq!(
            basis.dimension(),
            oracle_dim,
            "loop {:?} from {a:?}",
            f.iter().map(|q| q.to_string()).collect::<Vec<_>>()
        );
    }
}

fn leading_under(f: &Polynomial, order: MonomialOrder) -> (Monomial, Rational) {
    let (m, c) = f.terms().max_by(|a, b| order.cmp(a.0, b.0)).unwrap();
    (m.clone(), c.clone())
}

fn s_poly(f: &Polynomial, g: &Polynomial, order: MonomialOrder) -> Polynomial {
    let (mf, cf) = leading_under(f, order);
    let (mg, cg) = leading_under(g, order);
    let l = mf.lcm(&mg);
    let uf = mf.div_into(&l).unwrap();
    let ug = mg.div_into(&l).unwrap();
    f.mul_monomial(&uf, &cf.recip()).sub(&g.mul_monomial(&ug, &cg.recip()))
}

/// Groebner suite: every S-polynomial of a computed basis reduces to zero,
/// and radical membership agrees with the low-power containment oracle on
/// small random instances.
fn groebner_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for round in 0..40 {
        let n = rng.gen_range(1usize..=2);
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let ctx = VarContext::new(names).unwrap();
        let k = rng.gen_range(1usize..=3);
        let gens: Vec<Polynomial> = (0..k).map(|_| random_poly(&mut rng, &ctx, 2)).collect();
        let order = if round % 2 == 0 { MonomialOrder::GrevLex } else { MonomialOrder::Lex };
        let gb = GroebnerBasis::new(&gens, &ctx, order);

        let polys = gb.polys();
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                let s = s_poly(&polys[i], &polys[j], order);
                assert!(
                    gb.normal_form(&s).is_zero(),
                    "S-polynomial of basis elements {i}, {j} does not reduce to zero"
                );
            }
        }

        let f = random_poly(&mut rng, &ctx, 2);
        let oracle = (1..=6u32).any(|r| gb.contains(&f.pow(r)));
        assert_eq!(
            gb.in_radical(&f),
            oracle,
            "radical membership of `{f}` disagrees with the power oracle"
        );
    }
}

/// The kernel contract at one point of one cell: the stored rational
/// kernel evaluates to a basis of the kernel of the evaluated matrix.
fn check_cell_point(cell: &ConstructibleCell, a: &PolyMatrix, point: &[Rational]) {
    let k = cell.kernel_at(point).expect("point was matched to this cell");
    let at = a.evaluate(point);
    assert_eq!(k.len(), a.cols - at.rank(), "kernel dimension at {point:?}");
    for v in &k {
        for i in 0..a.rows {
            let dot: Rational =
                (0..a.cols).map(|j| at.get(i, j) * &v[j]).fold(Rational::zero(), |s, t| s + t);
            assert!(dot.is_zero(), "kernel vector not annihilated at {point:?}");
        }
    }
    if !k.is_empty() {
        assert_eq!(QMatrix::from_rows(k.clone()).rank(), k.len(), "independent columns");
        assert!(same_span(&k, &at.kernel_basis()), "span differs from the direct kernel");
    }
}

/// Parametric cells suite: on a structured matrix whose degenerate strata
/// are reachable, every cell is exercised on up to 50 in-cell points; on a
/// random matrix and the scalar 1x1 matrix, every sampled point is covered
/// and its first matching cell satisfies the kernel contract.
fn cells_suite() {
    // structured: the 5x6 matrix of the linear loop, variables as parameters
    let ctx = ctx2();
    let iterates = [
        ("x1", "x2"),
        ("10*x1 - 8*x2", "6*x1 - 4*x2"),
        ("52*x1 - 48*x2", "36*x1 - 32*x2"),
        ("232*x1 - 224*x2", "168*x1 - 160*x2"),
        ("976*x1 - 960*x2", "720*x1 - 704*x2"),
    ];
    let mut entries = Vec::new();
    for (s1, s2) in iterates {
        let u = p(s1, &ctx);
        let v = p(s2, &ctx);
        entries.extend([Polynomial::one(&ctx), u.clone(), v.clone(), u.mul(&u), u.mul(&v), v.mul(&v)]);
    }
    let a = PolyMatrix::new(&ctx, 5, 6, entries);
    let cells = parametric_kernel_cells(&a);
    assert!(!cells.is_empty());

    let mut pool: Vec<Vec<Rational>> = vec![vec![rat(0), rat(0)]];
    for t in 1..=15i64 {
        for sign in [1, -1] {
            let s = rat(sign * t);
            pool.push(vec![s.clone(), s.clone()]);
            pool.push(vec![rat(4 * sign * t), rat(3 * sign * t)]);
            let h = rat_frac(sign * (2 * t - 1), 2);
            pool.push(vec![h.clone(), h.clone()]);
            pool.push(vec![&h * rat(4), &h * rat(3)]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..60 {
        pool.push(vec![
            rat_frac(rng.gen_range(-40i64..=40), rng.gen_range(1i64..=9)),
            rat_frac(rng.gen_range(-40i64..=40), rng.gen_range(1i64..=9)),
        ]);
    }
    let mut per_cell = vec![0usize; cells.len()];
    for point in &pool {
        let idx = cells
            .iter()
            .position(|c| c.contains(point))
            .expect("every parameter point lies in a cell");
        if per_cell[idx] < 50 {
            per_cell[idx] += 1;
            check_cell_point(&cells[idx], &a, point);
        }
    }
    assert!(per_cell.iter().all(|&c| c > 0), "an unreachable cell was produced: {per_cell:?}");

    // random 3x4 matrix with affine entries
    let b = PolyMatrix::new(
        &ctx,
        3,
        4,
        (0..12).map(|_| random_poly(&mut rng, &ctx, 1)).collect(),
    );
    let bcells = parametric_kernel_cells(&b);
    for _ in 0..50 {
        let point = vec![
            rat_frac(rng.gen_range(-20i64..=20), rng.gen_range(1i64..=5)),
            rat_frac(rng.gen_range(-20i64..=20), rng.gen_range(1i64..=5)),
        ];
        let idx = bcells.iter().position(|c| c.contains(&point)).expect("covered");
        check_cell_point(&bcells[idx], &b, &point);
    }

    // scalar 1x1 matrix: both cells, checked exhaustively at +-1..25 and 0
    let uctx = VarContext::new(vec!["u"]).unwrap();
    let s = PolyMatrix::new(&uctx, 1, 1, vec![p("u", &uctx)]);
    let scells = parametric_kernel_cells(&s);
    assert_eq!(scells.len(), 2);
    for t in -25i64..=25 {
        let point = vec![rat(t)];
        let idx = scells.iter().position(|c| c.contains(&point)).unwrap();
        check_cell_point(&scells[idx], &s, &point);
        assert_eq!(idx == 1, t == 0, "the degenerate cell is exactly u = 0");
    }
}

/// Property suites: soundness along random unrollings, completeness
/// against brute-force trajectory kernels, the Groebner reductions, and
/// the parametric kernel cells. Zero failures permitted.
fn criterion_7() {
    soundness_suite();
    completeness_suite();
    groebner_suite();
    cells_suite();
}

/// Termination of algebraic loops: the verdict matches direct membership
/// in the common zero set of the guard and its composition on random
/// points, and the swap loop gives the two known verdicts.
fn criterion_8() {
    let t0 = Instant::now();
    let ctx = ctx2();
    let g = cubic(&ctx);
    let f = linear_map(&ctx);
    let gf = g.compose(&f);

    let mut points: Vec<Vec<Rational>> = vec![
        vec![rat(0), rat(0)],
        vec![rat_frac(0, 1), rat_frac(1, 16)],
        vec![rat(0), rat(5)],
        vec![rat(1), rat(1)],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        points.push(vec![
            rat_frac(rng.gen_range(-12i64..=12), rng.gen_range(1i64..=8)),
            rat_frac(rng.gen_range(-12i64..=12), rng.gen_range(1i64..=8)),
        ]);
    }
    for a in &points {
        let direct = g.evaluate(a).is_zero() && gf.evaluate(a).is_zero();
        let verdict =
            never_terminates_algebraic(a, std::slice::from_ref(&g), &f, 64).unwrap();
        assert_eq!(
            matches!(verdict, TerminationVerdict::NeverTerminates),
            direct,
            "verdict at {a:?} disagrees with direct evaluation"
        );
    }

    let swap = ps(&["x2", "x1"], &ctx);
    let diag = p("x1 - x2", &ctx);
    let stay =
        never_terminates_algebraic(&[rat(1), rat(1)], std::slice::from_ref(&diag), &swap, 64)
            .unwrap();
    assert_eq!(stay, TerminationVerdict::NeverTerminates);
    let leave =
        never_terminates_algebraic(&[rat(1), rat(2)], std::slice::from_ref(&diag), &swap, 64)
            .unwrap();
    assert_eq!(
        leave,
        TerminationVerdict::Terminates {
            schedule: vec![],
            point: vec![rat(1), rat(2)],
            guard_index: 0,
            value: rat(-1),
        }
    );

    budget(t0.elapsed(), Duration::from_secs(1), "criterion 8");
}

#[test]
fn acceptance() {
    let checks: &[(&str, fn())] = &[
        ("criterion 1: two-block fixpoint rejects the cubic from (0, 1)", criterion_1),
        ("criterion 2: 5x6 ansatz matrix and the four initial-value cases", criterion_2),
        ("criterion 3: squares-loop truncated ideals have dimensions 5, 13, 26", criterion_3),
        ("criterion 4: power-sum loop has exactly the degree-6 closed form", criterion_4),
        ("criterion 5: degree-1..6 dimensions of start-independent invariants", criterion_5),
        ("criterion 6: truncated dimensions at random starts, majority of 5 seeds", criterion_6),
        ("criterion 7: soundness, completeness, Groebner, and cell suites", criterion_7),
        ("criterion 8: non-termination verdict matches direct variety membership", criterion_8),
    ];
    let mut failures = Vec::new();
    for (label, run) in checks {
        let t0 = Instant::now();
        match catch_unwind(AssertUnwindSafe(run)) {
            Ok(()) => println!("pass: {label} ({:.2?})", t0.elapsed()),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .map(|s| s.as_str())
                    .or_else(|| e.downcast_ref::<&str>().copied())
                    .unwrap_or("panic");
                println!("FAIL: {label} ({:.2?}): {msg}", t0.elapsed());
                failures.push(*label);
            }
        }
    }
    assert!(failures.is_empty(), "failed: {failures:?}");
}

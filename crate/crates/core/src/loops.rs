//! Loop programs and their text format.
//!
//! A program is a tuple of variables, an initial state (concrete rationals
//! or symbolic), guard polynomials, and one or more simultaneous polynomial
//! update branches. The file format is line oriented:
//!
//! ```text
//! vars x1 x2 ... xn
//! init v1 v2 ... vn        # or: init symbolic
//! guard <poly>             # zero or more, each read as <poly> != 0
//! branch:
//! x1 <- <poly>
//! ...
//! xn <- <poly>
//! ```
//!
//! `#` starts a comment. Guards may carry a trailing `>= 0` or `> 0`;
//! such inequality guards are stored but rejected by every analysis that
//! only supports inequation guards. A guard that is identically zero is
//! rejected at parse time (the loop body would be unreachable).

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::context::{same_context, ContextError, VarContext};
use crate::linalg::QMatrix;
use crate::parse::{parse_poly, ParseError};
use crate::poly::{monomials_up_to_degree, Polynomial};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Error, PartialEq)]
pub enum LoopError {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("line {line}: guard polynomial is identically zero, the loop body is unreachable")]
    ZeroGuard { line: usize },
    #[error("branch {branch} has {got} updates, expected {expected}")]
    ArityMismatch { branch: usize, got: usize, expected: usize },
    #[error("a loop needs at least one branch")]
    NoBranches,
    #[error("initial state has {got} values, expected {expected}")]
    InitArity { got: usize, expected: usize },
    #[error("branch index {index} out of range, the loop has {count} branches")]
    BranchIndex { index: usize, count: usize },
    #[error("this analysis supports inequation guards only; `{guard}` is an inequality guard")]
    InequalityGuard { guard: String },
    #[error("this operation requires a concrete initial state, the loop declares `init symbolic`")]
    SymbolicInit,
    #[error("candidate generators are linearly dependent")]
    DependentGenerators,
    #[error("candidate space needs at least one generator")]
    EmptyCandidateSpace,
}

fn err_at(line: usize, col: usize, message: impl Into<String>) -> LoopError {
    LoopError::Parse { line, col, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Concrete(Vec<Rational>),
    Symbolic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardKind {
    /// The guard holds while the polynomial is nonzero.
    Inequation,
    /// Sign condition `>= 0` (or `> 0`); stored, not analyzed.
    Inequality { strict: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Guard {
    pub poly: Polynomial,
    pub kind: GuardKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopProgram {
    vars: Arc<VarContext>,
    init: InitialState,
    guards: Vec<Guard>,
    branches: Vec<Vec<Polynomial>>,
}

impl LoopProgram {
    pub fn new(
        vars: Arc<VarContext>,
        init: InitialState,
        guards: Vec<Guard>,
        branches: Vec<Vec<Polynomial>>,
    ) -> Result<Self, LoopError> {
        let n = vars.len();
        if branches.is_empty() {
            return Err(LoopError::NoBranches);
        }
        for (b, branch) in branches.iter().enumerate() {
            if branch.len() != n {
                return Err(LoopError::ArityMismatch { branch: b, got: branch.len(), expected: n });
            }
            for p in branch {
                assert!(same_context(p.context(), &vars), "update context mismatch");
            }
        }
        for g in &guards {
            assert!(same_context(g.poly.context(), &vars), "guard context mismatch");
            if g.poly.is_zero() {
                return Err(LoopError::ZeroGuard { line: 0 });
            }
        }
        if let InitialState::Concrete(vals) = &init {
            if vals.len() != n {
                return Err(LoopError::InitArity { got: vals.len(), expected: n });
            }
        }
        Ok(LoopProgram { vars, init, guards, branches })
    }

    pub fn vars(&self) -> &Arc<VarContext> {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn init(&self) -> &InitialState {
        &self.init
    }

    pub fn concrete_init(&self) -> Result<&[Rational], LoopError> {
        match &self.init {
            InitialState::Concrete(v) => Ok(v),
            InitialState::Symbolic => Err(LoopError::SymbolicInit),
        }
    }

    pub fn guards(&self) -> &[Guard] {
        &self.guards
    }

    pub fn branches(&self) -> &[Vec<Polynomial>] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn is_single_path(&self) -> bool {
        self.branches.len() == 1
    }

    /// The guard polynomials, provided every guard is an inequation.
    pub fn inequation_polys(&self) -> Result<Vec<Polynomial>, LoopError> {
        self.guards
            .iter()
            .map(|g| match g.kind {
                GuardKind::Inequation => Ok(g.poly.clone()),
                GuardKind::Inequality { .. } => {
                    Err(LoopError::InequalityGuard { guard: g.poly.to_string() })
                }
            })
            .collect()
    }

    /// Trajectory a, F(a), ... following the branch schedule, starting point
    /// included. Stops early (after recording the state) when any guard
    /// polynomial evaluates to 0: the loop exits there.
    pub fn unroll(
        &self,
        a: &[Rational],
        schedule: &[usize],
    ) -> Result<Vec<Vec<Rational>>, LoopError> {
        if a.len() != self.arity() {
            return Err(LoopError::InitArity { got: a.len(), expected: self.arity() });
        }
        let mut points = vec![a.to_vec()];
        let mut cur = a.to_vec();
        for &i in schedule {
            if i >= self.branches.len() {
                return Err(LoopError::BranchIndex { index: i, count: self.branches.len() });
            }
            if self.guards.iter().any(|g| g.poly.evaluate(&cur).is_zero()) {
                break;
            }
            cur = self.branches[i].iter().map(|p| p.evaluate(&cur)).collect();
            points.push(cur.clone());
        }
        Ok(points)
    }
}

impl fmt::Display for LoopProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.vars)?;
        match &self.init {
            InitialState::Symbolic => writeln!(f, "init symbolic")?,
            InitialState::Concrete(vals) => {
                let vs: Vec<String> = vals.iter().map(format_rational).collect();
                writeln!(f, "init {}", vs.join(" "))?;
            }
        }
        for g in &self.guards {
            match g.kind {
                GuardKind::Inequation => writeln!(f, "guard {}", g.poly)?,
                GuardKind::Inequality { strict: false } => writeln!(f, "guard {} >= 0", g.poly)?,
                GuardKind::Inequality { strict: true } => writeln!(f, "guard {} > 0", g.poly)?,
            }
        }
        for branch in &self.branches {
            writeln!(f, "branch:")?;
            for (i, p) in branch.iter().enumerate() {
                writeln!(f, "{} <- {}", self.vars.name(i), p)?;
            }
        }
        Ok(())
    }
}

fn parse_poly_at(
    raw: &str,
    expr_start: usize,
    line_no: usize,
    ctx: &Arc<VarContext>,
) -> Result<Polynomial, LoopError> {
    let expr = &raw[expr_start..];
    parse_poly(expr, ctx).map_err(|e: ParseError| {
        let col = if e.line == 1 { expr_start + e.col } else { e.col };
        err_at(line_no, col, e.message)
    })
}

/// Parses the loop file format described in the module docs.
pub fn parse_loop(text: &str) -> Result<LoopProgram, LoopError> {
    struct Line<'a> {
        no: usize,
        raw: &'a str,
    }
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .map(|(i, l)| Line { no: i + 1, raw: l.split('#').next().unwrap_or("") })
        .filter(|l| !l.raw.trim().is_empty())
        .collect();
    let mut it = lines.iter().peekable();

    let vars_line = it.next().ok_or_else(|| err_at(1, 1, "empty loop file"))?;
    let mut toks = vars_line.raw.split_whitespace();
    if toks.next() != Some("vars") {
        return Err(err_at(vars_line.no, 1, "expected a `vars` line first"));
    }
    let names: Vec<&str> = toks.collect();
    let vars = VarContext::new(names).map_err(|e: ContextError| {
        err_at(vars_line.no, 1, format!("bad variable list: {e}"))
    })?;
    let n = vars.len();

    let init_line =
        it.next().ok_or_else(|| err_at(vars_line.no + 1, 1, "expected an `init` line"))?;
    let mut toks = init_line.raw.split_whitespace();
    if toks.next() != Some("init") {
        return Err(err_at(init_line.no, 1, "expected an `init` line after `vars`"));
    }
    let rest: Vec<&str> = toks.collect();
    let init = if rest == ["symbolic"] {
        InitialState::Symbolic
    } else {
        let vals: Vec<Rational> = rest
            .iter()
            .map(|s| {
                parse_rational(s)
                    .ok_or_else(|| err_at(init_line.no, 1, format!("bad rational literal `{s}`")))
            })
            .collect::<Result<_, _>>()?;
        if vals.len() != n {
            return Err(err_at(
                init_line.no,
                1,
                format!("init has {} values, expected {n}", vals.len()),
            ));
        }
        InitialState::Concrete(vals)
    };

    let mut guards = Vec::new();
    while let Some(line) = it.peek() {
        let trimmed = line.raw.trim_start();
        if !trimmed.starts_with("guard") || !trimmed["guard".len()..].starts_with([' ', '\t']) {
            break;
        }
        let line = it.next().unwrap();
        let body_start = line.raw.find("guard").unwrap() + "guard".len();
        let body = &line.raw[body_start..];
        let (expr_text, kind) = if let Some(k) = body.find(">=") {
            if body[k + 2..].trim() != "0" {
                return Err(err_at(line.no, body_start + k + 1, "expected `>= 0`"));
            }
            (&body[..k], GuardKind::Inequality { strict: false })
        } else if let Some(k) = body.find('>') {
            if body[k + 1..].trim() != "0" {
                return Err(err_at(line.no, body_start + k + 1, "expected `> 0`"));
            }
            (&body[..k], GuardKind::Inequality { strict: true })
        } else {
            (body, GuardKind::Inequation)
        };
        let poly = parse_poly_at(
            &line.raw[..body_start + expr_text.len()],
            body_start,
            line.no,
            &vars,
        )?;
        if poly.is_zero() {
            return Err(LoopError::ZeroGuard { line: line.no });
        }
        guards.push(Guard { poly, kind });
    }

    let mut branches: Vec<Vec<Polynomial>> = Vec::new();
    while let Some(line) = it.next() {
        if line.raw.trim() != "branch:" {
            return Err(err_at(line.no, 1, "expected `branch:`"));
        }
        let mut updates: Vec<Option<Polynomial>> = vec![None; n];
        for _ in 0..n {
            let Some(l) = it.next() else {
                return Err(err_at(
                    line.no,
                    1,
                    format!("branch needs {n} update lines `name <- <poly>`"),
                ));
            };
            let Some(arrow) = l.raw.find("<-") else {
                return Err(err_at(l.no, 1, "expected an update line `name <- <poly>`"));
            };
            let name = l.raw[..arrow].trim();
            let Some(idx) = vars.index_of(name) else {
                return Err(err_at(l.no, 1, format!("`{name}` is not a loop variable")));
            };
            if updates[idx].is_some() {
                return Err(err_at(l.no, 1, format!("`{name}` is assigned twice in this branch")));
            }
            updates[idx] = Some(parse_poly_at(l.raw, arrow + 2, l.no, &vars)?);
        }
        branches.push(updates.into_iter().map(Option::unwrap).collect());
    }
    if branches.is_empty() {
        return Err(err_at(
            lines.last().map(|l| l.no).unwrap_or(1),
            1,
            "expected at least one `branch:` block",
        ));
    }
    LoopProgram::new(vars, init, guards, branches)
}

/// A finite-dimensional space of candidate polynomials, presented by
/// linearly independent generators.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSpace {
    ctx: Arc<VarContext>,
    generators: Vec<Polynomial>,
}

impl CandidateSpace {
    /// All monomials of total degree <= d, in the canonical sequence order.
    pub fn monomials(ctx: &Arc<VarContext>, d: u32) -> Self {
        let generators = monomials_up_to_degree(ctx, d)
            .into_iter()
            .map(|m| Polynomial::monomial(ctx, m, Rational::from_integer(1.into())))
            .collect();
        CandidateSpace { ctx: Arc::clone(ctx), generators }
    }

    pub fn new(generators: Vec<Polynomial>) -> Result<Self, LoopError> {
        let Some(first) = generators.first() else {
            return Err(LoopError::EmptyCandidateSpace);
        };
        let ctx = Arc::clone(first.context());
        for g in &generators {
            assert!(same_context(g.context(), &ctx), "generator context mismatch");
        }
        let space = CandidateSpace { ctx, generators };
        if space.coefficient_matrix().0.rank() != space.generators.len() {
            return Err(LoopError::DependentGenerators);
        }
        Ok(space)
    }

    pub fn context(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// Rows = generators, columns = the union of their monomials in
    /// canonical order; returns the matrix and the column monomials.
    fn coefficient_matrix(&self) -> (QMatrix, Vec<crate::poly::Monomial>) {
        let mut monos: Vec<crate::poly::Monomial> = Vec::new();
        {
            let mut seen = std::collections::BTreeSet::new();
            for g in &self.generators {
                for (m, _) in g.terms() {
                    seen.insert(m.clone());
                }
            }
            monos.extend(seen);
        }
        let rows = self
            .generators
            .iter()
            .map(|g| monos.iter().map(|m| g.coeff(m)).collect())
            .collect();
        (QMatrix::from_rows(rows), monos)
    }

    /// Coordinates of f in the generator basis, if f lies in the space.
    pub fn express(&self, f: &Polynomial) -> Option<Vec<Rational>> {
        assert!(same_context(f.context(), &self.ctx), "context mismatch");
        let (g, monos) = self.coefficient_matrix();
        for (m, _) in f.terms() {
            if !monos.contains(m) {
                return None;
            }
        }
        // solve c * G = f by row-reducing [G^T | f^T]
        let m = self.generators.len();
        let mut rows = Vec::with_capacity(monos.len());
        for (j, mono) in monos.iter().enumerate() {
            let mut row: Vec<Rational> = (0..m).map(|i| g.get(i, j).clone()).collect();
            row.push(f.coeff(mono));
            rows.push(row);
        }
        let mut aug = QMatrix::from_rows(rows);
        let pivots = aug.rref();
        if pivots.contains(&m) {
            return None; // inconsistent
        }
        let mut c = vec![Rational::zero(); m];
        for (row, &col) in pivots.iter().enumerate() {
            c[col] = aug.get(row, m).clone();
        }
        Some(c)
    }

    /// The combination sum_i c_i g_i.
    pub fn assemble(&self, c: &[Rational]) -> Polynomial {
        assert_eq!(c.len(), self.generators.len());
        let mut acc = Polynomial::zero(&self.ctx);
        for (ci, g) in c.iter().zip(&self.generators) {
            if !ci.is_zero() {
                acc = acc.add(&g.scalar_mul(ci));
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    const SQUARES: &str = "\
# three coupled squares
vars x1 x2 x3
init -1 -1 1
branch:
x1 <- 2*x1 + x2^2 + x3
x2 <- 2*x2 - x2^2 + 2*x3
x3 <- 1 - x3
";

    #[test]
    fn parses_squares() {
        let l = parse_loop(SQUARES).unwrap();
        assert_eq!(l.arity(), 3);
        assert_eq!(l.branch_count(), 1);
        assert!(l.guards().is_empty());
        assert_eq!(l.concrete_init().unwrap(), &[rat(-1), rat(-1), rat(1)]);
        let pts = l.unroll(&[rat(-1), rat(-1), rat(1)], &[0]).unwrap();
        assert_eq!(pts, vec![vec![rat(-1), rat(-1), rat(1)], vec![rat(0), rat(-1), rat(0)]]);
    }

    #[test]
    fn parses_guard_and_unrolls_ps6() {
        let src = "vars x1 x2\ninit 0 0\nguard x2 - 18665\nbranch:\nx1 <- x1 + x2^5\nx2 <- x2 + 1\n";
        let l = parse_loop(src).unwrap();
        assert_eq!(l.guards().len(), 1);
        assert_eq!(l.guards()[0].kind, GuardKind::Inequation);
        let pts = l.unroll(&[rat(0), rat(0)], &[0, 0, 0]).unwrap();
        assert_eq!(
            pts,
            vec![
                vec![rat(0), rat(0)],
                vec![rat(0), rat(1)],
                vec![rat(1), rat(2)],
                vec![rat(33), rat(3)],
            ]
        );
    }

    #[test]
    fn swap_orbit_has_period_two() {
        let src = "vars x1 x2\ninit 1 2\nbranch:\nx1 <- x2\nx2 <- x1\n";
        let l = parse_loop(src).unwrap();
        let pts = l.unroll(&[rat(1), rat(2)], &[0, 0, 0, 0]).unwrap();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], pts[2]);
        assert_eq!(pts[1], pts[3]);
        assert_eq!(pts[1], vec![rat(2), rat(1)]);
    }

    #[test]
    fn unroll_stops_when_a_guard_vanishes() {
        let src = "vars x1\ninit 0\nguard x1 - 1\nbranch:\nx1 <- x1 + 1\n";
        let l = parse_loop(src).unwrap();
        let pts = l.unroll(&[rat(0)], &[0, 0, 0, 0, 0]).unwrap();
        assert_eq!(pts, vec![vec![rat(0)], vec![rat(1)]]);
    }

    #[test]
    fn identity_single_var_loop() {
        let l = parse_loop("vars x1\ninit 3\nbranch:\nx1 <- x1\n").unwrap();
        assert!(l.is_single_path());
        assert_eq!(l.unroll(&[rat(3)], &[0, 0]).unwrap().len(), 3);
    }

    #[test]
    fn branching_loops_and_schedules() {
        let src = "vars x1 x2\ninit 1 2\nbranch:\nx1 <- x2\nx2 <- x1\nbranch:\nx1 <- x1\nx2 <- x2\n";
        let l = parse_loop(src).unwrap();
        assert_eq!(l.branch_count(), 2);
        let pts = l.unroll(&[rat(1), rat(2)], &[0, 1, 0]).unwrap();
        assert_eq!(
            pts,
            vec![
                vec![rat(1), rat(2)],
                vec![rat(2), rat(1)],
                vec![rat(2), rat(1)],
                vec![rat(1), rat(2)],
            ]
        );
        let e = l.unroll(&[rat(1), rat(2)], &[2]).unwrap_err();
        assert_eq!(e, LoopError::BranchIndex { index: 2, count: 2 });
    }

    #[test]
    fn inequality_guards_are_stored_but_flagged() {
        let src = "vars x1\ninit 0\nguard x1 >= 0\nguard x1 - 5 > 0\nbranch:\nx1 <- x1 + 1\n";
        let l = parse_loop(src).unwrap();
        assert_eq!(l.guards()[0].kind, GuardKind::Inequality { strict: false });
        assert_eq!(l.guards()[1].kind, GuardKind::Inequality { strict: true });
        assert!(matches!(l.inequation_polys(), Err(LoopError::InequalityGuard { .. })));
    }

    #[test]
    fn print_then_parse_is_identity() {
        for src in [
            SQUARES,
            "vars x1 x2\ninit symbolic\nguard x1 >= 0\nbranch:\nx1 <- x2\nx2 <- x1\nbranch:\nx1 <- x1\nx2 <- x2\n",
            "vars x1 x2\ninit 1/2 -3\nguard x1 - x2\nbranch:\nx1 <- x1^2\nx2 <- x2\n",
        ] {
            let l = parse_loop(src).unwrap();
            assert_eq!(parse_loop(&l.to_string()).unwrap(), l);
        }
    }

    #[test]
    fn parse_errors_are_located() {
        let e = parse_loop("vars x1\ninit 1\nbranch:\nx1 <- x1 +\n").unwrap_err();
        assert!(matches!(e, LoopError::Parse { line: 4, .. }), "{e}");
        let e = parse_loop("vars x1\ninit 1 2\nbranch:\nx1 <- x1\n").unwrap_err();
        assert!(matches!(e, LoopError::Parse { line: 2, .. }), "{e}");
        let e = parse_loop("vars x1\ninit 1\nguard 2 - 2\nbranch:\nx1 <- x1\n").unwrap_err();
        assert_eq!(e, LoopError::ZeroGuard { line: 3 });
        let e = parse_loop("vars x1\ninit 1\n").unwrap_err();
        assert!(matches!(e, LoopError::Parse { .. }));
        let e = parse_loop("vars x1 x2\ninit 1 2\nbranch:\nx1 <- x1\nx1 <- x2\n").unwrap_err();
        assert!(matches!(e, LoopError::Parse { line: 5, .. }), "{e}");
        let e = parse_loop("vars x1\ninit 1\nbranch:\nx2 <- x1\n").unwrap_err();
        assert!(matches!(e, LoopError::Parse { line: 4, .. }), "{e}");
    }

    #[test]
    fn candidate_space_checks_independence() {
        let ctx = VarContext::new(vec!["x1", "x2"]).unwrap();
        let e = CandidateSpace::monomials(&ctx, 2);
        assert_eq!(e.dim(), 6);
        let deps = vec![
            parse_poly("x1 + x2", &ctx).unwrap(),
            parse_poly("x1", &ctx).unwrap(),
            parse_poly("2*x2 + 2*x1", &ctx).unwrap(),
        ];
        assert_eq!(CandidateSpace::new(deps).unwrap_err(), LoopError::DependentGenerators);
        let ok = CandidateSpace::new(vec![
            parse_poly("x1 + x2", &ctx).unwrap(),
            parse_poly("x1 - x2", &ctx).unwrap(),
        ])
        .unwrap();
        assert_eq!(ok.dim(), 2);
    }

    #[test]
    fn express_and_assemble_round_trip() {
        let ctx = VarContext::new(vec!["x1", "x2"]).unwrap();
        let e = CandidateSpace::monomials(&ctx, 2);
        let f = parse_poly("3 - x1*x2 + 1/2*x2^2", &ctx).unwrap();
        let c = e.express(&f).unwrap();
        assert_eq!(e.assemble(&c), f);
        // canonical generator order: 1, x1, x2, x1^2, x1*x2, x2^2
        assert_eq!(c, vec![rat(3), rat(0), rat(0), rat(0), rat(-1), rat_frac_half()]);
        // outside the space
        let g = parse_poly("x1^3", &ctx).unwrap();
        assert!(e.express(&g).is_none());
        // inside the monomial support but dependent check
        let small = CandidateSpace::new(vec![parse_poly("x1 + x2", &ctx).unwrap()]).unwrap();
        assert!(small.express(&parse_poly("x1 - x2", &ctx).unwrap()).is_none());
        assert_eq!(small.express(&parse_poly("2*x1 + 2*x2", &ctx).unwrap()), Some(vec![rat(2)]));
    }

    fn rat_frac_half() -> Rational {
        crate::rational::rat_frac(1, 2)
    }
}

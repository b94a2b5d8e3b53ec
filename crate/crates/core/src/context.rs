//! Ordered variable contexts.
//!
//! A [`VarContext`] fixes the ordered list of variable names a polynomial
//! lives over. Program variables always come first; algorithms that need
//! fresh unknowns (coefficient symbols y1..ym, the saturation variable z,
//! the radical-membership variable t, initial-value symbols a1..an) extend
//! a context *at the end*, so an exponent vector over the base context
//! embeds into an extension by zero-padding.
//!
//! The names y<digits>, a<digits>, z, and t are reserved for those internal
//! roles and are refused in user input.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContextError {
    #[error("variable list is empty")]
    Empty,
    #[error("invalid variable name `{0}`")]
    BadName(String),
    #[error("variable name `{0}` is reserved")]
    Reserved(String),
    #[error("duplicate variable name `{0}`")]
    Duplicate(String),
}

/// True for names an identifier token may take.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// True for names reserved for internal variable blocks: z, t, y<digits>,
/// a<digits>.
pub fn is_reserved(s: &str) -> bool {
    if s == "z" || s == "t" {
        return true;
    }
    let mut chars = s.chars();
    match chars.next() {
        Some('y') | Some('a') => {
            let rest: String = chars.collect();
            !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
        }
        _ => false,
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct VarContext {
    names: Vec<String>,
}

impl VarContext {
    /// Context over user-supplied names; validates syntax, uniqueness, and
    /// the reservation rules.
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Arc<Self>, ContextError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ContextError::Empty);
        }
        for n in &names {
            if !is_identifier(n) {
                return Err(ContextError::BadName(n.clone()));
            }
            if is_reserved(n) {
                return Err(ContextError::Reserved(n.clone()));
            }
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ContextError::Duplicate(n.clone()));
            }
        }
        Ok(Arc::new(VarContext { names }))
    }

    /// Internal constructor for contexts that may contain reserved names.
    pub(crate) fn raw(names: Vec<String>) -> Arc<Self> {
        debug_assert!({
            let mut seen = std::collections::HashSet::new();
            names.iter().all(|n| seen.insert(n.clone()))
        });
        Arc::new(VarContext { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Extension by m coefficient symbols y1..ym.
    pub fn with_y_block(self: &Arc<Self>, m: usize) -> Arc<Self> {
        let mut names = self.names.clone();
        for i in 1..=m {
            names.push(format!("y{i}"));
        }
        VarContext::raw(names)
    }

    /// Extension by the saturation variable z.
    pub fn with_z(self: &Arc<Self>) -> Arc<Self> {
        let mut names = self.names.clone();
        names.push("z".to_string());
        VarContext::raw(names)
    }

    /// Extension by the radical-membership variable t.
    pub fn with_t(self: &Arc<Self>) -> Arc<Self> {
        let mut names = self.names.clone();
        names.push("t".to_string());
        VarContext::raw(names)
    }

    /// Doubled context [x1..xn, a1..an] used to print objects mixing program
    /// variables with initial-value symbols.
    pub fn with_init_symbols(self: &Arc<Self>) -> Arc<Self> {
        let mut names = self.names.clone();
        for i in 1..=self.len() {
            names.push(format!("a{i}"));
        }
        VarContext::raw(names)
    }

    /// Context a1..an over the same arity, for printing polynomials in the
    /// initial values alone.
    pub fn init_symbols(self: &Arc<Self>) -> Arc<Self> {
        VarContext::raw((1..=self.len()).map(|i| format!("a{i}")).collect())
    }

    /// True if `self` is a prefix of `other` (so lifting is zero-padding).
    pub fn is_prefix_of(&self, other: &VarContext) -> bool {
        other.names.len() >= self.names.len() && other.names[..self.names.len()] == self.names[..]
    }
}

/// Context equality for operations: pointer identity fast path, then names.
pub fn same_context(a: &Arc<VarContext>, b: &Arc<VarContext>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl fmt::Display for VarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(" "))
    }
}

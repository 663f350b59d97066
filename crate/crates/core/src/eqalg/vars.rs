//! Process-wide registry of named equivariant parameters.
//!
//! Variables are interned once and never removed. Internal storage uses the
//! registration index; every user-visible ordering (printing, leading terms)
//! uses the variable *name*, so output does not depend on interning order.

use std::fmt;
use std::sync::{OnceLock, RwLock};

/// Maximum number of distinct variables in one session.
pub const MAX_VARS: usize = 12;

fn registry() -> &'static RwLock<Vec<String>> {
    static REG: OnceLock<RwLock<Vec<String>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(Vec::new()))
}

/// An interned variable name.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub(crate) u8);

impl Var {
    /// Interns `name`, returning the existing handle if already registered.
    ///
    /// Panics when more than [`MAX_VARS`] distinct names are registered or the
    /// name is not an identifier; both are programming errors.
    pub fn named(name: &str) -> Var {
        assert!(is_identifier(name), "invalid variable name {name:?}");
        {
            let reg = registry().read().expect("variable registry poisoned");
            if let Some(i) = reg.iter().position(|n| n == name) {
                return Var(i as u8);
            }
        }
        let mut reg = registry().write().expect("variable registry poisoned");
        if let Some(i) = reg.iter().position(|n| n == name) {
            return Var(i as u8);
        }
        assert!(reg.len() < MAX_VARS, "too many variables (limit {MAX_VARS})");
        reg.push(name.to_string());
        Var((reg.len() - 1) as u8)
    }

    /// Looks up a name without registering it.
    pub fn lookup(name: &str) -> Option<Var> {
        let reg = registry().read().expect("variable registry poisoned");
        reg.iter().position(|n| n == name).map(|i| Var(i as u8))
    }

    pub fn name(self) -> String {
        registry().read().expect("variable registry poisoned")[self.0 as usize].clone()
    }

    pub(crate) fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(i: usize) -> Var {
        Var(i as u8)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn registered_count() -> usize {
    registry().read().expect("variable registry poisoned").len()
}

/// Snapshot of `(index, name)` pairs sorted by name.
pub(crate) fn name_order() -> Vec<usize> {
    let reg = registry().read().expect("variable registry poisoned");
    let mut idx: Vec<usize> = (0..reg.len()).collect();
    idx.sort_by(|&a, &b| reg[a].cmp(&reg[b]));
    idx
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// The equivariant parameter of the fiber-scaling torus.
pub fn s() -> Var {
    static V: OnceLock<Var> = OnceLock::new();
    *V.get_or_init(|| Var::named("s"))
}

/// The auxiliary master-space parameter; printed as `sp`.
pub fn sp() -> Var {
    static V: OnceLock<Var> = OnceLock::new();
    *V.get_or_init(|| Var::named("sp"))
}

/// First toric chart weight.
pub fn e1() -> Var {
    static V: OnceLock<Var> = OnceLock::new();
    *V.get_or_init(|| Var::named("e1"))
}

/// Second toric chart weight.
pub fn e2() -> Var {
    static V: OnceLock<Var> = OnceLock::new();
    *V.get_or_init(|| Var::named("e2"))
}

/// Scaling parameter used when the toric weights are restricted to a line.
pub fn delta() -> Var {
    static V: OnceLock<Var> = OnceLock::new();
    *V.get_or_init(|| Var::named("d"))
}

//! Symbols and their roles.
//!
//! A symbol is a name plus a [`SymbolKind`] describing how the solver treats
//! it: independent variable, dependent function, free parameter, integration
//! constant `C1, C2, ...` or definite-integral dummy `K1, K2, ...`.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum SymbolKind {
    IndependentVar,
    DependentFn,
    Parameter,
    /// `C[i]`, allocated per solve, consecutive from 1.
    IntegrationConstant(u32),
    /// `K[i]`, dummy variable bound by an unevaluated integral.
    DummyVar(u32),
    /// Named mathematical constant (currently only `pi`).
    MathConstant,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: impl Into<String>, kind: SymbolKind) -> Self {
        Symbol { name: name.into(), kind }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Self::new(name, SymbolKind::IndependentVar)
    }

    pub fn func(name: impl Into<String>) -> Self {
        Self::new(name, SymbolKind::DependentFn)
    }

    pub fn param(name: impl Into<String>) -> Self {
        Self::new(name, SymbolKind::Parameter)
    }

    pub fn constant(i: u32) -> Self {
        Self::new(format!("C{i}"), SymbolKind::IntegrationConstant(i))
    }

    pub fn dummy(i: u32) -> Self {
        Self::new(format!("K{i}"), SymbolKind::DummyVar(i))
    }

    pub fn pi() -> Self {
        Self::new("pi", SymbolKind::MathConstant)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, SymbolKind::IntegrationConstant(_))
    }

    pub fn is_dummy(&self) -> bool {
        matches!(self.kind, SymbolKind::DummyVar(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Per-solve allocation scope for fresh `C[i]` and `K[i]` names.
///
/// Two concurrent solves never share a context; a fresh context restarts
/// numbering at 1.
#[derive(Debug, Default)]
pub struct SolveContext {
    next_constant: u32,
    next_dummy: u32,
    /// Degree bound for the undetermined-coefficient searches.
    pub maxdeg: u32,
}

impl SolveContext {
    pub fn new() -> Self {
        SolveContext { next_constant: 0, next_dummy: 0, maxdeg: 10 }
    }

    pub fn with_maxdeg(maxdeg: u32) -> Self {
        SolveContext { next_constant: 0, next_dummy: 0, maxdeg }
    }

    pub fn fresh_constant(&mut self) -> Symbol {
        self.next_constant += 1;
        Symbol::constant(self.next_constant)
    }

    pub fn fresh_dummy(&mut self) -> Symbol {
        self.next_dummy += 1;
        Symbol::dummy(self.next_dummy)
    }

    pub fn constants_allocated(&self) -> u32 {
        self.next_constant
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_count_from_one() {
        let mut ctx = SolveContext::new();
        assert_eq!(ctx.fresh_constant(), Symbol::constant(1));
        assert_eq!(ctx.fresh_constant(), Symbol::constant(2));
        assert_eq!(ctx.fresh_dummy(), Symbol::dummy(1));
        let mut ctx2 = SolveContext::new();
        assert_eq!(ctx2.fresh_constant(), Symbol::constant(1));
    }
}

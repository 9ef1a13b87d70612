//! Immutable symbolic expression trees.
//!
//! Every [`Expr`] handed out by this crate is in canonical form: sums and
//! products are flattened and sorted under the structural total order,
//! numeric parts are merged, and trivial powers are rewritten away. The
//! rewrite rules themselves live in [`crate::canon`].
//!
//! Numbers are exact rationals; floating point never appears inside a tree.

use crate::canon;
use crate::symbol::{Symbol, SymbolKind};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::rc::Rc;

pub type Q = BigRational;

pub fn qint(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qrat(p: i64, q: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExprNode {
    /// Exact rational number.
    Num(Q),
    Sym(Symbol),
    /// `order`-th derivative of a dependent function (order 0 is the function
    /// value itself). The argument is the problem's independent variable.
    Deriv { func: Symbol, order: u32 },
    /// Application of a named kernel; `primes` counts formal derivatives of an
    /// opaque kernel, e.g. `f''(u)` has `primes == 2`.
    Kernel { name: String, primes: u32, args: Vec<Expr> },
    Pow(Expr, Expr),
    /// Definite integral with a bound dummy variable, kept unevaluated.
    Integral { integrand: Expr, dummy: Symbol, lower: Expr, upper: Expr },
    Prod(Vec<Expr>),
    Sum(Vec<Expr>),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Expr(pub Rc<ExprNode>);

impl Expr {
    pub fn node(&self) -> &ExprNode {
        &self.0
    }

    pub fn raw(node: ExprNode) -> Expr {
        Expr(Rc::new(node))
    }

    // ---- leaf constructors ----------------------------------------------

    pub fn num(q: Q) -> Expr {
        Expr::raw(ExprNode::Num(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(qint(n))
    }

    pub fn rat(p: i64, q: i64) -> Expr {
        Expr::num(qrat(p, q))
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::raw(ExprNode::Sym(s))
    }

    pub fn var(name: &str) -> Expr {
        Expr::sym(Symbol::var(name))
    }

    pub fn param(name: &str) -> Expr {
        Expr::sym(Symbol::param(name))
    }

    pub fn pi() -> Expr {
        Expr::sym(Symbol::pi())
    }

    /// The value `f(x)` of a dependent function.
    pub fn func_val(f: Symbol) -> Expr {
        Expr::raw(ExprNode::Deriv { func: f, order: 0 })
    }

    pub fn deriv_of(f: Symbol, order: u32) -> Expr {
        Expr::raw(ExprNode::Deriv { func: f, order })
    }

    // ---- canonicalizing constructors -------------------------------------

    pub fn kernel(name: &str, args: Vec<Expr>) -> Expr {
        canon::canon(&Expr::raw(ExprNode::Kernel {
            name: name.to_string(),
            primes: 0,
            args,
        }))
    }

    pub fn kernel_primed(name: &str, primes: u32, args: Vec<Expr>) -> Expr {
        canon::canon(&Expr::raw(ExprNode::Kernel { name: name.to_string(), primes, args }))
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        canon::canon(&Expr::raw(ExprNode::Pow(base, exp)))
    }

    pub fn sqrt(e: Expr) -> Expr {
        Expr::pow(e, Expr::rat(1, 2))
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        canon::canon(&Expr::raw(ExprNode::Sum(terms)))
    }

    pub fn prod(factors: Vec<Expr>) -> Expr {
        canon::canon(&Expr::raw(ExprNode::Prod(factors)))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::sum(vec![a, b])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::sum(vec![a, Expr::neg(b)])
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::prod(vec![a, b])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::prod(vec![a, Expr::pow(b, Expr::int(-1))])
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::prod(vec![Expr::int(-1), a])
    }

    pub fn inv(a: Expr) -> Expr {
        Expr::pow(a, Expr::int(-1))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::kernel("exp", vec![a])
    }

    pub fn log(a: Expr) -> Expr {
        Expr::kernel("log", vec![a])
    }

    pub fn integral(integrand: Expr, dummy: Symbol, lower: Expr, upper: Expr) -> Expr {
        canon::canon(&Expr::raw(ExprNode::Integral { integrand, dummy, lower, upper }))
    }

    // ---- predicates and accessors ----------------------------------------

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), ExprNode::Num(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), ExprNode::Num(q) if q.is_one())
    }

    pub fn as_num(&self) -> Option<&Q> {
        match self.node() {
            ExprNode::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        let q = self.as_num()?;
        if !q.is_integer() {
            return None;
        }
        q.to_integer().try_into().ok()
    }

    pub fn as_sym(&self) -> Option<&Symbol> {
        match self.node() {
            ExprNode::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// Terms of a sum, or the expression itself as a single term.
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            ExprNode::Sum(ts) => ts.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Factors of a product, or the expression itself as a single factor.
    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            ExprNode::Prod(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    /// Splits into `(base, exponent)`, with exponent 1 for non-powers.
    pub fn base_exp(&self) -> (Expr, Expr) {
        match self.node() {
            ExprNode::Pow(b, e) => (b.clone(), e.clone()),
            _ => (self.clone(), Expr::int(1)),
        }
    }

    /// Splits into `(numeric coefficient, remaining product)`.
    pub fn coeff_rest(&self) -> (Q, Expr) {
        match self.node() {
            ExprNode::Num(q) => (q.clone(), Expr::int(1)),
            ExprNode::Prod(fs) => {
                if let Some(ExprNode::Num(q)) = fs.first().map(|f| f.node()) {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr::raw(ExprNode::Prod(rest))
                    };
                    (q.clone(), rest)
                } else {
                    (Q::one(), self.clone())
                }
            }
            _ => (Q::one(), self.clone()),
        }
    }

    pub fn children(&self) -> Vec<Expr> {
        match self.node() {
            ExprNode::Num(_) | ExprNode::Sym(_) | ExprNode::Deriv { .. } => vec![],
            ExprNode::Kernel { args, .. } => args.clone(),
            ExprNode::Pow(b, e) => vec![b.clone(), e.clone()],
            ExprNode::Integral { integrand, lower, upper, .. } => {
                vec![integrand.clone(), lower.clone(), upper.clone()]
            }
            ExprNode::Prod(fs) => fs.clone(),
            ExprNode::Sum(ts) => ts.clone(),
        }
    }

    /// True if `self` contains a subtree structurally equal to `target`.
    pub fn contains(&self, target: &Expr) -> bool {
        if self == target {
            return true;
        }
        self.children().iter().any(|c| c.contains(target))
    }

    pub fn contains_sym(&self, s: &Symbol) -> bool {
        self.contains(&Expr::sym(s.clone()))
    }

    /// True if any derivative (of any order, including 0) of `f` occurs.
    pub fn contains_func(&self, f: &Symbol) -> bool {
        match self.node() {
            ExprNode::Deriv { func, .. } => func == f,
            _ => self.children().iter().any(|c| c.contains_func(f)),
        }
    }

    /// Highest derivative order of `f` occurring in the tree, if any.
    pub fn max_deriv_order(&self, f: &Symbol) -> Option<u32> {
        let mut best: Option<u32> = None;
        self.walk(&mut |e| {
            if let ExprNode::Deriv { func, order } = e.node() {
                if func == f {
                    best = Some(best.map_or(*order, |b| b.max(*order)));
                }
            }
        });
        best
    }

    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| match e.node() {
            ExprNode::Sym(s) => {
                out.insert(s.clone());
            }
            ExprNode::Deriv { func, .. } => {
                out.insert(func.clone());
            }
            _ => {}
        });
        // Dummies are bound by their integrals, not free.
        let mut bound = BTreeSet::new();
        self.walk(&mut |e| {
            if let ExprNode::Integral { dummy, .. } = e.node() {
                bound.insert(dummy.clone());
            }
        });
        out.retain(|s| !bound.contains(s));
        out
    }

    /// Replaces every subtree structurally equal to `target`, then
    /// recanonicalizes. `target` is expected to be a symbol, a derivative
    /// node, or a kernel application.
    pub fn substitute(&self, target: &Expr, replacement: &Expr) -> Expr {
        canon::canon(&self.substitute_raw(target, replacement))
    }

    pub fn substitute_raw(&self, target: &Expr, replacement: &Expr) -> Expr {
        if self == target {
            return replacement.clone();
        }
        match self.node() {
            ExprNode::Num(_) | ExprNode::Sym(_) | ExprNode::Deriv { .. } => self.clone(),
            ExprNode::Kernel { name, primes, args } => Expr::raw(ExprNode::Kernel {
                name: name.clone(),
                primes: *primes,
                args: args.iter().map(|a| a.substitute_raw(target, replacement)).collect(),
            }),
            ExprNode::Pow(b, e) => Expr::raw(ExprNode::Pow(
                b.substitute_raw(target, replacement),
                e.substitute_raw(target, replacement),
            )),
            ExprNode::Integral { integrand, dummy, lower, upper } => {
                // The dummy is bound; do not substitute through it.
                if target.as_sym() == Some(dummy) {
                    return self.clone();
                }
                Expr::raw(ExprNode::Integral {
                    integrand: integrand.substitute_raw(target, replacement),
                    dummy: dummy.clone(),
                    lower: lower.substitute_raw(target, replacement),
                    upper: upper.substitute_raw(target, replacement),
                })
            }
            ExprNode::Prod(fs) => Expr::raw(ExprNode::Prod(
                fs.iter().map(|f| f.substitute_raw(target, replacement)).collect(),
            )),
            ExprNode::Sum(ts) => Expr::raw(ExprNode::Sum(
                ts.iter().map(|t| t.substitute_raw(target, replacement)).collect(),
            )),
        }
    }

    /// Collects symbols of the given kind in the tree.
    pub fn symbols_of_kind(&self, pred: impl Fn(&SymbolKind) -> bool) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let ExprNode::Sym(s) = e.node() {
                if pred(&s.kind) {
                    out.insert(s.clone());
                }
            }
        });
        out
    }

    pub fn integration_constants(&self) -> BTreeSet<Symbol> {
        self.symbols_of_kind(|k| matches!(k, SymbolKind::IntegrationConstant(_)))
    }

    /// Size of the tree, used as a budget guard in expensive rewrites.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::io::print::print_text(self))
    }
}

/// Signed rational helpers shared by canon and the number tower.
pub fn q_is_neg(q: &Q) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_order_is_total_on_leaves() {
        let a = Expr::int(1);
        let b = Expr::var("x");
        let c = Expr::var("y");
        assert!(a < b);
        assert!(b < c);
        assert_eq!(b.cmp(&b.clone()), std::cmp::Ordering::Equal);
    }

    #[test]
    fn substitute_bound_dummy_is_protected() {
        let k = Symbol::dummy(1);
        let body = Expr::sym(k.clone());
        let int = Expr::integral(body, k.clone(), Expr::int(1), Expr::var("x"));
        let replaced = int.substitute(&Expr::sym(k), &Expr::int(5));
        assert_eq!(replaced, int);
    }
}

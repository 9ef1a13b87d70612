//! Rational normal form over a dynamic atom basis.
//!
//! Expressions are flattened into quotients of multivariate polynomials whose
//! variables ("atoms") are the maximal non-rational subexpressions: symbols,
//! function values, kernel applications, unevaluated integrals, radicals and
//! powers with symbolic exponents. A handful of algebraic relations between
//! atoms is applied during monomial normalization so that structurally
//! different spellings of the same value collapse:
//!
//! - `exp(u)^a * exp(v)^b  ->  exp(a*u + b*v)`
//! - `(base^(1/q))^q       ->  base`, with numeric surds kept square-free
//! - `x^E1 * x^E2          ->  x^(E1+E2)` for symbolic exponents
//! - `sin(u)^2 -> 1 - cos(u)^2`, `sinh(u)^2 -> cosh(u)^2 - 1`,
//!   `sech(u)^2 -> 1 - tanh(u)^2`
//!
//! The quotient `num/den` with cancelled gcd and monic denominator is the
//! normal form used for zero testing and fraction combination.

use crate::expr::{Expr, ExprNode, Q};
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

pub type Mono = BTreeMap<u32, u32>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AtomKey {
    /// Symbol, derivative, integral, or kernel application taken opaquely.
    Plain(Expr),
    /// `exp(arg)`; merged multiplicatively through argument addition.
    Exp(Expr),
    /// `base^(1/root)` for non-numeric base.
    Rad(Expr, u32),
    /// `base^(1/root)` for rational base.
    Surd(Q, u32),
    /// `base^exponent` with a symbolic (non-rational) exponent.
    PowSym(Expr, Expr),
}

pub struct Arena {
    pub atoms: Vec<AtomKey>,
    index: HashMap<AtomKey, u32>,
}

impl Arena {
    pub fn new() -> Self {
        Arena { atoms: Vec::new(), index: HashMap::new() }
    }

    pub fn intern(&mut self, key: AtomKey) -> u32 {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.atoms.len() as u32;
        self.atoms.push(key.clone());
        self.index.insert(key, i);
        i
    }

    pub fn key(&self, i: u32) -> &AtomKey {
        &self.atoms[i as usize]
    }

    /// Expression whose value the atom denotes.
    pub fn atom_expr(&self, i: u32) -> Expr {
        match self.key(i) {
            AtomKey::Plain(e) => e.clone(),
            AtomKey::Exp(u) => Expr::exp(u.clone()),
            AtomKey::Rad(b, q) => {
                Expr::raw(ExprNode::Pow(b.clone(), Expr::rat(1, *q as i64)))
            }
            AtomKey::Surd(b, q) => {
                Expr::raw(ExprNode::Pow(Expr::num(b.clone()), Expr::rat(1, *q as i64)))
            }
            AtomKey::PowSym(b, e) => Expr::raw(ExprNode::Pow(b.clone(), e.clone())),
        }
    }
}

impl Default for Arena {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MPoly {
    pub terms: BTreeMap<Mono, Q>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub fn constant(q: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Mono::new(), q);
        }
        MPoly { terms }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn atom(i: u32) -> Self {
        let mut m = Mono::new();
        m.insert(i, 1);
        let mut terms = BTreeMap::new();
        terms.insert(m, Q::one());
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_empty())
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.terms.is_empty() {
            return Some(Q::zero());
        }
        if self.is_constant() {
            return Some(self.terms.values().next().unwrap().clone());
        }
        None
    }

    pub fn add_term(&mut self, mono: Mono, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(Q::zero);
        *entry += coeff;
        if entry.is_zero() {
            // re-borrow to remove
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &Q) -> MPoly {
        if q.is_zero() {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * q)).collect() }
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = Vec::new();
        for m in self.terms.keys() {
            for v in m.keys() {
                if !vs.contains(v) {
                    vs.push(*v);
                }
            }
        }
        vs.sort_unstable();
        vs
    }

    pub fn degree_in(&self, v: u32) -> u32 {
        self.terms.keys().map(|m| *m.get(&v).unwrap_or(&0)).max().unwrap_or(0)
    }

    pub fn total_size(&self) -> usize {
        self.terms.len()
    }
}

/// Rational function: `num / den` with positive-exponent polynomials.
#[derive(Clone, Debug)]
pub struct Rat {
    pub num: MPoly,
    pub den: MPoly,
}

impl Rat {
    pub fn from_poly(p: MPoly) -> Rat {
        Rat { num: p, den: MPoly::one() }
    }

    pub fn constant(q: Q) -> Rat {
        Rat::from_poly(MPoly::constant(q))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

pub struct Ratform<'a> {
    pub arena: &'a mut Arena,
    /// Term-count budget; beyond it normalization bails out.
    pub budget: usize,
    pub exhausted: bool,
}

impl<'a> Ratform<'a> {
    pub fn new(arena: &'a mut Arena) -> Self {
        Ratform { arena, budget: 40_000, exhausted: false }
    }

    fn check_budget(&mut self, p: &MPoly) {
        if p.total_size() > self.budget {
            self.exhausted = true;
        }
    }

    // ---- polynomial multiplication with relation-aware monomials ----------

    pub fn mul(&mut self, a: &MPoly, b: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        if self.exhausted {
            return out;
        }
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let part = self.mul_mono(ma, mb, ca.clone() * cb.clone());
                out = out.add(&part);
                if out.total_size() > self.budget {
                    self.exhausted = true;
                    return out;
                }
            }
        }
        out
    }

    pub fn pow(&mut self, a: &MPoly, n: u32) -> MPoly {
        let mut out = MPoly::one();
        let mut base = a.clone();
        let mut n = n;
        while n > 0 && !self.exhausted {
            if n & 1 == 1 {
                out = self.mul(&out, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base);
            }
        }
        out
    }

    fn mul_mono(&mut self, a: &Mono, b: &Mono, coeff: Q) -> MPoly {
        let mut m = a.clone();
        for (v, e) in b {
            *m.entry(*v).or_insert(0) += e;
        }
        self.normalize_mono(m, coeff)
    }

    /// Applies atom relations until the monomial is in normal form. May
    /// splice polynomials in (returning a polynomial rather than a monomial).
    fn normalize_mono(&mut self, mono: Mono, coeff: Q) -> MPoly {
        if coeff.is_zero() {
            return MPoly::zero();
        }
        // 1. merge exp atoms
        let exps: Vec<(u32, u32)> = mono
            .iter()
            .filter(|(v, _)| matches!(self.arena.key(**v), AtomKey::Exp(_)))
            .map(|(v, e)| (*v, *e))
            .collect();
        if exps.len() > 1 || exps.iter().any(|(_, e)| *e != 1) {
            let mut rest = mono.clone();
            let mut combined = Expr::int(0);
            for (v, e) in &exps {
                rest.remove(v);
                let arg = match self.arena.key(*v) {
                    AtomKey::Exp(u) => u.clone(),
                    _ => unreachable!(),
                };
                combined = Expr::add(combined, Expr::mul(Expr::int(*e as i64), arg));
            }
            if !combined.is_zero() {
                let idx = self.arena.intern(AtomKey::Exp(combined));
                *rest.entry(idx).or_insert(0) += 1;
            }
            return self.normalize_mono(rest, coeff);
        }
        // 2. merge symbolic-exponent powers sharing a base
        let powsyms: Vec<(u32, u32)> = mono
            .iter()
            .filter(|(v, _)| matches!(self.arena.key(**v), AtomKey::PowSym(_, _)))
            .map(|(v, e)| (*v, *e))
            .collect();
        {
            let mut by_base: HashMap<Expr, Vec<(u32, u32)>> = HashMap::new();
            for (v, e) in &powsyms {
                if let AtomKey::PowSym(b, _) = self.arena.key(*v) {
                    by_base.entry(b.clone()).or_default().push((*v, *e));
                }
            }
            for (base, group) in by_base {
                let needs = group.len() > 1 || group.iter().any(|(_, e)| *e != 1);
                if !needs {
                    continue;
                }
                let mut rest = mono.clone();
                let mut etot = Expr::int(0);
                for (v, e) in &group {
                    rest.remove(v);
                    if let AtomKey::PowSym(_, ex) = self.arena.key(*v) {
                        let ex = ex.clone();
                        etot = Expr::add(etot, Expr::mul(Expr::int(*e as i64), ex));
                    }
                }
                let spliced = self.expr_power_poly(&base, &etot);
                let restpoly = self.normalize_mono(rest, coeff);
                return self.mul(&restpoly, &spliced);
            }
        }
        // 3. radical exponent reduction and surd merging
        for (v, e) in mono.clone() {
            match self.arena.key(v).clone() {
                AtomKey::Rad(base, root) if e >= root => {
                    let mut rest = mono.clone();
                    rest.remove(&v);
                    let carry = e / root;
                    let rem = e % root;
                    if rem > 0 {
                        rest.insert(v, rem);
                    }
                    let basep = self.of_expr(&base);
                    let basep = self.rat_to_poly_or_atom(basep, &base);
                    let power = self.pow(&basep, carry);
                    let restpoly = self.normalize_mono(rest, coeff);
                    return self.mul(&restpoly, &power);
                }
                AtomKey::Surd(base, root) if e >= root => {
                    let mut rest = mono.clone();
                    rest.remove(&v);
                    let carry = e / root;
                    let rem = e % root;
                    if rem > 0 {
                        rest.insert(v, rem);
                    }
                    let mut c = coeff.clone();
                    for _ in 0..carry {
                        c *= base.clone();
                    }
                    return self.normalize_mono(rest, c);
                }
                _ => {}
            }
        }
        // 3b. merge distinct positive surds with the same root index
        {
            let surds: Vec<(u32, u32, Q, u32)> = mono
                .iter()
                .filter_map(|(v, e)| match self.arena.key(*v) {
                    AtomKey::Surd(b, r) if !b.is_negative() => Some((*v, *e, b.clone(), *r)),
                    _ => None,
                })
                .collect();
            let mut by_root: HashMap<u32, Vec<(u32, u32, Q)>> = HashMap::new();
            for (v, e, b, r) in surds {
                by_root.entry(r).or_default().push((v, e, b));
            }
            for (root, group) in by_root {
                if group.len() > 1 {
                    let mut rest = mono.clone();
                    let mut radicand = Q::one();
                    for (v, e, b) in &group {
                        rest.remove(v);
                        for _ in 0..*e {
                            radicand *= b.clone();
                        }
                    }
                    let idx = self.arena.intern(AtomKey::Surd(radicand, root));
                    *rest.entry(idx).or_insert(0) += 1;
                    return self.normalize_mono(rest, coeff);
                }
            }
        }
        // 4. trig/hyperbolic parity reduction
        for (v, e) in mono.clone() {
            if e < 2 {
                continue;
            }
            if let AtomKey::Plain(ex) = self.arena.key(v).clone() {
                if let ExprNode::Kernel { name, primes: 0, args } = ex.node() {
                    let arg = args[0].clone();
                    let replacement = match name.as_str() {
                        "sin" => {
                            // sin^2 = 1 - cos^2
                            let c = self.intern_plain(Expr::kernel("cos", vec![arg]));
                            let mut p = MPoly::one();
                            let mut m = Mono::new();
                            m.insert(c, 2);
                            p.add_term(m, -Q::one());
                            Some(p)
                        }
                        "sinh" => {
                            let c = self.intern_plain(Expr::kernel("cosh", vec![arg]));
                            let mut p = MPoly::constant(-Q::one());
                            let mut m = Mono::new();
                            m.insert(c, 2);
                            p.add_term(m, Q::one());
                            Some(p)
                        }
                        "sech" => {
                            let t = self.intern_plain(Expr::kernel("tanh", vec![arg]));
                            let mut p = MPoly::one();
                            let mut m = Mono::new();
                            m.insert(t, 2);
                            p.add_term(m, -Q::one());
                            Some(p)
                        }
                        _ => None,
                    };
                    if let Some(p) = replacement {
                        let mut rest = mono.clone();
                        rest.remove(&v);
                        let pairs = e / 2;
                        if e % 2 == 1 {
                            rest.insert(v, 1);
                        }
                        let power = self.pow(&p, pairs);
                        let restpoly = self.normalize_mono(rest, coeff);
                        return self.mul(&restpoly, &power);
                    }
                }
            }
        }
        let mut out = MPoly::zero();
        out.add_term(mono, coeff);
        out
    }

    fn intern_plain(&mut self, e: Expr) -> u32 {
        self.arena.intern(AtomKey::Plain(e))
    }

    /// `base^etot` for a possibly-symbolic total exponent, spliced as a poly
    /// fragment when the exponent collapsed to an integer.
    fn expr_power_poly(&mut self, base: &Expr, etot: &Expr) -> MPoly {
        if etot.is_zero() {
            return MPoly::one();
        }
        if let Some(q) = etot.as_num() {
            if q.is_integer() {
                let n: i64 = q.to_integer().try_into().unwrap_or(0);
                if n >= 0 {
                    let b = self.of_expr(base);
                    let b = self.rat_to_poly_or_atom(b, base);
                    return self.pow(&b, n as u32);
                }
                // negative integer power: treat base^-n as plain atom power
                let idx = self.intern_plain(Expr::pow(base.clone(), Expr::int(n)));
                return MPoly::atom(idx);
            }
            // rational: re-dispatch through the atom machinery
            let idx = self.pow_atom(base, q);
            return idx;
        }
        let idx = self.arena.intern(AtomKey::PowSym(base.clone(), etot.clone()));
        MPoly::atom(idx)
    }

    fn rat_to_poly_or_atom(&mut self, r: Rat, orig: &Expr) -> MPoly {
        if r.den == MPoly::one() {
            r.num
        } else {
            // A quotient under a relation splice: fold it back in as a plain
            // atom to keep polynomials denominator-free.
            let idx = self.intern_plain(orig.clone());
            MPoly::atom(idx)
        }
    }

    fn pow_atom(&mut self, base: &Expr, q: &Q) -> MPoly {
        // base^(p/root) with p possibly negative is handled by the caller via
        // Rat; here p is assumed positive.
        let root: u32 = q.denom().try_into().unwrap_or(2);
        let p: i64 = q.numer().try_into().unwrap_or(1);
        let key = if let Some(nb) = base.as_num() {
            AtomKey::Surd(nb.clone(), root)
        } else {
            AtomKey::Rad(base.clone(), root)
        };
        let idx = self.arena.intern(key);
        let mut m = Mono::new();
        m.insert(idx, p.unsigned_abs() as u32);
        self.normalize_mono(m, Q::one())
    }

    // ---- expression flattening -------------------------------------------

    pub fn of_expr(&mut self, e: &Expr) -> Rat {
        match e.node() {
            ExprNode::Num(q) => Rat::constant(q.clone()),
            ExprNode::Sym(_) | ExprNode::Deriv { .. } | ExprNode::Integral { .. } => {
                let i = self.intern_plain(e.clone());
                Rat::from_poly(MPoly::atom(i))
            }
            ExprNode::Kernel { name, primes, .. } => {
                if name == "exp" && *primes == 0 {
                    if let ExprNode::Kernel { args, .. } = e.node() {
                        let i = self.arena.intern(AtomKey::Exp(args[0].clone()));
                        return Rat::from_poly(MPoly::atom(i));
                    }
                }
                let i = self.intern_plain(e.clone());
                Rat::from_poly(MPoly::atom(i))
            }
            ExprNode::Sum(ts) => {
                let mut acc = Rat::constant(Q::zero());
                for t in ts {
                    let r = self.of_expr(t);
                    acc = self.rat_add(&acc, &r);
                    if self.exhausted {
                        break;
                    }
                }
                acc
            }
            ExprNode::Prod(fs) => {
                let mut acc = Rat::constant(Q::one());
                for f in fs {
                    let r = self.of_expr(f);
                    acc = self.rat_mul(&acc, &r);
                    if self.exhausted {
                        break;
                    }
                }
                acc
            }
            ExprNode::Pow(b, ex) => {
                if let Some(q) = ex.as_num() {
                    if q.is_integer() {
                        let n: i64 = q.to_integer().try_into().unwrap_or(0);
                        let rb = self.of_expr(b);
                        return self.rat_ipow(&rb, n);
                    }
                    // rational exponent p/q: atom with sign split
                    let root: i64 = q.denom().try_into().unwrap_or(2);
                    let p: i64 = q.numer().try_into().unwrap_or(1);
                    let poly = self.pow_atom(b, &crate::expr::qrat(p.abs(), root));
                    if p >= 0 {
                        return Rat::from_poly(poly);
                    }
                    return Rat { num: MPoly::one(), den: poly };
                }
                let i = self.arena.intern(AtomKey::PowSym(b.clone(), ex.clone()));
                Rat::from_poly(MPoly::atom(i))
            }
        }
    }

    // ---- rational arithmetic ----------------------------------------------

    pub fn rat_add(&mut self, a: &Rat, b: &Rat) -> Rat {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let num1 = self.mul(&a.num, &b.den);
        let num2 = self.mul(&b.num, &a.den);
        let num = num1.add(&num2);
        let den = self.mul(&a.den, &b.den);
        self.reduce(Rat { num, den })
    }

    pub fn rat_mul(&mut self, a: &Rat, b: &Rat) -> Rat {
        let num = self.mul(&a.num, &b.num);
        let den = self.mul(&a.den, &b.den);
        self.reduce(Rat { num, den })
    }

    pub fn rat_ipow(&mut self, a: &Rat, n: i64) -> Rat {
        if n == 0 {
            return Rat::constant(Q::one());
        }
        let (num, den) = if n > 0 {
            (self.pow(&a.num, n as u32), self.pow(&a.den, n as u32))
        } else {
            (self.pow(&a.den, (-n) as u32), self.pow(&a.num, (-n) as u32))
        };
        self.reduce(Rat { num, den })
    }

    pub fn reduce(&mut self, r: Rat) -> Rat {
        if self.exhausted {
            return r;
        }
        self.check_budget(&r.num);
        self.check_budget(&r.den);
        if self.exhausted {
            return r;
        }
        if r.num.is_zero() {
            return Rat { num: MPoly::zero(), den: MPoly::one() };
        }
        let mut num = r.num;
        let mut den = r.den;
        if let Some(c) = den.as_constant() {
            if !c.is_one() && !c.is_zero() {
                num = num.scale(&(Q::one() / c));
                den = MPoly::one();
            }
            return Rat { num, den };
        }
        let g = gcd_poly(&num, &den);
        if !g.is_constant() {
            if let (Some(n2), Some(d2)) = (divide(&num, &g), divide(&den, &g)) {
                num = n2;
                den = d2;
            }
        }
        // monic denominator
        if let Some((_, lc)) = den.terms.iter().next_back() {
            let lc = lc.clone();
            if !lc.is_one() {
                let inv = Q::one() / lc;
                num = num.scale(&inv);
                den = den.scale(&inv);
            }
        }
        if den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            den = MPoly::one();
        }
        Rat { num, den }
    }
}

// ---- gcd and exact division (relation-free: treats atoms independently) ----
//
// Relations are already applied during construction, so gcd/division work on
// plain multivariate polynomials. Pseudo-division with primitive parts keeps
// coefficient growth in check at corpus sizes.

fn as_uni(p: &MPoly, v: u32) -> BTreeMap<u32, MPoly> {
    let mut out: BTreeMap<u32, MPoly> = BTreeMap::new();
    for (m, c) in &p.terms {
        let d = *m.get(&v).unwrap_or(&0);
        let mut m2 = m.clone();
        m2.remove(&v);
        out.entry(d).or_insert_with(MPoly::zero).add_term(m2, c.clone());
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn from_uni(u: &BTreeMap<u32, MPoly>, v: u32) -> MPoly {
    let mut out = MPoly::zero();
    for (d, c) in u {
        for (m, q) in &c.terms {
            let mut m2 = m.clone();
            if *d > 0 {
                m2.insert(v, *d);
            }
            out.add_term(m2, q.clone());
        }
    }
    out
}

fn plain_mul(a: &MPoly, b: &MPoly) -> MPoly {
    let mut out = MPoly::zero();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            let mut m = ma.clone();
            for (v, e) in mb {
                *m.entry(*v).or_insert(0) += e;
            }
            out.add_term(m, ca.clone() * cb.clone());
        }
    }
    out
}

fn uni_deg(u: &BTreeMap<u32, MPoly>) -> Option<u32> {
    u.keys().next_back().copied()
}

/// Pseudo-remainder of a by b in variable v.
fn prem(a: &BTreeMap<u32, MPoly>, b: &BTreeMap<u32, MPoly>, _v: u32) -> BTreeMap<u32, MPoly> {
    let db = uni_deg(b).unwrap();
    let lb = b.get(&db).unwrap().clone();
    let mut r = a.clone();
    loop {
        let dr = match uni_deg(&r) {
            Some(d) => d,
            None => return r,
        };
        if dr < db {
            return r;
        }
        let lr = r.get(&dr).unwrap().clone();
        // r = lb*r - lr * x^(dr-db) * b
        let mut r2: BTreeMap<u32, MPoly> = BTreeMap::new();
        for (d, c) in &r {
            r2.insert(*d, plain_mul(c, &lb));
        }
        for (d, c) in b {
            let shifted = d + dr - db;
            let sub = plain_mul(c, &lr);
            let entry = r2.entry(shifted).or_insert_with(MPoly::zero);
            *entry = entry.sub(&sub);
        }
        r2.retain(|_, c| !c.is_zero());
        r = r2;
    }
}

fn content(u: &BTreeMap<u32, MPoly>) -> MPoly {
    let mut g = MPoly::zero();
    for c in u.values() {
        g = gcd_poly(&g, c);
        if g.as_constant().map(|q| q.is_one()).unwrap_or(false) {
            break;
        }
    }
    if g.is_zero() {
        MPoly::one()
    } else {
        g
    }
}

fn divide_uni(u: &BTreeMap<u32, MPoly>, c: &MPoly) -> Option<BTreeMap<u32, MPoly>> {
    let mut out = BTreeMap::new();
    for (d, coeff) in u {
        out.insert(*d, divide(coeff, c)?);
    }
    Some(out)
}

pub fn gcd_poly(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return normalize_gcd(b.clone());
    }
    if b.is_zero() {
        return normalize_gcd(a.clone());
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    let va = a.vars();
    let vb = b.vars();
    let common: Vec<u32> = va.iter().filter(|v| vb.contains(v)).copied().collect();
    if common.is_empty() {
        return MPoly::one();
    }
    // pick the common variable of least combined degree
    let v = *common
        .iter()
        .min_by_key(|v| a.degree_in(**v) + b.degree_in(**v))
        .unwrap();
    let ua = as_uni(a, v);
    let ub = as_uni(b, v);
    let ca = content(&ua);
    let cb = content(&ub);
    let mut pa = divide_uni(&ua, &ca).unwrap_or(ua);
    let mut pb = divide_uni(&ub, &cb).unwrap_or(ub);
    if uni_deg(&pa) < uni_deg(&pb) {
        std::mem::swap(&mut pa, &mut pb);
    }
    let mut steps = 0;
    loop {
        if pb.is_empty() {
            break;
        }
        let r = prem(&pa, &pb, v);
        pa = pb;
        pb = if r.is_empty() {
            BTreeMap::new()
        } else {
            let cr = content(&r);
            divide_uni(&r, &cr).unwrap_or(r)
        };
        steps += 1;
        if steps > 64 {
            return MPoly::one();
        }
    }
    let cg = gcd_poly(&ca, &cb);
    let g = plain_mul(&from_uni(&pa, v), &cg);
    normalize_gcd(g)
}

fn normalize_gcd(g: MPoly) -> MPoly {
    if g.is_zero() {
        return g;
    }
    let lc = g.terms.iter().next_back().unwrap().1.clone();
    if lc.is_one() {
        g
    } else {
        g.scale(&(Q::one() / lc))
    }
}

/// Exact multivariate division; `None` when b does not divide a.
pub fn divide(a: &MPoly, b: &MPoly) -> Option<MPoly> {
    if a.is_zero() {
        return Some(MPoly::zero());
    }
    if let Some(c) = b.as_constant() {
        if c.is_zero() {
            return None;
        }
        return Some(a.scale(&(Q::one() / c)));
    }
    let v = *b.vars().last().unwrap();
    let ua = as_uni(a, v);
    let ub = as_uni(b, v);
    let db = uni_deg(&ub)?;
    let lb = ub.get(&db)?.clone();
    let mut rem = ua;
    let mut quo: BTreeMap<u32, MPoly> = BTreeMap::new();
    loop {
        let dr = match uni_deg(&rem) {
            Some(d) => d,
            None => break,
        };
        if dr < db {
            return None;
        }
        let lr = rem.get(&dr).unwrap().clone();
        let qc = divide(&lr, &lb)?;
        quo.insert(dr - db, qc.clone());
        for (d, c) in &ub {
            let shifted = d + dr - db;
            let sub = plain_mul(c, &qc);
            let entry = rem.entry(shifted).or_insert_with(MPoly::zero);
            *entry = entry.sub(&sub);
        }
        rem.retain(|_, c| !c.is_zero());
    }
    if rem.is_empty() {
        Some(from_uni(&quo, v))
    } else {
        None
    }
}

// ---- re-emission ------------------------------------------------------------

/// Rebuilds a canonical expression from a polynomial without re-running the
/// rewrite passes (the parts are canonical by construction).
pub fn poly_to_expr(arena: &Arena, p: &MPoly) -> Expr {
    if p.is_zero() {
        return Expr::int(0);
    }
    let mut terms: Vec<Expr> = Vec::new();
    for (mono, coeff) in &p.terms {
        terms.push(mono_to_expr(arena, mono, coeff));
    }
    terms.sort();
    if terms.len() == 1 {
        terms.into_iter().next().unwrap()
    } else {
        Expr::raw(ExprNode::Sum(terms))
    }
}

fn mono_to_expr(arena: &Arena, mono: &Mono, coeff: &Q) -> Expr {
    let mut factors: Vec<Expr> = Vec::new();
    for (v, e) in mono {
        let base = arena.atom_expr(*v);
        let f = match arena.key(*v) {
            AtomKey::Rad(b, q) => {
                Expr::raw(ExprNode::Pow(b.clone(), Expr::rat(*e as i64, *q as i64)))
            }
            AtomKey::Surd(b, q) => {
                Expr::raw(ExprNode::Pow(Expr::num(b.clone()), Expr::rat(*e as i64, *q as i64)))
            }
            _ => {
                if *e == 1 {
                    base
                } else {
                    Expr::raw(ExprNode::Pow(base, Expr::int(*e as i64)))
                }
            }
        };
        factors.push(f);
    }
    factors.sort();
    if !coeff.is_one() || factors.is_empty() {
        factors.insert(0, Expr::num(coeff.clone()));
    }
    if factors.len() == 1 {
        factors.into_iter().next().unwrap()
    } else {
        Expr::raw(ExprNode::Prod(factors))
    }
}

pub fn rat_to_expr(arena: &Arena, r: &Rat) -> Expr {
    let num = poly_to_expr(arena, &r.num);
    if r.den == MPoly::one() {
        return num;
    }
    let den = poly_to_expr(arena, &r.den);
    if num.is_zero() {
        return num;
    }
    // num * den^-1 assembled raw; both sides are canonical.
    let dinv = match den.node() {
        ExprNode::Pow(b, e) => {
            if let Some(q) = e.as_num() {
                Expr::raw(ExprNode::Pow(b.clone(), Expr::num(-q.clone())))
            } else {
                Expr::raw(ExprNode::Pow(den.clone(), Expr::int(-1)))
            }
        }
        _ => Expr::raw(ExprNode::Pow(den.clone(), Expr::int(-1))),
    };
    let mut factors: Vec<Expr> = Vec::new();
    let (c, rest) = num.coeff_rest();
    for f in rest.factors() {
        if !f.is_one() {
            factors.push(f);
        }
    }
    factors.push(dinv);
    factors.sort();
    if !c.is_one() {
        factors.insert(0, Expr::num(c));
    }
    if factors.len() == 1 {
        factors.into_iter().next().unwrap()
    } else {
        Expr::raw(ExprNode::Prod(factors))
    }
}

/// Full rational normal form of an expression.
pub fn ratnorm(e: &Expr) -> (Arena, Rat) {
    let mut arena = Arena::new();
    let mut rf = Ratform::new(&mut arena);
    let r = rf.of_expr(e);
    let r = rf.reduce(r);
    (arena, r)
}

/// True when the expression provably reduces to zero under the relations.
pub fn is_zero_normal(e: &Expr) -> bool {
    if e.is_zero() {
        return true;
    }
    if e.size() > 6000 {
        return false;
    }
    let mut arena = Arena::new();
    let mut rf = Ratform::new(&mut arena);
    let r = rf.of_expr(e);
    !rf.exhausted && r.num.is_zero()
}

//! Registry of named kernels (special functions).
//!
//! Each entry records the arity, how to differentiate an application with
//! respect to its (last) argument, the value at zero when one is known
//! exactly, and whether a numeric evaluator exists. Derivative rules close
//! over the registry: differentiating a registered kernel only ever produces
//! registered kernels and elementary operations.

use crate::expr::Expr;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NumericKind {
    /// Evaluable in f64 (elementary functions, erf/erfi, LambertW).
    Evaluable,
    /// Symbolic-only kernel (Airy, Bessel, Fresnel, Legendre).
    SymbolicOnly,
}

pub struct KernelDef {
    pub name: &'static str,
    pub arity: usize,
    pub numeric: NumericKind,
    /// `d/dz k(..., z)` as a function of the argument list; `None` marks a
    /// kernel without a stored derivative rule (Legendre P/Q).
    pub derivative: Option<fn(&[Expr]) -> Expr>,
    /// Exact value when the final argument is literally 0.
    pub at_zero: Option<fn() -> Option<Expr>>,
}

fn d_exp(args: &[Expr]) -> Expr {
    Expr::kernel("exp", vec![args[0].clone()])
}

fn d_log(args: &[Expr]) -> Expr {
    Expr::inv(args[0].clone())
}

fn d_sin(args: &[Expr]) -> Expr {
    Expr::kernel("cos", vec![args[0].clone()])
}

fn d_cos(args: &[Expr]) -> Expr {
    Expr::neg(Expr::kernel("sin", vec![args[0].clone()]))
}

fn d_tan(args: &[Expr]) -> Expr {
    // 1 + tan^2
    let t = Expr::kernel("tan", vec![args[0].clone()]);
    Expr::add(Expr::int(1), Expr::pow(t, Expr::int(2)))
}

fn d_sinh(args: &[Expr]) -> Expr {
    Expr::kernel("cosh", vec![args[0].clone()])
}

fn d_cosh(args: &[Expr]) -> Expr {
    Expr::kernel("sinh", vec![args[0].clone()])
}

fn d_tanh(args: &[Expr]) -> Expr {
    // 1 - tanh^2
    let t = Expr::kernel("tanh", vec![args[0].clone()]);
    Expr::sub(Expr::int(1), Expr::pow(t, Expr::int(2)))
}

fn d_sech(args: &[Expr]) -> Expr {
    let z = args[0].clone();
    Expr::neg(Expr::mul(
        Expr::kernel("sech", vec![z.clone()]),
        Expr::kernel("tanh", vec![z]),
    ))
}

fn d_arctan(args: &[Expr]) -> Expr {
    Expr::inv(Expr::add(Expr::int(1), Expr::pow(args[0].clone(), Expr::int(2))))
}

fn d_arcsin(args: &[Expr]) -> Expr {
    Expr::pow(
        Expr::sub(Expr::int(1), Expr::pow(args[0].clone(), Expr::int(2))),
        Expr::rat(-1, 2),
    )
}

fn d_erf(args: &[Expr]) -> Expr {
    // 2/sqrt(pi) * exp(-z^2)
    Expr::prod(vec![
        Expr::int(2),
        Expr::pow(Expr::pi(), Expr::rat(-1, 2)),
        Expr::exp(Expr::neg(Expr::pow(args[0].clone(), Expr::int(2)))),
    ])
}

fn d_erfi(args: &[Expr]) -> Expr {
    Expr::prod(vec![
        Expr::int(2),
        Expr::pow(Expr::pi(), Expr::rat(-1, 2)),
        Expr::exp(Expr::pow(args[0].clone(), Expr::int(2))),
    ])
}

fn d_fresnelc(args: &[Expr]) -> Expr {
    // cos(pi z^2 / 2)
    Expr::kernel(
        "cos",
        vec![Expr::prod(vec![
            Expr::rat(1, 2),
            Expr::pi(),
            Expr::pow(args[0].clone(), Expr::int(2)),
        ])],
    )
}

fn d_fresnels(args: &[Expr]) -> Expr {
    Expr::kernel(
        "sin",
        vec![Expr::prod(vec![
            Expr::rat(1, 2),
            Expr::pi(),
            Expr::pow(args[0].clone(), Expr::int(2)),
        ])],
    )
}

fn d_lambertw(args: &[Expr]) -> Expr {
    // W'(z) = W(z) / (z (1 + W(z)))
    let w = Expr::kernel("lambertw", vec![args[0].clone()]);
    Expr::div(
        w.clone(),
        Expr::mul(args[0].clone(), Expr::add(Expr::int(1), w)),
    )
}

fn d_airyai(args: &[Expr]) -> Expr {
    Expr::kernel("airyaiprime", vec![args[0].clone()])
}

fn d_airybi(args: &[Expr]) -> Expr {
    Expr::kernel("airybiprime", vec![args[0].clone()])
}

fn d_airyaiprime(args: &[Expr]) -> Expr {
    // Ai''(z) = z Ai(z)
    Expr::mul(args[0].clone(), Expr::kernel("airyai", vec![args[0].clone()]))
}

fn d_airybiprime(args: &[Expr]) -> Expr {
    Expr::mul(args[0].clone(), Expr::kernel("airybi", vec![args[0].clone()]))
}

fn d_besselj(args: &[Expr]) -> Expr {
    // J_nu'(z) = J_{nu-1}(z) - (nu/z) J_nu(z)
    let nu = args[0].clone();
    let z = args[1].clone();
    Expr::sub(
        Expr::kernel("besselj", vec![Expr::sub(nu.clone(), Expr::int(1)), z.clone()]),
        Expr::prod(vec![nu, Expr::inv(z.clone()), Expr::kernel("besselj", vec![args[0].clone(), z])]),
    )
}

fn d_bessely(args: &[Expr]) -> Expr {
    let nu = args[0].clone();
    let z = args[1].clone();
    Expr::sub(
        Expr::kernel("bessely", vec![Expr::sub(nu.clone(), Expr::int(1)), z.clone()]),
        Expr::prod(vec![nu, Expr::inv(z.clone()), Expr::kernel("bessely", vec![args[0].clone(), z])]),
    )
}

fn zero() -> Option<Expr> {
    Some(Expr::int(0))
}

fn one() -> Option<Expr> {
    Some(Expr::int(1))
}

pub const KERNELS: &[KernelDef] = &[
    KernelDef { name: "exp", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_exp), at_zero: Some(one) },
    KernelDef { name: "log", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_log), at_zero: None },
    KernelDef { name: "sin", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_sin), at_zero: Some(zero) },
    KernelDef { name: "cos", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_cos), at_zero: Some(one) },
    KernelDef { name: "tan", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_tan), at_zero: Some(zero) },
    KernelDef { name: "sinh", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_sinh), at_zero: Some(zero) },
    KernelDef { name: "cosh", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_cosh), at_zero: Some(one) },
    KernelDef { name: "tanh", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_tanh), at_zero: Some(zero) },
    KernelDef { name: "sech", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_sech), at_zero: Some(one) },
    KernelDef { name: "arctan", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_arctan), at_zero: Some(zero) },
    KernelDef { name: "arcsin", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_arcsin), at_zero: Some(zero) },
    KernelDef { name: "erf", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_erf), at_zero: Some(zero) },
    KernelDef { name: "erfi", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_erfi), at_zero: Some(zero) },
    KernelDef { name: "lambertw", arity: 1, numeric: NumericKind::Evaluable, derivative: Some(d_lambertw), at_zero: Some(zero) },
    KernelDef { name: "fresnelc", arity: 1, numeric: NumericKind::SymbolicOnly, derivative: Some(d_fresnelc), at_zero: Some(zero) },
    KernelDef { name: "fresnels", arity: 1, numeric: NumericKind::SymbolicOnly, derivative: Some(d_fresnels), at_zero: Some(zero) },
    KernelDef { name: "airyai", arity: 1, numeric: NumericKind::SymbolicOnly, derivative: Some(d_airyai), at_zero: None },
    KernelDef { name: "airybi", arity: 1, numeric: NumericKind::SymbolicOnly, derivative: Some(d_airybi), at_zero: None },
    KernelDef { name: "airyaiprime", arity: 1, numeric: NumericKind::SymbolicOnly, derivative: Some(d_airyaiprime), at_zero: None },
    KernelDef { name: "airybiprime", arity: 1, numeric: NumericKind::SymbolicOnly, derivative: Some(d_airybiprime), at_zero: None },
    // For bessel/legendre kernels the derivative acts on the last argument;
    // the leading arguments are order parameters.
    KernelDef { name: "besselj", arity: 2, numeric: NumericKind::SymbolicOnly, derivative: Some(d_besselj), at_zero: None },
    KernelDef { name: "bessely", arity: 2, numeric: NumericKind::SymbolicOnly, derivative: Some(d_bessely), at_zero: None },
    KernelDef { name: "legendrep", arity: 3, numeric: NumericKind::SymbolicOnly, derivative: None, at_zero: None },
    KernelDef { name: "legendreq", arity: 3, numeric: NumericKind::SymbolicOnly, derivative: None, at_zero: None },
];

pub fn lookup(name: &str) -> Option<&'static KernelDef> {
    KERNELS.iter().find(|k| k.name == name)
}

pub fn is_registered(name: &str) -> bool {
    lookup(name).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_closure_names_resolve() {
        for k in KERNELS {
            assert!(!k.name.is_empty());
            assert!(k.arity >= 1);
        }
        assert!(lookup("exp").is_some());
        assert!(lookup("legendrep").unwrap().derivative.is_none());
    }
}

//! Precedence-aware printer; output re-parses to the same normal form.

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{Expr, ElemFn};

#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Prec {
    Sum,
    Term,
    Unary,
    Power,
    Atom,
}

pub(crate) fn print(e: &Expr) -> String {
    render(e, Prec::Sum)
}

fn render(e: &Expr, ctx: Prec) -> String {
    let (s, prec) = match e {
        Expr::Rat(q) => (render_rat(q), if q.is_negative() { Prec::Unary } else if q.is_integer() { Prec::Atom } else { Prec::Term }),
        Expr::Sym(name) => (name.clone(), Prec::Atom),
        Expr::Jet { var, index } => {
            if index.is_empty() {
                (var.clone(), Prec::Atom)
            } else if index.dirs().iter().all(|d| d.len() == 1) {
                if index.len() == 1 {
                    (format!("{var}_{index}"), Prec::Atom)
                } else {
                    (format!("{var}_{{{index}}}"), Prec::Atom)
                }
            } else {
                (format!("{var}_{{{index}}}"), Prec::Atom)
            }
        }
        Expr::Sum(terms) => {
            let mut out = String::new();
            for (i, t) in terms.iter().enumerate() {
                let (neg, body) = strip_neg(t);
                if i == 0 {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                out.push_str(&render(&body, Prec::Term));
            }
            (out, Prec::Sum)
        }
        Expr::Prod(factors) => {
            let mut num = Vec::new();
            let mut den = Vec::new();
            for f in factors {
                match f {
                    Expr::Pow(b, q) if q.is_negative() => {
                        let flipped = -q.clone();
                        if flipped.is_one() {
                            den.push((**b).clone());
                        } else {
                            den.push(Expr::Pow(b.clone(), flipped));
                        }
                    }
                    _ => num.push(f.clone()),
                }
            }
            let num_s = if num.is_empty() {
                "1".to_string()
            } else {
                num.iter().map(|f| render(f, Prec::Term)).collect::<Vec<_>>().join("*")
            };
            let s = if den.is_empty() {
                num_s
            } else if den.len() == 1 {
                format!("{num_s}/{}", render(&den[0], Prec::Unary))
            } else {
                format!(
                    "{num_s}/({})",
                    den.iter().map(|f| render(f, Prec::Term)).collect::<Vec<_>>().join("*")
                )
            };
            (s, Prec::Term)
        }
        Expr::Pow(b, q) => {
            let base = render(b, Prec::Power);
            let base = if needs_parens_for_power(b) { format!("({base})") } else { base };
            let exp = if q.is_integer() && !q.is_negative() {
                format!("{}", q.numer())
            } else {
                format!("({})", render_rat(q))
            };
            (format!("{base}^{exp}"), Prec::Power)
        }
        Expr::Elem(f, args) => (
            format!(
                "{}({})",
                f.name(),
                args.iter().map(|a| render(a, Prec::Sum)).collect::<Vec<_>>().join(", ")
            ),
            Prec::Atom,
        ),
        Expr::Opaque { name, args } => (
            format!(
                "{name}({})",
                args.iter().map(|a| render(a, Prec::Sum)).collect::<Vec<_>>().join(", ")
            ),
            Prec::Atom,
        ),
        Expr::OpaqueDeriv { name, args, slots } => (
            format!(
                "{name}_{{{}}}({})",
                slots.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join(","),
                args.iter().map(|a| render(a, Prec::Sum)).collect::<Vec<_>>().join(", ")
            ),
            Prec::Atom,
        ),
        Expr::Int { integrand, var } => (
            format!("Int({}, {})", render(integrand, Prec::Sum), render(var, Prec::Sum)),
            Prec::Atom,
        ),
    };
    if prec < ctx {
        format!("({s})")
    } else {
        s
    }
}

fn render_rat(q: &BigRational) -> String {
    if q.is_integer() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn strip_neg(e: &Expr) -> (bool, Expr) {
    if let Expr::Rat(q) = e {
        if q.is_negative() {
            return (true, Expr::Rat(-q.clone()));
        }
    }
    if let Expr::Prod(fs) = e {
        if let Some(Expr::Rat(q)) = fs.first() {
            if q.is_negative() {
                let mut rest = fs.clone();
                let nq = -q.clone();
                if nq.is_one() && rest.len() > 1 {
                    rest.remove(0);
                } else {
                    rest[0] = Expr::Rat(nq);
                }
                return (true, Expr::prod(rest));
            }
        }
    }
    (false, e.clone())
}

fn needs_parens_for_power(b: &Expr) -> bool {
    !matches!(
        b,
        Expr::Sym(_)
            | Expr::Jet { .. }
            | Expr::Elem(
                ElemFn::Sin
                    | ElemFn::Cos
                    | ElemFn::Tan
                    | ElemFn::Cot
                    | ElemFn::Exp
                    | ElemFn::Ln
                    | ElemFn::Sqrt
                    | ElemFn::Atan2,
                _
            )
            | Expr::Opaque { .. }
            | Expr::OpaqueDeriv { .. }
            | Expr::Int { .. }
    )
}

#[cfg(test)]
mod tests {
    use super::super::Expr;
    use crate::jet::JetContext;

    fn ctx() -> JetContext {
        JetContext::builder()
            .independent(["x", "t"])
            .dependent(["u", "v"])
            .opaque("F", 2)
            .build()
            .unwrap()
    }

    fn roundtrip(src: &str) {
        let c = ctx();
        let e = Expr::parse(src, &c).unwrap().normalize();
        let printed = e.to_string();
        let back = Expr::parse(&printed, &c).unwrap().normalize();
        assert_eq!(e, back, "print/parse mismatch for `{src}` -> `{printed}`");
    }

    #[test]
    fn print_parse_roundtrip() {
        roundtrip("u_t + u*u_x");
        roundtrip("(1/2)*v^2 + cos(u)");
        roundtrip("v*v_t - u_x*sin(u)");
        roundtrip("F(u, v)*u_x - F_{1}(u, v)");
        roundtrip("3/7 - u^(1/2) + 2^(1/2)*x");
        roundtrip("u_{xt} / (v + 1)");
        roundtrip("Int(F(u, u), u) + exp(u + x)");
        roundtrip("-u - 5*v");
    }
}

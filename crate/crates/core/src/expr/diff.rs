//! Formal partial differentiation.
//!
//! `diff_partial(e, s)` treats every symbol and jet coordinate other than `s`
//! as an independent constant.  Opaque applications differentiate through the
//! chain rule into formal-derivative nodes; the antiderivative node
//! differentiates to its integrand in its own variable and under the integral
//! sign in every other variable.

use num_rational::BigRational;
use num_traits::One;

use super::{ElemFn, Expr};

pub(crate) fn diff_partial(e: &Expr, s: &Expr) -> Expr {
    if e == s {
        return Expr::one();
    }
    match e {
        Expr::Rat(_) | Expr::Sym(_) | Expr::Jet { .. } => Expr::zero(),
        Expr::Sum(terms) => Expr::sum(terms.iter().map(|t| diff_partial(t, s)).collect()),
        Expr::Prod(factors) => {
            let mut terms = Vec::with_capacity(factors.len());
            for (i, f) in factors.iter().enumerate() {
                let df = diff_partial(f, s);
                if df.is_zero() {
                    continue;
                }
                let mut prod = vec![df];
                for (j, g) in factors.iter().enumerate() {
                    if i != j {
                        prod.push(g.clone());
                    }
                }
                terms.push(Expr::prod(prod));
            }
            Expr::sum(terms)
        }
        Expr::Pow(b, q) => {
            let db = diff_partial(b, s);
            if db.is_zero() {
                return Expr::zero();
            }
            let qm1 = q - BigRational::one();
            Expr::prod(vec![Expr::Rat(q.clone()), Expr::Pow(b.clone(), qm1), db])
        }
        Expr::Elem(f, args) => diff_elem(*f, args, s),
        Expr::Opaque { name, args } => {
            let mut terms = Vec::new();
            for (i, a) in args.iter().enumerate() {
                let da = diff_partial(a, s);
                if da.is_zero() {
                    continue;
                }
                terms.push(Expr::mul(
                    da,
                    Expr::opaque_deriv(name, args.clone(), vec![i]),
                ));
            }
            Expr::sum(terms)
        }
        Expr::OpaqueDeriv { name, args, slots } => {
            let mut terms = Vec::new();
            for (i, a) in args.iter().enumerate() {
                let da = diff_partial(a, s);
                if da.is_zero() {
                    continue;
                }
                let mut new_slots = slots.clone();
                new_slots.push(i);
                terms.push(Expr::mul(
                    da,
                    Expr::opaque_deriv(name, args.clone(), new_slots),
                ));
            }
            Expr::sum(terms)
        }
        Expr::Int { integrand, var } => {
            if var.as_ref() == s {
                return (**integrand).clone();
            }
            // Differentiation under the integral sign; the bound occurrences
            // of `var` are opaque to `s` by assumption.
            let dg = diff_partial(integrand, s);
            if dg.is_zero() {
                Expr::zero()
            } else {
                Expr::antideriv(dg, (**var).clone())
            }
        }
    }
}

fn diff_elem(f: ElemFn, args: &[Expr], s: &Expr) -> Expr {
    match f {
        ElemFn::Atan2 => {
            let (y, x) = (&args[0], &args[1]);
            let dy = diff_partial(y, s);
            let dx = diff_partial(x, s);
            if dy.is_zero() && dx.is_zero() {
                return Expr::zero();
            }
            let r2 = Expr::add(Expr::powi(x.clone(), 2), Expr::powi(y.clone(), 2));
            let num = Expr::sub(Expr::mul(x.clone(), dy), Expr::mul(y.clone(), dx));
            Expr::mul(num, Expr::powi(r2, -1))
        }
        _ => {
            let a = &args[0];
            let da = diff_partial(a, s);
            if da.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                ElemFn::Sin => Expr::cos(a.clone()),
                ElemFn::Cos => Expr::neg(Expr::sin(a.clone())),
                ElemFn::Tan => Expr::powi(Expr::cos(a.clone()), -2),
                ElemFn::Cot => Expr::neg(Expr::powi(Expr::sin(a.clone()), -2)),
                ElemFn::Exp => Expr::exp(a.clone()),
                ElemFn::Ln => Expr::powi(a.clone(), -1),
                ElemFn::Sqrt => Expr::mul(
                    Expr::rat(1, 2),
                    Expr::powq(a.clone(), super::bigfrac(-1, 2)),
                ),
                ElemFn::Atan2 => unreachable!(),
            };
            Expr::mul(outer, da)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::Expr;

    #[test]
    fn basic_rules() {
        let u = Expr::var("u");
        let ux = Expr::jet("u", ["x"]);
        let ut = Expr::jet("u", ["t"]);
        // d(u_t + u u_x)/du = u_x
        let e = Expr::add(ut.clone(), Expr::mul(u.clone(), ux.clone()));
        assert!(Expr::equivalent(&e.diff_partial(&u), &ux));
        // d(v^2/2)/dv = v
        let v = Expr::var("v");
        let e = Expr::mul(Expr::rat(1, 2), Expr::powi(v.clone(), 2));
        assert!(Expr::equivalent(&e.diff_partial(&v), &v));
    }

    #[test]
    fn opaque_chain_rule() {
        // dF(u^2 + v^2, t)/du = 2u F_1(u^2+v^2, t)
        let u = Expr::var("u");
        let v = Expr::var("v");
        let t = Expr::sym("t");
        let arg = Expr::add(Expr::powi(u.clone(), 2), Expr::powi(v.clone(), 2));
        let f = Expr::opaque("F", vec![arg.clone(), t.clone()]);
        let d = f.diff_partial(&u);
        let expected = Expr::prod(vec![
            Expr::int(2),
            u.clone(),
            Expr::opaque_deriv("F", vec![arg.normalize(), t.clone()], vec![0]),
        ]);
        assert!(Expr::equivalent(&d, &expected));
    }

    #[test]
    fn mixed_formal_partials_commute() {
        let s = Expr::sym("s");
        let t = Expr::sym("t");
        let f = Expr::opaque("f", vec![s.clone(), t.clone()]);
        let dst = f.diff_partial(&s).diff_partial(&t);
        let dts = f.diff_partial(&t).diff_partial(&s);
        assert_eq!(dst, dts);
    }

    #[test]
    fn antiderivative_rule() {
        // d/du Int(F(u), u) = F(u); d/dt Int(F(u), u) = 0
        let u = Expr::var("u");
        let t = Expr::sym("t");
        let f = Expr::opaque("F", vec![u.clone()]);
        let i = Expr::antideriv(f.clone(), u.clone());
        assert!(Expr::equivalent(&i.diff_partial(&u), &f));
        assert!(i.diff_partial(&t).is_zero());
    }

    #[test]
    fn linearity() {
        let u = Expr::var("u");
        let x = Expr::sym("x");
        let e1 = Expr::sin(u.clone());
        let e2 = Expr::mul(u.clone(), x.clone());
        let a = Expr::rat(3, 7);
        let lhs = Expr::add(Expr::mul(a.clone(), e1.clone()), e2.clone()).diff_partial(&u);
        let rhs = Expr::add(
            Expr::mul(a.clone(), e1.diff_partial(&u)),
            e2.diff_partial(&u),
        );
        assert!(Expr::equivalent(&lhs, &rhs));
    }
}

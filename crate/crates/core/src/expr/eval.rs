//! Numeric evaluation, used by test oracles and soundness cross-checks.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

use super::{ElemFn, Expr};
use crate::error::{Error, Result};

/// Evaluate treating every kernel that appears in `assignment` as an
/// independent indeterminate with the given exact rational value.  Elementary
/// and opaque applications must be covered by the assignment (they are not
/// evaluated through); powers must come out integral.
pub fn eval_rational(e: &Expr, assignment: &BTreeMap<Expr, BigRational>) -> Result<BigRational> {
    if let Some(v) = assignment.get(e) {
        return Ok(v.clone());
    }
    match e {
        Expr::Rat(c) => Ok(c.clone()),
        Expr::Sum(ts) => {
            let mut acc = BigRational::zero();
            for t in ts {
                acc += eval_rational(t, assignment)?;
            }
            Ok(acc)
        }
        Expr::Prod(fs) => {
            let mut acc = BigRational::from_integer(1.into());
            for f in fs {
                acc *= eval_rational(f, assignment)?;
            }
            Ok(acc)
        }
        Expr::Pow(b, q) => {
            let base = eval_rational(b, assignment)?;
            if !q.is_integer() {
                return Err(Error::Domain("fractional power in rational evaluation".into()));
            }
            let n = q.to_integer().to_i64().ok_or_else(|| Error::Domain("huge exponent".into()))?;
            if base.is_zero() && n < 0 {
                return Err(Error::DivisionByZero);
            }
            let mut acc = BigRational::from_integer(1.into());
            let b = if n < 0 { base.recip() } else { base };
            for _ in 0..n.unsigned_abs() {
                acc *= &b;
            }
            Ok(acc)
        }
        _ => Err(Error::Domain(format!("kernel `{e}` has no assigned value"))),
    }
}

/// Approximate evaluation with elementary functions interpreted over the
/// reals.  Opaque functions and antiderivatives are not supported.
pub fn eval_f64(e: &Expr, assignment: &BTreeMap<Expr, f64>) -> Result<f64> {
    if let Some(v) = assignment.get(e) {
        return Ok(*v);
    }
    match e {
        Expr::Rat(c) => Ok(c.to_f64().ok_or_else(|| Error::Domain("rational out of range".into()))?),
        Expr::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += eval_f64(t, assignment)?;
            }
            Ok(acc)
        }
        Expr::Prod(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= eval_f64(f, assignment)?;
            }
            Ok(acc)
        }
        Expr::Pow(b, q) => {
            let base = eval_f64(b, assignment)?;
            let exp = q.to_f64().ok_or_else(|| Error::Domain("exponent out of range".into()))?;
            Ok(base.powf(exp))
        }
        Expr::Elem(f, args) => {
            let a = eval_f64(&args[0], assignment)?;
            Ok(match f {
                ElemFn::Sin => a.sin(),
                ElemFn::Cos => a.cos(),
                ElemFn::Tan => a.tan(),
                ElemFn::Cot => a.cos() / a.sin(),
                ElemFn::Exp => a.exp(),
                ElemFn::Ln => {
                    if a <= 0.0 {
                        return Err(Error::Domain("ln of a nonpositive value".into()));
                    }
                    a.ln()
                }
                ElemFn::Sqrt => {
                    if a.is_negative() {
                        return Err(Error::Domain("sqrt of a negative value".into()));
                    }
                    a.sqrt()
                }
                ElemFn::Atan2 => {
                    let x = eval_f64(&args[1], assignment)?;
                    a.atan2(x)
                }
            })
        }
        _ => Err(Error::Domain(format!("cannot evaluate `{e}` numerically"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_angle_sampled() {
        // Numeric oracle behind the double-angle closure rule.
        let u = Expr::var("u");
        let e = Expr::sub(
            Expr::sin(Expr::mul(Expr::int(2), u.clone())),
            Expr::prod(vec![Expr::int(2), Expr::sin(u.clone()), Expr::cos(u.clone())]),
        );
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..20 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let q = ((state >> 16) % 2000) as f64 / 100.0 - 10.0;
            let mut asg = BTreeMap::new();
            asg.insert(u.clone(), q);
            let val = eval_f64(&e, &asg).unwrap();
            assert!(val.abs() < 1e-9, "residual {val} at u={q}");
        }
        assert!(e.is_zero());
    }
}

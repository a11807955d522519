//! Randomized algebraic invariants of the kernel: normal-form idempotence,
//! derivation laws, commutation identities, and soundness cross-checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use subsym_core::expr::{eval_rational, Expr};
use subsym_core::gen::{self, Rng};
use subsym_core::jet::JetContext;

fn ctx2() -> Arc<JetContext> {
    Arc::new(
        JetContext::builder()
            .independent(["x", "t"])
            .dependent(["u", "v"])
            .build()
            .unwrap(),
    )
}

#[test]
fn normalize_is_idempotent_and_absorbing() {
    // For 200 random expressions of depth <= 5: normalize(normalize(e)) =
    // normalize(e) and is_zero(e - normalize(e)).
    let ctx = ctx2();
    let mut rng = Rng::new(0xA11CE);
    for _ in 0..200 {
        let e = gen::expr(&mut rng, &ctx, 5);
        let n = e.normalize();
        assert_eq!(n, n.normalize());
        assert!(Expr::sub(e.clone(), n.clone()).is_zero());
    }
}

#[test]
fn differentiation_is_linear() {
    let ctx = ctx2();
    let mut rng = Rng::new(0xBEE);
    let u = Expr::var("u");
    for _ in 0..60 {
        let e1 = gen::expr(&mut rng, &ctx, 4);
        let e2 = gen::expr(&mut rng, &ctx, 4);
        let a = rng.rational();
        let lhs = Expr::add(Expr::mul(a.clone(), e1.clone()), e2.clone()).diff_partial(&u);
        let rhs = Expr::add(
            Expr::mul(a.clone(), e1.diff_partial(&u)),
            e2.diff_partial(&u),
        );
        assert!(Expr::equivalent(&lhs, &rhs));
    }
}

#[test]
fn total_derivatives_commute() {
    // D_x D_t e = D_t D_x e for 100 random expressions.
    let ctx = ctx2();
    let mut rng = Rng::new(0xC0FFEE);
    for _ in 0..100 {
        let e = gen::expr(&mut rng, &ctx, 4);
        let xt = ctx
            .total_derivative(&ctx.total_derivative(&e, "x").unwrap(), "t")
            .unwrap();
        let tx = ctx
            .total_derivative(&ctx.total_derivative(&e, "t").unwrap(), "x")
            .unwrap();
        assert!(Expr::equivalent(&xt, &tx));
    }
}

#[test]
fn total_derivative_satisfies_leibniz() {
    let ctx = ctx2();
    let mut rng = Rng::new(0xD1CE);
    for _ in 0..60 {
        let e1 = gen::expr(&mut rng, &ctx, 3);
        let e2 = gen::expr(&mut rng, &ctx, 3);
        let lhs = ctx.total_derivative(&Expr::mul(e1.clone(), e2.clone()), "x").unwrap();
        let rhs = Expr::add(
            Expr::mul(ctx.total_derivative(&e1, "x").unwrap(), e2.clone()),
            Expr::mul(e1.clone(), ctx.total_derivative(&e2, "x").unwrap()),
        );
        assert!(Expr::equivalent(&lhs, &rhs));
    }
}

#[test]
fn total_derivative_commutes_with_foreign_partials() {
    // D_x and d/ds commute when s is a plain parameter outside the jet
    // hierarchy.
    let ctx = Arc::new(
        JetContext::builder()
            .independent(["x", "t"])
            .dependent(["u", "v"])
            .params(["s"])
            .build()
            .unwrap(),
    );
    let mut rng = Rng::new(0xFACE);
    let s = Expr::sym("s");
    for _ in 0..40 {
        let base = gen::expr(&mut rng, &ctx, 3);
        let e = Expr::mul(Expr::powi(s.clone(), 2), base);
        let lhs = ctx.total_derivative(&e, "x").unwrap().diff_partial(&s);
        let rhs = ctx.total_derivative(&e.diff_partial(&s), "x").unwrap();
        assert!(Expr::equivalent(&lhs, &rhs));
    }
}

#[test]
fn apply_commutes_with_total_derivative_bidirectional() {
    let ctx = ctx2();
    let mut rng = Rng::new(0x5EED);
    for _ in 0..100 {
        let f = gen::field(&mut rng, &ctx, 3);
        let e = gen::expr(&mut rng, &ctx, 3);
        for dir in ["x", "t"] {
            let lhs = f.apply(&ctx.total_derivative(&e, dir).unwrap()).unwrap();
            let rhs = ctx.total_derivative(&f.apply(&e).unwrap(), dir).unwrap();
            assert!(Expr::equivalent(&lhs, &rhs));
        }
    }
}

#[test]
fn jacobi_identity_for_commutators() {
    let ctx = ctx2();
    let mut rng = Rng::new(0x1ACB);
    for _ in 0..12 {
        let f = gen::field(&mut rng, &ctx, 2);
        let g = gen::field(&mut rng, &ctx, 2);
        let h = gen::field(&mut rng, &ctx, 2);
        let a = f.commutator(&g).unwrap().commutator(&h).unwrap();
        let b = g.commutator(&h).unwrap().commutator(&f).unwrap();
        let c = h.commutator(&f).unwrap().commutator(&g).unwrap();
        let total = a.add(&b).add(&c);
        assert!(total.is_zero(), "Jacobi identity failed");
    }
}

#[test]
fn nonzero_expressions_evaluate_nonzero_somewhere() {
    // Soundness cross-check: for 100 random expressions with is_zero =
    // false, kernel-level evaluation at 5 random rational points is nonzero
    // at least once.
    let ctx = ctx2();
    let mut rng = Rng::new(0xABCD);
    let mut checked = 0;
    while checked < 100 {
        let e = gen::expr(&mut rng, &ctx, 4).normalize();
        if e.is_zero() {
            continue;
        }
        checked += 1;
        let mut kernels: Vec<Expr> = Vec::new();
        e.walk(&mut |n| {
            let atomic = matches!(
                n,
                Expr::Sym(_) | Expr::Jet { .. } | Expr::Elem(..) | Expr::Opaque { .. }
            );
            if atomic && !kernels.contains(n) {
                kernels.push(n.clone());
            }
        });
        // Every kernel gets an independent value; evaluation consults the
        // assignment before recursing, so outer kernels shadow inner ones.
        let mut hit = false;
        for _ in 0..5 {
            let mut asg: BTreeMap<Expr, num_rational::BigRational> = BTreeMap::new();
            for k in &kernels {
                let n = (rng.below(19) as i64) - 9;
                let d = 1 + rng.below(3) as i64;
                asg.insert(
                    k.clone(),
                    num_rational::BigRational::new(n.into(), d.into()),
                );
            }
            match eval_rational(&e, &asg) {
                Ok(v) if !num_traits::Zero::is_zero(&v) => {
                    hit = true;
                    break;
                }
                _ => {}
            }
        }
        assert!(hit, "nonzero normal form evaluated to zero everywhere: {e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn print_parse_roundtrip_on_normal_forms(seed in any::<u64>()) {
        let ctx = ctx2();
        let mut rng = Rng::new(seed);
        let e = gen::expr(&mut rng, &ctx, 4).normalize();
        let printed = e.to_string();
        let back = Expr::parse(&printed, ctx.as_ref())
            .unwrap_or_else(|err| panic!("reparse of `{printed}` failed: {err}"))
            .normalize();
        prop_assert_eq!(e, back);
    }

    #[test]
    fn zero_test_agrees_with_structural_zero(seed in any::<u64>()) {
        let ctx = ctx2();
        let mut rng = Rng::new(seed);
        let e = gen::expr(&mut rng, &ctx, 4);
        let diff = Expr::sub(e.clone(), e.clone());
        prop_assert!(diff.is_zero());
        prop_assert_eq!(diff.normalize(), Expr::zero());
    }
}

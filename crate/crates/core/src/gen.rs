//! Deterministic random expression and field generation for the test
//! suites.  A small xorshift generator keeps runs reproducible without
//! external dependencies.

use std::sync::Arc;

use crate::expr::Expr;
use crate::fields::EvoField;
use crate::jet::JetContext;

#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn small_int(&mut self) -> i64 {
        (self.below(9) as i64) - 4
    }

    /// Nonzero rational with small numerator and denominator.
    pub fn rational(&mut self) -> Expr {
        let n = loop {
            let n = self.small_int();
            if n != 0 {
                break n;
            }
        };
        let d = 1 + self.below(4) as i64;
        Expr::rat(n, d)
    }
}

/// Random expression over the context's symbols and low-order jets.
///
/// Leaves are rationals, independent variables, and jets of order <= 1;
/// interior nodes are sums, products, small integer powers, and elementary
/// functions.  Division is excluded so generated expressions are polynomial
/// in the kernels (decomposition-friendly).
pub fn expr(rng: &mut Rng, ctx: &Arc<JetContext>, depth: usize) -> Expr {
    if depth == 0 {
        return leaf(rng, ctx);
    }
    match rng.below(8) {
        0 | 1 => Expr::add(expr(rng, ctx, depth - 1), expr(rng, ctx, depth - 1)),
        2 | 3 => Expr::mul(expr(rng, ctx, depth - 1), expr(rng, ctx, depth - 1)),
        4 => Expr::powi(expr(rng, ctx, depth - 1), 2),
        5 => Expr::sin(expr(rng, ctx, depth.saturating_sub(2))),
        6 => Expr::cos(expr(rng, ctx, depth.saturating_sub(2))),
        _ => leaf(rng, ctx),
    }
}

fn leaf(rng: &mut Rng, ctx: &Arc<JetContext>) -> Expr {
    let indep = ctx.independent();
    let deps = ctx.dependent();
    match rng.below(4) {
        0 => rng.rational(),
        1 => Expr::sym(&indep[rng.below(indep.len() as u64) as usize]),
        2 => Expr::var(&deps[rng.below(deps.len() as u64) as usize]),
        _ => {
            let dep = &deps[rng.below(deps.len() as u64) as usize];
            let dir = &indep[rng.below(indep.len() as u64) as usize];
            Expr::jet(dep, [dir.as_str()])
        }
    }
}

/// Random evolutionary field with characteristics of bounded depth.
pub fn field(rng: &mut Rng, ctx: &Arc<JetContext>, depth: usize) -> EvoField {
    let chars = (0..ctx.dependent().len())
        .map(|_| expr(rng, ctx, depth))
        .collect();
    EvoField::new(ctx.clone(), chars).expect("generated characteristics are valid")
}

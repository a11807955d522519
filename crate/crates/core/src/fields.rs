//! Evolutionary vector fields, prolonged action, commutators, and truncated
//! flows.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::JetContext;

/// Vertical (evolutionary) vector field, determined by one characteristic per
/// dependent variable.  Prolonged coefficients `D_J alpha^a` are derived on
/// demand, never stored.
#[derive(Debug, Clone)]
pub struct EvoField {
    ctx: Arc<JetContext>,
    chars: Vec<Expr>,
}

/// Point-form generator: coefficients of `d/dx_i` and `d/du^a`, functions of
/// the base variables only (no jets of order >= 1).
#[derive(Debug, Clone)]
pub struct PointField {
    ctx: Arc<JetContext>,
    xi: Vec<Expr>,
    eta: Vec<Expr>,
}

impl EvoField {
    pub fn new(ctx: Arc<JetContext>, chars: Vec<Expr>) -> Result<EvoField> {
        if chars.len() != ctx.dependent().len() {
            return Err(Error::InvalidSystem(format!(
                "expected {} characteristics, got {}",
                ctx.dependent().len(),
                chars.len()
            )));
        }
        for c in &chars {
            ctx.validate(c)?;
        }
        Ok(EvoField { ctx, chars: chars.into_iter().map(|c| c.normalize()).collect() })
    }

    pub fn zero(ctx: Arc<JetContext>) -> EvoField {
        let n = ctx.dependent().len();
        EvoField { ctx, chars: vec![Expr::zero(); n] }
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn characteristics(&self) -> &[Expr] {
        &self.chars
    }

    pub fn characteristic_for(&self, dep: &str) -> Option<&Expr> {
        self.ctx.dependent().iter().position(|d| d == dep).map(|i| &self.chars[i])
    }

    /// Prolonged action on an expression:
    /// `sum_{a,J} (D_J alpha^a) * d e / d u^a_J`.
    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        let mut terms = Vec::new();
        for jet in e.jets() {
            let Expr::Jet { var, index } = &jet else { unreachable!() };
            let coeff = e.diff_partial(&jet);
            if coeff.is_zero() {
                continue;
            }
            let a = self
                .ctx
                .dependent()
                .iter()
                .position(|d| d == var)
                .ok_or_else(|| Error::UnknownSymbol(var.clone()))?;
            let prolonged = self.ctx.total_derivative_multi(&self.chars[a], index)?;
            terms.push(Expr::mul(prolonged, coeff));
        }
        Ok(Expr::sum(terms).normalize())
    }

    /// Lie bracket: characteristics `X(beta^a) - Y(alpha^a)`.
    pub fn commutator(&self, other: &EvoField) -> Result<EvoField> {
        let mut chars = Vec::with_capacity(self.chars.len());
        for a in 0..self.chars.len() {
            let fwd = self.apply(&other.chars[a])?;
            let bwd = other.apply(&self.chars[a])?;
            chars.push(Expr::sub(fwd, bwd).normalize());
        }
        Ok(EvoField { ctx: self.ctx.clone(), chars })
    }

    pub fn scale(&self, c: &Expr) -> EvoField {
        EvoField {
            ctx: self.ctx.clone(),
            chars: self.chars.iter().map(|a| Expr::mul(c.clone(), a.clone()).normalize()).collect(),
        }
    }

    pub fn add(&self, other: &EvoField) -> EvoField {
        EvoField {
            ctx: self.ctx.clone(),
            chars: self
                .chars
                .iter()
                .zip(&other.chars)
                .map(|(a, b)| Expr::add(a.clone(), b.clone()).normalize())
                .collect(),
        }
    }

    /// Same characteristics up to the zero test.
    pub fn equivalent(&self, other: &EvoField) -> bool {
        self.chars
            .iter()
            .zip(&other.chars)
            .all(|(a, b)| Expr::equivalent(a, b))
    }

    pub fn is_zero(&self) -> bool {
        self.chars.iter().all(|c| c.is_zero())
    }

    /// Truncated flow `e^{eps X} u` on an explicit solution.
    ///
    /// `u0` maps each dependent variable to an explicit expression in the
    /// independent variables (no jets).  The result collects, per dependent
    /// variable, the Taylor coefficients `c_k` with `flow = sum_k c_k eps^k`
    /// and `c_k = (X^k u)|_{u0} / k!`; the jets of `u0` are substituted at
    /// each stage.
    pub fn flow_truncated(
        &self,
        u0: &BTreeMap<String, Expr>,
        order: usize,
        eps: &str,
    ) -> Result<FlowExpansion> {
        for (name, e) in u0 {
            if !self.ctx.is_dependent(name) {
                return Err(Error::UnknownSymbol(name.clone()));
            }
            if !e.jets().is_empty() {
                return Err(Error::InvalidSystem(format!(
                    "u0 for `{name}` must be an explicit function of the base variables"
                )));
            }
        }
        let deps = self.ctx.dependent().to_vec();
        let mut coeffs: Vec<Vec<Expr>> = Vec::new();
        for (a, dep) in deps.iter().enumerate() {
            let u0a = u0
                .get(dep)
                .ok_or_else(|| Error::InvalidSystem(format!("missing u0 for `{dep}`")))?;
            let mut out = vec![u0a.normalize()];
            let mut carrier = self.chars[a].clone();
            let mut factorial = num_rational::BigRational::from_integer(1.into());
            for k in 1..=order {
                factorial *= num_rational::BigRational::from_integer(k.into());
                let val = self.eval_on_solution(&carrier, u0)?;
                out.push(Expr::mul(Expr::Rat(factorial.recip()), val).normalize());
                if k < order {
                    carrier = self.apply(&carrier)?;
                }
            }
            coeffs.push(out);
        }
        Ok(FlowExpansion { ctx: self.ctx.clone(), eps: eps.to_string(), coeffs })
    }

    /// Substitute the jets of an explicit solution into `e`.
    fn eval_on_solution(&self, e: &Expr, u0: &BTreeMap<String, Expr>) -> Result<Expr> {
        let mut map = BTreeMap::new();
        for jet in e.jets() {
            let Expr::Jet { var, index } = &jet else { unreachable!() };
            let base = u0
                .get(var)
                .ok_or_else(|| Error::InvalidSystem(format!("missing u0 for `{var}`")))?;
            let val = self.ctx.total_derivative_multi(base, index)?;
            map.insert(jet, val);
        }
        Ok(e.substitute(&map).normalize())
    }
}

/// Taylor expansion of a flow in a formal parameter.
#[derive(Debug, Clone)]
pub struct FlowExpansion {
    ctx: Arc<JetContext>,
    eps: String,
    /// Per dependent variable, coefficients of `eps^0 ..= eps^n`.
    coeffs: Vec<Vec<Expr>>,
}

impl FlowExpansion {
    pub fn eps(&self) -> &str {
        &self.eps
    }

    pub fn coefficients(&self, dep: &str) -> Option<&[Expr]> {
        self.ctx
            .dependent()
            .iter()
            .position(|d| d == dep)
            .map(|i| self.coeffs[i].as_slice())
    }

    /// The flow of one dependent variable as a polynomial in the parameter.
    pub fn as_expr(&self, dep: &str) -> Option<Expr> {
        let cs = self.coefficients(dep)?;
        let eps = Expr::sym(&self.eps);
        Some(
            Expr::sum(
                cs.iter()
                    .enumerate()
                    .map(|(k, c)| Expr::mul(c.clone(), Expr::powi(eps.clone(), k as i64)))
                    .collect(),
            )
            .normalize(),
        )
    }

    /// Substitute the flow into an expression of the jet variables; jets of
    /// the flow are taken by total differentiation of the explicit expansion.
    pub fn residual(&self, e: &Expr) -> Result<Expr> {
        let mut map = BTreeMap::new();
        for jet in e.jets() {
            let Expr::Jet { var, index } = &jet else { unreachable!() };
            let flow = self
                .as_expr(var)
                .ok_or_else(|| Error::UnknownSymbol(var.clone()))?;
            map.insert(jet.clone(), self.ctx.total_derivative_multi(&flow, index)?);
        }
        Ok(e.substitute(&map).normalize())
    }
}

impl PointField {
    pub fn new(ctx: Arc<JetContext>, xi: Vec<Expr>, eta: Vec<Expr>) -> Result<PointField> {
        if xi.len() != ctx.independent().len() || eta.len() != ctx.dependent().len() {
            return Err(Error::InvalidSystem(
                "point field needs one xi per independent and one eta per dependent variable"
                    .into(),
            ));
        }
        for e in xi.iter().chain(eta.iter()) {
            ctx.validate(e)?;
            let deep = e
                .jets()
                .into_iter()
                .any(|j| matches!(&j, Expr::Jet { index, .. } if !index.is_empty()));
            if deep {
                return Err(Error::InvalidSystem(
                    "point field coefficients must not contain jets of order >= 1".into(),
                ));
            }
        }
        Ok(PointField { ctx, xi, eta })
    }

    pub fn xi(&self) -> &[Expr] {
        &self.xi
    }

    pub fn eta(&self) -> &[Expr] {
        &self.eta
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    /// Action on a function of the base variables `(x, u)` only.
    pub fn apply_base(&self, e: &Expr) -> Result<Expr> {
        let mut terms = Vec::new();
        for (i, x) in self.ctx.independent().iter().enumerate() {
            let d = e.diff_partial(&Expr::sym(x));
            if !d.is_zero() {
                terms.push(Expr::mul(self.xi[i].clone(), d));
            }
        }
        for (a, u) in self.ctx.dependent().iter().enumerate() {
            let d = e.diff_partial(&Expr::var(u));
            if !d.is_zero() {
                terms.push(Expr::mul(self.eta[a].clone(), d));
            }
        }
        Ok(Expr::sum(terms).normalize())
    }

    /// Evolutionary representative: `alpha^a = eta^a - sum_i xi^i u^a_i`.
    pub fn canonicalize(&self) -> Result<EvoField> {
        let mut chars = Vec::with_capacity(self.eta.len());
        for (a, dep) in self.ctx.dependent().iter().enumerate() {
            let mut terms = vec![self.eta[a].clone()];
            for (i, dir) in self.ctx.independent().iter().enumerate() {
                terms.push(Expr::neg(Expr::mul(
                    self.xi[i].clone(),
                    Expr::jet(dep, [dir.as_str()]),
                )));
            }
            chars.push(Expr::sum(terms).normalize());
        }
        EvoField::new(self.ctx.clone(), chars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<JetContext> {
        Arc::new(
            JetContext::builder()
                .independent(["x", "t"])
                .dependent(["u", "v"])
                .build()
                .unwrap(),
        )
    }

    #[test]
    fn canonicalize_point_forms() {
        let c = ctx();
        // d_t -> alpha = (-u_t, -v_t)
        let f = PointField::new(
            c.clone(),
            vec![Expr::zero(), Expr::one()],
            vec![Expr::zero(), Expr::zero()],
        )
        .unwrap()
        .canonicalize()
        .unwrap();
        assert!(Expr::equivalent(&f.characteristics()[0], &Expr::neg(Expr::jet("u", ["t"]))));
        assert!(Expr::equivalent(&f.characteristics()[1], &Expr::neg(Expr::jet("v", ["t"]))));

        // d_v -> alpha = (0, 1)
        let f = PointField::new(
            c.clone(),
            vec![Expr::zero(), Expr::zero()],
            vec![Expr::zero(), Expr::one()],
        )
        .unwrap()
        .canonicalize()
        .unwrap();
        assert!(f.characteristics()[0].is_zero());
        assert!(Expr::equivalent(&f.characteristics()[1], &Expr::one()));

        // t d_t - x d_x + v d_v (hand oracle)
        let f = PointField::new(
            c.clone(),
            vec![Expr::neg(Expr::sym("x")), Expr::sym("t")],
            vec![Expr::zero(), Expr::var("v")],
        )
        .unwrap()
        .canonicalize()
        .unwrap();
        let exp_u = Expr::parse("-t*u_t + x*u_x", c.as_ref()).unwrap();
        let exp_v = Expr::parse("v - t*v_t + x*v_x", c.as_ref()).unwrap();
        assert!(Expr::equivalent(&f.characteristics()[0], &exp_u));
        assert!(Expr::equivalent(&f.characteristics()[1], &exp_v));
    }

    #[test]
    fn apply_is_a_derivation() {
        let c = ctx();
        let f = EvoField::new(c.clone(), vec![Expr::sin(Expr::var("u")), Expr::jet("v", ["x"])])
            .unwrap();
        let e1 = Expr::parse("u*u_x", c.as_ref()).unwrap();
        let e2 = Expr::parse("v + cos(u)", c.as_ref()).unwrap();
        let lhs = f.apply(&Expr::mul(e1.clone(), e2.clone())).unwrap();
        let rhs = Expr::add(
            Expr::mul(f.apply(&e1).unwrap(), e2.clone()),
            Expr::mul(e1.clone(), f.apply(&e2).unwrap()),
        );
        assert!(Expr::equivalent(&lhs, &rhs));
    }

    #[test]
    fn apply_commutes_with_total_derivative() {
        let c = ctx();
        let f = EvoField::new(
            c.clone(),
            vec![Expr::mul(Expr::var("u"), Expr::jet("u", ["x"])), Expr::var("v")],
        )
        .unwrap();
        let e = Expr::parse("u_t + sin(u)*v_x", c.as_ref()).unwrap();
        let lhs = f.apply(&c.total_derivative(&e, "x").unwrap()).unwrap();
        let rhs = c.total_derivative(&f.apply(&e).unwrap(), "x").unwrap();
        assert!(Expr::equivalent(&lhs, &rhs));
    }

    #[test]
    fn commutator_basics() {
        let c = Arc::new(
            JetContext::builder()
                .independent(["x"])
                .dependent(["u"])
                .build()
                .unwrap(),
        );
        let f = EvoField::new(c.clone(), vec![Expr::var("u")]).unwrap();
        let g = EvoField::new(c.clone(), vec![Expr::one()]).unwrap();
        // [u, 1] = -1, forced by bilinearity
        let br = f.commutator(&g).unwrap();
        assert!(Expr::equivalent(&br.characteristics()[0], &Expr::int(-1)));
        // [f, f] = 0
        assert!(f.commutator(&f).unwrap().is_zero());
    }

    #[test]
    fn zero_field_flow() {
        let c = ctx();
        let f = EvoField::zero(c.clone());
        let mut u0 = BTreeMap::new();
        u0.insert("u".to_string(), Expr::sym("x"));
        u0.insert("v".to_string(), Expr::sym("t"));
        let flow = f.flow_truncated(&u0, 3, "eps").unwrap();
        let cs = flow.coefficients("u").unwrap();
        assert!(Expr::equivalent(&cs[0], &Expr::sym("x")));
        for c in &cs[1..] {
            assert!(c.is_zero());
        }
    }
}

//! Conservation laws: verification, triviality via characteristics,
//! deformation by sub-symmetry fields, the inverse deformation problem, gauge
//! fields, and the linearization system for derivative-dependent fluxes.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Expr, MultiIndex};
use crate::fields::EvoField;
use crate::invariance::{check_subsymmetry, DeterminingSystem};
use crate::jet::JetContext;
use crate::systems::{DiffSystem, SubSystem};

/// A conservation law `sum_i D_i F^i = 0` on solutions, with fluxes ordered
/// like the independent variables of the parent context.
#[derive(Debug, Clone)]
pub struct ConsLaw {
    system: DiffSystem,
    fluxes: Vec<Expr>,
    /// Exact multipliers when the law is given in characteristic form:
    /// `sum_b multipliers[b] Delta_b = sum_i D_i F^i` identically.
    multipliers: Option<Vec<Expr>>,
    /// Characteristic recovered from the divergence decomposition, one entry
    /// per equation.
    characteristic: Vec<Expr>,
    gamma: BTreeMap<(usize, MultiIndex), Expr>,
}

impl ConsLaw {
    pub fn system(&self) -> &DiffSystem {
        &self.system
    }

    pub fn fluxes(&self) -> &[Expr] {
        &self.fluxes
    }

    pub fn multipliers(&self) -> Option<&[Expr]> {
        self.multipliers.as_deref()
    }

    pub fn characteristic(&self) -> &[Expr] {
        &self.characteristic
    }

    pub fn gamma(&self) -> &BTreeMap<(usize, MultiIndex), Expr> {
        &self.gamma
    }

    pub fn divergence(&self) -> Result<Expr> {
        divergence(&self.system, &self.fluxes)
    }

    /// Trivial iff every characteristic component vanishes on solutions.
    pub fn is_trivial(&self) -> Result<bool> {
        for q in &self.characteristic {
            if !self.system.restrict(q)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The sub-system `beta^i Delta_i` attached to this law (from the exact
    /// multipliers when present, otherwise from the recovered
    /// characteristic).
    pub fn subsystem(&self) -> Result<SubSystem> {
        let beta = match &self.multipliers {
            Some(b) => b.clone(),
            None => self.characteristic.clone(),
        };
        SubSystem::from_scalars(self.system.clone(), beta)
    }

    /// Two laws are equal when their characteristics agree on solutions
    /// (fluxes are only defined modulo trivial parts).
    pub fn same_law(&self, other: &ConsLaw) -> Result<bool> {
        for (a, b) in self.characteristic.iter().zip(&other.characteristic) {
            let d = Expr::sub(a.clone(), b.clone());
            if !self.system.restrict(&d)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn divergence(sys: &DiffSystem, fluxes: &[Expr]) -> Result<Expr> {
    let ctx = sys.ctx();
    if fluxes.len() != ctx.independent().len() {
        return Err(Error::InvalidSystem(format!(
            "expected {} fluxes, got {}",
            ctx.independent().len(),
            fluxes.len()
        )));
    }
    let mut terms = Vec::new();
    for (i, dir) in ctx.independent().iter().enumerate() {
        terms.push(ctx.total_derivative(&fluxes[i], dir)?);
    }
    Ok(Expr::sum(terms).normalize())
}

/// Verify that the fluxes form a conservation law of the system and attach
/// the characteristic via decomposition over the prolonged ideal followed by
/// the adjoint.
pub fn verify_cl(sys: &DiffSystem, fluxes: &[Expr], multipliers: Option<Vec<Expr>>) -> Result<ConsLaw> {
    let div = divergence(sys, fluxes)?;
    let residual = sys.restrict(&div)?;
    if !residual.is_zero() {
        return Err(Error::NotAConservationLaw(residual.to_string()));
    }
    if let Some(beta) = &multipliers {
        // Exact characteristic form: sum_b beta_b Delta_b = divergence.
        let mut terms: Vec<Expr> = beta
            .iter()
            .zip(sys.equations())
            .map(|(b, d)| Expr::mul(b.clone(), d.clone()))
            .collect();
        terms.push(Expr::neg(div.clone()));
        let diff = Expr::sum(terms);
        if !diff.is_zero() {
            return Err(Error::InvalidSystem(format!(
                "declared multipliers do not reproduce the divergence; off-shell difference `{}`",
                diff.normalize()
            )));
        }
    }
    let dec = sys.decompose_on_ideal(&div)?;
    debug_assert!(dec.residual.is_zero());
    let characteristic = sys.ctx().adjoint_apply(&dec.gamma, sys.len())?;
    Ok(ConsLaw { system: sys.clone(), fluxes: fluxes.to_vec(), multipliers, characteristic, gamma: dec.gamma })
}

/// Deform a conservation law along a field: new fluxes `X F^i`.
///
/// The field must be a sub-symmetry of the law's own sub-system; applying a
/// field associated with a different sub-system generally destroys the
/// conservation property, so the precondition is enforced.
pub fn deform(f: &EvoField, cl: &ConsLaw) -> Result<ConsLaw> {
    let ss = cl.subsystem()?;
    let report = check_subsymmetry(f, &ss)?;
    if !report.holds {
        return Err(Error::NotASubsymmetry(
            report
                .residuals
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ));
    }
    let mut new_fluxes = Vec::with_capacity(cl.fluxes.len());
    for fx in &cl.fluxes {
        new_fluxes.push(f.apply(fx)?);
    }
    verify_cl(&cl.system, &new_fluxes, None)
}

/// Closed-form solution of the inverse deformation problem for two
/// first-order fluxes depending on the base variables only.
///
/// Given a source law with fluxes `A^i(x, u)` whose Jacobian in the dependent
/// variables has full rank, returns the unique field deforming the source to
/// the target fluxes `P^i`, up to gauge fields (see [`gauge_field`]).
pub fn inverse_deform(source: &ConsLaw, target: &[Expr]) -> Result<EvoField> {
    let sys = &source.system;
    let ctx = sys.ctx();
    let p = ctx.independent().len();
    let q = ctx.dependent().len();
    for a in &source.fluxes {
        if !a.jets().iter().all(|j| matches!(j, Expr::Jet { index, .. } if index.is_empty())) {
            return Err(Error::NonFunctionFluxes);
        }
    }
    if target.len() != p {
        return Err(Error::InvalidSystem(format!("expected {p} target fluxes")));
    }
    let jac = flux_jacobian(ctx, &source.fluxes);
    if q < p || p != 2 || q != 2 {
        // Rank of a p x q matrix is at most min(p, q); the closed form below
        // is the p = q = 2 case.
        if q < p {
            return Err(Error::RankDeficient(format!(
                "flux Jacobian is {p} x {q}; rank at most {q} < {p}"
            )));
        }
        return Err(Error::UnsupportedForm(
            "inverse deformation implemented for two independent and two dependent variables"
                .into(),
        ));
    }
    let det = crate::systems::determinant(&jac)?;
    if det.is_zero() {
        return Err(Error::RankDeficient("flux Jacobian determinant is symbolically zero".into()));
    }
    // alpha^1 = (A^2_{u^2} P^1 - A^1_{u^2} P^2) / det,
    // alpha^2 = (A^1_{u^1} P^2 - A^2_{u^1} P^1) / det.
    let a1 = Expr::div(
        Expr::sub(
            Expr::mul(jac[1][1].clone(), target[0].clone()),
            Expr::mul(jac[0][1].clone(), target[1].clone()),
        ),
        det.clone(),
    )?;
    let a2 = Expr::div(
        Expr::sub(
            Expr::mul(jac[0][0].clone(), target[1].clone()),
            Expr::mul(jac[1][0].clone(), target[0].clone()),
        ),
        det.clone(),
    )?;
    let field = EvoField::new(ctx.clone(), vec![a1, a2])?;
    // The construction solves X A^i = P^i exactly; keep the check as a
    // safeguard against degenerate inputs.
    for (ai, pi) in source.fluxes.iter().zip(target) {
        let img = field.apply(ai)?;
        if !Expr::equivalent(&img, pi) {
            return Err(Error::InvalidSystem(format!(
                "inverse deformation failed to reach target flux `{pi}`"
            )));
        }
    }
    Ok(field)
}

fn flux_jacobian(ctx: &Arc<JetContext>, fluxes: &[Expr]) -> Vec<Vec<Expr>> {
    fluxes
        .iter()
        .map(|a| {
            ctx.dependent()
                .iter()
                .map(|u| a.diff_partial(&Expr::var(u)))
                .collect()
        })
        .collect()
}

/// Gauge field `X_R` of a source law with base-variable fluxes: deforming by
/// it changes the fluxes only by the trivial pair `(-D_2 R, D_1 R)`.
pub fn gauge_field(source: &ConsLaw, r: &Expr) -> Result<EvoField> {
    let ctx = source.system.ctx();
    if ctx.independent().len() != 2 || ctx.dependent().len() != 2 {
        return Err(Error::UnsupportedForm(
            "gauge fields implemented for two independent and two dependent variables".into(),
        ));
    }
    let d1r = ctx.total_derivative(r, &ctx.independent()[0].clone())?;
    let d2r = ctx.total_derivative(r, &ctx.independent()[1].clone())?;
    inverse_deform(source, &[Expr::neg(d2r), d1r])
}

/// Linearization system for the inverse problem with derivative-dependent
/// fluxes: one equation per flux,
/// `sum_a L_{u^a}(A^i) alpha^a = P^i -+ D R`, with the unknowns applied as
/// expressions (not solved).
///
/// `alpha` supplies the unknown characteristic expressions (typically opaque
/// applications); `r` is the gauge freedom, with the sign convention
/// `P^1 - D_2 R` and `P^2 + D_1 R`.
pub fn frechet_system(
    sys: &DiffSystem,
    source_fluxes: &[Expr],
    target: &[Expr],
    alpha: &[Expr],
    r: &Expr,
) -> Result<DeterminingSystem> {
    let ctx = sys.ctx();
    let p = ctx.independent().len();
    if p != 2 || source_fluxes.len() != 2 || target.len() != 2 {
        return Err(Error::UnsupportedForm(
            "linearization system implemented for two fluxes".into(),
        ));
    }
    if alpha.len() != ctx.dependent().len() {
        return Err(Error::InvalidSystem("one unknown per dependent variable".into()));
    }
    let d1r = ctx.total_derivative(r, &ctx.independent()[0].clone())?;
    let d2r = ctx.total_derivative(r, &ctx.independent()[1].clone())?;
    let rhs = [
        Expr::sub(target[0].clone(), d2r),
        Expr::add(target[1].clone(), d1r),
    ];
    let mut equations = Vec::new();
    for (i, a_flux) in source_fluxes.iter().enumerate() {
        let mut lhs_terms = Vec::new();
        for (a, dep) in ctx.dependent().iter().enumerate() {
            lhs_terms.push(frechet_apply(ctx, a_flux, dep, &alpha[a])?);
        }
        equations.push(Expr::sub(Expr::sum(lhs_terms), rhs[i].clone()).normalize());
    }
    Ok(DeterminingSystem { equations, split: Vec::new(), side_conditions: Vec::new() })
}

/// `L_u(A) w = sum_J (dA/du_J) D_J w`, the linearization of `A` in the
/// dependent variable `dep` applied to `w`.
pub fn frechet_apply(ctx: &Arc<JetContext>, a: &Expr, dep: &str, w: &Expr) -> Result<Expr> {
    let mut terms = Vec::new();
    for jet in a.jets() {
        let Expr::Jet { var, index } = &jet else { unreachable!() };
        if var != dep {
            continue;
        }
        let coeff = a.diff_partial(&jet);
        if coeff.is_zero() {
            continue;
        }
        terms.push(Expr::mul(coeff, ctx.total_derivative_multi(w, index)?));
    }
    Ok(Expr::sum(terms).normalize())
}

/// A catalog entry: a built-in telegraph-type system together with one of
/// its conservation laws and the field that generates the law from the first
/// equation.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub system_id: &'static str,
    pub law_name: &'static str,
    pub law: ConsLaw,
    pub field: EvoField,
}

/// The telegraph conservation-law catalog: four laws of the tan-u system and
/// one each for the linear, exponential, and reciprocal sources, every entry
/// re-verified on load together with its generating field.
pub fn telegraph_catalog() -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    let cases: [(&'static str, &'static [(&'static str, &'static str)]); 4] = [
        ("telegraph-tanu", &[("cl1", "X1"), ("cl2", "X2"), ("cl3", "X3"), ("cl4", "X4")]),
        ("telegraph-Gu", &[("cl", "X")]),
        ("telegraph-exp", &[("cl", "X")]),
        ("telegraph-Ginv", &[("cl", "X")]),
    ];
    for (system_id, pairs) in cases {
        let sf = crate::corpus::load(system_id)?;
        let base = sf.conslaw("base")?;
        for (law_name, field_name) in pairs {
            let law = sf.conslaw(law_name)?;
            let field = sf.field(field_name)?;
            let deformed = deform(&field, &base)?;
            for (got, want) in deformed.fluxes().iter().zip(law.fluxes()) {
                if !Expr::equivalent(got, want) {
                    return Err(Error::InvalidSystem(format!(
                        "{system_id}/{law_name}: catalog field does not reproduce the law"
                    )));
                }
            }
            out.push(CatalogEntry { system_id, law_name, law, field });
        }
    }
    Ok(out)
}

/// Solvability condition for the degenerate direction where both fluxes
/// depend on a single combination `w` of the dependent variables:
/// `A^2_w (P^1 - D_2 R) - A^1_w (P^2 + D_1 R) = 0`.
pub fn degenerate_direction_condition(
    ctx: &Arc<JetContext>,
    a_fluxes_of_w: &[Expr],
    w: &Expr,
    target: &[Expr],
    r: &Expr,
) -> Result<Expr> {
    if a_fluxes_of_w.len() != 2 || target.len() != 2 {
        return Err(Error::UnsupportedForm("degenerate condition needs two fluxes".into()));
    }
    let d1r = ctx.total_derivative(r, &ctx.independent()[0].clone())?;
    let d2r = ctx.total_derivative(r, &ctx.independent()[1].clone())?;
    let a1w = a_fluxes_of_w[0].diff_partial(w);
    let a2w = a_fluxes_of_w[1].diff_partial(w);
    Ok(Expr::sub(
        Expr::mul(a2w, Expr::sub(target[0].clone(), d2r)),
        Expr::mul(a1w, Expr::add(target[1].clone(), d1r)),
    )
    .normalize())
}

//! Decoupledness tests, decouplability detection through sub-system
//! symmetries with an arbitrary multiplier function, straightening-map
//! verification, and the transform-and-recheck pipeline.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fields::{EvoField, PointField};
use crate::invariance::{
    check_subsystem_symmetry, determining_equations, instantiate_unknowns, FieldAnsatz,
    RestrictionMode, UnknownFn,
};
use crate::jet::JetContext;
use crate::systems::{DiffSystem, PointMap, SubSystem};

/// Evidence that a sub-system is decoupled in a free variable.
#[derive(Debug, Clone)]
pub struct DecouplingCertificate {
    /// The name of the free variable (in the coordinates of `map`'s target
    /// when a map is present).
    pub free_var: String,
    /// Nonzero factor multiplying the sub-system before the derivative test.
    pub factor: Option<Expr>,
    /// Straightening map applied before the test, when any.
    pub map: Option<PointMap>,
    /// The member expressions that passed the test.
    pub members: Vec<Expr>,
}

/// Test whether `factor * (Xi Delta)` contains no jet of any dependent
/// variable other than `free_var` (equivalently, all partials with respect to
/// those jets vanish).
pub fn is_decoupled(
    ss: &SubSystem,
    free_var: &str,
    factor: Option<&Expr>,
) -> Result<Option<DecouplingCertificate>> {
    let ctx = ss.parent().ctx();
    if !ctx.is_dependent(free_var) {
        return Err(Error::UnknownSymbol(free_var.to_string()));
    }
    if let Some(f) = factor {
        if f.is_zero() {
            return Err(Error::InvalidSystem("decoupling factor must be nonzero".into()));
        }
    }
    let mut members = Vec::new();
    for e in ss.eval()? {
        let scaled = match factor {
            Some(f) => Expr::mul(f.clone(), e).normalize(),
            None => e,
        };
        if !jet_free_except(&scaled, free_var) {
            return Ok(None);
        }
        members.push(scaled);
    }
    Ok(Some(DecouplingCertificate {
        free_var: free_var.to_string(),
        factor: factor.cloned(),
        map: None,
        members,
    }))
}

fn jet_free_except(e: &Expr, free_var: &str) -> bool {
    let mut clean = true;
    e.walk(&mut |n| {
        if let Expr::Jet { var, .. } = n {
            if var != free_var {
                clean = false;
            }
        }
    });
    clean
}

/// Candidate translation directions for decouplability detection: a
/// point-form field whose coefficients may mention unknown functions, checked
/// under an arbitrary multiplier function.
#[derive(Debug, Clone)]
pub struct DecouplableCandidate {
    pub beta: Vec<Expr>,
    pub field: PointField,
}

/// Verify a candidate `(beta, field)` pair: the field, multiplied by an
/// arbitrary function of the base variables, must be a sub-system symmetry of
/// `beta^i Delta_i`.  Splitting on the arbitrary function's derivatives must
/// leave nothing behind.
pub fn verify_decouplable(
    sys: &DiffSystem,
    candidate: &DecouplableCandidate,
    lambda_args: &[Expr],
) -> Result<bool> {
    // Extend the context with the arbitrary multiplier as an opaque symbol.
    let ctx = sys.ctx();
    let mut builder = JetContext::builder()
        .independent(ctx.independent().iter().cloned())
        .dependent(ctx.dependent().iter().cloned())
        .params(ctx.params().iter().cloned())
        .max_order(ctx.max_order());
    for (name, arity) in ctx.opaque_fns() {
        builder = builder.opaque(name, arity);
    }
    let lam_ctx = Arc::new(builder.opaque("lambdaArb", lambda_args.len()).build()?);
    let lam = Expr::opaque("lambdaArb", lambda_args.to_vec());

    let evo = candidate.field.canonicalize()?;
    let chars: Vec<Expr> = evo
        .characteristics()
        .iter()
        .map(|a| Expr::mul(lam.clone(), a.clone()))
        .collect();
    let lam_field = EvoField::new(lam_ctx.clone(), chars)?;

    let lam_sys = DiffSystem::new(
        lam_ctx.clone(),
        sys.equations().to_vec(),
        sys.leads().iter().map(|l| Some(l.clone())).collect(),
    )?;
    let lam_ss = SubSystem::from_scalars(lam_sys, candidate.beta.clone())?;

    let ansatz = FieldAnsatz {
        field: lam_field,
        unknowns: vec![UnknownFn {
            name: "lambdaArb".into(),
            args: lambda_args.to_vec(),
            arbitrary: true,
        }],
    };
    let ds = determining_equations(&ansatz, &lam_ss, RestrictionMode::SubSystemOnly)?;
    Ok(ds.equations.is_empty())
}

/// Certificate that a candidate direction generates decouplability.
#[derive(Debug, Clone)]
pub struct DetectionCertificate {
    pub beta: Vec<Expr>,
    pub xi: Vec<Expr>,
    pub eta: Vec<Expr>,
}

/// Screen candidate `(beta, direction)` pairs: each one that admits an
/// arbitrary multiplier function (empty determining system) yields a
/// certificate recording the multipliers and the direction components.
///
/// Candidates come from the caller or a catalog; derivation of directions
/// from scratch is out of scope, matching the verify-not-derive posture of
/// the straightening maps.
pub fn detect_decouplable(
    sys: &DiffSystem,
    candidates: &[DecouplableCandidate],
    lambda_args: &[Expr],
) -> Result<Vec<DetectionCertificate>> {
    let mut out = Vec::new();
    for c in candidates {
        if verify_decouplable(sys, c, lambda_args)? {
            out.push(DetectionCertificate {
                beta: c.beta.clone(),
                xi: c.field.xi().to_vec(),
                eta: c.field.eta().to_vec(),
            });
        }
    }
    Ok(out)
}

/// Check that a point map straightens a field into a pure translation of the
/// last barred dependent variable: `X Xbar^i = 0`, `X Ubar^a = delta^{a,last}`,
/// with a symbolically nonzero base Jacobian.
pub fn verify_straightening(map: &PointMap, field: &PointField) -> Result<bool> {
    let ctx = map.ctx();
    let p = ctx.independent().len();
    let q = ctx.dependent().len();
    for (i, fwd) in map.forward().iter().enumerate() {
        let action = field.apply_base(fwd)?;
        let expected = if i == p + q - 1 { Expr::one() } else { Expr::zero() };
        if !Expr::equivalent(&action, &expected) {
            return Ok(false);
        }
    }
    let det = map.forward_jacobian_det()?;
    if det.is_zero() {
        return Err(Error::SingularJacobian);
    }
    Ok(true)
}

/// Output of the decoupling pipeline: the transformed system together with
/// the certificate for its first (combined) equation.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub transformed: DiffSystem,
    pub certificate: DecouplingCertificate,
    /// Nonzero leading coefficients divided out per equation.
    pub scales: Vec<Expr>,
}

/// Recombine the system (first row = the decouplable sub-system), transform
/// it by the map, normalize each equation by its leading coefficient, and
/// re-check decoupledness of the first equation in the barred free variable.
///
/// `combined_leads` pin the solved forms of the recombined system (in the
/// original variables) and `barred_leads` those of the transformed one; pass
/// `None` entries to use the default heuristic.
pub fn decouple_pipeline(
    sys: &DiffSystem,
    combination: &[Vec<Expr>],
    combined_leads: Vec<Option<Expr>>,
    map: &PointMap,
    barred_leads: Vec<Option<Expr>>,
    free_var: &str,
) -> Result<PipelineOutput> {
    let combined = sys.recombine(combination, combined_leads)?;
    let barred_eqs = map.transform_all(combined.equations())?;
    let transformed = DiffSystem::new(map.barred_ctx().clone(), barred_eqs, barred_leads)?;
    // Divide each equation by the coefficient of its leading jet.
    let mut scaled = Vec::new();
    let mut scales = Vec::new();
    for (eq, lead) in transformed.equations().iter().zip(transformed.leads()) {
        let c = eq.diff_partial(lead);
        if c.is_zero() {
            return Err(Error::InvalidSystem(format!(
                "transformed equation lost its leading derivative `{lead}`"
            )));
        }
        scaled.push(Expr::div(eq.clone(), c.clone())?.normalize());
        scales.push(c);
    }
    let final_sys = DiffSystem::new(
        transformed.ctx().clone(),
        scaled,
        transformed.leads().iter().map(|l| Some(l.clone())).collect(),
    )?;
    let first = SubSystem::single_equation(final_sys.clone(), 0)?;
    let Some(mut cert) = is_decoupled(&first, free_var, None)? else {
        return Err(Error::InvalidSystem(format!(
            "transformed sub-system is not decoupled in `{free_var}`"
        )));
    };
    cert.map = Some(map.clone());
    Ok(PipelineOutput { transformed: final_sys, certificate: cert, scales })
}

/// Instantiate an arbitrary function at concrete bodies and check the
/// sub-system symmetry condition for each.
pub fn check_lambda_instances(
    sys: &DiffSystem,
    beta: &[Expr],
    direction: &PointField,
    lambda_args: &[Expr],
    bodies: &[Expr],
) -> Result<bool> {
    let ss = SubSystem::from_scalars(sys.clone(), beta.to_vec())?;
    let evo = direction.canonicalize()?;
    for body in bodies {
        let mut bindings = BTreeMap::new();
        bindings.insert("lambdaArb".to_string(), (lambda_args.to_vec(), body.clone()));
        let lam = Expr::opaque("lambdaArb", lambda_args.to_vec());
        let chars: Vec<Expr> = evo
            .characteristics()
            .iter()
            .map(|a| instantiate_unknowns(&Expr::mul(lam.clone(), a.clone()), &bindings))
            .collect();
        let f = EvoField::new(sys.ctx().clone(), chars)?;
        if !check_subsystem_symmetry(&f, &ss)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat() -> DiffSystem {
        let ctx = Arc::new(
            JetContext::builder()
                .independent(["x", "t"])
                .dependent(["u", "v"])
                .build()
                .unwrap(),
        );
        let d1 = Expr::parse("u_t - u_{xx}", ctx.as_ref()).unwrap();
        let d2 = Expr::parse("v_t - u*v_{xx}", ctx.as_ref()).unwrap();
        DiffSystem::new(
            ctx.clone(),
            vec![d1, d2],
            vec![Some(Expr::jet("u", ["t"])), Some(Expr::jet("v", ["t"]))],
        )
        .unwrap()
    }

    #[test]
    fn heat_first_equation_is_decoupled() {
        let sys = heat();
        let d1 = SubSystem::single_equation(sys.clone(), 0).unwrap();
        assert!(is_decoupled(&d1, "u", None).unwrap().is_some());
        // and trivially not decoupled in v
        assert!(is_decoupled(&d1, "v", None).unwrap().is_none());
    }

    #[test]
    fn euler_second_equation_is_coupled() {
        let ctx = Arc::new(
            JetContext::builder()
                .independent(["x", "t"])
                .dependent(["u", "v"])
                .build()
                .unwrap(),
        );
        let d1 = Expr::parse("u_t + u*u_x", ctx.as_ref()).unwrap();
        let d2 = Expr::parse("v_t + u*v_x", ctx.as_ref()).unwrap();
        let sys = DiffSystem::new(ctx, vec![d1, d2], vec![None, None]).unwrap();
        let ss = SubSystem::single_equation(sys, 1).unwrap();
        assert!(is_decoupled(&ss, "v", None).unwrap().is_none());
    }

    #[test]
    fn arbitrary_translation_detected_on_heat() {
        let sys = heat();
        let ctx = sys.ctx();
        let field = PointField::new(
            ctx.clone(),
            vec![Expr::zero(), Expr::zero()],
            vec![Expr::zero(), Expr::one()],
        )
        .unwrap();
        let candidate = DecouplableCandidate {
            beta: vec![Expr::one(), Expr::zero()],
            field,
        };
        let args = vec![
            Expr::sym("x"),
            Expr::sym("t"),
            Expr::var("u"),
            Expr::var("v"),
        ];
        assert!(verify_decouplable(&sys, &candidate, &args).unwrap());
    }

    #[test]
    fn identity_straightening() {
        let sys = heat();
        let ctx = sys.ctx();
        let id = PointMap::identity(ctx.clone());
        let f = PointField::new(
            ctx.clone(),
            vec![Expr::zero(), Expr::zero()],
            vec![Expr::zero(), Expr::one()],
        )
        .unwrap();
        assert!(verify_straightening(&id, &f).unwrap());
    }
}

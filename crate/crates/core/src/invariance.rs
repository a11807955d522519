//! Symmetry, sub-symmetry and sub-system-symmetry verification, the
//! three-way classification, determining-equation generation with the
//! arbitrary-function hierarchy, and a linear solver for unknown constants.

use serde::Serialize;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{Expr, MultiIndex};
use crate::fields::EvoField;
use crate::systems::{DiffSystem, SubSystem};

/// How a transformation relates to a system and one of its sub-systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Leaves every equation invariant on solutions.
    Symmetry,
    /// Leaves the sub-system invariant on the sub-system's own solutions.
    SubsystemSymmetry,
    /// Leaves the sub-system invariant only on solutions of the full system.
    OtherSubsymmetry,
    NotSubsymmetry,
}

/// Outcome of an invariance check.
#[derive(Debug, Clone)]
pub struct InvarianceReport {
    pub holds: bool,
    /// Restricted residuals, one per checked expression.
    pub residuals: Vec<Expr>,
    /// Decomposition coefficients over the restricting ideal, per checked
    /// expression (empty on decomposition failure; the verdict comes from the
    /// residual either way).
    pub gamma: Vec<BTreeMap<(usize, MultiIndex), Expr>>,
    /// Denominators encountered, reported as nonzero side conditions.
    pub side_conditions: Vec<Expr>,
}

impl InvarianceReport {
    fn from_residuals(residuals: Vec<Expr>, gamma: Vec<BTreeMap<(usize, MultiIndex), Expr>>) -> Self {
        let mut side_conditions = Vec::new();
        for r in &residuals {
            if let Some(d) = r.denominator() {
                if !side_conditions.contains(&d) {
                    side_conditions.push(d);
                }
            }
        }
        InvarianceReport { holds: residuals.iter().all(|r| r.is_zero()), residuals, gamma, side_conditions }
    }
}

/// `X Delta_i |_{Delta = 0} = 0` for every equation.
pub fn check_symmetry(f: &EvoField, sys: &DiffSystem) -> Result<InvarianceReport> {
    let mut residuals = Vec::new();
    let mut gammas = Vec::new();
    for eq in sys.equations() {
        let action = f.apply(eq)?;
        match sys.decompose_on_ideal(&action) {
            Ok(dec) => {
                residuals.push(dec.residual);
                gammas.push(dec.gamma);
            }
            Err(_) => {
                residuals.push(sys.restrict(&action)?);
                gammas.push(BTreeMap::new());
            }
        }
    }
    Ok(InvarianceReport::from_residuals(residuals, gammas))
}

/// `X (Xi Delta) |_{Delta = 0} = 0`: invariance of the sub-system on
/// solutions of the *full* parent system.
pub fn check_subsymmetry(f: &EvoField, ss: &SubSystem) -> Result<InvarianceReport> {
    let mut residuals = Vec::new();
    let mut gammas = Vec::new();
    for target in ss.eval()? {
        let action = f.apply(&target)?;
        match ss.parent().decompose_on_ideal(&action) {
            Ok(dec) => {
                residuals.push(dec.residual);
                gammas.push(dec.gamma);
            }
            Err(_) => {
                residuals.push(ss.parent().restrict(&action)?);
                gammas.push(BTreeMap::new());
            }
        }
    }
    Ok(InvarianceReport::from_residuals(residuals, gammas))
}

/// `X (Xi Delta) |_{Xi Delta = 0} = 0`: invariance of the sub-system on its
/// *own* solutions, off the rest of the system.
pub fn check_subsystem_symmetry(f: &EvoField, ss: &SubSystem) -> Result<InvarianceReport> {
    check_subsystem_symmetry_solved(f, ss, Vec::new())
}

/// As [`check_subsystem_symmetry`], pinning the solved forms of the
/// sub-system members (`leads[i]` = leading jet of member `i`).
pub fn check_subsystem_symmetry_solved(
    f: &EvoField,
    ss: &SubSystem,
    leads: Vec<Option<Expr>>,
) -> Result<InvarianceReport> {
    let leads = if leads.is_empty() { vec![None; ss.len()] } else { leads };
    let own = ss.as_system(leads)?;
    let mut residuals = Vec::new();
    let mut gammas = Vec::new();
    for target in own.equations() {
        let action = f.apply(target)?;
        match own.decompose_on_ideal(&action) {
            Ok(dec) => {
                residuals.push(dec.residual);
                gammas.push(dec.gamma);
            }
            Err(_) => {
                residuals.push(own.restrict(&action)?);
                gammas.push(BTreeMap::new());
            }
        }
    }
    Ok(InvarianceReport::from_residuals(residuals, gammas))
}

/// Classify a field against a sub-system of a parent system.
pub fn classify(f: &EvoField, ss: &SubSystem) -> Result<Classification> {
    if check_symmetry(f, ss.parent())?.holds {
        return Ok(Classification::Symmetry);
    }
    if check_subsystem_symmetry(f, ss)?.holds {
        return Ok(Classification::SubsystemSymmetry);
    }
    if check_subsymmetry(f, ss)?.holds {
        return Ok(Classification::OtherSubsymmetry);
    }
    Ok(Classification::NotSubsymmetry)
}

/// An unknown function of a declared argument list, to be solved for.
#[derive(Debug, Clone)]
pub struct UnknownFn {
    pub name: String,
    /// Argument kernels (symbols or order-zero jets), in slot order.
    pub args: Vec<Expr>,
    /// Arbitrary functions generate the splitting hierarchy instead of being
    /// solved for.
    pub arbitrary: bool,
}

/// Field template whose characteristics mention unknown opaque functions.
#[derive(Debug, Clone)]
pub struct FieldAnsatz {
    pub field: EvoField,
    pub unknowns: Vec<UnknownFn>,
}

/// Which solved forms restrict the invariance condition before splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictionMode {
    /// Substitute the full parent system (sub-symmetry condition).
    FullSystem,
    /// Substitute only the sub-system's own solved forms (sub-system
    /// symmetry condition).
    SubSystemOnly,
}

/// Overdetermined system produced by coefficient splitting.
#[derive(Debug, Clone)]
pub struct DeterminingSystem {
    /// Equations, each free of the split coordinates.
    pub equations: Vec<Expr>,
    /// The kernels whose coefficients were split off (independent jet
    /// coordinates and arbitrary-function derivatives).
    pub split: Vec<Expr>,
    /// Nonzero side conditions from denominators cleared during splitting.
    pub side_conditions: Vec<Expr>,
}

/// Expand the invariance condition of `ansatz` on a sub-system and split the
/// residual by every coordinate the unknowns cannot depend on.
///
/// Jet coordinates that are not among the unknowns' declared arguments become
/// split coordinates, as do all applications and formal derivatives of the
/// functions marked arbitrary (their coefficients form the additional
/// hierarchy).
pub fn determining_equations(
    ansatz: &FieldAnsatz,
    ss: &SubSystem,
    mode: RestrictionMode,
) -> Result<DeterminingSystem> {
    let mut residuals = Vec::new();
    match mode {
        RestrictionMode::FullSystem => {
            for target in ss.eval()? {
                let action = ansatz.field.apply(&target)?;
                residuals.push(ss.parent().restrict(&action)?);
            }
        }
        RestrictionMode::SubSystemOnly => {
            let own = ss.as_system(vec![None; ss.len()])?;
            for target in own.equations() {
                let action = ansatz.field.apply(target)?;
                residuals.push(own.restrict(&action)?);
            }
        }
    }
    split_residuals(&residuals, &ansatz.unknowns)
}

/// Coefficient splitting of already-restricted residuals.
///
/// A jet coordinate is a split coordinate when it is not an argument of any
/// unknown and does not occur inside a structural kernel (an opaque or
/// elementary application other than the arbitrary functions themselves);
/// splitting on such a coordinate would not be sound, so it stays in the
/// coefficient field.  Applications and formal derivatives of arbitrary
/// functions always split.
pub fn split_residuals(residuals: &[Expr], unknowns: &[UnknownFn]) -> Result<DeterminingSystem> {
    let arg_kernels: Vec<Expr> = unknowns
        .iter()
        .flat_map(|u| u.args.iter().cloned())
        .collect();
    let arbitrary: Vec<&str> = unknowns
        .iter()
        .filter(|u| u.arbitrary)
        .map(|u| u.name.as_str())
        .collect();

    let mut split: Vec<Expr> = Vec::new();
    let mut equations: Vec<Expr> = Vec::new();
    let mut side_conditions: Vec<Expr> = Vec::new();

    for r in residuals {
        let r = r.normalize();
        if r.is_zero() {
            continue;
        }
        if let Some(d) = r.denominator() {
            if !side_conditions.contains(&d) {
                side_conditions.push(d);
            }
        }
        // Clear the denominator (nonzero side condition) and group the
        // numerator terms by their split-kernel part.
        let numerator = match r.denominator() {
            Some(d) => Expr::mul(r.clone(), d).normalize(),
            None => r.clone(),
        };
        let buried = jets_inside_kernels(&numerator, &arbitrary);
        let is_split = |k: &Expr| -> bool {
            match k {
                Expr::Jet { .. } => !arg_kernels.contains(k) && !buried.contains(k),
                Expr::Opaque { name, .. } | Expr::OpaqueDeriv { name, .. } => {
                    arbitrary.contains(&name.as_str())
                }
                _ => false,
            }
        };
        let groups = group_by_kernels(&numerator, &is_split)?;
        for (key, coeff) in groups {
            for k in key {
                if !split.contains(&k) {
                    split.push(k);
                }
            }
            let coeff = coeff.normalize();
            if !coeff.is_zero() && !equations.iter().any(|e| Expr::equivalent(e, &coeff)) {
                equations.push(coeff);
            }
        }
    }
    Ok(DeterminingSystem { equations, split, side_conditions })
}

/// Jets that occur strictly inside a structural kernel (everything except
/// applications of the arbitrary functions themselves).
fn jets_inside_kernels(e: &Expr, arbitrary: &[&str]) -> Vec<Expr> {
    fn collect(e: &Expr, arbitrary: &[&str], inside: bool, out: &mut Vec<Expr>) {
        match e {
            Expr::Jet { .. } => {
                if inside && !out.contains(e) {
                    out.push(e.clone());
                }
            }
            Expr::Rat(_) | Expr::Sym(_) => {}
            Expr::Sum(v) | Expr::Prod(v) => {
                for c in v {
                    collect(c, arbitrary, inside, out);
                }
            }
            Expr::Pow(b, q) => {
                collect(b, arbitrary, inside || !q.is_integer(), out);
            }
            Expr::Elem(_, args) => {
                for a in args {
                    collect(a, arbitrary, true, out);
                }
            }
            Expr::Opaque { name, args } | Expr::OpaqueDeriv { name, args, .. } => {
                let structural = !arbitrary.contains(&name.as_str());
                for a in args {
                    collect(a, arbitrary, inside || structural, out);
                }
            }
            Expr::Int { integrand, var } => {
                collect(integrand, arbitrary, true, out);
                collect(var, arbitrary, true, out);
            }
        }
    }
    let mut out = Vec::new();
    collect(e, arbitrary, false, &mut out);
    out
}

/// Group the terms of a polynomial expression by the sub-monomial over
/// kernels selected by `is_split`; returns `(kernels in the key, coefficient)`
/// per group.
fn group_by_kernels(
    e: &Expr,
    is_split: &dyn Fn(&Expr) -> bool,
) -> Result<Vec<(Vec<Expr>, Expr)>> {
    // Work on the flattened sum-of-products normal form.
    let terms: Vec<Expr> = match e.normalize() {
        Expr::Sum(ts) => ts,
        other => vec![other],
    };
    let mut groups: BTreeMap<Vec<(Expr, num_rational::BigRational)>, Vec<Expr>> = BTreeMap::new();
    for t in terms {
        let factors: Vec<Expr> = match t {
            Expr::Prod(fs) => fs,
            other => vec![other],
        };
        let mut key: Vec<(Expr, num_rational::BigRational)> = Vec::new();
        let mut rest: Vec<Expr> = Vec::new();
        for f in factors {
            let (base, exp) = match &f {
                Expr::Pow(b, q) => ((**b).clone(), q.clone()),
                _ => (f.clone(), num_rational::BigRational::from_integer(1.into())),
            };
            let mut contains_split = false;
            base.walk(&mut |n| {
                if is_split(n) {
                    contains_split = true;
                }
            });
            if contains_split {
                if !is_split(&base) {
                    return Err(Error::UnsupportedForm(format!(
                        "split coordinate occurs inside kernel `{base}`"
                    )));
                }
                key.push((base, exp));
            } else {
                rest.push(f);
            }
        }
        key.sort();
        groups.entry(key).or_default().push(Expr::prod(rest));
    }
    Ok(groups
        .into_iter()
        .map(|(key, coeffs)| {
            (key.into_iter().map(|(k, _)| k).collect(), Expr::sum(coeffs))
        })
        .collect())
}

/// Substitute concrete bodies for unknown functions in an expression: each
/// application `name(args...)` becomes `body` with the declared argument
/// symbols replaced by the actual arguments, and each formal derivative
/// becomes the corresponding partial derivative of the body.
pub fn instantiate_unknowns(
    e: &Expr,
    bindings: &BTreeMap<String, (Vec<Expr>, Expr)>,
) -> Expr {
    let rewritten = rewrite_opaque(e, bindings);
    rewritten.normalize()
}

fn rewrite_opaque(e: &Expr, bindings: &BTreeMap<String, (Vec<Expr>, Expr)>) -> Expr {
    match e {
        Expr::Opaque { name, args } if bindings.contains_key(name) => {
            let (params, body) = &bindings[name];
            bind_body(body, params, args, bindings)
        }
        Expr::OpaqueDeriv { name, args, slots } if bindings.contains_key(name) => {
            let (params, body) = &bindings[name];
            let mut d = body.clone();
            for s in slots {
                d = d.diff_partial(&params[*s]);
            }
            bind_body(&d, params, args, bindings)
        }
        Expr::Sum(v) => Expr::Sum(v.iter().map(|c| rewrite_opaque(c, bindings)).collect()),
        Expr::Prod(v) => Expr::Prod(v.iter().map(|c| rewrite_opaque(c, bindings)).collect()),
        Expr::Pow(b, q) => Expr::Pow(Box::new(rewrite_opaque(b, bindings)), q.clone()),
        Expr::Elem(f, args) => {
            Expr::Elem(*f, args.iter().map(|a| rewrite_opaque(a, bindings)).collect())
        }
        Expr::Opaque { name, args } => Expr::Opaque {
            name: name.clone(),
            args: args.iter().map(|a| rewrite_opaque(a, bindings)).collect(),
        },
        Expr::OpaqueDeriv { name, args, slots } => Expr::OpaqueDeriv {
            name: name.clone(),
            args: args.iter().map(|a| rewrite_opaque(a, bindings)).collect(),
            slots: slots.clone(),
        },
        Expr::Int { integrand, var } => Expr::Int {
            integrand: Box::new(rewrite_opaque(integrand, bindings)),
            var: Box::new(rewrite_opaque(var, bindings)),
        },
        _ => e.clone(),
    }
}

fn bind_body(
    body: &Expr,
    params: &[Expr],
    actual: &[Expr],
    bindings: &BTreeMap<String, (Vec<Expr>, Expr)>,
) -> Expr {
    let actual: Vec<Expr> = actual.iter().map(|a| rewrite_opaque(a, bindings)).collect();
    let map: BTreeMap<Expr, Expr> = params.iter().cloned().zip(actual).collect();
    body.substitute(&map)
}

/// Outcome of the exact linear solve over the listed unknowns.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    /// Assignments for the pivot unknowns (in terms of the free ones, which
    /// are listed separately).
    Consistent { assignments: Vec<(Expr, Expr)>, free: Vec<Expr> },
    /// The reduced system contains contradictions; the offending nonzero
    /// constants are returned as the certificate.
    Inconsistent { certificate: Vec<Expr> },
}

/// Solve a determining system exactly for unknowns occurring linearly.
///
/// Unknown kernels may be symbols or opaque applications / formal
/// derivatives.  Every equation must be affine in the unknowns; a nonlinear
/// occurrence is an error.
pub fn solve_linear_params(ds: &DeterminingSystem, unknowns: &[Expr]) -> Result<SolveOutcome> {
    let n = unknowns.len();
    // Build rows [c_1 ... c_n | -c_0] for each equation sum c_j X_j + c_0 = 0.
    let mut rows: Vec<Vec<Expr>> = Vec::new();
    for eq in &ds.equations {
        let mut row = Vec::with_capacity(n + 1);
        let mut zero_map = BTreeMap::new();
        for x in unknowns {
            zero_map.insert(x.clone(), Expr::zero());
        }
        for x in unknowns {
            let c = eq.diff_partial(x);
            for y in unknowns {
                if c.contains(y) {
                    return Err(Error::NonlinearUnknown(x.to_string()));
                }
            }
            row.push(c);
        }
        let c0 = eq.substitute(&zero_map).normalize();
        // Affineness check: eq == c0 + sum c_j X_j.
        let mut rebuilt = vec![c0.clone()];
        for (c, x) in row.iter().zip(unknowns) {
            rebuilt.push(Expr::mul(c.clone(), x.clone()));
        }
        if !Expr::equivalent(&Expr::sum(rebuilt), eq) {
            return Err(Error::NonlinearUnknown(format!("equation `{eq}`")));
        }
        row.push(Expr::neg(c0).normalize());
        rows.push(row);
    }

    // Gaussian elimination over the rational-function field.
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0usize;
    for col in 0..n {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let pivot = rows[r][col].clone();
        for j in col..=n {
            rows[r][j] = Expr::div(rows[r][j].clone(), pivot.clone())?.normalize();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let factor = rows[i][col].clone();
            for j in col..=n {
                rows[i][j] = Expr::sub(
                    rows[i][j].clone(),
                    Expr::mul(factor.clone(), rows[r][j].clone()),
                )
                .normalize();
            }
        }
        pivots.push((r, col));
        r += 1;
        if r == rows.len() {
            break;
        }
    }

    // Contradictions: 0 = nonzero.
    let mut certificate = Vec::new();
    for row in &rows {
        if row[..n].iter().all(|c| c.is_zero()) && !row[n].is_zero() {
            certificate.push(row[n].clone());
        }
    }
    if !certificate.is_empty() {
        return Ok(SolveOutcome::Inconsistent { certificate });
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut assignments = Vec::new();
    for &(pr, pc) in &pivots {
        // X_pc = rhs - sum_{free j} c_j X_j
        let mut value = vec![rows[pr][n].clone()];
        for j in 0..n {
            if j != pc && !rows[pr][j].is_zero() {
                value.push(Expr::neg(Expr::mul(rows[pr][j].clone(), unknowns[j].clone())));
            }
        }
        assignments.push((unknowns[pc].clone(), Expr::sum(value).normalize()));
    }
    let free = (0..n)
        .filter(|j| !pivot_cols.contains(j))
        .map(|j| unknowns[j].clone())
        .collect();
    Ok(SolveOutcome::Consistent { assignments, free })
}

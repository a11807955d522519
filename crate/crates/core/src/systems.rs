//! Differential systems, operator-valued sub-systems, on-shell restriction,
//! ideal decomposition, and point transformations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{coefficients_in_kernel, Expr, MultiIndex};
use crate::jet::JetContext;

/// A system of differential equations with designated leading derivatives and
/// their solved forms.
///
/// Each equation satisfies `Delta_i = c_i * (lead_i - rhs_i)` exactly, where
/// `c_i` is the coefficient of the leading jet; this is verified at
/// construction.  Restriction "on solutions" substitutes leading jets and all
/// of their prolongations.
#[derive(Debug, Clone)]
pub struct DiffSystem {
    ctx: Arc<JetContext>,
    equations: Vec<Expr>,
    leads: Vec<Expr>,
    rhs: Vec<Expr>,
    max_rank: bool,
}

impl DiffSystem {
    /// Build a system, solving each equation for the given leading jet (or
    /// for the heuristic default when `None`: the highest-order jet of the
    /// index-matched dependent variable, ties broken by variable order then
    /// direction order).
    pub fn new(
        ctx: Arc<JetContext>,
        equations: Vec<Expr>,
        leads: Vec<Option<Expr>>,
    ) -> Result<DiffSystem> {
        if equations.is_empty() || equations.len() != leads.len() {
            return Err(Error::InvalidSystem("equation/lead count mismatch".into()));
        }
        let mut sys_order = 0usize;
        for e in &equations {
            ctx.validate(e)?;
            for j in e.jets() {
                if let Expr::Jet { index, .. } = &j {
                    sys_order = sys_order.max(index.len());
                }
            }
        }
        // Truncation default: highest order in the system plus slack for
        // prolonged substitution and flows.
        if ctx.is_pinned() && sys_order > ctx.max_order() {
            return Err(Error::TruncationOverflow { order: sys_order, max: ctx.max_order() });
        }
        ctx.extend_order(sys_order + 4);

        let equations: Vec<Expr> = equations.iter().map(|e| e.normalize()).collect();
        let mut chosen_leads = Vec::with_capacity(equations.len());
        let mut rhs_list = Vec::with_capacity(equations.len());
        for (i, eq) in equations.iter().enumerate() {
            let lead = match &leads[i] {
                Some(l) => l.clone(),
                None => default_lead(&ctx, eq, i)?,
            };
            if !matches!(&lead, Expr::Jet { .. }) {
                return Err(Error::InvalidSystem(format!(
                    "leading derivative `{lead}` is not a jet coordinate"
                )));
            }
            let coeff = eq.diff_partial(&lead);
            if coeff.is_zero() {
                return Err(Error::InvalidSystem(format!(
                    "equation {} does not contain its leading derivative `{lead}`",
                    i + 1
                )));
            }
            if !coeff.diff_partial(&lead).is_zero() {
                return Err(Error::InvalidSystem(format!(
                    "equation {} is not linear in `{lead}`",
                    i + 1
                )));
            }
            let rhs = Expr::sub(
                lead.clone(),
                Expr::div(eq.clone(), coeff.clone())?,
            )
            .normalize();
            if rhs.contains(&lead) {
                return Err(Error::InvalidSystem(format!(
                    "solved form for `{lead}` still contains it"
                )));
            }
            let recomposed = Expr::mul(coeff, Expr::sub(lead.clone(), rhs.clone()));
            if !Expr::equivalent(&recomposed, eq) {
                return Err(Error::InvalidSystem(format!(
                    "equation {} is inconsistent with its solved form",
                    i + 1
                )));
            }
            chosen_leads.push(lead);
            rhs_list.push(rhs);
        }
        for (i, a) in chosen_leads.iter().enumerate() {
            for b in chosen_leads.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::InvalidSystem(format!(
                        "leading derivative `{a}` used twice"
                    )));
                }
            }
        }
        Ok(DiffSystem { ctx, equations, leads: chosen_leads, rhs: rhs_list, max_rank: true })
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn equations(&self) -> &[Expr] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn leads(&self) -> &[Expr] {
        &self.leads
    }

    pub fn solved_rhs(&self) -> &[Expr] {
        &self.rhs
    }

    /// Maximal-rank assumption flag; recorded, not verified.
    pub fn max_rank(&self) -> bool {
        self.max_rank
    }

    pub fn set_max_rank(&mut self, flag: bool) {
        self.max_rank = flag;
    }

    /// Find `(equation, remainder K)` such that `jet = D_K lead_i`, choosing
    /// the lowest equation index on ties.
    fn lead_match(&self, jet: &Expr) -> Option<(usize, MultiIndex)> {
        let Expr::Jet { var, index } = jet else { return None };
        for (i, lead) in self.leads.iter().enumerate() {
            let Expr::Jet { var: lv, index: li } = lead else { continue };
            if lv == var && index.contains(li) {
                return Some((i, index.minus(li)));
            }
        }
        None
    }

    fn offending_jets(&self, e: &Expr) -> Vec<(Expr, usize, MultiIndex)> {
        e.jets()
            .into_iter()
            .filter_map(|j| self.lead_match(&j).map(|(i, k)| (j, i, k)))
            .collect()
    }

    /// Substitute every leading derivative and all its prolongations until a
    /// fixpoint is reached; the result contains no leading-derivative jets.
    pub fn restrict(&self, e: &Expr) -> Result<Expr> {
        let bound = self.ctx.max_order() + 2;
        let mut cur = e.normalize();
        for _ in 0..=bound {
            let offending = self.offending_jets(&cur);
            if offending.is_empty() {
                return Ok(cur);
            }
            let mut map = BTreeMap::new();
            for (jet, i, k) in offending {
                let val = self.ctx.total_derivative_multi(&self.rhs[i], &k)?;
                map.insert(jet, val);
            }
            cur = cur.substitute(&map).normalize();
        }
        Err(Error::NonTermination(bound))
    }

    /// Decompose `e = sum Gamma^{iI} D_I Delta_i + r` with `r` free of
    /// leading-derivative jets.  `e` must be polynomial in the leading jets;
    /// the residual equals `restrict(e)`.
    pub fn decompose_on_ideal(&self, e: &Expr) -> Result<Decomposition> {
        let bound = self.ctx.max_order() + 2;
        let mut cur = e.normalize();
        let mut gamma: BTreeMap<(usize, MultiIndex), Expr> = BTreeMap::new();
        for _ in 0..=bound {
            let mut offending = self.offending_jets(&cur);
            if offending.is_empty() {
                return Ok(Decomposition { gamma, residual: cur });
            }
            // Eliminate a jet of maximal order first.
            offending.sort_by(|a, b| {
                let (Expr::Jet { index: ia, .. }, Expr::Jet { index: ib, .. }) = (&a.0, &b.0)
                else {
                    unreachable!()
                };
                ib.len().cmp(&ia.len()).then(a.1.cmp(&b.1)).then(a.0.cmp(&b.0))
            });
            let (g, i, k) = offending.into_iter().next().unwrap();
            let prolonged = self.ctx.total_derivative_multi(&self.equations[i], &k)?;
            let coeff = prolonged.diff_partial(&g);
            if coeff.is_zero() || !coeff.diff_partial(&g).is_zero() {
                return Err(Error::UnsupportedForm(format!(
                    "prolonged equation is not linear in `{g}`"
                )));
            }
            // On-shell value of g: the root of the prolonged equation.
            let shell = Expr::sub(g.clone(), Expr::div(prolonged, coeff.clone())?).normalize();
            let parts = coefficients_in_kernel(&cur, &g)?;
            // e = sum_m a_m g^m  =>  e = (w / c) * P + e|_{g -> shell},
            // w = sum_{m>=1} a_m sum_{k<m} g^k shell^{m-1-k}.
            let mut w_terms = Vec::new();
            let mut subst_terms = Vec::new();
            for (m, a_m) in parts.iter().enumerate() {
                if a_m.is_zero() {
                    continue;
                }
                subst_terms.push(Expr::mul(a_m.clone(), Expr::powi(shell.clone(), m as i64)));
                for kk in 0..m {
                    w_terms.push(Expr::prod(vec![
                        a_m.clone(),
                        Expr::powi(g.clone(), kk as i64),
                        Expr::powi(shell.clone(), (m - 1 - kk) as i64),
                    ]));
                }
            }
            let w = Expr::sum(w_terms);
            let contribution = Expr::div(w, coeff)?.normalize();
            if !contribution.is_zero() {
                gamma
                    .entry((i, k))
                    .and_modify(|g0| *g0 = Expr::add(g0.clone(), contribution.clone()).normalize())
                    .or_insert(contribution);
            }
            cur = Expr::sum(subst_terms).normalize();
        }
        Err(Error::NonTermination(bound))
    }

    /// Apply a point transformation, rewriting every equation in the barred
    /// variables via the chain rule (inverse-Jacobian solve on first jets,
    /// iterated for higher orders).  Equations are not rescaled.
    pub fn transform(&self, map: &PointMap) -> Result<DiffSystem> {
        let barred = map.transform_all(&self.equations)?;
        let leads = vec![None; barred.len()];
        DiffSystem::new(map.barred_ctx().clone(), barred, leads)
    }

    /// Replace the equations by invertible linear combinations
    /// `new_i = sum_j matrix[i][j] * Delta_j` (used to present a system in a
    /// different basis before transforming it).
    pub fn recombine(&self, matrix: &[Vec<Expr>], leads: Vec<Option<Expr>>) -> Result<DiffSystem> {
        if matrix.len() != self.equations.len() {
            return Err(Error::InvalidSystem("combination matrix has wrong height".into()));
        }
        let mut new_eqs = Vec::with_capacity(matrix.len());
        for row in matrix {
            if row.len() != self.equations.len() {
                return Err(Error::InvalidSystem("combination matrix has wrong width".into()));
            }
            let terms = row
                .iter()
                .zip(&self.equations)
                .map(|(c, d)| Expr::mul(c.clone(), d.clone()))
                .collect();
            new_eqs.push(Expr::sum(terms).normalize());
        }
        DiffSystem::new(self.ctx.clone(), new_eqs, leads)
    }
}

/// Choose the default leading derivative for equation `i`.
fn default_lead(ctx: &JetContext, eq: &Expr, i: usize) -> Result<Expr> {
    let deps = ctx.dependent();
    let preferred = deps.get(i).cloned();
    let jets = eq.jets();
    if jets.is_empty() {
        return Err(Error::InvalidSystem(format!(
            "equation {} contains no jet coordinates",
            i + 1
        )));
    }
    let pick = |var_filter: Option<&String>| -> Option<Expr> {
        let mut best: Option<Expr> = None;
        for j in &jets {
            let Expr::Jet { var, index } = j else { continue };
            if index.is_empty() {
                continue; // a leading derivative has order >= 1
            }
            if let Some(f) = var_filter {
                if var != f {
                    continue;
                }
            }
            // highest order wins; ties: earlier variable, then smaller index
            let better = match &best {
                None => true,
                Some(Expr::Jet { var: bv, index: bi }) => {
                    use std::cmp::Ordering::*;
                    match index.len().cmp(&bi.len()) {
                        Greater => true,
                        Less => false,
                        Equal => {
                            let vo = deps.iter().position(|d| d == var).unwrap_or(usize::MAX);
                            let bo = deps.iter().position(|d| d == bv).unwrap_or(usize::MAX);
                            match vo.cmp(&bo) {
                                Less => true,
                                Greater => false,
                                Equal => index < bi,
                            }
                        }
                    }
                }
                _ => unreachable!(),
            };
            if better {
                best = Some(j.clone());
            }
        }
        best
    };
    if let Some(p) = &preferred {
        if let Some(l) = pick(Some(p)) {
            return Ok(l);
        }
    }
    pick(None).ok_or_else(|| Error::InvalidSystem(format!("no usable lead in equation {}", i + 1)))
}

/// Result of [`DiffSystem::decompose_on_ideal`].
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Coefficients `Gamma^{iI}` keyed by `(equation index, multi-index)`.
    pub gamma: BTreeMap<(usize, MultiIndex), Expr>,
    /// Remainder, free of leading-derivative jets.
    pub residual: Expr,
}

impl Decomposition {
    /// Rebuild `sum Gamma^{iI} D_I Delta_i + residual`.
    pub fn reassemble(&self, sys: &DiffSystem) -> Result<Expr> {
        let mut terms = vec![self.residual.clone()];
        for ((i, index), gamma) in &self.gamma {
            let prolonged = sys.ctx().total_derivative_multi(&sys.equations()[*i], index)?;
            terms.push(Expr::mul(gamma.clone(), prolonged));
        }
        Ok(Expr::sum(terms).normalize())
    }
}

/// Operator-valued multiplier: a finite map `multi-index -> coefficient`
/// representing `sum_J coeff_J D_J`.
pub type OperatorMultiplier = BTreeMap<MultiIndex, Expr>;

/// A sub-system `Xi^{ib} Delta_b` of a parent system, with operator-valued
/// multipliers.
#[derive(Debug, Clone)]
pub struct SubSystem {
    parent: DiffSystem,
    /// `multipliers[i][b]` applies to equation `b` of the parent to form
    /// member `i` of the sub-system.
    multipliers: Vec<Vec<OperatorMultiplier>>,
}

impl SubSystem {
    pub fn new(parent: DiffSystem, multipliers: Vec<Vec<OperatorMultiplier>>) -> Result<SubSystem> {
        if multipliers.is_empty() {
            return Err(Error::InvalidSystem("sub-system needs at least one member".into()));
        }
        let mut all_zero = true;
        for row in &multipliers {
            if row.len() != parent.len() {
                return Err(Error::InvalidSystem(
                    "each sub-system member needs one multiplier per parent equation".into(),
                ));
            }
            for m in row {
                for coeff in m.values() {
                    if !coeff.is_zero() {
                        all_zero = false;
                    }
                }
            }
        }
        if all_zero {
            return Err(Error::InvalidSystem("all sub-system multipliers are zero".into()));
        }
        Ok(SubSystem { parent, multipliers })
    }

    /// Zero-order multipliers `beta^i Delta_i` for a single member.
    pub fn from_scalars(parent: DiffSystem, beta: Vec<Expr>) -> Result<SubSystem> {
        let row: Vec<OperatorMultiplier> = beta
            .into_iter()
            .map(|b| {
                let mut m = BTreeMap::new();
                m.insert(MultiIndex::empty(), b);
                m
            })
            .collect();
        SubSystem::new(parent, vec![row])
    }

    /// The sub-system consisting of the single parent equation `i`.
    pub fn single_equation(parent: DiffSystem, i: usize) -> Result<SubSystem> {
        let n = parent.len();
        if i >= n {
            return Err(Error::InvalidSystem(format!("no equation {}", i + 1)));
        }
        let beta = (0..n)
            .map(|b| if b == i { Expr::one() } else { Expr::zero() })
            .collect();
        SubSystem::from_scalars(parent, beta)
    }

    pub fn parent(&self) -> &DiffSystem {
        &self.parent
    }

    pub fn multipliers(&self) -> &[Vec<OperatorMultiplier>] {
        &self.multipliers
    }

    pub fn len(&self) -> usize {
        self.multipliers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multipliers.is_empty()
    }

    /// Evaluate each member `sum_b sum_J Xi^{ibJ} D_J Delta_b`.
    pub fn eval(&self) -> Result<Vec<Expr>> {
        let ctx = self.parent.ctx();
        let mut out = Vec::with_capacity(self.multipliers.len());
        for row in &self.multipliers {
            let mut terms = Vec::new();
            for (b, m) in row.iter().enumerate() {
                for (index, coeff) in m {
                    if coeff.is_zero() {
                        continue;
                    }
                    let d = ctx.total_derivative_multi(&self.parent.equations()[b], index)?;
                    terms.push(Expr::mul(coeff.clone(), d));
                }
            }
            out.push(Expr::sum(terms).normalize());
        }
        Ok(out)
    }

    /// The sub-system viewed as a differential system of its own, restricted
    /// only by its own solved forms.  Leads may be pinned per member.
    pub fn as_system(&self, leads: Vec<Option<Expr>>) -> Result<DiffSystem> {
        DiffSystem::new(self.parent.ctx().clone(), self.eval()?, leads)
    }
}

/// Smoothly invertible point transformation between base coordinates.
///
/// `forward[i]` expresses barred coordinate `i` in the unbarred variables;
/// `inverse[i]` the unbarred in barred.  Coordinates are ordered independent
/// variables first, then dependent.
#[derive(Debug, Clone)]
pub struct PointMap {
    ctx: Arc<JetContext>,
    barred_ctx: Arc<JetContext>,
    forward: Vec<Expr>,
    inverse: Vec<Expr>,
}

impl PointMap {
    pub fn new(
        ctx: Arc<JetContext>,
        barred_ctx: Arc<JetContext>,
        forward: Vec<Expr>,
        inverse: Vec<Expr>,
    ) -> Result<PointMap> {
        let n = ctx.independent().len() + ctx.dependent().len();
        let nb = barred_ctx.independent().len() + barred_ctx.dependent().len();
        if n != nb || forward.len() != n || inverse.len() != n {
            return Err(Error::InvalidSystem("coordinate count mismatch in point map".into()));
        }
        for e in &forward {
            ctx.validate(e)?;
        }
        for e in &inverse {
            barred_ctx.validate(e)?;
        }
        Ok(PointMap { ctx, barred_ctx, forward, inverse })
    }

    /// Identity map on a context (barred names equal unbarred names).
    pub fn identity(ctx: Arc<JetContext>) -> PointMap {
        let coords: Vec<Expr> = ctx
            .independent()
            .iter()
            .map(|x| Expr::sym(x))
            .chain(ctx.dependent().iter().map(|u| Expr::var(u)))
            .collect();
        PointMap { ctx: ctx.clone(), barred_ctx: ctx, forward: coords.clone(), inverse: coords }
    }

    pub fn ctx(&self) -> &Arc<JetContext> {
        &self.ctx
    }

    pub fn barred_ctx(&self) -> &Arc<JetContext> {
        &self.barred_ctx
    }

    pub fn forward(&self) -> &[Expr] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Expr] {
        &self.inverse
    }

    /// The same transformation read in the opposite direction.
    pub fn inverted(&self) -> PointMap {
        PointMap {
            ctx: self.barred_ctx.clone(),
            barred_ctx: self.ctx.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    fn coords(ctx: &JetContext) -> Vec<Expr> {
        ctx.independent()
            .iter()
            .map(|x| Expr::sym(x))
            .chain(ctx.dependent().iter().map(|u| Expr::var(u)))
            .collect()
    }

    /// Check that forward and inverse compose to the identity (up to the
    /// nonzero side conditions implied by denominators).
    pub fn verify_inverse(&self) -> Result<()> {
        // inverse(forward(x, u)) = (x, u)
        let sub_fwd: BTreeMap<Expr, Expr> = Self::coords(&self.barred_ctx)
            .into_iter()
            .zip(self.forward.iter().cloned())
            .collect();
        for (coord, inv) in Self::coords(&self.ctx).iter().zip(&self.inverse) {
            let composed = inv.substitute(&sub_fwd).normalize();
            if !Expr::equivalent(&composed, coord) {
                return Err(Error::InvalidSystem(format!(
                    "inverse(forward) does not restore `{coord}`: got `{composed}`"
                )));
            }
        }
        // forward(inverse(xb, ub)) = (xb, ub)
        let sub_inv: BTreeMap<Expr, Expr> = Self::coords(&self.ctx)
            .into_iter()
            .zip(self.inverse.iter().cloned())
            .collect();
        for (coord, fwd) in Self::coords(&self.barred_ctx).iter().zip(&self.forward) {
            let composed = fwd.substitute(&sub_inv).normalize();
            if !Expr::equivalent(&composed, coord) {
                return Err(Error::InvalidSystem(format!(
                    "forward(inverse) does not restore `{coord}`: got `{composed}`"
                )));
            }
        }
        Ok(())
    }

    /// Rewrite expressions of the unbarred jet space in barred variables.
    pub fn transform_all(&self, exprs: &[Expr]) -> Result<Vec<Expr>> {
        let p = self.ctx.independent().len();
        let bctx = &self.barred_ctx;

        // Jacobian J[j][k] = Dbar_k X^j of the inverse base map.
        let mut jac = vec![vec![Expr::zero(); p]; p];
        for (j, inv_x) in self.inverse[..p].iter().enumerate() {
            for (k, xb) in bctx.independent().iter().enumerate() {
                jac[j][k] = bctx.total_derivative(inv_x, xb)?;
            }
        }
        let jac_inv = invert_matrix(&jac)?;

        // Unbarred total derivative of an expression already written in
        // barred variables: D_j = sum_k (J^{-1})_{kj} Dbar_k.
        let unbarred_total = |e: &Expr, j: usize| -> Result<Expr> {
            let mut terms = Vec::new();
            for (k, xb) in bctx.independent().iter().enumerate() {
                let d = bctx.total_derivative(e, xb)?;
                if !d.is_zero() {
                    terms.push(Expr::mul(jac_inv[k][j].clone(), d));
                }
            }
            Ok(Expr::sum(terms).normalize())
        };

        // Base substitution: x_i and u^a as expressions of the barred space.
        let mut base_map: BTreeMap<Expr, Expr> = BTreeMap::new();
        for (i, x) in self.ctx.independent().iter().enumerate() {
            base_map.insert(Expr::sym(x), self.inverse[i].clone());
        }
        for (a, u) in self.ctx.dependent().iter().enumerate() {
            base_map.insert(Expr::var(u), self.inverse[p + a].clone());
        }

        // Jet images, built order by order along prefixes.
        let mut jet_map: BTreeMap<Expr, Expr> = BTreeMap::new();
        let mut need: Vec<Expr> = Vec::new();
        for e in exprs {
            for j in e.jets() {
                if !need.contains(&j) {
                    need.push(j.clone());
                }
            }
        }
        need.sort_by_key(|j| match j {
            Expr::Jet { index, .. } => index.len(),
            _ => 0,
        });
        for jet in &need {
            self.build_jet_image(jet, &base_map, &mut jet_map, &unbarred_total)?;
        }

        let mut full_map = base_map;
        full_map.extend(jet_map);
        exprs
            .iter()
            .map(|e| Ok(e.substitute(&full_map).normalize()))
            .collect()
    }

    fn build_jet_image(
        &self,
        jet: &Expr,
        base_map: &BTreeMap<Expr, Expr>,
        jet_map: &mut BTreeMap<Expr, Expr>,
        unbarred_total: &dyn Fn(&Expr, usize) -> Result<Expr>,
    ) -> Result<()> {
        if jet_map.contains_key(jet) || base_map.contains_key(jet) {
            return Ok(());
        }
        let Expr::Jet { var, index } = jet else {
            return Ok(());
        };
        if index.is_empty() {
            return Ok(());
        }
        let dir = index.dirs()[0].clone();
        let prefix = Expr::Jet {
            var: var.clone(),
            index: index.minus(&MultiIndex::new([dir.clone()])),
        };
        self.build_jet_image(&prefix, base_map, jet_map, unbarred_total)?;
        let prefix_img = jet_map
            .get(&prefix)
            .or_else(|| base_map.get(&prefix))
            .cloned()
            .ok_or_else(|| Error::InvalidSystem(format!("missing image for `{prefix}`")))?;
        let j = self
            .ctx
            .independent()
            .iter()
            .position(|d| *d == dir)
            .ok_or_else(|| Error::UnknownSymbol(dir.clone()))?;
        let img = unbarred_total(&prefix_img, j)?;
        jet_map.insert(jet.clone(), img);
        Ok(())
    }

    /// Determinant of the full base Jacobian `d(forward)/d(x, u)`.
    pub fn forward_jacobian_det(&self) -> Result<Expr> {
        let coords = Self::coords(&self.ctx);
        let n = coords.len();
        let mut m = vec![vec![Expr::zero(); n]; n];
        for (i, f) in self.forward.iter().enumerate() {
            for (j, c) in coords.iter().enumerate() {
                m[i][j] = f.diff_partial(c);
            }
        }
        determinant(&m)
    }
}

/// Symbolic determinant by cofactor expansion (matrices here are tiny).
pub fn determinant(m: &[Vec<Expr>]) -> Result<Expr> {
    let n = m.len();
    if n == 0 {
        return Ok(Expr::one());
    }
    for row in m {
        if row.len() != n {
            return Err(Error::InvalidSystem("non-square matrix".into()));
        }
    }
    if n == 1 {
        return Ok(m[0][0].normalize());
    }
    if n == 2 {
        return Ok(Expr::sub(
            Expr::mul(m[0][0].clone(), m[1][1].clone()),
            Expr::mul(m[0][1].clone(), m[1][0].clone()),
        )
        .normalize());
    }
    let mut terms = Vec::new();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Expr>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let mut term = Expr::mul(m[0][j].clone(), determinant(&minor)?);
        if j % 2 == 1 {
            term = Expr::neg(term);
        }
        terms.push(term);
    }
    Ok(Expr::sum(terms).normalize())
}

/// Symbolic matrix inverse via Gauss-Jordan elimination with zero-test
/// pivoting.
pub fn invert_matrix(m: &[Vec<Expr>]) -> Result<Vec<Vec<Expr>>> {
    let n = m.len();
    let mut a: Vec<Vec<Expr>> = m.to_vec();
    let mut inv: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Expr::one() } else { Expr::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::SingularJacobian)?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] = Expr::div(a[col][j].clone(), pivot.clone())?.normalize();
            inv[col][j] = Expr::div(inv[col][j].clone(), pivot.clone())?.normalize();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                a[r][j] = Expr::sub(a[r][j].clone(), Expr::mul(factor.clone(), a[col][j].clone()))
                    .normalize();
                inv[r][j] =
                    Expr::sub(inv[r][j].clone(), Expr::mul(factor.clone(), inv[col][j].clone()))
                        .normalize();
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> DiffSystem {
        let ctx = Arc::new(
            JetContext::builder()
                .independent(["x", "y", "z"])
                .dependent(["u"])
                .build()
                .unwrap(),
        );
        DiffSystem::new(
            ctx,
            vec![Expr::jet("u", ["x"]), Expr::jet("u", ["y"])],
            vec![None, None],
        )
        .unwrap()
    }

    fn sine_gordon() -> DiffSystem {
        let ctx = Arc::new(
            JetContext::builder()
                .independent(["x", "t"])
                .dependent(["u", "v"])
                .build()
                .unwrap(),
        );
        let d1 = Expr::parse("u_x - v", ctx.as_ref()).unwrap();
        let d2 = Expr::parse("v_t - sin(u)", ctx.as_ref()).unwrap();
        DiffSystem::new(ctx, vec![d1, d2], vec![None, None]).unwrap()
    }

    #[test]
    fn restrict_basics() {
        let sys = trivial();
        // restrict(u_y + x u_{xy}) -> 0
        let ctx = sys.ctx().clone();
        let e = Expr::parse("u_y + x*u_{xy}", ctx.as_ref()).unwrap();
        assert!(sys.restrict(&e).unwrap().is_zero());
        // restrict(Delta_1) -> 0 always
        assert!(sys.restrict(&sys.equations()[0].clone()).unwrap().is_zero());

        let sg = sine_gordon();
        let e = Expr::parse("v*v_t - u_x*sin(u)", sg.ctx().as_ref()).unwrap();
        assert!(sg.restrict(&e).unwrap().is_zero());
    }

    #[test]
    fn default_lead_choice() {
        let sg = sine_gordon();
        assert_eq!(sg.leads()[0], Expr::jet("u", ["x"]));
        assert_eq!(sg.leads()[1], Expr::jet("v", ["t"]));
        assert!(Expr::equivalent(&sg.solved_rhs()[0], &Expr::var("v")));
        assert!(Expr::equivalent(&sg.solved_rhs()[1], &Expr::sin(Expr::var("u"))));
    }

    #[test]
    fn decompose_matches_restrict() {
        let sg = sine_gordon();
        let ctx = sg.ctx().clone();
        let e = Expr::parse("v*v_{tt} + u_{xt}*sin(u) + u_x*v", ctx.as_ref()).unwrap();
        let dec = sg.decompose_on_ideal(&e).unwrap();
        let r = sg.restrict(&e).unwrap();
        assert!(Expr::equivalent(&dec.residual, &r));
        let back = dec.reassemble(&sg).unwrap();
        assert!(Expr::equivalent(&back, &e.normalize()));
    }

    #[test]
    fn eval_subsystem_forms() {
        let sg = sine_gordon();
        // beta = (-sin u, v) gives v v_t - u_x sin u
        let ss = SubSystem::from_scalars(
            sg.clone(),
            vec![
                Expr::neg(Expr::sin(Expr::var("u"))),
                Expr::var("v"),
            ],
        )
        .unwrap();
        let e = ss.eval().unwrap();
        let expected = Expr::parse("v*v_t - u_x*sin(u)", sg.ctx().as_ref()).unwrap();
        assert!(Expr::equivalent(&e[0], &expected));

        // beta = (1, 0) gives Delta_1
        let ss = SubSystem::single_equation(sg.clone(), 0).unwrap();
        assert!(Expr::equivalent(&ss.eval().unwrap()[0], &sg.equations()[0]));
    }

    #[test]
    fn operator_multiplier_subsystem() {
        // Dt(D1) - c(x)^2 Dx(D2) on the linear hyperbolic system
        let ctx = Arc::new(
            JetContext::builder()
                .independent(["x", "t"])
                .dependent(["u", "v"])
                .opaque("c", 1)
                .build()
                .unwrap(),
        );
        let d1 = Expr::parse("u_t + c(x)^2*v_x", ctx.as_ref()).unwrap();
        let d2 = Expr::parse("v_t + u_x", ctx.as_ref()).unwrap();
        let sys = DiffSystem::new(ctx.clone(), vec![d1, d2], vec![None, None]).unwrap();
        let c2 = Expr::powi(Expr::opaque("c", vec![Expr::sym("x")]), 2);
        let mut m1 = BTreeMap::new();
        m1.insert(MultiIndex::new(["t"]), Expr::one());
        let mut m2 = BTreeMap::new();
        m2.insert(MultiIndex::new(["x"]), Expr::neg(c2));
        let ss = SubSystem::new(sys, vec![vec![m1, m2]]).unwrap();
        let e = ss.eval().unwrap();
        let expected = Expr::parse("u_{tt} - c(x)^2*u_{xx}", ctx.as_ref()).unwrap();
        assert!(Expr::equivalent(&e[0], &expected));
    }

    #[test]
    fn identity_map_roundtrip() {
        let sg = sine_gordon();
        let id = PointMap::identity(sg.ctx().clone());
        id.verify_inverse().unwrap();
        let out = sg.transform(&id).unwrap();
        for (a, b) in out.equations().iter().zip(sg.equations()) {
            assert!(Expr::equivalent(a, b));
        }
    }
}

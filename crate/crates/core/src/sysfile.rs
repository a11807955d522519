//! System-definition files.
//!
//! A versioned, line-oriented text format describing a differential system
//! together with named fields, sub-systems, conservation laws, point maps,
//! and expected verdicts.  The same parser backs the built-in corpus and the
//! command-line front end.
//!
//! ```text
//! version 1
//! [vars] x t                  # independent variables, in order
//! [deps] u v                  # dependent variables, in order
//! [params] k                  # constant symbols
//! [opaque] F:1 G:2            # opaque functions, name:arity
//! [equations]
//! D1 = u_x - v                solve u_x
//! D2 = v_t - sin(u)
//! [fields]
//! X1 = point(0, 1; 0, 0)      # xi per var; eta per dep
//! Y1 = evo(cot(u), -v/2)      # characteristics per dep
//! [multipliers]
//! main = v*D2 - sin(u)*D1     # zero-order multipliers
//! wave = Dt(D1) - c(x)^2*Dx(D2)   # operator-valued multipliers
//! [conslaws]
//! sgcl = fluxes(cos(u), v^2/2) multipliers(-sin(u), v)
//! [maps]
//! shear = bars(x, t; w, z) forward(x, t; v - k*u, u) inverse(x, t; z, w + k*z)
//! [expect]
//! symmetry X1 holds
//! subsymmetry Y1 on main holds
//! subsystem-symmetry Y1 on main holds
//! classify X1 on main = symmetry
//! conslaw sgcl nontrivial
//! decoupled first free u
//! ```
//!
//! Fluxes are listed in `[vars]` order.  `solve` pins the leading derivative
//! of an equation; without it the highest-order jet of the index-matched
//! dependent variable is used.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Expr, MultiIndex};
use crate::fields::{EvoField, PointField};
use crate::jet::JetContext;
use crate::systems::{DiffSystem, OperatorMultiplier, PointMap, SubSystem};

/// A named, fully parsed system definition.
#[derive(Debug, Clone)]
pub struct SystemFile {
    pub ctx: Arc<JetContext>,
    pub system: DiffSystem,
    pub fields: BTreeMap<String, FieldDef>,
    pub subsystems: BTreeMap<String, Vec<Vec<OperatorMultiplier>>>,
    pub conslaws: BTreeMap<String, ConsLawDef>,
    pub maps: BTreeMap<String, PointMap>,
    pub expectations: Vec<Expectation>,
}

#[derive(Debug, Clone)]
pub enum FieldDef {
    Point(PointField),
    Evo(EvoField),
}

impl FieldDef {
    pub fn evolutionary(&self) -> Result<EvoField> {
        match self {
            FieldDef::Point(p) => p.canonicalize(),
            FieldDef::Evo(e) => Ok(e.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConsLawDef {
    pub fluxes: Vec<Expr>,
    pub multipliers: Option<Vec<Expr>>,
}

/// Stored verdicts; the corpus re-verifies these as its regression suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Symmetry { field: String, holds: bool },
    Subsymmetry { field: String, subsystem: String, holds: bool },
    SubsystemSymmetry { field: String, subsystem: String, holds: bool },
    Classify { field: String, subsystem: String, tag: String },
    ConsLaw { name: String, trivial: bool },
    Decoupled { subsystem: String, free: String, factor: Option<String> },
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<SystemFile> {
        Parser::new(text).parse()
    }

    pub fn subsystem(&self, name: &str) -> Result<SubSystem> {
        match self.subsystems.get(name) {
            Some(m) => SubSystem::new(self.system.clone(), m.clone()),
            None => {
                // `D<k>` names the single-equation sub-system directly.
                if let Some(idx) = parse_eq_ref(name) {
                    if idx < self.system.len() {
                        return SubSystem::single_equation(self.system.clone(), idx);
                    }
                }
                Err(Error::UnknownId(format!("sub-system `{name}`")))
            }
        }
    }

    pub fn field(&self, name: &str) -> Result<EvoField> {
        self.fields
            .get(name)
            .ok_or_else(|| Error::UnknownId(format!("field `{name}`")))?
            .evolutionary()
    }

    pub fn conslaw(&self, name: &str) -> Result<crate::conservation::ConsLaw> {
        let def = self
            .conslaws
            .get(name)
            .ok_or_else(|| Error::UnknownId(format!("conservation law `{name}`")))?;
        crate::conservation::verify_cl(&self.system, &def.fluxes, def.multipliers.clone())
    }

    pub fn map(&self, name: &str) -> Result<&PointMap> {
        self.maps
            .get(name)
            .ok_or_else(|| Error::UnknownId(format!("map `{name}`")))
    }
}

fn parse_eq_ref(s: &str) -> Option<usize> {
    let rest = s.strip_prefix('D')?;
    let n: usize = rest.parse().ok()?;
    if n == 0 {
        None
    } else {
        Some(n - 1)
    }
}

/// Parse an inline multiplier combination like `v*D2 - sin(u)*D1` or
/// `Dt(D1) - c(x)^2*Dx(D2)` against a context.  Returns one operator
/// multiplier per equation.
pub fn parse_multiplier_row(
    text: &str,
    ctx: &JetContext,
    n_equations: usize,
) -> Result<Vec<OperatorMultiplier>> {
    let mut row: Vec<OperatorMultiplier> = vec![BTreeMap::new(); n_equations];
    for (sign, term) in split_signed_terms(text) {
        let (eq, index, coeff) = parse_multiplier_term(&term, ctx)?;
        if eq >= n_equations {
            return Err(Error::InvalidFile(format!("no equation D{}", eq + 1)));
        }
        let signed = if sign < 0 { Expr::neg(coeff) } else { coeff };
        row[eq]
            .entry(index)
            .and_modify(|c| *c = Expr::add(c.clone(), signed.clone()))
            .or_insert(signed);
    }
    for m in &mut row {
        for c in m.values_mut() {
            *c = c.normalize();
        }
        m.retain(|_, c| !c.is_zero());
    }
    Ok(row)
}

fn parse_multiplier_term(term: &str, ctx: &JetContext) -> Result<(usize, MultiIndex, Expr)> {
    let factors = split_top_level(term, '*');
    let mut coeff_parts: Vec<Expr> = Vec::new();
    let mut eq_ref: Option<(usize, MultiIndex)> = None;
    for f in factors {
        let f = f.trim();
        if let Some((eq, index)) = parse_operator_factor(f, ctx)? {
            if eq_ref.is_some() {
                return Err(Error::InvalidFile(format!(
                    "term `{term}` references more than one equation"
                )));
            }
            eq_ref = Some((eq, index));
        } else {
            coeff_parts.push(Expr::parse(f, ctx)?);
        }
    }
    let (eq, index) = eq_ref.ok_or_else(|| {
        Error::InvalidFile(format!("term `{term}` does not reference an equation (D1, D2, ...)"))
    })?;
    let coeff = if coeff_parts.is_empty() {
        Expr::one()
    } else {
        Expr::prod(coeff_parts)
    };
    Ok((eq, index, coeff))
}

/// `D1` / `Dt(D1)` / `Dx(Dt(D2))` forms; anything else is a coefficient.
fn parse_operator_factor(f: &str, ctx: &JetContext) -> Result<Option<(usize, MultiIndex)>> {
    if let Some(eq) = parse_eq_ref(f) {
        return Ok(Some((eq, MultiIndex::empty())));
    }
    if let Some(rest) = f.strip_prefix('D') {
        if let Some(paren) = rest.find('(') {
            let dir = &rest[..paren];
            if ctx.is_independent(dir) && rest.ends_with(')') {
                let inner = &rest[paren + 1..rest.len() - 1];
                if let Some((eq, index)) = parse_operator_factor(inner.trim(), ctx)? {
                    return Ok(Some((eq, index.extended(dir))));
                }
                return Err(Error::InvalidFile(format!(
                    "operator `{f}` must wrap an equation reference"
                )));
            }
        }
    }
    Ok(None)
}

/// Split at top-level `+`/`-` into signed terms.
fn split_signed_terms(text: &str) -> Vec<(i32, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut sign = 1i32;
    for (i, ch) in text.chars().enumerate() {
        match ch {
            '(' | '{' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | '}' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 && !cur.trim().is_empty() => {
                out.push((sign, cur.trim().to_string()));
                cur = String::new();
                sign = if ch == '-' { -1 } else { 1 };
            }
            '-' if depth == 0 && cur.trim().is_empty() && i == 0 => {
                sign = -1;
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push((sign, cur.trim().to_string()));
    }
    out
}

/// Split at a top-level separator, respecting parentheses and braces.
fn split_top_level(text: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | '{' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | '}' => {
                depth -= 1;
                cur.push(ch);
            }
            c if c == sep && depth == 0 => {
                out.push(cur.clone());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                let body = match l.find('#') {
                    Some(p) => &l[..p],
                    None => l,
                };
                (i + 1, body.trim())
            })
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Parser { lines }
    }

    fn parse(self) -> Result<SystemFile> {
        let mut vars: Vec<String> = Vec::new();
        let mut deps: Vec<String> = Vec::new();
        let mut params: Vec<String> = Vec::new();
        let mut opaque: Vec<(String, usize)> = Vec::new();
        let mut sections: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
        let mut current: Option<String> = None;
        let mut version_seen = false;

        for (ln, line) in &self.lines {
            if let Some(v) = line.strip_prefix("version") {
                let v = v.trim();
                if v != "1" {
                    return Err(Error::InvalidFile(format!("line {ln}: unsupported version `{v}`")));
                }
                version_seen = true;
                continue;
            }
            if line.starts_with('[') {
                let end = line
                    .find(']')
                    .ok_or_else(|| Error::InvalidFile(format!("line {ln}: unclosed section")))?;
                let name = line[1..end].to_string();
                let rest = line[end + 1..].trim();
                match name.as_str() {
                    "vars" => vars.extend(rest.split_whitespace().map(String::from)),
                    "deps" => deps.extend(rest.split_whitespace().map(String::from)),
                    "params" => params.extend(rest.split_whitespace().map(String::from)),
                    "opaque" => {
                        for item in rest.split_whitespace() {
                            let (n, a) = item.split_once(':').ok_or_else(|| {
                                Error::InvalidFile(format!("line {ln}: opaque needs name:arity"))
                            })?;
                            let arity = a.parse().map_err(|_| {
                                Error::InvalidFile(format!("line {ln}: bad arity `{a}`"))
                            })?;
                            opaque.push((n.to_string(), arity));
                        }
                    }
                    _ => {
                        if !rest.is_empty() {
                            return Err(Error::InvalidFile(format!(
                                "line {ln}: section [{name}] takes no inline content"
                            )));
                        }
                        current = Some(name.clone());
                        sections.entry(name.clone()).or_default();
                    }
                }
                if matches!(name.as_str(), "vars" | "deps" | "params" | "opaque") {
                    current = None;
                }
                continue;
            }
            match &current {
                Some(sec) => sections.get_mut(sec).unwrap().push((*ln, line.to_string())),
                None => {
                    return Err(Error::InvalidFile(format!(
                        "line {ln}: content outside of any section"
                    )))
                }
            }
        }
        if !version_seen {
            return Err(Error::InvalidFile("missing `version 1` header".into()));
        }

        let mut builder = JetContext::builder().independent(vars.clone()).dependent(deps.clone());
        if !params.is_empty() {
            builder = builder.params(params.clone());
        }
        for (n, a) in &opaque {
            builder = builder.opaque(n, *a);
        }
        if let Ok(max) = std::env::var("SUBSYM_MAX_ORDER") {
            let l: usize = max
                .parse()
                .map_err(|_| Error::InvalidFile("SUBSYM_MAX_ORDER must be an integer".into()))?;
            builder = builder.max_order(l).pinned(true);
        }
        let ctx = Arc::new(builder.build()?);

        let system = self.parse_equations(&ctx, sections.get("equations"))?;
        let fields = self.parse_fields(&ctx, sections.get("fields"))?;
        let subsystems =
            self.parse_subsystems(&ctx, system.len(), sections.get("multipliers"))?;
        let conslaws = self.parse_conslaws(&ctx, sections.get("conslaws"))?;
        let maps = self.parse_maps(&ctx, sections.get("maps"))?;
        let expectations = self.parse_expectations(sections.get("expect"))?;

        Ok(SystemFile { ctx, system, fields, subsystems, conslaws, maps, expectations })
    }

    fn parse_equations(
        &self,
        ctx: &Arc<JetContext>,
        lines: Option<&Vec<(usize, String)>>,
    ) -> Result<DiffSystem> {
        let lines =
            lines.ok_or_else(|| Error::InvalidFile("missing [equations] section".into()))?;
        let mut equations = Vec::new();
        let mut leads = Vec::new();
        for (i, (ln, line)) in lines.iter().enumerate() {
            let (name, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidFile(format!("line {ln}: expected `D{} = ...`", i + 1)))?;
            let expect = format!("D{}", i + 1);
            if name.trim() != expect {
                return Err(Error::InvalidFile(format!(
                    "line {ln}: equations must be named in order; expected `{expect}`"
                )));
            }
            let (body, lead) = match rhs.split_once(" solve ") {
                Some((b, l)) => (b.trim(), Some(Expr::parse(l.trim(), ctx.as_ref())?)),
                None => (rhs.trim(), None),
            };
            equations.push(Expr::parse(body, ctx.as_ref())?);
            leads.push(lead);
        }
        DiffSystem::new(ctx.clone(), equations, leads)
    }

    fn parse_fields(
        &self,
        ctx: &Arc<JetContext>,
        lines: Option<&Vec<(usize, String)>>,
    ) -> Result<BTreeMap<String, FieldDef>> {
        let mut out = BTreeMap::new();
        let Some(lines) = lines else { return Ok(out) };
        for (ln, line) in lines {
            let (name, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidFile(format!("line {ln}: expected `name = ...`")))?;
            let name = name.trim().to_string();
            let rhs = rhs.trim();
            let def = if let Some(body) = strip_call(rhs, "evo") {
                let chars = self.expr_list(&body, ctx, *ln)?;
                FieldDef::Evo(EvoField::new(ctx.clone(), chars)?)
            } else if let Some(body) = strip_call(rhs, "point") {
                let groups = split_top_level(&body, ';');
                if groups.len() != 2 {
                    return Err(Error::InvalidFile(format!(
                        "line {ln}: point(xi...; eta...) needs two groups"
                    )));
                }
                let xi = self.expr_list(&groups[0], ctx, *ln)?;
                let eta = self.expr_list(&groups[1], ctx, *ln)?;
                FieldDef::Point(PointField::new(ctx.clone(), xi, eta)?)
            } else {
                return Err(Error::InvalidFile(format!(
                    "line {ln}: field must be evo(...) or point(...)"
                )));
            };
            out.insert(name, def);
        }
        Ok(out)
    }

    fn parse_subsystems(
        &self,
        ctx: &Arc<JetContext>,
        n_equations: usize,
        lines: Option<&Vec<(usize, String)>>,
    ) -> Result<BTreeMap<String, Vec<Vec<OperatorMultiplier>>>> {
        let mut out = BTreeMap::new();
        let Some(lines) = lines else { return Ok(out) };
        for (ln, line) in lines {
            let (name, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidFile(format!("line {ln}: expected `name = ...`")))?;
            let rows: Result<Vec<_>> = split_top_level(rhs.trim(), ';')
                .iter()
                .map(|row| parse_multiplier_row(row, ctx.as_ref(), n_equations))
                .collect();
            out.insert(name.trim().to_string(), rows?);
        }
        Ok(out)
    }

    fn parse_conslaws(
        &self,
        ctx: &Arc<JetContext>,
        lines: Option<&Vec<(usize, String)>>,
    ) -> Result<BTreeMap<String, ConsLawDef>> {
        let mut out = BTreeMap::new();
        let Some(lines) = lines else { return Ok(out) };
        for (ln, line) in lines {
            let (name, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidFile(format!("line {ln}: expected `name = ...`")))?;
            let rhs = rhs.trim();
            let fluxes_body = extract_call(rhs, "fluxes").ok_or_else(|| {
                Error::InvalidFile(format!("line {ln}: conservation law needs fluxes(...)"))
            })?;
            let fluxes = self.expr_list(&fluxes_body, ctx, *ln)?;
            let multipliers = match extract_call(rhs, "multipliers") {
                Some(body) => Some(self.expr_list(&body, ctx, *ln)?),
                None => None,
            };
            out.insert(name.trim().to_string(), ConsLawDef { fluxes, multipliers });
        }
        Ok(out)
    }

    fn parse_maps(
        &self,
        ctx: &Arc<JetContext>,
        lines: Option<&Vec<(usize, String)>>,
    ) -> Result<BTreeMap<String, PointMap>> {
        let mut out = BTreeMap::new();
        let Some(lines) = lines else { return Ok(out) };
        for (ln, line) in lines {
            let (name, rhs) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidFile(format!("line {ln}: expected `name = ...`")))?;
            let rhs = rhs.trim();
            let bars_body = extract_call(rhs, "bars")
                .ok_or_else(|| Error::InvalidFile(format!("line {ln}: map needs bars(...)")))?;
            let groups = split_top_level(&bars_body, ';');
            if groups.len() != 2 {
                return Err(Error::InvalidFile(format!(
                    "line {ln}: bars(indep...; dep...) needs two groups"
                )));
            }
            let bar_vars: Vec<String> =
                groups[0].split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            let bar_deps: Vec<String> =
                groups[1].split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            let mut builder = JetContext::builder()
                .independent(bar_vars.clone())
                .dependent(bar_deps.clone())
                .params(ctx.params().iter().cloned())
                .max_order(ctx.max_order());
            for (n, a) in ctx.opaque_fns() {
                builder = builder.opaque(n, a);
            }
            let barred_ctx = Arc::new(builder.build()?);

            let fwd_body = extract_call(rhs, "forward")
                .ok_or_else(|| Error::InvalidFile(format!("line {ln}: map needs forward(...)")))?;
            let inv_body = extract_call(rhs, "inverse")
                .ok_or_else(|| Error::InvalidFile(format!("line {ln}: map needs inverse(...)")))?;
            let forward = self.grouped_exprs(&fwd_body, ctx.as_ref(), *ln)?;
            let inverse = self.grouped_exprs(&inv_body, barred_ctx.as_ref(), *ln)?;
            let map = PointMap::new(ctx.clone(), barred_ctx, forward, inverse)?;
            map.verify_inverse()?;
            out.insert(name.trim().to_string(), map);
        }
        Ok(out)
    }

    fn grouped_exprs(
        &self,
        body: &str,
        table: &dyn crate::expr::SymbolTable,
        ln: usize,
    ) -> Result<Vec<Expr>> {
        let groups = split_top_level(body, ';');
        if groups.len() != 2 {
            return Err(Error::InvalidFile(format!(
                "line {ln}: expected `(indep exprs...; dep exprs...)`"
            )));
        }
        let mut out = Vec::new();
        for g in groups {
            for item in split_top_level(&g, ',') {
                let item = item.trim();
                if !item.is_empty() {
                    out.push(Expr::parse(item, table)?);
                }
            }
        }
        Ok(out)
    }

    fn expr_list(&self, body: &str, ctx: &Arc<JetContext>, ln: usize) -> Result<Vec<Expr>> {
        split_top_level(body, ',')
            .iter()
            .map(|s| {
                Expr::parse(s.trim(), ctx.as_ref()).map_err(|e| {
                    Error::InvalidFile(format!("line {ln}: {e}"))
                })
            })
            .collect()
    }

    fn parse_expectations(
        &self,
        lines: Option<&Vec<(usize, String)>>,
    ) -> Result<Vec<Expectation>> {
        let mut out = Vec::new();
        let Some(lines) = lines else { return Ok(out) };
        for (ln, line) in lines {
            let words: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::InvalidFile(format!("line {ln}: bad expectation `{line}`"));
            let exp = match words.as_slice() {
                ["symmetry", f, verdict] => Expectation::Symmetry {
                    field: f.to_string(),
                    holds: parse_verdict(verdict).ok_or_else(bad)?,
                },
                ["subsymmetry", f, "on", ss, verdict] => Expectation::Subsymmetry {
                    field: f.to_string(),
                    subsystem: ss.to_string(),
                    holds: parse_verdict(verdict).ok_or_else(bad)?,
                },
                ["subsystem-symmetry", f, "on", ss, verdict] => Expectation::SubsystemSymmetry {
                    field: f.to_string(),
                    subsystem: ss.to_string(),
                    holds: parse_verdict(verdict).ok_or_else(bad)?,
                },
                ["classify", f, "on", ss, "=", tag] => Expectation::Classify {
                    field: f.to_string(),
                    subsystem: ss.to_string(),
                    tag: tag.to_string(),
                },
                ["conslaw", name, "trivial"] => {
                    Expectation::ConsLaw { name: name.to_string(), trivial: true }
                }
                ["conslaw", name, "nontrivial"] => {
                    Expectation::ConsLaw { name: name.to_string(), trivial: false }
                }
                ["decoupled", ss, "free", var] => Expectation::Decoupled {
                    subsystem: ss.to_string(),
                    free: var.to_string(),
                    factor: None,
                },
                ["decoupled", ss, "free", var, "factor", rest @ ..] => Expectation::Decoupled {
                    subsystem: ss.to_string(),
                    free: var.to_string(),
                    factor: Some(rest.join(" ")),
                },
                _ => return Err(bad()),
            };
            out.push(exp);
        }
        Ok(out)
    }
}

fn parse_verdict(s: &str) -> Option<bool> {
    match s {
        "holds" => Some(true),
        "fails" => Some(false),
        _ => None,
    }
}

/// `name(...)` covering the whole string -> content.
fn strip_call(s: &str, name: &str) -> Option<String> {
    let rest = s.strip_prefix(name)?.trim_start();
    if !rest.starts_with('(') || !rest.ends_with(')') {
        return None;
    }
    Some(rest[1..rest.len() - 1].to_string())
}

/// Find `name( ... )` anywhere in the string and return the balanced content.
fn extract_call(s: &str, name: &str) -> Option<String> {
    let start = s.find(&format!("{name}("))?;
    let open = start + name.len();
    let mut depth = 0i32;
    for (i, ch) in s[open..].char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(s[open + 1..open + i].to_string());
                }
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const SG: &str = r#"
version 1
[vars] t x
[deps] u v
[equations]
D1 = u_x - v                solve u_x
D2 = v_t - sin(u)           solve v_t
[fields]
X1 = point(1, 0; 0, 0)
Y1 = evo(cot(u), -v/2)
[multipliers]
main = v*D2 - sin(u)*D1
[conslaws]
sgcl = fluxes(v^2/2, cos(u)) multipliers(-sin(u), v)
[expect]
symmetry X1 holds
subsystem-symmetry Y1 on main holds
conslaw sgcl nontrivial
"#;

    #[test]
    fn parse_sine_gordon_file() {
        let sf = SystemFile::parse(SG).unwrap();
        assert_eq!(sf.system.len(), 2);
        assert_eq!(sf.fields.len(), 2);
        assert!(sf.subsystems.contains_key("main"));
        assert_eq!(sf.expectations.len(), 3);
        let ss = sf.subsystem("main").unwrap();
        let e = ss.eval().unwrap();
        let expected = Expr::parse("v*v_t - u_x*sin(u)", sf.ctx.as_ref()).unwrap();
        assert!(Expr::equivalent(&e[0], &expected));
        // D1 names the first-equation sub-system
        let d1 = sf.subsystem("D1").unwrap();
        assert!(Expr::equivalent(&d1.eval().unwrap()[0], &sf.system.equations()[0]));
        let cl = sf.conslaw("sgcl").unwrap();
        assert!(!cl.is_trivial().unwrap());
    }

    #[test]
    fn operator_multipliers_parse() {
        let text = r#"
version 1
[vars] x t
[deps] u v
[opaque] c:1
[equations]
D1 = u_t + c(x)^2*v_x   solve u_t
D2 = v_t + u_x          solve v_t
[multipliers]
wave = Dt(D1) - c(x)^2*Dx(D2)
"#;
        let sf = SystemFile::parse(text).unwrap();
        let ss = sf.subsystem("wave").unwrap();
        let e = ss.eval().unwrap();
        let expected = Expr::parse("u_{tt} - c(x)^2*u_{xx}", sf.ctx.as_ref()).unwrap();
        assert!(Expr::equivalent(&e[0], &expected));
    }

    #[test]
    fn rejects_unknown_version() {
        assert!(SystemFile::parse("version 2\n[vars] x\n[deps] u\n[equations]\nD1 = u_x").is_err());
    }
}

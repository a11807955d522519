//! Jet-space bookkeeping: variable declarations, truncation order, and the
//! total derivative operators.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::expr::{Expr, MultiIndex, SymbolKind, SymbolTable};

/// Declares the independent/dependent variables, parameters and opaque
/// function symbols of a problem, and owns the jet-coordinate namespace.
///
/// The truncation order starts at `l_max` and auto-extends as operations
/// create deeper jets, unless the context is pinned, in which case exceeding
/// it is an error.
#[derive(Debug)]
pub struct JetContext {
    independent: Vec<String>,
    dependent: Vec<String>,
    params: Vec<String>,
    opaque: BTreeMap<String, usize>,
    l_max: AtomicUsize,
    pinned: bool,
}

impl Clone for JetContext {
    fn clone(&self) -> Self {
        JetContext {
            independent: self.independent.clone(),
            dependent: self.dependent.clone(),
            params: self.params.clone(),
            opaque: self.opaque.clone(),
            l_max: AtomicUsize::new(self.l_max.load(Ordering::Relaxed)),
            pinned: self.pinned,
        }
    }
}

#[derive(Debug, Default)]
pub struct JetContextBuilder {
    independent: Vec<String>,
    dependent: Vec<String>,
    params: Vec<String>,
    opaque: BTreeMap<String, usize>,
    l_max: Option<usize>,
    pinned: bool,
}

impl JetContextBuilder {
    pub fn independent<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.independent.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn dependent<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.dependent.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn params<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.params.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn opaque(mut self, name: &str, arity: usize) -> Self {
        self.opaque.insert(name.to_string(), arity);
        self
    }

    pub fn max_order(mut self, l: usize) -> Self {
        self.l_max = Some(l);
        self
    }

    pub fn pinned(mut self, pinned: bool) -> Self {
        self.pinned = pinned;
        self
    }

    pub fn build(self) -> Result<JetContext> {
        let mut seen = std::collections::BTreeSet::new();
        for n in self
            .independent
            .iter()
            .chain(self.dependent.iter())
            .chain(self.params.iter())
            .chain(self.opaque.keys())
        {
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric()) {
                return Err(Error::InvalidSystem(format!("invalid name `{n}`")));
            }
            if !seen.insert(n.clone()) {
                return Err(Error::InvalidSystem(format!("duplicate name `{n}`")));
            }
        }
        if self.independent.is_empty() || self.dependent.is_empty() {
            return Err(Error::InvalidSystem(
                "need at least one independent and one dependent variable".into(),
            ));
        }
        Ok(JetContext {
            independent: self.independent,
            dependent: self.dependent,
            params: self.params,
            opaque: self.opaque,
            l_max: AtomicUsize::new(self.l_max.unwrap_or(6)),
            pinned: self.pinned,
        })
    }
}

impl JetContext {
    pub fn builder() -> JetContextBuilder {
        JetContextBuilder::default()
    }

    pub fn independent(&self) -> &[String] {
        &self.independent
    }

    pub fn dependent(&self) -> &[String] {
        &self.dependent
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn opaque_arity(&self, name: &str) -> Option<usize> {
        self.opaque.get(name).copied()
    }

    pub fn opaque_fns(&self) -> impl Iterator<Item = (&str, usize)> {
        self.opaque.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn max_order(&self) -> usize {
        self.l_max.load(Ordering::Relaxed)
    }

    pub fn is_pinned(&self) -> bool {
        self.pinned
    }

    /// Raise the truncation order to at least `l`; no-op when pinned.
    pub fn extend_order(&self, l: usize) {
        if !self.pinned {
            self.l_max.fetch_max(l, Ordering::Relaxed);
        }
    }

    fn admit_order(&self, l: usize) -> Result<()> {
        if l <= self.max_order() {
            return Ok(());
        }
        if self.pinned {
            return Err(Error::TruncationOverflow { order: l, max: self.max_order() });
        }
        self.extend_order(l);
        Ok(())
    }

    pub fn is_independent(&self, name: &str) -> bool {
        self.independent.iter().any(|s| s == name)
    }

    pub fn is_dependent(&self, name: &str) -> bool {
        self.dependent.iter().any(|s| s == name)
    }

    /// Validate that every symbol, jet coordinate and opaque application in
    /// `e` is declared here.
    pub fn validate(&self, e: &Expr) -> Result<()> {
        let mut bad = None;
        e.walk(&mut |node| {
            if bad.is_some() {
                return;
            }
            match node {
                Expr::Sym(s) => {
                    if !self.is_independent(s) && !self.params.iter().any(|p| p == s) {
                        bad = Some(Error::UnknownSymbol(s.clone()));
                    }
                }
                Expr::Jet { var, index } => {
                    if !self.is_dependent(var) {
                        bad = Some(Error::UnknownSymbol(var.clone()));
                    } else if let Some(d) =
                        index.dirs().iter().find(|d| !self.is_independent(d))
                    {
                        bad = Some(Error::UnknownSymbol(format!("direction `{d}`")));
                    }
                }
                Expr::Opaque { name, args } | Expr::OpaqueDeriv { name, args, .. } => {
                    match self.opaque.get(name) {
                        None => bad = Some(Error::UnknownSymbol(name.clone())),
                        Some(&arity) if arity != args.len() => {
                            bad = Some(Error::InvalidSystem(format!(
                                "`{name}` takes {arity} argument(s)"
                            )))
                        }
                        _ => {}
                    }
                }
                _ => {}
            }
        });
        match bad {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Total derivative `D_j e`.
    pub fn total_derivative(&self, e: &Expr, dir: &str) -> Result<Expr> {
        if !self.is_independent(dir) {
            return Err(Error::UnknownSymbol(format!("direction `{dir}`")));
        }
        let mut terms = vec![e.diff_partial(&Expr::sym(dir))];
        for jet in e.jets() {
            let Expr::Jet { var, index } = &jet else { unreachable!() };
            let shifted = index.extended(dir);
            self.admit_order(shifted.len())?;
            let coeff = e.diff_partial(&jet);
            if coeff.is_zero() {
                continue;
            }
            terms.push(Expr::mul(
                Expr::Jet { var: var.clone(), index: shifted },
                coeff,
            ));
        }
        Ok(Expr::sum(terms).normalize())
    }

    /// `D_J e`, the composition of total derivatives over a multi-index.
    pub fn total_derivative_multi(&self, e: &Expr, index: &MultiIndex) -> Result<Expr> {
        let mut acc = e.clone();
        for dir in index.dirs() {
            acc = self.total_derivative(&acc, dir)?;
        }
        if index.is_empty() {
            acc = acc.normalize();
        }
        Ok(acc)
    }

    /// Adjoint action `sum_I (-D)_I coeff[(i, I)]` per equation index.
    ///
    /// Given decomposition coefficients of an expression over a system's
    /// prolonged ideal, this produces the characteristic contribution for
    /// each equation.
    pub fn adjoint_apply(
        &self,
        coeffs: &BTreeMap<(usize, MultiIndex), Expr>,
        n_equations: usize,
    ) -> Result<Vec<Expr>> {
        let mut out = vec![Expr::zero(); n_equations];
        for ((i, index), gamma) in coeffs {
            let mut term = self.total_derivative_multi(gamma, index)?;
            if index.len() % 2 == 1 {
                term = Expr::neg(term);
            }
            out[*i] = Expr::add(out[*i].clone(), term);
        }
        Ok(out.into_iter().map(|e| e.normalize()).collect())
    }
}

impl SymbolTable for JetContext {
    fn classify(&self, name: &str) -> Option<SymbolKind> {
        if self.is_dependent(name) {
            Some(SymbolKind::Dependent)
        } else if self.is_independent(name) || self.params.iter().any(|p| p == name) {
            Some(SymbolKind::Symbol)
        } else {
            self.opaque.get(name).map(|&a| SymbolKind::Opaque(a))
        }
    }

    fn directions(&self) -> Vec<String> {
        self.independent.clone()
    }
}

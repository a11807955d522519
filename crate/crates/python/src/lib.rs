//! Python bindings for the jet-calculus kernel: contexts, expressions,
//! evolutionary fields, systems, and the conservation-law operations.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyType;

use subsym_core::conservation;
use subsym_core::corpus;
use subsym_core::decoupling;
use subsym_core::error::Error;
use subsym_core::expr::Expr as CoreExpr;
use subsym_core::fields::EvoField as CoreField;
use subsym_core::invariance::{self, Classification};
use subsym_core::jet::JetContext as CoreCtx;
use subsym_core::sysfile::SystemFile;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Declaration of variables, parameters, and opaque function symbols.
#[pyclass(module = "subsym", skip_from_py_object)]
#[derive(Clone)]
struct JetContext {
    inner: Arc<CoreCtx>,
}

#[pymethods]
impl JetContext {
    #[new]
    #[pyo3(signature = (independent, dependent, params=None, opaque=None, max_order=None))]
    fn new(
        independent: Vec<String>,
        dependent: Vec<String>,
        params: Option<Vec<String>>,
        opaque: Option<BTreeMap<String, usize>>,
        max_order: Option<usize>,
    ) -> PyResult<Self> {
        let mut builder = CoreCtx::builder().independent(independent).dependent(dependent);
        if let Some(p) = params {
            builder = builder.params(p);
        }
        for (name, arity) in opaque.unwrap_or_default() {
            builder = builder.opaque(&name, arity);
        }
        if let Some(l) = max_order {
            builder = builder.max_order(l);
        }
        Ok(JetContext { inner: Arc::new(builder.build().map_err(err)?) })
    }

    /// Parse an expression against this context.
    fn parse(&self, text: &str) -> PyResult<Expr> {
        Ok(Expr { inner: CoreExpr::parse(text, self.inner.as_ref()).map_err(err)? })
    }

    /// Total derivative in one independent direction.
    fn total_derivative(&self, e: &Expr, direction: &str) -> PyResult<Expr> {
        Ok(Expr { inner: self.inner.total_derivative(&e.inner, direction).map_err(err)? })
    }

    /// Evolutionary field from characteristic expressions (one per
    /// dependent variable, as text).
    fn evo_field(&self, characteristics: Vec<String>) -> PyResult<EvoField> {
        let chars = characteristics
            .iter()
            .map(|t| CoreExpr::parse(t, self.inner.as_ref()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(EvoField { inner: CoreField::new(self.inner.clone(), chars).map_err(err)? })
    }

    #[getter]
    fn independent(&self) -> Vec<String> {
        self.inner.independent().to_vec()
    }

    #[getter]
    fn dependent(&self) -> Vec<String> {
        self.inner.dependent().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "JetContext(independent={:?}, dependent={:?})",
            self.inner.independent(),
            self.inner.dependent()
        )
    }
}

/// Exact symbolic expression.
#[pyclass(module = "subsym", skip_from_py_object)]
#[derive(Clone)]
struct Expr {
    inner: CoreExpr,
}

#[pymethods]
impl Expr {
    fn normalize(&self) -> Expr {
        Expr { inner: self.inner.normalize() }
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Formal partial derivative with respect to a symbol or jet coordinate.
    fn diff(&self, coordinate: &Expr) -> Expr {
        Expr { inner: self.inner.diff_partial(&coordinate.inner) }
    }

    /// Zero-difference comparison (same function of the kernels).
    fn equivalent(&self, other: &Expr) -> bool {
        CoreExpr::equivalent(&self.inner, &other.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({})", self.inner)
    }

    fn __eq__(&self, other: &Expr) -> bool {
        self.inner.normalize() == other.inner.normalize()
    }

    fn __add__(&self, other: &Expr) -> Expr {
        Expr { inner: CoreExpr::add(self.inner.clone(), other.inner.clone()) }
    }

    fn __sub__(&self, other: &Expr) -> Expr {
        Expr { inner: CoreExpr::sub(self.inner.clone(), other.inner.clone()) }
    }

    fn __mul__(&self, other: &Expr) -> Expr {
        Expr { inner: CoreExpr::mul(self.inner.clone(), other.inner.clone()) }
    }

    fn __neg__(&self) -> Expr {
        Expr { inner: CoreExpr::neg(self.inner.clone()) }
    }
}

/// Evolutionary vector field.
#[pyclass(module = "subsym", skip_from_py_object)]
#[derive(Clone)]
struct EvoField {
    inner: CoreField,
}

#[pymethods]
impl EvoField {
    /// Prolonged action on an expression.
    fn apply(&self, e: &Expr) -> PyResult<Expr> {
        Ok(Expr { inner: self.inner.apply(&e.inner).map_err(err)? })
    }

    fn commutator(&self, other: &EvoField) -> PyResult<EvoField> {
        Ok(EvoField { inner: self.inner.commutator(&other.inner).map_err(err)? })
    }

    #[getter]
    fn characteristics(&self) -> Vec<Expr> {
        self.inner.characteristics().iter().map(|c| Expr { inner: c.clone() }).collect()
    }

    fn equivalent(&self, other: &EvoField) -> bool {
        self.inner.equivalent(&other.inner)
    }

    fn __repr__(&self) -> String {
        let chars: Vec<String> =
            self.inner.characteristics().iter().map(|c| c.to_string()).collect();
        format!("EvoField({})", chars.join(", "))
    }
}

/// Verified conservation law.
#[pyclass(module = "subsym")]
struct ConsLaw {
    inner: conservation::ConsLaw,
}

#[pymethods]
impl ConsLaw {
    #[getter]
    fn fluxes(&self) -> Vec<Expr> {
        self.inner.fluxes().iter().map(|f| Expr { inner: f.clone() }).collect()
    }

    #[getter]
    fn characteristic(&self) -> Vec<Expr> {
        self.inner.characteristic().iter().map(|q| Expr { inner: q.clone() }).collect()
    }

    fn is_trivial(&self) -> PyResult<bool> {
        self.inner.is_trivial().map_err(err)
    }

    fn same_law(&self, other: &ConsLaw) -> PyResult<bool> {
        self.inner.same_law(&other.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        let fx: Vec<String> = self.inner.fluxes().iter().map(|f| f.to_string()).collect();
        format!("ConsLaw(fluxes=({}))", fx.join(", "))
    }
}

/// A parsed system definition with its named fields, sub-systems, laws and
/// maps.
#[pyclass(module = "subsym")]
struct System {
    inner: SystemFile,
}

#[pymethods]
impl System {
    /// Load a built-in system by id.
    #[classmethod]
    fn from_corpus(_cls: &Bound<'_, PyType>, id: &str) -> PyResult<Self> {
        Ok(System { inner: corpus::load(id).map_err(err)? })
    }

    /// Parse a system-definition file body.
    #[classmethod]
    fn from_text(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        Ok(System { inner: SystemFile::parse(text).map_err(err)? })
    }

    #[getter]
    fn ctx(&self) -> JetContext {
        JetContext { inner: self.inner.ctx.clone() }
    }

    #[getter]
    fn equations(&self) -> Vec<Expr> {
        self.inner.system.equations().iter().map(|e| Expr { inner: e.clone() }).collect()
    }

    /// Named field in evolutionary form.
    fn field(&self, name: &str) -> PyResult<EvoField> {
        Ok(EvoField { inner: self.inner.field(name).map_err(err)? })
    }

    fn check_symmetry(&self, field: &EvoField) -> PyResult<bool> {
        Ok(invariance::check_symmetry(&field.inner, &self.inner.system).map_err(err)?.holds)
    }

    fn check_subsymmetry(&self, field: &EvoField, sub: &str) -> PyResult<bool> {
        let ss = self.inner.subsystem(sub).map_err(err)?;
        Ok(invariance::check_subsymmetry(&field.inner, &ss).map_err(err)?.holds)
    }

    fn check_subsystem_symmetry(&self, field: &EvoField, sub: &str) -> PyResult<bool> {
        let ss = self.inner.subsystem(sub).map_err(err)?;
        Ok(invariance::check_subsystem_symmetry(&field.inner, &ss).map_err(err)?.holds)
    }

    /// One of "symmetry", "subsystem-symmetry", "other-subsymmetry",
    /// "not-subsymmetry".
    fn classify(&self, field: &EvoField, sub: &str) -> PyResult<String> {
        let ss = self.inner.subsystem(sub).map_err(err)?;
        let tag = match invariance::classify(&field.inner, &ss).map_err(err)? {
            Classification::Symmetry => "symmetry",
            Classification::SubsystemSymmetry => "subsystem-symmetry",
            Classification::OtherSubsymmetry => "other-subsymmetry",
            Classification::NotSubsymmetry => "not-subsymmetry",
        };
        Ok(tag.to_string())
    }

    /// Verify and return a named conservation law.
    fn conslaw(&self, name: &str) -> PyResult<ConsLaw> {
        Ok(ConsLaw { inner: self.inner.conslaw(name).map_err(err)? })
    }

    /// Deform a named law along a field.
    fn deform(&self, cl: &str, field: &EvoField) -> PyResult<ConsLaw> {
        let law = self.inner.conslaw(cl).map_err(err)?;
        Ok(ConsLaw { inner: conservation::deform(&field.inner, &law).map_err(err)? })
    }

    /// Closed-form inverse deformation from a named source law to target
    /// fluxes (a named law or expressions).
    fn inverse_deform(&self, source: &str, target: Vec<String>) -> PyResult<EvoField> {
        let law = self.inner.conslaw(source).map_err(err)?;
        let fluxes = target
            .iter()
            .map(|t| CoreExpr::parse(t, self.inner.ctx.as_ref()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        Ok(EvoField { inner: conservation::inverse_deform(&law, &fluxes).map_err(err)? })
    }

    /// Derivative test for a decoupled sub-system.
    #[pyo3(signature = (sub, free, factor=None))]
    fn is_decoupled(&self, sub: &str, free: &str, factor: Option<&str>) -> PyResult<bool> {
        let ss = self.inner.subsystem(sub).map_err(err)?;
        let factor = match factor {
            Some(t) => Some(CoreExpr::parse(t, self.inner.ctx.as_ref()).map_err(err)?),
            None => None,
        };
        Ok(decoupling::is_decoupled(&ss, free, factor.as_ref()).map_err(err)?.is_some())
    }

    fn __repr__(&self) -> String {
        format!("System({} equations)", self.inner.system.len())
    }
}

/// Ids of the built-in systems.
#[pyfunction]
fn corpus_ids() -> Vec<String> {
    corpus::ids().into_iter().map(String::from).collect()
}

/// Re-verify every stored verdict of one built-in system; raises on the
/// first mismatch.
#[pyfunction]
fn corpus_verify(id: &str) -> PyResult<usize> {
    let sf = corpus::load(id).map_err(err)?;
    for exp in &sf.expectations {
        corpus::verify_expectation(&sf, exp).map_err(err)?;
    }
    Ok(sf.expectations.len())
}

#[pymodule]
fn subsym(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<JetContext>()?;
    m.add_class::<Expr>()?;
    m.add_class::<EvoField>()?;
    m.add_class::<ConsLaw>()?;
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(corpus_ids, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

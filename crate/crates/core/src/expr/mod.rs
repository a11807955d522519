//! Exact symbolic expressions.
//!
//! An [`Expr`] is an immutable tree over arbitrary-precision rationals, named
//! symbols, jet coordinates, sums, products, rational powers, elementary
//! functions, opaque function symbols with formal derivatives, and formal
//! antiderivatives.  There is no floating point anywhere in the
//! representation; numeric evaluation lives in [`eval`] and is used only by
//! test oracles.
//!
//! [`Expr::normalize`] puts an expression into a rational normal form over a
//! kernel set (see [`normal`]), which makes structural equality of normal
//! forms decidable and gives a sound zero test for the expression class used
//! here.

mod diff;
mod eval;
mod normal;
mod parse;
mod print;

pub use eval::{eval_f64, eval_rational};
pub use parse::SymbolKind;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Unordered multi-index of derivative directions, kept as a sorted multiset
/// of direction names so that equal multisets are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(Vec<String>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(dirs: I) -> Self {
        let mut v: Vec<String> = dirs.into_iter().map(Into::into).collect();
        v.sort();
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dirs(&self) -> &[String] {
        &self.0
    }

    /// Multi-index with one extra derivative in direction `dir`.
    pub fn extended(&self, dir: &str) -> Self {
        let mut v = self.0.clone();
        v.push(dir.to_string());
        v.sort();
        MultiIndex(v)
    }

    /// True when `other` is contained in `self` as a multiset.
    pub fn contains(&self, other: &MultiIndex) -> bool {
        let mut rest = self.0.clone();
        for d in &other.0 {
            match rest.iter().position(|x| x == d) {
                Some(i) => {
                    rest.remove(i);
                }
                None => return false,
            }
        }
        true
    }

    /// Multiset difference `self - other`; `other` must be contained.
    pub fn minus(&self, other: &MultiIndex) -> MultiIndex {
        let mut rest = self.0.clone();
        for d in &other.0 {
            let i = rest.iter().position(|x| x == d).expect("minus: not contained");
            rest.remove(i);
        }
        MultiIndex(rest)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.iter().all(|d| d.len() == 1) {
            for d in &self.0 {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            write!(f, "{}", self.0.join(","))
        }
    }
}

/// Elementary function heads with fixed arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElemFn {
    Sin,
    Cos,
    Tan,
    Cot,
    Exp,
    Ln,
    Sqrt,
    /// `atan2(y, x)`: the plane angle of the point `(x, y)`.
    Atan2,
}

impl ElemFn {
    pub fn name(&self) -> &'static str {
        match self {
            ElemFn::Sin => "sin",
            ElemFn::Cos => "cos",
            ElemFn::Tan => "tan",
            ElemFn::Cot => "cot",
            ElemFn::Exp => "exp",
            ElemFn::Ln => "ln",
            ElemFn::Sqrt => "sqrt",
            ElemFn::Atan2 => "atan2",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            ElemFn::Atan2 => 2,
            _ => 1,
        }
    }

    pub fn from_name(s: &str) -> Option<ElemFn> {
        Some(match s {
            "sin" => ElemFn::Sin,
            "cos" => ElemFn::Cos,
            "tan" => ElemFn::Tan,
            "cot" => ElemFn::Cot,
            "exp" => ElemFn::Exp,
            "ln" => ElemFn::Ln,
            "sqrt" => ElemFn::Sqrt,
            "atan2" => ElemFn::Atan2,
            _ => return None,
        })
    }
}

/// Immutable symbolic expression tree.
///
/// Sums and products keep their children in a canonical order after
/// [`Expr::normalize`]; powers carry an exact rational exponent.  Opaque
/// function applications are purely formal: the only thing known about them
/// is how they differentiate.  `OpaqueDeriv` records the multiset of argument
/// slots that have been differentiated (0-based, sorted), so mixed formal
/// partials commute by construction.  `Int { integrand, var }` is the formal
/// antiderivative with `d/dvar Int(g, var) = g`; the integrand is written in
/// terms of `var` itself and the integration constant is absorbed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Rat(BigRational),
    Sym(String),
    Jet { var: String, index: MultiIndex },
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, BigRational),
    Elem(ElemFn, Vec<Expr>),
    Opaque { name: String, args: Vec<Expr> },
    OpaqueDeriv { name: String, args: Vec<Expr>, slots: Vec<usize> },
    Int { integrand: Box<Expr>, var: Box<Expr> },
}

pub(crate) fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn bigfrac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Rat(BigRational::zero())
    }

    pub fn one() -> Expr {
        Expr::Rat(BigRational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Rat(big(n))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::Rat(bigfrac(n, d))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.to_string())
    }

    /// Order-zero jet, i.e. the dependent variable itself.
    pub fn var(name: &str) -> Expr {
        Expr::Jet { var: name.to_string(), index: MultiIndex::empty() }
    }

    pub fn jet<I: IntoIterator<Item = S>, S: Into<String>>(var: &str, dirs: I) -> Expr {
        Expr::Jet { var: var.to_string(), index: MultiIndex::new(dirs) }
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn prod(factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::Prod(factors),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Sum(vec![a, b])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sum(vec![a, Expr::neg(b)])
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Prod(vec![a, b])
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Prod(vec![Expr::int(-1), e])
    }

    pub fn powi(e: Expr, n: i64) -> Expr {
        Expr::Pow(Box::new(e), big(n))
    }

    pub fn powq(e: Expr, q: BigRational) -> Expr {
        Expr::Pow(Box::new(e), q)
    }

    /// Checked division; rejects symbolically zero denominators.
    pub fn div(a: Expr, b: Expr) -> Result<Expr> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Expr::Prod(vec![a, Expr::powi(b, -1)]))
    }

    pub fn elem(f: ElemFn, args: Vec<Expr>) -> Result<Expr> {
        if args.len() != f.arity() {
            return Err(Error::Domain(format!(
                "{} takes {} argument(s), got {}",
                f.name(),
                f.arity(),
                args.len()
            )));
        }
        Ok(Expr::Elem(f, args))
    }

    pub fn sin(e: Expr) -> Expr {
        Expr::Elem(ElemFn::Sin, vec![e])
    }

    pub fn cos(e: Expr) -> Expr {
        Expr::Elem(ElemFn::Cos, vec![e])
    }

    pub fn tan(e: Expr) -> Expr {
        Expr::Elem(ElemFn::Tan, vec![e])
    }

    pub fn cot(e: Expr) -> Expr {
        Expr::Elem(ElemFn::Cot, vec![e])
    }

    pub fn exp(e: Expr) -> Expr {
        Expr::Elem(ElemFn::Exp, vec![e])
    }

    pub fn ln(e: Expr) -> Expr {
        Expr::Elem(ElemFn::Ln, vec![e])
    }

    pub fn sqrt(e: Expr) -> Expr {
        Expr::Elem(ElemFn::Sqrt, vec![e])
    }

    pub fn atan2(y: Expr, x: Expr) -> Expr {
        Expr::Elem(ElemFn::Atan2, vec![y, x])
    }

    pub fn opaque(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Opaque { name: name.to_string(), args }
    }

    /// Formal partial derivative of an opaque application in the given
    /// argument slots (0-based).
    pub fn opaque_deriv(name: &str, args: Vec<Expr>, mut slots: Vec<usize>) -> Expr {
        slots.sort_unstable();
        Expr::OpaqueDeriv { name: name.to_string(), args, slots }
    }

    /// Formal antiderivative of `integrand` with respect to `var`.
    pub fn antideriv(integrand: Expr, var: Expr) -> Expr {
        Expr::Int { integrand: Box::new(integrand), var: Box::new(var) }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Expr::Rat(c) => Some(c),
            _ => None,
        }
    }

    /// Canonical rational normal form; see the module docs of [`normal`].
    pub fn normalize(&self) -> Expr {
        normal::normalize(self)
    }

    /// Sound zero test on the normal form.  Denominators are treated as
    /// nonzero side conditions.
    pub fn is_zero(&self) -> bool {
        normal::is_zero(self)
    }

    /// `a` and `b` denote the same function of the kernels (zero difference),
    /// regardless of how each is written.
    pub fn equivalent(a: &Expr, b: &Expr) -> bool {
        Expr::sub(a.clone(), b.clone()).is_zero()
    }

    /// Formal partial derivative with respect to a symbol or jet coordinate.
    pub fn diff_partial(&self, s: &Expr) -> Expr {
        diff::diff_partial(self, s).normalize()
    }

    /// Combined denominator of the normal form, or `None` when it is 1.
    pub fn denominator(&self) -> Option<Expr> {
        normal::denominator(self)
    }

    /// Every jet coordinate appearing anywhere in the tree (including inside
    /// opaque arguments and integrands), deduplicated.
    pub fn jets(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if matches!(e, Expr::Jet { .. }) && !out.contains(e) {
                out.push(e.clone());
            }
        });
        out
    }

    /// True when the given node occurs anywhere in the tree.
    pub fn contains(&self, node: &Expr) -> bool {
        let mut found = false;
        self.walk(&mut |e| {
            if e == node {
                found = true;
            }
        });
        found
    }

    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Rat(_) | Expr::Sym(_) | Expr::Jet { .. } => {}
            Expr::Sum(v) | Expr::Prod(v) => {
                for c in v {
                    c.walk(f);
                }
            }
            Expr::Pow(b, _) => b.walk(f),
            Expr::Elem(_, args) | Expr::Opaque { args, .. } | Expr::OpaqueDeriv { args, .. } => {
                for a in args {
                    a.walk(f);
                }
            }
            Expr::Int { integrand, var } => {
                integrand.walk(f);
                var.walk(f);
            }
        }
    }

    /// Replace every node structurally equal to a key of `map` with the
    /// mapped expression.  Matching is done top-down; the replacement is not
    /// rescanned.
    pub fn substitute(&self, map: &std::collections::BTreeMap<Expr, Expr>) -> Expr {
        if let Some(r) = map.get(self) {
            return r.clone();
        }
        match self {
            Expr::Rat(_) | Expr::Sym(_) | Expr::Jet { .. } => self.clone(),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|c| c.substitute(map)).collect()),
            Expr::Prod(v) => Expr::Prod(v.iter().map(|c| c.substitute(map)).collect()),
            Expr::Pow(b, q) => Expr::Pow(Box::new(b.substitute(map)), q.clone()),
            Expr::Elem(f, args) => {
                Expr::Elem(*f, args.iter().map(|a| a.substitute(map)).collect())
            }
            Expr::Opaque { name, args } => Expr::Opaque {
                name: name.clone(),
                args: args.iter().map(|a| a.substitute(map)).collect(),
            },
            Expr::OpaqueDeriv { name, args, slots } => Expr::OpaqueDeriv {
                name: name.clone(),
                args: args.iter().map(|a| a.substitute(map)).collect(),
                slots: slots.clone(),
            },
            Expr::Int { integrand, var } => Expr::Int {
                integrand: Box::new(integrand.substitute(map)),
                var: Box::new(var.substitute(map)),
            },
        }
    }

    /// Parse an expression against a symbol table.
    pub fn parse(text: &str, table: &dyn SymbolTable) -> Result<Expr> {
        parse::parse(text, table)
    }
}

/// Coefficients of `e` as a polynomial in the kernel `g`, lowest degree
/// first.  Errors when `g` occurs inside another kernel, in a denominator,
/// or with a fractional power.
pub fn coefficients_in_kernel(e: &Expr, g: &Expr) -> Result<Vec<Expr>> {
    normal::coefficients_in(e, g)
}

/// Coefficients of `eps^0 ..= eps^max` of a polynomial expression in the
/// symbol `eps`.
pub fn eps_coefficients(e: &Expr, eps: &str, max: usize) -> Result<Vec<Expr>> {
    let mut out = normal::coefficients_in(e, &Expr::sym(eps))?;
    out.resize(max + 1, Expr::zero());
    out.truncate(max + 1);
    Ok(out)
}

/// Name resolution for the parser: which names are symbols, dependent
/// variables, or opaque functions (with arity).
pub trait SymbolTable {
    fn classify(&self, name: &str) -> Option<SymbolKind>;
    /// Direction names usable in jet subscripts, in declaration order.
    fn directions(&self) -> Vec<String>;
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", print::print(self))
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

//! Rational normal form over a kernel set.
//!
//! An expression is flattened into a single `numerator / denominator` pair of
//! expanded multivariate polynomials whose indeterminates ("kernels") are
//! symbols, jet coordinates, elementary applications, opaque applications,
//! formal derivatives and formal antiderivatives.  On top of the plain
//! polynomial arithmetic a fixed closure-rule set is applied:
//!
//! * `tan k -> sin k / cos k`, `cot k -> cos k / sin k`;
//! * `sin(a)^2 -> 1 - cos(a)^2` (per argument, so every monomial carries at
//!   most one factor of `sin(a)`);
//! * `exp(a) * exp(b) -> exp(a + b)`, `exp(a)^q -> exp(q a)`, `exp(0) -> 1`;
//! * `ln(exp(a)) -> a`, `exp(n ln w) -> w^n`, `ln 1 -> 0`;
//! * `sqrt` and rational powers: fractional powers of the same base combine
//!   by exponent addition, integer parts fold back into the polynomial
//!   (so `sqrt(2)^2 -> 2` and `(r^2)^(1/2) -> r`, taking the positive branch
//!   on perfect-square monomials);
//! * `sin(atan2(y,x)) -> y / sqrt(x^2+y^2)`, `cos(atan2(y,x)) -> x /
//!   sqrt(x^2+y^2)`, and `atan2(c sin w, c cos w) -> w`;
//! * trig arguments are expanded over sums and integer multiples
//!   (`sin(2u) -> 2 sin u cos u`) and sign-canonicalized via parity.
//!
//! Kernels that survive the rules are treated as algebraically independent,
//! which makes `is_zero` a sound (and for this rule set, canonical-form
//! based) zero test.  Denominators stay symbolic: `is_zero` decides the
//! numerator only, with the denominator as an implicit nonzero side
//! condition.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

use super::{big, bigfrac, ElemFn, Expr};

/// Monomial: sorted `(kernel, exponent)` pairs with positive exponents.
/// Exponents are integers except on fractional-power kernels, which are kept
/// as `(base, q)` with `0 < q < 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Mono {
    factors: Vec<(Expr, BigRational)>,
}

impl Mono {
    fn unit() -> Mono {
        Mono { factors: Vec::new() }
    }

    fn kernel(k: Expr) -> Mono {
        Mono { factors: vec![(k, BigRational::one())] }
    }

    fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    fn div(&self, other: &Mono) -> Mono {
        let mut out = Vec::new();
        for (k, e) in &self.factors {
            let rem = match other.factors.iter().find(|(k2, _)| k2 == k) {
                Some((_, e2)) => e - e2,
                None => e.clone(),
            };
            if !rem.is_zero() {
                out.push((k.clone(), rem));
            }
        }
        Mono { factors: out }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Poly {
    /// Sorted by monomial, coefficients nonzero.
    terms: Vec<(Mono, BigRational)>,
}

impl Poly {
    pub(crate) fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub(crate) fn constant(c: BigRational) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Mono::unit(), c)] }
        }
    }

    pub(crate) fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    fn kernel(k: Expr) -> Poly {
        Poly { terms: vec![(Mono::kernel(k), BigRational::one())] }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_unit() && self.terms[0].1.is_one()
    }

    fn from_terms(mut terms: Vec<(Mono, BigRational)>) -> Poly {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Mono, BigRational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 += c;
                    if last.1.is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            if !c.is_zero() {
                out.push((m, c));
            }
        }
        Poly { terms: out }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Poly::from_terms(terms)
    }

    fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                acc = acc.add(&mono_mul(ma, mb, ca * cb));
            }
        }
        acc
    }

    fn powi(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Signed rational content: gcd of coefficients carrying the sign of the
    /// leading (first) term.
    fn content(&self) -> BigRational {
        if self.terms.is_empty() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for (_, c) in &self.terms {
            num_gcd = num_gcd.gcd(&c.numer().abs());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.terms[0].1.is_negative() {
            content = -content;
        }
        content
    }

    fn mono_gcd(&self) -> Mono {
        let mut iter = self.terms.iter();
        let mut g = match iter.next() {
            Some((m, _)) => m.clone(),
            None => return Mono::unit(),
        };
        for (m, _) in iter {
            let mut out = Vec::new();
            for (k, e) in &g.factors {
                if let Some((_, e2)) = m.factors.iter().find(|(k2, _)| k2 == k) {
                    let min = if e <= e2 { e.clone() } else { e2.clone() };
                    if !min.is_zero() {
                        out.push((k.clone(), min));
                    }
                }
            }
            g = Mono { factors: out };
            if g.is_unit() {
                break;
            }
        }
        g
    }

    fn div_mono(&self, m: &Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|(t, c)| (t.div(m), c.clone())).collect() }
    }
}

/// Multiply two monomials into a polynomial, applying the monomial-level
/// closure rules (exp merging, fractional-power folding, sin^2 reduction).
fn mono_mul(a: &Mono, b: &Mono, coef: BigRational) -> Poly {
    // Merge exponents per kernel.
    let mut merged: BTreeMap<Expr, BigRational> = BTreeMap::new();
    for (k, e) in a.factors.iter().chain(b.factors.iter()) {
        *merged.entry(k.clone()).or_insert_with(BigRational::zero) += e.clone();
    }
    canonical_mono(merged, coef)
}

/// Rebuild a canonical monomial (times polynomial expansions) from a raw
/// kernel-exponent map.
fn canonical_mono(merged: BTreeMap<Expr, BigRational>, coef: BigRational) -> Poly {
    if coef.is_zero() {
        return Poly::zero();
    }
    let mut plain: Vec<(Expr, BigRational)> = Vec::new();
    let mut frac: BTreeMap<Expr, BigRational> = BTreeMap::new();
    let mut exp_terms: Vec<Expr> = Vec::new();
    let mut expansions: Vec<Poly> = Vec::new();
    let mut coef = coef;

    for (k, e) in merged {
        if e.is_zero() {
            continue;
        }
        match &k {
            Expr::Elem(ElemFn::Exp, args) => {
                // exp(a)^e -> exp(e*a), any rational e.
                exp_terms.push(Expr::mul(Expr::Rat(e.clone()), args[0].clone()));
            }
            Expr::Pow(base, q) => {
                *frac.entry((**base).clone()).or_insert_with(BigRational::zero) += q * &e;
            }
            _ => {
                if e.is_integer() {
                    plain.push((k, e));
                } else {
                    *frac.entry(k.clone()).or_insert_with(BigRational::zero) += e;
                }
            }
        }
    }

    // Fold integer parts of fractional powers back into the polynomial.
    for (base, q) in frac {
        if q.is_zero() {
            continue;
        }
        let n = q.floor();
        let f = &q - &n;
        if !n.is_zero() {
            let n_int = n.to_integer();
            match &base {
                Expr::Rat(c) => {
                    coef *= rat_pow(c, &n_int);
                }
                _ => {
                    let p = expr_to_ratform(&base);
                    debug_assert!(p.den.is_one(), "fractional base must be denominator-free");
                    expansions.push(poly_ipow(&p.num, &n_int));
                }
            }
        }
        if !f.is_zero() {
            plain.push((Expr::Pow(Box::new(base), f), BigRational::one()));
        }
    }

    // Merge exp factors into one kernel.
    if !exp_terms.is_empty() {
        let combined = normalize(&Expr::sum(exp_terms));
        if !matches!(&combined, Expr::Rat(c) if c.is_zero()) {
            // exp of a pure logarithm combination folds back to powers.
            let folded = exp_of(combined);
            match folded {
                ExpFold::Kernel(k) => plain.push((k, BigRational::one())),
                ExpFold::Poly(p) => expansions.push(ratform_to_poly_assert(&p)),
            }
        }
    }

    // sin(a)^k with k >= 2 reduces via sin^2 = 1 - cos^2.
    let mut kept: Vec<(Expr, BigRational)> = Vec::new();
    for (k, e) in plain {
        if let Expr::Elem(ElemFn::Sin, args) = &k {
            if e >= big(2) {
                let n = e.to_integer().to_u32().expect("sin exponent fits u32");
                let half = n / 2;
                let rem = n % 2;
                let cos2 = Poly::one().add(
                    &Poly::kernel(Expr::cos(args[0].clone())).powi(2).neg(),
                );
                expansions.push(cos2.powi(half));
                if rem == 1 {
                    kept.push((k, BigRational::one()));
                }
                continue;
            }
        }
        kept.push((k, e));
    }

    kept.sort_by(|x, y| x.0.cmp(&y.0));
    let mut acc = Poly { terms: vec![(Mono { factors: kept }, coef)] };
    for p in expansions {
        acc = acc.mul(&p);
    }
    acc
}

enum ExpFold {
    Kernel(Expr),
    Poly(RatForm),
}

/// Construct the canonical form of `exp(arg)` for an already-normalized
/// argument: extract integer-coefficient `ln` terms as powers.
fn exp_of(arg: Expr) -> ExpFold {
    let rf = expr_to_ratform(&arg);
    if rf.den.is_one() {
        let mut ln_factors: Vec<(Expr, BigInt)> = Vec::new();
        let mut rest: Vec<(Mono, BigRational)> = Vec::new();
        for (m, c) in &rf.num.terms {
            if m.factors.len() == 1 && c.is_integer() {
                if let (Expr::Elem(ElemFn::Ln, args), e) = (&m.factors[0].0, &m.factors[0].1) {
                    if e.is_one() {
                        ln_factors.push((args[0].clone(), c.to_integer()));
                        continue;
                    }
                }
            }
            rest.push((m.clone(), c.clone()));
        }
        if !ln_factors.is_empty() {
            let mut result = RatForm::one();
            for (w, n) in ln_factors {
                let wf = expr_to_ratform(&w);
                result = result.mul(&wf.ipow(&n));
            }
            let rest_poly = Poly { terms: rest };
            if !(rest_poly.is_zero()) {
                let rest_arg = poly_to_expr(&rest_poly);
                result = result.mul(&RatForm::from_poly(Poly::kernel(Expr::exp(rest_arg))));
            }
            return ExpFold::Poly(result);
        }
    }
    ExpFold::Kernel(Expr::exp(arg))
}

fn ratform_to_poly_assert(r: &RatForm) -> Poly {
    debug_assert!(r.den.is_one());
    r.num.clone()
}

/// `c^n` for integer `n` (possibly negative).
fn rat_pow(c: &BigRational, n: &BigInt) -> BigRational {
    let mut result = BigRational::one();
    let mut base = if n.is_negative() { c.recip() } else { c.clone() };
    let mut k = n.abs().to_u64().expect("exponent fits u64");
    while k > 0 {
        if k & 1 == 1 {
            result *= &base;
        }
        k >>= 1;
        if k > 0 {
            base = base.clone() * &base;
        }
    }
    result
}

fn poly_ipow(p: &Poly, n: &BigInt) -> Poly {
    debug_assert!(!n.is_negative());
    p.powi(n.to_u32().expect("exponent fits u32"))
}

#[derive(Debug, Clone)]
pub(crate) struct RatForm {
    pub(crate) num: Poly,
    pub(crate) den: Poly,
}

impl RatForm {
    fn from_poly(p: Poly) -> RatForm {
        RatForm { num: p, den: Poly::one() }
    }

    fn one() -> RatForm {
        RatForm::from_poly(Poly::one())
    }

    fn zero() -> RatForm {
        RatForm::from_poly(Poly::zero())
    }

    fn add(&self, other: &RatForm) -> RatForm {
        if self.den == other.den {
            return RatForm { num: self.num.add(&other.num), den: self.den.clone() }.reduced();
        }
        RatForm {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
        }
        .reduced()
    }

    fn mul(&self, other: &RatForm) -> RatForm {
        RatForm { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }.reduced()
    }

    fn recip(&self) -> RatForm {
        assert!(!self.num.is_zero(), "division by a symbolically zero expression");
        RatForm { num: self.den.clone(), den: self.num.clone() }.reduced()
    }

    fn ipow(&self, n: &BigInt) -> RatForm {
        if n.is_negative() {
            return self.recip().ipow(&n.abs());
        }
        RatForm { num: poly_ipow(&self.num, n), den: poly_ipow(&self.den, n) }.reduced()
    }

    /// Canonical pair: cancel the common monomial factor and rational
    /// content, keep the denominator content-free with positive lead.
    fn reduced(self) -> RatForm {
        let mut num = self.num;
        let mut den = self.den;
        if num.is_zero() {
            return RatForm { num, den: Poly::one() };
        }
        if num == den {
            return RatForm::one();
        }
        let g_num = num.mono_gcd();
        let g_den = den.mono_gcd();
        let mut shared = Vec::new();
        for (k, e) in &g_num.factors {
            if let Some((_, e2)) = g_den.factors.iter().find(|(k2, _)| k2 == k) {
                let min = if e <= e2 { e.clone() } else { e2.clone() };
                shared.push((k.clone(), min));
            }
        }
        if !shared.is_empty() {
            let g = Mono { factors: shared };
            num = num.div_mono(&g);
            den = den.div_mono(&g);
        }
        let c = den.content();
        if !c.is_one() {
            let inv = c.recip();
            den = den.scale(&inv);
            num = num.scale(&inv);
        }
        if num == den {
            return RatForm::one();
        }
        RatForm { num, den }
    }
}

/// Fractional power `p^f` with `0 < f < 1` of a *polynomial*.
fn poly_frac_pow(p: &Poly, f: &BigRational) -> RatForm {
    debug_assert!(f.is_positive() && f < &BigRational::one());
    if p.is_zero() {
        return RatForm::zero();
    }
    if p.terms.len() == 1 {
        let (m, c) = &p.terms[0];
        let mut merged: BTreeMap<Expr, BigRational> = BTreeMap::new();
        for (k, e) in &m.factors {
            merged.insert(k.clone(), e * f);
        }
        let (scalar, residue) = rational_root(c, f);
        if let Some(res) = residue {
            *merged.entry(res).or_insert_with(BigRational::zero) += f.clone();
        }
        return RatForm::from_poly(canonical_mono(merged, scalar)).reduced();
    }
    // Multi-term base: strip the signed content, root it exactly where
    // possible, and keep the primitive part as a power kernel.
    let c = p.content();
    let prim = p.scale(&c.recip());
    let (scalar, residue) = rational_root(&c, f);
    let mut merged: BTreeMap<Expr, BigRational> = BTreeMap::new();
    merged.insert(poly_to_expr(&prim), f.clone());
    if let Some(res) = residue {
        *merged.entry(res).or_insert_with(BigRational::zero) += f.clone();
    }
    RatForm::from_poly(canonical_mono(merged, scalar)).reduced()
}

/// Split `c^f` into an exact rational factor and an optional residual base
/// whose `f`-th power stays symbolic.  For `f = s/t` the largest `t`-th power
/// divisor is extracted by trial division.
fn rational_root(c: &BigRational, f: &BigRational) -> (BigRational, Option<Expr>) {
    let t = f.denom().to_u32().unwrap_or(u32::MAX);
    let s = f.numer().to_i64().unwrap_or(i64::MAX);
    if t == u32::MAX || s == i64::MAX {
        return (BigRational::one(), Some(Expr::Rat(c.clone())));
    }
    let (n_ext, n_rem) = extract_power_part(&c.numer().abs(), t);
    let (d_ext, d_rem) = extract_power_part(c.denom(), t);
    let scalar = BigRational::new(n_ext.pow(s as u32), d_ext.pow(s as u32));
    let mut residue = BigRational::new(n_rem, d_rem);
    if c.is_negative() {
        residue = -residue;
    }
    if residue.is_one() {
        (scalar, None)
    } else {
        (scalar, Some(Expr::Rat(residue)))
    }
}

/// `n = ext^t * rem` with `ext` maximal (trial division; falls back to no
/// extraction for huge inputs).
fn extract_power_part(n: &BigInt, t: u32) -> (BigInt, BigInt) {
    let one = BigInt::one();
    if n.is_one() || t == 0 {
        return (one, n.clone());
    }
    let Some(mut m) = n.to_u64() else {
        return (one, n.clone());
    };
    let mut ext: u64 = 1;
    let mut rem: u64 = 1;
    let mut p: u64 = 2;
    while p.saturating_mul(p) <= m {
        if m % p == 0 {
            let mut count = 0u32;
            while m % p == 0 {
                m /= p;
                count += 1;
            }
            ext = ext.saturating_mul(p.pow(count / t));
            rem = rem.saturating_mul(p.pow(count % t));
        }
        p += 1;
    }
    rem = rem.saturating_mul(m);
    (BigInt::from(ext), BigInt::from(rem))
}

/// Canonical sign of a normalized expression: returns `(negated, canonical)`
/// where `canonical` has a positive leading coefficient.
fn sign_canonical(e: &Expr) -> (bool, Expr) {
    let rf = expr_to_ratform(e);
    if let Some((_, c)) = rf.num.terms.first() {
        if c.is_negative() {
            let neg = RatForm { num: rf.num.neg(), den: rf.den.clone() };
            return (true, ratform_to_expr(&neg));
        }
    }
    (false, ratform_to_expr(&rf))
}

/// Canonical `sin`: parity, sum expansion, integer-multiple expansion, and
/// the `atan2` closure rule.
fn elem_sin(arg: &Expr) -> RatForm {
    let (neg, a) = sign_canonical(arg);
    let body = sin_expand(&a);
    if neg {
        body.mul(&RatForm::from_poly(Poly::constant(-BigRational::one())))
    } else {
        body
    }
}

fn elem_cos(arg: &Expr) -> RatForm {
    let (_, a) = sign_canonical(arg);
    cos_expand(&a)
}

fn sin_expand(a: &Expr) -> RatForm {
    if a.is_zero() {
        return RatForm::zero();
    }
    // Sum of terms: sin(t + rest) = sin t cos rest + cos t sin rest.
    // Recursion re-enters through the sign-canonical wrappers so that every
    // surviving kernel carries a positive-lead argument.
    if let Expr::Sum(terms) = a {
        if terms.len() > 1 {
            let t = &terms[0];
            let rest = Expr::sum(terms[1..].to_vec()).normalize();
            return elem_sin(t)
                .mul(&elem_cos(&rest))
                .add(&elem_cos(t).mul(&elem_sin(&rest)));
        }
    }
    // Integer multiple n*m with |n| >= 2.
    if let Some((n, m)) = integer_multiple(a) {
        let prev = Expr::mul(Expr::int(n - 1), m.clone()).normalize();
        return elem_sin(&prev)
            .mul(&elem_cos(&m))
            .add(&elem_cos(&prev).mul(&elem_sin(&m)));
    }
    if let Expr::Elem(ElemFn::Atan2, args) = a {
        // sin(atan2(y, x)) = y / sqrt(x^2 + y^2).
        let (y, x) = (&args[0], &args[1]);
        let r2 = Expr::add(Expr::powi(x.clone(), 2), Expr::powi(y.clone(), 2));
        let root = expr_to_ratform(&Expr::sqrt(r2));
        return expr_to_ratform(y).mul(&root.recip());
    }
    RatForm::from_poly(Poly::kernel(Expr::sin(a.clone())))
}

fn cos_expand(a: &Expr) -> RatForm {
    if a.is_zero() {
        return RatForm::one();
    }
    if let Expr::Sum(terms) = a {
        if terms.len() > 1 {
            let t = &terms[0];
            let rest = Expr::sum(terms[1..].to_vec()).normalize();
            return elem_cos(t)
                .mul(&elem_cos(&rest))
                .add(&elem_sin(t).mul(&elem_sin(&rest)).mul(&RatForm::from_poly(
                    Poly::constant(-BigRational::one()),
                )));
        }
    }
    if let Some((n, m)) = integer_multiple(a) {
        let prev = Expr::mul(Expr::int(n - 1), m.clone()).normalize();
        return elem_cos(&prev)
            .mul(&elem_cos(&m))
            .add(&elem_sin(&prev).mul(&elem_sin(&m)).mul(&RatForm::from_poly(
                Poly::constant(-BigRational::one()),
            )));
    }
    if let Expr::Elem(ElemFn::Atan2, args) = a {
        let (y, x) = (&args[0], &args[1]);
        let r2 = Expr::add(Expr::powi(x.clone(), 2), Expr::powi(y.clone(), 2));
        let root = expr_to_ratform(&Expr::sqrt(r2));
        return expr_to_ratform(x).mul(&root.recip());
    }
    RatForm::from_poly(Poly::kernel(Expr::cos(a.clone())))
}

/// `a = n * m` with integer `n >= 2` and `m` canonical, if the (single-term)
/// argument carries an integer coefficient of magnitude >= 2.
fn integer_multiple(a: &Expr) -> Option<(i64, Expr)> {
    let rf = expr_to_ratform(a);
    if !rf.den.is_one() || rf.num.terms.len() != 1 {
        return None;
    }
    let (m, c) = &rf.num.terms[0];
    if m.is_unit() {
        return None; // pure constant: sin of a rational stays a kernel
    }
    if !c.is_integer() {
        return None;
    }
    let n = c.to_integer().to_i64()?;
    if n.abs() < 2 {
        return None;
    }
    debug_assert!(n >= 2, "sign-canonical argument has positive lead");
    let rest = Poly { terms: vec![(m.clone(), BigRational::one())] };
    Some((n, poly_to_expr(&rest)))
}

/// `atan2(y, x)` with the closure rule `atan2(c sin w, c cos w) -> w`.
fn elem_atan2(y: &Expr, x: &Expr) -> RatForm {
    let ratio = expr_to_ratform(y).mul(&expr_to_ratform(x).recip());
    if ratio.num.terms.len() == 1 && ratio.den.terms.len() == 1 {
        let (mn, cn) = &ratio.num.terms[0];
        let (md, cd) = &ratio.den.terms[0];
        if cn == cd && mn.factors.len() == 1 && md.factors.len() == 1 {
            if let (Expr::Elem(ElemFn::Sin, sa), Expr::Elem(ElemFn::Cos, ca)) =
                (&mn.factors[0].0, &md.factors[0].0)
            {
                if sa == ca && mn.factors[0].1.is_one() && md.factors[0].1.is_one() {
                    return expr_to_ratform(&sa[0]);
                }
            }
        }
    }
    RatForm::from_poly(Poly::kernel(Expr::atan2(
        ratform_to_expr(&expr_to_ratform(y)),
        ratform_to_expr(&expr_to_ratform(x)),
    )))
}

pub(crate) fn expr_to_ratform(e: &Expr) -> RatForm {
    match e {
        Expr::Rat(c) => RatForm::from_poly(Poly::constant(c.clone())),
        Expr::Sym(_) | Expr::Jet { .. } => RatForm::from_poly(Poly::kernel(e.clone())),
        Expr::Sum(terms) => {
            let mut acc = RatForm::zero();
            for t in terms {
                acc = acc.add(&expr_to_ratform(t));
            }
            acc
        }
        Expr::Prod(factors) => {
            let mut acc = RatForm::one();
            for f in factors {
                acc = acc.mul(&expr_to_ratform(f));
                if acc.num.is_zero() {
                    return RatForm::zero();
                }
            }
            acc
        }
        Expr::Pow(b, q) => {
            let base = expr_to_ratform(b);
            let n = q.floor().to_integer();
            let f = q - q.floor();
            let mut acc = base.ipow(&n);
            if !f.is_zero() {
                let num_part = poly_frac_pow(&base.num, &f);
                let den_part = poly_frac_pow(&base.den, &f);
                acc = acc.mul(&num_part).mul(&den_part.recip());
            }
            acc
        }
        Expr::Elem(f, args) => elem_to_ratform(*f, args),
        Expr::Opaque { name, args } => {
            let args = args.iter().map(|a| normalize(a)).collect();
            RatForm::from_poly(Poly::kernel(Expr::Opaque { name: name.clone(), args }))
        }
        Expr::OpaqueDeriv { name, args, slots } => {
            let args = args.iter().map(|a| normalize(a)).collect();
            RatForm::from_poly(Poly::kernel(Expr::OpaqueDeriv {
                name: name.clone(),
                args,
                slots: slots.clone(),
            }))
        }
        Expr::Int { integrand, var } => {
            let g = normalize(integrand);
            if matches!(&g, Expr::Rat(c) if c.is_zero()) {
                return RatForm::zero();
            }
            RatForm::from_poly(Poly::kernel(Expr::Int {
                integrand: Box::new(g),
                var: Box::new(normalize(var)),
            }))
        }
    }
}

fn elem_to_ratform(f: ElemFn, args: &[Expr]) -> RatForm {
    let a = normalize(&args[0]);
    match f {
        ElemFn::Sin => elem_sin(&a),
        ElemFn::Cos => elem_cos(&a),
        ElemFn::Tan => elem_sin(&a).mul(&elem_cos(&a).recip()),
        ElemFn::Cot => elem_cos(&a).mul(&elem_sin(&a).recip()),
        ElemFn::Exp => {
            if a.is_zero() {
                return RatForm::one();
            }
            if let Expr::Elem(ElemFn::Ln, ln_args) = &a {
                return expr_to_ratform(&ln_args[0]);
            }
            match exp_of(a) {
                ExpFold::Kernel(k) => RatForm::from_poly(Poly::kernel(k)),
                ExpFold::Poly(p) => p,
            }
        }
        ElemFn::Ln => {
            if let Expr::Elem(ElemFn::Exp, exp_args) = &a {
                return expr_to_ratform(&exp_args[0]);
            }
            if matches!(&a, Expr::Rat(c) if c.is_one()) {
                return RatForm::zero();
            }
            RatForm::from_poly(Poly::kernel(Expr::ln(a)))
        }
        ElemFn::Sqrt => {
            let base = expr_to_ratform(&a);
            let half = bigfrac(1, 2);
            poly_frac_pow(&base.num, &half).mul(&poly_frac_pow(&base.den, &half).recip())
        }
        ElemFn::Atan2 => {
            let y = normalize(&args[0]);
            let x = normalize(&args[1]);
            elem_atan2(&y, &x)
        }
    }
}

pub(crate) fn poly_to_expr(p: &Poly) -> Expr {
    if p.is_zero() {
        return Expr::zero();
    }
    let mut terms = Vec::with_capacity(p.terms.len());
    for (m, c) in &p.terms {
        let mut factors = Vec::new();
        if !c.is_one() || m.is_unit() {
            factors.push(Expr::Rat(c.clone()));
        }
        for (k, e) in &m.factors {
            if e.is_one() {
                factors.push(k.clone());
            } else {
                factors.push(Expr::Pow(Box::new(k.clone()), e.clone()));
            }
        }
        terms.push(Expr::prod(factors));
    }
    Expr::sum(terms)
}

pub(crate) fn ratform_to_expr(r: &RatForm) -> Expr {
    let num = poly_to_expr(&r.num);
    if r.den.is_one() {
        num
    } else {
        let den = poly_to_expr(&r.den);
        Expr::Prod(vec![num, Expr::Pow(Box::new(den), big(-1))])
    }
}

pub(crate) fn normalize(e: &Expr) -> Expr {
    ratform_to_expr(&expr_to_ratform(e))
}

pub(crate) fn is_zero(e: &Expr) -> bool {
    expr_to_ratform(e).num.is_zero()
}

pub(crate) fn denominator(e: &Expr) -> Option<Expr> {
    let rf = expr_to_ratform(e);
    if rf.den.is_one() {
        None
    } else {
        Some(poly_to_expr(&rf.den))
    }
}

/// Numerator coefficients of `e` as a polynomial in the kernel `g`; errors if
/// `g` occurs inside another kernel or in the denominator.
pub(crate) fn coefficients_in(e: &Expr, g: &Expr) -> crate::error::Result<Vec<Expr>> {
    use crate::error::Error;
    let rf = expr_to_ratform(e);
    if poly_to_expr(&rf.den).contains(g) {
        return Err(Error::UnsupportedForm(format!(
            "denominator depends on `{g}`"
        )));
    }
    let mut by_deg: BTreeMap<u32, Vec<(Mono, BigRational)>> = BTreeMap::new();
    let mut max_deg = 0u32;
    for (m, c) in &rf.num.terms {
        let mut deg = 0u32;
        let mut rest = Vec::new();
        for (k, ex) in &m.factors {
            if k == g {
                if !ex.is_integer() {
                    return Err(Error::UnsupportedForm(format!(
                        "fractional power of `{g}`"
                    )));
                }
                deg = ex.to_integer().to_u32().ok_or_else(|| {
                    Error::UnsupportedForm(format!("degree in `{g}` too large"))
                })?;
            } else {
                if k.contains(g) {
                    return Err(Error::UnsupportedForm(format!(
                        "`{g}` occurs inside kernel `{k}`"
                    )));
                }
                rest.push((k.clone(), ex.clone()));
            }
        }
        max_deg = max_deg.max(deg);
        by_deg.entry(deg).or_default().push((Mono { factors: rest }, c.clone()));
    }
    let den = RatForm { num: rf.den.clone(), den: Poly::one() };
    let mut out = Vec::with_capacity(max_deg as usize + 1);
    for d in 0..=max_deg {
        let p = Poly::from_terms(by_deg.remove(&d).unwrap_or_default());
        let coeff = RatForm::from_poly(p).mul(&den.recip());
        out.push(ratform_to_expr(&coeff));
    }
    Ok(out)
}

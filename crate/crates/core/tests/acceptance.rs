//! Acceptance suite: one test per criterion, every identity exact (zero
//! after normalization).  Each test prints a PASS line on success, so
//! `cargo test --test acceptance -- --nocapture` gives a per-criterion
//! report; the test names themselves list the criteria in order.

use std::collections::BTreeMap;
use std::sync::Arc;

use subsym_core::conservation::{deform, frechet_system, gauge_field, inverse_deform};
use subsym_core::corpus;
use subsym_core::decoupling::{
    check_lambda_instances, decouple_pipeline, is_decoupled, verify_decouplable,
    verify_straightening, DecouplableCandidate,
};
use subsym_core::error::Error;
use subsym_core::expr::{eps_coefficients, Expr, MultiIndex};
use subsym_core::fields::{EvoField, PointField};
use subsym_core::gen::{self, Rng};
use subsym_core::invariance::{
    check_subsymmetry, check_subsystem_symmetry, check_symmetry, classify, instantiate_unknowns,
    solve_linear_params, split_residuals, Classification, SolveOutcome, UnknownFn,
};
use subsym_core::jet::JetContext;
use subsym_core::systems::{DiffSystem, SubSystem};

fn pass(n: u32, what: &str) {
    println!("PASS criterion {n:2}: {what}");
}

#[test]
fn criterion_01_commutation_identity() {
    let ctx = Arc::new(
        JetContext::builder()
            .independent(["x", "t"])
            .dependent(["u", "v"])
            .build()
            .unwrap(),
    );
    let mut rng = Rng::new(0x0001);
    for _ in 0..100 {
        let f = gen::field(&mut rng, &ctx, 3);
        let e = gen::expr(&mut rng, &ctx, 3);
        for dir in ["x", "t"] {
            let lhs = f.apply(&ctx.total_derivative(&e, dir).unwrap()).unwrap();
            let rhs = ctx.total_derivative(&f.apply(&e).unwrap(), dir).unwrap();
            assert!(
                Expr::sub(lhs, rhs).is_zero(),
                "commutation identity failed for dir {dir}"
            );
        }
    }
    pass(1, "field application commutes with total derivatives (100 random pairs, both directions)");
}

#[test]
fn criterion_02_trivial_system() {
    let sf = corpus::load("trivial-xy").unwrap();
    let sys = &sf.system;
    let f = sf.field("Xother").unwrap();

    // X D1 = x D_y D1 + D2 and X D2 = x D_y D2 + 1, exactly.
    let dec = sys.decompose_on_ideal(&f.apply(&sys.equations()[0]).unwrap()).unwrap();
    assert!(dec.residual.is_zero());
    assert!(Expr::equivalent(
        dec.gamma.get(&(0, MultiIndex::new(["y"]))).unwrap(),
        &Expr::sym("x")
    ));
    assert!(Expr::equivalent(
        dec.gamma.get(&(1, MultiIndex::empty())).unwrap(),
        &Expr::one()
    ));
    let dec = sys.decompose_on_ideal(&f.apply(&sys.equations()[1]).unwrap()).unwrap();
    assert!(Expr::equivalent(&dec.residual, &Expr::one()));
    assert!(Expr::equivalent(
        dec.gamma.get(&(1, MultiIndex::new(["y"]))).unwrap(),
        &Expr::sym("x")
    ));

    // Flow on u0 = h(z) to second order: h(z) + eps y + eps^2 x / 2, with
    // residuals exactly eps^2/2 and eps through order eps^2.
    let mut u0 = BTreeMap::new();
    u0.insert("u".to_string(), Expr::opaque("h", vec![Expr::sym("z")]));
    let flow = f.flow_truncated(&u0, 2, "eps").unwrap();
    let cs = flow.coefficients("u").unwrap();
    assert!(Expr::equivalent(&cs[0], &Expr::opaque("h", vec![Expr::sym("z")])));
    assert!(Expr::equivalent(&cs[1], &Expr::sym("y")));
    assert!(Expr::equivalent(&cs[2], &Expr::mul(Expr::rat(1, 2), Expr::sym("x"))));

    let r1 = flow.residual(&sys.equations()[0]).unwrap();
    let r2 = flow.residual(&sys.equations()[1]).unwrap();
    let c1 = eps_coefficients(&r1, "eps", 2).unwrap();
    let c2 = eps_coefficients(&r2, "eps", 2).unwrap();
    assert!(c1[0].is_zero() && c1[1].is_zero());
    assert!(Expr::equivalent(&c1[2], &Expr::rat(1, 2)));
    assert!(c2[0].is_zero());
    assert!(Expr::equivalent(&c2[1], &Expr::one()));
    assert!(c2[2].is_zero());

    // Case classification for the three example fields plus the negative.
    let d1 = sf.subsystem("D1").unwrap();
    for (name, expected) in [
        ("Xsym", Classification::Symmetry),
        ("Xsub", Classification::SubsystemSymmetry),
        ("Xother", Classification::OtherSubsymmetry),
        ("Xnot", Classification::NotSubsymmetry),
    ] {
        let f = sf.field(name).unwrap();
        assert_eq!(classify(&f, &d1).unwrap(), expected, "{name}");
    }
    pass(2, "flat system: exact decomposition, flow residuals, case classification");
}

#[test]
fn criterion_03_transport_subsymmetry_families() {
    let sf = corpus::load("euler1d").unwrap();
    let d1 = sf.subsystem("D1").unwrap();
    let names = [
        "X1a", "X1b", "X1c", "X2a", "X2b", "X2c", "X3a", "X3b", "X3c", "X4a", "X4b", "X4c",
    ];
    for name in names {
        let f = sf.field(name).unwrap();
        let rep = check_subsymmetry(&f, &d1).unwrap();
        assert!(rep.holds, "{name} failed: residuals {:?}", rep.residuals.iter().map(|r| r.to_string()).collect::<Vec<_>>());
    }
    pass(3, "transport system: three instances of each of the four generator families");
}

/// Stream-function field on the sine-Gordon context.
fn stream_field(ctx: &Arc<JetContext>, psi: &Expr) -> PointField {
    let u = Expr::var("u");
    let v = Expr::var("v");
    let sin_u = Expr::sin(u.clone());
    let xi_t = Expr::neg(Expr::div(psi.diff_partial(&u), sin_u.clone()).unwrap());
    let xi_x = Expr::neg(Expr::div(psi.diff_partial(&v), v.clone()).unwrap());
    let eta_u = Expr::div(psi.diff_partial(&Expr::sym("t")), sin_u).unwrap();
    let eta_v = Expr::div(psi.diff_partial(&Expr::sym("x")), v).unwrap();
    PointField::new(ctx.clone(), vec![xi_t, xi_x], vec![eta_u, eta_v]).unwrap()
}

#[test]
fn criterion_04_sine_gordon_fields() {
    let sf = corpus::load("sine-gordon").unwrap();
    let ctx = &sf.ctx;
    let sys = &sf.system;
    let main = sf.subsystem("main").unwrap();

    for name in ["X1", "X2", "X3"] {
        assert!(check_symmetry(&sf.field(name).unwrap(), sys).unwrap().holds, "{name}");
    }

    // Y1 is a symmetry of the sub-system with Gamma = -1.
    let y1 = sf.field("Y1").unwrap();
    let rep = check_subsystem_symmetry(&y1, &main).unwrap();
    assert!(rep.holds);
    let gamma = rep.gamma[0].get(&(0, MultiIndex::empty())).unwrap();
    assert!(Expr::equivalent(gamma, &Expr::int(-1)));

    // Stream-function fields for the three generating functions.
    let u = Expr::var("u");
    let v = Expr::var("v");
    let psis = [
        Expr::cos(u.clone()),
        Expr::neg(Expr::mul(Expr::rat(1, 2), Expr::powi(v.clone(), 2))),
        Expr::add(
            Expr::mul(Expr::sym("t"), Expr::cos(u.clone())),
            Expr::mul(
                Expr::sym("x"),
                Expr::mul(Expr::rat(1, 2), Expr::powi(v.clone(), 2)),
            ),
        ),
    ];
    let x1 = sf.field("X1").unwrap();
    let x2 = sf.field("X2").unwrap();
    let x3 = sf.field("X3").unwrap();
    let expected = [x1.clone(), x2.clone(), x3.add(&y1)];
    for (psi, target) in psis.iter().zip(&expected) {
        let y2 = stream_field(ctx, psi).canonicalize().unwrap();
        assert!(check_subsymmetry(&y2, &main).unwrap().holds);
        assert!(y2.equivalent(target), "stream field mismatch for psi = {psi}");
    }
    pass(4, "sine-Gordon: point symmetries, sub-system symmetry with Gamma = -1, stream fields");
}

#[test]
fn criterion_05_deformation_of_the_quadratic_law() {
    let sf = corpus::load("sine-gordon").unwrap();
    let cl = sf.conslaw("sgcl").unwrap();
    let y1 = sf.field("Y1").unwrap();
    let deformed = deform(&y1, &cl).unwrap();
    for (new, old) in deformed.fluxes().iter().zip(cl.fluxes()) {
        assert!(Expr::equivalent(new, &Expr::neg(old.clone())));
    }
    let x1 = sf.field("X1").unwrap();
    let deformed = deform(&x1, &cl).unwrap();
    assert!(deformed.is_trivial().unwrap());
    pass(5, "quadratic law deforms to its negative under Y1 and to a trivial law under X1");
}

#[test]
fn criterion_06_scalar_transport_inverse_problem() {
    let sf = corpus::load("hopf").unwrap();

    // Cubic and exponential laws verify, with second-derivative multipliers.
    let cubic = sf.conslaw("cubic").unwrap();
    assert!(Expr::equivalent(
        &cubic.characteristic()[0],
        &Expr::mul(Expr::int(6), Expr::var("u"))
    ));
    let expf = sf.conslaw("expf").unwrap();
    assert!(Expr::equivalent(&expf.characteristic()[0], &Expr::exp(Expr::var("u"))));

    // No evolutionary field can deform the base law into the cubic one.
    let base = sf.conslaw("base").unwrap();
    assert!(matches!(
        inverse_deform(&base, cubic.fluxes()),
        Err(Error::RankDeficient(_))
    ));

    // Compatibility system with f = u^3/6 and gauge term R(x, t): eliminate
    // the field component, split on powers of u, solve for the derivatives
    // of R -- the constant stratum is contradictory.
    let mut builder = JetContext::builder()
        .independent(["t", "x"])
        .dependent(["u"])
        .opaque("R", 2)
        .opaque("al", 3);
    builder = builder.max_order(6);
    let rctx = Arc::new(builder.build().unwrap());
    let rsys = DiffSystem::new(
        rctx.clone(),
        vec![Expr::parse("u_t + u*u_x", rctx.as_ref()).unwrap()],
        vec![None],
    )
    .unwrap();
    let alpha = Expr::parse("al(x, t, u)", rctx.as_ref()).unwrap();
    let r = Expr::parse("R(x, t)", rctx.as_ref()).unwrap();
    let source = [Expr::var("u"), Expr::parse("u^2/2", rctx.as_ref()).unwrap()];
    let target = [
        Expr::parse("u^2/2", rctx.as_ref()).unwrap(),
        Expr::parse("u^3/3", rctx.as_ref()).unwrap(),
    ];
    let ds = frechet_system(&rsys, &source, &target, &[alpha], &r).unwrap();
    assert_eq!(ds.equations.len(), 2);
    // eq2 - u * eq1 eliminates the unknown field component exactly.
    let combined = Expr::sub(
        ds.equations[1].clone(),
        Expr::mul(Expr::var("u"), ds.equations[0].clone()),
    )
    .normalize();
    let unknown_r = UnknownFn {
        name: "R".into(),
        args: vec![Expr::sym("x"), Expr::sym("t")],
        arbitrary: false,
    };
    let split = split_residuals(&[combined], &[unknown_r]).unwrap();
    let rx = Expr::opaque_deriv("R", vec![Expr::sym("x"), Expr::sym("t")], vec![0]);
    let rt = Expr::opaque_deriv("R", vec![Expr::sym("x"), Expr::sym("t")], vec![1]);
    match solve_linear_params(&split, &[rx, rt]).unwrap() {
        SolveOutcome::Inconsistent { certificate } => {
            assert!(!certificate.is_empty());
            assert!(certificate.iter().all(|c| !c.is_zero()));
        }
        other => panic!("expected inconsistency, got {other:?}"),
    }
    pass(6, "scalar transport: laws verify, inverse deformation is rank-deficient and gauge-incompatible");
}

#[test]
fn criterion_07_telegraph_catalog() {
    let mut verified = 0;
    for (id, cl_names, field_names) in [
        ("telegraph-tanu", vec!["cl1", "cl2", "cl3", "cl4"], vec!["X1", "X2", "X3", "X4"]),
        ("telegraph-Gu", vec!["cl"], vec!["X"]),
        ("telegraph-exp", vec!["cl"], vec!["X"]),
        ("telegraph-Ginv", vec!["cl"], vec!["X"]),
    ] {
        let sf = corpus::load(id).unwrap();
        let base = sf.conslaw("base").unwrap();
        for (cl_name, field_name) in cl_names.iter().zip(&field_names) {
            let target = sf.conslaw(cl_name).unwrap();
            let f = sf.field(field_name).unwrap();
            let deformed = deform(&f, &base).unwrap();
            for (got, want) in deformed.fluxes().iter().zip(target.fluxes()) {
                assert!(Expr::equivalent(got, want), "{id}/{cl_name}: flux mismatch");
            }
            assert!(deformed.same_law(&target).unwrap());

            // The closed-form inverse returns exactly P d_u - Q d_v.
            let field = inverse_deform(&base, target.fluxes()).unwrap();
            assert!(Expr::equivalent(&field.characteristics()[0], &target.fluxes()[0]));
            assert!(Expr::equivalent(
                &field.characteristics()[1],
                &Expr::neg(target.fluxes()[1].clone())
            ));
            verified += 1;
        }
    }
    assert_eq!(verified, 7);
    pass(7, "telegraph: all seven listed laws verify, deform from the base law, and invert in closed form");
}

#[test]
fn criterion_08_decoupling_suite() {
    // Direct decoupledness tests.
    for id in ["heat", "heat-inhom"] {
        let sf = corpus::load(id).unwrap();
        let d1 = sf.subsystem("D1").unwrap();
        assert!(is_decoupled(&d1, "u", None).unwrap().is_some(), "{id}");
    }

    // Planar system: full pipeline to polar coordinates.
    let sf = corpus::load("dyn-polar").unwrap();
    let sys = &sf.system;
    let map = sf.map("polar").unwrap();
    let rot_point = match sf.fields.get("rot").unwrap() {
        subsym_core::sysfile::FieldDef::Point(p) => p.clone(),
        _ => unreachable!(),
    };
    assert!(verify_straightening(map, &rot_point).unwrap());
    let x = Expr::var("x");
    let y = Expr::var("y");
    let combo = vec![
        vec![x.clone(), y.clone()],
        vec![Expr::neg(y.clone()), x.clone()],
    ];
    let barred_leads = vec![Some(Expr::jet("r", ["t"])), Some(Expr::jet("theta", ["t"]))];
    let out = decouple_pipeline(sys, &combo, vec![None, None], map, barred_leads, "r").unwrap();
    let bctx = out.transformed.ctx();
    let want1 = Expr::parse("r_t - r*F(r^2, t)", bctx.as_ref()).unwrap();
    let want2 = Expr::parse("theta_t - G(r*cos(theta), r*sin(theta), t)", bctx.as_ref()).unwrap();
    assert!(Expr::equivalent(&out.transformed.equations()[0], &want1));
    assert!(Expr::equivalent(&out.transformed.equations()[1], &want2));

    // Reaction-diffusion: shear to the closed combination.
    let sf = corpus::load("reaction-diffusion").unwrap();
    let map = sf.map("shear").unwrap();
    let transl = match sf.fields.get("transl").unwrap() {
        subsym_core::sysfile::FieldDef::Point(p) => p.clone(),
        _ => unreachable!(),
    };
    assert!(verify_straightening(map, &transl).unwrap());
    let k = Expr::sym("k");
    let combo = vec![
        vec![Expr::neg(k.clone()), Expr::one()],
        vec![Expr::one(), Expr::zero()],
    ];
    let combined_leads = vec![Some(Expr::jet("v", ["t"])), Some(Expr::jet("u", ["t"]))];
    let barred_leads = vec![Some(Expr::jet("w", ["t"])), Some(Expr::jet("z", ["t"]))];
    let out =
        decouple_pipeline(&sf.system, &combo, combined_leads, map, barred_leads, "w").unwrap();
    let bctx = out.transformed.ctx();
    let want1 = Expr::parse("w_t - D*w_{xx} - sigma(w)", bctx.as_ref()).unwrap();
    let want2 = Expr::parse("z_t - D*z_{xx} - R(z, w + k*z)", bctx.as_ref()).unwrap();
    assert!(Expr::equivalent(&out.transformed.equations()[0], &want1));
    assert!(Expr::equivalent(&out.transformed.equations()[1], &want2));

    // Determining equations for the planar system admit the rotation
    // solution by direct verification.
    planar_determining_admits_rotation();
    pass(8, "decoupling: derivative tests, straightening maps, both pipelines, determining system");
}

/// Build the planar determining system with unknown multiplier and direction
/// functions of (x, y, t), then substitute the known solution.
fn planar_determining_admits_rotation() {
    let mut builder = JetContext::builder()
        .independent(["t"])
        .dependent(["x", "y"])
        .opaque("F", 2)
        .opaque("G", 3)
        .opaque("beta1", 3)
        .opaque("tau", 3)
        .opaque("xiF", 3)
        .opaque("psiF", 3)
        .opaque("lam", 3);
    builder = builder.max_order(6);
    let ctx = Arc::new(builder.build().unwrap());
    let d1 = Expr::parse("x_t - x*F(x^2 + y^2, t) + y*G(x, y, t)", ctx.as_ref()).unwrap();
    let d2 = Expr::parse("y_t - y*F(x^2 + y^2, t) - x*G(x, y, t)", ctx.as_ref()).unwrap();
    let sys = DiffSystem::new(ctx.clone(), vec![d1, d2], vec![None, None]).unwrap();

    let args = vec![Expr::var("x"), Expr::var("y"), Expr::sym("t")];
    let call = |name: &str| Expr::opaque(name, args.clone());
    // X = lam * (tau d_t + xiF d_x + psiF d_y) in evolutionary form.
    let point = PointField::new(
        ctx.clone(),
        vec![Expr::mul(call("lam"), call("tau"))],
        vec![
            Expr::mul(call("lam"), call("xiF")),
            Expr::mul(call("lam"), call("psiF")),
        ],
    )
    .unwrap();
    let evo = point.canonicalize().unwrap();
    let ss = SubSystem::from_scalars(sys.clone(), vec![call("beta1"), Expr::one()]).unwrap();
    let ansatz = subsym_core::invariance::FieldAnsatz {
        field: evo,
        unknowns: vec![
            UnknownFn { name: "beta1".into(), args: args.clone(), arbitrary: false },
            UnknownFn { name: "tau".into(), args: args.clone(), arbitrary: false },
            UnknownFn { name: "xiF".into(), args: args.clone(), arbitrary: false },
            UnknownFn { name: "psiF".into(), args: args.clone(), arbitrary: false },
            UnknownFn { name: "lam".into(), args: args.clone(), arbitrary: true },
        ],
    };
    let ds = subsym_core::invariance::determining_equations(
        &ansatz,
        &ss,
        subsym_core::invariance::RestrictionMode::SubSystemOnly,
    )
    .unwrap();
    assert!(!ds.equations.is_empty());

    let x = Expr::var("x");
    let y = Expr::var("y");
    let mut bindings = BTreeMap::new();
    bindings.insert("beta1".to_string(), (args.clone(), Expr::div(x.clone(), y.clone()).unwrap()));
    bindings.insert("tau".to_string(), (args.clone(), Expr::zero()));
    bindings.insert("xiF".to_string(), (args.clone(), Expr::one()));
    bindings.insert(
        "psiF".to_string(),
        (args.clone(), Expr::neg(Expr::div(x.clone(), y.clone()).unwrap())),
    );
    for eq in &ds.equations {
        let inst = instantiate_unknowns(eq, &bindings);
        assert!(inst.is_zero(), "determining equation not satisfied: {eq}");
    }
}

#[test]
fn criterion_09_arbitrary_translation_on_decoupled_subsystems() {
    for id in corpus::ids() {
        let sf = corpus::load(id).unwrap();
        let deps = sf.ctx.dependent().to_vec();
        if deps.len() < 2 {
            continue;
        }
        for exp in &sf.expectations {
            let subsym_core::sysfile::Expectation::Decoupled { subsystem, free, .. } = exp else {
                continue;
            };
            let ss = sf.subsystem(subsystem).unwrap();
            let beta: Vec<Expr> = ss.multipliers()[0]
                .iter()
                .map(|m| m.get(&MultiIndex::empty()).cloned().unwrap_or_else(Expr::zero))
                .collect();
            let lambda_args: Vec<Expr> = sf
                .ctx
                .independent()
                .iter()
                .map(|s| Expr::sym(s))
                .chain(deps.iter().map(|d| Expr::var(d)))
                .collect();
            for other in deps.iter().filter(|d| *d != free) {
                let eta: Vec<Expr> = deps
                    .iter()
                    .map(|d| if d == other { Expr::one() } else { Expr::zero() })
                    .collect();
                let xi = vec![Expr::zero(); sf.ctx.independent().len()];
                let direction = PointField::new(sf.ctx.clone(), xi, eta).unwrap();
                let candidate = DecouplableCandidate { beta: beta.clone(), field: direction.clone() };
                assert!(
                    verify_decouplable(&sf.system, &candidate, &lambda_args).unwrap(),
                    "{id}: arbitrary translation in {other} not admitted"
                );
                // Five concrete instantiations of the multiplier.
                let bodies = concrete_lambdas(&sf.ctx);
                assert!(check_lambda_instances(
                    &sf.system,
                    &beta,
                    &direction,
                    &lambda_args,
                    &bodies
                )
                .unwrap());
            }
        }
    }
    pass(9, "decoupled sub-systems admit translations by arbitrary functions (symbolic and sampled)");
}

fn concrete_lambdas(ctx: &Arc<JetContext>) -> Vec<Expr> {
    let x = Expr::sym(&ctx.independent()[0]);
    let u = Expr::var(&ctx.dependent()[0]);
    let v = Expr::var(&ctx.dependent()[ctx.dependent().len() - 1]);
    vec![
        Expr::one(),
        x.clone(),
        Expr::add(Expr::mul(x.clone(), u.clone()), Expr::int(3)),
        Expr::sin(v.clone()),
        Expr::add(Expr::powi(u.clone(), 2), Expr::mul(x.clone(), v.clone())),
    ]
}

#[test]
fn criterion_10_scalar_collapse() {
    let sf = corpus::load("hopf").unwrap();
    let sys = &sf.system;
    let ctx = &sf.ctx;
    let mut rng = Rng::new(0x0010);

    // Five on-shell-nonzero multipliers.
    let mut betas = Vec::new();
    while betas.len() < 5 {
        let b = gen::expr(&mut rng, ctx, 2).normalize();
        if !sys.restrict(&b).unwrap().is_zero() {
            betas.push(b);
        }
    }
    // Ten candidate fields: two known symmetries plus eight random ones.
    let mut fields = vec![
        EvoField::new(ctx.clone(), vec![Expr::parse("-u_t", ctx.as_ref()).unwrap()]).unwrap(),
        EvoField::new(ctx.clone(), vec![Expr::parse("-u_x", ctx.as_ref()).unwrap()]).unwrap(),
    ];
    while fields.len() < 10 {
        fields.push(gen::field(&mut rng, ctx, 2));
    }
    let mut symmetric = 0;
    for f in &fields {
        let expected = check_symmetry(f, sys).unwrap().holds;
        if expected {
            symmetric += 1;
        }
        for b in &betas {
            let ss = SubSystem::from_scalars(sys.clone(), vec![b.clone()]).unwrap();
            let got = check_subsymmetry(f, &ss).unwrap().holds;
            assert_eq!(got, expected, "collapse failed for beta = {b}");
        }
    }
    assert!(symmetric >= 2, "need symmetric witnesses for a meaningful collapse test");
    pass(10, "scalar equation: sub-symmetry verdicts collapse to symmetry verdicts for nonzero multipliers");
}

#[test]
fn criterion_11_gauge_suite() {
    let sf = corpus::load("telegraph-tanu").unwrap();
    let base = sf.conslaw("base").unwrap();
    let target = sf.conslaw("cl1").unwrap();
    let ctx = &sf.ctx;
    let mut rng = Rng::new(0x0011);

    for _ in 0..5 {
        let r = random_polynomial(&mut rng, ctx);
        let xr = gauge_field(&base, &r).unwrap();
        let deformed = deform(&xr, &base).unwrap();
        assert!(deformed.is_trivial().unwrap(), "gauge deformation not trivial for R = {r}");

        // Round trip: the inverse field composed with the gauge field still
        // reaches the target modulo a zero-characteristic difference.
        let x = inverse_deform(&base, target.fluxes()).unwrap();
        let composed = x.add(&xr);
        let reached = deform(&composed, &base).unwrap();
        assert!(reached.same_law(&target).unwrap());
        // The flux difference is exactly the trivial pair (-D_x R, D_t R).
        let dxr = ctx.total_derivative(&r, "x").unwrap();
        let dtr = ctx.total_derivative(&r, "t").unwrap();
        let diff_t = Expr::sub(reached.fluxes()[0].clone(), target.fluxes()[0].clone());
        let diff_x = Expr::sub(reached.fluxes()[1].clone(), target.fluxes()[1].clone());
        assert!(Expr::equivalent(&diff_t, &Expr::neg(dxr)));
        assert!(Expr::equivalent(&diff_x, &dtr));
    }
    pass(11, "gauge fields deform trivially and the inverse/forward round trip matches modulo gauge");
}

/// Random polynomial in the base variables, degree <= 2 per monomial.
fn random_polynomial(rng: &mut Rng, ctx: &Arc<JetContext>) -> Expr {
    let atoms: Vec<Expr> = ctx
        .independent()
        .iter()
        .map(|s| Expr::sym(s))
        .chain(ctx.dependent().iter().map(|d| Expr::var(d)))
        .collect();
    let mut terms = Vec::new();
    for _ in 0..3 {
        let mut factors = vec![rng.rational()];
        for _ in 0..=rng.below(2) {
            factors.push(atoms[rng.below(atoms.len() as u64) as usize].clone());
        }
        terms.push(Expr::prod(factors));
    }
    Expr::sum(terms).normalize()
}

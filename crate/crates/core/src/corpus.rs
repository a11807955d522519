//! Built-in system definitions with stored verdicts.  Re-verifying every
//! stored verdict from a clean state is the corpus regression suite.

use crate::decoupling::is_decoupled;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::invariance::{
    check_subsymmetry, check_subsystem_symmetry, check_symmetry, classify, Classification,
};
use crate::sysfile::{Expectation, SystemFile};

const ENTRIES: &[(&str, &str)] = &[
    ("trivial-xy", include_str!("../corpus/trivial-xy.subsym")),
    ("euler1d", include_str!("../corpus/euler1d.subsym")),
    ("sine-gordon", include_str!("../corpus/sine-gordon.subsym")),
    ("heat", include_str!("../corpus/heat.subsym")),
    ("heat-inhom", include_str!("../corpus/heat-inhom.subsym")),
    ("hopf", include_str!("../corpus/hopf.subsym")),
    ("lin-hyperbolic", include_str!("../corpus/lin-hyperbolic.subsym")),
    ("nls-real", include_str!("../corpus/nls-real.subsym")),
    ("dyn-polar", include_str!("../corpus/dyn-polar.subsym")),
    ("reaction-diffusion", include_str!("../corpus/reaction-diffusion.subsym")),
    ("telegraph-tanu", include_str!("../corpus/telegraph-tanu.subsym")),
    ("telegraph-Gu", include_str!("../corpus/telegraph-Gu.subsym")),
    ("telegraph-exp", include_str!("../corpus/telegraph-exp.subsym")),
    ("telegraph-Ginv", include_str!("../corpus/telegraph-Ginv.subsym")),
];

pub fn ids() -> Vec<&'static str> {
    ENTRIES.iter().map(|(id, _)| *id).collect()
}

pub fn source(id: &str) -> Result<&'static str> {
    ENTRIES
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::UnknownId(id.to_string()))
}

pub fn load(id: &str) -> Result<SystemFile> {
    SystemFile::parse(source(id)?)
}

fn classification_tag(c: Classification) -> &'static str {
    match c {
        Classification::Symmetry => "symmetry",
        Classification::SubsystemSymmetry => "subsystem-symmetry",
        Classification::OtherSubsymmetry => "other-subsymmetry",
        Classification::NotSubsymmetry => "not-subsymmetry",
    }
}

/// Re-verify one stored expectation; `Ok(())` means it reproduces.
pub fn verify_expectation(sf: &SystemFile, exp: &Expectation) -> Result<()> {
    let fail = |msg: String| Err(Error::InvalidSystem(msg));
    match exp {
        Expectation::Symmetry { field, holds } => {
            let f = sf.field(field)?;
            let rep = check_symmetry(&f, &sf.system)?;
            if rep.holds != *holds {
                return fail(format!("symmetry {field}: expected holds={holds}, got {}", rep.holds));
            }
        }
        Expectation::Subsymmetry { field, subsystem, holds } => {
            let f = sf.field(field)?;
            let ss = sf.subsystem(subsystem)?;
            let rep = check_subsymmetry(&f, &ss)?;
            if rep.holds != *holds {
                return fail(format!(
                    "subsymmetry {field} on {subsystem}: expected holds={holds}, got {}",
                    rep.holds
                ));
            }
        }
        Expectation::SubsystemSymmetry { field, subsystem, holds } => {
            let f = sf.field(field)?;
            let ss = sf.subsystem(subsystem)?;
            let rep = check_subsystem_symmetry(&f, &ss)?;
            if rep.holds != *holds {
                return fail(format!(
                    "subsystem-symmetry {field} on {subsystem}: expected holds={holds}, got {}",
                    rep.holds
                ));
            }
        }
        Expectation::Classify { field, subsystem, tag } => {
            let f = sf.field(field)?;
            let ss = sf.subsystem(subsystem)?;
            let got = classification_tag(classify(&f, &ss)?);
            if got != tag {
                return fail(format!("classify {field} on {subsystem}: expected {tag}, got {got}"));
            }
        }
        Expectation::ConsLaw { name, trivial } => {
            let cl = sf.conslaw(name)?;
            let got = cl.is_trivial()?;
            if got != *trivial {
                return fail(format!("conslaw {name}: expected trivial={trivial}, got {got}"));
            }
        }
        Expectation::Decoupled { subsystem, free, factor } => {
            let ss = sf.subsystem(subsystem)?;
            let factor = match factor {
                Some(text) => Some(Expr::parse(text, sf.ctx.as_ref())?),
                None => None,
            };
            if is_decoupled(&ss, free, factor.as_ref())?.is_none() {
                return fail(format!("decoupled {subsystem} free {free}: test failed"));
            }
        }
    }
    Ok(())
}

/// Verify every stored expectation of an entry.
pub fn verify_entry(sf: &SystemFile) -> Result<()> {
    for exp in &sf.expectations {
        verify_expectation(sf, exp)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_parse() {
        for id in ids() {
            let sf = load(id).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert!(!sf.system.is_empty());
        }
    }

    #[test]
    fn sine_gordon_entry_loads() {
        let sf = load("sine-gordon").unwrap();
        assert_eq!(sf.system.len(), 2);
        assert!(sf.subsystems.contains_key("main"));
        assert!(sf.conslaws.contains_key("sgcl"));
    }

    #[test]
    fn unknown_id_errors() {
        assert!(matches!(load("no-such-system"), Err(Error::UnknownId(_))));
    }
}

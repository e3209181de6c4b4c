//! Admissibility of morphisms and exactness of short sequences.

use std::fmt;

use crate::analysis::{injective_surjective, kernel_in_image, Analysis};
use crate::error::{LcaError, Result};
use crate::morphism::{compose, LcaMorphism};
use crate::object::LcaObject;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Admissibility {
    AdmissibleMonic,
    AdmissibleEpic,
    Isomorphism,
    Neither,
    Unknown,
}

impl Admissibility {
    pub fn is_monic(self) -> bool {
        matches!(self, Admissibility::AdmissibleMonic | Admissibility::Isomorphism)
    }

    pub fn is_epic(self) -> bool {
        matches!(self, Admissibility::AdmissibleEpic | Admissibility::Isomorphism)
    }

    fn from_flags(inj: bool, surj: bool) -> Self {
        match (inj, surj) {
            (true, true) => Admissibility::Isomorphism,
            (true, false) => Admissibility::AdmissibleMonic,
            (false, true) => Admissibility::AdmissibleEpic,
            (false, false) => Admissibility::Neither,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExactVerdict {
    Exact,
    NotExact,
    Unknown,
}

impl fmt::Display for ExactVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for ExactSequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} >-> {} ->> {}", self.sub, self.mid, self.quot)?;
        writeln!(f, "monic: {}", self.monic)?;
        write!(f, "epic: {}", self.epic)
    }
}

/// `sub ↪ mid ↠ quot`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSequenceSpec {
    pub sub: LcaObject,
    pub mid: LcaObject,
    pub quot: LcaObject,
    pub monic: LcaMorphism,
    pub epic: LcaMorphism,
}

impl ExactSequenceSpec {
    pub fn new(monic: LcaMorphism, epic: LcaMorphism) -> Self {
        ExactSequenceSpec {
            sub: monic.source().clone(),
            mid: monic.target().clone(),
            quot: epic.target().clone(),
            monic,
            epic,
        }
    }

    /// The dual sequence `quot^∨ ↪ mid^∨ ↠ sub^∨`.
    pub fn dual(&self) -> ExactSequenceSpec {
        ExactSequenceSpec {
            sub: self.quot.dual(),
            mid: self.mid.dual(),
            quot: self.sub.dual(),
            monic: self.epic.dual(),
            epic: self.monic.dual(),
        }
    }

    pub fn check_shape(&self) -> Result<()> {
        let checks = [
            (self.monic.source(), &self.sub, "monic source"),
            (self.monic.target(), &self.mid, "monic target"),
            (self.epic.source(), &self.mid, "epic source"),
            (self.epic.target(), &self.quot, "epic target"),
        ];
        for (a, b, what) in checks {
            if a != b {
                return Err(LcaError::ShapeMismatch(format!("{what} is {a}, expected {b}")));
            }
        }
        Ok(())
    }
}

pub fn classify(f: &LcaMorphism) -> Admissibility {
    let (objects, maps): (Vec<&LcaObject>, Vec<(usize, usize, &LcaMorphism)>) =
        if f.is_endomorphism() {
            (vec![f.source()], vec![(0, 0, f)])
        } else {
            (vec![f.source(), f.target()], vec![(0, 1, f)])
        };
    match Analysis::new(&objects, &maps) {
        None => Admissibility::Unknown,
        Some(an) => {
            let (inj, surj) = injective_surjective(&an, 0);
            Admissibility::from_flags(inj, surj)
        }
    }
}

/// Invariants that add up along every exact sequence.
pub fn additive_invariants(g: &LcaObject) -> Vec<(String, usize)> {
    let mut out = vec![
        ("real+lattice".to_string(), g.real_rank() + g.lattice_rank()),
        ("real+torus".to_string(), g.real_rank() + g.torus_rank()),
    ];
    for (p, r) in g.padic_parts() {
        out.push((format!("qp+zp({p})"), r.qp + r.zp));
        out.push((format!("qp+pr({p})"), r.qp + r.pr));
    }
    out
}

fn invariants_add_up(seq: &ExactSequenceSpec) -> bool {
    let get = |g: &LcaObject, name: &str| {
        additive_invariants(g).into_iter().find(|(n, _)| n == name).map_or(0, |(_, v)| v)
    };
    let mut names: Vec<String> = Vec::new();
    for g in [&seq.sub, &seq.mid, &seq.quot] {
        names.extend(additive_invariants(g).into_iter().map(|(n, _)| n));
    }
    names.iter().all(|n| get(&seq.mid, n) == get(&seq.sub, n) + get(&seq.quot, n))
}

pub fn check_exact(seq: &ExactSequenceSpec) -> Result<ExactVerdict> {
    seq.check_shape()?;
    if !compose(&seq.monic, &seq.epic)?.is_zero() || !invariants_add_up(seq) {
        return Ok(ExactVerdict::NotExact);
    }
    let Some(an) = Analysis::new(
        &[&seq.sub, &seq.mid, &seq.quot],
        &[(0, 1, &seq.monic), (1, 2, &seq.epic)],
    ) else {
        return Ok(ExactVerdict::Unknown);
    };
    let (inj, _) = injective_surjective(&an, 0);
    let (_, surj) = injective_surjective(&an, 1);
    if inj && surj && kernel_in_image(&an, 0, 1) {
        Ok(ExactVerdict::Exact)
    } else {
        Ok(ExactVerdict::NotExact)
    }
}

//! Haar moduli of automorphisms and measure factors of exact sequences.
//!
//! Canonical measures: Lebesgue with unit covolume on `R`, counting measure on
//! discrete groups (finite groups included), total mass 1 on `T` and `Zp`,
//! and `μ(Zp) = 1` on `Qp`.

use std::fmt;
use std::ops::{Div, Mul};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::analysis::{cokernel, from_primary, injective_surjective, Analysis, Family};
use crate::arith::{fmt_rat, padic_abs, parse_rat, rat_int, Rat};
use crate::error::{LcaError, Result};
use crate::exact::{check_exact, classify, ExactSequenceSpec, ExactVerdict};
use crate::linalg::{det, solve, RatMat};
use crate::morphism::{compose, LcaMorphism};
use crate::object::LcaObject;

/// A positive rational number in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositiveRational(Rat);

impl PositiveRational {
    pub fn new(q: Rat) -> Option<Self> {
        q.is_positive().then_some(PositiveRational(q))
    }

    pub fn one() -> Self {
        PositiveRational(Rat::one())
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn recip(&self) -> Self {
        PositiveRational(self.0.recip())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl Mul for PositiveRational {
    type Output = PositiveRational;
    fn mul(self, rhs: Self) -> Self {
        PositiveRational(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a PositiveRational> for &'a PositiveRational {
    type Output = PositiveRational;
    fn mul(self, rhs: &PositiveRational) -> PositiveRational {
        PositiveRational(&self.0 * &rhs.0)
    }
}

impl Div for PositiveRational {
    type Output = PositiveRational;
    fn div(self, rhs: Self) -> Self {
        PositiveRational(self.0 / rhs.0)
    }
}

impl std::iter::Product for PositiveRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(PositiveRational::one(), |a, b| a * b)
    }
}

impl fmt::Display for PositiveRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rat(&self.0))
    }
}

impl fmt::Debug for PositiveRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PositiveRational {
    type Err = LcaError;
    fn from_str(s: &str) -> Result<Self> {
        parse_rat(s)
            .and_then(PositiveRational::new)
            .ok_or_else(|| LcaError::parse(1, 1, format!("'{s}' is not a positive rational")))
    }
}

fn abs_at(family: Family, q: &Rat) -> Rat {
    match family {
        Family::Arch => q.abs(),
        Family::P(p) => padic_abs(q, p),
    }
}

fn select_range(m: &RatMat, rows: usize, cols: usize) -> RatMat {
    m.select(&(0..rows).collect::<Vec<_>>(), &(0..cols).collect::<Vec<_>>())
}

/// `|f|`: the factor by which `f` scales Haar measure.
pub fn modulus(f: &LcaMorphism) -> Result<PositiveRational> {
    if !f.is_endomorphism() {
        return Err(LcaError::NotAnAutomorphism);
    }
    let an = Analysis::new(&[f.source()], &[(0, 0, f)]).ok_or(LcaError::Undecidable)?;
    if injective_surjective(&an, 0) != (true, true) {
        return Err(LcaError::NotAnAutomorphism);
    }
    let mut out = Rat::one();
    for fam in &an.families {
        let n = fam.n_cont[0];
        let d = det(&select_range(&an.lift(fam, 0), n, n));
        out *= abs_at(fam.family, &d);
    }
    Ok(PositiveRational(out))
}

/// The `c` with `μ_mid = c · (μ_sub ⊠ μ_quot)` for canonical measures.
pub fn seq_factor(seq: &ExactSequenceSpec) -> Result<PositiveRational> {
    match check_exact(seq)? {
        ExactVerdict::Exact => {}
        ExactVerdict::NotExact => return Err(LcaError::NotExact),
        ExactVerdict::Unknown => return Err(LcaError::Undecidable),
    }
    let an = Analysis::new(
        &[&seq.sub, &seq.mid, &seq.quot],
        &[(0, 1, &seq.monic), (1, 2, &seq.epic)],
    )
    .ok_or(LcaError::Undecidable)?;
    let mut out = Rat::one();
    for fam in &an.families {
        let (na, nb, nc) = (fam.n_cont[0], fam.n_cont[1], fam.n_cont[2]);
        let fp = select_range(&an.lift(fam, 0), nb, na);
        let fr = select_range(&an.lift(fam, 1), nc, nb);
        let mut cols: Vec<Vec<Rat>> = (0..na).map(|j| fp.col(j)).collect();
        for i in 0..nc {
            let mut e = vec![Rat::zero(); nc];
            e[i] = Rat::one();
            cols.push(solve(&fr, &e).ok_or(LcaError::NotExact)?);
        }
        if cols.len() != nb {
            return Err(LcaError::NotExact);
        }
        let d = det(&RatMat::from_cols(nb, &cols));
        if d.is_zero() {
            return Err(LcaError::NotExact);
        }
        out *= abs_at(fam.family, &d);
        if let Family::P(_) = fam.family {
            let (ca, cb, cc) =
                (an.finite_count(fam, 0), an.finite_count(fam, 1), an.finite_count(fam, 2));
            out *= Rat::new(cb, ca * cc);
        }
    }
    Ok(PositiveRational(out))
}

/// Automorphisms `(f, g, h)` of `(sub, mid, quot)` commuting with an exact sequence.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub seq: ExactSequenceSpec,
    pub f: LcaMorphism,
    pub g: LcaMorphism,
    pub h: LcaMorphism,
}

/// Checks `|g| = |f| · |h|` on a commuting ladder.
pub fn check_modulus_multiplicativity(ladder: &Ladder) -> Result<bool> {
    let Ladder { seq, f, g, h } = ladder;
    if check_exact(seq)? != ExactVerdict::Exact {
        return Err(LcaError::NotExact);
    }
    for (a, o, name) in [(f, &seq.sub, "f"), (g, &seq.mid, "g"), (h, &seq.quot, "h")] {
        if a.source() != o || a.target() != o {
            return Err(LcaError::ShapeMismatch(format!("{name} is not an endomorphism of {o}")));
        }
    }
    if compose(&seq.monic, g)? != compose(f, &seq.monic)?
        || compose(&seq.epic, h)? != compose(g, &seq.epic)?
    {
        return Err(LcaError::NotCommutative);
    }
    Ok(modulus(g)? == &modulus(f)? * &modulus(h)?)
}

/// The four measure factors around a filtration `G1 ↪ G2 ↪ G3`:
/// `[G1↪G3↠G3/G1, G2/G1↪G3/G1↠G3/G2, G2↪G3↠G3/G2, G1↪G2↠G2/G1]`.
pub fn det_square_factors(i: &LcaMorphism, j: &LcaMorphism) -> Result<[PositiveRational; 4]> {
    if i.target() != j.source() {
        return Err(LcaError::NotAFiltration(format!(
            "{} does not feed into {}",
            i.target(),
            j.source()
        )));
    }
    for (m, name) in [(i, "first"), (j, "second")] {
        if !classify(m).is_monic() {
            return Err(LcaError::NotAFiltration(format!("the {name} map is not an admissible monic")));
        }
    }
    let ji = compose(i, j)?;
    let (g1, g2, g3) = (i.source(), i.target(), j.target());
    let an = Analysis::new(&[g1, g2, g3], &[(0, 1, i), (1, 2, j), (0, 2, &ji)])
        .ok_or(LcaError::Undecidable)?;
    let c21 = cokernel(&an, 0);
    let c32 = cokernel(&an, 1);
    let c31 = cokernel(&an, 2);
    let q21 = from_primary(g2, &c21.object, &c21.psi)?;
    let q32 = from_primary(g3, &c32.object, &c32.psi)?;
    let q31 = from_primary(g3, &c31.object, &c31.psi)?;
    let a_lift = c31.psi.mul(&an.lifts[1]).mul(&c21.sigma);
    let a = from_primary(&c21.object, &c31.object, &a_lift)?;
    let b = from_primary(&c31.object, &c32.object, &c32.psi.mul(&c31.sigma))?;
    Ok([
        seq_factor(&ExactSequenceSpec::new(ji, q31))?,
        seq_factor(&ExactSequenceSpec::new(a, b))?,
        seq_factor(&ExactSequenceSpec::new(j.clone(), q32))?,
        seq_factor(&ExactSequenceSpec::new(i.clone(), q21))?,
    ])
}

/// Checks the associativity constraint on the measure factors of a filtration.
pub fn check_det_square(
    g1: &LcaObject,
    g2: &LcaObject,
    g3: &LcaObject,
    monics: (&LcaMorphism, &LcaMorphism),
) -> Result<bool> {
    let (i, j) = monics;
    if i.source() != g1 || i.target() != g2 || j.source() != g2 || j.target() != g3 {
        return Err(LcaError::NotAFiltration("maps do not match the objects".into()));
    }
    let [s1, s2, s3, s4] = det_square_factors(i, j)?;
    Ok(&s1 * &s2 == &s3 * &s4)
}

impl From<u64> for PositiveRational {
    fn from(n: u64) -> Self {
        assert!(n > 0);
        PositiveRational(rat_int(n.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn m(s: &str) -> LcaMorphism {
        s.parse().unwrap()
    }

    fn pr(n: i64, d: i64) -> PositiveRational {
        PositiveRational::new(rat(n, d)).unwrap()
    }

    fn factor(a: &str, b: &str) -> PositiveRational {
        seq_factor(&ExactSequenceSpec::new(m(a), m(b))).unwrap()
    }

    #[test]
    fn moduli() {
        assert_eq!(modulus(&m("[R -> R] { (R,R): -1 }")).unwrap(), pr(1, 1));
        assert_eq!(modulus(&m("[Qp(5) -> Qp(5)] { (Qp,Qp): 5 }")).unwrap(), pr(1, 5));
        assert_eq!(modulus(&m("[R -> R] { (R,R): 3 }")).unwrap(), pr(3, 1));
        let compact = m("[T^2 + Z/6 + Zp(5) -> T^2 + Z/6 + Zp(5)] \
                         { (T,T): 2 1; 1 1, (F,F): 5, (Zp,Zp): 2/3 }");
        assert_eq!(modulus(&compact).unwrap(), pr(1, 1));
        let mixed = m("[R^2 + T -> R^2 + T] { (R,R): 1 2; 0 3, (R,T): 1/2 1, (T,T): -1 }");
        assert_eq!(modulus(&mixed).unwrap(), pr(3, 1));
        assert!(matches!(modulus(&m("[R -> R] { (R,R): 0 }")), Err(LcaError::NotAnAutomorphism)));
        assert!(matches!(modulus(&m("[Z -> R] { (Z,R): 1 }")), Err(LcaError::NotAnAutomorphism)));
    }

    #[test]
    fn sequence_factors() {
        assert_eq!(factor("[Z -> R] { (Z,R): 1 }", "[R -> T] { (R,T): 1 }"), pr(1, 1));
        assert_eq!(factor("[Z -> R] { (Z,R): 2 }", "[R -> T] { (R,T): 1/2 }"), pr(2, 1));
        assert_eq!(factor("[Zp(3) -> Qp(3)] { (Zp,Qp): 1 }", "[Qp(3) -> Pr(3)] { (Qp,Pr): 1 }"), pr(1, 1));
        assert_eq!(factor("[Zp(3) -> Qp(3)] { (Zp,Qp): 3 }", "[Qp(3) -> Pr(3)] { (Qp,Pr): 1/3 }"), pr(1, 3));
        assert_eq!(factor("[0 -> R] {}", "[R -> R] { (R,R): 1 }"), pr(1, 1));
        assert_eq!(factor("[0 -> Qp(3)] {}", "[Qp(3) -> Qp(3)] { (Qp,Qp): 3 }"), pr(3, 1));
        assert_eq!(factor("[Z/2 -> T] { (F,T): 1/2 }", "[T -> T] { (T,T): 2 }"), pr(1, 2));
        assert_eq!(factor("[Zp(3) -> Zp(3)] { (Zp,Zp): 3 }", "[Zp(3) -> Z/3] { (Zp,F): 1 }"), pr(1, 3));
        assert_eq!(factor("[Z -> Z] { (Z,Z): 2 }", "[Z -> Z/2] { (Z,F): 1 }"), pr(1, 1));
    }

    #[test]
    fn modulus_is_inverse_of_degenerate_factor() {
        let f = m("[R^2 -> R^2] { (R,R): 1 2; 3 4 }");
        let s = seq_factor(&ExactSequenceSpec::new(m("[0 -> R^2] {}"), f.clone())).unwrap();
        assert_eq!(modulus(&f).unwrap(), s.recip());
    }

    #[test]
    fn ladders() {
        let seq = ExactSequenceSpec::new(m("[Z -> R] { (Z,R): 1 }"), m("[R -> T] { (R,T): 1 }"));
        let ladder = Ladder {
            seq,
            f: m("[Z -> Z] { (Z,Z): -1 }"),
            g: m("[R -> R] { (R,R): -1 }"),
            h: m("[T -> T] { (T,T): -1 }"),
        };
        assert!(check_modulus_multiplicativity(&ladder).unwrap());
        let bad = Ladder { h: m("[T -> T] { (T,T): 1 }"), ..ladder };
        assert!(matches!(check_modulus_multiplicativity(&bad), Err(LcaError::NotCommutative)));
        let p = 3;
        let seq = ExactSequenceSpec::new(
            m("[Zp(3) -> Qp(3)] { (Zp,Qp): 1 }"),
            m("[Qp(3) -> Pr(3)] { (Qp,Pr): 1 }"),
        );
        let a = rat(1 + p, 1);
        let ladder = Ladder {
            seq,
            f: LcaMorphism::scalar(&"Zp(3)".parse().unwrap(), &a).unwrap(),
            g: LcaMorphism::scalar(&"Qp(3)".parse().unwrap(), &a).unwrap(),
            h: LcaMorphism::scalar(&"Pr(3)".parse().unwrap(), &a).unwrap(),
        };
        assert!(check_modulus_multiplicativity(&ladder).unwrap());
    }

    #[test]
    fn det_squares() {
        let z: LcaObject = "Z".parse().unwrap();
        let r: LcaObject = "R".parse().unwrap();
        let i = m("[Z -> R] { (Z,R): 1 }");
        assert!(check_det_square(&z, &r, &r, (&i, &LcaMorphism::identity(&r))).unwrap());
        let two = m("[Z -> Z] { (Z,Z): 2 }");
        assert!(check_det_square(&z, &z, &r, (&two, &i)).unwrap());
        let [s1, s2, s3, s4] = det_square_factors(&two, &i).unwrap();
        assert_eq!((s1, s2, s3, s4), (pr(2, 1), pr(1, 2), pr(1, 1), pr(1, 1)));
        let zp: LcaObject = "Zp(5)".parse().unwrap();
        let qp: LcaObject = "Qp(5)".parse().unwrap();
        let a = m("[Zp(5) -> Zp(5)] { (Zp,Zp): 5 }");
        let b = m("[Zp(5) -> Qp(5)] { (Zp,Qp): 1/5 }");
        assert!(check_det_square(&zp, &zp, &qp, (&a, &b)).unwrap());
        assert!(matches!(
            check_det_square(&r, &r, &r, (&m("[R -> R] { (R,R): 0 }"), &LcaMorphism::identity(&r))),
            Err(LcaError::NotAFiltration(_))
        ));
    }
}

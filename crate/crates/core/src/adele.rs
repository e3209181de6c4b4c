//! Truncated adeles `R + Qp(p_1) + ... + Qp(p_k)` and the product formula.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::arith::{factorize, fmt_rat, padic_abs, Rat};
use crate::error::{LcaError, Result};
use crate::haar::{modulus, PositiveRational};
use crate::morphism::LcaMorphism;
use crate::object::LcaObject;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdeleTruncation {
    pub places: BTreeSet<u64>,
    pub object: LcaObject,
}

pub fn adele_object(places: &BTreeSet<u64>) -> AdeleTruncation {
    let object = places
        .iter()
        .fold(LcaObject::real(1), |acc, &p| acc.sum(&LcaObject::qp(p, 1)));
    AdeleTruncation { places: places.clone(), object }
}

/// The primes dividing the numerator or denominator of `x`.
pub fn support(x: &Rat) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for n in [x.numer(), x.denom()] {
        for (p, _) in factorize(n) {
            out.insert(p);
        }
    }
    out
}

/// Modulus of multiplication by `x` on the truncation at `places`.
pub fn idele_modulus(x: &Rat, places: &BTreeSet<u64>) -> Result<PositiveRational> {
    if x.is_zero() {
        return Err(LcaError::NotAnAutomorphism);
    }
    if let Some(&p) = support(x).difference(places).next() {
        return Err(LcaError::SupportNotCovered(p));
    }
    modulus(&LcaMorphism::scalar(&adele_object(places).object, x)?)
}

/// Local factors `(place, |x|_v)`, the archimedean place first as `0`.
pub fn local_factors(x: &Rat) -> Vec<(u64, Rat)> {
    let mut out = vec![(0, num_traits::Signed::abs(x))];
    out.extend(support(x).into_iter().map(|p| (p, padic_abs(x, p))));
    out
}

pub fn product_formula_check(x: &Rat) -> bool {
    !x.is_zero() && idele_modulus(x, &support(x)).is_ok_and(|m| m.is_one())
}

/// Human-readable local factors and their product.
pub fn product_formula_report(x: &Rat) -> Result<String> {
    let m = idele_modulus(x, &support(x))?;
    let mut out = String::new();
    for (p, v) in local_factors(x) {
        let place = if p == 0 { "inf".to_string() } else { p.to_string() };
        out.push_str(&format!("|{}|_{place} = {}\n", fmt_rat(x), fmt_rat(&v)));
    }
    out.push_str(&format!("product = {m}\n"));
    Ok(out)
}

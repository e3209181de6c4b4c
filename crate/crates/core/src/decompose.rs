//! Canonical decompositions of objects into exact sequences.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{LcaError, Result};
use crate::exact::ExactSequenceSpec;
use crate::linalg::RatMat;
use crate::morphism::LcaMorphism;
use crate::object::{Kind, LcaObject, PadicKind};

/// `rows × cols` with ones at `(offset + j, j)`.
fn shifted_identity(rows: usize, cols: usize, row_offset: usize, col_offset: usize, n: usize) -> RatMat {
    let mut m = RatMat::zeros(rows, cols);
    for k in 0..n {
        m[(row_offset + k, col_offset + k)] = One::one();
    }
    m
}

fn identity_on(src: &LcaObject, dst: &LcaObject, kinds: &[Kind]) -> Vec<((Kind, Kind), RatMat)> {
    kinds
        .iter()
        .map(|&k| {
            let n = src.mult(k);
            ((k, k), shifted_identity(dst.mult(k), n, 0, 0, n))
        })
        .collect()
}

/// `H ↪ g ↠ D` with `H` compactly generated (each `Qp` replaced by its unit ball) and `D` discrete.
pub fn decompose_cg_discrete(g: &LcaObject) -> ExactSequenceSpec {
    let mut h = LcaObject::real(g.real_rank())
        .sum(&LcaObject::lattice(g.lattice_rank()))
        .sum(&LcaObject::torus(g.torus_rank()))
        .sum(&LcaObject::finite(g.finite_part()));
    let mut d = LcaObject::zero();
    for (&p, r) in g.padic_parts() {
        h = h.sum(&LcaObject::zp(p, r.zp + r.qp));
        d = d.sum(&LcaObject::pruefer(p, r.qp + r.pr));
    }
    let mut mono = identity_on(&h, g, &[Kind::R, Kind::Z, Kind::T, Kind::Fin]);
    let mut epi = Vec::new();
    for (&p, r) in g.padic_parts() {
        let (zp, qp, pr) = (Kind::zp(p), Kind::qp(p), Kind::pr(p));
        let nh = r.zp + r.qp;
        mono.push(((zp, zp), shifted_identity(r.zp, nh, 0, 0, r.zp)));
        mono.push(((zp, qp), shifted_identity(r.qp, nh, 0, r.zp, r.qp)));
        let nd = r.qp + r.pr;
        epi.push(((qp, pr), shifted_identity(nd, r.qp, 0, 0, r.qp)));
        epi.push(((pr, pr), shifted_identity(nd, r.pr, r.qp, 0, r.pr)));
    }
    let monic = LcaMorphism::new(h, g.clone(), mono).expect("valid inclusion");
    let epic = LcaMorphism::new(g.clone(), d, epi).expect("valid projection");
    ExactSequenceSpec::new(monic, epic)
}

/// `C ↪ g ↠ R^n + Z^m` with `C` the maximal compact subgroup of a compactly generated `g`.
pub fn compact_part(g: &LcaObject) -> Result<ExactSequenceSpec> {
    if !g.predicates().is_compactly_generated {
        return Err(LcaError::NotCompactlyGenerated);
    }
    let mut c = LcaObject::torus(g.torus_rank()).sum(&LcaObject::finite(g.finite_part()));
    let mut compact_kinds = vec![Kind::T, Kind::Fin];
    let zps: BTreeMap<u64, usize> = g.padic_parts().iter().map(|(&p, r)| (p, r.zp)).collect();
    for (&p, &n) in &zps {
        c = c.sum(&LcaObject::padic(p, PadicKind::Zp, n));
        compact_kinds.push(Kind::zp(p));
    }
    let w = LcaObject::real(g.real_rank()).sum(&LcaObject::lattice(g.lattice_rank()));
    let monic = LcaMorphism::new(c.clone(), g.clone(), identity_on(&c, g, &compact_kinds))
        .expect("valid inclusion");
    let epic = LcaMorphism::new(g.clone(), w.clone(), identity_on(g, &w, &[Kind::R, Kind::Z]))
        .expect("valid projection");
    Ok(ExactSequenceSpec::new(monic, epic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{check_exact, ExactVerdict};

    fn o(s: &str) -> LcaObject {
        s.parse().unwrap()
    }

    #[test]
    fn cg_discrete() {
        let s = decompose_cg_discrete(&o("Qp(3)"));
        assert_eq!((s.sub.clone(), s.quot.clone()), (o("Zp(3)"), o("Pr(3)")));
        assert_eq!(check_exact(&s).unwrap(), ExactVerdict::Exact);
        let s = decompose_cg_discrete(&o("R + T"));
        assert_eq!((s.sub.clone(), s.quot.clone()), (o("R + T"), o("0")));
        let s = decompose_cg_discrete(&o("Pr(5)"));
        assert_eq!((s.sub.clone(), s.quot.clone()), (o("0"), o("Pr(5)")));
        let g = o("R + Z^2 + Z/4 + Qp(2)^2 + Zp(2) + Pr(2) + Qp(3)");
        let s = decompose_cg_discrete(&g);
        assert_eq!(s.sub, o("R + Z^2 + Z/4 + Zp(2)^3 + Zp(3)"));
        assert_eq!(s.quot, o("Pr(2)^3 + Pr(3)"));
        assert_eq!(check_exact(&s).unwrap(), ExactVerdict::Exact);
    }

    #[test]
    fn compact_parts() {
        let s = compact_part(&o("R + Z + T^2 + Z/3")).unwrap();
        assert_eq!((s.sub.clone(), s.quot.clone()), (o("T^2 + Z/3"), o("R + Z")));
        assert_eq!(check_exact(&s).unwrap(), ExactVerdict::Exact);
        let s = compact_part(&o("Z^3")).unwrap();
        assert_eq!((s.sub, s.quot), (o("0"), o("Z^3")));
        assert!(matches!(compact_part(&o("Qp(2)")), Err(LcaError::NotCompactlyGenerated)));
        let s = compact_part(&o("Zp(7)^2 + Z")).unwrap();
        assert_eq!(check_exact(&s).unwrap(), ExactVerdict::Exact);
    }
}

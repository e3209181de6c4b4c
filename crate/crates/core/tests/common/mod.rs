//! Random samplers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use lcakit::arith::{Int, Rat};
use lcakit::linalg::RatMat;
use lcakit::nenashev::{Computed, DoubleSes, ThreeByThree};
use lcakit::{ExactSequenceSpec, Kind, LcaMorphism, LcaObject, PadicKind};
use num_integer::Integer;
use num_traits::{One, Signed};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const PRIMES: [u64; 4] = [2, 3, 5, 7];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn nonzero_rational(r: &mut ChaCha8Rng, height: i64) -> Rat {
    let n = loop {
        let n = r.gen_range(-height..=height);
        if n != 0 {
            break n;
        }
    };
    q(n, r.gen_range(1..=height))
}

/// `|x|_p` by counting factors of `p`, without the library's arithmetic.
pub fn p_abs(x: &Rat, p: u64) -> Rat {
    let p = Int::from(p);
    let count = |mut n: Int| {
        let mut v = 0i32;
        while n.is_multiple_of(&p) {
            n /= &p;
            v += 1;
        }
        v
    };
    let v = count(x.numer().abs()) - count(x.denom().clone());
    let pv = Rat::from_integer(num_traits::pow(p, v.unsigned_abs() as usize));
    if v >= 0 {
        pv.recip()
    } else {
        pv
    }
}

pub fn random_object(r: &mut ChaCha8Rng) -> LcaObject {
    let mut text = vec![
        format!("R^{}", r.gen_range(0..=2)),
        format!("Z^{}", r.gen_range(0..=2)),
        format!("T^{}", r.gen_range(0..=2)),
    ];
    for _ in 0..r.gen_range(0..=2) {
        text.push(format!("Z/{}", r.gen_range(2..=12)));
    }
    for p in [2u64, 3, 5] {
        if r.gen_bool(0.4) {
            for name in ["Qp", "Zp", "Pr"] {
                text.push(format!("{name}({p})^{}", r.gen_range(0..=1)));
            }
        }
    }
    text.join(" + ").parse().expect("sampled objects parse")
}

/// A matrix in `GL_n(Z)`: random elementary operations, signs and a permutation.
pub fn unimodular(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n == 0 {
        return m;
    }
    for _ in 0..2 * n {
        let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
        if i != j {
            let c = r.gen_range(-2..=2);
            for k in 0..n {
                m[i][k] += c * m[j][k];
            }
        }
    }
    for row in m.iter_mut() {
        if r.gen_bool(0.5) {
            row.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let a = r.gen_range(0..n);
    m.swap(0, a);
    m
}

pub fn int_mat(m: &[Vec<i64>]) -> RatMat {
    let n = m.len();
    let cols = m.first().map_or(0, Vec::len);
    RatMat::from_rows(n, cols, m.iter().map(|row| row.iter().map(|&x| q(x, 1)).collect()).collect())
}

fn diag_times(a: &RatMat, d: &[Rat]) -> RatMat {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] = &a[(i, j)] * &d[j];
        }
    }
    out
}

/// `U · diag(d) · V` with `U, V` unimodular; its determinant is `±Π d`.
pub fn invertible(r: &mut ChaCha8Rng, d: &[Rat]) -> RatMat {
    let n = d.len();
    let u = int_mat(&unimodular(r, n));
    let v = int_mat(&unimodular(r, n));
    diag_times(&u, d).mul(&v)
}

/// A rational coprime to `p` in numerator and denominator.
pub fn p_unit(r: &mut ChaCha8Rng, p: u64) -> Rat {
    let pick = |r: &mut ChaCha8Rng| loop {
        let n = r.gen_range(1..=30i64);
        if n % p as i64 != 0 {
            break n;
        }
    };
    let sign = if r.gen_bool(0.5) { 1 } else { -1 };
    q(sign * pick(r), pick(r))
}

/// A random automorphism together with its modulus computed from the diagonal factors.
pub struct Auto {
    pub f: LcaMorphism,
    pub expected_modulus: Rat,
}

/// Block-triangular automorphism: invertible diagonal blocks, plus random shears
/// `Z → R`, `R → T`, `Z → T` when `shear` is set.
pub fn random_automorphism(r: &mut ChaCha8Rng, g: &LcaObject, shear: bool) -> Auto {
    let mut blocks: BTreeMap<(Kind, Kind), RatMat> = BTreeMap::new();
    let mut expected = Rat::one();
    for k in g.kinds() {
        let n = g.mult(k);
        let m = match k {
            Kind::R => {
                let d: Vec<Rat> = (0..n).map(|_| nonzero_rational(r, 9)).collect();
                for x in &d {
                    expected *= x.abs();
                }
                invertible(r, &d)
            }
            Kind::Z | Kind::T => int_mat(&unimodular(r, n)),
            Kind::Fin => {
                let lcm = g.finite_part().iter().fold(Int::one(), |a, b| a.lcm(b));
                let u = loop {
                    let u = Int::from(r.gen_range(1..=50i64));
                    if u.gcd(&lcm).is_one() {
                        break u;
                    }
                };
                let mut m = RatMat::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = Rat::from_integer(u.clone());
                }
                m
            }
            Kind::Padic(p, PadicKind::Qp) => {
                let d: Vec<Rat> = (0..n).map(|_| nonzero_rational(r, 30)).collect();
                for x in &d {
                    expected *= p_abs(x, p);
                }
                invertible(r, &d)
            }
            Kind::Padic(p, _) => {
                let d: Vec<Rat> = (0..n).map(|_| p_unit(r, p)).collect();
                invertible(r, &d)
            }
        };
        blocks.insert((k, k), m);
    }
    if shear {
        for (s, t) in [(Kind::Z, Kind::R), (Kind::R, Kind::T), (Kind::Z, Kind::T)] {
            let (ns, nt) = (g.mult(s), g.mult(t));
            if ns > 0 && nt > 0 && r.gen_bool(0.5) {
                let rows = (0..nt).map(|_| (0..ns).map(|_| q(r.gen_range(-5..=5), r.gen_range(1..=4))).collect()).collect();
                blocks.insert((s, t), RatMat::from_rows(nt, ns, rows));
            }
        }
    }
    let f = LcaMorphism::new(g.clone(), g.clone(), blocks).expect("sampled automorphism is valid");
    Auto { f, expected_modulus: expected }
}

/// Coordinates of `a` come first in every component of `a + b`; neither may share a finite part.
pub fn inclusion(a: &LcaObject, b: &LcaObject) -> LcaMorphism {
    let s = a.sum(b);
    let blocks: Vec<_> = a.kinds().into_iter().map(|k| {
        let mut m = RatMat::zeros(s.mult(k), a.mult(k));
        for i in 0..a.mult(k) {
            m[(i, i)] = Rat::one();
        }
        ((k, k), m)
    }).collect();
    LcaMorphism::new(a.clone(), s, blocks).unwrap()
}

pub fn projection(a: &LcaObject, b: &LcaObject) -> LcaMorphism {
    let s = a.sum(b);
    let blocks: Vec<_> = b.kinds().into_iter().map(|k| {
        let off = a.mult(k);
        let mut m = RatMat::zeros(b.mult(k), s.mult(k));
        for i in 0..b.mult(k) {
            m[(i, off + i)] = Rat::one();
        }
        ((k, k), m)
    }).collect();
    LcaMorphism::new(s, b.clone(), blocks).unwrap()
}

/// `[[f, x], [0, h]]` on `a + b`, where `x: b → a` may be absent.
pub fn triangular(f: &LcaMorphism, h: &LcaMorphism, x: Option<&LcaMorphism>) -> LcaMorphism {
    let (a, b) = (f.source().clone(), h.source().clone());
    let s = a.sum(&b);
    let mut blocks: BTreeMap<(Kind, Kind), RatMat> = BTreeMap::new();
    let mut put = |src: Kind, dst: Kind, m: &RatMat, row_off: usize, col_off: usize| {
        let e = blocks.entry((src, dst)).or_insert_with(|| RatMat::zeros(s.mult(dst), s.mult(src)));
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                e[(row_off + i, col_off + j)] = m[(i, j)].clone();
            }
        }
    };
    for (&(src, dst), m) in f.blocks() {
        put(src, dst, m, 0, 0);
    }
    for (&(src, dst), m) in h.blocks() {
        put(src, dst, m, a.mult(dst), a.mult(src));
    }
    if let Some(x) = x {
        for (&(src, dst), m) in x.blocks() {
            put(src, dst, m, 0, a.mult(src));
        }
    }
    LcaMorphism::new(s.clone(), s, blocks).unwrap()
}

/// An object with no finite part and small ranks.
pub fn random_free_object(r: &mut ChaCha8Rng) -> LcaObject {
    let mut text = vec![
        format!("R^{}", r.gen_range(0..=2)),
        format!("Z^{}", r.gen_range(0..=1)),
        format!("T^{}", r.gen_range(0..=1)),
    ];
    let p = PRIMES[r.gen_range(0..PRIMES.len())];
    for name in ["Qp", "Zp", "Pr"] {
        text.push(format!("{name}({p})^{}", r.gen_range(0..=1)));
    }
    text.join(" + ").parse().unwrap()
}

/// A random morphism `b → a` using only blocks the table allows between the components present.
pub fn random_cross(r: &mut ChaCha8Rng, b: &LcaObject, a: &LcaObject) -> LcaMorphism {
    let mut blocks = Vec::new();
    for s in b.kinds() {
        for t in a.kinds() {
            let safe = matches!((s, t), (Kind::R, Kind::R) | (Kind::Z, Kind::Z) | (Kind::Z, Kind::R) | (Kind::R, Kind::T) | (Kind::T, Kind::T))
                || matches!((s, t), (Kind::Padic(p, PadicKind::Qp), Kind::Padic(p2, PadicKind::Qp)) if p == p2);
            if safe && r.gen_bool(0.5) {
                let (ns, nt) = (b.mult(s), a.mult(t));
                let rows = (0..nt).map(|_| (0..ns).map(|_| q(r.gen_range(-3..=3), 1)).collect()).collect();
                blocks.push(((s, t), RatMat::from_rows(nt, ns, rows)));
            }
        }
    }
    LcaMorphism::new(b.clone(), a.clone(), blocks).unwrap()
}

/// A commuting ladder of automorphisms over an exact sequence, in one of several shapes.
pub struct SampledLadder {
    pub seq: ExactSequenceSpec,
    pub f: LcaMorphism,
    pub g: LcaMorphism,
    pub h: LcaMorphism,
}

pub fn random_ladder(r: &mut ChaCha8Rng) -> SampledLadder {
    match r.gen_range(0..4) {
        0 => {
            let a = random_free_object(r);
            let b = random_free_object(r);
            let f = random_automorphism(r, &a, false).f;
            let h = random_automorphism(r, &b, false).f;
            let x = random_cross(r, &b, &a);
            let seq = ExactSequenceSpec::new(inclusion(&a, &b), projection(&a, &b));
            let g = triangular(&f, &h, Some(&x));
            SampledLadder { seq, f, g, h }
        }
        1 => {
            let n = r.gen_range(1..=3);
            let phi = int_mat(&unimodular(r, n));
            let id = RatMat::identity(n);
            let (zn, rn, tn) = (LcaObject::lattice(n), LcaObject::real(n), LcaObject::torus(n));
            let seq = ExactSequenceSpec::new(
                LcaMorphism::single(zn.clone(), rn.clone(), Kind::Z, Kind::R, id.clone()).unwrap(),
                LcaMorphism::single(rn.clone(), tn.clone(), Kind::R, Kind::T, id).unwrap(),
            );
            let on = |g: &LcaObject, k: Kind| LcaMorphism::single(g.clone(), g.clone(), k, k, phi.clone()).unwrap();
            SampledLadder { f: on(&zn, Kind::Z), g: on(&rn, Kind::R), h: on(&tn, Kind::T), seq }
        }
        2 => {
            let p = PRIMES[r.gen_range(0..PRIMES.len())];
            let u = p_unit(r, p);
            let seq = ExactSequenceSpec::new(
                format!("[Zp({p}) -> Qp({p})] {{ (Zp,Qp): 1 }}").parse().unwrap(),
                format!("[Qp({p}) -> Pr({p})] {{ (Qp,Pr): 1 }}").parse().unwrap(),
            );
            let s = |g: &LcaObject| LcaMorphism::scalar(g, &u).unwrap();
            SampledLadder { f: s(&seq.sub), g: s(&seq.mid), h: s(&seq.quot), seq }
        }
        _ => {
            let m = r.gen_range(2..=20i64);
            let sign = if r.gen_bool(0.5) { 1 } else { -1 };
            let seq = ExactSequenceSpec::new(
                format!("[Z -> Z] {{ (Z,Z): {m} }}").parse().unwrap(),
                format!("[Z -> Z/{m}] {{ (Z,F): 1 }}").parse().unwrap(),
            );
            let f: LcaMorphism = format!("[Z -> Z] {{ (Z,Z): {sign} }}").parse().unwrap();
            let h: LcaMorphism = format!("[Z/{m} -> Z/{m}] {{ (F,F): {sign} }}").parse().unwrap();
            SampledLadder { g: f.clone(), f, h, seq }
        }
    }
}

/// A filtration `G1 ↪ G2 ↪ G3` given by its two monics.
pub fn random_filtration(r: &mut ChaCha8Rng) -> (LcaMorphism, LcaMorphism) {
    match r.gen_range(0..3) {
        0 => {
            let n = r.gen_range(1..=3);
            let d: Vec<Rat> = (0..n).map(|_| q(r.gen_range(1..=6), 1)).collect();
            let a = invertible(r, &d);
            let e: Vec<Rat> = (0..n).map(|_| nonzero_rational(r, 7)).collect();
            let b = invertible(r, &e);
            let (zn, rn) = (LcaObject::lattice(n), LcaObject::real(n));
            (
                LcaMorphism::single(zn.clone(), zn.clone(), Kind::Z, Kind::Z, a).unwrap(),
                LcaMorphism::single(zn, rn, Kind::Z, Kind::R, b).unwrap(),
            )
        }
        1 => {
            let p = PRIMES[r.gen_range(0..PRIMES.len())];
            let n = r.gen_range(1..=2);
            let d: Vec<Rat> = (0..n).map(|_| q(num_traits::pow(p as i64, r.gen_range(0..=2)), 1)).collect();
            let a = invertible(r, &d);
            let e: Vec<Rat> = (0..n).map(|_| nonzero_rational(r, 12)).collect();
            let b = invertible(r, &e);
            let (zn, qn) = (LcaObject::zp(p, n), LcaObject::qp(p, n));
            let kz = Kind::zp(p);
            (
                LcaMorphism::single(zn.clone(), zn.clone(), kz, kz, a).unwrap(),
                LcaMorphism::single(zn, qn, kz, Kind::qp(p), b).unwrap(),
            )
        }
        _ => {
            let a = random_free_object(r);
            let b = random_free_object(r);
            let c = random_free_object(r);
            let ab = a.sum(&b);
            (inclusion(&a, &b), inclusion(&ab, &c))
        }
    }
}

/// The ladder as a 3×3 diagram: rows are the automorphism classes, columns the sequence twice.
pub fn ladder_diagram(l: &SampledLadder) -> ThreeByThree<Computed> {
    let b = Computed;
    let z = LcaObject::zero();
    let zero_to = |g: &LcaObject| LcaMorphism::zero(z.clone(), g.clone());
    let row = |g: &LcaObject, f: &LcaMorphism| {
        DoubleSes::new(&b, (zero_to(g), f.clone()), (zero_to(g), LcaMorphism::identity(g)))
    };
    let zz = LcaMorphism::zero(z.clone(), z.clone());
    let zero_col = DoubleSes::new(&b, (zz.clone(), zz.clone()), (zz.clone(), zz));
    let seq_col = || {
        DoubleSes::new(&b, (l.seq.monic.clone(), l.seq.epic.clone()), (l.seq.monic.clone(), l.seq.epic.clone()))
    };
    ThreeByThree {
        rows: [row(&l.seq.sub, &l.f), row(&l.seq.mid, &l.g), row(&l.seq.quot, &l.h)],
        cols: [zero_col, seq_col(), seq_col()],
    }
}

/// Rows and columns exchanged; yin and yang keep their roles.
pub fn transpose(d: &ThreeByThree<Computed>) -> ThreeByThree<Computed> {
    ThreeByThree { rows: d.cols.clone(), cols: d.rows.clone() }
}

pub fn random_gl2(r: &mut ChaCha8Rng) -> [[i64; 2]; 2] {
    let m = unimodular(r, 2);
    [[m[0][0], m[0][1]], [m[1][0], m[1][1]]]
}

//! Decision procedures on covers.
//!
//! Every finite coordinate is split into prime-power (primary) coordinates.
//! Coordinates linked by nonzero matrix entries are grouped into families:
//! the archimedean family (`R`, `Z`, `T`, finite) and one family per prime
//! (`Qp`, `Zp`, `Pr`, p-primary finite). Within a family an object is a quotient
//! `X / L` of a cover `X = V × D`, where `V` is a vector space over `R` or
//! `Qp` (coordinates `R, T` or `Qp, Pr`) and `D` is free over `Z` or `Zp`
//! (coordinates `Z, F` or `Zp, F`); `L` is spanned by the unit vectors of the
//! circle coordinates and by `p^a e` on a finite coordinate of order `p^a`.
//! Morphisms lift to rational matrices between covers, and injectivity,
//! surjectivity and exactness become subgroup containments in the covers.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{factorize, mod_floor, mod_inverse, pow_int, rat_int, Int, Rat};
use crate::error::Result;
use crate::linalg::{
    clear_denominators, integer_kernel, inverse, lattice_basis, left_nullspace, nullspace, rank,
    smith, solve, span_basis, to_rat, IntMat, RatMat,
};
use crate::morphism::{normalize_entry, LcaMorphism};
use crate::object::{Kind, LcaObject, PadicKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Family {
    Arch,
    P(u64),
}

impl Family {
    fn is_unit(self, g: &Int) -> bool {
        match self {
            Family::Arch => g.is_one(),
            Family::P(p) => !g.is_zero() && !g.is_multiple_of(&Int::from(p)),
        }
    }
}

/// One primary coordinate of an object.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Coord {
    pub kind: Kind,
    /// Index among the coordinates of `kind` in the object (for `Fin`, the invariant factor).
    pub index: usize,
    /// For finite coordinates, the prime and exponent of the primary part.
    pub prime: u64,
    pub exp: u32,
}

impl Coord {
    pub fn order(&self) -> Option<Int> {
        (self.kind == Kind::Fin).then(|| pow_int(self.prime, self.exp))
    }

    fn label(&self) -> Option<Family> {
        match self.kind {
            Kind::R | Kind::Z | Kind::T => Some(Family::Arch),
            Kind::Padic(p, _) => Some(Family::P(p)),
            Kind::Fin => None,
        }
    }

    fn is_cont(&self) -> bool {
        matches!(self.kind, Kind::R | Kind::T | Kind::Padic(_, PadicKind::Qp | PadicKind::Pr))
    }

    /// Generator of the cover lattice on this coordinate, if any.
    fn lattice(&self) -> Option<Rat> {
        match self.kind {
            Kind::T | Kind::Padic(_, PadicKind::Pr) => Some(Rat::one()),
            Kind::Fin => Some(rat_int(pow_int(self.prime, self.exp))),
            _ => None,
        }
    }
}

/// Primary coordinates of an object in canonical order.
pub(crate) fn frame(g: &LcaObject) -> Vec<Coord> {
    let mut out = Vec::new();
    for k in g.kinds() {
        for index in 0..g.mult(k) {
            if k == Kind::Fin {
                for (prime, exp) in factorize(&g.finite_part()[index]) {
                    out.push(Coord { kind: k, index, prime, exp });
                }
            } else {
                out.push(Coord { kind: k, index, prime: 0, exp: 0 });
            }
        }
    }
    out
}

/// CRT idempotent of the `p^a`-part of `Z/d`.
fn idempotent(d: &Int, p: u64, a: u32) -> Int {
    let q = pow_int(p, a);
    let r = d / &q;
    let u = mod_inverse(&r, &q).expect("coprime cofactor");
    mod_floor(&(r * u), d)
}

fn positions(fr: &[Coord], kind: Kind, index: usize) -> Vec<usize> {
    fr.iter()
        .enumerate()
        .filter(|(_, c)| c.kind == kind && c.index == index)
        .map(|(i, _)| i)
        .collect()
}

/// The morphism as a matrix between primary frames (rows: target coordinates).
pub(crate) fn to_primary(f: &LcaMorphism) -> RatMat {
    let (fs, ft) = (frame(f.source()), frame(f.target()));
    let mut m = RatMat::zeros(ft.len(), fs.len());
    for (&(s, t), block) in f.blocks() {
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                let c = &block[(i, j)];
                if c.is_zero() {
                    continue;
                }
                for a in positions(&fs, s, j) {
                    let ca = &fs[a];
                    let mut v = c.clone();
                    if s == Kind::Fin {
                        v *= rat_int(idempotent(&f.source().finite_part()[j], ca.prime, ca.exp));
                    }
                    for b in positions(&ft, t, i) {
                        let cb = &ft[b];
                        let mut w = v.clone();
                        if t == Kind::Fin {
                            w = rat_int(mod_floor(&w.to_integer(), &cb.order().expect("finite")));
                        }
                        m[(b, a)] = normalize_entry(s, t, &w, ca.order().as_ref(), cb.order().as_ref())
                            .expect("primary parts of a valid block are valid");
                    }
                }
            }
        }
    }
    m
}

/// Reassembles a morphism from a matrix between primary frames.
pub(crate) fn from_primary(src: &LcaObject, dst: &LcaObject, m: &RatMat) -> Result<LcaMorphism> {
    let (fs, ft) = (frame(src), frame(dst));
    let mut blocks: BTreeMap<(Kind, Kind), RatMat> = BTreeMap::new();
    for b in 0..ft.len() {
        for a in 0..fs.len() {
            let v = &m[(b, a)];
            if v.is_zero() {
                continue;
            }
            let (cs, ct) = (&fs[a], &ft[b]);
            let mut w = v.clone();
            if ct.kind == Kind::Fin {
                w *= rat_int(idempotent(&dst.finite_part()[ct.index], ct.prime, ct.exp));
            }
            let e = blocks
                .entry((cs.kind, ct.kind))
                .or_insert_with(|| RatMat::zeros(dst.mult(ct.kind), src.mult(cs.kind)));
            e[(ct.index, cs.index)] = &e[(ct.index, cs.index)] + w;
        }
    }
    LcaMorphism::new(src.clone(), dst.clone(), blocks)
}

/// Family decomposition of a diagram of objects and maps.
pub(crate) struct Analysis {
    pub frames: Vec<Vec<Coord>>,
    pub lifts: Vec<RatMat>,
    pub maps: Vec<(usize, usize)>,
    pub families: Vec<FamilyView>,
}

pub(crate) struct FamilyView {
    pub family: Family,
    /// Per object: frame positions in cover order (continuous first).
    pub coords: Vec<Vec<usize>>,
    pub n_cont: Vec<usize>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let n = parent[y];
        parent[y] = r;
        y = n;
    }
    r
}

impl Analysis {
    /// `None` when some linked component mixes two families.
    pub fn new(objects: &[&LcaObject], maps: &[(usize, usize, &LcaMorphism)]) -> Option<Analysis> {
        let frames: Vec<Vec<Coord>> = objects.iter().map(|g| frame(g)).collect();
        let mut offset = Vec::with_capacity(frames.len());
        let mut total = 0;
        for fr in &frames {
            offset.push(total);
            total += fr.len();
        }
        let mut parent: Vec<usize> = (0..total).collect();
        let mut lifts = Vec::new();
        for &(a, b, f) in maps {
            debug_assert_eq!(f.source(), objects[a]);
            debug_assert_eq!(f.target(), objects[b]);
            let m = to_primary(f);
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if !m[(i, j)].is_zero() {
                        let (x, y) = (find(&mut parent, offset[b] + i), find(&mut parent, offset[a] + j));
                        parent[x] = y;
                    }
                }
            }
            lifts.push(m);
        }
        let mut label: BTreeMap<usize, Family> = BTreeMap::new();
        for (o, fr) in frames.iter().enumerate() {
            for (i, c) in fr.iter().enumerate() {
                if let Some(l) = c.label() {
                    let root = find(&mut parent, offset[o] + i);
                    match label.get(&root) {
                        Some(&old) if old != l => return None,
                        _ => {
                            label.insert(root, l);
                        }
                    }
                }
            }
        }
        let mut fams: BTreeMap<Family, Vec<Vec<usize>>> = BTreeMap::new();
        for (o, fr) in frames.iter().enumerate() {
            for i in 0..fr.len() {
                let root = find(&mut parent, offset[o] + i);
                let l = label.get(&root).copied().unwrap_or(Family::Arch);
                fams.entry(l).or_insert_with(|| vec![Vec::new(); frames.len()])[o].push(i);
            }
        }
        let families = fams
            .into_iter()
            .map(|(family, mut coords)| {
                let mut n_cont = Vec::new();
                for (o, cs) in coords.iter_mut().enumerate() {
                    cs.sort_by_key(|&i| (!frames[o][i].is_cont(), i));
                    n_cont.push(cs.iter().filter(|&&i| frames[o][i].is_cont()).count());
                }
                FamilyView { family, coords, n_cont }
            })
            .collect();
        Some(Analysis { frames, lifts, maps: maps.iter().map(|&(a, b, _)| (a, b)).collect(), families })
    }

    pub fn lift(&self, fam: &FamilyView, map: usize) -> RatMat {
        let (a, b) = self.maps[map];
        self.lifts[map].select(&fam.coords[b], &fam.coords[a])
    }

    pub fn space(&self, fam: &FamilyView, obj: usize) -> Space {
        Space { family: fam.family, dim: fam.coords[obj].len(), n_cont: fam.n_cont[obj] }
    }

    pub fn lattice(&self, fam: &FamilyView, obj: usize) -> Sub {
        let sp = self.space(fam, obj);
        let gens = fam.coords[obj]
            .iter()
            .enumerate()
            .filter_map(|(k, &i)| {
                self.frames[obj][i].lattice().map(|g| {
                    let mut v = vec![Rat::zero(); sp.dim];
                    v[k] = g;
                    v
                })
            })
            .collect();
        Sub { space: sp, w: Vec::new(), gens }
    }

    pub fn full(&self, fam: &FamilyView, obj: usize) -> Sub {
        let sp = self.space(fam, obj);
        let unit = |k: usize| {
            let mut v = vec![Rat::zero(); sp.dim];
            v[k] = Rat::one();
            v
        };
        Sub { space: sp, w: (0..sp.n_cont).map(unit).collect(), gens: (sp.n_cont..sp.dim).map(unit).collect() }
    }

    /// Product over the frame positions of a family of the finite orders.
    pub fn finite_count(&self, fam: &FamilyView, obj: usize) -> Int {
        fam.coords[obj].iter().filter_map(|&i| self.frames[obj][i].order()).product()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Space {
    pub family: Family,
    pub dim: usize,
    pub n_cont: usize,
}

/// The subgroup `W + span(gens)` of a cover, with `W` a rational subspace of
/// the continuous coordinates (extended to real or p-adic scalars) and the
/// span taken over `Z` or `Z_(p)`.
#[derive(Clone, Debug)]
pub(crate) struct Sub {
    pub space: Space,
    pub w: Vec<Vec<Rat>>,
    pub gens: Vec<Vec<Rat>>,
}

/// Projection killing a subspace of the continuous coordinates; identity on
/// the discrete ones. Returns the matrix and the number of continuous rows.
fn quotient_projection(sp: Space, w: &[Vec<Rat>]) -> (RatMat, usize) {
    let nc = sp.n_cont;
    let ann: Vec<Vec<Rat>> = if w.is_empty() {
        (0..nc)
            .map(|i| {
                let mut v = vec![Rat::zero(); nc];
                v[i] = Rat::one();
                v
            })
            .collect()
    } else {
        let wm = RatMat::from_cols(nc, &w.iter().map(|v| v[..nc].to_vec()).collect::<Vec<_>>());
        left_nullspace(&wm)
    };
    let k = ann.len();
    let nd = sp.dim - nc;
    let mut pi = RatMat::zeros(k + nd, sp.dim);
    for (r, y) in ann.iter().enumerate() {
        for (c, x) in y.iter().enumerate() {
            pi[(r, c)] = x.clone();
        }
    }
    for i in 0..nd {
        pi[(k + i, nc + i)] = Rat::one();
    }
    (pi, k)
}

/// Whether `x` lies in the span of `gens` over the family's ring.
fn in_span(fam: Family, gens: &[Vec<Rat>], x: &[Rat]) -> bool {
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let mut cols = gens.to_vec();
    cols.push(x.to_vec());
    let (_, ints) = clear_denominators(&cols);
    let a = IntMat::from_cols(x.len(), &ints);
    let g = integer_kernel(&a).iter().fold(Int::zero(), |g, k| g.gcd(&k[cols.len() - 1]));
    fam.is_unit(&g)
}

impl Sub {
    pub fn sum(&self, other: &Sub) -> Sub {
        let mut w = self.w.clone();
        w.extend(other.w.iter().cloned());
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Sub { space: self.space, w: span_basis(self.space.dim, &w), gens }
    }

    pub fn contains_vec(&self, x: &[Rat]) -> bool {
        let (pi, _) = quotient_projection(self.space, &self.w);
        let gens: Vec<Vec<Rat>> = self.gens.iter().map(|g| pi.mul_vec(g)).collect();
        in_span(self.space.family, &gens, &pi.mul_vec(x))
    }

    pub fn contains(&self, other: &Sub) -> bool {
        if !other.w.is_empty() {
            let mut both = self.w.clone();
            both.extend(other.w.iter().cloned());
            if rank(&RatMat::from_rows(both.len(), self.space.dim, both.clone()))
                != rank(&RatMat::from_rows(self.w.len(), self.space.dim, self.w.clone()))
            {
                return false;
            }
        }
        other.gens.iter().all(|g| self.contains_vec(g))
    }

    /// Image under a cover map `f` (rows: target coordinates).
    pub fn image(&self, f: &RatMat, target: Space) -> Sub {
        let w: Vec<Vec<Rat>> = self.w.iter().map(|v| f.mul_vec(v)).collect();
        Sub {
            space: target,
            w: span_basis(target.dim, &w),
            gens: self.gens.iter().map(|v| f.mul_vec(v)).collect(),
        }
    }

    /// Preimage under a cover map `f` from `source`.
    pub fn preimage(&self, f: &RatMat, source: Space) -> Sub {
        let (pi, _) = quotient_projection(self.space, &self.w);
        let m = pi.mul(f);
        let gamma: Vec<Vec<Rat>> = self.gens.iter().map(|g| pi.mul_vec(g)).collect();
        let nc = source.n_cont;
        let nd = source.dim - nc;
        let rows: Vec<usize> = (0..m.rows()).collect();
        let mc = m.select(&rows, &(0..nc).collect::<Vec<_>>());
        let md = m.select(&rows, &(nc..source.dim).collect::<Vec<_>>());
        let w: Vec<Vec<Rat>> = nullspace(&mc)
            .into_iter()
            .map(|mut v| {
                v.resize(source.dim, Rat::zero());
                v
            })
            .collect();
        let phi = left_nullspace(&mc);
        let ng = gamma.len();
        let gm = RatMat::from_cols(m.rows(), &gamma);
        // unknowns (z, λ): Φ (M_d z - Γ λ) = 0
        let kernel: Vec<Vec<Int>> = if phi.is_empty() {
            (0..nd + ng)
                .map(|i| {
                    let mut v = vec![Int::zero(); nd + ng];
                    v[i] = Int::one();
                    v
                })
                .collect()
        } else {
            let phim = RatMat::from_rows(phi.len(), m.rows(), phi);
            let a = phim.mul(&md).hcat(&phim.mul(&gm).map(|x| -x));
            let (_, rows_int) = clear_denominators(&a.row_vecs());
            let ai = IntMat::from_rows(a.rows(), a.cols(), rows_int);
            integer_kernel(&ai)
        };
        let gens = kernel
            .into_iter()
            .map(|k| {
                let z: Vec<Rat> = k[..nd].iter().cloned().map(rat_int).collect();
                let lam: Vec<Rat> = k[nd..].iter().cloned().map(rat_int).collect();
                let rhs: Vec<Rat> = gm
                    .mul_vec(&lam)
                    .into_iter()
                    .zip(md.mul_vec(&z))
                    .map(|(a, b)| a - b)
                    .collect();
                let mut v = solve(&mc, &rhs).expect("solvable by construction");
                v.extend(z);
                v
            })
            .collect();
        Sub { space: source, w, gens }
    }
}

/// Injectivity and surjectivity of one map of an analysis, family by family.
pub(crate) fn injective_surjective(an: &Analysis, map: usize) -> (bool, bool) {
    let (a, b) = an.maps[map];
    let mut inj = true;
    let mut surj = true;
    for fam in &an.families {
        let f = an.lift(fam, map);
        let (sa, sb) = (an.space(fam, a), an.space(fam, b));
        let lb = an.lattice(fam, b);
        if inj && !an.lattice(fam, a).contains(&lb.preimage(&f, sa)) {
            inj = false;
        }
        if surj && !an.full(fam, a).image(&f, sb).sum(&lb).contains(&an.full(fam, b)) {
            surj = false;
        }
    }
    (inj, surj)
}

/// `ker(second) ⊆ im(first) + lattice` in every family, for consecutive maps.
pub(crate) fn kernel_in_image(an: &Analysis, first: usize, second: usize) -> bool {
    let (a, b) = an.maps[first];
    let (b2, c) = an.maps[second];
    debug_assert_eq!(b, b2);
    an.families.iter().all(|fam| {
        let (fp, fr) = (an.lift(fam, first), an.lift(fam, second));
        let ker = an.lattice(fam, c).preimage(&fr, an.space(fam, b));
        let im = an.full(fam, a).image(&fp, an.space(fam, b)).sum(&an.lattice(fam, b));
        im.contains(&ker)
    })
}

/// A cokernel `q : B → Q` with lifts of `q` and of a section, both between primary frames.
pub(crate) struct Cokernel {
    pub object: LcaObject,
    pub psi: RatMat,
    pub sigma: RatMat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OutKind {
    Vector,
    Circle,
    Free,
    Torsion(u64, u32),
}

struct FamilyQuotient {
    family: Family,
    kinds: Vec<OutKind>,
    psi: RatMat,
    sigma: RatMat,
}

fn family_quotient(an: &Analysis, fam: &FamilyView, map: usize) -> FamilyQuotient {
    let (a, b) = an.maps[map];
    let sb = an.space(fam, b);
    let f = an.lift(fam, map);
    let s = an.full(fam, a).image(&f, sb).sum(&an.lattice(fam, b));
    let (nc, nd) = (sb.n_cont, sb.dim - sb.n_cont);
    let (pi, k) = quotient_projection(sb, &s.w);
    let y = pi.select(&(0..k).collect::<Vec<_>>(), &(0..nc).collect::<Vec<_>>());
    let mut gamma: Vec<Vec<Rat>> = s.gens.iter().map(|g| pi.mul_vec(g)).collect();
    // make the discrete parts integral by unit scalings
    for g in gamma.iter_mut() {
        let den = g[k..].iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
        let den = rat_int(den);
        for x in g.iter_mut() {
            *x = &*x * &den;
        }
    }
    let m = gamma.len();
    let gd = IntMat::from_cols(nd, &gamma.iter().map(|g| g[k..].iter().map(|x| x.to_integer()).collect()).collect::<Vec<_>>());
    let sm = smith(&gd);
    let u = to_rat(&sm.u);
    let uinv = inverse(&u).expect("unimodular");
    let v = to_rat(&sm.v);
    let gcols = RatMat::from_cols(k + nd, &gamma).mul(&v);
    let r = sm.rank();
    // shear columns and the purely continuous generators
    let mut sh = RatMat::zeros(k, nd);
    for j in 0..r {
        let d = rat_int(sm.diag[j].clone());
        for i in 0..k {
            sh[(i, j)] = &gcols[(i, j)] / &d;
        }
    }
    let pure: Vec<Vec<Rat>> = (r..m).map(|j| (0..k).map(|i| gcols[(i, j)].clone()).collect()).collect();
    let basis = lattice_basis(k, &pure);
    let c = basis.len();
    let mut cols = basis.clone();
    for i in 0..k {
        if cols.len() == k {
            break;
        }
        let mut e = vec![Rat::zero(); k];
        e[i] = Rat::one();
        let mut trial = cols.clone();
        trial.push(e);
        if rank(&RatMat::from_cols(k, &trial)) == trial.len() {
            cols = trial;
        }
    }
    let bm = RatMat::from_cols(k, &cols);
    let binv = inverse(&bm).expect("basis");
    let yr_cols: Vec<Vec<Rat>> = (0..k)
        .map(|i| {
            let mut e = vec![Rat::zero(); k];
            e[i] = Rat::one();
            solve(&y, &e).expect("full row rank")
        })
        .collect();
    let yr = RatMat::from_cols(nc, &yr_cols);

    let mut kinds = Vec::new();
    let mut psi_rows: Vec<Vec<Rat>> = Vec::new();
    let mut sigma_cols: Vec<Vec<Rat>> = Vec::new();
    // continuous rows: B^{-1} [Y | -Sh U]
    let shu = sh.mul(&u);
    for i in 0..k {
        let mut row = vec![Rat::zero(); sb.dim];
        for j in 0..nc {
            let mut acc = Rat::zero();
            for l in 0..k {
                acc += &binv[(i, l)] * &y[(l, j)];
            }
            row[j] = acc;
        }
        for j in 0..nd {
            let mut acc = Rat::zero();
            for l in 0..k {
                acc -= &binv[(i, l)] * &shu[(l, j)];
            }
            row[nc + j] = acc;
        }
        let bcol = bm.col(i);
        let mut col = yr.mul_vec(&bcol);
        col.resize(sb.dim, Rat::zero());
        kinds.push(if i < c { OutKind::Circle } else { OutKind::Vector });
        psi_rows.push(row);
        sigma_cols.push(col);
    }
    for j in 0..nd {
        let d = sm.diag.get(j).cloned().unwrap_or_else(Int::zero);
        let urow: Vec<Rat> = u.row(j).to_vec();
        let mut row = vec![Rat::zero(); sb.dim];
        row[nc..].clone_from_slice(&urow);
        let section = |scale: &Rat| {
            let mut col: Vec<Rat> = yr.mul_vec(&sh.col(j)).into_iter().map(|x| x * scale).collect();
            col.extend(uinv.col(j).into_iter().map(|x| x * scale));
            col
        };
        if j >= r {
            kinds.push(OutKind::Free);
            psi_rows.push(row);
            sigma_cols.push(section(&Rat::one()));
            continue;
        }
        let parts: Vec<(u64, u32)> = match fam.family {
            Family::Arch => factorize(&d),
            Family::P(p) => {
                let e = crate::arith::int_valuation(&d, p);
                if e == 0 {
                    Vec::new()
                } else {
                    vec![(p, e)]
                }
            }
        };
        for (q, e) in parts {
            let idem = match fam.family {
                Family::Arch => idempotent(&d, q, e),
                Family::P(_) => Int::one(),
            };
            kinds.push(OutKind::Torsion(q, e));
            psi_rows.push(row.clone());
            sigma_cols.push(section(&rat_int(idem)));
        }
    }
    let n = kinds.len();
    FamilyQuotient {
        family: fam.family,
        kinds,
        psi: RatMat::from_rows(n, sb.dim, psi_rows),
        sigma: RatMat::from_cols(sb.dim, &sigma_cols),
    }
}

/// Cokernel of one map of the analysis.
pub(crate) fn cokernel(an: &Analysis, map: usize) -> Cokernel {
    let (_, b) = an.maps[map];
    let fqs: Vec<(usize, FamilyQuotient)> =
        an.families.iter().enumerate().map(|(i, fam)| (i, family_quotient(an, fam, map))).collect();
    let mut object = LcaObject::zero();
    let mut orders = Vec::new();
    for (_, fq) in &fqs {
        for k in &fq.kinds {
            let piece = match (fq.family, k) {
                (Family::Arch, OutKind::Vector) => LcaObject::real(1),
                (Family::Arch, OutKind::Circle) => LcaObject::torus(1),
                (Family::Arch, OutKind::Free) => LcaObject::lattice(1),
                (Family::P(p), OutKind::Vector) => LcaObject::qp(p, 1),
                (Family::P(p), OutKind::Circle) => LcaObject::pruefer(p, 1),
                (Family::P(p), OutKind::Free) => LcaObject::zp(p, 1),
                (_, OutKind::Torsion(q, e)) => {
                    orders.push(pow_int(*q, *e));
                    LcaObject::zero()
                }
            };
            object = object.sum(&piece);
        }
    }
    object = object.sum(&LcaObject::finite(&orders));
    let fq_frame = frame(&object);
    // assign output rows to frame positions
    let mut used = vec![false; fq_frame.len()];
    let mut take = |pred: &dyn Fn(&Coord) -> bool| -> usize {
        let i = (0..fq_frame.len()).find(|&i| !used[i] && pred(&fq_frame[i])).expect("slot");
        used[i] = true;
        i
    };
    let nb = an.frames[b].len();
    let mut psi = RatMat::zeros(fq_frame.len(), nb);
    let mut sigma = RatMat::zeros(nb, fq_frame.len());
    // torsion slots are matched by (prime, exponent) in ascending order
    let mut torsion: Vec<(u64, u32, usize, usize)> = Vec::new();
    for (fi, fq) in &fqs {
        for (r, k) in fq.kinds.iter().enumerate() {
            if let OutKind::Torsion(q, e) = k {
                torsion.push((*q, *e, *fi, r));
            }
        }
    }
    torsion.sort();
    let mut slot_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(q, e, fi, r) in &torsion {
        let i = take(&|c: &Coord| c.kind == Kind::Fin && c.prime == q && c.exp == e);
        slot_of.insert((fi, r), i);
    }
    for (fi, fq) in &fqs {
        let fam = &an.families[*fi];
        for (r, k) in fq.kinds.iter().enumerate() {
            let slot = match (fq.family, k) {
                (_, OutKind::Torsion(..)) => slot_of[&(*fi, r)],
                (Family::Arch, OutKind::Vector) => take(&|c: &Coord| c.kind == Kind::R),
                (Family::Arch, OutKind::Circle) => take(&|c: &Coord| c.kind == Kind::T),
                (Family::Arch, OutKind::Free) => take(&|c: &Coord| c.kind == Kind::Z),
                (Family::P(p), OutKind::Vector) => take(&|c: &Coord| c.kind == Kind::qp(p)),
                (Family::P(p), OutKind::Circle) => take(&|c: &Coord| c.kind == Kind::pr(p)),
                (Family::P(p), OutKind::Free) => take(&|c: &Coord| c.kind == Kind::zp(p)),
            };
            for (l, &pos) in fam.coords[b].iter().enumerate() {
                psi[(slot, pos)] = fq.psi[(r, l)].clone();
                sigma[(pos, slot)] = fq.sigma[(l, r)].clone();
            }
        }
    }
    Cokernel { object, psi, sigma }
}

//! Continuous homomorphisms as block matrices of exact rational parameters.
//!
//! A block `(S, V)` holds a matrix with one row per coordinate of the target
//! component `V` and one column per coordinate of the source component `S`.
//! Entries are stored in a normal form that depends on the pair of kinds:
//!
//! | block                                   | parameter                          |
//! |-----------------------------------------|------------------------------------|
//! | R→R, R→T, Z→R, Z→Qp, Zp→Qp, Qp→Qp, Qp→Pr, Qp→T | any rational                |
//! | Z→Z, T→T                                | integer                            |
//! | Z→T                                     | rational mod 1                     |
//! | Z→F                                     | integer mod d                      |
//! | F→F                                     | integer c, d_t divides c·d_s, mod d_t |
//! | F→T                                     | c with d_s·c integral, mod 1       |
//! | F→Pr, Z→Pr, Zp→Pr, Zp→T                 | rational mod Z_(p)                 |
//! | Z→Zp, Zp→Zp, Pr→Pr, Pr→T                | p-integral rational                |
//! | Zp→F                                    | element of the p-primary part of Z/d |
//!
//! A p-adic parameter `c` on `Qp → T`, `Zp → T` or `Pr → T` means
//! `x ↦ χ(c·x)` for the standard character `χ : Qp → Qp/Zp ⊂ T`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{
    fmt_rat, frac_mod_one, frac_p, int_valuation, is_p_integral, mod_floor, mod_inverse,
    parse_rat, pow_int, rat_int, to_int, Int, Rat,
};
use crate::error::{LcaError, Result};
use crate::linalg::RatMat;
use crate::object::{parse_object, Cursor, Kind, LcaObject, PadicKind};

use Kind::{Fin, Padic, R, T, Z};
use PadicKind::{Pr, Qp, Zp};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LcaMorphism {
    source: LcaObject,
    target: LcaObject,
    blocks: BTreeMap<(Kind, Kind), RatMat>,
}

/// Whether the pair `(source kind, target kind)` admits nonzero maps.
pub fn block_allowed(s: Kind, t: Kind) -> bool {
    match (s, t) {
        (R, R) | (R, T) | (T, T) => true,
        (Z, _) => true,
        (Fin, Fin) | (Fin, T) | (Fin, Padic(_, Pr)) => true,
        (Padic(_, Zp), T) | (Padic(_, Zp), Fin) => true,
        (Padic(_, Qp), T) | (Padic(_, Pr), T) => true,
        (Padic(p, a), Padic(q, b)) => {
            p == q
                && matches!(
                    (a, b),
                    (Zp, Zp) | (Zp, Qp) | (Zp, Pr) | (Qp, Qp) | (Qp, Pr) | (Pr, Pr)
                )
        }
        _ => false,
    }
}

/// The p-primary part of `Z/d` is `r·Z/d` with `d = r·p^v`; returns `(r, p^v)`.
fn primary_split(d: &Int, p: u64) -> (Int, Int) {
    let q = pow_int(p, int_valuation(d, p));
    (d / &q, q)
}

/// Normal form of one entry of block `(s, t)`; `ds`, `dt` are the cyclic
/// orders of the source and target coordinates when they are finite.
pub fn normalize_entry(
    s: Kind,
    t: Kind,
    q: &Rat,
    ds: Option<&Int>,
    dt: Option<&Int>,
) -> std::result::Result<Rat, String> {
    if q.is_zero() {
        return Ok(Rat::zero());
    }
    if !block_allowed(s, t) {
        return Err("only the zero map is continuous here".into());
    }
    let integer = |q: &Rat| to_int(q).ok_or_else(|| format!("{} is not an integer", fmt_rat(q)));
    let p_integral = |q: &Rat, p: u64| {
        if is_p_integral(q, p) {
            Ok(q.clone())
        } else {
            Err(format!("{} is not {p}-integral", fmt_rat(q)))
        }
    };
    match (s, t) {
        (Z, Z) | (T, T) => integer(q).map(rat_int),
        (Z, T) => Ok(frac_mod_one(q)),
        (Z, Fin) => {
            let d = dt.expect("finite target");
            Ok(rat_int(mod_floor(&integer(q)?, d)))
        }
        (Fin, Fin) => {
            let (d_s, d_t) = (ds.expect("finite source"), dt.expect("finite target"));
            let c = integer(q)?;
            if !(&c * d_s).is_multiple_of(d_t) {
                return Err(format!("1 ↦ {c} is not well defined from Z/{d_s} to Z/{d_t}"));
            }
            Ok(rat_int(mod_floor(&c, d_t)))
        }
        (Fin, T) => {
            let d_s = ds.expect("finite source");
            if !(q * rat_int(d_s.clone())).is_integer() {
                return Err(format!("{} is not {d_s}-torsion in T", fmt_rat(q)));
            }
            Ok(frac_mod_one(q))
        }
        (Fin, Padic(p, Pr)) => {
            let d_s = ds.expect("finite source");
            if !is_p_integral(&(q * rat_int(d_s.clone())), p) {
                return Err(format!("{} is not {d_s}-torsion in Pr({p})", fmt_rat(q)));
            }
            Ok(frac_p(q, p))
        }
        (Z, Padic(p, Zp)) | (Padic(p, Zp), Padic(_, Zp)) | (Padic(p, Pr), Padic(_, Pr)) => {
            p_integral(q, p)
        }
        (Padic(p, Pr), T) => p_integral(q, p),
        (Z, Padic(p, Pr)) | (Padic(p, Zp), Padic(_, Pr)) | (Padic(p, Zp), T) => Ok(frac_p(q, p)),
        (Padic(p, Zp), Fin) => {
            let d_t = dt.expect("finite target");
            let e = integer(q)?;
            let (r, _) = primary_split(d_t, p);
            if !e.is_multiple_of(&r) {
                return Err(format!("{e} is not in the {p}-primary part of Z/{d_t}"));
            }
            Ok(rat_int(mod_floor(&e, d_t)))
        }
        _ => Ok(q.clone()),
    }
}

fn coord_orders(g: &LcaObject, k: Kind) -> Vec<Option<Int>> {
    if k == Fin {
        g.finite_part().iter().cloned().map(Some).collect()
    } else {
        vec![None; g.mult(k)]
    }
}

impl LcaMorphism {
    /// Validates and normalizes every block; zero blocks are dropped.
    pub fn new(
        source: LcaObject,
        target: LcaObject,
        blocks: impl IntoIterator<Item = ((Kind, Kind), RatMat)>,
    ) -> Result<Self> {
        let mut out = BTreeMap::new();
        for ((s, t), m) in blocks {
            let name = format!("{},{}", s.label(), t.label());
            let (ns, nt) = (source.mult(s), target.mult(t));
            if m.rows() != nt || m.cols() != ns {
                return Err(LcaError::ShapeMismatch(format!(
                    "block ({name}) is {}x{}, expected {nt}x{ns}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.is_zero() {
                continue;
            }
            let os = coord_orders(&source, s);
            let ot = coord_orders(&target, t);
            let mut n = m.clone();
            for i in 0..nt {
                for j in 0..ns {
                    n[(i, j)] = normalize_entry(s, t, &m[(i, j)], os[j].as_ref(), ot[i].as_ref())
                        .map_err(|e| LcaError::InvalidBlock(name.clone(), e))?;
                }
            }
            if !n.is_zero() {
                if out.contains_key(&(s, t)) {
                    return Err(LcaError::InvalidBlock(name, "block given twice".into()));
                }
                out.insert((s, t), n);
            }
        }
        Ok(LcaMorphism { source, target, blocks: out })
    }

    pub fn zero(source: LcaObject, target: LcaObject) -> Self {
        LcaMorphism { source, target, blocks: BTreeMap::new() }
    }

    pub fn identity(g: &LcaObject) -> Self {
        let blocks = g.kinds().into_iter().map(|k| ((k, k), RatMat::identity(g.mult(k))));
        Self::new(g.clone(), g.clone(), blocks).expect("identity blocks are valid")
    }

    /// Multiplication by `q` on every coordinate of a component-homogeneous object.
    pub fn scalar(g: &LcaObject, q: &Rat) -> Result<Self> {
        let blocks = g.kinds().into_iter().map(|k| {
            let n = g.mult(k);
            let mut m = RatMat::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = q.clone();
            }
            ((k, k), m)
        });
        Self::new(g.clone(), g.clone(), blocks)
    }

    /// A morphism with a single block.
    pub fn single(
        source: LcaObject,
        target: LcaObject,
        s: Kind,
        t: Kind,
        m: RatMat,
    ) -> Result<Self> {
        Self::new(source, target, [((s, t), m)])
    }

    pub fn source(&self) -> &LcaObject {
        &self.source
    }

    pub fn target(&self) -> &LcaObject {
        &self.target
    }

    pub fn blocks(&self) -> &BTreeMap<(Kind, Kind), RatMat> {
        &self.blocks
    }

    /// The block `(s, t)`, zero when absent.
    pub fn block(&self, s: Kind, t: Kind) -> RatMat {
        self.blocks
            .get(&(s, t))
            .cloned()
            .unwrap_or_else(|| RatMat::zeros(self.target.mult(t), self.source.mult(s)))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    /// `g ∘ f`, where `f = self`.
    pub fn then(&self, g: &LcaMorphism) -> Result<LcaMorphism> {
        compose(self, g)
    }

    /// Pointwise sum of two parallel morphisms.
    pub fn add(&self, other: &LcaMorphism) -> Result<LcaMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(LcaError::ShapeMismatch("sum of non-parallel morphisms".into()));
        }
        let mut blocks = self.blocks.clone();
        for (k, m) in &other.blocks {
            let e = blocks.entry(*k).or_insert_with(|| RatMat::zeros(m.rows(), m.cols()));
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    e[(i, j)] = &e[(i, j)] + &m[(i, j)];
                }
            }
        }
        LcaMorphism::new(self.source.clone(), self.target.clone(), blocks)
    }

    /// `n · self` for an integer `n`.
    pub fn scale(&self, n: &Int) -> LcaMorphism {
        let q = rat_int(n.clone());
        let blocks = self.blocks.iter().map(|(k, m)| (*k, m.map(|x| x * &q)));
        LcaMorphism::new(self.source.clone(), self.target.clone(), blocks)
            .expect("integer multiples stay in the table")
    }

    pub fn neg(&self) -> LcaMorphism {
        self.scale(&Int::from(-1))
    }

    /// The Pontryagin dual `target^∨ → source^∨`.
    pub fn dual(&self) -> LcaMorphism {
        let weight = |g: &LcaObject, k: Kind, i: usize| -> Rat {
            if k == Fin {
                Rat::new(Int::one(), g.finite_part()[i].clone())
            } else {
                Rat::one()
            }
        };
        let blocks = self.blocks.iter().map(|(&(s, u), m)| {
            let mut d = RatMat::zeros(m.cols(), m.rows());
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    d[(j, i)] =
                        &m[(i, j)] * weight(&self.target, u, i) / weight(&self.source, s, j);
                }
            }
            ((u.dual(), s.dual()), d)
        });
        LcaMorphism::new(self.target.dual(), self.source.dual(), blocks)
            .expect("the table is closed under duality")
    }
}

/// Composite `g ∘ f` (first `f`, then `g`).
pub fn compose(f: &LcaMorphism, g: &LcaMorphism) -> Result<LcaMorphism> {
    if f.target != g.source {
        return Err(LcaError::SourceTargetMismatch(f.target.to_string(), g.source.to_string()));
    }
    let mut acc: BTreeMap<(Kind, Kind), RatMat> = BTreeMap::new();
    for (&(s, u), fm) in &f.blocks {
        for (&(u2, v), gm) in &g.blocks {
            if u != u2 {
                continue;
            }
            let e = acc
                .entry((s, v))
                .or_insert_with(|| RatMat::zeros(g.target.mult(v), f.source.mult(s)));
            let p_term_into_t =
                v == T && u.prime().is_some() && matches!(s, Z | Fin | Padic(_, Zp));
            let zp_into_fin = v == Fin && matches!(u, Padic(_, Zp));
            for i in 0..gm.rows() {
                for j in 0..fm.cols() {
                    let mut sum = Rat::zero();
                    for k in 0..gm.cols() {
                        let (a, b) = (&gm[(i, k)], &fm[(k, j)]);
                        if a.is_zero() || b.is_zero() {
                            continue;
                        }
                        let term = if zp_into_fin {
                            let p = u.prime().expect("p-adic");
                            zp_act_on_primary(b, a, &g.target.finite_part()[i], p)
                        } else if p_term_into_t {
                            frac_p(&(a * b), u.prime().expect("p-adic"))
                        } else {
                            a * b
                        };
                        sum += term;
                    }
                    e[(i, j)] = &e[(i, j)] + sum;
                }
            }
        }
    }
    LcaMorphism::new(f.source.clone(), g.target.clone(), acc)
}

/// The element `a · e` of `Z/d`, where `a` is p-integral and `e` lies in the
/// p-primary part of `Z/d`.
fn zp_act_on_primary(a: &Rat, e: &Rat, d: &Int, p: u64) -> Rat {
    let (r, q) = primary_split(d, p);
    let e_int = e.to_integer();
    let e_red = &e_int / &r;
    let inv = mod_inverse(a.denom(), &q).expect("p-integral");
    let v = mod_floor(&(a.numer() * inv * e_red), &q);
    rat_int(r * v)
}

impl fmt::Display for LcaMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} -> {}] {{", self.source, self.target)?;
        if self.blocks.is_empty() {
            return f.write_str("}");
        }
        let mut first = true;
        for ((s, t), m) in &self.blocks {
            f.write_str(if first { " " } else { ", " })?;
            first = false;
            write!(f, "({},{}): ", s.label(), t.label())?;
            let rows: Vec<String> = (0..m.rows())
                .map(|i| m.row(i).iter().map(fmt_rat).collect::<Vec<_>>().join(" "))
                .collect();
            f.write_str(&rows.join("; "))?;
        }
        f.write_str(" }")
    }
}

impl fmt::Debug for LcaMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Sym(char),
    Arrow,
    Word(String),
}

fn tokenize(src: &str) -> Result<Vec<(usize, usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = (line, col);
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((start.0, start.1, Tok::Arrow));
            i += 2;
            col += 2;
        } else if "[]{}(),:;".contains(c) {
            out.push((start.0, start.1, Tok::Sym(c)));
            i += 1;
            col += 1;
        } else if c.is_ascii_alphanumeric() || c == '-' || c == '/' || c == '^' || c == '+' {
            let mut w = String::new();
            while i < chars.len() {
                let d = chars[i];
                if d.is_ascii_alphanumeric() || "/^+-".contains(d) {
                    if d == '-' && chars.get(i + 1) == Some(&'>') {
                        break;
                    }
                    w.push(d);
                    i += 1;
                    col += 1;
                } else {
                    break;
                }
            }
            out.push((start.0, start.1, Tok::Word(w)));
        } else {
            return Err(LcaError::parse(line, col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn parse_kind(
    word: &str,
    prime: Option<u64>,
    src: &LcaObject,
    dst: &LcaObject,
    at: (usize, usize),
) -> Result<Kind> {
    let pk = match word {
        "R" => return Ok(R),
        "Z" => return Ok(Z),
        "T" => return Ok(T),
        "F" | "Fin" => return Ok(Fin),
        "Qp" => Qp,
        "Zp" => Zp,
        "Pr" => Pr,
        _ => return Err(LcaError::parse(at.0, at.1, format!("unknown component '{word}'"))),
    };
    let p = match prime {
        Some(p) => p,
        None => {
            let mut ps: Vec<u64> = src.primes().chain(dst.primes()).collect();
            ps.sort_unstable();
            ps.dedup();
            match ps.as_slice() {
                [p] => *p,
                _ => {
                    return Err(LcaError::parse(
                        at.0,
                        at.1,
                        format!("'{word}' needs an explicit prime"),
                    ))
                }
            }
        }
    };
    Ok(Padic(p, pk))
}

impl FromStr for LcaMorphism {
    type Err = LcaError;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed_start = s.len() - s.trim_start().len();
        let body = s.trim_start();
        let (mut line, mut col) = (1, 1);
        for ch in s[..trimmed_start].chars() {
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        if !body.starts_with('[') {
            return Err(LcaError::parse(line, col, "expected '['"));
        }
        let close = body.find(']').ok_or_else(|| LcaError::parse(line, col, "missing ']'"))?;
        let header = &body[1..close];
        let arrow = header
            .find("->")
            .ok_or_else(|| LcaError::parse(line, col + 1, "expected 'src -> dst'"))?;
        let mut cs = Cursor::at(&header[..arrow], line, col + 1);
        let src = parse_object(&mut cs)?;
        if !cs.at_end() {
            return Err(cs.err("unexpected input in source object"));
        }
        let mut cd = Cursor::at(&header[arrow + 2..], line, col + 1 + arrow + 2);
        let dst = parse_object(&mut cd)?;
        if !cd.at_end() {
            return Err(cd.err("unexpected input in target object"));
        }
        let rest_col = col + close + 1;
        let toks = tokenize(&body[close + 1..])?;
        let toks: Vec<(usize, usize, Tok)> = toks
            .into_iter()
            .map(|(l, c, t)| if l == 1 { (line, rest_col + c - 1, t) } else { (line + l - 1, c, t) })
            .collect();
        parse_blocks(&toks, src, dst, (line, rest_col))
    }
}

fn parse_blocks(
    toks: &[(usize, usize, Tok)],
    src: LcaObject,
    dst: LcaObject,
    end: (usize, usize),
) -> Result<LcaMorphism> {
    let mut i = 0;
    let here = |i: usize| toks.get(i).map_or(end, |t| (t.0, t.1));
    let err = |i: usize, msg: &str| {
        let (l, c) = here(i);
        LcaError::parse(l, c, msg)
    };
    let sym = |i: usize, c: char| matches!(toks.get(i), Some((_, _, Tok::Sym(d))) if *d == c);
    if !sym(i, '{') {
        return Err(err(i, "expected '{'"));
    }
    i += 1;
    let mut blocks = Vec::new();
    while !sym(i, '}') {
        if !blocks.is_empty() {
            if !sym(i, ',') {
                return Err(err(i, "expected ',' or '}'"));
            }
            i += 1;
        }
        if !sym(i, '(') {
            return Err(err(i, "expected '('"));
        }
        i += 1;
        let mut kinds = Vec::new();
        for sep in [',', ')'] {
            let at = here(i);
            let Some((_, _, Tok::Word(w))) = toks.get(i) else {
                return Err(err(i, "expected a component label"));
            };
            i += 1;
            let mut prime = None;
            if sym(i, '(') {
                let Some((_, _, Tok::Word(n))) = toks.get(i + 1) else {
                    return Err(err(i + 1, "expected a prime"));
                };
                let p: u64 = n.parse().map_err(|_| err(i + 1, "expected a prime"))?;
                if !sym(i + 2, ')') {
                    return Err(err(i + 2, "expected ')'"));
                }
                prime = Some(p);
                i += 3;
            }
            kinds.push(parse_kind(w, prime, &src, &dst, at)?);
            if !sym(i, sep) {
                return Err(err(i, &format!("expected '{sep}'")));
            }
            i += 1;
        }
        if !sym(i, ':') {
            return Err(err(i, "expected ':'"));
        }
        i += 1;
        let (s, t) = (kinds[0], kinds[1]);
        let block_at = here(i);
        let mut rows: Vec<Vec<Rat>> = vec![Vec::new()];
        loop {
            match toks.get(i) {
                Some((_, _, Tok::Word(w))) => {
                    let q = parse_rat(w).ok_or_else(|| err(i, "expected a rational entry"))?;
                    rows.last_mut().expect("nonempty").push(q);
                    i += 1;
                }
                Some((_, _, Tok::Sym(';'))) => {
                    rows.push(Vec::new());
                    i += 1;
                }
                _ => break,
            }
        }
        let (nr, nc) = (dst.mult(t), src.mult(s));
        if rows.len() != nr || rows.iter().any(|r| r.len() != nc) {
            return Err(LcaError::parse(
                block_at.0,
                block_at.1,
                format!("block ({},{}) must be {nr}x{nc}", s.label(), t.label()),
            ));
        }
        blocks.push(((s, t), RatMat::from_rows(nr, nc, rows)));
    }
    i += 1;
    if i < toks.len() {
        return Err(err(i, "unexpected trailing input"));
    }
    LcaMorphism::new(src, dst, blocks)
}

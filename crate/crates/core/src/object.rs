//! Canonical forms of finitely structured LCA groups
//! `R^a + Z^b + T^c + F + sum_p (Qp^x + Zp^y + Pr^z)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, ToPrimitive};

use crate::abelian::invariant_factors;
use crate::arith::{is_prime, Int};
use crate::error::{LcaError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PadicKind {
    Qp,
    Zp,
    Pr,
}

/// A component type. The derived order is the canonical component order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    R,
    Z,
    T,
    Fin,
    Padic(u64, PadicKind),
}

impl Kind {
    pub fn qp(p: u64) -> Kind {
        Kind::Padic(p, PadicKind::Qp)
    }

    pub fn zp(p: u64) -> Kind {
        Kind::Padic(p, PadicKind::Zp)
    }

    pub fn pr(p: u64) -> Kind {
        Kind::Padic(p, PadicKind::Pr)
    }

    pub fn prime(self) -> Option<u64> {
        match self {
            Kind::Padic(p, _) => Some(p),
            _ => None,
        }
    }

    pub fn dual(self) -> Kind {
        match self {
            Kind::Z => Kind::T,
            Kind::T => Kind::Z,
            Kind::Padic(p, PadicKind::Zp) => Kind::pr(p),
            Kind::Padic(p, PadicKind::Pr) => Kind::zp(p),
            k => k,
        }
    }

    /// Label used in morphism text: `R`, `Z`, `T`, `F`, `Qp(p)`, `Zp(p)`, `Pr(p)`.
    pub fn label(self) -> String {
        match self {
            Kind::R => "R".into(),
            Kind::Z => "Z".into(),
            Kind::T => "T".into(),
            Kind::Fin => "F".into(),
            Kind::Padic(p, PadicKind::Qp) => format!("Qp({p})"),
            Kind::Padic(p, PadicKind::Zp) => format!("Zp({p})"),
            Kind::Padic(p, PadicKind::Pr) => format!("Pr({p})"),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Multiplicities of `Qp`, `Zp` and `Pr` at one prime.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PadicRanks {
    pub qp: usize,
    pub zp: usize,
    pub pr: usize,
}

impl PadicRanks {
    pub fn is_zero(&self) -> bool {
        self.qp == 0 && self.zp == 0 && self.pr == 0
    }

    pub fn get(&self, k: PadicKind) -> usize {
        match k {
            PadicKind::Qp => self.qp,
            PadicKind::Zp => self.zp,
            PadicKind::Pr => self.pr,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LcaObject {
    real_rank: usize,
    lattice_rank: usize,
    torus_rank: usize,
    finite_part: Vec<Int>,
    padic_parts: BTreeMap<u64, PadicRanks>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PredicateSet {
    pub is_compact: bool,
    pub is_discrete: bool,
    pub is_compactly_generated: bool,
    pub is_nss: bool,
    pub is_vector_module: bool,
    pub in_rc_class: bool,
    pub in_rd_class: bool,
}

impl fmt::Display for PredicateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("compact", self.is_compact),
            ("discrete", self.is_discrete),
            ("compactly-generated", self.is_compactly_generated),
            ("nss", self.is_nss),
            ("vector-module", self.is_vector_module),
            ("rc-class", self.in_rc_class),
            ("rd-class", self.in_rd_class),
        ];
        for (i, (name, v)) in rows.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{name}: {}", if *v { "yes" } else { "no" })?;
        }
        Ok(())
    }
}

impl LcaObject {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn real(n: usize) -> Self {
        LcaObject { real_rank: n, ..Self::default() }
    }

    pub fn lattice(n: usize) -> Self {
        LcaObject { lattice_rank: n, ..Self::default() }
    }

    pub fn torus(n: usize) -> Self {
        LcaObject { torus_rank: n, ..Self::default() }
    }

    /// `Z/n_1 + ... + Z/n_k`, normalized to invariant factors.
    pub fn finite(orders: &[Int]) -> Self {
        LcaObject { finite_part: invariant_factors(orders), ..Self::default() }
    }

    pub fn padic(p: u64, kind: PadicKind, n: usize) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        let mut r = PadicRanks::default();
        match kind {
            PadicKind::Qp => r.qp = n,
            PadicKind::Zp => r.zp = n,
            PadicKind::Pr => r.pr = n,
        }
        let mut o = Self::default();
        if !r.is_zero() {
            o.padic_parts.insert(p, r);
        }
        o
    }

    pub fn qp(p: u64, n: usize) -> Self {
        Self::padic(p, PadicKind::Qp, n)
    }

    pub fn zp(p: u64, n: usize) -> Self {
        Self::padic(p, PadicKind::Zp, n)
    }

    pub fn pruefer(p: u64, n: usize) -> Self {
        Self::padic(p, PadicKind::Pr, n)
    }

    /// Direct sum, normalized.
    pub fn sum(&self, other: &LcaObject) -> LcaObject {
        let mut orders = self.finite_part.clone();
        orders.extend(other.finite_part.iter().cloned());
        let mut padic = self.padic_parts.clone();
        for (&p, r) in &other.padic_parts {
            let e = padic.entry(p).or_default();
            e.qp += r.qp;
            e.zp += r.zp;
            e.pr += r.pr;
        }
        LcaObject {
            real_rank: self.real_rank + other.real_rank,
            lattice_rank: self.lattice_rank + other.lattice_rank,
            torus_rank: self.torus_rank + other.torus_rank,
            finite_part: invariant_factors(&orders),
            padic_parts: padic,
        }
    }

    pub fn real_rank(&self) -> usize {
        self.real_rank
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn finite_part(&self) -> &[Int] {
        &self.finite_part
    }

    pub fn padic_parts(&self) -> &BTreeMap<u64, PadicRanks> {
        &self.padic_parts
    }

    pub fn padic_ranks(&self, p: u64) -> PadicRanks {
        self.padic_parts.get(&p).copied().unwrap_or_default()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.padic_parts.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// Number of coordinates of a component (the number of cyclic factors for `Fin`).
    pub fn mult(&self, k: Kind) -> usize {
        match k {
            Kind::R => self.real_rank,
            Kind::Z => self.lattice_rank,
            Kind::T => self.torus_rank,
            Kind::Fin => self.finite_part.len(),
            Kind::Padic(p, pk) => self.padic_ranks(p).get(pk),
        }
    }

    /// Components with nonzero multiplicity, in canonical order.
    pub fn kinds(&self) -> Vec<Kind> {
        let mut out = Vec::new();
        for k in [Kind::R, Kind::Z, Kind::T, Kind::Fin] {
            if self.mult(k) > 0 {
                out.push(k);
            }
        }
        for (&p, r) in &self.padic_parts {
            for pk in [PadicKind::Qp, PadicKind::Zp, PadicKind::Pr] {
                if r.get(pk) > 0 {
                    out.push(Kind::Padic(p, pk));
                }
            }
        }
        out
    }

    /// Order of the finite group (1 when there is no finite part).
    pub fn finite_order(&self) -> Int {
        self.finite_part.iter().product()
    }

    pub fn dual(&self) -> LcaObject {
        LcaObject {
            real_rank: self.real_rank,
            lattice_rank: self.torus_rank,
            torus_rank: self.lattice_rank,
            finite_part: self.finite_part.clone(),
            padic_parts: self
                .padic_parts
                .iter()
                .map(|(&p, r)| (p, PadicRanks { qp: r.qp, zp: r.pr, pr: r.zp }))
                .collect(),
        }
    }

    pub fn predicates(&self) -> PredicateSet {
        let no_qp = self.padic_parts.values().all(|r| r.qp == 0);
        let no_zp = self.padic_parts.values().all(|r| r.zp == 0);
        let no_pr = self.padic_parts.values().all(|r| r.pr == 0);
        let vector = self.lattice_rank == 0
            && self.torus_rank == 0
            && self.finite_part.is_empty()
            && self.padic_parts.is_empty();
        PredicateSet {
            is_compact: self.real_rank == 0 && self.lattice_rank == 0 && no_qp && no_pr,
            is_discrete: self.real_rank == 0 && self.torus_rank == 0 && no_qp && no_zp,
            is_compactly_generated: no_qp && no_pr,
            is_nss: no_qp && no_zp,
            is_vector_module: vector,
            in_rc_class: self.lattice_rank == 0 && no_qp && no_pr,
            in_rd_class: self.torus_rank == 0 && no_qp && no_zp,
        }
    }

    /// `(R^a, rest)` with `R^a + rest = self`.
    pub fn split_vector_summand(&self) -> (LcaObject, LcaObject) {
        let rest = LcaObject { real_rank: 0, ..self.clone() };
        (LcaObject::real(self.real_rank), rest)
    }
}

impl fmt::Display for LcaObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(name: &str, n: usize) -> Option<String> {
            match n {
                0 => None,
                1 => Some(name.to_string()),
                n => Some(format!("{name}^{n}")),
            }
        }
        let mut parts: Vec<String> = Vec::new();
        parts.extend(atom("R", self.real_rank));
        parts.extend(atom("Z", self.lattice_rank));
        parts.extend(atom("T", self.torus_rank));
        parts.extend(self.finite_part.iter().map(|d| format!("Z/{d}")));
        for (p, r) in &self.padic_parts {
            parts.extend(atom(&format!("Qp({p})"), r.qp));
            parts.extend(atom(&format!("Zp({p})"), r.zp));
            parts.extend(atom(&format!("Pr({p})"), r.pr));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Character cursor over whitespace-stripped input that remembers original positions.
pub(crate) struct Cursor<'a> {
    chars: Vec<(usize, usize, char)>,
    pos: usize,
    end: (usize, usize),
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Self::at(src, 1, 1)
    }

    /// A cursor whose first character sits at `line:col` of some enclosing text.
    pub(crate) fn at(src: &'a str, line: usize, col: usize) -> Self {
        let mut chars = Vec::new();
        let (mut l, mut c) = (line, col);
        for ch in src.chars() {
            if ch == '\n' {
                l += 1;
                c = 1;
                continue;
            }
            if !ch.is_whitespace() {
                chars.push((l, c, ch));
            }
            c += 1;
        }
        Cursor { chars, pos: 0, end: (l, c), _src: src }
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|t| t.2)
    }

    pub(crate) fn here(&self) -> (usize, usize) {
        self.chars.get(self.pos).map_or(self.end, |t| (t.0, t.1))
    }

    pub(crate) fn err(&self, msg: impl Into<String>) -> LcaError {
        let (l, c) = self.here();
        LcaError::parse(l, c, msg)
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n
            && self.chars[self.pos..self.pos + n].iter().map(|t| t.2).eq(s.chars())
        {
            self.pos += n;
            true
        } else {
            false
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub(crate) fn integer(&mut self) -> Result<Int> {
        let start = self.here();
        let mut s = String::new();
        if self.eat('-') {
            s.push('-');
        }
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s.parse().map_err(|_| LcaError::parse(start.0, start.1, "expected an integer"))
    }

    pub(crate) fn natural(&mut self) -> Result<usize> {
        let start = self.here();
        let n = self.integer()?;
        if n.is_negative() {
            return Err(LcaError::parse(start.0, start.1, "expected a non-negative integer"));
        }
        n.to_usize().ok_or_else(|| LcaError::parse(start.0, start.1, "integer too large"))
    }

    pub(crate) fn prime_arg(&mut self) -> Result<u64> {
        self.expect('(')?;
        let start = self.here();
        let p = self.natural()? as u64;
        if !is_prime(p) {
            return Err(LcaError::parse(start.0, start.1, format!("{p} is not prime")));
        }
        self.expect(')')?;
        Ok(p)
    }
}

fn parse_exponent(cur: &mut Cursor<'_>) -> Result<usize> {
    if cur.eat('^') {
        cur.natural()
    } else {
        Ok(1)
    }
}

/// Parses the object grammar from a cursor, stopping before any character
/// that cannot continue a term.
pub(crate) fn parse_object(cur: &mut Cursor<'_>) -> Result<LcaObject> {
    let mut acc = LcaObject::zero();
    loop {
        let term = match cur.peek() {
            Some('0') => {
                cur.bump();
                LcaObject::zero()
            }
            Some('R') => {
                cur.bump();
                LcaObject::real(parse_exponent(cur)?)
            }
            Some('T') => {
                cur.bump();
                LcaObject::torus(parse_exponent(cur)?)
            }
            Some('Z') if cur.eat_str("Zp") => {
                let p = cur.prime_arg()?;
                LcaObject::zp(p, parse_exponent(cur)?)
            }
            Some('Z') => {
                cur.bump();
                if cur.eat('/') {
                    let start = cur.here();
                    let d = cur.integer()?;
                    if !d.is_positive() {
                        return Err(LcaError::parse(start.0, start.1, "cyclic order must be positive"));
                    }
                    let e = parse_exponent(cur)?;
                    LcaObject::finite(&vec![d; e])
                } else {
                    LcaObject::lattice(parse_exponent(cur)?)
                }
            }
            Some('Q') if cur.eat_str("Qp") => {
                let p = cur.prime_arg()?;
                LcaObject::qp(p, parse_exponent(cur)?)
            }
            Some('P') if cur.eat_str("Pr") => {
                let p = cur.prime_arg()?;
                LcaObject::pruefer(p, parse_exponent(cur)?)
            }
            _ => return Err(cur.err("expected an object term")),
        };
        acc = acc.sum(&term);
        if !cur.eat('+') {
            return Ok(acc);
        }
    }
}

impl FromStr for LcaObject {
    type Err = LcaError;

    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let o = parse_object(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.err("unexpected trailing input"));
        }
        Ok(o)
    }
}

impl LcaObject {
    /// Finite part entries as `u64` (panics on overflow; used by tests and fixtures).
    pub fn finite_orders_u64(&self) -> Vec<u64> {
        self.finite_part.iter().map(|d| d.to_u64().expect("fits")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn obj(s: &str) -> LcaObject {
        s.parse().unwrap()
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["0", "R^2 + Z + T + Z/4 + Zp(3)^2", "Z/2 + Z/6 + Qp(2) + Pr(2) + Qp(5)^3"] {
            assert_eq!(obj(s).to_string(), s);
        }
        assert_eq!(obj(" R ^ 2+Z/ 4 ").to_string(), "R^2 + Z/4");
        assert_eq!(obj("Z/2 + Z/3").to_string(), "Z/6");
        assert_eq!(obj("R^1 + 0").to_string(), "R");
    }

    #[test]
    fn grammar_rejects_malformed_input() {
        for s in ["R^-1", "", "R +", "Qp(4)", "Zp(3", "X", "Z/0", "R R"] {
            assert!(s.parse::<LcaObject>().is_err(), "{s}");
        }
        match "R + Q".parse::<LcaObject>() {
            Err(LcaError::Parse { line, col, .. }) => assert_eq!((line, col), (1, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duality_on_examples() {
        assert_eq!(obj("R + Z^2").dual(), obj("R + T^2"));
        assert_eq!(LcaObject::zero().dual(), LcaObject::zero());
        assert_eq!(obj("Zp(5)").dual(), obj("Pr(5)"));
        let g = obj("R^2 + Z + T^3 + Z/4 + Qp(3) + Zp(3)^2 + Pr(7)");
        assert_eq!(g.dual().dual(), g);
    }

    #[test]
    fn predicates_on_examples() {
        let a = obj("R^2 + Z + T + Z/4").predicates();
        assert!(a.is_compactly_generated && a.is_nss && !a.is_compact && !a.is_discrete);
        let b = obj("Zp(3)").predicates();
        assert!(b.is_compact && b.is_compactly_generated && !b.is_nss);
        let c = obj("Pr(3)").predicates();
        assert!(c.is_discrete && c.is_nss && !c.is_compactly_generated);
        let z = LcaObject::zero().predicates();
        assert!(z.is_vector_module && z.is_compact && z.is_discrete);
    }

    #[test]
    fn vector_summand() {
        assert_eq!(obj("R^2 + Z").split_vector_summand(), (obj("R^2"), obj("Z")));
        assert_eq!(obj("T").split_vector_summand(), (LcaObject::zero(), obj("T")));
        assert_eq!(obj("R + T + Zp(5)").split_vector_summand(), (obj("R"), obj("T + Zp(5)")));
    }

    #[test]
    fn finite_parts_normalize() {
        assert_eq!(LcaObject::finite(&[int(4), int(6)]).finite_part(), &[int(2), int(12)]);
        assert_eq!(obj("Z/4").kinds(), vec![Kind::Fin]);
        assert_eq!(
            obj("Qp(3) + R + Pr(2)").kinds(),
            vec![Kind::R, Kind::pr(2), Kind::qp(3)]
        );
    }
}

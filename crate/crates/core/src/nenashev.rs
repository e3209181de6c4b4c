//! Double exact sequences, 3×3 relations, and reduction in the abelian group they present.
//!
//! Two backends decide equality, composition and exactness: [`Computed`] works with
//! concrete morphisms, [`Declared`] with a finite formal category that may also hold
//! concrete objects and arrows.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{mod_floor, to_int, Int, Rat};
use crate::error::{LcaError, Result};
use crate::exact::{check_exact, classify, Admissibility, ExactSequenceSpec, ExactVerdict};
use crate::haar::{seq_factor, PositiveRational};
use crate::linalg::{inverse, smith, solve_integer, to_rat, IntMat};
use crate::morphism::{compose, LcaMorphism};
use crate::object::LcaObject;

pub trait Backend {
    type Obj: Clone + PartialEq + fmt::Display + fmt::Debug;
    type Arrow: Clone + fmt::Display + fmt::Debug;

    fn source(&self, f: &Self::Arrow) -> Self::Obj;
    fn target(&self, f: &Self::Arrow) -> Self::Obj;
    /// `g ∘ f`.
    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Result<Self::Arrow>;
    fn equal(&self, f: &Self::Arrow, g: &Self::Arrow) -> bool;
    fn is_exact(&self, monic: &Self::Arrow, epic: &Self::Arrow) -> Result<bool>;
    fn is_iso(&self, f: &Self::Arrow) -> Result<bool>;
    fn zero_object(&self) -> Self::Obj;
    fn zero_arrow(&self, a: &Self::Obj, b: &Self::Obj) -> Self::Arrow;
    fn identity(&self, a: &Self::Obj) -> Self::Arrow;
}

/// Concrete objects and morphisms; every question is decided by block arithmetic.
#[derive(Clone, Copy, Debug, Default)]
pub struct Computed;

impl Backend for Computed {
    type Obj = LcaObject;
    type Arrow = LcaMorphism;

    fn source(&self, f: &LcaMorphism) -> LcaObject {
        f.source().clone()
    }

    fn target(&self, f: &LcaMorphism) -> LcaObject {
        f.target().clone()
    }

    fn compose(&self, f: &LcaMorphism, g: &LcaMorphism) -> Result<LcaMorphism> {
        compose(f, g)
    }

    fn equal(&self, f: &LcaMorphism, g: &LcaMorphism) -> bool {
        f == g
    }

    fn is_exact(&self, monic: &LcaMorphism, epic: &LcaMorphism) -> Result<bool> {
        match check_exact(&ExactSequenceSpec::new(monic.clone(), epic.clone()))? {
            ExactVerdict::Exact => Ok(true),
            ExactVerdict::NotExact => Ok(false),
            ExactVerdict::Unknown => Err(LcaError::Undecidable),
        }
    }

    fn is_iso(&self, f: &LcaMorphism) -> Result<bool> {
        match classify(f) {
            Admissibility::Unknown => Err(LcaError::Undecidable),
            a => Ok(a == Admissibility::Isomorphism),
        }
    }

    fn zero_object(&self) -> LcaObject {
        LcaObject::zero()
    }

    fn zero_arrow(&self, a: &LcaObject, b: &LcaObject) -> LcaMorphism {
        LcaMorphism::zero(a.clone(), b.clone())
    }

    fn identity(&self, a: &LcaObject) -> LcaMorphism {
        LcaMorphism::identity(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DObj {
    Concrete(LcaObject),
    Formal(String),
}

impl DObj {
    fn concrete(&self) -> Option<&LcaObject> {
        match self {
            DObj::Concrete(g) => Some(g),
            DObj::Formal(_) => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.concrete().is_some_and(LcaObject::is_zero)
    }
}

impl fmt::Display for DObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DObj::Concrete(g) => write!(f, "{g}"),
            DObj::Formal(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Atom {
    Concrete(LcaMorphism),
    Formal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Body {
    Zero,
    /// Composable atoms, first applied first; empty is the identity.
    Path(Vec<Atom>),
}

/// An arrow of the formal category, kept in a normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DArrow {
    src: DObj,
    dst: DObj,
    body: Body,
}

impl DArrow {
    fn normalize(src: DObj, dst: DObj, atoms: Vec<Atom>) -> Result<DArrow> {
        let atoms = {
            {
                let mut out: Vec<Atom> = Vec::new();
                for a in atoms {
                    match (out.last_mut(), a) {
                        (Some(Atom::Concrete(prev)), Atom::Concrete(next)) => *prev = compose(prev, &next)?,
                        (_, a) => out.push(a),
                    }
                }
                let zero = out.iter().any(|a| matches!(a, Atom::Concrete(m) if m.is_zero() && !(m.source().is_zero() && m.target().is_zero())));
                if zero {
                    return DArrow::zero(src, dst);
                }
                if out.iter().any(|a| matches!(a, Atom::Formal(_))) {
                    out.retain(|a| !matches!(a, Atom::Concrete(m) if *m == LcaMorphism::identity(m.source())));
                }
                if out.is_empty() && src != dst {
                    return Err(LcaError::SourceTargetMismatch(src.to_string(), dst.to_string()));
                }
                out
            }
        };
        let concrete_ends = src.concrete().zip(dst.concrete());
        match (concrete_ends, atoms.as_slice()) {
            (Some((s, d)), []) => {
                let m = if s != d {
                    LcaMorphism::zero(s.clone(), d.clone())
                } else {
                    LcaMorphism::identity(s)
                };
                Ok(DArrow { src, dst, body: Body::Path(vec![Atom::Concrete(m)]) })
            }
            _ => Ok(DArrow { src, dst, body: Body::Path(atoms) }),
        }
    }

    fn zero(src: DObj, dst: DObj) -> Result<DArrow> {
        match (src.concrete(), dst.concrete()) {
            (Some(s), Some(d)) => {
                let m = LcaMorphism::zero(s.clone(), d.clone());
                Ok(DArrow { src, dst, body: Body::Path(vec![Atom::Concrete(m)]) })
            }
            _ => Ok(DArrow { src, dst, body: Body::Zero }),
        }
    }

    pub fn source(&self) -> &DObj {
        &self.src
    }

    pub fn target(&self) -> &DObj {
        &self.dst
    }

    pub fn is_zero(&self) -> bool {
        match &self.body {
            Body::Zero => true,
            Body::Path(a) => matches!(a.as_slice(), [Atom::Concrete(m)] if m.is_zero()),
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.body {
            Body::Zero => false,
            Body::Path(a) => match a.as_slice() {
                [] => true,
                [Atom::Concrete(m)] => *m == LcaMorphism::identity(m.source()),
                _ => false,
            },
        }
    }

    /// The underlying morphism when the arrow is fully concrete.
    pub fn concrete(&self) -> Option<&LcaMorphism> {
        match &self.body {
            Body::Path(a) => match a.as_slice() {
                [Atom::Concrete(m)] => Some(m),
                _ => None,
            },
            Body::Zero => None,
        }
    }
}

impl fmt::Display for DArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Zero => write!(f, "0[{} -> {}]", self.src, self.dst),
            Body::Path(atoms) if atoms.is_empty() => write!(f, "1[{}]", self.src),
            Body::Path(atoms) => {
                let parts: Vec<String> = atoms
                    .iter()
                    .map(|a| match a {
                        Atom::Concrete(m) => m.to_string(),
                        Atom::Formal(n) => n.clone(),
                    })
                    .collect();
                f.write_str(&parts.join(" ; "))
            }
        }
    }
}

/// A finite formal category: declared arrows, isomorphisms, exact pairs and commuting composites.
#[derive(Clone, Debug, Default)]
pub struct Declared {
    isos: Vec<DArrow>,
    exact: Vec<(DArrow, DArrow)>,
    equal: Vec<(DArrow, DArrow)>,
}

impl Declared {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn formal_arrow(&self, name: &str, src: &DObj, dst: &DObj) -> DArrow {
        DArrow { src: src.clone(), dst: dst.clone(), body: Body::Path(vec![Atom::Formal(name.to_string())]) }
    }

    pub fn concrete_arrow(&self, m: &LcaMorphism) -> DArrow {
        let (s, d) = (DObj::Concrete(m.source().clone()), DObj::Concrete(m.target().clone()));
        DArrow { src: s, dst: d, body: Body::Path(vec![Atom::Concrete(m.clone())]) }
    }

    pub fn declare_iso(&mut self, f: DArrow) {
        self.isos.push(f);
    }

    pub fn declare_exact(&mut self, monic: DArrow, epic: DArrow) -> Result<()> {
        if monic.dst != epic.src {
            return Err(LcaError::SourceTargetMismatch(monic.dst.to_string(), epic.src.to_string()));
        }
        self.exact.push((monic, epic));
        Ok(())
    }

    pub fn declare_equal(&mut self, f: DArrow, g: DArrow) -> Result<()> {
        if f.src != g.src || f.dst != g.dst {
            return Err(LcaError::ObjectMismatch(format!("{f} and {g} have different endpoints")));
        }
        self.equal.push((f, g));
        Ok(())
    }
}

impl Backend for Declared {
    type Obj = DObj;
    type Arrow = DArrow;

    fn source(&self, f: &DArrow) -> DObj {
        f.src.clone()
    }

    fn target(&self, f: &DArrow) -> DObj {
        f.dst.clone()
    }

    fn compose(&self, f: &DArrow, g: &DArrow) -> Result<DArrow> {
        if f.dst != g.src {
            return Err(LcaError::SourceTargetMismatch(f.dst.to_string(), g.src.to_string()));
        }
        match (&f.body, &g.body) {
            (Body::Zero, _) | (_, Body::Zero) => DArrow::zero(f.src.clone(), g.dst.clone()),
            (Body::Path(a), Body::Path(b)) => {
                let atoms = a.iter().chain(b).cloned().collect();
                DArrow::normalize(f.src.clone(), g.dst.clone(), atoms)
            }
        }
    }

    fn equal(&self, f: &DArrow, g: &DArrow) -> bool {
        f == g
            || (f.is_zero() && g.is_zero() && f.src == g.src && f.dst == g.dst)
            || self.equal.iter().any(|(a, b)| (a == f && b == g) || (a == g && b == f))
    }

    fn is_exact(&self, monic: &DArrow, epic: &DArrow) -> Result<bool> {
        if monic.dst != epic.src {
            return Err(LcaError::SourceTargetMismatch(monic.dst.to_string(), epic.src.to_string()));
        }
        if let (Some(p), Some(r)) = (monic.concrete(), epic.concrete()) {
            return Computed.is_exact(p, r);
        }
        if self.exact.iter().any(|(p, r)| self.equal(p, monic) && self.equal(r, epic)) {
            return Ok(true);
        }
        if monic.src.is_zero() && monic.is_zero() {
            return self.is_iso(epic);
        }
        if epic.dst.is_zero() && epic.is_zero() {
            return self.is_iso(monic);
        }
        Ok(false)
    }

    fn is_iso(&self, f: &DArrow) -> Result<bool> {
        if let Some(m) = f.concrete() {
            return Computed.is_iso(m);
        }
        if f.is_identity() || self.isos.iter().any(|g| self.equal(g, f)) {
            return Ok(true);
        }
        match &f.body {
            Body::Path(atoms) if atoms.len() > 1 => {
                let mut src = f.src.clone();
                for (k, a) in atoms.iter().enumerate() {
                    let single = match a {
                        Atom::Concrete(m) => self.concrete_arrow(m),
                        Atom::Formal(name) => {
                            let dst = if k + 1 == atoms.len() { f.dst.clone() } else { self.formal_target(name, &src)? };
                            self.formal_arrow(name, &src, &dst)
                        }
                    };
                    if !self.is_iso(&single)? {
                        return Ok(false);
                    }
                    src = single.dst.clone();
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    fn zero_object(&self) -> DObj {
        DObj::Concrete(LcaObject::zero())
    }

    fn zero_arrow(&self, a: &DObj, b: &DObj) -> DArrow {
        DArrow::zero(a.clone(), b.clone()).expect("zero arrows always exist")
    }

    fn identity(&self, a: &DObj) -> DArrow {
        DArrow::normalize(a.clone(), a.clone(), Vec::new()).expect("identities always exist")
    }
}

impl Declared {
    fn formal_target(&self, name: &str, src: &DObj) -> Result<DObj> {
        self.isos
            .iter()
            .find_map(|g| match &g.body {
                Body::Path(a) if a.len() == 1 && a[0] == Atom::Formal(name.to_string()) && g.src == *src => {
                    Some(g.dst.clone())
                }
                _ => None,
            })
            .ok_or_else(|| LcaError::UnknownName(name.to_string()))
    }
}

/// `a ⇉ b ⇉ c` with yin `(p, r)` and yang `(q, s)`.
#[derive(Debug)]
pub struct DoubleSes<B: Backend> {
    pub a: B::Obj,
    pub b: B::Obj,
    pub c: B::Obj,
    pub p: B::Arrow,
    pub r: B::Arrow,
    pub q: B::Arrow,
    pub s: B::Arrow,
}

impl<B: Backend> Clone for DoubleSes<B> {
    fn clone(&self) -> Self {
        DoubleSes {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            p: self.p.clone(),
            r: self.r.clone(),
            q: self.q.clone(),
            s: self.s.clone(),
        }
    }
}

impl<B: Backend> Clone for ThreeByThree<B> {
    fn clone(&self) -> Self {
        ThreeByThree { rows: self.rows.clone(), cols: self.cols.clone() }
    }
}

impl<B: Backend> Clone for Relation<B> {
    fn clone(&self) -> Self {
        Relation { diagram: self.diagram.clone(), lhs: self.lhs.clone(), rhs: self.rhs.clone() }
    }
}

impl<B: Backend> DoubleSes<B> {
    pub fn new(backend: &B, yin: (B::Arrow, B::Arrow), yang: (B::Arrow, B::Arrow)) -> Self {
        DoubleSes {
            a: backend.source(&yin.0),
            b: backend.target(&yin.0),
            c: backend.target(&yin.1),
            p: yin.0,
            r: yin.1,
            q: yang.0,
            s: yang.1,
        }
    }

    /// The generator name: every object and arrow in canonical text.
    pub fn key(&self) -> String {
        format!(
            "{} => {} => {} | yin {} , {} | yang {} , {}",
            self.a, self.b, self.c, self.p, self.r, self.q, self.s
        )
    }

    pub fn is_trivial(&self, backend: &B) -> bool {
        backend.equal(&self.p, &self.q) && backend.equal(&self.r, &self.s)
    }

    /// Endpoints match and both sequences are exact; `what` names the sequence in errors.
    pub fn validate(&self, backend: &B, what: &str) -> Result<()> {
        let ends = [
            (backend.source(&self.p), &self.a, "p source"),
            (backend.target(&self.p), &self.b, "p target"),
            (backend.source(&self.r), &self.b, "r source"),
            (backend.target(&self.r), &self.c, "r target"),
            (backend.source(&self.q), &self.a, "q source"),
            (backend.target(&self.q), &self.b, "q target"),
            (backend.source(&self.s), &self.b, "s source"),
            (backend.target(&self.s), &self.c, "s target"),
        ];
        for (got, want, slot) in ends {
            if got != *want {
                return Err(LcaError::ObjectMismatch(format!("{what}: {slot} is {got}, expected {want}")));
            }
        }
        for (m, e, side) in [(&self.p, &self.r, "yin"), (&self.q, &self.s, "yang")] {
            if !backend.is_exact(m, e)? {
                return Err(LcaError::RowOrColumnNotExact(format!("{what} {side}")));
            }
        }
        Ok(())
    }
}

/// `0 ⇉ x ⇉ x` with yin epic `phi` and yang epic the identity.
pub fn class_of_automorphism<B: Backend>(backend: &B, x: &B::Obj, phi: &B::Arrow) -> Result<DoubleSes<B>> {
    if backend.source(phi) != *x || backend.target(phi) != *x || !backend.is_iso(phi)? {
        return Err(LcaError::NotAnAutomorphism);
    }
    let zero = backend.zero_arrow(&backend.zero_object(), x);
    Ok(DoubleSes::new(backend, (zero.clone(), phi.clone()), (zero, backend.identity(x))))
}

pub fn dses_generator<B: Backend>(backend: &B, d: &DoubleSes<B>) -> Result<K1Expression> {
    d.validate(backend, "sequence")?;
    Ok(K1Expression::generator(backend, d))
}

/// A formal integer combination of generators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct K1Expression {
    terms: BTreeMap<String, Int>,
}

impl K1Expression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator<B: Backend>(backend: &B, d: &DoubleSes<B>) -> Self {
        if d.is_trivial(backend) {
            Self::zero()
        } else {
            Self::from_key(d.key())
        }
    }

    pub fn from_key(key: String) -> Self {
        K1Expression { terms: BTreeMap::from([(key, Int::one())]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<String, Int> {
        &self.terms
    }

    pub fn coefficient(&self, key: &str) -> Int {
        self.terms.get(key).cloned().unwrap_or_else(Int::zero)
    }

    pub fn add_scaled(&mut self, other: &K1Expression, c: &Int) {
        for (k, v) in &other.terms {
            let e = self.terms.entry(k.clone()).or_insert_with(Int::zero);
            *e += v * c;
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    pub fn plus(&self, other: &K1Expression) -> K1Expression {
        let mut out = self.clone();
        out.add_scaled(other, &Int::one());
        out
    }

    pub fn minus(&self, other: &K1Expression) -> K1Expression {
        let mut out = self.clone();
        out.add_scaled(other, &-Int::one());
        out
    }
}

impl K1Expression {
    /// Terms joined with signs; each name is passed through `name`.
    pub fn render(&self, name: impl Fn(&str) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut named: Vec<(String, &Int)> = self.terms.iter().map(|(k, c)| (name(k), c)).collect();
        named.sort();
        let mut out = String::new();
        for (i, (k, c)) in named.into_iter().enumerate() {
            let mag = c.abs();
            let coeff = if mag.is_one() { String::new() } else { mag.to_string() };
            match (i, c.is_negative()) {
                (0, false) => {}
                (0, true) => out.push('-'),
                (_, false) => out.push_str(" + "),
                (_, true) => out.push_str(" - "),
            }
            out.push_str(&coeff);
            out.push_str(&k);
        }
        out
    }
}

impl fmt::Display for K1Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|k| format!("[{k}]")))
    }
}

/// Three rows and three columns of double exact sequences on a 3×3 grid of objects.
#[derive(Debug)]
pub struct ThreeByThree<B: Backend> {
    pub rows: [DoubleSes<B>; 3],
    pub cols: [DoubleSes<B>; 3],
}

#[derive(Debug)]
pub struct Relation<B: Backend> {
    pub diagram: ThreeByThree<B>,
    /// `Row1 - Row2 + Row3`.
    pub lhs: K1Expression,
    /// `Col1 - Col2 + Col3`.
    pub rhs: K1Expression,
}

impl<B: Backend> Relation<B> {
    /// `lhs - rhs`, which the relation declares to vanish.
    pub fn difference(&self) -> K1Expression {
        self.lhs.minus(&self.rhs)
    }
}

fn grid_object<B: Backend>(d: &ThreeByThree<B>, i: usize, j: usize) -> [&B::Obj; 2] {
    fn pick<B: Backend>(s: &DoubleSes<B>, k: usize) -> &B::Obj {
        match k {
            0 => &s.a,
            1 => &s.b,
            _ => &s.c,
        }
    }
    [pick(&d.rows[i], j), pick(&d.cols[j], i)]
}

/// Checks objects, exactness and both commutativity conditions.
pub fn validate_3x3<B: Backend>(backend: &B, d: &ThreeByThree<B>) -> Result<()> {
    for i in 0..3 {
        for j in 0..3 {
            let [from_row, from_col] = grid_object(d, i, j);
            if from_row != from_col {
                return Err(LcaError::ObjectMismatch(format!(
                    "position ({}, {}): row gives {from_row}, column gives {from_col}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    for k in 0..3 {
        d.rows[k].validate(backend, &format!("row {}", k + 1))?;
        d.cols[k].validate(backend, &format!("column {}", k + 1))?;
    }
    for yin in [true, false] {
        let horiz = |i: usize, j: usize| {
            let s = &d.rows[i];
            match (j, yin) {
                (0, true) => &s.p,
                (0, false) => &s.q,
                (_, true) => &s.r,
                (_, false) => &s.s,
            }
        };
        let vert = |i: usize, j: usize| {
            let s = &d.cols[j];
            match (i, yin) {
                (0, true) => &s.p,
                (0, false) => &s.q,
                (_, true) => &s.r,
                (_, false) => &s.s,
            }
        };
        for i in 0..2 {
            for j in 0..2 {
                let right_down = backend.compose(horiz(i, j), vert(i, j + 1))?;
                let down_right = backend.compose(vert(i, j), horiz(i + 1, j))?;
                if !backend.equal(&right_down, &down_right) {
                    return Err(LcaError::DiagramNotCommutative(format!(
                        "{} square at rows {}-{}, columns {}-{}",
                        if yin { "yin" } else { "yang" },
                        i + 1,
                        i + 2,
                        j + 1,
                        j + 2
                    )));
                }
            }
        }
    }
    Ok(())
}

/// `Row1 - Row2 + Row3 = Col1 - Col2 + Col3` for a validated diagram.
pub fn relation_from_3x3<B: Backend>(backend: &B, d: &ThreeByThree<B>) -> Result<Relation<B>> {
    validate_3x3(backend, d)?;
    let alt = |s: &[DoubleSes<B>; 3]| {
        K1Expression::generator(backend, &s[0])
            .minus(&K1Expression::generator(backend, &s[1]))
            .plus(&K1Expression::generator(backend, &s[2]))
    };
    Ok(Relation { diagram: d.clone(), lhs: alt(&d.rows), rhs: alt(&d.cols) })
}

/// The outcome of reducing an expression modulo relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub normal_form: K1Expression,
    /// `expr - normal_form = Σ certificate[i] · relations[i]`.
    pub certificate: Vec<Int>,
}

impl Reduction {
    pub fn is_zero(&self) -> bool {
        self.normal_form.is_zero()
    }

    pub fn verify(&self, expr: &K1Expression, relations: &[K1Expression]) -> bool {
        let mut rhs = self.normal_form.clone();
        for (r, c) in relations.iter().zip(&self.certificate) {
            rhs.add_scaled(r, c);
        }
        rhs == *expr && relations.len() == self.certificate.len()
    }
}

/// Normal form of `expr` in the free abelian group on the generators modulo `relations`.
///
/// The representative has every Smith coordinate reduced into `[0, d)`.
pub fn reduce(expr: &K1Expression, relations: &[K1Expression]) -> Reduction {
    let mut keys: Vec<String> = expr.terms.keys().cloned().collect();
    for r in relations {
        keys.extend(r.terms.keys().cloned());
    }
    keys.sort();
    keys.dedup();
    let g = keys.len();
    let vec_of = |e: &K1Expression| -> Vec<Int> { keys.iter().map(|k| e.coefficient(k)).collect() };
    let x = vec_of(expr);
    if relations.is_empty() || g == 0 {
        return Reduction { normal_form: expr.clone(), certificate: vec![Int::zero(); relations.len()] };
    }
    let rel_cols: Vec<Vec<Int>> = relations.iter().map(vec_of).collect();
    let rel = IntMat::from_cols(g, &rel_cols);
    let s = smith(&rel);
    let mut y = s.u.mul_vec(&x);
    for (yi, d) in y.iter_mut().zip(&s.diag) {
        if !d.is_zero() {
            *yi = mod_floor(yi, d);
        }
    }
    let u_inv = inverse(&to_rat(&s.u)).expect("unimodular");
    let rep: Vec<Int> = u_inv
        .mul_vec(&y.iter().cloned().map(Rat::from_integer).collect::<Vec<_>>())
        .iter()
        .map(|q| to_int(q).expect("unimodular inverse is integral"))
        .collect();
    let diff: Vec<Int> = x.iter().zip(&rep).map(|(a, b)| a - b).collect();
    let certificate = solve_integer(&rel, &diff).expect("the difference lies in the relation lattice");
    let mut normal_form = K1Expression::zero();
    for (k, c) in keys.iter().zip(rep) {
        if !c.is_zero() {
            normal_form.terms.insert(k.clone(), c);
        }
    }
    Reduction { normal_form, certificate }
}

/// Haar image of a generator: `seq_factor(yang) / seq_factor(yin)`.
pub fn haar_image(d: &DoubleSes<Computed>) -> Result<PositiveRational> {
    let yin = seq_factor(&ExactSequenceSpec::new(d.p.clone(), d.r.clone()))?;
    let yang = seq_factor(&ExactSequenceSpec::new(d.q.clone(), d.s.clone()))?;
    Ok(yang / yin)
}

/// Both sides of a relation under [`haar_image`], as `(rows, columns)`.
pub fn haar_relation_sides(rel: &Relation<Computed>) -> Result<(PositiveRational, PositiveRational)> {
    let side = |s: &[DoubleSes<Computed>; 3]| -> Result<PositiveRational> {
        Ok(haar_image(&s[0])? / haar_image(&s[1])? * haar_image(&s[2])?)
    };
    Ok((side(&rel.diagram.rows)?, side(&rel.diagram.cols)?))
}

impl DoubleSes<Declared> {
    /// The same sequence in the computed backend, when every piece is concrete.
    pub fn to_computed(&self) -> Result<DoubleSes<Computed>> {
        let conc = |f: &DArrow| {
            f.concrete().cloned().ok_or_else(|| LcaError::ObjectMismatch(format!("{f} is not concrete")))
        };
        Ok(DoubleSes::new(&Computed, (conc(&self.p)?, conc(&self.r)?), (conc(&self.q)?, conc(&self.s)?)))
    }
}

impl ThreeByThree<Declared> {
    pub fn to_computed(&self) -> Result<ThreeByThree<Computed>> {
        let conv = |s: &[DoubleSes<Declared>; 3]| -> Result<[DoubleSes<Computed>; 3]> {
            Ok([s[0].to_computed()?, s[1].to_computed()?, s[2].to_computed()?])
        };
        Ok(ThreeByThree { rows: conv(&self.rows)?, cols: conv(&self.cols)? })
    }
}

/// A parsed diagram file.
#[derive(Clone, Debug)]
pub struct DiagramFile {
    pub backend: Declared,
    /// `backend computed`: every piece must be concrete and checks run in [`Computed`].
    pub computed: bool,
    pub sequences: Vec<(String, DoubleSes<Declared>)>,
    pub diagrams: Vec<(String, ThreeByThree<Declared>)>,
    pub targets: Vec<String>,
}

/// A checked diagram and the relation it imposes.
#[derive(Clone, Debug)]
pub struct NamedRelation {
    pub name: String,
    pub relation: K1Expression,
    pub display: String,
}

impl DiagramFile {
    fn sequence(&self, name: &str) -> Result<&DoubleSes<Declared>> {
        self.sequences
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| LcaError::UnknownName(name.to_string()))
    }

    /// Validates every diagram and returns its relation.
    pub fn relations(&self) -> Result<Vec<NamedRelation>> {
        let mut out = Vec::new();
        for (name, d) in &self.diagrams {
            let rel = if self.computed {
                d.to_computed().and_then(|d| relation_from_3x3(&Computed, &d)).map(|r| (r.lhs, r.rhs))
            } else {
                relation_from_3x3(&self.backend, d).map(|r| (r.lhs, r.rhs))
            };
            let (lhs, rhs) = rel.map_err(|e| match e {
                LcaError::DiagramNotCommutative(w) => LcaError::DiagramNotCommutative(format!("{name}: {w}")),
                LcaError::RowOrColumnNotExact(w) => LcaError::RowOrColumnNotExact(format!("{name}: {w}")),
                e => e,
            })?;
            let display = format!("{} = {}", self.abbreviate(&lhs), self.abbreviate(&rhs));
            out.push(NamedRelation { name: name.clone(), relation: lhs.minus(&rhs), display });
        }
        Ok(out)
    }

    /// Rewrites generator keys as the sequence names that produce them.
    pub fn abbreviate(&self, e: &K1Expression) -> String {
        e.render(|k| {
            self.sequences
                .iter()
                .find(|(_, s)| s.key() == k)
                .map_or_else(|| format!("[{k}]"), |(n, _)| n.clone())
        })
    }

    pub fn target_expression(&self, name: &str) -> Result<K1Expression> {
        let s = self.sequence(name)?;
        if self.computed {
            dses_generator(&Computed, &s.to_computed()?)
        } else {
            dses_generator(&self.backend, s)
        }
    }

    pub fn all_computed_relations(&self) -> Result<Vec<Relation<Computed>>> {
        self.diagrams
            .iter()
            .filter_map(|(_, d)| d.to_computed().ok())
            .map(|d| relation_from_3x3(&Computed, &d))
            .collect()
    }
}

fn split_expr<'a>(tokens: &mut impl Iterator<Item = &'a str>, line: usize, what: &str) -> Result<&'a str> {
    tokens.next().ok_or_else(|| LcaError::parse(line, 1, format!("expected {what}")))
}

impl std::str::FromStr for DiagramFile {
    type Err = LcaError;

    fn from_str(text: &str) -> Result<Self> {
        let mut backend = Declared::new();
        let mut computed = false;
        let mut objects: BTreeMap<String, DObj> = BTreeMap::new();
        objects.insert("0".into(), DObj::Concrete(LcaObject::zero()));
        let mut arrows: BTreeMap<String, DArrow> = BTreeMap::new();
        let mut sequences: Vec<(String, DoubleSes<Declared>)> = Vec::new();
        let mut diagrams = Vec::new();
        let mut targets = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| LcaError::parse(line_no, 1, msg);
            let relocate = |e: LcaError| match e {
                LcaError::Parse { col, msg, .. } => LcaError::parse(line_no, col, msg),
                other => other,
            };
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let obj = |name: &str| objects.get(name).cloned().ok_or_else(|| err(format!("unknown object '{name}'")));
            let path = |expr: &str, arrows: &BTreeMap<String, DArrow>| -> Result<DArrow> {
                let mut acc: Option<DArrow> = None;
                for part in expr.split(';') {
                    let f = arrows.get(part).cloned().ok_or_else(|| err(format!("unknown arrow '{part}'")))?;
                    acc = Some(match acc {
                        None => f,
                        Some(a) => backend.compose(&a, &f).map_err(relocate)?,
                    });
                }
                acc.ok_or_else(|| err("empty arrow expression".into()))
            };
            match key {
                "backend" => match rest {
                    "computed" => computed = true,
                    "declared" => computed = false,
                    other => return Err(err(format!("unknown backend '{other}'"))),
                },
                "object" => {
                    if let Some((name, def)) = rest.split_once('=') {
                        let g: LcaObject = def.trim().parse().map_err(relocate)?;
                        objects.insert(name.trim().to_string(), DObj::Concrete(g));
                    } else {
                        let mut it = rest.split_whitespace();
                        let name = split_expr(&mut it, line_no, "an object name")?;
                        if it.next() != Some("formal") || it.next().is_some() {
                            return Err(err("expected 'object <name> = <object>' or 'object <name> formal'".into()));
                        }
                        objects.insert(name.to_string(), DObj::Formal(name.to_string()));
                    }
                }
                "arrow" => {
                    if let Some((name, def)) = rest.split_once('=') {
                        let m: LcaMorphism = def.trim().parse().map_err(relocate)?;
                        arrows.insert(name.trim().to_string(), backend.concrete_arrow(&m));
                    } else {
                        let (name, ends) = rest
                            .split_once(':')
                            .ok_or_else(|| err("expected 'arrow <name> : <src> -> <dst>'".into()))?;
                        let (s, d) = ends.split_once("->").ok_or_else(|| err("expected '<src> -> <dst>'".into()))?;
                        let (s, d) = (obj(s.trim())?, obj(d.trim())?);
                        let name = name.trim();
                        arrows.insert(name.to_string(), backend.formal_arrow(name, &s, &d));
                    }
                }
                "iso" => {
                    let f = path(rest, &arrows)?;
                    backend.declare_iso(f);
                }
                "exact" => {
                    let mut it = rest.split_whitespace();
                    let p = path(split_expr(&mut it, line_no, "a monic")?, &arrows)?;
                    let r = path(split_expr(&mut it, line_no, "an epic")?, &arrows)?;
                    backend.declare_exact(p, r).map_err(relocate)?;
                }
                "commute" => {
                    let (l, r) = rest.split_once('=').ok_or_else(|| err("expected 'commute <path> = <path>'".into()))?;
                    let (l, r) = (path(l.trim(), &arrows)?, path(r.trim(), &arrows)?);
                    backend.declare_equal(l, r).map_err(relocate)?;
                }
                "dses" => {
                    let (name, def) = rest.split_once('=').ok_or_else(|| err("expected 'dses <name> = ...'".into()))?;
                    let (objs, maps) = def.split_once(':').ok_or_else(|| err("expected ':' before the maps".into()))?;
                    let os: Vec<&str> = objs.split_whitespace().collect();
                    let [a, b, c] = os.as_slice() else {
                        return Err(err("a double sequence has three objects".into()));
                    };
                    let (a, b, c) = (obj(a)?, obj(b)?, obj(c)?);
                    let (yin, yang) = maps.split_once('/').ok_or_else(|| err("expected 'p r / q s'".into()))?;
                    let arrow = |tok: &str, s: &DObj, d: &DObj| -> Result<DArrow> {
                        match tok {
                            "0" => Ok(backend.zero_arrow(s, d)),
                            "1" if s == d => Ok(backend.identity(s)),
                            "1" => Err(err(format!("'1' needs equal endpoints, got {s} and {d}"))),
                            _ => path(tok, &arrows),
                        }
                    };
                    let pair = |part: &str| -> Result<(DArrow, DArrow)> {
                        let ts: Vec<&str> = part.split_whitespace().collect();
                        let [m, e] = ts.as_slice() else {
                            return Err(err("each side lists a monic and an epic".into()));
                        };
                        Ok((arrow(m, &a, &b)?, arrow(e, &b, &c)?))
                    };
                    let (yin, yang) = (pair(yin)?, pair(yang)?);
                    let seq = DoubleSes { a: a.clone(), b: b.clone(), c: c.clone(), p: yin.0, r: yin.1, q: yang.0, s: yang.1 };
                    sequences.push((name.trim().to_string(), seq));
                }
                "diagram" => {
                    let ts: Vec<&str> = rest.split_whitespace().collect();
                    let [name, "rows", r1, r2, r3, "cols", c1, c2, c3] = ts.as_slice() else {
                        return Err(err("expected 'diagram <name> rows <r1> <r2> <r3> cols <c1> <c2> <c3>'".into()));
                    };
                    let get = |n: &str| {
                        sequences
                            .iter()
                            .find(|(k, _)| k == n)
                            .map(|(_, s)| s.clone())
                            .ok_or_else(|| err(format!("unknown double sequence '{n}'")))
                    };
                    let d = ThreeByThree { rows: [get(r1)?, get(r2)?, get(r3)?], cols: [get(c1)?, get(c2)?, get(c3)?] };
                    diagrams.push((name.to_string(), d));
                }
                "reduce" => {
                    if !sequences.iter().any(|(k, _)| k == rest) {
                        return Err(err(format!("unknown double sequence '{rest}'")));
                    }
                    targets.push(rest.to_string());
                }
                other => return Err(err(format!("unexpected keyword '{other}'"))),
            }
        }
        Ok(DiagramFile { backend, computed, sequences, diagrams, targets })
    }
}

fn matrix_text(phi: &[[i64; 2]; 2]) -> String {
    format!("{} {}; {} {}", phi[0][0], phi[0][1], phi[1][0], phi[1][1])
}

/// The three swindle diagrams for an automorphism `phi` of the lattice `Z^2`.
pub fn swindle_file(phi: &[[i64; 2]; 2]) -> String {
    let m = matrix_text(phi);
    format!(
        "\
backend declared
object X = Z^2
object XR = R^2
object T = T^2
object CX formal
object PT formal
arrow phi = [Z^2 -> Z^2] {{ (Z,Z): {m} }}
arrow phiR = [R^2 -> R^2] {{ (R,R): {m} }}
arrow phiT = [T^2 -> T^2] {{ (T,T): {m} }}
arrow i = [Z^2 -> R^2] {{ (Z,R): 1 0; 0 1 }}
arrow pi = [R^2 -> T^2] {{ (R,T): 1 0; 0 1 }}
arrow phiCX : CX -> CX
arrow inX : X -> CX
arrow shiftX : CX -> CX
arrow phiPT : PT -> PT
arrow inT : T -> PT
arrow shiftT : PT -> PT
iso phiCX
iso phiPT
exact inX shiftX
exact inT shiftT
commute phi;inX = inX;phiCX
commute phiCX;shiftX = shiftX;phiCX
commute phiT;inT = inT;phiPT
commute phiPT;shiftT = shiftT;phiPT
dses zero = 0 0 0 : 0 0 / 0 0
dses x = 0 X X : 0 phi / 0 1
dses xr = 0 XR XR : 0 phiR / 0 1
dses t = 0 T T : 0 phiT / 0 1
dses lattice = X XR T : i pi / i pi
dses cx = 0 CX CX : 0 phiCX / 0 1
dses swindleX = X CX CX : inX shiftX / inX shiftX
dses pt = 0 PT PT : 0 phiPT / 0 1
dses swindleT = T PT PT : inT shiftT / inT shiftT
diagram lrr1 rows x xr t cols zero lattice lattice
diagram lrr2 rows x cx cx cols zero swindleX swindleX
diagram lrr3 rows t pt pt cols zero swindleT swindleT
reduce xr
"
    )
}

/// Checks every diagram of a file and reduces each target modulo all its relations.
pub fn replay(file: &DiagramFile) -> Result<(Vec<NamedRelation>, Vec<(String, K1Expression, Reduction)>)> {
    let rels = file.relations()?;
    let lattice: Vec<K1Expression> = rels.iter().map(|r| r.relation.clone()).collect();
    let mut out = Vec::new();
    for t in &file.targets {
        let e = file.target_expression(t)?;
        let red = reduce(&e, &lattice);
        out.push((t.clone(), e, red));
    }
    Ok((rels, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn m(s: &str) -> LcaMorphism {
        s.parse().unwrap()
    }

    fn key(s: &str) -> K1Expression {
        K1Expression::from_key(s.to_string())
    }

    #[test]
    fn generators() {
        let r: LcaObject = "R".parse().unwrap();
        let d = class_of_automorphism(&Computed, &r, &LcaMorphism::identity(&r)).unwrap();
        assert!(dses_generator(&Computed, &d).unwrap().is_zero());
        let d = class_of_automorphism(&Computed, &r, &m("[R -> R] { (R,R): 2 }")).unwrap();
        assert!(!dses_generator(&Computed, &d).unwrap().is_zero());
        assert_eq!(haar_image(&d).unwrap(), PositiveRational::new(Rat::from_integer(int(2))).unwrap());
        let z = LcaObject::zero();
        let zz = LcaMorphism::zero(z.clone(), z.clone());
        let d = DoubleSes::new(&Computed, (zz.clone(), zz.clone()), (zz.clone(), zz));
        assert!(dses_generator(&Computed, &d).unwrap().is_zero());
        let q: LcaObject = "Qp(3)".parse().unwrap();
        let d = class_of_automorphism(&Computed, &q, &m("[Qp(3) -> Qp(3)] { (Qp,Qp): 4 }")).unwrap();
        assert!(haar_image(&d).unwrap().is_one());
        assert!(matches!(
            class_of_automorphism(&Computed, &r, &m("[R -> R] { (R,R): 0 }")),
            Err(LcaError::NotAnAutomorphism)
        ));
    }

    #[test]
    fn reduction_examples() {
        let g = key("g");
        let red = reduce(&g.plus(&g).plus(&g), &[g.plus(&g)]);
        assert_eq!(red.normal_form, g);
        assert_eq!(red.certificate, vec![int(1)]);
        assert!(red.verify(&g.plus(&g).plus(&g), &[g.plus(&g)]));
        let h = key("h");
        assert_eq!(reduce(&h, &[]).normal_form, h);
        let rels = [g.minus(&h), h.plus(&h)];
        let red = reduce(&g.plus(&h), &rels);
        assert!(red.is_zero());
        assert!(red.verify(&g.plus(&h), &rels));
    }

    #[test]
    fn swindle_replay() {
        let file: DiagramFile = swindle_file(&[[2, 1], [1, 1]]).parse().unwrap();
        let (rels, targets) = replay(&file).unwrap();
        assert_eq!(rels[0].display, "t + x - xr = 0");
        assert_eq!(rels[1].display, "x = 0");
        assert_eq!(rels[2].display, "t = 0");
        let (_, e, red) = &targets[0];
        assert!(red.is_zero());
        let lattice: Vec<_> = rels.iter().map(|r| r.relation.clone()).collect();
        assert!(red.verify(e, &lattice));
        for rel in file.all_computed_relations().unwrap() {
            let (a, b) = haar_relation_sides(&rel).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn broken_diagrams_are_named() {
        let text = swindle_file(&[[1, 1], [0, 1]]).replace("commute phi;inX = inX;phiCX\n", "");
        let file: DiagramFile = text.parse().unwrap();
        let e = file.relations().unwrap_err();
        assert!(matches!(e, LcaError::DiagramNotCommutative(ref s) if s.contains("yin square at rows 1-2, columns 2-3")), "{e}");
        let text = swindle_file(&[[1, 1], [0, 1]]).replace("exact inT shiftT\n", "");
        let e = text.parse::<DiagramFile>().unwrap().relations().unwrap_err();
        assert!(matches!(e, LcaError::RowOrColumnNotExact(ref s) if s == "lrr3: column 2 yin"), "{e}");
        let bad = "dses q = 0 Y Y : 0 1 / 0 1";
        assert!(matches!(bad.parse::<DiagramFile>(), Err(LcaError::Parse { line: 1, .. })));
    }
}

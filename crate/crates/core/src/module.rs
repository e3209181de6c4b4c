//! Topological right modules over orders: a carrier object with one action map per basis element.

use std::fmt;

use num_traits::Zero;

use crate::arith::Int;
use crate::error::{LcaError, Result};
use crate::morphism::{compose, LcaMorphism};
use crate::object::{Kind, LcaObject};
use crate::order::Order;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcaModule {
    pub carrier: LcaObject,
    pub order: Order,
    /// `action[i]` is `m ↦ m · b_i`.
    pub action: Vec<LcaMorphism>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleViolation {
    WrongCount { expected: usize, got: usize },
    NotAnEndomorphism(usize),
    Relation(usize, usize),
    Unit,
}

impl fmt::Display for ModuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleViolation::WrongCount { expected, got } => {
                write!(f, "expected {expected} action maps, got {got}")
            }
            ModuleViolation::NotAnEndomorphism(i) => write!(f, "action of b{} is not an endomorphism of the carrier", i + 1),
            ModuleViolation::Relation(i, j) => write!(f, "(m b{}) b{} != m (b{} b{})", i + 1, j + 1, i + 1, j + 1),
            ModuleViolation::Unit => write!(f, "the unit does not act as the identity"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjInj {
    Projective,
    Injective,
    Both,
    Neither,
    NeedsCertificate,
}

impl fmt::Display for ProjInj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl LcaModule {
    pub fn new(carrier: LcaObject, order: Order, action: Vec<LcaMorphism>) -> Self {
        LcaModule { carrier, order, action }
    }

    /// `Σ_k a_k · action[k]`.
    pub fn act(&self, a: &[Int]) -> Result<LcaMorphism> {
        let mut out = LcaMorphism::zero(self.carrier.clone(), self.carrier.clone());
        for (c, f) in a.iter().zip(&self.action) {
            if !c.is_zero() {
                out = out.add(&f.scale(c))?;
            }
        }
        Ok(out)
    }

    /// The order acting on `kind^n` through right multiplication, `n` the rank.
    pub fn regular(order: &Order, kind: Kind) -> Result<Self> {
        let n = order.rank();
        let carrier = match kind {
            Kind::R => LcaObject::real(n),
            Kind::Z => LcaObject::lattice(n),
            Kind::T => LcaObject::torus(n),
            Kind::Padic(p, pk) => LcaObject::padic(p, pk, n),
            Kind::Fin => return Err(LcaError::InvalidBlock("F".into(), "no regular finite carrier".into())),
        };
        let action = (0..n)
            .map(|i| {
                let m = order.right_mult_matrix(&order.basis_vector(i)).map(|x| x.clone().into());
                LcaMorphism::single(carrier.clone(), carrier.clone(), kind, kind, m)
            })
            .collect::<Result<_>>()?;
        Ok(LcaModule::new(carrier, order.clone(), action))
    }

    /// Each `b_i` acts as multiplication by the integer `augmentation[i]`.
    pub fn trivial(order: &Order, carrier: LcaObject, augmentation: &[Int]) -> Self {
        let id = LcaMorphism::identity(&carrier);
        let action = augmentation.iter().map(|a| id.scale(a)).collect();
        LcaModule::new(carrier, order.clone(), action)
    }
}

/// The first violated module axiom, if any.
pub fn validate_module(m: &LcaModule) -> Result<Option<ModuleViolation>> {
    let n = m.order.rank();
    if m.action.len() != n {
        return Ok(Some(ModuleViolation::WrongCount { expected: n, got: m.action.len() }));
    }
    if let Some(i) = m.action.iter().position(|f| f.source() != &m.carrier || f.target() != &m.carrier) {
        return Ok(Some(ModuleViolation::NotAnEndomorphism(i)));
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = compose(&m.action[i], &m.action[j])?;
            let coeffs: Vec<Int> = (0..n).map(|k| m.order.constant(i, j, k).clone()).collect();
            if lhs != m.act(&coeffs)? {
                return Ok(Some(ModuleViolation::Relation(i, j)));
            }
        }
    }
    if m.act(m.order.unit())? != LcaMorphism::identity(&m.carrier) {
        return Ok(Some(ModuleViolation::Unit));
    }
    Ok(None)
}

/// The dual carrier as a right module over the opposite order.
pub fn module_dual(m: &LcaModule) -> LcaModule {
    LcaModule::new(
        m.carrier.dual(),
        m.order.opposite(),
        m.action.iter().map(LcaMorphism::dual).collect(),
    )
}

pub fn classify_proj_inj(m: &LcaModule) -> ProjInj {
    let g = &m.carrier;
    let no_compact_or_padic = g.finite_part().is_empty() && g.padic_parts().is_empty();
    let rz = no_compact_or_padic && g.torus_rank() == 0;
    let rt = no_compact_or_padic && g.lattice_rank() == 0;
    match (rz, rt) {
        (true, true) => ProjInj::Both,
        (false, false) => ProjInj::Neither,
        _ if m.order.rank() != 1 => ProjInj::NeedsCertificate,
        (true, false) => ProjInj::Projective,
        (false, true) => ProjInj::Injective,
    }
}

/// Parses `order <name>`, `carrier <object>` and one `act <label> = <morphism>` line per basis element.
/// `resolve` turns the order name into an order.
pub fn parse_module(text: &str, resolve: impl Fn(&str) -> Result<Order>) -> Result<LcaModule> {
    let mut order = None;
    let mut carrier: Option<LcaObject> = None;
    let mut acts: Vec<(usize, String, LcaMorphism)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let relocate = |e: LcaError| match e {
            LcaError::Parse { col, msg, .. } => LcaError::parse(ln + 1, col, msg),
            other => other,
        };
        match key {
            "order" => order = Some(resolve(rest)?),
            "carrier" => carrier = Some(rest.parse().map_err(relocate)?),
            "act" => {
                let (label, body) = rest
                    .split_once('=')
                    .ok_or_else(|| LcaError::parse(ln + 1, 1, "expected 'act <label> = <morphism>'"))?;
                acts.push((ln + 1, label.trim().to_string(), body.trim().parse().map_err(relocate)?));
            }
            _ => return Err(LcaError::parse(ln + 1, 1, format!("unexpected keyword '{key}'"))),
        }
    }
    let order = order.ok_or_else(|| LcaError::parse(1, 1, "missing 'order'"))?;
    let carrier = carrier.ok_or_else(|| LcaError::parse(1, 1, "missing 'carrier'"))?;
    let mut action: Vec<Option<LcaMorphism>> = vec![None; order.rank()];
    for (line, label, f) in acts {
        let i = order
            .labels()
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| LcaError::parse(line, 1, format!("unknown basis label '{label}'")))?;
        action[i] = Some(f);
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.ok_or_else(|| LcaError::parse(1, 1, format!("missing action of '{}'", order.labels()[i]))))
        .collect::<Result<_>>()?;
    Ok(LcaModule::new(carrier, order, action))
}

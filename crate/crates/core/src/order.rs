//! Orders in semisimple Q-algebras given by integral structure constants.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::arith::{int, to_int, Int, Rat};
use crate::error::{LcaError, Result};
use crate::linalg::{det, solve, IntMat, RatMat};

/// A free Z-module with basis `b_1, ..., b_n` and `b_i b_j = Σ_k c[i][j][k] b_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Order {
    labels: Vec<String>,
    constants: Vec<Vec<Vec<Int>>>,
    unit: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    /// First `(i, j, k)` with `(b_i b_j) b_k != b_i (b_j b_k)`.
    pub associativity_failure: Option<(usize, usize, usize)>,
    /// First basis index where a unit law fails.
    pub unit_failure: Option<usize>,
    pub gram_determinant: Int,
}

impl OrderReport {
    pub fn is_semisimple(&self) -> bool {
        !self.gram_determinant.is_zero()
    }

    pub fn is_valid(&self) -> bool {
        self.associativity_failure.is_none() && self.unit_failure.is_none() && self.is_semisimple()
    }
}

impl fmt::Display for OrderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.associativity_failure {
            None => writeln!(f, "associative: yes")?,
            Some((i, j, k)) => writeln!(f, "associative: no (b{} b{} b{})", i + 1, j + 1, k + 1)?,
        }
        match self.unit_failure {
            None => writeln!(f, "unit: yes")?,
            Some(i) => writeln!(f, "unit: no (b{})", i + 1)?,
        }
        writeln!(f, "trace form determinant: {}", self.gram_determinant)?;
        writeln!(f, "semisimple: {}", if self.is_semisimple() { "yes" } else { "no" })?;
        write!(f, "valid: {}", if self.is_valid() { "yes" } else { "no" })
    }
}

impl Order {
    pub fn new(labels: Vec<String>, constants: Vec<Vec<Vec<Int>>>, unit: Vec<Int>) -> Result<Self> {
        let n = labels.len();
        let shaped = constants.len() == n
            && constants.iter().all(|r| r.len() == n && r.iter().all(|v| v.len() == n))
            && unit.len() == n;
        if !shaped {
            return Err(LcaError::ShapeMismatch(format!("structure constants must be {n}x{n}x{n}")));
        }
        Ok(Order { labels, constants, unit })
    }

    /// The rank one order `Z`.
    pub fn integers() -> Self {
        Order::new(vec!["1".into()], vec![vec![vec![Int::one()]]], vec![Int::one()]).unwrap()
    }

    /// `Z[G]` for a group with multiplication table `table[g][h] = gh` and identity `e`.
    pub fn group_ring(labels: Vec<String>, table: &[Vec<usize>], e: usize) -> Result<Self> {
        let n = labels.len();
        let mut c = vec![vec![vec![Int::zero(); n]; n]; n];
        for (g, row) in table.iter().enumerate() {
            for (h, &gh) in row.iter().enumerate() {
                if gh >= n {
                    return Err(LcaError::ShapeMismatch(format!("table entry {gh} out of range")));
                }
                c[g][h][gh] = Int::one();
            }
        }
        let mut unit = vec![Int::zero(); n];
        unit[e] = Int::one();
        Order::new(labels, c, unit)
    }

    /// `Z[C_n]` with basis `1, t, ..., t^(n-1)`.
    pub fn cyclic_group_ring(n: usize) -> Self {
        let labels = (0..n).map(power_label).collect();
        Order::group_ring(labels, &cyclic_table(n), 0).unwrap()
    }

    /// `Z[D_2n]` with basis `r^i s^e`, index `i + n e`.
    pub fn dihedral_group_ring(n: usize) -> Self {
        let mut labels = Vec::new();
        for e in 0..2 {
            for i in 0..n {
                labels.push(format!("{}{}", power_label_in("r", i), if e == 1 { "s" } else { "" }));
            }
        }
        labels[0] = "1".into();
        labels[n] = "s".into();
        Order::group_ring(labels, &dihedral_table(n), 0).unwrap()
    }

    /// The order spanned by integral rational matrices closed under multiplication.
    pub fn from_matrix_basis(labels: Vec<String>, basis: &[RatMat]) -> Result<Self> {
        let n = basis.len();
        let flat = |m: &RatMat| -> Vec<Rat> { m.row_vecs().into_iter().flatten().collect() };
        let cols: Vec<Vec<Rat>> = basis.iter().map(flat).collect();
        let b = RatMat::from_cols(cols.first().map_or(0, |c| c.len()), &cols);
        let coords = |m: &RatMat, what: &str| -> Result<Vec<Int>> {
            let x = solve(&b, &flat(m))
                .ok_or_else(|| LcaError::ShapeMismatch(format!("{what} leaves the span")))?;
            x.iter()
                .map(|q| to_int(q).ok_or_else(|| LcaError::ShapeMismatch(format!("{what} is not integral"))))
                .collect()
        };
        let mut c = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                c[i][j] = coords(&basis[i].mul(&basis[j]), &format!("b{} b{}", i + 1, j + 1))?;
            }
        }
        let size = basis.first().map_or(0, |m| m.rows());
        let unit = coords(&RatMat::identity(size), "the identity")?;
        Order::new(labels, c, unit)
    }

    /// `Γ_3`: integral 3×3 matrices whose entry `(i, j)` below the diagonal lies in `5^(i-j) Z`.
    pub fn gamma3() -> Self {
        let mut labels = Vec::new();
        let mut basis = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                let scale = if i > j { 5i64.pow((i - j) as u32) } else { 1 };
                let mut m = RatMat::zeros(3, 3);
                m[(i, j)] = Rat::from_integer(int(scale));
                let prefix = if scale == 1 { String::new() } else { scale.to_string() };
                labels.push(format!("{prefix}e{}{}", i + 1, j + 1));
                basis.push(m);
            }
        }
        Order::from_matrix_basis(labels, &basis).expect("closed under multiplication")
    }

    /// `Z[x]/(x^2)`, an order-shaped ring that is not semisimple.
    pub fn dual_numbers() -> Self {
        let z = Int::zero;
        let o = Int::one;
        let c = vec![vec![vec![o(), z()], vec![z(), o()]], vec![vec![z(), o()], vec![z(), z()]]];
        Order::new(vec!["1".into(), "x".into()], c, vec![o(), z()]).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Int {
        &self.constants[i][j][k]
    }

    pub fn unit(&self) -> &[Int] {
        &self.unit
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.rank()).all(|i| (0..self.rank()).all(|j| self.constants[i][j] == self.constants[j][i]))
    }

    pub fn mul(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        let n = self.rank();
        let mut out = vec![Int::zero(); n];
        for i in (0..n).filter(|&i| !a[i].is_zero()) {
            for j in (0..n).filter(|&j| !b[j].is_zero()) {
                let ab = &a[i] * &b[j];
                for (o, c) in out.iter_mut().zip(&self.constants[i][j]) {
                    *o += &ab * c;
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Int> {
        let mut v = vec![Int::zero(); self.rank()];
        v[i] = Int::one();
        v
    }

    /// Matrix of `x ↦ x a` in the basis, acting on column vectors.
    pub fn right_mult_matrix(&self, a: &[Int]) -> IntMat {
        let n = self.rank();
        let cols: Vec<Vec<Int>> = (0..n).map(|j| self.mul(&self.basis_vector(j), a)).collect();
        IntMat::from_cols(n, &cols)
    }

    /// Matrix of `x ↦ a x`.
    pub fn left_mult_matrix(&self, a: &[Int]) -> IntMat {
        let n = self.rank();
        let cols: Vec<Vec<Int>> = (0..n).map(|j| self.mul(a, &self.basis_vector(j))).collect();
        IntMat::from_cols(n, &cols)
    }

    /// Trace of the left regular representation.
    pub fn trace(&self, a: &[Int]) -> Int {
        let m = self.left_mult_matrix(a);
        (0..self.rank()).map(|i| m[(i, i)].clone()).sum()
    }

    /// `a` is invertible in `A = Q ⊗ 𝔄`.
    pub fn is_unit_in_algebra(&self, a: &[Int]) -> bool {
        !det(&self.left_mult_matrix(a).map(|x| Rat::from_integer(x.clone()))).is_zero()
    }

    pub fn opposite(&self) -> Order {
        let n = self.rank();
        let c = (0..n).map(|i| (0..n).map(|j| self.constants[j][i].clone()).collect()).collect();
        Order { labels: self.labels.clone(), constants: c, unit: self.unit.clone() }
    }
}

/// Multiplication table of `C_n`, element `i` standing for `t^i`.
pub fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()
}

/// Multiplication table of `D_2n = <r, s | r^n, s^2, s r s = r^-1>`, element `i + n e` standing for `r^i s^e`.
pub fn dihedral_table(n: usize) -> Vec<Vec<usize>> {
    let idx = |i: usize, e: usize| i % n + n * e;
    let mut table = vec![vec![0; 2 * n]; 2 * n];
    for e1 in 0..2 {
        for i1 in 0..n {
            for e2 in 0..2 {
                for i2 in 0..n {
                    let i = if e1 == 0 { i1 + i2 } else { i1 + n - i2 };
                    table[idx(i1, e1)][idx(i2, e2)] = idx(i, (e1 + e2) % 2);
                }
            }
        }
    }
    table
}

fn power_label(i: usize) -> String {
    if i == 0 {
        "1".into()
    } else {
        power_label_in("t", i)
    }
}

fn power_label_in(x: &str, i: usize) -> String {
    match i {
        0 => String::new(),
        1 => x.into(),
        _ => format!("{x}^{i}"),
    }
}

pub fn validate_order(o: &Order) -> OrderReport {
    let n = o.rank();
    let b = |i| o.basis_vector(i);
    let mut associativity_failure = None;
    'outer: for i in 0..n {
        for j in 0..n {
            let ij = o.mul(&b(i), &b(j));
            for k in 0..n {
                if o.mul(&ij, &b(k)) != o.mul(&b(i), &o.mul(&b(j), &b(k))) {
                    associativity_failure = Some((i, j, k));
                    break 'outer;
                }
            }
        }
    }
    let unit_failure = (0..n).find(|&i| o.mul(o.unit(), &b(i)) != b(i) || o.mul(&b(i), o.unit()) != b(i));
    let mut gram = RatMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = Rat::from_integer(o.trace(&o.mul(&b(i), &b(j))));
        }
    }
    let gram_determinant = det(&gram).to_integer();
    OrderReport { associativity_failure, unit_failure, gram_determinant }
}

pub fn opposite_order(o: &Order) -> Order {
    o.opposite()
}

/// Text form: `basis` labels, one `(i j k c)` line per nonzero constant (1-based), `unit` coordinates.
impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.rank();
        writeln!(f, "rank {n}")?;
        writeln!(f, "basis {}", self.labels.join(" "))?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = &self.constants[i][j][k];
                    if !c.is_zero() {
                        writeln!(f, "({} {} {} {c})", i + 1, j + 1, k + 1)?;
                    }
                }
            }
        }
        let unit: Vec<String> = self.unit.iter().map(|u| u.to_string()).collect();
        write!(f, "unit {}", unit.join(" "))
    }
}

impl FromStr for Order {
    type Err = LcaError;

    fn from_str(s: &str) -> Result<Self> {
        let mut rank: Option<usize> = None;
        let mut labels: Option<Vec<String>> = None;
        let mut triples = Vec::new();
        let mut unit: Option<Vec<Int>> = None;
        for (ln, raw) in s.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| LcaError::parse(line_no, 1, msg);
            let parse_int = |t: &str| t.parse::<Int>().map_err(|_| err(format!("expected an integer, got '{t}'")));
            if let Some(rest) = line.strip_prefix("rank") {
                rank = Some(rest.trim().parse().map_err(|_| err("expected a rank".into()))?);
            } else if let Some(rest) = line.strip_prefix("basis") {
                labels = Some(rest.split_whitespace().map(String::from).collect());
            } else if let Some(rest) = line.strip_prefix("unit") {
                unit = Some(rest.split_whitespace().map(parse_int).collect::<Result<_>>()?);
            } else if line.starts_with('(') {
                for group in line.split(')').map(str::trim).filter(|g| !g.is_empty()) {
                    let body = group
                        .strip_prefix('(')
                        .ok_or_else(|| err(format!("expected '(' in '{group}'")))?;
                    let v: Vec<Int> = body.split_whitespace().map(parse_int).collect::<Result<_>>()?;
                    if v.len() != 4 {
                        return Err(err("a structure constant is written (i j k c)".into()));
                    }
                    triples.push((line_no, v));
                }
            } else {
                return Err(err(format!("unexpected line '{line}'")));
            }
        }
        let n = rank.ok_or_else(|| LcaError::parse(1, 1, "missing 'rank'"))?;
        let labels = labels.unwrap_or_else(|| (1..=n).map(|i| format!("b{i}")).collect());
        if labels.len() != n {
            return Err(LcaError::parse(1, 1, format!("expected {n} basis labels")));
        }
        let mut c = vec![vec![vec![Int::zero(); n]; n]; n];
        for (line_no, v) in triples {
            let idx = |x: &Int| -> Result<usize> {
                usize::try_from(x)
                    .ok()
                    .filter(|&i| (1..=n).contains(&i))
                    .map(|i| i - 1)
                    .ok_or_else(|| LcaError::parse(line_no, 1, format!("index {x} out of range 1..{n}")))
            };
            c[idx(&v[0])?][idx(&v[1])?][idx(&v[2])?] = v[3].clone();
        }
        let unit = unit.ok_or_else(|| LcaError::parse(1, 1, "missing 'unit'"))?;
        if unit.len() != n {
            return Err(LcaError::parse(1, 1, format!("unit must have {n} coordinates")));
        }
        Order::new(labels, c, unit)
    }
}

/// Resolves the built-in names `Z`, `ZC<n>`, `ZD<n>` (order `2n`), `Gamma3`.
pub fn builtin_order(name: &str) -> Option<Order> {
    let num = |prefix: &str| name.strip_prefix(prefix).and_then(|r| r.parse::<usize>().ok()).filter(|&n| n >= 1);
    match name {
        "Z" => Some(Order::integers()),
        "Gamma3" => Some(Order::gamma3()),
        "Zx/x2" => Some(Order::dual_numbers()),
        _ => num("ZC")
            .map(Order::cyclic_group_ring)
            .or_else(|| num("ZD").filter(|&n| n >= 2).map(Order::dihedral_group_ring)),
    }
}

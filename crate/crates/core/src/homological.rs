//! The periodic resolution of `Z` over `Z[C_n]`, group cohomology, and the extensions `M_α`.

use num_traits::{One, Signed, Zero};

use crate::abelian::FgAbelian;
use crate::arith::{to_int, Int, Rat};
use crate::error::{LcaError, Result};
use crate::linalg::{clear_denominators, integer_kernel, left_nullspace, rank, smith, solve, solve_integer, to_rat, IntMat, RatMat};
use crate::object::LcaObject;
use crate::order::dihedral_table;

pub const DEFAULT_MAX_DEGREE: usize = 10;

/// The resolution degree cap, read from `LCAKIT_MAX_DEGREE`.
pub fn max_degree() -> usize {
    std::env::var("LCAKIT_MAX_DEGREE")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DEGREE)
}

fn check_degree(k: usize) -> Result<()> {
    let cap = max_degree();
    if k > cap {
        return Err(LcaError::DegreeTooLarge(k, cap));
    }
    Ok(())
}

/// Matrix of `y ↦ y x` on `Z[C_n]` in the basis `1, t, ..., t^(n-1)`.
pub fn circulant(x: &[Int]) -> IntMat {
    let n = x.len();
    let mut m = IntMat::zeros(n, n);
    for j in 0..n {
        for (k, c) in x.iter().enumerate() {
            m[((j + k) % n, j)] = c.clone();
        }
    }
    m
}

pub fn one_minus_t(n: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); n];
    v[0] += 1;
    v[1 % n] -= 1;
    v
}

pub fn norm_element(n: usize) -> Vec<Int> {
    vec![Int::one(); n]
}

/// `P_len --d_len--> ... --d_1--> P_0` with `d_k` multiplication by `1 - t` (odd `k`) or `N` (even `k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicResolutionSegment {
    pub n: usize,
    /// `maps[k - 1]` is `d_k`.
    pub maps: Vec<IntMat>,
}

impl CyclicResolutionSegment {
    pub fn new(n: usize, len: usize) -> Result<Self> {
        if n < 2 {
            return Err(LcaError::ShapeMismatch(format!("C_{n} needs n >= 2")));
        }
        check_degree(len.saturating_sub(1))?;
        let (a, b) = (circulant(&one_minus_t(n)), circulant(&norm_element(n)));
        let maps = (1..=len).map(|k| if k % 2 == 1 { a.clone() } else { b.clone() }).collect();
        Ok(CyclicResolutionSegment { n, maps })
    }

    pub fn differential(&self, k: usize) -> &IntMat {
        &self.maps[k - 1]
    }

    /// The augmentation `P_0 -> Z`.
    pub fn augmentation(&self) -> IntMat {
        IntMat::from_rows(1, self.n, vec![norm_element(self.n)])
    }

    /// `ker(d_k) / im(d_(k+1))` as abelian groups, with `d_0` the augmentation.
    pub fn homology(&self, k: usize) -> FgAbelian {
        let f = if k == 0 { self.augmentation() } else { self.differential(k).clone() };
        FgAbelian::homology(self.differential(k + 1), &f)
    }
}

/// `H^k(C_n, Z)` from the cochain complex `Hom_{Z[C_n]}(P_•, Z)`.
pub fn cyclic_cohomology(n: usize, k: usize) -> Result<FgAbelian> {
    check_degree(k)?;
    let res = CyclicResolutionSegment::new(n, k + 1)?;
    let t = circulant(&{
        let mut v = vec![Int::zero(); n];
        v[1 % n] = Int::one();
        v
    });
    let mut shift = t.transpose();
    for i in 0..n {
        shift[(i, i)] -= 1;
    }
    let basis = IntMat::from_cols(n, &integer_kernel(&shift));
    let restrict = |d: &IntMat| -> IntMat {
        let image = d.transpose().mul(&basis);
        let cols: Vec<Vec<Int>> = (0..image.cols())
            .map(|j| solve_integer(&basis, &image.col(j)).expect("invariants map to invariants"))
            .collect();
        IntMat::from_cols(basis.cols(), &cols)
    };
    let r = basis.cols();
    let incoming = if k == 0 { IntMat::zeros(r, 0) } else { restrict(res.differential(k)) };
    let outgoing = restrict(res.differential(k + 1));
    Ok(FgAbelian::homology(&incoming, &outgoing))
}

/// The closed form `Z, 0, Z/n, 0, Z/n, ...`.
pub fn cyclic_cohomology_closed_form(n: usize, k: usize) -> FgAbelian {
    match k {
        0 => FgAbelian::free(1),
        _ if k % 2 == 1 => FgAbelian::zero(),
        _ => FgAbelian::cyclic(&Int::from(n)),
    }
}

fn rank_mod_p(m: &IntMat, p: u64) -> usize {
    let pi = Int::from(p);
    let mut rows: Vec<Vec<u64>> = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| {
                    let r = ((x % &pi) + &pi) % &pi;
                    u64::try_from(&r).expect("reduced")
                })
                .collect()
        })
        .collect();
    let inv = |a: u64| -> u64 {
        let (mut base, mut e, mut acc) = (a, p - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    let mut r = 0;
    for c in 0..m.cols() {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, piv);
        let s = inv(rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = *x * s % p;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        r += 1;
    }
    r
}

/// `δ: C^k -> C^(k+1)` on inhomogeneous cochains with trivial coefficients `Z`.
fn coboundary(table: &[Vec<usize>], k: usize) -> IntMat {
    let g = table.len();
    let (rows, cols) = (g.pow(k as u32 + 1), g.pow(k as u32));
    let mut m = IntMat::zeros(rows, cols);
    let encode = |t: &[usize]| t.iter().fold(0, |acc, &x| acc * g + x);
    let mut tuple = vec![0; k + 1];
    for row in 0..rows {
        let mut x = row;
        for slot in tuple.iter_mut().rev() {
            *slot = x % g;
            x /= g;
        }
        m[(row, encode(&tuple[1..]))] += 1;
        for i in 0..k {
            let mut merged: Vec<usize> = tuple[..i].to_vec();
            merged.push(table[tuple[i]][tuple[i + 1]]);
            merged.extend_from_slice(&tuple[i + 2..]);
            let sign = if i % 2 == 0 { -1 } else { 1 };
            m[(row, encode(&merged))] += sign;
        }
        let sign = if k % 2 == 0 { -1 } else { 1 };
        m[(row, encode(&tuple[..k]))] += sign;
    }
    m
}

/// Largest number of cochain coordinates the bar complex is built with.
pub const BAR_LIMIT: usize = 40_000;

/// `H^k(G, Z)` for a finite group given by its multiplication table, via the bar complex.
pub fn group_cohomology(table: &[Vec<usize>], k: usize) -> Result<FgAbelian> {
    let g = table.len();
    if g.checked_pow(k as u32 + 1).is_none_or(|s| s > BAR_LIMIT) {
        let cap = (0..).take_while(|&d: &usize| g.pow(d as u32 + 1) <= BAR_LIMIT).last().unwrap_or(0);
        return Err(LcaError::DegreeTooLarge(k, cap));
    }
    check_degree(k)?;
    let dim = g.pow(k as u32);
    let out = coboundary(table, k);
    let (incoming_rank, torsion) = if k == 0 {
        (0, Vec::new())
    } else {
        let s = smith(&coboundary(table, k - 1));
        let torsion = s.diag.iter().filter(|d| !d.is_zero() && !d.abs().is_one()).map(|d| d.abs()).collect();
        (s.rank(), torsion)
    };
    let bound = dim - incoming_rank;
    let out_rank = [2_147_483_647u64, 1_000_000_007, 998_244_353]
        .iter()
        .map(|&p| rank_mod_p(&out, p))
        .find(|&r| r == bound)
        .unwrap_or_else(|| rank(&to_rat(&out)));
    Ok(FgAbelian { free_rank: dim - out_rank - incoming_rank, torsion: crate::abelian::invariant_factors(&torsion) })
}

/// `H^2(D_2n, Z)`.
pub fn dihedral_h2(n: usize) -> Result<FgAbelian> {
    group_cohomology(&dihedral_table(n), 2)
}

/// `M_α = (Z[C_n] + R[C_n]/N_G) / {(x(1-t), x̄ α)}` with its maps `R[C_n]/N_G ↪ M_α ↠ Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionPresentation {
    pub n: usize,
    pub alpha: Int,
    /// `x ↦ x(1 - t)` on `Z[C_n]`.
    pub relation: IntMat,
    /// `x ↦ x̄ α`.
    pub gluing: IntMat,
    /// `N`, generating the lattice `N_G` inside `R[C_n]`.
    pub norm: Vec<Int>,
}

/// A `Z[C_n]`-linear section `1 ↦ (a, b)` of `M_α ↠ Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub a: Vec<Int>,
    pub b: Vec<Rat>,
}

impl ExtensionPresentation {
    /// Underlying group of `R[C_n]/N_G`.
    pub fn sub_shape(&self) -> LcaObject {
        LcaObject::real(self.n - 1).sum(&LcaObject::torus(1))
    }

    pub fn mid_shape(&self) -> LcaObject {
        self.sub_shape().sum(&LcaObject::lattice(1))
    }

    pub fn quot_shape(&self) -> LcaObject {
        LcaObject::lattice(1)
    }

    /// The class in `Z/n` read off the gluing: the augmentation of `1̄ α`, mod `n`.
    pub fn extension_class(&self) -> Int {
        let s: Int = self.gluing.col(0).iter().sum();
        crate::arith::mod_floor(&s, &Int::from(self.n))
    }
}

pub fn build_m_alpha(n: usize, alpha: &Int) -> Result<ExtensionPresentation> {
    if n < 2 {
        return Err(LcaError::ShapeMismatch(format!("C_{n} needs n >= 2")));
    }
    let alpha = crate::arith::mod_floor(alpha, &Int::from(n));
    let mut a = vec![Int::zero(); n];
    a[0] = alpha.clone();
    Ok(ExtensionPresentation {
        n,
        alpha,
        relation: circulant(&one_minus_t(n)),
        gluing: circulant(&a),
        norm: norm_element(n),
    })
}

/// Solves `Σ a = 1` and `b(1 - t) = ā α` in `R[C_n]/N_G`, which is what `t`-invariance of `(a, b)` demands.
pub fn find_section(ext: &ExtensionPresentation) -> Option<Section> {
    let n = ext.n;
    let rel = to_rat(&ext.relation);
    let (_, ell) = clear_denominators(&left_nullspace(&rel));
    let mut rows = vec![{
        let mut r = norm_element(n);
        r.push(Int::zero());
        r
    }];
    let mut rhs = vec![Int::one()];
    for l in &ell {
        let mut r: Vec<Int> = (0..n).map(|j| l.iter().zip(ext.gluing.col(j)).map(|(x, y)| x * y).sum()).collect();
        r.push(-l.iter().zip(&ext.norm).map(|(x, y)| x * y).sum::<Int>());
        rows.push(r);
        rhs.push(Int::zero());
    }
    let system = IntMat::from_rows(rows.len(), n + 1, rows);
    let z = solve_integer(&system, &rhs)?;
    let (a, c) = (z[..n].to_vec(), &z[n]);
    let target: Vec<Rat> = (0..n)
        .map(|i| {
            let ga: Int = (0..n).map(|j| &ext.gluing[(i, j)] * &a[j]).sum();
            Rat::from_integer(ga - c * &ext.norm[i])
        })
        .collect();
    let b = solve(&rel, &target).expect("the left nullspace conditions hold");
    Some(Section { a, b })
}

pub fn splits_algebraically(ext: &ExtensionPresentation) -> bool {
    find_section(ext).is_some()
}

/// Chain maps from the resolution to `R[C_n]/N_G[1]` modulo homotopy, counted.
///
/// A chain map is `v = α(1)` with `v N ∈ N_G`; homotopies add `w(1 - t)`. Modulo the real span of
/// `R[C_n](1 - t)` both lattices live on the line cut out by the left nullspace of `1 - t`.
pub fn ext1_count(n: usize) -> Result<Int> {
    if n < 2 {
        return Err(LcaError::ShapeMismatch(format!("C_{n} needs n >= 2")));
    }
    let rel = to_rat(&circulant(&one_minus_t(n)));
    let ell = left_nullspace(&rel);
    if ell.len() != 1 {
        return Err(LcaError::ShapeMismatch("cokernel of 1 - t is not a line".into()));
    }
    let proj = RatMat::from_rows(1, n, ell);
    let norm_map = to_rat(&circulant(&norm_element(n)));
    let pt = proj.transpose();
    let m_rows: Vec<Rat> = (0..n)
        .map(|i| solve(&pt, &norm_map.row(i).to_vec()).map(|x| x[0].clone()))
        .collect::<Option<_>>()
        .ok_or_else(|| LcaError::ShapeMismatch("N does not factor through the cokernel".into()))?;
    if m_rows.iter().all(Zero::is_zero) {
        return Err(LcaError::ShapeMismatch("N vanishes on the cokernel".into()));
    }
    let e0: Vec<Rat> = (0..n).map(|i| if i == 0 { Rat::one() } else { Rat::zero() }).collect();
    let cycle_gen = proj.mul_vec(&e0)[0].clone();
    let norm: Vec<Rat> = norm_element(n).into_iter().map(Rat::from_integer).collect();
    let boundary_gen = proj.mul_vec(&norm)[0].clone();
    to_int(&(boundary_gen / cycle_gen).abs())
        .ok_or_else(|| LcaError::ShapeMismatch("boundaries are not inside the cycles".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::cyclic_table;
    use crate::arith::int;

    fn show(g: &FgAbelian) -> String {
        g.to_string()
    }

    #[test]
    fn cohomology_examples() {
        assert_eq!(show(&cyclic_cohomology(5, 2).unwrap()), "Z/5");
        assert_eq!(show(&cyclic_cohomology(7, 0).unwrap()), "Z");
        assert_eq!(show(&cyclic_cohomology(4, 3).unwrap()), "0");
        assert_eq!(show(&cyclic_cohomology(6, 4).unwrap()), "Z/6");
        assert!(matches!(cyclic_cohomology(3, 11), Err(LcaError::DegreeTooLarge(11, 10))));
    }

    #[test]
    fn resolution_is_exact() {
        for n in 2..=12 {
            let res = CyclicResolutionSegment::new(n, 5).unwrap();
            for k in 1..5 {
                assert!(res.differential(k).mul(res.differential(k + 1)).is_zero());
            }
            for k in 0..4 {
                assert!(res.homology(k).is_zero(), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn bar_complex_agrees() {
        for n in 2..=5 {
            for k in 0..=2 {
                assert_eq!(group_cohomology(&cyclic_table(n), k).unwrap(), cyclic_cohomology(n, k).unwrap());
            }
        }
    }

    #[test]
    fn dihedral() {
        assert_eq!(show(&dihedral_h2(3).unwrap()), "Z/2");
        assert_eq!(show(&dihedral_h2(4).unwrap()), "Z/2 + Z/2");
    }

    #[test]
    fn m_alpha() {
        let e = build_m_alpha(4, &int(0)).unwrap();
        let s = find_section(&e).unwrap();
        assert_eq!(s.a.iter().sum::<Int>(), int(1));
        assert!(!splits_algebraically(&build_m_alpha(4, &int(2)).unwrap()));
        assert!(!splits_algebraically(&build_m_alpha(3, &int(1)).unwrap()));
        assert!(splits_algebraically(&build_m_alpha(3, &int(3)).unwrap()));
        let e = build_m_alpha(4, &int(1)).unwrap();
        assert_eq!(e.gluing[(0, 0)], int(1));
        assert_eq!(e.extension_class(), int(1));
        assert_eq!(e.sub_shape().to_string(), "R^3 + T");
        assert_eq!(build_m_alpha(2, &int(-1)).unwrap().alpha, int(1));
    }

    #[test]
    fn ext1() {
        for n in 2..=8 {
            assert_eq!(ext1_count(n).unwrap(), Int::from(n));
        }
    }
}

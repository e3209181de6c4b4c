//! Dense exact matrices over `Z` and `Q`: Smith normal form, integer kernels,
//! and rational elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{common_denominator, ext_gcd, Int, Rat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMat = Mat<Int>;
pub type RatMat = Mat<Rat>;

impl<T: Clone + Zero> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<T>>) -> Self {
        assert_eq!(entries.len(), rows, "row count");
        let mut data = Vec::with_capacity(rows * cols);
        for r in entries {
            assert_eq!(r.len(), cols, "column count");
            data.extend(r);
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix whose columns are `cols` (each of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Self {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// Submatrix with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Mat::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Mat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Stacks `self` above `other`.
    pub fn vcat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }
}

impl<T: Clone + Zero + One> Mat<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut m: Mat<T> = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a.clone() * &other[(k, j)];
                    m[(i, j)] = m[(i, j)].clone() + t;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b)
            })
            .collect()
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            f.write_str(if i == 0 { ": " } else { "; " })?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        f.write_str("]")
    }
}

pub fn to_rat(m: &IntMat) -> RatMat {
    m.map(|x| Rat::from_integer(x.clone()))
}

// ---------------------------------------------------------------------------
// Integer algorithms

/// Result of [`smith`]: `u * a * v = d` with `u`, `v` unimodular and `d`
/// diagonal with non-negative entries `d_0 | d_1 | ...`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<Int>,
    pub u: IntMat,
    pub v: IntMat,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

fn row_combine(m: &mut IntMat, i: usize, j: usize, a: &Int, b: &Int, c: &Int, d: &Int) {
    // (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
    for k in 0..m.cols() {
        let x = m[(i, k)].clone();
        let y = m[(j, k)].clone();
        m[(i, k)] = a * &x + b * &y;
        m[(j, k)] = c * &x + d * &y;
    }
}

fn col_combine(m: &mut IntMat, i: usize, j: usize, a: &Int, b: &Int, c: &Int, d: &Int) {
    // (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j)
    for k in 0..m.rows() {
        let x = m[(k, i)].clone();
        let y = m[(k, j)].clone();
        m[(k, i)] = a * &x + b * &y;
        m[(k, j)] = c * &x + d * &y;
    }
}

/// A unimodular `[[x, y], [c, e]]` sending `(a, b)` to `(gcd, 0)`; plain subtraction when `a | b`.
fn elimination(a: &Int, b: &Int) -> (Int, Int, Int, Int) {
    if b.is_multiple_of(a) {
        return (Int::one(), Int::zero(), -(b / a), Int::one());
    }
    let (g, x, y) = ext_gcd(a, b);
    (x, y, -(b / &g), a / &g)
}

/// Smith normal form with transforms.
pub fn smith(a: &IntMat) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMat::identity(m);
    let mut v = IntMat::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero |entry| in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[(i, j)].is_zero()
                    && best.map_or(true, |(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (x, y, c, e) = elimination(&d[(t, t)], &d[(i, t)]);
                row_combine(&mut d, t, i, &x, &y, &c, &e);
                row_combine(&mut u, t, i, &x, &y, &c, &e);
                changed = true;
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (x, y, c, e) = elimination(&d[(t, t)], &d[(t, j)]);
                col_combine(&mut d, t, j, &x, &y, &c, &e);
                col_combine(&mut v, t, j, &x, &y, &c, &e);
                changed = true;
            }
            if !changed {
                // divisibility of the rest of the block
                let piv = d[(t, t)].clone();
                let mut bad = None;
                'scan: for i in t + 1..m {
                    for j in t + 1..n {
                        if !d[(i, j)].is_multiple_of(&piv) {
                            bad = Some(i);
                            break 'scan;
                        }
                    }
                }
                match bad {
                    Some(i) => {
                        // add row i into row t and repeat
                        let one = Int::one();
                        let zero = Int::zero();
                        row_combine(&mut d, t, i, &one, &one, &zero, &one);
                        row_combine(&mut u, t, i, &one, &one, &zero, &one);
                    }
                    None => break,
                }
            }
        }
        if d[(t, t)].is_negative() {
            for j in 0..n {
                d[(t, j)] = -&d[(t, j)];
            }
            for j in 0..m {
                u[(t, j)] = -&u[(t, j)];
            }
        }
        t += 1;
    }
    let diag = (0..m.min(n)).map(|i| d[(i, i)].clone()).collect();
    Smith { diag, u, v }
}

/// A Z-basis (as columns) of `{x in Z^n : a x = 0}`.
pub fn integer_kernel(a: &IntMat) -> Vec<Vec<Int>> {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut u = IntMat::identity(n);
    let mut pc = 0;
    for r in 0..m {
        if pc >= n {
            break;
        }
        for j in pc + 1..n {
            if w[(r, j)].is_zero() {
                continue;
            }
            if w[(r, pc)].is_zero() {
                w.swap_cols(pc, j);
                u.swap_cols(pc, j);
                continue;
            }
            let (x, y, c, e) = elimination(&w[(r, pc)], &w[(r, j)]);
            col_combine(&mut w, pc, j, &x, &y, &c, &e);
            col_combine(&mut u, pc, j, &x, &y, &c, &e);
        }
        if !w[(r, pc)].is_zero() {
            pc += 1;
        }
    }
    (pc..n).map(|j| u.col(j)).collect()
}

/// Some integer solution of `a x = b`, if one exists.
pub fn solve_integer(a: &IntMat, b: &[Int]) -> Option<Vec<Int>> {
    let s = smith(a);
    let ub = s.u.mul_vec(b);
    let n = a.cols();
    let mut y = vec![Int::zero(); n];
    for (i, c) in ub.iter().enumerate() {
        let d = s.diag.get(i).cloned().unwrap_or_else(Int::zero);
        if d.is_zero() {
            if !c.is_zero() {
                return None;
            }
        } else {
            let (q, r) = c.div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Scales a rational vector family to integers by a common positive factor.
pub fn clear_denominators(vs: &[Vec<Rat>]) -> (Int, Vec<Vec<Int>>) {
    let den = common_denominator(vs.iter().flatten());
    let out = vs
        .iter()
        .map(|v| v.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect())
        .collect();
    (den, out)
}

// ---------------------------------------------------------------------------
// Rational algorithms

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(a: &RatMat) -> (RatMat, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r >= m.rows() {
            break;
        }
        let Some(p) = (r..m.rows()).find(|&i| !m[(i, c)].is_zero()) else { continue };
        m.swap_rows(r, p);
        let inv = m[(r, c)].recip();
        for j in 0..m.cols() {
            m[(r, j)] = &m[(r, j)] * &inv;
        }
        for i in 0..m.rows() {
            if i != r && !m[(i, c)].is_zero() {
                let f = m[(i, c)].clone();
                for j in 0..m.cols() {
                    let t = &f * &m[(r, j)];
                    m[(i, j)] = &m[(i, j)] - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &RatMat) -> usize {
    rref(a).1.len()
}

/// A basis of the right null space `{x : a x = 0}`.
pub fn nullspace(a: &RatMat) -> Vec<Vec<Rat>> {
    let (r, pivots) = rref(a);
    let n = a.cols();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); n];
            x[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r[(i, f)].clone();
            }
            x
        })
        .collect()
}

/// A basis of the left null space `{y : y a = 0}` (as row vectors).
pub fn left_nullspace(a: &RatMat) -> Vec<Vec<Rat>> {
    nullspace(&a.transpose())
}

/// Some solution of `a x = b`.
pub fn solve(a: &RatMat, b: &[Rat]) -> Option<Vec<Rat>> {
    let bm = RatMat::from_cols(a.rows(), &[b.to_vec()]);
    let aug = a.hcat(&bm);
    let (r, pivots) = rref(&aug);
    let n = a.cols();
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[(i, n)].clone();
    }
    Some(x)
}

pub fn det(a: &RatMat) -> Rat {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    let mut m = a.clone();
    let n = m.rows();
    let mut acc = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Rat::zero() };
        if p != c {
            m.swap_rows(p, c);
            acc = -acc;
        }
        let piv = m[(c, c)].clone();
        acc *= &piv;
        for i in c + 1..n {
            if !m[(i, c)].is_zero() {
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let t = &f * &m[(c, j)];
                    m[(i, j)] = &m[(i, j)] - t;
                }
            }
        }
    }
    acc
}

pub fn inverse(a: &RatMat) -> Option<RatMat> {
    let n = a.rows();
    if n != a.cols() {
        return None;
    }
    if n == 0 {
        return Some(RatMat::identity(0));
    }
    let aug = a.hcat(&RatMat::identity(n));
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Some(r.select(&rows, &cols))
}

/// A basis (subset-free, echelon) of the span of `vs`, each of length `dim`.
pub fn span_basis(dim: usize, vs: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let m = RatMat::from_rows(vs.len(), dim, vs.to_vec());
    let (r, pivots) = rref(&m);
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

/// A Z-basis of the subgroup of `Q^dim` generated by `vs`.
pub fn lattice_basis(dim: usize, vs: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let (den, ints) = clear_denominators(vs);
    let s = smith(&IntMat::from_cols(dim, &ints));
    let uinv = inverse(&to_rat(&s.u)).expect("unimodular");
    let den = Rat::from_integer(den);
    (0..s.rank())
        .map(|j| {
            let d = Rat::from_integer(s.diag[j].clone()) / &den;
            uinv.col(j).into_iter().map(|x| x * &d).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn im(rows: Vec<Vec<i64>>) -> IntMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        IntMat::from_rows(r, c, rows.into_iter().map(|x| x.into_iter().map(int).collect()).collect())
    }

    #[test]
    fn smith_of_small_matrices() {
        let a = im(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![int(2), int(6), int(12)]);
        let d = s.u.mul(&a).mul(&s.v);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { s.diag[i].clone() } else { int(0) };
                assert_eq!(d[(i, j)], expect);
            }
        }
    }

    #[test]
    fn smith_forces_divisibility() {
        let a = im(vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(smith(&a).diag, vec![int(1), int(6)]);
    }

    #[test]
    fn kernel_is_a_basis() {
        let a = im(vec![vec![1, 2, 3], vec![2, 4, 6]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        // (3, 0, -1) must be an integer combination
        let basis = IntMat::from_cols(3, &k);
        assert!(solve_integer(&basis, &[int(3), int(0), int(-1)]).is_some());
    }

    #[test]
    fn integer_solvability() {
        let a = im(vec![vec![2, 4]]);
        assert!(solve_integer(&a, &[int(6)]).is_some());
        assert!(solve_integer(&a, &[int(3)]).is_none());
    }

    #[test]
    fn rational_elimination() {
        let a = RatMat::from_rows(2, 2, vec![vec![rat(1, 2), rat(1, 1)], vec![rat(3, 1), rat(4, 1)]]);
        assert_eq!(det(&a), rat(-1, 1));
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), RatMat::identity(2));
        let x = solve(&a, &[rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![rat(1, 1), rat(0, 1)]);
        let sing = RatMat::from_rows(1, 2, vec![vec![rat(1, 1), rat(2, 1)]]);
        let ns = nullspace(&sing);
        assert_eq!(ns.len(), 1);
        assert!(sing.mul_vec(&ns[0])[0].is_zero());
    }
}

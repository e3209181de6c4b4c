//! Finitely generated abelian groups in invariant-factor form.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{factorize, pow_int, Int};
use crate::linalg::{integer_kernel, smith, IntMat};

/// `Z^free_rank + Z/d_1 + ... + Z/d_k` with `d_1 | ... | d_k`, each `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FgAbelian {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

impl FgAbelian {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbelian { free_rank: rank, torsion: Vec::new() }
    }

    pub fn cyclic(n: &Int) -> Self {
        if n.is_zero() {
            Self::free(1)
        } else {
            FgAbelian { free_rank: 0, torsion: invariant_factors(std::slice::from_ref(n)) }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<Int> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Cokernel of `rel : Z^m -> Z^n`, i.e. `Z^n / rel(Z^m)`.
    pub fn cokernel(rel: &IntMat) -> Self {
        let s = smith(rel);
        let n = rel.rows();
        let nonzero: Vec<Int> = s.diag.iter().filter(|d| !d.is_zero()).cloned().collect();
        let free_rank = n - nonzero.len();
        FgAbelian { free_rank, torsion: nonzero.into_iter().filter(|d| !d.is_one()).collect() }
    }

    /// Homology `ker(f) / im(g)` at the middle of `Z^a --g--> Z^b --f--> Z^c`.
    pub fn homology(g: &IntMat, f: &IntMat) -> Self {
        assert_eq!(f.cols(), g.rows(), "composable maps");
        let b = f.cols();
        let ker = integer_kernel(f);
        if ker.is_empty() {
            return Self::zero();
        }
        let k = IntMat::from_cols(b, &ker);
        // express im(g) in kernel coordinates: solve k * y = g e_j
        let mut coords = Vec::with_capacity(g.cols());
        for j in 0..g.cols() {
            let col = g.col(j);
            let y = crate::linalg::solve_integer(&k, &col).expect("image lies in the kernel");
            coords.push(y);
        }
        let rel = IntMat::from_cols(ker.len(), &coords);
        Self::cokernel(&rel)
    }
}

impl fmt::Display for FgAbelian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Invariant factors of `Z/n_1 + ... + Z/n_k` (positive `n_i`; ones dropped).
pub fn invariant_factors(orders: &[Int]) -> Vec<Int> {
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for n in orders {
        assert!(n.is_positive(), "finite cyclic orders are positive");
        for (p, e) in factorize(n) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![Int::one(); len];
    for (p, mut es) in by_prime {
        es.sort_unstable_by(|a, b| b.cmp(a));
        for (i, e) in es.into_iter().enumerate() {
            // largest exponent goes into the last factor
            out[len - 1 - i] *= pow_int(p, e);
        }
    }
    out
}

/// Primary decomposition `[(p, [e_1, ...])]` of an invariant-factor list.
pub fn primary_exponents(factors: &[Int]) -> BTreeMap<u64, Vec<u32>> {
    let mut out: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for d in factors {
        for (p, e) in factorize(d) {
            out.entry(p).or_default().push(e);
        }
    }
    out
}

//! Exact integer and rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: Int) -> Rat {
    BigRational::from_integer(n)
}

/// Non-negative remainder of `a` modulo `m` (`m > 0`).
pub fn mod_floor(a: &Int, m: &Int) -> Int {
    a.mod_floor(m)
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn ext_gcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &Int, m: &Int) -> Option<Int> {
    if m.is_one() {
        return Some(Int::zero());
    }
    let (g, x, _) = ext_gcd(&mod_floor(a, m), m);
    if g.is_one() {
        Some(mod_floor(&x, m))
    } else {
        None
    }
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &Int, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = Int::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn valuation(q: &Rat, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(int_valuation(q.numer(), p) as i64 - int_valuation(q.denom(), p) as i64)
}

pub fn is_p_integral(q: &Rat, p: u64) -> bool {
    q.is_zero() || int_valuation(q.denom(), p) == 0
}

pub fn pow_int(p: u64, e: u32) -> Int {
    num_traits::pow(Int::from(p), e as usize)
}

/// Representative of `q mod 1` in `[0, 1)`.
pub fn frac_mod_one(q: &Rat) -> Rat {
    q - q.floor()
}

/// Representative of `q mod Z_(p)` of the form `b / p^k` with `0 <= b < p^k`.
pub fn frac_p(q: &Rat, p: u64) -> Rat {
    if q.is_zero() {
        return Rat::zero();
    }
    let k = int_valuation(q.denom(), p);
    if k == 0 {
        return Rat::zero();
    }
    let pk = pow_int(p, k);
    let m = q.denom() / &pk;
    let m_inv = mod_inverse(&m, &pk).expect("cofactor is prime to p");
    let b = mod_floor(&(q.numer() * m_inv), &pk);
    Rat::new(b, pk)
}

/// `|q|_p = p^{-v_p(q)}` for nonzero `q`.
pub fn padic_abs(q: &Rat, p: u64) -> Rat {
    let v = valuation(q, p).expect("nonzero");
    if v >= 0 {
        Rat::new(Int::one(), pow_int(p, v as u32))
    } else {
        rat_int(pow_int(p, (-v) as u32))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(n: &Int) -> Vec<(u64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = 2u64;
    loop {
        let dd = Int::from(d);
        if &dd * &dd > n {
            break;
        }
        let mut e = 0;
        while (&n % &dd).is_zero() {
            n /= &dd;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        out.push((n.to_u64().expect("prime factor fits in u64"), 1));
    }
    out
}

/// Least common multiple of the denominators of `qs` (1 for an empty list).
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rat>) -> Int {
    qs.into_iter().fold(Int::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn to_int(q: &Rat) -> Option<Int> {
    if q.is_integer() {
        Some(q.numer().clone())
    } else {
        None
    }
}

/// Prints a rational as `n` or `n/d`.
pub fn fmt_rat(q: &Rat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `n`, `-n`, or `n/d`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = n.parse().ok()?;
    let d: Int = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

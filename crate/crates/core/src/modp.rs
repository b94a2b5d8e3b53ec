//! Fixed-prime modular arithmetic used to accelerate the constraint stage
//! when trajectory values grow too large for exact elimination.
//!
//! Kernels computed here are only candidates: callers verify every candidate
//! exactly, so wrong residues can cost time but never correctness. The prime
//! list is fixed to keep runs deterministic.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{Int, Rational};

/// Fixed 58..64-bit primes, used in order until rational reconstruction of
/// the kernel succeeds.
pub(crate) const PRIMES: [u64; 6] = [
    18446744073709551557, // 2^64 - 59
    18446744069414584321, // 2^64 - 2^32 + 1
    9223372036854775783,  // 2^63 - 25
    4611686018427387847,  // 2^62 - 57
    2305843009213693951,  // 2^61 - 1
    1152921504606846883,  // 2^60 - 93
];

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128) % p as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Inverse by Fermat; `a` must be nonzero mod the (prime) modulus.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub(crate) fn int_mod(n: &Int, p: u64) -> u64 {
    let base = ((u64::MAX as u128 + 1) % p as u128) as u64;
    let mut acc: u64 = 0;
    let digits: Vec<u64> = n.magnitude().iter_u64_digits().collect();
    for d in digits.iter().rev() {
        acc = add_mod(mul_mod(acc, base, p), *d % p, p);
    }
    if n.is_negative() && acc != 0 {
        acc = p - acc;
    }
    acc
}

/// Residue of a rational; None when the denominator vanishes mod p.
pub(crate) fn rational_mod(q: &Rational, p: u64) -> Option<u64> {
    let den = int_mod(q.denom(), p);
    if den == 0 {
        return None;
    }
    Some(mul_mod(int_mod(q.numer(), p), inv_mod(den, p), p))
}

/// Canonical kernel of a matrix mod p: (pivot columns, basis vectors with 1
/// in their own free position and 0 in the others), mirroring the exact
/// rational kernel convention.
pub(crate) fn kernel_mod(rows: &[Vec<u64>], cols: usize, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = inv_mod(m[r][c], p);
        for j in c..cols {
            m[r][j] = mul_mod(m[r][j], inv, p);
        }
        for i in 0..nrows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in c..cols {
                    m[i][j] = sub_mod(m[i][j], mul_mod(f, m[r][j], p), p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in 0..cols {
        if is_pivot[f] {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = sub_mod(0, m[row][f], p);
        }
        basis.push(v);
    }
    (pivots, basis)
}

/// Chinese remainder combination of one residue per prime; returns the
/// combined residue and the product modulus.
pub(crate) fn crt(residues: &[(u64, u64)]) -> (Int, Int) {
    let mut x = Int::zero();
    let mut m = Int::one();
    for &(r, p) in residues {
        let pi = Int::from(p);
        let xr = int_mod(&x, p);
        let diff = sub_mod(r, xr, p);
        let minv = inv_mod(int_mod(&m, p), p);
        let t = mul_mod(diff, minv, p);
        x += &m * Int::from(t);
        m *= pi;
    }
    (x, m)
}

/// Rational reconstruction: the unique n/d with |n|, d <= sqrt(m/2) and
/// n == r*d mod m, if one exists.
pub(crate) fn rational_reconstruct(r: &Int, m: &Int) -> Option<Rational> {
    let r = r.mod_floor(m);
    if r.is_zero() {
        return Some(Rational::zero());
    }
    let bound = (m / Int::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r);
    let (mut s0, mut s1) = (Int::zero(), Int::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    let num = if s1.is_negative() { -r1 } else { r1 };
    let den = s1.abs();
    if den.is_zero() || den > bound {
        return None;
    }
    if num.gcd(&den) != Int::one() {
        return None;
    }
    Some(Rational::new_raw(num, den))
}

/// Value of a monomial (given by exponents) at a residue point.
pub(crate) fn monomial_mod(exps: &[u32], point: &[u64], p: u64) -> u64 {
    let mut acc = 1 % p;
    for (e, x) in exps.iter().zip(point) {
        if *e > 0 {
            acc = mul_mod(acc, pow_mod(*x, *e as u64, p), p);
        }
    }
    acc
}

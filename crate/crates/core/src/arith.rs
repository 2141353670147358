//! Integer utilities: factorization, the Möbius function and conductor validation.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ConductorIssue, Error, Result};

/// Trial division bound before falling back to Pollard's rho.
const TRIAL_LIMIT: u64 = 1_000_000;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard's rho; `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Prime factorization `value = prod p^e`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }
}

pub fn factorize(m: u64) -> Factorization {
    assert!(m >= 1, "factorize requires m >= 1");
    let mut primes = Vec::new();
    let mut rest = m;
    for p in [2u64, 3] {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
    }
    let mut d = 5u64;
    while d <= TRIAL_LIMIT && d * d <= rest {
        for q in [d, d + 2] {
            while rest.is_multiple_of(q) {
                primes.push(q);
                rest /= q;
            }
        }
        d += 6;
    }
    if rest > 1 {
        if d * d > rest {
            primes.push(rest);
        } else {
            split_large(rest, &mut primes);
        }
    }
    primes.sort_unstable();

    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { value: m, factors }
}

pub fn moebius(m: u64) -> i8 {
    let fac = factorize(m);
    if !fac.is_squarefree() {
        0
    } else if fac.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(fac: &Factorization) -> u64 {
    fac.factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Smallest primitive root modulo an odd prime power `p^e`.
pub fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let q = p.pow(e);
    let phi = (p - 1) * p.pow(e - 1);
    let phi_primes: Vec<u64> = factorize(phi).primes().collect();
    (2..q)
        .find(|&g| g % p != 0 && phi_primes.iter().all(|&r| pow_mod(g, phi / r, q) != 1))
        .expect("odd prime powers have primitive roots")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ramification {
    Tame,
    Wild,
}

impl fmt::Display for Ramification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ramification::Tame => "tame",
            Ramification::Wild => "wild",
        })
    }
}

/// A validated conductor of a cyclic cubic field: `p_1...p_nu` or `9 p_1...p_nu`
/// with distinct primes `p_i = 1 (mod 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conductor {
    pub value: u64,
    pub kind: Ramification,
    pub odd_primes: Vec<u64>,
}

impl Conductor {
    pub fn nu(&self) -> usize {
        self.odd_primes.len()
    }

    pub fn is_wild(&self) -> bool {
        self.kind == Ramification::Wild
    }

    /// `p_1 ... p_nu`, i.e. the conductor with its 3-part removed.
    pub fn prime_product(&self) -> u64 {
        self.odd_primes.iter().product()
    }

    /// `mu(f)` in the tame case and `mu(f/9)` in the wild case; always +-1.
    pub fn mu(&self) -> i64 {
        if self.nu().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Prime-power components of `(Z/fZ)^x`, 9 first when wild.
    pub fn components(&self) -> Vec<(u64, u32)> {
        let mut out = Vec::with_capacity(self.nu() + 1);
        if self.is_wild() {
            out.push((3, 2));
        }
        out.extend(self.odd_primes.iter().map(|&p| (p, 1)));
        out
    }

    /// Number of cyclic cubic fields with this conductor.
    pub fn field_count(&self) -> usize {
        match self.kind {
            Ramification::Tame => 1 << (self.nu() - 1),
            Ramification::Wild => 1 << self.nu(),
        }
    }
}

pub fn validate_conductor(f: u64) -> Result<Conductor> {
    let invalid = |reason| Error::InvalidConductor { value: f, reason };
    if f == 0 {
        return Err(invalid(ConductorIssue::Zero));
    }
    if f == 1 {
        return Err(invalid(ConductorIssue::Trivial));
    }
    if f.is_multiple_of(2) {
        return Err(invalid(ConductorIssue::Even));
    }
    let fac = factorize(f);
    let kind = match fac.exponent_of(3) {
        0 => Ramification::Tame,
        2 => Ramification::Wild,
        e => return Err(invalid(ConductorIssue::BadThreePart(e))),
    };
    let mut odd_primes = Vec::new();
    for &(p, e) in &fac.factors {
        if p == 3 {
            continue;
        }
        if p % 3 == 2 {
            return Err(invalid(ConductorIssue::PrimeTwoModThree(p)));
        }
        if e > 1 {
            return Err(invalid(ConductorIssue::NotSquarefree(p)));
        }
        odd_primes.push(p);
    }
    Ok(Conductor {
        value: f,
        kind,
        odd_primes,
    })
}

pub fn conductors_up_to(bound: u64, kind: Option<Ramification>) -> Vec<Conductor> {
    conductors_in(1, bound, kind)
}

pub fn conductors_in(min: u64, max: u64, kind: Option<Ramification>) -> Vec<Conductor> {
    // every conductor is odd
    (min.max(1)..=max)
        .filter(|f| f % 2 == 1)
        .filter_map(|f| validate_conductor(f).ok())
        .filter(|c| kind.is_none_or(|k| c.kind == k))
        .collect()
}

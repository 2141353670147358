//! Normalized solutions of `4f = M^2 + 27 N^2` and the Shanks parameters they induce.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, Conductor, Ramification};
use crate::error::{Error, Result};

/// A normalized pair `(M, N)` for a conductor.
///
/// Tame: `M = 2 (mod 3)`, `N > 0`. Wild: `M = 3 M0` with `M0 = 2 (mod 3)`,
/// `N` prime to 3, `N > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub m: i64,
    pub n: i64,
    pub m0: Option<i64>,
    pub conductor: Conductor,
}

impl Representation {
    /// Checks the side conditions for `(m, n)` against `conductor` and builds the pair.
    pub fn new(conductor: &Conductor, m: i64, n: i64) -> Option<Self> {
        if n <= 0 || 4 * conductor.value as i128 != (m as i128).pow(2) + 27 * (n as i128).pow(2) {
            return None;
        }
        let m0 = match conductor.kind {
            Ramification::Tame => {
                if m.rem_euclid(3) != 2 {
                    return None;
                }
                None
            }
            Ramification::Wild => {
                if m % 3 != 0 || (m / 3).rem_euclid(3) != 2 || n % 3 == 0 {
                    return None;
                }
                Some(m / 3)
            }
        };
        Some(Self {
            m,
            n,
            m0,
            conductor: conductor.clone(),
        })
    }

    pub fn residual(&self) -> i128 {
        4 * self.conductor.value as i128 - (self.m as i128).pow(2) - 27 * (self.n as i128).pow(2)
    }
}

/// Coprime `(n1, n2)` with `n = n1/n2` and `delta = n1^2 + 3 n1 n2 + 9 n2^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShanksParams {
    pub n1: i64,
    pub n2: i64,
    pub delta: i128,
}

impl ShanksParams {
    pub fn new(n1: i64, n2: i64) -> Self {
        Self {
            n1,
            n2,
            delta: crate::cubicpoly::delta(n1, n2),
        }
    }

    pub fn n(&self) -> BigRational {
        BigRational::new(BigInt::from(self.n1), BigInt::from(self.n2))
    }

    pub fn is_coprime(&self) -> bool {
        gcd(self.n1.unsigned_abs(), self.n2.unsigned_abs()) == 1
    }

    /// `M = 2 n1 + 3 n2`.
    pub fn m(&self) -> i64 {
        2 * self.n1 + 3 * self.n2
    }

    /// Wild-case conditions: `3 | n1` and `2 n1/3 + n2 = 2 (mod 3)`.
    pub fn satisfies_wild_conditions(&self) -> bool {
        self.n1 % 3 == 0 && (2 * self.n1 / 3 + self.n2).rem_euclid(3) == 2
    }
}

/// Number of normalized pairs predicted for a conductor.
pub fn expected_count(f: &Conductor) -> usize {
    f.field_count()
}

/// All normalized representations of `f`, sorted by `M` descending.
///
/// Exhaustive over `1 <= N <= sqrt(4f/27)`.
pub fn representations(f: &Conductor) -> Result<Vec<Representation>> {
    let four_f = 4 * f.value as u128;
    let mut out = Vec::new();
    let mut n: u128 = 1;
    while 27 * n * n <= four_f {
        let rest = four_f - 27 * n * n;
        let root = rest.isqrt();
        if root * root == rest {
            let root = root as i64;
            for m in [root, -root] {
                if let Some(r) = Representation::new(f, m, n as i64) {
                    out.push(r);
                }
                if root == 0 {
                    break;
                }
            }
        }
        n += 1;
    }
    out.sort_by_key(|r| std::cmp::Reverse(r.m));

    let expected = expected_count(f);
    if out.len() != expected {
        return Err(Error::CountMismatch {
            conductor: f.value,
            what: "representations",
            expected,
            found: out.len(),
        });
    }
    Ok(out)
}

pub fn shanks_params(r: &Representation) -> Result<ShanksParams> {
    if (r.m - r.n).rem_euclid(2) != 0 {
        return Err(Error::ParityError { m: r.m, n: r.n });
    }
    Ok(ShanksParams::new((r.m - 3 * r.n) / 2, r.n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::validate_conductor;

    fn pairs(f: u64) -> Vec<(i64, i64)> {
        let c = validate_conductor(f).unwrap();
        representations(&c)
            .unwrap()
            .iter()
            .map(|r| (r.m, r.n))
            .collect()
    }

    #[test]
    fn table_conductor() {
        assert_eq!(pairs(819), vec![(51, 5), (24, 10), (-3, 11), (-57, 1)]);
    }

    #[test]
    fn small_conductors() {
        assert_eq!(pairs(9), vec![(-3, 1)]);
        assert_eq!(pairs(7), vec![(-1, 1)]);
        assert_eq!(pairs(63), vec![(15, 1), (-12, 2)]);
        // tame with N divisible by 3 and with both M, N even
        assert_eq!(pairs(91), vec![(11, 3), (-16, 2)]);
        assert_eq!(pairs(31), vec![(-4, 2)]);
    }

    #[test]
    fn wild_m0() {
        let c = validate_conductor(63).unwrap();
        let m0: Vec<_> = representations(&c).unwrap().iter().map(|r| r.m0).collect();
        assert_eq!(m0, vec![Some(5), Some(-4)]);
    }

    #[test]
    fn shanks_examples() {
        let sp = |f, m, n| {
            let c = validate_conductor(f).unwrap();
            shanks_params(&Representation::new(&c, m, n).unwrap()).unwrap()
        };
        let s = sp(819, 51, 5);
        assert_eq!((s.n1, s.n2, s.delta), (18, 5, 819));
        let s = sp(9, -3, 1);
        assert_eq!((s.n1, s.n2, s.delta), (-3, 1, 9));
        let s = sp(7, -1, 1);
        assert_eq!((s.n1, s.n2, s.delta), (-2, 1, 7));
    }

    #[test]
    fn parity_error() {
        let c = validate_conductor(7).unwrap();
        // corrupted record, not reachable through `Representation::new`
        let r = Representation {
            m: 2,
            n: 1,
            m0: None,
            conductor: c,
        };
        assert_eq!(shanks_params(&r), Err(Error::ParityError { m: 2, n: 1 }));
    }

    #[test]
    fn rejects_unnormalized() {
        let c = validate_conductor(7).unwrap();
        assert!(Representation::new(&c, 1, 1).is_none());
        assert!(Representation::new(&c, -1, -1).is_none());
        let w = validate_conductor(63).unwrap();
        assert!(Representation::new(&w, -15, 1).is_none());
        assert!(Representation::new(&w, 3, 3).is_none());
    }
}

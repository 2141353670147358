//! Exact rational cubics: Shanks' family, the closed-form period polynomial, and the
//! affine identity linking them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, Conductor, Ramification};
use crate::error::{Error, Result};
use crate::quadform::{Representation, ShanksParams};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `c3 X^3 + c2 X^2 + c1 X + c0` over the rationals. `coeffs[k]` is the coefficient of `X^k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalCubic {
    pub coeffs: [BigRational; 4],
}

impl RationalCubic {
    pub fn new(c3: BigRational, c2: BigRational, c1: BigRational, c0: BigRational) -> Self {
        Self {
            coeffs: [c0, c1, c2, c3],
        }
    }

    pub fn from_ints(c3: i64, c2: i64, c1: i64, c0: i64) -> Self {
        Self::new(int(c3), int(c2), int(c1), int(c0))
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0, 0, 0)
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    /// Coefficients from `X^3` down to the constant term.
    pub fn descending(&self) -> [&BigRational; 4] {
        [
            &self.coeffs[3],
            &self.coeffs[2],
            &self.coeffs[1],
            &self.coeffs[0],
        ]
    }

    pub fn degree(&self) -> Option<usize> {
        (0..4).rev().find(|&k| !self.coeffs[k].is_zero())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.clone().map(|c| c * k),
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.to_f64().iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn to_f64(&self) -> [f64; 4] {
        self.coeffs
            .clone()
            .map(|c| c.to_f64().expect("coefficient fits in f64"))
    }

    pub fn integer_coeffs(&self) -> Option<[BigInt; 4]> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(self.coeffs.clone().map(|c| c.to_integer()))
        } else {
            None
        }
    }

    /// Coefficients (descending) as `"p/q"` strings in lowest terms.
    pub fn to_ratio_strings(&self) -> [String; 4] {
        self.descending()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
    }

    pub fn from_ratio_strings(s: &[String]) -> Option<Self> {
        if s.len() != 4 {
            return None;
        }
        Some(Self::new(
            parse_rational(&s[0])?,
            parse_rational(&s[1])?,
            parse_rational(&s[2])?,
            parse_rational(&s[3])?,
        ))
    }

    /// Discriminant `b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2 + 18abcd` of `aX^3 + bX^2 + cX + d`.
    pub fn discriminant(&self) -> BigRational {
        let [d, c, b, a] = &self.coeffs;
        let four = int(4);
        b * b * c * c - &four * a * c * c * c - &four * b * b * b * d - int(27) * a * a * d * d
            + int(18) * a * b * c * d
    }
}

impl fmt::Display for RationalCubic {
    /// Renders as e.g. `X^3 - (18/5)X^2 - (33/5)X - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in (0..4).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let var = match k {
                0 => "",
                1 => "X",
                2 => "X^2",
                _ => "X^3",
            };
            if k > 0 && mag.is_one() {
                f.write_str(var)?;
            } else if mag.is_integer() {
                write!(f, "{}{var}", mag.numer())?;
            } else if k == 0 {
                write!(f, "{}/{}", mag.numer(), mag.denom())?;
            } else {
                write!(f, "({}/{}){var}", mag.numer(), mag.denom())?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RationalCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalCubic({self})")
    }
}

impl Serialize for RationalCubic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_ratio_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalCubic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        Self::from_ratio_strings(&v)
            .ok_or_else(|| serde::de::Error::custom("expected 4 \"p/q\" strings"))
    }
}

/// Parses `"p/q"` or a plain integer.
pub fn parse_rational(t: &str) -> Option<BigRational> {
    let (n, d) = t.split_once('/').unwrap_or((t, "1"));
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n.trim().parse().ok()?, d))
}

/// `f_n(X) = X^3 - nX^2 - (n+3)X - 1`.
pub fn shanks_poly(n: &BigRational) -> RationalCubic {
    RationalCubic::new(int(1), -n.clone(), -(n + int(3)), int(-1))
}

pub fn delta(n1: i64, n2: i64) -> i128 {
    let (a, b) = (n1 as i128, n2 as i128);
    a * a + 3 * a * b + 9 * b * b
}

fn closed_form_period_poly(f: &Conductor, m: i64) -> RationalCubic {
    let fv = int(f.value);
    let mu = int(f.mu());
    let m = int(m);
    match f.kind {
        Ramification::Tame => RationalCubic::new(
            int(1),
            -mu.clone(),
            (int(1) - &fv) / int(3),
            -mu * ((m - int(3)) * &fv + int(1)) / int(27),
        ),
        Ramification::Wild => {
            RationalCubic::new(int(1), int(0), -(&fv / int(3)), -mu * &fv * m / int(27))
        }
    }
}

fn require_integral(p: RationalCubic) -> Result<RationalCubic> {
    for (k, c) in p.coeffs.iter().enumerate() {
        if !c.is_integer() {
            return Err(Error::NonIntegralCoefficient {
                degree: k,
                value: c.to_string(),
            });
        }
    }
    Ok(p)
}

/// The closed-form period polynomial for conductor `f` and its pair `(M, N)`.
///
/// Tame: `X^3 - mu(f)X^2 + (1-f)/3 X - mu(f)((M-3)f+1)/27`.
/// Wild: `X^3 - (f/3)X - mu(f/9) f M/27`.
pub fn period_poly_formula(f: &Conductor, r: &Representation) -> Result<RationalCubic> {
    require_integral(closed_form_period_poly(f, r.m))
}

/// Exact expansion of `p(aX + b)`.
pub fn substitute_affine(p: &RationalCubic, a: &BigRational, b: &BigRational) -> RationalCubic {
    // (aX + b)^k expanded, accumulated term by term
    let mut out: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
    let mut power: Vec<BigRational> = vec![BigRational::one()];
    for k in 0..4 {
        for (j, c) in power.iter().enumerate() {
            out[j] += &p.coeffs[k] * c;
        }
        let mut next = vec![BigRational::zero(); power.len() + 1];
        for (j, c) in power.iter().enumerate() {
            next[j] += c * b;
            next[j + 1] += c * a;
        }
        power = next;
    }
    RationalCubic { coeffs: out }
}

/// Coefficients `(a, b)` such that the periods are `{a rho + b}` over the roots `rho` of `f_n`.
///
/// Tame: `a = mu n2`, `b = mu (1 - n1)/3`. Wild: `a = mu n2`, `b = -mu n1/3`.
pub fn affine_relation(f: &Conductor, sp: &ShanksParams) -> (BigRational, BigRational) {
    let mu = int(f.mu());
    let shift = match f.kind {
        Ramification::Tame => rat(1 - sp.n1, 3),
        Ramification::Wild => rat(-sp.n1, 3),
    };
    (&mu * int(sp.n2), mu * shift)
}

/// Both sides of `n2^3 mu f_n(X) = P(mu (n2 X + shift))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MainIdentity {
    pub lhs: RationalCubic,
    pub rhs: RationalCubic,
}

/// Checks the affine identity between `f_n` and the closed-form period polynomial with
/// exact rational arithmetic.
pub fn verify_main_identity(f: &Conductor, sp: &ShanksParams) -> Result<MainIdentity> {
    let period = closed_form_period_poly(f, sp.m());
    let lhs = shanks_poly(&sp.n()).scale(&int(f.mu() * sp.n2.pow(3)));
    let (a, b) = affine_relation(f, sp);
    let rhs = substitute_affine(&period, &a, &b);
    if lhs != rhs {
        let diffs: Vec<String> = (0..4)
            .filter(|&k| lhs.coeffs[k] != rhs.coeffs[k])
            .map(|k| format!("X^{k}: {} vs {}", lhs.coeffs[k], rhs.coeffs[k]))
            .collect();
        return Err(Error::IdentityFailure(format!(
            "n = {}/{}: {}",
            sp.n1,
            sp.n2,
            diffs.join(", ")
        )));
    }
    Ok(MainIdentity { lhs, rhs })
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let v = n
        .abs()
        .to_u64()
        .ok_or_else(|| Error::CoefficientTooLarge(n.to_string()))?;
    let mut divs = vec![1u64];
    for (p, e) in factorize(v).factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    Ok(divs.into_iter().map(BigInt::from).collect())
}

/// A cubic is irreducible over Q iff it has no rational root; searched via the
/// rational-root theorem on the denominator-cleared polynomial.
pub fn is_irreducible_cubic(p: &RationalCubic) -> Result<bool> {
    if p.degree() != Some(3) {
        return Err(Error::NotCubic(p.degree().unwrap_or(0)));
    }
    let lcm = p
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let cleared = p.scale(&BigRational::from_integer(lcm));
    let lead = cleared.coeffs[3].to_integer();
    let constant = cleared.coeffs[0].to_integer();
    if constant.is_zero() {
        return Ok(false);
    }
    let numerators = divisors(&constant)?;
    let denominators = divisors(&lead)?;
    for q in &denominators {
        for pn in &numerators {
            if pn.gcd(q) != BigInt::one() {
                continue;
            }
            for sign in [1, -1] {
                let root = BigRational::new(pn * sign, q.clone());
                if cleared.eval(&root).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Whether `3 | n1`, `9 || delta` and `delta/9` is squarefree.
pub fn irreducibility_criterion(n1: i64, n2: i64) -> bool {
    let d = delta(n1, n2);
    if n1 % 3 != 0 || d <= 0 || d % 9 != 0 || d % 27 == 0 {
        return false;
    }
    let rest = (d / 9) as u64;
    factorize(rest).is_squarefree()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscriminantCheck {
    pub discriminant: BigRational,
    pub expected: BigRational,
}

/// Checks `disc(f_n) = (n^2 + 3n + 9)^2` exactly.
pub fn discriminant_check(n: &BigRational) -> Result<DiscriminantCheck> {
    let discriminant = shanks_poly(n).discriminant();
    let base = n * n + int(3) * n + int(9);
    let expected = &base * &base;
    if discriminant != expected {
        return Err(Error::IdentityFailure(format!(
            "disc(f_{n}) = {discriminant}, expected {expected}"
        )));
    }
    Ok(DiscriminantCheck {
        discriminant,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::validate_conductor;

    fn rep(f: u64, m: i64, n: i64) -> (Conductor, Representation) {
        let c = validate_conductor(f).unwrap();
        let r = Representation::new(&c, m, n).unwrap();
        (c, r)
    }

    #[test]
    fn shanks_examples() {
        assert_eq!(
            shanks_poly(&rat(18, 5)),
            RationalCubic::new(int(1), rat(-18, 5), rat(-33, 5), int(-1))
        );
        assert_eq!(shanks_poly(&int(0)), RationalCubic::from_ints(1, 0, -3, -1));
        assert_eq!(
            shanks_poly(&int(-30)),
            RationalCubic::from_ints(1, 30, 27, -1)
        );
    }

    #[test]
    fn display() {
        assert_eq!(
            shanks_poly(&rat(18, 5)).to_string(),
            "X^3 - (18/5)X^2 - (33/5)X - 1"
        );
        assert_eq!(
            RationalCubic::from_ints(1, 0, -273, 1729).to_string(),
            "X^3 - 273X + 1729"
        );
        assert_eq!(
            RationalCubic::from_ints(-2, 1, 0, 0).to_string(),
            "-2X^3 + X^2"
        );
        assert_eq!(
            RationalCubic::new(int(0), int(0), int(0), rat(-1, 2)).to_string(),
            "-1/2"
        );
        assert_eq!(RationalCubic::zero().to_string(), "0");
    }

    #[test]
    fn period_formula_examples() {
        let (c, r) = rep(819, -57, 1);
        assert_eq!(
            period_poly_formula(&c, &r).unwrap(),
            RationalCubic::from_ints(1, 0, -273, 1729)
        );
        let (c, r) = rep(819, 24, 10);
        assert_eq!(
            period_poly_formula(&c, &r).unwrap(),
            RationalCubic::from_ints(1, 0, -273, -728)
        );
        let (c, r) = rep(7, -1, 1);
        assert_eq!(
            period_poly_formula(&c, &r).unwrap(),
            RationalCubic::from_ints(1, 1, -2, -1)
        );
        let (c, r) = rep(9, -3, 1);
        assert_eq!(
            period_poly_formula(&c, &r).unwrap(),
            RationalCubic::from_ints(1, 0, -3, 1)
        );
    }

    #[test]
    fn period_formula_rejects_mismatched_pair() {
        // M = -1 does not come from a representation of 63
        let c = validate_conductor(63).unwrap();
        let bogus = Representation {
            m: -1,
            n: 1,
            m0: None,
            conductor: c.clone(),
        };
        assert!(matches!(
            period_poly_formula(&c, &bogus),
            Err(Error::NonIntegralCoefficient { degree: 0, .. })
        ));
    }

    #[test]
    fn substitute_examples() {
        let x3 = RationalCubic::from_ints(1, 0, 0, 0);
        assert_eq!(substitute_affine(&x3, &int(1), &int(0)), x3);
        let p = RationalCubic::from_ints(1, 0, -3, 1);
        assert_eq!(
            substitute_affine(&p, &int(1), &int(1)),
            RationalCubic::from_ints(1, 3, 0, -1)
        );
        assert_eq!(
            substitute_affine(&p, &int(1), &int(-1)),
            RationalCubic::from_ints(1, -3, 0, 3)
        );
        let p = RationalCubic::from_ints(1, 0, -273, -1547);
        let q = substitute_affine(&p, &int(5), &int(-6));
        assert_eq!(q, RationalCubic::from_ints(125, -450, -825, -125));
        assert_eq!(q, shanks_poly(&rat(18, 5)).scale(&int(125)));
    }

    #[test]
    fn main_identity_examples() {
        let c = validate_conductor(819).unwrap();
        let id = verify_main_identity(&c, &ShanksParams::new(18, 5)).unwrap();
        assert_eq!(id.lhs, shanks_poly(&rat(18, 5)).scale(&int(125)));

        let c = validate_conductor(9).unwrap();
        let id = verify_main_identity(&c, &ShanksParams::new(-3, 1)).unwrap();
        assert_eq!(id.rhs, RationalCubic::from_ints(1, 3, 0, -1));

        let c = validate_conductor(7).unwrap();
        let id = verify_main_identity(&c, &ShanksParams::new(-2, 1)).unwrap();
        assert_eq!(id.lhs, RationalCubic::from_ints(-1, -2, 1, 1));
    }

    #[test]
    fn main_identity_failure_lists_coefficients() {
        // n = 1/1 does not come from a representation of 63
        let c = validate_conductor(63).unwrap();
        let err = verify_main_identity(&c, &ShanksParams::new(1, 1)).unwrap_err();
        assert!(matches!(err, Error::IdentityFailure(ref s) if s.contains("X^")));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(18, 5), 819);
        assert_eq!(delta(0, 1), 9);
        assert_eq!(delta(-2, 1), 7);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible_cubic(&RationalCubic::from_ints(1, 0, -3, -1)).unwrap());
        assert!(!is_irreducible_cubic(&RationalCubic::from_ints(1, 0, -1, 0)).unwrap());
        assert!(is_irreducible_cubic(&shanks_poly(&rat(18, 5))).unwrap());
        // (2X - 1)(X^2 + 1): rational root 1/2
        assert!(!is_irreducible_cubic(&RationalCubic::from_ints(2, -1, 2, -1)).unwrap());
        assert!(matches!(
            is_irreducible_cubic(&RationalCubic::from_ints(0, 1, 0, 1)),
            Err(Error::NotCubic(2))
        ));
    }

    #[test]
    fn irreducibility_criterion_examples() {
        assert!(irreducibility_criterion(18, 5));
        assert!(!irreducibility_criterion(-2, 1));
        assert!(irreducibility_criterion(-3, 1));
        assert!(irreducibility_criterion(0, 1));
        // delta(9, 1) = 81 + 27 + 9 = 117 = 9 * 13
        assert!(irreducibility_criterion(9, 1));
        // delta(-9, 2) = 81 - 54 + 36 = 63 = 9 * 7
        assert!(irreducibility_criterion(-9, 2));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant_check(&int(0)).unwrap().discriminant, int(81));
        assert_eq!(
            discriminant_check(&rat(18, 5)).unwrap().discriminant,
            rat(819 * 819, 625)
        );
        assert_eq!(
            discriminant_check(&int(-30)).unwrap().discriminant,
            int(819 * 819)
        );
    }

    #[test]
    fn ratio_strings_roundtrip() {
        let p = shanks_poly(&rat(-3, 10));
        let s = p.to_ratio_strings();
        assert_eq!(s, ["1/1", "3/10", "-27/10", "-1/1"].map(String::from));
        assert_eq!(RationalCubic::from_ratio_strings(&s), Some(p));
    }
}

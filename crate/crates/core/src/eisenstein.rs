//! Arithmetic in `Z[w]`, `w = exp(2 pi i/3)`, and the cubic Dirichlet characters attached to
//! a pair `(M, N)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{self, inv_mod, is_prime, pow_mod};
use crate::error::{Error, Result};
use crate::numeric::{root_of_unity, zeta3, CompensatedSum};
use crate::quadform::Representation;

/// Tolerance for the Gaussian-sum normalization `-tau^3 = p pi`, applied to `-tau^3/p - pi`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// `a + b w` with `w^2 = -1 - w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EisensteinInt {
    pub a: i128,
    pub b: i128,
}

impl EisensteinInt {
    pub const ZERO: Self = Self { a: 0, b: 0 };
    pub const ONE: Self = Self { a: 1, b: 0 };
    pub const OMEGA: Self = Self { a: 0, b: 1 };
    /// `sqrt(-3) = 1 + 2w`.
    pub const SQRT_NEG3: Self = Self { a: 1, b: 2 };

    pub const fn new(a: i128, b: i128) -> Self {
        Self { a, b }
    }

    pub fn norm(self) -> i128 {
        self.a * self.a - self.a * self.b + self.b * self.b
    }

    /// Complex conjugate: `conj(w) = w^2 = -1 - w`.
    pub fn conj(self) -> Self {
        Self::new(self.a - self.b, -self.b)
    }

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    /// `1, -w^2, w, -1, w^2, -w`: successive powers of the unit `-w^2 = 1 + w`.
    pub fn units() -> [Self; 6] {
        let step = Self::new(1, 1);
        let mut out = [Self::ONE; 6];
        for i in 1..6 {
            out[i] = out[i - 1] * step;
        }
        out
    }

    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }

    pub fn associates(self) -> [Self; 6] {
        Self::units().map(|u| u * self)
    }

    /// The associate with `a > 0`, `b >= 0` and the smallest such `b`.
    pub fn canonical(self) -> Self {
        if self.is_zero() {
            return self;
        }
        self.associates()
            .into_iter()
            .filter(|z| z.a > 0 && z.b >= 0)
            .min_by_key(|z| z.b)
            .expect("a 120 degree sector contains two associates")
    }

    /// The associate congruent to 1 mod 3, when the norm is prime to 3.
    pub fn one_mod_three(self) -> Option<Self> {
        self.associates()
            .into_iter()
            .find(|z| z.a.rem_euclid(3) == 1 && z.b.rem_euclid(3) == 0)
    }

    /// Nearest-lattice-point quotient, `N(x - q y) < N(y)`.
    pub fn div_round(self, y: Self) -> Self {
        let n = y.norm();
        assert!(n != 0, "division by zero in Z[w]");
        let num = self * y.conj();
        let round = |c: i128| (2 * c + n).div_euclid(2 * n);
        Self::new(round(num.a), round(num.b))
    }

    pub fn modulo(self, y: Self) -> Self {
        self - self.div_round(y) * y
    }

    /// `self / y` when the division is exact.
    pub fn checked_div(self, y: Self) -> Option<Self> {
        if y.is_zero() {
            return None;
        }
        let q = self.div_round(y);
        (q * y == self).then_some(q)
    }

    pub fn divides(self, x: Self) -> bool {
        x.checked_div(self).is_some()
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.a as f64, 0.0) + zeta3() * self.b as f64
    }

    pub fn from_int(n: i128) -> Self {
        Self::new(n, 0)
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}w"),
            (a, b) if b < 0 => write!(f, "{a} - {}w", -b),
            (a, b) => write!(f, "{a} + {b}w"),
        }
    }
}

impl Add for EisensteinInt {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for EisensteinInt {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for EisensteinInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul for EisensteinInt {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        // (a + bw)(c + dw) = ac - bd + (ad + bc - bd)w
        Self::new(
            self.a * o.a - self.b * o.b,
            self.a * o.b + self.b * o.a - self.b * o.b,
        )
    }
}

/// Greatest common divisor, returned as its canonical associate.
pub fn eis_gcd(x: EisensteinInt, y: EisensteinInt) -> EisensteinInt {
    let (mut x, mut y) = (x, y);
    while !y.is_zero() {
        (x, y) = (y, x.modulo(y));
    }
    x.canonical()
}

/// `(M + 3N sqrt(-3))/2 = [3] w^e pi_1 ... pi_nu`, with every `pi_i = 1 (mod 3)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhsFactorization {
    pub value: EisensteinInt,
    /// Exponent `e` of `w`, in `{-1, 0, 1}`; zero in the tame case.
    pub zeta_exponent: i8,
    /// `(p_i, pi_i)` with `N(pi_i) = p_i`.
    pub primes: Vec<(u64, EisensteinInt)>,
}

impl RhsFactorization {
    pub fn product(&self, wild: bool) -> EisensteinInt {
        let unit = match self.zeta_exponent {
            0 => EisensteinInt::ONE,
            1 => EisensteinInt::OMEGA,
            _ => EisensteinInt::OMEGA * EisensteinInt::OMEGA,
        };
        let three = if wild { 3 } else { 1 };
        self.primes
            .iter()
            .fold(unit * EisensteinInt::from_int(three), |acc, &(_, pi)| {
                acc * pi
            })
    }
}

/// Splits `(M + 3N sqrt(-3))/2` into primes above the `p_i`, a power of `w` and (wild) the factor 3.
pub fn factor_rhs(r: &Representation) -> Result<RhsFactorization> {
    let (m, n) = (r.m as i128, r.n as i128);
    if (m + 3 * n) % 2 != 0 {
        return Err(Error::ParityError { m: r.m, n: r.n });
    }
    // (M + 3N(1 + 2w))/2
    let value = EisensteinInt::new((m + 3 * n) / 2, 3 * n);
    let wild = r.conductor.is_wild();
    let mut rest = value;
    if wild {
        rest = rest
            .checked_div(EisensteinInt::from_int(3))
            .ok_or_else(|| {
                Error::FactorizationMismatch(format!("{value} is not divisible by 3"))
            })?;
    }
    let mut primes = Vec::with_capacity(r.conductor.nu());
    for &p in &r.conductor.odd_primes {
        let g = eis_gcd(rest, EisensteinInt::from_int(p as i128));
        if g.norm() != p as i128 {
            return Err(Error::FactorizationMismatch(format!(
                "gcd({rest}, {p}) = {g} has norm {}",
                g.norm()
            )));
        }
        let pi = g.one_mod_three().expect("norm prime to 3");
        rest = rest.checked_div(pi).expect("gcd divides its argument");
        primes.push((p, pi));
    }
    let zeta_exponent = match rest {
        EisensteinInt::ONE => 0,
        EisensteinInt::OMEGA => 1,
        EisensteinInt { a: -1, b: -1 } => -1,
        u => {
            return Err(Error::FactorizationMismatch(format!(
                "leftover unit {u} is not a power of w"
            )))
        }
    };
    if wild == (zeta_exponent == 0) {
        return Err(Error::FactorizationMismatch(format!(
            "unexpected unit w^{zeta_exponent} for a {} conductor",
            r.conductor.kind
        )));
    }
    let out = RhsFactorization {
        value,
        zeta_exponent,
        primes,
    };
    if out.product(wild) != value {
        return Err(Error::FactorizationMismatch(format!(
            "product does not reproduce {value}"
        )));
    }
    Ok(out)
}

/// A character of `(Z/mZ)^x` with values in the cube roots of unity, stored as exponents of
/// `w` indexed by residue (`None` off the unit group).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicCharacter {
    pub modulus: u64,
    pub conductor: u64,
    values: Vec<Option<u8>>,
}

impl CubicCharacter {
    pub fn from_values(modulus: u64, conductor: u64, values: Vec<Option<u8>>) -> Self {
        assert_eq!(values.len() as u64, modulus);
        Self {
            modulus,
            conductor,
            values,
        }
    }

    pub fn value(&self, a: u64) -> Option<u8> {
        self.values[(a % self.modulus) as usize]
    }

    pub fn values(&self) -> &[Option<u8>] {
        &self.values
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.map(|e| (3 - e) % 3)).collect(),
            ..self.clone()
        }
    }

    /// Residues where the character is trivial, ascending.
    pub fn kernel(&self) -> Vec<u64> {
        (0..self.modulus)
            .filter(|&a| self.value(a) == Some(0))
            .collect()
    }

    pub fn is_multiplicative(&self) -> bool {
        let units: Vec<u64> = (0..self.modulus)
            .filter(|&a| self.value(a).is_some())
            .collect();
        units.iter().all(|&a| {
            units.iter().all(|&b| {
                let ab = ((a as u128 * b as u128) % self.modulus as u128) as u64;
                self.value(ab) == Some((self.value(a).unwrap() + self.value(b).unwrap()) % 3)
            })
        })
    }

    pub fn is_nontrivial(&self) -> bool {
        self.values.iter().any(|v| matches!(v, Some(1) | Some(2)))
    }

    /// Product of characters with pairwise coprime moduli, as a character mod their product.
    pub fn crt_product(parts: &[CubicCharacter]) -> Self {
        let modulus: u64 = parts.iter().map(|c| c.modulus).product();
        let conductor: u64 = parts.iter().map(|c| c.conductor).product();
        let values = (0..modulus)
            .map(|a| {
                parts
                    .iter()
                    .try_fold(0u8, |acc, c| c.value(a).map(|e| (acc + e) % 3))
            })
            .collect();
        Self {
            modulus,
            conductor,
            values,
        }
    }
}

/// `chi(a) = w^e` where `a^((p-1)/3) = w^e (mod pi)`.
pub fn cubic_residue_character(p: u64, pi: EisensteinInt) -> Result<CubicCharacter> {
    if !is_prime(p) || p % 3 != 1 || pi.norm() != p as i128 {
        return Err(Error::Precondition(format!(
            "need a prime p = 1 mod 3 and N(pi) = p, got p = {p}, pi = {pi}"
        )));
    }
    // w = -a/b mod pi; b is invertible mod p since N(pi) = p
    let pm = p as i128;
    let w = (-pi.a * inv_mod(pi.b, pm).expect("b prime to p")).rem_euclid(pm) as u64;
    debug_assert_eq!((w as u128 * w as u128 + w as u128 + 1) % p as u128, 0);
    let w2 = arith::mul_mod(w, w, p);
    let exp = (p - 1) / 3;
    let mut values = vec![None; p as usize];
    for a in 1..p {
        values[a as usize] = Some(match pow_mod(a, exp, p) {
            1 => 0,
            t if t == w => 1,
            t if t == w2 => 2,
            _ => return Err(Error::NotCubeRootOfUnity { p, a }),
        });
    }
    Ok(CubicCharacter::from_values(p, p, values))
}

/// The character mod 9 with `chi(a) = w^(sign (a^2 - 1)/3)`.
pub fn chi9(sign: i8) -> CubicCharacter {
    assert!(sign == 1 || sign == -1, "sign must be +-1");
    let values = (0..9u64)
        .map(|a| {
            (a % 3 != 0).then(|| {
                let e = ((a * a - 1) / 3 % 3) as i64 * sign as i64;
                e.rem_euclid(3) as u8
            })
        })
        .collect();
    CubicCharacter::from_values(9, 9, values)
}

/// `tau(chi) = sum chi(a) zeta_m^a` over the units mod `m`.
pub fn gaussian_sum(chi: &CubicCharacter) -> Complex64 {
    let m = chi.modulus as u128;
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for a in 0..chi.modulus {
        if let Some(e) = chi.value(a) {
            // zeta_m^a * w^e = exp(2 pi i (3a + e m)/(3m))
            let z = root_of_unity(3 * a as u128 + e as u128 * m, 3 * m);
            re.add(z.re);
            im.add(z.im);
        }
    }
    Complex64::new(re.value(), im.value())
}

/// How the Gaussian sum of `chi9(sign)` compares with `27 w^sign`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chi9GaussReport {
    pub sign: i8,
    pub tau: (f64, f64),
    pub tau_cubed: (f64, f64),
    /// `tau = 27 w^sign`.
    pub tau_matches: bool,
    /// `tau^3 = 27 w^sign`.
    pub tau_cubed_matches: bool,
}

pub fn chi9_gauss_report(sign: i8) -> Chi9GaussReport {
    let tau = gaussian_sum(&chi9(sign));
    let cube = tau * tau * tau;
    let target = zeta3().powi(sign as i32) * 27.0;
    Chi9GaussReport {
        sign,
        tau: (tau.re, tau.im),
        tau_cubed: (cube.re, cube.im),
        tau_matches: (tau - target).norm() < NORMALIZATION_TOLERANCE,
        tau_cubed_matches: (cube - target).norm() < NORMALIZATION_TOLERANCE,
    }
}

/// `|-tau(chi)^3/p - pi|`.
pub fn normalization_residual(chi: &CubicCharacter, p: u64, pi: EisensteinInt) -> f64 {
    let tau = gaussian_sum(chi);
    (-(tau * tau * tau) / p as f64 - pi.to_complex()).norm()
}

/// `chi_9^(+-1) chi_{p_1} ... chi_{p_nu}` (tame: without `chi_9`), each `chi_{p_i}` normalized
/// by `-tau(chi_{p_i})^3 = p_i pi_i`.
pub fn character_for_representation(r: &Representation) -> Result<CubicCharacter> {
    let rhs = factor_rhs(r)?;
    let mut parts = Vec::with_capacity(rhs.primes.len() + 1);
    if r.conductor.is_wild() {
        parts.push(chi9(rhs.zeta_exponent));
    }
    for &(p, pi) in &rhs.primes {
        let chi = cubic_residue_character(p, pi)?;
        let residual = normalization_residual(&chi, p, pi);
        if residual >= NORMALIZATION_TOLERANCE {
            return Err(Error::NormalizationFailure { p, residual });
        }
        parts.push(chi);
    }
    Ok(CubicCharacter::crt_product(&parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::validate_conductor;
    use crate::quadform::representations;

    type E = EisensteinInt;

    #[test]
    fn ring_basics() {
        let w = E::OMEGA;
        assert_eq!(w * w * w, E::ONE);
        assert_eq!(w * w, E::new(-1, -1));
        assert_eq!(E::SQRT_NEG3 * E::SQRT_NEG3, E::from_int(-3));
        assert_eq!(E::new(1, 3).norm(), 7);
        assert!(E::units().iter().all(|u| u.is_unit()));
        let x = E::new(5, -2);
        assert_eq!(x * x.conj(), E::from_int(x.norm()));
    }

    #[test]
    fn gcd_examples() {
        let g = eis_gcd(E::from_int(7), E::new(1, 3));
        assert_eq!(g.norm(), 7);
        assert!(g.divides(E::new(1, 3)) && g.divides(E::from_int(7)));
        assert!(E::new(1, 3).associates().contains(&g));

        let x = E::new(-4, 7);
        assert_eq!(eis_gcd(x, E::ZERO), x.canonical());
        let y = E::new(1, 1);
        assert_eq!(eis_gcd(y, y), y.canonical());
        assert_eq!(y.canonical(), E::ONE);
    }

    #[test]
    fn canonical_is_unique() {
        for a in -6..=6 {
            for b in -6..=6 {
                let x = E::new(a, b);
                if x.is_zero() {
                    continue;
                }
                let c = x.canonical();
                assert!(c.a > 0 && c.b >= 0);
                assert!(x.associates().iter().all(|z| z.canonical() == c));
            }
        }
    }

    fn rep(f: u64, m: i64) -> Representation {
        let c = validate_conductor(f).unwrap();
        representations(&c)
            .unwrap()
            .into_iter()
            .find(|r| r.m == m)
            .unwrap()
    }

    #[test]
    fn factor_rhs_examples() {
        let fr = factor_rhs(&rep(9, -3)).unwrap();
        assert_eq!(fr.value, E::new(0, 3));
        assert_eq!(fr.zeta_exponent, 1);
        assert!(fr.primes.is_empty());

        let fr = factor_rhs(&rep(63, 15)).unwrap();
        assert_eq!(fr.value, E::new(9, 3));
        assert_eq!(fr.primes, vec![(7, E::new(-2, -3))]);
        assert_eq!(fr.zeta_exponent, 1);

        let fr = factor_rhs(&rep(819, -57)).unwrap();
        let norms: Vec<i128> = fr.primes.iter().map(|(_, pi)| pi.norm()).collect();
        assert_eq!(norms, vec![7, 13]);
        assert_eq!(fr.product(true), fr.value);

        let fr = factor_rhs(&rep(91, 11)).unwrap();
        assert_eq!(fr.zeta_exponent, 0);
        assert_eq!(fr.product(false), fr.value);
    }

    #[test]
    fn residue_character_p7() {
        let pi = E::new(1, 3);
        let chi = cubic_residue_character(7, pi).unwrap();
        assert_eq!(chi.value(1), Some(0));
        assert_eq!(chi.value(0), None);
        assert!(chi.is_multiplicative());
        assert!(chi.is_nontrivial());
        // the conjugate prime gives the inverse character
        let other = cubic_residue_character(7, pi.conj()).unwrap();
        assert_eq!(other, chi.conj());
        assert_ne!(other, chi);
        assert_eq!(chi.kernel(), vec![1, 6]);
    }

    #[test]
    fn residue_character_rejects_bad_input() {
        assert!(cubic_residue_character(7, E::new(2, 1)).is_err());
        assert!(cubic_residue_character(5, E::new(1, 3)).is_err());
    }

    #[test]
    fn chi9_values() {
        let chi = chi9(1);
        assert_eq!(chi.value(2), Some(1));
        assert_eq!(chi.value(1), Some(0));
        assert_eq!(chi.value(3), None);
        assert_eq!(chi9(-1), chi.conj());
        assert!(chi.is_multiplicative());
        assert_eq!(chi.kernel(), vec![1, 8]);
    }

    #[test]
    fn gauss_sum_modulus() {
        let chi = cubic_residue_character(7, E::new(1, 3)).unwrap();
        assert!((gaussian_sum(&chi).norm_sqr() - 7.0).abs() < 1e-9);
        let tau9 = gaussian_sum(&chi9(1));
        assert!((tau9.norm_sqr() - 9.0).abs() < 1e-9);
    }

    #[test]
    fn gauss_sum_normalization_p7() {
        // the prime above 7 that is 1 mod 3 satisfies -tau^3 = 7 pi
        let pi = E::new(1, 3).one_mod_three().unwrap();
        let chi = cubic_residue_character(7, pi).unwrap();
        assert!(normalization_residual(&chi, 7, pi) < 1e-9);
        assert!(normalization_residual(&chi.conj(), 7, pi) > 1.0);
    }

    #[test]
    fn chi9_gauss_sum_cube() {
        for sign in [1i8, -1] {
            let r = chi9_gauss_report(sign);
            assert!(!r.tau_matches, "{r:?}");
            assert!(r.tau_cubed_matches, "{r:?}");
        }
    }

    #[test]
    fn characters_for_representations() {
        let chi = character_for_representation(&rep(9, -3)).unwrap();
        assert_eq!(chi, chi9(1));

        let c = validate_conductor(63).unwrap();
        for r in representations(&c).unwrap() {
            let chi = character_for_representation(&r).unwrap();
            assert_eq!(chi.modulus, 63);
            assert_eq!(chi.kernel().len(), 36 / 3);
            assert!(chi.is_multiplicative());
        }

        let c = validate_conductor(819).unwrap();
        let kernels: std::collections::BTreeSet<Vec<u64>> = representations(&c)
            .unwrap()
            .iter()
            .map(|r| character_for_representation(r).unwrap().kernel())
            .collect();
        assert_eq!(kernels.len(), 4);
    }
}

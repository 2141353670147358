//! The rational group ring of a cyclic group of order 3, its idempotents, the unit group of
//! the associated order, and the generator checks built on them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::cubicpoly::{int, rat, shanks_poly, substitute_affine, RationalCubic};
use crate::error::{Error, Result};
use crate::periods::FieldRecord;

/// `c0 + c1 s + c2 s^2` with `s^3 = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    pub c: [BigRational; 3],
}

impl GroupRingElement {
    pub fn new(c0: BigRational, c1: BigRational, c2: BigRational) -> Self {
        Self { c: [c0, c1, c2] }
    }

    pub fn from_ints(c0: i64, c1: i64, c2: i64) -> Self {
        Self::new(int(c0), int(c1), int(c2))
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0, 0)
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0, 0)
    }

    pub fn sigma() -> Self {
        Self::from_ints(0, 1, 0)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            c: self.c.clone().map(|x| x * k),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = gr_mul(&acc, &base);
            }
            base = gr_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Multiplicative order, if it divides `bound`.
    pub fn order(&self, bound: u32) -> Option<u32> {
        let mut x = self.clone();
        for k in 1..=bound {
            if x.is_one() {
                return Some(k);
            }
            x = gr_mul(&x, self);
        }
        None
    }

    pub fn to_f64(&self) -> [f64; 3] {
        self.c.clone().map(|x| x.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})s + ({})s^2", self.c[0], self.c[1], self.c[2])
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, o: Self) -> GroupRingElement {
        GroupRingElement {
            c: std::array::from_fn(|i| &self.c[i] + &o.c[i]),
        }
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, o: Self) -> GroupRingElement {
        GroupRingElement {
            c: std::array::from_fn(|i| &self.c[i] - &o.c[i]),
        }
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        GroupRingElement {
            c: self.c.clone().map(|x| -x),
        }
    }
}

impl Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, o: Self) -> GroupRingElement {
        gr_mul(self, o)
    }
}

/// Cyclic convolution of coefficients.
pub fn gr_mul(x: &GroupRingElement, y: &GroupRingElement) -> GroupRingElement {
    let mut c: [BigRational; 3] = std::array::from_fn(|_| BigRational::zero());
    for i in 0..3 {
        for j in 0..3 {
            c[(i + j) % 3] += &x.c[i] * &y.c[j];
        }
    }
    GroupRingElement { c }
}

/// `(e_1, e_f) = ((1 + s + s^2)/3, (2 - s - s^2)/3)`.
pub fn idempotents() -> (GroupRingElement, GroupRingElement) {
    let third = rat(1, 3);
    let e1 = GroupRingElement::new(third.clone(), third.clone(), third);
    let ef = GroupRingElement::new(rat(2, 3), rat(-1, 3), rat(-1, 3));
    (e1, ef)
}

/// `1 - 2 e_1`, the extra unit of the associated order when 3 ramifies.
pub fn reflection() -> GroupRingElement {
    let (e1, _) = idempotents();
    &GroupRingElement::one() - &e1.scale(&int(2))
}

/// Units of the associated order: `{+-1, +-s, +-s^2}`, and when wild additionally their
/// products with `1 - 2 e_1`.
pub fn unit_list_p3(wild: bool) -> Vec<GroupRingElement> {
    let mut base = Vec::with_capacity(12);
    for sign in [1i64, -1] {
        for k in 0..3 {
            base.push(GroupRingElement::sigma().pow(k).scale(&int(sign)));
        }
    }
    if wild {
        let r = reflection();
        let twisted: Vec<_> = base.iter().map(|u| gr_mul(u, &r)).collect();
        base.extend(twisted);
    }
    base
}

/// Closure, inverses and element orders of a finite list of group-ring units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitGroupCheck {
    pub order: usize,
    /// `element_orders[i]` is the multiplicative order of the i-th unit.
    pub element_orders: Vec<u32>,
    /// Index of the inverse of each unit within the list.
    pub inverses: Vec<usize>,
    pub exponent: u32,
}

impl UnitGroupCheck {
    /// `Z/6` is cyclic; `Z/2 x Z/6` has exponent 6 but four elements of order 2.
    pub fn is_cyclic(&self) -> bool {
        self.element_orders.contains(&(self.order as u32))
    }
}

pub fn check_unit_group(units: &[GroupRingElement]) -> Result<UnitGroupCheck> {
    let index_of = |x: &GroupRingElement| units.iter().position(|u| u == x);
    for (i, x) in units.iter().enumerate() {
        if units[..i].contains(x) {
            return Err(Error::Precondition(format!("duplicate unit {x:?}")));
        }
        for y in units {
            let xy = gr_mul(x, y);
            if index_of(&xy).is_none() {
                return Err(Error::Precondition(format!(
                    "{x:?} * {y:?} = {xy:?} leaves the list"
                )));
            }
        }
    }
    let one = GroupRingElement::one();
    let mut inverses = Vec::with_capacity(units.len());
    for x in units {
        let inv = units
            .iter()
            .position(|y| gr_mul(x, y) == one)
            .ok_or_else(|| Error::Precondition(format!("{x:?} has no inverse in the list")))?;
        inverses.push(inv);
    }
    let element_orders: Vec<u32> = units
        .iter()
        .map(|x| x.order(units.len() as u32).expect("finite group"))
        .collect();
    let exponent = element_orders
        .iter()
        .fold(1u32, |acc, &o| num_integer::lcm(acc, o));
    Ok(UnitGroupCheck {
        order: units.len(),
        element_orders,
        inverses,
        exponent,
    })
}

/// The conjugates `(x, s x, s^2 x)` of an element of a cyclic cubic field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugateVector(pub [f64; 3]);

impl ConjugateVector {
    pub fn constant(c: f64) -> Self {
        Self([c; 3])
    }

    pub fn trace(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }

    pub fn max_distance(&self, o: &Self) -> f64 {
        (0..3)
            .map(|i| (self.0[i] - o.0[i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Group-ring action: `s` shifts `(x, s x, s^2 x)` to `(s x, s^2 x, x)`.
pub fn apply(x: &GroupRingElement, v: &ConjugateVector) -> ConjugateVector {
    let c = x.to_f64();
    ConjugateVector(std::array::from_fn(|i| {
        (0..3).map(|k| c[k] * v.0[(i + k) % 3]).sum()
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorCheck {
    /// `alpha + alpha' + alpha''` evaluated numerically.
    pub trace_alpha: f64,
    /// Distance from `eta_0 + 1` to the nearest of the twelve generators `u(alpha + 1)`.
    pub generator_residual: f64,
    /// `|(1 - 2e_1)(alpha + 1) - (alpha - 1)|`.
    pub reflection_residual: f64,
    /// Minimal polynomial of `alpha = n2 rho - n1/3`.
    pub h: RationalCubic,
}

/// Checks the generator structure of a wild field record:
/// (a) `alpha = n2 rho - n1/3` has trace zero,
/// (b) `eta_0 + 1` is one of the twelve `u (alpha + 1)`,
/// (c) `h(X) = mu P(mu X)` exactly, with `h` defined by `n2^3 f_n(X) = h(n2 X - n1/3)`.
pub fn verify_generators(rec: &FieldRecord, tolerance: f64) -> Result<GeneratorCheck> {
    let fail = |part, detail: String| Error::GeneratorFailure { part, detail };
    if !rec.conductor.is_wild() {
        return Err(Error::Precondition(
            "generator check needs a wild conductor".into(),
        ));
    }
    let sp = &rec.shanks_params;
    let (n1, n2) = (sp.n1, sp.n2);

    // (a) exact: sum of roots of f_n is n, so n2 * n - n1 = 0
    let n = sp.n();
    if &n * int(n2) - int(n1) != BigRational::zero() {
        return Err(fail('a', format!("n2 * n - n1 != 0 for n = {n}")));
    }
    let third = n1 as f64 / 3.0;
    let alpha = ConjugateVector(rec.shanks_roots.map(|r| n2 as f64 * r - third));
    let trace_alpha = alpha.trace();
    if trace_alpha.abs() >= tolerance * (1.0 + alpha.0.iter().map(|x| x.abs()).sum::<f64>()) {
        return Err(fail('a', format!("numeric trace {trace_alpha:e}")));
    }

    // (b) the twelve images of alpha + 1 under the unit group
    let one = ConjugateVector::constant(1.0);
    let gen = alpha.add(&one);
    let eta0 = rec.periods.etas[0];
    let mut generator_residual = f64::INFINITY;
    for u in unit_list_p3(true) {
        let image = apply(&u, &gen);
        generator_residual = generator_residual.min((image.0[0] - (eta0 + 1.0)).abs());
    }
    if generator_residual >= tolerance {
        return Err(fail(
            'b',
            format!("eta_0 + 1 is {generator_residual:e} from every generator"),
        ));
    }
    let reflected = apply(&reflection(), &gen);
    let minus = ConjugateVector(alpha.0.map(|x| x - 1.0));
    let reflection_residual = reflected.max_distance(&minus);
    if reflection_residual >= tolerance {
        return Err(fail(
            'b',
            format!("(1 - 2e_1)(alpha + 1) != alpha - 1 by {reflection_residual:e}"),
        ));
    }

    // (c) exact
    let scaled = shanks_poly(&n).scale(&int(n2.pow(3)));
    let h = substitute_affine(&scaled, &rat(1, n2), &rat(n1, 3 * n2));
    let mu = int(rec.conductor.mu());
    let target = substitute_affine(&rec.predicted_p, &mu, &BigRational::zero()).scale(&mu);
    if h != target {
        return Err(fail('c', format!("h = {h}, mu P(mu X) = {target}")));
    }
    // +-alpha +-1 are algebraic integers: their minimal polynomials have integer coefficients
    for shift in [1i64, -1] {
        let shifted = substitute_affine(&h, &BigRational::one(), &int(shift));
        let negated = substitute_affine(&shifted, &int(-1), &BigRational::zero()).scale(&int(-1));
        if shifted.integer_coeffs().is_none() || negated.integer_coeffs().is_none() {
            return Err(fail(
                'c',
                format!("minimal polynomial of +-alpha {shift:+} is not integral"),
            ));
        }
    }
    Ok(GeneratorCheck {
        trace_alpha,
        generator_residual,
        reflection_residual,
        h,
    })
}

/// Denominator-free check that `x` lies in `Z[G]`.
pub fn is_integral(x: &GroupRingElement) -> bool {
    x.c.iter().all(|c| c.denom() == &BigInt::one())
}

//! Gaussian periods from first principles, matched against the closed forms.
//!
//! Each cyclic cubic field of conductor `f` is cut out by an index-3 subgroup `H` of
//! `(Z/fZ)^x`, the kernel of a primitive cubic character. The periods are the sums of
//! `exp(2 pi i a/f)` over the three cosets of `H`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::arith::{mul_mod, primitive_root_prime_power, Conductor, Ramification};
use crate::cubicpoly::{
    affine_relation, discriminant_check, int, irreducibility_criterion, is_irreducible_cubic,
    period_poly_formula, shanks_poly, verify_main_identity, RationalCubic,
};
use crate::eisenstein::character_for_representation;
use crate::error::{Error, Result};
use crate::groupring::verify_generators;
use crate::numeric::{multiset_distance, CompensatedSum};
use crate::quadform::{representations, shanks_params, Representation, ShanksParams};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Sanity bound for the partition identity and the vanishing imaginary part, scaled by `f`.
pub const PARTITION_TOLERANCE_PER_UNIT: f64 = 1e-9;

/// One cyclic factor `(Z/qZ)^x` of the unit group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitComponent {
    pub prime_power: u64,
    /// Primitive root modulo `prime_power`.
    pub local_generator: u64,
    /// The same generator lifted by CRT: `= local_generator (mod q)`, `= 1` mod the other parts.
    pub generator: u64,
    pub order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitGroup {
    pub modulus: u64,
    pub components: Vec<UnitComponent>,
}

impl UnitGroup {
    /// `(residue, order)` pairs.
    pub fn generators(&self) -> Vec<(u64, u64)> {
        self.components
            .iter()
            .map(|c| (c.generator, c.order))
            .collect()
    }

    pub fn order(&self) -> u64 {
        self.components.iter().map(|c| c.order).product()
    }

    /// For each component, `table[r]` is the discrete log of `r` mod 3 (255 off the units).
    fn cube_class_tables(&self) -> Vec<Vec<u8>> {
        self.components
            .iter()
            .map(|c| {
                let mut table = vec![u8::MAX; c.prime_power as usize];
                let mut x = 1u64;
                for k in 0..c.order {
                    table[x as usize] = (k % 3) as u8;
                    x = mul_mod(x, c.local_generator, c.prime_power);
                }
                table
            })
            .collect()
    }
}

pub fn unit_group(f: &Conductor) -> UnitGroup {
    let comps = f.components();
    let components = comps
        .iter()
        .map(|&(p, e)| {
            let q = p.pow(e);
            let g = primitive_root_prime_power(p, e);
            let rest = f.value / q;
            // x = g mod q, x = 1 mod rest
            let inv = crate::arith::inv_mod(rest as i128, q as i128).expect("coprime parts") as u64;
            let t = mul_mod((g + q - 1) % q, inv, q);
            let generator = (1 + (rest as u128 * t as u128) % f.value as u128) as u64 % f.value;
            UnitComponent {
                prime_power: q,
                local_generator: g,
                generator,
                order: (p - 1) * p.pow(e - 1),
            }
        })
        .collect();
    UnitGroup {
        modulus: f.value,
        components,
    }
}

/// The kernel of `prod_q chi_q^(e_q)`, where `chi_q` sends the chosen generator of the
/// q-component to `w`. One representative per conjugate pair: `exponents[0] = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CubicKernel {
    pub modulus: u64,
    pub exponents: Vec<u8>,
    /// Members of the index-3 subgroup, ascending.
    pub members: Vec<u64>,
}

impl CubicKernel {
    pub fn contains(&self, a: u64) -> bool {
        self.members.binary_search(&(a % self.modulus)).is_ok()
    }
}

/// Cached per-conductor tables for evaluating all cubic characters and periods.
pub struct PeriodContext {
    pub conductor: Conductor,
    pub group: UnitGroup,
    /// `classes[a]`: discrete logs mod 3 of `a` in each component, or `None` off the units.
    classes: Vec<Option<Vec<u8>>>,
}

impl PeriodContext {
    pub fn new(f: &Conductor) -> Self {
        let group = unit_group(f);
        let tables = group.cube_class_tables();
        let classes = (0..f.value)
            .map(|a| {
                let v: Vec<u8> = group
                    .components
                    .iter()
                    .zip(&tables)
                    .map(|(c, t)| t[(a % c.prime_power) as usize])
                    .collect();
                v.iter().all(|&x| x != u8::MAX).then_some(v)
            })
            .collect();
        Self {
            conductor: f.clone(),
            group,
            classes,
        }
    }

    /// Value of the character with these exponents at `a`, as an exponent of `w`.
    pub fn character_value(&self, exponents: &[u8], a: u64) -> Option<u8> {
        self.classes[(a % self.conductor.value) as usize]
            .as_ref()
            .map(|cls| {
                (cls.iter()
                    .zip(exponents)
                    .map(|(&c, &e)| (c * e) as u32)
                    .sum::<u32>()
                    % 3) as u8
            })
    }

    pub fn kernel(&self, exponents: Vec<u8>) -> CubicKernel {
        let members = (1..self.conductor.value)
            .filter(|&a| self.character_value(&exponents, a) == Some(0))
            .collect();
        CubicKernel {
            modulus: self.conductor.value,
            exponents,
            members,
        }
    }

    pub fn primitive_kernels(&self) -> Result<Vec<CubicKernel>> {
        let k = self.group.components.len();
        let mut out = Vec::with_capacity(1 << (k - 1));
        for mask in 0..(1u32 << (k - 1)) {
            let exponents: Vec<u8> = (0..k)
                .map(|i| {
                    if i == 0 {
                        1
                    } else {
                        1 + ((mask >> (i - 1)) & 1) as u8
                    }
                })
                .collect();
            out.push(self.kernel(exponents));
        }
        let expected = self.conductor.field_count();
        if out.len() != expected {
            return Err(Error::CountMismatch {
                conductor: self.conductor.value,
                what: "primitive cubic kernels",
                expected,
                found: out.len(),
            });
        }
        Ok(out)
    }

    /// Periods of the field cut out by `kernel`.
    pub fn periods(&self, kernel: &CubicKernel) -> Result<PeriodTriple> {
        let f = self.conductor.value;
        let mut re: [CompensatedSum; 3] = Default::default();
        let mut im: [CompensatedSum; 3] = Default::default();
        for a in 1..f {
            if let Some(j) = self.character_value(&kernel.exponents, a) {
                let angle = TAU * (a as f64 / f as f64);
                re[j as usize].add(angle.cos());
                im[j as usize].add(angle.sin());
            }
        }
        let by_coset = re.map(|s| s.value());
        let imag_residual = im.iter().map(|s| s.value().abs()).fold(0.0, f64::max);
        let trace = match self.conductor.kind {
            Ramification::Tame => self.conductor.mu() as f64,
            Ramification::Wild => 0.0,
        };
        let sum_residual = (by_coset.iter().sum::<f64>() - trace).abs();
        let bound = PARTITION_TOLERANCE_PER_UNIT * f as f64;
        if imag_residual >= bound {
            return Err(Error::ToleranceExceeded {
                what: "imaginary part of a period",
                residual: imag_residual,
                tolerance: bound,
            });
        }
        if sum_residual >= bound {
            return Err(Error::ToleranceExceeded {
                what: "period sum",
                residual: sum_residual,
                tolerance: bound,
            });
        }
        let mut etas = by_coset;
        etas.sort_by(|a, b| b.total_cmp(a));
        Ok(PeriodTriple {
            conductor: f,
            etas,
            by_coset,
            imag_residual,
            sum_residual,
            kernel: kernel.clone(),
        })
    }
}

pub fn primitive_cubic_kernels(f: &Conductor) -> Result<Vec<CubicKernel>> {
    PeriodContext::new(f).primitive_kernels()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodTriple {
    pub conductor: u64,
    /// `eta_0 >= eta_1 >= eta_2`.
    pub etas: [f64; 3],
    /// Periods indexed by the character value on the coset (0 is the kernel itself).
    pub by_coset: [f64; 3],
    pub imag_residual: f64,
    pub sum_residual: f64,
    #[serde(skip)]
    pub kernel: CubicKernel,
}

pub fn gaussian_periods(f: &Conductor, kernel: &CubicKernel) -> Result<PeriodTriple> {
    PeriodContext::new(f).periods(kernel)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericPeriodPoly {
    pub poly: RationalCubic,
    /// Largest distance of an expanded coefficient from its rounded integer.
    pub residual: f64,
}

/// Expands `(X - eta_0)(X - eta_1)(X - eta_2)` and rounds every coefficient to an integer.
pub fn numeric_period_poly(pt: &PeriodTriple, tolerance: f64) -> Result<NumericPeriodPoly> {
    let [a, b, c] = pt.etas;
    let e1: CompensatedSum = [a, b, c].into_iter().collect();
    let e2: CompensatedSum = [a * b, a * c, b * c].into_iter().collect();
    let coeffs = [-(a * b * c), e2.value(), -e1.value()];
    let mut residual: f64 = 0.0;
    let mut rounded = [0i64; 3];
    for (k, &x) in coeffs.iter().enumerate() {
        let r = x.round();
        let res = (x - r).abs();
        if res >= tolerance {
            return Err(Error::RoundingFailure {
                degree: k,
                value: x,
                residual: res,
                tolerance,
            });
        }
        residual = residual.max(res);
        rounded[k] = r as i64;
    }
    Ok(NumericPeriodPoly {
        poly: RationalCubic::from_ints(1, rounded[2], rounded[1], rounded[0]),
        residual,
    })
}

/// The three real roots of a cubic with positive discriminant, descending.
///
/// Trigonometric solution of the depressed cubic, then Newton polishing.
pub fn real_roots_cubic(p: &RationalCubic) -> Result<[f64; 3]> {
    if p.degree() != Some(3) {
        return Err(Error::NotCubic(p.degree().unwrap_or(0)));
    }
    let disc = p.discriminant();
    if !disc.is_positive() {
        return Err(Error::ComplexRoots(disc.to_string()));
    }
    let lead = p.coeffs[3].clone();
    let monic = p.scale(&(int(1) / lead));
    let [_, c, b, _] = monic.to_f64();
    let d = monic.coeffs[0].to_f64().unwrap();
    // x = t - b/3: t^3 + pt + q
    let pp = c - b * b / 3.0;
    let qq = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let r = 2.0 * (-pp / 3.0).sqrt();
    let arg = ((3.0 * qq / (2.0 * pp)) * (-3.0 / pp).sqrt()).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let coeffs = monic.to_f64();
    let eval = |x: f64| ((x + coeffs[2]) * x + coeffs[1]) * x + coeffs[0];
    let deriv = |x: f64| (3.0 * x + 2.0 * coeffs[2]) * x + coeffs[1];
    let mut roots: [f64; 3] = std::array::from_fn(|k| {
        let mut x = r * (theta - TAU * k as f64 / 3.0).cos() - b / 3.0;
        for _ in 0..2 {
            let dx = deriv(x);
            if dx != 0.0 {
                let step = eval(x) / dx;
                if step.is_finite() {
                    x -= step;
                }
            }
        }
        x
    });
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Self {
            pass: true,
            residual: None,
            detail: None,
        }
    }

    pub fn with_residual(residual: f64) -> Self {
        Self {
            pass: true,
            residual: Some(residual),
            detail: None,
        }
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        Self {
            pass: false,
            residual: None,
            detail: Some(detail.into()),
        }
    }

    fn from_result<T>(r: Result<T>, residual: impl FnOnce(&T) -> Option<f64>) -> Self {
        match r {
            Ok(v) => Self {
                pass: true,
                residual: residual(&v),
                detail: None,
            },
            Err(e) => Self::fail(e.to_string()),
        }
    }

    fn from_bool(ok: bool, detail: impl FnOnce() -> String) -> Self {
        if ok {
            Self::pass()
        } else {
            Self::fail(detail())
        }
    }
}

/// One cyclic cubic field of a conductor with everything computed about it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldRecord {
    pub conductor: Conductor,
    pub representation: Representation,
    pub shanks_params: ShanksParams,
    pub shanks_poly: RationalCubic,
    /// Closed-form period polynomial.
    pub predicted_p: RationalCubic,
    /// Period polynomial expanded from the numeric periods.
    pub numeric_p: RationalCubic,
    pub rounding_residual: f64,
    pub matched_kernel: CubicKernel,
    pub periods: PeriodTriple,
    /// Roots of `f_n`, descending.
    pub shanks_roots: [f64; 3],
    pub verdicts: BTreeMap<String, Verdict>,
}

impl FieldRecord {
    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|v| v.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.verdicts
            .values()
            .filter_map(|v| v.residual)
            .fold(self.rounding_residual, f64::max)
    }

    /// The periods predicted from the roots of `f_n`.
    pub fn predicted_periods(&self) -> [f64; 3] {
        let (a, b) = affine_relation(&self.conductor, &self.shanks_params);
        let (a, b) = (a.to_f64().unwrap(), b.to_f64().unwrap());
        self.shanks_roots.map(|r| a * r + b)
    }
}

/// Multiset distance between the periods and `{mu (n2 rho + shift)}` over the roots of `f_n`.
pub fn verify_period_relation(rec: &FieldRecord, tolerance: f64) -> Result<f64> {
    let residual = multiset_distance(&rec.periods.etas, &rec.predicted_periods());
    if residual >= tolerance || residual.is_nan() {
        return Err(Error::RelationFailure {
            residual,
            tolerance,
        });
    }
    Ok(residual)
}

/// `eta_0 eta_1 eta_2 = (-1)^(nu+1) (mod 3)` and `f M/27 = p_1...p_nu M0 = -1 (mod 3)`.
pub fn verify_sign_congruences(rec: &FieldRecord) -> Result<()> {
    let f = &rec.conductor;
    let r = &rec.representation;
    let m0 =
        r.m0.ok_or_else(|| Error::Precondition("sign congruences need a wild record".into()))?;
    let product = -rec.numeric_p.coeffs[0]
        .to_integer()
        .to_i128()
        .expect("small constant term");
    let expected = if f.nu().is_multiple_of(2) { -1 } else { 1 };
    if (product - expected).rem_euclid(3) != 0 {
        return Err(Error::CongruenceFailure(format!(
            "eta_0 eta_1 eta_2 = {product} is not (-1)^{} mod 3",
            f.nu() + 1
        )));
    }
    let fm = f.value as i128 * r.m as i128;
    let prod_m0 = f.prime_product() as i128 * m0 as i128;
    if fm % 27 != 0 || fm / 27 != prod_m0 {
        return Err(Error::CongruenceFailure(format!(
            "f M / 27 = {fm}/27 differs from p_1...p_nu M0 = {prod_m0}"
        )));
    }
    if prod_m0.rem_euclid(3) != 2 {
        return Err(Error::CongruenceFailure(format!(
            "f M / 27 = {prod_m0} is not -1 mod 3"
        )));
    }
    Ok(())
}

/// Numeric periods of every field of conductor `f`, each kernel with its rounded polynomial.
pub fn kernel_period_polys(
    ctx: &PeriodContext,
    tolerance: f64,
) -> Result<Vec<(CubicKernel, PeriodTriple, NumericPeriodPoly)>> {
    ctx.primitive_kernels()?
        .into_iter()
        .map(|k| {
            let pt = ctx.periods(&k)?;
            let np = numeric_period_poly(&pt, tolerance)?;
            Ok((k, pt, np))
        })
        .collect()
}

/// Pairs every representation of `f` with the unique kernel whose numeric period polynomial
/// equals the closed form, and runs all checks on each pair.
pub fn match_fields(f: &Conductor, tolerance: f64) -> Result<Vec<FieldRecord>> {
    let reps = representations(f)?;
    let ctx = PeriodContext::new(f);
    let kernels = kernel_period_polys(&ctx, tolerance)?;
    let mut used = vec![false; kernels.len()];
    let mut records = Vec::with_capacity(reps.len());

    for rep in reps {
        let predicted_p = period_poly_formula(f, &rep)?;
        let hits: Vec<usize> = kernels
            .iter()
            .enumerate()
            .filter(|(_, (_, _, np))| np.poly == predicted_p)
            .map(|(i, _)| i)
            .collect();
        let idx = match hits.as_slice() {
            [i] if !used[*i] => *i,
            [i] => {
                return Err(Error::MatchingFailure {
                    conductor: f.value,
                    detail: format!("kernel {i} matched twice"),
                })
            }
            _ => {
                return Err(Error::MatchingFailure {
                    conductor: f.value,
                    detail: format!(
                        "(M, N) = ({}, {}) with P = {predicted_p} matched {} kernels",
                        rep.m,
                        rep.n,
                        hits.len()
                    ),
                })
            }
        };
        used[idx] = true;
        let (kernel, periods, numeric) = kernels[idx].clone();

        let sp = shanks_params(&rep)?;
        let fn_poly = shanks_poly(&sp.n());
        let shanks_roots = real_roots_cubic(&fn_poly)?;
        let mut rec = FieldRecord {
            conductor: f.clone(),
            representation: rep,
            shanks_params: sp,
            shanks_poly: fn_poly,
            predicted_p,
            numeric_p: numeric.poly,
            rounding_residual: numeric.residual,
            matched_kernel: kernel,
            periods,
            shanks_roots,
            verdicts: BTreeMap::new(),
        };
        rec.verdicts = run_checks(&rec, tolerance);
        records.push(rec);
    }
    Ok(records)
}

fn run_checks(rec: &FieldRecord, tolerance: f64) -> BTreeMap<String, Verdict> {
    let f = &rec.conductor;
    let sp = &rec.shanks_params;
    let mut v = BTreeMap::new();
    v.insert(
        "coprime".into(),
        Verdict::from_bool(sp.is_coprime(), || {
            format!("gcd({}, {}) != 1", sp.n1, sp.n2)
        }),
    );
    v.insert(
        "delta".into(),
        Verdict::from_bool(sp.delta == f.value as i128, || {
            format!("delta = {} != {}", sp.delta, f.value)
        }),
    );
    v.insert(
        "irreducible".into(),
        match is_irreducible_cubic(&rec.shanks_poly) {
            Ok(true) => Verdict::pass(),
            Ok(false) => Verdict::fail("f_n has a rational root"),
            Err(e) => Verdict::fail(e.to_string()),
        },
    );
    v.insert(
        "discriminant".into(),
        Verdict::from_result(discriminant_check(&sp.n()), |_| None),
    );
    v.insert(
        "main_identity".into(),
        Verdict::from_result(verify_main_identity(f, sp), |_| None),
    );
    v.insert(
        "period_relation".into(),
        Verdict::from_result(verify_period_relation(rec, tolerance), |r| Some(*r)),
    );
    v.insert(
        "character_kernel".into(),
        match character_for_representation(&rec.representation) {
            Ok(chi) => Verdict::from_bool(chi.kernel() == rec.matched_kernel.members, || {
                "kernel of the Eisenstein character differs from the matched kernel".into()
            }),
            Err(e) => Verdict::fail(e.to_string()),
        },
    );
    if f.is_wild() {
        v.insert(
            "wild_conditions".into(),
            Verdict::from_bool(sp.satisfies_wild_conditions(), || {
                format!(
                    "(n1, n2) = ({}, {}) violates 3 | n1, 2n1/3 + n2 = 2 mod 3",
                    sp.n1, sp.n2
                )
            }),
        );
        v.insert(
            "irreducibility_criterion".into(),
            Verdict::from_bool(irreducibility_criterion(sp.n1, sp.n2), || {
                "irreducibility hypotheses do not hold".into()
            }),
        );
        v.insert(
            "sign_congruences".into(),
            Verdict::from_result(verify_sign_congruences(rec), |_| None),
        );
        v.insert(
            "generators".into(),
            Verdict::from_result(verify_generators(rec, tolerance), |g| {
                Some(g.generator_residual.max(g.reflection_residual))
            }),
        );
    }
    v
}

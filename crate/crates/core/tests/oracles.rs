//! Independent recomputations compared against the library.

use std::collections::BTreeSet;

use num_complex::Complex64;

use cubic_periods::arith::{conductors_up_to, gcd, Conductor};
use cubic_periods::cubicpoly::{period_poly_formula, RationalCubic};
use cubic_periods::periods::{match_fields, primitive_cubic_kernels};
use cubic_periods::quadform::representations;

/// Index-3 subgroups of `(Z/fZ)^x` that are not pulled back from a proper divisor of `f`,
/// found from the subgroup of cubes and a greedy basis of the quotient.
fn oracle_kernels(f: u64) -> BTreeSet<Vec<u64>> {
    let units: Vec<u64> = (1..f).filter(|&a| gcd(a, f) == 1).collect();
    let cubes: BTreeSet<u64> = units.iter().map(|&a| a * a % f * a % f).collect();
    let mul_set =
        |s: &BTreeSet<u64>, g: u64| -> BTreeSet<u64> { s.iter().map(|&x| x * g % f).collect() };

    // greedy basis b_1..b_k of the elementary abelian quotient
    let mut span = cubes.clone();
    let mut basis = Vec::new();
    for &a in &units {
        if span.contains(&a) {
            continue;
        }
        basis.push(a);
        let a2 = mul_set(&span, a);
        let a3 = mul_set(&a2, a);
        span.extend(a2);
        span.extend(a3);
    }
    let k = basis.len();

    let mut out = BTreeSet::new();
    // functionals lambda with first nonzero entry 1
    for code in 1..3u32.pow(k as u32) {
        let lambda: Vec<u32> = (0..k).map(|i| code / 3u32.pow(i as u32) % 3).collect();
        if lambda.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let mut h = BTreeSet::new();
        for e in 0..3u32.pow(k as u32) {
            let exps: Vec<u32> = (0..k).map(|i| e / 3u32.pow(i as u32) % 3).collect();
            if exps.iter().zip(&lambda).map(|(a, b)| a * b).sum::<u32>() % 3 != 0 {
                continue;
            }
            let g = basis
                .iter()
                .zip(&exps)
                .fold(1u64, |acc, (&b, &x)| (0..x).fold(acc, |acc, _| acc * b % f));
            h.extend(mul_set(&cubes, g));
        }
        // primitive: for every q || f, H misses some a = 1 mod f/q
        let primitive = prime_power_parts(f).into_iter().all(|q| {
            let rest = f / q;
            units
                .iter()
                .any(|&a| a % rest == 1 % rest && !h.contains(&a))
        });
        if primitive {
            out.insert(h.into_iter().collect());
        }
    }
    out
}

fn prime_power_parts(f: u64) -> Vec<u64> {
    let mut parts = Vec::new();
    let mut n = f;
    let mut p = 2;
    while n > 1 {
        if n.is_multiple_of(p) {
            let mut q = 1;
            while n.is_multiple_of(p) {
                n /= p;
                q *= p;
            }
            parts.push(q);
        }
        p += 1;
    }
    parts
}

/// Period polynomial from plain complex exponential sums over the cosets of `h`.
fn oracle_period_poly(f: u64, h: &[u64]) -> RationalCubic {
    let hs: BTreeSet<u64> = h.iter().copied().collect();
    let mut cosets: Vec<BTreeSet<u64>> = Vec::new();
    for a in (1..f).filter(|&a| gcd(a, f) == 1) {
        if cosets.iter().any(|c| c.contains(&a)) {
            continue;
        }
        cosets.push(hs.iter().map(|&x| x * a % f).collect());
    }
    assert_eq!(cosets.len(), 3);
    let etas: Vec<Complex64> = cosets
        .iter()
        .map(|c| {
            c.iter()
                .map(|&a| {
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * a as f64 / f as f64)
                })
                .sum()
        })
        .collect();
    let (a, b, c) = (etas[0], etas[1], etas[2]);
    let r = |z: Complex64| {
        assert!(z.im.abs() < 1e-6);
        z.re.round() as i64
    };
    RationalCubic::from_ints(1, -r(a + b + c), r(a * b + a * c + b * c), -r(a * b * c))
}

fn small_conductors(bound: u64) -> Vec<Conductor> {
    conductors_up_to(bound, None)
}

#[test]
fn kernels_agree_with_subgroup_oracle() {
    for f in small_conductors(1500) {
        let ours: BTreeSet<Vec<u64>> = primitive_cubic_kernels(&f)
            .unwrap()
            .into_iter()
            .map(|k| k.members)
            .collect();
        assert_eq!(ours, oracle_kernels(f.value), "conductor {}", f.value);
    }
}

#[test]
fn period_polynomials_agree_with_oracle() {
    for f in small_conductors(2000) {
        let oracle: BTreeSet<String> = oracle_kernels(f.value)
            .iter()
            .map(|h| oracle_period_poly(f.value, h).to_string())
            .collect();
        let closed: BTreeSet<String> = representations(&f)
            .unwrap()
            .iter()
            .map(|r| period_poly_formula(&f, r).unwrap().to_string())
            .collect();
        assert_eq!(oracle, closed, "conductor {}", f.value);
    }
}

#[test]
fn representations_agree_with_brute_force() {
    for f in small_conductors(3000) {
        let four_f = 4 * f.value as i64;
        let mut pairs = Vec::new();
        for n in 1..=((four_f / 27) as f64).sqrt() as i64 + 1 {
            let rest = four_f - 27 * n * n;
            if rest < 0 {
                break;
            }
            let m = (rest as f64).sqrt().round() as i64;
            for m in [m, -m] {
                if m * m != rest {
                    continue;
                }
                let ok = if f.is_wild() {
                    m % 3 == 0 && (m / 3).rem_euclid(3) == 2 && n % 3 != 0
                } else {
                    m.rem_euclid(3) == 2
                };
                if ok && !pairs.contains(&(m, n)) {
                    pairs.push((m, n));
                }
            }
        }
        pairs.sort_by_key(|p| std::cmp::Reverse(p.0));
        let ours: Vec<(i64, i64)> = representations(&f)
            .unwrap()
            .iter()
            .map(|r| (r.m, r.n))
            .collect();
        assert_eq!(ours, pairs, "conductor {}", f.value);
    }
}

#[test]
fn table_periods_match_closed_values() {
    // eta's of the first row are the roots of X^3 - 273X + 1729
    let f = cubic_periods::arith::validate_conductor(819).unwrap();
    let recs = match_fields(&f, 1e-6).unwrap();
    let row = recs.iter().find(|r| r.shanks_params.n2 == 1).unwrap();
    assert_eq!(row.predicted_p, RationalCubic::from_ints(1, 0, -273, 1729));
    for eta in row.periods.etas {
        assert!(row.predicted_p.eval_f64(eta).abs() < 1e-8);
    }
}

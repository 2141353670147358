use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use cubic_periods::arith::{gcd, moebius, validate_conductor};
use cubic_periods::cubicpoly::{
    int, irreducibility_criterion, is_irreducible_cubic, rat, shanks_poly, substitute_affine,
    RationalCubic,
};
use cubic_periods::eisenstein::{eis_gcd, EisensteinInt};
use cubic_periods::groupring::{apply, gr_mul, ConjugateVector, GroupRingElement};
use cubic_periods::quadform::ShanksParams;

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn cubic() -> impl Strategy<Value = RationalCubic> {
    (small_rat(), small_rat(), small_rat(), small_rat())
        .prop_filter("leading coefficient", |(a, ..)| !a.is_zero())
        .prop_map(|(a, b, c, d)| RationalCubic::new(a, b, c, d))
}

fn eis() -> impl Strategy<Value = EisensteinInt> {
    (-10_000i128..10_000, -10_000i128..10_000).prop_map(|(a, b)| EisensteinInt { a, b })
}

fn group_ring() -> impl Strategy<Value = GroupRingElement> {
    (small_rat(), small_rat(), small_rat()).prop_map(|(a, b, c)| GroupRingElement::new(a, b, c))
}

fn g_int() -> impl Strategy<Value = GroupRingElement> {
    (-5i64..6, -5i64..6, -5i64..6).prop_map(|(a, b, c)| GroupRingElement::from_ints(a, b, c))
}

proptest! {
    #[test]
    fn substitute_round_trip(p in cubic(), a in small_rat(), b in small_rat()) {
        prop_assume!(!a.is_zero());
        let q = substitute_affine(&p, &a, &b);
        let back = substitute_affine(&q, &(int(1) / &a), &(-&b / &a));
        prop_assert_eq!(back, p);
    }

    #[test]
    fn substitute_agrees_with_evaluation(p in cubic(), a in small_rat(), b in small_rat(), x in small_rat()) {
        let q = substitute_affine(&p, &a, &b);
        prop_assert_eq!(q.eval(&x), p.eval(&(&a * &x + &b)));
    }

    #[test]
    fn ratio_strings_round_trip(p in cubic()) {
        let s = p.to_ratio_strings();
        prop_assert_eq!(RationalCubic::from_ratio_strings(&s).unwrap(), p);
    }

    #[test]
    fn eisenstein_norm_multiplicative(x in eis(), y in eis()) {
        prop_assert_eq!((x * y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.conj().norm(), x.norm());
    }

    #[test]
    fn eisenstein_gcd_divides(x in eis(), y in eis()) {
        prop_assume!(!x.is_zero() || !y.is_zero());
        let g = eis_gcd(x, y);
        prop_assert!(g.divides(x) && g.divides(y));
        // any common divisor built in also divides the gcd
        let (c, u, v) = (EisensteinInt { a: 2, b: 1 }, x, y);
        let g2 = eis_gcd(c * u, c * v);
        prop_assert!(c.divides(g2));
    }

    #[test]
    fn eisenstein_division_shrinks(x in eis(), y in eis()) {
        prop_assume!(!y.is_zero());
        let r = x.modulo(y);
        prop_assert!(r.norm() < y.norm());
        prop_assert_eq!(x.div_round(y) * y + r, x);
    }

    #[test]
    fn group_ring_axioms(x in group_ring(), y in group_ring(), z in group_ring()) {
        prop_assert_eq!(gr_mul(&gr_mul(&x, &y), &z), gr_mul(&x, &gr_mul(&y, &z)));
        prop_assert_eq!(gr_mul(&x, &y), gr_mul(&y, &x));
        prop_assert_eq!(gr_mul(&x, &(&y + &z)), &gr_mul(&x, &y) + &gr_mul(&x, &z));
        prop_assert_eq!(gr_mul(&x, &GroupRingElement::one()), x.clone());
        prop_assert_eq!(&x - &x, GroupRingElement::zero());
    }

    #[test]
    fn action_is_multiplicative(x in g_int(), y in g_int(), v in proptest::array::uniform3(-10.0f64..10.0)) {
        let v = ConjugateVector(v);
        let lhs = apply(&gr_mul(&x, &y), &v);
        let rhs = apply(&x, &apply(&y, &v));
        prop_assert!(lhs.max_distance(&rhs) < 1e-9);
    }

    #[test]
    fn shanks_params_delta(n1 in -500i64..500, n2 in 1i64..500) {
        let sp = ShanksParams::new(n1, n2);
        prop_assert_eq!(sp.delta, (n1 as i128).pow(2) + 3 * (n1 * n2) as i128 + 9 * (n2 as i128).pow(2));
        prop_assert_eq!(sp.m(), 2 * n1 + 3 * n2);
    }

    #[test]
    fn irreducibility_criterion_implies_irreducible(n1 in -300i64..300, n2 in 1i64..300) {
        prop_assume!(gcd(n1.unsigned_abs(), n2 as u64) == 1);
        if irreducibility_criterion(n1, n2) {
            prop_assert!(is_irreducible_cubic(&shanks_poly(&rat(n1, n2))).unwrap());
        }
    }

    #[test]
    fn conductor_validation_is_consistent(f in 1u64..200_000) {
        if let Ok(c) = validate_conductor(f) {
            prop_assert_eq!(c.prime_product() * if c.is_wild() { 9 } else { 1 }, f);
            prop_assert_eq!(c.mu(), if c.nu() % 2 == 0 { 1 } else { -1 });
        }
    }
}

/// Linear sieve for the Moebius function, independent of factorization.
fn moebius_sieve(n: usize) -> Vec<i8> {
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    mu[0] = 0;
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            if i * p > n {
                break;
            }
            composite[i * p] = true;
            if i % p == 0 {
                mu[i * p] = 0;
                break;
            }
            mu[i * p] = -mu[i];
        }
    }
    mu
}

#[test]
fn moebius_matches_sieve_to_ten_thousand() {
    let sieve = moebius_sieve(10_000);
    for m in 1..=10_000u64 {
        assert_eq!(moebius(m), sieve[m as usize], "mu({m})");
    }
}

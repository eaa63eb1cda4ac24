use lehmer_core::ntcore::{build_crt_plan, divisors, factor, gcd, mod_inverse, pow_mod_signed, ModArith, Modulus};
use proptest::prelude::*;

#[test]
fn totient_matches_coprime_count_up_to_10k() {
    for q in 2..=10_000u64 {
        let brute = (1..q).filter(|&n| gcd(n, q) == 1).count() as u64;
        assert_eq!(Modulus::new(q).unwrap().phi(), brute, "q={q}");
    }
}

#[test]
fn inverse_is_an_involution_up_to_10k() {
    for q in 2..=10_000u64 {
        for n in (1..q).filter(|&n| gcd(n, q) == 1) {
            let inv = mod_inverse(n as i64, q).unwrap();
            assert!((1..q).contains(&inv));
            assert_eq!((inv as u128 * n as u128 % q as u128) as u64, 1 % q);
            assert_eq!(mod_inverse(inv as i64, q).unwrap(), n);
        }
    }
}

#[test]
fn signed_powers_are_mutually_inverse() {
    for q in 2..=1_000u64 {
        for n in (1..q).filter(|&n| gcd(n, q) == 1) {
            for k in (-10i64..=10).filter(|&k| k != 0) {
                let x = pow_mod_signed(n as i64, k, q).unwrap();
                let y = pow_mod_signed(n as i64, -k, q).unwrap();
                assert_eq!(x * y % q, 1 % q, "q={q} n={n} k={k}");
            }
        }
    }
}

#[test]
fn factorization_reconstructs_up_to_a_million() {
    for n in 2..=1_000_000u64 {
        let f = factor(n).unwrap();
        let product: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(product, n);
        assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
    }
}

#[test]
fn first_powers_reduce_directly() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(50);
    let mut checked = 0;
    while checked < 50 {
        let q = rng.random_range(2..1_000_000u64);
        let n = rng.random_range(-1_000_000_000i64..1_000_000_000);
        if gcd(n.unsigned_abs() % q, q) != 1 {
            continue;
        }
        assert_eq!(pow_mod_signed(n, 1, q).unwrap(), n.rem_euclid(q as i64) as u64);
        checked += 1;
    }
}

fn is_prime_by_trial(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

proptest! {
    #[test]
    fn modulus_invariants(q in 2u64..5_000_000) {
        let m = Modulus::new(q).unwrap();
        let product: u64 = m.factors().iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(product, q);
        for &(p, e) in m.factors() {
            prop_assert!(e >= 1);
            prop_assert!(is_prime_by_trial(p));
        }
        let phi: u64 = m.factors().iter().map(|&(p, e)| p.pow(e - 1) * (p - 1)).product();
        prop_assert_eq!(m.phi(), phi);
        let d = divisors(&m);
        prop_assert_eq!(d.len() as u64, m.divisor_count());
        prop_assert!(d.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(d.iter().all(|x| q % x == 0));
    }

    #[test]
    fn crt_plan_invariants(q in 2u64..10_000_000) {
        let m = Modulus::new(q).unwrap();
        let plan = build_crt_plan(&m);
        prop_assert_eq!(plan.components().len(), m.omega());
        for c in plan.components() {
            prop_assert!(c.inverse < c.prime_power);
            prop_assert_eq!((c.inverse as u128 * c.cofactor as u128 % c.prime_power as u128) as u64, 1);
            prop_assert_eq!(c.cofactor * c.prime_power, q);
        }
    }

    #[test]
    fn wide_products_do_not_wrap(q in (1u64 << 32)..(1u64 << 62), a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (a % q, b % q);
        let ring = ModArith::new(q);
        let expected = (a as u128 * b as u128 % q as u128) as u64;
        prop_assert_eq!(ring.mul(a, b), expected);
    }

    #[test]
    fn barrett_products_are_exact(q in 2u64..(1u64 << 32), a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (a % q, b % q);
        let expected = (a as u128 * b as u128 % q as u128) as u64;
        prop_assert_eq!(ModArith::new(q).mul(a, b), expected);
    }

    #[test]
    fn semiprimes_near_2_pow_40_factor(p_idx in 0usize..6, r_idx in 0usize..6) {
        const PRIMES: [u64; 6] = [1_048_573, 1_048_571, 1_048_559, 999_983, 999_979, 1_000_003];
        let (p, r) = (PRIMES[p_idx], PRIMES[r_idx]);
        let f = factor(p * r).unwrap();
        let product: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(product, p * r);
    }
}

use alloc::vec::Vec;

use super::arith::inverse_raw;
use super::factor::factor;
use crate::Result;

/// A modulus `q >= 2` together with its factorization and the arithmetic
/// functions derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    q: u64,
    factors: Vec<(u64, u32)>,
    primes: Vec<u64>,
    phi: u64,
    divisor_count: u64,
}

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        let factors = factor(q)?;
        let primes = factors.iter().map(|&(p, _)| p).collect();
        let phi = factors.iter().map(|&(p, e)| p.pow(e - 1) * (p - 1)).product();
        let divisor_count = factors.iter().map(|&(_, e)| e as u64 + 1).product();
        Ok(Modulus {
            q,
            factors,
            primes,
            phi,
            divisor_count,
        })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Distinct prime divisors, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Euler's totient, the size of the reduced residue system.
    pub fn phi(&self) -> u64 {
        self.phi
    }

    pub fn divisor_count(&self) -> u64 {
        self.divisor_count
    }

    /// Number of distinct primes dividing `q`.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn is_coprime_to(&self, m: u64) -> bool {
        self.primes.iter().all(|p| !m.is_multiple_of(*p))
    }
}

pub fn euler_phi(m: &Modulus) -> u64 {
    m.phi()
}

/// All positive divisors of `q` in ascending order.
pub fn divisors(m: &Modulus) -> Vec<u64> {
    let mut out = Vec::with_capacity(m.divisor_count as usize);
    out.push(1u64);
    for &(p, e) in &m.factors {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// One prime-power factor `P = p^alpha` of `q` with cofactor `q / P` and
/// `inverse * cofactor = 1 (mod P)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtComponent {
    pub prime: u64,
    pub exponent: u32,
    pub prime_power: u64,
    pub cofactor: u64,
    pub inverse: u64,
}

/// Prime-power decomposition of a modulus with the twisting inverses
/// needed to factor a complete exponential sum modulo `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrtPlan {
    parent: Modulus,
    components: Vec<CrtComponent>,
}

impl CrtPlan {
    pub fn parent(&self) -> &Modulus {
        &self.parent
    }

    pub fn components(&self) -> &[CrtComponent] {
        &self.components
    }
}

pub fn build_crt_plan(m: &Modulus) -> CrtPlan {
    let components = m
        .factors
        .iter()
        .map(|&(p, e)| {
            let prime_power = p.pow(e);
            let cofactor = m.q / prime_power;
            // A lone prime power has cofactor 1, whose inverse is 1.
            let inverse = inverse_raw(cofactor, prime_power).expect("cofactor is coprime to its prime power");
            CrtComponent {
                prime: p,
                exponent: e,
                prime_power,
                cofactor,
                inverse,
            }
        })
        .collect();
    CrtPlan {
        parent: m.clone(),
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntcore::gcd;
    use alloc::vec;

    #[test]
    fn totient_examples() {
        assert_eq!(Modulus::new(12).unwrap().phi(), 4);
        assert_eq!(Modulus::new(7).unwrap().phi(), 6);
        let brute = (1..360u64).filter(|&n| gcd(n, 360) == 1).count() as u64;
        assert_eq!(brute, 96);
        assert_eq!(euler_phi(&Modulus::new(360).unwrap()), brute);
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(&Modulus::new(12).unwrap()), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(&Modulus::new(101).unwrap()), vec![1, 101]);
        let m = Modulus::new(360).unwrap();
        assert_eq!(divisors(&m).len(), 24);
        assert_eq!(m.divisor_count(), 24);
    }

    #[test]
    fn crt_plan_examples() {
        let plan = build_crt_plan(&Modulus::new(15).unwrap());
        let got: Vec<_> = plan
            .components()
            .iter()
            .map(|c| (c.prime_power, c.cofactor, c.inverse))
            .collect();
        assert_eq!(got, vec![(3, 5, 2), (5, 3, 2)]);

        let plan = build_crt_plan(&Modulus::new(10007).unwrap());
        assert_eq!(plan.components().len(), 1);
        let c = plan.components()[0];
        assert_eq!((c.prime_power, c.cofactor, c.inverse), (10007, 1, 1));
    }

    #[test]
    fn crt_plan_360_against_extended_gcd() {
        // Independent inverse: search for t with t * cofactor = 1 (mod P).
        let plan = build_crt_plan(&Modulus::new(360).unwrap());
        assert_eq!(plan.components().len(), 3);
        for c in plan.components() {
            let t = (0..c.prime_power)
                .find(|t| (t * c.cofactor) % c.prime_power == 1)
                .unwrap();
            assert_eq!(c.inverse, t);
            assert_eq!(c.cofactor * c.prime_power, 360);
        }
    }
}

//! Exact integer number theory on 64-bit moduli: factorization, totient,
//! divisors, modular inverses and signed powers, and the CRT scaffolding
//! used to split exponential sums over prime powers.
//!
//! Every product of two residues goes through a 128-bit intermediate (or a
//! Barrett reduction whose intermediate provably fits), so nothing wraps
//! for moduli up to 2^62.

mod arith;
mod factor;
mod modulus;
mod units;

pub use arith::{
    gcd, mod_inverse, mul_mod, pow_mod, pow_mod_signed, pow_mod_signed_capped, ModArith, DEFAULT_EXPONENT_CAP,
};
pub(crate) use arith::{gcd_u128, inverse_raw};
pub use factor::{factor, is_prime, MAX_MODULUS};
pub use modulus::{build_crt_plan, divisors, euler_phi, CrtComponent, CrtPlan, Modulus};
pub use units::{for_each_unit, for_each_unit_with_inverse};

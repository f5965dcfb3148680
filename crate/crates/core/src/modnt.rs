//! Modular and number-theoretic primitives on 64-bit moduli.
//!
//! Every modulus must lie in `[1, 2^63)`. Products are formed in `u128`, so no
//! intermediate can wrap; moduli outside the range are rejected with
//! [`Error::ModulusOutOfRange`] rather than silently truncated.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exclusive upper bound on every modulus handled by this module.
pub const MODULUS_LIMIT: u64 = 1 << 63;

const TRIAL_DIVISION_BOUND: u64 = 1 << 10;
const RHO_SEED: u64 = 0x005e_ed0f_0de5;

fn check_modulus(m: u64) -> Result<()> {
    if m == 0 || m >= MODULUS_LIMIT {
        Err(Error::ModulusOutOfRange(m))
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

/// `base^exp mod m` for an already validated modulus and reduced base.
pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Least nonnegative residue of `a` modulo `m`.
pub fn reduce(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// `base^exp mod m`, with the result in `[0, m)`.
pub fn mod_pow(base: i64, exp: u64, m: u64) -> Result<u64> {
    check_modulus(m)?;
    Ok(pow_mod(reduce(base, m), exp, m))
}

/// `1 + s + ... + s^(k-1) mod m` without forming the sum as an integer.
///
/// Uses `S(2k) = S(k)(1 + s^k)` and `S(2k+1) = S(2k) + s^(2k)`, walking the bits
/// of `k` from the top, so the cost is `O(log k)` modular multiplications.
pub fn geometric_sum_mod(s: i64, k: u64, m: u64) -> Result<u64> {
    check_modulus(m)?;
    Ok(geometric_sum_unchecked(reduce(s, m), k, m))
}

pub(crate) fn geometric_sum_unchecked(s: u64, k: u64, m: u64) -> u64 {
    // (sum, power) = (S(j), s^j) for the prefix j of k's bits read so far.
    let mut sum = 0u64;
    let mut power = 1 % m;
    for bit in (0..64 - k.leading_zeros()).rev() {
        sum = mul_mod(sum, add_mod(1, power, m), m);
        power = mul_mod(power, power, m);
        if (k >> bit) & 1 == 1 {
            sum = add_mod(sum, power, m);
            power = mul_mod(power, s, m);
        }
    }
    sum
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Least common multiple, failing instead of wrapping.
pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("lcm({a}, {b})")))
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut twos = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        twos += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..twos {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p` in the factorization (0 if absent).
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    /// Multiplies the factors back out; `None` on overflow.
    pub fn product(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, &(p, e)| {
            acc.checked_mul(p.checked_pow(e)?)
        })
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Euler's totient of `value`.
    pub fn totient(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// Carmichael's function: the exponent of the unit group modulo `value`.
    pub fn carmichael(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(p, e)| {
            let part = match (p, e) {
                (2, 1) => 1,
                (2, 2) => 2,
                (2, e) => 1 << (e - 2),
                (p, e) => (p - 1) * p.pow(e - 1),
            };
            // lcm of divisors of phi(value) < 2^63 cannot overflow
            acc / gcd(acc, part) * part
        })
    }
}

/// Full prime factorization of `m`, for `1 <= m < 2^63`.
///
/// Small primes are removed by trial division; the cofactor is split with
/// Brent's variant of Pollard's rho, seeded from a fixed constant. The output is
/// sorted, so it does not depend on which split the search finds first.
pub fn factorize(m: u64) -> Result<Factorization> {
    check_modulus(m)?;
    let mut primes = Vec::new();
    let mut n = m;
    let mut d = 2u64;
    while d < TRIAL_DIVISION_BOUND && d * d <= n {
        while n.is_multiple_of(d) {
            primes.push(d);
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(RHO_SEED);
        split_into(n, &mut rng, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { value: m, factors })
}

fn split_into(n: u64, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n, rng);
    split_into(d, rng, out);
    split_into(n / d, rng, out);
}

/// Returns a nontrivial divisor of the odd composite `n`.
fn pollard_brent(n: u64, rng: &mut ChaCha8Rng) -> u64 {
    const BATCH: u64 = 128;
    if n.is_multiple_of(2) {
        return 2;
    }
    loop {
        let c = rng.gen_range(1..n);
        let step = |y: u64| add_mod(mul_mod(y, y, n), c, n);
        let mut y = rng.gen_range(0..n);
        let (mut x, mut ys) = (y, y);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // batch overshot; replay one step at a time
            loop {
                ys = step(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}

/// `ord_r(s)`: the least `d >= 1` with `s^d = 1 (mod r)`.
///
/// Starts from the Carmichael exponent of `(Z/r)^*` and strips prime factors
/// while the power stays 1.
pub fn multiplicative_order(s: i64, r: u64) -> Result<u64> {
    check_modulus(r)?;
    let base = reduce(s, r);
    let g = gcd(base, r);
    if g != 1 {
        return Err(Error::NotCoprime { value: s, modulus: r, gcd: g });
    }
    let fr = factorize(r)?;
    Ok(order_with_factorization(base, &fr))
}

pub(crate) fn order_with_factorization(base: u64, fr: &Factorization) -> u64 {
    let r = fr.value;
    if r == 1 {
        return 1;
    }
    let exponent = fr.carmichael();
    let fe = factorize(exponent).expect("Carmichael exponent is below the modulus");
    let mut ord = exponent;
    for &(p, e) in &fe.factors {
        for _ in 0..e {
            if pow_mod(base, ord / p, r) == 1 {
                ord /= p;
            } else {
                break;
            }
        }
    }
    ord
}

/// `nu_p(m)`: the exponent of the prime `p` in `m`.
pub fn valuation(p: u64, m: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(Error::ZeroValuation);
    }
    let mut m = m;
    let mut v = 0;
    while m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    Ok(v)
}

/// Jacobi symbol `(a / b)` for odd `b >= 1`.
pub fn jacobi_symbol(a: i64, b: i64) -> Result<i8> {
    if b <= 0 || b % 2 == 0 {
        return Err(Error::InvalidJacobiModulus(b));
    }
    let mut n = b as u64;
    let mut sign: i8 = 1;
    let mut a = if a < 0 {
        // (-1/b) = (-1)^((b-1)/2)
        if n % 4 == 3 {
            sign = -sign;
        }
        a.unsigned_abs() % n
    } else {
        a as u64 % n
    };
    while a != 0 {
        let twos = a.trailing_zeros();
        a >>= twos;
        if twos % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_order(s: i64, r: u64) -> u64 {
        let base = reduce(s, r);
        let mut x = base % r;
        let mut d = 1;
        while x != 1 % r {
            x = mul_mod(x, base, r);
            d += 1;
        }
        d
    }

    fn trial_factor(mut m: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= m {
            let mut e = 0;
            while m.is_multiple_of(d) {
                m /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if m > 1 {
            out.push((m, 1));
        }
        out
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(3, 3, 13).unwrap(), 1);
        assert_eq!(mod_pow(7, 0, 10).unwrap(), 1);
        assert_eq!(mod_pow(7, 0, 1).unwrap(), 0);
        assert_eq!(mod_pow(11, 16, 51).unwrap(), 1);
        assert_eq!(mod_pow(-2, 3, 7).unwrap(), 6);
        assert_eq!(mod_pow(3, 5, 0), Err(Error::ModulusOutOfRange(0)));
        assert!(mod_pow(3, 5, 1 << 63).is_err());
    }

    #[test]
    fn mod_pow_large_modulus_does_not_wrap() {
        let m = (1u64 << 63) - 25; // largest prime below 2^63
        assert!(is_prime(m));
        // Fermat
        assert_eq!(mod_pow(3, m - 1, m).unwrap(), 1);
    }

    #[test]
    fn geometric_sum_examples() {
        assert_eq!(geometric_sum_mod(3, 3, 13).unwrap(), 0);
        assert_eq!(geometric_sum_mod(5, 0, 7).unwrap(), 0);
        assert_eq!(geometric_sum_mod(2, 4, 5).unwrap(), 0);
        assert_eq!(geometric_sum_mod(2, 4, 1).unwrap(), 0);
        assert!(geometric_sum_mod(2, 4, 0).is_err());
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(3, 4).unwrap(), 2);
        assert_eq!(multiplicative_order(3, 8).unwrap(), 2);
        assert_eq!(multiplicative_order(3, 2).unwrap(), 1);
        assert_eq!(multiplicative_order(11, 51).unwrap(), 16);
        assert_eq!(multiplicative_order(11, 101).unwrap(), 100);
        assert_eq!(multiplicative_order(11, 151).unwrap(), 75);
        assert_eq!(multiplicative_order(12345, 1).unwrap(), 1);
    }

    #[test]
    fn order_rejects_non_coprime() {
        assert_eq!(
            multiplicative_order(6, 9),
            Err(Error::NotCoprime { value: 6, modulus: 9, gcd: 3 })
        );
    }

    #[test]
    fn order_handles_large_modulus() {
        // 10^9 + 7 is prime and 5 is a primitive root
        assert_eq!(multiplicative_order(5, 1_000_000_007).unwrap(), 1_000_000_006);
        assert_eq!(multiplicative_order(4, 1_000_000_007).unwrap(), 500_000_003);
    }

    #[test]
    fn order_matches_naive_scan() {
        for r in 1..=3000u64 {
            for s in [2i64, 3, 5, 7, 10, 11] {
                if gcd(reduce(s, r), r) == 1 {
                    assert_eq!(multiplicative_order(s, r).unwrap(), naive_order(s, r), "s={s} r={r}");
                }
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(2, 120).unwrap(), 3);
        assert_eq!(valuation(5, 10).unwrap(), 1);
        assert_eq!(valuation(7, 1).unwrap(), 0);
        assert_eq!(valuation(3, 0), Err(Error::ZeroValuation));
        assert_eq!(valuation(4, 16), Err(Error::NotPrime(4)));
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_symbol(2, 5).unwrap(), -1);
        assert_eq!(jacobi_symbol(1, 9).unwrap(), 1);
        assert_eq!(jacobi_symbol(1, 1).unwrap(), 1);
        // (2/3)(2/5) = (-1)(-1)
        assert_eq!(jacobi_symbol(2, 15).unwrap(), 1);
        assert_eq!(jacobi_symbol(6, 15).unwrap(), 0);
        assert_eq!(jacobi_symbol(-1, 5).unwrap(), 1);
        assert_eq!(jacobi_symbol(-1, 7).unwrap(), -1);
        assert_eq!(jacobi_symbol(i64::MIN, 3).unwrap(), 1);
        assert_eq!(jacobi_symbol(3, 8), Err(Error::InvalidJacobiModulus(8)));
        assert_eq!(jacobi_symbol(3, -5), Err(Error::InvalidJacobiModulus(-5)));
        assert_eq!(jacobi_symbol(3, 0), Err(Error::InvalidJacobiModulus(0)));
    }

    #[test]
    fn jacobi_matches_square_table_for_primes() {
        for p in (3..500u64).filter(|&p| is_prime(p)) {
            let squares: std::collections::HashSet<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let expected = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(jacobi_symbol(a as i64, p as i64).unwrap(), expected, "a={a} p={p}");
                assert_eq!(jacobi_symbol(a as i64 - p as i64, p as i64).unwrap(), expected);
            }
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(10).unwrap().factors, vec![(2, 1), (5, 1)]);
        assert!(factorize(1).unwrap().is_one());
        assert_eq!(factorize(616).unwrap().factors, vec![(2, 3), (7, 1), (11, 1)]);
        assert_eq!(factorize(616).unwrap().factors, trial_factor(616));
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorize_semiprimes_beyond_trial_division() {
        let p = 4_294_967_291u64; // 2^32 - 5
        let q = 2_147_483_647u64; // 2^31 - 1
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors, vec![(q, 1), (p, 1)]);
        let f = factorize(1_000_003 * 1_000_003 * 1_000_033).unwrap();
        assert_eq!(f.factors, vec![(1_000_003, 2), (1_000_033, 1)]);
    }

    #[test]
    fn factorize_round_trips_up_to_1e5() {
        for m in 1..=100_000u64 {
            let f = factorize(m).unwrap();
            assert_eq!(f.product(), Some(m));
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn carmichael_and_totient() {
        let f = factorize(8).unwrap();
        assert_eq!(f.carmichael(), 2);
        assert_eq!(f.totient(), 4);
        let f = factorize(2 * 9 * 5).unwrap();
        assert_eq!(f.carmichael(), 12);
        assert_eq!(f.radical(), 30);
    }

    proptest! {
        #[test]
        fn order_is_minimal(s in 2i64..200, r in 1u64..10_000) {
            prop_assume!(gcd(reduce(s, r), r) == 1);
            let d = multiplicative_order(s, r).unwrap();
            prop_assert_eq!(mod_pow(s, d, r).unwrap(), 1 % r);
            for q in 1..d {
                if d.is_multiple_of(q) {
                    prop_assert_ne!(mod_pow(s, q, r).unwrap(), 1 % r);
                }
            }
        }

        #[test]
        fn order_of_coprime_product_is_lcm(s in 2i64..50, m in 1u64..300, n in 1u64..300) {
            prop_assume!(gcd(m, n) == 1);
            prop_assume!(gcd(reduce(s, m * n), m * n) == 1);
            let om = multiplicative_order(s, m).unwrap();
            let on = multiplicative_order(s, n).unwrap();
            prop_assert_eq!(multiplicative_order(s, m * n).unwrap(), lcm(om, on).unwrap());
        }

        #[test]
        fn geometric_sum_matches_naive(s in -50i64..50, k in 0u64..1000, m in 1u64..5000) {
            let mut naive = 0u64;
            let mut pw = 1 % m;
            for _ in 0..k {
                naive = (naive + pw) % m;
                pw = mul_mod(pw, reduce(s, m), m);
            }
            prop_assert_eq!(geometric_sum_mod(s, k, m).unwrap(), naive);
        }

        #[test]
        fn factorize_round_trips(m in 1u64..(1u64 << 62)) {
            let f = factorize(m).unwrap();
            prop_assert_eq!(f.product(), Some(m));
            prop_assert!(f.primes().all(is_prime));
        }
    }
}

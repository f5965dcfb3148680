//! Integers distinguished with respect to a pair `(s,t)`.
//!
//! `r >= 2` is distinguished when `gcd(r,s) = 1` and
//! `r | t(1 + s + ... + s^(ord_r(s)-1))`. Equivalently `ord_r(s) = ord_{gr}(s)`
//! with `g = (s-1)/gcd(s-1,t)`. Both criteria are evaluated for every query and
//! must agree.

use num_bigint::BigInt;
use num_traits::{One, Pow};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modnt::{
    factorize, gcd, geometric_sum_unchecked, is_prime, jacobi_symbol, mul_mod,
    multiplicative_order, order_with_factorization, reduce, valuation, Factorization,
    MODULUS_LIMIT,
};

/// Width of the blocks a range scan is split into.
pub const SHARD_SIZE: u64 = 1024;

/// Largest `beta_{s,t}(k)` (in decimal digits) that [`beta_exact`] will build.
pub const BETA_DIGIT_CAP: f64 = 10_000.0;

/// The pair `(s,t)` with the derived modulus `g` and its radical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairContext {
    pub s: i64,
    pub t: i64,
    /// `(s-1)/gcd(s-1,t)`
    pub g: u64,
    /// product of the distinct primes dividing `g`
    pub g_bar: u64,
    pub g_factors: Factorization,
    /// Set when `t` lies outside `1 <= t <= s-2`, where the basis results apply.
    pub outside_theorem_range: bool,
}

impl PairContext {
    pub fn new(s: i64, t: i64) -> Result<Self> {
        if s < 2 {
            return Err(Error::domain(format!("s must be at least 2, got {s}")));
        }
        let s_minus_1 = (s - 1) as u64;
        let g = s_minus_1 / gcd(s_minus_1, t.unsigned_abs());
        let g_factors = factorize(g)?;
        Ok(PairContext {
            s,
            t,
            g,
            g_bar: g_factors.radical(),
            g_factors,
            outside_theorem_range: !(1..=s - 2).contains(&t),
        })
    }
}

pub fn make_pair_context(s: i64, t: i64) -> Result<PairContext> {
    PairContext::new(s, t)
}

/// Witness record for one distinguishedness query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistinguishedVerdict {
    pub r: u64,
    pub verdict: bool,
    pub ord_r: u64,
    pub ord_gr: u64,
    /// `beta_{s,t}(ord_r(s)) mod r`
    pub beta_mod_r: u64,
}

/// Evaluates both criteria for any `r >= 1` coprime to `s`.
pub(crate) fn evaluate(ctx: &PairContext, r: u64) -> Result<DistinguishedVerdict> {
    let fr = factorize(r)?;
    let s_mod_r = reduce(ctx.s, r);
    let common = gcd(s_mod_r, r);
    if common != 1 {
        return Err(Error::NotCoprime { value: ctx.s, modulus: r, gcd: common });
    }
    let ord_r = order_with_factorization(s_mod_r, &fr);
    let gr = ctx
        .g
        .checked_mul(r)
        .filter(|&gr| gr < MODULUS_LIMIT)
        .ok_or_else(|| Error::Overflow(format!("g*r = {}*{r}", ctx.g)))?;
    let ord_gr = multiplicative_order(ctx.s, gr)?;
    let beta_mod_r = mul_mod(reduce(ctx.t, r), geometric_sum_unchecked(s_mod_r, ord_r, r), r);

    let by_divisibility = beta_mod_r == 0;
    let by_orders = ord_r == ord_gr;
    if by_divisibility != by_orders {
        return Err(Error::Inconsistent(format!(
            "r={r}, (s,t)=({},{}): divisibility says {by_divisibility}, order equality says {by_orders}",
            ctx.s, ctx.t
        )));
    }
    Ok(DistinguishedVerdict { r, verdict: by_divisibility, ord_r, ord_gr, beta_mod_r })
}

/// Decides whether `r` is distinguished with respect to `ctx`, returning both witnesses.
pub fn is_distinguished(ctx: &PairContext, r: u64) -> Result<DistinguishedVerdict> {
    if r < 2 {
        return Err(Error::domain(format!("r must be at least 2, got {r}")));
    }
    evaluate(ctx, r)
}

/// Splits `[lo, hi]` into blocks of [`SHARD_SIZE`], scans them independently and
/// concatenates the results in block order. With `jobs = Some(n)` the scan runs on a
/// dedicated pool of `n` threads; `None` uses the global pool. The output does not
/// depend on `jobs`.
pub(crate) fn run_sharded<T, F>(lo: u64, hi: u64, jobs: Option<usize>, scan: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<Vec<T>> + Sync,
{
    if lo > hi {
        return Ok(Vec::new());
    }
    let blocks: Vec<(u64, u64)> = (0..=(hi - lo) / SHARD_SIZE)
        .map(|b| {
            let start = lo + b * SHARD_SIZE;
            (start, start.saturating_add(SHARD_SIZE - 1).min(hi))
        })
        .collect();
    let work = || -> Result<Vec<T>> {
        let parts = blocks
            .par_iter()
            .map(|&(a, b)| scan(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.into_iter().flatten().collect())
    };
    match jobs {
        Some(1) => {
            let mut out = Vec::new();
            for &(a, b) in &blocks {
                out.extend(scan(a, b)?);
            }
            Ok(out)
        }
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::domain(format!("cannot start {n} worker threads: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Distinguished integers in `[lo, hi]`, ascending. Empty when `lo > hi`.
pub fn enumerate_distinguished(ctx: &PairContext, lo: u64, hi: u64) -> Result<Vec<u64>> {
    enumerate_distinguished_with_jobs(ctx, lo, hi, None)
}

pub fn enumerate_distinguished_with_jobs(
    ctx: &PairContext,
    lo: u64,
    hi: u64,
    jobs: Option<usize>,
) -> Result<Vec<u64>> {
    if lo > hi {
        return Ok(Vec::new());
    }
    if lo < 2 {
        return Err(Error::domain(format!("range must start at 2 or above, got {lo}")));
    }
    run_sharded(lo, hi, jobs, |a, b| {
        let mut found = Vec::new();
        for r in a..=b {
            if gcd(reduce(ctx.s, r), r) == 1 && evaluate(ctx, r)?.verdict {
                found.push(r);
            }
        }
        Ok(found)
    })
}

/// `beta_{s,t}(k) = t(s^k - 1)/(s - 1)` as an exact integer, for display.
pub fn beta_exact(s: i64, t: i64, k: u64) -> Result<BigInt> {
    if s < 2 {
        return Err(Error::domain(format!("s must be at least 2, got {s}")));
    }
    let digits = k as f64 * (s as f64).log10();
    if digits > BETA_DIGIT_CAP {
        return Err(Error::domain(format!(
            "beta_{{{s},{t}}}({k}) has about {digits:.0} digits; the cap is {BETA_DIGIT_CAP}"
        )));
    }
    let k = u32::try_from(k).map_err(|_| Error::Overflow(format!("exponent {k}")))?;
    let big_s = BigInt::from(s);
    let numerator: BigInt = Pow::pow(&big_s, k) - BigInt::one();
    Ok(BigInt::from(t) * (numerator / (big_s - BigInt::one())))
}

/// One row of an order-growth profile for a prime power `p^ell`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub ell: u32,
    /// `ord_{p^ell}(s)`
    pub ord: u64,
    /// `ord_{p^(ell+1)}(s) / ord_{p^ell}(s)`, always 1 or `p`
    pub lambda: u64,
    /// `nu_p(s^ord - 1) - ell`
    pub delta: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderGrowthProfile {
    pub p: u64,
    pub s: i64,
    pub rows: Vec<GrowthRow>,
    /// Least `ell` from which `lambda = p` for every larger `ell`.
    pub alpha: u32,
}

fn prime_power(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .filter(|&q| q < MODULUS_LIMIT)
        .ok_or_else(|| Error::Overflow(format!("{p}^{e} exceeds the 63-bit modulus range")))
}

/// `nu_p(s^d - 1)` for `s >= 2`, using big-integer powers modulo growing powers of `p`.
fn valuation_of_power_minus_one(s: i64, d: u64, p: u64) -> u32 {
    use num_bigint::BigUint;
    use num_traits::Zero;
    let big_p = BigUint::from(p);
    let base = BigUint::from(s as u64);
    let mut precision = 16u32;
    loop {
        let modulus = Pow::pow(&big_p, precision);
        let rem = (base.modpow(&BigUint::from(d), &modulus) + &modulus - 1u32) % &modulus;
        if !rem.is_zero() {
            let mut v = 0;
            let mut x = rem;
            while (&x % &big_p).is_zero() {
                x /= &big_p;
                v += 1;
            }
            return v;
        }
        precision *= 2;
    }
}

/// Tabulates `ord_{p^ell}(s)`, `lambda(ell,p,s)` and `delta_ell` for `ell = 1..=max_ell`
/// and locates the stabilization point `alpha_{s,p}`.
///
/// Rows past `max_ell` are computed internally when needed to see `lambda = p` at
/// some `ell >= 2`; from there on it never changes.
pub fn order_growth_profile(s: i64, p: u64, max_ell: u32) -> Result<OrderGrowthProfile> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s < 2 {
        return Err(Error::domain(format!("s must be at least 2, got {s}")));
    }
    if reduce(s, p) == 0 {
        return Err(Error::domain(format!("{p} divides s = {s}")));
    }
    if max_ell == 0 {
        return Err(Error::domain("max_ell must be positive"));
    }
    prime_power(p, max_ell + 1)?;

    let order_at = |ell: u32| -> Result<u64> { multiplicative_order(s, prime_power(p, ell)?) };
    let mut ords = vec![order_at(1)?];
    let mut lambdas = Vec::new();
    let mut witness = None;
    let mut ell = 1u32;
    while ell <= max_ell || witness.is_none() {
        let next = order_at(ell + 1)?;
        let prev = ords[ords.len() - 1];
        if next % prev != 0 || !(next / prev == 1 || next / prev == p) {
            return Err(Error::Inconsistent(format!(
                "ord ratio {next}/{prev} at ell={ell}, p={p}, s={s} is not 1 or p"
            )));
        }
        let lambda = next / prev;
        if ell >= 2 && lambda == p && witness.is_none() {
            witness = Some(ell);
        }
        if let Some(w) = witness {
            if ell > w && lambda != p {
                return Err(Error::Inconsistent(format!(
                    "lambda dropped back to 1 at ell={ell} after reaching p at ell={w} (p={p}, s={s})"
                )));
            }
        }
        lambdas.push(lambda);
        ords.push(next);
        ell += 1;
    }
    let w = witness.expect("loop exits only once witnessed");
    let alpha = if w == 2 && lambdas[0] == p { 1 } else { w };

    let rows = (1..=max_ell)
        .map(|ell| {
            let i = (ell - 1) as usize;
            let ord = ords[i];
            GrowthRow {
                ell,
                ord,
                lambda: lambdas[i],
                delta: valuation_of_power_minus_one(s, ord, p) - ell,
            }
        })
        .collect();
    Ok(OrderGrowthProfile { p, s, rows, alpha })
}

/// `nu_p(ord_{p^ell}(s))` for a prime `p` dividing `s - 1`, by closed formula.
///
/// For odd `p`: `max(0, ell - nu_p(s-1))`. For `p = 2`: 0 up to `nu_2(s-1)`, then 1 up to
/// `nu_2(s^2-1)`, then `1 + ell - nu_2(s^2-1)`.
pub fn ord_valuation_closed_form(s: i64, p: u64, ell: u32) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s < 2 || !((s - 1) as u64).is_multiple_of(p) {
        return Err(Error::domain(format!("{p} does not divide s - 1 for s = {s}")));
    }
    let v1 = valuation(p, (s - 1) as u64)?;
    if p != 2 {
        return Ok(ell.saturating_sub(v1));
    }
    // nu_2(s^2 - 1) = nu_2(s - 1) + nu_2(s + 1)
    let v2 = v1 + valuation(2, (s + 1) as u64)?;
    Ok(if ell <= v1 {
        0
    } else if ell <= v2 {
        1
    } else {
        1 + ell - v2
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartCell {
    pub exponents: Vec<u32>,
    pub r: u64,
    pub distinguished: bool,
}

/// Which multiples `p_1^{t_1}...p_n^{t_n} k` are distinguished, over the primes of `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplesChart {
    pub s: i64,
    pub t: i64,
    pub k: u64,
    pub primes: Vec<u64>,
    pub max_exponents: Vec<u32>,
    /// Cells in lexicographic order of their exponent tuples.
    pub cells: Vec<ChartCell>,
}

impl MultiplesChart {
    pub fn get(&self, exponents: &[u32]) -> Option<bool> {
        self.cells
            .iter()
            .find(|c| c.exponents == exponents)
            .map(|c| c.distinguished)
    }

    /// `y`/`n` grid. Two primes give rows by the first exponent and columns by the
    /// second; one prime gives a single column; no primes a single cell.
    pub fn render_grid(&self) -> String {
        let yn = |b: bool| if b { "y" } else { "n" };
        let mut out = String::new();
        match self.primes.len() {
            2 => {
                let cols = self.max_exponents[1];
                out.push_str("i\\j |");
                for j in 0..=cols {
                    out.push_str(&format!(" {j}"));
                }
                out.push('\n');
                for i in 0..=self.max_exponents[0] {
                    out.push_str(&format!("{i:>3} |"));
                    for j in 0..=cols {
                        out.push_str(&format!(" {}", yn(self.get(&[i, j]).unwrap_or(false))));
                    }
                    out.push('\n');
                }
            }
            _ => {
                for cell in &self.cells {
                    let label = cell
                        .exponents
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    out.push_str(&format!("({label}) {} {}\n", cell.r, yn(cell.distinguished)));
                }
            }
        }
        out
    }
}

/// Builds the multiples chart for `k`, deciding each cell twice: once by the per-prime
/// conditions (exponent bounds from `nu_p(s-1)`, the `p = 2` band up to `nu_2(s^2-1)`,
/// or `ord_{p^{t+j}}(s) | ord_k(s)`) and once directly. Disagreement is an error.
pub fn multiples_chart(ctx: &PairContext, k: u64, max_exponents: &[u32]) -> Result<MultiplesChart> {
    let primes: Vec<u64> = ctx.g_factors.primes().collect();
    if max_exponents.len() != primes.len() {
        return Err(Error::domain(format!(
            "g = {} has {} distinct primes but {} exponent bounds were given",
            ctx.g,
            primes.len(),
            max_exponents.len()
        )));
    }
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    let common = gcd(k, ctx.g) * gcd(reduce(ctx.s, k), k);
    if common != 1 {
        return Err(Error::NotCoprime { value: ctx.s, modulus: k, gcd: common });
    }

    let s = ctx.s;
    let s_minus_1 = (s - 1) as u64;
    let ord_k = multiplicative_order(s, k)?;
    let prime_ok = |p: u64, t: u32| -> Result<bool> {
        let j = ctx.g_factors.exponent_of(p);
        let v1 = valuation(p, s_minus_1)?;
        if j + t <= v1 {
            return Ok(true);
        }
        if p == 2 {
            let v2 = v1 + valuation(2, (s + 1) as u64)?;
            if v1 < t && t + j <= v2 {
                return Ok(true);
            }
        }
        Ok(ord_k % multiplicative_order(s, prime_power(p, t + j)?)? == 0)
    };

    let mut cells = Vec::new();
    let mut exps = vec![0u32; primes.len()];
    loop {
        let mut r = k;
        for (&p, &e) in primes.iter().zip(&exps) {
            r = r
                .checked_mul(prime_power(p, e)?)
                .filter(|&r| r < MODULUS_LIMIT)
                .ok_or_else(|| Error::Overflow(format!("chart entry {exps:?} for k={k}")))?;
        }
        let mut by_conditions = true;
        for (&p, &e) in primes.iter().zip(&exps) {
            by_conditions &= prime_ok(p, e)?;
        }
        let direct = evaluate(ctx, r)?.verdict;
        if direct != by_conditions {
            return Err(Error::Inconsistent(format!(
                "chart cell {exps:?} (r={r}): conditions say {by_conditions}, direct check says {direct}"
            )));
        }
        cells.push(ChartCell { exponents: exps.clone(), r, distinguished: direct });

        // odometer increment, last index fastest
        let mut i = exps.len();
        loop {
            if i == 0 {
                return Ok(MultiplesChart {
                    s,
                    t: ctx.t,
                    k,
                    primes,
                    max_exponents: max_exponents.to_vec(),
                    cells,
                });
            }
            i -= 1;
            if exps[i] < max_exponents[i] {
                exps[i] += 1;
                break;
            }
            exps[i] = 0;
        }
    }
}

/// The first `count` terms `b r + m g_bar r s` (`m = 0, 1, ...`) of a progression
/// through a distinguished `r`. Each term is re-checked; a term that is not
/// distinguished is reported as a counterexample.
pub fn progression_members(ctx: &PairContext, r: u64, b: u64, count: usize) -> Result<Vec<u64>> {
    if !is_distinguished(ctx, r)?.verdict {
        return Err(Error::NotDistinguished { s: ctx.s, t: ctx.t, r });
    }
    if b == 0 {
        return Err(Error::domain("b must be positive"));
    }
    let common = gcd(b, ctx.g_bar) * gcd(b, reduce(ctx.s, b));
    if common != 1 {
        return Err(Error::domain(format!(
            "b = {b} must be coprime to g_bar*s = {}*{} (common factor {common})",
            ctx.g_bar, ctx.s
        )));
    }
    let overflow = || Error::Overflow(format!("progression {b}*{r} + m*{}*{r}*{}", ctx.g_bar, ctx.s));
    let step = ctx
        .g_bar
        .checked_mul(r)
        .and_then(|x| x.checked_mul(ctx.s as u64))
        .ok_or_else(overflow)?;
    let first = b.checked_mul(r).ok_or_else(overflow)?;
    let mut out = Vec::with_capacity(count);
    for m in 0..count as u64 {
        let term = step
            .checked_mul(m)
            .and_then(|x| x.checked_add(first))
            .filter(|&x| x < MODULUS_LIMIT)
            .ok_or_else(overflow)?;
        if !is_distinguished(ctx, term)?.verdict {
            return Err(Error::Counterexample(format!(
                "{term} = {b}*{r} + {m}*{step} is not distinguished with respect to ({},{})",
                ctx.s, ctx.t
            )));
        }
        out.push(term);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub r: u64,
    pub reason: String,
}

/// Outcome of the residue-class scan for `10` and `14` modulo 24 under `(3,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mod24Report {
    pub limit: u64,
    pub members_10: u64,
    pub members_14: u64,
    pub counterexamples: Vec<Counterexample>,
}

/// Checks every `r <= limit` with `r = 10` or `14 (mod 24)` is `(3,1)`-distinguished.
///
/// For `r = 10 + 24k` it also checks `(2+4k / 5+12k) = -1`, which forces `ord_{5+12k}(3)`
/// to be even since `3(2+4k) = 1 (mod 5+12k)`. For `r = 14 + 24k` the analogous
/// symbol is `(5+8k / 7+12k)`, from `3(5+8k) = 1 (mod 7+12k)`.
pub fn check_10_14_mod_24(limit: u64) -> Result<Mod24Report> {
    check_10_14_mod_24_with_jobs(limit, None)
}

pub fn check_10_14_mod_24_with_jobs(limit: u64, jobs: Option<usize>) -> Result<Mod24Report> {
    if limit < 10 {
        return Err(Error::domain(format!("limit must be at least 10, got {limit}")));
    }
    let ctx = PairContext::new(3, 1)?;
    let kmax = (limit - 10) / 24;
    let rows = run_sharded(0, kmax, jobs, |a, b| {
        let mut rows = Vec::new();
        for k in a..=b {
            for (offset, inverse_of_3, half) in [(10u64, 2 + 4 * k, 5 + 12 * k), (14, 5 + 8 * k, 7 + 12 * k)] {
                let r = offset + 24 * k;
                if r > limit {
                    continue;
                }
                let mut bad = Vec::new();
                if !evaluate(&ctx, r)?.verdict {
                    bad.push(Counterexample { r, reason: "not (3,1)-distinguished".into() });
                }
                let j = jacobi_symbol(inverse_of_3 as i64, half as i64)?;
                if j != -1 {
                    bad.push(Counterexample {
                        r,
                        reason: format!("jacobi({inverse_of_3}/{half}) = {j}, expected -1"),
                    });
                }
                rows.push((offset, bad));
            }
        }
        Ok(rows)
    })?;
    let mut report = Mod24Report { limit, members_10: 0, members_14: 0, counterexamples: Vec::new() };
    for (offset, bad) in rows {
        if offset == 10 {
            report.members_10 += 1;
        } else {
            report.members_14 += 1;
        }
        report.counterexamples.extend(bad);
    }
    Ok(report)
}

/// Containments between sets of distinguished integers for the same `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescentReport {
    pub s: i64,
    pub t: i64,
    pub t_prime: i64,
    pub limit: u64,
    /// `gcd(t, s-1)`
    pub reduced_t: i64,
    /// whether `gcd(s-1,t)` divides `gcd(s-1,t')`, so that `(s,t)` transfers to `(s,t')`
    pub transfer_applies: bool,
    /// number of `(s,t)`-distinguished integers in `[2, limit]`
    pub members: u64,
    pub violations: Vec<Counterexample>,
}

/// Verifies over `2 <= r <= limit` that every `(s,t)`-distinguished `r` is also
/// `(s, gcd(t,s-1))`-distinguished, and `(s,t')`-distinguished whenever
/// `gcd(s-1,t) | gcd(s-1,t')`.
pub fn descent_check(s: i64, t: i64, t_prime: i64, limit: u64) -> Result<DescentReport> {
    descent_check_with_jobs(s, t, t_prime, limit, None)
}

pub fn descent_check_with_jobs(
    s: i64,
    t: i64,
    t_prime: i64,
    limit: u64,
    jobs: Option<usize>,
) -> Result<DescentReport> {
    let ctx = PairContext::new(s, t)?;
    let s_minus_1 = (s - 1) as u64;
    let reduced_t = gcd(t.unsigned_abs(), s_minus_1) as i64;
    let reduced_ctx = PairContext::new(s, reduced_t)?;
    let target_ctx = PairContext::new(s, t_prime)?;
    let transfer_applies = gcd(t_prime.unsigned_abs(), s_minus_1).is_multiple_of(gcd(t.unsigned_abs(), s_minus_1));

    let hits = run_sharded(2, limit.max(1), jobs, |a, b| {
        let mut hits = Vec::new();
        for r in a..=b {
            if gcd(reduce(s, r), r) != 1 || !evaluate(&ctx, r)?.verdict {
                continue;
            }
            let mut bad = Vec::new();
            if !evaluate(&reduced_ctx, r)?.verdict {
                bad.push(Counterexample { r, reason: format!("not ({s},{reduced_t})-distinguished") });
            }
            if transfer_applies && !evaluate(&target_ctx, r)?.verdict {
                bad.push(Counterexample { r, reason: format!("not ({s},{t_prime})-distinguished") });
            }
            hits.push(bad);
        }
        Ok(hits)
    })?;
    Ok(DescentReport {
        s,
        t,
        t_prime,
        limit,
        reduced_t,
        transfer_applies,
        members: hits.len() as u64,
        violations: hits.into_iter().flatten().collect(),
    })
}

/// Exploratory: the step sizes `mu <= max_mu` for which `alpha + mu m` is distinguished
/// for `m = 1..=terms`, and the subset not divisible by a smaller such step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusScan {
    pub alpha: u64,
    pub terms: u64,
    pub valid: Vec<u64>,
    pub minimal: Vec<u64>,
}

pub fn progression_modulus_scan(ctx: &PairContext, alpha: u64, max_mu: u64, terms: u64) -> Result<ModulusScan> {
    if alpha < 2 {
        return Err(Error::domain(format!("alpha must be at least 2, got {alpha}")));
    }
    let mut valid = Vec::new();
    for mu in 1..=max_mu {
        let mut ok = true;
        for m in 1..=terms {
            let r = mu
                .checked_mul(m)
                .and_then(|x| x.checked_add(alpha))
                .filter(|&x| x < MODULUS_LIMIT)
                .ok_or_else(|| Error::Overflow(format!("{alpha} + {mu}*{m}")))?;
            if gcd(reduce(ctx.s, r), r) != 1 || !evaluate(ctx, r)?.verdict {
                ok = false;
                break;
            }
        }
        if ok {
            valid.push(mu);
        }
    }
    let minimal = valid
        .iter()
        .copied()
        .filter(|&mu| !valid.iter().any(|&v| v < mu && mu % v == 0))
        .collect();
    Ok(ModulusScan { alpha, terms, valid, minimal })
}

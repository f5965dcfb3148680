//! Cyclotomic cosets `C_{s,r,n}` and affine orbits `F_{s,t,r,n}`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modnt::{add_mod, gcd, mul_mod, reduce};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKind {
    /// `n -> s n mod r`
    Multiplicative,
    /// `n -> s n + t mod r`
    Affine,
}

/// A partition of `{0, ..., r-1}` into orbits, keyed by least element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitSet {
    pub r: u64,
    pub kind: OrbitKind,
    pub s: i64,
    /// `None` for multiplicative cosets.
    pub t: Option<i64>,
    pub orbits: BTreeMap<u64, Vec<u64>>,
}

impl OrbitSet {
    /// Representatives in ascending order.
    pub fn representatives(&self) -> Vec<u64> {
        self.orbits.keys().copied().collect()
    }

    /// The orbit containing `n mod r`.
    pub fn orbit_of(&self, n: u64) -> &[u64] {
        let n = n % self.r;
        self.orbits
            .values()
            .find(|orbit| orbit.binary_search(&n).is_ok())
            .expect("orbits partition the residues")
    }

    pub fn representative_of(&self, n: u64) -> u64 {
        self.orbit_of(n)[0]
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &[u64])> {
        self.orbits.iter().map(|(&rep, orbit)| (rep, orbit.as_slice()))
    }
}

/// Largest modulus for which a full partition is materialized.
pub const MAX_PARTITION_MODULUS: u64 = 1 << 24;

fn check_coprime(s: i64, r: u64) -> Result<u64> {
    if r == 0 {
        return Err(Error::domain("r must be positive"));
    }
    let s_mod = reduce(s, r);
    let g = gcd(s_mod, r);
    if g != 1 {
        return Err(Error::NotCoprime { value: s, modulus: r, gcd: g });
    }
    Ok(s_mod)
}

/// Follows the bijection `step` from `n` until it returns, giving the sorted cycle.
fn cycle(n: u64, step: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut orbit = vec![n];
    let mut x = step(n);
    while x != n {
        orbit.push(x);
        x = step(x);
    }
    orbit.sort_unstable();
    orbit
}

/// `C_{s,r,n} = { s^i n mod r }`, sorted.
pub fn cyclotomic_coset(s: i64, r: u64, n: u64) -> Result<Vec<u64>> {
    let s_mod = check_coprime(s, r)?;
    Ok(cycle(n % r, |x| mul_mod(x, s_mod, r)))
}

/// `F_{s,t,r,n} = { rho^i(n) mod r }` for `rho(n) = s n + t`, sorted.
pub fn affine_orbit(s: i64, t: i64, r: u64, n: u64) -> Result<Vec<u64>> {
    let s_mod = check_coprime(s, r)?;
    let t_mod = reduce(t, r);
    Ok(cycle(n % r, |x| add_mod(mul_mod(x, s_mod, r), t_mod, r)))
}

/// The full partition for `kind`, with least-element representatives. `t` is ignored
/// for multiplicative cosets.
pub fn representatives(kind: OrbitKind, s: i64, t: i64, r: u64) -> Result<OrbitSet> {
    let s_mod = check_coprime(s, r)?;
    if r > MAX_PARTITION_MODULUS {
        return Err(Error::domain(format!("r = {r} is too large to partition (limit {MAX_PARTITION_MODULUS})")));
    }
    let t_mod = reduce(t, r);
    let step = |x: u64| match kind {
        OrbitKind::Multiplicative => mul_mod(x, s_mod, r),
        OrbitKind::Affine => add_mod(mul_mod(x, s_mod, r), t_mod, r),
    };
    let mut seen = vec![false; r as usize];
    let mut orbits = BTreeMap::new();
    for n in 0..r {
        if seen[n as usize] {
            continue;
        }
        let orbit = cycle(n, step);
        for &x in &orbit {
            seen[x as usize] = true;
        }
        // n is the least unseen residue, so it is the orbit minimum
        orbits.insert(n, orbit);
    }
    Ok(OrbitSet {
        r,
        kind,
        s,
        t: (kind == OrbitKind::Affine).then_some(t),
        orbits,
    })
}

//! Exact arithmetic in the cyclotomic field `Q(w_r)`.
//!
//! An element is a polynomial in `w = w_r` of degree below `phi(r)` with rational
//! coefficients, reduced modulo the `r`-th cyclotomic polynomial. The reduced form is
//! canonical, so field equality is coefficient equality.
//!
//! Sums of roots of unity additionally carry an [`ExponentMultiset`], which records
//! which powers of `w` were added. Two different multisets can give the same field
//! element (e.g. `{0,1,...,r-1}` and the empty multiset), so the multiset is the finer
//! of the two views.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modnt::factorize;

/// Largest conductor accepted by [`cyclotomic_polynomial`] and [`CycloElement`].
pub const MAX_CONDUCTOR: u64 = 1000;

/// Dense integer polynomial, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntPolynomial(pub Vec<i64>);

impl IntPolynomial {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "x")?,
                (1, _) => write!(f, "{a}x")?,
                (_, 1) => write!(f, "x^{i}")?,
                _ => write!(f, "{a}x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Cached data for one conductor.
#[derive(Debug)]
struct Field {
    r: u64,
    /// `Phi_r`, monic, lowest degree first
    phi: Vec<i64>,
    degree: usize,
    /// `x^a mod Phi_r` for `0 <= a < r`, each of length `degree`
    powers: Vec<Vec<i64>>,
}

fn field_cache() -> &'static Mutex<HashMap<u64, Arc<Field>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Field>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn check_conductor(r: u64) -> Result<()> {
    if r == 0 || r > MAX_CONDUCTOR {
        return Err(Error::domain(format!("conductor {r} outside 1..={MAX_CONDUCTOR}")));
    }
    Ok(())
}

fn overflow() -> Error {
    Error::Overflow("cyclotomic polynomial coefficient".into())
}

/// Exact quotient of `num` by the monic `den`.
fn divide_exact(num: &[i128], den: &[i128]) -> Result<Vec<i128>> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i128; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] = rem[i + j]
                .checked_sub(c.checked_mul(d).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
    }
    if rem.iter().any(|&x| x != 0) {
        return Err(Error::Inconsistent("cyclotomic division left a remainder".into()));
    }
    Ok(quot)
}

fn divisors(r: u64) -> Vec<u64> {
    (1..=r).filter(|d| r.is_multiple_of(*d)).collect()
}

fn compute_phi(r: u64, known: &mut HashMap<u64, Vec<i128>>) -> Result<Vec<i128>> {
    if let Some(p) = known.get(&r) {
        return Ok(p.clone());
    }
    let mut poly = vec![0i128; r as usize + 1];
    poly[0] = -1;
    poly[r as usize] = 1;
    for d in divisors(r).into_iter().filter(|&d| d < r) {
        let phi_d = compute_phi(d, known)?;
        poly = divide_exact(&poly, &phi_d)?;
    }
    known.insert(r, poly.clone());
    Ok(poly)
}

/// `Phi_r`, obtained by dividing `x^r - 1` by `Phi_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(r: u64) -> Result<IntPolynomial> {
    check_conductor(r)?;
    let poly = compute_phi(r, &mut HashMap::new())?;
    poly.into_iter()
        .map(|c| i64::try_from(c).map_err(|_| overflow()))
        .collect::<Result<Vec<_>>>()
        .map(IntPolynomial)
}

fn field(r: u64) -> Result<Arc<Field>> {
    check_conductor(r)?;
    if let Some(f) = field_cache().lock().expect("field cache poisoned").get(&r) {
        return Ok(Arc::clone(f));
    }
    let phi = cyclotomic_polynomial(r)?.0;
    let degree = phi.len() - 1;
    let mut powers = Vec::with_capacity(r as usize);
    let mut cur = vec![0i64; degree];
    cur[0] = 1;
    for _ in 0..r {
        powers.push(cur.clone());
        // multiply by x, then replace x^degree by -(phi_0 + ... + phi_{d-1} x^{d-1})
        let top = cur[degree - 1];
        for i in (1..degree).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        for i in 0..degree {
            cur[i] = cur[i]
                .checked_sub(top.checked_mul(phi[i]).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
    }
    let f = Arc::new(Field { r, phi, degree, powers });
    field_cache()
        .lock()
        .expect("field cache poisoned")
        .insert(r, Arc::clone(&f));
    Ok(f)
}

/// An element of `Q(w_r)` in canonical reduced form.
#[derive(Clone)]
pub struct CycloElement {
    field: Arc<Field>,
    coeffs: Vec<BigRational>,
}

impl PartialEq for CycloElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.r == other.field.r && self.coeffs == other.coeffs
    }
}

impl Eq for CycloElement {}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloElement(r={}, {})", self.field.r, self)
    }
}

impl CycloElement {
    pub fn zero(r: u64) -> Result<Self> {
        let field = field(r)?;
        let coeffs = vec![BigRational::zero(); field.degree];
        Ok(CycloElement { field, coeffs })
    }

    pub fn one(r: u64) -> Result<Self> {
        Self::from_integer(r, 1)
    }

    pub fn from_integer(r: u64, n: i64) -> Result<Self> {
        Self::from_rational(r, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: u64, q: BigRational) -> Result<Self> {
        let mut e = Self::zero(r)?;
        e.coeffs[0] = q;
        Ok(e)
    }

    /// `w_r^a`.
    pub fn root_of_unity(r: u64, a: u64) -> Result<Self> {
        let field = field(r)?;
        let coeffs = field.powers[(a % r) as usize]
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        Ok(CycloElement { field, coeffs })
    }

    /// Reduces an arbitrary polynomial in `w_r` (lowest degree first).
    pub fn from_polynomial(r: u64, poly: &[BigRational]) -> Result<Self> {
        let field = field(r)?;
        let mut coeffs = vec![BigRational::zero(); field.degree];
        for (k, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k < field.degree {
                coeffs[k] += c;
            } else {
                for (slot, &p) in coeffs.iter_mut().zip(&field.powers[k % r as usize]) {
                    if p != 0 {
                        *slot += c * BigInt::from(p);
                    }
                }
            }
        }
        Ok(CycloElement { field, coeffs })
    }

    pub fn conductor(&self) -> u64 {
        self.field.r
    }

    /// Coefficients in the power basis `1, w, ..., w^(phi(r)-1)`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field.r != other.field.r {
            return Err(Error::ConductorMismatch(self.field.r, other.field.r));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CycloElement { field: Arc::clone(&self.field), coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(CycloElement { field: Arc::clone(&self.field), coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let d = self.field.degree;
        let mut product = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    product[i + j] += a * b;
                }
            }
        }
        Self::from_polynomial(self.field.r, &product)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        self.checked_mul(&other.inverse()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * q).collect();
        CycloElement { field: Arc::clone(&self.field), coeffs }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Phi_r`.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let phi: Vec<BigRational> = self
            .field
            .phi
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        let (gcd, u) = ratpoly::inverse_mod(&self.coeffs, &phi);
        // Phi_r is irreducible and deg self < deg Phi_r, so the gcd is a nonzero constant
        if gcd.len() != 1 {
            return Err(Error::Inconsistent(format!(
                "gcd with Phi_{} has degree {}",
                self.field.r,
                gcd.len() - 1
            )));
        }
        let scaled: Vec<BigRational> = u.iter().map(|c| c / &gcd[0]).collect();
        Self::from_polynomial(self.field.r, &scaled)
    }

    /// Floating-point value, for debugging output only.
    pub fn to_complex(&self) -> (f64, f64) {
        let theta = 2.0 * std::f64::consts::PI / self.field.r as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (k, c)| {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let a = theta * k as f64;
            (re + c * a.cos(), im + c * a.sin())
        })
    }

    /// JSON form, optionally with the exponent multiset it was built from.
    pub fn to_json(&self, exponents: Option<&ExponentMultiset>) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        if let (Some(ms), Some(obj)) = (exponents, v.as_object_mut()) {
            obj.insert("exponents".into(), serde_json::to_value(&ms.counts).expect("serializable"));
        }
        v
    }
}

impl fmt::Display for CycloElement {
    /// Power-basis form, e.g. `1 - w^2 + (1/2)w^3`, where `w = exp(2 pi i / r)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let abs = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{k}"),
            };
            if k == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else if abs.is_integer() {
                write!(f, "{abs}{mono}")?;
            } else {
                write!(f, "({abs}){mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CycloElement {
    type Output = CycloElement;
    /// Panics on conductor mismatch; use [`CycloElement::checked_add`] otherwise.
    fn add(self, rhs: Self) -> CycloElement {
        self.checked_add(rhs).expect("conductor mismatch")
    }
}

impl Sub for &CycloElement {
    type Output = CycloElement;
    fn sub(self, rhs: Self) -> CycloElement {
        self.checked_sub(rhs).expect("conductor mismatch")
    }
}

impl Mul for &CycloElement {
    type Output = CycloElement;
    fn mul(self, rhs: Self) -> CycloElement {
        self.checked_mul(rhs).expect("conductor mismatch")
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        let coeffs = self.coeffs.iter().map(|a| -a).collect();
        CycloElement { field: Arc::clone(&self.field), coeffs }
    }
}

/// JSON integer that falls back to a decimal string when it does not fit `i64`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for JsonInt {
    fn from(n: &BigInt) -> Self {
        n.to_i64().map_or_else(|| JsonInt::Big(n.to_string()), JsonInt::Small)
    }
}

impl JsonInt {
    fn to_bigint(&self) -> std::result::Result<BigInt, String> {
        match self {
            JsonInt::Small(n) => Ok(BigInt::from(*n)),
            JsonInt::Big(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    r: u64,
    coeffs: Vec<(JsonInt, JsonInt)>,
}

impl Serialize for CycloElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ElementRepr {
            r: self.field.r,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| (c.numer().into(), c.denom().into()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycloElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ElementRepr::deserialize(deserializer)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|(n, d)| {
                let d = d.to_bigint().map_err(D::Error::custom)?;
                if d.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(n.to_bigint().map_err(D::Error::custom)?, d))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CycloElement::from_polynomial(repr.r, &coeffs).map_err(D::Error::custom)
    }
}

/// A multiset of exponents `a mod r`, standing for `sum of w_r^a` with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentMultiset {
    pub r: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl ExponentMultiset {
    pub fn new(r: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::domain("multiset modulus must be positive"));
        }
        Ok(ExponentMultiset { r, counts: BTreeMap::new() })
    }

    pub fn from_exponents(r: u64, exponents: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut ms = Self::new(r)?;
        for a in exponents {
            ms.insert(a, 1);
        }
        Ok(ms)
    }

    pub fn insert(&mut self, a: u64, multiplicity: u64) {
        if multiplicity > 0 {
            *self.counts.entry(a % self.r).or_insert(0) += multiplicity;
        }
    }

    /// Total number of summands, with multiplicity.
    pub fn len(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn distinct(&self) -> Vec<u64> {
        self.counts.keys().copied().collect()
    }

    /// Every exponent multiplied by `n`, reduced mod `r`.
    pub fn scaled(&self, n: u64) -> Self {
        let mut out = ExponentMultiset { r: self.r, counts: BTreeMap::new() };
        for (&a, &m) in &self.counts {
            out.insert(((a as u128 * n as u128) % self.r as u128) as u64, m);
        }
        out
    }

    /// Every exponent shifted by `c`; corresponds to multiplying by `w_r^c`.
    pub fn shifted(&self, c: u64) -> Self {
        let mut out = ExponentMultiset { r: self.r, counts: BTreeMap::new() };
        for (&a, &m) in &self.counts {
            out.insert(((a as u128 + c as u128) % self.r as u128) as u64, m);
        }
        out
    }

    /// Multiset sum.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.r != other.r {
            return Err(Error::ConductorMismatch(self.r, other.r));
        }
        let mut out = self.clone();
        for (&a, &m) in &other.counts {
            out.insert(a, m);
        }
        Ok(out)
    }

    pub fn to_element(&self) -> Result<CycloElement> {
        from_exponents(self)
    }

    /// Brace notation of the underlying set, e.g. `{0,1,4}`.
    pub fn set_notation(&self) -> String {
        let items: Vec<String> = self.counts.keys().map(u64::to_string).collect();
        format!("{{{}}}", items.join(","))
    }

    /// Sum of roots of unity, e.g. `1 + w^1 + w^4` or `3w^6`.
    pub fn render_roots(&self) -> String {
        if self.counts.is_empty() {
            return "0".into();
        }
        self.counts
            .iter()
            .map(|(&a, &m)| {
                let mult = if m == 1 { String::new() } else { m.to_string() };
                match (a, m) {
                    (0, _) => m.to_string(),
                    _ => format!("{mult}w^{a}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for ExponentMultiset {
    /// Full multiset in brace notation, repeated elements listed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .counts
            .iter()
            .flat_map(|(&a, &m)| std::iter::repeat_n(a.to_string(), m as usize))
            .collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// `sum multiplicity * w_r^a` over the multiset, canonically reduced.
pub fn from_exponents(ms: &ExponentMultiset) -> Result<CycloElement> {
    let mut e = CycloElement::zero(ms.r)?;
    let field = Arc::clone(&e.field);
    let mut acc = vec![0i128; field.degree];
    for (&a, &m) in &ms.counts {
        for (slot, &p) in acc.iter_mut().zip(&field.powers[a as usize]) {
            *slot += p as i128 * m as i128;
        }
    }
    for (c, v) in e.coeffs.iter_mut().zip(acc) {
        *c = BigRational::from_integer(BigInt::from(v));
    }
    Ok(e)
}

/// Euler's totient, the degree of `Phi_r`.
pub fn totient(r: u64) -> Result<u64> {
    Ok(factorize(r)?.totient())
}

/// Dense polynomials over `Q`, only what inversion needs.
mod ratpoly {
    use num_rational::BigRational;
    use num_traits::Zero;

    fn trim(p: &mut Vec<BigRational>) {
        while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        if p.is_empty() {
            p.push(BigRational::zero());
        }
    }

    fn is_zero(p: &[BigRational]) -> bool {
        p.iter().all(Zero::is_zero)
    }

    fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = a.len().max(b.len());
        let zero = BigRational::zero();
        let mut out: Vec<BigRational> = (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect();
        trim(&mut out);
        out
    }

    fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(&mut out);
        out
    }

    fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut rem = a.to_vec();
        trim(&mut rem);
        let db = b.len() - 1;
        let lead = &b[db];
        if rem.len() <= db {
            return (vec![BigRational::zero()], rem);
        }
        let mut quot = vec![BigRational::zero(); rem.len() - db];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + db] / lead;
            if !c.is_zero() {
                for (j, y) in b.iter().enumerate() {
                    rem[i + j] -= &c * y;
                }
            }
            quot[i] = c;
        }
        rem.truncate(db.max(1));
        trim(&mut rem);
        trim(&mut quot);
        (quot, rem)
    }

    /// Returns `(g, u)` with `a u = g (mod m)` and `g = gcd(a, m)` up to a unit.
    pub(super) fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut old_r = a.to_vec();
        trim(&mut old_r);
        let mut r = m.to_vec();
        let mut old_s = vec![BigRational::from_integer(1.into())];
        let mut s = vec![BigRational::zero()];
        while !is_zero(&r) {
            let (q, rem) = divrem(&old_r, &r);
            old_r = std::mem::replace(&mut r, rem);
            let next_s = sub(&old_s, &mul(&q, &s));
            old_s = std::mem::replace(&mut s, next_s);
        }
        (old_r, old_s)
    }
}

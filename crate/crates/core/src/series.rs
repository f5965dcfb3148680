//! Periodic rational functions `p(x)/(1-x^r)` and the operator `phi_{s,t}`.
//!
//! A rational function fixed by `phi_{s,t}` has simple poles at roots of unity and a
//! numerator of lower degree than its denominator, so it can always be written with
//! denominator `1 - x^r`. Its Taylor coefficients are then `r`-periodic, and `phi_{s,t}`
//! acts on one period as the permutation `n -> s n + t mod r`. Everything here works on
//! one period of coefficients in `Q(w_r)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclo::{CycloElement, ExponentMultiset};
use crate::distinguished::{enumerate_distinguished_with_jobs, is_distinguished, PairContext};
use crate::error::{Error, Result};
use crate::modnt::{gcd, geometric_sum_mod, mod_pow, multiplicative_order, reduce};
use crate::orbits::{affine_orbit, cyclotomic_coset, representatives, OrbitKind, OrbitSet};

/// Largest period accepted by the multiset-only routines.
pub const MAX_MULTISET_PERIOD: u64 = 1 << 16;

/// The partial-fraction cross-check in [`make_psi`] runs when `r * ord_r(s)` is at most
/// this bound.
pub const PSI_CROSSCHECK_LIMIT: u64 = 2048;

/// `p(x)/(1-x^r)` with `deg p < r`, stored as one period `a_0, ..., a_{r-1}` of Taylor
/// coefficients in `Q(w_r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicRationalFn {
    pub r: u64,
    coeffs: Vec<CycloElement>,
    /// Exponent multisets the coefficients were built from, when known.
    provenance: Option<Vec<ExponentMultiset>>,
}

impl PeriodicRationalFn {
    pub fn new(r: u64, coeffs: Vec<CycloElement>) -> Result<Self> {
        if r == 0 || coeffs.len() as u64 != r {
            return Err(Error::domain(format!("expected {r} coefficients, got {}", coeffs.len())));
        }
        if let Some(c) = coeffs.iter().find(|c| c.conductor() != r) {
            return Err(Error::ConductorMismatch(r, c.conductor()));
        }
        Ok(PeriodicRationalFn { r, coeffs, provenance: None })
    }

    /// Coefficient `a_m = sum of w_r^e` over the multiset at `m`.
    pub fn from_multisets(r: u64, multisets: Vec<ExponentMultiset>) -> Result<Self> {
        if let Some(ms) = multisets.iter().find(|ms| ms.r != r) {
            return Err(Error::ConductorMismatch(r, ms.r));
        }
        let coeffs = multisets.iter().map(ExponentMultiset::to_element).collect::<Result<Vec<_>>>()?;
        let mut f = Self::new(r, coeffs)?;
        f.provenance = Some(multisets);
        Ok(f)
    }

    pub fn from_integers(r: u64, values: &[i64]) -> Result<Self> {
        let coeffs = values
            .iter()
            .map(|&v| CycloElement::from_integer(r, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(r, coeffs)
    }

    /// `1/(1-x)` written with period `r`.
    pub fn ones(r: u64) -> Result<Self> {
        Self::from_multisets(r, vec![unit_multiset(r)?; r as usize])
    }

    /// `x^k/(1-x^r)` for `k < r`.
    pub fn monomial(r: u64, k: u64) -> Result<Self> {
        if k >= r {
            return Err(Error::domain(format!("monomial degree {k} must be below the period {r}")));
        }
        let multisets = (0..r)
            .map(|m| if m == k { unit_multiset(r) } else { ExponentMultiset::new(r) })
            .collect::<Result<Vec<_>>>()?;
        Self::from_multisets(r, multisets)
    }

    /// `a_n` for any `n >= 0`.
    pub fn coefficient(&self, n: u64) -> &CycloElement {
        &self.coeffs[(n % self.r) as usize]
    }

    pub fn coeffs(&self) -> &[CycloElement] {
        &self.coeffs
    }

    pub fn provenance(&self) -> Option<&[ExponentMultiset]> {
        self.provenance.as_deref()
    }

    /// Taylor coefficients `a_0, ..., a_{len-1}`.
    pub fn taylor(&self, len: usize) -> Vec<CycloElement> {
        (0..len as u64).map(|n| self.coefficient(n).clone()).collect()
    }

    /// Numerator `p(x) = (1-x^r) f(x)`, lowest degree first.
    pub fn numerator(&self) -> &[CycloElement] {
        // with period r the numerator coefficients are exactly one period
        &self.coeffs
    }
}

fn unit_multiset(r: u64) -> Result<ExponentMultiset> {
    ExponentMultiset::from_exponents(r, [0])
}

fn rho(s_mod: u64, t_mod: u64, r: u64, n: u64) -> u64 {
    ((s_mod as u128 * n as u128 + t_mod as u128) % r as u128) as u64
}

/// `b_n = a_{(s n + t) mod r}`.
pub fn apply_phi(ctx: &PairContext, f: &PeriodicRationalFn) -> PeriodicRationalFn {
    let r = f.r;
    let (s_mod, t_mod) = (reduce(ctx.s, r), reduce(ctx.t, r));
    let image = |n: u64| rho(s_mod, t_mod, r, n) as usize;
    PeriodicRationalFn {
        r,
        coeffs: (0..r).map(|n| f.coeffs[image(n)].clone()).collect(),
        provenance: f
            .provenance
            .as_ref()
            .map(|p| (0..r).map(|n| p[image(n)].clone()).collect()),
    }
}

/// `F_{s,t,r,n} = (sum_{j in F} x^j) / (1-x^r)`, the indicator of the affine orbit of `n`.
pub fn make_f(s: i64, t: i64, r: u64, n: u64) -> Result<PeriodicRationalFn> {
    let orbit = affine_orbit(s, t, r, n)?;
    let multisets = (0..r)
        .map(|m| {
            if orbit.binary_search(&m).is_ok() {
                unit_multiset(r)
            } else {
                ExponentMultiset::new(r)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PeriodicRationalFn::from_multisets(r, multisets)
}

/// Exponent multisets `{ n rho^(j)(m) mod r : 1 <= j <= ord_r(s) }` for every `m < r`.
///
/// `rho^(j)(m)` is computed by iterating `rho`; the closed form `s^j m + beta(j)` is
/// checked against it at `m = 0` and `m = 1`, which pins down the affine map. For
/// `n = 0 mod r` the result is the all-ones series `1/(1-x)`.
pub fn psi_multisets(s: i64, t: i64, r: u64, n: u64) -> Result<Vec<ExponentMultiset>> {
    if r > MAX_MULTISET_PERIOD {
        return Err(Error::domain(format!("period {r} exceeds {MAX_MULTISET_PERIOD}")));
    }
    let ord = multiplicative_order(s, r)?;
    let n = n % r;
    if n == 0 {
        return Ok(vec![unit_multiset(r)?; r as usize]);
    }
    let (s_mod, t_mod) = (reduce(s, r), reduce(t, r));

    let (mut at0, mut at1) = (0u64, 1 % r);
    for j in 1..=ord {
        at0 = rho(s_mod, t_mod, r, at0);
        at1 = rho(s_mod, t_mod, r, at1);
        let beta = ((reduce(t, r) as u128 * geometric_sum_mod(s, j, r)? as u128) % r as u128) as u64;
        let slope = mod_pow(s, j, r)?;
        if at0 != beta || (at1 + r - at0) % r != slope {
            return Err(Error::Inconsistent(format!(
                "rho^({j}) disagrees with s^j m + beta(j) mod {r}"
            )));
        }
    }

    let mut out = Vec::with_capacity(r as usize);
    for m in 0..r {
        let mut ms = ExponentMultiset::new(r)?;
        let mut x = m;
        for _ in 0..ord {
            x = rho(s_mod, t_mod, r, x);
            ms.insert(((n as u128 * x as u128) % r as u128) as u64, 1);
        }
        out.push(ms);
    }
    Ok(out)
}

/// `psi_{s,t,r,n}` from its partial fractions
/// `sum_j w^(n beta(j)) / (1 - w^(n s^j) x)`, each expanded to `r` Taylor terms by
/// repeated multiplication in `Q(w_r)`.
pub fn psi_partial_fractions(s: i64, t: i64, r: u64, n: u64) -> Result<PeriodicRationalFn> {
    let ord = multiplicative_order(s, r)?;
    let n = n % r;
    if n == 0 {
        return PeriodicRationalFn::ones(r);
    }
    let (s_mod, t_mod) = (reduce(s, r), reduce(t, r));
    let mut sum = vec![CycloElement::zero(r)?; r as usize];
    let (mut beta, mut s_pow) = (0u64, 1u64);
    for _ in 1..=ord {
        beta = rho(s_mod, t_mod, r, beta);
        s_pow = ((s_pow as u128 * s_mod as u128) % r as u128) as u64;
        let pole = CycloElement::root_of_unity(r, ((n as u128 * s_pow as u128) % r as u128) as u64)?;
        let mut term = CycloElement::root_of_unity(r, ((n as u128 * beta as u128) % r as u128) as u64)?;
        for slot in sum.iter_mut() {
            *slot = slot.checked_add(&term)?;
            term = term.checked_mul(&pole)?;
        }
    }
    PeriodicRationalFn::new(r, sum)
}

/// `psi_{s,t,r,n}` with coefficients `a_m = sum_{j=1}^{ord_r(s)} w_r^(n rho^(j)(m))`.
///
/// Logs a warning when `r` is not distinguished, since the result is then not fixed
/// by `phi_{s,t}`. Small instances are cross-checked against
/// [`psi_partial_fractions`].
pub fn make_psi(s: i64, t: i64, r: u64, n: u64) -> Result<PeriodicRationalFn> {
    let multisets = psi_multisets(s, t, r, n)?;
    if r >= 2 && !n.is_multiple_of(r) {
        let ctx = PairContext::new(s, t)?;
        if !is_distinguished(&ctx, r)?.verdict {
            log::warn!("{r} is not distinguished for ({s},{t}); psi_{{{s},{t},{r},{n}}} is not a fixed point");
        }
    }
    let f = PeriodicRationalFn::from_multisets(r, multisets)?;
    let ord = multiplicative_order(s, r)?;
    if r.saturating_mul(ord) <= PSI_CROSSCHECK_LIMIT {
        let g = psi_partial_fractions(s, t, r, n)?;
        if g.coeffs != f.coeffs {
            return Err(Error::Inconsistent(format!(
                "psi_{{{s},{t},{r},{n}}}: coefficient formula and partial fractions differ"
            )));
        }
    } else {
        log::debug!("skipping partial-fraction check for r={r}, ord={ord}");
    }
    Ok(f)
}

/// Outcome of [`is_fixed_point`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointReport {
    /// `a_n = a_{sn+t}` for all `n`, as field elements.
    pub fixed: bool,
    /// Least residue where the field-level check fails.
    pub witness: Option<u64>,
    /// Same check on the exponent multisets, when the function carries them.
    pub multiset_fixed: Option<bool>,
    pub multiset_witness: Option<u64>,
}

/// Least `n` with `items[n] != items[(s n + t) mod r]`.
fn first_unfixed<T: PartialEq>(ctx: &PairContext, r: u64, items: &[T]) -> Option<u64> {
    let (s_mod, t_mod) = (reduce(ctx.s, r), reduce(ctx.t, r));
    (0..r).find(|&n| items[n as usize] != items[rho(s_mod, t_mod, r, n) as usize])
}

pub fn is_fixed_point(ctx: &PairContext, f: &PeriodicRationalFn) -> FixedPointReport {
    let witness = first_unfixed(ctx, f.r, &f.coeffs);
    let multiset_witness = f.provenance.as_ref().map(|p| first_unfixed(ctx, f.r, p));
    FixedPointReport {
        fixed: witness.is_none(),
        witness,
        multiset_fixed: multiset_witness.map(|w| w.is_none()),
        multiset_witness: multiset_witness.flatten(),
    }
}

/// Multiset-level fixedness of `psi_{s,t,r,n}` for every `n < r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationCheck {
    pub r: u64,
    pub checked: u64,
    /// `(n, m)` pairs where the multiset at `m` differs from the one at `s m + t`.
    pub failures: Vec<(u64, u64)>,
}

pub fn check_psi_permutation(ctx: &PairContext, r: u64) -> Result<PermutationCheck> {
    let mut failures = Vec::new();
    for n in 0..r {
        let ms = psi_multisets(ctx.s, ctx.t, r, n)?;
        if let Some(m) = first_unfixed(ctx, r, &ms) {
            failures.push((n, m));
        }
    }
    Ok(PermutationCheck { r, checked: r, failures })
}

/// [`check_psi_permutation`] over every distinguished `r` in `[2, limit]`.
pub fn scan_psi_permutation(ctx: &PairContext, limit: u64, jobs: Option<usize>) -> Result<Vec<PermutationCheck>> {
    let rs = enumerate_distinguished_with_jobs(ctx, 2, limit, jobs)?;
    rs.into_par_iter().map(|r| check_psi_permutation(ctx, r)).collect()
}

/// Change of basis from the `psi` family to the orbit indicators `F`.
///
/// Row `i` is `psi_{s,t,r,n_i}`, column `j` is `F_{s,t,r,m_j}`, and entry `(i,j)` is the
/// coefficient of `psi_{n_i}` on the orbit of `m_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisMatrix {
    pub r: u64,
    pub s: i64,
    pub t: i64,
    /// Whether the `n = 0` row for `1/(1-x)` is included.
    pub extended: bool,
    pub row_reps: Vec<u64>,
    pub col_reps: Vec<u64>,
    pub entries: Vec<Vec<CycloElement>>,
    pub entries_multiset: Vec<Vec<ExponentMultiset>>,
}

impl BasisMatrix {
    pub fn is_square(&self) -> bool {
        self.row_reps.len() == self.col_reps.len()
    }
}

fn require_distinguished(s: i64, t: i64, r: u64) -> Result<PairContext> {
    let ctx = PairContext::new(s, t)?;
    if !is_distinguished(&ctx, r)?.verdict {
        return Err(Error::NotDistinguished { s, t, r });
    }
    Ok(ctx)
}

/// Coset representatives coprime to `r`, with `0` prepended when `extended`.
fn basis_rows(s: i64, r: u64, extended: bool) -> Result<Vec<u64>> {
    let cosets = representatives(OrbitKind::Multiplicative, s, 0, r)?;
    let mut rows: Vec<u64> = cosets.representatives().into_iter().filter(|&n| gcd(n, r) == 1).collect();
    if extended {
        rows.insert(0, 0);
    }
    Ok(rows)
}

/// Row multisets read off at each column representative, after checking that every
/// row is constant on each orbit.
fn matrix_multisets(
    s: i64,
    t: i64,
    r: u64,
    rows: &[u64],
    orbits: &OrbitSet,
) -> Result<Vec<(Vec<ExponentMultiset>, Vec<ExponentMultiset>)>> {
    rows.par_iter()
        .map(|&n| {
            let all = psi_multisets(s, t, r, n)?;
            for (rep, orbit) in orbits.iter() {
                if let Some(&x) = orbit.iter().find(|&&x| all[x as usize] != all[rep as usize]) {
                    return Err(Error::Inconsistent(format!(
                        "psi_{{{s},{t},{r},{n}}} differs at {x} and {rep} in the same orbit"
                    )));
                }
            }
            let row = orbits.representatives().iter().map(|&m| all[m as usize].clone()).collect();
            Ok((row, all))
        })
        .collect()
}

/// Builds `M` and its multiset view `M'`. Requires `r` distinguished.
pub fn basis_matrix(s: i64, t: i64, r: u64, extended: bool) -> Result<BasisMatrix> {
    require_distinguished(s, t, r)?;
    let row_reps = basis_rows(s, r, extended)?;
    let orbits = representatives(OrbitKind::Affine, s, t, r)?;
    let col_reps = orbits.representatives();
    let rows = matrix_multisets(s, t, r, &row_reps, &orbits)?;

    let mut entries = Vec::with_capacity(rows.len());
    let mut entries_multiset = Vec::with_capacity(rows.len());
    for (&n, (row, all)) in row_reps.iter().zip(rows) {
        // the field entries come from make_psi, which cross-checks small instances
        let psi = make_psi(s, t, r, n)?;
        if psi.provenance() != Some(&all[..]) {
            return Err(Error::Inconsistent(format!("psi_{{{s},{t},{r},{n}}} rebuilt differently")));
        }
        entries.push(col_reps.iter().map(|&m| psi.coefficient(m).clone()).collect());
        entries_multiset.push(row);
    }
    Ok(BasisMatrix { r, s, t, extended, row_reps, col_reps, entries, entries_multiset })
}

/// Renders `M'` in brace notation, one row per line.
pub fn render_mprime(m: &BasisMatrix) -> String {
    render_grid(m, |ms, _| ms.set_notation())
}

/// Renders `M` with entries as sums of powers of `w = exp(2 pi i / r)`.
pub fn render_m(m: &BasisMatrix) -> String {
    render_grid(m, |ms, _| ms.render_roots())
}

fn render_grid(m: &BasisMatrix, cell: impl Fn(&ExponentMultiset, &CycloElement) -> String) -> String {
    let header: Vec<String> = m.col_reps.iter().map(|c| format!("m={c}")).collect();
    let body: Vec<Vec<String>> = m
        .entries_multiset
        .iter()
        .zip(&m.entries)
        .map(|(ms_row, el_row)| ms_row.iter().zip(el_row).map(|(ms, el)| cell(ms, el)).collect())
        .collect();
    let labels: Vec<String> = m.row_reps.iter().map(|n| format!("n={n}")).collect();
    render_table("", &labels, &header, &body)
}

/// Left-aligned table with row labels and column headers; `corner` heads the label column.
pub fn render_table(corner: &str, labels: &[String], header: &[String], body: &[Vec<String>]) -> String {
    let label_width = labels.iter().map(String::len).chain([corner.len()]).max().unwrap_or(0);
    let widths: Vec<usize> = (0..header.len())
        .map(|j| body.iter().map(|row| row[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, label: &str, cells: &[String]| {
        let mut text = format!("{label:<label_width$}");
        for (c, w) in cells.iter().zip(&widths) {
            let _ = write!(text, "  {c:<w$}");
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(&mut out, corner, header);
    for (label, row) in labels.iter().zip(body) {
        line(&mut out, label, row);
    }
    out
}

/// One cell of the scaled-orbit comparison for `M'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MPrimeCell {
    pub n: u64,
    pub m: u64,
    pub observed: ExponentMultiset,
    /// `n * F_{s,t,r,m}`, each orbit element repeated `ord_r(s)/|F|` times.
    pub predicted: ExponentMultiset,
    pub set_match: bool,
    pub multiset_match: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MPrimeReport {
    pub s: i64,
    pub t: i64,
    pub r: u64,
    pub ord: u64,
    pub cells: Vec<MPrimeCell>,
}

impl MPrimeReport {
    pub fn set_matches(&self) -> usize {
        self.cells.iter().filter(|c| c.set_match).count()
    }

    pub fn multiset_matches(&self) -> usize {
        self.cells.iter().filter(|c| c.multiset_match).count()
    }

    pub fn all_match(&self) -> bool {
        self.set_matches() == self.cells.len()
    }
}

/// Compares each entry of the extended `M'` with the scaled orbit `n_i F_{m_j}`.
/// Reports per cell; a mismatch is data, not an error.
pub fn check_mprime_conjecture(s: i64, t: i64, r: u64) -> Result<MPrimeReport> {
    require_distinguished(s, t, r)?;
    let ord = multiplicative_order(s, r)?;
    let row_reps = basis_rows(s, r, true)?;
    let orbits = representatives(OrbitKind::Affine, s, t, r)?;
    let rows = matrix_multisets(s, t, r, &row_reps, &orbits)?;
    let mut cells = Vec::new();
    for (&n, (row, _)) in row_reps.iter().zip(&rows) {
        for ((m, orbit), observed) in orbits.iter().zip(row) {
            let mut predicted = ExponentMultiset::new(r)?;
            for &x in orbit {
                predicted.insert(((n as u128 * x as u128) % r as u128) as u64, ord / orbit.len() as u64);
            }
            cells.push(MPrimeCell {
                n,
                m,
                set_match: observed.distinct() == predicted.distinct(),
                multiset_match: *observed == predicted,
                observed: observed.clone(),
                predicted,
            });
        }
    }
    Ok(MPrimeReport { s, t, r, ord, cells })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MPrimeSummary {
    pub r: u64,
    pub cells: usize,
    pub set_matches: usize,
    pub multiset_matches: usize,
}

/// Runs [`check_mprime_conjecture`] for every distinguished `r` in `[2, limit]`.
pub fn scan_mprime_conjecture(s: i64, t: i64, limit: u64, jobs: Option<usize>) -> Result<Vec<MPrimeSummary>> {
    let ctx = PairContext::new(s, t)?;
    let rs = enumerate_distinguished_with_jobs(&ctx, 2, limit, jobs)?;
    rs.into_par_iter()
        .map(|r| {
            let report = check_mprime_conjecture(s, t, r)?;
            Ok(MPrimeSummary {
                r,
                cells: report.cells.len(),
                set_matches: report.set_matches(),
                multiset_matches: report.multiset_matches(),
            })
        })
        .collect()
}

/// Product of two matrices over `Q(w_r)`.
pub fn multiply_matrices(a: &[Vec<CycloElement>], b: &[Vec<CycloElement>]) -> Result<Vec<Vec<CycloElement>>> {
    let inner = b.len();
    if a.iter().any(|row| row.len() != inner) || inner == 0 {
        return Err(Error::domain("matrix dimensions do not agree"));
    }
    let cols = b[0].len();
    let r = b[0][0].conductor();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter().zip(b).try_fold(CycloElement::zero(r)?, |acc, (x, brow)| {
                        acc.checked_add(&x.checked_mul(&brow[j])?)
                    })
                })
                .collect()
        })
        .collect()
}

/// Exact inverse by Gauss-Jordan elimination, pivoting on the first nonzero entry.
/// The product with the input is checked against the identity before returning.
pub fn invert_matrix(m: &[Vec<CycloElement>]) -> Result<Vec<Vec<CycloElement>>> {
    let size = m.len();
    if size == 0 || m.iter().any(|row| row.len() != size) {
        return Err(Error::domain("only nonempty square matrices can be inverted"));
    }
    let r = m[0][0].conductor();
    let mut a: Vec<Vec<CycloElement>> = m.to_vec();
    let mut inv: Vec<Vec<CycloElement>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| CycloElement::from_integer(r, (i == j) as i64))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    for col in 0..size {
        let pivot = (col..size).find(|&i| !a[i][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = a[col][col].inverse()?;
        for j in 0..size {
            a[col][j] = a[col][j].checked_mul(&scale)?;
            inv[col][j] = inv[col][j].checked_mul(&scale)?;
        }
        for i in 0..size {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let factor = a[i][col].clone();
            for j in 0..size {
                a[i][j] = a[i][j].checked_sub(&factor.checked_mul(&a[col][j])?)?;
                inv[i][j] = inv[i][j].checked_sub(&factor.checked_mul(&inv[col][j])?)?;
            }
        }
    }

    let product = multiply_matrices(m, &inv)?;
    for (i, row) in product.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let ok = if i == j { x.is_one() } else { x.is_zero() };
            if !ok {
                return Err(Error::Inconsistent(format!("M * M^-1 differs from I at ({i},{j})")));
            }
        }
    }
    Ok(inv)
}

pub fn invert_basis_matrix(m: &BasisMatrix) -> Result<Vec<Vec<CycloElement>>> {
    invert_matrix(&m.entries)
}

/// A fixed point written as `sum_j c_j F_{s,t,r,m_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub r: u64,
    pub reps: Vec<u64>,
    pub coeffs: Vec<CycloElement>,
}

/// Reads off the orbit-constant coefficients of a fixed point.
pub fn decompose_fixed(ctx: &PairContext, f: &PeriodicRationalFn) -> Result<Decomposition> {
    if let Some(residue) = first_unfixed(ctx, f.r, &f.coeffs) {
        let image = rho(reduce(ctx.s, f.r), reduce(ctx.t, f.r), f.r, residue);
        return Err(Error::NotFixed { residue, image });
    }
    let orbits = representatives(OrbitKind::Affine, ctx.s, ctx.t, f.r)?;
    let reps = orbits.representatives();
    let coeffs = reps.iter().map(|&m| f.coefficient(m).clone()).collect();
    Ok(Decomposition { r: f.r, reps, coeffs })
}

/// `sum_j c_j F_{s,t,r,m_j}`.
pub fn reconstruct(ctx: &PairContext, d: &Decomposition) -> Result<PeriodicRationalFn> {
    if d.reps.len() != d.coeffs.len() {
        return Err(Error::domain("one coefficient per representative is required"));
    }
    let mut coeffs = vec![CycloElement::zero(d.r)?; d.r as usize];
    for (&m, c) in d.reps.iter().zip(&d.coeffs) {
        for x in affine_orbit(ctx.s, ctx.t, d.r, m)? {
            coeffs[x as usize] = coeffs[x as usize].checked_add(c)?;
        }
    }
    PeriodicRationalFn::new(d.r, coeffs)
}

/// `f` over the reduced denominator `prod_{e in poles} (1 - w^e x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedForm {
    pub poles: Vec<u64>,
    /// Numerator coefficients, lowest degree first, `poles.len()` of them.
    pub numerator: Vec<CycloElement>,
}

/// Multiplies the Taylor series of `f` by `prod (1 - w^e x)` and keeps the terms below
/// the number of poles. Fails if the product does not terminate there, i.e. if `f`
/// has a pole outside `poles`.
pub fn reduced_form(f: &PeriodicRationalFn, poles: &[u64]) -> Result<ReducedForm> {
    let r = f.r;
    let mut denom = vec![CycloElement::one(r)?];
    for &e in poles {
        let root = CycloElement::root_of_unity(r, e)?;
        let mut next = vec![CycloElement::zero(r)?; denom.len() + 1];
        for (i, c) in denom.iter().enumerate() {
            next[i] = next[i].checked_add(c)?;
            next[i + 1] = next[i + 1].checked_sub(&c.checked_mul(&root)?)?;
        }
        denom = next;
    }
    let k = poles.len();
    let series = f.taylor(k + r as usize);
    let mut numerator = Vec::with_capacity(k + r as usize);
    for i in 0..k + r as usize {
        let mut acc = CycloElement::zero(r)?;
        for (d, coeff) in denom.iter().enumerate().take(i + 1) {
            acc = acc.checked_add(&coeff.checked_mul(&series[i - d])?)?;
        }
        numerator.push(acc);
    }
    // the tail is r-periodic, so r consecutive zeros mean it vanishes identically
    if numerator[k..].iter().any(|c| !c.is_zero()) {
        return Err(Error::domain(format!("function has poles outside {poles:?}")));
    }
    numerator.truncate(k);
    Ok(ReducedForm { poles: poles.to_vec(), numerator })
}

/// `psi_{s,t,r,n}` over its own poles `w^e`, `e` in the coset of `n` (just `1 - x` for `n = 0`).
pub fn psi_reduced_form(s: i64, t: i64, r: u64, n: u64) -> Result<ReducedForm> {
    let psi = make_psi(s, t, r, n)?;
    let poles = cyclotomic_coset(s, r, n % r)?;
    reduced_form(&psi, &poles)
}

/// Compares reduced numerators of the `psi` rows with the first and last columns of `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnObservation {
    pub n: u64,
    pub constant_matches_first_column: bool,
    /// `None` when the numerator has no `x^2` term slot.
    pub x2_matches_last_column: Option<bool>,
}

/// Checks, for each coprime row of `M`, whether the numerator's constant term equals
/// the first column and its `x^2` coefficient equals the last column.
pub fn column_observations(s: i64, t: i64, r: u64) -> Result<Vec<ColumnObservation>> {
    let m = basis_matrix(s, t, r, false)?;
    m.row_reps
        .iter()
        .zip(&m.entries)
        .map(|(&n, row)| {
            let red = psi_reduced_form(s, t, r, n)?;
            Ok(ColumnObservation {
                n,
                constant_matches_first_column: red.numerator[0] == row[0],
                x2_matches_last_column: red.numerator.get(2).map(|c| Some(c) == row.last()),
            })
        })
        .collect()
}

/// Renders a matrix of field elements, one row per line.
pub fn render_elements(m: &[Vec<CycloElement>]) -> String {
    let labels: Vec<String> = (1..=m.len()).map(|i| format!("{i}")).collect();
    let header: Vec<String> = (1..=m.first().map_or(0, Vec::len)).map(|j| format!("{j}")).collect();
    let body: Vec<Vec<String>> = m.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect();
    render_table("", &labels, &header, &body)
}

/// Orbit partitions behind a basis matrix: the cosets `C_{s,r,n}` and orbits `F_{s,t,r,m}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitSummary {
    pub cosets: BTreeMap<u64, Vec<u64>>,
    pub affine: BTreeMap<u64, Vec<u64>>,
}

pub fn orbit_summary(s: i64, t: i64, r: u64) -> Result<OrbitSummary> {
    Ok(OrbitSummary {
        cosets: representatives(OrbitKind::Multiplicative, s, 0, r)?.orbits,
        affine: representatives(OrbitKind::Affine, s, t, r)?.orbits,
    })
}

//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p omega-core --test acceptance`. The process exits nonzero if
//! any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use omega_core::cyclo::{CycloElement, ExponentMultiset};
use omega_core::distinguished::{
    check_10_14_mod_24, enumerate_distinguished, is_distinguished, multiples_chart, ord_valuation_closed_form,
    progression_members, PairContext,
};
use omega_core::modnt::{is_prime, jacobi_symbol, multiplicative_order, valuation};
use omega_core::orbits::{representatives, OrbitKind};
use omega_core::series::{
    basis_matrix, check_mprime_conjecture, column_observations, decompose_fixed, invert_basis_matrix, is_fixed_point,
    make_f, make_psi, multiply_matrices, reconstruct, scan_mprime_conjecture, scan_psi_permutation, Decomposition,
    PeriodicRationalFn,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

fn c1_table_reproduction() -> Outcome {
    let shaded: BTreeSet<u64> = read_fixture("table_3_1_shaded.txt")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| l.split_whitespace().map(|x| x.parse::<u64>().expect("fixture number")))
        .collect();
    let ctx = ok(PairContext::new(3, 1))?;
    let start = Instant::now();
    let found = ok(enumerate_distinguished(&ctx, 2, 204))?;
    let elapsed = start.elapsed();
    let expected: Vec<u64> = shaded.iter().copied().filter(|&r| r >= 2).collect();
    check(found == expected, || {
        let got: BTreeSet<u64> = found.iter().copied().collect();
        let want: BTreeSet<u64> = expected.iter().copied().collect();
        format!(
            "missing {:?}, extra {:?}",
            want.difference(&got).collect::<Vec<_>>(),
            got.difference(&want).collect::<Vec<_>>()
        )
    })?;
    check(shaded.contains(&1), || "fixture lacks the r=1 cell".into())?;
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} distinguished in [2,204] plus the r=1 cell = {} shaded, {:.1?}",
        found.len(),
        shaded.len(),
        elapsed
    ))
}

fn c2_gap_at_616() -> Outcome {
    let ctx = ok(PairContext::new(3, 1))?;
    for r in [40, 136, 232, 328, 424, 520] {
        check(ok(is_distinguished(&ctx, r))?.verdict, || format!("{r} should be distinguished"))?;
    }
    let v = ok(is_distinguished(&ctx, 616))?;
    check(!v.verdict, || "616 should not be distinguished".into())?;
    Ok(format!("40+96m true for m<=5; 616: ord_r={} ord_gr={}", v.ord_r, v.ord_gr))
}

fn c3_eleven_pattern() -> Outcome {
    let ctx = ok(PairContext::new(3, 1))?;
    let d = |r| is_distinguished(&ctx, r).map(|v| v.verdict).map_err(|e| e.to_string());
    check(d(11)? && !d(22)? && d(44)?, || "11/22/44 pattern broken".into())?;
    for t in 0..=6u32 {
        let r = 5 * 2u64.pow(t);
        check(d(r)? == (t <= 3), || format!("2^{t}*5 = {r} has the wrong verdict"))?;
    }
    Ok("11 y, 22 n, 44 y; 2^t*5 y for t<=3, n for t=4..6".into())
}

fn c4_powers_of_two() -> Outcome {
    for ell in 3..=20u32 {
        let ord = ok(multiplicative_order(3, 1 << ell))?;
        check(ord == 1 << (ell - 2), || format!("ord_(2^{ell})(3) = {ord}"))?;
    }
    Ok("ord_{2^l}(3) = 2^(l-2) for 3 <= l <= 20".into())
}

/// Least `d >= 1` with `s^d = 1 mod m`, by stepping.
fn naive_order(s: i64, m: u64) -> u64 {
    let s = s.rem_euclid(m as i64) as u64;
    let (mut x, mut d) = (s % m, 1);
    while x != 1 % m {
        x = x * s % m;
        d += 1;
    }
    d
}

fn c5_criterion_equivalence() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for (s, t) in [(3i64, 1i64), (5, 1), (5, 2), (7, 2), (11, 1)] {
        let ctx = ok(PairContext::new(s, t))?;
        for r in 2..=2000u64 {
            if num_integer::gcd(s as u64, r) != 1 {
                continue;
            }
            let ord = naive_order(s, r);
            // beta(ord) mod r by the recursion beta(j+1) = s beta(j) + t
            let mut beta = 0i128;
            for _ in 0..ord {
                beta = (s as i128 * beta + t as i128).rem_euclid(r as i128);
            }
            let by_divisibility = beta == 0;
            let by_orders = naive_order(s, ctx.g * r) == ord;
            let lib = ok(is_distinguished(&ctx, r))?.verdict;
            check(by_divisibility == by_orders && lib == by_orders, || {
                format!("({s},{t}) r={r}: divisibility {by_divisibility}, orders {by_orders}, library {lib}")
            })?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} coprime (pair, r) cases agree, {elapsed:.1?}"))
}

fn c6_closed_form_valuations() -> Outcome {
    let mut checked = 0;
    for s in 2..=100i64 {
        for p in (2..s as u64).filter(|&p| is_prime(p) && (s as u64 - 1).is_multiple_of(p)) {
            let mut pk = p;
            let mut ell = 1u32;
            while pk <= 100_000 {
                let brute = ok(valuation(p, ok(multiplicative_order(s, pk))?))?;
                let closed = ok(ord_valuation_closed_form(s, p, ell))?;
                check(brute == closed, || format!("s={s} p={p} l={ell}: {closed} vs {brute}"))?;
                checked += 1;
                pk *= p;
                ell += 1;
            }
        }
    }
    Ok(format!("{checked} (s, p, l) cases match"))
}

fn c7_mod_24() -> Outcome {
    let report = ok(check_10_14_mod_24(10_000))?;
    check(report.counterexamples.is_empty(), || format!("counterexamples {:?}", report.counterexamples))?;
    let ctx = ok(PairContext::new(3, 1))?;
    for r in (10..=10_000u64).filter(|r| r % 24 == 10 || r % 24 == 14) {
        check(ok(is_distinguished(&ctx, r))?.verdict, || format!("{r} not distinguished"))?;
    }
    for k in 0..=1000i64 {
        let j = ok(jacobi_symbol(2 + 4 * k, 5 + 12 * k))?;
        check(j == -1, || format!("jacobi(2+4k, 5+12k) = {j} at k={k}"))?;
    }
    Ok(format!(
        "{} + {} members <= 10^4 distinguished; jacobi = -1 for k <= 1000",
        report.members_10,
        report.members_14
    ))
}

fn c8_progressions() -> Outcome {
    let ctx = ok(PairContext::new(3, 1))?;
    let rs = ok(enumerate_distinguished(&ctx, 2, 200))?;
    for &r in &rs {
        for b in [1, 5] {
            let terms = ok(progression_members(&ctx, r, b, 21))?;
            let expected: Vec<u64> = (0..=20).map(|m| b * r + 6 * r * m).collect();
            check(terms == expected, || format!("r={r} b={b}: {terms:?}"))?;
            for &x in &terms {
                check(ok(is_distinguished(&ctx, x))?.verdict, || format!("{x} not distinguished"))?;
            }
        }
    }
    Ok(format!("r+6rm and 5r+6rm, m <= 20, for all {} distinguished r <= 200", rs.len()))
}

fn c9_charts() -> Outcome {
    let text = read_fixture("charts_11_1.txt");
    let ctx = ok(PairContext::new(11, 1))?;
    let mut charts = 0;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    while let Some(head) = lines.next() {
        let k: u64 = head.trim_start_matches("k=").parse().map_err(|_| format!("bad header {head}"))?;
        let chart = ok(multiples_chart(&ctx, k, &[6, 6]))?;
        check(chart.primes == [2, 5], || format!("primes {:?}", chart.primes))?;
        for i in 0..=6u32 {
            let row = lines.next().ok_or("truncated fixture")?;
            for (j, cell) in row.split_whitespace().enumerate() {
                let want = cell == "y";
                let got = chart.get(&[i, j as u32]).ok_or("missing cell")?;
                check(got == want, || format!("k={k} cell ({i},{j}): got {got}, printed {cell}"))?;
            }
        }
        charts += 1;
    }
    check(charts == 3, || format!("{charts} charts in fixture"))?;
    Ok("k = 51, 101, 151 match cell for cell (7x7 each)".into())
}

fn c10_partitions() -> Outcome {
    let cosets = ok(representatives(OrbitKind::Multiplicative, 3, 0, 13))?;
    let affine = ok(representatives(OrbitKind::Affine, 3, 1, 13))?;
    let parts = |set: &omega_core::orbits::OrbitSet| set.iter().map(|(_, o)| o.to_vec()).collect::<Vec<_>>();
    let want_c = vec![vec![0], vec![1, 3, 9], vec![2, 5, 6], vec![4, 10, 12], vec![7, 8, 11]];
    let want_f = vec![vec![0, 1, 4], vec![2, 7, 9], vec![3, 5, 10], vec![6], vec![8, 11, 12]];
    check(parts(&cosets) == want_c, || format!("cosets {:?}", parts(&cosets)))?;
    check(parts(&affine) == want_f, || format!("affine orbits {:?}", parts(&affine)))?;
    check(cosets.representatives() == [0, 1, 2, 4, 7], || "coset representatives".into())?;
    check(affine.representatives() == [0, 2, 3, 6, 8], || "orbit representatives".into())?;
    Ok("cosets and affine orbits of Z/13, representatives {0,1,2,4,7} and {0,2,3,6,8}".into())
}

fn c11_fixed_points() -> Outcome {
    let ctx = ok(PairContext::new(3, 1))?;
    for r in [1, 13] {
        check(is_fixed_point(&ctx, &ok(PeriodicRationalFn::ones(r))?).fixed, || "1/(1-x)".into())?;
    }
    for m in 0..13 {
        let rep = is_fixed_point(&ctx, &ok(make_f(3, 1, 13, m))?);
        check(rep.fixed, || format!("F_(3,1,13,{m}) witness {:?}", rep.witness))?;
    }
    for n in [0, 1, 2, 4, 7] {
        let rep = is_fixed_point(&ctx, &ok(make_psi(3, 1, 13, n))?);
        check(rep.fixed && rep.multiset_fixed == Some(true), || format!("psi_(3,1,13,{n}) {rep:?}"))?;
    }
    let checks = ok(scan_psi_permutation(&ctx, 50, None))?;
    let pairs: u64 = checks.iter().map(|c| c.checked).sum();
    for c in &checks {
        check(c.failures.is_empty(), || format!("r={}: failures {:?}", c.r, c.failures))?;
    }
    Ok(format!(
        "1/(1-x), all F and psi for r=13 fixed; multiset permutation holds for {} distinguished r <= 50 ({pairs} (r,n) pairs)",
        checks.len()
    ))
}

fn c12_basis_matrix() -> Outcome {
    let printed: [[&[u64]; 5]; 5] = [
        [&[0], &[0], &[0], &[0], &[0]],
        [&[0, 1, 4], &[2, 9, 7], &[10, 3, 5], &[6], &[12, 11, 8]],
        [&[0, 2, 8], &[1, 4, 5], &[10, 7, 6], &[12], &[11, 3, 9]],
        [&[0, 3, 4], &[2, 10, 8], &[12, 1, 7], &[11], &[9, 5, 6]],
        [&[0, 2, 7], &[1, 11, 10], &[9, 8, 5], &[3], &[12, 4, 6]],
    ];
    let m = ok(basis_matrix(3, 1, 13, true))?;
    check(m.row_reps == [0, 1, 2, 4, 7] && m.col_reps == [0, 2, 3, 6, 8], || "row/column representatives".into())?;
    for (i, row) in printed.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let want: BTreeSet<u64> = cell.iter().copied().collect();
            let got: BTreeSet<u64> = m.entries_multiset[i][j].distinct().into_iter().collect();
            check(got == want, || format!("entry ({},{}) = {got:?}, printed {want:?}", i + 1, j + 1))?;
        }
    }
    let e53 = &m.entries_multiset[4][2];
    check(*e53 == ok(ExponentMultiset::from_exponents(13, [5, 8, 9]))?, || format!("(5,3) = {e53}"))?;
    for i in 1..5 {
        let cell = &m.entries_multiset[i][3];
        check(cell.counts.len() == 1 && cell.len() == 3, || format!("orbit {{6}} column row {}: {cell}", i + 1))?;
    }
    let inv = ok(invert_basis_matrix(&m))?;
    let id = ok(multiply_matrices(&m.entries, &inv))?;
    for (i, row) in id.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            check(if i == j { x.is_one() } else { x.is_zero() }, || format!("(M M^-1)[{i}][{j}] = {x}"))?;
        }
    }
    for obs in ok(column_observations(3, 1, 13))? {
        check(obs.constant_matches_first_column, || format!("first column, n={}", obs.n))?;
        check(obs.x2_matches_last_column == Some(true), || format!("x^2 vs last column, n={}", obs.n))?;
    }
    Ok("M' matches as printed, (5,3) = {5,8,9}, 3w^a in the {6} column, M M^-1 = I, column observations hold".into())
}

fn c13_mprime_conjecture() -> Outcome {
    let report = ok(check_mprime_conjecture(3, 1, 13))?;
    check(report.cells.len() == 25 && report.all_match(), || {
        format!("{} of {} cells match", report.set_matches(), report.cells.len())
    })?;
    let scan = ok(scan_mprime_conjecture(3, 1, 50, None))?;
    let cells: usize = scan.iter().map(|s| s.cells).sum();
    let sets: usize = scan.iter().map(|s| s.set_matches).sum();
    let multisets: usize = scan.iter().map(|s| s.multiset_matches).sum();
    Ok(format!(
        "25/25 cells for r=13; scan over {} r <= 50: {sets}/{cells} set-level, {multisets}/{cells} multiset-level (exploratory)",
        scan.len()
    ))
}

fn c14_spanning_round_trip() -> Outcome {
    let ctx = ok(PairContext::new(3, 1))?;
    let rs = ok(enumerate_distinguished(&ctx, 2, 50))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0014);
    for trial in 0..100 {
        let r = rs[rng.gen_range(0..rs.len())];
        let reps = ok(representatives(OrbitKind::Affine, 3, 1, r))?.representatives();
        let cyclotomic = trial % 2 == 1;
        let coeffs = reps
            .iter()
            .map(|_| {
                let q = BigRational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=6).into());
                let mut c = CycloElement::from_rational(r, q)?;
                if cyclotomic {
                    let w = CycloElement::root_of_unity(r, rng.gen_range(0..r))?;
                    c = c.checked_add(&w)?;
                }
                Ok(c)
            })
            .collect::<Result<Vec<_>, omega_core::Error>>()
            .map_err(|e| e.to_string())?;
        let d = Decomposition { r, reps, coeffs };
        let f = ok(reconstruct(&ctx, &d))?;
        check(is_fixed_point(&ctx, &f).fixed, || format!("trial {trial}: r={r} not fixed"))?;
        let back = ok(decompose_fixed(&ctx, &f))?;
        check(back == d, || format!("trial {trial}: r={r} decomposition differs"))?;
        check(ok(reconstruct(&ctx, &back))? == f, || format!("trial {trial}: r={r} rebuild differs"))?;
    }
    Ok("100 random orbit-constant fixed points (integer and cyclotomic) round-trip exactly".into())
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("(3,1) table reproduction", c1_table_reproduction),
        ("gap at 616", c2_gap_at_616),
        ("11/22/44 and 2^t*5 pattern", c3_eleven_pattern),
        ("ord of 3 mod 2^l", c4_powers_of_two),
        ("criterion equivalence", c5_criterion_equivalence),
        ("closed-form valuations", c6_closed_form_valuations),
        ("10/14 mod 24", c7_mod_24),
        ("progressions", c8_progressions),
        ("(11,1) charts", c9_charts),
        ("(3,13) combinatorics", c10_partitions),
        ("fixed-point suite", c11_fixed_points),
        ("matrix M / M'", c12_basis_matrix),
        ("M' conjecture checker", c13_mprime_conjecture),
        ("spanning round-trip", c14_spanning_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

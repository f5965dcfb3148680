//! One function per subcommand. Each returns a [`Report`] holding the JSON payload
//! together with its text and CSV renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use omega_core::cyclo::ExponentMultiset;
use omega_core::distinguished::{
    check_10_14_mod_24_with_jobs, descent_check_with_jobs, enumerate_distinguished_with_jobs, is_distinguished,
    multiples_chart, order_growth_profile, progression_members, progression_modulus_scan, PairContext,
};
use omega_core::orbits::{representatives, OrbitKind};
use omega_core::series::{
    basis_matrix, invert_basis_matrix, make_f, psi_multisets, psi_reduced_form, render_elements, render_m,
    render_mprime, render_table, scan_mprime_conjecture, BasisMatrix,
};
use omega_core::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Default)]
pub struct Report {
    pub params: BTreeMap<String, Value>,
    pub result: Value,
    pub counterexamples: Vec<Value>,
    pub text: String,
    pub csv: String,
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report payloads serialize")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn table(s: i64, t: i64, lo: u64, hi: u64, jobs: Option<usize>) -> Result<Report> {
    let ctx = PairContext::new(s, t)?;
    let marked = enumerate_distinguished_with_jobs(&ctx, lo.max(2), hi, jobs)?;
    let convention = lo <= 1;

    let width = hi.to_string().len() + 3;
    let mut text = String::new();
    let first_row = lo - (lo - 1) % 12;
    let mut is_marked = marked.iter().peekable();
    let mut row = first_row;
    while row <= hi {
        let mut line = String::new();
        for r in row..row + 12 {
            let cell = if r < lo || r > hi {
                String::new()
            } else if r == 1 {
                "[1]*".to_string()
            } else if is_marked.next_if_eq(&&r).is_some() {
                format!("[{r}]")
            } else {
                format!(" {r}")
            };
            let _ = write!(line, "{cell:<width$}");
        }
        text.push_str(line.trim_end());
        text.push('\n');
        row += 12;
    }
    if convention {
        text.push_str("* 1 is marked by convention.\n");
    }

    let mut csv = String::from("r,distinguished\n");
    let mut is_marked = marked.iter().peekable();
    for r in lo..=hi {
        let cell = if r == 1 {
            "convention"
        } else if is_marked.next_if_eq(&&r).is_some() {
            "true"
        } else {
            "false"
        };
        let _ = writeln!(csv, "{r},{cell}");
    }

    Ok(Report {
        params: params(&[("s", json!(s)), ("t", json!(t)), ("lo", json!(lo)), ("hi", json!(hi))]),
        result: json!({
            "distinguished": marked,
            "convention": if convention { vec![1] } else { vec![] },
        }),
        text,
        csv,
        ..Report::default()
    })
}

pub fn analyze(s: i64, t: i64, r: u64) -> Result<Report> {
    let ctx = PairContext::new(s, t)?;
    let v = is_distinguished(&ctx, r)?;
    let mut text = String::new();
    let _ = writeln!(text, "(s,t) = ({s},{t}), r = {r}, g = {}", ctx.g);
    let _ = writeln!(text, "ord_r(s)        = {}", v.ord_r);
    let _ = writeln!(text, "ord_gr(s)       = {}", v.ord_gr);
    let _ = writeln!(text, "beta(ord) mod r = {}", v.beta_mod_r);
    let _ = writeln!(text, "distinguished   = {}", yes_no(v.verdict));
    if ctx.outside_theorem_range {
        let _ = writeln!(text, "note: t lies outside 1 <= t <= s-2");
    }
    let csv = format!(
        "s,t,r,g,ord_r,ord_gr,beta_mod_r,distinguished\n{s},{t},{r},{},{},{},{},{}\n",
        ctx.g, v.ord_r, v.ord_gr, v.beta_mod_r, v.verdict
    );
    Ok(Report {
        params: params(&[("s", json!(s)), ("t", json!(t)), ("r", json!(r))]),
        result: to_value(&v),
        text,
        csv,
        ..Report::default()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum View {
    M,
    Mprime,
    Inverse,
    Psi,
    F,
    Orbits,
}

impl View {
    fn name(self) -> &'static str {
        match self {
            View::M => "M",
            View::Mprime => "Mprime",
            View::Inverse => "inverse",
            View::Psi => "psi",
            View::F => "F",
            View::Orbits => "orbits",
        }
    }
}

fn grid_csv(m: &BasisMatrix, cell: impl Fn(&ExponentMultiset) -> String) -> String {
    let mut csv = String::from("n");
    for c in &m.col_reps {
        let _ = write!(csv, ",m={c}");
    }
    csv.push('\n');
    for (n, row) in m.row_reps.iter().zip(&m.entries_multiset) {
        let _ = write!(csv, "{n}");
        for ms in row {
            let _ = write!(csv, ",\"{}\"", cell(ms));
        }
        csv.push('\n');
    }
    csv
}

fn set_list(xs: &[u64]) -> String {
    let items: Vec<String> = xs.iter().map(u64::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn polynomial(exponents: &[u64]) -> String {
    exponents
        .iter()
        .map(|&e| match e {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{e}"),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn basis(s: i64, t: i64, r: u64, view: View) -> Result<Report> {
    let m = basis_matrix(s, t, r, true)?;
    let mut report = Report {
        params: params(&[("s", json!(s)), ("t", json!(t)), ("r", json!(r)), ("view", json!(view.name()))]),
        ..Report::default()
    };
    match view {
        View::M => {
            report.text = render_m(&m);
            report.csv = grid_csv(&m, ExponentMultiset::render_roots);
            report.result = to_value(&m);
        }
        View::Mprime => {
            report.text = render_mprime(&m);
            report.csv = grid_csv(&m, ExponentMultiset::to_string);
            report.result = json!({
                "row_reps": m.row_reps,
                "col_reps": m.col_reps,
                "entries_multiset": m.entries_multiset,
            });
        }
        View::Inverse => {
            let inv = invert_basis_matrix(&m)?;
            report.text = render_elements(&inv);
            let mut csv = String::new();
            for row in &inv {
                let cells: Vec<String> = row.iter().map(|x| format!("\"{x}\"")).collect();
                let _ = writeln!(csv, "{}", cells.join(","));
            }
            report.csv = csv;
            report.result = to_value(&inv);
        }
        View::Psi => {
            let mut text = String::new();
            let mut csv = String::from("n,m,coefficient\n");
            let mut rows = Vec::new();
            for &n in &m.row_reps {
                let ms = psi_multisets(s, t, r, n)?;
                let reduced = psi_reduced_form(s, t, r, n)?;
                let poles: Vec<String> = reduced.poles.iter().map(|e| format!("(1 - w^{e} x)")).collect();
                let _ = writeln!(text, "psi_{{{s},{t},{r},{n}}}: denominator {}", poles.join(""));
                for (k, a) in ms.iter().enumerate() {
                    let _ = writeln!(text, "  a_{k} = {}", a.render_roots());
                    let _ = writeln!(csv, "{n},{k},\"{}\"", a.render_roots());
                }
                rows.push(json!({ "n": n, "coefficients": ms, "reduced": reduced }));
            }
            report.text = text;
            report.csv = csv;
            report.result = Value::Array(rows);
        }
        View::F => {
            let mut text = String::new();
            let mut csv = String::from("m,orbit\n");
            let mut rows = Vec::new();
            for &c in &m.col_reps {
                let f = make_f(s, t, r, c)?;
                let support: Vec<u64> = (0..r).filter(|&k| !f.coefficient(k).is_zero()).collect();
                let _ = writeln!(text, "F_{{{s},{t},{r},{c}}} = ({}) / (1 - x^{r})", polynomial(&support));
                let _ = writeln!(csv, "{c},\"{}\"", set_list(&support));
                rows.push(json!({ "m": c, "support": support }));
            }
            report.text = text;
            report.csv = csv;
            report.result = Value::Array(rows);
        }
        View::Orbits => {
            let cosets = representatives(OrbitKind::Multiplicative, s, 0, r)?;
            let affine = representatives(OrbitKind::Affine, s, t, r)?;
            let mut text = String::new();
            let _ = writeln!(text, "Lambda = {}", set_list(&cosets.representatives()));
            let _ = writeln!(text, "Upsilon = {}", set_list(&affine.representatives()));
            let _ = writeln!(text, "basis rows = {}", set_list(&m.row_reps));
            for (n, c) in cosets.iter() {
                let _ = writeln!(text, "C_{{{s},{r},{n}}} = {}", set_list(c));
            }
            for (n, f) in affine.iter() {
                let _ = writeln!(text, "F_{{{s},{t},{r},{n}}} = {}", set_list(f));
            }
            let mut csv = String::from("kind,representative,orbit\n");
            for (n, c) in cosets.iter() {
                let _ = writeln!(csv, "coset,{n},\"{}\"", set_list(c));
            }
            for (n, f) in affine.iter() {
                let _ = writeln!(csv, "affine,{n},\"{}\"", set_list(f));
            }
            report.text = text;
            report.csv = csv;
            report.result = json!({ "cosets": cosets, "affine": affine, "basis_rows": m.row_reps });
        }
    }
    Ok(report)
}

pub fn chart(s: i64, t: i64, k: u64, max_exp: &[u32]) -> Result<Report> {
    let ctx = PairContext::new(s, t)?;
    let primes = ctx.g_factors.factors.len();
    let bounds: Vec<u32> = match max_exp {
        [one] => vec![*one; primes],
        many => many.to_vec(),
    };
    let chart = multiples_chart(&ctx, k, &bounds)?;
    let mut text = String::new();
    let _ = writeln!(text, "(s,t) = ({s},{t}), k = {k}, g = {}", ctx.g);
    match chart.primes[..] {
        [p, q] => {
            let _ = writeln!(text, "cell (i,j): is {p}^i * {q}^j * {k} distinguished?");
        }
        _ => {
            let _ = writeln!(text, "primes of g: {:?}", chart.primes);
        }
    }
    text.push_str(&chart.render_grid());
    let mut csv = String::new();
    for p in &chart.primes {
        let _ = write!(csv, "exp_{p},");
    }
    csv.push_str("r,distinguished\n");
    for cell in &chart.cells {
        for e in &cell.exponents {
            let _ = write!(csv, "{e},");
        }
        let _ = writeln!(csv, "{},{}", cell.r, cell.distinguished);
    }
    Ok(Report {
        params: params(&[("s", json!(s)), ("t", json!(t)), ("k", json!(k)), ("max_exp", json!(bounds))]),
        result: to_value(&chart),
        text,
        csv,
        ..Report::default()
    })
}

pub fn profile(s: i64, p: u64, max_ell: u32) -> Result<Report> {
    let prof = order_growth_profile(s, p, max_ell)?;
    let labels: Vec<String> = prof.rows.iter().map(|r| r.ell.to_string()).collect();
    let header = ["ord_{p^l}(s)", "lambda", "delta"].map(String::from);
    let body: Vec<Vec<String>> = prof
        .rows
        .iter()
        .map(|r| vec![r.ord.to_string(), r.lambda.to_string(), r.delta.to_string()])
        .collect();
    let mut text = format!("s = {s}, p = {p}\n");
    text.push_str(&render_table("l", &labels, &header, &body));
    let _ = writeln!(text, "alpha = {}", prof.alpha);
    let mut csv = String::from("ell,ord,lambda,delta\n");
    for r in &prof.rows {
        let _ = writeln!(csv, "{},{},{},{}", r.ell, r.ord, r.lambda, r.delta);
    }
    Ok(Report {
        params: params(&[("s", json!(s)), ("p", json!(p)), ("max_ell", json!(max_ell))]),
        result: to_value(&prof),
        text,
        csv,
        ..Report::default()
    })
}

pub fn progressions(s: i64, t: i64, limit: u64, terms: usize, offsets: &[u64], jobs: Option<usize>) -> Result<Report> {
    let ctx = PairContext::new(s, t)?;
    let rs = enumerate_distinguished_with_jobs(&ctx, 2, limit, jobs)?;
    let mut report = Report {
        params: params(&[
            ("s", json!(s)),
            ("t", json!(t)),
            ("limit", json!(limit)),
            ("terms", json!(terms)),
            ("b", json!(offsets)),
        ]),
        ..Report::default()
    };
    let step = ctx.g_bar as i128 * s as i128;
    let _ = writeln!(report.text, "progressions b r + {step} r m, m < {terms}, over {} distinguished r <= {limit}", rs.len());
    report.csv.push_str("r,b,terms,status\n");
    let mut rows = Vec::new();
    for &r in &rs {
        for &b in offsets {
            match progression_members(&ctx, r, b, terms) {
                Ok(members) => {
                    let last = members.last().copied().unwrap_or(0);
                    let _ = writeln!(report.text, "r={r} b={b}: {} terms up to {last}, all distinguished", members.len());
                    let _ = writeln!(report.csv, "{r},{b},{},ok", members.len());
                    rows.push(json!({ "r": r, "b": b, "members": members }));
                }
                Err(Error::Counterexample(msg)) => {
                    let _ = writeln!(report.text, "r={r} b={b}: COUNTEREXAMPLE {msg}");
                    let _ = writeln!(report.csv, "{r},{b},,counterexample");
                    report.counterexamples.push(json!({ "r": r, "b": b, "reason": msg }));
                }
                Err(e) => return Err(e),
            }
        }
    }
    report.result = Value::Array(rows);
    Ok(report)
}

pub fn scan_conjecture(s: i64, t: i64, limit: u64, jobs: Option<usize>) -> Result<Report> {
    let scan = scan_mprime_conjecture(s, t, limit, jobs)?;
    let labels: Vec<String> = scan.iter().map(|x| x.r.to_string()).collect();
    let header = ["cells", "set", "multiset"].map(String::from);
    let body: Vec<Vec<String>> = scan
        .iter()
        .map(|x| vec![x.cells.to_string(), x.set_matches.to_string(), x.multiset_matches.to_string()])
        .collect();
    let mut text = format!("scaled-orbit comparison for M', (s,t) = ({s},{t}), distinguished r <= {limit}\n");
    text.push_str(&render_table("r", &labels, &header, &body));
    let mut csv = String::from("r,cells,set_matches,multiset_matches\n");
    for x in &scan {
        let _ = writeln!(csv, "{},{},{},{}", x.r, x.cells, x.set_matches, x.multiset_matches);
    }
    Ok(Report {
        params: params(&[("s", json!(s)), ("t", json!(t)), ("limit", json!(limit))]),
        result: to_value(&scan),
        text,
        csv,
        ..Report::default()
    })
}

pub fn check_10_14(limit: u64, jobs: Option<usize>) -> Result<Report> {
    let rep = check_10_14_mod_24_with_jobs(limit, jobs)?;
    let mut text = format!(
        "r = 10 mod 24: {} members <= {limit}\nr = 14 mod 24: {} members <= {limit}\n",
        rep.members_10, rep.members_14
    );
    let mut csv = String::from("r,reason\n");
    for c in &rep.counterexamples {
        let _ = writeln!(text, "COUNTEREXAMPLE r={}: {}", c.r, c.reason);
        let _ = writeln!(csv, "{},\"{}\"", c.r, c.reason);
    }
    if rep.counterexamples.is_empty() {
        text.push_str("all members are (3,1)-distinguished\n");
    }
    Ok(Report {
        params: params(&[("limit", json!(limit))]),
        counterexamples: rep.counterexamples.iter().map(to_value).collect(),
        result: to_value(&rep),
        text,
        csv,
    })
}

pub fn descent(s: i64, t: i64, t_prime: i64, limit: u64, jobs: Option<usize>) -> Result<Report> {
    let rep = descent_check_with_jobs(s, t, t_prime, limit, jobs)?;
    let mut text = format!(
        "({s},{t})-distinguished r <= {limit}: {}\nchecked against ({s},{})",
        rep.members, rep.reduced_t
    );
    if !rep.transfer_applies {
        let _ = write!(text, "; gcd(s-1,{t}) does not divide gcd(s-1,{t_prime}), so ({s},{t_prime}) is not checked");
    } else if t_prime != rep.reduced_t {
        let _ = write!(text, " and ({s},{t_prime})");
    }
    text.push('\n');
    let mut csv = String::from("r,reason\n");
    for c in &rep.violations {
        let _ = writeln!(text, "COUNTEREXAMPLE r={}: {}", c.r, c.reason);
        let _ = writeln!(csv, "{},\"{}\"", c.r, c.reason);
    }
    Ok(Report {
        params: params(&[("s", json!(s)), ("t", json!(t)), ("t_prime", json!(t_prime)), ("limit", json!(limit))]),
        counterexamples: rep.violations.iter().map(to_value).collect(),
        result: to_value(&rep),
        text,
        csv,
    })
}

pub fn moduli_scan(s: i64, t: i64, alpha: u64, max_mu: u64, terms: u64) -> Result<Report> {
    let ctx = PairContext::new(s, t)?;
    let scan = progression_modulus_scan(&ctx, alpha, max_mu, terms)?;
    let text = format!(
        "steps mu <= {max_mu} with {alpha} + mu m distinguished for m = 1..{terms}\nvalid:   {}\nminimal: {}\n",
        set_list(&scan.valid),
        set_list(&scan.minimal)
    );
    let mut csv = String::from("mu,minimal\n");
    for mu in &scan.valid {
        let _ = writeln!(csv, "{mu},{}", scan.minimal.contains(mu));
    }
    Ok(Report {
        params: params(&[
            ("s", json!(s)),
            ("t", json!(t)),
            ("alpha", json!(alpha)),
            ("max_mu", json!(max_mu)),
            ("terms", json!(terms)),
        ]),
        result: to_value(&scan),
        text,
        csv,
        ..Report::default()
    })
}

//! Acceptance suite: one pass/fail line per criterion, with the clauses that
//! make it up listed underneath.

use std::collections::HashMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use chern_gap::algebra::{self, groebner, PolyVec, TermOrder};
use chern_gap::cech::{self, Component, Section, ZWindow};
use chern_gap::invariants::{self, SweepConfig};
use chern_gap::laurent::{BiLaurentPoly, BundleData, ZUMonomial};
use chern_gap::linalg::{self, ratio, Rat};
use chern_gap::sections;

/// Clauses that cannot hold as stated; see the README.
const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[
    (3, "restriction kernels equal j-n for 2 <= n <= j-1"),
    (5, "split minimal presentation has j(j+1)/2 relations"),
    (
        6,
        "tower: Čech h0(l_n) equals presented degree-<=n dimension",
    ),
];

type Criterion = (u32, &'static str, fn() -> Vec<Clause>);

struct Clause {
    name: String,
    pass: bool,
    detail: String,
}

fn clause(name: &str, pass: bool, detail: impl Into<String>) -> Clause {
    Clause {
        name: name.to_string(),
        pass,
        detail: detail.into(),
    }
}

fn within(name: &str, elapsed: Duration, limit: Duration) -> Clause {
    clause(
        name,
        elapsed <= limit,
        format!(
            "{:.1} s (limit {} s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn bundle(j: u32, p: &str) -> BundleData {
    BundleData::new(j, p.parse().expect("valid polynomial")).expect("valid bundle")
}

fn sweep_config(j: u32, samples: usize, seed: u64) -> SweepConfig {
    SweepConfig {
        j,
        samples,
        coeff_min: -5,
        coeff_max: 5,
        seed,
        density: 0.5,
    }
}

fn lower_bound_p(j: u32) -> &'static str {
    if j == 1 {
        "0"
    } else {
        "u"
    }
}

fn criterion_1() -> Vec<Clause> {
    let start = Instant::now();
    let mut bad = Vec::new();
    for j in 0..=5usize {
        let r = invariants::compute_text(j as u32, "0").expect("split case computes");
        let want = (j * (j + 1) / 2, j * j.saturating_sub(1) / 2, j * j);
        if (r.l_q, r.l_r1, r.gap) != want {
            bad.push(format!(
                "j={j}: got {:?}, want {want:?}",
                (r.l_q, r.l_r1, r.gap)
            ));
        }
    }
    vec![
        clause(
            "l(Q) = j(j+1)/2, l(R1) = j(j-1)/2, gap = j^2 for j = 0..5, p = 0",
            bad.is_empty(),
            bad.join("; "),
        ),
        within("runtime", start.elapsed(), Duration::from_secs(60)),
    ]
}

fn criterion_2() -> Vec<Clause> {
    let start = Instant::now();
    let mut bad = Vec::new();
    for j in 1..=5usize {
        let p = lower_bound_p(j as u32);
        let r = invariants::compute_text(j as u32, p).expect("lower-bound case computes");
        let want = (1, j - 1, j);
        if (r.l_q, r.l_r1, r.gap) != want {
            bad.push(format!(
                "j={j}, p={p}: got {:?}, want {want:?}",
                (r.l_q, r.l_r1, r.gap)
            ));
        }
    }
    vec![
        clause(
            "l(Q) = 1, l(R1) = j-1, gap = j for j = 1..5 (p = u, or 0 at j = 1)",
            bad.is_empty(),
            bad.join("; "),
        ),
        within("runtime", start.elapsed(), Duration::from_secs(60)),
    ]
}

/// `(j−1)` at `n = 0`, then `(j−1) + … + (j−n−1)`, capped at `j(j−1)/2`.
fn profile_formula(j: usize, n: usize) -> usize {
    (1..=n + 1).map(|i| j.saturating_sub(i)).sum()
}

fn criterion_3() -> Vec<Clause> {
    let mut h1_bad = Vec::new();
    let mut ker_bad = Vec::new();
    let mut shifted_bad = Vec::new();
    let mut ker_seen = Vec::new();
    for j in 2..=5u32 {
        let b = bundle(j, "0");
        let profile = cech::cohomology_profile(&b, j + 3).expect("profile certifies");
        for lc in &profile[..=(j + 2) as usize] {
            let want = profile_formula(j as usize, lc.n as usize);
            if lc.h1 != want {
                h1_bad.push(format!("j={j}, n={}: {} != {want}", lc.n, lc.h1));
            }
        }
        for n in 2..j {
            let want = (j - n) as usize;
            let got = profile[n as usize].ker_restriction_dim.expect("n >= 1");
            ker_seen.push(format!("j={j},n={n}:{got}"));
            if got != want {
                ker_bad.push(format!("j={j}, n={n}: {got} != {want}"));
            }
            let shifted = profile[n as usize - 1].ker_restriction_dim.expect("n >= 2");
            if shifted != want {
                shifted_bad.push(format!("j={j}, n={n}: {shifted} != {want}"));
            }
        }
    }
    vec![
        clause(
            "h1(l_n) for n = 0..j+2 follows the piecewise formula, j = 2..5",
            h1_bad.is_empty(),
            h1_bad.join("; "),
        ),
        clause(
            KNOWN_UNATTAINABLE[0].1,
            ker_bad.is_empty(),
            format!("computed {}", ker_seen.join(" ")),
        ),
        clause(
            "info: kernels equal j-n when l_n is read as truncation mod u^n",
            shifted_bad.is_empty(),
            shifted_bad.join("; "),
        ),
    ]
}

fn criterion_4() -> Vec<Clause> {
    let start = Instant::now();
    let mut clauses = Vec::new();
    for j in 2..=4u32 {
        let t = Instant::now();
        let outcome = invariants::sweep(&sweep_config(j, 50, 42), 0).expect("valid config");
        let summary = outcome.summary();
        let failure = outcome
            .failure
            .as_ref()
            .map(|(i, e)| format!("sample {i}: {e}"));
        let detail = format!(
            "{} samples, gaps {:?}, histogram {:?}, {:.1} s{}",
            summary.samples,
            (summary.min_gap, summary.max_gap),
            summary.gap_histogram,
            t.elapsed().as_secs_f64(),
            failure.map_or_else(String::new, |f| format!(", {f}"))
        );
        clauses.push(clause(
            &format!("j={j}: every gap in [j, j^2], every certificate passes"),
            outcome.failure.is_none() && summary.samples == 50 && summary.all_bounds_ok,
            detail,
        ));
    }
    clauses.push(within("runtime", start.elapsed(), Duration::from_secs(900)));
    clauses
}

fn criterion_5() -> Vec<Clause> {
    let mut gens_bad = Vec::new();
    let mut rels_bad = Vec::new();
    let mut rels_seen = Vec::new();
    for j in 0..=5usize {
        let p = sections::build_presentation(&bundle(j as u32, "0")).expect("presentation");
        if p.minimal.gens() != j + 2 {
            gens_bad.push(format!("j={j}: {}", p.minimal.gens()));
        }
        let rels = p.minimal.relations().len();
        rels_seen.push(format!("j={j}:{rels}"));
        if rels != j * (j + 1) / 2 {
            rels_bad.push(j);
        }
    }
    let mut u_bad = Vec::new();
    for j in 2..=5u32 {
        let p = sections::build_presentation(&bundle(j, "u")).expect("presentation");
        let shape = (p.minimal.gens(), p.minimal.relations().len());
        if shape != (3, 1) {
            u_bad.push(format!("j={j}: {shape:?}"));
        }
    }
    vec![
        clause(
            "split minimal presentation has j+2 generators, j = 0..5",
            gens_bad.is_empty(),
            gens_bad.join("; "),
        ),
        clause(
            KNOWN_UNATTAINABLE[1].1,
            rels_bad.is_empty(),
            format!("computed {}", rels_seen.join(" ")),
        ),
        clause(
            "p = u minimal presentation has 3 generators and 1 relation, j = 2..5",
            u_bad.is_empty(),
            u_bad.join("; "),
        ),
    ]
}

fn embedded(b: &BundleData, gens: &sections::GeneratorSet) -> Vec<PolyVec> {
    gens.generators
        .iter()
        .map(|g| sections::embed(b, &g.section))
        .collect()
}

fn model_bundles() -> Vec<BundleData> {
    let mut out: Vec<BundleData> = (0..=5).map(|j| bundle(j, "0")).collect();
    out.extend((2..=5).map(|j| bundle(j, "u")));
    out.extend((0..4).map(|i| BundleData::new(2, sweep_config(2, 4, 42).sample(i)).unwrap()));
    out
}

/// Rank of the truncations to u-degree ≤ `n` of `sections`.
fn truncated_rank(sections: &[Section], n: u32) -> usize {
    let mut index: HashMap<(Component, ZUMonomial), usize> = HashMap::new();
    let mut cols = Vec::new();
    for s in sections {
        let col: Vec<(usize, Rat)> = s
            .truncate_u(n)
            .coords()
            .map(|(comp, m, c)| {
                let next = index.len();
                (*index.entry((comp, m)).or_insert(next), c.clone())
            })
            .collect();
        cols.push(col);
    }
    linalg::rank_of_columns(index.len(), &cols)
}

fn criterion_6() -> Vec<Clause> {
    let bundles = model_bundles();
    let mut clauses = Vec::new();

    let mut gb_bad = Vec::new();
    let mut syz_bad = Vec::new();
    for b in &bundles {
        let pres = sections::build_presentation(b).expect("presentation");
        let cols = embedded(b, &pres.generators);
        for order in [TermOrder::POT_GREVLEX, TermOrder::TOP_LEX] {
            if !groebner(2, &cols, order).s_pairs_reduce_to_zero() {
                gb_bad.push(format!("j={}, p={}, {order:?}", b.j(), b.p()));
            }
        }
        if !pres
            .full
            .relations()
            .iter()
            .all(|s| algebra::is_zero_vec(&algebra::combine(2, &cols, s)))
        {
            syz_bad.push(format!("j={}, p={}", b.j(), b.p()));
        }
    }
    clauses.push(clause(
        "GB: every S-polynomial reduces to zero",
        gb_bad.is_empty(),
        gb_bad.join("; "),
    ));
    clauses.push(clause(
        "syzygies: A·S = 0",
        syz_bad.is_empty(),
        syz_bad.join("; "),
    ));

    let mut free_bad = Vec::new();
    for g in 1..=3 {
        let free = algebra::Presentation::free(g);
        let rho = algebra::double_dual_map(&free).expect("free module has a dual");
        let coker = algebra::colength_at_origin(&rho.cokernel()).map(|c| c.value);
        if rho.target.gens() != g || !rho.is_compatible() || coker != Ok(0) {
            free_bad.push(format!("rank {g}: {coker:?}"));
        }
    }
    clauses.push(clause(
        "double dual of a free module is free with zero cokernel",
        free_bad.is_empty(),
        free_bad.join("; "),
    ));

    let mut h1_bad = Vec::new();
    let mut lq_bad = Vec::new();
    for b in &bundles {
        for n in 0..=2 * b.j() + 2 {
            let base = cech::level_cohomology(b, n).expect("certified");
            let wide = cech::level_cohomology_in(b, n, ZWindow::for_level(b, n).enlarged(2), 2)
                .expect("certified");
            if base.h1 != wide.h1 {
                h1_bad.push(format!("j={}, p={}, n={n}", b.j(), b.p()));
            }
        }
        let certified = sections::certified_generators(b).expect("certified");
        let m0 = sections::colength_start(b);
        let base = sections::l_of_Q_from(b, &certified, m0)
            .expect("l(Q)")
            .value;
        let wider = sections::generators_at(b, certified.bound + 2).expect("certified at N+2");
        let at_n2 = sections::l_of_Q_from(b, &wider, m0).expect("l(Q)").value;
        let at_m2 = sections::l_of_Q_from(b, &certified, m0 + 2)
            .expect("l(Q)")
            .value;
        if (at_n2, at_m2) != (base, base) {
            lq_bad.push(format!("j={}, p={}: {base} {at_n2} {at_m2}", b.j(), b.p()));
        }
    }
    clauses.push(clause(
        "h1 unchanged on windows enlarged by 2",
        h1_bad.is_empty(),
        h1_bad.join("; "),
    ));
    clauses.push(clause(
        "l(Q) unchanged at N+2 and m+2",
        lq_bad.is_empty(),
        lq_bad.join("; "),
    ));

    let mut scale_bad = Vec::new();
    for j in [2u32, 3] {
        let cfg = sweep_config(j, 10, 42);
        for i in 0..10 {
            let p = cfg.sample(i);
            let gap = invariants::compute(j, &p).expect("computes").gap;
            for c in [ratio(2, 1), ratio(-3, 1), ratio(1, 2)] {
                let scaled: BiLaurentPoly = p.scalar_mul(&c);
                let g = invariants::compute(j, &scaled).expect("computes").gap;
                if g != gap {
                    scale_bad.push(format!("j={j}, sample {i}, c={c}: {g} != {gap}"));
                }
            }
        }
    }
    clauses.push(clause(
        "gap(j, p) = gap(j, c·p), c in {2, -3, 1/2}, 10 samples for j = 2, 3",
        scale_bad.is_empty(),
        scale_bad.join("; "),
    ));

    let mut literal_bad = Vec::new();
    let mut image_bad = Vec::new();
    for b in &bundles {
        let pres = sections::build_presentation(b).expect("presentation");
        let levels = pres.generators.levels();
        let top = pres.bound - 1 + b.j() + 2;
        let far = cech::h0_sections(b, top).expect("sections");
        let farther = cech::h0_sections(b, top + 2).expect("sections");
        for n in 0..pres.bound {
            let presented = sections::presented_dim(&pres.full, &levels, n);
            let h0 = cech::h0(b, n).expect("certified");
            if h0 != presented {
                literal_bad.push(format!("j={},p={},n={n}:{h0}/{presented}", b.j(), b.p()));
            }
            let image = truncated_rank(&far, n);
            if image != presented || truncated_rank(&farther, n) != image {
                image_bad.push(format!("j={}, p={}, n={n}", b.j(), b.p()));
            }
        }
    }
    clauses.push(clause(
        KNOWN_UNATTAINABLE[2].1,
        literal_bad.is_empty(),
        format!("mismatches (h0/presented) {}", literal_bad.join(" ")),
    ));
    clauses.push(clause(
        "tower: image of Čech H0(l_{N+j+1}) in H0(l_n) equals presented dimension",
        image_bad.is_empty(),
        image_bad.join("; "),
    ));
    clauses
}

fn run_sweep(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_chern-gap"))
        .arg("sweep")
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "sweep exited with {}", out.status);
    out.stdout
}

fn criterion_7() -> Vec<Clause> {
    let mut clauses = Vec::new();
    for (j, samples, seed) in [(2, 30, 42), (3, 20, 7)] {
        let base = [
            "--j".to_string(),
            j.to_string(),
            "--samples".to_string(),
            samples.to_string(),
            "--seed".to_string(),
            seed.to_string(),
        ];
        let args: Vec<&str> = base.iter().map(String::as_str).collect();
        let first = run_sweep(&args);
        let second = run_sweep(&args);
        let serial = run_sweep(&[args.as_slice(), &["--jobs", "1"]].concat());
        clauses.push(clause(
            &format!("sweep j={j} samples={samples} seed={seed}: identical JSON across runs"),
            first == second && first == serial && !first.is_empty(),
            format!("{} bytes", first.len()),
        ));
    }
    clauses
}

fn is_known(criterion: u32, name: &str) -> bool {
    KNOWN_UNATTAINABLE.contains(&(criterion, name))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        (1, "split-case table", criterion_1),
        (2, "lower-bound case", criterion_2),
        (3, "h1 profile", criterion_3),
        (4, "bounds sweep", criterion_4),
        (5, "presentation shape", criterion_5),
        (6, "property suites", criterion_6),
        (7, "determinism", criterion_7),
    ];
    let mut unexpected = 0;
    for (id, title, run) in criteria {
        let start = Instant::now();
        let clauses = run();
        let pass = clauses
            .iter()
            .filter(|c| !c.name.starts_with("info:"))
            .all(|c| c.pass);
        println!(
            "criterion {id}: {} {title} ({:.1} s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        for c in &clauses {
            let tag = match (c.pass, is_known(id, &c.name)) {
                (true, _) => "ok",
                (false, true) => "FAIL, known",
                (false, false) => "FAIL",
            };
            let detail = if c.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", c.detail)
            };
            println!("    [{tag}] {}{detail}", c.name);
            if !c.pass && !is_known(id, &c.name) && !c.name.starts_with("info:") {
                unexpected += 1;
            }
        }
    }
    if unexpected == 0 {
        println!("acceptance: every failure is a known unattainable clause");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} unexpected failing clause(s)");
        ExitCode::FAILURE
    }
}

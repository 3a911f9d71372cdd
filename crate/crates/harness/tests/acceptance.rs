use std::process::ExitCode;
use std::time::{Duration, Instant};

use catt_core::unbiased::{is_identity, is_unbiased_composite, is_unbiased_coh};
use catt_core::Term;
use catt_frontend::{Config, Mode, Outcome, Session};
use catt_harness::battery::{self, Tally};
use catt_harness::gen::GenConfig;

const MONOIDAL: &str = include_str!("../../frontend/corpus/monoidal.catt");

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: usize, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("criterion {n:>2} {}: {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn session() -> Session {
    Session::new(Config { mode: Mode::Normalize, ..Config::default() })
}

/// Loads `src` and returns the normal forms it produced, with the elapsed time.
fn normalize(s: &mut Session, src: &str) -> (Result<Vec<Term>, String>, Duration) {
    let start = Instant::now();
    let res = s.load(src);
    let took = start.elapsed();
    let mut nfs = Vec::new();
    for r in res {
        match r {
            Ok(Outcome::Normalized { normal: Some(nf), .. }) => nfs.push(nf),
            Ok(_) => {}
            Err(e) => return (Err(e.render("corpus")), took),
        }
    }
    (Ok(nfs), took)
}

fn section<'a>(from: &str, to: &str) -> &'a str {
    let a = MONOIDAL.find(from).expect("corpus section");
    let b = MONOIDAL.find(to).expect("corpus section");
    &MONOIDAL[a..b]
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn first_failure(t: &Tally) -> String {
    t.failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
}

fn strict_associativity(r: &mut Report) {
    let mut s = session();
    let ctx = "(x(f)y(g)z(h)w)";
    let (a, ta) = normalize(&mut s, &format!("normalize {ctx} | comp f (comp g h)"));
    let (b, tb) = normalize(&mut s, &format!("normalize {ctx} | comp (comp f g) h"));
    let ternary = |t: &Term| is_unbiased_composite(t) && is_unbiased_coh(t).is_some_and(|m| m.tree.children().len() == 3);
    let pass = match (&a, &b) {
        (Ok(a), Ok(b)) => a == b && ternary(&a[0]) && ta < Duration::from_millis(50) && tb < Duration::from_millis(50),
        _ => false,
    };
    r.line(1, "strict associativity", pass, format!("identical ternary composite, {} and {}", ms(ta), ms(tb)));
}

fn strict_unitality(r: &mut Report) {
    let mut s = session();
    let (a, _) = normalize(&mut s, "normalize (x(f)y) | comp f (id y)");
    let (b, _) = normalize(&mut s, "normalize (x(f)y) | unitor-r f");
    let right = a.as_ref().is_ok_and(|v| v[0] == Term::Var(2));
    let unitor = b.as_ref().is_ok_and(|v| is_identity(&v[0]));
    r.line(
        2,
        "strict unitality",
        right && unitor,
        format!("N(comp f (id y)) = f: {right}, N(unitor-r f) is an identity: {unitor}"),
    );
}

fn monoidal_law(r: &mut Report, n: usize, name: &str, src: &str, limit: Duration) {
    let mut s = session();
    let (nf, took) = normalize(&mut s, src);
    let detail = match &nf {
        Ok(v) => format!("identity: {}, {}", v.len() == 1 && is_identity(&v[0]), ms(took)),
        Err(e) => e.clone(),
    };
    let pass = nf.is_ok_and(|v| v.len() == 1 && is_identity(&v[0])) && took < limit;
    r.line(n, name, pass, detail);
}

fn termination(r: &mut Report, cfg: &GenConfig) {
    let t = battery::run_population(cfg, 1000, 10, battery::termination_measure);
    let rules: Vec<String> = t.rule_counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
    let drops = t.cell_drops.len();
    let pass = t.ok() && drops == 0 && t.instances >= 1000;
    let mut detail = format!(
        "{} terms, non-Cell steps [{}] all decrease: {}, Cell steps {} of which {} lower sc, max sc {}",
        t.instances,
        rules.join(", "),
        t.failures.iter().all(|f| f.property != "sc decreases"),
        t.cell_steps,
        drops,
        t.max_sc
    );
    if let Some(d) = t.cell_drops.first() {
        detail.push_str(&format!("; first Cell drop at {d}"));
    }
    detail.push_str(&first_failure(&t));
    r.line(5, "termination measure", pass, detail);
}

fn main() -> ExitCode {
    let mut r = Report { failed: 0 };
    let cfg = GenConfig { max_dim: 3, max_nesting: 3, ..GenConfig::default() };

    strict_associativity(&mut r);
    strict_unitality(&mut r);
    monoidal_law(&mut r, 3, "triangle", section("coh triangle", "coh pentagon"), Duration::from_secs(1));
    monoidal_law(&mut r, 4, "pentagon", section("coh pentagon", "# Associativity"), Duration::from_secs(5));
    termination(&mut r, &cfg);

    let t = battery::run_population(&cfg, 1000, 10, battery::confluence);
    r.line(
        6,
        "local confluence",
        t.ok() && t.instances >= 1000,
        format!(
            "{} terms, {} joins and sinks checked, largest graph {} nodes, {} graphs beyond 10^4 nodes{}",
            t.instances,
            t.checks,
            t.max_graph,
            t.over_budget,
            first_failure(&t)
        ),
    );

    let random = battery::pushout_laws_random(&cfg, 500);
    let unique = battery::pushout_uniqueness(6);
    r.line(
        7,
        "pushout laws",
        random.ok() && unique.ok() && random.instances >= 500,
        format!(
            "{} generated redexes, {} enumerated insertion points with {} uniqueness checks{}{}",
            random.instances,
            unique.instances,
            unique.checks,
            first_failure(&random),
            first_failure(&unique)
        ),
    );

    let t = battery::tree_iso(8, 1000, cfg.seed);
    r.line(
        8,
        "tree/context isomorphism",
        t.ok(),
        format!("{} trees, {} checks{}", t.instances, t.checks, first_failure(&t)),
    );

    let t = battery::suspension_laws(6);
    r.line(9, "suspension laws", t.ok(), format!("{} instances{}", t.instances, first_failure(&t)));

    let t = battery::unbiased_insert(6, 3);
    r.line(
        10,
        "unbiased insert",
        t.ok(),
        format!("{} (S, P, T, n) with dim T <= n <= dim S + 3{}", t.instances, first_failure(&t)),
    );

    if r.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", r.failed);
        ExitCode::FAILURE
    }
}

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use catt_harness::battery::{self, Tally};
use catt_harness::gen::GenConfig;

#[derive(Parser)]
#[command(name = "harness", about = "Property battery for the semistrict Catt kernel")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every battery and print one TSV row per battery.
    Report {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generated terms per population battery.
        #[arg(long, default_value_t = 1000)]
        terms: usize,
        /// Node bound for exhaustive insertion-point enumeration.
        #[arg(long, default_value_t = 6)]
        nodes: usize,
    },
}

fn main() -> ExitCode {
    let Cmd::Report { seed, terms, nodes } = Args::parse().cmd;
    let cfg = GenConfig { seed, ..GenConfig::default() };
    let runs: Vec<(&str, Box<dyn Fn() -> Tally>)> = vec![
        ("termination", Box::new(|| battery::run_population(&cfg, terms, 10, battery::termination_measure))),
        ("confluence", Box::new(|| battery::run_population(&cfg, terms, 10, battery::confluence))),
        ("subject-reduction", Box::new(|| battery::run_population(&cfg, terms, 10, battery::subject_reduction))),
        ("strategy", Box::new(|| battery::run_population(&cfg, terms, 10, battery::strategy_independence))),
        ("pushout-random", Box::new(|| battery::pushout_laws_random(&cfg, 500))),
        ("pushout-unique", Box::new(|| battery::pushout_uniqueness(nodes))),
        ("tree-iso", Box::new(|| battery::tree_iso(8, 1000, seed))),
        ("suspension", Box::new(|| battery::suspension_laws(nodes))),
        ("unbiased-insert", Box::new(|| battery::unbiased_insert(nodes, 1))),
        ("unbiased-insert-high", Box::new(|| battery::unbiased_insert(nodes, 3))),
        ("all-inserts", Box::new(|| battery::all_inserts(nodes))),
    ];
    println!("battery\tinstances\tchecks\tfailures\tcell_drops\tover_budget\tmax_graph\tmax_sc\tseconds");
    let mut ok = true;
    for (name, run) in runs {
        let start = Instant::now();
        let t = run();
        println!(
            "{name}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.2}",
            t.instances,
            t.checks,
            t.failures.len(),
            t.cell_drops.len(),
            t.over_budget,
            t.max_graph,
            t.max_sc,
            start.elapsed().as_secs_f64()
        );
        for f in t.failures.iter().take(3) {
            eprintln!("{f}");
        }
        ok &= t.ok();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

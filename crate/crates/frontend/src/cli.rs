//! The `catt` command-line driver.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use catt_core::pasting::tree_var_names;
use catt_core::print::Printer;
use catt_core::rewrite::{render_path, RuleSet, DEFAULT_STEP_BUDGET};

use crate::elab::{Config, Mode, Outcome, Session};

#[derive(Parser, Debug)]
#[command(name = "catt", about = "Type checker and normalizer for semistrict Catt")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
    /// Print every reduction step.
    #[arg(long, global = true)]
    trace: bool,
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_STEP_BUDGET)]
    step_budget: usize,
    /// Disable a reduction rule.
    #[arg(long = "no-rule", global = true, value_name = "RULE")]
    no_rule: Vec<RuleName>,
    /// Print only locally maximal arguments.
    #[arg(long, global = true)]
    short: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Type-check every declaration.
    Check { files: Vec<PathBuf> },
    /// Print the normal form of every `normalize` command.
    Normalize { files: Vec<PathBuf> },
    /// Decide every `asserteq` command.
    Eq { files: Vec<PathBuf> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleName {
    Dr,
    Ecr,
    Ins,
}

/// Runs the driver; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, errs: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(errs, "{e}") };
            return code;
        }
    };
    let mut rules = RuleSet::sua();
    for r in &args.no_rule {
        match r {
            RuleName::Dr => rules.disc_removal = false,
            RuleName::Ecr => rules.endo_coherence_removal = false,
            RuleName::Ins => rules.insertion = false,
        }
    }
    if !rules.is_sua() {
        let _ = writeln!(errs, "warning: untested rule configuration; normal forms may differ");
    }
    let (mode, files) = match &args.cmd {
        Cmd::Check { files } => (Mode::Check, files),
        Cmd::Normalize { files } => (Mode::Normalize, files),
        Cmd::Eq { files } => (Mode::Eq, files),
    };
    if files.is_empty() {
        let _ = writeln!(errs, "error: no input files");
        return 2;
    }
    let printer = if args.short { Printer::short() } else { Printer::canonical() };
    let config = Config { rules, budget: args.step_budget, trace: args.trace, mode };
    let mut failed = false;
    for path in files {
        let display = path.display().to_string();
        let src = match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(errs, "{display}: {e}");
                return 2;
            }
        };
        let mut session = Session::new(config.clone());
        let mut declared = 0;
        for r in session.load(&src) {
            match r {
                Err(e) => {
                    failed = true;
                    let _ = writeln!(errs, "{}", e.render(&display));
                }
                Ok(Outcome::Declared(_)) => declared += 1,
                Ok(Outcome::Normalized { pos, ctx, normal: Some(nf), trace, .. }) => {
                    let names = ctx.names();
                    for step in &trace {
                        let inner = step.scope.as_ref().map(tree_var_names);
                        let ns = inner.as_deref().unwrap_or(&names);
                        let _ = writeln!(
                            out,
                            "  {} @ {}: {} ==> {}",
                            step.rule,
                            render_path(&step.path),
                            printer.term(&step.before, ns),
                            printer.term(&step.after, ns)
                        );
                    }
                    let _ = writeln!(out, "{display}:{pos}: {}", printer.term(&nf, &names));
                }
                Ok(Outcome::Compared { pos, equal: Some(true), .. }) => {
                    let _ = writeln!(out, "{display}:{pos}: equal");
                }
                Ok(_) => {}
            }
        }
        if mode == Mode::Check {
            let _ = writeln!(out, "{display}: {declared} declarations checked");
        }
    }
    i32::from(failed)
}

//! `ccsabst`: batch front end to the workbench.
//!
//! Exit status: 0 success or the property holds, 1 the property or
//! simulation fails, 2 usage or input error, 3 state bound exceeded.

use std::fmt::Write as _;
use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use ccsabst_core::abstraction::{bounded_lts, run_script, Certification, RunOptions};
use ccsabst_core::corpus::{self, CorpusEntry};
use ccsabst_core::frontend::{parse_ccs, parse_mu, parse_script, print_family, print_process, CcsSource, MuSource};
use ccsabst_core::logic::{check_table, classify, Formula};
use ccsabst_core::simulation::weakly_simulated_by;
use ccsabst_core::{build_lts, Family, Lts, DEFAULT_MAX_STATES};
use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "ccsabst", version, about = "CCS model checking, weak simulation and abstraction")]
struct Cli {
    /// Upper bound on explored states.
    #[arg(long, global = true, env = "CCSABST_MAX_STATES", default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a process file and print its canonical form.
    Parse {
        file: PathBuf,
        #[arg(long)]
        root: Option<String>,
    },
    /// Print state and transition counts.
    States {
        file: PathBuf,
        #[arg(long)]
        root: Option<String>,
    },
    /// Model-check a property on the root.
    Check {
        file: PathBuf,
        /// A prop name, or an expression such as `Alt({enter}, {exit})`.
        #[arg(long)]
        prop: String,
        #[arg(long)]
        props: PathBuf,
        #[arg(long)]
        root: Option<String>,
        /// Also print the verdict for every state.
        #[arg(long)]
        table: bool,
    },
    /// Print the fragment of a property: muILBox or general.
    Classify {
        #[arg(long)]
        prop: String,
        #[arg(long)]
        props: PathBuf,
    },
    /// Decide whether constant LEFT is weakly simulated by constant RIGHT.
    Sim {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Print the simulation relation when it holds.
        #[arg(long)]
        witness: bool,
    },
    /// Run an abstraction script and print the state count after each step.
    Abstract {
        file: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        root: Option<String>,
        /// Check before ≤ after for every step.
        #[arg(long)]
        certify: bool,
        /// Write the final family here.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Checked-in examples.
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
    /// Start the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// List the embedded entries.
    List,
    /// Replay an entry and compare with its manifest. Takes an id or a directory.
    Run { id: String },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Truncated(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Truncated(_) => 3,
        }
    }
}

/// What a command prints and whether its verdict was positive.
struct Report {
    out: String,
    holds: bool,
}

impl Report {
    fn ok(out: String) -> Self {
        Report { out, holds: true }
    }
}

fn input<E: std::fmt::Display>(what: &FsPath) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", what.display()))
}

fn read(path: &FsPath) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(input(path))
}

fn load_ccs(path: &FsPath, root: Option<&str>) -> Result<CcsSource, CliError> {
    let mut src = parse_ccs(&read(path)?).map_err(input(path))?;
    if let Some(r) = root {
        src.family = src.family.with_root(r).map_err(input(path))?;
    }
    Ok(src)
}

fn load_prop(path: &FsPath, expr: &str, sets: &CcsSource) -> Result<Formula, CliError> {
    let mu: MuSource = parse_mu(&read(path)?, &sets.sets).map_err(input(path))?;
    mu.resolve(expr).map_err(|e| CliError::Input(format!("--prop {expr}: {e}")))
}

fn lts(f: &Family, max: usize) -> Result<Lts, CliError> {
    let l = build_lts(f, max).map_err(|e| CliError::Input(e.to_string()))?;
    if l.is_truncated() {
        return Err(CliError::Truncated(format!(
            "{}: more than {max} states; raise --max-states or CCSABST_MAX_STATES",
            f.root()
        )));
    }
    Ok(l)
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let max = cli.max_states;
    if max == 0 {
        return Err(CliError::Input("--max-states must be at least 1".into()));
    }
    match cli.cmd {
        Cmd::Parse { file, root } => Ok(Report::ok(print_family(&load_ccs(&file, root.as_deref())?.family))),
        Cmd::States { file, root } => {
            let l = lts(&load_ccs(&file, root.as_deref())?.family, max)?;
            Ok(Report::ok(format!("states: {}\ntransitions: {}\n", l.num_states(), l.num_transitions())))
        }
        Cmd::Check { file, prop, props, root, table } => {
            let src = load_ccs(&file, root.as_deref())?;
            let phi = load_prop(&props, &prop, &src)?;
            let l = lts(&src.family, max)?;
            let sat = check_table(&l, &phi).map_err(|e| CliError::Input(e.to_string()))?;
            let holds = sat.contains(l.initial());
            let mut out = format!("{holds}\n");
            if table {
                for (i, s) in l.states().iter().enumerate() {
                    writeln!(out, "{i}\t{}\t{}", sat.contains(i), print_process(s)).unwrap();
                }
            }
            Ok(Report { out, holds })
        }
        Cmd::Classify { prop, props } => {
            let mu = parse_mu(&read(&props)?, &Default::default()).map_err(input(&props))?;
            let phi = mu.resolve(&prop).map_err(|e| CliError::Input(format!("--prop {prop}: {e}")))?;
            let frag = classify(&phi).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Report::ok(format!("{frag}\n")))
        }
        Cmd::Sim { file, left, right, witness } => {
            let src = load_ccs(&file, None)?;
            let side = |name: &str| src.family.with_root(name).map_err(input(&file));
            let (l, r) = (lts(&side(&left)?, max)?, lts(&side(&right)?, max)?);
            let res = weakly_simulated_by(&l, &r).map_err(|e| CliError::Input(e.to_string()))?;
            let mut out = format!("{}\n", res.holds);
            if let (true, Some(w)) = (witness, &res.witness) {
                for &(p, q) in &w.pairs {
                    writeln!(out, "{} <= {}", print_process(&l.states()[p]), print_process(&r.states()[q])).unwrap();
                }
            }
            Ok(Report { out, holds: res.holds })
        }
        Cmd::Abstract { file, script, root, certify, output } => {
            let src = load_ccs(&file, root.as_deref())?;
            let steps = parse_script(&read(&script)?).map_err(input(&script))?;
            let opts = RunOptions { certify, max_states: max };
            let run = run_script(&src.family, &steps, &opts).map_err(input(&script))?;
            let count = |n: Option<usize>| n.map_or_else(|| format!(">{max}"), |n| n.to_string());
            let mut out = format!("initial\tstates={}\n", count(run.initial_states));
            for r in &run.log {
                write!(out, "{}\t{}\tstates={}", r.index, r.step, count(r.states)).unwrap();
                if certify {
                    write!(out, "\t{}", r.certification).unwrap();
                }
                if let Some(n) = &r.note {
                    write!(out, "\t# {n}").unwrap();
                }
                out.push('\n');
            }
            if let Some(o) = output {
                fs::write(&o, print_family(&run.family)).map_err(input(&o))?;
            }
            if run.log.iter().any(|r| matches!(r.certification, Certification::Refused(_))) {
                eprint!("{out}");
                return Err(CliError::Truncated("some steps could not be certified within the state bound".into()));
            }
            let holds = run.log.iter().all(|r| r.certification != Certification::Failed);
            Ok(Report { out, holds })
        }
        Cmd::Corpus { cmd: CorpusCmd::List } => Ok(Report::ok(corpus::ids().iter().map(|id| format!("{id}\n")).collect())),
        Cmd::Corpus { cmd: CorpusCmd::Run { id } } => {
            let entry: CorpusEntry = if FsPath::new(&id).is_dir() {
                corpus::load_dir(FsPath::new(&id)).map_err(|e| CliError::Input(e.to_string()))?
            } else {
                corpus::load(&id).map_err(|e| CliError::Input(e.to_string()))?
            };
            if bounded_lts(&entry.model.family, max).is_none() {
                return Err(CliError::Truncated(format!("{}: more than {max} states", entry.id)));
            }
            let replay = corpus::replay(&entry, max);
            let mut out = String::new();
            for o in &replay.outcomes {
                let actual = o.actual.as_deref().unwrap_or("-");
                if o.matches() {
                    writeln!(out, "ok\t{} = {}", o.key, o.expected).unwrap();
                } else {
                    writeln!(out, "MISMATCH\t{}: expected {}, got {actual}", o.key, o.expected).unwrap();
                }
            }
            Ok(Report { out, holds: replay.matches() })
        }
        Cmd::Serve { port, host } => {
            let addr = SocketAddr::new(host, port);
            let config = ccsabst_service::Config { max_states: max, certify_max_states: max };
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Input(e.to_string()))?;
            eprintln!("listening on http://{addr}");
            rt.block_on(ccsabst_service::serve(addr, config)).map_err(|e| CliError::Input(format!("{addr}: {e}")))?;
            Ok(Report::ok(String::new()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(r) => {
            print!("{}", r.out);
            ExitCode::from(if r.holds { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

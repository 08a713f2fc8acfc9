//! The `otcert` command-line tool.
//!
//! Standard output carries only JSON or CSV; human-readable messages go to
//! standard error. Exit codes:
//!
//! | code | outcome |
//! |------|---------|
//! | 0 | success |
//! | 1 | bad arguments, unreadable or malformed input |
//! | 2 | infeasible instance |
//! | 3 | support not c-cyclically monotone |
//! | 4 | support touches an infinite cost |

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::approximation::run_approximation;
use crate::error::{Error, Result};
use crate::formats::{
    load_json, report_csv_string, to_json, ApproxConfig, CertificateFile, CostFile, MeasureFile,
    PlanFile, PlanOrSupport, PotentialEntry, PotentialsFile, TorusFile,
};
use crate::measures::{cost_matrix, plan_cost, CostMatrix, CostSpec, DiscreteMeasure};
use crate::monotonicity::check_c_monotone;
use crate::potentials::{build_potentials, dual_value, verify_feasibility};
use crate::solver::solve_general;
use crate::torus::{analyze, TorusInstance, Which};
use crate::Rational64;
use crate::Scalar;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_NOT_MONOTONE: i32 = 3;
pub const EXIT_INFINITE_SUPPORT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "otcert", version, about = "Discrete optimal transport with optimality certificates")]
pub struct Cli {
    /// Slack for monotonicity and feasibility checks
    #[arg(long, global = true, default_value_t = crate::DEFAULT_TOL)]
    pub tol: f64,

    /// Sampling seed; overrides the seed in an approx config [default: config value, else 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output format; csv is only available for approx [default: csv for approx, json otherwise]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a transport problem and write the optimal plan
    Solve {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        /// Also write the plan here
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Certify the support of a plan (or a bare support) as c-cyclically monotone
    Check {
        /// Plan file, or support file {"pairs": [[i, j], ..]}
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        /// Source measure; needed for point-based costs
        #[arg(long, requires = "nu")]
        mu: Option<PathBuf>,
        /// Target measure; needed for point-based costs
        #[arg(long, requires = "mu")]
        nu: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Build dual potentials with equality on a support
    Potentials {
        /// Plan file, or support file {"pairs": [[i, j], ..]}
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long, requires = "nu")]
        mu: Option<PathBuf>,
        #[arg(long, requires = "mu")]
        nu: Option<PathBuf>,
        /// Support pair pinned to φ = 0
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run an empirical approximation schedule from a config file
    Approx {
        config: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// The cyclic-grid torus demo on N points
    Torus {
        n: usize,
        #[arg(default_value = "gamma1", value_parser = parse_which)]
        which: Which,
    },
}

fn parse_which(s: &str) -> std::result::Result<Which, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible => EXIT_INFEASIBLE,
        Error::NotMonotone { .. } => EXIT_NOT_MONOTONE,
        Error::InfiniteOnSupport(..) => EXIT_INFINITE_SUPPORT,
        _ => EXIT_PARSE,
    }
}

/// Run the tool on `args` (including the program name), writing to `out` and
/// `err`, and return the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_PARSE
                }
            };
        }
    };
    let mut ctx = Ctx { cli: &cli, out, err };
    match ctx.dispatch() {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            exit_code(&e)
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn dispatch(&mut self) -> Result<i32> {
        let cli = self.cli;
        match &cli.command {
            Command::Approx { .. } => {}
            _ if cli.format == Some(Format::Csv) => {
                return Err(Error::Invalid("csv output is only available for approx".into()));
            }
            _ => {}
        }
        if !(cli.tol >= 0.0 && cli.tol.is_finite()) {
            return Err(Error::Invalid(format!("--tol must be a finite nonnegative number, got {}", cli.tol)));
        }
        match &cli.command {
            Command::Solve { mu, nu, cost, out } => self.solve(mu, nu, cost, out.as_deref()),
            Command::Check { plan, cost, mu, nu, out } => self.check(plan, cost, mu.as_deref().zip(nu.as_deref()), out.as_deref()),
            Command::Potentials { plan, cost, mu, nu, root, out } => {
                self.potentials(plan, cost, mu.as_deref().zip(nu.as_deref()), *root, out.as_deref())
            }
            Command::Approx { config, out } => self.approx(config, out.as_deref()),
            Command::Torus { n, which } => self.torus(*n, *which),
        }
    }

    fn emit(&mut self, text: &str, path: Option<&Path>) -> Result<()> {
        if let Some(p) = path {
            std::fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
        }
        self.out.write_all(text.as_bytes()).map_err(|e| Error::Parse(e.to_string()))
    }

    fn note(&mut self, msg: std::fmt::Arguments<'_>) {
        let _ = writeln!(self.err, "{msg}");
    }

    fn solve(&mut self, mu: &Path, nu: &Path, cost: &Path, out: Option<&Path>) -> Result<i32> {
        let mu = load_json::<MeasureFile>(mu)?.to_measure()?;
        let nu = load_json::<MeasureFile>(nu)?.to_measure()?;
        let spec = load_json::<CostFile>(cost)?.to_spec()?;
        let result = solve_general(&mu, &nu, &spec)?;
        let file = PlanFile::from_result(&result);
        self.emit(&(to_json(&file) + "\n"), out)?;
        self.note(format_args!("cost {}", result.cost.to_f64()));
        Ok(EXIT_OK)
    }

    fn check(&mut self, plan: &Path, cost: &Path, measures: Option<(&Path, &Path)>, out: Option<&Path>) -> Result<i32> {
        let input = load_json::<PlanOrSupport>(plan)?;
        let gamma = input.support()?;
        let costs = load_costs(cost, measures, &input)?;
        let cert = check_c_monotone(&gamma, &costs, self.cli.tol)?;
        let file = CertificateFile::new(&cert, &gamma, self.cli.tol);
        self.emit(&(to_json(&file) + "\n"), out)?;
        match cert.violation() {
            None => {
                self.note(format_args!("c-cyclically monotone within tol {}", self.cli.tol));
                Ok(EXIT_OK)
            }
            Some(v) => {
                self.note(format_args!(
                    "not c-cyclically monotone: cycle of length {} improves the cost by {}",
                    v.cycle.len(),
                    v.improvement
                ));
                Ok(EXIT_NOT_MONOTONE)
            }
        }
    }

    fn potentials(
        &mut self,
        plan: &Path,
        cost: &Path,
        measures: Option<(&Path, &Path)>,
        root: usize,
        out: Option<&Path>,
    ) -> Result<i32> {
        let input = load_json::<PlanOrSupport>(plan)?;
        let gamma = input.support()?;
        let costs = load_costs(cost, measures, &input)?;
        let pp = build_potentials(&gamma, &costs, root)?;
        let report = verify_feasibility(&pp, &costs, self.cli.tol)?;
        let mut file = PotentialsFile::from_pair(&pp);
        let marginals = match (measures, &input) {
            (Some((mu, nu)), _) => {
                let (mu, nu) = load_measures(mu, nu)?;
                Some((mu.weights().to_vec(), nu.weights().to_vec()))
            }
            (None, PlanOrSupport::Plan(p)) => {
                let plan = p.to_plan()?;
                Some((plan.row_sums(), plan.col_sums()))
            }
            (None, PlanOrSupport::Support(_)) => None,
        };
        if let Some((mu, nu)) = marginals {
            let dual = dual_value(&pp, &mu, &nu)?.to_f64();
            file.dual_value = Some(PotentialEntry(dual));
            self.note(format_args!("dual value {dual}"));
            if let PlanOrSupport::Plan(p) = &input {
                let primal = plan_cost(&p.to_plan()?, &costs)?.to_f64();
                file.gap = Some(primal - dual);
                self.note(format_args!("plan cost {primal}"));
                self.note(format_args!("gap {}", primal - dual));
            }
        }
        self.emit(&(to_json(&file) + "\n"), out)?;
        if !report.passed {
            self.note(format_args!(
                "warning: feasibility check failed, max violation {} at {:?}",
                report.max_violation, report.worst_pair
            ));
        }
        Ok(EXIT_OK)
    }

    fn approx(&mut self, config: &Path, out: Option<&Path>) -> Result<i32> {
        let cfg: ApproxConfig = load_json(config)?;
        let seed = self.cli.seed.unwrap_or(cfg.seed);
        let spec = cfg.cost.to_spec()?;
        let report = run_approximation(&cfg.mu.to_spec()?, &cfg.nu.to_spec()?, &spec, &cfg.schedule, seed)?;
        let text = match self.cli.format.unwrap_or(Format::Csv) {
            Format::Csv => report_csv_string(&report),
            Format::Json => to_json(&report) + "\n",
        };
        self.emit(&text, out)?;
        if let Some(last) = report.last() {
            let reference = report.reference.map(|r| format!(", reference {r}")).unwrap_or_default();
            self.note(format_args!(
                "n = {}: cost {}, dual gap {:e}{reference}",
                last.n, last.cost, last.dual_gap
            ));
        }
        Ok(EXIT_OK)
    }

    fn torus(&mut self, n: usize, which: Which) -> Result<i32> {
        let tol = Rational64::from_f64_lossy(self.cli.tol);
        let report = analyze::<Rational64>(n, which, tol)?;
        let inst = TorusInstance::<Rational64>::new(n)?;
        let file = TorusFile::from_report(&report, inst.support(which), self.cli.tol);
        self.emit(&(to_json(&file) + "\n"), None)?;
        self.note(format_args!("plan cost {}", report.plan_cost.to_f64()));
        match report.certificate.violation() {
            None => {
                if let Some(d) = report.dual_value {
                    self.note(format_args!("dual value {}", d.to_f64()));
                }
                Ok(EXIT_OK)
            }
            Some(v) => {
                self.note(format_args!(
                    "violating cycle of length {} improves the cost by {}",
                    v.cycle.len(),
                    v.improvement
                ));
                self.note(format_args!("no potential pair exists with equality on {which}"));
                Ok(EXIT_NOT_MONOTONE)
            }
        }
    }
}

fn load_measures(mu: &Path, nu: &Path) -> Result<(DiscreteMeasure<f64>, DiscreteMeasure<f64>)> {
    Ok((load_json::<MeasureFile>(mu)?.to_measure()?, load_json::<MeasureFile>(nu)?.to_measure()?))
}

/// Cost matrix for a check: from the measures when given, else over atom
/// indices sized by the plan (or by the cost itself for a bare support).
fn load_costs(cost: &Path, measures: Option<(&Path, &Path)>, input: &PlanOrSupport) -> Result<CostMatrix<f64>> {
    let spec = load_json::<CostFile>(cost)?.to_spec()?;
    let costs = match measures {
        Some((mu, nu)) => {
            let (mu, nu) = load_measures(mu, nu)?;
            cost_matrix(&spec, &mu, &nu)?
        }
        None => {
            let (n, m) = match (input, &spec) {
                (PlanOrSupport::Plan(p), _) => (p.n, p.m),
                (_, CostSpec::ExplicitMatrix(mat)) => (mat.n_rows(), mat.n_cols()),
                (_, CostSpec::TorusShift(t)) => (t.size, t.size),
                _ => return Err(Error::UnsupportedArgument("--mu and --nu for a point-based cost")),
            };
            spec.index_matrix(n, m)?
        }
    };
    if let PlanOrSupport::Plan(p) = input {
        if (p.n, p.m) != (costs.n_rows(), costs.n_cols()) {
            return Err(Error::Invalid(format!(
                "plan is {}x{}, cost is {}x{}",
                p.n,
                p.m,
                costs.n_rows(),
                costs.n_cols()
            )));
        }
    }
    Ok(costs)
}


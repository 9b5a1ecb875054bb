//! Command-line front end. `run` returns the process exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{
    check_prop52_contrapositive, gen_example53, gen_random, probe_example53_unboundedness,
    RandomSpec,
};
use crate::cone::{DirectionSet, DEFAULT_TOL_FEAS};
use crate::error::Error;
use crate::evp::{certify, check_nemeth_efficiency_at, evp_solve_with, EvpCertificate, VectorProblem};
use crate::ext_real::ExtReal;
use crate::io::{emit_problem, parse_json, parse_problem, to_json, PosetFile, ScalarizeFile};
use crate::order::{minimal_point, FinitePoset, MonotoneFunctional};
use crate::scalarization::{xi_h, Gerstewitz, ScalarizationResult, DEFAULT_TOL_BISECT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PLUS_INF: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "evpkit", version, about = "Cone scalarization and epsilon-efficiency certificates")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Input file, `-` for stdin, or inline JSON starting with `{`.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, env = "EVPKIT_TOL_FEAS", default_value_t = DEFAULT_TOL_FEAS)]
    pub tol_feas: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_BISECT)]
    pub tol_bisect: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the instance value (or sets it for generators).
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Overrides the instance value.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the (generalized) Gerstewitz function at a point.
    Scalarize,
    /// Solve an instance and emit its certificate.
    Solve {
        /// Treat the input as an explicit relation matrix plus functional.
        #[arg(long)]
        poset: bool,
    },
    /// Re-check a stored certificate against its instance.
    Certify {
        #[arg(long)]
        certificate: String,
    },
    #[command(subcommand)]
    Gen(GenCommand),
    #[command(subcommand)]
    Probe(ProbeCommand),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Piecewise-linear grid instance on [-T, T].
    Example53 {
        #[arg(long = "T", default_value_t = 100.0)]
        half_width: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Seeded random instance.
    Random {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 10.0)]
        range: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProbeCommand {
    /// Epsilon-efficiency of x0.
    Efficiency,
    /// Range-ladder probe on the grid family.
    Unbounded {
        /// Dual functional, comma separated; repeatable.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        xi: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 50.0, 100.0])]
        ladder: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Power-of-two epsilon search.
    Prop52,
}

/// A failure with its exit code and message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_internal() { EXIT_INTERNAL } else { EXIT_INPUT },
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CmdResult = Result<i32, Failure>;

struct Ctx<'a> {
    opts: &'a GlobalOpts,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn note(&mut self, msg: &str) {
        if !self.opts.quiet {
            let _ = writeln!(self.stderr, "{msg}");
        }
    }

    fn emit(&mut self, text: &str) -> Result<(), Failure> {
        match &self.opts.output {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| input_error(format!("cannot write {}: {e}", path.display()))),
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| input_error(format!("cannot write report: {e}"))),
        }
    }

    fn input_text(&self) -> Result<String, Failure> {
        let src = self
            .opts
            .input
            .as_deref()
            .ok_or_else(|| input_error("--input is required"))?;
        read_source(src)
    }

    fn problem(&self) -> Result<VectorProblem, Failure> {
        let mut p = parse_problem(&self.input_text()?, self.opts.tol_feas)?;
        if self.opts.gamma.is_some() || self.opts.epsilon.is_some() {
            p.gamma = self.opts.gamma.unwrap_or(p.gamma);
            p.epsilon = self.opts.epsilon.unwrap_or(p.epsilon);
            p.validate()?;
        }
        Ok(p)
    }
}

fn read_source(src: &str) -> Result<String, Failure> {
    if src.trim_start().starts_with('{') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| input_error(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(src).map_err(|e| input_error(format!("cannot read {src}: {e}")))
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let mut ctx = Ctx {
        opts: &cli.global,
        stdout,
        stderr,
    };
    let outcome = check_tolerances(ctx.opts).and_then(|()| dispatch(&cli.command, &mut ctx));
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn check_tolerances(opts: &GlobalOpts) -> Result<(), Failure> {
    for (name, v) in [("--tol-feas", opts.tol_feas), ("--tol-bisect", opts.tol_bisect)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(input_error(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> CmdResult {
    match cmd {
        Command::Scalarize => cmd_scalarize(ctx),
        Command::Solve { poset: false } => cmd_solve(ctx),
        Command::Solve { poset: true } => cmd_solve_poset(ctx),
        Command::Certify { certificate } => cmd_certify(ctx, certificate),
        Command::Gen(g) => cmd_gen(ctx, g),
        Command::Probe(p) => cmd_probe(ctx, p),
    }
}

fn cmd_scalarize(ctx: &mut Ctx) -> CmdResult {
    let file: ScalarizeFile = parse_json(&ctx.input_text()?)?;
    let cone = file.cone.to_cone(ctx.opts.tol_feas)?;
    let result = match (&file.h, &file.k0) {
        (Some(h), None) => {
            let h = DirectionSet::new(h.clone())?;
            xi_h(&cone, &h, &file.y, ctx.opts.tol_bisect)?
        }
        (None, Some(k0)) => {
            let value = Gerstewitz::new(&cone, k0)?.eval(&file.y)?;
            ScalarizationResult {
                value,
                witness_t: value.value(),
                witness_lambda: value.value().map(|_| vec![1.0]),
                trace: Vec::new(),
            }
        }
        (Some(_), Some(_)) => return Err(input_error("give exactly one of \"H\" and \"k0\"")),
        (None, None) => return Err(input_error("input needs \"H\" or \"k0\"")),
    };
    ctx.emit(&to_json(&result))?;
    Ok(if result.value == ExtReal::PlusInf {
        EXIT_PLUS_INF
    } else {
        EXIT_OK
    })
}

fn cmd_solve(ctx: &mut Ctx) -> CmdResult {
    let p = ctx.problem()?;
    let cert = evp_solve_with(&p, ctx.opts.tol_bisect)?;
    ctx.emit(&to_json(&cert))?;
    if cert.cond_a.holds && cert.cond_c.holds {
        Ok(EXIT_OK)
    } else {
        ctx.note("certificate does not satisfy (a) and (c)");
        Ok(EXIT_INTERNAL)
    }
}

fn cmd_solve_poset(ctx: &mut Ctx) -> CmdResult {
    let file: PosetFile = parse_json(&ctx.input_text()?)?;
    let poset = FinitePoset::from_matrix(file.relation)?;
    let eta = MonotoneFunctional::new(&poset, file.eta)?;
    let result = minimal_point(&poset, &eta, file.x0)?;
    ctx.emit(&to_json(&result))?;
    Ok(EXIT_OK)
}

fn cmd_certify(ctx: &mut Ctx, certificate: &str) -> CmdResult {
    let p = ctx.problem()?;
    let cert: EvpCertificate = parse_json(&read_source(certificate)?)?;
    let report = certify(&p, &cert)?;
    ctx.emit(&to_json(&report))?;
    if report.consistent {
        Ok(EXIT_OK)
    } else {
        for m in &report.mismatches {
            ctx.note(m);
        }
        Ok(EXIT_MISMATCH)
    }
}

fn cmd_gen(ctx: &mut Ctx, g: &GenCommand) -> CmdResult {
    let p = match *g {
        GenCommand::Example53 { half_width, step } => {
            gen_example53(half_width, step, ctx.opts.gamma.unwrap_or(1.0))?
        }
        GenCommand::Random { n, m, k, range } => {
            let mut p = gen_random(RandomSpec {
                seed: ctx.opts.seed,
                n,
                m,
                k,
                coord_range: range,
            })?;
            if ctx.opts.gamma.is_some() || ctx.opts.epsilon.is_some() {
                p.gamma = ctx.opts.gamma.unwrap_or(p.gamma);
                p.epsilon = ctx.opts.epsilon.unwrap_or(p.epsilon);
                p.validate()?;
            }
            p
        }
    };
    ctx.emit(&emit_problem(&p))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EfficiencyReport {
    efficient: bool,
    epsilon: f64,
    violating: Option<usize>,
}

fn cmd_probe(ctx: &mut Ctx, probe: &ProbeCommand) -> CmdResult {
    match probe {
        ProbeCommand::Efficiency => {
            let p = ctx.problem()?;
            let check = check_nemeth_efficiency_at(&p, p.epsilon)?;
            ctx.emit(&to_json(&EfficiencyReport {
                efficient: check.efficient,
                epsilon: p.epsilon,
                violating: check.violating,
            }))?;
        }
        ProbeCommand::Unbounded { xi, ladder, step } => {
            let functionals: Vec<Vec<f64>> = if xi.is_empty() {
                vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]]
            } else if xi.len() % 2 == 0 {
                xi.chunks(2).map(<[f64]>::to_vec).collect()
            } else {
                return Err(input_error("--xi needs an even number of coefficients"));
            };
            let reports = functionals
                .iter()
                .map(|f| probe_example53_unboundedness(f, ladder, *step))
                .collect::<Result<Vec<_>, _>>()?;
            ctx.emit(&to_json(&reports))?;
        }
        ProbeCommand::Prop52 => {
            let p = ctx.problem()?;
            ctx.emit(&to_json(&check_prop52_contrapositive(&p)?))?;
        }
    }
    Ok(EXIT_OK)
}

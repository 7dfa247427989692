use std::io::Write;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};
use quadcurl::analysis::{convergence_study_with, RunConfig};
use quadcurl::appendix::check_appendix;
use quadcurl::derham_check::{
    check_commuting_global, check_global, check_local, random_cell, random_polynomial, reference_frame,
};
use quadcurl::elements::ElementTriple;
use quadcurl::mesh::uniform_mesh;
use quadcurl::polycore::{poincare, Shape, VectorField};
use quadcurl::solver::SolverKind;
use quadcurl::spaces::{supported, supported_combinations, Family, LocalFrame};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random cells per combination in the unisolvence check.
const RANDOM_CELLS: usize = 10;
/// Random polynomial samples per combination in the commuting check.
const COMMUTING_SAMPLES: usize = 20;
/// Largest mesh on which exact global ranks are computed.
const MAX_EXACT_N: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Unisolvence,
    Exactness,
    Commuting,
    Appendix,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    New,
    Mid,
    High,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Tri,
    Rect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Direct,
    Cg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutArg {
    Csv,
    Md,
}

/// Quad-curl finite elements: algebraic checks and convergence studies.
#[derive(Parser, Debug)]
#[command(name = "quadcurl", version)]
#[command(group(ArgGroup::new("mode").required(true).args(["study", "check"])))]
struct Args {
    /// Run a convergence study on the manufactured solution.
    #[arg(long)]
    study: bool,
    /// Run an algebraic check.
    #[arg(long, value_enum)]
    check: Option<Check>,
    /// Run the check over every supported family, shape and degree.
    #[arg(long)]
    all: bool,
    #[arg(long, value_enum, default_value = "new")]
    family: FamilyArg,
    #[arg(long, value_enum, default_value = "tri")]
    shape: ShapeArg,
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Mesh sizes (cells per side), comma separated. Studies default to
    /// 20,40,80,160; mesh checks default to 1,2.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Gauss points per direction.
    #[arg(long)]
    quad: Option<usize>,
    #[arg(long, value_enum, default_value = "direct")]
    solver: SolverArg,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Study output defaults to csv; checks print text, or key=value
    /// records with `--out csv`.
    #[arg(long, value_enum)]
    out: Option<OutArg>,
    /// Seed for the random cells and samples of the checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    path: Option<std::path::PathBuf>,
}

impl Args {
    fn family(&self) -> Family {
        match self.family {
            FamilyArg::New => Family::New,
            FamilyArg::Mid => Family::Mid,
            FamilyArg::High => Family::High,
        }
    }

    fn shape(&self) -> Shape {
        match self.shape {
            ShapeArg::Tri => Shape::Triangle,
            ShapeArg::Rect => Shape::Rectangle,
        }
    }

    fn solver(&self) -> SolverKind {
        match self.solver {
            SolverArg::Direct => SolverKind::Direct,
            SolverArg::Cg => SolverKind::Cg,
        }
    }
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<quadcurl::Error> for Failure {
    fn from(e: quadcurl::Error) -> Self {
        match e {
            quadcurl::Error::Unsupported(_) | quadcurl::Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

fn emit(args: &Args, text: &str) -> Result<(), Failure> {
    match &args.path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Check(e.to_string()))
        }
    }
}

fn run_study(args: &Args) -> Result<(), Failure> {
    let ns = args.n.clone().unwrap_or_else(|| vec![20, 40, 80, 160]);
    let mut cfg = RunConfig::new(args.family(), args.shape(), args.k, ns);
    cfg.quad_points = args.quad;
    cfg.solver = args.solver();
    cfg.tol = args.tol;
    let report = convergence_study_with(&cfg, |row| {
        eprintln!(
            "h = 1/{:<4} dofs = {:<8} residual = {:.2e} l2 = {:.6e} curl = {:.6e} curl2 = {:.6e}",
            row.n, row.dofs, row.residual, row.norms.l2, row.norms.curl, row.norms.curl2
        );
    })?;
    let text = match args.out.unwrap_or(OutArg::Csv) {
        OutArg::Csv => report.to_csv(),
        OutArg::Md => report.to_markdown(),
    };
    emit(args, &text)
}

fn combinations(args: &Args) -> Result<Vec<(Family, Shape, u32)>, Failure> {
    if args.all {
        return Ok(supported_combinations());
    }
    if !supported(args.shape(), args.k) {
        return Err(Failure::Usage(format!("k = {} is not supported on {}", args.k, args.shape())));
    }
    Ok(vec![(args.family(), args.shape(), args.k)])
}

/// Collected output of a check run.
#[derive(Default)]
struct CheckOutput {
    text: String,
    failures: usize,
}

impl CheckOutput {
    fn line(&mut self, ok: bool, text: String) {
        if !ok {
            self.failures += 1;
        }
        self.text.push_str(&text);
        if !text.ends_with('\n') {
            self.text.push('\n');
        }
    }
}

fn check_unisolvence(args: &Args, out: &mut CheckOutput) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for (family, shape, k) in combinations(args)? {
        let mut failed = Vec::new();
        if let Err(e) = ElementTriple::new(family, k, &reference_frame(shape)) {
            failed.push(format!("reference cell: {e}"));
        }
        for i in 0..RANDOM_CELLS {
            let frame = LocalFrame::standard(random_cell(&mut rng, shape));
            if let Err(e) = ElementTriple::new(family, k, &frame) {
                failed.push(format!("random cell {i}: {e}"));
            }
        }
        let ok = failed.is_empty();
        out.line(
            ok,
            format!(
                "unisolvence: {family} family, {shape}, k = {k}: reference and {RANDOM_CELLS} random cells: {}{}",
                if ok { "pass" } else { "FAIL" },
                failed.iter().map(|f| format!("\n  {f}")).collect::<String>()
            ),
        );
    }
    Ok(())
}

fn check_meshes(args: &Args) -> Result<Vec<usize>, Failure> {
    let ns = args.n.clone().unwrap_or_else(|| vec![1, 2]);
    if let Some(n) = ns.iter().find(|&&n| n == 0 || n > MAX_EXACT_N) {
        return Err(Failure::Usage(format!("exact checks need 1 <= n <= {MAX_EXACT_N}, got {n}")));
    }
    Ok(ns)
}

fn check_exactness(args: &Args, out: &mut CheckOutput) -> Result<(), Failure> {
    let records = args.out == Some(OutArg::Csv);
    let ns = check_meshes(args)?;
    for (family, shape, k) in combinations(args)? {
        let mut reports = vec![check_local(family, k, &reference_frame(shape))?];
        for &n in &ns {
            reports.push(check_global(&uniform_mesh(shape, n)?, family, k)?);
        }
        for r in reports {
            out.line(r.is_exact(), if records { r.to_records() } else { r.to_text() });
        }
    }
    Ok(())
}

fn check_commuting(args: &Args, out: &mut CheckOutput) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let ns = check_meshes(args)?;
    for (family, shape, k) in combinations(args)? {
        let scalars: Vec<_> = (0..COMMUTING_SAMPLES).map(|i| random_polynomial(&mut rng, 1 + (i as u32 % 4))).collect();
        let vectors: Vec<VectorField> = (0..COMMUTING_SAMPLES)
            .map(|i| {
                let d = i as u32 % 4;
                if i % 2 == 0 {
                    poincare(&random_polynomial(&mut rng, d))
                } else {
                    VectorField::new(random_polynomial(&mut rng, d), random_polynomial(&mut rng, d))
                }
            })
            .collect();
        for &n in &ns {
            let r = check_commuting_global(&uniform_mesh(shape, n)?, family, k, &scalars, &vectors)?;
            out.line(r.passed(), format!("n = {n}: {}", r.to_text()));
        }
    }
    Ok(())
}

fn check_appendix_lists(out: &mut CheckOutput) -> Result<(), Failure> {
    for shape in [Shape::Rectangle, Shape::Triangle] {
        let r = check_appendix(shape)?;
        out.line(r.passed(), r.to_text());
    }
    Ok(())
}

fn run_check(args: &Args, check: Check) -> Result<(), Failure> {
    let mut out = CheckOutput::default();
    match check {
        Check::Unisolvence => check_unisolvence(args, &mut out)?,
        Check::Exactness => check_exactness(args, &mut out)?,
        Check::Commuting => check_commuting(args, &mut out)?,
        Check::Appendix => check_appendix_lists(&mut out)?,
        Check::All => {
            check_unisolvence(args, &mut out)?;
            check_exactness(args, &mut out)?;
            check_commuting(args, &mut out)?;
            check_appendix_lists(&mut out)?;
        }
    }
    emit(args, &out.text)?;
    if out.failures > 0 {
        return Err(Failure::Check(format!("{} check(s) failed", out.failures)));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match args.check {
        Some(c) => run_check(&args, c),
        None => run_study(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
    }
}

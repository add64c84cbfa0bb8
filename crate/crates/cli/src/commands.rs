use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use swg_core::analysis::{
    build_system, convergence_table, dmp_check, has_reaction, mesh_for_spacing, Discretization,
    DmpReport, RunOptions,
};
use swg_core::assembly::SparseSystem;
use swg_core::fd::check_equivalence;
use swg_core::mesh::TensorMesh;
use swg_core::problems::{get_problem, ProblemId, ProblemSpec};
use swg_core::report::{convergence_csv, convergence_text, sci3};
use swg_core::solver;
use swg_core::SwgError;

use crate::args::{CommonArgs, DmpArgs, EquivArgs, FdArgs, Format, OutputArgs, RunArgs};

/// Largest accepted entrywise matrix difference in `equiv`.
pub const EQUIV_MATRIX_TOL: f64 = 1e-13;

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an invalid configuration (exit 2).
    Usage(String),
    /// A solve or a verification failed (exit 1).
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

impl From<SwgError> for CliError {
    fn from(e: SwgError) -> Self {
        match e {
            SwgError::SingularMatrix(_)
            | SwgError::NoConvergence { .. }
            | SwgError::ResidualCheckFailed { .. }
            | SwgError::DimensionMismatch { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn emit(output: &OutputArgs, text: &str) -> CliResult<()> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// `path` itself for a single mesh, otherwise `stem.<label>.ext`.
fn dump_path(path: &Path, label: &str, several: bool) -> PathBuf {
    if !several {
        return path.to_path_buf();
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{label}"),
    };
    path.with_file_name(name)
}

fn dump_matrix(path: &Path, system: &SparseSystem, label: &str, several: bool) -> CliResult<()> {
    let target = dump_path(path, label, several);
    let file = fs::File::create(&target)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", target.display())))?;
    system.matrix.write_coordinate(io::BufWriter::new(file))?;
    log::info!("wrote matrix to {}", target.display());
    Ok(())
}

fn convergence(
    problem: &ProblemSpec,
    opts: &RunOptions,
    ns: &[usize],
    common: &CommonArgs,
    title: &str,
) -> CliResult<()> {
    let rows = convergence_table(problem, opts, ns)?;
    if let Some(path) = &common.dump_matrix {
        for &n in ns {
            let mesh = mesh_for_spacing(problem.domain, n)?;
            let system = build_system(problem, &mesh, opts)?;
            dump_matrix(path, &system, &format!("n{n}"), ns.len() > 1)?;
        }
    }
    let text = match common.output.format {
        Format::Text => convergence_text(title, &rows),
        Format::Csv => convergence_csv(&rows),
    };
    emit(&common.output, &text)
}

pub fn run(args: &RunArgs) -> CliResult<()> {
    let problem = args.problem.resolve()?;
    let opts = args.common.run_options(Discretization::Swg, args.kappa);
    let title = format!("SWG, problem {}, kappa = {}", problem.id, args.kappa);
    convergence(&problem, &opts, &args.ns, &args.common, &title)
}

pub fn fd(args: &FdArgs) -> CliResult<()> {
    let problem = args.problem.resolve()?;
    let (method, title) = if args.scheme == "5" {
        (Discretization::Fd5, format!("FD5, problem {}", problem.id))
    } else {
        let t = format!("FD7, problem {}, kappa = {}", problem.id, args.kappa);
        (Discretization::Fd7, t)
    };
    let opts = args.common.run_options(method, args.kappa);
    convergence(&problem, &opts, &args.ns, &args.common, &title)
}

struct DmpRow {
    mesh: String,
    kappa: f64,
    report: DmpReport,
    argmax: String,
}

fn default_method(problem: &ProblemSpec) -> Discretization {
    match problem.id {
        ProblemId::Fd1 | ProblemId::Fd2 => Discretization::Fd7,
        _ => Discretization::Swg,
    }
}

pub fn dmp(args: &DmpArgs) -> CliResult<bool> {
    let problem = args.problem.resolve()?;
    let method = args
        .method
        .map(Discretization::from)
        .unwrap_or_else(|| default_method(&problem));
    let meshes: Vec<(String, TensorMesh)> = match (&args.x_breaks, &args.y_breaks) {
        (Some(xb), Some(yb)) => {
            let mesh = TensorMesh::new(xb.clone(), yb.clone())?;
            vec![(format!("{}x{}", mesh.nx(), mesh.ny()), mesh)]
        }
        _ => args
            .ns
            .iter()
            .map(|&n| Ok((n.to_string(), mesh_for_spacing(problem.domain, n)?)))
            .collect::<swg_core::Result<_>>()?,
    };
    let several = meshes.len() * args.kappa.len() > 1;
    let mut rows = Vec::new();
    for &kappa in &args.kappa {
        let opts = args.common.run_options(method, kappa);
        for (label, mesh) in &meshes {
            let system = build_system(&problem, mesh, &opts)?;
            if let Some(path) = &args.common.dump_matrix {
                dump_matrix(path, &system, &format!("n{label}.k{kappa}"), several)?;
            }
            let sol = solver::solve(&system, &opts.solver)?;
            let report = dmp_check(&sol.values, mesh, has_reaction(&problem, mesh))?;
            let argmax = (0..mesh.num_edges())
                .filter(|&id| !mesh.edge(id).is_boundary)
                .max_by(|&a, &b| sol.values[a].total_cmp(&sol.values[b]).then(b.cmp(&a)))
                .map(|id| mesh.edge(id).half_index_label())
                .unwrap_or_else(|| "-".into());
            rows.push(DmpRow {
                mesh: label.clone(),
                kappa,
                report,
                argmax,
            });
        }
    }
    let method_name = match method {
        Discretization::Swg => "SWG",
        Discretization::Fd5 => "FD5",
        Discretization::Fd7 => "FD7",
    };
    let text = match args.common.output.format {
        Format::Text => dmp_text(
            &format!("DMP, {method_name}, problem {}", problem.id),
            &rows,
        ),
        Format::Csv => dmp_csv(&rows),
    };
    emit(&args.common.output, &text)?;
    Ok(rows.iter().all(|r| r.report.satisfied))
}

fn dmp_text(title: &str, rows: &[DmpRow]) -> String {
    let mut out = format!("{title}\n");
    let head = [
        "mesh",
        "kappa",
        "boundary max",
        "interior max",
        "bound",
        "margin",
        "argmax",
        "ok",
    ];
    writeln!(
        out,
        "{:>6}  {:>6}  {:>12}  {:>12}  {:>10}  {:>10}  {:>14}  {:>3}",
        head[0], head[1], head[2], head[3], head[4], head[5], head[6], head[7]
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{:>6}  {:>6}  {:>12}  {:>12}  {:>10}  {:>10}  {:>14}  {:>3}",
            r.mesh,
            r.kappa,
            sci3(r.report.boundary_max),
            sci3(r.report.interior_max),
            sci3(r.report.bound()),
            sci3(r.report.margin),
            r.argmax,
            if r.report.satisfied { "yes" } else { "no" }
        )
        .unwrap();
    }
    out
}

fn dmp_csv(rows: &[DmpRow]) -> String {
    let mut out = String::from(
        "mesh,kappa,boundary_max,interior_max,clipped_boundary_max,c_nonneg,satisfied,margin\n",
    );
    for r in rows {
        let d = &r.report;
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
            r.mesh,
            r.kappa,
            d.boundary_max,
            d.interior_max,
            d.clipped_boundary_max,
            d.c_nonneg,
            d.satisfied,
            d.margin
        )
        .unwrap();
    }
    out
}

pub fn equiv(args: &EquivArgs) -> CliResult<bool> {
    let mut reports = Vec::new();
    for &kappa in &args.kappa {
        for &n in &args.n {
            reports.push(check_equivalence(n, kappa)?);
        }
    }
    let mut out = String::new();
    match args.output.format {
        Format::Text => {
            writeln!(out, "SWG vs FD7 on problem fd1").unwrap();
            writeln!(
                out,
                "{:>6}  {:>6}  {:>11}  {:>10}  {:>10}  {:>3}",
                "n", "kappa", "matrix diff", "rhs diff", "rhs tol", "ok"
            )
            .unwrap();
            for r in &reports {
                writeln!(
                    out,
                    "{:>6}  {:>6}  {:>11}  {:>10}  {:>10}  {:>3}",
                    r.n,
                    r.kappa,
                    sci3(r.matrix_diff),
                    sci3(r.rhs_diff),
                    sci3(r.rhs_tolerance),
                    if r.holds(EQUIV_MATRIX_TOL) {
                        "yes"
                    } else {
                        "no"
                    }
                )
                .unwrap();
            }
        }
        Format::Csv => {
            out.push_str("n,kappa,matrix_diff,rhs_diff,rhs_tolerance,holds\n");
            for r in &reports {
                writeln!(
                    out,
                    "{},{},{:.16e},{:.16e},{:.16e},{}",
                    r.n,
                    r.kappa,
                    r.matrix_diff,
                    r.rhs_diff,
                    r.rhs_tolerance,
                    r.holds(EQUIV_MATRIX_TOL)
                )
                .unwrap();
            }
        }
    }
    emit(&args.output, &out)?;
    Ok(reports.iter().all(|r| r.holds(EQUIV_MATRIX_TOL)))
}

pub fn list_problems() -> CliResult<()> {
    let mut out = String::new();
    for id in ProblemId::BUILT_IN {
        let p = get_problem(id)?;
        let d = p.domain;
        writeln!(
            out,
            "{id}  ({}, {}) x ({}, {})  {}",
            d.x0, d.x1, d.y0, d.y1, p.summary
        )
        .unwrap();
    }
    writeln!(
        out,
        "custom  --domain x0,x1,y0,y1  constant coefficients via --alpha --beta --c --f --g"
    )
    .unwrap();
    print!("{out}");
    Ok(())
}

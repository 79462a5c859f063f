//! `drumcorners`: command-line front end for the spectral-geometry library.
//!
//! Every invocation writes a `run.json` manifest (arguments, input hashes,
//! tolerances, outputs) into the output directory so results are
//! reproducible from the manifest alone.

use clap::{Args, Parser, Subcommand};
use drums::eigensolve::{eigs_disk, eigs_fem, Mesh};
use drums::geometry::{
    load_domain_spec, resolve_preset, BoundaryCondition, Domain, LocalityScenario, Sector,
};
use drums::harness::{
    default_t_grid, emit_plot_data, locality_study, run_experiment, ExperimentConfig,
    ExperimentReport,
};
use drums::sector::{green_sector, heat_sector, SectorPoint};
use drums::specfun::{InverseLaplaceParams, QuadratureBudget};
use drums::trace::{
    classify_corners, fit_trace_expansion, polygon_trace_coeffs, smooth_trace_coeffs,
    ClassifyInput, KnownGeometry, Spectrum, SpectrumSource,
};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "drumcorners", version, about = "heat kernels, spectra, and corner detection for planar domains")]
struct Cli {
    /// Output directory for CSV/JSON artifacts and the run manifest
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Relative tolerance knob for quadrature / fitting
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Worker threads (0 = rayon default)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed recorded in the manifest (all computations are deterministic)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BcArgs {
    /// Boundary condition: dirichlet | neumann | robin
    #[arg(long, default_value = "dirichlet")]
    bc: String,
    /// Robin alpha (with --bc robin)
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Robin beta (with --bc robin)
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

impl BcArgs {
    fn resolve(&self) -> Result<BoundaryCondition, CliError> {
        match self.bc.as_str() {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            "robin" => BoundaryCondition::robin(self.alpha, self.beta)
                .map_err(|e| CliError::BadInput(e.to_string())),
            other => Err(CliError::BadInput(format!(
                "unknown boundary condition '{other}' (expected dirichlet|neumann|robin)"
            ))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute Laplace eigenvalues of a domain (closed form or FEM)
    Eigs {
        /// Domain-spec JSON path or preset name (square, disk, equilateral, gww1, gww2)
        #[arg(long)]
        domain: String,
        #[command(flatten)]
        bc: BcArgs,
        #[arg(long)]
        count: usize,
        /// FEM target mesh size for polygonal domains
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        /// Also write the FEM mesh as JSON
        #[arg(long)]
        emit_mesh: Option<PathBuf>,
    },
    /// Closed-form heat-trace expansion coefficients of a domain
    TraceCoeffs {
        #[arg(long)]
        domain: String,
        #[command(flatten)]
        bc: BcArgs,
    },
    /// Fit the trace expansion to a spectrum CSV (header `lambda`)
    FitTrace {
        #[arg(long)]
        spectrum: PathBuf,
        /// Pin the two leading coefficients to these Weyl values
        #[arg(long)]
        area: Option<f64>,
        #[arg(long)]
        perimeter: Option<f64>,
        #[command(flatten)]
        bc: BcArgs,
        #[arg(long, default_value_t = 2e-4)]
        t_min: f64,
        #[arg(long, default_value_t = 5e-3)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        t_points: usize,
    },
    /// Polygonal-vs-smooth verdict from a spectrum CSV
    Classify {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        area: f64,
        #[arg(long)]
        perimeter: f64,
        #[arg(long, default_value_t = 1)]
        euler_char: i32,
        #[command(flatten)]
        bc: BcArgs,
        #[arg(long, default_value_t = 2e-4)]
        t_min: f64,
        #[arg(long, default_value_t = 5e-3)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        t_points: usize,
    },
    /// Sector resolvent Green's function at one configuration
    SectorGreen {
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        bc: BcArgs,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        phi0: f64,
    },
    /// Sector heat kernel at one configuration
    SectorHeat {
        #[arg(long)]
        gamma: f64,
        #[command(flatten)]
        bc: BcArgs,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        phi0: f64,
    },
    /// Locality-decay study from a scenario JSON
    Locality {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 21)]
        density: usize,
    },
    /// Run a full experiment from a config JSON
    Run {
        config: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    /// malformed input / config: exit code 2
    BadInput(String),
    /// runtime failure: exit code 1
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::BadInput(m) | CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self { CliError::Runtime(e.to_string()) }
        }
    )*};
}
runtime_from!(
    drums::eigensolve::EigenError,
    drums::trace::TraceError,
    drums::sector::SectorError,
    drums::harness::HarnessError,
    std::io::Error
);

struct Manifest {
    command: String,
    argv: Vec<String>,
    inputs: Vec<(String, String)>,
    outputs: Vec<String>,
    tol: f64,
    seed: u64,
    threads: usize,
}

impl Manifest {
    fn new(cli: &Cli) -> Manifest {
        let argv: Vec<String> = std::env::args().collect();
        let command = match &cli.command {
            Command::Eigs { .. } => "eigs",
            Command::TraceCoeffs { .. } => "trace-coeffs",
            Command::FitTrace { .. } => "fit-trace",
            Command::Classify { .. } => "classify",
            Command::SectorGreen { .. } => "sector-green",
            Command::SectorHeat { .. } => "sector-heat",
            Command::Locality { .. } => "locality",
            Command::Run { .. } => "run",
        };
        Manifest {
            command: command.into(),
            argv,
            inputs: Vec::new(),
            outputs: Vec::new(),
            tol: cli.tol,
            seed: cli.seed,
            threads: cli.threads,
        }
    }

    fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", path.display())))?;
        let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
        self.inputs.push((path.display().to_string(), hash));
        Ok(text)
    }

    fn write_output(&mut self, dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        fs::write(&path, content)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn finish(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        let manifest = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "argv": self.argv,
            "inputs": self.inputs.iter().map(|(p, h)| json!({"path": p, "sha256": h})).collect::<Vec<_>>(),
            "outputs": self.outputs,
            "tol": self.tol,
            "seed": self.seed,
            "threads": self.threads,
        });
        fs::write(dir.join("run.json"), serde_json::to_string_pretty(&manifest).unwrap() + "\n")?;
        Ok(())
    }
}

fn load_domain(manifest: &mut Manifest, spec: &str) -> Result<Domain, CliError> {
    if Path::new(spec).exists() {
        let text = manifest.read_input(Path::new(spec))?;
        load_domain_spec(&text).map_err(|e| CliError::BadInput(e.to_string()))
    } else {
        resolve_preset(spec, None).map_err(|e| CliError::BadInput(e.to_string()))
    }
}

fn read_spectrum_csv(manifest: &mut Manifest, path: &Path) -> Result<Spectrum, CliError> {
    let text = manifest.read_input(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "lambda" => {}
        _ => return Err(CliError::BadInput("spectrum CSV must start with header 'lambda'".into())),
    }
    let eigs: Vec<f64> = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::BadInput(format!("bad eigenvalue line: {e}")))?;
    let cutoff = eigs.last().copied().unwrap_or(0.0);
    Spectrum::new(eigs, cutoff, SpectrumSource::ClosedForm)
        .map_err(|e| CliError::BadInput(e.to_string()))
}

fn spectrum_csv(spec: &Spectrum) -> String {
    let mut s = String::from("lambda\n");
    for l in &spec.eigenvalues {
        s.push_str(&format!("{l}\n"));
    }
    s
}

fn mesh_json(mesh: &Mesh) -> String {
    serde_json::to_string_pretty(&json!({
        "vertices": mesh.vertices,
        "triangles": mesh.triangles,
        "boundary_edges": mesh.boundary_edges.iter().map(|(e, len)| json!({"vertices": e, "length": len})).collect::<Vec<_>>(),
        "h": mesh.h,
    }))
    .unwrap()
}

fn t_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(t_min > 0.0 && t_max > t_min && n >= 3) {
        return Err(CliError::BadInput("need 0 < t_min < t_max and >= 3 grid points".into()));
    }
    Ok((0..n)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (n - 1) as f64)
        .collect())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    let mut manifest = Manifest::new(cli);
    let out = cli.out.clone();
    match &cli.command {
        Command::Eigs { domain, bc, count, h, emit_mesh } => {
            let bc = bc.resolve()?;
            let dom = load_domain(&mut manifest, domain)?;
            let spectrum = match &dom {
                Domain::Smooth(drums::geometry::SmoothDomain::Disk { radius }) => {
                    eigs_disk(*radius, bc, *count)?
                }
                Domain::Smooth(_) => {
                    return Err(CliError::BadInput(
                        "closed-form eigenvalues are implemented for disks only".into(),
                    ))
                }
                Domain::Polygonal(p) => {
                    let res = eigs_fem(p, bc, *h, *count)?;
                    if let Some(mesh_path) = emit_mesh {
                        let refinements = mesh_refinements_for(p, *h)?;
                        let mesh = Mesh::from_polygon(p, refinements)?;
                        fs::write(mesh_path, mesh_json(&mesh))?;
                        manifest.outputs.push(mesh_path.display().to_string());
                    }
                    eprintln!("fem: h = {}, {} dofs", res.h_used, res.dofs);
                    res.spectrum
                }
                Domain::Sectorial(_) => {
                    return Err(CliError::BadInput(
                        "eigs needs a bounded domain (polygon or disk)".into(),
                    ))
                }
            };
            manifest.write_output(&out, "spectrum.csv", &spectrum_csv(&spectrum))?;
            println!("{} eigenvalues written", spectrum.eigenvalues.len());
        }
        Command::TraceCoeffs { domain, bc } => {
            let bc = bc.resolve()?;
            let dom = load_domain(&mut manifest, domain)?;
            let exp = match &dom {
                Domain::Polygonal(p) => polygon_trace_coeffs(p, bc)?,
                Domain::Smooth(s) => smooth_trace_coeffs(s, bc)?,
                Domain::Sectorial(_) => {
                    return Err(CliError::BadInput("trace-coeffs needs a bounded domain".into()))
                }
            };
            let text = serde_json::to_string_pretty(&exp).unwrap() + "\n";
            manifest.write_output(&out, "trace_coeffs.json", &text)?;
            print!("{text}");
        }
        Command::FitTrace { spectrum, area, perimeter, bc, t_min, t_max, t_points } => {
            let bc = bc.resolve()?;
            let spec = read_spectrum_csv(&mut manifest, spectrum)?;
            let grid = t_grid(*t_min, *t_max, *t_points)?;
            let known = match (area, perimeter) {
                (Some(a), Some(p)) => Some(KnownGeometry { area: *a, perimeter: *p, bc }),
                (None, None) => None,
                _ => {
                    return Err(CliError::BadInput(
                        "--area and --perimeter must be given together".into(),
                    ))
                }
            };
            let fit = fit_trace_expansion(&spec, &grid, known, cli.tol.max(1e-10))?;
            let text = serde_json::to_string_pretty(&fit).unwrap() + "\n";
            manifest.write_output(&out, "trace_fit.json", &text)?;
            print!("{text}");
        }
        Command::Classify { spectrum, area, perimeter, euler_char, bc, t_min, t_max, t_points } => {
            let bc = bc.resolve()?;
            let spec = read_spectrum_csv(&mut manifest, spectrum)?;
            let grid = t_grid(*t_min, *t_max, *t_points)?;
            let known = ClassifyInput {
                area: *area,
                perimeter: *perimeter,
                euler_char: *euler_char,
                bc,
            };
            let verdict = classify_corners(&spec, &known, &grid, cli.tol.max(1e-10))?;
            let text = serde_json::to_string_pretty(&verdict).unwrap() + "\n";
            manifest.write_output(&out, "classification.json", &text)?;
            print!("{text}");
        }
        Command::SectorGreen { gamma, bc, s, r, phi, r0, phi0 } => {
            let bc = bc.resolve()?;
            check_sector_bc(bc)?;
            let sector = Sector::new(*gamma, bc).map_err(|e| CliError::BadInput(e.to_string()))?;
            let budget = QuadratureBudget { rel_tol: cli.tol.max(1e-12), ..Default::default() };
            let v = green_sector(
                *s,
                &sector,
                SectorPoint { r: *r, phi: *phi },
                SectorPoint { r: *r0, phi: *phi0 },
                &budget,
            )?;
            let csv = format!(
                "s,r,phi,r0,phi0,value,tail_bound\n{s},{r},{phi},{r0},{phi0},{v},{}\n",
                budget.abs_tol
            );
            manifest.write_output(&out, "sector_green.csv", &csv)?;
            print!("{csv}");
        }
        Command::SectorHeat { gamma, bc, t, r, phi, r0, phi0 } => {
            let bc = bc.resolve()?;
            check_sector_bc(bc)?;
            let sector = Sector::new(*gamma, bc).map_err(|e| CliError::BadInput(e.to_string()))?;
            let budget = QuadratureBudget { rel_tol: cli.tol.max(1e-12), ..Default::default() };
            let il = InverseLaplaceParams::default();
            let v = heat_sector(
                *t,
                &sector,
                SectorPoint { r: *r, phi: *phi },
                SectorPoint { r: *r0, phi: *phi0 },
                &budget,
                &il,
            )?;
            let csv = format!(
                "t,r,phi,r0,phi0,value,tail_bound\n{t},{r},{phi},{r0},{phi0},{v},{}\n",
                il.consistency_rel * v.abs()
            );
            manifest.write_output(&out, "sector_heat.csv", &csv)?;
            print!("{csv}");
        }
        Command::Locality { config, density } => {
            let text = manifest.read_input(config)?;
            let scenario: LocalityScenario = serde_json::from_str(&text)
                .map_err(|e| CliError::BadInput(format!("bad scenario config: {e}")))?;
            scenario.validate().map_err(|e| CliError::BadInput(e.to_string()))?;
            let report = locality_study(&scenario, &default_t_grid(), *density)?;
            let csv = emit_plot_data(&ExperimentReport::Locality(report.clone()));
            manifest.write_output(&out, "locality.csv", &csv)?;
            let text = serde_json::to_string_pretty(&report).unwrap() + "\n";
            manifest.write_output(&out, "locality.json", &text)?;
            print!("{text}");
        }
        Command::Run { config } => {
            let text = manifest.read_input(config)?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::BadInput(format!("bad experiment config: {e}")))?;
            let report = run_experiment(&cfg)?;
            let csv = emit_plot_data(&report);
            manifest.write_output(&out, "report.json", &(serde_json::to_string_pretty(&report).unwrap() + "\n"))?;
            manifest.write_output(&out, "plot.csv", &csv)?;
            match &report {
                ExperimentReport::SquareConstantTerm { c0_fitted, c0_expected, .. } => {
                    println!("fitted c_0 = {c0_fitted:.6} (expected {c0_expected:.6})");
                }
                ExperimentReport::GwwIsospectral {
                    max_pairwise_rel,
                    isospectral_within_fem_error,
                    verdicts,
                    ..
                } => {
                    println!(
                        "max pairwise relative disagreement: coarse {:.3e}, fine {:.3e}",
                        max_pairwise_rel[0], max_pairwise_rel[1]
                    );
                    println!("verdicts: drum1 {}, drum2 {}", verdicts[0], verdicts[1]);
                    if *isospectral_within_fem_error {
                        println!("isospectral within FEM error");
                    } else {
                        println!("NOT isospectral within FEM error");
                    }
                }
                ExperimentReport::Locality(r) => {
                    println!("decay fit: c = {:.4}, r^2 = {:.5}", r.c, r.r_squared);
                }
            }
        }
    }
    manifest.finish(&out)
}

fn check_sector_bc(bc: BoundaryCondition) -> Result<(), CliError> {
    if let BoundaryCondition::Robin { alpha, beta } = bc {
        if beta == 0.0 || alpha / beta < 0.0 {
            return Err(CliError::BadInput(
                "sector Robin conditions are restricted to alpha/beta >= 0".into(),
            ));
        }
    }
    Ok(())
}

fn mesh_refinements_for(p: &drums::geometry::Polygon, h_target: f64) -> Result<usize, CliError> {
    for refinements in 0..=10 {
        let mesh = Mesh::from_polygon(p, refinements)?;
        if mesh.h <= h_target || refinements == 10 {
            return Ok(refinements);
        }
    }
    unreachable!()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::BadInput(m)) => {
            eprintln!("{}", json!({"error": "bad_input", "message": m}));
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("{}", json!({"error": "runtime", "message": m}));
            ExitCode::FAILURE
        }
    }
}

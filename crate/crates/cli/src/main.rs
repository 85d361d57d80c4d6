//! `spaceform` command-line driver.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use spaceform::catalog::ImmersionId;
use spaceform::export::{beta_csv, curvature_csv, generated_lattice, leaf_csv, sample_immersion, Lattice, SampleSpec};
use spaceform::leafspace::{leaf_classify, sample_leaf, LeafTopology};
use spaceform::report::{Check, Report};
use spaceform::suites::{criterion, generated_curvature_records, generated_surface_checks, surface_suite, SuiteConfig};
use spaceform::GeomError;

#[derive(Parser, Debug)]
#[command(name = "spaceform", version, about = "Rank-two constant scalar curvature hypersurfaces: sampling, checks and export")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the checks for one catalog immersion, every immersion, or an acceptance criterion.
    Verify {
        /// Catalog tag, e.g. rot_polar, veronese, fhat_c.
        #[arg(long, conflicts_with = "all")]
        surface: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<i32>,
        /// Every catalog immersion (both signs where applicable).
        #[arg(long)]
        all: bool,
        /// Acceptance criterion number (1-9); may be repeated.
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a level set of the first integral and sample it.
    Leaf {
        #[arg(long, allow_hyphen_values = true)]
        c: i32,
        /// Level R in (0, 4/27).
        #[arg(long = "R")]
        level: f64,
        /// Grid points per axis over (u1, u2).
        #[arg(long, default_value_t = 41)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        span: f64,
        /// Point cloud CSV (u0,u1,u2,L).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a polar surface on a leaf of level R and check it.
    Generate {
        #[arg(long, allow_hyphen_values = true)]
        c: i32,
        #[arg(long = "R")]
        level: f64,
        #[arg(long, default_value_t = 30)]
        patch: usize,
        #[arg(long, value_enum)]
        export: Option<Format>,
        /// Output directory for mesh, CSV and report files.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Sample a catalog immersion, or the profile curve, to mesh/CSV files.
    Export {
        /// Catalog tag, or `beta` for the profile curve.
        #[arg(long)]
        surface: String,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<i32>,
        /// Lattice size as ROWSxCOLS.
        #[arg(long, default_value = "40x40")]
        grid: String,
        /// Values of the leading parameters of a hypersurface, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        fixed: Vec<f64>,
        #[arg(long, default_value_t = 0.02)]
        crease_band: f64,
        #[arg(long, value_enum, default_value = "obj")]
        format: Format,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Obj,
    Ply,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Obj => "obj",
            Format::Ply => "ply",
            Format::Csv => "csv",
        }
    }

    fn render(self, l: &Lattice) -> String {
        match self {
            Format::Obj => l.to_obj(),
            Format::Ply => l.to_ply(),
            Format::Csv => l.to_csv(),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn write(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn finish(report: Report, out: Option<&Path>) -> Result<bool, Failure> {
    for c in &report.checks {
        println!("{}", c.summary());
    }
    for n in &report.notes {
        println!("note: {n}");
    }
    if let Some(p) = out {
        report.write(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(report.all_pass())
}

fn all_immersions() -> Vec<ImmersionId> {
    let mut out = Vec::new();
    for tag in ImmersionId::TAGS {
        match tag {
            "rot_polar" | "fhat_c" => {
                for c in [1, -1] {
                    out.push(ImmersionId::from_tag(tag, Some(c)).expect("catalog tag"));
                }
            }
            _ => out.push(ImmersionId::from_tag(tag, None).expect("catalog tag")),
        }
    }
    out
}

fn verify(surface: Option<String>, c: Option<i32>, all: bool, criteria: Vec<u8>, seed: u64, out: Option<PathBuf>) -> Result<bool, Failure> {
    let cfg = SuiteConfig { seed, ..SuiteConfig::default() };
    let ids = match (&surface, all) {
        (Some(tag), _) => vec![ImmersionId::from_tag(tag, c)?],
        (None, true) => all_immersions(),
        (None, false) => Vec::new(),
    };
    if ids.is_empty() && criteria.is_empty() {
        return Err(Failure::Usage("give --surface, --all or --criterion".into()));
    }
    let mut report = Report::new(
        "verify",
        json!({
            "surfaces": ids.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "criteria": criteria,
            "seed": seed,
            "base_grid": cfg.base_grid,
            "fibers": cfg.fibers,
            "patch": cfg.patch,
        }),
    );
    for id in ids {
        report.extend(surface_suite(id, &cfg));
    }
    for k in criteria {
        let r = criterion(k, &cfg).ok_or_else(|| Failure::Usage(format!("no criterion {k}")))?;
        report.extend(r.checks);
        report.notes.extend(r.notes);
    }
    finish(report, out.as_deref())
}

fn leaf(c: i32, level: f64, n: usize, span: f64, csv: Option<PathBuf>, out: Option<PathBuf>) -> Result<bool, Failure> {
    let topo = leaf_classify(level, c)?;
    let samples = sample_leaf(c, level, n, span)?;
    match topo {
        LeafTopology::PairOfPantsUnion { waist_radius } => println!("{} waist_radius={waist_radius:.12}", topo.tag()),
        LeafTopology::TwoCylinders => println!("{}", topo.tag()),
    }
    println!("{} points", samples.len());
    if let Some(p) = &csv {
        write(p, &leaf_csv(&samples))?;
    }
    let worst = samples.iter().map(|s| (s.l - level).abs()).fold(0.0, f64::max);
    let mut report = Report::new("leaf", json!({"c": c, "R": level, "n": n, "span": span, "topology": topo}));
    report.extend([
        Check::at_least("leaf sample is non-empty", "level sets of L are surfaces", samples.len() as f64, 1.0),
        Check::at_most("sampled points lie on the level set", "L is constant on leaves", worst, 1e-10),
    ]);
    finish(report, out.as_deref())
}

fn generate(c: i32, level: f64, patch: usize, export: Option<Format>, dir: PathBuf, seed: u64) -> Result<bool, Failure> {
    leaf_classify(level, c)?;
    let cfg = SuiteConfig { seed, patch, ..SuiteConfig::default() };
    fs::create_dir_all(&dir)?;
    let (checks, g) = generated_surface_checks(c, level, &cfg)?;
    let stem = format!("generated_c{c}_R{level}");
    let records = generated_curvature_records(&g, &cfg)?;
    write(&dir.join(format!("{stem}_curvature.csv")), &curvature_csv(&records))?;
    if let Some(f) = export {
        write(&dir.join(format!("{stem}.{}", f.ext())), &f.render(&generated_lattice(&g)))?;
    }
    let mut report = Report::new("generate", json!({"c": c, "R": level, "patch": patch, "seed": seed}));
    report.extend(checks);
    report.notes.extend(g.diagnostics.iter().cloned());
    report.notes.push(format!("{} of {} lattice nodes reached", g.node_count(), g.xs.len() * g.ys.len()));
    finish(report, Some(&dir.join(format!("{stem}_report.json"))))
}

fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("grid `{s}` is not ROWSxCOLS"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn export(surface: String, c: Option<i32>, grid: String, fixed: Vec<f64>, crease_band: f64, format: Format, out: PathBuf) -> Result<bool, Failure> {
    let (rows, cols) = parse_grid(&grid)?;
    if surface == "beta" {
        write(&out, &beta_csv(rows * cols))?;
        return Ok(true);
    }
    let id = ImmersionId::from_tag(&surface, c)?;
    let lattice = sample_immersion(id, &SampleSpec { rows, cols, fixed, crease_band })?;
    write(&out, &format.render(&lattice))?;
    println!("{} vertices, {} triangles -> {}", lattice.vertex_count(), lattice.triangles().len(), out.display());
    Ok(true)
}

fn configure_threads() {
    if let Some(n) = std::env::var("SPACEFORM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Ignored if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let res = match cli.command {
        Command::Verify { surface, c, all, criteria, seed, out } => verify(surface, c, all, criteria, seed, out),
        Command::Leaf { c, level, n, span, csv, out } => leaf(c, level, n, span, csv, out),
        Command::Generate { c, level, patch, export: fmt, dir, seed } => generate(c, level, patch, fmt, dir, seed),
        Command::Export { surface, c, grid, fixed, crease_band, format, out } => export(surface, c, grid, fixed, crease_band, format, out),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("io error: {m}");
            ExitCode::from(2)
        }
    }
}

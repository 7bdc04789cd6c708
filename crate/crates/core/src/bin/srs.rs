use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subriemann::report::{self, Format, PointSource, RunConfig, SymmetryOptions};
use subriemann::{selftest, Error, Settings};

#[derive(Parser)]
#[command(
    name = "srs",
    version,
    about = "Invariants, symmetries and singular surfaces of sub-Riemannian structures on 3-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// M, K and the symmetry determinant at each point.
    Invariants(Common),
    /// The symmetry system, its integrability residuals and optionally ln f.
    Symmetry {
        #[command(flatten)]
        common: Common,
        /// Integrate ln f from --base to every point.
        #[arg(long)]
        reconstruct: bool,
        #[arg(long, default_value = "0,0,0", allow_hyphen_values = true)]
        base: String,
        /// Intermediate polyline vertices, `;`-separated.
        #[arg(long, allow_hyphen_values = true)]
        via: Option<String>,
    },
    /// Σ-points on probe segments with their invariants.
    Singular(Common),
    /// Built-in fixtures against closed-form references.
    Selftest {
        #[command(flatten)]
        tols: Tolerances,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Common {
    /// The 1-form, e.g. "dz + y*dx - x*dy".
    #[arg(long)]
    omega: String,
    /// Six metric entries g11 g12 g13 g22 g23 g33 (lines, `;` or JSON).
    #[arg(long)]
    metric_file: Option<PathBuf>,
    /// Points "x,y,z", `;`-separated; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    points: Vec<String>,
    /// Grid "x=-1:1:5, y=-1:1:5, z=0".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Probe segment "x0,y0,z0 : x1,y1,z1"; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    probe: Vec<String>,
    #[command(flatten)]
    tols: Tolerances,
    /// jsonl or csv.
    #[arg(long, default_value = "jsonl")]
    format: String,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Tolerances {
    #[arg(long)]
    jet_order: Option<u8>,
    #[arg(long)]
    tol_contact: Option<f64>,
    #[arg(long)]
    tol_degenerate: Option<f64>,
    #[arg(long)]
    tol_root: Option<f64>,
    #[arg(long)]
    tol_quad: Option<f64>,
    #[arg(long)]
    tol_residual: Option<f64>,
}

impl Tolerances {
    fn settings(&self) -> Settings {
        let mut s = Settings::default();
        if let Some(n) = self.jet_order {
            s.jet_order = n;
        }
        let pairs = [
            (self.tol_contact, &mut s.eps_contact),
            (self.tol_degenerate, &mut s.eps_degenerate),
            (self.tol_root, &mut s.root_tol),
            (self.tol_quad, &mut s.quad_tol),
            (self.tol_residual, &mut s.residual_tol),
        ];
        for (v, slot) in pairs {
            if let Some(v) = v {
                *slot = v;
            }
        }
        s
    }
}

impl Common {
    fn config(&self) -> Result<RunConfig, Error> {
        let metric = match &self.metric_file {
            Some(path) => Some(
                std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            ),
            None => None,
        };
        let source = if !self.probe.is_empty() {
            PointSource::Probes(
                self.probe
                    .iter()
                    .map(|p| report::parse_probe(p))
                    .collect::<Result<_, _>>()?,
            )
        } else if let Some(g) = &self.grid {
            if !self.points.is_empty() {
                return Err(Error::Config("give either --points or --grid".into()));
            }
            PointSource::Grid(report::parse_grid(g)?)
        } else {
            let mut pts = Vec::new();
            for p in &self.points {
                pts.extend(report::parse_points(p)?);
            }
            PointSource::List(pts)
        };
        let mut cfg = RunConfig::new(&self.omega, metric.as_deref(), self.tols.settings(), source)?;
        cfg.format = self.format.parse()?;
        Ok(cfg)
    }

    fn sink(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn emit<T: serde::Serialize>(common: &Common, format: Format, items: &[T]) -> Result<(), Error> {
    let io_err = |e: io::Error| Error::Config(format!("output: {e}"));
    let mut sink = common.sink().map_err(io_err)?;
    report::write_reports(items, format, &mut sink).map_err(io_err)?;
    sink.flush().map_err(io_err)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Invariants(common) => {
            let cfg = common.config()?;
            emit(&common, cfg.format, &report::cmd_invariants(&cfg)?)?;
        }
        Command::Symmetry {
            common,
            reconstruct,
            base,
            via,
        } => {
            let cfg = common.config()?;
            let opts = SymmetryOptions {
                reconstruct_from: if reconstruct {
                    Some(report::parse_point(&base)?)
                } else {
                    None
                },
                via: match via {
                    Some(v) => report::parse_points(&v)?,
                    None => Vec::new(),
                },
            };
            emit(&common, cfg.format, &report::cmd_symmetry(&cfg, &opts)?)?;
        }
        Command::Singular(common) => {
            let cfg = common.config()?;
            emit(&common, cfg.format, &report::cmd_singular(&cfg)?)?;
        }
        Command::Selftest { tols, json } => {
            let settings = tols.settings();
            settings.validate()?;
            let summary = selftest::run(&settings);
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&summary).expect("summary serializes")
                );
            } else {
                println!("{summary}");
            }
            if !summary.passed {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("srs: {e}");
            ExitCode::from(1)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use lightcone::analyzer::{
    check_coherency_preservation, classify, degree, sample_coherent_pair, BlackBoxMap, CheckConfig,
    ClassifyConfig, SphereMesh, DEFAULT_SUBDIVISION,
};
use lightcone::degenerate::{build_default, validate_spec, ValidationConfig, EPSILON_BOUND};
use lightcone::hermitian::{event_to_herm, herm_to_event, Herm2};
use lightcone::seeds::SeedStream;
use lightcone::transforms::{
    random_similarity, LorentzMatrix, PoincareSimilarity, SimilarityBounds,
};
use lightcone::{Error as CoreError, Event64, TolerancePolicy64};
use lightcone_cli::report::classification_report;
use lightcone_cli::{MapFile, MapSpec, TableRow, TableRows};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "lightcone",
    version,
    about = "Analyze maps of Minkowski space that preserve light-like separation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated map spec to standard output.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check the separation conditions of a degenerate map spec.
    Validate {
        file: PathBuf,
        /// Total brute-force cross-patch samples.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Test whether a map sends coherent pairs to coherent pairs.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        pairs: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Half-width of the sampling box.
        #[arg(long, default_value_t = 10.0)]
        scale: f64,
    },
    /// Decide between similarity, degenerate, violator and inconclusive.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        pairs: usize,
        #[arg(long, default_value_t = 512)]
        fit_samples: usize,
        #[arg(long, default_value_t = 10.0)]
        scale: f64,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Degree of the induced map on light directions at a base point (dimension 4).
    Degree {
        file: PathBuf,
        /// Comma-separated base event, default the origin.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        base: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_SUBDIVISION)]
        subdiv: u32,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Convert between an event (x, y, z, t) and its Hermitian matrix.
    Convert(ConvertArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ConvertArgs {
    #[arg(long, num_args = 4, value_names = ["X", "Y", "Z", "T"], allow_negative_numbers = true)]
    event: Option<Vec<f64>>,
    #[arg(long, num_args = 4, value_names = ["D1", "D2", "RE", "IM"], allow_negative_numbers = true)]
    herm: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// A seeded Poincaré similarity.
    Similarity {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 4)]
        dimension: usize,
        /// Emit the identity map instead of a random one.
        #[arg(long)]
        identity: bool,
        /// Follow the map with the spatial point reflection.
        #[arg(long)]
        reflect: bool,
    },
    /// A degenerate map built from separated patches.
    Degenerate {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 5)]
        patches: usize,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
        #[arg(long, default_value_t = 4)]
        dimension: usize,
        /// Comma-separated cone vertex, default the origin.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        vertex: Option<Vec<f64>>,
    },
    /// The map r -> (q(r), 0, ..., 0) tabulated on seeded coherent pairs.
    Table {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 10.0)]
        scale: f64,
        #[arg(long, default_value_t = 4)]
        dimension: usize,
    },
}

/// Explicit seed, or a fresh one announced on standard error.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

fn read_map(path: &Path) -> anyhow::Result<MapFile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    MapFile::parse(&text).with_context(|| format!("invalid map spec {}", path.display()))
}

fn event_arg(coords: Option<Vec<f64>>, dim: usize) -> anyhow::Result<Event64> {
    match coords {
        Some(c) => Ok(Event64::new(&c)?),
        None => Ok(Event64::zero(dim)?),
    }
}

fn print_json(v: &impl serde::Serialize) {
    print_text(&serde_json::to_string_pretty(v).expect("reports always serialize"));
}

/// Like `println!`, but a closed pipe (e.g. `| head`) is not an error.
fn print_text(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn gen(cmd: GenCommand) -> anyhow::Result<ExitCode> {
    let spec = match cmd {
        GenCommand::Similarity {
            seed,
            dimension,
            identity,
            reflect,
        } => {
            let mut ps = if identity {
                PoincareSimilarity::identity(dimension)?
            } else {
                random_similarity(resolve_seed(seed), dimension, &SimilarityBounds::default())?
            };
            if reflect {
                let r = PoincareSimilarity::new(
                    1.0,
                    LorentzMatrix::point_reflection(dimension)?,
                    Event64::zero(dimension)?,
                )?;
                ps = r.compose(&ps);
            }
            MapSpec::Similarity(ps)
        }
        GenCommand::Degenerate {
            seed,
            patches,
            epsilon,
            dimension,
            vertex,
        } => {
            if !(epsilon > 0.0 && epsilon < EPSILON_BOUND) {
                bail!("epsilon must lie in (0, {EPSILON_BOUND}), got {epsilon}");
            }
            let vertex = event_arg(vertex, dimension)?;
            MapSpec::Degenerate(build_default(patches, epsilon, vertex, resolve_seed(seed))?)
        }
        GenCommand::Table {
            seed,
            pairs,
            scale,
            dimension,
        } => {
            let stream = SeedStream::new(resolve_seed(seed));
            let square = |r: &Event64| -> anyhow::Result<Event64> {
                let mut c = vec![0.0; dimension];
                c[0] = r.q();
                Ok(Event64::new(&c)?)
            };
            let mut rows = Vec::with_capacity(2 * pairs);
            for i in 0..pairs as u64 {
                let (r1, r2) =
                    sample_coherent_pair::<f64, _>(&mut stream.rng(i), dimension, scale)?;
                for r in [r1, r2] {
                    rows.push(TableRow {
                        input: r,
                        output: square(&r)?,
                    });
                }
            }
            MapSpec::Table(TableRows { rows })
        }
    };
    print_text(&MapFile::new(spec).to_json());
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen(cmd) => gen(cmd),
        Command::Validate {
            file,
            samples,
            seed,
        } => {
            let spec = read_map(&file)?;
            match &spec.map {
                MapSpec::Degenerate(d) => {
                    let config = ValidationConfig {
                        brute_force_samples: samples,
                        seed: resolve_seed(seed),
                    };
                    let report = validate_spec(d, &config, &TolerancePolicy64::default());
                    print_json(&report);
                    Ok(if report.valid {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                other => {
                    // every other kind is fully checked while parsing
                    spec.load()?;
                    print_json(&json!({ "valid": true, "kind": other.kind() }));
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Check {
            file,
            pairs,
            seed,
            tol,
            scale,
        } => {
            let map = read_map(&file)?.load()?;
            let config = CheckConfig {
                pairs,
                seed: resolve_seed(seed),
                scale,
            };
            let report =
                check_coherency_preservation(&map, &config, &TolerancePolicy64::new(tol)?)?;
            print_json(&report);
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Classify {
            file,
            pairs,
            fit_samples,
            scale,
            threshold,
            tol,
            seed,
        } => {
            let map = read_map(&file)?.load()?;
            let config = ClassifyConfig {
                pairs,
                fit_samples,
                scale,
                residual_threshold: threshold,
                tau: tol,
                seed: resolve_seed(seed),
                ..ClassifyConfig::default()
            };
            let c = classify(&map, &config)?;
            print_json(&classification_report(&c, &config));
            Ok(ExitCode::SUCCESS)
        }
        Command::Degree {
            file,
            base,
            subdiv,
            tol,
        } => {
            let map = read_map(&file)?.load()?;
            let base = event_arg(base, map.dim())?;
            let mesh = SphereMesh::icosphere(subdiv);
            match degree(&map, &base, &mesh, &TolerancePolicy64::new(tol)?) {
                Ok(report) => {
                    print_json(&report);
                    Ok(if report.quality {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                Err(CoreError::LineCollapse) => {
                    bail!("the map collapses a coherent line through the base point")
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Convert(args) => {
            let (event, herm) = match (args.event, args.herm) {
                (Some(e), _) => {
                    let e = Event64::new(&e)?;
                    (e, event_to_herm(&e)?)
                }
                (None, Some(h)) => {
                    let h = Herm2::from([h[0], h[1], h[2], h[3]]);
                    (herm_to_event(&h), h)
                }
                (None, None) => unreachable!("clap requires one of --event or --herm"),
            };
            print_json(&json!({
                "event": event,
                "herm": herm,
                "q": event.q(),
                "det": herm.det(),
            }));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

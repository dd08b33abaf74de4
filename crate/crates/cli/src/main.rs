use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use polyforge::autgroup::automorphisms;
use polyforge::fixtures;
use polyforge::forge::{construct, ForgeOptions};
use polyforge::hull::PointsJson;
use polyforge::lattice::{barycentric_subdivision, FaceLattice, DEFAULT_FLAG_CAP};
use polyforge::permgroup::GroupSpec;
use polyforge::realize::{builtin, pull_realize, to_off, GeometricPolytope, RealizeOptions, DEFAULT_Q_MAX};
use polyforge::Error;

const EXIT_INPUT: u8 = 2;
const EXIT_CERTIFICATION: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

#[derive(Parser)]
#[command(name = "polyforge", version)]
#[command(about = "Abstract polytopes with prescribed automorphism groups")]
struct Cli {
    /// Worker threads for the automorphism search; 0 uses every core
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and certify a polytope whose automorphism group is the input group
    Construct {
        /// Group JSON: {"degree", "generators"} or {"table"}
        group: PathBuf,

        /// Where to write the face lattice JSON
        #[arg(long)]
        out: Option<PathBuf>,

        /// Where to write the construction report JSON
        #[arg(long)]
        report: Option<PathBuf>,

        /// Send dihedral groups through the general pipeline
        #[arg(long)]
        force_general: bool,

        /// Flag cap for exhaustive connectivity checks
        #[arg(long, default_value_t = DEFAULT_FLAG_CAP)]
        max_flags: usize,

        /// Cap on the faces of the assembled polytope
        #[arg(long, default_value_t = 500_000)]
        max_faces: usize,

        /// Cap on the chambers of the subdivided orbit polytope
        #[arg(long, default_value_t = 2_000)]
        max_chambers: usize,
    },

    /// Compute the automorphism group of a face lattice
    Aut {
        /// Lattice JSON file or built-in name
        lattice: String,

        /// Include every automorphism as a face permutation
        #[arg(long)]
        elements: bool,

        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Barycentric subdivision of a face lattice
    Bsd {
        /// Lattice JSON file or built-in name
        lattice: String,

        /// Where to write the labelled complex JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Realize the barycentric subdivision of a convex polytope convexly
    Realize {
        /// Points JSON file or built-in name
        points: String,

        /// Where to write the OFF mesh (3-polytopes only)
        #[arg(long)]
        out: Option<PathBuf>,

        /// Where to write the exact coordinates and pulling record
        #[arg(long)]
        exact: Option<PathBuf>,

        /// Where to write the equivalence certificate
        #[arg(long)]
        report: Option<PathBuf>,

        /// Largest denominator tried when placing a pulled point
        #[arg(long, default_value_t = DEFAULT_Q_MAX)]
        q_max: u64,

        /// Decimal places in the OFF mesh
        #[arg(long, default_value_t = 10)]
        precision: usize,
    },

    /// Check the abstract polytope axioms
    Validate {
        /// Lattice JSON file or built-in name
        lattice: String,

        /// Flag cap for exhaustive connectivity checks
        #[arg(long, default_value_t = DEFAULT_FLAG_CAP)]
        max_flags: usize,

        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { .. } | Error::Validation(_) | Error::Structural(_) | Error::Unsupported(_)) => EXIT_INPUT,
        Some(Error::Integrity(_) | Error::Certification { .. }) => EXIT_CERTIFICATION,
        Some(Error::Resource { .. }) => EXIT_RESOURCE,
        None => 1,
    }
}

fn config(command: &str, jobs: usize, fields: Value) -> Value {
    let mut c = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "jobs": jobs,
    });
    if let (Some(c), Value::Object(extra)) = (c.as_object_mut(), fields) {
        c.extend(extra);
    }
    c
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Prints to stdout; a closed pipe is not an error.
fn print_json(value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Writes to `path`, or prints when absent.
fn emit(path: Option<&PathBuf>, value: &Value) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => print_json(value),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Validation(format!("reading {}: {e}", path.display())).into())
}

fn load_lattice(input: &str) -> Result<FaceLattice> {
    let path = Path::new(input);
    if path.is_file() {
        return Ok(FaceLattice::parse_json(&read_text(path)?)?);
    }
    fixtures::by_name(input).ok_or_else(|| {
        Error::Validation(format!(
            "`{input}` is neither a file nor a built-in lattice ({})",
            fixtures::NAMES.join(", ")
        ))
        .into()
    })
}

fn load_polytope(input: &str) -> Result<GeometricPolytope> {
    let path = Path::new(input);
    if !path.is_file() {
        return Ok(builtin(input)?);
    }
    let points: PointsJson = serde_json::from_str(&read_text(path)?)
        .map_err(|e| Error::Validation(format!("points JSON: {e}")))?;
    Ok(GeometricPolytope::from_points(points.to_points()?)?)
}

fn timed<T>(label: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    eprintln!("{label}: {:.3}s", start.elapsed().as_secs_f64());
    out
}

fn run(cli: Cli) -> Result<u8> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Construct {
            group,
            out,
            report,
            force_general,
            max_flags,
            max_faces,
            max_chambers,
        } => {
            let spec = GroupSpec::from_json(&read_text(&group)?)?;
            let group_perm = spec.build()?;
            let opts = ForgeOptions {
                force_general,
                max_flags,
                max_faces,
                max_chambers,
                certify: true,
            };
            let c = timed("construct", || construct(&group_perm, &opts))?;
            if let Some(p) = &out {
                write_json(p, &serde_json::to_value(c.lattice.to_json())?)?;
            }
            let cfg = config(
                "construct",
                jobs,
                json!({
                    "group": group,
                    "out": out,
                    "force_general": force_general,
                    "max_flags": max_flags,
                    "max_faces": max_faces,
                    "max_chambers": max_chambers,
                }),
            );
            emit(report.as_ref(), &json!({ "config": cfg, "report": c.report }))?;
            Ok(if c.certified() { 0 } else { EXIT_CERTIFICATION })
        }
        Command::Aut { lattice, elements, out } => {
            let l = load_lattice(&lattice)?;
            let aut = timed("aut", || automorphisms(&l))?;
            let mut value = json!({
                "config": config("aut", jobs, json!({ "lattice": lattice, "elements": elements })),
                "order": aut.order,
                "base_flag": aut.base_flag,
            });
            if elements {
                value["elements"] = json!(aut.elements);
            }
            emit(out.as_ref(), &value)?;
            Ok(0)
        }
        Command::Bsd { lattice, out } => {
            let l = load_lattice(&lattice)?;
            let bsd = timed("bsd", || barycentric_subdivision(&l))?;
            let summary = json!({
                "config": config("bsd", jobs, json!({ "lattice": lattice, "out": out })),
                "dim": bsd.dim,
                "vertices": bsd.vertices.len(),
                "chambers": bsd.chambers.len(),
                "cells": bsd.cells.len(),
            });
            if let Some(p) = &out {
                write_json(p, &serde_json::to_value(&bsd)?)?;
            }
            print_json(&summary)?;
            Ok(0)
        }
        Command::Realize {
            points,
            out,
            exact,
            report,
            q_max,
            precision,
        } => {
            let p = load_polytope(&points)?;
            if out.is_some() && p.dim() != 3 {
                return Err(Error::Unsupported(format!("OFF output of a {}-polytope; use --exact", p.dim())).into());
            }
            let opts = RealizeOptions {
                q_max,
                ..RealizeOptions::default()
            };
            let r = timed("realize", || pull_realize(&p, &opts))?;
            if let Some(path) = &out {
                let off = to_off(&r.result, precision)?;
                fs::write(path, off).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = &exact {
                write_json(path, &serde_json::to_value(r.to_json())?)?;
            }
            let cfg = config(
                "realize",
                jobs,
                json!({
                    "points": points,
                    "out": out,
                    "exact": exact,
                    "q_max": q_max,
                    "precision": precision,
                }),
            );
            let mut cert = serde_json::to_value(&r.certificate)?;
            cert["config"] = cfg;
            if let Some(path) = &report {
                write_json(path, &cert)?;
            }
            let summary = json!({
                "dim": r.result.dim(),
                "vertices": r.result.vertices.len(),
                "facets": r.result.facets.len(),
                "isomorphic": r.certificate.isomorphic,
                "q": r.steps.iter().map(|s| s.q).collect::<Vec<_>>(),
            });
            print_json(&summary)?;
            Ok(if r.certificate.isomorphic { 0 } else { EXIT_CERTIFICATION })
        }
        Command::Validate { lattice, max_flags, out } => {
            let l = load_lattice(&lattice)?;
            let report = timed("validate", || l.validate_with(max_flags));
            let valid = report.is_valid();
            let value = json!({
                "config": config("validate", jobs, json!({ "lattice": lattice, "max_flags": max_flags })),
                "valid": valid,
                "f_vector": l.f_vector(),
                "report": report,
            });
            emit(out.as_ref(), &value)?;
            Ok(if valid { 0 } else { EXIT_INPUT })
        }
    }
}

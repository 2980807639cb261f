//! Command-line interface over the flatcone library.
//!
//! Every subcommand reads surfaces from the JSON surface-file format and
//! writes machine-readable JSON or CSV to stdout; diagnostics go to stderr.
//! Exit codes: 0 success, 1 negative decision (`is-qd` only), 2 malformed
//! input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use flatcone::chains::{cone_angle_bounds, Chain, ChainInvariants};
use flatcone::geodesic::{density_profile, trace, DirectedPoint, Terminal};
use flatcone::holonomy::{holonomy_condition, is_quadratic_differential_metric};
use flatcone::saddle::{enumerate_saddle_connections, SaddleOptions};
use flatcone::spectrum::{compare_spectra, marked_spectrum, CurveWord};
use flatcone::{BuildOptions, FlatConeSurface, PlanePoint};

#[derive(Parser)]
#[command(
    name = "flatcone",
    about = "Flat cone surfaces from glued polygons: geodesics, saddle connections, holonomy, chains, and length spectra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SurfaceArgs {
    /// Surface file (JSON).
    surface: PathBuf,
    /// Geometric tolerance override.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Retain vertex classes of angle exactly 2 pi as marked points.
    #[arg(long)]
    keep_marked: bool,
    /// Accept cone angles below 2 pi (positively curved cones).
    #[arg(long)]
    allow_small_angles: bool,
}

impl SurfaceArgs {
    fn load(&self) -> Result<FlatConeSurface> {
        let mut options = BuildOptions {
            keep_marked_points: self.keep_marked,
            allow_angle_below_two_pi: self.allow_small_angles,
            ..Default::default()
        };
        if let Some(e) = self.epsilon {
            options.epsilon = e;
        }
        let text = fs::read_to_string(&self.surface)
            .with_context(|| format!("reading {}", self.surface.display()))?;
        Ok(FlatConeSurface::from_json(&text, options)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a surface file and report its derived topology.
    Validate {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// List cone points with their exact angles.
    Angles {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Decide whether the metric comes from a holomorphic quadratic
    /// differential. Exit code 0 = yes, 1 = no, 2 = malformed input.
    #[command(name = "is-qd")]
    IsQd {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Generating loops of the dual graph and their holonomy rotations.
    Holonomy {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Trace a straight-line geodesic; emits one JSON line per segment.
    Trace {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Chart id of the start point (defaults to the first chart).
        #[arg(long)]
        chart: Option<i64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        /// Direction angle in radians.
        #[arg(long)]
        angle: Option<f64>,
        #[arg(long, default_value_t = 10.0)]
        max_length: f64,
        /// Seed for the derived start when coordinates are omitted.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Enumerate saddle connections; emits one JSON line per connection.
    Saddles {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        length_bound: f64,
        /// Corridor cap before aborting with an explosion error.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Sweep counts R(n), cone-angle bounds, and periodic invariants of a
    /// chain at the given cone angle.
    Chain {
        /// Cone angle as a fraction of pi, e.g. "5/2".
        #[arg(long, value_parser = parse_fraction)]
        theta_pi: Option<(i64, i64)>,
        /// Cone angle in radians (for irrational multiples of pi).
        #[arg(long)]
        theta_rad: Option<f64>,
        #[arg(long, default_value_t = 20)]
        n_max: u64,
        /// Base direction of the chain.
        #[arg(long, default_value_t = 0.0)]
        phi0: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Geodesic lengths of curve words; CSV columns
    /// word_id,length,iterations,flat_strip.
    Spectrum {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Words file: JSON list of words, each a list of
        /// [chart, edge, direction] crossings.
        #[arg(long)]
        words: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Compare the spectra of two surfaces over the same words.
    Compare {
        surface_a: PathBuf,
        surface_b: PathBuf,
        #[arg(long)]
        words: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Fraction of grid cells covered by a traced geodesic.
    Density {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        chart: Option<i64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        angle: Option<f64>,
        #[arg(long, default_value_t = 1e4)]
        total_length: f64,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_fraction(s: &str) -> Result<(i64, i64), String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<i64>().map_err(|e| e.to_string())?,
            d.trim().parse::<i64>().map_err(|e| e.to_string())?,
        ),
        None => (s.trim().parse::<i64>().map_err(|e| e.to_string())?, 1),
    };
    if den == 0 {
        return Err("denominator must be nonzero".into());
    }
    Ok((num, den))
}

fn main() -> ExitCode {
    // Die quietly when a pipe consumer closes early (e.g. `... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { surface } => {
            let s = surface.load()?;
            let report = serde_json::json!({
                "charts": s.chart_count(),
                "gluings": s.gluings().len(),
                "vertex_classes": s.vertex_classes().len(),
                "chi": s.euler_characteristic(),
                "genus": s.genus(),
                "cone_points": s.cone_angles().iter().map(|(id, a)| {
                    serde_json::json!({
                        "id": id,
                        "angle_pi": [a.numer(), a.denom()],
                        "angle_radians": a.radians(),
                        "vertex_class": s.class(s.cone_point(*id).class).corners.iter()
                            .map(|&(c, v)| (s.chart_id(c), v)).collect::<Vec<_>>(),
                    })
                }).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Angles { surface, format } => {
            let s = surface.load()?;
            let angles = s.cone_angles();
            match format {
                Format::Json => {
                    let rows: Vec<_> = angles
                        .iter()
                        .map(|(id, a)| {
                            serde_json::json!({
                                "id": id,
                                "angle_pi": [a.numer(), a.denom()],
                                "angle_radians": a.radians(),
                            })
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&rows)?);
                }
                Format::Csv => {
                    println!("id,angle_pi_num,angle_pi_den,angle_radians");
                    for (id, a) in angles {
                        println!("{},{},{},{}", id, a.numer(), a.denom(), a.radians());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::IsQd { surface } => {
            let s = surface.load()?;
            let decision = is_quadratic_differential_metric(&s);
            println!("{}", serde_json::to_string_pretty(&decision)?);
            Ok(if decision.is_quadratic_differential {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Holonomy { surface } => {
            let s = surface.load()?;
            let report = holonomy_condition(&s);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace {
            surface,
            chart,
            x,
            y,
            angle,
            max_length,
            seed,
        } => {
            let s = surface.load()?;
            let start = resolve_start(&s, chart, x, y, angle, seed)?;
            let path = trace(&s, start, max_length).map_err(|e| anyhow!("{e}"))?;
            for seg in &path.segments {
                println!(
                    "{}",
                    serde_json::json!({
                        "chart": s.chart_id(seg.chart),
                        "start": [seg.start.x, seg.start.y],
                        "end": [seg.end.x, seg.end.y],
                        "length": seg.length(),
                    })
                );
            }
            let terminal = match path.terminal {
                Terminal::LengthReached => serde_json::json!({"kind": "length_reached"}),
                Terminal::ConePointHit(hit) => serde_json::json!({
                    "kind": "cone_point",
                    "cone_point": hit.cone_point,
                    "chart": s.chart_id(hit.chart),
                    "vertex": hit.vertex,
                }),
            };
            println!(
                "{}",
                serde_json::json!({
                    "length": path.length,
                    "crossings": path.crossings.len(),
                    "terminal": terminal,
                })
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Saddles {
            surface,
            length_bound,
            cap,
        } => {
            let s = surface.load()?;
            let options = SaddleOptions { corridor_cap: cap };
            let conns = enumerate_saddle_connections(&s, length_bound, &options)
                .map_err(|e| anyhow!("{e}"))?;
            for c in &conns {
                println!(
                    "{}",
                    serde_json::json!({
                        "start_cone": c.start_cone,
                        "end_cone": c.end_cone,
                        "dx": c.displacement.x,
                        "dy": c.displacement.y,
                        "length": c.length,
                    })
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Chain {
            theta_pi,
            theta_rad,
            n_max,
            phi0,
            format,
        } => {
            let chain = match (theta_pi, theta_rad) {
                (Some((n, d)), None) => Chain::rational(n, d, phi0),
                (None, Some(t)) => Chain::radians(t, phi0),
                _ => return Err(anyhow!("provide exactly one of --theta-pi or --theta-rad")),
            }
            .map_err(|e| anyhow!("{e}"))?;
            let rows: Vec<(u64, u64)> = (1..=n_max).map(|n| (n, chain.sweep_count(n))).collect();
            let invariants = chain.invariants();
            match format {
                Format::Csv => {
                    println!("n,r,theta_lower,theta_upper");
                    for &(n, r) in &rows {
                        let b = cone_angle_bounds(r, n);
                        println!("{},{},{},{}", n, r, b.lower, b.upper);
                    }
                    match invariants {
                        ChainInvariants::Periodic { k, n } => {
                            println!("# invariants: periodic=true,k={k},n={n}")
                        }
                        ChainInvariants::Aperiodic => println!("# invariants: periodic=false"),
                    }
                }
                Format::Json => {
                    let report = serde_json::json!({
                        "sweep": rows.iter().map(|&(n, r)| {
                            let b = cone_angle_bounds(r, n);
                            serde_json::json!({"n": n, "r": r, "lower": b.lower, "upper": b.upper})
                        }).collect::<Vec<_>>(),
                        "invariants": invariants,
                    });
                    println!("{}", serde_json::to_string_pretty(&report)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum {
            surface,
            words,
            format,
        } => {
            let s = surface.load()?;
            let word_list = load_words(&s, &words)?;
            let results = marked_spectrum(&s, &word_list);
            match format {
                Format::Csv => {
                    println!("word_id,length,iterations,flat_strip");
                    for (i, r) in results.iter().enumerate() {
                        match r {
                            Ok(e) => println!(
                                "{},{},{},{}",
                                i, e.length, e.tightening_iterations, e.flat_strip
                            ),
                            Err(e) => {
                                eprintln!("word {i}: {e}");
                                println!("{i},nan,0,false");
                            }
                        }
                    }
                }
                Format::Json => {
                    let rows: Vec<_> = results
                        .iter()
                        .enumerate()
                        .map(|(i, r)| match r {
                            Ok(e) => serde_json::json!({
                                "word_id": i,
                                "length": e.length,
                                "iterations": e.tightening_iterations,
                                "flat_strip": e.flat_strip,
                            }),
                            Err(e) => serde_json::json!({"word_id": i, "error": e.to_string()}),
                        })
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&rows)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            surface_a,
            surface_b,
            words,
            epsilon,
            format,
        } => {
            let mut options = BuildOptions::default();
            if let Some(e) = epsilon {
                options.epsilon = e;
            }
            let a = FlatConeSurface::from_json(
                &fs::read_to_string(&surface_a)
                    .with_context(|| format!("reading {}", surface_a.display()))?,
                options.clone(),
            )?;
            let b = FlatConeSurface::from_json(
                &fs::read_to_string(&surface_b)
                    .with_context(|| format!("reading {}", surface_b.display()))?,
                options,
            )?;
            let word_list = load_words(&a, &words)?;
            let report = compare_spectra(&a, &b, &word_list).map_err(|e| anyhow!("{e}"))?;
            match format {
                Format::Csv => {
                    println!("word_id,length_a,length_b,relative_difference");
                    for e in &report.entries {
                        println!(
                            "{},{},{},{}",
                            e.word, e.length_a, e.length_b, e.relative_difference
                        );
                    }
                    println!(
                        "# max_relative_difference={}",
                        report.max_relative_difference
                    );
                }
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Density {
            surface,
            chart,
            x,
            y,
            angle,
            total_length,
            grid,
            seed,
        } => {
            let s = surface.load()?;
            let start = resolve_start(&s, chart, x, y, angle, seed)?;
            let coverage =
                density_profile(&s, start, total_length, grid).map_err(|e| anyhow!("{e}"))?;
            println!("{}", serde_json::json!({ "coverage": coverage, "grid": grid }));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_words(surface: &FlatConeSurface, path: &PathBuf) -> Result<Vec<CurveWord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: Vec<Vec<(i64, usize, i64)>> =
        serde_json::from_str(&text).context("words file must be a JSON list of crossing lists")?;
    raw.iter()
        .map(|w| CurveWord::from_triples(surface, w).map_err(|e| anyhow!("{e}")))
        .collect()
}

/// Start point for trace/density: explicit coordinates when given, else a
/// deterministic interior point derived from the seed.
fn resolve_start(
    surface: &FlatConeSurface,
    chart: Option<i64>,
    x: Option<f64>,
    y: Option<f64>,
    angle: Option<f64>,
    seed: u64,
) -> Result<DirectedPoint> {
    let chart_idx = match chart {
        Some(id) => surface
            .chart_index(id)
            .ok_or_else(|| anyhow!("unknown chart id {id}"))?,
        None => 0,
    };
    let a = angle.unwrap_or_else(|| {
        let phi = (seed as f64 + 1.0) * 0.618_033_988_749_894_9;
        std::f64::consts::TAU * phi.fract()
    });
    let direction = PlanePoint::from_angle(a);
    let position = match (x, y) {
        (Some(px), Some(py)) => {
            let p = PlanePoint::new(px, py);
            if !surface.point_in_chart(chart_idx, p) {
                return Err(anyhow!("start point is not inside the chart"));
            }
            p
        }
        (None, None) => interior_point(surface, chart_idx, seed)?,
        _ => return Err(anyhow!("provide both --x and --y or neither")),
    };
    Ok(DirectedPoint::new(chart_idx, position, direction))
}

fn interior_point(surface: &FlatConeSurface, chart: usize, seed: u64) -> Result<PlanePoint> {
    let verts = surface.chart_vertices(chart);
    let centroid = {
        let mut area2 = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..verts.len() {
            let a = verts[i];
            let b = verts[(i + 1) % verts.len()];
            let w = a.cross(b);
            area2 += w;
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        PlanePoint::new(cx / (3.0 * area2), cy / (3.0 * area2))
    };
    // Walk deterministically toward vertices until inside (the area centroid
    // of a non-convex chart can fall outside).
    let mut p = centroid;
    let mut lambda = 0.1 + 0.05 * ((seed / 7) % 5) as f64;
    for attempt in 0..16u64 {
        if surface.point_in_chart(chart, p) {
            return Ok(p);
        }
        let v = verts[((seed + attempt) % verts.len() as u64) as usize];
        p = PlanePoint::new(
            centroid.x + lambda * (v.x - centroid.x),
            centroid.y + lambda * (v.y - centroid.y),
        );
        lambda *= 0.7;
    }
    Err(anyhow!("could not derive an interior start point"))
}

//! `fbe`: attractors, fast basins, continuations, code-space arithmetic and
//! manifold queries from the command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use fbe_core::basin::{self, Raster};
use fbe_core::cli_io::{self, cached_attractor, run_verify, VerifyOptions};
use fbe_core::ifs_core::{chaos_game, coding_map, AttractorCloud, IfsSystem, Point, Region, Space};
use fbe_core::manifold::{enumerate_leaves, Manifold};
use fbe_core::symbolic::{self, Address, Digit};
use fbe_core::systems;

#[derive(Parser)]
#[command(
    name = "fbe",
    version,
    about = "Fractal basins, continuations and branched manifolds"
)]
struct Cli {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// Spec JSON file, or the name of a bundled system.
    #[arg(long)]
    ifs: String,
    /// Dedup cell size for the attractor cloud.
    #[arg(long, default_value_t = 2f64.powi(-10))]
    cell: f64,
}

#[derive(Args, Clone)]
struct RasterArgs {
    /// `x0,x1` or `x0,y0,x1,y1`.
    #[arg(long, allow_hyphen_values = true)]
    region: String,
    /// `N` or `NX,NY`.
    #[arg(long, default_value = "512")]
    grid: String,
    /// Hit tolerance; defaults to the attractor tolerance 3ε.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; `.pgm` for an image, anything else for CSV. CSV goes
    /// to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verb {
    /// Compute an attractor cloud and write it in cache format.
    Attractor {
        #[command(flatten)]
        system: SystemArgs,
        /// Use a chaos-game orbit of this length instead of Hutchinson iteration.
        #[arg(long)]
        chaos: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        burn_in: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raster of the fast basin up to a word length.
    Fastbasin {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        raster: RasterArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Raster of the finite continuation along the first k digits of θ.
    Continuation {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        raster: RasterArgs,
        /// Positive address, e.g. `(1.2)*`.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        k: usize,
    },
    /// Code-space arithmetic.
    Code {
        #[command(subcommand)]
        op: CodeOp,
    },
    /// Branched manifold queries.
    Manifold {
        #[command(subcommand)]
        op: ManifoldOp,
    },
    /// Print a bundled system as spec JSON.
    Spec { name: String },
    /// Run the property suite; exit status 1 if any check fails.
    Verify {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CodeOp {
    /// σ_n: prepend n or cancel a leading −n.
    Sigma {
        #[arg(allow_hyphen_values = true)]
        n: i32,
        #[arg(allow_hyphen_values = true)]
        address: String,
    },
    /// Drop the first digit.
    Shift {
        #[arg(allow_hyphen_values = true)]
        address: String,
    },
    /// Negate every digit.
    Negate {
        #[arg(allow_hyphen_values = true)]
        address: String,
    },
    /// Code-space memberships over `±1..=n`.
    Classify {
        #[arg(allow_hyphen_values = true)]
        address: String,
        #[arg(long)]
        n: usize,
    },
    /// d_𝕀 between two addresses.
    Metric {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Prefix of the disjunctive word over `1..=n`.
    Disjunctive {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        len: usize,
    },
    /// The coding map π.
    Pi {
        #[arg(long)]
        ifs: String,
        #[arg(allow_hyphen_values = true)]
        address: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum ManifoldOp {
    /// d_𝕃 between two points written `THETA:X`.
    Dist {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Integer and fractional part of a fast-basin address.
    Canon {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(allow_hyphen_values = true)]
        address: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Leaves up to a length, with point counts and projection extents.
    Leaves {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Points where leaf closures meet.
    Branch {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Contact tolerance; defaults to 2τ_A.
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Input or usage problem (exit 2) versus a failed check (exit 1).
enum Failure {
    Input(anyhow::Error),
    Check,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "null".into()
    } else {
        "\"inf\"".into()
    }
}

fn point_json(space: Space, p: Point) -> String {
    if p.is_infinite() {
        "\"inf\"".into()
    } else if space == Space::R1 {
        num(p.x)
    } else {
        format!("[{}, {}]", num(p.x), num(p.y))
    }
}

fn word_text(w: &[Digit]) -> String {
    Address::finite(w.to_vec()).to_string()
}

fn load_system(name: &str) -> Result<IfsSystem> {
    let path = Path::new(name);
    if path.exists() {
        return cli_io::load_spec(path).with_context(|| format!("loading {name}"));
    }
    systems::by_name(name).ok_or_else(|| {
        anyhow!(
            "{name}: no such file or bundled system (bundled: {})",
            systems::NAMES.join(", ")
        )
    })
}

fn load_cloud(ifs: &IfsSystem, cell: f64) -> Result<AttractorCloud> {
    cached_attractor(ifs, cell).context("computing the attractor")
}

fn parse_address(s: &str) -> Result<Address> {
    s.parse::<Address>().map_err(|e| anyhow!(e))
}

fn write_raster(raster: &Raster, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) if p.extension().is_some_and(|e| e == "pgm") => {
            std::fs::write(p, raster.to_pgm()).with_context(|| format!("writing {}", p.display()))?
        }
        Some(p) => std::fs::write(p, raster.to_csv()).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", raster.to_csv()),
    }
    if raster.resolution_warning() {
        eprintln!("warning: cells are smaller than the hit tolerance");
    }
    eprintln!("{} hit cells of {}", raster.hit_count(), raster.nx() * raster.ny());
    Ok(())
}

fn raster_setup(space: Space, r: &RasterArgs) -> Result<(Region, usize, usize)> {
    let region = cli_io::parse_region(space, &r.region)?;
    let (nx, ny) = cli_io::parse_grid(&r.grid)?;
    Ok((region, nx, ny))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.verb {
        Verb::Attractor {
            system,
            chaos,
            burn_in,
            seed,
            out,
        } => {
            let ifs = load_system(&system.ifs)?;
            let cloud = match chaos {
                Some(n) => chaos_game(&ifs, n, burn_in, seed).map_err(|e| anyhow!(e))?,
                None => load_cloud(&ifs, system.cell)?,
            };
            let text = cli_io::cache::cloud_text(&ifs, &cloud);
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            let meta = cloud.meta();
            eprintln!(
                "{} points, resolution {}, contraction {}{}",
                cloud.len(),
                num(cloud.resolution()),
                num(meta.contraction),
                if meta.contraction_estimated { " (estimated)" } else { "" }
            );
            if !meta.contractive {
                eprintln!("warning: system is not contractive; resolution is the invariance residual");
            }
        }
        Verb::Fastbasin { system, raster, depth } => {
            let ifs = load_system(&system.ifs)?;
            let cloud = load_cloud(&ifs, system.cell)?;
            let (region, nx, ny) = raster_setup(ifs.space(), &raster)?;
            let tau = raster.tol.unwrap_or(cloud.tau());
            let r = basin::fast_basin_raster_with_tau(&ifs, &cloud, region, nx, ny, depth, tau);
            write_raster(&r, raster.out.as_deref())?;
        }
        Verb::Continuation {
            system,
            raster,
            theta,
            k,
        } => {
            let ifs = load_system(&system.ifs)?;
            let cloud = load_cloud(&ifs, system.cell)?;
            let (region, nx, ny) = raster_setup(ifs.space(), &raster)?;
            let theta = parse_address(&theta)?;
            let c = basin::finite_continuation(&ifs, &cloud, &theta, k).map_err(|e| anyhow!(e))?;
            let tau = raster.tol.unwrap_or(cloud.tau());
            let mut r = Raster::new(ifs.space(), region, nx, ny, tau);
            for &p in &c.points {
                let t = tau * ifs.space().planar_scale(p);
                r.mark_with(p, k as u32, t);
            }
            write_raster(&r, raster.out.as_deref())?;
        }
        Verb::Spec { name } => {
            let ifs = load_system(&name)?;
            println!("{}", cli_io::spec_json(&ifs, Some(&name)));
        }
        Verb::Code { op } => code(op)?,
        Verb::Manifold { op } => manifold(op)?,
        Verb::Verify { system, json, seed } => {
            let ifs = load_system(&system.ifs)?;
            let cloud = load_cloud(&ifs, system.cell)?;
            let opts = VerifyOptions {
                seed,
                ..VerifyOptions::default()
            };
            let report = run_verify(&ifs, &cloud, &system.ifs, &opts);
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            if !report.passed() {
                return Err(Failure::Check);
            }
        }
    }
    Ok(())
}

fn code(op: CodeOp) -> Result<()> {
    match op {
        CodeOp::Sigma { n, address } => {
            let d = Digit::new(n).map_err(|e| anyhow!(e))?;
            println!("{}", symbolic::sigma(d, &parse_address(&address)?));
        }
        CodeOp::Shift { address } => {
            println!(
                "{}",
                symbolic::shift(&parse_address(&address)?).map_err(|e| anyhow!(e))?
            );
        }
        CodeOp::Negate { address } => println!("{}", symbolic::negate(&parse_address(&address)?)),
        CodeOp::Classify { address, n } => {
            let c = symbolic::validate(&parse_address(&address)?, n).map_err(|e| anyhow!(e))?;
            let flags = [
                ("all", c.all),
                ("reduced", c.reduced),
                ("positive", c.positive),
                ("negative", c.negative),
                ("fast_basin", c.fast_basin),
                ("fast_basin_dual", c.fast_basin_dual),
                ("eventually_positive", c.eventually_positive),
                ("eventually_negative", c.eventually_negative),
            ];
            let body: Vec<String> = flags.iter().map(|(k, v)| format!("\"{k}\": {v}")).collect();
            println!("{{{}}}", body.join(", "));
        }
        CodeOp::Metric { a, b } => {
            let d = symbolic::metric(&parse_address(&a)?, &parse_address(&b)?);
            println!("{d}");
        }
        CodeOp::Disjunctive { n, len } => {
            println!("{}", word_text(&symbolic::disjunctive_prefix(n, len)));
        }
        CodeOp::Pi { ifs, address, tol } => {
            let ifs = load_system(&ifs)?;
            let p = coding_map(&ifs, &parse_address(&address)?, tol).map_err(|e| anyhow!(e))?;
            println!("{}", point_json(ifs.space(), p));
        }
    }
    Ok(())
}

fn manifold(op: ManifoldOp) -> Result<()> {
    match op {
        ManifoldOp::Dist { system, a, b } => {
            let ifs = load_system(&system.ifs)?;
            let cloud = load_cloud(&ifs, system.cell)?;
            let m = Manifold::new(&ifs, &cloud);
            let point = |s: &str| -> Result<_> {
                let (theta, x) = cli_io::parse_manifold_point(ifs.space(), s)?;
                m.point(theta, x).with_context(|| format!("point {s}"))
            };
            let (pa, pb) = (point(&a)?, point(&b)?);
            let d = m.distance(&pa, &pb);
            println!(
                "{{ \"d_L\": {}, \"d_X\": {}, \"common_prefix\": \"{}\", \"error_bound\": {} }}",
                num(d.d_l),
                num(d.d_x),
                word_text(&d.common_prefix),
                num(d.error_bound)
            );
        }
        ManifoldOp::Canon { system, address, tol } => {
            let ifs = load_system(&system.ifs)?;
            let cloud = load_cloud(&ifs, system.cell)?;
            let m = Manifold::new(&ifs, &cloud);
            let p = m.canonicalize(&parse_address(&address)?, tol)?;
            println!(
                "{{ \"theta\": \"{}\", \"x\": {}, \"proj\": {} }}",
                word_text(p.theta()),
                point_json(ifs.space(), p.x()),
                point_json(ifs.space(), p.proj())
            );
        }
        ManifoldOp::Leaves { system, depth } => {
            let ifs = load_system(&system.ifs)?;
            let cloud = load_cloud(&ifs, system.cell)?;
            let m = Manifold::new(&ifs, &cloud);
            let one_d = ifs.space() == Space::R1;
            let mut s = String::from(if one_d {
                "theta,count,proj_min,proj_max\n"
            } else {
                "theta,count,x_min,y_min,x_max,y_max\n"
            });
            for leaf in enumerate_leaves(ifs.n_maps(), depth) {
                let pts = m.leaf_projection(&leaf).unwrap_or_default();
                let b = Region::bounding(&pts);
                let ext = |f: fn(&Region) -> f64| b.as_ref().map_or("".into(), |r| num(f(r)));
                let name = word_text(leaf.theta());
                if one_d {
                    let _ = writeln!(s, "{name},{},{},{}", pts.len(), ext(|r| r.x0), ext(|r| r.x1));
                } else {
                    let _ = writeln!(
                        s,
                        "{name},{},{},{},{},{}",
                        pts.len(),
                        ext(|r| r.x0),
                        ext(|r| r.y0),
                        ext(|r| r.x1),
                        ext(|r| r.y1)
                    );
                }
            }
            print!("{s}");
        }
        ManifoldOp::Branch { system, depth, tol } => {
            let ifs = load_system(&system.ifs)?;
            let cloud = load_cloud(&ifs, system.cell)?;
            let m = Manifold::new(&ifs, &cloud);
            let tol = tol.unwrap_or(2.0 * cloud.tau());
            let mut s = String::from(if ifs.space() == Space::R1 {
                "theta,x,proj,incidence\n"
            } else {
                "theta,x,y,proj_x,proj_y,incidence\n"
            });
            for b in m.branch_points(depth, tol) {
                let (x, p) = (b.point.x(), b.point.proj());
                let name = word_text(b.point.theta());
                if ifs.space() == Space::R1 {
                    let _ = writeln!(s, "{name},{},{},{}", num(x.x), num(p.x), b.incidence);
                } else {
                    let _ = writeln!(
                        s,
                        "{name},{},{},{},{},{}",
                        num(x.x),
                        num(x.y),
                        num(p.x),
                        num(p.y),
                        b.incidence
                    );
                }
            }
            print!("{s}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

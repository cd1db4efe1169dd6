use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use equichord::angles::{solve_angle, solve_restr2};
use equichord::billiards::{export_orbit, BilliardState};
use equichord::chords::validate_partials;
use equichord::curves::{closure_defect, verify_curve_gutkin, BuiltCurve, CurveSpec};
use equichord::export::{orbit_csv, polygon_svg, render_svg, to_json_string};
use equichord::geometry::{
    geodesic_curvature, geodesic_point, shoot_to_curve, Curve, Geodesic, Geometry, TangentVector, Vec3,
};
use equichord::polygons::{
    circulant_spectrum, construct_2kk, construct_inscribed, default_nonuniform_arcs, equiangular_family_basis,
    exists_nontrivial, family_member, polygon_from_sides, regular_polygon, sample_family_member, verify_gutkin,
    GutkinPolygon, DEFAULT_TOL,
};

type Res<T> = Result<T, Box<dyn StdError>>;

/// Chords of constant contact angle: curves, polygons and billiards.
#[derive(Parser, Debug)]
#[command(name = "equichord", version)]
struct Cli {
    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Roots of k tan c = tan kc, with contact angles for a circle.
    SolveAngle {
        #[arg(long)]
        k: u32,
        #[arg(long, requires = "radius")]
        geometry: Option<Geometry>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Gutkin polygons.
    #[command(subcommand)]
    Polygon(PolygonCmd),
    /// Curves given by a JSON spec.
    #[command(subcommand)]
    Curve(CurveCmd),
    /// Billiards inside a curve.
    #[command(subcommand)]
    Billiard(BilliardCmd),
    /// The chord-length generating function.
    #[command(subcommand)]
    Chords(ChordsCmd),
}

#[derive(Args, Debug)]
struct Output {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG drawing.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum PolygonCmd {
    /// Inscribed-arc construction (--arcs, default a fixed non-uniform
    /// choice), the (2k, k) family (--free), or the regular polygon.
    Construct {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["free", "regular"])]
        arcs: Option<Vec<f64>>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            conflicts_with = "regular"
        )]
        free: Option<Vec<f64>>,
        #[arg(long)]
        regular: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Measure the contact angles of a polygon file.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Overrides the k stored in the file.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Existence, spectrum zeros and Diophantine roots for (n, k).
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// A member of the equiangular family of (n, k).
    Family {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Kernel coefficients; drawn from --seed when absent.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Option<Vec<f64>>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand, Debug)]
enum CurveCmd {
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Worst contact-angle defect of chords shot at alpha.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Max of the functional-equation residual on a grid.
    Residual {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        operator: Option<Geometry>,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum BilliardCmd {
    /// CSV of (step, t, theta, chord_length).
    Orbit {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t0: f64,
        /// Launch angle; defaults to the spec's alpha.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ChordsCmd {
    /// Analytic partials of L against central differences.
    Validate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn tolerance() -> Result<f64, String> {
    match std::env::var("EQUICHORD_TOL") {
        Err(_) => Ok(DEFAULT_TOL),
        Ok(s) => match s.parse::<f64>() {
            Ok(t) if t > 0.0 => Ok(t),
            _ => Err(format!("EQUICHORD_TOL must be a positive number, got {s:?}")),
        },
    }
}

fn write_text(text: &str, out: Option<&Path>) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit<T: Serialize + ?Sized>(value: &T, out: Option<&Path>) -> Res<()> {
    write_text(&to_json_string(value)?, out)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Res<T> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match tolerance() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match run(cli, tol) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli, tol: f64) -> Res<()> {
    match cli.command {
        Command::SolveAngle { k, geometry, radius } => {
            let g = geometry.unwrap_or(Geometry::Euclidean);
            emit(&solve_angle(k, g, radius)?, None)
        }
        Command::Polygon(cmd) => polygon(cmd, tol, cli.seed),
        Command::Curve(cmd) => curve(cmd),
        Command::Billiard(BilliardCmd::Orbit {
            spec,
            t0,
            theta,
            steps,
            out,
        }) => {
            let spec: CurveSpec = read_json(&spec)?;
            let c = spec.build()?;
            let theta = match theta {
                Some(t) => t,
                None => spec.alpha()?.ok_or("give --theta or an alpha in the spec")?,
            };
            let rows = export_orbit(&c, BilliardState::new(t0, theta), steps)?;
            write_text(&orbit_csv(&rows), out.as_deref())
        }
        Command::Chords(ChordsCmd::Validate { spec, samples, out }) => {
            let spec: CurveSpec = read_json(&spec)?;
            let c = spec.build()?;
            emit(&validate_partials(&c, samples, cli.seed)?, out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct Classification {
    n: usize,
    k: usize,
    exists_nontrivial: bool,
    #[serde(rename = "M")]
    m: usize,
    zero_set: Vec<usize>,
    restr2_roots: Vec<usize>,
}

#[derive(Serialize)]
struct FamilyReport {
    n: usize,
    k: usize,
    dimension: usize,
    basis: Vec<Vec<f64>>,
    sides: Vec<f64>,
    polygon: GutkinPolygon,
    is_gutkin: bool,
    alpha: f64,
    max_residual: f64,
}

fn write_polygon_svg(p: &GutkinPolygon, svg: Option<&Path>) -> Res<()> {
    match svg {
        Some(path) => {
            fs::write(path, polygon_svg(&p.vertices, p.k)).map_err(|e| format!("{}: {e}", path.display()).into())
        }
        None => Ok(()),
    }
}

fn polygon(cmd: PolygonCmd, tol: f64, seed: u64) -> Res<()> {
    match cmd {
        PolygonCmd::Construct {
            n,
            k,
            arcs,
            free,
            regular,
            output,
        } => {
            let p = if let Some(free) = free {
                if n.is_some_and(|n| n != 2 * k) {
                    return Err("--free builds a 2k-gon; --n must be 2k".into());
                }
                construct_2kk(k, &free)?
            } else {
                let n = n.ok_or("--n is required")?;
                if regular {
                    GutkinPolygon::new(k, regular_polygon(n))
                } else {
                    let arcs = arcs.unwrap_or_else(|| default_nonuniform_arcs(n, k));
                    construct_inscribed(n, k, &arcs)?
                }
            };
            write_polygon_svg(&p, output.svg.as_deref())?;
            emit(&p, output.out.as_deref())
        }
        PolygonCmd::Verify { input, k, out } => {
            let p: GutkinPolygon = read_json(&input)?;
            if p.n != p.vertices.len() {
                return Err(format!("n = {} but {} vertices given", p.n, p.vertices.len()).into());
            }
            emit(&verify_gutkin(&p.vertices, k.unwrap_or(p.k), tol)?, out.as_deref())
        }
        PolygonCmd::Classify { n, k } => {
            let spectrum = circulant_spectrum(n, k, tol)?;
            let report = Classification {
                n,
                k,
                exists_nontrivial: exists_nontrivial(n, k)?,
                m: spectrum.m,
                zero_set: spectrum.zero_set,
                restr2_roots: solve_restr2(n, k)?.iter().map(|d| d.r).collect(),
            };
            emit(&report, None)
        }
        PolygonCmd::Family { n, k, coeffs, output } => {
            let basis = equiangular_family_basis(n, k)?;
            let sides = match coeffs {
                Some(c) => family_member(&basis, &c)?,
                None => sample_family_member(&basis, seed)?,
            };
            let polygon = GutkinPolygon::new(k, polygon_from_sides(&sides));
            let check = verify_gutkin(&polygon.vertices, k, tol)?;
            write_polygon_svg(&polygon, output.svg.as_deref())?;
            let report = FamilyReport {
                n,
                k,
                dimension: basis.basis.len(),
                basis: basis.basis,
                sides,
                polygon,
                is_gutkin: check.is_gutkin,
                alpha: check.alpha,
                max_residual: check.max_residual,
            };
            emit(&report, output.out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct CurveSummary {
    geometry: Geometry,
    kind: &'static str,
    length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closure_defect: Option<f64>,
    min_curvature: f64,
    max_curvature: f64,
}

#[derive(Serialize)]
struct ResidualReport {
    operator: Geometry,
    alpha: f64,
    grid: usize,
    max_residual: f64,
}

const CURVE_POINTS: usize = 1024;
const DRAWN_CHORDS: usize = 16;

fn curve_svg(c: &BuiltCurve, alpha: Option<f64>) -> Res<String> {
    let g = c.geometry();
    let outline: Vec<Vec3> = (0..CURVE_POINTS)
        .map(|i| c.position(c.period() * i as f64 / CURVE_POINTS as f64))
        .collect();
    let mut chords = Vec::new();
    if let Some(alpha) = alpha {
        for i in 0..DRAWN_CHORDS {
            let t = c.period() * i as f64 / DRAWN_CHORDS as f64;
            let shot = shoot_to_curve(c, t, alpha)?;
            let p = c.position(t);
            let dir = g.direction_towards(&p, &c.position(shot.t1));
            let geo = Geodesic::through(TangentVector::projected(c.point(t), dir))?;
            chords.push(
                (0..=32)
                    .map(|j| *geodesic_point(&geo, shot.chord_length * j as f64 / 32.0).coords())
                    .collect(),
            );
        }
    }
    Ok(render_svg(g, &[outline], &chords))
}

fn curve(cmd: CurveCmd) -> Res<()> {
    match cmd {
        CurveCmd::Build { spec, output } => {
            let spec: CurveSpec = read_json(&spec)?;
            let c = spec.build()?;
            let alpha = spec.alpha()?;
            let kappa: Vec<f64> = (0..CURVE_POINTS)
                .map(|i| geodesic_curvature(&c, c.period() * i as f64 / CURVE_POINTS as f64))
                .collect::<Result<_, _>>()?;
            let summary = CurveSummary {
                geometry: c.geometry(),
                kind: match c {
                    BuiltCurve::Euclidean(_) => "fourier",
                    BuiltCurve::Circle(_) => "circle",
                    BuiltCurve::Deformed(_) => "deformed-circle",
                },
                length: c.length(),
                alpha,
                closure_defect: match c {
                    BuiltCurve::Euclidean(_) => Some(closure_defect(&spec.e2()?)),
                    _ => None,
                },
                min_curvature: kappa.iter().copied().fold(f64::INFINITY, f64::min),
                max_curvature: kappa.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            };
            if let Some(path) = output.svg.as_deref() {
                fs::write(path, curve_svg(&c, alpha)?).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            emit(&summary, output.out.as_deref())
        }
        CurveCmd::Verify { spec, samples, out } => {
            let spec: CurveSpec = read_json(&spec)?;
            let alpha = spec.alpha()?.ok_or("the spec needs an alpha")?;
            let c = spec.build()?;
            emit(&verify_curve_gutkin(&c, alpha, samples)?, out.as_deref())
        }
        CurveCmd::Residual {
            spec,
            operator,
            grid,
            out,
        } => {
            let spec: CurveSpec = read_json(&spec)?;
            let operator = operator.unwrap_or(spec.geometry);
            if operator != spec.geometry {
                return Err(format!(
                    "operator {} does not match the spec geometry {}",
                    operator.label(),
                    spec.geometry.label()
                )
                .into());
            }
            let report = ResidualReport {
                operator,
                alpha: spec.alpha()?.ok_or("the spec needs an alpha")?,
                grid,
                max_residual: spec.max_residual(grid)?,
            };
            emit(&report, out.as_deref())
        }
    }
}

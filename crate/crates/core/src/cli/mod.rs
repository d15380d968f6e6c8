//! Command-line front end: space files, command dispatch and reports.
//!
//! Every command writes CSV tables and `summary.toml` into `--out`. Vertex
//! lists and value lists are separated by `,`, or by `;` when ids contain
//! commas (grid ids such as `2,3`): `--g "0:0,4:1"`, `--set "1,1;1,2"`.
//! Values accept `inf`.

mod report;
pub mod space_file;
mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use report::{num, Field, Report, Table};
pub use space_file::{parse_space_file, parse_space_str, serialize_space};
pub use verify::{run_checks, Check};

use crate::balayage::{capacity_report, dirichlet_via_balayage, reduite, reduite_oracle, ORACLE_SIZE_CAP};
use crate::dirichlet::{harmonicity_residual, solve_dirichlet, DIRECT_TOL, ITERATIVE_TOL};
use crate::error::Error;
use crate::martin::{
    compactify_absorbing, compactify_exhaustion, green_function, minimality_test, tree_exhaustion, BoundaryAtlas,
    Provenance, DEFAULT_MERGE_TOL, MINIMALITY_TOL,
};
use crate::mc::{mc_green, mc_hitting};
use crate::measure::{harmonic_measure, harmonic_measure_adjoint, martin_representation};
use crate::polar::{
    default_radii, polar_flag, polar_witness, regularity_test, thin_at, thorn_lattice, wiener_series, PolarFlag,
    Refinement, ThornVariant, VanishingRule, WienerForm, REGULARITY_TOL, THIN_THRESHOLD, WIENER_RATIO,
};
use crate::space::{generate, Domain, ExtReal, ExtendedFunction, Geometry, HarmonicSpace};

/// Why a command did not complete.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments (exit code 2).
    Usage(String),
    /// A numerical or input failure reported by the library (exit code 1).
    Failure(Error),
    /// The command ran and some check failed (exit code 1).
    Checks(Box<Report>),
    /// Help or version text was requested (exit code 0).
    Help(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failure(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "harmonica", version, about = "Discrete potential theory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for CSV tables and summary.toml.
    #[arg(long, global = true, default_value = "harmonica-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SpaceArg {
    /// Space file, or one of path5, path:N, grid2d:N, grid3d:N, tree:D,
    /// disk:H, random:N:SEED.
    #[arg(long)]
    space: String,
}

#[derive(Args, Debug)]
struct LatticeArg {
    #[arg(long, value_enum, default_value_t = Shape::Thorn)]
    geometry: Shape,
    /// Cone half-angle in degrees.
    #[arg(long, default_value_t = 45.0)]
    aperture: f64,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Shape {
    Thorn,
    Cone,
    Halfspace,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormArg {
    Literal,
    Intersection,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum RuleArg {
    Extrapolated,
    Ratio,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PolarSet {
    Segment,
    Ball,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MeasureArg {
    Counting,
    Reversible,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum DirichletMethod {
    Solve,
    Balayage,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MeasureMethod {
    Indicator,
    Adjoint,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a built-in space as a space file.
    Gen {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Solve the Dirichlet problem with boundary data g.
    Dirichlet {
        #[command(flatten)]
        space: SpaceArg,
        /// Boundary data, `id:value` pairs.
        #[arg(long)]
        g: String,
        /// Interior vertex ids (default: all non-absorbing vertices).
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, value_enum, default_value_t = DirichletMethod::Solve)]
        method: DirichletMethod,
    },
    /// Réduite of u onto a set.
    Balayage {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        set: String,
        /// Obstacle values on the set, `id:value` pairs (default 1).
        #[arg(long)]
        u: Option<String>,
        /// Also solve the linear program and report the difference.
        #[arg(long)]
        oracle: bool,
    },
    /// Capacity and equilibrium potential of a set.
    Capacity {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value_t = MeasureArg::Counting)]
        measure: MeasureArg,
    },
    /// Green function table.
    Green {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Martin kernel and boundary atlas.
    Martin {
        /// Space for absorbing mode.
        #[arg(long, required_unless_present = "tree_depths")]
        space: Option<String>,
        /// Exhaustion mode on binary trees of these depths.
        #[arg(long, value_delimiter = ',', conflicts_with = "space")]
        tree_depths: Option<Vec<usize>>,
        #[arg(long, default_value_t = 2)]
        probe_depth: usize,
        #[arg(long, default_value_t = DEFAULT_MERGE_TOL)]
        merge_tol: f64,
        #[arg(long, default_value_t = 1e-3)]
        drift_tol: f64,
    },
    /// Harmonic measure from a vertex.
    Measure {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, value_enum, default_value_t = MeasureMethod::Indicator)]
        method: MeasureMethod,
    },
    /// Martin representing measure of a positive harmonic function.
    Represent {
        #[command(flatten)]
        space: SpaceArg,
        /// Values on every non-absorbing vertex.
        #[arg(long, conflicts_with = "g", required_unless_present = "g")]
        h: Option<String>,
        /// Absorbing-state data; h is its Dirichlet solution.
        #[arg(long)]
        g: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Wiener series at the tip of a lattice obstacle.
    Wiener {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, value_enum, default_value_t = FormArg::Literal)]
        form: FormArg,
        #[arg(long, default_value_t = WIENER_RATIO)]
        ratio: f64,
    },
    /// Regularity gap and thinness at the tip.
    Regularity {
        #[command(flatten)]
        lattice: LatticeArg,
        #[arg(long, value_delimiter = ',', default_value = "16,32")]
        n: Vec<usize>,
        #[arg(long, default_value_t = REGULARITY_TOL)]
        tol: f64,
    },
    /// Capacity sequence of a refined set.
    Polar {
        #[arg(long, value_enum, default_value_t = PolarSet::Segment)]
        set: PolarSet,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        n: Vec<usize>,
        #[arg(long, value_enum, default_value_t = RuleArg::Extrapolated)]
        rule: RuleArg,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
    },
    /// Polar witness on the refined axis segment.
    Witness {
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.25,-0.25", allow_hyphen_values = true)]
        check: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,0,0.125", allow_hyphen_values = true)]
        set_point: Vec<f64>,
    },
    /// Monte Carlo exit distribution and Green estimate.
    Mc {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        x: String,
        /// Also estimate G(x, y).
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        domain: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
    },
}

/// Resolves a `--space` argument: a built-in descriptor or a file path.
pub fn load_space(spec: &str) -> CliResult<HarmonicSpace> {
    let parts: Vec<&str> = spec.split(':').collect();
    let int = |s: &str| s.parse::<usize>().map_err(|_| usage(format!("bad size {s:?} in {spec:?}")));
    let geometry = match parts.as_slice() {
        ["path5"] => Some(Geometry::Path(5)),
        ["path", n] => Some(Geometry::Path(int(n)?)),
        ["grid2d", n] => Some(Geometry::Grid2d(int(n)?)),
        ["grid3d", n] => Some(Geometry::Grid3d(int(n)?)),
        ["tree", d] => Some(Geometry::BinaryTree(int(d)?)),
        ["disk", h] => Some(Geometry::DiskMesh(
            h.parse().map_err(|_| usage(format!("bad mesh size in {spec:?}")))?,
        )),
        ["random", n, seed] => Some(Geometry::Random {
            vertices: int(n)?,
            seed: seed.parse().map_err(|_| usage(format!("bad seed in {spec:?}")))?,
        }),
        _ => None,
    };
    match geometry {
        Some(g) => Ok(generate(&g)?),
        None if Path::new(spec).is_file() => Ok(parse_space_file(Path::new(spec))?),
        None => Err(usage(format!("{spec:?} is neither a built-in space nor a file"))),
    }
}

fn split_list(s: &str) -> Vec<&str> {
    let sep = if s.contains(';') { ';' } else { ',' };
    s.split(sep).map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn vertex(space: &HarmonicSpace, id: &str) -> CliResult<usize> {
    space.index_of(id).ok_or_else(|| usage(format!("unknown vertex id {id:?}")))
}

/// Parses a list of vertex ids.
pub fn parse_ids(space: &HarmonicSpace, s: &str) -> CliResult<Vec<usize>> {
    let mut v = split_list(s)
        .into_iter()
        .map(|id| vertex(space, id))
        .collect::<CliResult<Vec<_>>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// Parses `id:value` pairs into a function on the named vertices.
pub fn parse_values(space: &HarmonicSpace, s: &str) -> CliResult<ExtendedFunction> {
    let mut pairs = Vec::new();
    for item in split_list(s) {
        let (id, v) = item
            .rsplit_once(':')
            .ok_or_else(|| usage(format!("expected id:value, got {item:?}")))?;
        let value = match v.trim() {
            "inf" | "+inf" => ExtReal::Infinite,
            t => ExtReal::Finite(t.parse().map_err(|_| usage(format!("bad value {t:?}")))?),
        };
        pairs.push((vertex(space, id.trim())?, value));
    }
    pairs.sort_by_key(|p| p.0);
    if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(usage("a vertex is given two values"));
    }
    let (support, values) = pairs.into_iter().unzip();
    Ok(ExtendedFunction::new(support, values)?)
}

fn domain_of(space: &HarmonicSpace, spec: Option<&str>) -> CliResult<Domain> {
    match spec {
        None => Ok(Domain::whole(space)),
        Some(s) => Ok(Domain::new(space, parse_ids(space, s)?)?),
    }
}

fn function_table(name: &str, space: &HarmonicSpace, f: &ExtendedFunction) -> Table {
    let mut t = Table::new(name, &["vertex", "value"]);
    for (v, x) in f.iter() {
        t.push(vec![space.id(v).to_string(), num(x.finite().unwrap_or(f64::INFINITY))]);
    }
    t
}


fn variant(l: &LatticeArg) -> ThornVariant {
    match l.geometry {
        Shape::Thorn => ThornVariant::Thorn,
        Shape::Cone => ThornVariant::Cone {
            aperture_deg: l.aperture,
        },
        Shape::Halfspace => ThornVariant::Cone { aperture_deg: 90.0 },
    }
}

fn shape_name(l: &LatticeArg) -> String {
    match l.geometry {
        Shape::Thorn => "thorn".into(),
        Shape::Cone => format!("cone({})", l.aperture),
        Shape::Halfspace => "halfspace".into(),
    }
}

fn segment_refinements(ns: &[usize]) -> CliResult<Vec<Refinement>> {
    ns.iter()
        .map(|&n| {
            let l = thorn_lattice(n, ThornVariant::Thorn)?;
            Ok(Refinement {
                set: l.axis_segment(0.0, 0.25),
                space: l.space,
            })
        })
        .collect()
}

fn ball_refinements(ns: &[usize]) -> CliResult<Vec<Refinement>> {
    ns.iter()
        .map(|&n| {
            let l = thorn_lattice(n, ThornVariant::Thorn)?;
            Ok(Refinement {
                set: l.ball([0.0; 3], 0.25),
                space: l.space,
            })
        })
        .collect()
}

fn point3(v: &[f64], flag: &str) -> CliResult<[f64; 3]> {
    <[f64; 3]>::try_from(v).map_err(|_| usage(format!("--{flag} needs three coordinates")))
}

fn atlas_tables(space: Option<&HarmonicSpace>, atlas: &BoundaryAtlas) -> (Table, Table) {
    let minimal = minimality_test(atlas);
    let mut points = Table::new("atlas", &["id", "provenance", "source", "class", "minimal"]);
    for (p, point) in atlas.points.iter().enumerate() {
        let (kind, source) = match &point.provenance {
            Provenance::Absorbing { vertex } => (
                "absorbing",
                space.map_or_else(|| vertex.to_string(), |s| s.id(*vertex).to_string()),
            ),
            Provenance::Cluster { members } => ("cluster", members.join(" ")),
        };
        points.push(vec![
            point.id.clone(),
            kind.into(),
            source,
            point.class.to_string(),
            minimal[p].to_string(),
        ]);
    }
    let mut kernel = Table::new("martin_kernel", &["x", "xi", "value"]);
    for (i, x) in atlas.row_ids.iter().enumerate() {
        for (p, point) in atlas.points.iter().enumerate() {
            kernel.push(vec![x.clone(), point.id.clone(), num(atlas.kernels[(i, p)])]);
        }
    }
    (points, kernel)
}

fn execute(command: Command, line: String) -> CliResult<Report> {
    let mut r = Report::new(line);
    match command {
        Command::Gen { space } => {
            let s = load_space(&space.space)?;
            let mut t = Table::new("vertices", &["vertex", "absorbing", "killing"]);
            for v in 0..s.len() {
                t.push(vec![s.id(v).into(), s.is_absorbing(v).to_string(), num(s.killing(v))]);
            }
            r.table(t).result("vertices", s.len());
            r.files.push(("space.toml".into(), serialize_space(&s)));
        }
        Command::Dirichlet {
            space,
            g,
            domain,
            method,
        } => {
            let s = load_space(&space.space)?;
            let u = domain_of(&s, domain.as_deref())?;
            let g = parse_values(&s, &g)?;
            let h = match method {
                DirichletMethod::Solve => solve_dirichlet(&s, &u, &g)?,
                DirichletMethod::Balayage => dirichlet_via_balayage(&s, &u, &g)?,
            };
            r.tolerance("direct", DIRECT_TOL).tolerance("iterative", ITERATIVE_TOL);
            r.result("residual", harmonicity_residual(&s, &h, &u)?);
            r.table(function_table("dirichlet", &s, &h));
        }
        Command::Balayage { space, set, u, oracle } => {
            let s = load_space(&space.space)?;
            let set = parse_ids(&s, &set)?;
            let u = match u {
                Some(text) => parse_values(&s, &text)?,
                None => ExtendedFunction::constant(&set, 1.0),
            };
            let v = reduite(&s, &u, &set)?;
            r.table(function_table("reduite", &s, &v));
            if oracle {
                let o = reduite_oracle(&s, &u, &set)?;
                r.tolerance("oracle_size_cap", ORACLE_SIZE_CAP);
                r.result("oracle_difference", v.max_abs_diff(&o)?);
            }
        }
        Command::Capacity { space, set, measure } => {
            let s = load_space(&space.space)?;
            let set = parse_ids(&s, &set)?;
            let mu = match measure {
                MeasureArg::Counting => None,
                MeasureArg::Reversible => Some(
                    s.reversible_measure()
                        .ok_or_else(|| Error::InvalidSpace("space is not reversible".into()))?
                        .to_vec(),
                ),
            };
            let c = capacity_report(&s, &set, mu.as_deref())?;
            r.result(
                "measure",
                match measure {
                    MeasureArg::Counting => "counting",
                    MeasureArg::Reversible => "reversible",
                },
            );
            r.result("capacity", c.capacity).result("integral", c.integral);
            if let Some(e) = &c.equilibrium {
                r.table(function_table("equilibrium", &s, e));
            }
            r.verdict = Some(format!("capacity {}", num(c.capacity)));
        }
        Command::Green { space } => {
            let s = load_space(&space.space)?;
            let g = green_function(&s)?;
            let mut t = Table::new("green", &["x", "y", "value"]);
            for (i, &x) in g.vertices().iter().enumerate() {
                for (j, &y) in g.vertices().iter().enumerate() {
                    t.push(vec![s.id(x).into(), s.id(y).into(), num(g.matrix()[(i, j)])]);
                }
            }
            r.table(t);
        }
        Command::Martin {
            space,
            tree_depths,
            probe_depth,
            merge_tol,
            drift_tol,
        } => {
            r.tolerance("merge_tol", merge_tol).tolerance("minimality", MINIMALITY_TOL);
            let (s, atlas) = match (space, tree_depths) {
                (Some(spec), _) => {
                    let s = load_space(&spec)?;
                    let atlas = compactify_absorbing(&s, merge_tol)?;
                    (Some(s), atlas)
                }
                (None, Some(depths)) => {
                    let (levels, probes) = tree_exhaustion(&depths, probe_depth)?;
                    r.tolerance("drift_tol", drift_tol);
                    (None, compactify_exhaustion(&levels, &probes, merge_tol, drift_tol)?)
                }
                (None, None) => return Err(usage("give --space or --tree-depths")),
            };
            let (points, kernel) = atlas_tables(s.as_ref(), &atlas);
            r.result("points", atlas.len()).result("classes", atlas.class_count());
            if let Some(d) = atlas.drift {
                r.result("drift", d);
            }
            r.result("notices", atlas.notices.clone());
            r.table(points).table(kernel);
        }
        Command::Measure {
            space,
            x,
            domain,
            method,
        } => {
            let s = load_space(&space.space)?;
            let u = domain_of(&s, domain.as_deref())?;
            let x = vertex(&s, &x)?;
            let m = match method {
                MeasureMethod::Indicator => harmonic_measure(&s, &u, x)?,
                MeasureMethod::Adjoint => harmonic_measure_adjoint(&s, &u, x)?,
            };
            let mut t = Table::new("harmonic_measure", &["boundary_id", "weight"]);
            for (_, id, w) in m.iter() {
                t.push(vec![id.into(), num(w)]);
            }
            r.result("total_mass", m.total_mass()).table(t);
        }
        Command::Represent { space, h, g, tol } => {
            let s = load_space(&space.space)?;
            let h = match (h, g) {
                (Some(text), _) => parse_values(&s, &text)?,
                (None, Some(text)) => solve_dirichlet(&s, &Domain::whole(&s), &parse_values(&s, &text)?)?,
                (None, None) => return Err(usage("give --h or --g")),
            };
            let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL)?;
            let rep = martin_representation(&atlas, &h, tol)?;
            r.tolerance("representation", tol);
            r.result("residual", rep.residual)
                .result("rank", rep.rank)
                .result("unique", rep.unique)
                .result("total_mass", rep.measure.total_mass());
            let mut t = Table::new("representation", &["point_id", "weight"]);
            for (_, id, w) in rep.measure.iter() {
                t.push(vec![id.into(), num(w)]);
            }
            r.table(t);
        }
        Command::Wiener {
            lattice,
            n,
            form,
            ratio,
        } => {
            let l = thorn_lattice(n, variant(&lattice))?;
            let form = match form {
                FormArg::Literal => WienerForm::Literal,
                FormArg::Intersection => WienerForm::Intersection,
            };
            let shells = n.trailing_zeros() as usize;
            let w = wiener_series(&l.space, &l.set, l.tip, shells, form)?;
            let mut t = Table::new("wiener", &["k", "radius", "size", "capacity", "increment", "partial_sum"]);
            for sh in &w.shells {
                t.push(vec![
                    sh.k.to_string(),
                    num(sh.radius),
                    sh.size.to_string(),
                    num(sh.capacity),
                    num(sh.increment),
                    num(sh.partial_sum),
                ]);
            }
            let verdict = if w.decays(ratio) {
                "decays"
            } else if w.bounded_below(ratio) {
                "bounded_below"
            } else {
                "inconclusive"
            };
            r.tolerance("ratio", ratio);
            r.result("geometry", shape_name(&lattice))
                .result("n", n)
                .result("form", format!("{form:?}").to_lowercase())
                .result("ratios", w.ratios())
                .result("notices", w.notices.clone())
                .result("verdict", verdict);
            r.verdict = Some(format!("wiener {} n={n}: {verdict}", shape_name(&lattice)));
            r.table(t);
        }
        Command::Regularity { lattice, n, tol } => {
            let mut t = Table::new(
                "regularity",
                &["n", "gap", "limit_estimate", "tip_value", "attained", "thin_profile_last", "thin"],
            );
            let mut gaps = Vec::new();
            for &res in &n {
                let l = thorn_lattice(res, variant(&lattice))?;
                let f = ExtendedFunction::constant(&l.set, 1.0);
                let reg = regularity_test(&l.space, &l.set, l.tip, &f, tol)?;
                let thin = thin_at(&l.space, &l.set, l.tip, &default_radii(res), THIN_THRESHOLD)?;
                gaps.push(reg.gap);
                t.push(vec![
                    res.to_string(),
                    num(reg.gap),
                    num(reg.limit_estimate),
                    num(reg.tip_value),
                    reg.attained.to_string(),
                    num(thin.profile.last().map_or(0.0, |p| p.1)),
                    thin.thin.to_string(),
                ]);
            }
            r.tolerance("gap", tol).tolerance("thin_threshold", THIN_THRESHOLD);
            r.result("geometry", shape_name(&lattice)).result("gaps", gaps);
            r.table(t);
        }
        Command::Polar {
            set,
            n,
            rule,
            threshold,
        } => {
            let refinements = match set {
                PolarSet::Segment => segment_refinements(&n)?,
                PolarSet::Ball => ball_refinements(&n)?,
            };
            let rule = match rule {
                RuleArg::Extrapolated => VanishingRule::Extrapolated(threshold),
                RuleArg::Ratio => VanishingRule::Ratio(threshold),
            };
            let p = polar_flag(&refinements, rule)?;
            let mut t = Table::new("polar", &["n", "spacing", "capacity"]);
            for ((res, h), c) in n.iter().zip(&p.spacings).zip(&p.capacities) {
                t.push(vec![res.to_string(), num(*h), num(*c)]);
            }
            let flag = match p.flag {
                PolarFlag::Vanishing => "vanishing",
                PolarFlag::NonVanishing => "non_vanishing",
            };
            r.tolerance("threshold", threshold);
            r.result("rule", format!("{rule:?}"))
                .result("ratio", p.ratio)
                .result("extrapolated", p.extrapolated)
                .result("flag", flag);
            r.verdict = Some(format!("polar {set:?}: {flag}").to_lowercase());
            r.table(t);
        }
        Command::Witness { n, check, set_point } => {
            let check = point3(&check, "check")?;
            let set_point = point3(&set_point, "set-point")?;
            let w = polar_witness(&segment_refinements(&n)?, check, set_point, VanishingRule::default())?;
            let mut t = Table::new(
                "witness",
                &["level", "n", "capacity", "scale", "term_at_check", "term_at_set", "deficiency", "u_check", "u_set"],
            );
            for (i, lv) in w.levels.iter().enumerate() {
                t.push(vec![
                    (i + 1).to_string(),
                    n[i].to_string(),
                    num(lv.capacity),
                    num(lv.scale),
                    num(lv.term_at_check),
                    num(lv.term_at_set),
                    num(lv.deficiency),
                    num(w.at_check[i]),
                    num(w.at_set[i]),
                ]);
            }
            r.result("bound", w.bound).table(t);
        }
        Command::Mc {
            space,
            x,
            y,
            domain,
            samples,
            seed,
        } => {
            let s = load_space(&space.space)?;
            let u = domain_of(&s, domain.as_deref())?;
            let xv = vertex(&s, &x)?;
            r.seeds.push(seed);
            let m = mc_hitting(&s, &u, xv, samples, seed)?;
            let exact = harmonic_measure(&s, &u, xv)?;
            let mut t = Table::new("mc_measure", &["boundary_id", "weight", "stderr", "exact"]);
            for i in 0..m.support.len() {
                t.push(vec![
                    m.labels[i].clone(),
                    num(m.weights[i]),
                    num(m.stderr[i]),
                    num(exact.weights[i]),
                ]);
            }
            r.result("samples", samples).result("killed", m.killed).table(t);
            if let Some(y) = y {
                let yv = vertex(&s, &y)?;
                let g = mc_green(&s, xv, yv, samples, seed)?;
                r.result("green_mean", g.mean).result("green_stderr", g.stderr);
            }
        }
        Command::Verify { quick, seed } => {
            r.seeds.push(seed);
            let checks = run_checks(quick, seed);
            let mut t = Table::new("verify", &["check", "passed", "value", "bound"]);
            for c in &checks {
                t.push(vec![c.name.clone(), c.passed.to_string(), num(c.value), num(c.bound)]);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            r.result("checks", checks.len()).result("failed", failed);
            r.verdict = Some(format!("verify: {} checks, {failed} failed", checks.len()));
            r.table(t);
            if failed > 0 {
                return Err(CliError::Checks(Box::new(r)));
            }
        }
    }
    Ok(r)
}

/// The command line as recorded in reports: the arguments after the program
/// name, without `--out` so the report does not depend on where it lands.
fn recorded_line(args: &[OsString]) -> String {
    let mut parts = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        let a = a.to_string_lossy();
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            parts.push(a.into_owned());
        }
    }
    parts.join(" ")
}

/// Parses the arguments (program name first), runs the command and writes
/// its report. Returns the report and the output directory.
pub fn dispatch<I, T>(args: I) -> std::result::Result<(Report, PathBuf), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&args).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
        _ => usage(e.to_string()),
    })?;
    let out = cli.out;
    match execute(cli.command, recorded_line(&args)) {
        Ok(r) => {
            r.write(&out)?;
            Ok((r, out))
        }
        Err(CliError::Checks(r)) => {
            r.write(&out)?;
            Err(CliError::Checks(r))
        }
        Err(e) => Err(e),
    }
}

/// Entry point for the binary: returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match dispatch(args) {
        Ok((r, out)) => {
            if let Some(v) = &r.verdict {
                println!("{v}");
            }
            println!("wrote {}", out.display());
            0
        }
        Err(CliError::Help(text)) => {
            print!("{text}");
            0
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", msg.trim_end());
            2
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(CliError::Checks(r)) => {
            if let Some(v) = &r.verdict {
                println!("{v}");
            }
            1
        }
    }
}

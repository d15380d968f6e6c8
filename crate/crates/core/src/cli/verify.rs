//! The invariant suite run by `verify`. Every check is deterministic given
//! the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::space_file::{parse_space_str, serialize_space};
use crate::balayage::{capacity, dirichlet_via_balayage, reduite, reduite_oracle, riesz_decompose};
use crate::dirichlet::{harmonicity_residual, harnack_constant, solve_dirichlet, DirichletSolver};
use crate::error::Result;
use crate::martin::{compactify_absorbing, green_function, minimality_test, DEFAULT_MERGE_TOL};
use crate::mc::{mc_green, mc_hitting};
use crate::measure::{harmonic_measure, martin_representation, pushforward_compare, represent};
use crate::polar::{polar_flag, regularity_test, thorn_lattice, PolarFlag, Refinement, ThornVariant, VanishingRule};
use crate::space::{generate, random_network, Domain, ExtendedFunction, Geometry, HarmonicSpace};

/// One line of the verify report: `passed` iff `value ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

fn check(name: &str, bound: f64, value: Result<f64>) -> Check {
    let value = value.unwrap_or(f64::INFINITY);
    Check {
        name: name.to_string(),
        passed: value <= bound,
        value,
        bound,
    }
}

/// `max(a, b)` with NaN counted as an infinite error.
fn max_err(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

fn builtin(g: Geometry) -> HarmonicSpace {
    generate(&g).expect("built-in geometry")
}

fn path5_closed_forms() -> Result<f64> {
    let s = builtin(Geometry::Path(5));
    let whole = Domain::whole(&s);
    let h = solve_dirichlet(&s, &whole, &ExtendedFunction::from_pairs([(0, 0.0), (4, 1.0)])?)?;
    let g = green_function(&s)?;
    let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL)?;
    let left = atlas.column(atlas.index_of("0").expect("left end is a boundary point"));
    let omega = harmonic_measure(&s, &whole, 1)?;
    let got = [
        h.value(1)?,
        h.value(2)?,
        g.value(2, 2)?,
        g.value(1, 1)?,
        capacity(&s, &[2], None)?,
        omega.weight_of(0).unwrap_or(f64::NAN),
        left[0],
        left[1],
        left[2],
    ];
    let want = [0.25, 0.5, 2.0, 1.5, 0.5, 0.75, 1.5, 1.0, 0.5];
    Ok(got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, max_err))
}

fn random_boundary_data(domain: &Domain, rng: &mut ChaCha8Rng) -> Result<ExtendedFunction> {
    ExtendedFunction::from_pairs(domain.boundary().iter().map(|&b| (b, rng.random_range(0.0..1.0))))
}

fn balayage_identity(count: u64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let s = random_network(rng.random_range(3..=20), seed.wrapping_add(i))?;
        let interior: Vec<usize> = s.non_absorbing().into_iter().filter(|_| rng.random_bool(0.7)).collect();
        let domain = match Domain::new(&s, interior) {
            Ok(d) if !d.interior().is_empty() => d,
            _ => Domain::whole(&s),
        };
        let g = random_boundary_data(&domain, &mut rng)?;
        let a = dirichlet_via_balayage(&s, &domain, &g)?;
        let b = solve_dirichlet(&s, &domain, &g)?;
        worst = max_err(worst, a.max_abs_diff(&b)?);
    }
    Ok(worst)
}

fn reduite_identity(count: u64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let s = random_network(rng.random_range(2..=8), seed.wrapping_add(1000 + i))?;
        let n = s.len();
        let mut set: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if set.is_empty() {
            set.push(rng.random_range(0..n));
        }
        let u = ExtendedFunction::from_dense(&(0..n).map(|_| rng.random_range(0.0..2.0)).collect::<Vec<_>>());
        worst = max_err(worst, reduite(&s, &u, &set)?.max_abs_diff(&reduite_oracle(&s, &u, &set)?)?);
    }
    Ok(worst)
}

fn representation_identity(count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = builtin(Geometry::Grid2d(5));
    let whole = Domain::whole(&s);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let g = random_boundary_data(&whole, &mut rng)?;
        let h = solve_dirichlet(&s, &whole, &g)?;
        for &x in whole.interior() {
            worst = max_err(worst, (represent(&s, &whole, &g, x)? - h.value(x)?).abs());
        }
    }
    Ok(worst)
}

fn riesz_split(seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for g in [Geometry::Path(7), Geometry::Grid2d(5), Geometry::BinaryTree(4)] {
        let s = builtin(g);
        let whole = Domain::whole(&s);
        let data = random_boundary_data(&whole, &mut rng)?;
        let harmonic = solve_dirichlet(&s, &whole, &data)?.to_dense(s.len(), 0.0)?;
        let solver = DirichletSolver::new(&s, &whole)?;
        let y = whole.interior()[rng.random_range(0..whole.interior().len())];
        let column = solver.green_column(y)?;
        let mut u = harmonic.clone();
        for (k, &x) in whole.interior().iter().enumerate() {
            u[x] += column[k];
        }
        let r = riesz_decompose(&s, &ExtendedFunction::from_dense(&u), 1e-10)?;
        let split = (0..s.len())
            .map(|x| Ok((r.harmonic.value(x)? + r.potential.value(x)? - u[x]).abs()))
            .collect::<Result<Vec<f64>>>()?;
        worst = [harmonicity_residual(&s, &r.harmonic, &whole)?, r.tail_norm]
            .into_iter()
            .chain(split)
            .fold(worst, max_err);
    }
    Ok(worst)
}

fn martin_spaces() -> Vec<HarmonicSpace> {
    vec![
        builtin(Geometry::Path(5)),
        builtin(Geometry::Grid2d(4)),
        builtin(Geometry::BinaryTree(4)),
    ]
}

fn pushforward() -> Result<f64> {
    martin_spaces().iter().try_fold(0.0f64, |m, s| {
        let atlas = compactify_absorbing(s, DEFAULT_MERGE_TOL)?;
        Ok(max_err(m, pushforward_compare(s, &atlas, None)?))
    })
}

/// Synthesized weights on class representatives, recovered by the
/// representation; also the total weight of the constant 1.
fn representation_round_trip(seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut weights_err, mut constant_err) = (0.0f64, 0.0f64);
    for s in martin_spaces() {
        let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL)?;
        let c: Vec<f64> = (0..atlas.class_count()).map(|_| rng.random_range(0.5..2.0)).collect();
        let reps = atlas.representative_matrix();
        let h = ExtendedFunction::from_pairs(
            atlas
                .rows
                .iter()
                .enumerate()
                .map(|(i, &x)| (x, (0..c.len()).map(|j| c[j] * reps[(i, j)]).sum())),
        )?;
        let r = martin_representation(&atlas, &h, 1e-9)?;
        for (a, b) in r.measure.weights.iter().zip(&c) {
            weights_err = max_err(weights_err, (a - b).abs());
        }
        let one = ExtendedFunction::constant(&atlas.rows, 1.0);
        let r = martin_representation(&atlas, &one, 1e-9)?;
        constant_err = max_err(constant_err, (r.measure.total_mass() - 1.0).abs());
    }
    Ok((weights_err, constant_err))
}

fn non_minimal_points() -> Result<f64> {
    martin_spaces().iter().try_fold(0.0, |m, s| {
        let atlas = compactify_absorbing(s, DEFAULT_MERGE_TOL)?;
        Ok(m + minimality_test(&atlas).iter().filter(|&&b| !b).count() as f64)
    })
}

/// `sup_K h / inf_K h`.
fn spread_on(h: &ExtendedFunction, k: &[usize]) -> Result<f64> {
    let values = k.iter().map(|&v| h.value(v)).collect::<Result<Vec<_>>>()?;
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
}

/// Violations of `sup_K h ≤ C inf_K h` over random positive harmonic
/// functions, and the distance between `C` and the best exit column.
fn harnack(count: usize, seed: u64) -> Result<(f64, f64)> {
    let s = builtin(Geometry::Grid2d(7));
    let whole = Domain::whole(&s);
    let k: Vec<usize> = (2..5).flat_map(|i| (2..5).map(move |j| i * 7 + j)).collect();
    let hc = harnack_constant(&s, &k, &whole)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0.0;
    for _ in 0..count {
        let g = ExtendedFunction::from_pairs(whole.boundary().iter().map(|&b| (b, rng.random_range(0.0..1.0))))?;
        let h = solve_dirichlet(&s, &whole, &g)?;
        if spread_on(&h, &k)? > hc.constant * (1.0 + 1e-12) {
            violations += 1.0;
        }
    }
    let best = whole.boundary().iter().try_fold(0.0f64, |m, &b| {
        let indicator = ExtendedFunction::from_pairs(whole.boundary().iter().map(|&c| (c, f64::from(c == b))))?;
        let h = solve_dirichlet(&s, &whole, &indicator)?;
        Ok::<f64, crate::Error>(max_err(m, spread_on(&h, &k)?))
    })?;
    Ok((violations, (best - hc.constant).abs()))
}

fn capacity_green_identity(count: u64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let s = random_network(rng.random_range(3..=15), seed.wrapping_add(2000 + i))?;
        let free = s.non_absorbing();
        let a = free[rng.random_range(0..free.len())];
        let g = green_function(&s)?;
        worst = max_err(worst, (capacity(&s, &[a], None)? * g.value(a, a)? - 1.0).abs());
    }
    Ok(worst)
}

/// Monotonicity and subadditivity violations with the reversible measure.
fn capacity_laws(count: u64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0.0;
    for i in 0..count {
        let s = random_network(rng.random_range(3..=12), seed.wrapping_add(3000 + i))?;
        let m = s.reversible_measure().map(<[f64]>::to_vec);
        let free = s.non_absorbing();
        let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> {
            let mut v: Vec<usize> = free.iter().copied().filter(|_| rng.random_bool(0.4)).collect();
            if v.is_empty() {
                v.push(free[rng.random_range(0..free.len())]);
            }
            v
        };
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let mut union: Vec<usize> = a.iter().chain(&b).copied().collect();
        union.sort_unstable();
        union.dedup();
        let cap = |set: &[usize]| capacity(&s, set, m.as_deref());
        let (ca, cb, cu) = (cap(&a)?, cap(&b)?, cap(&union)?);
        let tol = 1e-9 * cu.max(1.0);
        if ca > cu + tol || cb > cu + tol {
            violations += 1.0;
        }
        if cu > ca + cb + tol {
            violations += 1.0;
        }
    }
    Ok(violations)
}

fn green_symmetry(count: u64, seed: u64) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..count {
        let s = random_network(3 + (i as usize % 10), seed.wrapping_add(4000 + i))?;
        let Some(m) = s.reversible_measure() else { continue };
        let g = green_function(&s)?;
        for &x in g.vertices() {
            for &y in g.vertices() {
                let (a, b) = (m[x] * g.value(x, y)?, m[y] * g.value(y, x)?);
                worst = max_err(worst, (a - b).abs() / a.abs().max(b.abs()).max(1e-300));
            }
        }
    }
    Ok(worst)
}

/// Largest `|estimate − exact|/stderr` over exit weights and Green values.
fn monte_carlo(samples: usize, seed: u64, spaces: &[Geometry]) -> Result<f64> {
    let mut worst = 0.0f64;
    for g in spaces {
        let s = builtin(g.clone());
        let whole = Domain::whole(&s);
        let x = s.base_point();
        let exact = harmonic_measure(&s, &whole, x)?;
        let est = mc_hitting(&s, &whole, x, samples, seed)?;
        for i in 0..exact.weights.len() {
            let diff = (est.weights[i] - exact.weights[i]).abs();
            if diff > 0.0 {
                worst = max_err(worst, diff / est.stderr[i].max(1e-300));
            }
        }
        let green = green_function(&s)?;
        let est = mc_green(&s, x, x, samples, seed)?;
        worst = max_err(worst, (est.mean - green.value(x, x)?).abs() / est.stderr.max(1e-300));
    }
    Ok(worst)
}

fn space_file_round_trip() -> Result<f64> {
    let spaces = [
        builtin(Geometry::Path(5)),
        builtin(Geometry::Grid2d(4)),
        random_network(9, 5)?,
    ];
    Ok(spaces
        .iter()
        .map(|s| parse_space_str(&serialize_space(s)).map_or(1.0, |p| f64::from(p != *s)))
        .sum())
}

/// Regularity gaps at the lattice tip must order halfspace < cone < thorn.
fn regularity_order(n: usize) -> Result<f64> {
    let gap = |v: ThornVariant| -> Result<f64> {
        let l = thorn_lattice(n, v)?;
        let f = ExtendedFunction::constant(&l.set, 1.0);
        Ok(regularity_test(&l.space, &l.set, l.tip, &f, 0.05)?.gap)
    };
    let half = gap(ThornVariant::Cone { aperture_deg: 90.0 })?;
    let cone = gap(ThornVariant::Cone { aperture_deg: 45.0 })?;
    let thorn = gap(ThornVariant::Thorn)?;
    Ok(f64::from(!(half < cone && cone < thorn)))
}

/// Segment flagged vanishing and ball non-vanishing over the resolutions.
fn polar_flags(ns: &[usize]) -> Result<f64> {
    let mut seg = Vec::new();
    let mut ball = Vec::new();
    for &n in ns {
        let l = thorn_lattice(n, ThornVariant::Thorn)?;
        seg.push(Refinement {
            set: l.axis_segment(0.0, 0.25),
            space: l.space.clone(),
        });
        ball.push(Refinement {
            set: l.ball([0.0; 3], 0.25),
            space: l.space,
        });
    }
    let rule = VanishingRule::default();
    let wrong = f64::from(polar_flag(&seg, rule)?.flag != PolarFlag::Vanishing)
        + f64::from(polar_flag(&ball, rule)?.flag != PolarFlag::NonVanishing);
    Ok(wrong)
}

/// Runs the suite; `quick` uses smaller sample counts and skips the
/// refined lattices.
pub fn run_checks(quick: bool, seed: u64) -> Vec<Check> {
    let scale = |q: u64, full: u64| if quick { q } else { full };
    let mut out = vec![
        check("path5_closed_forms", 1e-10, path5_closed_forms()),
        check("dirichlet_via_balayage", 1e-9, balayage_identity(scale(20, 100), seed)),
        check("reduite_oracle", 1e-9, reduite_identity(scale(30, 200), seed)),
        check(
            "harmonic_measure_representation",
            1e-10,
            representation_identity(scale(10, 100) as usize, seed),
        ),
        check("riesz_decomposition", 1e-10, riesz_split(seed)),
        check("pushforward_identity", 1e-10, pushforward()),
    ];
    let (weights, constant) = match representation_round_trip(seed) {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e), Ok(f64::INFINITY)),
    };
    out.push(check("representation_round_trip", 1e-9, weights));
    out.push(check("constant_total_weight", 1e-9, constant));
    out.push(check("atlas_points_minimal", 0.0, non_minimal_points()));
    let (violations, attained) = match harnack(scale(100, 1000) as usize, seed) {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e), Ok(f64::INFINITY)),
    };
    out.push(check("harnack_violations", 0.0, violations));
    out.push(check("harnack_attained", 1e-6, attained));
    out.push(check("capacity_green_identity", 1e-9, capacity_green_identity(scale(10, 50), seed)));
    out.push(check("capacity_laws_reversible", 0.0, capacity_laws(scale(40, 200), seed)));
    out.push(check("green_symmetry", 1e-9, green_symmetry(scale(10, 40), seed)));
    let mc_spaces = if quick {
        vec![Geometry::Path(5)]
    } else {
        vec![Geometry::Path(5), Geometry::Grid2d(4)]
    };
    out.push(check(
        "monte_carlo_within_3_sigma",
        3.0,
        monte_carlo(scale(10_000, 100_000) as usize, seed, &mc_spaces),
    ));
    out.push(check("space_file_round_trip", 0.0, space_file_round_trip()));
    out.push(check("regularity_gap_order_n16", 0.0, regularity_order(16)));
    if !quick {
        out.push(check("regularity_gap_order_n32", 0.0, regularity_order(32)));
        out.push(check("polar_flags_n16_n32", 0.0, polar_flags(&[16, 32])));
    }
    out
}

//! Box lattices with thorn and cone obstacles, Wiener series, boundary
//! regularity, polarity across refinements, divergence witnesses and
//! thinness.

use std::collections::HashMap;

use crate::balayage::{capacity, equilibrium_potential};
use crate::dirichlet::{superharmonic_deficiency, DirichletSolver};
use crate::error::{Error, Result};
use crate::martin::{dm_metric, KernelTable};
use crate::space::{Domain, ExtendedFunction, HarmonicSpace, SpaceBuilder};

/// Resolutions accepted by [`thorn_lattice`].
pub const RESOLUTIONS: [usize; 4] = [16, 32, 64, 128];

/// Obstacle shape attached at the tip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThornVariant {
    /// `x₃ > 0, x₁² + x₂² ≤ exp(−1/x₃²)`.
    Thorn,
    /// `x₃ > 0, √(x₁² + x₂²) ≤ x₃·tan(θ)` with half-angle `θ` in degrees;
    /// 90° gives the open upper half-space.
    Cone { aperture_deg: f64 },
}

impl ThornVariant {
    pub fn contains(&self, p: [f64; 3]) -> bool {
        let [x, y, z] = p;
        if z <= 0.0 {
            return false;
        }
        match *self {
            ThornVariant::Thorn => x * x + y * y <= (-1.0 / (z * z)).exp(),
            ThornVariant::Cone { aperture_deg } => {
                aperture_deg >= 90.0 || (x * x + y * y).sqrt() <= z * aperture_deg.to_radians().tan() + 1e-12
            }
        }
    }
}

/// A box lattice over `[−½, ½]³` with spacing `1/n`, absorbing faces, an
/// obstacle set and the tip at the origin.
#[derive(Debug, Clone)]
pub struct ThornLattice {
    pub space: HarmonicSpace,
    pub set: Vec<usize>,
    pub tip: usize,
    pub n: usize,
}

impl ThornLattice {
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Vertex at lattice offsets `(i, j, k)` from the tip, if inside the box.
    pub fn offset(&self, i: i64, j: i64, k: i64) -> Option<usize> {
        lattice_offset(self.n, self.tip, i, j, k)
    }

    /// Non-absorbing vertices whose coordinates satisfy `pred`.
    pub fn select(&self, pred: impl Fn([f64; 3]) -> bool) -> Vec<usize> {
        select(&self.space, pred)
    }

    /// The lattice segment `{x₁ = x₂ = 0, z₀ ≤ x₃ ≤ z₁}`.
    pub fn axis_segment(&self, z0: f64, z1: f64) -> Vec<usize> {
        let eps = 1e-9;
        self.select(|[x, y, z]| x.abs() < eps && y.abs() < eps && z >= z0 - eps && z <= z1 + eps)
    }

    /// Lattice points within distance `r` of `center`.
    pub fn ball(&self, center: [f64; 3], r: f64) -> Vec<usize> {
        self.select(|p| dist(p, center) <= r + 1e-9)
    }
}

fn lattice_offset(n: usize, tip: usize, i: i64, j: i64, k: i64) -> Option<usize> {
    let side = (n + 1) as i64;
    let t = tip as i64;
    let (ti, tj, tk) = (t / (side * side), (t / side) % side, t % side);
    let (a, b, c) = (ti + i, tj + j, tk + k);
    let ok = |v: i64| (0..side).contains(&v);
    (ok(a) && ok(b) && ok(c)).then(|| ((a * side + b) * side + c) as usize)
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn coords_of(space: &HarmonicSpace) -> Result<&[[f64; 3]]> {
    space
        .coords()
        .ok_or_else(|| Error::InvalidSpace("space has no vertex coordinates".into()))
}

/// Non-absorbing vertices of a space with coordinates satisfying `pred`.
pub fn select(space: &HarmonicSpace, pred: impl Fn([f64; 3]) -> bool) -> Vec<usize> {
    match space.coords() {
        Some(c) => (0..space.len())
            .filter(|&v| !space.is_absorbing(v) && pred(c[v]))
            .collect(),
        None => Vec::new(),
    }
}

/// The unit-conductance box lattice of side `n` with absorbing faces.
pub fn box_lattice(n: usize) -> Result<HarmonicSpace> {
    if !RESOLUTIONS.contains(&n) {
        return Err(Error::UnsupportedResolution(n));
    }
    let side = n + 1;
    let at = |i: usize, j: usize, k: usize| (i * side + j) * side + k;
    let h = 1.0 / n as f64;
    let mut b = SpaceBuilder::new(
        (0..side * side * side).map(|v| format!("{},{},{}", v / (side * side), (v / side) % side, v % side)),
    );
    let face = |i: usize| i == 0 || i == n;
    let mut coords = Vec::with_capacity(side * side * side);
    for i in 0..side {
        for j in 0..side {
            for k in 0..side {
                let v = at(i, j, k);
                if i + 1 < side {
                    b.edge(v, at(i + 1, j, k), 1.0);
                }
                if j + 1 < side {
                    b.edge(v, at(i, j + 1, k), 1.0);
                }
                if k + 1 < side {
                    b.edge(v, at(i, j, k + 1), 1.0);
                }
                if face(i) || face(j) || face(k) {
                    b.absorbing(v);
                }
                coords.push([i as f64 * h - 0.5, j as f64 * h - 0.5, k as f64 * h - 0.5]);
            }
        }
    }
    b.base_point(at(n / 2, n / 2, n / 2));
    b.coords(coords, Some(h));
    b.build()
}

pub fn thorn_lattice(n: usize, variant: ThornVariant) -> Result<ThornLattice> {
    let space = box_lattice(n)?;
    let tip = space.base_point();
    let set = select(&space, |p| variant.contains(p));
    Ok(ThornLattice { space, set, tip, n })
}

/// Which set the Wiener terms measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WienerForm {
    /// `Cap(B(x₀, 2⁻ᵏ) ∖ A)`, as the series is written for the thorn.
    Literal,
    /// `Cap(B(x₀, 2⁻ᵏ) ∩ A)`, the classical Wiener criterion.
    Intersection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub k: usize,
    pub radius: f64,
    pub size: usize,
    /// Normalized capacity `h·Cap`.
    pub capacity: f64,
    pub increment: f64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WienerSeries {
    pub form: WienerForm,
    pub shells: Vec<Shell>,
    pub notices: Vec<String>,
}

/// Ratio threshold shared by the decay and bounded-below verdicts.
pub const WIENER_RATIO: f64 = 0.5;

impl WienerSeries {
    pub fn increments(&self) -> Vec<f64> {
        self.shells.iter().map(|s| s.increment).collect()
    }

    /// Successive increment ratios `inc_{k+1}/inc_k`.
    pub fn ratios(&self) -> Vec<f64> {
        self.shells
            .windows(2)
            .map(|w| w[1].increment / w[0].increment)
            .collect()
    }

    /// Each of the last two ratios (last three shells) is at most `ratio`.
    pub fn decays(&self, ratio: f64) -> bool {
        let r = self.ratios();
        r.len() >= 2 && r[r.len() - 2..].iter().all(|&q| q <= ratio)
    }

    /// Every ratio is at least `ratio`.
    pub fn bounded_below(&self, ratio: f64) -> bool {
        !self.ratios().is_empty() && self.ratios().iter().all(|&q| q >= ratio)
    }
}

/// Partial sums `s_k = Σ_{j ≤ k} 2ʲ·Cap_j` over shells `k = 1..=shells`.
/// A shell is valid when its ball stays clear of the absorbing boundary and
/// is non-empty; an empty shell ends the series with a notice.
pub fn wiener_series(
    space: &HarmonicSpace,
    set: &[usize],
    tip: usize,
    shells: usize,
    form: WienerForm,
) -> Result<WienerSeries> {
    let coords = coords_of(space)?;
    let h = space
        .spacing()
        .ok_or_else(|| Error::InvalidSpace("lattice spacing unknown".into()))?;
    let mut in_set = vec![false; space.len()];
    for &a in set {
        in_set[a] = true;
    }
    let mut out = WienerSeries {
        form,
        shells: Vec::new(),
        notices: Vec::new(),
    };
    let reach = space
        .absorbing_vertices()
        .iter()
        .map(|&a| dist(coords[a], coords[tip]))
        .fold(f64::INFINITY, f64::min);
    let mut partial = 0.0;
    for k in 1..=shells {
        let radius = 0.5f64.powi(k as i32);
        if radius >= reach - 1e-12 {
            out.notices.push(format!("shell {k} reaches the absorbing boundary; skipped"));
            continue;
        }
        let members = select(space, |p| dist(p, coords[tip]) <= radius + 1e-9);
        let members: Vec<usize> = members
            .into_iter()
            .filter(|&v| match form {
                WienerForm::Literal => !in_set[v],
                WienerForm::Intersection => in_set[v],
            })
            .collect();
        if members.is_empty() {
            out.notices.push(format!(
                "shell {k} is empty at this resolution; {} valid shells",
                out.shells.len()
            ));
            break;
        }
        let cap = h * capacity(space, &members, None)?;
        let increment = 2f64.powi(k as i32) * cap;
        partial += increment;
        out.shells.push(Shell {
            k,
            radius,
            size: members.len(),
            capacity: cap,
            increment,
            partial_sum: partial,
        });
    }
    Ok(out)
}

/// Outcome of [`regularity_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct Regularity {
    pub attained: bool,
    pub gap: f64,
    /// Solution at the tip and at the axis vertices `1, 2, 3` steps below.
    pub axis_values: [f64; 4],
    pub limit_estimate: f64,
    pub tip_value: f64,
}

/// Default gap below which the boundary value counts as attained.
pub const REGULARITY_TOL: f64 = 0.05;

/// Solves the Dirichlet problem on `interior ∖ A` with data `f` on `A` and
/// on the absorbing faces (missing values count as 0), then compares the
/// limit of the solution along the axis toward the tip with the boundary
/// value at the tip (the value of `f` on the nearest obstacle vertex).
///
/// The limit is the quadratic extrapolation `3h₁ − 3h₂ + h₃` from the axis
/// vertices one, two and three steps below the tip, clamped to lie between
/// `h₁` and the largest boundary value.
pub fn regularity_test(
    space: &HarmonicSpace,
    set: &[usize],
    tip: usize,
    f: &ExtendedFunction,
    tol: f64,
) -> Result<Regularity> {
    if set.contains(&tip) {
        return Err(Error::DegenerateTest("the tip lies in the obstacle".into()));
    }
    let coords = coords_of(space)?;
    let h = space
        .spacing()
        .ok_or_else(|| Error::InvalidSpace("lattice spacing unknown".into()))?;
    let nearest = *set
        .iter()
        .min_by(|&&a, &&b| dist(coords[a], coords[tip]).total_cmp(&dist(coords[b], coords[tip])))
        .ok_or(Error::EmptySet("obstacle"))?;
    let mut in_set = vec![false; space.len()];
    for &a in set {
        in_set[a] = true;
    }
    let domain = Domain::new(space, space.non_absorbing().into_iter().filter(|&v| !in_set[v]))?;
    let mut data = vec![0.0; space.len()];
    let mut top = f64::NEG_INFINITY;
    for &b in domain.boundary() {
        data[b] = f.get(b).and_then(|v| v.finite()).unwrap_or(0.0);
        top = top.max(data[b]);
    }
    let sol = DirichletSolver::new(space, &domain)?.solve_dense(&data)?;
    let key = |c: [f64; 3]| [(c[0] / h).round() as i64, (c[1] / h).round() as i64, (c[2] / h).round() as i64];
    let t = key(coords[tip]);
    let wanted: HashMap<[i64; 3], usize> = (0..4).map(|j| ([t[0], t[1], t[2] - j as i64], j)).collect();
    let mut axis = [usize::MAX; 4];
    for (v, &c) in coords.iter().enumerate() {
        if let Some(&j) = wanted.get(&key(c)) {
            axis[j] = v;
        }
    }
    if axis.contains(&usize::MAX) {
        return Err(Error::DegenerateTest("fewer than three axis vertices below the tip".into()));
    }
    let values = axis.map(|v| sol[v]);
    let tip_value = f.get(nearest).and_then(|v| v.finite()).unwrap_or(0.0);
    let (h1, h2, h3) = (values[1], values[2], values[3]);
    let limit_estimate = (3.0 * h1 - 3.0 * h2 + h3).clamp(h1.min(top), h1.max(top));
    let gap = (limit_estimate - tip_value).abs();
    Ok(Regularity {
        attained: gap < tol,
        gap,
        axis_values: values,
        limit_estimate,
        tip_value,
    })
}

/// A continuum set discretized at one resolution.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub space: HarmonicSpace,
    pub set: Vec<usize>,
}

/// How [`polar_flag`] decides that capacities vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VanishingRule {
    /// `last/first < ratio` with a nonincreasing sequence.
    Ratio(f64),
    /// Fit `Cap_n ≈ a + b/ln n` (the slowest decay of a set with zero
    /// capacity in three dimensions, a segment) and require
    /// `max(a, 0) < ratio·first` with a nonincreasing sequence.
    Extrapolated(f64),
}

impl Default for VanishingRule {
    fn default() -> Self {
        VanishingRule::Extrapolated(0.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarFlag {
    Vanishing,
    NonVanishing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarReport {
    pub flag: PolarFlag,
    /// Normalized capacities `h·Cap(A_n)`.
    pub capacities: Vec<f64>,
    pub spacings: Vec<f64>,
    /// `last/first`.
    pub ratio: f64,
    /// Limit of the `a + b/ln n` fit (clamped at 0).
    pub extrapolated: f64,
}

fn refinement_spacings(refinements: &[Refinement]) -> Result<Vec<f64>> {
    let spacings = refinements
        .iter()
        .map(|r| {
            r.space
                .spacing()
                .ok_or_else(|| Error::Refinement("refinement without lattice spacing".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    if spacings.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Refinement("spacings must strictly decrease".into()));
    }
    Ok(spacings)
}

fn extrapolate(spacings: &[f64], caps: &[f64]) -> f64 {
    if caps.len() < 2 {
        return caps.first().copied().unwrap_or(0.0);
    }
    let xs: Vec<f64> = spacings.iter().map(|h| 1.0 / (1.0 / h).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = caps.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(caps).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    (my - b * mx).max(0.0)
}

pub fn polar_flag(refinements: &[Refinement], rule: VanishingRule) -> Result<PolarReport> {
    if refinements.is_empty() {
        return Err(Error::Refinement("no refinements".into()));
    }
    let spacings = refinement_spacings(refinements)?;
    let capacities = refinements
        .iter()
        .zip(&spacings)
        .map(|(r, h)| Ok(h * capacity(&r.space, &r.set, None)?))
        .collect::<Result<Vec<_>>>()?;
    let first = capacities[0];
    let last = *capacities.last().unwrap();
    let ratio = if first > 0.0 { last / first } else { 0.0 };
    let extrapolated = extrapolate(&spacings, &capacities);
    let nonincreasing = capacities.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let vanishing = first == 0.0
        || nonincreasing
            && match rule {
                VanishingRule::Ratio(t) => ratio < t,
                VanishingRule::Extrapolated(t) => extrapolated < t * first,
            };
    Ok(PolarReport {
        flag: if vanishing {
            PolarFlag::Vanishing
        } else {
            PolarFlag::NonVanishing
        },
        capacities,
        spacings,
        ratio,
        extrapolated,
    })
}

/// Floor on the witness scaling `Cap^{1/2}`.
pub const WITNESS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessLevel {
    pub capacity: f64,
    pub scale: f64,
    /// `e_{A_j}/scale` at the check point and at the set point.
    pub term_at_check: f64,
    pub term_at_set: f64,
    /// Superharmonic deficiency of the scaled term on its own lattice.
    pub deficiency: f64,
}

/// The witness partial sums `u_n = Σ_{j ≤ n} e_{A_j}/max(√Cap_j, ε)`,
/// evaluated at the lattice points nearest to `check` and to `set_point`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub levels: Vec<WitnessLevel>,
    pub at_check: Vec<f64>,
    pub at_set: Vec<f64>,
    /// `sup_n u_n(check)`.
    pub bound: f64,
}

fn nearest_vertex(space: &HarmonicSpace, p: [f64; 3]) -> Result<usize> {
    let coords = coords_of(space)?;
    (0..space.len())
        .min_by(|&a, &b| dist(coords[a], p).total_cmp(&dist(coords[b], p)))
        .ok_or(Error::EmptySet("lattice"))
}

pub fn polar_witness(
    refinements: &[Refinement],
    check: [f64; 3],
    set_point: [f64; 3],
    rule: VanishingRule,
) -> Result<Witness> {
    let report = polar_flag(refinements, rule)?;
    if report.flag != PolarFlag::Vanishing {
        return Err(Error::WitnessUnavailable);
    }
    let mut levels = Vec::new();
    let (mut u_check, mut u_set) = (0.0, 0.0);
    let (mut at_check, mut at_set) = (Vec::new(), Vec::new());
    for (r, &cap) in refinements.iter().zip(&report.capacities) {
        let scale = cap.sqrt().max(WITNESS_FLOOR);
        let x = nearest_vertex(&r.space, check)?;
        if r.set.contains(&x) {
            return Err(Error::DomainMismatch("the check point lies in the set".into()));
        }
        let level = if r.set.is_empty() {
            WitnessLevel {
                capacity: cap,
                scale,
                term_at_check: 0.0,
                term_at_set: 0.0,
                deficiency: 0.0,
            }
        } else {
            let e = equilibrium_potential(&r.space, &r.set)?;
            let a = nearest_vertex(&r.space, set_point)?;
            let d = superharmonic_deficiency(&r.space, &e, &Domain::whole(&r.space))?;
            WitnessLevel {
                capacity: cap,
                scale,
                term_at_check: e.value(x)? / scale,
                term_at_set: e.value(a)? / scale,
                deficiency: d.value / scale,
            }
        };
        u_check += level.term_at_check;
        u_set += level.term_at_set;
        at_check.push(u_check);
        at_set.push(u_set);
        levels.push(level);
    }
    Ok(Witness {
        bound: at_check.iter().cloned().fold(0.0, f64::max),
        levels,
        at_check,
        at_set,
    })
}

/// `d(x, y) = sup_z |K(z, x) − K(z, y)|` over the non-absorbing vertices.
pub fn fine_metric(table: &KernelTable, x: usize, y: usize) -> Result<f64> {
    dm_metric(table, x, y, None)
}

/// Default threshold of [`thin_at`].
pub const THIN_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Thinness {
    pub thin: bool,
    /// `(r, e_{A ∩ B(x, r)}(x))` in the order the radii were given.
    pub profile: Vec<(f64, f64)>,
}

/// Equilibrium-potential profile of `A ∩ B(x, r)` at `x` over decreasing
/// radii; `A` is thin at `x` when the value at the smallest radius is
/// below `threshold`. Monotone in `A` because equilibrium potentials are.
pub fn thin_at(space: &HarmonicSpace, set: &[usize], x: usize, radii: &[f64], threshold: f64) -> Result<Thinness> {
    if set.contains(&x) {
        return Err(Error::ThinnessUndefined(x));
    }
    if radii.is_empty() {
        return Err(Error::EmptySet("radii"));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::DomainMismatch("radii must decrease".into()));
    }
    let coords = coords_of(space)?;
    let profile = radii
        .iter()
        .map(|&r| {
            let near: Vec<usize> = set
                .iter()
                .copied()
                .filter(|&a| dist(coords[a], coords[x]) <= r + 1e-9)
                .collect();
            let v = if near.is_empty() {
                0.0
            } else {
                equilibrium_potential(space, &near)?.value(x)?
            };
            Ok((r, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Thinness {
        thin: profile.last().unwrap().1 < threshold,
        profile,
    })
}

/// Radii `2⁻²,…` down to four lattice spacings.
pub fn default_radii(n: usize) -> Vec<f64> {
    let mut r = Vec::new();
    let mut k = 2;
    while (1usize << k) * 4 <= n {
        r.push(0.5f64.powi(k));
        k += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unsupported_resolution() {
        assert!(matches!(thorn_lattice(10, ThornVariant::Thorn), Err(Error::UnsupportedResolution(10))));
    }

    #[test]
    fn thorn_and_cone_sets() {
        let thorn = thorn_lattice(16, ThornVariant::Thorn).unwrap();
        let coords = thorn.space.coords().unwrap();
        assert!(!thorn.set.is_empty());
        assert!(thorn.set.iter().all(|&v| coords[v][2] > 0.0));
        assert!(thorn.set.len() < 16);
        let cone = ThornVariant::Cone { aperture_deg: 45.0 };
        assert!(thorn.set.iter().all(|&v| cone.contains(coords[v])));
        let half = thorn_lattice(16, ThornVariant::Cone { aperture_deg: 90.0 }).unwrap();
        assert_eq!(half.set.len(), 15 * 15 * 7);
        assert_eq!(coords[thorn.tip], [0.0, 0.0, 0.0]);
        assert_eq!(thorn.offset(0, 0, 1).map(|v| coords[v][2]), Some(1.0 / 16.0));
    }

    #[test]
    fn constant_data_has_zero_gap() {
        let l = thorn_lattice(16, ThornVariant::Thorn).unwrap();
        let everything: Vec<usize> = (0..l.space.len()).collect();
        let f = ExtendedFunction::constant(&everything, 0.7);
        let r = regularity_test(&l.space, &l.set, l.tip, &f, REGULARITY_TOL).unwrap();
        assert!(r.gap < 1e-9, "{r:?}");
        assert!(r.attained);
    }

    #[test]
    fn tip_inside_obstacle_is_degenerate() {
        let l = thorn_lattice(16, ThornVariant::Thorn).unwrap();
        let f = ExtendedFunction::constant(&l.set, 1.0);
        let mut set = l.set.clone();
        set.push(l.tip);
        assert!(matches!(
            regularity_test(&l.space, &set, l.tip, &f, REGULARITY_TOL),
            Err(Error::DegenerateTest(_))
        ));
    }

    #[test]
    fn empty_set_is_polar_with_zero_witness() {
        let refinements: Vec<Refinement> = [16, 32]
            .iter()
            .map(|&n| Refinement {
                space: box_lattice(n).unwrap(),
                set: Vec::new(),
            })
            .collect();
        let report = polar_flag(&refinements, VanishingRule::default()).unwrap();
        assert_eq!(report.flag, PolarFlag::Vanishing);
        assert_eq!(report.capacities, vec![0.0, 0.0]);
        let w = polar_witness(&refinements, [0.25, 0.25, -0.25], [0.0; 3], VanishingRule::default()).unwrap();
        assert_eq!(w.bound, 0.0);
    }

    #[test]
    fn refinements_must_refine() {
        let a = Refinement {
            space: box_lattice(32).unwrap(),
            set: Vec::new(),
        };
        let b = Refinement {
            space: box_lattice(16).unwrap(),
            set: Vec::new(),
        };
        assert!(matches!(polar_flag(&[a, b], VanishingRule::default()), Err(Error::Refinement(_))));
    }

    #[test]
    fn thinness_trivia() {
        let l = thorn_lattice(16, ThornVariant::Thorn).unwrap();
        let nbrs: Vec<usize> = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
            .iter()
            .map(|&(i, j, k)| l.offset(i, j, k).unwrap())
            .collect();
        let t = thin_at(&l.space, &nbrs, l.tip, &[0.25, 0.0625], THIN_THRESHOLD).unwrap();
        assert!((t.profile[1].1 - 1.0).abs() < 1e-9);
        assert!(!t.thin);
        let t = thin_at(&l.space, &[], l.tip, &[0.25, 0.0625], THIN_THRESHOLD).unwrap();
        assert!(t.thin);
        assert!(matches!(
            thin_at(&l.space, &[l.tip], l.tip, &[0.25], THIN_THRESHOLD),
            Err(Error::ThinnessUndefined(_))
        ));
    }

    #[test]
    fn default_radii_stop_at_four_spacings() {
        assert_eq!(default_radii(64), vec![0.25, 0.125, 0.0625]);
        assert_eq!(default_radii(16), vec![0.25]);
    }
}

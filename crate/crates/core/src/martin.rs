//! Green functions, Martin kernels, the `d_M` pseudo-metric, numerical
//! Martin compactification and minimality tests.

use nalgebra::{DMatrix, DVector};

use crate::dirichlet::DirichletSolver;
use crate::error::{Error, Result};
use crate::linalg::{nnls, SolveError};
use crate::space::{Domain, HarmonicSpace};

/// Largest number of non-absorbing vertices for a dense Green matrix.
pub const GREEN_SIZE_CAP: usize = 2000;
/// Default relative merge tolerance for compactification.
pub const DEFAULT_MERGE_TOL: f64 = 1e-6;

/// Green matrix `G = (I − P)⁻¹` on the non-absorbing vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenTable {
    vertices: Vec<usize>,
    index: Vec<Option<usize>>,
    green: DMatrix<f64>,
}

impl GreenTable {
    /// Row and column vertices, in order.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.index.get(v).copied().flatten()
    }

    fn pos(&self, v: usize) -> Result<usize> {
        self.position(v).ok_or_else(|| {
            Error::DomainMismatch(format!("vertex {v} is absorbing or out of range"))
        })
    }

    /// `G(x, y)`.
    pub fn value(&self, x: usize, y: usize) -> Result<f64> {
        Ok(self.green[(self.pos(x)?, self.pos(y)?)])
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.green
    }
}

pub fn green_function(space: &HarmonicSpace) -> Result<GreenTable> {
    let whole = Domain::whole(space);
    let n = whole.interior().len();
    if n > GREEN_SIZE_CAP {
        return Err(Error::SizeCap {
            size: n,
            cap: GREEN_SIZE_CAP,
        });
    }
    let solver = DirichletSolver::new(space, &whole)?;
    let green = solver.system().inverse().map_err(|e| match e {
        SolveError::Singular => Error::NoGreenFunction("I − P is singular".into()),
        SolveError::NoConvergence { residual, .. } => {
            Error::NoGreenFunction(format!("solver stalled at residual {residual:e}"))
        }
    })?;
    let green = green.map(|v| if v < 0.0 && v > -1e-14 { 0.0 } else { v });
    if green.iter().any(|&v| v < 0.0) {
        return Err(Error::NoGreenFunction("negative Green value".into()));
    }
    Ok(GreenTable {
        vertices: whole.interior().to_vec(),
        index: whole.local_index(),
        green,
    })
}

/// Green and Martin kernels with a base point: `K(x, y) = G(x, y)/G(x₀, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    green: GreenTable,
    kernel: DMatrix<f64>,
    base_point: usize,
}

impl KernelTable {
    pub fn green(&self) -> &GreenTable {
        &self.green
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn vertices(&self) -> &[usize] {
        self.green.vertices()
    }

    /// `K(x, y)`.
    pub fn value(&self, x: usize, y: usize) -> Result<f64> {
        Ok(self.kernel[(self.green.pos(x)?, self.green.pos(y)?)])
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    /// `K(·, y)` in row order.
    pub fn column(&self, y: usize) -> Result<Vec<f64>> {
        Ok(self.kernel.column(self.green.pos(y)?).iter().copied().collect())
    }
}

pub fn martin_kernel(table: &GreenTable, base_point: usize) -> Result<KernelTable> {
    let b = table.pos(base_point)?;
    let g = &table.green;
    let mut kernel = g.clone();
    for j in 0..g.ncols() {
        let denom = g[(b, j)];
        if !(denom > 0.0) {
            return Err(Error::DisconnectedFromBase {
                column: table.vertices[j],
            });
        }
        for i in 0..g.nrows() {
            kernel[(i, j)] = g[(i, j)] / denom;
        }
        kernel[(b, j)] = 1.0;
    }
    Ok(KernelTable {
        green: table.clone(),
        kernel,
        base_point,
    })
}

/// Green function and Martin kernel at the space's base point.
pub fn kernel_table(space: &HarmonicSpace) -> Result<KernelTable> {
    martin_kernel(&green_function(space)?, space.base_point())
}

/// `sup_i |a_i − b_i|` over probe positions (all positions if `None`).
pub fn dm_distance(a: &[f64], b: &[f64], probes: Option<&[usize]>) -> f64 {
    match probes {
        Some(p) => p.iter().map(|&i| (a[i] - b[i]).abs()).fold(0.0, f64::max),
        None => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    }
}

/// `d_M(y₁, y₂) = sup_{x ∈ X₀} |K(x, y₁) − K(x, y₂)|`, with `X₀` the given
/// probe vertices or all non-absorbing vertices.
pub fn dm_metric(table: &KernelTable, y1: usize, y2: usize, probes: Option<&[usize]>) -> Result<f64> {
    let a = table.column(y1)?;
    let b = table.column(y2)?;
    let rows = probes
        .map(|p| p.iter().map(|&x| table.green.pos(x)).collect::<Result<Vec<_>>>())
        .transpose()?;
    if let Some(r) = &rows {
        if r.is_empty() {
            return Err(Error::EmptySet("probe set"));
        }
    }
    Ok(dm_distance(&a, &b, rows.as_deref()))
}

/// Where an atlas point came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// An absorbing vertex of the space.
    Absorbing { vertex: usize },
    /// A cluster of frontier columns at the finest exhaustion level.
    Cluster { members: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtlasPoint {
    pub id: String,
    pub provenance: Provenance,
    /// Index of the `d_M` class (points closer than the merge threshold
    /// share a class and a kernel function).
    pub class: usize,
}

/// Boundary points with their kernel columns `K(·, ξ)` on the row vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryAtlas {
    /// Row vertices (non-absorbing vertices, or probes in exhaustion mode).
    pub rows: Vec<usize>,
    pub row_ids: Vec<String>,
    pub base_point: usize,
    pub points: Vec<AtlasPoint>,
    /// `rows × points` kernel matrix, normalized at the base point.
    pub kernels: DMatrix<f64>,
    /// Representative point of each class (the class medoid).
    pub class_representatives: Vec<usize>,
    pub merge_threshold: f64,
    /// Representative drift between the last two exhaustion levels.
    pub drift: Option<f64>,
    /// Dropped states and stability warnings.
    pub notices: Vec<String>,
}

impl BoundaryAtlas {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.class_representatives.len()
    }

    pub fn column(&self, point: usize) -> Vec<f64> {
        self.kernels.column(point).iter().copied().collect()
    }

    pub fn row_position(&self, v: usize) -> Option<usize> {
        self.rows.iter().position(|&r| r == v)
    }

    /// Kernel columns of the class representatives.
    pub fn representative_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.kernels.nrows(), self.class_count(), |i, c| {
            self.kernels[(i, self.class_representatives[c])]
        })
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }
}

/// Greedy clustering in column order; returns class labels, representatives
/// (medoids) and the absolute threshold used.
fn cluster(columns: &[Vec<f64>], merge_tol: f64) -> (Vec<usize>, Vec<usize>, f64) {
    let norm = columns
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = merge_tol * norm.max(1.0);
    let mut labels = Vec::with_capacity(columns.len());
    let mut seeds: Vec<usize> = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        match seeds
            .iter()
            .position(|&s| dm_distance(&columns[s], col, None) <= threshold)
        {
            Some(c) => labels.push(c),
            None => {
                labels.push(seeds.len());
                seeds.push(j);
            }
        }
    }
    let reps = (0..seeds.len())
        .map(|c| {
            let members: Vec<usize> = (0..columns.len()).filter(|&j| labels[j] == c).collect();
            *members
                .iter()
                .min_by(|&&a, &&b| {
                    let ecc = |m: usize| {
                        members
                            .iter()
                            .map(|&o| dm_distance(&columns[m], &columns[o], None))
                            .fold(0.0, f64::max)
                    };
                    ecc(a).total_cmp(&ecc(b))
                })
                .unwrap()
        })
        .collect();
    (labels, reps, threshold)
}

/// Absorbing-mode compactification: one point per absorbing state reachable
/// from the base point, with `K(x, ξ) = h_ξ(x)/h_ξ(x₀)` where `h_ξ` is the
/// probability of absorption at `ξ`.
pub fn compactify_absorbing(space: &HarmonicSpace, merge_tol: f64) -> Result<BoundaryAtlas> {
    let absorbing = space.absorbing_vertices();
    if absorbing.is_empty() {
        return Err(Error::EmptySet("absorbing states"));
    }
    let whole = Domain::whole(space);
    let solver = DirichletSolver::new(space, &whole)?;
    let local = whole.local_index();
    let base = space.base_point();
    let b = local[base].expect("base point is non-absorbing");
    let mut notices = Vec::new();
    let mut points = Vec::new();
    let mut columns = Vec::new();
    for &xi in &absorbing {
        let h = solver.exit_column(xi)?;
        if !(h[b] > 0.0) {
            notices.push(format!(
                "absorbing state {} is unreachable from the base point; dropped",
                space.id(xi)
            ));
            continue;
        }
        let mut k: Vec<f64> = h.iter().map(|v| v / h[b]).collect();
        k[b] = 1.0;
        columns.push(k);
        points.push(xi);
    }
    let (labels, reps, threshold) = cluster(&columns, merge_tol);
    let rows = whole.interior().to_vec();
    Ok(BoundaryAtlas {
        row_ids: rows.iter().map(|&v| space.id(v).to_string()).collect(),
        rows,
        base_point: base,
        points: points
            .iter()
            .zip(&labels)
            .map(|(&xi, &class)| AtlasPoint {
                id: space.id(xi).to_string(),
                provenance: Provenance::Absorbing { vertex: xi },
                class,
            })
            .collect(),
        kernels: columns_to_matrix(&columns, whole.interior().len()),
        class_representatives: reps,
        merge_threshold: threshold,
        drift: None,
        notices,
    })
}

fn columns_to_matrix(columns: &[Vec<f64>], rows: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i])
}

/// `K(x, ξ)` for an absorbing `ξ` through the Green matrix:
/// `Σ_y G(x, y)P(y, ξ) / Σ_y G(x₀, y)P(y, ξ)`, in the table's row order.
pub fn kernel_via_green(space: &HarmonicSpace, table: &KernelTable, xi: usize) -> Result<Vec<f64>> {
    if !space.is_absorbing(xi) {
        return Err(Error::DomainMismatch(format!("vertex {xi} is not absorbing")));
    }
    let g = table.green();
    let into: Vec<(usize, f64)> = g
        .vertices()
        .iter()
        .enumerate()
        .filter_map(|(j, &y)| {
            let p = space.kernel_entry(y, xi);
            (p > 0.0).then_some((j, p))
        })
        .collect();
    let hit = |i: usize| into.iter().map(|&(j, p)| g.green[(i, j)] * p).sum::<f64>();
    let b = g.pos(table.base_point)?;
    let denom = hit(b);
    if !(denom > 0.0) {
        return Err(Error::DisconnectedFromBase { column: xi });
    }
    Ok((0..g.vertices().len()).map(|i| hit(i) / denom).collect())
}

/// One refinement level of an exhaustion: a space and the vertices that
/// march toward its frontier.
#[derive(Debug, Clone)]
pub struct ExhaustionLevel {
    pub space: HarmonicSpace,
    pub frontier: Vec<usize>,
}

/// Kernel columns `K(·, y)` restricted to the probes, for every frontier
/// vertex `y`, via one Green row per probe.
fn frontier_columns(level: &ExhaustionLevel, probes: &[String]) -> Result<Vec<Vec<f64>>> {
    let space = &level.space;
    let whole = Domain::whole(space);
    let solver = DirichletSolver::new(space, &whole)?;
    let local = whole.local_index();
    let row_of = |x: usize| -> Result<Vec<f64>> { solver.green_row(x) };
    let base_row = row_of(space.base_point())?;
    let mut probe_rows = Vec::with_capacity(probes.len());
    for id in probes {
        let x = space
            .index_of(id)
            .filter(|&x| !space.is_absorbing(x))
            .ok_or_else(|| Error::DomainMismatch(format!("probe {id:?} is not interior at every level")))?;
        probe_rows.push(row_of(x)?);
    }
    level
        .frontier
        .iter()
        .map(|&y| {
            let j = local[y].ok_or_else(|| {
                Error::DomainMismatch(format!("frontier vertex {y} is absorbing"))
            })?;
            let denom = base_row[j];
            if !(denom > 0.0) {
                return Err(Error::DisconnectedFromBase { column: y });
            }
            Ok(probe_rows.iter().map(|r| r[j] / denom).collect())
        })
        .collect()
}

/// Exhaustion-mode compactification: frontier columns of the finest level
/// are clustered by `d_M` over the probes; representative drift against
/// the previous level is reported and flagged when above `drift_tol`.
pub fn compactify_exhaustion(
    levels: &[ExhaustionLevel],
    probes: &[String],
    merge_tol: f64,
    drift_tol: f64,
) -> Result<BoundaryAtlas> {
    let last = levels.last().ok_or(Error::EmptySet("exhaustion levels"))?;
    if probes.is_empty() {
        return Err(Error::EmptySet("probe set"));
    }
    let mut notices = Vec::new();
    let mut previous: Option<Vec<Vec<f64>>> = None;
    let mut drift = None;
    let mut result = None;
    for (level_no, level) in levels.iter().enumerate() {
        let columns = frontier_columns(level, probes)?;
        if columns.is_empty() {
            return Err(Error::EmptySet("frontier"));
        }
        let (labels, reps, threshold) = cluster(&columns, merge_tol);
        let rep_cols: Vec<Vec<f64>> = reps.iter().map(|&r| columns[r].clone()).collect();
        let (relabels, _, _) = cluster(&rep_cols, merge_tol);
        if relabels.iter().enumerate().any(|(i, &l)| i != l) {
            notices.push(format!("level {level_no}: re-clustering merged representatives"));
        }
        if let Some(prev) = &previous {
            if prev.len() != rep_cols.len() {
                notices.push(format!(
                    "level {level_no}: cluster count changed from {} to {}",
                    prev.len(),
                    rep_cols.len()
                ));
            }
            let d = rep_cols
                .iter()
                .map(|c| prev.iter().map(|p| dm_distance(c, p, None)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            drift = Some(d);
        }
        previous = Some(rep_cols);
        if level_no + 1 == levels.len() {
            result = Some((columns, labels, reps, threshold));
        }
    }
    if let Some(d) = drift {
        if d > drift_tol {
            notices.push(format!("unstable boundary: representative drift {d:e}"));
        }
    }
    let (columns, labels, reps, threshold) = result.expect("at least one level");
    let space = &last.space;
    let points: Vec<AtlasPoint> = (0..reps.len())
        .map(|c| {
            let members: Vec<String> = last
                .frontier
                .iter()
                .zip(&labels)
                .filter(|&(_, &l)| l == c)
                .map(|(&y, _)| space.id(y).to_string())
                .collect();
            AtlasPoint {
                id: format!("cluster-{c}"),
                provenance: Provenance::Cluster { members },
                class: c,
            }
        })
        .collect();
    let rep_cols: Vec<Vec<f64>> = reps.iter().map(|&r| columns[r].clone()).collect();
    let rows: Vec<usize> = probes.iter().map(|id| space.index_of(id).unwrap()).collect();
    Ok(BoundaryAtlas {
        rows,
        row_ids: probes.to_vec(),
        base_point: space.base_point(),
        class_representatives: (0..points.len()).collect(),
        points,
        kernels: columns_to_matrix(&rep_cols, probes.len()),
        merge_threshold: threshold,
        drift,
        notices,
    })
}

/// Binary trees of the given depths as an exhaustion of the infinite tree.
/// The frontier is the deepest non-absorbing generation; probes are all
/// vertices of depth at most `probe_depth`.
pub fn tree_exhaustion(depths: &[usize], probe_depth: usize) -> Result<(Vec<ExhaustionLevel>, Vec<String>)> {
    if let Some(&d) = depths.iter().find(|&&d| d <= probe_depth + 1) {
        return Err(Error::InvalidGeometry(format!(
            "tree depth {d} must exceed the probe depth {probe_depth} by at least 2"
        )));
    }
    let levels = depths
        .iter()
        .map(|&d| {
            let space = crate::space::generate(&crate::space::Geometry::BinaryTree(d))?;
            let frontier = ((1usize << (d - 1)) - 1..(1usize << d) - 1).collect();
            Ok(ExhaustionLevel { space, frontier })
        })
        .collect::<Result<Vec<_>>>()?;
    let probes = (0..(1usize << (probe_depth + 1)) - 1).map(|v| v.to_string()).collect();
    Ok((levels, probes))
}

/// Outcome of [`separation_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub separated: bool,
    /// A pair of row vertices that no column tells apart.
    pub witness: Option<(usize, usize)>,
}

/// Whether the kernel functions `K(·, ξ)` separate the row vertices: for
/// every `x ≠ x′` some column differs by more than `tol`.
pub fn separation_check(rows: &[usize], kernels: &DMatrix<f64>, tol: f64) -> Separation {
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let differs = (0..kernels.ncols()).any(|c| (kernels[(i, c)] - kernels[(j, c)]).abs() > tol);
            if !differs {
                return Separation {
                    separated: false,
                    witness: Some((rows[i], rows[j])),
                };
            }
        }
    }
    Separation {
        separated: true,
        witness: None,
    }
}

/// Tolerance for minimality decisions.
pub const MINIMALITY_TOL: f64 = 1e-9;

/// Nonnegative weights of `h` (in atlas row order) over the class
/// representatives, with the fit residual.
pub fn class_weights(atlas: &BoundaryAtlas, h: &[f64]) -> (Vec<f64>, f64) {
    let a = atlas.representative_matrix();
    let (w, residual) = nnls(&a, &DVector::from_column_slice(h));
    (w.iter().copied().collect(), residual)
}

/// Whether a positive harmonic function (given in atlas row order) is
/// minimal: its representing weights sit on a single class.
pub fn is_minimal(atlas: &BoundaryAtlas, h: &[f64]) -> bool {
    let (w, residual) = class_weights(atlas, h);
    let total: f64 = w.iter().sum();
    let top = w.iter().cloned().fold(0.0, f64::max);
    let scale = h.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    total > 0.0 && residual <= MINIMALITY_TOL * scale && top >= (1.0 - MINIMALITY_TOL) * total
}

/// Minimality flag of every atlas point.
pub fn minimality_test(atlas: &BoundaryAtlas) -> Vec<bool> {
    (0..atlas.len())
        .map(|p| {
            let (w, residual) = class_weights(atlas, &atlas.column(p));
            let total: f64 = w.iter().sum();
            let own = w[atlas.points[p].class];
            residual <= MINIMALITY_TOL && (own - 1.0).abs() <= MINIMALITY_TOL && (total - 1.0).abs() <= MINIMALITY_TOL
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate, Geometry, SpaceBuilder};

    fn path5() -> HarmonicSpace {
        generate(&Geometry::Path(5)).unwrap()
    }

    #[test]
    fn path_green_matches_hand_inverse() {
        let g = green_function(&path5()).unwrap();
        let hand = [[1.5, 1.0, 0.5], [1.0, 2.0, 1.0], [0.5, 1.0, 1.5]];
        for (i, row) in hand.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!((g.value(i + 1, j + 1).unwrap() - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn killed_single_vertex() {
        let mut b = SpaceBuilder::with_len(2);
        b.edge(0, 0, 1.0).directed_edge(1, 0, 1.0).killing(0, 0.5).absorbing(1).base_point(0);
        let s = b.build().unwrap();
        assert!((green_function(&s).unwrap().value(0, 0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_normalized_and_scale_invariant() {
        let t = kernel_table(&path5()).unwrap();
        for y in 1..4 {
            assert_eq!(t.value(2, y).unwrap(), 1.0);
        }
        assert!((t.value(1, 2).unwrap() - 0.5).abs() < 1e-14);

        let mut b = SpaceBuilder::with_len(5);
        for i in 0..4 {
            b.edge(i, i + 1, 3.7);
        }
        b.absorbing(0).absorbing(4).base_point(2);
        let scaled = kernel_table(&b.build().unwrap()).unwrap();
        assert!((scaled.matrix() - t.matrix()).amax() < 1e-14);
    }

    #[test]
    fn dm_examples() {
        let s = path5();
        let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(atlas.len(), 2);
        let k0 = atlas.column(0);
        for (a, b) in k0.iter().zip([1.5, 1.0, 0.5]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((dm_distance(&k0, &atlas.column(1), None) - 1.0).abs() < 1e-14);
        let t = kernel_table(&s).unwrap();
        assert_eq!(dm_metric(&t, 1, 1, None).unwrap(), 0.0);
    }

    #[test]
    fn dm_triangle_inequality_on_grid() {
        let s = generate(&Geometry::Grid2d(4)).unwrap();
        let t = kernel_table(&s).unwrap();
        let v = t.vertices().to_vec();
        for &a in &v {
            for &b in &v {
                let ab = dm_metric(&t, a, b, None).unwrap();
                assert!((ab - dm_metric(&t, b, a, None).unwrap()).abs() < 1e-15);
                for &c in &v {
                    let ac = dm_metric(&t, a, c, None).unwrap();
                    let cb = dm_metric(&t, c, b, None).unwrap();
                    assert!(ab <= ac + cb + 1e-14);
                }
            }
        }
    }

    #[test]
    fn atlas_matches_green_limit() {
        for g in [Geometry::Path(5), Geometry::Grid2d(4), Geometry::BinaryTree(3)] {
            let s = generate(&g).unwrap();
            let t = kernel_table(&s).unwrap();
            let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL).unwrap();
            for (p, point) in atlas.points.iter().enumerate() {
                let Provenance::Absorbing { vertex } = point.provenance else { unreachable!() };
                let via = kernel_via_green(&s, &t, vertex).unwrap();
                assert!(dm_distance(&via, &atlas.column(p), None) < 1e-10, "{g:?}");
            }
        }
    }

    #[test]
    fn tree_atlas_sizes() {
        for d in 2..=6 {
            let s = generate(&Geometry::BinaryTree(d)).unwrap();
            let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL).unwrap();
            assert_eq!(atlas.len(), 1 << d);
            assert_eq!(atlas.class_count(), 1 << (d - 1));
            assert!(minimality_test(&atlas).iter().all(|&m| m));
        }
    }

    #[test]
    fn grid_corners_are_dropped() {
        let s = generate(&Geometry::Grid2d(4)).unwrap();
        let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(atlas.len(), 8);
        assert_eq!(atlas.notices.len(), 4);
    }

    #[test]
    fn single_absorbing_state() {
        let mut b = SpaceBuilder::with_len(3);
        b.edge(0, 1, 1.0).edge(1, 2, 1.0).edge(0, 0, 1.0).absorbing(2).base_point(0);
        let s = b.build().unwrap();
        let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(atlas.len(), 1);
        assert!(atlas.column(0).iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert_eq!(minimality_test(&atlas), vec![true]);
    }

    #[test]
    fn constants_are_not_minimal() {
        let atlas = compactify_absorbing(&path5(), DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(minimality_test(&atlas), vec![true, true]);
        assert!(!is_minimal(&atlas, &[1.0, 1.0, 1.0]));
        assert!(is_minimal(&atlas, &atlas.column(1)));
    }

    #[test]
    fn separation_examples() {
        let s = path5();
        let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL).unwrap();
        assert!(separation_check(&atlas.rows, &atlas.kernels, 1e-12).separated);

        // 0 - {1, 2} - 3 with 1 and 2 swapped by an automorphism fixing 0, 3.
        let mut b = SpaceBuilder::with_len(4);
        b.edge(0, 1, 1.0).edge(0, 2, 1.0).edge(1, 3, 1.0).edge(2, 3, 1.0);
        b.absorbing(0).absorbing(3).base_point(1);
        let gadget = b.build().unwrap();
        let atlas = compactify_absorbing(&gadget, DEFAULT_MERGE_TOL).unwrap();
        let sep = separation_check(&atlas.rows, &atlas.kernels, 1e-12);
        assert_eq!(sep.witness, Some((1, 2)));

        let one = DMatrix::from_element(1, 2, 1.0);
        assert!(separation_check(&[5], &one, 1e-12).separated);
    }

    #[test]
    fn tree_exhaustion_clusters_by_ancestor() {
        let (levels, probes) = tree_exhaustion(&[5, 6, 7], 2).unwrap();
        let atlas = compactify_exhaustion(&levels, &probes, DEFAULT_MERGE_TOL, 1e-1).unwrap();
        assert_eq!(atlas.len(), 4);
        assert!(atlas.drift.unwrap() > 0.0);
        assert!(minimality_test(&atlas).iter().all(|&m| m));
    }

    #[test]
    fn disconnected_base_is_reported() {
        let mut b = SpaceBuilder::with_len(4);
        b.directed_edge(0, 1, 1.0).directed_edge(1, 3, 1.0).directed_edge(2, 3, 1.0);
        b.absorbing(3).base_point(1);
        let s = b.build().unwrap();
        let g = green_function(&s).unwrap();
        assert!(matches!(martin_kernel(&g, 1), Err(Error::DisconnectedFromBase { .. })));
    }
}

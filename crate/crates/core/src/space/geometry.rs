//! Test geometries. All conductances are 1 (simple random walk) unless the
//! descriptor says otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polar::{thorn_lattice, ThornVariant};

use super::{HarmonicSpace, SpaceBuilder};

/// Geometry descriptor accepted by [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// `n` vertices in a line, both ends absorbing.
    Path(usize),
    /// `n × n` grid, absorbing rim.
    Grid2d(usize),
    /// `n × n × n` grid, absorbing surface.
    Grid3d(usize),
    /// Complete binary tree of the given depth, absorbing leaves.
    BinaryTree(usize),
    /// Points of `hℤ²` in the closed unit disk; points with a neighbor
    /// outside the disk are absorbing.
    DiskMesh(f64),
    /// Box lattice with a thorn or cone obstacle.
    Thorn { n: usize, variant: ThornVariant },
    /// Random connected network with random conductances, a few absorbing
    /// vertices and occasional killing.
    Random { vertices: usize, seed: u64 },
}

pub fn generate(geometry: &Geometry) -> Result<HarmonicSpace> {
    match *geometry {
        Geometry::Path(n) => path(n),
        Geometry::Grid2d(n) => grid2d(n),
        Geometry::Grid3d(n) => grid3d(n),
        Geometry::BinaryTree(depth) => binary_tree(depth),
        Geometry::DiskMesh(h) => disk_mesh(h),
        Geometry::Thorn { n, variant } => Ok(thorn_lattice(n, variant)?.space),
        Geometry::Random { vertices, seed } => random_network(vertices, seed),
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidGeometry(msg.into())
}

fn path(n: usize) -> Result<HarmonicSpace> {
    if n < 3 {
        return Err(invalid(format!("path needs at least 3 vertices, got {n}")));
    }
    let mut b = SpaceBuilder::with_len(n);
    for i in 0..n - 1 {
        b.edge(i, i + 1, 1.0);
    }
    b.absorbing(0).absorbing(n - 1).base_point(n / 2);
    let coords = (0..n).map(|i| [i as f64, 0.0, 0.0]).collect();
    b.coords(coords, None);
    b.build()
}

fn grid2d(n: usize) -> Result<HarmonicSpace> {
    if n < 3 {
        return Err(invalid(format!("grid2d needs side at least 3, got {n}")));
    }
    let at = |i: usize, j: usize| i * n + j;
    let mut b = SpaceBuilder::new((0..n * n).map(|v| format!("{},{}", v / n, v % n)));
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                b.edge(at(i, j), at(i + 1, j), 1.0);
            }
            if j + 1 < n {
                b.edge(at(i, j), at(i, j + 1), 1.0);
            }
            if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                b.absorbing(at(i, j));
            }
        }
    }
    b.base_point(at(n / 2, n / 2));
    let coords = (0..n * n)
        .map(|v| [(v / n) as f64, (v % n) as f64, 0.0])
        .collect();
    b.coords(coords, None);
    b.build()
}

fn grid3d(n: usize) -> Result<HarmonicSpace> {
    if n < 3 {
        return Err(invalid(format!("grid3d needs side at least 3, got {n}")));
    }
    let at = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut b = SpaceBuilder::new(
        (0..n * n * n).map(|v| format!("{},{},{}", v / (n * n), (v / n) % n, v % n)),
    );
    let rim = |i: usize| i == 0 || i == n - 1;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i + 1 < n {
                    b.edge(at(i, j, k), at(i + 1, j, k), 1.0);
                }
                if j + 1 < n {
                    b.edge(at(i, j, k), at(i, j + 1, k), 1.0);
                }
                if k + 1 < n {
                    b.edge(at(i, j, k), at(i, j, k + 1), 1.0);
                }
                if rim(i) || rim(j) || rim(k) {
                    b.absorbing(at(i, j, k));
                }
            }
        }
    }
    b.base_point(at(n / 2, n / 2, n / 2));
    b.build()
}

fn binary_tree(depth: usize) -> Result<HarmonicSpace> {
    if depth == 0 {
        return Err(invalid("binary tree depth must be positive"));
    }
    if depth > 20 {
        return Err(invalid(format!("binary tree depth {depth} too large")));
    }
    let n = (1usize << (depth + 1)) - 1;
    let first_leaf = (1usize << depth) - 1;
    let mut b = SpaceBuilder::with_len(n);
    for v in 0..first_leaf {
        b.edge(v, 2 * v + 1, 1.0).edge(v, 2 * v + 2, 1.0);
    }
    for v in first_leaf..n {
        b.absorbing(v);
    }
    b.base_point(0);
    b.build()
}

fn disk_mesh(h: f64) -> Result<HarmonicSpace> {
    if !(h > 0.0 && h < 1.0) {
        return Err(invalid(format!("disk mesh size must lie in (0, 1), got {h}")));
    }
    let r = (1.0 / h).floor() as i64;
    let inside = |i: i64, j: i64| {
        let (x, y) = (i as f64 * h, j as f64 * h);
        x * x + y * y <= 1.0 + 1e-12
    };
    let mut points = Vec::new();
    for i in -r..=r {
        for j in -r..=r {
            if inside(i, j) {
                points.push((i, j));
            }
        }
    }
    let lookup = |i: i64, j: i64| points.binary_search(&(i, j)).ok();
    let mut b = SpaceBuilder::new(points.iter().map(|(i, j)| format!("{i},{j}")));
    for (v, &(i, j)) in points.iter().enumerate() {
        let nbrs = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)];
        if nbrs.iter().any(|&(a, c)| !inside(a, c)) {
            b.absorbing(v);
        }
        for (a, c) in [(i + 1, j), (i, j + 1)] {
            if let Some(w) = lookup(a, c) {
                b.edge(v, w, 1.0);
            }
        }
    }
    let origin = lookup(0, 0).expect("origin lies in the disk");
    b.base_point(origin);
    let coords = points
        .iter()
        .map(|&(i, j)| [i as f64 * h, j as f64 * h, 0.0])
        .collect();
    b.coords(coords, Some(h));
    b.build()
}

/// Random connected network on `vertices ≥ 2` vertices: a random spanning
/// tree plus extra edges, conductances in `[0.5, 2)`, one or two absorbing
/// vertices and killing on some vertices. Vertex 0 is the base point.
pub fn random_network(vertices: usize, seed: u64) -> Result<HarmonicSpace> {
    if vertices < 2 {
        return Err(invalid("random network needs at least 2 vertices"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = SpaceBuilder::with_len(vertices);
    for v in 1..vertices {
        let parent = rng.random_range(0..v);
        b.edge(parent, v, rng.random_range(0.5..2.0));
    }
    let extra = rng.random_range(0..=vertices);
    for _ in 0..extra {
        let a = rng.random_range(0..vertices);
        let c = rng.random_range(0..vertices);
        if a != c {
            b.edge(a, c, rng.random_range(0.5..2.0));
        }
    }
    let n_abs = if vertices > 3 { rng.random_range(1..=2) } else { 1 };
    let mut absorbing = Vec::new();
    while absorbing.len() < n_abs {
        let v = rng.random_range(1..vertices);
        if !absorbing.contains(&v) {
            absorbing.push(v);
            b.absorbing(v);
        }
    }
    for v in 0..vertices {
        if !absorbing.contains(&v) && rng.random_bool(0.2) {
            b.killing(v, rng.random_range(0.05..0.3));
        }
    }
    b.base_point(0);
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let p = generate(&Geometry::Path(5)).unwrap();
        assert_eq!((p.len(), p.absorbing_vertices()), (5, vec![0, 4]));

        let t = generate(&Geometry::BinaryTree(2)).unwrap();
        assert_eq!(t.len(), 7);
        assert_eq!(t.absorbing_vertices().len(), 4);

        let g = generate(&Geometry::Grid2d(3)).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.absorbing_vertices().len(), 8);
        assert_eq!(g.non_absorbing(), vec![4]);

        let g3 = generate(&Geometry::Grid3d(4)).unwrap();
        assert_eq!(g3.non_absorbing().len(), 8);
    }

    #[test]
    fn disk_mesh_is_symmetric_about_origin() {
        let d = generate(&Geometry::DiskMesh(0.25)).unwrap();
        let c = d.coords().unwrap();
        assert_eq!(c[d.base_point()], [0.0, 0.0, 0.0]);
        assert!(d.reversible_measure().is_some());
        assert!(!d.absorbing_vertices().is_empty());
    }

    #[test]
    fn non_positive_parameters_rejected() {
        for g in [
            Geometry::Path(0),
            Geometry::Grid2d(1),
            Geometry::Grid3d(0),
            Geometry::BinaryTree(0),
            Geometry::DiskMesh(0.0),
            Geometry::DiskMesh(-1.0),
        ] {
            assert!(matches!(generate(&g), Err(Error::InvalidGeometry(_))), "{g:?}");
        }
    }

    #[test]
    fn random_networks_are_valid_and_reproducible() {
        for seed in 0..50 {
            let a = random_network(2 + (seed as usize % 10), seed).unwrap();
            let b = random_network(2 + (seed as usize % 10), seed).unwrap();
            assert_eq!(a, b);
            for x in a.non_absorbing() {
                assert!(a.row_sum(x) <= 1.0 + 1e-12);
            }
        }
    }
}

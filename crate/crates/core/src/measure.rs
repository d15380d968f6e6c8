//! Harmonic measures, the boundary integral representation of harmonic
//! functions, Martin representing measures and the base-point change law.

use nalgebra::DVector;

use crate::dirichlet::DirichletSolver;
use crate::error::{Error, Result};
use crate::linalg::{nnls, numerical_rank};
use crate::martin::{BoundaryAtlas, Provenance};
use crate::space::{Domain, ExtendedFunction, HarmonicSpace};

/// Nonnegative weights on boundary vertices or atlas points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMeasure {
    /// Vertex indices (harmonic measures) or atlas point indices.
    pub support: Vec<usize>,
    pub labels: Vec<String>,
    pub weights: Vec<f64>,
}

impl BoundaryMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weight_of(&self, s: usize) -> Option<f64> {
        self.support.iter().position(|&v| v == s).map(|i| self.weights[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, f64)> + '_ {
        self.support
            .iter()
            .zip(&self.labels)
            .zip(&self.weights)
            .map(|((&s, l), &w)| (s, l.as_str(), w))
    }
}

fn interior_position(domain: &Domain, x: usize) -> Result<usize> {
    domain
        .local_index()
        .get(x)
        .copied()
        .flatten()
        .ok_or_else(|| Error::DomainMismatch(format!("vertex {x} is not interior to the domain")))
}

fn boundary_measure(space: &HarmonicSpace, domain: &Domain, weights: Vec<f64>) -> BoundaryMeasure {
    BoundaryMeasure {
        support: domain.boundary().to_vec(),
        labels: domain.boundary().iter().map(|&b| space.id(b).to_string()).collect(),
        weights: weights.into_iter().map(|w| w.max(0.0)).collect(),
    }
}

/// `ω^x`, the exit distribution from `x`, by one indicator Dirichlet solve
/// per boundary vertex.
pub fn harmonic_measure(space: &HarmonicSpace, domain: &Domain, x: usize) -> Result<BoundaryMeasure> {
    let i = interior_position(domain, x)?;
    let solver = DirichletSolver::new(space, domain)?;
    let weights = domain
        .boundary()
        .iter()
        .map(|&b| Ok(solver.exit_column(b)?[i]))
        .collect::<Result<Vec<_>>>()?;
    Ok(boundary_measure(space, domain, weights))
}

/// `ω^x` from one adjoint solve: `ω^x(b) = Σ_y G_U(x, y) P(y, b)`.
pub fn harmonic_measure_adjoint(space: &HarmonicSpace, domain: &Domain, x: usize) -> Result<BoundaryMeasure> {
    interior_position(domain, x)?;
    let solver = DirichletSolver::new(space, domain)?;
    let row = solver.green_row(x)?;
    let mut weights = vec![0.0; domain.boundary().len()];
    for (k, &y) in domain.interior().iter().enumerate() {
        for &(b, p) in space.kernel_row(y) {
            if let Ok(j) = domain.boundary().binary_search(&b) {
                weights[j] += row[k] * p;
            }
        }
    }
    Ok(boundary_measure(space, domain, weights))
}

/// `Σ_b f(b) ω^x({b})`.
pub fn represent(space: &HarmonicSpace, domain: &Domain, f: &ExtendedFunction, x: usize) -> Result<f64> {
    let omega = harmonic_measure(space, domain, x)?;
    omega.iter().map(|(b, _, w)| Ok(w * f.value(b)?)).sum()
}

/// Martin representing measure of a positive harmonic function.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    /// Weights on the class representatives of the atlas.
    pub measure: BoundaryMeasure,
    /// `‖Σ c_ξ K(·, ξ) − h‖₂`.
    pub residual: f64,
    /// Column rank of the representative kernel matrix.
    pub rank: usize,
    /// Whether the representation is unique (full column rank).
    pub unique: bool,
}

/// Nonnegative weights `c_ξ` with `Σ c_ξ K(x, ξ) = h(x)` on the atlas rows.
/// Fails with a not-representable error when the best fit misses by more
/// than `tol` (relative to `‖h‖_∞`).
pub fn martin_representation(atlas: &BoundaryAtlas, h: &ExtendedFunction, tol: f64) -> Result<Representation> {
    let values = atlas
        .rows
        .iter()
        .map(|&x| h.value(x))
        .collect::<Result<Vec<_>>>()?;
    let a = atlas.representative_matrix();
    let (w, residual) = nnls(&a, &DVector::from_column_slice(&values));
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if residual > tol * scale {
        return Err(Error::NotRepresentable { residual });
    }
    let rank = numerical_rank(&a, 1e-10);
    let reps = &atlas.class_representatives;
    Ok(Representation {
        measure: BoundaryMeasure {
            support: reps.clone(),
            labels: reps.iter().map(|&p| atlas.points[p].id.clone()).collect(),
            weights: w.iter().copied().collect(),
        },
        residual,
        rank,
        unique: rank == reps.len(),
    })
}

/// Largest `|ω^x({ξ}) − K(x, ξ)·ω^{x₀}({ξ})|` over the absorbing states `ξ`
/// (dropped states count with kernel 0) and the given vertices `x` (all
/// atlas rows if `None`). The atlas must come from absorbing mode.
pub fn pushforward_compare(space: &HarmonicSpace, atlas: &BoundaryAtlas, xs: Option<&[usize]>) -> Result<f64> {
    let whole = Domain::whole(space);
    let solver = DirichletSolver::new(space, &whole)?;
    let local = whole.local_index();
    let base = local[atlas.base_point].ok_or_else(|| Error::DomainMismatch("base point is absorbing".into()))?;
    let xs: Vec<usize> = xs.map_or_else(|| atlas.rows.clone(), <[usize]>::to_vec);
    let mut kernel_of = vec![None; space.len()];
    for (p, point) in atlas.points.iter().enumerate() {
        match point.provenance {
            Provenance::Absorbing { vertex } => kernel_of[vertex] = Some(p),
            Provenance::Cluster { .. } => {
                return Err(Error::DomainMismatch(
                    "pushforward comparison needs an absorbing-mode atlas".into(),
                ))
            }
        }
    }
    let mut worst = 0.0f64;
    for xi in space.absorbing_vertices() {
        let omega = solver.exit_column(xi)?;
        for &x in &xs {
            let i = local[x].ok_or_else(|| Error::DomainMismatch(format!("vertex {x} is absorbing")))?;
            let k = match kernel_of[xi] {
                Some(p) => {
                    let r = atlas
                        .row_position(x)
                        .ok_or_else(|| Error::DomainMismatch(format!("vertex {x} is not an atlas row")))?;
                    atlas.kernels[(r, p)]
                }
                None => 0.0,
            };
            worst = worst.max((omega[i] - k * omega[base]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::solve_dirichlet;
    use crate::martin::{compactify_absorbing, DEFAULT_MERGE_TOL};
    use crate::space::{generate, Geometry};

    fn path5() -> HarmonicSpace {
        generate(&Geometry::Path(5)).unwrap()
    }

    #[test]
    fn path_harmonic_measures() {
        let s = path5();
        let u = Domain::whole(&s);
        let w2 = harmonic_measure(&s, &u, 2).unwrap();
        assert_eq!(w2.weight_of(0), Some(0.5));
        let w1 = harmonic_measure(&s, &u, 1).unwrap();
        assert!((w1.weight_of(0).unwrap() - 0.75).abs() < 1e-14);
        let adj = harmonic_measure_adjoint(&s, &u, 1).unwrap();
        assert!((adj.weight_of(0).unwrap() - 0.75).abs() < 1e-14);
        assert!((w1.total_mass() - 1.0).abs() < 1e-14);
        assert!(matches!(harmonic_measure(&s, &u, 0), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn indicator_and_adjoint_agree_on_grid() {
        let s = generate(&Geometry::Grid2d(5)).unwrap();
        let u = Domain::whole(&s);
        for &x in u.interior() {
            let a = harmonic_measure(&s, &u, x).unwrap();
            let b = harmonic_measure_adjoint(&s, &u, x).unwrap();
            for (wa, wb) in a.weights.iter().zip(&b.weights) {
                assert!((wa - wb).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn represent_matches_solver() {
        let s = path5();
        let u = Domain::whole(&s);
        let f = ExtendedFunction::from_pairs([(0, 0.0), (4, 1.0)]).unwrap();
        assert!((represent(&s, &u, &f, 1).unwrap() - 0.25).abs() < 1e-14);
        let one = ExtendedFunction::from_pairs([(0, 1.0), (4, 1.0)]).unwrap();
        assert!((represent(&s, &u, &one, 3).unwrap() - 1.0).abs() < 1e-14);
        let h = solve_dirichlet(&s, &u, &f).unwrap();
        for x in 1..4 {
            assert!((represent(&s, &u, &f, x).unwrap() - h.value(x).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn martin_representation_examples() {
        let s = path5();
        let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL).unwrap();
        let one = ExtendedFunction::constant(&[1, 2, 3], 1.0);
        let r = martin_representation(&atlas, &one, 1e-9).unwrap();
        assert!((r.measure.weights[0] - 0.5).abs() < 1e-12);
        assert!((r.measure.weights[1] - 0.5).abs() < 1e-12);
        assert!(r.unique);

        let k0 = atlas.column(0);
        let k4 = atlas.column(1);
        let h = ExtendedFunction::from_pairs((0..3).map(|i| (i + 1, 2.0 * k0[i] + 3.0 * k4[i]))).unwrap();
        let r = martin_representation(&atlas, &h, 1e-9).unwrap();
        assert!((r.measure.weights[0] - 2.0).abs() < 1e-9);
        assert!((r.measure.weights[1] - 3.0).abs() < 1e-9);
        assert!((r.measure.total_mass() - h.value(2).unwrap()).abs() < 1e-9);

        let bump = ExtendedFunction::from_pairs([(1, 0.0), (2, 1.0), (3, 0.0)]).unwrap();
        assert!(matches!(
            martin_representation(&atlas, &bump, 1e-9),
            Err(Error::NotRepresentable { .. })
        ));
    }

    #[test]
    fn pushforward_identity() {
        for g in [Geometry::Path(5), Geometry::Grid2d(4), Geometry::BinaryTree(4)] {
            let s = generate(&g).unwrap();
            let atlas = compactify_absorbing(&s, DEFAULT_MERGE_TOL).unwrap();
            assert!(pushforward_compare(&s, &atlas, None).unwrap() < 1e-10, "{g:?}");
            assert_eq!(pushforward_compare(&s, &atlas, Some(&[s.base_point()])).unwrap(), 0.0);
        }
    }
}

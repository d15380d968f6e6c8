//! Réduite (balayage), its linear-programming oracle, Riesz decomposition,
//! equilibrium potentials and capacity.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::dirichlet::{superharmonic_deficiency, DirichletSolver};
use crate::error::{Error, Result};
use crate::space::{Domain, ExtReal, ExtendedFunction, HarmonicSpace};

/// Stopping tolerance of the fixed-point iteration (sup-norm change).
pub const FIXED_POINT_TOL: f64 = 1e-12;
/// Iteration cap of the fixed-point iteration.
pub const FIXED_POINT_CAP: usize = 1_000_000;
/// Largest space accepted by [`reduite_oracle`].
pub const ORACLE_SIZE_CAP: usize = 12;

fn dense_obstacle(space: &HarmonicSpace, u: &ExtendedFunction, set: &[usize]) -> Result<Vec<f64>> {
    let mut obstacle = vec![0.0; space.len()];
    for &a in set {
        if a >= space.len() {
            return Err(Error::DomainMismatch(format!("vertex {a} out of range")));
        }
        match u.get(a) {
            None => return Err(Error::NotInSort { vertex: a }),
            Some(ExtReal::Infinite) => {
                return Err(Error::NotInCone(format!(
                    "infinite obstacle at vertex {a}; scale it first"
                )))
            }
            Some(ExtReal::Finite(v)) if v < 0.0 => {
                return Err(Error::NotInCone(format!("negative obstacle at vertex {a}")))
            }
            Some(ExtReal::Finite(v)) => obstacle[a] = v,
        }
    }
    Ok(obstacle)
}

fn sorted_set(set: &[usize]) -> Vec<usize> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Harmonic off `contact` (among non-absorbing vertices), equal to
/// `obstacle` on `contact` and on absorbing vertices.
fn solve_with_contact(space: &HarmonicSpace, obstacle: &[f64], contact: &[bool]) -> Result<Vec<f64>> {
    let free: Vec<usize> = space
        .non_absorbing()
        .into_iter()
        .filter(|&x| !contact[x])
        .collect();
    if free.is_empty() {
        return Ok(obstacle.to_vec());
    }
    let domain = Domain::new(space, free)?;
    let mut v = DirichletSolver::new(space, &domain)?.solve_dense(obstacle)?;
    for x in 0..space.len() {
        if !domain.contains(x) {
            v[x] = obstacle[x];
        }
    }
    Ok(v)
}

/// `Bal_A(u)`: the least superharmonic function that dominates `u` on `A`.
///
/// Computed by policy iteration on the contact set: start with contact on
/// all of `A`, solve, release the vertices where `Pv > u`, repeat. Each
/// pass increases `v`, and the loop ends after at most `|A|` passes at the
/// limit of the monotone iteration `v ↦ max(u·1_A, Pv)`.
pub fn reduite(space: &HarmonicSpace, u: &ExtendedFunction, set: &[usize]) -> Result<ExtendedFunction> {
    let set = sorted_set(set);
    let obstacle = dense_obstacle(space, u, &set)?;
    let scale = obstacle.iter().fold(1.0f64, |m, &v| m.max(v));
    let mut contact = vec![false; space.len()];
    for &a in &set {
        contact[a] = !space.is_absorbing(a);
    }
    for _ in 0..=set.len() {
        let v = solve_with_contact(space, &obstacle, &contact)?;
        let pv = space.apply_kernel(&v);
        let mut released = false;
        for &a in &set {
            if contact[a] && pv[a] > obstacle[a] + 1e-14 * scale {
                contact[a] = false;
                released = true;
            }
        }
        if !released {
            return Ok(ExtendedFunction::from_dense(&v));
        }
    }
    unreachable!("each pass releases at least one contact vertex")
}

/// Outcome of [`reduite_iterative`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub function: ExtendedFunction,
    pub iterations: usize,
    pub last_change: f64,
}

/// The plain monotone iteration `v₀ = u·1_A`, `v ↦ max(u·1_A, Pv)`, stopped
/// when the sup-norm change drops below `tol`.
pub fn reduite_iterative(
    space: &HarmonicSpace,
    u: &ExtendedFunction,
    set: &[usize],
    tol: f64,
    max_iterations: usize,
) -> Result<FixedPoint> {
    let set = sorted_set(set);
    let obstacle = dense_obstacle(space, u, &set)?;
    let mut v = obstacle.clone();
    let mut last_change = f64::INFINITY;
    for k in 1..=max_iterations {
        let pv = space.apply_kernel(&v);
        last_change = 0.0;
        for x in 0..v.len() {
            let next = pv[x].max(obstacle[x]);
            last_change = last_change.max((next - v[x]).abs());
            v[x] = next;
        }
        if last_change < tol {
            return Ok(FixedPoint {
                function: ExtendedFunction::from_dense(&v),
                iterations: k,
                last_change,
            });
        }
    }
    Err(Error::Convergence {
        iterations: max_iterations,
        last_change,
    })
}

/// Brute-force réduite: minimize `Σ v` subject to `v ≥ Pv`, `v ≥ u` on `A`,
/// `v ≥ 0`. The simplex answer fixes the contact set, which is then solved
/// exactly so the oracle is accurate to the direct-solver tolerance.
pub fn reduite_oracle(space: &HarmonicSpace, u: &ExtendedFunction, set: &[usize]) -> Result<ExtendedFunction> {
    if space.len() > ORACLE_SIZE_CAP {
        return Err(Error::SizeCap {
            size: space.len(),
            cap: ORACLE_SIZE_CAP,
        });
    }
    let set = sorted_set(set);
    let obstacle = dense_obstacle(space, u, &set)?;
    let mut in_set = vec![false; space.len()];
    for &a in &set {
        in_set[a] = true;
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..space.len())
        .map(|x| lp.add_var(1.0, (obstacle[x], f64::INFINITY)))
        .collect();
    for x in space.non_absorbing() {
        let mut terms = vec![(vars[x], 1.0)];
        for &(y, p) in space.kernel_row(x) {
            if y == x {
                terms[0].1 -= p;
            } else {
                terms.push((vars[y], -p));
            }
        }
        lp.add_constraint(terms.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let solution = lp.solve().map_err(|e| Error::Solver(e.to_string()))?;
    let raw: Vec<f64> = vars.iter().map(|&v| *solution.var_value(v)).collect();
    let pv = space.apply_kernel(&raw);
    let contact: Vec<bool> = (0..space.len())
        .map(|x| in_set[x] && !space.is_absorbing(x) && raw[x] - obstacle[x] <= raw[x] - pv[x])
        .collect();
    let v = solve_with_contact(space, &obstacle, &contact)?;
    Ok(ExtendedFunction::from_dense(&v))
}

/// `H_U g` obtained by sweeping: on the closure of `U` with `∂U` absorbing,
/// the boundary data is its own superharmonic extension and the sweep onto
/// `∂U` is harmonic inside `U`.
pub fn dirichlet_via_balayage(space: &HarmonicSpace, domain: &Domain, g: &ExtendedFunction) -> Result<ExtendedFunction> {
    let (closed, map) = space.closure_space(domain)?;
    let mut local_g = Vec::new();
    let mut boundary = Vec::new();
    for (i, &v) in map.iter().enumerate() {
        if domain.on_boundary(v) {
            local_g.push((i, g.value(v)?));
            boundary.push(i);
        }
    }
    let local_g = ExtendedFunction::from_pairs(local_g)?;
    let swept = reduite(&closed, &local_g, &boundary)?;
    ExtendedFunction::from_pairs(
        map.iter()
            .enumerate()
            .map(|(i, &v)| (v, swept.get(i).and_then(ExtReal::finite).unwrap_or(0.0))),
    )
}

/// `Bal_{X∖U}(g̃)` on the whole space for a caller-supplied extension `g̃`,
/// which must be defined everywhere, nonnegative, superharmonic and equal to
/// `g` on `∂U`. Returns the result on the closure of `U`.
pub fn dirichlet_via_balayage_with(
    space: &HarmonicSpace,
    domain: &Domain,
    g: &ExtendedFunction,
    extension: &ExtendedFunction,
) -> Result<ExtendedFunction> {
    let everything: Vec<usize> = (0..space.len()).collect();
    if !extension.covers(&everything) {
        return Err(Error::DomainMismatch("extension must be defined on every vertex".into()));
    }
    let whole = Domain::whole(space);
    let scale = crate::space::sup_norm(extension).max(1.0);
    let d = superharmonic_deficiency(space, extension, &whole)?;
    if d.value > 1e-12 * scale {
        return Err(Error::NotInCone(format!(
            "extension is not superharmonic (deficiency {:e})",
            d.value
        )));
    }
    for &b in domain.boundary() {
        if (extension.value(b)? - g.value(b)?).abs() > 1e-12 * scale {
            return Err(Error::DomainMismatch(format!(
                "extension disagrees with boundary data at vertex {b}"
            )));
        }
    }
    let outside: Vec<usize> = everything.into_iter().filter(|&v| !domain.contains(v)).collect();
    let swept = reduite(space, extension, &outside)?;
    swept.restrict_to(&domain.closure())
}

/// Riesz decomposition `u = h + p` of a finite superharmonic `u ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Riesz {
    /// Greatest harmonic minorant, `lim P̄ⁿu`.
    pub harmonic: ExtendedFunction,
    /// `u − h`.
    pub potential: ExtendedFunction,
    /// `‖P̄ᴺ p‖_∞` at the stopping step.
    pub tail_norm: f64,
    /// Number of kernel steps `N` taken to certify the tail.
    pub steps: usize,
}

/// Splits `u` into its harmonic part and a potential. `P̄` holds absorbing
/// values fixed, so `P̄ⁿu` converges to the harmonic function with the
/// absorbing values of `u`, which is computed by one Dirichlet solve; the
/// potential's decay is then certified by iterating `P̄`.
pub fn riesz_decompose(space: &HarmonicSpace, u: &ExtendedFunction, tol: f64) -> Result<Riesz> {
    let n = space.len();
    let everything: Vec<usize> = (0..n).collect();
    if !u.covers(&everything) {
        return Err(Error::DomainMismatch("u must be defined on every vertex".into()));
    }
    if !u.is_finite() {
        return Err(Error::NotInCone("u must be finite".into()));
    }
    let whole = Domain::whole(space);
    let dense = u.to_dense(n, 0.0)?;
    let scale = dense.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let d = superharmonic_deficiency(space, u, &whole)?;
    if d.value > 1e-10 * scale {
        return Err(Error::NotInCone(format!(
            "not superharmonic: deficiency {:e} at vertex {:?}",
            d.value, d.witness
        )));
    }
    let h = DirichletSolver::new(space, &whole)?.solve_dense(&dense)?;
    let mut p: Vec<f64> = dense.iter().zip(&h).map(|(a, b)| a - b).collect();
    let potential = ExtendedFunction::from_dense(&p);
    let absorbing = space.absorbing_vertices();
    for &a in &absorbing {
        p[a] = 0.0;
    }
    let mut steps = 0;
    let mut tail = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    while tail >= tol && steps < FIXED_POINT_CAP {
        p = space.apply_kernel(&p);
        for &a in &absorbing {
            p[a] = 0.0;
        }
        steps += 1;
        tail = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    Ok(Riesz {
        harmonic: ExtendedFunction::from_dense(&h),
        potential,
        tail_norm: tail,
        steps,
    })
}

/// `e_A = Bal_A(1)`, the hitting probability of `A`.
pub fn equilibrium_potential(space: &HarmonicSpace, set: &[usize]) -> Result<ExtendedFunction> {
    if set.is_empty() {
        return Err(Error::EmptySet("equilibrium set"));
    }
    reduite(space, &ExtendedFunction::constant(set, 1.0), set)
}

/// Capacity of `A` together with the objects it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    /// Total Riesz mass `Σ μ(x)(e_A − Pe_A)(x)`.
    pub capacity: f64,
    /// The literal `∫ e_A dμ`, kept for comparison.
    pub integral: f64,
    pub equilibrium: Option<ExtendedFunction>,
}

/// Capacity of `A` with reference measure `μ` (counting measure if `None`).
pub fn capacity(space: &HarmonicSpace, set: &[usize], measure: Option<&[f64]>) -> Result<f64> {
    Ok(capacity_report(space, set, measure)?.capacity)
}

pub fn capacity_report(space: &HarmonicSpace, set: &[usize], measure: Option<&[f64]>) -> Result<CapacityReport> {
    if let Some(m) = measure {
        if m.len() != space.len() {
            return Err(Error::DomainMismatch(format!(
                "reference measure has {} weights for {} vertices",
                m.len(),
                space.len()
            )));
        }
        if m.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidSpace("reference measure must be finite and nonnegative".into()));
        }
    }
    if set.is_empty() {
        return Ok(CapacityReport {
            capacity: 0.0,
            integral: 0.0,
            equilibrium: None,
        });
    }
    let e = equilibrium_potential(space, set)?;
    let dense = e.to_dense(space.len(), 0.0)?;
    let pe = space.apply_kernel(&dense);
    let weight = |x: usize| measure.map_or(1.0, |m| m[x]);
    let set = sorted_set(set);
    let capacity = set.iter().map(|&x| weight(x) * (dense[x] - pe[x])).sum();
    let integral = (0..space.len()).map(|x| weight(x) * dense[x]).sum();
    Ok(CapacityReport {
        capacity,
        integral,
        equilibrium: Some(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::solve_dirichlet;
    use crate::space::{generate, random_network, Geometry};

    fn path5() -> HarmonicSpace {
        generate(&Geometry::Path(5)).unwrap()
    }

    fn close(f: &ExtendedFunction, expected: &[(usize, f64)], tol: f64) {
        for &(v, e) in expected {
            let got = f.value(v).unwrap();
            assert!((got - e).abs() < tol, "vertex {v}: {got} vs {e}");
        }
    }

    #[test]
    fn reduite_of_one_on_center() {
        let s = path5();
        let one = ExtendedFunction::constant(&[0, 1, 2, 3, 4], 1.0);
        let r = reduite(&s, &one, &[2]).unwrap();
        close(&r, &[(0, 0.0), (1, 0.5), (2, 1.0), (3, 0.5), (4, 0.0)], 1e-14);
        let o = reduite_oracle(&s, &one, &[2]).unwrap();
        assert!(r.max_abs_diff(&o).unwrap() < 1e-12);
        let it = reduite_iterative(&s, &one, &[2], FIXED_POINT_TOL, FIXED_POINT_CAP).unwrap();
        assert!(r.max_abs_diff(&it.function).unwrap() < 1e-11);
    }

    #[test]
    fn reduite_trivial_cases() {
        let s = path5();
        let zero = ExtendedFunction::constant(&[0, 1, 2, 3, 4], 0.0);
        let r = reduite(&s, &zero, &[1, 3]).unwrap();
        assert_eq!(crate::space::sup_norm(&r), 0.0);
        let tent = ExtendedFunction::from_pairs([(0, 0.0), (1, 1.0), (2, 2.0), (3, 1.0), (4, 0.0)]).unwrap();
        let r = reduite(&s, &tent, &[0, 1, 2, 3, 4]).unwrap();
        assert!(r.max_abs_diff(&tent).unwrap() < 1e-14);
        let empty = reduite_oracle(&s, &tent, &[]).unwrap();
        assert_eq!(crate::space::sup_norm(&empty), 0.0);
    }

    #[test]
    fn reduite_releases_contact_where_continuing_pays() {
        let s = path5();
        let u = ExtendedFunction::from_pairs([(1, 0.1), (2, 1.0), (3, 0.2)]).unwrap();
        let r = reduite(&s, &u, &[1, 2, 3]).unwrap();
        close(&r, &[(1, 0.5), (2, 1.0), (3, 0.5)], 1e-14);
        let o = reduite_oracle(&s, &u, &[1, 2, 3]).unwrap();
        assert!(r.max_abs_diff(&o).unwrap() < 1e-12);
    }

    #[test]
    fn reduite_rejects_infinite_and_negative() {
        let s = path5();
        let inf = ExtendedFunction::new(vec![2], vec![ExtReal::Infinite]).unwrap();
        assert!(matches!(reduite(&s, &inf, &[2]), Err(Error::NotInCone(_))));
        let neg = ExtendedFunction::from_pairs([(2, -1.0)]).unwrap();
        assert!(matches!(reduite(&s, &neg, &[2]), Err(Error::NotInCone(_))));
    }

    #[test]
    fn oracle_size_cap() {
        let s = generate(&Geometry::Grid2d(4)).unwrap();
        let one = ExtendedFunction::constant(&[5], 1.0);
        assert!(matches!(reduite_oracle(&s, &one, &[5]), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn oracle_agrees_on_random_spaces() {
        for seed in 0..40u64 {
            let s = random_network(3 + (seed as usize % 6), seed).unwrap();
            let n = s.len();
            let u = ExtendedFunction::from_dense(
                &(0..n).map(|x| ((x as u64 * 7 + seed) % 5) as f64 / 4.0).collect::<Vec<_>>(),
            );
            let set: Vec<usize> = (0..n).filter(|x| (x + seed as usize).is_multiple_of(2)).collect();
            let r = reduite(&s, &u, &set).unwrap();
            let o = reduite_oracle(&s, &u, &set).unwrap();
            assert!(r.max_abs_diff(&o).unwrap() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn dirichlet_identity_examples() {
        let s = path5();
        let u = Domain::whole(&s);
        let g = ExtendedFunction::from_pairs([(0, 0.0), (4, 1.0)]).unwrap();
        let h = dirichlet_via_balayage(&s, &u, &g).unwrap();
        close(&h, &[(1, 0.25), (2, 0.5), (3, 0.75)], 1e-14);

        let inner = Domain::new(&s, [2]).unwrap();
        let g = ExtendedFunction::from_pairs([(1, 0.0), (3, 1.0)]).unwrap();
        let h = dirichlet_via_balayage(&s, &inner, &g).unwrap();
        let d = solve_dirichlet(&s, &inner, &g).unwrap();
        assert!(h.max_abs_diff(&d).unwrap() < 1e-14);
    }

    #[test]
    fn explicit_extension() {
        let s = path5();
        let inner = Domain::new(&s, [2]).unwrap();
        let g = ExtendedFunction::from_pairs([(1, 1.0), (3, 0.5)]).unwrap();
        let ext = ExtendedFunction::from_pairs([(0, 0.0), (1, 1.0), (2, 1.0), (3, 0.5), (4, 0.0)]).unwrap();
        let h = dirichlet_via_balayage_with(&s, &inner, &g, &ext).unwrap();
        close(&h, &[(1, 1.0), (2, 0.75), (3, 0.5)], 1e-14);

        let linear = ExtendedFunction::from_pairs([(0, 0.0), (1, 0.0), (2, 0.5), (3, 1.0), (4, 1.0)]).unwrap();
        let g = ExtendedFunction::from_pairs([(1, 0.0), (3, 1.0)]).unwrap();
        assert!(matches!(
            dirichlet_via_balayage_with(&s, &inner, &g, &linear),
            Err(Error::NotInCone(_))
        ));
        let one = ExtendedFunction::constant(&[0, 1, 2, 3, 4], 1.0);
        assert!(matches!(
            dirichlet_via_balayage_with(&s, &inner, &g, &one),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn riesz_examples() {
        let s = path5();
        let h = ExtendedFunction::from_pairs([(0, 0.0), (1, 0.25), (2, 0.5), (3, 0.75), (4, 1.0)]).unwrap();
        let r = riesz_decompose(&s, &h, 1e-10).unwrap();
        assert!(r.harmonic.max_abs_diff(&h).unwrap() < 1e-14);
        assert!(crate::space::sup_norm(&r.potential) < 1e-14);

        let green = ExtendedFunction::from_pairs([(0, 0.0), (1, 1.0), (2, 2.0), (3, 1.0), (4, 0.0)]).unwrap();
        let r = riesz_decompose(&s, &green, 1e-10).unwrap();
        assert!(crate::space::sup_norm(&r.harmonic) < 1e-14);
        assert!(r.potential.max_abs_diff(&green).unwrap() < 1e-14);
        assert!(r.tail_norm < 1e-10);

        let sum = h.linear_combination(1.0, &green, 1.0).unwrap();
        let r = riesz_decompose(&s, &sum, 1e-10).unwrap();
        assert!(r.harmonic.max_abs_diff(&h).unwrap() < 1e-9);
        assert!(r.potential.max_abs_diff(&green).unwrap() < 1e-9);

        let spike = ExtendedFunction::from_pairs([(0, 0.0), (1, 0.0), (2, 1.0), (3, 0.0), (4, 0.0)]).unwrap();
        assert!(matches!(riesz_decompose(&s, &spike, 1e-10), Err(Error::NotInCone(_))));
    }

    #[test]
    fn capacity_examples() {
        let s = path5();
        assert_eq!(capacity(&s, &[], None).unwrap(), 0.0);
        assert!((capacity(&s, &[2], None).unwrap() - 0.5).abs() < 1e-14);
        let rep = capacity_report(&s, &[2], None).unwrap();
        assert!((rep.integral - 2.0).abs() < 1e-14);
        let e = equilibrium_potential(&s, &[1, 2, 3]).unwrap();
        close(&e, &[(1, 1.0), (2, 1.0), (3, 1.0)], 1e-14);
        assert!(matches!(equilibrium_potential(&s, &[]), Err(Error::EmptySet(_))));
    }
}

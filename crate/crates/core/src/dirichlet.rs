//! Harmonicity predicates, the Dirichlet solution operator `H_U`, traces,
//! superharmonicity tests, Harnack constants and monotone envelopes.

use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, SolveError, SparseRows};
use crate::space::{Domain, ExtReal, ExtendedFunction, HarmonicSpace};

/// Residual target of the direct solver.
pub const DIRECT_TOL: f64 = 1e-12;
/// Residual target of the iterative solvers.
pub const ITERATIVE_TOL: f64 = 1e-10;
/// Default divergence cap of [`monotone_envelope`].
pub const DEFAULT_ENVELOPE_CAP: f64 = 1e6;

/// The linear system `(I − P_UU) h = P_U∂U g` of a domain, factored once and
/// reused for many boundary data.
#[derive(Debug)]
pub struct DirichletSolver<'a> {
    space: &'a HarmonicSpace,
    domain: &'a Domain,
    local: Vec<Option<usize>>,
    system: LinearSystem,
}

impl<'a> DirichletSolver<'a> {
    pub fn new(space: &'a HarmonicSpace, domain: &'a Domain) -> Result<Self> {
        space.check_domain(domain)?;
        let local = domain.local_index();
        let rows = domain
            .interior()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let mut row = vec![(i, 1.0)];
                for &(y, p) in space.kernel_row(x) {
                    if let Some(j) = local[y] {
                        row.push((j, -p));
                    }
                }
                merge_duplicates(row)
            })
            .collect();
        let symmetrizer = space
            .reversible_measure()
            .map(|m| domain.interior().iter().map(|&x| m[x]).collect());
        Ok(DirichletSolver {
            space,
            domain,
            local,
            system: LinearSystem::new(SparseRows::new(rows), symmetrizer),
        })
    }

    pub fn domain(&self) -> &Domain {
        self.domain
    }

    pub fn is_direct(&self) -> bool {
        self.system.is_dense()
    }

    /// Residual tolerance in force for this system.
    pub fn tolerance(&self) -> f64 {
        if self.is_direct() {
            DIRECT_TOL
        } else {
            ITERATIVE_TOL
        }
    }

    fn map_err(&self, e: SolveError) -> Error {
        match e {
            SolveError::Singular => Error::IrregularDomain {
                vertex: self.domain.interior().first().copied().unwrap_or(0),
            },
            SolveError::NoConvergence {
                iterations,
                residual,
            } => Error::Convergence {
                iterations,
                last_change: residual,
            },
        }
    }

    /// Solves with dense boundary data `g` (length = number of vertices; only
    /// boundary entries are read). Returns a dense vector holding the
    /// solution on the interior and `g` on the boundary.
    pub fn solve_dense(&self, g: &[f64]) -> Result<Vec<f64>> {
        let b: Vec<f64> = self
            .domain
            .interior()
            .iter()
            .map(|&x| {
                self.space
                    .kernel_row(x)
                    .iter()
                    .filter(|&&(y, _)| self.local[y].is_none())
                    .map(|&(y, p)| p * g[y])
                    .sum()
            })
            .collect();
        let h = self.system.solve(&b).map_err(|e| self.map_err(e))?;
        let mut out = vec![0.0; self.space.len()];
        for &v in self.domain.boundary() {
            out[v] = g[v];
        }
        for (i, &x) in self.domain.interior().iter().enumerate() {
            out[x] = h[i];
        }
        Ok(out)
    }

    /// Probability of first leaving the interior at boundary vertex `b`, on
    /// the interior (in interior order).
    pub fn exit_column(&self, b: usize) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = self
            .domain
            .interior()
            .iter()
            .map(|&x| self.space.kernel_entry(x, b))
            .collect();
        self.system.solve(&rhs).map_err(|e| self.map_err(e))
    }

    /// Row `x` of the domain's Green matrix `(I − P_UU)⁻¹`, in interior order.
    pub fn green_row(&self, x: usize) -> Result<Vec<f64>> {
        let i = self.local[x].ok_or_else(|| {
            Error::DomainMismatch(format!("vertex {x} is not interior to the domain"))
        })?;
        let mut e = vec![0.0; self.domain.interior().len()];
        e[i] = 1.0;
        self.system.solve_transpose(&e).map_err(|e| self.map_err(e))
    }

    /// Column `y` of the domain's Green matrix, in interior order.
    pub fn green_column(&self, y: usize) -> Result<Vec<f64>> {
        let j = self.local[y].ok_or_else(|| {
            Error::DomainMismatch(format!("vertex {y} is not interior to the domain"))
        })?;
        let mut e = vec![0.0; self.domain.interior().len()];
        e[j] = 1.0;
        self.system.solve(&e).map_err(|e| self.map_err(e))
    }

    pub(crate) fn system(&self) -> &LinearSystem {
        &self.system
    }
}

fn merge_duplicates(mut row: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    row.sort_by_key(|&(j, _)| j);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(row.len());
    for (j, a) in row {
        match out.last_mut() {
            Some((k, b)) if *k == j => *b += a,
            _ => out.push((j, a)),
        }
    }
    out
}

fn dense_on_closure(space: &HarmonicSpace, f: &ExtendedFunction, domain: &Domain) -> Result<Vec<f64>> {
    let closure = domain.closure();
    if !f.covers(&closure) {
        return Err(Error::DomainMismatch(
            "function must be defined on the closure of the domain".into(),
        ));
    }
    let mut out = vec![0.0; space.len()];
    for v in closure {
        out[v] = f.value(v)?;
    }
    Ok(out)
}

/// `max_x Φ(|f(x) − Pf(x)|)` over the interior, with `Φ(u) = u/(1+u)`. Zero
/// exactly when `f` is harmonic on the domain.
pub fn harmonicity_residual(space: &HarmonicSpace, f: &ExtendedFunction, domain: &Domain) -> Result<f64> {
    space.check_domain(domain)?;
    let dense = dense_on_closure(space, f, domain)?;
    Ok(domain
        .interior()
        .iter()
        .map(|&x| {
            let pf: f64 = space.kernel_row(x).iter().map(|&(y, p)| p * dense[y]).sum();
            ExtReal::Finite(dense[x] - pf).bounded()
        })
        .fold(0.0, f64::max))
}

/// The Dirichlet solution `H_U g`: harmonic on the interior, equal to `g` on
/// the boundary. The result is defined on the closure.
pub fn solve_dirichlet(space: &HarmonicSpace, domain: &Domain, g: &ExtendedFunction) -> Result<ExtendedFunction> {
    space.check_domain(domain)?;
    if !g.covers(domain.boundary()) {
        return Err(Error::DomainMismatch(
            "boundary data must cover the domain boundary".into(),
        ));
    }
    let mut dense = vec![0.0; space.len()];
    for &b in domain.boundary() {
        dense[b] = g.value(b)?;
    }
    let solver = DirichletSolver::new(space, domain)?;
    let h = solver.solve_dense(&dense)?;
    let closure = domain.closure();
    ExtendedFunction::from_pairs(closure.into_iter().map(|v| (v, h[v])))
}

/// Boundary trace of a function defined on the closure.
pub fn trace(h: &ExtendedFunction, domain: &Domain) -> Result<ExtendedFunction> {
    if !h.covers(&domain.closure()) {
        return Err(Error::DomainMismatch(
            "function must be defined on the closure of the domain".into(),
        ));
    }
    h.restrict_to(domain.boundary())
}

/// Size of the worst violation of `u ≥ Pu`, and where it happens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deficiency {
    pub value: f64,
    pub witness: Option<usize>,
}

fn check_cone(u: &ExtendedFunction) -> Result<()> {
    match u.iter().find(|(_, x)| matches!(x, ExtReal::Finite(v) if *v < 0.0)) {
        Some((v, _)) => Err(Error::NotInCone(format!("negative value at vertex {v}"))),
        None => Ok(()),
    }
}

/// `max_x max(0, Pu(x) − u(x))` over interior vertices with finite `u(x)`.
/// Vertices where `u = ∞` satisfy the inequality; a finite vertex next to an
/// infinite one does not.
pub fn superharmonic_deficiency(space: &HarmonicSpace, u: &ExtendedFunction, domain: &Domain) -> Result<Deficiency> {
    space.check_domain(domain)?;
    check_cone(u)?;
    if !u.covers(&domain.closure()) {
        return Err(Error::DomainMismatch(
            "function must be defined on the closure of the domain".into(),
        ));
    }
    let mut worst = Deficiency {
        value: 0.0,
        witness: None,
    };
    for &x in domain.interior() {
        let ExtReal::Finite(ux) = u.get(x).expect("covered") else {
            continue;
        };
        let mut pu = 0.0;
        for &(y, p) in space.kernel_row(x) {
            match u.get(y).expect("covered") {
                ExtReal::Finite(v) => pu += p * v,
                ExtReal::Infinite => pu = f64::INFINITY,
            }
        }
        let d = pu - ux;
        if d > worst.value {
            worst = Deficiency {
                value: d,
                witness: Some(x),
            };
        }
    }
    Ok(worst)
}

/// The one-step test next to its subdomain form `u(x) ≥ H_V(u|∂V)(x)` over
/// the radius-one subdomains `V = {x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubdomainCheck {
    pub one_step: Deficiency,
    pub subdomain: Deficiency,
    pub agree: bool,
}

pub fn check_superharmonic_subdomains(
    space: &HarmonicSpace,
    u: &ExtendedFunction,
    domain: &Domain,
) -> Result<SubdomainCheck> {
    let one_step = superharmonic_deficiency(space, u, domain)?;
    let mut subdomain = Deficiency {
        value: 0.0,
        witness: None,
    };
    for &x in domain.interior() {
        let ExtReal::Finite(ux) = u.get(x).expect("covered") else {
            continue;
        };
        let star = Domain::new(space, [x])?;
        let hv = if star.boundary().iter().any(|&y| u.get(y) == Some(ExtReal::Infinite)) {
            f64::INFINITY
        } else {
            let g = u.restrict_to(star.boundary())?;
            solve_dirichlet(space, &star, &g)?.value(x)?
        };
        let d = hv - ux;
        if d > subdomain.value {
            subdomain = Deficiency {
                value: d,
                witness: Some(x),
            };
        }
    }
    let scale = crate::space::sup_norm(u).clamp(1.0, 1e300);
    let tol = 1e-12 * scale;
    let agree = (one_step.value <= tol) == (subdomain.value <= tol)
        && (one_step.value <= tol || one_step.witness == subdomain.witness);
    Ok(SubdomainCheck {
        one_step,
        subdomain,
        agree,
    })
}

/// Result of [`harnack_constant`].
#[derive(Debug, Clone, PartialEq)]
pub struct Harnack {
    /// Least `C` with `sup_K h ≤ C inf_K h`; `f64::INFINITY` when some
    /// minimal harmonic function vanishes on part of `K` only.
    pub constant: f64,
    /// Boundary vertex whose exit column attains the constant.
    pub boundary_point: Option<usize>,
    /// `(argmax, argmin)` on `K` for that column.
    pub pair: Option<(usize, usize)>,
}

/// Harnack constant of `K ⊆ U` from the minimal positive harmonic functions
/// of `U`, which on a finite domain are the exit-distribution columns.
pub fn harnack_constant(space: &HarmonicSpace, k: &[usize], domain: &Domain) -> Result<Harnack> {
    if k.is_empty() {
        return Err(Error::EmptySet("Harnack set K"));
    }
    if let Some(&v) = k.iter().find(|&&v| !domain.contains(v)) {
        return Err(Error::DomainMismatch(format!(
            "vertex {v} of K is not interior to the domain"
        )));
    }
    let solver = DirichletSolver::new(space, domain)?;
    let local = domain.local_index();
    let mut best = Harnack {
        constant: 1.0,
        boundary_point: None,
        pair: None,
    };
    for &b in domain.boundary() {
        let col = solver.exit_column(b)?;
        let on_k: Vec<(usize, f64)> = k.iter().map(|&v| (v, col[local[v].unwrap()])).collect();
        let (hi_v, hi) = on_k
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let (lo_v, lo) = on_k
            .iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if hi <= 0.0 {
            continue;
        }
        let ratio = if lo <= 0.0 { f64::INFINITY } else { hi / lo };
        if ratio > best.constant || best.boundary_point.is_none() && ratio >= best.constant {
            best = Harnack {
                constant: ratio,
                boundary_point: Some(b),
                pair: Some((hi_v, lo_v)),
            };
        }
    }
    Ok(best)
}

/// Result of [`monotone_envelope`].
#[derive(Debug, Clone, PartialEq)]
pub enum Envelope {
    /// The pointwise supremum and its harmonicity residual.
    Harmonic {
        function: ExtendedFunction,
        residual: f64,
    },
    /// Every interior value exceeded the cap.
    Diverges,
}

/// Upper envelope of a nondecreasing sequence of harmonic functions on the
/// closure of `domain`. Values above `cap` at every interior vertex are
/// reported as divergence.
pub fn monotone_envelope(
    space: &HarmonicSpace,
    sequence: &[ExtendedFunction],
    domain: &Domain,
    cap: f64,
) -> Result<Envelope> {
    let first = sequence.first().ok_or(Error::EmptySet("envelope sequence"))?;
    let closure = domain.closure();
    for f in sequence {
        if !f.covers(&closure) {
            return Err(Error::DomainMismatch(
                "sequence members must be defined on the closure".into(),
            ));
        }
    }
    let mut sup: Vec<ExtReal> = closure.iter().map(|&v| first.get(v).unwrap()).collect();
    for (step, pair) in sequence.windows(2).enumerate() {
        for (i, &v) in closure.iter().enumerate() {
            let (a, b) = (pair[0].get(v).unwrap(), pair[1].get(v).unwrap());
            let slack = match a {
                ExtReal::Finite(x) => 1e-12 * x.abs().max(1.0),
                ExtReal::Infinite => 0.0,
            };
            let below = match (a, b) {
                (ExtReal::Finite(x), ExtReal::Finite(y)) => y < x - slack,
                (ExtReal::Infinite, ExtReal::Finite(_)) => true,
                _ => false,
            };
            if below {
                return Err(Error::NotMonotone {
                    step: step + 1,
                    vertex: v,
                });
            }
            if b > sup[i] {
                sup[i] = b;
            }
        }
    }
    let diverges = domain.interior().iter().all(|&x| {
        let i = closure.binary_search(&x).unwrap();
        match sup[i] {
            ExtReal::Finite(v) => v > cap,
            ExtReal::Infinite => true,
        }
    });
    if diverges && !domain.interior().is_empty() {
        return Ok(Envelope::Diverges);
    }
    let function = ExtendedFunction::new(closure, sup)?;
    let residual = harmonicity_residual(space, &function, domain)?;
    Ok(Envelope::Harmonic { function, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{generate, Geometry};

    fn path5() -> HarmonicSpace {
        generate(&Geometry::Path(5)).unwrap()
    }

    fn data(pairs: &[(usize, f64)]) -> ExtendedFunction {
        ExtendedFunction::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn residual_examples() {
        let s = path5();
        let u = Domain::whole(&s);
        let spike = data(&[(0, 0.0), (1, 0.0), (2, 1.0), (3, 0.0), (4, 0.0)]);
        assert!((harmonicity_residual(&s, &spike, &u).unwrap() - 0.5).abs() < 1e-15);
        let id = data(&[(0, 0.0), (1, 1.0), (2, 2.0), (3, 3.0), (4, 4.0)]);
        assert_eq!(harmonicity_residual(&s, &id, &u).unwrap(), 0.0);
        let one = ExtendedFunction::constant(&[0, 1, 2, 3, 4], 1.0);
        assert_eq!(harmonicity_residual(&s, &one, &u).unwrap(), 0.0);
    }

    #[test]
    fn residual_rejects_infinity() {
        let s = path5();
        let u = Domain::whole(&s);
        let f = ExtendedFunction::new(
            vec![0, 1, 2, 3, 4],
            vec![
                ExtReal::Finite(0.0),
                ExtReal::Infinite,
                ExtReal::Finite(0.0),
                ExtReal::Finite(0.0),
                ExtReal::Finite(0.0),
            ],
        )
        .unwrap();
        assert!(matches!(harmonicity_residual(&s, &f, &u), Err(Error::NotInSort { vertex: 1 })));
    }

    #[test]
    fn gamblers_ruin() {
        let s = path5();
        let u = Domain::whole(&s);
        let h = solve_dirichlet(&s, &u, &data(&[(0, 0.0), (4, 1.0)])).unwrap();
        for k in 0..5 {
            assert!((h.value(k).unwrap() - k as f64 / 4.0).abs() < 1e-12);
        }
        let t = trace(&h, &u).unwrap();
        assert_eq!(t, data(&[(0, 0.0), (4, 1.0)]));
    }

    #[test]
    fn tree_leaf_indicator_gives_quarter_at_root() {
        let s = generate(&Geometry::BinaryTree(2)).unwrap();
        let u = Domain::whole(&s);
        let mut g: Vec<(usize, f64)> = (3..7).map(|v| (v, 0.0)).collect();
        g[0].1 = 1.0;
        let h = solve_dirichlet(&s, &u, &data(&g)).unwrap();
        assert!((h.value(0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn deficiency_examples() {
        let s = path5();
        let u = Domain::whole(&s);
        let spike = data(&[(0, 0.0), (1, 0.0), (2, 1.0), (3, 0.0), (4, 0.0)]);
        let d = superharmonic_deficiency(&s, &spike, &u).unwrap();
        assert_eq!(d.value, 0.5);
        assert_eq!(d.witness, Some(1));
        let tent = data(&[(0, 0.0), (1, 1.0), (2, 2.0), (3, 1.0), (4, 0.0)]);
        assert_eq!(superharmonic_deficiency(&s, &tent, &u).unwrap().value, 0.0);
        let neg = data(&[(0, 0.0), (1, -1.0), (2, 0.0), (3, 0.0), (4, 0.0)]);
        assert!(matches!(superharmonic_deficiency(&s, &neg, &u), Err(Error::NotInCone(_))));
    }

    #[test]
    fn subdomain_form_agrees() {
        let s = path5();
        let u = Domain::whole(&s);
        for f in [
            data(&[(0, 0.0), (1, 0.0), (2, 1.0), (3, 0.0), (4, 0.0)]),
            data(&[(0, 0.0), (1, 1.0), (2, 2.0), (3, 1.0), (4, 0.0)]),
        ] {
            let c = check_superharmonic_subdomains(&s, &f, &u).unwrap();
            assert!(c.agree, "{c:?}");
        }
    }

    #[test]
    fn infinite_neighbor_breaks_superharmonicity() {
        let s = path5();
        let u = Domain::whole(&s);
        let f = ExtendedFunction::new(
            vec![0, 1, 2, 3, 4],
            vec![
                ExtReal::Finite(0.0),
                ExtReal::Finite(1.0),
                ExtReal::Infinite,
                ExtReal::Finite(1.0),
                ExtReal::Finite(0.0),
            ],
        )
        .unwrap();
        let d = superharmonic_deficiency(&s, &f, &u).unwrap();
        assert_eq!(d.value, f64::INFINITY);
    }

    #[test]
    fn harnack_on_path() {
        let s = path5();
        let u = Domain::whole(&s);
        let h = harnack_constant(&s, &[1, 2, 3], &u).unwrap();
        assert!((h.constant - 3.0).abs() < 1e-12);
        assert_eq!(harnack_constant(&s, &[2], &u).unwrap().constant, 1.0);
        assert!(matches!(harnack_constant(&s, &[], &u), Err(Error::EmptySet(_))));
    }

    #[test]
    fn envelope_examples() {
        let s = path5();
        let u = Domain::whole(&s);
        let h = data(&[(0, 1.0), (1, 0.75), (2, 0.5), (3, 0.25), (4, 0.0)]);
        match monotone_envelope(&s, &[h.clone(), h.clone(), h.clone()], &u, 1e3).unwrap() {
            Envelope::Harmonic { function, residual } => {
                assert_eq!(function, h);
                assert!(residual < 1e-15);
            }
            Envelope::Diverges => panic!("constant sequence diverged"),
        }
        let seq: Vec<_> = (0..6)
            .map(|e| {
                let c = 10f64.powi(e);
                h.linear_combination(c, &h, 0.0).unwrap()
            })
            .collect();
        assert_eq!(monotone_envelope(&s, &seq, &u, 1e3).unwrap(), Envelope::Diverges);
        let rev: Vec<_> = seq.iter().rev().cloned().collect();
        assert!(matches!(
            monotone_envelope(&s, &rev, &u, 1e3),
            Err(Error::NotMonotone { step: 1, .. })
        ));
    }
}

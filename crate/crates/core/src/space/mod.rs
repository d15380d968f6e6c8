//! Discrete harmonic spaces: weighted graphs carrying a row-substochastic
//! averaging kernel `P`, an absorbing set and a base point.
//!
//! A function is harmonic at a non-absorbing vertex `x` when `Pf(x) = f(x)`.
//! Absorbing vertices have zero kernel rows and act as the boundary at
//! infinity of the space.

mod function;
pub mod geometry;

use std::collections::{HashMap, VecDeque};

pub use function::{
    bounded_transform, glue, lattice, restrict, sup_norm, ExtReal, ExtendedFunction, LatticeOp,
};
pub use geometry::{generate, random_network, Geometry};

use crate::error::{Error, Result};

/// A finite discrete harmonic space.
#[derive(Debug, Clone)]
pub struct HarmonicSpace {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    conductances: Vec<Vec<(usize, f64)>>,
    killing: Vec<f64>,
    absorbing: Vec<bool>,
    base_point: usize,
    kernel: Vec<Vec<(usize, f64)>>,
    coords: Option<Vec<[f64; 3]>>,
    spacing: Option<f64>,
    reversible: Option<Vec<f64>>,
}

impl PartialEq for HarmonicSpace {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
            && self.kernel == other.kernel
            && self.killing == other.killing
            && self.absorbing == other.absorbing
            && self.base_point == other.base_point
    }
}

/// Incremental construction of a [`HarmonicSpace`] from vertex ids, edge
/// conductances, an absorbing list, optional killing and a base point.
#[derive(Debug, Clone, Default)]
pub struct SpaceBuilder {
    ids: Vec<String>,
    edges: Vec<(usize, usize, f64)>,
    absorbing: Vec<usize>,
    killing: Vec<(usize, f64)>,
    base_point: Option<usize>,
    coords: Option<Vec<[f64; 3]>>,
    spacing: Option<f64>,
}

impl SpaceBuilder {
    pub fn new<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SpaceBuilder {
            ids: ids.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    /// Vertices named `"0"`, `"1"`, ...
    pub fn with_len(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Undirected edge: conductance `w` in both directions.
    pub fn edge(&mut self, a: usize, b: usize, w: f64) -> &mut Self {
        self.edges.push((a, b, w));
        if a != b {
            self.edges.push((b, a, w));
        }
        self
    }

    pub fn directed_edge(&mut self, from: usize, to: usize, w: f64) -> &mut Self {
        self.edges.push((from, to, w));
        self
    }

    pub fn absorbing(&mut self, v: usize) -> &mut Self {
        self.absorbing.push(v);
        self
    }

    pub fn killing(&mut self, v: usize, p: f64) -> &mut Self {
        self.killing.push((v, p));
        self
    }

    pub fn base_point(&mut self, v: usize) -> &mut Self {
        self.base_point = Some(v);
        self
    }

    pub fn coords(&mut self, coords: Vec<[f64; 3]>, spacing: Option<f64>) -> &mut Self {
        self.coords = Some(coords);
        self.spacing = spacing;
        self
    }

    pub fn build(&self) -> Result<HarmonicSpace> {
        let n = self.ids.len();
        if n == 0 {
            return Err(Error::InvalidSpace("no vertices".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in self.ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidSpace(format!("duplicate vertex id {id:?}")));
            }
        }
        let check = |v: usize| -> Result<()> {
            if v < n {
                Ok(())
            } else {
                Err(Error::InvalidSpace(format!("vertex index {v} out of range")))
            }
        };

        let mut cond: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        let mut incident = vec![false; n];
        for &(a, b, w) in &self.edges {
            check(a)?;
            check(b)?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidSpace(format!(
                    "edge {} -> {} has invalid weight {w}",
                    self.ids[a], self.ids[b]
                )));
            }
            *cond[a].entry(b).or_insert(0.0) += w;
            incident[a] = true;
            incident[b] = true;
        }
        if let Some(v) = (0..n).find(|&v| !incident[v]) {
            return Err(Error::InvalidSpace(format!("isolated vertex {:?}", self.ids[v])));
        }

        let mut absorbing = vec![false; n];
        for &v in &self.absorbing {
            check(v)?;
            absorbing[v] = true;
        }
        let mut killing = vec![0.0; n];
        for &(v, p) in &self.killing {
            check(v)?;
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidSpace(format!(
                    "killing probability {p} at {:?} outside [0, 1)",
                    self.ids[v]
                )));
            }
            killing[v] = p;
        }
        let base_point = self
            .base_point
            .ok_or_else(|| Error::InvalidSpace("missing base point".into()))?;
        check(base_point)?;
        if absorbing[base_point] {
            return Err(Error::InvalidSpace("base point is absorbing".into()));
        }

        let conductances: Vec<Vec<(usize, f64)>> = cond
            .into_iter()
            .map(|m| {
                let mut row: Vec<(usize, f64)> = m.into_iter().collect();
                row.sort_by_key(|&(j, _)| j);
                row
            })
            .collect();

        let mut kernel = vec![Vec::new(); n];
        for x in 0..n {
            if absorbing[x] {
                continue;
            }
            let deg: f64 = conductances[x].iter().map(|&(_, w)| w).sum();
            if deg <= 0.0 {
                return Err(Error::InvalidSpace(format!(
                    "non-absorbing vertex {:?} has no outgoing weight",
                    self.ids[x]
                )));
            }
            kernel[x] = conductances[x]
                .iter()
                .filter(|&&(_, w)| w > 0.0)
                .map(|&(y, w)| (y, (1.0 - killing[x]) * w / deg))
                .collect();
        }

        let reversible = reversible_measure(&conductances, &absorbing, &killing);
        let space = HarmonicSpace {
            ids: self.ids.clone(),
            index,
            conductances,
            killing,
            absorbing,
            base_point,
            kernel,
            coords: self.coords.clone(),
            spacing: self.spacing,
            reversible,
        };
        space.check_transient()?;
        Ok(space)
    }
}

/// `m(x) = deg(x) / (1 − k(x))` when conductances between non-absorbing
/// vertices are symmetric; then `m(x) P(x,y) = m(y) P(y,x)`.
fn reversible_measure(
    cond: &[Vec<(usize, f64)>],
    absorbing: &[bool],
    killing: &[f64],
) -> Option<Vec<f64>> {
    let lookup = |a: usize, b: usize| -> f64 {
        cond[a]
            .binary_search_by_key(&b, |&(j, _)| j)
            .map(|k| cond[a][k].1)
            .unwrap_or(0.0)
    };
    for (x, row) in cond.iter().enumerate() {
        if absorbing[x] {
            continue;
        }
        for &(y, w) in row {
            if !absorbing[y] && lookup(y, x) != w {
                return None;
            }
        }
    }
    Some(
        cond.iter()
            .enumerate()
            .map(|(x, row)| {
                if absorbing[x] {
                    0.0
                } else {
                    row.iter().map(|&(_, w)| w).sum::<f64>() / (1.0 - killing[x])
                }
            })
            .collect(),
    )
}

impl HarmonicSpace {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn is_absorbing(&self, v: usize) -> bool {
        self.absorbing[v]
    }

    pub fn killing(&self, v: usize) -> f64 {
        self.killing[v]
    }

    /// Row `x` of the averaging kernel, as `(y, P(x,y))` pairs.
    pub fn kernel_row(&self, x: usize) -> &[(usize, f64)] {
        &self.kernel[x]
    }

    pub fn kernel_entry(&self, x: usize, y: usize) -> f64 {
        self.kernel[x]
            .binary_search_by_key(&y, |&(j, _)| j)
            .map(|k| self.kernel[x][k].1)
            .unwrap_or(0.0)
    }

    /// Outgoing conductances as given at construction (absorbing rows kept).
    pub fn conductances(&self, x: usize) -> &[(usize, f64)] {
        &self.conductances[x]
    }

    pub fn row_sum(&self, x: usize) -> f64 {
        self.kernel[x].iter().map(|&(_, p)| p).sum()
    }

    pub fn absorbing_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.absorbing[v]).collect()
    }

    pub fn non_absorbing(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| !self.absorbing[v]).collect()
    }

    pub fn coords(&self) -> Option<&[[f64; 3]]> {
        self.coords.as_deref()
    }

    /// Lattice spacing for discretizations of continuum geometries.
    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    /// Stationary weights `m` with `m(x)P(x,y) = m(y)P(y,x)` on non-absorbing
    /// vertices, when the conductances are symmetric there.
    pub fn reversible_measure(&self) -> Option<&[f64]> {
        self.reversible.as_deref()
    }

    /// `(Pf)(x)` for every vertex; zero on absorbing vertices.
    pub fn apply_kernel(&self, f: &[f64]) -> Vec<f64> {
        self.kernel
            .iter()
            .map(|row| row.iter().map(|&(y, p)| p * f[y]).sum())
            .collect()
    }

    /// Every non-absorbing vertex must reach a vertex whose kernel row loses
    /// mass (to an absorbing vertex or through killing).
    fn check_transient(&self) -> Result<()> {
        let n = self.len();
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut queue = VecDeque::new();
        let mut reaches = vec![false; n];
        for x in 0..n {
            if self.absorbing[x] {
                continue;
            }
            let interior_mass: f64 = self.kernel[x]
                .iter()
                .filter(|&&(y, _)| !self.absorbing[y])
                .map(|&(_, p)| p)
                .sum();
            let leaks = self.killing[x] > 0.0
                || self.kernel[x].iter().any(|&(y, _)| self.absorbing[y])
                || interior_mass < 1.0 - 1e-15;
            if leaks {
                reaches[x] = true;
                queue.push_back(x);
            }
            for &(y, _) in &self.kernel[x] {
                if !self.absorbing[y] {
                    reverse[y].push(x);
                }
            }
        }
        while let Some(y) = queue.pop_front() {
            for &x in &reverse[y] {
                if !reaches[x] {
                    reaches[x] = true;
                    queue.push_back(x);
                }
            }
        }
        let stuck: Vec<&str> = (0..n)
            .filter(|&x| !self.absorbing[x] && !reaches[x])
            .map(|x| self.ids[x].as_str())
            .collect();
        if stuck.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpace(format!(
                "no route to absorption or killing from {stuck:?}"
            )))
        }
    }

    /// The closure of `domain` as a space of its own: interior rows are kept,
    /// boundary vertices become absorbing. Vertex ids are preserved and the
    /// returned map sends new indices to indices of `self`.
    pub fn closure_space(&self, domain: &Domain) -> Result<(HarmonicSpace, Vec<usize>)> {
        self.check_domain(domain)?;
        let closure = domain.closure();
        let mut local = vec![usize::MAX; self.len()];
        for (i, &v) in closure.iter().enumerate() {
            local[v] = i;
        }
        let mut b = SpaceBuilder::new(closure.iter().map(|&v| self.ids[v].clone()));
        for &x in domain.interior() {
            for &(y, w) in &self.conductances[x] {
                if w > 0.0 {
                    b.directed_edge(local[x], local[y], w);
                }
            }
            if self.killing[x] > 0.0 {
                b.killing(local[x], self.killing[x]);
            }
        }
        for &v in domain.boundary() {
            b.absorbing(local[v]);
        }
        let base = if domain.contains(self.base_point) {
            self.base_point
        } else {
            *domain
                .interior()
                .first()
                .ok_or(Error::EmptySet("domain interior"))?
        };
        b.base_point(local[base]);
        Ok((b.build()?, closure))
    }

    pub(crate) fn check_domain(&self, domain: &Domain) -> Result<()> {
        if domain.space_len() != self.len() {
            Err(Error::DomainMismatch(format!(
                "domain built for {} vertices, space has {}",
                domain.space_len(),
                self.len()
            )))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Outside,
    Interior,
    Boundary,
}

/// A subdomain `U`: an interior set of non-absorbing vertices. The boundary
/// `∂U` is derived: every vertex outside `U` reachable in one kernel step
/// from `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    interior: Vec<usize>,
    boundary: Vec<usize>,
    roles: Vec<Role>,
}

impl Domain {
    /// Builds a domain, checking that every interior vertex can leave the
    /// interior (through the boundary or by killing).
    pub fn new(space: &HarmonicSpace, interior: impl IntoIterator<Item = usize>) -> Result<Self> {
        let n = space.len();
        let mut roles = vec![Role::Outside; n];
        for v in interior {
            if v >= n {
                return Err(Error::DomainMismatch(format!("vertex {v} out of range")));
            }
            if space.is_absorbing(v) {
                return Err(Error::DomainMismatch(format!(
                    "absorbing vertex {:?} cannot be interior",
                    space.id(v)
                )));
            }
            roles[v] = Role::Interior;
        }
        let interior: Vec<usize> = (0..n).filter(|&v| roles[v] == Role::Interior).collect();
        for &x in &interior {
            for &(y, _) in space.kernel_row(x) {
                if roles[y] == Role::Outside {
                    roles[y] = Role::Boundary;
                }
            }
        }
        let boundary: Vec<usize> = (0..n).filter(|&v| roles[v] == Role::Boundary).collect();
        let domain = Domain {
            interior,
            boundary,
            roles,
        };
        domain.check_regular(space)?;
        Ok(domain)
    }

    /// The whole space: all non-absorbing vertices.
    pub fn whole(space: &HarmonicSpace) -> Self {
        Domain::new(space, space.non_absorbing()).expect("transient spaces are regular")
    }

    fn check_regular(&self, space: &HarmonicSpace) -> Result<()> {
        let n = self.roles.len();
        let mut ok = vec![false; n];
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut queue = VecDeque::new();
        for &x in &self.interior {
            let inside: f64 = space
                .kernel_row(x)
                .iter()
                .filter(|&&(y, _)| self.roles[y] == Role::Interior)
                .map(|&(_, p)| p)
                .sum();
            if inside < 1.0 - 1e-15 {
                ok[x] = true;
                queue.push_back(x);
            }
            for &(y, _) in space.kernel_row(x) {
                if self.roles[y] == Role::Interior {
                    reverse[y].push(x);
                }
            }
        }
        while let Some(y) = queue.pop_front() {
            for &x in &reverse[y] {
                if !ok[x] {
                    ok[x] = true;
                    queue.push_back(x);
                }
            }
        }
        match self.interior.iter().find(|&&x| !ok[x]) {
            Some(&vertex) => Err(Error::IrregularDomain { vertex }),
            None => Ok(()),
        }
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior and boundary together, in vertex order.
    pub fn closure(&self) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&v| self.roles[v] != Role::Outside)
            .collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.roles.get(v) == Some(&Role::Interior)
    }

    pub fn on_boundary(&self, v: usize) -> bool {
        self.roles.get(v) == Some(&Role::Boundary)
    }

    pub fn space_len(&self) -> usize {
        self.roles.len()
    }

    /// Interior position of every vertex (`None` outside the interior).
    pub(crate) fn local_index(&self) -> Vec<Option<usize>> {
        let mut local = vec![None; self.roles.len()];
        for (i, &v) in self.interior.iter().enumerate() {
            local[v] = Some(i);
        }
        local
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path5() -> HarmonicSpace {
        generate(&Geometry::Path(5)).unwrap()
    }

    #[test]
    fn path_kernel_rows() {
        let s = path5();
        assert_eq!(s.len(), 5);
        assert_eq!(s.absorbing_vertices(), vec![0, 4]);
        assert_eq!(s.kernel_entry(1, 0), 0.5);
        assert_eq!(s.kernel_entry(1, 2), 0.5);
        assert!(s.kernel_row(0).is_empty());
        assert_eq!(s.base_point(), 2);
    }

    #[test]
    fn recurrent_component_is_rejected() {
        let mut b = SpaceBuilder::with_len(4);
        b.edge(0, 1, 1.0).edge(2, 3, 1.0).absorbing(0).base_point(1);
        let err = b.build().unwrap_err();
        assert!(matches!(err, Error::InvalidSpace(msg) if msg.contains("\"2\"")));
    }

    #[test]
    fn killing_makes_a_loop_transient() {
        let mut b = SpaceBuilder::with_len(1);
        b.edge(0, 0, 1.0).killing(0, 0.5).base_point(0);
        let s = b.build().unwrap();
        assert_eq!(s.kernel_entry(0, 0), 0.5);
    }

    #[test]
    fn isolated_and_negative_weights_rejected() {
        let mut b = SpaceBuilder::with_len(3);
        b.edge(0, 1, 1.0).absorbing(0).base_point(1);
        assert!(b.build().is_err());
        let mut b = SpaceBuilder::with_len(2);
        b.edge(0, 1, -1.0).absorbing(0).base_point(1);
        assert!(b.build().is_err());
    }

    #[test]
    fn domain_boundary_is_derived() {
        let s = path5();
        let d = Domain::new(&s, [2]).unwrap();
        assert_eq!(d.boundary(), &[1, 3]);
        assert_eq!(d.closure(), vec![1, 2, 3]);
        assert!(Domain::new(&s, [0]).is_err());
    }

    #[test]
    fn closure_space_keeps_interior_rows() {
        let s = path5();
        let d = Domain::new(&s, [1, 2]).unwrap();
        let (sub, map) = s.closure_space(&d).unwrap();
        assert_eq!(map, vec![0, 1, 2, 3]);
        assert!(sub.is_absorbing(0) && sub.is_absorbing(3));
        assert_eq!(sub.kernel_entry(2, 3), 0.5);
    }

    #[test]
    fn reversible_measure_balances_flows() {
        let mut b = SpaceBuilder::with_len(4);
        b.edge(0, 1, 2.0).edge(1, 2, 1.0).edge(2, 3, 3.0).edge(1, 3, 0.5);
        b.absorbing(3).killing(1, 0.2).base_point(1);
        let s = b.build().unwrap();
        let m = s.reversible_measure().unwrap();
        for x in s.non_absorbing() {
            for y in s.non_absorbing() {
                let lhs = m[x] * s.kernel_entry(x, y);
                let rhs = m[y] * s.kernel_entry(y, x);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }
}

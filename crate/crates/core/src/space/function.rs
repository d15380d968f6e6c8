use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

use super::Domain;

/// A real value or `+∞`. The infinite value is an explicit marker, never a
/// floating-point overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    /// `|u| / (1 + |u|)`, with `∞ ↦ 1`.
    pub fn bounded(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v.abs() / (1.0 + v.abs()),
            ExtReal::Infinite => 1.0,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinite) => Some(Ordering::Less),
            (ExtReal::Infinite, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Infinite, ExtReal::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

/// A function on a finite vertex set with values in `ℝ ∪ {+∞}`. The support
/// is kept sorted in vertex order; operations on the positive cone check
/// non-negativity themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedFunction {
    support: Vec<usize>,
    values: Vec<ExtReal>,
}

impl ExtendedFunction {
    pub fn new(support: Vec<usize>, values: Vec<ExtReal>) -> Result<Self> {
        if support.len() != values.len() {
            return Err(Error::DomainMismatch(format!(
                "{} vertices but {} values",
                support.len(),
                values.len()
            )));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DomainMismatch("support must be strictly increasing".into()));
        }
        if let Some(i) = values
            .iter()
            .position(|v| matches!(v, ExtReal::Finite(x) if x.is_nan()))
        {
            return Err(Error::NotInSort { vertex: support[i] });
        }
        Ok(ExtendedFunction { support, values })
    }

    /// A finite function given by `(vertex, value)` pairs in any order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut pairs: Vec<(usize, f64)> = pairs.into_iter().collect();
        pairs.sort_by_key(|&(v, _)| v);
        let (support, values) = pairs
            .into_iter()
            .map(|(v, x)| (v, ExtReal::Finite(x)))
            .unzip();
        Self::new(support, values)
    }

    /// A finite function defined on every vertex `0..values.len()`.
    pub fn from_dense(values: &[f64]) -> Self {
        ExtendedFunction {
            support: (0..values.len()).collect(),
            values: values.iter().map(|&v| ExtReal::Finite(v)).collect(),
        }
    }

    pub fn constant(support: &[usize], c: f64) -> Self {
        let mut support = support.to_vec();
        support.sort_unstable();
        support.dedup();
        ExtendedFunction {
            values: vec![ExtReal::Finite(c); support.len()],
            support,
        }
    }

    /// The function on `domain`'s interior.
    pub fn on_interior(domain: &Domain, values: impl Fn(usize) -> f64) -> Self {
        ExtendedFunction {
            support: domain.interior().to_vec(),
            values: domain
                .interior()
                .iter()
                .map(|&v| ExtReal::Finite(values(v)))
                .collect(),
        }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<ExtReal> {
        self.support
            .binary_search(&v)
            .ok()
            .map(|i| self.values[i])
    }

    /// Finite value at `v`; errors when `v` is outside the support or the
    /// value is infinite.
    pub fn value(&self, v: usize) -> Result<f64> {
        match self.get(v) {
            Some(ExtReal::Finite(x)) => Ok(x),
            Some(ExtReal::Infinite) => Err(Error::NotInSort { vertex: v }),
            None => Err(Error::DomainMismatch(format!("vertex {v} outside the support"))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, ExtReal)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }

    /// Vertices carrying `+∞`, exactly.
    pub fn infinite_set(&self) -> Vec<usize> {
        self.iter()
            .filter(|(_, v)| v.is_infinite())
            .map(|(x, _)| x)
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| !v.is_infinite())
    }

    /// Dense array of length `n`, with `fill` off the support. Errors on
    /// infinite values.
    pub fn to_dense(&self, n: usize, fill: f64) -> Result<Vec<f64>> {
        let mut out = vec![fill; n];
        for (v, x) in self.iter() {
            if v >= n {
                return Err(Error::DomainMismatch(format!("vertex {v} out of range")));
            }
            out[v] = x.finite().ok_or(Error::NotInSort { vertex: v })?;
        }
        Ok(out)
    }

    pub fn covers(&self, vertices: &[usize]) -> bool {
        vertices.iter().all(|v| self.support.binary_search(v).is_ok())
    }

    /// Pointwise restriction to `vertices`, which must lie in the support.
    pub fn restrict_to(&self, vertices: &[usize]) -> Result<Self> {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let values = sorted
            .iter()
            .map(|&v| {
                self.get(v)
                    .ok_or_else(|| Error::DomainMismatch(format!("vertex {v} outside the support")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtendedFunction {
            support: sorted,
            values,
        })
    }

    pub fn min_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .filter_map(|v| v.finite())
            .reduce(f64::min)
    }

    pub fn max_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .filter_map(|v| v.finite())
            .reduce(f64::max)
    }

    /// `a·self + b·other` on a common support (finite functions only).
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        same_support(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.support)
            .map(|((x, y), &v)| match (x, y) {
                (ExtReal::Finite(x), ExtReal::Finite(y)) => Ok(ExtReal::Finite(a * x + b * y)),
                _ => Err(Error::NotInSort { vertex: v }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtendedFunction {
            support: self.support.clone(),
            values,
        })
    }

    /// Largest absolute difference over the common support.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_support(self, other)?;
        let mut worst: f64 = 0.0;
        for ((v, x), y) in self.iter().zip(&other.values) {
            match (x, y) {
                (ExtReal::Finite(x), ExtReal::Finite(y)) => worst = worst.max((x - y).abs()),
                (ExtReal::Infinite, ExtReal::Infinite) => {}
                _ => return Err(Error::NotInSort { vertex: v }),
            }
        }
        Ok(worst)
    }
}

fn same_support(f: &ExtendedFunction, g: &ExtendedFunction) -> Result<()> {
    if f.support == g.support {
        Ok(())
    } else {
        Err(Error::DomainMismatch("functions live on different vertex sets".into()))
    }
}

/// Restriction `ρ_{V,U}`: the function on `V`'s interior. `f` must be
/// defined on all of it.
pub fn restrict(f: &ExtendedFunction, v: &Domain) -> Result<ExtendedFunction> {
    if !f.covers(v.interior()) {
        return Err(Error::DomainMismatch(
            "target domain is not contained in the function's domain".into(),
        ));
    }
    f.restrict_to(v.interior())
}

/// Pastes a compatible family of sections into one function on the union of
/// the interiors. Overlaps must agree exactly.
pub fn glue(family: &[(Domain, ExtendedFunction)]) -> Result<ExtendedFunction> {
    let mut merged: Vec<(usize, ExtReal)> = Vec::new();
    for (domain, f) in family {
        if f.support() != domain.interior() {
            return Err(Error::DomainMismatch(
                "section is not defined exactly on its domain".into(),
            ));
        }
        merged.extend(f.iter());
    }
    merged.sort_by_key(|&(v, _)| v);
    let mut support = Vec::with_capacity(merged.len());
    let mut values: Vec<ExtReal> = Vec::with_capacity(merged.len());
    for (v, x) in merged {
        if support.last() == Some(&v) {
            if values.last() != Some(&x) {
                return Err(Error::IncompatibleFamily { vertex: v });
            }
        } else {
            support.push(v);
            values.push(x);
        }
    }
    ExtendedFunction::new(support, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    Meet,
    Join,
}

/// Pointwise `min` (meet) or `max` (join); `+∞` absorbs under join.
pub fn lattice(f: &ExtendedFunction, g: &ExtendedFunction, op: LatticeOp) -> Result<ExtendedFunction> {
    same_support(f, g)?;
    let values = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(&x, &y)| {
            let x_le_y = x <= y;
            match op {
                LatticeOp::Meet => {
                    if x_le_y {
                        x
                    } else {
                        y
                    }
                }
                LatticeOp::Join => {
                    if x_le_y {
                        y
                    } else {
                        x
                    }
                }
            }
        })
        .collect();
    Ok(ExtendedFunction {
        support: f.support.clone(),
        values,
    })
}

/// `sup |f|`, infinite if any value is.
pub fn sup_norm(f: &ExtendedFunction) -> f64 {
    f.values.iter().fold(0.0, |acc, v| match v {
        ExtReal::Finite(x) => acc.max(x.abs()),
        ExtReal::Infinite => f64::INFINITY,
    })
}

/// The bounded transform `u ↦ |u|/(1+|u|)` into `[0, 1]`, `∞ ↦ 1`.
pub fn bounded_transform(f: &ExtendedFunction) -> Vec<(usize, f64)> {
    f.iter().map(|(v, x)| (v, x.bounded())).collect()
}

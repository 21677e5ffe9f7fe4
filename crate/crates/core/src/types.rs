//! Shared domain types: frequencies, spaces, node sets and partitions.

use thiserror::Error;

/// Errors from constructing the domain types in this module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("frequency must be nonzero and finite, got {0}")]
    InvalidFrequency(f64),
    #[error("node {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("duplicate node {0}")]
    Duplicate(f64),
    #[error("node value is not finite: {0}")]
    NonFinite(f64),
    #[error("invalid combination: {0}")]
    InvalidCombination(&'static str),
}

/// The oscillation parameter of the weight exp(-2*pi*i*k*x).
///
/// Stores the value as `f64` together with a flag recording whether the
/// value is exactly an integer. Operations that are only defined for
/// integer frequencies branch on the flag instead of comparing against an
/// epsilon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    k: f64,
    integer: bool,
}

impl Frequency {
    /// Nonzero finite frequency. The integer flag is set exactly when the
    /// value has no fractional part.
    pub fn new(k: f64) -> Result<Self, CoreError> {
        if k == 0.0 || !k.is_finite() {
            return Err(CoreError::InvalidFrequency(k));
        }
        Ok(Frequency {
            k,
            integer: k.fract() == 0.0,
        })
    }

    /// Frequency from a nonzero integer; the integer flag is always set.
    pub fn from_integer(k: i64) -> Result<Self, CoreError> {
        if k == 0 {
            return Err(CoreError::InvalidFrequency(0.0));
        }
        Ok(Frequency {
            k: k as f64,
            integer: true,
        })
    }

    pub fn value(&self) -> f64 {
        self.k
    }

    pub fn abs(&self) -> f64 {
        self.k.abs()
    }

    pub fn is_integer(&self) -> bool {
        self.integer
    }

    /// The exact integer value when the flag is set.
    pub fn as_integer(&self) -> Option<i64> {
        self.integer.then_some(self.k as i64)
    }
}

/// Which Sobolev space the integrands live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Zero boundary values: f(0) = f(1) = 0.
    H10,
    /// Full space; endpoint values unknown unless sampled.
    H1,
}

impl SpaceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpaceKind::H10 => "h10",
            SpaceKind::H1 => "h1",
        }
    }
}

/// Role of a partition interval, which decides the per-interval extremal
/// problem: both endpoint values known (interior) or one end free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalRole {
    Interior,
    LeftEnd,
    RightEnd,
}

/// Interval lengths induced by a node set, with role tags.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    lengths: Vec<f64>,
    roles: Vec<IntervalRole>,
}

impl Partition {
    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn roles(&self) -> &[IntervalRole] {
        &self.roles
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, IntervalRole)> + '_ {
        self.lengths.iter().copied().zip(self.roles.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }
}

/// Strictly increasing sample nodes in [0, 1] plus the space they serve.
///
/// All types here are immutable after construction and safe to share
/// between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    nodes: Vec<f64>,
    space: SpaceKind,
}

impl NodeSet {
    /// Sorts and validates the given node values.
    pub fn new(values: &[f64], space: SpaceKind) -> Result<Self, CoreError> {
        let mut nodes = Vec::with_capacity(values.len());
        for &v in values {
            if !v.is_finite() {
                return Err(CoreError::NonFinite(v));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(CoreError::OutOfRange(v));
            }
            nodes.push(v);
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in nodes.windows(2) {
            if w[0] == w[1] {
                return Err(CoreError::Duplicate(w[0]));
            }
        }
        Ok(NodeSet { nodes, space })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interval endpoints of the partition induced by the nodes.
    ///
    /// For H10 the boundary points 0 and 1 are always part of the grid
    /// (the function is pinned there). For H1 the first and last interval
    /// are [0, x_1] and [x_n, 1] with a free value at the outer end; a
    /// node exactly at 0 or 1 just degenerates that end interval to
    /// length zero.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.nodes.len() + 2);
        if self.nodes.first() != Some(&0.0) {
            pts.push(0.0);
        }
        pts.extend_from_slice(&self.nodes);
        if self.nodes.last() != Some(&1.0) {
            pts.push(1.0);
        }
        pts
    }

    /// Derived interval lengths with role tags. Lengths always sum to 1.
    pub fn partition(&self) -> Partition {
        match self.space {
            SpaceKind::H10 => {
                let mut grid = vec![0.0];
                grid.extend_from_slice(&self.nodes);
                grid.push(1.0);
                let lengths: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();
                let roles = vec![IntervalRole::Interior; lengths.len()];
                Partition { lengths, roles }
            }
            SpaceKind::H1 => {
                // With no nodes the extremal problem has no pinned point at
                // all; radius computations special-case that before looking
                // at the partition, so the degenerate tagging here is never
                // consulted.
                if self.nodes.is_empty() {
                    return Partition {
                        lengths: vec![1.0],
                        roles: vec![IntervalRole::Interior],
                    };
                }
                let mut lengths = Vec::with_capacity(self.nodes.len() + 1);
                let mut roles = Vec::with_capacity(self.nodes.len() + 1);
                lengths.push(self.nodes[0]);
                roles.push(IntervalRole::LeftEnd);
                for w in self.nodes.windows(2) {
                    lengths.push(w[1] - w[0]);
                    roles.push(IntervalRole::Interior);
                }
                lengths.push(1.0 - *self.nodes.last().unwrap());
                roles.push(IntervalRole::RightEnd);
                Partition { lengths, roles }
            }
        }
    }
}

/// Sorts and validates node values into a `NodeSet`.
pub fn make_nodeset(values: &[f64], space: SpaceKind) -> Result<NodeSet, CoreError> {
    NodeSet::new(values, space)
}

/// Equidistant nodes.
///
/// Without endpoints: x_j = j/(n+1), j = 1..n (the H10 convention).
/// With endpoints: x_j = j/n, j = 0..n (the H1 convention, n intervals).
/// H10 with endpoints is rejected: the boundary values are already known
/// there, so the combination is ambiguous.
pub fn equidistant_nodes(
    n: usize,
    space: SpaceKind,
    include_endpoints: bool,
) -> Result<NodeSet, CoreError> {
    if n == 0 {
        return Err(CoreError::InvalidCombination("n must be at least 1"));
    }
    match (space, include_endpoints) {
        (SpaceKind::H10, true) => Err(CoreError::InvalidCombination(
            "H10 already pins the endpoints; equidistant nodes there exclude them",
        )),
        (SpaceKind::H10, false) => {
            let values: Vec<f64> = (1..=n).map(|j| j as f64 / (n + 1) as f64).collect();
            NodeSet::new(&values, SpaceKind::H10)
        }
        (SpaceKind::H1, _) => {
            let values: Vec<f64> = if include_endpoints {
                (0..=n).map(|j| j as f64 / n as f64).collect()
            } else {
                (1..=n).map(|j| j as f64 / (n + 1) as f64).collect()
            };
            NodeSet::new(&values, SpaceKind::H1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_integer_flag() {
        assert!(Frequency::new(6.0).unwrap().is_integer());
        assert!(!Frequency::new(1.5).unwrap().is_integer());
        assert_eq!(Frequency::from_integer(-3).unwrap().as_integer(), Some(-3));
        assert!(Frequency::new(0.0).is_err());
        assert!(Frequency::new(f64::NAN).is_err());
    }

    #[test]
    fn midpoint_split() {
        let ns = make_nodeset(&[0.5], SpaceKind::H10).unwrap();
        assert_eq!(ns.partition().lengths(), &[0.5, 0.5]);
    }

    #[test]
    fn equidistant_six_lengths() {
        let values: Vec<f64> = (1..=5).map(|j| j as f64 / 6.0).collect();
        let ns = make_nodeset(&values, SpaceKind::H10).unwrap();
        let p = ns.partition();
        assert_eq!(p.len(), 6);
        for &l in p.lengths() {
            assert!((l - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn duplicates_rejected() {
        assert_eq!(
            make_nodeset(&[0.25, 0.25], SpaceKind::H10),
            Err(CoreError::Duplicate(0.25))
        );
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            make_nodeset(&[1.25], SpaceKind::H10),
            Err(CoreError::OutOfRange(_))
        ));
    }

    #[test]
    fn equidistant_conventions() {
        let ns = equidistant_nodes(3, SpaceKind::H10, false).unwrap();
        assert_eq!(ns.nodes(), &[0.25, 0.5, 0.75]);

        let ns = equidistant_nodes(2, SpaceKind::H1, true).unwrap();
        assert_eq!(ns.nodes(), &[0.0, 0.5, 1.0]);

        let ns = equidistant_nodes(1, SpaceKind::H10, false).unwrap();
        assert_eq!(ns.nodes(), &[0.5]);

        assert!(equidistant_nodes(3, SpaceKind::H10, true).is_err());
    }

    #[test]
    fn partition_sums_to_one() {
        let ns = make_nodeset(&[0.11, 0.37, 0.90], SpaceKind::H1).unwrap();
        let p = ns.partition();
        let total: f64 = p.lengths().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(p.roles()[0], IntervalRole::LeftEnd);
        assert_eq!(p.roles()[p.len() - 1], IntervalRole::RightEnd);
    }

    #[test]
    fn h1_nodes_at_boundary_give_zero_end_lengths() {
        let ns = make_nodeset(&[0.0, 0.5, 1.0], SpaceKind::H1).unwrap();
        let p = ns.partition();
        assert_eq!(p.lengths()[0], 0.0);
        assert_eq!(p.lengths()[p.len() - 1], 0.0);
    }
}

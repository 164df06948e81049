//! The even-sum lattice, the 13-shift stencil and finite models.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::{Error, Result};

/// A point `n = (n₁, n₂, n₃, n₄)` of the lattice of integer 4-tuples with even sum.
///
/// Shifts between lattice points are lattice points themselves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex([i32; 4]);

pub type Shift = MultiIndex;

impl MultiIndex {
    pub const ORIGIN: MultiIndex = MultiIndex([0; 4]);

    pub fn new(c: [i32; 4]) -> Result<Self> {
        if c.iter().sum::<i32>().rem_euclid(2) == 0 {
            Ok(MultiIndex(c))
        } else {
            Err(Error::OddParity(c))
        }
    }

    pub fn coords(self) -> [i32; 4] {
        self.0
    }

    pub fn n4(self) -> i32 {
        self.0[3]
    }

    /// `max(|n₁| + |n₂| + |n₃|, |n₄|)`.
    pub fn g4d(self) -> i32 {
        let [a, b, c, d] = self.0;
        (a.abs() + b.abs() + c.abs()).max(d.abs())
    }

    /// Member of the 13-shift stencil: the null shift or a first-generation shift.
    pub fn is_stencil(self) -> bool {
        let [a, b, c, d] = self.0;
        let spatial = a.abs() + b.abs() + c.abs();
        spatial == d.abs() && spatial <= 1
    }

    fn order_key(self) -> (i32, [i32; 4]) {
        (self.g4d(), self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

impl Add for MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: MultiIndex) -> MultiIndex {
        MultiIndex(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: MultiIndex) -> MultiIndex {
        MultiIndex(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for MultiIndex {
    type Output = MultiIndex;
    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.map(|x| -x))
    }
}

#[rustfmt::skip]
const S13: [[i32; 4]; 13] = [
    [0, 0, 0, 0],
    [0, 0, -1, -1], [0, -1, 0, -1], [-1, 0, 0, -1],
    [1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1],
    [0, 0, -1, 1], [0, -1, 0, 1], [-1, 0, 0, 1],
    [1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1],
];

/// The null shift followed by the twelve first-generation shifts.
pub fn s13() -> [Shift; 13] {
    S13.map(MultiIndex)
}

/// Position of a shift in [`s13`].
pub fn stencil_position(s: Shift) -> Option<usize> {
    S13.iter().position(|c| *c == s.0)
}

/// Truncated, coupling-pruned sublattice.
///
/// `nodes` are the equation nodes (all reachable `n` with `g4d(n) ≤ g_max`).
/// The unknowns live on the extended set `nodes ∪ (nodes + shifts)`; the extra
/// points form the `shell`. Ordinals number `nodes` first, then `shell`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteModel {
    g_max: u32,
    shifts: Vec<Shift>,
    nodes: Vec<MultiIndex>,
    shell: Vec<MultiIndex>,
    ordinal: HashMap<MultiIndex, usize>,
}

impl FiniteModel {
    /// Nodes reachable from the origin through `active_shifts` and their negatives.
    pub fn build(g_max: u32, active_shifts: &[Shift]) -> Result<Self> {
        if g_max < 1 {
            return Err(Error::GMax(g_max));
        }
        let mut shifts = BTreeSet::new();
        for &s in active_shifts {
            if !s.is_stencil() {
                return Err(Error::NotAShift(s.0));
            }
            if s != MultiIndex::ORIGIN {
                shifts.insert(s);
                shifts.insert(-s);
            }
        }
        let mut shifts: Vec<Shift> = shifts.into_iter().collect();
        shifts.sort_by_key(|s| stencil_position(*s));

        let limit = g_max as i32;
        let mut seen = BTreeSet::from([MultiIndex::ORIGIN]);
        let mut queue = VecDeque::from([MultiIndex::ORIGIN]);
        while let Some(n) = queue.pop_front() {
            for &s in &shifts {
                let m = n + s;
                if m.g4d() <= limit && seen.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        let mut nodes: Vec<MultiIndex> = seen.iter().copied().collect();
        nodes.sort_by_key(|n| n.order_key());

        let mut shell: Vec<MultiIndex> = nodes
            .iter()
            .flat_map(|&n| shifts.iter().map(move |&s| n + s))
            .filter(|m| !seen.contains(m))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        shell.sort_by_key(|n| n.order_key());

        let ordinal = nodes.iter().chain(shell.iter()).enumerate().map(|(i, &n)| (n, i)).collect();
        Ok(FiniteModel { g_max, shifts, nodes, shell, ordinal })
    }

    /// Model on an explicit node set, which must contain the origin.
    pub fn with_nodes(active_shifts: &[Shift], nodes: &[MultiIndex]) -> Result<Self> {
        if !nodes.contains(&MultiIndex::ORIGIN) {
            return Err(Error::OutsideModel([0; 4]));
        }
        let g_max = nodes.iter().map(|n| n.g4d()).max().unwrap_or(0).max(1) as u32;
        let mut model = Self::build(1, active_shifts)?;
        let set: BTreeSet<MultiIndex> = nodes.iter().copied().collect();
        let mut nodes: Vec<MultiIndex> = set.iter().copied().collect();
        nodes.sort_by_key(|n| n.order_key());
        let mut shell: Vec<MultiIndex> = nodes
            .iter()
            .flat_map(|&n| model.shifts.iter().map(move |&s| n + s))
            .filter(|m| !set.contains(m))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        shell.sort_by_key(|n| n.order_key());
        model.ordinal = nodes.iter().chain(shell.iter()).enumerate().map(|(i, &n)| (n, i)).collect();
        model.g_max = g_max;
        model.nodes = nodes;
        model.shell = shell;
        Ok(model)
    }

    pub fn g_max(&self) -> u32 {
        self.g_max
    }

    /// Nonzero active shifts, closed under negation, in stencil order.
    pub fn shifts(&self) -> &[Shift] {
        &self.shifts
    }

    /// Null shift followed by the active shifts.
    pub fn stencil(&self) -> impl Iterator<Item = Shift> + '_ {
        std::iter::once(MultiIndex::ORIGIN).chain(self.shifts.iter().copied())
    }

    pub fn nodes(&self) -> &[MultiIndex] {
        &self.nodes
    }

    pub fn shell(&self) -> &[MultiIndex] {
        &self.shell
    }

    /// Equation nodes followed by the shell, in ordinal order.
    pub fn extended(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.nodes.iter().chain(self.shell.iter()).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn extended_len(&self) -> usize {
        self.nodes.len() + self.shell.len()
    }

    pub fn ordinal(&self, n: MultiIndex) -> Option<usize> {
        self.ordinal.get(&n).copied()
    }

    pub fn node_at(&self, ordinal: usize) -> MultiIndex {
        if ordinal < self.nodes.len() {
            self.nodes[ordinal]
        } else {
            self.shell[ordinal - self.nodes.len()]
        }
    }

    pub fn contains(&self, n: MultiIndex) -> bool {
        self.ordinal(n).is_some_and(|i| i < self.nodes.len())
    }

    /// Points outside the equation nodes where a solution supported on the
    /// extended set can leave a nonzero residual.
    pub fn boundary(&self) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = self
            .extended()
            .flat_map(|n| self.stencil().map(move |s| n + s))
            .filter(|&m| !self.contains(m))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        out.sort_by_key(|n| n.order_key());
        out
    }

    /// Model nodes `m ≠ n` with `g4d(n − m) ≤ 2`.
    pub fn coupling_neighbors(&self, n: MultiIndex) -> Result<Vec<MultiIndex>> {
        if !self.contains(n) {
            return Err(Error::OutsideModel(n.0));
        }
        Ok(self.nodes.iter().copied().filter(|&m| m != n && (n - m).g4d() <= 2).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(c: [i32; 4]) -> MultiIndex {
        MultiIndex::new(c).unwrap()
    }

    #[test]
    fn g4d_examples() {
        assert_eq!(MultiIndex::ORIGIN.g4d(), 0);
        assert_eq!(mi([1, 0, 0, -1]).g4d(), 1);
        assert_eq!(mi([-3, 1, 0, 2]).g4d(), 4);
        assert!(matches!(MultiIndex::new([1, 0, 0, 0]), Err(Error::OddParity(_))));
    }

    #[test]
    fn stencil_listing() {
        let s = s13();
        assert_eq!(s.len(), 13);
        assert_eq!(s[0], MultiIndex::ORIGIN);
        assert_eq!(s[1], mi([0, 0, -1, -1]));
        assert_eq!(s[2], mi([0, -1, 0, -1]));
        assert!(s[1..].iter().all(|x| x.g4d() == 1 && x.is_stencil()));
        assert!(!mi([1, 1, 0, 0]).is_stencil());
    }

    #[test]
    fn model_sizes() {
        let all: Vec<Shift> = s13().to_vec();
        assert_eq!(FiniteModel::build(1, &all).unwrap().len(), 13);
        assert_eq!(FiniteModel::build(3, &[]).unwrap().nodes(), &[MultiIndex::ORIGIN]);
        assert!(matches!(FiniteModel::build(0, &all), Err(Error::GMax(0))));
    }

    #[test]
    fn two_wave_model_matches_enumeration() {
        let shifts = [mi([1, 0, 0, 1]), mi([1, 0, 0, -1])];
        for g in 1..=6 {
            let model = FiniteModel::build(g, &shifts).unwrap();
            let g = g as i32;
            let mut count = 0;
            for a in -g..=g {
                for d in -g..=g {
                    if (a + d) % 2 == 0 {
                        count += 1;
                        assert!(model.contains(mi([a, 0, 0, d])));
                    }
                }
            }
            assert_eq!(model.len(), count);
            assert!(model.nodes().iter().all(|n| n.coords()[1] == 0 && n.coords()[2] == 0));
        }
    }

    #[test]
    fn ordering_is_shell_then_lexicographic() {
        let model = FiniteModel::build(2, &s13()).unwrap();
        let again = FiniteModel::build(2, &s13()).unwrap();
        assert_eq!(model, again);
        for w in model.nodes().windows(2) {
            assert!(w[0].order_key() < w[1].order_key());
        }
        for (i, n) in model.extended().enumerate() {
            assert_eq!(model.ordinal(n), Some(i));
            assert_eq!(model.node_at(i), n);
        }
    }

    #[test]
    fn neighbors() {
        let single = FiniteModel::build(1, &[]).unwrap();
        assert!(single.coupling_neighbors(MultiIndex::ORIGIN).unwrap().is_empty());

        let full = FiniteModel::build(1, &s13()).unwrap();
        let nb = full.coupling_neighbors(MultiIndex::ORIGIN).unwrap();
        let brute: Vec<_> = full.nodes().iter().copied().filter(|m| *m != MultiIndex::ORIGIN && m.g4d() <= 2).collect();
        assert_eq!(nb, brute);
        assert_eq!(nb.len(), 12);

        let two = FiniteModel::build(3, &[mi([1, 0, 0, 1]), mi([1, 0, 0, -1])]).unwrap();
        let nb = two.coupling_neighbors(MultiIndex::ORIGIN).unwrap();
        assert!(nb.contains(&mi([2, 0, 0, 0])) && nb.contains(&mi([-2, 0, 0, 0])));
        assert!(matches!(two.coupling_neighbors(mi([9, 0, 0, 1])), Err(Error::OutsideModel(_))));
    }
}

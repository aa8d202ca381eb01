//! Mutations `mu_m: Y(i,k) -> Y(i, k + m_i)` and the matching change of
//! c-array `c'_ij = c_ij + m_i - m_j`.

use std::fmt;
use std::ops::{Add, Neg};
use std::str::FromStr;

use crate::cartan::{CartanMatrix, FoldingSpec};
use crate::error::{Error, Result};
use crate::monomial::{CArray, Monomial};
use crate::scalar::Exponent;

/// A shift vector `m = (m_i)` indexed by the nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mutation {
    m: Vec<i64>,
}

impl Mutation {
    pub fn new(m: Vec<i64>) -> Self {
        Self { m }
    }

    pub fn zero(rank: usize) -> Self {
        Self { m: vec![0; rank] }
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    pub fn values(&self) -> &[i64] {
        &self.m
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|&x| x == 0)
    }

    fn check_rank(&self, n: usize) -> Result<()> {
        if self.m.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.m.len() });
        }
        Ok(())
    }
}

impl Add for &Mutation {
    type Output = Mutation;

    /// Entrywise sum; panics on a rank mismatch.
    fn add(self, other: &Mutation) -> Mutation {
        assert_eq!(self.rank(), other.rank(), "mutation ranks differ");
        Mutation::new(self.m.iter().zip(&other.m).map(|(a, b)| a + b).collect())
    }
}

impl Neg for &Mutation {
    type Output = Mutation;

    fn neg(self) -> Mutation {
        Mutation::new(self.m.iter().map(|x| -x).collect())
    }
}

impl FromStr for Mutation {
    type Err = Error;

    /// Comma-separated integers, e.g. `0,0,1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(Error::parse("mutation", s, "empty input"));
        }
        trimmed
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| Error::parse("mutation", s, format!("bad entry {x:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Mutation::new)
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.m.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `c'_ij = c_ij + m_i - m_j`.
pub fn mutate_carray(c: &CArray, m: &Mutation) -> Result<CArray> {
    c.mutated(&m.m)
}

/// `Y(i,k) -> Y(i, k + m_i)`.
pub fn mutate_monomial<E: Exponent>(x: &Monomial<E>, m: &Mutation) -> Result<Monomial<E>> {
    x.check_nodes(m.rank())?;
    x.shift_rows(|i| m.m[i])
}

/// The target mutation `m_hat` with `m_hat_j = m_{phi(j)}`, so that
/// `v . mu_m = mu_{m_hat} . v`.
pub fn lift_mutation(m: &Mutation, spec: &FoldingSpec) -> Result<Mutation> {
    m.check_rank(spec.source().rank())?;
    Ok(Mutation::new(spec.phi_map().iter().map(|&i| m.m[i]).collect()))
}

/// An orientation of the edges of a Dynkin diagram: `(a, b)` is the arrow
/// `a -> b`, which corresponds to `c_ba = 1` and `c_ab = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    arrows: Vec<(usize, usize)>,
}

impl Orientation {
    pub fn new(arrows: Vec<(usize, usize)>) -> Self {
        Self { arrows }
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    /// The orientation read off from the adjacent entries of `c`.
    pub fn of_carray(c: &CArray, cartan: &CartanMatrix) -> Self {
        let mut arrows = Vec::new();
        for a in 0..cartan.rank() {
            for b in cartan.neighbors(a) {
                if a < b {
                    arrows.push(if c.entry(b, a) == 1 { (a, b) } else { (b, a) });
                }
            }
        }
        Self { arrows }
    }

    /// Both endpoints of the path are sinks: the first edge points to the
    /// first endpoint and every other edge points toward the last one.
    pub fn both_ends_sinks(cartan: &CartanMatrix) -> Result<Self> {
        let path = path_order(cartan)?;
        let arrows = path
            .windows(2)
            .enumerate()
            .map(|(t, w)| if t == 0 { (w[1], w[0]) } else { (w[0], w[1]) })
            .collect();
        Ok(Self { arrows })
    }

    fn points_to(&self, a: usize, b: usize) -> Option<bool> {
        self.arrows.iter().find_map(|&(x, y)| match (x, y) {
            _ if (x, y) == (a, b) => Some(true),
            _ if (x, y) == (b, a) => Some(false),
            _ => None,
        })
    }
}

/// Nodes of a path diagram in order, starting from the lower-numbered endpoint.
pub fn path_order(cartan: &CartanMatrix) -> Result<Vec<usize>> {
    let n = cartan.rank();
    if n == 1 {
        return Ok(vec![0]);
    }
    let degree: Vec<usize> = (0..n).map(|i| cartan.neighbors(i).count()).collect();
    if degree.iter().any(|&d| d == 0 || d > 2) {
        return Err(Error::NotAPath);
    }
    let start = (0..n).find(|&i| degree[i] == 1).ok_or(Error::NotAPath)?;
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(next) = cartan.neighbors(cur).find(|&j| j != prev) {
        if order.contains(&next) {
            return Err(Error::NotAPath);
        }
        order.push(next);
        prev = cur;
        cur = next;
    }
    if order.len() != n {
        return Err(Error::NotAPath);
    }
    Ok(order)
}

/// Composes single-edge flips so that `c` matches `target` on every edge.
///
/// Edges are visited from the starting endpoint outward; fixing edge
/// `(v_t, v_{t+1})` adds a constant to `m` on `v_{t+1}, ..., v_end`.
pub fn reorient_path(c: &CArray, cartan: &CartanMatrix, target: &Orientation) -> Result<(Mutation, CArray)> {
    let path = path_order(cartan)?;
    let n = cartan.rank();
    if c.rank() != n {
        return Err(Error::DimensionMismatch { expected: n, found: c.rank() });
    }
    let mut m = vec![0i64; n];
    for t in 0..path.len().saturating_sub(1) {
        let (a, b) = (path[t], path[t + 1]);
        let want = match target.points_to(b, a) {
            Some(true) => 1,
            Some(false) => 0,
            None => return Err(Error::InvalidFolding(format!("orientation has no arrow on edge ({a}, {b})"))),
        };
        // current c'_ab = c_ab + m_a - m_b
        let delta = c.entry(a, b) + m[a] - m[b] - want;
        for &v in &path[t + 1..] {
            m[v] += delta;
        }
    }
    let m = Mutation::new(m);
    let c_prime = mutate_carray(c, &m)?;
    debug_assert!(path.windows(2).all(|w| (0..=1).contains(&c_prime.entry(w[0], w[1]))));
    Ok((m, c_prime))
}

/// Rows in the bracketed layout `[ 0  1  0 -1]`, columns right-aligned to a
/// common width; diagonal entries print as `0`.
pub fn format_bracket_matrix(rows: &[Vec<i64>]) -> String {
    let width = rows.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
        out.push('[');
        out.push_str(&cells.join(" "));
        out.push_str("]\n");
    }
    out
}

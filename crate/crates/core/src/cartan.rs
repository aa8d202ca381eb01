//! Generalized Cartan matrices, weights in the fundamental-weight basis,
//! roots, and diagram-folding specifications.
//!
//! Nodes are stored 0-based. Each matrix carries a label offset so that text
//! and JSON interfaces can use the customary numbering (1..n for finite
//! types, 0..n for affine ones).

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Exponent};

/// A symmetrizable generalized Cartan matrix `C = (C_ij)` with `C_ij = <h_i, alpha_j>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CartanMatrix {
    n: usize,
    entries: Vec<i64>,
    symmetrizer: Vec<i64>,
    label_offset: i64,
}

impl CartanMatrix {
    /// Validates `rows` and builds the matrix with the default label offset 1.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let symmetrizer = validate_cartan(&rows)?;
        let n = rows.len();
        Ok(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
            symmetrizer,
            label_offset: 1,
        })
    }

    pub fn with_label_offset(mut self, offset: i64) -> Self {
        self.label_offset = offset;
        self
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn label_offset(&self) -> i64 {
        self.label_offset
    }

    /// External label of internal node `i`.
    pub fn label(&self, i: usize) -> i64 {
        i as i64 + self.label_offset
    }

    /// Internal node for an external label.
    pub fn node(&self, label: i64) -> Result<usize> {
        let i = label - self.label_offset;
        if i < 0 || i as usize >= self.n {
            return Err(Error::UnknownLabel { label });
        }
        Ok(i as usize)
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::NodeOutOfRange { index: i, n: self.n });
        }
        Ok(())
    }

    /// `i ~ j`: distinct and joined in the Dynkin diagram.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.entry(i, j) != 0
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.adjacent(i, j))
    }

    /// Positive integers `d_i` with `d_i C_ij = d_j C_ji`, minimal on each component.
    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_simply_laced(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || matches!(self.entry(i, j), 0 | -1)))
            && (0..self.n).all(|i| (0..self.n).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    /// The simple root `alpha_i = sum_j C_ji Lambda_j`: column `i` of the matrix.
    pub fn simple_root<E: Exponent>(&self, i: usize) -> Result<Weight<E>> {
        self.check_node(i)?;
        let coords = (0..self.n)
            .map(|j| scalar::cast(self.entry(j, i)))
            .collect::<Result<Vec<E>>>()?;
        Ok(Weight::new(coords))
    }

    /// Converts a vector in the simple-root basis to fundamental-weight coordinates.
    pub fn root_to_weight<E: Exponent>(&self, root: &[i64]) -> Result<Weight<E>> {
        if root.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: root.len() });
        }
        let mut coords = vec![E::zero(); self.n];
        for (i, &r) in root.iter().enumerate() {
            if r == 0 {
                continue;
            }
            let r: E = scalar::cast(r)?;
            for (j, c) in coords.iter_mut().enumerate() {
                let cji: E = scalar::cast(self.entry(j, i))?;
                *c = scalar::add(*c, scalar::mul(r, cji)?)?;
            }
        }
        Ok(Weight::new(coords))
    }

    /// Simple reflection `s_i` acting on a vector written in the simple-root basis.
    pub fn reflect_root(&self, i: usize, root: &[i64]) -> Vec<i64> {
        let pairing: i64 = (0..self.n).map(|j| self.entry(i, j) * root[j]).sum();
        let mut out = root.to_vec();
        out[i] -= pairing;
        out
    }

    /// Positive roots in the simple-root basis, for finite types.
    ///
    /// Roots are enumerated by height; the search aborts with
    /// [`Error::NotFiniteType`] once it exceeds the largest finite root system
    /// size for this rank.
    pub fn positive_roots(&self) -> Result<Vec<Vec<i64>>> {
        // E8 has 120 positive roots; rank-n classical types at most n^2.
        let limit = (self.n * self.n).max(120) + 1;
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for i in 0..self.n {
            let mut r = vec![0; self.n];
            r[i] = 1;
            seen.insert(r.clone());
            order.push(r.clone());
            queue.push_back(r);
        }
        while let Some(r) = queue.pop_front() {
            for i in 0..self.n {
                let s = self.reflect_root(i, &r);
                if s.iter().all(|&x| x >= 0) && s.iter().any(|&x| x > 0) && seen.insert(s.clone()) {
                    if seen.len() > limit {
                        return Err(Error::NotFiniteType);
                    }
                    order.push(s.clone());
                    queue.push_back(s);
                }
            }
        }
        Ok(order)
    }

    /// The roots `beta_t = s_{i_1} ... s_{i_{t-1}}(alpha_{i_t})` of a word,
    /// rejecting words that are not reduced.
    pub fn word_roots(&self, word: &[usize]) -> Result<Vec<Vec<i64>>> {
        let mut out: Vec<Vec<i64>> = Vec::with_capacity(word.len());
        let mut seen = HashSet::new();
        for (t, &it) in word.iter().enumerate() {
            self.check_node(it)?;
            let mut beta = vec![0; self.n];
            beta[it] = 1;
            for &s in word[..t].iter().rev() {
                beta = self.reflect_root(s, &beta);
            }
            if beta.iter().any(|&x| x < 0) || !seen.insert(beta.clone()) {
                return Err(Error::NonReducedWord { position: t });
            }
            out.push(beta);
        }
        Ok(out)
    }

    /// Checks that `word` is a reduced expression of the longest Weyl group element.
    pub fn check_longest_word(&self, word: &[usize]) -> Result<Vec<Vec<i64>>> {
        let expected = self.positive_roots()?.len();
        let roots = self.word_roots(word)?;
        if roots.len() != expected {
            return Err(Error::NotLongestElement { length: roots.len(), expected });
        }
        Ok(roots)
    }

    pub fn to_json(&self) -> CartanJson {
        CartanJson { n: self.n, entries: self.rows() }
    }
}

impl fmt::Display for CartanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>2}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Serialized form `{ "n": int, "entries": [[int]] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanJson {
    pub n: usize,
    pub entries: Vec<Vec<i64>>,
}

impl TryFrom<CartanJson> for CartanMatrix {
    type Error = Error;

    fn try_from(value: CartanJson) -> Result<Self> {
        if value.entries.len() != value.n {
            return Err(Error::DimensionMismatch { expected: value.n, found: value.entries.len() });
        }
        CartanMatrix::new(value.entries)
    }
}

/// Checks every Cartan-matrix invariant and returns the minimal symmetrizer.
///
/// The symmetrizer is found by fixing `d = 1` at the root of a BFS tree in
/// each connected component, propagating `d_j = d_i C_ij / C_ji` along tree
/// edges, and then verifying every remaining edge.
pub fn validate_cartan(rows: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyIndexSet);
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { row, len: r.len(), n });
        }
    }
    for i in 0..n {
        if rows[i][i] != 2 {
            return Err(Error::DiagonalNotTwo { i, value: rows[i][i] });
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if rows[i][j] > 0 {
                return Err(Error::PositiveOffDiagonal { i, j, value: rows[i][j] });
            }
            if (rows[i][j] == 0) != (rows[j][i] == 0) {
                return Err(Error::AsymmetricZeroPattern { i, j, cij: rows[i][j], cji: rows[j][i] });
            }
        }
    }

    // d as reduced fractions (num, den).
    let mut d: Vec<Option<(i64, i64)>> = vec![None; n];
    let mut out = vec![0i64; n];
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        let mut component = vec![root];
        d[root] = Some((1, 1));
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let (pi, qi) = d[i].unwrap();
            for j in 0..n {
                if i == j || rows[i][j] == 0 {
                    continue;
                }
                // d_j = d_i * C_ij / C_ji
                let num = pi * rows[i][j];
                let den = qi * rows[j][i];
                let g = num.gcd(&den);
                let (mut num, mut den) = (num / g, den / g);
                if den < 0 {
                    num = -num;
                    den = -den;
                }
                match d[j] {
                    None => {
                        d[j] = Some((num, den));
                        component.push(j);
                        queue.push_back(j);
                    }
                    Some(existing) => {
                        if existing != (num, den) {
                            return Err(Error::NotSymmetrizable { i, j });
                        }
                    }
                }
            }
        }
        let lcm = component.iter().fold(1i64, |acc, &i| acc.lcm(&d[i].unwrap().1));
        let scaled: Vec<i64> = component.iter().map(|&i| d[i].unwrap().0 * (lcm / d[i].unwrap().1)).collect();
        let g = scaled.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        for (&i, &x) in component.iter().zip(&scaled) {
            out[i] = x / g;
        }
    }
    Ok(out)
}

/// A weight written in the basis of fundamental weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent, bound = "")]
pub struct Weight<E: Exponent = i64> {
    coords: Vec<E>,
}

impl<E: Exponent> Weight<E> {
    pub fn new(coords: Vec<E>) -> Self {
        Self { coords }
    }

    pub fn zero(rank: usize) -> Self {
        Self { coords: vec![E::zero(); rank] }
    }

    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut w = Self::zero(rank);
        w.coords[i] = E::one();
        w
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[E] {
        &self.coords
    }

    /// `<h_i, lambda>`, which is coordinate `i` since `Lambda_j(h_i) = delta_ij`.
    pub fn pairing(&self, i: usize) -> Result<E> {
        self.coords
            .get(i)
            .copied()
            .ok_or(Error::NodeOutOfRange { index: i, n: self.coords.len() })
    }

    pub fn is_dominant(&self) -> bool {
        self.coords.iter().all(|c| !c.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(E, E) -> Result<E>) -> Result<Self> {
        if self.rank() != other.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: other.rank() });
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| op(a, b))
            .collect::<Result<Vec<E>>>()?;
        Ok(Self { coords })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, scalar::add)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, scalar::sub)
    }

    pub fn checked_scale(&self, k: E) -> Result<Self> {
        let coords = self.coords.iter().map(|&c| scalar::mul(c, k)).collect::<Result<Vec<E>>>()?;
        Ok(Self { coords })
    }

    /// Parses `L1+2*L2` (fundamental weights by label), `-L0`, or `0`.
    pub fn parse(text: &str, cartan: &CartanMatrix) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut w = Self::zero(cartan.rank());
        if compact == "0" {
            return Ok(w);
        }
        if compact.is_empty() {
            return Err(Error::parse("weight", text, "empty input"));
        }
        let signed = compact.replace('-', "+-");
        for term in signed.split('+').filter(|t| !t.is_empty()) {
            let err = |reason: &str| Error::parse("weight", text, format!("{reason} in term {term:?}"));
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1i64, rest),
                None => (1, term),
            };
            let (coeff, basis) = match body.split_once('*') {
                Some((c, b)) => (c.parse::<i64>().map_err(|_| err("bad coefficient"))?, b),
                None => (1, body),
            };
            let label: i64 = basis
                .strip_prefix('L')
                .ok_or_else(|| err("expected L<label>"))?
                .parse()
                .map_err(|_| err("bad label"))?;
            let i = cartan.node(label)?;
            let delta = scalar::cast::<E>(sign.checked_mul(coeff).ok_or(Error::Overflow)?)?;
            w.coords[i] = scalar::add(w.coords[i], delta)?;
        }
        Ok(w)
    }
}

impl<E: Exponent> fmt::Display for Weight<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `<h_i, lambda>` as a free function.
pub fn pairing<E: Exponent>(lambda: &Weight<E>, i: usize) -> Result<E> {
    lambda.pairing(i)
}

/// The positive root `alpha_start + ... + alpha_end` of type A_n (0-based, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootInterval {
    pub start: usize,
    pub end: usize,
}

impl RootInterval {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn simple(i: usize) -> Self {
        Self { start: i, end: i }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.start <= i && i <= self.end
    }

    /// Coordinates in the simple-root basis of A_n.
    pub fn to_root_vector(&self, n: usize) -> Vec<i64> {
        (0..n).map(|i| i64::from(self.contains(i))).collect()
    }

    pub fn from_root_vector(v: &[i64]) -> Option<Self> {
        let start = v.iter().position(|&x| x != 0)?;
        let end = v.iter().rposition(|&x| x != 0)?;
        if v[start..=end].iter().all(|&x| x == 1) {
            Some(Self { start, end })
        } else {
            None
        }
    }
}

impl fmt::Display for RootInterval {
    /// `a[j,k]` (or `a[j]` for a simple root) in 1-based numbering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "a[{}]", self.start + 1)
        } else {
            write!(f, "a[{},{}]", self.start + 1, self.end + 1)
        }
    }
}

/// All positive roots of A_n, in lexicographic order of `(start, end)`.
pub fn positive_roots_type_a(n: usize) -> Result<Vec<RootInterval>> {
    if n < 1 {
        return Err(Error::EmptyIndexSet);
    }
    Ok((0..n).flat_map(|j| (j..n).map(move |k| RootInterval::new(j, k))).collect())
}

/// A diagram folding `phi: I_hat -> I` together with scaling factors `gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldingSpec {
    source: CartanMatrix,
    target: CartanMatrix,
    phi: Vec<usize>,
    fibers: Vec<Vec<usize>>,
    gamma: Vec<i64>,
}

/// A reason a folding fails validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoldingViolation {
    EmptyFiber { node: usize },
    AdjacentInFiber { source_node: usize, a: usize, b: usize },
    NonPositiveScaling { node: usize, gamma: i64 },
    NotAligned { i: usize, j_prime: usize, lhs: i64, rhs: i64 },
}

impl From<&FoldingViolation> for Error {
    fn from(v: &FoldingViolation) -> Self {
        match *v {
            FoldingViolation::EmptyFiber { node } => Error::FoldingNotSurjective { node },
            FoldingViolation::AdjacentInFiber { source_node, a, b } => {
                Error::FiberNotOrthogonal { source_node, a, b }
            }
            FoldingViolation::NonPositiveScaling { node, gamma } => Error::NonPositiveScaling { node, gamma },
            FoldingViolation::NotAligned { i, j_prime, lhs, rhs } => Error::NotAligned { i, j_prime, lhs, rhs },
        }
    }
}

/// The integer linear equation `sum_i coeffs[i] * gamma_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaConstraint {
    pub coeffs: Vec<i64>,
}

impl GammaConstraint {
    /// Renders as `lhs = rhs` with positive coefficients on both sides,
    /// e.g. `2*g1 = g2`, using the given label offset.
    pub fn render(&self, label_offset: i64) -> String {
        let side = |positive: bool| -> String {
            let terms: Vec<String> = self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| if positive { c > 0 } else { c < 0 })
                .map(|(i, &c)| {
                    let label = i as i64 + label_offset;
                    if c.abs() == 1 {
                        format!("g{label}")
                    } else {
                        format!("{}*g{label}", c.abs())
                    }
                })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            }
        };
        format!("{} = {}", side(true), side(false))
    }

    pub fn is_satisfied_by(&self, gamma: &[i64]) -> bool {
        self.coeffs.iter().zip(gamma).map(|(c, g)| c * g).sum::<i64>() == 0
    }
}

impl FoldingSpec {
    /// Builds a folding from `phi` (target node -> source node) and `gamma`.
    ///
    /// Only shapes and ranges are checked here; use [`FoldingSpec::validate`]
    /// for surjectivity, fiber orthogonality and the aligned condition.
    pub fn new(source: CartanMatrix, target: CartanMatrix, phi: Vec<usize>, gamma: Vec<i64>) -> Result<Self> {
        if phi.len() != target.rank() {
            return Err(Error::DimensionMismatch { expected: target.rank(), found: phi.len() });
        }
        if gamma.len() != source.rank() {
            return Err(Error::DimensionMismatch { expected: source.rank(), found: gamma.len() });
        }
        let mut fibers = vec![Vec::new(); source.rank()];
        for (t, &s) in phi.iter().enumerate() {
            source.check_node(s)?;
            fibers[s].push(t);
        }
        Ok(Self { source, target, phi, fibers, gamma })
    }

    /// Same as [`FoldingSpec::new`] followed by a full validation.
    pub fn validated(source: CartanMatrix, target: CartanMatrix, phi: Vec<usize>, gamma: Vec<i64>) -> Result<Self> {
        let spec = Self::new(source, target, phi, gamma)?;
        spec.check()?;
        Ok(spec)
    }

    /// The identity folding of `cartan` with all scaling factors 1.
    pub fn identity(cartan: CartanMatrix) -> Self {
        let n = cartan.rank();
        Self::new(cartan.clone(), cartan, (0..n).collect(), vec![1; n]).expect("identity folding is well formed")
    }

    pub fn source(&self) -> &CartanMatrix {
        &self.source
    }

    pub fn target(&self) -> &CartanMatrix {
        &self.target
    }

    pub fn phi(&self, target_node: usize) -> usize {
        self.phi[target_node]
    }

    pub fn phi_map(&self) -> &[usize] {
        &self.phi
    }

    /// `phi^{-1}(i)`, ascending.
    pub fn fiber(&self, i: usize) -> &[usize] {
        &self.fibers[i]
    }

    pub fn gamma(&self, i: usize) -> i64 {
        self.gamma[i]
    }

    pub fn gammas(&self) -> &[i64] {
        &self.gamma
    }

    pub fn with_gamma(&self, gamma: Vec<i64>) -> Result<Self> {
        Self::new(self.source.clone(), self.target.clone(), self.phi.clone(), gamma)
    }

    /// Every structural violation: empty fibers, adjacent nodes in a fiber,
    /// non-positive scaling factors.
    pub fn structural_violations(&self) -> Vec<FoldingViolation> {
        let mut out = Vec::new();
        for (i, fiber) in self.fibers.iter().enumerate() {
            if fiber.is_empty() {
                out.push(FoldingViolation::EmptyFiber { node: i });
            }
            for (x, &a) in fiber.iter().enumerate() {
                for &b in &fiber[x + 1..] {
                    if self.target.entry(a, b) != 0 {
                        out.push(FoldingViolation::AdjacentInFiber { source_node: i, a, b });
                    }
                }
            }
        }
        for (i, &g) in self.gamma.iter().enumerate() {
            if g <= 0 {
                out.push(FoldingViolation::NonPositiveScaling { node: i, gamma: g });
            }
        }
        out
    }

    /// Violations of `gamma_j C_ji = gamma_i sum_{i' in phi^{-1}(i)} C_hat_{j'i'}`
    /// for every source node `i` and target node `j'` with `j = phi(j')`.
    pub fn aligned_violations(&self) -> Vec<FoldingViolation> {
        let mut out = Vec::new();
        for i in 0..self.source.rank() {
            for jp in 0..self.target.rank() {
                let j = self.phi[jp];
                let lhs = self.gamma[j] * self.source.entry(j, i);
                let rhs = self.gamma[i] * self.fibers[i].iter().map(|&ip| self.target.entry(jp, ip)).sum::<i64>();
                if lhs != rhs {
                    out.push(FoldingViolation::NotAligned { i, j_prime: jp, lhs, rhs });
                }
            }
        }
        out
    }

    /// All violations; empty iff the folding is valid and aligned.
    pub fn validate(&self) -> Vec<FoldingViolation> {
        let mut out = self.structural_violations();
        out.extend(self.aligned_violations());
        out
    }

    pub fn check(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(v.into()),
        }
    }

    pub fn is_aligned(&self) -> bool {
        self.aligned_violations().is_empty()
    }

    /// The extension of `Lambda_i -> gamma_i sum_{i' in phi^{-1}(i)} Lambda_hat_{i'}`.
    pub fn phi_tilde<E: Exponent>(&self, lambda: &Weight<E>) -> Result<Weight<E>> {
        if lambda.rank() != self.source.rank() {
            return Err(Error::DimensionMismatch { expected: self.source.rank(), found: lambda.rank() });
        }
        let coords = self
            .phi
            .iter()
            .map(|&i| scalar::mul(scalar::cast::<E>(self.gamma[i])?, lambda.coords()[i]))
            .collect::<Result<Vec<E>>>()?;
        Ok(Weight::new(coords))
    }

    /// Solves `phi_tilde(x) = w` in the source lattice.
    ///
    /// Each coordinate is read from the first node of its fiber and then
    /// cross-checked against the rest of the fiber.
    pub fn phi_tilde_inverse<E: Exponent>(&self, w: &Weight<E>) -> Result<Weight<E>> {
        if w.rank() != self.target.rank() {
            return Err(Error::DimensionMismatch { expected: self.target.rank(), found: w.rank() });
        }
        let mut coords = Vec::with_capacity(self.source.rank());
        for (i, fiber) in self.fibers.iter().enumerate() {
            let g: E = scalar::cast(self.gamma[i])?;
            let first = *fiber
                .first()
                .ok_or_else(|| Error::InvalidFolding(format!("empty fiber over {i}")))?;
            let value = w.coords()[first];
            if !(value % g).is_zero() {
                return Err(Error::NotInVirtualCrystal(format!(
                    "weight coordinate {value} at target node {first} is not divisible by gamma = {g}"
                )));
            }
            if let Some(&other) = fiber.iter().find(|&&t| w.coords()[t] != value) {
                return Err(Error::NotInVirtualCrystal(format!(
                    "weight coordinates disagree on the fiber over {i} (target nodes {first} and {other})"
                )));
            }
            coords.push(value / g);
        }
        Ok(Weight::new(coords))
    }

    /// Serialized form `{ "phi": {targetLabel: sourceLabel}, "gamma": {sourceLabel: int} }`.
    pub fn to_json(&self) -> FoldingJson {
        FoldingJson {
            phi: self
                .phi
                .iter()
                .enumerate()
                .map(|(t, &s)| (self.target.label(t).to_string(), self.source.label(s)))
                .collect(),
            gamma: self
                .gamma
                .iter()
                .enumerate()
                .map(|(s, &g)| (self.source.label(s).to_string(), g))
                .collect(),
        }
    }

    pub fn from_json(source: CartanMatrix, target: CartanMatrix, json: &FoldingJson) -> Result<Self> {
        let mut phi = vec![None; target.rank()];
        for (key, &s) in &json.phi {
            let label: i64 = key
                .trim()
                .parse()
                .map_err(|_| Error::parse("folding", key, "target label is not an integer"))?;
            let t = target.node(label)?;
            phi[t] = Some(source.node(s)?);
        }
        let phi = phi
            .into_iter()
            .enumerate()
            .map(|(t, p)| p.ok_or_else(|| Error::InvalidFolding(format!("phi is not defined on target node {}", target.label(t)))))
            .collect::<Result<Vec<usize>>>()?;
        let mut gamma = vec![1; source.rank()];
        for (key, &g) in &json.gamma {
            let label: i64 = key
                .trim()
                .parse()
                .map_err(|_| Error::parse("folding", key, "source label is not an integer"))?;
            gamma[source.node(label)?] = g;
        }
        Self::new(source, target, phi, gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldingJson {
    pub phi: BTreeMap<String, i64>,
    #[serde(default)]
    pub gamma: BTreeMap<String, i64>,
}

/// The aligned condition with `gamma` left symbolic: one integer equation per
/// `(i, j')`, normalized (gcd 1, first nonzero coefficient positive) and deduplicated.
pub fn aligned_constraints(source: &CartanMatrix, target: &CartanMatrix, phi: &[usize]) -> Result<Vec<GammaConstraint>> {
    let spec = FoldingSpec::new(source.clone(), target.clone(), phi.to_vec(), vec![1; source.rank()])?;
    let mut out: Vec<GammaConstraint> = Vec::new();
    for i in 0..source.rank() {
        for jp in 0..target.rank() {
            let j = phi[jp];
            let fiber_sum: i64 = spec.fiber(i).iter().map(|&ip| target.entry(jp, ip)).sum();
            let mut coeffs = vec![0i64; source.rank()];
            coeffs[j] += source.entry(j, i);
            coeffs[i] -= fiber_sum;
            let g = coeffs.iter().fold(0i64, |acc, &c| acc.gcd(&c));
            if g == 0 {
                continue;
            }
            let sign = if coeffs.iter().find(|&&c| c != 0).copied().unwrap_or(1) < 0 { -1 } else { 1 };
            let coeffs: Vec<i64> = coeffs.iter().map(|&c| sign * c / g).collect();
            let constraint = GammaConstraint { coeffs };
            if !out.contains(&constraint) {
                out.push(constraint);
            }
        }
    }
    Ok(out)
}

/// Smallest positive integer `gamma` satisfying two-variable (or trivially
/// homogeneous) constraints, or `None` when they are inconsistent.
pub fn minimal_gamma(constraints: &[GammaConstraint], rank: usize) -> Option<Vec<i64>> {
    let mut value: Vec<Option<(i64, i64)>> = vec![None; rank];
    let mut changed = true;
    let mut seeded = 0;
    while value.iter().any(|v| v.is_none()) || changed {
        changed = false;
        for c in constraints {
            let support: Vec<usize> = (0..rank).filter(|&i| c.coeffs[i] != 0).collect();
            match support.as_slice() {
                [single] => {
                    let _ = single;
                    return None;
                }
                [a, b] => {
                    let (a, b) = (*a, *b);
                    // ca * g_a + cb * g_b = 0
                    let (ca, cb) = (c.coeffs[a], c.coeffs[b]);
                    match (value[a], value[b]) {
                        (Some((p, q)), None) => {
                            let (num, den) = reduce(-ca * p, cb * q);
                            value[b] = Some((num, den));
                            changed = true;
                        }
                        (None, Some((p, q))) => {
                            let (num, den) = reduce(-cb * p, ca * q);
                            value[a] = Some((num, den));
                            changed = true;
                        }
                        (Some((pa, qa)), Some((pb, qb))) => {
                            if ca * pa * qb + cb * pb * qa != 0 {
                                return None;
                            }
                        }
                        (None, None) => {}
                    }
                }
                _ => {}
            }
        }
        if !changed {
            match value.iter().position(|v| v.is_none()) {
                Some(i) => {
                    value[i] = Some((1, 1));
                    seeded += 1;
                    changed = true;
                    if seeded > rank {
                        break;
                    }
                }
                None => break,
            }
        }
    }
    let value: Vec<(i64, i64)> = value.into_iter().collect::<Option<Vec<_>>>()?;
    if value.iter().any(|&(p, _)| p <= 0) {
        return None;
    }
    let lcm = value.iter().fold(1i64, |acc, &(_, q)| acc.lcm(&q));
    let ints: Vec<i64> = value.iter().map(|&(p, q)| p * (lcm / q)).collect();
    let g = ints.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let gamma: Vec<i64> = ints.iter().map(|&x| x / g).collect();
    constraints.iter().all(|c| c.is_satisfied_by(&gamma)).then_some(gamma)
}

fn reduce(num: i64, den: i64) -> (i64, i64) {
    let g = num.gcd(&den).max(1);
    let (num, den) = (num / g, den / g);
    if den < 0 {
        (-num, -den)
    } else {
        (num, den)
    }
}

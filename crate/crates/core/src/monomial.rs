//! Nakajima monomials and their crystal structures.
//!
//! A [`Monomial`] is a sparse Laurent monomial in the variables `Y(i,k)`.
//! A [`MonomialContext`] pairs a Cartan matrix with a [`CArray`] and provides
//! the Kashiwara operators, both the highest-weight ones (`f`, `e`) and the
//! modified ones used for `M(infinity)` (`f_modified`, `e_modified`).

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::cartan::{CartanMatrix, Weight};
use crate::crystal_graph::Crystal;
use crate::error::{Error, Result};
use crate::scalar::{self, Exponent};

/// A Laurent monomial `prod Y(i,k)^{y_i(k)}` with no zero exponents stored.
///
/// Node indices are internal (0-based); shifts `k` are arbitrary integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial<E: Exponent = i64> {
    exps: BTreeMap<(usize, i64), E>,
}

impl<E: Exponent> Monomial<E> {
    /// The identity monomial.
    pub fn one() -> Self {
        Self { exps: BTreeMap::new() }
    }

    /// The single variable `Y(i,k)`.
    pub fn y(i: usize, k: i64) -> Self {
        Self::y_pow(i, k, E::one())
    }

    pub fn y_pow(i: usize, k: i64, e: E) -> Self {
        let mut exps = BTreeMap::new();
        if !e.is_zero() {
            exps.insert((i, k), e);
        }
        Self { exps }
    }

    /// Builds a monomial from `(i, k, e)` triples, rejecting zero exponents and repeated keys.
    pub fn from_triples(triples: impl IntoIterator<Item = (usize, i64, E)>) -> Result<Self> {
        let mut exps = BTreeMap::new();
        for (i, k, e) in triples {
            if e.is_zero() {
                return Err(Error::ZeroExponent { i, k });
            }
            if exps.insert((i, k), e).is_some() {
                return Err(Error::DuplicateKey { i, k });
            }
        }
        Ok(Self { exps })
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// `y_i(k)`, zero when absent.
    pub fn exponent(&self, i: usize, k: i64) -> E {
        self.exps.get(&(i, k)).copied().unwrap_or_else(E::zero)
    }

    /// Stored factors in canonical `(i, k)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, E)> + '_ {
        self.exps.iter().map(|(&(i, k), &e)| (i, k, e))
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// The factors `(k, y_i(k))` of row `i`, sorted by `k`.
    pub fn row(&self, i: usize) -> Vec<(i64, E)> {
        self.exps.range((i, i64::MIN)..=(i, i64::MAX)).map(|(&(_, k), &e)| (k, e)).collect()
    }

    /// Largest node index appearing, if any.
    pub fn max_node(&self) -> Option<usize> {
        self.exps.keys().map(|&(i, _)| i).max()
    }

    pub fn min_shift(&self) -> Option<i64> {
        self.exps.keys().map(|&(_, k)| k).min()
    }

    fn add_exponent(&mut self, i: usize, k: i64, e: E) -> Result<()> {
        if e.is_zero() {
            return Ok(());
        }
        let entry = self.exps.entry((i, k)).or_insert_with(E::zero);
        *entry = scalar::add(*entry, e)?;
        if entry.is_zero() {
            self.exps.remove(&(i, k));
        }
        Ok(())
    }

    /// `self * other^p`.
    pub fn mul_pow(&self, other: &Self, p: E) -> Result<Self> {
        let mut out = self.clone();
        for (&(i, k), &e) in &other.exps {
            out.add_exponent(i, k, scalar::mul(e, p)?)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_pow(other, E::one())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul_pow(other, -E::one())
    }

    pub fn pow(&self, p: E) -> Result<Self> {
        Self::one().mul_pow(self, p)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.pow(-E::one())
    }

    /// The shift map `Y(i,k) -> Y(i,k+s)`.
    pub fn shift(&self, s: i64) -> Result<Self> {
        self.shift_rows(|_| s)
    }

    /// Relabels every key `(i,k)` to `(i, k + delta(i))`.
    pub fn shift_rows(&self, delta: impl Fn(usize) -> i64) -> Result<Self> {
        let mut exps = BTreeMap::new();
        for (&(i, k), &e) in &self.exps {
            let k2 = k.checked_add(delta(i)).ok_or(Error::Overflow)?;
            exps.insert((i, k2), e);
        }
        Ok(Self { exps })
    }

    /// Applies `f` to every node index; colliding keys are multiplied together.
    pub fn map_nodes(&self, f: impl Fn(usize) -> usize) -> Result<Self> {
        let mut out = Self::one();
        for (&(i, k), &e) in &self.exps {
            out.add_exponent(f(i), k, e)?;
        }
        Ok(out)
    }

    /// Fails with [`Error::NegativeShift`] if some key has `k < 0`.
    pub fn check_nonnegative_shifts(&self) -> Result<()> {
        match self.exps.keys().find(|&&(_, k)| k < 0) {
            Some(&(i, k)) => Err(Error::NegativeShift { i, k }),
            None => Ok(()),
        }
    }

    pub fn check_nodes(&self, rank: usize) -> Result<()> {
        match self.max_node() {
            Some(i) if i >= rank => Err(Error::NodeOutOfRange { index: i, n: rank }),
            _ => Ok(()),
        }
    }

    /// Converts the exponent type, failing on overflow.
    pub fn cast<F: Exponent>(&self) -> Result<Monomial<F>> {
        let exps = self
            .exps
            .iter()
            .map(|(&key, &e)| Ok((key, F::from(e).ok_or(Error::Overflow)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Monomial { exps })
    }

    /// Canonical text `Y(i,k)^e * ...` using external labels `i + offset`; `1` for the identity.
    pub fn to_text(&self, offset: i64) -> String {
        if self.exps.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(&(i, k), &e)| {
                let label = i as i64 + offset;
                if e.is_one() {
                    format!("Y({label},{k})")
                } else {
                    format!("Y({label},{k})^{e}")
                }
            })
            .collect();
        parts.join(" * ")
    }

    /// Displays with external labels.
    pub fn display(&self, offset: i64) -> impl fmt::Display + '_ {
        Labelled { m: self, offset }
    }

    /// Parses the canonical text format, reading node labels through `cartan`.
    ///
    /// Accepts `1`, and products of `Y(i,k)`, `Y(i,k)^e` or `Y(i,k)^(e)` joined by `*`.
    /// Whitespace is ignored; zero exponents and repeated keys are rejected.
    pub fn parse(text: &str, cartan: &CartanMatrix) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::parse("monomial", text, "empty input"));
        }
        if compact == "1" {
            return Ok(Self::one());
        }
        let mut triples = Vec::new();
        for factor in compact.split('*') {
            triples.push(parse_factor(factor, text, cartan)?);
        }
        Self::from_triples(triples)
    }

    pub fn to_json(&self, offset: i64) -> MonomialJson<E> {
        MonomialJson {
            exps: self.exps.iter().map(|(&(i, k), &e)| (i as i64 + offset, k, e)).collect(),
        }
    }

    pub fn from_json(json: &MonomialJson<E>, cartan: &CartanMatrix) -> Result<Self> {
        let triples = json
            .exps
            .iter()
            .map(|&(label, k, e)| Ok((cartan.node(label)?, k, e)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_triples(triples)
    }
}

struct Labelled<'a, E: Exponent> {
    m: &'a Monomial<E>,
    offset: i64,
}

impl<E: Exponent> fmt::Display for Labelled<'_, E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.m.to_text(self.offset))
    }
}

fn parse_factor<E: Exponent>(factor: &str, whole: &str, cartan: &CartanMatrix) -> Result<(usize, i64, E)> {
    let err = |reason: &str| Error::parse("monomial", whole, format!("{reason} in factor {factor:?}"));
    let rest = factor.strip_prefix('Y').ok_or_else(|| err("expected 'Y'"))?;
    let rest = rest.strip_prefix('(').ok_or_else(|| err("expected '('"))?;
    let close = rest.find(')').ok_or_else(|| err("missing ')'"))?;
    let (args, tail) = (&rest[..close], &rest[close + 1..]);
    let (i, k) = args.split_once(',').ok_or_else(|| err("expected 'i,k'"))?;
    let label: i64 = i.parse().map_err(|_| err("bad node label"))?;
    let k: i64 = k.parse().map_err(|_| err("bad shift"))?;
    let e: E = if tail.is_empty() {
        E::one()
    } else {
        let exp = tail.strip_prefix('^').ok_or_else(|| err("unexpected trailing text"))?;
        let exp = exp
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .unwrap_or(exp);
        exp.parse().map_err(|_| err("bad exponent"))?
    };
    let node = cartan.node(label)?;
    Ok((node, k, e))
}

/// JSON form `{"exps": [[i, k, e], ...]}` with external node labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialJson<E: Exponent = i64> {
    #[serde(bound = "")]
    pub exps: Vec<(i64, i64, E)>,
}

/// How the `A` monomials are built from the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CArrayStyle {
    /// `A(i,k) = Y(i,k) Y(i,k+1) prod_{j != i} Y(j, k + c_ji)^{C_ji}`.
    Kashiwara,
    /// `A'(i,k) = Y(i,k) Y(i,k+2) prod_{j != i} Y(j, k + 1)^{C_ji}`.
    Nakajima,
}

/// The array `c = (c_ij)` with `c_ij + c_ji = 1` (diagonal unused, stored as 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CArray {
    n: usize,
    entries: Vec<i64>,
    style: CArrayStyle,
    parity: Option<Vec<i64>>,
}

impl CArray {
    /// A Kashiwara-style array from full rows; the diagonal is ignored.
    pub fn kashiwara(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), n });
            }
        }
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    entries[i * n + j] = rows[i][j];
                }
            }
        }
        let c = Self { n, entries, style: CArrayStyle::Kashiwara, parity: None };
        c.check_sum()?;
        Ok(c)
    }

    /// `c_ij = 1` if `i < j` and `0` otherwise.
    pub fn upper_triangular(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                entries[i * n + j] = 1;
            }
        }
        Self { n, entries, style: CArrayStyle::Kashiwara, parity: None }
    }

    /// The Nakajima-style array (all `c_ij = 1`), with node parities from a
    /// two-colouring of the Dynkin diagram.
    pub fn nakajima(cartan: &CartanMatrix) -> Result<Self> {
        let n = cartan.rank();
        let parity = bipartition(cartan)?;
        let mut entries = vec![1; n * n];
        for i in 0..n {
            entries[i * n + i] = 0;
        }
        Ok(Self { n, entries, style: CArrayStyle::Nakajima, parity: Some(parity) })
    }

    /// The Kashiwara-style array equivalent to the Nakajima convention under
    /// `Y(i, 2m + p(i)) <-> Y(i, m)`: `c_ji = p(i)` on edges.
    pub fn from_parity(cartan: &CartanMatrix) -> Result<Self> {
        let n = cartan.rank();
        let parity = bipartition(cartan)?;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                entries[j * n + i] = if cartan.adjacent(i, j) { parity[i] } else { i64::from(j < i) };
            }
        }
        Ok(Self { n, entries, style: CArrayStyle::Kashiwara, parity: None })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn style(&self) -> CArrayStyle {
        self.style
    }

    /// Node parities of a Nakajima-style array.
    pub fn parity(&self) -> Option<&[i64]> {
        self.parity.as_deref()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    fn check_sum(&self) -> Result<()> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (cij, cji) = (self.entry(i, j), self.entry(j, i));
                if cij + cji != 1 {
                    return Err(Error::CArraySum { i, j, cij, cji });
                }
            }
        }
        Ok(())
    }

    /// Checks `c_ij` in `{0, 1}` for every off-diagonal entry.
    pub fn check_binary(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let value = self.entry(i, j);
                if i != j && !(0..=1).contains(&value) {
                    return Err(Error::CArrayNotBinary { i, j, value });
                }
            }
        }
        Ok(())
    }

    /// Checks `{0, 1}` entries on adjacent pairs only.
    pub fn check_binary_on_edges(&self, cartan: &CartanMatrix) -> Result<()> {
        for i in 0..self.n {
            for j in cartan.neighbors(i) {
                let value = self.entry(i, j);
                if !(0..=1).contains(&value) {
                    return Err(Error::CArrayNotBinary { i, j, value });
                }
            }
        }
        Ok(())
    }

    /// Entries replaced by `c_ij + m_i - m_j`; only for the Kashiwara style.
    pub fn mutated(&self, m: &[i64]) -> Result<Self> {
        if self.style != CArrayStyle::Kashiwara {
            return Err(Error::StyleMismatch { expected: "Kashiwara" });
        }
        if m.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: m.len() });
        }
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.entries[i * self.n + j] = self.entry(i, j) + m[i] - m[j];
                }
            }
        }
        out.check_sum()?;
        Ok(out)
    }
}

/// Two-colours the Dynkin diagram; fails on an odd cycle.
fn bipartition(cartan: &CartanMatrix) -> Result<Vec<i64>> {
    let n = cartan.rank();
    let mut colour: Vec<Option<i64>> = vec![None; n];
    for root in 0..n {
        if colour[root].is_some() {
            continue;
        }
        colour[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let ci = colour[i].unwrap();
            for j in cartan.neighbors(i) {
                match colour[j] {
                    None => {
                        colour[j] = Some(1 - ci);
                        queue.push_back(j);
                    }
                    Some(cj) if cj == ci => return Err(Error::OddCycle { node: j }),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(colour.into_iter().map(Option::unwrap).collect())
}

/// Result of scanning one row of prefix sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Scan<E> {
    phi: E,
    k_f: Option<i64>,
    k_e: Option<i64>,
}

/// Prefix sums over all of `Z`, the empty prefix counting as 0.
fn scan_unmodified<E: Exponent>(row: &[(i64, E)]) -> Result<Scan<E>> {
    let mut sums = Vec::with_capacity(row.len());
    let mut s = E::zero();
    for &(_, y) in row {
        s = scalar::add(s, y)?;
        sums.push(s);
    }
    let phi = sums.iter().copied().fold(E::zero(), E::max);
    let k_f = if phi > E::zero() {
        sums.iter().position(|&x| x == phi).map(|t| row[t].0)
    } else {
        None
    };
    // Last position attaining phi; position 0 stands for the empty prefix.
    let last = (0..=row.len())
        .rev()
        .find(|&t| if t == 0 { phi.is_zero() } else { sums[t - 1] == phi })
        .expect("phi is attained");
    let k_e = row.get(last).map(|&(k, _)| k - 1);
    Ok(Scan { phi, k_f, k_e })
}

/// Prefix sums over `0..=k` for `k >= 0`; keys must be nonnegative.
fn scan_modified<E: Exponent>(row: &[(i64, E)]) -> Result<Scan<E>> {
    // positions: k = 0, then every support point k > 0
    let mut points: Vec<(i64, E)> = Vec::with_capacity(row.len() + 1);
    let mut s = E::zero();
    let mut iter = row.iter().peekable();
    if let Some(&&(0, y)) = iter.peek() {
        s = y;
        iter.next();
    }
    points.push((0, s));
    for &(k, y) in iter {
        s = scalar::add(s, y)?;
        points.push((k, s));
    }
    let phi = points.iter().map(|&(_, x)| x).fold(points[0].1, E::max);
    let first = points.iter().position(|&(_, x)| x == phi).expect("phi is attained");
    let last = points.iter().rposition(|&(_, x)| x == phi).expect("phi is attained");
    let k_e = points.get(last + 1).map(|&(k, _)| k - 1);
    Ok(Scan { phi, k_f: Some(points[first].0), k_e })
}

/// A Cartan matrix together with a c-array: the data fixing the crystal structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialContext {
    cartan: CartanMatrix,
    c: CArray,
}

impl MonomialContext {
    pub fn new(cartan: CartanMatrix, c: CArray) -> Result<Self> {
        if c.rank() != cartan.rank() {
            return Err(Error::DimensionMismatch { expected: cartan.rank(), found: c.rank() });
        }
        if c.style() == CArrayStyle::Nakajima {
            bipartition(&cartan)?;
        }
        Ok(Self { cartan, c })
    }

    /// Uses `c_ij = 1` for `i < j`, `0` otherwise.
    pub fn with_default_c(cartan: CartanMatrix) -> Self {
        let c = CArray::upper_triangular(cartan.rank());
        Self { cartan, c }
    }

    pub fn nakajima(cartan: CartanMatrix) -> Result<Self> {
        let c = CArray::nakajima(&cartan)?;
        Ok(Self { cartan, c })
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    pub fn c(&self) -> &CArray {
        &self.c
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn label_offset(&self) -> i64 {
        self.cartan.label_offset()
    }

    pub fn parse<E: Exponent>(&self, text: &str) -> Result<Monomial<E>> {
        let m = Monomial::parse(text, &self.cartan)?;
        Ok(m)
    }

    pub fn render<E: Exponent>(&self, m: &Monomial<E>) -> String {
        m.to_text(self.cartan.label_offset())
    }

    /// `wt(M) = sum_i (sum_k y_i(k)) Lambda_i`.
    pub fn weight<E: Exponent>(&self, m: &Monomial<E>) -> Result<Weight<E>> {
        m.check_nodes(self.rank())?;
        let mut coords = vec![E::zero(); self.rank()];
        for (i, _, e) in m.iter() {
            coords[i] = scalar::add(coords[i], e)?;
        }
        Ok(Weight::new(coords))
    }

    fn row_total<E: Exponent>(row: &[(i64, E)]) -> Result<E> {
        row.iter().try_fold(E::zero(), |acc, &(_, y)| scalar::add(acc, y))
    }

    /// `phi_i(M)`: the maximum prefix sum of row `i`.
    pub fn phi<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<E> {
        self.cartan.check_node(i)?;
        Ok(scan_unmodified(&m.row(i))?.phi)
    }

    /// `eps_i(M) = phi_i(M) - <h_i, wt(M)>`.
    pub fn eps<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<E> {
        self.cartan.check_node(i)?;
        let row = m.row(i);
        let eps = scalar::sub(scan_unmodified(&row)?.phi, Self::row_total(&row)?)?;
        debug_assert_eq!(Ok(eps), suffix_eps(&row));
        Ok(eps)
    }

    /// `eps_i(M) = max_k (-sum_{j > k} y_i(j))`, computed independently by a suffix scan.
    pub fn eps_by_suffix<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<E> {
        self.cartan.check_node(i)?;
        suffix_eps(&m.row(i))
    }

    /// The monomial `A(i,k)` (or `A'(i,k)` for a Nakajima-style array).
    pub fn a_monomial<E: Exponent>(&self, i: usize, k: i64) -> Result<Monomial<E>> {
        self.cartan.check_node(i)?;
        let (step, neighbour) = match self.c.style() {
            CArrayStyle::Kashiwara => (1, None),
            CArrayStyle::Nakajima => (2, Some(1)),
        };
        let mut m = Monomial::y(i, k).mul(&Monomial::y(i, k + step))?;
        for j in self.cartan.neighbors(i) {
            let shift = neighbour.unwrap_or_else(|| self.c.entry(j, i));
            let e = scalar::cast(self.cartan.entry(j, i))?;
            m = m.mul(&Monomial::y_pow(j, k + shift, e))?;
        }
        Ok(m)
    }

    /// `f_i M = M A(i, k_f)^{-1}`, or `None` when `phi_i(M) = 0`.
    pub fn f<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<Option<Monomial<E>>> {
        self.cartan.check_node(i)?;
        match scan_unmodified(&m.row(i))?.k_f {
            Some(k) => Ok(Some(m.div(&self.a_monomial(i, k)?)?)),
            None => Ok(None),
        }
    }

    /// `e_i M = M A(i, k_e)`, or `None` when `eps_i(M) = 0`.
    ///
    /// For a Nakajima-style array the factor is `A'(i, k_e - 1)`, which is what
    /// makes `e_i` inverse to `f_i` when rows live on a single parity class.
    pub fn e<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<Option<Monomial<E>>> {
        self.cartan.check_node(i)?;
        let scan = scan_unmodified(&m.row(i))?;
        let k = match scan.k_e {
            Some(k) => k,
            None => return Ok(None),
        };
        let k = match self.c.style() {
            CArrayStyle::Kashiwara => k,
            CArrayStyle::Nakajima => k - 1,
        };
        Ok(Some(m.mul(&self.a_monomial(i, k)?)?))
    }

    fn modified_scan<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<(Vec<(i64, E)>, Scan<E>)> {
        self.cartan.check_node(i)?;
        m.check_nonnegative_shifts()?;
        let row = m.row(i);
        let scan = scan_modified(&row)?;
        Ok((row, scan))
    }

    /// `phi_i` on `M(infinity)`: maximum over `k >= 0` of `sum_{0 <= j <= k} y_i(j)`.
    /// May be negative.
    pub fn phi_modified<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<E> {
        Ok(self.modified_scan(m, i)?.1.phi)
    }

    pub fn eps_modified<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<E> {
        let (row, scan) = self.modified_scan(m, i)?;
        scalar::sub(scan.phi, Self::row_total(&row)?)
    }

    /// The modified operator: always defined, multiplies by `A(i, k)^{-1}` at
    /// the least `k >= 0` attaining the modified `phi_i`.
    pub fn f_modified<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<Monomial<E>> {
        let (_, scan) = self.modified_scan(m, i)?;
        let k = scan.k_f.expect("modified scan always has a minimiser");
        m.div(&self.a_monomial(i, k)?)
    }

    /// The modified raising operator: multiplies by `A(i, k)` at the largest
    /// `k >= 0` attaining the modified `phi_i`; `None` when the modified `eps_i` is 0.
    pub fn e_modified<E: Exponent>(&self, m: &Monomial<E>, i: usize) -> Result<Option<Monomial<E>>> {
        let (_, scan) = self.modified_scan(m, i)?;
        match scan.k_e {
            Some(k) => Ok(Some(m.mul(&self.a_monomial(i, k)?)?)),
            None => Ok(None),
        }
    }

    /// `Y_lambda = prod_i Y(i, 0)^{<h_i, lambda>}`; in the Nakajima style the
    /// shift is the node parity instead of 0.
    pub fn y_lambda<E: Exponent>(&self, lambda: &Weight<E>) -> Result<Monomial<E>> {
        if lambda.rank() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: lambda.rank() });
        }
        if let Some((i, v)) = lambda.coords().iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::NotDominant { i, value: v.to_string() });
        }
        let parity = self.c.parity();
        let triples = lambda
            .coords()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, &v)| (i, parity.map_or(0, |p| p[i]), v));
        Monomial::from_triples(triples)
    }

    /// `Y_lambda * M` for `M` in `M(infinity)`.
    pub fn hw_correspondence<E: Exponent>(&self, m: &Monomial<E>, lambda: &Weight<E>) -> Result<Monomial<E>> {
        self.y_lambda(lambda)?.mul(m)
    }
}

fn suffix_eps<E: Exponent>(row: &[(i64, E)]) -> Result<E> {
    let mut best = E::zero();
    let mut suffix = E::zero();
    for &(_, y) in row.iter().rev() {
        suffix = scalar::add(suffix, y)?;
        best = best.max(scalar::neg(suffix)?);
    }
    Ok(best)
}

/// A [`MonomialContext`] viewed as a crystal, with either the ordinary
/// operators (highest-weight crystals `M(M)`) or the modified ones (`M(infinity)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialCrystal<E: Exponent = i64> {
    ctx: MonomialContext,
    modified: bool,
    _exponent: PhantomData<E>,
}

impl<E: Exponent> MonomialCrystal<E> {
    pub fn highest_weight(ctx: MonomialContext) -> Self {
        Self { ctx, modified: false, _exponent: PhantomData }
    }

    pub fn infinity(ctx: MonomialContext) -> Self {
        Self { ctx, modified: true, _exponent: PhantomData }
    }

    pub fn context(&self) -> &MonomialContext {
        &self.ctx
    }

    pub fn is_modified(&self) -> bool {
        self.modified
    }
}

impl<E: Exponent> Crystal for MonomialCrystal<E> {
    type Element = Monomial<E>;
    type Scalar = E;

    fn cartan(&self) -> &CartanMatrix {
        self.ctx.cartan()
    }

    fn f(&self, x: &Monomial<E>, i: usize) -> Result<Option<Monomial<E>>> {
        if self.modified {
            self.ctx.f_modified(x, i).map(Some)
        } else {
            self.ctx.f(x, i)
        }
    }

    fn e(&self, x: &Monomial<E>, i: usize) -> Result<Option<Monomial<E>>> {
        if self.modified {
            self.ctx.e_modified(x, i)
        } else {
            self.ctx.e(x, i)
        }
    }

    fn weight(&self, x: &Monomial<E>) -> Result<Weight<E>> {
        self.ctx.weight(x)
    }

    fn epsilon(&self, x: &Monomial<E>, i: usize) -> Result<E> {
        if self.modified {
            self.ctx.eps_modified(x, i)
        } else {
            self.ctx.eps(x, i)
        }
    }

    fn phi(&self, x: &Monomial<E>, i: usize) -> Result<E> {
        if self.modified {
            self.ctx.phi_modified(x, i)
        } else {
            self.ctx.phi(x, i)
        }
    }

    fn render(&self, x: &Monomial<E>) -> String {
        self.ctx.render(x)
    }
}

/// The shift map `tau_s`.
pub fn shift<E: Exponent>(m: &Monomial<E>, s: i64) -> Result<Monomial<E>> {
    m.shift(s)
}

//! Kostant partitions of type A_n and their crystal structure.
//!
//! Roots are [`RootInterval`]s (0-based internally, printed 1-based as
//! `a[j,k]`). The crystal operators use the bracketing rule attached to the
//! dual BZL word `(n, n-1, n, ..., 1, 2, ..., n)`. The isomorphism with
//! `M(infinity)` uses the array `c_ij = 1` for `i < j` and `0` otherwise.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cartan::{CartanMatrix, FoldingSpec, RootInterval, Weight};
use crate::crystal_graph::Crystal;
use crate::error::{Error, Result};
use crate::monomial::{CArray, Monomial, MonomialContext};
use crate::registry::cartan_type;

/// A nonnegative combination `sum c_alpha (alpha)` of positive roots of A_n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KostantPartition {
    n: usize,
    mult: BTreeMap<RootInterval, u64>,
}

impl KostantPartition {
    pub fn zero(n: usize) -> Self {
        Self { n, mult: BTreeMap::new() }
    }

    /// Builds from `(root, multiplicity)` pairs; zero multiplicities are dropped,
    /// repeated roots are summed.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (RootInterval, u64)>) -> Result<Self> {
        let mut out = Self::zero(n);
        for (root, c) in pairs {
            out.check_root(root)?;
            out.add(root, c);
        }
        Ok(out)
    }

    fn check_root(&self, root: RootInterval) -> Result<()> {
        if root.start > root.end || root.end >= self.n {
            return Err(Error::RootOutOfRange { start: root.start + 1, end: root.end + 1, n: self.n });
        }
        Ok(())
    }

    fn add(&mut self, root: RootInterval, c: u64) {
        if c > 0 {
            *self.mult.entry(root).or_insert(0) += c;
        }
    }

    fn remove_one(&mut self, root: RootInterval) {
        let entry = self.mult.get_mut(&root).expect("root present");
        *entry -= 1;
        if *entry == 0 {
            self.mult.remove(&root);
        }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// `c_alpha` for `alpha = alpha_{start..=end}`.
    pub fn multiplicity(&self, root: RootInterval) -> u64 {
        self.mult.get(&root).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (RootInterval, u64)> + '_ {
        self.mult.iter().map(|(&r, &c)| (r, c))
    }

    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    /// Total number of roots counted with multiplicity.
    pub fn size(&self) -> u64 {
        self.mult.values().sum()
    }

    /// Text such as `2*(a[3]) + 3*(a[2,3])`, roots listed by descending start
    /// and then descending end; `0` for the empty partition.
    pub fn to_text(&self) -> String {
        if self.mult.is_empty() {
            return "0".to_string();
        }
        let mut roots: Vec<(RootInterval, u64)> = self.iter().collect();
        roots.sort_by(|a, b| (b.0.start, b.0.end).cmp(&(a.0.start, a.0.end)));
        roots
            .iter()
            .map(|(r, c)| if *c == 1 { format!("({r})") } else { format!("{c}*({r})") })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses the text format; `n` is the rank.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(Self::zero(n));
        }
        if compact.is_empty() {
            return Err(Error::parse("Kostant partition", text, "empty input"));
        }
        let mut out = Self::zero(n);
        for term in compact.split('+') {
            let err = |reason: &str| Error::parse("Kostant partition", text, format!("{reason} in term {term:?}"));
            let (coeff, root) = match term.split_once('*') {
                Some((c, r)) => (c.parse::<u64>().map_err(|_| err("bad multiplicity"))?, r),
                None => (1, term),
            };
            let root = root.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(root);
            let inner = root
                .strip_prefix("a[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| err("expected a[j] or a[j,k]"))?;
            let (j, k) = match inner.split_once(',') {
                Some((j, k)) => (j, k),
                None => (inner, inner),
            };
            let j: usize = j.parse().map_err(|_| err("bad root index"))?;
            let k: usize = k.parse().map_err(|_| err("bad root index"))?;
            if j == 0 || k < j || k > n {
                return Err(Error::RootOutOfRange { start: j, end: k, n });
            }
            out.add(RootInterval::new(j - 1, k - 1), coeff);
        }
        Ok(out)
    }

    /// JSON form `{"n": int, "mult": [[j, k, c], ...]}` with 1-based roots.
    pub fn to_json(&self) -> KostantJson {
        KostantJson {
            n: self.n,
            mult: self.iter().map(|(r, c)| (r.start + 1, r.end + 1, c)).collect(),
        }
    }

    pub fn from_json(json: &KostantJson) -> Result<Self> {
        let mut out = Self::zero(json.n);
        for &(j, k, c) in &json.mult {
            if j == 0 || k < j || k > json.n {
                return Err(Error::RootOutOfRange { start: j, end: k, n: json.n });
            }
            if c == 0 {
                return Err(Error::parse("Kostant partition", &format!("[{j},{k},{c}]"), "zero multiplicity"));
            }
            let root = RootInterval::new(j - 1, k - 1);
            if out.mult.contains_key(&root) {
                return Err(Error::parse("Kostant partition", &format!("[{j},{k},{c}]"), "repeated root"));
            }
            out.add(root, c);
        }
        Ok(out)
    }
}

impl fmt::Display for KostantPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KostantJson {
    pub n: usize,
    pub mult: Vec<(usize, usize, u64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BracketKind {
    Open,
    Close,
}

/// A bracket together with the root it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bracket {
    pub kind: BracketKind,
    pub root: RootInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BracketSeq {
    pub tokens: Vec<Bracket>,
}

impl BracketSeq {
    /// Space-separated brackets, `)` for close and `(` for open.
    pub fn render(&self) -> String {
        self.tokens
            .iter()
            .map(|b| match b.kind {
                BracketKind::Open => "(",
                BracketKind::Close => ")",
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The brackets `S_i` for node `i` (0-based): for `k = n-1` down to `i+1`,
/// `c(alpha_{i,k})` closing then `c(alpha_{i+1,k})` opening brackets, and
/// finally `c(alpha_i)` closing brackets.
pub fn bracket_seq(a: &KostantPartition, i: usize) -> Result<BracketSeq> {
    if i >= a.n {
        return Err(Error::NodeOutOfRange { index: i, n: a.n });
    }
    let mut tokens = Vec::new();
    let mut push = |kind, root: RootInterval| {
        for _ in 0..a.multiplicity(root) {
            tokens.push(Bracket { kind, root });
        }
    };
    for k in (i + 1..a.n).rev() {
        push(BracketKind::Close, RootInterval::new(i, k));
        push(BracketKind::Open, RootInterval::new(i + 1, k));
    }
    push(BracketKind::Close, RootInterval::new(i, i));
    Ok(BracketSeq { tokens })
}

/// Uncanceled brackets after removing matched `()` pairs: closes then opens,
/// each in sequence order.
pub fn cancel(seq: &BracketSeq) -> (Vec<Bracket>, Vec<Bracket>) {
    let mut closes = Vec::new();
    let mut opens: Vec<Bracket> = Vec::new();
    for &b in &seq.tokens {
        match b.kind {
            BracketKind::Open => opens.push(b),
            BracketKind::Close => {
                if opens.pop().is_none() {
                    closes.push(b);
                }
            }
        }
    }
    (closes, opens)
}

/// `f_i`: moves the leftmost uncanceled `(` from `alpha_{i+1,k}` to `alpha_{i,k}`,
/// or adds `(alpha_i)` if there is none.
pub fn kp_f(a: &KostantPartition, i: usize) -> Result<KostantPartition> {
    let (_, opens) = cancel(&bracket_seq(a, i)?);
    let mut out = a.clone();
    match opens.first() {
        Some(b) => {
            out.remove_one(b.root);
            out.add(RootInterval::new(i, b.root.end), 1);
        }
        None => out.add(RootInterval::simple(i), 1),
    }
    Ok(out)
}

/// `e_i`: moves the rightmost uncanceled `)` from `alpha_{i,k}` to `alpha_{i+1,k}`
/// (dropping it when `k = i`); `None` if every `)` is canceled.
pub fn kp_e(a: &KostantPartition, i: usize) -> Result<Option<KostantPartition>> {
    let (closes, _) = cancel(&bracket_seq(a, i)?);
    let b = match closes.last() {
        Some(b) => *b,
        None => return Ok(None),
    };
    let mut out = a.clone();
    out.remove_one(b.root);
    if b.root.end > i {
        out.add(RootInterval::new(i + 1, b.root.end), 1);
    }
    Ok(Some(out))
}

/// `(wt, eps_i, phi_i)` with `wt = -sum c_alpha alpha`.
pub fn kp_stats(a: &KostantPartition, i: usize) -> Result<(Weight<i64>, i64, i64)> {
    let (closes, _) = cancel(&bracket_seq(a, i)?);
    let wt = kp_weight(a)?;
    let eps = closes.len() as i64;
    let phi = eps + wt.pairing(i)?;
    Ok((wt, eps, phi))
}

pub fn kp_weight(a: &KostantPartition) -> Result<Weight<i64>> {
    let cartan = type_a(a.n)?;
    let mut root = vec![0i64; a.n];
    for (r, c) in a.iter() {
        let c = i64::try_from(c).map_err(|_| Error::Overflow)?;
        for x in &mut root[r.start..=r.end] {
            *x = x.checked_sub(c).ok_or(Error::Overflow)?;
        }
    }
    cartan.root_to_weight(&root)
}

fn type_a(n: usize) -> Result<CartanMatrix> {
    cartan_type(&format!("A{n}"))
}

/// The context used by the isomorphism with `M(infinity)`.
pub fn kostant_context(n: usize) -> Result<MonomialContext> {
    MonomialContext::new(type_a(n)?, CArray::upper_triangular(n))
}

fn check_context(ctx: &MonomialContext) -> Result<usize> {
    let n = ctx.rank();
    if ctx.cartan() != &type_a(n)? {
        return Err(Error::NotInInfinityCrystal("the Cartan matrix is not of type A".into()));
    }
    if ctx.c() != &CArray::upper_triangular(n) {
        return Err(Error::NotInInfinityCrystal(
            "the array must be c_ij = 1 for i < j and 0 otherwise; mutate the monomial first".into(),
        ));
    }
    Ok(n)
}

/// Recovers the exponents `a_{i,q}` with `M = prod A(i,q)^{-a_{i,q}}`.
///
/// Keys are processed in order of `(q, i)`: the coefficient of `Y(i,q)` in
/// that product is `-a_{i,q}` plus terms from keys earlier in that order.
fn a_exponents(m: &Monomial, n: usize) -> Result<BTreeMap<(usize, i64), i64>> {
    m.check_nonnegative_shifts()?;
    m.check_nodes(n)?;
    let q_max = m.iter().map(|(_, k, _)| k).max().unwrap_or(0);
    let mut a: BTreeMap<(usize, i64), i64> = BTreeMap::new();
    let get = |a: &BTreeMap<(usize, i64), i64>, i: Option<usize>, q: i64| -> i64 {
        match i {
            Some(i) if i < n && q >= 0 => a.get(&(i, q)).copied().unwrap_or(0),
            _ => 0,
        }
    };
    for q in 0..=q_max {
        for i in 0..n {
            // y_i(q) = -a_{i,q} - a_{i,q-1} + a_{i+1,q-1} + a_{i-1,q}
            let value = -m.exponent(i, q) - get(&a, Some(i), q - 1) + get(&a, Some(i + 1), q - 1)
                + get(&a, i.checked_sub(1), q);
            if value != 0 {
                a.insert((i, q), value);
            }
        }
    }
    Ok(a)
}

/// The inverse of the isomorphism `M(infinity) -> Kp(infinity)`.
pub fn monomial_to_kostant(m: &Monomial, ctx: &MonomialContext) -> Result<KostantPartition> {
    let n = check_context(ctx)?;
    let a = a_exponents(m, n)?;
    let not_in = |msg: String| Error::NotInInfinityCrystal(msg);
    // reconstruct and compare
    let mut recon = Monomial::one();
    for (&(i, q), &e) in &a {
        recon = recon.mul_pow(&ctx.a_monomial(i, q)?, -e)?;
    }
    if &recon != m {
        return Err(not_in("not a product of the A monomials".into()));
    }
    for (&(i, q), &e) in &a {
        if e < 0 {
            return Err(not_in(format!("negative exponent of A({},{q})", i + 1)));
        }
        if i as i64 + q > n as i64 - 1 {
            return Err(not_in(format!("A({},{q}) lies outside the allowed range", i + 1)));
        }
    }
    let get = |i: usize, q: i64| a.get(&(i, q)).copied().unwrap_or(0);
    // chains 0 <= a_{1,s-1} <= a_{2,s-2} <= ... <= a_{s,0} (1-based)
    for s in 1..=n {
        for p in 1..s {
            if get(p - 1, (s - p) as i64) > get(p, (s - p - 1) as i64) {
                return Err(not_in(format!("chain condition fails on diagonal {s}")));
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for q in 0..(n - i) as i64 {
            // l_{i,i+q} = a_{i,q} - a_{i-1,q+1}
            let prev = if i == 0 { 0 } else { get(i - 1, q + 1) };
            let l = get(i, q) - prev;
            debug_assert!(l >= 0);
            pairs.push((RootInterval::new(i, i + q as usize), l as u64));
        }
    }
    KostantPartition::from_pairs(n, pairs)
}

/// `prod_{j<=k} (prod_{p=j}^{k} A(p, k-p)^{-1})^{l_{j,k}}`.
pub fn kostant_to_monomial(a: &KostantPartition, ctx: &MonomialContext) -> Result<Monomial> {
    check_context(ctx)?;
    let mut m = Monomial::one();
    for (root, l) in a.iter() {
        let l = i64::try_from(l).map_err(|_| Error::Overflow)?;
        for p in root.start..=root.end {
            m = m.mul_pow(&ctx.a_monomial(p, (root.end - p) as i64)?, -l)?;
        }
    }
    Ok(m)
}

/// The dual BZL word `(n, n-1, n, ..., 1, 2, ..., n)` as 0-based nodes.
pub fn dual_bzl_word(n: usize) -> Vec<usize> {
    (0..n).rev().flat_map(|s| s..n).collect()
}

/// The convex order on positive roots induced by a reduced word for `w0`.
pub fn convex_order(n: usize, word: &[usize]) -> Result<Vec<RootInterval>> {
    let roots = type_a(n)?.check_longest_word(word)?;
    Ok(roots
        .iter()
        .map(|r| RootInterval::from_root_vector(r).expect("type A roots are intervals"))
        .collect())
}

/// Multiplicities read in the convex order of `word`.
pub fn lusztig_data(a: &KostantPartition, word: &[usize]) -> Result<Vec<u64>> {
    Ok(convex_order(a.n, word)?.into_iter().map(|r| a.multiplicity(r)).collect())
}

pub fn from_lusztig_data(n: usize, word: &[usize], data: &[u64]) -> Result<KostantPartition> {
    let order = convex_order(n, word)?;
    if data.len() != order.len() {
        return Err(Error::DimensionMismatch { expected: order.len(), found: data.len() });
    }
    KostantPartition::from_pairs(n, order.into_iter().zip(data.iter().copied()))
}

/// Stretches Lusztig data along a folding: position `t` with letter `i`
/// becomes one position per `i'` in the (ascending) fiber, each carrying
/// `gamma_i L_t`. Returns the folded word and the data.
pub fn virtualize_lusztig_data(data: &[i64], word: &[usize], spec: &FoldingSpec) -> Result<(Vec<usize>, Vec<i64>)> {
    if data.len() != word.len() {
        return Err(Error::DimensionMismatch { expected: word.len(), found: data.len() });
    }
    spec.source().check_longest_word(word)?;
    let mut word_hat = Vec::new();
    let mut data_hat = Vec::new();
    for (&i, &l) in word.iter().zip(data) {
        for &ip in spec.fiber(i) {
            word_hat.push(ip);
            data_hat.push(spec.gamma(i).checked_mul(l).ok_or(Error::Overflow)?);
        }
    }
    spec.target().check_longest_word(&word_hat)?;
    Ok((word_hat, data_hat))
}

/// `Kp(infinity)` as a crystal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KostantCrystal {
    cartan: CartanMatrix,
}

impl KostantCrystal {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { cartan: type_a(n)? })
    }
}

impl Crystal for KostantCrystal {
    type Element = KostantPartition;
    type Scalar = i64;

    fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    fn f(&self, x: &KostantPartition, i: usize) -> Result<Option<KostantPartition>> {
        kp_f(x, i).map(Some)
    }

    fn e(&self, x: &KostantPartition, i: usize) -> Result<Option<KostantPartition>> {
        kp_e(x, i)
    }

    fn weight(&self, x: &KostantPartition) -> Result<Weight<i64>> {
        kp_weight(x)
    }

    fn epsilon(&self, x: &KostantPartition, i: usize) -> Result<i64> {
        Ok(kp_stats(x, i)?.1)
    }

    fn phi(&self, x: &KostantPartition, i: usize) -> Result<i64> {
        Ok(kp_stats(x, i)?.2)
    }

    fn render(&self, x: &KostantPartition) -> String {
        x.to_text()
    }
}

//! Virtualization of monomial crystals along a diagram folding.
//!
//! The map `v` sends `Y(i,k)` to `prod_{i' in phi^{-1}(i)} Y_hat(i',k)^{gamma_i}`.
//! Virtual operators act on target monomials by applying every `f_hat_{i'}`
//! (resp. `e_hat_{i'}`) of the fiber `gamma_i` times.

use rayon::prelude::*;

use crate::cartan::{CartanMatrix, FoldingSpec, Weight};
use crate::crystal_graph::{generate, Crystal, GenerateOptions};
use crate::error::{Error, Result};
use crate::monomial::{CArray, CArrayStyle, Monomial, MonomialContext};
use crate::scalar::{self, Exponent};

/// An entry where `c_hat_{i'j'} != c_{ij}` although `i' ~ j'` and `i ~ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompatibilityViolation {
    pub i_prime: usize,
    pub j_prime: usize,
    pub i: usize,
    pub j: usize,
}

/// Every violation of `c_hat_{i'j'} = c_{ij}` for adjacent `i' ~ j'` over adjacent `i ~ j`.
pub fn check_compatible(c: &CArray, c_hat: &CArray, spec: &FoldingSpec) -> Vec<CompatibilityViolation> {
    let mut out = Vec::new();
    let target = spec.target();
    let source = spec.source();
    for ip in 0..target.rank() {
        for jp in target.neighbors(ip) {
            let (i, j) = (spec.phi(ip), spec.phi(jp));
            if source.adjacent(i, j) && c_hat.entry(ip, jp) != c.entry(i, j) {
                out.push(CompatibilityViolation { i_prime: ip, j_prime: jp, i, j });
            }
        }
    }
    out
}

/// Both sides of `v(A(i,k)) = prod_{i'} A_hat(i',k)^{gamma_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCheck<E: Exponent = i64> {
    pub lhs: Monomial<E>,
    pub rhs: Monomial<E>,
}

impl<E: Exponent> LemmaCheck<E> {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The virtual statistics of a target monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualStats<E: Exponent = i64> {
    pub eps: E,
    pub phi: E,
    pub weight: Weight<E>,
}

/// Which crystal structure the operators use on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Ordinary operators, for highest-weight crystals.
    HighestWeight,
    /// Modified operators, for `M(infinity)`.
    Infinity,
}

/// A folding together with the source and target monomial contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualContext {
    spec: FoldingSpec,
    source: MonomialContext,
    target: MonomialContext,
}

impl VirtualContext {
    /// Validates the folding (including the aligned condition) and, for
    /// Kashiwara-style arrays, compatibility of `c_hat` with `c`.
    pub fn new(spec: FoldingSpec, c: CArray, c_hat: CArray) -> Result<Self> {
        spec.check()?;
        let ctx = Self::new_unchecked(spec, c, c_hat)?;
        if ctx.source.c().style() == CArrayStyle::Kashiwara {
            let violations = check_compatible(ctx.source.c(), ctx.target.c(), &ctx.spec);
            if !violations.is_empty() {
                return Err(Error::NotCompatible { count: violations.len() });
            }
        }
        Ok(ctx)
    }

    /// Skips folding and compatibility validation; useful for negative controls.
    pub fn new_unchecked(spec: FoldingSpec, c: CArray, c_hat: CArray) -> Result<Self> {
        if c.style() != c_hat.style() {
            return Err(Error::StyleMismatch {
                expected: match c.style() {
                    CArrayStyle::Kashiwara => "Kashiwara",
                    CArrayStyle::Nakajima => "Nakajima",
                },
            });
        }
        let source = MonomialContext::new(spec.source().clone(), c)?;
        let target = MonomialContext::new(spec.target().clone(), c_hat)?;
        Ok(Self { spec, source, target })
    }

    /// Nakajima-style arrays on both sides; compatibility is automatic.
    pub fn nakajima(spec: FoldingSpec) -> Result<Self> {
        spec.check()?;
        let c = CArray::nakajima(spec.source())?;
        let c_hat = CArray::nakajima(spec.target())?;
        Self::new_unchecked(spec, c, c_hat)
    }

    /// The same folding and arrays with different scaling factors, unvalidated.
    pub fn with_gamma_unchecked(&self, gamma: Vec<i64>) -> Result<Self> {
        let spec = self.spec.with_gamma(gamma)?;
        Self::new_unchecked(spec, self.source.c().clone(), self.target.c().clone())
    }

    pub fn spec(&self) -> &FoldingSpec {
        &self.spec
    }

    pub fn source(&self) -> &MonomialContext {
        &self.source
    }

    pub fn target(&self) -> &MonomialContext {
        &self.target
    }

    /// The map `v`.
    pub fn v_map<E: Exponent>(&self, m: &Monomial<E>) -> Result<Monomial<E>> {
        m.check_nodes(self.spec.source().rank())?;
        let mut triples = Vec::with_capacity(m.len());
        for (i, k, e) in m.iter() {
            let scaled = scalar::mul(e, scalar::cast(self.spec.gamma(i))?)?;
            for &ip in self.spec.fiber(i) {
                triples.push((ip, k, scaled));
            }
        }
        Monomial::from_triples(triples)
    }

    /// Inverse of `v` on its image.
    pub fn v_inverse<E: Exponent>(&self, m: &Monomial<E>) -> Result<Monomial<E>> {
        m.check_nodes(self.spec.target().rank())?;
        let mut triples = Vec::new();
        for (ip, k, e) in m.iter() {
            let i = self.spec.phi(ip);
            let fiber = self.spec.fiber(i);
            if fiber[0] != ip {
                continue;
            }
            if let Some(&other) = fiber.iter().find(|&&jp| m.exponent(jp, k) != e) {
                return Err(Error::NotInVirtualCrystal(format!(
                    "exponents of Y({ip},{k}) and Y({other},{k}) differ"
                )));
            }
            let g: E = scalar::cast(self.spec.gamma(i))?;
            if !(e % g).is_zero() {
                return Err(Error::NotInVirtualCrystal(format!("exponent {e} of Y({ip},{k}) is not divisible by {g}")));
            }
            triples.push((i, k, e / g));
        }
        // factors on non-leading fiber nodes without a leading partner
        for (ip, k, _) in m.iter() {
            let lead = self.spec.fiber(self.spec.phi(ip))[0];
            if m.exponent(lead, k).is_zero() {
                return Err(Error::NotInVirtualCrystal(format!("Y({ip},{k}) has no partner on its fiber")));
            }
        }
        Monomial::from_triples(triples)
    }

    /// Computes both sides of the factorization of `v(A(i,k))`.
    pub fn check_lemma_a<E: Exponent>(&self, i: usize, k: i64) -> Result<LemmaCheck<E>> {
        let lhs = self.v_map(&self.source.a_monomial::<E>(i, k)?)?;
        let g: E = scalar::cast(self.spec.gamma(i))?;
        let mut rhs = Monomial::one();
        for &ip in self.spec.fiber(i) {
            rhs = rhs.mul_pow(&self.target.a_monomial(ip, k)?, g)?;
        }
        Ok(LemmaCheck { lhs, rhs })
    }

    fn apply_fiber<E: Exponent>(
        &self,
        m: &Monomial<E>,
        i: usize,
        order: &[usize],
        op: impl Fn(&Monomial<E>, usize) -> Result<Option<Monomial<E>>>,
    ) -> Result<Option<Monomial<E>>> {
        self.spec.source().check_node(i)?;
        let mut x = m.clone();
        for &ip in order {
            for _ in 0..self.spec.gamma(i) {
                match op(&x, ip)? {
                    Some(y) => x = y,
                    None => return Ok(None),
                }
            }
        }
        Ok(Some(x))
    }

    /// `f^v_i = prod_{i'} f_hat_{i'}^{gamma_i}`, applying the fiber in ascending order.
    pub fn virtual_f<E: Exponent>(&self, m: &Monomial<E>, i: usize, mode: Mode) -> Result<Option<Monomial<E>>> {
        self.virtual_f_ordered(m, i, self.spec.fiber(i), mode)
    }

    /// `f^v_i` with an explicit order on the fiber.
    pub fn virtual_f_ordered<E: Exponent>(
        &self,
        m: &Monomial<E>,
        i: usize,
        order: &[usize],
        mode: Mode,
    ) -> Result<Option<Monomial<E>>> {
        match mode {
            Mode::HighestWeight => self.apply_fiber(m, i, order, |x, ip| self.target.f(x, ip)),
            Mode::Infinity => self.apply_fiber(m, i, order, |x, ip| self.target.f_modified(x, ip).map(Some)),
        }
    }

    pub fn virtual_e<E: Exponent>(&self, m: &Monomial<E>, i: usize, mode: Mode) -> Result<Option<Monomial<E>>> {
        self.virtual_e_ordered(m, i, self.spec.fiber(i), mode)
    }

    pub fn virtual_e_ordered<E: Exponent>(
        &self,
        m: &Monomial<E>,
        i: usize,
        order: &[usize],
        mode: Mode,
    ) -> Result<Option<Monomial<E>>> {
        match mode {
            Mode::HighestWeight => self.apply_fiber(m, i, order, |x, ip| self.target.e(x, ip)),
            Mode::Infinity => self.apply_fiber(m, i, order, |x, ip| self.target.e_modified(x, ip)),
        }
    }

    /// `eps^v_i = eps_hat_{i'} / gamma_i`, `phi^v_i = phi_hat_{i'} / gamma_i` (equal on the
    /// whole fiber) and `wt^v = phi_tilde^{-1}(wt_hat)`.
    pub fn virtual_stats<E: Exponent>(&self, m: &Monomial<E>, i: usize, mode: Mode) -> Result<VirtualStats<E>> {
        self.spec.source().check_node(i)?;
        let g: E = scalar::cast(self.spec.gamma(i))?;
        let divide = |value: E, what: &str, ip: usize| -> Result<E> {
            if !(value % g).is_zero() {
                return Err(Error::NotInVirtualCrystal(format!(
                    "{what}_{ip} = {value} is not divisible by gamma = {g}"
                )));
            }
            Ok(value / g)
        };
        let mut stats: Option<(E, E)> = None;
        for &ip in self.spec.fiber(i) {
            let (eps, phi) = match mode {
                Mode::HighestWeight => (self.target.eps(m, ip)?, self.target.phi(m, ip)?),
                Mode::Infinity => (self.target.eps_modified(m, ip)?, self.target.phi_modified(m, ip)?),
            };
            let pair = (divide(eps, "eps", ip)?, divide(phi, "phi", ip)?);
            match stats {
                None => stats = Some(pair),
                Some(prev) if prev != pair => {
                    return Err(Error::NotInVirtualCrystal(format!(
                        "statistics disagree along the fiber over {i}"
                    )))
                }
                Some(_) => {}
            }
        }
        let (eps, phi) = stats.ok_or_else(|| Error::InvalidFolding(format!("empty fiber over {i}")))?;
        let weight = self.spec.phi_tilde_inverse(&self.target.weight(m)?)?;
        Ok(VirtualStats { eps, phi, weight })
    }

    /// Generates the source crystal from `seed` and checks, node by node, that
    /// `v` intertwines the operators and statistics.
    pub fn verify<E: Exponent>(&self, seed: &Monomial<E>, options: GenerateOptions, mode: Mode) -> Result<VerificationReport> {
        let crystal = match mode {
            Mode::HighestWeight => crate::monomial::MonomialCrystal::<E>::highest_weight(self.source.clone()),
            Mode::Infinity => crate::monomial::MonomialCrystal::<E>::infinity(self.source.clone()),
        };
        let graph = generate(&crystal, std::slice::from_ref(seed), options)?;
        let rank = self.spec.source().rank();
        let per_node: Vec<Vec<String>> = graph
            .nodes()
            .par_iter()
            .map(|m| self.node_failures(&crystal, m, rank, mode))
            .collect::<Result<_>>()?;
        let mut failures = Vec::new();
        for (id, list) in per_node.into_iter().enumerate() {
            for reason in list {
                failures.push(Counterexample {
                    node: id,
                    monomial: self.source.render(graph.node(id)),
                    reason,
                });
            }
        }
        let table = graph
            .nodes()
            .iter()
            .map(|m| Ok((self.source.render(m), self.target.render(&self.v_map(m)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(VerificationReport {
            nodes: graph.len(),
            edges: graph.edges().len(),
            truncated: graph.is_truncated(),
            failures,
            table,
        })
    }

    fn node_failures<E: Exponent>(
        &self,
        crystal: &crate::monomial::MonomialCrystal<E>,
        m: &Monomial<E>,
        rank: usize,
        mode: Mode,
    ) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let vm = self.v_map(m)?;
        let wt = crystal.weight(m)?;
        if self.spec.phi_tilde(&wt)? != self.target.weight(&vm)? {
            out.push("phi_tilde(wt(M)) != wt(v(M))".to_string());
        }
        for i in 0..rank {
            let label = self.spec.source().label(i);
            let lhs = crystal.f(m, i)?.map(|x| self.v_map(&x)).transpose()?;
            if lhs != self.virtual_f(&vm, i, mode)? {
                out.push(format!("v(f_{label} M) != f^v_{label} v(M)"));
            }
            let lhs = crystal.e(m, i)?.map(|x| self.v_map(&x)).transpose()?;
            if lhs != self.virtual_e(&vm, i, mode)? {
                out.push(format!("v(e_{label} M) != e^v_{label} v(M)"));
            }
            match self.virtual_stats(&vm, i, mode) {
                Ok(stats) => {
                    if stats.eps != crystal.epsilon(m, i)? || stats.phi != crystal.phi(m, i)? || stats.weight != wt {
                        out.push(format!("virtual statistics for {label} differ"));
                    }
                }
                Err(e) => out.push(e.to_string()),
            }
        }
        Ok(out)
    }
}

/// A node where an intertwining check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub node: usize,
    pub monomial: String,
    pub reason: String,
}

/// Outcome of [`VirtualContext::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub nodes: usize,
    pub edges: usize,
    pub truncated: bool,
    /// In generation order, so the first entry is the earliest counterexample.
    pub failures: Vec<Counterexample>,
    /// `(M, v(M))` in canonical text, in generation order.
    pub table: Vec<(String, String)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&Counterexample> {
        self.failures.first()
    }
}

/// The virtual crystal: target monomials with the virtual operators and statistics.
#[derive(Debug, Clone)]
pub struct VirtualCrystal<'a, E: Exponent = i64> {
    ctx: &'a VirtualContext,
    mode: Mode,
    _exponent: std::marker::PhantomData<E>,
}

impl<'a, E: Exponent> VirtualCrystal<'a, E> {
    pub fn new(ctx: &'a VirtualContext, mode: Mode) -> Self {
        Self { ctx, mode, _exponent: std::marker::PhantomData }
    }
}

impl<E: Exponent> Crystal for VirtualCrystal<'_, E> {
    type Element = Monomial<E>;
    type Scalar = E;

    fn cartan(&self) -> &CartanMatrix {
        self.ctx.spec().source()
    }

    fn f(&self, x: &Monomial<E>, i: usize) -> Result<Option<Monomial<E>>> {
        self.ctx.virtual_f(x, i, self.mode)
    }

    fn e(&self, x: &Monomial<E>, i: usize) -> Result<Option<Monomial<E>>> {
        self.ctx.virtual_e(x, i, self.mode)
    }

    fn weight(&self, x: &Monomial<E>) -> Result<Weight<E>> {
        let w = self.ctx.target().weight(x)?;
        self.ctx.spec().phi_tilde_inverse(&w)
    }

    fn epsilon(&self, x: &Monomial<E>, i: usize) -> Result<E> {
        Ok(self.ctx.virtual_stats(x, i, self.mode)?.eps)
    }

    fn phi(&self, x: &Monomial<E>, i: usize) -> Result<E> {
        Ok(self.ctx.virtual_stats(x, i, self.mode)?.phi)
    }

    fn render(&self, x: &Monomial<E>) -> String {
        self.ctx.target().render(x)
    }
}

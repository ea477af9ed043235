//! Moment functionals and their calculus.
//!
//! A functional is known only through its canonical moments `(u)_n = ⟨u, xⁿ⟩`.
//! Every operation (polynomial multiples, division by `x − c`, `D`, `D*`, `E±`)
//! builds a new functional whose moments are derived lazily from its parents.
//!
//! Pairings follow the duality convention
//! `⟨D*u, p⟩ = −q⟨u, Dp⟩` and `⟨Du, p⟩ = −q⁻¹⟨u, D*p⟩`,
//! with `⟨E⁺v, p⟩ = ⟨v, E⁻p⟩` and `⟨E⁻v, p⟩ = ⟨v, E⁺p⟩`.
//!
//! # Concurrency
//!
//! Functionals are cheap `Arc` handles. Each one memoizes its moments behind a
//! `Mutex`: extension is serialized, already computed values are returned as
//! clones, and the result of `moment(n)` never depends on call order or thread.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::lattice::{OperatorFamily, Poly};
use crate::linalg::{solve, Solution};
use crate::scalar::{as_index, int, parse_scalar, powi, render, Scalar};

/// The polynomial pair `(φ, ψ)` of a Pearson equation `D(φu) = ψu`
/// (or `D*(φu) = ψu` when used as a starred pair).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PearsonPair {
    pub phi: Poly,
    pub psi: Poly,
}

impl PearsonPair {
    pub fn new(phi: Poly, psi: Poly) -> Result<Self> {
        if phi.is_zero() {
            return Err(Error::InvalidPair("φ must be nonzero".into()));
        }
        if psi.degree().unwrap_or(0) < 1 {
            return Err(Error::InvalidPair(format!("deg ψ must be at least 1 (ψ = {psi})")));
        }
        Ok(PearsonPair { phi, psi })
    }

    /// `t = deg φ`
    pub fn t(&self) -> usize {
        self.phi.degree().unwrap_or(0)
    }

    /// `p = deg ψ`
    pub fn p(&self) -> usize {
        self.psi.degree().unwrap_or(0)
    }

    /// Order `σ = max{deg φ − 2, deg ψ − 1}`.
    pub fn sigma(&self) -> usize {
        (self.t() as i64 - 2).max(self.p() as i64 - 1).max(0) as usize
    }

    /// `a_{σ+1}`: coefficient of `x^{σ+1}` in ψ (zero-padded).
    pub fn a_top(&self) -> Scalar {
        self.psi.coeff(self.sigma() + 1)
    }

    /// `b_{σ+2}`: coefficient of `x^{σ+2}` in φ (zero-padded).
    pub fn b_top(&self) -> Scalar {
        self.phi.coeff(self.sigma() + 2)
    }

    /// `a_{σ+1} + q⁻¹[n]*·b_{σ+2}`, the quantity whose vanishing is an n-singularity.
    pub fn singular_coefficient(&self, fam: &OperatorFamily, n: usize) -> Scalar {
        self.a_top() + fam.q().recip() * fam.bracket_star(n) * self.b_top()
    }
}

impl fmt::Display for PearsonPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(φ = {}, ψ = {})", self.phi, self.psi)
    }
}

/// `⟨δ_c, p⟩ = weight · p(c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracMass {
    pub c: Scalar,
    pub weight: Scalar,
}

type Generator = dyn Fn(usize, &[Scalar]) -> Result<Scalar> + Send + Sync;

enum Source {
    Table(Vec<Scalar>),
    Pearson { pair: PearsonPair, init: BTreeMap<usize, Scalar> },
    Generator(Box<Generator>),
    Dirac(DiracMass),
    Alias(MomentFunctional),
    MulPoly(Poly, MomentFunctional),
    DivLinear(Scalar, MomentFunctional),
    D(MomentFunctional),
    DStar(MomentFunctional),
    EPlus(MomentFunctional),
    EMinus(MomentFunctional),
    Combination(Vec<(Scalar, MomentFunctional)>),
}

struct Inner {
    fam: OperatorFamily,
    label: String,
    pearson: Option<PearsonPair>,
    source: Source,
    memo: Mutex<Vec<Scalar>>,
}

/// A linear functional on polynomials, represented by its memoized moments.
#[derive(Clone)]
pub struct MomentFunctional {
    inner: Arc<Inner>,
}

impl fmt::Debug for MomentFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentFunctional")
            .field("label", &self.inner.label)
            .field("fam", &self.inner.fam)
            .field("pearson", &self.inner.pearson)
            .finish()
    }
}

impl MomentFunctional {
    fn build(fam: OperatorFamily, label: String, pearson: Option<PearsonPair>, source: Source) -> Self {
        MomentFunctional {
            inner: Arc::new(Inner { fam, label, pearson, source, memo: Mutex::new(Vec::new()) }),
        }
    }

    /// Plain moment list. Requests past its end fail with `moment-unavailable`.
    pub fn from_moments(fam: OperatorFamily, label: impl Into<String>, moments: Vec<Scalar>) -> Self {
        Self::build(fam, label.into(), None, Source::Table(moments))
    }

    /// Moments from a generator that receives `n` and all moments below `n`.
    pub fn from_generator(
        fam: OperatorFamily,
        label: impl Into<String>,
        generator: impl Fn(usize, &[Scalar]) -> Result<Scalar> + Send + Sync + 'static,
    ) -> Self {
        Self::build(fam, label.into(), None, Source::Generator(Box::new(generator)))
    }

    pub fn dirac(fam: OperatorFamily, mass: DiracMass) -> Self {
        let label = format!("δ[{}]", render(&mass.c));
        Self::build(fam, label, None, Source::Dirac(mass))
    }

    /// Linear combination `Σ cᵢ uᵢ`; all terms must share the operator family.
    pub fn combination(terms: Vec<(Scalar, MomentFunctional)>) -> Self {
        let fam = terms.first().map_or(OperatorFamily::Continuous, |(_, u)| u.fam().clone());
        debug_assert!(terms.iter().all(|(_, u)| *u.fam() == fam));
        Self::build(fam, "combination".into(), None, Source::Combination(terms))
    }

    pub fn fam(&self) -> &OperatorFamily {
        &self.inner.fam
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn pearson(&self) -> Option<&PearsonPair> {
        self.inner.pearson.as_ref()
    }

    /// Same moments, with a Pearson pair attached (not checked here; see [`verify_pearson`]).
    pub fn with_pearson(&self, pair: PearsonPair) -> Self {
        Self::build(self.fam().clone(), self.label().to_string(), Some(pair), Source::Alias(self.clone()))
    }

    pub fn with_label(&self, label: impl Into<String>) -> Self {
        Self::build(self.fam().clone(), label.into(), self.inner.pearson.clone(), Source::Alias(self.clone()))
    }

    /// `(u)_n`
    pub fn moment(&self, n: usize) -> Result<Scalar> {
        let mut memo = self.inner.memo.lock().unwrap_or_else(|e| e.into_inner());
        while memo.len() <= n {
            let k = memo.len();
            let value = self.compute(k, &memo)?;
            memo.push(value);
        }
        Ok(memo[n].clone())
    }

    pub fn moments(&self, count: usize) -> Result<Vec<Scalar>> {
        if count > 0 {
            self.moment(count - 1)?;
        }
        let memo = self.inner.memo.lock().unwrap_or_else(|e| e.into_inner());
        Ok(memo[..count].to_vec())
    }

    /// `⟨u, p⟩`
    pub fn eval(&self, p: &Poly) -> Result<Scalar> {
        let Some(deg) = p.degree() else {
            return Ok(Scalar::zero());
        };
        let m = self.moments(deg + 1)?;
        Ok(p.coeffs().iter().zip(&m).map(|(c, v)| c * v).sum())
    }

    fn compute(&self, n: usize, known: &[Scalar]) -> Result<Scalar> {
        let fam = self.fam();
        let q = fam.q();
        let xn = Poly::monomial(n, Scalar::one());
        match &self.inner.source {
            Source::Table(v) => v.get(n).cloned().ok_or(Error::MomentUnavailable { index: n }),
            Source::Pearson { pair, init } => pearson_moment(fam, pair, init, n, known),
            Source::Generator(g) => g(n, known),
            Source::Dirac(m) => Ok(&m.weight * powi(&m.c, n as i64)),
            Source::Alias(u) => u.moment(n),
            Source::MulPoly(pi, u) => pi
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .try_fold(Scalar::zero(), |acc, (k, c)| Ok(acc + c * u.moment(n + k)?)),
            Source::DivLinear(c, u) => (0..n).try_fold(Scalar::zero(), |acc, j| {
                Ok(acc + powi(c, (n - 1 - j) as i64) * u.moment(j)?)
            }),
            Source::DStar(u) => Ok(-q * u.eval(&fam.d(&xn))?),
            Source::D(u) => Ok(-q.recip() * u.eval(&fam.d_star(&xn))?),
            Source::EPlus(u) => u.eval(&fam.e_minus(&xn)),
            Source::EMinus(u) => u.eval(&fam.e_plus(&xn)),
            Source::Combination(terms) => terms
                .iter()
                .try_fold(Scalar::zero(), |acc, (c, u)| Ok(acc + c * u.moment(n)?)),
        }
    }
}

fn pearson_moment(
    fam: &OperatorFamily,
    pair: &PearsonPair,
    init: &BTreeMap<usize, Scalar>,
    k: usize,
    known: &[Scalar],
) -> Result<Scalar> {
    let sigma = pair.sigma();
    let supplied = init.get(&k);
    if k <= sigma {
        return supplied.cloned().ok_or(Error::SingularMoment { index: k });
    }
    let r = pearson_relation(fam, pair, k - sigma - 1);
    let lead = r.coeff(k);
    let lower: Scalar = (0..k).map(|i| r.coeff(i) * &known[i]).sum();
    if lead.is_zero() {
        if !lower.is_zero() {
            return Err(Error::InconsistentInit {
                index: k,
                supplied: "(lower moments)".into(),
                forced: format!("relation residual {}", render(&lower)),
            });
        }
        return supplied.cloned().ok_or(Error::SingularMoment { index: k });
    }
    let forced = -lower / lead;
    match supplied {
        Some(v) if *v != forced => Err(Error::InconsistentInit {
            index: k,
            supplied: render(v),
            forced: render(&forced),
        }),
        _ => Ok(forced),
    }
}

/// `r_j = −q⁻¹φ·D*(xʲ) − ψ·xʲ`, which every solution of `D(φu) = ψu` annihilates.
/// Its degree is at most `j + σ + 1`.
pub fn pearson_relation(fam: &OperatorFamily, pair: &PearsonPair, j: usize) -> Poly {
    let xj = Poly::monomial(j, Scalar::one());
    let a = (&pair.phi * &fam.d_star(&xj)).scale(&-fam.q().recip());
    &a - &(&pair.psi * &xj)
}

/// `πu`
pub fn mul_poly(pi: &Poly, u: &MomentFunctional) -> MomentFunctional {
    let label = format!("({pi})·{}", u.label());
    MomentFunctional::build(u.fam().clone(), label, None, Source::MulPoly(pi.clone(), u.clone()))
}

/// `(x − c)⁻¹u`
pub fn div_linear(u: &MomentFunctional, c: &Scalar) -> MomentFunctional {
    let label = format!("(x − {})⁻¹{}", render(c), u.label());
    MomentFunctional::build(u.fam().clone(), label, None, Source::DivLinear(c.clone(), u.clone()))
}

/// `D*u`
pub fn dstar_functional(u: &MomentFunctional) -> MomentFunctional {
    let label = format!("D*{}", u.label());
    MomentFunctional::build(u.fam().clone(), label, None, Source::DStar(u.clone()))
}

/// `Du`
pub fn d_functional(u: &MomentFunctional) -> MomentFunctional {
    let label = format!("D{}", u.label());
    MomentFunctional::build(u.fam().clone(), label, None, Source::D(u.clone()))
}

/// `E⁺u`
pub fn eplus_functional(u: &MomentFunctional) -> MomentFunctional {
    let label = format!("E⁺{}", u.label());
    MomentFunctional::build(u.fam().clone(), label, None, Source::EPlus(u.clone()))
}

/// `E⁻u`
pub fn eminus_functional(u: &MomentFunctional) -> MomentFunctional {
    let label = format!("E⁻{}", u.label());
    MomentFunctional::build(u.fam().clone(), label, None, Source::EMinus(u.clone()))
}

/// `u − v`
pub fn difference(u: &MomentFunctional, v: &MomentFunctional) -> MomentFunctional {
    MomentFunctional::combination(vec![(Scalar::one(), u.clone()), (-Scalar::one(), v.clone())])
}

/// The pair of the starred equation `D*(φ̃u) = ψ̃u` satisfied by every solution of `D(φu) = ψu`.
pub fn tilde_transform(pair: &PearsonPair, fam: &OperatorFamily) -> PearsonPair {
    let PearsonPair { phi, psi } = pair;
    match fam {
        OperatorFamily::Continuous => pair.clone(),
        OperatorFamily::Discrete => PearsonPair { phi: phi + psi, psi: psi.clone() },
        OperatorFamily::QHahn(q) => PearsonPair {
            phi: phi + &(&fam.lattice_step() * psi),
            psi: psi.scale(q),
        },
    }
}

/// Inverse of [`tilde_transform`]: recovers the `D`-pair from a starred pair.
pub fn inverse_tilde_transform(star: &PearsonPair, fam: &OperatorFamily) -> PearsonPair {
    let PearsonPair { phi, psi } = star;
    match fam {
        OperatorFamily::Continuous => star.clone(),
        OperatorFamily::Discrete => PearsonPair { phi: phi - psi, psi: psi.clone() },
        OperatorFamily::QHahn(q) => {
            let psi = psi.scale(&q.recip());
            PearsonPair { phi: phi - &(&fam.lattice_step() * &psi), psi }
        }
    }
}

/// Outcome of checking a Pearson equation on moments `0..=checked_through`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PearsonReport {
    pub checked_through: usize,
    pub first_failure: Option<usize>,
}

impl PearsonReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `D(φu) = ψu` (or `D*(φu) = ψu` when `star`) on the moments `0..=n`.
pub fn verify_pearson(u: &MomentFunctional, pair: &PearsonPair, star: bool, n: usize) -> Result<PearsonReport> {
    let phi_u = mul_poly(&pair.phi, u);
    let lhs = if star { dstar_functional(&phi_u) } else { d_functional(&phi_u) };
    let residual = difference(&lhs, &mul_poly(&pair.psi, u));
    for k in 0..=n {
        if !residual.moment(k)?.is_zero() {
            return Ok(PearsonReport { checked_through: n, first_failure: Some(k) });
        }
    }
    Ok(PearsonReport { checked_through: n, first_failure: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    /// First `n₀ ≤ n_max` with `a_{σ+1} + q⁻¹[n₀]*b_{σ+2} = 0`.
    Singular(usize),
    /// No singular index up to `n_max`, but one exists further out.
    Boundary(usize),
}

impl Admissibility {
    pub fn is_admissible(self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

pub fn admissibility(pair: &PearsonPair, fam: &OperatorFamily, n_max: usize) -> Admissibility {
    if pair.psi.deg_i() != pair.phi.deg_i() - 1 {
        return Admissibility::Admissible;
    }
    if let Some(n0) = (0..=n_max).find(|&n| pair.singular_coefficient(fam, n).is_zero()) {
        return Admissibility::Singular(n0);
    }
    match singular_index(pair, fam) {
        Some(n0) if n0 > n_max => Admissibility::Boundary(n0),
        _ => Admissibility::Admissible,
    }
}

/// Solves `a + q⁻¹[n]*b = 0` for an integer `n ≥ 0`, exactly.
fn singular_index(pair: &PearsonPair, fam: &OperatorFamily) -> Option<usize> {
    let (a, b) = (pair.a_top(), pair.b_top());
    if b.is_zero() {
        return None;
    }
    match fam {
        OperatorFamily::QHahn(q) => {
            // [n]* = −q a / b  ⇔  q⁻ⁿ = 1 + (q⁻¹ − 1)(−q a / b)
            let target = Scalar::one() + (q.recip() - Scalar::one()) * (-q * &a / &b);
            if !target.is_positive() {
                return None;
            }
            let s = q.recip();
            let mut pw = Scalar::one();
            for n in 0.. {
                if pw == target {
                    return Some(n);
                }
                let overshot = if s > Scalar::one() { pw > target } else { pw < target };
                if overshot {
                    return None;
                }
                pw *= &s;
            }
            None
        }
        _ => as_index(&(-a / b)),
    }
}

/// Moments of the solution of `D(φu) = ψu` determined by the supplied initial moments.
///
/// Pairing the equation with `xⁿ` gives a relation whose top moment has index
/// `n + σ + 1` and coefficient `−(a_{σ+1} + q⁻¹[n]*b_{σ+2})`. Indices `0..=σ` and
/// singular indices must be supplied in `init`.
pub fn moments_from_pearson(
    pair: &PearsonPair,
    fam: &OperatorFamily,
    init: BTreeMap<usize, Scalar>,
    label: impl Into<String>,
) -> Result<MomentFunctional> {
    let top = init.keys().next_back().copied().unwrap_or(0);
    let u = MomentFunctional::build(
        fam.clone(),
        label.into(),
        Some(pair.clone()),
        Source::Pearson { pair: pair.clone(), init },
    );
    // surface missing or contradictory initial data right away
    u.moment(top.max(pair.sigma()))?;
    Ok(u)
}

/// Finds ψ of degree at most `max_deg` with `D(φu) = ψu` (or `D*` when `star`),
/// by an exact solve on the moments `0..=max_deg + extra`.
pub fn fit_psi(u: &MomentFunctional, phi: &Poly, star: bool, max_deg: usize, extra: usize) -> Result<Poly> {
    let phi_u = mul_poly(phi, u);
    let lhs = if star { dstar_functional(&phi_u) } else { d_functional(&phi_u) };
    let rows = max_deg + 1 + extra;
    let m = u.moments(rows + max_deg)?;
    let a = (0..rows).map(|n| m[n..=n + max_deg].to_vec()).collect();
    let b = (0..rows).map(|n| lhs.moment(n)).collect::<Result<Vec<_>>>()?;
    match solve(a, b) {
        Solution::Unique(c) => Ok(Poly::new(c)),
        other => Err(Error::RelationUnsolvable {
            n: max_deg,
            reason: format!("no unique ψ for φ = {phi}: {other:?}"),
        }),
    }
}

/// Builds `u_k = E⁺(φ_{k−1}u_{k−1})` for `k = 0..=levels`, each carrying its Pearson pair.
///
/// `phis[j]` is `φ_j`; missing entries repeat the previous one, and `phis[0]`
/// (if given) must be the φ of `u`. Each `φ_j` must divide `φ_{j−1}`; the
/// quotient `ξ` enters the pair update
/// `ψ_j = (Dφ_{j−1} + qE⁺ψ_{j−1} − Dξ·φ_j) / E⁺ξ`.
pub fn ladder_levels(u: &MomentFunctional, levels: usize, phis: &[Poly]) -> Result<Vec<MomentFunctional>> {
    let pair = u
        .pearson()
        .cloned()
        .ok_or_else(|| Error::InvalidPair(format!("{} carries no Pearson pair", u.label())))?;
    if let Some(p0) = phis.first() {
        if *p0 != pair.phi {
            return Err(Error::InvalidPair(format!("φ_0 = {p0} differs from the pair's φ = {}", pair.phi)));
        }
    }
    let fam = u.fam().clone();
    let q = fam.q();
    let mut out = vec![u.clone()];
    let mut cur = pair;
    for j in 1..=levels {
        let prev = out.last().expect("non-empty");
        let next_phi = phis.get(j).or(phis.last()).cloned().unwrap_or_else(|| cur.phi.clone());
        let xi = cur.phi.div_exact(&next_phi).ok_or_else(|| {
            Error::InvalidPair(format!("φ_{j} = {next_phi} does not divide φ_{} = {}", j - 1, cur.phi))
        })?;
        let numer = &(&fam.d(&cur.phi) + &fam.e_plus(&cur.psi).scale(&q)) - &(&fam.d(&xi) * &next_phi);
        let next_psi = numer.div_exact(&fam.e_plus(&xi)).ok_or_else(|| {
            Error::InvalidPair(format!("E⁺ξ does not divide the level-{j} ψ numerator {numer}"))
        })?;
        let next_pair = PearsonPair::new(next_phi, next_psi)?;
        let level = eplus_functional(&mul_poly(&cur.phi, prev))
            .with_label(format!("{}[{j}]", u.label()))
            .with_pearson(next_pair.clone());
        out.push(level);
        cur = next_pair;
    }
    Ok(out)
}

/// `u_k`, see [`ladder_levels`].
pub fn ladder(u: &MomentFunctional, k: usize, phis: &[Poly]) -> Result<MomentFunctional> {
    Ok(ladder_levels(u, k, phis)?.pop().expect("level 0 always present"))
}

/// A coefficient written either as `"num/den"` text or as a bare integer.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    pub fn value(&self) -> Result<Scalar> {
        match self {
            RationalText::Text(s) => parse_scalar(s),
            RationalText::Int(n) => Ok(int(*n)),
        }
    }
}

/// Structured description of a custom Pearson functional.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalConfig {
    pub family_kind: String,
    #[serde(default)]
    pub q: Option<RationalText>,
    pub phi: Vec<RationalText>,
    pub psi: Vec<RationalText>,
    pub init_moments: BTreeMap<String, RationalText>,
    #[serde(default)]
    pub label: Option<String>,
}

impl FunctionalConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn operator_family(&self) -> Result<OperatorFamily> {
        match (self.family_kind.as_str(), &self.q) {
            ("continuous", None) => Ok(OperatorFamily::Continuous),
            ("discrete", None) => Ok(OperatorFamily::Discrete),
            ("qhahn", Some(q)) => OperatorFamily::qhahn(q.value()?),
            ("qhahn", None) => Err(Error::Config("family_kind qhahn requires q".into())),
            ("continuous" | "discrete", Some(_)) => {
                Err(Error::Config(format!("q is only meaningful for qhahn, not {}", self.family_kind)))
            }
            (other, _) => Err(Error::Config(format!(
                "unknown family_kind {other:?} (expected continuous, discrete or qhahn)"
            ))),
        }
    }

    pub fn build(&self) -> Result<MomentFunctional> {
        let fam = self.operator_family()?;
        let poly = |cs: &[RationalText]| -> Result<Poly> {
            Ok(Poly::new(cs.iter().map(RationalText::value).collect::<Result<_>>()?))
        };
        let pair = PearsonPair::new(poly(&self.phi)?, poly(&self.psi)?)?;
        let mut init = BTreeMap::new();
        for (k, v) in &self.init_moments {
            let idx: usize = k
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("init_moments key {k:?} is not an index")))?;
            init.insert(idx, v.value()?);
        }
        if !init.contains_key(&0) {
            return Err(Error::Config("init_moments must supply index 0".into()));
        }
        let label = self.label.clone().unwrap_or_else(|| "custom".into());
        moments_from_pearson(&pair, &fam, init, label)
    }
}

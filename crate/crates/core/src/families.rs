//! The four built-in families: Jacobi, Meixner, q-Freud and Medem.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::functional::{
    eplus_functional, fit_psi, inverse_tilde_transform, moments_from_pearson, mul_poly, MomentFunctional,
    PearsonPair,
};
use crate::lattice::{OperatorFamily, Poly};
use crate::scalar::{factorial, int, pochhammer, powi, rat, render, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Jacobi { alpha: Scalar, beta: Scalar },
    Meixner { beta: Scalar, c: Scalar },
    QFreud { q: Scalar, k: Scalar, c1: Scalar },
    Medem,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Jacobi { alpha, beta } => write!(f, "jacobi({}, {})", render(alpha), render(beta)),
            FamilySpec::Meixner { beta, c } => write!(f, "meixner({}, {})", render(beta), render(c)),
            FamilySpec::QFreud { q, k, c1 } => {
                write!(f, "qfreud({}, {}, {})", render(q), render(k), render(c1))
            }
            FamilySpec::Medem => write!(f, "medem"),
        }
    }
}

impl FamilySpec {
    pub fn jacobi(alpha: Scalar, beta: Scalar) -> Self {
        FamilySpec::Jacobi { alpha, beta }
    }

    pub fn meixner(beta: Scalar, c: Scalar) -> Self {
        FamilySpec::Meixner { beta, c }
    }

    pub fn qfreud(q: Scalar, k: Scalar, c1: Scalar) -> Self {
        FamilySpec::QFreud { q, k, c1 }
    }

    /// The default instances used throughout the test suite:
    /// Jacobi(1, 2), Meixner(2, 1/2), q-Freud(1/2, 4, 1/2) and Medem.
    pub fn defaults() -> [FamilySpec; 4] {
        [
            FamilySpec::jacobi(int(1), int(2)),
            FamilySpec::meixner(int(2), rat(1, 2)),
            FamilySpec::qfreud(rat(1, 2), int(4), rat(1, 2)),
            FamilySpec::Medem,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::ParameterDomain(msg));
        match self {
            FamilySpec::Jacobi { alpha, beta } => {
                if *alpha <= int(-1) || *beta <= int(-1) {
                    return fail(format!("Jacobi needs α, β > −1, got {self}"));
                }
            }
            FamilySpec::Meixner { beta, c } => {
                if !beta.is_positive() || !c.is_positive() || *c >= int(1) {
                    return fail(format!("Meixner needs β > 0 and 0 < c < 1, got {self}"));
                }
            }
            FamilySpec::QFreud { q, k, c1 } => {
                if !q.is_positive() || *q >= int(1) || !k.is_positive() || c1.is_zero() {
                    return fail(format!("q-Freud needs 0 < q < 1, K > 0, c₁ ≠ 0, got {self}"));
                }
            }
            FamilySpec::Medem => {}
        }
        Ok(())
    }

    pub fn operator_family(&self) -> OperatorFamily {
        match self {
            FamilySpec::Jacobi { .. } | FamilySpec::Medem => OperatorFamily::Continuous,
            FamilySpec::Meixner { .. } => OperatorFamily::Discrete,
            FamilySpec::QFreud { q, .. } => OperatorFamily::QHahn(q.clone()),
        }
    }

    /// Whether the order of the family's Pearson pair is zero.
    pub fn is_classical(&self) -> bool {
        matches!(self, FamilySpec::Jacobi { .. } | FamilySpec::Meixner { .. })
    }
}

fn jacobi_pair(alpha: &Scalar, beta: &Scalar) -> PearsonPair {
    PearsonPair {
        phi: Poly::from_ints(&[1, 0, -1]),
        psi: Poly::new(vec![beta - alpha, -(alpha + beta + int(2))]),
    }
}

fn meixner_pair(beta: &Scalar, c: &Scalar) -> PearsonPair {
    PearsonPair { phi: Poly::x(), psi: Poly::new(vec![beta * c, c - int(1)]) }
}

/// The Medem pair `(x³, −x² + 4)`; it has a 1-singularity.
pub fn medem_pair() -> PearsonPair {
    PearsonPair { phi: Poly::from_ints(&[0, 0, 0, 1]), psi: Poly::from_ints(&[4, 0, -1]) }
}

/// `(1, −Kq⁻³x³)`: the pair usually quoted for q-Freud weights. The functional
/// generated from the recurrence chain satisfies a different pair; see [`make_family`].
pub fn qfreud_quoted_pair(q: &Scalar, k: &Scalar) -> PearsonPair {
    PearsonPair { phi: Poly::one(), psi: Poly::monomial(3, -k * powi(q, -3)) }
}

/// Builds the family's functional with its Pearson pair attached.
///
/// Jacobi, Meixner and Medem moments come from their Pearson recurrences with
/// `(u)₀ = 1` (Medem also fixes `(w)₁ = (w)₃ = 0`). The q-Freud functional is the
/// symmetric one with `(u)₀ = 2` and recurrence coefficients from [`QFreudChain`];
/// its pair is obtained from the moments: `D*u = ψ̃u` is solved for a cubic ψ̃
/// and converted to the `D`-pair by inverting the tilde transform.
pub fn make_family(spec: &FamilySpec) -> Result<MomentFunctional> {
    spec.validate()?;
    let fam = spec.operator_family();
    let label = spec.to_string();
    match spec {
        FamilySpec::Jacobi { alpha, beta } => {
            moments_from_pearson(&jacobi_pair(alpha, beta), &fam, BTreeMap::from([(0, int(1))]), label)
        }
        FamilySpec::Meixner { beta, c } => {
            moments_from_pearson(&meixner_pair(beta, c), &fam, BTreeMap::from([(0, int(1))]), label)
        }
        FamilySpec::Medem => {
            let init = BTreeMap::from([(0, int(1)), (1, int(0)), (3, int(0))]);
            moments_from_pearson(&medem_pair(), &fam, init, label)
        }
        FamilySpec::QFreud { q, k, c1 } => {
            let chain = QFreudChain::new(q.clone(), k.clone(), c1.clone())?;
            let u = qfreud_functional(fam.clone(), chain, label);
            let psi_star = fit_psi(&u, &Poly::one(), true, 3, 8)?;
            let star = PearsonPair::new(Poly::one(), psi_star)?;
            Ok(u.with_pearson(inverse_tilde_transform(&star, &fam)))
        }
    }
}

/// `(u)_n = 2·(Jⁿ)₀₀` for the monic Jacobi matrix with zero diagonal and
/// off-diagonal products `c_k`.
fn qfreud_functional(fam: OperatorFamily, chain: QFreudChain, label: String) -> MomentFunctional {
    let chain = Arc::new(chain);
    MomentFunctional::from_generator(fam, label, move |n, _| {
        // coefficients of xⁿ in the basis P_0, P_1, …
        let mut v = vec![Scalar::one()];
        for _ in 0..n {
            let mut next = vec![Scalar::zero(); v.len() + 1];
            for (k, a) in v.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                next[k + 1] += a;
                if k >= 1 {
                    next[k - 1] += a * chain.c(k)?;
                }
            }
            v = next;
        }
        Ok(int(2) * &v[0])
    })
}

/// Recurrence coefficients of the q-Freud sequence, `x P_n = P_{n+1} + c_n P_{n−1}`.
///
/// `c₀ = 0`, `c₂ = (1 − c₁²)/c₁` and, for `n ≥ 2`,
/// `c_{n+1} = (q[n]c_{n−1} + Kq^{1−n}c_n c_{n−1} c_{n−2} − [n−1]c_n)·q^{n+1} / (K c_n c_{n−1})`.
#[derive(Debug)]
pub struct QFreudChain {
    fam: OperatorFamily,
    q: Scalar,
    k: Scalar,
    memo: Mutex<Vec<Scalar>>,
}

impl QFreudChain {
    pub fn new(q: Scalar, k: Scalar, c1: Scalar) -> Result<Self> {
        if c1.is_zero() {
            return Err(Error::ChainBreakdown { index: 1 });
        }
        let fam = OperatorFamily::qhahn(q.clone())?;
        let c2 = (Scalar::one() - &c1 * &c1) / &c1;
        Ok(QFreudChain { fam, q, k, memo: Mutex::new(vec![Scalar::zero(), c1, c2]) })
    }

    pub fn c(&self, n: usize) -> Result<Scalar> {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        while memo.len() <= n {
            let m = memo.len() - 1; // computing c_{m+1}
            let (cm, cm1, cm2) = (&memo[m], &memo[m - 1], &memo[m - 2]);
            for (idx, v) in [(m, cm), (m - 1, cm1)] {
                if v.is_zero() {
                    return Err(Error::ChainBreakdown { index: idx });
                }
            }
            let numer = &self.q * self.fam.bracket(m) * cm1
                + &self.k * powi(&self.q, 1 - m as i64) * cm * cm1 * cm2
                - self.fam.bracket(m - 1) * cm;
            let next = numer * powi(&self.q, m as i64 + 1) / (&self.k * cm * cm1);
            if next.is_zero() {
                return Err(Error::ChainBreakdown { index: m + 1 });
            }
            memo.push(next);
        }
        Ok(memo[n].clone())
    }

    /// `a_n = K q⁻ⁿ c_n c_{n−1} c_{n−2}` for `n ≥ 2`.
    pub fn a(&self, n: usize) -> Result<Scalar> {
        assert!(n >= 2, "a_n is defined for n ≥ 2");
        Ok(&self.k * powi(&self.q, -(n as i64)) * self.c(n)? * self.c(n - 1)? * self.c(n - 2)?)
    }

    /// Residual of the defining nonlinear recurrence at `n ≥ 2`
    /// (`q[n]c_{n−1} + Kq^{1−n}c_n c_{n−1}c_{n−2} − [n−1]c_n − Kq^{−n−1}c_{n+1}c_n c_{n−1}`).
    pub fn recurrence_residual(&self, n: usize) -> Result<Scalar> {
        let (q, k, fam) = (&self.q, &self.k, &self.fam);
        let c = |i| self.c(i);
        Ok(q * fam.bracket(n) * c(n - 1)? + k * powi(q, 1 - n as i64) * c(n)? * c(n - 1)? * c(n - 2)?
            - fam.bracket(n - 1) * c(n)?
            - k * powi(q, -(n as i64) - 1) * c(n + 1)? * c(n)? * c(n - 1)?)
    }
}

/// `c_n` of the q-Freud chain.
pub fn qfreud_chain(q: &Scalar, k: &Scalar, c1: &Scalar, n: usize) -> Result<Scalar> {
    QFreudChain::new(q.clone(), k.clone(), c1.clone())?.c(n)
}

/// `d_n²/d₀²` from the families' closed-form orthogonality relations.
pub fn closed_norm_ratio(spec: &FamilySpec, n: usize) -> Result<Scalar> {
    spec.validate()?;
    match spec {
        FamilySpec::Jacobi { alpha, beta } => {
            if n == 0 {
                return Ok(Scalar::one());
            }
            let s = alpha + beta + int(2);
            let numer = powi(&int(4), n as i64)
                * factorial(n)
                * pochhammer(&(alpha + int(1)), n)
                * pochhammer(&(beta + int(1)), n)
                * pochhammer(&s, n - 1);
            let lead = pochhammer(&s, 2 * n - 1);
            Ok(numer / ((alpha + beta + int(2 * n as i64 + 1)) * &lead * &lead))
        }
        FamilySpec::Meixner { beta, c } => Ok(pochhammer(beta, n) * powi(c, n as i64) * factorial(n)
            / powi(&(Scalar::one() - c), 2 * n as i64)),
        FamilySpec::QFreud { q, k, c1 } => {
            let chain = QFreudChain::new(q.clone(), k.clone(), c1.clone())?;
            (1..=n).try_fold(Scalar::one(), |acc, i| Ok(acc * chain.c(i)?))
        }
        FamilySpec::Medem => Err(Error::NoClosedForm("Medem has no closed-form norms".into())),
    }
}

/// The functional `u_{−1}` with `E⁺(φ_{−1}u_{−1}) ∝ u`, normalized to `(u_{−1})₀ = 1`
/// and carrying its own pair: Jacobi(α−1, β−1) for Jacobi(α, β) and Meixner(β−1, c)
/// for Meixner(β, c).
pub fn u_minus_one(spec: &FamilySpec) -> Result<MomentFunctional> {
    spec.validate()?;
    match spec {
        FamilySpec::Jacobi { alpha, beta } => {
            if !alpha.is_positive() || !beta.is_positive() {
                return Err(Error::ParameterDomain(format!("u₋₁ of {spec} needs α, β > 0")));
            }
            make_family(&FamilySpec::jacobi(alpha - int(1), beta - int(1)))
        }
        FamilySpec::Meixner { beta, c } => {
            if *beta <= int(1) {
                return Err(Error::ParameterDomain(format!("u₋₁ of {spec} needs β > 1")));
            }
            make_family(&FamilySpec::meixner(beta - int(1), c.clone()))
        }
        FamilySpec::QFreud { .. } | FamilySpec::Medem => Err(Error::NoClosedForm(format!(
            "u₋₁ is not determined for {spec}: the relation u = E⁺(φ₋₁u₋₁) leaves free moments"
        ))),
    }
}

/// Returns `r` with `E⁺(φ_{−1}u_{−1}) = r·u` on moments `0..=depth`, or `None`.
pub fn minus_one_ratio(u: &MomentFunctional, u_m1: &MomentFunctional, depth: usize) -> Result<Option<Scalar>> {
    let phi = &u_m1
        .pearson()
        .ok_or_else(|| Error::InvalidPair("u₋₁ carries no Pearson pair".into()))?
        .phi;
    let lifted = eplus_functional(&mul_poly(phi, u_m1));
    let r = lifted.moment(0)? / u.moment(0)?;
    for n in 1..=depth {
        if lifted.moment(n)? != &r * u.moment(n)? {
            return Ok(None);
        }
    }
    Ok(Some(r))
}

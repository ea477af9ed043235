//! Monic orthogonal sequences of a moment functional.
//!
//! The bilinear form `(p, r) ↦ ⟨u, pr⟩` is never assumed positive: norms may be
//! negative, and only their vanishing is an error.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::functional::{ladder, MomentFunctional};
use crate::lattice::Poly;
use crate::linalg::{solve, Solution};
use crate::scalar::Scalar;

#[derive(Default)]
struct SeqMemo {
    polys: Vec<Poly>,
    dsq: Vec<Scalar>,
}

/// Lazily extended monic OPS `p_0, p_1, …` of a functional, with norms `d_n² = ⟨u, p_n²⟩`.
///
/// Extension is serialized through a mutex; requesting `p_n` forces every lower index,
/// so a breakdown is reported at the exact index where it happens.
pub struct OrthoSequence {
    u: MomentFunctional,
    memo: Mutex<SeqMemo>,
}

impl OrthoSequence {
    pub fn new(u: MomentFunctional) -> Self {
        OrthoSequence { u, memo: Mutex::new(SeqMemo::default()) }
    }

    pub fn functional(&self) -> &MomentFunctional {
        &self.u
    }

    fn extend_to(&self, n: usize) -> Result<std::sync::MutexGuard<'_, SeqMemo>> {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        while memo.polys.len() <= n {
            let k = memo.polys.len();
            let next = if k == 0 {
                Poly::one()
            } else {
                if let Some(bad) = memo.dsq.iter().position(Zero::is_zero) {
                    return Err(Error::QuasiDefiniteBreakdown { index: bad });
                }
                // Gram–Schmidt of x·p_{k−1} against every earlier p_j
                let start = &Poly::x() * &memo.polys[k - 1];
                let mut p = start.clone();
                for j in 0..k {
                    let c = self.u.eval(&(&start * &memo.polys[j]))? / &memo.dsq[j];
                    if !c.is_zero() {
                        p = &p - &memo.polys[j].scale(&c);
                    }
                }
                p
            };
            let d = self.u.eval(&(&next * &next))?;
            memo.polys.push(next);
            memo.dsq.push(d);
        }
        Ok(memo)
    }

    /// `p_n`
    pub fn poly(&self, n: usize) -> Result<Poly> {
        Ok(self.extend_to(n)?.polys[n].clone())
    }

    pub fn polys(&self, count: usize) -> Result<Vec<Poly>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        Ok(self.extend_to(count - 1)?.polys.clone())
    }

    /// `d_n² = ⟨u, p_n²⟩`, which must be nonzero.
    pub fn norm_sq(&self, n: usize) -> Result<Scalar> {
        let d = self.extend_to(n)?.dsq[n].clone();
        if d.is_zero() {
            return Err(Error::QuasiDefiniteBreakdown { index: n });
        }
        Ok(d)
    }

    /// `(B_n, C_n)` of `x p_n = p_{n+1} + B_n p_n + C_n p_{n−1}`, with `C_0 = 0`.
    pub fn ttrr(&self, n: usize) -> Result<(Scalar, Scalar)> {
        let dn = self.norm_sq(n)?;
        let pn = self.poly(n)?;
        let b = self.u.eval(&(&(&Poly::x() * &pn) * &pn))? / &dn;
        let c = if n == 0 { Scalar::zero() } else { dn / self.norm_sq(n - 1)? };
        Ok((b, c))
    }

    /// `x p_n − p_{n+1} − B_n p_n − C_n p_{n−1}`; identically zero for a genuine OPS.
    pub fn ttrr_residual(&self, n: usize) -> Result<Poly> {
        let (b, c) = self.ttrr(n)?;
        let pn = self.poly(n)?;
        let mut r = &(&Poly::x() * &pn) - &self.poly(n + 1)?;
        r = &r - &pn.scale(&b);
        if n > 0 {
            r = &r - &self.poly(n - 1)?.scale(&c);
        }
        Ok(r)
    }

    /// `p_n^{[1]} = [n+1]⁻¹ D p_{n+1}`
    pub fn derivative_poly(&self, n: usize) -> Result<Poly> {
        let fam = self.u.fam();
        Ok(fam.d(&self.poly(n + 1)?).scale(&fam.bracket(n + 1).recip()))
    }

    /// Coefficients of `p` in the basis `p_0, …, p_{deg p}`.
    pub fn expand(&self, p: &Poly) -> Result<Vec<Scalar>> {
        expand_monic(p, |k| self.poly(k))
    }
}

/// Expands `p` in a monic basis (`basis(k)` of degree `k`) by back-substitution
/// on leading coefficients; no bilinear form is involved.
pub fn expand_monic(p: &Poly, mut basis: impl FnMut(usize) -> Result<Poly>) -> Result<Vec<Scalar>> {
    let Some(deg) = p.degree() else {
        return Ok(Vec::new());
    };
    let mut rest = p.clone();
    let mut out = vec![Scalar::zero(); deg + 1];
    for k in (0..=deg).rev() {
        let c = rest.coeff(k);
        if c.is_zero() {
            continue;
        }
        let b = basis(k)?;
        debug_assert!(b.is_monic() && b.degree() == Some(k));
        rest = &rest - &b.scale(&c);
        out[k] = c;
    }
    debug_assert!(rest.is_zero());
    Ok(out)
}

/// Coefficients of a two-sided banded relation
/// `Σ_{ν∈L} ξ_ν left_ν = Σ_{ν∈R} ς_ν right_ν` with both top coefficients set to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandRelation {
    pub left: BTreeMap<usize, Scalar>,
    pub right: BTreeMap<usize, Scalar>,
    /// Whether the normalized coefficients are uniquely determined.
    pub unique: bool,
}

/// Solves for a banded relation between two monic bases, given inclusive index
/// ranges `left_range` and `right_range` (lower ends clamped at 0) whose top indices
/// coincide. The top coefficients are fixed to 1; every other coefficient is an
/// unknown of an exact linear system over monomial coefficients.
pub fn solve_band_relation(
    mut left: impl FnMut(usize) -> Result<Poly>,
    left_range: (i64, i64),
    mut right: impl FnMut(usize) -> Result<Poly>,
    right_range: (i64, i64),
    n: usize,
) -> Result<BandRelation> {
    let (l_lo, l_hi) = (left_range.0.max(0) as usize, left_range.1 as usize);
    let (r_lo, r_hi) = (right_range.0.max(0) as usize, right_range.1 as usize);
    let deg = l_hi.max(r_hi);
    let l_polys = (l_lo..=l_hi).map(&mut left).collect::<Result<Vec<_>>>()?;
    let r_polys = (r_lo..=r_hi).map(&mut right).collect::<Result<Vec<_>>>()?;
    // unknowns: left coefficients below the top, then right coefficients below the top
    let columns: Vec<Poly> = l_polys[..l_polys.len() - 1]
        .iter()
        .cloned()
        .chain(r_polys[..r_polys.len() - 1].iter().map(|p| -p))
        .collect();
    let target = r_polys.last().expect("nonempty range") - l_polys.last().expect("nonempty range");
    let a = (0..=deg)
        .map(|k| columns.iter().map(|p| p.coeff(k)).collect())
        .collect();
    let b = (0..=deg).map(|k| target.coeff(k)).collect();
    let (x, unique) = match solve(a, b) {
        Solution::Unique(x) => (x, true),
        Solution::Underdetermined { particular, .. } => (particular, false),
        Solution::Inconsistent { row } => {
            return Err(Error::RelationUnsolvable {
                n,
                reason: format!("banded system inconsistent in the coefficient of x^{row}"),
            })
        }
    };
    let n_left = l_polys.len() - 1;
    let mut left_c: BTreeMap<usize, Scalar> = (l_lo..l_hi).zip(x[..n_left].iter().cloned()).collect();
    left_c.insert(l_hi, Scalar::one());
    let mut right_c: BTreeMap<usize, Scalar> = (r_lo..r_hi).zip(x[n_left..].iter().cloned()).collect();
    right_c.insert(r_hi, Scalar::one());
    Ok(BandRelation { left: left_c, right: right_c, unique })
}

/// `p_n` of `u`.
pub fn monic_ops(u: &MomentFunctional, n: usize) -> Result<Poly> {
    OrthoSequence::new(u.clone()).poly(n)
}

/// `(B_n, C_n)` of `u`.
pub fn ttrr(u: &MomentFunctional, n: usize) -> Result<(Scalar, Scalar)> {
    OrthoSequence::new(u.clone()).ttrr(n)
}

/// `d_n²` of `u`.
pub fn norm_sq(u: &MomentFunctional, n: usize) -> Result<Scalar> {
    OrthoSequence::new(u.clone()).norm_sq(n)
}

/// `p_n^{[1]}` of `u`.
pub fn deriv_seq(u: &MomentFunctional, n: usize) -> Result<Poly> {
    OrthoSequence::new(u.clone()).derivative_poly(n)
}

/// `p_n^{{k}}`, the monic OPS of the ladder functional `u_k` (default `φ_k = φ`).
pub fn ladder_ops(u: &MomentFunctional, k: usize, n: usize) -> Result<Poly> {
    monic_ops(&ladder(u, k, &[])?, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilySpec};
    use crate::scalar::{int, rat};

    fn legendre() -> MomentFunctional {
        make_family(&FamilySpec::jacobi(int(0), int(0))).unwrap()
    }

    #[test]
    fn legendre_examples() {
        let u = legendre();
        assert_eq!(monic_ops(&u, 0).unwrap(), Poly::one());
        assert_eq!(monic_ops(&u, 2).unwrap(), Poly::new(vec![rat(-1, 3), int(0), int(1)]));
        assert_eq!(ttrr(&u, 1).unwrap(), (int(0), rat(1, 3)));
        assert_eq!(ttrr(&u, 2).unwrap(), (int(0), rat(4, 15)));
        assert_eq!(deriv_seq(&u, 1).unwrap(), Poly::x());
        assert_eq!(deriv_seq(&u, 0).unwrap(), Poly::one());
        assert_eq!(ladder_ops(&u, 1, 1).unwrap(), Poly::x());
        assert_eq!(ladder_ops(&u, 0, 3).unwrap(), monic_ops(&u, 3).unwrap());
    }

    #[test]
    fn medem_examples() {
        let w = make_family(&FamilySpec::Medem).unwrap();
        assert_eq!(monic_ops(&w, 2).unwrap(), Poly::from_ints(&[-4, 0, 1]));
        assert_eq!(ttrr(&w, 1).unwrap(), (int(0), int(4)));
        assert_eq!(ttrr(&w, 2).unwrap(), (int(0), int(-8)));
    }

    #[test]
    fn breakdown_is_reported_at_the_offending_index() {
        // moments 1, 0, 0, …: d_1² = 0
        let u = MomentFunctional::from_moments(
            crate::lattice::OperatorFamily::Continuous,
            "degenerate",
            vec![int(1), int(0), int(0), int(0), int(0), int(0)],
        );
        let seq = OrthoSequence::new(u);
        assert_eq!(seq.poly(1).unwrap(), Poly::x());
        assert_eq!(seq.norm_sq(1), Err(Error::QuasiDefiniteBreakdown { index: 1 }));
        assert_eq!(seq.poly(2), Err(Error::QuasiDefiniteBreakdown { index: 1 }));
    }

    #[test]
    fn expansion_round_trip() {
        let seq = OrthoSequence::new(legendre());
        let p = Poly::from_ints(&[3, -1, 4, 1, -5]);
        let c = seq.expand(&p).unwrap();
        let back = c
            .iter()
            .enumerate()
            .fold(Poly::zero(), |acc, (k, ck)| &acc + &seq.poly(k).unwrap().scale(ck));
        assert_eq!(back, p);
    }
}

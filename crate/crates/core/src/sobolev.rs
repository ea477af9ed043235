//! The Sobolev form `⟨p, r⟩_S = ⟨u, pr⟩ + λ⟨u, Dp·Dr⟩`, its monic orthogonal
//! sequence `Q_n`, and the connection with the standard sequence.

use std::sync::Mutex;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::functional::{tilde_transform, MomentFunctional, PearsonPair};
use crate::lattice::{OperatorFamily, Poly};
use crate::linalg::solve;
use crate::report::{Check, Report};
use crate::scalar::{render, Scalar};
use crate::standard_ops::{expand_monic, solve_band_relation, OrthoSequence};

/// `⟨p, r⟩_S = ⟨u, pr⟩ + λ⟨u, Dp·Dr⟩` with `λ ≥ 0`.
#[derive(Clone, Debug)]
pub struct SobolevForm {
    u: MomentFunctional,
    lambda: Scalar,
}

impl SobolevForm {
    pub fn new(u: MomentFunctional, lambda: Scalar) -> Result<Self> {
        if lambda.is_negative() {
            return Err(Error::ParameterDomain(format!("λ must be ≥ 0, got {}", render(&lambda))));
        }
        Ok(SobolevForm { u, lambda })
    }

    pub fn u(&self) -> &MomentFunctional {
        &self.u
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn fam(&self) -> &OperatorFamily {
        self.u.fam()
    }

    pub fn inner(&self, p: &Poly, r: &Poly) -> Result<Scalar> {
        let plain = self.u.eval(&(p * r))?;
        if self.lambda.is_zero() {
            return Ok(plain);
        }
        let fam = self.fam();
        Ok(plain + &self.lambda * self.u.eval(&(&fam.d(p) * &fam.d(r)))?)
    }
}

pub fn sob_inner(form: &SobolevForm, p: &Poly, r: &Poly) -> Result<Scalar> {
    form.inner(p, r)
}

#[derive(Default)]
struct SobMemo {
    polys: Vec<Poly>,
    dsq: Vec<Scalar>,
}

/// Monic Sobolev-orthogonal `Q_0, Q_1, …` with norms `𝐝_n² = ⟨Q_n, Q_n⟩_S`.
pub struct SobolevSequence {
    form: SobolevForm,
    memo: Mutex<SobMemo>,
}

impl SobolevSequence {
    pub fn new(form: SobolevForm) -> Self {
        SobolevSequence { form, memo: Mutex::new(SobMemo::default()) }
    }

    pub fn form(&self) -> &SobolevForm {
        &self.form
    }

    fn extend_to(&self, n: usize) -> Result<std::sync::MutexGuard<'_, SobMemo>> {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        while memo.polys.len() <= n {
            let k = memo.polys.len();
            let next = if k == 0 {
                Poly::one()
            } else {
                if let Some(bad) = memo.dsq.iter().position(Zero::is_zero) {
                    return Err(Error::SobolevBreakdown { index: bad });
                }
                let start = &Poly::x() * &memo.polys[k - 1];
                let mut q = start.clone();
                for j in 0..k {
                    let c = self.form.inner(&start, &memo.polys[j])? / &memo.dsq[j];
                    if !c.is_zero() {
                        q = &q - &memo.polys[j].scale(&c);
                    }
                }
                q
            };
            let d = self.form.inner(&next, &next)?;
            memo.polys.push(next);
            memo.dsq.push(d);
        }
        Ok(memo)
    }

    /// `Q_n`
    pub fn poly(&self, n: usize) -> Result<Poly> {
        Ok(self.extend_to(n)?.polys[n].clone())
    }

    /// `𝐝_n²`, which must be nonzero.
    pub fn norm_sq(&self, n: usize) -> Result<Scalar> {
        let d = self.extend_to(n)?.dsq[n].clone();
        if d.is_zero() {
            return Err(Error::SobolevBreakdown { index: n });
        }
        Ok(d)
    }

    /// Coefficients of `p` in the `Q` basis, by back-substitution.
    pub fn expand(&self, p: &Poly) -> Result<Vec<Scalar>> {
        expand_monic(p, |k| self.poly(k))
    }

    /// Coefficients of `p` in the `Q` basis, by projection `⟨p, Q_ν⟩_S / 𝐝_ν²`.
    pub fn project(&self, p: &Poly) -> Result<Vec<Scalar>> {
        let Some(deg) = p.degree() else {
            return Ok(Vec::new());
        };
        (0..=deg)
            .map(|k| Ok(self.form.inner(p, &self.poly(k)?)? / self.norm_sq(k)?))
            .collect()
    }
}

/// `Q_n` from the monomial Gram matrix: `Q_n = xⁿ + Σ_{k<n} c_k xᵏ` with
/// `⟨Q_n, xʲ⟩_S = 0` for `j < n`. Independent of the Gram–Schmidt path.
pub fn monomial_gram_ops(form: &SobolevForm, n: usize) -> Result<Poly> {
    let mono = |k: usize| Poly::monomial(k, Scalar::one());
    let a = (0..n)
        .map(|j| (0..n).map(|k| form.inner(&mono(k), &mono(j))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let b = (0..n).map(|j| Ok(-form.inner(&mono(n), &mono(j))?)).collect::<Result<Vec<_>>>()?;
    let mut c = solve(a, b).unique().ok_or(Error::SobolevBreakdown { index: n.saturating_sub(1) })?;
    c.push(Scalar::one());
    Ok(Poly::new(c))
}

pub fn sobolev_ops(form: &SobolevForm, n: usize) -> Result<Poly> {
    SobolevSequence::new(form.clone()).poly(n)
}

pub fn sob_norm_sq(form: &SobolevForm, n: usize) -> Result<Scalar> {
    SobolevSequence::new(form.clone()).norm_sq(n)
}

/// Connection data for a classical functional `u` and its companion `u₋₁`:
///
/// * `p_n^{{−1}} = p_n + δ̃_n p_{n−1} + ε̃_n p_{n−2}` (by basis expansion),
/// * `p_n^{{−1}} = Q_n + f_{n−1}Q_{n−1} + e_{n−2}Q_{n−2}`, `n ≥ 2`,
/// * `e_{n−2} = ε̃_n d²_{n−2}/𝐝²_{n−2}` and
///   `f_{n−1} = (δ̃_n d²_{n−1} + ε̃_n(δ̃_{n−1} − f_{n−2})d²_{n−2})/𝐝²_{n−1}`,
///   with `f₀ = δ̃₁`, `e₀ = ε̃₂`,
/// * `𝐝_n²` from the nonlinear norm recurrence with `𝐝₀² = d₀²`, `𝐝₁² = d₁² + λd₀²`.
///
/// Everything here is produced by the recurrences alone; `Q_n` is then rebuilt
/// from `p^{{−1}}` and compared against Gram–Schmidt.
#[derive(Clone, Debug)]
pub struct ClassicalConnection {
    pub depth: usize,
    pub lambda: Scalar,
    /// `d_n²` of `u`, for `n ≤ depth + 2`.
    pub dsq: Vec<Scalar>,
    pub delta_t: Vec<Scalar>,
    pub eps_t: Vec<Scalar>,
    /// `f_n`, for `n ≤ depth`.
    pub f: Vec<Scalar>,
    /// `e_n`, for `n ≤ depth`.
    pub e: Vec<Scalar>,
    /// `𝐝_n²` from the norm recurrence, for `n ≤ depth`.
    pub dsq_sobolev: Vec<Scalar>,
    /// `Q_n` rebuilt from `p^{{−1}}`, for `n ≤ depth`.
    pub q: Vec<Poly>,
    pub p_minus_one: Vec<Poly>,
}

fn bracket_sq(fam: &OperatorFamily, n: usize) -> Scalar {
    let b = fam.bracket(n);
    &b * &b
}

/// Builds the connection through `depth` and checks `p_n^{{−1}} = Q_n + f_{n−1}Q_{n−1} + e_{n−2}Q_{n−2}`
/// against the Gram–Schmidt `Q_n`; a nonzero residual is a `relation-violated` error.
pub fn classical_connection(form: &SobolevForm, u_m1: &MomentFunctional, depth: usize) -> Result<ClassicalConnection> {
    let fam = form.fam().clone();
    let lambda = form.lambda().clone();
    let p = OrthoSequence::new(form.u().clone());
    let pm1 = OrthoSequence::new(u_m1.clone());
    let top = depth + 2;

    let mut delta_t = Vec::with_capacity(top + 1);
    let mut eps_t = Vec::with_capacity(top + 1);
    let mut p_minus_one = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let pn = pm1.poly(n)?;
        let c = p.expand(&pn)?;
        if let Some(k) = (0..n.saturating_sub(2)).find(|&k| !c[k].is_zero()) {
            return Err(Error::RelationViolated {
                n,
                residual: format!("p_{n}^{{-1}} has a component {} along p_{k}", render(&c[k])),
            });
        }
        delta_t.push(if n >= 1 { c[n - 1].clone() } else { Scalar::zero() });
        eps_t.push(if n >= 2 { c[n - 2].clone() } else { Scalar::zero() });
        p_minus_one.push(pn);
    }
    let dsq = (0..=top).map(|n| p.norm_sq(n)).collect::<Result<Vec<_>>>()?;

    let mut bold = vec![dsq[0].clone()];
    let mut f: Vec<Scalar> = Vec::new();
    let mut e: Vec<Scalar> = Vec::new();
    for j in 0..=depth {
        if j == 1 {
            bold.push(&dsq[1] + &lambda * bracket_sq(&fam, 1) * &dsq[0]);
        } else if j >= 2 {
            bold.push(norm_recurrence_rhs(&fam, &lambda, j, &dsq, &delta_t, &eps_t, &f, &e));
        }
        if bold[j].is_zero() {
            return Err(Error::SobolevBreakdown { index: j });
        }
        let carried = if j >= 1 {
            &eps_t[j + 1] * (&delta_t[j] - &f[j - 1]) * &dsq[j - 1]
        } else {
            Scalar::zero()
        };
        f.push((&delta_t[j + 1] * &dsq[j] + carried) / &bold[j]);
        e.push(&eps_t[j + 2] * &dsq[j] / &bold[j]);
    }

    let mut q: Vec<Poly> = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let qn = match n {
            0 | 1 => p.poly(n)?,
            _ => &(&p_minus_one[n] - &q[n - 1].scale(&f[n - 1])) - &q[n - 2].scale(&e[n - 2]),
        };
        q.push(qn);
    }

    let gs = SobolevSequence::new(form.clone());
    for n in 2..=depth {
        let residual = &(&(&p_minus_one[n] - &gs.poly(n)?) - &gs.poly(n - 1)?.scale(&f[n - 1]))
            - &gs.poly(n - 2)?.scale(&e[n - 2]);
        if !residual.is_zero() {
            return Err(Error::RelationViolated { n, residual: residual.to_string() });
        }
    }

    Ok(ClassicalConnection {
        depth,
        lambda,
        dsq,
        delta_t,
        eps_t,
        f,
        e,
        dsq_sobolev: bold,
        q,
        p_minus_one: p_minus_one.into_iter().take(depth + 1).collect(),
    })
}

/// Right side of the norm recurrence at `n ≥ 2`:
/// `d_n² + (λ[n]² + δ̃_n(δ̃_n − f_{n−1}))d²_{n−1} + ε̃_n(ε̃_n − e_{n−2} − f_{n−1}(δ̃_{n−1} − f_{n−2}))d²_{n−2}`.
#[allow(clippy::too_many_arguments)]
fn norm_recurrence_rhs(
    fam: &OperatorFamily,
    lambda: &Scalar,
    n: usize,
    dsq: &[Scalar],
    dt: &[Scalar],
    et: &[Scalar],
    f: &[Scalar],
    e: &[Scalar],
) -> Scalar {
    let mid = lambda * bracket_sq(fam, n) + &dt[n] * (&dt[n] - &f[n - 1]);
    let low = &et[n] * (&et[n] - &e[n - 2] - &f[n - 1] * (&dt[n - 1] - &f[n - 2]));
    &dsq[n] + mid * &dsq[n - 1] + low * &dsq[n - 2]
}

/// `e_n` from the closed recurrence in terms of `C_n = d_n²/d²_{n−1}` (`n ≥ 2`),
/// or from its initial values at `n = 0, 1`.
pub fn e_from_recurrence(fam: &OperatorFamily, conn: &ClassicalConnection, n: usize) -> Scalar {
    let (dt, et, f, e, d) = (&conn.delta_t, &conn.eps_t, &conn.f, &conn.e, &conn.dsq);
    let c = |k: usize| &d[k] / &d[k - 1];
    match n {
        0 => et[2].clone(),
        1 => c(1) * &et[3] / (&conn.lambda + c(1)),
        _ => {
            let low = &et[n] * (&et[n] - &e[n - 2] - &f[n - 1] * (&dt[n - 1] - &f[n - 2])) / c(n - 1);
            let denom = &conn.lambda * bracket_sq(fam, n) + c(n) + &dt[n] * (&dt[n] - &f[n - 1]) + low;
            c(n) * &et[n + 2] / denom
        }
    }
}

/// Compares the connection's recurrence outputs with the projection oracle:
/// `𝐝_n²` against Gram–Schmidt norms, `e_n` from the `C_n` form and its initials,
/// and `f_n`, `e_n` against direct Sobolev projections of `p^{{−1}}`.
pub fn norm_recurrence_check(form: &SobolevForm, conn: &ClassicalConnection, n: usize) -> Result<Report> {
    let fam = form.fam();
    let gs = SobolevSequence::new(form.clone());
    let mut report = Report::default();
    let top = n.min(conn.depth);
    for k in 0..=top {
        let oracle = gs.norm_sq(k)?;
        report.push(Check::new(
            format!("sobolev norm n={k}"),
            oracle == conn.dsq_sobolev[k],
            format!("recurrence {} vs projection {}", render(&conn.dsq_sobolev[k]), render(&oracle)),
        ));
        let via_c = e_from_recurrence(fam, conn, k);
        report.push(Check::new(
            format!("e from C_n form n={k}"),
            via_c == conn.e[k],
            format!("C_n form {} vs direct {}", render(&via_c), render(&conn.e[k])),
        ));
        if k + 2 <= conn.depth {
            let proj = gs.project(&conn.p_minus_one[k + 2])?;
            report.push(Check::new(
                format!("connection coefficients by projection n={}", k + 2),
                proj[k + 1] == conn.f[k + 1] && proj[k] == conn.e[k],
                format!(
                    "f: {} vs {}, e: {} vs {}",
                    render(&conn.f[k + 1]),
                    render(&proj[k + 1]),
                    render(&conn.e[k]),
                    render(&proj[k])
                ),
            ));
        }
    }
    report.push(Check::equal("initial 𝐝₀² = d₀²", &render(&conn.dsq[0]), &render(&conn.dsq_sobolev[0])));
    let d1 = &conn.dsq[1] + &conn.lambda * &conn.dsq[0];
    report.push(Check::equal("initial 𝐝₁² = d₁² + λd₀²", &render(&d1), &render(&conn.dsq_sobolev[1])));
    report.push(Check::equal("f₀ = δ̃₁", &render(&conn.delta_t[1]), &render(&conn.f[0])));
    report.push(Check::equal("e₀ = ε̃₂", &render(&conn.eps_t[2]), &render(&conn.e[0])));
    for k in 0..=top {
        report.push(Check::new(
            format!("rebuilt Q_{k} equals Gram–Schmidt"),
            conn.q[k] == gs.poly(k)?,
            "",
        ));
    }
    Ok(report)
}

/// The expansion `Σ ξ*_ν p_ν^{{−1}} = Q_{n+σ₋₁} + Σ θ_{n,ν} Q_ν`.
#[derive(Clone, Debug)]
pub struct SemiclassicalConnection {
    pub n: usize,
    pub sigma_m1: usize,
    pub t_m1: usize,
    pub h_star: usize,
    /// `θ_{n,ν}` for `ν = 0..n+σ₋₁` by Sobolev projection.
    pub theta: Vec<Scalar>,
    /// The same coefficients by back-substitution in the `Q` basis.
    pub theta_backsub: Vec<Scalar>,
    pub report: Report,
}

/// Computes `θ_{n,ν}` two ways and checks `θ_{n,ν} = 0` below `n − σ₋₁ − H*`
/// (`H* = max{t₋₁, σ₋₁}`). When `σ₋₁ = 0` the lowest surviving coefficient is
/// checked against `𝐝²_{n−t₋₁}θ_{n,n−t₋₁} = ς*_{n,n−t₋₁}d²_{n−t₋₁}`.
pub fn semiclassical_connection(form: &SobolevForm, u_m1: &MomentFunctional, n: usize) -> Result<SemiclassicalConnection> {
    let pair_m1: PearsonPair = u_m1
        .pearson()
        .cloned()
        .ok_or_else(|| Error::InvalidPair("u₋₁ carries no Pearson pair".into()))?;
    let sigma = pair_m1.sigma();
    let t = tilde_phi_degree(&pair_m1, form.fam());
    let h_star = t.max(sigma);
    if n < sigma + h_star {
        return Err(Error::ParameterDomain(format!("need n ≥ σ₋₁ + H* = {}", sigma + h_star)));
    }
    let p = OrthoSequence::new(form.u().clone());
    let pm1 = OrthoSequence::new(u_m1.clone());
    let (ni, si, ti) = (n as i64, sigma as i64, t as i64);
    let rel = solve_band_relation(|k| pm1.poly(k), (ni - si, ni + si), |k| p.poly(k), (ni - ti - si, ni + si), n)?;
    let lhs = rel
        .left
        .iter()
        .try_fold(Poly::zero(), |acc, (k, c)| Ok::<_, Error>(&acc + &pm1.poly(*k)?.scale(c)))?;

    let seq = SobolevSequence::new(form.clone());
    let theta = seq.project(&lhs)?;
    let theta_backsub = seq.expand(&lhs)?;
    let mut report = Report::default();
    report.push(Check::new(
        format!("projection and back-substitution agree n={n}"),
        theta == theta_backsub,
        "",
    ));
    let lowest = n - sigma - h_star;
    let stray: Vec<usize> = (0..lowest).filter(|&k| !theta[k].is_zero()).collect();
    report.push(Check::new(
        format!("θ vanishes below {lowest} n={n}"),
        stray.is_empty(),
        format!("nonzero at {stray:?}"),
    ));
    if sigma == 0 {
        let k = n - t;
        let lhs_v = seq.norm_sq(k)? * &theta[k];
        let rhs_v = rel.right.get(&k).cloned().unwrap_or_else(Scalar::zero) * p.norm_sq(k)?;
        report.push(Check::new(
            format!("lowest coefficient n={n}"),
            lhs_v == rhs_v,
            format!("{} vs {}", render(&lhs_v), render(&rhs_v)),
        ));
    }
    Ok(SemiclassicalConnection { n, sigma_m1: sigma, t_m1: t, h_star, theta, theta_backsub, report })
}

/// `deg φ̃` of a pair under the given family.
pub fn tilde_phi_degree(pair: &PearsonPair, fam: &OperatorFamily) -> usize {
    tilde_transform(pair, fam).phi.degree().unwrap_or(0)
}

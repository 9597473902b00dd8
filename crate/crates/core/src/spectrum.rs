//! The full eigensystem of `L_{alpha,n}`.
//!
//! Odd indices are closed form, `lambda_j = g((j-1) pi / n)`; even indices
//! come from a main-equation solver. Eigenvalues depend on `Re(alpha)` only,
//! eigenvectors on the full complex weight.

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::charpoly::ProblemInstance;
use crate::error::{Error, Result};
use crate::numerics::{g, Cplx, PrecisionContext};
use crate::solvers::{
    solve_theta_bisection, solve_theta_fixed_point, solve_theta_newton, Method, SolveReport,
};
use crate::symbolfns::{eta, nu, xi, AlphaParam};

/// How an entry of a [`SpectrumResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntrySource {
    ClosedForm,
    Newton,
    Bisection,
    FixedPoint,
}

impl From<Method> for EntrySource {
    fn from(m: Method) -> Self {
        match m {
            Method::Newton => EntrySource::Newton,
            Method::Bisection => EntrySource::Bisection,
            Method::FixedPoint => EntrySource::FixedPoint,
        }
    }
}

impl std::fmt::Display for EntrySource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EntrySource::ClosedForm => "closed-form",
            EntrySource::Newton => "newton",
            EntrySource::Bisection => "bisection",
            EntrySource::FixedPoint => "fixed-point",
        })
    }
}

/// Eigenvalues in ascending order with their angles; index `j - 1` holds `lambda_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub lambdas: Vec<Float>,
    pub thetas: Vec<Float>,
    pub sources: Vec<EntrySource>,
    /// Solver diagnostics for even `j`, `None` for odd `j`.
    pub reports: Vec<Option<SolveReport>>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `lambda_j`, 1-based.
    pub fn lambda(&self, j: usize) -> &Float {
        &self.lambdas[j - 1]
    }

    /// `theta_j`, 1-based.
    pub fn theta(&self, j: usize) -> &Float {
        &self.thetas[j - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvector {
    pub coords: Vec<Cplx>,
    pub exact_norm: Float,
    /// `sqrt(n nu(theta))` for even `j`; equal to `exact_norm` otherwise.
    pub asympt_norm: Float,
}

/// Solves the main equation for one even index with the chosen method.
pub fn solve_even(
    alpha: &AlphaParam,
    n: usize,
    j: usize,
    method: Method,
    ctx: &PrecisionContext,
    tol: Option<&Float>,
) -> Result<SolveReport> {
    match method {
        Method::Newton => solve_theta_newton(alpha, n, j, None, ctx, tol),
        Method::Bisection => solve_theta_bisection(alpha, n, j, ctx, tol),
        Method::FixedPoint => solve_theta_fixed_point(alpha, n, j, None, ctx, tol),
    }
}

/// All `n` eigenvalues of `L_{alpha,n}`; even indices are solved in parallel.
pub fn full_spectrum(
    inst: &ProblemInstance,
    method: Method,
    ctx: &PrecisionContext,
    tol: Option<&Float>,
) -> Result<SpectrumResult> {
    let n = inst.n;
    let even: Vec<SolveReport> = (1..=n / 2)
        .into_par_iter()
        .map(|i| solve_even(&inst.alpha, n, 2 * i, method, ctx, tol))
        .collect::<Result<_>>()?;

    let mut lambdas = Vec::with_capacity(n);
    let mut thetas = Vec::with_capacity(n);
    let mut sources = Vec::with_capacity(n);
    let mut reports = Vec::with_capacity(n);
    let mut even = even.into_iter();
    for j in 1..=n {
        if j % 2 == 1 {
            let theta = ctx.pi_ratio(j as i64 - 1, n as i64);
            lambdas.push(g(&theta, ctx));
            thetas.push(theta);
            sources.push(EntrySource::ClosedForm);
            reports.push(None);
        } else {
            let report = even.next().expect("one report per even index");
            lambdas.push(g(&report.root, ctx));
            thetas.push(report.root.clone());
            sources.push(method.into());
            reports.push(Some(report));
        }
    }
    assert!(
        lambdas.windows(2).all(|w| w[0] <= w[1]),
        "eigenvalues out of order"
    );
    Ok(SpectrumResult {
        lambdas,
        thetas,
        sources,
        reports,
    })
}

/// `sin(k theta)` for `k = 0..=n` by the Chebyshev recurrence.
fn sine_table(n: usize, theta: &Float, ctx: &PrecisionContext) -> Vec<Float> {
    let p = ctx.bits();
    let (s1, c1) = Float::with_val(p, theta).sin_cos(Float::new(p));
    let two_c = c1 * 2u32;
    let mut out = Vec::with_capacity(n + 1);
    out.push(ctx.zero());
    out.push(s1);
    for k in 2..=n {
        let next = Float::with_val(p, &two_c * &out[k - 1]) - &out[k - 2];
        out.push(next);
    }
    out
}

/// Unnormalized coordinates of the `j`-th eigenvector,
/// `v_k = sin(k theta) - (1 - conj(alpha)) sin((k-1) theta) + conj(alpha) sin((n-k) theta)`,
/// or all ones for `j = 1`.
pub fn eigenvector_coords(
    inst: &ProblemInstance,
    j: usize,
    theta: &Float,
    ctx: &PrecisionContext,
) -> Result<Vec<Cplx>> {
    let n = inst.n;
    if j == 0 || j > n {
        return Err(Error::InvalidIndex {
            j,
            n,
            reason: "need 1 <= j <= n",
        });
    }
    if j == 1 {
        return Ok(vec![Cplx::real(ctx, 1); n]);
    }
    let work = ctx.widened(16);
    let p = work.bits();
    let s = sine_table(n, theta, &work);
    let a = work.round(inst.alpha.re());
    let b = work.round(inst.alpha.im());
    let one_minus_a = Float::with_val(p, 1 - &a);
    Ok((1..=n)
        .map(|k| {
            let re = Float::with_val(p, &s[k] - Float::with_val(p, &one_minus_a * &s[k - 1]))
                + Float::with_val(p, &a * &s[n - k]);
            let im = -(Float::with_val(p, &s[k - 1] + &s[n - k]) * &b);
            Cplx::new(ctx.round(&re), ctx.round(&im))
        })
        .collect())
}

/// Coordinates and both norms of the `j`-th eigenvector.
pub fn eigenvector(
    inst: &ProblemInstance,
    j: usize,
    theta: &Float,
    ctx: &PrecisionContext,
) -> Result<Eigenvector> {
    let coords = eigenvector_coords(inst, j, theta, ctx)?;
    let exact_norm = eigvec_norm_exact(inst, j, theta, ctx)?;
    let asympt_norm = if j.is_multiple_of(2) {
        eigvec_norm_asympt(inst, j, theta, ctx)?
    } else {
        exact_norm.clone()
    };
    Ok(Eigenvector {
        coords,
        exact_norm,
        asympt_norm,
    })
}

/// `||v_j||_2` from the closed forms: `sqrt(n)` for `j = 1`,
/// `|1 - alpha| sqrt(n lambda / 2)` for odd `j`, and
/// `sqrt(n nu(theta) + sin(eta(theta)) / sin(theta) xi(theta))` for even `j`.
pub fn eigvec_norm_exact(
    inst: &ProblemInstance,
    j: usize,
    theta: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let n = inst.n;
    if j == 0 || j > n {
        return Err(Error::InvalidIndex {
            j,
            n,
            reason: "need 1 <= j <= n",
        });
    }
    let p = ctx.bits();
    if j == 1 {
        return Ok(ctx.float(n as u64).sqrt());
    }
    let a = &inst.alpha;
    if j % 2 == 1 {
        let lam = g(theta, ctx);
        let scale = a.one_minus_abs_sqr(ctx).sqrt();
        return Ok(scale * (lam * n as u64 / 2u32).sqrt());
    }
    let e = eta(a, theta, ctx);
    let ratio = Float::with_val(p, e.sin_ref()) / Float::with_val(p, theta.sin_ref());
    let sq = nu(a, theta, ctx) * n as u64 + ratio * xi(a, theta, ctx);
    Ok(sq.sqrt())
}

/// `sqrt(n nu(theta))`, the leading term of the even-index norm.
pub fn eigvec_norm_asympt(
    inst: &ProblemInstance,
    j: usize,
    theta: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    if !j.is_multiple_of(2) || j < 2 || j > inst.n {
        return Err(Error::InvalidIndex {
            j,
            n: inst.n,
            reason: "the asymptotic norm is for even j",
        });
    }
    Ok((nu(&inst.alpha, theta, ctx) * inst.n as u64).sqrt())
}

/// `||v||_2` by direct summation.
pub fn euclidean_norm(v: &[Cplx], ctx: &PrecisionContext) -> Float {
    let mut acc = ctx.zero();
    for z in v {
        acc += z.norm_sqr();
    }
    acc.sqrt()
}

/// `L_{alpha,n} v` using the sparsity pattern of the Laplacian.
pub fn apply_laplacian(inst: &ProblemInstance, v: &[Cplx], ctx: &PrecisionContext) -> Vec<Cplx> {
    let n = inst.n;
    assert_eq!(v.len(), n, "dimension mismatch");
    let alpha = Cplx::new(ctx.round(inst.alpha.re()), ctx.round(inst.alpha.im()));
    let abar = alpha.conj();
    let two = ctx.float(2);
    let mut out = Vec::with_capacity(n);
    // row 1: (1 + conj a) v_1 - v_2 - conj a v_n
    out.push(v[0].add(&abar.mul(&v[0].sub(&v[n - 1]))).sub(&v[1]));
    for k in 1..n - 1 {
        out.push(v[k].scale(&two).sub(&v[k - 1]).sub(&v[k + 1]));
    }
    // row n: -a v_1 - v_(n-1) + (1 + a) v_n
    out.push(
        v[n - 1]
            .add(&alpha.mul(&v[n - 1].sub(&v[0])))
            .sub(&v[n - 2]),
    );
    out
}

/// `||L v - lambda v||_2`.
pub fn residual(
    inst: &ProblemInstance,
    lambda: &Float,
    v: &[Cplx],
    ctx: &PrecisionContext,
) -> Float {
    let lv = apply_laplacian(inst, v, ctx);
    let diff: Vec<Cplx> = lv
        .iter()
        .zip(v)
        .map(|(x, y)| x.sub(&y.scale(lambda)))
        .collect();
    euclidean_norm(&diff, ctx)
}

/// `lambda_{alpha,n,j}` for each `alpha`, by Newton. The values increase strictly
/// with `Re(alpha)`, from `g((j-1) pi / n)` towards `g(j pi / n)`.
pub fn alpha_sweep(
    n: usize,
    j: usize,
    alphas: &[AlphaParam],
    ctx: &PrecisionContext,
) -> Result<Vec<(Float, Float)>> {
    if alphas.windows(2).any(|w| w[0].re() >= w[1].re()) {
        return Err(Error::InvalidAlpha(
            "alphas must be sorted by strictly increasing real part".into(),
        ));
    }
    alphas
        .par_iter()
        .map(|a| {
            let r = solve_theta_newton(a, n, j, None, ctx, None)?;
            Ok((a.re().clone(), g(&r.root, ctx)))
        })
        .collect()
}

//! Reference eigenvalue computations that share nothing with the main-equation
//! solvers: cyclic Jacobi on the dense matrix, Gaussian-elimination
//! determinants, and root isolation on the characteristic polynomial.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::charpoly::{factor_q, MatrixDense, ProblemInstance};
use crate::error::{Error, Result};
use crate::numerics::{chebyshev_u, Cplx, PrecisionContext};

const JACOBI_MAX_SWEEPS: usize = 100;
const ORACLE_GUARD_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleBackend {
    JacobiRotations,
    CharpolyBisection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpectrum {
    /// Ascending.
    pub lambdas: Vec<Float>,
    pub backend: OracleBackend,
    /// Jacobi: final off-diagonal Frobenius norm. Bisection: widest final bracket.
    pub achieved_tol: Float,
}

fn oracle_tol(tol: Option<&Float>, ctx: &PrecisionContext) -> Result<Float> {
    match tol {
        None => Ok(ctx.default_tol()),
        Some(t) if t.is_finite() && *t > 0 => Ok(ctx.round(t)),
        Some(t) => Err(Error::PreconditionViolated(format!(
            "tolerance must be positive, got {}",
            t.to_f64()
        ))),
    }
}

fn sort_floats(v: &mut [Float]) {
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN eigenvalue"));
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps.
///
/// Sweeps stop once the off-diagonal Frobenius norm is at most `tol`
/// (default `2^(8 - bits)`).
pub fn dense_sym_eig(
    m: &MatrixDense,
    ctx: &PrecisionContext,
    tol: Option<&Float>,
) -> Result<OracleSpectrum> {
    let tol = oracle_tol(tol, ctx)?;
    let n = m.order();
    let p = ctx.bits();

    let mut asym = ctx.zero();
    for i in 0..n {
        for j in 0..n {
            let d = Float::with_val(p, &m.get(i, j).re - &m.get(j, i).re).abs();
            let im = Float::with_val(p, m.get(i, j).im.abs_ref());
            asym.max_mut(&d);
            asym.max_mut(&im);
        }
    }
    if asym > tol {
        return Err(Error::NotSymmetric(format!("{:.3e}", asym.to_f64())));
    }

    let mut a: Vec<Vec<Float>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Float::with_val(p, &m.get(i, j).re))
                .collect()
        })
        .collect();
    let tol2 = Float::with_val(p, tol.square_ref());

    let off_norm_sqr = |a: &[Vec<Float>]| {
        let mut s = Float::new(p);
        for (i, row) in a.iter().enumerate() {
            for x in row.iter().skip(i + 1) {
                s += Float::with_val(p, x.square_ref()) * 2u32;
            }
        }
        s
    };

    let mut off = off_norm_sqr(&a);
    let mut sweeps = 0;
    while off > tol2 {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for i in 0..n {
            for j in i + 1..n {
                if a[i][j].is_zero() {
                    continue;
                }
                rotate(&mut a, i, j, p);
            }
        }
        off = off_norm_sqr(&a);
    }

    let mut lambdas: Vec<Float> = (0..n).map(|i| a[i][i].clone()).collect();
    sort_floats(&mut lambdas);
    Ok(OracleSpectrum {
        lambdas,
        backend: OracleBackend::JacobiRotations,
        achieved_tol: off.sqrt(),
    })
}

/// One Jacobi rotation annihilating `a[i][j]`.
#[allow(clippy::needless_range_loop)]
fn rotate(a: &mut [Vec<Float>], i: usize, j: usize, p: u32) {
    let apq = a[i][j].clone();
    let theta = Float::with_val(p, &a[j][j] - &a[i][i]) / Float::with_val(p, &apq * 2u32);
    let root = (Float::with_val(p, theta.square_ref()) + 1u32).sqrt();
    let mut t = Float::with_val(p, theta.abs_ref()) + root;
    t.recip_mut();
    if theta.is_sign_negative() {
        t = -t;
    }
    let c = (Float::with_val(p, t.square_ref()) + 1u32).sqrt().recip();
    let s = Float::with_val(p, &t * &c);
    let shift = Float::with_val(p, &t * &apq);
    a[i][i] -= &shift;
    a[j][j] += &shift;
    a[i][j] = Float::new(p);
    a[j][i] = Float::new(p);
    for r in 0..a.len() {
        if r == i || r == j {
            continue;
        }
        let ri = Float::with_val(p, &c * &a[r][i]) - Float::with_val(p, &s * &a[r][j]);
        let rj = Float::with_val(p, &s * &a[r][i]) + Float::with_val(p, &c * &a[r][j]);
        a[i][r] = ri.clone();
        a[j][r] = rj.clone();
        a[r][i] = ri;
        a[r][j] = rj;
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn dense_det(m: &MatrixDense, ctx: &PrecisionContext) -> Cplx {
    let n = m.order();
    let p = ctx.bits();
    let mut a: Vec<Vec<Cplx>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    Cplx::new(
                        Float::with_val(p, &m.get(i, j).re),
                        Float::with_val(p, &m.get(i, j).im),
                    )
                })
                .collect()
        })
        .collect();
    let mut det = Cplx::real(ctx, 1);
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&x, &y| {
                a[x][k]
                    .norm_sqr()
                    .partial_cmp(&a[y][k].norm_sqr())
                    .expect("NaN entry")
            })
            .expect("non-empty range");
        if a[piv][k].is_zero() {
            return Cplx::zero(ctx);
        }
        if piv != k {
            a.swap(piv, k);
            det = det.neg();
        }
        det = det.mul(&a[k][k]);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            let f = row[k].div(&pivot_row[k]);
            for c in k + 1..n {
                row[c] = row[c].sub(&f.mul(&pivot_row[c]));
            }
        }
    }
    det
}

/// Bisection on `f` over `[lo, hi]` in `t`; `f(lo)` and `f(hi)` must have
/// opposite signs. Returns the midpoint of the final bracket as
/// `lambda = 4 - t^2` and the bracket width in `lambda`.
fn bisect_t<F>(f: F, mut lo: Float, mut hi: Float, tol: &Float, p: u32) -> (Float, Float)
where
    F: Fn(&Float) -> Float,
{
    let lo_sign = f(&lo).is_sign_negative();
    let lambda_width =
        |lo: &Float, hi: &Float| Float::with_val(p, hi - lo) * Float::with_val(p, hi + lo);
    for _ in 0..p + 64 {
        if lambda_width(&lo, &hi) <= *tol {
            break;
        }
        let mid = Float::with_val(p, &lo + &hi) / 2u32;
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(&mid);
        if v.is_zero() {
            lo = mid.clone();
            hi = mid;
            break;
        }
        if v.is_sign_negative() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let width = lambda_width(&lo, &hi);
    let t = Float::with_val(p, &lo + &hi) / 2u32;
    (4u32 - Float::with_val(p, t.square_ref()), width)
}

/// All eigenvalues of `L_{alpha,n}` from sign changes of the characteristic
/// polynomial factors in `t = sqrt(4 - lambda)`.
///
/// The factor `U_{n-1}(t/2)` alternates sign at `t = 2 cos((2k+1) pi / 2n)`,
/// and `q_{alpha,n}` alternates sign at `t = 2 cos(k pi / 2n)`, `k` even.
/// Every bracket is bisected until its width in `lambda` is at most `tol`.
pub fn charpoly_root_isolate(
    inst: &ProblemInstance,
    ctx: &PrecisionContext,
    tol: Option<&Float>,
) -> Result<OracleSpectrum> {
    let tol = oracle_tol(tol, ctx)?;
    let n = inst.n;
    let work = ctx.widened(ORACLE_GUARD_BITS);
    let p = work.bits();
    let two_n = 2 * n as i64;
    let mesh = |k: i64| work.pi_ratio(k, two_n).cos() * 2u32;

    let mut lambdas = vec![ctx.zero()];
    let mut achieved = ctx.zero();

    // U_{n-1}(t/2) vanishes at t = 2 cos(2k pi / 2n); bracket with odd neighbours.
    let u = |t: &Float| chebyshev_u(n as i64 - 1, &Float::with_val(p, t / 2u32), &work);
    let mut k = 2;
    while k < n as i64 {
        let (lam, w) = bisect_t(u, mesh(k + 1), mesh(k - 1), &tol, p);
        lambdas.push(lam);
        achieved.max_mut(&w);
        k += 2;
    }

    // q changes sign between t = 2 cos((j-2) pi / 2n) and 2 cos(j pi / 2n), j even.
    let inst_work = inst.clone();
    let q = |t: &Float| factor_q(&inst_work, t, &work);
    let mut j = 2;
    while j <= n as i64 {
        let (lam, w) = bisect_t(q, mesh(j), mesh(j - 2), &tol, p);
        lambdas.push(lam);
        achieved.max_mut(&w);
        j += 2;
    }

    let mut lambdas: Vec<Float> = lambdas.iter().map(|x| ctx.round(x)).collect();
    sort_floats(&mut lambdas);
    Ok(OracleSpectrum {
        lambdas,
        backend: OracleBackend::CharpolyBisection,
        achieved_tol: ctx.round(&achieved),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::{build_a, build_l, charpoly_a, CornerPerturbation};
    use crate::numerics::g;
    use crate::symbolfns::AlphaParam;

    fn ctx(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    fn real_matrix(rows: &[&[f64]], c: &PrecisionContext) -> MatrixDense {
        let mut m = MatrixDense::zeros(rows.len(), c);
        for (i, r) in rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, Cplx::real(c, *x));
            }
        }
        m
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        Float::with_val(a.prec(), a - b).abs().to_f64() <= tol
    }

    #[test]
    fn jacobi_diagonal() {
        let c = ctx(64);
        let m = real_matrix(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]], &c);
        let s = dense_sym_eig(&m, &c, None).unwrap();
        let got: Vec<f64> = s.lambdas.iter().map(Float::to_f64).collect();
        assert_eq!(got, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn jacobi_two_by_two() {
        let c = ctx(64);
        let m = real_matrix(&[&[2.0, -1.0], &[-1.0, 2.0]], &c);
        let s = dense_sym_eig(&m, &c, None).unwrap();
        assert!(close(&s.lambdas[0], &c.float(1), 1e-17));
        assert!(close(&s.lambdas[1], &c.float(3), 1e-17));
    }

    #[test]
    fn jacobi_rejects_asymmetric() {
        let c = ctx(64);
        let m = real_matrix(&[&[2.0, -1.0], &[0.5, 2.0]], &c);
        assert!(matches!(
            dense_sym_eig(&m, &c, None),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn jacobi_trace() {
        let c = ctx(200);
        let inst = ProblemInstance::new(AlphaParam::ratio(1, 3, &c).unwrap(), 12).unwrap();
        let m = build_l(&inst, &c);
        let s = dense_sym_eig(&m, &c, None).unwrap();
        let sum = s.lambdas.iter().fold(c.zero(), |acc, x| acc + x);
        let trace = (0..12).fold(c.zero(), |acc, i| acc + &m.get(i, i).re);
        assert!(close(&sum, &trace, 1e-50));
    }

    #[test]
    fn det_identity() {
        let c = ctx(64);
        let mut m = MatrixDense::zeros(5, &c);
        for i in 0..5 {
            m.set(i, i, Cplx::real(&c, 1));
        }
        let d = dense_det(&m, &c);
        assert_eq!(d.re.to_f64(), 1.0);
        assert!(d.im.is_zero());
    }

    #[test]
    fn det_matches_charpoly_a() {
        let c = ctx(200);
        let z = |re: f64, im: f64| Cplx::new(c.float(re), c.float(im));
        let cp = CornerPerturbation::new(z(0.3, -0.2), z(1.1, 0.4), z(-0.7, 0.05), z(0.25, 0.9));
        let a = build_a(&cp, 6, &c).unwrap();
        let lambda = z(1.37, -0.41);
        let det = dense_det(&a.shifted_negative(&lambda), &c);
        let poly = charpoly_a(&cp, 6, &lambda, &c);
        assert!(det.sub(&poly).abs().to_f64() < 1e-50 * (1.0 + poly.abs().to_f64()));
    }

    #[test]
    fn det_singular_laplacian() {
        let c = ctx(128);
        let inst = ProblemInstance::new(AlphaParam::ratio(2, 7, &c).unwrap(), 7).unwrap();
        let m = build_l(&inst, &c);
        assert!(dense_det(&m, &c).abs().to_f64() < 1e-30);
    }

    #[test]
    fn isolate_half() {
        let c = ctx(128);
        let inst = ProblemInstance::new(AlphaParam::ratio(1, 2, &c).unwrap(), 6).unwrap();
        let s = charpoly_root_isolate(&inst, &c, None).unwrap();
        let mut want: Vec<Float> = [0, 2, 4]
            .iter()
            .map(|&k| g(&c.pi_ratio(k, 6), &c))
            .collect();
        want.extend([2, 4, 6].iter().map(|&k| g(&c.pi_ratio(k, 7), &c)));
        sort_floats(&mut want);
        assert_eq!(s.lambdas.len(), 6);
        assert!(s.lambdas[0].is_zero());
        for (x, y) in s.lambdas.iter().zip(&want) {
            assert!(close(x, y, 1e-33), "{x} vs {y}");
        }
    }

    #[test]
    fn backends_agree() {
        let c = ctx(200);
        let tol = c.pow2(-170);
        for (p, q, n) in [(1, 3, 10), (4, 5, 9), (1, 10, 16), (7, 9, 24)] {
            let inst = ProblemInstance::new(AlphaParam::ratio(p, q, &c).unwrap(), n).unwrap();
            let jac = dense_sym_eig(&build_l(&inst, &c), &c, Some(&tol)).unwrap();
            let bis = charpoly_root_isolate(&inst, &c, Some(&tol)).unwrap();
            let bound =
                Float::with_val(200, jac.achieved_tol.max_ref(&bis.achieved_tol)).to_f64() * 10.0;
            for (x, y) in jac.lambdas.iter().zip(&bis.lambdas) {
                assert!(
                    close(x, y, bound.max(1e-50)),
                    "alpha={p}/{q} n={n}: {x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn isolate_uses_real_part() {
        let c = ctx(128);
        let z = AlphaParam::new(c.ratio(2, 5), c.float(0.7), &c).unwrap();
        let a = AlphaParam::ratio(2, 5, &c).unwrap();
        let sz = charpoly_root_isolate(&ProblemInstance::new(z, 11).unwrap(), &c, None).unwrap();
        let sa = charpoly_root_isolate(&ProblemInstance::new(a, 11).unwrap(), &c, None).unwrap();
        assert_eq!(sz.lambdas, sa.lambdas);
    }
}

//! Characteristic polynomials and Chebyshev-form eigenvectors.
//!
//! `A_n` is the tridiagonal Toeplitz matrix with symbol `2 - 2cos x` whose
//! four corners are replaced: `(1,1) = 2 - delta`, `(1,n) = -epsilon`,
//! `(n,1) = -sigma`, `(n,n) = 2 - tau`. The cycle Laplacian `L_{alpha,n}` is the
//! special case `delta = 1 - conj(alpha)`, `epsilon = conj(alpha)`,
//! `sigma = alpha`, `tau = 1 - alpha`.

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{chebyshev_t, chebyshev_u_table_complex, Cplx, PrecisionContext};
use crate::symbolfns::AlphaParam;

/// Corner replacements `(delta, epsilon, sigma, tau)` of `A_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerPerturbation {
    pub delta: Cplx,
    pub epsilon: Cplx,
    pub sigma: Cplx,
    pub tau: Cplx,
}

impl CornerPerturbation {
    pub fn new(delta: Cplx, epsilon: Cplx, sigma: Cplx, tau: Cplx) -> Self {
        Self {
            delta,
            epsilon,
            sigma,
            tau,
        }
    }

    pub fn real(delta: Float, epsilon: Float, sigma: Float, tau: Float) -> Self {
        Self::new(
            Cplx::from_real(delta),
            Cplx::from_real(epsilon),
            Cplx::from_real(sigma),
            Cplx::from_real(tau),
        )
    }

    /// The perturbation that turns `A_n` into `L_{alpha,n}`.
    pub fn laplacian(alpha: &AlphaParam, ctx: &PrecisionContext) -> Self {
        let a = Cplx::new(ctx.round(alpha.re()), ctx.round(alpha.im()));
        let one = Cplx::real(ctx, 1);
        let abar = a.conj();
        Self {
            delta: one.sub(&abar),
            epsilon: abar,
            sigma: a.clone(),
            tau: one.sub(&a),
        }
    }
}

/// The pair `(alpha, n)` defining `L_{alpha,n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub alpha: AlphaParam,
    pub n: usize,
}

impl ProblemInstance {
    pub fn new(alpha: AlphaParam, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidOrder(n));
        }
        Ok(Self { alpha, n })
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDense {
    n: usize,
    entries: Vec<Cplx>,
}

impl MatrixDense {
    pub fn zeros(n: usize, ctx: &PrecisionContext) -> Self {
        Self {
            n,
            entries: vec![Cplx::zero(ctx); n * n],
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    /// Zero-based entry access.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Cplx {
        &self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Cplx) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im.is_zero())
    }

    /// Real parts, row-major.
    pub fn real_parts(&self) -> Vec<Float> {
        self.entries.iter().map(|z| z.re.clone()).collect()
    }

    pub fn matvec(&self, v: &[Cplx]) -> Vec<Cplx> {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        let prec = v.first().map_or(53, Cplx::prec);
        let mut tmp = Float::new(prec);
        (0..self.n)
            .map(|i| {
                let mut acc = Cplx::new(Float::new(prec), Float::new(prec));
                for (a, x) in self.entries[i * self.n..(i + 1) * self.n].iter().zip(v) {
                    if !a.is_zero() {
                        Cplx::mul_add_into(&mut acc, a, x, &mut tmp);
                    }
                }
                acc
            })
            .collect()
    }

    /// `lambda I - self`.
    pub fn shifted_negative(&self, lambda: &Cplx) -> Self {
        let mut out = self.clone();
        for (k, z) in out.entries.iter_mut().enumerate() {
            *z = if k / self.n == k % self.n {
                lambda.sub(z)
            } else {
                z.neg()
            };
        }
        out
    }
}

fn base_tridiagonal(n: usize, ctx: &PrecisionContext) -> MatrixDense {
    let mut m = MatrixDense::zeros(n, ctx);
    for i in 0..n {
        m.set(i, i, Cplx::real(ctx, 2));
        if i + 1 < n {
            m.set(i, i + 1, Cplx::real(ctx, -1));
            m.set(i + 1, i, Cplx::real(ctx, -1));
        }
    }
    m
}

/// Dense `A_n`.
pub fn build_a(cp: &CornerPerturbation, n: usize, ctx: &PrecisionContext) -> Result<MatrixDense> {
    if n < 3 {
        return Err(Error::InvalidOrder(n));
    }
    let two = Cplx::real(ctx, 2);
    let mut m = base_tridiagonal(n, ctx);
    m.set(0, 0, two.sub(&cp.delta));
    m.set(0, n - 1, cp.epsilon.neg());
    m.set(n - 1, 0, cp.sigma.neg());
    m.set(n - 1, n - 1, two.sub(&cp.tau));
    Ok(m)
}

/// Dense `L_{alpha,n}`.
pub fn build_l(inst: &ProblemInstance, ctx: &PrecisionContext) -> MatrixDense {
    build_a(
        &CornerPerturbation::laplacian(&inst.alpha, ctx),
        inst.n,
        ctx,
    )
    .expect("ProblemInstance guarantees n >= 3")
}

fn shifted_argument(lambda: &Cplx, ctx: &PrecisionContext) -> Cplx {
    let p = ctx.bits();
    Cplx::new(
        Float::with_val(p, &lambda.re - 2u32) / 2u32,
        Float::with_val(p, &lambda.im / 2u32),
    )
}

/// `det(lambda I - A_n)` through Chebyshev polynomials of `(lambda - 2)/2`.
pub fn charpoly_a(
    cp: &CornerPerturbation,
    n: usize,
    lambda: &Cplx,
    ctx: &PrecisionContext,
) -> Cplx {
    assert!(n >= 3, "n must be at least 3");
    let u = chebyshev_u_table_complex(n, &shifted_argument(lambda, ctx), ctx);
    // u[k] = U_{k-1}
    let sum = cp.delta.add(&cp.tau);
    let cross = cp.delta.mul(&cp.tau).sub(&cp.epsilon.mul(&cp.sigma));
    let corner = cp.epsilon.add(&cp.sigma);
    let mut d = u[n + 1].add(&sum.mul(&u[n])).add(&cross.mul(&u[n - 1]));
    d = if n.is_multiple_of(2) {
        d.sub(&corner)
    } else {
        d.add(&corner)
    };
    d
}

/// `det(lambda I - L_{alpha,n})` for complex `lambda`. Depends on `Re(alpha)` only.
pub fn charpoly_l(inst: &ProblemInstance, lambda: &Cplx, ctx: &PrecisionContext) -> Cplx {
    let n = inst.n;
    let u = chebyshev_u_table_complex(n, &shifted_argument(lambda, ctx), ctx);
    let re = ctx.round(inst.alpha.re());
    let two_re = Float::with_val(ctx.bits(), &re * 2u32);
    let lead = Cplx::new(
        Float::with_val(ctx.bits(), &lambda.re - &two_re),
        lambda.im.clone(),
    );
    let mut d = lead.mul(&u[n]).sub(&u[n - 1].scale(&two_re));
    if n.is_multiple_of(2) {
        d.re -= &two_re;
    } else {
        d.re += &two_re;
    }
    d
}

/// Real-argument version of [`charpoly_l`].
pub fn charpoly_l_real(inst: &ProblemInstance, lambda: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let n = inst.n;
    let two_t = Float::with_val(p, lambda - 2u32);
    let (mut prev, mut cur) = (ctx.zero(), ctx.float(1));
    // after the loop: prev = U_{n-2}, cur = U_{n-1}
    for _ in 0..n - 1 {
        let next = Float::with_val(p, &two_t * &cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    let two_re = Float::with_val(p, inst.alpha.re() * 2u32);
    let d = Float::with_val(p, lambda - &two_re) * cur - Float::with_val(p, &two_re * &prev);
    if n.is_multiple_of(2) {
        d - two_re
    } else {
        d + two_re
    }
}

/// `charpoly_l(g(x))` in the trigonometric product form; undefined at `x = pi`.
pub fn charpoly_l_trig(inst: &ProblemInstance, x: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let n = inst.n as u64;
    let re = inst.alpha.re();
    let (s1, c1) = Float::with_val(p, x / 2u32).sin_cos(Float::new(p));
    let (sn, cn) = (Float::with_val(p, x * n) / 2u32).sin_cos(Float::new(p));
    let bracket = Float::with_val(p, 1 - re) * &cn + Float::with_val(p, re * &c1) * &sn / &s1;
    let out = s1 * &sn * 4u32 / c1 * bracket;
    if inst.n.is_multiple_of(2) {
        -out
    } else {
        out
    }
}

/// `p_n(t) = (t^2 - 4) U_{n-1}(t/2)`.
pub fn factor_p(n: usize, t: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let half = Float::with_val(p, t / 2u32);
    let u = crate::numerics::chebyshev_u(n as i64 - 1, &half, ctx);
    (Float::with_val(p, t.square_ref()) - 4u32) * u
}

/// `q_{alpha,n}(t) = (1 - a) T_n(t/2) + a (t/2) U_{n-1}(t/2)` with `a = Re(alpha)`.
pub fn factor_q(inst: &ProblemInstance, t: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let re = inst.alpha.re();
    let half = Float::with_val(p, t / 2u32);
    let tn = chebyshev_t(inst.n, &half, ctx);
    let u = crate::numerics::chebyshev_u(inst.n as i64 - 1, &half, ctx);
    Float::with_val(p, 1 - re) * tn + Float::with_val(p, re * &half) * u
}

fn boundary_tolerance(ctx: &PrecisionContext) -> Float {
    ctx.pow2(24 - ctx.bits() as i32)
}

fn near(z: &Cplx, target: u32, tol: &Float) -> bool {
    let p = z.prec();
    let d = Cplx::new(Float::with_val(p, &z.re - target), z.im.clone());
    d.abs() <= *tol
}

fn sup_norm(v: &[Cplx]) -> Float {
    v.iter()
        .map(Cplx::abs)
        .fold(Float::new(v[0].prec()), |m, x| if x > m { x } else { m })
}

/// An eigenvector of `A_n` for the eigenvalue `lambda`.
///
/// Tries the `(delta, epsilon)` Chebyshev form first and falls back to the
/// `(sigma, tau)` form when the first one vanishes numerically.
pub fn eigvec_a(
    cp: &CornerPerturbation,
    n: usize,
    lambda: &Cplx,
    ctx: &PrecisionContext,
) -> Result<Vec<Cplx>> {
    if n < 3 {
        return Err(Error::InvalidOrder(n));
    }
    let tol = boundary_tolerance(ctx);
    let one = Cplx::real(ctx, 1);
    if near(lambda, 0, &tol) {
        if near(&cp.delta.add(&cp.epsilon), 1, &tol) && near(&cp.sigma.add(&cp.tau), 1, &tol) {
            return Ok(vec![one; n]);
        }
        return Err(Error::EigenvalueAtBoundary("0".into()));
    }
    if near(lambda, 4, &tol) {
        let (de, st) = if n.is_multiple_of(2) {
            (cp.delta.add(&cp.epsilon), cp.sigma.sub(&cp.tau))
        } else {
            (cp.delta.sub(&cp.epsilon), cp.sigma.neg().sub(&cp.tau))
        };
        if near(&de, 1, &tol) && near(&st, 1, &tol) {
            return Ok((1..=n)
                .map(|k| if k % 2 == 0 { one.clone() } else { one.neg() })
                .collect());
        }
        return Err(Error::EigenvalueAtBoundary("4".into()));
    }

    let u = chebyshev_u_table_complex(n, &shifted_argument(lambda, ctx), ctx);
    let at = |m: i64| &u[(m + 1) as usize];
    let flip = |z: Cplx, odd: bool| if odd { z.neg() } else { z };
    let n_odd = n % 2 == 1;
    let threshold = Float::with_val(ctx.bits(), ctx.pow2(-(ctx.bits() as i32) / 2) * n as u64);

    let ab: Vec<Cplx> = (1..=n as i64)
        .map(|k| {
            let tail = flip(cp.epsilon.mul(at(n as i64 - k - 1)), n_odd);
            let z = at(k - 1).add(&cp.delta.mul(at(k - 2))).add(&tail);
            flip(z, k % 2 == 0)
        })
        .collect();
    if sup_norm(&ab) > threshold {
        return Ok(ab);
    }
    let cd: Vec<Cplx> = (1..=n as i64)
        .map(|k| {
            let tail = flip(
                cp.tau.mul(at(n as i64 - k - 1)).add(at(n as i64 - k)),
                n_odd,
            );
            let z = cp.sigma.mul(at(k - 2)).add(&tail);
            flip(z, k % 2 == 0)
        })
        .collect();
    if sup_norm(&cd) > threshold {
        return Ok(cd);
    }
    Err(Error::DegenerateCase)
}

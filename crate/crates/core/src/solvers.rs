//! Root finders for the main equation `h(x) = n x - (j-1) pi - eta(x) = 0` on
//! `I_{n,j} = [(j-1) pi / n, j pi / n]`, plus a generic Newton engine for
//! monotone convex or concave functions.
//!
//! Every report carries an a-priori error certificate. Certificates are
//! mathematical bounds on the exact iteration; `ROUNDING_FLOOR_BITS` worth of
//! unit roundoff is added to cover the floating-point evaluation itself.

use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Assign, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Angle, PrecisionContext};
use crate::symbolfns::{d_nj, eta, eta_with_prime, h_main, AlphaParam};

/// Extra mantissa bits carried internally by the main-equation solvers.
const GUARD_BITS: u32 = 32;

/// The rounding allowance added to every certificate is `2^(5 - bits)`,
/// i.e. 16 units of roundoff.
const ROUNDING_FLOOR_BITS: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Bisection,
    FixedPoint,
    Newton,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bisection => "bisection",
            Method::FixedPoint => "fixed-point",
            Method::Newton => "newton",
        })
    }
}

/// Declared curvature for [`newton_convex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Convex,
    Concave,
}

/// `I_{n,j}`: `h` is negative at `lo` and positive at `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketInterval {
    pub lo: Angle,
    pub hi: Angle,
}

impl BracketInterval {
    pub fn new(n: usize, j: usize, ctx: &PrecisionContext) -> Result<Self> {
        check_index(n, j)?;
        Ok(Self {
            lo: Angle::new(d_nj(n, j, ctx), ctx)?,
            hi: Angle::new(ctx.pi_ratio(j as i64, n as i64), ctx)?,
        })
    }

    pub fn contains(&self, x: &Float) -> bool {
        x >= self.lo.value() && x <= self.hi.value()
    }

    pub fn width(&self) -> Float {
        Float::with_val(self.lo.value().prec(), self.hi.value() - self.lo.value())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub root: Float,
    pub iterations: usize,
    pub method: Method,
    /// A-priori bound on `|root - theta|` plus the rounding allowance.
    pub certified_error: Float,
    /// `|h(root)|`, or `|f(root)|` for [`newton_convex`].
    pub residual: Float,
    /// Newton iterates `y_0, ..., y_m`; empty for the other methods.
    pub trace: Vec<Float>,
}

/// Rejects `n < 3` and odd or out-of-range `j`.
pub fn check_index(n: usize, j: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidOrder(n));
    }
    if j < 2 || j > n {
        return Err(Error::InvalidIndex {
            j,
            n,
            reason: "need 2 <= j <= n",
        });
    }
    if !j.is_multiple_of(2) {
        return Err(Error::InvalidIndex {
            j,
            n,
            reason: "odd indices have closed forms; the solvers take even j",
        });
    }
    Ok(())
}

fn rounding_floor(ctx: &PrecisionContext) -> Float {
    ctx.pow2(ROUNDING_FLOOR_BITS - ctx.bits() as i32)
}

/// `2^log2` as a float, flushed to zero far below the working precision.
fn exp2_f64(log2: f64, ctx: &PrecisionContext) -> Float {
    if log2 < -(ctx.bits() as f64) - 64.0 {
        return ctx.zero();
    }
    // pad by one part in 2^40 for the double-precision logarithms
    Float::with_val(ctx.bits(), log2 + 2f64.powi(-40) * log2.abs().max(1.0)).exp2()
}

fn log2_f(x: &Float) -> f64 {
    crate::numerics::log10_abs(x) * std::f64::consts::LOG2_10
}

fn closed_form_report(n: usize, j: usize, method: Method, ctx: &PrecisionContext) -> SolveReport {
    SolveReport {
        root: ctx.pi_ratio(j as i64, n as i64 + 1),
        iterations: 0,
        method,
        certified_error: rounding_floor(ctx),
        residual: ctx.zero(),
        trace: Vec::new(),
    }
}

fn residual_at(a: &AlphaParam, n: usize, j: usize, x: &Float, ctx: &PrecisionContext) -> Float {
    h_main(a, n, j, x, ctx).abs()
}

fn start_point(
    bracket: &BracketInterval,
    y0: Option<&Float>,
    ctx: &PrecisionContext,
) -> Result<Float> {
    match y0 {
        None => Ok(ctx.round(bracket.lo.value())),
        Some(y) if bracket.contains(y) => Ok(ctx.round(y)),
        Some(y) => Err(Error::PreconditionViolated(format!(
            "initial point {} outside [{}, {}]",
            y.to_f64(),
            bracket.lo,
            bracket.hi
        ))),
    }
}

fn resolve_tol(tol: Option<&Float>, ctx: &PrecisionContext) -> Result<Float> {
    match tol {
        None => Ok(ctx.default_tol()),
        Some(t) if t.is_finite() && *t > 0 => Ok(ctx.round(t)),
        Some(t) => Err(Error::PreconditionViolated(format!(
            "tolerance must be positive, got {}",
            t.to_f64()
        ))),
    }
}

// ---------------------------------------------------------------------------
// generic Newton

/// Newton's method for an increasing convex (or concave) `f` on `[a, b]`.
///
/// For a convex `f` started right of the root the iterates decrease
/// monotonically and `|y_m - root| <= (b - a) (1 - f'(a)/f'(b))^m`. A start
/// left of the root is accepted when `a - f(a)/f'(a) <= b` holds there, and
/// costs one extra step in the bound. Concave functions go through the
/// reflection `x -> -f(-x)`.
#[allow(clippy::too_many_arguments)]
pub fn newton_convex<F, D>(
    f: F,
    f_prime: D,
    a: &Float,
    b: &Float,
    y0: &Float,
    shape: Shape,
    max_iter: usize,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<SolveReport>
where
    F: Fn(&Float) -> Float,
    D: Fn(&Float) -> Float,
{
    newton_convex_dyn(&f, &f_prime, a, b, y0, shape, max_iter, tol, ctx)
}

type RealFn<'a> = &'a dyn Fn(&Float) -> Float;

#[allow(clippy::too_many_arguments)]
fn newton_convex_dyn(
    f: RealFn<'_>,
    f_prime: RealFn<'_>,
    a: &Float,
    b: &Float,
    y0: &Float,
    shape: Shape,
    max_iter: usize,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<SolveReport> {
    if shape == Shape::Concave {
        let g = |x: &Float| -f(&(-x.clone()));
        let gp = |x: &Float| f_prime(&(-x.clone()));
        let neg = |x: &Float| -x.clone();
        let out = newton_convex_dyn(
            &g,
            &gp,
            &neg(b),
            &neg(a),
            &neg(y0),
            Shape::Convex,
            max_iter,
            tol,
            ctx,
        );
        let flip = |mut r: SolveReport| {
            r.root = -r.root;
            r.trace.iter_mut().for_each(|y| *y = -y.clone());
            r
        };
        return match out {
            Ok(r) => Ok(flip(r)),
            Err(Error::NoProgress { report }) => Err(Error::NoProgress {
                report: Box::new(flip(*report)),
            }),
            Err(e) => Err(e),
        };
    }

    let p = ctx.bits();
    if a >= b {
        return Err(Error::PreconditionViolated("empty bracket".into()));
    }
    if y0 < a || y0 > b {
        return Err(Error::PreconditionViolated(
            "start point outside the bracket".into(),
        ));
    }
    let fa = f(a);
    let fb = f(b);
    if fa.is_sign_positive() && !fa.is_zero() && fb.is_sign_positive() && !fb.is_zero()
        || fa.is_sign_negative() && !fa.is_zero() && fb.is_sign_negative() && !fb.is_zero()
    {
        return Err(Error::PreconditionViolated(
            "f(a) and f(b) have the same sign".into(),
        ));
    }
    let fpa = f_prime(a);
    let fpb = f_prime(b);
    if fpa <= 0 || fpb <= 0 {
        return Err(Error::PreconditionViolated(
            "f' must be positive on the bracket".into(),
        ));
    }

    let mut y = ctx.round(y0);
    let mut fy = f(&y);
    let wrong_side = fy < 0;
    if wrong_side {
        let fp = f_prime(&y);
        if fp <= 0 {
            return Err(Error::PreconditionViolated(
                "f' <= 0 at the start point".into(),
            ));
        }
        let landing = Float::with_val(p, &y - Float::with_val(p, &fy / &fp));
        if landing > *b {
            return Err(Error::PreconditionViolated(
                "wrong-side start: a - f(a)/f'(a) exceeds b".into(),
            ));
        }
    }

    let mut trace = vec![y.clone()];
    let mut m = 0usize;
    let mut converged = false;
    while m < max_iter {
        if Float::with_val(p, fy.abs_ref()) <= *tol {
            converged = true;
            break;
        }
        let fp = f_prime(&y);
        if fp <= 0 {
            return Err(Error::PreconditionViolated(format!(
                "f' <= 0 at iterate {m}"
            )));
        }
        let step = Float::with_val(p, &fy / &fp);
        y -= &step;
        m += 1;
        trace.push(y.clone());
        fy = f(&y);
        if step.abs() <= *tol {
            converged = true;
            break;
        }
    }

    let rate = Float::with_val(p, 1 - Float::with_val(p, &fpa / &fpb));
    let good_steps = m.saturating_sub(wrong_side as usize);
    let width = Float::with_val(p, b - a);
    let bound = if rate <= 0 {
        if good_steps > 0 {
            ctx.zero()
        } else {
            width
        }
    } else {
        width * Float::with_val(p, rate.pow(good_steps as u32 as i32))
    };
    let report = SolveReport {
        root: y,
        iterations: m,
        method: Method::Newton,
        certified_error: bound + rounding_floor(ctx),
        residual: fy.abs(),
        trace,
    };
    if converged {
        Ok(report)
    } else {
        Err(Error::NoProgress {
            report: Box::new(report),
        })
    }
}

use rug::ops::Pow;

// ---------------------------------------------------------------------------
// Newton on the main equation

/// Smallest `m` with `m > (p + log2(pi / 2n)) / log2(1/gamma) + 1`, enough
/// for `p` correct bits from the linear rate alone.
pub fn newton_step_bound(a: &AlphaParam, n: usize, p_bits: u32, ctx: &PrecisionContext) -> usize {
    let gamma = a.gamma(n, ctx).to_f64();
    if gamma <= 0.0 {
        return 1;
    }
    let num = p_bits as f64 + (std::f64::consts::PI / (2.0 * n as f64)).log2();
    let m = num / (1.0 / gamma).log2() + 1.0;
    (m.max(0.0).floor() as usize) + 1
}

/// `min((pi/n) gamma^(m-1), (pi/n) (pi K2 / 2n^2)^(2^m - 1))`, the second
/// term only when `n > sqrt(pi K2 / 2)`.
pub fn newton_certified_error(a: &AlphaParam, n: usize, m: usize, ctx: &PrecisionContext) -> Float {
    let width = ctx.pi_ratio(1, n as i64);
    if m == 0 {
        return width;
    }
    let gamma = a.gamma(n, ctx);
    let linear = if gamma.is_zero() {
        if m == 1 {
            width.clone()
        } else {
            ctx.zero()
        }
    } else {
        exp2_f64(log2_f(&width) + (m - 1) as f64 * log2_f(&gamma), ctx)
    };
    let k2 = a.k2(ctx);
    let ratio = Float::with_val(ctx.bits(), &k2 * ctx.pi()) / (2 * (n as u64) * (n as u64));
    let quadratic = if ratio.is_zero() {
        Some(ctx.zero())
    } else if ratio < 1 {
        let steps = if m >= 62 {
            f64::INFINITY
        } else {
            ((1u64 << m) - 1) as f64
        };
        Some(exp2_f64(log2_f(&width) + steps * log2_f(&ratio), ctx))
    } else {
        None
    };
    match quadratic {
        Some(q) if q < linear => q,
        _ => linear,
    }
}

#[allow(clippy::too_many_arguments)]
fn newton_iterate(
    a: &AlphaParam,
    n: usize,
    j: usize,
    bracket: &BracketInterval,
    y0: Float,
    steps: usize,
    tol: Option<&Float>,
    work: &PrecisionContext,
) -> (Float, usize, Vec<Float>) {
    let p = work.bits();
    let lo = work.round(bracket.lo.value());
    let hi = work.round(bracket.hi.value());
    let offset = work.pi() * (j as u64 - 1);
    let n_tol = tol.map(|t| Float::with_val(p, t * n as u64));
    let mut y = work.round(&y0);
    let mut trace = vec![y.clone()];
    let mut m = 0usize;
    while m < steps {
        let (e, ep) = eta_with_prime(a, &y, work);
        let h = Float::with_val(p, &y * n as u64) - &offset - e;
        if let Some(nt) = &n_tol {
            if Float::with_val(p, h.abs_ref()) <= *nt {
                break;
            }
        }
        let hp = work.float(n as u64) - ep;
        let step = h / hp;
        y -= &step;
        // the exact iterates never leave the closed interval
        if y < lo {
            y.assign(&lo);
        } else if y > hi {
            y.assign(&hi);
        }
        m += 1;
        trace.push(y.clone());
        if let Some(t) = tol {
            if step.abs() <= *t {
                break;
            }
        }
    }
    (y, m, trace)
}

/// Newton's method on `h` from `y0` (default `(j-1) pi / n`).
///
/// Stops once a step or `|h|/n` falls below `tol` (default `2^(8-bits)`), and
/// never runs past [`newton_step_bound`]. Converges for every `n >= 3`.
pub fn solve_theta_newton(
    a: &AlphaParam,
    n: usize,
    j: usize,
    y0: Option<&Float>,
    ctx: &PrecisionContext,
    tol: Option<&Float>,
) -> Result<SolveReport> {
    let bracket = BracketInterval::new(n, j, ctx)?;
    let y0 = start_point(&bracket, y0, ctx)?;
    let tol = resolve_tol(tol, ctx)?;
    let p_bits = log2_f(&tol).abs().ceil() as u32;
    let cap = newton_step_bound(a, n, p_bits, ctx).max(2);
    let work = ctx.widened(GUARD_BITS);
    let (y, m, trace) = newton_iterate(a, n, j, &bracket, y0, cap, Some(&tol), &work);
    let root = ctx.round(&y);
    Ok(SolveReport {
        residual: residual_at(a, n, j, &root, ctx),
        certified_error: newton_certified_error(a, n, m, ctx) + rounding_floor(ctx),
        root,
        iterations: m,
        method: Method::Newton,
        trace: trace.iter().map(|t| ctx.round(t)).collect(),
    })
}

/// Exactly `steps` Newton steps from `y0` (default `(j-1) pi / n`), with no
/// stopping test.
pub fn newton_fixed_steps(
    a: &AlphaParam,
    n: usize,
    j: usize,
    y0: Option<&Float>,
    steps: usize,
    ctx: &PrecisionContext,
) -> Result<SolveReport> {
    let bracket = BracketInterval::new(n, j, ctx)?;
    let y0 = start_point(&bracket, y0, ctx)?;
    let work = ctx.widened(GUARD_BITS);
    let (y, m, trace) = newton_iterate(a, n, j, &bracket, y0, steps, None, &work);
    let root = ctx.round(&y);
    Ok(SolveReport {
        residual: residual_at(a, n, j, &root, ctx),
        certified_error: newton_certified_error(a, n, m, ctx) + rounding_floor(ctx),
        root,
        iterations: m,
        method: Method::Newton,
        trace: trace.iter().map(|t| ctx.round(t)).collect(),
    })
}

// ---------------------------------------------------------------------------
// bisection

// On I_{n,j} put s = x/2 and u = (n x - (j-1) pi)/2, both in [0, pi/2]. Then
//   h(x) > 0  iff  sin u sin s > kappa cos u cos s
//             iff  (1 - kappa) cos(u - s) > (1 + kappa) cos(u + s).
// The vectors a = (1 - kappa) e^{i(u-s)} and b = (1 + kappa) e^{i(u+s)} turn by
// fixed angles when x moves by (pi/n) 2^-k, so each step is two rotations by
// tabulated angles. After k steps the rotations only touch the low bits, so the
// vectors are refreshed every BISECT_BLOCK steps at a precision just ahead of k
// and every product is computed to the few hundred bits that matter.

const BISECT_BLOCK: usize = 256;
const BISECT_BLOCK_GUARD: usize = 96;
const ROTATION_CACHE_CAP: usize = 8;

/// `sin(base 2^-(k+1))` and `1 - cos(base 2^-(k+1))` for `k = 0..len`.
struct RotationTable {
    sin: Vec<Float>,
    vers: Vec<Float>,
}

impl RotationTable {
    fn new(base: &Float, len: usize, prec: u32) -> Self {
        let (mut s, mut c) = Float::with_val(prec, base).sin_cos(Float::new(prec));
        let mut halves = Vec::with_capacity(len + 1);
        for _ in 0..=len {
            // cos(t/2) = sqrt((1 + cos t)/2), sin(t/2) = sin t / (2 cos(t/2))
            c = (c + 1u32) / 2u32;
            c.sqrt_mut();
            s /= Float::with_val(prec, &c * 2u32);
            halves.push(s.clone());
        }
        // entry k only ever feeds products with about prec - k significant bits
        let keep = |k: usize| (prec as i64 - k as i64 + 80).clamp(64, prec as i64) as u32;
        let sin = (0..len)
            .map(|k| Float::with_val(keep(k), &halves[k]))
            .collect();
        // 1 - cos t = 2 sin^2(t/2)
        let vers = (0..len)
            .map(|k| Float::with_val(keep(k), halves[k + 1].square_ref()) * 2u32)
            .collect();
        Self { sin, vers }
    }
}

type RotationPair = Arc<(RotationTable, RotationTable)>;
type RotationCache = Mutex<Vec<((u32, usize), RotationPair)>>;

/// Tables for `u - s` and `u + s`, keyed by `(prec, n)`; a few recent orders are kept.
fn rotation_tables(n: usize, len: usize, prec: u32) -> RotationPair {
    static CACHE: OnceLock<RotationCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some((_, t)) = cache
        .lock()
        .unwrap()
        .iter()
        .find(|(key, t)| *key == (prec, n) && t.0.sin.len() >= len)
    {
        return Arc::clone(t);
    }
    let quarter = Float::with_val(prec, Constant::Pi) / 2u32;
    let minus = Float::with_val(prec, &quarter * (n as u64 - 1)) / n as u64;
    let plus = Float::with_val(prec, &quarter * (n as u64 + 1)) / n as u64;
    let pair = Arc::new((
        RotationTable::new(&minus, len, prec),
        RotationTable::new(&plus, len, prec),
    ));
    let mut guard = cache.lock().unwrap();
    guard.retain(|(key, _)| *key != (prec, n));
    if guard.len() >= ROTATION_CACHE_CAP {
        guard.remove(0);
    }
    guard.push(((prec, n), Arc::clone(&pair)));
    pair
}

/// `x * y` to absolute accuracy `2^floor`, or `None` when it is below that.
fn product_above(x: &Float, y: &Float, floor: i64) -> Option<Float> {
    if x.is_zero() || y.is_zero() {
        return None;
    }
    let bits = exponent(x) + exponent(y) - floor + 2;
    (bits > 1).then(|| Float::with_val(bits.min(u32::MAX as i64) as u32, x * y))
}

/// A rotating vector `r e^{i t}` carried at a moving precision.
struct Rotor {
    re: Float,
    im: Float,
}

impl Rotor {
    fn new(scale: &Float, angle: &Float, prec: u32) -> Self {
        let (s, c) = Float::with_val(prec, angle).sin_cos(Float::new(prec));
        Self {
            re: c * scale,
            im: s * scale,
        }
    }

    /// Real part after turning by the angle with the given sine and versine.
    fn turned_re(&self, sin: &Float, vers: &Float, floor: i64) -> Float {
        let mut out = self.re.clone();
        if let Some(t) = product_above(&self.im, sin, floor) {
            out -= t;
        }
        if let Some(t) = product_above(&self.re, vers, floor) {
            out -= t;
        }
        out
    }

    fn turned_im(&self, sin: &Float, vers: &Float, floor: i64) -> Float {
        let mut out = self.im.clone();
        if let Some(t) = product_above(&self.re, sin, floor) {
            out += t;
        }
        if let Some(t) = product_above(&self.im, vers, floor) {
            out -= t;
        }
        out
    }
}

/// `h(x) <= 0` evaluated directly at precision `p`.
fn h_nonpositive_direct(x: &Float, lo0: &Float, n: usize, kappa: &Float, p: u32) -> bool {
    let (ss, sc) = Float::with_val(p, x / 2u32).sin_cos(Float::new(p));
    let u = Float::with_val(p, x - lo0) * n as u64 / 2u32;
    let (us, uc) = u.sin_cos(Float::new(p));
    let lhs = us * ss;
    let rhs = uc * sc * kappa;
    lhs <= rhs
}

/// Bisection on `h` over `I_{n,j}` down to a bracket of width `tol`
/// (default `2^(8-bits)`); returns the final midpoint.
pub fn solve_theta_bisection(
    a: &AlphaParam,
    n: usize,
    j: usize,
    ctx: &PrecisionContext,
    tol: Option<&Float>,
) -> Result<SolveReport> {
    check_index(n, j)?;
    let tol = resolve_tol(tol, ctx)?;
    if a.is_half() {
        return Ok(closed_form_report(n, j, Method::Bisection, ctx));
    }
    let p = ctx.bits() + GUARD_BITS;
    let width = ctx.pi_ratio(1, n as i64);
    let steps = (log2_f(&width) - log2_f(&tol)).ceil().max(0.0) as usize;
    let tables = rotation_tables(n, steps, p);
    let (minus, plus) = (&tables.0, &tables.1);

    let kappa = Float::with_val(p, a.kappa());
    let scale_a = Float::with_val(p, 1 - &kappa);
    let scale_b = Float::with_val(p, 1 + &kappa);
    let top = exponent(&scale_a).max(exponent(&scale_b));

    let lo0 = ctx.widened(GUARD_BITS).pi_ratio(j as i64 - 1, n as i64);
    let mut lo = lo0.clone();
    let mut step_x = Float::with_val(p, Constant::Pi) / n as u64;
    let (mut va, mut vb) = (
        Rotor {
            re: Float::new(64),
            im: Float::new(64),
        },
        Rotor {
            re: Float::new(64),
            im: Float::new(64),
        },
    );
    let (mut floor, mut doubt) = (0i64, 0i64);

    for k in 0..steps {
        if k % BISECT_BLOCK == 0 {
            let pb = (k + BISECT_BLOCK + BISECT_BLOCK_GUARD).min(p as usize) as u32;
            let s = Float::with_val(p, &lo / 2u32);
            let u = Float::with_val(p, &lo - &lo0) * n as u64 / 2u32;
            va = Rotor::new(&scale_a, &Float::with_val(p, &u - &s), pb);
            vb = Rotor::new(&scale_b, &Float::with_val(p, &u + &s), pb);
            floor = top - pb as i64;
            doubt = floor + 16;
        }
        step_x >>= 1;
        let (sa, wa) = (&minus.sin[k], &minus.vers[k]);
        let (sb, wb) = (&plus.sin[k], &plus.vers[k]);
        let ra = va.turned_re(sa, wa, floor);
        let rb = vb.turned_re(sb, wb, floor);
        let f = Float::with_val(ra.prec(), &ra - &rb);
        let nonpositive = if f.is_zero() || exponent(&f) <= doubt {
            let mid = Float::with_val(p, &lo + &step_x);
            h_nonpositive_direct(&mid, &lo0, n, &kappa, p)
        } else {
            f.is_sign_negative()
        };
        if nonpositive {
            // the root lies right of mid
            va = Rotor {
                im: va.turned_im(sa, wa, floor),
                re: ra,
            };
            vb = Rotor {
                im: vb.turned_im(sb, wb, floor),
                re: rb,
            };
            lo += &step_x;
        }
    }
    step_x >>= 1;
    let root = ctx.round(&(lo + step_x));
    let certified = Float::with_val(ctx.bits(), &width >> steps as u32) + rounding_floor(ctx);
    Ok(SolveReport {
        residual: residual_at(a, n, j, &root, ctx),
        root,
        iterations: steps,
        method: Method::Bisection,
        certified_error: certified,
        trace: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// fixed point

// With y = x/2 the increment of eta between consecutive iterates is
//   eta(x') - eta(x) = -2 atan(kappa sin((x'-x)/2) / (sin y sin y' + kappa^2 cos y cos y')).
// Both terms of the denominator are positive, so a few dozen bits beyond the
// size of the increment give it to full relative accuracy. Iterating on
// increments lets the low-precision errors pile up, so every FP_BLOCK bits of
// progress the iterate is recomputed directly as d + eta(x)/n at a precision
// just ahead of the current error. The deviation eps_m = x_m - Z(x_(m-1)) is
// tracked and enters the bound |x_m - theta| <= (q |x_m - x_(m-1)| + eps_m) / (1 - q).

const FP_BLOCK: i64 = 128;
const FP_GUARD: i64 = 48;

fn exponent(x: &Float) -> i64 {
    x.get_exp().map_or(i64::MIN / 4, i64::from)
}

/// Fixed-point iteration `x <- (j-1) pi / n + eta(x) / n` from `x0`
/// (default `(j-1) pi / n`). Requires `n > K1`.
///
/// Stops once the a-posteriori bound for `q = K1/n` drops below `tol`.
pub fn solve_theta_fixed_point(
    a: &AlphaParam,
    n: usize,
    j: usize,
    x0: Option<&Float>,
    ctx: &PrecisionContext,
    tol: Option<&Float>,
) -> Result<SolveReport> {
    let bracket = BracketInterval::new(n, j, ctx)?;
    let x0 = start_point(&bracket, x0, ctx)?;
    let tol = resolve_tol(tol, ctx)?;
    let k1 = a.k1(ctx);
    if k1 >= n as u64 {
        return Err(Error::ContractionNotGuaranteed { n, k1: k1.to_f64() });
    }
    if a.is_half() {
        return Ok(closed_form_report(n, j, Method::FixedPoint, ctx));
    }
    let work = ctx.widened(GUARD_BITS);
    let p = work.bits();
    let q = Float::with_val(ctx.bits(), &k1 / n as u64);
    let one_minus_q = Float::with_val(ctx.bits(), 1 - &q);
    let log2_q = log2_f(&q);
    let slack = (-log2_f(&one_minus_q)).ceil() as i64;
    let max_iter = ((log2_f(&tol) - log2_f(&ctx.pi_ratio(1, n as i64))) / log2_q)
        .ceil()
        .max(1.0) as usize
        + 64;

    // increment precision
    let g = (FP_BLOCK + FP_GUARD + slack + 8) as u32;
    let kappa = Float::with_val(g, a.kappa());
    let kappa2 = Float::with_val(g, kappa.square_ref());
    let d = work.pi_ratio(j as i64 - 1, n as i64);

    let bound = |delta: &Float, eps: &Float| {
        let num = Float::with_val(ctx.bits(), &q * delta).abs() + eps;
        num / &one_minus_q
    };
    let anchor = |x: &Float, r: u32| {
        let cr = PrecisionContext::new(r).expect("anchor precision is at least 64 bits");
        Float::with_val(p, &d + eta(a, x, &cr) / n as u64)
    };
    let anchor_bits =
        |delta: &Float| (FP_BLOCK + FP_GUARD + slack - exponent(delta)).clamp(64, p as i64) as u32;

    let x_start = work.round(&x0);
    let r0 = anchor_bits(&ctx.pi_ratio(1, n as i64));
    let mut x = anchor(&x_start, r0);
    let mut delta = Float::with_val(p, &x - &x_start);
    let mut eps = Float::with_val(64, 1) >> (r0 - 4);
    let mut anchor_exp = exponent(&delta);
    let (mut sp, mut cp) = Float::with_val(g, &x_start / 2u32).sin_cos(Float::new(g));
    let mut m = 1usize;

    loop {
        let post = bound(&delta, &eps);
        if delta.is_zero() || post <= tol {
            break;
        }
        if m >= max_iter {
            let root = ctx.round(&x);
            let report = SolveReport {
                residual: residual_at(a, n, j, &root, ctx),
                root,
                iterations: m,
                method: Method::FixedPoint,
                certified_error: post + rounding_floor(ctx),
                trace: Vec::new(),
            };
            return Err(Error::NoProgress {
                report: Box::new(report),
            });
        }

        let (s, c) = Float::with_val(g, &x / 2u32).sin_cos(Float::new(g));
        let anchored = exponent(&delta) <= anchor_exp - FP_BLOCK;
        let next = if anchored {
            let r = anchor_bits(&delta);
            let next = anchor(&x, r);
            eps = Float::with_val(64, 1) >> (r - 4);
            next
        } else {
            let half = Float::with_val(g, &delta / 2u32);
            let num = half.sin() * &kappa;
            let den = Float::with_val(g, &sp * &s) + Float::with_val(g, &kappa2 * &cp) * &c;
            let incr = Float::with_val(g, (num / den).atan() * 2u32) / n as u64;
            eps += Float::with_val(64, &incr >> (g - 6)).abs();
            Float::with_val(p, &x - &incr)
        };
        let new_delta = Float::with_val(p, &next - &x);
        if anchored {
            anchor_exp = exponent(&new_delta);
        }
        x = next;
        delta = new_delta;
        sp = s;
        cp = c;
        m += 1;
    }
    let root = ctx.round(&x);
    Ok(SolveReport {
        residual: residual_at(a, n, j, &root, ctx),
        certified_error: bound(&delta, &eps) + rounding_floor(ctx),
        root,
        iterations: m,
        method: Method::FixedPoint,
        trace: Vec::new(),
    })
}

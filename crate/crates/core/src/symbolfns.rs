//! The phase function `eta_alpha` and the scalar symbols derived from it.
//!
//! `eta(x) = 2 atan(kappa cot(x/2))` with `kappa = Re(alpha) / (1 - Re(alpha))`
//! is a decreasing involution of `[0, pi]`. The even-index eigenvalue angles
//! solve `n x - (j-1) pi = eta(x)`; everything the solvers and the asymptotic
//! formulas need is expressed through `eta` and its first two derivatives.

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{g, Cplx, PrecisionContext};

/// The edge weight `alpha`, real in `(0,1)` or complex with `0 < Re(alpha) < 1`.
///
/// Eigenvalues depend only on `Re(alpha)`; eigenvectors and their norms use
/// the full complex value.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaParam {
    re: Float,
    im: Float,
    kappa: Float,
    half: bool,
}

impl AlphaParam {
    pub fn new(re: Float, im: Float, ctx: &PrecisionContext) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidAlpha("alpha must be finite".into()));
        }
        if re <= 0 || re >= 1 {
            return Err(Error::InvalidAlpha(format!(
                "Re(alpha) = {} must lie strictly between 0 and 1",
                re.to_f64()
            )));
        }
        let p = ctx.bits();
        let re = Float::with_val(p, re);
        let im = Float::with_val(p, im);
        let kappa = Float::with_val(p, &re / Float::with_val(p, 1 - &re));
        let half = re == 0.5;
        Ok(Self {
            re,
            im,
            kappa,
            half,
        })
    }

    pub fn real(alpha: Float, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(alpha, ctx.zero(), ctx)
    }

    /// `alpha = p/q`, rounded once to working precision.
    pub fn ratio(p: i64, q: i64, ctx: &PrecisionContext) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidAlpha("zero denominator".into()));
        }
        Self::real(ctx.ratio(p, q), ctx)
    }

    /// Parses `"1/3"`, `"0.8"`, `"1/2+0.3i"` or `"0.25-2i"`.
    pub fn parse(text: &str, ctx: &PrecisionContext) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty alpha".into()));
        }
        let Some(body) = s.strip_suffix('i') else {
            return Self::real(ctx.parse(&s)?, ctx);
        };
        // split at the sign that starts the imaginary part
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        });
        let (re_text, im_text) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im_text = match im_text {
            "+" | "" => "1",
            "-" => "-1",
            t => t.strip_prefix('+').unwrap_or(t),
        };
        Self::new(ctx.parse(re_text)?, ctx.parse(im_text)?, ctx)
    }

    #[inline]
    pub fn re(&self) -> &Float {
        &self.re
    }

    #[inline]
    pub fn im(&self) -> &Float {
        &self.im
    }

    #[inline]
    pub fn kappa(&self) -> &Float {
        &self.kappa
    }

    /// `Re(alpha) == 1/2` exactly; the eigenvalues then have closed forms.
    #[inline]
    pub fn is_half(&self) -> bool {
        self.half
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn as_complex(&self) -> Cplx {
        Cplx::new(self.re.clone(), self.im.clone())
    }

    /// The same weight with the imaginary part dropped.
    pub fn real_part(&self) -> Self {
        Self {
            im: Float::new(self.re.prec()),
            ..self.clone()
        }
    }

    /// `|alpha|^2`.
    pub fn abs_sqr(&self, ctx: &PrecisionContext) -> Float {
        let p = ctx.bits();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    /// `|1 - alpha|^2`.
    pub fn one_minus_abs_sqr(&self, ctx: &PrecisionContext) -> Float {
        let p = ctx.bits();
        let d = Float::with_val(p, 1 - &self.re);
        d.square() + Float::with_val(p, self.im.square_ref())
    }

    pub fn k1(&self, ctx: &PrecisionContext) -> Float {
        let inv = Float::with_val(ctx.bits(), self.kappa.recip_ref());
        if self.kappa >= inv {
            ctx.round(&self.kappa)
        } else {
            inv
        }
    }

    pub fn k2(&self, ctx: &PrecisionContext) -> Float {
        if self.half {
            return ctx.zero();
        }
        let k1 = self.k1(ctx);
        (k1.square() - 1u32) / 2u32
    }

    /// Linear Newton rate `|2a-1| / (a(1-a) n + |2a-1|)` with `a = Re(alpha)`.
    pub fn gamma(&self, n: usize, ctx: &PrecisionContext) -> Float {
        let p = ctx.bits();
        let skew = Float::with_val(p, &self.re * 2u32) - 1u32;
        let skew = skew.abs();
        if skew.is_zero() {
            return ctx.zero();
        }
        let spread = Float::with_val(p, &self.re * Float::with_val(p, 1 - &self.re)) * n as u64;
        let den = spread + &skew;
        skew / den
    }

    pub fn constants(&self, n: usize, ctx: &PrecisionContext) -> SolverConstants {
        SolverConstants {
            k1: self.k1(ctx),
            k2: self.k2(ctx),
            gamma_n: self.gamma(n, ctx),
        }
    }
}

/// Bounds driving the solver certificates: `sup|eta'| = K1`, `sup|eta''| <= K2`
/// and the linear Newton rate for a given `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConstants {
    pub k1: Float,
    pub k2: Float,
    pub gamma_n: Float,
}

/// Equivalent closed forms of `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaFormula {
    /// `2 atan(kappa cot(x/2))`
    Cot,
    /// `pi - 2 atan(tan(x/2) / kappa)`
    Tan,
    /// `2 asin(kappa cos(x/2) / sqrt(sin^2(x/2) + kappa^2 cos^2(x/2)))`
    ArcsinKappa,
    /// `2 asin(sqrt2 a cos(x/2) / sqrt(2a^2 - 2a + 1 + (2a-1) cos x))`
    ArcsinAlpha,
}

impl EtaFormula {
    pub const ALL: [EtaFormula; 4] = [
        EtaFormula::Cot,
        EtaFormula::Tan,
        EtaFormula::ArcsinKappa,
        EtaFormula::ArcsinAlpha,
    ];
}

/// `(j-1) pi / n`, the left end of the interval holding the `j`-th angle.
pub fn d_nj(n: usize, j: usize, ctx: &PrecisionContext) -> Float {
    ctx.pi_ratio(j as i64 - 1, n as i64)
}

fn half_angle_tan(x: &Float, ctx: &PrecisionContext) -> Float {
    let half = Float::with_val(ctx.bits(), x / 2u32);
    half.tan()
}

fn half_angle_cot(x: &Float, ctx: &PrecisionContext) -> Float {
    let half = Float::with_val(ctx.bits(), x / 2u32);
    half.cot()
}

fn below_quarter_turn(x: &Float, ctx: &PrecisionContext) -> bool {
    let quarter = ctx.pi() / 2u32;
    *x < quarter
}

/// `eta_alpha(x)` on `[0, pi]`.
///
/// Uses the tangent form below `pi/2` and the cotangent form above, so the
/// trigonometric argument never exceeds 1 in magnitude.
pub fn eta(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    if a.is_half() {
        return ctx.pi() - x;
    }
    if below_quarter_turn(x, ctx) {
        eta_by(EtaFormula::Tan, a, x, ctx)
    } else {
        eta_by(EtaFormula::Cot, a, x, ctx)
    }
}

/// `eta_alpha(x)` by an explicitly chosen closed form.
pub fn eta_by(formula: EtaFormula, a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    match formula {
        EtaFormula::Cot => {
            let arg = half_angle_cot(x, ctx) * a.kappa();
            arg.atan() * 2u32
        }
        EtaFormula::Tan => {
            let arg = half_angle_tan(x, ctx) / a.kappa();
            ctx.pi() - arg.atan() * 2u32
        }
        EtaFormula::ArcsinKappa => {
            let half = Float::with_val(p, x / 2u32);
            let (s, c) = half.sin_cos(Float::new(p));
            let kc = c * a.kappa();
            let den = (s.square() + Float::with_val(p, kc.square_ref())).sqrt();
            (kc / den).asin() * 2u32
        }
        EtaFormula::ArcsinAlpha => {
            let re = a.re();
            let c_half = Float::with_val(p, x / 2u32).cos();
            let num = c_half * re * Float::with_val(p, 2u32).sqrt();
            // 2a^2 - 2a + 1 = a^2 + (1-a)^2
            let base = Float::with_val(p, re.square_ref()) + Float::with_val(p, 1 - re).square();
            let skew = Float::with_val(p, re * 2u32) - 1u32;
            let den = (base + skew * Float::with_val(p, x.cos_ref())).sqrt();
            (num / den).asin() * 2u32
        }
    }
}

/// `eta_alpha'(x)`, always negative; the endpoint values are `-1/kappa` at 0
/// and `-kappa` at `pi`.
pub fn eta_prime(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    if a.is_half() {
        return ctx.float(-1);
    }
    let k = a.kappa();
    if x.is_zero() {
        return -Float::with_val(p, k.recip_ref());
    }
    if below_quarter_turn(x, ctx) {
        let t2 = half_angle_tan(x, ctx).square();
        let num = Float::with_val(p, &t2 + 1u32) * k;
        let den = t2 + Float::with_val(p, k.square_ref());
        -(num / den)
    } else {
        let c2 = half_angle_cot(x, ctx).square();
        let num = Float::with_val(p, &c2 + 1u32) * k;
        let den = c2 * Float::with_val(p, k.square_ref()) + 1u32;
        -(num / den)
    }
}

/// `(eta(x), eta'(x))` sharing one half-angle tangent evaluation.
pub fn eta_with_prime(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> (Float, Float) {
    let p = ctx.bits();
    if a.is_half() {
        return (ctx.pi() - x, ctx.float(-1));
    }
    let k = a.kappa();
    let k2 = Float::with_val(p, k.square_ref());
    if x.is_zero() {
        return (ctx.pi(), -Float::with_val(p, k.recip_ref()));
    }
    if below_quarter_turn(x, ctx) {
        let t = half_angle_tan(x, ctx);
        let t2 = Float::with_val(p, t.square_ref());
        let e = ctx.pi() - (t / k).atan() * 2u32;
        let d = -(Float::with_val(p, &t2 + 1u32) * k / (t2 + k2));
        (e, d)
    } else {
        let c = half_angle_cot(x, ctx);
        let c2 = Float::with_val(p, c.square_ref());
        let e = (c * k).atan() * 2u32;
        let d = -(Float::with_val(p, &c2 + 1u32) * k / (c2 * k2 + 1u32));
        (e, d)
    }
}

/// `eta_alpha''(x)`.
pub fn eta_second(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    if a.is_half() {
        return ctx.zero();
    }
    let k2 = Float::with_val(p, a.kappa().square_ref());
    let skew = Float::with_val(p, &k2 - 1u32);
    let factor = if below_quarter_turn(x, ctx) {
        let t = half_angle_tan(x, ctx);
        let den = Float::with_val(p, t.square_ref()) + &k2;
        t / den
    } else {
        let c = half_angle_cot(x, ctx);
        let den = Float::with_val(p, c.square_ref()) * &k2 + 1u32;
        c / den
    };
    skew * factor * eta_prime(a, x, ctx)
}

/// `eta~(x) = eta(x) + x - pi`; identically zero when `Re(alpha) = 1/2`.
pub fn eta_tilde(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    if a.is_half() {
        return ctx.zero();
    }
    eta(a, x, ctx) + x - ctx.pi()
}

/// `eta~` through its own arctangent form
/// `2 atan((kappa-1) cot(x/2) / (1 + kappa cot^2(x/2)))`.
pub fn eta_tilde_closed_form(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let k = a.kappa();
    let km1 = Float::with_val(p, k - 1u32);
    let ratio = if below_quarter_turn(x, ctx) {
        // multiply through by tan^2(x/2) to stay finite at x = 0
        let t = half_angle_tan(x, ctx);
        let den = Float::with_val(p, t.square_ref()) + k;
        km1 * t / den
    } else {
        let c = half_angle_cot(x, ctx);
        let den = Float::with_val(p, c.square_ref()) * k + 1u32;
        km1 * c / den
    };
    ratio.atan() * 2u32
}

/// `eta~'(x) = eta'(x) + 1`.
pub fn eta_tilde_prime(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    eta_prime(a, x, ctx) + 1u32
}

fn check_even_index(n: usize, j: usize) {
    assert!(n >= 3, "n must be at least 3");
    assert!(
        j >= 2 && j <= n && j.is_multiple_of(2),
        "j = {j} must be even with 2 <= j <= n = {n}"
    );
}

/// `f(x) = (j-1) pi / n + eta(x) / n`, whose fixed point is the `j`-th angle.
pub fn f_main(a: &AlphaParam, n: usize, j: usize, x: &Float, ctx: &PrecisionContext) -> Float {
    check_even_index(n, j);
    let e = eta(a, x, ctx);
    let num = ctx.pi() * (j as u64 - 1) + e;
    num / n as u64
}

/// `h(x) = n x - (j-1) pi - eta(x)`; negative at the left end of
/// `[(j-1)pi/n, j pi/n]`, positive at the right end, strictly increasing.
pub fn h_main(a: &AlphaParam, n: usize, j: usize, x: &Float, ctx: &PrecisionContext) -> Float {
    check_even_index(n, j);
    let p = ctx.bits();
    let lin = Float::with_val(p, x * n as u64) - ctx.pi() * (j as u64 - 1);
    lin - eta(a, x, ctx)
}

/// `h'(x) = n - eta'(x) > n`.
pub fn h_main_prime(
    a: &AlphaParam,
    n: usize,
    j: usize,
    x: &Float,
    ctx: &PrecisionContext,
) -> Float {
    check_even_index(n, j);
    ctx.float(n as u64) - eta_prime(a, x, ctx)
}

/// `nu_alpha(x)`: the leading coefficient of the squared even-index
/// eigenvector norm, `||v||^2 = n nu(theta) + O(1)`.
pub fn nu(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let re = a.re();
    let abs2 = a.abs_sqr(ctx);
    let e = eta(a, x, ctx);
    let x_minus = Float::with_val(p, x - &e);

    let t1 = Float::with_val(p, 1 - re) / 2u32 * g(x, ctx);
    let t2 = Float::with_val(p, re / 2u32) * g(&e, ctx);
    let t3 = Float::with_val(p, re - &abs2) / 2u32 * g(&x_minus, ctx);
    t1 - t2 + t3 + abs2 * 2u32
}

/// `xi_alpha(x)`: the bounded second term of the squared even-index norm.
pub fn xi(a: &AlphaParam, x: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let re = a.re();
    let abs2 = a.abs_sqr(ctx);
    let one_minus2 = a.one_minus_abs_sqr(ctx);
    let e = eta(a, x, ctx);
    let gx = g(x, ctx);
    let ge = g(&e, ctx);
    let cos_x = Float::with_val(p, x.cos_ref());
    let cos_e = Float::with_val(p, e.cos_ref());
    let x_plus = Float::with_val(p, x + &e);

    let t1 = one_minus2 / 2u32 * &gx * cos_e;
    let t2 = Float::with_val(p, &abs2 / 2u32) * &ge * &cos_x;
    let t3 = Float::with_val(p, re - &abs2) / 2u32 * (gx + g(&x_plus, ctx) - ge);
    let t4 = abs2 * 2u32 * cos_x;
    t1 + t2 + t3 - t4
}

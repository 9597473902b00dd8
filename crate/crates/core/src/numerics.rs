//! Precision-parameterized scalar arithmetic and Chebyshev kernels.
//!
//! Every routine in the crate takes an explicit [`PrecisionContext`]; the same
//! code path serves 53-bit runs and multi-thousand-bit runs. Scalars are MPFR
//! floats ([`rug::Float`]); complex values use the small [`Cplx`] pair type.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};

/// Binary digits used by the large-scale experiments (about 1000 decimal digits).
pub const EXPERIMENT_BITS: u32 = 3322;

/// Working precision and derived tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    mantissa_bits: u32,
}

impl PrecisionContext {
    pub fn new(mantissa_bits: u32) -> Result<Self> {
        if mantissa_bits < 53 || mantissa_bits > rug::float::prec_max() / 2 {
            return Err(Error::InvalidPrecision(mantissa_bits));
        }
        Ok(Self { mantissa_bits })
    }

    /// IEEE double-equivalent mantissa width.
    pub fn double() -> Self {
        Self { mantissa_bits: 53 }
    }

    pub fn experiment() -> Self {
        Self {
            mantissa_bits: EXPERIMENT_BITS,
        }
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.mantissa_bits
    }

    /// The same context widened by `extra` guard bits.
    pub fn widened(&self, extra: u32) -> Self {
        Self {
            mantissa_bits: self.mantissa_bits + extra,
        }
    }

    /// Unit roundoff `2^(1 - bits)`.
    pub fn eps(&self) -> Float {
        self.pow2(1 - self.mantissa_bits as i32)
    }

    /// Default solver tolerance `2^(8 - bits)`: an 8-bit guard band below the
    /// working precision.
    pub fn default_tol(&self) -> Float {
        self.pow2(8 - self.mantissa_bits as i32)
    }

    /// Exact power of two at working precision.
    pub fn pow2(&self, exp: i32) -> Float {
        let one = Float::with_val(self.mantissa_bits, 1);
        if exp >= 0 {
            one << exp as u32
        } else {
            one >> exp.unsigned_abs()
        }
    }

    #[inline]
    pub fn zero(&self) -> Float {
        Float::new(self.mantissa_bits)
    }

    #[inline]
    pub fn float<T>(&self, value: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.mantissa_bits, value)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.mantissa_bits, Constant::Pi)
    }

    /// `p/q` rounded once to working precision.
    pub fn ratio(&self, p: i64, q: i64) -> Float {
        Float::with_val(self.mantissa_bits, Rational::from((p, q)))
    }

    /// `k * pi / m` with a single rounding of the rational factor.
    pub fn pi_ratio(&self, k: i64, m: i64) -> Float {
        let guard = self.widened(16);
        let v = guard.pi() * Rational::from((k, m));
        Float::with_val(self.mantissa_bits, v)
    }

    /// Rounds `x` into this context.
    pub fn round(&self, x: &Float) -> Float {
        Float::with_val(self.mantissa_bits, x)
    }

    /// Parses a decimal (`"0.25"`, `"1e-3"`) or rational (`"1/3"`) literal.
    pub fn parse(&self, text: &str) -> Result<Float> {
        let text = text.trim();
        if let Some((p, q)) = text.split_once('/') {
            let r = Rational::parse(format!("{}/{}", p.trim(), q.trim()))
                .map_err(|e| Error::Parse(format!("{text}: {e}")))?;
            let r = Rational::from(r);
            return Ok(Float::with_val(self.mantissa_bits, r));
        }
        let f = Float::parse(text).map_err(|e| Error::Parse(format!("{text}: {e}")))?;
        Ok(Float::with_val(self.mantissa_bits, f))
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::double()
    }
}

/// Decimal digits carried by `bits` binary digits.
pub fn decimal_digits(bits: u32) -> usize {
    ((bits as f64) / std::f64::consts::LOG2_10).floor().max(1.0) as usize
}

/// Scientific-notation rendering with `digits` significant digits.
pub fn fmt_sci(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_owned();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Base-10 logarithm of `|x|` as an `f64` (`-inf` for zero). Safe for values
/// far below the `f64` exponent range.
pub fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (mantissa, exp) = x.to_f64_exp();
    mantissa.abs().log10() + exp as f64 * std::f64::consts::LOG10_2
}

/// An angle in `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Angle(Float);

impl Angle {
    pub fn new(x: Float, ctx: &PrecisionContext) -> Result<Self> {
        let pi_up = Float::with_val_round(ctx.bits(), Constant::Pi, Round::Up).0;
        if x < 0 || x > pi_up {
            return Err(Error::AngleOutOfRange(fmt_sci(&x, 17)));
        }
        Ok(Self(x))
    }

    #[inline]
    pub fn value(&self) -> &Float {
        &self.0
    }

    pub fn into_inner(self) -> Float {
        self.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_sci(&self.0, 17))
    }
}

/// Complex number over MPFR floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Cplx {
    pub re: Float,
    pub im: Float,
}

impl Cplx {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self {
            re: ctx.zero(),
            im: ctx.zero(),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    pub fn real<T>(ctx: &PrecisionContext, value: T) -> Self
    where
        Float: rug::Assign<T>,
    {
        Self::from_real(ctx.float(value))
    }

    #[inline]
    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &rhs.re) - Float::with_val(p, &self.im * &rhs.im);
        let im = Float::with_val(p, &self.re * &rhs.im) + Float::with_val(p, &self.im * &rhs.re);
        Self { re, im }
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        Self {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.prec();
        let den = rhs.norm_sqr();
        let re = Float::with_val(p, &self.re * &rhs.re) + Float::with_val(p, &self.im * &rhs.im);
        let im = Float::with_val(p, &self.im * &rhs.re) - Float::with_val(p, &self.re * &rhs.im);
        Self {
            re: re / &den,
            im: im / &den,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// `self * rhs` accumulated into `acc` without intermediate allocations
    /// beyond one temporary.
    pub fn mul_add_into(acc: &mut Self, a: &Self, b: &Self, tmp: &mut Float) {
        use rug::Assign;
        tmp.assign(&a.re * &b.re);
        acc.re += &*tmp;
        tmp.assign(&a.im * &b.im);
        acc.re -= &*tmp;
        tmp.assign(&a.re * &b.im);
        acc.im += &*tmp;
        tmp.assign(&a.im * &b.re);
        acc.im += &*tmp;
    }
}

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = decimal_digits(self.prec()).min(20);
        if self.im.is_zero() {
            write!(f, "{}", fmt_sci(&self.re, digits))
        } else {
            let sign = if self.im.is_sign_negative() { '-' } else { '+' };
            let im = Float::with_val(self.prec(), self.im.abs_ref());
            write!(
                f,
                "{}{}{}i",
                fmt_sci(&self.re, digits),
                sign,
                fmt_sci(&im, digits)
            )
        }
    }
}

/// First-kind Chebyshev polynomial `T_n(t)` by the three-term recurrence.
pub fn chebyshev_t(n: usize, t: &Float, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let mut prev = ctx.float(1);
    if n == 0 {
        return prev;
    }
    let mut cur = Float::with_val(p, t);
    let two_t = Float::with_val(p, t * 2u32);
    for _ in 1..n {
        let next = Float::with_val(p, &two_t * &cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Second-kind Chebyshev polynomial `U_n(t)` with the convention `U_{-1} = 0`.
/// Indices below `-1` follow the recurrence backwards (`U_{-2} = -1`).
pub fn chebyshev_u(n: i64, t: &Float, ctx: &PrecisionContext) -> Float {
    match n.cmp(&-1) {
        Ordering::Less => -chebyshev_u(-n - 2, t, ctx),
        Ordering::Equal => ctx.zero(),
        Ordering::Greater => {
            let p = ctx.bits();
            let two_t = Float::with_val(p, t * 2u32);
            let mut prev = ctx.zero();
            let mut cur = ctx.float(1);
            for _ in 0..n {
                let next = Float::with_val(p, &two_t * &cur) - &prev;
                prev = std::mem::replace(&mut cur, next);
            }
            cur
        }
    }
}

/// `U_{-1}(t), U_0(t), ..., U_{max}(t)` for a complex argument; entry `k`
/// holds `U_{k-1}`.
pub fn chebyshev_u_table_complex(max: usize, t: &Cplx, ctx: &PrecisionContext) -> Vec<Cplx> {
    let two_t = t.scale(&ctx.float(2));
    let mut table = Vec::with_capacity(max + 2);
    table.push(Cplx::zero(ctx));
    table.push(Cplx::real(ctx, 1));
    for k in 1..=max {
        let next = two_t.mul(&table[k]).sub(&table[k - 1]);
        table.push(next);
    }
    table
}

/// `U_n(t)` for complex `t`, `n >= -1`.
pub fn chebyshev_u_complex(n: i64, t: &Cplx, ctx: &PrecisionContext) -> Cplx {
    if n < -1 {
        return chebyshev_u_complex(-n - 2, t, ctx).neg();
    }
    let table = chebyshev_u_table_complex(n.max(0) as usize, t, ctx);
    table[(n + 1) as usize].clone()
}

/// The symbol `g(x) = 2 - 2 cos x`, evaluated as `4 sin^2(x/2)` to keep full
/// relative accuracy near `x = 0`.
pub fn g(x: &Float, ctx: &PrecisionContext) -> Float {
    let s = Float::with_val(ctx.bits(), x / 2u32).sin();
    s.square() * 4u32
}

/// `g'(x) = 2 sin x`.
pub fn g_prime(x: &Float, ctx: &PrecisionContext) -> Float {
    Float::with_val(ctx.bits(), x.sin_ref()) * 2u32
}

/// `g''(x) = 2 cos x`.
pub fn g_second(x: &Float, ctx: &PrecisionContext) -> Float {
    Float::with_val(ctx.bits(), x.cos_ref()) * 2u32
}

/// Integer power helper used by the rate certificates.
pub fn powi(base: &Float, exp: i32) -> Float {
    Float::with_val(base.prec(), base.pow(exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        Float::with_val(a.prec(), a - b).abs() <= tol
    }

    #[test]
    fn precision_rejects_narrow_mantissa() {
        assert!(PrecisionContext::new(52).is_err());
        let ctx = PrecisionContext::new(53).unwrap();
        assert_eq!(ctx.eps(), f64::EPSILON);
    }

    #[test]
    fn eps_is_exact_power_of_two() {
        let ctx = PrecisionContext::new(200).unwrap();
        let e = ctx.eps();
        assert_eq!(e.get_exp(), Some(-198));
        assert_eq!(Float::with_val(200, &e * ctx.pow2(199)), 1);
    }

    #[test]
    fn chebyshev_trivial_values() {
        let ctx = PrecisionContext::double();
        assert_eq!(chebyshev_t(0, &ctx.float(0.7), &ctx), 1);
        assert_eq!(chebyshev_t(2, &ctx.float(0.5), &ctx), -0.5);
        assert_eq!(chebyshev_u(-1, &ctx.float(0.3), &ctx), 0);
        assert_eq!(chebyshev_u(1, &ctx.float(0.25), &ctx), 0.5);
        assert_eq!(chebyshev_u(-2, &ctx.float(0.25), &ctx), -1);
    }

    #[test]
    fn chebyshev_t_matches_cosine() {
        let ctx = PrecisionContext::new(128).unwrap();
        let theta = ctx.pi_ratio(1, 7);
        let t = Float::with_val(128, theta.cos_ref());
        let direct = Float::with_val(128, (theta.clone() * 5u32).cos_ref());
        assert!(close(&chebyshev_t(5, &t, &ctx), &direct, 1e-35));
    }

    #[test]
    fn chebyshev_u_zero_at_cos_pi_over_5() {
        let ctx = PrecisionContext::new(128).unwrap();
        let t = ctx.pi_ratio(1, 5).cos();
        assert!(chebyshev_u(4, &t, &ctx).abs() < 1e-35);
    }

    #[test]
    fn complex_u_agrees_with_real_on_real_axis() {
        let ctx = PrecisionContext::new(100).unwrap();
        let t = ctx.float(-0.37);
        for n in [-1i64, 0, 1, 5, 12] {
            let c = chebyshev_u_complex(n, &Cplx::from_real(t.clone()), &ctx);
            assert!(close(&c.re, &chebyshev_u(n, &t, &ctx), 1e-25));
            assert!(c.im.is_zero());
        }
    }

    #[test]
    fn g_endpoint_values() {
        let ctx = PrecisionContext::new(100).unwrap();
        assert_eq!(g(&ctx.zero(), &ctx), 0);
        assert!(close(&g(&ctx.pi(), &ctx), &ctx.float(4), 1e-28));
        assert!(close(&g(&ctx.pi_ratio(1, 3), &ctx), &ctx.float(1), 1e-28));
    }

    #[test]
    fn parse_rational_and_decimal() {
        let ctx = PrecisionContext::new(100).unwrap();
        assert_eq!(ctx.parse("1/2").unwrap(), 0.5);
        assert_eq!(ctx.parse(" 0.25 ").unwrap(), 0.25);
        assert!(close(&ctx.parse("1/3").unwrap(), &ctx.ratio(1, 3), 0.0));
        assert!(ctx.parse("one").is_err());
    }

    #[test]
    fn angle_range() {
        let ctx = PrecisionContext::double();
        assert!(Angle::new(ctx.pi(), &ctx).is_ok());
        assert!(Angle::new(ctx.float(-0.1), &ctx).is_err());
        assert!(Angle::new(ctx.float(3.2), &ctx).is_err());
    }

    #[test]
    fn log10_of_tiny_values() {
        let ctx = PrecisionContext::new(3322).unwrap();
        let x = ctx.pow2(-3000);
        assert!((log10_abs(&x) + 3000.0 * std::f64::consts::LOG10_2).abs() < 1e-9);
    }
}

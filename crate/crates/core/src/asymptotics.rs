//! Closed-form approximations of the even-index eigenvalues.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{g, g_prime, g_second, PrecisionContext};
use crate::solvers::check_index;
use crate::symbolfns::{d_nj, eta, eta_prime, eta_tilde, eta_tilde_prime, AlphaParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionOrder {
    /// `theta ~ d + eta(d)/n`, error `O(1/n^2)`.
    ThetaFirst,
    /// `lambda ~ Lambda_{alpha,n}(d)`, error `O(1/n^3)`.
    LambdaSecond,
    /// The same expansion around `j pi / (n+1)` with `eta~`, error `O(1/n^3)`.
    LambdaSecondAlt,
    /// `lambda ~ j^2 pi^2/n^2 - 2 j^2 (1-a) pi^2 / (a n^3)`, error `O(j^4/n^4)`.
    SmallJ,
}

impl ExpansionOrder {
    /// Power of `1/n` in the error term.
    pub fn error_decay(self) -> u32 {
        match self {
            ExpansionOrder::ThetaFirst => 2,
            ExpansionOrder::LambdaSecond | ExpansionOrder::LambdaSecondAlt => 3,
            ExpansionOrder::SmallJ => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticEstimate {
    pub value: Float,
    pub order: ExpansionOrder,
    pub claimed_error_decay: u32,
}

impl AsymptoticEstimate {
    fn new(value: Float, order: ExpansionOrder) -> Self {
        Self {
            value,
            order,
            claimed_error_decay: order.error_decay(),
        }
    }
}

/// `g(x) + g'(x) e / m + (g'(x) e e' + g''(x) e^2 / 2) / m^2`.
fn second_order_at(x: &Float, e: &Float, ep: &Float, m: u64, ctx: &PrecisionContext) -> Float {
    let p = ctx.bits();
    let gp = g_prime(x, ctx);
    let first = Float::with_val(p, &gp * e) / m;
    let second = gp * e * ep + g_second(x, ctx) * Float::with_val(p, e.square_ref()) / 2u32;
    g(x, ctx) + first + second / (m * m)
}

/// `d + eta(d)/n` with `d = (j-1) pi / n`; within `pi K1 / n^2` of `theta_j`.
pub fn theta_first_order(
    a: &AlphaParam,
    n: usize,
    j: usize,
    ctx: &PrecisionContext,
) -> Result<AsymptoticEstimate> {
    check_index(n, j)?;
    let d = d_nj(n, j, ctx);
    let value = Float::with_val(ctx.bits(), eta(a, &d, ctx) / n as u64) + d;
    Ok(AsymptoticEstimate::new(value, ExpansionOrder::ThetaFirst))
}

/// `pi K1 / n^2`.
pub fn theta_first_order_bound(a: &AlphaParam, n: usize, ctx: &PrecisionContext) -> Float {
    a.k1(ctx) * ctx.pi() / (n as u64 * n as u64)
}

/// `Lambda_{alpha,n}(d)` with `d = (j-1) pi / n`.
pub fn lambda_second_order(
    a: &AlphaParam,
    n: usize,
    j: usize,
    ctx: &PrecisionContext,
) -> Result<AsymptoticEstimate> {
    check_index(n, j)?;
    let d = d_nj(n, j, ctx);
    let value = second_order_at(&d, &eta(a, &d, ctx), &eta_prime(a, &d, ctx), n as u64, ctx);
    Ok(AsymptoticEstimate::new(value, ExpansionOrder::LambdaSecond))
}

/// The expansion around `x = j pi / (n+1)` in powers of `1/(n+1)` with `eta~`;
/// exact when `Re(alpha) = 1/2`.
pub fn lambda_second_order_alt(
    a: &AlphaParam,
    n: usize,
    j: usize,
    ctx: &PrecisionContext,
) -> Result<AsymptoticEstimate> {
    check_index(n, j)?;
    let x = ctx.pi_ratio(j as i64, n as i64 + 1);
    let value = second_order_at(
        &x,
        &eta_tilde(a, &x, ctx),
        &eta_tilde_prime(a, &x, ctx),
        n as u64 + 1,
        ctx,
    );
    Ok(AsymptoticEstimate::new(
        value,
        ExpansionOrder::LambdaSecondAlt,
    ))
}

/// `j^2 pi^2 / n^2 - 2 j^2 (1 - a) pi^2 / (a n^3)` with `a = Re(alpha)`, for `j << n`.
pub fn lambda_small_j(
    a: &AlphaParam,
    n: usize,
    j: usize,
    ctx: &PrecisionContext,
) -> Result<AsymptoticEstimate> {
    check_index(n, j)?;
    let p = ctx.bits();
    let jpi = ctx.pi_ratio(j as i64, n as i64);
    let lead = Float::with_val(p, jpi.square_ref());
    let skew = Float::with_val(p, 1 - a.re()) / a.re();
    let correction = Float::with_val(p, &lead * &skew) * 2u32 / n as u64;
    Ok(AsymptoticEstimate::new(
        lead - correction,
        ExpansionOrder::SmallJ,
    ))
}

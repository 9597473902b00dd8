//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.
//!
//! Criteria 4, 5 and 8 share one sweep: every rational weight with
//! denominator at most 10, every order 3..=64, 3322-bit arithmetic.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;

use cycle_laplacian::charpoly::{build_l, ProblemInstance};
use cycle_laplacian::cli::{compute_table, rational_grid, TableKind};
use cycle_laplacian::numerics::{g, log10_abs};
use cycle_laplacian::oracle::dense_sym_eig;
use cycle_laplacian::solvers::{
    solve_theta_bisection, solve_theta_fixed_point, solve_theta_newton, Method,
};
use cycle_laplacian::spectrum::{eigenvector_coords, euclidean_norm, full_spectrum, residual};
use cycle_laplacian::{AlphaParam, PrecisionContext, EXPERIMENT_BITS};

const SWEEP_ORDERS: std::ops::RangeInclusive<usize> = 3..=64;
const RESIDUAL_EXP: f64 = -990.0;
const AGREEMENT_EXP: f64 = -980.0;
const RATE_SLACK: f64 = 1e-3;
/// Newton errors below this are too close to the working precision for a
/// ratio to mean anything.
const RATE_FLOOR_EXP: f64 = -950.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(k: usize, title: &str, secs: f64, o: &Outcome) {
    println!(
        "criterion {k} {title}: {} | {} | {secs:.1} s",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
}

fn table(kind: TableKind, ctx: &PrecisionContext) -> Outcome {
    let cells = match compute_table(kind, &kind.default_alphas(), &[256, 512], ctx) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    let mut worst = 0f64;
    let mut pass = true;
    let mut cols = Vec::new();
    for c in &cells {
        let dev = c.deviation().expect("reference cell");
        worst = worst.max(dev);
        pass &= dev <= kind.tolerance();
        cols.push(format!("{:.2}", c.scaled));
    }
    let detail = format!(
        "cells [{}], worst deviation {:.2}% (limit {}%)",
        cols.join(", "),
        100.0 * worst,
        100.0 * kind.tolerance()
    );
    Outcome {
        pass: pass && !cells.is_empty(),
        detail,
    }
}

/// Worst values seen for one `(alpha, n)` in the shared sweep (base-10 logs
/// for the tiny quantities).
#[derive(Default, Clone, Copy)]
struct SweepStats {
    residual: f64,
    bisection_gap: f64,
    fixed_point_gap: f64,
    fixed_point_cases: usize,
    /// max of `e_{m+1} / e_m - gamma`
    linear_excess: f64,
    /// max of `e_{m+1} / (M e_m^2)` with `M = K2 / 2n`
    quadratic_ratio: f64,
    rate_pairs: usize,
}

impl SweepStats {
    fn empty() -> Self {
        SweepStats {
            residual: f64::NEG_INFINITY,
            bisection_gap: f64::NEG_INFINITY,
            fixed_point_gap: f64::NEG_INFINITY,
            linear_excess: f64::NEG_INFINITY,
            quadratic_ratio: 0.0,
            ..Default::default()
        }
    }

    fn merge(mut self, o: SweepStats) -> Self {
        self.residual = self.residual.max(o.residual);
        self.bisection_gap = self.bisection_gap.max(o.bisection_gap);
        self.fixed_point_gap = self.fixed_point_gap.max(o.fixed_point_gap);
        self.fixed_point_cases += o.fixed_point_cases;
        self.linear_excess = self.linear_excess.max(o.linear_excess);
        self.quadratic_ratio = self.quadratic_ratio.max(o.quadratic_ratio);
        self.rate_pairs += o.rate_pairs;
        self
    }
}

fn abs_diff(x: &Float, y: &Float) -> Float {
    Float::with_val(x.prec(), x - y).abs()
}

fn sweep_one(
    pq: (i64, i64),
    n: usize,
    ctx: &PrecisionContext,
) -> cycle_laplacian::Result<SweepStats> {
    let p = ctx.bits();
    let alpha = AlphaParam::ratio(pq.0, pq.1, ctx)?;
    let inst = ProblemInstance::new(alpha.clone(), n)?;
    let k = alpha.constants(n, ctx);
    let gamma = k.gamma_n.to_f64();
    let m_quad = Float::with_val(p, &k.k2 / (2 * n as u32));
    let quad_regime = (n as f64) > (std::f64::consts::PI * k.k2.to_f64() / 2.0).sqrt();
    let contractive = (n as f64) > k.k1.to_f64();

    let mut st = SweepStats::empty();
    for j in 1..=n {
        let (theta, lambda) = if j % 2 == 1 {
            let th = ctx.pi_ratio(j as i64 - 1, n as i64);
            let l = g(&th, ctx);
            (th, l)
        } else {
            let newton = solve_theta_newton(&alpha, n, j, None, ctx, None)?;
            let lambda = g(&newton.root, ctx);
            let bis = solve_theta_bisection(&alpha, n, j, ctx, None)?;
            st.bisection_gap = st
                .bisection_gap
                .max(log10_abs(&abs_diff(&lambda, &g(&bis.root, ctx))));
            if contractive {
                let fp = solve_theta_fixed_point(&alpha, n, j, None, ctx, None)?;
                st.fixed_point_gap = st
                    .fixed_point_gap
                    .max(log10_abs(&abs_diff(&lambda, &g(&fp.root, ctx))));
                st.fixed_point_cases += 1;
            }
            // convergence rates against the bisection root
            let errs: Vec<Float> = newton
                .trace
                .iter()
                .map(|y| abs_diff(y, &bis.root))
                .collect();
            for w in errs.windows(2) {
                if log10_abs(&w[1]) < RATE_FLOOR_EXP || w[0].is_zero() {
                    continue;
                }
                st.rate_pairs += 1;
                let ratio = Float::with_val(p, &w[1] / &w[0]).to_f64();
                st.linear_excess = st.linear_excess.max(ratio - gamma);
                if quad_regime && !m_quad.is_zero() {
                    let sq = Float::with_val(p, w[0].square_ref());
                    let q = Float::with_val(p, &w[1] / (sq * &m_quad)).to_f64();
                    st.quadratic_ratio = st.quadratic_ratio.max(q);
                }
            }
            (newton.root, lambda)
        };
        let v = eigenvector_coords(&inst, j, &theta, ctx)?;
        let norm = euclidean_norm(&v, ctx);
        let r = residual(&inst, &lambda, &v, ctx) / norm;
        st.residual = st.residual.max(log10_abs(&r));
    }
    Ok(st)
}

fn sweep(ctx: &PrecisionContext) -> cycle_laplacian::Result<SweepStats> {
    let alphas = rational_grid(10);
    let mut total = SweepStats::empty();
    // orders outermost so each order's bisection tables are built once
    for n in SWEEP_ORDERS {
        let part = alphas
            .par_iter()
            .map(|&pq| sweep_one(pq, n, ctx))
            .try_reduce(SweepStats::empty, |a, b| Ok(a.merge(b)))?;
        total = total.merge(part);
    }
    Ok(total)
}

fn oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let alphas: Vec<f64> = (0..20).map(|_| rng.gen_range(0.02..0.98)).collect();
    let mut detail = Vec::new();
    let mut pass = true;
    for (bits, limit) in [(53u32, 1e-12f64), (200, 1e-40)] {
        let ctx = PrecisionContext::new(bits).unwrap();
        let mut worst = 0f64;
        for &a in &alphas {
            let alpha = AlphaParam::real(ctx.float(a), &ctx).unwrap();
            for n in 3..=24 {
                let inst = ProblemInstance::new(alpha.clone(), n).unwrap();
                let ours = full_spectrum(&inst, Method::Newton, &ctx, None).unwrap();
                let theirs = dense_sym_eig(&build_l(&inst, &ctx), &ctx, None).unwrap();
                for (x, y) in ours.lambdas.iter().zip(&theirs.lambdas) {
                    worst = worst.max(abs_diff(x, y).to_f64());
                }
            }
        }
        pass &= worst < limit;
        detail.push(format!(
            "{bits} bits: max gap {worst:.2e} (limit {limit:.0e})"
        ));
    }
    Outcome {
        pass,
        detail: detail.join("; "),
    }
}

fn property_suite() -> Outcome {
    let mut failed = Vec::new();
    let suite = common::suite();
    for p in &suite {
        if let Err(e) = p.check() {
            failed.push(format!("{}: {}", p.name, e.lines().next().unwrap_or("")));
        }
    }
    let detail = if failed.is_empty() {
        format!("{} properties green", suite.len())
    } else {
        failed.join("; ")
    };
    Outcome {
        pass: failed.is_empty(),
        detail,
    }
}

fn oracle_and_properties(record: &mut impl FnMut(usize, &str, f64, Outcome)) {
    let t = Instant::now();
    let o = oracle_agreement();
    record(
        6,
        "agreement with the dense eigensolver, n <= 24",
        t.elapsed().as_secs_f64(),
        o,
    );
    let t = Instant::now();
    let o = property_suite();
    record(7, "property suite", t.elapsed().as_secs_f64(), o);
}

fn main() -> ExitCode {
    let ctx = PrecisionContext::new(EXPERIMENT_BITS).unwrap();
    let mut all = true;
    let mut record = |k: usize, title: &str, secs: f64, o: Outcome| {
        report(k, title, secs, &o);
        all &= o.pass;
    };

    let t = Instant::now();
    let o = table(TableKind::AsymptT1, &ctx);
    record(
        1,
        "asymptotic error table, n = 256 and 512",
        t.elapsed().as_secs_f64(),
        o,
    );
    let t = Instant::now();
    let o = table(TableKind::Newton2T2, &ctx);
    record(
        2,
        "two-step Newton error table, n = 256 and 512",
        t.elapsed().as_secs_f64(),
        o,
    );
    let t = Instant::now();
    let o = table(TableKind::SmalljT3, &ctx);
    record(
        3,
        "small-j expansion table, n = 256 and 512",
        t.elapsed().as_secs_f64(),
        o,
    );

    let t = Instant::now();
    let swept = sweep(&ctx);
    let sweep_secs = t.elapsed().as_secs_f64();
    match swept {
        Ok(s) => {
            record(
                4,
                "eigenpair residuals over the rational sweep",
                sweep_secs,
                Outcome {
                    pass: s.residual < RESIDUAL_EXP,
                    detail: format!("max residual 1e{:.1} (limit 1e{RESIDUAL_EXP})", s.residual),
                },
            );
            record(
                5,
                "Newton vs bisection and fixed point",
                sweep_secs,
                Outcome {
                    pass: s.bisection_gap < AGREEMENT_EXP && s.fixed_point_gap < AGREEMENT_EXP && s.fixed_point_cases > 0,
                    detail: format!(
                        "bisection gap 1e{:.1}, fixed-point gap 1e{:.1} over {} roots (limit 1e{AGREEMENT_EXP})",
                        s.bisection_gap, s.fixed_point_gap, s.fixed_point_cases
                    ),
                },
            );
            oracle_and_properties(&mut record);
            record(
                8,
                "Newton convergence rates",
                sweep_secs,
                Outcome {
                    pass: s.linear_excess <= RATE_SLACK && s.quadratic_ratio <= 1.0 + RATE_SLACK && s.rate_pairs > 0,
                    detail: format!(
                        "{} step pairs; max(e'/e - gamma) = {:.3e}, max e'/(M e^2) = {:.4} (limits {RATE_SLACK}, {})",
                        s.rate_pairs,
                        s.linear_excess,
                        s.quadratic_ratio,
                        1.0 + RATE_SLACK
                    ),
                },
            );
        }
        Err(e) => {
            for (k, title) in [
                (4, "eigenpair residuals"),
                (5, "cross-method agreement"),
                (8, "Newton convergence rates"),
            ] {
                record(
                    k,
                    title,
                    sweep_secs,
                    Outcome {
                        pass: false,
                        detail: format!("sweep failed: {e}"),
                    },
                );
            }
            oracle_and_properties(&mut record);
        }
    }

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

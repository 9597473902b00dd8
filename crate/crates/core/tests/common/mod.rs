//! Property checks shared by the proptest suite and the acceptance run.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};
use rug::Float;

use cycle_laplacian::charpoly::{
    build_a, build_l, charpoly_a, charpoly_l, charpoly_l_real, factor_p, factor_q,
    CornerPerturbation, ProblemInstance,
};
use cycle_laplacian::numerics::{g, log10_abs};
use cycle_laplacian::oracle::dense_det;
use cycle_laplacian::solvers::{solve_theta_bisection, Method};
use cycle_laplacian::spectrum::{eigenvector, euclidean_norm, full_spectrum, residual, solve_even};
use cycle_laplacian::symbolfns::{eta, eta_by, eta_prime, eta_second, EtaFormula};
use cycle_laplacian::{AlphaParam, Cplx, PrecisionContext};

pub const BITS: u32 = 128;

pub fn ctx(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits).unwrap()
}

pub fn real_alpha(a: f64, c: &PrecisionContext) -> AlphaParam {
    AlphaParam::real(c.float(a), c).unwrap()
}

fn diff(x: &Float, y: &Float) -> Float {
    Float::with_val(x.prec().max(y.prec()), x - y).abs()
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    0.02f64..0.98
}

/// Even `j` in `2..=n`.
fn even_index(n: usize, pick: usize) -> usize {
    2 * (1 + pick % (n / 2))
}

pub struct Property {
    pub name: &'static str,
    pub cases: u32,
    pub run: fn(&mut TestRunner) -> Result<(), String>,
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(
        config.clone(),
        TestRng::deterministic_rng(config.rng_algorithm),
    )
}

impl Property {
    pub fn check(&self) -> Result<(), String> {
        (self.run)(&mut runner(self.cases))
    }
}

fn localization(r: &mut TestRunner) -> Result<(), String> {
    r.run(&(alpha_strategy(), 3usize..=512), |(a, n)| {
        let c = ctx(BITS);
        let inst = ProblemInstance::new(real_alpha(a, &c), n).unwrap();
        let spec = full_spectrum(&inst, Method::Newton, &c, None).unwrap();
        for j in 1..=n {
            let lo = c.pi_ratio(j as i64 - 1, n as i64);
            if j % 2 == 1 {
                prop_assert_eq!(spec.lambda(j), &g(&lo, &c), "odd j = {}", j);
            } else {
                let hi = c.pi_ratio(j as i64, n as i64);
                let th = spec.theta(j);
                prop_assert!(
                    *th > lo && *th < hi,
                    "theta_{} = {} outside its interval",
                    j,
                    th
                );
            }
        }
        Ok(())
    })
    .map_err(|e| e.to_string())
}

fn trace(r: &mut TestRunner) -> Result<(), String> {
    r.run(
        &(alpha_strategy(), -1.0f64..1.0, 3usize..=256),
        |(a, b, n)| {
            let c = ctx(BITS);
            let alpha = AlphaParam::new(c.float(a), c.float(b), &c).unwrap();
            let inst = ProblemInstance::new(alpha, n).unwrap();
            let spec = full_spectrum(&inst, Method::Newton, &c, None).unwrap();
            let sum = spec.lambdas.iter().fold(c.zero(), |s, x| s + x);
            let want = c.float(a) * 2u32 + (2 * n as u32 - 2);
            let bound = c.eps() * (1000 * n as u32);
            prop_assert!(
                diff(&sum, &want) <= bound,
                "trace off by {}",
                diff(&sum, &want)
            );
            Ok(())
        },
    )
    .map_err(|e| e.to_string())
}

fn eta_identities(r: &mut TestRunner) -> Result<(), String> {
    r.run(&(1usize..=9, 1usize..64), |(tenth, k)| {
        let c = ctx(BITS);
        let a = real_alpha(tenth as f64 / 10.0, &c);
        let x = c.pi_ratio(k as i64, 64);
        let bound = c.eps() * 1000u32;
        let y = eta(&a, &x, &c);
        prop_assert!(y >= 0 && y <= c.pi());
        prop_assert!(diff(&eta(&a, &y, &c), &x) <= bound, "involution");
        for f in EtaFormula::ALL {
            for h in EtaFormula::ALL {
                let d = diff(&eta_by(f, &a, &x, &c), &eta_by(h, &a, &x, &c));
                prop_assert!(d <= bound, "{:?} vs {:?}: {}", f, h, d);
            }
        }
        // strictly decreasing along the mesh
        let next = eta(&a, &c.pi_ratio(k as i64 + 1, 64), &c);
        prop_assert!(next < y);
        Ok(())
    })
    .map_err(|e| e.to_string())
}

fn eta_bounds(r: &mut TestRunner) -> Result<(), String> {
    r.run(&alpha_strategy(), |a| {
        let c = ctx(BITS);
        let alpha = real_alpha(a, &c);
        let k1 = alpha.k1(&c).to_f64();
        let k2 = alpha.k2(&c).to_f64();
        let slack = 1.0 + 1e-30;
        let mut max1 = 0f64;
        for k in 0..=256 {
            let x = c.pi_ratio(k, 256);
            let d1 = eta_prime(&alpha, &x, &c).to_f64().abs();
            prop_assert!(d1 <= k1 * slack, "|eta'| = {} > K1 = {}", d1, k1);
            max1 = max1.max(d1);
            let d2 = eta_second(&alpha, &x, &c).to_f64();
            prop_assert!(
                d2.abs() <= k2 * slack,
                "|eta''| = {} > K2 = {}",
                d2.abs(),
                k2
            );
            // convex below 1/2, concave above
            if a < 0.5 {
                prop_assert!(d2 >= 0.0);
            } else if a > 0.5 {
                prop_assert!(d2 <= 0.0);
            }
        }
        let ends = eta_prime(&alpha, &c.zero(), &c)
            .to_f64()
            .abs()
            .max(eta_prime(&alpha, &c.pi(), &c).to_f64().abs());
        prop_assert!(ends >= 0.99 * k1, "endpoint slope {} vs K1 {}", ends, k1);
        prop_assert!(max1 >= 0.99 * k1);
        Ok(())
    })
    .map_err(|e| e.to_string())
}

/// Every method's certificate covers its distance to a 4x-precision bisection root.
fn certificate_soundness(r: &mut TestRunner) -> Result<(), String> {
    r.run(
        &(alpha_strategy(), 3usize..=200, any::<usize>()),
        |(a, n, pick)| {
            let c = ctx(BITS);
            let hi = ctx(4 * BITS);
            let j = even_index(n, pick);
            let alpha = real_alpha(a, &c);
            let truth = solve_theta_bisection(&real_alpha(a, &hi), n, j, &hi, None)
                .unwrap()
                .root;
            let mut methods = vec![Method::Newton, Method::Bisection];
            if (n as f64) > alpha.k1(&c).to_f64() {
                methods.push(Method::FixedPoint);
            }
            for m in methods {
                let rep = solve_even(&alpha, n, j, m, &c, None).unwrap();
                let err = diff(&rep.root, &truth);
                prop_assert!(
                    err <= rep.certified_error,
                    "{} at n={} j={}: error 10^{:.1} above certificate 10^{:.1}",
                    m,
                    n,
                    j,
                    log10_abs(&err),
                    log10_abs(&rep.certified_error)
                );
                // Newton iterates stay in the closed interval
                let lo = c.pi_ratio(j as i64 - 1, n as i64);
                let up = c.pi_ratio(j as i64, n as i64);
                prop_assert!(rep.trace.iter().all(|y| *y >= lo && *y <= up));
            }
            Ok(())
        },
    )
    .map_err(|e| e.to_string())
}

fn half_collapse(r: &mut TestRunner) -> Result<(), String> {
    r.run(&(3usize..=200, 0usize..3), |(n, m)| {
        let c = ctx(BITS);
        let method = [Method::Newton, Method::Bisection, Method::FixedPoint][m];
        let inst = ProblemInstance::new(AlphaParam::ratio(1, 2, &c).unwrap(), n).unwrap();
        let spec = full_spectrum(&inst, method, &c, None).unwrap();
        let tol = c.default_tol() * 4u32;
        for j in 1..=n {
            let want = if j % 2 == 1 {
                g(&c.pi_ratio(j as i64 - 1, n as i64), &c)
            } else {
                g(&c.pi_ratio(j as i64, n as i64 + 1), &c)
            };
            prop_assert!(diff(spec.lambda(j), &want) <= tol, "j = {}", j);
        }
        Ok(())
    })
    .map_err(|e| e.to_string())
}

fn complex_invariance(r: &mut TestRunner) -> Result<(), String> {
    let sample = (0.0f64..4.0, -1.0f64..1.0);
    r.run(
        &(
            alpha_strategy(),
            -2.0f64..2.0,
            3usize..=30,
            prop::collection::vec(sample, 20),
        ),
        |(a, b, n, lams)| {
            let c = ctx(BITS);
            let re = ProblemInstance::new(real_alpha(a, &c), n).unwrap();
            let cx = ProblemInstance::new(AlphaParam::new(c.float(a), c.float(b), &c).unwrap(), n)
                .unwrap();
            for (x, y) in lams {
                let lam = Cplx::new(c.float(x), c.float(y));
                let d0 = charpoly_l(&re, &lam, &c);
                let d1 = charpoly_l(&cx, &lam, &c);
                let scale = Float::with_val(BITS, d0.abs() + 1u32);
                let gap = d0.sub(&d1).abs() / scale;
                prop_assert!(gap <= c.pow2(40 - BITS as i32), "n={} gap {}", n, gap);
            }
            Ok(())
        },
    )
    .map_err(|e| e.to_string())
}

fn factorization(r: &mut TestRunner) -> Result<(), String> {
    r.run(
        &(alpha_strategy(), 3usize..=40, 0.001f64..1.999),
        |(a, n, t)| {
            let c = ctx(BITS);
            let inst = ProblemInstance::new(real_alpha(a, &c), n).unwrap();
            let t = c.float(t);
            let lam = Float::with_val(BITS, 4u32 - Float::with_val(BITS, t.square_ref()));
            let d = charpoly_l_real(&inst, &lam, &c);
            let lhs = Float::with_val(BITS, &t * &d);
            let mut rhs = factor_p(n, &t, &c) * factor_q(&inst, &t, &c) * 2u32;
            if n % 2 == 1 {
                rhs = -rhs;
            }
            let scale = Float::with_val(BITS, d.abs_ref()) + 1u32;
            prop_assert!(diff(&lhs, &rhs) <= c.pow2(40 - BITS as i32) * scale);
            Ok(())
        },
    )
    .map_err(|e| e.to_string())
}

fn determinant(r: &mut TestRunner) -> Result<(), String> {
    let entry = (-1.0f64..1.0, -1.0f64..1.0);
    r.run(
        &(
            3usize..=12,
            [
                entry.clone(),
                entry.clone(),
                entry.clone(),
                entry.clone(),
                entry,
            ],
        ),
        |(n, z)| {
            let c = ctx(200);
            let cz = |k: usize| Cplx::new(c.float(z[k].0), c.float(z[k].1));
            let cp = CornerPerturbation::new(cz(0), cz(1), cz(2), cz(3));
            let lam = cz(4).add(&Cplx::real(&c, 2));
            let fast = charpoly_a(&cp, n, &lam, &c);
            let dense = dense_det(&build_a(&cp, n, &c).unwrap().shifted_negative(&lam), &c);
            let rel = fast.sub(&dense).abs() / Float::with_val(200, dense.abs() + c.pow2(-100));
            prop_assert!(rel < 1e-20, "n = {} relative gap {}", n, rel);
            Ok(())
        },
    )
    .map_err(|e| e.to_string())
}

fn monotonicity(r: &mut TestRunner) -> Result<(), String> {
    r.run(
        &(0.02f64..0.97, 0.001f64..0.5, 3usize..=128, any::<usize>()),
        |(a, step, n, pick)| {
            let c = ctx(BITS);
            let b = (a + step).min(0.98);
            prop_assume!(b > a);
            let j = even_index(n, pick);
            let lo = solve_even(&real_alpha(a, &c), n, j, Method::Newton, &c, None)
                .unwrap()
                .root;
            let hi = solve_even(&real_alpha(b, &c), n, j, Method::Newton, &c, None)
                .unwrap()
                .root;
            prop_assert!(
                g(&lo, &c) < g(&hi, &c),
                "alpha {} -> {} at n={} j={}",
                a,
                b,
                n,
                j
            );
            Ok(())
        },
    )
    .map_err(|e| e.to_string())
}

fn eigenvectors(r: &mut TestRunner) -> Result<(), String> {
    r.run(
        &(alpha_strategy(), -1.0f64..1.0, 3usize..=64, any::<usize>()),
        |(a, b, n, pick)| {
            let c = ctx(BITS);
            let alpha = AlphaParam::new(c.float(a), c.float(b), &c).unwrap();
            let inst = ProblemInstance::new(alpha, n).unwrap();
            let j = 1 + pick % n;
            let theta = if j % 2 == 1 {
                c.pi_ratio(j as i64 - 1, n as i64)
            } else {
                solve_even(&inst.alpha, n, j, Method::Newton, &c, None)
                    .unwrap()
                    .root
            };
            let v = eigenvector(&inst, j, &theta, &c).unwrap();
            let norm = euclidean_norm(&v.coords, &c);
            let res = residual(&inst, &g(&theta, &c), &v.coords, &c) / &norm;
            prop_assert!(res < c.pow2(40 - BITS as i32), "residual {}", res);
            let root_n = Float::with_val(BITS, n as u32).sqrt();
            prop_assert!(diff(&norm, &v.exact_norm) <= c.eps() * 1000u32 * root_n * &norm);
            // row sums of the dense matrix vanish in every row but the first
            let l = build_l(&inst, &c);
            let ones = vec![Cplx::real(&c, 1); n];
            let sums = l.matvec(&ones);
            prop_assert!(sums[1..].iter().all(Cplx::is_zero));
            Ok(())
        },
    )
    .map_err(|e| e.to_string())
}

pub fn suite() -> Vec<Property> {
    vec![
        Property {
            name: "localization-and-odd-closed-forms",
            cases: 1000,
            run: localization,
        },
        Property {
            name: "trace-identity",
            cases: 200,
            run: trace,
        },
        Property {
            name: "eta-involution-equivalence-monotone",
            cases: 576,
            run: eta_identities,
        },
        Property {
            name: "eta-derivative-bounds",
            cases: 200,
            run: eta_bounds,
        },
        Property {
            name: "certified-error-soundness",
            cases: 500,
            run: certificate_soundness,
        },
        Property {
            name: "half-weight-collapse",
            cases: 100,
            run: half_collapse,
        },
        Property {
            name: "complex-alpha-charpoly-invariance",
            cases: 100,
            run: complex_invariance,
        },
        Property {
            name: "charpoly-factorization",
            cases: 200,
            run: factorization,
        },
        Property {
            name: "determinant-equivalence",
            cases: 200,
            run: determinant,
        },
        Property {
            name: "alpha-monotonicity",
            cases: 300,
            run: monotonicity,
        },
        Property {
            name: "eigenvector-residual-and-norm",
            cases: 200,
            run: eigenvectors,
        },
    ]
}

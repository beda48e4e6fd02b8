//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the measured numbers (visible with `--nocapture`).
//!
//! Criterion 8 (the command-line contract) lives in the CLI crate's own
//! `acceptance` test target.

mod common;

use fracbvp_core::fracops::{caputo_monomial, rl_quadrature_oracle, FracOrder};
use fracbvp_core::polybasis::{inner, Polynomial};
use fracbvp_core::rkhs::{kernel_0w, kernel_eval, kernel_threepoint, verify_reproducing};
use fracbvp_core::solver::{self, coeff_fn, manufacture, rhs_fn, solve, SolveReport, SolverConfig};
use fracbvp_core::Real;

fn report_line(id: &str, name: &str, passed: bool, detail: &str) {
    println!(
        "acceptance {id} ({name}): {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
}

fn grid_01_to_09() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

fn errors_on(report: &SolveReport, exact: &Polynomial, grid: &[f64]) -> Vec<f64> {
    let full = report.full_solution();
    grid.iter()
        .map(|&x| (full.eval(x) - exact.eval(x)).abs())
        .collect()
}

#[test]
fn criterion_1_halfpoint_example_accuracy() {
    let spec = solver::examples::nonlinear_halfpoint(1.75, 0.75);
    let exact = spec.exact.clone().unwrap();
    let report = solve(&spec, &SolverConfig::new(5, 9)).unwrap();
    let interior = errors_on(&report, &exact, &grid_01_to_09());
    let max_interior = interior.iter().fold(0.0_f64, |a, &b| a.max(b));
    let constrained = errors_on(&report, &exact, &[0.0, 0.5, 1.0]);
    let max_constrained = constrained.iter().fold(0.0_f64, |a, &b| a.max(b));
    let passed = max_interior <= 1e-10 && max_constrained <= 1e-12;
    report_line(
        "1",
        "half-point example, m=5 n=9",
        passed,
        &format!("max grid error {max_interior:.3e} (<= 1e-10), constrained rows {max_constrained:.3e} (<= 1e-12)"),
    );
    assert!(passed);
}

#[test]
fn criterion_2_sixtenths_example_accuracy() {
    let spec = solver::examples::nonlinear_sixtenths(1.75, 0.75);
    let exact = spec.exact.clone().unwrap();
    let report = solve(&spec, &SolverConfig::new(5, 9)).unwrap();
    let errs = errors_on(&report, &exact, &grid_01_to_09());
    let max = errs.iter().fold(0.0_f64, |a, &b| a.max(b));
    let passed = max <= 1e-8;
    report_line(
        "2",
        "six-tenths example, m=5 n=9",
        passed,
        &format!("max grid error {max:.3e} (<= 1e-8)"),
    );
    assert!(passed);
}

#[test]
fn criterion_3_iteration_improvement_direction() {
    let pairs = [(2.0, 1.0), (1.9, 0.9), (1.8, 0.8), (1.7, 0.7), (1.6, 0.6)];
    let mut passed = true;
    let mut detail = String::new();

    // half-point example: n = 5 strictly better than n = 3, pointwise on
    // the table grid; the interior-point row is a structural zero on both
    // sides and is checked against 1e-12 instead
    for &(alpha, beta) in &pairs {
        let spec = solver::examples::nonlinear_halfpoint(alpha, beta);
        let exact = spec.exact.clone().unwrap();
        let e3 = errors_on(
            &solve(&spec, &SolverConfig::new(3, 3)).unwrap(),
            &exact,
            &grid_01_to_09(),
        );
        let e5 = errors_on(
            &solve(&spec, &SolverConfig::new(3, 5)).unwrap(),
            &exact,
            &grid_01_to_09(),
        );
        for (i, x) in grid_01_to_09().iter().enumerate() {
            if (x - spec.theta).abs() < 1e-12 {
                passed &= e3[i] <= 1e-12 && e5[i] <= 1e-12;
            } else {
                passed &= e5[i] < e3[i];
            }
        }
        let m3 = e3.iter().fold(0.0_f64, |a, &b| a.max(b));
        let m5 = e5.iter().fold(0.0_f64, |a, &b| a.max(b));
        detail.push_str(&format!("a={alpha}: {m3:.1e}->{m5:.1e}  "));
    }

    // six-tenths example: n = 10 strictly better than n = 8
    for &(alpha, beta) in &pairs {
        let spec = solver::examples::nonlinear_sixtenths(alpha, beta);
        let exact = spec.exact.clone().unwrap();
        let e8 = errors_on(
            &solve(&spec, &SolverConfig::new(3, 8)).unwrap(),
            &exact,
            &grid_01_to_09(),
        );
        let e10 = errors_on(
            &solve(&spec, &SolverConfig::new(3, 10)).unwrap(),
            &exact,
            &grid_01_to_09(),
        );
        for (i, x) in grid_01_to_09().iter().enumerate() {
            if (x - spec.theta).abs() < 1e-12 {
                passed &= e8[i] <= 1e-12 && e10[i] <= 1e-12;
            } else {
                passed &= e10[i] < e8[i];
            }
        }
    }

    report_line("3", "iteration improvement", passed, detail.trim_end());
    assert!(passed);
}

#[test]
fn criterion_4_caputo_oracle_suite() {
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for &a in &[0.25, 0.5, 0.75, 1.25, 1.5, 1.75] {
        let order = FracOrder::new(a).unwrap();
        let m = order.ceil();
        for k in m..=10 {
            let series = caputo_monomial(k, order);
            for &xi in &[0.2, 0.5, 0.9] {
                let classical = |s: f64| {
                    let mut c = 1.0;
                    for i in 0..m {
                        c *= (k - i) as f64;
                    }
                    c * s.powi((k - m) as i32)
                };
                let via_rl = rl_quadrature_oracle(classical, m as f64 - a, xi).unwrap();
                let closed = series.eval(xi).unwrap();
                worst = worst.max((via_rl - closed).abs());
                cases += 1;
            }
        }
    }
    let passed = worst <= 1e-7;
    report_line(
        "4",
        "caputo vs quadrature oracle",
        passed,
        &format!("{cases} cases, worst abs diff {worst:.3e} (<= 1e-7)"),
    );
    assert!(passed);
}

#[test]
fn criterion_5_kernel_suite() {
    let mut worst_ortho = 0.0_f64;
    let mut worst_sym = 0.0_f64;
    let mut worst_annihilate = 0.0_f64;
    let mut worst_reproducing = 0.0_f64;
    let mut worst_formula = 0.0_f64;
    let mut state = 0xACCE97ED_u64;
    let mut rand01 = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };

    for m in 3..=8 {
        for &theta in &[0.3, 0.5, 0.6] {
            let base = kernel_0w(m).unwrap();
            let kb = kernel_threepoint(m, theta).unwrap();
            for (i, hi) in kb.members().iter().enumerate() {
                for (j, hj) in kb.members().iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst_ortho = worst_ortho.max((inner(hi, hj) - want).abs());
                }
            }
            for _ in 0..20 {
                let (a, b) = (rand01(), rand01());
                worst_sym = worst_sym
                    .max((kernel_eval(&kb, a, b).unwrap() - kernel_eval(&kb, b, a).unwrap()).abs());
            }
            let rtt = kernel_eval(&base, theta, theta).unwrap();
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                worst_annihilate = worst_annihilate
                    .max(kernel_eval(&kb, 0.0, x).unwrap().abs())
                    .max(kernel_eval(&kb, 1.0, x).unwrap().abs())
                    .max(kernel_eval(&kb, theta, x).unwrap().abs());
                for j in 0..=20 {
                    let xi = j as f64 / 20.0;
                    let formula = kernel_eval(&base, x, xi).unwrap()
                        - kernel_eval(&base, x, theta).unwrap()
                            * kernel_eval(&base, theta, xi).unwrap()
                            / rtt;
                    worst_formula =
                        worst_formula.max((kernel_eval(&kb, x, xi).unwrap() - formula).abs());
                }
            }
            for _ in 0..5 {
                let mut p = Polynomial::zero();
                for h in kb.members() {
                    p = p.add(&h.scale(Real::from(rand01() * 2.0 - 1.0)));
                }
                for _ in 0..5 {
                    worst_reproducing =
                        worst_reproducing.max(verify_reproducing(&kb, &p, rand01()));
                }
            }
        }
    }
    let passed = worst_ortho <= 1e-12
        && worst_sym <= 1e-12
        && worst_annihilate <= 1e-11
        && worst_reproducing <= 1e-10
        && worst_formula <= 1e-10;
    report_line(
        "5",
        "kernel suite, m<=8",
        passed,
        &format!(
            "ortho {worst_ortho:.1e}, sym {worst_sym:.1e}, annihilation {worst_annihilate:.1e}, \
             reproducing {worst_reproducing:.1e}, formula {worst_formula:.1e}"
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_6_integer_order_oracle_equivalence() {
    struct Case {
        theta: f64,
        a0: fn(f64) -> f64,
        a1: fn(f64) -> f64,
        a2: fn(f64) -> f64,
    }
    let cases = [
        Case {
            theta: 0.5,
            a0: |x| x,
            a1: |x| x + 1.0,
            a2: |_| 1.0,
        },
        Case {
            theta: 0.6,
            a0: |x| x * x * x,
            a1: |x| x * x - 1.0,
            a2: |x| 1.0 + 0.5 * x * x,
        },
    ];
    let mut worst = 0.0_f64;
    for case in &cases {
        let exact = Polynomial::new(&[0.0, case.theta, -(1.0 + case.theta), 1.0]);
        let spec = manufacture(
            exact,
            case.theta,
            FracOrder::new(2.0).unwrap(),
            FracOrder::new(1.0).unwrap(),
            coeff_fn(case.a0),
            coeff_fn(case.a1),
            coeff_fn(case.a2),
            rhs_fn(|_, _, _| 0.0),
        )
        .unwrap();
        let g_of_x = {
            let g = spec.g.clone();
            move |x: f64| g(x, 0.0, 0.0)
        };
        for m in [4, 5] {
            let report = solve(&spec, &SolverConfig::new(m, 2)).unwrap();
            let oracle = common::dense_collocation_oracle(
                &case.a0, &case.a1, &case.a2, &g_of_x, case.theta, spec.gamma, m,
            );
            let full = report.full_solution();
            for i in 0..=10 {
                let x = i as f64 / 10.0;
                let diff = (full.eval(x) - common::eval_monomial(&oracle, x)).abs();
                worst = worst.max(diff);
            }
        }
    }
    let passed = worst <= 1e-9;
    report_line(
        "6",
        "integer-order vs dense least-squares oracle",
        passed,
        &format!("worst grid difference {worst:.3e} (<= 1e-9)"),
    );
    assert!(passed);
}

#[test]
fn criterion_7_convergence_in_m() {
    // degree-5 solution x (x - theta) (x - 1) (1 + x^2/4), linear problem,
    // errors at m = 5, 6, 7 with n = 10
    let theta = 0.5;
    let cubic = Polynomial::new(&[0.0, theta, -(1.0 + theta), 1.0]);
    let exact = cubic.mul(&Polynomial::new(&[1.0, 0.0, 0.25]));
    let run = |m: usize| -> f64 {
        let spec = manufacture(
            exact.clone(),
            theta,
            FracOrder::new(1.75).unwrap(),
            FracOrder::new(0.75).unwrap(),
            coeff_fn(|x| x),
            coeff_fn(|x| x + 1.0),
            coeff_fn(|_| 1.0),
            rhs_fn(|_, _, _| 0.0),
        )
        .unwrap();
        let report = solve(&spec, &SolverConfig::new(m, 10)).unwrap();
        errors_on(&report, &exact, &grid_01_to_09())
            .into_iter()
            .fold(0.0, f64::max)
    };
    let (e5, e6, e7) = (run(5), run(6), run(7));
    // context: below m = 5 the solution is not representable and the error
    // is genuine approximation error
    let (e3, e4) = (run(3), run(4));
    let passed = e6 < e5 && e7 < e6;
    report_line(
        "7",
        "convergence in m, 5 -> 6 -> 7",
        passed,
        &format!(
            "max grid errors: m=3 {e3:.3e}, m=4 {e4:.3e}, m=5 {e5:.3e}, m=6 {e6:.3e}, m=7 {e7:.3e}"
        ),
    );
    assert!(
        passed,
        "errors did not strictly decrease over m = 5 -> 6 -> 7: {e5:.3e}, {e6:.3e}, {e7:.3e}"
    );
}

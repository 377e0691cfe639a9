mod common;

use std::sync::OnceLock;

use approx::assert_relative_eq;
use dmfbm_core::fredholm::{
    assemble, operator_defect, weight_psi1, weight_psi2, SolutionMetadata, WeightTable,
};
use dmfbm_core::quad::QuadSettings;
use dmfbm_core::{
    manufactured_rhs, solve_mle_h, DiscreteSolution, Formulation, Grid, HurstPair, KernelModel,
    Solver, SolverConfig,
};
use rand::Rng;

fn model(h1: f64, h2: f64, t: f64) -> KernelModel {
    KernelModel::with_defaults(HurstPair::strict(h1, h2).unwrap(), t).unwrap()
}

fn reference() -> &'static DiscreteSolution {
    static SOL: OnceLock<DiscreteSolution> = OnceLock::new();
    SOL.get_or_init(|| solve_mle_h(&model(0.6, 0.7, 1.0), &SolverConfig::new(500)).unwrap())
}

#[test]
fn closed_form_weights_match_quadrature() {
    let mut r = common::rng(31);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let n = r.gen_range(2..=500);
        let t = r.gen_range(0.5..50.0);
        let g = r.gen_range(0.05..0.95);
        let i = r.gen_range(0..=n);
        let j = r.gen_range(0..=n);
        if j < n {
            let want = common::weight_by_quadrature(true, j, i, n, t, g);
            worst = worst.max(common::rel(weight_psi1(j, i, n, t, g), want));
        } else {
            assert_eq!(weight_psi1(j, i, n, t, g), 0.0);
        }
        if j > 0 {
            let want = common::weight_by_quadrature(false, j, i, n, t, g);
            worst = worst.max(common::rel(weight_psi2(j, i, n, t, g), want));
        } else {
            assert_eq!(weight_psi2(j, i, n, t, g), 0.0);
        }
    }
    assert!(worst <= 1e-10, "worst relative weight error {worst:e}");
}

#[test]
fn weight_diagonal_closed_form() {
    let (n, t, g) = (40, 3.0, 0.35);
    let d: f64 = t / n as f64;
    let want = d.powf(g) / (g * (g + 1.0));
    for i in 0..n {
        assert_relative_eq!(weight_psi1(i, i, n, t, g), want, max_relative = 1e-14);
    }
    let table = WeightTable::new(n, t, g);
    assert_relative_eq!(table.combined(5, 5), 2.0 * want, max_relative = 1e-14);
}

#[test]
fn zero_kernel_returns_rhs() {
    let m = model(0.6, 0.7, 2.0);
    let cfg = SolverConfig {
        kernel_scale: 0.0,
        ..SolverConfig::new(40)
    };
    let solver = Solver::new(&m, cfg).unwrap();
    let rhs = solver.mle_rhs().unwrap();
    let sol = solver.solve_rhs(&rhs).unwrap();
    assert_eq!(sol.values, rhs);
    let zero = manufactured_rhs(
        &m,
        |_| 0.0,
        &SolverConfig::new(40),
        &QuadSettings::default(),
    )
    .unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));
}

#[test]
fn assembled_entries_follow_clamped_kernel() {
    let m = model(0.6, 0.75, 1.0);
    let n = 16;
    let cfg = SolverConfig::new(n).with_cusp_correction(false);
    let a = assemble(&m, &cfg).unwrap();
    let grid = Grid::new(1.0, n).unwrap();
    let w = WeightTable::new(n, 1.0, m.hurst().gamma());
    let c = m.constants().c;
    let clamp = |x: f64| x.clamp(1.0 / n as f64, 1.0 - 1.0 / n as f64);
    for i in 0..=n {
        for j in 0..=n {
            let l = m.eval_l(clamp(grid.node(i)), clamp(grid.node(j))).unwrap();
            let want = c * l * w.combined(j, i) + if i == j { 1.0 } else { 0.0 };
            assert_relative_eq!(a[(i, j)], want, max_relative = 1e-13);
        }
    }
    // First and last columns use L at 1/N and T − 1/N.
    let first = m.eval_l(clamp(grid.node(8)), 1.0 / n as f64).unwrap();
    assert_relative_eq!(
        a[(8, 0)],
        c * first * w.combined(0, 8),
        max_relative = 1e-13
    );
}

#[test]
fn residual_is_small() {
    let sol = reference();
    assert!(
        sol.residual_ok(),
        "residual {} vs ‖G‖ {}",
        sol.residual_norm,
        sol.rhs_norm
    );
    assert_eq!(sol.values.len(), 501);
}

#[test]
fn solution_is_reflection_symmetric() {
    let sol = reference();
    let n = sol.values.len() - 1;
    for j in 0..=n {
        let (a, b) = (sol.values[j], sol.values[n - j]);
        assert!(
            common::rel(a, b) <= 1e-6,
            "h[{j}] = {a}, h[{}] = {b}",
            n - j
        );
    }
}

#[test]
fn operator_equation_defect() {
    let sol = reference();
    let defect = operator_defect(sol);
    let t = sol.grid.horizon();
    for (u, d) in sol.nodes().into_iter().zip(defect) {
        if u >= 0.05 * t && u <= 0.95 * t {
            assert!((d - 1.0).abs() <= 0.02, "(Γ₁ + Γ₂)h({u}) = {d}");
        }
    }
}

#[test]
fn manufactured_error_decreases_with_n() {
    let m = model(0.6, 0.7, 1.0);
    let quad = QuadSettings::with_tol(1e-10, 1e-10);
    let mut last = f64::INFINITY;
    for n in [50, 100, 200, 400] {
        let cfg = SolverConfig::new(n);
        let rhs = manufactured_rhs(&m, |s| s, &cfg, &quad).unwrap();
        let sol = Solver::new(&m, cfg).unwrap().solve_rhs(&rhs).unwrap();
        let err = sol
            .nodes()
            .iter()
            .zip(&sol.values)
            .filter(|(u, _)| **u >= 0.05 && **u <= 0.95)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        assert!(
            err <= last,
            "N = {n}: interior error {err:e} after {last:e}"
        );
        last = err;
    }
}

#[test]
fn tilde_and_direct_agree() {
    let m = model(0.65, 0.85, 3.0);
    let direct = solve_mle_h(&m, &SolverConfig::new(120)).unwrap();
    let tilde = solve_mle_h(
        &m,
        &SolverConfig::new(120).with_formulation(Formulation::Tilde),
    )
    .unwrap();
    assert!(tilde.residual_ok());
    for (u, (a, b)) in direct
        .nodes()
        .iter()
        .zip(direct.values.iter().zip(&tilde.values))
    {
        if *u > 0.0 && *u < 3.0 {
            assert!((a - b).abs() <= 1e-4, "h({u}): {a} vs {b}");
        }
    }
}

#[test]
fn relaxed_pair_needs_opt_in() {
    let h = HurstPair::relaxed(0.8, 0.9).unwrap();
    let m = KernelModel::with_defaults(h, 1.0).unwrap();
    assert!(solve_mle_h(&m, &SolverConfig::new(20)).is_err());
    let cfg = SolverConfig {
        allow_relaxed: true,
        ..SolverConfig::new(20)
    };
    assert!(solve_mle_h(&m, &cfg).is_ok());
}

#[test]
fn invalid_configs_are_rejected() {
    let m = model(0.6, 0.7, 1.0);
    assert!(solve_mle_h(&m, &SolverConfig::new(1)).is_err());
    assert!(solve_mle_h(&m, &SolverConfig::new(10).with_truncation(1)).is_err());
    let sol = solve_mle_h(&m, &SolverConfig::new(10)).unwrap();
    assert!(Solver::new(&m, SolverConfig::new(10))
        .unwrap()
        .solve_rhs(&[1.0; 3])
        .is_err());
    assert!(sol.resample(&Grid::new(2.0, 10).unwrap()).is_err());
}

#[test]
fn solution_files_round_trip() {
    let m = model(0.6, 0.7, 1.0);
    let sol = solve_mle_h(&m, &SolverConfig::new(30)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    sol.save(&path, serde_json::json!({"note": "test"}))
        .unwrap();

    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["t", "h"]);
    let rows: Vec<(f64, f64)> = reader.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 31);
    for ((t, h), (u, v)) in rows.iter().zip(sol.nodes().iter().zip(&sol.values)) {
        assert_eq!((t, h), (u, v));
    }
    let meta: SolutionMetadata =
        serde_json::from_reader(std::fs::File::open(path.with_extension("json")).unwrap()).unwrap();
    assert_eq!(meta.n_intervals, 30);
    assert_eq!(meta.config["note"], "test");
    assert_relative_eq!(
        meta.theoretical_variance * meta.integral,
        1.0,
        max_relative = 1e-15
    );
}

#[test]
fn interpolation_and_resampling() {
    let sol = solve_mle_h(&model(0.6, 0.7, 2.0), &SolverConfig::new(20)).unwrap();
    assert_eq!(sol.interpolate(0.0), sol.values[0]);
    assert_eq!(sol.interpolate(2.0), sol.values[20]);
    let mid = sol.interpolate(0.15);
    assert_relative_eq!(
        mid,
        0.5 * (sol.values[1] + sol.values[2]),
        max_relative = 1e-12
    );
    let fine = sol.resample(&Grid::new(2.0, 40).unwrap()).unwrap();
    assert_eq!(fine.len(), 41);
    assert_eq!(fine[2], sol.values[1]);
}

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use dmfbm_core::estimator::{run_montecarlo, HCache, MonteCarloConfig, MonteCarloSummary};
use dmfbm_core::fbm::{MixedGenerator, RngSpec};
use dmfbm_core::fredholm::{manufactured_rhs, solve_mle_h, Grid, Solver};
use dmfbm_core::quad::QuadSettings;
use dmfbm_core::{KernelModel, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;

fn write_sidecar<T: Serialize>(csv_path: &Path, value: &T) -> Result<()> {
    let file = BufWriter::new(File::create(csv_path.with_extension("json"))?);
    serde_json::to_writer_pretty(file, value)?;
    Ok(())
}

fn model(cfg: &RunConfig) -> Result<KernelModel> {
    KernelModel::new(cfg.hurst, cfg.horizon(), cfg.kernel())
}

#[derive(Serialize)]
struct SurfaceMeta {
    ell: f64,
    eps_diag: f64,
    table_deviation: f64,
    rows: usize,
    config: serde_json::Value,
}

/// (u, s, K, L) on the mesh u_i = T(i+1)/(R+1), skipping u = s.
pub fn kernel_surface(cfg: &RunConfig) -> Result<()> {
    let model = model(cfg)?;
    let t = cfg.horizon();
    let r = cfg.resolution;
    let mesh: Vec<f64> = (0..r)
        .map(|i| t * (i + 1) as f64 / (r + 1) as f64)
        .collect();
    let rows: Vec<Vec<[f64; 4]>> = mesh
        .par_iter()
        .map(|&u| {
            mesh.iter()
                .filter(|&&s| s != u)
                .map(|&s| Ok([u, s, model.eval_k(u, s)?, model.eval_l(u, s)?]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&cfg.out)?));
    w.write_record(["u", "s", "K", "L"])?;
    let mut count = 0;
    for row in rows.iter().flatten() {
        w.serialize(row)?;
        count += 1;
    }
    w.flush()?;
    write_sidecar(
        &cfg.out,
        &SurfaceMeta {
            ell: model.constants().ell,
            eps_diag: model.eps_diag(),
            table_deviation: model.table_deviation(),
            rows: count,
            config: cfg.json(),
        },
    )?;
    println!("wrote {count} points to {}", cfg.out.display());
    Ok(())
}

pub fn solve(cfg: &RunConfig) -> Result<()> {
    let model = model(cfg)?;
    let sol = solve_mle_h(&model, &cfg.solver())?;
    sol.save(&cfg.out, cfg.json())?;
    let int_h = sol.integral();
    println!(
        "{}  T = {}  N = {}  ∫h = {int_h:.8}  1/∫h = {:.8}  residual = {:.2e}",
        cfg.hurst,
        cfg.horizon(),
        cfg.n_intervals,
        1.0 / int_h,
        sol.residual_norm
    );
    println!("wrote {}", cfg.out.display());
    Ok(())
}

#[derive(Serialize)]
struct ValidationMeta {
    mean_abs_error: f64,
    max_abs_error: f64,
    interior_max_abs_error: f64,
    residual_norm: f64,
    rhs_seconds: f64,
    solve_seconds: f64,
    config: serde_json::Value,
}

/// Manufactured solution h(u) = u: per-node errors and summary.
pub fn validate(cfg: &RunConfig) -> Result<()> {
    let model = model(cfg)?;
    let solver_cfg = cfg.solver();
    let start = Instant::now();
    let quad = QuadSettings::with_tol(1e-10, 1e-10);
    let rhs = manufactured_rhs(&model, |s| s, &solver_cfg, &quad)?;
    let rhs_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let solver = Solver::new(&model, solver_cfg)?;
    let sol = solver.solve_rhs(&rhs)?;
    let solve_seconds = start.elapsed().as_secs_f64();

    let t = cfg.horizon();
    let nodes = sol.nodes();
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&cfg.out)?));
    w.write_record(["t", "exact", "numerical", "abs_error", "ln_abs_error"])?;
    let (mut sum, mut max, mut interior) = (0.0_f64, 0.0_f64, 0.0_f64);
    for (&u, &v) in nodes.iter().zip(&sol.values) {
        let e = (v - u).abs();
        w.serialize((u, u, v, e, e.ln()))?;
        sum += e;
        max = max.max(e);
        if u >= 0.05 * t && u <= 0.95 * t {
            interior = interior.max(e);
        }
    }
    w.flush()?;
    let meta = ValidationMeta {
        mean_abs_error: sum / nodes.len() as f64,
        max_abs_error: max,
        interior_max_abs_error: interior,
        residual_norm: sol.residual_norm,
        rhs_seconds,
        solve_seconds,
        config: cfg.json(),
    };
    write_sidecar(&cfg.out, &meta)?;
    println!(
        "mean |error| = {:.3e}  interior max = {:.3e}  max = {:.3e}  (rhs {:.1}s, solve {:.1}s)",
        meta.mean_abs_error, interior, max, rhs_seconds, solve_seconds
    );
    println!("wrote {}", cfg.out.display());
    Ok(())
}

pub fn simulate(cfg: &RunConfig) -> Result<()> {
    let grid = Grid::new(cfg.horizon(), cfg.n_intervals)?;
    let generator = MixedGenerator::new(cfg.hurst, grid, cfg.method)?;
    let path = generator.sample(cfg.theta, &RngSpec::new(cfg.seed, 0));
    path.save(&cfg.out, cfg.json())?;
    println!(
        "X_T = {:.6} ({} method), wrote {}",
        path.values[path.values.len() - 1],
        path.method,
        cfg.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct MonteCarloMeta<'a> {
    summaries: &'a [MonteCarloSummary],
    config: serde_json::Value,
}

pub fn montecarlo(cfg: &RunConfig) -> Result<()> {
    let cache = HCache::new(&cfg.cache)?;
    let mut summaries = Vec::with_capacity(cfg.t.len());
    println!(
        "{:>8} {:>6} {:>6} {:>10} {:>10} {:>10} {:>9}",
        "T", "H1", "H2", "mean", "emp.var", "theo.var", "std.err"
    );
    for &t in &cfg.t {
        let mc = MonteCarloConfig {
            path_intervals: cfg.path_intervals,
            method: cfg.method,
            kernel: cfg.kernel(),
            solver: cfg.solver(),
            ..MonteCarloConfig::new(
                cfg.hurst,
                t,
                cfg.replications,
                cfg.n_intervals,
                cfg.theta,
                cfg.seed,
            )
        };
        let s = run_montecarlo(&mc, Some(&cache))?;
        s.append_csv(&cfg.out)?;
        println!(
            "{:>8} {:>6} {:>6} {:>10.5} {:>10.5} {:>10.5} {:>9.5}",
            t, s.h1, s.h2, s.mean, s.empirical_variance, s.theoretical_variance, s.std_error
        );
        summaries.push(s);
    }
    write_sidecar(
        &cfg.out,
        &MonteCarloMeta {
            summaries: &summaries,
            config: cfg.json(),
        },
    )?;
    println!(
        "appended {} row(s) to {}",
        summaries.len(),
        cfg.out.display()
    );
    Ok(())
}

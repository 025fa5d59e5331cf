//! Subcommand bodies. Each builds one table, writes it, and returns the
//! one-line summary.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use lamptree::bounds::{
    correction_curve, delta_n, hypothesized_log_tail, kappa, optimize_trap_r, spectral_tail_estimate,
    target_constant, trap_bound, upper_split, witness_rank_experiment, CorrectionOptions,
    CorrectionSource,
};
use lamptree::percolation::{dense_ball_probability, extract_cluster, sphere_counts, PercolationConfig};
use lamptree::spectral::{
    calibrate_numerical_radius, eigen_count_above, shift_profile, sparse_ball_certificate, top_eigen_default,
    trap_spectrum, DEFAULT_THETA_GRID,
};
use lamptree::tree::{build_ball, descendant_counts, forward_subtree, SubtreeMask};
use lamptree::walks::{chain_sim, exact_return_prob, mc_return_prob, WalkBudget, DEFAULT_NODE_BUDGET};
use lamptree::{KilledOperator, McPlan, ReturnProbEstimate, StreamRng};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{emit, Cell, Format, Table};
use crate::Command;

pub const WALK_COLUMNS: &[&str] = &[
    "method",
    "d",
    "n",
    "value",
    "std_error",
    "samples",
    "seed",
    "wall_time_ms",
    "log_value",
    "exact",
];

pub const PERCOLATION_COLUMNS: &[&str] = &[
    "d",
    "r",
    "a",
    "samples",
    "estimate",
    "ci_low",
    "ci_high",
    "seed",
    "log_estimate",
];

pub const SPECTRAL_COLUMNS: &[&str] = &[
    "instance_id",
    "n_vertices",
    "top_eig",
    "root_mass",
    "residual",
    "method",
    "count_above",
    "truncated",
    "sphere_counts",
];

pub const CORRECTION_COLUMNS: &[&str] = &["n", "source", "L", "value_log"];

pub const WITNESS_COLUMNS: &[&str] = &[
    "sample_id",
    "|W|",
    "count",
    "max_component_eig",
    "hypothesis_ok",
    "implication_ok",
    "open_inner",
    "dense_count",
];

/// Resolved settings shared by every subcommand.
struct Ctx<'a> {
    config: &'a ExperimentConfig,
    seed: u64,
    threads: usize,
    deterministic: bool,
    timing: bool,
}

impl Ctx<'_> {
    fn plan(&self, samples: u64) -> McPlan {
        McPlan::new(samples, self.seed)
            .with_threads(self.threads)
            .deterministic(self.deterministic)
    }

    fn d(&self) -> CliResult<u32> {
        self.config.value_or("d", 3)
    }

    fn samples(&self, default: u64) -> CliResult<u64> {
        let s = self.config.value_or("samples", default)?;
        if s == 0 {
            return Err(CliError::invalid("samples", "0", "need at least one sample"));
        }
        Ok(s)
    }

    fn unit_interval(&self, key: &str, default: f64) -> CliResult<f64> {
        let v: f64 = self.config.value_or(key, default)?;
        if !(v > 0.0 && v < 1.0) {
            return Err(CliError::invalid(key, &v.to_string(), "must lie strictly between 0 and 1"));
        }
        Ok(v)
    }

    fn positive(&self, key: &str, default: f64) -> CliResult<f64> {
        let v: f64 = self.config.value_or(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::invalid(key, &v.to_string(), "must be positive"));
        }
        Ok(v)
    }

    /// Runs `body` inside a pool of the configured size; the CLI owns the
    /// pool for batch solves across instances.
    fn pool<T: Send>(&self, body: impl FnOnce() -> T + Send) -> CliResult<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| CliError::Lib(lamptree::Error::ThreadPool(e.to_string())))?;
        Ok(pool.install(body))
    }

    fn elapsed_ms(&self, start: Instant) -> Cell {
        if self.timing {
            Cell::Float(start.elapsed().as_secs_f64() * 1e3)
        } else {
            Cell::Empty
        }
    }
}

pub fn execute(command: Command, config: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<String> {
    let ctx = Ctx {
        config,
        seed: config.value_or("seed", 0)?,
        threads: config.value_or("threads", 1)?,
        deterministic: config.flag("deterministic-reduce")?,
        timing: config.flag("timing")?,
    };
    let (table, summary) = match command {
        Command::Exact => exact(&ctx)?,
        Command::Mc => mc(&ctx)?,
        Command::Chainsim => chainsim(&ctx)?,
        Command::Trap => trap(&ctx)?,
        Command::OptimizeTrap => optimize_trap(&ctx)?,
        Command::Spectrum => spectrum(&ctx)?,
        Command::Shift => shift(&ctx)?,
        Command::Certificate => certificate(&ctx)?,
        Command::DenseProb => dense_prob(&ctx)?,
        Command::WitnessRank => witness_rank(&ctx)?,
        Command::Correction => correction(&ctx)?,
        Command::UpperSplit => upper(&ctx)?,
        Command::Selftest => return selftest(&ctx, stdout),
    };
    write_table(&ctx, &table, stdout)?;
    Ok(summary)
}

fn write_table(ctx: &Ctx, table: &Table, stdout: &mut dyn Write) -> CliResult<()> {
    let format: Format = ctx
        .config
        .get("format")
        .map_or(Ok(Format::Csv), str::parse)
        .map_err(|e: String| CliError::invalid("format", ctx.config.get("format").unwrap_or(""), e))?;
    emit(table, format, ctx.config, ctx.config.get("out"), stdout)
}

fn walk_table() -> Table {
    Table::new("walks", WALK_COLUMNS, ("n", "value"))
}

fn walk_row(e: &ReturnProbEstimate, wall: Cell) -> Vec<Cell> {
    vec![
        e.method.as_str().into(),
        e.d.into(),
        e.n.into(),
        e.value.into(),
        e.std_error.into(),
        e.samples.into(),
        e.seed.into(),
        wall,
        e.log_value.into(),
        e.exact.as_ref().map(|q| q.to_string()).into(),
    ]
}

fn exact(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let n: u32 = ctx.config.require("n")?;
    let budget = WalkBudget {
        max_nodes: ctx.config.value_or("budget", DEFAULT_NODE_BUDGET)?,
    };
    let start = Instant::now();
    let e = exact_return_prob(d, n, budget)?;
    let mut t = walk_table();
    t.push(walk_row(&e, ctx.elapsed_ms(start)));
    let q = e.exact.as_ref().expect("exact engine returns a rational");
    let summary = format!("exact d={d} n={n}: p_{} = {q} = {} (ln {:.6})", 2 * n, e.value, e.log_value);
    Ok((t, summary))
}

fn mc(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let n: u32 = ctx.config.require("n")?;
    let plan = ctx.plan(ctx.samples(100_000)?);
    let start = Instant::now();
    let e = mc_return_prob(d, n, &plan)?;
    let mut t = walk_table();
    t.push(walk_row(&e, ctx.elapsed_ms(start)));
    let summary = format!(
        "percolation-mc d={d} n={n}: p_{} ≈ {:.6e} ± {:.2e} ({} samples, seed {})",
        2 * n,
        e.value,
        e.std_error,
        e.samples,
        ctx.seed
    );
    Ok((t, summary))
}

fn chainsim(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let n: u32 = ctx.config.require("n")?;
    let plan = ctx.plan(ctx.samples(1_000_000)?);
    let start = Instant::now();
    let e = chain_sim(d, n, &plan)?;
    let mut t = walk_table();
    t.push(walk_row(&e, ctx.elapsed_ms(start)));
    let (lo, hi) = e.ci.unwrap_or((f64::NAN, f64::NAN));
    let summary = format!(
        "chain-sim d={d} n={n}: p_{} ≈ {:.6e} [{lo:.6e}, {hi:.6e}] ({} samples, seed {})",
        2 * n,
        e.value,
        e.samples,
        ctx.seed
    );
    Ok((t, summary))
}

fn trap(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let r: u32 = ctx.config.require("r")?;
    let n: u64 = ctx.config.require("n")?;
    let b = trap_bound(d, r, n)?;
    let s = trap_spectrum(d, r)?;
    let mut t = Table::new(
        "trap",
        &[
            "d",
            "r",
            "n",
            "value",
            "log_value",
            "log_prefactor",
            "log_trap_cost",
            "log_spectral",
            "top_eig",
            "root_mass",
        ],
        ("r", "log_value"),
    );
    t.push(vec![
        d.into(),
        r.into(),
        n.into(),
        b.value().into(),
        b.log_value.into(),
        b.log_prefactor.into(),
        b.log_trap_cost.into(),
        b.log_spectral.into(),
        s.eigenvalues[0].into(),
        s.root_masses[0].into(),
    ]);
    let summary = format!(
        "trap bound d={d} r={r} n={n}: {:.4e} (ln {:.4}); trap top eigenvalue {:.6}, root mass {:.6}",
        b.value(),
        b.log_value,
        s.eigenvalues[0],
        s.root_masses[0]
    );
    Ok((t, summary))
}

fn optimize_trap(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let n: u64 = ctx.config.require("n")?;
    let o = optimize_trap_r(d, n)?;
    let mut t = Table::new(
        "optimize-trap",
        &[
            "d",
            "n",
            "r_star",
            "r_max",
            "log_value",
            "value",
            "prescribed_r",
            "prescribed_log_value",
        ],
        ("n", "log_value"),
    );
    t.push(vec![
        d.into(),
        n.into(),
        o.r_star.into(),
        o.r_max.into(),
        o.bound.log_value.into(),
        o.bound.value().into(),
        o.prescribed_r.into(),
        o.prescribed.map(|p| p.log_value).into(),
    ]);
    let summary = format!(
        "optimized trap d={d} n={n}: r* = {} (prescribed depth {}), bound {:.4e} (ln {:.4})",
        o.r_star,
        o.prescribed_r,
        o.bound.value(),
        o.bound.log_value
    );
    Ok((t, summary))
}

fn spectrum(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let delta: f64 = ctx.config.value_or("delta", 0.05)?;
    if !(0.0..1.0).contains(&delta) {
        return Err(CliError::invalid("delta", &delta.to_string(), "must lie in [0, 1)"));
    }
    let threshold = lamptree::rho(d) * (1.0 - delta);
    let mut t = Table::new("spectral", SPECTRAL_COLUMNS, ("n_vertices", "top_eig"));

    let row = |id: u64, op: &KilledOperator, truncated: Option<bool>, spheres: Option<Vec<u64>>| -> CliResult<Vec<Cell>> {
        let rep = top_eigen_default(op)?;
        Ok(vec![
            id.into(),
            op.dim().into(),
            rep.top_eigenvalue.into(),
            rep.root_mass.into(),
            rep.residual.into(),
            rep.method.as_str().into(),
            eigen_count_above(op, threshold).count.into(),
            truncated.into(),
            spheres
                .map(|s| s.iter().map(u64::to_string).collect::<Vec<_>>().join(";"))
                .into(),
        ])
    };

    if let Some(r) = ctx.config.value::<u32>("r")? {
        let ball = Arc::new(build_ball(d, r)?);
        let op = KilledOperator::from_mask(&forward_subtree(&ball, r)?);
        t.push(row(0, &op, None, None)?);
        let top = top_eigen_default(&op)?.top_eigenvalue;
        let summary = format!("forward trap d={d} r={r}: {} vertices, top eigenvalue {top:.12}", op.dim());
        return Ok((t, summary));
    }

    let radius: u32 = ctx.config.value_or("radius", 6)?;
    let samples = ctx.samples(100)?;
    let ball = Arc::new(build_ball(d, radius)?);
    let seed = ctx.seed;
    let rows: Vec<CliResult<Vec<Cell>>> = ctx.pool(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| {
                let config = PercolationConfig::sample(&ball, &mut StreamRng::new(seed, i));
                match extract_cluster(&config) {
                    Some(cluster) => {
                        let op = KilledOperator::from_cluster(&cluster)?;
                        row(i, &op, Some(cluster.truncated_at_boundary()), Some(sphere_counts(&cluster)))
                    }
                    None => Ok(vec![
                        i.into(),
                        0u64.into(),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        "closed-root".into(),
                        0u64.into(),
                        Cell::Empty,
                        Cell::Empty,
                    ]),
                }
            })
            .collect()
    })?;
    for r in rows {
        t.push(r?);
    }
    let open = t.rows.iter().filter(|r| r[1] != Cell::Int(0)).count();
    let summary = format!(
        "spectrum d={d} radius={radius}: {samples} configurations, {open} with an open root, seed {seed}"
    );
    Ok((t, summary))
}

fn shift(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let radius: u32 = ctx.config.value_or("radius", 8)?;
    let k_max: u32 = ctx.config.value_or("k-max", 8)?;

    if ctx.config.get("samples").is_some() {
        let samples = ctx.samples(1)?;
        let ms: Vec<u32> = (1..=k_max.max(1)).collect();
        let rows = calibrate_numerical_radius(d, radius, &ms, samples, ctx.seed)?;
        let mut t = Table::new(
            "calibration",
            &[
                "label",
                "family",
                "sample",
                "n_vertices",
                "m",
                "shift_power_norm",
                "numerical_radius",
                "gamma_hat",
            ],
            ("shift_power_norm", "numerical_radius"),
        )
        .grouped_by("family");
        for r in &rows {
            t.push(vec![
                "empirical".into(),
                r.family.as_str().into(),
                r.sample.into(),
                r.n_vertices.into(),
                r.m.into(),
                r.shift_power_norm.into(),
                r.numerical_radius.into(),
                r.gamma_hat.into(),
            ]);
        }
        let summary = format!(
            "empirical calibration d={d} radius={radius}: {} rows over {samples} masks per family, m = 1..{k_max}",
            rows.len()
        );
        return Ok((t, summary));
    }

    let theta_grid: usize = ctx.config.value_or("theta-grid", DEFAULT_THETA_GRID)?;
    let ball = Arc::new(build_ball(d, radius)?);
    let mut stream = 0;
    let (mask, stream) = loop {
        let config = PercolationConfig::sample(&ball, &mut StreamRng::new(ctx.seed, stream));
        if let Some(c) = extract_cluster(&config).filter(|c| c.len() >= 2) {
            let mut member = vec![false; ball.len()];
            c.vertices().iter().for_each(|&v| member[v] = true);
            break (SubtreeMask::new(ball.clone(), member, 0)?, stream);
        }
        stream += 1;
        if stream > 10_000 {
            return Err(CliError::invalid("seed", &ctx.seed.to_string(), "no open root cluster in 10^4 draws"));
        }
    };
    let p = shift_profile(&mask, k_max, theta_grid)?;
    let mut t = Table::new(
        "shift",
        &[
            "k",
            "norm_sq",
            "norm",
            "numerical_radius",
            "sweep_radius",
            "sweep_spread",
        ],
        ("k", "norm_sq"),
    );
    for (k, &v) in p.norms_sq.iter().enumerate() {
        t.push(vec![
            k.into(),
            v.into(),
            p.norm(k).into(),
            p.numerical_radius.into(),
            p.sweep_radius().into(),
            p.sweep_spread().into(),
        ]);
    }
    let summary = format!(
        "shift on the root cluster of draw {stream} ({} vertices, rooted at {}): w(S) = {:.10}, sweep spread {:.1e} over {theta_grid} angles",
        mask.len(),
        p.root,
        p.numerical_radius,
        p.sweep_spread().unwrap_or(0.0)
    );
    Ok((t, summary))
}

fn certificate(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let radius: u32 = ctx.config.value_or("radius", 8)?;
    let r: u32 = ctx.config.value_or("r", 2)?;
    let a = ctx.positive("a", 0.9)?;
    let delta = ctx.unit_interval("delta", 0.05)?;
    let samples = ctx.samples(20)?;
    if r > radius {
        return Err(CliError::invalid("r", &r.to_string(), format!("exceeds --radius {radius}")));
    }
    let ball = Arc::new(build_ball(d, radius)?);
    let inner = ball.ball_len(radius - r);
    let seed = ctx.seed;
    let rows: Vec<CliResult<Option<Vec<Cell>>>> = ctx.pool(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| {
                let config = PercolationConfig::sample(&ball, &mut StreamRng::new(seed, i));
                let Some(cluster) = extract_cluster(&config) else {
                    return Ok(None);
                };
                // the cluster inside B(o, R - r), where every radius-r ball fits
                let mut member = vec![false; ball.len()];
                cluster
                    .vertices()
                    .iter()
                    .filter(|&&v| v < inner)
                    .for_each(|&v| member[v] = true);
                let mask = SubtreeMask::new(ball.clone(), member, 0)?;
                let c = sparse_ball_certificate(&mask, delta, r, a)?;
                let max_desc = descendant_counts(&mask, r).into_iter().max().unwrap_or(0);
                Ok(Some(vec![
                    i.into(),
                    c.n_vertices.into(),
                    c.max_ball_count.into(),
                    c.max_ball_density.into(),
                    max_desc.into(),
                    c.top.top_eigenvalue.into(),
                    c.threshold.into(),
                    c.hypothesis.into(),
                    c.conclusion.into(),
                ]))
            })
            .collect()
    })?;
    let mut t = Table::new(
        "certificate",
        &[
            "instance_id",
            "n_vertices",
            "max_ball_count",
            "max_ball_density",
            "max_descendants",
            "top_eig",
            "threshold",
            "hypothesis",
            "conclusion",
        ],
        ("max_ball_density", "top_eig"),
    );
    for row in rows {
        if let Some(row) = row? {
            t.push(row);
        }
    }
    let both = t
        .rows
        .iter()
        .filter(|r| r[7] == Cell::Bool(true) && r[8] == Cell::Bool(true))
        .count();
    let hyp = t.rows.iter().filter(|r| r[7] == Cell::Bool(true)).count();
    let summary = format!(
        "certificate d={d} r={r} a={a} δ={delta}: {} clusters, hypothesis on {hyp}, hypothesis and conclusion on {both}",
        t.rows.len()
    );
    Ok((t, summary))
}

fn dense_prob(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let r: u32 = ctx.config.require("r")?;
    let a = ctx.positive("a", 0.9)?;
    let plan = ctx.plan(ctx.samples(100_000)?);
    let e = dense_ball_probability(d, r, a, &plan)?;
    let mut t = Table::new("percolation", PERCOLATION_COLUMNS, ("r", "estimate"));
    t.push(vec![
        d.into(),
        r.into(),
        a.into(),
        plan.samples.into(),
        e.estimate.into(),
        e.ci_low.into(),
        e.ci_high.into(),
        e.seed.into(),
        e.estimate.ln().into(),
    ]);
    let summary = format!(
        "dense ball d={d} r={r} a={a}: {:.6} [{:.6}, {:.6}] ({} samples, seed {})",
        e.estimate, e.ci_low, e.ci_high, plan.samples, e.seed
    );
    Ok((t, summary))
}

fn witness_rank(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let r_inner: u32 = ctx.config.value_or("radius", 6)?;
    let r: u32 = ctx.config.value_or("r", 2)?;
    let a = ctx.positive("a", 0.9)?;
    let delta = ctx.unit_interval("delta", 0.05)?;
    let plan = ctx.plan(ctx.samples(1000)?);
    let rep = witness_rank_experiment(d, r_inner, r_inner + r, r, a, delta, &plan)?;
    let mut t = Table::new("witness", WITNESS_COLUMNS, ("|W|", "count"));
    for row in &rep.rows {
        t.push(vec![
            row.sample_id.into(),
            row.witnesses.into(),
            row.count.into(),
            row.max_component_eig.into(),
            row.hypothesis_ok.into(),
            row.implication_ok.into(),
            row.open_inner.into(),
            row.dense_count.into(),
        ]);
    }
    let violations = rep.violations().count();
    let summary = format!(
        "witness rank d={d} R_inner={r_inner} r={r} a={a} δ={delta}: {} samples, hypothesis on {}, {violations} violations, {} dense checks with {} mismatches",
        rep.rows.len(),
        rep.hypothesis_count(),
        rep.dense_checks(),
        rep.dense_mismatches().count()
    );
    Ok((t, summary))
}

fn correction(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let n_list: Vec<u64> = match ctx.config.list("n-list")? {
        Some(l) => l,
        None => match ctx.config.value::<u64>("n")? {
            Some(n) => vec![n],
            None => (3..=12).map(|k| 10u64.pow(k)).collect(),
        },
    };
    let sources: Vec<CorrectionSource> = match ctx.config.get("sources") {
        None => vec![CorrectionSource::TrapBound, CorrectionSource::TheoremTarget],
        Some(text) => text
            .split(',')
            .map(|s| {
                CorrectionSource::parse(s.trim()).ok_or_else(|| {
                    CliError::invalid("sources", s, "expected exact, mc, trap-bound or theorem-target")
                })
            })
            .collect::<CliResult<_>>()?,
    };
    let opts = CorrectionOptions {
        budget: WalkBudget {
            max_nodes: ctx.config.value_or("budget", DEFAULT_NODE_BUDGET)?,
        },
        plan: ctx.plan(ctx.samples(100_000)?),
    };
    let points = correction_curve(d, &n_list, &sources, &opts)?;
    let mut t = Table::new("correction", CORRECTION_COLUMNS, ("n", "L")).grouped_by("source");
    for p in &points {
        t.push(vec![p.n.into(), p.source.as_str().into(), p.l.into(), p.log_value.into()]);
    }
    let censored = points.iter().filter(|p| p.censored()).count();
    let summary = format!(
        "correction d={d}: {} points, {censored} censored; target π²(ln b)² = {:.7}",
        points.len(),
        target_constant(d)
    );
    Ok((t, summary))
}

fn upper(ctx: &Ctx) -> CliResult<(Table, String)> {
    let d = ctx.d()?;
    let n: u64 = ctx.config.require("n")?;
    if n < 2 {
        return Err(CliError::invalid("n", &n.to_string(), "need n >= 2"));
    }
    let eta = ctx.config.value::<f64>("eta")?;
    let delta = match ctx.config.value::<f64>("delta")? {
        Some(v) => v,
        None => delta_n(d, n, eta),
    };
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::invalid("delta", &delta.to_string(), "must lie strictly between 0 and 1"));
    }
    let (source, log_tail, truncated) = if ctx.config.get("samples").is_some() {
        let radius: u32 = ctx.config.value_or("radius", u32::try_from(n).unwrap_or(u32::MAX))?;
        let tail = spectral_tail_estimate(d, radius, delta, &ctx.plan(ctx.samples(1)?))?;
        ("empirical", tail.mass.ln(), Some(tail.truncated()))
    } else {
        let c = ctx.positive("tail-c", 1.0)?;
        let eta = eta.unwrap_or(kappa(d) / 8.0);
        ("hypothesized", hypothesized_log_tail(d, delta, c, eta), None)
    };
    let s = upper_split(d, n, delta, log_tail.min(0.0))?;
    let mut t = Table::new(
        "upper-split",
        &[
            "d",
            "n",
            "delta",
            "tail_source",
            "log_tail",
            "truncated",
            "log_rho_power",
            "log_i1",
            "log_i2",
            "log_total",
            "i1_log_correction",
        ],
        ("n", "log_total"),
    );
    t.push(vec![
        d.into(),
        n.into(),
        delta.into(),
        source.into(),
        log_tail.into(),
        truncated.into(),
        s.log_rho_power.into(),
        s.log_i1.into(),
        s.log_i2.into(),
        s.log_total.into(),
        s.i1_log_correction().into(),
    ]);
    let summary = format!(
        "upper split d={d} n={n} δ={delta:.6}: ln I1 = {:.6}, ln I2 = {:.6} ({source} tail), ln total = {:.6}, ln ρ^2n = {:.6}",
        s.log_i1, s.log_i2, s.log_total, s.log_rho_power
    );
    Ok((t, summary))
}

fn selftest(ctx: &Ctx, stdout: &mut dyn Write) -> CliResult<String> {
    let results = lamptree::selftest::run_all();
    let mut t = Table::new("selftest", &["module", "check", "passed", "detail"], ("check", "passed"));
    for c in &results {
        t.push(vec![c.module.into(), c.name.into(), c.passed.into(), c.detail.clone().into()]);
    }
    write_table(ctx, &t, stdout)?;
    let failed = results.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::SelftestFailed {
            failed,
            total: results.len(),
        });
    }
    Ok(format!("selftest: all {} checks passed", results.len()))
}

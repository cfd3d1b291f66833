//! Sweep orchestration: one independent job per sweep point, gathered in
//! the order the configuration declares.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::fit::{decay_rate_in_c, fit_slope};
use crate::diagnostics::{charge0, charge_uv, energy0, energy_uv, lifted_state, rest_energy_split};
use crate::error::{KgError, Result};
use crate::limit::{
    linear_u0_exact, linear_xi1_exact, solve_nls, solve_xi1_cubic, NlsPair, SplittingConfig,
};
use crate::model::{
    exact_linear_solution, first_order_velocity, from_first_order, initial_state, FirstOrderState,
    InitialData,
};
use crate::reconstruction::{
    reconstruct_second_order_cubic_pair, reconstruct_second_order_linear, reconstruct_z0,
};
use crate::reference::reference_integrate;
use crate::spectral::Field;
use crate::stepping::{align_steps, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub c: Option<f64>,
    pub tau: Option<f64>,
    pub h: f64,
    #[serde(rename = "K")]
    pub num_modes: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    /// L² error at the final time.
    pub error_l2: Option<f64>,
    /// Fitted convergence rate of the row's series (shared by all its rows).
    pub slope: Option<f64>,
    /// Series label.
    pub quantity: String,
    /// Maximum error over stored times, or the reported quantity.
    pub value: Option<f64>,
    pub runtime_s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn series(&self, quantity: &str) -> Vec<&ResultRow> {
        self.rows
            .iter()
            .filter(|r| r.quantity == quantity)
            .collect()
    }

    pub fn slope(&self, quantity: &str) -> Option<f64> {
        self.series(quantity).first().and_then(|r| r.slope)
    }

    pub fn quantities(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.quantity) {
                out.push(r.quantity.clone());
            }
        }
        out
    }
}

/// Series fitted against `c` (error decay as `c → ∞`).
const C_SERIES: [&str; 4] = [
    "first_order",
    "second_order",
    "charge_z0_deviation",
    "mass_term_deviation",
];

struct RowBuilder<'a> {
    cfg: &'a ExperimentConfig,
}

impl RowBuilder<'_> {
    fn row(&self, quantity: &str, c: Option<f64>, tau: Option<f64>) -> ResultRow {
        ResultRow {
            experiment: self.cfg.experiment.name().to_string(),
            c,
            tau,
            h: 1.0 / self.cfg.num_modes as f64,
            num_modes: self.cfg.num_modes,
            t_final: self.cfg.t_final,
            error_l2: None,
            slope: None,
            quantity: quantity.to_string(),
            value: None,
            runtime_s: None,
        }
    }

    fn error_row(&self, quantity: &str, c: f64, tau: Option<f64>, errs: &[f64]) -> ResultRow {
        let mut r = self.row(quantity, Some(c), tau);
        r.error_l2 = errs.last().copied();
        r.value = Some(errs.iter().copied().fold(0.0, f64::max));
        r
    }

    fn value_row(&self, quantity: &str, c: Option<f64>, value: f64) -> ResultRow {
        let mut r = self.row(quantity, c, Some(self.cfg.tau));
        r.value = Some(value);
        r
    }
}

/// Thread count from `KGNR_THREADS`, defaulting to the number of cores.
pub fn thread_count() -> usize {
    std::env::var("KGNR_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let data = cfg.initial_data()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| KgError::Config(format!("cannot start worker pool: {e}")))?;
    let b = RowBuilder { cfg };
    let mut rows = pool.install(|| -> Result<Vec<ResultRow>> {
        match cfg.experiment {
            ExperimentKind::LinearConvergenceInC => sweep_c(cfg, |c| linear_point(&b, &data, c)),
            ExperimentKind::CubicFirstOrderInC => {
                sweep_c(cfg, |c| cubic_point(&b, &data, c, false))
            }
            ExperimentKind::CubicSecondOrderInC => {
                sweep_c(cfg, |c| cubic_point(&b, &data, c, true))
            }
            ExperimentKind::TauConvergence => tau_sweep(&b, &data),
            ExperimentKind::ConservationStudy => conservation(&b, &data),
        }
    })?;
    fill_slopes(&mut rows, cfg.experiment)?;
    Ok(ResultTable { rows })
}

fn sweep_c(
    cfg: &ExperimentConfig,
    point: impl Fn(f64) -> Result<Vec<ResultRow>> + Sync,
) -> Result<Vec<ResultRow>> {
    let record = cfg.record_runtime;
    let parts: Vec<Result<Vec<ResultRow>>> = cfg
        .c_list
        .par_iter()
        .map(|&c| {
            let start = Instant::now();
            let mut rows = point(c)?;
            if record {
                let secs = start.elapsed().as_secs_f64();
                rows.iter_mut().for_each(|r| r.runtime_s = Some(secs));
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p?);
    }
    // Group by series, keeping sweep order within each.
    let mut order: Vec<String> = Vec::new();
    for r in &rows {
        if !order.contains(&r.quantity) {
            order.push(r.quantity.clone());
        }
    }
    Ok(order
        .iter()
        .flat_map(|q| {
            rows.iter()
                .filter(|r| &r.quantity == q)
                .cloned()
                .collect::<Vec<_>>()
        })
        .collect())
}

fn fill_slopes(rows: &mut [ResultRow], kind: ExperimentKind) -> Result<()> {
    let mut quantities: Vec<String> = Vec::new();
    for r in rows.iter() {
        if !quantities.contains(&r.quantity) {
            quantities.push(r.quantity.clone());
        }
    }
    for q in quantities {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].quantity == q).collect();
        if idx.len() < 3 {
            continue;
        }
        let slope = if kind == ExperimentKind::TauConvergence {
            let pts: Vec<(f64, f64)> = idx
                .iter()
                .map(|&i| {
                    (
                        rows[i].tau.unwrap_or(f64::NAN),
                        rows[i].error_l2.unwrap_or(f64::NAN),
                    )
                })
                .collect();
            fit_slope(&pts).ok()
        } else if C_SERIES.contains(&q.as_str()) {
            let cs: Vec<f64> = idx.iter().map(|&i| rows[i].c.unwrap_or(f64::NAN)).collect();
            let ys: Vec<f64> = idx
                .iter()
                .map(|&i| rows[i].error_l2.or(rows[i].value).unwrap_or(f64::NAN))
                .collect();
            decay_rate_in_c(&cs, &ys).ok()
        } else {
            None
        };
        for i in idx {
            rows[i].slope = slope;
        }
    }
    Ok(())
}

fn time_grid(cfg: &ExperimentConfig) -> Result<(usize, f64)> {
    align_steps(cfg.t_final, cfg.tau)
}

fn linear_point(b: &RowBuilder, data: &InitialData, c: f64) -> Result<Vec<ResultRow>> {
    let cfg = b.cfg;
    let params = cfg.params(c)?;
    let (steps, tau) = time_grid(cfg)?;
    let mut first = Vec::with_capacity(steps);
    let mut second = Vec::with_capacity(steps);
    for n in 1..=steps {
        let t = n as f64 * tau;
        let exact = exact_linear_solution(data, &params, t)?;
        let w = linear_u0_exact(data, cfg.lambda, t);
        let corr = linear_xi1_exact(data, cfg.lambda, t);
        first.push((&exact - &reconstruct_z0(&w, c).z).l2_norm());
        second.push(
            (&exact - &reconstruct_second_order_linear(&w, &corr, c, cfg.lambda).z).l2_norm(),
        );
    }
    Ok(vec![
        b.error_row("first_order", c, None, &first),
        b.error_row("second_order", c, None, &second),
    ])
}

/// Limit trajectory storing every step, with the matching reference run that
/// stores a snapshot at every limit step endpoint.
fn cubic_runs(
    cfg: &ExperimentConfig,
    data: &InitialData,
    c: f64,
) -> Result<(Trajectory<NlsPair>, Trajectory<FirstOrderState>)> {
    let params = cfg.params(c)?;
    let limit = solve_nls(
        &NlsPair::initial(data),
        &params,
        &cfg.splitting(),
        cfg.t_final,
    )?;
    let sub = ((limit.tau / cfg.tau_ref).round() as usize).max(1);
    let psi = initial_state(data, c)?;
    let reference = reference_integrate(
        &psi,
        &params,
        cfg.t_final / (limit.steps * sub) as f64,
        cfg.t_final,
        sub,
    )?;
    debug_assert_eq!(reference.snapshots.len(), limit.snapshots.len());
    Ok((limit, reference))
}

fn cubic_point(b: &RowBuilder, data: &InitialData, c: f64, second: bool) -> Result<Vec<ResultRow>> {
    let cfg = b.cfg;
    let (limit, reference) = cubic_runs(cfg, data, c)?;
    let exact: Vec<Field> = reference.snapshots.iter().map(from_first_order).collect();
    let first: Vec<f64> = limit
        .snapshots
        .iter()
        .zip(&exact)
        .skip(1)
        .map(|(w, z)| (z - &reconstruct_z0(w, c).z).l2_norm())
        .collect();
    let mut rows = vec![b.error_row("first_order", c, Some(limit.tau), &first)];
    if second {
        let corr = solve_xi1_cubic(&limit, data, cfg.lambda, &cfg.splitting(), cfg.t_final)?;
        let mut errs = Vec::with_capacity(limit.steps);
        for ((w, x), z) in limit
            .snapshots
            .iter()
            .zip(&corr.snapshots)
            .zip(&exact)
            .skip(1)
        {
            let approx = reconstruct_second_order_cubic_pair(w, x, c, cfg.lambda)?;
            errs.push((z - &approx.z).l2_norm());
        }
        rows.push(b.error_row("second_order", c, Some(limit.tau), &errs));
    }
    Ok(rows)
}

fn pair_distance(a: &NlsPair, b: &NlsPair) -> f64 {
    ((&a.u0 - &b.u0).l2_norm_sq() + (&a.v0 - &b.v0).l2_norm_sq()).sqrt()
}

fn tau_sweep(b: &RowBuilder, data: &InitialData) -> Result<Vec<ResultRow>> {
    let cfg = b.cfg;
    let params = cfg.params(cfg.c_list[0])?;
    let w0 = NlsPair::initial(data);
    let parts: Vec<Result<ResultRow>> = cfg
        .tau_list
        .par_iter()
        .map(|&tau| {
            let start = Instant::now();
            let coarse_cfg = SplittingConfig {
                snapshot_stride: 0,
                tau,
                ..cfg.splitting()
            };
            let coarse = solve_nls(&w0, &params, &coarse_cfg, cfg.t_final)?;
            let fine_cfg = SplittingConfig {
                tau: coarse.tau / 64.0,
                ..coarse_cfg
            };
            let fine = solve_nls(&w0, &params, &fine_cfg, cfg.t_final)?;
            let mut r = b.row("strang", None, Some(coarse.tau));
            let err = pair_distance(coarse.last(), fine.last());
            r.error_l2 = Some(err);
            r.value = Some(err);
            if cfg.record_runtime {
                r.runtime_s = Some(start.elapsed().as_secs_f64());
            }
            Ok(r)
        })
        .collect();
    parts.into_iter().collect()
}

fn max_deviation(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|v| (v - values[0]).abs())
        .fold(0.0, f64::max)
}

fn conservation(b: &RowBuilder, data: &InitialData) -> Result<Vec<ResultRow>> {
    let cfg = b.cfg;
    let params = cfg.params(cfg.c_list[0])?;
    let limit = solve_nls(
        &NlsPair::initial(data),
        &params,
        &cfg.splitting(),
        cfg.t_final,
    )?;
    let q0: Vec<f64> = limit.snapshots.iter().map(charge0).collect();
    let nu: Vec<f64> = limit.snapshots.iter().map(|w| w.u0.l2_norm()).collect();
    let nv: Vec<f64> = limit.snapshots.iter().map(|w| w.v0.l2_norm()).collect();
    let relative = |v: &[f64]| max_deviation(v) / v[0].abs().max(1.0);
    let mut rows = vec![
        b.value_row("q0_drift", None, max_deviation(&q0)),
        b.value_row("u0_norm_drift", None, relative(&nu)),
        b.value_row("v0_norm_drift", None, relative(&nv)),
    ];
    let per_c = sweep_c(cfg, |c| {
        let p = cfg.params(c)?;
        let mut charge = Vec::new();
        let mut energy = Vec::new();
        let mut leader = Vec::new();
        let mut mass = Vec::new();
        let mut rest_sub = Vec::new();
        for w in &limit.snapshots {
            let st = lifted_state(w, c);
            charge.push(charge_uv(&st, c));
            let e = energy_uv(&st, &p);
            energy.push(e);
            rest_sub.push(e - rest_energy_split(&st, c, 1)?.rest_energy);
            leader.push(energy0(w, w.t, &p));
            mass.push(c * c * reconstruct_z0(w, c).z.l2_norm_sq());
        }
        let mut out = vec![
            b.value_row("charge_z0_deviation", Some(c), max_deviation(&charge)),
            b.value_row("energy0_deviation", Some(c), max_deviation(&leader)),
            b.value_row("mass_term_deviation", Some(c), max_deviation(&mass)),
            b.value_row("energy_z0_deviation", Some(c), max_deviation(&energy)),
            b.value_row(
                "rest_subtracted_energy_deviation",
                Some(c),
                max_deviation(&rest_sub),
            ),
        ];
        if let Some(horizon) = cfg.reference_horizon {
            let (q, e) = reference_drift(data, &p, cfg.tau_ref, horizon)?;
            let mut rq = b.value_row("reference_charge_drift", Some(c), q);
            let mut re = b.value_row("reference_energy_drift", Some(c), e);
            rq.tau = Some(cfg.tau_ref);
            re.tau = Some(cfg.tau_ref);
            out.push(rq);
            out.push(re);
        }
        Ok(out)
    })?;
    rows.extend(per_c);
    Ok(rows)
}

/// Maximum relative drift of charge and energy along a reference run.
pub fn reference_drift(
    data: &InitialData,
    params: &crate::model::KgParams,
    tau_ref: f64,
    horizon: f64,
) -> Result<(f64, f64)> {
    let psi = initial_state(data, params.c)?;
    let (steps, _) = align_steps(horizon, tau_ref)?;
    let traj = reference_integrate(&psi, params, tau_ref, horizon, (steps / 100).max(1))?;
    let mut q = Vec::new();
    let mut e = Vec::new();
    for s in &traj.snapshots {
        let z = from_first_order(s);
        let zt = first_order_velocity(s, params.c);
        q.push(crate::diagnostics::charge_z(&z, &zt, params.c)?);
        e.push(crate::diagnostics::energy_z(&z, &zt, params)?);
    }
    Ok((
        max_deviation(&q) / q[0].abs().max(1.0),
        max_deviation(&e) / e[0].abs().max(1.0),
    ))
}

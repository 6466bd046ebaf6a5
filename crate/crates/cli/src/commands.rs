//! One function per subcommand. Each builds a [`Table`] and never writes output itself.

use qbm_core::bath::debroglie_wavelength;
use qbm_core::entanglement::locate_crossing;
use qbm_core::wigner::{attenuation_exponent, AxisSpec};
use qbm_core::{
    calibrate_sigma, coherence_visibility, covariance_coefficients, criterion_at, initial_criterion, Bath,
    CalibrationOptions, Error, GridSpec, PhasePoint4, Superposition, SuperpositionSpec,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ConfigError, Resolved};
use crate::output::{col, number, Column, Table};

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numeric(Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::UnsupportedModel(_) | Error::Divergent { .. } => {
                Failure::Config(e.to_string())
            }
            other => Failure::Numeric(other),
        }
    }
}

pub struct Output {
    pub table: Table,
    /// Set when a criterion run found no crossing before `tmax`.
    pub no_crossing: bool,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Self {
            table,
            no_crossing: false,
        }
    }
}

const TIME_COLUMNS: [Column; 2] = [col("t", "time"), col("gamma_t", "dimensionless")];

fn time_row(cfg: &Resolved, t: f64) -> Vec<f64> {
    vec![t, cfg.bath.gamma() * t]
}

fn require_free(bath: &Bath) -> Result<(), Failure> {
    if bath.spec().model.is_free() {
        Ok(())
    } else {
        Err(Failure::Config(
            "this command is defined for the free models (ohmic, srt) only".into(),
        ))
    }
}

/// Grid points requested by a command, refused above the configured cap.
fn check_grid_size(cfg: &Resolved, points: usize, hint: &str) -> Result<(), Failure> {
    if points > cfg.max_grid {
        return Err(Failure::Config(format!(
            "grid of {points} points exceeds --max-grid {}; {hint}",
            cfg.max_grid
        )));
    }
    Ok(())
}

pub fn kinetics(cfg: &Resolved) -> Result<Output, Failure> {
    let bath = Bath::new(cfg.bath)?;
    let spec = bath.spec();
    // Strict Ohmic friction has no finite <xdot^2>; the column then carries inf.
    let v2 = match bath.velocity_variance() {
        Ok(v) => v,
        Err(Error::Divergent { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    let lambda_bar = debroglie_wavelength(spec.hbar, spec.mass, v2);
    let mut table = Table::new(
        "kinetics",
        TIME_COLUMNS
            .into_iter()
            .chain([
                col("G", "time/mass"),
                col("Gdot", "1/mass"),
                col("s", "length^2"),
                col("sdot", "length^2/time"),
                col("v2", "length^2/time^2"),
                col("lambda_bar", "length"),
            ])
            .collect(),
    );
    let rows: Vec<Vec<f64>> = cfg
        .times()
        .par_iter()
        .map(|&t| -> Result<Vec<f64>, Error> {
            let g = bath.green_function(t)?;
            let d = bath.mean_square_displacement(t)?;
            let mut row = time_row(cfg, t);
            row.extend([g.g, g.gdot, d.s, d.sdot, v2, lambda_bar]);
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    rows.into_iter().for_each(|r| table.push(r));
    table.meta("model", json!(spec.model));
    table.meta("v2_finite", json!(v2.is_finite()));
    Ok(table.into())
}

pub fn coherence(cfg: &Resolved) -> Result<Output, Failure> {
    let bath = Bath::new(cfg.bath)?;
    require_free(&bath)?;
    let state = cfg.state;
    let mut table = Table::new(
        "coherence",
        TIME_COLUMNS
            .into_iter()
            .chain([col("a", "dimensionless"), col("A", "dimensionless")])
            .collect(),
    );
    let rows: Vec<Vec<f64>> = cfg
        .times()
        .par_iter()
        .map(|&t| -> Result<Vec<f64>, Error> {
            let kin = bath.kinetics(t)?;
            let cov = covariance_coefficients(&kin, &state);
            let mut row = time_row(cfg, t);
            row.extend([coherence_visibility(&kin, &state), attenuation_exponent(&cov, &kin, &state)]);
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    rows.into_iter().for_each(|r| table.push(r));
    table.meta("long_time_visibility", number((-state.overlap_exponent()).exp()));
    Ok(table.into())
}

pub fn criterion(cfg: &Resolved) -> Result<Output, Failure> {
    let bath = Bath::new(cfg.bath)?;
    require_free(&bath)?;
    let lambda_bar = bath.debroglie_wavelength()?;
    let mut state = cfg.state;
    let mut table = Table::new(
        "criterion",
        TIME_COLUMNS.into_iter().chain([col("C", "dimensionless")]).collect(),
    );
    if let Some(target) = cfg.calibrate {
        let opts = CalibrationOptions {
            t_max: cfg.tmax,
            ..Default::default()
        };
        let cal = calibrate_sigma(&bath, state.d, target, &opts)?;
        state = SuperpositionSpec { sigma: cal.sigma, ..state };
        table.meta(
            "calibration",
            json!({
                "target_t_star": target,
                "sigma": cal.sigma,
                "sigma_over_lambda_bar": cal.sigma / lambda_bar,
                "roots": cal.roots,
            }),
        );
    }
    let times = cfg.times();
    let report = locate_crossing(|t| criterion_at(&bath, &state, t), &times)?;
    for &(t, c) in &report.samples {
        let mut row = time_row(cfg, t);
        row.push(c);
        table.push(row);
    }
    let gamma = cfg.bath.gamma();
    table.meta("sigma", number(state.sigma));
    table.meta("lambda_bar", number(lambda_bar));
    table.meta("initial_closed_form", number(initial_criterion(state.sigma, lambda_bar)));
    table.meta(
        "crossing",
        report.crossing.map_or(serde_json::Value::Null, |c| {
            json!({
                "t_lo": c.t_lo,
                "t_hi": c.t_hi,
                "t_star": c.t_star,
                "gamma_t_star": gamma * c.t_star,
            })
        }),
    );
    table.meta("sign_changes", json!(report.sign_changes()));
    table.meta("long_time_value", number(report.long_time_value));
    Ok(Output {
        no_crossing: report.crossing.is_none(),
        table,
    })
}

const PHASE_AXES: [&str; 4] = ["q1", "p1", "q2", "p2"];

/// Parses `name=value,name=value` into two distinct fixed axes.
fn parse_slice(text: &str) -> Result<[(usize, f64); 2], Failure> {
    let bad = || Failure::Config(format!("--slice expects two settings like p1=0,p2=0, got '{text}'"));
    let parts: Vec<(usize, f64)> = text
        .split(',')
        .map(|part| {
            let (name, value) = part.split_once('=').ok_or_else(bad)?;
            let axis = PHASE_AXES.iter().position(|a| *a == name.trim()).ok_or_else(bad)?;
            let value: f64 = value.trim().parse().map_err(|_| bad())?;
            Ok((axis, value))
        })
        .collect::<Result<_, Failure>>()?;
    match parts.as_slice() {
        [a, b] if a.0 != b.0 && a.1.is_finite() && b.1.is_finite() => Ok([*a, *b]),
        _ => Err(bad()),
    }
}

fn superposition(cfg: &Resolved, bath: &Bath) -> Result<Superposition, Failure> {
    let kin = bath.kinetics(cfg.time)?;
    let cov = covariance_coefficients(&kin, &cfg.state);
    Ok(Superposition::new(&cov, &kin, &cfg.state)?)
}

fn axes_meta(names: &[&str], axes: &[AxisSpec]) -> serde_json::Value {
    serde_json::Value::Array(
        names
            .iter()
            .zip(axes)
            .map(|(n, a)| json!({"name": n, "half_width": a.half_width, "points": a.points}))
            .collect(),
    )
}

pub fn wigner(cfg: &Resolved) -> Result<Output, Failure> {
    let bath = Bath::new(cfg.bath)?;
    require_free(&bath)?;
    let sp = superposition(cfg, &bath)?;
    let grid = GridSpec::default_wigner(sp.covariance(), &cfg.state, cfg.grid)?;
    let full = grid.len();
    let integral = if full <= cfg.max_grid {
        number(sp.wigner_integral(&grid)?)
    } else {
        serde_json::Value::Null
    };
    let unit = col("W", "1/(length*momentum)^2");
    let mut table = match &cfg.slice {
        None => {
            check_grid_size(cfg, full, "lower --grid, raise --max-grid, or pick a 2D --slice")?;
            let mut table = Table::new(
                "wigner",
                vec![
                    col("q1", "length"),
                    col("p1", "momentum"),
                    col("q2", "length"),
                    col("p2", "momentum"),
                    unit,
                ],
            );
            let values = sp.wigner_grid(&grid)?;
            let axes: Vec<_> = grid.axes.iter().map(AxisSpec::uniform).collect();
            for (idx, &w) in values.indexed_iter() {
                let mut row: Vec<f64> = (0..4).map(|k| axes[k].coord(idx[k])).collect();
                row.push(w);
                table.push(row);
            }
            table.meta("axes", axes_meta(&PHASE_AXES, &grid.axes));
            table
        }
        Some(text) => {
            let fixed = parse_slice(text)?;
            let free: Vec<usize> = (0..4).filter(|k| fixed.iter().all(|f| f.0 != *k)).collect();
            check_grid_size(cfg, cfg.grid * cfg.grid, "lower --grid or raise --max-grid")?;
            let (a, b) = (grid.axes[free[0]], grid.axes[free[1]]);
            let mut table = Table::new(
                "wigner",
                vec![
                    col(PHASE_AXES[free[0]], if free[0] % 2 == 0 { "length" } else { "momentum" }),
                    col(PHASE_AXES[free[1]], if free[1] % 2 == 0 { "length" } else { "momentum" }),
                    unit,
                ],
            );
            let (ua, ub) = (a.uniform(), b.uniform());
            for i in 0..a.points {
                for j in 0..b.points {
                    let mut x = [0.0; 4];
                    for (axis, value) in fixed {
                        x[axis] = value;
                    }
                    x[free[0]] = ua.coord(i);
                    x[free[1]] = ub.coord(j);
                    let w = sp.wigner(&PhasePoint4::new(x[0], x[1], x[2], x[3]));
                    table.push(vec![x[free[0]], x[free[1]], w]);
                }
            }
            table.meta("axes", axes_meta(&[PHASE_AXES[free[0]], PHASE_AXES[free[1]]], &[a, b]));
            table.meta(
                "slice",
                json!(fixed.iter().map(|(k, v)| json!({"name": PHASE_AXES[*k], "value": v})).collect::<Vec<_>>()),
            );
            table
        }
    };
    table.meta("time", number(cfg.time));
    table.meta("integral", integral);
    table.meta("integral_grid_points", json!(full));
    Ok(table.into())
}

pub fn probability(cfg: &Resolved) -> Result<Output, Failure> {
    let bath = Bath::new(cfg.bath)?;
    require_free(&bath)?;
    let sp = superposition(cfg, &bath)?;
    let grid = GridSpec::default_probability(sp.covariance(), &cfg.state, cfg.grid)?;
    check_grid_size(cfg, grid.len(), "lower --grid or raise --max-grid")?;
    let mut table = Table::new(
        "probability",
        vec![col("q1", "length"), col("q2", "length"), col("P", "1/length^2")],
    );
    let values = sp.probability_grid(&grid)?;
    let axes: Vec<_> = grid.axes.iter().map(AxisSpec::uniform).collect();
    for (idx, &p) in values.indexed_iter() {
        table.push(vec![axes[0].coord(idx[0]), axes[1].coord(idx[1]), p]);
    }
    table.meta("axes", axes_meta(&["q1", "q2"], &grid.axes));
    table.meta("time", number(cfg.time));
    table.meta("integral", number(sp.probability_integral(&grid)?));
    Ok(table.into())
}

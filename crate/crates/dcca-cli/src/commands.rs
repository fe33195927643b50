//! Command implementations, each producing a [`Table`].

use dcca::detrend::{alpha_bruteforce, AlphaCoefficients, BoxGeometry, BoxMode, DetrendOperators};
use dcca::estimator::{fluctuation_profile, SeriesPair};
use dcca::montecarlo::{compare_modes, run_mc, McConfig, McStat};
use dcca::simulate::{generate, ScenarioSpec};
use dcca::theory::{
    asymptotic_expectation_slope, expected_dcca_with, expected_dfa_with, fluctuation_covariance,
    linear_process_cov, rho_eps_with, rho_limit_from_linear, Component, CovTarget,
};

use crate::data::{align, load_asset, log_returns, read_two_columns};
use crate::output::{Cell, Table};
use crate::scenario::{McFileConfig, ScenarioArgs};
use crate::{CliError, GridArgs, Transform};

/// Relative tolerance of the `--check` cross-validation.
const ALPHA_CHECK_TOL: f64 = 1e-9;

pub fn alpha(grid: &GridArgs, closed_form: bool, check: bool) -> Result<Table, CliError> {
    if (closed_form || check) && grid.nu != 0 {
        return Err(CliError::from(dcca::Error::UnsupportedOrder { nu: grid.nu }));
    }
    let mut table = if check {
        Table::new(vec!["m", "j", "alpha", "beta", "alpha_bruteforce", "check"])
    } else {
        Table::new(vec!["m", "j", "alpha", "beta"])
    };
    for m in grid.grid()? {
        if m < grid.nu + 2 {
            continue;
        }
        let geometry = BoxGeometry::new(m, grid.nu, BoxMode::Overlapping)?;
        let ops = DetrendOperators::<f64>::new(geometry)?;
        let coeffs = if closed_form {
            AlphaCoefficients::<f64>::closed_form(&geometry)?
        } else {
            AlphaCoefficients::from_operators(&ops)
        };
        for j in 0..=m {
            let mut row = vec![
                Cell::from(m),
                Cell::from(j),
                Cell::from(coeffs.alpha(j)),
                Cell::from(coeffs.beta(j)),
            ];
            if check {
                let brute = alpha_bruteforce(&ops, j)?;
                let ok = (brute - coeffs.alpha(j)).abs()
                    <= ALPHA_CHECK_TOL * coeffs.alpha(0).abs().max(1.0);
                if !ok {
                    return Err(CliError::data(format!(
                        "closed form disagrees with kernel sum at m={m}, j={j}: {} vs {brute}",
                        coeffs.alpha(j)
                    )));
                }
                row.push(Cell::from(brute));
                row.push(Cell::from("ok"));
            }
            table.push(row);
        }
    }
    Ok(table)
}

fn profile_rows(
    table: &mut Table,
    prefix: &[Cell],
    pair: &SeriesPair<f64>,
    grid: &GridArgs,
    mode: BoxMode,
) -> Result<(), CliError> {
    let n = pair.len();
    let mut valid = Vec::new();
    let mut status: Vec<(usize, &str)> = Vec::new();
    for m in grid.grid()? {
        if m < grid.nu + 2 {
            status.push((m, "invalid_geometry"));
        } else if n < m + 1 {
            status.push((m, "insufficient_length"));
        } else {
            status.push((m, ""));
            valid.push(m);
        }
    }
    let profile = fluctuation_profile(pair, &valid, grid.nu, mode)?;
    let mut points = profile.points.iter();
    for (m, flag) in status {
        let mut row = prefix.to_vec();
        row.push(Cell::from(m));
        if flag.is_empty() {
            let pt = points.next().expect("one point per valid m");
            row.extend([
                Cell::from(pt.f2_dfa_1),
                Cell::from(pt.f2_dfa_2),
                Cell::from(pt.f_dcca),
                Cell::from(pt.rho),
                Cell::from(if pt.degenerate { "degenerate" } else { "" }),
            ]);
        } else {
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::from(flag)]);
        }
        table.push(row);
    }
    Ok(())
}

pub fn dcca_profile(input: &str, grid: &GridArgs, mode: BoxMode) -> Result<Table, CliError> {
    let (x1, x2) = read_two_columns(input)?;
    let pair = SeriesPair::new(x1, x2).map_err(CliError::from)?;
    let mut table = Table::new(vec!["m", "f2_dfa_1", "f2_dfa_2", "f_dcca", "rho", "flag"]);
    profile_rows(&mut table, &[], &pair, grid, mode)?;
    Ok(table)
}

pub fn theory(args: &ScenarioArgs, grid: &GridArgs, lags: Option<usize>) -> Result<Table, CliError> {
    let scenario = args.build()?;
    let spec = scenario.theoretical_model()?;
    let model = linear_process_cov(&spec);
    let mut table = Table::new(vec!["quantity", "m", "h", "value"]);
    for m in grid.grid()? {
        if m < grid.nu + 2 {
            continue;
        }
        let geometry = BoxGeometry::new(m, grid.nu, BoxMode::Overlapping)?;
        let ops = DetrendOperators::<f64>::new(geometry)?;
        let coeffs = AlphaCoefficients::from_operators(&ops);
        let e1 = expected_dfa_with(&coeffs, &model, Component::First)?;
        let e2 = expected_dfa_with(&coeffs, &model, Component::Second)?;
        let ex = expected_dcca_with(&coeffs, &model)?;
        let rho = rho_eps_with(&coeffs, &model)?;
        let mc = Cell::from(m);
        table.push(vec!["e_f2_dfa_1".into(), mc.clone(), Cell::Empty, Cell::from(e1)]);
        table.push(vec!["e_f2_dfa_2".into(), mc.clone(), Cell::Empty, Cell::from(e2)]);
        table.push(vec!["e_f_dcca".into(), mc.clone(), Cell::Empty, Cell::from(ex)]);
        table.push(vec!["rho_eps".into(), mc.clone(), Cell::Empty, Cell::from(rho)]);
        if let Some(max_h) = lags {
            for h in 0..=max_h {
                for (name, target) in [
                    ("cov_dfa_1", CovTarget::Dfa1),
                    ("cov_dfa_2", CovTarget::Dfa2),
                    ("cov_dcca", CovTarget::Dcca),
                ] {
                    let v = fluctuation_covariance(&model, &geometry, h, target)?;
                    table.push(vec![name.into(), mc.clone(), Cell::from(h), Cell::from(v)]);
                }
            }
        }
    }
    for (name, target) in [
        ("slope_dfa_1", CovTarget::Dfa1),
        ("slope_dfa_2", CovTarget::Dfa2),
        ("slope_dcca", CovTarget::Dcca),
    ] {
        let v = asymptotic_expectation_slope(&model, target)?;
        table.push(vec![name.into(), Cell::Empty, Cell::Empty, Cell::from(v)]);
    }
    table.push(vec![
        "rho_limit".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::from(rho_limit_from_linear(&spec)?),
    ]);
    Ok(table)
}

pub fn simulate(
    args: &ScenarioArgs,
    n: usize,
    seed: u64,
    trend1: Option<Vec<f64>>,
    trend2: Option<Vec<f64>>,
) -> Result<Table, CliError> {
    let scenario = args.build()?;
    let pair = generate(&ScenarioSpec::new(scenario, n, seed).with_trends(trend1, trend2))?;
    let mut table = Table::new(vec!["t", "x1", "x2"]);
    for t in 0..n {
        table.push(vec![Cell::from(t + 1), Cell::from(pair.x1()[t]), Cell::from(pair.x2()[t])]);
    }
    Ok(table)
}

pub fn monte_carlo(config_path: &str) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::data(format!("cannot read {config_path}: {e}")))?;
    let file = McFileConfig::parse(&text)?;
    let scenario = crate::scenario::build_scenario(&file.scenario, &file.params)?;
    let config = McConfig {
        scenario,
        n: file.n,
        reps: file.reps,
        m_grid: (file.m_min..=file.m_max).collect(),
        nu: file.nu,
        mode: file.mode()?,
        master_seed: file.seed,
        trend1: file.trend1.clone(),
        trend2: file.trend2.clone(),
    };
    let mut table = Table::new(vec!["scenario", "m", "statistic", "value"]);
    if file.compare_modes {
        let (over, non) = compare_modes(&config)?;
        for st in &over.stats {
            push_stat_rows(&mut table, &file.scenario, st, "overlap.");
        }
        for st in &non.stats {
            push_stat_rows(&mut table, &file.scenario, st, "nonoverlap.");
        }
    } else {
        let summary = run_mc(&config)?;
        for st in &summary.stats {
            push_stat_rows(&mut table, &file.scenario, st, "");
        }
    }
    Ok(table)
}

fn push_stat_rows(table: &mut Table, scenario: &str, st: &McStat, prefix: &str) {
    let mut push = |name: &str, value: Cell| {
        table.push(vec![
            Cell::from(scenario),
            Cell::from(st.m),
            Cell::from(format!("{prefix}{name}")),
            value,
        ]);
    };
    push("q05", Cell::from(st.q05));
    push("q25", Cell::from(st.q25));
    push("median", Cell::from(st.median));
    push("q75", Cell::from(st.q75));
    push("q95", Cell::from(st.q95));
    push("mean", Cell::from(st.mean));
    push("sd", Cell::from(st.sd));
    push("effective", Cell::from(st.effective));
    push("excluded", Cell::from(st.excluded));
    push("theory_rho", Cell::from(st.theory_rho));
    push("mean_f2_1", Cell::from(st.mean_f2_1));
    push("mean_f2_2", Cell::from(st.mean_f2_2));
    push("mean_f_dcca", Cell::from(st.mean_f_dcca));
    push("sd_f_dcca", Cell::from(st.sd_f_dcca));
}

pub fn empirical(
    files: &[String],
    grid: &GridArgs,
    mode: BoxMode,
    transform: Transform,
) -> Result<Table, CliError> {
    if files.len() < 2 {
        return Err(CliError::usage("empirical needs at least two price files"));
    }
    let assets = files.iter().map(|f| load_asset(f)).collect::<Result<Vec<_>, _>>()?;
    let (dates, aligned) = align(&assets)?;
    let absolute = transform == Transform::AbsLogReturn;
    let returns: Vec<Vec<f64>> = aligned.iter().map(|p| log_returns(p, absolute)).collect();
    let n_obs = dates.len() - 1;

    let mut table = Table::new(vec![
        "series_a", "series_b", "n_obs", "m", "f2_dfa_1", "f2_dfa_2", "f_dcca", "rho", "flag",
    ]);
    for i in 0..assets.len() {
        for j in (i + 1)..assets.len() {
            let pair = SeriesPair::new(returns[i].clone(), returns[j].clone())?;
            let prefix = vec![
                Cell::from(assets[i].name.as_str()),
                Cell::from(assets[j].name.as_str()),
                Cell::from(n_obs),
            ];
            profile_rows(&mut table, &prefix, &pair, grid, mode)?;
        }
    }
    Ok(table)
}

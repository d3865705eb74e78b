//! Command execution: every command writes its CSV (and SVG) artifacts to
//! the output directory and finishes with `manifest.txt` listing them.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;
use tipping::dynamics::{self, Trajectory};
use tipping::equilibrium::{self, EquilibriumError};
use tipping::model::{EcosystemConfig, Param, State};
use tipping::policy::{
    self, OptimizerOptions, PolicyError, PolicyProblem, SweepPoint, ThresholdOptions,
    ThresholdResult, SWEEP_PARAMS,
};
use tipping::presets::{self, DynamicsPanel};
use tipping::roots::linspace;
use tipping::sensitivity::{self, ParameterRanges, SensitivityError, SensitivityReport};
use tipping::svg::{BarChart, LinePlot, Series};

use crate::scenario::{config_lines, Analysis, Grid, Scenario, ScenarioError};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TIP_GRID: Grid = Grid {
    lo: 0.01,
    hi: 0.5,
    steps: 25,
};
pub const FIGURES: [&str; 10] = [
    "fig2", "fig3", "fig4", "fig5", "figS1", "figS2", "figS3", "figS4", "figS5", "figS6",
];

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    /// Machine-readable error category.
    pub fn category(&self) -> &'static str {
        match self {
            RunError::Scenario(_) => "scenario",
            RunError::Usage(_) => "usage",
            RunError::Dynamics(_) => "dynamics",
            RunError::Equilibrium(_) => "equilibrium",
            RunError::Policy(_) => "policy",
            RunError::Sensitivity(_) => "sensitivity",
            RunError::Io { .. } => "io",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Equilibrium,
    Optimize,
    Threshold,
    Sweep,
    Sensitivity,
    ReproduceFigure,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Equilibrium => "equilibrium",
            Command::Optimize => "optimize",
            Command::Threshold => "threshold",
            Command::Sweep => "sweep",
            Command::Sensitivity => "sensitivity",
            Command::ReproduceFigure => "reproduce-figure",
        }
    }
}

/// Scenario directives after command-line overrides.
#[derive(Debug, Clone)]
pub struct Request {
    pub command: Command,
    pub scenario: Scenario,
    pub scenario_path: Option<PathBuf>,
    pub seed: u64,
    pub out: PathBuf,
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
    ) -> Result<(), RunError> {
        let path = self.dir.join(name);
        let io_err = |source| RunError::Io {
            path: path.clone(),
            source,
        };
        let file = fs::File::create(&path).map_err(io_err)?;
        let mut w = BufWriter::new(file);
        body(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn text(&mut self, name: &str, text: &str) -> Result<(), RunError> {
        self.write(name, |w| w.write_all(text.as_bytes()))
    }
}

pub fn run(req: &Request) -> Result<Vec<PathBuf>, RunError> {
    let start = Instant::now();
    let mut art = Artifacts::new(&req.out)?;
    let mut extra: Vec<(String, String)> = Vec::new();
    match req.command {
        Command::Simulate => simulate(req, &mut art)?,
        Command::Equilibrium => equilibrium_cmd(&req.scenario.config, req.scenario.initial, "", &mut art)?,
        Command::Optimize => optimize(req, &mut art)?,
        Command::Threshold => {
            let grid = req.scenario.grid.unwrap_or(DEFAULT_TIP_GRID);
            extra.push(("grid".into(), grid.to_string()));
            let result = threshold_curves(&req.scenario.config, &grid.points())?;
            write_threshold(&result, "threshold", "Optimized profit", &mut art)?;
        }
        Command::Sweep => {
            let param = req.scenario.sweep.ok_or_else(|| {
                RunError::Usage("sweep needs a parameter (scenario key 'sweep' or --param)".into())
            })?;
            let grid = req.scenario.grid.map(|g| g.points()).unwrap_or_else(|| sweep_grid(param));
            extra.push(("sweep".into(), param.to_string()));
            sweep(&req.scenario.config, param, &grid, "sweep", &mut art)?;
        }
        Command::Sensitivity => {
            let analysis = req.scenario.analysis.unwrap_or(Analysis::Threshold);
            let n = req.scenario.n.unwrap_or(sensitivity::DEFAULT_SAMPLES);
            extra.push(("analysis".into(), analysis.to_string()));
            extra.push(("n".into(), n.to_string()));
            let report = match analysis {
                Analysis::Equilibrium => sensitivity::equilibrium_sensitivity(
                    &ParameterRanges::equilibrium_default(),
                    n,
                    req.seed,
                )?,
                Analysis::Threshold => {
                    PolicyProblem::new(req.scenario.config)?;
                    sensitivity::threshold_sensitivity_with(
                        &req.scenario.config,
                        &ParameterRanges::threshold_default(),
                        n,
                        req.seed,
                        &ThresholdOptions::default(),
                    )?
                }
            };
            write_sensitivity(&report, "sensitivity", &mut art)?;
        }
        Command::ReproduceFigure => {
            let figure = req.scenario.figure.as_deref().ok_or_else(|| {
                RunError::Usage(format!(
                    "reproduce-figure needs --figure (one of {})",
                    FIGURES.join(", ")
                ))
            })?;
            extra.push(("figure".into(), figure.to_string()));
            reproduce(figure, req, &mut art, &mut extra)?;
        }
    }
    let elapsed = start.elapsed();
    write_manifest(req, &art, &extra, elapsed.as_secs_f64())?;
    let mut paths: Vec<PathBuf> = art.files.iter().map(|f| req.out.join(f)).collect();
    paths.push(req.out.join("manifest.txt"));
    Ok(paths)
}

fn write_manifest(
    req: &Request,
    art: &Artifacts,
    extra: &[(String, String)],
    seconds: f64,
) -> Result<(), RunError> {
    let s = &req.scenario;
    let mut lines = vec![
        ("tool".to_string(), "tipping".to_string()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("command".into(), req.command.name().into()),
        ("scenario.name".into(), s.name.clone()),
        (
            "scenario.path".into(),
            req.scenario_path
                .as_ref()
                .map_or("none".into(), |p| p.display().to_string()),
        ),
        ("seed".into(), req.seed.to_string()),
    ];
    lines.extend(config_lines(&s.config).into_iter().map(|(k, v)| (format!("config.{k}"), v)));
    lines.push(("initial.D0".into(), s.initial.diners.to_string()));
    lines.push(("initial.W0".into(), s.initial.waiters.to_string()));
    lines.push(("initial.C0".into(), s.initial.cooks.to_string()));
    lines.push(("tEnd".into(), s.t_end.to_string()));
    lines.push(("maxStep".into(), s.max_step.to_string()));
    lines.extend(extra.iter().cloned());
    lines.push(("elapsed_seconds".into(), format!("{seconds:.3}")));
    lines.extend(
        art.files
            .iter()
            .enumerate()
            .map(|(i, f)| (format!("artifact.{i}"), f.clone())),
    );
    let mut art = Artifacts {
        dir: art.dir.clone(),
        files: Vec::new(),
    };
    art.write("manifest.txt", |w| {
        for (k, v) in &lines {
            writeln!(w, "{k} = {v}")?;
        }
        Ok(())
    })
}

fn trajectory_plot(traj: &Trajectory, title: &str) -> LinePlot {
    let series = |label: &str, pick: fn(&State) -> f64| {
        Series::solid(
            label,
            traj.times
                .iter()
                .zip(&traj.states)
                .map(|(&t, s)| (t, pick(s)))
                .collect(),
        )
    };
    LinePlot {
        title: title.into(),
        x_label: "time".into(),
        y_label: "share at restaurant 1".into(),
        series: vec![
            series("diners", |s| s.diners),
            series("waiters", |s| s.waiters),
            series("cooks", |s| s.cooks),
        ],
        markers: Vec::new(),
    }
}

fn simulate(req: &Request, art: &mut Artifacts) -> Result<(), RunError> {
    let s = &req.scenario;
    let traj = dynamics::integrate(&s.config, s.initial, s.t_end, s.max_step)?;
    art.write("trajectory.csv", |w| traj.write_csv(w))?;
    art.text("trajectory.svg", &trajectory_plot(&traj, &s.name).render())
}

fn equilibrium_cmd(
    cfg: &EcosystemConfig,
    seed: State,
    prefix: &str,
    art: &mut Artifacts,
) -> Result<(), RunError> {
    let report = equilibrium::find_equilibrium(cfg, seed)?;
    let nc = equilibrium::nullclines(cfg, report.fixed_point.cooks, 201)
        .map_err(EquilibriumError::from)?;
    art.write(&format!("{prefix}equilibrium.csv"), |w| report.write_csv(w))?;
    art.write(&format!("{prefix}nullclines.csv"), |w| nc.write_csv(w))?;
    let fp = report.fixed_point;
    let plot = LinePlot {
        title: format!("Nullclines at C = {:.3}", fp.cooks),
        x_label: "diner share D".into(),
        y_label: "waiter share W".into(),
        series: vec![
            Series::solid("dD/dt = 0", nc.diner.clone()),
            Series::dashed("dW/dt = 0", nc.waiter.clone()),
            Series::solid("fixed point", vec![(fp.diners, fp.waiters)]),
        ],
        markers: Vec::new(),
    };
    art.text(&format!("{prefix}nullclines.svg"), &plot.render())
}

fn optimize(req: &Request, art: &mut Artifacts) -> Result<(), RunError> {
    let problem = PolicyProblem::new(req.scenario.config)?;
    let rate = problem.conventional_rate();
    let result = policy::profit_curves(&problem, &[rate], &OptimizerOptions::default())?;
    art.write("optimize.csv", |w| result.write_csv(w))
}

fn threshold_curves(cfg: &EcosystemConfig, grid: &[f64]) -> Result<ThresholdResult, RunError> {
    let problem = PolicyProblem::new(*cfg)?;
    Ok(policy::threshold_analysis(
        &problem,
        grid,
        ThresholdOptions::default().tol,
        &OptimizerOptions::default(),
    )?)
}

fn write_threshold(
    result: &ThresholdResult,
    stem: &str,
    title: &str,
    art: &mut Artifacts,
) -> Result<(), RunError> {
    art.write(&format!("{stem}.csv"), |w| result.write_csv(w))?;
    let curve = |pts: &[policy::PolicyPoint]| -> Vec<(f64, f64)> {
        pts.iter().map(|p| (p.conventional_rate, p.optimum.profit)).collect()
    };
    let plot = LinePlot {
        title: title.into(),
        x_label: "conventional tip rate".into(),
        y_label: "equilibrium profit".into(),
        series: vec![
            Series::solid("allow tips", curve(&result.allow)),
            Series::dashed("forbid tips", curve(&result.forbid)),
        ],
        markers: result.tc.map(|tc| ("Tc".to_string(), tc)).into_iter().collect(),
    };
    art.text(&format!("{stem}.svg"), &plot.render())
}

/// Default local sweep grids around the typical restaurant.
pub fn sweep_grid(param: Param) -> Vec<f64> {
    match param {
        Param::MenuPrice => linspace(6.0, 20.0, 8),
        Param::CooksPerWaiter => linspace(0.5, 2.0, 7),
        _ => linspace(8.0, 20.0, 7),
    }
}

fn sweep(
    cfg: &EcosystemConfig,
    param: Param,
    grid: &[f64],
    stem: &str,
    art: &mut Artifacts,
) -> Result<Vec<SweepPoint>, RunError> {
    let problem = PolicyProblem::new(*cfg)?;
    let points = policy::local_sweep(&problem, param, grid, &ThresholdOptions::default())?;
    art.write(&format!("{stem}.csv"), |w| policy::write_sweep_csv(param, &points, w))?;
    let plot = LinePlot {
        title: format!("Critical tip rate vs {param}"),
        x_label: param.to_string(),
        y_label: "Tc".into(),
        series: vec![Series::solid(
            "Tc",
            points.iter().filter_map(|p| p.tc.map(|tc| (p.value, tc))).collect(),
        )],
        markers: Vec::new(),
    };
    art.text(&format!("{stem}.svg"), &plot.render())?;
    Ok(points)
}

fn write_sensitivity(
    report: &SensitivityReport,
    stem: &str,
    art: &mut Artifacts,
) -> Result<(), RunError> {
    art.write(&format!("{stem}_prcc.csv"), |w| report.write_prcc_csv(w))?;
    art.write(&format!("{stem}_samples.csv"), |w| report.write_samples_csv(w))?;
    for (o, name) in report.output_names.iter().enumerate() {
        let chart = BarChart {
            title: format!("PRCC with {name}"),
            y_label: "PRCC".into(),
            bars: report
                .params
                .iter()
                .zip(&report.prcc[o])
                .map(|(p, c)| match c {
                    Some(c) => (p.to_string(), c.coefficient, c.significance().to_string()),
                    None => (p.to_string(), 0.0, "undefined".into()),
                })
                .collect(),
        };
        let suffix = name.trim_end_matches('*');
        art.text(&format!("{stem}_{suffix}.svg"), &chart.render())?;
    }
    Ok(())
}

/// Records a configuration a figure used, under `prefix.` keys.
fn echo_config(extra: &mut Vec<(String, String)>, prefix: &str, cfg: &EcosystemConfig) {
    extra.extend(config_lines(cfg).into_iter().map(|(k, v)| (format!("{prefix}.{k}"), v)));
}

fn reproduce(
    figure: &str,
    req: &Request,
    art: &mut Artifacts,
    extra: &mut Vec<(String, String)>,
) -> Result<(), RunError> {
    let n = req.scenario.n.unwrap_or(sensitivity::DEFAULT_SAMPLES);
    let tip_grid = DEFAULT_TIP_GRID.points();
    match figure {
        "fig2" => {
            for panel in DynamicsPanel::ALL {
                let cfg = presets::dynamics_panel(panel);
                echo_config(extra, &format!("fig2{}", panel.label()), &cfg);
                let traj = dynamics::integrate(
                    &cfg,
                    State::PARITY,
                    req.scenario.t_end,
                    req.scenario.max_step,
                )?;
                let stem = format!("fig2{}", panel.label());
                art.write(&format!("{stem}.csv"), |w| traj.write_csv(w))?;
                art.text(&format!("{stem}.svg"), &trajectory_plot(&traj, &stem).render())?;
            }
        }
        "fig3" | "figS1" | "figS2" => {
            echo_config(extra, figure, &presets::threshold_example());
            let result = threshold_curves(&presets::threshold_example(), &tip_grid)?;
            match figure {
                "fig3" => write_threshold(&result, "fig3", "Allow vs forbid tipping", art)?,
                "figS1" => diagnostic(&result, "figS1", "optimal waiter base pay", |p| p.optimum.waiter_pay, art)?,
                _ => diagnostic(&result, "figS2", "base pay fraction", |p| p.base_pay_fraction, art)?,
            }
        }
        "figS3" => {
            echo_config(extra, figure, &presets::staff_pay_example());
            let result = threshold_curves(&presets::staff_pay_example(), &tip_grid)?;
            write_threshold(&result, "figS3", "Staff-pay quality", art)?;
        }
        "figS4" => {
            echo_config(extra, figure, &presets::payroll_example());
            let result = threshold_curves(&presets::payroll_example(), &tip_grid)?;
            write_threshold(&result, "figS4", "Payroll quality", art)?;
        }
        "fig4" => {
            extra.push(("n".into(), n.to_string()));
            echo_config(extra, "fig4.base", &presets::typical_restaurant());
            let report = sensitivity::threshold_sensitivity(
                &ParameterRanges::threshold_default(),
                n,
                req.seed,
                &ThresholdOptions::default(),
            )?;
            write_sensitivity(&report, "fig4", art)?;
        }
        "fig5" => {
            echo_config(extra, "fig5.base", &presets::typical_restaurant());
            for param in SWEEP_PARAMS {
                sweep(
                    &presets::typical_restaurant(),
                    param,
                    &sweep_grid(param),
                    &format!("fig5_{param}"),
                    art,
                )?;
            }
        }
        "figS5" => {
            echo_config(extra, "figS5", &presets::fig_s5());
            equilibrium_cmd(&presets::fig_s5(), State::PARITY, "figS5_", art)?;
        }
        "figS6" => {
            extra.push(("n".into(), n.to_string()));
            echo_config(extra, "figS6.base", &EcosystemConfig::baseline());
            let report = sensitivity::equilibrium_sensitivity(
                &ParameterRanges::equilibrium_default(),
                n,
                req.seed,
            )?;
            write_sensitivity(&report, "figS6", art)?;
        }
        other => {
            return Err(RunError::Usage(format!(
                "unknown figure '{other}' (expected one of {})",
                FIGURES.join(", ")
            )))
        }
    }
    Ok(())
}

fn diagnostic(
    result: &ThresholdResult,
    stem: &str,
    label: &str,
    pick: fn(&policy::PolicyPoint) -> f64,
    art: &mut Artifacts,
) -> Result<(), RunError> {
    art.write(&format!("{stem}.csv"), |w| {
        writeln!(w, "tip_rate,allow,forbid")?;
        for (a, f) in result.allow.iter().zip(&result.forbid) {
            writeln!(w, "{},{},{}", a.conventional_rate, pick(a), pick(f))?;
        }
        Ok(())
    })?;
    let curve = |pts: &[policy::PolicyPoint]| pts.iter().map(|p| (p.conventional_rate, pick(p))).collect();
    let plot = LinePlot {
        title: label.into(),
        x_label: "conventional tip rate".into(),
        y_label: label.into(),
        series: vec![
            Series::solid("allow tips", curve(&result.allow)),
            Series::dashed("forbid tips", curve(&result.forbid)),
        ],
        markers: Vec::new(),
    };
    art.text(&format!("{stem}.svg"), &plot.render())
}

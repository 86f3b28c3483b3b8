//! Subcommand configurations and their evaluation into tables.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mmconc_core::concentration::{
    concentration_criterion, decay_exponent, median_concentration_profile, obs_diam, oracle_fits,
};
use mmconc_core::dynamics::{
    corollary3_find_point, haar_average, theorem2_verify, Theorem2Options, DEFAULT_ALPHAS,
};
use mmconc_core::groups::invariance_defect;
use mmconc_core::metrics::{
    d_mt, d_mt_lp, d_prokhorov, d_prokhorov_oracle, MT_LP_MAX, PROKHOROV_ORACLE_MAX,
};
use mmconc_core::{Measure, MmSpace, PointMap};

use crate::error::AppError;
use crate::schema::{FlowSpec, GroupSpec, MeasureSpec, MmSpaceSpec, SpaceSpec};
use crate::table::{num, opt_num, Table};

pub const DEFAULT_BUDGET: usize = 64;
const AGREEMENT_TOL: f64 = 1e-9;

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

fn default_obs_alphas() -> Vec<f64> {
    vec![0.5, 0.2, 0.1]
}

/// Flags shared by every subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunOptions {
    pub seed: u64,
    pub oracle: bool,
    /// Fill the `runtime_ms` columns; off by default so tables are
    /// reproducible byte for byte.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            oracle: false,
            timing: false,
        }
    }
}

/// Tables and diagnostics produced by one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    /// JSON documents written next to the tables, as `(file name, value)`.
    pub documents: Vec<(String, serde_json::Value)>,
    /// Rows that could not be computed; the rest of the batch still ran.
    pub errors: Vec<String>,
    /// Checked properties that did not hold.
    pub assertion_failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Mmdist(MmdistConfig),
    Obsdiam(ObsdiamConfig),
    LevyScan(LevyConfig),
    InvarianceDefect(DefectConfig),
    FlowCheck(FlowCheckConfig),
    Concentrate(ConcentrateConfig),
    Generate(GenerateConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mmdist(_) => "mmdist",
            Command::Obsdiam(_) => "obsdiam",
            Command::LevyScan(_) => "levy-scan",
            Command::InvarianceDefect(_) => "invariance-defect",
            Command::FlowCheck(_) => "flow-check",
            Command::Concentrate(_) => "concentrate",
            Command::Generate(_) => "generate",
        }
    }

    pub fn run(&self, opts: &RunOptions) -> Result<Outcome, AppError> {
        match self {
            Command::Mmdist(c) => run_mmdist(c, opts),
            Command::Obsdiam(c) => run_obsdiam(c, opts),
            Command::LevyScan(c) => run_levy(c, opts),
            Command::InvarianceDefect(c) => run_defects(c, opts),
            Command::FlowCheck(c) => run_flow_check(c, opts),
            Command::Concentrate(c) => run_concentrate(c, opts),
            Command::Generate(c) => run_generate(c),
        }
    }
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, String) {
    let start = Instant::now();
    let out = f();
    let ms = if timing {
        num(start.elapsed().as_secs_f64() * 1e3)
    } else {
        String::new()
    };
    (out, ms)
}

fn build_mm(specs: &[MmSpaceSpec], field: &str) -> Result<Vec<MmSpace>, AppError> {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.build()
                .map_err(|e| AppError::invalid(format!("{field}[{i}]"), e))
        })
        .collect()
}

fn check_alphas(alphas: &[f64]) -> Result<(), AppError> {
    if alphas.is_empty() || alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        return Err(AppError::invalid(
            "alphas",
            "alphas must be a non-empty list in (0, 1)",
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    Mt,
    Prokhorov,
    #[default]
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmdistConfig {
    pub space: SpaceSpec,
    pub mu: MeasureSpec,
    pub nu: MeasureSpec,
    #[serde(default)]
    pub metric: MetricChoice,
}

/// One row per distance: `metric,value,runtime_ms`. With the oracle flag
/// the independent routes are added as extra rows and must agree.
fn run_mmdist(c: &MmdistConfig, opts: &RunOptions) -> Result<Outcome, AppError> {
    let x = c.space.build().map_err(|e| AppError::invalid("space", e))?;
    let mu =
        c.mu.build(x.len())
            .map_err(|e| AppError::invalid("mu", e))?;
    let nu =
        c.nu.build(x.len())
            .map_err(|e| AppError::invalid("nu", e))?;
    let mut out = Outcome::default();
    let mut table = Table::new("mmdist", &["metric", "value", "runtime_ms"]);
    let mut compute = |name: &str, f: &dyn Fn() -> mmconc_core::Result<f64>| -> Option<f64> {
        let (v, ms) = timed(opts.timing, f);
        match v {
            Ok(v) => {
                table.push(vec![name.to_string(), num(v), ms]);
                Some(v)
            }
            Err(e) => {
                out.errors.push(format!("{name}: {e}"));
                None
            }
        }
    };
    if matches!(c.metric, MetricChoice::Mt | MetricChoice::Both) {
        let fast = compute("mt", &|| d_mt(&mu, &nu, &x));
        if opts.oracle && x.len() <= MT_LP_MAX {
            let slow = compute("mt_simplex", &|| d_mt_lp(&mu, &nu, &x));
            if let (Some(a), Some(b)) = (fast, slow) {
                if (a - b).abs() > AGREEMENT_TOL {
                    out.assertion_failures
                        .push(format!("mt {a} differs from simplex value {b}"));
                }
            }
        }
    }
    if matches!(c.metric, MetricChoice::Prokhorov | MetricChoice::Both) {
        let fast = compute("prokhorov", &|| d_prokhorov(&mu, &nu, &x));
        if opts.oracle && x.len() <= PROKHOROV_ORACLE_MAX {
            let slow = compute("prokhorov_enumeration", &|| {
                d_prokhorov_oracle(&mu, &nu, &x)
            });
            if let (Some(a), Some(b)) = (fast, slow) {
                if (a - b).abs() > AGREEMENT_TOL {
                    out.assertion_failures
                        .push(format!("prokhorov {a} differs from enumeration value {b}"));
                }
            }
        }
    }
    out.tables.push(table);
    Ok(out)
}

const OBS_HEADER: [&str; 8] = [
    "index",
    "n_points",
    "alpha",
    "lower_bound",
    "oracle_value",
    "eta",
    "witness_id",
    "runtime_ms",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObsdiamConfig {
    pub spaces: Vec<MmSpaceSpec>,
    #[serde(default = "default_obs_alphas")]
    pub alphas: Vec<f64>,
    /// Labels for the `index` column; positions `0, 1, ...` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<f64>>,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

struct ObsRow {
    index: f64,
    alpha: f64,
    lower_bound: f64,
    cells: Vec<String>,
}

fn obs_rows(
    spaces: &[MmSpace],
    alphas: &[f64],
    indices: &Option<Vec<f64>>,
    budget: usize,
    opts: &RunOptions,
    errors: &mut Vec<String>,
) -> Result<Vec<ObsRow>, AppError> {
    check_alphas(alphas)?;
    if let Some(ix) = indices {
        if ix.len() != spaces.len() {
            return Err(AppError::invalid(
                "indices",
                "one index per space is required",
            ));
        }
    }
    let tasks: Vec<(usize, f64)> = (0..spaces.len())
        .flat_map(|i| alphas.iter().map(move |&a| (i, a)))
        .collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|&(i, alpha)| {
            let m = &spaces[i];
            timed(opts.timing, || {
                obs_diam(m, alpha, budget, opts.seed, opts.oracle && oracle_fits(m))
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(tasks.len());
    for (&(i, alpha), (res, ms)) in tasks.iter().zip(results) {
        let index = indices.as_ref().map_or(i as f64, |ix| ix[i]);
        match res {
            Ok(r) => rows.push(ObsRow {
                index,
                alpha,
                lower_bound: r.lower_bound,
                cells: vec![
                    num(index),
                    spaces[i].len().to_string(),
                    num(alpha),
                    num(r.lower_bound),
                    opt_num(r.oracle_value),
                    num(r.eta),
                    r.witness_id.to_string(),
                    ms,
                ],
            }),
            Err(e) => errors.push(format!("space {i}, alpha {alpha}: {e}")),
        }
    }
    Ok(rows)
}

fn run_obsdiam(c: &ObsdiamConfig, opts: &RunOptions) -> Result<Outcome, AppError> {
    let spaces = build_mm(&c.spaces, "spaces")?;
    let mut out = Outcome::default();
    let rows = obs_rows(
        &spaces,
        &c.alphas,
        &c.indices,
        c.budget,
        opts,
        &mut out.errors,
    )?;
    let mut table = Table::new("obsdiam", &OBS_HEADER);
    rows.into_iter().for_each(|r| table.push(r.cells));
    out.tables.push(table);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevyConfig {
    pub sequence: Vec<MmSpaceSpec>,
    #[serde(default = "default_obs_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<f64>>,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

/// The observable-diameter table plus `levy_fit.csv` with the fitted decay
/// exponent per α and whether the lower bounds strictly decrease.
fn run_levy(c: &LevyConfig, opts: &RunOptions) -> Result<Outcome, AppError> {
    let spaces = build_mm(&c.sequence, "sequence")?;
    let mut out = Outcome::default();
    let indices = c
        .indices
        .clone()
        .or_else(|| Some((1..=spaces.len()).map(|i| i as f64).collect()));
    let rows = obs_rows(
        &spaces,
        &c.alphas,
        &indices,
        c.budget,
        opts,
        &mut out.errors,
    )?;
    let mut fit = Table::new("levy_fit", &["alpha", "exponent", "strictly_decreasing"]);
    for &alpha in &c.alphas {
        let column: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.alpha == alpha)
            .map(|r| (r.index, r.lower_bound))
            .collect();
        let decreasing = column.windows(2).all(|w| w[1].1 < w[0].1);
        fit.push(vec![
            num(alpha),
            opt_num(decay_exponent(&column)),
            decreasing.to_string(),
        ]);
    }
    let mut table = Table::new("levy_scan", &OBS_HEADER);
    rows.into_iter().for_each(|r| table.push(r.cells));
    out.tables.push(table);
    out.tables.push(fit);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectItem {
    pub name: String,
    pub group: GroupSpec,
    pub measure: MeasureSpec,
    /// Elements to translate by; every element when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectConfig {
    pub items: Vec<DefectItem>,
}

fn run_defects(c: &DefectConfig, opts: &RunOptions) -> Result<Outcome, AppError> {
    let mut built = Vec::with_capacity(c.items.len());
    for (i, item) in c.items.iter().enumerate() {
        let (g, d) = item
            .group
            .build()
            .map_err(|e| AppError::invalid(format!("items[{i}].group"), e))?;
        let mu = item
            .measure
            .build(g.order())
            .map_err(|e| AppError::invalid(format!("items[{i}].measure"), e))?;
        let elements = item
            .elements
            .clone()
            .unwrap_or_else(|| (0..g.order()).collect());
        built.push((g, d, mu, elements));
    }
    let tasks: Vec<(usize, usize)> = built
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.3.iter().map(move |&g| (i, g)))
        .collect();
    let results: Vec<_> = tasks
        .par_iter()
        .map(|&(i, g)| {
            let (group, d, mu, _) = &built[i];
            timed(opts.timing, || invariance_defect(mu, g, group, d))
        })
        .collect();
    let mut out = Outcome::default();
    let mut table = Table::new(
        "invariance_defect",
        &["group", "order", "g", "defect", "runtime_ms"],
    );
    for (&(i, g), (res, ms)) in tasks.iter().zip(results) {
        match res {
            Ok(v) => table.push(vec![
                c.items[i].name.clone(),
                built[i].0.order().to_string(),
                g.to_string(),
                num(v),
                ms,
            ]),
            Err(e) => out.errors.push(format!("{} g={g}: {e}", c.items[i].name)),
        }
    }
    out.tables.push(table);
    Ok(out)
}

/// The invariant measure on the space of a flow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuSpec {
    HaarAverage { haar_average: MeasureSpec },
    Given(MeasureSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowScenario {
    pub name: String,
    pub flow: FlowSpec,
    /// Measures on the group, in sequence order.
    pub measures: Vec<MeasureSpec>,
    pub nu: NuSpec,
    /// The finite set `E` of group elements.
    pub elements: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    /// Certify observable diameters with the exact oracle where it fits;
    /// on unless set to false, and always on under `--oracle`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowCheckConfig {
    pub scenarios: Vec<FlowScenario>,
}

struct BuiltFlow {
    flow: mmconc_core::dynamics::FlowInstance,
    measures: Vec<Measure>,
    nu: Measure,
    opts: Theorem2Options,
}

fn build_flow_scenario(
    s: &FlowScenario,
    i: usize,
    run: &RunOptions,
) -> Result<BuiltFlow, AppError> {
    let field = |f: &str| format!("scenarios[{i}].{f}");
    let flow = s
        .flow
        .build()
        .map_err(|e| AppError::invalid(field("flow"), e))?;
    let ng = flow.group().order();
    let measures = s
        .measures
        .iter()
        .map(|m| m.build(ng))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| AppError::invalid(field("measures"), e))?;
    let nu = match &s.nu {
        NuSpec::Given(m) => m.build(flow.space().len()),
        NuSpec::HaarAverage { haar_average } => haar_average
            .build(flow.space().len())
            .and_then(|m| haar_average_of(&flow, &m)),
    }
    .map_err(|e| AppError::invalid(field("nu"), e))?;
    let alphas = s.alphas.clone().unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    check_alphas(&alphas)?;
    let opts = Theorem2Options {
        alphas,
        tail_fraction: s.tail_fraction.unwrap_or(0.5),
        budget: s.budget.unwrap_or(DEFAULT_BUDGET),
        seed: run.seed,
        use_oracle: run.oracle || s.oracle.unwrap_or(true),
    };
    Ok(BuiltFlow {
        flow,
        measures,
        nu,
        opts,
    })
}

fn haar_average_of(
    flow: &mmconc_core::dynamics::FlowInstance,
    m: &Measure,
) -> Result<Measure, String> {
    haar_average(flow, m).map_err(|e| e.to_string())
}

/// `flow_check.csv` with one row per scenario and `flow_series.csv` with
/// the per-index observable diameters and invariance defects. Certified
/// violations of either inequality are assertion failures.
fn run_flow_check(c: &FlowCheckConfig, opts: &RunOptions) -> Result<Outcome, AppError> {
    let built = c
        .scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| build_flow_scenario(s, i, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<_> = c
        .scenarios
        .par_iter()
        .zip(built.par_iter())
        .map(|(s, b)| {
            timed(opts.timing, || {
                let report = theorem2_verify(&b.flow, &b.measures, &b.nu, &s.elements, &b.opts)?;
                let point = corollary3_find_point(&b.flow, report.rhs);
                Ok::<_, mmconc_core::Error>((report, point))
            })
        })
        .collect();
    let mut out = Outcome::default();
    let mut table = Table::new(
        "flow_check",
        &[
            "scenario",
            "lhs",
            "rhs",
            "alpha_star",
            "certified",
            "x0",
            "x0_value",
            "runtime_ms",
        ],
    );
    let mut series = Table::new(
        "flow_series",
        &["scenario", "index", "alpha", "value", "certified", "defect"],
    );
    for ((s, b), (res, ms)) in c.scenarios.iter().zip(&built).zip(results) {
        match res {
            Ok((r, p)) => {
                table.push(vec![
                    s.name.clone(),
                    num(r.lhs),
                    num(r.rhs),
                    num(r.alpha_star),
                    r.certified.to_string(),
                    b.flow.space().labels()[p.point].clone(),
                    num(p.value),
                    ms,
                ]);
                for sp in &r.series {
                    series.push(vec![
                        s.name.clone(),
                        sp.index.to_string(),
                        num(sp.alpha),
                        num(sp.value),
                        sp.certified.to_string(),
                        num(r.defects[sp.index]),
                    ]);
                }
                if r.holds == Some(false) {
                    out.assertion_failures.push(format!(
                        "{}: lhs {} exceeds certified rhs {}",
                        s.name, r.lhs, r.rhs
                    ));
                }
                if r.certified && !p.within {
                    out.assertion_failures.push(format!(
                        "{}: displacement {} at x0 exceeds certified rhs {}",
                        s.name, p.value, r.rhs
                    ));
                }
            }
            Err(e) => out.errors.push(format!("{}: {e}", s.name)),
        }
    }
    out.tables.push(table);
    out.tables.push(series);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrateConfig {
    pub sequence: Vec<MmSpaceSpec>,
    pub target: MmSpaceSpec,
    /// `maps[i][x]` is the image of point `x` of `sequence[i]`.
    pub maps: Vec<Vec<usize>>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// When set, adds the median-deviation column `sup_f μ(|f - m_f| > eps)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

fn run_concentrate(c: &ConcentrateConfig, opts: &RunOptions) -> Result<Outcome, AppError> {
    let spaces = build_mm(&c.sequence, "sequence")?;
    let target = c
        .target
        .build()
        .map_err(|e| AppError::invalid("target", e))?;
    if c.maps.len() != spaces.len() {
        return Err(AppError::invalid("maps", "one map per space is required"));
    }
    let maps = c
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| {
            PointMap::new(m.clone(), target.len())
                .map_err(|e| AppError::invalid(format!("maps[{i}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<_> = (0..spaces.len())
        .into_par_iter()
        .map(|i| {
            timed(opts.timing, || {
                let row = concentration_criterion(
                    &spaces[i..=i],
                    &target,
                    &maps[i..=i],
                    c.budget,
                    opts.seed,
                )?;
                let median = match c.eps {
                    Some(eps) => Some(
                        median_concentration_profile(&spaces[i..=i], eps, c.budget, opts.seed)?[0],
                    ),
                    None => None,
                };
                Ok::<_, mmconc_core::Error>((row[0].clone(), median))
            })
        })
        .collect();
    let mut out = Outcome::default();
    let mut table = Table::new(
        "concentrate",
        &[
            "index",
            "prokhorov",
            "pullback_gap_upper",
            "source_gap_lower",
            "median_deviation",
            "runtime_ms",
        ],
    );
    for (i, (res, ms)) in results.into_iter().enumerate() {
        match res {
            Ok((r, med)) => table.push(vec![
                i.to_string(),
                num(r.prokhorov),
                num(r.pullback_gap_upper),
                num(r.source_gap_lower),
                opt_num(med),
                ms,
            ]),
            Err(e) => out.errors.push(format!("index {i}: {e}")),
        }
    }
    out.tables.push(table);
    Ok(out)
}

/// An object to expand into explicit form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GenerateObject {
    Space { space: SpaceSpec },
    Group { group: GroupSpec },
    Flow { flow: FlowSpec },
    Measure { measure: MeasureSpec, n: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateItem {
    pub name: String,
    #[serde(flatten)]
    pub object: GenerateObject,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub objects: Vec<GenerateItem>,
}

/// The explicit JSON form of a generated object.
pub fn expand(object: &GenerateObject) -> Result<(GenerateObject, &'static str, usize), String> {
    Ok(match object {
        GenerateObject::Space { space } => {
            let x = space.build()?;
            (
                GenerateObject::Space {
                    space: SpaceSpec::explicit(&x),
                },
                "space",
                x.len(),
            )
        }
        GenerateObject::Group { group } => {
            let (g, d) = group.build()?;
            (
                GenerateObject::Group {
                    group: GroupSpec::explicit(&g, &d),
                },
                "group",
                g.order(),
            )
        }
        GenerateObject::Flow { flow } => {
            let f = flow.build()?;
            (
                GenerateObject::Flow {
                    flow: FlowSpec::explicit(&f),
                },
                "flow",
                f.space().len(),
            )
        }
        GenerateObject::Measure { measure, n } => {
            let m = measure.build(*n)?;
            (
                GenerateObject::Measure {
                    measure: MeasureSpec::explicit(&m),
                    n: *n,
                },
                "measure",
                *n,
            )
        }
    })
}

/// `generated.json` with explicit forms and a `generated.csv` summary.
fn run_generate(c: &GenerateConfig) -> Result<Outcome, AppError> {
    let mut out = Outcome::default();
    let mut table = Table::new("generated", &["name", "kind", "points"]);
    let mut items = Vec::new();
    for (i, item) in c.objects.iter().enumerate() {
        let (object, kind, points) =
            expand(&item.object).map_err(|e| AppError::invalid(format!("objects[{i}]"), e))?;
        table.push(vec![
            item.name.clone(),
            kind.to_string(),
            points.to_string(),
        ]);
        items.push(GenerateItem {
            name: item.name.clone(),
            object,
        });
    }
    out.documents.push((
        "generated.json".to_string(),
        serde_json::to_value(GenerateConfig { objects: items })?,
    ));
    out.tables.push(table);
    Ok(out)
}

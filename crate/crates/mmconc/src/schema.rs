//! JSON descriptions of spaces, measures, groups and flows, and their
//! conversion to and from core objects.

use serde::{Deserialize, Serialize};

use mmconc_core::dynamics::FlowInstance;
use mmconc_core::generators::{self, CycleScale, SymMetric};
use mmconc_core::groups::{self, FiniteGroup, RightInvariantMetric};
use mmconc_core::{FiniteMetricSpace, Measure, MmSpace};

use crate::error::AppError;

/// `{"labels": [...], "dist": [[...]]}` or `{"generator": ..., "n": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSpec {
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        dist: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "is_false")]
        pseudo: bool,
    },
    Generated {
        generator: SpaceGenerator,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<MetricName>,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceGenerator {
    Hypercube,
    Cyclic,
    Sym,
}

/// Metric choice for generated spaces and groups.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricName {
    Named(NamedMetric),
    Weighted { weighted: Vec<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedMetric {
    NormalizedHamming,
    /// Ring distance with unit edges.
    Geodesic,
    /// Ring distance scaled to diameter 1.
    NormalizedGeodesic,
}

impl SpaceSpec {
    pub fn build(&self) -> Result<FiniteMetricSpace, String> {
        match self {
            SpaceSpec::Explicit {
                labels,
                dist,
                pseudo,
            } => {
                let labels = labels
                    .clone()
                    .unwrap_or_else(|| (0..dist.len()).map(|i| i.to_string()).collect());
                FiniteMetricSpace::new(labels, dist.clone(), *pseudo).map_err(|e| e.to_string())
            }
            SpaceSpec::Generated {
                generator,
                n,
                metric,
            } => match generator {
                SpaceGenerator::Hypercube => match metric {
                    None | Some(MetricName::Named(NamedMetric::NormalizedHamming)) => {
                        generators::hypercube_space(*n).map_err(|e| e.to_string())
                    }
                    Some(_) => Err("hypercube supports only normalized_hamming".into()),
                },
                SpaceGenerator::Cyclic => {
                    let scale = match metric {
                        None | Some(MetricName::Named(NamedMetric::Geodesic)) => {
                            CycleScale::UnitEdges
                        }
                        Some(MetricName::Named(NamedMetric::NormalizedGeodesic)) => {
                            CycleScale::UnitDiameter
                        }
                        Some(_) => {
                            return Err("cyclic supports geodesic or normalized_geodesic".into())
                        }
                    };
                    generators::cycle_space(*n, scale).map_err(|e| e.to_string())
                }
                SpaceGenerator::Sym => {
                    generators::sym_space(*n, &sym_metric(metric)?).map_err(|e| e.to_string())
                }
            },
        }
    }

    pub fn explicit(x: &FiniteMetricSpace) -> Self {
        SpaceSpec::Explicit {
            labels: Some(x.labels().to_vec()),
            dist: x.rows(),
            pseudo: x.is_pseudo(),
        }
    }
}

fn sym_metric(metric: &Option<MetricName>) -> Result<SymMetric, String> {
    match metric {
        None | Some(MetricName::Named(NamedMetric::NormalizedHamming)) => {
            Ok(SymMetric::NormalizedHamming)
        }
        Some(MetricName::Weighted { weighted }) => Ok(SymMetric::Weighted(weighted.clone())),
        Some(_) => Err("sym supports normalized_hamming or weighted".into()),
    }
}

/// `{"weights": [...]}`, `{"uniform": true}`, `{"point": i}`,
/// `{"product": [[...], ...]}` or `{"bernoulli": [p_0, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec {
    Weights { weights: Vec<f64> },
    Uniform { uniform: bool },
    Point { point: usize },
    Product { product: Vec<Vec<f64>> },
    Bernoulli { bernoulli: Vec<f64> },
}

impl MeasureSpec {
    /// Builds a measure on `n` points.
    pub fn build(&self, n: usize) -> Result<Measure, String> {
        let m = match self {
            MeasureSpec::Weights { weights } => Measure::new(weights.clone()),
            MeasureSpec::Uniform { uniform: true } => Measure::uniform(n),
            MeasureSpec::Uniform { uniform: false } => {
                return Err("\"uniform\" must be true".into())
            }
            MeasureSpec::Point { point } => Measure::point_mass(n, *point),
            MeasureSpec::Product { product } => product
                .iter()
                .map(|w| Measure::new(w.clone()))
                .collect::<Result<Vec<_>, _>>()
                .and_then(|f| generators::product_measure(&f)),
            MeasureSpec::Bernoulli { bernoulli } => generators::bernoulli_product(bernoulli),
        }
        .map_err(|e| e.to_string())?;
        if m.len() != n {
            return Err(format!("measure has {} points, space has {n}", m.len()));
        }
        Ok(m)
    }

    pub fn explicit(m: &Measure) -> Self {
        MeasureSpec::Weights {
            weights: m.weights().to_vec(),
        }
    }
}

/// A space together with a measure; the measure defaults to uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmSpaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
}

impl MmSpaceSpec {
    pub fn build(&self) -> Result<MmSpace, String> {
        let x = self.space.build()?;
        let mu = match &self.measure {
            Some(m) => m.build(x.len())?,
            None => Measure::uniform(x.len()).map_err(|e| e.to_string())?,
        };
        MmSpace::new(x, mu).map_err(|e| e.to_string())
    }
}

/// `{"generator": "sym" | "cyclic" | "hypercube", "n": ..., "metric": ...}`
/// or an explicit `{"mul": [[...]], "dist": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        mul: Vec<Vec<usize>>,
        dist: Vec<Vec<f64>>,
    },
    Generated {
        generator: SpaceGenerator,
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<MetricName>,
    },
}

impl GroupSpec {
    /// Cyclic groups default to the diameter-one ring metric.
    pub fn build(&self) -> Result<(FiniteGroup, RightInvariantMetric), String> {
        let err = |e: mmconc_core::Error| e.to_string();
        match self {
            GroupSpec::Explicit { labels, mul, dist } => {
                let labels = labels
                    .clone()
                    .unwrap_or_else(|| (0..mul.len()).map(|i| i.to_string()).collect());
                let g = FiniteGroup::from_table(labels.clone(), mul.clone()).map_err(err)?;
                let x = FiniteMetricSpace::new(labels, dist.clone(), false).map_err(err)?;
                let d = RightInvariantMetric::new(&g, x).map_err(err)?;
                Ok((g, d))
            }
            GroupSpec::Generated {
                generator,
                n,
                metric,
            } => match generator {
                SpaceGenerator::Cyclic => {
                    let scale = match metric {
                        None | Some(MetricName::Named(NamedMetric::NormalizedGeodesic)) => {
                            CycleScale::UnitDiameter
                        }
                        Some(MetricName::Named(NamedMetric::Geodesic)) => CycleScale::UnitEdges,
                        Some(_) => {
                            return Err("cyclic supports geodesic or normalized_geodesic".into())
                        }
                    };
                    let g = FiniteGroup::cyclic(*n).map_err(err)?;
                    let d = groups::cyclic_metric(&g, scale).map_err(err)?;
                    Ok((g, d))
                }
                SpaceGenerator::Hypercube => {
                    if !matches!(
                        metric,
                        None | Some(MetricName::Named(NamedMetric::NormalizedHamming))
                    ) {
                        return Err("hypercube supports only normalized_hamming".into());
                    }
                    let g = FiniteGroup::hypercube(*n).map_err(err)?;
                    let d = groups::hypercube_metric(&g).map_err(err)?;
                    Ok((g, d))
                }
                SpaceGenerator::Sym => {
                    let g = FiniteGroup::symmetric(*n).map_err(err)?;
                    let d = groups::sym_metric(&g, &sym_metric(metric)?).map_err(err)?;
                    Ok((g, d))
                }
            },
        }
    }

    pub fn explicit(g: &FiniteGroup, d: &RightInvariantMetric) -> Self {
        GroupSpec::Explicit {
            labels: Some(g.labels().to_vec()),
            mul: g.table(),
            dist: d.base().rows(),
        }
    }
}

/// `{"group": ..., "space": ..., "action": [[...]]}` or a generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FlowSpec {
    Explicit {
        group: GroupSpec,
        space: SpaceSpec,
        action: Vec<Vec<usize>>,
    },
    Generated(FlowGenerator),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum FlowGenerator {
    /// The group acting on itself.
    Regular { group: GroupSpec },
    /// The group acting on left cosets of a subgroup.
    Coset {
        group: GroupSpec,
        subgroup: Vec<usize>,
    },
    /// Every element fixes every point.
    Trivial { group: GroupSpec, space: SpaceSpec },
    /// Disjoint union of flows of one group, parts `gap` apart.
    Union { parts: Vec<FlowSpec>, gap: f64 },
}

impl FlowSpec {
    pub fn build(&self) -> Result<FlowInstance, String> {
        let err = |e: mmconc_core::Error| e.to_string();
        match self {
            FlowSpec::Explicit {
                group,
                space,
                action,
            } => {
                let (g, _) = group.build()?;
                FlowInstance::new(g, space.build()?, action.clone()).map_err(err)
            }
            FlowSpec::Generated(FlowGenerator::Regular { group }) => {
                let (g, d) = group.build()?;
                FlowInstance::regular(g, &d).map_err(err)
            }
            FlowSpec::Generated(FlowGenerator::Coset { group, subgroup }) => {
                let (g, d) = group.build()?;
                FlowInstance::coset(g, &d, subgroup).map_err(err)
            }
            FlowSpec::Generated(FlowGenerator::Trivial { group, space }) => {
                let (g, _) = group.build()?;
                FlowInstance::trivial(g, space.build()?).map_err(err)
            }
            FlowSpec::Generated(FlowGenerator::Union { parts, gap }) => {
                let mut it = parts.iter();
                let first = it.next().ok_or("union needs at least one part")?.build()?;
                it.try_fold(first, |acc, p| {
                    FlowInstance::disjoint_union(&acc, &p.build()?, *gap).map_err(err)
                })
            }
        }
    }

    /// The metric carried by the group is not recoverable from a flow, so
    /// the explicit form uses the orbit metric `d_{G,X}` when it is a
    /// metric and the discrete metric otherwise.
    pub fn explicit(flow: &FlowInstance) -> Self {
        let g = flow.group();
        let dist = match mmconc_core::dynamics::d_gx_sup(flow) {
            Ok(d)
                if !d
                    .base()
                    .matrix()
                    .iter()
                    .enumerate()
                    .any(|(k, &v)| v == 0.0 && k / g.order() != k % g.order()) =>
            {
                d.base().rows()
            }
            _ => (0..g.order())
                .map(|i| {
                    (0..g.order())
                        .map(|j| if i == j { 0.0 } else { 1.0 })
                        .collect()
                })
                .collect(),
        };
        FlowSpec::Explicit {
            group: GroupSpec::Explicit {
                labels: Some(g.labels().to_vec()),
                mul: g.table(),
                dist,
            },
            space: SpaceSpec::explicit(flow.space()),
            action: flow.action_table(),
        }
    }
}

/// Parses JSON, reporting the position of syntax and shape errors.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, source: &str) -> Result<T, AppError> {
    serde_json::from_str(text).map_err(|e| AppError::Config {
        source_name: source.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_forms() {
        let s: SpaceSpec = parse(r#"{"dist": [[0, 1], [1, 0]]}"#, "t").unwrap();
        assert_eq!(s.build().unwrap().dist(0, 1), 1.0);
        let s: SpaceSpec = parse(r#"{"generator": "cyclic", "n": 4}"#, "t").unwrap();
        assert_eq!(s.build().unwrap().row(0), &[0.0, 1.0, 2.0, 1.0]);
        let s: SpaceSpec = parse(
            r#"{"generator": "sym", "n": 3, "metric": {"weighted": [0.5, 0.3, 0.2]}}"#,
            "t",
        )
        .unwrap();
        assert_eq!(s.build().unwrap().len(), 6);
    }

    #[test]
    fn measure_forms() {
        let m: MeasureSpec = parse(r#"{"uniform": true}"#, "t").unwrap();
        assert_eq!(m.build(4).unwrap(), Measure::uniform(4).unwrap());
        let m: MeasureSpec = parse(r#"{"point": 1}"#, "t").unwrap();
        assert_eq!(m.build(2).unwrap().weights(), &[0.0, 1.0]);
        let m: MeasureSpec = parse(r#"{"bernoulli": [0.5, 0.25]}"#, "t").unwrap();
        assert_eq!(m.build(4).unwrap().weights(), &[0.375, 0.375, 0.125, 0.125]);
        assert!(m.build(8).is_err());
    }

    #[test]
    fn group_defaults() {
        let g: GroupSpec = parse(r#"{"generator": "cyclic", "n": 4}"#, "t").unwrap();
        let (_, d) = g.build().unwrap();
        assert_eq!(d.base().row(0), &[0.0, 0.5, 1.0, 0.5]);
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse::<SpaceSpec>("{\n  \"dist\": [[0, 1],\n  }", "cfg.json") {
            Err(AppError::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}

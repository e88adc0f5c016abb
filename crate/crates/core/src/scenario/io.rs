//! JSON documents for scenarios and solutions.
//!
//! Both documents carry a `format_version`. Money is stored as integer
//! milli-units, counts and bandwidths as integers; arrays follow the declared
//! order of the id lists.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    DataCenter, ModelError, QosAttribute, Scenario, ScenarioParts, Service, Solution, UserCluster,
};
use crate::money::Money;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("validation error: {0}")]
    Validation(#[from] ModelError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDocument {
    format_version: u32,
    horizon: usize,
    qos_attributes: Vec<QosAttribute>,
    data_centers: Vec<DataCenter>,
    user_clusters: Vec<UserCluster>,
    services: Vec<Service>,
    demand: Vec<Vec<Vec<u32>>>,
    qos_guarantees: Vec<Vec<Vec<f64>>>,
    penalty_costs: Vec<Vec<Money>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionDocument {
    format_version: u32,
    x: Vec<bool>,
    z: Vec<u32>,
    y: Vec<Vec<Vec<Vec<u32>>>>,
    y_pen: Vec<Vec<Vec<u32>>>,
}

fn finish(mut text: String) -> Vec<u8> {
    text.push('\n');
    text.into_bytes()
}

pub fn write_scenario(scenario: &Scenario) -> Vec<u8> {
    let p = scenario.parts().clone();
    let doc = ScenarioDocument {
        format_version: FORMAT_VERSION,
        horizon: p.horizon,
        qos_attributes: p.qos_attributes,
        data_centers: p.data_centers,
        user_clusters: p.user_clusters,
        services: p.services,
        demand: p.demand,
        qos_guarantees: p.qos_guarantees,
        penalty_costs: p.penalty_costs,
    };
    finish(serde_json::to_string_pretty(&doc).expect("scenario serializes"))
}

pub fn read_scenario(bytes: &[u8]) -> Result<Scenario, FormatError> {
    let doc: ScenarioDocument = serde_json::from_slice(bytes)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(doc.format_version));
    }
    Ok(Scenario::new(ScenarioParts {
        horizon: doc.horizon,
        qos_attributes: doc.qos_attributes,
        data_centers: doc.data_centers,
        user_clusters: doc.user_clusters,
        services: doc.services,
        demand: doc.demand,
        qos_guarantees: doc.qos_guarantees,
        penalty_costs: doc.penalty_costs,
    })?)
}

pub fn write_solution(solution: &Solution) -> Vec<u8> {
    let doc = SolutionDocument {
        format_version: FORMAT_VERSION,
        x: solution.x.clone(),
        z: solution.z.clone(),
        y: solution.y.clone(),
        y_pen: solution.y_pen.clone(),
    };
    finish(serde_json::to_string(&doc).expect("solution serializes"))
}

/// Parses a solution document. Dimensions are checked against `scenario`.
pub fn read_solution(bytes: &[u8], scenario: &Scenario) -> Result<Solution, FormatError> {
    let doc: SolutionDocument = serde_json::from_slice(bytes)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(doc.format_version));
    }
    let sol = Solution {
        x: doc.x,
        z: doc.z,
        y: doc.y,
        y_pen: doc.y_pen,
    };
    sol.check_dims(scenario)?;
    Ok(sol)
}

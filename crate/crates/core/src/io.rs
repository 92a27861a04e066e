//! Space input formats. JSON documents carry either coordinates with a
//! metric name or a full distance matrix:
//!
//! ```json
//! {"points": [[0.0],[0.5]], "masses": [1,1], "base_point": 0, "metric": "euclidean"}
//! {"distance_matrix": [[0,0.5],[0.5,0]], "masses": [1,1], "base_point": 0, "metric": "matrix"}
//! ```
//!
//! The CSV alternative has a header row naming coordinate columns plus a
//! `mass` column; the base point is row 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistMatrix;
use crate::space::PointCloudSpace;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_matrix: Option<Vec<Vec<f64>>>,
    pub masses: Vec<f64>,
    #[serde(default)]
    pub base_point: usize,
    #[serde(default = "default_metric")]
    pub metric: String,
}

fn default_metric() -> String {
    "euclidean".into()
}

pub fn space_from_json(text: &str) -> Result<PointCloudSpace> {
    let doc: SpaceDocument =
        serde_json::from_str(text).map_err(|e| Error::SpaceFormat(e.to_string()))?;
    space_from_document(doc)
}

pub fn space_from_document(doc: SpaceDocument) -> Result<PointCloudSpace> {
    match doc.metric.as_str() {
        "euclidean" => {
            let points = doc
                .points
                .ok_or_else(|| Error::SpaceFormat("euclidean metric needs points".into()))?;
            PointCloudSpace::from_points(points, doc.masses, doc.base_point)
        }
        "matrix" => {
            let rows = doc.distance_matrix.ok_or_else(|| {
                Error::SpaceFormat("matrix metric needs distance_matrix".into())
            })?;
            PointCloudSpace::from_distance_matrix(
                DistMatrix::from_rows(rows)?,
                doc.masses,
                doc.base_point,
                doc.points,
            )
        }
        other => Err(Error::SpaceFormat(format!("unknown metric {other:?}"))),
    }
}

pub fn space_from_csv(text: &str) -> Result<PointCloudSpace> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::SpaceFormat("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let mass_col = cols
        .iter()
        .position(|c| c.eq_ignore_ascii_case("mass"))
        .ok_or_else(|| Error::SpaceFormat("CSV needs a mass column".into()))?;
    let mut points = Vec::new();
    let mut masses = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::SpaceFormat(format!(
                "CSV row {} has {} fields, header has {}",
                lineno + 2,
                fields.len(),
                cols.len()
            )));
        }
        let mut coord = Vec::with_capacity(cols.len() - 1);
        for (k, f) in fields.iter().enumerate() {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::SpaceFormat(format!("bad number {f:?} in CSV row {}", lineno + 2)))?;
            if k == mass_col {
                masses.push(v);
            } else {
                coord.push(v);
            }
        }
        points.push(coord);
    }
    PointCloudSpace::from_points(points, masses, 0)
}

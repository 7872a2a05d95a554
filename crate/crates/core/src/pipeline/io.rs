//! CSV and NDJSON artifacts. Angles are written in degrees.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FIELD_CSV: &str = "field.csv";
pub const CROSSSECTIONS_CSV: &str = "crosssections.csv";
pub const REPORT_CSV: &str = "report.csv";
pub const MESH_CSV: &str = "mesh.csv";
pub const SONIC_FRONT_CSV: &str = "sonic_front.csv";
pub const ENVELOPE_CSV: &str = "envelope.csv";
pub const RUN_NDJSON: &str = "run.ndjson";
pub const VALIDATION_NDJSON: &str = "validation.ndjson";

/// One cell of `field.csv`, ordered by angle then radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub r: f64,
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub m: f64,
    pub n: f64,
    pub p: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionRow {
    pub theta_deg: f64,
    pub r: f64,
    pub rho: f64,
    pub p: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub theta_deg: f64,
    pub class: String,
    pub transition_r: Option<f64>,
}

/// Rows of the `chars_*.csv` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub family: String,
    pub theta: f64,
    pub r: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub theta: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshRow {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
    pub r: f64,
    pub p: f64,
    #[serde(rename = "R")]
    pub r_dir: f64,
    #[serde(rename = "S")]
    pub s_dir: f64,
    pub t: f64,
    pub sonic_flag: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    pub theta: f64,
    pub r: f64,
    #[serde(rename = "RS_value")]
    pub rs_value: f64,
}

/// Prescribed `Gamma23` data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub theta_deg: f64,
    pub f: f64,
    pub g: f64,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(std::io::BufReader::new(File::open(path)?));
    r.deserialize().map(|row| row.map_err(|e| csv_err(path, e))).collect()
}

/// Appends one JSON value per line.
pub fn append_ndjson(path: &Path, values: &[serde_json::Value]) -> Result<()> {
    let mut f = BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?);
    for v in values {
        serde_json::to_writer(&mut f, v).map_err(|e| Error::Parse(e.to_string()))?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

pub fn read_ndjson(path: &Path) -> Result<Vec<serde_json::Value>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(format!("{}: {e}", path.display()))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let rows = vec![
            MeshRow { i: 0, j: 1, theta: 45.0, r: 0.1 + 0.2, p: 1.0 / 3.0, r_dir: 0.09375, s_dir: 0.0, t: 1e-17, sonic_flag: 1 },
            MeshRow { i: 2, j: 3, theta: 89.99, r: std::f64::consts::PI, p: 2e-300, r_dir: -0.0, s_dir: 5.0, t: 0.5, sonic_flag: 0 },
        ];
        write_csv(&path, rows.iter()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("i,j,theta,r,p,R,S,t,sonic_flag\n"), "{text}");
        let back: Vec<MeshRow> = read_csv(&path).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn ndjson_appends() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ndjson");
        append_ndjson(&path, &[serde_json::json!({"a": 1})]).unwrap();
        append_ndjson(&path, &[serde_json::json!({"b": 2}), serde_json::json!({"c": 3})]).unwrap();
        let v = read_ndjson(&path).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[0]["a"], 1);
        assert_eq!(v[2]["c"], 3);
    }

    #[test]
    fn report_rows_allow_missing_radius() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![
            ReportRow { theta_deg: 10.0, class: "SHOCK".into(), transition_r: Some(0.48) },
            ReportRow { theta_deg: 11.0, class: "UNCLASSIFIED".into(), transition_r: None },
        ];
        write_csv(&path, rows.iter()).unwrap();
        assert_eq!(read_csv::<ReportRow>(&path).unwrap(), rows);
    }
}

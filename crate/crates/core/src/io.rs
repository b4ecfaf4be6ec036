//! CSV exchange formats for curves, height fields and trajectories.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::TrajectoryRecord;
use crate::Vec2;

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    param: f64,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct HeightRow {
    param: f64,
    h: f64,
}

#[derive(Debug, Serialize)]
struct TrajectoryRow {
    t: f64,
    node: usize,
    x: f64,
    y: f64,
    h: f64,
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}

fn params(n: usize) -> Vec<f64> {
    crate::spectral::grid(n)
}

/// Writes `param,x,y` rows in cyclic order.
pub fn write_curve_csv<W: Write>(out: W, nodes: &[Vec2]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (param, p) in params(nodes.len()).into_iter().zip(nodes) {
        w.serialize(CurveRow { param, x: p.x, y: p.y }).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<Vec2>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<CurveRow>()
        .map(|row| row.map(|c| Vec2::new(c.x, c.y)).map_err(csv_error))
        .collect()
}

/// Writes `param,h` rows.
pub fn write_height_csv<W: Write>(out: W, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (param, h) in params(values.len()).into_iter().zip(values) {
        w.serialize(HeightRow { param, h: *h }).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_height_csv<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<HeightRow>().map(|row| row.map(|c| c.h).map_err(csv_error)).collect()
}

/// Writes `t,node,x,y,h` rows.
pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &[TrajectoryRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in trajectory {
        for (node, (p, h)) in rec.nodes.iter().zip(&rec.h).enumerate() {
            w.serialize(TrajectoryRow { t: rec.t, node, x: p.x, y: p.y, h: *h }).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    #[test]
    fn curve_round_trip_is_exact() {
        let pts = shapes::ellipse(16, 1.0, 0.6);
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &pts).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("param,x,y\n"));
        assert_eq!(read_curve_csv(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn height_round_trip_and_bad_rows() {
        let h = vec![0.1, -0.2, 0.3];
        let mut buf = Vec::new();
        write_height_csv(&mut buf, &h).unwrap();
        assert_eq!(read_height_csv(buf.as_slice()).unwrap(), h);
        assert!(read_height_csv("param,h\n0,abc\n".as_bytes()).is_err());
    }
}

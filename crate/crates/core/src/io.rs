//! CSV ingestion and segment output.
//!
//! Input rows are `traj_id,t,x,y`. Rows are grouped by trajectory id in
//! order of first appearance. Within a trajectory a row repeating the previous
//! timestamp is dropped; any other non-increasing timestamp rejects the file.
//! With `geo`, `x`/`y` are longitude/latitude in degrees and are projected to
//! meters about each trajectory's first point.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Equirectangular, Point};
use crate::repr::PiecewiseRepresentation;

pub const INPUT_HEADER: [&str; 4] = ["traj_id", "t", "x", "y"];
pub const SEGMENT_HEADER: [&str; 10] = [
    "traj_id",
    "seg_index",
    "sx",
    "sy",
    "st",
    "ex",
    "ey",
    "et",
    "covered",
    "patched_start",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: String,
    pub points: Vec<Point>,
}

impl AsRef<[Point]> for Trajectory {
    fn as_ref(&self) -> &[Point] {
        &self.points
    }
}

pub fn ingest_csv(path: &Path, geo: bool) -> Result<Vec<Trajectory>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, path, geo)
}

/// Parses trajectories from any reader; `source` names it in errors.
pub fn read_csv<R: Read>(reader: R, source: &Path, geo: bool) -> Result<Vec<Trajectory>> {
    let csv_err = |line: u64, message: String| Error::Csv {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
    if header.iter().ne(INPUT_HEADER) {
        return Err(csv_err(1, format!("expected header `{}`", INPUT_HEADER.join(","))));
    }

    let mut trajs: Vec<Trajectory> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let num = |k: usize| -> Result<f64> {
            let field = &record[k];
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(csv_err(
                    line,
                    format!("`{}` is not a finite number: `{field}`", INPUT_HEADER[k]),
                )),
            }
        };
        let id = &record[0];
        let (t, x, y) = (num(1)?, num(2)?, num(3)?);
        let slot = match by_id.get(id) {
            Some(&k) => k,
            None => {
                by_id.insert(id.to_string(), trajs.len());
                trajs.push(Trajectory {
                    id: id.to_string(),
                    points: Vec::new(),
                });
                trajs.len() - 1
            }
        };
        let traj = &mut trajs[slot];
        if let Some(last) = traj.points.last() {
            if t == last.t {
                continue;
            }
            if t < last.t {
                return Err(Error::TrajectoryOrder {
                    path: source.to_path_buf(),
                    traj_id: traj.id.clone(),
                    line,
                    previous: last.t,
                    t,
                });
            }
        }
        traj.points.push(Point::new(x, y, t));
    }

    if geo {
        for traj in &mut trajs {
            let first = traj.points[0];
            let proj = Equirectangular::new(first.x, first.y);
            for p in &mut traj.points {
                (p.x, p.y) = proj.project(p.x, p.y);
            }
        }
    }
    Ok(trajs)
}

/// Writes trajectories in the input format with full precision.
pub fn write_trajectories<W: Write>(w: W, trajs: &[Trajectory]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let map = |e: csv::Error| Error::Invariant(format!("csv write failed: {e}"));
    wtr.write_record(INPUT_HEADER).map_err(map)?;
    for traj in trajs {
        for p in &traj.points {
            wtr.write_record([traj.id.clone(), p.t.to_string(), p.x.to_string(), p.y.to_string()])
                .map_err(map)?;
        }
    }
    wtr.flush()
        .map_err(|e| Error::Invariant(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Writes one row per segment, coordinates to 9 significant digits.
pub fn write_segments<W: Write>(w: W, reps: &[(&str, &PiecewiseRepresentation)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let map = |e: csv::Error| Error::Invariant(format!("csv write failed: {e}"));
    wtr.write_record(SEGMENT_HEADER).map_err(map)?;
    for (id, rep) in reps {
        for (k, s) in rep.segments.iter().enumerate() {
            wtr.write_record([
                id.to_string(),
                k.to_string(),
                sig9(s.start.x),
                sig9(s.start.y),
                sig9(s.start.t),
                sig9(s.end.x),
                sig9(s.end.y),
                sig9(s.end.t),
                s.covered.to_string(),
                s.patched_start.to_string(),
            ])
            .map_err(map)?;
        }
    }
    wtr.flush()
        .map_err(|e| Error::Invariant(format!("csv flush failed: {e}")))?;
    Ok(())
}

pub fn emit_segments(path: &Path, reps: &[(&str, &PiecewiseRepresentation)]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_segments(&mut w, reps)?;
    w.flush().map_err(io_err)
}

/// Shortest decimal form of `v` rounded to 9 significant digits.
pub fn sig9(v: f64) -> String {
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::Segment;

    fn parse(text: &str) -> Result<Vec<Trajectory>> {
        read_csv(text.as_bytes(), Path::new("mem.csv"), false)
    }

    #[test]
    fn parses_and_groups() {
        let t = parse("traj_id,t,x,y\na,0,0,0\nb,0,1,1\na,1,3,4\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].id, "a");
        assert_eq!(t[0].points, vec![Point::new(0.0, 0.0, 0.0), Point::new(3.0, 4.0, 1.0)]);
        assert_eq!(t[1].points.len(), 1);
    }

    #[test]
    fn drops_duplicate_timestamps() {
        let t = parse("traj_id,t,x,y\na,0,0,0\na,0,9,9\na,1,1,0\n").unwrap();
        assert_eq!(t[0].points, vec![Point::new(0.0, 0.0, 0.0), Point::new(1.0, 0.0, 1.0)]);
    }

    #[test]
    fn rejects_backwards_time() {
        match parse("traj_id,t,x,y\na,5,0,0\na,3,1,1\n") {
            Err(Error::TrajectoryOrder { traj_id, line, .. }) => {
                assert_eq!(traj_id, "a");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_rows() {
        for bad in [
            "traj_id,t,x,y\na,0,0\n",
            "traj_id,t,x,y\na,0,zero,0\n",
            "traj_id,t,x,y\na,0,NaN,0\n",
            "id,t,x,y\na,0,0,0\n",
        ] {
            match parse(bad) {
                Err(Error::Csv { line, .. }) => assert!(line >= 1),
                other => panic!("{bad:?}: unexpected {other:?}"),
            }
        }
        match parse("traj_id,t,x,y\na,0,0,0\na,1,x,0\n") {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn geo_projection_about_first_point() {
        let t = read_csv(
            "traj_id,t,x,y\na,0,116.3,39.9\na,1,116.301,39.9\n".as_bytes(),
            Path::new("geo.csv"),
            true,
        )
        .unwrap();
        assert_eq!((t[0].points[0].x, t[0].points[0].y), (0.0, 0.0));
        let expected = 0.001 * 111_320.0 * 39.9f64.to_radians().cos();
        assert!((t[0].points[1].x - expected).abs() < 1e-6);
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(-0.0), "0");
        assert_eq!(sig9(0.1), "0.1");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(123456789012.0), "123456789000");
        assert_eq!(sig9(-2.5), "-2.5");
    }

    #[test]
    fn segment_output() {
        let traj = vec![Point::new(0.0, 0.0, 0.0), Point::new(1.0 / 3.0, 2.0, 1.0)];
        let mut rep = PiecewiseRepresentation::new(vec![Segment::between(&traj, 0, 1)]);
        let mut a = Vec::new();
        write_segments(&mut a, &[("x", &rep)]).unwrap();
        let text = String::from_utf8(a.clone()).unwrap();
        assert_eq!(
            text,
            "traj_id,seg_index,sx,sy,st,ex,ey,et,covered,patched_start\nx,0,0,0,0,0.333333333,2,1,2,false\n"
        );
        let mut b = Vec::new();
        write_segments(&mut b, &[("x", &rep)]).unwrap();
        assert_eq!(a, b);

        rep.segments[0].patched_start = true;
        let mut c = Vec::new();
        write_segments(&mut c, &[("x", &rep)]).unwrap();
        assert!(String::from_utf8(c).unwrap().trim_end().ends_with(",true"));
    }
}

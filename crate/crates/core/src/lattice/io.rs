//! CSV and JSON containers for fields.
//!
//! CSV columns are `m,n,x,t,u` for the heat convention and `n,m,x,t,u` for the
//! Toda convention. The JSON container is
//! `{grid, values, arithmetic_mode}`; exact rationals are `"p/q"` strings.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Field, IndexConvention, LatticeError, LatticeGrid, Window};
use crate::scalar::{ArithmeticMode, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    pub convention: IndexConvention,
    pub space_range: (i64, i64),
    pub time_range: (i64, i64),
    pub sigma_x: Value,
    pub sigma_t: Value,
    pub x0: Value,
    pub t0: Value,
    pub x: Vec<Value>,
    pub t: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldDocument {
    pub grid: GridDocument,
    pub values: Vec<Value>,
    pub arithmetic_mode: ArithmeticMode,
}

impl<S: Scalar> Field<S> {
    /// The grid in the document is restricted to the field's window.
    pub fn to_document(&self) -> FieldDocument {
        let w = self.window();
        let g = self.grid();
        let coords = |pick: &dyn Fn(i64, i64) -> Value| w.indices().map(|(s, t)| pick(s, t)).collect();
        FieldDocument {
            grid: GridDocument {
                convention: g.convention(),
                space_range: w.space,
                time_range: w.time,
                sigma_x: g.sigma_x().to_json(),
                sigma_t: g.sigma_t().to_json(),
                x0: g.x0().to_json(),
                t0: g.t0().to_json(),
                x: coords(&|s, t| g.x(s, t).unwrap().to_json()),
                t: coords(&|s, t| g.t(s, t).unwrap().to_json()),
            },
            values: self.values().iter().map(Scalar::to_json).collect(),
            arithmetic_mode: S::MODE,
        }
    }

    pub fn from_document(doc: &FieldDocument) -> Result<Self, LatticeError> {
        let conv = |v: &Value| S::from_json(v).map_err(|e| LatticeError::Format(e.to_string()));
        let many = |vs: &[Value]| vs.iter().map(conv).collect::<Result<Vec<S>, _>>();
        let w = Window::new(doc.grid.space_range, doc.grid.time_range);
        let grid = LatticeGrid::from_coordinates(
            w,
            many(&doc.grid.x)?,
            many(&doc.grid.t)?,
            conv(&doc.grid.sigma_x)?,
            conv(&doc.grid.sigma_t)?,
            doc.grid.convention,
        )?;
        Field::new(Arc::new(grid), w, many(&doc.values)?)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<(), LatticeError> {
        serde_json::to_writer_pretty(w, &self.to_document()).map_err(|e| LatticeError::Io(e.to_string()))
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self, LatticeError> {
        let doc: FieldDocument = serde_json::from_reader(r).map_err(|e| LatticeError::Format(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), LatticeError> {
        let io = |e: csv::Error| LatticeError::Io(e.to_string());
        let mut out = csv::Writer::from_writer(w);
        let (ls, lt) = self.grid().convention().labels();
        out.write_record([ls, lt, "x", "t", "u"]).map_err(io)?;
        for (s, t) in self.window().indices() {
            out.write_record([
                s.to_string(),
                t.to_string(),
                self.x(s, t)?.render(),
                self.t(s, t)?.render(),
                self.get(s, t)?.render(),
            ])
            .map_err(io)?;
        }
        out.flush().map_err(|e| LatticeError::Io(e.to_string()))
    }

    /// Reads a complete rectangle of nodes; spacings are inferred from neighbours.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, LatticeError> {
        let fmt = |m: String| LatticeError::Format(m);
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let headers = rdr.headers().map_err(|e| fmt(e.to_string()))?.clone();
        let names: Vec<&str> = headers.iter().map(str::trim).collect();
        let convention = match names.as_slice() {
            ["m", "n", "x", "t", "u"] => IndexConvention::Heat,
            ["n", "m", "x", "t", "u"] => IndexConvention::Toda,
            other => return Err(fmt(format!("unexpected CSV header {other:?}"))),
        };
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| fmt(e.to_string()))?;
            let idx = |k: usize| rec[k].trim().parse::<i64>().map_err(|e| fmt(format!("index `{}`: {e}", &rec[k])));
            let val = |k: usize| S::parse_scalar(&rec[k]).map_err(|e| fmt(e.to_string()));
            rows.push(((idx(0)?, idx(1)?), (val(2)?, val(3)?, val(4)?)));
        }
        if rows.is_empty() {
            return Err(LatticeError::EmptyWindow);
        }
        let smin = rows.iter().map(|r| r.0 .0).min().unwrap();
        let smax = rows.iter().map(|r| r.0 .0).max().unwrap();
        let tmin = rows.iter().map(|r| r.0 .1).min().unwrap();
        let tmax = rows.iter().map(|r| r.0 .1).max().unwrap();
        let w = Window::new((smin, smax), (tmin, tmax));
        if rows.len() != w.len() {
            return Err(fmt(format!("{} rows do not fill the rectangle {w}", rows.len())));
        }
        let mut slots: Vec<Option<(S, S, S)>> = vec![None; w.len()];
        for ((s, t), v) in rows {
            let p = w.position(s, t).unwrap();
            if slots[p].replace(v).is_some() {
                return Err(fmt(format!("duplicate node ({s}, {t})")));
            }
        }
        let (mut xs, mut ts, mut us) = (Vec::new(), Vec::new(), Vec::new());
        for v in slots.into_iter().flatten() {
            xs.push(v.0);
            ts.push(v.1);
            us.push(v.2);
        }
        let sigma_x = if w.width() > 1 { xs[1].clone() - xs[0].clone() } else { S::one() };
        let sigma_t = if w.height() > 1 { ts[w.width()].clone() - ts[0].clone() } else { S::one() };
        let grid = LatticeGrid::from_coordinates(w, xs, ts, sigma_x, sigma_t, convention)?;
        Field::new(Arc::new(grid), w, us)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    fn sample() -> Field<BigRational> {
        let g = Arc::new(LatticeGrid::heat(Window::new((-1, 2), (0, 1)), rat(1, 2), rat(1, 3), rat(1, 5), rat(0, 1)).unwrap());
        Field::from_fn(g, |m, n, x, _| rat(m * m - n, 3) + x.clone())
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = sample();
        let mut buf = Vec::new();
        f.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"rational\""));
        assert!(text.contains("\"1/12\""));
        let g = Field::<BigRational>::read_json(buf.as_slice()).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!(g.grid().xs(), f.grid().xs());
        assert_eq!(g.grid().sigma_t(), &rat(1, 12));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let f = sample();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("m,n,x,t,u"));
        let g = Field::<BigRational>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!(g.window(), f.window());
        assert_eq!(g.grid().sigma_x(), &rat(1, 2));
        assert_eq!(g.grid().x0(), &rat(1, 5));
    }

    #[test]
    fn csv_rejects_holes() {
        let text = "m,n,x,t,u\n0,0,0,0,1\n1,1,1,1,1\n";
        assert!(Field::<f64>::read_csv(text.as_bytes()).is_err());
        let toda = "n,m,x,t,u\n0,0,0,0,1\n1,0,1,0,2\n";
        let f = Field::<f64>::read_csv(toda.as_bytes()).unwrap();
        assert_eq!(f.grid().convention(), IndexConvention::Toda);
    }
}

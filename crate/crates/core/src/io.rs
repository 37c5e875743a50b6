//! CSV and JSON output. Floats are written with 17 significant digits so
//! that files round-trip exactly and identical runs give identical bytes.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphFunction, GraphParams};
use crate::phase::PhasePoint;
use crate::variational::{HistoryRow, SweepRow};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

/// `# omega=..,gamma=..,L=..,R=..,h=..`, then `edge,x,value` rows for the
/// loop (`c`, from `-L` to `L`) and the half-line (`h`, from `0` to `R`).
pub fn write_state_csv<W: Write>(mut w: W, v: &GraphFunction, params: &GraphParams) -> Result<()> {
    if !v.conforms_to(params) {
        return Err(Error::GridMismatch("state does not match the grid".into()));
    }
    writeln!(
        w,
        "# omega={},gamma={},L={},R={},h={}",
        fmt_f64(params.omega),
        fmt_f64(params.gamma),
        fmt_f64(params.l),
        fmt_f64(params.r),
        fmt_f64(params.h)
    )?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["edge", "x", "value"])?;
    for (j, &y) in v.loop_values().iter().enumerate() {
        out.write_record(["c", &fmt_f64(params.loop_x(j)), &fmt_f64(y)])?;
    }
    for (i, &y) in v.tail_values().iter().enumerate() {
        out.write_record(["h", &fmt_f64(params.tail_x(i)), &fmt_f64(y)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_state_csv<R: Read>(mut r: R) -> Result<(GraphParams, GraphFunction)> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let (first, body) = text.split_once('\n').ok_or_else(|| Error::Parse("empty state file".into()))?;
    let meta = first
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '# omega=..' header line".into()))?;
    let get = |key: &str| -> Result<f64> {
        meta.split(',')
            .filter_map(|kv| kv.trim().split_once('='))
            .find(|(k, _)| *k == key)
            .ok_or_else(|| Error::Parse(format!("header lacks {key}")))
            .and_then(|(_, v)| parse_f64(v))
    };
    let (omega, gamma, l, rr, h) = (get("omega")?, get("gamma")?, get("L")?, get("R")?, get("h")?);
    let params = GraphParams::from_counts(omega, gamma, l, (2.0 * l / h).round() as usize, (rr / h).round() as usize)?;
    let mut loop_values = Vec::with_capacity(params.n_loop + 1);
    let mut tail_values = Vec::with_capacity(params.n_tail + 1);
    for rec in csv::Reader::from_reader(body.as_bytes()).records() {
        let rec = rec?;
        let value = parse_f64(rec.get(2).ok_or_else(|| Error::Parse("short row".into()))?)?;
        match rec.get(0) {
            Some("c") => loop_values.push(value),
            Some("h") => tail_values.push(value),
            other => return Err(Error::Parse(format!("unknown edge {other:?}"))),
        }
    }
    let v = GraphFunction::new(loop_values, tail_values)?;
    if !v.conforms_to(&params) {
        return Err(Error::GridMismatch("row counts disagree with the header".into()));
    }
    Ok((params, v))
}

pub fn write_history_csv<W: Write>(w: W, rows: &[HistoryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iteration", "action", "nehari", "relative_change", "dt"])?;
    for r in rows {
        out.write_record([
            r.iteration.to_string(),
            fmt_f64(r.action),
            fmt_f64(r.nehari),
            fmt_f64(r.relative_change),
            fmt_f64(r.dt),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "L",
        "converged",
        "iterations",
        "action",
        "p",
        "q",
        "gamma_distance",
        "tail_type",
        "loop_type",
        "boundary_set",
        "even",
        "wrap_count",
        "error",
    ])?;
    for r in rows {
        let (tail, lp, set, even, n) = match r.shape {
            Some(s) => (
                format!("{:?}", s.tail_type),
                format!("{:?}", s.loop_type),
                format!("{:?}", s.boundary_set),
                s.even.to_string(),
                s.wrap_count.to_string(),
            ),
            None => Default::default(),
        };
        out.write_record([
            fmt_f64(r.l),
            r.converged.to_string(),
            r.iterations.to_string(),
            fmt_f64(r.action),
            fmt_f64(r.p),
            fmt_f64(r.q),
            fmt_f64(r.gamma_distance),
            tail,
            lp,
            set,
            even,
            n,
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One sample of an exported phase-plane curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSample {
    /// `level`, `separatrix`, `gamma` or `fixed_point`.
    pub kind: String,
    /// Level value, Γ-subset tag or fixed-point name.
    pub label: String,
    pub point: PhasePoint,
}

pub fn write_curves_csv<W: Write>(w: W, rows: &[CurveSample]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["kind", "label", "p", "q"])?;
    for r in rows {
        out.write_record([r.kind.as_str(), r.label.as_str(), &fmt_f64(r.point.p), &fmt_f64(r.point.q)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

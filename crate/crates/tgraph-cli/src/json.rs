//! JSON interchange: parsing of tiling / graph / shapes documents and a
//! deterministic emitter.
//!
//! Numbers are emitted with 15 significant digits (`1.23456789012345e0`).
//! Decimal inputs with at most 15 significant digits therefore survive
//! parse -> emit -> parse without change of value.

use serde_json::{Map, Value};

use tgraph_core::geom::{Point, Polygon, TileShape};
use tgraph_core::tiling::{Finding, TGraph, Tiling, ValidationReport};
use tgraph_core::Complex64;

use crate::error::CliError;

pub fn parse(text: &str, what: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Data(format!("bad {} JSON: {}", what, e)))
}

// ---------------------------------------------------------------------------
// emission

pub fn fmt_f64(v: f64) -> String {
    // normalize -0.0 so equal values emit equal bytes
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{:.14e}", v)
}

pub fn num(v: f64) -> Value {
    Value::from(v)
}

pub fn point(p: Point) -> Value {
    Value::Array(vec![num(p.x), num(p.y)])
}

pub fn path(vs: &[Point]) -> Value {
    Value::Array(vs.iter().map(|&p| point(p)).collect())
}

pub fn floats(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| num(v)).collect())
}

/// Render a value as JSON text: objects and nested arrays one entry per
/// line, arrays of scalars inline, floats with 15 significant digits.
pub fn emit(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn scalar_only(items: &[Value]) -> bool {
    items.iter().all(|v| !matches!(v, Value::Array(_) | Value::Object(_)))
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap()));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if scalar_only(items) {
                out.push('[');
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(it, depth, out);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, it) in items.iter().enumerate() {
                    indent(depth + 1, out);
                    write_value(it, depth + 1, out);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                indent(depth, out);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
            } else {
                out.push_str("{\n");
                for (i, (k, val)) in map.iter().enumerate() {
                    indent(depth + 1, out);
                    out.push_str(&Value::String(k.clone()).to_string());
                    out.push_str(": ");
                    write_value(val, depth + 1, out);
                    if i + 1 < map.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                indent(depth, out);
                out.push('}');
            }
        }
    }
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

// ---------------------------------------------------------------------------
// tilings

fn value_f64(v: &Value, what: &str) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| CliError::Data(format!("{}: expected a number", what)))
}

pub fn point_from(v: &Value, what: &str) -> Result<Point, CliError> {
    let a = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| CliError::Data(format!("{}: expected [x, y]", what)))?;
    Ok(Point::new(value_f64(&a[0], what)?, value_f64(&a[1], what)?))
}

pub fn polygon_from(v: &Value, what: &str) -> Result<Polygon, CliError> {
    let a = v
        .as_array()
        .ok_or_else(|| CliError::Data(format!("{}: expected an array of points", what)))?;
    if a.len() < 3 {
        return Err(CliError::Data(format!("{}: needs at least 3 vertices", what)));
    }
    let vs = a
        .iter()
        .map(|p| point_from(p, what))
        .collect::<Result<Vec<Point>, CliError>>()?;
    Ok(Polygon::new(vs))
}

pub fn tiling_from(v: &Value) -> Result<Tiling, CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Data("tiling: expected an object".into()))?;
    let region = polygon_from(
        obj.get("region").ok_or_else(|| CliError::Data("tiling: missing \"region\"".into()))?,
        "region",
    )?;
    let tiles_v = obj
        .get("tiles")
        .and_then(|t| t.as_array())
        .ok_or_else(|| CliError::Data("tiling: missing \"tiles\" array".into()))?;
    let tiles = tiles_v
        .iter()
        .enumerate()
        .map(|(i, t)| polygon_from(t, &format!("tile {}", i)))
        .collect::<Result<Vec<Polygon>, CliError>>()?;
    Ok(Tiling::new(region, tiles))
}

pub fn tiling_value(t: &Tiling) -> Value {
    object(vec![
        ("region", path(&t.region.vertices)),
        (
            "tiles",
            Value::Array(t.tiles.iter().map(|p| path(&p.vertices)).collect()),
        ),
    ])
}

pub fn findings_value(report: &ValidationReport) -> Value {
    Value::Array(
        report
            .findings
            .iter()
            .map(|f| match f {
                Finding::NonConvexTile(i) => object(vec![
                    ("kind", Value::from("non-convex-tile")),
                    ("tile", Value::from(*i as u64)),
                ]),
                Finding::Overlap(i, j, a) => object(vec![
                    ("kind", Value::from("overlap")),
                    ("tiles", Value::Array(vec![Value::from(*i as u64), Value::from(*j as u64)])),
                    ("area", num(*a)),
                ]),
                Finding::AreaDefect(d) => object(vec![
                    ("kind", Value::from("area-defect")),
                    ("defect", num(*d)),
                ]),
                Finding::DegeneratePlusVertex(p) => object(vec![
                    ("kind", Value::from("degenerate-plus-vertex")),
                    ("at", point(*p)),
                ]),
                Finding::DegenerateCornerMeeting(p) => object(vec![
                    ("kind", Value::from("degenerate-corner-meeting")),
                    ("at", point(*p)),
                ]),
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// graphs
//
// {"whites": W,
//  "blacks": [[edge ids in ccw rotation order], ... one list per black],
//  "edges": [[w, b, re, im], ...],   grouped per white in ccw rotation order
//  "boundary": [black ids in ccw region-edge order]}

pub fn graph_value(g: &TGraph) -> Value {
    // renumber edges so they are listed grouped per white in rotation order;
    // the listing order then encodes the white rotations
    let mut newid = vec![usize::MAX; g.edges.len()];
    let mut edges = Vec::with_capacity(g.edges.len());
    for w in 0..g.num_whites {
        for &e in &g.white_rot[w] {
            newid[e] = edges.len();
            let ge = &g.edges[e];
            edges.push(Value::Array(vec![
                Value::from(ge.white as u64),
                Value::from(ge.black as u64),
                num(ge.weight.re),
                num(ge.weight.im),
            ]));
        }
    }
    let blacks: Vec<Value> = g
        .black_rot
        .iter()
        .map(|rot| Value::Array(rot.iter().map(|&e| Value::from(newid[e] as u64)).collect()))
        .collect();
    object(vec![
        ("whites", Value::from(g.num_whites as u64)),
        ("blacks", Value::Array(blacks)),
        ("edges", Value::Array(edges)),
        (
            "boundary",
            Value::Array(g.boundary_blacks.iter().map(|&b| Value::from(b as u64)).collect()),
        ),
    ])
}

fn value_usize(v: &Value, what: &str) -> Result<usize, CliError> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| CliError::Data(format!("{}: expected a nonnegative integer", what)))
}

/// Decode a graph document into a combinatorics-only `TGraph` over `region`.
pub fn graph_from(v: &Value, region: Polygon) -> Result<TGraph, CliError> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Data("graph: expected an object".into()))?;
    let whites = value_usize(
        obj.get("whites").ok_or_else(|| CliError::Data("graph: missing \"whites\"".into()))?,
        "whites",
    )?;
    let edges_v = obj
        .get("edges")
        .and_then(|e| e.as_array())
        .ok_or_else(|| CliError::Data("graph: missing \"edges\" array".into()))?;
    let blacks_v = obj
        .get("blacks")
        .and_then(|b| b.as_array())
        .ok_or_else(|| CliError::Data("graph: missing \"blacks\" array".into()))?;
    let boundary_v = obj
        .get("boundary")
        .and_then(|b| b.as_array())
        .ok_or_else(|| CliError::Data("graph: missing \"boundary\" array".into()))?;

    // edges are grouped per white in ccw rotation order
    let mut white_adj: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); whites];
    for (i, ev) in edges_v.iter().enumerate() {
        let a = ev
            .as_array()
            .filter(|a| a.len() == 4)
            .ok_or_else(|| CliError::Data(format!("edge {}: expected [w, b, re, im]", i)))?;
        let w = value_usize(&a[0], "edge white")?;
        let b = value_usize(&a[1], "edge black")?;
        let re = value_f64(&a[2], "edge weight")?;
        let im = value_f64(&a[3], "edge weight")?;
        if w >= whites {
            return Err(CliError::Data(format!("edge {}: white {} out of range", i, w)));
        }
        white_adj[w].push((b, Complex64::new(re, im)));
    }
    // rebuild the edge ids the same way the encoder assigned them and check
    // that the file's grouping was consistent
    let mut expect = 0usize;
    for adj in &white_adj {
        expect += adj.len();
    }
    if expect != edges_v.len() {
        return Err(CliError::Data("graph: inconsistent edge list".into()));
    }
    let black_rot: Vec<Vec<usize>> = blacks_v
        .iter()
        .enumerate()
        .map(|(b, rot)| {
            rot.as_array()
                .ok_or_else(|| CliError::Data(format!("black {}: expected an edge-id list", b)))?
                .iter()
                .map(|e| value_usize(e, "black rotation entry"))
                .collect::<Result<Vec<usize>, CliError>>()
        })
        .collect::<Result<Vec<Vec<usize>>, CliError>>()?;
    let boundary = boundary_v
        .iter()
        .map(|b| value_usize(b, "boundary entry"))
        .collect::<Result<Vec<usize>, CliError>>()?;
    TGraph::from_combinatorics(whites, &white_adj, black_rot, boundary, region)
        .map_err(|e| CliError::Data(format!("graph: {}", e)))
}

/// Positive reconstruction weights: the moduli of the stored edge weights.
pub fn graph_weights(g: &TGraph) -> Vec<f64> {
    g.edges.iter().map(|e| e.weight.norm()).collect()
}

// ---------------------------------------------------------------------------
// shapes: {"shapes": [[[x,y], ...], ...]} — one model polygon per tile

pub fn shapes_from(v: &Value) -> Result<Vec<TileShape>, CliError> {
    let arr = match v {
        Value::Object(obj) => obj
            .get("shapes")
            .and_then(|s| s.as_array())
            .ok_or_else(|| CliError::Data("shapes: missing \"shapes\" array".into()))?,
        Value::Array(a) => a,
        _ => return Err(CliError::Data("shapes: expected an object or array".into())),
    };
    arr.iter()
        .enumerate()
        .map(|(i, p)| Ok(TileShape::from_polygon(&polygon_from(p, &format!("shape {}", i))?)))
        .collect()
}

/// A region document: either a bare vertex array or {"region": [...]}.
pub fn region_from(v: &Value) -> Result<Polygon, CliError> {
    match v {
        Value::Object(obj) => polygon_from(
            obj.get("region")
                .ok_or_else(|| CliError::Data("region: missing \"region\"".into()))?,
            "region",
        ),
        other => polygon_from(other, "region"),
    }
}

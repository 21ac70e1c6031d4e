//! Deterministic SVG 1.1 rendering of tilings, homology tilings and sector
//! sheets. Output is a pure function of the input JSON document: identical
//! input gives byte-identical SVG.

use serde_json::Value;

use tgraph_core::geom::Point;

use crate::error::CliError;
use crate::json::{point_from, polygon_from};

/// Fixed tile palette keyed by white label (index mod length).
const PALETTE: [&str; 16] = [
    "#e8a6a6", "#a6c4e8", "#abdbab", "#e8d6a6", "#cba6e8", "#a6e2e8", "#e8bad6", "#c4c4c4",
    "#d6e8a6", "#a6abe8", "#e8c4a6", "#bae8cb", "#e8a6cb", "#a6e8ba", "#cbcba6", "#a6bae8",
];

const REGION_STROKE: &str = "#1f4fbf"; // blue outline
const MARK_STROKE: &str = "#d02020"; // red finding markers
const MARGIN: f64 = 20.0;
const PANEL: f64 = 320.0; // target content size of one drawing

fn fmt(v: f64) -> String {
    let s = format!("{:.3}", v);
    if s == "-0.000" { "0.000".into() } else { s }
}

#[derive(Clone, Copy)]
struct Frame {
    min: Point,
    max: Point,
    scale: f64,
    // pixel offset of the frame's top-left corner
    ox: f64,
    oy: f64,
}

impl Frame {
    fn fit(min: Point, max: Point) -> Frame {
        let w = (max.x - min.x).max(1e-9);
        let h = (max.y - min.y).max(1e-9);
        let scale = PANEL / w.max(h);
        Frame { min, max, scale, ox: MARGIN, oy: MARGIN }
    }

    fn width(&self) -> f64 {
        (self.max.x - self.min.x) * self.scale
    }

    fn height(&self) -> f64 {
        (self.max.y - self.min.y) * self.scale
    }

    fn at(&self, ox: f64, oy: f64) -> Frame {
        Frame { ox, oy, ..*self }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (
            self.ox + (p.x - self.min.x) * self.scale,
            self.oy + (self.max.y - p.y) * self.scale,
        )
    }
}

fn path_d(frame: &Frame, pts: &[Point]) -> String {
    let mut d = String::new();
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = frame.map(p);
        d.push_str(if i == 0 { "M" } else { " L" });
        d.push_str(&format!("{},{}", fmt(x), fmt(y)));
    }
    d.push_str(" Z");
    d
}

fn bbox(pts: impl Iterator<Item = Point>) -> Option<(Point, Point)> {
    let mut out: Option<(Point, Point)> = None;
    for p in pts {
        let pair = out.get_or_insert((p, p));
        pair.0.x = pair.0.x.min(p.x);
        pair.0.y = pair.0.y.min(p.y);
        pair.1.x = pair.1.x.max(p.x);
        pair.1.y = pair.1.y.max(p.y);
    }
    out
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n\
         <defs>\n\
         <pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"8\" height=\"8\">\n\
         <path d=\"M0,8 L8,0\" stroke=\"#000000\" stroke-width=\"1\" stroke-opacity=\"0.35\"/>\n\
         </pattern>\n\
         </defs>\n",
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    )
}

struct Panel {
    region: Vec<Point>,
    tiles: Vec<Vec<Point>>,
    /// Orientation per tile; -1 tiles get a hatch overlay.
    sigma: Vec<i8>,
    /// Red circle markers (validation findings).
    marks: Vec<Point>,
    label: String,
}

fn draw_panel(frame: &Frame, panel: &Panel, out: &mut String) {
    for (i, tile) in panel.tiles.iter().enumerate() {
        if tile.len() < 3 {
            continue;
        }
        let d = path_d(frame, tile);
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"{}\" fill-rule=\"evenodd\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
            d,
            PALETTE[i % PALETTE.len()]
        ));
        if panel.sigma.get(i).copied().unwrap_or(1) < 0 {
            out.push_str(&format!(
                "<path d=\"{}\" fill=\"url(#hatch)\" fill-rule=\"evenodd\" stroke=\"none\"/>\n",
                d
            ));
        }
    }
    out.push_str(&format!(
        "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
        path_d(frame, &panel.region),
        REGION_STROKE
    ));
    for &m in &panel.marks {
        let (x, y) = frame.map(m);
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"6\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            fmt(x),
            fmt(y),
            MARK_STROKE
        ));
    }
    if !panel.label.is_empty() {
        let x = frame.ox + frame.width() / 2.0;
        let y = frame.oy + frame.height() + 16.0;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(x),
            fmt(y),
            panel.label
        ));
    }
}

fn panel_points(p: &Panel) -> impl Iterator<Item = Point> + '_ {
    p.region.iter().copied().chain(p.tiles.iter().flatten().copied())
}

fn render_panels(panels: &[Panel], columns: usize) -> Result<String, CliError> {
    if panels.is_empty() {
        return Err(CliError::Data("nothing to render: empty document".into()));
    }
    let (min, max) = bbox(panels.iter().flat_map(panel_points))
        .ok_or_else(|| CliError::Data("nothing to render: no geometry".into()))?;
    let base = Frame::fit(min, max);
    let label_h = if panels.iter().any(|p| !p.label.is_empty()) { 24.0 } else { 0.0 };
    let cols = columns.min(panels.len()).max(1);
    let rows = panels.len().div_ceil(cols);
    let cell_w = base.width() + 2.0 * MARGIN;
    let cell_h = base.height() + 2.0 * MARGIN + label_h;
    let mut out = header(cell_w * cols as f64, cell_h * rows as f64);
    for (i, panel) in panels.iter().enumerate() {
        let (r, c) = (i / cols, i % cols);
        let frame = base.at(c as f64 * cell_w + MARGIN, r as f64 * cell_h + MARGIN);
        draw_panel(&frame, panel, &mut out);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn parse_sigma(v: &Value) -> Vec<i8> {
    match v {
        Value::String(s) => s.chars().map(|c| if c == '-' { -1 } else { 1 }).collect(),
        Value::Array(a) => a
            .iter()
            .map(|x| if x.as_f64().unwrap_or(1.0) < 0.0 { -1 } else { 1 })
            .collect(),
        _ => Vec::new(),
    }
}

fn marks_from(v: &Value) -> Vec<Point> {
    let mut marks = Vec::new();
    if let Some(findings) = v.as_array() {
        for f in findings {
            if let Some(at) = f.get("at") {
                if let Ok(p) = point_from(at, "finding") {
                    marks.push(p);
                }
            }
        }
    }
    marks
}

fn tiles_from(v: &Value, what: &str) -> Result<Vec<Vec<Point>>, CliError> {
    v.as_array()
        .ok_or_else(|| CliError::Data(format!("{}: expected an array of paths", what)))?
        .iter()
        .enumerate()
        .map(|(i, t)| Ok(polygon_from(t, &format!("{} {}", what, i))?.vertices))
        .collect()
}

fn tiling_panel(v: &Value, label: String) -> Result<Panel, CliError> {
    let region = polygon_from(
        v.get("region").ok_or_else(|| CliError::Data("render: missing \"region\"".into()))?,
        "region",
    )?
    .vertices;
    let tiles = tiles_from(
        v.get("tiles").ok_or_else(|| CliError::Data("render: missing \"tiles\"".into()))?,
        "tile",
    )?;
    let sigma = v.get("sigma").map(parse_sigma).unwrap_or_default();
    let marks = v.get("findings").map(marks_from).unwrap_or_default();
    Ok(Panel { region, tiles, sigma, marks, label })
}

/// Render a result document. Documents with a "sectors" list become a sheet
/// of the solved non-reflected sectors (4 panels per row); documents with
/// "region" and "tiles" become a single drawing, with hatching for
/// orientation -1 tiles and red circles at validation findings.
pub fn render(v: &Value) -> Result<String, CliError> {
    if let Some(sectors) = v.get("sectors").and_then(|s| s.as_array()) {
        let region = polygon_from(
            v.get("region")
                .ok_or_else(|| CliError::Data("render: missing \"region\"".into()))?,
            "region",
        )?
        .vertices;
        let mut panels = Vec::new();
        for s in sectors {
            let solved = s.get("status").and_then(|x| x.as_str()) == Some("solved");
            let reflected = s.get("reflected").and_then(|x| x.as_bool()).unwrap_or(false);
            if !solved || reflected {
                continue;
            }
            let label = s
                .get("sigma")
                .and_then(|x| x.as_str())
                .unwrap_or("")
                .to_string();
            let tiles = tiles_from(
                s.get("tiles")
                    .ok_or_else(|| CliError::Data("render: solved sector without tiles".into()))?,
                "tile",
            )?;
            let sigma = s.get("sigma").map(parse_sigma).unwrap_or_default();
            panels.push(Panel { region: region.clone(), tiles, sigma, marks: Vec::new(), label });
        }
        render_panels(&panels, 4)
    } else if v.get("region").is_some() && v.get("tiles").is_some() {
        let panel = tiling_panel(v, String::new())?;
        render_panels(std::slice::from_ref(&panel), 1)
    } else {
        Err(CliError::Data("nothing to render: unrecognized document".into()))
    }
}

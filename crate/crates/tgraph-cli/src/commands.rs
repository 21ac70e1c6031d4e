//! Subcommand implementations. Each returns the stdout text and an exit
//! code (commands may print a full report and still exit nonzero, e.g.
//! `validate` on a degenerate tiling).

use std::fs;

use serde_json::Value;

use tgraph_core::areamap::AreaMap;
use tgraph_core::dimer::{kasteleyn_from_tiling, verify_kasteleyn};
use tgraph_core::fixtures;
use tgraph_core::geom::Polygon;
use tgraph_core::homology::{
    find_sector_point, homology_tiles, solve_homology, HomologySpace, SectorStatus,
};
use tgraph_core::solvers::{prescribe_shapes, reconstruct_from_graph, ShapeAssignment};
use tgraph_core::tiling::{build_graph_tol, validate, TGraph, Tiling};
use tgraph_core::EPS_GEOM;

use crate::error::CliError;
use crate::json;
use crate::svg;

/// Geometric tolerance: TGRAPH_TOL when set, the library default otherwise.
pub fn tol() -> Result<f64, CliError> {
    match std::env::var("TGRAPH_TOL") {
        Ok(s) => {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("TGRAPH_TOL is not a number: {:?}", s)))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(CliError::Usage(format!("TGRAPH_TOL must be positive, got {}", v)));
            }
            Ok(v)
        }
        Err(_) => Ok(EPS_GEOM),
    }
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {}", path, e)))
}

/// A tiling argument: a built-in fixture name, or a path to a tiling JSON
/// document.
pub fn load_tiling(arg: &str) -> Result<Tiling, CliError> {
    if let Some(t) = fixtures::by_name(arg) {
        return Ok(t);
    }
    json::tiling_from(&json::parse(&read(arg)?, "tiling")?)
}

fn load_value(arg: &str, what: &str) -> Result<Value, CliError> {
    // fixture names are accepted anywhere a tiling-shaped document fits
    if let Some(t) = fixtures::by_name(arg) {
        return Ok(json::tiling_value(&t));
    }
    json::parse(&read(arg)?, what)
}

fn build(t: &Tiling) -> Result<TGraph, CliError> {
    build_graph_tol(t, tol()?).map_err(CliError::from)
}

type Output = (String, i32);

fn ok(v: Value) -> Output {
    (json::emit(&v), 0)
}

// ---------------------------------------------------------------------------

pub fn cmd_validate(tiling: &str) -> Result<Output, CliError> {
    let t = load_tiling(tiling)?;
    let report = validate(&t, tol()?);
    let v = json::object(vec![
        ("valid", Value::Bool(report.is_clean())),
        ("findings", json::findings_value(&report)),
        ("region", json::path(&t.region.vertices)),
        (
            "tiles",
            Value::Array(t.tiles.iter().map(|p| json::path(&p.vertices)).collect()),
        ),
    ]);
    let code = if report.is_clean() { 0 } else { crate::error::EXIT_VALIDATION };
    Ok((json::emit(&v), code))
}

pub fn cmd_graph(tiling: &str) -> Result<Output, CliError> {
    let t = load_tiling(tiling)?;
    let g = build(&t)?;
    let mut v = json::graph_value(&g);
    let counts = json::object(vec![
        ("whites", Value::from(g.num_whites as u64)),
        ("blacks", Value::from(g.num_blacks() as u64)),
        ("region_edges", Value::from(g.region.len() as u64)),
        ("faces", Value::from(g.faces.len() as u64)),
        ("edges", Value::from(g.edges.len() as u64)),
    ]);
    v.as_object_mut().unwrap().insert("counts".into(), counts);
    Ok(ok(v))
}

pub fn cmd_kasteleyn(tiling: &str, verify: bool, b0: usize) -> Result<Output, CliError> {
    let t = load_tiling(tiling)?;
    let g = build(&t)?;
    let k = kasteleyn_from_tiling(&g)?;
    let entries: Vec<Value> = (0..k.num_whites())
        .map(|w| {
            Value::Array(
                (0..k.num_blacks())
                    .map(|b| {
                        let z = k.entries[(w, b)];
                        Value::Array(vec![json::num(z.re), json::num(z.im)])
                    })
                    .collect(),
            )
        })
        .collect();
    let mut pairs = vec![
        ("rows", Value::from(k.num_whites() as u64)),
        ("cols", Value::from(k.num_blacks() as u64)),
        ("entries", Value::Array(entries)),
    ];
    let mut code = 0;
    if verify {
        if b0 >= g.num_blacks() || !g.is_boundary(b0) {
            return Err(CliError::Usage(format!("--b0 {}: not a boundary segment", b0)));
        }
        let report = verify_kasteleyn(&k, &g, b0)?;
        if report.rel_error > 1e-10 {
            code = crate::error::EXIT_NUMERICAL;
        }
        pairs.push((
            "verify",
            json::object(vec![
                ("b0", Value::from(b0 as u64)),
                ("det_modulus", json::num(report.det_modulus)),
                ("matching_sum", json::num(report.matching_sum)),
                ("rel_error", json::num(report.rel_error)),
                ("num_matchings", Value::from(report.num_matchings as u64)),
            ]),
        ));
    }
    Ok((json::emit(&json::object(pairs)), code))
}

pub fn cmd_shapes(tiling: &str, shapes: &str) -> Result<Output, CliError> {
    let t = load_tiling(tiling)?;
    let shapes = json::shapes_from(&json::parse(&read(shapes)?, "shapes")?)?;
    if shapes.len() != t.tiles.len() {
        return Err(CliError::Data(format!(
            "shapes: got {} shapes for {} tiles",
            shapes.len(),
            t.tiles.len()
        )));
    }
    let r = prescribe_shapes(&t, &ShapeAssignment { shapes })?;
    let mut v = json::tiling_value(&r.tiling);
    let obj = v.as_object_mut().unwrap();
    obj.insert("a".into(), json::floats(&r.a));
    obj.insert("degenerate".into(), Value::Bool(r.degenerate));
    obj.insert("residual".into(), json::num(r.residual));
    Ok(ok(v))
}

pub fn cmd_reconstruct(graph: &str, region: &str) -> Result<Output, CliError> {
    let region: Polygon = json::region_from(&load_value(region, "region")?)?;
    let gv = json::parse(&read(graph)?, "graph")?;
    let g = json::graph_from(&gv, region.clone())?;
    let nu = json::graph_weights(&g);
    let t = reconstruct_from_graph(&g, &nu, &region)?;
    Ok(ok(json::tiling_value(&t)))
}

pub fn cmd_areas(tiling: &str, target: &[f64], b0: Option<usize>) -> Result<Output, CliError> {
    let t = load_tiling(tiling)?;
    let g = build(&t)?;
    let b0 = b0.unwrap_or(g.boundary_blacks[0]);
    if b0 >= g.num_blacks() || !g.is_boundary(b0) {
        return Err(CliError::Usage(format!("--b0 {}: not a boundary segment", b0)));
    }
    if target.len() != g.num_whites {
        return Err(CliError::Data(format!(
            "--target: got {} areas for {} tiles",
            target.len(),
            g.num_whites
        )));
    }
    let map = AreaMap::for_psi(&t, &g, b0)?;
    let sigma = vec![1i8; g.num_whites];
    let x0 = map.x_ref.clone();
    let x = map.psi_inverse(target, &x0, &sigma)?;
    let areas = map.psi(&x);
    Ok(ok(json::object(vec![
        ("b0", Value::from(b0 as u64)),
        (
            "columns",
            Value::Array(map.vars.iter().map(|&b| Value::from(b as u64)).collect()),
        ),
        ("intercepts", json::floats(&x)),
        ("areas", json::floats(&areas)),
    ])))
}

fn parse_sigma_flag(sigma: Option<&str>, nw: usize) -> Result<Vec<i8>, CliError> {
    match sigma {
        None => Ok(vec![1; nw]),
        Some(s) => {
            let v: Vec<i8> = s
                .chars()
                .map(|c| match c {
                    '+' => Ok(1),
                    '-' => Ok(-1),
                    other => Err(CliError::Usage(format!(
                        "--sigma: expected '+' or '-', got {:?}",
                        other
                    ))),
                })
                .collect::<Result<_, _>>()?;
            if v.len() != nw {
                return Err(CliError::Usage(format!(
                    "--sigma: got {} signs for {} tiles",
                    v.len(),
                    nw
                )));
            }
            Ok(v)
        }
    }
}

fn sigma_string(sigma: &[i8]) -> String {
    sigma.iter().map(|&s| if s < 0 { '-' } else { '+' }).collect()
}

pub fn cmd_homology(tiling: &str, areas: &[f64], sigma: Option<&str>) -> Result<Output, CliError> {
    let t = load_tiling(tiling)?;
    let space = HomologySpace::new(&t)?;
    let sigma = parse_sigma_flag(sigma, space.num_tiles())?;
    let x0 = find_sector_point(&space, &sigma).ok_or_else(|| {
        CliError::Numerical(format!("no feasible point found in sector {}", sigma_string(&sigma)))
    })?;
    let h = solve_homology(&space, areas, &sigma, &x0)?;
    Ok(ok(json::object(vec![
        ("region", json::path(&space.region.vertices)),
        ("sigma", Value::from(sigma_string(&sigma))),
        (
            "tiles",
            Value::Array(h.tiles.iter().map(|p| json::path(p)).collect()),
        ),
        ("q", json::floats(&h.q)),
        ("intercepts", json::floats(&h.intercepts)),
    ])))
}

pub fn cmd_sectors(tiling: &str, areas: &[f64]) -> Result<Output, CliError> {
    let t = load_tiling(tiling)?;
    let space = HomologySpace::new(&t)?;
    let reports = tgraph_core::homology::enumerate_sectors(&space, areas)?;
    let mut sectors = Vec::with_capacity(reports.len());
    let mut solved = 0u64;
    for r in &reports {
        let status = match r.status {
            SectorStatus::Solved => "solved",
            SectorStatus::Empty => "empty",
            SectorStatus::NotConverged => "not-converged",
        };
        let mut pairs = vec![
            ("sigma", Value::from(sigma_string(&r.sigma))),
            ("status", Value::from(status)),
            ("reflected", Value::Bool(r.reflected)),
        ];
        if let Some(x) = &r.solution {
            solved += 1;
            let h = homology_tiles(&space, x)?;
            pairs.push(("residual", json::num(r.residual)));
            pairs.push(("intercepts", json::floats(x)));
            pairs.push(("q", json::floats(&h.q)));
            pairs.push((
                "tiles",
                Value::Array(h.tiles.iter().map(|p| json::path(p)).collect()),
            ));
        }
        sectors.push(json::object(pairs));
    }
    Ok(ok(json::object(vec![
        ("region", json::path(&space.region.vertices)),
        ("solved", Value::from(solved)),
        ("sectors", Value::Array(sectors)),
    ])))
}

pub fn cmd_render(result: &str, out: Option<&str>) -> Result<Output, CliError> {
    let v = load_value(result, "result")?;
    let doc = svg::render(&v)?;
    match out {
        Some(path) => {
            fs::write(path, &doc)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {}", path, e)))?;
            Ok((String::new(), 0))
        }
        None => Ok((doc, 0)),
    }
}

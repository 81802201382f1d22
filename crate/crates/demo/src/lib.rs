//! Browser bindings. Every operation takes and returns JSON strings so the page
//! needs no generated types; the `*_json` functions are plain Rust and carry the tests.

use midepth::centerpoint::theorem3_pipeline;
use midepth::depth::estimate_depth;
use midepth::hull::{hull_of_points, vertex_enumerate, HPolytope, MixedBody};
use midepth::measure::mixed_integer_volume;
use midepth::necessity::necessity_grid;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// A planar body with one integer axis `z` and one real axis `x`, from a JSON
/// list of `[z, x]` points.
fn planar(points: &str) -> Result<(HPolytope, MixedBody), String> {
    let pts: Vec<Vec<f64>> = serde_json::from_str(points).map_err(err)?;
    if pts.len() < 3 || pts.iter().any(|p| p.len() != 2) {
        return Err("need at least three [z, x] points".into());
    }
    let p = hull_of_points(&pts).map_err(err)?;
    let b = MixedBody::polytope(1, 1, p.clone()).map_err(err)?;
    Ok((p, b))
}

fn column(p: &HPolytope, z: f64) -> Result<Option<[f64; 2]>, String> {
    let s = p.with_row(vec![1.0, 0.0], z).with_row(vec![-1.0, 0.0], -z);
    let top = s.support(&[0.0, 1.0]).map_err(err)?;
    let bottom = s.support(&[0.0, -1.0]).map_err(err)?;
    Ok(top.zip(bottom).map(|((_, hi), (_, lo))| [-lo, hi]))
}

pub fn polygon_scene_json(points: &str) -> Out {
    let (p, b) = planar(points)?;
    let mut hull = vertex_enumerate(&p).map_err(err)?.vertices().to_vec();
    let c = [0, 1].map(|i| hull.iter().map(|v| v[i]).sum::<f64>() / hull.len() as f64);
    hull.sort_by(|u, v| (u[1] - c[1]).atan2(u[0] - c[0]).total_cmp(&(v[1] - c[1]).atan2(v[0] - c[0])));
    let mi = mixed_integer_volume(&b).map_err(err)?;
    let mut fibers = Vec::new();
    for f in &mi.fibers {
        if let Some([lo, hi]) = column(&p, f.z[0] as f64)? {
            fibers.push(json!({ "z": f.z[0], "lo": lo, "hi": hi }));
        }
    }
    let center = match theorem3_pipeline(&b) {
        Ok(cert) => json!({
            "point": cert.y_star,
            "k": cert.k,
            "coefficient": cert.coefficient,
            "sub_threshold": cert.sub_threshold,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({ "hull": hull, "fibers": fibers, "total": mi.total, "center": center }).to_string())
}

pub fn depth_at_json(points: &str, z: f64, x: f64, dirs: usize) -> Out {
    let (_, b) = planar(points)?;
    let r = estimate_depth(&b, &[z, x], dirs, 0).map_err(err)?;
    let h = &r.argmin_halfspace;
    Ok(json!({
        "ratio": r.min_ratio,
        "captured": r.captured,
        "total": r.total_mi_volume,
        "normal": h.normal(),
        "offset": h.offset(),
    })
    .to_string())
}

pub fn necessity_curve_json(alpha: f64, k: usize, m_max: usize) -> Out {
    let m_min = (2.0 * (1.0 + alpha * k as f64)).ceil() as usize;
    if m_max < m_min {
        return Err(format!("m must reach at least {m_min}"));
    }
    let rows = necessity_grid(alpha, k, m_min..=m_max).map_err(err)?;
    let out: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "m": r.m, "n": r.n, "d": r.d, "ratio": r.ratio, "bound": r.bound_exp_upper }))
        .collect();
    Ok(Value::from(out).to_string())
}

#[wasm_bindgen]
pub fn polygon_scene(points: &str) -> Result<String, JsError> {
    polygon_scene_json(points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn depth_at(points: &str, z: f64, x: f64, dirs: usize) -> Result<String, JsError> {
    depth_at_json(points, z, x, dirs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn necessity_curve(alpha: f64, k: usize, m_max: usize) -> Result<String, JsError> {
    necessity_curve_json(alpha, k, m_max).map_err(|e| JsError::new(&e))
}

//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every entry point takes plain strings and numbers and returns a JSON string, so the
//! page needs no generated type declarations.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use veering::analysis::{seeded_trajectory, torus_volume as volume_report};
use veering::fixtures;
use veering::flips::FlipWord;

fn fail(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[derive(Serialize)]
struct MatrixResult {
    word: String,
    matrix: Vec<Vec<String>>,
    end: String,
}

/// Exact width matrix of `word` from a fixture.
pub fn matrix_json(fixture_name: &str, word: &str) -> Result<String, String> {
    let t = fixtures::by_name(fixture_name).ok_or_else(|| format!("unknown fixture `{fixture_name}`"))?;
    let w = FlipWord::parse(&t, word).map_err(|e| e.to_string())?;
    let m = w.matrix().map_err(|e| e.to_string())?;
    let end = w.end().map_err(|e| e.to_string())?;
    let colours: Vec<String> = end.labels().map(|l| format!("{}={}", end.name(l), end.colour(l).letter())).collect();
    let out = MatrixResult {
        word: w.render(),
        matrix: m.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        end: colours.join(" "),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Roofs and flipped labels of `returns` returns from a state sampled with `seed`.
pub fn flow_json(fixture_name: &str, returns: usize, seed: u64) -> Result<String, String> {
    let t = fixtures::by_name(fixture_name).ok_or_else(|| format!("unknown fixture `{fixture_name}`"))?;
    let traj = seeded_trajectory(&t, returns, seed).map_err(|e| e.to_string())?;
    let names = t.names();
    let events: Vec<_> = traj
        .events
        .iter()
        .map(|e| {
            let flipped: Vec<&str> = e.flipped.iter().map(|l| names[l.0].as_str()).collect();
            json!({"roof": e.roof, "flipped": flipped.join(","), "width_sum": e.width_sum})
        })
        .collect();
    Ok(json!({"total_time": traj.total_time(), "events": events}).to_string())
}

/// The torus volume integrals and a Monte Carlo estimate with `samples` draws.
pub fn volume_json(samples: usize, seed: u64) -> Result<String, String> {
    let r = volume_report(1e-10, samples, seed).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn matrix(fixture_name: &str, word: &str) -> Result<String, JsValue> {
    matrix_json(fixture_name, word).map_err(fail)
}

#[wasm_bindgen]
pub fn flow(fixture_name: &str, returns: u32, seed: u32) -> Result<String, JsValue> {
    flow_json(fixture_name, returns as usize, seed as u64).map_err(fail)
}

#[wasm_bindgen]
pub fn torus_volume(samples: u32, seed: u32) -> Result<String, JsValue> {
    volume_json(samples as usize, seed as u64).map_err(fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_matrix() {
        let v: serde_json::Value = serde_json::from_str(&matrix_json("torus", "c,b,c,a").unwrap()).unwrap();
        assert_eq!(v["matrix"], json!([["1", "2", "0"], ["2", "5", "0"], ["2", "6", "1"]]));
        assert!(matrix_json("torus", "a").is_err());
    }

    #[test]
    fn flow_is_seeded() {
        let a = flow_json("torus", 20, 3).unwrap();
        assert_eq!(a, flow_json("torus", 20, 3).unwrap());
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["events"].as_array().unwrap().len(), 20);
    }

    #[test]
    fn volume_without_samples() {
        let v: serde_json::Value = serde_json::from_str(&volume_json(0, 0).unwrap()).unwrap();
        assert!((v["volume"].as_f64().unwrap() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-8);
    }
}

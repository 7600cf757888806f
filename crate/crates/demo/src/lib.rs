//! Browser bindings. Each export takes plain values, returns a JSON string
//! and maps library errors to JS exceptions. The `*_json` functions hold the
//! logic so native tests can call them directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use ellis_envelope::channel::{cesaro_idempotent, named, random_unital_channel, CesaroMode, ChannelMap};
use ellis_envelope::envelope::{compute_envelope, EnvelopeConfig};
use ellis_envelope::feasible_set::OperatorSubspace;
use ellis_envelope::matrix::named::{cyclic_shift, sigma_x, sigma_z};
use ellis_envelope::matrix::MatrixC;
use ellis_envelope::semigroup::{idempotent_poset, minimal_idempotent_below, minimal_left_ideals, CayleyTable};

pub const CHANNEL_PRESETS: [&str; 3] = ["lazy-shift", "sign-flip", "random"];
pub const SPACE_PRESETS: [&str; 5] = ["m2", "d2", "d3", "pauli", "e12"];
/// Longest Cesàro curve the page may request.
pub const MAX_CURVE: usize = 400;

/// Rows of a Cayley table as whitespace and newline separated indices.
pub fn parse_table(text: &str) -> Result<CayleyTable, String> {
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(r, line)| {
            line.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| format!("row {r}: {t:?} is not an index")))
                .collect()
        })
        .collect::<Result<Vec<Vec<usize>>, String>>()?;
    CayleyTable::validate(rows).map_err(|e| e.to_string())
}

pub fn analyze_semigroup_json(text: &str) -> Result<Value, String> {
    let t = parse_table(text)?;
    let poset = idempotent_poset(&t);
    let below = t
        .idempotents()
        .into_iter()
        .map(|e| minimal_idempotent_below(&t, e).map(|f| json!({ "idempotent": e, "minimal_below": f })))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(json!({
        "order": t.order(),
        "idempotents": t.idempotents(),
        "minimal": poset.minimal(),
        "similarity_classes": poset.similarity_classes(),
        "minimal_left_ideals": minimal_left_ideals(&t),
        "minimal_below": below,
    }))
}

fn channel_preset(name: &str, seed: u64) -> Result<ChannelMap, String> {
    match name {
        "lazy-shift" => Ok(named::lazy_conjugation(&cyclic_shift(3))),
        "sign-flip" => Ok(named::conjugation(&MatrixC::diag_real(&[1.0, -1.0]))),
        "random" => Ok(random_unital_channel(2, 2, &mut ChaCha8Rng::seed_from_u64(seed))),
        other => Err(format!("unknown channel preset {other:?}")),
    }
}

/// `‖A_N − e‖` for the averages `A_N = (1/N) Σ_{j<N} φ^j`, `N = 1..=steps`.
pub fn cesaro_curve_json(preset: &str, steps: usize, seed: u64) -> Result<Value, String> {
    if !(1..=MAX_CURVE).contains(&steps) {
        return Err(format!("steps must lie in 1..={MAX_CURVE}"));
    }
    let phi = channel_preset(preset, seed)?;
    let limit = cesaro_idempotent(&phi, CesaroMode::Spectral).map_err(|e| e.to_string())?;
    let n = phi.dim_in();
    let e = &limit.idempotent;
    let mut power = ChannelMap::identity(n);
    let mut sum = MatrixC::zeros(n * n, n * n);
    let mut curve = Vec::with_capacity(steps);
    for k in 1..=steps {
        sum = &sum + power.superop();
        let avg = sum.scale_real(1.0 / k as f64);
        curve.push((&avg - e.superop()).frobenius_norm());
        power = phi.compose(&power).map_err(|e| e.to_string())?;
    }
    Ok(json!({
        "preset": preset,
        "dim": n,
        "fixed_space_dim": limit.fixed_space_dim,
        "idempotence_residual": e.idempotence_residual(),
        "curve": curve,
    }))
}

fn space_preset(name: &str) -> Result<OperatorSubspace, String> {
    let space = match name {
        "m2" => Ok(OperatorSubspace::full(2)),
        "d2" => Ok(OperatorSubspace::diagonal(2)),
        "d3" => Ok(OperatorSubspace::diagonal(3)),
        "pauli" => OperatorSubspace::from_matrices(2, &[MatrixC::identity(2), sigma_x(), sigma_z()]),
        "e12" => OperatorSubspace::from_matrices(2, &[MatrixC::unit(2, 0, 1)]),
        other => return Err(format!("unknown space preset {other:?}")),
    };
    space.map_err(|e| e.to_string())
}

pub fn envelope_json(preset: &str, seed: u64) -> Result<Value, String> {
    let space = space_preset(preset)?;
    let mut cfg = EnvelopeConfig::default();
    cfg.descent.seed = seed;
    let r = compute_envelope(&space, &cfg).map_err(|e| e.to_string())?;
    Ok(json!({
        "preset": preset,
        "input_dim": space.dim(),
        "mode": r.mode,
        "rank": r.rank,
        "certificate": r.certificate,
        "rigidity_violation": r.rigidity_violation,
        "probes": r.probes,
        "descent_trace": r.descent_trace,
        "lifted_rank": r.lifted.as_ref().map(|l| l.rank),
    }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = analyzeSemigroup)]
pub fn analyze_semigroup(table: &str) -> Result<String, JsError> {
    to_js(analyze_semigroup_json(table))
}

#[wasm_bindgen(js_name = cesaroCurve)]
pub fn cesaro_curve(preset: &str, steps: usize, seed: u32) -> Result<String, JsError> {
    to_js(cesaro_curve_json(preset, steps, seed as u64))
}

#[wasm_bindgen(js_name = envelopePreset)]
pub fn envelope_preset(preset: &str, seed: u32) -> Result<String, JsError> {
    to_js(envelope_json(preset, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semigroup_analysis_of_a_left_zero_band() {
        let v = analyze_semigroup_json("0 0\n1 1\n").unwrap();
        assert_eq!(v["idempotents"], json!([0, 1]));
        assert_eq!(v["minimal"], json!([0, 1]));
    }

    #[test]
    fn malformed_tables_are_reported() {
        assert!(analyze_semigroup_json("0 x\n1 1").unwrap_err().contains("row 0"));
        // 0·(1·1) = 0·0 = 1 but (0·1)·1 = 1·1 = 0
        assert!(analyze_semigroup_json("1 1\n0 0").is_err());
    }

    #[test]
    fn cesaro_curve_decays() {
        for preset in CHANNEL_PRESETS {
            let v = cesaro_curve_json(preset, 200, 3).unwrap();
            let curve: Vec<f64> = serde_json::from_value(v["curve"].clone()).unwrap();
            assert_eq!(curve.len(), 200);
            assert!(curve[199] < curve[0].max(1e-12) || curve[0] < 1e-12, "{preset}");
            assert!(curve[199] < 0.05, "{preset}: {}", curve[199]);
        }
        assert!(cesaro_curve_json("lazy-shift", 0, 0).is_err());
        assert!(cesaro_curve_json("nope", 5, 0).is_err());
    }

    #[test]
    fn envelope_presets_have_known_ranks() {
        for (preset, rank) in [("m2", 4), ("d2", 2), ("d3", 3), ("pauli", 4), ("e12", 1)] {
            let v = envelope_json(preset, 0).unwrap();
            assert_eq!(v["rank"], rank, "{preset}");
            assert_eq!(v["certificate"], "certified", "{preset}");
        }
    }
}

//! Browser bindings: symbol curves, indicial roots and Green's functions.
//!
//! Results cross the boundary as flat `Float64Array`s of pairs.

use hardy_core::greens::build_greens;
use hardy_core::indicial::find_roots;
use hardy_core::symbol::{hardy_constant, ModeSymbol};
use hardy_core::{CylinderParams, ModeIndex};
use wasm_bindgen::prelude::*;

fn params(n: u32, gamma: f64, kappa: f64) -> Result<CylinderParams, String> {
    CylinderParams::new(n, gamma, None, kappa).map_err(|e| e.to_string())
}

/// `[xi_0, Theta(xi_0), xi_1, ...]` on `[0, xi_max]`.
pub fn symbol_pairs(n: u32, gamma: f64, mode: u32, xi_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let p = params(n, gamma, 0.0)?;
    let symbol = ModeSymbol::new(&p, ModeIndex::new(mode));
    let points = points.max(2);
    Ok((0..points)
        .flat_map(|i| {
            let xi = xi_max * i as f64 / (points - 1) as f64;
            [xi, symbol.real_value(xi)]
        })
        .collect())
}

/// `[sigma_0, tau_0, sigma_1, tau_1, ...]`.
pub fn root_pairs(n: u32, gamma: f64, kappa: f64, mode: u32, count: usize) -> Result<Vec<f64>, String> {
    let p = params(n, gamma, kappa)?;
    let mode = ModeIndex::new(mode);
    let height = 2.0 * ModeSymbol::new(&p, mode).a + 2.0 * count as f64 + 20.0;
    let roots = find_roots(&p, mode, count, height).map_err(|e| e.to_string())?;
    Ok(roots.iter().flat_map(|r| [r.sigma, r.tau]).collect())
}

/// `[t_0, G(t_0), ...]` on `[-t_max, t_max]`.
pub fn greens_pairs(n: u32, gamma: f64, kappa: f64, truncation: usize, t_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let p = params(n, gamma, kappa)?;
    let series = build_greens(&p, ModeIndex::RADIAL, truncation).map_err(|e| e.to_string())?;
    let points = points.max(2);
    Ok((0..points)
        .flat_map(|i| {
            let t = -t_max + 2.0 * t_max * i as f64 / (points - 1) as f64;
            [t, series.eval(t)]
        })
        .collect())
}

#[wasm_bindgen(js_name = hardyConstant)]
pub fn hardy_constant_js(n: u32, gamma: f64) -> Result<f64, JsError> {
    Ok(hardy_constant(&params(n, gamma, 0.0).map_err(|e| JsError::new(&e))?))
}

#[wasm_bindgen(js_name = symbolCurve)]
pub fn symbol_curve(n: u32, gamma: f64, mode: u32, xi_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    symbol_pairs(n, gamma, mode, xi_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = indicialRoots)]
pub fn indicial_roots(n: u32, gamma: f64, kappa: f64, mode: u32, count: usize) -> Result<Vec<f64>, JsError> {
    root_pairs(n, gamma, kappa, mode, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = greensCurve)]
pub fn greens_curve(n: u32, gamma: f64, kappa: f64, truncation: usize, t_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    greens_pairs(n, gamma, kappa, truncation, t_max, points).map_err(|e| JsError::new(&e))
}

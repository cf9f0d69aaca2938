//! WebAssembly bindings for the static demo page.
//!
//! The page exposes three operations: a raster of the branch stream function,
//! the tracked Hessian eigenvalue curve, and the stability report of one model.
//! Each binding wraps a plain Rust function in [`api`] so the logic is tested
//! natively.

pub mod api;

use wasm_bindgen::prelude::*;

/// Stream function `psi(eps)` on an equiangular `n_lat x n_lon` raster,
/// latitude-major from north to south.
#[wasm_bindgen]
pub fn branch_raster(
    model: &str,
    mu: f64,
    mu1: f64,
    lmax: usize,
    epsilon: f64,
    n_lat: usize,
    n_lon: usize,
) -> Result<Vec<f64>, JsError> {
    api::branch_raster(&api::Params { model, mu, mu1, lmax }, epsilon, n_lat, n_lon).map_err(|e| JsError::new(&e))
}

/// Flattened triples `(eps, eta(eps), eps^2 eta2)` for `steps` amplitudes up to `eps_max`.
#[wasm_bindgen]
pub fn eta_curve(model: &str, mu: f64, mu1: f64, lmax: usize, eps_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    api::eta_curve(&api::Params { model, mu, mu1, lmax }, eps_max, steps).map_err(|e| JsError::new(&e))
}

/// Stability report as a JSON string.
#[wasm_bindgen]
pub fn stability_report(model: &str, mu: f64, mu1: f64, lmax: usize) -> Result<String, JsError> {
    api::stability_report(&api::Params { model, mu, mu1, lmax }).map_err(|e| JsError::new(&e))
}

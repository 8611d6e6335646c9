//! Browser bindings: parameters, Hilbert functions and the twenty-point
//! scheme, each returned as a JSON string.

use serde::Serialize;
use sklyanin::pointscheme::{build_point_family, theta, verify_point_scheme};
use sklyanin::repmodules::theta_constant;
use sklyanin::scalars::Rat;
use sklyanin::sklyanin::{
    central_elements, derived_constants, make_params, q_relations, qtilde_relations, CentralElement, Params,
};
use wasm_bindgen::prelude::*;

const MAX_DEGREE: usize = 5;

fn params(alpha: &str, beta: &str) -> Result<Params, String> {
    let a: Rat = alpha.trim().parse().map_err(|_| format!("cannot read α = {alpha:?}"))?;
    let b: Rat = beta.trim().parse().map_err(|_| format!("cannot read β = {beta:?}"))?;
    make_params(a, b).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ParamsView {
    alpha: String,
    beta: String,
    gamma: String,
    mu: String,
    nu: String,
    lambda: String,
    tower_dim: usize,
    tower: Vec<String>,
}

pub fn describe_params(alpha: &str, beta: &str) -> Result<String, String> {
    let p = params(alpha, beta)?;
    let d = derived_constants(&p).map_err(|e| e.to_string())?;
    to_json(&ParamsView {
        alpha: p.alpha.to_string(),
        beta: p.beta.to_string(),
        gamma: p.gamma.to_string(),
        mu: d.mu.to_string(),
        nu: d.nu.to_string(),
        lambda: d.lambda.to_string(),
        tower_dim: p.tower.dim(),
        tower: p.tower.labels().to_vec(),
    })
}

/// `which` is one of `q`, `qtilde`, `btilde`, `koszul-dual`.
pub fn hilbert_dims(alpha: &str, beta: &str, which: &str, max_degree: usize) -> Result<String, String> {
    if max_degree > MAX_DEGREE {
        return Err(format!("max degree is at most {MAX_DEGREE}"));
    }
    let p = params(alpha, beta)?;
    let dims = match which {
        "q" => q_relations(&p).hilbert_dims(max_degree),
        "qtilde" => qtilde_relations(&p).hilbert_dims(max_degree),
        "koszul-dual" => qtilde_relations(&p).koszul_dual().hilbert_dims(max_degree),
        "btilde" => {
            let z = [CentralElement::Theta, CentralElement::ThetaPrime]
                .map(|c| central_elements(&p, c))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            qtilde_relations(&p)
                .two_sided_quotient_dims(&z, max_degree)
                .map_err(|e| e.to_string())?
        }
        _ => return Err(format!("unknown algebra {which:?}")),
    };
    to_json(&dims)
}

#[derive(Serialize)]
struct PointView {
    family: &'static str,
    point: Vec<String>,
    theta: Vec<String>,
    rank: usize,
    kernel_is_theta: bool,
    kappa: String,
}

#[derive(Serialize)]
struct SchemeView {
    points: Vec<PointView>,
    random_rank_four: usize,
    random_points: usize,
    passed: bool,
}

pub fn point_scheme(alpha: &str, beta: &str) -> Result<String, String> {
    let p = params(alpha, beta)?;
    let f = build_point_family(&p);
    let a = qtilde_relations(&p);
    let rep = verify_point_scheme(&a, &f, 10, 1);
    let points = f
        .points
        .iter()
        .zip(&rep.points)
        .enumerate()
        .map(|(k, (fp, chk))| PointView {
            family: fp.label.name(),
            point: fp.point.to_strings(),
            theta: theta(&f, &fp.point).map(|t| t.to_strings()).unwrap_or_default(),
            rank: chk.rank,
            kernel_is_theta: chk.kernel_is_theta,
            kappa: theta_constant(&f, k).to_expr(),
        })
        .collect();
    to_json(&SchemeView {
        points,
        random_rank_four: rep.random_rank_four,
        random_points: rep.random_points,
        passed: rep.passed(),
    })
}

#[wasm_bindgen(js_name = describeParams)]
pub fn describe_params_js(alpha: &str, beta: &str) -> Result<String, JsValue> {
    describe_params(alpha, beta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = hilbertDims)]
pub fn hilbert_dims_js(alpha: &str, beta: &str, which: &str, max_degree: usize) -> Result<String, JsValue> {
    hilbert_dims(alpha, beta, which, max_degree).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = pointScheme)]
pub fn point_scheme_js(alpha: &str, beta: &str) -> Result<String, JsValue> {
    point_scheme(alpha, beta).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters() {
        let v: serde_json::Value = serde_json::from_str(&describe_params("2", "3").unwrap()).unwrap();
        assert_eq!(v["gamma"], "-5/7");
        assert_eq!(v["lambda"], "3/35");
        assert!(describe_params("1", "3").is_err());
        assert!(describe_params("x", "3").is_err());
    }

    #[test]
    fn hilbert_functions() {
        assert_eq!(hilbert_dims("2", "3", "qtilde", 3).unwrap(), "[1,4,10,20]");
        assert_eq!(hilbert_dims("2", "3", "btilde", 3).unwrap(), "[1,4,8,12]");
        assert_eq!(hilbert_dims("2", "3", "koszul-dual", 5).unwrap(), "[1,4,6,4,1,0]");
        assert!(hilbert_dims("2", "3", "free", 3).is_err());
        assert!(hilbert_dims("2", "3", "q", 6).is_err());
    }

    #[test]
    fn twenty_points() {
        let v: serde_json::Value = serde_json::from_str(&point_scheme("3", "5").unwrap()).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 20);
        assert_eq!(v["passed"], true);
        assert_eq!(v["points"][0]["kappa"], "1");
    }
}

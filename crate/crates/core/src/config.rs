//! JSON system configuration.
//!
//! ```json
//! {
//!   "n": 1,
//!   "family": "linear-constant",
//!   "params": { "F": [[2.0]], "G": [[2.0]], "H": [[1.0]],
//!               "forcing": { "amplitude": [1.0], "frequency": 1.0, "phase": 0.0 } },
//!   "omega": 6.283185307179586,
//!   "box": { "radius": 1.0, "grid": 5, "random": 0, "seed": 0 }
//! }
//! ```
//!
//! Family parameters:
//!
//! * `linear-constant`: `F`, `G` (symmetric n×n), `H` (n×n, `H(X) = H·X`), optional `forcing`.
//! * `example4`: optional `phase` (default 0) and `state_free_forcing` (default false).
//! * `diagonal-polynomial`: `F` rows `[c₀, c₁, c₂, c₃]`, `G` rows `[d₀, d₁, d₂]`,
//!   `H` rows `[e₁, e₂, e₃]`, optional `forcing`.
//!
//! Optional top-level keys: `A`, `B` (symmetric n×n), `sqrt_eps`, `box`.
//! Unknown keys are rejected everywhere.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hypothesis::DomainBox;
use crate::linalg::{Matrix, SymMatrix};
use crate::system::{Family, Sinusoid, SystemDef};

pub const DEFAULT_GRID: usize = 5;
pub const DEFAULT_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: usize,
    pub family: String,
    #[serde(default)]
    pub params: Value,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    /// Fixed `√ε`; when absent the smallest admissible value is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqrt_eps: Option<f64>,
    pub omega: f64,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<BoxConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    /// Symmetric cube `[-radius, radius]^{3n}`; exclusive with `lower`/`upper`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub random: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForcingParams {
    amplitude: Vec<f64>,
    #[serde(default = "one")]
    frequency: f64,
    #[serde(default)]
    phase: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearParams {
    #[serde(rename = "F")]
    f: Vec<Vec<f64>>,
    #[serde(rename = "G")]
    g: Vec<Vec<f64>>,
    #[serde(rename = "H")]
    h: Vec<Vec<f64>>,
    #[serde(default)]
    forcing: Option<ForcingParams>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Example4Params {
    #[serde(default)]
    phase: f64,
    #[serde(default)]
    state_free_forcing: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialParams {
    #[serde(rename = "F")]
    f: Vec<[f64; 4]>,
    #[serde(rename = "G")]
    g: Vec<[f64; 3]>,
    #[serde(rename = "H")]
    h: Vec<[f64; 3]>,
    #[serde(default)]
    forcing: Option<ForcingParams>,
}

fn input(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn params<T: for<'de> Deserialize<'de>>(v: &Value, family: &str) -> Result<T> {
    let v = if v.is_null() {
        Value::Object(Default::default())
    } else {
        v.clone()
    };
    serde_json::from_value(v).map_err(|e| input(format!("params ({family}): {e}")))
}

fn sinusoid(p: Option<ForcingParams>, n: usize) -> Result<Sinusoid> {
    match p {
        None => Ok(Sinusoid::zero(n)),
        Some(p) => {
            if p.amplitude.len() != n {
                return Err(input(format!(
                    "params.forcing.amplitude: expected {n} entries, got {}",
                    p.amplitude.len()
                )));
            }
            Ok(Sinusoid {
                amplitude: p.amplitude,
                frequency: p.frequency,
                phase: p.phase,
            })
        }
    }
}

fn square(rows: &[Vec<f64>], n: usize, field: &str) -> Result<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(input(format!("{field}: expected a {n}×{n} matrix")));
    }
    Ok(())
}

fn sym(rows: &[Vec<f64>], n: usize, field: &str) -> Result<SymMatrix> {
    square(rows, n, field)?;
    SymMatrix::from_rows(rows).map_err(|e| input(format!("{field}: {e}")))
}

fn count(len: usize, n: usize, field: &str) -> Result<()> {
    if len != n {
        return Err(input(format!("{field}: expected {n} rows, got {len}")));
    }
    Ok(())
}

impl SystemConfig {
    /// Parses JSON text; syntax and schema errors carry line/column positions.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| input(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Full schema check, including `A`/`B` shapes and the box.
    pub fn validate(&self) -> Result<()> {
        self.system(None)?;
        self.domain_box(None, None, None)?;
        if let Some(s) = self.sqrt_eps {
            if !(s.is_finite() && s >= 0.0) {
                return Err(input("sqrt_eps: must be a finite non-negative number"));
            }
        }
        Ok(())
    }

    /// The field family described by `family` and `params`.
    pub fn family(&self) -> Result<Family> {
        let n = self.n;
        if n == 0 {
            return Err(input("n: must be positive"));
        }
        let fam = match self.family.as_str() {
            "linear-constant" => {
                let p: LinearParams = params(&self.params, &self.family)?;
                let f = sym(&p.f, n, "params.F")?;
                let g = sym(&p.g, n, "params.G")?;
                square(&p.h, n, "params.H")?;
                let h = Matrix::from_rows(&p.h).map_err(|e| input(format!("params.H: {e}")))?;
                Family::LinearConstant {
                    f,
                    g,
                    h,
                    forcing: sinusoid(p.forcing, n)?,
                }
            }
            "example4" => {
                if n != 2 {
                    return Err(input(format!("n: example4 is two-dimensional, got {n}")));
                }
                let p: Example4Params = params(&self.params, &self.family)?;
                Family::Example4 {
                    phase: p.phase,
                    state_free_forcing: p.state_free_forcing,
                }
            }
            "diagonal-polynomial" => {
                let p: PolynomialParams = params(&self.params, &self.family)?;
                count(p.f.len(), n, "params.F")?;
                count(p.g.len(), n, "params.G")?;
                count(p.h.len(), n, "params.H")?;
                Family::DiagonalPolynomial {
                    f: p.f,
                    g: p.g,
                    h: p.h,
                    forcing: sinusoid(p.forcing, n)?,
                }
            }
            other => {
                return Err(input(format!(
                    "family: unknown \"{other}\" (expected linear-constant, example4 or diagonal-polynomial)"
                )))
            }
        };
        Ok(fam)
    }

    /// Builds the system, optionally overriding `ω`.
    pub fn system(&self, omega: Option<f64>) -> Result<SystemDef> {
        let fam = self.family()?;
        let a = self.a.as_ref().map(|m| sym(m, self.n, "A")).transpose()?;
        let b = self.b.as_ref().map(|m| sym(m, self.n, "B")).transpose()?;
        let omega = omega.unwrap_or(self.omega);
        if !(omega.is_finite() && omega > 0.0) {
            return Err(input(format!("omega: must be positive, got {omega}")));
        }
        SystemDef::new(fam, a, b, omega).map_err(|e| match e {
            Error::Input(m) => input(m),
            other => other,
        })
    }

    /// The sampling box, with command-line overrides for radius, grid and seed.
    pub fn domain_box(
        &self,
        radius: Option<f64>,
        grid: Option<usize>,
        seed: Option<u64>,
    ) -> Result<DomainBox> {
        let dim = 3 * self.n;
        let cfg = self.domain.clone().unwrap_or(BoxConfig {
            radius: None,
            lower: None,
            upper: None,
            grid: DEFAULT_GRID,
            random: 0,
            seed: 0,
        });
        let grid = grid.unwrap_or(cfg.grid);
        let seed = seed.unwrap_or(cfg.seed);
        let wrap = |e: Error| input(format!("box: {e}"));
        let cube = |r: f64| {
            if !(r.is_finite() && r > 0.0) {
                return Err(input(format!("box.radius: must be positive, got {r}")));
            }
            DomainBox::cube(self.n, r, grid, cfg.random, seed).map_err(wrap)
        };
        if let Some(r) = radius {
            return cube(r);
        }
        match (cfg.radius, &cfg.lower, &cfg.upper) {
            (Some(r), None, None) => cube(r),
            (None, None, None) => cube(DEFAULT_RADIUS),
            (None, Some(lo), Some(hi)) => {
                if lo.len() != dim || hi.len() != dim {
                    return Err(input(format!(
                        "box.lower/upper: expected {dim} entries each"
                    )));
                }
                DomainBox::new(lo.clone(), hi.clone(), grid, cfg.random, seed).map_err(wrap)
            }
            _ => Err(input("box: give either radius or both lower and upper")),
        }
    }

    pub fn to_json(&self) -> String {
        crate::report::to_json(self)
    }
}

/// The two-dimensional worked example with phase 0 and period `2π`.
pub fn example4_config() -> SystemConfig {
    SystemConfig {
        n: 2,
        family: "example4".into(),
        params: serde_json::json!({ "phase": 0.0, "state_free_forcing": false }),
        a: None,
        b: None,
        sqrt_eps: None,
        omega: 2.0 * PI,
        domain: Some(BoxConfig {
            radius: Some(DEFAULT_RADIUS),
            lower: None,
            upper: None,
            grid: DEFAULT_GRID,
            random: 0,
            seed: 0,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINEAR: &str = r#"{
        "n": 1, "family": "linear-constant",
        "params": {"F": [[2.0]], "G": [[2.0]], "H": [[1.0]],
                   "forcing": {"amplitude": [1.0]}},
        "omega": 6.283185307179586
    }"#;

    #[test]
    fn parses_linear_config() {
        let cfg = SystemConfig::from_json(LINEAR).unwrap();
        let sys = cfg.system(None).unwrap();
        assert_eq!(sys.n, 1);
        assert_eq!(sys.p(0.0, &[0.0], &[0.0], &[0.0]), vec![1.0]);
    }

    #[test]
    fn example4_round_trip_and_origin_values() {
        let cfg = example4_config();
        let text = cfg.to_json();
        assert_eq!(text, example4_config().to_json());
        let back = SystemConfig::from_json(&text).unwrap();
        assert_eq!(back, cfg);
        let sys = back.system(None).unwrap();
        let z = [0.0, 0.0];
        assert_eq!(sys.f(&z, &z, &z), SymMatrix::diag(&[2.0, 4.0]));
        assert_eq!(sys.g(&z, &z), SymMatrix::diag(&[1.0, 2.0]));
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = LINEAR.replace("\"omega\"", "\"colour\": 1, \"omega\"");
        assert!(matches!(
            SystemConfig::from_json(&text),
            Err(Error::Config(_))
        ));
        let text = LINEAR.replace("\"H\"", "\"Q\": [[1]], \"H\"");
        let err = SystemConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("params"), "{err}");
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let text = LINEAR.replace("\"omega\"", "\"A\": [[1, 0], [0, 1]], \"omega\"");
        let cfg: SystemConfig = serde_json::from_str(&text).unwrap();
        let err = cfg.system(None).unwrap_err();
        assert!(err.is_input());
        assert!(err.to_string().contains('A'));
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let text = r#"{"n": 2, "family": "linear-constant",
            "params": {"F": [[2, 1], [0, 2]], "G": [[1, 0], [0, 1]], "H": [[1, 0], [0, 1]]},
            "omega": 1}"#;
        let err = SystemConfig::from_json(text).unwrap_err().to_string();
        assert!(err.contains("params.F"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = SystemConfig::from_json("{\n \"n\": 1,\n oops }")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn box_overrides() {
        let cfg = example4_config();
        let b = cfg.domain_box(Some(2.0), Some(3), Some(9)).unwrap();
        assert_eq!(b.upper, vec![2.0; 6]);
        assert_eq!((b.grid, b.seed), (3, 9));
        assert!(cfg.domain_box(Some(-1.0), None, None).is_err());
    }
}

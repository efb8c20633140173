//! JSON description of `h` and its working set of zeros.
//!
//! ```json
//! {"type": "polynomial", "coeffs": [0, 0, 1]}
//! {"type": "builtin", "name": "sinh_deformation", "hbar": [1.0, 0.0], "window": 2}
//! ```
//!
//! Polynomial coefficients are lowest order first; each is a number or an
//! `[re, im]` pair. Builtins take an optional explicit `zeros` list of
//! `{"lambda": [re, im], "order": k}`; otherwise the zeros `πij/ħ`,
//! `|j| <= window`, are used.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse_polynomial;
use crate::function::{FunctionModel, Region, SinhDeformation, ZeroDatum, ZERO_TOL};

pub const SINH_DEFORMATION: &str = "sinh_deformation";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex(Complex64),
}

impl From<Coefficient> for Complex64 {
    fn from(c: Coefficient) -> Self {
        match c {
            Coefficient::Real(x) => Complex64::new(x, 0.0),
            Coefficient::Complex(z) => z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeclaredZero {
    pub lambda: Complex64,
    pub order: usize,
}

fn default_window() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Polynomial {
        coeffs: Vec<Coefficient>,
    },
    Builtin {
        name: String,
        hbar: Complex64,
        #[serde(default = "default_window")]
        window: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeros: Option<Vec<DeclaredZero>>,
    },
}

impl FunctionSpec {
    /// Parses JSON; syntax errors report line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            column: e.column(),
            message: format!("line {}: {e}", e.line()),
        })
    }

    /// A polynomial spec from an expression like `z(z-1)^2`.
    pub fn from_expression(text: &str) -> Result<Self> {
        let coeffs = parse_polynomial(text)?;
        Ok(FunctionSpec::Polynomial {
            coeffs: coeffs
                .into_iter()
                .map(|c| if c.im == 0.0 { Coefficient::Real(c.re) } else { Coefficient::Complex(c) })
                .collect(),
        })
    }

    pub fn model(&self) -> Result<FunctionModel> {
        match self {
            FunctionSpec::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
                }
                Ok(FunctionModel::polynomial(coeffs.iter().map(|&c| c.into()).collect()))
            }
            FunctionSpec::Builtin { name, hbar, .. } if name == SINH_DEFORMATION => {
                FunctionModel::sinh_deformation(*hbar)
            }
            FunctionSpec::Builtin { name, .. } => Err(Error::InvalidArgument(format!("unknown builtin {name:?}"))),
        }
    }

    /// Zeros of a polynomial by search; declared (or windowed) zeros of a
    /// builtin, each validated against the model.
    pub fn zeros(&self, model: &FunctionModel) -> Result<Vec<ZeroDatum>> {
        match self {
            FunctionSpec::Polynomial { .. } => model.find_zeros(&Region::everywhere()),
            FunctionSpec::Builtin { hbar, window, zeros, .. } => {
                let list = match zeros {
                    Some(declared) => declared
                        .iter()
                        .map(|z| {
                            if z.order == 0 {
                                return Err(Error::InvalidArgument("declared zero order must be >= 1".into()));
                            }
                            Ok(ZeroDatum::new(z.lambda, z.order))
                        })
                        .collect::<Result<Vec<_>>>()?,
                    None => SinhDeformation::new(*hbar)?.zero_window(*window),
                };
                for z in &list {
                    model.validate_zero(z, ZERO_TOL)?;
                }
                Ok(list)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_kinds() {
        let p = FunctionSpec::from_json(r#"{"type":"polynomial","coeffs":[0, [0.0, 0.0], 1]}"#).unwrap();
        let model = p.model().unwrap();
        assert_eq!(p.zeros(&model).unwrap(), vec![ZeroDatum::real(0.0, 2)]);

        let s = FunctionSpec::from_json(r#"{"type":"builtin","name":"sinh_deformation","hbar":[1.0,0.0]}"#).unwrap();
        let model = s.model().unwrap();
        let zeros = s.zeros(&model).unwrap();
        assert_eq!(zeros.len(), 5);
        assert!(zeros.iter().all(|z| z.order == 1));
    }

    #[test]
    fn declared_zeros_are_validated() {
        let bad = FunctionSpec::from_json(
            r#"{"type":"builtin","name":"sinh_deformation","hbar":[1.0,0.0],"zeros":[{"lambda":[0.5,0.0],"order":1}]}"#,
        )
        .unwrap();
        assert!(bad.zeros(&bad.model().unwrap()).is_err());

        let wrong_order = FunctionSpec::from_json(
            r#"{"type":"builtin","name":"sinh_deformation","hbar":[1.0,0.0],"zeros":[{"lambda":[0.0,0.0],"order":2}]}"#,
        )
        .unwrap();
        assert!(wrong_order.zeros(&wrong_order.model().unwrap()).is_err());
    }

    #[test]
    fn syntax_errors_have_positions() {
        match FunctionSpec::from_json("{\n  \"type\": \"polynomial\",\n  \"coeffs\": [1,,]\n}") {
            Err(Error::Parse { column, message }) => {
                assert!(message.starts_with("line 3"), "{message}");
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
        assert!(FunctionSpec::from_json(r#"{"type":"builtin","name":"nope","hbar":[1,0]}"#)
            .unwrap()
            .model()
            .is_err());
    }

    #[test]
    fn expression_round_trip() {
        let spec = FunctionSpec::from_expression("z(z-1)^2").unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"type":"polynomial","coeffs":[0.0,1.0,-2.0,1.0]}"#);
        assert_eq!(FunctionSpec::from_json(&text).unwrap(), spec);
    }
}

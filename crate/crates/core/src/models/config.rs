//! JSON run configuration shared by both examples. Every key is optional;
//! unknown keys are rejected, and keys that belong to the other example are
//! rejected too rather than silently ignored.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::example1::Example1Params;
use super::example2::{Example2Case, Example2Params};
use crate::dynamics::DEFAULT_DT;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omegap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    /// `[re, im]`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c01: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c02: Option<[f64; 2]>,
    /// Bit string; a bare integer such as `10` is read as its digits.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        deserialize_with = "bit_string"
    )]
    pub initial: Option<String>,
}

fn bit_string<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Number(u64),
    }
    Ok(Option::<Raw>::deserialize(d)?.map(|r| match r {
        Raw::Text(s) => s,
        Raw::Number(n) => n.to_string(),
    }))
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// Steps for `t_max` when only one of the two is given.
fn resolve_grid(
    t_max: Option<f64>,
    steps: Option<usize>,
    default_t: f64,
    default_steps: usize,
) -> (f64, usize) {
    match (t_max, steps) {
        (Some(t), Some(s)) => (t, s),
        (Some(t), None) => (t, (t / DEFAULT_DT).ceil().max(1.0) as usize),
        (None, Some(s)) => (default_t, s),
        (None, None) => (default_t, default_steps),
    }
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    fn reject(&self, example: u8, keys: &[(&str, bool)]) -> Result<()> {
        if let Some(e) = self.example {
            if e != example {
                return Err(Error::Validation(format!(
                    "config is for example {e}, not example {example}"
                )));
            }
        }
        let stray: Vec<&str> = keys
            .iter()
            .filter(|(_, set)| *set)
            .map(|(k, _)| *k)
            .collect();
        if !stray.is_empty() {
            return Err(Error::Validation(format!(
                "keys {stray:?} do not apply to example {example}"
            )));
        }
        Ok(())
    }

    pub fn example1_params(&self) -> Result<Example1Params> {
        self.reject(
            1,
            &[
                ("case", self.case.is_some()),
                ("g", self.g.is_some()),
                ("omegap", self.omegap.is_some()),
                ("gamma", self.gamma.is_some()),
                ("initial", self.initial.is_some()),
            ],
        )?;
        let d = Example1Params::default();
        let (t_max, steps) = resolve_grid(self.t_max, self.steps, d.t_max, d.steps);
        let p = Example1Params {
            omega0: self.omega0.unwrap_or(d.omega0),
            lambda: self.lambda.unwrap_or(d.lambda),
            r: self.r.unwrap_or(d.r),
            alpha1: self.alpha1.unwrap_or(d.alpha1),
            alpha2: self.alpha2.unwrap_or(d.alpha2),
            beta: self.beta.unwrap_or(d.beta),
            c01: self.c01.map(complex).unwrap_or(d.c01),
            c02: self.c02.map(complex).unwrap_or(d.c02),
            t_max,
            steps,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn example2_params(&self) -> Result<Example2Params> {
        self.reject(
            2,
            &[
                ("lambda", self.lambda.is_some()),
                ("R", self.r.is_some()),
                ("alpha1", self.alpha1.is_some()),
                ("alpha2", self.alpha2.is_some()),
                ("c01", self.c01.is_some()),
                ("c02", self.c02.is_some()),
            ],
        )?;
        let case = Example2Case::try_from(self.case.unwrap_or(1))?;
        let d = Example2Params::defaults(case);
        let (t_max, steps) = resolve_grid(self.t_max, self.steps, d.t_max, d.steps);
        let p = Example2Params {
            case,
            g: self.g.unwrap_or(d.g),
            omega0: self.omega0.unwrap_or(d.omega0),
            omegap: self.omegap.unwrap_or(d.omegap),
            gamma: self.gamma.unwrap_or(d.gamma),
            beta: self.beta.unwrap_or(d.beta),
            t_max,
            steps,
            initial: self.initial.clone().unwrap_or(d.initial),
        };
        p.validate()?;
        Ok(p)
    }
}

//! JSON job configuration for the CLI: model parameters, formula selection
//! and run controls.

use dwpf::{BracketContext, BracketMode, Complex64, ModelParams, ParamSampler};
use serde::{Deserialize, Serialize};

/// Configuration mistakes exit with code 2; numeric guard violations with 3.
pub enum CfgError {
    Config(String),
    Guard(dwpf::Error),
}

impl From<String> for CfgError {
    fn from(s: String) -> Self {
        CfgError::Config(s)
    }
}

fn classify(e: dwpf::Error) -> CfgError {
    match e {
        dwpf::Error::InvalidParams(_)
        | dwpf::Error::InvalidContext(_)
        | dwpf::Error::SizeLimit { .. } => CfgError::Config(e.to_string()),
        other => CfgError::Guard(other),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VecSpec {
    /// The string "random": draw with the configured seed.
    Tag(String),
    /// Explicit values as [re, im] pairs.
    Values(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Tag(String),
    Value([f64; 2]),
}

fn default_schema() -> u32 {
    1
}

fn default_gamma() -> [f64; 2] {
    [1.0, 0.0]
}

fn default_tau() -> [f64; 2] {
    [0.05, 0.9]
}

fn default_l() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default = "default_gamma")]
    pub gamma: [f64; 2],
    #[serde(default = "default_tau")]
    pub tau: [f64; 2],
    #[serde(default = "default_l")]
    pub l: usize,
    #[serde(default)]
    pub x: Option<VecSpec>,
    #[serde(default)]
    pub y: Option<VecSpec>,
    #[serde(default)]
    pub z: Option<ScalarSpec>,
    #[serde(default)]
    pub kappa: Option<ScalarSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub formulas: Vec<String>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            schema: 1,
            mode: None,
            gamma: default_gamma(),
            tau: default_tau(),
            l: default_l(),
            x: None,
            y: None,
            z: None,
            kappa: None,
            seed: None,
            formulas: Vec::new(),
            tol: None,
            threads: None,
        }
    }
}

pub fn parse_mode(s: &str) -> Result<BracketMode, String> {
    match s {
        "trig" | "trigonometric" => Ok(BracketMode::Trigonometric),
        "elliptic" => Ok(BracketMode::Elliptic),
        "rational" => Ok(BracketMode::Rational),
        other => Err(format!("unknown mode '{other}' (trig|elliptic|rational)")),
    }
}

fn c(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

impl JobConfig {
    pub fn context(&self, mode: BracketMode) -> Result<BracketContext, String> {
        BracketContext::new(
            mode,
            c(self.gamma),
            c(self.tau),
            dwpf::bracket::DEFAULT_SERIES_TOL,
            dwpf::bracket::DEFAULT_MAX_TERMS,
        )
        .map_err(|e| e.to_string())
    }

    fn is_random(spec: &Option<VecSpec>) -> Result<bool, String> {
        match spec {
            None => Ok(true),
            Some(VecSpec::Tag(t)) if t == "random" => Ok(true),
            Some(VecSpec::Tag(t)) => {
                Err(format!("unknown vector spec '{t}' (expected \"random\")"))
            }
            Some(VecSpec::Values(_)) => Ok(false),
        }
    }

    /// Materializes the model parameters, drawing random entries when asked.
    /// Random use without a seed is a configuration error.
    pub fn params(&self, mode: BracketMode, reflecting: bool) -> Result<ModelParams, CfgError> {
        let ctx = self.context(mode).map_err(CfgError::Config)?;
        let x_random = Self::is_random(&self.x).map_err(CfgError::Config)?;
        let y_random = Self::is_random(&self.y).map_err(CfgError::Config)?;
        let z_random = matches!(&self.z, Some(ScalarSpec::Tag(t)) if t == "random")
            || (reflecting && self.z.is_none());
        let kappa_random = matches!(&self.kappa, Some(ScalarSpec::Tag(t)) if t == "random")
            || (reflecting && self.kappa.is_none());
        let any_random = x_random || y_random || (reflecting && (z_random || kappa_random));
        if any_random && self.seed.is_none() {
            return Err(CfgError::Config(
                "\"seed\" is required whenever parameters are \"random\"".into(),
            ));
        }
        if any_random {
            let mut sampler = ParamSampler::new(self.seed.unwrap());
            let mut p = sampler
                .draw_params(&ctx, self.l, reflecting, reflecting)
                .map_err(classify)?;
            if let Some(VecSpec::Values(v)) = &self.x {
                if v.len() != self.l {
                    return Err(CfgError::Config(format!(
                        "x has {} entries but L = {}",
                        v.len(),
                        self.l
                    )));
                }
                p.x = v.iter().map(|&e| c(e)).collect();
            }
            if let Some(VecSpec::Values(v)) = &self.y {
                if v.len() != self.l {
                    return Err(CfgError::Config(format!(
                        "y has {} entries but L = {}",
                        v.len(),
                        self.l
                    )));
                }
                p.y = v.iter().map(|&e| c(e)).collect();
            }
            if let Some(ScalarSpec::Value(v)) = &self.z {
                p.z = Some(c(*v));
            }
            if let Some(ScalarSpec::Value(v)) = &self.kappa {
                p.kappa = Some(c(*v));
            }
            if !reflecting {
                p.z = None;
                p.kappa = None;
            }
            Ok(p)
        } else {
            let x = match &self.x {
                Some(VecSpec::Values(v)) => v.iter().map(|&e| c(e)).collect(),
                _ => unreachable!(),
            };
            let y = match &self.y {
                Some(VecSpec::Values(v)) => v.iter().map(|&e| c(e)).collect(),
                _ => unreachable!(),
            };
            let z = match &self.z {
                Some(ScalarSpec::Value(v)) if reflecting => Some(c(*v)),
                _ => None,
            };
            let kappa = match &self.kappa {
                Some(ScalarSpec::Value(v)) if reflecting => Some(c(*v)),
                _ => None,
            };
            ModelParams::new(ctx, x, y, z, kappa).map_err(classify)
        }
    }
}

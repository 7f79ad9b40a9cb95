//! The bracket function `[w]` underlying every vertex weight.
//!
//! Three parametrizations share one interface:
//!
//! - elliptic:       `[w] = e^{-iπτ/4} ϑ₁(γw; τ) / 2`, nome `q = e^{iπτ}`, `Im τ > 0`
//! - trigonometric:  `[w] = sin(γw)`
//! - rational:       `[w] = w` (γ fixed to 1)
//!
//! The normalization of the elliptic case is chosen so that `[w] → sin(γw)`
//! as `τ → i∞`. ϑ₁ is evaluated through its sine series
//! `ϑ₁(u;τ) = 2 Σ_{n≥0} (-1)ⁿ q^{(n+1/2)²} sin((2n+1)u)`,
//! truncated once the next term drops below `series_tol` relative to the
//! running sum.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which parametrization of `[w]` is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketMode {
    Elliptic,
    Trigonometric,
    Rational,
}

impl BracketMode {
    pub fn name(self) -> &'static str {
        match self {
            BracketMode::Elliptic => "elliptic",
            BracketMode::Trigonometric => "trig",
            BracketMode::Rational => "rational",
        }
    }
}

/// Evaluation context for the bracket: mode, crossing parameter γ and, in the
/// elliptic case, the modulus τ together with series truncation controls.
#[derive(Debug, Clone)]
pub struct BracketContext {
    pub mode: BracketMode,
    pub gamma: Complex64,
    pub tau: Complex64,
    pub series_tol: f64,
    pub max_terms: usize,
}

pub const DEFAULT_SERIES_TOL: f64 = 1e-18;
pub const DEFAULT_MAX_TERMS: usize = 64;

impl BracketContext {
    pub fn new(
        mode: BracketMode,
        gamma: Complex64,
        tau: Complex64,
        series_tol: f64,
        max_terms: usize,
    ) -> Result<Self> {
        let ctx = BracketContext {
            mode,
            gamma,
            tau,
            series_tol,
            max_terms,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    /// Trigonometric context with crossing parameter γ.
    pub fn trig(gamma: Complex64) -> Self {
        BracketContext {
            mode: BracketMode::Trigonometric,
            gamma,
            tau: Complex64::new(0.0, 0.0),
            series_tol: DEFAULT_SERIES_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    /// Rational context; γ plays no role and is pinned to 1.
    pub fn rational() -> Self {
        BracketContext {
            mode: BracketMode::Rational,
            gamma: Complex64::new(1.0, 0.0),
            tau: Complex64::new(0.0, 0.0),
            series_tol: DEFAULT_SERIES_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    /// Elliptic context with crossing parameter γ and modulus τ (`Im τ > 0`).
    pub fn elliptic(gamma: Complex64, tau: Complex64) -> Self {
        BracketContext {
            mode: BracketMode::Elliptic,
            gamma,
            tau,
            series_tol: DEFAULT_SERIES_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.series_tol <= 0.0 {
            return Err(Error::InvalidContext("series_tol must be > 0".into()));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidContext("max_terms must be >= 1".into()));
        }
        match self.mode {
            BracketMode::Elliptic => {
                if self.tau.im <= 0.0 {
                    return Err(Error::InvalidContext(
                        "elliptic mode requires Im(tau) > 0".into(),
                    ));
                }
                if self.gamma.norm() == 0.0 {
                    return Err(Error::InvalidContext("gamma must be nonzero".into()));
                }
            }
            BracketMode::Trigonometric => {
                if self.gamma.norm() == 0.0 {
                    return Err(Error::InvalidContext("gamma must be nonzero".into()));
                }
            }
            BracketMode::Rational => {}
        }
        Ok(())
    }

    /// The bracket `[w]`.
    pub fn bracket(&self, w: Complex64) -> Result<Complex64> {
        match self.mode {
            BracketMode::Rational => Ok(w),
            BracketMode::Trigonometric => Ok((self.gamma * w).sin()),
            BracketMode::Elliptic => self.bracket_elliptic(w),
        }
    }

    /// Shorthand product `[w₁, w₂, …] = [w₁][w₂]⋯`; the empty product is 1.
    pub fn bracket_product(&self, ws: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &w in ws {
            acc *= self.bracket(w)?;
        }
        Ok(acc)
    }

    /// `e^{-iπτ/4} ϑ₁(γw; τ) / 2` through the sine series.
    ///
    /// The n-th term is `(-1)ⁿ q^{(n+1/2)² - 1/4} sin((2n+1)γw)` after the
    /// normalizing prefactor is folded into the nome power, so the n = 0 term
    /// is exactly `sin(γw)` and the trigonometric limit is manifest.
    fn bracket_elliptic(&self, w: Complex64) -> Result<Complex64> {
        let u = self.gamma * w;
        let i_pi_tau = Complex64::new(0.0, std::f64::consts::PI) * self.tau;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut max_mag = 0.0f64;
        for n in 0..self.max_terms {
            let nf = n as f64;
            // (n+1/2)^2 - 1/4 = n(n+1)
            let qpow = (i_pi_tau * (nf * (nf + 1.0))).exp();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * qpow * ((2.0 * nf + 1.0) * u).sin();
            sum += term;
            let t = term.norm();
            max_mag = max_mag.max(sum.norm());
            // superexponential decay: once a term is negligible against the
            // largest partial sum seen, all later terms are too
            if t <= self.series_tol * max_mag || t == 0.0 {
                return Ok(sum);
            }
        }
        Err(Error::SeriesDivergence {
            max_terms: self.max_terms,
        })
    }

    /// Magnitude guard helper: evaluates `[w]` and errors with `make_err`
    /// when its magnitude falls below `tol`.
    pub fn guarded(
        &self,
        w: Complex64,
        tol: f64,
        make_err: impl FnOnce(String) -> Error,
        label: &str,
    ) -> Result<Complex64> {
        let v = self.bracket(w)?;
        if v.norm() < tol {
            return Err(make_err(label.to_string()));
        }
        Ok(v)
    }
}

//! Vertex weights of the six-vertex model, the height-dependent weights of
//! the elliptic SOS model, the diagonal boundary K-matrix, and the R-matrix
//! constructors built from them.
//!
//! Dynamical weights take the height as `Option<Complex64>`: `None` drops
//! every factor whose argument contains the height, which is the
//! degeneration used by the six-vertex limits of the reflecting-end
//! formulas.

use num_complex::Complex64;

use crate::bracket::BracketContext;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Absolute magnitude guard on brackets that sit in denominators.
pub const POLE_GUARD: f64 = 1e-12;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Six-vertex weights a(w) = [w+1], b(w) = [w], c(w) = [1].
#[derive(Debug, Clone)]
pub struct SixVertexWeights<'a> {
    pub ctx: &'a BracketContext,
}

impl<'a> SixVertexWeights<'a> {
    pub fn new(ctx: &'a BracketContext) -> Self {
        SixVertexWeights { ctx }
    }

    pub fn a(&self, w: Complex64) -> Result<Complex64> {
        self.ctx.bracket(w + one())
    }

    pub fn b(&self, w: Complex64) -> Result<Complex64> {
        self.ctx.bracket(w)
    }

    pub fn c(&self, _w: Complex64) -> Result<Complex64> {
        self.ctx.bracket(one())
    }
}

/// Height-dependent weights of the SOS model,
/// a±(w,z) = [w+1], b±(w,z) = [w][z∓1]/[z], c±(w,z) = [1][z±w]/[z].
///
/// With `z = None` the z-factors are dropped: b± = [w], c± = [1].
#[derive(Debug, Clone)]
pub struct DynamicalWeights<'a> {
    pub ctx: &'a BracketContext,
}

impl<'a> DynamicalWeights<'a> {
    pub fn new(ctx: &'a BracketContext) -> Self {
        DynamicalWeights { ctx }
    }

    fn z_ratio(&self, z: Option<Complex64>, num_off: Complex64) -> Result<Complex64> {
        match z {
            None => Ok(one()),
            Some(z) => {
                let den = self.ctx.guarded(z, POLE_GUARD, Error::DynamicalPole, "z")?;
                Ok(self.ctx.bracket(z + num_off)? / den)
            }
        }
    }

    pub fn a_plus(&self, w: Complex64, _z: Option<Complex64>) -> Result<Complex64> {
        self.ctx.bracket(w + one())
    }

    pub fn a_minus(&self, w: Complex64, _z: Option<Complex64>) -> Result<Complex64> {
        self.ctx.bracket(w + one())
    }

    pub fn b_plus(&self, w: Complex64, z: Option<Complex64>) -> Result<Complex64> {
        Ok(self.ctx.bracket(w)? * self.z_ratio(z, -one())?)
    }

    pub fn b_minus(&self, w: Complex64, z: Option<Complex64>) -> Result<Complex64> {
        Ok(self.ctx.bracket(w)? * self.z_ratio(z, one())?)
    }

    pub fn c_plus(&self, w: Complex64, z: Option<Complex64>) -> Result<Complex64> {
        Ok(self.ctx.bracket(one())? * self.z_ratio(z, w)?)
    }

    pub fn c_minus(&self, w: Complex64, z: Option<Complex64>) -> Result<Complex64> {
        Ok(self.ctx.bracket(one())? * self.z_ratio(z, -w)?)
    }
}

/// Diagonal boundary weights
/// k₊(x,z) = [κ+x][z+κ−x]/[z+κ+x], k₋(x,z) = [κ−x];
/// with `z = None` these degenerate to k±(x) = [κ±x].
#[derive(Debug, Clone)]
pub struct KWeights<'a> {
    pub ctx: &'a BracketContext,
    pub kappa: Complex64,
}

impl<'a> KWeights<'a> {
    pub fn new(ctx: &'a BracketContext, kappa: Complex64) -> Self {
        KWeights { ctx, kappa }
    }

    pub fn k_plus(&self, x: Complex64, z: Option<Complex64>) -> Result<Complex64> {
        let head = self.ctx.bracket(self.kappa + x)?;
        match z {
            None => Ok(head),
            Some(z) => {
                let den = self.ctx.guarded(
                    z + self.kappa + x,
                    POLE_GUARD,
                    Error::BoundaryPole,
                    "z+kappa+x",
                )?;
                Ok(head * self.ctx.bracket(z + self.kappa - x)? / den)
            }
        }
    }

    pub fn k_minus(&self, x: Complex64, _z: Option<Complex64>) -> Result<Complex64> {
        self.ctx.bracket(self.kappa - x)
    }
}

/// Six-vertex R-matrix on C² ⊗ C² in the basis (↑↑, ↑↓, ↓↑, ↓↓):
/// diag blocks (a, b|c, c|b, a).
pub fn r_matrix(ctx: &BracketContext, w: Complex64) -> Result<ComplexMatrix> {
    let sv = SixVertexWeights::new(ctx);
    let (a, b, c) = (sv.a(w)?, sv.b(w)?, sv.c(w)?);
    let mut m = ComplexMatrix::zeros(4);
    m[(0, 0)] = a;
    m[(1, 1)] = b;
    m[(1, 2)] = c;
    m[(2, 1)] = c;
    m[(2, 2)] = b;
    m[(3, 3)] = a;
    Ok(m)
}

/// Dynamical R-matrix with entries (a₊, b₊|c₋, c₊|b₋, a₋); the height
/// argument labels the north-west face of the crossing.
pub fn dyn_r_matrix(
    ctx: &BracketContext,
    w: Complex64,
    z: Option<Complex64>,
) -> Result<ComplexMatrix> {
    let dw = DynamicalWeights::new(ctx);
    let mut m = ComplexMatrix::zeros(4);
    m[(0, 0)] = dw.a_plus(w, z)?;
    m[(1, 1)] = dw.b_plus(w, z)?;
    m[(1, 2)] = dw.c_minus(w, z)?;
    m[(2, 1)] = dw.c_plus(w, z)?;
    m[(2, 2)] = dw.b_minus(w, z)?;
    m[(3, 3)] = dw.a_minus(w, z)?;
    Ok(m)
}

/// Diagonal K-matrix diag(k₊(x,z), k₋(x,z)).
pub fn k_matrix(
    ctx: &BracketContext,
    x: Complex64,
    z: Option<Complex64>,
    kappa: Complex64,
) -> Result<ComplexMatrix> {
    let kw = KWeights::new(ctx, kappa);
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = kw.k_plus(x, z)?;
    m[(1, 1)] = kw.k_minus(x, z)?;
    Ok(m)
}

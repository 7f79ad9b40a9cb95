//! Brute-force evaluation of the domain-wall partition function by direct
//! enumeration of ice-rule configurations on the L×L lattice.
//!
//! Arrows are propagated row by row: within a row, each vertex constrains
//! its east and south edges given the west and north ones, so only the
//! allowed branches (at most two per vertex) are walked.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Method, ModelParams, PartitionValue};

pub const MAX_ENUMERATE_L: usize = 4;
pub const MAX_COUNT_L: usize = 5;

/// Horizontal edge arrows: `true` = →; vertical: `true` = ↑.
///
/// Domain walls fix the boundary: ← on the left edge, → on the right edge,
/// ↑ entering at the bottom, ↓ entering at the top.
#[derive(Clone, Copy)]
enum VertexKind {
    A,
    B,
    C,
}

/// Allowed (east, south, kind) continuations for given (west, north) edges.
fn continuations(west: bool, north: bool) -> &'static [(bool, bool, VertexKind)] {
    // (→,↑): a-vertex straight or c-vertex turning
    const WN: [(bool, bool, VertexKind); 2] =
        [(true, true, VertexKind::A), (false, false, VertexKind::C)];
    // (→,↓): b-vertex only
    const WD: [(bool, bool, VertexKind); 1] = [(true, false, VertexKind::B)];
    // (←,↑): b-vertex only
    const LN: [(bool, bool, VertexKind); 1] = [(false, true, VertexKind::B)];
    // (←,↓): a-vertex straight or c-vertex turning
    const LD: [(bool, bool, VertexKind); 2] =
        [(false, false, VertexKind::A), (true, true, VertexKind::C)];
    match (west, north) {
        (true, true) => &WN,
        (true, false) => &WD,
        (false, true) => &LN,
        (false, false) => &LD,
    }
}

struct Enumerator {
    l: usize,
    aw: Vec<Vec<Complex64>>,
    bw: Vec<Vec<Complex64>>,
    cw: Complex64,
    sum: Complex64,
    scale: f64,
    configs: u64,
}

impl Enumerator {
    /// Recurse over rows; `north` holds the vertical arrows entering the
    /// current row from above.
    fn walk_rows(&mut self, row: usize, north: &mut Vec<bool>, weight: Complex64) {
        if row == self.l {
            if north.iter().all(|&up| up) {
                self.sum += weight;
                self.scale = self.scale.max(weight.norm());
                self.configs += 1;
            }
            return;
        }
        let mut south = vec![false; self.l];
        self.walk_cols(row, 0, false, north, &mut south, weight);
    }

    fn walk_cols(
        &mut self,
        row: usize,
        col: usize,
        west: bool,
        north: &mut Vec<bool>,
        south: &mut Vec<bool>,
        weight: Complex64,
    ) {
        if col == self.l {
            // right boundary arrow must point out (→)
            if west {
                let mut next = south.clone();
                self.walk_rows(row + 1, &mut next, weight);
            }
            return;
        }
        for &(east, s, kind) in continuations(west, north[col]) {
            let w = match kind {
                VertexKind::A => self.aw[row][col],
                VertexKind::B => self.bw[row][col],
                VertexKind::C => self.cw,
            };
            south[col] = s;
            self.walk_cols(row, col + 1, east, north, south, weight * w);
        }
    }
}

/// Sums the weights of all domain-wall ice configurations; row i carries
/// spectral parameter xᵢ, column j inhomogeneity yⱼ, and the vertex weights
/// are a(xᵢ−yⱼ), b(xᵢ−yⱼ), c(xᵢ−yⱼ).
pub fn dwpf_enumerate(p: &ModelParams) -> Result<PartitionValue> {
    if p.l > MAX_ENUMERATE_L {
        return Err(Error::SizeLimit {
            what: "dwpf_enumerate",
            limit: MAX_ENUMERATE_L,
            got: p.l,
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let mut aw = vec![vec![Complex64::default(); p.l]; p.l];
    let mut bw = vec![vec![Complex64::default(); p.l]; p.l];
    for i in 0..p.l {
        for j in 0..p.l {
            aw[i][j] = p.ctx.bracket(p.x[i] - p.y[j] + one)?;
            bw[i][j] = p.ctx.bracket(p.x[i] - p.y[j])?;
        }
    }
    let mut e = Enumerator {
        l: p.l,
        aw,
        bw,
        cw: p.ctx.bracket(one)?,
        sum: Complex64::new(0.0, 0.0),
        scale: 0.0,
        configs: 0,
    };
    // top boundary: ↓ entering everywhere
    let mut north = vec![false; p.l];
    e.walk_rows(0, &mut north, one);
    Ok(PartitionValue::new(e.sum, Method::Enumerate, e.scale))
}

/// Number of ice-rule configurations compatible with domain walls
/// (1, 2, 7, 42, 429 for L = 1..5).
pub fn count_dw_configs(l: usize) -> Result<u64> {
    if l == 0 || l > MAX_COUNT_L {
        return Err(Error::SizeLimit {
            what: "count_dw_configs",
            limit: MAX_COUNT_L,
            got: l,
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let mut e = Enumerator {
        l,
        aw: vec![vec![one; l]; l],
        bw: vec![vec![one; l]; l],
        cw: one,
        sum: Complex64::new(0.0, 0.0),
        scale: 0.0,
        configs: 0,
    };
    let mut north = vec![false; l];
    e.walk_rows(0, &mut north, one);
    Ok(e.configs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::BracketContext;
    use num_complex::Complex64 as C64;

    #[test]
    fn config_counts_are_asm_numbers() {
        assert_eq!(count_dw_configs(1).unwrap(), 1);
        assert_eq!(count_dw_configs(2).unwrap(), 2);
        assert_eq!(count_dw_configs(3).unwrap(), 7);
        assert_eq!(count_dw_configs(4).unwrap(), 42);
        assert_eq!(count_dw_configs(5).unwrap(), 429);
        assert!(count_dw_configs(6).is_err());
    }

    #[test]
    fn l1_is_single_c_vertex() {
        let ctx = BracketContext::trig(C64::new(0.83, 0.0));
        let p = ModelParams::new(
            ctx.clone(),
            vec![C64::new(0.4, 0.1)],
            vec![C64::new(-0.2, 0.0)],
            None,
            None,
        )
        .unwrap();
        let v = dwpf_enumerate(&p).unwrap();
        let c1 = ctx.bracket(C64::new(1.0, 0.0)).unwrap();
        assert!((v.value - c1).norm() < 1e-15);
    }

    #[test]
    fn size_limit_enforced() {
        let ctx = BracketContext::rational();
        let x: Vec<C64> = (0..5)
            .map(|k| C64::new(0.311 * k as f64 + 0.05, 0.0))
            .collect();
        let y: Vec<C64> = (0..5)
            .map(|k| C64::new(-0.23 * k as f64 - 1.3, 0.1))
            .collect();
        let p = ModelParams::new(ctx, x, y, None, None).unwrap();
        assert!(matches!(
            dwpf_enumerate(&p),
            Err(Error::SizeLimit { got: 5, .. })
        ));
    }
}

//! Branch points of the multiplier curve: zeros of the discriminant of
//! `det(Φ(T, 0, ρ) − μI)` as a function of `ρ`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::linalg::discriminant;

use super::{FloquetError, FloquetSystem};

/// Axis-aligned rectangle in the `ρ`-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchPoint {
    pub rho: Complex64,
    /// Winding number of the discriminant around the grid cell that produced the point.
    pub multiplicity: i32,
    /// Winding number around a small circle about the refined point.
    pub certificate: i32,
    pub residual: f64,
}

impl FloquetSystem {
    /// Discriminant of the characteristic polynomial of the monodromy at `ρ`
    /// (matrix exponential for constant coefficients, integration otherwise).
    pub fn monodromy_discriminant(&self, rho: Complex64, tol: f64) -> Result<Complex64, FloquetError> {
        let phi = if self.is_constant() { self.constant_monodromy(rho)?.phi } else { self.monodromy(rho, tol)?.phi };
        Ok(discriminant(&phi.char_poly()))
    }
}

/// Locates zeros of the discriminant in `region`: argument-principle winding on each of
/// `density × density` cells (edges subdivided for phase tracking), Newton refinement
/// with the detected multiplicity, and a winding certificate on a small circle.
pub fn branch_point_scan(
    sys: &FloquetSystem,
    region: Region,
    density: usize,
    tol: f64,
) -> Result<Vec<BranchPoint>, FloquetError> {
    if sys.n() == 1 || density == 0 {
        return Ok(Vec::new());
    }
    const SUB: usize = 6;
    let fine = density * SUB;
    let (x0, x1) = region.re;
    let (y0, y1) = region.im;
    let hx = (x1 - x0) / fine as f64;
    let hy = (y1 - y0) / fine as f64;
    let point = |i: usize, j: usize| Complex64::new(x0 + i as f64 * hx, y0 + j as f64 * hy);
    // discriminant on grid lines only: horizontal lines j ≡ 0 (mod SUB) and vertical
    // lines i ≡ 0 (mod SUB)
    let nodes: Vec<(usize, usize)> = (0..=fine)
        .flat_map(|i| (0..=fine).map(move |j| (i, j)))
        .filter(|(i, j)| i % SUB == 0 || j % SUB == 0)
        .collect();
    let values: Vec<Option<Complex64>> =
        nodes.par_iter().map(|&(i, j)| sys.monodromy_discriminant(point(i, j), tol).ok()).collect();
    let mut table = std::collections::HashMap::with_capacity(nodes.len());
    for (node, v) in nodes.iter().zip(values) {
        table.insert(*node, v);
    }
    let mut found: Vec<BranchPoint> = Vec::new();
    for ci in 0..density {
        for cj in 0..density {
            let mut path = Vec::with_capacity(4 * SUB + 1);
            let (i0, j0) = (ci * SUB, cj * SUB);
            for s in 0..SUB {
                path.push((i0 + s, j0));
            }
            for s in 0..SUB {
                path.push((i0 + SUB, j0 + s));
            }
            for s in 0..SUB {
                path.push((i0 + SUB - s, j0 + SUB));
            }
            for s in 0..SUB {
                path.push((i0, j0 + SUB - s));
            }
            let vals: Option<Vec<Complex64>> = path.iter().map(|n| table[n]).collect();
            let Some(vals) = vals else { continue };
            let pts: Vec<Complex64> = path.iter().map(|&(i, j)| point(i, j)).collect();
            let Some(winding) = tracked_winding(sys, &pts, &vals, tol) else { continue };
            if winding == 0 {
                continue;
            }
            let center = point(i0, j0) + Complex64::new(hx, hy) * (SUB as f64 / 2.0);
            let cell = (hx.abs() + hy.abs()) * SUB as f64;
            if let Some(bp) = refine(sys, center, winding, cell, tol) {
                if !found.iter().any(|p| (p.rho - bp.rho).norm() < 1e-6 * cell) {
                    found.push(bp);
                }
            }
        }
    }
    Ok(found)
}

/// Net number of turns of a closed polygon of values around the origin.
pub(crate) fn winding_number(vals: &[Complex64]) -> i32 {
    let n = vals.len();
    let total: f64 = (0..n).map(|k| (vals[(k + 1) % n] / vals[k]).arg()).sum();
    (total / TAU).round() as i32
}

/// Winding number of the discriminant along a closed polygon, bisecting any segment
/// whose phase increment is too large to be resolved.
fn tracked_winding(sys: &FloquetSystem, pts: &[Complex64], vals: &[Complex64], tol: f64) -> Option<i32> {
    let n = pts.len();
    let mut total = 0.0;
    for k in 0..n {
        let l = (k + 1) % n;
        total += segment_phase(sys, pts[k], pts[l], vals[k], vals[l], tol, 0)?;
    }
    Some((total / TAU).round() as i32)
}

fn segment_phase(
    sys: &FloquetSystem,
    z0: Complex64,
    z1: Complex64,
    f0: Complex64,
    f1: Complex64,
    tol: f64,
    depth: usize,
) -> Option<f64> {
    const MAX_DEPTH: usize = 16;
    let d = (f1 / f0).arg();
    if d.abs() < TAU / 8.0 || depth >= MAX_DEPTH {
        return Some(d);
    }
    let zm = (z0 + z1) * 0.5;
    let fm = sys.monodromy_discriminant(zm, tol).ok()?;
    Some(segment_phase(sys, z0, zm, f0, fm, tol, depth + 1)? + segment_phase(sys, zm, z1, fm, f1, tol, depth + 1)?)
}

fn refine(sys: &FloquetSystem, start: Complex64, mult: i32, cell: f64, tol: f64) -> Option<BranchPoint> {
    let disc = |z: Complex64| sys.monodromy_discriminant(z, tol).ok();
    let m = mult.unsigned_abs().max(1) as f64;
    let mut z = start;
    for _ in 0..60 {
        let h = 1e-6 * cell;
        let f = disc(z)?;
        if f.norm() == 0.0 {
            break;
        }
        let df = (disc(z + h)? - disc(z - h)?) / (2.0 * h);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df * m;
        // damp wild steps
        let step = if step.norm() > cell { step * (cell / step.norm()) } else { step };
        z -= step;
        if step.norm() <= 1e-13 * cell.max(z.norm()) {
            break;
        }
    }
    if (z - start).norm() > cell {
        return None;
    }
    let r = 1e-3 * cell;
    let circle: Option<Vec<Complex64>> =
        (0..64).map(|k| disc(z + Complex64::from_polar(r, TAU * k as f64 / 64.0))).collect();
    let certificate = winding_number(&circle?);
    Some(BranchPoint { rho: z, multiplicity: mult, certificate, residual: disc(z)?.norm() })
}

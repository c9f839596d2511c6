//! Discretised index of the second variation over radial fields.
//!
//! Cubic Hermite elements on `n` interior nodes of `[a, b]` (value and
//! `h`-scaled derivative per node, both clamped at the ends), per-element
//! Gauss–Legendre quadrature, and a cyclic Jacobi eigensolve.

use serde::Serialize;

use super::hessian::{bracket, check_biharmonic, coefficients, latitude_hessian, space_form_curvature};
use super::{jacobi_of, link_volume, symmetric_eigenvalues};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::integrate;
use crate::profiles::{EquivariantMap, MapRef};
use crate::tension::{check_interval, Tolerances};

pub const MIN_INDEX_GRID: usize = 16;
pub const INDEX_LABEL: &str = "index over radial variations";
const REPORTED_EIGENVALUES: usize = 10;
const ELEMENT_PANELS: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub label: &'static str,
    pub grid_size: usize,
    /// Smallest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    pub tol_index: f64,
    pub max_abs_entry: f64,
    /// `max |Qᵢⱼ − Qⱼᵢ|` before the eigensolve.
    pub symmetry_defect: f64,
}

/// Cubic Hermite shape functions on `t ∈ [0, 1]` with `d/dr`, `d²/dr²` for element width `h`.
fn shapes(t: f64, h: f64) -> [[f64; 3]; 4] {
    let (t2, t3) = (t * t, t * t * t);
    [
        [1.0 - 3.0 * t2 + 2.0 * t3, (-6.0 * t + 6.0 * t2) / h, (-6.0 + 12.0 * t) / (h * h)],
        [t - 2.0 * t2 + t3, (1.0 - 4.0 * t + 3.0 * t2) / h, (-4.0 + 6.0 * t) / (h * h)],
        [3.0 * t2 - 2.0 * t3, (6.0 * t - 6.0 * t2) / h, (6.0 - 12.0 * t) / (h * h)],
        [-t2 + t3, (-2.0 * t + 3.0 * t2) / h, (-2.0 + 6.0 * t) / (h * h)],
    ]
}

fn element_matrix(map: &EquivariantMap, c: f64, lo: f64, h: f64) -> Result<[f64; 16]> {
    integrate(
        |r| {
            let k = coefficients(map, r)?;
            let phi = shapes((r - lo) / h, h);
            let mut lphi = [0.0; 4];
            for (l, p) in lphi.iter_mut().zip(phi.iter()) {
                *l = jacobi_of(map, r, *p)?;
            }
            let mut out = [0.0; 16];
            for i in 0..4 {
                for j in 0..4 {
                    let br = bracket(&k, [phi[i][0], phi[i][1]], [phi[j][0], phi[j][1]]);
                    out[4 * i + j] = (lphi[i] * lphi[j] - c * (br[0] + br[1] + br[2] + br[3])) * k.weight;
                }
            }
            Ok(out)
        },
        lo,
        lo + h,
        ELEMENT_PANELS,
    )
}

fn summarize(matrix: &[f64], dim: usize, grid_size: usize, tol_index: Option<f64>) -> Result<IndexReport> {
    let max_abs_entry = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut symmetry_defect = 0.0f64;
    for i in 0..dim {
        for j in 0..i {
            symmetry_defect = symmetry_defect.max((matrix[i * dim + j] - matrix[j * dim + i]).abs());
        }
    }
    let tol_index = tol_index.unwrap_or(1e-6 * max_abs_entry);
    let all = symmetric_eigenvalues(matrix, dim)?;
    let negative_count = all.iter().filter(|&&l| l < -tol_index).count();
    Ok(IndexReport {
        label: INDEX_LABEL,
        grid_size,
        eigenvalues: all.into_iter().take(REPORTED_EIGENVALUES).collect(),
        negative_count,
        tol_index,
        max_abs_entry,
        symmetry_defect,
    })
}

/// Number of negative directions of the second variation over radial fields.
/// Latitude maps give the `1 × 1` form on constant fields.
pub fn stability_index(
    map: MapRef<'_>,
    a: f64,
    b: f64,
    n: usize,
    tol_index: Option<f64>,
    tol: &Tolerances,
) -> Result<IndexReport> {
    stability_index_with(map, a, b, n, tol_index, tol, Execution::default())
}

pub fn stability_index_with(
    map: MapRef<'_>,
    a: f64,
    b: f64,
    n: usize,
    tol_index: Option<f64>,
    tol: &Tolerances,
    exec: Execution,
) -> Result<IndexReport> {
    let map = match map {
        MapRef::Latitude(lat) => {
            let q = latitude_hessian(lat, 1.0, tol)?.value;
            return summarize(&[q], 1, 1, tol_index);
        }
        MapRef::Equivariant(map) => map,
    };
    if n < MIN_INDEX_GRID {
        return Err(Error::InvalidArgument(format!("index grid needs n >= {MIN_INDEX_GRID}, got {n}")));
    }
    let c = space_form_curvature(map)?;
    check_interval(map, a, b)?;
    check_biharmonic(map, a, b, tol)?;
    let h = (b - a) / (n + 1) as f64;
    let locals = exec.try_map_range(n + 1, |e| element_matrix(map, c, a + h * e as f64, h))?;
    let dim = 2 * n;
    let mut q = vec![0.0; dim * dim];
    // element e joins nodes e and e + 1; nodes 0 and n + 1 are clamped
    let dof = |e: usize, local: usize| -> Option<usize> {
        let node = e + local / 2;
        (1..=n).contains(&node).then(|| 2 * (node - 1) + local % 2)
    };
    for (e, local) in locals.iter().enumerate() {
        for i in 0..4 {
            let Some(gi) = dof(e, i) else { continue };
            for j in 0..4 {
                let Some(gj) = dof(e, j) else { continue };
                q[gi * dim + gj] += local[4 * i + j];
            }
        }
    }
    let vol = link_volume(map)?;
    q.iter_mut().for_each(|x| *x *= vol);
    summarize(&q, dim, n, tol_index)
}

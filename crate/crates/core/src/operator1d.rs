//! Second-order finite-difference assembly of 1D Schrödinger operators
//! -d²/ds² + V on intervals (Dirichlet/Neumann per side) and circles
//! (periodic). All operators are returned as symmetric tridiagonal matrices,
//! periodic ones with a single corner entry; Neumann rows are symmetrized by
//! an explicit diagonal similarity so eigenvalues are untouched.
//!
//! Grid convention: an interval [a,b] with m subintervals has nodes
//! a + i h, h = (b-a)/m; Dirichlet sides drop their boundary node, Neumann
//! sides keep it (mirror-ghost stencil, O(h²)). A circle of length L with n
//! nodes uses h = L/n.

use crate::deformation::DeformationProfile;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Per-side boundary conditions for an interval operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl BoundarySpec {
    pub const fn uniform(bc: BoundaryCondition) -> Self {
        BoundarySpec { left: bc, right: bc }
    }
    pub const DIRICHLET: Self = Self::uniform(BoundaryCondition::Dirichlet);
    pub const NEUMANN: Self = Self::uniform(BoundaryCondition::Neumann);
}

/// Geometric boundary condition per side: absolute gives functions Neumann
/// and one-forms Dirichlet, relative swaps the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometricBc {
    Absolute,
    Relative,
}

/// Assigns boundary conditions per cohomological degree from the geometric
/// condition on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBoundaryMap {
    pub left: GeometricBc,
    pub right: GeometricBc,
}

impl DegreeBoundaryMap {
    pub const fn uniform(bc: GeometricBc) -> Self {
        DegreeBoundaryMap { left: bc, right: bc }
    }
    pub const ABSOLUTE: Self = Self::uniform(GeometricBc::Absolute);
    pub const RELATIVE: Self = Self::uniform(GeometricBc::Relative);

    /// Boundary conditions for the degree-k Laplacian (k = 0 functions,
    /// k = 1 one-forms).
    pub fn spec(&self, degree: usize) -> BoundarySpec {
        let side = |g: GeometricBc| match (g, degree) {
            (GeometricBc::Absolute, 0) | (GeometricBc::Relative, 1) => BoundaryCondition::Neumann,
            _ => BoundaryCondition::Dirichlet,
        };
        BoundarySpec {
            left: side(self.left),
            right: side(self.right),
        }
    }
}

/// Symmetric tridiagonal (optionally periodic) discretization of
/// -d²/ds² + V in the similarity-symmetrized basis.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    /// Main diagonal, length n.
    pub diag: Vec<f64>,
    /// Sub/super diagonal, length n-1.
    pub offdiag: Vec<f64>,
    /// Periodic wrap entry A[0][n-1] (= A[n-1][0]) if the geometry is a circle.
    pub corner: Option<f64>,
    /// Grid spacing.
    pub h: f64,
    /// Node positions of the retained unknowns, length n.
    pub grid: Vec<f64>,
    /// Boundary conditions (None for circles).
    pub bc: Option<BoundarySpec>,
    /// Per-end factors mapping a symmetrized eigenvector component back to a
    /// nodal value: (left, right). sqrt(2) at a Neumann end, 1 otherwise.
    pub boundary_scale: (f64, f64),
}

impl DiscreteOperator {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.corner.is_some()
    }

    /// Interval operator on [a,b] with m subintervals and nodal potential V.
    pub fn assemble_interval(
        a: f64,
        b: f64,
        m: usize,
        potential: impl Fn(f64) -> f64,
        bc: BoundarySpec,
    ) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidInput(format!("empty interval [{a}, {b}]")));
        }
        if m < 3 {
            return Err(Error::InvalidInput(format!(
                "need at least 3 subintervals, got {m}"
            )));
        }
        let h = (b - a) / m as f64;
        let inv_h2 = 1.0 / (h * h);
        let keep_left = bc.left == BoundaryCondition::Neumann;
        let keep_right = bc.right == BoundaryCondition::Neumann;
        let i0 = if keep_left { 0 } else { 1 };
        let i1 = if keep_right { m } else { m - 1 };
        let n = i1 - i0 + 1;
        let mut diag = Vec::with_capacity(n);
        let mut grid = Vec::with_capacity(n);
        for i in i0..=i1 {
            let s = a + i as f64 * h;
            diag.push(2.0 * inv_h2 + potential(s));
            grid.push(s);
        }
        let mut offdiag = vec![-inv_h2; n - 1];
        // Mirror-ghost Neumann rows have off-diagonal -2/h²; the diagonal
        // similarity u_end -> u_end/sqrt(2) symmetrizes them to -sqrt(2)/h².
        if keep_left {
            offdiag[0] = -std::f64::consts::SQRT_2 * inv_h2;
        }
        if keep_right {
            offdiag[n - 2] = -std::f64::consts::SQRT_2 * inv_h2;
        }
        Ok(DiscreteOperator {
            diag,
            offdiag,
            corner: None,
            h,
            grid,
            bc: Some(bc),
            boundary_scale: (
                if keep_left { std::f64::consts::SQRT_2 } else { 1.0 },
                if keep_right { std::f64::consts::SQRT_2 } else { 1.0 },
            ),
        })
    }

    /// Periodic operator on a circle of length `length`, nodes a + i h,
    /// i = 0..n-1, h = length/n.
    pub fn assemble_circle(
        a: f64,
        length: f64,
        n: usize,
        potential: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidInput(format!("circle length {length}")));
        }
        if n < 3 {
            return Err(Error::InvalidInput(format!("need at least 3 nodes, got {n}")));
        }
        let h = length / n as f64;
        let inv_h2 = 1.0 / (h * h);
        let mut diag = Vec::with_capacity(n);
        let mut grid = Vec::with_capacity(n);
        for i in 0..n {
            let s = a + i as f64 * h;
            diag.push(2.0 * inv_h2 + potential(s));
            grid.push(s);
        }
        Ok(DiscreteOperator {
            diag,
            offdiag: vec![-inv_h2; n - 1],
            corner: Some(-inv_h2),
            h,
            grid,
            bc: None,
            boundary_scale: (1.0, 1.0),
        })
    }

    /// Deformed pair (Delta_0, Delta_1) for a profile: functions get
    /// V_- = |f'|² - f'', one-forms V_+ = |f'|² + f''. Interval profiles use
    /// the geometric boundary map; circle profiles ignore it.
    pub fn assemble_witten_pair(
        profile: &DeformationProfile,
        m: usize,
        bc_map: DegreeBoundaryMap,
    ) -> Result<(Self, Self)> {
        let (lo, hi) = profile.domain();
        let potential = |s: f64, sign: f64| {
            let (_, fp, fpp) = profile.eval(s).expect("in-domain");
            fp * fp + sign * fpp
        };
        if profile.is_periodic() {
            let len = hi - lo;
            Ok((
                Self::assemble_circle(lo, len, m, |s| potential(s, -1.0))?,
                Self::assemble_circle(lo, len, m, |s| potential(s, 1.0))?,
            ))
        } else {
            Ok((
                Self::assemble_interval(lo, hi, m, |s| potential(s, -1.0), bc_map.spec(0))?,
                Self::assemble_interval(lo, hi, m, |s| potential(s, 1.0), bc_map.spec(1))?,
            ))
        }
    }

    /// Matrix-vector product in the symmetrized basis.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(v.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            out[i] = self.diag[i] * v[i];
            if i > 0 {
                out[i] += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                out[i] += self.offdiag[i] * v[i + 1];
            }
        }
        if let Some(c) = self.corner {
            out[0] += c * v[n - 1];
            out[n - 1] += c * v[0];
        }
        out
    }

    /// Dense copy, for small-matrix cross-checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let mut a = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = self.diag[i];
        }
        for i in 0..n - 1 {
            a[(i, i + 1)] = self.offdiag[i];
            a[(i + 1, i)] = self.offdiag[i];
        }
        if let Some(c) = self.corner {
            a[(0, n - 1)] += c;
            a[(n - 1, 0)] += c;
        }
        a
    }

    /// Quadrature weights for the l²(h) inner product of nodal values
    /// (trapezoid on intervals: h/2 at retained boundary nodes).
    pub fn node_weights(&self) -> Vec<f64> {
        let n = self.n();
        let mut w = vec![self.h; n];
        if self.corner.is_none() {
            if self.boundary_scale.0 > 1.0 {
                w[0] = 0.5 * self.h;
            }
            if self.boundary_scale.1 > 1.0 {
                w[n - 1] = 0.5 * self.h;
            }
        }
        w
    }

    /// Convert a symmetrized-basis vector to nodal values (undo the Neumann
    /// end scaling).
    pub fn to_nodal(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        if let Some(first) = out.first_mut() {
            *first *= self.boundary_scale.0;
        }
        if let Some(last) = out.last_mut() {
            *last *= self.boundary_scale.1;
        }
        out
    }
}

//! Exact finite-dimensional engine: metrized cochain complexes, torsion via
//! singular values, the six-term gluing sequence of a cut circle, and the
//! discrete Witten complex with exact supersymmetry.
//!
//! This engine complements the finite-difference one: structural identities
//! (d^2 = 0, supersymmetric spectral pairing, exactness of comparison
//! sequences) hold here to rounding, not to discretization order.

use crate::deformation::DeformationProfile;
use crate::operator1d::GeometricBc;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// A cochain complex 0 -> C^0 -> ... -> C^m -> 0 with inner products.
#[derive(Debug, Clone, Serialize)]
pub struct MetrizedComplex {
    pub dims: Vec<usize>,
    /// differentials[k]: C^k -> C^{k+1} (dims[k+1] x dims[k]); the last
    /// degree has no outgoing differential.
    pub differentials: Vec<DMatrix<f64>>,
    /// Symmetric positive-definite Gram matrix per degree.
    pub grams: Vec<DMatrix<f64>>,
}

/// Cholesky factors L (gram = L L^T) per degree; basis change to
/// orthonormal coordinates is v-tilde = L^T v.
fn gram_factors(grams: &[DMatrix<f64>]) -> Result<Vec<nalgebra::Cholesky<f64, nalgebra::Dyn>>> {
    grams
        .iter()
        .enumerate()
        .map(|(k, g)| {
            nalgebra::Cholesky::new(g.clone()).ok_or_else(|| {
                Error::InvalidInput(format!("Gram matrix at degree {k} is not positive definite"))
            })
        })
        .collect()
}

struct LaplacianEigen {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl MetrizedComplex {
    /// Validate and build. `differentials.len() == dims.len() - 1` (or both
    /// empty); shapes must chain; d.d = 0 within 1e-12 * scale.
    pub fn new(
        dims: Vec<usize>,
        differentials: Vec<DMatrix<f64>>,
        grams: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        if dims.is_empty() || grams.len() != dims.len() {
            return Err(Error::InvalidInput(
                "need one Gram matrix per degree".into(),
            ));
        }
        if differentials.len() + 1 != dims.len() {
            return Err(Error::InvalidInput(format!(
                "{} differentials cannot chain {} degrees",
                differentials.len(),
                dims.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.nrows() != dims[k + 1] || d.ncols() != dims[k] {
                return Err(Error::InvalidInput(format!(
                    "differential {k} is {}x{}, expected {}x{}",
                    d.nrows(),
                    d.ncols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        for (k, g) in grams.iter().enumerate() {
            if g.nrows() != dims[k] || g.ncols() != dims[k] {
                return Err(Error::InvalidInput(format!(
                    "Gram {k} has the wrong shape for dimension {}",
                    dims[k]
                )));
            }
        }
        let scale = differentials
            .iter()
            .map(|d| d.norm())
            .fold(1.0f64, f64::max);
        for w in differentials.windows(2) {
            let dd = &w[1] * &w[0];
            let n = dd.norm();
            if n > 1e-12 * scale * scale.max(1.0) {
                return Err(Error::NotAComplex(n));
            }
        }
        gram_factors(&grams)?;
        Ok(MetrizedComplex {
            dims,
            differentials,
            grams,
        })
    }

    /// Differentials rewritten in Gram-orthonormal coordinates:
    /// d-tilde_k = L_{k+1}^T d_k L_k^{-T}.
    fn orthonormal_differentials(&self) -> Vec<DMatrix<f64>> {
        let chol = gram_factors(&self.grams).expect("validated at construction");
        self.differentials
            .iter()
            .enumerate()
            .map(|(k, d)| {
                // Solve X L_k^T = d  <=>  L_k X^T = d^T.
                let xt = chol[k].l().solve_lower_triangular(&d.transpose()).unwrap();
                chol[k + 1].l().transpose() * xt.transpose()
            })
            .collect()
    }

    /// Hodge Laplacian eigen-decompositions per degree (in orthonormal
    /// coordinates): Delta_k = d_k^T d_k + d_{k-1} d_{k-1}^T.
    fn laplacian_eigens(&self) -> Vec<LaplacianEigen> {
        let dt = self.orthonormal_differentials();
        (0..self.dims.len())
            .map(|k| {
                if self.dims[k] == 0 {
                    return LaplacianEigen {
                        eigenvalues: DVector::zeros(0),
                        eigenvectors: DMatrix::zeros(0, 0),
                    };
                }
                let mut lap = DMatrix::zeros(self.dims[k], self.dims[k]);
                if k < dt.len() {
                    lap += dt[k].transpose() * &dt[k];
                }
                if k > 0 {
                    lap += &dt[k - 1] * dt[k - 1].transpose();
                }
                let eig = lap.clone().symmetric_eigen();
                // nalgebra's QR deflation can hand back eigenvalues whose
                // order does not match the eigenvector columns (observed on
                // Witten-complex Laplacians with a wide dynamic range), so
                // relabel every column by its Rayleigh quotient.
                let mut eigenvalues = DVector::zeros(self.dims[k]);
                for j in 0..self.dims[k] {
                    let v = eig.eigenvectors.column(j);
                    eigenvalues[j] = (v.transpose() * &lap * v)[(0, 0)];
                }
                LaplacianEigen {
                    eigenvalues,
                    eigenvectors: eig.eigenvectors,
                }
            })
            .collect()
    }

    /// Per-degree cohomology: (dimension, Gram-orthonormal harmonic basis as
    /// matrix columns in the original coordinates).
    pub fn cohomology(&self) -> Result<Vec<(usize, DMatrix<f64>)>> {
        let chol = gram_factors(&self.grams)?;
        let eigens = self.laplacian_eigens();
        let mut out = Vec::with_capacity(self.dims.len());
        for (k, eig) in eigens.iter().enumerate() {
            let scale = eig.eigenvalues.iter().cloned().fold(1.0f64, f64::max);
            let kernel_idx: Vec<usize> = (0..self.dims[k])
                .filter(|&j| eig.eigenvalues[j] <= 1e-10 * scale)
                .collect();
            let mut basis = DMatrix::zeros(self.dims[k], kernel_idx.len());
            for (c, &j) in kernel_idx.iter().enumerate() {
                // Back to original coordinates: v = L^{-T} v-tilde, which is
                // Gram-orthonormal since the v-tilde are orthonormal.
                let vt = eig.eigenvectors.column(j).into_owned();
                let v = chol[k]
                    .l()
                    .transpose()
                    .solve_upper_triangular(&vt)
                    .unwrap();
                basis.set_column(c, &v);
            }
            out.push((kernel_idx.len(), basis));
        }
        Ok(out)
    }

    /// log tau = (1/2) sum_k (-1)^k k log det'(Delta_k), det' over the
    /// nonzero spectrum of the Gram-adjoint Laplacian.
    pub fn torsion(&self) -> Result<f64> {
        let eigens = self.laplacian_eigens();
        let mut log_tau = 0.0;
        for (k, eig) in eigens.iter().enumerate() {
            let scale = eig.eigenvalues.iter().cloned().fold(1.0f64, f64::max);
            let logdet: f64 = eig
                .eigenvalues
                .iter()
                .filter(|&&l| l > 1e-10 * scale)
                .map(|&l| l.ln())
                .sum();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            log_tau += 0.5 * sign * k as f64 * logdet;
        }
        Ok(log_tau)
    }
}

/// The six-term gluing sequence of a circle of length `l` cut into arcs of
/// lengths `l1` (kept with absolute conditions) and `l2` (relative), read as
/// an acyclic complex with degree 0 at the relative arc's H^0:
///   0 -> H0_rel(M2) -> H0(S^1) -> H0_abs(M1)
///     -> H1_rel(M2) -> H1(S^1) -> H1_abs(M1) -> 0.
/// Entries are 1x1 in the harmonic generators (1 on components, ds on
/// one-forms), with L^2 Gram norms ||1_X||^2 = length(X), ||ds_X||^2 =
/// length(X). Restriction sends 1 to 1; the connecting map vanishes (a
/// cutoff extension of the constant has zero net derivative across the
/// arc); extension-by-zero of ds_{M2} represents (l2/l) ds_{S^1}.
pub fn mv_complex(l: f64, l1: f64) -> Result<MetrizedComplex> {
    let l2 = l - l1;
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "degenerate arcs: {l1} + {l2} must split length {l}"
        )));
    }
    let dims = vec![0, 1, 1, 1, 1, 0];
    let differentials = vec![
        DMatrix::zeros(1, 0),
        DMatrix::from_element(1, 1, 1.0),
        DMatrix::from_element(1, 1, 0.0),
        DMatrix::from_element(1, 1, l2 / l),
        DMatrix::zeros(0, 1),
    ];
    let grams = vec![
        DMatrix::zeros(0, 0),
        DMatrix::from_element(1, 1, l),
        DMatrix::from_element(1, 1, l1),
        DMatrix::from_element(1, 1, l2),
        DMatrix::from_element(1, 1, l),
        DMatrix::zeros(0, 0),
    ];
    MetrizedComplex::new(dims, differentials, grams)
}

/// Underlying graph of a discrete Witten complex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DiscreteGeometry {
    /// n vertices, n edges, positions j * (length/n) from `origin`.
    Cycle { n: usize, length: f64, origin: f64 },
    /// n edges, n+1 vertices on [a, b]; relative ends drop the boundary
    /// vertex from C^0, absolute ends impose nothing.
    Path {
        n: usize,
        a: f64,
        b: f64,
        left: GeometricBc,
        right: GeometricBc,
    },
}

/// Vertex/edge cochain complex of a 1D geometry with the Witten-twisted
/// differential d_T = e^{-f} o d o e^{f} (midpoint-twisted), or equivalently
/// the plain differential with e^{-2f}-weighted Grams.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteWittenComplex {
    pub geometry: DiscreteGeometry,
    /// f at the vertices (all of them, including relative-condition ones).
    pub f_vertices: Vec<f64>,
    /// f at the edge midpoints.
    pub f_midpoints: Vec<f64>,
    pub h: f64,
    /// Twisted formulation (plain h-Grams) vs weighted formulation (plain
    /// d, Grams scaled by e^{-2(f - offset)}).
    pub twisted: bool,
    /// Plateau value subtracted from f inside the weighted Grams so their
    /// entries stay representable; e^{f} overflows near T ~ 1400.
    pub f_offset: f64,
    pub rescaled: bool,
}

/// Build the discrete Witten complex of a profile sampled on `geometry`.
/// The grid must lie inside the profile's domain (the cycle geometry wraps).
pub fn discrete_witten(
    geometry: DiscreteGeometry,
    profile: &DeformationProfile,
    twisted: bool,
) -> Result<DiscreteWittenComplex> {
    let (n_edges, h, positions): (usize, f64, Vec<f64>) = match geometry {
        DiscreteGeometry::Cycle { n, length, origin } => {
            if n < 8 {
                return Err(Error::InvalidInput(format!("cycle needs n >= 8, got {n}")));
            }
            let h = length / n as f64;
            (n, h, (0..n).map(|j| origin + j as f64 * h).collect())
        }
        DiscreteGeometry::Path { n, a, b, .. } => {
            if n < 8 {
                return Err(Error::InvalidInput(format!("path needs n >= 8, got {n}")));
            }
            if !(b > a) {
                return Err(Error::InvalidInput(format!("empty path [{a}, {b}]")));
            }
            let h = (b - a) / n as f64;
            (n, h, (0..=n).map(|j| a + j as f64 * h).collect())
        }
    };
    let f_vertices: Vec<f64> = positions
        .iter()
        .map(|&s| profile.eval(s).map(|v| v.0))
        .collect::<Result<_>>()?;
    let f_midpoints: Vec<f64> = (0..n_edges)
        .map(|j| {
            let s = match geometry {
                DiscreteGeometry::Cycle { .. } => positions[j] + 0.5 * h,
                DiscreteGeometry::Path { .. } => 0.5 * (positions[j] + positions[j + 1]),
            };
            profile.eval(s).map(|v| v.0)
        })
        .collect::<Result<_>>()?;
    let f_max = f_vertices.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rescaled = f_max > 300.0;
    Ok(DiscreteWittenComplex {
        geometry,
        f_vertices,
        f_midpoints,
        h,
        twisted,
        f_offset: if rescaled { f_max } else { 0.0 },
        rescaled,
    })
}

impl DiscreteWittenComplex {
    fn vertex_count(&self) -> usize {
        match self.geometry {
            DiscreteGeometry::Cycle { n, .. } => n,
            DiscreteGeometry::Path { n, .. } => n + 1,
        }
    }

    /// Indices of vertices that carry degrees of freedom (relative ends are
    /// constrained to zero and dropped).
    fn free_vertices(&self) -> Vec<usize> {
        match self.geometry {
            DiscreteGeometry::Cycle { n, .. } => (0..n).collect(),
            DiscreteGeometry::Path { n, left, right, .. } => (0..=n)
                .filter(|&j| {
                    !(j == 0 && left == GeometricBc::Relative
                        || j == n && right == GeometricBc::Relative)
                })
                .collect(),
        }
    }

    /// The complex as a MetrizedComplex (two degrees). In the twisted
    /// formulation d acts on edge (j, j+1) as
    ///   e^{-f-bar} (e^{f_{j+1}} u_{j+1} - e^{f_j} u_j) / h
    /// with f-bar the midpoint value, and the Grams are plain h-weights.
    /// In the weighted formulation d is the plain difference quotient and
    /// the Grams carry e^{-2(f - offset)}.
    pub fn complex(&self) -> Result<MetrizedComplex> {
        let free = self.free_vertices();
        let nv = free.len();
        let n_edges = self.f_midpoints.len();
        let total_v = self.vertex_count();
        let col_of: Vec<Option<usize>> = {
            let mut map = vec![None; total_v];
            for (c, &j) in free.iter().enumerate() {
                map[j] = Some(c);
            }
            map
        };
        let mut d = DMatrix::zeros(n_edges, nv);
        for e in 0..n_edges {
            let (j0, j1) = match self.geometry {
                DiscreteGeometry::Cycle { n, .. } => (e, (e + 1) % n),
                DiscreteGeometry::Path { .. } => (e, e + 1),
            };
            let (w0, w1) = if self.twisted {
                let fb = self.f_midpoints[e];
                (
                    (self.f_vertices[j0] - fb).exp(),
                    (self.f_vertices[j1] - fb).exp(),
                )
            } else {
                (1.0, 1.0)
            };
            if let Some(c) = col_of[j0] {
                d[(e, c)] = -w0 / self.h;
            }
            if let Some(c) = col_of[j1] {
                d[(e, c)] = w1 / self.h;
            }
        }
        let (g0_diag, g1_diag): (Vec<f64>, Vec<f64>) = if self.twisted {
            (vec![self.h; nv], vec![self.h; n_edges])
        } else {
            (
                free.iter()
                    .map(|&j| self.h * (-2.0 * (self.f_vertices[j] - self.f_offset)).exp())
                    .collect(),
                self.f_midpoints
                    .iter()
                    .map(|&fb| self.h * (-2.0 * (fb - self.f_offset)).exp())
                    .collect(),
            )
        };
        MetrizedComplex::new(
            vec![nv, n_edges],
            vec![d],
            vec![
                DMatrix::from_diagonal(&DVector::from_vec(g0_diag)),
                DMatrix::from_diagonal(&DVector::from_vec(g1_diag)),
            ],
        )
    }

    /// Sorted Laplacian spectra (degree 0, degree 1). Supersymmetry makes
    /// the nonzero parts identical to rounding.
    pub fn spectra(&self) -> Result<[Vec<f64>; 2]> {
        let eigs = self.complex()?.laplacian_eigens();
        let mut out: [Vec<f64>; 2] = [
            eigs[0].eigenvalues.iter().cloned().collect(),
            eigs[1].eigenvalues.iter().cloned().collect(),
        ];
        for v in &mut out {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        Ok(out)
    }

    /// Tr e^{-t Delta_0} - Tr e^{-t Delta_1}: equals the Euler
    /// characteristic exactly (supersymmetric pairing of nonzero modes).
    pub fn supertrace(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidInput(format!(
                "heat time must be > 0, got {t}"
            )));
        }
        let [s0, s1] = self.spectra()?;
        let tr = |s: &[f64]| s.iter().map(|&l| (-t * l.max(0.0)).exp()).sum::<f64>();
        Ok(tr(&s0) - tr(&s1))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.free_vertices().len() as i64 - self.f_midpoints.len() as i64
    }
}

/// Orthogonal projector data onto the span of eigenvectors with eigenvalue
/// at most the threshold.
#[derive(Debug, Clone)]
pub struct SmallSpectrumProjector {
    pub degree: usize,
    pub threshold: f64,
    /// Gram-orthonormal columns in the complex's original coordinates.
    pub basis: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
}

/// Small-spectrum projectors per degree. The threshold must be separated
/// from the spectrum by a 1e-6 relative gap.
pub fn small_projector(
    complex: &DiscreteWittenComplex,
    delta: f64,
) -> Result<Vec<SmallSpectrumProjector>> {
    let mc = complex.complex()?;
    let chol = gram_factors(&mc.grams)?;
    let eigens = mc.laplacian_eigens();
    let mut out = Vec::with_capacity(eigens.len());
    for (k, eig) in eigens.iter().enumerate() {
        for &l in eig.eigenvalues.iter() {
            if (l - delta).abs() <= 1e-6 * (1.0 + l.abs() + delta.abs()) {
                return Err(Error::ThresholdInCluster { delta, nearest: l });
            }
        }
        let idx: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&j| eig.eigenvalues[j] <= delta)
            .collect();
        let mut basis = DMatrix::zeros(mc.dims[k], idx.len());
        let mut eigenvalues = Vec::with_capacity(idx.len());
        // Sort retained modes by eigenvalue for reproducibility.
        let mut sorted = idx.clone();
        sorted.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        for (c, &j) in sorted.iter().enumerate() {
            let vt = eig.eigenvectors.column(j).into_owned();
            let v = chol[k].l().transpose().solve_upper_triangular(&vt).unwrap();
            basis.set_column(c, &v);
            eigenvalues.push(eig.eigenvalues[j]);
        }
        out.push(SmallSpectrumProjector {
            degree: k,
            threshold: delta,
            basis,
            eigenvalues,
        });
    }
    Ok(out)
}

/// Comparison data between a glued cycle complex and its two arc pieces.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonMaps {
    /// Per degree: small-projected extension-by-zero on the relative
    /// piece's harmonics, in (small basis) x (piece harmonic basis) shape.
    pub e_tilde: Vec<DMatrix<f64>>,
    /// Per degree: absolute piece's harmonic projection of restriction,
    /// (piece harmonic basis) x (small basis).
    pub r_tilde: Vec<DMatrix<f64>>,
    /// Per degree: max |sigma - 1| over singular values of e-tilde
    /// (almost-isometry defect of the embedding).
    pub embedding_defect: Vec<f64>,
    /// Per degree: max |sigma - 1| of r-tilde restricted to the orthogonal
    /// complement of the e-tilde image.
    pub restriction_defect: Vec<f64>,
    /// Per degree: operator norm of r-tilde . e-tilde (exactness of the
    /// comparison sequence).
    pub composite_norm: Vec<f64>,
}

fn gram_inner(g: &DMatrix<f64>, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.transpose() * g * b
}

/// Compare the small-eigenvalue spaces of a glued cycle with the cohomology
/// of its pieces: the relative piece embeds by small-projected
/// extension-by-zero, the absolute piece receives the restriction. Vertices
/// of the pieces must be grid-aligned with the cycle.
pub fn comparison_maps(
    glued: &DiscreteWittenComplex,
    piece_abs: &DiscreteWittenComplex,
    piece_rel: &DiscreteWittenComplex,
    delta: f64,
) -> Result<ComparisonMaps> {
    let DiscreteGeometry::Cycle { n, length, origin } = glued.geometry else {
        return Err(Error::InvalidInput("glued geometry must be a cycle".into()));
    };
    let h = glued.h;
    let small = small_projector(glued, delta)?;
    let glued_mc = glued.complex()?;
    // Node index of a position on the cycle.
    let node_of = |s: f64| -> Result<usize> {
        let x = (s - origin).rem_euclid(length) / h;
        let j = x.round() as usize % n;
        if (x - x.round()).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "piece vertex at {s} is not grid-aligned with the cycle"
            )));
        }
        Ok(j)
    };
    let piece_span = |p: &DiscreteWittenComplex| -> Result<(Vec<usize>, Vec<usize>)> {
        let DiscreteGeometry::Path { n: np, a, .. } = p.geometry else {
            return Err(Error::InvalidInput("pieces must be paths".into()));
        };
        if (p.h - h).abs() > 1e-12 {
            return Err(Error::InvalidInput("piece grid spacing mismatch".into()));
        }
        let start = node_of(a)?;
        let verts: Vec<usize> = p
            .free_vertices()
            .into_iter()
            .map(|j| (start + j) % n)
            .collect();
        let edges: Vec<usize> = (0..np).map(|e| (start + e) % n).collect();
        Ok((verts, edges))
    };
    let (abs_verts, _abs_edges) = piece_span(piece_abs)?;
    let (rel_verts, rel_edges) = piece_span(piece_rel)?;

    // Piece sources are the small-eigenvalue subspaces at the same
    // threshold, not just exact kernels: away from the large-deformation
    // limit the pieces' near-harmonic modes have strictly positive
    // eigenvalues, and the glued small space is modeled on all of them.
    let h_abs = small_projector(piece_abs, delta)?;
    let h_rel = small_projector(piece_rel, delta)?;

    let mut e_tilde = Vec::new();
    let mut r_tilde = Vec::new();
    let mut embedding_defect = Vec::new();
    let mut restriction_defect = Vec::new();
    let mut composite_norm = Vec::new();
    for k in 0..2 {
        let sp = &small[k];
        let ns = sp.basis.ncols();
        // Extension-by-zero of the relative piece's harmonics into the
        // glued cochain space.
        let (rel_dim, rel_basis) = (h_rel[k].basis.ncols(), &h_rel[k].basis);
        let glued_dim = glued_mc.dims[k];
        let mut ext = DMatrix::zeros(glued_dim, rel_dim);
        for c in 0..rel_dim {
            for (row, val) in rel_basis.column(c).iter().enumerate() {
                // Degree 0 rows enumerate the piece's free (interior)
                // vertices; degree 1 rows its edges.
                let g_idx = if k == 0 { rel_verts[row] } else { rel_edges[row] };
                ext[(g_idx, c)] = *val;
            }
        }
        // e-tilde: coordinates of the small projection in the small basis.
        let et = gram_inner(&glued_mc.grams[k], &sp.basis, &ext);
        // Restriction of the small basis to the absolute piece, projected
        // on the piece's harmonics.
        let (abs_dim, abs_basis) = (h_abs[k].basis.ncols(), &h_abs[k].basis);
        let abs_mc = piece_abs.complex()?;
        let abs_free = piece_abs.free_vertices();
        let mut restricted = DMatrix::zeros(abs_mc.dims[k], ns);
        for c in 0..ns {
            for row in 0..abs_mc.dims[k] {
                let g_idx = if k == 0 {
                    abs_verts[abs_free[row]]
                } else {
                    _abs_edges[row]
                };
                restricted[(row, c)] = sp.basis[(g_idx, c)];
            }
        }
        let rt = gram_inner(&abs_mc.grams[k], abs_basis, &restricted);
        // Defects.
        let emb = if et.ncols() > 0 {
            if et.rank(1e-10) < et.ncols() {
                return Err(Error::RankDeficient {
                    rank: et.rank(1e-10),
                    expected: et.ncols(),
                });
            }
            et.clone()
                .svd(false, false)
                .singular_values
                .iter()
                .map(|&s| (s - 1.0).abs())
                .fold(0.0f64, f64::max)
        } else {
            0.0
        };
        // Complement of the embedding image inside the small space.
        let rest = if abs_dim > 0 {
            let rt_eff = if et.ncols() > 0 {
                // Project the small coordinates onto the orthogonal
                // complement of im(e-tilde) before measuring r-tilde.
                let q = et.clone().qr().q();
                &rt - (&rt * &q) * q.transpose()
            } else {
                rt.clone()
            };
            rt_eff
                .svd(false, false)
                .singular_values
                .iter()
                .map(|&s| (s - 1.0).abs())
                .fold(0.0f64, f64::max)
        } else {
            0.0
        };
        let comp = if et.ncols() > 0 && abs_dim > 0 {
            (&rt * &et).norm()
        } else {
            0.0
        };
        e_tilde.push(et);
        r_tilde.push(rt);
        embedding_defect.push(emb);
        restriction_defect.push(rest);
        composite_norm.push(comp);
    }
    Ok(ComparisonMaps {
        e_tilde,
        r_tilde,
        embedding_defect,
        restriction_defect,
        composite_norm,
    })
}

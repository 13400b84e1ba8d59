//! General tight-binding non-Hermitian Hamiltonians on small site networks:
//! construction, vertex deletion, cospectrality tests, and singlet-site
//! identification.
//!
//! Two sites are cospectral when their vertex-deleted subgraphs share a
//! characteristic polynomial. For a trimer this reduces to equal complex
//! onsite energies on the pair plus a product constraint on the couplings
//! to the third site; the couplings themselves may stay asymmetric.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{char_poly, ComplexMatrix, Polynomial};

/// Onsite data for one site: frequency `omega` plus gain/loss rate `gamma`,
/// combining into the complex energy `omega + i gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteSpec {
    pub omega: f64,
    pub gamma: f64,
}

impl SiteSpec {
    pub fn energy(&self) -> Complex64 {
        Complex64::new(self.omega, self.gamma)
    }
}

/// One directed coupling `g` from site `from` to site `to`; `g_ij` and
/// `g_ji` are independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub from: usize,
    pub to: usize,
    pub g: f64,
}

/// Tight-binding Hamiltonian: complex onsite energies on the diagonal and
/// real directed couplings off it. Site indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkHamiltonian {
    n: usize,
    sites: Vec<SiteSpec>,
    /// Row-major n x n coupling amplitudes; the diagonal is zero.
    couplings: Vec<f64>,
}

impl NetworkHamiltonian {
    pub fn site_count(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> &[SiteSpec] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> SiteSpec {
        self.sites[i]
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n + j]
    }

    /// Enumerate the nonzero directed couplings.
    pub fn coupling_list(&self) -> Vec<CouplingSpec> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let g = self.coupling(i, j);
                if i != j && g != 0.0 {
                    out.push(CouplingSpec { from: i, to: j, g });
                }
            }
        }
        out
    }

    /// Dense matrix form: entry (j, j) is `omega_j + i gamma_j`, entry
    /// (i, j) is `g_ij`.
    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, |i, j| {
            if i == j {
                self.sites[i].energy()
            } else {
                Complex64::new(self.coupling(i, j), 0.0)
            }
        })
    }

    /// Rescale couplings by a diagonal similarity `D H D^-1` with real
    /// positive weights; the spectrum is untouched.
    pub(crate) fn diagonal_similarity(&self, weights: &[f64]) -> NetworkHamiltonian {
        assert_eq!(weights.len(), self.n);
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.couplings[i * self.n + j] = self.coupling(i, j) * weights[i] / weights[j];
                }
            }
        }
        out
    }
}

/// Outcome of a cospectrality test between two vertex-deleted subgraphs.
#[derive(Debug, Clone)]
pub struct CospectralReport {
    pub pair: (usize, usize),
    pub poly_i: Polynomial,
    pub poly_j: Polynomial,
    /// Largest coefficient-wise deviation between the two (monic)
    /// characteristic polynomials.
    pub max_coeff_deviation: f64,
    pub cospectral: bool,
}

/// Condition breakdown for a trimer: equal complex onsite energies on the
/// pair (1, 2) and matching coupling products toward site 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrimerConditions {
    pub equal_onsite: bool,
    pub product_match: bool,
    pub latent_symmetric: bool,
}

/// Singlet sites for a cospectral pair, with any sites unreachable from
/// both pair members flagged separately.
#[derive(Debug, Clone, PartialEq)]
pub struct SingletReport {
    pub singlets: Vec<usize>,
    pub disconnected: Vec<usize>,
}

/// Assemble a Hamiltonian from per-site data and a directed coupling list.
/// Missing couplings are zero; duplicate ordered pairs and self-couplings
/// are rejected.
pub fn build_hamiltonian(
    sites: &[SiteSpec],
    couplings: &[CouplingSpec],
) -> Result<NetworkHamiltonian> {
    let n = sites.len();
    if n == 0 {
        return Err(Error::Input("network needs at least one site".into()));
    }
    for (k, s) in sites.iter().enumerate() {
        if !s.omega.is_finite() || !s.gamma.is_finite() {
            return Err(Error::Input(format!(
                "site {k} has non-finite onsite values"
            )));
        }
    }
    let mut grid = vec![0.0f64; n * n];
    let mut seen = vec![false; n * n];
    for cp in couplings {
        if cp.from >= n || cp.to >= n {
            return Err(Error::Input(format!(
                "coupling ({}, {}) is out of range for {} sites",
                cp.from, cp.to, n
            )));
        }
        if cp.from == cp.to {
            return Err(Error::Input(format!(
                "self-coupling on site {} is not allowed",
                cp.from
            )));
        }
        if !cp.g.is_finite() {
            return Err(Error::Input(format!(
                "coupling ({}, {}) is non-finite",
                cp.from, cp.to
            )));
        }
        let idx = cp.from * n + cp.to;
        if seen[idx] {
            return Err(Error::Input(format!(
                "duplicate coupling for ordered pair ({}, {})",
                cp.from, cp.to
            )));
        }
        seen[idx] = true;
        grid[idx] = cp.g;
    }
    Ok(NetworkHamiltonian {
        n,
        sites: sites.to_vec(),
        couplings: grid,
    })
}

/// Principal submatrix with row and column `i` removed; the ordering of the
/// surviving sites is preserved.
pub fn delete_vertex(h: &NetworkHamiltonian, i: usize) -> Result<NetworkHamiltonian> {
    let n = h.n;
    if n < 2 {
        return Err(Error::Input("cannot delete the only site".into()));
    }
    if i >= n {
        return Err(Error::Input(format!(
            "site index {i} out of range for {n} sites"
        )));
    }
    let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let sites: Vec<SiteSpec> = keep.iter().map(|&k| h.sites[k]).collect();
    let m = n - 1;
    let mut couplings = vec![0.0f64; m * m];
    for (a, &ka) in keep.iter().enumerate() {
        for (b, &kb) in keep.iter().enumerate() {
            couplings[a * m + b] = h.coupling(ka, kb);
        }
    }
    Ok(NetworkHamiltonian {
        n: m,
        sites,
        couplings,
    })
}

/// Compare the characteristic polynomials of the two vertex-deleted
/// subgraphs coefficient-wise. The verdict threshold is `tol` scaled by the
/// largest coefficient magnitude, floored at one.
pub fn is_cospectral(
    h: &NetworkHamiltonian,
    i: usize,
    j: usize,
    tol: f64,
) -> Result<CospectralReport> {
    if i == j {
        return Err(Error::Input(
            "cospectrality needs two distinct sites".into(),
        ));
    }
    let poly_i = char_poly(&delete_vertex(h, i)?.matrix())?;
    let poly_j = char_poly(&delete_vertex(h, j)?.matrix())?;
    let max_coeff_deviation = poly_i.max_coeff_deviation(&poly_j);
    let scale = poly_i
        .coeffs()
        .iter()
        .chain(poly_j.coeffs())
        .map(|c| c.norm())
        .fold(1.0f64, f64::max);
    let cospectral = max_coeff_deviation <= tol * scale;
    Ok(CospectralReport {
        pair: (i, j),
        poly_i,
        poly_j,
        max_coeff_deviation,
        cospectral,
    })
}

/// Check the closed-form trimer conditions for cospectrality of sites 0 and
/// 1: equal onsite energies and `g_02 g_20 = g_12 g_21`. Agrees with
/// [`is_cospectral`] on the pair (0, 1) wherever both verdicts are clear of
/// the tolerance band.
pub fn check_trimer_conditions(h: &NetworkHamiltonian, tol: f64) -> Result<TrimerConditions> {
    if h.n != 3 {
        return Err(Error::Input(format!(
            "trimer conditions need exactly 3 sites, got {}",
            h.n
        )));
    }
    let s0 = h.site(0);
    let s1 = h.site(1);
    let onsite_scale = 1.0f64.max(s0.energy().norm()).max(s1.energy().norm());
    let equal_onsite = (s0.omega - s1.omega).abs() <= tol * onsite_scale
        && (s0.gamma - s1.gamma).abs() <= tol * onsite_scale;

    let p0 = h.coupling(0, 2) * h.coupling(2, 0);
    let p1 = h.coupling(1, 2) * h.coupling(2, 1);
    let product_scale = 1.0f64.max(p0.abs()).max(p1.abs());
    let product_match = (p0 - p1).abs() <= tol * product_scale;

    Ok(TrimerConditions {
        equal_onsite,
        product_match,
        latent_symmetric: equal_onsite && product_match,
    })
}

/// Sites equidistant (graph metric on the undirected support graph) from
/// both members of a cospectral pair. A site with no finite distance to
/// either member is reported in `disconnected` instead.
///
/// The pair is assumed cospectral; this routine does not re-verify.
pub fn singlet_sites(h: &NetworkHamiltonian, pair: (usize, usize)) -> Result<SingletReport> {
    let (i, j) = pair;
    let n = h.n;
    if i >= n || j >= n {
        return Err(Error::Input("singlet pair index out of range".into()));
    }
    if i == j {
        return Err(Error::Input(
            "singlet pair must be two distinct sites".into(),
        ));
    }
    let di = bfs_distances(h, i);
    let dj = bfs_distances(h, j);
    let mut singlets = Vec::new();
    let mut disconnected = Vec::new();
    for k in 0..n {
        if k == i || k == j {
            continue;
        }
        match (di[k], dj[k]) {
            (Some(a), Some(b)) if a == b => singlets.push(k),
            (None, None) => disconnected.push(k),
            _ => {}
        }
    }
    Ok(SingletReport {
        singlets,
        disconnected,
    })
}

/// Breadth-first distances on the undirected support graph: an edge exists
/// whenever either directed coupling is nonzero.
#[allow(clippy::needless_range_loop)]
fn bfs_distances(h: &NetworkHamiltonian, start: usize) -> Vec<Option<usize>> {
    let n = h.n;
    let mut dist = vec![None; n];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for v in 0..n {
            if v != u && dist[v].is_none() && (h.coupling(u, v) != 0.0 || h.coupling(v, u) != 0.0) {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

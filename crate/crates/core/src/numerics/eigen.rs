use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::matrix::ComplexMatrix;
use crate::numerics::poly::{char_poly, poly_roots, DEFAULT_ROOT_TOL};

/// Roots closer than this (relative to max(1, |root|)) are treated as one
/// repeated eigenvalue. Exceptional-point detection needs a discrete
/// multiplicity decision; double roots computed in floating point split by
/// about sqrt(eps), well inside this band.
pub const CLUSTER_RELATIVE_TOL: f64 = 1e-7;

/// Eigenvector-matrix condition estimate above which the matrix is reported
/// defective even without a repeated-eigenvalue overlap hit.
pub const CONDITION_CAP: f64 = 1e12;

/// Eigenvalues and right eigenvectors of a dense complex matrix.
///
/// `defective` is set when a repeated eigenvalue fails to produce linearly
/// independent eigenvectors (pairwise overlap above `1 - tol`) or when the
/// eigenvector matrix condition estimate exceeds [`CONDITION_CAP`].
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues with multiplicity, sorted by (re, im); members of a
    /// repeated cluster are reported at the cluster value.
    pub eigenvalues: Vec<Complex64>,
    /// Unit right eigenvectors, one column per eigenvalue.
    pub right_eigenvectors: ComplexMatrix,
    pub defective: bool,
    /// `||V||_F ||V^-1||_F` for the eigenvector matrix V; infinite when V is
    /// numerically singular.
    pub eigenvector_condition: f64,
    /// Largest |<v_i|v_j>| overlap between eigenvectors of a repeated
    /// eigenvalue; `None` when the spectrum is simple.
    pub repeated_overlap: Option<f64>,
}

/// Minimal deterministic generator for inverse-iteration start vectors.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

fn unit_start(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = SplitMix64(0x5de2_1d11_u64.wrapping_add(seed.wrapping_mul(0x9e37)));
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.next_f64(), rng.next_f64()))
        .collect();
    normalize(v)
}

fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        for c in v.iter_mut() {
            *c /= norm;
        }
    }
    v
}

/// Fix the arbitrary global phase so the largest-magnitude component is
/// real and positive; keeps output deterministic and comparable.
fn phase_normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let (idx, _) = v
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
        .unwrap();
    let a = v[idx];
    if a.norm() > 0.0 {
        let phase = a / a.norm();
        for c in v.iter_mut() {
            *c /= phase;
        }
    }
    v
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Inverse iteration toward the null direction of `m - lambda I`, keeping
/// the iterate with the smallest residual. On a defective eigenvalue the
/// iteration alternates between the coalesced eigenvector and its Jordan
/// partner (the shifted system is consistent for the former), so blindly
/// returning the last iterate would be wrong half the time.
fn null_direction(m: &ComplexMatrix, lambda: Complex64, seed: u64) -> Vec<Complex64> {
    let n = m.dim();
    let mut shifted = m.clone();
    for i in 0..n {
        let v = shifted.get(i, i) - lambda;
        shifted.set(i, i, v);
    }
    let scale = shifted.one_norm().max(1.0);
    let floor = f64::EPSILON * scale * 1e-2;
    let residual_of = |v: &[Complex64]| -> f64 {
        shifted
            .mul_vec(v)
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    };

    let mut v = unit_start(n, seed);
    let mut best = v.clone();
    let mut best_res = residual_of(&v);
    for _ in 0..4 {
        let w = shifted.solve_vec_floored(&v, floor);
        let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        v = w.into_iter().map(|c| c / norm).collect();
        let res = residual_of(&v);
        if res < best_res {
            best_res = res;
            best = v.clone();
        }
        if res <= 10.0 * f64::EPSILON * scale {
            break;
        }
    }
    phase_normalize(best)
}

/// Rayleigh quotient `v^H M v` for a unit vector.
fn rayleigh(m: &ComplexMatrix, v: &[Complex64]) -> Complex64 {
    inner(v, &m.mul_vec(v))
}

/// Internal staging band: candidates this close share one inverse-iteration
/// center before the Rayleigh refinement settles the final multiplicity.
/// Wider than the reporting band because multiple roots of the polynomial
/// carry an eps^(1/multiplicity) noise ball.
const STAGING_RELATIVE_TOL: f64 = 1e-6;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1.0f64.max(a.norm()).max(b.norm())
}

/// Group values into transitive clusters of pairwise-close members,
/// returning index groups sorted deterministically.
fn cluster_indices(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .partial_cmp(&values[b].re)
            .unwrap()
            .then(values[a].im.partial_cmp(&values[b].im).unwrap())
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    'outer: for idx in order {
        for g in groups.iter_mut() {
            if g.iter().any(|&j| close(values[idx], values[j], tol)) {
                g.push(idx);
                continue 'outer;
            }
        }
        groups.push(vec![idx]);
    }
    groups
}

fn mean_of(values: &[Complex64], idxs: &[usize]) -> Complex64 {
    idxs.iter().map(|&i| values[i]).sum::<Complex64>() / (idxs.len() as f64)
}

/// Full spectral decomposition: eigenvalues from the characteristic
/// polynomial, right eigenvectors from inverse iteration, and a
/// defectiveness verdict for repeated eigenvalues.
///
/// A root of multiplicity m carries an O(eps^(1/m)) noise ball in the
/// polynomial route, so after a first clustering pass every candidate is
/// refined by a Rayleigh quotient and re-clustered; only clusters that the
/// refinement merged take the refined value, everything else keeps the
/// (more accurate) raw root.
///
/// `tol` controls the coalescence decision: a repeated eigenvalue whose
/// candidate eigenvectors overlap above `1 - tol` marks the matrix
/// defective.
pub fn eigen(m: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    let n = m.dim();
    let p = char_poly(m)?;
    let raw = poly_roots(&p, DEFAULT_ROOT_TOL)?;

    let first_pass = cluster_indices(&raw, STAGING_RELATIVE_TOL);
    let mut origin = vec![0usize; raw.len()];
    let mut refined = raw.clone();
    for (gi, group) in first_pass.iter().enumerate() {
        let center = mean_of(&raw, group);
        for (k, &idx) in group.iter().enumerate() {
            origin[idx] = gi;
            let v = null_direction(m, center, (gi * 131 + k) as u64);
            let rq = rayleigh(m, &v);
            if rq.is_finite() {
                refined[idx] = rq;
            }
        }
    }

    let second_pass = cluster_indices(&refined, CLUSTER_RELATIVE_TOL);
    // Final value per cluster: a simple eigenvalue keeps its raw root (the
    // most accurate number available); a repeated one is re-centered on the
    // Rayleigh quotients of its own eigenvectors, which sidesteps the
    // eps^(1/multiplicity) noise ball of the polynomial route entirely.
    let mut packs: Vec<(Complex64, Vec<Vec<Complex64>>)> = Vec::new();
    for (ci, group) in second_pass.iter().enumerate() {
        let mult = group.len();
        let single_origin = group.iter().all(|&i| origin[i] == origin[group[0]]);
        let provisional = if single_origin {
            mean_of(&raw, group)
        } else {
            mean_of(&refined, group)
        };
        let members: Vec<Vec<Complex64>> = (0..mult)
            .map(|k| null_direction(m, provisional, (7919 + ci * 97 + k) as u64))
            .collect();
        let lambda = if mult == 1 {
            provisional
        } else {
            let rqs: Vec<Complex64> = members.iter().map(|v| rayleigh(m, v)).collect();
            if rqs.iter().all(|r| r.is_finite()) {
                rqs.iter().sum::<Complex64>() / (mult as f64)
            } else {
                provisional
            }
        };
        packs.push((lambda, members));
    }
    packs.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut repeated_overlap: Option<f64> = None;
    for (lambda, members) in packs {
        let mult = members.len();
        if mult > 1 {
            for a in 0..mult {
                for b in (a + 1)..mult {
                    let ov = inner(&members[a], &members[b]).norm();
                    repeated_overlap = Some(repeated_overlap.map_or(ov, |x: f64| x.max(ov)));
                }
            }
        }
        for v in members {
            eigenvalues.push(lambda);
            vectors.push(v);
        }
    }

    let mut vmat = ComplexMatrix::zeros(n);
    for (j, v) in vectors.iter().enumerate() {
        for (i, &c) in v.iter().enumerate() {
            vmat.set(i, j, c);
        }
    }
    let eigenvector_condition = match vmat.inverse() {
        Ok(inv) => vmat.frobenius_norm() * inv.frobenius_norm(),
        Err(_) => f64::INFINITY,
    };

    let overlap_hit = repeated_overlap.is_some_and(|ov| ov > 1.0 - tol);
    let defective = overlap_hit || eigenvector_condition > CONDITION_CAP;

    Ok(SpectralDecomposition {
        eigenvalues,
        right_eigenvectors: vmat,
        defective,
        eigenvector_condition,
        repeated_overlap,
    })
}

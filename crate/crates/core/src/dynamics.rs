//! Numerical propagation of network states and extraction of local
//! occupations. Evolution goes through the matrix exponential, so defective
//! Hamiltonians (exceptional points) are handled without special casing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::NetworkHamiltonian;
use crate::numerics::expm;

/// State amplitudes over the sites of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        StateVector { amplitudes }
    }

    /// Basis vector |k> in an n-site network.
    pub fn site_basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::Input(format!(
                "site index {k} out of range for {n} sites"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        StateVector {
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        }
    }

    pub fn occupations(&self) -> Vec<f64> {
        occupations(self)
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|a| a.is_finite())
    }
}

/// Local occupations `P_j = |<j|psi>|^2`.
pub fn occupations(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// Uniform time grid with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::Input("time grid bounds must be finite".into()));
        }
        if t_end <= t_start {
            return Err(Error::Input("time grid needs t_end > t_start".into()));
        }
        if steps < 2 {
            return Err(Error::Input("time grid needs at least 2 steps".into()));
        }
        Ok(TimeGrid {
            t_start,
            t_end,
            steps,
        })
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = (self.t_end - self.t_start) / (self.steps - 1) as f64;
        (0..self.steps).map(move |k| self.t_start + dt * k as f64)
    }
}

/// One point of a trajectory: time, amplitudes, and occupations.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub t: f64,
    pub amplitudes: StateVector,
    pub occupations: Vec<f64>,
}

/// Evolve `psi0` to time `t` under `H`: `psi(t) = exp(-i H t) psi0`.
pub fn propagate(h: &NetworkHamiltonian, psi0: &StateVector, t: f64) -> Result<StateVector> {
    if psi0.dim() != h.site_count() {
        return Err(Error::Input(format!(
            "state dimension {} does not match network size {}",
            psi0.dim(),
            h.site_count()
        )));
    }
    if !psi0.is_finite() {
        return Err(Error::Input(
            "initial state has non-finite amplitudes".into(),
        ));
    }
    if !t.is_finite() {
        return Err(Error::Input("propagation time must be finite".into()));
    }
    let generator = h.matrix().scale(Complex64::new(0.0, -t));
    let propagator = expm(&generator).map_err(|e| match e {
        Error::Numeric(msg) => Error::Numeric(format!("{msg} (at t = {t})")),
        other => other,
    })?;
    let out = StateVector {
        amplitudes: propagator.mul_vec(psi0.amplitudes()),
    };
    if !out.is_finite() {
        return Err(Error::Numeric(format!(
            "propagation overflowed at t = {t}; amplitudes exceed representable range"
        )));
    }
    Ok(out)
}

/// Sample the evolution on a time grid. Every sample is computed with a
/// fresh exponential from t = 0 rather than by chaining steps, so error
/// does not accumulate along the trajectory. Amplifying runs that overflow
/// are reported with the largest time that still evaluated finitely.
pub fn trajectory(
    h: &NetworkHamiltonian,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<Vec<TrajectorySample>> {
    let mut out = Vec::with_capacity(grid.steps);
    let mut last_finite: Option<f64> = None;
    for t in grid.times() {
        let psi = propagate(h, psi0, t).map_err(|e| overflow_context(e, last_finite))?;
        let occ = psi.occupations();
        if occ.iter().any(|p| !p.is_finite()) {
            return Err(overflow_context(
                Error::Numeric(format!(
                    "occupations overflowed at t = {t}; amplitudes exceed representable range"
                )),
                last_finite,
            ));
        }
        last_finite = Some(t);
        out.push(TrajectorySample {
            t,
            amplitudes: psi,
            occupations: occ,
        });
    }
    Ok(out)
}

fn overflow_context(e: Error, last_finite: Option<f64>) -> Error {
    match (e, last_finite) {
        (Error::Numeric(msg), Some(t)) => {
            Error::Numeric(format!("{msg}; largest finite sample at t = {t}"))
        }
        (other, _) => other,
    }
}

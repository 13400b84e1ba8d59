//! The parametrized latent-symmetric trimer.
//!
//! Two sites share the complex onsite energy `Omega = omega + i gamma` and
//! couple to a third site with amplitudes deformed by a gauge parameter
//! `chi`; the deformation is a diagonal similarity and cannot move the
//! spectrum. The antisymmetric combination of the paired sites is an exact
//! eigenvector (the dark state) that never populates the third site, while
//! the symmetric combination spans an invariant two-dimensional bright
//! sector with an effective dimer block. Choosing `gamma3 = -gamma` and
//! `omega3 = omega + mu` makes that dimer PT-symmetric: its eigenvalues are
//! real for `|gamma| < sqrt(2) kappa` and coalesce at a second-order
//! exceptional point at the boundary.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::network::{build_hamiltonian, CouplingSpec, NetworkHamiltonian, SiteSpec};
use crate::numerics::{principal_sqrt, ComplexMatrix};

/// Width of the gamma band classified as the exceptional point. The
/// discriminant is quadratic in the distance to the critical point, so this
/// keeps divisions by `eta` safe on either side.
pub const EP_GAMMA_TOL: f64 = 1e-9;

/// Below this |eta| the oscillatory bright closed form is handed over to
/// the polynomial exceptional-point form.
const ETA_SINGULAR_TOL: f64 = 1e-9;

/// Parameters of the deformed trimer: paired sites with onsite
/// `omega + i gamma`, mutual coupling `mu > 0`, couplings `kappa > 0` to a
/// third site with onsite `omega3 + i gamma3`, and deformation `chi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrimerParams {
    pub omega: f64,
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
    pub chi: f64,
    pub omega3: f64,
    pub gamma3: f64,
}

impl TrimerParams {
    pub fn new(
        omega: f64,
        gamma: f64,
        mu: f64,
        kappa: f64,
        chi: f64,
        omega3: f64,
        gamma3: f64,
    ) -> Result<Self> {
        let p = TrimerParams {
            omega,
            gamma,
            mu,
            kappa,
            chi,
            omega3,
            gamma3,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega,
            self.gamma,
            self.mu,
            self.kappa,
            self.chi,
            self.omega3,
            self.gamma3,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("trimer parameters must be finite".into()));
        }
        if self.mu <= 0.0 {
            return Err(Error::Input(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if self.kappa <= 0.0 {
            return Err(Error::Input(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    /// Complex onsite energy of the paired sites.
    pub fn onsite_pair(&self) -> Complex64 {
        Complex64::new(self.omega, self.gamma)
    }

    /// Complex onsite energy of the singlet site.
    pub fn onsite_third(&self) -> Complex64 {
        Complex64::new(self.omega3, self.gamma3)
    }

    /// Critical gain/loss rate `sqrt(2) kappa`.
    pub fn gamma_c(&self) -> f64 {
        2.0f64.sqrt() * self.kappa
    }
}

/// Spectral phase of the trimer under the reality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "PT_UNBROKEN")]
    PtUnbroken,
    #[serde(rename = "EXCEPTIONAL_POINT")]
    ExceptionalPoint,
    #[serde(rename = "PT_BROKEN")]
    PtBroken,
    #[serde(rename = "NON_PT")]
    NonPt,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::PtUnbroken => "PT_UNBROKEN",
            Regime::ExceptionalPoint => "EXCEPTIONAL_POINT",
            Regime::PtBroken => "PT_BROKEN",
            Regime::NonPt => "NON_PT",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseClassification {
    pub regime: Regime,
    /// Critical rate `sqrt(2) kappa`, reported in every regime.
    pub gamma_c: f64,
    /// Bright-sector discriminant Delta.
    pub discriminant: Complex64,
}

/// Dark eigenpair plus the bright two-level block and its basis.
#[derive(Debug, Clone)]
pub struct SectorDecomposition {
    /// `e^chi |1> - e^{-chi} |2>`, unnormalized as written.
    pub dark_vector: StateVector,
    /// `Omega - mu`.
    pub dark_eigenvalue: Complex64,
    /// `(e^chi |1> + e^{-chi} |2>)/sqrt(2)`.
    pub bright_vector: StateVector,
    /// 2x2 block on span{|B>, |3>}.
    pub bright_block: ComplexMatrix,
    /// `(lambda_plus, lambda_minus)` with the principal-branch discriminant.
    pub bright_eigenvalues: (Complex64, Complex64),
}

/// Evaluators for the bright-sector closed form.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormCoefficients {
    /// Half the discriminant.
    pub eta: Complex64,
    /// Half the diagonal mismatch `(Omega + mu - Omega3)/2`.
    pub delta: Complex64,
    /// Mean of the bright diagonal `(Omega + mu + Omega3)/2`; the evolved
    /// state carries the prefactor `exp(-i * mean * t)`.
    pub mean: Complex64,
    kappa: f64,
}

impl ClosedFormCoefficients {
    pub fn from_params(p: &TrimerParams) -> Result<Self> {
        p.validate()?;
        let omega_pair = p.onsite_pair();
        let omega_third = p.onsite_third();
        let mismatch = omega_pair + p.mu - omega_third;
        let disc = principal_sqrt(mismatch * mismatch + 8.0 * p.kappa * p.kappa);
        Ok(ClosedFormCoefficients {
            eta: disc / 2.0,
            delta: mismatch / 2.0,
            mean: (omega_pair + p.mu + omega_third) / 2.0,
            kappa: p.kappa,
        })
    }

    /// `cos(eta t) - (i delta / eta) sin(eta t)`; complex cos/sin extend the
    /// formula through the broken phase.
    pub fn alpha(&self, t: f64) -> Complex64 {
        let arg = self.eta * t;
        arg.cos() - Complex64::i() * self.delta / self.eta * arg.sin()
    }

    /// `-i sqrt(2) kappa sin(eta t) / eta`.
    pub fn beta(&self, t: f64) -> Complex64 {
        let arg = self.eta * t;
        -Complex64::i() * 2.0f64.sqrt() * self.kappa * arg.sin() / self.eta
    }
}

/// Bright-sector closed-form snapshot at one time.
#[derive(Debug, Clone, Copy)]
pub struct BrightClosedForm {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub occupations: [f64; 3],
}

/// The deformed trimer Hamiltonian: diagonal `(Omega, Omega, Omega3)`,
/// pair couplings `mu e^{+-2 chi}`, and third-site couplings
/// `kappa e^{+- chi}` arranged so the deformation is a pure gauge.
pub fn build_trimer(p: &TrimerParams) -> Result<NetworkHamiltonian> {
    p.validate()?;
    let sites = [
        SiteSpec {
            omega: p.omega,
            gamma: p.gamma,
        },
        SiteSpec {
            omega: p.omega,
            gamma: p.gamma,
        },
        SiteSpec {
            omega: p.omega3,
            gamma: p.gamma3,
        },
    ];
    let couplings = [
        CouplingSpec {
            from: 0,
            to: 1,
            g: p.mu * (2.0 * p.chi).exp(),
        },
        CouplingSpec {
            from: 1,
            to: 0,
            g: p.mu * (-2.0 * p.chi).exp(),
        },
        CouplingSpec {
            from: 0,
            to: 2,
            g: p.kappa * p.chi.exp(),
        },
        CouplingSpec {
            from: 2,
            to: 0,
            g: p.kappa * (-p.chi).exp(),
        },
        CouplingSpec {
            from: 1,
            to: 2,
            g: p.kappa * (-p.chi).exp(),
        },
        CouplingSpec {
            from: 2,
            to: 1,
            g: p.kappa * p.chi.exp(),
        },
    ];
    build_hamiltonian(&sites, &couplings)
}

/// Apply the diagonal similarity `D H D^-1` with
/// `D = diag(e^chi, e^{-chi}, 1)`; the eigenvalue multiset is preserved.
pub fn gauge_transform(h: &NetworkHamiltonian, chi: f64) -> Result<NetworkHamiltonian> {
    if h.site_count() != 3 {
        return Err(Error::Input(format!(
            "gauge transform is defined for 3 sites, got {}",
            h.site_count()
        )));
    }
    if !chi.is_finite() {
        return Err(Error::Input("chi must be finite".into()));
    }
    Ok(h.diagonal_similarity(&[chi.exp(), (-chi).exp(), 1.0]))
}

/// Split the trimer into its dark eigenpair and bright two-level block.
pub fn decompose(p: &TrimerParams) -> Result<SectorDecomposition> {
    p.validate()?;
    let omega_pair = p.onsite_pair();
    let omega_third = p.onsite_third();
    let ep = p.chi.exp();
    let em = (-p.chi).exp();
    let sqrt2 = 2.0f64.sqrt();

    let dark_vector = StateVector::from_amplitudes(vec![
        Complex64::new(ep, 0.0),
        Complex64::new(-em, 0.0),
        Complex64::new(0.0, 0.0),
    ]);
    let bright_vector = StateVector::from_amplitudes(vec![
        Complex64::new(ep / sqrt2, 0.0),
        Complex64::new(em / sqrt2, 0.0),
        Complex64::new(0.0, 0.0),
    ]);
    let coupling = Complex64::new(sqrt2 * p.kappa, 0.0);
    let bright_block = ComplexMatrix::from_rows(&[
        vec![omega_pair + p.mu, coupling],
        vec![coupling, omega_third],
    ])?;
    let cf = ClosedFormCoefficients::from_params(p)?;
    let half_trace = cf.mean;
    let lambda_plus = half_trace + cf.eta;
    let lambda_minus = half_trace - cf.eta;

    Ok(SectorDecomposition {
        dark_vector,
        dark_eigenvalue: omega_pair - p.mu,
        bright_vector,
        bright_block,
        bright_eigenvalues: (lambda_plus, lambda_minus),
    })
}

/// Dark state `e^chi |1> - e^{-chi} |2>` for the given deformation.
pub fn dark_state(p: &TrimerParams) -> Result<StateVector> {
    Ok(decompose(p)?.dark_vector)
}

/// Bright state `(e^chi |1> + e^{-chi} |2>)/sqrt(2)`.
pub fn bright_state(p: &TrimerParams) -> Result<StateVector> {
    Ok(decompose(p)?.bright_vector)
}

/// Overwrite the singlet-site onsite values with the reality conditions
/// `gamma3 = -gamma` and `omega3 = omega + mu`, which turn the bright block
/// into a PT-symmetric dimer.
pub fn apply_reality_conditions(p: &TrimerParams) -> TrimerParams {
    TrimerParams {
        gamma3: -p.gamma,
        omega3: p.omega + p.mu,
        ..*p
    }
}

/// Whether the reality conditions hold to within `tol`.
fn reality_conditions_hold(p: &TrimerParams, tol: f64) -> bool {
    (p.gamma3 + p.gamma).abs() <= tol && (p.omega3 - p.omega - p.mu).abs() <= tol
}

/// Classify the spectral phase: `NON_PT` when the reality conditions fail
/// beyond `tol`, otherwise by the position of `|gamma|` relative to the
/// critical rate with an EP band of width `tol`.
pub fn classify_phase(p: &TrimerParams, tol: f64) -> Result<PhaseClassification> {
    p.validate()?;
    let cf = ClosedFormCoefficients::from_params(p)?;
    let gamma_c = p.gamma_c();
    let regime = if !reality_conditions_hold(p, tol) {
        Regime::NonPt
    } else if (p.gamma.abs() - gamma_c).abs() <= tol {
        Regime::ExceptionalPoint
    } else if p.gamma.abs() < gamma_c {
        Regime::PtUnbroken
    } else {
        Regime::PtBroken
    };
    Ok(PhaseClassification {
        regime,
        gamma_c,
        discriminant: cf.eta * 2.0,
    })
}

/// Occupations for a dark initial state: `P1 = e^{2 gamma t} e^{2 chi}`,
/// `P2 = e^{2 gamma t} e^{-2 chi}`, and `P3 = 0` identically.
pub fn closed_form_dark(p: &TrimerParams, t: f64) -> Result<[f64; 3]> {
    p.validate()?;
    let growth = (2.0 * p.gamma * t).exp();
    Ok([
        growth * (2.0 * p.chi).exp(),
        growth * (-2.0 * p.chi).exp(),
        0.0,
    ])
}

/// Closed-form bright-sector evolution from `|B>`:
/// `alpha(t) = cos(eta t) - (i delta/eta) sin(eta t)` and
/// `beta(t) = -i sqrt(2) kappa sin(eta t)/eta`, with occupations
/// `P1 = e^{2 chi} |alpha|^2 / 2`, `P2 = e^{-2 chi} |alpha|^2 / 2`,
/// `P3 = |beta|^2`, all multiplied by the growth factor
/// `|exp(-i mean t)|^2` carried by the state prefactor (identically one
/// under the reality conditions).
///
/// Valid whenever the bright block is diagonalizable; at the exceptional
/// point (`|eta|` below tolerance) the call errors and
/// [`closed_form_ep`] must be used instead.
pub fn closed_form_bright(p: &TrimerParams, t: f64) -> Result<BrightClosedForm> {
    let cf = ClosedFormCoefficients::from_params(p)?;
    if cf.eta.norm() <= ETA_SINGULAR_TOL {
        return Err(Error::AtExceptionalPoint {
            eta_abs: cf.eta.norm(),
        });
    }
    let alpha = cf.alpha(t);
    let beta = cf.beta(t);
    // |exp(-i mean t)|^2 = exp(2 Im(mean) t)
    let growth = (2.0 * cf.mean.im * t).exp();
    let half_alpha_sq = alpha.norm_sqr() / 2.0;
    Ok(BrightClosedForm {
        alpha,
        beta,
        occupations: [
            growth * (2.0 * p.chi).exp() * half_alpha_sq,
            growth * (-2.0 * p.chi).exp() * half_alpha_sq,
            growth * beta.norm_sqr(),
        ],
    })
}

fn ensure_at_ep(p: &TrimerParams) -> Result<()> {
    let phase = classify_phase(p, EP_GAMMA_TOL)?;
    if phase.regime != Regime::ExceptionalPoint {
        return Err(Error::Input(format!(
            "not at the exceptional point: |gamma| = {} vs gamma_c = {} (regime {})",
            p.gamma.abs(),
            phase.gamma_c,
            phase.regime
        )));
    }
    Ok(())
}

/// Polynomial occupations at the exceptional point for a bright initial
/// state: `P1 = e^{2 chi} (1 + gamma t)^2 / 2`,
/// `P2 = e^{-2 chi} (1 + gamma t)^2 / 2`, `P3 = gamma^2 t^2`. At the
/// positive critical point `gamma = gamma_c` this is the familiar
/// `(1 + gamma_c t)^2` growth.
pub fn closed_form_ep(p: &TrimerParams, t: f64) -> Result<[f64; 3]> {
    ensure_at_ep(p)?;
    let linear = 1.0 + p.gamma * t;
    let sq = linear * linear;
    Ok([
        (2.0 * p.chi).exp() * sq / 2.0,
        (-2.0 * p.chi).exp() * sq / 2.0,
        p.gamma * p.gamma * t * t,
    ])
}

/// Traceless nilpotent part of the bright block at the exceptional point:
/// `N = bright_block - (omega + mu) I`, which equals
/// `gamma_c [[i, 1], [1, -i]]` at `gamma = +gamma_c` and satisfies
/// `N^2 = 0` to rounding.
pub fn nilpotent_part(p: &TrimerParams) -> Result<ComplexMatrix> {
    ensure_at_ep(p)?;
    let coupling = Complex64::new(2.0f64.sqrt() * p.kappa, 0.0);
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.0, p.gamma), coupling],
        vec![coupling, Complex64::new(0.0, -p.gamma)],
    ])
}

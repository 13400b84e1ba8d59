//! Gamma sweeps and exceptional-point location for the trimer.
//!
//! Sweeps re-apply the reality conditions at every gamma (`gamma3 = -gamma`
//! tracks the sweep) so the bright sector stays PT-symmetric along the
//! whole curve: two real branches inside the window, a complex-conjugate
//! pair outside.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trimer::{
    apply_reality_conditions, build_trimer, classify_phase, decompose, Regime, TrimerParams,
    EP_GAMMA_TOL,
};

/// One sweep point: dark and bright eigenvalues plus the phase tag.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub gamma: f64,
    pub lambda0: Complex64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub regime: Regime,
}

/// A located exceptional point.
#[derive(Debug, Clone, Copy)]
pub struct EpLocation {
    pub gamma_c: f64,
    /// `|2 kappa^2 - gamma_c^2|` at the reported point, the bisected
    /// quantity (one quarter of the squared discriminant magnitude).
    pub residual: f64,
    /// Final bracket around the reported point.
    pub side_samples: (f64, f64),
}

fn row_at(p_base: &TrimerParams, gamma: f64) -> Result<SweepRow> {
    let p = apply_reality_conditions(&TrimerParams { gamma, ..*p_base });
    let d = decompose(&p)?;
    let phase = classify_phase(&p, EP_GAMMA_TOL)?;
    Ok(SweepRow {
        gamma,
        lambda0: d.dark_eigenvalue,
        lambda_plus: d.bright_eigenvalues.0,
        lambda_minus: d.bright_eigenvalues.1,
        regime: phase.regime,
    })
}

/// Keep the plus/minus branches continuous across the sweep: whenever the
/// swapped pairing is strictly closer to the previous row, swap. The
/// principal-branch labels are already continuous for this family, so this
/// only guards against branch-flip artifacts in edge cases.
fn pair_for_continuity(rows: &mut [SweepRow]) {
    for k in 1..rows.len() {
        let prev_plus = rows[k - 1].lambda_plus;
        let prev_minus = rows[k - 1].lambda_minus;
        let keep =
            (rows[k].lambda_plus - prev_plus).norm() + (rows[k].lambda_minus - prev_minus).norm();
        let swap =
            (rows[k].lambda_minus - prev_plus).norm() + (rows[k].lambda_plus - prev_minus).norm();
        if swap < keep {
            let row = &mut rows[k];
            std::mem::swap(&mut row.lambda_plus, &mut row.lambda_minus);
        }
    }
}

/// Sweep gamma over a uniform grid, re-applying the reality conditions at
/// each point. Rows come back in ascending gamma order.
pub fn gamma_sweep(
    p_base: &TrimerParams,
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
) -> Result<Vec<SweepRow>> {
    gamma_sweep_threaded(p_base, gamma_min, gamma_max, steps, 1)
}

/// [`gamma_sweep`] with rows evaluated on up to `threads` worker threads.
/// Rows are independent and the output ordering (and bytes) do not depend
/// on the thread count.
pub fn gamma_sweep_threaded(
    p_base: &TrimerParams,
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
    threads: usize,
) -> Result<Vec<SweepRow>> {
    p_base.validate()?;
    if steps < 2 {
        return Err(Error::Input("gamma sweep needs at least 2 steps".into()));
    }
    if !(gamma_min.is_finite() && gamma_max.is_finite()) || gamma_max <= gamma_min {
        return Err(Error::Input(
            "gamma sweep needs gamma_max > gamma_min".into(),
        ));
    }
    let dg = (gamma_max - gamma_min) / (steps - 1) as f64;
    let gammas: Vec<f64> = (0..steps).map(|k| gamma_min + dg * k as f64).collect();

    let workers = threads.max(1).min(steps);
    let mut rows: Vec<Result<SweepRow>> = Vec::with_capacity(steps);
    if workers == 1 {
        for &g in &gammas {
            rows.push(row_at(p_base, g));
        }
    } else {
        let chunk = steps.div_ceil(workers);
        let mut results: Vec<Vec<Result<SweepRow>>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = gammas
                .chunks(chunk)
                .map(|slice| {
                    scope
                        .spawn(move || slice.iter().map(|&g| row_at(p_base, g)).collect::<Vec<_>>())
                })
                .collect();
            for h in handles {
                results.push(h.join().expect("sweep worker panicked"));
            }
        });
        rows = results.into_iter().flatten().collect();
    }

    let mut out = rows.into_iter().collect::<Result<Vec<SweepRow>>>()?;
    pair_for_continuity(&mut out);
    Ok(out)
}

/// Locate the exceptional point inside a gamma bracket by bisecting
/// `f(gamma) = 2 kappa^2 - gamma^2` until `|f| <= tol`. The sign of `f`
/// must differ at the bracket ends. After bisection the eigenvector
/// coalescence is verified through the numeric eigendecomposition at the
/// reported point.
pub fn locate_ep(p_base: &TrimerParams, bracket: (f64, f64), tol: f64) -> Result<EpLocation> {
    p_base.validate()?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Input("locate_ep tolerance must be positive".into()));
    }
    let two_kappa_sq = 2.0 * p_base.kappa * p_base.kappa;
    let f = |gamma: f64| two_kappa_sq - gamma * gamma;
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::Input(
            "locate_ep needs a finite bracket (lo, hi)".into(),
        ));
    }
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 && fhi == 0.0 {
        return Err(Error::Input(
            "discriminant does not change sign across the bracket".into(),
        ));
    }
    if flo * fhi > 0.0 {
        return Err(Error::Input(format!(
            "no exceptional point inside bracket ({lo}, {hi}): discriminant does not change sign"
        )));
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tol || (hi - lo) <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let residual = f(mid).abs();
    if residual > tol {
        return Err(Error::Numeric(format!(
            "bisection stalled: |2 kappa^2 - gamma^2| = {residual:.3e} above tol {tol:.3e}"
        )));
    }

    // Verify that the eigenvectors of the two bright eigenvalues have
    // (numerically) coalesced at the located point.
    let p = apply_reality_conditions(&TrimerParams {
        gamma: mid,
        ..*p_base
    });
    let d = decompose(&p)?;
    let h = build_trimer(&p)?.matrix();
    let eig = crate::numerics::eigen(&h, crate::numerics::DEFAULT_TOL)?;
    let col =
        |j: usize| -> Vec<Complex64> { (0..3).map(|i| eig.right_eigenvectors.get(i, j)).collect() };
    let nearest = |target: Complex64| -> usize {
        (0..3)
            .min_by(|&a, &b| {
                (eig.eigenvalues[a] - target)
                    .norm()
                    .partial_cmp(&(eig.eigenvalues[b] - target).norm())
                    .unwrap()
            })
            .unwrap()
    };
    let overlap = if eig.defective {
        // clustered double root: coalescence already established
        1.0
    } else {
        let ip = nearest(d.bright_eigenvalues.0);
        let im = {
            // pick the closest distinct column for lambda_minus
            let mut best = usize::MAX;
            let mut best_d = f64::INFINITY;
            for j in 0..3 {
                if j == ip {
                    continue;
                }
                let dist = (eig.eigenvalues[j] - d.bright_eigenvalues.1).norm();
                if dist < best_d {
                    best_d = dist;
                    best = j;
                }
            }
            best
        };
        let (vp, vm) = (col(ip), col(im));
        let dot: Complex64 = vp.iter().zip(&vm).map(|(a, b)| a.conj() * b).sum();
        let np: f64 = vp.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let nm: f64 = vm.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        dot.norm() / (np * nm)
    };
    if overlap < 1.0 - 1e-6 {
        return Err(Error::Numeric(format!(
            "eigenvectors did not coalesce at gamma = {mid}: overlap {overlap}"
        )));
    }

    Ok(EpLocation {
        gamma_c: mid,
        residual,
        side_samples: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kappa: f64) -> TrimerParams {
        TrimerParams::new(0.0, 0.0, 1.0, kappa, 0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn reference_sweep_structure() {
        let p = base(1.0 / 2.0f64.sqrt());
        let rows = gamma_sweep(&p, -2.0, 2.0, 81).unwrap();
        assert_eq!(rows.len(), 81);
        for row in &rows {
            // dark eigenvalue tracks gamma exactly
            assert_eq!(row.lambda0.im, row.gamma);
            assert!((row.lambda0.re - (-1.0)).abs() < 1e-14);
            if row.gamma.abs() < 0.99 {
                assert_eq!(row.lambda_plus.im, 0.0, "gamma = {}", row.gamma);
                assert_eq!(row.lambda_minus.im, 0.0);
                assert_eq!(row.regime, Regime::PtUnbroken);
            }
            if row.gamma.abs() > 1.01 {
                assert_eq!(row.regime, Regime::PtBroken);
                assert!(row.lambda_plus.im.abs() > 0.0);
            }
        }
        // gamma = 1.5 row: Im lambda = +- sqrt(1.25)
        let row = rows.iter().find(|r| (r.gamma - 1.5).abs() < 1e-12).unwrap();
        assert!((row.lambda_plus.im - 1.25f64.sqrt()).abs() < 1e-12);
        assert!((row.lambda_minus.im + 1.25f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn real_parts_sum_rule() {
        let p = base(0.9);
        let rows = gamma_sweep(&p, -2.0, 2.0, 41).unwrap();
        for row in rows {
            let sum = row.lambda_plus.re + row.lambda_minus.re;
            assert!((sum - 2.0 * (p.omega + p.mu)).abs() < 1e-10);
        }
    }

    #[test]
    fn threaded_sweep_matches_sequential() {
        let p = base(0.8);
        let seq = gamma_sweep(&p, -1.5, 1.5, 37).unwrap();
        let par = gamma_sweep_threaded(&p, -1.5, 1.5, 37, 4).unwrap();
        for (a, b) in seq.iter().zip(par.iter()) {
            assert_eq!(a.gamma, b.gamma);
            assert_eq!(a.lambda_plus, b.lambda_plus);
            assert_eq!(a.lambda_minus, b.lambda_minus);
            assert_eq!(a.lambda0, b.lambda0);
            assert_eq!(a.regime, b.regime);
        }
    }

    #[test]
    fn locate_ep_at_reference_kappa() {
        let p = base(1.0 / 2.0f64.sqrt());
        let loc = locate_ep(&p, (0.5, 1.5), 1e-10).unwrap();
        assert!((loc.gamma_c - 1.0).abs() < 1e-9, "gamma_c {}", loc.gamma_c);
        assert!(loc.residual <= 1e-10);
        assert!(loc.side_samples.0 <= p.gamma_c() && p.gamma_c() <= loc.side_samples.1);
        // negative-side EP
        let neg = locate_ep(&p, (-1.5, -0.5), 1e-10).unwrap();
        assert!((neg.gamma_c + 1.0).abs() < 1e-9);
    }

    #[test]
    fn locate_ep_at_unit_kappa() {
        let p = base(1.0);
        let loc = locate_ep(&p, (1.0, 2.0), 1e-10).unwrap();
        assert!((loc.gamma_c - 2.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn bracket_without_sign_change_rejected() {
        let p = base(1.0 / 2.0f64.sqrt());
        assert!(matches!(
            locate_ep(&p, (0.0, 0.5), 1e-10),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn sweep_validation() {
        let p = base(1.0);
        assert!(gamma_sweep(&p, 0.0, 1.0, 1).is_err());
        assert!(gamma_sweep(&p, 1.0, 0.0, 10).is_err());
        assert_eq!(gamma_sweep(&p, 0.0, 1.0, 2).unwrap().len(), 2);
    }
}

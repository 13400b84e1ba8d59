use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::matrix::ComplexMatrix;

/// Default residual tolerance for root finding: a root `r` is accepted when
/// `|p(r)| <= tol * sum_k |c_k| |r|^k`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

const ABERTH_MAX_ITER: usize = 400;

/// Polynomial with complex coefficients, stored from the constant term up
/// to the leading term. `monic` records whether the leading coefficient is
/// exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
    monic: bool,
}

impl Polynomial {
    /// Build from coefficients ordered constant-first; trailing exact zeros
    /// are trimmed. The zero polynomial is rejected.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input(
                "polynomial has non-finite coefficients".into(),
            ));
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() || coeffs == [Complex64::new(0.0, 0.0)] {
            return Err(Error::Input(
                "polynomial must have a nonzero leading coefficient".into(),
            ));
        }
        let monic = *coeffs.last().unwrap() == Complex64::new(1.0, 0.0);
        Ok(Polynomial { coeffs, monic })
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            // multiply by (x - r)
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        *coeffs.last_mut().unwrap() = Complex64::new(1.0, 0.0);
        Polynomial {
            coeffs,
            monic: true,
        }
    }

    /// Divide through by the leading coefficient; the result is exactly monic.
    pub fn monic_normalized(&self) -> Polynomial {
        let lead = *self.coeffs.last().unwrap();
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c / lead).collect();
        *coeffs.last_mut().unwrap() = Complex64::new(1.0, 0.0);
        Polynomial {
            coeffs,
            monic: true,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_monic(&self) -> bool {
        self.monic
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Magnitude scale of the evaluation at `z`: `sum_k |c_k| |z|^k`.
    /// `|p(z)|` below roughly `eps` times this is indistinguishable from a
    /// root in double precision.
    pub fn eval_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * r + c.norm();
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial {
                coeffs: vec![Complex64::new(0.0, 0.0)],
                monic: false,
            };
        }
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * (k as f64))
            .collect();
        let monic = *coeffs.last().unwrap() == Complex64::new(1.0, 0.0);
        Polynomial { coeffs, monic }
    }

    /// Largest coefficient-wise absolute deviation between two polynomials,
    /// padding the shorter one with zeros.
    pub fn max_coeff_deviation(&self, other: &Polynomial) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Companion matrix of a monic polynomial of degree >= 1.
    pub fn companion_matrix(&self) -> Result<ComplexMatrix> {
        if !self.monic {
            return Err(Error::Input(
                "companion matrix requires a monic polynomial".into(),
            ));
        }
        let n = self.degree();
        if n == 0 {
            return Err(Error::Input("companion matrix requires degree >= 1".into()));
        }
        let mut m = ComplexMatrix::zeros(n);
        for i in 1..n {
            m.set(i, i - 1, Complex64::new(1.0, 0.0));
        }
        for i in 0..n {
            m.set(i, n - 1, -self.coeffs[i]);
        }
        Ok(m)
    }
}

/// Monic characteristic polynomial `det(lambda I - M)` via the
/// Faddeev-LeVerrier recurrence: with `M_1 = I`,
/// `c_{n-k} = -tr(M M_k)/k` and `M_{k+1} = M M_k + c_{n-k} I`.
pub fn char_poly(m: &ComplexMatrix) -> Result<Polynomial> {
    m.ensure_finite()?;
    let n = m.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut aux = ComplexMatrix::identity(n);
    for k in 1..=n {
        let prod = m.matmul(&aux);
        let ck = -prod.trace() / (k as f64);
        coeffs[n - k] = ck;
        if k < n {
            let mut next = prod;
            for i in 0..n {
                let v = next.get(i, i) + ck;
                next.set(i, i, v);
            }
            aux = next;
        }
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric(
            "characteristic polynomial coefficients overflowed".into(),
        ));
    }
    Ok(Polynomial {
        coeffs,
        monic: true,
    })
}

/// Principal complex square root: nonnegative real part, and nonnegative
/// imaginary part on the negative real axis. Real-axis inputs produce
/// exactly real (or exactly imaginary) outputs.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

/// All roots of a monic polynomial, with multiplicity. Degrees one and two
/// are solved in closed form; higher degrees use the Aberth-Ehrlich
/// simultaneous iteration followed by Newton polishing, with a closed-form
/// cubic fallback at degree three.
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    if !p.is_monic() {
        return Err(Error::Input(
            "poly_roots requires a monic polynomial".into(),
        ));
    }
    if p.degree() < 1 {
        return Err(Error::Input("poly_roots requires degree >= 1".into()));
    }
    let mut roots = match p.degree() {
        1 => vec![-p.coeff(0)],
        2 => quadratic_roots(p.coeff(1), p.coeff(0)),
        _ => aberth_roots(p, tol)?,
    };
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(roots)
}

/// Roots of `x^2 + b x + c`, cancellation-safe.
fn quadratic_roots(b: Complex64, c: Complex64) -> Vec<Complex64> {
    let disc = b * b - c * 4.0;
    let sq = principal_sqrt(disc);
    // pick the sign that avoids cancellation in b + sq
    let s = if (b.conj() * sq).re >= 0.0 {
        b + sq
    } else {
        b - sq
    };
    let r1 = -s / 2.0;
    let r2 = if r1.norm() > 0.0 { c / r1 } else { -b - r1 };
    vec![r1, r2]
}

/// Roots of a monic cubic by Cardano's formula; fallback path only.
fn cardano_roots(p: &Polynomial) -> Vec<Complex64> {
    let a2 = p.coeff(2);
    let a1 = p.coeff(1);
    let a0 = p.coeff(0);
    let shift = a2 / 3.0;
    // depressed cubic t^3 + pt + q with x = t - a2/3
    let pp = a1 - a2 * a2 / 3.0;
    let qq = a2 * a2 * a2 * (2.0 / 27.0) - a2 * a1 / 3.0 + a0;
    let disc = (qq / 2.0) * (qq / 2.0) + (pp / 3.0) * (pp / 3.0) * (pp / 3.0);
    let sq = principal_sqrt(disc);
    let cand1 = -qq / 2.0 + sq;
    let cand2 = -qq / 2.0 - sq;
    let s = if cand1.norm() >= cand2.norm() {
        cand1
    } else {
        cand2
    };
    if s.norm() == 0.0 {
        // p == q == 0: triple root at -a2/3
        return vec![-shift; 3];
    }
    let u = s.cbrt();
    let omega = Complex64::new(-0.5, 0.75f64.sqrt());
    (0..3)
        .map(|k| {
            let uk = u * omega.powu(k);
            uk - pp / (uk * 3.0) - shift
        })
        .collect()
}

fn aberth_roots(p: &Polynomial, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let dp = p.derivative();
    // Cauchy bound: every root of a monic p lies within 1 + max|c_k|.
    let bound = 1.0 + p.coeffs()[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let center = -p.coeff(n - 1) / (n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * PI * (k as f64) / (n as f64) + 0.43;
            center + Complex64::from_polar(bound, theta)
        })
        .collect();

    let mut converged = false;
    for _ in 0..ABERTH_MAX_ITER {
        let mut all_done = true;
        let mut next = z.clone();
        for i in 0..n {
            let zi = z[i];
            let pz = p.eval(zi);
            let scale = p.eval_scale(zi).max(f64::MIN_POSITIVE);
            if pz.norm() <= tol * scale {
                continue;
            }
            all_done = false;
            let dpz = dp.eval(zi);
            if dpz.norm() == 0.0 {
                next[i] = zi + Complex64::new(1e-6 * (1.0 + zi.norm()), 1e-6);
                continue;
            }
            let newton = pz / dpz;
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = zi - zj;
                if d.norm_sqr() > 0.0 {
                    s += d.inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * s;
            let delta = if denom.norm() < 1e-290 {
                newton
            } else {
                newton / denom
            };
            let updated = zi - delta;
            next[i] = if updated.is_finite() {
                updated
            } else {
                zi + Complex64::new(1e-6 * (1.0 + zi.norm()), -1e-6)
            };
        }
        z = next;
        if all_done {
            converged = true;
            break;
        }
    }

    if !converged && n == 3 {
        // closed-form fallback for the cubic
        z = cardano_roots(p);
    }

    // Newton polish drives simple roots to machine accuracy; on multiple
    // roots it converges only linearly and stalls well outside the
    // clustering band.
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let pz = p.eval(*zi);
            let dpz = dp.eval(*zi);
            if dpz.norm() == 0.0 {
                break;
            }
            let step = pz / dpz;
            if !step.is_finite() || step.norm() <= f64::EPSILON * (1.0 + zi.norm()) {
                break;
            }
            *zi -= step;
        }
    }

    // Second stage for roots still above the evaluation noise floor
    // (multiple roots): Newton on u = p/p', whose zeros are all simple, is
    // quadratic for any multiplicity and reaches the eps^(1/2) noise ball.
    let ddp = dp.derivative();
    for zi in z.iter_mut() {
        for _ in 0..10 {
            let pz = p.eval(*zi);
            let scale = p.eval_scale(*zi).max(f64::MIN_POSITIVE);
            if pz.norm() <= 8.0 * f64::EPSILON * scale {
                break;
            }
            let dpz = dp.eval(*zi);
            if dpz.norm() == 0.0 {
                break;
            }
            let u = pz / dpz;
            let du = Complex64::new(1.0, 0.0) - pz * ddp.eval(*zi) / (dpz * dpz);
            if du.norm() == 0.0 {
                break;
            }
            let step = u / du;
            if !step.is_finite() || step.norm() <= f64::EPSILON * (1.0 + zi.norm()) {
                break;
            }
            *zi -= step;
        }
    }

    let mut worst = 0.0f64;
    for &zi in &z {
        let res = p.eval(zi).norm() / p.eval_scale(zi).max(f64::MIN_POSITIVE);
        worst = worst.max(res);
    }
    if worst > tol {
        return Err(Error::Numeric(format!(
            "root iteration did not converge: worst relative residual {worst:.3e} exceeds {tol:.3e}"
        )));
    }
    Ok(z)
}

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::matrix::ComplexMatrix;

// Order thresholds for the [m/m] Pade approximants, from Higham,
// "The Scaling and Squaring Method for the Matrix Exponential Revisited",
// SIAM J. Matrix Anal. Appl. 26(4), 2005.
const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068e0;
const THETA_13: f64 = 5.371_920_351_148_152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Matrix exponential by scaling and squaring with diagonal Pade kernels.
///
/// No eigendecomposition is involved, so the result stays accurate for
/// defective matrices (Jordan blocks); an exactly nilpotent argument is
/// reproduced to rounding because every Pade kernel truncates to the same
/// polynomial the series does.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.ensure_finite()?;
    let n = m.dim();
    let norm = m.one_norm();

    // Second-order nilpotent argument: the series terminates, and the
    // scaled-and-squared route would shred accuracy for large norms.
    if norm > 0.0 && m.matmul(m).max_abs() == 0.0 {
        return Ok(ComplexMatrix::identity(n).add(m));
    }

    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_uv(m, &B3);
        (u, v, 0u32)
    } else if norm <= THETA_5 {
        let (u, v) = pade_uv(m, &B5);
        (u, v, 0)
    } else if norm <= THETA_7 {
        let (u, v) = pade_uv(m, &B7);
        (u, v, 0)
    } else if norm <= THETA_9 {
        let (u, v) = pade_uv(m, &B9);
        (u, v, 0)
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0) as u32;
        let scaled = m.scale(real(0.5f64.powi(s as i32)));
        let (u, v) = pade13_uv(&scaled);
        (u, v, s)
    };

    let denom = v.sub(&u);
    let numer = v.add(&u);
    let mut r = denom
        .solve_matrix(&numer)
        .map_err(|_| Error::Numeric("matrix exponential Pade solve failed".into()))?;
    for _ in 0..squarings {
        r = r.matmul(&r);
        if !r.is_finite() {
            return Err(Error::Numeric(format!(
                "matrix exponential overflowed while squaring (input 1-norm {norm:.3e})"
            )));
        }
    }
    if !r.is_finite() {
        return Err(Error::Numeric(
            "matrix exponential produced non-finite entries".into(),
        ));
    }
    let _ = n;
    Ok(r)
}

/// U and V for orders 3..9: even/odd split of the Pade numerator.
fn pade_uv(a: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let ident = ComplexMatrix::identity(n);
    let a2 = a.matmul(a);
    // even powers a^0, a^2, a^4, ...
    let mut powers = vec![ident];
    while powers.len() < b.len() / 2 {
        powers.push(powers.last().unwrap().matmul(&a2));
    }
    let mut u_inner = ComplexMatrix::zeros(n);
    let mut v = ComplexMatrix::zeros(n);
    for (k, pw) in powers.iter().enumerate() {
        u_inner = u_inner.add(&pw.scale(real(b[2 * k + 1])));
        v = v.add(&pw.scale(real(b[2 * k])));
    }
    (a.matmul(&u_inner), v)
}

fn pade13_uv(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let ident = ComplexMatrix::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &B13;

    let u_hi = a6.matmul(
        &a6.scale(real(b[13]))
            .add(&a4.scale(real(b[11])))
            .add(&a2.scale(real(b[9]))),
    );
    let u_lo = a6
        .scale(real(b[7]))
        .add(&a4.scale(real(b[5])))
        .add(&a2.scale(real(b[3])))
        .add(&ident.scale(real(b[1])));
    let u = a.matmul(&u_hi.add(&u_lo));

    let v_hi = a6.matmul(
        &a6.scale(real(b[12]))
            .add(&a4.scale(real(b[10])))
            .add(&a2.scale(real(b[8]))),
    );
    let v = v_hi
        .add(&a6.scale(real(b[6])))
        .add(&a4.scale(real(b[4])))
        .add(&a2.scale(real(b[2])))
        .add(&ident.scale(real(b[0])));
    (u, v)
}

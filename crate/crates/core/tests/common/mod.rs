//! Shared helpers for the integration suites: a small deterministic RNG and
//! a criterion wrapper that prints one pass/fail line per check.

use latsym::Complex64;

pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform magnitude in [lo, hi] with random sign.
    pub fn signed_mag(&mut self, lo: f64, hi: f64) -> f64 {
        let mag = self.uniform(lo, hi);
        if self.next_u64() & 1 == 0 {
            mag
        } else {
            -mag
        }
    }

    pub fn complex(&mut self, lo: f64, hi: f64) -> Complex64 {
        Complex64::new(self.uniform(lo, hi), self.uniform(lo, hi))
    }
}

pub fn criterion(id: &str, name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("ACCEPTANCE {id} ({name}): PASS"),
        Err(msg) => {
            println!("ACCEPTANCE {id} ({name}): FAIL - {msg}");
            panic!("acceptance criterion {id} failed: {msg}");
        }
    }
}

/// Multiset comparison by greedy nearest matching (robust against ties in
/// a lexicographic sort when real parts differ only by rounding).
pub fn multisets_match(a: &[Complex64], b: &[Complex64], tol: f64) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("length mismatch: {} vs {}", a.len(), b.len()));
    }
    let mut pool: Vec<Complex64> = b.to_vec();
    for x in a {
        let (idx, dist) = pool
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .ok_or_else(|| "empty pool".to_string())?;
        if dist > tol {
            return Err(format!(
                "multiset mismatch: {x} unmatched by {dist:.1e} > {tol:.1e}"
            ));
        }
        pool.remove(idx);
    }
    Ok(())
}

pub fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

//! Deterministic artifact formatting. CSV floats are pinned to 17
//! significant digits in scientific notation so identical configs produce
//! byte-identical files on every platform; lines end with `\n`.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use latsym::network::NetworkHamiltonian;
use latsym::trimer::TrimerParams;

use crate::config::Model;
use crate::error::{CliError, CliResult};

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CplxOut {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for CplxOut {
    fn from(z: Complex64) -> Self {
        CplxOut { re: z.re, im: z.im }
    }
}

pub fn vector_out(amps: &[Complex64]) -> Vec<CplxOut> {
    amps.iter().map(|&z| z.into()).collect()
}

/// Echo of the resolved model in the same schema the config ingests, so
/// emitted reports can be fed straight back in.
pub fn model_echo(model: &Model) -> Value {
    match model {
        Model::Trimer(p) => json!({ "trimer": trimer_echo(p) }),
        Model::Network(h) => json!({ "network": network_echo(h) }),
    }
}

fn trimer_echo(p: &TrimerParams) -> Value {
    json!({
        "omega": p.omega,
        "gamma": p.gamma,
        "mu": p.mu,
        "kappa": p.kappa,
        "chi": p.chi,
        "omega3": p.omega3,
        "gamma3": p.gamma3,
    })
}

fn network_echo(h: &NetworkHamiltonian) -> Value {
    let sites: Vec<Value> = h
        .sites()
        .iter()
        .map(|s| json!({ "omega": s.omega, "gamma": s.gamma }))
        .collect();
    let couplings: Vec<Value> = h
        .coupling_list()
        .iter()
        .map(|c| json!({ "from": c.from, "to": c.to, "g": c.g }))
        .collect();
    json!({ "sites": sites, "couplings": couplings })
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::numeric(format!("JSON serialization failed: {e}")))
}

/// Write to the given path, or stdout when no path is set.
pub fn emit(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, content)
            .map_err(|e| CliError::config("output", format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::numeric(format!("stdout write failed: {e}")))
        }
    }
}

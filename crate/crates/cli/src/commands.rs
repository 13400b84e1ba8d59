use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use latsym::dynamics::{trajectory, StateVector};
use latsym::network::{check_trimer_conditions, is_cospectral, singlet_sites};
use latsym::numerics::eigen;
use latsym::sweep::{gamma_sweep_threaded, locate_ep, SweepRow};
use latsym::trimer::{bright_state, build_trimer, classify_phase, dark_state, decompose};

use crate::config::{Format, InitialState, Model, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{emit, fmt_f64, model_echo, to_pretty_json, vector_out, CplxOut};

#[derive(Serialize)]
struct TrimerEigenOut {
    lambda0: CplxOut,
    lambda_plus: CplxOut,
    lambda_minus: CplxOut,
}

#[derive(Serialize)]
struct DarkOut {
    vector: Vec<CplxOut>,
    eigenvalue: CplxOut,
}

#[derive(Serialize)]
struct BrightOut {
    vector: Vec<CplxOut>,
    block: Vec<Vec<CplxOut>>,
    eigenvalues: Vec<CplxOut>,
}

#[derive(Serialize)]
struct TrimerSpectrumReport {
    model: Value,
    regime: &'static str,
    gamma_c: f64,
    discriminant: CplxOut,
    eigenvalues: TrimerEigenOut,
    dark: DarkOut,
    bright: BrightOut,
    defective: bool,
    eigenvector_condition: f64,
    full_spectrum: Vec<CplxOut>,
}

#[derive(Serialize)]
struct NetworkSpectrumReport {
    model: Value,
    eigenvalues: Vec<CplxOut>,
    defective: bool,
    eigenvector_condition: f64,
    right_eigenvectors: Vec<Vec<CplxOut>>,
}

pub fn cmd_spectrum(cfg: &RunConfig) -> CliResult<()> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::config(
            "format",
            "spectrum emits a JSON report; \"csv\" is not supported here",
        ));
    }
    let report = match &cfg.model {
        Model::Trimer(p) => {
            let d = decompose(p).map_err(|e| CliError::from_lib("model.trimer", e))?;
            let phase =
                classify_phase(p, cfg.tol).map_err(|e| CliError::from_lib("model.trimer", e))?;
            let h = build_trimer(p).map_err(|e| CliError::from_lib("model.trimer", e))?;
            let num =
                eigen(&h.matrix(), cfg.tol).map_err(|e| CliError::from_lib("model.trimer", e))?;
            let maybe_norm = |v: &StateVector| {
                if cfg.normalize {
                    v.normalized()
                } else {
                    v.clone()
                }
            };
            let block = (0..2)
                .map(|i| (0..2).map(|j| d.bright_block.get(i, j).into()).collect())
                .collect();
            to_pretty_json(&TrimerSpectrumReport {
                model: model_echo(&cfg.model),
                regime: phase.regime.as_str(),
                gamma_c: phase.gamma_c,
                discriminant: phase.discriminant.into(),
                eigenvalues: TrimerEigenOut {
                    lambda0: d.dark_eigenvalue.into(),
                    lambda_plus: d.bright_eigenvalues.0.into(),
                    lambda_minus: d.bright_eigenvalues.1.into(),
                },
                dark: DarkOut {
                    vector: vector_out(maybe_norm(&d.dark_vector).amplitudes()),
                    eigenvalue: d.dark_eigenvalue.into(),
                },
                bright: BrightOut {
                    vector: vector_out(maybe_norm(&d.bright_vector).amplitudes()),
                    block,
                    eigenvalues: vec![d.bright_eigenvalues.0.into(), d.bright_eigenvalues.1.into()],
                },
                defective: num.defective,
                eigenvector_condition: num.eigenvector_condition,
                full_spectrum: num.eigenvalues.iter().map(|&l| l.into()).collect(),
            })?
        }
        Model::Network(h) => {
            let num =
                eigen(&h.matrix(), cfg.tol).map_err(|e| CliError::from_lib("model.network", e))?;
            let n = h.site_count();
            let columns = (0..n)
                .map(|j| {
                    (0..n)
                        .map(|i| num.right_eigenvectors.get(i, j).into())
                        .collect()
                })
                .collect();
            to_pretty_json(&NetworkSpectrumReport {
                model: model_echo(&cfg.model),
                eigenvalues: num.eigenvalues.iter().map(|&l| l.into()).collect(),
                defective: num.defective,
                eigenvector_condition: num.eigenvector_condition,
                right_eigenvectors: columns,
            })?
        }
    };
    emit(cfg.output.as_deref(), &report)
}

fn build_initial_state(cfg: &RunConfig) -> CliResult<StateVector> {
    let spec = cfg
        .initial_state
        .as_ref()
        .ok_or_else(|| CliError::config("initial_state", "required for evolve"))?;
    let psi = match (spec, &cfg.model) {
        (InitialState::Dark, Model::Trimer(p)) => {
            dark_state(p).map_err(|e| CliError::from_lib("model.trimer", e))?
        }
        (InitialState::Bright, Model::Trimer(p)) => {
            bright_state(p).map_err(|e| CliError::from_lib("model.trimer", e))?
        }
        (InitialState::Dark | InitialState::Bright, Model::Network(_)) => {
            return Err(CliError::config(
                "initial_state",
                "\"dark\"/\"bright\" are only valid with a trimer model",
            ));
        }
        (InitialState::Site(k), model) => StateVector::site_basis(model.site_count(), *k)
            .map_err(|e| CliError::from_lib("initial_state", e))?,
        (InitialState::Explicit(amps), _) => StateVector::from_amplitudes(amps.clone()),
    };
    Ok(if cfg.normalize { psi.normalized() } else { psi })
}

#[derive(Serialize)]
struct EvolveSampleOut {
    t: f64,
    amplitudes: Vec<CplxOut>,
    occupations: Vec<f64>,
}

pub fn cmd_evolve(cfg: &RunConfig) -> CliResult<()> {
    let grid = cfg
        .grid
        .ok_or_else(|| CliError::config("grid", "required for evolve"))?;
    let h = match &cfg.model {
        Model::Trimer(p) => build_trimer(p).map_err(|e| CliError::from_lib("model.trimer", e))?,
        Model::Network(h) => h.clone(),
    };
    let psi0 = build_initial_state(cfg)?;
    let samples = trajectory(&h, &psi0, &grid).map_err(|e| match e {
        latsym::Error::Input(msg) => CliError::config("initial_state", msg),
        other => CliError::numeric(other.to_string()),
    })?;

    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let n = h.site_count();
            let mut header = String::from("t");
            for k in 1..=n {
                header.push_str(&format!(",re_a{k},im_a{k}"));
            }
            for k in 1..=n {
                header.push_str(&format!(",p{k}"));
            }
            let mut out = String::with_capacity(samples.len() * 64);
            out.push_str(&header);
            out.push('\n');
            for s in &samples {
                let mut fields = Vec::with_capacity(1 + 3 * n);
                fields.push(fmt_f64(s.t));
                for a in s.amplitudes.amplitudes() {
                    fields.push(fmt_f64(a.re));
                    fields.push(fmt_f64(a.im));
                }
                for p in &s.occupations {
                    fields.push(fmt_f64(*p));
                }
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            emit(cfg.output.as_deref(), &out)
        }
        Format::Json => {
            let rows: Vec<EvolveSampleOut> = samples
                .iter()
                .map(|s| EvolveSampleOut {
                    t: s.t,
                    amplitudes: vector_out(s.amplitudes.amplitudes()),
                    occupations: s.occupations.clone(),
                })
                .collect();
            emit(cfg.output.as_deref(), &to_pretty_json(&rows)?)
        }
    }
}

#[derive(Serialize)]
struct EpResidualsOut {
    positive: Option<f64>,
    negative: Option<f64>,
}

#[derive(Serialize)]
struct EpSidecarOut {
    gamma_c_positive: Option<f64>,
    gamma_c_negative: Option<f64>,
    residuals: EpResidualsOut,
}

fn sweep_threads() -> CliResult<usize> {
    match std::env::var("LATSYM_THREADS") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::config("LATSYM_THREADS", "must be a positive integer")),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 96);
    out.push_str(
        "gamma,re_lambda0,im_lambda0,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus,regime\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_f64(r.gamma),
            fmt_f64(r.lambda0.re),
            fmt_f64(r.lambda0.im),
            fmt_f64(r.lambda_plus.re),
            fmt_f64(r.lambda_plus.im),
            fmt_f64(r.lambda_minus.re),
            fmt_f64(r.lambda_minus.im),
            r.regime.as_str(),
        ));
    }
    out
}

pub fn cmd_sweep(cfg: &RunConfig) -> CliResult<()> {
    let p_base = match &cfg.model {
        Model::Trimer(p) => *p,
        Model::Network(_) => {
            return Err(CliError::config(
                "model",
                "sweep requires a trimer model (the sweep parameter is gamma)",
            ));
        }
    };
    let range = cfg
        .sweep_range
        .ok_or_else(|| CliError::config("sweep_range", "required for sweep"))?;
    if cfg.format == Some(Format::Json) {
        return Err(CliError::config(
            "format",
            "sweep emits CSV plus a JSON sidecar; \"json\" is not supported here",
        ));
    }
    let out_path: PathBuf = cfg
        .output
        .clone()
        .ok_or_else(|| CliError::config("output", "required for sweep (sidecar needs a path)"))?;

    let threads = sweep_threads()?;
    let rows = gamma_sweep_threaded(
        &p_base,
        range.gamma_min,
        range.gamma_max,
        range.steps,
        threads,
    )
    .map_err(|e| CliError::from_lib("sweep_range", e))?;

    // Bracket sign changes of 2 kappa^2 - gamma^2 between grid points and
    // bisect each one.
    let two_kappa_sq = 2.0 * p_base.kappa * p_base.kappa;
    let f = |g: f64| two_kappa_sq - g * g;
    let dg = (range.gamma_max - range.gamma_min) / (range.steps - 1) as f64;
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    for pair in rows.windows(2) {
        let (a, b) = (pair[0].gamma, pair[1].gamma);
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            brackets.push((a - 0.5 * dg, a + 0.5 * dg));
        } else if fa * fb < 0.0 {
            brackets.push((a, b));
        }
    }
    if let Some(last) = rows.last() {
        if f(last.gamma) == 0.0 {
            brackets.push((last.gamma - 0.5 * dg, last.gamma + 0.5 * dg));
        }
    }

    let mut positive: Option<(f64, f64)> = None;
    let mut negative: Option<(f64, f64)> = None;
    for bracket in brackets {
        let loc = locate_ep(&p_base, bracket, cfg.tol)
            .map_err(|e| CliError::from_lib("sweep_range", e))?;
        if loc.gamma_c >= 0.0 {
            positive = Some((loc.gamma_c, loc.residual));
        } else {
            negative = Some((loc.gamma_c, loc.residual));
        }
    }

    let sidecar = EpSidecarOut {
        gamma_c_positive: positive.map(|(g, _)| g),
        gamma_c_negative: negative.map(|(g, _)| g),
        residuals: EpResidualsOut {
            positive: positive.map(|(_, r)| r),
            negative: negative.map(|(_, r)| r),
        },
    };

    emit(Some(&out_path), &sweep_csv(&rows))?;
    let sidecar_path = out_path.with_extension("ep.json");
    emit(Some(&sidecar_path), &to_pretty_json(&sidecar)?)
}

#[derive(Serialize)]
struct CospectralPairOut {
    i: usize,
    j: usize,
    cospectral: bool,
    max_coeff_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    singlet_sites: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disconnected_sites: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct CospectralReportOut {
    model: Value,
    site_count: usize,
    pairs: Vec<CospectralPairOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trimer_conditions: Option<latsym::network::TrimerConditions>,
}

pub fn cmd_cospectral(cfg: &RunConfig) -> CliResult<()> {
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::config(
            "format",
            "cospectral emits a JSON report; \"csv\" is not supported here",
        ));
    }
    let h = match &cfg.model {
        Model::Network(h) => h.clone(),
        Model::Trimer(_) => {
            return Err(CliError::config(
                "model",
                "cospectral analysis expects a raw network model",
            ));
        }
    };
    let n = h.site_count();
    if n < 2 {
        return Err(CliError::config(
            "model.network.sites",
            "cospectrality needs at least 2 sites",
        ));
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let rep = is_cospectral(&h, i, j, cfg.tol)
                .map_err(|e| CliError::from_lib("model.network", e))?;
            let (singlets, disconnected) = if rep.cospectral {
                let s = singlet_sites(&h, (i, j))
                    .map_err(|e| CliError::from_lib("model.network", e))?;
                (Some(s.singlets), Some(s.disconnected))
            } else {
                (None, None)
            };
            pairs.push(CospectralPairOut {
                i,
                j,
                cospectral: rep.cospectral,
                max_coeff_deviation: rep.max_coeff_deviation,
                singlet_sites: singlets,
                disconnected_sites: disconnected,
            });
        }
    }
    let trimer_conditions = if n == 3 {
        Some(
            check_trimer_conditions(&h, cfg.tol)
                .map_err(|e| CliError::from_lib("model.network", e))?,
        )
    } else {
        None
    };
    let report = CospectralReportOut {
        model: model_echo(&cfg.model),
        site_count: n,
        pairs,
        trimer_conditions,
    };
    emit(cfg.output.as_deref(), &to_pretty_json(&report)?)
}

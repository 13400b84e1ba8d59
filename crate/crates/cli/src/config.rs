//! Run-configuration ingestion. Configs are plain JSON; parsing is done
//! against an explicit schema so that every rejection names the offending
//! field path.

use std::path::PathBuf;

use num_complex::Complex64;
use serde_json::{Map, Value};

use latsym::network::{build_hamiltonian, CouplingSpec, NetworkHamiltonian, SiteSpec};
use latsym::trimer::TrimerParams;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Model {
    Trimer(TrimerParams),
    Network(NetworkHamiltonian),
}

impl Model {
    pub fn site_count(&self) -> usize {
        match self {
            Model::Trimer(_) => 3,
            Model::Network(h) => h.site_count(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum InitialState {
    Dark,
    Bright,
    Site(usize),
    Explicit(Vec<Complex64>),
}

#[derive(Debug, Clone, Copy)]
pub struct SweepRange {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: Model,
    pub initial_state: Option<InitialState>,
    pub grid: Option<latsym::dynamics::TimeGrid>,
    pub sweep_range: Option<SweepRange>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: f64,
    pub normalize: bool,
}

const TOP_KEYS: &[&str] = &[
    "command",
    "model",
    "initial_state",
    "grid",
    "sweep_range",
    "output",
    "format",
    "tol",
    "normalize",
];

pub fn parse_config(text: &str, command_name: &str) -> CliResult<RunConfig> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| CliError::config("<document>", format!("malformed JSON: {e}")))?;
    let obj = as_object(&root, "<document>")?;
    reject_unknown(obj, "<document>", TOP_KEYS)?;

    if let Some(cmd) = opt_str(obj, "command", "command")? {
        if cmd != command_name {
            return Err(CliError::config(
                "command",
                format!("config says \"{cmd}\" but the `{command_name}` subcommand was invoked"),
            ));
        }
    }

    let model_value = obj
        .get("model")
        .ok_or_else(|| CliError::config("model", "missing required field"))?;
    let model = parse_model(model_value)?;

    let initial_state = match obj.get("initial_state") {
        Some(v) => Some(parse_initial_state(v, &model)?),
        None => None,
    };

    let grid = match obj.get("grid") {
        Some(v) => Some(parse_grid(v)?),
        None => None,
    };

    let sweep_range = match obj.get("sweep_range") {
        Some(v) => Some(parse_sweep_range(v)?),
        None => None,
    };

    let output = opt_str(obj, "output", "output")?.map(PathBuf::from);
    let format = match opt_str(obj, "format", "format")? {
        Some(s) => Some(parse_format(&s, "format")?),
        None => None,
    };
    let tol = match obj.get("tol") {
        Some(v) => {
            let t = num_of(v, "tol")?;
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::config("tol", "must be a positive finite number"));
            }
            t
        }
        None => 1e-10,
    };
    let normalize = match obj.get("normalize") {
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(CliError::config("normalize", "must be a boolean")),
        None => false,
    };

    Ok(RunConfig {
        model,
        initial_state,
        grid,
        sweep_range,
        output,
        format,
        tol,
        normalize,
    })
}

pub fn parse_format(s: &str, field: &str) -> CliResult<Format> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::config(
            field,
            format!("unknown format \"{other}\" (expected \"csv\" or \"json\")"),
        )),
    }
}

fn parse_model(v: &Value) -> CliResult<Model> {
    let obj = as_object(v, "model")?;
    reject_unknown(obj, "model", &["trimer", "network"])?;
    match (obj.get("trimer"), obj.get("network")) {
        (Some(t), None) => parse_trimer(t).map(Model::Trimer),
        (None, Some(n)) => parse_network(n).map(Model::Network),
        (Some(_), Some(_)) => Err(CliError::config(
            "model",
            "exactly one of \"trimer\" or \"network\" must be present, found both",
        )),
        (None, None) => Err(CliError::config(
            "model",
            "exactly one of \"trimer\" or \"network\" must be present, found neither",
        )),
    }
}

fn parse_trimer(v: &Value) -> CliResult<TrimerParams> {
    let path = "model.trimer";
    let obj = as_object(v, path)?;
    reject_unknown(
        obj,
        path,
        &["omega", "gamma", "mu", "kappa", "chi", "omega3", "gamma3"],
    )?;
    let omega = req_num(obj, path, "omega")?;
    let gamma = req_num(obj, path, "gamma")?;
    let mu = req_num(obj, path, "mu")?;
    let kappa = req_num(obj, path, "kappa")?;
    let chi = req_num(obj, path, "chi")?;
    // "auto" applies the reality conditions component-wise
    let omega3 = match obj.get("omega3") {
        Some(Value::String(s)) if s == "auto" => omega + mu,
        Some(v) => num_of(v, &format!("{path}.omega3"))?,
        None => {
            return Err(CliError::config(
                format!("{path}.omega3"),
                "missing required field",
            ))
        }
    };
    let gamma3 = match obj.get("gamma3") {
        Some(Value::String(s)) if s == "auto" => -gamma,
        Some(v) => num_of(v, &format!("{path}.gamma3"))?,
        None => {
            return Err(CliError::config(
                format!("{path}.gamma3"),
                "missing required field",
            ))
        }
    };
    TrimerParams::new(omega, gamma, mu, kappa, chi, omega3, gamma3)
        .map_err(|e| CliError::from_lib(path, e))
}

fn parse_network(v: &Value) -> CliResult<NetworkHamiltonian> {
    let path = "model.network";
    let obj = as_object(v, path)?;
    reject_unknown(obj, path, &["sites", "couplings"])?;
    let sites_val = obj
        .get("sites")
        .ok_or_else(|| CliError::config(format!("{path}.sites"), "missing required field"))?;
    let sites_arr = sites_val
        .as_array()
        .ok_or_else(|| CliError::config(format!("{path}.sites"), "must be an array"))?;
    let mut sites = Vec::with_capacity(sites_arr.len());
    for (k, sv) in sites_arr.iter().enumerate() {
        let spath = format!("{path}.sites[{k}]");
        let sobj = as_object(sv, &spath)?;
        reject_unknown(sobj, &spath, &["omega", "gamma"])?;
        sites.push(SiteSpec {
            omega: req_num(sobj, &spath, "omega")?,
            gamma: req_num(sobj, &spath, "gamma")?,
        });
    }
    let mut couplings = Vec::new();
    if let Some(cv) = obj.get("couplings") {
        let carr = cv
            .as_array()
            .ok_or_else(|| CliError::config(format!("{path}.couplings"), "must be an array"))?;
        for (k, item) in carr.iter().enumerate() {
            let cpath = format!("{path}.couplings[{k}]");
            let cobj = as_object(item, &cpath)?;
            reject_unknown(cobj, &cpath, &["from", "to", "g"])?;
            couplings.push(CouplingSpec {
                from: req_usize(cobj, &cpath, "from")?,
                to: req_usize(cobj, &cpath, "to")?,
                g: req_num(cobj, &cpath, "g")?,
            });
        }
    }
    build_hamiltonian(&sites, &couplings).map_err(|e| CliError::from_lib(path, e))
}

fn parse_initial_state(v: &Value, model: &Model) -> CliResult<InitialState> {
    let path = "initial_state";
    match v {
        Value::String(s) => {
            if s == "dark" || s == "bright" {
                if !matches!(model, Model::Trimer(_)) {
                    return Err(CliError::config(
                        path,
                        format!("\"{s}\" is only valid with a trimer model"),
                    ));
                }
                return Ok(if s == "dark" {
                    InitialState::Dark
                } else {
                    InitialState::Bright
                });
            }
            if let Some(rest) = s.strip_prefix("site:") {
                let k: usize = rest
                    .parse()
                    .map_err(|_| CliError::config(path, format!("bad site index in \"{s}\"")))?;
                if k >= model.site_count() {
                    return Err(CliError::config(
                        path,
                        format!(
                            "site index {k} out of range for {} sites",
                            model.site_count()
                        ),
                    ));
                }
                return Ok(InitialState::Site(k));
            }
            Err(CliError::config(
                path,
                format!("unknown state \"{s}\" (expected \"dark\", \"bright\", \"site:<k>\", or an amplitude list)"),
            ))
        }
        Value::Array(items) => {
            if items.len() != model.site_count() {
                return Err(CliError::config(
                    path,
                    format!(
                        "amplitude list has {} entries but the model has {} sites",
                        items.len(),
                        model.site_count()
                    ),
                ));
            }
            let mut amps = Vec::with_capacity(items.len());
            for (k, item) in items.iter().enumerate() {
                let apath = format!("{path}[{k}]");
                let pair = item
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| CliError::config(&apath, "must be a [re, im] pair"))?;
                let re = num_of(&pair[0], &apath)?;
                let im = num_of(&pair[1], &apath)?;
                amps.push(Complex64::new(re, im));
            }
            Ok(InitialState::Explicit(amps))
        }
        _ => Err(CliError::config(
            path,
            "must be a string or an amplitude list",
        )),
    }
}

fn parse_grid(v: &Value) -> CliResult<latsym::dynamics::TimeGrid> {
    let path = "grid";
    let obj = as_object(v, path)?;
    reject_unknown(obj, path, &["t_start", "t_end", "steps"])?;
    let t_start = req_num(obj, path, "t_start")?;
    let t_end = req_num(obj, path, "t_end")?;
    let steps = req_usize(obj, path, "steps")?;
    latsym::dynamics::TimeGrid::new(t_start, t_end, steps).map_err(|e| CliError::from_lib(path, e))
}

fn parse_sweep_range(v: &Value) -> CliResult<SweepRange> {
    let path = "sweep_range";
    let obj = as_object(v, path)?;
    reject_unknown(obj, path, &["gamma_min", "gamma_max", "steps"])?;
    Ok(SweepRange {
        gamma_min: req_num(obj, path, "gamma_min")?,
        gamma_max: req_num(obj, path, "gamma_max")?,
        steps: req_usize(obj, path, "steps")?,
    })
}

fn as_object<'a>(v: &'a Value, path: &str) -> CliResult<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| CliError::config(path, "must be a JSON object"))
}

fn reject_unknown(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> CliResult<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::config(
                if path == "<document>" {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                },
                "unknown field",
            ));
        }
    }
    Ok(())
}

fn opt_str(obj: &Map<String, Value>, path: &str, key: &str) -> CliResult<Option<String>> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(CliError::config(path, "must be a string")),
        None => Ok(None),
    }
}

fn num_of(v: &Value, path: &str) -> CliResult<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::config(path, "must be a finite number"))
}

fn req_num(obj: &Map<String, Value>, path: &str, key: &str) -> CliResult<f64> {
    let full = format!("{path}.{key}");
    match obj.get(key) {
        Some(v) => num_of(v, &full),
        None => Err(CliError::config(full, "missing required field")),
    }
}

fn req_usize(obj: &Map<String, Value>, path: &str, key: &str) -> CliResult<usize> {
    let full = format!("{path}.{key}");
    match obj.get(key) {
        Some(v) => v
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| CliError::config(full, "must be a nonnegative integer")),
        None => Err(CliError::config(full, "missing required field")),
    }
}

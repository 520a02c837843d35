//! Run configuration: a plain-text file of `[section]` blocks with
//! `key = value` lines, overridden by command-line flags.
//!
//! The full key schema is fixed here; a key outside it is a usage error, not
//! a warning, so a typo cannot silently fall back to a default. Within a
//! file the last assignment of a key wins. Values are parsed eagerly so a
//! malformed number is reported with its `section.key` name.
//!
//! Every run resolves to the same [`Settings`] struct regardless of whether
//! values came from the file, from flags, or from defaults. The canonical
//! rendering of that resolved state (every key, schema order, floats at
//! full precision) is what the config hash signs: two invocations with the
//! same effective configuration carry the same hash even when one spells a
//! default out and the other relies on it. Output location is plumbing, not
//! configuration, and stays outside the hash.

use crate::output::f17;
use shearfront_core::material::BodyForceFamily;
use shearfront_core::MaterialModel;

/// `(section, key)` pairs the parser accepts, in canonical order.
const SCHEMA: &[(&str, &str)] = &[
    ("model", "family"),
    ("model", "w1"),
    ("numeric", "n_y"),
    ("numeric", "nodes"),
    ("numeric", "quad"),
    ("numeric", "tol"),
    ("numeric", "kernel_steps"),
    ("material", "q_max"),
    ("material", "kappa_max"),
    ("material", "lambda_max"),
    ("material", "samples"),
    ("conjugate", "lambda"),
    ("period-map", "lambda"),
    ("period-map", "c"),
    ("spectrum", "eps"),
    ("front", "epsilon"),
    ("branch", "epsilon"),
    ("branch", "ds"),
    ("branch", "steps"),
    ("branch", "ds_max"),
    ("branch", "n_ceiling"),
    ("branch", "lambda_ceiling"),
];

/// A configuration problem that is the caller's fault: unknown key, bad
/// syntax, unparseable value, missing required key. Exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Every tunable of every command, with unset slots still open. Flags and
/// file values land here; accessors apply the defaults.
#[derive(Debug, Default, Clone)]
pub struct Settings {
    pub family: Option<BodyForceFamily>,
    pub w1: Option<f64>,
    pub n_y: Option<usize>,
    pub nodes: Option<usize>,
    pub quad: Option<usize>,
    pub tol: Option<f64>,
    pub kernel_steps: Option<usize>,
    pub q_max: Option<f64>,
    pub kappa_max: Option<f64>,
    pub lambda_max: Option<f64>,
    pub samples: Option<usize>,
    pub conjugate_lambda: Option<Vec<f64>>,
    pub pm_lambda: Option<f64>,
    pub pm_c: Option<Vec<f64>>,
    pub spectrum_eps: Option<Vec<f64>>,
    pub front_epsilon: Option<f64>,
    pub branch_epsilon: Option<f64>,
    pub branch_ds: Option<f64>,
    pub branch_steps: Option<usize>,
    pub branch_ds_max: Option<f64>,
    pub branch_n_ceiling: Option<f64>,
    pub branch_lambda_ceiling: Option<f64>,
}

pub fn parse_family(raw: &str) -> Result<BodyForceFamily, UsageError> {
    match raw {
        "linear" => Ok(BodyForceFamily::Linear),
        "tanh" => Ok(BodyForceFamily::Tanh),
        other => Err(UsageError(format!(
            "unknown body-force family {other:?} (expected \"linear\" or \"tanh\")"
        ))),
    }
}

/// Comma-separated float list; empty or all-whitespace input is the empty
/// list so sweeps can be switched off explicitly.
pub fn parse_list(raw: &str, name: &str) -> Result<Vec<f64>, UsageError> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| UsageError(format!("{name}: cannot parse {:?} as a number", tok.trim())))
        })
        .collect()
}

fn parse_f64(raw: &str, name: &str) -> Result<f64, UsageError> {
    raw.parse::<f64>()
        .map_err(|_| UsageError(format!("{name}: cannot parse {raw:?} as a number")))
}

fn parse_usize(raw: &str, name: &str) -> Result<usize, UsageError> {
    raw.parse::<usize>()
        .map_err(|_| UsageError(format!("{name}: cannot parse {raw:?} as a count")))
}

impl Settings {
    /// Parse one configuration file into a fresh `Settings`.
    pub fn from_file_text(text: &str) -> Result<Settings, UsageError> {
        let mut st = Settings::default();
        let mut section = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| UsageError(format!("line {}: unterminated section header", idx + 1)))?
                    .trim();
                if !SCHEMA.iter().any(|&(s, _)| s == name) {
                    return Err(UsageError(format!("unknown config section \"[{name}]\"")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("line {}: expected key = value, got {line:?}", idx + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if section.is_empty() {
                return Err(UsageError(format!("line {}: key {key:?} before any [section]", idx + 1)));
            }
            st.assign(&section, key, value)?;
        }
        Ok(st)
    }

    fn assign(&mut self, section: &str, key: &str, raw: &str) -> Result<(), UsageError> {
        if !SCHEMA.iter().any(|&(s, k)| s == section && k == key) {
            return Err(UsageError(format!("unknown config key \"{section}.{key}\"")));
        }
        let name = format!("{section}.{key}");
        match (section, key) {
            ("model", "family") => self.family = Some(parse_family(raw)?),
            ("model", "w1") => self.w1 = Some(parse_f64(raw, &name)?),
            ("numeric", "n_y") => self.n_y = Some(parse_usize(raw, &name)?),
            ("numeric", "nodes") => self.nodes = Some(parse_usize(raw, &name)?),
            ("numeric", "quad") => self.quad = Some(parse_usize(raw, &name)?),
            ("numeric", "tol") => self.tol = Some(parse_f64(raw, &name)?),
            ("numeric", "kernel_steps") => self.kernel_steps = Some(parse_usize(raw, &name)?),
            ("material", "q_max") => self.q_max = Some(parse_f64(raw, &name)?),
            ("material", "kappa_max") => self.kappa_max = Some(parse_f64(raw, &name)?),
            ("material", "lambda_max") => self.lambda_max = Some(parse_f64(raw, &name)?),
            ("material", "samples") => self.samples = Some(parse_usize(raw, &name)?),
            ("conjugate", "lambda") => self.conjugate_lambda = Some(parse_list(raw, &name)?),
            ("period-map", "lambda") => self.pm_lambda = Some(parse_f64(raw, &name)?),
            ("period-map", "c") => self.pm_c = Some(parse_list(raw, &name)?),
            ("spectrum", "eps") => self.spectrum_eps = Some(parse_list(raw, &name)?),
            ("front", "epsilon") => self.front_epsilon = Some(parse_f64(raw, &name)?),
            ("branch", "epsilon") => self.branch_epsilon = Some(parse_f64(raw, &name)?),
            ("branch", "ds") => self.branch_ds = Some(parse_f64(raw, &name)?),
            ("branch", "steps") => self.branch_steps = Some(parse_usize(raw, &name)?),
            ("branch", "ds_max") => self.branch_ds_max = Some(parse_f64(raw, &name)?),
            ("branch", "n_ceiling") => self.branch_n_ceiling = Some(parse_f64(raw, &name)?),
            ("branch", "lambda_ceiling") => self.branch_lambda_ceiling = Some(parse_f64(raw, &name)?),
            _ => unreachable!("schema accepted an unhandled key"),
        }
        Ok(())
    }

    /// Lay `over` (flag values) on top of `self` (file values).
    pub fn overlay(&mut self, over: Settings) {
        macro_rules! take {
            ($($field:ident),*) => { $( if over.$field.is_some() { self.$field = over.$field; } )* };
        }
        take!(
            family, w1, n_y, nodes, quad, tol, kernel_steps, q_max, kappa_max, lambda_max,
            samples, conjugate_lambda, pm_lambda, pm_c, spectrum_eps, front_epsilon,
            branch_epsilon, branch_ds, branch_steps, branch_ds_max, branch_n_ceiling,
            branch_lambda_ceiling
        );
    }

    // ---- effective values ------------------------------------------------

    pub fn family(&self) -> BodyForceFamily {
        self.family.unwrap_or(BodyForceFamily::Linear)
    }

    pub fn family_name(&self) -> &'static str {
        match self.family() {
            BodyForceFamily::Linear => "linear",
            BodyForceFamily::Tanh => "tanh",
        }
    }

    /// Reference material unless the caller picked one: `W(q) = q + q^2`.
    pub fn w1(&self) -> f64 {
        self.w1.unwrap_or(1.0)
    }

    /// The audit command refuses to certify a material nobody named.
    pub fn require_w1(&self) -> Result<f64, UsageError> {
        self.w1
            .ok_or_else(|| UsageError("material check needs w1 (flag --w1 or config model.w1)".into()))
    }

    pub fn model(&self) -> MaterialModel {
        match self.family() {
            BodyForceFamily::Linear => MaterialModel::linear(self.w1()),
            BodyForceFamily::Tanh => MaterialModel::tanh(self.w1()),
        }
    }

    pub fn n_y(&self) -> usize {
        self.n_y.unwrap_or(65)
    }

    pub fn nodes(&self) -> usize {
        self.nodes.unwrap_or(513)
    }

    pub fn quad(&self) -> usize {
        self.quad.unwrap_or(256)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-10)
    }

    pub fn kernel_steps(&self) -> usize {
        self.kernel_steps.unwrap_or(16384)
    }

    pub fn q_max(&self) -> f64 {
        self.q_max.unwrap_or(4.0)
    }

    pub fn kappa_max(&self) -> f64 {
        self.kappa_max.unwrap_or(2.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max.unwrap_or(4.0)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(64)
    }

    /// The oracle triple is the default sweep.
    pub fn conjugate_lambda(&self) -> Vec<f64> {
        self.conjugate_lambda.clone().unwrap_or_else(|| vec![0.25, 1.0, 4.0])
    }

    pub fn pm_lambda(&self) -> f64 {
        self.pm_lambda.unwrap_or(1.0)
    }

    /// Twenty log-spaced levels across the monotonicity window.
    pub fn pm_c(&self) -> Vec<f64> {
        self.pm_c.clone().unwrap_or_else(|| {
            (0..20)
                .map(|k| 10f64.powf(-6.0 + 7.0 * k as f64 / 19.0))
                .collect()
        })
    }

    pub fn spectrum_eps(&self) -> Vec<f64> {
        self.spectrum_eps
            .clone()
            .unwrap_or_else(|| vec![0.0, 0.2, 0.1, 0.05])
    }

    pub fn front_epsilon(&self) -> f64 {
        self.front_epsilon.unwrap_or(0.1)
    }

    pub fn branch_epsilon(&self) -> f64 {
        self.branch_epsilon.unwrap_or(0.05)
    }

    pub fn branch_ds(&self) -> f64 {
        self.branch_ds.unwrap_or(0.02)
    }

    pub fn branch_steps(&self) -> usize {
        self.branch_steps.unwrap_or(40)
    }

    pub fn branch_ds_max(&self) -> f64 {
        self.branch_ds_max.unwrap_or(0.25)
    }

    pub fn branch_n_ceiling(&self) -> f64 {
        self.branch_n_ceiling.unwrap_or(50.0)
    }

    pub fn branch_lambda_ceiling(&self) -> f64 {
        self.branch_lambda_ceiling.unwrap_or(10.0)
    }

    // ---- canonical form --------------------------------------------------

    /// Every schema key with its effective value, one `section.key=value`
    /// line per key in schema order. This is the hashed text.
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|&x| f17(x)).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        for &(section, key) in SCHEMA {
            let value = match (section, key) {
                ("model", "family") => self.family_name().to_string(),
                ("model", "w1") => f17(self.w1()),
                ("numeric", "n_y") => self.n_y().to_string(),
                ("numeric", "nodes") => self.nodes().to_string(),
                ("numeric", "quad") => self.quad().to_string(),
                ("numeric", "tol") => f17(self.tol()),
                ("numeric", "kernel_steps") => self.kernel_steps().to_string(),
                ("material", "q_max") => f17(self.q_max()),
                ("material", "kappa_max") => f17(self.kappa_max()),
                ("material", "lambda_max") => f17(self.lambda_max()),
                ("material", "samples") => self.samples().to_string(),
                ("conjugate", "lambda") => list(&self.conjugate_lambda()),
                ("period-map", "lambda") => f17(self.pm_lambda()),
                ("period-map", "c") => list(&self.pm_c()),
                ("spectrum", "eps") => list(&self.spectrum_eps()),
                ("front", "epsilon") => f17(self.front_epsilon()),
                ("branch", "epsilon") => f17(self.branch_epsilon()),
                ("branch", "ds") => f17(self.branch_ds()),
                ("branch", "steps") => self.branch_steps().to_string(),
                ("branch", "ds_max") => f17(self.branch_ds_max()),
                ("branch", "n_ceiling") => f17(self.branch_n_ceiling()),
                ("branch", "lambda_ceiling") => f17(self.branch_lambda_ceiling()),
                _ => unreachable!("schema drifted from canonical()"),
            };
            out.push_str(section);
            out.push('.');
            out.push_str(key);
            out.push('=');
            out.push_str(&value);
            out.push('\n');
        }
        out
    }

    /// Hex SHA-256 of [`Settings::canonical`]; stamped into every sidecar.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

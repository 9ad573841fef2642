//! Run configuration: command-line flags layered over a `key=value` file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use npspectra::{NodePolicy, ProbeGrid, SpectrumMethod};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommandName {
    Spectrum,
    Sweep,
    Quasimode,
    BoundaryResidual,
    Ellipse,
    Density,
    Report,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Spectrum => "spectrum",
            CommandName::Sweep => "sweep",
            CommandName::Quasimode => "quasimode",
            CommandName::BoundaryResidual => "boundary-residual",
            CommandName::Ellipse => "ellipse",
            CommandName::Density => "density",
            CommandName::Report => "report",
        }
    }
}

/// Spectra of the Neumann-Poincaré operator on stadiums and ellipses.
#[derive(Parser, Debug)]
#[command(name = "npspectra", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandName,
    /// Flat key=value file; flags take precedence over its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// stadium, ellipse or circle
    #[arg(long)]
    pub shape: Option<String>,
    /// Stadium half-length, or a comma-separated list
    #[arg(long = "R", allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Ellipse semi-axis along x
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Ellipse semi-axis along y
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Number of boundary nodes
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    /// Number of closed-form ellipse eigenvalue pairs
    #[arg(long, allow_hyphen_values = true)]
    pub nmax: Option<String>,
    /// symmetrized or plain
    #[arg(long)]
    pub method: Option<String>,
    /// Spectral value(s) in (0, 1/2]
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Probe grid lower:upper:step
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Nodes per unit of R + 1 in the sweep policy
    #[arg(long = "per-unit", allow_hyphen_values = true)]
    pub per_unit: Option<String>,
    /// Node cap in the sweep policy
    #[arg(long, allow_hyphen_values = true)]
    pub cap: Option<String>,
    /// Witness target(s) x >= 0
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Ellipse ratios in (0, 1) for density witnesses
    #[arg(long = "r", allow_hyphen_values = true)]
    pub ratios: Option<String>,
    /// Witness tolerance
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<String>,
    /// JSON document to summarize
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv, json, svg
    #[arg(long)]
    pub format: Option<String>,
    /// Report failed invariant checks as warnings
    #[arg(long)]
    pub no_check: bool,
}

impl Cli {
    fn entries(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut push = |k: &'static str, val: &Option<String>| {
            if let Some(s) = val {
                v.push((k, s.clone()));
            }
        };
        push("shape", &self.shape);
        push("R", &self.r);
        push("a", &self.a);
        push("b", &self.b);
        push("n", &self.n);
        push("nmax", &self.nmax);
        push("method", &self.method);
        push("lambda", &self.lambda);
        push("grid", &self.grid);
        push("per-unit", &self.per_unit);
        push("cap", &self.cap);
        push("x", &self.x);
        push("r", &self.ratios);
        push("eps", &self.eps);
        push("format", &self.format);
        if let Some(p) = &self.input {
            v.push(("input", p.display().to_string()));
        }
        if let Some(p) = &self.out {
            v.push(("out", p.display().to_string()));
        }
        if self.no_check {
            v.push(("no-check", "true".into()));
        }
        v
    }
}

use CommandName::*;

const KEYS: &[(&str, &[CommandName])] = &[
    ("shape", &[Spectrum]),
    ("R", &[Spectrum, Sweep, Quasimode, BoundaryResidual]),
    ("a", &[Spectrum, Ellipse]),
    ("b", &[Spectrum, Ellipse]),
    ("n", &[Spectrum, Sweep, BoundaryResidual, Ellipse]),
    ("nmax", &[Ellipse]),
    ("method", &[Spectrum, Ellipse]),
    ("lambda", &[Quasimode, BoundaryResidual]),
    ("grid", &[Sweep]),
    ("per-unit", &[Sweep]),
    ("cap", &[Sweep]),
    ("x", &[Density]),
    ("r", &[Density]),
    ("eps", &[Density]),
    ("input", &[Report]),
    (
        "out",
        &[
            Spectrum,
            Sweep,
            Quasimode,
            BoundaryResidual,
            Ellipse,
            Density,
        ],
    ),
    (
        "format",
        &[
            Spectrum,
            Sweep,
            Quasimode,
            BoundaryResidual,
            Ellipse,
            Density,
        ],
    ),
    (
        "no-check",
        &[
            Spectrum,
            Sweep,
            Quasimode,
            BoundaryResidual,
            Ellipse,
            Density,
            Report,
        ],
    ),
];

#[derive(Clone, Debug, PartialEq)]
pub enum ShapeSpec {
    Stadium { r: f64 },
    Ellipse { a: f64, b: f64 },
    Circle,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Params {
    Spectrum {
        shape: ShapeSpec,
        n: usize,
        method: SpectrumMethod,
    },
    Sweep {
        r_list: Vec<f64>,
        policy: NodePolicy,
        grid: ProbeGrid,
    },
    Quasimode {
        lambdas: Vec<f64>,
        r_list: Vec<f64>,
    },
    BoundaryResidual {
        lambdas: Vec<f64>,
        r_list: Vec<f64>,
        n: Option<usize>,
    },
    Ellipse {
        a: f64,
        b: f64,
        n: usize,
        n_max: usize,
        method: SpectrumMethod,
    },
    Density {
        xs: Vec<f64>,
        r_list: Vec<f64>,
        eps: f64,
    },
    Report {
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub params: Params,
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub check: bool,
}

/// Parses `args` (program name first) and the optional config file.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)
        .map_err(|e| CliError::Usage(e.to_string().lines().next().unwrap_or("").to_string()))?;
    RunConfig::from_cli(&cli)
}

/// Parses a flat `key=value` file. Blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config line {}: expected key=value, got `{line}`",
                lineno + 1
            ))
        })?;
        let key = key.trim();
        if key != "command" && !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        if map
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(CliError::Usage(format!(
                "config line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

struct Entries {
    command: CommandName,
    map: BTreeMap<String, String>,
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.raw(key)
            .ok_or_else(|| usage(format!("`{}` needs --{key}", self.command.as_str())))
    }

    fn f64_of(key: &str, s: &str) -> Result<f64, CliError> {
        match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(usage(format!(
                "invalid value `{s}` for `{key}`: expected a finite number"
            ))),
        }
    }

    fn f64(&self, key: &str, default: Option<f64>) -> Result<f64, CliError> {
        match (self.raw(key), default) {
            (Some(s), _) => Self::f64_of(key, s),
            (None, Some(d)) => Ok(d),
            (None, None) => self.require(key).map(|_| 0.0),
        }
    }

    fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(s) => {
                let v = s
                    .split(',')
                    .map(|item| Self::f64_of(key, item))
                    .collect::<Result<Vec<_>, _>>()?;
                if v.is_empty() {
                    return Err(usage(format!("`{key}` must not be empty")));
                }
                Ok(v)
            }
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.raw(key)
            .map(|s| {
                s.trim().parse::<usize>().map_err(|_| {
                    usage(format!(
                        "invalid value `{s}` for `{key}`: expected a nonnegative integer"
                    ))
                })
            })
            .transpose()
    }

    fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(s) => Err(usage(format!(
                "invalid value `{s}` for `{key}`: expected true or false"
            ))),
        }
    }

    fn method(&self) -> Result<SpectrumMethod, CliError> {
        match self.raw("method").unwrap_or("symmetrized") {
            "symmetrized" => Ok(SpectrumMethod::Symmetrized),
            "plain" => Ok(SpectrumMethod::Plain),
            s => Err(usage(format!(
                "invalid value `{s}` for `method`: expected symmetrized or plain"
            ))),
        }
    }
}

fn check_nodes(n: usize) -> Result<usize, CliError> {
    if n < npspectra::geometry::MIN_NODES || n % 2 == 1 {
        return Err(usage(format!(
            "invalid value `{n}` for `n`: expected an even count of at least {}",
            npspectra::geometry::MIN_NODES
        )));
    }
    Ok(n)
}

fn check_lambdas(v: &[f64]) -> Result<(), CliError> {
    for &l in v {
        if !(l > 0.0 && l <= 0.5) {
            return Err(usage(format!(
                "invalid value `{l}` for `lambda`: expected 0 < lambda <= 0.5"
            )));
        }
    }
    Ok(())
}

fn check_aspects(v: &[f64], min: f64) -> Result<(), CliError> {
    for &r in v {
        if r < min {
            return Err(usage(format!(
                "invalid value `{r}` for `R`: expected R >= {min}"
            )));
        }
    }
    Ok(())
}

fn parse_grid(s: &str) -> Result<ProbeGrid, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!(
            "invalid value `{s}` for `grid`: expected lower:upper:step"
        )));
    }
    let lower = Entries::f64_of("grid", parts[0])?;
    let upper = Entries::f64_of("grid", parts[1])?;
    let step = Entries::f64_of("grid", parts[2])?;
    ProbeGrid::new(lower, upper, step)
        .map_err(|e| usage(format!("invalid value `{s}` for `grid`: {e}")))
}

fn parse_formats(s: &str) -> Result<Formats, CliError> {
    let mut f = Formats::default();
    for item in s.split(',').map(str::trim) {
        match item {
            "csv" => f.csv = true,
            "json" => f.json = true,
            "svg" => f.svg = true,
            other => {
                return Err(usage(format!(
                    "invalid value `{other}` in `format`: expected csv, json or svg"
                )))
            }
        }
    }
    Ok(f)
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn method_name(m: SpectrumMethod) -> &'static str {
    match m {
        SpectrumMethod::Symmetrized => "symmetrized",
        SpectrumMethod::Plain => "plain",
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let mut map = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        if let Some(c) = map.remove("command") {
            if c != cli.command.as_str() {
                return Err(usage(format!(
                    "config file is for `{c}` but the command is `{}`",
                    cli.command.as_str()
                )));
            }
        }
        for (k, v) in cli.entries() {
            map.insert(k.to_string(), v);
        }
        Self::from_entries(cli.command, map)
    }

    fn from_entries(command: CommandName, map: BTreeMap<String, String>) -> Result<Self, CliError> {
        for key in map.keys() {
            let allowed = KEYS
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, cmds)| cmds.contains(&command))
                .unwrap_or(false);
            if !allowed {
                let valid: Vec<&str> = KEYS
                    .iter()
                    .filter(|(_, cmds)| cmds.contains(&command))
                    .map(|(k, _)| *k)
                    .collect();
                return Err(usage(format!(
                    "`{key}` does not apply to `{}` (valid keys: {})",
                    command.as_str(),
                    valid.join(", ")
                )));
            }
        }
        let e = Entries { command, map };
        let params = match command {
            Spectrum => {
                let shape = match e.raw("shape").unwrap_or("stadium") {
                    "stadium" => {
                        let r = e.f64("R", None)?;
                        check_aspects(&[r], 1.0)?;
                        ShapeSpec::Stadium { r }
                    }
                    "ellipse" => {
                        let (a, b) = (e.f64("a", None)?, e.f64("b", None)?);
                        if !(b > 0.0 && a >= b) {
                            return Err(usage(format!(
                                "ellipse needs a >= b > 0, got a={a}, b={b}"
                            )));
                        }
                        ShapeSpec::Ellipse { a, b }
                    }
                    "circle" => ShapeSpec::Circle,
                    s => {
                        return Err(usage(format!(
                            "invalid value `{s}` for `shape`: expected stadium, ellipse or circle"
                        )))
                    }
                };
                let misplaced = match shape {
                    ShapeSpec::Stadium { .. } => ["a", "b"].iter().find(|k| e.raw(k).is_some()),
                    ShapeSpec::Ellipse { .. } => ["R"].iter().find(|k| e.raw(k).is_some()),
                    ShapeSpec::Circle => ["R", "a", "b"].iter().find(|k| e.raw(k).is_some()),
                };
                if let Some(k) = misplaced {
                    return Err(usage(format!("`{k}` does not apply to this shape")));
                }
                let n = match (e.usize("n")?, &shape) {
                    (Some(n), _) => n,
                    (None, ShapeSpec::Stadium { r }) => NodePolicy::default().nodes_for(*r),
                    (None, _) => 256,
                };
                Params::Spectrum {
                    shape,
                    n: check_nodes(n)?,
                    method: e.method()?,
                }
            }
            Sweep => {
                let r_list = e.list("R", &[2.0, 4.0, 8.0, 16.0])?;
                check_aspects(&r_list, 1.0)?;
                if r_list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(usage("`R` must be strictly increasing".into()));
                }
                let policy = match e.usize("n")? {
                    Some(n) => {
                        if e.raw("per-unit").is_some() || e.raw("cap").is_some() {
                            return Err(usage(
                                "`n` fixes the node count; drop `per-unit` and `cap`".into(),
                            ));
                        }
                        NodePolicy::Fixed {
                            n_nodes: check_nodes(n)?,
                        }
                    }
                    None => {
                        let per_unit = e.usize("per-unit")?.unwrap_or(64);
                        let cap = e.usize("cap")?.unwrap_or(4096);
                        if per_unit < 16 || cap < npspectra::geometry::MIN_NODES {
                            return Err(usage("`per-unit` must be >= 16 and `cap` >= 32".into()));
                        }
                        NodePolicy::Linear { per_unit, cap }
                    }
                };
                let grid = parse_grid(e.raw("grid").unwrap_or("-0.45:0.45:0.01"))?;
                Params::Sweep {
                    r_list,
                    policy,
                    grid,
                }
            }
            Quasimode => {
                let lambdas = e.list("lambda", &[0.25])?;
                check_lambdas(&lambdas)?;
                let r_list = e.list("R", &[16.0])?;
                check_aspects(&r_list, 1.0)?;
                Params::Quasimode { lambdas, r_list }
            }
            BoundaryResidual => {
                let lambdas = e.list("lambda", &[0.3, 0.5])?;
                check_lambdas(&lambdas)?;
                let r_list = e.list("R", &[4.0, 8.0, 16.0])?;
                check_aspects(&r_list, 2.0)?;
                let n = e.usize("n")?.map(check_nodes).transpose()?;
                Params::BoundaryResidual { lambdas, r_list, n }
            }
            Ellipse => {
                let (a, b) = (e.f64("a", Some(2.0))?, e.f64("b", Some(1.0))?);
                if !(b > 0.0 && a > b) {
                    return Err(usage(format!(
                        "ellipse comparison needs a > b > 0, got a={a}, b={b}"
                    )));
                }
                let n = check_nodes(e.usize("n")?.unwrap_or(256))?;
                let n_max = e.usize("nmax")?.unwrap_or(3);
                if n_max == 0 || 2 * n_max >= n {
                    return Err(usage(format!(
                        "invalid value `{n_max}` for `nmax`: expected 1 <= nmax < n/2"
                    )));
                }
                Params::Ellipse {
                    a,
                    b,
                    n,
                    n_max,
                    method: e.method()?,
                }
            }
            Density => {
                let xs = e.list("x", &[0.1, 0.5, 1.0, 3.0])?;
                if let Some(x) = xs.iter().find(|x| **x < 0.0) {
                    return Err(usage(format!(
                        "invalid value `{x}` for `x`: expected x >= 0"
                    )));
                }
                let r_list = e.list("r", &[0.9, 0.99, 0.999])?;
                if let Some(r) = r_list.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
                    return Err(usage(format!(
                        "invalid value `{r}` for `r`: expected 0 < r < 1"
                    )));
                }
                let eps = e.f64("eps", Some(0.01))?;
                if eps.is_nan() || eps <= 0.0 {
                    return Err(usage(format!(
                        "invalid value `{eps}` for `eps`: expected eps > 0"
                    )));
                }
                Params::Density { xs, r_list, eps }
            }
            Report => Params::Report {
                input: PathBuf::from(e.require("input")?),
            },
        };
        let formats = parse_formats(e.raw("format").unwrap_or("csv,json"))?;
        if formats.svg && !matches!(command, Spectrum | Sweep | Ellipse) {
            return Err(usage(format!(
                "`{}` has no plot; use --format csv,json",
                command.as_str()
            )));
        }
        Ok(RunConfig {
            command,
            params,
            out_dir: PathBuf::from(e.raw("out").unwrap_or(".")),
            formats,
            check: !e.bool("no-check")?,
        })
    }

    /// Effective computational parameters, in a fixed order.
    pub fn parameter_lines(&self) -> Vec<(String, String)> {
        let mut v: Vec<(&str, String)> = Vec::new();
        match &self.params {
            Params::Spectrum { shape, n, method } => {
                match shape {
                    ShapeSpec::Stadium { r } => {
                        v.push(("shape", "stadium".into()));
                        v.push(("R", r.to_string()));
                    }
                    ShapeSpec::Ellipse { a, b } => {
                        v.push(("shape", "ellipse".into()));
                        v.push(("a", a.to_string()));
                        v.push(("b", b.to_string()));
                    }
                    ShapeSpec::Circle => v.push(("shape", "circle".into())),
                }
                v.push(("n", n.to_string()));
                v.push(("method", method_name(*method).into()));
            }
            Params::Sweep {
                r_list,
                policy,
                grid,
            } => {
                v.push(("R", join(r_list)));
                match policy {
                    NodePolicy::Fixed { n_nodes } => v.push(("n", n_nodes.to_string())),
                    NodePolicy::Linear { per_unit, cap } => {
                        v.push(("per-unit", per_unit.to_string()));
                        v.push(("cap", cap.to_string()));
                    }
                }
                v.push((
                    "grid",
                    format!("{}:{}:{}", grid.lower, grid.upper, grid.step),
                ));
            }
            Params::Quasimode { lambdas, r_list } => {
                v.push(("lambda", join(lambdas)));
                v.push(("R", join(r_list)));
            }
            Params::BoundaryResidual { lambdas, r_list, n } => {
                v.push(("lambda", join(lambdas)));
                v.push(("R", join(r_list)));
                if let Some(n) = n {
                    v.push(("n", n.to_string()));
                }
            }
            Params::Ellipse {
                a,
                b,
                n,
                n_max,
                method,
            } => {
                v.push(("a", a.to_string()));
                v.push(("b", b.to_string()));
                v.push(("n", n.to_string()));
                v.push(("nmax", n_max.to_string()));
                v.push(("method", method_name(*method).into()));
            }
            Params::Density { xs, r_list, eps } => {
                v.push(("x", join(xs)));
                v.push(("r", join(r_list)));
                v.push(("eps", eps.to_string()));
            }
            Params::Report { input } => v.push(("input", input.display().to_string())),
        }
        v.into_iter().map(|(k, s)| (k.to_string(), s)).collect()
    }

    /// The computational part of the configuration; output location and
    /// formats are excluded so they do not affect content hashes.
    pub fn canonical(&self) -> String {
        let mut s = format!("command={}\n", self.command.as_str());
        for (k, v) in self.parameter_lines() {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }

    /// Normalized echo of the effective configuration, readable by `--config`.
    pub fn echo(&self) -> String {
        let mut s = self.canonical();
        let mut formats = Vec::new();
        if self.formats.csv {
            formats.push("csv");
        }
        if self.formats.json {
            formats.push("json");
        }
        if self.formats.svg {
            formats.push("svg");
        }
        writeln!(s, "out={}", self.out_dir.display()).unwrap();
        writeln!(s, "format={}", formats.join(",")).unwrap();
        writeln!(s, "no-check={}", !self.check).unwrap();
        s
    }
}

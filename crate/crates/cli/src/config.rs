//! Flat key-value run configuration and the small expression grammar for
//! sampled functions (sums of c*sin(k*pi*x), c*x^m and constants).
//!
//! Unknown keys are hard errors with the offending line, so typos never
//! silently fall back to defaults.

use plap_core::grid::{Grid, GridFunction};
use plap_core::model::{ModelConfig, Nonlinearity, PowerTerm};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = Result<T, ConfigError>;

/// One term of the expression grammar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Term {
    /// c * sin(k * pi * x)
    Sine { coeff: f64, mode: u32 },
    /// c * x^m (m = 0 covers plain constants)
    Power { coeff: f64, exponent: u32 },
}

/// Parsed expression: a sum of terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        // fold from +0.0: the empty sum must be positive zero so zero
        // expressions serialize as "0".
        self.terms.iter().fold(0.0, |acc, t| {
            acc + match t {
                Term::Sine { coeff, mode } => {
                    coeff * (*mode as f64 * std::f64::consts::PI * x).sin()
                }
                Term::Power { coeff, exponent } => coeff * x.powi(*exponent as i32),
            }
        })
    }

    pub fn sample(&self, grid: Grid) -> GridFunction {
        GridFunction::sample(grid, |x| self.eval(x))
    }
}

/// Splits an expression into signed term strings, keeping scientific
/// notation ("1e-3") intact.
fn split_terms(expr: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let chars: Vec<char> = expr.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        if (c == '+' || c == '-') && i > 0 {
            let prev = chars[i - 1];
            let exponent_sign = prev == 'e' || prev == 'E';
            if !exponent_sign && !current.trim().is_empty() {
                terms.push(current.clone());
                current.clear();
            }
            if exponent_sign {
                current.push(c);
                continue;
            }
            if c == '-' {
                current.push(c);
            }
            continue;
        }
        current.push(c);
    }
    if !current.trim().is_empty() {
        terms.push(current);
    }
    terms
}

fn parse_number(s: &str, ctx: &str) -> CResult<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| ConfigError(format!("{ctx}: '{}' is not a number", s.trim())))
}

fn parse_term(term: &str) -> CResult<Term> {
    let t = term.trim().replace(' ', "");
    if let Some(idx) = t.find("*sin(") {
        let coeff = parse_number(&t[..idx], "sine term coefficient")?;
        let inner = &t[idx + 5..];
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| ConfigError(format!("sine term '{term}' misses ')'")))?;
        let mode_str = inner
            .strip_suffix("*pi*x")
            .ok_or_else(|| ConfigError(format!("sine term '{term}' must look like c*sin(k*pi*x)")))?;
        let mode: u32 = mode_str.parse().map_err(|_| {
            ConfigError(format!("sine term '{term}': mode '{mode_str}' is not a positive integer"))
        })?;
        if mode == 0 {
            return Err(ConfigError(format!("sine term '{term}': mode must be >= 1")));
        }
        return Ok(Term::Sine { coeff, mode });
    }
    if let Some(idx) = t.find("*x^") {
        let coeff = parse_number(&t[..idx], "power term coefficient")?;
        let exp_str = &t[idx + 3..];
        let exponent: u32 = exp_str.parse().map_err(|_| {
            ConfigError(format!("power term '{term}': exponent '{exp_str}' is not an integer >= 0"))
        })?;
        return Ok(Term::Power { coeff, exponent });
    }
    if let Some(coeff_str) = t.strip_suffix("*x") {
        let coeff = parse_number(coeff_str, "linear term coefficient")?;
        return Ok(Term::Power { coeff, exponent: 1 });
    }
    let coeff = parse_number(&t, "constant term")?;
    Ok(Term::Power { coeff, exponent: 0 })
}

/// Parses the tiny grammar: sums of c*sin(k*pi*x), c*x^m and constants.
pub fn parse_expression(expr: &str) -> CResult<Expr> {
    let trimmed = expr.trim();
    if trimmed.is_empty() {
        return Err(ConfigError("empty expression".into()));
    }
    let mut terms = Vec::new();
    for t in split_terms(trimmed) {
        let term = parse_term(&t)?;
        // Drop exact zero terms ("0" stays a valid expression).
        match term {
            Term::Power { coeff, .. } | Term::Sine { coeff, .. } if coeff == 0.0 => {}
            other => terms.push(other),
        }
    }
    Ok(Expr { terms })
}

/// Fully resolved run configuration: the validated model plus the pieces
/// only the CLI needs (initial data, resamplable forcing).
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelConfig,
    /// Forcing expression when given symbolically; None when g came from a
    /// sample file (then refinement commands cannot resample it).
    pub g_expr: Option<Expr>,
    pub u0_expr: Expr,
    pub v0_expr: Expr,
    /// Echo of every effective key for the manifest.
    pub echo: Vec<(String, String)>,
}

impl RunConfig {
    pub fn initial_state(&self) -> plap_core::dynamics::State {
        let g = self.model.grid();
        plap_core::dynamics::State::new(self.u0_expr.sample(g), self.v0_expr.sample(g), 0.0)
    }

    /// Rebuilds the model on a finer grid; requires a symbolic forcing.
    pub fn resampled(&self, grid_n: usize) -> CResult<ModelConfig> {
        let expr = self.g_expr.as_ref().ok_or_else(|| {
            ConfigError("grid refinement needs g_expression (sample files cannot be resampled)".into())
        })?;
        let grid = Grid::new(grid_n).map_err(|e| ConfigError(e.to_string()))?;
        let mut model = self.model.clone();
        model.grid_n = grid_n;
        model.forcing = expr.sample(grid);
        Ok(model)
    }
}

struct RawConfig {
    p: f64,
    poly_coeffs: Vec<f64>,
    power_terms: Vec<PowerTerm>,
    g_expression: Option<String>,
    g_samples: Option<PathBuf>,
    grid_n: usize,
    dt: f64,
    t_end: f64,
    newton_tol: f64,
    newton_max_iter: u32,
    u0_expression: String,
    v0_expression: String,
}

impl Default for RawConfig {
    fn default() -> Self {
        RawConfig {
            p: 3.0,
            poly_coeffs: vec![0.0, 0.0, 0.0, 1.0],
            power_terms: Vec::new(),
            g_expression: None,
            g_samples: None,
            grid_n: 64,
            dt: 0.01,
            t_end: 10.0,
            newton_tol: 1e-10,
            newton_max_iter: 30,
            u0_expression: "0".into(),
            v0_expression: "0".into(),
        }
    }
}

fn parse_f64_list(v: &str, ctx: &str) -> CResult<Vec<f64>> {
    let v = v.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_number(s, ctx)).collect()
}

fn parse_power_terms(v: &str, ctx: &str) -> CResult<Vec<PowerTerm>> {
    let v = v.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|pair| {
            let mut it = pair.split(':');
            match (it.next(), it.next(), it.next()) {
                (Some(b), Some(q), None) => Ok(PowerTerm {
                    coeff: parse_number(b, ctx)?,
                    exponent: parse_number(q, ctx)?,
                }),
                _ => Err(ConfigError(format!(
                    "{ctx}: power term '{pair}' must be 'b:q'"
                ))),
            }
        })
        .collect()
}

/// Parses the flat key-value file. Every key is optional (defaults fill
/// in); unknown keys are errors carrying the line number.
pub fn parse_config(path: &Path) -> CResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_config_text(&text, path)
}

/// The built-in defaults, used when no --config is given.
pub fn default_config() -> RunConfig {
    parse_config_text("", Path::new("<defaults>")).expect("defaults are valid")
}

fn parse_config_text(text: &str, path: &Path) -> CResult<RunConfig> {
    let mut raw = RawConfig::default();

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let at = |msg: String| ConfigError(format!("{}:{line_no}: {msg}", path.display()));
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "p" => raw.p = parse_number(value, "p").map_err(|e| at(e.0))?,
            "poly_coeffs" => {
                raw.poly_coeffs = parse_f64_list(value, "poly_coeffs").map_err(|e| at(e.0))?
            }
            "power_terms" => {
                raw.power_terms = parse_power_terms(value, "power_terms").map_err(|e| at(e.0))?
            }
            "g_expression" => raw.g_expression = Some(value.to_string()),
            "g_samples" => raw.g_samples = Some(PathBuf::from(value)),
            "grid_n" => {
                raw.grid_n = value
                    .parse()
                    .map_err(|_| at(format!("grid_n: '{value}' is not a positive integer")))?
            }
            "dt" => raw.dt = parse_number(value, "dt").map_err(|e| at(e.0))?,
            "t_end" => raw.t_end = parse_number(value, "t_end").map_err(|e| at(e.0))?,
            "newton_tol" => raw.newton_tol = parse_number(value, "newton_tol").map_err(|e| at(e.0))?,
            "newton_max_iter" => {
                raw.newton_max_iter = value
                    .parse()
                    .map_err(|_| at(format!("newton_max_iter: '{value}' is not an integer")))?
            }
            "u0_expression" => raw.u0_expression = value.to_string(),
            "v0_expression" => raw.v0_expression = value.to_string(),
            other => return Err(at(format!("unknown key '{other}'"))),
        }
    }

    if raw.g_expression.is_some() && raw.g_samples.is_some() {
        return Err(ConfigError(format!(
            "{}: give either g_expression or g_samples, not both",
            path.display()
        )));
    }

    let grid = Grid::new(raw.grid_n).map_err(|e| ConfigError(e.to_string()))?;
    let (forcing, g_expr) = match (&raw.g_expression, &raw.g_samples) {
        (Some(expr_str), None) => {
            let expr = parse_expression(expr_str)
                .map_err(|e| ConfigError(format!("{}: g_expression: {e}", path.display())))?;
            (expr.sample(grid), Some(expr))
        }
        (None, Some(sample_path)) => {
            let resolved = if sample_path.is_relative() {
                path.parent().unwrap_or(Path::new(".")).join(sample_path)
            } else {
                sample_path.clone()
            };
            let gf = plap_core::io::read_grid_function_csv(&resolved, grid)
                .map_err(|e| ConfigError(format!("g_samples: {e}")))?;
            (gf, None)
        }
        (None, None) => (GridFunction::zeros(grid), Some(Expr::default())),
        _ => unreachable!(),
    };

    let nonlinearity = Nonlinearity::from_parts(raw.poly_coeffs.clone(), raw.power_terms.clone())
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let model = ModelConfig::new(
        raw.p,
        nonlinearity,
        forcing,
        raw.grid_n,
        raw.dt,
        raw.t_end,
        raw.newton_tol,
        raw.newton_max_iter,
    )
    .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;

    let u0_expr = parse_expression(&raw.u0_expression)
        .map_err(|e| ConfigError(format!("{}: u0_expression: {e}", path.display())))?;
    let v0_expr = parse_expression(&raw.v0_expression)
        .map_err(|e| ConfigError(format!("{}: v0_expression: {e}", path.display())))?;

    let power_echo = raw
        .power_terms
        .iter()
        .map(|t| format!("{}:{}", t.coeff, t.exponent))
        .collect::<Vec<_>>()
        .join(", ");
    let echo = vec![
        ("p".into(), raw.p.to_string()),
        (
            "poly_coeffs".into(),
            raw.poly_coeffs
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(", "),
        ),
        ("power_terms".into(), power_echo),
        (
            "g".into(),
            raw.g_expression
                .clone()
                .or_else(|| raw.g_samples.as_ref().map(|p| p.display().to_string()))
                .unwrap_or_else(|| "0".into()),
        ),
        ("grid_n".into(), raw.grid_n.to_string()),
        ("dt".into(), raw.dt.to_string()),
        ("t_end".into(), raw.t_end.to_string()),
        ("newton_tol".into(), raw.newton_tol.to_string()),
        ("newton_max_iter".into(), raw.newton_max_iter.to_string()),
        ("u0_expression".into(), raw.u0_expression.clone()),
        ("v0_expression".into(), raw.v0_expression.clone()),
    ];

    Ok(RunConfig {
        model,
        g_expr,
        u0_expr,
        v0_expr,
        echo,
    })
}

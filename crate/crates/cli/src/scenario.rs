//! Declarative scenario files.
//!
//! Line-oriented `key = value` entries grouped under `[section]` headers.
//! Values are numbers, double-quoted strings or bracketed numeric arrays; an
//! array may continue over several lines until its closing bracket. Matrices
//! are row-major arrays accompanied by a `rows` key. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use hierflow::convex::ConvexFunction;
use hierflow::integrator::{Parameterization, Problem, RunConfig, Scheme};
use hierflow::operator::MonotoneOperator;
use hierflow::report::Tag;
use hierflow::schedule::{Direction, Schedule};
use hierflow::Point;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError(pub Vec<Diagnostic>);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        f.write_str(&lines.join("\n"))
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Str(String),
    Arr(Vec<f64>),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Num(_) => "a number",
            Value::Str(_) => "a string",
            Value::Arr(_) => "an array",
        }
    }
}

/// A convex function from the catalog, as declared.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Zero,
    HalfSquaredNorm,
    AbsSum,
    Quadratic { q: Vec<f64>, c: Vec<f64>, r: f64 },
    LeastSquares { rows: usize, a: Vec<f64>, b: Vec<f64> },
    IndicatorAffine { rows: usize, a: Vec<f64>, b: Vec<f64> },
    SqdistAffine { rows: usize, a: Vec<f64>, b: Vec<f64> },
    IndicatorBox { lo: Vec<f64>, hi: Vec<f64> },
    SqdistBox { lo: Vec<f64>, hi: Vec<f64> },
    IndicatorBall { radius: f64 },
    SupportBall { radius: f64 },
}

impl FunctionSpec {
    pub fn type_name(&self) -> &'static str {
        match self {
            FunctionSpec::Zero => "zero",
            FunctionSpec::HalfSquaredNorm => "half_squared_norm",
            FunctionSpec::AbsSum => "abs_sum",
            FunctionSpec::Quadratic { .. } => "quadratic",
            FunctionSpec::LeastSquares { .. } => "least_squares",
            FunctionSpec::IndicatorAffine { .. } => "indicator_affine",
            FunctionSpec::SqdistAffine { .. } => "sqdist_affine",
            FunctionSpec::IndicatorBox { .. } => "indicator_box",
            FunctionSpec::SqdistBox { .. } => "sqdist_box",
            FunctionSpec::IndicatorBall { .. } => "indicator_ball",
            FunctionSpec::SupportBall { .. } => "support_ball",
        }
    }

    pub fn build(&self, dim: usize) -> hierflow::Result<ConvexFunction> {
        let v = |xs: &[f64]| DVector::from_column_slice(xs);
        let mat = |rows: usize, xs: &[f64]| -> hierflow::Result<DMatrix<f64>> {
            if rows == 0 || xs.len() != rows * dim {
                return Err(hierflow::Error::invalid(format!(
                    "matrix with {rows} rows and {dim} columns needs {} entries, got {}",
                    rows * dim,
                    xs.len()
                )));
            }
            Ok(DMatrix::from_row_slice(rows, dim, xs))
        };
        match self {
            FunctionSpec::Zero => ConvexFunction::zero(dim),
            FunctionSpec::HalfSquaredNorm => ConvexFunction::half_squared_norm(dim),
            FunctionSpec::AbsSum => ConvexFunction::abs_sum(dim),
            FunctionSpec::Quadratic { q, c, r } => ConvexFunction::quadratic(mat(dim, q)?, v(c), *r),
            FunctionSpec::LeastSquares { rows, a, b } => ConvexFunction::least_squares(mat(*rows, a)?, v(b)),
            FunctionSpec::IndicatorAffine { rows, a, b } => ConvexFunction::indicator_affine(mat(*rows, a)?, v(b)),
            FunctionSpec::SqdistAffine { rows, a, b } => ConvexFunction::sqdist_affine(mat(*rows, a)?, v(b)),
            FunctionSpec::IndicatorBox { lo, hi } => ConvexFunction::indicator_box(v(lo), v(hi)),
            FunctionSpec::SqdistBox { lo, hi } => ConvexFunction::sqdist_box(v(lo), v(hi)),
            FunctionSpec::IndicatorBall { radius } => ConvexFunction::indicator_ball(*radius, dim),
            FunctionSpec::SupportBall { radius } => ConvexFunction::support_ball(*radius, dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    Affine { m: Vec<f64>, q: Vec<f64> },
    Rotation { angle: f64 },
}

impl OperatorSpec {
    pub fn build(&self, dim: usize) -> hierflow::Result<MonotoneOperator> {
        match self {
            OperatorSpec::Affine { m, q } => {
                if m.len() != dim * dim {
                    return Err(hierflow::Error::invalid(format!(
                        "operator matrix needs {} entries, got {}",
                        dim * dim,
                        m.len()
                    )));
                }
                MonotoneOperator::affine(DMatrix::from_row_slice(dim, dim, m), DVector::from_column_slice(q))
            }
            OperatorSpec::Rotation { angle } => {
                if dim != 2 {
                    return Err(hierflow::Error::invalid("rotation operator acts on dimension 2"));
                }
                MonotoneOperator::rotation(*angle)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dynamics {
    Gradient { phi: FunctionSpec, parameterization: Parameterization },
    Monotone { operator: OperatorSpec },
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleSpec {
    None,
    /// Limit problem solved directly.
    Solve,
    Point(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dim: usize,
    pub schedule: Schedule,
    pub dynamics: Dynamics,
    pub psi: FunctionSpec,
    pub h: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub x0: Vec<f64>,
    /// Extra runs at `h/2, h/4, …` for the refinement table; 0 for none.
    pub refinements: usize,
    pub probes: Vec<(String, Vec<f64>)>,
    pub oracle: OracleSpec,
    pub csv: String,
    pub report: String,
    pub tags: Vec<Tag>,
}

impl Scenario {
    pub fn problem(&self) -> hierflow::Result<Problem> {
        let psi = self.psi.build(self.dim)?;
        match &self.dynamics {
            Dynamics::Gradient { phi, parameterization } => {
                Problem::gradient(phi.build(self.dim)?, psi, self.schedule.clone(), *parameterization)
            }
            Dynamics::Monotone { operator } => Problem::monotone(operator.build(self.dim)?, psi, self.schedule.clone()),
        }
    }

    pub fn initial_state(&self) -> Point {
        DVector::from_column_slice(&self.x0)
    }

    pub fn run_config(&self) -> RunConfig {
        let probes = self.probes.iter().map(|(_, z)| DVector::from_column_slice(z)).collect();
        RunConfig::new(self.h, self.t_end)
            .with_probes(probes)
            .with_scheme(self.scheme)
    }
}

type Entry = (usize, Value);

/// Entries of one section in file order, with the header line.
struct Section {
    line: usize,
    entries: Vec<(String, Entry)>,
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_number(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(format!("'{}' is not a finite number", s.trim())),
        Err(_) => Err(format!("'{}' is not a number", s.trim())),
    }
}

fn parse_value(s: &str) -> Result<Value, String> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('"') {
        let inner = rest.strip_suffix('"').ok_or("unterminated string")?;
        if inner.contains('"') {
            return Err("strings may not contain quotes".into());
        }
        return Ok(Value::Str(inner.to_string()));
    }
    if let Some(rest) = s.strip_prefix('[') {
        let inner = rest.strip_suffix(']').ok_or("unterminated array")?;
        if inner.trim().is_empty() {
            return Ok(Value::Arr(Vec::new()));
        }
        return inner.split(',').map(parse_number).collect::<Result<_, _>>().map(Value::Arr);
    }
    if s.is_empty() {
        return Err("missing value".into());
    }
    parse_number(s).map(Value::Num)
}

/// Sections in file order. Syntax errors are collected, not fatal.
fn tokenize(text: &str, diags: &mut Vec<Diagnostic>) -> Vec<(String, Section)> {
    let mut sections: Vec<(String, Section)> = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let line = strip_comment(lines[i]).trim().to_string();
        i += 1;
        if line.is_empty() {
            continue;
        }
        let mut err = |message: String| diags.push(Diagnostic { line: lineno, message });
        if let Some(rest) = line.strip_prefix('[') {
            match rest.strip_suffix(']') {
                Some(name) if !name.trim().is_empty() && !name.contains(['[', ']']) => {
                    let name = name.trim().to_string();
                    if sections.iter().any(|(n, _)| *n == name) {
                        err(format!("duplicate section [{name}]"));
                    }
                    sections.push((
                        name,
                        Section {
                            line: lineno,
                            entries: Vec::new(),
                        },
                    ));
                }
                _ => err(format!("malformed section header '{line}'")),
            }
            continue;
        }
        let Some((key, raw)) = line.split_once('=') else {
            err(format!("expected 'key = value', found '{line}'"));
            continue;
        };
        let key = key.trim().to_string();
        let mut raw = raw.trim().to_string();
        if raw.starts_with('[') {
            while !raw.contains(']') && i < lines.len() && !lines[i].contains(['=', '[']) {
                raw.push(' ');
                raw.push_str(strip_comment(lines[i]).trim());
                i += 1;
            }
        }
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            err(format!("invalid key '{key}'"));
            continue;
        }
        let Some((_, section)) = sections.last_mut() else {
            err(format!("key '{key}' appears before any [section]"));
            continue;
        };
        if section.entries.iter().any(|(k, _)| *k == key) {
            err(format!("duplicate key '{key}'"));
            continue;
        }
        match parse_value(&raw) {
            Ok(v) => section.entries.push((key, (lineno, v))),
            Err(m) => err(format!("{key}: {m}")),
        }
    }
    sections
}

/// Typed access to one section that records which keys were consumed.
struct Reader<'a> {
    name: &'a str,
    section: Option<&'a Section>,
    used: Vec<&'a str>,
}

impl<'a> Reader<'a> {
    fn header_line(&self) -> usize {
        self.section.map_or(0, |s| s.line)
    }

    fn get(&mut self, key: &'a str) -> Option<&'a Entry> {
        let s = self.section?;
        let found = s.entries.iter().find(|(k, _)| k == key).map(|(_, e)| e);
        if found.is_some() {
            self.used.push(key);
        }
        found
    }

    fn line(&self, key: &str) -> usize {
        self.section
            .and_then(|s| s.entries.iter().find(|(k, _)| k == key))
            .map_or(self.header_line(), |(_, (l, _))| *l)
    }

    fn missing(&self, key: &str) -> Diagnostic {
        Diagnostic {
            line: self.header_line(),
            message: format!("[{}] is missing required key '{key}'", self.name),
        }
    }

    fn wrong(&self, key: &str, line: usize, want: &str, v: &Value) -> Diagnostic {
        Diagnostic {
            line,
            message: format!("{}.{key} must be {want}, found {}", self.name, v.kind()),
        }
    }

    fn num(&mut self, key: &'a str) -> Result<Option<(usize, f64)>, Diagnostic> {
        match self.get(key) {
            None => Ok(None),
            Some((l, Value::Num(x))) => Ok(Some((*l, *x))),
            Some((l, v)) => Err(self.wrong(key, *l, "a number", v)),
        }
    }

    fn str(&mut self, key: &'a str) -> Result<Option<(usize, String)>, Diagnostic> {
        match self.get(key) {
            None => Ok(None),
            Some((l, Value::Str(x))) => Ok(Some((*l, x.clone()))),
            Some((l, v)) => Err(self.wrong(key, *l, "a string", v)),
        }
    }

    fn arr(&mut self, key: &'a str) -> Result<Option<(usize, Vec<f64>)>, Diagnostic> {
        match self.get(key) {
            None => Ok(None),
            Some((l, Value::Arr(x))) => Ok(Some((*l, x.clone()))),
            Some((l, v)) => Err(self.wrong(key, *l, "an array", v)),
        }
    }

    fn req_num(&mut self, key: &'a str) -> Result<(usize, f64), Diagnostic> {
        self.num(key)?.ok_or_else(|| self.missing(key))
    }

    fn req_str(&mut self, key: &'a str) -> Result<(usize, String), Diagnostic> {
        self.str(key)?.ok_or_else(|| self.missing(key))
    }

    fn req_arr(&mut self, key: &'a str) -> Result<(usize, Vec<f64>), Diagnostic> {
        self.arr(key)?.ok_or_else(|| self.missing(key))
    }

    fn count(&mut self, key: &'a str) -> Result<usize, Diagnostic> {
        let (l, x) = self.req_num(key)?;
        as_count(x).ok_or(Diagnostic {
            line: l,
            message: format!("{}.{key} must be a positive integer, got {x}", self.name),
        })
    }

    /// Keys present in the section that nothing consumed.
    fn leftovers(&self) -> Vec<Diagnostic> {
        let Some(s) = self.section else { return Vec::new() };
        s.entries
            .iter()
            .filter(|(k, _)| !self.used.contains(&k.as_str()))
            .map(|(k, (l, _))| Diagnostic {
                line: *l,
                message: format!("unknown key '{k}' in [{}]", self.name),
            })
            .collect()
    }
}

fn as_count(x: f64) -> Option<usize> {
    (x >= 1.0 && x.fract() == 0.0 && x <= 1e9).then_some(x as usize)
}

fn diag(line: usize, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        line,
        message: message.into(),
    }
}

fn read_function(r: &mut Reader<'_>, dim: usize) -> Result<FunctionSpec, Diagnostic> {
    let (tl, ty) = r.req_str("type")?;
    let affine = |r: &mut Reader<'_>| -> Result<(usize, Vec<f64>, Vec<f64>), Diagnostic> {
        let rows = r.count("rows")?;
        let (al, a) = r.req_arr("a")?;
        let (bl, b) = r.req_arr("b")?;
        if a.len() != rows * dim {
            return Err(diag(al, format!("{}.a needs rows * dim = {} entries, got {}", r.name, rows * dim, a.len())));
        }
        if b.len() != rows {
            return Err(diag(bl, format!("{}.b needs {rows} entries, got {}", r.name, b.len())));
        }
        Ok((rows, a, b))
    };
    let bounds = |r: &mut Reader<'_>| -> Result<(Vec<f64>, Vec<f64>), Diagnostic> {
        let (ll, lo) = r.req_arr("lo")?;
        let (hl, hi) = r.req_arr("hi")?;
        if lo.len() != dim {
            return Err(diag(ll, format!("{}.lo needs {dim} entries, got {}", r.name, lo.len())));
        }
        if hi.len() != dim {
            return Err(diag(hl, format!("{}.hi needs {dim} entries, got {}", r.name, hi.len())));
        }
        Ok((lo, hi))
    };
    let spec = match ty.as_str() {
        "zero" => FunctionSpec::Zero,
        "half_squared_norm" => FunctionSpec::HalfSquaredNorm,
        "abs_sum" => FunctionSpec::AbsSum,
        "quadratic" => {
            let rows = r.count("rows")?;
            if rows != dim {
                return Err(diag(r.line("rows"), format!("{}.rows must equal dim = {dim}, got {rows}", r.name)));
            }
            let (ql, q) = r.req_arr("q")?;
            if q.len() != dim * dim {
                return Err(diag(ql, format!("{}.q needs {} entries, got {}", r.name, dim * dim, q.len())));
            }
            let c = match r.arr("c")? {
                Some((cl, c)) if c.len() != dim => {
                    return Err(diag(cl, format!("{}.c needs {dim} entries, got {}", r.name, c.len())))
                }
                Some((_, c)) => c,
                None => vec![0.0; dim],
            };
            let r0 = r.num("r")?.map_or(0.0, |(_, x)| x);
            FunctionSpec::Quadratic { q, c, r: r0 }
        }
        "least_squares" => {
            let (rows, a, b) = affine(r)?;
            FunctionSpec::LeastSquares { rows, a, b }
        }
        "indicator_affine" => {
            let (rows, a, b) = affine(r)?;
            FunctionSpec::IndicatorAffine { rows, a, b }
        }
        "sqdist_affine" => {
            let (rows, a, b) = affine(r)?;
            FunctionSpec::SqdistAffine { rows, a, b }
        }
        "indicator_box" => {
            let (lo, hi) = bounds(r)?;
            FunctionSpec::IndicatorBox { lo, hi }
        }
        "sqdist_box" => {
            let (lo, hi) = bounds(r)?;
            FunctionSpec::SqdistBox { lo, hi }
        }
        "indicator_ball" => FunctionSpec::IndicatorBall {
            radius: r.req_num("radius")?.1,
        },
        "support_ball" => FunctionSpec::SupportBall {
            radius: r.req_num("radius")?.1,
        },
        other => return Err(diag(tl, format!("unknown function type '{other}' in [{}]", r.name))),
    };
    // Semantic checks (PSD, bounds order, full row rank) come from the library.
    if let Err(e) = spec.build(dim) {
        let key = match &spec {
            FunctionSpec::Quadratic { .. } => "q",
            FunctionSpec::LeastSquares { .. } | FunctionSpec::IndicatorAffine { .. } | FunctionSpec::SqdistAffine { .. } => "a",
            FunctionSpec::IndicatorBox { .. } | FunctionSpec::SqdistBox { .. } => "lo",
            FunctionSpec::IndicatorBall { .. } | FunctionSpec::SupportBall { .. } => "radius",
            _ => "type",
        };
        return Err(diag(r.line(key), format!("[{}]: {e}", r.name)));
    }
    Ok(spec)
}

fn read_operator(r: &mut Reader<'_>, dim: usize) -> Result<OperatorSpec, Diagnostic> {
    let (tl, ty) = r.req_str("type")?;
    let spec = match ty.as_str() {
        "affine" => {
            let rows = r.count("rows")?;
            if rows != dim {
                return Err(diag(r.line("rows"), format!("operator.rows must equal dim = {dim}, got {rows}")));
            }
            let (ml, m) = r.req_arr("m")?;
            if m.len() != dim * dim {
                return Err(diag(ml, format!("operator.m needs {} entries, got {}", dim * dim, m.len())));
            }
            let q = match r.arr("q")? {
                Some((ql, q)) if q.len() != dim => {
                    return Err(diag(ql, format!("operator.q needs {dim} entries, got {}", q.len())))
                }
                Some((_, q)) => q,
                None => vec![0.0; dim],
            };
            OperatorSpec::Affine { m, q }
        }
        "rotation" => OperatorSpec::Rotation {
            angle: r.req_num("angle")?.1,
        },
        other => return Err(diag(tl, format!("unknown operator type '{other}'"))),
    };
    if let Err(e) = spec.build(dim) {
        let key = if matches!(spec, OperatorSpec::Affine { .. }) { "m" } else { "angle" };
        return Err(diag(r.line(key), format!("[operator]: {e}")));
    }
    Ok(spec)
}

const SECTIONS: [&str; 8] = ["problem", "phi", "operator", "psi", "run", "probes", "oracle", "output"];

/// Parse and validate a scenario. All diagnostics found are returned together.
pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut diags = Vec::new();
    let sections = tokenize(text, &mut diags);
    for (name, s) in &sections {
        if !SECTIONS.contains(&name.as_str()) {
            diags.push(diag(s.line, format!("unknown section [{name}]")));
        }
    }
    if !diags.is_empty() {
        return Err(ParseError(diags));
    }
    let find = |name: &'static str| sections.iter().find(|(n, _)| n == name).map(|(_, s)| s);
    let reader = |name: &'static str| Reader {
        name,
        section: find(name),
        used: Vec::new(),
    };
    let mut readers: BTreeMap<&str, Reader<'_>> = SECTIONS.iter().map(|n| (*n, reader(n))).collect();
    let out = build(&mut readers, &find);
    let mut diags: Vec<Diagnostic> = match &out {
        Ok(_) => Vec::new(),
        Err(d) => vec![d.clone()],
    };
    if diags.is_empty() {
        for r in readers.values() {
            diags.extend(r.leftovers());
        }
    }
    diags.sort_by_key(|d| d.line);
    match out {
        Ok(s) if diags.is_empty() => Ok(s),
        _ => Err(ParseError(diags)),
    }
}

fn build<'a>(
    readers: &mut BTreeMap<&'a str, Reader<'a>>,
    find: &dyn Fn(&'static str) -> Option<&'a Section>,
) -> Result<Scenario, Diagnostic> {
    let p = readers.get_mut("problem").expect("known section");
    if find("problem").is_none() {
        return Err(diag(1, "missing [problem] section"));
    }
    let dim = p.count("dim")?;
    let (kl, kind) = p.req_str("kind")?;
    let (sl, sched) = p.req_str("schedule")?;
    let schedule: Schedule = sched.parse().map_err(|e| diag(sl, format!("problem.schedule: {e}")))?;
    let param = p.str("parameterization")?;
    let parameterization = match param.as_ref().map(|(l, s)| (*l, s.as_str())) {
        None | Some((_, "beta")) => Parameterization::Beta,
        Some((_, "eps")) => Parameterization::Epsilon,
        Some((l, other)) => return Err(diag(l, format!("problem.parameterization must be \"beta\" or \"eps\", got \"{other}\""))),
    };
    let want = match parameterization {
        Parameterization::Beta => Direction::Beta,
        Parameterization::Epsilon => Direction::Epsilon,
    };
    if schedule.direction() != want {
        return Err(diag(sl, "problem.schedule direction does not match the parameterization (use an \"eps\" schedule with parameterization \"eps\")"));
    }

    let dynamics = match kind.as_str() {
        "gradient" => {
            if find("operator").is_some() {
                return Err(diag(find("operator").unwrap().line, "[operator] is only used with kind = \"monotone\""));
            }
            if find("phi").is_none() {
                return Err(diag(kl, "kind = \"gradient\" needs a [phi] section"));
            }
            let phi = read_function(readers.get_mut("phi").unwrap(), dim)?;
            Dynamics::Gradient { phi, parameterization }
        }
        "monotone" => {
            if find("phi").is_some() {
                return Err(diag(find("phi").unwrap().line, "[phi] is only used with kind = \"gradient\""));
            }
            if param.is_some() {
                return Err(diag(readers["problem"].line("parameterization"), "monotone problems use the beta parameterization only"));
            }
            if find("operator").is_none() {
                return Err(diag(kl, "kind = \"monotone\" needs an [operator] section"));
            }
            let operator = read_operator(readers.get_mut("operator").unwrap(), dim)?;
            Dynamics::Monotone { operator }
        }
        other => return Err(diag(kl, format!("problem.kind must be \"gradient\" or \"monotone\", got \"{other}\""))),
    };
    if find("psi").is_none() {
        return Err(diag(readers["problem"].header_line(), "missing [psi] section"));
    }
    let psi = read_function(readers.get_mut("psi").unwrap(), dim)?;

    let r = readers.get_mut("run").unwrap();
    if find("run").is_none() {
        return Err(diag(1, "missing [run] section"));
    }
    let (hl, h) = r.req_num("h")?;
    if h <= 0.0 {
        return Err(diag(hl, format!("run.h must be positive, got {h}")));
    }
    let (tl, t_end) = r.req_num("t_end")?;
    if t_end <= 0.0 {
        return Err(diag(tl, format!("run.t_end must be positive, got {t_end}")));
    }
    if t_end / h > 1e8 {
        return Err(diag(hl, "run.h gives more than 1e8 steps"));
    }
    let scheme = match r.str("scheme")? {
        None => Scheme::BackwardEuler,
        Some((_, s)) if s == "backward-euler" => Scheme::BackwardEuler,
        Some((_, s)) if s == "midpoint" => Scheme::Midpoint,
        Some((l, s)) => return Err(diag(l, format!("run.scheme must be \"backward-euler\" or \"midpoint\", got \"{s}\""))),
    };
    let (xl, x0) = r.req_arr("x0")?;
    if x0.len() != dim {
        return Err(diag(xl, format!("run.x0 needs {dim} entries, got {}", x0.len())));
    }
    let refinements = match r.num("refinements")? {
        None => 0,
        Some((_, x)) if x == 0.0 => 0,
        Some((l, x)) => as_count(x).filter(|k| *k <= 12).ok_or(diag(l, format!("run.refinements must be an integer in 0..=12, got {x}")))?,
    };

    let mut probes = Vec::new();
    if let Some(s) = find("probes") {
        let pr = readers.get_mut("probes").unwrap();
        for (k, _) in &s.entries {
            let (l, z) = pr.req_arr(k)?;
            if z.len() != dim {
                return Err(diag(l, format!("probes.{k} needs {dim} entries, got {}", z.len())));
            }
            probes.push((k.clone(), z));
        }
    }

    let o = readers.get_mut("oracle").unwrap();
    let oracle = match o.str("method")? {
        None => OracleSpec::None,
        Some((_, m)) if m == "none" => OracleSpec::None,
        Some((_, m)) if m == "solve" => OracleSpec::Solve,
        Some((_, m)) if m == "point" => {
            let (l, z) = o.req_arr("point")?;
            if z.len() != dim {
                return Err(diag(l, format!("oracle.point needs {dim} entries, got {}", z.len())));
            }
            OracleSpec::Point(z)
        }
        Some((l, m)) => return Err(diag(l, format!("oracle.method must be \"none\", \"solve\" or \"point\", got \"{m}\""))),
    };

    let out = readers.get_mut("output").unwrap();
    let csv = out.str("csv")?.map_or_else(|| "trajectory.csv".to_string(), |(_, s)| s);
    let report = out.str("report")?.map_or_else(|| "report.txt".to_string(), |(_, s)| s);
    for (key, name) in [("csv", &csv), ("report", &report)] {
        if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
            return Err(diag(out.line(key), format!("output.{key} must be a plain file name, got \"{name}\"")));
        }
    }
    let tags = match out.str("tags")? {
        None => Vec::new(),
        Some((l, s)) => s
            .split_whitespace()
            .map(|t| t.parse::<Tag>().map_err(|e| diag(l, format!("output.tags: {e}"))))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let scenario = Scenario {
        dim,
        schedule,
        dynamics,
        psi,
        h,
        t_end,
        scheme,
        x0,
        refinements,
        probes,
        oracle,
        csv,
        report,
        tags,
    };
    if let Err(e) = scenario.problem() {
        return Err(diag(readers["psi"].line("type"), format!("problem cannot be built: {e}")));
    }
    Ok(scenario)
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn fmt_arr(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| fmt_num(*x)).collect();
    format!("[{}]", parts.join(", "))
}

/// Row-major matrix with one row per line, continuation lines aligned
/// under the first entry.
fn fmt_matrix(key: &str, xs: &[f64], cols: usize) -> String {
    if cols == 0 || xs.len() <= cols {
        return format!("{key} = {}\n", fmt_arr(xs));
    }
    let pad = " ".repeat(key.len() + 4);
    let rows: Vec<String> = xs
        .chunks(cols)
        .map(|r| r.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", "))
        .collect();
    format!("{key} = [{}]\n", rows.join(&format!(",\n{pad}")))
}

fn write_function(s: &mut String, section: &str, f: &FunctionSpec, dim: usize) {
    let _ = writeln!(s, "[{section}]");
    let _ = writeln!(s, "type = \"{}\"", f.type_name());
    match f {
        FunctionSpec::Zero | FunctionSpec::HalfSquaredNorm | FunctionSpec::AbsSum => {}
        FunctionSpec::Quadratic { q, c, r } => {
            let _ = writeln!(s, "rows = {dim}");
            s.push_str(&fmt_matrix("q", q, dim));
            let _ = writeln!(s, "c = {}", fmt_arr(c));
            let _ = writeln!(s, "r = {}", fmt_num(*r));
        }
        FunctionSpec::LeastSquares { rows, a, b }
        | FunctionSpec::IndicatorAffine { rows, a, b }
        | FunctionSpec::SqdistAffine { rows, a, b } => {
            let _ = writeln!(s, "rows = {rows}");
            s.push_str(&fmt_matrix("a", a, dim));
            let _ = writeln!(s, "b = {}", fmt_arr(b));
        }
        FunctionSpec::IndicatorBox { lo, hi } | FunctionSpec::SqdistBox { lo, hi } => {
            let _ = writeln!(s, "lo = {}", fmt_arr(lo));
            let _ = writeln!(s, "hi = {}", fmt_arr(hi));
        }
        FunctionSpec::IndicatorBall { radius } | FunctionSpec::SupportBall { radius } => {
            let _ = writeln!(s, "radius = {}", fmt_num(*radius));
        }
    }
    s.push('\n');
}

/// Canonical text: fixed section and key order, every setting explicit.
pub fn serialize_scenario(sc: &Scenario) -> String {
    let mut s = String::new();
    s.push_str("[problem]\n");
    let kind = match sc.dynamics {
        Dynamics::Gradient { .. } => "gradient",
        Dynamics::Monotone { .. } => "monotone",
    };
    let _ = writeln!(s, "kind = \"{kind}\"");
    let _ = writeln!(s, "dim = {}", sc.dim);
    if let Dynamics::Gradient { parameterization, .. } = &sc.dynamics {
        let p = match parameterization {
            Parameterization::Beta => "beta",
            Parameterization::Epsilon => "eps",
        };
        let _ = writeln!(s, "parameterization = \"{p}\"");
    }
    let _ = writeln!(s, "schedule = \"{}\"\n", sc.schedule);
    match &sc.dynamics {
        Dynamics::Gradient { phi, .. } => write_function(&mut s, "phi", phi, sc.dim),
        Dynamics::Monotone { operator } => {
            s.push_str("[operator]\n");
            match operator {
                OperatorSpec::Affine { m, q } => {
                    s.push_str("type = \"affine\"\n");
                    let _ = writeln!(s, "rows = {}", sc.dim);
                    s.push_str(&fmt_matrix("m", m, sc.dim));
                    let _ = writeln!(s, "q = {}", fmt_arr(q));
                }
                OperatorSpec::Rotation { angle } => {
                    s.push_str("type = \"rotation\"\n");
                    let _ = writeln!(s, "angle = {}", fmt_num(*angle));
                }
            }
            s.push('\n');
        }
    }
    write_function(&mut s, "psi", &sc.psi, sc.dim);
    s.push_str("[run]\n");
    let _ = writeln!(s, "h = {}", fmt_num(sc.h));
    let _ = writeln!(s, "t_end = {}", fmt_num(sc.t_end));
    let scheme = match sc.scheme {
        Scheme::BackwardEuler => "backward-euler",
        Scheme::Midpoint => "midpoint",
    };
    let _ = writeln!(s, "scheme = \"{scheme}\"");
    let _ = writeln!(s, "x0 = {}", fmt_arr(&sc.x0));
    let _ = writeln!(s, "refinements = {}\n", sc.refinements);
    if !sc.probes.is_empty() {
        s.push_str("[probes]\n");
        for (k, z) in &sc.probes {
            let _ = writeln!(s, "{k} = {}", fmt_arr(z));
        }
        s.push('\n');
    }
    s.push_str("[oracle]\n");
    match &sc.oracle {
        OracleSpec::None => s.push_str("method = \"none\"\n"),
        OracleSpec::Solve => s.push_str("method = \"solve\"\n"),
        OracleSpec::Point(z) => {
            s.push_str("method = \"point\"\n");
            let _ = writeln!(s, "point = {}", fmt_arr(z));
        }
    }
    s.push_str("\n[output]\n");
    let _ = writeln!(s, "csv = \"{}\"", sc.csv);
    let _ = writeln!(s, "report = \"{}\"", sc.report);
    let tags: Vec<&str> = sc.tags.iter().map(|t| t.name()).collect();
    let _ = writeln!(s, "tags = \"{}\"", tags.join(" "));
    s
}

#[cfg(test)]
mod tests;

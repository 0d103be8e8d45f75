//! Line-oriented problem files: `key = value`, `#` comments, five kinds.
//!
//! Every command except `zariski` reads its parameters from a small text
//! file. Lines hold one `key = value` pair each; `#` starts a comment;
//! blank lines are skipped. Rational values are written as `p/q`, integers,
//! or exact decimals; lists are comma-separated. The keys `functional` and
//! `conormal` may repeat (one row per line, in order); every other key may
//! appear at most once, and unknown keys are rejected rather than ignored.
//!
//! Kinds and their keys:
//!
//! * `box`: `rank`, `cone_dim`, `functional`*, `l_restr`, `conormal`*
//! * `zariski`: `n`
//! * `integral`: `r`, `t`, `phi`, `rel_tol`?, `sigma_max`?, `panels`?,
//!   `samples`?
//! * `envelope`: `weight`, `t_max`?, `grid_points`?, `m_list`?
//! * `vhat`: the `box` keys plus `weights`, `alpha_density`, `fiber_min`,
//!   `fiber_max`, `fiber_points`, `t_max`?, `base_points`?
//!
//! Weight presets: `fs:<degree>` (round metric of the given rational
//! degree), `bump` (the dipped degree-2 weight), `flat` (zero weight,
//! degree 0).

use crate::envelope_1d::weight::{RadialWeight, UniformGrid, WeightError};
use crate::rational::parse_rational;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use thiserror::Error;

/// Errors from reading a problem file.
#[derive(Debug, Error)]
pub enum ProblemError {
    /// A non-comment line without a `key = value` shape.
    #[error("line {line}: expected 'key = value'")]
    BadLine { line: usize },
    /// A key the kind does not accept.
    #[error("line {line}: unknown key '{key}' for kind '{kind}'")]
    UnknownKey {
        line: usize,
        key: String,
        kind: String,
    },
    /// A non-repeatable key given twice.
    #[error("line {line}: duplicate key '{key}'")]
    DuplicateKey { line: usize, key: String },
    /// A value that does not parse or is out of range.
    #[error("line {line}: bad value for '{key}': {msg}")]
    BadValue {
        line: usize,
        key: String,
        msg: String,
    },
    /// A required key that never appeared.
    #[error("missing required key '{0}'")]
    MissingKey(&'static str),
    /// An unsupported kind.
    #[error("kind must be one of box, zariski, integral, envelope, vhat; got '{0}'")]
    BadKind(String),
    /// A cross-field constraint violation.
    #[error("{0}")]
    Validation(String),
}

/// A named weight preset, instantiated on a grid at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightPreset {
    /// `fs:<degree>`: the round metric `degree * log(1 + e^t)`.
    Round(BigRational),
    /// `bump`: the dipped degree-2 weight.
    Dipped,
    /// `flat`: the zero weight on the degree-0 bundle.
    Flat,
}

impl WeightPreset {
    /// Parse `fs:<degree>`, `bump`, or `flat`.
    ///
    /// # Errors
    ///
    /// Returns a message when the name is unknown or the degree is not a
    /// nonnegative rational.
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "bump" => Ok(Self::Dipped),
            "flat" => Ok(Self::Flat),
            _ => {
                let Some(deg) = s.strip_prefix("fs:") else {
                    return Err(format!(
                        "unknown weight preset '{s}'; expected fs:<degree>, bump, or flat"
                    ));
                };
                let degree = parse_rational(deg)?;
                if degree.is_negative() {
                    return Err(format!("preset degree must be nonnegative, got {deg}"));
                }
                Ok(Self::Round(degree))
            }
        }
    }

    /// Sample the preset on a grid.
    ///
    /// # Errors
    ///
    /// Propagates weight-construction failures.
    pub fn instantiate(&self, grid: UniformGrid) -> Result<RadialWeight, WeightError> {
        match self {
            Self::Round(degree) => RadialWeight::round_metric(grid, degree.clone()),
            Self::Dipped => RadialWeight::dipped_metric(grid),
            Self::Flat => RadialWeight::flat(grid),
        }
    }
}

/// Exact polytope construction data shared by `box` and `vhat`.
#[derive(Debug, Clone)]
pub struct BoxProblem {
    /// Number of exponent coordinates.
    pub rank: usize,
    /// Dimension of the class lattice the functionals act on.
    pub cone_dim: usize,
    /// Halfspace functionals of the positivity cone, one row each.
    pub functionals: Vec<Vec<BigRational>>,
    /// Class of the restricted bundle.
    pub l_restr: Vec<BigRational>,
    /// One conormal class per exponent coordinate.
    pub conormals: Vec<Vec<BigRational>>,
}

/// Fiber-integral check: one requested point plus an optional seeded sweep.
#[derive(Debug, Clone)]
pub struct IntegralProblem {
    /// Fiber dimension, 1 to 3.
    pub r: usize,
    /// Monomial exponents, each `> -1` with sum `< 2`.
    pub t: Vec<BigRational>,
    /// Weight values, one per factor plus the residual.
    pub phi: Vec<BigRational>,
    /// Quadrature relative tolerance; engine default when absent.
    pub rel_tol: Option<f64>,
    /// Optional radial cutoff with analytic tail correction.
    pub sigma_max: Option<f64>,
    /// Quadrature panel budget; engine default when absent.
    pub panels: Option<usize>,
    /// Extra random sample rows drawn inside the convergence window.
    pub samples: usize,
}

/// Envelope and kernel-approximant run for one preset weight.
#[derive(Debug, Clone)]
pub struct EnvelopeProblem {
    /// The weight to study.
    pub weight: WeightPreset,
    /// Half-width of the log-radius window.
    pub t_max: f64,
    /// Grid resolution.
    pub grid_points: usize,
    /// Tensor powers for the kernel approximants.
    pub m_list: Vec<u32>,
}

/// Toy global envelope: polytope data, base weights, and both grids.
#[derive(Debug, Clone)]
pub struct VhatProblem {
    /// Polytope construction data.
    pub box_data: BoxProblem,
    /// One base weight per exponent coordinate plus the residual.
    pub weights: Vec<WeightPreset>,
    /// Density of the exponent lattice.
    pub alpha_density: u32,
    /// Fiber axis window start.
    pub fiber_min: f64,
    /// Fiber axis window end.
    pub fiber_max: f64,
    /// Fiber axis resolution.
    pub fiber_points: usize,
    /// Half-width of the base window.
    pub t_max: f64,
    /// Base axis resolution.
    pub base_points: usize,
}

/// A parsed and validated problem file.
#[derive(Debug, Clone)]
pub enum Problem {
    /// Exact polytope construction.
    Box(BoxProblem),
    /// Blow-up model pipeline for `n` points.
    Zariski { n: u32 },
    /// Fiber integral against its closed form.
    Integral(IntegralProblem),
    /// Envelope plus kernel approximants.
    Envelope(EnvelopeProblem),
    /// Toy global envelope.
    Vhat(VhatProblem),
}

struct RawEntry {
    line: usize,
    key: String,
    value: String,
}

/// Keys that may appear on several lines, one row per line.
const REPEATABLE: [&str; 2] = ["functional", "conormal"];

struct Fields {
    kind: String,
    entries: Vec<RawEntry>,
}

impl Fields {
    fn check_keys(&self, allowed: &[&str]) -> Result<(), ProblemError> {
        for (i, e) in self.entries.iter().enumerate() {
            if !allowed.contains(&e.key.as_str()) {
                return Err(ProblemError::UnknownKey {
                    line: e.line,
                    key: e.key.clone(),
                    kind: self.kind.clone(),
                });
            }
            if !REPEATABLE.contains(&e.key.as_str())
                && self.entries[..i].iter().any(|p| p.key == e.key)
            {
                return Err(ProblemError::DuplicateKey {
                    line: e.line,
                    key: e.key.clone(),
                });
            }
        }
        Ok(())
    }

    fn optional(&self, key: &'static str) -> Option<(usize, &str)> {
        self.entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| (e.line, e.value.as_str()))
    }

    fn required(&self, key: &'static str) -> Result<(usize, &str), ProblemError> {
        self.optional(key).ok_or(ProblemError::MissingKey(key))
    }

    fn repeated(&self, key: &str) -> Vec<(usize, &str)> {
        self.entries
            .iter()
            .filter(|e| e.key == key)
            .map(|e| (e.line, e.value.as_str()))
            .collect()
    }
}

fn bad(line: usize, key: &str, msg: impl Into<String>) -> ProblemError {
    ProblemError::BadValue {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn scan(text: &str) -> Result<Fields, ProblemError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let visible = raw.split('#').next().unwrap_or("").trim();
        if visible.is_empty() {
            continue;
        }
        let Some((k, v)) = visible.split_once('=') else {
            return Err(ProblemError::BadLine { line });
        };
        entries.push(RawEntry {
            line,
            key: k.trim().to_string(),
            value: v.trim().to_string(),
        });
    }
    let kind = entries
        .iter()
        .find(|e| e.key == "kind")
        .ok_or(ProblemError::MissingKey("kind"))?
        .value
        .clone();
    Ok(Fields { kind, entries })
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize, ProblemError> {
    v.parse().map_err(|_| bad(line, key, "expected an integer"))
}

fn parse_u32(line: usize, key: &str, v: &str) -> Result<u32, ProblemError> {
    v.parse().map_err(|_| bad(line, key, "expected an integer"))
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ProblemError> {
    let x: f64 = v
        .parse()
        .map_err(|_| bad(line, key, "expected a number"))?;
    if !x.is_finite() {
        return Err(bad(line, key, "must be finite"));
    }
    Ok(x)
}

fn parse_rational_list(
    line: usize,
    key: &str,
    v: &str,
) -> Result<Vec<BigRational>, ProblemError> {
    v.split(',')
        .map(|s| parse_rational(s.trim()).map_err(|msg| bad(line, key, msg)))
        .collect()
}

fn parse_u32_list(line: usize, key: &str, v: &str) -> Result<Vec<u32>, ProblemError> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| bad(line, key, "expected comma-separated integers"))
        })
        .collect()
}

const BOX_KEYS: [&str; 6] = ["kind", "rank", "cone_dim", "functional", "l_restr", "conormal"];

fn box_fields(f: &Fields) -> Result<BoxProblem, ProblemError> {
    let (line_r, v) = f.required("rank")?;
    let rank = parse_usize(line_r, "rank", v)?;
    let (line_d, v) = f.required("cone_dim")?;
    let cone_dim = parse_usize(line_d, "cone_dim", v)?;
    if rank == 0 || cone_dim == 0 {
        return Err(ProblemError::Validation(
            "rank and cone_dim must be positive".into(),
        ));
    }
    let mut functionals = Vec::new();
    for (line, v) in f.repeated("functional") {
        let row = parse_rational_list(line, "functional", v)?;
        if row.len() != cone_dim {
            return Err(bad(line, "functional", format!("expected {cone_dim} entries")));
        }
        functionals.push(row);
    }
    let (line_l, v) = f.required("l_restr")?;
    let l_restr = parse_rational_list(line_l, "l_restr", v)?;
    if l_restr.len() != cone_dim {
        return Err(bad(line_l, "l_restr", format!("expected {cone_dim} entries")));
    }
    let mut conormals = Vec::new();
    for (line, v) in f.repeated("conormal") {
        let row = parse_rational_list(line, "conormal", v)?;
        if row.len() != cone_dim {
            return Err(bad(line, "conormal", format!("expected {cone_dim} entries")));
        }
        conormals.push(row);
    }
    if conormals.len() != rank {
        return Err(ProblemError::Validation(format!(
            "rank {rank} needs {rank} conormal rows, got {}",
            conormals.len()
        )));
    }
    Ok(BoxProblem {
        rank,
        cone_dim,
        functionals,
        l_restr,
        conormals,
    })
}

fn integral_fields(f: &Fields) -> Result<IntegralProblem, ProblemError> {
    let (line_r, v) = f.required("r")?;
    let r = parse_usize(line_r, "r", v)?;
    if !(1..=3).contains(&r) {
        return Err(bad(line_r, "r", "fiber dimension must be 1, 2, or 3"));
    }
    let (line_t, v) = f.required("t")?;
    let t = parse_rational_list(line_t, "t", v)?;
    if t.len() != r {
        return Err(bad(line_t, "t", format!("expected {r} entries")));
    }
    let (line_p, v) = f.required("phi")?;
    let phi = parse_rational_list(line_p, "phi", v)?;
    if phi.len() != r + 1 {
        return Err(bad(line_p, "phi", format!("expected {} entries", r + 1)));
    }
    let minus_one = -BigRational::one();
    if let Some(x) = t.iter().find(|x| **x <= minus_one) {
        return Err(bad(
            line_t,
            "t",
            format!("entry {x} outside the convergence window: each exponent must exceed -1"),
        ));
    }
    let total: BigRational = t.iter().fold(BigRational::zero(), |acc, x| acc + x);
    if total >= BigRational::from_integer(2.into()) {
        return Err(bad(
            line_t,
            "t",
            format!("exponent sum {total} outside the convergence window: must stay below 2"),
        ));
    }
    let rel_tol = f
        .optional("rel_tol")
        .map(|(l, v)| parse_f64(l, "rel_tol", v))
        .transpose()?;
    let sigma_max = f
        .optional("sigma_max")
        .map(|(l, v)| parse_f64(l, "sigma_max", v))
        .transpose()?;
    let panels = f
        .optional("panels")
        .map(|(l, v)| parse_usize(l, "panels", v))
        .transpose()?;
    let samples = f
        .optional("samples")
        .map(|(l, v)| parse_usize(l, "samples", v))
        .transpose()?
        .unwrap_or(0);
    Ok(IntegralProblem {
        r,
        t,
        phi,
        rel_tol,
        sigma_max,
        panels,
        samples,
    })
}

fn envelope_fields(f: &Fields) -> Result<EnvelopeProblem, ProblemError> {
    let (line_w, v) = f.required("weight")?;
    let weight = WeightPreset::parse(v).map_err(|msg| bad(line_w, "weight", msg))?;
    let t_max = f
        .optional("t_max")
        .map(|(l, v)| parse_f64(l, "t_max", v))
        .transpose()?
        .unwrap_or(40.0);
    if t_max <= 0.0 {
        return Err(ProblemError::Validation("t_max must be positive".into()));
    }
    let grid_points = f
        .optional("grid_points")
        .map(|(l, v)| parse_usize(l, "grid_points", v))
        .transpose()?
        .unwrap_or(4096);
    if grid_points < 2 {
        return Err(ProblemError::Validation(
            "grid_points must be at least 2".into(),
        ));
    }
    let m_list = match f.optional("m_list") {
        Some((l, v)) => {
            let list = parse_u32_list(l, "m_list", v)?;
            if list.is_empty() || list.contains(&0) {
                return Err(bad(l, "m_list", "powers must be positive"));
            }
            list
        }
        None => vec![1, 2, 4, 8],
    };
    Ok(EnvelopeProblem {
        weight,
        t_max,
        grid_points,
        m_list,
    })
}

fn vhat_fields(f: &Fields) -> Result<VhatProblem, ProblemError> {
    let box_data = box_fields(f)?;
    let (line_w, v) = f.required("weights")?;
    let weights: Vec<WeightPreset> = v
        .split(',')
        .map(|s| WeightPreset::parse(s.trim()).map_err(|msg| bad(line_w, "weights", msg)))
        .collect::<Result<_, _>>()?;
    if weights.len() != box_data.rank + 1 {
        return Err(bad(
            line_w,
            "weights",
            format!("rank {} needs {} presets", box_data.rank, box_data.rank + 1),
        ));
    }
    let (line_a, v) = f.required("alpha_density")?;
    let alpha_density = parse_u32(line_a, "alpha_density", v)?;
    if alpha_density == 0 {
        return Err(bad(line_a, "alpha_density", "must be at least 1"));
    }
    let (line_fm, v) = f.required("fiber_min")?;
    let fiber_min = parse_f64(line_fm, "fiber_min", v)?;
    let (line_fx, v) = f.required("fiber_max")?;
    let fiber_max = parse_f64(line_fx, "fiber_max", v)?;
    if fiber_min >= fiber_max {
        return Err(ProblemError::Validation(
            "fiber_min must be below fiber_max".into(),
        ));
    }
    let (line_fp, v) = f.required("fiber_points")?;
    let fiber_points = parse_usize(line_fp, "fiber_points", v)?;
    if fiber_points < 2 {
        return Err(bad(line_fp, "fiber_points", "must be at least 2"));
    }
    let t_max = f
        .optional("t_max")
        .map(|(l, v)| parse_f64(l, "t_max", v))
        .transpose()?
        .unwrap_or(40.0);
    if t_max <= 0.0 {
        return Err(ProblemError::Validation("t_max must be positive".into()));
    }
    let base_points = f
        .optional("base_points")
        .map(|(l, v)| parse_usize(l, "base_points", v))
        .transpose()?
        .unwrap_or(4096);
    if base_points < 2 {
        return Err(ProblemError::Validation(
            "base_points must be at least 2".into(),
        ));
    }
    Ok(VhatProblem {
        box_data,
        weights,
        alpha_density,
        fiber_min,
        fiber_max,
        fiber_points,
        t_max,
        base_points,
    })
}

/// Parse and validate a problem file.
///
/// # Errors
///
/// Reports the offending line for shape, key, and value errors, and the
/// violated constraint for cross-field errors.
pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let fields = scan(text)?;
    match fields.kind.as_str() {
        "box" => {
            fields.check_keys(&BOX_KEYS)?;
            Ok(Problem::Box(box_fields(&fields)?))
        }
        "zariski" => {
            fields.check_keys(&["kind", "n"])?;
            let (line, v) = fields.required("n")?;
            let n = parse_u32(line, "n", v)?;
            if n == 0 {
                return Err(bad(line, "n", "need at least one point"));
            }
            Ok(Problem::Zariski { n })
        }
        "integral" => {
            fields.check_keys(&[
                "kind", "r", "t", "phi", "rel_tol", "sigma_max", "panels", "samples",
            ])?;
            Ok(Problem::Integral(integral_fields(&fields)?))
        }
        "envelope" => {
            fields.check_keys(&["kind", "weight", "t_max", "grid_points", "m_list"])?;
            Ok(Problem::Envelope(envelope_fields(&fields)?))
        }
        "vhat" => {
            let mut keys = BOX_KEYS.to_vec();
            keys.extend([
                "weights",
                "alpha_density",
                "fiber_min",
                "fiber_max",
                "fiber_points",
                "t_max",
                "base_points",
            ]);
            fields.check_keys(&keys)?;
            Ok(Problem::Vhat(vhat_fields(&fields)?))
        }
        other => Err(ProblemError::BadKind(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn box_files_parse_with_comments_and_blanks() {
        let text = "\
# sixteen-point model
kind = box
rank = 2
cone_dim = 1

functional = 1
l_restr = -4   # degree of the restriction
conormal = 8
conormal = 8
";
        let Problem::Box(p) = parse_problem(text).unwrap() else {
            panic!("wrong kind");
        };
        assert_eq!(p.rank, 2);
        assert_eq!(p.functionals, vec![vec![ratio(1, 1)]]);
        assert_eq!(p.l_restr, vec![ratio(-4, 1)]);
        assert_eq!(p.conormals.len(), 2);
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected_with_lines() {
        let text = "kind = zariski\nn = 16\nblah = 1\n";
        match parse_problem(text) {
            Err(ProblemError::UnknownKey { line, key, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(key, "blah");
            }
            other => panic!("expected unknown-key error, got {other:?}"),
        }
        let text = "kind = zariski\nn = 16\nn = 12\n";
        assert!(matches!(
            parse_problem(text),
            Err(ProblemError::DuplicateKey { line: 3, .. })
        ));
    }

    #[test]
    fn integral_window_is_validated_exactly() {
        let ok = "kind = integral\nr = 1\nt = 3/2\nphi = 0, 0\n";
        assert!(parse_problem(ok).is_ok());
        let low = "kind = integral\nr = 1\nt = -3/2\nphi = 0, 0\n";
        assert!(matches!(
            parse_problem(low),
            Err(ProblemError::BadValue { key, .. }) if key == "t"
        ));
        let hot = "kind = integral\nr = 2\nt = 1, 1\nphi = 0, 0, 0\n";
        assert!(matches!(
            parse_problem(hot),
            Err(ProblemError::BadValue { key, .. }) if key == "t"
        ));
        let short = "kind = integral\nr = 2\nt = 1/2\nphi = 0, 0, 0\n";
        assert!(parse_problem(short).is_err());
    }

    #[test]
    fn weight_presets_parse_and_reject() {
        assert_eq!(
            WeightPreset::parse("fs:3/2").unwrap(),
            WeightPreset::Round(ratio(3, 2))
        );
        assert_eq!(WeightPreset::parse("bump").unwrap(), WeightPreset::Dipped);
        assert_eq!(WeightPreset::parse("flat").unwrap(), WeightPreset::Flat);
        assert!(WeightPreset::parse("fs:-1").is_err());
        assert!(WeightPreset::parse("blob").is_err());
    }

    #[test]
    fn envelope_defaults_fill_in() {
        let Problem::Envelope(p) = parse_problem("kind = envelope\nweight = bump\n").unwrap()
        else {
            panic!("wrong kind");
        };
        assert_eq!(p.t_max, 40.0);
        assert_eq!(p.grid_points, 4096);
        assert_eq!(p.m_list, vec![1, 2, 4, 8]);
    }

    #[test]
    fn vhat_cross_field_counts_are_enforced() {
        let text = "\
kind = vhat
rank = 2
cone_dim = 1
functional = 1
l_restr = -4
conormal = 8
conormal = 8
weights = fs:1, flat
alpha_density = 4
fiber_min = -8
fiber_max = 0
fiber_points = 9
";
        assert!(matches!(
            parse_problem(text),
            Err(ProblemError::BadValue { key, .. }) if key == "weights"
        ));
        let good = text.replace("weights = fs:1, flat", "weights = fs:1, fs:2, flat");
        assert!(parse_problem(&good).is_ok());
    }

    #[test]
    fn shapeless_lines_are_rejected() {
        assert!(matches!(
            parse_problem("kind = box\nrank\n"),
            Err(ProblemError::BadLine { line: 2 })
        ));
        assert!(matches!(
            parse_problem("n = 16\n"),
            Err(ProblemError::MissingKey("kind"))
        ));
        assert!(matches!(
            parse_problem("kind = torus\n"),
            Err(ProblemError::BadKind(_))
        ));
    }
}

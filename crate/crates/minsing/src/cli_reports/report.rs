//! Command runners and bit-stable report assembly.
//!
//! Each runner turns a validated problem into a serializable results record
//! plus named CSV tables, and reports whether its verification checks
//! passed. Reports are rendered as pretty JSON with a fixed field order;
//! identical inputs give byte-identical output apart from the wall-time
//! field, which the caller appends last.

use crate::box_polytope::{build_box, BoxError, BoxPolytope};
use crate::cli_reports::problem::{
    BoxProblem, EnvelopeProblem, IntegralProblem, ProblemError, VhatProblem,
};
use crate::envelope_1d::bergman::{bergman_weight, BergmanError};
use crate::envelope_1d::envelope::{equilibrium_envelope, EnvelopeError};
use crate::envelope_1d::vhat::{vhat_toy, VhatError};
use crate::envelope_1d::weight::{psh_convexity_check, UniformGrid, WeightError};
use crate::fiber_integral::{closed_form, numeric_integral, FiberError, FiberProblem, QuadratureSpec};
use crate::ns_geometry::{is_nef_zariski, zariski_degrees, DivisorClass, GeometryError, PsefCone};
use crate::rational::{format_rational, ratio, to_f64};
use crate::tropical_weight::{
    bounded_difference, generic_lelong, log_sum_exp_weight, TropicalError, TropicalWeight,
};
use num::rational::BigRational;
use num::traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::f64::consts::LN_2;
use thiserror::Error;

/// Low-discrepancy sample count for the model-pipeline gap check.
const GAP_SAMPLES: usize = 512;

/// Errors from any command runner, each surfaced verbatim.
#[derive(Debug, Error)]
pub enum RunError {
    /// Problem-file validation failure.
    #[error(transparent)]
    Problem(#[from] ProblemError),
    /// Class or cone construction failure.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Polytope construction or query failure.
    #[error(transparent)]
    Box(#[from] BoxError),
    /// Tropical weight failure.
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    /// Fiber integral failure.
    #[error(transparent)]
    Fiber(#[from] FiberError),
    /// Grid or weight failure.
    #[error(transparent)]
    Weight(#[from] WeightError),
    /// Envelope failure.
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    /// Kernel-approximant failure.
    #[error(transparent)]
    Bergman(#[from] BergmanError),
    /// Global-envelope failure.
    #[error(transparent)]
    Vhat(#[from] VhatError),
}

/// A named CSV table.
#[derive(Debug, Clone)]
pub struct Table {
    /// File stem; the table is written as `<name>.csv`.
    pub name: String,
    /// Column names.
    pub header: Vec<String>,
    /// Data rows, already formatted.
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Render as CSV text.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// What one command produced: the results record, CSV tables, and whether
/// every verification check passed.
#[derive(Debug)]
pub struct RunOutput<R> {
    /// Serializable results record for the report.
    pub results: R,
    /// CSV tables for the output directory.
    pub tables: Vec<Table>,
    /// True when no tolerance check failed.
    pub pass: bool,
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn vertices_strings(bx: &BoxPolytope) -> Vec<Vec<String>> {
    bx.vertices()
        .iter()
        .map(|v| v.iter().map(format_rational).collect())
        .collect()
}

fn vertices_table(rank: usize, vertices: &[Vec<String>]) -> Table {
    Table {
        name: "vertices".to_string(),
        header: (1..=rank).map(|i| format!("alpha_{i}")).collect(),
        rows: vertices.to_vec(),
    }
}

fn assemble_box(p: &BoxProblem) -> Result<BoxPolytope, RunError> {
    let cone = PsefCone::new(p.cone_dim, p.functionals.clone())?;
    let l_restr = DivisorClass::new(p.l_restr.clone());
    let conormals: Vec<DivisorClass> = p
        .conormals
        .iter()
        .map(|c| DivisorClass::new(c.clone()))
        .collect();
    Ok(build_box(&cone, &l_restr, &conormals)?)
}

/// Results of the `box` command.
#[derive(Debug, Serialize)]
pub struct BoxResults {
    /// Number of exponent coordinates.
    pub rank: usize,
    /// Dimension of the class lattice.
    pub cone_dim: usize,
    /// Whether the polytope has no points.
    pub is_empty: bool,
    /// Exact vertices, lexicographically sorted.
    pub vertices: Vec<Vec<String>>,
    /// Smallest coordinate sum over the polytope; absent when empty.
    pub min_total: Option<String>,
    /// Whether the origin is admissible (bounded singularity case).
    pub contains_origin: bool,
}

/// Run the `box` command: construct the polytope and its tropical weight.
///
/// # Errors
///
/// Fails on invalid cone/class data.
pub fn run_box(p: &BoxProblem) -> Result<RunOutput<BoxResults>, RunError> {
    let bx = assemble_box(p)?;
    let vertices = vertices_strings(&bx);
    let results = BoxResults {
        rank: p.rank,
        cone_dim: p.cone_dim,
        is_empty: bx.is_empty(),
        vertices: vertices.clone(),
        min_total: generic_lelong(&bx).map(|q| format_rational(&q)),
        contains_origin: bx.contains_origin(),
    };
    let mut tables = vec![vertices_table(p.rank, &vertices)];
    if !bx.is_empty() {
        let trop = TropicalWeight::from_box(&bx)?;
        let mut header: Vec<String> = (1..=p.rank).map(|i| format!("alpha_{i}")).collect();
        header.push("offset".to_string());
        let rows = trop
            .pieces()
            .iter()
            .map(|piece| {
                let mut row: Vec<String> =
                    piece.alpha().iter().map(format_rational).collect();
                row.push(fmt_f64(piece.offset()));
                row
            })
            .collect();
        tables.push(Table {
            name: "pieces".to_string(),
            header,
            rows,
        });
    }
    Ok(RunOutput {
        results,
        tables,
        pass: true,
    })
}

/// Gap statistics of the tropical weight against its smooth companion.
#[derive(Debug, Serialize)]
pub struct GapRecord {
    /// Largest sampled difference.
    pub sup: f64,
    /// Smallest sampled difference.
    pub inf: f64,
    /// Sampled oscillation.
    pub spread: f64,
    /// The allowed oscillation `(exponent + 1) * log 2`.
    pub bound: f64,
    /// Whether the spread stayed within the bound.
    pub within_bound: bool,
}

/// Results of the `zariski` command.
#[derive(Debug, Serialize)]
pub struct ZariskiResults {
    /// Number of blown-up points on the quartic.
    pub n: u32,
    /// Exact degree of the studied bundle on the curve.
    pub degree_restriction: String,
    /// Exact degree of each quadric-cut normal direction.
    pub degree_normal: String,
    /// Whether the bundle is nef.
    pub nef: bool,
    /// Whether bounded metrics exist (origin admissible).
    pub contains_origin: bool,
    /// Generic singularity exponent, exact.
    pub exponent: String,
    /// Exact polytope vertices.
    pub vertices: Vec<Vec<String>>,
    /// Tropical weight versus the smooth closed form.
    pub gap: GapRecord,
}

/// Run the `zariski` command: degrees, nefness, polytope, exponent, and the
/// gap check against the smooth closed form on `[-40, 0]^2`.
///
/// # Errors
///
/// Fails only on internal construction errors; every `n >= 1` is a valid
/// model.
pub fn run_zariski(n: u32) -> Result<RunOutput<ZariskiResults>, RunError> {
    let (deg_l, deg_n1, deg_n2) = zariski_degrees(n);
    let nef = is_nef_zariski(n);
    let cone = PsefCone::new(1, vec![vec![ratio(1, 1)]])?;
    let l_restr = DivisorClass::new(vec![deg_l.clone()]);
    let conormals = vec![
        DivisorClass::new(vec![-deg_n1.clone()]),
        DivisorClass::new(vec![-deg_n2.clone()]),
    ];
    let bx = build_box(&cone, &l_restr, &conormals)?;
    let exponent = generic_lelong(&bx).expect("the model polytope always contains (1, 0)");

    let trop = TropicalWeight::from_box(&bx)?;
    let c = to_f64(&exponent);
    let stats = bounded_difference(
        |t| {
            trop.evaluate(t)
                .expect("gap samples are finite and correctly sized")
        },
        log_sum_exp_weight(c),
        &[(-40.0, 0.0), (-40.0, 0.0)],
        GAP_SAMPLES,
    )?;
    let bound = (c + 1.0) * LN_2;
    let gap = GapRecord {
        sup: stats.sup,
        inf: stats.inf,
        spread: stats.spread,
        bound,
        within_bound: stats.spread <= bound,
    };
    let pass = gap.within_bound;
    let vertices = vertices_strings(&bx);
    let tables = vec![vertices_table(2, &vertices)];
    Ok(RunOutput {
        results: ZariskiResults {
            n,
            degree_restriction: format_rational(&deg_l),
            degree_normal: format_rational(&deg_n2),
            nef,
            contains_origin: bx.contains_origin(),
            exponent: format_rational(&exponent),
            vertices,
            gap,
        },
        tables,
        pass,
    })
}

/// Results of the `integral` command.
#[derive(Debug, Serialize)]
pub struct IntegralResults {
    /// Fiber dimension.
    pub r: usize,
    /// Requested exponents, echoed exactly.
    pub t: Vec<String>,
    /// Requested weight values, echoed exactly.
    pub phi: Vec<String>,
    /// Quadrature relative tolerance in effect.
    pub rel_tol: f64,
    /// Radial cutoff in effect, if any.
    pub sigma_max: Option<f64>,
    /// Panel budget in effect.
    pub panels_budget: usize,
    /// Closed-form value at the requested point.
    pub closed_form: f64,
    /// Quadrature value at the requested point.
    pub numeric: f64,
    /// Relative disagreement at the requested point.
    pub rel_err: f64,
    /// Panels the quadrature spent at the requested point.
    pub panels_used: usize,
    /// Extra seeded sample rows.
    pub samples: usize,
    /// Seed for the sample sweep.
    pub seed: u64,
    /// Worst relative disagreement across the sweep; absent when no samples.
    pub max_sample_rel_err: Option<f64>,
    /// Pass threshold on relative disagreement.
    pub tol: f64,
    /// Whether every row stayed below the threshold.
    pub pass: bool,
}

/// Run the `integral` command: the requested point, plus a seeded random
/// sweep inside the convergence window when `samples > 0`.
///
/// # Errors
///
/// Fails on window violations or quadrature breakdown.
pub fn run_integral(
    p: &IntegralProblem,
    tol: f64,
    seed: u64,
) -> Result<RunOutput<IntegralResults>, RunError> {
    let mut spec = QuadratureSpec::default();
    if let Some(rel_tol) = p.rel_tol {
        spec.rel_tol = rel_tol;
    }
    if let Some(panels) = p.panels {
        spec.max_panels = panels;
    }
    spec.sigma_max = p.sigma_max;

    let mut header = vec!["r".to_string()];
    header.extend((1..=p.r).map(|i| format!("t_{i}")));
    header.extend((1..=p.r + 1).map(|i| format!("phi_{i}")));
    header.extend(
        ["closed_form", "numeric", "rel_err", "panels_used"]
            .iter()
            .map(|s| s.to_string()),
    );
    let mut rows = Vec::with_capacity(1 + p.samples);
    let mut worst_sweep: Option<f64> = None;
    let mut pass = true;

    let mut run_point = |t: Vec<f64>, phi: Vec<f64>| -> Result<(f64, f64, f64, usize), RunError> {
        let fp = FiberProblem::new(t.clone(), phi.clone())?;
        let exact = closed_form(&fp);
        let numeric = numeric_integral(&fp, &spec)?;
        let rel_err = (numeric.value - exact).abs() / exact.abs();
        let mut row = vec![p.r.to_string()];
        row.extend(t.iter().map(|&x| fmt_f64(x)));
        row.extend(phi.iter().map(|&x| fmt_f64(x)));
        row.push(fmt_f64(exact));
        row.push(fmt_f64(numeric.value));
        row.push(fmt_f64(rel_err));
        row.push(numeric.panels.to_string());
        rows.push(row);
        Ok((exact, numeric.value, rel_err, numeric.panels))
    };

    let t_req: Vec<f64> = p.t.iter().map(to_f64).collect();
    let phi_req: Vec<f64> = p.phi.iter().map(to_f64).collect();
    let (exact, numeric, rel_err, panels_used) = run_point(t_req, phi_req)?;
    pass &= rel_err < tol;

    // Sweep window: exponents bounded away from the poles so that the sum
    // constraint holds for every draw.
    let t_hi = [1.5, 0.9, 0.6][p.r - 1];
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..p.samples {
        let t: Vec<f64> = (0..p.r).map(|_| rng.gen_range(-0.9..t_hi)).collect();
        let phi: Vec<f64> = (0..=p.r).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, _, err, _) = run_point(t, phi)?;
        worst_sweep = Some(worst_sweep.map_or(err, |w: f64| w.max(err)));
        pass &= err < tol;
    }

    let results = IntegralResults {
        r: p.r,
        t: p.t.iter().map(format_rational).collect(),
        phi: p.phi.iter().map(format_rational).collect(),
        rel_tol: spec.rel_tol,
        sigma_max: spec.sigma_max,
        panels_budget: spec.max_panels,
        closed_form: exact,
        numeric,
        rel_err,
        panels_used,
        samples: p.samples,
        seed,
        max_sample_rel_err: worst_sweep,
        tol,
        pass,
    };
    let tables = vec![Table {
        name: "rows".to_string(),
        header,
        rows,
    }];
    Ok(RunOutput {
        results,
        tables,
        pass,
    })
}

/// One tensor power's gap summary in the `envelope` report.
#[derive(Debug, Serialize)]
pub struct SandwichRowRecord {
    /// Tensor power.
    pub m: u32,
    /// Worst violation of the lower sandwich.
    pub sup_v_minus_vb: f64,
    /// Remaining gap above the envelope.
    pub sup_vb_minus_v: f64,
}

/// Results of the `envelope` command.
#[derive(Debug, Serialize)]
pub struct EnvelopeResults {
    /// Weight label.
    pub weight: String,
    /// Exact bundle degree.
    pub degree: String,
    /// Window half-width.
    pub t_max: f64,
    /// Grid resolution.
    pub grid_points: usize,
    /// One-sided slopes at the window ends.
    pub end_slopes: [f64; 2],
    /// Smallest envelope defect.
    pub min_defect: f64,
    /// Number of contact points.
    pub contact_points: usize,
    /// Per-power sandwich summaries.
    pub rows: Vec<SandwichRowRecord>,
    /// Worst defect against the best kernel bound across powers.
    pub sup_v_minus_best: f64,
    /// Pass threshold on the lower sandwich.
    pub tol: f64,
    /// Whether every power respected the lower sandwich.
    pub pass: bool,
}

/// Run the `envelope` command: envelope, defect, and kernel approximants
/// for each requested tensor power.
///
/// # Errors
///
/// Fails on inadmissible weights, fractional total degrees, or windows too
/// narrow for the kernel tails.
pub fn run_envelope(
    p: &EnvelopeProblem,
    tol: f64,
) -> Result<RunOutput<EnvelopeResults>, RunError> {
    let grid = UniformGrid::symmetric(p.t_max, p.grid_points)?;
    let w = p.weight.instantiate(grid)?;
    let env = equilibrium_envelope(&w)?;

    let mut header = vec!["t".to_string(), "phi".to_string(), "v_theta".to_string()];
    let mut kernel_columns: Vec<Vec<f64>> = Vec::with_capacity(p.m_list.len());
    let mut rows_rec = Vec::with_capacity(p.m_list.len());
    let mut best = vec![f64::NEG_INFINITY; env.v.len()];
    let mut pass = true;
    for &m in &p.m_list {
        let b = bergman_weight(&w, m)?;
        let mut sup_down = f64::NEG_INFINITY;
        let mut sup_up = f64::NEG_INFINITY;
        for ((&ve, &vb), slot) in env.v.iter().zip(&b.v).zip(&mut best) {
            sup_down = sup_down.max(ve - vb);
            sup_up = sup_up.max(vb - ve);
            *slot = slot.max(vb);
        }
        pass &= sup_down <= tol && sup_up.is_finite();
        rows_rec.push(SandwichRowRecord {
            m,
            sup_v_minus_vb: sup_down,
            sup_vb_minus_v: sup_up,
        });
        header.push(format!("vb_m{m}"));
        kernel_columns.push(b.v);
    }
    let sup_v_minus_best = env
        .v
        .iter()
        .zip(&best)
        .map(|(&ve, &vb)| ve - vb)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut rows = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let mut row = vec![
            fmt_f64(grid.point(i)),
            fmt_f64(w.values()[i]),
            fmt_f64(env.v[i]),
        ];
        for col in &kernel_columns {
            row.push(fmt_f64(col[i]));
        }
        rows.push(row);
    }

    let (lo, hi) = w.end_slopes();
    let results = EnvelopeResults {
        weight: w.label().to_string(),
        degree: format_rational(w.degree()),
        t_max: p.t_max,
        grid_points: p.grid_points,
        end_slopes: [lo, hi],
        min_defect: env.v.iter().cloned().fold(f64::INFINITY, f64::min),
        contact_points: env.contact.iter().filter(|&&c| c).count(),
        rows: rows_rec,
        sup_v_minus_best,
        tol,
        pass,
    };
    let tables = vec![Table {
        name: "profile".to_string(),
        header,
        rows,
    }];
    Ok(RunOutput {
        results,
        tables,
        pass,
    })
}

/// Results of the `vhat` command.
#[derive(Debug, Serialize)]
pub struct VhatResults {
    /// Number of fiber directions.
    pub rank: usize,
    /// Size of the exponent family.
    pub alpha_count: usize,
    /// The exponent family, exact, lexicographically sorted.
    pub alphas: Vec<Vec<String>>,
    /// Generic singularity exponent of the polytope.
    pub exponent: Option<String>,
    /// Worst midpoint-concavity defect of the sampled bound.
    pub max_midpoint_violation: f64,
    /// Worst end-slope overshoot of the sampled bound.
    pub max_slope_violation: f64,
    /// Pass threshold on both violations.
    pub tol: f64,
    /// Whether the convexity audit passed.
    pub pass: bool,
}

/// Run the `vhat` command: the certified lower bound plus its convexity
/// audit.
///
/// # Errors
///
/// Fails on an empty polytope or any construction failure.
pub fn run_vhat(p: &VhatProblem, tol: f64) -> Result<RunOutput<VhatResults>, RunError> {
    let bx = assemble_box(&p.box_data)?;
    let r = p.box_data.rank;
    let base = UniformGrid::symmetric(p.t_max, p.base_points)?;
    let weights: Vec<_> = p
        .weights
        .iter()
        .map(|preset| preset.instantiate(base))
        .collect::<Result<_, _>>()?;
    let fiber = UniformGrid::new(p.fiber_min, p.fiber_max, p.fiber_points)?;
    let res = vhat_toy(&bx, &weights, p.alpha_density, &fiber)?;

    // Fiber slopes are exponents in [0, 1]; the base budget is the largest
    // mixed degree over the family, exact.
    let degrees: Vec<BigRational> = weights.iter().map(|w| w.degree().clone()).collect();
    let mut kmax = BigRational::zero();
    for alpha in &res.alphas {
        let total: BigRational = alpha.iter().fold(BigRational::zero(), |acc, a| acc + a);
        let mut d = (BigRational::one() - total) * &degrees[r];
        for (a, k) in alpha.iter().zip(&degrees[..r]) {
            d += a * k;
        }
        kmax = kmax.max(d);
    }
    let mut budgets = vec![(0.0, 1.0); r];
    budgets.push((0.0, to_f64(&kmax)));
    let audit = psh_convexity_check(&res.fun, &budgets)?;
    let pass = audit.max_midpoint_violation <= tol && audit.max_slope_violation <= tol;

    let alphas: Vec<Vec<String>> = res
        .alphas
        .iter()
        .map(|a| a.iter().map(format_rational).collect())
        .collect();
    let mut tables = vec![Table {
        name: "alphas".to_string(),
        header: (1..=r).map(|i| format!("alpha_{i}")).collect(),
        rows: alphas.clone(),
    }];

    let axes = res.fun.axes();
    let mut header: Vec<String> = (1..=r).map(|i| format!("s_{i}")).collect();
    header.push("t".to_string());
    header.push("value".to_string());
    let mut rows = Vec::with_capacity(res.fun.values().len());
    let mut idx = vec![0usize; axes.len()];
    loop {
        let mut row: Vec<String> = idx
            .iter()
            .enumerate()
            .map(|(d, &i)| fmt_f64(axes[d].point(i)))
            .collect();
        row.push(fmt_f64(res.fun.value_at(&idx)));
        rows.push(row);
        let mut done = true;
        for d in (0..idx.len()).rev() {
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                done = false;
                break;
            }
            idx[d] = 0;
        }
        if done {
            break;
        }
    }
    tables.push(Table {
        name: "values".to_string(),
        header,
        rows,
    });

    let results = VhatResults {
        rank: r,
        alpha_count: alphas.len(),
        alphas,
        exponent: generic_lelong(&bx).map(|q| format_rational(&q)),
        max_midpoint_violation: audit.max_midpoint_violation,
        max_slope_violation: audit.max_slope_violation,
        tol,
        pass,
    };
    Ok(RunOutput {
        results,
        tables,
        pass,
    })
}

#[derive(Serialize)]
struct RunReport<'a, R: Serialize> {
    command: &'a str,
    input_hash: String,
    tool_version: &'static str,
    results: &'a R,
}

/// Render the full report as pretty JSON with a trailing newline. The input
/// hash is the hex SHA-256 of the raw problem bytes (or of the canonical
/// argument string for `zariski`); the whole report is a pure function of
/// the inputs, so repeated runs emit identical bytes.
pub fn render_report<R: Serialize>(command: &str, input: &[u8], results: &R) -> String {
    let report = RunReport {
        command,
        input_hash: format!("{:x}", Sha256::digest(input)),
        tool_version: env!("CARGO_PKG_VERSION"),
        results,
    };
    let mut out = serde_json::to_string_pretty(&report).expect("report types serialize");
    out.push('\n');
    out
}

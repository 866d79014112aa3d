//! The five commands. Each returns an [`Outcome`]: the certificate file,
//! a human-readable report, a CSV table and the exit code.

use std::fmt::Write as _;

use zerocert::certify::{certify_near_zero_with, example11_table, search_small_delta, SearchCandidate, SearchStatus};
use zerocert::delta::delta_bounds_with;
use zerocert::geometry::sample;
use zerocert::minimax::{convexity_mechanism_check, gap_inequality_check};
use zerocert::{ConvexBody, DeltaBounds, Error, Tolerances, Vector};

use crate::certificate::{CertificateFile, DeltaReport, GapReport, InvarianceCheck, NoCertificate, Payload};
use crate::config::ProblemConfig;
use crate::exit;
use crate::output::{g17, sci17, CsvTable};
use crate::CliError;

pub const DEFAULT_BUDGET: usize = 2000;
pub const DEFAULT_N_MAX: u64 = 10;
pub const DEFAULT_TRIALS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Delta,
    Certify,
    Search,
    Example11,
    Gap,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Delta => "delta",
            Command::Certify => "certify",
            Command::Search => "search",
            Command::Example11 => "example11",
            Command::Gap => "gap",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub file: CertificateFile,
    pub report: String,
    pub csv: CsvTable,
    pub exit_code: u8,
}

pub fn run(command: Command, config: &ProblemConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let tols = config.tolerances()?;
    let (status, payload, report, csv, exit_code) = match command {
        Command::Delta => cmd_delta(config, &tols)?,
        Command::Certify => cmd_certify(config, &tols)?,
        Command::Search => cmd_search(config, &tols)?,
        Command::Example11 => cmd_example11(config)?,
        Command::Gap => cmd_gap(config, &tols)?,
    };
    Ok(Outcome {
        file: CertificateFile::new(command.name(), config, status, payload),
        report,
        csv,
        exit_code,
    })
}

type Parts = (&'static str, Payload, String, CsvTable, u8);

fn points_field(points: &[Vector]) -> String {
    points
        .iter()
        .map(|p| p.iter().map(|x| sci17(*x)).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

fn body_line(body: &ConvexBody) -> String {
    match body {
        ConvexBody::Ball { center, radius } => format!("ball center {:?} radius {}", center.as_slice(), g17(*radius)),
        _ if body.is_singleton() => format!("singleton {:?}", body.generators().unwrap()[0].as_slice()),
        _ => {
            let gens = body.generators().unwrap();
            format!("{} with {} generators", body.kind_name(), gens.len())
        }
    }
}

fn similarity_checks(body: &ConvexBody, bounds: &DeltaBounds, resolution: usize, tols: &Tolerances) -> Result<Vec<InvarianceCheck>, CliError> {
    let d = body.dim();
    let shift = Vector::new((0..d).map(|i| 1.0 + 0.5 * i as f64).collect());
    let quarter_turn = |x: &Vector| {
        let mut y = x.clone();
        y[0] = -x[1];
        y[1] = x[0];
        y
    };
    let cases = [
        ("translation", body.translate(&shift), 1.0),
        ("quarter_turn", body.map_points(quarter_turn, 1.0), 1.0),
        ("scaling_by_2", body.scale(2.0), 4.0),
    ];
    let mut checks = Vec::new();
    for (name, moved, factor) in cases {
        let b = delta_bounds_with(&moved, resolution, tols)?;
        let expected_lower = factor * bounds.lower;
        let expected_upper = factor * bounds.upper;
        checks.push(InvarianceCheck {
            transform: name.to_string(),
            lower: b.lower,
            upper: b.upper,
            expected_lower,
            expected_upper,
            deviation: (b.lower - expected_lower).abs().max((b.upper - expected_upper).abs()),
        });
    }
    Ok(checks)
}

fn cmd_delta(config: &ProblemConfig, tols: &Tolerances) -> Result<Parts, CliError> {
    let body = config.body()?;
    let bounds = delta_bounds_with(&body, config.resolution, tols)?;
    let self_checks = similarity_checks(&body, &bounds, config.resolution, tols)?;

    let mut r = String::new();
    writeln!(r, "body: {}", body_line(&body)).unwrap();
    writeln!(r, "delta bracket: [{}, {}]", g17(bounds.lower), g17(bounds.upper)).unwrap();
    writeln!(r, "width: {}", g17(bounds.width())).unwrap();
    writeln!(r, "lower bound from {:?}, upper bound from {:?}", bounds.lower_source, bounds.upper_source).unwrap();
    let s = &bounds.slack;
    writeln!(r, "  floor diam^2/4: {}", g17(s.floor)).unwrap();
    writeln!(r, "  barycentric lower: {}", g17(s.barycentric_lower)).unwrap();
    if let Some(lp) = s.lp_lower {
        writeln!(r, "  LP lower: {} ({} grid points)", g17(lp), s.lp_grid_points).unwrap();
    }
    writeln!(r, "  recentering upper: {}", g17(s.recenter_upper)).unwrap();
    if let Some(ext) = s.extension_upper {
        writeln!(r, "  extension upper: {}", g17(ext)).unwrap();
    }
    for note in [&s.lp_note, &s.extension_note].into_iter().flatten() {
        writeln!(r, "  note: {note}").unwrap();
    }
    writeln!(r, "lower witness: psi on {} points", bounds.lower_witness.len()).unwrap();
    for c in &self_checks {
        writeln!(r, "self-check {}: deviation {}", c.transform, g17(c.deviation)).unwrap();
    }

    let mut csv = CsvTable::new(vec![
        "resolution",
        "lower",
        "upper",
        "lower_source",
        "upper_source",
        "floor",
        "barycentric_lower",
        "lp_lower",
        "recenter_upper",
        "extension_upper",
        "translation_deviation",
        "quarter_turn_deviation",
        "scaling_deviation",
    ]);
    let opt = |x: Option<f64>| x.map(sci17).unwrap_or_default();
    let name = |src| serde_json::to_value(src).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    csv.push(vec![
        bounds.resolution.to_string(),
        sci17(bounds.lower),
        sci17(bounds.upper),
        name(bounds.lower_source),
        name(bounds.upper_source),
        sci17(s.floor),
        sci17(s.barycentric_lower),
        opt(s.lp_lower),
        sci17(s.recenter_upper),
        opt(s.extension_upper),
        sci17(self_checks[0].deviation),
        sci17(self_checks[1].deviation),
        sci17(self_checks[2].deviation),
    ]);
    let payload = Payload::Delta(Box::new(DeltaReport {
        body,
        bounds,
        self_checks,
    }));
    Ok(("bracket", payload, r, csv, exit::SUCCESS))
}

fn cmd_certify(config: &ProblemConfig, tols: &Tolerances) -> Result<Parts, CliError> {
    let op = config.operator()?;
    let body = config.body()?;
    let header = vec![
        "status",
        "delta_lower",
        "delta_upper",
        "l",
        "residual_term",
        "claimed_bound",
        "grid_min",
        "sharpness_anomaly",
    ];
    let mut csv = CsvTable::new(header);
    match certify_near_zero_with(&op, &body, config.resolution, tols.hull, tols) {
        Ok(cert) => {
            let mut r = String::new();
            writeln!(r, "operator: {}", op.name()).unwrap();
            writeln!(r, "body: {}", body_line(&body)).unwrap();
            writeln!(r, "delta bracket: [{}, {}]", g17(cert.delta.lower), g17(cert.delta_upper)).unwrap();
            writeln!(r, "L: {} ({:?})", g17(cert.l), cert.l_provenance).unwrap();
            writeln!(r, "membership residual: {}", g17(cert.residual_term)).unwrap();
            writeln!(r, "certified: inf ||Phi|| over the body <= {}", g17(cert.claimed_bound)).unwrap();
            writeln!(r, "sampled min ||Phi||: {}", g17(cert.validation.grid_min)).unwrap();
            if cert.validation.sharpness_anomaly {
                writeln!(r, "warning: sampled minimum exceeds the bound plus grid slack").unwrap();
            }
            if let Some(w) = &cert.watermark {
                writeln!(r, "watermark: {w}").unwrap();
            }
            csv.push(vec![
                "certificate".into(),
                sci17(cert.delta.lower),
                sci17(cert.delta_upper),
                sci17(cert.l),
                sci17(cert.residual_term),
                sci17(cert.claimed_bound),
                sci17(cert.validation.grid_min),
                cert.validation.sharpness_anomaly.to_string(),
            ]);
            Ok(("certificate", Payload::NearZero(Box::new(cert)), r, csv, exit::SUCCESS))
        }
        Err(Error::NoCertificate(reason)) => {
            let r = format!("operator: {}\nbody: {}\nno certificate: {reason}\n", op.name(), body_line(&body));
            let mut row = vec![String::new(); 8];
            row[0] = "no-certificate".into();
            csv.push(row);
            let payload = Payload::NoCertificate(NoCertificate { body, reason });
            Ok(("no-certificate", payload, r, csv, exit::NO_CERTIFICATE))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_search(config: &ProblemConfig, tols: &Tolerances) -> Result<Parts, CliError> {
    let op = config.operator()?;
    let region = config.region()?;
    let budget = config.budget.unwrap_or(DEFAULT_BUDGET);
    let result = search_small_delta(&op, &region, budget, tols.hull)?;

    let kind = |c: &SearchCandidate| if c.body.is_singleton() { "singleton" } else { c.body.kind_name() };
    let mut r = String::new();
    writeln!(r, "operator: {}", op.name()).unwrap();
    writeln!(r, "region: {}", body_line(&region)).unwrap();
    writeln!(
        r,
        "evaluations: {} over {} grid points; {} candidates",
        result.evaluations, result.grid_points, result.candidates_found
    )
    .unwrap();
    match &result.best {
        Some(best) => {
            writeln!(r, "best: {} {}", kind(best), points_field(&best.body.generators().unwrap_or_default())).unwrap();
            writeln!(r, "best delta: {}", g17(best.delta_upper)).unwrap();
            writeln!(r, "best residual: {}", g17(best.residual)).unwrap();
        }
        None => writeln!(r, "no candidate found: the sampled image hulls all miss 0").unwrap(),
    }
    writeln!(r, "assumption: {}", result.assumption).unwrap();

    let mut csv = CsvTable::new(vec!["rank", "kind", "delta_upper", "residual", "generators"]);
    for (i, c) in result.trace.iter().enumerate() {
        csv.push(vec![
            (i + 1).to_string(),
            kind(c).to_string(),
            sci17(c.delta_upper),
            sci17(c.residual),
            points_field(&c.body.generators().unwrap_or_default()),
        ]);
    }
    let (status, code) = match result.status {
        SearchStatus::Found => ("found", exit::SUCCESS),
        SearchStatus::Empty => ("empty", exit::NO_CERTIFICATE),
    };
    Ok((status, Payload::Search(result), r, csv, code))
}

fn cmd_example11(config: &ProblemConfig) -> Result<Parts, CliError> {
    let n_max = config.n_max.unwrap_or(DEFAULT_N_MAX);
    let table = example11_table(n_max)?;
    let mut r = String::new();
    writeln!(r, "{:>5} {:>22} {:>22} {:>22} {:>22}", "n", "alpha", "beta", "beta^2-alpha^2", "delta").unwrap();
    for row in &table.rows {
        writeln!(
            r,
            "{:>5} {:>22} {:>22} {:>22} {:>22}",
            row.n,
            g17(row.alpha),
            g17(row.beta),
            g17(row.beta_sq_minus_alpha_sq),
            g17(row.delta_exact)
        )
        .unwrap();
    }
    writeln!(
        r,
        "||Phi|| over {} samples lies in [{}, {}]",
        table.samples,
        g17(table.phi_norm_min),
        g17(table.phi_norm_max)
    )
    .unwrap();

    let mut csv = CsvTable::new(vec![
        "n",
        "alpha",
        "beta",
        "phi_alpha_x",
        "phi_alpha_y",
        "phi_beta_x",
        "phi_beta_y",
        "beta_sq_minus_alpha_sq",
        "delta_exact",
        "membership_residual",
    ]);
    for row in &table.rows {
        csv.push(vec![
            row.n.to_string(),
            sci17(row.alpha),
            sci17(row.beta),
            sci17(row.phi_alpha[0]),
            sci17(row.phi_alpha[1]),
            sci17(row.phi_beta[0]),
            sci17(row.phi_beta[1]),
            sci17(row.beta_sq_minus_alpha_sq),
            sci17(row.delta_exact),
            sci17(row.membership_residual),
        ]);
    }
    Ok(("table", Payload::Example11(table), r, csv, exit::SUCCESS))
}

fn cmd_gap(config: &ProblemConfig, tols: &Tolerances) -> Result<Parts, CliError> {
    let op = config.operator()?;
    let body = config.body()?;
    let (l, l_provenance) = match (op.grad_lipschitz(), op.lipschitz_provenance()) {
        (Some(l), Some(p)) => (l, p),
        _ => return Err(Error::MissingLipschitz.into()),
    };
    let bounds = delta_bounds_with(&body, config.resolution, tols)?;
    let grid = sample(&body, config.resolution)?;
    let gap = gap_inequality_check(&op, &body, &bounds.lower_witness, &grid, l)?;
    let trials = config.trials.unwrap_or(DEFAULT_TRIALS);
    let mechanism = convexity_mechanism_check(&op, &body, l, trials, config.seed)?;
    let ok = gap.holds && mechanism.violations == 0;

    let mut r = String::new();
    writeln!(r, "operator: {}", op.name()).unwrap();
    writeln!(r, "body: {}", body_line(&body)).unwrap();
    writeln!(r, "L: {} ({:?})", g17(l), l_provenance).unwrap();
    writeln!(r, "inf sup - sup inf: {}", g17(gap.lhs)).unwrap();
    writeln!(r, "(L/2) osc: {}", g17(gap.rhs)).unwrap();
    writeln!(r, "discretization slack: {}", g17(gap.slack)).unwrap();
    writeln!(r, "gap inequality holds: {}", gap.holds).unwrap();
    writeln!(
        r,
        "convexity mechanism: {} violations in {} trials (worst residual {})",
        mechanism.violations,
        mechanism.trials,
        g17(mechanism.worst)
    )
    .unwrap();

    let mut csv = CsvTable::new(vec!["l", "lhs", "rhs", "slack", "holds", "violations", "worst", "trials"]);
    csv.push(vec![
        sci17(l),
        sci17(gap.lhs),
        sci17(gap.rhs),
        sci17(gap.slack),
        gap.holds.to_string(),
        mechanism.violations.to_string(),
        sci17(mechanism.worst),
        mechanism.trials.to_string(),
    ]);
    let payload = Payload::Gap(Box::new(GapReport {
        body,
        l,
        l_provenance,
        gap,
        mechanism,
    }));
    let (status, code) = if ok { ("holds", exit::SUCCESS) } else { ("violation", exit::NO_CERTIFICATE) };
    Ok((status, payload, r, csv, code))
}

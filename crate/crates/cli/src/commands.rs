//! Entity resolution and the non-scenario commands.
//!
//! Every command loads a model, resolves named entities (processes,
//! filtrations, integrators, measures, random times) and produces a
//! [`ScenarioReport`]. Exit semantics: verdict failures are mathematical
//! (a checked identity broke), resolution failures are input errors.

use crate::model::{BuiltModel, ModelError};
use crate::report::{
    fmt_integrand, fmt_measure, fmt_process, fmt_rat_value, fmt_rv, ReportBuilder,
    ScenarioReport,
};
use prplab_core::calculus::{
    doleans_exponential, doob_decomposition, is_process_predictable, jump_condition,
    quadratic_covariation, structure_alpha,
};
use prplab_core::enlargement::{first_strict_time, immersion_check, progressive_enlargement};
use prplab_core::measures::{
    extremal_points, find_equivalent_mm, is_extremal, is_unique_emm, martingale_polytope,
    measure_from_density, pairwise_singular,
};
use prplab_core::rational::Rat;
use prplab_core::representation::{integral_span, is_complete, represent};
use prplab_core::space::{
    is_martingale, natural_filtration, Filtration, Measure, Process,
};
use prplab_core::Error as CoreError;
use std::fmt;

/// Input-side failures; they all exit with status 2.
#[derive(Debug)]
pub enum CliError {
    Model(ModelError),
    UnknownEntity(String),
    Input(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Model(e) => write!(f, "{e}"),
            CliError::UnknownEntity(what) => write!(f, "unknown entity: {what}"),
            CliError::Input(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Input(e.to_string())
    }
}

pub fn get_process<'a>(model: &'a BuiltModel, name: &str) -> Result<&'a Process, CliError> {
    model
        .processes
        .get(name)
        .ok_or_else(|| CliError::UnknownEntity(format!("process '{name}'")))
}

/// `--filtration` values: absent (model filtration), `natural:A,B`, or
/// `explicit` (the model's explicit section, which is also its working
/// filtration when present).
pub fn resolve_filtration(
    model: &BuiltModel,
    spec: Option<&str>,
) -> Result<Filtration, CliError> {
    match spec {
        None => Ok(model.space.filtration().clone()),
        Some("explicit") => match &model.document.filtration {
            crate::model::FiltrationSpec::Explicit(_) => Ok(model.space.filtration().clone()),
            _ => Err(CliError::Input(
                "--filtration explicit requires an explicit filtration section in the model"
                    .into(),
            )),
        },
        Some(s) => {
            let Some(names) = s.strip_prefix("natural:") else {
                return Err(CliError::Input(format!(
                    "--filtration expects 'natural:A,B' or 'explicit', got '{s}'"
                )));
            };
            let mut chosen = Vec::new();
            for name in names.split(',').filter(|n| !n.is_empty()) {
                chosen.push(get_process(model, name)?);
            }
            if chosen.is_empty() {
                return Err(CliError::Input("--filtration natural: names no process".into()));
            }
            Ok(natural_filtration(&chosen, &model.space)?)
        }
    }
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                current.push(c);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(c);
            }
            ',' if depth == 0 => {
                out.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out.retain(|s| !s.is_empty());
    out
}

/// Integrator lists: process names plus `QC(A,B)` for the quadratic
/// covariation derived on demand.
pub fn resolve_integrators(
    model: &BuiltModel,
    spec: &str,
) -> Result<Vec<(String, Process)>, CliError> {
    let mut out = Vec::new();
    for token in split_top_level(spec) {
        if let Some(inner) = token.strip_prefix("QC(").and_then(|t| t.strip_suffix(')')) {
            let names: Vec<&str> = inner.split(',').map(str::trim).collect();
            if names.len() != 2 {
                return Err(CliError::Input(format!(
                    "QC takes exactly two process names, got '{token}'"
                )));
            }
            let a = get_process(model, names[0])?;
            let b = get_process(model, names[1])?;
            out.push((token.clone(), quadratic_covariation(a, b)?));
        } else {
            out.push((token.clone(), get_process(model, &token)?.clone()));
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("empty integrator list".into()));
    }
    Ok(out)
}

/// `--measure` values: `P` (the base measure) or `density:NAME` (reweight
/// the base measure by the terminal value of a named process).
pub fn resolve_measure(model: &BuiltModel, spec: &str) -> Result<Measure, CliError> {
    if spec == "P" {
        return Ok(model.space.measure().clone());
    }
    if let Some(name) = spec.strip_prefix("density:") {
        let l = get_process(model, name)?.terminal();
        return Ok(measure_from_density(model.space.measure(), &l)?);
    }
    Err(CliError::Input(format!(
        "--measure expects 'P' or 'density:NAME', got '{spec}'"
    )))
}

/// Default random time: the single one defined by the model, or the one
/// named `tau`.
pub fn default_random_time<'a>(
    model: &'a BuiltModel,
    name: Option<&str>,
) -> Result<&'a prplab_core::enlargement::RandomTime, CliError> {
    if let Some(name) = name {
        return model
            .random_times
            .get(name)
            .ok_or_else(|| CliError::UnknownEntity(format!("random time '{name}'")));
    }
    if model.random_times.len() == 1 {
        return Ok(model.random_times.values().next().expect("one entry"));
    }
    model
        .random_times
        .get("tau")
        .ok_or_else(|| CliError::UnknownEntity("random time (define 'tau' or pass --tau)".into()))
}

/// Builds the enlarged filtration from `--tau NAME` (progressive
/// enlargement) or `--join A,B` (join with the named processes' natural
/// filtration).
pub fn resolve_enlargement(
    model: &BuiltModel,
    reference: &Filtration,
    tau: Option<&str>,
    join: Option<&str>,
) -> Result<Filtration, CliError> {
    match (tau, join) {
        (Some(_), Some(_)) => {
            Err(CliError::Input("give either --tau or --join, not both".into()))
        }
        (None, Some(names)) => {
            let mut chosen = Vec::new();
            for name in names.split(',').filter(|n| !n.is_empty()) {
                chosen.push(get_process(model, name)?);
            }
            if chosen.is_empty() {
                return Err(CliError::Input("--join names no process".into()));
            }
            let extra = natural_filtration(&chosen, &model.space)?;
            Ok(reference.join_with(&extra)?)
        }
        (tau, None) => {
            let time = default_random_time(model, tau)?;
            Ok(progressive_enlargement(reference, time)?)
        }
    }
}

pub struct EnlargeArgs<'a> {
    pub tau: Option<&'a str>,
    pub join: Option<&'a str>,
}

pub fn cmd_decompose(
    model: &BuiltModel,
    model_name: &str,
    process: &str,
    filtration: Option<&str>,
    measure: &str,
) -> Result<ScenarioReport, CliError> {
    let x = get_process(model, process)?;
    let f = resolve_filtration(model, filtration)?;
    let q = resolve_measure(model, measure)?;
    let dec = doob_decomposition(x, &f, &q)?;
    let mut b = ReportBuilder::new("decompose", model_name);
    b.hypothesis("process is adapted to the working filtration", true);
    let n = model.space.outcome_count();
    let reconstructs = (0..n).all(|i| {
        (0..=model.space.horizon()).all(|t| {
            &(dec.initial.value(i)
                + dec.martingale_part.value(i, t)
                + dec.drift_part.value(i, t))
                == x.value(i, t)
        })
    });
    b.conclusion("initial + martingale + drift reproduces the process exactly", reconstructs);
    b.conclusion(
        "martingale part is a martingale",
        is_martingale(&dec.martingale_part, &f, &q)?,
    );
    b.conclusion(
        "drift part is predictable and null at zero",
        is_process_predictable(&dec.drift_part, &f)?
            && (0..n).all(|i| dec.drift_part.value(i, 0).eq(&Rat::new(0.into(), 1.into()))),
    );
    b.witness("initial", fmt_rv(&dec.initial));
    b.witness("martingale_part", fmt_process(&dec.martingale_part));
    b.witness("drift_part", fmt_process(&dec.drift_part));
    Ok(b.finish())
}

pub fn cmd_structure(
    model: &BuiltModel,
    model_name: &str,
    process: &str,
    filtration: Option<&str>,
    measure: &str,
) -> Result<ScenarioReport, CliError> {
    let x = get_process(model, process)?;
    let f = resolve_filtration(model, filtration)?;
    let q = resolve_measure(model, measure)?;
    let dec = doob_decomposition(x, &f, &q)?;
    let mut b = ReportBuilder::new("structure", model_name);
    match structure_alpha(&dec, &f, &q) {
        Err(CoreError::StructureConditionFails) => {
            b.hypothesis("structure condition is satisfiable", false);
            b.witness(
                "note",
                "the drift moves on a block where the predictable variation vanishes",
            );
        }
        Err(e) => return Err(e.into()),
        Ok(s) => {
            b.hypothesis("structure condition is satisfiable", true);
            b.conclusion(
                "drift equals the integral of alpha against the predictable variation",
                s.satisfied,
            );
            b.witness("alpha", fmt_integrand(&s.alpha));
            b.witness("predictable_variation", fmt_process(&s.predictable_qv));
            b.witness(
                "jump_condition",
                jump_condition(&s.alpha, &dec.martingale_part).to_string(),
            );
        }
    }
    Ok(b.finish())
}

pub fn cmd_doleans(
    model: &BuiltModel,
    model_name: &str,
    process: &str,
    filtration: Option<&str>,
    measure: &str,
) -> Result<ScenarioReport, CliError> {
    let x = get_process(model, process)?;
    let f = resolve_filtration(model, filtration)?;
    let q = resolve_measure(model, measure)?;
    let dec = doob_decomposition(x, &f, &q)?;
    let mut b = ReportBuilder::new("doleans", model_name);
    let s = match structure_alpha(&dec, &f, &q) {
        Err(CoreError::StructureConditionFails) => {
            b.hypothesis("structure condition is satisfiable", false);
            return Ok(b.finish());
        }
        Err(e) => return Err(e.into()),
        Ok(s) => {
            b.hypothesis("structure condition is satisfiable", true);
            s
        }
    };
    let m = &dec.martingale_part;
    if !jump_condition(&s.alpha, m) {
        b.hypothesis("jump condition alpha * dM < 1", false);
        return Ok(b.finish());
    }
    b.hypothesis("jump condition alpha * dM < 1", true);
    let l = doleans_exponential(&s.alpha, m)?;
    let n = model.space.outcome_count();
    let positive = (0..n)
        .all(|i| (0..=model.space.horizon()).all(|t| l.value(i, t) > &Rat::new(0.into(), 1.into())));
    b.conclusion("density process is strictly positive", positive);
    b.conclusion("terminal density has expectation one", q.expectation(&l.terminal()).eq(&Rat::new(1.into(), 1.into())));
    let recursion = (0..n).all(|i| {
        (1..=model.space.horizon()).all(|t| {
            l.increment(i, t) == -(l.value(i, t - 1) * s.alpha.at(i, t)) * m.increment(i, t)
        })
    });
    b.conclusion("multiplicative recursion holds exactly", recursion);
    b.witness("density_process", fmt_process(&l));
    let reweighted = measure_from_density(&q, &l.terminal())?;
    b.witness("reweighted_measure", fmt_measure(&reweighted));
    Ok(b.finish())
}

fn integrator_set(
    model: &BuiltModel,
    spec: Option<&str>,
) -> Result<Vec<(String, Process)>, CliError> {
    match spec {
        Some(s) => resolve_integrators(model, s),
        None => Ok(model
            .processes
            .iter()
            .map(|(name, p)| (name.clone(), p.clone()))
            .collect()),
    }
}

pub fn cmd_emm(
    model: &BuiltModel,
    model_name: &str,
    processes: Option<&str>,
    filtration: Option<&str>,
) -> Result<ScenarioReport, CliError> {
    let integrators = integrator_set(model, processes)?;
    let f = resolve_filtration(model, filtration)?;
    let refs: Vec<&Process> = integrators.iter().map(|(_, p)| p).collect();
    let poly = martingale_polytope(&refs, &f, &model.space)?;
    let mut b = ReportBuilder::new("emm", model_name);
    match find_equivalent_mm(&poly) {
        Some(q) => {
            b.conclusion("returned measure satisfies the martingale constraints exactly", poly.contains(&q));
            b.witness("equivalent_martingale_measure", fmt_measure(&q));
        }
        None => {
            b.witness("equivalent_martingale_measure", "absent");
        }
    }
    b.witness("unique", is_unique_emm(&poly).to_string());
    Ok(b.finish())
}

pub fn cmd_extremals(
    model: &BuiltModel,
    model_name: &str,
    processes: Option<&str>,
    filtration: Option<&str>,
) -> Result<ScenarioReport, CliError> {
    let integrators = integrator_set(model, processes)?;
    let f = resolve_filtration(model, filtration)?;
    let refs: Vec<&Process> = integrators.iter().map(|(_, p)| p).collect();
    let poly = martingale_polytope(&refs, &f, &model.space)?;
    let mut b = ReportBuilder::new("extremals", model_name);
    match extremal_points(&poly) {
        Err(CoreError::InfeasibleSystem) => {
            b.hypothesis("constraint system is feasible", false);
        }
        Err(e) => return Err(e.into()),
        Ok(vs) => {
            b.hypothesis("constraint system is feasible", true);
            let mut all_contained = true;
            let mut all_extremal = true;
            for (i, v) in vs.iter().enumerate() {
                all_contained &= poly.contains(v);
                all_extremal &= is_extremal(v, &poly)?;
                b.witness(&format!("vertex_{i}"), fmt_measure(v));
            }
            b.conclusion("every vertex satisfies the constraints exactly", all_contained);
            b.conclusion("every returned point is extremal", all_extremal);
            b.witness("count", vs.len().to_string());
            b.witness("pairwise_singular", pairwise_singular(&vs).to_string());
        }
    }
    Ok(b.finish())
}

pub fn cmd_complete(
    model: &BuiltModel,
    model_name: &str,
    integrators: Option<&str>,
    filtration: Option<&str>,
    measure: &str,
) -> Result<ScenarioReport, CliError> {
    let integrators = integrator_set(model, integrators)?;
    let f = resolve_filtration(model, filtration)?;
    let q = resolve_measure(model, measure)?;
    let refs: Vec<&Process> = integrators.iter().map(|(_, p)| p).collect();
    let complete = is_complete(&refs, &f, &model.space, &q)?;
    let span = integral_span(&refs, &f, &model.space)?;
    let mut b = ReportBuilder::new("complete", model_name);
    b.witness("complete", complete.to_string());
    b.witness("span_dimension", span.dimension().to_string());
    b.witness("outcome_count", model.space.outcome_count().to_string());
    Ok(b.finish())
}

pub fn cmd_represent(
    model: &BuiltModel,
    model_name: &str,
    target: &str,
    integrators: &str,
    filtration: Option<&str>,
    measure: &str,
) -> Result<ScenarioReport, CliError> {
    let h = get_process(model, target)?.terminal();
    let integrators = resolve_integrators(model, integrators)?;
    let f = resolve_filtration(model, filtration)?;
    let q = resolve_measure(model, measure)?;
    let refs: Vec<&Process> = integrators.iter().map(|(_, p)| p).collect();
    let rep = represent(&h, &refs, &f, &model.space, &q)?;
    let mut b = ReportBuilder::new("represent", model_name);
    let n = model.space.outcome_count();
    let exact = (0..n)
        .all(|i| &(rep.reconstruction.value(i) + rep.residual.value(i)) == h.value(i));
    b.conclusion("reconstruction plus residual equals the target exactly", exact);
    b.witness("target", fmt_rv(&h));
    b.witness("constant", fmt_rat_value(&rep.constant));
    for ((name, _), xi) in integrators.iter().zip(&rep.integrands) {
        b.witness(&format!("integrand_{name}"), fmt_integrand(xi));
    }
    b.witness("residual", fmt_rv(&rep.residual));
    b.witness("representable", rep.residual.is_zero().to_string());
    b.witness("integrands_unique", rep.integrands_unique.to_string());
    Ok(b.finish())
}

pub fn cmd_enlarge(
    model: &BuiltModel,
    model_name: &str,
    args: &EnlargeArgs,
) -> Result<ScenarioReport, CliError> {
    let f = model.space.filtration().clone();
    let g = resolve_enlargement(model, &f, args.tau, args.join)?;
    let report = first_strict_time(&f, &g)?;
    let mut b = ReportBuilder::new("enlarge", model_name);
    b.witness("u", report.u.map_or("absent".to_string(), |u| u.to_string()));
    b.witness("u_is_min", report.u_is_min.to_string());
    b.witness(
        "strict_times",
        format!(
            "[{}]",
            report.strict_times.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
        ),
    );
    b.witness("initial_enlarged_sigma_algebra_trivial", report.g0_trivial.to_string());
    b.witness("strict_after_u", report.strict_after_u.to_string());
    Ok(b.finish())
}

pub fn cmd_witness(
    model: &BuiltModel,
    model_name: &str,
    args: &EnlargeArgs,
) -> Result<ScenarioReport, CliError> {
    let f = model.space.filtration().clone();
    let g = resolve_enlargement(model, &f, args.tau, args.join)?;
    let mut b = ReportBuilder::new("witness", model_name);
    crate::scenarios::witness_body(&mut b, model, &f, &g)?;
    Ok(b.finish())
}

pub fn cmd_immersion(
    model: &BuiltModel,
    model_name: &str,
    args: &EnlargeArgs,
    measure: &str,
) -> Result<ScenarioReport, CliError> {
    let f = model.space.filtration().clone();
    let g = resolve_enlargement(model, &f, args.tau, args.join)?;
    let q = resolve_measure(model, measure)?;
    let report = immersion_check(&f, &g, &q, &model.space)?;
    let mut b = ReportBuilder::new("immersion", model_name);
    b.conclusion("the two characterizations agree", report.equivalence_holds);
    b.witness("all_martingales_survive", report.all_martingales_survive.to_string());
    b.witness("intersection_identity", report.intersection_identity.to_string());
    b.witness(
        "conditional_measurability",
        report.conditional_measurability.to_string(),
    );
    b.witness("immersion", report.immersion().to_string());
    Ok(b.finish())
}

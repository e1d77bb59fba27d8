//! Builtin scenarios: one runner per theorem-shaped statement.
//!
//! Each scenario verifies its hypotheses on the model, evaluates the
//! conclusions only when the hypotheses hold, and reports witness values.
//! A conclusion that fails under passing hypotheses is a mathematical
//! verdict failure and drives the nonzero exit status.

use crate::commands::{default_random_time, CliError};
use crate::model::BuiltModel;
use crate::report::{fmt_measure, fmt_rv, ReportBuilder, ScenarioReport};
use prplab_core::calculus::{
    are_independent, doob_decomposition, is_strongly_orthogonal, jump_condition,
    quadratic_covariation, structure_alpha,
};
use prplab_core::enlargement::{
    first_strict_time, immersion_check, progressive_enlargement, prp_loss_witness,
};
use prplab_core::measures::{
    extremal_points, find_equivalent_mm, is_extremal, martingale_polytope, pairwise_singular,
    product_law, second_ftap_report, unique_emm_on_quotient,
};
use prplab_core::representation::{
    is_complete, orthogonal_decomposition_report, prp_inheritance_report, prp_under,
    triplet_representation_report,
};
use prplab_core::space::{
    is_martingale, is_trivial, natural_filtration, Filtration, FiniteFilteredSpace, Measure,
    Process,
};
use prplab_core::Error as CoreError;

/// What a builtin scenario needs and what it checks.
#[derive(Debug, Clone)]
pub struct ScenarioDescriptor {
    pub name: &'static str,
    pub summary: &'static str,
    pub requires: &'static str,
    pub default_model: &'static str,
    pub hypotheses: &'static [&'static str],
    pub conclusions: &'static [&'static str],
}

pub fn descriptors() -> Vec<ScenarioDescriptor> {
    vec![
        ScenarioDescriptor {
            name: "prop1",
            summary: "strict inclusion of the enlarged filtration persists after the first strict time",
            requires: "one process (X) and one random time (tau)",
            default_model: "TAU",
            hypotheses: &[
                "unique equivalent martingale measure for the reference filtration",
                "equivalent martingale measure exists for the enlarged filtration",
            ],
            conclusions: &["strict inclusion holds at every time after the first strict time"],
        },
        ScenarioDescriptor {
            name: "thm2",
            summary: "loss of the representation property under an enlargement attained at a positive time",
            requires: "one process (X) and one random time (tau)",
            default_model: "TAU",
            hypotheses: &[
                "unique equivalent martingale measure for the reference filtration",
                "equivalent martingale measure exists for the enlarged filtration",
                "enlarged filtration starts trivial",
                "first strict time exists and is positive",
            ],
            conclusions: &[
                "witness is nonzero",
                "witness is centered given the reference information at the strict time",
                "witness pairs to zero with every enlarged-predictable integral",
                "witness is not representable",
                "codimension is at least one",
            ],
        },
        ScenarioDescriptor {
            name: "lemma1",
            summary: "strong orthogonality under the join is equivalent to independence",
            requires: "two martingales (M, N)",
            default_model: "COIN2",
            hypotheses: &[
                "base measure is the unique martingale measure for the first process on its own filtration",
                "base measure is the unique martingale measure for the second process on its own filtration",
                "initial product vanishes",
            ],
            conclusions: &["strong orthogonality under the join is equivalent to independence"],
        },
        ScenarioDescriptor {
            name: "thm3",
            summary: "three-way orthogonal decomposition of the centered terminal space",
            requires: "two martingales (M, N)",
            default_model: "COIN2",
            hypotheses: &[
                "base measure is the unique martingale measure for the first process on its own filtration",
                "base measure is the unique martingale measure for the second process on its own filtration",
                "the martingales are strongly orthogonal under the join",
            ],
            conclusions: &[
                "integral spans are pairwise orthogonal",
                "integral spans are centered",
                "spans plus constants fill the terminal space",
                "covariation is strongly orthogonal to the first martingale",
                "covariation is strongly orthogonal to the second martingale",
            ],
        },
        ScenarioDescriptor {
            name: "cor1",
            summary: "vanishing covariation is equivalent to completeness of the martingale pair",
            requires: "two martingales (M, N)",
            default_model: "COIN2",
            hypotheses: &[
                "base measure is the unique martingale measure for the first process on its own filtration",
                "base measure is the unique martingale measure for the second process on its own filtration",
                "the martingales are strongly orthogonal under the join",
            ],
            conclusions: &["the covariation vanishes exactly when the pair is complete"],
        },
        ScenarioDescriptor {
            name: "prop2",
            summary: "the martingale part inherits the representation property",
            requires: "one process (X)",
            default_model: "BIN-DRIFT",
            hypotheses: &[
                "unique equivalent martingale measure on the process's own filtration",
                "structure condition is satisfiable",
                "jump condition alpha * dM < 1",
            ],
            conclusions: &[
                "martingale part is complete for the process's own filtration",
                "the density measure is a minimal martingale measure",
                "the density measure coincides with the unique martingale measure",
            ],
        },
        ScenarioDescriptor {
            name: "thm4",
            summary: "triplet representation for two semimartingales under the join",
            requires: "two processes (X, Y)",
            default_model: "PROD2",
            hypotheses: &[
                "unique marginal martingale measures for both processes",
                "jump conditions for both structure integrands",
                "martingale parts strongly orthogonal under the join",
            ],
            conclusions: &[
                "product measure makes both processes independent martingales",
                "every terminal variable is representable against the semimartingale triplet",
                "every terminal variable is representable against the martingale triplet",
            ],
        },
        ScenarioDescriptor {
            name: "cor3",
            summary: "vanishing covariation is equivalent to completeness of the semimartingale pair",
            requires: "two processes (X, Y)",
            default_model: "PROD2",
            hypotheses: &[
                "unique marginal martingale measures for both processes",
                "jump conditions for both structure integrands",
                "martingale parts strongly orthogonal under the join",
            ],
            conclusions: &["the covariation vanishes exactly when the pair is complete"],
        },
        ScenarioDescriptor {
            name: "remark-product-law",
            summary: "triplet representation after switching to the product of the marginal laws",
            requires: "two processes (X, Y or M, N)",
            default_model: "COIN2",
            hypotheses: &[
                "joint law is equivalent to the product of the marginal laws",
                "unique marginal martingale measures under the product law",
                "jump conditions under the product law",
                "martingale parts strongly orthogonal under the product law",
            ],
            conclusions: &[
                "triplet representation holds under the product law",
            ],
        },
        ScenarioDescriptor {
            name: "thm5",
            summary: "extremality is trivial initial information plus the representation property",
            requires: "one process (X)",
            default_model: "TRI",
            hypotheses: &["equivalent martingale measure exists"],
            conclusions: &["extremality characterization holds for every candidate measure"],
        },
        ScenarioDescriptor {
            name: "cor4",
            summary: "extremal martingale measures are pairwise singular",
            requires: "one process (X)",
            default_model: "TRI",
            hypotheses: &["constraint system is feasible"],
            conclusions: &["extremal points are pairwise singular"],
        },
        ScenarioDescriptor {
            name: "ftap",
            summary: "completeness is equivalent to uniqueness of the equivalent martingale measure",
            requires: "one process (X)",
            default_model: "BIN",
            hypotheses: &["equivalent martingale measure exists"],
            conclusions: &[
                "uniqueness and completeness verdicts agree",
                "extremality characterization holds for every candidate measure",
            ],
        },
        ScenarioDescriptor {
            name: "immersion",
            summary: "martingale preservation is equivalent to the intersection-and-measurability characterization",
            requires: "a random time (tau) for the progressive enlargement",
            default_model: "TAU",
            hypotheses: &["the enlarged filtration contains the reference one"],
            conclusions: &["the two characterizations agree"],
        },
    ]
}

pub fn run_scenario(
    name: &str,
    model: &BuiltModel,
    model_name: &str,
) -> Result<ScenarioReport, CliError> {
    match name {
        "prop1" => prop1(model, model_name),
        "thm2" => thm2(model, model_name),
        "lemma1" => lemma1(model, model_name),
        "thm3" => thm3(model, model_name),
        "cor1" => cor1(model, model_name),
        "prop2" => prop2(model, model_name),
        "thm4" => thm4(model, model_name),
        "cor3" => cor3(model, model_name),
        "remark-product-law" => remark_product_law(model, model_name),
        "thm5" => thm5(model, model_name),
        "cor4" => cor4(model, model_name),
        "ftap" => ftap(model, model_name),
        "immersion" => immersion(model, model_name),
        other => Err(CliError::UnknownEntity(format!(
            "scenario '{other}' (run `prplab scenario --list`)"
        ))),
    }
}

fn pick_single(model: &BuiltModel) -> Result<(&str, &Process), CliError> {
    if let Some(p) = model.processes.get("X") {
        return Ok(("X", p));
    }
    if model.processes.len() == 1 {
        let (name, p) = model.processes.iter().next().expect("one entry");
        return Ok((name.as_str(), p));
    }
    Err(CliError::UnknownEntity("process 'X' (or a single-process model)".into()))
}

fn pick_pair<'a>(
    model: &'a BuiltModel,
    prefs: &[(&'a str, &'a str)],
) -> Result<(&'a str, &'a Process, &'a str, &'a Process), CliError> {
    for (a, b) in prefs {
        if let (Some(pa), Some(pb)) = (model.processes.get(*a), model.processes.get(*b)) {
            return Ok((a, pa, b, pb));
        }
    }
    Err(CliError::UnknownEntity(format!(
        "process pair {}",
        prefs
            .iter()
            .map(|(a, b)| format!("({a}, {b})"))
            .collect::<Vec<_>>()
            .join(" or ")
    )))
}

/// Martingale-aware strong orthogonality: false (rather than an error)
/// when one of the processes fails to be a martingale for the join.
fn strongly_orthogonal_martingales(
    m: &Process,
    n: &Process,
    g: &Filtration,
    measure: &Measure,
) -> Result<bool, CliError> {
    if !is_martingale(m, g, measure)? || !is_martingale(n, g, measure)? {
        return Ok(false);
    }
    Ok(is_strongly_orthogonal(m, n, g, measure)?)
}

fn enlarged_filtration(model: &BuiltModel) -> Result<Filtration, CliError> {
    let tau = default_random_time(model, None)?;
    Ok(progressive_enlargement(model.space.filtration(), tau)?)
}

fn prop1(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, x) = pick_single(model)?;
    let f = model.space.filtration().clone();
    let g = enlarged_filtration(model)?;
    let mut b = ReportBuilder::new("prop1", model_name);
    let h1 = unique_emm_on_quotient(x, &f, &model.space)?.is_some();
    b.hypothesis("unique equivalent martingale measure for the reference filtration", h1);
    let h2 = enlarged_emm(model, x, &g)?.is_some();
    b.hypothesis("equivalent martingale measure exists for the enlarged filtration", h2);
    let report = first_strict_time(&f, &g)?;
    b.witness("u", report.u.map_or("absent".into(), |u| u.to_string()));
    b.witness(
        "strict_times",
        format!(
            "[{}]",
            report.strict_times.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
        ),
    );
    if b.hypotheses_hold() {
        b.conclusion(
            "strict inclusion holds at every time after the first strict time",
            report.strict_after_u,
        );
    }
    Ok(b.finish())
}

fn enlarged_emm(
    model: &BuiltModel,
    x: &Process,
    g: &Filtration,
) -> Result<Option<Measure>, CliError> {
    let (qspace, qprocs) = model.space.quotient(g, &[x])?;
    let poly = martingale_polytope(&[&qprocs[0]], qspace.filtration(), &qspace)?;
    Ok(find_equivalent_mm(&poly).map(|q| {
        model
            .space
            .lift_measure(g.terminal(), &q)
            .expect("atom measure lifts to the outcome space")
    }))
}

/// Hypothesis and conclusion lines for the representation-loss witness;
/// shared between the `witness` command and the `thm2` scenario.
pub(crate) fn witness_body(
    b: &mut ReportBuilder,
    model: &BuiltModel,
    f: &Filtration,
    g: &Filtration,
) -> Result<(), CliError> {
    let (_, x) = pick_single(model)?;
    let h1 = unique_emm_on_quotient(x, f, &model.space)?.is_some();
    b.hypothesis("unique equivalent martingale measure for the reference filtration", h1);
    let h2 = enlarged_emm(model, x, g)?.is_some();
    b.hypothesis("equivalent martingale measure exists for the enlarged filtration", h2);
    let strict = first_strict_time(f, g)?;
    b.hypothesis("enlarged filtration starts trivial", strict.g0_trivial);
    b.hypothesis(
        "first strict time exists and is positive",
        strict.u.is_some_and(|u| u > 0),
    );
    if !b.hypotheses_hold() {
        return Ok(());
    }
    let report = prp_loss_witness(x, f, g, &model.space)?;
    let witness = report.witness.as_ref().expect("hypotheses verified above");
    b.conclusion("witness is nonzero", !witness.is_zero());
    b.conclusion(
        "witness is centered given the reference information at the strict time",
        report.centered_given_reference,
    );
    b.conclusion(
        "witness pairs to zero with every enlarged-predictable integral",
        report.orthogonal_to_span,
    );
    b.conclusion("witness is not representable", report.not_representable);
    b.conclusion("codimension is at least one", report.codimension >= 1);
    b.witness("u", report.u.map_or("absent".into(), |u| u.to_string()));
    if let Some(block) = &report.block {
        let labels: Vec<&str> =
            block.iter().map(|&i| model.space.outcomes()[i].as_str()).collect();
        b.witness("block", format!("{{{}}}", labels.join(", ")));
    }
    b.witness("witness", fmt_rv(witness));
    if let Some(q) = &report.pricing_measure {
        b.witness("pricing_measure", fmt_measure(q));
    }
    b.witness("codimension", report.codimension.to_string());
    Ok(())
}

fn thm2(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let f = model.space.filtration().clone();
    let g = enlarged_filtration(model)?;
    let mut b = ReportBuilder::new("thm2", model_name);
    witness_body(&mut b, model, &f, &g)?;
    Ok(b.finish())
}

/// The unique-measure hypothesis with the base measure as the unique
/// element, for a process on its own natural filtration.
fn own_measure_is_unique_emm(
    model: &BuiltModel,
    p: &Process,
) -> Result<bool, CliError> {
    let f = natural_filtration(&[p], &model.space)?;
    Ok(unique_emm_on_quotient(p, &f, &model.space)?.as_ref() == Some(model.space.measure()))
}

fn lemma1(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, m, _, n) = pick_pair(model, &[("M", "N"), ("X", "Y")])?;
    let mut b = ReportBuilder::new("lemma1", model_name);
    b.hypothesis(
        "base measure is the unique martingale measure for the first process on its own filtration",
        own_measure_is_unique_emm(model, m)?,
    );
    b.hypothesis(
        "base measure is the unique martingale measure for the second process on its own filtration",
        own_measure_is_unique_emm(model, n)?,
    );
    let n_outcomes = model.space.outcome_count();
    let initial_zero =
        (0..n_outcomes).all(|i| (m.value(i, 0) * n.value(i, 0)).eq(&prplab_core::Rat::new(0.into(), 1.into())));
    b.hypothesis("initial product vanishes", initial_zero);
    if b.hypotheses_hold() {
        let fm = natural_filtration(&[m], &model.space)?;
        let fn_ = natural_filtration(&[n], &model.space)?;
        let g = fm.join_with(&fn_)?;
        let orthogonal = strongly_orthogonal_martingales(m, n, &g, model.space.measure())?;
        let independent = are_independent(&fm, &fn_, model.space.measure())?;
        b.conclusion(
            "strong orthogonality under the join is equivalent to independence",
            orthogonal == independent,
        );
        b.witness("strongly_orthogonal", orthogonal.to_string());
        b.witness("independent", independent.to_string());
    }
    Ok(b.finish())
}

fn martingale_pair_hypotheses(
    b: &mut ReportBuilder,
    model: &BuiltModel,
    m: &Process,
    n: &Process,
) -> Result<(), CliError> {
    b.hypothesis(
        "base measure is the unique martingale measure for the first process on its own filtration",
        own_measure_is_unique_emm(model, m)?,
    );
    b.hypothesis(
        "base measure is the unique martingale measure for the second process on its own filtration",
        own_measure_is_unique_emm(model, n)?,
    );
    let fm = natural_filtration(&[m], &model.space)?;
    let fn_ = natural_filtration(&[n], &model.space)?;
    let g = fm.join_with(&fn_)?;
    b.hypothesis(
        "the martingales are strongly orthogonal under the join",
        strongly_orthogonal_martingales(m, n, &g, model.space.measure())?,
    );
    Ok(())
}

fn thm3(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, m, _, n) = pick_pair(model, &[("M", "N"), ("X", "Y")])?;
    let mut b = ReportBuilder::new("thm3", model_name);
    martingale_pair_hypotheses(&mut b, model, m, n)?;
    if b.hypotheses_hold() {
        let report = orthogonal_decomposition_report(m, n, &model.space, model.space.measure())
            .map_err(|e| CliError::Input(e.to_string()))?;
        b.conclusion("integral spans are pairwise orthogonal", report.spans_pairwise_orthogonal);
        b.conclusion("integral spans are centered", report.spans_centered);
        b.conclusion(
            "spans plus constants fill the terminal space",
            report.dim_first + report.dim_second + report.dim_bracket + 1
                == report.terminal_dimension,
        );
        b.conclusion(
            "covariation is strongly orthogonal to the first martingale",
            report.bracket_orthogonal_to_first,
        );
        b.conclusion(
            "covariation is strongly orthogonal to the second martingale",
            report.bracket_orthogonal_to_second,
        );
        b.witness(
            "dimensions",
            format!(
                "{} + {} + {} + 1 = {}",
                report.dim_first,
                report.dim_second,
                report.dim_bracket,
                report.terminal_dimension
            ),
        );
    }
    Ok(b.finish())
}

fn cor1(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, m, _, n) = pick_pair(model, &[("M", "N"), ("X", "Y")])?;
    let mut b = ReportBuilder::new("cor1", model_name);
    martingale_pair_hypotheses(&mut b, model, m, n)?;
    if b.hypotheses_hold() {
        let fm = natural_filtration(&[m], &model.space)?;
        let fn_ = natural_filtration(&[n], &model.space)?;
        let g = fm.join_with(&fn_)?;
        let vanishes = quadratic_covariation(m, n)?.is_identically_zero();
        let complete = is_complete(&[m, n], &g, &model.space, model.space.measure())?;
        b.conclusion(
            "the covariation vanishes exactly when the pair is complete",
            vanishes == complete,
        );
        b.witness("covariation_vanishes", vanishes.to_string());
        b.witness("pair_complete", complete.to_string());
    }
    Ok(b.finish())
}

fn prop2(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, x) = pick_single(model)?;
    let mut b = ReportBuilder::new("prop2", model_name);
    let fx = natural_filtration(&[x], &model.space)?;
    b.hypothesis(
        "unique equivalent martingale measure on the process's own filtration",
        unique_emm_on_quotient(x, &fx, &model.space)?.is_some(),
    );
    let dec = doob_decomposition(x, &fx, model.space.measure())?;
    match structure_alpha(&dec, &fx, model.space.measure()) {
        Err(CoreError::StructureConditionFails) => {
            b.hypothesis("structure condition is satisfiable", false);
        }
        Err(e) => return Err(e.into()),
        Ok(s) => {
            b.hypothesis("structure condition is satisfiable", true);
            b.hypothesis(
                "jump condition alpha * dM < 1",
                jump_condition(&s.alpha, &dec.martingale_part),
            );
        }
    }
    if b.hypotheses_hold() {
        let report = prp_inheritance_report(x, &model.space)
            .map_err(|e| CliError::Input(e.to_string()))?;
        b.conclusion(
            "martingale part is complete for the process's own filtration",
            report.martingale_part_complete,
        );
        b.conclusion(
            "the density measure is a minimal martingale measure",
            report.minimal_measure_ok,
        );
        b.conclusion(
            "the density measure coincides with the unique martingale measure",
            report.doleans_matches_unique_emm,
        );
        b.witness("density_measure", fmt_measure(&report.doleans_measure));
    }
    Ok(b.finish())
}

fn semimartingale_pair_hypotheses(
    b: &mut ReportBuilder,
    space: &FiniteFilteredSpace,
    measure: &Measure,
    x: &Process,
    y: &Process,
) -> Result<(), CliError> {
    let fx = natural_filtration(&[x], space)?;
    let fy = natural_filtration(&[y], space)?;
    let mut marginals_unique = true;
    let mut jumps = true;
    let mut parts = Vec::new();
    for (proc, f) in [(x, &fx), (y, &fy)] {
        let (qspace, qprocs) = space.quotient(f, &[proc])?;
        let poly = martingale_polytope(&[&qprocs[0]], qspace.filtration(), &qspace)?;
        marginals_unique &= prplab_core::measures::is_unique_emm(&poly);
        let dec = doob_decomposition(proc, f, measure)?;
        match structure_alpha(&dec, f, measure) {
            Err(CoreError::StructureConditionFails) => jumps = false,
            Err(e) => return Err(e.into()),
            Ok(s) => jumps &= jump_condition(&s.alpha, &dec.martingale_part),
        }
        parts.push(dec.martingale_part);
    }
    b.hypothesis("unique marginal martingale measures for both processes", marginals_unique);
    b.hypothesis("jump conditions for both structure integrands", jumps);
    let g = fx.join_with(&fy)?;
    b.hypothesis(
        "martingale parts strongly orthogonal under the join",
        x != y && strongly_orthogonal_martingales(&parts[0], &parts[1], &g, measure)?,
    );
    Ok(())
}

fn thm4(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, x, _, y) = pick_pair(model, &[("X", "Y"), ("M", "N")])?;
    let mut b = ReportBuilder::new("thm4", model_name);
    semimartingale_pair_hypotheses(&mut b, &model.space, model.space.measure(), x, y)?;
    if b.hypotheses_hold() {
        let report = triplet_representation_report(x, y, &model.space, model.space.measure())
            .map_err(|e| CliError::Input(e.to_string()))?;
        b.conclusion(
            "product measure makes both processes independent martingales",
            report.x_martingale_under_q
                && report.y_martingale_under_q
                && report.independent_under_q,
        );
        b.conclusion(
            "every terminal variable is representable against the semimartingale triplet",
            report.semimartingale_representation_complete,
        );
        b.conclusion(
            "every terminal variable is representable against the martingale triplet",
            report.martingale_representation_complete,
        );
        b.witness("product_measure", fmt_measure(&report.product_measure));
        b.witness(
            "semimartingale_integrands_unique",
            report.semimartingale_integrands_unique.to_string(),
        );
        b.witness(
            "martingale_integrands_unique",
            report.martingale_integrands_unique.to_string(),
        );
    }
    Ok(b.finish())
}

fn cor3(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, x, _, y) = pick_pair(model, &[("X", "Y"), ("M", "N")])?;
    let mut b = ReportBuilder::new("cor3", model_name);
    semimartingale_pair_hypotheses(&mut b, &model.space, model.space.measure(), x, y)?;
    if b.hypotheses_hold() {
        let fx = natural_filtration(&[x], &model.space)?;
        let fy = natural_filtration(&[y], &model.space)?;
        let g = fx.join_with(&fy)?;
        let vanishes = quadratic_covariation(x, y)?.is_identically_zero();
        let complete = is_complete(&[x, y], &g, &model.space, model.space.measure())?;
        b.conclusion(
            "the covariation vanishes exactly when the pair is complete",
            vanishes == complete,
        );
        b.witness("covariation_vanishes", vanishes.to_string());
        b.witness("pair_complete", complete.to_string());
    }
    Ok(b.finish())
}

fn remark_product_law(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, x, _, y) = pick_pair(model, &[("X", "Y"), ("M", "N")])?;
    let mut b = ReportBuilder::new("remark-product-law", model_name);
    let fx = natural_filtration(&[x], &model.space)?;
    let fy = natural_filtration(&[y], &model.space)?;
    let Some(law) = product_law(&model.space, &fx, &fy) else {
        b.hypothesis("joint law is equivalent to the product of the marginal laws", false);
        return Ok(b.finish());
    };
    b.hypothesis("joint law is equivalent to the product of the marginal laws", true);
    b.witness("product_law", fmt_measure(&law));
    // Re-found the space on the product law and check the pair
    // hypotheses there.
    let switched = FiniteFilteredSpace::new(
        model.space.outcomes().to_vec(),
        law.weights().to_vec(),
        model.space.filtration().partitions().to_vec(),
        model.space.horizon(),
    )
    .map_err(|e| CliError::Input(e.to_string()))?;
    let mut inner = ReportBuilder::new("inner", model_name);
    semimartingale_pair_hypotheses(&mut inner, &switched, switched.measure(), x, y)?;
    let inner_report = inner.finish();
    let marginals = inner_report.hypotheses[0].pass;
    let jumps = inner_report.hypotheses[1].pass;
    let orthogonal = inner_report.hypotheses[2].pass;
    b.hypothesis("unique marginal martingale measures under the product law", marginals);
    b.hypothesis("jump conditions under the product law", jumps);
    b.hypothesis("martingale parts strongly orthogonal under the product law", orthogonal);
    if b.hypotheses_hold() {
        let report = triplet_representation_report(x, y, &switched, switched.measure())
            .map_err(|e| CliError::Input(e.to_string()))?;
        b.conclusion("triplet representation holds under the product law", report.pass);
    }
    Ok(b.finish())
}

fn thm5(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, x) = pick_single(model)?;
    let f = model.space.filtration().clone();
    let poly = martingale_polytope(&[x], &f, &model.space)?;
    let mut b = ReportBuilder::new("thm5", model_name);
    let emm = find_equivalent_mm(&poly);
    b.hypothesis("equivalent martingale measure exists", emm.is_some());
    if let Some(emm) = emm {
        let mut candidates = poly.vertices();
        if !candidates.contains(&emm) {
            candidates.push(emm);
        }
        let mut all_hold = true;
        for (i, q) in candidates.iter().enumerate() {
            let extremal = is_extremal(q, &poly)?;
            let trivial0 = is_trivial(f.at(0), q);
            let prp = prp_under(&[x], &f, &model.space, q)?;
            all_hold &= extremal == (trivial0 && prp);
            b.witness(
                &format!("candidate_{i}"),
                format!(
                    "{} extremal={} initial_trivial={} representation={}",
                    fmt_measure(q),
                    extremal,
                    trivial0,
                    prp
                ),
            );
        }
        b.conclusion("extremality characterization holds for every candidate measure", all_hold);
    }
    Ok(b.finish())
}

fn cor4(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, x) = pick_single(model)?;
    let f = model.space.filtration().clone();
    let poly = martingale_polytope(&[x], &f, &model.space)?;
    let mut b = ReportBuilder::new("cor4", model_name);
    match extremal_points(&poly) {
        Err(CoreError::InfeasibleSystem) => {
            b.hypothesis("constraint system is feasible", false);
        }
        Err(e) => return Err(e.into()),
        Ok(vs) => {
            b.hypothesis("constraint system is feasible", true);
            b.conclusion("extremal points are pairwise singular", pairwise_singular(&vs));
            for (i, v) in vs.iter().enumerate() {
                b.witness(&format!("vertex_{i}"), fmt_measure(v));
            }
        }
    }
    Ok(b.finish())
}

fn ftap(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let (_, x) = pick_single(model)?;
    let f = model.space.filtration().clone();
    let mut b = ReportBuilder::new("ftap", model_name);
    match second_ftap_report(x, &f, &model.space) {
        Err(CoreError::NoEmm) => {
            b.hypothesis("equivalent martingale measure exists", false);
        }
        Err(e) => return Err(e.into()),
        Ok(report) => {
            b.hypothesis("equivalent martingale measure exists", true);
            b.conclusion(
                "uniqueness and completeness verdicts agree",
                report.ftap_equivalence_holds,
            );
            b.conclusion(
                "extremality characterization holds for every candidate measure",
                report.checks.iter().all(|c| c.characterization_holds),
            );
            b.witness("equivalent_martingale_measure", fmt_measure(&report.emm));
            b.witness("unique", report.unique_emm.to_string());
            b.witness("complete", report.complete.to_string());
        }
    }
    Ok(b.finish())
}

fn immersion(model: &BuiltModel, model_name: &str) -> Result<ScenarioReport, CliError> {
    let f = model.space.filtration().clone();
    let g = enlarged_filtration(model)?;
    let mut b = ReportBuilder::new("immersion", model_name);
    b.hypothesis("the enlarged filtration contains the reference one", true);
    let report = immersion_check(&f, &g, model.space.measure(), &model.space)?;
    b.conclusion("the two characterizations agree", report.equivalence_holds);
    b.witness("all_martingales_survive", report.all_martingales_survive.to_string());
    b.witness("intersection_identity", report.intersection_identity.to_string());
    b.witness(
        "conditional_measurability",
        report.conditional_measurability.to_string(),
    );
    Ok(b.finish())
}

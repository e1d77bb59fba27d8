//! Model documents: parsing, validation, canonical emission.
//!
//! A model file is TOML with a `[space]` section (outcomes, probabilities
//! as `"p/q"` strings, horizon), a `[processes]` section of outcome×time
//! matrices, an optional `[filtration]` section (either a `natural`
//! directive naming processes or an `explicit` partition list), and an
//! optional `[random_times]` section of integer vectors. Rationals stay
//! exact end to end; no floating point appears anywhere.

use prplab_core::enlargement::RandomTime;
use prplab_core::rational::{format_rat, parse_rat, Rat};
use prplab_core::space::{
    is_adapted, natural_filtration, Filtration, FiniteFilteredSpace, Partition, Process,
};
use std::collections::BTreeMap;
use std::fmt;

/// Parse or validation failure; both map to input-error exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// Malformed document: syntax, types, unparsable rationals.
    Parse(String),
    /// Well-formed document violating a named model invariant.
    Validation(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Parse(msg) => write!(f, "parse error: {msg}"),
            ModelError::Validation(msg) => write!(f, "validation error: {msg}"),
        }
    }
}

impl std::error::Error for ModelError {}

/// How the model chooses its filtration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiltrationSpec {
    /// Natural filtration of all processes.
    Default,
    /// Natural filtration of the named processes.
    Natural(Vec<String>),
    /// Explicit partitions per time, blocks of outcome labels.
    Explicit(Vec<Vec<Vec<String>>>),
}

/// The validated document, still in label/string form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDocument {
    pub outcomes: Vec<String>,
    pub probabilities: Vec<Rat>,
    pub horizon: usize,
    pub processes: BTreeMap<String, Vec<Vec<Rat>>>,
    pub filtration: FiltrationSpec,
    pub random_times: BTreeMap<String, Vec<usize>>,
}

/// The document compiled into exact library objects.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub document: ModelDocument,
    pub space: FiniteFilteredSpace,
    pub processes: BTreeMap<String, Process>,
    pub random_times: BTreeMap<String, RandomTime>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '+'))
}

fn want_table<'a>(v: &'a toml::Value, path: &str) -> Result<&'a toml::Table, ModelError> {
    v.as_table().ok_or_else(|| ModelError::Parse(format!("{path}: expected a table")))
}

fn want_array<'a>(v: &'a toml::Value, path: &str) -> Result<&'a [toml::Value], ModelError> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| ModelError::Parse(format!("{path}: expected an array")))
}

fn want_str<'a>(v: &'a toml::Value, path: &str) -> Result<&'a str, ModelError> {
    v.as_str().ok_or_else(|| ModelError::Parse(format!("{path}: expected a string")))
}

fn want_rational(v: &toml::Value, path: &str) -> Result<Rat, ModelError> {
    let s = want_str(v, path)?;
    parse_rat(s)
        .ok_or_else(|| ModelError::Parse(format!("{path}: '{s}' is not a rational \"p/q\"")))
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<ModelDocument, ModelError> {
    let root: toml::Table =
        text.parse().map_err(|e: toml::de::Error| ModelError::Parse(e.to_string()))?;
    for key in root.keys() {
        if !matches!(key.as_str(), "space" | "processes" | "filtration" | "random_times") {
            return Err(ModelError::Parse(format!("unknown section [{key}]")));
        }
    }
    let space = root
        .get("space")
        .ok_or_else(|| ModelError::Parse("missing [space] section".into()))?;
    let space = want_table(space, "space")?;
    for key in space.keys() {
        if !matches!(key.as_str(), "outcomes" | "probabilities" | "horizon") {
            return Err(ModelError::Parse(format!("unknown key space.{key}")));
        }
    }
    let outcomes: Vec<String> = want_array(
        space.get("outcomes").ok_or_else(|| ModelError::Parse("missing space.outcomes".into()))?,
        "space.outcomes",
    )?
    .iter()
    .enumerate()
    .map(|(i, v)| want_str(v, &format!("space.outcomes[{i}]")).map(str::to_owned))
    .collect::<Result<_, _>>()?;
    if outcomes.is_empty() {
        return Err(ModelError::Validation("outcome set is empty".into()));
    }
    for label in &outcomes {
        if !valid_name(label) {
            return Err(ModelError::Validation(format!("invalid outcome label '{label}'")));
        }
    }
    {
        let mut seen = outcomes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != outcomes.len() {
            return Err(ModelError::Validation("duplicate outcome labels".into()));
        }
    }
    let probabilities: Vec<Rat> = want_array(
        space
            .get("probabilities")
            .ok_or_else(|| ModelError::Parse("missing space.probabilities".into()))?,
        "space.probabilities",
    )?
    .iter()
    .enumerate()
    .map(|(i, v)| want_rational(v, &format!("space.probabilities[{i}]")))
    .collect::<Result<_, _>>()?;
    let horizon = space
        .get("horizon")
        .ok_or_else(|| ModelError::Parse("missing space.horizon".into()))?
        .as_integer()
        .filter(|&h| h >= 1)
        .ok_or_else(|| ModelError::Parse("space.horizon: expected an integer >= 1".into()))?
        as usize;

    let mut processes = BTreeMap::new();
    let proc_table = root
        .get("processes")
        .ok_or_else(|| ModelError::Parse("missing [processes] section".into()))?;
    for (name, v) in want_table(proc_table, "processes")? {
        if !valid_name(name) || name.contains('.') {
            return Err(ModelError::Validation(format!("invalid process name '{name}'")));
        }
        let rows = want_array(v, &format!("processes.{name}"))?;
        let mut matrix = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = want_array(row, &format!("processes.{name}[{i}]"))?;
            matrix.push(
                row.iter()
                    .enumerate()
                    .map(|(j, cell)| want_rational(cell, &format!("processes.{name}[{i}][{j}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        processes.insert(name.clone(), matrix);
    }
    if processes.is_empty() {
        return Err(ModelError::Validation("model defines no processes".into()));
    }

    let filtration = match root.get("filtration") {
        None => FiltrationSpec::Default,
        Some(v) => {
            let t = want_table(v, "filtration")?;
            for key in t.keys() {
                if !matches!(key.as_str(), "natural" | "explicit") {
                    return Err(ModelError::Parse(format!("unknown key filtration.{key}")));
                }
            }
            match (t.get("natural"), t.get("explicit")) {
                (Some(_), Some(_)) => {
                    return Err(ModelError::Parse(
                        "filtration: give either 'natural' or 'explicit', not both".into(),
                    ))
                }
                (Some(names), None) => FiltrationSpec::Natural(
                    want_array(names, "filtration.natural")?
                        .iter()
                        .enumerate()
                        .map(|(i, v)| {
                            want_str(v, &format!("filtration.natural[{i}]")).map(str::to_owned)
                        })
                        .collect::<Result<_, _>>()?,
                ),
                (None, Some(levels)) => {
                    let mut parsed = Vec::new();
                    for (t_idx, level) in
                        want_array(levels, "filtration.explicit")?.iter().enumerate()
                    {
                        let blocks =
                            want_array(level, &format!("filtration.explicit[{t_idx}]"))?;
                        let mut level_blocks = Vec::new();
                        for (b, block) in blocks.iter().enumerate() {
                            let path = format!("filtration.explicit[{t_idx}][{b}]");
                            level_blocks.push(
                                want_array(block, &path)?
                                    .iter()
                                    .map(|v| want_str(v, &path).map(str::to_owned))
                                    .collect::<Result<Vec<_>, _>>()?,
                            );
                        }
                        parsed.push(level_blocks);
                    }
                    FiltrationSpec::Explicit(parsed)
                }
                (None, None) => {
                    return Err(ModelError::Parse(
                        "filtration: empty section (drop it or give 'natural'/'explicit')".into(),
                    ))
                }
            }
        }
    };

    let mut random_times = BTreeMap::new();
    if let Some(v) = root.get("random_times") {
        for (name, times) in want_table(v, "random_times")? {
            if !valid_name(name) {
                return Err(ModelError::Validation(format!("invalid time name '{name}'")));
            }
            let arr = want_array(times, &format!("random_times.{name}"))?;
            let values = arr
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    v.as_integer().filter(|&t| t >= 0).ok_or_else(|| {
                        ModelError::Parse(format!(
                            "random_times.{name}[{i}]: expected a nonnegative integer"
                        ))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            random_times.insert(name.clone(), values.into_iter().map(|t| t as usize).collect());
        }
    }

    let doc = ModelDocument { outcomes, probabilities, horizon, processes, filtration, random_times };
    build_model(&doc)?; // surface validation failures at parse time
    Ok(doc)
}

/// Compiles a document into library objects, enforcing every space
/// invariant plus adaptedness of all processes.
pub fn build_model(doc: &ModelDocument) -> Result<BuiltModel, ModelError> {
    let n = doc.outcomes.len();
    let mut processes = BTreeMap::new();
    for (name, matrix) in &doc.processes {
        if matrix.len() != n {
            return Err(ModelError::Validation(format!(
                "process {name} has {} rows but the space has {n} outcomes",
                matrix.len()
            )));
        }
        if matrix.iter().any(|r| r.len() != doc.horizon + 1) {
            return Err(ModelError::Validation(format!(
                "process {name} must have horizon+1 = {} columns per row",
                doc.horizon + 1
            )));
        }
        processes.insert(
            name.clone(),
            Process::new(matrix.clone())
                .map_err(|e| ModelError::Validation(format!("process {name}: {e}")))?,
        );
    }

    // A provisional space with the discrete filtration lets the natural
    // filtrations be computed before the real one is chosen.
    let provisional = FiniteFilteredSpace::new(
        doc.outcomes.clone(),
        doc.probabilities.clone(),
        vec![Partition::discrete(n); doc.horizon + 1],
        doc.horizon,
    )
    .map_err(|e| ModelError::Validation(e.to_string()))?;

    let filtration = resolve_filtration_spec(&doc.filtration, doc, &processes, &provisional)?;
    let space = FiniteFilteredSpace::new(
        doc.outcomes.clone(),
        doc.probabilities.clone(),
        filtration.partitions().to_vec(),
        doc.horizon,
    )
    .map_err(|e| ModelError::Validation(e.to_string()))?;

    for (name, p) in &processes {
        match is_adapted(p, space.filtration()) {
            Ok(true) => {}
            Ok(false) => {
                return Err(ModelError::Validation(format!(
                    "process {name} is not adapted to the model filtration"
                )))
            }
            Err(e) => return Err(ModelError::Validation(format!("process {name}: {e}"))),
        }
    }

    let mut random_times = BTreeMap::new();
    for (name, values) in &doc.random_times {
        if values.len() != n {
            return Err(ModelError::Validation(format!(
                "random time {name} has {} entries but the space has {n} outcomes",
                values.len()
            )));
        }
        random_times.insert(
            name.clone(),
            RandomTime::new(values.clone(), doc.horizon)
                .map_err(|e| ModelError::Validation(format!("random time {name}: {e}")))?,
        );
    }

    Ok(BuiltModel { document: doc.clone(), space, processes, random_times })
}

fn resolve_filtration_spec(
    spec: &FiltrationSpec,
    doc: &ModelDocument,
    processes: &BTreeMap<String, Process>,
    provisional: &FiniteFilteredSpace,
) -> Result<Filtration, ModelError> {
    match spec {
        FiltrationSpec::Default => {
            let all: Vec<&Process> = processes.values().collect();
            natural_filtration(&all, provisional).map_err(|e| ModelError::Validation(e.to_string()))
        }
        FiltrationSpec::Natural(names) => {
            let mut chosen = Vec::with_capacity(names.len());
            for name in names {
                chosen.push(processes.get(name).ok_or_else(|| {
                    ModelError::Validation(format!(
                        "filtration directive names unknown process '{name}'"
                    ))
                })?);
            }
            natural_filtration(&chosen, provisional)
                .map_err(|e| ModelError::Validation(e.to_string()))
        }
        FiltrationSpec::Explicit(levels) => {
            if levels.len() != doc.horizon + 1 {
                return Err(ModelError::Validation(format!(
                    "explicit filtration must list horizon+1 = {} partitions, got {}",
                    doc.horizon + 1,
                    levels.len()
                )));
            }
            let index: BTreeMap<&str, usize> = doc
                .outcomes
                .iter()
                .enumerate()
                .map(|(i, label)| (label.as_str(), i))
                .collect();
            let mut partitions = Vec::with_capacity(levels.len());
            for (t, level) in levels.iter().enumerate() {
                let mut blocks = Vec::with_capacity(level.len());
                for block in level {
                    let mut indices = Vec::with_capacity(block.len());
                    for label in block {
                        indices.push(*index.get(label.as_str()).ok_or_else(|| {
                            ModelError::Validation(format!(
                                "filtration.explicit[{t}] names unknown outcome '{label}'"
                            ))
                        })?);
                    }
                    blocks.push(indices);
                }
                partitions.push(
                    Partition::new(doc.outcomes.len(), blocks).map_err(|e| {
                        ModelError::Validation(format!("filtration.explicit[{t}]: {e}"))
                    })?,
                );
            }
            Filtration::new(partitions).map_err(|e| ModelError::Validation(e.to_string()))
        }
    }
}

/// Canonical emission: fixed section order, sorted names, one array per
/// line. Emitting and re-parsing is byte-stable.
pub fn emit_model(doc: &ModelDocument) -> String {
    let mut out = String::new();
    out.push_str("[space]\n");
    out.push_str(&format!("outcomes = [{}]\n", quote_list(&doc.outcomes)));
    let probs: Vec<String> = doc.probabilities.iter().map(format_rat).collect();
    out.push_str(&format!("probabilities = [{}]\n", quote_list(&probs)));
    out.push_str(&format!("horizon = {}\n", doc.horizon));
    match &doc.filtration {
        FiltrationSpec::Default => {}
        FiltrationSpec::Natural(names) => {
            out.push_str("\n[filtration]\n");
            out.push_str(&format!("natural = [{}]\n", quote_list(names)));
        }
        FiltrationSpec::Explicit(levels) => {
            out.push_str("\n[filtration]\n");
            let levels: Vec<String> = levels
                .iter()
                .map(|level| {
                    let blocks: Vec<String> =
                        level.iter().map(|b| format!("[{}]", quote_list(b))).collect();
                    format!("[{}]", blocks.join(", "))
                })
                .collect();
            out.push_str(&format!("explicit = [{}]\n", levels.join(", ")));
        }
    }
    out.push_str("\n[processes]\n");
    for (name, matrix) in &doc.processes {
        let rows: Vec<String> = matrix
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(format_rat).collect();
                format!("[{}]", quote_list(&cells))
            })
            .collect();
        out.push_str(&format!("{name} = [{}]\n", rows.join(", ")));
    }
    if !doc.random_times.is_empty() {
        out.push_str("\n[random_times]\n");
        for (name, values) in &doc.random_times {
            let cells: Vec<String> = values.iter().map(usize::to_string).collect();
            out.push_str(&format!("{name} = [{}]\n", cells.join(", ")));
        }
    }
    out
}

fn quote_list<S: AsRef<str>>(items: &[S]) -> String {
    items
        .iter()
        .map(|s| format!("\"{}\"", s.as_ref()))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Bundled example models by name (case-insensitive).
pub fn bundled_model(name: &str) -> Option<&'static str> {
    match name.to_ascii_uppercase().as_str() {
        "BIN" => Some(include_str!("../models/bin.toml")),
        "BIN-DRIFT" => Some(include_str!("../models/bin-drift.toml")),
        "TRI" => Some(include_str!("../models/tri.toml")),
        "COIN2" => Some(include_str!("../models/coin2.toml")),
        "TAU" => Some(include_str!("../models/tau.toml")),
        "PROD2" => Some(include_str!("../models/prod2.toml")),
        "PROD2X2" => Some(include_str!("../models/prod2x2.toml")),
        _ => None,
    }
}

/// All bundled model names in canonical order.
pub const BUNDLED_MODELS: &[&str] =
    &["BIN", "BIN-DRIFT", "TRI", "COIN2", "TAU", "PROD2", "PROD2X2"];

/// Loads a model from a filesystem path, falling back to a bundled model
/// name.
pub fn load_model(arg: &str) -> Result<(String, BuiltModel), ModelError> {
    let (label, text) = if std::path::Path::new(arg).exists() {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| ModelError::Parse(format!("cannot read '{arg}': {e}")))?;
        (arg.to_string(), text)
    } else if let Some(text) = bundled_model(arg) {
        (arg.to_ascii_uppercase(), text.to_string())
    } else {
        return Err(ModelError::Parse(format!(
            "'{arg}' is neither a readable file nor a bundled model ({})",
            BUNDLED_MODELS.join(", ")
        )));
    };
    let doc = parse_model(&text)?;
    let built = build_model(&doc)?;
    Ok((label, built))
}

#[cfg(test)]
mod tests {
    use super::*;
    use prplab_core::rational::rat;

    const BIN: &str = r#"
[space]
outcomes = ["u", "d"]
probabilities = ["1/2", "1/2"]
horizon = 1

[processes]
X = [["1", "2"], ["1", "1/2"]]
"#;

    #[test]
    fn parses_a_minimal_model() {
        let doc = parse_model(BIN).unwrap();
        assert_eq!(doc.outcomes, vec!["u", "d"]);
        assert_eq!(doc.probabilities, vec![rat(1, 2), rat(1, 2)]);
        let built = build_model(&doc).unwrap();
        assert_eq!(built.space.horizon(), 1);
        assert_eq!(built.space.filtration().at(1).block_count(), 2);
    }

    #[test]
    fn zero_denominator_is_a_parse_error() {
        let text = BIN.replace("\"1/2\", \"1/2\"", "\"1/0\", \"1/2\"");
        match parse_model(&text) {
            Err(ModelError::Parse(msg)) => assert!(msg.contains("1/0")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_row_count_is_a_validation_error() {
        let text = BIN.replace("[[\"1\", \"2\"], [\"1\", \"1/2\"]]", "[[\"1\", \"2\"]]");
        match parse_model(&text) {
            Err(ModelError::Validation(msg)) => assert!(msg.contains("rows")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn bad_probability_sum_is_a_validation_error() {
        let text = BIN.replace("\"1/2\", \"1/2\"", "\"1/2\", \"1/3\"");
        assert!(matches!(parse_model(&text), Err(ModelError::Validation(_))));
    }

    #[test]
    fn non_adapted_process_is_rejected() {
        let text = r#"
[space]
outcomes = ["u", "d"]
probabilities = ["1/2", "1/2"]
horizon = 1

[filtration]
explicit = [[["u", "d"]], [["u", "d"]]]

[processes]
X = [["1", "2"], ["1", "1/2"]]
"#;
        match parse_model(text) {
            Err(ModelError::Validation(msg)) => assert!(msg.contains("not adapted")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn emission_is_idempotent() {
        let doc = parse_model(BIN).unwrap();
        let emitted = emit_model(&doc);
        let reparsed = parse_model(&emitted).unwrap();
        assert_eq!(doc, reparsed);
        assert_eq!(emitted, emit_model(&reparsed));
    }

    #[test]
    fn all_bundled_models_parse_and_round_trip() {
        for name in BUNDLED_MODELS {
            let text = bundled_model(name).unwrap();
            let doc = parse_model(text)
                .unwrap_or_else(|e| panic!("bundled model {name} failed to parse: {e}"));
            let emitted = emit_model(&doc);
            let reparsed = parse_model(&emitted).unwrap();
            assert_eq!(doc, reparsed, "round trip for {name}");
            assert_eq!(emitted, emit_model(&reparsed), "byte stability for {name}");
        }
    }

    #[test]
    fn unknown_sections_are_rejected() {
        let text = format!("{BIN}\n[extra]\nx = 1\n");
        assert!(matches!(parse_model(&text), Err(ModelError::Parse(_))));
    }
}

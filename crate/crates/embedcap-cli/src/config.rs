//! Flat key/value run configuration: one section per alphabet, distribution,
//! and table, probability rows listed row-major under explicit symbol keys.
//! Hand-editable and diff-friendly; `write_config` round-trips through
//! `parse_config` exactly.

use embedcap::prob::{
    ConditionalPMF, DistortionTable, EmbeddingProblem, FiniteAlphabet, JointPMF,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn validation(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        message: message.to_string(),
    }
}

/// Search defaults carried by a config file; flags override these.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSection {
    pub t1_size: Option<usize>,
    pub t2_size: Option<usize>,
    pub step: f64,
    pub budget: u64,
    pub refine_steps: usize,
    pub refine_directions: usize,
    pub seed: u64,
    /// `general`, `independent`, or `auto` (pick by covertext dependence).
    pub formula: String,
    /// `auto`, `exhaustive`, `sample`, or `sample-then-refine`.
    pub mode: String,
    pub rate_margin: f64,
}

impl Default for SearchSection {
    fn default() -> Self {
        Self {
            t1_size: None,
            t2_size: None,
            step: 0.1,
            budget: 20_000,
            refine_steps: 100,
            refine_directions: 64,
            seed: 0,
            formula: "auto".into(),
            mode: "auto".into(),
            rate_margin: 0.0,
        }
    }
}

/// Simulation defaults carried by a config file; flags override these.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSection {
    pub n: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub nu: f64,
    pub r1: f64,
    pub r2: f64,
    pub trials: u64,
    pub estimator_samples: usize,
    pub codebook_cap: u64,
    pub max_tries: usize,
    pub rate_margin: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            n: 12,
            epsilon: 0.3,
            mu: 0.1,
            nu: 0.1,
            r1: 0.05,
            r2: 0.05,
            trials: 200,
            estimator_samples: 200,
            codebook_cap: 1 << 20,
            max_tries: 10_000,
            rate_margin: 0.0,
        }
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: EmbeddingProblem,
    pub search: SearchSection,
    pub simulation: SimSection,
    /// Optional explicit per-user policies `P(Ti, Xi | Ui)` for `simulate`.
    pub policy1: Option<ConditionalPMF>,
    pub policy2: Option<ConditionalPMF>,
    pub out_prefix: Option<String>,
}

pub fn load_config(path: &str) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_config(&text)
}

struct RawSection {
    name: String,
    line: usize,
    keys: Vec<(usize, String, String)>,
}

fn split_sections(text: &str) -> Result<Vec<RawSection>, ConfigError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Parse {
                line,
                message: "unterminated section header".into(),
            })?;
            sections.push(RawSection {
                name: name.trim().to_string(),
                line,
                keys: Vec::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: "expected `key = value`".into(),
        })?;
        let section = sections.last_mut().ok_or_else(|| ConfigError::Parse {
            line,
            message: "entry before any section header".into(),
        })?;
        section
            .keys
            .push((line, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(sections)
}

fn parse_numbers(line: usize, value: &str) -> Result<Vec<f64>, ConfigError> {
    value
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| ConfigError::Parse {
                line,
                message: format!("`{tok}` is not a number"),
            })
        })
        .collect()
}

/// Ordered row table keyed by symbol tuples of the given alphabets.
fn collect_rows(
    section: &RawSection,
    given: &[&FiniteAlphabet],
    cols: usize,
    field: &str,
) -> Result<Vec<f64>, ConfigError> {
    let n_rows: usize = given.iter().map(|a| a.len()).product();
    let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (line, key, value) in &section.keys {
        if key == "cols" || key == "t_size" {
            continue;
        }
        let Some(symbols) = key.strip_prefix("row") else {
            return Err(ConfigError::Parse {
                line: *line,
                message: format!("unexpected key `{key}` in [{}]", section.name),
            });
        };
        let toks: Vec<&str> = symbols.split_whitespace().collect();
        if toks.len() != given.len() {
            return Err(validation(
                field,
                format!("row key `{key}` must name {} symbol(s)", given.len()),
            ));
        }
        let mut index = 0usize;
        for (alphabet, tok) in given.iter().zip(&toks) {
            let pos = alphabet.index_of(tok).ok_or_else(|| {
                validation(field, format!("unknown symbol `{tok}` in row key"))
            })?;
            index = index * alphabet.len() + pos;
        }
        let values = parse_numbers(*line, value)?;
        if values.len() != cols {
            return Err(validation(
                field,
                format!("row `{key}` has {} entries, expected {cols}", values.len()),
            ));
        }
        if rows.insert(index, values).is_some() {
            return Err(validation(field, format!("row `{key}` appears twice")));
        }
    }
    if rows.len() != n_rows {
        return Err(validation(
            field,
            format!("{} rows given, expected {n_rows}", rows.len()),
        ));
    }
    Ok(rows.into_values().flatten().collect())
}

fn lookup<'a>(section: &'a RawSection, key: &str) -> Option<&'a str> {
    section
        .keys
        .iter()
        .find(|(_, k, _)| k == key)
        .map(|(_, _, v)| v.as_str())
}

fn parse_field<T: std::str::FromStr>(
    section: &RawSection,
    key: &str,
    field: &str,
) -> Result<Option<T>, ConfigError> {
    match lookup(section, key) {
        None => Ok(None),
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| validation(field, format!("`{v}` is not valid"))),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let sections = split_sections(text)?;
    let mut alphabets: BTreeMap<String, FiniteAlphabet> = BTreeMap::new();
    for s in sections.iter().filter(|s| s.name.starts_with("alphabet")) {
        let name = s.name["alphabet".len()..].trim().to_string();
        if name.is_empty() {
            return Err(ConfigError::Parse {
                line: s.line,
                message: "alphabet section needs a name".into(),
            });
        }
        let symbols = lookup(s, "symbols").ok_or_else(|| {
            validation(&format!("alphabet {name}"), "missing `symbols` entry")
        })?;
        let alphabet = FiniteAlphabet::new(
            name.clone(),
            symbols.split_whitespace().map(str::to_string).collect(),
        )
        .map_err(|e| validation(&format!("alphabet {name}"), e))?;
        alphabets.insert(name, alphabet);
    }
    let need = |name: &str| -> Result<&FiniteAlphabet, ConfigError> {
        alphabets
            .get(name)
            .ok_or_else(|| validation(name, "alphabet not defined"))
    };
    let u1 = need("u1")?.clone();
    let u2 = need("u2")?.clone();
    let x1 = need("x1")?.clone();
    let x2 = need("x2")?.clone();
    let y = need("y")?.clone();

    let find = |name: &str| sections.iter().find(|s| s.name == name);

    let covertext_section =
        find("covertext").ok_or_else(|| validation("covertext", "section missing"))?;
    let q_rows = collect_rows(covertext_section, &[&u1], u2.len(), "covertext")?;
    let covertext = JointPMF::new(vec![u1.clone(), u2.clone()], q_rows)
        .map_err(|e| validation("covertext", e))?;

    let attack_section = find("attack").ok_or_else(|| validation("attack", "section missing"))?;
    let w_rows = collect_rows(attack_section, &[&x1, &x2], y.len(), "attack")?;
    let attack = ConditionalPMF::from_rows(vec![x1.clone(), x2.clone()], vec![y.clone()], w_rows)
        .map_err(|e| validation("attack", e))?;

    let distortion = |user: usize, u: &FiniteAlphabet, x: &FiniteAlphabet| {
        let field = format!("distortion {user}");
        let s = find(&field).ok_or_else(|| validation(&field, "section missing"))?;
        let rows = collect_rows(s, &[u], x.len(), &field)?;
        DistortionTable::new(u.len(), x.len(), rows).map_err(|e| validation(&field, e))
    };
    let d1 = distortion(1, &u1, &x1)?;
    let d2 = distortion(2, &u2, &x2)?;

    let levels = find("levels").ok_or_else(|| validation("levels", "section missing"))?;
    let level1: f64 = parse_field(levels, "d1", "levels d1")?
        .ok_or_else(|| validation("levels d1", "missing"))?;
    let level2: f64 = parse_field(levels, "d2", "levels d2")?
        .ok_or_else(|| validation("levels d2", "missing"))?;

    let problem = EmbeddingProblem::new(covertext, attack, d1, d2, level1, level2)
        .map_err(|e| validation("problem", e))?;

    let mut search = SearchSection::default();
    if let Some(s) = find("search") {
        search.t1_size = parse_field(s, "t1_size", "search t1_size")?;
        search.t2_size = parse_field(s, "t2_size", "search t2_size")?;
        if let Some(v) = parse_field(s, "step", "search step")? {
            search.step = v;
        }
        if let Some(v) = parse_field(s, "budget", "search budget")? {
            search.budget = v;
        }
        if let Some(v) = parse_field(s, "refine_steps", "search refine_steps")? {
            search.refine_steps = v;
        }
        if let Some(v) = parse_field(s, "refine_directions", "search refine_directions")? {
            search.refine_directions = v;
        }
        if let Some(v) = parse_field(s, "seed", "search seed")? {
            search.seed = v;
        }
        if let Some(v) = lookup(s, "formula") {
            search.formula = v.to_string();
        }
        if let Some(v) = lookup(s, "mode") {
            search.mode = v.to_string();
        }
        if let Some(v) = parse_field(s, "rate_margin", "search rate_margin")? {
            search.rate_margin = v;
        }
    }

    let mut simulation = SimSection::default();
    if let Some(s) = find("simulation") {
        if let Some(v) = parse_field(s, "n", "simulation n")? {
            simulation.n = v;
        }
        if let Some(v) = parse_field(s, "epsilon", "simulation epsilon")? {
            simulation.epsilon = v;
        }
        if let Some(v) = parse_field(s, "mu", "simulation mu")? {
            simulation.mu = v;
        }
        if let Some(v) = parse_field(s, "nu", "simulation nu")? {
            simulation.nu = v;
        }
        if let Some(v) = parse_field(s, "r1", "simulation r1")? {
            simulation.r1 = v;
        }
        if let Some(v) = parse_field(s, "r2", "simulation r2")? {
            simulation.r2 = v;
        }
        if let Some(v) = parse_field(s, "trials", "simulation trials")? {
            simulation.trials = v;
        }
        if let Some(v) = parse_field(s, "estimator_samples", "simulation estimator_samples")? {
            simulation.estimator_samples = v;
        }
        if let Some(v) = parse_field(s, "codebook_cap", "simulation codebook_cap")? {
            simulation.codebook_cap = v;
        }
        if let Some(v) = parse_field(s, "max_tries", "simulation max_tries")? {
            simulation.max_tries = v;
        }
        if let Some(v) = parse_field(s, "rate_margin", "simulation rate_margin")? {
            simulation.rate_margin = v;
        }
    }

    let policy = |user: usize, u: &FiniteAlphabet, x: &FiniteAlphabet| {
        let field = format!("policy {user}");
        let Some(s) = find(&field) else {
            return Ok(None);
        };
        let t_size: usize = parse_field(s, "t_size", &field)?
            .ok_or_else(|| validation(&field, "missing `t_size`"))?;
        let t = FiniteAlphabet::indexed(format!("t{user}"), t_size)
            .map_err(|e| validation(&field, e))?;
        let rows = collect_rows(s, &[u], t_size * x.len(), &field)?;
        ConditionalPMF::from_rows(vec![u.clone()], vec![t, x.clone()], rows)
            .map(Some)
            .map_err(|e| validation(&field, e))
    };
    let policy1 = policy(1, &u1, &x1)?;
    let policy2 = policy(2, &u2, &x2)?;

    let out_prefix = find("output").and_then(|s| lookup(s, "prefix").map(str::to_string));

    Ok(RunConfig {
        problem,
        search,
        simulation,
        policy1,
        policy2,
        out_prefix,
    })
}

fn fmt_num(v: f64) -> String {
    // shortest representation that round-trips
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') {
        s.push_str(".0");
    }
    s
}

fn write_table(
    out: &mut String,
    title: &str,
    given: &[&FiniteAlphabet],
    cols_note: &str,
    cols: usize,
    values_of: impl Fn(usize) -> Vec<f64>,
) {
    let _ = writeln!(out, "[{title}]");
    let _ = writeln!(out, "cols = {cols_note}");
    let n_rows: usize = given.iter().map(|a| a.len()).product();
    for r in 0..n_rows {
        let mut key = String::from("row");
        let mut rest = r;
        let mut parts = vec![String::new(); given.len()];
        for (pos, alphabet) in given.iter().enumerate().rev() {
            parts[pos] = alphabet.symbols()[rest % alphabet.len()].clone();
            rest /= alphabet.len();
        }
        for p in parts {
            key.push(' ');
            key.push_str(&p);
        }
        let row = values_of(r);
        debug_assert_eq!(row.len(), cols);
        let vals: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        let _ = writeln!(out, "{key} = {}", vals.join(" "));
    }
    out.push('\n');
}

/// Serialize a validated config; `parse_config` reproduces an equal value.
pub fn write_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let p = &cfg.problem;
    for a in [p.u1(), p.u2(), p.x1(), p.x2(), p.y()] {
        let _ = writeln!(out, "[alphabet {}]", a.name());
        let _ = writeln!(out, "symbols = {}\n", a.symbols().join(" "));
    }
    let q = p.covertext();
    write_table(
        &mut out,
        "covertext",
        &[p.u1()],
        p.u2().name(),
        p.u2().len(),
        |r| q.weights()[r * p.u2().len()..(r + 1) * p.u2().len()].to_vec(),
    );
    write_table(
        &mut out,
        "attack",
        &[p.x1(), p.x2()],
        p.y().name(),
        p.y().len(),
        |r| p.attack().row(r).expect("channel rows defined").to_vec(),
    );
    for user in [1usize, 2] {
        let (u, x) = if user == 1 {
            (p.u1(), p.x1())
        } else {
            (p.u2(), p.x2())
        };
        let table = p.distortion(user);
        write_table(
            &mut out,
            &format!("distortion {user}"),
            &[u],
            x.name(),
            x.len(),
            |r| (0..x.len()).map(|c| table.get(r, c)).collect(),
        );
    }
    let _ = writeln!(out, "[levels]");
    let _ = writeln!(out, "d1 = {}", fmt_num(p.level(1)));
    let _ = writeln!(out, "d2 = {}\n", fmt_num(p.level(2)));

    let s = &cfg.search;
    let _ = writeln!(out, "[search]");
    if let Some(t) = s.t1_size {
        let _ = writeln!(out, "t1_size = {t}");
    }
    if let Some(t) = s.t2_size {
        let _ = writeln!(out, "t2_size = {t}");
    }
    let _ = writeln!(out, "step = {}", fmt_num(s.step));
    let _ = writeln!(out, "budget = {}", s.budget);
    let _ = writeln!(out, "refine_steps = {}", s.refine_steps);
    let _ = writeln!(out, "refine_directions = {}", s.refine_directions);
    let _ = writeln!(out, "seed = {}", s.seed);
    let _ = writeln!(out, "formula = {}", s.formula);
    let _ = writeln!(out, "mode = {}", s.mode);
    let _ = writeln!(out, "rate_margin = {}\n", fmt_num(s.rate_margin));

    let m = &cfg.simulation;
    let _ = writeln!(out, "[simulation]");
    let _ = writeln!(out, "n = {}", m.n);
    let _ = writeln!(out, "epsilon = {}", fmt_num(m.epsilon));
    let _ = writeln!(out, "mu = {}", fmt_num(m.mu));
    let _ = writeln!(out, "nu = {}", fmt_num(m.nu));
    let _ = writeln!(out, "r1 = {}", fmt_num(m.r1));
    let _ = writeln!(out, "r2 = {}", fmt_num(m.r2));
    let _ = writeln!(out, "trials = {}", m.trials);
    let _ = writeln!(out, "estimator_samples = {}", m.estimator_samples);
    let _ = writeln!(out, "codebook_cap = {}", m.codebook_cap);
    let _ = writeln!(out, "max_tries = {}", m.max_tries);
    let _ = writeln!(out, "rate_margin = {}\n", fmt_num(m.rate_margin));

    for (user, policy) in [(1usize, &cfg.policy1), (2, &cfg.policy2)] {
        let Some(cond) = policy else { continue };
        let u = if user == 1 { p.u1() } else { p.u2() };
        let t_size = cond.target_axes()[0].len();
        let _ = writeln!(out, "[policy {user}]");
        let _ = writeln!(out, "t_size = {t_size}");
        for r in 0..u.len() {
            let row = cond.row(r).expect("policy rows defined");
            let vals: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            let _ = writeln!(out, "row {} = {}", u.symbols()[r], vals.join(" "));
        }
        out.push('\n');
    }

    if let Some(prefix) = &cfg.out_prefix {
        let _ = writeln!(out, "[output]");
        let _ = writeln!(out, "prefix = {prefix}\n");
    }
    out
}

/// The built-in configuration: the binary benchmark problem with the default
/// search and simulation sections.
pub fn builtin_example() -> RunConfig {
    RunConfig {
        problem: embedcap::presets::binary_example(),
        search: SearchSection::default(),
        simulation: SimSection::default(),
        policy1: None,
        policy2: None,
        out_prefix: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_example_matches_benchmark_numbers() {
        let cfg = builtin_example();
        let q = cfg.problem.covertext();
        assert!((q.marginal(&[0]).unwrap().get(&[0]) - 0.05).abs() < 1e-12);
        assert!((q.marginal(&[1]).unwrap().get(&[0]) - 0.10).abs() < 1e-12);
        assert_eq!(cfg.problem.level(1), 0.45);
        assert_eq!(cfg.problem.level(2), 0.4);
        assert_eq!(cfg.search.step, 0.1);
        // channel: P(y = x1 xor x2) = 0.98
        let w = cfg.problem.attack();
        assert!((w.get(0, 0) - 0.98).abs() < 1e-12);
        assert!((w.get(1, 1) - 0.98).abs() < 1e-12);
    }

    #[test]
    fn round_trip_reproduces_config() {
        let mut cfg = builtin_example();
        cfg.search.t1_size = Some(3);
        cfg.out_prefix = Some("demo".into());
        cfg.policy1 = Some(
            ConditionalPMF::from_rows(
                vec![cfg.problem.u1().clone()],
                vec![
                    FiniteAlphabet::indexed("t1", 2).unwrap(),
                    cfg.problem.x1().clone(),
                ],
                vec![0.25; 8],
            )
            .unwrap(),
        );
        let text = write_config(&cfg);
        let back = parse_config(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn missing_level_is_a_validation_error() {
        let mut cfg = builtin_example();
        cfg.out_prefix = None;
        let text = write_config(&cfg).replace("d2 = 0.4\n", "");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Validation { ref field, .. } if field == "levels d2"));
    }

    #[test]
    fn bad_row_sum_is_a_validation_error() {
        let cfg = builtin_example();
        // an attack row summing to 0.9
        let text = write_config(&cfg).replace("row 0 0 = 0.98 0.02", "row 0 0 = 0.88 0.02");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Validation { ref field, .. } if field == "attack"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_config("symbols = 0 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        let err = parse_config("[alphabet u1]\nsymbols 0 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));
    }
}

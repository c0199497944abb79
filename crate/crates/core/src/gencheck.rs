//! Truncated topological-generation checks.
//!
//! Subgroups `H₁, …, H_m` topologically generate `G` exactly when the
//! restriction functors are jointly full, i.e. when
//! `⋂ᵢ Fix_{Hᵢ}(V^w) = Fix_G(V^w)` for every word `w` (Hom spaces between
//! words reduce to fixed vectors of `w̄₁w₂` by rigidity, so single words
//! suffice). Only finitely many words can be checked: a pass certifies the
//! statement up to the word-length cap and nothing more. A failure on any
//! word is a genuine counterexample.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exact_linalg::{dim_intersection, dim_span, intersect, SubspaceBasis};
use crate::fixed_spaces::{fixed_space, FixedSpaceError, GroupFamily, GroupSpec};
use crate::limits::Limits;
use crate::words::{ColoredWord, Dimension, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenCheckError {
    #[error("a generation task needs at least one subgroup")]
    NoSubgroups,
    #[error("{spec} does not use the task dimension N = {n}")]
    DimensionMismatch { spec: GroupSpec, n: Dimension },
    #[error("subgroup {0} is listed twice")]
    DuplicateSubgroup(GroupFamily),
    #[error("max length {max_len} exceeds the word length cap {cap}")]
    MaxLenExceedsCap { max_len: usize, cap: usize },
    #[error("target {0} has a self-dual fundamental representation; use uncolored words")]
    ColoredSelfDualTarget(GroupFamily),
    #[error("the lower-rank instance needs N >= 3, got N = {0}")]
    LowerRankNeedsRank3(u32),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Spec(#[from] FixedSpaceError),
    #[error(
        "word {word}: intersection dimension {intersection} is below target dimension {target}"
    )]
    Unsound {
        word: ColoredWord,
        intersection: usize,
        target: usize,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WordFilter {
    AllColorings,
    UncoloredOnly,
}

impl WordFilter {
    /// Every word up to `max_len`, by length and then lexicographically
    /// (`u` before `U`).
    pub fn words(self, max_len: usize) -> Vec<ColoredWord> {
        (0..=max_len)
            .flat_map(|len| match self {
                WordFilter::AllColorings => ColoredWord::all_of_length(len),
                WordFilter::UncoloredOnly => vec![ColoredWord::uncolored(len)],
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerationTask {
    pub target: GroupSpec,
    pub subgroups: Vec<GroupSpec>,
    #[serde(rename = "N")]
    pub n: Dimension,
    pub max_len: usize,
    pub word_filter: WordFilter,
}

impl GenerationTask {
    /// A task whose target and subgroups all live at dimension `n`.
    pub fn new(
        target: GroupFamily,
        subgroups: &[GroupFamily],
        n: Dimension,
        max_len: usize,
        word_filter: WordFilter,
    ) -> Result<Self, GenCheckError> {
        Ok(GenerationTask {
            target: GroupSpec::new(target, n)?,
            subgroups: subgroups
                .iter()
                .map(|&f| GroupSpec::new(f, n))
                .collect::<Result<_, _>>()?,
            n,
            max_len,
            word_filter,
        })
    }

    pub fn validate(&self, limits: &Limits) -> Result<(), GenCheckError> {
        if self.subgroups.is_empty() {
            return Err(GenCheckError::NoSubgroups);
        }
        for spec in self.subgroups.iter().chain([&self.target]) {
            if spec.n != self.n {
                return Err(GenCheckError::DimensionMismatch {
                    spec: *spec,
                    n: self.n,
                });
            }
            GroupSpec::new(spec.family, spec.n)?;
        }
        for (i, a) in self.subgroups.iter().enumerate() {
            if self.subgroups[..i].iter().any(|b| b.family == a.family) {
                return Err(GenCheckError::DuplicateSubgroup(a.family));
            }
        }
        if self.max_len > limits.max_word_len {
            return Err(GenCheckError::MaxLenExceedsCap {
                max_len: self.max_len,
                cap: limits.max_word_len,
            });
        }
        if self.target.family.is_self_dual() && self.word_filter != WordFilter::UncoloredOnly {
            return Err(GenCheckError::ColoredSelfDualTarget(self.target.family));
        }
        Ok(())
    }

    pub fn statement(&self) -> String {
        let subs: Vec<&str> = self.subgroups.iter().map(|s| s.family.name()).collect();
        format!(
            "{} = <{}> at N = {}",
            self.target.family,
            subs.join(", "),
            self.n
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overall {
    Pass,
    Fail,
    Incomplete,
}

impl fmt::Display for Overall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Overall::Pass => "pass",
            Overall::Fail => "fail",
            Overall::Incomplete => "incomplete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordRecord {
    pub word: ColoredWord,
    /// Fixed-space dimension per subgroup, keyed by family name.
    pub dims: BTreeMap<String, usize>,
    pub intersection: Option<usize>,
    pub target: Option<usize>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CheckOptions {
    /// Worker threads; 0 uses one per core.
    #[serde(skip)]
    pub workers: usize,
    pub limits: Limits,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub task: GenerationTask,
    pub statement: String,
    pub limits: Limits,
    pub words: Vec<WordRecord>,
    pub overall: Overall,
    /// Word length up to which the statement is certified, when it passed.
    pub certified_level: Option<usize>,
    pub claim: String,
    pub counterexample: Option<ColoredWord>,
    pub skipped: Vec<ColoredWord>,
    pub config_hash: String,
    /// Hash of this report with `report_hash` blanked and `elapsed_ms` zeroed.
    pub report_hash: String,
    pub elapsed_ms: u64,
}

impl GenerationReport {
    pub fn record(&self, word: &ColoredWord) -> Option<&WordRecord> {
        self.words.iter().find(|r| &r.word == word)
    }

    pub fn canonical_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.report_hash = String::new();
        canonical.elapsed_ms = 0;
        sha256_json(&canonical)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn sha256_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable");
    hex::encode(Sha256::digest(bytes))
}

/// Intersection dimension of all the given spaces.
fn intersection_dim(spaces: &[SubspaceBasis]) -> Result<usize, GenCheckError> {
    let dim = match spaces {
        [] => unreachable!("validated: at least one subgroup"),
        [only] => dim_span(only),
        [a, b] => dim_intersection(a, b).map_err(FixedSpaceError::from)?,
        [first, rest @ ..] => {
            let mut acc = first.clone();
            for s in &rest[..rest.len() - 1] {
                acc = intersect(&acc, s).map_err(FixedSpaceError::from)?;
            }
            dim_intersection(&acc, &rest[rest.len() - 1]).map_err(FixedSpaceError::from)?
        }
    };
    Ok(dim)
}

struct WordDims {
    dims: BTreeMap<String, usize>,
    intersection: usize,
    target: usize,
}

fn word_dims(
    task: &GenerationTask,
    w: &ColoredWord,
    limits: &Limits,
) -> Result<WordDims, GenCheckError> {
    let spaces = task
        .subgroups
        .iter()
        .map(|g| fixed_space(g, w, limits))
        .collect::<Result<Vec<_>, _>>()?;
    let dims = task
        .subgroups
        .iter()
        .zip(&spaces)
        .map(|(g, s)| (g.family.name().to_string(), dim_span(s)))
        .collect();
    let intersection = intersection_dim(&spaces)?;
    let target = dim_span(&fixed_space(&task.target, w, limits)?);
    if intersection < target {
        return Err(GenCheckError::Unsound {
            word: w.clone(),
            intersection,
            target,
        });
    }
    Ok(WordDims {
        dims,
        intersection,
        target,
    })
}

fn check_word(
    task: &GenerationTask,
    w: &ColoredWord,
    limits: &Limits,
) -> Result<WordRecord, GenCheckError> {
    match word_dims(task, w, limits) {
        Ok(d) => Ok(WordRecord {
            word: w.clone(),
            verdict: if d.intersection == d.target {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            dims: d.dims,
            intersection: Some(d.intersection),
            target: Some(d.target),
            reason: None,
        }),
        // Size guards skip the word; anything else is a real error.
        Err(GenCheckError::Spec(e @ FixedSpaceError::Realize(_)))
        | Err(GenCheckError::Spec(e @ FixedSpaceError::WordTooLong { .. }))
        | Err(GenCheckError::Spec(e @ FixedSpaceError::Diagram(_))) => Ok(WordRecord {
            word: w.clone(),
            dims: BTreeMap::new(),
            intersection: None,
            target: None,
            verdict: Verdict::Skipped,
            reason: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, GenCheckError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| GenCheckError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

pub fn run_generation_check(
    task: &GenerationTask,
    options: &CheckOptions,
) -> Result<GenerationReport, GenCheckError> {
    let start = Instant::now();
    task.validate(&options.limits)?;
    let words = task.word_filter.words(task.max_len);
    let records = in_pool(options.workers, || {
        words
            .par_iter()
            .map(|w| check_word(task, w, &options.limits))
            .collect::<Result<Vec<_>, _>>()
    })??;

    let counterexample = records
        .iter()
        .find(|r| r.verdict == Verdict::Fail)
        .map(|r| r.word.clone());
    let skipped: Vec<ColoredWord> = records
        .iter()
        .filter(|r| r.verdict == Verdict::Skipped)
        .map(|r| r.word.clone())
        .collect();
    let overall = if counterexample.is_some() {
        Overall::Fail
    } else if !skipped.is_empty() {
        Overall::Incomplete
    } else {
        Overall::Pass
    };
    let certified_level = (overall == Overall::Pass).then_some(task.max_len);
    let claim = match overall {
        Overall::Pass => format!(
            "generation certified to level {}: fixed spaces agree on every word of length <= {}; \
             longer words are unchecked",
            task.max_len, task.max_len
        ),
        Overall::Fail => format!(
            "generation refuted: fixed spaces differ on {}",
            counterexample.as_ref().expect("fail has a counterexample")
        ),
        Overall::Incomplete => format!(
            "incomplete: {} word(s) skipped by size guards, no disagreement found",
            skipped.len()
        ),
    };

    let mut report = GenerationReport {
        task: task.clone(),
        statement: task.statement(),
        limits: options.limits,
        words: records,
        overall,
        certified_level,
        claim,
        counterexample,
        skipped,
        config_hash: sha256_json(&(task, &options.limits)),
        report_hash: String::new(),
        elapsed_ms: 0,
    };
    report.report_hash = report.canonical_hash();
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// The generation statements checked by [`run_paper_suite`], plus two
/// negative controls that must fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteInstance {
    /// `U⁺_N = ⟨U_N, U⁺_{N−1}⟩`, `N ≥ 3`.
    LowerRank,
    /// `U⁺_N = ⟨U_N, 𝕋⁺_N⟩`.
    UnitaryTorus,
    /// `U⁺_N = ⟨O_N, 𝕋⁺_N⟩`.
    UnitaryOrthogonalTorus,
    /// `O⁺_N = ⟨O_N, T⁺_N⟩`, on uncolored words.
    OrthogonalTorus,
    /// `U⁺_2` against `U_2` alone; must fail.
    ControlClassicalOnly,
    /// `U⁺_2` against its free torus alone; must fail.
    ControlTorusOnly,
}

impl SuiteInstance {
    pub const ALL: [SuiteInstance; 6] = [
        SuiteInstance::LowerRank,
        SuiteInstance::UnitaryTorus,
        SuiteInstance::UnitaryOrthogonalTorus,
        SuiteInstance::OrthogonalTorus,
        SuiteInstance::ControlClassicalOnly,
        SuiteInstance::ControlTorusOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteInstance::LowerRank => "lower-rank",
            SuiteInstance::UnitaryTorus => "unitary-torus",
            SuiteInstance::UnitaryOrthogonalTorus => "unitary-orthogonal-torus",
            SuiteInstance::OrthogonalTorus => "orthogonal-torus",
            SuiteInstance::ControlClassicalOnly => "control-classical-only",
            SuiteInstance::ControlTorusOnly => "control-torus-only",
        }
    }

    pub fn is_control(self) -> bool {
        matches!(
            self,
            SuiteInstance::ControlClassicalOnly | SuiteInstance::ControlTorusOnly
        )
    }

    pub fn expectation(self) -> Overall {
        if self.is_control() {
            Overall::Fail
        } else {
            Overall::Pass
        }
    }
}

impl std::str::FromStr for SuiteInstance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteInstance::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| format!("unknown suite instance {s:?}"))
    }
}

/// Dimension and word length of the negative controls.
pub const CONTROL_N: u32 = 2;
pub const CONTROL_MAX_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    #[serde(rename = "N_list")]
    pub n_list: Vec<u32>,
    /// Word length for colored (unitary-target) instances.
    pub max_len: usize,
    /// Word length for uncolored (orthogonal-target) instances.
    pub max_len_uncolored: usize,
    /// `None` runs every applicable instance.
    pub instances: Option<Vec<SuiteInstance>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n_list: vec![2, 3],
            max_len: 6,
            max_len_uncolored: 8,
            instances: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteEntry {
    pub instance: SuiteInstance,
    pub expected: Overall,
    pub as_expected: bool,
    pub report: GenerationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub entries: Vec<SuiteEntry>,
    /// Every generation instance passed and every control failed.
    pub all_as_expected: bool,
    /// Hash over the canonical hashes of all entries, in order.
    pub suite_hash: String,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn suite_task(
    instance: SuiteInstance,
    n: u32,
    config: &SuiteConfig,
) -> Result<GenerationTask, GenCheckError> {
    use GroupFamily::*;
    let dim = |n: u32| Dimension::new(n).map_err(GenCheckError::from);
    let colored = WordFilter::AllColorings;
    match instance {
        SuiteInstance::LowerRank => {
            if n < 3 {
                return Err(GenCheckError::LowerRankNeedsRank3(n));
            }
            GenerationTask::new(
                FreeU,
                &[ClassicalU, EmbeddedFreeULower],
                dim(n)?,
                config.max_len,
                colored,
            )
        }
        SuiteInstance::UnitaryTorus => GenerationTask::new(
            FreeU,
            &[ClassicalU, TorusFreeGroup],
            dim(n)?,
            config.max_len,
            colored,
        ),
        SuiteInstance::UnitaryOrthogonalTorus => GenerationTask::new(
            FreeU,
            &[ClassicalO, TorusFreeGroup],
            dim(n)?,
            config.max_len,
            colored,
        ),
        SuiteInstance::OrthogonalTorus => GenerationTask::new(
            FreeO,
            &[ClassicalO, TorusFreeZ2],
            dim(n)?,
            config.max_len_uncolored,
            WordFilter::UncoloredOnly,
        ),
        SuiteInstance::ControlClassicalOnly => GenerationTask::new(
            FreeU,
            &[ClassicalU],
            dim(CONTROL_N)?,
            CONTROL_MAX_LEN,
            colored,
        ),
        SuiteInstance::ControlTorusOnly => GenerationTask::new(
            FreeU,
            &[TorusFreeGroup],
            dim(CONTROL_N)?,
            CONTROL_MAX_LEN,
            colored,
        ),
    }
}

/// Expands the configuration into `(instance, N)` runs, in order.
pub fn suite_plan(config: &SuiteConfig) -> Result<Vec<(SuiteInstance, u32)>, GenCheckError> {
    let requested = config.instances.clone();
    let wanted = |i: SuiteInstance| requested.as_ref().is_none_or(|r| r.contains(&i));
    if let Some(r) = &requested {
        if r.contains(&SuiteInstance::LowerRank) {
            if let Some(&bad) = config.n_list.iter().find(|&&n| n < 3) {
                return Err(GenCheckError::LowerRankNeedsRank3(bad));
            }
        }
    }
    let mut plan = Vec::new();
    for &n in &config.n_list {
        for instance in SuiteInstance::ALL.into_iter().filter(|i| !i.is_control()) {
            if !wanted(instance) || (instance == SuiteInstance::LowerRank && n < 3) {
                continue;
            }
            plan.push((instance, n));
        }
    }
    for control in [
        SuiteInstance::ControlClassicalOnly,
        SuiteInstance::ControlTorusOnly,
    ] {
        if wanted(control) {
            plan.push((control, CONTROL_N));
        }
    }
    Ok(plan)
}

pub fn run_paper_suite(
    config: &SuiteConfig,
    options: &CheckOptions,
) -> Result<SuiteReport, GenCheckError> {
    let mut entries = Vec::new();
    for (instance, n) in suite_plan(config)? {
        let task = suite_task(instance, n, config)?;
        let report = run_generation_check(&task, options)?;
        let expected = instance.expectation();
        entries.push(SuiteEntry {
            instance,
            expected,
            as_expected: report.overall == expected,
            report,
        });
    }
    let all_as_expected = entries.iter().all(|e| e.as_expected);
    let hashes: Vec<&str> = entries
        .iter()
        .map(|e| e.report.report_hash.as_str())
        .collect();
    Ok(SuiteReport {
        config: config.clone(),
        suite_hash: sha256_json(&hashes),
        entries,
        all_as_expected,
    })
}

//! Prompt templates loaded from a versioned directory of UTF-8 files.
//!
//! Layout: one file per field (`<field>.txt`) plus `manifest.json`, which pins the
//! SHA-256 of every file. Loading fails if any file is missing or its checksum drifts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::StrategyKind;
use crate::tasks::OutputFormat;
use crate::text::sha256_hex;

pub const MANIFEST_FILE: &str = "manifest.json";

const PRINCIPLE_CLAUSE: &str = "When faced with a task, begin by identifying the participants";
const PREFIX_CLAUSE: &str = "identify the participants and collaboratively solve the following task step by step";

/// Template field names, which double as file stems.
pub const TEMPLATE_FIELDS: [&str; 13] = [
    "spp_system_principle",
    "spp_demo_1",
    "spp_demo_2",
    "spp_task_prefix",
    "profile_variant_overrides",
    "fixed_persona_overrides",
    "cot_template",
    "self_refine_feedback_template",
    "self_refine_refine_template",
    "format_trivia_creative_writing",
    "format_codenames_spymaster",
    "format_codenames_guesser",
    "format_logic_grid_puzzle",
];

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad manifest: {0}")]
    Manifest(String),
    #[error("checksum mismatch for {file}: manifest has {expected}, file hashes to {actual}")]
    ChecksumMismatch { file: String, expected: String, actual: String },
    #[error("{file}: {message}")]
    Invalid { file: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateManifest {
    pub version: String,
    /// File name to lowercase hex SHA-256.
    pub checksums: BTreeMap<String, String>,
    #[serde(default)]
    pub transcription_notes: BTreeMap<String, String>,
}

/// Sections replaced by an SPP variant. Absent sections fall back to the base prompt.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SppOverrides {
    pub system_principle: Option<String>,
    pub demo_1: Option<String>,
    pub demo_2: Option<String>,
    pub task_prefix: Option<String>,
}

impl SppOverrides {
    /// Parses `@@ <field>` sectioned text. Every section name must be an SPP base field.
    pub fn parse(file: &str, text: &str) -> Result<Self, TemplateError> {
        let mut out = SppOverrides::default();
        let mut current: Option<(String, Vec<&str>)> = None;
        let finish = |section: Option<(String, Vec<&str>)>, out: &mut SppOverrides| -> Result<(), TemplateError> {
            let Some((name, lines)) = section else { return Ok(()) };
            let body = lines.join("\n").trim_end().to_string();
            let slot = match name.as_str() {
                "spp_system_principle" => &mut out.system_principle,
                "spp_demo_1" => &mut out.demo_1,
                "spp_demo_2" => &mut out.demo_2,
                "spp_task_prefix" => &mut out.task_prefix,
                other => {
                    return Err(TemplateError::Invalid {
                        file: file.to_string(),
                        message: format!("unknown override section {other:?}"),
                    })
                }
            };
            if slot.replace(body).is_some() {
                return Err(TemplateError::Invalid {
                    file: file.to_string(),
                    message: format!("section {name:?} given twice"),
                });
            }
            Ok(())
        };
        for line in text.lines() {
            if let Some(name) = line.strip_prefix("@@ ") {
                finish(current.take(), &mut out)?;
                current = Some((name.trim().to_string(), Vec::new()));
            } else if let Some((_, lines)) = current.as_mut() {
                lines.push(line);
            } else if !line.trim().is_empty() {
                return Err(TemplateError::Invalid {
                    file: file.to_string(),
                    message: "text before the first @@ section".into(),
                });
            }
        }
        finish(current.take(), &mut out)?;
        Ok(out)
    }
}

/// The SPP prompt pieces in effect for one strategy after overrides are applied.
#[derive(Debug, Clone, Copy)]
pub struct SppParts<'a> {
    pub system_principle: &'a str,
    pub demo_1: &'a str,
    pub demo_2: &'a str,
    pub task_prefix: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatInstructions {
    pub trivia: String,
    pub spymaster: String,
    pub guesser: String,
    pub logic: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplateSet {
    pub spp_system_principle: String,
    pub spp_demo_1: String,
    pub spp_demo_2: String,
    pub spp_task_prefix: String,
    pub profile_variant_overrides: SppOverrides,
    pub fixed_persona_overrides: SppOverrides,
    pub cot_template: String,
    pub self_refine_feedback_template: String,
    pub self_refine_refine_template: String,
    pub format_instructions: FormatInstructions,
    pub manifest: TemplateManifest,
}

impl PromptTemplateSet {
    /// Loads and checksum-verifies every template under `dir`.
    pub fn load(dir: &Path) -> Result<Self, TemplateError> {
        let manifest_path = dir.join(MANIFEST_FILE);
        let manifest_text = read(&manifest_path)?;
        let manifest: TemplateManifest =
            serde_json::from_str(&manifest_text).map_err(|e| TemplateError::Manifest(e.to_string()))?;

        let mut fields = BTreeMap::new();
        for field in TEMPLATE_FIELDS {
            let file = format!("{field}.txt");
            let bytes = fs::read(dir.join(&file)).map_err(|source| TemplateError::Io {
                path: dir.join(&file),
                source,
            })?;
            let expected = manifest
                .checksums
                .get(&file)
                .ok_or_else(|| TemplateError::Manifest(format!("no checksum for {file}")))?;
            let actual = sha256_hex(&bytes);
            if &actual != expected {
                return Err(TemplateError::ChecksumMismatch { file, expected: expected.clone(), actual });
            }
            let text = String::from_utf8(bytes).map_err(|e| TemplateError::Invalid {
                file: file.clone(),
                message: e.to_string(),
            })?;
            fields.insert(field, text.trim_end().to_string());
        }
        let mut take = |name: &str| fields.remove(name).unwrap_or_default();

        let set = PromptTemplateSet {
            spp_system_principle: take("spp_system_principle"),
            spp_demo_1: take("spp_demo_1"),
            spp_demo_2: take("spp_demo_2"),
            spp_task_prefix: take("spp_task_prefix"),
            profile_variant_overrides: SppOverrides::parse(
                "profile_variant_overrides.txt",
                &take("profile_variant_overrides"),
            )?,
            fixed_persona_overrides: SppOverrides::parse(
                "fixed_persona_overrides.txt",
                &take("fixed_persona_overrides"),
            )?,
            cot_template: take("cot_template"),
            self_refine_feedback_template: take("self_refine_feedback_template"),
            self_refine_refine_template: take("self_refine_refine_template"),
            format_instructions: FormatInstructions {
                trivia: take("format_trivia_creative_writing"),
                spymaster: take("format_codenames_spymaster"),
                guesser: take("format_codenames_guesser"),
                logic: take("format_logic_grid_puzzle"),
            },
            manifest,
        };
        set.check_invariants()?;
        Ok(set)
    }

    fn check_invariants(&self) -> Result<(), TemplateError> {
        let invalid = |file: &str, message: String| TemplateError::Invalid { file: file.to_string(), message };
        for kind in [StrategyKind::Spp, StrategyKind::SppProfile, StrategyKind::SppFixedPersona] {
            let parts = self.spp_parts(kind);
            if !parts.system_principle.contains(PRINCIPLE_CLAUSE) {
                return Err(invalid("spp_system_principle", format!("{kind:?} principle lacks {PRINCIPLE_CLAUSE:?}")));
            }
            if !parts.task_prefix.contains(PREFIX_CLAUSE) {
                return Err(invalid("spp_task_prefix", format!("{kind:?} prefix lacks {PREFIX_CLAUSE:?}")));
            }
        }
        let placeholders = [
            ("cot_template", &self.cot_template, &["{task}", "{format_instruction}"][..]),
            ("self_refine_feedback_template", &self.self_refine_feedback_template, &["{task}", "{answer}"][..]),
            (
                "self_refine_refine_template",
                &self.self_refine_refine_template,
                &["{task}", "{answer}", "{feedback}", "{format_instruction}"][..],
            ),
        ];
        for (file, text, required) in placeholders {
            for p in required {
                if !text.contains(p) {
                    return Err(invalid(file, format!("missing placeholder {p}")));
                }
            }
        }
        Ok(())
    }

    /// SPP prompt sections for `kind` with the variant's overrides applied.
    pub fn spp_parts(&self, kind: StrategyKind) -> SppParts<'_> {
        let overrides = match kind {
            StrategyKind::SppProfile => Some(&self.profile_variant_overrides),
            StrategyKind::SppFixedPersona => Some(&self.fixed_persona_overrides),
            _ => None,
        };
        SppParts {
            system_principle: overrides
                .and_then(|o| o.system_principle.as_deref())
                .unwrap_or(&self.spp_system_principle),
            demo_1: overrides.and_then(|o| o.demo_1.as_deref()).unwrap_or(&self.spp_demo_1),
            demo_2: overrides.and_then(|o| o.demo_2.as_deref()).unwrap_or(&self.spp_demo_2),
            task_prefix: overrides.and_then(|o| o.task_prefix.as_deref()).unwrap_or(&self.spp_task_prefix),
        }
    }

    pub fn format_instruction(&self, format: OutputFormat) -> &str {
        let f = &self.format_instructions;
        match format {
            OutputFormat::TriviaStory => &f.trivia,
            OutputFormat::CodenamesHint => &f.spymaster,
            OutputFormat::CodenamesGuesses => &f.guesser,
            OutputFormat::HouseNumber => &f.logic,
        }
    }

    /// Checksums of every template file, for run identifiers.
    pub fn checksums(&self) -> &BTreeMap<String, String> {
        &self.manifest.checksums
    }
}

fn read(path: &Path) -> Result<String, TemplateError> {
    fs::read_to_string(path).map_err(|source| TemplateError::Io { path: path.to_path_buf(), source })
}

/// Recomputes the checksum of every template file under `dir`.
pub fn compute_checksums(dir: &Path) -> Result<BTreeMap<String, String>, TemplateError> {
    TEMPLATE_FIELDS
        .iter()
        .map(|field| {
            let file = format!("{field}.txt");
            let path = dir.join(&file);
            let bytes = fs::read(&path).map_err(|source| TemplateError::Io { path, source })?;
            Ok((file, sha256_hex(&bytes)))
        })
        .collect()
}

//! Text normalization shared by every matcher in the crate.
//!
//! Matching runs on NFKC-normalized, case-folded text with whitespace runs
//! collapsed to a single space. Punctuation is left untouched.

use unicode_normalization::UnicodeNormalization;

/// Normalizes `text` for matching: NFKC, full case folding, whitespace collapse, trim.
pub fn normalize(text: &str) -> String {
    let nfkc: String = text.nfkc().collect();
    let folded = caseless::default_case_fold_str(&nfkc);
    collapse_whitespace(&folded)
}

/// Collapses every run of Unicode whitespace into one ASCII space and trims both ends.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Canonical key for a persona name: trimmed, `(you)` suffix removed, normalized.
pub fn persona_key(name: &str) -> String {
    let trimmed = name.trim();
    // ASCII lowercasing keeps byte offsets aligned with `trimmed`.
    let lowered = trimmed.to_ascii_lowercase();
    let stripped = match lowered.rfind("(you)") {
        Some(pos) if lowered[pos..].trim() == "(you)" => &trimmed[..pos],
        _ => trimmed,
    };
    normalize(stripped)
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}

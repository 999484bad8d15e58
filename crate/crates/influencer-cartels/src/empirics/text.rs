//! Hashtag extraction from raw post text.
//!
//! The pipeline embeds hashtags rather than full text, so posts are reduced
//! to a cleaned hashtag token list. One token is emitted per kept hashtag,
//! with `#` and `_` replaced by spaces (so `#beach_life` becomes
//! `beach life`).

/// Maximum hashtags kept per post; the platform allows no more.
pub const MAX_HASHTAGS_PER_POST: usize = 30;

/// Extract cleaned hashtag tokens from one post's raw text.
///
/// Steps, in order: lower-case; replace every character that is not a
/// letter, digit, underscore or `#` with a space; insert a space before each
/// `#`; keep only whitespace-separated words that start with `#`; keep the
/// first 30 such words; drop hashtags whose content is a single character;
/// drop hashtags containing no letters; emit each survivor with `#` and `_`
/// turned into spaces and runs of whitespace collapsed.
pub fn extract_hashtags(raw_text: &str) -> Vec<String> {
    let lowered = raw_text.to_lowercase();
    let mut cleaned = String::with_capacity(lowered.len() + 8);
    for c in lowered.chars() {
        if c == '#' {
            cleaned.push(' ');
            cleaned.push('#');
        } else if c.is_alphanumeric() || c == '_' {
            cleaned.push(c);
        } else {
            cleaned.push(' ');
        }
    }
    cleaned
        .split_whitespace()
        .filter(|w| w.starts_with('#'))
        .take(MAX_HASHTAGS_PER_POST)
        .filter_map(|w| {
            let content = &w[1..];
            if content.chars().count() <= 1 {
                return None;
            }
            if !content.chars().any(|c| c.is_alphabetic()) {
                return None;
            }
            let spaced: String = content
                .chars()
                .map(|c| if c == '_' || c == '#' { ' ' } else { c })
                .collect();
            let token = spaced.split_whitespace().collect::<Vec<_>>().join(" ");
            if token.is_empty() {
                None
            } else {
                Some(token)
            }
        })
        .collect()
}

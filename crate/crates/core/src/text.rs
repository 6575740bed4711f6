//! Small string utilities shared by the generators and metrics.

/// Casefold and collapse whitespace.
pub fn normalize(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-' || c == '\''
}

/// Lowercased word and punctuation tokens. Hyphenated words stay whole.
pub fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    for c in s.chars() {
        if is_word_char(c) {
            word.extend(c.to_lowercase());
        } else {
            if !word.is_empty() {
                out.push(std::mem::take(&mut word));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
    out
}

/// Lowercased word tokens only.
pub fn words(s: &str) -> Vec<String> {
    tokens(s)
        .into_iter()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .collect()
}

/// Whether `needle` occurs in `hay` on word boundaries, case-insensitively.
pub fn contains_phrase(hay: &str, needle: &str) -> bool {
    find_phrase(hay, needle).is_some()
}

/// Byte offset of the first word-bounded, case-insensitive occurrence.
pub fn find_phrase(hay: &str, needle: &str) -> Option<usize> {
    find_phrase_all(hay, needle).into_iter().next()
}

pub(crate) fn find_phrase_all(hay: &str, needle: &str) -> Vec<usize> {
    if needle.is_empty() {
        return Vec::new();
    }
    let lower_hay = hay.to_lowercase();
    let lower_needle = needle.to_lowercase();
    // Lowercasing can change byte lengths for some scripts; only trust
    // offsets when it did not.
    if lower_hay.len() != hay.len() {
        return Vec::new();
    }
    let mut hits = Vec::new();
    let mut from = 0;
    while let Some(rel) = lower_hay[from..].find(&lower_needle) {
        let at = from + rel;
        let end = at + lower_needle.len();
        let before_ok = lower_hay[..at]
            .chars()
            .next_back()
            .is_none_or(|c| !is_word_char(c));
        let after_ok = lower_hay[end..]
            .chars()
            .next()
            .is_none_or(|c| !is_word_char(c));
        if before_ok && after_ok {
            hits.push(at);
        }
        from = at + lower_needle.chars().next().map_or(1, char::len_utf8);
    }
    hits
}

/// Default negation rule for attribute phrases.
///
/// Predicate phrases starting with "has" or "is" negate the verb; anything
/// else gets a leading "not".
pub fn negate_phrase(phrase: &str) -> String {
    if let Some(rest) = phrase.strip_prefix("has ") {
        format!("does not have {rest}")
    } else if let Some(rest) = phrase.strip_prefix("is ") {
        format!("is not {rest}")
    } else {
        format!("not {phrase}")
    }
}

/// "a" or "an" for the word that follows, by a first-letter heuristic with
/// a few common exceptions.
pub fn indefinite_article(next: &str) -> &'static str {
    let lower = next.trim_start().to_lowercase();
    const CONSONANT_SOUND: [&str; 6] = ["eu", "uni", "use", "usu", "one", "ubi"];
    const VOWEL_SOUND: [&str; 3] = ["hour", "honest", "honor"];
    if VOWEL_SOUND.iter().any(|p| lower.starts_with(p)) {
        return "an";
    }
    if CONSONANT_SOUND.iter().any(|p| lower.starts_with(p)) {
        return "a";
    }
    match lower.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

/// Copies the capitalization of `model`'s first letter onto `word`.
pub fn match_case(model: &str, word: &str) -> String {
    if model.chars().next().is_some_and(char::is_uppercase) {
        capitalize(word)
    } else {
        word.to_string()
    }
}

pub fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn eq_ignoring_initial_case(a: &str, b: &str) -> bool {
    a == b || capitalize(a) == capitalize(b)
}

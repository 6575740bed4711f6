//! Structural edits on a test case's text.
//!
//! Every change goes through [`splice`], which shifts binding and pronoun
//! spans so they keep pointing at the same words. Attribute values are
//! never located by string search.

use std::ops::Range;

use crate::catalog::{Catalog, Pronouns, SurfaceForm};
use crate::corpus::{Span, TestCase};
use crate::error::{Error, Result};
use crate::text;

/// Connector phrases that dangle once the attribute they introduce is
/// removed: `(before, after, replacement)`. The matched
/// `before + attribute + after` run is replaced by `replacement`. A pattern
/// token "a" also matches "an". Tried in order.
const CONNECTORS: &[(&str, &str, &str)] = &[
    (", who is experiencing", ",", ""),
    (", who is from a", "background,", ""),
    ("who is a", "from a", "who is from a"),
    ("and is experiencing", "", ""),
    ("who is", "and", "who"),
    ("who speaks", "and", "who"),
    ("who", "and", "who"),
    ("being", ",", ""),
    ("working as a", ",", ""),
    (", and speaking", "", ""),
    ("and speaking", "", ""),
    ("as a", "person", ""),
    ("from a", "background", ""),
    ("from a", "family", ""),
    ("from a", "household", ""),
    ("from a", "neighborhood", ""),
    ("with", "experience", ""),
    ("who speaks", "", ""),
    ("who is", "", ""),
    ("that is", "", ""),
    ("and", "", ""),
    ("who", "", ""),
];

/// Main-predicate patterns and their negations, tried in order; the last
/// occurrence of the first pattern present outside attribute spans is
/// negated.
pub(crate) const PREDICATES: &[(&str, &str)] = &[
    ("is looking for", "is not looking for"),
    ("is recognized", "is not recognized"),
    ("influenced your", "not influenced your"),
    ("is qualified", "is not qualified"),
    ("deserves", "does not deserve"),
    ("presents", "does not present"),
    ("is happy", "is not happy"),
    ("is struggling", "is not struggling"),
    ("is welcomed", "is not welcomed"),
    ("respond to", "not respond to"),
    ("asks for", "does not ask for"),
    ("becomes", "does not become"),
    ("applies to", "does not apply to"),
    ("receive priority", "not receive priority"),
    ("holds", "does not hold"),
    ("feels", "does not feel"),
    ("seems", "does not seem"),
    ("appears", "does not appear"),
    ("looks", "does not look"),
    ("Write", "Do not write"),
    ("Describe", "Do not describe"),
    ("Evaluate", "Do not evaluate"),
    ("Assess", "Do not assess"),
    ("is", "is not"),
    ("has", "does not have"),
];

/// Replaces `range` with `replacement`, shifting every span. Spans strictly
/// inside a replaced range are dropped; a span containing the range grows or
/// shrinks with it.
pub(crate) fn splice(case: &mut TestCase, range: Range<usize>, replacement: &str) {
    let delta = replacement.len() as isize - range.len() as isize;
    let adjust = |span: &mut Span| -> bool {
        if span.end <= range.start {
            return true;
        }
        if span.start >= range.end {
            span.start = (span.start as isize + delta) as usize;
            span.end = (span.end as isize + delta) as usize;
            return true;
        }
        if range.start >= span.start && range.end <= span.end {
            span.end = (span.end as isize + delta) as usize;
            return true;
        }
        debug_assert!(
            span.start >= range.start && span.end <= range.end,
            "partial overlap of {span:?} with {range:?}"
        );
        false
    };
    case.bindings.retain_mut(|b| adjust(&mut b.span));
    case.pronouns.retain_mut(|p| adjust(&mut p.span));
    case.text.replace_range(range, replacement);
}

fn overlaps_other(case: &TestCase, range: &Range<usize>, own: Span) -> bool {
    case.bindings
        .iter()
        .map(|b| b.span)
        .chain(case.pronouns.iter().map(|p| p.span))
        .filter(|s| *s != own)
        .any(|s| s.start < range.end && range.start < s.end)
}

/// Word and single-character punctuation tokens with byte ranges.
fn token_ranges(s: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if text::is_word_char(c) {
            start.get_or_insert(i);
        } else {
            if let Some(st) = start.take() {
                out.push(st..i);
            }
            if !c.is_whitespace() {
                out.push(i..i + c.len_utf8());
            }
        }
    }
    if let Some(st) = start {
        out.push(st..s.len());
    }
    out
}

fn token_eq(pattern: &str, actual: &str) -> bool {
    let actual = actual.to_lowercase();
    pattern == actual || (pattern == "a" && actual == "an")
}

fn pattern_tokens(p: &str) -> Vec<String> {
    text::tokens(p)
}

/// Start offset of `pattern` if it ends right before `pos`.
fn match_before(s: &str, pos: usize, pattern: &str) -> Option<usize> {
    let pat = pattern_tokens(pattern);
    if pat.is_empty() {
        return Some(pos);
    }
    let toks = token_ranges(&s[..pos]);
    if toks.len() < pat.len() {
        return None;
    }
    let tail = &toks[toks.len() - pat.len()..];
    tail.iter()
        .zip(&pat)
        .all(|(r, p)| token_eq(p, &s[r.clone()]))
        .then(|| tail[0].start)
}

/// End offset of `pattern` if it starts right after `pos`.
fn match_after(s: &str, pos: usize, pattern: &str) -> Option<usize> {
    let pat = pattern_tokens(pattern);
    if pat.is_empty() {
        return Some(pos);
    }
    let toks = token_ranges(&s[pos..]);
    if toks.len() < pat.len() {
        return None;
    }
    let head = &toks[..pat.len()];
    head.iter()
        .zip(&pat)
        .all(|(r, p)| token_eq(p, &s[pos + r.start..pos + r.end]))
        .then(|| pos + head[pat.len() - 1].end)
}

/// Byte range of the word ending right before `pos` (skipping spaces).
fn word_before(s: &str, pos: usize) -> Option<Range<usize>> {
    let head = s[..pos].trim_end();
    let end = head.len();
    let start = head
        .char_indices()
        .rev()
        .take_while(|(_, c)| text::is_word_char(*c))
        .last()
        .map(|(i, _)| i)?;
    Some(start..end)
}

/// First word at or after `pos`.
fn word_after(s: &str, pos: usize) -> Option<&str> {
    let rest = s[pos..].trim_start();
    let len = rest
        .char_indices()
        .find(|(_, c)| !text::is_word_char(*c))
        .map_or(rest.len(), |(i, _)| i);
    (len > 0).then(|| &rest[..len])
}

/// Makes an indefinite article right before `pos` agree with the word after.
pub(crate) fn fix_article_before(case: &mut TestCase, pos: usize) {
    let Some(art) = word_before(&case.text, pos) else {
        return;
    };
    let current = case.text[art.clone()].to_string();
    if !matches!(current.to_lowercase().as_str(), "a" | "an") {
        return;
    }
    let Some(next) = word_after(&case.text, art.end) else {
        return;
    };
    let want = text::match_case(&current, text::indefinite_article(next));
    if want != current {
        splice(case, art, &want);
    }
}

/// Re-renders every pronoun slot from the sentence's gender binding, or the
/// neutral set when there is none (or it is negated).
pub(crate) fn refresh_pronouns(case: &mut TestCase, catalog: &Catalog) {
    if case.pronouns.is_empty() {
        return;
    }
    let set = case
        .bindings
        .iter()
        .filter(|b| b.form != SurfaceForm::Negated)
        .find_map(|b| {
            catalog
                .value(&b.category, &b.value)
                .ok()
                .and_then(|v| v.gender_pronouns.clone())
        })
        .unwrap_or_else(Pronouns::neutral);
    for i in 0..case.pronouns.len() {
        let slot = case.pronouns[i].clone();
        let current = &case.text[slot.span.range()];
        let want = text::match_case(current, set.get(slot.role));
        if want != current {
            splice(case, slot.span.range(), &want);
        }
    }
}

fn sort_bindings(case: &mut TestCase) {
    case.bindings.sort_by_key(|b| b.span.start);
}

/// Rebinds binding `idx` to `value_id` rendered in `form`.
pub(crate) fn set_value(
    case: &mut TestCase,
    idx: usize,
    catalog: &Catalog,
    value_id: &str,
    form: SurfaceForm,
) -> Result<()> {
    let b = case.bindings[idx].clone();
    let value = catalog.value(&b.category, value_id)?;
    let mut rendered = value.render(b.register, form).ok_or_else(|| {
        Error::not_applicable(format!("{}/{} has no {form:?} form", b.category, value_id))
    })?;
    if b.span.start == 0 {
        rendered = text::capitalize(&rendered);
    }
    splice(case, b.span.range(), &rendered);
    let binding = &mut case.bindings[idx];
    binding.value = value_id.to_string();
    binding.form = form;
    let start = binding.span.start;
    fix_article_before(case, start);
    refresh_pronouns(case, catalog);
    sort_bindings(case);
    Ok(())
}

/// Removes binding `idx` from the sentence, dropping dangling connectors and
/// stray punctuation.
pub(crate) fn remove_binding(case: &mut TestCase, idx: usize, catalog: &Catalog) -> Result<()> {
    let b = case.bindings[idx].clone();
    let span = b.span;
    let category = catalog.category(&b.category)?;

    let connector = CONNECTORS.iter().find_map(|(before, after, repl)| {
        let start = match_before(&case.text, span.start, before)?;
        let end = match_after(&case.text, span.end, after)?;
        let range = start..end;
        (!overlaps_other(case, &range, span)).then_some((range, *repl))
    });

    let (range, replacement) = match (connector, &category.removal_form) {
        (Some((range, repl)), _) => (range, repl.to_string()),
        (None, Some(form)) => (span.range(), form.clone()),
        (None, None) => {
            let after = &case.text[span.end..];
            let before = case.text[..span.start].trim_end();
            let after_determiner = word_before(&case.text, span.start)
                .is_some_and(|w| matches!(case.text[w].to_lowercase().as_str(), "the" | "a" | "an"));
            let list_continues = case.bindings.iter().any(|o| {
                o.span.start > span.end && case.text[span.end..o.span.start].trim() == ","
            });
            if after.starts_with(',') && (list_continues || !after_determiner) {
                (span.start..span.end + 1, String::new())
            } else if before.ends_with(',') {
                (before.len() - 1..span.end, String::new())
            } else {
                (span.range(), String::new())
            }
        }
    };

    case.bindings.remove(idx);
    let at = range.start;
    splice(case, range, &replacement);
    fix_article_before(case, at);
    cleanup(case);
    refresh_pronouns(case, catalog);
    sort_bindings(case);
    Ok(())
}

/// Negates the main predicate of the sentence.
pub(crate) fn negate_predicate(case: &mut TestCase) -> Result<()> {
    for (pattern, negated) in PREDICATES {
        let hit = text::find_phrase_all(&case.text, pattern)
            .into_iter()
            .rfind(|&at| {
                // Case-sensitive so "Write" only matches sentence-initial use.
                case.text[at..].starts_with(pattern)
                    && !overlaps_other(case, &(at..at + pattern.len()), Span::new(0, 0))
            });
        if let Some(at) = hit {
            splice(case, at..at + pattern.len(), negated);
            return Ok(());
        }
    }
    Err(Error::not_applicable("no negatable predicate"))
}

/// Moves the surface text of the bindings at `slots` (indices, in textual
/// order) so slot `k` receives the text of slot `perm[k]`.
pub(crate) fn permute(case: &mut TestCase, slots: &[usize], perm: &[usize], catalog: &Catalog) {
    let originals: Vec<_> = slots.iter().map(|&i| case.bindings[i].clone()).collect();
    let texts: Vec<String> = originals
        .iter()
        .map(|b| case.text[b.span.range()].to_string())
        .collect();
    for k in (0..slots.len()).rev() {
        let span = case.bindings[slots[k]].span;
        splice(case, span.range(), &texts[perm[k]]);
    }
    for (k, &i) in slots.iter().enumerate() {
        let src = &originals[perm[k]];
        let b = &mut case.bindings[i];
        b.category = src.category.clone();
        b.value = src.value.clone();
        b.register = src.register;
        b.form = src.form;
    }
    for &i in slots.iter().rev() {
        let start = case.bindings[i].span.start;
        fix_article_before(case, start);
    }
    refresh_pronouns(case, catalog);
    sort_bindings(case);
}

/// Whitespace and punctuation repair after removals.
pub(crate) fn cleanup(case: &mut TestCase) {
    loop {
        let t = &case.text;
        let fix: Option<(Range<usize>, String)> = (|| {
            // leading whitespace or punctuation
            let lead = t.len() - t.trim_start_matches(|c: char| c.is_whitespace() || c == ',').len();
            if lead > 0 {
                return Some((0..lead, String::new()));
            }
            let trimmed = t.trim_end().len();
            if trimmed < t.len() {
                return Some((trimmed..t.len(), String::new()));
            }
            let bytes = t.as_bytes();
            for i in 0..bytes.len().saturating_sub(1) {
                let (a, b) = (bytes[i], bytes[i + 1]);
                if a.is_ascii_whitespace() && b.is_ascii_whitespace() {
                    return Some((i..i + 2, " ".into()));
                }
                if a == b' ' && matches!(b, b',' | b'.' | b'?' | b'!' | b';' | b':') {
                    return Some((i..i + 1, String::new()));
                }
                if a == b',' && matches!(b, b',' | b'.' | b'?' | b'!') {
                    return Some((i..i + 1, String::new()));
                }
            }
            // determiner left without a noun
            for (i, c) in t.char_indices() {
                if !matches!(c, ',' | '.' | '?' | '!') {
                    continue;
                }
                if let Some(w) = word_before(t, i) {
                    if t[w.end..i].chars().all(char::is_whitespace) {
                        let word = &t[w.clone()];
                        match word.to_lowercase().as_str() {
                            "the" => return Some((w.end..w.end, " person".into())),
                            "a" | "an" => {
                                return Some((w, format!("{} person", text::match_case(word, "a"))))
                            }
                            _ => {}
                        }
                    }
                }
            }
            if t.chars().next().is_some_and(char::is_lowercase) {
                let first = t.chars().next().unwrap();
                return Some((0..first.len_utf8(), first.to_uppercase().collect()));
            }
            None
        })();
        match fix {
            Some((range, repl)) => splice(case, range, &repl),
            None => break,
        }
    }
}

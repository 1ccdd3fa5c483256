//! Shared helpers for the line-oriented input formats.

use crate::error::{Error, Result};

/// Non-empty, comment-stripped lines with their 1-based line numbers.
pub(crate) fn lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input.lines().enumerate().filter_map(|(i, raw)| {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub(crate) fn parse_usize(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a natural number, found `{token}`")))
}

pub(crate) fn is_identifier(token: &str) -> bool {
    let mut chars = token.chars();
    matches!(chars.next(), Some(c) if c.is_alphanumeric() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '-'))
}

/// Splits `lhs <sep> rhs` once, trimming both halves.
pub(crate) fn split_once<'a>(line: usize, text: &'a str, sep: &str) -> Result<(&'a str, &'a str)> {
    text.split_once(sep)
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| Error::parse(line, format!("expected `{sep}` in `{text}`")))
}

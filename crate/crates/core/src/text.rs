//! Label normalization shared by the parsers and the gazetteer.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Case-folds, strips accents and unifies hyphens, underscores, apostrophes
/// and runs of whitespace into a single space.
///
/// `"  Colloque-Congrès "` and `"colloque congres"` fold to the same key.
pub fn fold(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for c in s.nfkd().filter(|c| !is_combining_mark(*c)) {
        let c = match c {
            '-' | '_' | '\u{2010}'..='\u{2015}' | '\'' | '\u{2019}' | '.' => ' ',
            other => other,
        };
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.extend(c.to_lowercase());
    }
    out
}

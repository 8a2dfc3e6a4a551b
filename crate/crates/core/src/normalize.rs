//! Surface-term normalization shared by the ontology, tagger and dedup.

/// Case-folds, collapses internal whitespace and strips leading/trailing
/// punctuation. No stemming.
pub fn normalize(term: &str) -> String {
    let mut out = String::with_capacity(term.len());
    for word in term.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        for c in word.chars() {
            out.extend(c.to_lowercase());
        }
    }
    out.trim_matches(|c: char| c.is_whitespace() || is_punctuation(c))
        .to_string()
}

pub(crate) fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{2010}'..='\u{2027}' | '\u{00a1}' | '\u{00ab}' | '\u{00bb}' | '\u{00bf}' | '\u{3001}' | '\u{3002}'
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn folds_case_and_collapses_whitespace() {
        assert_eq!(normalize("EQUINE   Influenza"), "equine influenza");
        assert_eq!(normalize("  Isle\tof\nWight "), "isle of wight");
    }

    #[test]
    fn strips_only_outer_punctuation() {
        assert_eq!(normalize("\"bird flu,\""), "bird flu");
        assert_eq!(normalize("(foot-and-mouth disease)."), "foot-and-mouth disease");
        assert_eq!(normalize("Weil's disease"), "weil's disease");
        assert_eq!(normalize("“SARS”"), "sars");
    }

    #[test]
    fn punctuation_only_collapses_to_empty() {
        assert_eq!(normalize(""), "");
        assert_eq!(normalize(" -- ... "), "");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,40}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
        }
    }
}

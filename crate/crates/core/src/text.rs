//! Character-offset tokenization.

/// A token as a half-open range in both char and byte offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Token {
    pub char_start: usize,
    pub char_end: usize,
    pub byte_start: usize,
    pub byte_end: usize,
}

/// Maximal runs of alphanumeric characters.
pub(crate) fn tokens(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut current: Option<Token> = None;
    for (ci, (bi, c)) in text.char_indices().enumerate() {
        if c.is_alphanumeric() {
            match current.as_mut() {
                Some(t) => {
                    t.char_end = ci + 1;
                    t.byte_end = bi + c.len_utf8();
                }
                None => {
                    current = Some(Token {
                        char_start: ci,
                        char_end: ci + 1,
                        byte_start: bi,
                        byte_end: bi + c.len_utf8(),
                    })
                }
            }
        } else if let Some(t) = current.take() {
            out.push(t);
        }
    }
    out.extend(current);
    out
}

/// Byte range for a char range, or `None` when out of bounds.
pub(crate) fn char_range_to_bytes(text: &str, start: usize, end: usize) -> Option<(usize, usize)> {
    if start > end {
        return None;
    }
    let mut bstart = None;
    let mut count = 0;
    for (ci, (bi, _)) in text.char_indices().enumerate() {
        if ci == start {
            bstart = Some(bi);
        }
        if ci == end {
            return bstart.map(|s| (s, bi));
        }
        count = ci + 1;
    }
    if end == count {
        let s = if start == count { Some(text.len()) } else { bstart };
        return s.map(|s| (s, text.len()));
    }
    None
}

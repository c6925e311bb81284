//! Guards applied before handing text to the XML parser.

/// Element nesting limit for parsed documents. The tree parser recurses per
/// level, so deeper input is rejected before parsing.
pub const MAX_NESTING: usize = 256;

/// Fails when elements nest deeper than `max`. A lexical scan: comments,
/// CDATA sections, processing instructions, declarations and quoted
/// attribute values are skipped. Malformed input that gets past it is left
/// for the parser to reject.
pub fn check_nesting(text: &str, max: usize) -> Result<(), String> {
    let bytes = text.as_bytes();
    let find = |from: usize, pat: &[u8]| {
        bytes[from.min(bytes.len())..]
            .windows(pat.len())
            .position(|w| w == pat)
            .map(|p| from + p + pat.len())
    };
    let mut depth = 0usize;
    let mut i = 0;
    while let Some(p) = bytes[i..].iter().position(|b| *b == b'<') {
        i += p + 1;
        let rest = &bytes[i..];
        i = if rest.starts_with(b"!--") {
            find(i + 3, b"-->")
        } else if rest.starts_with(b"![CDATA[") {
            find(i + 8, b"]]>")
        } else if rest.starts_with(b"?") {
            find(i + 1, b"?>")
        } else if rest.starts_with(b"!") {
            skip_declaration(bytes, i + 1)
        } else if rest.starts_with(b"/") {
            depth = depth.saturating_sub(1);
            find(i, b">")
        } else {
            let (end, self_closing) = scan_tag(bytes, i);
            if !self_closing {
                depth += 1;
                if depth > max {
                    return Err(format!("elements nested deeper than {max}"));
                }
            }
            end
        }
        .unwrap_or(bytes.len());
    }
    Ok(())
}

/// End of a start tag, honouring quotes, and whether it closes itself.
fn scan_tag(bytes: &[u8], mut i: usize) -> (Option<usize>, bool) {
    let mut quote = None;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None if b == b'"' || b == b'\'' => quote = Some(b),
            None if b == b'>' => return (Some(i + 1), i > 0 && bytes[i - 1] == b'/'),
            None => {}
        }
        i += 1;
    }
    (None, false)
}

/// End of a `<!DOCTYPE ...>` style declaration, including an internal subset.
fn skip_declaration(bytes: &[u8], mut i: usize) -> Option<usize> {
    let mut brackets = 0usize;
    let mut quote = None;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None => match b {
                b'"' | b'\'' => quote = Some(b),
                b'[' => brackets += 1,
                b']' => brackets = brackets.saturating_sub(1),
                b'>' if brackets == 0 => return Some(i + 1),
                _ => {}
            },
        }
        i += 1;
    }
    None
}

use crate::error::{Error, Result};

/// Lede of an article: its first paragraph and that paragraph's sentences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArticleStructure {
    pub first_paragraph: String,
    pub sentences: Vec<String>,
}

/// Splits off the first paragraph (text up to the first blank line, or the
/// whole body when there is none) and cuts it into sentences at `.`, `?` or
/// `!` followed by whitespace or the end of text.
///
/// The splitter knows nothing about abbreviations: `"Dr. Smith won."` yields
/// `["Dr.", "Smith won."]`.
pub fn extract_structure(body: &str) -> Result<ArticleStructure> {
    if body.trim().is_empty() {
        return Err(Error::Invalid("article body is empty".into()));
    }
    let first_paragraph = first_paragraph(body);
    let sentences = split_sentences(&first_paragraph);
    debug_assert!(!sentences.is_empty());
    Ok(ArticleStructure {
        first_paragraph,
        sentences,
    })
}

fn first_paragraph(body: &str) -> String {
    let mut lines = Vec::new();
    for line in body.lines() {
        if line.trim().is_empty() {
            if lines.is_empty() {
                continue;
            }
            break;
        }
        lines.push(line);
    }
    lines.join("\n").trim().to_string()
}

fn split_sentences(paragraph: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut chars = paragraph.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !matches!(c, '.' | '?' | '!') {
            continue;
        }
        let boundary = match chars.peek() {
            None => true,
            Some(&(_, next)) => next.is_whitespace(),
        };
        if boundary {
            let end = i + c.len_utf8();
            push_trimmed(&mut sentences, &paragraph[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut sentences, &paragraph[start..]);
    sentences
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;

use super::Label;
use crate::error::{Error, Result};

/// One headline with its gold class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledHeadline {
    pub text: String,
    pub label: Label,
}

impl LabeledHeadline {
    pub fn new(text: impl Into<String>, label: Label) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::Invalid("headline text is empty".into()));
        }
        if text.contains(['\n', '\r']) {
            return Err(Error::Invalid("headline text contains a line break".into()));
        }
        Ok(LabeledHeadline { text, label })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub clickbait: usize,
    pub non_clickbait: usize,
}

impl LabelCounts {
    pub fn total(&self) -> usize {
        self.clickbait + self.non_clickbait
    }

    pub fn has_both(&self) -> bool {
        self.clickbait > 0 && self.non_clickbait > 0
    }
}

pub fn label_counts<'a>(data: impl IntoIterator<Item = &'a LabeledHeadline>) -> LabelCounts {
    let mut counts = LabelCounts::default();
    for item in data {
        match item.label {
            Label::Clickbait => counts.clickbait += 1,
            Label::NonClickbait => counts.non_clickbait += 1,
        }
    }
    counts
}

/// Loads a `label<TAB>text` file. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn load_labeled_headlines(path: impl AsRef<Path>) -> Result<Vec<LabeledHeadline>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })?;
    let data = read_labeled_headlines(BufReader::new(file))?;
    let counts = label_counts(&data);
    log::info!(
        "{}: {} clickbait, {} non_clickbait",
        path.display(),
        counts.clickbait,
        counts.non_clickbait
    );
    Ok(data)
}

pub fn read_labeled_headlines(reader: impl BufRead) -> Result<Vec<LabeledHeadline>> {
    let mut data = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let (token, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "expected `label<TAB>text`"))?;
        let label: Label = token.trim().parse().map_err(|token| Error::UnknownLabel {
            line: lineno,
            token,
        })?;
        if text.trim().is_empty() {
            return Err(Error::parse(lineno, "empty headline text"));
        }
        data.push(LabeledHeadline {
            text: text.to_string(),
            label,
        });
    }
    Ok(data)
}

/// Writes records as `0|1<TAB>text`, the inverse of [`read_labeled_headlines`].
pub fn write_labeled_headlines<'a>(
    mut writer: impl Write,
    data: impl IntoIterator<Item = &'a LabeledHeadline>,
) -> Result<()> {
    for item in data {
        writeln!(writer, "{}\t{}", item.label.index(), item.text)?;
    }
    Ok(())
}

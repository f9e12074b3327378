//! Binary model files and word2vec-style text vectors.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! "CBEM1"
//! u32 dim | u64 |V| | u64 buckets | u32 ngram_min | u32 ngram_max
//! u8 use_boundaries | u64 min_count
//! |V| x (u32 byte length, UTF-8 word, u64 count)
//! (|V| + buckets) x dim f32      input matrix, row-major
//! u64 output rows, rows x dim f32 output matrix, row-major
//! ```

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{EmbeddingModel, Matrix};
use crate::error::{Error, Result};
use crate::textproc::{VocabConfig, Vocabulary};

pub const MODEL_MAGIC: &[u8; 5] = b"CBEM1";

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_str(w: &mut impl Write, s: &str) -> Result<()> {
    w.write_u32::<LittleEndian>(s.len() as u32)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

pub(crate) fn read_str(r: &mut impl Read) -> Result<String> {
    let len = r.read_u32::<LittleEndian>()? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::Format("word is not valid UTF-8".into()))
}

pub(crate) fn write_f32s(w: &mut impl Write, values: &[f32]) -> Result<()> {
    let mut buf = Vec::with_capacity(4 * 4096);
    for chunk in values.chunks(4096) {
        buf.clear();
        for v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub(crate) fn read_f32s(r: &mut impl Read, len: usize) -> Result<Vec<f32>> {
    let mut values = vec![0.0f32; len];
    r.read_f32_into::<LittleEndian>(&mut values)?;
    Ok(values)
}

fn to_u32(value: usize, what: &str) -> Result<u32> {
    u32::try_from(value).map_err(|_| Error::Format(format!("{what} does not fit in 32 bits")))
}

pub fn write_model(w: &mut impl Write, model: &EmbeddingModel) -> Result<()> {
    let vocab = model.vocab();
    let c = vocab.config();
    w.write_all(MODEL_MAGIC)?;
    w.write_u32::<LittleEndian>(to_u32(model.dim(), "dimension")?)?;
    w.write_u64::<LittleEndian>(vocab.len() as u64)?;
    w.write_u64::<LittleEndian>(c.buckets as u64)?;
    w.write_u32::<LittleEndian>(to_u32(c.ngram_min, "ngram_min")?)?;
    w.write_u32::<LittleEndian>(to_u32(c.ngram_max, "ngram_max")?)?;
    w.write_u8(c.use_boundaries as u8)?;
    w.write_u64::<LittleEndian>(c.min_count)?;
    for (word, &count) in vocab.words().iter().zip(vocab.counts()) {
        write_str(w, word)?;
        w.write_u64::<LittleEndian>(count)?;
    }
    write_f32s(w, model.input().as_slice())?;
    w.write_u64::<LittleEndian>(model.output().rows() as u64)?;
    write_f32s(w, model.output().as_slice())?;
    Ok(())
}

pub fn read_model(r: &mut impl Read) -> Result<EmbeddingModel> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MODEL_MAGIC {
        return Err(Error::Format("missing CBEM1 header".into()));
    }
    read_model_body(r)
}

fn read_model_body(r: &mut impl Read) -> Result<EmbeddingModel> {
    let dim = r.read_u32::<LittleEndian>()? as usize;
    let words = r.read_u64::<LittleEndian>()? as usize;
    let buckets = r.read_u64::<LittleEndian>()? as usize;
    let ngram_min = r.read_u32::<LittleEndian>()? as usize;
    let ngram_max = r.read_u32::<LittleEndian>()? as usize;
    let use_boundaries = match r.read_u8()? {
        0 => false,
        1 => true,
        other => return Err(Error::Format(format!("bad boundary flag {other}"))),
    };
    let min_count = r.read_u64::<LittleEndian>()?;
    let config = VocabConfig {
        min_count,
        buckets,
        ngram_min,
        ngram_max,
        use_boundaries,
    };
    config
        .validate()
        .map_err(|e| Error::Format(e.to_string()))?;
    if dim == 0 {
        return Err(Error::Format("zero dimension".into()));
    }

    let mut list = Vec::with_capacity(words.min(1 << 20));
    let mut counts = Vec::with_capacity(words.min(1 << 20));
    for _ in 0..words {
        list.push(read_str(r)?);
        counts.push(r.read_u64::<LittleEndian>()?);
    }
    let vocab = Vocabulary::from_parts(list, counts, config)?;
    let rows = vocab.rows();
    let input = Matrix::from_vec(rows, dim, read_f32s(r, rows * dim)?);
    let out_rows = r.read_u64::<LittleEndian>()? as usize;
    let output = Matrix::from_vec(out_rows, dim, read_f32s(r, out_rows * dim)?);
    EmbeddingModel::new(vocab, input, output)
}

pub fn save_model(path: impl AsRef<Path>, model: &EmbeddingModel) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_model(&mut w, model)?;
    w.flush()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    read_model(&mut BufReader::new(open(path.as_ref())?))
}

/// Word-level vectors read from a `count dim` text file.
#[derive(Clone, Debug, PartialEq)]
pub struct PretrainedVectors {
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Matrix,
}

impl PretrainedVectors {
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&i| self.vectors.row(i))
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

/// Writes one `word v1 ... vd` line per vocabulary word, composed as in
/// [`EmbeddingModel::word_vector`]. Floats use the shortest representation
/// that reads back to the same value.
pub fn write_vectors(w: &mut impl Write, model: &EmbeddingModel) -> Result<()> {
    let vocab = model.vocab();
    writeln!(w, "{} {}", vocab.len(), model.dim())?;
    for word in vocab.words() {
        w.write_all(word.as_bytes())?;
        for x in model.word_vector(word) {
            write!(w, " {x}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn export_vectors(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_vectors(&mut w, model)?;
    w.flush()?;
    Ok(())
}

pub fn read_vectors(reader: impl BufRead) -> Result<PretrainedVectors> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `count dim` header"))??;
    let mut fields = header.split_whitespace();
    let mut header_field = || -> Result<usize> {
        fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::parse(1, "header must be `count dim`"))
    };
    let count = header_field()?;
    let dim = header_field()?;
    if dim == 0 {
        return Err(Error::parse(1, "dimension must be positive"));
    }

    let mut words = Vec::with_capacity(count.min(1 << 20));
    let mut index = HashMap::with_capacity(count.min(1 << 20));
    let mut data = Vec::with_capacity(count.min(1 << 20) * dim);
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("non-blank line has a field");
        let before = data.len();
        for f in fields {
            let v: f32 = f
                .parse()
                .map_err(|_| Error::parse(lineno, format!("`{f}` is not a number")))?;
            data.push(v);
        }
        if data.len() - before != dim {
            return Err(Error::parse(
                lineno,
                format!("expected {dim} values, found {}", data.len() - before),
            ));
        }
        if index.insert(word.to_string(), words.len()).is_some() {
            return Err(Error::parse(lineno, format!("duplicate word `{word}`")));
        }
        words.push(word.to_string());
    }
    if words.len() != count {
        return Err(Error::parse(
            1,
            format!("header announces {count} vectors, file has {}", words.len()),
        ));
    }
    let vectors = Matrix::from_vec(words.len(), dim, data);
    Ok(PretrainedVectors {
        words,
        index,
        vectors,
    })
}

pub fn load_vectors(path: impl AsRef<Path>) -> Result<PretrainedVectors> {
    read_vectors(BufReader::new(open(path.as_ref())?))
}

/// Initialization source for a classifier.
#[derive(Clone, Debug)]
pub enum Pretrained {
    /// A full subword model; word and bucket rows are reused.
    Model(EmbeddingModel),
    /// Word-level vectors only.
    Vectors(PretrainedVectors),
}

impl Pretrained {
    pub fn dim(&self) -> usize {
        match self {
            Pretrained::Model(m) => m.dim(),
            Pretrained::Vectors(v) => v.dim(),
        }
    }
}

/// Loads either a binary model (recognized by its magic) or a text vector file.
pub fn load_pretrained(path: impl AsRef<Path>) -> Result<Pretrained> {
    let path = path.as_ref();
    let mut reader = BufReader::new(open(path)?);
    let head = reader.fill_buf()?;
    if head.starts_with(MODEL_MAGIC) {
        Ok(Pretrained::Model(read_model(&mut reader)?))
    } else {
        Ok(Pretrained::Vectors(read_vectors(reader)?))
    }
}

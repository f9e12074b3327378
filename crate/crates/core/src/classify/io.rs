//! Classifier files: `"CBCL1"`, u32 label count, labels as length-prefixed
//! UTF-8, u32 rows, u32 cols, output weights as f32 row-major, then a
//! complete `CBEM1` embedding payload.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::ClassifierModel;
use crate::corpus::Label;
use crate::embed::io::{read_f32s, read_str, write_f32s, write_str};
use crate::embed::{read_model, write_model, Matrix};
use crate::error::{Error, Result};

pub const CLASSIFIER_MAGIC: &[u8; 5] = b"CBCL1";

pub fn write_classifier(w: &mut impl Write, model: &ClassifierModel) -> Result<()> {
    w.write_all(CLASSIFIER_MAGIC)?;
    let labels = model.labels();
    w.write_u32::<LittleEndian>(labels.len() as u32)?;
    for label in labels {
        write_str(w, label.as_str())?;
    }
    let weights = model.weights();
    w.write_u32::<LittleEndian>(weights.rows() as u32)?;
    w.write_u32::<LittleEndian>(weights.cols() as u32)?;
    write_f32s(w, weights.as_slice())?;
    write_model(w, model.embedding())
}

pub fn read_classifier(r: &mut impl Read) -> Result<ClassifierModel> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != CLASSIFIER_MAGIC {
        return Err(Error::Format("missing CBCL1 header".into()));
    }
    let n = r.read_u32::<LittleEndian>()? as usize;
    let mut labels = Vec::with_capacity(n.min(16));
    for _ in 0..n {
        labels.push(read_str(r)?);
    }
    let expected: Vec<&str> = Label::ALL.iter().map(|l| l.as_str()).collect();
    if labels != expected {
        return Err(Error::Format(format!("unsupported label list {labels:?}")));
    }
    let rows = r.read_u32::<LittleEndian>()? as usize;
    let cols = r.read_u32::<LittleEndian>()? as usize;
    let weights = Matrix::from_vec(rows, cols, read_f32s(r, rows * cols)?);
    let embedding = read_model(r)?;
    ClassifierModel::new(embedding, weights)
}

pub fn save_classifier(path: impl AsRef<Path>, model: &ClassifierModel) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_classifier(&mut w, model)?;
    w.flush()?;
    Ok(())
}

pub fn load_classifier(path: impl AsRef<Path>) -> Result<ClassifierModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Open {
        path: path.to_path_buf(),
        source,
    })?;
    read_classifier(&mut BufReader::new(file))
}

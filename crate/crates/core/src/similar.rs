//! Bag-of-words cosine between a headline and the sentences of its
//! article's first paragraph, plus Gaussian kernel density curves.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::corpus::extract_structure;
use crate::error::{Error, Result};
use crate::textproc::tokenize;

/// Term frequencies; absent words count zero.
pub type SparseVector = BTreeMap<String, u32>;

pub fn bow_vector<S: AsRef<str>>(tokens: &[S]) -> SparseVector {
    let mut v = SparseVector::new();
    for t in tokens {
        *v.entry(t.as_ref().to_lowercase()).or_insert(0) += 1;
    }
    v
}

fn squared_norm(v: &SparseVector) -> f64 {
    v.values().map(|&c| (c as f64) * (c as f64)).sum()
}

/// Zero when either side is empty.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .iter()
        .filter_map(|(w, &c)| large.get(w).map(|&d| c as f64 * d as f64))
        .sum();
    (dot / (squared_norm(a) * squared_norm(b)).sqrt()).min(1.0)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Max,
    Mean,
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Aggregation::Max),
            "mean" => Ok(Aggregation::Mean),
            _ => Err(Error::Config(format!(
                "unknown aggregation {s:?} (expected max or mean)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Similarity {
    pub value: f64,
    /// The headline had no tokens; `value` is 0.
    pub empty_headline: bool,
}

/// Cosine of the headline against each first-paragraph sentence, reduced by `mode`.
pub fn headline_body_similarity(
    headline: &str,
    body: &str,
    mode: Aggregation,
) -> Result<Similarity> {
    let structure = extract_structure(body)?;
    let head = bow_vector(&tokenize(headline));
    if head.is_empty() {
        return Ok(Similarity {
            value: 0.0,
            empty_headline: true,
        });
    }
    let scores: Vec<f64> = structure
        .sentences
        .iter()
        .map(|s| cosine(&head, &bow_vector(&tokenize(s))))
        .collect();
    let value = match mode {
        Aggregation::Max => scores.iter().copied().fold(0.0, f64::max),
        Aggregation::Mean => scores.iter().sum::<f64>() / scores.len() as f64,
    };
    Ok(Similarity {
        value,
        empty_headline: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityCurve {
    /// Trapezoidal integral of the density over the grid.
    pub fn mass(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

pub fn gaussian_kde_at(values: &[f64], bandwidth: f64, x: f64) -> f64 {
    let norm = 1.0 / (values.len() as f64 * bandwidth * (2.0 * PI).sqrt());
    values
        .iter()
        .map(|&v| {
            let u = (x - v) / bandwidth;
            (-0.5 * u * u).exp()
        })
        .sum::<f64>()
        * norm
}

/// Scott's rule: sample standard deviation times `n^(-1/5)`.
pub fn scott_bandwidth(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt() * n.powf(-0.2)
}

/// Gaussian KDE on `grid_size` evenly spaced points over `[min - 3h, max + 3h]`.
pub fn density_estimate(values: &[f64], grid_size: usize) -> Result<DensityCurve> {
    if values.len() < 2 {
        return Err(Error::Invalid(
            "density estimate needs at least 2 values; use a histogram instead".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid(
            "density estimate input contains non-finite values".into(),
        ));
    }
    if grid_size < 2 {
        return Err(Error::Config("grid size must be at least 2".into()));
    }
    let h = scott_bandwidth(values);
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Invalid(
            "values have zero variance; use a histogram instead".into(),
        ));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let step = (hi - lo) / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size).map(|i| lo + step * i as f64).collect();
    let density = grid
        .iter()
        .map(|&x| gaussian_kde_at(values, h, x))
        .collect();
    Ok(DensityCurve {
        grid,
        density,
        bandwidth: h,
    })
}

//! Rank statistics: average ranks, Spearman correlation, and partial rank
//! correlation with t-test p-values.

use std::fmt;

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Output residual norms below this fraction of the centered norm count as
/// fully explained by the other parameters.
const EXPLAINED_TOLERANCE: f64 = 1e-10;

/// 1-based ranks; tied values share the average of their positions.
pub fn rank(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

fn centered(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cosine of two centered vectors; `None` if either is zero.
fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let (na, nb) = (dot(a, a).sqrt(), dot(b, b).sqrt());
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Spearman rank correlation; `None` when either input is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    cosine(&centered(&rank(x)), &centered(&rank(y)))
}

/// Orthonormal basis of the centered columns, dropping dependent ones.
fn orthonormal_basis(columns: &[&Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
    for col in columns {
        let mut v = (*col).clone();
        let norm0 = dot(&v, &v).sqrt();
        for q in &basis {
            let c = dot(&v, q);
            v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
        let norm = dot(&v, &v).sqrt();
        if norm > EXPLAINED_TOLERANCE * norm0 && norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for q in basis {
        let c = dot(&r, q);
        r.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Significance {
    NotSignificant,
    P05,
    P01,
    P001,
}

impl Significance {
    pub fn from_p(p: f64) -> Self {
        if p < 0.001 {
            Significance::P001
        } else if p < 0.01 {
            Significance::P01
        } else if p < 0.05 {
            Significance::P05
        } else {
            Significance::NotSignificant
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            Significance::P001 => "***",
            Significance::P01 => "**",
            Significance::P05 => "*",
            Significance::NotSignificant => "ns",
        }
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.stars())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub coefficient: f64,
    pub p_value: f64,
}

impl Correlation {
    pub fn significance(&self) -> Significance {
        Significance::from_p(self.p_value)
    }
}

/// Two-sided p-value of a correlation coefficient with `df` degrees of
/// freedom.
pub fn correlation_p_value(r: f64, df: f64) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Partial rank correlation of each column of `samples` (rows are
/// observations) with `output`, controlling for the other columns.
///
/// A constant parameter or output column yields `None`. When the other
/// parameters explain the output ranks exactly, no partial association
/// remains and the coefficient is 0. Requires more rows than columns + 2.
pub fn prcc(samples: &[Vec<f64>], output: &[f64]) -> Vec<Option<Correlation>> {
    let n = samples.len();
    let k = samples.first().map_or(0, Vec::len);
    assert_eq!(output.len(), n, "one output per sample row");
    assert!(n > k + 2, "need more than k + 2 samples");
    let df = (n - 2 - (k - 1)) as f64;

    let columns: Vec<Vec<f64>> = (0..k)
        .map(|j| centered(&rank(&samples.iter().map(|r| r[j]).collect::<Vec<_>>())))
        .collect();
    let y = centered(&rank(output));
    let y_norm = dot(&y, &y).sqrt();

    (0..k)
        .map(|j| {
            let x_norm = dot(&columns[j], &columns[j]).sqrt();
            if x_norm == 0.0 || y_norm == 0.0 {
                return None;
            }
            let others: Vec<&Vec<f64>> = columns
                .iter()
                .enumerate()
                .filter_map(|(i, c)| (i != j).then_some(c))
                .collect();
            let basis = orthonormal_basis(&others);
            let rx = residual(&columns[j], &basis);
            let ry = residual(&y, &basis);
            let rx_norm = dot(&rx, &rx).sqrt();
            let ry_norm = dot(&ry, &ry).sqrt();
            if rx_norm <= EXPLAINED_TOLERANCE * x_norm {
                return None;
            }
            let coefficient = if ry_norm <= EXPLAINED_TOLERANCE * y_norm {
                0.0
            } else {
                cosine(&rx, &ry)?
            };
            Some(Correlation {
                coefficient,
                p_value: correlation_p_value(coefficient, df),
            })
        })
        .collect()
}

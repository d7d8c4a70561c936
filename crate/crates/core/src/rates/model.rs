use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Differential cross-section model.
#[derive(Clone, Default)]
pub enum CrossSectionModel {
    /// Isotropic scattering, |f|² = σ_tot/4π with σ_tot taken from the
    /// physical parameters.
    #[default]
    Constant,
    /// Born approximation: |f_B(-Q, 0)|² depends only on the magnitude of
    /// the momentum transfer.
    Born(BornKernel),
}

impl CrossSectionModel {
    /// Differential cross-section at momentum transfer magnitude `q`.
    #[inline]
    pub fn differential(&self, q: f64, sigma_tot: f64) -> f64 {
        match self {
            CrossSectionModel::Constant => sigma_tot / (4.0 * std::f64::consts::PI),
            CrossSectionModel::Born(k) => k.eval(q),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CrossSectionModel::Constant)
    }
}

impl fmt::Debug for CrossSectionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossSectionModel::Constant => f.write_str("Constant"),
            CrossSectionModel::Born(k) => f.debug_tuple("Born").field(k).finish(),
        }
    }
}

/// |f_B(Q)|² as a function of |Q|. Must be non-negative.
#[derive(Clone)]
pub struct BornKernel {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl BornKernel {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        BornKernel {
            f: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn tabulated(table: TabulatedKernel) -> Self {
        let label = format!("tabulated ({} points)", table.q.len());
        BornKernel::from_fn(label, move |q| table.eval(q))
    }

    #[inline]
    pub fn eval(&self, q: f64) -> f64 {
        (self.f)(q)
    }
}

impl fmt::Debug for BornKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BornKernel({})", self.label)
    }
}

/// Piecewise-linear |f_B(Q)|² from (Q, value) pairs. Outside the tabulated
/// range the end values are held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedKernel {
    q: Vec<f64>,
    value: Vec<f64>,
}

impl TabulatedKernel {
    pub fn new(q: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        if q.len() != value.len() {
            return Err(Error::Decode("column lengths differ".into()));
        }
        if q.len() < 2 {
            return Err(Error::Decode("a kernel table needs at least two rows".into()));
        }
        for (i, (&x, &y)) in q.iter().zip(&value).enumerate() {
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::Decode(format!("row {}: Q must be finite and >= 0", i + 1)));
            }
            if !(y.is_finite() && y >= 0.0) {
                return Err(Error::Decode(format!(
                    "row {}: kernel value must be finite and >= 0",
                    i + 1
                )));
            }
            if i > 0 && x <= q[i - 1] {
                return Err(Error::Decode(format!(
                    "row {}: Q values must be strictly increasing",
                    i + 1
                )));
            }
        }
        Ok(TabulatedKernel { q, value })
    }

    /// Parse a two-column text table. Columns are separated by whitespace or
    /// a comma; blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut q = Vec::new();
        let mut value = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty());
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Decode(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            };
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Decode(format!("line {}: `{s}` is not a number", lineno + 1))
                })
            };
            q.push(parse(a)?);
            value.push(parse(b)?);
        }
        TabulatedKernel::new(q, value)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.q.len();
        if x <= self.q[0] {
            return self.value[0];
        }
        if x >= self.q[n - 1] {
            return self.value[n - 1];
        }
        let i = self.q.partition_point(|&qi| qi <= x) - 1;
        let t = (x - self.q[i]) / (self.q[i + 1] - self.q[i]);
        self.value[i] + t * (self.value[i + 1] - self.value[i])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.q.iter().copied().zip(self.value.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_interpolate() {
        let t = TabulatedKernel::parse("# Q  |f|^2\n0 1\n1, 3\n\n2 3\n").unwrap();
        assert_eq!(t.eval(0.5), 2.0);
        assert_eq!(t.eval(1.5), 3.0);
        assert_eq!(t.eval(-1.0), 1.0);
        assert_eq!(t.eval(10.0), 3.0);
        assert_eq!(t.points().count(), 3);
    }

    #[test]
    fn parse_errors() {
        assert!(TabulatedKernel::parse("0 1\n").is_err());
        assert!(TabulatedKernel::parse("0 1\n0 2\n").is_err());
        assert!(TabulatedKernel::parse("0 1\n1 -2\n").is_err());
        assert!(TabulatedKernel::parse("0 1\n1 x\n").is_err());
        assert!(TabulatedKernel::parse("0 1 2\n1 2\n").is_err());
        assert!(TabulatedKernel::parse("0 1\n1 nan\n").is_err());
    }

    #[test]
    fn born_kernel_wraps_table() {
        let t = TabulatedKernel::new(vec![0.0, 2.0], vec![0.0, 4.0]).unwrap();
        let model = CrossSectionModel::Born(BornKernel::tabulated(t));
        assert_eq!(model.differential(1.0, 123.0), 2.0);
        assert!(!model.is_constant());
        assert!(format!("{model:?}").contains("tabulated"));
    }
}

//! Plain-text persistence for fitted LDA models.
//!
//! ```text
//! d 256
//! m 4
//! c 5
//! mu_reg 1.2345678901234567e-3
//! w
//! <d rows of m values>
//! means
//! <c rows of m values>
//! covariance
//! <m rows of m values>
//! eigenvalues
//! <one row of m values>
//! ```
//!
//! Values are written with 17 significant digits, which is enough for every
//! `f64` to survive the round trip unchanged.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use facerec_core::linalg::Matrix;
use facerec_core::subspace::LdaModel;

use crate::error::{Error, Result};

fn push_row(out: &mut String, row: &[f64]) {
    let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
    out.push_str(&cells.join(" "));
    out.push('\n');
}

pub fn model_to_text(model: &LdaModel) -> String {
    let (d, m, c) = (model.dim(), model.subspace_dim(), model.classes());
    let mut out = String::new();
    let _ = write!(out, "d {d}\nm {m}\nc {c}\nmu_reg {:.16e}\nw\n", model.mu_reg());
    let w = model.projection();
    for i in 0..d {
        push_row(&mut out, w.row(i));
    }
    out.push_str("means\n");
    for mean in model.projected_means() {
        push_row(&mut out, mean);
    }
    out.push_str("covariance\n");
    for i in 0..m {
        push_row(&mut out, model.pooled_covariance().row(i));
    }
    out.push_str("eigenvalues\n");
    push_row(&mut out, model.eigenvalues());
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let (i, text) = self.inner.next().ok_or_else(|| Error::Model {
            line: self.line + 1,
            message: "unexpected end of file".into(),
        })?;
        self.line = i + 1;
        Ok(text)
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Model {
            line: self.line,
            message: message.into(),
        }
    }

    fn header(&mut self, key: &str) -> Result<&'a str> {
        let text = self.next()?;
        match text.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ => Err(self.fail(format!("expected `{key} <value>`"))),
        }
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let v = self.header(key)?;
        v.parse().map_err(|_| self.fail(format!("{key} is not a count: {v:?}")))
    }

    fn marker(&mut self, name: &str) -> Result<()> {
        if self.next()?.trim() != name {
            return Err(self.fail(format!("expected section `{name}`")));
        }
        Ok(())
    }

    fn row(&mut self, len: usize) -> Result<Vec<f64>> {
        let text = self.next()?;
        let row = text
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| self.fail(format!("not a number: {t:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != len {
            return Err(self.fail(format!("expected {len} values, found {}", row.len())));
        }
        Ok(row)
    }

    fn rows(&mut self, n: usize, len: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n * len);
        for _ in 0..n {
            out.extend(self.row(len)?);
        }
        Ok(out)
    }
}

pub fn model_from_text(text: &str) -> Result<LdaModel> {
    let mut r = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let d = r.count("d")?;
    let m = r.count("m")?;
    let c = r.count("c")?;
    let mu = r.header("mu_reg")?;
    let mu_reg: f64 = mu
        .parse()
        .map_err(|_| r.fail(format!("mu_reg is not a number: {mu:?}")))?;
    r.marker("w")?;
    let w = r.rows(d, m)?;
    r.marker("means")?;
    let means = (0..c).map(|_| r.row(m)).collect::<Result<Vec<_>>>()?;
    r.marker("covariance")?;
    let cov = r.rows(m, m)?;
    r.marker("eigenvalues")?;
    let eigenvalues = r.row(m)?;
    let line = r.line;
    let model_err = |e: facerec_core::Error| Error::Model {
        line,
        message: e.to_string(),
    };
    LdaModel::from_parts(
        Matrix::new(d, m, w).map_err(model_err)?,
        eigenvalues,
        means,
        Matrix::new(m, m, cov).map_err(model_err)?,
        mu_reg,
    )
    .map_err(model_err)
}

pub fn save_model(model: &LdaModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, model_to_text(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LdaModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use facerec_core::subspace::{fit_lda, scatter_matrices, LabeledFeatures};

    fn model() -> LdaModel {
        let rows = vec![
            vec![0.1, 1.0, 2.0],
            vec![0.3, 1.1, 2.5],
            vec![4.0, 0.2, 1.0 / 3.0],
            vec![4.4, 0.1, 0.7],
            vec![2.0, 5.0, 1.0],
            vec![2.2, 5.5, 1.2],
        ];
        let data = LabeledFeatures::from_rows(rows, vec![0, 0, 1, 1, 2, 2]).unwrap();
        fit_lda(&scatter_matrices(&data).unwrap(), 1e-3, 2).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        let text = model_to_text(&m);
        assert_eq!(model_from_text(&text).unwrap(), m);
        assert_eq!(model_to_text(&model_from_text(&text).unwrap()), text);
    }

    #[test]
    fn errors_name_the_line() {
        let text = model_to_text(&model());
        let broken = text.replacen("means", "mean", 1);
        let err = model_from_text(&broken).unwrap_err();
        assert!(matches!(err, Error::Model { line: 9, .. }), "{err}");
        let truncated: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(model_from_text(&truncated).is_err());
        assert!(model_from_text("d x\n").is_err());
    }
}

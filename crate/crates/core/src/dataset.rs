//! CSV ingestion: numeric feature columns plus an optional label column.

use std::cmp::Ordering;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Ground-truth class label. Labels that parse as numbers order
/// numerically and precede non-numeric labels, which order as strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    fn numeric(&self) -> Option<f64> {
        self.0.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.total_cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Option<Vec<Label>>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.rows() == 0
    }

    pub fn dims(&self) -> usize {
        self.features.cols()
    }

    pub fn distinct_labels(&self) -> Vec<Label> {
        let mut l: Vec<Label> = self.labels.iter().flatten().cloned().collect();
        l.sort();
        l.dedup();
        l
    }
}

/// A column named by header or by zero-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl ColumnRef {
    /// Digits are read as an index, anything else as a header name.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        }
    }

    fn resolve(&self, header: Option<&[String]>, width: usize) -> Result<usize> {
        let idx = match (self, header) {
            (ColumnRef::Name(name), Some(h)) => h.iter().position(|c| c == name),
            (ColumnRef::Name(name), None) => {
                return Err(Error::Config(format!(
                    "column '{name}' referenced by name but the file has no header"
                )))
            }
            (ColumnRef::Index(i), Some(h)) => {
                // a header literally named like the digits wins
                h.iter().position(|c| c == &i.to_string()).or(Some(*i))
            }
            (ColumnRef::Index(i), None) => Some(*i),
        };
        match idx {
            Some(i) if i < width => Ok(i),
            _ => Err(Error::Config(format!("column {self:?} not found"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadOptions {
    pub label_column: Option<ColumnRef>,
    pub drop_columns: Vec<ColumnRef>,
    pub has_header: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            label_column: None,
            drop_columns: Vec::new(),
            has_header: true,
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_dataset(file, opts)
}

pub fn read_dataset<R: Read>(reader: R, opts: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        Error::Parse {
            line,
            column: 0,
            message: e.to_string(),
        }
    };

    let header: Option<Vec<String>> = if opts.has_header {
        match records.next() {
            Some(r) => Some(r.map_err(csv_err)?.iter().map(str::to_string).collect()),
            None => return Err(Error::InvalidData("empty file".into())),
        }
    } else {
        None
    };

    let mut width = header.as_ref().map(Vec::len);
    let mut label_idx = None;
    let mut keep: Vec<usize> = Vec::new();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;

    for record in records {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Parse {
                line,
                column: record.len().min(w) + 1,
                message: format!("expected {w} fields, found {}", record.len()),
            });
        }
        if rows == 0 {
            let h = header.as_deref();
            label_idx = opts
                .label_column
                .as_ref()
                .map(|c| c.resolve(h, w))
                .transpose()?;
            let mut dropped: Vec<usize> = opts
                .drop_columns
                .iter()
                .map(|c| c.resolve(h, w))
                .collect::<Result<_>>()?;
            dropped.extend(label_idx);
            keep = (0..w).filter(|i| !dropped.contains(i)).collect();
            if keep.is_empty() {
                return Err(Error::InvalidData("no feature columns left".into()));
            }
        }
        for &j in &keep {
            let cell = &record[j];
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(Error::Parse {
                        line,
                        column: j + 1,
                        message: format!("non-numeric or non-finite value '{cell}'"),
                    })
                }
            }
        }
        if let Some(li) = label_idx {
            let cell = &record[li];
            if cell.is_empty() {
                return Err(Error::Parse {
                    line,
                    column: li + 1,
                    message: "missing label".into(),
                });
            }
            labels.push(Label(cell.to_string()));
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::InvalidData("no data rows".into()));
    }
    let feature_names = match &header {
        Some(h) => keep.iter().map(|&j| h[j].clone()).collect(),
        None => keep.iter().map(|j| format!("x{j}")).collect(),
    };
    Ok(Dataset {
        features: Matrix::from_vec(rows, keep.len(), values)?,
        labels: label_idx.map(|_| labels),
        feature_names,
    })
}

/// Write features (and labels, when present, as the last column) as CSV.
pub fn write_dataset<W: std::io::Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut header = dataset.feature_names.clone();
    if dataset.labels.is_some() {
        header.push("label".into());
    }
    w.write_record(&header).map_err(io)?;
    for (i, row) in dataset.features.row_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(l) = &dataset.labels {
            rec.push(l[i].0.clone());
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, opts: &LoadOptions) -> Result<Dataset> {
        read_dataset(text.as_bytes(), opts)
    }

    #[test]
    fn header_and_label() {
        let opts = LoadOptions {
            label_column: Some(ColumnRef::parse("class")),
            ..LoadOptions::default()
        };
        let d = read("a,class,b\n1,x,2\n3,y,4\n5,x,6\n", &opts).unwrap();
        assert_eq!(d.features.shape(), (3, 2));
        assert_eq!(d.features.row(1), &[3.0, 4.0]);
        assert_eq!(d.feature_names, vec!["a", "b"]);
        assert_eq!(
            d.labels.unwrap(),
            vec![Label::from("x"), Label::from("y"), Label::from("x")]
        );
    }

    #[test]
    fn label_by_index_without_header() {
        let opts = LoadOptions {
            label_column: Some(ColumnRef::Index(0)),
            has_header: false,
            ..LoadOptions::default()
        };
        let d = read("3,0.5\n1,0.25\n", &opts).unwrap();
        assert_eq!(d.features.as_slice(), &[0.5, 0.25]);
        assert_eq!(
            d.distinct_labels(),
            vec![Label::from("1"), Label::from("3")]
        );
    }

    #[test]
    fn drop_id_column() {
        let opts = LoadOptions {
            label_column: Some(ColumnRef::parse("phase")),
            drop_columns: vec![ColumnRef::parse("gene")],
            ..LoadOptions::default()
        };
        let d = read(
            "gene,phase,t1,t2\nYAL001,1,0.1,0.2\nYBR002,2,0.3,0.4\n",
            &opts,
        )
        .unwrap();
        assert_eq!(d.features.shape(), (2, 2));
    }

    #[test]
    fn nan_cell_names_position() {
        let err = read("a,b\n1,2\n3,NaN\n", &LoadOptions::default()).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                column: 2,
                message: "non-numeric or non-finite value 'NaN'".into()
            }
        );
    }

    #[test]
    fn ragged_and_empty() {
        let err = read("a,b\n1,2\n3\n", &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(matches!(
            read("", &LoadOptions::default()),
            Err(Error::InvalidData(_))
        ));
        assert!(matches!(
            read("a,b\n", &LoadOptions::default()),
            Err(Error::InvalidData(_))
        ));
        assert!(matches!(
            read("a,b\n1,x\n", &LoadOptions::default()),
            Err(Error::Parse { column: 2, .. })
        ));
    }

    #[test]
    fn label_ordering() {
        let mut l: Vec<Label> = ["b", "10", "9", "a", "14501"]
            .iter()
            .map(|&s| s.into())
            .collect();
        l.sort();
        let s: Vec<&str> = l.iter().map(|l| l.0.as_str()).collect();
        assert_eq!(s, vec!["9", "10", "14501", "a", "b"]);
    }
}

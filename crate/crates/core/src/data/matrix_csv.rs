//! CSV feature matrices: header `class,f0,…,f{n-1}`, one vector per row.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use super::LabeledMatrix;
use crate::error::{Error, Result};

pub fn load_matrix_dataset(path: &Path) -> Result<LabeledMatrix> {
    read_matrix_dataset(File::open(path)?)
}

pub fn read_matrix_dataset<R: Read>(reader: R) -> Result<LabeledMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.get(0) != Some("class") || header.len() < 2 {
        return Err(Error::Parse {
            line: 1,
            message: "header must be `class,f0,f1,...`".into(),
        });
    }
    let width = header.len() - 1;

    let mut classes = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width + 1 {
            return Err(Error::InconsistentWidth {
                line,
                expected: width,
                found: record.len().saturating_sub(1),
            });
        }
        let class = record[0].parse::<u32>().map_err(|e| Error::Parse {
            line,
            message: format!("class `{}`: {e}", &record[0]),
        })?;
        classes.push(class);
        for field in record.iter().skip(1) {
            let v = field.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("feature `{field}`: {e}"),
            })?;
            values.push(v);
        }
    }
    Ok(LabeledMatrix {
        features: DMatrix::from_row_slice(classes.len(), width, &values),
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rows_four_features() {
        let text = "class,f0,f1,f2,f3\n0,1,2,3,4\n1,5,6,7,8\n2,9,10,11,12\n";
        let m = read_matrix_dataset(text.as_bytes()).unwrap();
        assert_eq!(m.features.shape(), (3, 4));
        assert_eq!(m.classes, vec![0, 1, 2]);
        assert_eq!(m.features[(1, 2)], 7.0);
    }

    #[test]
    fn short_row_is_rejected() {
        let text = "class,f0,f1,f2,f3\n0,1,2,3,4\n1,5,6,7\n";
        assert!(matches!(
            read_matrix_dataset(text.as_bytes()),
            Err(Error::InconsistentWidth {
                line: 3,
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn header_only_is_empty() {
        let m = read_matrix_dataset("class,f0,f1\n".as_bytes()).unwrap();
        assert_eq!(m.features.shape(), (0, 2));
        assert!(m.classes.is_empty());
    }

    #[test]
    fn bad_values() {
        assert!(matches!(
            read_matrix_dataset("class,f0\n-1,2\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_matrix_dataset("class,f0\n1,x\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(read_matrix_dataset("label,f0\n".as_bytes()).is_err());
    }
}

//! Delimited-text input.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use nrba_core::dataset::{ColumnSpec, RectDataset, TableBuilder};

use crate::error::{NrbaError, Result};

/// Loads a delimited file with one header row. Empty fields and declared
/// sentinels become missing cells.
pub fn load_table(path: &Path, schema: &[ColumnSpec], delimiter: u8) -> Result<RectDataset> {
    let file = File::open(path).map_err(|e| NrbaError::io(path, e))?;
    read_table(file, path, schema, delimiter)
}

/// As [`load_table`], from any reader; `origin` names the source in errors.
pub fn read_table<R: Read>(
    reader: R,
    origin: &Path,
    schema: &[ColumnSpec],
    delimiter: u8,
) -> Result<RectDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let csv_err = |source| NrbaError::Csv {
        path: origin.to_path_buf(),
        source,
    };
    let data_err = |row, source| NrbaError::Data {
        path: origin.to_path_buf(),
        row,
        source,
    };
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut builder = TableBuilder::new(schema.to_vec(), &header).map_err(|e| data_err(0, e))?;
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record).map_err(csv_err)? {
        let fields: Vec<&str> = record.iter().collect();
        builder
            .push_row(&fields)
            .map_err(|e| data_err(builder.rows() + 1, e))?;
    }
    builder.finish().map_err(|e| data_err(0, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nrba_core::dataset::Role;
    use std::path::PathBuf;

    fn schema() -> Vec<ColumnSpec> {
        vec![
            ColumnSpec::continuous("y", Role::Outcome).with_sentinels(["-9"]),
            ColumnSpec::categorical("g", Role::Subgroup),
        ]
    }

    fn read(text: &str) -> Result<RectDataset> {
        read_table(text.as_bytes(), &PathBuf::from("mem"), &schema(), b',')
    }

    #[test]
    fn sentinels_and_blanks_are_missing() {
        let d = read("y,g\n1.5,a\n-9,b\n,a\n").unwrap();
        assert_eq!(d.n_rows(), 3);
        assert!(d.is_observed(0, 0));
        assert!(!d.is_observed(1, 0));
        assert!(!d.is_observed(2, 0));
        assert!(d.is_observed(2, 1));
    }

    #[test]
    fn ragged_and_bad_cells_name_the_row() {
        let e = read("y,g\n1,a\n2\n").unwrap_err();
        assert!(e.to_string().contains("row 2"), "{e}");
        let e = read("y,g\n1,a\nabc,b\n").unwrap_err();
        assert!(e.to_string().contains("abc"), "{e}");
        assert!(read("y,g,z\n1,a,3\n").is_err());
    }

    #[test]
    fn reload_is_identical() {
        let text = "g,y\nb,2\na,-9\n";
        assert_eq!(read(text).unwrap(), read(text).unwrap());
    }
}

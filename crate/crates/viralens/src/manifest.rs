//! Dataset manifest: one CSV row per infographic.

use std::collections::HashSet;
use std::io::Read;
use std::path::{Path, PathBuf};

use viralens_core::corpus::ManifestRecord;

use crate::error::{Error, Result};

pub const REQUIRED_COLUMNS: [&str; 7] = [
    "id",
    "image_path",
    "title",
    "shares_facebook",
    "shares_pinterest",
    "shares_linkedin",
    "shares_twitter",
];
pub const SIDECAR_COLUMN: &str = "token_sidecar";

pub fn load_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_manifest(file).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse { path: path.to_path_buf(), message },
        other => other,
    })
}

/// Parses manifest CSV. Row numbers in errors count the header as row 1.
pub fn read_manifest<R: Read>(reader: R) -> Result<Vec<ManifestRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 7];
    for (slot, name) in idx.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = column(name).ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }
    let sidecar = column(SIDECAR_COLUMN);

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 2;
        let row = row.map_err(csv_error)?;
        let field = |j: usize| row.get(j).unwrap_or("");
        let shares = |j: usize| -> Result<u64> {
            let raw = field(idx[j]);
            raw.parse::<u64>().map_err(|_| Error::Row {
                row: row_no,
                message: format!("{} must be a nonnegative integer, got {raw:?}", REQUIRED_COLUMNS[j]),
            })
        };
        let id = field(idx[0]).to_string();
        if id.is_empty() {
            return Err(Error::Row { row: row_no, message: "empty id".into() });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::Row { row: row_no, message: format!("duplicate id {id:?}") });
        }
        records.push(ManifestRecord {
            image_path: field(idx[1]).to_string(),
            title: field(idx[2]).to_string(),
            shares_facebook: shares(3)?,
            shares_pinterest: shares(4)?,
            shares_linkedin: shares(5)?,
            shares_twitter: shares(6)?,
            token_sidecar: sidecar.map(|j| field(j).to_string()).filter(|s| !s.is_empty()),
            id,
        });
    }
    Ok(records)
}

/// Resolves a manifest-relative path against the manifest's directory.
pub fn resolve(manifest: &Path, relative: &str) -> PathBuf {
    let p = Path::new(relative);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn csv_error(e: csv::Error) -> Error {
    let message = match e.position() {
        Some(pos) => format!("CSV error at line {}: {e}", pos.line()),
        None => format!("CSV error: {e}"),
    };
    Error::Parse { path: PathBuf::from("<manifest>"), message }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "id,image_path,title,shares_facebook,shares_pinterest,shares_linkedin,shares_twitter,token_sidecar\n";

    #[test]
    fn totals_sum_platforms() {
        let csv = format!("{HEADER}a,a.png,Mobile apps,10,20,30,40,\n");
        let recs = read_manifest(csv.as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].total_shares(), 100);
        assert_eq!(recs[0].token_sidecar, None);
    }

    #[test]
    fn header_only_is_empty() {
        assert!(read_manifest(HEADER.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn negative_share_names_row() {
        let csv = format!("{HEADER}a,a.png,t,1,1,1,1,\nb,b.png,t,1,1,1,-1,\n");
        match read_manifest(csv.as_bytes()).unwrap_err() {
            Error::Row { row, message } => {
                assert_eq!(row, 3);
                assert!(message.contains("shares_twitter"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_named() {
        let csv = "id,image_path,title,shares_facebook,shares_pinterest,shares_twitter\n";
        match read_manifest(csv.as_bytes()).unwrap_err() {
            Error::MissingColumn(c) => assert_eq!(c, "shares_linkedin"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sidecar_column_optional() {
        let csv = "id,image_path,title,shares_facebook,shares_pinterest,shares_linkedin,shares_twitter\nx,x.png,t,0,0,0,0\n";
        assert_eq!(read_manifest(csv.as_bytes()).unwrap()[0].token_sidecar, None);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let csv = format!("{HEADER}a,a.png,t,1,1,1,1,\na,b.png,t,1,1,1,1,\n");
        assert!(matches!(read_manifest(csv.as_bytes()), Err(Error::Row { row: 3, .. })));
    }
}

//! Field file format: a CSV node table (x[,y],value in lattice order) plus a
//! JSON header carrying the grid geometry. Values are written with 17
//! significant digits so files round-trip bit-exactly. The readers never
//! panic on malformed bytes; they are fuzzed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimize::Field;

/// Full round-trip decimal formatting (17 significant digits).
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub dims: usize,
    pub shape: Vec<usize>,
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    pub boundary: String,
}

impl FieldHeader {
    pub fn for_field(field: &Field, alpha: Option<f64>, u: Option<&str>) -> Self {
        let d = field.dims();
        FieldHeader {
            dims: d,
            shape: field.shape()[..d].to_vec(),
            origin: field.origin()[..d].to_vec(),
            spacing: field.spacing()[..d].to_vec(),
            alpha,
            u: u.map(str::to_string),
            boundary: "dirichlet".into(),
        }
    }
}

/// Serialize the node table: header row, then one row per node in lattice
/// order (x-major).
pub fn write_field_csv(field: &Field) -> String {
    let [nx, ny] = field.shape();
    let mut out = String::new();
    if field.dims() == 1 {
        out.push_str("x,value\n");
    } else {
        out.push_str("x,y,value\n");
    }
    for ix in 0..nx {
        for iy in 0..ny {
            let c = field.coord(ix, iy);
            let v = field.values()[field.index(ix, iy)];
            if field.dims() == 1 {
                out.push_str(&format!("{},{}\n", format_f64(c[0]), format_f64(v)));
            } else {
                out.push_str(&format!(
                    "{},{},{}\n",
                    format_f64(c[0]),
                    format_f64(c[1]),
                    format_f64(v)
                ));
            }
        }
    }
    out
}

pub fn write_field_header(header: &FieldHeader) -> Result<String> {
    serde_json::to_string_pretty(header)
        .map_err(|e| Error::Internal(format!("header serialization: {e}")))
}

/// Parse a node-table CSV into (column count, rows). Accepts exactly the
/// format written by [`write_field_csv`]: a header of `x[,y],value` and
/// finite decimal fields.
pub fn parse_field_csv(bytes: &[u8]) -> Result<(usize, Vec<Vec<f64>>)> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| Error::validation("field csv is not valid UTF-8"))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::validation("field csv is empty"))?;
    let cols = match header.trim_end_matches('\r') {
        "x,value" => 2,
        "x,y,value" => 3,
        other => {
            return Err(Error::validation(format!(
                "unexpected csv header '{other}' (expected 'x,value' or 'x,y,value')"
            )))
        }
    };
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(cols);
        for part in line.split(',') {
            let v: f64 = part
                .trim()
                .parse()
                .map_err(|_| Error::validation(format!("line {}: bad number '{part}'", lineno + 2)))?;
            if !v.is_finite() {
                return Err(Error::validation(format!(
                    "line {}: non-finite value",
                    lineno + 2
                )));
            }
            row.push(v);
        }
        if row.len() != cols {
            return Err(Error::validation(format!(
                "line {}: expected {cols} fields, got {}",
                lineno + 2,
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::validation("field csv has no data rows"));
    }
    Ok((cols, rows))
}

/// Parse the JSON header from raw bytes.
pub fn parse_field_header(bytes: &[u8]) -> Result<FieldHeader> {
    let header: FieldHeader = serde_json::from_slice(bytes)
        .map_err(|e| Error::validation(format!("field header: {e}")))?;
    if header.dims != 1 && header.dims != 2 {
        return Err(Error::validation("header dims must be 1 or 2"));
    }
    if header.shape.len() != header.dims
        || header.origin.len() != header.dims
        || header.spacing.len() != header.dims
    {
        return Err(Error::validation(
            "header shape/origin/spacing must match dims",
        ));
    }
    if header.spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
        return Err(Error::validation("header spacing must be positive"));
    }
    if header.origin.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("header origin must be finite"));
    }
    Ok(header)
}

/// Reassemble a [`Field`] from its header and node table. Node coordinates
/// must match the lattice the header describes.
pub fn read_field(header_bytes: &[u8], csv_bytes: &[u8]) -> Result<Field> {
    let header = parse_field_header(header_bytes)?;
    let (cols, rows) = parse_field_csv(csv_bytes)?;
    if cols != header.dims + 1 {
        return Err(Error::validation(format!(
            "csv has {cols} columns but header declares {} dims",
            header.dims
        )));
    }
    let nx = header.shape[0];
    let ny = if header.dims == 2 { header.shape[1] } else { 1 };
    if nx
        .checked_mul(ny)
        .map_or(true, |total| total != rows.len())
    {
        return Err(Error::validation(format!(
            "node count {} does not match shape",
            rows.len()
        )));
    }
    let mut values = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let ix = k / ny;
        let iy = k % ny;
        let want_x = header.origin[0] + ix as f64 * header.spacing[0];
        let tol_x = 1e-9 * (1.0 + want_x.abs());
        if (row[0] - want_x).abs() > tol_x {
            return Err(Error::validation(format!(
                "row {k}: x = {} does not sit on the declared lattice",
                row[0]
            )));
        }
        if header.dims == 2 {
            let want_y = header.origin[1] + iy as f64 * header.spacing[1];
            if (row[1] - want_y).abs() > 1e-9 * (1.0 + want_y.abs()) {
                return Err(Error::validation(format!(
                    "row {k}: y = {} does not sit on the declared lattice",
                    row[1]
                )));
            }
        }
        values.push(row[cols - 1]);
    }
    Field::from_parts(
        header.dims,
        [nx, ny],
        [
            header.origin[0],
            if header.dims == 2 { header.origin[1] } else { 0.0 },
        ],
        [
            header.spacing[0],
            if header.dims == 2 { header.spacing[1] } else { 1.0 },
        ],
        values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_1d() {
        let field = Field::line(-1.0, 1.0, 11, 1.5, 2.5).unwrap();
        let csv = write_field_csv(&field);
        let header = FieldHeader::for_field(&field, Some(1.0), Some("vertical"));
        let header_json = write_field_header(&header).unwrap();
        let back = read_field(header_json.as_bytes(), csv.as_bytes()).unwrap();
        assert_eq!(back.values(), field.values());
        assert_eq!(back.shape(), field.shape());
    }

    #[test]
    fn round_trip_2d() {
        let field = Field::rect([0.0, 1.0], [0.0, 2.0], 5, 7, |x, y| 1.0 + x + y).unwrap();
        let csv = write_field_csv(&field);
        let header = FieldHeader::for_field(&field, None, None);
        let header_json = write_field_header(&header).unwrap();
        let back = read_field(header_json.as_bytes(), csv.as_bytes()).unwrap();
        assert_eq!(back.values(), field.values());
        assert_eq!(back.spacing(), field.spacing());
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(parse_field_csv(b"").is_err());
        assert!(parse_field_csv(b"a,b,c\n1,2,3\n").is_err());
        assert!(parse_field_csv(b"x,value\n1,zebra\n").is_err());
        assert!(parse_field_csv(b"x,value\n1\n").is_err());
        assert!(parse_field_csv(b"x,value\n1,inf\n").is_err());
        assert!(parse_field_csv(b"\xff\xfe").is_err());
    }

    #[test]
    fn header_rejects_bad_geometry() {
        assert!(parse_field_header(br#"{"dims":3,"shape":[2,2,2],"origin":[0,0,0],"spacing":[1,1,1],"boundary":"dirichlet"}"#).is_err());
        assert!(parse_field_header(br#"{"dims":1,"shape":[5],"origin":[0],"spacing":[0],"boundary":"dirichlet"}"#).is_err());
        assert!(parse_field_header(b"{}").is_err());
    }

    #[test]
    fn read_field_checks_lattice_consistency() {
        let field = Field::line(0.0, 1.0, 5, 1.0, 2.0).unwrap();
        let header = FieldHeader::for_field(&field, None, None);
        let header_json = write_field_header(&header).unwrap();
        let bad_csv = "x,value\n0,1\n0.9,1.25\n0.5,1.5\n0.75,1.75\n1,2\n";
        assert!(read_field(header_json.as_bytes(), bad_csv.as_bytes()).is_err());
    }
}

//! MTXE: Matrix Market coordinate files with finite-field metadata carried in
//! structured comments.
//!
//! A structured comment is `"% " key ": " value`, with `key` an ASCII letter
//! followed by letters, digits, `_` or `-`. The keys `Field` and `FieldPoly`
//! declare the field; every other key (such as the `Rows` role tag) is kept as
//! an ordered tag. Lines that do not fit the grammar are ordinary comments, so
//! any plain MTX reader accepts these files unchanged.
//!
//! Values use the base-p integer encoding of [`crate::gf`].

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::gf::{FieldSpec, GfError};
use crate::linalg::MatrixGF;

pub const BANNER: &str = "%%MatrixMarket matrix coordinate integer general";
pub const FIELD_KEY: &str = "Field";
pub const FIELD_POLY_KEY: &str = "FieldPoly";
pub const ROLE_KEY: &str = "Rows";

const STRIPPED_COMMENT: &str = "% plain Matrix Market export, finite-field metadata removed";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MtxeError {
    #[error("missing or malformed %%MatrixMarket banner: {0:?}")]
    BadBanner(String),
    #[error("unsupported Matrix Market qualifier {0:?} (need matrix coordinate integer|pattern general)")]
    UnsupportedQualifier(String),
    #[error("line {line}: entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        line: usize,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("line {line}: duplicate entry ({row}, {col})")]
    DuplicateEntry { line: usize, row: usize, col: usize },
    #[error("entry {entry}: value {value} is not an element of GF({q})")]
    ValueOutOfField { entry: usize, value: String, q: u32 },
    #[error("no field declared in the file and none supplied")]
    UnknownField,
    #[error("bad field declaration: {0}")]
    BadFieldDecl(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueType {
    Integer,
    Pattern,
}

impl ValueType {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::Integer => "integer",
            ValueType::Pattern => "pattern",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub object: String,
    pub format: String,
    pub value_type: ValueType,
    pub symmetry: String,
}

impl Default for Header {
    fn default() -> Self {
        Header {
            object: "matrix".into(),
            format: "coordinate".into(),
            value_type: ValueType::Integer,
            symmetry: "general".into(),
        }
    }
}

/// Field declared by `% Field:` and optionally `% FieldPoly:`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub q: u32,
    /// Coefficients constant term first, leading 1 included.
    pub modulus: Option<Vec<u32>>,
}

impl FieldDecl {
    pub fn of(field: &FieldSpec) -> Self {
        FieldDecl {
            q: field.q(),
            modulus: (field.m() > 1).then(|| field.modulus().to_vec()),
        }
    }

    pub fn to_field(&self) -> Result<FieldSpec, GfError> {
        FieldSpec::new(self.q, self.modulus.as_deref())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    /// 1-based.
    pub row: usize,
    /// 1-based.
    pub col: usize,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MtxeDocument {
    pub header: Header,
    pub field_decl: Option<FieldDecl>,
    pub tags: Vec<(String, String)>,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub entries: Vec<Entry>,
    /// Set by [`parse_mtxe`] when an override replaced a different declared field.
    pub field_overridden: bool,
}

impl MtxeDocument {
    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Splits a structured comment into `(key, value)`, or `None` for an
/// ordinary comment.
pub fn structured_comment(line: &str) -> Option<(&str, &str)> {
    let rest = line.strip_prefix("% ")?;
    let (key, value) = rest.split_once(": ")?;
    let mut chars = key.chars();
    let first = chars.next()?;
    if !first.is_ascii_alphabetic()
        || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return None;
    }
    Some((key, value))
}

fn parse_field_value(value: &str) -> Result<u32, MtxeError> {
    let bad = || MtxeError::BadFieldDecl(format!("Field: {value}"));
    let inner = value
        .trim()
        .strip_prefix("GF(")
        .and_then(|v| v.strip_suffix(')'))
        .ok_or_else(bad)?;
    match inner.split_once('^') {
        Some((p, m)) => {
            let p: u32 = p.trim().parse().map_err(|_| bad())?;
            let m: u32 = m.trim().parse().map_err(|_| bad())?;
            p.checked_pow(m).ok_or_else(bad)
        }
        None => inner.trim().parse().map_err(|_| bad()),
    }
}

fn parse_poly_value(value: &str) -> Result<Vec<u32>, MtxeError> {
    value
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<u32>()
                .map_err(|_| MtxeError::BadFieldDecl(format!("FieldPoly: {value}")))
        })
        .collect()
}

fn parse_header(line: &str) -> Result<Header, MtxeError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 5 || !tokens[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(MtxeError::BadBanner(line.to_string()));
    }
    let lower: Vec<String> = tokens[1..].iter().map(|t| t.to_ascii_lowercase()).collect();
    if lower[0] != "matrix" {
        return Err(MtxeError::UnsupportedQualifier(tokens[1].into()));
    }
    if lower[1] != "coordinate" {
        return Err(MtxeError::UnsupportedQualifier(tokens[2].into()));
    }
    let value_type = match lower[2].as_str() {
        "integer" => ValueType::Integer,
        "pattern" => ValueType::Pattern,
        _ => return Err(MtxeError::UnsupportedQualifier(tokens[3].into())),
    };
    if lower[3] != "general" {
        return Err(MtxeError::UnsupportedQualifier(tokens[4].into()));
    }
    Ok(Header {
        object: lower[0].clone(),
        format: lower[1].clone(),
        value_type,
        symmetry: lower[3].clone(),
    })
}

fn parse_count(token: &str, line: usize, what: &str) -> Result<usize, MtxeError> {
    token.parse().map_err(|_| MtxeError::Malformed {
        line,
        msg: format!("bad {what} {token:?}"),
    })
}

/// Parses the text without materializing a matrix; no field is required.
pub fn parse_document(text: &str) -> Result<MtxeDocument, MtxeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (_, banner) = lines
        .next()
        .ok_or_else(|| MtxeError::BadBanner(String::new()))?;
    let header = parse_header(banner)?;

    let mut field_q = None;
    let mut field_poly = None;
    let mut tags = Vec::new();
    let mut size = None;
    for (no, line) in lines.by_ref() {
        if line.starts_with('%') {
            match structured_comment(line) {
                Some((FIELD_KEY, v)) => field_q = Some(parse_field_value(v)?),
                Some((FIELD_POLY_KEY, v)) => field_poly = Some(parse_poly_value(v)?),
                Some((k, v)) => tags.push((k.to_string(), v.to_string())),
                None => {}
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(MtxeError::Malformed {
                line: no,
                msg: "size line must be `rows cols nnz`".into(),
            });
        }
        size = Some((
            parse_count(tokens[0], no, "row count")?,
            parse_count(tokens[1], no, "column count")?,
            parse_count(tokens[2], no, "entry count")?,
        ));
        break;
    }
    let (rows, cols, nnz) = size.ok_or(MtxeError::Malformed {
        line: text.lines().count(),
        msg: "missing size line".into(),
    })?;

    let field_decl = match (field_q, field_poly) {
        (Some(q), modulus) => Some(FieldDecl { q, modulus }),
        (None, Some(_)) => {
            return Err(MtxeError::BadFieldDecl("FieldPoly without Field".into()));
        }
        (None, None) => None,
    };

    let mut entries = Vec::with_capacity(nnz);
    let mut seen = HashSet::with_capacity(nnz);
    for (no, line) in lines {
        if line.starts_with('%') || line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let expected = match header.value_type {
            ValueType::Integer => 3,
            ValueType::Pattern => 2,
        };
        if tokens.len() != expected {
            return Err(MtxeError::Malformed {
                line: no,
                msg: format!("expected {expected} fields per entry"),
            });
        }
        let row = parse_count(tokens[0], no, "row index")?;
        let col = parse_count(tokens[1], no, "column index")?;
        if row == 0 || col == 0 || row > rows || col > cols {
            return Err(MtxeError::IndexOutOfRange {
                line: no,
                row,
                col,
                rows,
                cols,
            });
        }
        let value = match header.value_type {
            ValueType::Pattern => 1,
            ValueType::Integer => tokens[2].parse::<u64>().map_err(|_| {
                if tokens[2].parse::<i64>().is_ok() {
                    MtxeError::ValueOutOfField {
                        entry: entries.len() + 1,
                        value: tokens[2].into(),
                        q: field_decl.as_ref().map_or(0, |d| d.q),
                    }
                } else {
                    MtxeError::Malformed {
                        line: no,
                        msg: format!("bad value {:?}", tokens[2]),
                    }
                }
            })?,
        };
        if !seen.insert((row, col)) {
            return Err(MtxeError::DuplicateEntry { line: no, row, col });
        }
        entries.push(Entry { row, col, value });
    }
    if entries.len() != nnz {
        return Err(MtxeError::Malformed {
            line: text.lines().count(),
            msg: format!("size line announces {nnz} entries, found {}", entries.len()),
        });
    }
    Ok(MtxeDocument {
        header,
        field_decl,
        tags,
        rows,
        cols,
        nnz,
        entries,
        field_overridden: false,
    })
}

/// Parses an MTXE (or plain MTX) file into a dense matrix. `field_override`
/// takes precedence over a declared field; a conflict sets
/// [`MtxeDocument::field_overridden`].
pub fn parse_mtxe(
    text: &str,
    field_override: Option<&FieldSpec>,
) -> Result<(MtxeDocument, MatrixGF), MtxeError> {
    let mut doc = parse_document(text)?;
    let declared = doc
        .field_decl
        .as_ref()
        .map(FieldDecl::to_field)
        .transpose()?;
    let field = match (field_override, declared) {
        (Some(over), Some(decl)) => {
            doc.field_overridden = *over != decl;
            over.clone()
        }
        (Some(over), None) => over.clone(),
        (None, Some(decl)) => decl,
        (None, None) => return Err(MtxeError::UnknownField),
    };
    let matrix = materialize(&doc, &field)?;
    Ok((doc, matrix))
}

fn materialize(doc: &MtxeDocument, field: &FieldSpec) -> Result<MatrixGF, MtxeError> {
    let mut m = MatrixGF::zeros(field, doc.rows, doc.cols);
    for (i, e) in doc.entries.iter().enumerate() {
        let v = field
            .elem(e.value)
            .map_err(|_| MtxeError::ValueOutOfField {
                entry: i + 1,
                value: e.value.to_string(),
                q: field.q(),
            })?;
        m.set(e.row - 1, e.col - 1, v);
    }
    Ok(m)
}

/// Canonical MTXE text for a matrix. Tags are written in order after the field
/// declaration; tags using the reserved field keys are skipped.
pub fn write_mtxe(m: &MatrixGF, tags: &[(String, String)]) -> String {
    let field = m.field();
    let mut out = String::new();
    out.push_str(BANNER);
    out.push('\n');
    let _ = writeln!(out, "% {FIELD_KEY}: GF({})", field.q());
    if field.m() > 1 {
        let coeffs: Vec<String> = field.modulus().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "% {FIELD_POLY_KEY}: {}", coeffs.join(","));
    }
    for (k, v) in tags {
        if k == FIELD_KEY || k == FIELD_POLY_KEY {
            continue;
        }
        let _ = writeln!(out, "% {k}: {}", v.replace(['\n', '\r'], " "));
    }
    let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz());
    for r in 0..m.nrows() {
        for (c, x) in m.row(r).iter().enumerate() {
            if !x.is_zero() {
                let _ = writeln!(out, "{} {} {}", r + 1, c + 1, x);
            }
        }
    }
    out
}

/// Plain Matrix Market text with the same data block and no structured
/// comments.
pub fn strip_to_mtx(doc: &MtxeDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "%%MatrixMarket matrix coordinate {} general",
        doc.header.value_type.as_str()
    );
    out.push_str(STRIPPED_COMMENT);
    out.push('\n');
    let _ = writeln!(out, "{} {} {}", doc.rows, doc.cols, doc.nnz);
    for e in &doc.entries {
        match doc.header.value_type {
            ValueType::Integer => {
                let _ = writeln!(out, "{} {} {}", e.row, e.col, e.value);
            }
            ValueType::Pattern => {
                let _ = writeln!(out, "{} {}", e.row, e.col);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn gf(q: u32) -> FieldSpec {
        make_field(q, None).unwrap()
    }

    const GF2_FILE: &str = "%%MatrixMarket matrix coordinate integer general\n\
        % Field: GF(2)\n\
        2 3 3\n\
        1 1 1\n\
        1 2 1\n\
        2 3 1\n";

    #[test]
    fn parse_examples() {
        let (doc, m) = parse_mtxe(GF2_FILE, None).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(
            doc.field_decl,
            Some(FieldDecl {
                q: 2,
                modulus: None
            })
        );

        let plain = GF2_FILE.replace("% Field: GF(2)\n", "");
        let (doc, m2) = parse_mtxe(&plain, Some(&gf(2))).unwrap();
        assert_eq!(m2, m);
        assert!(!doc.field_overridden);
        assert_eq!(
            parse_mtxe(&plain, None).unwrap_err(),
            MtxeError::UnknownField
        );
    }

    #[test]
    fn gf9_without_poly_uses_default_modulus() {
        let text = "%%MatrixMarket matrix coordinate integer general\n% Field: GF(9)\n1 2 2\n1 1 8\n1 2 3\n";
        let (_, m) = parse_mtxe(text, None).unwrap();
        assert_eq!(m.field(), &gf(9));
        assert_eq!(m.field().modulus(), gf(9).modulus());
        assert_eq!(m.to_rows(), vec![vec![8, 3]]);
    }

    #[test]
    fn override_conflict_is_flagged() {
        let (doc, m) = parse_mtxe(GF2_FILE, Some(&gf(3))).unwrap();
        assert!(doc.field_overridden);
        assert_eq!(m.field().q(), 3);
    }

    #[test]
    fn write_layout() {
        let m = MatrixGF::identity(&gf(2), 2);
        let text = write_mtxe(&m, &[("Rows".into(), "HX".into())]);
        assert_eq!(
            text,
            "%%MatrixMarket matrix coordinate integer general\n% Field: GF(2)\n% Rows: HX\n2 2 2\n1 1 1\n2 2 1\n"
        );
        let z = MatrixGF::zeros(&gf(2), 3, 4);
        assert!(write_mtxe(&z, &[]).ends_with("\n3 4 0\n"));

        let f4 = gf(4);
        let m4 = MatrixGF::from_rows(&f4, 2, &[[3, 0], [0, 2]]).unwrap();
        assert_eq!(
            write_mtxe(&m4, &[]),
            "%%MatrixMarket matrix coordinate integer general\n% Field: GF(4)\n% FieldPoly: 1,1,1\n2 2 2\n1 1 3\n2 2 2\n"
        );
    }

    #[test]
    fn round_trip_keeps_field_and_tags() {
        let f = make_field(9, Some(&[2, 2, 1])).unwrap();
        let m = MatrixGF::from_rows(&f, 3, &[[0, 8, 4], [1, 0, 0]]).unwrap();
        let tags = vec![
            ("Rows".to_string(), "HZ".to_string()),
            ("Source".into(), "test: x".into()),
        ];
        let text = write_mtxe(&m, &tags);
        let (doc, back) = parse_mtxe(&text, None).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.field().modulus(), &[2, 2, 1]);
        assert_eq!(doc.tags, tags);
        assert_eq!(doc.tag("Rows"), Some("HZ"));
    }

    #[test]
    fn structured_grammar() {
        assert_eq!(
            structured_comment("% Field: GF(2)"),
            Some(("Field", "GF(2)"))
        );
        assert_eq!(structured_comment("% Rows: HX"), Some(("Rows", "HX")));
        assert_eq!(structured_comment("%Field: GF(2)"), None);
        assert_eq!(structured_comment("%  Field: GF(2)"), None);
        assert_eq!(structured_comment("% Field:GF(2)"), None);
        assert_eq!(structured_comment("% Generated by: me"), None);
        assert_eq!(structured_comment("% 3d: x"), None);
        assert_eq!(structured_comment("% just a note"), None);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_document("hello\n1 1 0\n"),
            Err(MtxeError::BadBanner(_))
        ));
        assert!(matches!(parse_document(""), Err(MtxeError::BadBanner(_))));
        for banner in [
            "%%MatrixMarket matrix array integer general",
            "%%MatrixMarket matrix coordinate real general",
            "%%MatrixMarket matrix coordinate integer symmetric",
            "%%MatrixMarket vector coordinate integer general",
        ] {
            let text = format!("{banner}\n1 1 0\n");
            assert!(
                matches!(
                    parse_document(&text),
                    Err(MtxeError::UnsupportedQualifier(_))
                ),
                "{banner}"
            );
        }
        let out_of_range = GF2_FILE.replace("2 3 1\n", "3 1 1\n");
        assert!(matches!(
            parse_mtxe(&out_of_range, None),
            Err(MtxeError::IndexOutOfRange { row: 3, .. })
        ));
        let dup = GF2_FILE.replace("2 3 1\n", "1 2 1\n");
        assert!(matches!(
            parse_mtxe(&dup, None),
            Err(MtxeError::DuplicateEntry { row: 1, col: 2, .. })
        ));
        let big = GF2_FILE.replace("2 3 1\n", "2 3 2\n");
        assert!(matches!(
            parse_mtxe(&big, None),
            Err(MtxeError::ValueOutOfField { q: 2, .. })
        ));
        let neg = GF2_FILE.replace("2 3 1\n", "2 3 -1\n");
        assert!(matches!(
            parse_mtxe(&neg, None),
            Err(MtxeError::ValueOutOfField { .. })
        ));
        let short = GF2_FILE.replace("2 3 1\n", "");
        assert!(matches!(
            parse_mtxe(&short, None),
            Err(MtxeError::Malformed { .. })
        ));
        let bad_field = GF2_FILE.replace("GF(2)", "GF(6)");
        assert!(matches!(
            parse_mtxe(&bad_field, None),
            Err(MtxeError::Field(GfError::NotPrimePower(6)))
        ));
        let reducible = GF2_FILE.replace("GF(2)\n", "GF(4)\n% FieldPoly: 1,0,1\n");
        assert!(matches!(
            parse_mtxe(&reducible, None),
            Err(MtxeError::Field(GfError::ReducibleModulus(..)))
        ));
    }

    #[test]
    fn pattern_files_read_as_ones() {
        let text =
            "%%MatrixMarket matrix coordinate pattern general\n% Field: GF(3)\n2 2 2\n1 2\n2 1\n";
        let (doc, m) = parse_mtxe(text, None).unwrap();
        assert_eq!(m.to_rows(), vec![vec![0, 1], vec![1, 0]]);
        let stripped = strip_to_mtx(&doc);
        assert!(stripped.starts_with("%%MatrixMarket matrix coordinate pattern general\n"));
        assert!(stripped.ends_with("2 2 2\n1 2\n2 1\n"));
    }

    #[test]
    fn strip_keeps_data_block() {
        let f4 = gf(4);
        let m = MatrixGF::from_rows(&f4, 3, &[[3, 0, 1], [0, 2, 0]]).unwrap();
        let text = write_mtxe(&m, &[("Rows".into(), "HX".into())]);
        let doc = parse_document(&text).unwrap();
        let plain = strip_to_mtx(&doc);
        assert_eq!(
            plain
                .lines()
                .filter(|l| structured_comment(l).is_some())
                .count(),
            0
        );
        let data = |t: &str| {
            t.lines()
                .filter(|l| !l.starts_with('%'))
                .map(str::to_string)
                .collect::<Vec<_>>()
        };
        assert_eq!(data(&plain), data(&text));
        let (_, back) = parse_mtxe(&plain, Some(&f4)).unwrap();
        assert_eq!(back, m);
    }
}

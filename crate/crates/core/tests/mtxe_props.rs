mod common;

use proptest::prelude::*;
use qdist::codes::{gen_named, gen_toric};
use qdist::mtxe::{parse_document, parse_mtxe, strip_to_mtx, write_mtxe, FieldDecl, MtxeError};
use qdist::{AnyCode, FieldSpec, MatrixGF};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![2u32, 3, 4, 5, 8, 9, 27])
        .prop_map(|q| FieldSpec::new(q, None).unwrap())
}

fn matrix() -> impl Strategy<Value = MatrixGF> {
    (field(), 0usize..7, 1usize..9, any::<u64>()).prop_map(|(f, r, c, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        common::random_matrix(&f, r, c, &mut rng)
    })
}

fn tag_strategy() -> impl Strategy<Value = Vec<(String, String)>> {
    prop::collection::vec(("[A-Za-z][A-Za-z0-9_-]{0,6}", "[ -~]{0,12}"), 0..4).prop_map(|v| {
        v.into_iter()
            .filter(|(k, _)| k != "Field" && k != "FieldPoly")
            .map(|(k, v)| (k, v.trim().to_string()))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn write_parse_round_trip(m in matrix(), tags in tag_strategy()) {
        let text = write_mtxe(&m, &tags);
        let (doc, back) = parse_mtxe(&text, None).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(doc.field_decl, Some(FieldDecl::of(m.field())));
        prop_assert_eq!(doc.tags, tags.clone());
        prop_assert_eq!(write_mtxe(&m, &tags), text.clone());
        prop_assert!(common::validate_mtx(&text).is_ok());
    }

    #[test]
    fn plain_comments_are_ignored(m in matrix(), junk in prop::collection::vec((0usize..6, "[ -~]{0,20}"), 0..5)) {
        let text = write_mtxe(&m, &[("Rows".into(), "HX".into())]);
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let size_line = lines.iter().position(|l| !l.starts_with('%')).unwrap();
        for (pos, body) in junk {
            // "%%" or "%x" never matches the structured-comment grammar
            let line = format!("%%{body}");
            let at = 1 + pos % size_line;
            lines.insert(at, line);
        }
        let mut noisy = lines.join("\n");
        noisy.push('\n');
        let (_, back) = parse_mtxe(&noisy, None).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn strip_keeps_data_block(m in matrix()) {
        let text = write_mtxe(&m, &[("Rows".into(), "S".into())]);
        let stripped = strip_to_mtx(&parse_document(&text).unwrap());
        prop_assert!(!stripped.contains("% Field"));
        prop_assert_eq!(common::validate_mtx(&stripped).unwrap(), common::validate_mtx(&text).unwrap());
        let (_, back) = parse_mtxe(&stripped, Some(m.field())).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn fixtures_are_plain_matrix_market() {
    let mut written = Vec::new();
    for q in [2, 3, 4] {
        let f = FieldSpec::new(q, None).unwrap();
        let t = gen_toric(3, &f).unwrap();
        written.push(write_mtxe(t.hx(), &[]));
        written.push(write_mtxe(t.hz(), &[]));
        if let AnyCode::Stab(s) = gen_named("five_qubit", &f).unwrap() {
            written.push(write_mtxe(
                s.s(),
                &[("Layout".into(), "interleaved".into())],
            ));
        }
    }
    for text in written {
        common::validate_mtx(&text).unwrap();
    }
}

#[test]
fn pattern_files_read_as_ones() {
    let text =
        "%%MatrixMarket matrix coordinate pattern general\n% Field: GF(3)\n2 3 2\n1 1\n2 3\n";
    let (_, m) = parse_mtxe(text, None).unwrap();
    assert_eq!(m.to_rows(), vec![vec![1, 0, 0], vec![0, 0, 1]]);
    common::validate_mtx(text).unwrap();
}

#[test]
fn parse_errors() {
    let bad = |t: &str| parse_mtxe(t, Some(&FieldSpec::binary())).unwrap_err();
    assert!(matches!(
        bad("%%MatrixMarket matrix array integer general\n1 1\n1\n"),
        MtxeError::UnsupportedQualifier(_) | MtxeError::BadBanner(_)
    ));
    assert!(matches!(bad("hello\n"), MtxeError::BadBanner(_)));
    assert!(matches!(
        bad("%%MatrixMarket matrix coordinate integer general\n2 2 1\n3 1 1\n"),
        MtxeError::IndexOutOfRange { .. }
    ));
    assert!(matches!(
        bad("%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 1 1\n1 1 1\n"),
        MtxeError::DuplicateEntry { .. }
    ));
    assert!(matches!(
        bad("%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 1 2\n"),
        MtxeError::ValueOutOfField { .. }
    ));
    assert!(matches!(
        parse_mtxe(
            "%%MatrixMarket matrix coordinate integer general\n1 1 1\n1 1 1\n",
            None
        )
        .unwrap_err(),
        MtxeError::UnknownField
    ));
}

#[test]
fn declared_modulus_is_honored() {
    // not the default modulus for GF(9)
    let f = FieldSpec::new(9, Some(&[2, 2, 1])).unwrap();
    let m = MatrixGF::from_rows(&f, 2, &[[3u32, 7]]).unwrap();
    let text = write_mtxe(&m, &[]);
    assert!(text.contains("% FieldPoly: 2,2,1\n"));
    let (doc, back) = parse_mtxe(&text, None).unwrap();
    assert_eq!(back.field(), &f);
    assert_eq!(doc.field_decl.unwrap().modulus, Some(vec![2, 2, 1]));
}

//! Replays the fuzz corpus seeds through the parsers with the same
//! round-trip properties the fuzz targets assert.

use std::fs;
use std::path::PathBuf;

use gabench::harness::{read_records, write_records};
use gabench::{CrossoverKind, GrungeLandscape, MinimaCatalog};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn landscape_seeds() {
    let mut parsed = 0;
    for (name, data) in seeds("landscape") {
        if let Ok(l) = std::str::from_utf8(&data).unwrap().parse::<GrungeLandscape>() {
            assert_eq!(l.to_text().parse::<GrungeLandscape>().unwrap(), l, "{name}");
            parsed += 1;
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn catalog_seeds() {
    for (name, data) in seeds("catalog") {
        let c: MinimaCatalog = std::str::from_utf8(&data).unwrap().parse().unwrap();
        assert_eq!(c.to_text().parse::<MinimaCatalog>().unwrap().entries, c.entries, "{name}");
    }
}

#[test]
fn records_seeds() {
    for (name, data) in seeds("records") {
        let recs = read_records(data.as_slice()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut out = Vec::new();
        write_records(&recs, &mut out, &[]).unwrap();
        assert_eq!(read_records(out.as_slice()).unwrap(), recs, "{name}");
    }
}

#[test]
fn name_seeds() {
    for (name, data) in seeds("names") {
        let text = String::from_utf8(data).unwrap();
        match text.parse::<CrossoverKind>() {
            Ok(k) => assert_eq!(k.to_string().parse::<CrossoverKind>().unwrap(), k),
            Err(_) => assert!(
                text == "portugal:0" || gabench::lookup_function(&text, 2).is_ok(),
                "{name}"
            ),
        }
    }
}

#![no_main]

use gabench::harness::{read_records, write_records};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(recs) = read_records(data) {
        let mut out = Vec::new();
        write_records(&recs, &mut out, &[]).expect("in-memory write");
        let again = read_records(out.as_slice()).expect("written records parse");
        assert_eq!(again.len(), recs.len());
    }
});

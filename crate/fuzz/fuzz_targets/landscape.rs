#![no_main]

use gabench::GrungeLandscape;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(l) = text.parse::<GrungeLandscape>() {
        let again: GrungeLandscape = l.to_text().parse().expect("serialized landscape parses");
        assert_eq!(again, l);
        let x = vec![0.5 * (l.bounds.lower + l.bounds.upper); l.dim()];
        let _ = l.value(&x);
    }
});

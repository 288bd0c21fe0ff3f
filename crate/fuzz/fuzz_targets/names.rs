#![no_main]

use gabench::{lookup_function, CrossoverKind};
use libfuzzer_sys::fuzz_target;

// Algorithm names and built-in function names; landscape paths are skipped
// so the target never touches the file system.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(k) = text.parse::<CrossoverKind>() {
        assert_eq!(k.to_string().parse::<CrossoverKind>().unwrap(), k);
    }
    if !text.starts_with("grunge:") {
        let dim = data.len() % 7;
        let _ = lookup_function(text, dim);
    }
});

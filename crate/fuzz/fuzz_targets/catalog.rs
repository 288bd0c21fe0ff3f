#![no_main]

use gabench::MinimaCatalog;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = text.parse::<MinimaCatalog>() {
        let again: MinimaCatalog = c.to_text().parse().expect("serialized catalog parses");
        assert_eq!(again.entries, c.entries);
    }
});

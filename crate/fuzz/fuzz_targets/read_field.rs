#![no_main]

use libfuzzer_sys::fuzz_target;
use mkdv_imethod::spectral::{read_field, write_field};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(field) = read_field(text) {
        // anything accepted must survive a write/read cycle unchanged
        let again = read_field(&write_field(&field)).expect("written field parses");
        assert_eq!(again.grid(), field.grid());
        assert_eq!(again.coeffs(), field.coeffs());
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use mkdv_imethod::cli::ConfigFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ConfigFile::parse(text) {
        let again = ConfigFile::parse(&cfg.render()).expect("rendered config parses");
        assert_eq!(again, cfg);
    }
});

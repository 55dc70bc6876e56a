#![no_main]
use libfuzzer_sys::fuzz_target;
use syndromic::harness::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = RunConfig::parse(text) {
            config.validate().expect("parse validates");
        }
    }
});

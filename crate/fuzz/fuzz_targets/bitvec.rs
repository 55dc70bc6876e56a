#![no_main]
use libfuzzer_sys::fuzz_target;
use syndromic::gf2::BitVec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = text.parse::<BitVec>() {
        assert_eq!(v.to_string(), text);
        assert_eq!(v.len(), text.len());
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;
use syndromic::code::StabilizerCode;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(code) = StabilizerCode::parse(text) {
        let again = StabilizerCode::parse(&code.to_file_string()).expect("round trip");
        assert_eq!(code, again);
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;
use syndromic::nn::MlpDecoderNet;

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = MlpDecoderNet::from_bytes(data) {
        assert_eq!(model.to_bytes(), data);
    }
});

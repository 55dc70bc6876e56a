#![no_main]
use libfuzzer_sys::fuzz_target;
use syndromic::code::build_toric;
use syndromic::gf2::BitVec;
use syndromic::noise::DepolarizationModel;
use syndromic::reference::{exact_ml_decode, min_weight_decode};

// byte 0: fidelity, byte 1: weight cap, bytes 2..: syndrome bits of L=2
fuzz_target!(|data: &[u8]| {
    if data.len() < 3 {
        return;
    }
    let code = build_toric(2).unwrap();
    let fidelity = data[0] as f64 / 255.0;
    let cap = (data[1] % 17) as usize;
    let s = BitVec::from_bools(
        &(0..8)
            .map(|i| data.get(2 + i / 8).is_some_and(|b| b >> (i % 8) & 1 == 1))
            .collect::<Vec<_>>(),
    );
    if let Ok(e) = min_weight_decode(&code, &s, cap) {
        assert_eq!(code.syndrome(&e).unwrap(), s);
        assert!(e.count_ones() <= cap);
    }
    let model = DepolarizationModel::new(fidelity).unwrap();
    if let Ok(e) = exact_ml_decode(&code, &s, &model) {
        assert_eq!(code.syndrome(&e).unwrap(), s);
    }
});

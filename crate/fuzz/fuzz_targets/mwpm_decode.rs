#![no_main]
use libfuzzer_sys::fuzz_target;
use syndromic::code::build_toric;
use syndromic::gf2::BitVec;
use syndromic::reference::mwpm_decode_detailed;

// first byte picks the lattice side, the rest are syndrome bits
fuzz_target!(|data: &[u8]| {
    let Some((&side, bits)) = data.split_first() else {
        return;
    };
    let l = 2 + (side % 6) as usize;
    let code = build_toric(l).unwrap();
    let checks = code.n_generators();
    let s = BitVec::from_bools(
        &(0..checks)
            .map(|i| bits.get(i / 8).is_some_and(|b| b >> (i % 8) & 1 == 1))
            .collect::<Vec<_>>(),
    );
    if let Ok(out) = mwpm_decode_detailed(&code, &s) {
        assert_eq!(code.syndrome(&out.error).unwrap(), s);
    }
});

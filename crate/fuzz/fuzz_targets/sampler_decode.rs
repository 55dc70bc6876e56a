#![no_main]
use libfuzzer_sys::fuzz_target;
use syndromic::code::{build_toric, DecodeMode};
use syndromic::gf2::BitVec;
use syndromic::sampler::{sample_until_consistent, DecodeStatus, SamplerMode};
use syndromic::seed::rng_for;

// 16 marginal bytes, then 8 syndrome bits, then a seed byte
fuzz_target!(|data: &[u8]| {
    if data.len() < 18 {
        return;
    }
    let code = build_toric(2).unwrap();
    let system = code.parity_system(DecodeMode::Joint).unwrap();
    let marginals: Vec<f32> = data[..16].iter().map(|&b| b as f32 / 255.0).collect();
    let s = BitVec::from_bools(&(0..8).map(|i| data[16] >> i & 1 == 1).collect::<Vec<_>>());
    let sampler = if data[17] & 1 == 0 {
        SamplerMode::Naive
    } else {
        SamplerMode::MessagePassing
    };
    let mut rng = rng_for(data.get(18).copied().unwrap_or(0) as u64, &[]);
    let out = sample_until_consistent(&system, &marginals, &s, 50, sampler, &mut rng).unwrap();
    match out.status {
        DecodeStatus::Success => {
            assert_eq!(code.syndrome(out.predicted.as_ref().unwrap()).unwrap(), s)
        }
        DecodeStatus::GiveUp => assert_eq!(out.iterations, 50),
    }
});

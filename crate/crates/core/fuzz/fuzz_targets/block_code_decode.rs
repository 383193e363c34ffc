#![no_main]
use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use sftnorm::compressor::{BlockCode, EmpiricalChain};

fn code() -> &'static BlockCode {
    static CODE: OnceLock<BlockCode> = OnceLock::new();
    CODE.get_or_init(|| {
        let y: Vec<u32> = [0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0].repeat(20);
        let chain = EmpiricalChain::from_sequence(&y, 2).unwrap();
        BlockCode::build(&chain, 4).unwrap()
    })
}

fuzz_target!(|data: &[u8]| {
    let bits: Vec<u32> = data.iter().map(|&b| (b & 1) as u32).collect();
    if let Ok(y) = code().decode(&bits) {
        assert_eq!(code().encode(&y).unwrap().0, bits);
    }
});

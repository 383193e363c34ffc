#![no_main]
use libfuzzer_sys::fuzz_target;
use sftnorm::compressor::{read_bits, write_bits};

fuzz_target!(|data: &[u8]| {
    if let Ok(bits) = read_bits(data) {
        assert_eq!(write_bits(&bits).unwrap(), data);
    }
});

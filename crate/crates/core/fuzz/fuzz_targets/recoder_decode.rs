#![no_main]
use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use sftnorm::alphabet::Alphabet;
use sftnorm::compressor::Recoder;
use sftnorm::shift::ShiftSpec;

fn recoder() -> &'static Recoder {
    static R: OnceLock<Recoder> = OnceLock::new();
    R.get_or_init(|| {
        let full = ShiftSpec::full(Alphabet::binary()).unwrap();
        Recoder::build(&ShiftSpec::golden_mean(), &full, 0.2).unwrap()
    })
}

fuzz_target!(|data: &[u8]| {
    let y: Vec<u32> = data.iter().map(|&b| (b & 1) as u32).collect();
    if let Ok(x) = recoder().decode(&y) {
        assert_eq!(recoder().encode(&x).unwrap().output, y);
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;
use sftnorm::measure::Measure;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(mu) = Measure::from_json(s) {
        let m = mu.alphabet_size() as u32;
        let w: Vec<u32> = data.iter().take(8).map(|&b| b as u32 % m.max(1)).collect();
        let p = mu.eval(&w);
        assert!((0.0..=1.0 + 1e-9).contains(&p));
    }
});

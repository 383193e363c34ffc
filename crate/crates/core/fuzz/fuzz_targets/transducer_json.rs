#![no_main]
use libfuzzer_sys::fuzz_target;
use sftnorm::transducer::{run, Transducer};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = Transducer::from_json(s) {
        let radix = t.input_alphabet().len() as u32;
        let x: Vec<u32> = data.iter().take(64).map(|&b| b as u32 % radix).collect();
        let _ = run(&t, &x);
    }
});

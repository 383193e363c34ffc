#![no_main]
use libfuzzer_sys::fuzz_target;
use sftnorm::alphabet::Alphabet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    for a in [Alphabet::binary(), Alphabet::generated(3)] {
        if let Ok(x) = a.parse_sequence(s) {
            assert_eq!(a.parse_sequence(&a.render(&x)).unwrap(), x);
        }
    }
});

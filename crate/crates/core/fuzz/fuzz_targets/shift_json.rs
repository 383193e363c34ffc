#![no_main]
use libfuzzer_sys::fuzz_target;
use sftnorm::shift::ShiftSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = ShiftSpec::from_json(s) {
        if spec.size() <= 16 {
            let _ = spec.topological_entropy();
            let _ = spec.block_count(8);
        }
        let back = serde_json::to_string(&spec.to_file()).unwrap();
        assert_eq!(ShiftSpec::from_json(&back).unwrap(), spec);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use needlets::pipeline::CoeffFile;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = CoeffFile::from_json_bytes(data) {
        let text = file.to_json_string().expect("valid file serializes");
        assert_eq!(CoeffFile::from_json_str(&text).expect("serialized file parses"), file);
        let _ = file.frame().and_then(|frame| {
            let coeffs = file.coeffs()?;
            frame.check_coeffs(&coeffs)
        });
    }
});

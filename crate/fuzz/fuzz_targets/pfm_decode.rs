#![no_main]

use libfuzzer_sys::fuzz_target;
use needlets::pipeline::{decode_pfm, encode_pfm};

fuzz_target!(|data: &[u8]| {
    if let Ok(map) = decode_pfm(data) {
        let bytes = encode_pfm(&map).expect("decoded map re-encodes");
        assert_eq!(decode_pfm(&bytes).expect("re-encoded map decodes"), map);
    }
});

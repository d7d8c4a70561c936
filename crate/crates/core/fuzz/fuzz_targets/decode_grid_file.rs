#![no_main]
use libfuzzer_sys::fuzz_target;
use qlbe_core::io::GridFile;

fuzz_target!(|data: &[u8]| {
    let Ok(file) = GridFile::decode(data) else {
        return;
    };
    let bytes = file.encode();
    let again = GridFile::decode(&bytes).expect("encoded grid file must decode");
    assert_eq!(again.encode(), bytes);
});

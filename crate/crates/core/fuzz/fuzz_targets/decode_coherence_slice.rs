#![no_main]
use libfuzzer_sys::fuzz_target;
use qlbe_core::qlbe_grid::CoherenceSlice;

fuzz_target!(|data: &[u8]| {
    let Ok(slice) = CoherenceSlice::decode(data) else {
        return;
    };
    let _ = slice.trace();
    let bytes = slice.encode();
    let again = CoherenceSlice::decode(&bytes).expect("encoded slice must decode");
    assert_eq!(again.encode(), bytes);
});

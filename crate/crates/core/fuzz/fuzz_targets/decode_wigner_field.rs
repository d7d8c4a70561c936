#![no_main]
use libfuzzer_sys::fuzz_target;
use qlbe_core::diffusive::WignerField;

fuzz_target!(|data: &[u8]| {
    let Ok(field) = WignerField::decode(data) else {
        return;
    };
    let _ = field.mass();
    let bytes = field.encode();
    let again = WignerField::decode(&bytes).expect("encoded field must decode");
    assert_eq!(again.encode(), bytes);
});

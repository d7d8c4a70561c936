#![no_main]
use libfuzzer_sys::fuzz_target;
use qlbe_core::config::RunConfig;

fuzz_target!(|text: &str| {
    let Ok(cfg) = RunConfig::parse(text) else {
        return;
    };
    // Rendering is canonical: a parsed config re-renders to the same text.
    let rendered = cfg.to_text();
    let again = RunConfig::parse(&rendered).expect("rendered config must parse");
    assert_eq!(again.to_text(), rendered);
});

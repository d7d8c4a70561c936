#![no_main]
use libfuzzer_sys::fuzz_target;
use qlbe_core::rates::TabulatedKernel;

fuzz_target!(|text: &str| {
    let Ok(table) = TabulatedKernel::parse(text) else {
        return;
    };
    let (lo, hi) = table.points().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (q, _)| (lo.min(q), hi.max(q)));
    for x in [lo, 0.5 * (lo + hi), hi, hi + 1.0] {
        let _ = table.eval(x);
    }
});

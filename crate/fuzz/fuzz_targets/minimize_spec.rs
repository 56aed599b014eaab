#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = smgeo::specfile::parse_minimize_spec(data);
});

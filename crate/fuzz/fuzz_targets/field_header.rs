#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // header alone, then header driving the table reader with a small
    // well-formed table, so shape mismatches get exercised too
    let _ = smgeo::fieldio::parse_field_header(data);
    let csv = b"x,value\n0e0,1e0\n1e0,1.5e0\n2e0,2e0\n";
    let _ = smgeo::fieldio::read_field(data, csv);
});

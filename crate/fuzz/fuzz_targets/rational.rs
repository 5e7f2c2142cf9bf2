#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    hitchin_shear::fuzz_entry::rational(data);
});

//! Deployment snapshots (`kind,index,x_m,y_m[,z_m]`).

#![no_main]

use dmimo_core::deployment::{parse_snapshot, Deployment};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(snap) = parse_snapshot(text) else {
        return;
    };
    if let Ok(d) = Deployment::new(snap.dims, 1e6, snap.aps, snap.ues, true) {
        let back = Deployment::from_csv(&d.to_csv(), 1e6, true).expect("rendered snapshot parses");
        assert_eq!(back, d);
    }
});

#![no_main]

use dmimo_core::lists::{check_permutation, parse_counts, parse_grid, parse_orderings, parse_points};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    match selector % 4 {
        0 => {
            let _ = parse_counts("counts", text);
        }
        1 => {
            if let Ok(grid) = parse_grid("snr", text) {
                assert!(grid.iter().all(|v| !v.is_nan()));
            }
        }
        2 => {
            if let Ok(orders) = parse_orderings("orderings", text) {
                for o in &orders {
                    let _ = check_permutation("orderings", o, o.len());
                }
            }
        }
        _ => {
            if let Ok(points) = parse_points("points", text) {
                assert!(points.iter().all(|p| p.is_finite()));
            }
        }
    }
});

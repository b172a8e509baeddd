//! Fixed benchmark inputs for the gold sand engine.

use goldsand_core::{Arrangement, GameKind};

/// A regular PropertyB arrangement with sand spread over `depth` levels.
pub fn property_b_ladder(depth: u32) -> Arrangement {
    let mut cells = Vec::new();
    for level in 1..=depth {
        let a = level as f64;
        cells.push((level, "0", 1.0 + a));
        cells.push((level, "1", 0.5 * a));
        cells.push((level, "2", 0.75 + 0.25 * a));
    }
    Arrangement::of_kind(GameKind::PropertyB, &cells).expect("valid ladder")
}

/// A panchromatic arrangement on `r` colors: fresh sand plus one partial mask per level.
pub fn panchromatic_ladder(r: u8, depth: u32) -> Arrangement {
    let fresh = "0".repeat(r as usize);
    let mut cells: Vec<(u32, String, f64)> = vec![(depth, fresh, 4.0)];
    for level in 1..depth {
        let mut mask = vec!['0'; r as usize];
        mask[(level as usize) % r as usize] = '1';
        cells.push((level, mask.into_iter().collect(), 1.0 + level as f64 / 2.0));
    }
    let cells: Vec<(u32, &str, f64)> = cells.iter().map(|(l, p, a)| (*l, p.as_str(), *a)).collect();
    Arrangement::of_kind(GameKind::Panchromatic(r), &cells).expect("valid panchromatic ladder")
}

/// Four level-3 chips and two half-colored ones: a small exact-search instance.
pub fn small_discrete() -> Arrangement {
    let text = r#"{"kind":"property_b","maxLevel":3,"mode":"discrete","sand":[
        {"level":3,"path":"0","amount":4},{"level":2,"path":"1","amount":1},{"level":2,"path":"2","amount":1}]}"#;
    Arrangement::from_json(text).expect("valid discrete instance")
}

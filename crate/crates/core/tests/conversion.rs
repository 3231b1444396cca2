use chromasym::{hsv_to_rgb, rgb_to_hsv, HsvPixel, RgbPixel};
use proptest::prelude::*;
use rayon::prelude::*;

#[test]
fn rgb_hsv_rgb_exhaustive() {
    let failures: usize = (0u32..256)
        .into_par_iter()
        .map(|r| {
            let mut bad = 0;
            for g in 0..256u32 {
                for b in 0..256u32 {
                    let p = RgbPixel::rgb(r as u8, g as u8, b as u8);
                    if hsv_to_rgb(rgb_to_hsv(p)) != p {
                        bad += 1;
                    }
                }
            }
            bad
        })
        .sum();
    assert_eq!(failures, 0);
}

#[test]
fn hsv_channels_in_unit_interval_exhaustive_grays_and_primaries() {
    for i in 0..=255u8 {
        for p in [
            RgbPixel::rgb(i, i, i),
            RgbPixel::rgb(255, i, 0),
            RgbPixel::rgb(0, i, 255),
            RgbPixel::rgb(255, 0, i),
        ] {
            let c = rgb_to_hsv(p);
            assert!((0.0..1.0).contains(&c.h), "{p:?} {c:?}");
            assert!((0.0..=1.0).contains(&c.s) && (0.0..=1.0).contains(&c.v));
        }
    }
}

fn hue_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

const STEP: f64 = 1.0 / 255.0 + 1e-9;

proptest! {
    #[test]
    fn hsv_rgb_hsv_value_within_one_step(h in 0.0f64..=1.0, s in 1e-6f64..=1.0, v in 1e-6f64..=1.0) {
        let back = rgb_to_hsv(hsv_to_rgb(HsvPixel { h, s, v }));
        prop_assert!((back.v - v).abs() <= STEP, "v {} -> {}", v, back.v);
    }

    #[test]
    fn hsv_rgb_hsv_strong_chroma_within_one_step(h in 0.0f64..=1.0, s in 0.5f64..=1.0, v in 0.5f64..=1.0) {
        prop_assume!(s * v >= 0.5);
        let back = rgb_to_hsv(hsv_to_rgb(HsvPixel { h, s, v }));
        prop_assert!(hue_distance(back.h, h) <= STEP, "h {} -> {}", h, back.h);
        prop_assert!((back.s - s).abs() <= STEP, "s {} -> {}", s, back.s);
        prop_assert!((back.v - v).abs() <= STEP);
    }

    #[test]
    fn hsv_to_rgb_is_stable_under_reconversion(h in 0.0f64..=1.0, s in 0.0f64..=1.0, v in 0.0f64..=1.0) {
        let rgb = hsv_to_rgb(HsvPixel { h, s, v });
        prop_assert_eq!(hsv_to_rgb(rgb_to_hsv(rgb)), rgb);
    }
}

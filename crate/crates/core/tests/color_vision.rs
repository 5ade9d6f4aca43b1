use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use viralens_core::color::{hsv_to_rgb, rgb_to_hsv};
use viralens_core::vision::{
    extract_visual_descriptor, quantize_to_visual_words, Channel, ClusterSummary, PixelGrid, QuantizationConfig,
    VisualDescriptor,
};

#[test]
fn hsv_round_trip_within_one_level() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let rgb: [u8; 3] = [rng.random(), rng.random(), rng.random()];
        let (h, s, v) = rgb_to_hsv(rgb[0], rgb[1], rgb[2]);
        assert!((0.0..360.0).contains(&h) && (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&v));
        let (r, g, b) = hsv_to_rgb(h, s, v);
        for (x, y) in [r, g, b].iter().zip(rgb) {
            worst = worst.max((x - f64::from(y) / 255.0).abs());
        }
    }
    assert!(worst <= 1.0 / 255.0, "max error {worst}");
}

#[test]
fn red_blue_image_descriptor() {
    // 60% pure red, 40% pure blue, interleaved
    let pixels: Vec<[u8; 3]> = (0..500).map(|i| if i % 5 < 3 { [255, 0, 0] } else { [0, 0, 255] }).collect();
    let grid = PixelGrid::new(25, 20, pixels).unwrap();
    let d = extract_visual_descriptor(&grid, 4).unwrap();
    assert_eq!(d.densities(), [0.6, 0.4, 0.0, 0.0, 0.0]);
    assert_eq!(d.clusters[0].mean_rgb, [1.0, 0.0, 0.0]);
}

#[test]
fn large_images_are_subsampled() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(12);
    let pixels: Vec<[u8; 3]> = (0..300 * 200).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    let grid = PixelGrid::new(300, 200, pixels).unwrap();
    let d = extract_visual_descriptor(&grid, 1).unwrap();
    // densities are multiples of 1/50_000
    for x in d.densities() {
        let scaled = x * 50_000.0;
        assert!((scaled - scaled.round()).abs() < 1e-6);
    }
    assert_eq!(d, extract_visual_descriptor(&grid, 1).unwrap());
}

fn arb_grid() -> impl Strategy<Value = PixelGrid> {
    (1u32..12, 1u32..12, prop::collection::vec(prop::array::uniform3(0u8..=255), 144)).prop_map(|(w, h, px)| {
        let n = (w * h) as usize;
        PixelGrid::new(w, h, px.into_iter().cycle().take(n).collect()).unwrap()
    })
}

fn arb_descriptor() -> impl Strategy<Value = VisualDescriptor> {
    (prop::collection::vec(0.0f64..1.0, 5), prop::collection::vec(0.0f64..=1.0, 30)).prop_map(|(raw, means)| {
        let mut d: Vec<f64> = raw;
        d.sort_by(|a, b| b.total_cmp(a));
        let s: f64 = d.iter().sum::<f64>().max(1e-9);
        let clusters = std::array::from_fn(|i| ClusterSummary {
            density: d[i] / s,
            mean_rgb: [means[6 * i], means[6 * i + 1], means[6 * i + 2]],
            mean_hsv: [means[6 * i + 3], means[6 * i + 4], means[6 * i + 5]],
        });
        VisualDescriptor { clusters }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn descriptor_densities_sorted_and_normalized(grid in arb_grid(), seed in any::<u64>()) {
        let d = extract_visual_descriptor(&grid, seed).unwrap();
        let dens = d.densities();
        prop_assert!((dens.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(dens.windows(2).all(|w| w[0] >= w[1]));
        for c in &d.clusters {
            prop_assert!(c.mean_rgb.iter().chain(&c.mean_hsv).all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn channel_totals_near_token_budget(desc in arb_descriptor(), bins in 2u32..16, tokens in 1u32..500) {
        let cfg = QuantizationConfig::new(bins, tokens).unwrap();
        let bag = quantize_to_visual_words(&desc, &cfg).unwrap();
        for c in Channel::ALL {
            let total = i64::from(bag.channel_total(&cfg, c));
            prop_assert!((total - i64::from(tokens)).abs() <= 5);
        }
    }
}

#![allow(dead_code)]

use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{ImageFormat, Rgb, RgbImage};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Four visual styles, each a dominant colour plus two accents.
pub const PALETTES: [[[u8; 3]; 3]; 4] = [
    [[220, 30, 30], [250, 250, 250], [60, 60, 60]],
    [[30, 60, 200], [250, 240, 150], [255, 255, 255]],
    [[40, 170, 70], [10, 10, 10], [200, 200, 200]],
    [[140, 40, 160], [250, 150, 20], [240, 240, 240]],
];

const TITLES: [&[&str]; 4] = [
    &["world issues", "world demographics", "issues of the world"],
    &["mobile marketing", "mobile design", "marketing on mobile"],
    &["health data", "data on health", "health facts"],
    &["social media", "social media marketing", "media tips"],
];

const TOKENS: [&[&str]; 4] = [
    &["World", "issues", "demographics", "population"],
    &["Mobile", "marketing", "design", "users"],
    &["health", "data", "research", "results"],
    &["Social", "media", "online", "network"],
];

/// Mean total shares per style; style 0 is the "viral" one.
pub const SHARE_MEANS: [f64; 4] = [6000.0, 1200.0, 1500.0, 900.0];

pub const IMAGE_SIZE: u32 = 40;

/// PNG of horizontal colour bands in `style`'s palette with mild noise.
pub fn style_png(style: usize, seed: u64) -> Vec<u8> {
    let mut rng = StdRng::seed_from_u64(seed);
    let palette = PALETTES[style];
    let dominant = rng.random_range(0.5..0.7);
    let second = (1.0 - dominant) * rng.random_range(0.4..0.6);
    let mut img = RgbImage::new(IMAGE_SIZE, IMAGE_SIZE);
    for y in 0..IMAGE_SIZE {
        let frac = (f64::from(y) + 0.5) / f64::from(IMAGE_SIZE);
        let band = if frac < dominant {
            0
        } else if frac < dominant + second {
            1
        } else {
            2
        };
        for x in 0..IMAGE_SIZE {
            let c = palette[band];
            let jitter = |v: u8, rng: &mut StdRng| (i16::from(v) + rng.random_range(-6i16..=6)).clamp(0, 255) as u8;
            img.put_pixel(x, y, Rgb([jitter(c[0], &mut rng), jitter(c[1], &mut rng), jitter(c[2], &mut rng)]));
        }
    }
    encode_png(&img)
}

pub fn encode_png(img: &RgbImage) -> Vec<u8> {
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).unwrap();
    out.into_inner()
}

pub fn dictionary_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/dictionary.txt")
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub manifest: PathBuf,
    /// Images not listed in the manifest, one per style.
    pub held_out: Vec<PathBuf>,
    pub styles: Vec<usize>,
}

impl Fixture {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

/// Writes `per_style * 4` images, a manifest with share counts and titles,
/// token sidecars, and one held-out image per style.
pub fn build_fixture(per_style: usize, seed: u64) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut csv = String::from(
        "id,image_path,title,shares_facebook,shares_pinterest,shares_linkedin,shares_twitter,token_sidecar\n",
    );
    let mut styles = Vec::new();
    for i in 0..per_style * 4 {
        let style = i % 4;
        styles.push(style);
        let id = format!("doc{i:03}");
        let file = format!("{id}.png");
        std::fs::write(dir.path().join(&file), style_png(style, rng.random())).unwrap();
        let total = (SHARE_MEANS[style] * rng.random_range(0.6..1.4)) as u64;
        let fb = total / 2;
        let pin = total / 4;
        let li = total / 10;
        let tw = total - fb - pin - li;
        let title = TITLES[style][rng.random_range(0..TITLES[style].len())];
        let mut tokens: Vec<&str> = (0..6).map(|_| TOKENS[style][rng.random_range(0..TOKENS[style].len())]).collect();
        tokens.push("xqz3");
        tokens.push("ROI!");
        std::fs::write(dir.path().join(format!("{id}.tokens.txt")), tokens.join("\n")).unwrap();
        csv.push_str(&format!("{id},{file},{title},{fb},{pin},{li},{tw},\n"));
    }
    let manifest = dir.path().join("manifest.csv");
    std::fs::write(&manifest, csv).unwrap();
    let held_out = (0..4)
        .map(|style| {
            let p = dir.path().join(format!("held_out_{style}.png"));
            std::fs::write(&p, style_png(style, 10_000 + style as u64)).unwrap();
            p
        })
        .collect();
    Fixture { dir, manifest, held_out, styles }
}

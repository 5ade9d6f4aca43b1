//! Pixel clustering into sorted five-cluster color descriptors, and the
//! quantization of those descriptors into integer visual-word counts.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::color::rgb_to_hsv;
use crate::kmeans::{kmeans_with, KMeansConfig};
use crate::rng;
use crate::{Error, Result};

/// Clusters per image descriptor.
pub const DESCRIPTOR_CLUSTERS: usize = 5;
/// Channels per descriptor cluster: R, G, B, H, S, V.
pub const CHANNELS: usize = 6;
pub const DEFAULT_SAMPLE_CAP: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Channel {
    R,
    G,
    B,
    H,
    S,
    V,
}

impl Channel {
    pub const ALL: [Channel; CHANNELS] = [Channel::R, Channel::G, Channel::B, Channel::H, Channel::S, Channel::V];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            Channel::R => 'R',
            Channel::G => 'G',
            Channel::B => 'B',
            Channel::H => 'H',
            Channel::S => 'S',
            Channel::V => 'V',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelGrid {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl PixelGrid {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be positive"));
        }
        if pixels.len() as u64 != u64::from(width) * u64::from(height) {
            return Err(Error::DimensionMismatch(format!(
                "{} pixels for a {}x{} grid",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(PixelGrid { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }
}

/// One entry of a [`VisualDescriptor`]. All features live in `[0, 1]`;
/// hue is scaled from degrees by 1/360.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterSummary {
    pub density: f64,
    pub mean_rgb: [f64; 3],
    pub mean_hsv: [f64; 3],
}

impl ClusterSummary {
    pub fn channel_mean(&self, c: Channel) -> f64 {
        match c {
            Channel::R => self.mean_rgb[0],
            Channel::G => self.mean_rgb[1],
            Channel::B => self.mean_rgb[2],
            Channel::H => self.mean_hsv[0],
            Channel::S => self.mean_hsv[1],
            Channel::V => self.mean_hsv[2],
        }
    }
}

/// Five pixel clusters ordered by descending density.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VisualDescriptor {
    pub clusters: [ClusterSummary; DESCRIPTOR_CLUSTERS],
}

impl VisualDescriptor {
    pub fn densities(&self) -> [f64; DESCRIPTOR_CLUSTERS] {
        self.clusters.map(|c| c.density)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractConfig {
    pub sample_cap: usize,
    pub kmeans: KMeansConfig,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig { sample_cap: DEFAULT_SAMPLE_CAP, kmeans: KMeansConfig::new(DESCRIPTOR_CLUSTERS) }
    }
}

pub fn pixel_features(px: [u8; 3]) -> [f64; CHANNELS] {
    let (h, s, v) = rgb_to_hsv(px[0], px[1], px[2]);
    [
        f64::from(px[0]) / 255.0,
        f64::from(px[1]) / 255.0,
        f64::from(px[2]) / 255.0,
        h / 360.0,
        s,
        v,
    ]
}

pub fn extract_visual_descriptor(grid: &PixelGrid, seed: u64) -> Result<VisualDescriptor> {
    extract_visual_descriptor_with(grid, seed, &ExtractConfig::default())
}

pub fn extract_visual_descriptor_with(grid: &PixelGrid, seed: u64, cfg: &ExtractConfig) -> Result<VisualDescriptor> {
    if cfg.sample_cap == 0 {
        return Err(Error::invalid("sample cap must be positive"));
    }
    let sample = subsample(grid.pixels(), cfg.sample_cap, rng::derive_seed(seed, 0));
    let points: Vec<[f64; CHANNELS]> = sample.iter().map(|&px| pixel_features(px)).collect();
    let mut km_cfg = cfg.kmeans;
    km_cfg.k = DESCRIPTOR_CLUSTERS;
    let km = kmeans_with(&points, km_cfg, rng::derive_seed(seed, 1))?;

    let n = points.len() as f64;
    let mut sums = [[0.0; CHANNELS]; DESCRIPTOR_CLUSTERS];
    let mut counts = [0usize; DESCRIPTOR_CLUSTERS];
    for (&a, p) in km.assignment.iter().zip(&points) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(p) {
            *s += x;
        }
    }

    let mut found: Vec<ClusterSummary> = (0..km.k())
        .filter(|&i| counts[i] > 0)
        .map(|i| {
            let m = sums[i].map(|s| s / counts[i] as f64);
            ClusterSummary {
                density: counts[i] as f64 / n,
                mean_rgb: [m[0], m[1], m[2]],
                mean_hsv: [m[3], m[4], m[5]],
            }
        })
        .collect();
    found.sort_by(|a, b| b.density.total_cmp(&a.density));

    let top = found[0];
    let pad = ClusterSummary { density: 0.0, ..top };
    let mut clusters = [pad; DESCRIPTOR_CLUSTERS];
    for (slot, c) in clusters.iter_mut().zip(found) {
        *slot = c;
    }
    Ok(VisualDescriptor { clusters })
}

/// Uniform sample without replacement of at most `cap` pixels, in original order.
fn subsample(pixels: &[[u8; 3]], cap: usize, seed: u64) -> Vec<[u8; 3]> {
    if pixels.len() <= cap {
        return pixels.to_vec();
    }
    let mut rng = rng::seeded(seed);
    let mut idx: Vec<usize> = (0..pixels.len()).collect();
    for i in 0..cap {
        let j = i + rng::index(&mut rng, idx.len() - i);
        idx.swap(i, j);
    }
    let mut chosen = idx[..cap].to_vec();
    chosen.sort_unstable();
    chosen.into_iter().map(|i| pixels[i]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantizationConfig {
    pub bins_per_channel: u32,
    pub tokens_per_channel: u32,
}

impl Default for QuantizationConfig {
    fn default() -> Self {
        QuantizationConfig { bins_per_channel: 8, tokens_per_channel: 100 }
    }
}

impl QuantizationConfig {
    pub fn new(bins_per_channel: u32, tokens_per_channel: u32) -> Result<Self> {
        let cfg = QuantizationConfig { bins_per_channel, tokens_per_channel };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins_per_channel < 2 {
            return Err(Error::invalid(format!("bins per channel must be >= 2, got {}", self.bins_per_channel)));
        }
        if self.tokens_per_channel < 1 {
            return Err(Error::invalid("tokens per channel must be >= 1"));
        }
        Ok(())
    }

    pub fn vocabulary_size(&self) -> usize {
        CHANNELS * self.bins_per_channel as usize
    }

    pub fn word_index(&self, channel: Channel, bin: u32) -> usize {
        channel.index() * self.bins_per_channel as usize + bin as usize
    }

    /// Visual vocabulary in column order: all bins of R, then G, B, H, S, V.
    pub fn vocabulary(&self) -> Vec<String> {
        Channel::ALL
            .iter()
            .flat_map(|&c| (0..self.bins_per_channel).map(move |b| visual_word_name(c, b)))
            .collect()
    }
}

/// Visual words are named `"<channel>:<bin>"`, e.g. `"R:7"`. Text terms are
/// lowercase, so the two namespaces cannot collide.
pub fn visual_word_name(channel: Channel, bin: u32) -> String {
    format!("{}:{}", channel.symbol(), bin)
}

/// Word counts over the `6 x B` visual vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VisualBag {
    pub counts: Vec<u32>,
}

impl VisualBag {
    pub fn channel_total(&self, cfg: &QuantizationConfig, channel: Channel) -> u32 {
        let b = cfg.bins_per_channel as usize;
        self.counts[channel.index() * b..(channel.index() + 1) * b].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }
}

pub fn quantize_to_visual_words(desc: &VisualDescriptor, cfg: &QuantizationConfig) -> Result<VisualBag> {
    cfg.validate()?;
    let bins = cfg.bins_per_channel;
    let mut counts = alloc::vec![0u32; cfg.vocabulary_size()];
    for cluster in &desc.clusters {
        let tokens = libm::round(f64::from(cfg.tokens_per_channel) * cluster.density) as u32;
        if tokens == 0 {
            continue;
        }
        for channel in Channel::ALL {
            let bin = (libm::floor(cluster.channel_mean(channel) * f64::from(bins)).max(0.0) as u32).min(bins - 1);
            counts[cfg.word_index(channel, bin)] += tokens;
        }
    }
    Ok(VisualBag { counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid_of(colors: &[([u8; 3], usize)]) -> PixelGrid {
        let pixels: Vec<[u8; 3]> = colors.iter().flat_map(|&(c, n)| core::iter::repeat_n(c, n)).collect();
        let n = pixels.len() as u32;
        PixelGrid::new(n, 1, pixels).unwrap()
    }

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(PixelGrid::new(0, 1, vec![]).is_err());
        assert!(PixelGrid::new(2, 2, vec![[0, 0, 0]; 3]).is_err());
    }

    #[test]
    fn solid_image_pads_with_top_cluster() {
        let d = extract_visual_descriptor(&grid_of(&[([10, 200, 30], 64)]), 1).unwrap();
        assert_eq!(d.densities(), [1.0, 0.0, 0.0, 0.0, 0.0]);
        for c in &d.clusters[1..] {
            assert_eq!(c.mean_rgb, d.clusters[0].mean_rgb);
            assert_eq!(c.mean_hsv, d.clusters[0].mean_hsv);
        }
    }

    #[test]
    fn red_blue_split() {
        let d = extract_visual_descriptor(&grid_of(&[([255, 0, 0], 60), ([0, 0, 255], 40)]), 3).unwrap();
        assert_eq!(d.densities(), [0.6, 0.4, 0.0, 0.0, 0.0]);
        assert_eq!(d.clusters[0].mean_rgb, [1.0, 0.0, 0.0]);
        assert_eq!(d.clusters[1].mean_rgb, [0.0, 0.0, 1.0]);
        assert!((d.clusters[1].mean_hsv[0] - 240.0 / 360.0).abs() < 1e-12);
    }

    #[test]
    fn subsample_is_capped_and_seeded() {
        let pixels: Vec<[u8; 3]> = (0..1000u32).map(|i| [(i % 256) as u8, (i / 256) as u8, 0]).collect();
        let a = subsample(&pixels, 100, 5);
        assert_eq!(a.len(), 100);
        assert_eq!(a, subsample(&pixels, 100, 5));
        let mut dedup = a.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 100);
    }

    #[test]
    fn quantize_by_formula() {
        let top = ClusterSummary { density: 0.6, mean_rgb: [1.0, 0.0, 0.0], mean_hsv: [0.0, 1.0, 1.0] };
        let second = ClusterSummary { density: 0.4, mean_rgb: [0.0, 0.0, 1.0], mean_hsv: [240.0 / 360.0, 1.0, 1.0] };
        let empty = ClusterSummary { density: 0.0, ..top };
        let desc = VisualDescriptor { clusters: [top, second, empty, empty, empty] };
        let cfg = QuantizationConfig::default();
        let bag = quantize_to_visual_words(&desc, &cfg).unwrap();
        assert_eq!(bag.counts.len(), 48);
        assert_eq!(bag.counts[cfg.word_index(Channel::R, 7)], 60);
        assert_eq!(bag.counts[cfg.word_index(Channel::R, 0)], 40);
        assert_eq!(bag.counts[cfg.word_index(Channel::H, 5)], 40);
        for c in Channel::ALL {
            assert_eq!(bag.channel_total(&cfg, c), 100);
        }
    }

    #[test]
    fn zero_density_contributes_nothing() {
        let c = ClusterSummary { density: 1.0, mean_rgb: [0.5; 3], mean_hsv: [0.5; 3] };
        let z = ClusterSummary { density: 0.0, mean_rgb: [0.0; 3], mean_hsv: [0.0; 3] };
        let desc = VisualDescriptor { clusters: [c, z, z, z, z] };
        let cfg = QuantizationConfig::new(4, 10).unwrap();
        let bag = quantize_to_visual_words(&desc, &cfg).unwrap();
        assert_eq!(bag.counts[cfg.word_index(Channel::R, 0)], 0);
        assert_eq!(bag.counts[cfg.word_index(Channel::R, 2)], 10);
        assert_eq!(bag.total(), 60);
    }

    #[test]
    fn config_validation() {
        assert!(QuantizationConfig::new(1, 100).is_err());
        assert!(QuantizationConfig::new(8, 0).is_err());
        let v = QuantizationConfig::new(2, 1).unwrap().vocabulary();
        assert_eq!(v, ["R:0", "R:1", "G:0", "G:1", "B:0", "B:1", "H:0", "H:1", "S:0", "S:1", "V:0", "V:1"]);
    }
}

//! Subsection labelings that are symmetric under every element of D2.
//!
//! A layout is generated once for the NW section ("canonical" ids) and
//! carried to the other three sections by the group element that maps NW
//! onto them. Global subsection ids are `section_index * (lambda / 4) +
//! canonical_id` with sections ordered NW, NE, SW, SE.

use crate::color::{hsv_to_rgb, HsvPixel, RgbPixel};
use crate::engine::ImageBuffer;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::symmetry::{Dims, GroupElement, PixelCoord, Section};

/// Disk layout parameters for [`PartitionSpec::Bubble`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleSpec {
    pub count: u32,
    pub seed: u64,
    /// Smallest radius as a fraction of the section's shorter side.
    pub rmin: f64,
    /// Largest radius as a fraction of the section's shorter side.
    pub rmax: f64,
}

impl BubbleSpec {
    pub const DEFAULT_RMIN: f64 = 0.1;
    pub const DEFAULT_RMAX: f64 = 0.3;

    pub fn new(count: u32, seed: u64) -> Self {
        Self {
            count,
            seed,
            rmin: Self::DEFAULT_RMIN,
            rmax: Self::DEFAULT_RMAX,
        }
    }
}

/// How each section is cut into subsections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionSpec {
    /// Fan of triangles around the image center.
    Triangular { triangles: u32 },
    /// Axis-aligned cells; a chessboard when maps alternate.
    Grid { rows: u32, cols: u32 },
    /// Disks on a background; background is canonical id 0.
    Bubble(BubbleSpec),
    /// Every pixel is its own subsection.
    PerPixel,
}

/// Upper bound on per-section subsection counts, keeping global ids in `u32`.
const MAX_CANONICAL: u64 = 1 << 24;

impl PartitionSpec {
    /// Check the parameters that do not depend on image size.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPartition(msg));
        match *self {
            Self::Triangular { triangles } => {
                if triangles == 0 || u64::from(triangles) > MAX_CANONICAL {
                    return bad(format!("triangles must be in 1..={MAX_CANONICAL}"));
                }
            }
            Self::Grid { rows, cols } => {
                if rows == 0 || cols == 0 {
                    return bad("grid rows and cols must be >= 1".into());
                }
                if u64::from(rows) * u64::from(cols) > MAX_CANONICAL {
                    return bad("grid has too many cells".into());
                }
            }
            Self::Bubble(b) => {
                if b.count == 0 || u64::from(b.count) >= MAX_CANONICAL {
                    return bad(format!("bubble count must be in 1..{MAX_CANONICAL}"));
                }
                if !(b.rmin.is_finite() && b.rmax.is_finite())
                    || b.rmin <= 0.0
                    || b.rmin > b.rmax
                    || b.rmax > 0.5
                {
                    return bad(format!(
                        "bubble radii need 0 < rmin <= rmax <= 0.5, got rmin={} rmax={}",
                        b.rmin, b.rmax
                    ));
                }
            }
            Self::PerPixel => {}
        }
        Ok(())
    }

    /// Short lower-case name as used in configuration files.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Triangular { .. } => "triangular",
            Self::Grid { .. } => "grid",
            Self::Bubble(_) => "bubble",
            Self::PerPixel => "perpixel",
        }
    }
}

/// A per-pixel subsection labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    dims: Dims,
    spec: PartitionSpec,
    canonical_count: u32,
    labels: Vec<u32>,
}

/// Build the partition described by `spec` for an image of size `dims`.
pub fn build_partition(spec: &PartitionSpec, dims: Dims) -> Result<Partition> {
    Partition::build(spec, dims)
}

impl Partition {
    pub fn build(spec: &PartitionSpec, dims: Dims) -> Result<Self> {
        spec.validate()?;
        let (sw, sh) = dims.section_size();
        let (canonical_count, layout) = match *spec {
            PartitionSpec::Triangular { triangles } => {
                (triangles, triangular_layout(sw, sh, triangles))
            }
            PartitionSpec::Grid { rows, cols } => {
                if rows > sh || cols > sw {
                    return Err(Error::InvalidPartition(format!(
                        "a {rows}x{cols} grid does not fit a {sw}x{sh} section"
                    )));
                }
                (rows * cols, grid_layout(sw, sh, rows, cols))
            }
            PartitionSpec::Bubble(b) => (b.count + 1, bubble_layout(sw, sh, &b)?),
            PartitionSpec::PerPixel => {
                let n = u64::from(sw) * u64::from(sh);
                if n > u64::from(u32::MAX / 4) {
                    return Err(Error::InvalidPartition(
                        "image too large for per-pixel subsections".into(),
                    ));
                }
                (n as u32, (0..n as u32).collect())
            }
        };

        let labels = dims
            .coords()
            .map(|p| {
                let s = dims.section_of(p);
                let q = GroupElement::between(s, Section::NW).map_coord(p, dims);
                let k = layout[(q.y * sw + q.x) as usize];
                s.index() as u32 * canonical_count + k
            })
            .collect();
        Ok(Self {
            dims,
            spec: *spec,
            canonical_count,
            labels,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spec(&self) -> &PartitionSpec {
        &self.spec
    }

    /// Total number of subsections, always a multiple of four.
    pub fn lambda(&self) -> u32 {
        self.canonical_count * 4
    }

    /// Subsections per section.
    pub fn canonical_count(&self) -> u32 {
        self.canonical_count
    }

    /// Global subsection ids in row-major pixel order.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, p: PixelCoord) -> u32 {
        self.labels[self.dims.index(p)]
    }

    pub fn canonical_id(&self, label: u32) -> u32 {
        label % self.canonical_count
    }

    pub fn section_of_label(&self, label: u32) -> Section {
        Section::ALL[(label / self.canonical_count) as usize]
    }

    fn check_label(&self, label: u32) -> Result<()> {
        if label >= self.lambda() {
            return Err(Error::SubsectionOutOfRange(label, self.lambda()));
        }
        Ok(())
    }

    /// The subsection that `g` exchanges with `label`.
    pub fn partner(&self, g: GroupElement, label: u32) -> Result<u32> {
        if g == GroupElement::E {
            return Err(Error::IdentityHasNoPairs);
        }
        self.check_label(label)?;
        Ok(self.partner_unchecked(g, label))
    }

    pub(crate) fn partner_unchecked(&self, g: GroupElement, label: u32) -> u32 {
        let s = g.map_section(self.section_of_label(label));
        s.index() as u32 * self.canonical_count + self.canonical_id(label)
    }

    /// Pixel count of every subsection, indexed by global id.
    pub fn pixel_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.lambda() as usize];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// The pairing of subsections exchanged by `g`.
    pub fn pair_set(&self, g: GroupElement) -> Result<PairSet> {
        PairSet::new(self, g)
    }

    /// Render the labels with a fixed 256-color palette (`id mod 256`).
    pub fn debug_image(&self) -> ImageBuffer {
        let palette = debug_palette();
        let pixels = self
            .labels
            .iter()
            .map(|&l| palette[(l % 256) as usize])
            .collect();
        ImageBuffer::new(self.dims.width(), self.dims.height(), pixels)
            .expect("label count matches dims")
    }
}

/// Subsection pairs `{l_p, l_q}` exchanged by a non-identity element.
///
/// `l_p` is the member that receives the "upper" map: the northern one for
/// `Rot` and `RefH`, the western one for `RefV`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    element: GroupElement,
    pairs: Vec<(u32, u32)>,
}

/// Free-function form of [`Partition::pair_set`].
pub fn pair_set(part: &Partition, g: GroupElement) -> Result<PairSet> {
    PairSet::new(part, g)
}

impl PairSet {
    fn new(part: &Partition, g: GroupElement) -> Result<Self> {
        if g == GroupElement::E {
            return Err(Error::IdentityHasNoPairs);
        }
        let pairs = (0..part.lambda())
            .filter(|&l| is_upper(g, part.section_of_label(l)))
            .map(|l| (l, part.partner_unchecked(g, l)))
            .collect();
        Ok(Self { element: g, pairs })
    }

    pub fn element(&self) -> GroupElement {
        self.element
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Whether `{a, b}` is a pair, in either order.
    pub fn contains(&self, a: u32, b: u32) -> bool {
        let (upper, lower) = if self.pairs.binary_search_by_key(&a, |p| p.0).is_ok() {
            (a, b)
        } else {
            (b, a)
        };
        self.pairs
            .binary_search_by_key(&upper, |p| p.0)
            .is_ok_and(|i| self.pairs[i].1 == lower)
    }
}

/// Whether subsections in `s` take the upper role under `g`.
pub(crate) fn is_upper(g: GroupElement, s: Section) -> bool {
    match g {
        GroupElement::RefV => s.is_west(),
        _ => s.is_north(),
    }
}

fn triangular_layout(sw: u32, sh: u32, triangles: u32) -> Vec<u32> {
    // Fan around the section's inner corner (the image center). The outer
    // boundary runs from the top-right corner along the top edge to the
    // top-left corner, then down the left edge; it is split into arcs of
    // equal length and each pixel center is assigned to the arc its ray hits.
    let (cx, cy) = (f64::from(sw), f64::from(sh));
    let length = cx + cy;
    let t = f64::from(triangles);
    let mut layout = Vec::with_capacity((sw * sh) as usize);
    for y in 0..sh {
        for x in 0..sw {
            let dx = cx - (f64::from(x) + 0.5);
            let dy = cy - (f64::from(y) + 0.5);
            let arc = if cx * dy >= cy * dx {
                cy * dx / dy
            } else {
                cx + cy - cx * dy / dx
            };
            let wedge = ((arc * t / length).floor() as u32).min(triangles - 1);
            layout.push(wedge);
        }
    }
    layout
}

fn grid_layout(sw: u32, sh: u32, rows: u32, cols: u32) -> Vec<u32> {
    let cell_w = sw / cols;
    let cell_h = sh / rows;
    let mut layout = Vec::with_capacity((sw * sh) as usize);
    for y in 0..sh {
        let row = (y / cell_h).min(rows - 1);
        for x in 0..sw {
            let col = (x / cell_w).min(cols - 1);
            layout.push(row * cols + col);
        }
    }
    layout
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Disk {
    cx: f64,
    cy: f64,
    r: f64,
}

fn bubble_disks(sw: u32, sh: u32, spec: &BubbleSpec) -> Result<Vec<Disk>> {
    let (w, h) = (f64::from(sw), f64::from(sh));
    let side = w.min(h);
    if spec.rmin * side < 0.5 {
        return Err(Error::InvalidPartition(format!(
            "smallest bubble radius {:.3}px is below half a pixel in a {sw}x{sh} section",
            spec.rmin * side
        )));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let disks = (0..spec.count)
        .map(|_| {
            let r = (spec.rmin + (spec.rmax - spec.rmin) * rng.next_f64()) * side;
            let cx = r + (w - 2.0 * r) * rng.next_f64();
            let cy = r + (h - 2.0 * r) * rng.next_f64();
            Disk { cx, cy, r }
        })
        .collect();
    Ok(disks)
}

fn bubble_layout(sw: u32, sh: u32, spec: &BubbleSpec) -> Result<Vec<u32>> {
    let disks = bubble_disks(sw, sh, spec)?;
    let mut layout = Vec::with_capacity((sw * sh) as usize);
    for y in 0..sh {
        let py = f64::from(y) + 0.5;
        for x in 0..sw {
            let px = f64::from(x) + 0.5;
            let id = disks
                .iter()
                .position(|d| {
                    let (dx, dy) = (px - d.cx, py - d.cy);
                    dx * dx + dy * dy <= d.r * d.r
                })
                .map_or(0, |k| k as u32 + 1);
            layout.push(id);
        }
    }
    Ok(layout)
}

/// Fixed 256-entry palette used for partition dumps.
pub fn debug_palette() -> [RgbPixel; 256] {
    const GOLDEN: f64 = 0.618_033_988_749_895;
    let mut palette = [RgbPixel::default(); 256];
    for (i, slot) in palette.iter_mut().enumerate() {
        let h = (i as f64 * GOLDEN).fract();
        let s = 0.45 + 0.55 * ((i % 3) as f64 / 2.0);
        let v = 0.55 + 0.45 * (((i / 3) % 3) as f64 / 2.0);
        *slot = hsv_to_rgb(HsvPixel { h, s, v });
    }
    palette
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use GroupElement::*;

    fn dims(w: u32, h: u32) -> Dims {
        Dims::new(w, h).unwrap()
    }

    fn distinct(part: &Partition) -> BTreeSet<u32> {
        part.labels().iter().copied().collect()
    }

    #[test]
    fn triangular_two_gives_eight() {
        let part =
            build_partition(&PartitionSpec::Triangular { triangles: 2 }, dims(8, 8)).unwrap();
        assert_eq!(part.lambda(), 8);
        assert_eq!(distinct(&part).len(), 8);
    }

    #[test]
    fn triangular_two_splits_square_section_on_its_diagonal() {
        let part =
            build_partition(&PartitionSpec::Triangular { triangles: 2 }, dims(8, 8)).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                // wedge 0 borders the top edge: pixels above the x = y diagonal
                let expected = u32::from(x <= y);
                assert_eq!(part.label(PixelCoord::new(x, y)), expected, "({x},{y})");
            }
        }
    }

    #[test]
    fn triangular_one_is_whole_section() {
        let part =
            build_partition(&PartitionSpec::Triangular { triangles: 1 }, dims(6, 4)).unwrap();
        assert_eq!(part.lambda(), 4);
        for p in part.dims().coords() {
            assert_eq!(part.label(p), part.dims().section_of(p).index() as u32);
        }
    }

    #[test]
    fn per_pixel_is_bijection() {
        let part = build_partition(&PartitionSpec::PerPixel, dims(4, 4)).unwrap();
        assert_eq!(part.lambda(), 16);
        assert_eq!(distinct(&part).len(), 16);
        // canonical id is the row-major index inside NW
        assert_eq!(part.label(PixelCoord::new(1, 1)), 3);
        assert_eq!(part.label(PixelCoord::new(2, 0)), 4 + 1);
    }

    #[test]
    fn grid_cells_have_four_pixels() {
        let part = build_partition(&PartitionSpec::Grid { rows: 2, cols: 2 }, dims(8, 8)).unwrap();
        assert_eq!(part.lambda(), 16);
        assert!(part.pixel_counts().iter().all(|&c| c == 4));
    }

    #[test]
    fn grid_remainder_goes_to_last_cells() {
        let part = build_partition(&PartitionSpec::Grid { rows: 2, cols: 2 }, dims(10, 6)).unwrap();
        // section 5x3: cells 2 wide / 1 high, last column 3 wide, last row 2 high
        let counts = part.pixel_counts();
        assert_eq!(&counts[..4], &[2, 3, 4, 6]);
    }

    #[test]
    fn grid_too_fine_rejected() {
        let err = build_partition(&PartitionSpec::Grid { rows: 3, cols: 1 }, dims(4, 4));
        assert!(matches!(err, Err(Error::InvalidPartition(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        let d = dims(32, 32);
        for spec in [
            PartitionSpec::Triangular { triangles: 0 },
            PartitionSpec::Grid { rows: 0, cols: 2 },
            PartitionSpec::Bubble(BubbleSpec::new(0, 1)),
            PartitionSpec::Bubble(BubbleSpec {
                rmin: 0.0,
                ..BubbleSpec::new(2, 1)
            }),
            PartitionSpec::Bubble(BubbleSpec {
                rmin: 0.4,
                rmax: 0.3,
                ..BubbleSpec::new(2, 1)
            }),
            PartitionSpec::Bubble(BubbleSpec {
                rmax: 0.6,
                ..BubbleSpec::new(2, 1)
            }),
        ] {
            assert!(build_partition(&spec, d).is_err(), "{spec:?}");
        }
    }

    #[test]
    fn bubble_radii_infeasible_for_tiny_section() {
        let spec = PartitionSpec::Bubble(BubbleSpec::new(3, 42));
        assert!(matches!(
            build_partition(&spec, dims(4, 4)),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn bubble_layout_basics() {
        let spec = PartitionSpec::Bubble(BubbleSpec::new(3, 42));
        let a = build_partition(&spec, dims(64, 48)).unwrap();
        let b = build_partition(&spec, dims(64, 48)).unwrap();
        assert_eq!(a.lambda(), 16);
        assert_eq!(a.labels(), b.labels());
        // background present, at least one disk visible
        let counts = a.pixel_counts();
        assert!(counts[0] > 0);
        assert!(counts[1..4].iter().any(|&c| c > 0));
        let other =
            build_partition(&PartitionSpec::Bubble(BubbleSpec::new(3, 43)), dims(64, 48)).unwrap();
        assert_ne!(a.labels(), other.labels());
    }

    #[test]
    fn bubble_disks_stay_inside_section() {
        let spec = BubbleSpec {
            count: 50,
            seed: 9,
            rmin: 0.05,
            rmax: 0.5,
        };
        for d in bubble_disks(20, 12, &spec).unwrap() {
            assert!(d.r >= 0.05 * 12.0 && d.r <= 0.5 * 12.0);
            assert!(d.cx - d.r >= 0.0 && d.cx + d.r <= 20.0);
            assert!(d.cy - d.r >= 0.0 && d.cy + d.r <= 12.0);
        }
    }

    #[test]
    fn pair_set_rot_on_single_cell_grid() {
        let part = build_partition(&PartitionSpec::Grid { rows: 1, cols: 1 }, dims(4, 4)).unwrap();
        // ids: NW=0, NE=1, SW=2, SE=3
        assert_eq!(part.pair_set(Rot).unwrap().pairs(), &[(0, 3), (1, 2)]);
        assert_eq!(part.pair_set(RefV).unwrap().pairs(), &[(0, 1), (2, 3)]);
        assert_eq!(part.pair_set(RefH).unwrap().pairs(), &[(0, 2), (1, 3)]);
    }

    #[test]
    fn identity_has_no_pair_set() {
        let part = build_partition(&PartitionSpec::PerPixel, dims(4, 4)).unwrap();
        assert!(matches!(part.pair_set(E), Err(Error::IdentityHasNoPairs)));
        assert!(matches!(part.partner(E, 0), Err(Error::IdentityHasNoPairs)));
        assert!(matches!(
            part.partner(Rot, 16),
            Err(Error::SubsectionOutOfRange(16, 16))
        ));
    }

    #[test]
    fn pair_set_is_perfect_matching_and_involution() {
        let part = build_partition(&PartitionSpec::Grid { rows: 2, cols: 3 }, dims(12, 8)).unwrap();
        for g in GroupElement::NON_IDENTITY {
            let set = part.pair_set(g).unwrap();
            let mut seen = BTreeSet::new();
            for &(a, b) in set.pairs() {
                assert_ne!(a, b);
                assert!(seen.insert(a) && seen.insert(b));
                assert!(set.contains(a, b) && set.contains(b, a));
            }
            assert_eq!(seen.len() as u32, part.lambda());
            for l in 0..part.lambda() {
                assert_eq!(part.partner(g, part.partner(g, l).unwrap()).unwrap(), l);
            }
            assert!(!set.contains(0, 0));
        }
    }

    #[test]
    fn debug_image_uses_palette() {
        let part = build_partition(&PartitionSpec::Grid { rows: 1, cols: 1 }, dims(4, 4)).unwrap();
        let img = part.debug_image();
        let pal = debug_palette();
        assert_eq!(img.pixel(PixelCoord::new(0, 0)), pal[0]);
        assert_eq!(img.pixel(PixelCoord::new(3, 3)), pal[3]);
        let unique: BTreeSet<[u8; 3]> = pal.iter().map(|p| p.channels()).collect();
        assert!(unique.len() > 200);
    }
}

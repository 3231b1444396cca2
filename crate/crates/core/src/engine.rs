//! Assigning channel maps to subsections, rendering the distortion and
//! checking that an output really carries the claimed color symmetry.
//!
//! A distortion realizes one group element `g`. For every pair `{l_p, l_q}`
//! exchanged by `g` the upper member gets one set of maps and the lower
//! member another; an identity map keeps the source color.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::color::{ChannelMaps, RgbPixel};
use crate::error::{Error, Result};
use crate::partition::{is_upper, Partition, PartitionSpec};
use crate::symmetry::{Dims, GroupElement, PixelCoord, Section};

/// Row-major 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    pixels: Vec<RgbPixel>,
}

impl ImageBuffer {
    /// Every pixel must agree on whether it has alpha.
    pub fn new(width: u32, height: u32, pixels: Vec<RgbPixel>) -> Result<Self> {
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                actual: (pixels.len() as u32, 1),
            });
        }
        if let Some(first) = pixels.first() {
            let alpha = first.a.is_some();
            if pixels.iter().any(|p| p.a.is_some() != alpha) {
                return Err(Error::MixedAlpha);
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: u32, height: u32, color: RgbPixel) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> RgbPixel) -> Result<Self> {
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn size(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn dims(&self) -> Result<Dims> {
        Dims::new(self.width, self.height)
    }

    pub fn has_alpha(&self) -> bool {
        self.pixels.first().is_some_and(|p| p.a.is_some())
    }

    pub fn pixels(&self) -> &[RgbPixel] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [RgbPixel] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<RgbPixel> {
        self.pixels
    }

    pub fn pixel(&self, p: PixelCoord) -> RgbPixel {
        self.pixels[p.y as usize * self.width as usize + p.x as usize]
    }

    pub fn set_pixel(&mut self, p: PixelCoord, c: RgbPixel) {
        self.pixels[p.y as usize * self.width as usize + p.x as usize] = c;
    }

    fn check_size(&self, dims: Dims) -> Result<()> {
        if self.size() != (dims.width(), dims.height()) {
            return Err(Error::DimensionMismatch {
                expected: (dims.width(), dims.height()),
                actual: self.size(),
            });
        }
        Ok(())
    }
}

/// Channel maps for every subsection of a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    maps: Vec<ChannelMaps>,
    element: Option<GroupElement>,
}

impl Assignment {
    /// All subsections keep their colors.
    pub fn identity(lambda: u32) -> Self {
        Self {
            maps: vec![ChannelMaps::identity(); lambda as usize],
            element: None,
        }
    }

    /// Build from explicit `(subsection, maps)` entries. Every id in
    /// `0..lambda` must appear; later entries win.
    pub fn from_entries(
        lambda: u32,
        entries: impl IntoIterator<Item = (u32, ChannelMaps)>,
    ) -> Result<Self> {
        let mut maps: Vec<Option<ChannelMaps>> = vec![None; lambda as usize];
        for (id, m) in entries {
            let slot = maps
                .get_mut(id as usize)
                .ok_or(Error::SubsectionOutOfRange(id, lambda))?;
            *slot = Some(m);
        }
        let maps = maps
            .into_iter()
            .enumerate()
            .map(|(id, m)| m.ok_or(Error::IncompleteAssignment(id as u32)))
            .collect::<Result<_>>()?;
        Ok(Self {
            maps,
            element: None,
        })
    }

    pub fn with_element(mut self, g: GroupElement) -> Self {
        self.element = Some(g);
        self
    }

    pub fn element(&self) -> Option<GroupElement> {
        self.element
    }

    pub fn lambda(&self) -> u32 {
        self.maps.len() as u32
    }

    pub fn get(&self, id: u32) -> Option<&ChannelMaps> {
        self.maps.get(id as usize)
    }

    /// Replace the maps of one subsection.
    pub fn set(&mut self, id: u32, m: ChannelMaps) -> Result<()> {
        let lambda = self.lambda();
        let slot = self
            .maps
            .get_mut(id as usize)
            .ok_or(Error::SubsectionOutOfRange(id, lambda))?;
        *slot = m;
        Ok(())
    }

    pub fn maps(&self) -> &[ChannelMaps] {
        &self.maps
    }

    fn check_covers(&self, part: &Partition) -> Result<()> {
        if self.lambda() < part.lambda() {
            return Err(Error::IncompleteAssignment(self.lambda()));
        }
        if self.lambda() > part.lambda() {
            return Err(Error::SubsectionOutOfRange(
                self.lambda() - 1,
                part.lambda(),
            ));
        }
        Ok(())
    }
}

/// Which pairs a symmetric assignment touches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairScope {
    All,
    /// Explicit `{l_p, l_q}` pairs, in either order.
    Pairs(Vec<(u32, u32)>),
}

/// Assign `upper` to the upper member and `lower` to the lower member of each
/// pair in `scope`. Subsections outside the scope keep their colors.
pub fn symmetric_assignment(
    part: &Partition,
    g: GroupElement,
    upper: &ChannelMaps,
    lower: &ChannelMaps,
    scope: &PairScope,
) -> Result<Assignment> {
    let pairs = part.pair_set(g)?;
    let mut a = Assignment::identity(part.lambda()).with_element(g);
    let chosen: Vec<(u32, u32)> = match scope {
        PairScope::All => pairs.pairs().to_vec(),
        PairScope::Pairs(list) => list
            .iter()
            .map(|&(x, y)| {
                if x >= part.lambda() || y >= part.lambda() || !pairs.contains(x, y) {
                    return Err(Error::NotAPair(x, y, g));
                }
                if is_upper(g, part.section_of_label(x)) {
                    Ok((x, y))
                } else {
                    Ok((y, x))
                }
            })
            .collect::<Result<_>>()?,
    };
    for (p, q) in chosen {
        a.maps[p as usize] = upper.clone();
        a.maps[q as usize] = lower.clone();
    }
    Ok(a)
}

/// Rows per parallel work item.
const BAND_ROWS: usize = 16;

/// Recolor every pixel with the maps of its subsection. Geometry and alpha
/// are untouched.
pub fn apply_distortion(
    img: &ImageBuffer,
    part: &Partition,
    a: &Assignment,
) -> Result<ImageBuffer> {
    img.check_size(part.dims())?;
    a.check_covers(part)?;
    let band = BAND_ROWS * img.width as usize;
    let mut out = img.pixels.clone();
    out.par_chunks_mut(band)
        .zip(part.labels().par_chunks(band))
        .for_each(|(pixels, labels)| {
            for (px, &l) in pixels.iter_mut().zip(labels) {
                *px = a.maps[l as usize].apply_rgb(*px);
            }
        });
    Ok(ImageBuffer {
        width: img.width,
        height: img.height,
        pixels: out,
    })
}

/// Spatially permute an image by `g`: `out(p) = img(g(p))`.
pub fn transform_image(img: &ImageBuffer, g: GroupElement) -> Result<ImageBuffer> {
    let dims = img.dims()?;
    ImageBuffer::from_fn(img.width, img.height, |x, y| {
        img.pixel(g.map_coord(PixelCoord::new(x, y), dims))
    })
}

/// A single failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub x: u32,
    pub y: u32,
    pub channel: Channel,
    pub expected: u32,
    pub actual: u32,
}

/// What a [`Violation`] refers to. `Pair` compares subsection ids: the
/// expected partner against the label actually found at the mirrored pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    R,
    G,
    B,
    A,
    Pair,
}

/// Outcome of [`verify_symmetry`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub element: GroupElement,
    pub violations: Vec<Violation>,
    /// Largest absolute error in the R, G and B channels.
    pub max_abs_error: [u8; 3],
    pub pixels_checked: usize,
}

/// Check that `out` is `src` recolored by `a` (within `tol` per 8-bit
/// channel), and that the assignment is consistent across the pairing of `g`:
/// the subsection found at `g(p)` is the partner of the one at `p`, and it
/// carries the maps assigned to that partner.
pub fn verify_symmetry(
    src: &ImageBuffer,
    out: &ImageBuffer,
    part: &Partition,
    a: &Assignment,
    g: GroupElement,
    tol: u8,
) -> Result<VerifyReport> {
    let dims = part.dims();
    src.check_size(dims)?;
    out.check_size(dims)?;
    a.check_covers(part)?;
    if let Some(declared) = a.element {
        if declared != g {
            return Err(Error::ElementMismatch {
                declared,
                requested: g,
            });
        }
    }

    let width = dims.width() as usize;
    let band = BAND_ROWS * width;
    let labels = part.labels();
    let partials: Vec<(Vec<Violation>, [u8; 3])> = src
        .pixels
        .par_chunks(band)
        .zip(out.pixels.par_chunks(band))
        .enumerate()
        .map(|(band_idx, (src_band, out_band))| {
            let mut violations = Vec::new();
            let mut max_err = [0u8; 3];
            for (i, (s, o)) in src_band.iter().zip(out_band).enumerate() {
                let index = band_idx * band + i;
                let p = dims.coord(index);
                let label = labels[index];
                let expected = a.maps[label as usize].apply_rgb(*s);
                let channels = [
                    (Channel::R, expected.r, o.r),
                    (Channel::G, expected.g, o.g),
                    (Channel::B, expected.b, o.b),
                ];
                for (c, (ch, e, v)) in channels.into_iter().enumerate() {
                    let err = e.abs_diff(v);
                    max_err[c] = max_err[c].max(err);
                    if err > tol {
                        violations.push(Violation {
                            x: p.x,
                            y: p.y,
                            channel: ch,
                            expected: e.into(),
                            actual: v.into(),
                        });
                    }
                }
                if expected.a != o.a {
                    violations.push(Violation {
                        x: p.x,
                        y: p.y,
                        channel: Channel::A,
                        expected: expected.a.map_or(256, u32::from),
                        actual: o.a.map_or(256, u32::from),
                    });
                }
                if g != GroupElement::E {
                    let partner = part.partner_unchecked(g, label);
                    let mirrored = labels[dims.index(g.map_coord(p, dims))];
                    if mirrored != partner || a.maps[mirrored as usize] != a.maps[partner as usize]
                    {
                        violations.push(Violation {
                            x: p.x,
                            y: p.y,
                            channel: Channel::Pair,
                            expected: partner,
                            actual: mirrored,
                        });
                    }
                }
            }
            (violations, max_err)
        })
        .collect();

    let mut violations = Vec::new();
    let mut max_abs_error = [0u8; 3];
    for (v, m) in partials {
        violations.extend(v);
        for c in 0..3 {
            max_abs_error[c] = max_abs_error[c].max(m[c]);
        }
    }
    Ok(VerifyReport {
        ok: violations.is_empty(),
        element: g,
        violations,
        max_abs_error,
        pixels_checked: dims.pixel_count(),
    })
}

/// Largest palette [`check_transitive`] accepts.
pub const MAX_PALETTE: usize = 256;

/// A color permutation in two-line form: `top[i]` goes to `bottom[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoLine {
    pub top: Vec<[u8; 3]>,
    pub bottom: Vec<[u8; 3]>,
}

impl TwoLine {
    /// Image of `c`, if `c` is in the top row.
    pub fn get(&self, c: [u8; 3]) -> Option<[u8; 3]> {
        self.top
            .iter()
            .position(|&t| t == c)
            .map(|i| self.bottom[i])
    }

    pub fn len(&self) -> usize {
        self.top.len()
    }

    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.top == self.bottom
    }
}

/// Result of [`check_transitive`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitiveCheck {
    /// True iff the induced color map is injective.
    pub bijective: bool,
    /// The induced map; source colors in order of first appearance.
    pub witness: TwoLine,
}

/// Induced palette map `src(p) -> out(p)`. Fails if `src` has too many
/// colors or one source color goes to two different output colors.
pub fn check_transitive(src: &ImageBuffer, out: &ImageBuffer) -> Result<TransitiveCheck> {
    if src.size() != out.size() {
        return Err(Error::DimensionMismatch {
            expected: src.size(),
            actual: out.size(),
        });
    }
    let mut index: HashMap<[u8; 3], usize> = HashMap::new();
    let mut witness = TwoLine {
        top: Vec::new(),
        bottom: Vec::new(),
    };
    for (s, o) in src.pixels.iter().zip(&out.pixels) {
        let (s, o) = (s.channels(), o.channels());
        match index.get(&s) {
            Some(&i) if witness.bottom[i] != o => {
                return Err(Error::NotAFunction {
                    src: s,
                    first: witness.bottom[i],
                    second: o,
                });
            }
            Some(_) => {}
            None => {
                if witness.top.len() == MAX_PALETTE {
                    return Err(Error::PaletteTooLarge { limit: MAX_PALETTE });
                }
                index.insert(s, witness.top.len());
                witness.top.push(s);
                witness.bottom.push(o);
            }
        }
    }
    let mut image = witness.bottom.clone();
    image.sort_unstable();
    image.dedup();
    Ok(TransitiveCheck {
        bijective: image.len() == witness.bottom.len(),
        witness,
    })
}

/// A permutation of the four demo palette slots: slot `i` goes to `self.0[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    pub fn new(map: [u8; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &m in &map {
            if m > 3 || std::mem::replace(&mut seen[m as usize], true) {
                return Err(Error::InconsistentPermutation(format!(
                    "{map:?} is not a permutation of 0..4"
                )));
            }
        }
        Ok(Self(map))
    }

    pub fn apply(self, i: u8) -> u8 {
        self.0[i as usize]
    }

    /// `self` after `other`.
    pub fn then(self, other: Perm4) -> Perm4 {
        Perm4(std::array::from_fn(|i| other.apply(self.0[i])))
    }

    pub fn is_involution(self) -> bool {
        self.then(self) == Self::IDENTITY
    }
}

/// Flat-colored rectangle whose subsections carry `palette` colors such that
/// each declared `(element, permutation)` is a color symmetry: the color at
/// `g(p)` is the permuted color at `p`.
///
/// Every subsection orbit under the declared elements gets a free color,
/// cycling through the palette, so all four colors appear whenever there are
/// at least four orbits.
pub fn make_demo(
    style: &PartitionSpec,
    palette: [RgbPixel; 4],
    perms: &[(GroupElement, Perm4)],
    dims: Dims,
) -> Result<ImageBuffer> {
    let distinct = palette
        .iter()
        .enumerate()
        .all(|(i, a)| palette[..i].iter().all(|b| b.channels() != a.channels()));
    if !distinct {
        return Err(Error::InconsistentPermutation(
            "palette colors must be distinct".into(),
        ));
    }
    let group = demo_homomorphism(perms)?;
    let part = Partition::build(style, dims)?;
    let k_count = part.canonical_count();

    // section -> (orbit representative, element taking the rep there)
    let mut orbit_of = [(Section::NW, GroupElement::E); 4];
    let mut reps = Vec::new();
    for s in Section::ALL {
        let found = reps
            .iter()
            .find_map(|&r: &Section| group.get(&GroupElement::between(r, s)).map(|_| r));
        match found {
            Some(r) => orbit_of[s.index()] = (r, GroupElement::between(r, s)),
            None => {
                reps.push(s);
                orbit_of[s.index()] = (s, GroupElement::E);
            }
        }
    }

    // color slot for every global subsection id
    let mut slot = vec![0u8; part.lambda() as usize];
    for k in 0..k_count {
        for s in Section::ALL {
            let (rep, h) = orbit_of[s.index()];
            let rep_pos = reps.iter().position(|&r| r == rep).unwrap();
            let free = ((u64::from(k) * reps.len() as u64 + rep_pos as u64) % 4) as u8;
            slot[(s.index() as u32 * k_count + k) as usize] = group[&h].apply(free);
        }
    }

    let pixels = part
        .labels()
        .iter()
        .map(|&l| palette[slot[l as usize] as usize])
        .collect();
    ImageBuffer::new(dims.width(), dims.height(), pixels)
}

/// Extend the declared permutations to the subgroup they generate, checking
/// that the assignment is a homomorphism.
fn demo_homomorphism(perms: &[(GroupElement, Perm4)]) -> Result<HashMap<GroupElement, Perm4>> {
    let mut group: HashMap<GroupElement, Perm4> =
        HashMap::from([(GroupElement::E, Perm4::IDENTITY)]);
    for &(g, p) in perms {
        if g == GroupElement::E && p != Perm4::IDENTITY {
            return Err(Error::InconsistentPermutation(
                "the identity element must map to the identity permutation".into(),
            ));
        }
        if !p.is_involution() {
            return Err(Error::InconsistentPermutation(format!(
                "{g} is its own inverse but {:?} is not an involution",
                p.0
            )));
        }
        if let Some(&existing) = group.get(&g) {
            if existing != p {
                return Err(Error::InconsistentPermutation(format!(
                    "{g} would have to realize both {:?} and {:?}",
                    existing.0, p.0
                )));
            }
            continue;
        }
        let known: Vec<(GroupElement, Perm4)> = group.iter().map(|(&h, &q)| (h, q)).collect();
        for (h, q) in known {
            let gh = g.compose(h);
            let composed = q.then(p);
            if q.then(p) != p.then(q) {
                return Err(Error::InconsistentPermutation(format!(
                    "permutations for {g} and {h} do not commute"
                )));
            }
            match group.get(&gh) {
                Some(&existing) if existing != composed => {
                    return Err(Error::InconsistentPermutation(format!(
                        "{gh} = {g}{h} would have to realize both {:?} and {:?}",
                        existing.0, composed.0
                    )));
                }
                _ => {
                    group.insert(gh, composed);
                }
            }
        }
    }
    Ok(group)
}

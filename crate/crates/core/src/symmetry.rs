//! The rectangle group D2 (Klein four-group), its action on pixel
//! coordinates and on the four quadrant sections of the image.
//!
//! Coordinates have their origin at the top-left with `y` growing downward.
//! Width and height must be even so that both mirror axes fall between
//! pixel rows/columns and no pixel is fixed by a non-identity element.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One of the four symmetries of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// Identity.
    E,
    /// Rotation by 180 degrees.
    Rot,
    /// Mirror in the horizontal axis (swaps north and south).
    RefH,
    /// Mirror in the vertical axis (swaps east and west).
    RefV,
}

impl GroupElement {
    pub const ALL: [GroupElement; 4] = [Self::E, Self::Rot, Self::RefH, Self::RefV];
    pub const NON_IDENTITY: [GroupElement; 3] = [Self::Rot, Self::RefH, Self::RefV];

    // bit 0: flips rows, bit 1: flips columns
    const fn bits(self) -> u8 {
        match self {
            Self::E => 0b00,
            Self::RefH => 0b01,
            Self::RefV => 0b10,
            Self::Rot => 0b11,
        }
    }

    const fn from_bits(bits: u8) -> Self {
        match bits & 0b11 {
            0b00 => Self::E,
            0b01 => Self::RefH,
            0b10 => Self::RefV,
            _ => Self::Rot,
        }
    }

    /// Group product `self * other` (apply `other` first). D2 is abelian, so
    /// the order does not matter.
    pub const fn compose(self, other: GroupElement) -> GroupElement {
        Self::from_bits(self.bits() ^ other.bits())
    }

    pub const fn inverse(self) -> GroupElement {
        self
    }

    const fn flips_rows(self) -> bool {
        self.bits() & 0b01 != 0
    }

    const fn flips_cols(self) -> bool {
        self.bits() & 0b10 != 0
    }

    /// Image of `p` under this element.
    pub fn map_coord(self, p: PixelCoord, dims: Dims) -> PixelCoord {
        debug_assert!(dims.contains(p), "{p:?} outside {dims:?}");
        PixelCoord {
            x: if self.flips_cols() {
                dims.width - 1 - p.x
            } else {
                p.x
            },
            y: if self.flips_rows() {
                dims.height - 1 - p.y
            } else {
                p.y
            },
        }
    }

    /// Image of a whole section under this element.
    pub const fn map_section(self, s: Section) -> Section {
        Section::from_bits(s.bits() ^ self.bits())
    }

    /// The unique element carrying `from` onto `to`.
    pub const fn between(from: Section, to: Section) -> GroupElement {
        Self::from_bits(from.bits() ^ to.bits())
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::E => "e",
            Self::Rot => "rot",
            Self::RefH => "refh",
            Self::RefV => "refv",
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl serde::Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for GroupElement {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "e" => Ok(Self::E),
            "rot" => Ok(Self::Rot),
            "refh" => Ok(Self::RefH),
            "refv" => Ok(Self::RefV),
            _ => Err(format!(
                "unknown group element `{s}` (expected e, rot, refh or refv)"
            )),
        }
    }
}

/// Free-function form of [`GroupElement::compose`].
pub const fn compose(a: GroupElement, b: GroupElement) -> GroupElement {
    a.compose(b)
}

/// One of the four quadrants cut out by the mirror axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    NW,
    NE,
    SW,
    SE,
}

impl Section {
    /// Sections in index order.
    pub const ALL: [Section; 4] = [Self::NW, Self::NE, Self::SW, Self::SE];

    // bit 0: south, bit 1: east
    const fn bits(self) -> u8 {
        match self {
            Self::NW => 0b00,
            Self::SW => 0b01,
            Self::NE => 0b10,
            Self::SE => 0b11,
        }
    }

    const fn from_bits(bits: u8) -> Self {
        match bits & 0b11 {
            0b00 => Self::NW,
            0b01 => Self::SW,
            0b10 => Self::NE,
            _ => Self::SE,
        }
    }

    /// Position in `NW, NE, SW, SE` order.
    pub const fn index(self) -> usize {
        match self {
            Self::NW => 0,
            Self::NE => 1,
            Self::SW => 2,
            Self::SE => 3,
        }
    }

    pub const fn is_north(self) -> bool {
        matches!(self, Self::NW | Self::NE)
    }

    pub const fn is_west(self) -> bool {
        matches!(self, Self::NW | Self::SW)
    }
}

/// A pixel position; `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelCoord {
    pub x: u32,
    pub y: u32,
}

impl PixelCoord {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

/// Image dimensions, guaranteed non-zero and even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    width: u32,
    height: u32,
}

impl Dims {
    pub fn new(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
            return Err(Error::InvalidDims { width, height });
        }
        Ok(Self { width, height })
    }

    pub const fn width(self) -> u32 {
        self.width
    }

    pub const fn height(self) -> u32 {
        self.height
    }

    pub const fn pixel_count(self) -> usize {
        self.width as usize * self.height as usize
    }

    /// Size of one section.
    pub const fn section_size(self) -> (u32, u32) {
        (self.width / 2, self.height / 2)
    }

    pub const fn contains(self, p: PixelCoord) -> bool {
        p.x < self.width && p.y < self.height
    }

    /// Row-major index of `p`.
    pub const fn index(self, p: PixelCoord) -> usize {
        p.y as usize * self.width as usize + p.x as usize
    }

    pub const fn coord(self, index: usize) -> PixelCoord {
        PixelCoord {
            x: (index % self.width as usize) as u32,
            y: (index / self.width as usize) as u32,
        }
    }

    /// All pixel coordinates in row-major order.
    pub fn coords(self) -> impl Iterator<Item = PixelCoord> {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| PixelCoord { x, y }))
    }

    pub fn section_of(self, p: PixelCoord) -> Section {
        let east = p.x >= self.width / 2;
        let south = p.y >= self.height / 2;
        match (south, east) {
            (false, false) => Section::NW,
            (false, true) => Section::NE,
            (true, false) => Section::SW,
            (true, true) => Section::SE,
        }
    }
}

/// Free-function form of [`GroupElement::map_coord`] that checks bounds.
pub fn map_coord(g: GroupElement, p: PixelCoord, dims: Dims) -> Option<PixelCoord> {
    dims.contains(p).then(|| g.map_coord(p, dims))
}

/// Free-function form of [`Dims::section_of`].
pub fn section_of(p: PixelCoord, dims: Dims) -> Section {
    dims.section_of(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use GroupElement::*;

    #[test]
    fn composition_examples() {
        assert_eq!(compose(RefH, RefV), Rot);
        assert_eq!(compose(RefV, RefH), Rot);
        assert_eq!(compose(Rot, Rot), E);
        for g in GroupElement::ALL {
            assert_eq!(compose(E, g), g);
            assert_eq!(compose(g, g), E);
            assert_eq!(g.inverse(), g);
        }
    }

    #[test]
    fn map_coord_examples() {
        let d = Dims::new(4, 4).unwrap();
        assert_eq!(
            Rot.map_coord(PixelCoord::new(0, 0), d),
            PixelCoord::new(3, 3)
        );
        assert_eq!(
            RefH.map_coord(PixelCoord::new(1, 0), d),
            PixelCoord::new(1, 3)
        );
        assert_eq!(
            RefV.map_coord(PixelCoord::new(1, 0), d),
            PixelCoord::new(2, 0)
        );
        assert_eq!(map_coord(Rot, PixelCoord::new(4, 0), d), None);
    }

    #[test]
    fn odd_or_empty_dims_rejected() {
        assert!(Dims::new(5, 4).is_err());
        assert!(Dims::new(4, 3).is_err());
        assert!(Dims::new(0, 4).is_err());
        assert!(Dims::new(6, 8).is_ok());
    }

    #[test]
    fn map_coord_is_involution() {
        let d = Dims::new(6, 8).unwrap();
        for g in GroupElement::ALL {
            for p in d.coords() {
                assert_eq!(g.map_coord(g.map_coord(p, d), d), p);
            }
        }
    }

    #[test]
    fn non_identity_has_no_fixed_pixels() {
        let d = Dims::new(6, 8).unwrap();
        for g in GroupElement::NON_IDENTITY {
            assert!(d.coords().all(|p| g.map_coord(p, d) != p));
        }
    }

    #[test]
    fn section_examples() {
        let d = Dims::new(4, 4).unwrap();
        assert_eq!(section_of(PixelCoord::new(0, 0), d), Section::NW);
        assert_eq!(section_of(PixelCoord::new(2, 0), d), Section::NE);
        assert_eq!(section_of(PixelCoord::new(1, 2), d), Section::SW);
        assert_eq!(section_of(PixelCoord::new(3, 3), d), Section::SE);
    }

    #[test]
    fn rotation_swaps_sections_diagonally() {
        let d = Dims::new(8, 8).unwrap();
        for p in d.coords() {
            let expected = match d.section_of(p) {
                Section::NW => Section::SE,
                Section::SE => Section::NW,
                Section::NE => Section::SW,
                Section::SW => Section::NE,
            };
            assert_eq!(d.section_of(Rot.map_coord(p, d)), expected);
        }
    }

    #[test]
    fn section_action_tables() {
        use Section::*;
        let table = [
            (Rot, [(NW, SE), (NE, SW)]),
            (RefH, [(NW, SW), (NE, SE)]),
            (RefV, [(NW, NE), (SW, SE)]),
        ];
        for (g, pairs) in table {
            for (a, b) in pairs {
                assert_eq!(g.map_section(a), b);
                assert_eq!(g.map_section(b), a);
                assert_eq!(GroupElement::between(a, b), g);
            }
        }
        for s in Section::ALL {
            assert_eq!(E.map_section(s), s);
        }
    }

    #[test]
    fn section_action_agrees_with_pixel_action() {
        let d = Dims::new(6, 4).unwrap();
        for g in GroupElement::ALL {
            for p in d.coords() {
                assert_eq!(
                    d.section_of(g.map_coord(p, d)),
                    g.map_section(d.section_of(p))
                );
            }
        }
    }

    #[test]
    fn parse_names_case_insensitive() {
        assert_eq!("ROT".parse::<GroupElement>(), Ok(Rot));
        assert_eq!("RefH".parse::<GroupElement>(), Ok(RefH));
        assert_eq!("refv".parse::<GroupElement>(), Ok(RefV));
        assert_eq!("e".parse::<GroupElement>(), Ok(E));
        assert!("r0t".parse::<GroupElement>().is_err());
    }

    #[test]
    fn index_coord_roundtrip() {
        let d = Dims::new(6, 8).unwrap();
        for (i, p) in d.coords().enumerate() {
            assert_eq!(d.index(p), i);
            assert_eq!(d.coord(i), p);
        }
    }
}

//! Color-symmetric distortion of raster images.
//!
//! An image is cut by its two mirror axes into four sections, each section
//! is subdivided into subsections, and subsections exchanged by an element
//! of the rectangle group D2 receive HSV channel maps so that the element
//! acts on the output as a color permutation.
//!
//! ```
//! use chromasym::{
//!     apply_distortion, symmetric_assignment, verify_symmetry, ChannelMapSpec, ChannelMaps,
//!     Dims, GroupElement, ImageBuffer, PairScope, Partition, PartitionSpec, RgbPixel,
//! };
//!
//! let img = ImageBuffer::from_fn(8, 8, |x, y| RgbPixel::rgb(x as u8 * 30, y as u8 * 30, 90))?;
//! let part = Partition::build(&PartitionSpec::Grid { rows: 2, cols: 2 }, Dims::new(8, 8)?)?;
//! let a = symmetric_assignment(
//!     &part,
//!     GroupElement::Rot,
//!     &ChannelMaps::identity(),
//!     &ChannelMaps::hue(ChannelMapSpec::F3),
//!     &PairScope::All,
//! )?;
//! let out = apply_distortion(&img, &part, &a)?;
//! assert!(verify_symmetry(&img, &out, &part, &a, GroupElement::Rot, 1)?.ok);
//! # Ok::<(), chromasym::Error>(())
//! ```

pub mod color;
pub mod engine;
pub mod error;
pub mod io;
pub mod partition;
mod rng;
pub mod symmetry;

pub use color::{
    eval_map, hsv_to_rgb, map_table_csv, rgb_to_hsv, ChannelMapSpec, ChannelMaps, Harmonic,
    HsvPixel, Polynomial, RgbPixel,
};
pub use engine::{
    apply_distortion, check_transitive, make_demo, symmetric_assignment, transform_image,
    verify_symmetry, Assignment, Channel, ImageBuffer, PairScope, Perm4, TransitiveCheck, TwoLine,
    VerifyReport, Violation,
};
pub use error::{Error, Result};
pub use io::{load_image, parse_config, save_image, DistortConfig, LoadOptions, LoadedImage};
pub use partition::{build_partition, pair_set, BubbleSpec, PairSet, Partition, PartitionSpec};
pub use rng::SplitMix64;
pub use symmetry::{compose, map_coord, section_of, Dims, GroupElement, PixelCoord, Section};

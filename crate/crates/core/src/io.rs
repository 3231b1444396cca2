//! PNG decode/encode and the JSON distortion config.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::color::{ChannelMapSpec, ChannelMaps, Harmonic, Polynomial, RgbPixel};
use crate::engine::{Assignment, ImageBuffer};
use crate::error::{Error, Result};
use crate::partition::{is_upper, BubbleSpec, Partition, PartitionSpec};
use crate::symmetry::GroupElement;

/// Options for [`load_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// Drop the last row/column of odd-sized images instead of failing.
    pub crop_to_even: bool,
    pub strip_alpha: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            crop_to_even: true,
            strip_alpha: false,
        }
    }
}

/// A decoded image plus anything worth telling the user about it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedImage {
    pub image: ImageBuffer,
    pub warnings: Vec<String>,
}

/// Decode a PNG into an 8-bit RGB(A) buffer. Palette and grayscale images
/// are expanded; 16-bit samples keep their high byte.
pub fn load_image(path: impl AsRef<Path>, opts: LoadOptions) -> Result<LoadedImage> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let decode_err = |source| Error::Decode {
        path: path.to_owned(),
        source,
    };
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(decode_err)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Unsupported {
            path: path.to_owned(),
            reason: "image too large".into(),
        })?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(decode_err)?;
    let (width, height) = (info.width, info.height);

    let bytes_per_sample = match info.bit_depth {
        png::BitDepth::Eight => 1,
        png::BitDepth::Sixteen => 2,
        other => {
            return Err(Error::Unsupported {
                path: path.to_owned(),
                reason: format!("bit depth {other:?} after expansion"),
            })
        }
    };
    let samples = info.color_type.samples();
    let has_alpha = matches!(
        info.color_type,
        png::ColorType::GrayscaleAlpha | png::ColorType::Rgba
    ) && !opts.strip_alpha;

    let mut warnings = Vec::new();
    let (mut out_w, mut out_h) = (width, height);
    if width % 2 == 1 || height % 2 == 1 {
        if !opts.crop_to_even {
            return Err(Error::OddDimensions {
                path: path.to_owned(),
                width,
                height,
            });
        }
        out_w -= width % 2;
        out_h -= height % 2;
        warnings.push(format!(
            "{}: cropped odd size {width}x{height} to {out_w}x{out_h}",
            path.display()
        ));
    }

    let stride = info.line_size;
    let mut pixels = Vec::with_capacity(out_w as usize * out_h as usize);
    for y in 0..out_h as usize {
        let row = &buf[y * stride..(y + 1) * stride];
        for x in 0..out_w as usize {
            let base = x * samples * bytes_per_sample;
            // high byte first for 16-bit samples
            let s = |i: usize| row[base + i * bytes_per_sample];
            let (r, g, b, a) = match samples {
                1 => (s(0), s(0), s(0), None),
                2 => (s(0), s(0), s(0), Some(s(1))),
                3 => (s(0), s(1), s(2), None),
                _ => (s(0), s(1), s(2), Some(s(3))),
            };
            pixels.push(RgbPixel {
                r,
                g,
                b,
                a: if has_alpha { a } else { None },
            });
        }
    }
    Ok(LoadedImage {
        image: ImageBuffer::new(out_w, out_h, pixels)?,
        warnings,
    })
}

/// Encode `img` as an 8-bit PNG (RGBA when the buffer has alpha).
/// Encoder settings are fixed, so equal buffers give equal bytes.
pub fn encode_png(img: &ImageBuffer, out: impl Write) -> Result<()> {
    let mut encoder = png::Encoder::new(out, img.width(), img.height());
    let alpha = img.has_alpha();
    encoder.set_color(if alpha {
        png::ColorType::Rgba
    } else {
        png::ColorType::Rgb
    });
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_compression(png::Compression::Balanced);
    encoder.set_filter(png::Filter::Adaptive);
    let mut writer = encoder.write_header()?;
    let mut data = Vec::with_capacity(img.pixels().len() * if alpha { 4 } else { 3 });
    for p in img.pixels() {
        data.extend_from_slice(&p.channels());
        if alpha {
            data.push(p.a.unwrap_or(255));
        }
    }
    writer.write_image_data(&data)?;
    writer.finish()?;
    Ok(())
}

pub fn save_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    encode_png(img, &mut w)?;
    w.flush().map_err(io_err)
}

/// Which member(s) of each pair a map entry targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    Upper,
    Lower,
    Both,
}

impl PairSide {
    fn name(self) -> &'static str {
        match self {
            Self::Upper => "upper",
            Self::Lower => "lower",
            Self::Both => "both",
        }
    }
}

/// The subsections a map entry applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapTarget {
    /// Members of the pairs exchanged by the config's element; `None` means
    /// every pair.
    Pairs {
        side: PairSide,
        pairs: Option<Vec<(u32, u32)>>,
    },
    /// Explicit global subsection ids.
    List(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapEntry {
    pub target: MapTarget,
    pub maps: ChannelMaps,
}

/// A validated distortion configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortConfig {
    pub element: GroupElement,
    pub partition: PartitionSpec,
    /// Applied in order; later entries override earlier ones.
    pub maps: Vec<MapEntry>,
    /// Per-channel verification tolerance in 8-bit steps.
    pub tolerance: u8,
}

pub const DEFAULT_TOLERANCE: u8 = 1;

impl DistortConfig {
    /// Resolve the entries against a concrete partition. Subsections no
    /// entry touches keep their colors.
    pub fn assignment(&self, part: &Partition) -> Result<Assignment> {
        let mut a = Assignment::identity(part.lambda()).with_element(self.element);
        for entry in &self.maps {
            match &entry.target {
                MapTarget::List(ids) => {
                    for &id in ids {
                        a.set(id, entry.maps.clone())?;
                    }
                }
                MapTarget::Pairs { side, pairs } => {
                    let set = part.pair_set(self.element)?;
                    let chosen: Vec<(u32, u32)> = match pairs {
                        None => set.pairs().to_vec(),
                        Some(list) => list
                            .iter()
                            .map(|&(x, y)| {
                                if x >= part.lambda() || y >= part.lambda() || !set.contains(x, y) {
                                    Err(Error::NotAPair(x, y, self.element))
                                } else if is_upper(self.element, part.section_of_label(x)) {
                                    Ok((x, y))
                                } else {
                                    Ok((y, x))
                                }
                            })
                            .collect::<Result<_>>()?,
                    };
                    for (upper, lower) in chosen {
                        if matches!(side, PairSide::Upper | PairSide::Both) {
                            a.set(upper, entry.maps.clone())?;
                        }
                        if matches!(side, PairSide::Lower | PairSide::Both) {
                            a.set(lower, entry.maps.clone())?;
                        }
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn to_json(&self) -> Value {
        let maps: Vec<Value> = self
            .maps
            .iter()
            .map(|e| {
                let mut obj = Map::new();
                match &e.target {
                    MapTarget::Pairs { side, pairs } => {
                        obj.insert("subsections".into(), json!("pairs"));
                        obj.insert("side".into(), json!(side.name()));
                        if let Some(p) = pairs {
                            let list: Vec<[u32; 2]> = p.iter().map(|&(a, b)| [a, b]).collect();
                            obj.insert("pairs".into(), json!(list));
                        }
                    }
                    MapTarget::List(ids) => {
                        obj.insert("subsections".into(), json!("list"));
                        obj.insert("ids".into(), json!(ids));
                    }
                }
                obj.insert("hue".into(), map_spec_json(&e.maps.hue));
                obj.insert("sat".into(), map_spec_json(&e.maps.saturation));
                obj.insert("val".into(), map_spec_json(&e.maps.value));
                Value::Object(obj)
            })
            .collect();
        json!({
            "element": self.element.name(),
            "partition": partition_json(&self.partition),
            "maps": maps,
            "tolerance": self.tolerance,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("config values serialize")
    }
}

fn map_spec_json(m: &ChannelMapSpec) -> Value {
    let params: Vec<Value> = match m {
        ChannelMapSpec::ModMultiply(n) => vec![json!(n.get())],
        ChannelMapSpec::Harmonic(h) => h.params().iter().map(|&c| json!(c)).collect(),
        ChannelMapSpec::Polynomial(p) => p.coeffs().iter().map(|&c| json!(c)).collect(),
        _ => Vec::new(),
    };
    if params.is_empty() {
        json!({ "family": m.family() })
    } else {
        json!({ "family": m.family(), "params": params })
    }
}

/// JSON form of a partition spec, as accepted by [`parse_config`].
pub fn partition_json(p: &PartitionSpec) -> Value {
    match *p {
        PartitionSpec::Triangular { triangles } => {
            json!({ "kind": "triangular", "triangles": triangles })
        }
        PartitionSpec::Grid { rows, cols } => json!({ "kind": "grid", "rows": rows, "cols": cols }),
        PartitionSpec::Bubble(b) => json!({
            "kind": "bubble",
            "count": b.count,
            "seed": b.seed,
            "rmin": b.rmin,
            "rmax": b.rmax,
        }),
        PartitionSpec::PerPixel => json!({ "kind": "perpixel" }),
    }
}

/// Collects every problem found while walking the JSON.
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn push(&mut self, field: &str, msg: impl std::fmt::Display) {
        self.0.push(format!("{field}: {msg}"));
    }

    fn unknown_keys(&mut self, field: &str, obj: &Map<String, Value>, allowed: &[&str]) {
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                let at = if field.is_empty() {
                    key.clone()
                } else {
                    format!("{field}.{key}")
                };
                self.push(&at, "unknown field");
            }
        }
    }

    fn object<'a>(&mut self, field: &str, v: &'a Value) -> Option<&'a Map<String, Value>> {
        let obj = v.as_object();
        if obj.is_none() {
            self.push(field, "expected an object");
        }
        obj
    }

    fn uint(&mut self, field: &str, v: Option<&Value>, max: u64) -> Option<u64> {
        let Some(v) = v else {
            self.push(field, "missing");
            return None;
        };
        match v.as_u64() {
            Some(n) if n <= max => Some(n),
            Some(n) => {
                self.push(field, format!("{n} exceeds {max}"));
                None
            }
            None => {
                self.push(field, format!("expected a non-negative integer, got {v}"));
                None
            }
        }
    }

    fn number(&mut self, field: &str, v: &Value) -> Option<f64> {
        let n = v.as_f64().filter(|n| n.is_finite());
        if n.is_none() {
            self.push(field, format!("expected a finite number, got {v}"));
        }
        n
    }
}

/// Parse and validate a distortion config. On failure the error lists every
/// problem found, each prefixed by the offending field.
pub fn parse_config(text: &str) -> Result<DistortConfig> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(vec![format!("invalid JSON: {e}")]))?;
    let mut problems = Problems::default();
    let Some(obj) = problems.object("config", &root) else {
        return Err(Error::Config(problems.0));
    };
    problems.unknown_keys("", obj, &["element", "partition", "maps", "tolerance"]);

    let element = match obj.get("element") {
        None => {
            problems.push("element", "missing");
            None
        }
        Some(Value::String(s)) => match s.parse::<GroupElement>() {
            Ok(g) => Some(g),
            Err(e) => {
                problems.push("element", e);
                None
            }
        },
        Some(other) => {
            problems.push("element", format!("expected a string, got {other}"));
            None
        }
    };

    let partition = match obj.get("partition") {
        None => {
            problems.push("partition", "missing");
            None
        }
        Some(v) => parse_partition(&mut problems, v),
    };

    let mut maps = Vec::new();
    match obj.get("maps") {
        None => {}
        Some(Value::Array(entries)) => {
            for (i, e) in entries.iter().enumerate() {
                if let Some(entry) = parse_map_entry(&mut problems, &format!("maps[{i}]"), e) {
                    if element == Some(GroupElement::E)
                        && matches!(entry.target, MapTarget::Pairs { .. })
                    {
                        problems.push(
                            &format!("maps[{i}].subsections"),
                            "element e exchanges no subsections; use \"list\"",
                        );
                    }
                    maps.push(entry);
                }
            }
        }
        Some(other) => problems.push("maps", format!("expected an array, got {other}")),
    }

    let tolerance = match obj.get("tolerance") {
        None => Some(DEFAULT_TOLERANCE),
        Some(v) => problems.uint("tolerance", Some(v), 255).map(|t| t as u8),
    };

    match (element, partition, tolerance) {
        (Some(element), Some(partition), Some(tolerance)) if problems.0.is_empty() => {
            Ok(DistortConfig {
                element,
                partition,
                maps,
                tolerance,
            })
        }
        _ => Err(Error::Config(problems.0)),
    }
}

fn parse_partition(problems: &mut Problems, v: &Value) -> Option<PartitionSpec> {
    let obj = problems.object("partition", v)?;
    let kind = match obj.get("kind") {
        Some(Value::String(k)) => k.to_ascii_lowercase(),
        Some(other) => {
            problems.push("partition.kind", format!("expected a string, got {other}"));
            return None;
        }
        None => {
            problems.push("partition.kind", "missing");
            return None;
        }
    };
    let u32_field = |problems: &mut Problems, key: &str| {
        problems
            .uint(
                &format!("partition.{key}"),
                obj.get(key),
                u64::from(u32::MAX),
            )
            .map(|n| n as u32)
    };
    let spec = match kind.as_str() {
        "triangular" => {
            problems.unknown_keys("partition", obj, &["kind", "triangles"]);
            PartitionSpec::Triangular {
                triangles: u32_field(problems, "triangles")?,
            }
        }
        "grid" | "chessboard" => {
            problems.unknown_keys("partition", obj, &["kind", "rows", "cols"]);
            let rows = u32_field(problems, "rows");
            let cols = u32_field(problems, "cols");
            PartitionSpec::Grid {
                rows: rows?,
                cols: cols?,
            }
        }
        "bubble" => {
            problems.unknown_keys("partition", obj, &["kind", "count", "seed", "rmin", "rmax"]);
            let count = u32_field(problems, "count");
            let seed = problems.uint("partition.seed", obj.get("seed"), u64::MAX);
            let mut radius = |key: &str, default: f64| match obj.get(key) {
                None => Some(default),
                Some(v) => problems.number(&format!("partition.{key}"), v),
            };
            let rmin = radius("rmin", BubbleSpec::DEFAULT_RMIN);
            let rmax = radius("rmax", BubbleSpec::DEFAULT_RMAX);
            PartitionSpec::Bubble(BubbleSpec {
                count: count?,
                seed: seed?,
                rmin: rmin?,
                rmax: rmax?,
            })
        }
        "perpixel" | "pixel" => {
            problems.unknown_keys("partition", obj, &["kind"]);
            PartitionSpec::PerPixel
        }
        other => {
            problems.push(
                "partition.kind",
                format!("unknown kind `{other}` (expected triangular, grid, bubble or perpixel)"),
            );
            return None;
        }
    };
    if let Err(e) = spec.validate() {
        problems.push("partition", e);
        return None;
    }
    Some(spec)
}

fn parse_map_entry(problems: &mut Problems, field: &str, v: &Value) -> Option<MapEntry> {
    let obj = problems.object(field, v)?;
    let before = problems.0.len();
    problems.unknown_keys(
        field,
        obj,
        &["subsections", "side", "pairs", "ids", "hue", "sat", "val"],
    );

    let target = match obj.get("subsections").and_then(Value::as_str) {
        Some("pairs") => {
            let side = match obj.get("side").map(|s| s.as_str()) {
                None | Some(Some("lower")) => Some(PairSide::Lower),
                Some(Some("upper")) => Some(PairSide::Upper),
                Some(Some("both")) => Some(PairSide::Both),
                Some(_) => {
                    problems.push(
                        &format!("{field}.side"),
                        "expected \"upper\", \"lower\" or \"both\"",
                    );
                    None
                }
            };
            if obj.contains_key("ids") {
                problems.push(
                    &format!("{field}.ids"),
                    "only valid with \"subsections\": \"list\"",
                );
            }
            let pairs = match obj.get("pairs") {
                None => Some(None),
                Some(Value::Array(list)) => {
                    let parsed: Option<Vec<(u32, u32)>> = list
                        .iter()
                        .enumerate()
                        .map(|(j, p)| {
                            let at = format!("{field}.pairs[{j}]");
                            match p.as_array().map(Vec::as_slice) {
                                Some([a, b]) => {
                                    let a = problems.uint(&at, Some(a), u64::from(u32::MAX));
                                    let b = problems.uint(&at, Some(b), u64::from(u32::MAX));
                                    Some((a? as u32, b? as u32))
                                }
                                _ => {
                                    problems.push(&at, "expected a two-element array");
                                    None
                                }
                            }
                        })
                        .collect::<Vec<_>>()
                        .into_iter()
                        .collect();
                    parsed.map(Some)
                }
                Some(_) => {
                    problems.push(&format!("{field}.pairs"), "expected an array of pairs");
                    None
                }
            };
            side.zip(pairs)
                .map(|(side, pairs)| MapTarget::Pairs { side, pairs })
        }
        Some("list") => {
            for key in ["side", "pairs"] {
                if obj.contains_key(key) {
                    problems.push(
                        &format!("{field}.{key}"),
                        "only valid with \"subsections\": \"pairs\"",
                    );
                }
            }
            match obj.get("ids") {
                Some(Value::Array(ids)) => ids
                    .iter()
                    .enumerate()
                    .map(|(j, id)| {
                        problems
                            .uint(&format!("{field}.ids[{j}]"), Some(id), u64::from(u32::MAX))
                            .map(|n| n as u32)
                    })
                    .collect::<Vec<_>>()
                    .into_iter()
                    .collect::<Option<Vec<u32>>>()
                    .map(MapTarget::List),
                _ => {
                    problems.push(
                        &format!("{field}.ids"),
                        "expected an array of subsection ids",
                    );
                    None
                }
            }
        }
        _ => {
            problems.push(
                &format!("{field}.subsections"),
                "expected \"pairs\" or \"list\"",
            );
            None
        }
    };

    let mut channel = |key: &str| match obj.get(key) {
        None => Some(ChannelMapSpec::Identity),
        Some(v) => parse_map_spec(problems, &format!("{field}.{key}"), v),
    };
    let hue = channel("hue");
    let saturation = channel("sat");
    let value = channel("val");

    if problems.0.len() != before {
        return None;
    }
    Some(MapEntry {
        target: target?,
        maps: ChannelMaps {
            hue: hue?,
            saturation: saturation?,
            value: value?,
        },
    })
}

fn parse_map_spec(problems: &mut Problems, field: &str, v: &Value) -> Option<ChannelMapSpec> {
    let obj = problems.object(field, v)?;
    problems.unknown_keys(field, obj, &["family", "params"]);
    let family = match obj.get("family").and_then(Value::as_str) {
        Some(f) => f.to_ascii_lowercase(),
        None => {
            problems.push(&format!("{field}.family"), "missing or not a string");
            return None;
        }
    };
    let params_field = format!("{field}.params");
    let params: Vec<f64> = match obj.get("params") {
        None => Vec::new(),
        Some(Value::Array(list)) => {
            let parsed: Vec<Option<f64>> = list
                .iter()
                .enumerate()
                .map(|(i, p)| problems.number(&format!("{params_field}[{i}]"), p))
                .collect();
            parsed.into_iter().collect::<Option<_>>()?
        }
        Some(other) => {
            problems.push(&params_field, format!("expected an array, got {other}"));
            return None;
        }
    };
    let no_params = |problems: &mut Problems, m: ChannelMapSpec| {
        if params.is_empty() {
            Some(m)
        } else {
            problems.push(&params_field, format!("{family} takes no parameters"));
            None
        }
    };
    match family.as_str() {
        "identity" => no_params(problems, ChannelMapSpec::Identity),
        "f1" => no_params(problems, ChannelMapSpec::F1),
        "f2" => no_params(problems, ChannelMapSpec::F2),
        "f3" => no_params(problems, ChannelMapSpec::F3),
        "f4" => no_params(problems, ChannelMapSpec::F4),
        "f5" => no_params(problems, ChannelMapSpec::F5),
        "modmul" => match params.as_slice() {
            [n] if n.fract() == 0.0 && *n >= 1.0 && *n <= f64::from(u32::MAX) => {
                ChannelMapSpec::mod_multiply(*n as u32).ok()
            }
            _ => {
                problems.push(&params_field, "modmul needs one integer n >= 1");
                None
            }
        },
        "harmonic" => match <[f64; 8]>::try_from(params.as_slice()) {
            Ok(p) => Harmonic::new(p).map(ChannelMapSpec::Harmonic).ok(),
            Err(_) => {
                problems.push(
                    &params_field,
                    format!(
                        "harmonic needs 8 values (c0, c1, w1, c2, w2, c3, w3, c4), got {}",
                        params.len()
                    ),
                );
                None
            }
        },
        "poly" => match Polynomial::new(params) {
            Ok(p) => Some(ChannelMapSpec::Polynomial(p)),
            Err(e) => {
                problems.push(&params_field, e);
                None
            }
        },
        other => {
            problems.push(
                &format!("{field}.family"),
                format!(
                    "unknown family `{other}` (expected identity, f1..f5, modmul, harmonic or poly)"
                ),
            );
            None
        }
    }
}

/// Parse a single map spec object such as `{"family": "modmul", "params": [3]}`.
pub fn parse_map_spec_json(text: &str) -> Result<ChannelMapSpec> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Config(vec![format!("invalid JSON: {e}")]))?;
    let mut problems = Problems::default();
    match parse_map_spec(&mut problems, "map", &v) {
        Some(m) if problems.0.is_empty() => Ok(m),
        _ => Err(Error::Config(problems.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::build_partition;
    use crate::symmetry::Dims;

    const VALID: &str = r#"{
        "element": "rot",
        "partition": {"kind": "grid", "rows": 2, "cols": 2},
        "maps": [
            {"subsections": "pairs", "side": "lower", "hue": {"family": "f3"}},
            {"subsections": "list", "ids": [0], "val": {"family": "poly", "params": [0.1, 0.8]}}
        ],
        "tolerance": 2
    }"#;

    fn config_errors(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(Error::Config(list)) => list,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn parses_valid_config() {
        let c = parse_config(VALID).unwrap();
        assert_eq!(c.element, GroupElement::Rot);
        assert_eq!(c.partition, PartitionSpec::Grid { rows: 2, cols: 2 });
        assert_eq!(c.tolerance, 2);
        assert_eq!(c.maps.len(), 2);
        assert_eq!(c.maps[0].maps.hue, ChannelMapSpec::F3);
        assert_eq!(
            c.maps[0].target,
            MapTarget::Pairs {
                side: PairSide::Lower,
                pairs: None
            }
        );
    }

    #[test]
    fn tolerance_defaults_to_one() {
        let c = parse_config(r#"{"element":"refh","partition":{"kind":"perpixel"}}"#).unwrap();
        assert_eq!(c.tolerance, 1);
        assert!(c.maps.is_empty());
    }

    #[test]
    fn bad_element_names_field() {
        let errs = config_errors(r#"{"element":"r0t","partition":{"kind":"perpixel"}}"#);
        assert_eq!(errs.len(), 1);
        assert!(errs[0].starts_with("element:"), "{errs:?}");
    }

    #[test]
    fn modmul_zero_rejected() {
        let errs = config_errors(
            r#"{"element":"rot","partition":{"kind":"perpixel"},
                "maps":[{"subsections":"pairs","hue":{"family":"modmul","params":[0]}}]}"#,
        );
        assert!(
            errs.iter().any(|e| e.starts_with("maps[0].hue.params")),
            "{errs:?}"
        );
    }

    #[test]
    fn reports_all_errors_not_just_first() {
        let errs = config_errors(
            r#"{"element":"spin","partition":{"kind":"hexagon"},
                "maps":[{"subsections":"pairs","hue":{"family":"f9"}},
                        {"subsections":"list","ids":[-1],"sat":{"family":"harmonic","params":[1,2]}}],
                "tolerance":300, "colour": true}"#,
        );
        for field in [
            "element",
            "partition.kind",
            "maps[0].hue.family",
            "maps[1].ids[0]",
            "maps[1].sat.params",
            "tolerance",
            "colour",
        ] {
            assert!(
                errs.iter().any(|e| e.starts_with(field)),
                "{field} missing from {errs:?}"
            );
        }
    }

    #[test]
    fn partition_parameters_validated() {
        let errs = config_errors(
            r#"{"element":"rot","partition":{"kind":"bubble","count":3,"seed":1,"rmin":0.4,"rmax":0.2}}"#,
        );
        assert!(errs[0].starts_with("partition:"), "{errs:?}");
        let errs = config_errors(r#"{"element":"rot","partition":{"kind":"grid","rows":2}}"#);
        assert!(
            errs.iter().any(|e| e.starts_with("partition.cols")),
            "{errs:?}"
        );
    }

    #[test]
    fn identity_element_cannot_use_pairs() {
        let errs = config_errors(
            r#"{"element":"e","partition":{"kind":"perpixel"},
                "maps":[{"subsections":"pairs","hue":{"family":"f1"}}]}"#,
        );
        assert!(errs[0].starts_with("maps[0].subsections"), "{errs:?}");
    }

    #[test]
    fn config_round_trip() {
        let texts = [
            VALID,
            r#"{"element":"refv","partition":{"kind":"bubble","count":3,"seed":18446744073709551615,"rmin":0.125,"rmax":0.3},
                "maps":[{"subsections":"pairs","side":"both","pairs":[[0,4]],
                         "hue":{"family":"harmonic","params":[0.1,0.2,1.5,0.3,2.0,-0.1,3.0,0.33333333333333331]},
                         "sat":{"family":"modmul","params":[7]}}]}"#,
            r#"{"element":"E","partition":{"kind":"triangular","triangles":5},
                "maps":[{"subsections":"list","ids":[1,2,3],"val":{"family":"f5"}}]}"#,
        ];
        for text in texts {
            let c = parse_config(text).unwrap();
            let again = parse_config(&c.to_json_string()).unwrap();
            assert_eq!(c, again);
        }
    }

    #[test]
    fn assignment_from_config() {
        let c = parse_config(VALID).unwrap();
        let part = build_partition(&c.partition, Dims::new(8, 8).unwrap()).unwrap();
        let a = c.assignment(&part).unwrap();
        assert_eq!(a.element(), Some(GroupElement::Rot));
        // NW 0..4, NE 4..8 upper; SW, SE lower
        for id in 1..8 {
            assert!(a.get(id).unwrap().is_identity(), "{id}");
        }
        assert_eq!(a.get(0).unwrap().value.family(), "poly");
        for id in 8..16 {
            assert_eq!(a.get(id).unwrap().hue, ChannelMapSpec::F3);
        }
    }

    #[test]
    fn assignment_rejects_ids_beyond_lambda() {
        let c = parse_config(
            r#"{"element":"rot","partition":{"kind":"grid","rows":1,"cols":1},
                "maps":[{"subsections":"list","ids":[4],"hue":{"family":"f1"}}]}"#,
        )
        .unwrap();
        let part = build_partition(&c.partition, Dims::new(4, 4).unwrap()).unwrap();
        assert!(matches!(
            c.assignment(&part),
            Err(Error::SubsectionOutOfRange(4, 4))
        ));
        let c = parse_config(
            r#"{"element":"rot","partition":{"kind":"grid","rows":1,"cols":1},
                "maps":[{"subsections":"pairs","pairs":[[0,1]],"hue":{"family":"f1"}}]}"#,
        )
        .unwrap();
        assert!(matches!(c.assignment(&part), Err(Error::NotAPair(0, 1, _))));
    }

    #[test]
    fn map_spec_json_parses() {
        assert_eq!(
            parse_map_spec_json(r#"{"family":"modmul","params":[3]}"#).unwrap(),
            ChannelMapSpec::mod_multiply(3).unwrap()
        );
        assert!(parse_map_spec_json(r#"{"family":"f1","params":[3]}"#).is_err());
        assert!(parse_map_spec_json(r#"{"family":"modmul","params":[2.5]}"#).is_err());
    }
}

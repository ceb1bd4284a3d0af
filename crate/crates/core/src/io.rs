//! PLY (ASCII / binary little-endian) and ASCII PCD reading and writing.
//!
//! Files carry positions as 32-bit floats and colors as 8-bit channels. Colors
//! are mapped to `[0, 1]` by `/255` on read and re-quantized by
//! `round(c * 255)` on write. The cloud resolution travels in a
//! `resolution <meters>` comment; files without one get an estimate from the
//! median nearest-neighbor spacing.

use std::fmt::Write as _;
use std::path::Path;

use crate::cloud::{ColoredPoint, ColoredPointCloud};
use crate::error::{Error, Result};
use crate::index::estimate_resolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CloudFormat {
    PlyAscii,
    PlyBinaryLe,
    PcdAscii,
}

impl CloudFormat {
    /// Sniffs the format from the leading header bytes.
    pub fn detect(bytes: &[u8]) -> Result<Self> {
        let head = &bytes[..bytes.len().min(4096)];
        let text = String::from_utf8_lossy(head);
        if text.starts_with("ply") {
            for line in text.lines().take(16) {
                let mut it = line.split_whitespace();
                if it.next() == Some("format") {
                    return match it.next() {
                        Some("ascii") => Ok(Self::PlyAscii),
                        Some("binary_little_endian") => Ok(Self::PlyBinaryLe),
                        Some(other) => Err(Error::UnsupportedFormat(format!("PLY {other}"))),
                        None => Err(Error::MalformedHeader("empty format line".into())),
                    };
                }
            }
            return Err(Error::MalformedHeader("PLY header has no format line".into()));
        }
        if text
            .lines()
            .any(|l| l.starts_with("FIELDS") || l.starts_with("VERSION"))
        {
            return Ok(Self::PcdAscii);
        }
        Err(Error::MalformedHeader("neither a PLY nor a PCD header".into()))
    }
}

/// Scalar property types shared by the PLY and PCD headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    I64,
    U64,
    F32,
    F64,
}

impl Scalar {
    fn from_ply(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn from_pcd(ty: &str, size: &str) -> Option<Self> {
        Some(match (ty, size) {
            ("I", "1") => Self::I8,
            ("U", "1") => Self::U8,
            ("I", "2") => Self::I16,
            ("U", "2") => Self::U16,
            ("I", "4") => Self::I32,
            ("U", "4") => Self::U32,
            ("I", "8") => Self::I64,
            ("U", "8") => Self::U64,
            ("F", "4") => Self::F32,
            ("F", "8") => Self::F64,
            _ => return None,
        })
    }

    fn width(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::I64 | Self::U64 | Self::F64 => 8,
        }
    }

    fn parse_text(self, token: &str) -> Option<f64> {
        match self {
            // 32-bit values are parsed at their own precision so that written
            // text round-trips to the same bits
            Self::F32 => token.parse::<f32>().ok().map(f64::from),
            Self::F64 => token.parse::<f64>().ok(),
            Self::U64 => token.parse::<u64>().ok().map(|v| v as f64),
            _ => token.parse::<i64>().ok().map(|v| v as f64),
        }
    }

    fn read_le(self, b: &[u8]) -> f64 {
        match self {
            Self::I8 => b[0] as i8 as f64,
            Self::U8 => b[0] as f64,
            Self::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Self::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Self::I32 => i32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Self::U32 => u32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Self::I64 => i64::from_le_bytes(b[..8].try_into().unwrap()) as f64,
            Self::U64 => u64::from_le_bytes(b[..8].try_into().unwrap()) as f64,
            Self::F32 => f32::from_le_bytes(b[..4].try_into().unwrap()) as f64,
            Self::F64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }
}

/// Divisor mapping a stored color channel onto `[0, 1]`.
fn color_divisor(name: &str, ty: Scalar) -> Result<f64> {
    match ty {
        Scalar::U8 => Ok(255.0),
        Scalar::F32 | Scalar::F64 => Ok(1.0),
        other => Err(Error::UnsupportedProperty(format!(
            "color channel '{name}' of type {other:?}; expected 8-bit or floating point"
        ))),
    }
}

#[inline]
fn quantize(channel: f64) -> u8 {
    (channel * 255.0).round().clamp(0.0, 255.0) as u8
}

fn parse_resolution_comment(rest: &str) -> Option<f64> {
    let mut it = rest.split_whitespace();
    if it.next()? != "resolution" {
        return None;
    }
    it.next()?.parse::<f64>().ok().filter(|r| *r > 0.0 && r.is_finite())
}

fn finish(points: Vec<ColoredPoint>, resolution: Option<f64>, has_color: bool) -> Result<ColoredPointCloud> {
    let resolution = resolution.unwrap_or_else(|| estimate_resolution(&points));
    ColoredPointCloud::new(points, resolution, has_color)
}

/// Splits at the end of the header line that starts with `terminator`;
/// returns the header text and the body.
fn split_header<'a>(bytes: &'a [u8], terminator: &str) -> Result<(&'a str, &'a [u8])> {
    let mut pos = 0;
    while pos < bytes.len() {
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|e| pos + e + 1)
            .unwrap_or(bytes.len());
        let line = &bytes[pos..end];
        if line.starts_with(terminator.as_bytes()) {
            let header = std::str::from_utf8(&bytes[..end])
                .map_err(|_| Error::MalformedHeader("header is not valid UTF-8".into()))?;
            return Ok((header, &bytes[end..]));
        }
        pos = end;
    }
    Err(Error::MalformedHeader(format!("missing '{terminator}'")))
}

// ---------------------------------------------------------------------------
// PLY

#[derive(Debug)]
enum PlyProperty {
    Scalar { name: String, ty: Scalar },
    List { name: String },
}

#[derive(Debug)]
struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<PlyProperty>,
}

struct PlyHeader {
    binary: bool,
    elements: Vec<PlyElement>,
    resolution: Option<f64>,
}

fn parse_ply_header(header: &str) -> Result<PlyHeader> {
    let mut lines = header.lines().map(str::trim_end);
    if lines.next() != Some("ply") {
        return Err(Error::MalformedHeader("first line must be 'ply'".into()));
    }
    let mut binary = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    let mut resolution = None;
    for line in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("format") => {
                binary = Some(match (tok.next(), tok.next()) {
                    (Some("ascii"), Some("1.0")) => false,
                    (Some("binary_little_endian"), Some("1.0")) => true,
                    (Some(f @ "binary_big_endian"), _) => {
                        return Err(Error::UnsupportedFormat(format!("PLY {f}")))
                    }
                    _ => return Err(Error::MalformedHeader(format!("bad format line '{line}'"))),
                });
            }
            Some("comment") => {
                if let Some(r) = parse_resolution_comment(&line["comment".len()..]) {
                    resolution = Some(r);
                }
            }
            Some("obj_info") | None => {}
            Some("element") => {
                let (Some(name), Some(count), None) = (tok.next(), tok.next(), tok.next()) else {
                    return Err(Error::MalformedHeader(format!("bad element line '{line}'")));
                };
                let count = count
                    .parse()
                    .map_err(|_| Error::MalformedHeader(format!("bad element count in '{line}'")))?;
                elements.push(PlyElement {
                    name: name.to_owned(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements.last_mut().ok_or_else(|| {
                    Error::MalformedHeader("property declared before any element".into())
                })?;
                let prop = match tok.next() {
                    Some("list") => {
                        let (Some(_), Some(_), Some(name)) = (tok.next(), tok.next(), tok.next())
                        else {
                            return Err(Error::MalformedHeader(format!("bad list property '{line}'")));
                        };
                        PlyProperty::List { name: name.to_owned() }
                    }
                    Some(ty) => {
                        let name = tok
                            .next()
                            .ok_or_else(|| Error::MalformedHeader(format!("bad property '{line}'")))?;
                        let ty = Scalar::from_ply(ty).ok_or_else(|| {
                            Error::UnsupportedProperty(format!("type '{ty}' of property '{name}'"))
                        })?;
                        PlyProperty::Scalar { name: name.to_owned(), ty }
                    }
                    None => return Err(Error::MalformedHeader(format!("bad property '{line}'"))),
                };
                element.properties.push(prop);
            }
            Some("end_header") => break,
            Some(other) => {
                return Err(Error::MalformedHeader(format!("unknown header keyword '{other}'")))
            }
        }
    }
    let binary = binary.ok_or_else(|| Error::MalformedHeader("missing format line".into()))?;
    Ok(PlyHeader {
        binary,
        elements,
        resolution,
    })
}

/// Column layout of the vertex element.
struct VertexLayout {
    types: Vec<Scalar>,
    xyz: [usize; 3],
    rgb: Option<([usize; 3], [f64; 3])>,
}

fn vertex_layout(element: &PlyElement) -> Result<VertexLayout> {
    let mut types = Vec::with_capacity(element.properties.len());
    let find = |wanted: &str| {
        element.properties.iter().position(|p| match p {
            PlyProperty::Scalar { name, .. } | PlyProperty::List { name } => name == wanted,
        })
    };
    for p in &element.properties {
        match p {
            PlyProperty::Scalar { ty, .. } => types.push(*ty),
            PlyProperty::List { name } => {
                return Err(Error::UnsupportedProperty(format!(
                    "list property '{name}' in vertex element"
                )))
            }
        }
    }
    let axis = |n: &str| find(n).ok_or_else(|| Error::MalformedHeader(format!("vertex has no '{n}'")));
    let xyz = [axis("x")?, axis("y")?, axis("z")?];
    let rgb = match (find("red"), find("green"), find("blue")) {
        (Some(r), Some(g), Some(b)) => {
            let divisor = |i: usize, n: &str| color_divisor(n, types[i]);
            Some(([r, g, b], [divisor(r, "red")?, divisor(g, "green")?, divisor(b, "blue")?]))
        }
        (None, None, None) => None,
        _ => return Err(Error::MalformedHeader("incomplete red/green/blue properties".into())),
    };
    Ok(VertexLayout { types, xyz, rgb })
}

fn make_point(values: &[f64], layout: &VertexLayout) -> ColoredPoint {
    let [x, y, z] = layout.xyz.map(|i| values[i]);
    let [r, g, b] = match &layout.rgb {
        Some((idx, divisor)) => [0, 1, 2].map(|c| values[idx[c]] / divisor[c]),
        None => [0.0; 3],
    };
    ColoredPoint::new(x, y, z, r, g, b)
}

fn parse_ply(bytes: &[u8], want_binary: bool) -> Result<ColoredPointCloud> {
    let (header, body) = split_header(bytes, "end_header")?;
    let header = parse_ply_header(header)?;
    if header.binary != want_binary {
        return Err(Error::MalformedHeader(format!(
            "header declares {} data",
            if header.binary { "binary" } else { "ascii" }
        )));
    }
    let vertex_pos = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| Error::MalformedHeader("no vertex element".into()))?;
    let vertex = &header.elements[vertex_pos];
    let layout = vertex_layout(vertex)?;
    let preceding = &header.elements[..vertex_pos];

    let points = if header.binary {
        let mut offset = 0usize;
        for e in preceding {
            let mut width = 0;
            for p in &e.properties {
                match p {
                    PlyProperty::Scalar { ty, .. } => width += ty.width(),
                    PlyProperty::List { name } => {
                        return Err(Error::UnsupportedProperty(format!(
                            "list property '{name}' before the vertex element"
                        )))
                    }
                }
            }
            offset += width * e.count;
        }
        let stride: usize = layout.types.iter().map(|t| t.width()).sum();
        let body = body.get(offset..).unwrap_or(&[]);
        let available = body.len().checked_div(stride).unwrap_or(0);
        if available < vertex.count {
            return Err(Error::TruncatedBody {
                expected: vertex.count,
                found: available,
            });
        }
        let mut values = vec![0.0; layout.types.len()];
        body.chunks_exact(stride)
            .take(vertex.count)
            .map(|rec| {
                let mut at = 0;
                for (v, ty) in values.iter_mut().zip(&layout.types) {
                    *v = ty.read_le(&rec[at..]);
                    at += ty.width();
                }
                make_point(&values, &layout)
            })
            .collect()
    } else {
        let text = std::str::from_utf8(body)
            .map_err(|_| Error::MalformedRecord { record: 0, reason: "body is not UTF-8".into() })?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let skip: usize = preceding.iter().map(|e| e.count).sum();
        for found in 0..skip {
            if lines.next().is_none() {
                return Err(Error::TruncatedBody { expected: skip, found });
            }
        }
        let mut values = vec![0.0; layout.types.len()];
        let mut points = Vec::with_capacity(vertex.count);
        for record in 0..vertex.count {
            let line = lines.next().ok_or(Error::TruncatedBody {
                expected: vertex.count,
                found: record,
            })?;
            let mut tokens = line.split_whitespace();
            for (v, ty) in values.iter_mut().zip(&layout.types) {
                let token = tokens.next().ok_or_else(|| Error::MalformedRecord {
                    record,
                    reason: "too few values".into(),
                })?;
                *v = ty.parse_text(token).ok_or_else(|| Error::MalformedRecord {
                    record,
                    reason: format!("cannot parse '{token}' as {ty:?}"),
                })?;
            }
            points.push(make_point(&values, &layout));
        }
        points
    };
    finish(points, header.resolution, layout.rgb.is_some())
}

fn write_ply(cloud: &ColoredPointCloud, binary: bool) -> Vec<u8> {
    let mut header = String::new();
    let _ = writeln!(header, "ply");
    let _ = writeln!(
        header,
        "format {} 1.0",
        if binary { "binary_little_endian" } else { "ascii" }
    );
    let _ = writeln!(header, "comment resolution {}", cloud.resolution());
    let _ = writeln!(header, "element vertex {}", cloud.len());
    for axis in ["x", "y", "z"] {
        let _ = writeln!(header, "property float {axis}");
    }
    if cloud.has_color() {
        for channel in ["red", "green", "blue"] {
            let _ = writeln!(header, "property uchar {channel}");
        }
    }
    let _ = writeln!(header, "end_header");

    let mut out = header.into_bytes();
    if binary {
        let stride = if cloud.has_color() { 15 } else { 12 };
        out.reserve(stride * cloud.len());
        for p in cloud.points() {
            for v in p.xyz() {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
            if cloud.has_color() {
                out.extend([quantize(p.r), quantize(p.g), quantize(p.b)]);
            }
        }
    } else {
        let mut body = String::with_capacity(40 * cloud.len());
        for p in cloud.points() {
            let [x, y, z] = p.xyz().map(|v| v as f32);
            let _ = write!(body, "{x} {y} {z}");
            if cloud.has_color() {
                let _ = write!(body, " {} {} {}", quantize(p.r), quantize(p.g), quantize(p.b));
            }
            body.push('\n');
        }
        out.extend_from_slice(body.as_bytes());
    }
    out
}

// ---------------------------------------------------------------------------
// PCD

struct PcdField {
    name: String,
    ty: Scalar,
    count: usize,
}

fn parse_pcd(bytes: &[u8]) -> Result<ColoredPointCloud> {
    let (header, body) = split_header(bytes, "DATA")?;
    let mut names: Vec<String> = Vec::new();
    let mut sizes: Vec<String> = Vec::new();
    let mut types: Vec<String> = Vec::new();
    let mut counts: Option<Vec<usize>> = None;
    let mut width = None;
    let mut height = 1usize;
    let mut declared_points = None;
    let mut resolution = None;

    let bad = |line: &str| Error::MalformedHeader(format!("bad PCD header line '{line}'"));
    for line in header.lines().map(str::trim) {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(r) = parse_resolution_comment(comment) {
                resolution = Some(r);
            }
            continue;
        }
        let mut tok = line.split_whitespace();
        let Some(key) = tok.next() else { continue };
        let rest: Vec<&str> = tok.collect();
        let one = || -> Result<usize> {
            match rest.as_slice() {
                [v] => v.parse().map_err(|_| bad(line)),
                _ => Err(bad(line)),
            }
        };
        match key {
            "VERSION" | "VIEWPOINT" => {}
            "FIELDS" => names = rest.iter().map(|s| s.to_string()).collect(),
            "SIZE" => sizes = rest.iter().map(|s| s.to_string()).collect(),
            "TYPE" => types = rest.iter().map(|s| s.to_string()).collect(),
            "COUNT" => {
                counts = Some(
                    rest.iter()
                        .map(|s| s.parse().map_err(|_| bad(line)))
                        .collect::<Result<_>>()?,
                )
            }
            "WIDTH" => width = Some(one()?),
            "HEIGHT" => height = one()?,
            "POINTS" => declared_points = Some(one()?),
            "DATA" => match rest.as_slice() {
                ["ascii"] => {}
                [other] => return Err(Error::UnsupportedFormat(format!("PCD DATA {other}"))),
                _ => return Err(bad(line)),
            },
            _ => return Err(Error::MalformedHeader(format!("unknown PCD keyword '{key}'"))),
        }
    }
    if names.is_empty() || sizes.len() != names.len() || types.len() != names.len() {
        return Err(Error::MalformedHeader(
            "FIELDS, SIZE and TYPE must be present and of equal length".into(),
        ));
    }
    let counts = counts.unwrap_or_else(|| vec![1; names.len()]);
    if counts.len() != names.len() {
        return Err(Error::MalformedHeader("COUNT length differs from FIELDS".into()));
    }
    let fields = names
        .iter()
        .zip(&sizes)
        .zip(&types)
        .zip(&counts)
        .map(|(((name, size), ty), &count)| {
            let ty = Scalar::from_pcd(ty, size).ok_or_else(|| {
                Error::UnsupportedProperty(format!("field '{name}' with TYPE {ty} SIZE {size}"))
            })?;
            Ok(PcdField { name: name.clone(), ty, count })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = match (declared_points, width) {
        (Some(n), _) => n,
        (None, Some(w)) => w * height,
        (None, None) => return Err(Error::MalformedHeader("missing POINTS and WIDTH".into())),
    };

    // token offset of each field's first value within a record
    let mut offsets = Vec::with_capacity(fields.len());
    let mut tokens_per_record = 0;
    for f in &fields {
        offsets.push(tokens_per_record);
        tokens_per_record += f.count;
    }
    let find = |n: &str| fields.iter().position(|f| f.name == n);
    let axis = |n: &str| {
        find(n)
            .map(|i| (offsets[i], fields[i].ty))
            .ok_or_else(|| Error::MalformedHeader(format!("PCD has no '{n}' field")))
    };
    let xyz = [axis("x")?, axis("y")?, axis("z")?];
    let rgb = find("rgb").or_else(|| find("rgba")).map(|i| (offsets[i], fields[i].ty));
    if let Some((_, ty)) = rgb {
        if !matches!(ty, Scalar::F32 | Scalar::U32) {
            return Err(Error::UnsupportedProperty(format!(
                "packed rgb of type {ty:?}; expected 4-byte F or U"
            )));
        }
    }

    let text = std::str::from_utf8(body)
        .map_err(|_| Error::MalformedRecord { record: 0, reason: "body is not UTF-8".into() })?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut points = Vec::with_capacity(total);
    let mut tokens: Vec<&str> = Vec::with_capacity(tokens_per_record);
    for record in 0..total {
        let line = lines.next().ok_or(Error::TruncatedBody { expected: total, found: record })?;
        tokens.clear();
        tokens.extend(line.split_whitespace());
        if tokens.len() < tokens_per_record {
            return Err(Error::MalformedRecord { record, reason: "too few values".into() });
        }
        let value = |(at, ty): (usize, Scalar)| {
            ty.parse_text(tokens[at]).ok_or_else(|| Error::MalformedRecord {
                record,
                reason: format!("cannot parse '{}' as {ty:?}", tokens[at]),
            })
        };
        let [x, y, z] = [value(xyz[0])?, value(xyz[1])?, value(xyz[2])?];
        let [r, g, b] = match rgb {
            Some((at, ty)) => {
                let token = tokens[at];
                let packed = match ty {
                    Scalar::F32 => token.parse::<f32>().ok().map(f32::to_bits),
                    _ => token.parse::<u32>().ok(),
                }
                .ok_or_else(|| Error::MalformedRecord {
                    record,
                    reason: format!("cannot decode packed rgb '{token}'"),
                })?;
                [16, 8, 0].map(|shift| ((packed >> shift) & 0xff) as f64 / 255.0)
            }
            None => [0.0; 3],
        };
        points.push(ColoredPoint::new(x, y, z, r, g, b));
    }
    finish(points, resolution, rgb.is_some())
}

fn write_pcd(cloud: &ColoredPointCloud) -> Vec<u8> {
    let color = cloud.has_color();
    let mut s = String::with_capacity(256 + 48 * cloud.len());
    let _ = writeln!(s, "# .PCD v0.7 - Point Cloud Data file format");
    let _ = writeln!(s, "# resolution {}", cloud.resolution());
    let _ = writeln!(s, "VERSION 0.7");
    if color {
        let _ = writeln!(s, "FIELDS x y z rgb\nSIZE 4 4 4 4\nTYPE F F F F\nCOUNT 1 1 1 1");
    } else {
        let _ = writeln!(s, "FIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1");
    }
    let _ = writeln!(s, "WIDTH {}\nHEIGHT 1", cloud.len());
    let _ = writeln!(s, "VIEWPOINT 0 0 0 1 0 0 0");
    let _ = writeln!(s, "POINTS {}", cloud.len());
    let _ = writeln!(s, "DATA ascii");
    for p in cloud.points() {
        let [x, y, z] = p.xyz().map(|v| v as f32);
        let _ = write!(s, "{x} {y} {z}");
        if color {
            let packed = (quantize(p.r) as u32) << 16 | (quantize(p.g) as u32) << 8 | quantize(p.b) as u32;
            // exponent form keeps subnormal packed values short and exact
            let _ = write!(s, " {:e}", f32::from_bits(packed));
        }
        s.push('\n');
    }
    s.into_bytes()
}

// ---------------------------------------------------------------------------

/// Parses a cloud from the bytes of a file of the given format.
pub fn parse_cloud(bytes: &[u8], format: CloudFormat) -> Result<ColoredPointCloud> {
    match format {
        CloudFormat::PlyAscii => parse_ply(bytes, false),
        CloudFormat::PlyBinaryLe => parse_ply(bytes, true),
        CloudFormat::PcdAscii => parse_pcd(bytes),
    }
}

/// Serializes a non-empty cloud.
pub fn write_cloud(cloud: &ColoredPointCloud, format: CloudFormat) -> Result<Vec<u8>> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(match format {
        CloudFormat::PlyAscii => write_ply(cloud, false),
        CloudFormat::PlyBinaryLe => write_ply(cloud, true),
        CloudFormat::PcdAscii => write_pcd(cloud),
    })
}

/// Reads a cloud file, detecting the format from its header.
pub fn read_cloud_file(path: impl AsRef<Path>) -> Result<ColoredPointCloud> {
    let bytes = std::fs::read(path)?;
    let format = CloudFormat::detect(&bytes)?;
    parse_cloud(&bytes, format)
}

pub fn write_cloud_file(
    path: impl AsRef<Path>,
    cloud: &ColoredPointCloud,
    format: CloudFormat,
) -> Result<()> {
    std::fs::write(path, write_cloud(cloud, format)?)?;
    Ok(())
}

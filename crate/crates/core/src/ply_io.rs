//! PLY 1.0 reading and writing for point clouds, plus farthest-point downsampling.
//!
//! Only the `vertex` element is interpreted: `x`, `y`, `z` (float or double)
//! and, when all three are present as `uchar`, `red`, `green`, `blue`. Any
//! other scalar vertex property becomes a named scalar attribute of the cloud.
//! Other elements (faces, ...) are parsed only as far as needed to skip them.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, PlyPosition, Result};
use crate::scalar::{dist2, Real};

/// Body encoding of a PLY file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

impl std::str::FromStr for PlyFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(PlyFormat::Ascii),
            "binary" | "binary_little_endian" => Ok(PlyFormat::BinaryLittleEndian),
            other => Err(Error::InvalidArgument(format!(
                "unknown PLY format `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarKind {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl ScalarKind {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => ScalarKind::I8,
            "uchar" | "uint8" => ScalarKind::U8,
            "short" | "int16" => ScalarKind::I16,
            "ushort" | "uint16" => ScalarKind::U16,
            "int" | "int32" => ScalarKind::I32,
            "uint" | "uint32" => ScalarKind::U32,
            "float" | "float32" => ScalarKind::F32,
            "double" | "float64" => ScalarKind::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            ScalarKind::I8 | ScalarKind::U8 => 1,
            ScalarKind::I16 | ScalarKind::U16 => 2,
            ScalarKind::I32 | ScalarKind::U32 | ScalarKind::F32 => 4,
            ScalarKind::F64 => 8,
        }
    }

    fn decode_le(self, b: &[u8]) -> f64 {
        match self {
            ScalarKind::I8 => b[0] as i8 as f64,
            ScalarKind::U8 => b[0] as f64,
            ScalarKind::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            ScalarKind::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            ScalarKind::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            ScalarKind::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            ScalarKind::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            ScalarKind::F64 => f64::from_le_bytes(b[..8].try_into().expect("8 bytes")),
        }
    }
}

#[derive(Debug, Clone)]
enum PropertyKind {
    Scalar(ScalarKind),
    List { count: ScalarKind, item: ScalarKind },
}

#[derive(Debug, Clone)]
struct Property {
    name: String,
    kind: PropertyKind,
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

#[derive(Debug)]
struct Header {
    format: PlyFormat,
    elements: Vec<Element>,
    /// Byte offset of the first body byte.
    body_start: usize,
    /// Line number of the first body line (ASCII).
    body_line: usize,
}

/// Columns of the vertex element that the reader honours.
struct VertexLayout {
    xyz: [usize; 3],
    rgb: Option<[usize; 3]>,
    scalars: Vec<(String, usize)>,
}

fn malformed(position: PlyPosition, message: impl Into<String>) -> Error {
    Error::PlyMalformed {
        position,
        message: message.into(),
    }
}

fn unsupported(position: PlyPosition, message: impl Into<String>) -> Error {
    Error::PlyUnsupported {
        position,
        message: message.into(),
    }
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut offset = 0usize;
    let mut line_no = 0usize;
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let rest = &bytes[offset..];
        let Some(nl) = rest.iter().position(|&b| b == b'\n') else {
            return Err(malformed(
                PlyPosition::Line(line_no + 1),
                "header ends before `end_header`",
            ));
        };
        line_no += 1;
        let pos = PlyPosition::Line(line_no);
        let raw = std::str::from_utf8(&rest[..nl])
            .map_err(|_| malformed(pos, "header line is not valid text"))?;
        let line = raw.trim_end_matches('\r').trim();
        offset += nl + 1;

        if line_no == 1 {
            if line != "ply" {
                return Err(malformed(pos, "missing `ply` magic"));
            }
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            None | Some("comment") | Some("obj_info") => {}
            Some("format") => {
                let kind = tok.next().unwrap_or("");
                let version = tok.next().unwrap_or("");
                if version != "1.0" {
                    return Err(unsupported(pos, format!("PLY version `{version}`")));
                }
                format = Some(match kind {
                    "ascii" => PlyFormat::Ascii,
                    "binary_little_endian" => PlyFormat::BinaryLittleEndian,
                    "binary_big_endian" => {
                        return Err(unsupported(pos, "binary_big_endian encoding"))
                    }
                    other => return Err(malformed(pos, format!("unknown format `{other}`"))),
                });
            }
            Some("element") => {
                let name = tok
                    .next()
                    .ok_or_else(|| malformed(pos, "element without a name"))?;
                let count = tok
                    .next()
                    .and_then(|c| c.parse::<usize>().ok())
                    .ok_or_else(|| malformed(pos, "element count is not an integer"))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| malformed(pos, "property before any element"))?;
                let ty = tok.next().unwrap_or("");
                let kind = if ty == "list" {
                    let count = tok.next().and_then(ScalarKind::parse);
                    let item = tok.next().and_then(ScalarKind::parse);
                    match (count, item) {
                        (Some(count), Some(item)) => PropertyKind::List { count, item },
                        _ => return Err(malformed(pos, "bad list property types")),
                    }
                } else {
                    PropertyKind::Scalar(
                        ScalarKind::parse(ty)
                            .ok_or_else(|| malformed(pos, format!("unknown type `{ty}`")))?,
                    )
                };
                let name = tok
                    .next()
                    .ok_or_else(|| malformed(pos, "property without a name"))?;
                if element.name == "vertex" && matches!(kind, PropertyKind::List { .. }) {
                    return Err(unsupported(
                        pos,
                        format!("list-typed vertex property `{name}`"),
                    ));
                }
                element.properties.push(Property {
                    name: name.to_string(),
                    kind,
                });
            }
            Some("end_header") => {
                let format = format.ok_or_else(|| malformed(pos, "no `format` line in header"))?;
                return Ok(Header {
                    format,
                    elements,
                    body_start: offset,
                    body_line: line_no + 1,
                });
            }
            Some(other) => return Err(malformed(pos, format!("unexpected keyword `{other}`"))),
        }
    }
}

fn vertex_layout(element: &Element) -> Result<VertexLayout> {
    let find = |name: &str| element.properties.iter().position(|p| p.name == name);
    let mut xyz = [0usize; 3];
    for (slot, name) in xyz.iter_mut().zip(["x", "y", "z"]) {
        let i = find(name).ok_or_else(|| {
            malformed(
                PlyPosition::Line(1),
                format!("vertex element lacks `{name}`"),
            )
        })?;
        match element.properties[i].kind {
            PropertyKind::Scalar(ScalarKind::F32 | ScalarKind::F64) => {}
            _ => {
                return Err(unsupported(
                    PlyPosition::Line(1),
                    format!("vertex `{name}` must be float or double"),
                ))
            }
        }
        *slot = i;
    }
    let rgb = match (find("red"), find("green"), find("blue")) {
        (Some(r), Some(g), Some(b))
            if [r, g, b].iter().all(|&i| {
                matches!(
                    element.properties[i].kind,
                    PropertyKind::Scalar(ScalarKind::U8)
                )
            }) =>
        {
            Some([r, g, b])
        }
        _ => None,
    };
    let mut scalars: Vec<(String, usize)> = Vec::new();
    for (i, p) in element.properties.iter().enumerate() {
        let taken = xyz.contains(&i) || rgb.is_some_and(|c| c.contains(&i));
        if !taken && !scalars.iter().any(|(name, _)| *name == p.name) {
            scalars.push((p.name.clone(), i));
        }
    }
    Ok(VertexLayout { xyz, rgb, scalars })
}

/// Parses a PLY file held in memory.
pub fn parse_ply(bytes: &[u8]) -> Result<PointCloud<f64>> {
    let header = parse_header(bytes)?;
    let vi = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| malformed(PlyPosition::Line(1), "no vertex element"))?;
    let layout = vertex_layout(&header.elements[vi])?;
    let (points, colors, scalars) = match header.format {
        PlyFormat::Ascii => read_ascii_body(bytes, &header, vi, &layout)?,
        PlyFormat::BinaryLittleEndian => read_binary_body(bytes, &header, vi, &layout)?,
    };
    let mut cloud = PointCloud::new(points)?;
    if let Some(c) = colors {
        cloud = cloud.with_colors(c)?;
    }
    for ((name, _), values) in layout.scalars.iter().zip(scalars) {
        cloud = cloud.with_scalar(name.clone(), values)?;
    }
    Ok(cloud)
}

type Body = (Vec<[f64; 3]>, Option<Vec<[u8; 3]>>, Vec<Vec<f64>>);

fn read_ascii_body(
    bytes: &[u8],
    header: &Header,
    vertex_element: usize,
    layout: &VertexLayout,
) -> Result<Body> {
    let body = std::str::from_utf8(&bytes[header.body_start..]).map_err(|_| {
        malformed(
            PlyPosition::Line(header.body_line),
            "ASCII body is not text",
        )
    })?;
    // Blank lines carry no instance.
    let mut lines = body
        .lines()
        .enumerate()
        .map(|(k, l)| (header.body_line + k, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut points = Vec::new();
    let mut colors = layout.rgb.map(|_| Vec::new());
    let mut scalars = vec![Vec::new(); layout.scalars.len()];
    let mut last_line = header.body_line;

    for (ei, element) in header.elements.iter().enumerate() {
        for k in 0..element.count {
            let Some((line_no, text)) = lines.next() else {
                let what = if ei <= vertex_element {
                    format!(
                        "vertex count mismatch: header declares {} `{}` entries, body ends after {}",
                        element.count, element.name, k
                    )
                } else {
                    // Truncation after the vertices does not affect the cloud.
                    break;
                };
                return Err(malformed(PlyPosition::Line(last_line), what));
            };
            last_line = line_no;
            if ei != vertex_element {
                continue;
            }
            let pos = PlyPosition::Line(line_no);
            let values: Vec<&str> = text.split_whitespace().collect();
            if values.len() < element.properties.len() {
                return Err(malformed(
                    pos,
                    format!(
                        "vertex has {} values, header declares {}",
                        values.len(),
                        element.properties.len()
                    ),
                ));
            }
            let num = |col: usize| -> Result<f64> {
                values[col]
                    .parse::<f64>()
                    .map_err(|_| malformed(pos, format!("`{}` is not a number", values[col])))
            };
            let mut p = [0.0; 3];
            for (c, &col) in layout.xyz.iter().enumerate() {
                let v = num(col)?;
                if !v.is_finite() {
                    return Err(malformed(pos, "non-finite coordinate"));
                }
                p[c] = v;
            }
            points.push(p);
            if let (Some(cols), Some(out)) = (layout.rgb, colors.as_mut()) {
                let mut rgb = [0u8; 3];
                for (c, &col) in cols.iter().enumerate() {
                    rgb[c] = values[col]
                        .parse::<u8>()
                        .map_err(|_| malformed(pos, "colour is not a uchar"))?;
                }
                out.push(rgb);
            }
            for ((_, col), out) in layout.scalars.iter().zip(scalars.iter_mut()) {
                out.push(num(*col)?);
            }
        }
        if ei == vertex_element {
            break;
        }
    }
    Ok((points, colors, scalars))
}

fn read_binary_body(
    bytes: &[u8],
    header: &Header,
    vertex_element: usize,
    layout: &VertexLayout,
) -> Result<Body> {
    let mut offset = header.body_start;
    let take = |offset: &mut usize, n: usize, what: &str| -> Result<std::ops::Range<usize>> {
        if *offset + n > bytes.len() {
            return Err(malformed(
                PlyPosition::Byte(*offset as u64),
                format!("file truncated while reading {what}"),
            ));
        }
        let r = *offset..*offset + n;
        *offset += n;
        Ok(r)
    };

    for element in &header.elements[..vertex_element] {
        for _ in 0..element.count {
            for prop in &element.properties {
                match prop.kind {
                    PropertyKind::Scalar(s) => {
                        take(&mut offset, s.size(), &element.name)?;
                    }
                    PropertyKind::List { count, item } => {
                        let r = take(&mut offset, count.size(), &element.name)?;
                        let len = count.decode_le(&bytes[r]) as usize;
                        take(&mut offset, len * item.size(), &element.name)?;
                    }
                }
            }
        }
    }

    let element = &header.elements[vertex_element];
    let mut points = Vec::with_capacity(element.count);
    let mut colors = layout.rgb.map(|_| Vec::with_capacity(element.count));
    let mut scalars = vec![Vec::with_capacity(element.count); layout.scalars.len()];
    let mut values = vec![0.0f64; element.properties.len()];
    for k in 0..element.count {
        let start = offset;
        for (slot, prop) in values.iter_mut().zip(&element.properties) {
            let PropertyKind::Scalar(s) = prop.kind else {
                unreachable!("vertex lists rejected in header")
            };
            let r = take(&mut offset, s.size(), "vertex").map_err(|_| {
                malformed(
                    PlyPosition::Byte(start as u64),
                    format!(
                        "vertex count mismatch: header declares {}, body holds {}",
                        element.count, k
                    ),
                )
            })?;
            *slot = s.decode_le(&bytes[r]);
        }
        let p = [
            values[layout.xyz[0]],
            values[layout.xyz[1]],
            values[layout.xyz[2]],
        ];
        if p.iter().any(|c| !c.is_finite()) {
            return Err(malformed(
                PlyPosition::Byte(start as u64),
                "non-finite coordinate",
            ));
        }
        points.push(p);
        if let (Some(cols), Some(out)) = (layout.rgb, colors.as_mut()) {
            out.push([
                values[cols[0]] as u8,
                values[cols[1]] as u8,
                values[cols[2]] as u8,
            ]);
        }
        for ((_, col), out) in layout.scalars.iter().zip(scalars.iter_mut()) {
            out.push(values[*col]);
        }
    }
    Ok((points, colors, scalars))
}

/// Reads a point cloud from a PLY file.
pub fn read_ply(path: impl AsRef<Path>) -> Result<PointCloud<f64>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_ply(&bytes)
}

/// Serializes a cloud as PLY into `w`. Coordinates and scalar attributes
/// are stored as `double`.
pub fn write_ply_to<T: Real, W: Write>(
    cloud: &PointCloud<T>,
    mut w: W,
    format: PlyFormat,
) -> std::io::Result<()> {
    let scalars: Vec<(&String, &Vec<T>)> = cloud.scalars().iter().collect();
    if let Some((name, _)) = scalars
        .iter()
        .find(|(n, _)| n.is_empty() || n.contains(char::is_whitespace))
    {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("attribute name `{name}` cannot be written to a PLY header"),
        ));
    }
    writeln!(w, "ply")?;
    match format {
        PlyFormat::Ascii => writeln!(w, "format ascii 1.0")?,
        PlyFormat::BinaryLittleEndian => writeln!(w, "format binary_little_endian 1.0")?,
    }
    writeln!(w, "element vertex {}", cloud.len())?;
    for axis in ["x", "y", "z"] {
        writeln!(w, "property double {axis}")?;
    }
    let colors = cloud.colors();
    if colors.is_some() {
        for channel in ["red", "green", "blue"] {
            writeln!(w, "property uchar {channel}")?;
        }
    }
    for (name, _) in &scalars {
        writeln!(w, "property double {name}")?;
    }
    writeln!(w, "end_header")?;

    for (i, p) in cloud.points().iter().enumerate() {
        let p = p.map(|c| c.to_f64_lossy());
        match format {
            PlyFormat::Ascii => {
                write!(w, "{:?} {:?} {:?}", p[0], p[1], p[2])?;
                if let Some(c) = colors {
                    write!(w, " {} {} {}", c[i][0], c[i][1], c[i][2])?;
                }
                for (_, v) in &scalars {
                    write!(w, " {:?}", v[i].to_f64_lossy())?;
                }
                writeln!(w)?;
            }
            PlyFormat::BinaryLittleEndian => {
                for c in p {
                    w.write_all(&c.to_le_bytes())?;
                }
                if let Some(c) = colors {
                    w.write_all(&c[i])?;
                }
                for (_, v) in &scalars {
                    w.write_all(&v[i].to_f64_lossy().to_le_bytes())?;
                }
            }
        }
    }
    w.flush()
}

/// Writes a cloud to `path`.
pub fn write_ply<T: Real>(
    cloud: &PointCloud<T>,
    path: impl AsRef<Path>,
    format: PlyFormat,
) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_ply_to(cloud, BufWriter::new(file), format).map_err(|e| Error::io(path, e))
}

/// Farthest-point sampling down to `target` points.
///
/// Starts from the point nearest the centroid and repeatedly adds the point
/// farthest from the current selection. Ties are broken by a seeded random
/// priority. The returned cloud lists points in selection order, so the
/// result for `k` is a prefix of the result for `k + 1`.
pub fn downsample<T: Real>(
    cloud: &PointCloud<T>,
    target: usize,
    seed: u64,
) -> Result<PointCloud<T>> {
    if target < 4 {
        return Err(Error::InvalidArgument(format!(
            "downsample target must be at least 4, got {target}"
        )));
    }
    let n = cloud.len();
    if target >= n {
        return Ok(cloud.clone());
    }
    let order = farthest_point_order(cloud.points(), target, seed);
    cloud.select(&order)
}

fn farthest_point_order<T: Real>(points: &[[T; 3]], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let priority: Vec<u64> = (0..points.len()).map(|_| rng.gen()).collect();
    // Larger is better: (distance, priority).
    let better =
        |d_a: T, a: usize, d_b: T, b: usize| d_a > d_b || (d_a == d_b && priority[a] > priority[b]);

    let c = {
        let n = T::from_usize_lossy(points.len());
        let mut s = [T::zero(); 3];
        for p in points {
            for a in 0..3 {
                s[a] = s[a] + p[a];
            }
        }
        [s[0] / n, s[1] / n, s[2] / n]
    };
    let mut first = 0;
    let mut best = T::infinity();
    for (i, p) in points.iter().enumerate() {
        let d = dist2(*p, c);
        if d < best || (d == best && priority[i] > priority[first]) {
            best = d;
            first = i;
        }
    }

    let mut selected = Vec::with_capacity(k);
    let mut min_d: Vec<T> = points.iter().map(|p| dist2(*p, points[first])).collect();
    let mut taken = vec![false; points.len()];
    selected.push(first);
    taken[first] = true;
    while selected.len() < k {
        let mut next = usize::MAX;
        let mut next_d = -T::one();
        for i in 0..points.len() {
            if taken[i] {
                continue;
            }
            if next == usize::MAX || better(min_d[i], i, next_d, next) {
                next = i;
                next_d = min_d[i];
            }
        }
        taken[next] = true;
        selected.push(next);
        let q = points[next];
        for (i, p) in points.iter().enumerate() {
            let d = dist2(*p, q);
            if d < min_d[i] {
                min_d[i] = d;
            }
        }
    }
    selected
}

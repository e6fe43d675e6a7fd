//! Reading and writing point clouds.
//!
//! Input formats: `.xyz` (whitespace-separated coordinates per line) and
//! `.ply` in the ascii 1.0 and binary_little_endian 1.0 dialects.
//! Big-endian PLY is rejected with a clear error. Unknown vertex properties
//! are skipped; parse failures name the offending line (text) or byte
//! offset (binary).
//!
//! Output floats use shortest round-trip formatting, so a written cloud
//! reloads bit-identically.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::model::{CloudError, PointCloud, PointLabel};

/// Supported on-disk formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    Xyz,
    PlyAscii,
    PlyBinaryLe,
}

/// Loads a cloud declared to be in the given format.
pub fn load_cloud(path: &Path, format: CloudFormat) -> Result<PointCloud, CloudError> {
    match format {
        CloudFormat::Xyz => load_xyz(path),
        CloudFormat::PlyAscii | CloudFormat::PlyBinaryLe => {
            let cloud_format = load_ply(path)?;
            let (cloud, actual) = cloud_format;
            if actual != format {
                return Err(CloudError::parse(format!(
                    "file is {actual:?} but {format:?} was requested"
                )));
            }
            Ok(cloud)
        }
    }
}

/// Loads a cloud picking the format from the file extension (`.xyz` or
/// `.ply`; the PLY dialect comes from the header).
pub fn load_cloud_auto(path: &Path) -> Result<PointCloud, CloudError> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("xyz") => load_xyz(path),
        Some("ply") => load_ply(path).map(|(cloud, _)| cloud),
        other => Err(CloudError::Parameter(format!(
            "unsupported cloud extension {other:?} (expected .xyz or .ply)"
        ))),
    }
}

fn load_xyz(path: &Path) -> Result<PointCloud, CloudError> {
    let reader = BufReader::new(File::open(path)?);
    let mut coords = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(CloudError::parse_line(
                lineno + 1,
                format!("expected at least 3 coordinates, found {}", fields.len()),
            ));
        }
        for f in &fields[..3] {
            let v: f64 = f.parse().map_err(|_| {
                CloudError::parse_line(lineno + 1, format!("invalid coordinate {f:?}"))
            })?;
            if !v.is_finite() {
                return Err(CloudError::parse_line(lineno + 1, "non-finite coordinate"));
            }
            coords.push(v);
        }
    }
    if coords.is_empty() {
        return Err(CloudError::EmptyCloud);
    }
    PointCloud::new(3, coords)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PlyType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl PlyType {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "char" | "int8" => PlyType::I8,
            "uchar" | "uint8" => PlyType::U8,
            "short" | "int16" => PlyType::I16,
            "ushort" | "uint16" => PlyType::U16,
            "int" | "int32" => PlyType::I32,
            "uint" | "uint32" => PlyType::U32,
            "float" | "float32" => PlyType::F32,
            "double" | "float64" => PlyType::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            PlyType::I8 | PlyType::U8 => 1,
            PlyType::I16 | PlyType::U16 => 2,
            PlyType::I32 | PlyType::U32 | PlyType::F32 => 4,
            PlyType::F64 => 8,
        }
    }
}

#[derive(Debug)]
struct PlyProperty {
    name: String,
    ty: PlyType,
}

#[derive(Debug)]
struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<PlyProperty>,
}

struct PlyHeader {
    format: CloudFormat,
    elements: Vec<PlyElement>,
    header_len: u64,
    header_lines: usize,
}

fn parse_ply_header(data: &[u8]) -> Result<PlyHeader, CloudError> {
    let mut offset = 0usize;
    let mut lineno = 0usize;
    let mut lines = Vec::new();
    while offset < data.len() {
        let end = data[offset..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|p| offset + p)
            .ok_or_else(|| {
                CloudError::parse_byte(data.len() as u64, "missing end_header before end of file")
            })?;
        let raw = &data[offset..end];
        let text = std::str::from_utf8(raw)
            .map_err(|_| CloudError::parse_line(lineno + 1, "header is not valid utf-8"))?
            .trim_end_matches('\r')
            .to_string();
        offset = end + 1;
        lineno += 1;
        let done = text.trim() == "end_header";
        lines.push(text);
        if done {
            break;
        }
        if offset >= data.len() {
            return Err(CloudError::parse_byte(
                data.len() as u64,
                "missing end_header before end of file",
            ));
        }
    }

    if lines.is_empty() || lines[0].trim() != "ply" {
        return Err(CloudError::parse_line(1, "missing ply magic"));
    }

    let mut format = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    for (i, line) in lines.iter().enumerate().skip(1) {
        let lineno = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.first().copied() {
            None | Some("comment") | Some("obj_info") => {}
            Some("end_header") => break,
            Some("format") => {
                format = Some(match fields.get(1).copied() {
                    Some("ascii") => CloudFormat::PlyAscii,
                    Some("binary_little_endian") => CloudFormat::PlyBinaryLe,
                    Some("binary_big_endian") => {
                        return Err(CloudError::parse_line(
                            lineno,
                            "binary_big_endian PLY is not supported; convert to \
                             binary_little_endian or ascii",
                        ))
                    }
                    other => {
                        return Err(CloudError::parse_line(
                            lineno,
                            format!("unknown ply format {other:?}"),
                        ))
                    }
                });
            }
            Some("element") => {
                let name = fields
                    .get(1)
                    .ok_or_else(|| CloudError::parse_line(lineno, "element without name"))?;
                let count: usize = fields
                    .get(2)
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| CloudError::parse_line(lineno, "element without count"))?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements.last_mut().ok_or_else(|| {
                    CloudError::parse_line(lineno, "property before any element")
                })?;
                if fields.get(1).copied() == Some("list") {
                    // List properties have per-row variable size; the vertex
                    // element never carries them in the supported dialects.
                    element.properties.push(PlyProperty {
                        name: format!("list:{}", fields.last().copied().unwrap_or("?")),
                        ty: PlyType::U8,
                    });
                    continue;
                }
                let ty = fields
                    .get(1)
                    .and_then(|t| PlyType::parse(t))
                    .ok_or_else(|| {
                        CloudError::parse_line(
                            lineno,
                            format!("unknown property type {:?}", fields.get(1)),
                        )
                    })?;
                let name = fields
                    .get(2)
                    .ok_or_else(|| CloudError::parse_line(lineno, "property without name"))?;
                element.properties.push(PlyProperty {
                    name: name.to_string(),
                    ty,
                });
            }
            Some(other) => {
                return Err(CloudError::parse_line(
                    lineno,
                    format!("unknown header keyword {other:?}"),
                ));
            }
        }
    }

    Ok(PlyHeader {
        format: format
            .ok_or_else(|| CloudError::parse_line(1, "header is missing a format line"))?,
        elements,
        header_len: offset as u64,
        header_lines: lineno,
    })
}

fn load_ply(path: &Path) -> Result<(PointCloud, CloudFormat), CloudError> {
    let mut data = Vec::new();
    File::open(path)?.read_to_end(&mut data)?;
    let header = parse_ply_header(&data)?;

    let vertex_pos = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| CloudError::parse("no vertex element in ply header"))?;
    let vertex = &header.elements[vertex_pos];
    if vertex.count == 0 {
        return Err(CloudError::EmptyCloud);
    }

    let xyz: Vec<Option<usize>> = ["x", "y", "z"]
        .iter()
        .map(|want| vertex.properties.iter().position(|p| &p.name == want))
        .collect();
    let xyz: Vec<usize> = xyz
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CloudError::parse("vertex element lacks x/y/z properties"))?;
    for &slot in &xyz {
        let p = &vertex.properties[slot];
        if !matches!(p.ty, PlyType::F32 | PlyType::F64) {
            return Err(CloudError::parse(format!(
                "vertex property {} must be float or double",
                p.name
            )));
        }
    }

    match header.format {
        CloudFormat::PlyAscii => {
            let body = std::str::from_utf8(&data[header.header_len as usize..])
                .map_err(|_| CloudError::parse("ascii body is not valid utf-8"))?;
            let cloud = parse_ply_ascii(body, &header, vertex_pos, &xyz)?;
            Ok((cloud, CloudFormat::PlyAscii))
        }
        CloudFormat::PlyBinaryLe => {
            let cloud = parse_ply_binary(&data, &header, vertex_pos, &xyz)?;
            Ok((cloud, CloudFormat::PlyBinaryLe))
        }
        CloudFormat::Xyz => unreachable!("ply header cannot declare xyz"),
    }
}

fn parse_ply_ascii(
    body: &str,
    header: &PlyHeader,
    vertex_pos: usize,
    xyz: &[usize],
) -> Result<PointCloud, CloudError> {
    let mut lines = body.lines().enumerate();
    let mut coords = Vec::new();
    for (pos, element) in header.elements.iter().enumerate() {
        for row in 0..element.count {
            let (lineno, line) = lines.next().ok_or_else(|| {
                CloudError::parse(format!(
                    "unexpected end of file in element {} row {row}",
                    element.name
                ))
            })?;
            if pos != vertex_pos {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != element.properties.len() {
                return Err(CloudError::parse_line(
                    header.header_lines + lineno + 1,
                    format!(
                        "expected {} fields, found {}",
                        element.properties.len(),
                        fields.len()
                    ),
                ));
            }
            for &slot in xyz {
                let v: f64 = fields[slot].parse().map_err(|_| {
                    CloudError::parse_line(
                        header.header_lines + lineno + 1,
                        format!("invalid coordinate {:?}", fields[slot]),
                    )
                })?;
                coords.push(v);
            }
        }
        if pos == vertex_pos {
            break;
        }
    }
    PointCloud::new(3, coords)
}

fn parse_ply_binary(
    data: &[u8],
    header: &PlyHeader,
    vertex_pos: usize,
    xyz: &[usize],
) -> Result<PointCloud, CloudError> {
    let mut offset = header.header_len as usize;
    let mut coords = Vec::new();
    for (pos, element) in header.elements.iter().enumerate() {
        if element.properties.iter().any(|p| p.name.starts_with("list:")) {
            if pos <= vertex_pos {
                return Err(CloudError::parse_byte(
                    offset as u64,
                    format!("list property in element {} is not supported", element.name),
                ));
            }
            break; // trailing list elements are irrelevant to the cloud
        }
        let row_size: usize = element.properties.iter().map(|p| p.ty.size()).sum();
        if pos != vertex_pos {
            let skip = row_size * element.count;
            if offset + skip > data.len() {
                return Err(CloudError::parse_byte(
                    data.len() as u64,
                    format!("unexpected end of file inside element {}", element.name),
                ));
            }
            offset += skip;
            continue;
        }
        let offsets: Vec<usize> = {
            let mut acc = 0;
            element
                .properties
                .iter()
                .map(|p| {
                    let o = acc;
                    acc += p.ty.size();
                    o
                })
                .collect()
        };
        for row in 0..element.count {
            if offset + row_size > data.len() {
                return Err(CloudError::parse_byte(
                    offset as u64,
                    format!(
                        "unexpected end of file at vertex {row} of {}",
                        element.count
                    ),
                ));
            }
            for &slot in xyz {
                let at = offset + offsets[slot];
                let v = match element.properties[slot].ty {
                    PlyType::F32 => {
                        f32::from_le_bytes(data[at..at + 4].try_into().expect("bounds checked"))
                            as f64
                    }
                    PlyType::F64 => {
                        f64::from_le_bytes(data[at..at + 8].try_into().expect("bounds checked"))
                    }
                    _ => unreachable!("xyz property types validated as float"),
                };
                coords.push(v);
            }
            offset += row_size;
        }
        break;
    }
    PointCloud::new(3, coords)
}

/// Formats a float with shortest round-trip precision.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Writes `x y z` per line.
pub fn write_xyz<W: Write>(cloud: &PointCloud, out: &mut W) -> Result<(), CloudError> {
    for p in cloud.points() {
        let fields: Vec<String> = p.iter().map(|c| fmt_f64(*c)).collect();
        writeln!(out, "{}", fields.join(" "))?;
    }
    Ok(())
}

/// Writes an ascii PLY with plain xyz vertices.
pub fn write_ply_ascii<W: Write>(cloud: &PointCloud, out: &mut W) -> Result<(), CloudError> {
    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", cloud.len())?;
    writeln!(out, "property float x")?;
    writeln!(out, "property float y")?;
    writeln!(out, "property float z")?;
    writeln!(out, "end_header")?;
    for p in cloud.points() {
        writeln!(out, "{} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]))?;
    }
    Ok(())
}

/// Writes a cloud in the format implied by the path extension.
pub fn write_cloud(cloud: &PointCloud, path: &Path) -> Result<(), CloudError> {
    let mut file = std::io::BufWriter::new(File::create(path)?);
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("xyz") => write_xyz(cloud, &mut file),
        Some("ply") => write_ply_ascii(cloud, &mut file),
        other => Err(CloudError::Parameter(format!(
            "unsupported output extension {other:?} (expected .xyz or .ply)"
        ))),
    }
}

/// Writes a classification-colored ascii PLY to a path.
pub fn save_classified(
    cloud: &PointCloud,
    kept: &[usize],
    truth: Option<&[PointLabel]>,
    path: &Path,
) -> Result<(), CloudError> {
    let mut file = std::io::BufWriter::new(File::create(path)?);
    write_classified_ply(cloud, kept, truth, &mut file)
}

/// Writes a classification-colored ascii PLY.
///
/// With ground truth: kept real points are blue, kept noise red, removed
/// real yellow; removed noise is omitted. Without truth, kept points are
/// white and removed points are omitted.
pub fn write_classified_ply<W: Write>(
    cloud: &PointCloud,
    kept: &[usize],
    truth: Option<&[PointLabel]>,
    out: &mut W,
) -> Result<(), CloudError> {
    if let Some(t) = truth {
        if t.len() != cloud.len() {
            return Err(CloudError::Parameter(format!(
                "truth labels ({}) do not cover the cloud ({})",
                t.len(),
                cloud.len()
            )));
        }
    }
    let mut is_kept = vec![false; cloud.len()];
    for &i in kept {
        if i >= cloud.len() {
            return Err(CloudError::Parameter(format!(
                "kept index {i} out of bounds for cloud of {}",
                cloud.len()
            )));
        }
        is_kept[i] = true;
    }

    const BLUE: [u8; 3] = [0, 0, 255];
    const RED: [u8; 3] = [255, 0, 0];
    const YELLOW: [u8; 3] = [255, 255, 0];
    const WHITE: [u8; 3] = [255, 255, 255];

    let mut rows: Vec<(usize, [u8; 3])> = Vec::new();
    for i in 0..cloud.len() {
        let color = match (is_kept[i], truth.map(|t| t[i])) {
            (true, Some(PointLabel::Real)) => Some(BLUE),
            (true, Some(PointLabel::Noise)) => Some(RED),
            (false, Some(PointLabel::Real)) => Some(YELLOW),
            (false, Some(PointLabel::Noise)) => None,
            (true, None) => Some(WHITE),
            (false, None) => None,
        };
        if let Some(c) = color {
            rows.push((i, c));
        }
    }

    writeln!(out, "ply")?;
    writeln!(out, "format ascii 1.0")?;
    writeln!(out, "element vertex {}", rows.len())?;
    writeln!(out, "property float x")?;
    writeln!(out, "property float y")?;
    writeln!(out, "property float z")?;
    writeln!(out, "property uchar red")?;
    writeln!(out, "property uchar green")?;
    writeln!(out, "property uchar blue")?;
    writeln!(out, "end_header")?;
    for (i, c) in rows {
        let p = cloud.point(i);
        writeln!(
            out,
            "{} {} {} {} {} {}",
            fmt_f64(p[0]),
            fmt_f64(p[1]),
            fmt_f64(p[2]),
            c[0],
            c[1],
            c[2]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn tmp(content: &[u8], ext: &str) -> tempfile::TempPath {
        let mut f = tempfile::Builder::new()
            .suffix(&format!(".{ext}"))
            .tempfile()
            .unwrap();
        f.write_all(content).unwrap();
        f.into_temp_path()
    }

    #[test]
    fn xyz_two_points() {
        let path = tmp(b"0 0 0\n1 0 0\n", "xyz");
        let cloud = load_cloud(Path::new(&*path), CloudFormat::Xyz).unwrap();
        assert_eq!(cloud.len(), 2);
        assert_eq!(cloud.point(1), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn xyz_bad_row_names_line() {
        let path = tmp(b"0 0 0\n1 oops 0\n", "xyz");
        let err = load_cloud(Path::new(&*path), CloudFormat::Xyz).unwrap_err();
        match err {
            CloudError::Parse { line, .. } => assert_eq!(line, Some(2)),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn xyz_empty_is_an_error() {
        let path = tmp(b"", "xyz");
        assert!(matches!(
            load_cloud(Path::new(&*path), CloudFormat::Xyz),
            Err(CloudError::EmptyCloud)
        ));
    }

    #[test]
    fn ply_ascii_with_color_property_ignored() {
        let body = b"ply\nformat ascii 1.0\ncomment colored\nelement vertex 3\n\
property float x\nproperty float y\nproperty float z\nproperty uchar red\n\
end_header\n0 0 0 255\n1 0 0 10\n0 1 0 20\n";
        let path = tmp(body, "ply");
        let cloud = load_cloud_auto(Path::new(&*path)).unwrap();
        assert_eq!(cloud.len(), 3);
        assert_eq!(cloud.point(2), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn ply_binary_le_round_trip() {
        let mut body = Vec::new();
        body.extend_from_slice(
            b"ply\nformat binary_little_endian 1.0\nelement vertex 2\n\
property float x\nproperty float y\nproperty float z\nproperty uchar red\nend_header\n",
        );
        for (p, c) in [([1.0f32, 2.0, 3.0], 7u8), ([-1.5, 0.25, 9.0], 8)] {
            for v in p {
                body.extend_from_slice(&v.to_le_bytes());
            }
            body.push(c);
        }
        let path = tmp(&body, "ply");
        let cloud = load_cloud(Path::new(&*path), CloudFormat::PlyBinaryLe).unwrap();
        assert_eq!(cloud.len(), 2);
        assert_eq!(cloud.point(0), &[1.0, 2.0, 3.0]);
        assert_eq!(cloud.point(1), &[-1.5, 0.25, 9.0]);
    }

    #[test]
    fn truncated_binary_names_byte_offset() {
        let mut body = Vec::new();
        let header: &[u8] = b"ply\nformat binary_little_endian 1.0\nelement vertex 2\n\
property float x\nproperty float y\nproperty float z\nend_header\n";
        body.extend_from_slice(header);
        body.extend_from_slice(&1.0f32.to_le_bytes());
        body.extend_from_slice(&2.0f32.to_le_bytes());
        body.extend_from_slice(&3.0f32.to_le_bytes());
        // second vertex missing entirely
        let path = tmp(&body, "ply");
        let err = load_cloud(Path::new(&*path), CloudFormat::PlyBinaryLe).unwrap_err();
        match err {
            CloudError::Parse { byte, .. } => {
                assert_eq!(byte, Some(header.len() as u64 + 12));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn big_endian_is_rejected() {
        let path = tmp(
            b"ply\nformat binary_big_endian 1.0\nelement vertex 1\n\
property float x\nproperty float y\nproperty float z\nend_header\n",
            "ply",
        );
        let err = load_cloud_auto(Path::new(&*path)).unwrap_err();
        assert!(err.to_string().contains("binary_big_endian"));
    }

    #[test]
    fn xyz_write_read_round_trip_is_exact() {
        let cloud = PointCloud::from_points3(&[
            [0.1, 0.2, 0.30000000000004],
            [1.0 / 3.0, -7.25, 1e-17],
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_xyz(&cloud, &mut buf).unwrap();
        let path = tmp(&buf, "xyz");
        let reloaded = load_cloud_auto(Path::new(&*path)).unwrap();
        assert_eq!(reloaded, cloud);
    }

    #[test]
    fn classified_colors_follow_the_rule() {
        use PointLabel::{Noise, Real};
        let cloud = PointCloud::from_points3(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [3.0, 0.0, 0.0],
        ])
        .unwrap();
        let truth = [Real, Noise, Real, Noise];
        // kept: 0 (real -> blue), 1 (noise -> red);
        // removed: 2 (real -> yellow), 3 (noise -> omitted).
        let mut buf = Vec::new();
        write_classified_ply(&cloud, &[0, 1], Some(&truth), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("element vertex 3"));
        assert!(text.contains("0 0 0 0 0 255"));
        assert!(text.contains("1 0 0 255 0 0"));
        assert!(text.contains("2 0 0 255 255 0"));
        assert!(!text.contains("3 0 0"));
    }

    #[test]
    fn classified_without_truth_keeps_white_only() {
        let cloud = PointCloud::from_points3(&[[0.0; 3], [1.0, 0.0, 0.0]]).unwrap();
        let mut buf = Vec::new();
        write_classified_ply(&cloud, &[], None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("element vertex 0"));

        let mut buf = Vec::new();
        write_classified_ply(&cloud, &[1], None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("element vertex 1"));
        assert!(text.contains("1 0 0 255 255 255"));
    }

    #[test]
    fn all_kept_all_real_is_all_blue() {
        let cloud = PointCloud::from_points3(&[[0.0; 3], [1.0, 0.0, 0.0]]).unwrap();
        let truth = [PointLabel::Real, PointLabel::Real];
        let mut buf = Vec::new();
        write_classified_ply(&cloud, &[0, 1], Some(&truth), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text
            .lines()
            .skip_while(|l| *l != "end_header")
            .skip(1)
            .collect();
        assert_eq!(body.len(), 2);
        assert!(body.iter().all(|row| row.ends_with("0 0 255")));
    }
}

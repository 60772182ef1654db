//! OBJ, OFF and binary STL reading and writing, plus the per-triangle
//! label sidecar.
//!
//! OBJ is the lossless interchange format: coordinates are written with 17
//! significant digits, which round-trips every binary64 value. Binary STL
//! stores single precision, so it is lossless only for inputs already
//! representable in `f32`.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::kernel::{Axis, Point3};
use crate::labels::LabelSet;
use crate::mesh::Mesh;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: byte {offset}: {message}")]
    ParseBinary {
        path: String,
        offset: usize,
        message: String,
    },
    #[error("unsupported mesh format `{0}` (expected .obj, .off or .stl)")]
    UnsupportedFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Off,
    Stl,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<MeshFormat, IoError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or_default()
            .to_ascii_lowercase();
        ext.parse()
    }
}

impl FromStr for MeshFormat {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "off" => Ok(MeshFormat::Off),
            "stl" => Ok(MeshFormat::Stl),
            other => Err(IoError::UnsupportedFormat(other.to_string())),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<Mesh, IoError> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)?;
    let file = fs::File::open(path).map_err(io_err(path))?;
    let name = path.display().to_string();
    match format {
        MeshFormat::Obj => read_obj(BufReader::new(file), &name),
        MeshFormat::Off => read_off(BufReader::new(file), &name),
        MeshFormat::Stl => {
            let mut bytes = Vec::new();
            BufReader::new(file).read_to_end(&mut bytes).map_err(io_err(path))?;
            read_stl(&bytes, &name)
        }
    }
}

/// Writes `mesh` in the format implied by the extension. With `labels`, a
/// sidecar `<path>.labels` is written too.
pub fn save(path: impl AsRef<Path>, mesh: &Mesh, labels: Option<&[LabelSet]>) -> Result<(), IoError> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)?;
    let mut out = io::BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
    match format {
        MeshFormat::Obj => write_obj(&mut out, mesh),
        MeshFormat::Off => write_off(&mut out, mesh),
        MeshFormat::Stl => write_stl(&mut out, mesh),
    }
    .and_then(|_| out.flush())
    .map_err(io_err(path))?;
    if let Some(labels) = labels {
        let side = sidecar_path(path);
        let mut w = io::BufWriter::new(fs::File::create(&side).map_err(io_err(&side))?);
        write_labels(&mut w, labels).and_then(|_| w.flush()).map_err(io_err(&side))?;
    }
    Ok(())
}

pub fn sidecar_path(mesh_path: &Path) -> PathBuf {
    let mut s = mesh_path.as_os_str().to_owned();
    s.push(".labels");
    PathBuf::from(s)
}

/// One hexadecimal bitmask per line, in triangle order.
pub fn write_labels(w: &mut impl Write, labels: &[LabelSet]) -> io::Result<()> {
    for l in labels {
        writeln!(w, "{}", l.to_hex())?;
    }
    Ok(())
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<LabelSet>, IoError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            LabelSet::from_hex(l).ok_or_else(|| IoError::Parse {
                path: name.clone(),
                line: i + 1,
                message: format!("bad label mask `{}`", l.trim()),
            })
        })
        .collect()
}

fn fmt_coord(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_obj(w: &mut impl Write, mesh: &Mesh) -> io::Result<()> {
    for p in &mesh.vertices {
        let [x, y, z] = p.to_array();
        writeln!(w, "v {} {} {}", fmt_coord(x), fmt_coord(y), fmt_coord(z))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

pub fn write_off(w: &mut impl Write, mesh: &Mesh) -> io::Result<()> {
    writeln!(w, "OFF")?;
    writeln!(w, "{} {} 0", mesh.vertices.len(), mesh.triangles.len())?;
    for p in &mesh.vertices {
        let [x, y, z] = p.to_array();
        writeln!(w, "{} {} {}", fmt_coord(x), fmt_coord(y), fmt_coord(z))?;
    }
    for t in &mesh.triangles {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

pub fn write_stl(w: &mut impl Write, mesh: &Mesh) -> io::Result<()> {
    let mut header = [0u8; 80];
    let tag = b"binary stl";
    header[..tag.len()].copy_from_slice(tag);
    w.write_all(&header)?;
    w.write_all(&(mesh.triangles.len() as u32).to_le_bytes())?;
    for t in &mesh.triangles {
        let p = t.map(|v| mesh.vertices[v as usize].to_array());
        let (u, v) = (sub(p[1], p[0]), sub(p[2], p[0]));
        let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let n = if len > 0.0 { n.map(|c| c / len) } else { [0.0; 3] };
        for c in n.iter().chain(p.iter().flatten()) {
            w.write_all(&(*c as f32).to_le_bytes())?;
        }
        w.write_all(&[0, 0])?;
    }
    Ok(())
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

struct LineError<'a> {
    path: &'a str,
}

impl LineError<'_> {
    fn at(&self, line: usize, message: impl Into<String>) -> IoError {
        IoError::Parse {
            path: self.path.to_string(),
            line,
            message: message.into(),
        }
    }
}

fn parse_f64(tok: Option<&str>, e: &LineError<'_>, line: usize) -> Result<f64, IoError> {
    let tok = tok.ok_or_else(|| e.at(line, "missing coordinate"))?;
    let x: f64 = tok
        .parse()
        .map_err(|_| e.at(line, format!("bad number `{tok}`")))?;
    if !x.is_finite() {
        return Err(e.at(line, format!("non-finite coordinate `{tok}`")));
    }
    Ok(x)
}

/// Fans a polygon into triangles.
fn push_polygon(tris: &mut Vec<[u32; 3]>, poly: &[u32]) {
    for i in 1..poly.len() - 1 {
        tris.push([poly[0], poly[i], poly[i + 1]]);
    }
}

/// Reads vertices and faces; polygons are fanned, texture and normal
/// references ignored, negative indices resolved relative to the end.
pub fn read_obj(r: impl BufRead, path: &str) -> Result<Mesh, IoError> {
    let e = LineError { path };
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut poly = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let n = i + 1;
        let line = line.map_err(|source| IoError::Io {
            path: path.to_string(),
            source,
        })?;
        let line = line.split('#').next().unwrap_or_default();
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let x = parse_f64(tok.next(), &e, n)?;
                let y = parse_f64(tok.next(), &e, n)?;
                let z = parse_f64(tok.next(), &e, n)?;
                vertices.push(Point3::new(x, y, z));
            }
            Some("f") => {
                poly.clear();
                for t in tok {
                    let idx = t.split('/').next().unwrap_or_default();
                    let k: i64 = idx
                        .parse()
                        .map_err(|_| e.at(n, format!("bad face index `{t}`")))?;
                    let resolved = if k < 0 { vertices.len() as i64 + k } else { k - 1 };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(e.at(n, format!("face index {k} out of range")));
                    }
                    poly.push(resolved as u32);
                }
                if poly.len() < 3 {
                    return Err(e.at(n, "face with fewer than 3 vertices"));
                }
                push_polygon(&mut triangles, &poly);
            }
            _ => {}
        }
    }
    Ok(Mesh::new(vertices, triangles))
}

struct Tokens<'a> {
    toks: std::vec::IntoIter<(usize, String)>,
    line: usize,
    e: LineError<'a>,
}

impl Tokens<'_> {
    fn next(&mut self, what: &str) -> Result<(usize, String), IoError> {
        match self.toks.next() {
            Some((n, t)) => {
                self.line = n;
                Ok((n, t))
            }
            None => Err(self.e.at(self.line, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn count(&mut self, what: &str) -> Result<usize, IoError> {
        let (n, t) = self.next(what)?;
        t.parse().map_err(|_| self.e.at(n, format!("bad {what} `{t}`")))
    }

    fn coord(&mut self) -> Result<f64, IoError> {
        let (n, t) = self.next("coordinate")?;
        parse_f64(Some(&t), &self.e, n)
    }
}

pub fn read_off(r: impl BufRead, path: &str) -> Result<Mesh, IoError> {
    let mut toks: Vec<(usize, String)> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|source| IoError::Io {
            path: path.to_string(),
            source,
        })?;
        let line = line.split('#').next().unwrap_or_default();
        toks.extend(line.split_whitespace().map(|t| (i + 1, t.to_string())));
    }
    // The header keyword is optional in the wild.
    if toks.first().is_some_and(|(_, t)| t == "OFF") {
        toks.remove(0);
    } else if let Some((n, t)) = toks.first().filter(|(_, t)| t.starts_with("OFF")) {
        return Err(LineError { path }.at(*n, format!("unsupported OFF variant `{t}`")));
    }
    let mut tk = Tokens {
        toks: toks.into_iter(),
        line: 1,
        e: LineError { path },
    };
    let nv = tk.count("vertex count")?;
    let nf = tk.count("face count")?;
    tk.count("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        vertices.push(Point3::new(tk.coord()?, tk.coord()?, tk.coord()?));
    }
    let mut triangles = Vec::with_capacity(nf);
    let mut poly = Vec::new();
    for _ in 0..nf {
        let k = tk.count("face size")?;
        if k < 3 {
            return Err(tk.e.at(tk.line, "face with fewer than 3 vertices"));
        }
        poly.clear();
        for _ in 0..k {
            let v = tk.count("face index")?;
            if v >= nv {
                return Err(tk.e.at(tk.line, format!("face index {v} out of range")));
            }
            poly.push(v as u32);
        }
        push_polygon(&mut triangles, &poly);
    }
    Ok(Mesh::new(vertices, triangles))
}

/// Binary STL. Corners are welded by exact coordinate equality; bytes past
/// the last declared triangle are ignored.
pub fn read_stl(bytes: &[u8], path: &str) -> Result<Mesh, IoError> {
    let err = |offset: usize, message: String| IoError::ParseBinary {
        path: path.to_string(),
        offset,
        message,
    };
    if bytes.len() < 84 {
        return Err(err(bytes.len(), "file shorter than the 84-byte header".into()));
    }
    let n = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
    let need = 84 + 50 * n;
    if bytes.len() < need {
        let done = (bytes.len() - 84) / 50;
        return Err(err(
            84 + 50 * done,
            format!("header declares {n} triangles but data ends after {done}"),
        ));
    }
    let mut index: HashMap<[u64; 3], u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::with_capacity(n);
    let f = |o: usize| f32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as f64;
    for t in 0..n {
        let base = 84 + 50 * t + 12;
        let mut tri = [0u32; 3];
        for (k, slot) in tri.iter_mut().enumerate() {
            let o = base + 12 * k;
            let p = Point3::new(f(o), f(o + 4), f(o + 8));
            if !p.is_finite() {
                return Err(err(o, "non-finite coordinate".into()));
            }
            *slot = *index.entry(p.key()).or_insert_with(|| {
                vertices.push(p);
                (vertices.len() - 1) as u32
            });
        }
        triangles.push(tri);
    }
    Ok(Mesh::new(vertices, triangles))
}

/// Translates to the origin and scales uniformly so the longest box side
/// is 1.
pub fn normalize(mesh: &Mesh) -> Mesh {
    let b = mesh.bbox();
    let side = Axis::ALL.iter().map(|&a| b.extent(a)).fold(0.0, f64::max);
    let s = if side > 0.0 { 1.0 / side } else { 1.0 };
    let c = [0, 1, 2].map(|i| 0.5 * (b.min[i] + b.max[i]));
    Mesh::new(
        mesh.vertices
            .iter()
            .map(|p| {
                let a = p.to_array();
                Point3::new((a[0] - c[0]) * s, (a[1] - c[1]) * s, (a[2] - c[2]) * s)
            })
            .collect(),
        mesh.triangles.clone(),
    )
}

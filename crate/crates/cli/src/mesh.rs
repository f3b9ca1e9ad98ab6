//! OFF and OBJ output, plus readers used to check round trips.

use std::fmt::Write as _;
use std::path::Path;

use facetarea::{FlatPolyhedron, Polyhedron, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MeshFormat {
    Off,
    Obj,
}

/// Vertices and faces (0-based, counterclockwise from outside).
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
}

impl Mesh {
    /// Present facets of `poly`, in facet (sorted area) order.
    pub fn from_polyhedron(poly: &Polyhedron) -> Mesh {
        Mesh {
            vertices: poly.vertices.clone(),
            faces: poly
                .facets
                .iter()
                .filter(|f| f.is_present())
                .map(|f| f.cycle.clone())
                .collect(),
        }
    }

    /// The flat realization as a zero-volume mesh in the plane `z = 0`: the
    /// square facing `+z` and the strips facing `-z`.
    pub fn from_flat(flat: &FlatPolyhedron) -> Mesh {
        let s = flat.side;
        let mut xs = vec![0.0];
        for w in &flat.strip_widths {
            xs.push(xs.last().unwrap() + w);
        }
        // the strips tile the square exactly
        *xs.last_mut().unwrap() = s;
        let m = xs.len();
        let mut vertices: Vec<Vec3> = xs.iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect();
        vertices.extend(xs.iter().map(|&x| Vec3::new(x, s, 0.0)));
        let bottom = |j: usize| j;
        let top = |j: usize| m + j;

        let mut square: Vec<usize> = (0..m).map(bottom).collect();
        square.extend((0..m).rev().map(top));
        let mut faces = vec![square];
        for j in 0..m - 1 {
            faces.push(vec![bottom(j), top(j), top(j + 1), bottom(j + 1)]);
        }
        Mesh { vertices, faces }
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| (0..f.len()).map(move |i| (f[i], f[(i + 1) % f.len()])))
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        writeln!(s, "{} {} {}", self.vertices.len(), self.faces.len(), self.edge_count()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z).unwrap();
        }
        for f in &self.faces {
            write!(s, "{}", f.len()).unwrap();
            for i in f {
                write!(s, " {i}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            writeln!(s, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z).unwrap();
        }
        for f in &self.faces {
            s.push('f');
            for i in f {
                write!(s, " {}", i + 1).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn render(&self, format: MeshFormat) -> String {
        match format {
            MeshFormat::Off => self.to_off(),
            MeshFormat::Obj => self.to_obj(),
        }
    }
}

/// Writes `mesh` to `path`; errors carry the path.
pub fn write_mesh(mesh: &Mesh, format: MeshFormat, path: &Path) -> Result<(), String> {
    std::fs::write(path, mesh.render(format)).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_vertex<'a>(mut it: impl Iterator<Item = &'a str>) -> Option<Vec3> {
    let x = it.next()?.parse().ok()?;
    let y = it.next()?.parse().ok()?;
    let z = it.next()?.parse().ok()?;
    Some(Vec3::new(x, y, z))
}

pub fn read_off(text: &str) -> Result<Mesh, String> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    if lines.next() != Some("OFF") {
        return Err("missing OFF header".into());
    }
    let counts: Vec<usize> = lines
        .next()
        .ok_or("missing counts")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| format!("bad count `{t}`")))
        .collect::<Result<_, _>>()?;
    let [nv, nf, _] = counts[..] else {
        return Err("counts line needs three values".into());
    };
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines.next().ok_or("missing vertex line")?;
        vertices.push(parse_vertex(line.split_whitespace()).ok_or_else(|| format!("bad vertex `{line}`"))?);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = lines.next().ok_or("missing face line")?;
        let idx: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| format!("bad index `{t}`")))
            .collect::<Result<_, _>>()?;
        if idx.is_empty() || idx[0] != idx.len() - 1 {
            return Err(format!("bad face `{line}`"));
        }
        faces.push(idx[1..].to_vec());
    }
    Ok(Mesh { vertices, faces })
}

pub fn read_obj(text: &str) -> Result<Mesh, String> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => vertices.push(parse_vertex(it).ok_or_else(|| format!("bad vertex `{line}`"))?),
            Some("f") => faces.push(
                it.map(|t| match t.parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(i - 1),
                    _ => Err(format!("bad index `{t}`")),
                })
                .collect::<Result<_, _>>()?,
            ),
            _ => {}
        }
    }
    Ok(Mesh { vertices, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use facetarea::intersect_halfspaces;

    fn cube() -> Polyhedron {
        let normals = [Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()];
        intersect_halfspaces(&normals, &[0.5; 6]).unwrap()
    }

    #[test]
    fn cube_counts() {
        let off = Mesh::from_polyhedron(&cube()).to_off();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("8 6 12"));
        assert_eq!(off.lines().count(), 2 + 8 + 6);
    }

    #[test]
    fn round_trips_are_exact() {
        let normals = [
            Vec3::new(1.0, 1.0, 1.0).normalize(),
            Vec3::new(1.0, -1.0, -1.0).normalize(),
            Vec3::new(-1.0, 1.0, -1.0).normalize(),
            Vec3::new(-1.0, -1.0, 1.0).normalize(),
        ];
        let poly = intersect_halfspaces(&normals, &[0.1, 1.0 / 3.0, 0.7, 2f64.sqrt()]).unwrap();
        let mesh = Mesh::from_polyhedron(&poly);
        assert!(mesh.to_off().lines().nth(1) == Some("4 4 6"));
        assert_eq!(read_off(&mesh.to_off()).unwrap(), mesh);
        assert_eq!(read_obj(&mesh.to_obj()).unwrap(), mesh);
    }

    #[test]
    fn obj_is_one_based() {
        let obj = Mesh::from_polyhedron(&cube()).to_obj();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 8);
        assert!(obj.lines().filter(|l| l.starts_with("f ")).all(|l| !l.split_whitespace().any(|t| t == "0")));
    }

    #[test]
    fn flat_mesh_is_two_sided() {
        let flat = FlatPolyhedron {
            side: 6f64.sqrt(),
            strip_widths: vec![3.0 / 6f64.sqrt(), 2.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt()],
            top_face_area: 6.0,
        };
        let mesh = Mesh::from_flat(&flat);
        assert_eq!(mesh.vertices.len(), 8);
        assert_eq!(mesh.faces.len(), 4);
        // V - E + F = 2 for the doubly covered square
        assert_eq!(mesh.vertices.len() + mesh.faces.len() - mesh.edge_count(), 2);
        let area = |f: &Vec<usize>| {
            let p: Vec<Vec3> = f.iter().map(|&i| mesh.vertices[i]).collect();
            (1..p.len() - 1).map(|j| (p[j] - p[0]).cross(&(p[j + 1] - p[0])).z / 2.0).sum::<f64>()
        };
        let signed: Vec<f64> = mesh.faces.iter().map(area).collect();
        assert!((signed[0] - 6.0).abs() < 1e-12);
        for (s, a) in signed[1..].iter().zip([3.0, 2.0, 1.0]) {
            assert!((s + a).abs() < 1e-12);
        }
    }
}

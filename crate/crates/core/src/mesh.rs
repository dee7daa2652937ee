//! Conforming triangular meshes of the two model domains, uniform refinement
//! and the per-face geometry used by numerical fluxes and penalties.
//!
//! Faces are stored once. The *left* element of a face is the one that
//! traverses the face vertices in counterclockwise order, and the stored
//! normal points out of it. For interior faces the right element sees the
//! opposite normal, so `n_left + n_right = 0`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Boundary condition attached to a boundary segment (and to every face on it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Dirichlet,
    Neumann,
}

/// The two domains the solver knows how to mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    /// `{-1 <= x, y <= 1, y - x + 1 >= 0}`: the square with its lower-right
    /// corner cut off.
    Pentagon,
    /// The square `[1, 2]^2`.
    UnitSquareShifted,
}

impl DomainKind {
    /// Boundary polygon in counterclockwise order.
    pub fn corners(self) -> &'static [[f64; 2]] {
        match self {
            DomainKind::Pentagon => &[[-1.0, -1.0], [0.0, -1.0], [1.0, 0.0], [1.0, 1.0], [-1.0, 1.0]],
            DomainKind::UnitSquareShifted => &[[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]],
        }
    }

    pub fn segment_count(self) -> usize {
        self.corners().len()
    }

    pub fn area(self) -> f64 {
        match self {
            DomainKind::Pentagon => 3.5,
            DomainKind::UnitSquareShifted => 1.0,
        }
    }
}

impl FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pentagon" => Ok(DomainKind::Pentagon),
            "square" | "unit-square-shifted" => Ok(DomainKind::UnitSquareShifted),
            other => Err(Error::UnsupportedDomain(other.to_string())),
        }
    }
}

/// A domain together with one boundary tag per polygon segment.
///
/// Segment `i` runs from `corners()[i]` to `corners()[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub tags: Vec<BoundaryTag>,
}

impl DomainSpec {
    pub fn dirichlet(kind: DomainKind) -> Self {
        DomainSpec {
            kind,
            tags: vec![BoundaryTag::Dirichlet; kind.segment_count()],
        }
    }

    pub fn with_tags(kind: DomainKind, tags: Vec<BoundaryTag>) -> Result<Self> {
        let spec = DomainSpec { kind, tags };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tags.len() != self.kind.segment_count() {
            return Err(Error::InvalidDomain(format!(
                "{} boundary tags given for {} segments",
                self.tags.len(),
                self.kind.segment_count()
            )));
        }
        if !self.tags.contains(&BoundaryTag::Dirichlet) {
            return Err(Error::InvalidDomain("the Dirichlet boundary must be non-empty".into()));
        }
        Ok(())
    }

    /// Tag of the boundary segment containing `x`, if any.
    fn tag_at(&self, x: [f64; 2]) -> Option<BoundaryTag> {
        let c = self.kind.corners();
        (0..c.len()).find_map(|i| {
            let (a, b) = (c[i], c[(i + 1) % c.len()]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let r = [x[0] - a[0], x[1] - a[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let t = (r[0] * d[0] + r[1] * d[1]) / len2;
            let cross = (d[0] * r[1] - d[1] * r[0]) / len2.sqrt();
            (cross.abs() < 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&t)).then(|| self.tags[i])
        })
    }
}

/// What lies on the far side of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Element(usize),
    Boundary(BoundaryTag),
}

#[derive(Debug, Clone)]
pub struct Face {
    /// Vertex ids in the counterclockwise order of the left element.
    pub vertices: [usize; 2],
    pub left: usize,
    /// Local index of this face in the left element (opposite vertex index).
    pub left_local: usize,
    pub neighbor: Neighbor,
    /// Unit normal pointing out of the left element.
    pub normal: [f64; 2],
    pub length: f64,
    /// Shortest normal characteristic length: the smallest height of the
    /// adjacent triangles over this face.
    pub h_e: f64,
}

impl Face {
    pub fn is_interior(&self) -> bool {
        matches!(self.neighbor, Neighbor::Element(_))
    }

    pub fn right(&self) -> Option<usize> {
        match self.neighbor {
            Neighbor::Element(e) => Some(e),
            Neighbor::Boundary(_) => None,
        }
    }

    pub fn boundary_tag(&self) -> Option<BoundaryTag> {
        match self.neighbor {
            Neighbor::Boundary(t) => Some(t),
            Neighbor::Element(_) => None,
        }
    }
}

/// An immutable conforming triangulation.
#[derive(Debug, Clone)]
pub struct Mesh {
    domain: DomainSpec,
    vertices: Vec<[f64; 2]>,
    elements: Vec<[usize; 3]>,
    faces: Vec<Face>,
    element_faces: Vec<[usize; 3]>,
    areas: Vec<f64>,
    h: f64,
}

impl Mesh {
    /// Build a mesh from raw connectivity. Elements must be counterclockwise.
    pub fn from_parts(domain: DomainSpec, vertices: Vec<[f64; 2]>, elements: Vec<[usize; 3]>) -> Result<Self> {
        domain.validate()?;
        let areas: Vec<f64> = elements.iter().map(|t| signed_area(&vertices, t)).collect();
        if let Some(i) = areas.iter().position(|&a| a <= 0.0) {
            return Err(Error::InvalidDomain(format!("element {i} is not counterclockwise")));
        }

        let mut faces: Vec<Face> = Vec::new();
        let mut element_faces = vec![[usize::MAX; 3]; elements.len()];
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, tri) in elements.iter().enumerate() {
            for local in 0..3 {
                let a = tri[(local + 1) % 3];
                let b = tri[(local + 2) % 3];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    Some(&f) => {
                        let face = &mut faces[f];
                        if face.right().is_some() || face.vertices != [b, a] {
                            return Err(Error::InvalidDomain(format!("face {a}-{b} is not conforming")));
                        }
                        face.neighbor = Neighbor::Element(e);
                        element_faces[e][local] = f;
                    }
                    None => {
                        let (pa, pb) = (vertices[a], vertices[b]);
                        let d = [pb[0] - pa[0], pb[1] - pa[1]];
                        let length = d[0].hypot(d[1]);
                        lookup.insert(key, faces.len());
                        element_faces[e][local] = faces.len();
                        faces.push(Face {
                            vertices: [a, b],
                            left: e,
                            left_local: local,
                            // Provisional; fixed below once all elements are seen.
                            neighbor: Neighbor::Boundary(BoundaryTag::Dirichlet),
                            normal: [d[1] / length, -d[0] / length],
                            length,
                            h_e: 2.0 * areas[e] / length,
                        });
                    }
                }
            }
        }

        for face in faces.iter_mut() {
            match face.neighbor {
                Neighbor::Element(r) => {
                    face.h_e = face.h_e.min(2.0 * areas[r] / face.length);
                }
                Neighbor::Boundary(_) => {
                    let (pa, pb) = (vertices[face.vertices[0]], vertices[face.vertices[1]]);
                    let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                    let tag = domain.tag_at(mid).ok_or_else(|| {
                        Error::InvalidDomain(format!("boundary face at {mid:?} lies on no domain segment"))
                    })?;
                    face.neighbor = Neighbor::Boundary(tag);
                }
            }
        }

        let h = elements
            .iter()
            .map(|t| {
                (0..3)
                    .map(|i| {
                        let (a, b) = (vertices[t[i]], vertices[t[(i + 1) % 3]]);
                        (b[0] - a[0]).hypot(b[1] - a[1])
                    })
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);

        Ok(Mesh {
            domain,
            vertices,
            elements,
            faces,
            element_faces,
            areas,
            h,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    /// Face ids of an element; entry `i` is the face opposite local vertex `i`.
    pub fn element_faces(&self, e: usize) -> [usize; 3] {
        self.element_faces[e]
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn area(&self, e: usize) -> f64 {
        self.areas[e]
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Largest element diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn element_vertices(&self, e: usize) -> [[f64; 2]; 3] {
        let t = self.elements[e];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    /// `(unit normal out of the left element, |e|, h_e)`.
    pub fn face_geometry(&self, id: usize) -> ([f64; 2], f64, f64) {
        let f = &self.faces[id];
        (f.normal, f.length, f.h_e)
    }

    /// Outward unit normal of face `id` as seen from element `e`.
    pub fn outward_normal(&self, id: usize, e: usize) -> [f64; 2] {
        let f = &self.faces[id];
        if f.left == e {
            f.normal
        } else {
            [-f.normal[0], -f.normal[1]]
        }
    }

    /// Elements sharing a face with `e`.
    pub fn neighbors(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        self.element_faces[e].into_iter().filter_map(move |f| {
            let face = &self.faces[f];
            match face.neighbor {
                Neighbor::Element(r) if face.left == e => Some(r),
                Neighbor::Element(_) => Some(face.left),
                Neighbor::Boundary(_) => None,
            }
        })
    }

    /// Ratio of circumdiameter to indiameter of element `e`.
    pub fn aspect_ratio(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_vertices(e);
        let la = (b[0] - c[0]).hypot(b[1] - c[1]);
        let lb = (a[0] - c[0]).hypot(a[1] - c[1]);
        let lc = (a[0] - b[0]).hypot(a[1] - b[1]);
        let area = self.areas[e];
        let circum = la * lb * lc / (4.0 * area);
        let inr = 2.0 * area / (la + lb + lc);
        circum / inr
    }

    /// Split every triangle into four by its edge midpoints.
    pub fn refine_uniform(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (pa, pb) = (vertices[a], vertices[b]);
                vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                vertices.len() - 1
            })
        };
        let mut elements = Vec::with_capacity(4 * self.elements.len());
        for &[v0, v1, v2] in &self.elements {
            let m01 = mid(v0, v1, &mut vertices);
            let m12 = mid(v1, v2, &mut vertices);
            let m20 = mid(v2, v0, &mut vertices);
            elements.push([v0, m01, m20]);
            elements.push([m01, v1, m12]);
            elements.push([m20, m12, v2]);
            elements.push([m01, m12, m20]);
        }
        Mesh::from_parts(self.domain.clone(), vertices, elements).expect("refinement of a valid mesh is valid")
    }

    /// Plain-text dump: `v x y`, `t i j k`, `f i j left right tag`
    /// (`right = -1` on boundary faces; tag is `I`, `D` or `N`).
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {}", v[0], v[1])?;
        }
        for t in &self.elements {
            writeln!(w, "t {} {} {}", t[0], t[1], t[2])?;
        }
        for f in &self.faces {
            let (right, tag) = match f.neighbor {
                Neighbor::Element(r) => (r as i64, 'I'),
                Neighbor::Boundary(BoundaryTag::Dirichlet) => (-1, 'D'),
                Neighbor::Boundary(BoundaryTag::Neumann) => (-1, 'N'),
            };
            writeln!(w, "f {} {} {} {} {}", f.vertices[0], f.vertices[1], f.left, right, tag)?;
        }
        Ok(())
    }
}

impl fmt::Display for Mesh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} mesh: {} vertices, {} elements, {} faces, h = {:.4}",
            self.domain.kind,
            self.vertices.len(),
            self.elements.len(),
            self.faces.len(),
            self.h
        )
    }
}

fn signed_area(v: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Triangulate a `cells x cells` grid of squares with lower-left corner
/// `origin` and cell size `step`, splitting each cell along its slope +1
/// diagonal. `skip(i, j)` drops the triangle below the diagonal of cell `(i, j)`.
fn grid_mesh(
    domain: DomainSpec,
    origin: [f64; 2],
    step: f64,
    cells: usize,
    skip_lower: impl Fn(usize, usize) -> bool,
) -> Result<Mesh> {
    let n = cells + 1;
    let mut elements = Vec::new();
    for j in 0..cells {
        for i in 0..cells {
            let v00 = j * n + i;
            let v10 = v00 + 1;
            let v01 = v00 + n;
            let v11 = v01 + 1;
            if !skip_lower(i, j) {
                elements.push([v00, v10, v11]);
            }
            elements.push([v00, v11, v01]);
        }
    }
    // Keep only referenced vertices, renumbered in grid order.
    let mut used = vec![false; n * n];
    elements.iter().flatten().for_each(|&v| used[v] = true);
    let mut renumber = vec![usize::MAX; n * n];
    let mut vertices = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if used[j * n + i] {
                renumber[j * n + i] = vertices.len();
                vertices.push([origin[0] + step * i as f64, origin[1] + step * j as f64]);
            }
        }
    }
    for t in elements.iter_mut() {
        t.iter_mut().for_each(|v| *v = renumber[*v]);
    }
    Mesh::from_parts(domain, vertices, elements)
}

/// Level-0 mesh of a domain: 7 triangles for the pentagon, 16 for the square.
pub fn build_coarse(domain: &DomainSpec) -> Result<Mesh> {
    domain.validate()?;
    match domain.kind {
        DomainKind::Pentagon => grid_mesh(domain.clone(), [-1.0, -1.0], 1.0, 2, |i, j| (i, j) == (1, 0)),
        DomainKind::UnitSquareShifted => {
            // Both diagonals of [1, 2]^2, then one refinement: 16 elements.
            let vertices = vec![[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0], [1.5, 1.5]];
            let elements = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
            Ok(Mesh::from_parts(domain.clone(), vertices, elements)?.refine_uniform())
        }
    }
}

/// The coarse mesh refined `level` times.
pub fn build_level(domain: &DomainSpec, level: usize) -> Result<Mesh> {
    let mut mesh = build_coarse(domain)?;
    for _ in 0..level {
        mesh = mesh.refine_uniform();
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pentagon() -> Mesh {
        build_coarse(&DomainSpec::dirichlet(DomainKind::Pentagon)).unwrap()
    }

    #[test]
    fn coarse_element_counts_and_area() {
        let m = pentagon();
        assert_eq!(m.num_elements(), 7);
        assert_relative_eq!(m.total_area(), 3.5, max_relative = 1e-12);
        let s = build_coarse(&DomainSpec::dirichlet(DomainKind::UnitSquareShifted)).unwrap();
        assert_eq!(s.num_elements(), 16);
        assert_relative_eq!(s.total_area(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn refinement_quadruples_and_preserves_area() {
        let mut m = pentagon();
        let mut counts = vec![m.num_elements()];
        for _ in 0..3 {
            let fine = m.refine_uniform();
            assert_relative_eq!(fine.total_area(), m.total_area(), max_relative = 1e-12);
            assert_relative_eq!(fine.h(), 0.5 * m.h(), max_relative = 1e-14);
            m = fine;
            counts.push(m.num_elements());
        }
        assert_eq!(counts, vec![7, 28, 112, 448]);
        let s = build_level(&DomainSpec::dirichlet(DomainKind::UnitSquareShifted), 1).unwrap();
        assert_eq!(s.num_elements(), 64);
    }

    #[test]
    fn face_incidence_and_normals() {
        for level in 0..3 {
            let m = build_level(&DomainSpec::dirichlet(DomainKind::Pentagon), level).unwrap();
            let mut refs = vec![0usize; m.faces().len()];
            for e in 0..m.num_elements() {
                for f in m.element_faces(e) {
                    refs[f] += 1;
                }
            }
            for (id, face) in m.faces().iter().enumerate() {
                assert_eq!(refs[id], if face.is_interior() { 2 } else { 1 });
                assert_relative_eq!(face.normal[0].hypot(face.normal[1]), 1.0, epsilon = 1e-14);
                if let Some(r) = face.right() {
                    let n1 = m.outward_normal(id, face.left);
                    let n2 = m.outward_normal(id, r);
                    assert_eq!(n1[0] + n2[0], 0.0);
                    assert_eq!(n1[1] + n2[1], 0.0);
                    // Both elements list the same two vertices.
                    let tl = m.elements()[face.left];
                    let tr = m.elements()[r];
                    assert!(face.vertices.iter().all(|v| tl.contains(v) && tr.contains(v)));
                }
                // Normal points away from the left element's opposite vertex.
                let t = m.element_vertices(face.left);
                let opp = t[face.left_local];
                let a = m.vertices()[face.vertices[0]];
                let dot = (opp[0] - a[0]) * face.normal[0] + (opp[1] - a[1]) * face.normal[1];
                assert!(dot < 0.0);
            }
        }
    }

    #[test]
    fn h_e_of_unit_right_triangle() {
        let domain = DomainSpec::dirichlet(DomainKind::Pentagon);
        let m = build_coarse(&domain).unwrap();
        // Every coarse face is a leg (length 1, height 1) or a diagonal
        // (length sqrt 2, height 1/sqrt 2).
        for f in m.faces() {
            if (f.length - 1.0).abs() < 1e-14 {
                assert_relative_eq!(f.h_e, 1.0, epsilon = 1e-14);
            } else {
                assert_relative_eq!(f.length, 2f64.sqrt(), epsilon = 1e-14);
                assert_relative_eq!(f.h_e, 0.5f64.sqrt(), epsilon = 1e-14);
            }
            if let Some(r) = f.right() {
                assert!(f.h_e <= 2.0 * m.area(f.left) / f.length + 1e-15);
                assert!(f.h_e <= 2.0 * m.area(r) / f.length + 1e-15);
            }
        }
        let fine = m.refine_uniform();
        let coarse_he: Vec<f64> = m.faces().iter().map(|f| f.h_e).collect();
        for f in fine.faces() {
            assert!(coarse_he.iter().any(|&h| (0.5 * h - f.h_e).abs() < 1e-14));
        }
    }

    #[test]
    fn quasi_uniform_across_levels() {
        let domain = DomainSpec::dirichlet(DomainKind::Pentagon);
        let mut m = build_coarse(&domain).unwrap();
        for _ in 0..4 {
            let max_ar = (0..m.num_elements()).map(|e| m.aspect_ratio(e)).fold(0.0, f64::max);
            assert!(max_ar <= 10.0);
            for f in m.faces() {
                let ratio = f.h_e * f.length / m.area(f.left);
                assert!((0.9..=2.1).contains(&ratio), "{ratio}");
            }
            m = m.refine_uniform();
        }
    }

    #[test]
    fn boundary_tags_follow_segments() {
        use BoundaryTag::*;
        let domain =
            DomainSpec::with_tags(DomainKind::UnitSquareShifted, vec![Dirichlet, Neumann, Dirichlet, Dirichlet]).unwrap();
        let m = build_level(&domain, 1).unwrap();
        for f in m.faces() {
            if let Some(tag) = f.boundary_tag() {
                let a = m.vertices()[f.vertices[0]];
                let b = m.vertices()[f.vertices[1]];
                let on_right_edge = a[0] == 2.0 && b[0] == 2.0;
                assert_eq!(tag == Neumann, on_right_edge);
            }
        }
        assert!(DomainSpec::with_tags(DomainKind::Pentagon, vec![Neumann; 5]).is_err());
        assert!("hexagon".parse::<DomainKind>().is_err());
    }

    #[test]
    fn dump_format() {
        let m = pentagon();
        let mut out = Vec::new();
        m.write_dump(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 8);
        assert_eq!(text.lines().filter(|l| l.starts_with("t ")).count(), 7);
        assert!(text.lines().any(|l| l.starts_with("f ") && l.ends_with(" -1 D")));
    }
}

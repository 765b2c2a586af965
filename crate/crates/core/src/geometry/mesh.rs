//! Graded triangulation of the fluid domain.
//!
//! The mesher slices the domain into vertical strips between breakpoints of
//! the top and bottom profiles, places nodes at the uniform target size on
//! each vertical line, triangulates between adjacent node columns, and then
//! grades toward the contact points and interior boundary kinks by
//! longest-edge bisection with conforming closure. Bisection keeps the
//! minimum angle bounded, so the graded corner layers stay shape-regular.
//! Wetted curves must be x-monotone polylines (boxes, wedges, trapezoids).

use super::{BottomProfile, DomainSpec, GeometryError};
use serde::Serialize;
use std::collections::HashMap;

/// Boundary classification: free surface (Dirichlet side of the mixed
/// problem), wetted body boundary, bottom/walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SegmentTag {
    DirichletFree,
    NeumannWetted,
    NeumannBottom,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: SegmentTag,
}

/// Conforming P1 triangulation. `vertex_dof` identifies vertices that share a
/// degree of freedom (used by the periodic validation strip); for ordinary
/// meshes it is the identity.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<BoundaryEdge>,
    /// Vertex indices of the contact points present in the mesh.
    pub corner_vertices: Vec<usize>,
    pub vertex_dof: Vec<usize>,
    pub n_dofs: usize,
    pub target_h: f64,
}

/// Boundary restriction of a mesh: tagged edges, corners, local target sizes.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub edges: Vec<BoundaryEdge>,
    pub corner_vertices: Vec<usize>,
    /// Target edge length at each boundary vertex.
    pub local_sizes: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeshQuality {
    pub n_vertices: usize,
    pub n_triangles: usize,
    pub min_angle_deg: f64,
    pub min_boundary_edge: f64,
    pub max_boundary_edge: f64,
}

impl Mesh {
    pub fn dof_coords(&self) -> Vec<[f64; 2]> {
        let mut coords = vec![[f64::NAN; 2]; self.n_dofs];
        for (v, &d) in self.vertex_dof.iter().enumerate() {
            coords[d] = self.vertices[v];
        }
        coords
    }

    pub fn edges_of(&self, tag: SegmentTag) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary.iter().filter(move |e| e.tag == tag)
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        let a = self.vertices[e.vertices[0]];
        let b = self.vertices[e.vertices[1]];
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }

    /// Dofs lying on the free surface, grouped into connected components and
    /// sorted by x within each component. Components are ordered left to
    /// right.
    pub fn surface_components(&self) -> Vec<Vec<usize>> {
        let coords = self.dof_coords();
        let mut dofs: Vec<usize> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for e in self.edges_of(SegmentTag::DirichletFree) {
            for &v in &e.vertices {
                let d = self.vertex_dof[v];
                if seen.insert(d) {
                    dofs.push(d);
                }
            }
        }
        dofs.sort_by(|&a, &b| coords[a][0].partial_cmp(&coords[b][0]).unwrap());
        if dofs.is_empty() {
            return Vec::new();
        }
        let mut adjacent = std::collections::HashSet::new();
        for e in self.edges_of(SegmentTag::DirichletFree) {
            let mut d = [self.vertex_dof[e.vertices[0]], self.vertex_dof[e.vertices[1]]];
            d.sort_unstable();
            adjacent.insert((d[0], d[1]));
        }
        let mut comps = vec![vec![dofs[0]]];
        for w in dofs.windows(2) {
            let mut key = [w[0], w[1]];
            key.sort_unstable();
            if adjacent.contains(&(key[0], key[1])) {
                comps.last_mut().unwrap().push(w[1]);
            } else {
                comps.push(vec![w[1]]);
            }
        }
        comps
    }

    /// All free-surface dofs, left to right.
    pub fn gamma_d_dofs(&self) -> Vec<usize> {
        self.surface_components().into_iter().flatten().collect()
    }

    pub fn quality(&self) -> MeshQuality {
        let mut min_angle = f64::INFINITY;
        for t in &self.triangles {
            min_angle = min_angle.min(triangle_min_angle(
                self.vertices[t[0]],
                self.vertices[t[1]],
                self.vertices[t[2]],
            ));
        }
        let (mut emin, mut emax) = (f64::INFINITY, 0.0_f64);
        for e in &self.boundary {
            let l = self.edge_length(e);
            emin = emin.min(l);
            emax = emax.max(l);
        }
        MeshQuality {
            n_vertices: self.vertices.len(),
            n_triangles: self.triangles.len(),
            min_angle_deg: min_angle.to_degrees(),
            min_boundary_edge: emin,
            max_boundary_edge: emax,
        }
    }

    pub fn boundary_mesh(&self, sizef: &dyn Fn([f64; 2]) -> f64) -> BoundaryMesh {
        let mut seen = std::collections::HashSet::new();
        let mut local_sizes = Vec::new();
        for e in &self.boundary {
            for &v in &e.vertices {
                if seen.insert(v) {
                    local_sizes.push((v, sizef(self.vertices[v])));
                }
            }
        }
        BoundaryMesh {
            edges: self.boundary.clone(),
            corner_vertices: self.corner_vertices.clone(),
            local_sizes,
        }
    }

    /// Split every triangle into four; boundary edges inherit their tag.
    /// The refined P1 spaces are nested in the original ones.
    pub fn refine_uniform(&self) -> Mesh {
        assert!(
            self.vertex_dof.iter().enumerate().all(|(v, &d)| v == d),
            "uniform refinement is only supported for non-identified meshes"
        );
        let mut vertices = self.vertices.clone();
        let mut midpoint = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let pa = vertices[a];
                let pb = vertices[b];
                vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let [a, b, c] = *t;
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mut boundary = Vec::with_capacity(2 * self.boundary.len());
        for e in &self.boundary {
            let [a, b] = e.vertices;
            let m = mid(a, b, &mut vertices);
            boundary.push(BoundaryEdge { vertices: [a, m], tag: e.tag });
            boundary.push(BoundaryEdge { vertices: [m, b], tag: e.tag });
        }
        let n = vertices.len();
        Mesh {
            vertices,
            triangles,
            boundary,
            corner_vertices: self.corner_vertices.clone(),
            vertex_dof: (0..n).collect(),
            n_dofs: n,
            target_h: 0.5 * self.target_h,
        }
    }
}

fn triangle_min_angle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let p = [a, b, c];
    let mut min_angle = f64::INFINITY;
    for k in 0..3 {
        let a = p[k];
        let b = p[(k + 1) % 3];
        let c = p[(k + 2) % 3];
        let u = [b[0] - a[0], b[1] - a[1]];
        let v = [c[0] - a[0], c[1] - a[1]];
        let dot = u[0] * v[0] + u[1] * v[1];
        let nu = (u[0] * u[0] + u[1] * u[1]).sqrt();
        let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let ang = (dot / (nu * nv)).clamp(-1.0, 1.0).acos();
        min_angle = min_angle.min(ang);
    }
    min_angle
}

/// Geometric grading toward a set of attractor points: target size
/// `min(h, max(h q^layers, d (1-q)))` with `d` the distance to the nearest
/// attractor.
#[derive(Debug, Clone)]
pub struct GradedSize {
    pub h: f64,
    pub floor: f64,
    pub ratio: f64,
    pub attractors: Vec<[f64; 2]>,
}

impl GradedSize {
    pub fn new(h: f64, q: f64, layers: u32, attractors: Vec<[f64; 2]>) -> Self {
        GradedSize { h, floor: h * q.powi(layers as i32), ratio: 1.0 - q, attractors }
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let mut s = self.h;
        for a in &self.attractors {
            let d = ((p[0] - a[0]).powi(2) + (p[1] - a[1]).powi(2)).sqrt();
            s = s.min((d * self.ratio).max(self.floor));
        }
        s
    }

    /// Attractors implied by a domain spec: contact points, wetted-curve
    /// kinks, bottom kinks.
    pub fn spec_attractors(spec: &DomainSpec) -> Vec<[f64; 2]> {
        let mut attractors = vec![
            [spec.x_left, 0.0],
            [spec.x_body_left, 0.0],
            [spec.x_body_right, 0.0],
            [spec.x_right, 0.0],
        ];
        for p in &spec.wetted[1..spec.wetted.len() - 1] {
            attractors.push(*p);
        }
        for x in spec.bottom.breakpoints() {
            attractors.push([x, spec.bottom.eval(x)]);
        }
        attractors
    }
}

/// Uniform node parameters on the segment `p0 -> p1` at spacing about `h`,
/// always containing 0 and 1.
fn uniform_params(p0: [f64; 2], p1: [f64; 2], h: f64) -> Vec<f64> {
    let len = ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
    if len < 1e-14 {
        return vec![0.0];
    }
    let n = (len / h).round().max(1.0) as usize;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// Top profile of the fluid: elevation and tag as functions of x, with the
/// vertical runs of the wetted curve recorded separately.
struct TopProfile {
    /// Graph pieces: (x0, x1, z0, z1, tag).
    pieces: Vec<(f64, f64, f64, f64, SegmentTag)>,
    /// Vertical boundary runs: (x, z_low, z_high).
    verticals: Vec<(f64, f64, f64)>,
}

impl TopProfile {
    fn from_spec(spec: &DomainSpec, tol: f64) -> Result<Self, GeometryError> {
        let mut pieces = vec![(
            spec.x_left,
            spec.x_body_left,
            0.0,
            0.0,
            SegmentTag::DirichletFree,
        )];
        let mut verticals = Vec::new();
        let w = &spec.wetted;
        for seg in w.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            if b[0] - a[0] < -tol {
                return Err(GeometryError::MeshGenerationFailure(
                    "wetted curve must be x-monotone (no overhangs)".into(),
                ));
            }
            if (b[0] - a[0]).abs() <= tol {
                verticals.push((a[0], a[1].min(b[1]), a[1].max(b[1])));
            } else {
                pieces.push((a[0], b[0], a[1], b[1], SegmentTag::NeumannWetted));
            }
        }
        pieces.push((
            spec.x_body_right,
            spec.x_right,
            0.0,
            0.0,
            SegmentTag::DirichletFree,
        ));
        Ok(TopProfile { pieces, verticals })
    }

    /// Top elevation on the strip containing `x`; strips never straddle a
    /// piece boundary.
    fn eval(&self, x: f64, tol: f64) -> (f64, SegmentTag) {
        for &(x0, x1, z0, z1, tag) in &self.pieces {
            if x >= x0 - tol && x <= x1 + tol && x1 > x0 + tol {
                let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
                return (z0 + t * (z1 - z0), tag);
            }
        }
        (0.0, SegmentTag::DirichletFree)
    }
}

/// Top level at column `x` as seen from a strip with interior midpoint `xm`:
/// on a vertical side, the column participates only up to the strip's own
/// top.
fn z_top_at(top: &TopProfile, x: f64, xm: f64, tol: f64) -> f64 {
    let (z_strip, _) = top.eval(xm, tol);
    let is_vertical = top.verticals.iter().any(|&(vx, ..)| (vx - x).abs() < tol);
    if is_vertical {
        z_strip
    } else {
        top.eval(x, tol).0
    }
}

/// Build a graded conforming triangulation of the fluid domain.
///
/// `h` is the target edge length away from corners, `q` the geometric grading
/// ratio and `layers` the number of grading layers, so elements adjacent to a
/// contact point have size about `h q^layers`.
pub fn build_mesh(spec: &DomainSpec, h: f64, q: f64, layers: u32) -> Result<Mesh, GeometryError> {
    let width = spec.x_right - spec.x_left;
    if !(h > 0.0) || !h.is_finite() {
        return Err(GeometryError::MeshGenerationFailure(format!("invalid target size h = {h}")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(GeometryError::MeshGenerationFailure(format!("grading ratio q = {q} outside (0,1)")));
    }
    let tol = 1e-9 * width;
    let top = TopProfile::from_spec(spec, tol)?;
    let size = GradedSize::new(h, q, layers, GradedSize::spec_attractors(spec));

    // column x-positions: uniform between the profile breakpoints
    let mut breaks = vec![spec.x_left, spec.x_body_left, spec.x_body_right, spec.x_right];
    for &(x0, x1, ..) in &top.pieces {
        breaks.push(x0);
        breaks.push(x1);
    }
    for &(x, ..) in &top.verticals {
        breaks.push(x);
    }
    for x in spec.bottom.breakpoints() {
        breaks.push(x);
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < tol);

    let mut xs: Vec<f64> = Vec::new();
    for w in breaks.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        for (i, t) in uniform_params([x0, 0.0], [x1, 0.0], h).iter().enumerate() {
            if i == 0 && !xs.is_empty() {
                continue; // shared breakpoint column
            }
            xs.push(x0 + t * (x1 - x0));
        }
    }

    // node columns, z ascending, with mandatory nodes at vertical-run ends
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    let mut columns: Vec<Vec<usize>> = Vec::new();
    for &x in &xs {
        let zb = spec.bottom.eval(x);
        let is_vertical = top.verticals.iter().any(|&(vx, ..)| (vx - x).abs() < tol);
        let (zt_graph, _) = top.eval(x, tol);
        let zt = if is_vertical { 0.0 } else { zt_graph };
        if zt - zb < tol {
            let id = vertices.len();
            vertices.push([x, 0.5 * (zb + zt)]);
            columns.push(vec![id]);
            continue;
        }
        let mut mandatory = vec![];
        for &(vx, zlo, zhi) in &top.verticals {
            if (vx - x).abs() < tol {
                mandatory.push(zlo);
                mandatory.push(zhi);
            }
        }
        mandatory.retain(|&z| z > zb + tol && z < zt - tol);
        mandatory.sort_by(|a, b| a.partial_cmp(b).unwrap());
        mandatory.dedup_by(|a, b| (*a - *b).abs() < tol);

        let mut zs = vec![zb];
        let mut z0 = zb;
        for &zm in mandatory.iter().chain(std::iter::once(&zt)) {
            for (i, t) in uniform_params([x, z0], [x, zm], h).iter().enumerate() {
                if i > 0 {
                    zs.push(z0 + t * (zm - z0));
                }
            }
            z0 = zm;
        }
        let ids: Vec<usize> = zs
            .iter()
            .map(|&z| {
                vertices.push([x, z]);
                vertices.len() - 1
            })
            .collect();
        columns.push(ids);
    }

    // zip-triangulate adjacent columns
    let mut triangles = Vec::new();
    let mut boundary = Vec::new();
    let dist = |verts: &Vec<[f64; 2]>, a: usize, b: usize| {
        let (p, r) = (verts[a], verts[b]);
        ((p[0] - r[0]).powi(2) + (p[1] - r[1]).powi(2)).sqrt()
    };
    for s in 0..columns.len() - 1 {
        let xm = 0.5 * (xs[s] + xs[s + 1]);
        let (_, top_tag) = top.eval(xm, tol);
        let a: Vec<usize> = columns[s]
            .iter()
            .cloned()
            .filter(|&v| vertices[v][1] <= z_top_at(&top, xs[s], xm, tol) + tol)
            .collect();
        let b: Vec<usize> = columns[s + 1]
            .iter()
            .cloned()
            .filter(|&v| vertices[v][1] <= z_top_at(&top, xs[s + 1], xm, tol) + tol)
            .collect();
        if a.is_empty() || b.is_empty() {
            return Err(GeometryError::MeshGenerationFailure(format!(
                "empty node column near x = {xm}"
            )));
        }
        let (mut i, mut j) = (0usize, 0usize);
        while i + 1 < a.len() || j + 1 < b.len() {
            let adv_a = if i + 1 >= a.len() {
                false
            } else if j + 1 >= b.len() {
                true
            } else {
                dist(&vertices, a[i + 1], b[j]) <= dist(&vertices, a[i], b[j + 1])
            };
            if adv_a {
                triangles.push([a[i], b[j], a[i + 1]]);
                i += 1;
            } else {
                triangles.push([a[i], b[j], b[j + 1]]);
                j += 1;
            }
        }
        if a.len() > 1 || b.len() > 1 {
            boundary.push(BoundaryEdge { vertices: [a[0], b[0]], tag: SegmentTag::NeumannBottom });
            boundary.push(BoundaryEdge {
                vertices: [a[a.len() - 1], b[b.len() - 1]],
                tag: top_tag,
            });
        }
    }

    // vertical boundary runs: tank walls and body sides
    let mut wall_edges = |ci: usize, boundary: &mut Vec<BoundaryEdge>| {
        for w in columns[ci].windows(2) {
            boundary.push(BoundaryEdge { vertices: [w[0], w[1]], tag: SegmentTag::NeumannBottom });
        }
    };
    wall_edges(0, &mut boundary);
    wall_edges(columns.len() - 1, &mut boundary);
    for &(vx, zlo, zhi) in &top.verticals {
        let ci = xs
            .iter()
            .position(|&x| (x - vx).abs() < tol)
            .ok_or_else(|| GeometryError::MeshGenerationFailure("vertical run off any column".into()))?;
        for w in columns[ci].windows(2) {
            let (za, zb2) = (vertices[w[0]][1], vertices[w[1]][1]);
            if za >= zlo - tol && zb2 <= zhi + tol {
                boundary.push(BoundaryEdge { vertices: [w[0], w[1]], tag: SegmentTag::NeumannWetted });
            }
        }
    }

    // contact point vertices
    let mut corner_vertices = Vec::new();
    for cx in [spec.x_left, spec.x_body_left, spec.x_body_right, spec.x_right] {
        if let Some(ci) = xs.iter().position(|&x| (x - cx).abs() < tol) {
            if let Some(&v) = columns[ci].last() {
                if vertices[v][1].abs() < tol {
                    corner_vertices.push(v);
                }
            }
        }
    }

    let mesh = Mesh {
        vertices,
        triangles,
        boundary,
        corner_vertices,
        vertex_dof: Vec::new(), // filled below
        n_dofs: 0,
        target_h: h,
    };
    let mesh = grade_by_bisection(mesh, &size);
    Ok(mesh)
}

/// Longest edge of a triangle with a strict deterministic tie-break.
fn longest_edge(verts: &[[f64; 2]], tri: [usize; 3]) -> ((usize, usize), f64) {
    let mut best = ((0usize, 0usize), -1.0f64);
    for k in 0..3 {
        let (u, v) = (tri[k], tri[(k + 1) % 3]);
        let key = (u.min(v), u.max(v));
        let (p, r) = (verts[u], verts[v]);
        let l = ((p[0] - r[0]).powi(2) + (p[1] - r[1]).powi(2)).sqrt();
        if l > best.1 + 1e-15 || (l > best.1 - 1e-15 && key > best.0) {
            best = (key, l);
        }
    }
    best
}

/// Rivara longest-edge bisection toward the grading targets, with conforming
/// closure along longest-edge propagation paths.
fn grade_by_bisection(mesh: Mesh, size: &GradedSize) -> Mesh {
    let mut verts = mesh.vertices;
    let mut tris: Vec<[usize; 3]> = mesh.triangles;
    let mut alive: Vec<bool> = vec![true; tris.len()];
    let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            edge_map.entry((u.min(v), u.max(v))).or_default().push(t);
        }
    }
    let mut boundary_tags: HashMap<(usize, usize), SegmentTag> = HashMap::new();
    for e in &mesh.boundary {
        let [u, v] = e.vertices;
        boundary_tags.insert((u.min(v), u.max(v)), e.tag);
    }

    let needs_refinement = |verts: &Vec<[f64; 2]>, tri: [usize; 3]| -> bool {
        let (key, len) = longest_edge(verts, tri);
        let (p, r) = (verts[key.0], verts[key.1]);
        let mid = [0.5 * (p[0] + r[0]), 0.5 * (p[1] + r[1])];
        len > 1.5 * size.eval(mid)
    };

    // bisect `t` (and its longest-edge neighbor if compatible) across the
    // longest edge; pushes non-compatible neighbors first (LEPP)
    loop {
        let marked: Vec<usize> = (0..tris.len())
            .filter(|&t| alive[t] && needs_refinement(&verts, tris[t]))
            .collect();
        if marked.is_empty() {
            break;
        }
        for seed in marked {
            if !alive[seed] {
                continue;
            }
            let mut stack = vec![seed];
            while let Some(&t) = stack.last() {
                if !alive[t] {
                    stack.pop();
                    continue;
                }
                let (key, len) = longest_edge(&verts, tris[t]);
                let nb = edge_map
                    .get(&key)
                    .into_iter()
                    .flatten()
                    .find(|&&o| o != t && alive[o])
                    .cloned();
                match nb {
                    Some(o) => {
                        let (okey, olen) = longest_edge(&verts, tris[o]);
                        if okey == key {
                            bisect_pair(&mut verts, &mut tris, &mut alive, &mut edge_map, &mut boundary_tags, key, &[t, o]);
                            stack.pop();
                        } else {
                            // propagate along strictly longer edges; ties are
                            // broken by the deterministic key order
                            debug_assert!(olen > len - 1e-12);
                            stack.push(o);
                        }
                    }
                    None => {
                        bisect_pair(&mut verts, &mut tris, &mut alive, &mut edge_map, &mut boundary_tags, key, &[t]);
                        stack.pop();
                    }
                }
            }
        }
    }

    // compact
    let triangles: Vec<[usize; 3]> = tris
        .into_iter()
        .zip(alive)
        .filter_map(|(t, a)| a.then_some(t))
        .collect();
    let boundary: Vec<BoundaryEdge> = boundary_tags
        .iter()
        .map(|(&(u, v), &tag)| BoundaryEdge { vertices: [u, v], tag })
        .collect();
    let mut boundary = boundary;
    boundary.sort_by_key(|e| (e.vertices[0], e.vertices[1]));
    let n = verts.len();
    Mesh {
        vertices: verts,
        triangles,
        boundary,
        corner_vertices: mesh.corner_vertices,
        vertex_dof: (0..n).collect(),
        n_dofs: n,
        target_h: mesh.target_h,
    }
}

#[allow(clippy::too_many_arguments)]
fn bisect_pair(
    verts: &mut Vec<[f64; 2]>,
    tris: &mut Vec<[usize; 3]>,
    alive: &mut Vec<bool>,
    edge_map: &mut HashMap<(usize, usize), Vec<usize>>,
    boundary_tags: &mut HashMap<(usize, usize), SegmentTag>,
    key: (usize, usize),
    targets: &[usize],
) {
    let (a, b) = key;
    let (pa, pb) = (verts[a], verts[b]);
    verts.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
    let m = verts.len() - 1;
    if let Some(tag) = boundary_tags.remove(&key) {
        boundary_tags.insert((a.min(m), a.max(m)), tag);
        boundary_tags.insert((b.min(m), b.max(m)), tag);
    }
    for &t in targets {
        let tri = tris[t];
        let c = *tri
            .iter()
            .find(|&&v| v != a && v != b)
            .expect("bisection edge not part of triangle");
        // preserve orientation: replace the edge endpoint with the midpoint
        let child = |from: usize| -> [usize; 3] {
            let mut out = tri;
            for v in out.iter_mut() {
                if *v == from {
                    *v = m;
                }
            }
            out
        };
        let (c1, c2) = (child(b), child(a));
        alive[t] = false;
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            let ekey = (u.min(v), u.max(v));
            if let Some(list) = edge_map.get_mut(&ekey) {
                list.retain(|&o| o != t);
            }
        }
        for child_tri in [c1, c2] {
            let id = tris.len();
            tris.push(child_tri);
            alive.push(true);
            for k in 0..3 {
                let (u, v) = (child_tri[k], child_tri[(k + 1) % 3]);
                edge_map.entry((u.min(v), u.max(v))).or_default().push(id);
            }
        }
        let _ = c;
    }
}

/// Uniform triangulation of a flat strip of given length and depth, periodic
/// in x (dofs on the right edge are identified with the left edge). Top edges
/// are tagged as free surface, bottom as Neumann. Validation geometry for the
/// separation-of-variables oracle.
pub fn periodic_strip(length: f64, depth: f64, h: f64) -> Result<Mesh, GeometryError> {
    if !(h > 0.0) {
        return Err(GeometryError::MeshGenerationFailure(format!("invalid target size h = {h}")));
    }
    let nx = (length / h).round().max(3.0) as usize;
    let nz = (depth / h).round().max(1.0) as usize;
    let dx = length / nx as f64;
    let dz = depth / nz as f64;
    let mut vertices = Vec::with_capacity((nx + 1) * (nz + 1));
    let mut vertex_dof = Vec::with_capacity((nx + 1) * (nz + 1));
    // vertex (i, j), i in 0..=nx (i = nx duplicates i = 0), j = 0 bottom
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    for j in 0..=nz {
        for i in 0..=nx {
            vertices.push([i as f64 * dx, -depth + j as f64 * dz]);
            let iw = if i == nx { 0 } else { i };
            vertex_dof.push(j * nx + iw);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * nz);
    for j in 0..nz {
        for i in 0..nx {
            let v00 = vid(i, j);
            let v10 = vid(i + 1, j);
            let v01 = vid(i, j + 1);
            let v11 = vid(i + 1, j + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let mut boundary = Vec::with_capacity(2 * nx);
    for i in 0..nx {
        boundary.push(BoundaryEdge { vertices: [vid(i, nz), vid(i + 1, nz)], tag: SegmentTag::DirichletFree });
        boundary.push(BoundaryEdge { vertices: [vid(i, 0), vid(i + 1, 0)], tag: SegmentTag::NeumannBottom });
    }
    Ok(Mesh {
        vertices,
        triangles,
        boundary,
        corner_vertices: Vec::new(),
        vertex_dof,
        n_dofs: nx * (nz + 1),
        target_h: h,
    })
}

#[cfg(test)]
mod tests {
    use super::super::DomainSpec;
    use super::*;

    fn rect_spec() -> DomainSpec {
        DomainSpec::rectangular(0.0, 4.0, 6.0, 10.0, 1.0, 0.5, 1.0, 9.81, -0.1)
    }

    #[test]
    fn graded_corner_edges() {
        let spec = rect_spec();
        let mesh = build_mesh(&spec, 0.1, 0.5, 6).unwrap();
        let q = mesh.quality();
        // smallest boundary edge sits next to a corner, at about h q^layers
        let floor = 0.1 * 0.5f64.powi(6);
        assert!(q.min_boundary_edge >= 0.5 * floor && q.min_boundary_edge <= 2.0 * floor,
            "corner edge {} vs floor {}", q.min_boundary_edge, floor);
        assert!(q.min_angle_deg >= 20.0, "min angle {}", q.min_angle_deg);
    }

    #[test]
    fn boundary_dofs_scale_linearly() {
        let spec = rect_spec();
        let n1 = build_mesh(&spec, 0.2, 0.5, 2).unwrap().gamma_d_dofs().len();
        let n2 = build_mesh(&spec, 0.1, 0.5, 2).unwrap().gamma_d_dofs().len();
        let ratio = n2 as f64 / n1 as f64;
        assert!(ratio > 1.6 && ratio < 2.4, "dof ratio {}", ratio);
    }

    #[test]
    fn zero_h_rejected() {
        let spec = rect_spec();
        assert!(matches!(
            build_mesh(&spec, 0.0, 0.5, 6),
            Err(GeometryError::MeshGenerationFailure(_))
        ));
    }

    #[test]
    fn tags_partition_boundary() {
        let spec = rect_spec();
        let mesh = build_mesh(&spec, 0.1, 0.5, 4).unwrap();
        // every boundary edge appears once and belongs to exactly one tag
        let mut seen = std::collections::HashSet::new();
        for e in &mesh.boundary {
            let mut key = e.vertices;
            key.sort_unstable();
            assert!(seen.insert(key), "duplicate boundary edge {:?}", key);
        }
        // boundary edges of the triangulation (edges with one adjacent
        // triangle) are exactly the tagged edges
        let mut counts = std::collections::HashMap::new();
        for t in &mesh.triangles {
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                *counts.entry((u.min(v), u.max(v))).or_insert(0usize) += 1;
            }
        }
        let topological: std::collections::HashSet<[usize; 2]> = counts
            .iter()
            .filter(|&(_, &c)| c == 1)
            .map(|(&(u, v), _)| [u, v])
            .collect();
        assert_eq!(topological.len(), seen.len());
        for key in seen {
            assert!(topological.contains(&key), "untagged boundary edge {:?}", key);
        }
        // the free-surface edges project onto the two surface intervals
        for e in mesh.edges_of(SegmentTag::DirichletFree) {
            for &v in &e.vertices {
                let [x, z] = mesh.vertices[v];
                assert!(z.abs() < 1e-12);
                assert!(
                    (x <= spec.x_body_left + 1e-9) || (x >= spec.x_body_right - 1e-9),
                    "surface dof at x = {x} under the body"
                );
            }
        }
        // two surface components, ordered left to right and sorted in x
        let comps = mesh.surface_components();
        assert_eq!(comps.len(), 2);
        let coords = mesh.dof_coords();
        for comp in &comps {
            for w in comp.windows(2) {
                assert!(coords[w[0]][0] < coords[w[1]][0]);
            }
        }
    }

    #[test]
    fn boundary_edges_near_local_target() {
        let spec = rect_spec();
        let mesh = build_mesh(&spec, 0.1, 0.5, 5).unwrap();
        let size = GradedSize::new(0.1, 0.5, 5, GradedSize::spec_attractors(&spec));
        for e in &mesh.boundary {
            let a = mesh.vertices[e.vertices[0]];
            let b = mesh.vertices[e.vertices[1]];
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let l = mesh.edge_length(e);
            let s = size.eval(mid);
            assert!(l <= 2.0 * s && l >= s / 2.0, "edge {l:.4} vs target {s:.4} at {mid:?}");
        }
    }

    #[test]
    fn wedge_hull_meshes_cleanly() {
        let mut spec = rect_spec();
        spec.wetted = vec![[4.0, 0.0], [4.4, -0.5], [5.6, -0.5], [6.0, 0.0]];
        let (_, c) = {
            // recompute equilibrium for the trapezoidal hull
            let mut area2 = 0.0;
            let mut cx = 0.0;
            let n = spec.wetted.len();
            for i in 0..n {
                let p = spec.wetted[i];
                let q = spec.wetted[(i + 1) % n];
                let cross = p[0] * q[1] - q[0] * p[1];
                area2 += cross;
                cx += (p[0] + q[0]) * cross;
            }
            let area = (0.5 * area2).abs();
            spec.mass = spec.rho * area;
            (area, cx / (3.0 * area2))
        };
        spec.center_of_mass[0] = c;
        let mesh = build_mesh(&spec, 0.1, 0.5, 4).unwrap();
        let q = mesh.quality();
        assert!(q.min_angle_deg >= 20.0, "min angle {}", q.min_angle_deg);
        assert_eq!(mesh.surface_components().len(), 2);
    }

    #[test]
    fn periodic_strip_identifies_seam() {
        let mesh = periodic_strip(2.0 * std::f64::consts::PI, 1.0, 0.1).unwrap();
        // one duplicated column of nz + 1 vertices
        assert_eq!(mesh.vertices.len() - mesh.n_dofs, 11);
        assert!(mesh.quality().min_angle_deg > 40.0);
    }

    #[test]
    fn uniform_refinement_quadruples() {
        let spec = rect_spec();
        let mesh = build_mesh(&spec, 0.25, 0.5, 3).unwrap();
        let fine = mesh.refine_uniform();
        assert_eq!(fine.triangles.len(), 4 * mesh.triangles.len());
        assert_eq!(fine.boundary.len(), 2 * mesh.boundary.len());
        assert!(fine.quality().min_angle_deg >= mesh.quality().min_angle_deg - 1e-9);
    }
}

//! Parametric low-poly head glyphs.
//!
//! Every part (head, eyes, nose, mouth, hair) is its own closed surface, so
//! the whole mesh stays watertight at every level of detail. The head faces
//! `+z` with `+y` up; the final mesh is stretched vertically by the face
//! elongation factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::AvatarParams;
use crate::assignment::VisualFeature as F;

/// Vertical stretch applied at `Face_Elong = 0` and `Face_Elong = 1`.
pub const ELONGATION_RANGE: (f64, f64) = (0.8, 1.25);

const HEAD_RADII: [f64; 3] = [0.5, 0.6, 0.5];
const EYE_Y: f64 = 0.12;
const EYE_RADIUS: f64 = 0.07;
const EYE_SPACING: (f64, f64) = (0.10, 0.24);
const NOSE_Y: f64 = -0.06;
const NOSE_RADIUS: f64 = 0.06;
const NOSE_LENGTH: (f64, f64) = (0.08, 0.30);
const MOUTH_Y: f64 = -0.30;
const MOUTH_HALF_WIDTH: (f64, f64) = (0.06, 0.18);
const MOUTH_BEND: f64 = 0.08;
const HAIR_TOP: f64 = 0.66;
/// Lowest point of the hair for `Hair_L = 0` and `Hair_L = 1`; always above the chin.
const HAIR_BOTTOM: (f64, f64) = (0.25, -0.45);

const SKIN_RAMP: &[[f64; 3]] = &[[0.98, 0.87, 0.77], [0.85, 0.64, 0.48], [0.45, 0.29, 0.19]];
const HAIR_RAMP: &[[f64; 3]] = &[
    [0.95, 0.85, 0.45],
    [0.80, 0.30, 0.10],
    [0.35, 0.55, 0.20],
    [0.20, 0.35, 0.75],
    [0.10, 0.08, 0.08],
];
const IRIS_RAMP: &[[f64; 3]] = &[[0.25, 0.45, 0.85], [0.30, 0.60, 0.35], [0.40, 0.25, 0.10]];
const EYE_WHITE: [f64; 3] = [0.96, 0.96, 0.96];
const MOUTH_COLOR: [f64; 3] = [0.62, 0.15, 0.18];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lod {
    Low,
    Medium,
    High,
}

impl Lod {
    pub const ALL: [Lod; 3] = [Lod::Low, Lod::Medium, Lod::High];

    fn resolution(self) -> Resolution {
        match self {
            Lod::Low => Resolution {
                head: (8, 12),
                eye: (5, 8),
                nose: 8,
                mouth: (4, 10),
                hair: (6, 12),
            },
            Lod::Medium => Resolution {
                head: (14, 24),
                eye: (8, 12),
                nose: 16,
                mouth: (6, 16),
                hair: (10, 24),
            },
            Lod::High => Resolution {
                head: (24, 40),
                eye: (12, 18),
                nose: 24,
                mouth: (8, 24),
                hair: (16, 40),
            },
        }
    }
}

impl std::str::FromStr for Lod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(Lod::Low),
            "medium" => Ok(Lod::Medium),
            "high" => Ok(Lod::High),
            other => Err(format!("unknown level of detail {other:?}")),
        }
    }
}

struct Resolution {
    head: (usize, usize),
    eye: (usize, usize),
    nose: usize,
    mouth: (usize, usize),
    hair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshPart {
    pub name: String,
    pub first_vertex: usize,
    pub vertex_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlyphMesh {
    pub vertices: Vec<[f32; 3]>,
    pub triangles: Vec<[u32; 3]>,
    pub colors: Vec<[f32; 3]>,
    pub lod: Lod,
    pub parts: Vec<MeshPart>,
}

impl GlyphMesh {
    pub fn part(&self, name: &str) -> Option<&[[f32; 3]]> {
        self.parts
            .iter()
            .find(|p| p.name == name)
            .map(|p| &self.vertices[p.first_vertex..p.first_vertex + p.vertex_count])
    }

    /// `(min, max)` corners of the axis-aligned bounding box.
    pub fn bounds(&self) -> ([f32; 3], [f32; 3]) {
        let mut lo = [f32::INFINITY; 3];
        let mut hi = [f32::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}

fn lerp(range: (f64, f64), t: f64) -> f64 {
    range.0 + (range.1 - range.0) * t
}

fn ramp(stops: &[[f64; 3]], t: f64) -> [f64; 3] {
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t.floor() as usize).min(stops.len() - 2);
    let f = t - i as f64;
    let (a, b) = (stops[i], stops[i + 1]);
    [0, 1, 2].map(|k| a[k] * (1.0 - f) + b[k] * f)
}

/// Unit sphere with poles on ±y: `2 + (stacks − 1) · slices` vertices.
fn uv_sphere(stacks: usize, slices: usize) -> (Vec<[f64; 3]>, Vec<[u32; 3]>) {
    let mut verts = vec![[0.0, 1.0, 0.0]];
    for i in 1..stacks {
        let phi = PI * i as f64 / stacks as f64;
        for j in 0..slices {
            let theta = 2.0 * PI * j as f64 / slices as f64;
            verts.push([phi.sin() * theta.sin(), phi.cos(), phi.sin() * theta.cos()]);
        }
    }
    verts.push([0.0, -1.0, 0.0]);
    let bottom = (verts.len() - 1) as u32;
    let ring = |i: usize, j: usize| (1 + (i - 1) * slices + j % slices) as u32;

    let mut tris = Vec::new();
    for j in 0..slices {
        tris.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            let (a, b) = (ring(i, j), ring(i, j + 1));
            let (c, d) = (ring(i + 1, j), ring(i + 1, j + 1));
            tris.push([a, c, d]);
            tris.push([a, d, b]);
        }
    }
    for j in 0..slices {
        tris.push([bottom, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    (verts, tris)
}

/// Closed cone along `+z`: apex, base ring, base center.
fn cone(slices: usize) -> (Vec<[f64; 3]>, Vec<[u32; 3]>) {
    let mut verts = vec![[0.0, 0.0, 1.0]];
    for j in 0..slices {
        let theta = 2.0 * PI * j as f64 / slices as f64;
        verts.push([theta.cos(), theta.sin(), 0.0]);
    }
    verts.push([0.0, 0.0, 0.0]);
    let center = (slices + 1) as u32;
    let ring = |j: usize| (1 + j % slices) as u32;
    let mut tris = Vec::new();
    for j in 0..slices {
        tris.push([0, ring(j), ring(j + 1)]);
        tris.push([center, ring(j + 1), ring(j)]);
    }
    (verts, tris)
}

/// Depth of the head's front surface at `(x, y)`.
fn face_z(x: f64, y: f64) -> f64 {
    let [rx, ry, rz] = HEAD_RADII;
    rz * (1.0 - (x / rx).powi(2) - (y / ry).powi(2)).max(0.0).sqrt()
}

struct Builder {
    vertices: Vec<[f64; 3]>,
    colors: Vec<[f64; 3]>,
    triangles: Vec<[u32; 3]>,
    parts: Vec<MeshPart>,
}

impl Builder {
    fn add(
        &mut self,
        name: &str,
        (verts, tris): (Vec<[f64; 3]>, Vec<[u32; 3]>),
        place: impl Fn([f64; 3]) -> [f64; 3],
        color: impl Fn([f64; 3]) -> [f64; 3],
    ) {
        let base = self.vertices.len() as u32;
        self.parts.push(MeshPart {
            name: name.to_string(),
            first_vertex: self.vertices.len(),
            vertex_count: verts.len(),
        });
        for v in verts {
            self.vertices.push(place(v));
            self.colors.push(color(v));
        }
        self.triangles
            .extend(tris.into_iter().map(|t| t.map(|i| i + base)));
    }
}

pub fn generate_glyph_mesh(params: &AvatarParams, lod: Lod) -> GlyphMesh {
    let res = lod.resolution();
    let p = |f: F| params.get(f);
    let skin = ramp(SKIN_RAMP, p(F::SkinColor));
    let hair = ramp(HAIR_RAMP, p(F::HairColor));
    let iris = ramp(IRIS_RAMP, p(F::IrisColor));
    let elong = lerp(ELONGATION_RANGE, p(F::FaceElongation));

    let mut b = Builder {
        vertices: Vec::new(),
        colors: Vec::new(),
        triangles: Vec::new(),
        parts: Vec::new(),
    };

    let [rx, ry, rz] = HEAD_RADII;
    b.add(
        "head",
        uv_sphere(res.head.0, res.head.1),
        |[x, y, z]| [x * rx, y * ry, z * rz],
        |_| skin,
    );

    let hair_bottom = lerp(HAIR_BOTTOM, p(F::HairLength));
    let hair_ry = (HAIR_TOP - hair_bottom) / 2.0;
    let hair_cy = HAIR_TOP - hair_ry;
    b.add(
        "hair",
        uv_sphere(res.hair.0, res.hair.1),
        |[x, y, z]| [x * (rx + 0.04), hair_cy + y * hair_ry, z * (rz - 0.02) - 0.10],
        |_| hair,
    );

    let half_gap = lerp(EYE_SPACING, p(F::EyeSpacing));
    for (name, side) in [("left_eye", -1.0), ("right_eye", 1.0)] {
        let cx = side * half_gap;
        let cz = face_z(cx, EYE_Y) - 0.3 * EYE_RADIUS;
        b.add(
            name,
            uv_sphere(res.eye.0, res.eye.1),
            |[x, y, z]| [cx + x * EYE_RADIUS, EYE_Y + y * EYE_RADIUS, cz + z * EYE_RADIUS],
            |[_, _, z]| if z > 0.6 { iris } else { EYE_WHITE },
        );
    }

    let nose_len = lerp(NOSE_LENGTH, p(F::NoseLength));
    let nose_z = face_z(0.0, NOSE_Y) - 0.03;
    b.add(
        "nose",
        cone(res.nose),
        |[x, y, z]| [x * NOSE_RADIUS, NOSE_Y + y * NOSE_RADIUS, nose_z + z * (nose_len + 0.03)],
        |_| skin,
    );

    let half_width = lerp(MOUTH_HALF_WIDTH, p(F::MouthWidth));
    // Positive curvature lifts the corners: a smile.
    let bend = MOUTH_BEND * (p(F::Smile) - p(F::Frown));
    b.add(
        "mouth",
        uv_sphere(res.mouth.0, res.mouth.1),
        // The sphere's pole axis (y) runs along the mouth.
        |[u, v, w]| {
            let x = half_width * v;
            let y = MOUTH_Y + 0.025 * u + bend * v * v;
            [x, y, face_z(x, MOUTH_Y) - 0.01 + 0.03 * w]
        },
        |_| MOUTH_COLOR,
    );

    GlyphMesh {
        vertices: b
            .vertices
            .iter()
            .map(|&[x, y, z]| [x as f32, (y * elong) as f32, z as f32])
            .collect(),
        colors: b.colors.iter().map(|c| c.map(|v| v as f32)).collect(),
        triangles: b.triangles,
        lod,
        parts: b.parts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn edge_counts(mesh: &GlyphMesh) -> HashMap<(u32, u32), i32> {
        let mut directed = HashMap::new();
        for t in &mesh.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        directed
    }

    #[test]
    fn parts_are_closed_and_consistently_oriented() {
        let mesh = generate_glyph_mesh(&AvatarParams::neutral(), Lod::Low);
        let directed = edge_counts(&mesh);
        for (&(a, b), &n) in &directed {
            assert_eq!(n, 1, "directed edge {a}->{b} used {n} times");
            assert_eq!(directed.get(&(b, a)), Some(&1), "edge {a}-{b} is a boundary");
        }
    }

    #[test]
    fn low_lod_vertex_budget() {
        let mesh = generate_glyph_mesh(&AvatarParams::neutral(), Lod::Low);
        assert!(mesh.vertices.len() <= 500, "{}", mesh.vertices.len());
        let high = generate_glyph_mesh(&AvatarParams::neutral(), Lod::High);
        assert!(high.vertices.len() > mesh.vertices.len());
    }

    #[test]
    fn smile_turns_corners_up() {
        let params = AvatarParams::neutral().with(F::Smile, 1.0).with(F::Frown, 0.0);
        let mesh = generate_glyph_mesh(&params, Lod::Medium);
        let mouth = mesh.part("mouth").unwrap();
        let (mid, ends): (Vec<&[f32; 3]>, Vec<&[f32; 3]>) = mouth.iter().partition(|v| v[0].abs() < 1e-6);
        let max_x = mouth.iter().map(|v| v[0].abs()).fold(0.0, f32::max);
        let corner_y = ends
            .iter()
            .filter(|v| (v[0].abs() - max_x).abs() < 1e-6)
            .map(|v| v[1])
            .fold(f32::NEG_INFINITY, f32::max);
        let mid_y = mid.iter().map(|v| v[1]).sum::<f32>() / mid.len() as f32;
        assert!(mid_y < corner_y, "midpoint {mid_y} vs corners {corner_y}");

        let frown = AvatarParams::neutral().with(F::Smile, 0.0).with(F::Frown, 1.0);
        let mesh = generate_glyph_mesh(&frown, Lod::Medium);
        let mouth = mesh.part("mouth").unwrap();
        let top = mouth.iter().map(|v| v[1]).fold(f32::NEG_INFINITY, f32::max);
        let corner = mouth
            .iter()
            .filter(|v| (v[0].abs() - max_x).abs() < 1e-6)
            .map(|v| v[1])
            .fold(f32::NEG_INFINITY, f32::max);
        assert!(corner < top);
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(HAIR_RAMP, 0.0), HAIR_RAMP[0]);
        assert_eq!(ramp(HAIR_RAMP, 1.0), HAIR_RAMP[4]);
    }
}

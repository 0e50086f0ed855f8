//! Static glTF 2.0 export of a frame: one node per visible avatar.

use std::collections::BTreeMap;
use std::path::Path;

use base64::Engine;
use serde_json::{json, Value};

use super::mesh::{generate_glyph_mesh, GlyphMesh, Lod};
use super::{AvatarParams, CameraConfig, SceneError, SceneFrame};
use crate::M;

const ARRAY_BUFFER: u32 = 34962;
const ELEMENT_ARRAY_BUFFER: u32 = 34963;
const FLOAT: u32 = 5126;
const UNSIGNED_INT: u32 = 5125;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GltfOptions {
    pub lod: Lod,
    /// Head size at perspective scale 1, in scene units.
    pub glyph_scale: f64,
    /// Camera used for the frame; glyphs are magnified by the same
    /// `d / (d − t)` factor as their positions.
    pub camera: CameraConfig,
}

impl Default for GltfOptions {
    fn default() -> Self {
        Self {
            lod: Lod::Low,
            glyph_scale: 0.15,
            camera: CameraConfig::default(),
        }
    }
}

/// Meshes are shared between avatars whose parameters agree to 8 bits.
fn quantize(p: &AvatarParams) -> [u8; M] {
    p.values().map(|v| (v * 255.0).round() as u8)
}

#[derive(Default)]
struct BufferBuilder {
    bytes: Vec<u8>,
    views: Vec<Value>,
    accessors: Vec<Value>,
}

impl BufferBuilder {
    fn push_view(&mut self, data: &[u8], target: u32) -> usize {
        debug_assert_eq!(self.bytes.len() % 4, 0);
        self.views.push(json!({
            "buffer": 0,
            "byteOffset": self.bytes.len(),
            "byteLength": data.len(),
            "target": target,
        }));
        self.bytes.extend_from_slice(data);
        self.views.len() - 1
    }

    fn vec3(&mut self, data: &[[f32; 3]], with_bounds: bool) -> usize {
        let raw: Vec<u8> = data.iter().flatten().flat_map(|v| v.to_le_bytes()).collect();
        let view = self.push_view(&raw, ARRAY_BUFFER);
        let mut acc = json!({
            "bufferView": view,
            "componentType": FLOAT,
            "count": data.len(),
            "type": "VEC3",
        });
        if with_bounds {
            let mut lo = [f32::INFINITY; 3];
            let mut hi = [f32::NEG_INFINITY; 3];
            for v in data {
                for k in 0..3 {
                    lo[k] = lo[k].min(v[k]);
                    hi[k] = hi[k].max(v[k]);
                }
            }
            acc["min"] = json!(lo);
            acc["max"] = json!(hi);
        }
        self.accessors.push(acc);
        self.accessors.len() - 1
    }

    fn indices(&mut self, tris: &[[u32; 3]]) -> usize {
        let raw: Vec<u8> = tris.iter().flatten().flat_map(|i| i.to_le_bytes()).collect();
        let view = self.push_view(&raw, ELEMENT_ARRAY_BUFFER);
        self.accessors.push(json!({
            "bufferView": view,
            "componentType": UNSIGNED_INT,
            "count": tris.len() * 3,
            "type": "SCALAR",
        }));
        self.accessors.len() - 1
    }

    fn mesh(&mut self, mesh: &GlyphMesh) -> Value {
        let position = self.vec3(&mesh.vertices, true);
        let color = self.vec3(&mesh.colors, false);
        let indices = self.indices(&mesh.triangles);
        json!({
            "primitives": [{
                "attributes": {"POSITION": position, "COLOR_0": color},
                "indices": indices,
                "material": 0,
                "mode": 4,
            }]
        })
    }
}

/// Builds a self-contained `.gltf` document (buffer embedded as a data URI).
pub fn export_gltf(frame: &SceneFrame, options: &GltfOptions) -> Value {
    let mut buffers = BufferBuilder::default();
    let mut meshes = Vec::new();
    let mut by_key: BTreeMap<[u8; M], usize> = BTreeMap::new();
    let mut nodes = Vec::with_capacity(frame.points.len());

    for p in &frame.points {
        let key = quantize(&p.params);
        let mesh_idx = *by_key.entry(key).or_insert_with(|| {
            let params = AvatarParams(key.map(|q| q as f64 / 255.0));
            meshes.push(buffers.mesh(&generate_glyph_mesh(&params, options.lod)));
            meshes.len() - 1
        });
        let magnify = options.camera.scale(p.depth).unwrap_or(1.0);
        let s = (options.glyph_scale * magnify) as f32;
        let name = p.label.clone().unwrap_or_else(|| format!("point {}", p.index));
        nodes.push(json!({
            "name": name,
            "mesh": mesh_idx,
            "translation": p.position.map(|v| v as f32),
            "scale": [s, s, s],
            "extras": {"index": p.index, "depth": p.depth},
        }));
    }

    let mut doc = json!({
        "asset": {"version": "2.0", "generator": concat!("ndswarm ", env!("CARGO_PKG_VERSION"))},
    });
    // An empty node list is not allowed in a scene, so an empty frame is
    // exported as an asset with no scene at all.
    if !nodes.is_empty() {
        doc["scene"] = json!(0);
        doc["scenes"] = json!([{
            "name": format!("frame {}", frame.seq),
            "nodes": (0..nodes.len()).collect::<Vec<_>>(),
        }]);
        doc["nodes"] = Value::Array(nodes);
        doc["meshes"] = Value::Array(meshes);
        doc["materials"] = json!([{
            "name": "avatar",
            "pbrMetallicRoughness": {"baseColorFactor": [1.0, 1.0, 1.0, 1.0], "metallicFactor": 0.0, "roughnessFactor": 0.8},
        }]);
        doc["accessors"] = Value::Array(buffers.accessors);
        doc["bufferViews"] = Value::Array(buffers.views);
        let uri = format!(
            "data:application/octet-stream;base64,{}",
            base64::engine::general_purpose::STANDARD.encode(&buffers.bytes)
        );
        doc["buffers"] = json!([{"byteLength": buffers.bytes.len(), "uri": uri}]);
    }
    doc
}

pub fn write_gltf(
    frame: &SceneFrame,
    options: &GltfOptions,
    path: impl AsRef<Path>,
) -> Result<(), SceneError> {
    let path = path.as_ref();
    let doc = export_gltf(frame, options);
    let text = serde_json::to_string_pretty(&doc)?;
    std::fs::write(path, text).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })
}

//! JSON complex format: `{"n_vertices": int, "cubes": [[int, ...], ...]}`.

use serde::{Deserialize, Serialize};

use super::{ComplexError, CubeComplex, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub n_vertices: usize,
    pub cubes: Vec<Vec<VertexId>>,
}

/// What face completion did while loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub cubes_given: usize,
    pub cubes_total: usize,
    pub faces_added: usize,
    /// Cubes of dimension >= 2 whose faces were read off listed edges rather
    /// than list order.
    pub cubes_oriented_by_edges: usize,
}

impl ComplexFile {
    pub fn into_complex(self) -> Result<(CubeComplex, LoadReport), ComplexError> {
        CubeComplex::from_cubes(self.n_vertices, self.cubes)
    }
}

impl CubeComplex {
    /// Every cube, faces included, in the JSON file layout.
    pub fn to_file(&self) -> ComplexFile {
        ComplexFile {
            n_vertices: self.n_vertices,
            cubes: self.cubes.iter().map(|c| c.vertices().to_vec()).collect(),
        }
    }

    /// Only the cubes that are not proper faces of another cube.
    pub fn to_file_maximal(&self) -> ComplexFile {
        let mut cubes = Vec::new();
        for (id, c) in self.cubes.iter().enumerate() {
            let v0 = c.vertices()[0];
            let is_face = self.cubes_containing(v0).iter().any(|&other| {
                other != id
                    && self.cubes[other].dim() > c.dim()
                    && c.vertices().iter().all(|&v| self.cubes[other].contains(v))
            });
            if !is_face {
                cubes.push(self.maximal_cube_listing(c));
            }
        }
        ComplexFile {
            n_vertices: self.n_vertices,
            cubes,
        }
    }

    /// Lists a cube in binary-coordinate order so it reloads to the same faces
    /// without its edges.
    fn maximal_cube_listing(&self, c: &super::Cube) -> Vec<VertexId> {
        if c.dim() < 2 {
            return c.vertices().to_vec();
        }
        match super::hypercube_coordinates(c.vertices(), |u, v| self.is_edge(u, v)) {
            Some(coords) => {
                let mut listing = vec![0; coords.len()];
                for (v, code) in coords {
                    listing[code] = v;
                }
                listing
            }
            None => c.vertices().to_vec(),
        }
    }
}

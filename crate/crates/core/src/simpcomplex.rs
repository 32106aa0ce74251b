//! Finite ordered simplicial complexes, used as nerves of good covers.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("malformed facet {0}")]
    MalformedFacet(String),
    #[error("dimension {k} out of range for a complex of dimension {dim}")]
    DimensionOutOfRange { k: usize, dim: usize },
    #[error("unknown space '{0}'")]
    UnknownSpace(String),
    #[error("cannot read facet data: {0}")]
    Io(String),
    #[error("invalid simplicial map: {0}")]
    InvalidMap(String),
}

/// Finite simplicial complex on vertices `0..vertex_count`.
///
/// Simplices of each dimension are strictly increasing vertex tuples in
/// lexicographic order; a simplex is identified by `(dimension, index)`.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    name: String,
    vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    // faces[k][s][i] = index of the face of simplex s in dimension k omitting vertex i
    faces: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.vertex_count == other.vertex_count && self.simplices == other.simplices
    }
}

impl Eq for SimplicialComplex {}

#[derive(Serialize, Deserialize)]
struct FacetFile {
    name: String,
    facets: Vec<Vec<i64>>,
}

impl SimplicialComplex {
    /// Face closure of the given facets. Vertex labels are re-indexed densely
    /// in increasing order.
    pub fn from_facets(name: &str, facets: &[Vec<i64>]) -> Result<Self, SpaceError> {
        let mut labels = BTreeSet::new();
        for f in facets {
            if f.is_empty() {
                return Err(SpaceError::MalformedFacet("[] (empty)".into()));
            }
            let set: BTreeSet<i64> = f.iter().copied().collect();
            if set.len() != f.len() {
                return Err(SpaceError::MalformedFacet(format!("{f:?} repeats a vertex")));
            }
            labels.extend(set);
        }
        let relabel: HashMap<i64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        for f in facets {
            let mut verts: Vec<usize> = f.iter().map(|l| relabel[l]).collect();
            verts.sort_unstable();
            let n = verts.len();
            if by_dim.len() < n {
                by_dim.resize(n, BTreeSet::new());
            }
            if by_dim[n - 1].contains(&verts) {
                continue;
            }
            for mask in 1u64..(1u64 << n) {
                let face: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
                by_dim[face.len() - 1].insert(face);
            }
        }
        Ok(Self::from_sets(name, labels.len(), by_dim))
    }

    fn from_sets(name: &str, vertex_count: usize, by_dim: Vec<BTreeSet<Vec<usize>>>) -> Self {
        let simplices: Vec<Vec<Vec<usize>>> = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let index: Vec<HashMap<Vec<usize>, usize>> = simplices
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut faces = vec![Vec::new()];
        for k in 1..simplices.len() {
            let fk = simplices[k]
                .iter()
                .map(|s| {
                    (0..=k)
                        .map(|i| {
                            let mut f = s.clone();
                            f.remove(i);
                            index[k - 1][&f]
                        })
                        .collect()
                })
                .collect();
            faces.push(fk);
        }
        SimplicialComplex { name: name.to_string(), vertex_count, simplices, index, faces }
    }

    pub fn point() -> Self {
        Self::from_facets("point", &[vec![0]]).expect("point")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Dimension; the empty complex is never constructed.
    pub fn dim(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, |s| s.len())
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.get(k).map_or(&[], |s| s.as_slice())
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices[k][i]
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        if s.is_empty() {
            return None;
        }
        self.index.get(s.len() - 1)?.get(s).copied()
    }

    /// Indices of the codimension-one faces of simplex `i` in dimension `k`;
    /// entry `j` omits vertex `j`.
    pub fn faces(&self, k: usize, i: usize) -> &[usize] {
        &self.faces[k][i]
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(|s| s.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    pub fn total_simplices(&self) -> usize {
        self.simplices.iter().map(|s| s.len()).sum()
    }

    /// Simplicial boundary `C_k -> C_{k-1}`: rows are (k-1)-simplices,
    /// columns k-simplices.
    pub fn boundary_matrix(&self, k: usize) -> Result<IntMatrix, SpaceError> {
        if k == 0 || k > self.dim() {
            return Err(SpaceError::DimensionOutOfRange { k, dim: self.dim() });
        }
        let mut m = IntMatrix::zeros(self.count(k - 1), self.count(k));
        for (j, faces) in self.faces[k].iter().enumerate() {
            for (i, &f) in faces.iter().enumerate() {
                m.set(f, j, BigInt::from(if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        Ok(m)
    }

    /// The chain complex of boundary matrices `∂_1, ..., ∂_dim`.
    pub fn chain_complex(&self) -> ChainComplexData {
        let boundaries = (1..=self.dim()).map(|k| self.boundary_matrix(k).expect("in range")).collect();
        ChainComplexData { boundaries }
    }

    pub fn is_face_closed(&self) -> bool {
        self.simplices.iter().enumerate().skip(1).all(|(k, list)| {
            list.iter().all(|s| {
                (0..=k).all(|i| {
                    let mut f = s.clone();
                    f.remove(i);
                    self.index[k - 1].contains_key(&f)
                })
            })
        })
    }

    pub fn facets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for k in 0..self.simplices.len() {
            for s in &self.simplices[k] {
                let is_face = self.simplices.get(k + 1).map_or(false, |up| {
                    up.iter().any(|t| s.iter().all(|v| t.binary_search(v).is_ok()))
                });
                if !is_face {
                    out.push(s.clone());
                }
            }
        }
        out
    }
}

/// Boundary matrices of a complex with fixed simplex orderings.
#[derive(Clone, Debug)]
pub struct ChainComplexData {
    /// `boundaries[k-1]` is `∂_k`.
    pub boundaries: Vec<IntMatrix>,
}

impl ChainComplexData {
    pub fn is_complex(&self) -> bool {
        self.boundaries.windows(2).all(|w| w[0].mul(&w[1]).is_zero())
    }
}

/// Vertex map between complexes sending simplices to simplices.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub source: Arc<SimplicialComplex>,
    pub target: Arc<SimplicialComplex>,
    pub vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        vertex_map: Vec<usize>,
    ) -> Result<Self, SpaceError> {
        if vertex_map.len() != source.vertex_count() {
            return Err(SpaceError::InvalidMap("vertex map has the wrong length".into()));
        }
        for k in 0..=source.dim() {
            for s in source.simplices(k) {
                let img = Self::image_of(&vertex_map, s);
                if target.index_of(&img).is_none() {
                    return Err(SpaceError::InvalidMap(format!("image of {s:?} is not a simplex")));
                }
            }
        }
        Ok(SimplicialMap { source, target, vertex_map })
    }

    fn image_of(vm: &[usize], s: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = s.iter().map(|&v| vm[v]).collect();
        set.into_iter().collect()
    }

    /// Image of a source simplex with its vertices in source order, or `None`
    /// if the map collapses it.
    pub fn image_nondegenerate(&self, s: &[usize]) -> Option<Vec<usize>> {
        let img: Vec<usize> = s.iter().map(|&v| self.vertex_map[v]).collect();
        let set: BTreeSet<usize> = img.iter().copied().collect();
        if set.len() == img.len() {
            Some(img)
        } else {
            None
        }
    }
}

/// Staircase triangulation of `|x| × |y|` on the vertex set `x × y`
/// (lexicographic pairs). A point factor returns the other factor unchanged.
pub fn product(x: &SimplicialComplex, y: &SimplicialComplex) -> SimplicialComplex {
    if x.vertex_count() == 1 {
        return y.clone();
    }
    if y.vertex_count() == 1 {
        return x.clone();
    }
    let ny = y.vertex_count();
    let mut facets: Vec<Vec<i64>> = Vec::new();
    let xf = x.facets();
    let yf = y.facets();
    for a in &xf {
        for b in &yf {
            staircase(a, b, ny, &mut facets);
        }
    }
    let name = format!("{}x{}", x.name(), y.name());
    SimplicialComplex::from_facets(&name, &facets).expect("product facets are well formed")
}

fn staircase(a: &[usize], b: &[usize], ny: usize, out: &mut Vec<Vec<i64>>) {
    let (p, q) = (a.len() - 1, b.len() - 1);
    // each path is a choice of which of the p+q steps move in the first factor
    let steps = p + q;
    for mask in 0u64..(1u64 << steps) {
        if mask.count_ones() as usize != p {
            continue;
        }
        let (mut i, mut j) = (0, 0);
        let mut verts = vec![(a[0] * ny + b[0]) as i64];
        for s in 0..steps {
            if mask >> s & 1 == 1 {
                i += 1;
            } else {
                j += 1;
            }
            verts.push((a[i] * ny + b[j]) as i64);
        }
        out.push(verts);
    }
}

/// Boundary of the (n+1)-simplex.
pub fn sphere(n: usize) -> SimplicialComplex {
    let facets: Vec<Vec<i64>> = (0..=n + 1)
        .map(|omit| (0..=n as i64 + 1).filter(|&v| v != omit as i64).collect())
        .collect();
    let name = if n == 1 { "circle".to_string() } else { format!("sphere({n})") };
    SimplicialComplex::from_facets(&name, &facets).expect("sphere facets")
}

pub fn torus2() -> SimplicialComplex {
    let mut facets = Vec::new();
    for i in 0..7i64 {
        facets.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        facets.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    SimplicialComplex::from_facets("torus2", &facets).expect("torus facets")
}

pub fn rp2() -> SimplicialComplex {
    let facets: Vec<Vec<i64>> = [
        [1, 2, 4],
        [1, 2, 6],
        [1, 3, 5],
        [1, 3, 6],
        [1, 4, 5],
        [2, 3, 4],
        [2, 3, 5],
        [2, 5, 6],
        [3, 4, 6],
        [4, 5, 6],
    ]
    .iter()
    .map(|f| f.to_vec())
    .collect();
    SimplicialComplex::from_facets("rp2", &facets).expect("rp2 facets")
}

const SHIPPED: &[(&str, &str)] = &[
    ("rp3.json", include_str!("../data/rp3.json")),
    ("moore_2_1.json", include_str!("../data/moore_2_1.json")),
    ("moore_3_1.json", include_str!("../data/moore_3_1.json")),
    ("moore_4_1.json", include_str!("../data/moore_4_1.json")),
    ("moore_2_2.json", include_str!("../data/moore_2_2.json")),
    ("moore_3_2.json", include_str!("../data/moore_3_2.json")),
];

/// Environment variable naming a directory that replaces the shipped facet data.
pub const DATA_DIR_ENV: &str = "SSEQ_DATA_DIR";

/// Identifiers of every shipped space.
pub fn shipped_space_ids() -> Vec<String> {
    let mut ids: Vec<String> = vec!["point".into(), "circle".into()];
    for n in 2..=6 {
        ids.push(format!("sphere({n})"));
    }
    ids.extend(["torus2", "rp2", "rp3"].map(String::from));
    for (m, k) in [(2, 1), (3, 1), (4, 1), (2, 2), (3, 2)] {
        ids.push(format!("moore({m},{k})"));
    }
    ids
}

pub fn builtin_space(id: &str) -> Result<SimplicialComplex, SpaceError> {
    let compact: String = id.chars().filter(|c| !c.is_whitespace()).collect();
    match compact.as_str() {
        "point" => return Ok(SimplicialComplex::point()),
        "circle" | "sphere(1)" => return Ok(sphere(1)),
        "torus2" => return Ok(torus2()),
        "rp2" => return Ok(rp2()),
        "rp3" => return load_shipped("rp3.json", id),
        _ => {}
    }
    if let Some(arg) = compact.strip_prefix("sphere(").and_then(|s| s.strip_suffix(')')) {
        let n: usize = arg.parse().map_err(|_| SpaceError::UnknownSpace(id.into()))?;
        if (1..=6).contains(&n) {
            return Ok(sphere(n));
        }
    }
    if let Some(args) = compact.strip_prefix("moore(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').collect();
        if parts.len() == 2 {
            if let (Ok(m), Ok(k)) = (parts[0].parse::<u32>(), parts[1].parse::<u32>()) {
                return load_shipped(&format!("moore_{m}_{k}.json"), id);
            }
        }
    }
    Err(SpaceError::UnknownSpace(id.into()))
}

fn load_shipped(file: &str, id: &str) -> Result<SimplicialComplex, SpaceError> {
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        let path = PathBuf::from(dir).join(file);
        if !path.exists() {
            return Err(SpaceError::UnknownSpace(format!("{id} (no {} )", path.display())));
        }
        return load_facet_file(&path);
    }
    let text = SHIPPED
        .iter()
        .find(|(f, _)| *f == file)
        .map(|(_, t)| *t)
        .ok_or_else(|| SpaceError::UnknownSpace(id.into()))?;
    parse_facet_json(text)
}

pub fn parse_facet_json(text: &str) -> Result<SimplicialComplex, SpaceError> {
    let f: FacetFile = serde_json::from_str(text).map_err(|e| SpaceError::Io(e.to_string()))?;
    if f.facets.is_empty() {
        return Err(SpaceError::MalformedFacet("no facets".into()));
    }
    SimplicialComplex::from_facets(&f.name, &f.facets)
}

pub fn load_facet_file(path: &Path) -> Result<SimplicialComplex, SpaceError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpaceError::Io(format!("{}: {e}", path.display())))?;
    parse_facet_json(&text)
}

/// Builtin id or path to a facet file.
pub fn resolve_space(spec: &str) -> Result<SimplicialComplex, SpaceError> {
    match builtin_space(spec) {
        Ok(x) => Ok(x),
        Err(e) => {
            let p = Path::new(spec);
            if spec.ends_with(".json") || p.exists() {
                load_facet_file(p)
            } else {
                Err(e)
            }
        }
    }
}

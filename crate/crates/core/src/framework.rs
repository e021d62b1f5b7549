//! Graphs, configurations and frameworks, with the JSON file format.

use std::collections::BTreeSet;
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::MatrixR;
use crate::scalar::{format_scalar, parse_scalar, squared_norm, sub, Scalar};

/// An edge `{i, j}` with `1 <= i < j <= n`.
pub type Edge = (usize, usize);

/// Simple graph on vertices `1..=n` with edges kept in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph, canonicalizing edge orientation and order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Schema(format!("loop edge [{a}, {b}]")));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::Schema(format!("edge [{a}, {b}] out of range 1..={n}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Schema(format!("duplicate edge [{a}, {b}]")));
            }
        }
        Ok(Graph { n, edges: seen.into_iter().collect() })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    /// Cycle `1-2-…-n-1`.
    pub fn cycle(n: usize) -> Self {
        let edges = (1..n).map(|i| (i, i + 1)).chain(std::iter::once((1, n)));
        Graph::new(n, edges).expect("cycle is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Position of `{a, b}` in canonical edge order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![1];
        seen[1] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen[1..].iter().all(|&s| s)
    }

    pub fn is_complete(&self) -> bool {
        self.m() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Same graph with `{a, b}` deleted.
    pub fn without_edge(&self, a: usize, b: usize) -> Option<Graph> {
        let idx = self.edge_index(a, b)?;
        let mut edges = self.edges.clone();
        edges.remove(idx);
        Some(Graph { n: self.n, edges })
    }
}

/// `n` points in ambient dimension `d`, stored point by point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    dim: usize,
    points: Vec<Vec<Scalar>>,
}

impl Configuration {
    pub fn new(dim: usize, points: Vec<Vec<Scalar>>) -> Result<Self> {
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(Error::Schema(format!(
                "point {} has {} coordinates, dimension is {dim}",
                i + 1,
                p.len()
            )));
        }
        Ok(Configuration { dim, points })
    }

    /// Points on the line.
    pub fn on_line(xs: impl IntoIterator<Item = Scalar>) -> Self {
        Configuration { dim: 1, points: xs.into_iter().map(|x| vec![x]).collect() }
    }

    pub fn from_i64(dim: usize, pts: &[&[i64]]) -> Result<Self> {
        Self::new(dim, pts.iter().map(|p| p.iter().map(|&v| crate::scalar::int(v)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<Scalar>] {
        &self.points
    }

    /// Point of vertex `v` (1-based).
    pub fn point(&self, v: usize) -> &[Scalar] {
        &self.points[v - 1]
    }

    pub fn squared_distance(&self, a: usize, b: usize) -> Scalar {
        squared_norm(&sub(self.point(a), self.point(b)))
    }

    /// The d×n configuration matrix P.
    pub fn matrix(&self) -> MatrixR {
        let mut m = MatrixR::zeros(self.dim, self.len());
        for (j, p) in self.points.iter().enumerate() {
            for (i, x) in p.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    /// The (d+1)×n augmented matrix P̂: P with a row of ones appended.
    pub fn augmented_matrix(&self) -> MatrixR {
        let mut m = MatrixR::zeros(self.dim + 1, self.len());
        for (j, p) in self.points.iter().enumerate() {
            for (i, x) in p.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
            m[(self.dim, j)] = crate::scalar::one();
        }
        m
    }

    /// Coordinates of the affine span: keeps a set of coordinate axes on
    /// which the projection is injective over the span.
    ///
    /// The result is a linear image of `self` under an invertible map of the
    /// affine span, so stresses, conics at infinity and super stability carry
    /// over unchanged.
    pub fn reduce_to_span(&self) -> Configuration {
        if self.points.is_empty() {
            return self.clone();
        }
        let diffs = self.difference_matrix();
        // pivot columns of the difference matrix are independent axes
        let axes = crate::linalg::rref(&diffs).pivots;
        Configuration {
            dim: axes.len(),
            points: self.points.iter().map(|p| axes.iter().map(|&a| p[a].clone()).collect()).collect(),
        }
    }

    /// Rows are `p_i - p_1`, one per point.
    fn difference_matrix(&self) -> MatrixR {
        let base = &self.points[0];
        MatrixR::from_rows(self.points.iter().map(|p| sub(p, base)).collect())
    }

    /// Order of vertices along the line (1-based labels, ascending by
    /// coordinate, ties by label). Only meaningful for `dim == 1`.
    pub fn line_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (1..=self.len()).collect();
        idx.sort_by(|&a, &b| self.point(a)[0].cmp(&self.point(b)[0]).then(a.cmp(&b)));
        idx
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.iter().map(crate::scalar::to_f64).collect()).collect()
    }
}

/// Rank of `[p_i - p_1]`; 0 for one point or coincident points.
pub fn affine_span_dim(config: &Configuration) -> usize {
    if config.is_empty() {
        return 0;
    }
    config.difference_matrix().rank()
}

/// A graph realized by a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Framework {
    graph: Graph,
    config: Configuration,
}

impl Framework {
    pub fn new(graph: Graph, config: Configuration) -> Result<Self> {
        if config.len() != graph.n() {
            return Err(Error::CountMismatch { expected: graph.n(), got: config.len() });
        }
        Ok(Framework { graph, config })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    pub fn with_config(&self, config: Configuration) -> Result<Framework> {
        Framework::new(self.graph.clone(), config)
    }

    pub fn reduce_to_span(&self) -> Framework {
        Framework { graph: self.graph.clone(), config: self.config.reduce_to_span() }
    }

    pub fn squared_edge_lengths(&self) -> Vec<Scalar> {
        self.graph.edges().iter().map(|&(a, b)| self.config.squared_distance(a, b)).collect()
    }

    pub fn affine_span_dim(&self) -> usize {
        affine_span_dim(&self.config)
    }

    pub fn validate(&self) -> ValidationReport {
        let span = self.affine_span_dim();
        let connected = self.graph.is_connected();
        let mut issues = Vec::new();
        if !connected {
            issues.push("disconnected".to_string());
        }
        if span < self.dim() {
            issues.push(format!("affine span {span} is below ambient dimension {}", self.dim()));
        }
        let zero_edges: Vec<String> = self
            .graph
            .edges()
            .iter()
            .filter(|&&(a, b)| self.config.squared_distance(a, b).is_zero())
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        if !zero_edges.is_empty() {
            issues.push(format!("zero-length edges: {}", zero_edges.join(", ")));
        }
        ValidationReport { n: self.n(), m: self.m(), dim: self.dim(), affine_span: span, connected, issues }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub m: usize,
    pub dim: usize,
    pub affine_span: usize,
    pub connected: bool,
    pub issues: Vec<String>,
}

/// Same squared length on every edge, compared exactly.
pub fn check_equivalent(f: &Framework, q: &Configuration) -> Result<bool> {
    if q.len() != f.n() {
        return Err(Error::CountMismatch { expected: f.n(), got: q.len() });
    }
    Ok(f.graph().edges().iter().all(|&(a, b)| f.config().squared_distance(a, b) == q.squared_distance(a, b)))
}

/// Same squared distance between every pair of vertices.
pub fn check_congruent(f: &Framework, q: &Configuration) -> Result<bool> {
    if q.len() != f.n() {
        return Err(Error::CountMismatch { expected: f.n(), got: q.len() });
    }
    let p = f.config();
    let n = f.n();
    Ok((1..=n).all(|a| (a + 1..=n).all(|b| p.squared_distance(a, b) == q.squared_distance(a, b))))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameworkFile {
    dimension: usize,
    coordinates: Vec<Vec<String>>,
    edges: Vec<[usize; 2]>,
}

/// Parses the framework JSON format.
pub fn parse_framework(text: &str) -> Result<Framework> {
    let file: FrameworkFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let points = file
        .coordinates
        .iter()
        .map(|p| p.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let config = Configuration::new(file.dimension, points)?;
    let graph = Graph::new(config.len(), file.edges.iter().map(|e| (e[0], e[1])))?;
    Framework::new(graph, config)
}

pub fn framework_to_json(f: &Framework) -> String {
    let file = FrameworkFile {
        dimension: f.dim(),
        coordinates: f.config().points().iter().map(|p| p.iter().map(format_scalar).collect()).collect(),
        edges: f.graph().edges().iter().map(|&(a, b)| [a, b]).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("framework serializes");
    s.push('\n');
    s
}

pub fn load_framework(path: impl AsRef<Path>) -> Result<Framework> {
    parse_framework(&std::fs::read_to_string(path)?)
}

pub fn save_framework(f: &Framework, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, framework_to_json(f))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn line(xs: &[i64]) -> Configuration {
        Configuration::on_line(xs.iter().map(|&x| int(x)))
    }

    #[test]
    fn parses_triangle_on_line() {
        let f = parse_framework(
            r#"{"dimension":1,"coordinates":[["0"],["1"],["3"]],"edges":[[1,2],[2,3],[1,3]]}"#,
        )
        .unwrap();
        assert_eq!(f.n(), 3);
        assert_eq!(f.graph().edges(), &[(1, 2), (1, 3), (2, 3)]);
        assert_eq!(f.config().point(3), &[int(3)]);
    }

    #[test]
    fn schema_errors() {
        let cases = [
            r#"{"dimension":1,"coordinates":[["0"],["1"]],"edges":[[1,1]]}"#,
            r#"{"dimension":1,"coordinates":[["0"],["1"]],"edges":[[1,2],[2,1]]}"#,
            r#"{"dimension":1,"coordinates":[["0"],["1"]],"edges":[[1,3]]}"#,
            r#"{"dimension":2,"coordinates":[["0","1"],["1"]],"edges":[[1,2]]}"#,
        ];
        for c in cases {
            assert!(matches!(parse_framework(c), Err(Error::Schema(_))), "{c}");
        }
    }

    #[test]
    fn parse_errors() {
        for c in [
            "not json",
            r#"{"dimension":1,"coordinates":[["x"]],"edges":[]}"#,
            r#"{"dimension":1,"coordinates":[["1"]],"edges":[],"extra":1}"#,
            r#"{"dimension":1,"coordinates":[[1]],"edges":[]}"#,
        ] {
            assert!(matches!(parse_framework(c), Err(Error::Parse(_))), "{c}");
        }
    }

    #[test]
    fn rational_coordinates_stay_exact() {
        let f = parse_framework(r#"{"dimension":1,"coordinates":[["1/3"],["0.1"]],"edges":[[1,2]]}"#)
            .unwrap();
        assert_eq!(f.config().point(1)[0], ratio(1, 3));
        assert_eq!(f.config().point(2)[0], ratio(1, 10));
    }

    #[test]
    fn span_dimensions() {
        assert_eq!(affine_span_dim(&line(&[0, 1, 3])), 1);
        assert_eq!(affine_span_dim(&Configuration::from_i64(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap()), 2);
        assert_eq!(affine_span_dim(&Configuration::from_i64(2, &[&[0, 0], &[2, 0], &[5, 0]]).unwrap()), 1);
        assert_eq!(affine_span_dim(&line(&[4])), 0);
        assert_eq!(affine_span_dim(&line(&[2, 2, 2])), 0);
    }

    #[test]
    fn reduce_to_span_keeps_an_injective_axis_set() {
        let c = Configuration::from_i64(3, &[&[1, 1, 1], &[1, 2, 3], &[1, 4, 7]]).unwrap();
        let r = c.reduce_to_span();
        assert_eq!(r.dim(), 1);
        assert_eq!(affine_span_dim(&r), 1);
    }

    #[test]
    fn translate_and_reflect_are_congruent() {
        let tri = Framework::new(Graph::complete(3), line(&[0, 1, 3])).unwrap();
        let moved = line(&[5, 6, 8]);
        assert!(check_equivalent(&tri, &moved).unwrap());
        assert!(check_congruent(&tri, &moved).unwrap());
        let c4 = Framework::new(Graph::cycle(4), line(&[0, 1, 3, 6])).unwrap();
        assert!(check_congruent(&c4, &line(&[0, -1, -3, -6])).unwrap());
        assert!(matches!(check_equivalent(&c4, &line(&[0, 1])), Err(Error::CountMismatch { .. })));
    }

    #[test]
    fn validate_flags_disconnected_and_low_span() {
        let g = Graph::new(4, [(1, 2), (3, 4)]).unwrap();
        let f = Framework::new(g, line(&[0, 1, 2, 3])).unwrap();
        assert!(f.validate().issues.iter().any(|s| s == "disconnected"));
        assert!(!f.validate().connected);
        let c = Configuration::from_i64(2, &[&[0, 0], &[1, 0], &[2, 0]]).unwrap();
        let flat = Framework::new(Graph::complete(3), c).unwrap();
        assert_eq!(flat.validate().affine_span, 1);
    }

    #[test]
    fn round_trip_through_file() {
        let c = Configuration::new(2, vec![vec![ratio(1, 3), int(0)], vec![int(-2), ratio(7, 5)], vec![int(1), int(1)]])
            .unwrap();
        let f = Framework::new(Graph::new(3, [(3, 1), (2, 1)]).unwrap(), c).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        save_framework(&f, &path).unwrap();
        assert_eq!(load_framework(&path).unwrap(), f);
    }
}

//! Rigidity matrices, equilibrium stresses and stress matrices.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{affine_span_dim, Configuration, Framework, Graph};
use crate::linalg::{orthogonalize, rref_kernel, MatrixR};
use crate::scalar::{format_scalar, parse_scalar, sub, zero, Scalar};

/// Edge weights in the graph's canonical edge order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stress {
    values: Vec<Scalar>,
}

impl Stress {
    pub fn new(values: Vec<Scalar>) -> Self {
        Stress { values }
    }

    pub fn zero(m: usize) -> Self {
        Stress { values: vec![zero(); m] }
    }

    pub fn from_i64(values: &[i64]) -> Self {
        Stress { values: values.iter().map(|&v| crate::scalar::int(v)).collect() }
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// ω on edge `{a, b}`, zero for non-edges.
    pub fn on_edge(&self, g: &Graph, a: usize, b: usize) -> Scalar {
        g.edge_index(a, b).map_or_else(zero, |k| self.values[k].clone())
    }

    pub fn scaled(&self, s: &Scalar) -> Stress {
        Stress { values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn neg(&self) -> Stress {
        Stress { values: self.values.iter().map(|v| -v).collect() }
    }

    pub fn add(&self, other: &Stress) -> Stress {
        assert_eq!(self.len(), other.len());
        Stress { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.values.iter().map(format_scalar).collect()
    }

    pub fn check(&self, g: &Graph) -> Result<()> {
        if self.len() != g.m() {
            return Err(Error::IndexMismatch { expected: g.m(), got: self.len() });
        }
        Ok(())
    }
}

/// m × d·n; the row of edge `{i, j}` holds `p_i - p_j` in vertex i's
/// columns and `p_j - p_i` in vertex j's.
pub fn rigidity_matrix(f: &Framework) -> MatrixR {
    let d = f.dim();
    let mut r = MatrixR::zeros(f.m(), d * f.n());
    for (row, &(i, j)) in f.graph().edges().iter().enumerate() {
        let e = sub(f.config().point(i), f.config().point(j));
        for (k, x) in e.iter().enumerate() {
            r[(row, (i - 1) * d + k)] = x.clone();
            r[(row, (j - 1) * d + k)] = -x.clone();
        }
    }
    r
}

/// Canonical basis of the kernel of Rᵀ.
pub fn equilibrium_stress_basis(f: &Framework) -> Vec<Stress> {
    let (_, ker) = rref_kernel(&rigidity_matrix(f).transpose());
    ker.into_iter().map(Stress::new).collect()
}

/// Σ_j ω_ij (p_i − p_j) at every vertex (n vectors of length d).
pub fn equilibrium_residuals(f: &Framework, w: &Stress) -> Result<Vec<Vec<Scalar>>> {
    w.check(f.graph())?;
    let p = f.config();
    let mut res = vec![vec![zero(); f.dim()]; f.n()];
    for (k, &(i, j)) in f.graph().edges().iter().enumerate() {
        let e = sub(p.point(i), p.point(j));
        for (c, x) in e.iter().enumerate() {
            let v = &w.values[k] * x;
            res[i - 1][c] += &v;
            res[j - 1][c] -= &v;
        }
    }
    Ok(res)
}

/// Equilibrium test, evaluated both as P̂Ω = 0 and vertex by vertex.
pub fn is_equilibrium(f: &Framework, w: &Stress) -> Result<bool> {
    let by_vertex = equilibrium_residuals(f, w)?.iter().flatten().all(Zero::is_zero);
    let omega = stress_matrix(f.graph(), w)?;
    let by_matrix = f.config().augmented_matrix().mul(&omega).is_zero();
    if by_vertex != by_matrix {
        return Err(Error::Inconsistency("vertex residuals and P̂Ω disagree".into()));
    }
    Ok(by_matrix)
}

/// Ω(ω): `-ω_ij` off the diagonal, row sums zero.
pub fn stress_matrix(g: &Graph, w: &Stress) -> Result<MatrixR> {
    w.check(g)?;
    let mut m = MatrixR::zeros(g.n(), g.n());
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        let v = &w.values[k];
        m[(i - 1, j - 1)] -= v;
        m[(j - 1, i - 1)] -= v;
        m[(i - 1, i - 1)] += v;
        m[(j - 1, j - 1)] += v;
    }
    Ok(m)
}

/// A configuration whose augmented matrix rows span ker Ω(ω).
///
/// Dimension is `dim ker Ω − 1`. Rows come from the canonical kernel basis
/// with means removed, then orthogonalized without normalization.
pub fn universal_configuration(g: &Graph, w: &Stress) -> Result<Configuration> {
    if w.is_zero() {
        return Err(Error::ZeroStress);
    }
    let omega = stress_matrix(g, w)?;
    let (_, ker) = rref_kernel(&omega);
    let n = g.n();
    let centered: Vec<Vec<Scalar>> = ker
        .iter()
        .map(|v| {
            let mean: Scalar = v.iter().sum::<Scalar>() / Scalar::from_integer(n.into());
            v.iter().map(|x| x - &mean).collect()
        })
        .collect();
    let rows = orthogonalize(&centered);
    let dim = rows.len();
    let points = (0..n).map(|i| rows.iter().map(|r| r[i].clone()).collect()).collect();
    Configuration::new(dim, points)
}

/// P̂Ω = 0 and the rows of P̂ span all of ker Ω.
pub fn is_universal_for(f: &Framework, w: &Stress) -> Result<bool> {
    let omega = stress_matrix(f.graph(), w)?;
    let aug = f.config().augmented_matrix();
    if !aug.mul(&omega).is_zero() {
        return Ok(false);
    }
    let kernel_dim = f.n() - omega.rank();
    Ok(aug.rank() == kernel_dim)
}

/// Nonzero symmetric Q with eᵀQe = 0 on every edge direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicWitness {
    pub q: MatrixR,
}

impl ConicWitness {
    pub fn vanishes_on(&self, f: &Framework) -> bool {
        f.graph().edges().iter().all(|&(i, j)| {
            let e = sub(f.config().point(i), f.config().point(j));
            crate::scalar::dot(&e, &self.q.mul_vec(&e)).is_zero()
        })
    }
}

/// Looks for a conic at infinity through all edge directions.
pub fn conic_at_infinity(f: &Framework) -> Option<ConicWitness> {
    let d = f.dim();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let rows: Vec<Vec<Scalar>> = f
        .graph()
        .edges()
        .iter()
        .map(|&(i, j)| {
            let e = sub(f.config().point(i), f.config().point(j));
            pairs
                .iter()
                .map(|&(a, b)| {
                    let v = &e[a] * &e[b];
                    if a == b {
                        v
                    } else {
                        v * Scalar::from_integer(2.into())
                    }
                })
                .collect()
        })
        .collect();
    let system = if rows.is_empty() { MatrixR::zeros(0, pairs.len()) } else { MatrixR::from_rows(rows) };
    let (_, ker) = rref_kernel(&system);
    let coeffs = ker.into_iter().next()?;
    let mut q = MatrixR::zeros(d, d);
    for ((a, b), c) in pairs.into_iter().zip(coeffs) {
        q[(a, b)] = c.clone();
        q[(b, a)] = c;
    }
    let witness = ConicWitness { q };
    assert!(witness.vanishes_on(f), "conic witness failed verification");
    Some(witness)
}

/// Exact rank of the rigidity matrix equals d·n − d(d+1)/2.
pub fn is_infinitesimally_rigid(f: &Framework) -> Result<bool> {
    let d = f.dim();
    let span = affine_span_dim(f.config());
    if span < d {
        return Err(Error::DegenerateSpan { span, ambient: d });
    }
    Ok(rigidity_matrix(f).rank() == d * f.n() - d * (d + 1) / 2)
}

/// True when every entry has the given sign pattern: positive on `positive`
/// edges and negative elsewhere.
pub fn has_sign_pattern(g: &Graph, w: &Stress, positive: impl Fn(usize, usize) -> bool) -> bool {
    g.edges()
        .iter()
        .zip(w.values())
        .all(|(&(a, b), v)| if positive(a, b) { v.is_positive() } else { v.is_negative() })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StressFile {
    edges: Vec<[usize; 2]>,
    values: Vec<String>,
}

/// Parses the stress JSON format against `g`. Edges may be listed in any
/// order and orientation; unlisted edges get zero stress.
pub fn parse_stress(text: &str, g: &Graph) -> Result<Stress> {
    let file: StressFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.edges.len() != file.values.len() {
        return Err(Error::Schema(format!(
            "{} edges but {} values",
            file.edges.len(),
            file.values.len()
        )));
    }
    let mut values = vec![zero(); g.m()];
    let mut seen = vec![false; g.m()];
    for ([a, b], v) in file.edges.iter().zip(&file.values) {
        let idx = g
            .edge_index((*a).min(*b), (*a).max(*b))
            .ok_or_else(|| Error::Schema(format!("edge [{a}, {b}] is not in the graph")))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Schema(format!("duplicate edge [{a}, {b}]")));
        }
        values[idx] = parse_scalar(v)?;
    }
    Ok(Stress::new(values))
}

/// Stress JSON with every edge listed in canonical order.
pub fn stress_to_json(g: &Graph, w: &Stress) -> Result<String> {
    w.check(g)?;
    let file = StressFile {
        edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
        values: w.to_strings(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("stress serializes");
    s.push('\n');
    Ok(s)
}

pub fn load_stress(path: impl AsRef<std::path::Path>, g: &Graph) -> Result<Stress> {
    parse_stress(&std::fs::read_to_string(path)?, g)
}

//! Orthogonal projections with exact distance splitting, affine images, and
//! the SVD factorization used to decompose affine maps.

use nalgebra::DMatrix;

use crate::certify::{certify_by_lift, certify_super_stable, AffineMap, LiftVerdict, SearchOptions, SuperStabilityCertificate};
use crate::error::{Error, Result};
use crate::framework::{affine_span_dim, Configuration, Framework};
use crate::linalg::{orthogonalize, rref_kernel, MatrixR};
use crate::scalar::{dot, one, rational_sqrt, sub, zero, Scalar};

/// Where to project.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectionTarget {
    /// Keep the first k coordinates.
    FirstCoordinates(usize),
    /// Span of the given rational directions.
    Directions(Vec<Vec<Scalar>>),
}

/// A framework split into its projection and the orthogonal heights.
///
/// Low coordinates and heights are coefficients with respect to orthogonal
/// but unnormalized bases; squared lengths use the diagonal Gram metrics
/// `low_metric` and `height_metric`, so everything stays rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionSplit {
    pub high: Framework,
    pub low: Framework,
    pub heights: Vec<Vec<Scalar>>,
    pub target_basis: Vec<Vec<Scalar>>,
    pub complement_basis: Vec<Vec<Scalar>>,
    pub low_metric: Vec<Scalar>,
    pub height_metric: Vec<Scalar>,
}

fn metric_norm(v: &[Scalar], metric: &[Scalar]) -> Scalar {
    v.iter().zip(metric).map(|(x, g)| x * x * g).sum()
}

impl ProjectionSplit {
    pub fn high_squared_distance(&self, i: usize, j: usize) -> Scalar {
        self.high.config().squared_distance(i, j)
    }

    pub fn low_squared_distance(&self, i: usize, j: usize) -> Scalar {
        let c = self.low.config();
        metric_norm(&sub(c.point(i), c.point(j)), &self.low_metric)
    }

    pub fn height_squared_distance(&self, i: usize, j: usize) -> Scalar {
        metric_norm(&sub(&self.heights[i - 1], &self.heights[j - 1]), &self.height_metric)
    }

    /// ‖p̂_i − p̂_j‖² = ‖p_i − p_j‖² + ‖h_i − h_j‖² for every pair, exactly.
    pub fn splitting_holds(&self) -> bool {
        let n = self.high.n();
        (1..=n).all(|i| {
            (i + 1..=n).all(|j| {
                self.high_squared_distance(i, j)
                    == self.low_squared_distance(i, j) + self.height_squared_distance(i, j)
            })
        })
    }

    /// Reassembles `q_i ⊕ h_i` in the ambient frame for low coordinates `q`.
    pub fn lift(&self, q: &Configuration) -> Result<Configuration> {
        if q.len() != self.high.n() || q.dim() != self.target_basis.len() {
            return Err(Error::ShapeMismatch("lift expects a configuration in the low coordinates".into()));
        }
        let dim = self.high.dim();
        let points = q
            .points()
            .iter()
            .zip(&self.heights)
            .map(|(qi, hi)| {
                let mut p = vec![zero(); dim];
                for (c, u) in qi.iter().zip(&self.target_basis) {
                    for (pk, uk) in p.iter_mut().zip(u) {
                        *pk += c * uk;
                    }
                }
                for (c, w) in hi.iter().zip(&self.complement_basis) {
                    for (pk, wk) in p.iter_mut().zip(w) {
                        *pk += c * wk;
                    }
                }
                p
            })
            .collect();
        Configuration::new(dim, points)
    }

    /// The projected points expressed in ambient coordinates.
    pub fn low_in_ambient(&self) -> Configuration {
        let zero_heights: Vec<Vec<Scalar>> = vec![vec![zero(); self.complement_basis.len()]; self.high.n()];
        let tmp = ProjectionSplit { heights: zero_heights, ..self.clone() };
        tmp.lift(self.low.config()).expect("shapes agree")
    }

    /// Edge lengths of `q` under the low metric match those of the projection.
    pub fn low_equivalent(&self, q: &Configuration) -> Result<bool> {
        if q.len() != self.high.n() {
            return Err(Error::CountMismatch { expected: self.high.n(), got: q.len() });
        }
        Ok(self.low.graph().edges().iter().all(|&(i, j)| {
            self.low_squared_distance(i, j) == metric_norm(&sub(q.point(i), q.point(j)), &self.low_metric)
        }))
    }

    /// Isometric low framework, when every target basis vector has a
    /// rational length.
    pub fn low_isometric(&self) -> Option<Framework> {
        let scales: Vec<Scalar> = self.low_metric.iter().map(rational_sqrt).collect::<Option<_>>()?;
        let points = self
            .low
            .config()
            .points()
            .iter()
            .map(|p| p.iter().zip(&scales).map(|(x, s)| x * s).collect())
            .collect();
        self.low.with_config(Configuration::new(scales.len(), points).ok()?).ok()
    }
}

/// Orthogonal projection of `f` onto `target`, keeping the graph.
pub fn project_orthogonal(f: &Framework, target: &ProjectionTarget) -> Result<ProjectionSplit> {
    let big = f.dim();
    let (target_basis, complement_basis) = match target {
        ProjectionTarget::FirstCoordinates(k) => {
            if *k > big {
                return Err(Error::ShapeMismatch(format!("cannot keep {k} of {big} coordinates")));
            }
            let unit = |i: usize| (0..big).map(|j| if i == j { one() } else { zero() }).collect::<Vec<_>>();
            ((0..*k).map(unit).collect::<Vec<_>>(), (*k..big).map(unit).collect::<Vec<_>>())
        }
        ProjectionTarget::Directions(dirs) => {
            if dirs.iter().any(|d| d.len() != big) {
                return Err(Error::ShapeMismatch("direction length differs from ambient dimension".into()));
            }
            let basis = orthogonalize(dirs);
            if basis.len() != dirs.len() {
                return Err(Error::DependentDirections);
            }
            let complement = if basis.is_empty() {
                MatrixR::identity(big).to_rows()
            } else {
                rref_kernel(&MatrixR::from_rows(basis.clone())).1
            };
            (basis, orthogonalize(&complement))
        }
    };
    let low_metric: Vec<Scalar> = target_basis.iter().map(|u| dot(u, u)).collect();
    let height_metric: Vec<Scalar> = complement_basis.iter().map(|w| dot(w, w)).collect();
    let coeffs = |p: &[Scalar], basis: &[Vec<Scalar>], metric: &[Scalar]| -> Vec<Scalar> {
        basis.iter().zip(metric).map(|(u, g)| dot(p, u) / g).collect()
    };
    let low_points = f.config().points().iter().map(|p| coeffs(p, &target_basis, &low_metric)).collect();
    let heights = f.config().points().iter().map(|p| coeffs(p, &complement_basis, &height_metric)).collect();
    let low = f.with_config(Configuration::new(target_basis.len(), low_points)?)?;
    Ok(ProjectionSplit {
        high: f.clone(),
        low,
        heights,
        target_basis,
        complement_basis,
        low_metric,
        height_metric,
    })
}

/// Orthogonal projector onto the span of `basis` (orthogonal, unnormalized).
pub fn projector(basis: &[Vec<Scalar>], dim: usize) -> MatrixR {
    let mut p = MatrixR::zeros(dim, dim);
    for u in basis {
        let g = dot(u, u);
        for i in 0..dim {
            for j in 0..dim {
                p[(i, j)] += &u[i] * &u[j] / &g;
            }
        }
    }
    p
}

/// q_i = A p_i + b for every point.
pub fn apply_affine(f: &Framework, map: &AffineMap) -> Result<Framework> {
    if map.source_dim() != f.dim() {
        return Err(Error::ShapeMismatch(format!(
            "map expects dimension {}, framework has {}",
            map.source_dim(),
            f.dim()
        )));
    }
    let points = f.config().points().iter().map(|p| map.apply(p)).collect();
    f.with_config(Configuration::new(map.target_dim(), points)?)
}

/// Factorization `A = U · diag(σ) · V` with U, V orthogonal and σ
/// nonnegative, nonincreasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    pub fn d(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.sigma.clone()))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * self.d() * &self.v
    }
}

pub fn svd_factor(a: &DMatrix<f64>) -> Result<Svd> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch("svd_factor expects a square matrix".into()));
    }
    let n = a.nrows();
    let svd = a.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    let u = DMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(n, n, |r, c| vt[(order[r], c)]);
    let sigma = order.iter().map(|&i| svd.singular_values[i].max(0.0)).collect();
    Ok(Svd { u, sigma, v })
}

/// Result of re-certifying an affine image of a certified framework.
#[derive(Clone, Debug)]
pub struct AffineDemo {
    pub image: Framework,
    pub image_span: usize,
    pub certified: bool,
    pub reason: Option<crate::certify::NotCertifiedReason>,
    pub lift: Option<LiftVerdict>,
    /// Independent stress-space search on the image, when the map keeps the span.
    pub direct: Option<SuperStabilityCertificate>,
}

/// Applies `map` to a certified framework and certifies the image through
/// the lift test against the original.
pub fn affine_invariance_demo(
    f: &Framework,
    cert: &SuperStabilityCertificate,
    map: &AffineMap,
    seed: u64,
) -> Result<AffineDemo> {
    let stress = match (&cert.stress, cert.is_certified()) {
        (Some(w), true) => w.clone(),
        _ => return Err(Error::InvalidArgument("affine_invariance_demo needs a Certified certificate".into())),
    };
    let image = apply_affine(f, map)?;
    let image_span = affine_span_dim(image.config());
    if image_span == 0 {
        return Ok(AffineDemo {
            image,
            image_span,
            certified: false,
            reason: Some(crate::certify::NotCertifiedReason::DegenerateImage),
            lift: None,
            direct: None,
        });
    }
    let reduced = image.reduce_to_span();
    let lift = certify_by_lift(&reduced, f, &stress)?;
    let direct = if image_span == cert.span {
        Some(certify_super_stable(&reduced, None, &SearchOptions { hints: vec![stress.clone()], ..SearchOptions::seeded(seed) })?)
    } else {
        None
    };
    let certified = lift.certified;
    Ok(AffineDemo { image, image_span, certified, reason: None, lift: Some(lift), direct })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::Graph;
    use crate::scalar::{int, ratio};

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    #[test]
    fn pythagoras_split() {
        let f = Framework::new(Graph::complete(2), Configuration::from_i64(2, &[&[0, 0], &[3, 4]]).unwrap()).unwrap();
        let s = project_orthogonal(&f, &ProjectionTarget::FirstCoordinates(1)).unwrap();
        assert_eq!(s.low.config().points(), &[vec![int(0)], vec![int(3)]]);
        assert_eq!(s.heights, vec![vec![int(0)], vec![int(4)]]);
        assert_eq!(s.high_squared_distance(1, 2), int(25));
        assert_eq!(s.low_squared_distance(1, 2), int(9));
        assert_eq!(s.height_squared_distance(1, 2), int(16));
        assert!(s.splitting_holds());
    }

    #[test]
    fn identity_projection() {
        let f = Framework::new(Graph::complete(3), Configuration::from_i64(2, &[&[0, 0], &[3, 4], &[1, 7]]).unwrap())
            .unwrap();
        let s = project_orthogonal(&f, &ProjectionTarget::FirstCoordinates(2)).unwrap();
        assert_eq!(s.low, f);
        assert!(s.heights.iter().all(|h| h.is_empty()));
    }

    #[test]
    fn direction_projection_and_projector_agree() {
        let f = Framework::new(Graph::complete(3), Configuration::from_i64(2, &[&[0, 0], &[3, 4], &[1, 7]]).unwrap())
            .unwrap();
        let dir = vec![vec![int(1), int(2)]];
        let s = project_orthogonal(&f, &ProjectionTarget::Directions(dir.clone())).unwrap();
        assert!(s.splitting_holds());
        let p = AffineMap::linear(projector(&s.target_basis, 2));
        assert_eq!(apply_affine(&f, &p).unwrap().config(), &s.low_in_ambient());
        // (3, 4) is a rational-length direction: the isometric low framework exists
        let s = project_orthogonal(&f, &ProjectionTarget::Directions(vec![vec![int(3), int(4)]])).unwrap();
        let iso = s.low_isometric().unwrap();
        assert_eq!(iso.config().point(2), &[int(5)]);
        assert!(project_orthogonal(&f, &ProjectionTarget::Directions(vec![dir[0].clone(), vec![int(2), int(4)]]))
            .is_err());
    }

    #[test]
    fn affine_examples() {
        let f = Framework::new(Graph::cycle(4), Configuration::on_line([0, 1, 3, 6].map(int))).unwrap();
        let id = AffineMap::linear(MatrixR::identity(1));
        assert_eq!(apply_affine(&f, &id).unwrap(), f);
        let doubled = apply_affine(&f, &AffineMap::linear(MatrixR::from_i64(&[&[2]]))).unwrap();
        for (a, b) in doubled.squared_edge_lengths().iter().zip(f.squared_edge_lengths()) {
            assert_eq!(a, &(b * int(4)));
        }
        let bad = AffineMap::linear(MatrixR::identity(2));
        assert!(matches!(apply_affine(&f, &bad), Err(Error::ShapeMismatch(_))));
        assert!(AffineMap::new(MatrixR::identity(2), vec![ratio(1, 2)]).is_err());
    }

    #[test]
    fn svd_examples() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        let s = svd_factor(&a).unwrap();
        assert_eq!(s.sigma, vec![2.0, 0.0]);
        assert!(max_abs(&(s.reconstruct() - &a)) <= 1e-12);
        assert!((s.v[(0, 1)].abs() - 1.0).abs() < 1e-12 && s.v[(0, 0)].abs() < 1e-12);

        let (c, sn) = (0.6, 0.8);
        let rot = DMatrix::from_row_slice(2, 2, &[c, -sn, sn, c]);
        let s = svd_factor(&rot).unwrap();
        assert!(s.sigma.iter().all(|x| (x - 1.0).abs() < 1e-12));

        let diag = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 0.5]);
        let s = svd_factor(&diag).unwrap();
        assert_eq!(s.sigma, vec![3.0, 0.5]);
        assert!(max_abs(&(s.u.abs() - DMatrix::identity(2, 2))) < 1e-12);

        let nan = DMatrix::from_row_slice(1, 1, &[f64::INFINITY]);
        assert!(matches!(svd_factor(&nan), Err(Error::NonFinite)));
    }
}

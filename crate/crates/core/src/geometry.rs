//! Polytopes of invariant states in reduced coordinates `(α₀, …, α_{2j−1})`.
//!
//! `α_{2j}` is eliminated through the unit-trace condition, so the state
//! simplex `S` is `x_k ≥ 0`, `Σ_k w_k x_k ≤ 1` with `w_k = √(2k+1)/N`.
//! Halfspaces are stored as `normal · x ≤ offset`.

use std::fmt::Debug;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::invariant::{theta_matrix, trace_weight_exact, AlphaVector};
use crate::surd::Surd;

/// Float comparisons treat differences below this as zero.
pub const FLOAT_EPS: f64 = 1e-10;

/// Largest ambient dimension handled by exact vertex enumeration.
pub const EXACT_MAX_DIM: usize = 3;

/// Ordered field used for coordinates.
pub trait Scalar: Clone + Debug + Sized {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_surd(s: &Surd) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn over(&self, o: &Self) -> Self;
    /// Sign, with `f64` values within [`FLOAT_EPS`] of zero counted as zero.
    fn sign(&self) -> i8;
    fn approx(&self) -> f64;
    fn exact_string(&self) -> Option<String>;
    fn from_coord(c: &Coord) -> Result<Self>;
    fn lift(n: usize, coords: &[Self]) -> Result<AlphaVector>;

    fn negated(&self) -> Self {
        Self::zero().minus(self)
    }
    fn same(&self, o: &Self) -> bool {
        self.minus(o).sign() == 0
    }
}

impl Scalar for Surd {
    const EXACT: bool = true;
    fn zero() -> Self {
        Surd::zero()
    }
    fn one() -> Self {
        Surd::one()
    }
    fn from_surd(s: &Surd) -> Self {
        s.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> i8 {
        self.signum() as i8
    }
    fn approx(&self) -> f64 {
        self.to_f64()
    }
    fn exact_string(&self) -> Option<String> {
        Some(self.to_string())
    }
    fn from_coord(c: &Coord) -> Result<Self> {
        match &c.exact {
            Some(s) => s.parse(),
            None => Err(Error::Parse("exact coordinate missing".into())),
        }
    }
    fn lift(n: usize, coords: &[Self]) -> Result<AlphaVector> {
        AlphaVector::from_reduced_exact(n, coords)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_surd(s: &Surd) -> Self {
        s.to_f64()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> i8 {
        if self.abs() <= FLOAT_EPS {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
    fn approx(&self) -> f64 {
        *self
    }
    fn exact_string(&self) -> Option<String> {
        None
    }
    fn from_coord(c: &Coord) -> Result<Self> {
        Ok(c.approx)
    }
    fn lift(n: usize, coords: &[Self]) -> Result<AlphaVector> {
        AlphaVector::from_reduced_f64(n, coords)
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc.plus(&x.times(y)))
}

/// Point in reduced coordinates, liftable to a full α-vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedCoords<T> {
    pub n: usize,
    pub coords: Vec<T>,
}

impl<T: Scalar> ReducedCoords<T> {
    pub fn new(n: usize, coords: Vec<T>) -> Result<Self> {
        if n < 2 || coords.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n.saturating_sub(1),
                actual: coords.len(),
            });
        }
        Ok(ReducedCoords { n, coords })
    }

    pub fn lift(&self) -> Result<AlphaVector> {
        T::lift(self.n, &self.coords)
    }
}

impl ReducedCoords<Surd> {
    pub fn reduce(alpha: &AlphaVector) -> Option<Self> {
        let ex = alpha.exact()?;
        Some(ReducedCoords {
            n: alpha.n(),
            coords: ex[..ex.len() - 1].to_vec(),
        })
    }
}

impl ReducedCoords<f64> {
    pub fn reduce(alpha: &AlphaVector) -> Self {
        ReducedCoords {
            n: alpha.n(),
            coords: alpha.reduced().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Halfspace<T> {
    /// `normal · x − offset`; non-positive inside.
    pub fn slack(&self, x: &[T]) -> T {
        dot(&self.normal, x).minus(&self.offset)
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.slack(x).sign() <= 0
    }

    pub fn is_tight(&self, x: &[T]) -> bool {
        self.slack(x).sign() == 0
    }
}

/// Bounded convex polytope with both vertex and halfspace descriptions.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope<T> {
    dim: usize,
    halfspaces: Vec<Halfspace<T>>,
    vertices: Vec<Vec<T>>,
    affine_dim: Option<usize>,
}

impl<T: Scalar> Polytope<T> {
    /// Enumerates the vertices of `{x : normal·x ≤ offset}`; the region must be
    /// bounded. Redundant halfspaces are dropped when the result is
    /// full-dimensional.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace<T>>) -> Result<Self> {
        if dim == 0 {
            return domain("polytope dimension must be positive");
        }
        if T::EXACT && dim > EXACT_MAX_DIM {
            return Err(Error::Unsupported(format!(
                "exact vertex enumeration handles dim ≤ {EXACT_MAX_DIM}, got {dim}; use float mode"
            )));
        }
        if let Some(h) = halfspaces.iter().find(|h| h.normal.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: h.normal.len(),
            });
        }
        let vertices = enumerate_vertices(dim, &halfspaces);
        let affine_dim = affine_dimension(&vertices);
        let halfspaces = if affine_dim == Some(dim) {
            prune_to_facets(dim, halfspaces, &vertices)
        } else {
            halfspaces
        };
        Ok(Polytope {
            dim,
            halfspaces,
            vertices,
            affine_dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace<T>] {
        &self.halfspaces
    }

    /// Dimension of the affine hull of the vertices; `None` when empty.
    pub fn affine_dim(&self) -> Option<usize> {
        self.affine_dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x))
    }

    pub fn has_vertex(&self, x: &[T]) -> bool {
        self.vertices.iter().any(|v| same_point(v, x))
    }

    /// Same vertex set, ignoring order.
    pub fn same_vertices(&self, other: &Polytope<T>) -> bool {
        self.vertices.len() == other.vertices.len() && other.vertices.iter().all(|v| self.has_vertex(v))
    }

    pub fn to_f64(&self) -> Polytope<f64> {
        let conv = |v: &[T]| v.iter().map(Scalar::approx).collect::<Vec<f64>>();
        Polytope {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace {
                    normal: conv(&h.normal),
                    offset: h.offset.approx(),
                })
                .collect(),
            vertices: self.vertices.iter().map(|v| conv(v)).collect(),
            affine_dim: self.affine_dim,
        }
    }
}

fn same_point<T: Scalar>(a: &[T], b: &[T]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.same(y))
}

/// Solves `m x = rhs` by Gaussian elimination; `None` if singular.
fn solve<T: Scalar>(mut m: Vec<Vec<T>>, mut rhs: Vec<T>) -> Option<Vec<T>> {
    let d = rhs.len();
    for col in 0..d {
        let pivot = if T::EXACT {
            (col..d).find(|&r| m[r][col].sign() != 0)?
        } else {
            let p = (col..d).max_by(|&a, &b| m[a][col].approx().abs().total_cmp(&m[b][col].approx().abs()))?;
            if m[p][col].sign() == 0 {
                return None;
            }
            p
        };
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..d {
            if r == col || m[r][col].sign() == 0 && T::EXACT {
                continue;
            }
            let f = m[r][col].over(&m[col][col]);
            for c in col..d {
                let v = m[col][c].times(&f);
                m[r][c] = m[r][c].minus(&v);
            }
            let v = rhs[col].times(&f);
            rhs[r] = rhs[r].minus(&v);
        }
    }
    Some((0..d).map(|k| rhs[k].over(&m[k][k])).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn enumerate_vertices<T: Scalar>(dim: usize, hs: &[Halfspace<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    for subset in combinations(hs.len(), dim) {
        let m = subset.iter().map(|&i| hs[i].normal.clone()).collect();
        let rhs = subset.iter().map(|&i| hs[i].offset.clone()).collect();
        let Some(x) = solve(m, rhs) else { continue };
        if hs.iter().all(|h| h.contains(&x)) && !out.iter().any(|v| same_point(v, &x)) {
            out.push(x);
        }
    }
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.approx().total_cmp(&y.approx()))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Rank of a list of vectors.
fn rank<T: Scalar>(mut rows: Vec<Vec<T>>) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col].sign() != 0) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][col].sign() != 0 {
                let f = rows[i][col].over(&rows[r][col]);
                for c in col..width {
                    let v = rows[r][c].times(&f);
                    rows[i][c] = rows[i][c].minus(&v);
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

fn affine_rank<T: Scalar>(points: &[&Vec<T>]) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    let diffs = rest
        .iter()
        .map(|p| p.iter().zip(first.iter()).map(|(a, b)| a.minus(b)).collect())
        .collect();
    Some(rank(diffs))
}

fn affine_dimension<T: Scalar>(vertices: &[Vec<T>]) -> Option<usize> {
    affine_rank(&vertices.iter().collect::<Vec<_>>())
}

fn tight_set<T: Scalar>(h: &Halfspace<T>, vertices: &[Vec<T>]) -> Vec<usize> {
    (0..vertices.len()).filter(|&i| h.is_tight(&vertices[i])).collect()
}

fn prune_to_facets<T: Scalar>(dim: usize, hs: Vec<Halfspace<T>>, vertices: &[Vec<T>]) -> Vec<Halfspace<T>> {
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::new();
    for h in hs {
        let tight = tight_set(&h, vertices);
        let pts: Vec<&Vec<T>> = tight.iter().map(|&i| &vertices[i]).collect();
        if affine_rank(&pts) == Some(dim - 1) && !seen.contains(&tight) {
            seen.push(tight);
            out.push(h);
        }
    }
    out
}

/// Trace weights `w_k = √(2k+1)/N`, `k = 0 … N−1`.
fn weights<T: Scalar>(n: usize) -> Vec<T> {
    (0..n).map(|k| T::from_surd(&trace_weight_exact(n, k))).collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return domain(format!("local dimension must be at least 2, got {n}"));
    }
    Ok(())
}

/// The state simplex `S`.
pub fn simplex_s<T: Scalar>(n: usize) -> Result<Polytope<T>> {
    check_n(n)?;
    let d = n - 1;
    let w = weights::<T>(n);
    let mut hs: Vec<Halfspace<T>> = (0..d)
        .map(|k| {
            let mut normal = vec![T::zero(); d];
            normal[k] = T::one().negated();
            Halfspace {
                normal,
                offset: T::zero(),
            }
        })
        .collect();
    hs.push(Halfspace {
        normal: w[..d].to_vec(),
        offset: T::one(),
    });
    if T::EXACT && d > EXACT_MAX_DIM {
        // vertices are known in closed form: the origin and 1/w_k on each axis
        let mut vertices = vec![vec![T::zero(); d]];
        for k in 0..d {
            let mut v = vec![T::zero(); d];
            v[k] = T::one().over(&w[k]);
            vertices.push(v);
        }
        return Ok(Polytope {
            dim: d,
            halfspaces: hs,
            vertices,
            affine_dim: Some(d),
        });
    }
    Polytope::from_halfspaces(d, hs)
}

/// The reduced-coordinate form `y = A x + t` of `α ↦ Θα`.
pub struct ThetaAffine<T> {
    pub a: Vec<Vec<T>>,
    pub t: Vec<T>,
}

impl<T: Scalar> ThetaAffine<T> {
    pub fn new(n: usize) -> Result<Self> {
        let theta = theta_matrix(n)?;
        let d = n - 1;
        let w = weights::<T>(n);
        let th = |j: usize, k: usize| T::from_surd(&theta.surd(j, k));
        let a = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| th(j, k).minus(&th(j, d).times(&w[k]).over(&w[d])))
                    .collect()
            })
            .collect();
        let t = (0..d).map(|j| th(j, d).over(&w[d])).collect();
        Ok(ThetaAffine { a, t })
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.a.iter().zip(&self.t).map(|(row, t)| dot(row, x).plus(t)).collect()
    }

    /// Image of `{n·x ≤ b}`; valid because the map is an involution.
    fn map_halfspace(&self, h: &Halfspace<T>) -> Halfspace<T> {
        let d = self.t.len();
        let normal = (0..d)
            .map(|k| (0..d).fold(T::zero(), |acc, j| acc.plus(&self.a[j][k].times(&h.normal[j]))))
            .collect();
        Halfspace {
            normal,
            offset: h.offset.minus(&dot(&h.normal, &self.t)),
        }
    }
}

/// `ϑ₂ p`: vertices mapped through `Θ`, halfspaces transformed accordingly.
pub fn image_under_theta<T: Scalar>(p: &Polytope<T>, n: usize) -> Result<Polytope<T>> {
    check_n(n)?;
    if p.dim != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            actual: p.dim,
        });
    }
    let map = ThetaAffine::<T>::new(n)?;
    let mut vertices: Vec<Vec<T>> = p.vertices.iter().map(|v| map.apply(v)).collect();
    vertices.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.approx().total_cmp(&y.approx()))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(Polytope {
        dim: p.dim,
        halfspaces: p.halfspaces.iter().map(|h| map.map_halfspace(h)).collect(),
        vertices,
        affine_dim: p.affine_dim,
    })
}

/// `p ∩ q` by joining halfspaces and re-enumerating vertices.
pub fn intersect<T: Scalar>(p: &Polytope<T>, q: &Polytope<T>) -> Result<Polytope<T>> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            actual: q.dim,
        });
    }
    let hs = p.halfspaces.iter().chain(&q.halfspaces).cloned().collect();
    Polytope::from_halfspaces(p.dim, hs)
}

/// PPT states `S_p = S ∩ ϑ₂S`.
pub fn ppt_polytope<T: Scalar>(n: usize) -> Result<Polytope<T>> {
    let s = simplex_s::<T>(n)?;
    intersect(&s, &image_under_theta(&s, n)?)
}

/// Separable states `S_s`, known for `N ≤ 4`.
pub fn separable_polytope<T: Scalar>(n: usize) -> Result<Polytope<T>> {
    check_n(n)?;
    match n {
        2 | 3 => ppt_polytope(n),
        4 => {
            let sp = ppt_polytope::<T>(4)?;
            // α₀/√5 − α₂ ≤ 0
            let face = Halfspace {
                normal: vec![T::from_surd(&"sqrt(1/5)".parse()?), T::zero(), T::one().negated()],
                offset: T::zero(),
            };
            let mut hs = sp.halfspaces.clone();
            hs.push(face);
            Polytope::from_halfspaces(3, hs)
        }
        _ => Err(Error::Unsupported(format!(
            "the separable set is not known for N = {n}; only S and S_p are available"
        ))),
    }
}

/// Points of `S` fixed by `ϑ₂`.
pub fn fixed_point_set<T: Scalar>(n: usize) -> Result<Polytope<T>> {
    let s = simplex_s::<T>(n)?;
    let map = ThetaAffine::<T>::new(n)?;
    let d = n - 1;
    let mut hs = s.halfspaces.clone();
    for j in 0..d {
        // (A − I)_j · x = −t_j as two inequalities
        let mut row = map.a[j].clone();
        row[j] = row[j].minus(&T::one());
        let rhs = map.t[j].negated();
        hs.push(Halfspace {
            normal: row.iter().map(Scalar::negated).collect(),
            offset: rhs.negated(),
        });
        hs.push(Halfspace {
            normal: row,
            offset: rhs,
        });
    }
    Polytope::from_halfspaces(d, hs)
}

/// Coordinate in exported JSON: exact string when known, plus a float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub approx: f64,
}

impl Coord {
    fn of<T: Scalar>(x: &T) -> Coord {
        Coord {
            exact: x.exact_string(),
            approx: x.approx(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HalfspaceWire {
    normal: Vec<Coord>,
    offset: Coord,
}

#[derive(Serialize, Deserialize)]
struct PolytopeWire {
    dim: usize,
    #[serde(default)]
    affine_dim: Option<usize>,
    vertices: Vec<Vec<Coord>>,
    halfspaces: Vec<HalfspaceWire>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Off,
    Csv,
}

impl<T: Scalar> Polytope<T> {
    pub fn to_json_value(&self) -> serde_json::Value {
        let coords = |v: &[T]| v.iter().map(Coord::of).collect::<Vec<_>>();
        let wire = PolytopeWire {
            dim: self.dim,
            affine_dim: self.affine_dim,
            vertices: self.vertices.iter().map(|v| coords(v)).collect(),
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| HalfspaceWire {
                    normal: coords(&h.normal),
                    offset: Coord::of(&h.offset),
                })
                .collect(),
        };
        serde_json::to_value(wire).expect("plain data serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let wire: PolytopeWire = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let coords = |v: &[Coord]| v.iter().map(T::from_coord).collect::<Result<Vec<T>>>();
        let vertices = wire.vertices.iter().map(|v| coords(v)).collect::<Result<Vec<_>>>()?;
        let halfspaces = wire
            .halfspaces
            .iter()
            .map(|h| {
                Ok(Halfspace {
                    normal: coords(&h.normal)?,
                    offset: T::from_coord(&h.offset)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if vertices.iter().any(|v| v.len() != wire.dim) {
            return Err(Error::Parse("vertex length differs from dim".into()));
        }
        Ok(Polytope {
            dim: wire.dim,
            halfspaces,
            affine_dim: affine_dimension(&vertices),
            vertices,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.dim).map(|k| format!("alpha{k}")).collect();
        let exact_header: Vec<String> = (0..self.dim).map(|k| format!("alpha{k}_exact")).collect();
        out.push_str(&header.join(","));
        if T::EXACT {
            out.push(',');
            out.push_str(&exact_header.join(","));
        }
        out.push('\n');
        for v in &self.vertices {
            let floats: Vec<String> = v.iter().map(|x| format!("{}", x.approx() + 0.0)).collect();
            out.push_str(&floats.join(","));
            if T::EXACT {
                let ex: Vec<String> = v.iter().map(|x| x.exact_string().unwrap_or_default()).collect();
                out.push(',');
                out.push_str(&ex.join(","));
            }
            out.push('\n');
        }
        out
    }

    /// Boundary mesh in OFF format; needs a full-dimensional polytope of
    /// dimension 2 or 3. Faces are wound counter-clockwise seen from outside.
    pub fn to_off(&self) -> Result<String> {
        if !(2..=3).contains(&self.dim) || self.affine_dim != Some(self.dim) {
            return Err(Error::Unsupported(format!(
                "OFF export needs a full-dimensional polytope of dim 2 or 3 (dim {}, affine dim {:?})",
                self.dim, self.affine_dim
            )));
        }
        let pts: Vec<[f64; 3]> = self
            .vertices
            .iter()
            .map(|v| {
                let mut p = [0.0; 3];
                for (k, x) in v.iter().enumerate() {
                    p[k] = x.approx();
                }
                p
            })
            .collect();
        let faces: Vec<Vec<usize>> = if self.dim == 2 {
            vec![order_polygon(
                &pts,
                &(0..pts.len()).collect::<Vec<_>>(),
                [0.0, 0.0, 1.0],
            )]
        } else {
            self.halfspaces
                .iter()
                .map(|h| {
                    let normal = [h.normal[0].approx(), h.normal[1].approx(), h.normal[2].approx()];
                    order_polygon(&pts, &tight_set(h, &self.vertices), normal)
                })
                .collect()
        };
        let mut out = String::from("OFF\n");
        let _ = writeln!(out, "{} {} 0", pts.len(), faces.len());
        for p in &pts {
            let _ = writeln!(out, "{} {} {}", p[0] + 0.0, p[1] + 0.0, p[2] + 0.0);
        }
        for f in &faces {
            let idx: Vec<String> = f.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{} {}", f.len(), idx.join(" "));
        }
        Ok(out)
    }

    pub fn export(&self, format: ExportFormat) -> Result<String> {
        match format {
            ExportFormat::Json => Ok(serde_json::to_string_pretty(&self.to_json_value()).expect("json value")),
            ExportFormat::Off => self.to_off(),
            ExportFormat::Csv => Ok(self.to_csv()),
        }
    }
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Sorts the indices of a planar convex polygon counter-clockwise about `normal`.
fn order_polygon(pts: &[[f64; 3]], idx: &[usize], normal: [f64; 3]) -> Vec<usize> {
    let k = idx.len() as f64;
    let mut c = [0.0; 3];
    for &i in idx {
        for (a, b) in c.iter_mut().zip(pts[i]) {
            *a += b / k;
        }
    }
    let u = sub3(pts[idx[0]], c);
    let v = cross3(normal, u);
    let mut with_angle: Vec<(f64, usize)> = idx
        .iter()
        .map(|&i| {
            let r = sub3(pts[i], c);
            (dot3(r, v).atan2(dot3(r, u)), i)
        })
        .collect();
    with_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
    with_angle.into_iter().map(|(_, i)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(xs: &[&str]) -> Vec<Surd> {
        xs.iter().map(|x| x.parse().unwrap()).collect()
    }

    #[test]
    fn interval_case() {
        let s = simplex_s::<Surd>(2).unwrap();
        assert!(s.has_vertex(&pt(&["0"])) && s.has_vertex(&pt(&["2"])));
        let img = image_under_theta(&s, 2).unwrap();
        assert!(img.has_vertex(&pt(&["-1"])) && img.has_vertex(&pt(&["1"])));
        let sp = intersect(&s, &img).unwrap();
        assert_eq!(sp.vertices(), &[pt(&["0"]), pt(&["1"])]);
        let fixed = fixed_point_set::<Surd>(2).unwrap();
        assert_eq!(fixed.vertices(), &[pt(&["1/2"])]);
        assert_eq!(fixed.affine_dim(), Some(0));
    }

    #[test]
    fn solve_handles_singular() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(m, vec![1.0, 2.0]).is_none());
        let m = vec![pt(&["0", "1"]), pt(&["1", "0"])];
        assert_eq!(solve(m, pt(&["3", "sqrt(2)"])).unwrap(), pt(&["sqrt(2)", "3"]));
    }

    #[test]
    fn exact_enumeration_is_limited() {
        assert!(matches!(ppt_polytope::<Surd>(5), Err(Error::Unsupported(_))));
        assert!(simplex_s::<Surd>(5).is_ok());
        assert!(matches!(separable_polytope::<f64>(5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(8, 3).len(), 56);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }
}

//! Domain descriptions and boundary conditions shared by every other module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Robin { alpha: f64, beta: f64 },
}

impl BoundaryCondition {
    pub fn robin(alpha: f64, beta: f64) -> Result<Self, GeometryError> {
        if beta == 0.0 || !alpha.is_finite() || !beta.is_finite() {
            return Err(GeometryError::InvalidRobin { alpha, beta });
        }
        Ok(BoundaryCondition::Robin { alpha, beta })
    }

    /// Robin coefficient c = alpha/beta (0 for Neumann, None for Dirichlet).
    pub fn robin_coefficient(&self) -> Option<f64> {
        match *self {
            BoundaryCondition::Dirichlet => None,
            BoundaryCondition::Neumann => Some(0.0),
            BoundaryCondition::Robin { alpha, beta } => Some(alpha / beta),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("Robin condition needs finite alpha and beta != 0 (got alpha={alpha}, beta={beta})")]
    InvalidRobin { alpha: f64, beta: f64 },
    #[error("polygon needs at least 3 vertices")]
    TooFewVertices,
    #[error("repeated vertex at index {0}")]
    DegenerateVertex(usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygon edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("invalid opening angle {0} (need 0 < gamma < 2*pi)")]
    BadOpeningAngle(f64),
    #[error("domain spec parse error: {0}")]
    ParseError(String),
    #[error("domain spec validation error: {0}")]
    ValidationError(String),
}

pub type Point = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point>,
    pub area: f64,
    pub perimeter: f64,
    /// Interior angles in (0, 2pi), one per vertex, in vertex order.
    pub interior_angles: Vec<f64>,
    /// Vertices with theta = pi, flagged so they contribute no corner defect.
    pub flat: Vec<bool>,
    /// Optional triangulation seed (standalone point list with index
    /// triples); presets carry corner-exact decompositions.
    #[serde(default)]
    pub seed_triangles: Option<SeedTriangulation>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedTriangulation {
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
}

const FLAT_TOL: f64 = 1e-12;

impl Polygon {
    /// Build a polygon from a vertex loop. Orientation is normalized to
    /// counterclockwise; flat vertices (theta = pi) are kept and flagged.
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices);
        }
        for i in 0..n {
            let j = (i + 1) % n;
            let d = hypot2(vertices[i], vertices[j]);
            if d == 0.0 {
                return Err(GeometryError::DegenerateVertex(j));
            }
        }
        let mut verts = vertices;
        check_simple(&verts)?;
        let signed = shoelace(&verts);
        if signed == 0.0 {
            return Err(GeometryError::ZeroArea);
        }
        if signed < 0.0 {
            verts.reverse();
        }
        let area = shoelace(&verts);
        let perimeter = (0..n)
            .map(|i| hypot2(verts[i], verts[(i + 1) % n]))
            .sum();
        let interior_angles: Vec<f64> = (0..n).map(|i| interior_angle(&verts, i)).collect();
        let flat = interior_angles
            .iter()
            .map(|&a| (a - std::f64::consts::PI).abs() < FLAT_TOL)
            .collect();
        Ok(Polygon {
            vertices: verts,
            area,
            perimeter,
            interior_angles,
            flat,
            seed_triangles: None,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Simply connected, so chi = 1.
    pub fn euler_char(&self) -> i32 {
        1
    }

    /// Angles of true corners only (flat vertices dropped).
    pub fn corner_angles(&self) -> Vec<f64> {
        self.interior_angles
            .iter()
            .zip(&self.flat)
            .filter(|(_, &f)| !f)
            .map(|(&a, _)| a)
            .collect()
    }

    pub fn with_seed(mut self, seed: SeedTriangulation) -> Self {
        self.seed_triangles = Some(seed);
        self
    }

    /// Signed distance is overkill here; plain even-odd point-in-polygon.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if x > p[0] {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn hypot2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn shoelace(v: &[Point]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        s += v[i][0] * v[j][1] - v[j][0] * v[i][1];
    }
    s / 2.0
}

/// Interior angle at vertex i of a CCW polygon, in (0, 2pi).
fn interior_angle(v: &[Point], i: usize) -> f64 {
    let n = v.len();
    let p = v[(i + n - 1) % n];
    let q = v[i];
    let r = v[(i + 1) % n];
    let u = [p[0] - q[0], p[1] - q[1]];
    let w = [r[0] - q[0], r[1] - q[1]];
    // angle from w to u measured counterclockwise (interior side for CCW loops)
    let mut ang = (w[0] * u[1] - w[1] * u[0]).atan2(w[0] * u[0] + w[1] * u[1]);
    if ang <= 0.0 {
        ang += TWO_PI;
    }
    ang
}

fn check_simple(v: &[Point]) -> Result<(), GeometryError> {
    let n = v.len();
    for i in 0..n {
        for j in (i + 1)..n {
            // skip adjacent edges (they share an endpoint)
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Err(GeometryError::SelfIntersecting(i, j));
            }
        }
    }
    Ok(())
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let cross = |o: Point, p: Point, q: Point| {
        (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])
    };
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    false
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum SmoothDomain {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
}

impl SmoothDomain {
    pub fn area(&self) -> f64 {
        match *self {
            SmoothDomain::Disk { radius } => std::f64::consts::PI * radius * radius,
            SmoothDomain::Ellipse { a, b } => std::f64::consts::PI * a * b,
        }
    }

    pub fn perimeter(&self) -> f64 {
        match *self {
            SmoothDomain::Disk { radius } => TWO_PI * radius,
            // Gauss/AGM-free series is unnecessary; use the standard
            // arithmetic-geometric mean for the complete elliptic integral.
            SmoothDomain::Ellipse { a, b } => ellipse_perimeter(a, b),
        }
    }

    pub fn euler_char(&self) -> i32 {
        1
    }
}

fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    // 4a E(e) via AGM iteration for the second complete elliptic integral
    let (a, b) = (a.max(b), a.min(b));
    if a == b {
        return TWO_PI * a;
    }
    let mut x = 1.0f64;
    let mut y = b / a;
    let mut sum = 1.0 - 0.5 * (1.0 - y * y);
    let mut pow = 0.25;
    while (x - y).abs() > 1e-16 * x {
        let xm = 0.5 * (x + y);
        let ym = (x * y).sqrt();
        let c = 0.5 * (x - y);
        sum -= pow * c * c;
        pow *= 2.0;
        x = xm;
        y = ym;
    }
    TWO_PI * a * sum / x
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sector {
    pub gamma: f64,
    pub bc: BoundaryCondition,
}

impl Sector {
    pub fn new(gamma: f64, bc: BoundaryCondition) -> Result<Self, GeometryError> {
        if !(gamma > 0.0 && gamma < TWO_PI) {
            return Err(GeometryError::BadOpeningAngle(gamma));
        }
        Ok(Sector { gamma, bc })
    }
}

/// Model geometry used in a locality study.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum LocalityModel {
    FreePlane,
    HalfPlane { bc: BoundaryCondition },
    Sector { gamma: f64, bc: BoundaryCondition },
}

/// Exact-geometric-match configuration: the model's boundary coincides with
/// the big domain's boundary on a neighborhood of the patch `omega0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalityScenario {
    /// Axis-aligned big rectangle [0,a] x [0,b].
    pub big_rect: [f64; 2],
    pub big_bc: BoundaryCondition,
    pub model: LocalityModel,
    /// Patch [x0,x1] x [y0,y1] inside the big rectangle.
    pub omega0: [f64; 4],
    /// Separation from omega0 to the model-unmatched part of the boundary.
    pub alpha_sep: f64,
}

impl LocalityScenario {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let [a, b] = self.big_rect;
        let [x0, x1, y0, y1] = self.omega0;
        if !(a > 0.0 && b > 0.0) {
            return Err(GeometryError::ValidationError("empty rectangle".into()));
        }
        if !(x0 < x1 && y0 < y1 && x0 >= 0.0 && x1 <= a && y0 >= 0.0 && y1 <= b) {
            return Err(GeometryError::ValidationError(
                "omega0 not inside the big rectangle".into(),
            ));
        }
        if self.alpha_sep <= 0.0 {
            return Err(GeometryError::ValidationError(
                "alpha_sep must be positive".into(),
            ));
        }
        // distance from the patch to the unmatched boundary must be >= alpha_sep
        let sep = match &self.model {
            LocalityModel::FreePlane => [x0, a - x1, y0, b - y1]
                .into_iter()
                .fold(f64::INFINITY, f64::min),
            // matched edge is y = 0
            LocalityModel::HalfPlane { .. } => {
                [x0, a - x1, b - y1].into_iter().fold(f64::INFINITY, f64::min)
            }
            // matched corner at the origin (edges x = 0 and y = 0)
            LocalityModel::Sector { .. } => (a - x1).min(b - y1),
        };
        if sep + 1e-12 < self.alpha_sep {
            return Err(GeometryError::ValidationError(format!(
                "patch is {sep:.4} from the unmatched boundary, needs >= {}",
                self.alpha_sep
            )));
        }
        Ok(())
    }
}

/// Any domain the CLI can address.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Domain {
    Polygonal(Polygon),
    Smooth(SmoothDomain),
    Sectorial(Sector),
}

impl Domain {
    pub fn area(&self) -> Option<f64> {
        match self {
            Domain::Polygonal(p) => Some(p.area),
            Domain::Smooth(s) => Some(s.area()),
            Domain::Sectorial(_) => None,
        }
    }

    pub fn perimeter(&self) -> Option<f64> {
        match self {
            Domain::Polygonal(p) => Some(p.perimeter),
            Domain::Smooth(s) => Some(s.perimeter()),
            Domain::Sectorial(_) => None,
        }
    }
}

pub fn polygon_derived(vertices: Vec<Point>) -> Result<Polygon, GeometryError> {
    Polygon::new(vertices)
}

// -------- presets --------

pub fn preset_square() -> Polygon {
    let p = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    p.with_seed(SeedTriangulation {
        points: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        triangles: vec![[0, 1, 2], [0, 2, 3]],
    })
}

pub fn preset_equilateral() -> Polygon {
    let h = 3f64.sqrt() / 2.0;
    let p = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]]).unwrap();
    p.with_seed(SeedTriangulation {
        points: vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]],
        triangles: vec![[0, 1, 2]],
    })
}

pub fn preset_disk(radius: f64) -> SmoothDomain {
    SmoothDomain::Disk { radius }
}

// The two isospectral drums: seven right isosceles triangles with legs of
// length 1 glued edge-to-edge. Vertex loops below are the standard pair
// (half-square units); each outline has eight corners, with angle multiset
// {pi/4 x2, pi/2 x2, 3pi/4 x2, 3pi/2 x2}, area 7/2 and perimeter 6 + 3*sqrt(2).

pub fn preset_gww1() -> Polygon {
    let p = Polygon::new(vec![
        [0.0, 0.0],
        [-1.0, 0.0],
        [0.0, -1.0],
        [1.0, 0.0],
        [1.0, 1.0],
        [2.0, 1.0],
        [1.0, 2.0],
        [0.0, 2.0],
    ])
    .unwrap();
    // corner-exact seed: the seven half-square triangles themselves
    let pts = vec![
        [0.0, -1.0],
        [0.0, 0.0],
        [-1.0, 0.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [1.0, 1.0],
        [1.0, 2.0],
        [0.0, 2.0],
        [2.0, 1.0],
    ];
    p.with_seed(SeedTriangulation {
        points: pts,
        triangles: vec![
            [0, 1, 2],
            [0, 3, 1],
            [1, 3, 4],
            [3, 5, 4],
            [4, 5, 6],
            [4, 6, 7],
            [5, 8, 6],
        ],
    })
}

pub fn preset_gww2() -> Polygon {
    let p = Polygon::new(vec![
        [-1.0, 0.0],
        [-1.0, -1.0],
        [0.0, -1.0],
        [2.0, 1.0],
        [1.0, 1.0],
        [1.0, 2.0],
        [0.0, 1.0],
        [0.0, 0.0],
    ])
    .unwrap();
    let pts = vec![
        [-1.0, -1.0],
        [0.0, -1.0],
        [-1.0, 0.0],
        [0.0, 0.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [1.0, 1.0],
        [2.0, 1.0],
        [1.0, 2.0],
    ];
    p.with_seed(SeedTriangulation {
        points: pts,
        triangles: vec![
            [0, 1, 2],
            [1, 3, 2],
            [1, 4, 3],
            [3, 4, 5],
            [4, 6, 5],
            [5, 6, 8],
            [4, 7, 6],
        ],
    })
}

// -------- JSON domain specs --------

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum DomainSpec {
    Polygon { vertices: Vec<Point> },
    Smooth(SmoothSpec),
    Sector { gamma: f64, bc: BcSpec },
    Preset { name: String, radius: Option<f64> },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
struct SmoothSpec {
    shape: String,
    radius: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
struct BcSpec {
    kind: String,
    alpha: Option<f64>,
    beta: Option<f64>,
}

impl BcSpec {
    fn resolve(&self) -> Result<BoundaryCondition, GeometryError> {
        match self.kind.as_str() {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            "robin" => BoundaryCondition::robin(
                self.alpha.unwrap_or(0.0),
                self.beta.unwrap_or(0.0),
            ),
            k => Err(GeometryError::ValidationError(format!(
                "unknown boundary condition kind '{k}'"
            ))),
        }
    }
}

/// Parse a domain-spec JSON document (see docs/domain-spec.md for the schema).
pub fn load_domain_spec(json: &str) -> Result<Domain, GeometryError> {
    let spec: DomainSpec =
        serde_json::from_str(json).map_err(|e| GeometryError::ParseError(e.to_string()))?;
    match spec {
        DomainSpec::Polygon { vertices } => Ok(Domain::Polygonal(Polygon::new(vertices)?)),
        DomainSpec::Smooth(s) => match s.shape.as_str() {
            "disk" => {
                let r = s.radius.unwrap_or(1.0);
                if r <= 0.0 {
                    return Err(GeometryError::ValidationError("radius <= 0".into()));
                }
                Ok(Domain::Smooth(SmoothDomain::Disk { radius: r }))
            }
            "ellipse" => {
                let (a, b) = (s.a.unwrap_or(1.0), s.b.unwrap_or(1.0));
                if a <= 0.0 || b <= 0.0 {
                    return Err(GeometryError::ValidationError("ellipse axes <= 0".into()));
                }
                Ok(Domain::Smooth(SmoothDomain::Ellipse { a, b }))
            }
            other => Err(GeometryError::ValidationError(format!(
                "unknown smooth shape '{other}'"
            ))),
        },
        DomainSpec::Sector { gamma, bc } => {
            Ok(Domain::Sectorial(Sector::new(gamma, bc.resolve()?)?))
        }
        DomainSpec::Preset { name, radius } => resolve_preset(&name, radius),
    }
}

pub fn resolve_preset(name: &str, radius: Option<f64>) -> Result<Domain, GeometryError> {
    match name {
        "square" => Ok(Domain::Polygonal(preset_square())),
        "equilateral" => Ok(Domain::Polygonal(preset_equilateral())),
        "disk" => Ok(Domain::Smooth(preset_disk(radius.unwrap_or(1.0)))),
        "gww1" => Ok(Domain::Polygonal(preset_gww1())),
        "gww2" => Ok(Domain::Polygonal(preset_gww2())),
        other => Err(GeometryError::ValidationError(format!(
            "unknown preset '{other}'"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_square_derived() {
        let p = preset_square();
        assert_eq!(p.area, 1.0);
        assert_eq!(p.perimeter, 4.0);
        for &a in &p.interior_angles {
            assert!((a - PI / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn equilateral_derived() {
        let p = preset_equilateral();
        assert!((p.area - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((p.perimeter - 3.0).abs() < 1e-15);
        for &a in &p.interior_angles {
            assert!((a - PI / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn l_shape_derived() {
        let p = Polygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        assert!((p.area - 3.0).abs() < 1e-14);
        assert!((p.perimeter - 8.0).abs() < 1e-14);
        let mut angles = p.interior_angles.clone();
        angles.sort_by(f64::total_cmp);
        for &a in &angles[..5] {
            assert!((a - PI / 2.0).abs() < 1e-13);
        }
        assert!((angles[5] - 3.0 * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn angle_sum_is_two_pi() {
        let p = preset_gww1();
        let defect: f64 = p.interior_angles.iter().map(|&a| PI - a).sum();
        assert!((defect - TWO_PI).abs() < 1e-12);
    }

    #[test]
    fn orientation_normalized() {
        let ccw = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let cw = Polygon::new(vec![[0.0, 1.0], [1.0, 1.0], [1.0, 0.0], [0.0, 0.0]]).unwrap();
        assert_eq!(ccw.area, cw.area);
        assert_eq!(ccw.perimeter, cw.perimeter);
        let mut a1 = ccw.interior_angles.clone();
        let mut a2 = cw.interior_angles.clone();
        a1.sort_by(f64::total_cmp);
        a2.sort_by(f64::total_cmp);
        assert_eq!(a1, a2);
    }

    #[test]
    fn flat_vertex_flagged() {
        let p = Polygon::new(vec![
            [0.0, 0.0],
            [0.5, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(p.flat.iter().filter(|&&f| f).count(), 1);
        assert_eq!(p.corner_angles().len(), 4);
    }

    #[test]
    fn rejects_bad_polygons() {
        assert_eq!(
            Polygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap_err(),
            GeometryError::TooFewVertices
        );
        assert!(matches!(
            Polygon::new(vec![[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]).unwrap_err(),
            GeometryError::DegenerateVertex(_)
        ));
        // bowtie
        assert!(matches!(
            Polygon::new(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).unwrap_err(),
            GeometryError::SelfIntersecting(_, _)
        ));
    }

    #[test]
    fn gww_presets_share_invariants() {
        let a = preset_gww1();
        let b = preset_gww2();
        assert!((a.area - 3.5).abs() < 1e-13);
        assert!((b.area - 3.5).abs() < 1e-13);
        assert!((a.perimeter - (6.0 + 3.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((a.perimeter - b.perimeter).abs() < 1e-12);
        let mut aa = a.interior_angles.clone();
        let mut bb = b.interior_angles.clone();
        aa.sort_by(f64::total_cmp);
        bb.sort_by(f64::total_cmp);
        for (x, y) in aa.iter().zip(&bb) {
            assert!((x - y).abs() < 1e-12);
        }
        // seed triangulations tile the drums exactly
        for p in [&a, &b] {
            let seed = p.seed_triangles.as_ref().unwrap();
            let tri_area: f64 = seed
                .triangles
                .iter()
                .map(|t| {
                    let [i, j, k] = *t;
                    let (p0, p1, p2) = (seed.points[i], seed.points[j], seed.points[k]);
                    0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1])
                        - (p2[0] - p0[0]) * (p1[1] - p0[1]))
                        .abs()
                })
                .sum();
            assert!((tri_area - 3.5).abs() < 1e-13);
        }
    }

    #[test]
    fn disk_derived_exact() {
        let d = preset_disk(2.0);
        assert_eq!(d.area(), PI * 4.0);
        assert_eq!(d.perimeter(), TWO_PI * 2.0);
        // ellipse degenerates to the circle value
        let e = SmoothDomain::Ellipse { a: 2.0, b: 2.0 };
        assert!((e.perimeter() - TWO_PI * 2.0).abs() < 1e-12);
    }

    #[test]
    fn domain_spec_round_trip() {
        let d = load_domain_spec(r#"{"type":"polygon","vertices":[[0,0],[1,0],[1,1],[0,1]]}"#)
            .unwrap();
        match d {
            Domain::Polygonal(p) => assert_eq!(p.area, 1.0),
            _ => panic!("expected polygon"),
        }
        let d = load_domain_spec(r#"{"type":"preset","name":"disk","radius":1.0}"#).unwrap();
        assert!((d.area().unwrap() - PI).abs() < 1e-15);
        let d = load_domain_spec(r#"{"type":"preset","name":"gww1"}"#).unwrap();
        assert!((d.area().unwrap() - 3.5).abs() < 1e-13);
        assert!(load_domain_spec("{nonsense").is_err());
        assert!(load_domain_spec(r#"{"type":"preset","name":"nope"}"#).is_err());
    }

    #[test]
    fn robin_invariants() {
        assert!(BoundaryCondition::robin(1.0, 0.0).is_err());
        let bc = BoundaryCondition::robin(2.0, 4.0).unwrap();
        assert_eq!(bc.robin_coefficient(), Some(0.5));
        assert_eq!(BoundaryCondition::Neumann.robin_coefficient(), Some(0.0));
        assert_eq!(BoundaryCondition::Dirichlet.robin_coefficient(), None);
    }

    #[test]
    fn locality_scenario_validation() {
        let ok = LocalityScenario {
            big_rect: [1.0, 1.0],
            big_bc: BoundaryCondition::Dirichlet,
            model: LocalityModel::Sector {
                gamma: PI / 2.0,
                bc: BoundaryCondition::Dirichlet,
            },
            omega0: [0.0, 0.25, 0.0, 0.25],
            alpha_sep: 0.5,
        };
        ok.validate().unwrap();
        let bad = LocalityScenario {
            alpha_sep: 0.9,
            ..ok.clone()
        };
        assert!(bad.validate().is_err());
    }
}

//! Scenario files: one JSON document per run.

use std::fs;
use std::path::Path;

use bcurrent::geometry::{BoundingBox, CoverOptions, PiecewiseDomain, SmoothPiece};
use bcurrent::pairing::{Cutoff, Schedule, TestForm};
use bcurrent::quadrature::QuadratureSpec;
use bcurrent::{Domain, Error, Form, Function, C};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub domain: DomainSpec,
    /// Rational expression in `z` (n = 1) or `z1, z2`.
    pub function: String,
    /// Test forms for `pair` and `asymptotics`.
    pub forms: Vec<FormSpec>,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    #[serde(default)]
    pub cover: CoverSpec,
    #[serde(default)]
    pub fit: FitSpec,
    #[serde(default)]
    pub weinstock: WeinstockSpec,
    #[serde(default)]
    pub growth: GrowthSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub dim: usize,
    pub pieces: Vec<PieceSpec>,
    /// `[x1, y1]` or `[x1, y1, x2, y2]`.
    pub bbox_lo: Vec<f64>,
    pub bbox_hi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub label: String,
    /// 1 for `z1` (or `z`), 2 for `z2`.
    pub coord: usize,
    #[serde(flatten)]
    pub shape: ShapeSpec,
    #[serde(default = "one")]
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeSpec {
    /// `normal · (x, y) < offset`.
    HalfPlane { normal: [f64; 2], offset: f64 },
    /// `|w − center| < radius`.
    Disc { center: [f64; 2], radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub coefficients: Vec<String>,
    #[serde(default)]
    pub cutoff: Option<CutoffSpec>,
}

/// Radial plateau `1` on `|zₖ − cₖ| ≤ inner`, `0` beyond `outer`, per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffSpec {
    pub center: Vec<[f64; 2]>,
    pub inner: f64,
    pub outer: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub eps0: f64,
    pub ratio: f64,
    pub steps: usize,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        let s = Schedule::default();
        ScheduleSpec { eps0: s.eps0, ratio: s.ratio, steps: s.steps }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub corner_refine_depth: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        QuadratureSettings {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_subdivisions: q.max_subdivisions,
            corner_refine_depth: q.corner_refine_depth,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    pub radius: f64,
    pub tilt: f64,
    pub sectors_per_circle: usize,
    pub overlap: f64,
}

impl Default for CoverSpec {
    fn default() -> Self {
        let c = CoverOptions::default();
        CoverSpec { radius: c.radius, tilt: c.tilt, sectors_per_circle: c.sectors_per_circle, overlap: c.overlap }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub window: usize,
}

impl Default for FitSpec {
    fn default() -> Self {
        FitSpec { window: bcurrent::asymptotics::DEFAULT_WINDOW }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeinstockSpec {
    pub tolerance: f64,
    /// ∂̄-closed family; empty means the scenario's `forms`.
    #[serde(default)]
    pub forms: Vec<FormSpec>,
}

impl Default for WeinstockSpec {
    fn default() -> Self {
        WeinstockSpec { tolerance: 1e-6, forms: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub n_rays: usize,
}

impl Default for GrowthSpec {
    fn default() -> Self {
        GrowthSpec { n_rays: 16 }
    }
}

fn one() -> f64 {
    1.0
}

/// Scenarios shipped with the tool, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("square", include_str!("../../../scenarios/square.json")),
    ("bidisc", include_str!("../../../scenarios/bidisc.json")),
    ("bidisc-control", include_str!("../../../scenarios/bidisc-control.json")),
    ("square-cross-plane", include_str!("../../../scenarios/square-cross-plane.json")),
    ("square_f=1/z^2", include_str!("../../../scenarios/square_f=1_z^2.json")),
    ("square_f=1/z", include_str!("../../../scenarios/square_f=1_z.json")),
    ("square_f=1", include_str!("../../../scenarios/square_f=1.json")),
    ("square_f=z", include_str!("../../../scenarios/square_f=z.json")),
    ("square_f=z^2", include_str!("../../../scenarios/square_f=z^2.json")),
    ("square_f=1/(z-1)", include_str!("../../../scenarios/square_f=1_(z-1).json")),
];

/// Why a scenario could not be loaded.
#[derive(Debug)]
pub enum LoadError {
    Io(String),
    Parse(String),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Io(m) => write!(f, "cannot read scenario: {m}"),
            LoadError::Parse(m) => write!(f, "cannot parse scenario: {m}"),
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// A path to a JSON file, or the name of a bundled scenario.
    pub fn load(spec: &str) -> Result<Self, LoadError> {
        let path = Path::new(spec);
        if path.is_file() {
            let text = fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{spec}: {e}")))?;
            return Self::from_json(&text);
        }
        if let Some((_, text)) = BUNDLED.iter().find(|(name, _)| *name == spec) {
            return Self::from_json(text);
        }
        Err(LoadError::Io(format!("{spec}: no such file or bundled scenario")))
    }

    pub fn bundled(name: &str) -> Self {
        let text = BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).expect("bundled scenario exists");
        Self::from_json(text).expect("bundled scenario parses")
    }

    pub fn domain(&self) -> bcurrent::Result<Domain> {
        let d = &self.domain;
        let n = d.dim;
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidGeometry(format!("dim must be 1 or 2, got {n}")));
        }
        if d.bbox_lo.len() != 2 * n || d.bbox_hi.len() != 2 * n {
            return Err(Error::InvalidGeometry(format!("bounding box needs {} coordinates per corner", 2 * n)));
        }
        let mut lo = [0.0; 4];
        let mut hi = [0.0; 4];
        lo[..2 * n].copy_from_slice(&d.bbox_lo);
        hi[..2 * n].copy_from_slice(&d.bbox_hi);
        let mut pieces = Vec::with_capacity(d.pieces.len());
        for p in &d.pieces {
            if p.coord == 0 || p.coord > n {
                return Err(Error::InvalidGeometry(format!(
                    "piece '{}' uses coordinate {} in C^{n}",
                    p.label, p.coord
                )));
            }
            let mut piece = match p.shape {
                ShapeSpec::HalfPlane { normal, offset } => {
                    SmoothPiece::half_plane(&p.label, p.coord - 1, normal, offset)
                }
                ShapeSpec::Disc { center, radius } => SmoothPiece::disc(&p.label, p.coord - 1, center, radius),
            };
            piece.scale = p.scale;
            pieces.push(piece);
        }
        PiecewiseDomain::new(n, pieces, BoundingBox { lo, hi })
    }

    pub fn function(&self) -> bcurrent::Result<Function> {
        Function::parse(&self.function, self.domain.dim)
    }

    pub fn forms(&self) -> bcurrent::Result<Vec<Form>> {
        build_forms(&self.forms, self.domain.dim)
    }

    pub fn weinstock_forms(&self) -> bcurrent::Result<Vec<Form>> {
        if self.weinstock.forms.is_empty() {
            self.forms()
        } else {
            build_forms(&self.weinstock.forms, self.domain.dim)
        }
    }

    pub fn schedule(&self) -> Schedule {
        Schedule { eps0: self.schedule.eps0, ratio: self.schedule.ratio, steps: self.schedule.steps }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        let q = &self.quadrature;
        QuadratureSpec {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_subdivisions: q.max_subdivisions,
            corner_refine_depth: q.corner_refine_depth,
        }
    }

    pub fn cover_options(&self) -> CoverOptions {
        let c = &self.cover;
        CoverOptions { radius: c.radius, tilt: c.tilt, sectors_per_circle: c.sectors_per_circle, overlap: c.overlap }
    }
}

fn build_forms(specs: &[FormSpec], dim: usize) -> bcurrent::Result<Vec<Form>> {
    specs
        .iter()
        .map(|f| {
            let cutoff = match &f.cutoff {
                None => Cutoff::None,
                Some(c) => {
                    if c.center.len() != dim {
                        return Err(Error::Unsupported(format!("cutoff centre needs {dim} coordinates")));
                    }
                    let mut center = [C::new(0.0, 0.0); 2];
                    for (k, p) in c.center.iter().enumerate() {
                        center[k] = C::new(p[0], p[1]);
                    }
                    Cutoff::radial(center, c.inner, c.outer)
                }
            };
            let coeffs: Vec<&str> = f.coefficients.iter().map(String::as_str).collect();
            TestForm::parse(dim, &coeffs, cutoff)
        })
        .collect()
}

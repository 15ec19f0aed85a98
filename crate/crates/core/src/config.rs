//! Serde types for the plain-text (JSON) run configuration.
//!
//! Fields are optional at the parse level so that missing-field errors can
//! name the offending key; validation happens in the consuming modules.

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub group: Option<GroupConfig>,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n: Option<usize>,
    pub a: Option<f64>,
    pub alpha: Option<f64>,
    pub b: Option<f64>,
    pub gamma: Option<f64>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub l_sat: Option<f64>,
    /// `piecewise_linear_saturation` (default) or `pure_linear`.
    pub nonlinearity: Option<String>,
    /// Replace the printed saturation with a continuous clamp for simulation.
    pub continuous_saturation: Option<bool>,
    pub coupling: Option<CouplingConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CouplingConfig {
    /// Inline n-by-n matrix.
    Matrix { matrix: Vec<Vec<f64>> },
    /// Weighted adjacency lists (the cube example's three graphs).
    Adjacency {
        edges: WeightedEdges,
        #[serde(default)]
        face_diagonals: Option<WeightedEdges>,
        #[serde(default)]
        space_diagonals: Option<WeightedEdges>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedEdges {
    pub weight: f64,
    /// 1-based vertex pairs.
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GroupConfig {
    /// `"bundled:S4"` selects the built-in cube group and character table.
    Bundled(String),
    Custom {
        generators: Vec<String>,
        degree: Option<usize>,
        character_table: TableConfig,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    /// Class representatives in cycle notation, e.g. `"(1243)(5687)"`.
    pub classes: Vec<String>,
    /// Character rows; entries are numbers or fraction strings like `"1/2"`.
    pub rows: Vec<Vec<TableEntry>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TableEntry {
    Number(f64),
    Fraction(String),
}

impl TableEntry {
    pub fn value(&self) -> Result<f64, String> {
        match self {
            TableEntry::Number(v) => Ok(*v),
            TableEntry::Fraction(s) => {
                let t = s.trim();
                if let Some((num, den)) = t.split_once('/') {
                    let n: f64 =
                        num.trim().parse().map_err(|_| format!("bad fraction `{s}`"))?;
                    let d: f64 =
                        den.trim().parse().map_err(|_| format!("bad fraction `{s}`"))?;
                    if d == 0.0 {
                        return Err(format!("zero denominator in `{s}`"));
                    }
                    Ok(n / d)
                } else {
                    t.parse().map_err(|_| format!("bad numeric entry `{s}`"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub beta_min: f64,
    pub beta_max: f64,
    /// Grid density: step = (2 pi / tau2) / grid_divisions.
    pub grid_divisions: usize,
    /// Half-width of the exclusion window around zeros of sin(beta tau2).
    pub exclusion_half_width: f64,
    /// Bisection target for |beta - phi(beta)|.
    pub refine_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            beta_min: 1e-4,
            beta_max: 1.0,
            grid_divisions: 200,
            exclusion_half_width: 1e-9,
            refine_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    /// Bifurcation parameter for this run; falls back to `system.alpha`.
    pub alpha: Option<f64>,
    pub epsilon: f64,
    /// Isotypic component carrying the initial perturbation.
    pub component: usize,
    /// Which basis column of that component to perturb along.
    pub basis_vector: usize,
    /// `isotypic` (default) or `random`.
    pub perturbation: String,
    /// Retained window length in predicted periods; an equal transient is
    /// prepended, so the horizon is twice this unless `t_end` is set.
    pub horizon_periods: f64,
    pub t_end: Option<f64>,
    pub dt: f64,
    pub dt_out: f64,
    pub quadrature_neutral: usize,
    pub quadrature_retarded: usize,
    pub seed: Option<u64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            epsilon: 1e-2,
            component: 0,
            basis_vector: 0,
            perturbation: "isotypic".into(),
            horizon_periods: 40.0,
            t_end: None,
            dt: 5e-3,
            dt_out: 0.5,
            quadrature_neutral: 50,
            quadrature_retarded: 50,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub alphas: Option<Vec<f64>>,
    pub range: Option<SweepRange>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepConfig {
    pub fn grid(&self) -> Vec<f64> {
        if let Some(alphas) = &self.alphas {
            return alphas.clone();
        }
        if let Some(r) = &self.range {
            if r.count == 0 {
                return Vec::new();
            }
            if r.count == 1 {
                return vec![r.start];
            }
            let step = (r.stop - r.start) / (r.count - 1) as f64;
            return (0..r.count).map(|i| r.start + step * i as f64).collect();
        }
        Vec::new()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<String>,
    /// `csv` (default) or `binary` for trajectories.
    pub trajectory_format: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, trajectory_format: "csv".into() }
    }
}

//! Scenario description shared by the experiments and the command line.

use std::f64::consts::TAU;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::geometry::{BoundaryRegion, Domain, DomainPreset, GeometryError, MetricField, RegionLabel};
use crate::rayflow::RayTolerances;
use crate::sgcc::SamplingSpec;
use crate::sources::TimeProfile;
use crate::wavesim::Resolution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Preset(DomainPreset),
    /// Closed polygon read from a file of `x y` lines.
    Polyline {
        polyline: PathBuf,
    },
}

impl DomainSpec {
    pub fn preset(&self) -> Option<&DomainPreset> {
        match self {
            DomainSpec::Preset(p) => Some(p),
            DomainSpec::Polyline { .. } => None,
        }
    }

    pub fn build(&self) -> Result<Domain, GeometryError> {
        match self {
            DomainSpec::Preset(p) => p.build(),
            DomainSpec::Polyline { polyline } => {
                let text = std::fs::read_to_string(polyline)
                    .map_err(|e| GeometryError::InvalidCurve(format!("{}: {e}", polyline.display())))?;
                let points = Domain::parse_polyline(&text)?;
                Domain::from_polyline("polyline", &points)
            }
        }
    }
}

/// Arcs of one boundary curve, by polar angle (radians) or by arc length.
/// With neither list the arc is the whole curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ArcSpec {
    pub curve: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub angles: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arc_length: Vec<[f64; 2]>,
}

impl ArcSpec {
    pub fn full(curve: usize) -> Self {
        ArcSpec {
            curve,
            angles: Vec::new(),
            arc_length: Vec::new(),
        }
    }

    pub fn build(&self, label: RegionLabel, domain: &Domain) -> Result<BoundaryRegion, GeometryError> {
        if self.curve >= domain.curves().len() {
            return Err(GeometryError::InvalidCurve(format!(
                "{label} region names curve {} but the domain has {}",
                self.curve,
                domain.curves().len()
            )));
        }
        let l = domain.curve(self.curve).length();
        let mut iv: Vec<(f64, f64)> = self.arc_length.iter().map(|&[a, b]| (a, b)).collect();
        iv.extend(self.angles.iter().map(|&[a, b]| (l * a / TAU, l * b / TAU)));
        if iv.is_empty() {
            BoundaryRegion::full(label, domain, self.curve)
        } else {
            BoundaryRegion::new(label, domain, self.curve, &iv)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RegionsSpec {
    /// Support of the source.
    pub source: ArcSpec,
    /// Relative dilation of the source arcs giving the ray-launch neighborhood.
    #[serde(default = "default_margin")]
    pub neighborhood_margin: f64,
    pub measurement: ArcSpec,
}

fn default_margin() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TimesSpec {
    /// Source window `M`.
    pub source_window: f64,
    /// Observation time `T` past the source window; also the ray time cap.
    pub observation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct GridSpec {
    pub resolution: Resolution,
    pub cfl: f64,
    /// Solver points per dominant wavelength required by the resolution gate.
    pub points_per_wavelength: f64,
    /// Source samples per solver node along the source curve.
    pub source_oversampling: usize,
    /// Source samples per dominant period in time.
    pub source_time_points: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            resolution: Resolution::Spacing(0.04),
            cfl: 0.8,
            points_per_wavelength: 10.0,
            source_oversampling: 2,
            source_time_points: 40.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AdmissibleFamilySpec {
    pub profiles: Vec<TimeProfile>,
    /// Band limit in `xi`; a quarter of the profile's dominant frequency when absent.
    pub kappa: Option<f64>,
    /// Ramp of the spatial window, relative to each arc.
    pub window_ramp: f64,
    /// Rerun each source on the refined grid.
    pub refine: bool,
}

impl Default for AdmissibleFamilySpec {
    fn default() -> Self {
        let sine = |f0: f64, cycles: f64, start: f64| TimeProfile::WindowedSine { f0, cycles, start };
        AdmissibleFamilySpec {
            profiles: vec![
                sine(0.5, 1.5, 0.5),
                sine(0.6, 2.0, 0.2),
                sine(0.7, 2.0, 0.5),
                sine(0.8, 3.0, 0.0),
                sine(0.8, 2.0, 1.0),
                sine(0.9, 3.0, 0.5),
                sine(1.0, 2.0, 1.5),
                sine(1.0, 3.5, 0.2),
            ],
            kappa: None,
            window_ramp: 0.2,
            refine: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct InvisibleFamilySpec {
    pub base: [f64; 2],
    pub cone: f64,
    pub taper: f64,
    pub exponent: f64,
    pub ks: Vec<f64>,
    pub profile: TimeProfile,
    pub window_ramp: f64,
    pub leak_tolerance: f64,
}

impl Default for InvisibleFamilySpec {
    fn default() -> Self {
        InvisibleFamilySpec {
            base: [0.8, 2.0],
            cone: 0.8,
            taper: 0.1,
            exponent: -0.5,
            ks: vec![4.0, 8.0, 16.0, 32.0],
            profile: TimeProfile::Bump {
                start: 0.0,
                length: 4.0,
            },
            window_ramp: 0.2,
            leak_tolerance: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct GlancingFamilySpec {
    pub xi0: f64,
    pub rate: f64,
    /// Pairs `(j, k)`: member index and frequency.
    pub members: Vec<(u32, f64)>,
    pub exponent: f64,
    pub profile: TimeProfile,
    pub window_ramp: f64,
    pub leak_tolerance: f64,
}

impl Default for GlancingFamilySpec {
    fn default() -> Self {
        GlancingFamilySpec {
            xi0: 2.0,
            rate: 0.2,
            members: vec![(1, 4.0), (2, 8.0), (3, 16.0), (4, 32.0)],
            exponent: -0.5,
            profile: TimeProfile::Bump {
                start: 0.0,
                length: 4.0,
            },
            window_ramp: 0.2,
            leak_tolerance: 0.01,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SourceSection {
    pub admissible: AdmissibleFamilySpec,
    pub invisible: InvisibleFamilySpec,
    pub glancing: Option<GlancingFamilySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ToleranceSpec {
    pub rays: RayTolerances,
    pub sampling: SamplingSpec,
    pub concavity_samples: usize,
    pub concavity_threshold: f64,
    /// Largest spectral share allowed in the outer quarter band of a source.
    pub band: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec {
            rays: RayTolerances::default(),
            sampling: SamplingSpec::default(),
            concavity_samples: 64,
            concavity_threshold: 1e-6,
            band: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct OutputSpec {
    pub figures: bool,
    pub format: OutputFormat,
    /// Field snapshot times written by `wave`.
    pub snapshots: Vec<f64>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            figures: true,
            format: OutputFormat::Json,
            snapshots: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    /// Seed of the optional random ray samples.
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainSpec,
    #[serde(default)]
    pub metric: MetricField,
    pub regions: RegionsSpec,
    pub times: TimesSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub source: SourceSection,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Scenario {
    /// Inner radius 1, outer radius 2, source on the whole inner circle,
    /// measurement on the whole outer circle.
    pub fn annulus() -> Self {
        Scenario {
            name: "annulus".into(),
            seed: 0,
            domain: DomainSpec::Preset(DomainPreset::Annulus { inner: 1.0, outer: 2.0 }),
            metric: MetricField::Identity,
            regions: RegionsSpec {
                source: ArcSpec::full(0),
                neighborhood_margin: default_margin(),
                measurement: ArcSpec::full(1),
            },
            times: TimesSpec {
                source_window: 4.0,
                observation: 2.0,
            },
            grid: GridSpec::default(),
            source: SourceSection {
                glancing: Some(GlancingFamilySpec::default()),
                ..Default::default()
            },
            tolerances: ToleranceSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

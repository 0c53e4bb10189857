//! Family name and parameter flags, turned into a [`FieldSpec`].

use clap::Args;
use unitfield::charts::{Ambient, ChartId, ChartPoint};
use unitfield::fieldlab::FieldSpec;

use crate::Usage;

pub const FAMILY_HELP: &str = "\
Families and their parameters (defaults in brackets):
  euclid-radial-line   --t [0]            u = θ + t, v = π/2; excludes the z-axis
  euclid-radial-point  --t [0]            u = θ + t, v = φ; excludes the origin
  euclid-pendulum      --p [0] --q        u = θ + p, v = 2 atan(q r / 2)
  euclid-frame         --index 1|2|3      constant frame field of R³
  horo-frame           --index 1|2|3      frame field z∂ᵢ of the half-space
  horo-invariant       --u0 [0]           u ≡ u0 (v = π/2 on H³)
  horo-theta           --sign [1]         ±(−y, x)/r on H³; excludes the z-axis
  horo-holomorphic     --k --a-re [1] --a-im [0]
                                          u = arg(i k ζ + α), ζ = x + i y
  horo-pq              --p [0] --q [0]    u = p z² + q
  h-parallel                              ξ₃ = z∂z on H³
--rotate t applies the circle action u ↦ u + t to any family except ξ₃.
Points are given as --point c1,c2,c3 in --chart (cartesian, cylindrical,
spherical, halfspace, ball-polar); the default chart is cartesian for R³
and halfspace for H³.";

#[derive(Args, Debug, Clone, Default)]
pub struct FamilyArgs {
    /// Family name (see below).
    #[arg(long)]
    pub family: String,
    /// Phase of the radial families.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Phase `p` (euclid-pendulum) or coefficient of z² (horo-pq).
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    /// Initial slope (euclid-pendulum) or constant term (horo-pq).
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Frame index.
    #[arg(long)]
    pub index: Option<u8>,
    /// Constant angle of horo-invariant.
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<f64>,
    /// Sign of horo-theta, 1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<i8>,
    /// Rotation rate of horo-holomorphic.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Real part of α for horo-holomorphic.
    #[arg(long = "a-re", allow_hyphen_values = true)]
    pub a_re: Option<f64>,
    /// Imaginary part of α for horo-holomorphic.
    #[arg(long = "a-im", allow_hyphen_values = true)]
    pub a_im: Option<f64>,
    /// Circle-action phase applied after construction.
    #[arg(long, allow_hyphen_values = true)]
    pub rotate: Option<f64>,
}

impl FamilyArgs {
    fn given(&self) -> Vec<&'static str> {
        let mut v = vec![];
        let flags: [(&'static str, bool); 9] = [
            ("t", self.t.is_some()),
            ("p", self.p.is_some()),
            ("q", self.q.is_some()),
            ("index", self.index.is_some()),
            ("u0", self.u0.is_some()),
            ("sign", self.sign.is_some()),
            ("k", self.k.is_some()),
            ("a-re", self.a_re.is_some()),
            ("a-im", self.a_im.is_some()),
        ];
        for (name, set) in flags {
            if set {
                v.push(name);
            }
        }
        v
    }

    /// Build the field, rejecting unknown families and stray or missing
    /// parameters before anything is computed.
    pub fn spec(&self) -> Result<FieldSpec, Usage> {
        let allowed: &[&str] = match self.family.as_str() {
            "euclid-radial-line" | "euclid-radial-point" => &["t"],
            "euclid-pendulum" | "horo-pq" => &["p", "q"],
            "euclid-frame" | "horo-frame" => &["index"],
            "horo-invariant" => &["u0"],
            "horo-theta" => &["sign"],
            "horo-holomorphic" => &["k", "a-re", "a-im"],
            "h-parallel" => &[],
            other => return Err(Usage(format!("unknown family '{other}'"))),
        };
        if let Some(bad) = self.given().into_iter().find(|g| !allowed.contains(g)) {
            return Err(Usage(format!("--{bad} is not a parameter of {}", self.family)));
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Usage(format!("{} requires --{name}", self.family)))
        };
        for (name, v) in [
            ("t", self.t),
            ("p", self.p),
            ("q", self.q),
            ("u0", self.u0),
            ("k", self.k),
            ("a-re", self.a_re),
            ("a-im", self.a_im),
            ("rotate", self.rotate),
        ] {
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(Usage(format!("--{name} must be finite, got {x}")));
                }
            }
        }
        let spec = match self.family.as_str() {
            "euclid-radial-line" => FieldSpec::EuclidRadialLine { t: self.t.unwrap_or(0.0) },
            "euclid-radial-point" => FieldSpec::EuclidRadialPoint { t: self.t.unwrap_or(0.0) },
            "euclid-pendulum" => FieldSpec::EuclidPendulum {
                p: self.p.unwrap_or(0.0),
                q: need(self.q, "q")?,
            },
            "euclid-frame" | "horo-frame" => {
                let index = self.index.ok_or_else(|| Usage(format!("{} requires --index", self.family)))?;
                if !(1..=3).contains(&index) {
                    return Err(Usage(format!("--index must be 1, 2 or 3, got {index}")));
                }
                let ambient = if self.family == "euclid-frame" {
                    Ambient::Euclidean
                } else {
                    Ambient::Hyperbolic
                };
                FieldSpec::Frame { index, ambient }
            }
            "horo-invariant" => FieldSpec::HoroInvariant { u0: self.u0.unwrap_or(0.0) },
            "horo-theta" => {
                let sign = self.sign.unwrap_or(1);
                if sign != 1 && sign != -1 {
                    return Err(Usage(format!("--sign must be 1 or -1, got {sign}")));
                }
                FieldSpec::HoroTheta { sign }
            }
            "horo-holomorphic" => {
                FieldSpec::horo_holomorphic(need(self.k, "k")?, self.a_re.unwrap_or(1.0), self.a_im.unwrap_or(0.0))
                    .map_err(|e| Usage(e.to_string()))?
            }
            "horo-pq" => FieldSpec::HoroPq {
                p: self.p.unwrap_or(0.0),
                q: self.q.unwrap_or(0.0),
            },
            _ => FieldSpec::HParallel,
        };
        match self.rotate {
            Some(t) => spec.circle_action(t).map_err(|e| Usage(e.to_string())),
            None => Ok(spec),
        }
    }
}

/// `c1,c2,c3`.
pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse::<f64>().map_err(|e| format!("'{p}': {e}"))?;
        if !o.is_finite() {
            return Err(format!("'{p}' is not finite"));
        }
    }
    Ok(out)
}

pub fn parse_chart(s: &str) -> Result<ChartId, String> {
    ChartId::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ChartId::ALL.iter().map(|c| c.name()).collect();
        format!("unknown chart '{s}', expected one of {}", names.join(", "))
    })
}

/// Point in `chart`, or in the field's frame chart when none is given.
pub fn point(spec: &FieldSpec, chart: Option<ChartId>, coords: [f64; 3]) -> Result<ChartPoint, Usage> {
    let chart = chart.unwrap_or_else(|| spec.ambient().frame_chart());
    if chart.ambient() != spec.ambient() {
        return Err(Usage(format!(
            "chart {chart} belongs to {:?} space but the field lives in {:?} space",
            chart.ambient(),
            spec.ambient()
        )));
    }
    ChartPoint::new(chart, coords[0], coords[1], coords[2]).map_err(|e| Usage(e.to_string()))
}

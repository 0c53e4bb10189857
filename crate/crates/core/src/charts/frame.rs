//! Frame connection tables and covariant calculus of vector fields.
//!
//! Vector fields are given by their components against the ambient frame.
//! Derivatives are taken along frame directions with metric step `h`:
//! in the half-space model `ξᵢ a ≈ (a(x + h z eᵢ) − a(x − h z eᵢ)) / 2h`.

use super::{Ambient, ChartId, ChartPoint, FrameVector};
use crate::error::{Error, Result};

/// A vector field given by frame components.
pub trait FrameField: Sync {
    fn ambient(&self) -> Ambient;

    /// Components at `p`; `p` may be in any chart of the ambient space.
    fn frame_components(&self, p: &ChartPoint) -> Result<FrameVector>;
}

/// Adapter turning a closure of frame-chart coordinates into a [`FrameField`].
pub struct FnField<F> {
    ambient: Ambient,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn([f64; 3]) -> FrameVector + Sync,
{
    pub fn new(ambient: Ambient, f: F) -> Self {
        FnField { ambient, f }
    }
}

impl<F> FrameField for FnField<F>
where
    F: Fn([f64; 3]) -> FrameVector + Sync,
{
    fn ambient(&self) -> Ambient {
        self.ambient
    }

    fn frame_components(&self, p: &ChartPoint) -> Result<FrameVector> {
        let q = p.to_chart(self.ambient.frame_chart())?;
        Ok((self.f)(q.coords()))
    }
}

/// `∇_{ξᵢ} ξⱼ` for the ambient frame; entries are constant in frame components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionTable {
    entries: [[FrameVector; 3]; 3],
}

impl ConnectionTable {
    pub fn for_ambient(ambient: Ambient) -> Self {
        let mut entries = [[FrameVector::ZERO; 3]; 3];
        if ambient == Ambient::Hyperbolic {
            entries[0][0] = FrameVector::E3;
            entries[1][1] = FrameVector::E3;
            entries[0][2] = -FrameVector::E1;
            entries[1][2] = -FrameVector::E2;
        }
        ConnectionTable { entries }
    }

    /// `∇_{ξᵢ} ξⱼ`, zero-based indices.
    pub fn get(&self, i: usize, j: usize) -> FrameVector {
        self.entries[i][j]
    }

    /// `∇_{ξᵢ}` of a field whose components have directional derivatives `d_i`.
    fn apply(&self, i: usize, components: FrameVector, d_i: FrameVector) -> FrameVector {
        d_i + (0..3).map(|k| components.0[k] * self.entries[i][k]).sum()
    }
}

/// Components, first frame derivatives `ξᵢ a` and pure second frame
/// derivatives `ξᵢ ξᵢ a` of a vector field at a point.
#[derive(Clone, Copy, Debug)]
pub struct FrameJet {
    pub ambient: Ambient,
    pub value: FrameVector,
    pub d1: [FrameVector; 3],
    pub d2: [FrameVector; 3],
}

fn stencil_point(field_ambient: Ambient, p: &ChartPoint) -> Result<(ChartPoint, f64)> {
    if p.ambient() != field_ambient {
        return Err(Error::AmbientMismatch {
            field: field_ambient,
            point: p.ambient(),
        });
    }
    let q = p.to_chart(field_ambient.frame_chart())?;
    let scale = match field_ambient {
        Ambient::Euclidean => 1.0,
        Ambient::Hyperbolic => q.coords()[2],
    };
    Ok((q, scale))
}

pub fn frame_jet<F: FrameField + ?Sized>(field: &F, p: &ChartPoint, h: f64) -> Result<FrameJet> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let ambient = field.ambient();
    let (q, scale) = stencil_point(ambient, p)?;
    let chart = q.chart();
    let eval = |x: [f64; 3]| -> Result<FrameVector> {
        let pt = ChartPoint::new(chart, x[0], x[1], x[2])?;
        field.frame_components(&pt)
    };
    let x0 = q.coords();
    let value = eval(x0)?;
    let step = h * scale;
    let mut d1 = [FrameVector::ZERO; 3];
    let mut d2 = [FrameVector::ZERO; 3];
    for i in 0..3 {
        let mut xp = x0;
        let mut xm = x0;
        xp[i] += step;
        xm[i] -= step;
        let (ap, am) = (eval(xp)?, eval(xm)?);
        // metric-step differences: ξᵢ a and z²∂ᵢ²a
        d1[i] = (0.5 / h) * (ap - am);
        d2[i] = (1.0 / (h * h)) * (ap - 2.0 * value + am);
    }
    if ambient == Ambient::Hyperbolic {
        // ξ₃ξ₃ a = z²a_zz + z a_z
        d2[2] = d2[2] + d1[2];
    }
    let jet = FrameJet {
        ambient,
        value,
        d1,
        d2,
    };
    if !value.is_finite() || d1.iter().chain(&d2).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("field derivatives at {x0:?}")));
    }
    Ok(jet)
}

impl FrameJet {
    /// `∇_{ξᵢ} σ`, zero-based `i`.
    pub fn covariant(&self, i: usize) -> FrameVector {
        ConnectionTable::for_ambient(self.ambient).apply(i, self.value, self.d1[i])
    }

    /// `∇_X σ` for a direction given by frame components.
    pub fn along(&self, x: FrameVector) -> FrameVector {
        (0..3).map(|i| x.0[i] * self.covariant(i)).sum()
    }

    /// `∇*∇σ = −Σᵢ (∇_{ξᵢ}∇_{ξᵢ}σ − ∇_{∇_{ξᵢ}ξᵢ}σ)`.
    pub fn rough_laplacian(&self) -> FrameVector {
        let table = ConnectionTable::for_ambient(self.ambient);
        let mut acc = FrameVector::ZERO;
        for i in 0..3 {
            let w = self.covariant(i);
            // ξᵢ of the components of w: the table entries are constant
            let dw: FrameVector = self.d2[i] + (0..3).map(|k| self.d1[i].0[k] * table.get(i, k)).sum();
            let second = table.apply(i, w, dw);
            let correction = self.along(table.get(i, i));
            acc = acc + (second - correction);
        }
        -acc
    }

    /// `|∇σ|² = Σᵢ |∇_{ξᵢ}σ|²`.
    pub fn bending(&self) -> f64 {
        (0..3).map(|i| self.covariant(i).norm_squared()).sum()
    }

    /// `div σ = Σᵢ ⟨∇_{ξᵢ}σ, ξᵢ⟩`.
    pub fn divergence(&self) -> f64 {
        (0..3).map(|i| self.covariant(i).0[i]).sum()
    }
}

/// `∇_{ξᵢ}σ` with `i ∈ {1, 2, 3}`.
pub fn frame_covariant_derivative<F: FrameField + ?Sized>(
    i: usize,
    field: &F,
    p: &ChartPoint,
    h: f64,
) -> Result<FrameVector> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidArgument(format!("frame index must be 1, 2 or 3, got {i}")));
    }
    Ok(frame_jet(field, p, h)?.covariant(i - 1))
}

/// `∇_X σ`.
pub fn covariant_derivative_along<F: FrameField + ?Sized>(
    x: FrameVector,
    field: &F,
    p: &ChartPoint,
    h: f64,
) -> Result<FrameVector> {
    Ok(frame_jet(field, p, h)?.along(x))
}

/// Finite-difference approximation of `∇*∇σ`, error `O(h²)`.
pub fn rough_laplacian<F: FrameField + ?Sized>(field: &F, p: &ChartPoint, h: f64) -> Result<FrameVector> {
    Ok(frame_jet(field, p, h)?.rough_laplacian())
}

/// `Σᵢ |∇_{ξᵢ}σ|²` from finite differences.
pub fn bending_fd<F: FrameField + ?Sized>(field: &F, p: &ChartPoint, h: f64) -> Result<f64> {
    Ok(frame_jet(field, p, h)?.bending())
}

pub fn divergence<F: FrameField + ?Sized>(field: &F, p: &ChartPoint, h: f64) -> Result<f64> {
    Ok(frame_jet(field, p, h)?.divergence())
}

/// Value, frame gradient `(ξᵢ f)` and Laplacian of a scalar given on the
/// frame chart (Cartesian or half-space), using metric steps.
pub fn frame_scalar_jet<F>(
    f: &F,
    ambient: Ambient,
    p: &ChartPoint,
    h: f64,
    angle: bool,
) -> Result<super::ScalarJet>
where
    F: Fn([f64; 3]) -> f64 + ?Sized,
{
    let (q, _) = stencil_point(ambient, p)?;
    debug_assert!(matches!(
        q.chart(),
        ChartId::EuclideanCartesian | ChartId::HyperbolicHalfSpace
    ));
    super::calculus::scalar_jet(f, &q, h, angle)
}

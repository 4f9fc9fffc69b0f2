//! Time-integrated interface flux of the HFVS scheme.
//!
//! The flux at a face is Taylor-expanded in time. Each split part
//! `F^± = A^± W` has time derivatives `A^± (-A)^k d^kW/dx^k`, so the exact
//! time integral over a step is
//!
//! ```text
//! dt F(0+) + sum_{k=1..N} [A+_L (-A_L)^k g_k^L + A-_R (-A_R)^k g_k^R] dt^{k+1} / ((k+1)! dx^k)
//! ```
//!
//! where `g_k` are the scaled `k`-th derivatives of the left/right cell
//! polynomials at the face. The products `A^± (-A)^k` are evaluated in the
//! eigenbasis as `R diag(lambda^± (-lambda)^k) L`. `F(0+)` is the leading
//! term: Steger-Warming or HLLC.

pub mod hllc;

use std::fmt;
use std::str::FromStr;

use crate::error::{HfvsError, Result};
use crate::physics::{Axis, ConservedVector, EigenSystem, Part, Physics};
use crate::reconstruction::{CellExpansion, Face};

/// First-order flux used as the `tau = 0+` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LeadingTermKind {
    #[default]
    StegerWarming,
    Hllc,
}

/// State at which `A` and `A^±` of the derivative terms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum JacobianEval {
    /// One-sided face limits: left limit for `A^+`, right limit for `A^-`.
    #[default]
    InterfaceLimit,
    /// Cell averages of the two cells sharing the face.
    CellAverage,
}

impl LeadingTermKind {
    pub const ALL: [LeadingTermKind; 2] = [LeadingTermKind::StegerWarming, LeadingTermKind::Hllc];

    pub fn name(self) -> &'static str {
        match self {
            LeadingTermKind::StegerWarming => "steger-warming",
            LeadingTermKind::Hllc => "hllc",
        }
    }
}

impl JacobianEval {
    pub const ALL: [JacobianEval; 2] = [JacobianEval::InterfaceLimit, JacobianEval::CellAverage];

    pub fn name(self) -> &'static str {
        match self {
            JacobianEval::InterfaceLimit => "interface-limit",
            JacobianEval::CellAverage => "cell-average",
        }
    }
}

macro_rules! named_enum {
    ($ty:ty, $what:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = HfvsError;

            fn from_str(s: &str) -> Result<Self> {
                <$ty>::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
                    let names: Vec<_> = <$ty>::ALL.iter().map(|v| v.name()).collect();
                    HfvsError::InvalidParameter(format!(
                        concat!("unknown ", $what, " `{}`, expected one of {}"),
                        s,
                        names.join(", ")
                    ))
                })
            }
        }
    };
}

named_enum!(LeadingTermKind, "leading term");
named_enum!(JacobianEval, "jacobian evaluation");

/// The two cell expansions meeting at face `j + 1/2`.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceData<'a, const M: usize> {
    /// Cell `j`.
    pub left: &'a CellExpansion<M>,
    /// Cell `j + 1`.
    pub right: &'a CellExpansion<M>,
    pub dx: f64,
    pub axis: Axis,
}

impl<'a, const M: usize> InterfaceData<'a, M> {
    /// `W_{j+1/2}^-`.
    pub fn left_limit(&self) -> &ConservedVector<M> {
        self.left.limit(Face::Right)
    }

    /// `W_{j+1/2}^+`.
    pub fn right_limit(&self) -> &ConservedVector<M> {
        self.right.limit(Face::Left)
    }
}

/// `\int_0^dt F_{j+1/2}(tau) dtau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeIntegratedFlux<const M: usize> {
    pub value: ConservedVector<M>,
}

pub fn leading_flux<P: Physics<M>, const M: usize>(
    physics: &P,
    iface: &InterfaceData<'_, M>,
    kind: LeadingTermKind,
) -> Result<ConservedVector<M>> {
    let (wl, wr) = (iface.left_limit(), iface.right_limit());
    match kind {
        LeadingTermKind::StegerWarming => {
            let eig_l = physics.eigensystem(wl, iface.axis)?;
            let eig_r = physics.eigensystem(wr, iface.axis)?;
            Ok(eig_l.apply_split(Part::Plus, wl) + eig_r.apply_split(Part::Minus, wr))
        }
        LeadingTermKind::Hllc => {
            physics.check(wl)?;
            physics.check(wr)?;
            physics.hllc_flux(wl, wr, iface.axis)
        }
    }
}

/// `dt^{k+1} / ((k+1)! dx^k)` for `k = 1..=4`.
fn time_weights(dt: f64, dx: f64) -> [f64; 4] {
    let ratio = dt / dx;
    let mut out = [0.0; 4];
    let mut w = dt;
    for (k, slot) in out.iter_mut().enumerate() {
        w *= ratio / (k as f64 + 2.0);
        *slot = w;
    }
    out
}

/// One upwind side of the time-integrated flux, in the eigenbasis of `eig`:
/// `A^± (dt w + sum_k (-A)^k g_k weight_k)`, where `w` is the optional
/// leading-term state and `g_k` are the face derivatives of `cell`.
fn split_side<const M: usize>(
    eig: &EigenSystem<M>,
    part: Part,
    leading: Option<&ConservedVector<M>>,
    cell: &CellExpansion<M>,
    face: Face,
    dt: f64,
    weights: &[f64; 4],
) -> ConservedVector<M> {
    let terms = if cell.is_constant() { 0 } else { cell.derivative_terms() };
    if terms == 0 && leading.is_none() {
        return ConservedVector::<M>::zeros();
    }
    let g = cell.face_derivatives(face);
    // Only characteristic fields moving toward the face contribute.
    let mut out = ConservedVector::<M>::zeros();
    for i in 0..M {
        let lambda = eig.eigenvalues[i];
        let split = part.select(lambda);
        if split == 0.0 {
            continue;
        }
        let project = |v: &ConservedVector<M>| (0..M).map(|j| eig.left[(i, j)] * v[j]).sum::<f64>();
        let mut acc = match leading {
            Some(w) => dt * project(w),
            None => 0.0,
        };
        let mut power = 1.0;
        for k in 0..terms {
            power *= -lambda;
            acc += power * weights[k] * project(&g[k]);
        }
        let scale = split * acc;
        for m in 0..M {
            out[m] += eig.right[(m, i)] * scale;
        }
    }
    out
}

/// The `k >= 1` part of the time-integrated flux.
pub fn derivative_flux<P: Physics<M>, const M: usize>(
    physics: &P,
    iface: &InterfaceData<'_, M>,
    dt: f64,
    eval: JacobianEval,
) -> Result<ConservedVector<M>> {
    let (state_l, state_r) = match eval {
        JacobianEval::InterfaceLimit => (iface.left_limit(), iface.right_limit()),
        JacobianEval::CellAverage => (&iface.left.mean, &iface.right.mean),
    };
    let eig_l = physics.eigensystem(state_l, iface.axis)?;
    let eig_r = physics.eigensystem(state_r, iface.axis)?;
    Ok(sides(&eig_l, &eig_r, iface, dt, false))
}

fn sides<const M: usize>(
    eig_l: &EigenSystem<M>,
    eig_r: &EigenSystem<M>,
    iface: &InterfaceData<'_, M>,
    dt: f64,
    with_leading: bool,
) -> ConservedVector<M> {
    let weights = time_weights(dt, iface.dx);
    let (wl, wr) = (iface.left_limit(), iface.right_limit());
    let lead = |w| if with_leading { Some(w) } else { None };
    split_side(eig_l, Part::Plus, lead(wl), iface.left, Face::Right, dt, &weights)
        + split_side(eig_r, Part::Minus, lead(wr), iface.right, Face::Left, dt, &weights)
}

/// Leading term times `dt` plus the exactly integrated derivative terms.
pub fn hfvs_time_integrated_flux<P: Physics<M>, const M: usize>(
    physics: &P,
    iface: &InterfaceData<'_, M>,
    dt: f64,
    kind: LeadingTermKind,
    eval: JacobianEval,
) -> Result<TimeIntegratedFlux<M>> {
    let (wl, wr) = (iface.left_limit(), iface.right_limit());
    let eig_l = physics.eigensystem(wl, iface.axis)?;
    let eig_r = physics.eigensystem(wr, iface.axis)?;
    let value = match (kind, eval) {
        // Leading term and derivative terms share one characteristic sum.
        (LeadingTermKind::StegerWarming, JacobianEval::InterfaceLimit) => {
            sides(&eig_l, &eig_r, iface, dt, true)
        }
        (kind, eval) => {
            let leading = match kind {
                LeadingTermKind::StegerWarming => {
                    eig_l.apply_split(Part::Plus, wl) + eig_r.apply_split(Part::Minus, wr)
                }
                LeadingTermKind::Hllc => physics.hllc_flux(wl, wr, iface.axis)?,
            };
            let higher = match eval {
                JacobianEval::InterfaceLimit => sides(&eig_l, &eig_r, iface, dt, false),
                JacobianEval::CellAverage => {
                    let avg_l = physics.eigensystem(&iface.left.mean, iface.axis)?;
                    let avg_r = physics.eigensystem(&iface.right.mean, iface.axis)?;
                    sides(&avg_l, &avg_r, iface, dt, false)
                }
            };
            leading * dt + higher
        }
    };
    Ok(TimeIntegratedFlux { value })
}

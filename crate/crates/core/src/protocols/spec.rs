use std::fmt;
use std::str::FromStr;

use super::squeezing::squeezing_angle_about;
use crate::spin::{inverse_steps, Axis, Sign, Step};
use crate::{Error, Result};

/// Readout families.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    /// `U₂ = 1`.
    Trivial,
    /// `U₂ = U₁^dag`.
    Echo,
    /// `U₂ = U₁`.
    PseudoEcho,
    /// `U₂ = U_OAT(t₂)^dag` with its own twisting strength.
    Asymmetric,
    /// `U₂ = U_OAT(t₂)`.
    PseudoForward,
    /// `U₂ = U_OAT(π/2)`.
    GhzReadout,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 6] = [
        ProtocolKind::Trivial,
        ProtocolKind::Echo,
        ProtocolKind::PseudoEcho,
        ProtocolKind::Asymmetric,
        ProtocolKind::PseudoForward,
        ProtocolKind::GhzReadout,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Trivial => "trivial",
            ProtocolKind::Echo => "echo",
            ProtocolKind::PseudoEcho => "pseudo-echo",
            ProtocolKind::Asymmetric => "asymmetric",
            ProtocolKind::PseudoForward => "pseudo-forward",
            ProtocolKind::GhzReadout => "ghz-readout",
        }
    }

    /// Small integer code used in numeric tables.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn needs_second_strength(self) -> bool {
        matches!(self, ProtocolKind::Asymmetric | ProtocolKind::PseudoForward)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match t.as_str() {
            "trivial" | "none" | "no-readout" => ProtocolKind::Trivial,
            "echo" => ProtocolKind::Echo,
            "pseudo-echo" | "pseudoecho" => ProtocolKind::PseudoEcho,
            "asymmetric" | "asymmetric-reversed" => ProtocolKind::Asymmetric,
            "pseudo-forward" => ProtocolKind::PseudoForward,
            "ghz-readout" | "ghz" => ProtocolKind::GhzReadout,
            _ => return Err(Error::param("kind", format!("unknown protocol kind `{s}`"))),
        })
    }
}

/// How the measurement basis is chosen.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BasisChoice {
    /// Discovered from the parity conditions; evaluation fails if none fits.
    Auto,
    /// The parity basis when one exists, otherwise whichever collective axis
    /// basis gives the largest `max_φ F_C` at the compile-time noise level.
    Best,
    Axis(Axis),
}

impl fmt::Display for BasisChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisChoice::Auto => f.write_str("auto"),
            BasisChoice::Best => f.write_str("best"),
            BasisChoice::Axis(a) => write!(f, "{a}"),
        }
    }
}

/// A declarative interferometer `U₂ exp(-iφG) U₁ |ψ₀>` with `|ψ₀>` a
/// coherent state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec {
    pub n_particles: usize,
    pub initial_axis: Axis,
    pub initial_sign: Sign,
    pub u1_steps: Vec<Step>,
    pub generator: Axis,
    /// Empty means `U₂ = 1`.
    pub u2_steps: Vec<Step>,
    pub measurement_basis: BasisChoice,
    pub signal: Option<Axis>,
}

impl ProtocolSpec {
    /// A bare interferometer on `|x+>` with `G = Jy` and automatic basis.
    pub fn new(n_particles: usize) -> Self {
        Self {
            n_particles,
            initial_axis: Axis::X,
            initial_sign: Sign::Plus,
            u1_steps: Vec::new(),
            generator: Axis::Y,
            u2_steps: Vec::new(),
            measurement_basis: BasisChoice::Auto,
            signal: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::TooFewParticles { min: 1, found: 0 });
        }
        crate::spin::dynamics::check_steps(&self.u1_steps)?;
        crate::spin::dynamics::check_steps(&self.u2_steps)
    }
}

/// Coherent-state axis from which twisting for `χt = π/2` reaches a cat
/// state along `y`, the direction `Jy` resolves: `y` for even `N`, `x` for
/// odd `N`.
pub fn ghz_capable_axis(n: usize) -> Axis {
    if n.is_multiple_of(2) {
        Axis::Y
    } else {
        Axis::X
    }
}

/// `[oat(χt), rotate(axis, θ(N, χt))]`, empty for `χt = 0` and without the
/// rotation when `θ = 0`.
pub fn squeezing_steps(n: usize, chi_t: f64, axis: Axis) -> Result<Vec<Step>> {
    let theta = squeezing_angle_about(n, chi_t, axis, Sign::Plus)?;
    let mut steps = Vec::with_capacity(2);
    if chi_t != 0.0 {
        steps.push(Step::Oat { chi_t });
    }
    if theta != 0.0 {
        steps.push(Step::Rotate { axis, angle: theta });
    }
    Ok(steps)
}

/// Stock protocol on `|x+>` with entangler strength `chi_t1`. `chi_t2` is the
/// readout strength for [`ProtocolKind::Asymmetric`] and
/// [`ProtocolKind::PseudoForward`] and ignored otherwise.
pub fn build_protocol(kind: ProtocolKind, n: usize, chi_t1: f64, chi_t2: Option<f64>) -> Result<ProtocolSpec> {
    build_protocol_on(kind, n, chi_t1, chi_t2, Axis::X)
}

/// [`build_protocol`] starting from the coherent state along `+initial`;
/// squeezing rotations are about the same axis.
pub fn build_protocol_on(
    kind: ProtocolKind,
    n: usize,
    chi_t1: f64,
    chi_t2: Option<f64>,
    initial: Axis,
) -> Result<ProtocolSpec> {
    if n == 0 {
        return Err(Error::TooFewParticles { min: 1, found: 0 });
    }
    check_strength("chi_t1", chi_t1)?;
    let u1_steps = squeezing_steps(n, chi_t1, initial)?;
    let second = || -> Result<f64> {
        let t2 = chi_t2.ok_or_else(|| Error::param("chi_t2", format!("required for the {kind} protocol")))?;
        check_strength("chi_t2", t2)?;
        Ok(t2)
    };
    let u2_steps = match kind {
        ProtocolKind::Trivial => Vec::new(),
        ProtocolKind::Echo => inverse_steps(&u1_steps),
        ProtocolKind::PseudoEcho => u1_steps.clone(),
        ProtocolKind::Asymmetric => inverse_steps(&squeezing_steps(n, second()?, initial)?),
        ProtocolKind::PseudoForward => squeezing_steps(n, second()?, initial)?,
        ProtocolKind::GhzReadout => squeezing_steps(n, std::f64::consts::FRAC_PI_2, initial)?,
    };
    Ok(ProtocolSpec { initial_axis: initial, u1_steps, u2_steps, ..ProtocolSpec::new(n) })
}

/// GHZ-state protocol: twisting by `π/2` from the GHZ-capable axis, with the
/// readout of `kind`. The basis is [`BasisChoice::Best`], since the cat is not
/// a parity eigenstate and the trivial readout has no parity basis.
pub fn build_ghz_protocol(kind: ProtocolKind, n: usize) -> Result<ProtocolSpec> {
    if n < 2 {
        return Err(Error::TooFewParticles { min: 2, found: n });
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    let spec = build_protocol_on(kind, n, half_pi, Some(half_pi), ghz_capable_axis(n))?;
    Ok(ProtocolSpec { measurement_basis: BasisChoice::Best, ..spec })
}

fn check_strength(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("twisting strength must be finite and >= 0, got {v}")))
    }
}

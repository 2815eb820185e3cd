use std::fmt;
use std::str::FromStr;

use crate::approximator::PsiNorm;
use crate::error::Error;

/// Convergence class of the design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Timing {
    FiniteTime,
    FixedTime,
}

/// How the neural term enters the control and learning laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeuralForm {
    /// `λ/(2a²)·L̂·ψᵀψ` with `L̂` estimating `‖l‖²` (Methods 1 and 4).
    SquaredNorm,
    /// `N̂·ψ_h·tanh(ψ_hλ/η_θ)` with `ψ_h = ‖ψ‖ + 1` (Methods 2 and 5).
    NormPlusEps,
    /// `N̂·ψ_h·tanh(ψ_hλ/η_θ)` with `ψ_h = ‖ψ‖` (Methods 3 and 6).
    Norm,
}

impl NeuralForm {
    pub fn psi_norm(self) -> Option<PsiNorm> {
        match self {
            NeuralForm::SquaredNorm => None,
            NeuralForm::NormPlusEps => Some(PsiNorm::NormPlusOne),
            NeuralForm::Norm => Some(PsiNorm::Norm),
        }
    }
}

/// One neural estimate per subsystem, or a single shared one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sharing {
    PerSubsystem,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ControllerVariant {
    pub timing: Timing,
    pub neural_form: NeuralForm,
    pub sharing: Sharing,
}

impl ControllerVariant {
    pub const fn new(timing: Timing, neural_form: NeuralForm, sharing: Sharing) -> Self {
        Self { timing, neural_form, sharing }
    }

    /// All twelve designs, finite-time first.
    pub fn all() -> [ControllerVariant; 12] {
        let mut out = [ControllerVariant::new(Timing::FiniteTime, NeuralForm::SquaredNorm, Sharing::PerSubsystem); 12];
        let mut k = 0;
        for timing in [Timing::FiniteTime, Timing::FixedTime] {
            for sharing in [Sharing::PerSubsystem, Sharing::Single] {
                for form in [NeuralForm::SquaredNorm, NeuralForm::NormPlusEps, NeuralForm::Norm] {
                    out[k] = ControllerVariant::new(timing, form, sharing);
                    k += 1;
                }
            }
        }
        out
    }

    /// Method number 1..=6.
    pub fn method(&self) -> u8 {
        let base = match self.neural_form {
            NeuralForm::SquaredNorm => 1,
            NeuralForm::NormPlusEps => 2,
            NeuralForm::Norm => 3,
        };
        match self.timing {
            Timing::FiniteTime => base,
            Timing::FixedTime => base + 3,
        }
    }

    pub fn is_shared(&self) -> bool {
        self.sharing == Sharing::Single
    }

    /// Short CLI name such as `fnt-m1` or `fxt-m6s`.
    pub fn name(&self) -> String {
        let t = match self.timing {
            Timing::FiniteTime => "fnt",
            Timing::FixedTime => "fxt",
        };
        let s = if self.is_shared() { "s" } else { "" };
        format!("{t}-m{}{s}", self.method())
    }

    /// Human label, e.g. `Method 4-single`.
    pub fn label(&self) -> String {
        let s = if self.is_shared() { "-single" } else { "" };
        format!("Method {}{s}", self.method())
    }
}

impl fmt::Display for ControllerVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ControllerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.trim().to_ascii_lowercase();
        ControllerVariant::all()
            .into_iter()
            .find(|v| v.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown variant `{}` (expected fnt-m1 .. fxt-m6s)", s.trim())))
    }
}

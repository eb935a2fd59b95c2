use crate::error::{Error, Result};

/// Photon counts of one readout together with the contrast model `(x₀, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutRecord {
    /// Signal counts `s ≥ 0`.
    pub signal: f64,
    /// Reference counts `r > 0`.
    pub reference: f64,
    /// Contrast baseline `x₀` from the Rabi fit.
    pub x0: f64,
    /// Contrast amplitude `a` from the Rabi fit.
    pub a: f64,
}

impl ReadoutRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.reference > 0.0 && self.reference.is_finite()) {
            return Err(Error::invalid("reference", "counts must be positive"));
        }
        if !(self.signal >= 0.0 && self.signal.is_finite()) {
            return Err(Error::invalid("signal", "counts must be non-negative"));
        }
        if !(self.a != 0.0 && self.a.is_finite() && self.x0.is_finite()) {
            return Err(Error::invalid("contrast", "a must be non-zero and x0 finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedReadout {
    /// `⟨σ_z⟩` estimate in `[−1, 1]`.
    pub sigma_z: f64,
    /// Set when the raw value fell outside `[−1, 1]`.
    pub clipped: bool,
}

/// `x = (s − r)/r`, `x_n = (x − x₀)/(2a) + 1/2`, `y_n = 2x_n − 1`.
pub fn normalize_readout(rec: &ReadoutRecord) -> Result<NormalizedReadout> {
    rec.validate()?;
    let x = (rec.signal - rec.reference) / rec.reference;
    let xn = (x - rec.x0) / (2.0 * rec.a) + 0.5;
    let y = 2.0 * xn - 1.0;
    Ok(NormalizedReadout {
        sigma_z: y.clamp(-1.0, 1.0),
        clipped: !(-1.0..=1.0).contains(&y),
    })
}

/// Noise-free counts that normalize back to `sigma_z`.
pub fn synthesize_readout(sigma_z: f64, reference: f64, x0: f64, a: f64) -> ReadoutRecord {
    let x = x0 + a * sigma_z;
    ReadoutRecord {
        signal: reference * (1.0 + x),
        reference,
        x0,
        a,
    }
}

//! Rectifier parameters, Taylor coefficients and the stacked waveform
//! precoder layout shared by every optimizer.

use cx_linalg::{vnorm_sq, Complex64};

use crate::error::RectennaError;

/// Physical diode/antenna parameters of the rectifier front end.
///
/// Defaults: 50 ohm antenna, ideality factor 1, room-temperature thermal
/// voltage 25.85 mV. The saturation current is carried for completeness
/// but does not enter the Taylor coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectifierParams {
    /// Antenna resistance in ohms.
    pub r_ant: f64,
    /// Diode ideality factor (dimensionless).
    pub n_i: f64,
    /// Thermal voltage in volts.
    pub v_t: f64,
    /// Saturation current in amperes.
    pub i_s: f64,
}

impl Default for RectifierParams {
    fn default() -> Self {
        Self {
            r_ant: 50.0,
            n_i: 1.0,
            v_t: 25.85e-3,
            i_s: 5e-6,
        }
    }
}

impl RectifierParams {
    pub fn validate(&self) -> Result<(), RectennaError> {
        if !(self.r_ant > 0.0) {
            return Err(RectennaError::InvalidParams("r_ant must be positive"));
        }
        if !(self.n_i > 0.0) {
            return Err(RectennaError::InvalidParams("n_i must be positive"));
        }
        if !(self.v_t > 0.0) {
            return Err(RectennaError::InvalidParams("v_t must be positive"));
        }
        Ok(())
    }
}

/// 2nd- and 4th-order Taylor coefficients of the diode transfer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaCoefficients {
    pub beta2: f64,
    pub beta4: f64,
}

/// beta2 = r_ant / (2 n_i v_t), beta4 = r_ant^2 / (24 n_i^3 v_t^3).
pub fn beta_coefficients(params: &RectifierParams) -> Result<BetaCoefficients, RectennaError> {
    params.validate()?;
    let beta2 = params.r_ant / (2.0 * params.n_i * params.v_t);
    let beta4 = params.r_ant * params.r_ant / (24.0 * params.n_i.powi(3) * params.v_t.powi(3));
    Ok(BetaCoefficients { beta2, beta4 })
}

/// Stacked complex precoder `s` of length M*N, frequency-major: element
/// `(n-1)*M + m` drives antenna `m` at tone `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformPrecoder {
    m: usize,
    n: usize,
    entries: Vec<Complex64>,
    budget: Option<f64>,
}

impl WaveformPrecoder {
    pub fn new(m: usize, n: usize, entries: Vec<Complex64>) -> Result<Self, RectennaError> {
        if entries.len() != m * n {
            return Err(RectennaError::BadLayout {
                len: entries.len(),
                m,
                n,
            });
        }
        Ok(Self {
            m,
            n,
            entries,
            budget: None,
        })
    }

    /// Tag the precoder with a transmit power budget `P`; rejects
    /// precoders whose energy exceeds it beyond rounding slack.
    pub fn with_budget(mut self, p: f64) -> Result<Self, RectennaError> {
        let norm_sq = self.norm_sq();
        if norm_sq > p + 1e-9 {
            return Err(RectennaError::BudgetExceeded {
                norm_sq,
                budget: p,
            });
        }
        self.budget = Some(p);
        Ok(self)
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            entries: vec![Complex64::new(0.0, 0.0); m * n],
            budget: None,
        }
    }

    pub fn antennas(&self) -> usize {
        self.m
    }

    pub fn tones(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn budget(&self) -> Option<f64> {
        self.budget
    }

    /// Spatial block `s_n` for tone index `tone` (0-based).
    pub fn tone_block(&self, tone: usize) -> &[Complex64] {
        &self.entries[tone * self.m..(tone + 1) * self.m]
    }

    pub fn norm_sq(&self) -> f64 {
        vnorm_sq(&self.entries)
    }
}

/// Auxiliary trace variables `t_k = Tr{M_k X}`; `t[0]` is real
/// nonnegative for PSD `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxVars {
    t: Vec<Complex64>,
}

impl AuxVars {
    pub(crate) fn from_raw(mut t: Vec<Complex64>, tol: f64) -> Result<Self, RectennaError> {
        let residue = t[0].im.abs();
        let tolerance = tol * (1.0 + t[0].re.abs());
        if residue > tolerance {
            return Err(RectennaError::ImaginaryResidue { residue, tolerance });
        }
        t[0] = Complex64::new(t[0].re, 0.0);
        Ok(Self { t })
    }

    pub fn t0(&self) -> f64 {
        self.t[0].re
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

//! Moving-average kernels and their limiting residual tail dependence functions.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, param, precondition, Error, Result};
use crate::special::{ln_bessel_k, ln_gamma};

/// A kernel value that may be infinite at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelValue {
    Finite(f64),
    Infinite,
}

impl KernelValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            KernelValue::Finite(v) => Some(v),
            KernelValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, KernelValue::Infinite)
    }
}

/// A value from an unproven limit formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjectural(pub f64);

/// Piecewise-linear kernel through `(h_i, g_i)` with `h_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tabulated {
    pub h: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    MaternGreen { kappa: f64, alpha: f64, d: u8 },
    OuExponential { a: f64 },
    Custom(Tabulated),
}

/// An evaluable, strictly decreasing kernel `G(h)` on `h >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRecord", into = "KernelRecord")]
pub struct Kernel {
    kind: KernelKind,
    at_zero: KernelValue,
    convex: bool,
}

fn matern_ln_scale(kappa: f64, alpha: f64, d: u8) -> f64 {
    let nu = 0.5 * (alpha - d as f64);
    (1.0 - nu) * LN_2 - 0.5 * d as f64 * (4.0 * PI).ln() - ln_gamma(0.5 * alpha) - 2.0 * nu * kappa.ln()
}

fn check_matern(kappa: f64, alpha: f64, d: u8) -> Result<()> {
    if !(1..=3).contains(&d) {
        return Err(Error::Unsupported(format!("dimension {d}; only d = 1, 2, 3")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return param(format!("kappa must be positive, got {kappa}"));
    }
    if !alpha.is_finite() || alpha < d as f64 {
        return Err(Error::Unsupported(format!("alpha = {alpha} < d = {d} gives a negative smoothness")));
    }
    Ok(())
}

/// Matern Green's function of `(kappa^2 - Laplacian)^(alpha/2)` in `d` dimensions.
pub fn matern_green(kappa: f64, alpha: f64, d: u8, h: f64) -> Result<KernelValue> {
    check_matern(kappa, alpha, d)?;
    if !(h >= 0.0) {
        return domain(format!("distance must be non-negative, got {h}"));
    }
    let nu = 0.5 * (alpha - d as f64);
    let scale = matern_ln_scale(kappa, alpha, d);
    if h == 0.0 {
        if nu == 0.0 {
            return Ok(KernelValue::Infinite);
        }
        // (x^nu K_nu(x)) -> 2^(nu-1) Gamma(nu) as x -> 0.
        return Ok(KernelValue::Finite((scale + (nu - 1.0) * LN_2 + ln_gamma(nu)).exp()));
    }
    let x = kappa * h;
    let ln_xk = if nu == 0.0 { ln_bessel_k(0.0, x) } else { nu * x.ln() + ln_bessel_k(nu, x) };
    Ok(KernelValue::Finite((scale + ln_xk).exp()))
}

/// `exp(-a h)`.
pub fn ou_kernel(a: f64, h: f64) -> f64 {
    (-a * h).exp()
}

/// Limiting `eta(h)` of an Ornstein-Uhlenbeck process with exponential-tailed driving noise.
pub fn ou_eta(a: f64, h: f64) -> f64 {
    1.0 / (2.0 - (-a * h.abs()).exp())
}

/// `eta(h)` of the Gaussian Ornstein-Uhlenbeck process.
pub fn gaussian_ou_eta(a: f64, h: f64) -> f64 {
    0.5 * (1.0 + (-a * h.abs()).exp())
}

impl Kernel {
    pub fn matern(kappa: f64, alpha: f64, d: u8) -> Result<Self> {
        check_matern(kappa, alpha, d)?;
        let at_zero = matern_green(kappa, alpha, d, 0.0)?;
        // x^nu K_nu(x) has second derivative x^(nu-1) (x K_nu - (2nu-1) K_(nu-1)),
        // non-negative everywhere iff nu <= 1/2; for d = 2 this is alpha <= 3.
        let nu = 0.5 * (alpha - d as f64);
        Ok(Self { kind: KernelKind::MaternGreen { kappa, alpha, d }, at_zero, convex: nu <= 0.5 })
    }

    pub fn ou(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return param(format!("OU rate must be positive, got {a}"));
        }
        Ok(Self { kind: KernelKind::OuExponential { a }, at_zero: KernelValue::Finite(1.0), convex: true })
    }

    /// Tabulated kernel; declared convexity is checked on the slopes.
    pub fn custom(table: Tabulated, convex: bool) -> Result<Self> {
        let (h, g) = (&table.h, &table.g);
        if h.len() < 2 || h.len() != g.len() {
            return param("tabulated kernel needs at least two matching (h, g) points");
        }
        if h[0] != 0.0 {
            return param("tabulated kernel must start at h = 0");
        }
        if h.windows(2).any(|w| !(w[1] > w[0])) || h.iter().any(|v| !v.is_finite()) {
            return param("tabulated distances must be finite and strictly increasing");
        }
        if g.windows(2).any(|w| !(w[1] < w[0])) || g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return param("tabulated kernel must be finite, non-negative and strictly decreasing");
        }
        if convex {
            let slopes: Vec<f64> = (0..h.len() - 1).map(|i| (g[i + 1] - g[i]) / (h[i + 1] - h[i])).collect();
            if let Some(w) = slopes.windows(2).find(|w| w[1] - w[0] < -1e-8) {
                return param(format!("tabulated kernel declared convex but slope falls from {} to {}", w[0], w[1]));
            }
        }
        let at_zero = KernelValue::Finite(g[0]);
        Ok(Self { kind: KernelKind::Custom(table), at_zero, convex })
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn at_zero(&self) -> KernelValue {
        self.at_zero
    }

    pub fn convex(&self) -> bool {
        self.convex
    }

    /// `G(h)`; `h = 0` returns the value at the origin.
    pub fn value(&self, h: f64) -> Result<KernelValue> {
        if !(h >= 0.0) {
            return domain(format!("distance must be non-negative, got {h}"));
        }
        match &self.kind {
            KernelKind::MaternGreen { kappa, alpha, d } => matern_green(*kappa, *alpha, *d, h),
            KernelKind::OuExponential { a } => Ok(KernelValue::Finite(ou_kernel(*a, h))),
            KernelKind::Custom(t) => {
                let last = *t.h.last().expect("validated table");
                if h > last {
                    return domain(format!("distance {h} beyond tabulated range {last}"));
                }
                let i = t.h.partition_point(|&x| x <= h).saturating_sub(1).min(t.h.len() - 2);
                let w = (h - t.h[i]) / (t.h[i + 1] - t.h[i]);
                Ok(KernelValue::Finite(t.g[i] + w * (t.g[i + 1] - t.g[i])))
            }
        }
    }

    /// `G(h)` for `h > 0`, or at the origin when finite.
    pub fn eval(&self, h: f64) -> Result<f64> {
        self.value(h)?.finite().ok_or_else(|| Error::Domain("kernel is infinite at h = 0".into()))
    }

    /// `G(h) / G(0)`, zero for `h > 0` when `G(0)` is infinite.
    pub fn ratio(&self, h: f64) -> Result<f64> {
        match self.at_zero {
            KernelValue::Finite(g0) => Ok(self.eval(h)? / g0),
            KernelValue::Infinite if h > 0.0 => {
                self.eval(h)?;
                Ok(0.0)
            }
            KernelValue::Infinite => Ok(1.0),
        }
    }
}

/// Limiting `eta(h)` for a symmetric convex kernel: `1/2 + G(h) / (2 G(0))`.
pub fn limit_eta_symmetric(kernel: &Kernel, h: f64) -> Result<f64> {
    if !kernel.convex() {
        return precondition("kernel is not convex; use limit_eta_conjecture");
    }
    Ok(0.5 + 0.5 * kernel.ratio(h)?)
}

/// Conjectured limit for general kernels: `max(1/2 + G(h)/(2G(0)), G(h/2)/G(0))`.
pub fn limit_eta_conjecture(kernel: &Kernel, h: f64) -> Result<Conjectural> {
    let sym = 0.5 + 0.5 * kernel.ratio(h)?;
    let half = kernel.ratio(0.5 * h)?;
    Ok(Conjectural(sym.max(half)))
}

/// Limiting `eta(h)` for a one-sided kernel: `1 / (2 - G(h)/G(0))`.
pub fn limit_eta_onesided(kernel: &Kernel, h: f64) -> Result<f64> {
    if kernel.at_zero().is_infinite() {
        return Err(Error::Unsupported("one-sided limit needs a finite G(0)".into()));
    }
    Ok(1.0 / (2.0 - kernel.ratio(h)?))
}

/// JSON form `{kind, kappa, alpha, d, a}` (custom kernels add `h`, `g`, `convex`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convex: Option<bool>,
}

impl TryFrom<KernelRecord> for Kernel {
    type Error = Error;
    fn try_from(r: KernelRecord) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Parameter(format!("kernel record lacks {name}")));
        match r.kind.as_str() {
            "matern" => Kernel::matern(need(r.kappa, "kappa")?, need(r.alpha, "alpha")?, r.d.unwrap_or(2)),
            "ou" => Kernel::ou(need(r.a, "a")?),
            "custom" => {
                let (Some(h), Some(g)) = (r.h, r.g) else {
                    return param("custom kernel record needs h and g");
                };
                Kernel::custom(Tabulated { h, g }, r.convex.unwrap_or(false))
            }
            other => param(format!("unknown kernel kind {other:?}")),
        }
    }
}

impl From<Kernel> for KernelRecord {
    fn from(k: Kernel) -> Self {
        let mut r = KernelRecord {
            kind: String::new(),
            kappa: None,
            alpha: None,
            d: None,
            a: None,
            h: None,
            g: None,
            convex: None,
        };
        match k.kind {
            KernelKind::MaternGreen { kappa, alpha, d } => {
                r.kind = "matern".into();
                r.kappa = Some(kappa);
                r.alpha = Some(alpha);
                r.d = Some(d);
            }
            KernelKind::OuExponential { a } => {
                r.kind = "ou".into();
                r.a = Some(a);
            }
            KernelKind::Custom(t) => {
                r.kind = "custom".into();
                r.h = Some(t.h);
                r.g = Some(t.g);
                r.convex = Some(k.convex);
            }
        }
        r
    }
}

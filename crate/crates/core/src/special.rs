//! Complete elliptic integral K, Jacobi elliptic functions and the three
//! explicit solution families of `-φ″ + ωφ - φ³ = 0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible modulus; closer to 1 the periods blow up and the
/// caller should use the sech family.
pub const K_MAX: f64 = 1.0 - 1e-12;

const LANDEN_DEPTH: usize = 16;
const LANDEN_TOL: f64 = 1e-14;

fn complementary(k: f64) -> f64 {
    ((1.0 - k) * (1.0 + k)).sqrt()
}

/// Complete elliptic integral of the first kind, `K(k) = π / (2 AGM(1, k'))`.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::ModulusOutOfRange { k, family: "elliptic K" });
    }
    let (mut a, mut b) = (1.0, complementary(k));
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(PI / (a + b))
}

/// Values of the three Jacobi functions at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// `sn`, `cn`, `dn` of `(x; k)` by the descending Landen (AGM) scheme.
pub fn jacobi(x: f64, k: f64) -> Result<Jacobi> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::ModulusOutOfRange { k, family: "Jacobi" });
    }
    let mut a = [0.0; LANDEN_DEPTH + 1];
    let mut c = [0.0; LANDEN_DEPTH + 1];
    a[0] = 1.0;
    c[0] = k;
    let mut b = complementary(k);
    let mut n = 0;
    while n < LANDEN_DEPTH && c[n].abs() >= LANDEN_TOL * a[n] {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    // reduce modulo the real period 4K to keep 2^n a_n x moderate
    let quarter = PI / (2.0 * a[n]);
    let x = x - (x / (4.0 * quarter)).round() * 4.0 * quarter;
    let mut phi = (1u64 << n) as f64 * a[n] * x;
    for m in (1..=n).rev() {
        phi = 0.5 * (phi + (c[m] / a[m] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // 1 - k² sn² written without cancellation
    let dn = ((1.0 - k) * (1.0 + k) + k * k * cn * cn).sqrt();
    Ok(Jacobi { sn, cn, dn })
}

/// The explicit solution families on an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProfileFamily {
    Dnoidal,
    Sech,
    Cnoidal,
}

impl ProfileFamily {
    pub fn name(self) -> &'static str {
        match self {
            ProfileFamily::Dnoidal => "dnoidal",
            ProfileFamily::Sech => "sech",
            ProfileFamily::Cnoidal => "cnoidal",
        }
    }
}

/// `Dnoidal`: `A dn(μx + a; k)` with `A = √(2ω/(2-k²))`, `μ = √(ω/(2-k²))`.
/// `Cnoidal`: `A cn(μx + a; k)` with `A = √(2ωk²/(2k²-1))`, `μ = √(ω/(2k²-1))`.
/// `Sech`: `√(2ω) sech(√ω x + b)`; `k` is unused and stored as 1.
///
/// `shift` is added to the scaled argument `μx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub family: ProfileFamily,
    pub omega: f64,
    pub k: f64,
    pub shift: f64,
}

impl ProfileSpec {
    pub fn dnoidal(omega: f64, k: f64, a: f64) -> Result<Self> {
        Self::validated(ProfileFamily::Dnoidal, omega, k, a)
    }

    pub fn cnoidal(omega: f64, k: f64, a: f64) -> Result<Self> {
        Self::validated(ProfileFamily::Cnoidal, omega, k, a)
    }

    pub fn sech(omega: f64, b: f64) -> Result<Self> {
        Self::validated(ProfileFamily::Sech, omega, 1.0, b)
    }

    fn validated(family: ProfileFamily, omega: f64, k: f64, shift: f64) -> Result<Self> {
        let s = Self { family, omega, k, shift };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega = {} must be positive", self.omega)));
        }
        if !self.shift.is_finite() {
            return Err(Error::InvalidParameter(format!("shift = {} must be finite", self.shift)));
        }
        let ok = match self.family {
            ProfileFamily::Dnoidal => (0.0..=K_MAX).contains(&self.k),
            ProfileFamily::Cnoidal => self.k > FRAC_1_SQRT_2 && self.k <= K_MAX,
            ProfileFamily::Sech => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ModulusOutOfRange { k: self.k, family: self.family.name() })
        }
    }

    /// Peak value of the profile over one period.
    pub fn amplitude(&self) -> f64 {
        let (w, k2) = (self.omega, self.k * self.k);
        match self.family {
            ProfileFamily::Dnoidal => (2.0 * w / (2.0 - k2)).sqrt(),
            ProfileFamily::Cnoidal => (2.0 * w * k2 / (2.0 * k2 - 1.0)).sqrt(),
            ProfileFamily::Sech => (2.0 * w).sqrt(),
        }
    }

    /// Scaling `μ` of the argument `μx + shift`.
    pub fn wavenumber(&self) -> f64 {
        let (w, k2) = (self.omega, self.k * self.k);
        match self.family {
            ProfileFamily::Dnoidal => (w / (2.0 - k2)).sqrt(),
            ProfileFamily::Cnoidal => (w / (2.0 * k2 - 1.0)).sqrt(),
            ProfileFamily::Sech => w.sqrt(),
        }
    }

    /// Spatial period: `2K/μ` (dnoidal), `4K/μ` (cnoidal), none for sech.
    pub fn period(&self) -> Option<f64> {
        let kk = elliptic_k(self.k).ok()?;
        match self.family {
            ProfileFamily::Dnoidal => Some(2.0 * kk / self.wavenumber()),
            ProfileFamily::Cnoidal => Some(4.0 * kk / self.wavenumber()),
            ProfileFamily::Sech => None,
        }
    }

    /// Value and derivative at `x`.
    pub fn value_and_derivative(&self, x: f64) -> (f64, f64) {
        let amp = self.amplitude();
        let mu = self.wavenumber();
        let z = mu * x + self.shift;
        match self.family {
            ProfileFamily::Sech => {
                let s = 1.0 / z.cosh();
                (amp * s, -amp * mu * s * z.tanh())
            }
            ProfileFamily::Dnoidal => {
                let j = jacobi(z, self.k).expect("validated modulus");
                (amp * j.dn, -amp * mu * self.k * self.k * j.sn * j.cn)
            }
            ProfileFamily::Cnoidal => {
                let j = jacobi(z, self.k).expect("validated modulus");
                (amp * j.cn, -amp * mu * j.sn * j.dn)
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_and_derivative(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.value_and_derivative(x).1
    }

    /// Constant value of `q² - p²(ω - p²/2)` along the profile.
    pub fn level(&self) -> f64 {
        let (w, k2) = (self.omega, self.k * self.k);
        match self.family {
            ProfileFamily::Dnoidal => -2.0 * w * w * (1.0 - k2) / ((2.0 - k2) * (2.0 - k2)),
            ProfileFamily::Cnoidal => {
                2.0 * w * w * k2 * (1.0 - k2) / ((2.0 * k2 - 1.0) * (2.0 * k2 - 1.0))
            }
            ProfileFamily::Sech => 0.0,
        }
    }
}

/// Checked evaluation of a profile.
pub fn evaluate_profile(spec: &ProfileSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    Ok(spec.value(x))
}

/// Family and modulus of the orbit on level `e` (`e > -ω²/2`), recovered in
/// closed form from the upper turning point `p₊`. Returns `Sech` with `k = 1`
/// on the separatrix.
pub fn family_for_level(omega: f64, e: f64) -> Result<(ProfileFamily, f64)> {
    let w2 = omega * omega;
    if e < -0.5 * w2 * (1.0 + 1e-12) {
        return Err(Error::EnergyBelowCenter(e));
    }
    if e == 0.0 {
        return Ok((ProfileFamily::Sech, 1.0));
    }
    let r = (1.0 + 2.0 * e / w2).max(0.0).sqrt();
    let p2 = omega * (1.0 + r);
    if e < 0.0 {
        // p₊² = 2ω/(2-k²)
        let k2 = (2.0 - 2.0 * omega / p2).max(0.0);
        Ok((ProfileFamily::Dnoidal, k2.sqrt()))
    } else {
        // p₊² = 2ωk²/(2k²-1)
        let k2 = p2 / (2.0 * (p2 - omega));
        Ok((ProfileFamily::Cnoidal, k2.sqrt()))
    }
}

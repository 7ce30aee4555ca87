use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    /// +1 for focusing (the upper sign of every ± in the equations), −1 otherwise.
    #[inline]
    pub fn s(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }

    pub fn parse(s: &str) -> Result<Sign> {
        match s.trim().to_ascii_lowercase().as_str() {
            "focusing" | "+" | "+1" => Ok(Sign::Focusing),
            "defocusing" | "-" | "-1" => Ok(Sign::Defocusing),
            other => Err(Error::config(format!("unknown sign `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub a: f64,
    pub gamma: f64,
    pub delta: f64,
    pub sign: Sign,
    pub t0: f64,
    pub t_max: f64,
}

impl Params {
    pub fn new(a: f64, gamma: f64, delta: f64, sign: Sign, t0: f64, t_max: f64) -> Result<Self> {
        let p = Params {
            a,
            gamma,
            delta,
            sign,
            t0,
            t_max,
        };
        p.validate()?;
        Ok(p)
    }

    /// Focusing defaults with γ = 0, δ = 0.1 on [1, t_max].
    pub fn focusing(a: f64, t_max: f64) -> Self {
        Params {
            a,
            gamma: 0.0,
            delta: 0.1,
            sign: Sign::Focusing,
            t0: 1.0,
            t_max,
        }
    }

    /// `a > 0` is required by the theory, but `a = 0` is accepted as the
    /// free-flow limit used throughout the tests.
    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::config(format!("a must be >= 0, got {}", self.a)));
        }
        if !(0.0..0.25).contains(&self.gamma) {
            return Err(Error::config(format!(
                "gamma must lie in [0, 1/4), got {}",
                self.gamma
            )));
        }
        if !(self.delta > 0.0 && self.gamma + self.delta < 0.25) {
            return Err(Error::config(format!(
                "need delta > 0 and gamma + delta < 1/4, got delta={}",
                self.delta
            )));
        }
        if !(self.t0 >= 1.0 && self.t0 < self.t_max) {
            return Err(Error::config(format!(
                "need 1 <= t0 < t_max, got t0={} t_max={}",
                self.t0, self.t_max
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.sign.s()
    }

    #[inline]
    pub fn a2(&self) -> f64 {
        self.a * self.a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_exponents() {
        assert!(Params::new(0.5, 0.25, 0.1, Sign::Focusing, 1.0, 10.0).is_err());
        assert!(Params::new(0.5, 0.2, 0.06, Sign::Focusing, 1.0, 10.0).is_err());
        assert!(Params::new(0.5, 0.0, 0.0, Sign::Focusing, 1.0, 10.0).is_err());
        assert!(Params::new(0.5, 0.0, 0.1, Sign::Focusing, 0.5, 10.0).is_err());
        assert!(Params::new(0.5, 0.1, 0.1, Sign::Defocusing, 1.0, 10.0).is_ok());
    }

    #[test]
    fn sign_parsing() {
        assert_eq!(Sign::parse("Focusing").unwrap(), Sign::Focusing);
        assert_eq!(Sign::parse("-1").unwrap().s(), -1.0);
        assert!(Sign::parse("sideways").is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::HarnessError;

pub const RECIPES: [&str; 10] = [
    "identity-sweep",
    "isoperimetry-small",
    "folner-wreath",
    "pruning-property",
    "spectral-bracket",
    "confinement",
    "nash-curve",
    "exponent-fit",
    "lemma45",
    "renorm-field",
];

/// Flat parameter file. Every key is optional; recipes fill in their own
/// defaults and reject keys they do not use.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub survival_r_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub survival_factor: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_scale: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_box: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_limit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope_high: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graphs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fact_n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma_n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_fraction: Option<f64>,
}

fn allowed_keys(recipe: &str) -> &'static [&'static str] {
    match recipe {
        "identity-sweep" => &["max_vertices", "alpha_list", "n_max", "tolerance"],
        "confinement" => &["seed", "d", "p", "box_radius", "seeds", "alpha_list", "n_list", "r_list", "samples", "sigma"],
        "spectral-bracket" => &["seed", "d", "p_list", "r_list", "seeds", "survival_r_list", "survival_factor", "tolerance"],
        "exponent-fit" => &["seed", "d", "alpha", "p_list", "n_list", "samples", "box_radius", "slope_low", "slope_high"],
        "isoperimetry-small" => &["seed", "d", "p", "n", "seeds", "cap", "c", "gamma", "oracle_box", "oracle_limit"],
        "folner-wreath" => &["k_list", "cap"],
        "pruning-property" => &["seed", "graphs", "families"],
        "nash-curve" => &[
            "d_list",
            "n",
            "scale",
            "c",
            "gamma",
            "t_max",
            "step",
            "rtol",
            "tolerance",
            "slope_tolerance",
            "fit_tolerance",
        ],
        "lemma45" => &["max_vertices", "alpha_list", "n_max", "fact_n_max", "lemma_n_max"],
        "renorm-field" => &["seed", "d", "p_list", "box_radius", "block_scale", "seeds", "good_fraction"],
        _ => &[],
    }
}

fn bad(msg: String) -> Result<(), HarnessError> {
    Err(HarnessError::Invalid(msg))
}

fn unit_interval(name: &str, v: f64, open_left: bool, open_right: bool) -> Result<(), HarnessError> {
    let lo_ok = if open_left { v > 0.0 } else { v >= 0.0 };
    let hi_ok = if open_right { v < 1.0 } else { v <= 1.0 };
    if lo_ok && hi_ok {
        Ok(())
    } else {
        bad(format!("{name} = {v} is out of range"))
    }
}

fn positive(name: &str, v: f64) -> Result<(), HarnessError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        bad(format!("{name} must be positive and finite, got {v}"))
    }
}

fn at_least(name: &str, v: usize, lo: usize) -> Result<(), HarnessError> {
    if v >= lo {
        Ok(())
    } else {
        bad(format!("{name} must be at least {lo}, got {v}"))
    }
}

fn at_most(name: &str, v: usize, hi: usize) -> Result<(), HarnessError> {
    if v <= hi {
        Ok(())
    } else {
        bad(format!("{name} must be at most {hi}, got {v}"))
    }
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<(), HarnessError> {
    if v.is_empty() {
        bad(format!("{name} must not be empty"))
    } else {
        Ok(())
    }
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    fn present_keys(&self) -> Vec<String> {
        let value = serde_json::to_value(self).expect("spec serializes");
        value.as_object().expect("object").keys().filter(|k| *k != "recipe").cloned().collect()
    }

    /// Rejects keys the recipe does not read and values outside the
    /// preconditions of the operations it calls.
    pub fn validate(&self, recipe: &str) -> Result<(), HarnessError> {
        let allowed = allowed_keys(recipe);
        for key in self.present_keys() {
            if !allowed.contains(&key.as_str()) {
                return bad(format!("`{key}` is not a parameter of {recipe}"));
            }
        }
        let lattice = !matches!(recipe, "nash-curve" | "identity-sweep" | "folner-wreath" | "pruning-property" | "lemma45");
        if let Some(d) = self.d {
            at_least("d", d, if lattice { 2 } else { 1 })?;
            at_most("d", d, if recipe == "isoperimetry-small" { 3 } else { 15 })?;
        }
        if let Some(list) = &self.d_list {
            nonempty("d_list", list)?;
            for &d in list {
                at_least("d_list", d, 1)?;
                at_most("d_list", d, 15)?;
            }
        }
        if let Some(p) = self.p {
            unit_interval("p", p, true, false)?;
        }
        if let Some(list) = &self.p_list {
            nonempty("p_list", list)?;
            for &p in list {
                // renormalization accepts the closed configuration
                unit_interval("p_list", p, recipe != "renorm-field", false)?;
            }
        }
        if let Some(a) = self.alpha {
            unit_interval("alpha", a, true, true)?;
        }
        if let Some(list) = &self.alpha_list {
            nonempty("alpha_list", list)?;
            for &a in list {
                unit_interval("alpha_list", a, true, true)?;
            }
        }
        for (name, list) in [("n_list", &self.n_list), ("r_list", &self.r_list), ("survival_r_list", &self.survival_r_list)] {
            if let Some(list) = list {
                nonempty(name, list)?;
                for &v in list {
                    at_least(name, v, 1)?;
                }
            }
        }
        if let Some(list) = &self.k_list {
            nonempty("k_list", list)?;
            for &k in list {
                positive("k_list", k)?;
            }
        }
        for (name, v) in [
            ("seeds", self.seeds),
            ("samples", self.samples),
            ("graphs", self.graphs),
            ("families", self.families),
            ("survival_factor", self.survival_factor),
            ("n", self.n),
            ("cap", self.cap),
            ("box_radius", self.box_radius),
        ] {
            if let Some(v) = v {
                at_least(name, v, 1)?;
            }
        }
        for (name, v) in [
            ("c", self.c),
            ("gamma", self.gamma),
            ("scale", self.scale),
            ("t_max", self.t_max),
            ("step", self.step),
            ("rtol", self.rtol),
            ("tolerance", self.tolerance),
            ("slope_tolerance", self.slope_tolerance),
            ("fit_tolerance", self.fit_tolerance),
            ("sigma", self.sigma),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        if let Some(cap) = self.cap {
            at_most("cap", cap, 128)?;
        }
        if let Some(m) = self.max_vertices {
            at_least("max_vertices", m, 2)?;
            at_most("max_vertices", m, 7)?;
        }
        for (name, v, hi) in [("n_max", self.n_max, 6), ("fact_n_max", self.fact_n_max, 6), ("lemma_n_max", self.lemma_n_max, 5)] {
            if let Some(v) = v {
                at_least(name, v, 1)?;
                at_most(name, v, hi)?;
            }
        }
        if let Some(b) = self.block_scale {
            at_least("block_scale", b, 4)?;
        }
        if let Some(b) = self.oracle_box {
            at_least("oracle_box", b, 1)?;
            at_most("oracle_box", b, 2)?;
        }
        if let Some(l) = self.oracle_limit {
            at_most("oracle_limit", l, 26)?;
        }
        if let Some(g) = self.good_fraction {
            unit_interval("good_fraction", g, false, false)?;
        }
        if let (Some(lo), Some(hi)) = (self.slope_low, self.slope_high) {
            if lo >= hi {
                return bad(format!("slope_low {lo} must be below slope_high {hi}"));
            }
        }
        if recipe == "isoperimetry-small" {
            if let (Some(n), Some(b)) = (self.n, self.oracle_box) {
                if b > n {
                    return bad("oracle_box must not exceed n".into());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_unknown_keys() {
        let spec = ExperimentSpec::from_toml("seed = 3\np_list = [0.7, 1.0]\n").unwrap();
        assert_eq!(spec.seed, Some(3));
        assert_eq!(ExperimentSpec::from_toml(&spec.to_toml()).unwrap(), spec);
        assert!(ExperimentSpec::from_toml("colour = 1").is_err());
        assert!(ExperimentSpec::from_toml("[section]\nseed = 1").is_err());
    }

    #[test]
    fn validation_is_recipe_aware() {
        let spec = ExperimentSpec { samples: Some(10), ..Default::default() };
        assert!(spec.validate("confinement").is_ok());
        assert!(spec.validate("folner-wreath").is_err());
        let spec = ExperimentSpec { p_list: Some(vec![0.0]), ..Default::default() };
        assert!(spec.validate("renorm-field").is_ok());
        assert!(spec.validate("spectral-bracket").is_err());
        let spec = ExperimentSpec { alpha: Some(1.0), ..Default::default() };
        assert!(spec.validate("exponent-fit").is_err());
    }
}

use serde::{Deserialize, Serialize};

/// The 20 learnable parameters of the noise model: 7 single-qubit,
/// 9 two-qubit and 4 correlated-readout coefficients.
///
/// Coherent amplitudes are dimensionless rotation rates per characteristic
/// gate time; they enter as `exp(-i (t_g / t_char) H)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub k_dep: f64,
    pub b_dep: f64,
    pub b_amp: f64,
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_z: f64,
    pub beta_1q: f64,

    pub k_dep_2q: f64,
    pub b_dep_2q: f64,
    pub b_amp_2q: f64,
    pub b_phi_2q: f64,
    pub theta_ix: f64,
    pub theta_zx: f64,
    pub theta_zz: f64,
    pub beta_2q: f64,
    pub k_zz: f64,

    pub ro_a_0011: f64,
    pub ro_b_0011: f64,
    pub ro_a_0110: f64,
    pub ro_b_0110: f64,
}

impl NoiseParams {
    pub const DIM: usize = 20;

    pub const NAMES: [&'static str; Self::DIM] = [
        "k_dep",
        "b_dep",
        "b_amp",
        "theta_x",
        "theta_y",
        "theta_z",
        "beta_1q",
        "k_dep_2q",
        "b_dep_2q",
        "b_amp_2q",
        "b_phi_2q",
        "theta_ix",
        "theta_zx",
        "theta_zz",
        "beta_2q",
        "k_zz",
        "ro_a_0011",
        "ro_b_0011",
        "ro_a_0110",
        "ro_b_0110",
    ];

    /// All rates and offsets zero, stretch exponents one: a model that adds
    /// only the bare relaxation implied by calibrated T1/T2.
    pub fn zero() -> Self {
        Self {
            beta_1q: 1.0,
            beta_2q: 1.0,
            ..Self::default()
        }
    }

    pub fn to_array(&self) -> [f64; Self::DIM] {
        [
            self.k_dep,
            self.b_dep,
            self.b_amp,
            self.theta_x,
            self.theta_y,
            self.theta_z,
            self.beta_1q,
            self.k_dep_2q,
            self.b_dep_2q,
            self.b_amp_2q,
            self.b_phi_2q,
            self.theta_ix,
            self.theta_zx,
            self.theta_zz,
            self.beta_2q,
            self.k_zz,
            self.ro_a_0011,
            self.ro_b_0011,
            self.ro_a_0110,
            self.ro_b_0110,
        ]
    }

    pub fn from_array(v: [f64; Self::DIM]) -> Self {
        Self {
            k_dep: v[0],
            b_dep: v[1],
            b_amp: v[2],
            theta_x: v[3],
            theta_y: v[4],
            theta_z: v[5],
            beta_1q: v[6],
            k_dep_2q: v[7],
            b_dep_2q: v[8],
            b_amp_2q: v[9],
            b_phi_2q: v[10],
            theta_ix: v[11],
            theta_zx: v[12],
            theta_zz: v[13],
            beta_2q: v[14],
            k_zz: v[15],
            ro_a_0011: v[16],
            ro_b_0011: v[17],
            ro_a_0110: v[18],
            ro_b_0110: v[19],
        }
    }

    /// Builds from a slice ordered like [`NoiseParams::NAMES`].
    pub fn from_slice(v: &[f64]) -> Option<Self> {
        let arr: [f64; Self::DIM] = v.try_into().ok()?;
        Some(Self::from_array(arr))
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let i = Self::NAMES.iter().position(|n| *n == name)?;
        Some(self.to_array()[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_twenty_named_fields() {
        let p = NoiseParams::zero();
        let json = serde_json::to_value(p).unwrap();
        let obj = json.as_object().unwrap();
        assert_eq!(obj.len(), 20);
        for name in NoiseParams::NAMES {
            assert!(obj.contains_key(name), "{name}");
        }
    }

    #[test]
    fn array_round_trip_follows_names() {
        let v: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let p = NoiseParams::from_slice(&v).unwrap();
        assert_eq!(p.to_array().to_vec(), v);
        for (i, name) in NoiseParams::NAMES.iter().enumerate() {
            assert_eq!(p.get(name), Some(v[i]));
        }
        let from_json: NoiseParams =
            serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(from_json, p);
    }

    #[test]
    fn json_is_order_insensitive_and_strict() {
        let mut fields: Vec<String> = NoiseParams::NAMES
            .iter()
            .rev()
            .map(|n| format!("\"{n}\": 0.25"))
            .collect();
        let p: NoiseParams = serde_json::from_str(&format!("{{{}}}", fields.join(","))).unwrap();
        assert_eq!(p.k_zz, 0.25);
        fields.pop();
        assert!(serde_json::from_str::<NoiseParams>(&format!("{{{}}}", fields.join(","))).is_err());
    }
}

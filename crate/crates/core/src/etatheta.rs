//! Eta-quotients, Δ, the theta series of `Q`, and their modular metadata.

mod eta;
mod theta;

use serde::Serialize;

pub use eta::{
    cusp_orders, delta_mod2, delta_series, eta_quotient_meta, eta_quotient_series, euler_product,
    CuspOrder, EtaMeta, EtaQuotient, Prefactor,
};
pub use theta::{
    automorphy_spot_check, theta_meta, theta_series, theta_series_naive, AutomorphyCheck,
    Gamma0Element, QuadForm,
};

/// How a form behaves at the cusps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Holomorphy {
    Cusp,
    Holomorphic,
    Weakly,
}

/// Weight, level and nebentypus of a modular object.
///
/// The weight is `weight_halves / 2`. The character is `n ↦ (D | n)` for
/// `D = character_disc`, with `D = 1` for the trivial character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormMeta {
    pub weight_halves: i64,
    pub level: u64,
    pub character_disc: i64,
    pub holomorphy: Holomorphy,
}

impl FormMeta {
    pub fn is_integral_weight(&self) -> bool {
        self.weight_halves % 2 == 0
    }

    /// Weight as a display string, e.g. `"12"` or `"-1/2"`.
    pub fn weight_string(&self) -> String {
        if self.is_integral_weight() {
            (self.weight_halves / 2).to_string()
        } else {
            format!("{}/2", self.weight_halves)
        }
    }

    pub fn character(&self, n: i64) -> i32 {
        crate::arith::kronecker(self.character_disc, n)
    }
}

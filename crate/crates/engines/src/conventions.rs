//! Switchable sign and prefactor conventions of the leading-order formulas.
//!
//! Each switch names a place where two readings of the formulas differ. The defaults are
//! the readings that agree with the exact moment engine; the alternatives stay available
//! so that the comparison can be rerun.

use serde::{Deserialize, Serialize};

/// Where the factor (−1)^{|L|} is attached in the q = 2 and q = 3 brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LSignPlacement {
    /// Only on the terms beyond the q = 1 block.
    SecondBlock,
    /// On every term of the bracket.
    WholeBrace,
    /// Nowhere.
    #[default]
    Omitted,
}

/// The linear factor, and its gate, of the sixth q = 3 family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum I6Variant {
    /// 1 + Σ over K₂ ∪ L₁, matching the fourth family plus one.
    Displayed,
    /// 1 + Σ over K₂ ∪ L₁ ∪ L₂, which makes the four single-factor families cancel
    /// whenever all four gates are open.
    #[default]
    WithL2,
}

/// Sign of the partition terms in the contour representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ContourSign {
    /// Every partition term carries (−1)^{|L|+|M|}.
    AsPrinted,
    /// Every partition term enters with sign +1.
    #[default]
    Unsigned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Conventions {
    pub l_sign: LSignPlacement,
    /// Multiply the third to sixth q = 3 families by 2.
    pub q3_factor_two: bool,
    pub i6_variant: I6Variant,
    pub contour_sign: ContourSign,
}

impl Default for Conventions {
    fn default() -> Self {
        Conventions {
            l_sign: LSignPlacement::Omitted,
            q3_factor_two: true,
            i6_variant: I6Variant::WithL2,
            contour_sign: ContourSign::Unsigned,
        }
    }
}

impl Conventions {
    pub fn describe(&self) -> Vec<String> {
        vec![
            format!("l_sign={:?}", self.l_sign),
            format!("q3_factor_two={}", self.q3_factor_two),
            format!("i6_variant={:?}", self.i6_variant),
            format!("contour_sign={:?}", self.contour_sign),
        ]
    }

    /// The factor applied to a term of layer `layer` (1, 2 or 3) whose L has `l_len` elements.
    pub fn l_factor(&self, layer: usize, l_len: usize) -> f64 {
        let odd = if l_len % 2 == 1 { -1.0 } else { 1.0 };
        match self.l_sign {
            LSignPlacement::Omitted => 1.0,
            LSignPlacement::WholeBrace => odd,
            LSignPlacement::SecondBlock => {
                if layer >= 2 {
                    odd
                } else {
                    1.0
                }
            }
        }
    }
}

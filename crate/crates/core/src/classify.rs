//! Photon-blockade and photon-induced-tunneling classification from
//! equal-time correlations, plus the two-time antibunching test.

use crate::correlations::CorrelationSet;

/// Equality tolerance around g(k) = 1 and g2 = g3 boundaries.
pub const TAU_EQ: f64 = 1e-9;

/// Default small-delay window for the two-time test: the first 5% of the
/// default grid, tau <= 0.4 / gamma.
pub const TAU_SMALL: f64 = 0.4;

/// The six orderings of {1, g2, g3} plus an explicit boundary label for
/// ties within [`TAU_EQ`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table2Case {
    /// 1 < g2 < g3: three-photon tunneling.
    ThreePt,
    /// 1 < g3 < g2: two-photon tunneling.
    TwoPt,
    /// g2 < 1 < g3: single-photon blockade, type 2.
    OnePbType2,
    /// g2 < g3 < 1: single-photon blockade, type 3.
    OnePbType3,
    /// g3 < 1 < g2: two-photon blockade with two-photon tunneling.
    TwoPbAndTwoPt,
    /// g3 < g2 < 1: single-photon blockade, type 1.
    OnePbType1,
    /// Some pair of {1, g2, g3} is equal within tolerance.
    Boundary,
}

impl Table2Case {
    pub fn as_str(&self) -> &'static str {
        match self {
            Table2Case::ThreePt => "3PT",
            Table2Case::TwoPt => "2PT",
            Table2Case::OnePbType2 => "1PB_type2",
            Table2Case::OnePbType3 => "1PB_type3",
            Table2Case::TwoPbAndTwoPt => "2PB_and_2PT",
            Table2Case::OnePbType1 => "1PB_type1",
            Table2Case::Boundary => "boundary",
        }
    }
}

impl std::fmt::Display for Table2Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classify the ordering of {1, g2, g3}.
pub fn classify_table2(g2: f64, g3: f64) -> Table2Case {
    classify_table2_with(g2, g3, TAU_EQ)
}

pub fn classify_table2_with(g2: f64, g3: f64, tau_eq: f64) -> Table2Case {
    if (g2 - 1.0).abs() <= tau_eq || (g3 - 1.0).abs() <= tau_eq || (g2 - g3).abs() <= tau_eq {
        return Table2Case::Boundary;
    }
    match (g2 > 1.0, g3 > 1.0, g2 > g3) {
        (true, true, false) => Table2Case::ThreePt,
        (true, true, true) => Table2Case::TwoPt,
        (false, true, _) => Table2Case::OnePbType2,
        (false, false, false) => Table2Case::OnePbType3,
        (true, false, _) => Table2Case::TwoPbAndTwoPt,
        (false, false, true) => Table2Case::OnePbType1,
    }
}

/// Outcome of the refined k-photon-blockade criteria:
/// criterion 1: g(k+1) <  exp(-<n>),
/// criterion 2: g(k)   >= exp(-<n>) + <n> g(k+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefinedKpb {
    pub criterion1: bool,
    pub criterion2: bool,
    pub kpb: bool,
}

/// Evaluate the refined criteria from g(k), g(k+1), and <n>.
pub fn refined_kpb(g_k: f64, g_kplus1: f64, mean_n: f64) -> RefinedKpb {
    let a = (-mean_n).exp();
    let criterion1 = g_kplus1 < a;
    let criterion2 = g_k >= a + mean_n * g_kplus1;
    RefinedKpb {
        criterion1,
        criterion2,
        kpb: criterion1 && criterion2,
    }
}

/// Simplified multi-photon-blockade tests:
/// two-photon:   g2 >= 1 and g3 < 1;
/// three-photon: g2 >= 1, g3 >= 1 and g4 < 1.
pub fn simplified_mpb(g2: f64, g3: f64, g4: f64) -> (bool, bool) {
    let two_pb = g2 >= 1.0 && g3 < 1.0;
    let three_pb = g2 >= 1.0 && g3 >= 1.0 && g4 < 1.0;
    (two_pb, three_pb)
}

/// Two-time photon antibunching: g2(0) < 1 and strictly below the whole
/// small-delay window.
pub fn two_time_pab(g2_zero: f64, g2_small_tau: &[f64]) -> bool {
    assert!(!g2_small_tau.is_empty(), "small-tau window must be nonempty");
    let min = g2_small_tau.iter().cloned().fold(f64::INFINITY, f64::min);
    g2_zero < 1.0 && g2_zero < min
}

/// Full classification of a correlation bundle.
#[derive(Debug, Clone)]
pub struct RegimeLabel {
    pub table2_case: Table2Case,
    /// Refined flags for k = 1 (single-photon) and k = 2 (two-photon).
    pub refined: [(usize, RefinedKpb); 2],
    pub simplified_2pb: bool,
    pub simplified_3pb: bool,
    /// Present only when a two-time curve was evaluated.
    pub two_time_pab: Option<bool>,
}

/// Classify a state from its correlation set, optionally with a small-tau
/// g2 window for the two-time test.
pub fn classify(corr: &CorrelationSet, g2_small_tau: Option<&[f64]>) -> RegimeLabel {
    let (simplified_2pb, simplified_3pb) = simplified_mpb(corr.g2, corr.g3, corr.g4);
    RegimeLabel {
        table2_case: classify_table2(corr.g2, corr.g3),
        refined: [
            (1, refined_kpb(1.0, corr.g2, corr.mean_n)),
            (2, refined_kpb(corr.g2, corr.g3, corr.mean_n)),
        ],
        simplified_2pb,
        simplified_3pb,
        two_time_pab: g2_small_tau.map(|w| two_time_pab(corr.g2, w)),
    }
}

//! Reference pairs shipped with the crate.
//!
//! The `sample_*` pairs are hand-built examples. The `lifted_*` pairs are the
//! ARPAs obtained by lifting the optimal regular CPA with the same parameters,
//! except `lifted_arpa_5_3_3`: that reference copy breaks its own row budget
//! and only its projection agrees with the lift.

use crate::designs::DesignPair;
use crate::io::parse_pair_text;

pub struct Fixture {
    pub name: &'static str,
    pub pair: DesignPair,
}

macro_rules! fixtures {
    ($($name:ident),* $(,)?) => {
        $(
            pub fn $name() -> DesignPair {
                parse_pair_text(include_str!(concat!("../fixtures/", stringify!($name), ".txt")))
                    .expect(concat!("fixture ", stringify!($name), " parses"))
            }
        )*

        pub fn all() -> Vec<Fixture> {
            vec![$(Fixture { name: stringify!($name), pair: $name() }),*]
        }
    };
}

fixtures!(
    sample_arpa_4_3_2,
    sample_arpa_5_3_2,
    sample_arpa_5_4_3,
    sample_cpa_4_3_2,
    sample_cpa_5_3_2,
    sample_cpa_5_4_3,
    lifted_arpa_4_2_1,
    lifted_arpa_4_3_2,
    lifted_arpa_5_2_2,
    lifted_arpa_5_3_1,
    lifted_arpa_5_3_2,
    lifted_arpa_5_3_3,
    lifted_arpa_5_4_1,
    lifted_arpa_5_4_2,
    lifted_arpa_5_4_3,
    lifted_arpa_6_2_2,
);

pub fn by_name(name: &str) -> Option<DesignPair> {
    all().into_iter().find(|f| f.name == name).map(|f| f.pair)
}

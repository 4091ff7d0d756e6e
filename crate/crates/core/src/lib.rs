//! Topological interference management: conflict graphs, exact linear
//! algebra, outer bounds, colorings and interference-alignment schemes.

pub mod agent;
pub mod bounds;
pub mod coloring;
pub mod datasets;
pub mod env;
pub mod error;
pub mod graph;
pub mod ia;
pub mod io;
pub mod linalg;

pub use coloring::Search;

/// The guide's code blocks, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        };
    }
    chapter!(overview, "overview.md");
    chapter!(conflict_graphs, "conflict-graphs.md");
    chapter!(exact_rank, "exact-rank.md");
    chapter!(bounds, "bounds.md");
    chapter!(colorings, "colorings.md");
    chapter!(ladder, "ladder.md");
    chapter!(environment, "environment.md");
    chapter!(agent, "agent.md");
    chapter!(datasets, "datasets.md");
    chapter!(cli, "cli.md");
}
pub use error::{Error, Result};

/// Symmetric degrees of freedom as an exact fraction.
pub type Dof = num_rational::Ratio<u64>;

/// Serde helpers writing a [`Dof`] as the string `"b/c"` (or `"1"`).
pub mod dof_serde {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::Dof;

    pub fn serialize<S: Serializer>(d: &Dof, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(d)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Dof, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(de::Error::custom)
    }

    pub fn parse(text: &str) -> Result<Dof, String> {
        let bad = || format!("malformed DoF {text:?}");
        let (num, den) = match text.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (text.trim(), "1"),
        };
        let num: u64 = num.parse().map_err(|_| bad())?;
        let den: u64 = den.parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        Ok(Dof::new(num, den))
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        use crate::Dof;

        pub fn serialize<S: Serializer>(d: &Option<Dof>, s: S) -> Result<S::Ok, S::Error> {
            match d {
                Some(d) => s.collect_str(d),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Dof>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| super::parse(&t).map_err(serde::de::Error::custom))
                .transpose()
        }
    }
}

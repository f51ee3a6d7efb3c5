use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Group description record, as read from a `.grp` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GroupSpec {
    Finite {
        elements: Vec<String>,
        table: Vec<Vec<TableEntry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        identity: Option<String>,
    },
    Perm {
        degree: usize,
        generators: Vec<Vec<i64>>,
    },
    Free {
        rank: i64,
    },
    Product {
        op: ProductOp,
        factors: Vec<GroupSpec>,
    },
    Semidirect {
        base: Box<GroupSpec>,
        action: Vec<AutomorphismSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableEntry {
    Index(usize),
    Name(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductOp {
    Direct,
    Free,
}

/// One generator of the acting group of a semidirect product: an
/// automorphism of the base, listed as `base element name -> image name`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismSpec {
    pub name: String,
    pub images: BTreeMap<String, String>,
}

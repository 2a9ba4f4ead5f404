//! Finishers and the end-to-end solve pipeline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Instance, SolutionTree, VertexId, WorkingGraph};
use crate::mst::{mst_plus, mst_terminals};
use crate::preprocess::{preprocessing, ReductionReport};
use crate::star::{contract_stars, ContractConfig, ContractionRecord};
use crate::zelikovsky::{zelikovsky, zelikovsky_minus, zelikovsky_plus};

/// Algorithm that completes a partially contracted graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finisher {
    Mst,
    MstPlus,
    Zelikovsky,
    ZelikovskyMinus,
    ZelikovskyPlus,
}

impl Finisher {
    pub const ALL: [Finisher; 5] = [
        Finisher::Mst,
        Finisher::MstPlus,
        Finisher::Zelikovsky,
        Finisher::ZelikovskyMinus,
        Finisher::ZelikovskyPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Finisher::Mst => "mst",
            Finisher::MstPlus => "mst_plus",
            Finisher::Zelikovsky => "zelikovsky",
            Finisher::ZelikovskyMinus => "zelikovsky_minus",
            Finisher::ZelikovskyPlus => "zelikovsky_plus",
        }
    }

    /// Solves the residual graph and maps the result, together with all
    /// bought edges, back to the instance.
    pub fn solve(self, g: &WorkingGraph) -> Result<SolutionTree> {
        let terminals: Vec<VertexId> = g.terminals().collect();
        let tree = match self {
            Finisher::Mst => mst_terminals(g, &terminals)?,
            Finisher::MstPlus => mst_plus(g, &terminals)?,
            Finisher::Zelikovsky => zelikovsky(g)?.tree,
            Finisher::ZelikovskyMinus => zelikovsky_minus(g)?.tree,
            Finisher::ZelikovskyPlus => zelikovsky_plus(g)?.tree,
        };
        g.solution_from(&tree.edges)
    }
}

impl fmt::Display for Finisher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Finisher {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Finisher::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown finisher {s:?}")))
    }
}

/// Everything a full run produced.
#[derive(Debug, Clone)]
pub struct Solved {
    pub solution: SolutionTree,
    pub reduction: Option<ReductionReport>,
    pub contractions: Vec<ContractionRecord>,
}

/// Optional preprocessing, optional star contraction, then a finisher.
/// Without a finisher the bought edges alone must connect the terminals.
pub fn solve(
    inst: &Instance,
    preprocess: bool,
    contraction: Option<&ContractConfig>,
    finisher: Option<Finisher>,
) -> Result<Solved> {
    let mut g = WorkingGraph::from_instance(inst);
    let reduction = preprocess.then(|| preprocessing(&mut g));
    let contractions = match contraction {
        Some(config) => contract_stars(&mut g, config)?,
        None => Vec::new(),
    };
    let solution = match finisher {
        Some(f) => f.solve(&g)?,
        None => g.solution_from(&[])?,
    };
    Ok(Solved {
        solution,
        reduction,
        contractions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::StarMode;

    #[test]
    fn names_round_trip() {
        for f in Finisher::ALL {
            assert_eq!(f.name().parse::<Finisher>().unwrap(), f);
        }
        assert!("greedy".parse::<Finisher>().is_err());
    }

    #[test]
    fn gadget_pipelines() {
        let gadget = Instance::new(
            6,
            [(0, 4, 1), (1, 4, 1), (4, 5, 1), (5, 2, 1), (5, 3, 1)],
            [0, 1, 2, 3],
        )
        .unwrap();
        for f in Finisher::ALL {
            assert_eq!(
                solve(&gadget, true, None, Some(f)).unwrap().solution.weight,
                5
            );
            let config = ContractConfig::exhaustive(StarMode::Improved);
            // preprocessing alone solves the gadget; contract the raw graph
            let run = solve(&gadget, false, Some(&config), Some(f)).unwrap();
            assert_eq!(run.solution.weight, 5);
            assert_eq!(run.contractions.len(), 1);
        }
        let config = ContractConfig::exhaustive(StarMode::Basic);
        assert_eq!(
            solve(&gadget, false, Some(&config), None)
                .unwrap()
                .solution
                .weight,
            5
        );
        assert!(solve(&gadget, false, None, None).is_err());
    }
}

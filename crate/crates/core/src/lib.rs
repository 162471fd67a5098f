//! Guided Local Search for the symmetric traveling salesman problem.
//!
//! The crate provides TSPLIB instances and tours, a 2-opt local search with
//! per-city activation bits, the GLS outer loop, its elite-biased variant,
//! landscape measures (bond distance, fitness-distance correlation) and the
//! statistics used to compare runs.
//!
//! ```
//! use gls_core::{parse_tsplib, run_gls, GlsConfig, StopCriteria};
//!
//! let text = "NAME: sq\nTYPE: TSP\nDIMENSION: 4\nEDGE_WEIGHT_TYPE: EUC_2D\n\
//!             NODE_COORD_SECTION\n1 0 0\n2 10 0\n3 0 10\n4 10 10\nEOF\n";
//! let inst = parse_tsplib(text).unwrap();
//! let out = run_gls(&inst, &GlsConfig::new(StopCriteria::iterations(10), 1)).unwrap();
//! assert_eq!(out.best.cost(), 40);
//! ```

pub mod ebgls;
pub mod error;
pub mod generate;
pub mod gls;
pub mod instance;
pub mod landscape;
pub mod local_search;
pub mod penalty;
pub mod stats;
pub mod tour;
pub mod tsplib;

pub use ebgls::{run_ebgls, run_ebgls_with, utility_eb, EbglsConfig, EbglsOutcome, EliteState, Warmup};
pub use error::{Error, Result, TsplibError};
pub use generate::generate_random_instance;
pub use gls::{
    compute_lambda, penalize, run_gls, run_gls_with, utility, GlsConfig, RunOutcome, SearchObserver, StartKind,
    StopCriteria, StopReason,
};
pub use instance::{EdgeKey, Instance, WeightRule};
pub use landscape::{bond_distance, fdc, OptimaPool};
pub use local_search::{CandidateLists, GuideFunction, Lambda};
pub use penalty::PenaltyStore;
pub use stats::{excess, mann_whitney_u};
pub use tour::{edges_of, nearest_neighbor_tour, random_tour, tour_cost, Tour};
pub use tsplib::{parse_tour, parse_tsplib, write_tour, write_tsplib};

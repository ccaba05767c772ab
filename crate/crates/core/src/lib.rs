//! Semiring provenance for Büchi games.
//!
//! Solving a game in the semiring of generalized absorptive polynomials
//! yields, per position, a polynomial whose monomials are the edge profiles
//! of all absorption-dominant winning strategies of Player 0. From that one
//! value the library answers strategy-analysis queries (who wins, with which
//! edges, how often, positionally or not) and — with dual indeterminates —
//! game-repair queries (which edge additions/deletions flip the winner).
//!
//! ```
//! use winpoly::{pi_strat, solve_win0, BuchiGame, SolveOptions, TrackingSpec};
//!
//! let game = BuchiGame::parse(
//!     "position v 0\nposition w 0 target\nedge a v v\nedge b v w\nedge c w w\n",
//! )?;
//! let interp = pi_strat(&game, &TrackingSpec::all(&game));
//! let solution = solve_win0(&game, &interp, &SolveOptions::default())?;
//!
//! // the one minimal winning strategy from v: move along b once, then
//! // loop on c forever
//! let v = game.position_by_name("v")?;
//! assert_eq!(solution.value(v).to_string(), "b*c^inf");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod dual;
pub mod error;
pub mod fixpoint;
pub mod game;
pub mod interp;
pub mod poly;
pub mod semiring;
pub mod strategy;

pub use analysis::{compute_repairs, finite_use_check, report, wins_with_subset, AnalysisReport};
pub use error::Error;
pub use fixpoint::{solve_win0, GfpMode, Solution, SolveOptions};
pub use game::{solve_boolean, BuchiGame, Player, RawGame, RepairSpec};
pub use interp::{pi_rep, pi_strat, Interpretation, TrackingSpec};
pub use poly::{Exponent, Monomial, Poly, Var};
pub use semiring::{Boolean, MinMax, PolyRing, Semiring, Tropical, Viterbi};
pub use strategy::{dominant_sum, enumerate_winning, EdgeProfile, StrategyAutomaton};

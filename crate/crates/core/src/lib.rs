//! Day-ahead electricity market clearing and pricing engine.
//!
//! Co-simulates one wholesale (transmission) market and many distribution
//! markets. Every published price is a dual variable of a linear program
//! built by this crate: LMP/ULMP on the transmission side, and the three
//! distribution prices (active, reactive, uncertainty/reserve) with their
//! energy/voltage/congestion/loss decomposition on the distribution side.
//!
//! Module map:
//! * [`lp`] — bounded-variable revised simplex returning primal, dual and
//!   reduced-cost vectors.
//! * [`milp`] — branch and bound over `lp`, plus fix-and-price repricing.
//! * [`robust`] — generic two-stage robust engine (column-and-constraint
//!   generation over a box uncertainty set).
//! * [`tx`] — wholesale market: DC network, robust unit commitment,
//!   LMP/ULMP formation and settlement.
//! * [`ds`] — distribution market: radial feeder scheduling, pricing
//!   linearization and DLMP decomposition.
//! * [`coord`] — transmission/distribution coordination loop with price
//!   sensitivity probing, plus the uncoordinated reference protocol.
//! * [`caseio`] — case files, the canonical T5D33 builder, experiment
//!   protocols and report emission.

pub mod caseio;
pub mod coord;
pub mod ds;
pub mod lp;
pub mod milp;
pub mod par;
pub mod robust;
#[cfg(any(test, feature = "testkit"))]
pub mod testkit;
pub mod tx;
pub mod util;

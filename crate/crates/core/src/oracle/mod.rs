//! Dense state-vector ground truth for small numbers of pairs.
//!
//! Every construction here is a brute-force expansion into the joint
//! computational basis of Bob's and Claire's qubits; the closed forms in
//! [`crate::teststate`] are checked against these.

mod circuit;
mod encoding;
mod schmidt;
mod state;
mod ubc;

pub use circuit::{
    apply_local_circuit, check_logical_map, find_local_circuit, n2_candidate_circuit,
    n2_locc_check, Gate, GateKind, LocalCircuit, LogicalCheck, Side, N2_LOGICAL_MAP,
};
pub use encoding::PairEncoding;
pub use schmidt::{bipartite_spectrum, entanglement_delta, entropy_of, schmidt_spectrum, SchmidtSpectrum};
pub use state::{build_test_state, from_pair_basis, to_pair_basis, PureStateVector, MAX_PAIRS};
pub use ubc::{apply_ubc, codebook};

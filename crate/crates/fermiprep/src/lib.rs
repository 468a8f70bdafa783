//! Circuit construction and exact statevector simulation for preparing
//! fermionic Hamiltonian eigenstates: polylog-depth antisymmetrization via
//! reversed sorting networks, phase estimation with partial
//! eigenstate-projection rejection, and exact-spectrum phase estimation on
//! the qubitization walk operator.

pub mod antisym;
pub mod comparator;
pub mod network;
pub mod phase;
pub mod qubitize;
pub mod shuffle;
pub mod sim;

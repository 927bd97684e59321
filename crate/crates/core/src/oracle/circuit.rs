use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{from_pair_basis, PairEncoding, PureStateVector};
use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    B,
    C,
}

/// Gate on one side's qubits; indices name pairs (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Cnot { control: usize, target: usize },
    Z(usize),
    X(usize),
    H(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub side: Side,
    pub kind: GateKind,
}

impl Gate {
    pub fn b(kind: GateKind) -> Self {
        Gate { side: Side::B, kind }
    }

    pub fn c(kind: GateKind) -> Self {
        Gate { side: Side::C, kind }
    }
}

/// A sequence of gates, each acting on Bob's qubits alone or Claire's alone.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalCircuit {
    pub gates: Vec<Gate>,
}

impl LocalCircuit {
    pub fn new(gates: Vec<Gate>) -> Self {
        LocalCircuit { gates }
    }

    pub fn validate(&self, n_pairs: usize) -> Result<()> {
        for g in &self.gates {
            match g.kind {
                GateKind::Cnot { control, target } => {
                    if control >= n_pairs || target >= n_pairs {
                        return Err(domain(format!("CNOT index out of range for {n_pairs} pairs")));
                    }
                    if control == target {
                        return Err(domain("CNOT control equals target"));
                    }
                }
                GateKind::Z(q) | GateKind::X(q) | GateKind::H(q) => {
                    if q >= n_pairs {
                        return Err(domain(format!("gate index {q} out of range for {n_pairs} pairs")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn qubit_bit(n: usize, side: Side, pair: usize) -> usize {
    let base = n - 1 - pair;
    match side {
        Side::B => n + base,
        Side::C => base,
    }
}

fn apply_gate(amps: &mut [Complex64], n: usize, gate: Gate) {
    match gate.kind {
        GateKind::X(q) => {
            let m = 1usize << qubit_bit(n, gate.side, q);
            for i in 0..amps.len() {
                if i & m == 0 {
                    amps.swap(i, i | m);
                }
            }
        }
        GateKind::Z(q) => {
            let m = 1usize << qubit_bit(n, gate.side, q);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & m != 0 {
                    *a = -*a;
                }
            }
        }
        GateKind::H(q) => {
            let m = 1usize << qubit_bit(n, gate.side, q);
            let h = core::f64::consts::FRAC_1_SQRT_2;
            for i in 0..amps.len() {
                if i & m == 0 {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = (a + b) * h;
                    amps[i | m] = (a - b) * h;
                }
            }
        }
        GateKind::Cnot { control, target } => {
            let mc = 1usize << qubit_bit(n, gate.side, control);
            let mt = 1usize << qubit_bit(n, gate.side, target);
            for i in 0..amps.len() {
                if i & mc != 0 && i & mt == 0 {
                    amps.swap(i, i | mt);
                }
            }
        }
    }
}

pub fn apply_local_circuit(state: &PureStateVector, circuit: &LocalCircuit) -> Result<PureStateVector> {
    let n = state.n_pairs();
    circuit.validate(n)?;
    let mut out = state.clone();
    for &g in &circuit.gates {
        apply_gate(out.amps_mut(), n, g);
    }
    Ok(out)
}

/// Result of running a circuit on logical basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalCheck {
    /// `|<target|U|input>|` for each mapped input.
    pub fidelities: Vec<f64>,
    /// `<target|U|input>` for each mapped input.
    pub overlaps: Vec<Complex64>,
}

impl LogicalCheck {
    pub fn min_fidelity(&self) -> f64 {
        self.fidelities.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation of any overlap from the first one. Zero means every
    /// input picked up the same global phase.
    pub fn phase_spread(&self) -> f64 {
        match self.overlaps.first() {
            None => 0.0,
            Some(&first) => self.overlaps.iter().map(|o| (o - first).norm()).fold(0.0, f64::max),
        }
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.min_fidelity() >= 1.0 - tol && self.phase_spread() <= tol
    }
}

fn logical_state(pattern: usize, n: usize, enc: &PairEncoding) -> Result<PureStateVector> {
    let mut coeffs = alloc::vec![Complex64::new(0.0, 0.0); 1 << n];
    coeffs[pattern] = Complex64::new(1.0, 0.0);
    from_pair_basis(&coeffs, n, enc)
}

/// Run `circuit` on each logical input pattern of `map` and compare with the
/// paired output pattern.
pub fn check_logical_map(
    circuit: &LocalCircuit,
    n: usize,
    map: &[(usize, usize)],
    enc: &PairEncoding,
) -> Result<LogicalCheck> {
    circuit.validate(n)?;
    let mut fidelities = Vec::with_capacity(map.len());
    let mut overlaps = Vec::with_capacity(map.len());
    for &(src, dst) in map {
        let out = apply_local_circuit(&logical_state(src, n, enc)?, circuit)?;
        let o = logical_state(dst, n, enc)?.inner(&out)?;
        fidelities.push(o.norm());
        overlaps.push(o);
    }
    Ok(LogicalCheck { fidelities, overlaps })
}

/// The two-pair relabeling extended to all four logical inputs: a CNOT from
/// the first logical bit to the second followed by NOT on the second.
/// Patterns use bit 1 for pair 0 and bit 0 for pair 1 (set = tau).
pub const N2_LOGICAL_MAP: [(usize, usize); 4] = [(0b00, 0b01), (0b01, 0b00), (0b10, 0b10), (0b11, 0b11)];

/// CNOT from pair 1 to pair 0 on both sides, then Z on Bob's qubit of pair 1.
///
/// Physical CNOTs on both halves of Bell-encoded pairs act as a logical CNOT
/// with control and target exchanged, and `Z_B` swaps `theta` with `tau`.
pub fn n2_candidate_circuit() -> LocalCircuit {
    let cnot = GateKind::Cnot { control: 1, target: 0 };
    LocalCircuit::new(alloc::vec![Gate::b(cnot), Gate::c(cnot), Gate::b(GateKind::Z(1))])
}

pub fn n2_locc_check() -> Result<LogicalCheck> {
    check_logical_map(&n2_candidate_circuit(), 2, &N2_LOGICAL_MAP, &PairEncoding::bell())
}

fn gate_alphabet(n: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for side in [Side::B, Side::C] {
        for q in 0..n {
            for kind in [GateKind::X(q), GateKind::Z(q), GateKind::H(q)] {
                out.push(Gate { side, kind });
            }
        }
        for control in 0..n {
            for target in 0..n {
                if control != target {
                    out.push(Gate {
                        side,
                        kind: GateKind::Cnot { control, target },
                    });
                }
            }
        }
    }
    out
}

/// Exhaustive search for the shortest local circuit (at most `max_gates`
/// gates from {X, Z, H, CNOT} on either side) that realizes `map` up to a
/// common global phase.
pub fn find_local_circuit(
    n: usize,
    map: &[(usize, usize)],
    enc: &PairEncoding,
    max_gates: usize,
    tol: f64,
) -> Result<Option<LocalCircuit>> {
    let alphabet = gate_alphabet(n);
    let a = alphabet.len();
    for len in 0..=max_gates {
        let total = a.checked_pow(len as u32).ok_or_else(|| domain("search space too large"))?;
        for code in 0..total {
            let mut rest = code;
            let gates = (0..len)
                .map(|_| {
                    let g = alphabet[rest % a];
                    rest /= a;
                    g
                })
                .collect();
            let circuit = LocalCircuit::new(gates);
            if check_logical_map(&circuit, n, map, enc)?.passed(tol) {
                return Ok(Some(circuit));
            }
        }
    }
    Ok(None)
}

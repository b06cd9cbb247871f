//! Dense matrix oracle: every gate becomes a full `2^n x 2^n` matrix built
//! from Kronecker products, with qubit 0 as the least significant factor.

#![allow(dead_code)]

use xeblab_core::{Circuit, Complex64, Gate};

pub type Matrix = Vec<Vec<Complex64>>;

const O: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(d: usize) -> Matrix {
    (0..d).map(|i| (0..d).map(|j| if i == j { I } else { O }).collect()).collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![O; ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    let mut out = vec![vec![O; d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == O {
                continue;
            }
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// `factor(q)` on every qubit, highest qubit as the leftmost factor.
fn kron_over_qubits(n: usize, factor: impl Fn(usize) -> Matrix) -> Matrix {
    (0..n).rev().fold(identity(1), |acc, q| kron(&acc, &factor(q)))
}

pub fn gate_matrix(gate: &Gate, n: usize) -> Matrix {
    let d = 1usize << n;
    match *gate {
        Gate::Unitary { qubit, matrix } => kron_over_qubits(n, |q| {
            if q == qubit {
                vec![vec![matrix[0], matrix[1]], vec![matrix[2], matrix[3]]]
            } else {
                identity(2)
            }
        }),
        Gate::X(target) => {
            kron_over_qubits(n, |q| if q == target { vec![vec![O, I], vec![I, O]] } else { identity(2) })
        }
        Gate::Cz(a, b) => {
            let mut m = identity(d);
            for (z, row) in m.iter_mut().enumerate() {
                if z >> a & 1 == 1 && z >> b & 1 == 1 {
                    row[z] = -I;
                }
            }
            m
        }
    }
}

pub fn dense_unitary(c: &Circuit) -> Matrix {
    let n = c.n();
    c.layers()
        .iter()
        .flat_map(|layer| layer.gates())
        .fold(identity(1 << n), |acc, gate| matmul(&gate_matrix(gate, n), &acc))
}

/// `C|0^n>`, the first column of the dense unitary.
pub fn dense_state(c: &Circuit) -> Vec<Complex64> {
    dense_unitary(c).iter().map(|row| row[0]).collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

//! Hopfield energy of symmetric binary networks.

use super::{state_mask, Network, NetworkError};
use crate::scalar::Scalar;

/// Dense weight matrix `w[i][j]` (sum of edges `i -> j`), checked to be
/// symmetric with a zero diagonal.
fn symmetric_weights<T: Scalar>(n: &Network<T>) -> Result<Vec<Vec<T>>, NetworkError> {
    let size = n.len();
    let mut w = vec![vec![T::zero(); size]; size];
    for e in n.edges() {
        w[e.from][e.to] = w[e.from][e.to] + e.w;
    }
    for i in 0..size {
        if w[i][i] != T::zero() {
            return Err(NetworkError::SelfWeight(i));
        }
        for j in i + 1..size {
            if w[i][j] != w[j][i] {
                return Err(NetworkError::Asymmetric(i, j));
            }
        }
    }
    Ok(w)
}

fn energy_with<T: Scalar>(n: &Network<T>, w: &[Vec<T>], x: &[T]) -> T {
    let mut e = T::zero();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            e = e - w[i][j] * x[i] * x[j];
        }
        e = e - n.neuron(i).bias * x[i];
    }
    e
}

fn check_state<T: Scalar>(n: &Network<T>, x: &[T]) -> Result<(), NetworkError> {
    if x.len() != n.len() {
        return Err(NetworkError::DimensionMismatch {
            expected: n.len(),
            found: x.len(),
        });
    }
    state_mask(x).map(|_| ())
}

/// `E(x) = -Σ_{i<j} w_ij x_i x_j - Σ_i b_i x_i`.
pub fn hopfield_energy<T: Scalar>(n: &Network<T>, x: &[T]) -> Result<T, NetworkError> {
    let w = symmetric_weights(n)?;
    check_state(n, x)?;
    Ok(energy_with(n, &w, x))
}

/// No single-neuron flip strictly lowers the energy.
pub fn is_local_minimum<T: Scalar>(n: &Network<T>, x: &[T]) -> Result<bool, NetworkError> {
    let w = symmetric_weights(n)?;
    check_state(n, x)?;
    let e = energy_with(n, &w, x);
    let mut y = x.to_vec();
    for i in 0..x.len() {
        y[i] = T::one() - x[i];
        let lower = energy_with(n, &w, &y) < e;
        y[i] = x[i];
        if lower {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every neuron already agrees with its own threshold update
/// (`1` iff net input `>= 0`), so asynchronous updating leaves `x` fixed.
pub fn is_async_stable<T: Scalar>(n: &Network<T>, x: &[T]) -> Result<bool, NetworkError> {
    check_state(n, x)?;
    Ok((0..n.len()).all(|i| {
        let fire = n.net_input(i, x) >= T::zero();
        (x[i] == T::one()) == fire
    }))
}

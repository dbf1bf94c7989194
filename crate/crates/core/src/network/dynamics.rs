//! Trajectories and limit sets.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{mask_state, state_mask, Network, NetworkError, UpdateMode};
use crate::scalar::Scalar;

/// Largest synchronous network whose full state space is enumerated.
pub const MAX_SYNC_NEURONS: usize = 20;

/// Default step budget when iterating feedforward networks with recurrent
/// input links.
const FEEDFORWARD_STEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    /// Distinct states in visiting order, starting with the initial state.
    pub states: Vec<Vec<T>>,
    /// `(start, period)`: `states[start..]` repeat forever with this period.
    pub cycle: Option<(usize, usize)>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn cycle_states(&self) -> &[Vec<T>] {
        match self.cycle {
            Some((start, _)) => &self.states[start..],
            None => &[],
        }
    }

    /// Step at which the first repeated state was reached.
    pub fn detected_at(&self) -> Option<usize> {
        self.cycle.map(|_| self.states.len())
    }
}

fn key<T: Scalar>(x: &[T]) -> Vec<u64> {
    x.iter().map(|v| v.key_bits()).collect()
}

/// Iterates `update` from `x0` until a state repeats or `t_max` updates were
/// made. Exhaustion is reported as `cycle: None`.
pub fn trajectory<T: Scalar>(n: &Network<T>, x0: &[T], t_max: usize) -> Result<Trajectory<T>, NetworkError> {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut states = vec![x0.to_vec()];
    seen.insert(key(x0), 0);
    let mut x = x0.to_vec();
    for _ in 0..t_max {
        x = n.update(&x)?;
        let k = key(&x);
        if let Some(&start) = seen.get(&k) {
            let period = states.len() - start;
            return Ok(Trajectory {
                states,
                cycle: Some((start, period)),
            });
        }
        seen.insert(k, states.len());
        states.push(x.clone());
    }
    Ok(Trajectory { states, cycle: None })
}

/// Where one initial state ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basin {
    /// Synchronous: the initial state as a mask over all neurons.
    /// Feedforward: the row index of the enumerated input assignment.
    pub initial: u64,
    /// Index into [`LimitSet::cycles`].
    pub cycle: usize,
    /// Updates before the cycle is entered.
    pub transient: usize,
}

/// The states a network converges to, grouped into cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSet<T> {
    /// Distinct limit states, sorted.
    pub states: Vec<Vec<T>>,
    /// Each cycle as indices into `states`, in update order.
    pub cycles: Vec<Vec<usize>>,
    pub basins: Vec<Basin>,
}

impl<T: Scalar> LimitSet<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Limit states lying on cycles of period 1.
    pub fn stable_states(&self) -> Vec<&Vec<T>> {
        self.cycles
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| &self.states[c[0]])
            .collect()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        let k = key(x);
        self.states.iter().any(|s| key(s) == k)
    }

    /// The same limit set restricted to period-1 cycles.
    pub fn stable_only(&self) -> LimitSet<T> {
        let keep: Vec<usize> = (0..self.cycles.len()).filter(|&c| self.cycles[c].len() == 1).collect();
        let states: Vec<Vec<T>> = keep.iter().map(|&c| self.states[self.cycles[c][0]].clone()).collect();
        let mut order: Vec<usize> = (0..states.len()).collect();
        order.sort_by(|&a, &b| cmp_state(&states[a], &states[b]));
        let sorted: Vec<Vec<T>> = order.iter().map(|&i| states[i].clone()).collect();
        let mut position = vec![0; states.len()];
        for (p, &i) in order.iter().enumerate() {
            position[i] = p;
        }
        let cycles = (0..keep.len()).map(|i| vec![position[i]]).collect();
        let basins = self
            .basins
            .iter()
            .filter_map(|b| keep.iter().position(|&c| c == b.cycle).map(|c| Basin { cycle: c, ..*b }))
            .collect();
        LimitSet {
            states: sorted,
            cycles,
            basins,
        }
    }
}

fn cmp_state<T: Scalar>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Assembles a limit set from per-initial trajectories.
fn collect<T: Scalar>(runs: Vec<(u64, Trajectory<T>)>) -> Result<LimitSet<T>, NetworkError> {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut raw_states: Vec<Vec<T>> = Vec::new();
    let mut cycle_of_state: HashMap<usize, usize> = HashMap::new();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut basins = Vec::new();
    for (initial, t) in runs {
        let (start, _) = t.cycle.ok_or(NetworkError::NoLimit(t.states.len()))?;
        let members: Vec<usize> = t.states[start..]
            .iter()
            .map(|s| {
                let k = key(s);
                let next = raw_states.len();
                *index.entry(k).or_insert_with(|| {
                    raw_states.push(s.clone());
                    next
                })
            })
            .collect();
        let cycle = match cycle_of_state.get(&members[0]) {
            Some(&c) => c,
            None => {
                let c = cycles.len();
                for &m in &members {
                    cycle_of_state.insert(m, c);
                }
                cycles.push(members);
                c
            }
        };
        basins.push(Basin {
            initial,
            cycle,
            transient: start,
        });
    }
    // sort states; remap cycle indices
    let mut order: Vec<usize> = (0..raw_states.len()).collect();
    order.sort_by(|&a, &b| cmp_state(&raw_states[a], &raw_states[b]));
    let mut position = vec![0; raw_states.len()];
    for (p, &i) in order.iter().enumerate() {
        position[i] = p;
    }
    let states = order.iter().map(|&i| raw_states[i].clone()).collect();
    let cycles = cycles
        .into_iter()
        .map(|c| c.into_iter().map(|i| position[i]).collect())
        .collect();
    Ok(LimitSet { states, cycles, basins })
}

/// Limit set over the default initial states: every binary state of a
/// synchronous network, or every binary assignment to the inputs of a
/// feedforward network (other neurons start at 0).
pub fn compute_x_inf<T: Scalar>(n: &Network<T>) -> Result<LimitSet<T>, NetworkError> {
    match n.update_mode() {
        UpdateMode::Synchronous => synchronous_x_inf(n),
        UpdateMode::Feedforward => {
            let inputs = n.inputs();
            if inputs.len() > MAX_SYNC_NEURONS {
                return Err(NetworkError::StateSpaceTooLarge {
                    neurons: inputs.len(),
                    max: MAX_SYNC_NEURONS,
                });
            }
            let rows: Vec<Vec<T>> = (0..1u64 << inputs.len()).map(|m| mask_state(m, inputs.len())).collect();
            compute_x_inf_with(n, &rows)
        }
    }
}

/// Feedforward limit set over caller-supplied input rows (values for the
/// input neurons in id order).
pub fn compute_x_inf_with<T: Scalar>(n: &Network<T>, rows: &[Vec<T>]) -> Result<LimitSet<T>, NetworkError> {
    if n.update_mode() != UpdateMode::Feedforward {
        return Err(NetworkError::Invalid("input enumeration applies to feedforward networks".into()));
    }
    let inputs = n.inputs();
    let runs = rows
        .par_iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != inputs.len() {
                return Err(NetworkError::DimensionMismatch {
                    expected: inputs.len(),
                    found: row.len(),
                });
            }
            let mut x0 = vec![T::zero(); n.len()];
            for (&i, &v) in inputs.iter().zip(row) {
                x0[i] = v;
            }
            let t = trajectory(n, &x0, FEEDFORWARD_STEPS)?;
            if t.cycle.is_none() {
                return Err(NetworkError::NoLimit(FEEDFORWARD_STEPS));
            }
            Ok((r as u64, t))
        })
        .collect::<Result<Vec<_>, NetworkError>>()?;
    collect(runs)
}

fn synchronous_x_inf<T: Scalar>(n: &Network<T>) -> Result<LimitSet<T>, NetworkError> {
    let size = n.len();
    if size > MAX_SYNC_NEURONS {
        return Err(NetworkError::StateSpaceTooLarge {
            neurons: size,
            max: MAX_SYNC_NEURONS,
        });
    }
    let count = 1usize << size;
    let succ: Vec<u64> = (0..count as u64)
        .into_par_iter()
        .map(|m| state_mask(&n.update(&mask_state::<T>(m, size))?))
        .collect::<Result<_, _>>()?;

    // functional-graph walk: mark cycle states, then each state's basin
    const UNSEEN: u32 = u32::MAX;
    let mut walk_id = vec![UNSEEN; count];
    let mut cycle_id = vec![UNSEEN; count];
    let mut cycles: Vec<Vec<u64>> = Vec::new();
    for s in 0..count {
        if walk_id[s] != UNSEEN {
            continue;
        }
        let mut x = s;
        while walk_id[x] == UNSEEN {
            walk_id[x] = s as u32;
            x = succ[x] as usize;
        }
        if walk_id[x] == s as u32 {
            let c = cycles.len() as u32;
            let mut members = Vec::new();
            let mut y = x;
            loop {
                cycle_id[y] = c;
                members.push(y as u64);
                y = succ[y] as usize;
                if y == x {
                    break;
                }
            }
            cycles.push(members);
        }
    }
    // transient length and basin of every state
    let mut transient = vec![UNSEEN; count];
    for s in 0..count {
        if cycle_id[s] != UNSEEN {
            transient[s] = 0;
        }
    }
    let mut basin_cycle = cycle_id.clone();
    let mut path = Vec::new();
    for s in 0..count {
        let mut x = s;
        while transient[x] == UNSEEN {
            path.push(x);
            x = succ[x] as usize;
        }
        let (mut t, c) = (transient[x], basin_cycle[x]);
        while let Some(y) = path.pop() {
            t += 1;
            transient[y] = t;
            basin_cycle[y] = c;
        }
    }

    let mut masks: Vec<u64> = cycles.iter().flatten().copied().collect();
    masks.sort_unstable();
    let position: HashMap<u64, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let states = masks.iter().map(|&m| mask_state(m, size)).collect();
    let cycle_idx = cycles.iter().map(|c| c.iter().map(|m| position[m]).collect()).collect();
    let basins = (0..count)
        .map(|s| Basin {
            initial: s as u64,
            cycle: basin_cycle[s] as usize,
            transient: transient[s] as usize,
        })
        .collect();
    Ok(LimitSet {
        states,
        cycles: cycle_idx,
        basins,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::two_cycle;
    use super::super::{Activation, NetworkBuilder, Role};
    use super::*;

    #[test]
    fn two_cycle_trajectory_from_one_zero() {
        let t = trajectory(&two_cycle(), &[1.0, 0.0], 10).unwrap();
        assert_eq!(t.states, vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(t.cycle, Some((1, 2)));
    }

    #[test]
    fn start_inside_cycle() {
        let t = trajectory(&two_cycle(), &[1.0, 1.0], 10).unwrap();
        assert_eq!(t.cycle, Some((0, 2)));
        assert_eq!(t.detected_at(), Some(2));
    }

    #[test]
    fn two_cycle_limit_set() {
        let x = compute_x_inf(&two_cycle()).unwrap();
        assert_eq!(x.states, vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
        assert_eq!(x.cycles.len(), 1);
        assert_eq!(x.basins.len(), 4);
        assert!(x.stable_states().is_empty());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let t = trajectory(&two_cycle(), &[1.0, 0.0], 1).unwrap();
        assert_eq!(t.cycle, None);
    }

    #[test]
    fn feedforward_xor_limit_set() {
        let mut b = NetworkBuilder::<f64>::new();
        let x1 = b.neuron(0.0, Activation::Identity, Role::atom("X1"));
        let x2 = b.neuron(0.0, Activation::Identity, Role::atom("X2"));
        let h1 = b.neuron(-1.0, Activation::StepGeq0, Role::Hidden);
        let h2 = b.neuron(-2.0, Activation::StepGeq0, Role::Hidden);
        let y = b.neuron(-1.0, Activation::StepGeq0, Role::atom("Y"));
        b.edge(x1, h1, 1.0).edge(x2, h1, 1.0).edge(x1, h2, 1.0).edge(x2, h2, 1.0);
        b.edge(h1, y, 1.0).edge(h2, y, -2.0);
        let n = b.build(UpdateMode::Feedforward).unwrap();
        let x = compute_x_inf(&n).unwrap();
        assert_eq!(x.len(), 4);
        for s in &x.states {
            let xor = (s[0] != s[1]) as u8 as f64;
            assert_eq!(s[4], xor);
        }
    }

    #[test]
    fn non_binary_recurrent_rejected() {
        let mut b = NetworkBuilder::<f64>::new();
        b.neuron(0.5, Activation::Identity, Role::atom("A"));
        let n = b.build(UpdateMode::Synchronous).unwrap();
        assert!(matches!(compute_x_inf(&n), Err(NetworkError::NonBinary { .. })));
    }
}

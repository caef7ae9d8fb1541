use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// A state in the one-point compactification of `R^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PathState<'a> {
    Finite(&'a [f64]),
    Infinity,
}

/// A large jump as applied on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeJumpRecord {
    /// Arrival time of the event.
    pub time: f64,
    /// Grid index carrying the post-jump state.
    pub grid_index: usize,
    pub mark: Vec<f64>,
    pub pre: Vec<f64>,
    pub post: Vec<f64>,
}

/// Exit times of the truncation levels and what they say about explosion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplosionInfo {
    pub levels: Vec<f64>,
    /// `θ_m` per level, `None` when the level is never reached.
    pub theta: Vec<Option<f64>>,
    /// `θ` of the largest level.
    pub eta_last: Option<f64>,
    /// Aitken limit of the last three exit times.
    pub eta_extrapolated: Option<f64>,
    pub exploded: bool,
}

/// An rcll path on the grid: the value at `t_k` is the post-jump state.
#[derive(Clone, Debug, PartialEq)]
pub struct PathRecord {
    dim: usize,
    times: Vec<f64>,
    /// `values[k * dim..(k + 1) * dim]`; the point at infinity is stored as
    /// `+inf` in every component.
    values: Vec<f64>,
    large_jumps: Vec<LargeJumpRecord>,
    pub explosion: Option<ExplosionInfo>,
    /// Set when the path beyond this time comes from the largest truncation
    /// level only and was not confirmed by explosion detection.
    pub resolved_until: Option<f64>,
}

impl PathRecord {
    /// A path that sits at `start` for all grid times.
    pub fn constant(times: &[f64], start: &[f64]) -> Self {
        let dim = start.len();
        let mut values = Vec::with_capacity(times.len() * dim);
        for _ in times {
            values.extend_from_slice(start);
        }
        PathRecord {
            dim,
            times: times.to_vec(),
            values,
            large_jumps: Vec::new(),
            explosion: None,
            resolved_until: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Raw components at grid index `k` (`inf` for the point at infinity).
    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn state(&self, k: usize) -> PathState<'_> {
        let v = self.value(k);
        if v.iter().any(|x| x.is_infinite()) {
            PathState::Infinity
        } else {
            PathState::Finite(v)
        }
    }

    pub fn final_state(&self) -> PathState<'_> {
        self.state(self.len() - 1)
    }

    pub(crate) fn set(&mut self, k: usize, state: &[f64]) {
        self.values[k * self.dim..(k + 1) * self.dim].copy_from_slice(state);
    }

    pub(crate) fn set_infinite_from(&mut self, k: usize) {
        for v in &mut self.values[k * self.dim..] {
            *v = f64::INFINITY;
        }
    }

    pub(crate) fn push_jump(&mut self, jump: LargeJumpRecord) {
        self.large_jumps.push(jump);
    }

    pub fn large_jumps(&self) -> &[LargeJumpRecord] {
        &self.large_jumps
    }

    pub fn is_large_jump(&self, k: usize) -> bool {
        self.large_jumps.iter().any(|j| j.grid_index == k)
    }

    /// `|X_{t_k}|`, infinite at the point at infinity.
    pub fn norm_at(&self, k: usize) -> f64 {
        self.value(k).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `sup_k |X_{t_k} - Y_{t_k}|` over the common grid.
    pub fn sup_distance(&self, other: &PathRecord) -> f64 {
        assert_eq!(self.dim, other.dim, "path dimensions differ");
        self.values
            .chunks(self.dim)
            .zip(other.values.chunks(other.dim))
            .map(|(a, b)| {
                if a == b {
                    0.0
                } else {
                    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
                }
            })
            .fold(0.0, f64::max)
    }

    /// `sup_k |X_{t_k}|`.
    pub fn sup_norm(&self) -> f64 {
        (0..self.len()).map(|k| self.norm_at(k)).fold(0.0, f64::max)
    }

    /// CSV with columns `t, U_1..U_d, is_large_jump`. The point at infinity
    /// is written as `inf` in every component.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "t")?;
        for i in 1..=self.dim {
            write!(out, ",U_{i}")?;
        }
        writeln!(out, ",is_large_jump")?;
        let mut jump_rows = vec![false; self.len()];
        for j in &self.large_jumps {
            jump_rows[j.grid_index] = true;
        }
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{t}")?;
            match self.state(k) {
                PathState::Finite(v) => {
                    for x in v {
                        write!(out, ",{x}")?;
                    }
                }
                PathState::Infinity => {
                    for _ in 0..self.dim {
                        write!(out, ",inf")?;
                    }
                }
            }
            writeln!(out, ",{}", u8::from(jump_rows[k]))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut p = PathRecord::constant(&[0.0, 0.5, 1.0], &[1.0, -2.5]);
        p.push_jump(LargeJumpRecord {
            time: 0.4,
            grid_index: 1,
            mark: vec![1.0, 0.0],
            pre: vec![1.0, -2.5],
            post: vec![1.0, -2.5],
        });
        p.set_infinite_from(2);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,U_1,U_2,is_large_jump\n0,1,-2.5,0\n0.5,1,-2.5,1\n1,inf,inf,0\n");
        assert_eq!(p.state(2), PathState::Infinity);
        assert_eq!(p.state(0), PathState::Finite(&[1.0, -2.5]));
    }

    #[test]
    fn distances() {
        let a = PathRecord::constant(&[0.0, 1.0], &[0.0, 0.0]);
        let mut b = a.clone();
        b.set(1, &[3.0, 4.0]);
        assert_eq!(a.sup_distance(&b), 5.0);
        assert_eq!(b.sup_norm(), 5.0);
    }
}

//! Lifting edge paths through the voltage graph.
//!
//! A forward step along edge `e` takes `(from, k)` to `(to, v(e) k)`; a
//! reverse step takes `(to, k)` to `(from, v(e)^-1 k)`.

use std::collections::VecDeque;

use rand::Rng;

use super::{CoverError, DiscreteCover, Edge};
use crate::group::FiniteGroup;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
}

impl Step {
    pub fn forward(edge: usize) -> Self {
        Self { edge, forward: true }
    }

    pub fn reverse(edge: usize) -> Self {
        Self { edge, forward: false }
    }

    fn ends(&self, e: &Edge) -> (usize, usize) {
        if self.forward { (e.from, e.to) } else { (e.to, e.from) }
    }
}

impl<T: Real> DiscreteCover<T> {
    /// Follows `path` from base vertex `q`, returning the final vertex and
    /// the accumulated voltage `W = w_k ... w_1`.
    pub fn transport(&self, q: usize, path: &[Step]) -> Result<(usize, usize), CoverError> {
        let g = self.group();
        let mut at = q;
        let mut word = g.identity();
        for (k, s) in path.iter().enumerate() {
            let e = self.edges().get(s.edge).ok_or(CoverError::UnknownEdge(s.edge))?;
            let (from, to) = s.ends(e);
            if from != at {
                return Err(CoverError::NotALoop { step: k, expected: at, found: from });
            }
            let w = if s.forward { e.voltage } else { g.inv(e.voltage) };
            word = g.mul(w, word);
            at = to;
        }
        Ok((at, word))
    }

    /// Lifts the loop from `(q, h)` and returns the `I` with endpoint `(q, h I)`.
    pub fn holonomy(&self, q: usize, path: &[Step], h: usize) -> Result<usize, CoverError> {
        let (end, word) = self.transport(q, path)?;
        if end != q {
            return Err(CoverError::NotALoop { step: path.len(), expected: q, found: end });
        }
        let g = self.group();
        Ok(g.mul(g.inv(h), g.mul(word, h)))
    }

    /// Endpoint of the lift of `path` starting at cover point `x`.
    pub fn lift_path(&self, x: usize, path: &[Step]) -> Result<usize, CoverError> {
        let n = self.group().order();
        let (q, h) = (x / n, x % n);
        let (end, word) = self.transport(q, path)?;
        Ok(self.point(end, self.group().mul(word, h)))
    }

    /// Random walk of `len` steps from `q` followed by a shortest path back.
    pub fn random_loop(&self, q: usize, len: usize, rng: &mut impl Rng) -> Vec<Step> {
        let mut path = Vec::new();
        let mut at = q;
        for _ in 0..len {
            let moves = self.moves_from(at);
            if moves.is_empty() {
                break;
            }
            let (s, to) = moves[rng.random_range(0..moves.len())];
            path.push(s);
            at = to;
        }
        path.extend(self.shortest_path(at, q).expect("walk stays in the component of q"));
        path
    }

    fn moves_from(&self, at: usize) -> Vec<(Step, usize)> {
        let mut out = Vec::new();
        for (k, e) in self.edges().iter().enumerate() {
            if e.from == at {
                out.push((Step::forward(k), e.to));
            }
            if e.to == at {
                out.push((Step::reverse(k), e.from));
            }
        }
        out
    }

    fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<Step>> {
        let mut prev: Vec<Option<(usize, Step)>> = vec![None; self.base_size()];
        let mut seen = vec![false; self.base_size()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                let mut path = Vec::new();
                let mut cur = to;
                while let Some((p, s)) = prev[cur] {
                    path.push(s);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for (s, w) in self.moves_from(v) {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, s));
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// Residuals of the holonomy identities over random loop pairs at `q`:
/// failures of `I(ab) = I(b) I(a)` and of `I_h = h^-1 I_e h`.
pub fn holonomy_identity_failures<T: Real>(
    cover: &DiscreteCover<T>,
    q: usize,
    pairs: usize,
    rng: &mut impl Rng,
) -> Result<(usize, usize), CoverError> {
    let g: &FiniteGroup = cover.group();
    let e = g.identity();
    let (mut anti, mut conj) = (0, 0);
    for _ in 0..pairs {
        let a = cover.random_loop(q, rng.random_range(1..6), rng);
        let b = cover.random_loop(q, rng.random_range(1..6), rng);
        let ab: Vec<Step> = a.iter().chain(b.iter()).copied().collect();
        let h = rng.random_range(0..g.order());
        let (ia, ib) = (cover.holonomy(q, &a, h)?, cover.holonomy(q, &b, h)?);
        if cover.holonomy(q, &ab, h)? != g.mul(ib, ia) {
            anti += 1;
        }
        let base = cover.holonomy(q, &a, e)?;
        if ia != g.mul(g.inv(h), g.mul(base, h)) {
            conj += 1;
        }
    }
    Ok((anti, conj))
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::FeasibleSet;
use crate::channel::{superop_to_choi, ChannelMap};
use crate::error::{Error, Result};
use crate::matrix::{MatrixC, C64};

pub const DEFAULT_STARTS: usize = 8;
/// Dykstra stopping tolerance for samples and ascent steps.
pub const PROJECTION_TOL: f64 = 1e-10;
pub const PROJECTION_BUDGET: usize = 100_000;
/// Projections inside one ascent step are cheaper to abandon than to finish.
const ASCENT_PROJECTION_BUDGET: usize = 20_000;
const ASCENT_ROUNDS: usize = 40;

/// Best point found by [`FeasibleSet::maximize_linear`]. The value is a
/// lower bound on the true maximum; multi-start only makes it likely tight.
#[derive(Clone, Debug, Serialize)]
pub struct LinearMax {
    #[serde(skip)]
    pub point: ChannelMap,
    pub value: f64,
    pub starts: usize,
    pub seeds: Vec<u64>,
    pub certificate: &'static str,
}

/// `C` with `Tr(J_θ C) = Re⟨y, θ(x)⟩`.
pub fn choi_functional(x: &MatrixC, y: &MatrixC) -> MatrixC {
    x.transpose().kron(&y.adjoint()).hermitian_part()
}

/// `C` with `Tr(J_θ C) = Re⟨G, Θ̂⟩` for a superoperator direction `G` on `M_n`.
pub fn superop_functional(n: usize, g: &MatrixC) -> MatrixC {
    superop_to_choi(n, n, g).hermitian_part()
}

fn hermitian_gaussian(side: usize, rng: &mut ChaCha8Rng) -> MatrixC {
    let x = MatrixC::from_fn(side, side, |_, _| {
        C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
    });
    x.hermitian_part()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl FeasibleSet {
    /// Nearest member to `Choi(id) + G`, `G` Hermitian Gaussian; pure in `seed`.
    pub fn sample(&self, seed: u64) -> Result<ChannelMap> {
        let y = self.sample_coords(seed, self.projection_budget())?;
        Ok(self.coords_to_channel(&y))
    }

    fn sample_coords(&self, seed: u64, budget: usize) -> Result<Vec<f64>> {
        let n = self.ambient();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j0 = ChannelMap::identity(n).choi() + &hermitian_gaussian(n * n, &mut rng);
        self.dykstra_coords(&self.choi_to_coords(&j0), PROJECTION_TOL, budget)
    }

    /// Maximize `Tr(J C)` over the set by projected ascent with an adaptive
    /// step, from the reference point and `starts − 1` samples seeded
    /// `seed, seed + 1, …`. Starts whose projections fail are skipped.
    pub fn maximize_linear(&self, c: &MatrixC, starts: usize, seed: u64) -> Result<LinearMax> {
        let side = self.ambient() * self.ambient();
        if c.shape() != (side, side) {
            return Err(Error::dim(format!("objective must be {side}x{side}")));
        }
        let g = self.choi_to_coords(c);
        let mut best_y = self.choi_to_coords(self.reference().choi());
        self.project_affine(&mut best_y);
        let mut best = dot(&g, &best_y);
        let mut seeds = Vec::new();
        for k in 0..starts.max(1) {
            let start = if k == 0 {
                Some(best_y.clone())
            } else {
                let s = seed.wrapping_add(k as u64 - 1);
                seeds.push(s);
                self.sample_coords(s, self.ascent_budget()).ok()
            };
            let Some(y) = start else { continue };
            let y = self.ascend(&g, y);
            let v = dot(&g, &y);
            if v > best {
                best = v;
                best_y = y;
            }
        }
        let point = self.coords_to_channel(&best_y);
        Ok(LinearMax {
            value: (point.choi() * c).trace().re,
            point,
            starts: starts.max(1),
            seeds,
            certificate: "probabilistic",
        })
    }

    fn ascent_budget(&self) -> usize {
        self.projection_budget().min(ASCENT_PROJECTION_BUDGET)
    }

    fn ascend(&self, g: &[f64], mut y: Vec<f64>) -> Vec<f64> {
        let gnorm = dot(g, g).sqrt();
        if gnorm == 0.0 {
            return y;
        }
        let mut value = dot(g, &y);
        let mut t = 1.0 / gnorm;
        let floor = 1e-6 / gnorm;
        for _ in 0..ASCENT_ROUNDS {
            let trial: Vec<f64> = y.iter().zip(g).map(|(a, b)| a + t * b).collect();
            match self.dykstra_coords(&trial, PROJECTION_TOL, self.ascent_budget()) {
                Ok(cand) if dot(g, &cand) > value + 1e-12 * (1.0 + value.abs()) => {
                    value = dot(g, &cand);
                    y = cand;
                    t *= 2.0;
                }
                _ => {
                    t *= 0.5;
                    if t < floor {
                        break;
                    }
                }
            }
        }
        y
    }
}

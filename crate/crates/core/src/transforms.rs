//! Coordinate and rank transforms feeding the CEV diagnostics.
//!
//! Two generalized polar maps are provided: relative to the origin (L1
//! radius, first-coordinate share) and relative to the axes (minimum
//! coordinate as radius, larger-over-smaller ratio as angle).

use serde::{Deserialize, Serialize};

use crate::error::{HrvError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPointOrigin {
    pub radius: f64,
    pub angle_w: f64,
}

impl PolarPointOrigin {
    /// Integer inputs come back exactly; otherwise the first coordinate is
    /// within one ulp.
    pub fn reconstruct(&self) -> (f64, f64) {
        let z1 = unscale(self.radius, self.angle_w);
        (z1, self.radius - z1)
    }
}

/// Inverse of `c / r`: the neighbour of `r * t` with the shortest mantissa
/// among those whose quotient by `r` rounds back to `t`.
fn unscale(r: f64, t: f64) -> f64 {
    let p = r * t;
    [p, p.next_down(), p.next_up()]
        .into_iter()
        .filter(|c| c / r == t)
        .max_by_key(|c| trailing_zero_bits(*c))
        .unwrap_or(p)
}

fn trailing_zero_bits(x: f64) -> u32 {
    let mantissa = x.to_bits() & ((1u64 << 52) - 1);
    if mantissa == 0 {
        52
    } else {
        mantissa.trailing_zeros()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Larger {
    First,
    Second,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPointAxes {
    pub radius: f64,
    pub theta: f64,
    pub which_larger: Larger,
}

impl PolarPointAxes {
    pub fn reconstruct(&self) -> (f64, f64) {
        match self.which_larger {
            Larger::First => (unscale(self.radius, self.theta), self.radius),
            Larger::Second => (self.radius, unscale(self.radius, self.theta)),
            Larger::Tie => (self.radius, self.radius),
        }
    }
}

/// GPOLAR relative to the origin with the L1 norm.
pub fn gpolar_origin(pair: (f64, f64)) -> Result<PolarPointOrigin> {
    let (z1, z2) = pair;
    if !(z1 >= 0.0 && z2 >= 0.0) {
        return Err(HrvError::Domain(format!(
            "GPOLAR (origin) needs nonnegative coordinates, got ({z1}, {z2})"
        )));
    }
    let radius = z1 + z2;
    if radius == 0.0 {
        return Err(HrvError::Domain(
            "GPOLAR (origin) is undefined at (0, 0)".to_string(),
        ));
    }
    Ok(PolarPointOrigin {
        radius,
        angle_w: z1 / radius,
    })
}

/// GPOLAR relative to the axes: `(min, max ratio)`.
pub fn gpolar_axes(pair: (f64, f64)) -> Result<PolarPointAxes> {
    let (z1, z2) = pair;
    if !(z1 > 0.0 && z2 > 0.0) {
        return Err(HrvError::Domain(format!(
            "GPOLAR (axes) needs strictly positive coordinates, got ({z1}, {z2})"
        )));
    }
    let p = if z1 > z2 {
        PolarPointAxes {
            radius: z2,
            theta: z1 / z2,
            which_larger: Larger::First,
        }
    } else if z2 > z1 {
        PolarPointAxes {
            radius: z1,
            theta: z2 / z1,
            which_larger: Larger::Second,
        }
    } else {
        PolarPointAxes {
            radius: z1,
            theta: 1.0,
            which_larger: Larger::Tie,
        }
    };
    Ok(p)
}

/// Ascending ranks by literal counting: `out[i] = #{j : x[i] >= x[j]}`.
/// Tied values all receive the largest count of their group.
pub fn rank_transform(x: &[f64]) -> Vec<usize> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    x.iter()
        .map(|v| sorted.partition_point(|s| s.total_cmp(v).is_le()))
        .collect()
}

/// Maps literal ascending ranks onto a standard Pareto(1) scale, `n / (n + 1 - r)`.
pub fn pareto_standardize(ranks: &[usize]) -> Vec<f64> {
    let n = ranks.len() as f64;
    ranks.iter().map(|&r| n / (n + 1.0 - r as f64)).collect()
}

/// Indices of the `k` largest keys, largest first; ties go to the lower index.
pub fn top_k_indices(keys: &[f64], k: usize) -> Vec<usize> {
    let mut idx = descending_order(keys);
    idx.truncate(k);
    idx
}

/// Stable descending order of `keys`.
pub(crate) fn descending_order(keys: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
    idx
}

/// `xi` sorted decreasingly together with the concomitant `eta` values.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcomitantTable {
    xi_desc: Vec<f64>,
    eta_star: Vec<f64>,
}

impl ConcomitantTable {
    pub fn new(xi: &[f64], eta: &[f64]) -> Result<Self> {
        if xi.len() != eta.len() {
            return Err(HrvError::Usage(format!(
                "xi and eta lengths differ ({} vs {})",
                xi.len(),
                eta.len()
            )));
        }
        if xi.is_empty() {
            return Err(HrvError::Usage(
                "concomitant table needs at least one pair".into(),
            ));
        }
        let order = descending_order(xi);
        Ok(ConcomitantTable {
            xi_desc: order.iter().map(|&i| xi[i]).collect(),
            eta_star: order.iter().map(|&i| eta[i]).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.xi_desc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi_desc.is_empty()
    }

    pub fn xi_desc(&self) -> &[f64] {
        &self.xi_desc
    }

    pub fn eta_star(&self) -> &[f64] {
        &self.eta_star
    }

    /// `N_j^k`: rank of `η*_j` among `η*_1..η*_k` (1-based, counted with `<=`).
    pub fn rank(&self, j: usize, k: usize) -> Result<usize> {
        self.check_jk(j, k)?;
        let target = self.eta_star[j - 1];
        Ok(self.eta_star[..k].iter().filter(|&&e| e <= target).count())
    }

    /// `[N_1^k, …, N_k^k]` in `O(k log k)`.
    pub fn ranks_within(&self, k: usize) -> Result<Vec<usize>> {
        self.check_jk(1, k)?;
        let top = &self.eta_star[..k];
        let mut sorted = top.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        Ok(top
            .iter()
            .map(|v| sorted.partition_point(|s| s <= v))
            .collect())
    }

    /// `η*_{a:b}`: the `a`-th smallest of the concomitants of the top `b` ξ's.
    pub fn order_stat(&self, a: usize, b: usize) -> Result<f64> {
        self.check_jk(a, b)?;
        let mut top = self.eta_star[..b].to_vec();
        let (_, nth, _) = top.select_nth_unstable_by(a - 1, |x, y| x.total_cmp(y));
        Ok(*nth)
    }

    fn check_jk(&self, j: usize, k: usize) -> Result<()> {
        if j == 0 || j > k || k > self.len() {
            return Err(HrvError::Usage(format!(
                "need 1 <= j <= k <= n, got j={j}, k={k}, n={}",
                self.len()
            )));
        }
        Ok(())
    }
}

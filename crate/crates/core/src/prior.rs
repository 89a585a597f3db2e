//! Activity priors from the multivariate Bernoulli (MVB) family.
//!
//! A prior assigns `p(alpha) ∝ exp(sum_omega c_omega prod_{n in omega} alpha_n)`
//! over binary activity vectors. Three forms are supported: independent
//! activities with probability `q`, the group model in which devices of a
//! group share one Bernoulli(`q`) activity, and an explicit coefficient map
//! for small device counts.
//!
//! MAP detection never needs the normalizing constant; it only uses the
//! multilinear exponent and its partial derivatives, which the
//! `epsilon_*` functions return.

use crate::error::{Error, Result};

/// Largest device count for an explicit coefficient map, which is sampled
/// and normalized by enumerating all `2^N` states.
pub const MAX_MVB_DEVICES: usize = 16;

/// One interaction term `c_omega` of an explicit MVB prior.
#[derive(Clone, Debug, PartialEq)]
pub struct MvbTerm {
    pub omega: Vec<usize>,
    pub c: f64,
}

/// Explicit MVB coefficients over `n_devices` devices. Subsets not listed
/// have coefficient zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MvbCoefficients {
    n_devices: usize,
    terms: Vec<MvbTerm>,
    /// Indices into `terms` of the terms containing each device.
    by_device: Vec<Vec<usize>>,
}

impl MvbCoefficients {
    pub fn new(n_devices: usize, terms: Vec<MvbTerm>) -> Result<Self> {
        let mut by_device = vec![Vec::new(); n_devices];
        let mut terms = terms;
        for (t, term) in terms.iter_mut().enumerate() {
            if term.omega.is_empty() {
                return Err(Error::InvalidConfig("MVB term with empty subset".into()));
            }
            if !term.c.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "MVB coefficient for {:?} is not finite",
                    term.omega
                )));
            }
            term.omega.sort_unstable();
            if term.omega.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "MVB subset {:?} repeats a device",
                    term.omega
                )));
            }
            for &n in &term.omega {
                if n >= n_devices {
                    return Err(Error::InvalidConfig(format!(
                        "MVB subset {:?} names device {n} but there are {n_devices}",
                        term.omega
                    )));
                }
                by_device[n].push(t);
            }
        }
        Ok(Self {
            n_devices,
            terms,
            by_device,
        })
    }

    pub fn n_devices(&self) -> usize {
        self.n_devices
    }

    pub fn terms(&self) -> &[MvbTerm] {
        &self.terms
    }

    /// `sum_omega c_omega prod_{n in omega} alpha_n` for soft or binary `alpha`.
    pub fn exponent(&self, alpha: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.c * t.omega.iter().map(|&n| alpha[n]).product::<f64>())
            .sum()
    }

    /// Partial derivative of [`Self::exponent`] with respect to `alpha_n`.
    pub fn derivative(&self, n: usize, alpha: &[f64]) -> f64 {
        self.by_device[n]
            .iter()
            .map(|&t| {
                let term = &self.terms[t];
                let rest: f64 = term
                    .omega
                    .iter()
                    .filter(|&&k| k != n)
                    .map(|&k| alpha[k])
                    .product();
                term.c * rest
            })
            .sum()
    }
}

/// Activity prior.
#[derive(Clone, Debug, PartialEq)]
pub enum PriorModel {
    /// Independent activities, each active with probability `q`.
    Iid { q: f64 },
    /// Devices in a group share one activity, active with probability `q`.
    /// `epsilon` controls how strongly within-group disagreement is
    /// suppressed by the MVB approximation used for detection.
    Group {
        groups: Vec<Vec<usize>>,
        q: f64,
        epsilon: f64,
    },
    /// Explicit coefficient map (at most [`MAX_MVB_DEVICES`] devices).
    Mvb(MvbCoefficients),
}

fn check_probability(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidConfig(format!("activity probability {q} is outside [0, 1]")));
    }
    Ok(())
}

impl PriorModel {
    pub fn iid(q: f64) -> Result<Self> {
        check_probability(q)?;
        Ok(Self::Iid { q })
    }

    /// Group prior over an explicit partition of `0..n_devices`.
    pub fn group(n_devices: usize, groups: Vec<Vec<usize>>, q: f64, epsilon: f64) -> Result<Self> {
        check_probability(q)?;
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("group epsilon {epsilon} must be positive")));
        }
        let mut seen = vec![false; n_devices];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::InvalidConfig("empty device group".into()));
            }
            for &n in g {
                if n >= n_devices || seen[n] {
                    return Err(Error::InvalidConfig(format!(
                        "device {n} is out of range or in two groups"
                    )));
                }
                seen[n] = true;
            }
        }
        if let Some(n) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidConfig(format!("device {n} is in no group")));
        }
        Ok(Self::Group { groups, q, epsilon })
    }

    /// Group prior with `k_groups` consecutive groups of equal size.
    pub fn group_contiguous(n_devices: usize, k_groups: usize, q: f64, epsilon: f64) -> Result<Self> {
        if k_groups == 0 || n_devices % k_groups != 0 {
            return Err(Error::InvalidConfig(format!(
                "{n_devices} devices cannot be split into {k_groups} equal groups"
            )));
        }
        let size = n_devices / k_groups;
        let groups = (0..k_groups).map(|k| (k * size..(k + 1) * size).collect()).collect();
        Self::group(n_devices, groups, q, epsilon)
    }

    pub fn mvb(coeffs: MvbCoefficients) -> Result<Self> {
        if coeffs.n_devices > MAX_MVB_DEVICES {
            return Err(Error::Capability(format!(
                "explicit MVB priors support at most {MAX_MVB_DEVICES} devices, got {}",
                coeffs.n_devices
            )));
        }
        Ok(Self::Mvb(coeffs))
    }

    /// Checks that the prior covers exactly `n_devices` devices.
    pub fn check_devices(&self, n_devices: usize) -> Result<()> {
        let covered = match self {
            Self::Iid { .. } => return Ok(()),
            Self::Group { groups, .. } => groups.iter().map(Vec::len).sum(),
            Self::Mvb(c) => c.n_devices,
        };
        if covered != n_devices {
            return Err(Error::InvalidConfig(format!(
                "prior covers {covered} devices but the system has {n_devices}"
            )));
        }
        Ok(())
    }

    /// Marginal activity probability, where it is a model parameter.
    pub fn activity_probability(&self) -> Option<f64> {
        match self {
            Self::Iid { q } | Self::Group { q, .. } => Some(*q),
            Self::Mvb(_) => None,
        }
    }

    /// Checks that the exponent is finite, which MAP detection requires.
    pub fn check_for_map(&self) -> Result<()> {
        if let Some(q) = self.activity_probability() {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "MAP detection needs an activity probability strictly inside (0, 1), got {q}"
                )));
            }
        }
        Ok(())
    }

    /// The exponent of `p(alpha)` at a binary or soft activity vector. The
    /// independent prior includes its normalization `N log(1 - q)`; the other
    /// forms omit the normalizer.
    pub fn log_pmf_unnormalized(&self, alpha: &[f64]) -> f64 {
        match self {
            Self::Iid { q } => {
                let active: f64 = alpha.iter().sum();
                log_odds(*q) * active + alpha.len() as f64 * (1.0 - q).ln()
            }
            Self::Group { groups, q, epsilon } => {
                let c = GroupCoefficients::new(*q, *epsilon);
                groups
                    .iter()
                    .map(|g| {
                        let vals: Vec<f64> = g.iter().map(|&n| alpha[n]).collect();
                        let e = elementary_symmetric(&vals);
                        (1..=g.len()).map(|k| c.by_size(k, g.len()) * e[k]).sum::<f64>()
                    })
                    .sum()
            }
            Self::Mvb(c) => c.exponent(alpha),
        }
    }

    /// `epsilon_n(alpha)`: partial derivative of the exponent with respect to
    /// `alpha_n`.
    pub fn epsilon_actual(&self, n: usize, alpha: &[f64]) -> f64 {
        match self {
            Self::Iid { q } => log_odds(*q),
            Self::Group { groups, q, epsilon } => {
                let c = GroupCoefficients::new(*q, *epsilon);
                let g = groups
                    .iter()
                    .find(|g| g.contains(&n))
                    .expect("validated partition covers every device");
                let others: Vec<f64> = g.iter().filter(|&&k| k != n).map(|&k| alpha[k]).collect();
                let e = elementary_symmetric(&others);
                (0..g.len()).map(|k| c.by_size(k + 1, g.len()) * e[k]).sum()
            }
            Self::Mvb(c) => c.derivative(n, alpha),
        }
    }

    /// Partial derivative with respect to the virtual activity `beta_i` of
    /// the exponent evaluated at the tap-averaged activities.
    pub fn epsilon_virtual(&self, i: usize, beta: &[f64], taps: usize) -> f64 {
        match self {
            Self::Iid { q } => log_odds(*q) / taps as f64,
            _ => {
                let alpha = tap_means(beta, taps);
                self.epsilon_actual(i / taps, &alpha) / taps as f64
            }
        }
    }

    /// Exponent of the virtual-device prior: the actual-device exponent at the
    /// tap-averaged activities.
    pub fn log_pmf_virtual(&self, beta: &[f64], taps: usize) -> f64 {
        self.log_pmf_unnormalized(&tap_means(beta, taps))
    }

    /// Draws a binary activity vector.
    pub fn sample(&self, n_devices: usize, rng: &mut impl rand::Rng) -> Result<Vec<bool>> {
        self.check_devices(n_devices)?;
        match self {
            Self::Iid { q } => Ok((0..n_devices).map(|_| rng.random::<f64>() < *q).collect()),
            Self::Group { groups, q, .. } => {
                let mut alpha = vec![false; n_devices];
                for g in groups {
                    let on = rng.random::<f64>() < *q;
                    for &n in g {
                        alpha[n] = on;
                    }
                }
                Ok(alpha)
            }
            Self::Mvb(c) => {
                let table = log_probabilities(self, c.n_devices)?;
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = table.len() - 1;
                for (state, lp) in table.iter().enumerate() {
                    acc += lp.exp();
                    if u < acc {
                        pick = state;
                        break;
                    }
                }
                Ok(state_vector(pick, c.n_devices).into_iter().map(|x| x == 1.0).collect())
            }
        }
    }
}

/// `log(q / (1 - q))`.
pub fn log_odds(q: f64) -> f64 {
    (q / (1.0 - q)).ln()
}

/// Per-device tap averages of a virtual activity vector.
pub fn tap_means(beta: &[f64], taps: usize) -> Vec<f64> {
    beta.chunks(taps).map(|c| c.iter().sum::<f64>() / taps as f64).collect()
}

/// Coefficients of the group model, which depend only on the subset size.
///
/// Subsets smaller than their group get `(-1)^|omega| log((1 - q) / epsilon)`,
/// a whole group of odd size `log(q / (1 - q))` and of even size
/// `log(q (1 - q) / epsilon^2)`. With these values an all-inactive group has
/// exponent `0`, an all-active one `log(q / (1 - q))` and every mixed state
/// `log(epsilon / (1 - q))`, so the group is active with probability `q`
/// given that it is consistent. See [`group_coefficients`].
#[derive(Clone, Copy, Debug)]
struct GroupCoefficients {
    partial: f64,
    full_odd: f64,
    full_even: f64,
}

impl GroupCoefficients {
    fn new(q: f64, epsilon: f64) -> Self {
        Self {
            partial: ((1.0 - q) / epsilon).ln(),
            full_odd: log_odds(q),
            full_even: (q * (1.0 - q) / (epsilon * epsilon)).ln(),
        }
    }

    fn by_size(&self, k: usize, group_size: usize) -> f64 {
        if k < group_size {
            if k % 2 == 0 {
                self.partial
            } else {
                -self.partial
            }
        } else if k % 2 == 1 {
            self.full_odd
        } else {
            self.full_even
        }
    }
}

/// Explicit coefficient map of the group prior: one term per nonempty subset
/// of every group. Exponential in the group size.
pub fn group_coefficients(n_devices: usize, groups: &[Vec<usize>], q: f64, epsilon: f64) -> Result<MvbCoefficients> {
    let c = GroupCoefficients::new(q, epsilon);
    let mut terms = Vec::new();
    for g in groups {
        if g.len() > 20 {
            return Err(Error::Capability(format!(
                "cannot expand a group of {} devices into subsets",
                g.len()
            )));
        }
        for mask in 1u32..(1u32 << g.len()) {
            let omega: Vec<usize> = (0..g.len()).filter(|b| mask >> b & 1 == 1).map(|b| g[b]).collect();
            let k = omega.len();
            terms.push(MvbTerm {
                omega,
                c: c.by_size(k, g.len()),
            });
        }
    }
    MvbCoefficients::new(n_devices, terms)
}

/// `e_0..e_k` of the values.
fn elementary_symmetric(vals: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; vals.len() + 1];
    e[0] = 1.0;
    for (j, &x) in vals.iter().enumerate() {
        for k in (1..=j + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Binary state with bit `n` of `state` as device `n`.
pub fn state_vector(state: usize, n_devices: usize) -> Vec<f64> {
    (0..n_devices).map(|n| (state >> n & 1) as f64).collect()
}

/// Normalized log-probabilities of all `2^N` states, indexed by bitmask.
pub fn log_probabilities(prior: &PriorModel, n_devices: usize) -> Result<Vec<f64>> {
    if n_devices > MAX_MVB_DEVICES {
        return Err(Error::Capability(format!(
            "enumeration supports at most {MAX_MVB_DEVICES} devices, got {n_devices}"
        )));
    }
    let raw: Vec<f64> = (0..1usize << n_devices)
        .map(|s| prior.log_pmf_unnormalized(&state_vector(s, n_devices)))
        .collect();
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + raw.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    Ok(raw.into_iter().map(|x| x - lse).collect())
}

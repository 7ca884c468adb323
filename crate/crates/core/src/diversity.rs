//! Diversity of order `q` for a community `(p, Z)`.
//!
//! `D_q(p) = 1 / M_{q-1}(p, Zp)`: the reciprocal of the power mean of order
//! `q - 1`, weighted by `p`, of the ordinariness vector `Zp`. Orders `q = 1`
//! and `q = inf` are evaluated from their closed forms.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{check_index_set, SimilarityMatrix};

/// Tolerance on `|sum(p) - 1|` accepted by [`Distribution::new`].
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Slack allowed when checking that a profile is nonincreasing.
pub const PROFILE_SLACK: f64 = 1e-9;

/// Beyond this exponent `x^t` is evaluated through logarithms.
const EXP_LIMIT: f64 = 700.0;

/// A probability distribution on `{0, .., n-1}` with its support cached.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution {
    probs: Vec<f64>,
    #[serde(skip)]
    support: Vec<usize>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no species".into()));
        }
        if let Some((i, &v)) = probs
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "p[{i}] = {v} is not a nonnegative number"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self::from_probs_unchecked(probs))
    }

    /// Normalizes a nonnegative, nonzero vector of abundances.
    pub fn from_abundances(abundances: &[f64]) -> Result<Self> {
        if let Some((i, &v)) = abundances
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "abundance {i} = {v} is not a nonnegative number"
            )));
        }
        let total: f64 = abundances.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("all abundances are zero".into()));
        }
        Ok(Self::from_probs_unchecked(
            abundances.iter().map(|a| a / total).collect(),
        ))
    }

    pub(crate) fn from_probs_unchecked(probs: Vec<f64>) -> Self {
        let support = probs
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, _)| i)
            .collect();
        Self { probs, support }
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self::from_probs_unchecked(vec![1.0 / n as f64; n])
    }

    /// Uniform on `indices`, zero elsewhere.
    pub fn uniform_on(n: usize, indices: &[usize]) -> Result<Self> {
        check_index_set(n, indices)?;
        let mut probs = vec![0.0; n];
        let mass = 1.0 / indices.len() as f64;
        for &i in indices {
            probs[i] = mass;
        }
        Ok(Self::from_probs_unchecked(probs))
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn has_full_support(&self) -> bool {
        self.support.len() == self.probs.len()
    }

    /// Restriction to `indices`; every species with positive abundance must
    /// lie in `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        check_index_set(self.n(), indices)?;
        let mut inside = vec![false; self.n()];
        for &i in indices {
            inside[i] = true;
        }
        if let Some(&i) = self.support.iter().find(|&&i| !inside[i]) {
            return Err(Error::InvalidIndexSet(format!(
                "species {i} has positive abundance but lies outside the subset"
            )));
        }
        Ok(Self::from_probs_unchecked(
            indices.iter().map(|&i| self.probs[i]).collect(),
        ))
    }

    /// Places `self` (indexed by `indices`) into `n` species, zero elsewhere.
    pub fn extend_by_zero(&self, indices: &[usize], n: usize) -> Result<Self> {
        check_index_set(n, indices)?;
        if indices.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: indices.len(),
            });
        }
        let mut probs = vec![0.0; n];
        for (&i, &p) in indices.iter().zip(&self.probs) {
            probs[i] = p;
        }
        Ok(Self::from_probs_unchecked(probs))
    }
}

/// Viewpoint parameter `q` in `[0, inf]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub const ZERO: Order = Order(0.0);
    pub const ONE: Order = Order(1.0);
    pub const TWO: Order = Order(2.0);
    pub const INFINITY: Order = Order(f64::INFINITY);

    pub fn new(q: f64) -> Result<Self> {
        if q.is_nan() || q < 0.0 {
            return Err(Error::InvalidOrder(q));
        }
        Ok(Order(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `{0, 0.25, 0.5, 1, 2, 4, 8, 16, inf}`.
    pub fn default_grid() -> Vec<Order> {
        [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, f64::INFINITY]
            .into_iter()
            .map(Order)
            .collect()
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "Infinity" | "∞" => Ok(Order::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidOrder(f64::NAN))
                .and_then(Order::new),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

/// Diversity values over an ascending list of orders.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiversityProfile {
    pub orders: Vec<Order>,
    pub values: Vec<f64>,
}

impl DiversityProfile {
    pub fn iter(&self) -> impl Iterator<Item = (Order, f64)> + '_ {
        self.orders.iter().copied().zip(self.values.iter().copied())
    }

    /// `max - min` over the profile.
    pub fn spread(&self) -> f64 {
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Weighted power mean `M_t(p, x)` over the support of `p`, for `t` in
/// `[-inf, inf]`.
pub fn power_mean(p: &Distribution, x: &[f64], t: f64) -> Result<f64> {
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: x.len(),
        });
    }
    if t.is_nan() {
        return Err(Error::Numerical("power mean order is NaN".into()));
    }
    if let Some(&i) = p.support().iter().find(|&&i| !(x[i] > 0.0)) {
        return Err(Error::DomainViolation { index: i, value: x[i] });
    }
    let weights: Vec<f64> = p.support().iter().map(|&i| p.probs[i]).collect();
    let values: Vec<f64> = p.support().iter().map(|&i| x[i]).collect();
    Ok(power_mean_on(&weights, &values, t))
}

/// Power mean of positive `values` with weights summing to one.
pub(crate) fn power_mean_on(weights: &[f64], values: &[f64], t: f64) -> f64 {
    if t == f64::INFINITY {
        return values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    if t == f64::NEG_INFINITY {
        return values.iter().copied().fold(f64::INFINITY, f64::min);
    }
    if t == 0.0 {
        let log_mean: f64 = weights.iter().zip(values).map(|(w, x)| w * x.ln()).sum();
        return log_mean.exp();
    }
    if t == 1.0 {
        return weights.iter().zip(values).map(|(w, x)| w * x).sum();
    }
    if t == -1.0 {
        let s: f64 = weights.iter().zip(values).map(|(w, x)| w / x).sum();
        return 1.0 / s;
    }
    let overflow = values.iter().any(|x| (t * x.ln()).abs() > EXP_LIMIT);
    if !overflow {
        let s: f64 = weights.iter().zip(values).map(|(w, x)| w * x.powf(t)).sum();
        return s.powf(1.0 / t);
    }
    // log-sum-exp: log sum w x^t = m + log sum w exp(t ln x - m)
    let logs: Vec<f64> = values.iter().map(|x| t * x.ln()).collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = weights.iter().zip(&logs).map(|(w, l)| w * (l - m).exp()).sum();
    ((m + s.ln()) / t).exp()
}

fn check_dims(z: &SimilarityMatrix, p: &Distribution) -> Result<()> {
    if z.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: z.n(),
            found: p.n(),
        });
    }
    Ok(())
}

/// `(Zp)_i` for `i` in the support of `p`, summing only over the support.
pub(crate) fn ordinariness_on_support(z: &SimilarityMatrix, probs: &[f64], support: &[usize]) -> Vec<f64> {
    support
        .iter()
        .map(|&i| {
            let row = z.row(i);
            support.iter().map(|&j| row[j] * probs[j]).sum()
        })
        .collect()
}

/// The full ordinariness vector `Zp`.
pub fn ordinariness(z: &SimilarityMatrix, p: &Distribution) -> Result<Vec<f64>> {
    check_dims(z, p)?;
    Ok((0..z.n())
        .map(|i| {
            let row = z.row(i);
            p.support().iter().map(|&j| row[j] * p.probs[j]).sum()
        })
        .collect())
}

/// Diversity from support weights and the ordinariness on the support.
pub(crate) fn diversity_from_parts(weights: &[f64], zp: &[f64], q: Order) -> f64 {
    let q = q.value();
    if q == 1.0 {
        let s: f64 = weights.iter().zip(zp).map(|(w, x)| w * x.ln()).sum();
        return (-s).exp();
    }
    if q.is_infinite() {
        return 1.0 / zp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    if q == 0.0 {
        return weights.iter().zip(zp).map(|(w, x)| w / x).sum();
    }
    1.0 / power_mean_on(weights, zp, q - 1.0)
}

/// `D_q^Z(p)`. Symmetry of `Z` is not required.
pub fn diversity(z: &SimilarityMatrix, p: &Distribution, q: Order) -> Result<f64> {
    check_dims(z, p)?;
    let weights: Vec<f64> = p.support().iter().map(|&i| p.probs[i]).collect();
    let zp = ordinariness_on_support(z, &p.probs, p.support());
    Ok(diversity_from_parts(&weights, &zp, q))
}

/// Diversity at each of `orders`, which must be nonempty and ascending.
pub fn diversity_profile(
    z: &SimilarityMatrix,
    p: &Distribution,
    orders: &[Order],
) -> Result<DiversityProfile> {
    check_dims(z, p)?;
    if orders.is_empty() || orders.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnsortedOrders);
    }
    let weights: Vec<f64> = p.support().iter().map(|&i| p.probs[i]).collect();
    let zp = ordinariness_on_support(z, &p.probs, p.support());
    let values: Vec<f64> = orders
        .iter()
        .map(|&q| diversity_from_parts(&weights, &zp, q))
        .collect();
    if let Some(k) = (1..values.len())
        .find(|&k| values[k] > values[k - 1] + PROFILE_SLACK * values[k - 1].max(1.0))
    {
        return Err(Error::Numerical(format!(
            "profile increases from {} at q = {} to {} at q = {}",
            values[k - 1],
            orders[k - 1],
            values[k],
            orders[k]
        )));
    }
    Ok(DiversityProfile {
        orders: orders.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_half() -> Distribution {
        Distribution::new(vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![1.5, -0.5]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        let p = Distribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(p.support(), &[0, 2]);
        assert!(!p.has_full_support());
        let a = Distribution::from_abundances(&[3.0, 1.0]).unwrap();
        assert_eq!(a.probs(), &[0.75, 0.25]);
        assert!(Distribution::from_abundances(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn power_mean_examples() {
        let u = half_half();
        for t in [f64::NEG_INFINITY, -3.0, -1.0, 0.0, 0.5, 1.0, 7.0, f64::INFINITY] {
            assert!((power_mean(&u, &[4.0, 4.0], t).unwrap() - 4.0).abs() < 1e-14);
        }
        assert_eq!(power_mean(&u, &[1.0, 4.0], 1.0).unwrap(), 2.5);
        assert!((power_mean(&u, &[1.0, 4.0], 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(power_mean(&u, &[1.0, 4.0], f64::INFINITY).unwrap(), 4.0);
        assert_eq!(power_mean(&u, &[1.0, 4.0], f64::NEG_INFINITY).unwrap(), 1.0);
        assert!(matches!(
            power_mean(&u, &[0.0, 4.0], 1.0),
            Err(Error::DomainViolation { index: 0, .. })
        ));
        // zero outside the support is fine
        let p = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(power_mean(&p, &[3.0, 0.0], 2.0).unwrap(), 3.0);
    }

    #[test]
    fn power_mean_survives_huge_exponents() {
        let u = half_half();
        let v = power_mean(&u, &[1e3, 2e3], 1e4).unwrap();
        assert!(v.is_finite() && v <= 2e3 && v > 1.99e3);
        let v = power_mean(&u, &[1e-3, 2e-3], -1e4).unwrap();
        assert!(v.is_finite() && v >= 1e-3 && v < 1.01e-3);
    }

    #[test]
    fn effective_numbers() {
        for n in 1..6 {
            let z = SimilarityMatrix::identity(n);
            for q in Order::default_grid() {
                let d = diversity(&z, &Distribution::uniform(n), q).unwrap();
                assert!((d - n as f64).abs() < 1e-12, "n={n} q={q} d={d}");
            }
        }
    }

    #[test]
    fn nonsymmetric_order_two() {
        let z = SimilarityMatrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        let d = diversity(&z, &half_half(), Order::TWO).unwrap();
        assert!((d - 1.6).abs() < 1e-15);
    }

    #[test]
    fn single_species_community() {
        let z = SimilarityMatrix::identity(2);
        let p = Distribution::new(vec![1.0, 0.0]).unwrap();
        for q in Order::default_grid() {
            assert_eq!(diversity(&z, &p, q).unwrap(), 1.0);
        }
    }

    #[test]
    fn three_species_order_two_is_reciprocal_quadratic_form() {
        let rows = [[1.0, 0.4, 0.4], [0.4, 1.0, 0.9], [0.4, 0.9, 1.0]];
        let z = SimilarityMatrix::from_rows(&rows.map(|r| r.to_vec())).unwrap();
        let p = Distribution::uniform(3);
        let mut form = 0.0;
        for (i, row) in rows.iter().enumerate() {
            for (j, zij) in row.iter().enumerate() {
                form += p.probs()[i] * zij * p.probs()[j];
            }
        }
        let d = diversity(&z, &p, Order::TWO).unwrap();
        assert!((d - 1.0 / form).abs() < 1e-14);
        // sum of entries is 6.4, so p^T Z p = 6.4 / 9
        assert!((d - 9.0 / 6.4).abs() < 1e-14);
    }

    #[test]
    fn profiles() {
        let z = SimilarityMatrix::identity(2);
        let orders: Vec<Order> = ["0", "1", "2", "inf"].iter().map(|s| s.parse().unwrap()).collect();
        let prof = diversity_profile(&z, &half_half(), &orders).unwrap();
        assert!(prof.values.iter().all(|v| (v - 2.0).abs() < 1e-14));

        let p = Distribution::new(vec![0.75, 0.25]).unwrap();
        let prof = diversity_profile(&z, &p, &[Order::ZERO, Order::INFINITY]).unwrap();
        assert_eq!(prof.values[0], 2.0);
        assert!((prof.values[1] - 4.0 / 3.0).abs() < 1e-15);

        assert!(matches!(
            diversity_profile(&z, &p, &[Order::TWO, Order::ONE]),
            Err(Error::UnsortedOrders)
        ));
        assert!(matches!(diversity_profile(&z, &p, &[]), Err(Error::UnsortedOrders)));
    }

    #[test]
    fn restriction_and_extension() {
        let p = Distribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        let r = p.restrict(&[0, 2]).unwrap();
        assert_eq!(r.probs(), &[0.5, 0.5]);
        assert_eq!(r.extend_by_zero(&[0, 2], 3).unwrap(), p);
        assert!(p.restrict(&[0, 1]).is_err());
        assert!(r.extend_by_zero(&[0], 3).is_err());
    }

    #[test]
    fn order_parsing() {
        assert_eq!("inf".parse::<Order>().unwrap(), Order::INFINITY);
        assert_eq!("0.5".parse::<Order>().unwrap().value(), 0.5);
        assert!("-1".parse::<Order>().is_err());
        assert!("x".parse::<Order>().is_err());
        assert_eq!(Order::INFINITY.to_string(), "inf");
        assert!(Order::new(f64::NAN).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let z = SimilarityMatrix::identity(3);
        assert!(matches!(
            diversity(&z, &half_half(), Order::ONE),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}

//! Embedded instances and random instance generators.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{BanditInstance, Matrix};

/// Booster-vaccine immunogenicity study: 20 prime/booster combinations, three
/// responses (anti-spike IgG, NT50, cellular response) with pooled variances.
pub const COVID_JSON: &str = include_str!("../data/covid.json");

/// Names accepted by [`by_name`].
pub const EMBEDDED: &[&str] = &["covid"];

pub fn covid() -> BanditInstance {
    BanditInstance::from_json(COVID_JSON).expect("embedded instance is valid")
}

pub fn by_name(name: &str) -> Option<BanditInstance> {
    match name {
        "covid" => Some(covid()),
        _ => None,
    }
}

/// Shape of a random point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// `p` points on the positive orthant of the unit sphere, plus the origin.
    SphereQuadrantPlusOrigin,
    /// `p` points of a two-objective staircase in `[0,10]²`, plus the origin.
    Staircase2d,
    /// `K` points uniform in `[0,10]^d`.
    UniformBox,
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere-quadrant-plus-origin" | "sphere" => Ok(Self::SphereQuadrantPlusOrigin),
            "staircase-2d" | "staircase" => Ok(Self::Staircase2d),
            "uniform-box" | "uniform" => Ok(Self::UniformBox),
            _ => Err(Error::Domain(format!("unknown geometry {s:?}"))),
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::SphereQuadrantPlusOrigin => "sphere-quadrant-plus-origin",
            Self::Staircase2d => "staircase-2d",
            Self::UniformBox => "uniform-box",
        })
    }
}

/// Random unit-variance instance. `size` is `p` for the two point clouds
/// (giving `K = p + 1`) and `K` for [`Geometry::UniformBox`].
pub fn generate<R: Rng + ?Sized>(geometry: Geometry, size: usize, d: usize, rng: &mut R) -> Result<BanditInstance> {
    if d == 0 {
        return Err(Error::Shape("need at least one objective".into()));
    }
    let rows = match geometry {
        Geometry::SphereQuadrantPlusOrigin => {
            let mut rows: Vec<Vec<f64>> = (0..size).map(|_| sphere_quadrant_point(d, rng)).collect();
            rows.push(vec![0.0; d]);
            rows
        }
        Geometry::Staircase2d => {
            if d != 2 {
                return Err(Error::Shape(format!("staircase needs d = 2, got {d}")));
            }
            let mut xs: Vec<f64> = (0..size).map(|_| rng.random_range(0.0..10.0)).collect();
            let mut ys: Vec<f64> = (0..size).map(|_| rng.random_range(0.0..10.0)).collect();
            xs.sort_by(f64::total_cmp);
            ys.sort_by(|a, b| b.total_cmp(a));
            let mut rows: Vec<Vec<f64>> = xs.into_iter().zip(ys).map(|(x, y)| vec![x, y]).collect();
            rows.push(vec![0.0, 0.0]);
            rows
        }
        Geometry::UniformBox => (0..size).map(|_| (0..d).map(|_| rng.random_range(0.0..10.0)).collect()).collect(),
    };
    BanditInstance::unit_variance(Matrix::from_rows(&rows)?)
}

fn sphere_quadrant_point<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Uniform point of the probability simplex.
pub fn random_simplex<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1) + 1e-300).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rescale_to_unit_variance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn covid_shape_and_front() {
        let c = covid();
        assert_eq!((c.num_arms(), c.dim()), (20, 3));
        assert_eq!(c.variances(), &[0.70, 0.83, 1.54]);
        assert_eq!(c.means().row(8), &[10.43, 7.61, 4.72]);
        assert_eq!(c.means().row(14), &[8.71, 7.2, 4.91]);
        assert_eq!(c.pareto_set().indices(), &[8, 18]);
        let labels = c.labels().unwrap();
        assert_eq!(labels[8], "BNT/BNT m1273");
        assert_eq!(labels[18], "ChAd/ChAd m1273");
    }

    #[test]
    fn covid_round_trips() {
        let c = covid();
        assert_eq!(BanditInstance::from_json(&c.to_json()).unwrap(), c);
        let (unit, sc) = rescale_to_unit_variance(&c);
        let back = sc.to_original(&unit);
        for (a, b) in back.as_slice().iter().zip(c.means().as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = generate(Geometry::SphereQuadrantPlusOrigin, 12, 3, &mut rng).unwrap();
        assert_eq!(s.num_arms(), 13);
        assert_eq!(s.pareto_set().len(), 12);
        for k in 0..12 {
            let r = s.means().row(k);
            assert!(r.iter().all(|x| *x >= 0.0));
            assert!((r.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let st = generate(Geometry::Staircase2d, 20, 2, &mut rng).unwrap();
        assert_eq!(st.pareto_set().len(), 20);
        assert!(generate(Geometry::Staircase2d, 5, 3, &mut rng).is_err());
        let u = generate(Geometry::UniformBox, 7, 4, &mut rng).unwrap();
        assert_eq!((u.num_arms(), u.dim()), (7, 4));
        let w = random_simplex(9, &mut rng);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12 && w.iter().all(|x| *x > 0.0));
        assert_eq!("staircase-2d".parse::<Geometry>().unwrap(), Geometry::Staircase2d);
    }
}

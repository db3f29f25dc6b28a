use heis_core::star::{moyal_product, symmetrized_product, AntisymmetricForm, MultiIndex, PolySymbol};
use heis_core::verify::Report;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{FormKind, RunConfig, StarConfig};
use crate::CliError;

fn random_form(rng: &mut ChaCha8Rng, n: usize, kind: FormKind) -> AntisymmetricForm {
    let mut m = DMatrix::zeros(n, n);
    if kind == FormKind::Random {
        for j in 0..n {
            for k in j + 1..n {
                let v = rng.random_range(-2.0..2.0);
                m[(j, k)] = v;
                m[(k, j)] = -v;
            }
        }
    }
    AntisymmetricForm::new(m).expect("antisymmetric by construction")
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> PolySymbol {
    let mut p = PolySymbol::zero(n);
    for _ in 0..rng.random_range(1..=4) {
        let degree = rng.random_range(0..=max_degree);
        let mut e = vec![0u32; n];
        for _ in 0..degree {
            e[rng.random_range(0..n)] += 1;
        }
        p.add_term(MultiIndex::new(e), Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)));
    }
    p
}

struct Worst {
    value: f64,
    instance: usize,
}

impl Worst {
    fn update(&mut self, v: f64, i: usize) {
        if !(v <= self.value) {
            self.value = v;
            self.instance = i;
        }
    }
}

/// Associativity, symmetrization and (for a zero form) pointwise-product checks
/// on seeded random instances.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let s: &StarConfig = &config.star;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut assoc = Worst { value: 0.0, instance: 0 };
    let mut symm = Worst { value: 0.0, instance: 0 };
    let mut pointwise = Worst { value: 0.0, instance: 0 };
    for i in 0..s.instances {
        let n = rng.random_range(1..=s.max_vars);
        let a = random_form(&mut rng, n, s.form);
        let (f, g, h) = (
            random_poly(&mut rng, n, s.max_degree),
            random_poly(&mut rng, n, s.max_degree),
            random_poly(&mut rng, n, s.max_degree),
        );
        let left = moyal_product(&moyal_product(&f, &g, &a)?, &h, &a)?;
        let right = moyal_product(&f, &moyal_product(&g, &h, &a)?, &a)?;
        assoc.update(left.relative_distance(&right), i);

        let forms: Vec<Vec<f64>> = (0..s.max_degree.min(4))
            .map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let sym = symmetrized_product(&forms, &a)?;
        let mono = forms.iter().try_fold(PolySymbol::one(n), |acc, v| acc.pointwise_mul(&PolySymbol::linear(v)))?;
        symm.update(sym.relative_distance(&mono), i);

        if s.form == FormKind::Zero {
            pointwise.update(moyal_product(&f, &g, &a)?.relative_distance(&f.pointwise_mul(&g)?), i);
        }
    }
    let mut report = Report::new("star-check");
    let tol = s.tolerance;
    report.check(
        "star: associativity",
        assoc.value,
        tol,
        assoc.value < tol,
        format!("{} instances, worst #{}", s.instances, assoc.instance),
    );
    report.check(
        "star: symmetrized product of linear forms",
        symm.value,
        tol,
        symm.value < tol,
        format!("{} instances, worst #{}", s.instances, symm.instance),
    );
    if s.form == FormKind::Zero {
        report.check(
            "star: pointwise product at A = 0",
            pointwise.value,
            tol,
            pointwise.value < tol,
            format!("{} instances", s.instances),
        );
    }
    Ok(report)
}

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use torsionlab::deformation::{DeformationProfile, ProfileKind};
use torsionlab::operator1d::{BoundarySpec, DegreeBoundaryMap, DiscreteOperator};
use torsionlab::spectral::{eigenvalues, gelfand_yaglom_logdet_piecewise};

fn bench_eigensolve(c: &mut Criterion) {
    let profile = DeformationProfile::with_default_width(8.0, ProfileKind::CirclePeriodic).unwrap();
    let (d0, _) =
        DiscreteOperator::assemble_witten_pair(&profile, 2000, DegreeBoundaryMap::ABSOLUTE)
            .unwrap();
    c.bench_function("sturm_eigensolve_k10_n2000", |b| {
        b.iter_batched(
            || d0.clone(),
            |op| eigenvalues(&op, 10).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn bench_gelfand_yaglom(c: &mut Criterion) {
    let profile = DeformationProfile::with_default_width(8.0, ProfileKind::IntervalOdd).unwrap();
    let breaks = profile.breakpoints();
    c.bench_function("gelfand_yaglom_deformed_T8", |b| {
        b.iter(|| {
            let v = |s: f64| {
                let (_, fp, fpp) = profile.eval(s.clamp(-2.0, 2.0)).unwrap();
                fp * fp - fpp
            };
            gelfand_yaglom_logdet_piecewise(v, -2.0, 2.0, BoundarySpec::DIRICHLET, &breaks).unwrap()
        })
    });
}

criterion_group!(benches, bench_eigensolve, bench_gelfand_yaglom);
criterion_main!(benches);

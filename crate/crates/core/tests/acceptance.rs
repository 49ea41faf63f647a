//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sphfn::verify::DEFAULT_STEP;
use sphfn::{
    build_group, closed_form_spherical, eigen_check, equivalent, eval_spherical, fingerprint, gram_matrix, lattice_compatible,
    normalization_constant, posdef_verdict, spherical_transform, verify_functional_equation, ClosedFormQuery, EvalConfig,
    GroupHandle, GroupSpec, Method, MethodPreference, MotionElement, RadialProfile, SpectralParam, TransformInput,
    Verdict,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn group(spec: GroupSpec) -> Result<GroupHandle, String> {
    build_group(&spec).map_err(err)
}

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

/// J₀ by its power series Σ (−z²/4)^k / (k!)².
fn j0_series(z: f64) -> f64 {
    let q = -z * z / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// Composite Simpson with `m` (even) intervals.
fn simpson<F: Fn(f64) -> Complex64>(a: f64, b: f64, m: usize, f: F) -> Complex64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

fn criterion_1() -> Outcome {
    let so2 = group(GroupSpec::SpecialOrthogonal { n: 2 })?;
    let xi = SpectralParam::real(&[2.0, 0.0]);
    let x = v(&[1.0, 0.0]);
    let oracle = j0_series(2.0);
    let exact = eval_spherical(&so2, &xi, &x, &EvalConfig::default()).map_err(err)?;
    ensure(exact.method == Method::TorusQuadrature, || format!("method {:?}", exact.method))?;
    let e1 = (exact.value - c(oracle, 0.0)).norm();
    ensure(e1 <= 1e-10, || format!("torus quadrature off by {e1:e}"))?;
    let cfg = EvalConfig::default().with_method(MethodPreference::MonteCarlo).with_samples(100_000);
    let mc = eval_spherical(&so2, &xi, &x, &cfg).map_err(err)?;
    let e2 = (mc.value - c(oracle, 0.0)).norm();
    ensure(e2 <= 3.0 * mc.stderr, || format!("Monte Carlo off by {e2:e}, stderr {:e}", mc.stderr))?;
    ensure(mc.stderr > 5e-4 && mc.stderr < 5e-3, || format!("stderr {:e}", mc.stderr))?;
    Ok(format!("quadrature error {e1:.1e}; MC error {e2:.1e} with stderr {:.1e}", mc.stderr))
}

fn criterion_2() -> Outcome {
    let specs = [
        GroupSpec::SpecialOrthogonal { n: 4 },
        GroupSpec::Unitary { m: 2 },
        GroupSpec::SpecialUnitary { m: 2 },
        GroupSpec::Symplectic { m: 1, extension: Default::default() },
    ];
    let handles: Vec<GroupHandle> = specs.into_iter().map(group).collect::<Result<_, _>>()?;
    let mut worst: f64 = 0.0;
    for (lambda, r) in [(1.0, 0.5), (2.0, 1.5)] {
        let xi = SpectralParam::real(&[lambda, 0.0, 0.0, 0.0]);
        let x = v(&[r, 0.0, 0.0, 0.0]);
        let exact = closed_form_spherical(&ClosedFormQuery::new(4, c(lambda, 0.0), r)).map_err(err)?;
        // n = 4: 2 J₁(t)/t
        let t = lambda * r;
        let j1 = (1.0 / PI) * simpson(0.0, PI, 2000, |th| c((th - t * th.sin()).cos(), 0.0)).re;
        ensure((exact.re - 2.0 * j1 / t).abs() < 1e-10, || format!("closed form {exact} vs 2J₁(t)/t {}", 2.0 * j1 / t))?;
        let mut estimates = Vec::new();
        for (i, h) in handles.iter().enumerate() {
            let cfg = EvalConfig::default().with_method(MethodPreference::MonteCarlo).with_samples(100_000).with_seed(1000 + i as u64);
            let e = eval_spherical(h, &xi, &x, &cfg).map_err(err)?;
            ensure(e.method == Method::MonteCarlo, || format!("{:?} used {:?}", h.spec(), e.method))?;
            let d = (e.value - exact).norm();
            ensure(d <= 3.0 * e.stderr, || format!("{:?} at ({lambda},{r}): off closed form by {d:e}, stderr {:e}", h.spec(), e.stderr))?;
            worst = worst.max(d / e.stderr);
            estimates.push(e);
        }
        for i in 0..estimates.len() {
            for j in i + 1..estimates.len() {
                let (a, b) = (estimates[i], estimates[j]);
                let sigma = a.stderr.hypot(b.stderr);
                let d = (a.value - b.value).norm();
                ensure(d <= 3.0 * sigma, || format!("groups {i} and {j} at ({lambda},{r}) differ by {d:e}, combined stderr {sigma:e}"))?;
                worst = worst.max(d / sigma);
            }
        }
    }
    Ok(format!("largest deviation {worst:.2} stderr"))
}

fn criterion_3() -> Outcome {
    let want = 3f64.sin() / 3.0;
    let got = closed_form_spherical(&ClosedFormQuery::new(3, c(1.5, 0.0), 2.0)).map_err(err)?;
    let e1 = (got - c(want, 0.0)).norm();
    ensure(e1 <= 1e-12, || format!("closed form {got} vs {want}"))?;
    // normalized Poisson integral for n = 3: ½∫₀^π e^{itcosθ} sinθ dθ
    let quad = simpson(0.0, PI, 4000, |th| c(0.0, 3.0 * th.cos()).exp() * (0.5 * th.sin()));
    let e2 = (quad - c(want, 0.0)).norm();
    ensure(e2 <= 1e-12, || format!("quadrature {quad} vs {want}"))?;
    Ok(format!("closed form error {e1:.1e}, quadrature error {e2:.1e}"))
}

fn criterion_4() -> Outcome {
    ensure(normalization_constant(2) == 1.0, || format!("c(2) = {}", normalization_constant(2)))?;
    // c(n) = 2^{(n−2)/2} Γ(n/2) from Γ(1) = 1, Γ(1/2) = √π and Γ(s+1) = sΓ(s)
    for n in 2..=8usize {
        let mut gamma = if n % 2 == 0 { 1.0 } else { PI.sqrt() };
        let mut s = if n % 2 == 0 { 1.0 } else { 0.5 };
        while s < n as f64 / 2.0 {
            gamma *= s;
            s += 1.0;
        }
        let want = 2f64.powf((n as f64 - 2.0) / 2.0) * gamma;
        let got = normalization_constant(n);
        ensure((got - want).abs() <= 1e-14 * want, || format!("c({n}) = {got} vs {want}"))?;
        let at_zero = closed_form_spherical(&ClosedFormQuery::new(n, c(1.3, 0.4), 0.0)).map_err(err)?;
        ensure((at_zero - c(1.0, 0.0)).norm() <= 1e-14, || format!("n = {n}: value at 0 is {at_zero}"))?;
    }
    Ok("c(2) = 1; value at the origin is 1 for n = 2..8".into())
}

fn random_motion(h: &GroupHandle, rng: &mut ChaCha8Rng) -> MotionElement {
    let elements = h.elements().expect("finite group");
    let k = elements[rng.random_range(0..elements.len())].clone();
    MotionElement { translation: DVector::from_fn(2, |_, _| StandardNormal.sample(rng)), rotation: k }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut complex = 0;
    for spec in [GroupSpec::cyclic(4), GroupSpec::dihedral(4)] {
        let h = group(spec)?;
        for t in 0..50 {
            let re: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut rng)).collect();
            let im: Vec<f64> = if t % 2 == 0 { (0..2).map(|_| StandardNormal.sample(&mut rng)).collect() } else { vec![0.0; 2] };
            complex += (t % 2 == 0) as usize;
            let xi = SpectralParam::from_parts(&re, &im).map_err(err)?;
            let (g1, g2) = (random_motion(&h, &mut rng), random_motion(&h, &mut rng));
            let r = verify_functional_equation(&h, &xi, &g1, &g2, &EvalConfig::default()).map_err(err)?;
            ensure(r.method == Method::FiniteSum, || format!("method {:?}", r.method))?;
            ensure(r.residual <= 1e-10, || format!("{:?} triple {t}: residual {:e}", h.spec(), r.residual))?;
            worst = worst.max(r.residual);
        }
    }
    Ok(format!("100 triples ({complex} with complex ξ), largest residual {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let c4 = group(GroupSpec::cyclic(4))?;
    let x = v(&[0.3, 0.7]);
    let cfg = EvalConfig::default();
    let est = eigen_check(&c4, &SpectralParam::real(&[2.0, 0.0]), &x, DEFAULT_STEP, &cfg).map_err(err)?;
    let e1 = (est - c(4.0, 0.0)).norm() / 4.0;
    ensure(e1 <= 1e-4, || format!("C4 estimate {est}"))?;
    let so2 = group(GroupSpec::SpecialOrthogonal { n: 2 })?;
    let xi = SpectralParam::new(vec![c(1.0, 0.0), c(0.0, 0.5)]);
    let b = xi.square();
    let est2 = eigen_check(&so2, &xi, &x, DEFAULT_STEP, &cfg).map_err(err)?;
    let e2 = (est2 - b).norm() / b.norm();
    ensure(e2 <= 1e-4, || format!("SO(2) estimate {est2} vs {b}"))?;
    Ok(format!("relative errors {e1:.1e} (C4) and {e2:.1e} (SO(2), b = {})", b.re))
}

fn criterion_7() -> Outcome {
    let c4 = group(GroupSpec::cyclic(4))?;
    let s = 2f64.sqrt() / 2.0;
    let (e1, e2, e3) = (SpectralParam::real(&[1.0, 0.0]), SpectralParam::real(&[0.0, 1.0]), SpectralParam::real(&[s, s]));
    ensure(equivalent(&c4, &e1, &e2, 1e-9).map_err(err)?, || "(1,0) ~ (0,1) not detected".into())?;
    ensure(!equivalent(&c4, &e1, &e3, 1e-9).map_err(err)?, || "(1,0) ~ (√2/2,√2/2) wrongly reported".into())?;
    // sweep probes: directions at several radii, C4 evaluated by its exact sum
    let mut best: f64 = 0.0;
    let cfg = EvalConfig::default();
    for k in 0..16 {
        let th = k as f64 * PI / 16.0;
        for r in [0.5, 1.0, 2.0, 3.0] {
            let x = v(&[r * th.cos(), r * th.sin()]);
            let a = eval_spherical(&c4, &e1, &x, &cfg).map_err(err)?;
            let b = eval_spherical(&c4, &e3, &x, &cfg).map_err(err)?;
            best = best.max((a.value - b.value).norm());
        }
    }
    ensure(best > 1e-6, || format!("largest sweep difference {best:e}"))?;

    let so2 = group(GroupSpec::SpecialOrthogonal { n: 2 })?;
    let null = SpectralParam::new(vec![c(1.0, 0.0), c(0.0, 1.0)]);
    ensure(equivalent(&so2, &null, &SpectralParam::zeros(2), 1e-9).map_err(err)?, || "(1,i) ~ 0 not detected".into())?;
    let fp = fingerprint(&so2, &null).map_err(err)?;
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let x = v(&[0.4 * k as f64, 1.0 - 0.3 * k as f64]);
        let val = eval_spherical(&so2, &null, &x, &cfg).map_err(err)?;
        worst = worst.max((val.value - c(1.0, 0.0)).norm());
    }
    ensure(worst <= 1e-12, || format!("φ_(1,i) departs from 1 by {worst:e}"))?;
    Ok(format!("C4 pair separated by {best:.3}; SO(2) fingerprint {}, |φ − 1| ≤ {worst:.1e}", fp.values[0]))
}

fn criterion_8() -> Outcome {
    let specs = [GroupSpec::cyclic(4), GroupSpec::dihedral(4), GroupSpec::SpecialOrthogonal { n: 2 }, GroupSpec::SpecialOrthogonal { n: 3 }];
    let handles: Vec<GroupHandle> = specs.into_iter().map(group).collect::<Result<_, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut notes = Vec::new();
    for t in 0..10 {
        let h = &handles[t % handles.len()];
        let n = h.ambient_dim();
        let re: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let xi = SpectralParam::real(&re);
        let cfg = EvalConfig::default().with_seed(80 + t as u64).with_samples(20_000);
        let report = posdef_verdict(h, &xi, &cfg).map_err(err)?;
        let bound = if report.propagated_stderr > 0.0 { -3.0 * report.propagated_stderr } else { -1e-9 };
        ensure(report.min_eigenvalue >= bound, || format!("{:?}, ξ = {re:?}: min eigenvalue {:e} below {bound:e}", h.spec(), report.min_eigenvalue))?;
        ensure(report.verdict == Verdict::ConsistentPSD, || format!("{:?}: verdict {:?}", h.spec(), report.verdict))?;
        notes.push(report.min_eigenvalue);
    }
    let so2 = &handles[2];
    let xi = SpectralParam::new(vec![c(0.0, 1.0), c(0.0, 0.0)]);
    let report = posdef_verdict(so2, &xi, &EvalConfig::default()).map_err(err)?;
    ensure(report.verdict == Verdict::ViolatedPSD, || format!("ξ = (i,0) verdict {:?}", report.verdict))?;
    // two translations 3 apart give the entry I₀(3) = (1/π)∫₀^π e^{3cosθ} dθ
    let i0 = simpson(0.0, PI, 2000, |th| c((3.0 * th.cos()).exp() / PI, 0.0)).re;
    let pts = [MotionElement::identity(2), MotionElement::translation(v(&[3.0, 0.0]))];
    let pair = gram_matrix(so2, &xi, &pts, &EvalConfig::default()).map_err(err)?;
    let entry = pair.matrix[(0, 1)];
    ensure((entry - c(i0, 0.0)).norm() <= 1e-9, || format!("off-diagonal {entry} vs I₀(3) = {i0}"))?;
    ensure(entry.re > 1.0 && pair.verdict == Verdict::ViolatedPSD, || format!("pair verdict {:?}", pair.verdict))?;
    let lowest = notes.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(format!(
        "10 real ξ consistent (lowest eigenvalue {lowest:.1e}); (i,0) violated, off-diagonal {:.4}, min eigenvalue {:.3}",
        entry.re, pair.min_eigenvalue
    ))
}

fn criterion_9() -> Outcome {
    let so2 = group(GroupSpec::SpecialOrthogonal { n: 2 })?;
    let profile = |points| RadialProfile::from_fn(6.0, points, |r| c((-r * r).exp(), 0.0)).map_err(err);
    let input = TransformInput::Radial(profile(2001)?);
    let refined = TransformInput::Radial(profile(8001)?);
    let xis: Vec<SpectralParam> = (0..4).map(|l| SpectralParam::real(&[l as f64, 0.0])).collect();
    let cfg = EvalConfig::default();
    let got = spherical_transform(&input, &so2, &xis, &cfg).map_err(err)?;
    let fine = spherical_transform(&refined, &so2, &xis, &cfg).map_err(err)?;
    let mut worst: f64 = 0.0;
    for (l, (g, f)) in got.iter().zip(&fine).enumerate() {
        let want = PI * (-((l * l) as f64) / 4.0).exp();
        let rel = (g.value - c(want, 0.0)).norm() / want;
        let rel_fine = (g.value - f.value).norm() / want;
        ensure(rel <= 1e-3 && rel_fine <= 1e-3, || format!("λ = {l}: {} vs {want} (refined {})", g.value, f.value))?;
        worst = worst.max(rel);
    }
    // ∫f over the disc of radius 6
    let total = PI * (1.0 - (-36f64).exp());
    let rel0 = (got[0].value - c(total, 0.0)).norm() / total;
    ensure(rel0 <= 1e-6, || format!("ξ = 0 value {} vs ∫f = {total}", got[0].value))?;
    Ok(format!("largest relative error {worst:.1e}; ξ = 0 matches ∫f to {rel0:.1e}"))
}

fn criterion_10() -> Outcome {
    let basis = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
    let on = lattice_compatible(&SpectralParam::real(&[2.0 * PI, 0.0]), &basis, 1e-12).map_err(err)?;
    let off = lattice_compatible(&SpectralParam::real(&[1.0, 0.0]), &basis, 1e-12).map_err(err)?;
    ensure(on && !off, || format!("2πe₁ → {on}, e₁ → {off}"))?;
    Ok("2πe₁ compatible, e₁ not".into())
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let configs = [
        ("c4", r#"{"group": {"kind": "finite", "dim": 2, "generators": [[[0, -1], [1, 0]]]}, "xi": [[1, 0.5], -2], "radial_grid": {"start": 0, "stop": 4, "count": 41, "direction": [1, 2]}}"#),
        ("so2", r#"{"group": {"kind": "so", "n": 2}, "xi": [2, [0, 1]], "radial_grid": {"start": 0, "stop": 4, "count": 41, "direction": [3, 1]}}"#),
    ];
    let mut lines = 0;
    for (name, text) in configs {
        let cfg = dir.path().join(format!("{name}.json"));
        std::fs::write(&cfg, text).map_err(err)?;
        let mut outputs = Vec::new();
        for (run, threads) in [1, 8, 1, 8].into_iter().enumerate() {
            let out = dir.path().join(format!("{name}-{run}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_sphfn"))
                .args(["eval", "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .args(["--threads", &threads.to_string()])
                .status()
                .map_err(err)?;
            ensure(status.success(), || format!("{name}: eval exited with {status}"))?;
            outputs.push(std::fs::read(&out).map_err(err)?);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{name}: outputs differ between runs"))?;
        lines += outputs[0].iter().filter(|&&b| b == b'\n').count();
    }
    Ok(format!("byte-identical CSV over 4 runs each for C4 and SO(2) ({lines} lines)"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("closed form and group average agree for SO(2)", criterion_1),
        ("SO(4), U(2), SU(2), Sp(1) give the same function", criterion_2),
        ("n = 3 closed form is sin(t)/t", criterion_3),
        ("normalization constant and value at the origin", criterion_4),
        ("functional equation for C4 and D4", criterion_5),
        ("Laplacian eigenvalue b(ξ,ξ)", criterion_6),
        ("equivalence through invariant fingerprints", criterion_7),
        ("positive definiteness exactly for real parameters", criterion_8),
        ("spherical transform of a Gaussian", criterion_9),
        ("lattice compatibility", criterion_10),
        ("deterministic CSV across thread counts", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        match check() {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail} ({:.1}s)", i + 1, started.elapsed().as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::Instant;

use foguel_core::dilation::{
    compress_generalized, dilation_with_corner_sign, foguel_power, halmos_dilation, unitarity_defect,
    verify_poly_bound, Polynomial, DISK_SAMPLES,
};
use foguel_core::experiment::{render_report, run_experiment, Experiment, ExperimentConfig, OutputFormat};
use foguel_core::kernel::{hermitian_eigenvalues, max_abs, operator_norm, symmetrize};
use foguel_core::models::{
    build_foguel, complex_gaussian, embed_corner, haar_unitary, random_contraction, random_symbol, scalar_matrix,
    truncated_shift, FoguelOperator, SeededGenerator,
};
use foguel_core::schur::{foguel_positivity, neumann_eval, neumann_tail_bound, norm_by_bisection, schur_correction};
use foguel_core::spectral::{
    foguel_inverse, foguel_norm_closed, gram_minus_identity_inverse, inverse_branches, resolvent_blocks,
    resolvent_blocks_scaled, resolvent_coefficient, verify_spectral_mapping, DEFAULT_SPECTRAL_GAP,
};
use foguel_core::{CMatrix, Error, Tolerance};
use nalgebra::Complex;
use rand::Rng;
use rayon::prelude::*;

type M = CMatrix<f64>;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const DIMS: [usize; 6] = [1, 2, 4, 8, 16, 32];

fn gen(criterion: u64, trial: u64) -> SeededGenerator {
    SeededGenerator::new(0xF0_6E_00 + criterion, trial)
}

fn unitary_foguel(n: usize, g: &SeededGenerator) -> Result<FoguelOperator<f64>, Error> {
    let v = haar_unitary::<f64>(n, &g.fork(0))?;
    let t = random_symbol::<f64>(n, &g.fork(2))?;
    build_foguel(v, t, true)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

/// Runs `count` trials in parallel, returning the worst value of `f` or the first failure.
fn worst<F>(count: u64, f: F) -> Result<f64, String>
where
    F: Fn(u64) -> Result<f64, String> + Sync,
{
    let values: Vec<Result<f64, String>> = (0..count).into_par_iter().map(&f).collect();
    let mut max = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        max = max.max(v.map_err(|e| format!("trial {i}: {e}"))?);
    }
    Ok(max)
}

fn norm_identity() -> Outcome {
    let dev = worst(500, |i| {
        let f = unitary_foguel(DIMS[i as usize % DIMS.len()], &gen(1, i)).map_err(err)?;
        let tn = f.symbol_norm().map_err(err)?;
        let d = (f.norm().map_err(err)? - foguel_norm_closed(tn).map_err(err)?).abs() / (1.0 + tn);
        ensure(d <= 1e-8, || format!("normalized deviation {d:e}"))?;
        Ok(d)
    })?;
    let golden = build_foguel(scalar_matrix(1, 1.0f64), scalar_matrix(1, 1.0), true).map_err(err)?;
    let g = golden.norm().map_err(err)?;
    ensure((g - 1.618_033_988_7).abs() <= 1e-10, || {
        format!("golden fixture gave {g}")
    })?;
    Ok(format!(
        "500 trials, max deviation/(1+|T|) {dev:.2e}; golden fixture {g:.12}"
    ))
}

fn spectral_mapping() -> Outcome {
    let results: Vec<Result<(f64, f64), String>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let f = unitary_foguel(DIMS[i as usize % DIMS.len()], &gen(2, i)).map_err(err)?;
            let tn = f.symbol_norm().map_err(err)?;
            let tol = Tolerance::absolute(1e-8 * (1.0 + tn * tn)).map_err(err)?;
            let r = verify_spectral_mapping(&f, tol).map_err(err)?;
            ensure(r.within_tolerance, || {
                format!("spectral deviation {:e}", r.max_deviation)
            })?;
            ensure(r.max_pair_product_error <= 1e-12, || {
                format!("branch product error {:e}", r.max_pair_product_error)
            })?;
            Ok((r.max_deviation / (1.0 + tn * tn), r.max_pair_product_error))
        })
        .collect();
    let (mut dev, mut pair) = (0.0f64, 0.0f64);
    for (i, r) in results.into_iter().enumerate() {
        let (d, p) = r.map_err(|e| format!("trial {i}: {e}"))?;
        dev = dev.max(d);
        pair = pair.max(p);
    }
    Ok(format!(
        "200 trials, max deviation/(1+|T|^2) {dev:.2e}, max branch product error {pair:.2e}"
    ))
}

fn gap_lambda(f: &FoguelOperator<f64>, g: &SeededGenerator) -> Result<f64, Error> {
    let spectrum = hermitian_eigenvalues(&symmetrize(&f.symbol_gram()))?;
    let top = spectrum[spectrum.len() - 1];
    let gap = 1e-3 * (1.0 + top);
    let mut rng = g.fork(5).rng();
    loop {
        let mu: f64 = rng.random_range(1e-3..1.25 * top + 1.0);
        if spectrum.iter().all(|s| (s - mu).abs() >= gap) {
            let (lo, hi) = inverse_branches(mu)?;
            return Ok(if rng.random_bool(0.5) { hi } else { lo });
        }
    }
}

fn resolvent() -> Outcome {
    let results: Vec<Result<(f64, f64), String>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let g = gen(3, i);
            let f = unitary_foguel(DIMS[i as usize % DIMS.len()], &g).map_err(err)?;
            let lambda = gap_lambda(&f, &g).map_err(err)?;
            let r = resolvent_blocks(&f, lambda).map_err(err)?;
            let link = r.link_residual(&f).map_err(err)?;
            ensure(r.residual <= 1e-8, || {
                format!("resolvent residual {:e} at lambda {lambda}", r.residual)
            })?;
            ensure(link <= 1e-9, || format!("link residual {link:e} at lambda {lambda}"))?;
            Ok((r.residual, link))
        })
        .collect();
    let (mut res, mut link) = (0.0f64, 0.0f64);
    for (i, r) in results.into_iter().enumerate() {
        let (a, b) = r.map_err(|e| format!("trial {i}: {e}"))?;
        res = res.max(a);
        link = link.max(b);
    }

    let f = build_foguel(scalar_matrix(1, 1.0f64), scalar_matrix(1, 1.0), true).map_err(err)?;
    let r = resolvent_blocks(&f, 4.0).map_err(err)?;
    let fixture = [(r.a[(0, 0)], -0.6), (r.x[(0, 0)], -0.2), (r.b[(0, 0)], -0.4)];
    let fixture_err = fixture
        .iter()
        .map(|(z, want)| (z - Complex::new(*want, 0.0)).norm())
        .fold(0.0, f64::max);
    ensure(fixture_err <= 1e-14, || {
        format!("lambda = 4 fixture off by {fixture_err:e}")
    })?;
    let literal = resolvent_blocks_scaled(&f, 4.0, 4.0 / 3.0, DEFAULT_SPECTRAL_GAP).map_err(err)?;
    ensure(
        (literal.a[(0, 0)].re + 0.6).abs() > 1e-3 && literal.residual > 1e-3,
        || "literal lambda/(lambda-1) coefficient unexpectedly reproduces the fixture".into(),
    )?;
    let corrected = resolvent_coefficient(4.0).map_err(err)?;
    Ok(format!(
        "200 trials, max residual {res:.2e}, max link residual {link:.2e}; fixture exact to {fixture_err:.1e} \
         with coefficient {corrected}; literal coefficient residual {:.3}",
        literal.residual
    ))
}

fn inverse_witnesses() -> Outcome {
    let results: Vec<Result<(f64, f64), String>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let f = unitary_foguel(DIMS[i as usize % DIMS.len()], &gen(4, i)).map_err(err)?;
            let tn = f.symbol_norm().map_err(err)?;
            let inv = foguel_inverse(&f).map_err(err)?;
            let a = inv.residual / (1.0 + tn);
            ensure(a <= 1e-10, || format!("block inverse residual/(1+|T|) {a:e}"))?;
            let w = gram_minus_identity_inverse(&f).map_err(err)?;
            let b = w.residual / (w.symbol_condition * w.symbol_condition);
            ensure(b <= 1e-9, || format!("witness residual/cond^2 {b:e}"))?;
            Ok((a, b))
        })
        .collect();
    let (mut a, mut b) = (0.0f64, 0.0f64);
    for (i, r) in results.into_iter().enumerate() {
        let (x, y) = r.map_err(|e| format!("trial {i}: {e}"))?;
        a = a.max(x);
        b = b.max(y);
    }
    Ok(format!(
        "200 trials each, max R_T inverse residual/(1+|T|) {a:.2e}, max witness residual/cond^2 {b:.2e}"
    ))
}

fn dilation_and_compression() -> Outcome {
    let defect = worst(1000, |i| {
        let a = random_contraction::<f64>(1 + (i as usize % 12), &gen(5, i)).map_err(err)?;
        let d = unitarity_defect(&halmos_dilation(&a).map_err(err)?).map_err(err)?;
        ensure(d <= 1e-9, || format!("dilation defect {d:e}"))?;
        Ok(d)
    })?;
    let slack = worst(1000, |i| {
        let g = gen(50, i);
        let n = 1 + (i as usize % 12);
        let a = random_contraction::<f64>(n, &g.fork(1)).map_err(err)?;
        let t = random_symbol::<f64>(n, &g.fork(2)).map_err(err)?;
        let r = compress_generalized(&a, &t).map_err(err)?;
        ensure(r.norm_r <= r.bound + 1e-8, || {
            format!("norm {} exceeds bound {}", r.norm_r, r.bound)
        })?;
        Ok(-r.slack())
    })?;
    let fixture = random_contraction::<f64>(4, &SeededGenerator::new(2024, 0)).map_err(err)?;
    let plus = unitarity_defect(&dilation_with_corner_sign(&fixture, 1.0).map_err(err)?).map_err(err)?;
    ensure(plus > 0.1, || format!("+A* dilation defect only {plus:e}"))?;
    Ok(format!(
        "1000 dilations, max defect {defect:.2e}; 1000 compressions, 0 violations, min slack {:.2e}; \
         +A* fixture defect {plus:.3}",
        -slack
    ))
}

fn random_polynomial(max_degree: usize, g: &SeededGenerator) -> Polynomial<f64> {
    let mut rng = g.rng();
    let degree = rng.random_range(0..=max_degree);
    let coeffs = complex_gaussian::<f64>(degree + 1, 1, &mut rng);
    Polynomial::new(coeffs.iter().copied().collect()).normalized(1.0)
}

fn power_and_polynomial() -> Outcome {
    let formula = worst(200, |i| {
        let g = gen(6, i);
        let n = 1 + (i as usize % 8);
        let v = haar_unitary::<f64>(n, &g.fork(0)).map_err(err)?;
        let t = random_symbol::<f64>(n, &g.fork(2)).map_err(err)?;
        let r = foguel_core::models::assemble_upper(&v.adjoint(), &t, &v);
        let tn = operator_norm(&t).map_err(err)?;
        let mut direct = r.clone();
        let mut worst_dev = 0.0f64;
        for k in 1..=10 {
            if k > 1 {
                direct = &direct * &r;
            }
            let block = foguel_power(&v, &t, k).map_err(err)?;
            let norm = operator_norm(&block).map_err(err)?;
            let dev = max_abs(&(&block - &direct)) / norm.max(1.0);
            ensure(dev <= 1e-9, || format!("power {k}: relative deviation {dev:e}"))?;
            let bound = foguel_norm_closed(k as f64 * tn).map_err(err)?;
            ensure(norm <= bound + 1e-8, || {
                format!("power {k}: norm {norm} exceeds bound {bound}")
            })?;
            worst_dev = worst_dev.max(dev);
        }
        Ok(worst_dev)
    })?;
    let poly_slack = worst(100, |i| {
        let g = gen(60, i);
        let n = 1 + (i as usize % 8);
        let a = random_contraction::<f64>(n, &g.fork(1)).map_err(err)?;
        let t = random_symbol::<f64>(n, &g.fork(2)).map_err(err)?;
        let p = random_polynomial(8, &g.fork(3));
        ensure(p.sup_norm_on_disk(DISK_SAMPLES) <= 1.0 + 1e-10, || {
            "normalization failed".into()
        })?;
        let r = verify_poly_bound(&p, &a, &t).map_err(err)?;
        ensure(r.norm_p_r <= r.bound + 1e-8, || {
            format!("norm {} exceeds bound {}", r.norm_p_r, r.bound)
        })?;
        Ok(-r.slack)
    })?;
    let one = scalar_matrix(1, 1.0f64);
    let eq = verify_poly_bound(&Polynomial::monomial(2), &one, &one).map_err(err)?;
    ensure(eq.slack.abs() <= 1e-10, || {
        format!("equality fixture slack {:e}", eq.slack)
    })?;
    Ok(format!(
        "200 trials of powers 1..=10, max relative formula deviation {formula:.2e}, 0 bound violations; \
         100 polynomials, min slack {:.2e}; z^2 fixture slack {:.1e}",
        -poly_slack, eq.slack
    ))
}

fn schur_route() -> Outcome {
    let ambiguous = worst(500, |i| {
        let g = gen(7, i);
        let f = unitary_foguel(DIMS[i as usize % 5], &g).map_err(err)?;
        let phi = foguel_norm_closed(f.symbol_norm().map_err(err)?).map_err(err)?;
        let m = 1.0 + 1e-3 + g.fork(4).rng().random_range(0.0..2.0 * phi);
        let c = foguel_positivity(&f, m).map_err(err)?;
        Ok(if c.ambiguous { 1.0 } else { 0.0 })
    })?;
    let neumann = worst(200, |i| {
        let g = gen(70, i);
        let f = unitary_foguel(DIMS[i as usize % 5], &g).map_err(err)?;
        let tn = f.symbol_norm().map_err(err)?;
        let m = 1.0 + 1e-2 + g.fork(4).rng().random_range(0.0..3.0);
        let closed: M = symmetrize(&f.symbol_gram()) / Complex::new(m * m - 1.0, 0.0);
        let exact = schur_correction(f.v(), f.t(), m).map_err(err)?;
        let d = operator_norm(&(exact - &closed)).map_err(err)? / (tn * tn);
        ensure(d <= 1e-10, || format!("closed form deviation/|T|^2 {d:e}"))?;
        let series = neumann_eval(f.v(), f.t(), m, 40).map_err(err)?;
        let trunc = operator_norm(&(series - &closed)).map_err(err)?;
        let bound = neumann_tail_bound(tn, m, 40) + 1e-10 * tn * tn;
        ensure(trunc <= bound, || {
            format!("truncation {trunc:e} exceeds tail bound {bound:e}")
        })?;
        Ok(d)
    })?;
    let results: Vec<Result<(f64, usize), String>> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let f = unitary_foguel(DIMS[i as usize % 5], &gen(71, i)).map_err(err)?;
            let b = norm_by_bisection(&f, Tolerance::absolute(1e-9).map_err(err)?).map_err(err)?;
            let svd = f.assembled().singular_values().max();
            let phi = foguel_norm_closed(f.symbol_norm().map_err(err)?).map_err(err)?;
            let d = (b.norm - svd).abs().max((b.norm - phi).abs());
            ensure(d <= 1e-6, || {
                format!("bisection {} vs svd {svd} and closed form {phi}", b.norm)
            })?;
            ensure(b.iterations <= 60, || format!("{} iterations", b.iterations))?;
            Ok((d, b.iterations))
        })
        .collect();
    let (mut dev, mut iters) = (0.0f64, 0usize);
    for (i, r) in results.into_iter().enumerate() {
        let (d, k) = r.map_err(|e| format!("trial {i}: {e}"))?;
        dev = dev.max(d);
        iters = iters.max(k);
    }
    Ok(format!(
        "500 positivity draws, 0 disagreements{}; Neumann closed form max {neumann:.2e}; \
         200 bisections, max deviation {dev:.2e}, max {iters} iterations",
        if ambiguous > 0.0 {
            " (some in singular band)"
        } else {
            ""
        }
    ))
}

fn shift_truncation() -> Outcome {
    let t = random_symbol::<f64>(4, &gen(8, 0)).map_err(err)?;
    let phi = foguel_norm_closed(operator_norm(&t).map_err(err)?).map_err(err)?;
    let dims = [16usize, 64, 256];
    let norms: Vec<f64> = dims
        .par_iter()
        .map(|&n| build_foguel(truncated_shift(n), embed_corner(&t, n)?, false)?.norm())
        .collect::<Result<_, _>>()
        .map_err(err)?;
    for k in 0..dims.len() {
        ensure(norms[k] <= phi + 1e-10, || {
            format!("N = {}: norm {} exceeds {phi}", dims[k], norms[k])
        })?;
        if k > 0 {
            ensure(norms[k] >= norms[k - 1] - 1e-12, || {
                format!("norm decreases at N = {}", dims[k])
            })?;
        }
    }
    Ok(format!(
        "norms {:.10} <= {:.10} <= {:.10}, closed form {phi:.10}, gap at N = 256: {:.3e}",
        norms[0],
        norms[1],
        norms[2],
        phi - norms[2]
    ))
}

fn determinism() -> Outcome {
    let mut bytes = 0;
    for e in Experiment::ALL {
        for format in [OutputFormat::JsonLines, OutputFormat::Csv] {
            let mut cfg = ExperimentConfig::new(e);
            cfg.seed = 4242;
            cfg.trials = 6;
            cfg.dim = if e == Experiment::ShiftConvergence { 3 } else { 5 };
            cfg.shift_dims = vec![8, 32];
            cfg.format = format;
            let a = run_experiment(&cfg).map_err(|e| e.to_string())?;
            let b = run_experiment(&cfg).map_err(|e| e.to_string())?;
            let (ra, rb) = (render_report(&a, format), render_report(&b, format));
            ensure(ra == rb, || format!("{e} ({format:?}) reports differ"))?;
            bytes += ra.len();
        }
    }
    Ok(format!(
        "9 experiments x 2 formats byte-identical ({bytes} bytes compared)"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("norm identity", norm_identity),
        ("spectral mapping", spectral_mapping),
        ("resolvent construction", resolvent),
        ("inverse witnesses", inverse_witnesses),
        ("dilation and compression", dilation_and_compression),
        ("power and polynomial bounds", power_and_polynomial),
        ("Schur route", schur_route),
        ("shift truncation", shift_truncation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} [{secs:.2}s]: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} [{secs:.2}s]: {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

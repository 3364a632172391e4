//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use qslab_core::almost_abelian::{
    ad_invariance_criterion, build_g_phi, classify_3d, decide_rigidity, heisenberg_identification,
    heisenberg_quasistate, table_phi, zeta_alpha_c, AlmostAbelianSpec, Class3d, SublinearFunction, TableFamily,
};
use qslab_core::frame::{
    basic_identity_residual, check_frame_identity, CVector, default_test_points, orthogonal_partner, random_complex,
    triviality_pipeline, FrameFunction, PipelineVerdict,
};
use qslab_core::lie::homomorphism_residual;
use qslab_core::motion::{
    eq_projector_residual, extract_and_check, motion_ad_quasistate, no_mixed_decomposition_check,
    pinv_quadratic_quasistate, random_element, random_skew_hermitian, range_linear_quasistate, reconstruct,
    spectral_data, MotionAlgebra, MotionElement,
};
use qslab_core::quasistate::{check_ad_invariance, check_quasistate, decompose, pullback, QuasiState};
use qslab_core::reductive::{
    eval_at_matrix, gw_quasistate, nilpotent_doubling_conjugator, AlgebraKind, MatrixAlgebraElement,
};
use qslab_core::sampling;
use qslab_core::LinearMap;

const SAMPLES: usize = 1000;
const SEED: u64 = 42;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget_secs: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < budget_secs as f64, || {
        format!("runtime {:.1}s exceeds {budget_secs}s", elapsed.as_secs_f64())
    })
}

// ---- criteria 1 and 2: the ζ_{α,c} grid ----

fn grid_phis() -> Vec<(&'static str, Vec<Vec<f64>>)> {
    vec![
        ("phi2", vec![vec![0.0, 1.0], vec![0.0, 0.0]]),
        ("phi3", vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]]),
        ("id2", vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        ("diag(1,0)", vec![vec![1.0, 0.0], vec![0.0, 0.0]]),
        ("rotation", vec![vec![0.0, 1.0], vec![-1.0, 0.0]]),
        ("swap", vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
    ]
}

fn grid_cs(spec: &AlmostAbelianSpec) -> Vec<(&'static str, SublinearFunction)> {
    let w = spec.w_dim();
    let q = spec.quotient_complement();
    let inner = if q.ncols() == 0 {
        SublinearFunction::zero(0)
    } else {
        SublinearFunction::arctan(q.ncols())
    };
    vec![
        ("zero", SublinearFunction::zero(w)),
        ("arctan", SublinearFunction::arctan(w)),
        ("power0.5", SublinearFunction::power(w, 0.5, 1.0).unwrap()),
        ("quotient_invariant", SublinearFunction::quotient_invariant(q, inner).unwrap()),
    ]
}

struct Cell {
    label: String,
    spec: AlmostAbelianSpec,
    alpha: DVector<f64>,
    c: SublinearFunction,
}

fn grid() -> Vec<Cell> {
    let mut cells = Vec::new();
    for (k, (name, rows)) in grid_phis().into_iter().enumerate() {
        let spec = AlmostAbelianSpec::from_matrix(&rows).unwrap();
        let mut rng = sampling::rng(1000 + k as u64);
        let alphas = [
            sampling::gaussian_vector(&mut rng, spec.v_dim()),
            spec.random_annihilator(&mut rng),
            sampling::gaussian_vector(&mut rng, spec.v_dim()),
        ];
        for (cname, c) in grid_cs(&spec) {
            for (ai, alpha) in alphas.iter().enumerate() {
                cells.push(Cell {
                    label: format!("{name}/{cname}/alpha{ai}"),
                    spec: spec.clone(),
                    alpha: alpha.clone(),
                    c: c.clone(),
                });
            }
        }
    }
    cells
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cells = grid();
    let mut worst = 0.0_f64;
    for cell in &cells {
        let zeta = zeta_alpha_c(&cell.spec, &cell.alpha, &cell.c, 0.0).map_err(|e| format!("{}: {e}", cell.label))?;
        let r = check_quasistate(&zeta, SAMPLES, SEED).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_residual);
        ensure(r.passed(), || format!("{}: residual {:e}", cell.label, r.max_residual))?;
    }
    within(start.elapsed(), 30)?;
    Ok(format!(
        "{} cells, max residual {worst:.2e}, {:.1}s",
        cells.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let cells = grid();
    let (mut invariant, mut not_invariant) = (0, 0);
    for cell in &cells {
        let zeta = zeta_alpha_c(&cell.spec, &cell.alpha, &cell.c, 0.0).map_err(|e| e.to_string())?;
        let r = check_ad_invariance(&zeta, SAMPLES, SEED).map_err(|e| e.to_string())?;
        let crit = ad_invariance_criterion(&cell.spec, &cell.alpha, &cell.c).map_err(|e| e.to_string())?;
        let predicted = crit.condition_i && crit.condition_ii;
        ensure(r.passed() == predicted, || {
            format!(
                "{}: check says {}, conditions (i)={} (ii)={} (residual {:e})",
                cell.label,
                r.passed(),
                crit.condition_i,
                crit.condition_ii,
                r.max_residual
            )
        })?;
        if predicted {
            invariant += 1;
        } else {
            not_invariant += 1;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{} cells agree ({invariant} invariant, {not_invariant} not), {:.1}s",
        cells.len(),
        start.elapsed().as_secs_f64()
    ))
}

// ---- criterion 3: rigidity table ----

fn criterion_3() -> Outcome {
    let mut rows: Vec<(TableFamily, f64, Class3d, bool)> = vec![
        (TableFamily::L1, 0.0, Class3d::L1, true),
        (TableFamily::L2, 0.0, Class3d::L2, true),
    ];
    for a in [-1.0, 0.0, 1.0, 2.0] {
        rows.push((TableFamily::L3, a, Class3d::L3 { a }, true));
    }
    for a in [-1.0, 1.0, 2.0] {
        rows.push((TableFamily::L4, a, Class3d::L4 { a }, true));
    }
    rows.push((TableFamily::L4, 0.0, Class3d::L4 { a: 0.0 }, false));
    for (family, a, expected, rigid) in &rows {
        let spec = AlmostAbelianSpec::new(table_phi(*family, *a)).map_err(|e| e.to_string())?;
        let v = decide_rigidity(&spec).map_err(|e| e.to_string())?;
        ensure(v.rigid == *rigid, || format!("{family:?}({a}): rigid = {}", v.rigid))?;
        ensure(v.witness.is_some() != *rigid, || format!("{family:?}({a}): witness presence"))?;
        let class = classify_3d(&build_g_phi(&spec)).map_err(|e| e.to_string())?;
        ensure(class.same_class(expected), || format!("{family:?}({a}): classified as {class:?}"))?;
    }
    Ok(format!("{} table entries, only L4(0) non-rigid", rows.len()))
}

// ---- criterion 4: witness soundness ----

fn padded_jordan(n: usize, pad: usize) -> AlmostAbelianSpec {
    let d = n + pad;
    let m = DMatrix::from_fn(d, d, |i, j| {
        if i < n && j == i + 1 && j < n {
            1.0
        } else if i >= n && i == j {
            1.0
        } else {
            0.0
        }
    });
    AlmostAbelianSpec::new(LinearMap::new(m)).unwrap()
}

fn criterion_4() -> Outcome {
    let mut worst_step = 0.0_f64;
    let mut checked = 0;
    for n in 2..=5 {
        for pad in [0, 2] {
            let spec = padded_jordan(n, pad);
            let label = format!("J{n}+I{pad}");
            let v = decide_rigidity(&spec).map_err(|e| e.to_string())?;
            let w = v.witness.ok_or_else(|| format!("{label}: no witness"))?;
            // Re-verify every step independently of the stored residuals.
            let mut source = Arc::new(build_g_phi(&spec));
            for (k, step) in w.chain.iter().enumerate() {
                let res = homomorphism_residual(&source, &step.target, &step.map).map_err(|e| e.to_string())?;
                worst_step = worst_step.max(res);
                ensure(res <= 1e-9, || format!("{label} step {k}: bracket residual {res:e}"))?;
                source = step.target.clone();
            }
            let class = classify_3d(w.terminal()).map_err(|e| e.to_string())?;
            ensure(class.same_class(&Class3d::L4 { a: 0.0 }), || format!("{label}: terminal {class:?}"))?;

            let g = Arc::new(build_g_phi(&spec));
            let p = heisenberg_identification().compose(&w.composite()).map_err(|e| e.to_string())?;
            for (a, c) in [
                (0.8, SublinearFunction::arctan(1)),
                (-1.3, SublinearFunction::power(1, 0.5, 1.0).unwrap()),
            ] {
                let base = heisenberg_quasistate(a, &c).map_err(|e| e.to_string())?;
                let zeta = pullback(g.clone(), &p, &base).map_err(|e| e.to_string())?;
                let qs = check_quasistate(&zeta, SAMPLES, SEED).map_err(|e| e.to_string())?;
                let ad = check_ad_invariance(&zeta, SAMPLES, SEED).map_err(|e| e.to_string())?;
                ensure(qs.passed(), || format!("{label}: pulled-back quasi-state residual {:e}", qs.max_residual))?;
                ensure(ad.passed(), || format!("{label}: pulled-back Ad residual {:e}", ad.max_residual))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pullbacks pass, max step residual {worst_step:.2e}"))
}

// ---- criterion 5: reductive vanishing on sl2(R) ----

fn real_sl2(m: &DMatrix<f64>) -> MatrixAlgebraElement {
    MatrixAlgebraElement::real(AlgebraKind::Sl2R, m).unwrap()
}

/// Random `g` with `det g = 1` and bounded condition number.
fn random_sl2_group(rng: &mut sampling::SeededRng) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(2, 2, |_, _| sampling::uniform(rng, -2.0, 2.0));
        let d = g.determinant();
        if d > 0.5 {
            return g / d.sqrt();
        }
    }
}

fn criterion_5() -> Outcome {
    let lambda = 1.7;
    let zeta = gw_quasistate(AlgebraKind::Sl2R, lambda).map_err(|e| e.to_string())?;
    let mut rng = sampling::rng(SEED);
    let mut worst_zero = 0.0_f64;
    for k in 0..200 {
        let m = if k < 100 {
            let t = sampling::uniform(&mut rng, 0.1, 5.0);
            let g = random_sl2_group(&mut rng);
            let inv = g.clone().try_inverse().unwrap();
            &g * DMatrix::from_row_slice(2, 2, &[t, 0.0, 0.0, -t]) * inv
        } else {
            let phi = sampling::uniform(&mut rng, 0.0, std::f64::consts::TAU);
            let s = sampling::uniform(&mut rng, 0.1, 3.0);
            let u = DVector::from_vec(vec![phi.cos(), phi.sin()]);
            let v = DVector::from_vec(vec![-phi.sin(), phi.cos()]);
            &u * v.transpose() * s
        };
        let value = eval_at_matrix(&zeta, &real_sl2(&m)).map_err(|e| e.to_string())?;
        worst_zero = worst_zero.max(value.abs());
        ensure(value.abs() <= 1e-10, || format!("ζ = {value:e} on {m}"))?;
    }

    let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let mut worst_elliptic = 0.0_f64;
    for _ in 0..100 {
        let theta = sampling::uniform(&mut rng, -5.0, 5.0);
        let g = random_sl2_group(&mut rng);
        let m = &g * (&j * theta) * g.clone().try_inverse().unwrap();
        let value = eval_at_matrix(&zeta, &real_sl2(&m)).map_err(|e| e.to_string())?;
        let err = (value - lambda * theta).abs();
        worst_elliptic = worst_elliptic.max(err);
        ensure(err <= 1e-8, || format!("elliptic θ={theta}: ζ = {value}, expected {}", lambda * theta))?;
    }

    let ad = check_ad_invariance(&zeta, SAMPLES, SEED).map_err(|e| e.to_string())?;
    ensure(ad.passed(), || format!("Ad residual {:e}", ad.max_residual))?;

    let mut worst_doubling = 0.0_f64;
    for _ in 0..100 {
        let phi = sampling::uniform(&mut rng, 0.0, std::f64::consts::TAU);
        let s = sampling::uniform(&mut rng, -3.0, 3.0);
        let u = DVector::from_vec(vec![phi.cos(), phi.sin()]);
        let v = DVector::from_vec(vec![-phi.sin(), phi.cos()]);
        let x = &u * v.transpose() * s;
        let g = nilpotent_doubling_conjugator(&x).map_err(|e| e.to_string())?;
        let moved = &g * &x * g.clone().try_inverse().ok_or("singular conjugator")?;
        let err = (moved - &x * 2.0).amax();
        worst_doubling = worst_doubling.max(err);
        ensure(err <= 1e-10, || format!("doubling residual {err:e} on {x}"))?;
    }
    Ok(format!(
        "|ζ| ≤ {worst_zero:.1e} off-elliptic, elliptic error {worst_elliptic:.1e}, doubling {worst_doubling:.1e}"
    ))
}

// ---- criterion 6: frame functions ----

fn criterion_6() -> Outcome {
    let mut worst_identity = 0.0_f64;
    let mut worst_basic = 0.0_f64;
    for n in 2..=4 {
        let mut rng = sampling::rng(SEED + n as u64);
        let a = random_complex(&mut rng, n, 1.5);
        let builtins = [FrameFunction::linear_real(a.clone()), FrameFunction::squared_norm(n)];
        for f in &builtins {
            let r = check_frame_identity(f, SAMPLES, SEED).map_err(|e| e.to_string())?;
            worst_identity = worst_identity.max(r.max_residual);
            ensure(r.passed() && r.max_residual <= 1e-10, || {
                format!("n={n} {}: frame residual {:e}", f.describe(), r.max_residual)
            })?;
            for _ in 0..200 {
                let radius = sampling::choose(&mut rng, &[0.1, 1.0, 10.0]);
                let u = random_complex(&mut rng, n, radius);
                let v = orthogonal_partner(&mut rng, &u, u.norm());
                let res = basic_identity_residual(f, &u, &v).map_err(|e| e.to_string())?;
                let scale = 1.0 + f.eval(&u).unwrap().abs() + f.eval(&v).unwrap().abs();
                worst_basic = worst_basic.max(res.abs() / scale);
                ensure(res.abs() <= 1e-10 * scale, || format!("n={n}: basic identity residual {res:e}"))?;
            }
        }

        let points = default_test_points(n, 8, SEED);
        let zero = triviality_pipeline(&FrameFunction::zero(n), &points, 60, SEED).map_err(|e| e.to_string())?;
        ensure(zero.verdict == PipelineVerdict::Trivial, || format!("n={n}: f=0 gave {:?}", zero.verdict))?;
        let nonzero = [
            FrameFunction::linear_real(a.clone()),
            FrameFunction::squared_norm(n),
            FrameFunction::norm(n),
            FrameFunction::combination(vec![
                (2.0, FrameFunction::linear_real(a.clone())),
                (-0.5, FrameFunction::squared_norm(n)),
            ])
            .map_err(|e| e.to_string())?,
        ];
        for f in &nonzero {
            let r = triviality_pipeline(f, &points, 60, SEED).map_err(|e| e.to_string())?;
            ensure(r.verdict != PipelineVerdict::Trivial, || {
                format!("n={n}: {} reported trivial", f.describe())
            })?;
        }

        let norm = check_frame_identity(&FrameFunction::norm(n), SAMPLES, SEED).map_err(|e| e.to_string())?;
        ensure(!norm.passed(), || format!("n={n}: ‖·‖ passed the frame identity"))?;
        let w = &norm.worst_case;
        ensure(w.get("u").is_some() && w.get("v").is_some(), || {
            format!("n={n}: ‖·‖ failure has no (u, v) witness")
        })?;
    }
    Ok(format!(
        "frame residual {worst_identity:.1e}, basic identity {worst_basic:.1e}, pipeline verdicts as expected"
    ))
}

// ---- criterion 7: motion-algebra reconstruction ----

fn normalized_family(n: usize) -> Vec<(String, QuasiState)> {
    let m = MotionAlgebra::new(n).unwrap();
    let mut rng = sampling::rng(SEED + 100 + n as u64);
    let a = random_complex(&mut rng, n, 1.3);
    let quad = pinv_quadratic_quasistate(n).unwrap();
    let lin = range_linear_quasistate(a).unwrap();
    let both = quad.sum(&lin).unwrap();
    let coeffs = sampling::gaussian_vector(&mut rng, m.algebra().dim());
    let cont = QuasiState::linear(m.algebra().clone(), coeffs)
        .unwrap()
        .sum(&motion_ad_quasistate(n, 2.0).unwrap())
        .unwrap();
    let z0 = decompose(&cont, m.split()).unwrap().zeta0;
    vec![
        ("zero".into(), QuasiState::zero(m.algebra().clone())),
        ("pinv_quadratic".into(), quad),
        ("range_linear".into(), lin),
        ("pinv_quadratic+range_linear".into(), both),
        ("normalized part of linear+motion_ad".into(), z0),
    ]
}

fn continuous_family(n: usize) -> Vec<(String, QuasiState)> {
    let m = MotionAlgebra::new(n).unwrap();
    let mut rng = sampling::rng(SEED + 200 + n as u64);
    let coeffs = sampling::gaussian_vector(&mut rng, m.algebra().dim());
    let linear = QuasiState::linear(m.algebra().clone(), coeffs).unwrap();
    let ad = motion_ad_quasistate(n, -0.6).unwrap();
    let both = linear.sum(&ad).unwrap();
    vec![
        ("linear".into(), linear),
        ("motion_ad".into(), ad),
        ("linear+motion_ad".into(), both),
    ]
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut worst_sum = 0.0_f64;
    let mut worst_eq = 0.0_f64;
    let mut worst_trip = 0.0_f64;
    for n in [2, 3] {
        let mut rng = sampling::rng(SEED + n as u64);
        for _ in 0..100 {
            let radius = sampling::choose(&mut rng, &[0.1, 1.0, 10.0]);
            let x = random_skew_hermitian(&mut rng, n, radius);
            let res = spectral_data(&x).map_err(|e| e.to_string())?.projector_sum_residual();
            worst_sum = worst_sum.max(res);
            ensure(res <= 1e-10, || format!("n={n}: projector sum residual {res:e}"))?;
        }

        let m = MotionAlgebra::new(n).map_err(|e| e.to_string())?;
        for (name, zeta) in normalized_family(n) {
            let (f, report) = extract_and_check(&zeta, 200, SEED).map_err(|e| format!("{name}: {e}"))?;
            ensure(report.passed(), || format!("n={n} {name}: extracted frame function fails the identity"))?;
            for _ in 0..100 {
                let r = sampling::choose(&mut rng, &[0.1, 1.0, 10.0]);
                let w = random_complex(&mut rng, n, r);
                let res = eq_projector_residual(&zeta, &f, &w).map_err(|e| e.to_string())?;
                worst_eq = worst_eq.max(res);
                ensure(res <= 1e-8, || format!("n={n} {name}: projector-evaluation residual {res:e}"))?;

                let r = sampling::choose(&mut rng, &[0.1, 1.0, 10.0]);
                let e = random_element(&mut rng, n, r);
                let direct = zeta.eval(&m.to_coords(&e).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                let rebuilt = reconstruct(&f, &e).map_err(|e| e.to_string())?.value;
                let err = (direct - rebuilt).abs() / (1.0 + direct.abs());
                worst_trip = worst_trip.max(err);
                ensure(err <= 1e-7, || format!("n={n} {name}: round trip {direct} vs {rebuilt}"))?;
            }
        }

        let ad = motion_ad_quasistate(n, 1.4).map_err(|e| e.to_string())?;
        let r = check_ad_invariance(&ad, SAMPLES, SEED).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("n={n}: motion_ad Ad residual {:e}", r.max_residual))?;
        for _ in 0..100 {
            let e = random_element(&mut rng, n, 3.0);
            let bare = MotionElement::new(CVector::zeros(n), e.x().clone())
                .map_err(|e| e.to_string())?;
            let with_w = ad.eval(&m.to_coords(&e).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let without = ad.eval(&m.to_coords(&bare).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure(with_w == without, || format!("n={n}: motion_ad depends on w ({with_w} vs {without})"))?;
        }

        for (name, zeta) in continuous_family(n) {
            let r = no_mixed_decomposition_check(&zeta, SAMPLES, SEED).map_err(|e| e.to_string())?;
            ensure(r.passed() && r.applicable, || {
                format!("n={n} {name}: normalized part residual {:e}", r.report.max_residual)
            })?;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "projector sum {worst_sum:.1e}, projector evaluation {worst_eq:.1e}, round trip {worst_trip:.1e}, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

// ---- criterion 8: CLI determinism ----

fn cli_cases() -> Vec<(&'static str, &'static str)> {
    vec![
        ("classify3d", r#"{"named":"heisenberg"}"#),
        ("rigid", r#"{"V_dim":3,"matrix":[[0,1,0],[0,0,1],[0,0,0]]}"#),
        ("check-qs", r#"{"family":"zeta_alpha_c","phi":{"V_dim":2,"matrix":[[0,1],[0,0]]},"alpha":[0,1.5],"c":{"kind":"arctan","dim":1}}"#),
        ("check-ad", r#"{"family":"zeta_alpha_c","phi":{"V_dim":2,"matrix":[[1,0],[0,1]]},"alpha":[0,0],"c":{"kind":"power","dim":2,"p":0.5}}"#),
        ("heisenberg", r#"{"a":0.5,"c":{"kind":"arctan","dim":1},"phi":{"V_dim":4,"matrix":[[0,1,0,0],[0,0,1,0],[0,0,0,0],[0,0,0,1]]}}"#),
        ("gw", r#"{"kind":"sl2R","lambda":1.5,"matrix":[[[0,0],[-2,0]],[[2,0],[0,0]]]}"#),
        ("motion", r#"{"n":2,"lambda":0.8}"#),
        ("frame-pipeline", r#"{"f":{"kind":"norm","n":3}}"#),
        ("reconstruct", r#"{"f":{"kind":"squared_norm","n":2},"element":{"n":2,"w":[[1,0],[0,1]],"X":[[[0,1],[0,0]],[[0,0],[0,2]]]}}"#),
    ]
}

fn run_cli(command: &str, input: &str) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qslab"))
        .args([command, "--seed", "7", "--samples", "200", input])
        .env_remove("QSLAB_SEED")
        .output()
        .map_err(|e| format!("{command}: cannot spawn: {e}"))?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn criterion_8() -> Outcome {
    let cases = cli_cases();
    for (command, input) in &cases {
        let (code_a, out_a) = run_cli(command, input)?;
        let (code_b, out_b) = run_cli(command, input)?;
        ensure(code_a == code_b, || format!("{command}: exit codes {code_a} vs {code_b}"))?;
        ensure(out_a == out_b, || format!("{command}: outputs differ"))?;
        let parsed: serde_json::Value =
            serde_json::from_slice(&out_a).map_err(|e| format!("{command}: invalid JSON: {e}"))?;
        ensure(parsed.get("error").is_none(), || format!("{command}: error {parsed}"))?;
    }
    Ok(format!("{} commands byte-identical across two runs", cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("quasi-state axiom suite", criterion_1),
        ("Ad-invariance equivalence", criterion_2),
        ("rigidity table", criterion_3),
        ("witness soundness", criterion_4),
        ("reductive vanishing", criterion_5),
        ("frame-function suite", criterion_6),
        ("motion-algebra reconstruction", criterion_7),
        ("CLI determinism", criterion_8),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}

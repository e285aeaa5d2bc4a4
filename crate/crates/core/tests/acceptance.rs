//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails. Tolerances are pinned here, not taken from the
//! library defaults.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solitonic::circle_diffeo::{
    compose, exp_field, invert_jets, jet_of_exp, b_n_membership, decompose_psone, CircleMap, JetAtMinusOne, JetSide,
    MobiusElement, NonsmoothDiffeo, VectorField, DEFAULT_FLOW_TOL,
};
use solitonic::dsl::SolitonSpec;
use solitonic::fourier_sobolev::{fourier_coeffs_piecewise, lambda_decay_report, translation_family, FourierSeries};
use solitonic::solitons::{equivalent, is_proper, make_soliton, max_deviation, translation_cover, DEFAULT_R_TOL};
use solitonic::u1_current::{
    a_operator, antilinearity_residual, covariance_residual, functoriality_residual, hs_norm_sweep_with,
    hs_series_bound, random_unitary, weyl_relation_residual, OneParticleVector, TruncatedFock, Verdict,
    VerdictThresholds,
};
use solitonic::virasoro::{
    beta_cocycle, commutator_check, gram_det, qei_bound, qei_bound_with, qei_check, ModuleParams, SmearingPicture,
    VermaLevelSpace,
};
use std::f64::consts::PI;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn space(c: f64, h: f64, n: usize) -> VermaLevelSpace {
    VermaLevelSpace::new(ModuleParams::new(c, h, n).unwrap()).unwrap()
}

/// [L_n, L_m] = (n − m)L_{n+m} + (c/12)(n³ − n)δ_{n+m,0} on columns whose
/// images stay below the truncation, from the raw mode matrices.
fn raw_virasoro_residual(s: &VermaLevelSpace, n: i64, m: i64) -> f64 {
    let c = s.params().c;
    let ln = s.ln_matrix(n).unwrap();
    let lm = s.ln_matrix(m).unwrap();
    let mut rhs = if (n + m).unsigned_abs() as usize <= s.max_level() {
        s.ln_matrix(n + m).unwrap() * (n - m) as f64
    } else {
        DMatrix::zeros(s.dim(), s.dim())
    };
    if n + m == 0 {
        rhs += DMatrix::identity(s.dim(), s.dim()) * (c / 12.0 * ((n * n * n - n) as f64));
    }
    let lhs = &ln * &lm - &lm * &ln;
    let k = s.dim_through(s.max_level() - (n.unsigned_abs() + m.unsigned_abs()) as usize);
    let mut r: f64 = 0.0;
    for j in 0..k {
        for i in 0..s.dim() {
            r = r.max((lhs[(i, j)] - rhs[(i, j)]).abs());
        }
    }
    r
}

fn crit1() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut raw: f64 = 0.0;
    for (c, h) in [(0.5, 0.0), (1.0, 0.0), (1.0, 0.25)] {
        let s = space(c, h, 15);
        for n in -3i64..=3 {
            for m in -3i64..=3 {
                let f = FourierSeries::mode(n, 3);
                let g = FourierSeries::mode(m, 3);
                worst = worst.max(commutator_check(&s, &f, &g).unwrap().residual);
                raw = raw.max(raw_virasoro_residual(&s, n, m));
            }
        }
    }
    outcome(worst < 1e-9 && raw < 1e-9, format!("max commutator residual {worst:.2e}, raw mode relations {raw:.2e}"))
}

/// Level-2 Shapovalov determinant 2h(16h² + 2h(c − 5) + c), from the
/// 2×2 Gram matrix [[4h(2h+1), 6h], [6h, 4h + c/2]] on L₋₁², L₋₂.
fn level_two_oracle(c: f64, h: f64) -> f64 {
    let (a, b, d) = (4.0 * h * (2.0 * h + 1.0), 6.0 * h, 4.0 * h + c / 2.0);
    a * d - b * b
}

fn crit2() -> Outcome {
    let det = |c: f64, h: f64| gram_det(&ModuleParams::new(c, h, 2).unwrap(), 2).unwrap().0;
    let z1 = det(0.5, 1.0 / 16.0);
    let z2 = det(0.5, 0.5);
    let p = det(1.0, 0.25);
    let oracle_gap = [(0.5, 1.0 / 16.0), (0.5, 0.5), (1.0, 0.25)]
        .iter()
        .map(|&(c, h)| (det(c, h) - level_two_oracle(c, h)).abs())
        .fold(0.0, f64::max);
    let pass = z1.abs() < 1e-10 && z2.abs() < 1e-10 && p > 0.0 && oracle_gap < 1e-12;
    outcome(
        pass,
        format!(
            "det(1/2,1/16) = {z1:.2e}, det(1/2,1/2) = {z2:.2e}, det(1,1/4) = {p:.2e} (oracle {:.2e}), oracle gap {oracle_gap:.2e}",
            level_two_oracle(1.0, 0.25)
        ),
    )
}

/// ∫ 2t²/(1+t²)³ dt by the midpoint rule on [−2000, 2000].
fn constant_field_integral() -> f64 {
    let n = 400_000;
    let (a, b) = (-2000.0f64, 2000.0f64);
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let t = a + (i as f64 + 0.5) * h;
            2.0 * t * t / (1.0 + t * t).powi(3)
        })
        .sum::<f64>()
        * h
}

/// (1 + cos θ)⁵ as a trigonometric polynomial.
fn bump_field() -> VectorField {
    let base = FourierSeries::from_trig(&[1.0, 1.0], &[]);
    let mut p = base.clone();
    for _ in 0..4 {
        p = p.product(&base);
    }
    let (cos, sin) = p.to_trig();
    VectorField::trig(cos, sin)
}

fn crit3() -> Outcome {
    let s = space(1.0, 0.0, 10);
    let one = VectorField::constant(1.0);
    let oracle = -1.0 / (12.0 * PI) * constant_field_integral();
    let r1 = qei_check(&s, &one, 1.0, 100, 2024).unwrap();
    let r2 = qei_check(&s, &bump_field(), 1.0, 100, 2025).unwrap();
    let bump = VectorField::line_bump(0.3, 1.2, 1.0);
    let b0 = qei_bound_with(&bump, 1.0, SmearingPicture::VectorField).unwrap();
    let mut dil: f64 = 0.0;
    for t in [-0.7, 0.4, 1.1] {
        let g = VectorField::Pushforward { map: CircleMap::dilation(t), field: Box::new(bump.clone()) };
        dil = dil.max((qei_bound_with(&g, 1.0, SmearingPicture::VectorField).unwrap() - b0).abs());
    }
    let bound_gap = (qei_bound(&one, 1.0).unwrap() - oracle).abs();
    let pass = r1.min_gap >= -1e-8 && r2.min_gap >= -1e-8 && dil < 1e-8 && bound_gap < 1e-8;
    outcome(
        pass,
        format!(
            "min_gap const {:.3e}, bump {:.3e}; bound vs quadrature {bound_gap:.1e}; dilation residual {dil:.1e}",
            r1.min_gap, r2.min_gap
        ),
    )
}

fn smooth_gamma() -> CircleMap {
    exp_field(&VectorField::trig(vec![0.0], vec![0.3]), 1.0, DEFAULT_FLOW_TOL).unwrap()
}

fn crit4() -> Outcome {
    let s = 2.4;
    let r = lambda_decay_report(&smooth_gamma(), s, 96).unwrap();
    let pass = r.sup_weighted.is_finite() && r.fitted_exponent > s - 1.0 && r.self_check < 1e-9;
    outcome(
        pass,
        format!(
            "sup weighted {:.2e}, fitted exponent {} (degenerate: {}), self-check {:.1e}",
            r.sup_weighted, r.fitted_exponent, r.degenerate, r.self_check
        ),
    )
}

fn crit5() -> Outcome {
    let th = VerdictThresholds { tail: 1e-6, growth: 0.15 };
    let cutoffs = [64, 128, 256, 512];
    let smooth = hs_norm_sweep_with(&smooth_gamma(), &cutoffs, th).unwrap();
    let psi = solitonic::circle_diffeo::psi_t(0.5);
    let rough = hs_norm_sweep_with(&psi, &cutoffs, th).unwrap();
    let mut same: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for g in [&smooth_gamma(), &psi] {
        let a = a_operator(g, 32).unwrap();
        same = same.max(a.same_sign_max());
        anti = anti.max(antilinearity_residual(&a));
    }
    let pass = smooth.verdict == Verdict::Converged
        && smooth.tail.abs() < 1e-6
        && rough.verdict == Verdict::Diverging
        && same < 1e-10
        && anti < 1e-12;
    outcome(
        pass,
        format!(
            "smooth: {:?} (tail {:.1e}); psi_0.5: {:?} (hs {:?}, last growth {:.1}%); same-sign {same:.1e}; AJ+JA {anti:.1e}",
            smooth.verdict,
            smooth.tail,
            rough.verdict,
            rough.hs.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>(),
            rough.growth * 100.0
        ),
    )
}

fn crit6() -> Outcome {
    let a = hs_series_bound(2.5, 1.0, 10_000).unwrap();
    let b = hs_series_bound(2.5, 1.0, 20_000).unwrap();
    let d = hs_series_bound(2.0, 1.0, 20_000).unwrap();
    let pass = (b - a).abs() < 1e-3 && d > 10.0 * b;
    outcome(pass, format!("s=2.5 tail {:.2e} (limit {b:.4}); s=2.0 partial sum {d:.2} = {:.1}× limit", (b - a).abs(), d / b))
}

fn random_trig(rng: &mut ChaCha8Rng, modes: usize, scale: f64) -> VectorField {
    let cos = (0..=modes).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
    let sin = (0..modes).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
    VectorField::trig(cos, sin)
}

fn crit7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut smallest: f64 = f64::INFINITY;
    for _ in 0..20 {
        let g1 = exp_field(&random_trig(&mut rng, 3, 0.05), 1.0, DEFAULT_FLOW_TOL).unwrap();
        let g2 = exp_field(&random_trig(&mut rng, 3, 0.05), 1.0, DEFAULT_FLOW_TOL).unwrap();
        let f = random_trig(&mut rng, 3, 0.5);
        let lhs = beta_cocycle(&compose(&g1, &g2).unwrap(), &f, 1.0).unwrap();
        let pushed = VectorField::Pushforward { map: g2.clone(), field: Box::new(f.clone()) };
        let rhs = beta_cocycle(&g1, &pushed, 1.0).unwrap() + beta_cocycle(&g2, &f, 1.0).unwrap();
        worst = worst.max((lhs - rhs).abs());
        smallest = smallest.min(lhs.abs());
    }
    let mut mob: f64 = 0.0;
    for (a0, a1, b1) in [(0.2, 0.3, 0.1), (-0.4, 0.1, 0.5), (0.0, -0.6, 0.2)] {
        // flows of fields spanned by 1, cos θ, sin θ are Möbius
        let m = exp_field(&VectorField::trig(vec![a0, a1], vec![b1]), 0.8, DEFAULT_FLOW_TOL).unwrap();
        for f in [VectorField::trig(vec![0.3, 0.2, -0.1], vec![0.1, 0.4]), VectorField::line_bump(0.0, 1.0, 1.0)] {
            mob = mob.max(beta_cocycle(&m, &f, 1.0).unwrap().abs());
        }
        let m = CircleMap::mobius(MobiusElement::new(1.0 + a0, a1, b1, 1.0).unwrap());
        mob = mob.max(beta_cocycle(&m, &VectorField::trig(vec![0.1, 0.3], vec![0.2]), 1.0).unwrap().abs());
    }
    outcome(
        worst < 1e-7 && mob < 1e-9,
        format!("cocycle identity residual {worst:.1e} (smallest |β| {smallest:.1e}); Möbius max |β| {mob:.1e}"),
    )
}

/// δ(s) in θ: 2 atan(e^s tan(θ/2)); its derivative tends to e^{−s} at −1.
fn dilation_derivative_near_minus_one(s: f64, theta: f64) -> f64 {
    let t = (theta / 2.0).tan();
    let sec2 = 1.0 + t * t;
    s.exp() * sec2 / (1.0 + (2.0 * s).exp() * t * t)
}

fn crit8() -> Outcome {
    let mut psi_err: f64 = 0.0;
    for t in [0.1, 0.5, 1.0] {
        let r = make_soliton(NonsmoothDiffeo::psi(t).unwrap()).unwrap().r;
        psi_err = psi_err.max((r - (-t as f64).exp()).abs());
    }
    let fixture = r#"[
        {"minus": {"type": "identity"}, "plus": {"type": "identity"}},
        {"minus": {"type": "identity"}, "plus": {"type": "dilation", "t": 0.5}},
        {"minus": {"type": "dilation", "t": 0.2}, "plus": {"type": "dilation", "t": 0.7}},
        {"minus": {"type": "identity"}, "plus": {"type": "dilation", "t": 0.6}},
        {"minus": {"type": "dilation", "t": -0.3}, "plus": {"type": "dilation", "t": -0.3}},
        {"minus": {"type": "dilation", "t": 0.1}, "plus": {"type": "dilation", "t": 1.1}}
    ]"#;
    let dil = [(0.0, 0.0), (0.0, 0.5), (0.2, 0.7), (0.0, 0.6), (-0.3, -0.3), (0.1, 1.1)];
    let specs: Vec<SolitonSpec> = serde_json::from_str(fixture).unwrap();
    let descs: Vec<_> = specs.iter().map(|s| make_soliton(s.build().unwrap()).unwrap()).collect();
    // one-sided chain rule: r = δ'(b)(−1)/δ'(a)(−1), approached from inside
    let near = PI - 1e-6;
    let oracle: Vec<f64> = dil
        .iter()
        .map(|&(a, b)| dilation_derivative_near_minus_one(b, near) / dilation_derivative_near_minus_one(a, near))
        .collect();
    let mut mismatches = 0;
    let mut r_err: f64 = 0.0;
    for i in 0..descs.len() {
        r_err = r_err.max((descs[i].r - oracle[i]).abs());
        if is_proper(&descs[i]) != ((oracle[i] - 1.0).abs() > 1e-6) {
            mismatches += 1;
        }
        for j in 0..descs.len() {
            let expect = (oracle[i] - oracle[j]).abs() < 1e-6;
            if equivalent(&descs[i], &descs[j], DEFAULT_R_TOL) != expect {
                mismatches += 1;
            }
        }
    }
    let mut mult: f64 = 0.0;
    let nus: Vec<NonsmoothDiffeo> = specs.iter().map(|s| s.build().unwrap()).collect();
    for a in &nus {
        for b in &nus {
            let ra = make_soliton(a.clone()).unwrap().r;
            let rb = make_soliton(b.clone()).unwrap().r;
            let rc = make_soliton(a.compose(b).unwrap()).unwrap().r;
            mult = mult.max((rc - ra * rb).abs());
        }
    }
    outcome(
        psi_err < 1e-12 && mismatches == 0 && mult < 1e-10 && r_err < 1e-5,
        format!(
            "r(psi_t) error {psi_err:.1e}; fixture decisions: {mismatches} mismatches (r vs chain-rule oracle {r_err:.1e}); multiplicativity {mult:.1e}"
        ),
    )
}

fn crit9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut g = vec![0.0; 7];
        for (k, v) in g.iter_mut().enumerate().skip(2) {
            *v = rng.random_range(-1.0..1.0) / k as f64;
        }
        let side = if rng.random_bool(0.5) { JetSide::Left } else { JetSide::Right };
        let fj = JetAtMinusOne::one_sided(side, g.clone());
        let back = invert_jets(&jet_of_exp(&fj, 1.0).unwrap()).unwrap();
        let vals = match side {
            JetSide::Right => back.right_values().to_vec(),
            _ => back.left().to_vec(),
        };
        for (a, b) in vals.iter().zip(&g).skip(2) {
            worst = worst.max((a - b).abs());
        }
    }
    let bump = |d: Vec<f64>| VectorField::JetBump { derivs: d, radius: 0.5 };
    let field = VectorField::glued(bump(vec![0.0, 0.0, 0.3, -0.2]), bump(vec![0.0, 0.0, -0.1, 0.4, 0.2]));
    let gamma = compose(&exp_field(&field, 1.0, DEFAULT_FLOW_TOL).unwrap(), &CircleMap::translation(0.3)).unwrap();
    let d = decompose_psone(&gamma, 6).unwrap();
    let rec = max_deviation(&d.reconstruct().unwrap(), &gamma, (-PI, PI), 512);
    let member = b_n_membership(&d.smooth, 6, 1e-6);
    outcome(
        worst < 1e-8 && rec < 1e-6 && member,
        format!("jet round trip {worst:.1e}; reconstruction {rec:.1e}; smooth factor in B_6: {member}"),
    )
}

fn crit10() -> Outcome {
    let single = TruncatedFock::new(vec![1], 40).unwrap();
    let f = OneParticleVector::from_trig(&[0.0, 0.8], &[0.3]);
    let g = OneParticleVector::from_trig(&[0.0, -0.2], &[0.9]);
    let weyl = weyl_relation_residual(&single, &f, &g).unwrap();
    let fock = TruncatedFock::new(vec![1, 2, 3], 10).unwrap();
    let (u, v) = (random_unitary(3, 10), random_unitary(3, 11));
    let h = OneParticleVector::from_trig(&[0.0, 0.2, -0.1, 0.05], &[0.1, 0.15, -0.05]);
    let func = functoriality_residual(&fock, &u, &v).unwrap();
    let cov = covariance_residual(&fock, &u, &h).unwrap();
    outcome(
        weyl < 1e-6 && func < 1e-6 && cov < 1e-6,
        format!("Weyl relation {weyl:.1e}; functoriality {func:.1e}; covariance {cov:.1e}"),
    )
}

fn hs_distance(n: u32) -> f64 {
    let t = VectorField::translation_generator();
    let tn = translation_family(n);
    let mut breaks = vec![PI];
    for s in [1.0, 2.0] {
        breaks.push(2.0 * (s * n as f64).atan());
    }
    let d = fourier_coeffs_piecewise(|th| t.eval(th) - tn.eval(th), 1024, &breaks);
    d.h_s_norm(2.2)
}

fn crit11() -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for t in [0.1, 0.3, 0.5] {
        match translation_cover(t) {
            Ok(c) => {
                ok &= c.product_residual < 1e-8 && c.epsilon >= 0.05;
                parts.push(format!("t={t}: product {:.1e}, eps {:.2}", c.product_residual, c.epsilon));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("t={t}: {e}"));
            }
        }
    }
    let norms: Vec<f64> = [4, 8, 16, 32].iter().map(|&n| hs_distance(n)).collect();
    let monotone = norms.windows(2).all(|w| w[1] < w[0]);
    outcome(
        ok && monotone,
        format!(
            "{}; H^2.2 distances {:?}",
            parts.join(", "),
            norms.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Virasoro bracket fidelity", crit1),
        ("Kac zeros", crit2),
        ("energy inequality", crit3),
        ("lambda decay", crit4),
        ("Shale dichotomy", crit5),
        ("dominating series boundary", crit6),
        ("beta cocycle", crit7),
        ("soliton classifier", crit8),
        ("jet calculus", crit9),
        ("Fock layer", crit10),
        ("translation cover", crit11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("[{status}] {:>2}. {name} ({:.1} s): {}", i + 1, t0.elapsed().as_secs_f64(), o.detail);
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}

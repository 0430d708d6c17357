use kdvasym::asymptotics::elliptic_approx;
use kdvasym::initial_data::make_sech2_profile;
use kdvasym::modulation::{leading_edge, trailing_edge, whitham_solve, whitham_velocities};
use std::time::Instant;

fn main() {
    let m = make_sech2_profile();
    let t = 0.28;
    let trail = trailing_edge(t, &m).unwrap();
    let lead = leading_edge(t, &m).unwrap();
    println!("zone at t={t}: [{:.6}, {:.6}]", lead.x_minus, trail.x_plus);

    // Near-trailing-edge consistency: x -> x+.
    let t0 = Instant::now();
    let st = whitham_solve(trail.x_plus - 1e-6, t, &m, None).unwrap();
    println!(
        "x+ - 1e-6: b1={:.8} b2={:.8} b3={:.8} (v={:.8} u={:.8}) res={:.1e} ({:.2?})",
        st.beta1, st.beta2, st.beta3, trail.v, trail.u,
        st.residual.iter().fold(0.0f64, |m, r| m.max(r.abs())),
        t0.elapsed()
    );

    // March through the interior with seed reuse; check residuals via
    // whitham_velocities independently + elliptic dual form.
    let width = trail.x_plus - lead.x_minus;
    let mut seed = None;
    let mut worst_dual = 0.0f64;
    let t0 = Instant::now();
    for i in 1..=8 {
        let x = lead.x_minus + width * i as f64 / 9.0;
        let st = whitham_solve(x, t, &m, seed.as_ref()).unwrap();
        let vel = whitham_velocities(st.betas(), &m).unwrap();
        let res = (0..3).map(|i| (vel.v[i] * t + vel.w[i] - x).abs()).fold(0.0, f64::max);
        let e = elliptic_approx(x, t, 1e-2, &m, Some(&st)).unwrap();
        let dual = (e.u_theta - e.u_dn).abs();
        worst_dual = worst_dual.max(dual);
        println!("x={x:.4}: b=({:.6},{:.6},{:.6}) s={:.4} res={res:.1e} dual={dual:.1e}",
            st.beta1, st.beta2, st.beta3, st.modulus());
        seed = Some(st);
    }
    println!("interior sweep done in {:.2?}, worst dual-form gap {worst_dual:.2e}", t0.elapsed());

    // Near-leading-edge consistency.
    let st = whitham_solve(lead.x_minus + 1e-4, t, &m, seed.as_ref()).unwrap();
    println!("x- + 1e-4: b2-b3={:.3e} (b2,b3 -> v={:.6}), b1={:.6} (u={:.6})",
        st.beta2 - st.beta3, lead.v, st.beta1, lead.u);
}

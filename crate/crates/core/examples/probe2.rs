use kdvasym::initial_data::make_sech2_profile;
use kdvasym::modulation::{leading_edge, trailing_edge, whitham_solve};

fn main() {
    let m = make_sech2_profile();
    let t = 0.28;
    let trail = trailing_edge(t, &m).unwrap();
    let lead = leading_edge(t, &m).unwrap();
    let width = trail.x_plus - lead.x_minus;
    for i in [8, 7, 6, 5, 4, 3, 2, 1] {
        let x = lead.x_minus + width * i as f64 / 9.0;
        match whitham_solve(x, t, &m, None) {
            Ok(st) => println!("x={x:.5}: OK b=({:.6},{:.6},{:.6}) res={:.1e}",
                st.beta1, st.beta2, st.beta3,
                st.residual.iter().fold(0.0f64, |m, r| m.max(r.abs()))),
            Err(e) => println!("x={x:.5}: ERR {e}"),
        }
    }
}

//! Closed-form thresholds, separation radii and risk bounds.

use sparse_toeplitz::concentration::{
    risk_bound, selector_threshold, separation_radius, theoretical_threshold,
};
use sparse_toeplitz::{ThresholdKind, ThresholdSpec};

fn main() -> sparse_toeplitz::Result<()> {
    let (n, p, horizon, s) = (100, 100, 10, 2);
    println!("kind,u,threshold,separation_radius,risk_bound");
    for kind in [ThresholdKind::MsPlus, ThresholdKind::Ms, ThresholdKind::HsPlus, ThresholdKind::Hs] {
        for u in [kind.min_u().max(2.0), 8.0] {
            let spec = ThresholdSpec::new(kind, n, p, horizon).with_u(u).with_sparsity(s);
            println!(
                "{kind},{u},{:.6},{:.6},{:.4}",
                theoretical_threshold(&spec)?,
                separation_radius(&spec)?,
                risk_bound(&spec)?
            );
        }
    }
    let tau = selector_threshold(n, p, horizon, s, 2.0)?;
    println!("selector threshold at u = 2: {tau:.6}");

    let split = ThresholdSpec::new(ThresholdKind::MsPlus, n, p, horizon).with_u(4.0).with_split(0.25);
    println!("MS+ at u = 4 with split 0.25: {:.6}", theoretical_threshold(&split)?);
    Ok(())
}

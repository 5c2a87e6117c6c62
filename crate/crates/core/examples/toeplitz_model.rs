//! Builds a sparse Toeplitz alternative and inspects its structure.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_toeplitz::{FunctionalMatrix, Placement, SparseAlternative, ToeplitzSpec};

fn main() -> sparse_toeplitz::Result<()> {
    let spec = ToeplitzSpec::with_lags(8, 1.0, &[(1, 0.3), (3, -0.2)])?;
    println!("diagonals {:?}, bandwidth {}", spec.diagonals(), spec.bandwidth());
    for row in spec.densify() {
        println!("  {}", row.iter().map(|v| format!("{v:5.2}")).collect::<Vec<_>>().join(" "));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alt = SparseAlternative::generate(100, 3, 10, 0.05, Placement::Random, true, &mut rng)?;
    println!(
        "alternative: support {:?}, signs {:?}, eta {:?}, separation {:.3}",
        alt.support(),
        alt.signs(),
        alt.eta(),
        alt.separation()
    );

    let a = FunctionalMatrix::new(100, alt.support().to_vec())?;
    println!(
        "A_W over the support: {} nonzeros, squared Frobenius norm {:.6}, Tr(A_W Σ) = {:.4}",
        a.nonzero_count(),
        a.frobenius_norm_sq(),
        a.trace_with(alt.spec())
    );
    Ok(())
}

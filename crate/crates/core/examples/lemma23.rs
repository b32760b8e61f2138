//! Dimension of the space of tensors with the symmetries of `nabla R`, and of
//! the subspace cut out by the polarized vanishing condition.

use relcurv::tensorcalc::lemma23_rank_check;

fn main() -> relcurv::Result<()> {
    for n in 2..=4 {
        let r = lemma23_rank_check(n)?;
        println!(
            "n={n}: symmetric space dim {}, constrained dim {}, {} polarizing pairs, gap {:.1e}",
            r.dim_sym,
            r.dim_constrained,
            r.polarizing_pairs,
            r.min_gap()
        );
    }
    Ok(())
}

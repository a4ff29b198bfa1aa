use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use lacuna::arith::{size_of, Rat};
use lacuna::blackbox::{make_blackbox, Instr, ProgramBox};
use lacuna::interp::{full_interpolate, interpolate_with_shift};
use lacuna::options::Options;
use lacuna::poly::ShiftedLacunary;
use lacuna::shift::Bounds;

fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn tight_bounds(f: &ShiftedLacunary) -> Bounds {
    let bh = f
        .terms()
        .iter()
        .map(|(c, _)| size_of(c))
        .chain(std::iter::once(size_of(f.constant_term())))
        .max()
        .unwrap();
    let bn = 64 - (f.degree() - 1).leading_zeros() as u64;
    Bounds::new(size_of(f.shift()), f.sparsity() as u64, bh, bn)
}

#[test]
fn recovers_small_instances() {
    let cases = [
        ShiftedLacunary::new(rat(3, 1), rat(5, 1), vec![(rat(2, 1), 9)]).unwrap(),
        ShiftedLacunary::new(rat(-1, 2), rat(0, 1), vec![(rat(1, 3), 7), (rat(-4, 1), 12)]).unwrap(),
        ShiftedLacunary::new(rat(0, 1), rat(1, 1), vec![(rat(1, 1), 5), (rat(7, 5), 11)]).unwrap(),
    ];
    for f in cases {
        let bounds = tight_bounds(&f);
        let (got, _) = full_interpolate(make_blackbox(f.clone()), bounds, &Options::default()).unwrap();
        assert_eq!(got, f);
    }
}

#[test]
fn straight_line_program_source() {
    // (x + 2)^13 - 3
    let prog = vec![
        Instr::Var,
        Instr::Const(rat(2, 1)),
        Instr::Add(0, 1),
        Instr::Pow(2, 13),
        Instr::Const(rat(3, 1)),
        Instr::Sub(3, 4),
    ];
    let bb = Arc::new(ProgramBox::new(prog).unwrap());
    let expected = ShiftedLacunary::new(rat(-2, 1), rat(-3, 1), vec![(rat(1, 1), 13)]).unwrap();
    let bounds = tight_bounds(&expected);
    let (got, shift) = full_interpolate(bb.clone(), bounds, &Options::default()).unwrap();
    assert_eq!(got, expected);
    assert_eq!(shift.alpha, rat(-2, 1));
    let again = interpolate_with_shift(bb, &rat(-2, 1), bounds, &Options::default()).unwrap();
    assert_eq!(again, expected);
}

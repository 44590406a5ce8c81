//! Brute-force lattice sums written out from the definition, with their own
//! point enumeration and arithmetic, compared against the library evaluator.

use mdzv::eval::eval_term;
use mdzv::numfield::{enumerate_cone, make_field};
use mdzv::{EvalContext, PairingStructure, RefinedTerm};

#[derive(Clone, Copy, Debug)]
struct C(f64, f64);

impl C {
    fn add(self, o: C) -> C {
        C(self.0 + o.0, self.1 + o.1)
    }
    fn mul(self, o: C) -> C {
        C(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn inv(self) -> C {
        let n = self.0 * self.0 + self.1 * self.1;
        C(self.0 / n, -self.1 / n)
    }
    fn conj(self) -> C {
        C(self.0, -self.1)
    }
    fn abs(self) -> f64 {
        self.0.hypot(self.1)
    }
}

/// Cone points of Q(√d) (d = -1 or -3) with |z| ≤ r, as complex numbers.
fn cone(d: i64, r: f64) -> Vec<C> {
    let mut out = Vec::new();
    let n = r.ceil() as i64 + 2;
    for a in -2 * n..=2 * n {
        for b in -2 * n..=2 * n {
            let z = match d {
                -1 => C(a as f64, b as f64),
                -3 => C(a as f64 + b as f64 / 2.0, b as f64 * 3f64.sqrt() / 2.0),
                _ => unreachable!(),
            };
            if z.0 > 1e-9 && z.abs() <= r + 1e-9 {
                out.push(z);
            }
        }
    }
    out
}

/// Π_i (g_{ρ(1)} + … + g_{ρ(i)})^{-e_i} summed over all choices of the
/// variables; generators come in conjugate pairs (g₁, ḡ₁, g₂, ḡ₂).
fn brute(term: &RefinedTerm, points: &[C]) -> C {
    let order = term.order().one_line();
    let exps = term.exponents();
    let summand = |gens: &[C]| {
        let mut acc = C(0.0, 0.0);
        let mut out = C(1.0, 0.0);
        for (i, &e) in exps.iter().enumerate() {
            acc = acc.add(gens[order[i] - 1]);
            for _ in 0..e {
                out = out.mul(acc.inv());
            }
        }
        out
    };
    let mut total = C(0.0, 0.0);
    match term.k() {
        2 => {
            for &x in points {
                total = total.add(summand(&[x, x.conj()]));
            }
        }
        4 => {
            for &x in points {
                for &y in points {
                    total = total.add(summand(&[x, x.conj(), y, y.conj()]));
                }
            }
        }
        _ => unreachable!(),
    }
    total
}

fn ctx(d: i64, r: f64, k: usize) -> EvalContext {
    EvalContext::new(enumerate_cone(make_field(d).unwrap(), r).unwrap(), PairingStructure::standard(k).unwrap())
}

#[test]
fn hand_value_at_radius_one_and_a_half() {
    // α ∈ {1, 1-i, 1+i}: 1/8 + (1/8)(1/(1-i) + 1/(1+i)) = 1/4
    let t: RefinedTerm = "(1):1,3".parse().unwrap();
    let z = eval_term(&t, &ctx(-1, 1.5, 2)).unwrap();
    assert!((z.re - 0.25).abs() < 1e-15 && z.im.abs() < 1e-15);
    let b = brute(&t, &cone(-1, 1.5));
    assert!((b.0 - 0.25).abs() < 1e-15);
}

#[test]
fn point_sets_agree() {
    for d in [-1, -3] {
        for r in [1.0, 2.5, 4.0, 7.3] {
            let lib = enumerate_cone(make_field(d).unwrap(), r).unwrap().len();
            assert_eq!(lib, cone(d, r).len(), "d={d} r={r}");
        }
    }
}

#[test]
fn depth_one_terms_match_brute_force() {
    for d in [-1, -3] {
        let points = cone(d, 9.0);
        let c = ctx(d, 9.0, 2);
        for s in ["(1):2,2", "(1):1,3", "(12):1,3", "(12):2,5", "(1):3,3", "(12):1,1"] {
            let t: RefinedTerm = s.parse().unwrap();
            let lib = eval_term(&t, &c).unwrap();
            let b = brute(&t, &points);
            let err = C(lib.re - b.0, lib.im - b.1).abs();
            assert!(err <= 1e-13 * b.abs().max(1e-300), "{s} over d={d}: {lib:?} vs {b:?}");
        }
    }
}

#[test]
fn depth_two_terms_match_brute_force() {
    for d in [-1, -3] {
        let points = cone(d, 4.0);
        let c = ctx(d, 4.0, 4);
        for s in ["(1):2,2,2,2", "(23):1,1,2,4", "(234):1,3,1,3", "(1324):1,1,1,3", "(14):1,2,1,2", "(1243):2,1,1,2"] {
            let t: RefinedTerm = s.parse().unwrap();
            let lib = eval_term(&t, &c).unwrap();
            let b = brute(&t, &points);
            let err = C(lib.re - b.0, lib.im - b.1).abs();
            assert!(err <= 1e-12 * b.abs().max(1e-300), "{s} over d={d}: {lib:?} vs {b:?}");
        }
    }
}

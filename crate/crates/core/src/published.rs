//! Reference maps and their published bound tables.

use crate::numerics::Complex;
use crate::ratmap::{RationalMapPF, Term};

/// One published row: `(k, lower, upper)`.
pub type TableRow = (usize, f64, f64);
/// `((re a, im a), (re p, im p))`.
pub type TermLiteral = ((f64, f64), (f64, f64));

#[derive(Debug, Clone, Copy)]
pub struct Example {
    pub id: usize,
    pub terms: &'static [TermLiteral],
    pub table: &'static [TableRow],
    /// Tolerance to which a fresh run is expected to match `table`.
    pub tolerance: f64,
}

impl Example {
    pub fn map(&self) -> RationalMapPF {
        let terms = self
            .terms
            .iter()
            .map(|&((ar, ai), (pr, pi))| Term::new(Complex::new(ar, ai), Complex::new(pr, pi)))
            .collect();
        RationalMapPF::new(terms).expect("published maps are valid")
    }

    pub fn orders(&self) -> Vec<usize> {
        self.table.iter().map(|r| r.0).collect()
    }

    pub fn row(&self, k: usize) -> Option<TableRow> {
        self.table.iter().copied().find(|r| r.0 == k)
    }
}

pub const EXAMPLE_1: Example = Example {
    id: 1,
    terms: &[((0.3, 0.0), (-1.0, 0.0)), ((0.2, 0.0), (1.0, 0.0))],
    table: &[
        (1, 0.492562045464946, 0.500047419736669),
        (2, 0.499952584760167, 0.500003281768904),
        (3, 0.499996718252636, 0.500000110442346),
        (4, 0.499999889557678, 0.500000003956031),
        (5, 0.499999996043969, 0.500000000292436),
    ],
    tolerance: 1e-6,
};

pub const EXAMPLE_2: Example = Example {
    id: 2,
    terms: &[((0.95, 0.0), (-1.0, 0.0)), ((0.98, 0.0), (1.0, 0.0))],
    table: &[
        (1, 1.469145654305464, 1.998883274734441),
        (2, 1.863490503463674, 1.997657625980182),
        (3, 1.864633834925701, 1.957570768708159),
        (4, 1.902817542815138, 1.956984859867938),
        (5, 1.903387234304595, 1.944734961210238),
        (10, 1.924138647216576, 1.935693736889831),
        (20, 1.928820666790728, 1.931123140362772),
        (30, 1.929615838914482, 1.930334911010434),
        (35, 1.929706466138935, 1.930230869959049),
        (40, 1.929751020215389, 1.930091261090859),
    ],
    tolerance: 1e-5,
};

pub const EXAMPLE_3: Example = Example {
    id: 3,
    terms: &[
        ((0.2, 0.0), (-2.0, 0.0)),
        ((0.1, 0.0), (0.0, 0.0)),
        ((0.4, 0.0), (5.0, 0.0)),
    ],
    table: &[
        (1, 0.696735209508754, 0.700011861859377),
        (2, 0.699988138057939, 0.700000163885012),
        (3, 0.699999835775098, 0.700000002518033),
    ],
    tolerance: 1e-6,
};

const THIRD: f64 = 1.0 / 3.0;
// Cube roots of unity.
const ROOT3_HALF: f64 = 0.8660254037844386;

pub const EXAMPLE_4: Example = Example {
    id: 4,
    terms: &[
        ((THIRD, 0.0), (1.0, 0.0)),
        ((THIRD, 0.0), (-0.5, ROOT3_HALF)),
        ((THIRD, 0.0), (-0.5, -ROOT3_HALF)),
    ],
    table: &[
        (1, 0.897012961211562, 1.003766600572323),
        (2, 0.996247533470256, 1.000449247199905),
        (3, 0.999550954532515, 1.000227970885994),
        (4, 0.999772081072887, 1.000015305500631),
        (5, 0.999984694733624, 1.000004234543914),
        (6, 0.999995765474017, 1.000002049275081),
    ],
    tolerance: 1e-6,
};

pub const EXAMPLE_5: Example = Example {
    id: 5,
    terms: &[
        ((0.5, 0.0), (0.0, 0.0)),
        ((0.4, 0.0), (2.0, 1.0)),
        ((0.4, 0.0), (2.0, -1.0)),
    ],
    table: &[
        (1, 1.156483451112665, 1.306262607579208),
        (2, 1.293906716808142, 1.300866124135705),
        (3, 1.299286594644695, 1.300451765037035),
        (4, 1.299697642245979, 1.300120036845019),
    ],
    tolerance: 1e-5,
};

pub const EXAMPLE_6: Example = Example {
    id: 6,
    terms: &[
        ((0.4, 0.0), (0.0, 0.0)),
        ((0.4, 0.0), (6.0, 0.0)),
        ((0.4, 0.0), (1.0, 1.0)),
    ],
    table: &[
        (1, 1.125853723035751, 1.203267502101022),
        (2, 1.197416632904951, 1.201353200697178),
        (3, 1.199380567900335, 1.200524665448821),
        (4, 1.200219059439418, 1.20042627766666),
        (5, 1.200321460719667, 1.2003873994813),
        (6, 1.200361472698255, 1.200378783416171),
        (7, 1.200370456320151, 1.200375934512287),
    ],
    tolerance: 1e-5,
};

pub const EXAMPLES: [Example; 6] = [EXAMPLE_1, EXAMPLE_2, EXAMPLE_3, EXAMPLE_4, EXAMPLE_5, EXAMPLE_6];

pub fn example(id: usize) -> Option<Example> {
    EXAMPLES.iter().copied().find(|e| e.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_brackets() {
        for e in EXAMPLES {
            for &(_, l, u) in e.table {
                assert!(l < u);
            }
            let m = e.map();
            assert_eq!(m.degree(), e.terms.len());
        }
    }

    #[test]
    fn rotational_example_matches_closed_form() {
        let m = EXAMPLE_4.map();
        let z = Complex::new(0.7, 2.1);
        let expected = z * z / (z.powi(3) - 1.0);
        assert!((m.eval(z).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn lookup() {
        assert_eq!(
            example(2).unwrap().orders(),
            vec![1, 2, 3, 4, 5, 10, 20, 30, 35, 40]
        );
        assert!(example(7).is_none());
        assert_eq!(example(6).unwrap().row(7).unwrap().1, 1.200370456320151);
    }
}

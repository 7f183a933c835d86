//! Local derivability witness: a translate of the window meets the window
//! in exactly one unit cell.

use serde::Serialize;

use crate::covariogram::Polyomino;
use crate::pointset::{FinitePointSet, IntPoint};

/// Translation `t` with `C = P ∩ (-t + P)` for both canonical windows.
pub const MLD_TRANSLATION: (i64, i64) = (4, 5);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MldReport {
    /// Cells of `P ∩ (-t + P)`.
    pub intersection: FinitePointSet,
    /// Number of integer translates of `C` whose union rebuilds `P`.
    pub translates: usize,
    pub holds: bool,
}

pub fn mld_check(window: &Polyomino, t: (i64, i64)) -> MldReport {
    let cells = window.cells();
    let shifted = cells
        .transform(&IntPoint::from((-t.0, -t.1)), false)
        .expect("planar translation");
    let intersection = cells.intersection(&shifted);
    let unit = FinitePointSet::planar(&[(0, 0)]);

    // rebuild the window as a union of translates f + C
    let mut rebuilt = FinitePointSet::new(2).expect("dimension 2");
    let mut translates = 0;
    for f in cells.iter() {
        for c in unit.iter() {
            rebuilt.insert(c.add(f)).expect("planar");
        }
        translates += 1;
    }
    let holds = intersection == unit && &rebuilt == cells;
    MldReport {
        intersection,
        translates,
        holds,
    }
}

/// Checks the single-cell intersection identity for both `P1` and `P2`
/// with `t = (4, 5)`, each window being a union of 15 unit translates.
pub fn mld_witness() -> bool {
    [Polyomino::p1(), Polyomino::p2()].iter().all(|w| {
        let r = mld_check(w, MLD_TRANSLATION);
        r.holds && r.translates == 15
    })
}

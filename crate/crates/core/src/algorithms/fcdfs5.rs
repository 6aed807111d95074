//! Follow-the-corners depth-first search in a 5-bit register.

use crate::engine::{Action, Capabilities, LocalRule, Register, SensorView};
use crate::grid::Direction;

/// `b1b2` primary direction, `b3` last move was secondary, `b4b5` history.
/// All bits start at zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Fcdfs5State {
    pub primary: u8,
    pub b3: bool,
    pub b4: bool,
    pub b5: bool,
}

impl Register for Fcdfs5State {
    const BITS: u32 = 5;

    fn encode(self) -> u32 {
        (self.primary as u32 & 3)
            | (self.b3 as u32) << 2
            | (self.b4 as u32) << 3
            | (self.b5 as u32) << 4
    }

    fn decode(bits: u32) -> Self {
        Fcdfs5State {
            primary: bits as u8 & 3,
            b3: bits & 4 != 0,
            b4: bits & 8 != 0,
            b5: bits & 16 != 0,
        }
    }
}

/// Same trajectories as [`super::Fcdfs`] with a five-bit memory.
#[derive(Clone, Copy, Debug, Default)]
pub struct Fcdfs5;

impl LocalRule for Fcdfs5 {
    type State = Fcdfs5State;
    const NAME: &'static str = "fcdfs5";
    const CAPABILITIES: Capabilities = Capabilities::local(2, 0, 5);

    fn step(&self, view: &SensorView<'_>, st: &mut Fcdfs5State) -> (Action, Option<u8>) {
        let blocked = |d: Direction| view.blocked(d);
        let free = Direction::CLOCKWISE
            .iter()
            .filter(|&&d| !blocked(d))
            .count();
        if free == 0 {
            return (Action::Settle, None);
        }
        let mut updated = false;
        if !st.b4 && !st.b5 {
            st.primary = Direction::CLOCKWISE
                .into_iter()
                .find(|&d| !blocked(d))
                .unwrap()
                .code();
            st.b4 = true;
            st.b5 = false;
            updated = true;
        }
        let p = Direction::from_code(st.primary);
        let s = p.clockwise();
        if blocked(p) && blocked(s) {
            if free == 1 {
                return (Action::Settle, None);
            }
            let diag = p.opposite().offset() + s.opposite().offset();
            let diag_free = view.at(diag).is_some_and(|c| !c.obstacle);
            if (st.b5 && (st.b3 as u8 + st.b4 as u8) == 1) || diag_free {
                return (Action::Settle, None);
            }
            let came_from = if st.b3 { s } else { p }.opposite();
            let turn = Direction::CLOCKWISE
                .into_iter()
                .find(|&d| !blocked(d) && d != came_from)
                .unwrap();
            st.primary = turn.code();
            st.b4 = true;
            st.b5 = false;
            updated = true;
        }
        if !updated {
            st.b4 = st.b3;
            st.b5 = true;
        }
        let p = Direction::from_code(st.primary);
        let s = p.clockwise();
        if !blocked(p) {
            st.b3 = false;
            (Action::Move(p), None)
        } else if !blocked(s) {
            st.b3 = true;
            (Action::Move(s), None)
        } else {
            (Action::Settle, None)
        }
    }

    fn heading(state: Fcdfs5State) -> Option<Direction> {
        (state.b4 || state.b5).then(|| Direction::from_code(state.primary))
    }
}

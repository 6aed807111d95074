//! Follow-the-corners depth-first search with offset memory.

use crate::engine::{Action, Capabilities, LocalRule, Register, SensorView};
use crate::grid::{Direction, Offset};

/// Offsets a robot's position two moves ago can have relative to it.
const TWO_BACK: [Offset; 9] = [
    Offset::new(0, 0),
    Offset::new(1, 1),
    Offset::new(1, -1),
    Offset::new(-1, -1),
    Offset::new(-1, 1),
    Offset::new(0, 2),
    Offset::new(2, 0),
    Offset::new(0, -2),
    Offset::new(-2, 0),
];

/// Primary direction plus the previous two positions as relative offsets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FcdfsState {
    pub primary: Option<Direction>,
    /// Direction of the cell the robot last came from.
    pub prev: Option<Direction>,
    /// Where the robot was two moves ago.
    pub prevprev: Option<Offset>,
}

impl Register for FcdfsState {
    const BITS: u32 = 10;

    fn encode(self) -> u32 {
        let primary = self.primary.map_or(0, |d| 4 | d.code() as u32);
        let prev = self.prev.map_or(0, |d| d.code() as u32 + 1);
        let pp = self.prevprev.map_or(0, |o| {
            TWO_BACK
                .iter()
                .position(|&x| x == o)
                .expect("two-step offset") as u32
                + 1
        });
        primary | prev << 3 | pp << 6
    }

    fn decode(bits: u32) -> Self {
        let primary = (bits & 4 != 0).then(|| Direction::from_code(bits as u8 & 3));
        let prev = match (bits >> 3) & 7 {
            0 => None,
            c => Some(Direction::from_code(c as u8 - 1)),
        };
        let prevprev = match (bits >> 6) & 15 {
            0 => None,
            c => TWO_BACK.get(c as usize - 1).copied(),
        };
        FcdfsState {
            primary,
            prev,
            prevprev,
        }
    }
}

impl FcdfsState {
    fn moved(&mut self, d: Direction) -> Action {
        self.prevprev = self.prev.map(|p| p.offset() - d.offset());
        self.prev = Some(d.opposite());
        Action::Move(d)
    }
}

/// Synchronous depth-first dispersion that turns only at halls and settles at corners.
#[derive(Clone, Copy, Debug, Default)]
pub struct Fcdfs;

impl LocalRule for Fcdfs {
    type State = FcdfsState;
    const NAME: &'static str = "fcdfs";
    const CAPABILITIES: Capabilities = Capabilities::local(2, 0, FcdfsState::BITS);

    fn step(&self, view: &SensorView<'_>, st: &mut FcdfsState) -> (Action, Option<u8>) {
        let blocked = |d: Direction| view.blocked(d);
        let free: u32 = Direction::CLOCKWISE
            .iter()
            .filter(|&&d| !blocked(d))
            .count() as u32;
        if free == 0 {
            return (Action::Settle, None);
        }
        if st.prev.is_none() {
            st.primary = Direction::CLOCKWISE.into_iter().find(|&d| !blocked(d));
        }
        let p = st.primary.expect("primary set once free neighbors exist");
        let s = p.clockwise();
        if !blocked(p) {
            return (st.moved(p), None);
        }
        if !blocked(s) {
            return (st.moved(s), None);
        }
        if free == 1 {
            return (Action::Settle, None);
        }
        let diag = p.opposite().offset() + s.opposite().offset();
        let diag_free = view.at(diag).is_some_and(|c| !c.obstacle);
        if st.prevprev == Some(diag) || diag_free {
            return (Action::Settle, None);
        }
        let turn = [p.opposite(), s.opposite()]
            .into_iter()
            .find(|&d| Some(d) != st.prev && !blocked(d))
            .or_else(|| Direction::CLOCKWISE.into_iter().find(|&d| !blocked(d)))
            .expect("a free neighbor exists");
        st.primary = Some(turn);
        (st.moved(turn), None)
    }

    fn heading(state: FcdfsState) -> Option<Direction> {
        state.primary
    }
}

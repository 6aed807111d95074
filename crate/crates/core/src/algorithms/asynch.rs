//! Asynchronous follow-the-corners search using a one-bit "active" broadcast.

use crate::engine::{Action, Capabilities, LocalRule, Register, Sensed, SensorView};
use crate::grid::Direction;

/// Whether the robot has moved, its primary direction, and its last move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AsynchState {
    pub moved: bool,
    pub primary: Direction,
    pub last: Direction,
}

impl Default for AsynchState {
    fn default() -> Self {
        AsynchState::decode(0)
    }
}

impl Register for AsynchState {
    const BITS: u32 = 5;

    fn encode(self) -> u32 {
        self.moved as u32 | (self.primary.code() as u32) << 1 | (self.last.code() as u32) << 3
    }

    fn decode(bits: u32) -> Self {
        AsynchState {
            moved: bits & 1 != 0,
            primary: Direction::from_code((bits >> 1) as u8),
            last: Direction::from_code((bits >> 3) as u8),
        }
    }
}

const ACTIVE: u8 = 1;

fn is_active(c: Sensed) -> bool {
    c.obstacle && c.broadcast == Some(ACTIVE)
}

fn is_wall(c: Sensed) -> bool {
    c.obstacle && c.broadcast != Some(ACTIVE)
}

/// Robots announce that they are active so that others neither walk into
/// them nor mistake them for walls.
#[derive(Clone, Copy, Debug, Default)]
pub struct AsynchFcdfs;

impl AsynchFcdfs {
    fn go(st: &mut AsynchState, d: Direction) -> (Action, Option<u8>) {
        st.moved = true;
        st.last = d;
        (Action::Move(d), Some(ACTIVE))
    }
}

impl LocalRule for AsynchFcdfs {
    type State = AsynchState;
    const NAME: &'static str = "asynch-fcdfs";
    const CAPABILITIES: Capabilities = Capabilities::local(2, 1, 5);

    fn entry_broadcast(&self) -> Option<u8> {
        Some(ACTIVE)
    }

    fn step(&self, view: &SensorView<'_>, st: &mut AsynchState) -> (Action, Option<u8>) {
        let around = Direction::CLOCKWISE.map(|d| view.toward(d));
        let cell = |d: Direction| around[d.code() as usize];
        let wall = |d: Direction| is_wall(cell(d));
        let active = |d: Direction| is_active(cell(d));
        let wait = (Action::Wait, Some(ACTIVE));

        let walls = Direction::CLOCKWISE.iter().filter(|&&d| wall(d)).count();
        if walls == 4 {
            return (Action::Settle, Some(ACTIVE));
        }
        if !st.moved {
            if Direction::CLOCKWISE.iter().any(|&d| active(d)) {
                return wait;
            }
            st.primary = Direction::CLOCKWISE
                .into_iter()
                .find(|&d| !cell(d).obstacle)
                .unwrap();
        }
        let p = st.primary;
        let s = p.clockwise();
        if active(p) {
            return wait;
        }
        if !cell(p).obstacle {
            return Self::go(st, p);
        }
        if active(s) {
            return wait;
        }
        if !cell(s).obstacle {
            return Self::go(st, s);
        }
        if walls == 3 {
            return (Action::Settle, Some(ACTIVE));
        }
        let diag = p.opposite().offset() + s.opposite().offset();
        let d = view.at(diag).expect("diagonal within radius two");
        if !d.obstacle || d.broadcast == Some(ACTIVE) {
            return (Action::Settle, Some(ACTIVE));
        }
        let came_from = st.last.opposite();
        let Some(turn) = [p.opposite(), s.opposite()]
            .into_iter()
            .find(|&d| d != came_from && !wall(d))
        else {
            return wait;
        };
        if cell(turn).obstacle {
            return wait;
        }
        st.primary = turn;
        Self::go(st, turn)
    }

    fn heading(state: AsynchState) -> Option<Direction> {
        state.moved.then_some(state.primary)
    }
}

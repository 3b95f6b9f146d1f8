use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Approach {
    North,
    South,
    East,
    West,
}

impl Approach {
    /// Column order used by sensor snapshots and time-series output.
    pub const ALL: [Approach; 4] = [
        Approach::North,
        Approach::South,
        Approach::East,
        Approach::West,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            Approach::North => "N",
            Approach::South => "S",
            Approach::East => "E",
            Approach::West => "W",
        }
    }

    pub fn movements(self) -> [Movement; 2] {
        [
            Movement::new(self, Turn::Through),
            Movement::new(self, Turn::Right),
        ]
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" => Ok(Approach::North),
            "S" => Ok(Approach::South),
            "E" => Ok(Approach::East),
            "W" => Ok(Approach::West),
            other => Err(format!(
                "unknown approach '{other}' (expected N, S, E or W)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Turn {
    Through,
    Right,
}

/// One of the eight lane movements: an approach and a turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Movement {
    pub approach: Approach,
    pub turn: Turn,
}

impl Movement {
    pub const ALL: [Movement; 8] = [
        Movement::new(Approach::North, Turn::Through),
        Movement::new(Approach::North, Turn::Right),
        Movement::new(Approach::South, Turn::Through),
        Movement::new(Approach::South, Turn::Right),
        Movement::new(Approach::East, Turn::Through),
        Movement::new(Approach::East, Turn::Right),
        Movement::new(Approach::West, Turn::Through),
        Movement::new(Approach::West, Turn::Right),
    ];

    pub const fn new(approach: Approach, turn: Turn) -> Self {
        Self { approach, turn }
    }

    pub fn index(self) -> usize {
        self.approach.index() * 2 + self.turn as usize
    }
}

impl fmt::Display for Movement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let turn = match self.turn {
            Turn::Through => "through",
            Turn::Right => "right",
        };
        write!(f, "{}.{}", self.approach.code(), turn)
    }
}

impl FromStr for Movement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, t) = s
            .split_once('.')
            .ok_or_else(|| format!("movement '{s}' must look like N.through or E.right"))?;
        let turn = match t {
            "through" => Turn::Through,
            "right" => Turn::Right,
            other => {
                return Err(format!(
                    "unknown turn '{other}' (expected through or right)"
                ))
            }
        };
        Ok(Movement::new(a.parse()?, turn))
    }
}

/// Green phases. Each serves both movements of one approach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    /// East green.
    P1,
    /// West green.
    P2,
    /// South green.
    P3,
    /// North green.
    P4,
}

impl Phase {
    /// Rotation order.
    pub const ALL: [Phase; 4] = [Phase::P1, Phase::P2, Phase::P3, Phase::P4];

    pub fn approach(self) -> Approach {
        match self {
            Phase::P1 => Approach::East,
            Phase::P2 => Approach::West,
            Phase::P3 => Approach::South,
            Phase::P4 => Approach::North,
        }
    }

    pub fn serving(approach: Approach) -> Phase {
        match approach {
            Approach::East => Phase::P1,
            Approach::West => Phase::P2,
            Approach::South => Phase::P3,
            Approach::North => Phase::P4,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn successor(self) -> Phase {
        Phase::ALL[(self.index() + 1) % 4]
    }

    pub fn serves(self, movement: Movement) -> bool {
        movement.approach == self.approach()
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.index() + 1)
    }
}

impl FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P1" => Ok(Phase::P1),
            "P2" => Ok(Phase::P2),
            "P3" => Ok(Phase::P3),
            "P4" => Ok(Phase::P4),
            other => Err(format!("unknown phase '{other}'")),
        }
    }
}

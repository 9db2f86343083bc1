//! Shared fixtures for unit tests.

use crate::QuboInstance;

/// Five-variable instance used as the worked example across modules.
///
/// Diagonal (5, 8, 3, -2, 5); row 0 carries a 2 to every other variable,
/// row 1 a 2 to each later variable, plus entries (2,4)=3 and (3,4)=4.
/// All-ones evaluates to 40; variables 0 and 1 alone give 15.
pub fn five_node_demo() -> QuboInstance {
    QuboInstance::from_entries(
        5,
        &[
            (0, 0, 5),
            (0, 1, 2),
            (0, 2, 2),
            (0, 3, 2),
            (0, 4, 2),
            (1, 1, 8),
            (1, 2, 2),
            (1, 3, 2),
            (1, 4, 2),
            (2, 2, 3),
            (2, 4, 3),
            (3, 3, -2),
            (3, 4, 4),
            (4, 4, 5),
        ],
    )
    .unwrap()
}

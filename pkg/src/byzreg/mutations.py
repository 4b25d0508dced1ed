"""Protocol threshold mutations, used only by the mutation-kill test suite.

Each constant names a deliberate single-point weakening of the protocol.
A correct deployment runs with no mutations; the checker is expected to
produce at least one FAIL when any of these is switched on.
"""

ECHO_THRESHOLD_NONSTRICT = "ECHO_THRESHOLD_NONSTRICT"
"""Send READY at echo count >= (n+t)/2 instead of strictly greater."""

READY_DELIVER_AT_2T = "READY_DELIVER_AT_2T"
"""Deliver at 2t matching READY messages instead of 2t+1."""

READ_QUORUM_MINUS_ONE = "READ_QUORUM_MINUS_ONE"
"""Reads wait for n-t-1 state reports / catch-up acks instead of n-t."""

NO_CATCH_UP = "NO_CATCH_UP"
"""Reads return right after the freshness check, skipping the catch-up round."""

NO_FRESHNESS = "NO_FRESHNESS"
"""Reads accept any n-t state reports without comparing sequence numbers."""

ALL_MUTATIONS = (
    ECHO_THRESHOLD_NONSTRICT,
    READY_DELIVER_AT_2T,
    READ_QUORUM_MINUS_ONE,
    NO_CATCH_UP,
    NO_FRESHNESS,
)

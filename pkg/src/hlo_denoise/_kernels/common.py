"""Constants shared by both sweep backends."""

#: Initial best energy; treated as +infinity.
E_INIT = 1e6

STATUS_INACTIVE = 0
STATUS_NULL_NORMAL = 1
STATUS_FALLBACK = 2
STATUS_HALF_WINDOW = 3
STATUS_NO_CANDIDATE = 4

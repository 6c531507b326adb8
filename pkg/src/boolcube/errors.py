"""Shared error types and the arity cost guard."""


class ResourceLimitError(RuntimeError):
    """Raised when an exact computation would exceed the default cost guard."""


# Exhaustive routines refuse work above 2**GUARD_BITS table cells unless the
# caller passes override_guard=True.
GUARD_BITS = 26


def check_guard(bits: int, what: str, override_guard: bool = False, limit: int = GUARD_BITS) -> None:
    if bits > limit and not override_guard:
        raise ResourceLimitError(
            f"{what} needs 2^{bits} table cells (guard is 2^{limit}); "
            "pass override_guard=True to run anyway"
        )

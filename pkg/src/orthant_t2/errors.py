class DomainError(ValueError):
    """An argument violates a documented precondition.

    The message always names the violated precondition; the CLI maps this
    exception to exit code 2.
    """

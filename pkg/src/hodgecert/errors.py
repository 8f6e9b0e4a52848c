"""Exception hierarchy; every error carries the short code used in reports and by the CLI."""


class HodgeCertError(Exception):
    code = "E_GENERIC"


class TooLargeError(HodgeCertError):
    code = "E_TOO_LARGE"


class DegreeMismatchError(HodgeCertError):
    code = "E_DEGREE_MISMATCH"


class NonHomogeneousError(DegreeMismatchError):
    code = "E_NONHOMOGENEOUS"


class SingularError(HodgeCertError):
    code = "E_SINGULAR"


class NotInvariantError(HodgeCertError):
    code = "E_NOT_INVARIANT"


class BadCharacterError(HodgeCertError):
    code = "E_BAD_CHARACTER"


class ParseError(HodgeCertError):
    code = "E_PARSE"

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key

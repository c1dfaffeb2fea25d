class EntmapError(Exception):
    pass


class NonSquare(EntmapError):
    pass


class NonFinite(EntmapError):
    pass


class NotHermitian(EntmapError):
    pass


class NotUnitary(EntmapError):
    pass


class DimensionMismatch(EntmapError):
    pass


class WeightSum(EntmapError):
    pass


class BadParams(EntmapError):
    pass


class BadDims(EntmapError):
    pass


class NotHermiticityPreserving(EntmapError):
    pass


class UncertifiedMap(EntmapError):
    pass


class Unsupported(EntmapError):
    pass


class ParseError(EntmapError):
    pass


class CertificateError(EntmapError):
    """ an exact integer extraction did not round cleanly """
    pass


class InvalidState(EntmapError):
    pass

"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures without
a lookup table: 2 for validation problems, 3 for I/O, 4 for an empty
gallery partition.
"""


class FacekitError(Exception):
    exit_code = 2

    @property
    def kind(self):
        return type(self).__name__


# --- input validation -------------------------------------------------------

class LandmarkError(FacekitError):
    pass


class MalformedJson(LandmarkError):
    pass


class PointError(LandmarkError):
    def __init__(self, name, detail=""):
        self.name = name
        msg = name if not detail else f"{name}: {detail}"
        super().__init__(msg)


class MissingPoint(PointError):
    pass


class DuplicatePoint(PointError):
    pass


class UnknownPoint(PointError):
    pass


class OutOfRange(PointError):
    pass


class DegenerateBox(FacekitError):
    pass


class EmptyIntersection(FacekitError):
    pass


class CoincidentPoints(FacekitError):
    pass


class InvalidSigmas(FacekitError):
    pass


class TooSmall(FacekitError):
    pass


class BadGrid(FacekitError):
    pass


class LengthMismatch(FacekitError):
    pass


class DescriptorMismatch(FacekitError):
    pass


class MissingScore(FacekitError):
    pass


class InvalidWeights(FacekitError):
    pass


class BadConfig(FacekitError):
    def __init__(self, key, reason):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}")


class ConfigMismatch(FacekitError):
    pass


class CorruptGallery(FacekitError):
    pass


class UnsupportedVersion(CorruptGallery):
    pass


# --- I/O and lookup ---------------------------------------------------------

class IoFailure(FacekitError):
    exit_code = 3


class NoCandidates(FacekitError):
    exit_code = 4


class ImageMismatch(FacekitError):
    """Landmark file and image disagree on dimensions."""

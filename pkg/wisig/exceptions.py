# wisig
#
# This code is released under the MIT License.
# See the "LICENSE" file for more information.

from __future__ import unicode_literals

"""Exception classes for wisig."""

# Exportable constants.
WI_ERR_SINGLE_CLASS = "single-class input: the dichotomizer needs positive and negative samples"
WI_ERR_EMPTY = "empty input"


class WisigError(Exception):
    """wisig base exception class."""
    def __init__(self, error_message=None):
        super(WisigError, self).__init__(error_message)
        self.error_message = error_message


class FeatureFileError(WisigError):
    """A feature, dissimilarity or manifest file could not be parsed.

    The message names the file and the line number where parsing stopped,
    for example::

        bad.txt line 4: expected 4 feature values, found 3

    Attributes:
        filename (str): The file that was being read (or ``"stream()"``).
        lineno (int): The 1-based line number of the offending line.
    """
    def __init__(self, message, filename="", lineno=0):
        self.filename = filename
        self.lineno = lineno
        if lineno > 0:
            message = "{} line {}: {}".format(filename, lineno, message)
        super(FeatureFileError, self).__init__(message)


class DatasetError(WisigError):
    """A dataset violates one of its invariants (shared dimensionality,
    unique ``(writer, signature, kind)`` keys, finite values)."""
    pass


class DimensionError(WisigError):
    """Two operands that must have the same length don't."""
    pass


class EmptyInputError(WisigError):
    """An operation that needs at least one item got none."""
    def __init__(self, error_message=WI_ERR_EMPTY):
        super(EmptyInputError, self).__init__(error_message)


class ProtocolError(WisigError):
    """A pairing or exploitation protocol cannot be satisfied by the data.

    The usual cause is a writer with fewer genuine signatures than the
    protocol asks for; the message names the writer."""
    pass


class UnsupportedParameterError(WisigError):
    """A parameter value the method does not support, such as a condensed
    nearest neighbors run with ``k != 1``."""
    pass


class SingleClassError(WisigError):
    """The training samples contain only one class.

    The dichotomizer separates the within-writer (positive) class from the
    between-writer (negative) class, so both must be present."""
    def __init__(self, error_message=WI_ERR_SINGLE_CLASS):
        super(SingleClassError, self).__init__(error_message)


class ConvergenceError(WisigError):
    """Sequential minimal optimization ran out of its iteration budget.

    Attributes:
        violation (float): The KKT violation (gap between the most violating
            pair) when the budget ran out.
        iterations (int): Number of pair updates performed.
    """
    def __init__(self, violation, iterations):
        self.violation = violation
        self.iterations = iterations
        super(ConvergenceError, self).__init__(
            "SMO did not converge after {} iterations (KKT violation {:.3g})".format(
                iterations, violation)
        )


class ConfigError(WisigError):
    """An experiment or synthesis configuration is invalid."""
    pass


class ModelFormatError(WisigError):
    """A model container could not be read: wrong format tag, unsupported
    version or missing fields."""
    pass

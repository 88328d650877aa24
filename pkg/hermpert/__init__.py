"""

Perturbation expansions of Hermitian eigenvalues and eigenvectors, checked
against a Jacobi reference eigensolver.

"""

import logging
import os

from .alignment import align, align_eigenvectors, blockwise_diagonalize, m_matrix
from .config import Config
from .core import format_matrix, operator_norm, parse_matrix
from .exceptions import HermPertException
from .first_order import first_order_eigenvalues, u_approx
from .harness import convergence_study, paper_example_regression
from .jacobi_oracle import eigh, eigvalsh
from .predictors import *
from .rayleigh_schrodinger import eigenvector_derivative, line_expansion, n_matrix
from .schur import refined_eigenvalues, schur_data
from .structs.matrix import DenseMatrix, HermitianMatrix

logging.getLogger(__name__).addHandler(logging.NullHandler())


def set_config(**values: float):
    """Sets numeric tolerances through their environment variables.

    The values take effect for processes and imports started afterwards,
    and for the running process through the attributes of ``Config``.

    Args:
        **values: ``Config`` attribute names and their new values, for
            example ``set_config(GROUPING_TOL=1e-9)``.
    """
    for name, value in values.items():
        if not hasattr(Config, name):
            raise AttributeError(f"unknown setting {name}")
        os.environ[f"HERMPERT_{name}"] = str(value)
        setattr(Config, name, type(getattr(Config, name))(value))

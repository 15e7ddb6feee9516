"""qhlab: exact models and classification of submaximally symmetric almost
quaternion-Hermitian homogeneous spaces."""

from .forms import (ClassReport, FirstOrderReport, GenuineLoci, IsotypicPair,
                    KForm, eh_coefficients, first_order_tests,
                    fundamental_forms, genuine_loci, isotypic_split,
                    table4_row)
from .geometry import GroupData, RiemannClass, classify, curvature, nomizu
from .lie import (BilinearMap, LieAlgebra, Representation, equivariant_hom,
                  invariant_vectors, semidirect)
from .models import (HomogeneousModel, ModelSpec, NormalForm, build_model,
                     dims, in_families, jacobi_equations, normalize,
                     symbolic_model)
from .poly import Poly, proportionality
from .quaternion import (QMatrix, Quaternion, hermitian_metric, rat, realify,
                         sp_basis)

__all__ = [
    "BilinearMap", "ClassReport", "FirstOrderReport", "GenuineLoci",
    "GroupData", "HomogeneousModel", "IsotypicPair", "KForm", "LieAlgebra",
    "ModelSpec", "NormalForm", "Poly", "QMatrix", "Quaternion",
    "Representation", "RiemannClass", "build_model", "classify", "curvature",
    "dims", "eh_coefficients", "equivariant_hom", "first_order_tests",
    "fundamental_forms", "genuine_loci", "hermitian_metric", "in_families",
    "invariant_vectors", "isotypic_split", "jacobi_equations", "nomizu",
    "normalize", "proportionality", "rat", "realify", "semidirect",
    "sp_basis", "symbolic_model", "table4_row",
]

__version__ = "0.1.0"

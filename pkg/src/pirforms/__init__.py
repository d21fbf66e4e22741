"""Symmetric bilinear forms on finite modules over artinian principal ideal rings.

Decides anisotropy and quasi-anisotropy through the graded residue-field
forms, computes lower, upper and radical roots, and ships brute-force
oracles that check the structural theorems on small instances.
"""

from .aniso import (AnisoReport, RadicalRootFormula, ff_is_anisotropic, is_anisotropic, is_quasi_anisotropic,
                    radical_root, radical_root_formula)
from .forms import (CompositeForm, DegenerateFormError, GramForm, MultiForm, induced_form, is_nondegenerate, kernel,
                    localize, orthogonal_split, orthogonal_sum, perp, quotient_form, restrict)
from .graded import (FFForm, even_form, lower_root, lr_s, odd_form, quotient_by_socle, rho, shave, socle,
                     tail_forms, upper_root)
from .modules import (BudgetExceeded, ModuleShape, Submodule, Subquotient, enumerate_submodules, snf,
                      submodule_from_generators)
from .oracle import (ConditionVerdict, SuiteResult, check_condition, check_ksi, radical_root_oracle, run_suite)
from .ring import Family, LocalPIR, RingElem, crt_decompose

__version__ = "0.1.0"

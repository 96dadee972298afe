"""nichols-forge: exact graded data of Nichols algebras of braided vector spaces."""

from .braiding import (BraidedSpace, cartan_braiding, cartan_diagnose,
                       check_braid_equation, check_rigidity, custom_braiding,
                       diagonal_braiding, dual_braiding, flip_braiding,
                       hecke_label, jordanian_braiding, rack_braiding)
from .engine import (Caps, GradedReport, RelationDump, contains_relation,
                     generic_smoke, graded_dims, hilbert_reciprocity_check,
                     new_relation_count, relation_dump, truncated_dims)
from .fields import (CyclotomicField, PrimeField, Rationals, cyclotomic_context,
                     find_primes, make_field, reduce_scalar)
from .racks import (Cocycle, Rack, affine_rack, check_rack, cocycle_from_matrix,
                    conjugation_rack, constant_cocycle, cube_faces_rack,
                    rack_from_table, rack_isomorphic)
from .symmetrizer import (SubspaceBasis, image_basis, kernel_basis, pivot_lift,
                          restricted_rank, row_space_basis, symmetrizer_apply,
                          symmetrizer_oracle)
from .tensorops import (TensorOperator, apply_generator, matsumoto_lift,
                        shuffle_factor)

__version__ = "0.1.0"

"""Set-valued information systems: tolerance relations, homomorphism-based
compression, discernibility-matrix reduction and incremental updates."""
from .compress import (BlockMapping, compress_system, compress_table, image_relation, is_consistent,
                       pullback)
from .dynamic import (CompressionState, add_attributes, add_objects, build_state, delete_attributes,
                      delete_objects, load_state, save_state, verify_against_batch)
from .errors import (ConsistencyError, ReductError, RelationError, StateError, SvisError,
                     TableError)
from .partition import Partition, joint_partition, partition_by_equivalence, partition_by_relation
from .reduct import (CnfFormula, DiscernibilityMatrix, discernibility_function, discernibility_matrix,
                     is_reduct, lift_reduct, reducts_bruteforce, reducts_via_primes,
                     system_discernibility_matrix, system_reducts, choose_one)
from .relations import (Relation, RelationSystem, induced_system, intersect_relations, is_covering,
                        tolerance_exact, tolerance_ge, tolerance_ge_joint, tolerance_valueset)
from .table import (SetValuedTable, add_columns, append_rows, drop_columns, parse_table, read_table,
                    remove_rows, serialize_table)

__version__ = "0.1.0"

__all__ = [
    "BlockMapping",
    "compress_system",
    "compress_table",
    "image_relation",
    "is_consistent",
    "pullback",
    "CompressionState",
    "add_attributes",
    "add_objects",
    "build_state",
    "delete_attributes",
    "delete_objects",
    "load_state",
    "save_state",
    "verify_against_batch",
    "ConsistencyError",
    "ReductError",
    "RelationError",
    "StateError",
    "SvisError",
    "TableError",
    "Partition",
    "joint_partition",
    "partition_by_equivalence",
    "partition_by_relation",
    "CnfFormula",
    "DiscernibilityMatrix",
    "discernibility_function",
    "discernibility_matrix",
    "is_reduct",
    "lift_reduct",
    "reducts_bruteforce",
    "reducts_via_primes",
    "system_discernibility_matrix",
    "system_reducts",
    "choose_one",
    "Relation",
    "RelationSystem",
    "induced_system",
    "intersect_relations",
    "is_covering",
    "tolerance_exact",
    "tolerance_ge",
    "tolerance_ge_joint",
    "tolerance_valueset",
    "SetValuedTable",
    "add_columns",
    "append_rows",
    "drop_columns",
    "parse_table",
    "read_table",
    "remove_rows",
    "serialize_table",
]

from .hierarchy import (
    BlockHierarchy,
    BlockLevel,
    HierarchyError,
    HierarchyReport,
    build_block_hierarchy,
    dump_hierarchy,
    hierarchy_checks,
)
from .product_system import (
    CyclicExtensionSystem,
    ProductSystem,
    ProductSystemError,
    RelationReport,
    build_cyclic_extension_system,
    build_product_normalizer,
    dump_product_system,
    unit_vectors,
    verify_product_relations,
)
from .sadic import (
    ComponentSystem,
    Horizons,
    PipelineReport,
    build_direct_product,
    build_profinite_realization,
    odometer_setup,
    product_generators,
    product_letter_maps,
    run_sadic_embedding,
)

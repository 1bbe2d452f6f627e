//! Reproduction operators for all three encodings.

mod bits;
mod neat;
mod structural;
mod temperature;

pub use bits::{mutate_bitstring, npoint_crossover, npoint_crossover_at, BitMutationRates};
pub use neat::{
    align_by_innovation, crossover_genelist, neat_add_connection, neat_split_connection,
    AlignedRow, AlignedTable, InnovationRecord, InnovationRegistry, MutationKind,
};
pub use structural::{
    add_connections, cell_division, connection_test, connection_tests, delete_connections,
    delete_neurons, TEST_SENTINEL,
};
pub use temperature::{
    instantaneous_temperature, perturb_weights, structural_mutation_count, temperature,
    TemperatureParams,
};

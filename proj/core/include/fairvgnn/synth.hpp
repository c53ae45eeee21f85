#pragma once

#include <cstdint>

#include "fairvgnn/dataset.hpp"

namespace fairvgnn {

/// Synthetic stand-ins for the German/Credit/Bail benchmark graphs. The
/// originals are distributed by external projects; these generators
/// reproduce the published shape statistics exactly (node, edge and feature
/// counts, sensitive-edge homophily) and the qualitative structure the
/// toolkit studies: sensitive proxies, channels whose sensitive correlation
/// rises only after propagation, task channels independent of the group,
/// and group-biased labels.
///
/// german: n=1000,  |E|=22242,    d=27, homophily 0.8048, sensitive "gender"
/// credit: n=30000, |E|=1436858,  d=13, homophily 0.9595, sensitive "age"
/// bail:   n=18876, |E|=321308,   d=18, homophily 0.5500, sensitive "race"
///
/// German carries two low-correlation channels that overtake two of the
/// top-ranked ones after one propagation step; Credit's correlation ranking
/// is stable under propagation.
GraphDataset make_german_like(std::uint64_t seed = 42);
GraphDataset make_credit_like(std::uint64_t seed = 42);
GraphDataset make_bail_like(std::uint64_t seed = 42);

/// Separable sanity dataset: labels depend on a latent task signal only,
/// the sensitive attribute is independent noise, and a fair perfect
/// classifier exists.
GraphDataset make_separable_fair(std::size_t n, std::uint64_t seed);

}  // namespace fairvgnn

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "polycwm/model.hpp"

namespace polycwm {

// Cluster ids per observation. Ids are arbitrary; only co-membership matters
// to the agreement indices.
using Partition = std::vector<std::size_t>;

// Row-wise argmax; ties go to the lowest component index.
Partition map_assign(const Responsibilities& resp);
std::size_t map_index(std::span<const double> row) noexcept;

double rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

// Hubert-Arabie adjusted Rand index. When the denominator vanishes the result
// is 1 if the two partitions coincide up to renaming, and 0 otherwise.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

// ARI over positions m..n-1 only.
double ari_unlabeled_subset(std::span<const std::size_t> a, std::span<const std::size_t> b, std::size_t m);

}  // namespace polycwm

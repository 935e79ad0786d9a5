#pragma once

#include <cstdint>
#include <optional>

#include "dagreal/node.hpp"

namespace dagreal {

enum class SeparationPolicy { bfmss, assume_nonzero };

const char* to_string(SeparationPolicy policy) noexcept;

/// Computes (and caches in Node::sep) the BFMSS parameters of every node
/// below `node`. Returns the parameters of `node`.
SeparationParams separation_params(Node& node);

/// Product of the indices of the distinct root nodes below `node`. Throws
/// EvalError(degree_overflow) when it does not fit in 62 bits.
std::uint64_t degree_bound(const Node& node);

/// Exponent e with val(node) != 0 => |val(node)| > 2^e. An empty result means
/// minus infinity: the policy never declares zero.
std::optional<std::int64_t> sep_bound(Node& node, SeparationPolicy policy);

}  // namespace dagreal

#pragma once

// Structural builders shared by the restructuring tests and the acceptance
// runner.

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "dagreal/real.hpp"
#include "dagreal/restructure.hpp"

namespace fixtures {

/// Node count per kind over everything reachable from `root`.
std::map<dagreal::OpKind, std::size_t> kind_counts(const dagreal::Node& root);

/// Node counts around one Add incorporation into a form whose four
/// coefficients are all nodes, and into the initial form.
struct IncorporateCounts {
  // build(after) minus build(before)
  long created_mul = 0;
  long created_add = 0;
  // build(after) minus (build(before) + E): growth of the dag
  long net_mul = 0;
  long net_add = 0;
  // same, starting from init(X)
  long trivial_created_mul = 0;
  long trivial_created_add = 0;
};
IncorporateCounts add_incorporation_counts();

/// Top Div over `segments.back()` additions over a Div over ... over a sum of
/// `base_operands` leaves. segments[0] is the innermost group. Returns the
/// dag and its Div nodes, innermost first (the last one is the root).
struct DivChain {
  dagreal::Real value;
  std::vector<dagreal::Node*> divs;
};
DivChain div_add_chain(const std::vector<unsigned>& segments, unsigned base_operands);

/// Random operator tree (+ - * / unary -) over `operands` distinct leaves, no
/// shared nodes. Leaves are positive doubles; with `safe_div` every divisor
/// uses only + * / and so cannot vanish.
dagreal::Real random_operator_tree(std::mt19937_64& rng, unsigned operands, bool safe_div);

/// Left-leaning chain of `n` operands joined by `kind`.
dagreal::Real chain(dagreal::OpKind kind, unsigned n, double first = 1.0);

/// Longest path made only of nodes of `kind`.
std::size_t kind_depth(const dagreal::Node& root, dagreal::OpKind kind);

}  // namespace fixtures

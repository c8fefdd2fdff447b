#pragma once

#include <cstddef>
#include <string_view>
#include <algorithm>
#include <utility>
#include <vector>

namespace dpcollapse {

/// Serial execution is the reference; parallel must reproduce it bit for bit.
enum class ExecPolicy { serial, parallel };

ExecPolicy parse_exec_policy(std::string_view name);
std::string_view to_string(ExecPolicy policy);

/// Number of OpenMP threads the parallel policy will use.
int available_threads();

/// Work items are folded in blocks of this size; the block partition is fixed,
/// so reductions do not depend on the thread count.
inline constexpr std::size_t kReductionBlock = 64;

/// Calls body(i) for i in [0, n). With the parallel policy iterations run under
/// an OpenMP dynamic schedule, so body must only write to item-owned storage.
template <class Body>
void for_each_index(ExecPolicy policy, std::size_t n, Body&& body) {
  if (policy == ExecPolicy::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < nn; ++i) body(static_cast<std::size_t>(i));
}

/// Deterministic reduction: each fixed-size block [b*B, (b+1)*B) is folded in index
/// order by fold(acc, i) into a fresh accumulator make(); block accumulators are then
/// merged in block order with merge(total, block).
template <class Acc, class Make, class Fold, class Merge>
Acc ordered_reduce(ExecPolicy policy, std::size_t n, Make&& make, Fold&& fold, Merge&& merge) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<Acc> partial(blocks);
  for_each_index(policy, blocks, [&](std::size_t b) {
    Acc acc = make();
    const std::size_t end = std::min(n, (b + 1) * kReductionBlock);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) fold(acc, i);
    partial[b] = std::move(acc);
  });
  Acc total = make();
  for (auto& p : partial) merge(total, p);
  return total;
}

}  // namespace dpcollapse

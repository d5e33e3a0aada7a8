#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "linten/oracle/adversaries.hpp"
#include "linten/oracle/session.hpp"

namespace linten {

/// Monte Carlo estimate of a tester's query-placement profile: for each
/// point z, the fraction of null-adversary runs in which z shows up among
/// the first `prefix_len` queries. The blinding adversary targets the
/// least-visited cells of a disagreement set, so this is the estimation
/// half of that construction.
inline std::vector<double> profile_query_frequencies(
    const std::function<void(TableSession&)>& tester, const BoolFn& f, int trials,
    int prefix_len, std::uint64_t master_seed) {
  const std::size_t size = f.size();
  std::vector<std::int64_t> counts(size, 0);
  for (int trial = 0; trial < trials; ++trial) {
    Rng seeder = Rng::derive(master_seed, static_cast<std::uint64_t>(trial));
    TableSession session(TableDomain(f), AdversaryConfig{},
                         adversary_null<TableDomain>(), seeder.next_u64());
    tester(session);
    const auto& tr = session.transcript();
    const std::size_t upto =
        std::min<std::size_t>(tr.size(), static_cast<std::size_t>(prefix_len));
    for (std::size_t i = 0; i < upto; ++i) ++counts[tr[i].first.bits];
  }
  std::vector<double> freq(size);
  for (std::size_t i = 0; i < size; ++i)
    freq[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
  return freq;
}

}  // namespace linten
